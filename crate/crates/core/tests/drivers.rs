use maxclass::autom::{build_h, h_cap_inn_check, verify_thm_main2, Budgets};
use maxclass::blackburn::build_blackburn_pc;
use maxclass::derivations::DerivationSpace;
use maxclass::selftest::nonmetabelian_fixture;
use maxclass::{Error, MaxClassProfile};

fn fixture() -> MaxClassProfile {
    MaxClassProfile::analyze(nonmetabelian_fixture().unwrap()).unwrap()
}

#[test]
fn fixture_profile() {
    let f = fixture();
    assert!(!f.metabelian());
    assert_eq!((f.p(), f.n(), f.l(), f.r(), f.t()), (5, 8, 2, 5, 5));
    assert_eq!(f.a().order_exponent(), 3);
}

#[test]
fn validation_failures_carry_the_context_flag() {
    let f = fixture();
    let g = f.group();
    let target = f.term(3);
    let plain = DerivationSpace::new(&f, target.clone()).unwrap();
    let strict = DerivationSpace::new(&f, target.clone()).unwrap().in_theorem_context();
    let elements = target.elements(g);
    let bad = elements
        .iter()
        .flat_map(|u| elements.iter().map(move |v| (u, v)))
        .find(|(u, v)| plain.make(u, v).is_err())
        .expect("some pair in G_3 x G_3 gives no derivation");
    assert!(matches!(plain.make(bad.0, bad.1), Err(Error::ValidationFailed { theorem: false, .. })));
    assert!(matches!(strict.make(bad.0, bad.1), Err(Error::ValidationFailed { theorem: true, .. })));
}

#[test]
fn main2_on_fixture() {
    let rep = verify_thm_main2(&fixture(), 1, &Budgets::default()).unwrap();
    assert!(rep.passed, "{:?}", rep.checks);
    assert!(rep.achieved_exponent.unwrap() >= rep.required_exponent.unwrap());
}

#[test]
fn h_has_order_a_and_meets_inn_trivially() {
    let f = fixture();
    let (h, closure) = build_h(&f, 1).unwrap();
    assert_eq!(h.len(), 125);
    assert!(closure.passed && closure.exhaustive);
    assert!(h_cap_inn_check(&f).unwrap().passed);
}

#[test]
fn h_cap_inn_refuses_metabelian_case() {
    let g = MaxClassProfile::analyze(build_blackburn_pc(5, 7).unwrap()).unwrap();
    assert_eq!(g.r(), 2);
    assert!(matches!(h_cap_inn_check(&g), Err(Error::Precondition(_))));
}
