//! Acceptance criteria, one line per criterion. Runs without the libtest harness so the
//! summary is always printed.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use maxclass::autom::{check_homomorphism, verify_thm_main1, verify_thm_main2, verify_thm_metabelian, Budgets};
use maxclass::blackburn::{build_blackburn_pc, build_blackburn_presentation, cross_model_check, verify_sigma, DEFAULT_SAMPLES};
use maxclass::derivations::DerivationSpace;
use maxclass::maxclass::validate_maximal_class;
use maxclass::pcgroup::consistency_check;
use maxclass::selftest::{
    cocycle_suite, commutator_identity_suite, conjugacy_suite, derivation_law_suite, lemma_down_suite,
    lemma_kernel_suite, nonmetabelian_fixture, square_zero_suite, SuiteResult,
};
use maxclass::{Element, Error, MaxClassProfile};

const SEED: u64 = 1;

type Verdict = Result<String, String>;

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(start: Instant, limit: u64, what: &str) -> Result<(), String> {
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(limit),
        format!("{what} took {:.1}s, limit {limit}s", elapsed.as_secs_f64()),
    )
}

fn profile(p: u32, n: usize) -> Result<MaxClassProfile, String> {
    let g = build_blackburn_pc(p, n).map_err(|e| e.to_string())?;
    MaxClassProfile::analyze(g).map_err(|e| e.to_string())
}

fn construction_grid() -> Verdict {
    let start = Instant::now();
    for (p, n) in [(3, 5), (3, 6), (5, 5), (5, 7), (5, 8), (7, 9)] {
        let pres = build_blackburn_presentation(p, n).map_err(|e| e.to_string())?;
        ensure(consistency_check(&pres).passed, format!("G'({p},{n}) inconsistent"))?;
        let prof = profile(p, n)?;
        ensure(validate_maximal_class(prof.group()).passed, format!("G'({p},{n}) not of maximal class"))?;
        ensure(prof.metabelian(), format!("G'({p},{n}) not metabelian"))?;
        ensure(prof.l() == n - 3, format!("G'({p},{n}) has l = {}", prof.l()))?;
    }
    within(start, 10, "grid")?;
    Ok(format!("6 groups consistent, maximal class, metabelian, l = n - 3 in {:.2}s", start.elapsed().as_secs_f64()))
}

fn cross_model() -> Verdict {
    let small = cross_model_check(3, 5, SEED, DEFAULT_SAMPLES).map_err(|e| e.to_string())?;
    ensure(small.passed && small.exhaustive && small.elements_checked == 81, format!("(3,5): {small:?}"))?;
    let large = cross_model_check(5, 7, SEED, DEFAULT_SAMPLES).map_err(|e| e.to_string())?;
    ensure(large.passed && !large.exhaustive && large.pairs_checked == 100_000, format!("(5,7): {large:?}"))?;
    for (p, n) in [(3, 5), (3, 6), (5, 5), (5, 7), (5, 8), (7, 9)] {
        let s = verify_sigma(p, n).map_err(|e| e.to_string())?;
        ensure(s.passed && s.matches_theta && s.order == p as u64, format!("sigma on ({p},{n}): {s:?}"))?;
    }
    Ok("(3,5) exhaustive over 81 elements, (5,7) on 100000 samples, sigma matches theta with order p on all six groups".into())
}

fn metabelian_theorem() -> Verdict {
    let start = Instant::now();
    for (p, n, pairs) in [(3, 5, 729), (5, 5, 15625)] {
        let prof = profile(p, n)?;
        let rep = verify_thm_metabelian(&prof, SEED, &Budgets::default()).map_err(|e| e.to_string())?;
        let detail = &rep.check("pairs").ok_or("no pairs check")?.detail;
        ensure(rep.passed, format!("G'({p},{n}) failed: {:?}", rep.checks))?;
        ensure(detail == &format!("all {pairs} pairs validate"), format!("G'({p},{n}): {detail}"))?;
        ensure(rep.achieved_exponent == Some(2 * n as i64 - 4), format!("G'({p},{n}) exponent"))?;
    }
    within(start, 60, "metabelian theorem")?;
    Ok(format!("729 and 15625 pairs validate in {:.2}s", start.elapsed().as_secs_f64()))
}

fn main1() -> Verdict {
    let prof = profile(5, 7)?;
    let rep = verify_thm_main1(&prof, SEED, &Budgets::default()).map_err(|e| e.to_string())?;
    ensure(rep.passed, format!("G'(5,7): {:?}", rep.checks))?;
    ensure(
        rep.required_exponent == Some(8) && rep.achieved_exponent == Some(10),
        format!("G'(5,7): required {:?}, achieved {:?}", rep.required_exponent, rep.achieved_exponent),
    )?;

    let fixture = MaxClassProfile::analyze(nonmetabelian_fixture().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(!fixture.metabelian() && fixture.n() == 8, "fixture is not a nonmetabelian group of order 5^8")?;
    let a = fixture.a().order_exponent();
    let rep = verify_thm_main1(&fixture, SEED, &Budgets::default()).map_err(|e| e.to_string())?;
    ensure(rep.passed, format!("fixture: {:?}", rep.checks))?;
    let pairs = &rep.check("pairs").ok_or("no pairs check")?.detail;
    let total = 5u64.pow(2 * a as u32);
    ensure(pairs == &format!("all {total} pairs validate"), format!("fixture pairs: {pairs}"))?;
    ensure(rep.check("h_cap_inn").is_some_and(|c| c.passed), "h_cap_inn failed")?;
    let c = rep.achieved_exponent.unwrap_or(0);
    ensure(c >= 10, format!("fixture achieved {c}"))?;
    Ok(format!("G'(5,7) required 8 achieved 10; fixture validates all {total} maps, H meets Inn(G) trivially, c = {c}"))
}

fn main2() -> Verdict {
    let start = Instant::now();
    let prof = profile(5, 7)?;
    ensure(prof.t() == 4, format!("t = {}", prof.t()))?;
    let rep = verify_thm_main2(&prof, SEED, &Budgets::default()).map_err(|e| e.to_string())?;
    ensure(rep.passed, format!("{:?}", rep.checks))?;
    let members = &rep.check("members").ok_or("no members check")?.detail;
    ensure(members == "all 15625 pairs validate", format!("members: {members}"))?;
    let (req, ach) = (rep.required_exponent.unwrap_or(i64::MAX), rep.achieved_exponent.unwrap_or(0));
    ensure(req == 4 && ach == 6, format!("bound {req} <= {ach}"))?;
    within(start, 120, "main2")?;
    Ok(format!("t = 4, 5^6 members, bound 4 <= 6 in {:.2}s", start.elapsed().as_secs_f64()))
}

fn lemma_suites() -> Verdict {
    let run = || -> maxclass::Result<Vec<SuiteResult>> {
        let g55 = MaxClassProfile::analyze(build_blackburn_pc(5, 5)?)?;
        let g57 = MaxClassProfile::analyze(build_blackburn_pc(5, 7)?)?;
        let a57 = DerivationSpace::new(&g57, g57.a())?;
        let a55 = DerivationSpace::new(&g55, g55.term(2))?;
        let t57 = DerivationSpace::new(&g57, g57.term(g57.t()))?;
        Ok(vec![
            cocycle_suite(&a57, 20, 1000, SEED)?,
            derivation_law_suite(&a55, 20, SEED)?,
            square_zero_suite(&t57, 10, SEED)?,
            lemma_down_suite(&g57, 10, SEED)?,
            lemma_kernel_suite(&g57, 3, SEED)?,
            commutator_identity_suite(g57.group(), 500, SEED),
            conjugacy_suite(&g57, 100, SEED)?,
        ])
    };
    let suites = run().map_err(|e| e.to_string())?;
    let failed: Vec<String> = suites.iter().filter(|s| !s.passed).map(|s| format!("{}: {}", s.name, s.detail)).collect();
    ensure(failed.is_empty(), failed.join("; "))?;
    ensure(suites[0].cases == 20_000, "cocycle suite size")?;
    ensure(suites[5].cases == 500 && suites[6].cases == 100, "identity or conjugacy suite size")?;
    let names: Vec<String> = suites.iter().map(|s| format!("{} ({})", s.name, s.cases)).collect();
    Ok(names.join(", "))
}

fn negative_controls() -> Verdict {
    let mut pres = build_blackburn_presentation(5, 7).map_err(|e| e.to_string())?;
    pres.set_commutator_tail(2, 0, Element::generator(7, 4)).map_err(|e| e.to_string())?;
    ensure(!consistency_check(&pres).passed, "corrupted [s_2', s'] := s_4' passes the consistency check")?;

    let g = build_blackburn_pc(5, 7).map_err(|e| e.to_string())?;
    let mut images = g.generators();
    images.swap(0, 1);
    let swapped = check_homomorphism(&g, images);
    ensure(matches!(swapped, Err(Error::HomCheckFailed(_))), "swapping s' and s_1' passes the hom check")?;

    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let path = dir.path().join("g56.grp");
    build_blackburn_presentation(5, 6).and_then(|p| p.write(&path)).map_err(|e| e.to_string())?;
    let status = Command::new(env!("CARGO_BIN_EXE_maxclass"))
        .args(["verify", "main1", path.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?
        .status;
    ensure(status.code() == Some(3), format!("verify main1 on G'(5,6) exited {status}"))?;
    Ok("corrupted tail is inconsistent, swapped images are rejected, main1 with n <= p + 1 exits 3".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("construction grid", construction_grid),
        ("cross-model check", cross_model),
        ("metabelian theorem", metabelian_theorem),
        ("main1", main1),
        ("main2", main2),
        ("lemma suites", lemma_suites),
        ("negative controls", negative_controls),
    ];
    let mut all = true;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", k + 1),
            Err(detail) => {
                all = false;
                println!("criterion {}: FAIL {name}: {detail}", k + 1);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
