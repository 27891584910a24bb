use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use maxclass::autom::{verify_thm_main1, verify_thm_main2, verify_thm_metabelian, Budgets, VerificationReport};
use maxclass::blackburn::{
    abelian_invariants, build_blackburn_presentation, cross_model_check, verify_sigma, CrossModelReport, RingModule,
    SigmaReport, DEFAULT_SAMPLES,
};
use maxclass::maxclass::{validate_maximal_class, verify_exponent_relations, ExponentRelationReport, MaxClassReport, ProfileReport};
use maxclass::pcgroup::consistency_check;
use maxclass::search::{tail_perturbation_search, SearchOutcome, DEFAULT_BUDGET};
use maxclass::selftest::{self, SelftestReport};
use maxclass::{Error, MaxClassProfile, PcGroup, PcPresentation};

const DEFAULT_SEED: u64 = 1;

const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_REFUSAL: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

#[derive(Parser)]
#[command(name = "maxclass", version, about = "Maximal-class p-group toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the pc presentation of G'(p, n), or search for a nonmetabelian neighbour
    Build {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        /// group file to write; without it the file is printed to stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// run the tail-perturbation search instead of writing G'(p, n)
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// candidates drawn by --search
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Consistency, maximal class and profile of a group file
    Analyze {
        file: PathBuf,
    },
    /// Run a theorem driver on a group file
    Verify {
        theorem: Theorem,
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Run every property suite
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Dump the ring model or the pc model of G'(p, n)
    Export {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        model: Model,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// sampled pairs when the cross-model check is not exhaustive
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Metabelian,
    Main1,
    Main2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Ring,
    Pc,
}

#[derive(clap::Args)]
struct BudgetArgs {
    #[arg(long)]
    exhaustive_pairs: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    commutativity_pairs: Option<u64>,
    #[arg(long)]
    main1_conjugators: Option<usize>,
    #[arg(long)]
    conjugation_samples: Option<usize>,
}

impl BudgetArgs {
    fn resolve(&self) -> Budgets {
        let d = Budgets::default();
        Budgets {
            exhaustive_pairs: self.exhaustive_pairs.unwrap_or(d.exhaustive_pairs),
            samples: self.samples.unwrap_or(d.samples),
            commutativity_pairs: self.commutativity_pairs.unwrap_or(d.commutativity_pairs),
            main1_conjugators: self.main1_conjugators.unwrap_or(d.main1_conjugators),
            conjugation_samples: self.conjugation_samples.unwrap_or(d.conjugation_samples),
        }
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    input_digest: String,
    seed: u64,
    budgets: toml::Table,
    result: T,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Precondition(_) | Error::NotMaximalClass(_) => EXIT_REFUSAL,
            Error::ValidationFailed { theorem: true, .. } => EXIT_VIOLATION,
            Error::Inconsistent(_)
            | Error::InvalidPresentation(_)
            | Error::Format(_)
            | Error::IndexOutOfRange { .. }
            | Error::BadElement { .. } => EXIT_INCONSISTENT,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn table<T: Serialize>(value: &T) -> toml::Table {
    toml::Table::try_from(value).expect("budgets serialize to a table")
}

fn emit<T: Serialize>(envelope: &Envelope<T>) {
    print!("{}", toml::to_string(envelope).expect("report serializes"));
}

fn read_input(path: &Path) -> Result<(String, String), Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })?;
    let text = String::from_utf8(bytes).map_err(|_| Failure {
        code: EXIT_INCONSISTENT,
        message: format!("{}: not UTF-8", path.display()),
    })?;
    let d = digest(text.as_bytes());
    Ok((text, d))
}

fn load_group(text: &str) -> Result<PcGroup, Failure> {
    Ok(PcGroup::new(PcPresentation::from_file_str(text)?)?)
}

fn write_artifact(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{}: {e}", path.display()),
    })
}

#[derive(Serialize)]
struct BuildResult {
    p: u32,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    search: Option<SearchOutcome>,
}

fn build(p: u32, n: usize, output: Option<PathBuf>, search: bool, seed: u64, budget: u64) -> Outcome {
    let (pres, outcome) = if search {
        let outcome = tail_perturbation_search(p, n, budget, seed)?;
        match outcome.found.clone() {
            Some(pres) => (pres, Some(outcome)),
            None => {
                return Err(Failure {
                    code: EXIT_REFUSAL,
                    message: format!("no nonmetabelian candidate among {} draws", outcome.candidates),
                })
            }
        }
    } else {
        (build_blackburn_presentation(p, n)?, None)
    };
    let text = pres.to_file_string();
    let Some(path) = output else {
        print!("{text}");
        return Ok(0);
    };
    write_artifact(&path, &text)?;
    let command = if search {
        format!("build --p {p} --n {n} --search --seed {seed} --budget {budget}")
    } else {
        format!("build --p {p} --n {n}")
    };
    let mut budgets = toml::Table::new();
    if search {
        budgets.insert("search_candidates".into(), toml::Value::Integer(budget as i64));
    }
    emit(&Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        input_digest: digest(command.as_bytes()),
        command,
        input: None,
        seed,
        budgets,
        result: BuildResult {
            p,
            n,
            output: Some(path.display().to_string()),
            search: outcome,
        },
    });
    Ok(0)
}

#[derive(Serialize)]
struct ConsistencySummary {
    passed: bool,
    overlaps_checked: usize,
    detail: String,
}

#[derive(Serialize)]
struct AnalyzeResult {
    order_exponent: usize,
    consistency: ConsistencySummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    maximal_class: Option<MaxClassReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<ProfileReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent_relations: Option<ExponentRelationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refusal: Option<String>,
}

fn analyze(file: &Path) -> Outcome {
    let (text, input_digest) = read_input(file)?;
    let pres = PcPresentation::from_file_str(&text)?;
    let report = consistency_check(&pres);
    let mut result = AnalyzeResult {
        order_exponent: pres.n(),
        consistency: ConsistencySummary {
            passed: report.passed,
            overlaps_checked: report.overlaps_checked,
            detail: report.describe(),
        },
        maximal_class: None,
        profile: None,
        exponent_relations: None,
        refusal: None,
    };
    let mut code = 0;
    if !report.passed {
        code = EXIT_INCONSISTENT;
    } else {
        let group = PcGroup::unchecked(pres);
        let mc = validate_maximal_class(&group);
        let is_max = mc.passed;
        result.maximal_class = Some(mc);
        if !is_max {
            code = EXIT_REFUSAL;
        } else {
            match MaxClassProfile::analyze(group) {
                Ok(profile) => {
                    result.profile = Some(profile.report());
                    if profile.n() > profile.p() as usize + 1 {
                        let rel = verify_exponent_relations(&profile)?;
                        if !rel.passed {
                            code = EXIT_VIOLATION;
                        }
                        result.exponent_relations = Some(rel);
                    }
                }
                Err(e) => {
                    let f = Failure::from(e);
                    code = f.code;
                    result.refusal = Some(f.message);
                }
            }
        }
    }
    emit(&Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: "analyze".into(),
        input: Some(file.display().to_string()),
        input_digest,
        seed: DEFAULT_SEED,
        budgets: toml::Table::new(),
        result,
    });
    Ok(code)
}

fn verify(theorem: Theorem, file: &Path, seed: u64, budgets: Budgets) -> Outcome {
    let (text, input_digest) = read_input(file)?;
    let group = load_group(&text)?;
    let profile = MaxClassProfile::analyze(group)?;
    let (name, report): (&str, VerificationReport) = match theorem {
        Theorem::Metabelian => ("metabelian", verify_thm_metabelian(&profile, seed, &budgets)?),
        Theorem::Main1 => ("main1", verify_thm_main1(&profile, seed, &budgets)?),
        Theorem::Main2 => ("main2", verify_thm_main2(&profile, seed, &budgets)?),
    };
    let passed = report.passed;
    emit(&Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: format!("verify {name}"),
        input: Some(file.display().to_string()),
        input_digest,
        seed,
        budgets: table(&budgets),
        result: report,
    });
    Ok(if passed { 0 } else { EXIT_VIOLATION })
}

fn run_selftest(seed: u64) -> Outcome {
    let report: SelftestReport = selftest::run(seed)?;
    let passed = report.passed;
    let command = "selftest".to_string();
    emit(&Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        input_digest: digest(command.as_bytes()),
        command,
        input: None,
        seed,
        budgets: toml::Table::new(),
        result: report,
    });
    Ok(if passed { 0 } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct RingExport {
    p: u32,
    n: usize,
    dim: usize,
    /// row `i`: coordinates of `theta * b_{i+1}`
    theta_matrix: Vec<Vec<u32>>,
    /// row `i`: coordinates of `p * b_{i+1}`
    p_times_basis: Vec<Vec<u32>>,
    abelian_invariants: Vec<u64>,
    cross_model: CrossModelReport,
}

#[derive(Serialize)]
struct PcExport {
    p: u32,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    group_file: Option<String>,
    sigma: SigmaReport,
}

fn export(p: u32, n: usize, model: Model, output: Option<PathBuf>, seed: u64, samples: usize) -> Outcome {
    let mut budgets = toml::Table::new();
    let (code, text) = match model {
        Model::Ring => {
            let ring = RingModule::new(p, n)?;
            let cross_model = cross_model_check(p, n, seed, samples)?;
            let passed = cross_model.passed;
            budgets.insert("samples".into(), toml::Value::Integer(samples as i64));
            let result = RingExport {
                p,
                n,
                dim: ring.dim(),
                theta_matrix: (1..=ring.dim()).map(|i| ring.theta_multiply(&ring.basis(i))).collect(),
                p_times_basis: (1..=ring.dim()).map(|i| ring.p_times_basis(i)).collect(),
                abelian_invariants: abelian_invariants(p, n)?,
                cross_model,
            };
            let command = format!("export --p {p} --n {n} --model ring");
            let text = render(&command, seed, budgets, result);
            (if passed { 0 } else { EXIT_VIOLATION }, text)
        }
        Model::Pc => {
            let group_file = build_blackburn_presentation(p, n)?.to_file_string();
            let sigma = verify_sigma(p, n)?;
            let passed = sigma.passed;
            let written = match &output {
                Some(path) => {
                    write_artifact(path, &group_file)?;
                    Some(path.display().to_string())
                }
                None => None,
            };
            let result = PcExport {
                p,
                n,
                group_file: written.is_none().then_some(group_file),
                output: written,
                sigma,
            };
            let command = format!("export --p {p} --n {n} --model pc");
            let text = render(&command, seed, budgets, result);
            (if passed { 0 } else { EXIT_VIOLATION }, text)
        }
    };
    match (model, &output) {
        (Model::Ring, Some(path)) => write_artifact(path, &text)?,
        _ => print!("{text}"),
    }
    Ok(code)
}

fn render<T: Serialize>(command: &str, seed: u64, budgets: toml::Table, result: T) -> String {
    toml::to_string(&Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        input: None,
        input_digest: digest(command.as_bytes()),
        seed,
        budgets,
        result,
    })
    .expect("report serializes")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let start = Instant::now();
    let outcome = match cli.command {
        Command::Build {
            p,
            n,
            output,
            search,
            seed,
            budget,
        } => build(p, n, output, search, seed, budget),
        Command::Analyze { file } => analyze(&file),
        Command::Verify {
            theorem,
            file,
            seed,
            budgets,
        } => verify(theorem, &file, seed, budgets.resolve()),
        Command::Selftest { seed } => run_selftest(seed),
        Command::Export {
            p,
            n,
            model,
            output,
            seed,
            samples,
        } => export(p, n, model, output, seed, samples),
    };
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
