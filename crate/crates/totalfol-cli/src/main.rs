//! Batch front end for the construction calculus.
//!
//! Subcommands: `invariants` (braid file → invariant table), `plan`
//! (framed braid → construction plan, verified before writing), `verify`
//! (plan ledger re-check or the numerical model suite), `gn` (emit the
//! Hopf-block plan) and `blocks` (print the catalog ledger).
//!
//! Exit codes are a stable contract: 0 pass, 1 verification failure,
//! 2 precondition failure, 3 parse error. Reports are machine-readable
//! JSON unless `--human` is given; all randomness is seeded and the seed
//! is printed.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use totalfol::braidlink::{self, BraidWord};
use totalfol::folblocks::{self, BlockId, ThetaStatus};
use totalfol::geomcheck;
use totalfol::planner::{self, ConstructionPlan, PlanError, PlanInput};

const EXIT_VERIFICATION: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_PARSE: u8 = 3;

#[derive(Parser)]
#[command(name = "totalfol", version, about = "framed-braid construction calculus and model verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-component invariants of a closed braid file.
    Invariants(InvariantsArgs),
    /// Build and verify a construction plan from a framed braid file.
    Plan(PlanArgs),
    /// Verify a plan ledger or run the numerical model suite.
    Verify(VerifyArgs),
    /// Emit the plan of the Hopf block with the given anchored value.
    Gn(GnArgs),
    /// Print the catalog block ledger.
    Blocks(BlocksArgs),
}

#[derive(Args)]
struct InvariantsArgs {
    /// Braid file (JSON with `strands`, `word`, optional `targets`).
    input: PathBuf,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pretty table instead of JSON.
    #[arg(long)]
    human: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PlanArgs {
    /// Braid file with `targets` (and optionally `k_plus`/`k_minus`).
    input: PathBuf,
    /// Anchored Hopf offset of the final construction.
    #[arg(long, default_value_t = 0)]
    hopf: i64,
    /// Fibration offset; all public values are invariant under it.
    #[arg(long, default_value_t = 0)]
    m_star: i64,
    /// Output plan file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    human: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    /// Plan file to re-verify.
    #[arg(long, conflicts_with = "models")]
    plan: Option<PathBuf>,
    /// Run the numerical model suite instead.
    #[arg(long)]
    models: bool,
    /// Grid samples per axis for the model suite.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Integrability residual tolerance.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// Seed for the random composition words.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Number of random composition words in the concordance sweep.
    #[arg(long, default_value_t = 20)]
    words: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    human: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct GnArgs {
    /// Anchored Hopf value of the block.
    n: i64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BlocksArgs {
    #[arg(long, default_value_t = 2)]
    strands: usize,
    #[arg(long)]
    human: bool,
}

/// Braid file schema.
#[derive(Debug, Deserialize)]
struct BraidFile {
    strands: usize,
    word: Vec<i64>,
    #[serde(default)]
    targets: BTreeMap<String, i64>,
    #[serde(default)]
    k_plus: Option<usize>,
    #[serde(default)]
    k_minus: Option<usize>,
}

#[derive(Debug, Serialize)]
struct ComponentRow {
    id: usize,
    strands: usize,
    writhe: i64,
    positive_crossings: u64,
    negative_crossings: u64,
    parity_odd: bool,
    blackboard_framing: i64,
}

#[derive(Debug, Serialize)]
struct InvariantTable {
    components: Vec<ComponentRow>,
    linking: Vec<LinkingRow>,
}

#[derive(Debug, Serialize)]
struct LinkingRow {
    a: usize,
    b: usize,
    lk: i64,
}

enum CliError {
    Parse(String),
    Precondition(String),
    Verification(String),
}

impl CliError {
    fn report(&self) -> (&'static str, &String, u8) {
        match self {
            CliError::Parse(m) => ("parse error", m, EXIT_PARSE),
            CliError::Precondition(m) => ("precondition failed", m, EXIT_PRECONDITION),
            CliError::Verification(m) => ("verification failed", m, EXIT_VERIFICATION),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Precondition(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn braid_from_file(file: &BraidFile) -> Result<BraidWord, CliError> {
    BraidWord::from_signed(file.strands, &file.word)
        .map_err(|e| CliError::Parse(e.to_string()))
}

fn cmd_invariants(args: &InvariantsArgs) -> Result<(), CliError> {
    let file: BraidFile = read_json(&args.input)?;
    let word = braid_from_file(&file)?;
    let link = braidlink::close(&word);
    let witnesses = braidlink::parity_check(&link)
        .map_err(|e| CliError::Verification(e.to_string()))?;
    let components = link
        .components
        .iter()
        .zip(&witnesses)
        .map(|(c, w)| ComponentRow {
            id: c.id,
            strands: c.strand_count(),
            writhe: c.writhe,
            positive_crossings: c.positive_crossings,
            negative_crossings: c.negative_crossings,
            parity_odd: w.odd,
            blackboard_framing: c.writhe,
        })
        .collect();
    let linking = link
        .linking
        .iter()
        .map(|(&(a, b), &lk)| LinkingRow { a, b, lk })
        .collect();
    let table = InvariantTable { components, linking };
    if args.human {
        let mut text = String::new();
        text.push_str("component  strands  writhe  parity  blackboard\n");
        for c in &table.components {
            text.push_str(&format!(
                "{:>9}  {:>7}  {:>6}  {:>6}  {:>10}\n",
                c.id,
                c.strands,
                c.writhe,
                if c.parity_odd { "odd" } else { "even" },
                c.blackboard_framing
            ));
        }
        if !table.linking.is_empty() {
            text.push_str("linking:\n");
            for l in &table.linking {
                text.push_str(&format!("  lk({}, {}) = {}\n", l.a, l.b, l.lk));
            }
        }
        emit(&args.out, text)
    } else {
        emit(&args.out, to_json(&table))
    }
}

/// Turns a braid file into a planner input, appending two trivial strands
/// as the auxiliary unknots when the file does not declare them.
fn plan_input_from_file(file: &BraidFile, hopf: i64, m_star: i64) -> Result<PlanInput, CliError> {
    let mut kirby = BTreeMap::new();
    for (key, &framing) in &file.targets {
        let id: usize = key
            .parse()
            .map_err(|_| CliError::Parse(format!("component key `{key}` is not an integer")))?;
        kirby.insert(id, framing);
    }
    let (strands, word, k_plus, k_minus) = match (file.k_plus, file.k_minus) {
        (Some(p), Some(m)) => (file.strands, file.word.clone(), p, m),
        (None, None) => {
            // helper: the two appended strands close to split unknots
            let word = braid_from_file(file)?.with_trivial_strands(2);
            (word.strands, word.to_signed(), file.strands, file.strands + 1)
        }
        _ => {
            return Err(CliError::Precondition(
                "declare both k_plus and k_minus or neither".to_string(),
            ))
        }
    };
    Ok(PlanInput { strands, word, kirby, k_plus, k_minus, m_star, hopf_offset: hopf })
}

fn plan_error(e: PlanError) -> CliError {
    match e {
        PlanError::Braid(inner) => CliError::Parse(inner.to_string()),
        other => CliError::Precondition(other.to_string()),
    }
}

fn cmd_plan(args: &PlanArgs) -> Result<(), CliError> {
    let file: BraidFile = read_json(&args.input)?;
    let input = plan_input_from_file(&file, args.hopf, args.m_star)?;
    let plan = planner::total_plan(&input).map_err(plan_error)?;
    let violations = planner::verify_certificate(&plan);
    if !violations.is_empty() {
        return Err(CliError::Verification(format!(
            "emitted plan failed its own verification: {}",
            violations[0].rule
        )));
    }
    if args.human {
        emit(
            &args.out,
            format!(
                "plan: {} steps, hopf offset {}, surgery coefficients {:?}\n",
                plan.steps.len(),
                plan.certificate.hopf_offset,
                plan.certificate.coefficients
            ),
        )
    } else {
        emit(&args.out, to_json(&plan))
    }
}

#[derive(Debug, Serialize)]
struct VerifyPlanReport {
    valid: bool,
    violations: Vec<planner::Violation>,
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    if let Some(path) = &args.plan {
        let plan: ConstructionPlan = read_json(path)?;
        let violations = planner::verify_certificate(&plan);
        let report = VerifyPlanReport { valid: violations.is_empty(), violations };
        let text = if args.human {
            if report.valid {
                "plan verifies: all ledger rules hold\n".to_string()
            } else {
                format!("plan INVALID, first violated rule: {}\n", report.violations[0].rule)
            }
        } else {
            to_json(&report)
        };
        emit(&args.out, text)?;
        if report.valid {
            Ok(())
        } else {
            Err(CliError::Verification(format!(
                "rule {} violated",
                report.violations[0].rule
            )))
        }
    } else if args.models {
        if args.grid < 8 {
            return Err(CliError::Precondition("grid size must be at least 8".to_string()));
        }
        if args.tol <= 0.0 {
            return Err(CliError::Precondition("tolerance must be positive".to_string()));
        }
        eprintln!("seed: {}", args.seed);
        let report = geomcheck::standard_suite(args.grid, args.tol, args.seed, args.words);
        let text = if args.human {
            let mut t = String::new();
            for c in &report.checks {
                t.push_str(&format!(
                    "{}  {}  measured {:.3e} (tol {:.1e})  [{}]\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.tolerance,
                    c.grid
                ));
            }
            t
        } else {
            to_json(&report)
        };
        emit(&args.out, text)?;
        match report.checks.iter().find(|c| !c.pass) {
            None => Ok(()),
            Some(first) => Err(CliError::Verification(format!("check {} failed", first.name))),
        }
    } else {
        Err(CliError::Precondition("pass --plan FILE or --models".to_string()))
    }
}

fn cmd_gn(args: &GnArgs) -> Result<(), CliError> {
    let plan = planner::build_gn(args.n);
    let violations = planner::verify_certificate(&plan);
    if !violations.is_empty() {
        return Err(CliError::Verification(violations[0].rule.clone()));
    }
    emit(&args.out, to_json(&plan))
}

#[derive(Debug, Serialize)]
struct BlockRow {
    name: String,
    twist: [i64; 4],
    theta: [f64; 2],
    status: ThetaStatus,
}

fn cmd_blocks(args: &BlocksArgs) -> Result<(), CliError> {
    let n = args.strands;
    let ids = [
        BlockId::F1,
        BlockId::F2,
        BlockId::F1Inv,
        BlockId::F2Inv,
        BlockId::Rotation(1),
        BlockId::BraidGen(folblocks::TorusGen::Sigma(0)),
        BlockId::BraidGen(folblocks::TorusGen::Rho(0)),
        BlockId::BraidGen(folblocks::TorusGen::Tau(0)),
    ];
    let mut rows = Vec::new();
    for id in ids {
        let block = folblocks::catalog(&id, n).map_err(|e| CliError::Precondition(e.to_string()))?;
        rows.push(BlockRow {
            name: folblocks::block_name(&id),
            twist: [block.twist.a, block.twist.b, block.twist.c, block.twist.d],
            theta: block.theta,
            status: block.theta_status,
        });
    }
    if args.human {
        let mut text = String::new();
        text.push_str("block      twist             theta1   theta2   status\n");
        for r in &rows {
            text.push_str(&format!(
                "{:<10} {:<17} {:>7.4}  {:>7.4}  {:?}\n",
                r.name,
                format!("{:?}", r.twist),
                r.theta[0],
                r.theta[1],
                r.status
            ));
        }
        print!("{text}");
    } else {
        print!("{}", to_json(&rows));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Invariants(args) => cmd_invariants(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Gn(args) => cmd_gn(args),
        Command::Blocks(args) => cmd_blocks(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, message, code) = e.report();
            eprintln!("{kind}: {message}");
            ExitCode::from(code)
        }
    }
}
