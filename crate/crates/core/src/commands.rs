//! The `qace` command line: `bounds`, `scan`, `region`, `verify`, `construct`.
//!
//! Exit codes: 0 ok, 2 input error, 3 constraint violation, 4 verification
//! failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bounds::{bound_report, BoundReport};
use crate::constructions::{
    guaranteed_violation, optimal_two_qubit, theta0_closed_form, v_alpha, v_phi, AlphaPoint,
    ConstructionError, PhiPoint, PlanarSetting, SchmidtState,
};
use crate::numfmt::sig12;
use crate::optimize::{brent_max, grid_refine};
use crate::polytopes::{cace_tight_interval, nace_tight, TightAce};
use crate::quantum::{behavior, do_table, qace, QuantumInstrumentModel};
use crate::region::{region_grid, summarize, RegionCell};
use crate::scenario::{ace, BehaviorFile};
use crate::tolerances::TOL;
use crate::verify::{self, Reference};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Constraint(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Constraint(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qace",
    version,
    about = "ACE bounds in the instrumental scenario under classical, quantum and non-signaling common causes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every lower bound on a behavior file.
    Bounds(BoundsArgs),
    /// Violation curves over the state angle or Bob's measurement angle.
    Scan(ScanArgs),
    /// Sign of each bound on the slice p(1,0|x) = 0, p(0,1|x) = 1/2 - p(0,0|x).
    Region(RegionArgs),
    /// Run the numbered acceptance checks.
    Verify(VerifyArgs),
    /// Emit a quantum model with its behavior and interventional table.
    Construct(ConstructArgs),
}

#[derive(Debug, Args)]
#[command(
    after_help = "Input: {\"pabx\": [a][b][x], \"do\": [b][a] (optional)}.\n\
Output keys: classical_six, classical_max, quantum, nonsignaling, the *_clamped variants, instrumental_slack, \
ace (when \"do\" is given) and oracle (with --oracle)."
)]
pub struct BoundsArgs {
    /// Behavior JSON file.
    #[arg(long)]
    pub behavior: PathBuf,
    /// Add the tight classical and non-signaling values from linear programming.
    #[arg(long)]
    pub oracle: bool,
    /// Exit with code 3 when an instrumental inequality is violated.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Curve {
    /// State angle α ∈ [0, π/4]; columns alpha,violation,phi0,theta0.
    Alpha,
    /// Bob angle φ ∈ [0, π/2]; columns phi,violation,alpha,theta0,theta1.
    Phi,
}

#[derive(Debug, Args)]
#[command(
    after_help = "The maximizing parameter is refined and inserted as an extra row, keeping the parameter column sorted."
)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub curve: Curve,
    /// Number of equally spaced grid points, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
#[command(
    after_help = "Columns: p00_0,p00_1,classical,quantum,nonsignaling,classical_pos,quantum_pos,ns_nonneg.\n\
A JSON summary goes to stderr."
)]
pub struct RegionArgs {
    /// Points per axis over [0, 1/2].
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Criterion id or tag (quantum, optimal, scan, noise, schmidt, witness,
    /// soundness, classical, lp, ns, region, bell); repeatable.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Print a JSON report instead of one line per criterion.
    #[arg(long)]
    pub json: bool,
    /// JSON file overriding reference constants.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Two-qubit model with the largest violation.
    Optimal,
    /// Maximally entangled qubits at their best restricted angles.
    Maxent,
    /// Fixed-angle model on a Schmidt state given by --coeffs.
    Schmidt,
}

#[derive(Debug, Args)]
#[command(after_help = "Output: {\"model\", \"pabx\", \"do\", \"metadata\"}.")]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Descending positive Schmidt coefficients with unit square norm.
    #[arg(long, value_delimiter = ',')]
    pub coeffs: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `std::env::args`, runs, reports errors on stderr and returns the
/// exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::Scan(a) => {
            let text = with_jobs(a.jobs, || scan_csv(&a))?;
            emit(a.out.as_deref(), &text, out)
        }
        Command::Region(a) => {
            let text = with_jobs(a.jobs, || region_csv(&a))?;
            emit(a.out.as_deref(), &text, out)
        }
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Construct(a) => cmd_construct(&a, out),
    }
}

fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    match jobs {
        Some(0) => Err(CliError::Input("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Input(e.to_string()))?
            .install(f),
        None => f(),
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(e.to_string())),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Oracle {
    classical: TightAce,
    nonsignaling: TightAce,
}

#[derive(Serialize)]
struct BoundsOutput {
    #[serde(flatten)]
    report: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    ace: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Oracle>,
}

fn cmd_bounds(args: &BoundsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let invalid =
        |e: crate::scenario::ScenarioError| CliError::Input(format!("invalid behavior: {e}"));
    let file = BehaviorFile::from_json(&read(&args.behavior)?).map_err(invalid)?;
    let beh = file.behavior().map_err(invalid)?;
    let table = file.do_table().map_err(invalid)?;
    let oracle = if args.oracle {
        let lp = |e: crate::polytopes::PolytopeError| CliError::Input(e.to_string());
        Some(Oracle {
            classical: cace_tight_interval(&beh).map_err(lp)?,
            nonsignaling: nace_tight(&beh).map_err(lp)?,
        })
    } else {
        None
    };
    let report = bound_report(&beh);
    let slack = report.instrumental_slack;
    let output = BoundsOutput {
        report,
        ace: table.as_ref().map(ace),
        oracle,
    };
    let text = serde_json::to_string_pretty(&output).expect("report serializes") + "\n";
    emit(None, &text, out)?;
    if args.strict && slack > TOL.lp_feasibility {
        return Err(CliError::Constraint(format!(
            "instrumental inequality violated by {slack:.3e}"
        )));
    }
    Ok(())
}

fn alpha_row(p: &AlphaPoint) -> String {
    format!(
        "{},{},{},{}",
        sig12(p.alpha),
        sig12(p.violation),
        sig12(p.phi0),
        sig12(p.theta0)
    )
}

fn phi_row(p: &PhiPoint) -> String {
    format!(
        "{},{},{},{},{}",
        sig12(p.phi),
        sig12(p.violation),
        sig12(p.alpha),
        sig12(p.theta0),
        sig12(p.theta1)
    )
}

/// Grid rows plus the refined maximizer, sorted by parameter.
fn scan_rows<P: Send>(
    steps: usize,
    hi: f64,
    eval: impl Fn(f64) -> Result<P, ConstructionError> + Sync,
    refine: impl FnOnce() -> Result<f64, ConstructionError>,
    param: impl Fn(&P) -> f64,
) -> Result<Vec<P>, CliError> {
    let grid: Vec<f64> = (0..steps)
        .map(|k| hi * k as f64 / (steps - 1) as f64)
        .collect();
    let mut rows = grid
        .par_iter()
        .map(|&t| eval(t))
        .collect::<Result<Vec<_>, _>>()?;
    let best = refine()?;
    if !grid.contains(&best) {
        let at = grid.partition_point(|&t| t < best);
        rows.insert(at, eval(best)?);
    }
    debug_assert!(rows.windows(2).all(|w| param(&w[0]) < param(&w[1])));
    Ok(rows)
}

fn scan_csv(args: &ScanArgs) -> Result<String, CliError> {
    if args.steps < 2 {
        return Err(CliError::Input("--steps must be at least 2".into()));
    }
    let text = match args.curve {
        Curve::Alpha => {
            let refine = || {
                let r = brent_max(
                    |a| v_alpha(a).map_or(f64::NEG_INFINITY, |p| p.violation),
                    0.0,
                    FRAC_PI_4,
                    1e-12,
                )?;
                Ok(r.argmax[0])
            };
            let rows = scan_rows(args.steps, FRAC_PI_4, v_alpha, refine, |p| p.alpha)?;
            let mut s = String::from("alpha,violation,phi0,theta0\n");
            rows.iter().for_each(|p| s.push_str(&(alpha_row(p) + "\n")));
            s
        }
        Curve::Phi => {
            let refine = || {
                let f = |v: &[f64]| v_phi(v[0]).map_or(f64::NEG_INFINITY, |p| p.violation);
                Ok(grid_refine(f, &[(0.0, FRAC_PI_2)], 200, 4)?.argmax[0])
            };
            let rows = scan_rows(args.steps, FRAC_PI_2, v_phi, refine, |p| p.phi)?;
            let mut s = String::from("phi,violation,alpha,theta0,theta1\n");
            rows.iter().for_each(|p| s.push_str(&(phi_row(p) + "\n")));
            s
        }
    };
    Ok(text)
}

/// CSV text; the summary goes to stderr.
fn region_csv(args: &RegionArgs) -> Result<String, CliError> {
    if args.grid < 2 {
        return Err(CliError::Input("--grid must be at least 2".into()));
    }
    let cells = region_grid(args.grid);
    let mut text = String::from(RegionCell::csv_header());
    text.push('\n');
    for c in &cells {
        text.push_str(&c.csv_row());
        text.push('\n');
    }
    let summary = summarize(&cells, args.grid);
    eprintln!(
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    );
    Ok(text)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let reference = match &args.reference {
        Some(p) => serde_json::from_str(&read(p)?)
            .map_err(|e| CliError::Input(format!("invalid reference file: {e}")))?,
        None => Reference::default(),
    };
    let selected = verify::select(&args.only);
    if selected.is_empty() {
        return Err(CliError::Input(format!(
            "no criterion matches {:?}",
            args.only
        )));
    }
    let mut results = Vec::with_capacity(selected.len());
    for c in selected {
        let r = verify::run_criterion(c.id, &reference);
        if !args.json {
            writeln!(out, "{}", r.line()).map_err(|e| CliError::Input(e.to_string()))?;
        }
        results.push(r);
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} ({})", r.id, r.name))
        .collect();
    if args.json {
        let report = json!({ "passed": failed.is_empty(), "results": results });
        emit(
            None,
            &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
            out,
        )?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "failed criteria: {}",
            failed.join(", ")
        )))
    }
}

fn model_document(model: &QuantumInstrumentModel, metadata: Value) -> Result<Value, CliError> {
    let beh = behavior(model).map_err(|e| CliError::Input(e.to_string()))?;
    let q = do_table(model).map_err(|e| CliError::Input(e.to_string()))?;
    let file = BehaviorFile::new(&beh, Some(&q));
    Ok(json!({
        "model": model,
        "pabx": file.pabx,
        "do": file.do_table,
        "metadata": metadata,
    }))
}

fn cmd_construct(args: &ConstructArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.which != Which::Schmidt && !args.coeffs.is_empty() {
        return Err(CliError::Input(
            "--coeffs only applies to --which schmidt".into(),
        ));
    }
    let doc = match args.which {
        Which::Optimal => {
            let o = optimal_two_qubit()?;
            model_document(&o.model, serde_json::to_value(&o).expect("serializes"))?
        }
        Which::Maxent => {
            let top = v_alpha(FRAC_PI_4)?;
            let setting = PlanarSetting::pure(
                FRAC_PI_4,
                [theta0_closed_form(FRAC_PI_4, top.phi0), -FRAC_PI_2],
                [top.phi0, -top.phi0],
            );
            let model = setting.model();
            let q = qace(&model).map_err(|e| CliError::Input(e.to_string()))?;
            let meta = json!({ "setting": setting, "violation": top.violation, "qace": q });
            model_document(&model, meta)?
        }
        Which::Schmidt => {
            if args.coeffs.is_empty() {
                return Err(CliError::Input("--which schmidt needs --coeffs".into()));
            }
            let g = guaranteed_violation(&SchmidtState::new(args.coeffs.clone())?)?;
            let meta = json!({
                "coeffs": args.coeffs,
                "lambda": g.params.lambda,
                "gamma": g.params.gamma,
                "violation": g.violation,
                "formula": g.formula,
                "thetas": g.thetas,
                "phis": g.phis,
            });
            model_document(&g.model, meta)?
        }
    };
    emit(
        args.out.as_deref(),
        &(serde_json::to_string_pretty(&doc).expect("serializes") + "\n"),
        out,
    )
}
