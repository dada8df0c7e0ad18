//! Command-line front end for the free holomorphic function calculus.
//!
//! Measurement subcommands (`norm`, `eval`, `jsr`, `hinf`, `hp`, `rho`)
//! print CSV rows `quantity,value,lower,upper,flags`, where `lower`/`upper`
//! are certified bounds when available and empty otherwise. Check
//! subcommands (`cauchy`, `poisson`, `herglotz`, `verify`) print verdict
//! rows `suite,instance,quantity,lhs,rhs,slack,pass` and exit nonzero iff
//! any row fails. `diff` emits a series file.
//!
//! Series files are JSON `{ "n", "q", "max_degree", "coeffs": [ { "word",
//! "re", "im" } ], "tail" }`; tuple files are `{ "n", "d", "mats": [ {
//! "re", "im" } ] }`. See the library docs for the precise shapes.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use freehol::calculus::{self, OperatorTuple};
use freehol::derivations;
use freehol::fock::{self, TruncatedFock};
use freehol::harness::{self, SuiteConfig, VerdictRow};
use freehol::series::FreeSeries;
use freehol::transforms;
use freehol::CMatrix;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "freehol",
    version,
    about = "Free holomorphic functions on the noncommutative operator unit ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary norm ‖F(r·S)‖ on a truncated Fock space, with certified bounds
    Norm(NormArgs),
    /// Evaluate a series at a matrix tuple
    Eval(EvalArgs),
    /// Joint spectral radius iterates of a tuple
    Jsr(JsrArgs),
    /// Radial sup-norm brackets over a grid of radii
    Hinf(HinfArgs),
    /// Radial p-mean bracket (Riemann sums from both sides)
    Hp(HpArgs),
    /// Ball metric between two series
    Rho(RhoArgs),
    /// Free partial derivative of a series (emits a series file)
    Diff(DiffArgs),
    /// Cauchy kernel bound and transform-vs-evaluation check at a tuple
    Cauchy(CauchyArgs),
    /// Poisson kernel Gram identity and polynomial reproduction check
    Poisson(PoissonArgs),
    /// Minimum eigenvalue of Re F(rS) across a radius grid
    Herglotz(HerglotzArgs),
    /// Run verification suites from a JSON config
    Verify(VerifyArgs),
}

#[derive(Args)]
struct NormArgs {
    /// Series file (JSON)
    #[arg(long)]
    series: PathBuf,
    /// Dilation radius
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Fock truncation level (default: the stored degree)
    #[arg(long)]
    fock_level: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    series: PathBuf,
    /// Tuple file (JSON)
    #[arg(long)]
    tuple: PathBuf,
}

#[derive(Args)]
struct JsrArgs {
    #[arg(long)]
    tuple: PathBuf,
    /// Number of iterates g_1 … g_K
    #[arg(long, default_value_t = 8)]
    depth: usize,
}

#[derive(Args)]
struct HinfArgs {
    #[arg(long)]
    series: PathBuf,
    /// Radii to sample, comma-separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.9, 0.99])]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    fock_level: usize,
}

#[derive(Args)]
struct HpArgs {
    #[arg(long)]
    series: PathBuf,
    /// Mean exponent p > 0
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Riemann cells
    #[arg(long, default_value_t = 1000)]
    cells: usize,
    #[arg(long, default_value_t = 6)]
    fock_level: usize,
}

#[derive(Args)]
struct RhoArgs {
    /// First series file
    #[arg(long)]
    a: PathBuf,
    /// Second series file
    #[arg(long)]
    b: PathBuf,
    /// Metric series terms to sum
    #[arg(long, default_value_t = 20)]
    terms: usize,
    #[arg(long, default_value_t = 6)]
    fock_level: usize,
}

#[derive(Args)]
struct DiffArgs {
    #[arg(long)]
    series: PathBuf,
    /// Derivation indices, comma-separated, applied right to left
    #[arg(long, value_delimiter = ',', required = true)]
    wrt: Vec<usize>,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CauchyArgs {
    #[arg(long)]
    tuple: PathBuf,
    #[arg(long)]
    series: PathBuf,
    /// Fock truncation level (default: stored degree + 1)
    #[arg(long)]
    fock_level: Option<usize>,
}

#[derive(Args)]
struct PoissonArgs {
    #[arg(long)]
    tuple: PathBuf,
    #[arg(long)]
    series: PathBuf,
    /// Fock truncation level (default: stored degree + 1)
    #[arg(long)]
    fock_level: Option<usize>,
}

#[derive(Args)]
struct HerglotzArgs {
    #[arg(long)]
    series: PathBuf,
    /// Radii to sample, comma-separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75, 0.9])]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 6)]
    fock_level: usize,
    /// Positivity tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite configuration (JSON mirroring the library's SuiteConfig)
    #[arg(long)]
    config: PathBuf,
    /// Run only these suites (overrides the config's list; repeatable)
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Write the CSV report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp comment (for byte-comparable reports)
    #[arg(long)]
    no_timestamp: bool,
    /// Lift the built-in size caps on n, d, D, N
    #[arg(long)]
    unsafe_sizes: bool,
}

/// One `quantity,value,lower,upper,flags` output row.
struct MeasureRow {
    quantity: String,
    value: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    flags: String,
}

impl MeasureRow {
    fn new(quantity: impl Into<String>, value: f64) -> Self {
        MeasureRow {
            quantity: quantity.into(),
            value,
            lower: None,
            upper: None,
            flags: String::new(),
        }
    }

    fn bounds(mut self, lower: Option<f64>, upper: Option<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    fn flags(mut self, flags: impl Into<String>) -> Self {
        self.flags = flags.into();
        self
    }
}

fn print_measures(rows: &[MeasureRow]) {
    let fmt = |x: &Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    println!("quantity,value,lower,upper,flags");
    for r in rows {
        println!(
            "{},{:e},{},{},{}",
            r.quantity,
            r.value,
            fmt(&r.lower),
            fmt(&r.upper),
            r.flags
        );
    }
}

fn verdict(suite: &str, instance: usize, quantity: &str, lhs: f64, rhs: f64, slack: f64, tol: f64) -> VerdictRow {
    VerdictRow {
        suite: suite.to_string(),
        instance,
        quantity: quantity.to_string(),
        lhs,
        rhs,
        slack,
        pass: slack >= -tol,
    }
}

/// Spectral norm of a small matrix (the CLI only ever needs d ≤ caps).
fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Certified upper bound for ‖F(rS)‖ from the coefficient data:
/// `Σ_k b_k rᵏ` plus the closed tail sum, infinite when the tail cannot be
/// summed at this radius.
fn coefficient_upper(f: &FreeSeries, r: f64) -> f64 {
    let mut total: f64 = f
        .block_norms()
        .iter()
        .enumerate()
        .map(|(k, b)| b * r.powi(k as i32))
        .sum();
    if let Some(tail) = f.tail() {
        if !tail.is_vacuous() {
            let x = tail.t * r;
            if x < 1.0 {
                total += tail.c * x.powi(f.max_degree() as i32 + 1) / (1.0 - x);
            } else {
                total = f64::INFINITY;
            }
        }
    }
    total
}

fn cmd_norm(args: &NormArgs) -> Result<Vec<MeasureRow>> {
    let f = FreeSeries::read_from(&args.series).context("reading series")?;
    let level = args.fock_level.unwrap_or(f.max_degree());
    let space = TruncatedFock::new(f.n(), level)?;
    let value = fock::assemble(&f, args.r, &space)?.norm();
    let upper = coefficient_upper(&f, args.r);
    let (upper, flags) = if upper.is_finite() {
        (Some(upper), "lower-certified,upper-certified")
    } else {
        (None, "lower-certified,upper-open")
    };
    Ok(vec![MeasureRow::new("boundary_norm", value)
        .bounds(Some(value), upper)
        .flags(flags)])
}

fn cmd_eval(args: &EvalArgs) -> Result<Vec<MeasureRow>> {
    let f = FreeSeries::read_from(&args.series).context("reading series")?;
    let t = OperatorTuple::read_from(&args.tuple).context("reading tuple")?;
    let ev = calculus::evaluate(&f, &t)?;
    let mut rows = Vec::new();
    let (upper, flags) = match ev.tail_bound {
        Some(b) => (Some(ev.norm + b), "tail-certified"),
        None => (None, "tail-open"),
    };
    let flags = if ev.in_ball() {
        flags.to_string()
    } else {
        format!("{flags},outside-ball")
    };
    rows.push(
        MeasureRow::new("evaluation_norm", ev.norm)
            .bounds(Some(ev.norm), upper)
            .flags(flags),
    );
    rows.push(MeasureRow::new("tuple_row_norm", ev.row_norm));
    Ok(rows)
}

fn cmd_jsr(args: &JsrArgs) -> Result<Vec<MeasureRow>> {
    let t = OperatorTuple::read_from(&args.tuple).context("reading tuple")?;
    let est = calculus::joint_spectral_data(&t, args.depth.max(1));
    let mut rows = Vec::new();
    for (idx, &g) in est.sequence.iter().enumerate() {
        rows.push(MeasureRow::new(format!("jsr_iterate_k{}", idx + 1), g).bounds(None, Some(g)));
    }
    let flags = match est.nilpotent_order {
        Some(k) => format!("nilpotent-order-{k}"),
        None => String::new(),
    };
    rows.push(
        MeasureRow::new("jsr_upper", est.upper)
            .bounds(None, Some(est.upper))
            .flags(flags),
    );
    Ok(rows)
}

fn cmd_hinf(args: &HinfArgs) -> Result<Vec<MeasureRow>> {
    let f = FreeSeries::read_from(&args.series).context("reading series")?;
    let est = calculus::hinf_norm(&f, &args.grid, args.fock_level)?;
    let mut rows = Vec::new();
    for &(r, v) in &est.per_r {
        rows.push(MeasureRow::new(format!("radial_norm_r{r}"), v).bounds(Some(v), None));
    }
    let flags = if est.upper.is_some() {
        "bounds-certified"
    } else {
        "upper-open"
    };
    rows.push(
        MeasureRow::new("hinf_norm", est.lower)
            .bounds(Some(est.lower), est.upper)
            .flags(flags),
    );
    Ok(rows)
}

fn cmd_hp(args: &HpArgs) -> Result<Vec<MeasureRow>> {
    let f = FreeSeries::read_from(&args.series).context("reading series")?;
    let bracket = calculus::hardy_mean(&f, args.p, args.cells.max(1), args.fock_level)?;
    Ok(vec![
        MeasureRow::new(format!("hardy_mean_p{}", args.p), bracket.midpoint())
            .bounds(Some(bracket.lower), Some(bracket.upper))
            .flags("bracket"),
        MeasureRow::new("hardy_bracket_width", bracket.width()),
    ])
}

fn cmd_rho(args: &RhoArgs) -> Result<Vec<MeasureRow>> {
    let fa = FreeSeries::read_from(&args.a).context("reading first series")?;
    let fb = FreeSeries::read_from(&args.b).context("reading second series")?;
    let m = calculus::metric_rho(&fa, &fb, args.terms.max(1), args.fock_level)?;
    // Upper bound: replace each truncated distance by its coefficient-sum
    // bound (monotone through x ↦ x/(1+x)) and close the term tail.
    let one = freehol::C64::new(1.0, 0.0);
    let diff = fa.add(&fb, one, -one)?;
    let mut upper = m.tail_bound;
    for mm in 1..=args.terms.max(1) {
        let r = 1.0 - 0.5f64.powi(mm as i32);
        let s = coefficient_upper(&diff, r);
        if !s.is_finite() {
            upper = f64::INFINITY;
            break;
        }
        upper += 0.5f64.powi(mm as i32) * s / (1.0 + s);
    }
    let (upper, flags) = if upper.is_finite() {
        (Some(upper), "bounds-certified")
    } else {
        (None, "upper-open")
    };
    Ok(vec![MeasureRow::new("metric_rho", m.value)
        .bounds(Some(m.value), upper)
        .flags(flags)])
}

fn cmd_diff(args: &DiffArgs) -> Result<()> {
    let f = FreeSeries::read_from(&args.series).context("reading series")?;
    let derived = derivations::partial_multi(&f, &args.wrt)?;
    match &args.out {
        Some(path) => derived.write_to(path).context("writing derived series")?,
        None => print!("{}", derived.to_json()),
    }
    Ok(())
}

fn cmd_cauchy(args: &CauchyArgs) -> Result<Vec<VerdictRow>> {
    let f = FreeSeries::read_from(&args.series).context("reading series")?;
    let t = OperatorTuple::read_from(&args.tuple).context("reading tuple")?;
    let level = args.fock_level.unwrap_or(f.max_degree() + 1);
    let space = TruncatedFock::new(f.n(), level)?;
    let kernel = transforms::cauchy_kernel(&t, &space)?;
    let bound = 1.0 / (1.0 - t.row_norm());
    let mut rows = vec![verdict(
        "cauchy",
        0,
        "kernel_norm_row_bound",
        kernel.norm(),
        bound,
        bound - kernel.norm(),
        1e-10,
    )];
    let realized = fock::assemble(&f, 1.0, &space)?;
    let through = transforms::cauchy_transform(&t, &realized)?;
    let direct = calculus::evaluate(&f, &t)?.value;
    let gap = spectral_norm(&(through - direct));
    rows.push(verdict(
        "cauchy",
        0,
        "evaluation_matches_cauchy_transform",
        gap,
        0.0,
        -gap,
        1e-9,
    ));
    Ok(rows)
}

fn cmd_poisson(args: &PoissonArgs) -> Result<Vec<VerdictRow>> {
    let f = FreeSeries::read_from(&args.series).context("reading series")?;
    let t = OperatorTuple::read_from(&args.tuple).context("reading tuple")?;
    let level = args.fock_level.unwrap_or(f.max_degree() + 1);
    let space = TruncatedFock::new(f.n(), level)?;
    let kernel = transforms::poisson_kernel(&t, &space)?;

    let mut phi_pow = CMatrix::identity(t.d(), t.d());
    for _ in 0..=level {
        phi_pow = t.phi_apply(&phi_pow);
    }
    let expected = CMatrix::identity(t.d(), t.d()) - phi_pow;
    let gram_gap = max_abs(&(kernel.gram() - expected));
    let mut rows = vec![verdict(
        "poisson",
        0,
        "gram_telescoping",
        gram_gap,
        0.0,
        -gram_gap,
        1e-10,
    )];

    let realized = fock::assemble(&f, 1.0, &space)?;
    let through = kernel.apply(&realized)?;
    let direct = calculus::evaluate(&f, &t)?.value;
    let defect = spectral_norm(&(through - &direct));
    let exponent = 2 * (level.saturating_sub(f.max_degree()) + 1) as i32;
    let bound = t.row_norm().powi(exponent) * (1.0 + spectral_norm(&direct));
    rows.push(verdict(
        "poisson",
        0,
        "polynomial_reproduction_defect",
        defect,
        bound,
        bound - defect,
        1e-9,
    ));
    Ok(rows)
}

fn cmd_herglotz(args: &HerglotzArgs) -> Result<Vec<VerdictRow>> {
    let f = FreeSeries::read_from(&args.series).context("reading series")?;
    let space = TruncatedFock::new(f.n(), args.fock_level)?;
    let minima = transforms::herglotz_minima(&f, &args.grid, &space)?;
    Ok(minima
        .iter()
        .enumerate()
        .map(|(i, &(r, min_eig))| {
            verdict(
                "herglotz",
                i,
                &format!("positive_real_part_r{r}"),
                min_eig,
                0.0,
                min_eig,
                args.tol,
            )
        })
        .collect())
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let mut cfg = SuiteConfig::read_from(&args.config).context("reading config")?;
    if !args.suites.is_empty() {
        cfg.suites = args.suites.clone();
    }
    if args.unsafe_sizes {
        cfg.unsafe_sizes = true;
    }
    let rows = harness::run_suite(&cfg)?;
    let stamp = if args.no_timestamp {
        None
    } else {
        Some(format!(
            "unix {}",
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        ))
    };
    let csv = harness::to_csv(&rows, stamp.as_deref());
    match &args.out {
        Some(path) => std::fs::write(path, &csv).context("writing report")?,
        None => print!("{csv}"),
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!(
        "{} rows, {} failed{}",
        rows.len(),
        failed,
        args.out
            .as_deref()
            .map(|p| format!(" → {}", p.display()))
            .unwrap_or_default()
    );
    Ok(failed == 0)
}

/// Print verdict rows and report whether they all passed.
fn emit_verdicts(rows: &[VerdictRow]) -> bool {
    print!("{}", harness::to_csv(rows, None));
    harness::all_pass(rows)
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Norm(a) => {
            print_measures(&cmd_norm(a)?);
            Ok(true)
        }
        Command::Eval(a) => {
            print_measures(&cmd_eval(a)?);
            Ok(true)
        }
        Command::Jsr(a) => {
            print_measures(&cmd_jsr(a)?);
            Ok(true)
        }
        Command::Hinf(a) => {
            print_measures(&cmd_hinf(a)?);
            Ok(true)
        }
        Command::Hp(a) => {
            print_measures(&cmd_hp(a)?);
            Ok(true)
        }
        Command::Rho(a) => {
            print_measures(&cmd_rho(a)?);
            Ok(true)
        }
        Command::Diff(a) => {
            cmd_diff(a)?;
            Ok(true)
        }
        Command::Cauchy(a) => Ok(emit_verdicts(&cmd_cauchy(a)?)),
        Command::Poisson(a) => Ok(emit_verdicts(&cmd_poisson(a)?)),
        Command::Herglotz(a) => Ok(emit_verdicts(&cmd_herglotz(a)?)),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
