//! The `cohent` command line: bound and protocol curves, calibration reports,
//! oracle verification and the filter audit.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bound::{optimal_bound_curve, optimal_concurrence, ChannelSpec, BOUND_CURVE_ID, DEFAULT_L0_KM};
use crate::entanglement::{monotone_value, Monotone, PhaseFlipChannel};
use crate::error::Error;
use crate::oracle::{check_point, commutation_discrepancy, standard_grid, DEFAULT_ORACLE_TOL};
use crate::proposition::{montecarlo_filter_audit, phase_flipped_state, CurvePoint, FilterScenario};
use crate::protocol::{
    average_monotone, branch_amplitudes, calibrate_optimal, near_optimal_curve, optimize_near_optimal, qnd_concurrence,
    success_probability, top_outcomes, ProtocolParams, DEFAULT_TAIL_TOL, NEAR_OPTIMAL_CURVE_ID,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "curve,p_s,e_bar,ps_times_ebar,T,theta,monotone,alpha,beta";
/// Slack allowed above the bound before an audit counts as a violation.
pub const AUDIT_SLACK: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "cohent", version, about = "Entanglement from coherent pulses over a lossy channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Optimal bound curve (i).
    Bound(CurveArgs),
    /// Calibrate the QND protocol at each target success probability.
    ProtocolOptimal(ProtocolArgs),
    /// Optimise the photon-counting protocol at each target.
    ProtocolNearOptimal(ProtocolArgs),
    /// Curves (i) and (ii) on a shared grid, as CSV for plotting.
    Sweep(SweepArgs),
    /// Compare the photon-number simulation with the closed forms.
    OracleVerify(OracleArgs),
    /// Monte Carlo search for filters beating the Bob-only bound.
    Audit(AuditArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    /// Channel transmittance.
    #[arg(long = "T", value_name = "T")]
    pub transmittance: Option<f64>,
    /// Fibre length; T = exp(-l / l0).
    #[arg(long)]
    pub loss_km: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_L0_KM)]
    pub l0_km: f64,
}

impl ChannelArgs {
    fn channel(&self) -> Result<ChannelSpec, CliError> {
        match (self.transmittance, self.loss_km) {
            (Some(t), None) => Ok(ChannelSpec::new(t)?),
            (None, Some(l)) => Ok(ChannelSpec::from_length(l, self.l0_km)?),
            _ => Err(CliError::Usage("give exactly one of --T and --loss-km".into())),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Interaction angle in radians.
    #[arg(long, default_value_t = 0.01)]
    pub theta: f64,
    /// Success probabilities: a point count N (uniform i/(N+1)) or a
    /// comma-separated list.
    #[arg(long, visible_alias = "p-s", default_value = "50")]
    pub grid: String,
    #[arg(long, default_value = "concurrence")]
    pub monotone: String,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn monotone(&self) -> Result<Monotone, CliError> {
        self.monotone.parse().map_err(|e: Error| CliError::Usage(e.to_string()))
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct ProtocolArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Tail mass at which outcome-by-outcome sums stop.
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Curves to include: any of i, ii.
    #[arg(long, default_value = "i,ii")]
    pub curves: String,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    #[arg(long, default_value_t = DEFAULT_ORACLE_TOL)]
    pub oracle_tol: f64,
    /// Fixed photon-number truncation; chosen per point when absent.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct AuditArgs {
    /// Larger Schmidt coefficient of the input pure state.
    #[arg(long, default_value_t = 0.8)]
    pub lambda0: f64,
    /// Phase-flip weight on Alice's qubit.
    #[arg(long, default_value_t = 0.75)]
    pub f: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Compute(Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::DegenerateTarget(_) | Error::EmptyInput(_) => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Parses `--grid`: a bare integer `N` means `i / (N + 1)` for `i = 1..=N`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    let grid: Vec<f64> = match spec.parse::<usize>() {
        Ok(0) => return Err(CliError::Usage("grid needs at least one point".into())),
        Ok(n) => (1..=n).map(|i| i as f64 / (n + 1) as f64).collect(),
        Err(_) => spec
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("grid value {s:?}: {e}"))))
            .collect::<Result<_, _>>()?,
    };
    if let Some(bad) = grid.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return Err(CliError::Usage(format!("grid value {bad} outside (0, 1)")));
    }
    let mut sorted = grid;
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    Ok(sorted)
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn label_float(pt: &CurvePoint, key: &str) -> String {
    pt.label(key).and_then(|s| s.parse::<f64>().ok()).map(float).unwrap_or_default()
}

/// CSV rows for curve points, `e_bar = value / p_s`.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for pt in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            pt.label("curve").unwrap_or(""),
            float(pt.p_s),
            float(pt.value / pt.p_s),
            float(pt.value),
            label_float(pt, "T"),
            label_float(pt, "theta"),
            pt.label("monotone").unwrap_or(""),
            label_float(pt, "alpha"),
            label_float(pt, "beta"),
        );
    }
    out
}

fn curve_json(points: &[CurvePoint]) -> Value {
    let rows: Vec<Value> = points
        .iter()
        .map(|pt| {
            let num = |key: &str| pt.label(key).and_then(|s| s.parse::<f64>().ok());
            json!({
                "curve": pt.label("curve"),
                "p_s": pt.p_s,
                "e_bar": pt.value / pt.p_s,
                "ps_times_ebar": pt.value,
                "T": num("T"),
                "theta": num("theta"),
                "monotone": pt.label("monotone"),
                "alpha": num("alpha"),
                "beta": num("beta"),
                "envelope": pt.label("envelope"),
            })
        })
        .collect();
    json!({ "schema_version": SCHEMA_VERSION, "rows": rows })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).expect("reports serialise");
    text.push('\n');
    emit(out, &text)
}

fn bound_points(c: &CommonArgs, ch: &ChannelSpec, mono: &Monotone, grid: &[f64]) -> Result<Vec<CurvePoint>, CliError> {
    let pts = optimal_bound_curve(ch, grid, mono)?;
    Ok(pts.into_iter().map(|p| p.with_label("theta", c.theta)).collect())
}

fn cmd_bound(a: &CurveArgs) -> Result<(), CliError> {
    let ch = a.common.channel.channel()?;
    let mono = a.common.monotone()?;
    let grid = parse_grid(&a.common.grid)?;
    let pts = bound_points(&a.common, &ch, &mono, &grid)?;
    match a.format {
        Format::Csv => emit(&a.common.out, &curve_csv(&pts)),
        Format::Json => emit_json(&a.common.out, &curve_json(&pts)),
    }
}

fn cmd_protocol_optimal(a: &ProtocolArgs) -> Result<(), CliError> {
    let ch = a.common.channel.channel()?;
    let mono = a.common.monotone()?;
    let grid = parse_grid(&a.common.grid)?;
    let reports = grid
        .iter()
        .map(|&p| -> Result<Value, CliError> {
            let params = calibrate_optimal(p, &ch, a.common.theta)?;
            let c = qnd_concurrence(&params)?;
            Ok(json!({
                "p_s_target": p,
                "params": params_json(&params),
                "p_s": success_probability(&params),
                "concurrence": c,
                "e_bar": monotone_value(&mono, c)?,
                "bound_concurrence": optimal_concurrence(p, &ch)?,
            }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    emit_json(&a.common.out, &protocol_report("optimal", &ch, a.common.theta, &mono, reports))
}

fn cmd_protocol_near_optimal(a: &ProtocolArgs) -> Result<(), CliError> {
    let ch = a.common.channel.channel()?;
    let mono = a.common.monotone()?;
    let grid = parse_grid(&a.common.grid)?;
    let reports = grid
        .par_iter()
        .map(|&p| -> Result<Value, CliError> {
            let r = optimize_near_optimal(p, &ch, a.common.theta, &mono)?;
            let (p_s, e_enumerated) = average_monotone(&r.params, &mono, a.tail_tol)?;
            let bound = monotone_value(&mono, optimal_concurrence(p, &ch)?)?;
            Ok(json!({
                "p_s_target": p,
                "params": params_json(&r.params),
                "p_s": p_s,
                "e_bar": r.e_bar,
                "e_bar_enumerated": e_enumerated,
                "bound_e_bar": bound,
                "search_fallback": r.fallback,
                "top_outcomes": top_outcomes(&r.params, &mono, 10)?,
            }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    emit_json(&a.common.out, &protocol_report("near-optimal", &ch, a.common.theta, &mono, reports))
}

fn params_json(p: &ProtocolParams) -> Value {
    json!({
        "alpha": p.alpha,
        "beta": p.beta,
        "theta": p.theta,
        "T": p.channel.transmittance(),
        "u_alpha": branch_amplitudes(p).u_alpha,
    })
}

fn protocol_report(kind: &str, ch: &ChannelSpec, theta: f64, mono: &Monotone, points: Vec<Value>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "protocol": kind,
        "T": ch.transmittance(),
        "theta": theta,
        "monotone": mono.name(),
        "points": points,
    })
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let ch = a.common.channel.channel()?;
    let mono = a.common.monotone()?;
    let grid = parse_grid(&a.common.grid)?;
    let mut want = (false, false);
    for c in a.curves.split(',').map(str::trim) {
        match c {
            "i" | "(i)" | BOUND_CURVE_ID => want.0 = true,
            "ii" | "(ii)" | NEAR_OPTIMAL_CURVE_ID => want.1 = true,
            other => return Err(CliError::Usage(format!("unknown curve {other:?}; expected i or ii"))),
        }
    }
    let mut pts = Vec::new();
    if want.0 {
        pts.extend(bound_points(&a.common, &ch, &mono, &grid)?);
    }
    if want.1 {
        pts.extend(near_optimal_curve(&ch, a.common.theta, &grid, &mono)?);
    }
    match a.format {
        Format::Csv => emit(&a.common.out, &curve_csv(&pts)),
        Format::Json => emit_json(&a.common.out, &curve_json(&pts)),
    }
}

fn cmd_oracle_verify(a: &OracleArgs) -> Result<(), CliError> {
    if !(a.oracle_tol > 0.0) {
        return Err(CliError::Usage(format!("oracle tolerance {} must be positive", a.oracle_tol)));
    }
    if a.nmax == Some(0) {
        return Err(CliError::Usage("nmax must be positive".into()));
    }
    let grid = standard_grid();
    let results: Vec<_> = grid.par_iter().map(|p| check_point(p, a.nmax).map(|(c, _)| c)).collect();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let rows: Vec<Value> = grid
        .iter()
        .zip(results)
        .map(|(p, r)| match r {
            Ok(c) => {
                let d = c.max_discrepancy();
                worst = worst.max(d);
                let pass = d < a.oracle_tol;
                if !pass {
                    failures += 1;
                }
                let mut v = serde_json::to_value(&c).expect("point checks serialise");
                v["max_discrepancy"] = json!(d);
                v["pass"] = json!(pass);
                v
            }
            Err(e) => {
                failures += 1;
                json!({
                    "alpha": p.alpha, "beta": p.beta, "theta": p.theta, "T": p.channel.transmittance(),
                    "error": e.to_string(), "pass": false,
                })
            }
        })
        .collect();
    let reference = ProtocolParams::new(0.8, 1.3, 0.2, ChannelSpec::new(0.7)?)?;
    let commutation = commutation_discrepancy(&reference, a.nmax).map_err(|e| e.to_string());
    let commutation_ok = matches!(commutation, Ok(d) if d < a.oracle_tol.min(1e-9));
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "tolerance": a.oracle_tol,
        "points": rows,
        "max_discrepancy": worst,
        "failed_points": failures,
        "commutation": match &commutation {
            Ok(d) => json!({ "discrepancy": d, "pass": commutation_ok }),
            Err(e) => json!({ "error": e, "pass": false }),
        },
        "pass": failures == 0 && commutation_ok,
    });
    emit_json(&a.out, &report)?;
    if failures > 0 || !commutation_ok {
        return Err(CliError::Verification(format!(
            "{failures} of {} grid points above tolerance {:e} or unevaluated; worst evaluated discrepancy {worst:e}",
            grid.len(),
            a.oracle_tol
        )));
    }
    Ok(())
}

fn cmd_audit(a: &AuditArgs) -> Result<(), CliError> {
    let ch = PhaseFlipChannel::new(a.f)?;
    let sc = FilterScenario::phase_flipped(a.lambda0, a.f)?;
    let input = phase_flipped_state(a.lambda0, &ch)?;
    let r = montecarlo_filter_audit(&sc, &input, a.trials, a.seed)?;
    let pass = r.max_violation <= AUDIT_SLACK;
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "lambda0": sc.lambda0(),
        "lambda1": sc.lambda1(),
        "f": a.f,
        "c_in": sc.c_in(),
        "trials": r.trials,
        "seed": r.seed,
        "max_violation": r.max_violation,
        "worst": { "p_s": r.worst.0, "concurrence": r.worst.1 },
        "slack": AUDIT_SLACK,
        "pass": pass,
    });
    emit_json(&a.out, &report)?;
    if !pass {
        return Err(CliError::Verification(format!("filter beat the bound by {:e}", r.max_violation)));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::ProtocolOptimal(a) => cmd_protocol_optimal(a),
        Command::ProtocolNearOptimal(a) => cmd_protocol_near_optimal(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::OracleVerify(a) => cmd_oracle_verify(a),
        Command::Audit(a) => cmd_audit(a),
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cohent: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("3").unwrap(), vec![0.25, 0.5, 0.75]);
        assert_eq!(parse_grid("0.5, 0.1,0.5").unwrap(), vec![0.1, 0.5]);
        assert!(parse_grid("0").is_err());
        assert!(parse_grid("0.5,1.0").is_err());
        assert!(parse_grid("abc").is_err());
    }

    #[test]
    fn csv_floats_round_trip() {
        let x = 0.1f64 + 0.2;
        assert_eq!(float(x).parse::<f64>().unwrap(), x);
        assert_eq!(float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn channel_flags_are_exclusive() {
        let both = ChannelArgs { transmittance: Some(0.5), loss_km: Some(1.0), l0_km: 25.0 };
        assert!(matches!(both.channel(), Err(CliError::Usage(_))));
        let none = ChannelArgs { transmittance: None, loss_km: None, l0_km: 25.0 };
        assert!(matches!(none.channel(), Err(CliError::Usage(_))));
    }
}
