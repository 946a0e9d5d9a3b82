//! Command-line front-end for the `grushin` library.
//!
//! Subcommands expose the library's operations with machine-readable output:
//! `ricci` (pointwise weighted Ricci values), `kmax` (largest admissible
//! curvature bound), `region-scan` (feasibility over a parameter grid),
//! `geodesic` (sampled Hamiltonian flow), `distance` (two-point BVP),
//! `cd-check` (slice-transport CD verification between two quartic bumps),
//! and `dim-exponent` (boundary distance-scaling probe).
//!
//! Output is JSON (compact, one object or array) or CSV (RFC-4180, LF line
//! endings, floats at 17 significant digits) selected by `--format`. Exit
//! status: 0 on success, 2 on usage errors, 3 on numerical failures (with a
//! JSON error object on stderr). Identical invocations produce byte-identical
//! output.

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use grushin::curvature::{ricci_closed, EffectiveDim};
use grushin::geodesics::{
    dimension_profile, distance_report, flow, DistanceMethod, GeodesicState, Termination,
};
use grushin::model::{Family, SpaceModel};
use grushin::regions::{kmax_closed, Binding};
use grushin::transport::{cd_slice_check, SliceMeasure};
use grushin::Error;

#[derive(Parser)]
#[command(
    name = "grushin",
    about = "Curvature-dimension analysis of warped half-space geometries",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the weighted N-Ricci tensor at a point (closed form).
    Ricci(RicciArgs),
    /// Largest K with Ric_N ≥ K g on the whole interior.
    Kmax(KmaxArgs),
    /// Feasibility scan over a parameter grid (CSV rows per cell).
    RegionScan(RegionScanArgs),
    /// Integrate the geodesic flow and sample the trajectory.
    Geodesic(GeodesicArgs),
    /// Minimal geodesic distance between two points.
    Distance(DistanceArgs),
    /// Verify the CD(K, N) inequality between two slice bumps.
    CdCheck(CdCheckArgs),
    /// Boundary distance-scaling exponent along a δ sequence.
    DimExponent(DimExponentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_space(s: &str) -> Result<SpaceModel, String> {
    SpaceModel::from_str(s).map_err(|e| e.to_string())
}

fn parse_dim(s: &str) -> Result<EffectiveDim, String> {
    EffectiveDim::from_str(s).map_err(|e| e.to_string())
}

/// `x,y` pair.
fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected x,y — got '{s}'"));
    }
    let x = parse_num(parts[0])?;
    let y = parse_num(parts[1])?;
    Ok((x, y))
}

/// `x,y,u,v` phase-space state.
fn parse_state(s: &str) -> Result<GeodesicState, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected x,y,u,v — got '{s}'"));
    }
    Ok(GeodesicState {
        x: parse_num(parts[0])?,
        y: parse_num(parts[1])?,
        u: parse_num(parts[2])?,
        v: parse_num(parts[3])?,
    })
}

/// `a:b` support interval.
fn parse_support(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("expected a:b — got '{s}'"));
    }
    Ok((parse_num(parts[0])?, parse_num(parts[1])?))
}

fn parse_num(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("invalid number '{}'", s.trim()))
}

/// A scan range `lo:hi:step` or a single value. Grid values are generated in
/// decimal-scaled integer arithmetic (snapping to the step's printed
/// decimals), so a range like `1:7:0.1` hits 4.0 exactly.
#[derive(Clone)]
struct RangeSpec {
    vals: Vec<f64>,
}

fn decimal_places(s: &str) -> u32 {
    let s = s.trim();
    if s.contains(['e', 'E']) {
        return 9;
    }
    match s.split_once('.') {
        Some((_, frac)) => frac.len().min(9) as u32,
        None => 0,
    }
}

fn parse_range(s: &str) -> Result<RangeSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => Ok(RangeSpec { vals: vec![parse_num(parts[0])?] }),
        3 => {
            let lo = parse_num(parts[0])?;
            let hi = parse_num(parts[1])?;
            let step = parse_num(parts[2])?;
            if !(step > 0.0) {
                return Err(format!("range step must be positive, got '{}'", parts[2]));
            }
            if hi < lo {
                return Err(format!("range upper bound {hi} is below lower bound {lo}"));
            }
            let scale = 10f64.powi(
                decimal_places(parts[0])
                    .max(decimal_places(parts[1]))
                    .max(decimal_places(parts[2])) as i32,
            );
            let ilo = (lo * scale).round() as i64;
            let ihi = (hi * scale).round() as i64;
            let istep = (step * scale).round() as i64;
            if istep <= 0 {
                return Err(format!("range step {step} vanishes at the grid's decimal scale"));
            }
            let mut vals = Vec::new();
            let mut i = ilo;
            while i <= ihi {
                vals.push(i as f64 / scale);
                i += istep;
            }
            Ok(RangeSpec { vals })
        }
        _ => Err(format!("expected a value or lo:hi:step — got '{s}'")),
    }
}

#[derive(Args)]
struct RicciArgs {
    /// Space spec, e.g. hyperbolic:alpha=1,beta=2
    #[arg(long, value_parser = parse_space)]
    space: SpaceModel,
    /// Evaluation point.
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    /// Effective dimension (number ≥ 2, negative, or `inf`).
    #[arg(long = "N", value_parser = parse_dim, allow_negative_numbers = true)]
    n: EffectiveDim,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct KmaxArgs {
    #[arg(long, value_parser = parse_space)]
    space: SpaceModel,
    #[arg(long = "N", value_parser = parse_dim, allow_negative_numbers = true)]
    n: EffectiveDim,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct RegionScanArgs {
    /// Family to scan: plane, sphere, hyperbolic, or infinity.
    #[arg(long)]
    family: Family,
    /// α value or range lo:hi:step (not valid for the infinity family).
    #[arg(long, value_parser = parse_range)]
    alpha: Option<RangeSpec>,
    /// β value or range lo:hi:step.
    #[arg(long, value_parser = parse_range)]
    beta: RangeSpec,
    /// γ value or range lo:hi:step (infinity family only).
    #[arg(long, value_parser = parse_range)]
    gamma: Option<RangeSpec>,
    #[arg(long = "N", value_parser = parse_dim, allow_negative_numbers = true)]
    n: EffectiveDim,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct GeodesicArgs {
    #[arg(long, value_parser = parse_space)]
    space: SpaceModel,
    /// Initial phase-space state x,y,u,v.
    #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
    from: GeodesicState,
    /// Integration time T > 0.
    #[arg(long)]
    to: f64,
    /// Number of sample intervals over [0, T].
    #[arg(long, default_value_t = 100)]
    grid: u32,
    /// Trajectory error tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long, value_parser = parse_space)]
    space: SpaceModel,
    /// Start point x,y.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    from: (f64, f64),
    /// End point x,y.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    to: (f64, f64),
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CdCheckArgs {
    #[arg(long, value_parser = parse_space)]
    space: SpaceModel,
    /// Curvature bound K.
    #[arg(long = "K", allow_negative_numbers = true)]
    k: f64,
    #[arg(long = "N", value_parser = parse_dim, allow_negative_numbers = true)]
    n: EffectiveDim,
    /// Support a:b of the source bump.
    #[arg(long, value_parser = parse_support)]
    from: (f64, f64),
    /// Support a:b of the target bump.
    #[arg(long, value_parser = parse_support)]
    to: (f64, f64),
    /// Interpolation times: a value or range lo:hi:step inside [0, 1].
    #[arg(long, value_parser = parse_range, default_value = "0.25:0.75:0.25")]
    grid: RangeSpec,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct DimExponentArgs {
    /// Space spec (plane or infinity family).
    #[arg(long, value_parser = parse_space)]
    space: SpaceModel,
    /// Comma-separated δ values in (1e-6, 0.5).
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3")]
    grid: Vec<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

/// 17-significant-digit float (lossless round-trip) for CSV payloads.
fn fe(v: f64) -> String {
    format!("{v:.16e}")
}

fn method_name(m: DistanceMethod) -> &'static str {
    match m {
        DistanceMethod::Shooting => "shooting",
        DistanceMethod::Coincident => "coincident",
        DistanceMethod::Horizontal => "horizontal",
        DistanceMethod::BoundaryDip => "boundary_dip",
        DistanceMethod::PoleMeridian => "pole_meridian",
    }
}

fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Completed => "completed",
        Termination::SingularHit => "singular_hit",
        Termination::PoleHit => "pole_hit",
    }
}

fn dim_csv(n: EffectiveDim) -> String {
    match n.value() {
        Some(v) => fe(v),
        None => "inf".into(),
    }
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable output");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct RicciOut {
    space: String,
    x: f64,
    #[serde(rename = "N")]
    n: EffectiveDim,
    rxx: f64,
    ryy: f64,
}

#[derive(Serialize)]
struct KmaxOut {
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmax: Option<f64>,
    binding: Binding,
    #[serde(skip_serializing_if = "Option::is_none")]
    attained: Option<bool>,
    space: String,
    #[serde(rename = "N")]
    n: EffectiveDim,
}

#[derive(Serialize)]
struct ScanRow {
    family: &'static str,
    alpha: f64,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(rename = "N")]
    n: EffectiveDim,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    kmax: Option<f64>,
    binding: Binding,
}

#[derive(Serialize)]
struct GeodesicOut {
    samples: Vec<[f64; 5]>,
    length: f64,
    termination: &'static str,
}

#[derive(Serialize)]
struct CdOut {
    pass: bool,
    margins: Vec<f64>,
    w2: f64,
}

#[derive(Serialize)]
struct DimRow {
    delta: f64,
    distance: f64,
    exponent: f64,
}

#[derive(Serialize)]
struct ErrOut {
    error: &'static str,
    message: String,
}

fn run_ricci(a: RicciArgs) -> grushin::Result<String> {
    let r = ricci_closed(&a.space, a.x, a.n)?;
    Ok(match a.format {
        Format::Json => json_line(&RicciOut {
            space: a.space.canonical(),
            x: a.x,
            n: a.n,
            rxx: r.rxx,
            ryy: r.ryy_over_gyy,
        }),
        Format::Csv => format!("x,rxx,ryy\n{},{},{}\n", fe(a.x), fe(r.rxx), fe(r.ryy_over_gyy)),
    })
}

fn run_kmax(a: KmaxArgs) -> grushin::Result<String> {
    let r = kmax_closed(&a.space, a.n)?;
    Ok(match a.format {
        Format::Json => json_line(&KmaxOut {
            feasible: r.feasible,
            kmax: r.kmax,
            binding: r.binding,
            attained: r.attained,
            space: a.space.canonical(),
            n: a.n,
        }),
        Format::Csv => format!(
            "feasible,kmax,binding,attained\n{},{},{},{}\n",
            r.feasible,
            r.kmax.map(fe).unwrap_or_default(),
            r.binding,
            r.attained.map(|b| b.to_string()).unwrap_or_default(),
        ),
    })
}

fn run_region_scan(a: RegionScanArgs) -> grushin::Result<String> {
    let cells: Vec<(f64, f64, Option<f64>)> = match a.family {
        Family::Infinity => {
            if a.alpha.is_some() {
                return Err(Error::Invalid(
                    "alpha is not a parameter of the infinity family".into(),
                ));
            }
            let gammas = a
                .gamma
                .as_ref()
                .ok_or_else(|| Error::Invalid("the infinity family requires --gamma".into()))?;
            a.beta
                .vals
                .iter()
                .flat_map(|&b| gammas.vals.iter().map(move |&g| (0.0, b, Some(g))))
                .collect()
        }
        _ => {
            if a.gamma.is_some() {
                return Err(Error::Invalid(
                    "gamma is only valid for the infinity family".into(),
                ));
            }
            let alphas = a
                .alpha
                .as_ref()
                .ok_or_else(|| Error::Invalid("this family requires --alpha".into()))?;
            alphas
                .vals
                .iter()
                .flat_map(|&al| a.beta.vals.iter().map(move |&b| (al, b, None)))
                .collect()
        }
    };
    // Cells that fail model construction or dimension admissibility are
    // skipped rather than reported: a missing row means "no such space",
    // while an infeasible row means "space exists, CD fails".
    let rows: Vec<ScanRow> = cells
        .iter()
        .filter_map(|&(alpha, beta, gamma)| {
            let space = SpaceModel::from_parts(a.family, alpha, beta, gamma).ok()?;
            let r = kmax_closed(&space, a.n).ok()?;
            Some(ScanRow {
                family: a.family.name(),
                alpha,
                beta,
                gamma,
                n: a.n,
                feasible: r.feasible,
                kmax: r.kmax,
                binding: r.binding,
            })
        })
        .collect();
    Ok(match a.format {
        Format::Json => json_line(&rows),
        Format::Csv => {
            let mut out = String::from("family,alpha,beta,gamma,N,feasible,kmax,binding\n");
            for row in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    row.family,
                    fe(row.alpha),
                    fe(row.beta),
                    row.gamma.map(fe).unwrap_or_default(),
                    dim_csv(row.n),
                    row.feasible,
                    row.kmax.map(fe).unwrap_or_default(),
                    row.binding,
                ));
            }
            out
        }
    })
}

fn run_geodesic(a: GeodesicArgs) -> grushin::Result<String> {
    if a.grid == 0 {
        return Err(Error::Invalid("grid must have at least one interval".into()));
    }
    if !(a.to > 0.0) || !a.to.is_finite() {
        return Err(Error::Invalid(format!("integration time must be positive, got {}", a.to)));
    }
    let mut rows: Vec<(f64, GeodesicState)> = vec![(0.0, a.from)];
    let mut length = 0.0;
    let mut termination = Termination::Completed;
    for k in 1..=a.grid {
        let tk = a.to * k as f64 / a.grid as f64;
        let traj = flow(&a.space, &a.from, tk, a.tol)?;
        let (t_last, s_last) = *traj.samples.last().expect("trajectory has samples");
        rows.push((t_last, s_last));
        length = traj.length;
        termination = traj.termination;
        if termination != Termination::Completed {
            break;
        }
    }
    Ok(match a.format {
        Format::Json => json_line(&GeodesicOut {
            samples: rows.iter().map(|(t, s)| [*t, s.x, s.y, s.u, s.v]).collect(),
            length,
            termination: termination_name(termination),
        }),
        Format::Csv => {
            let mut out = String::from("t,x,y,u,v\n");
            for (t, s) in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fe(*t),
                    fe(s.x),
                    fe(s.y),
                    fe(s.u),
                    fe(s.v)
                ));
            }
            out
        }
    })
}

fn run_distance(a: DistanceArgs) -> grushin::Result<String> {
    let report = distance_report(&a.space, a.from, a.to, 16)?;
    Ok(match a.format {
        Format::Json => json_line(&report),
        Format::Csv => format!(
            "d,method,converged_shots,seed\n{},{},{},{}\n",
            fe(report.d),
            method_name(report.method),
            report.converged_shots,
            report.seed
        ),
    })
}

fn run_cd_check(a: CdCheckArgs) -> grushin::Result<String> {
    let mu0 = SliceMeasure::bump(&a.space, a.from.0, a.from.1)?;
    let mu1 = SliceMeasure::bump(&a.space, a.to.0, a.to.1)?;
    let report = cd_slice_check(&a.space, a.k, a.n, &mu0, &mu1, &a.grid.vals)?;
    Ok(match a.format {
        Format::Json => json_line(&CdOut {
            pass: report.pass,
            margins: report.margins.clone(),
            w2: report.w2,
        }),
        Format::Csv => format!(
            "pass,min_margin,w2\n{},{},{}\n",
            report.pass,
            fe(report.min_margin),
            fe(report.w2)
        ),
    })
}

fn run_dim_exponent(a: DimExponentArgs) -> grushin::Result<String> {
    let rows = dimension_profile(&a.space, &a.grid)?;
    Ok(match a.format {
        Format::Json => {
            let objs: Vec<DimRow> = rows
                .iter()
                .map(|&(delta, distance, exponent)| DimRow { delta, distance, exponent })
                .collect();
            json_line(&objs)
        }
        Format::Csv => {
            let mut out = String::from("delta,distance,exponent\n");
            for (delta, distance, exponent) in &rows {
                out.push_str(&format!("{},{},{}\n", fe(*delta), fe(*distance), fe(*exponent)));
            }
            out
        }
    })
}

fn run(cmd: Cmd) -> grushin::Result<String> {
    match cmd {
        Cmd::Ricci(a) => run_ricci(a),
        Cmd::Kmax(a) => run_kmax(a),
        Cmd::RegionScan(a) => run_region_scan(a),
        Cmd::Geodesic(a) => run_geodesic(a),
        Cmd::Distance(a) => run_distance(a),
        Cmd::CdCheck(a) => run_cd_check(a),
        Cmd::DimExponent(a) => run_dim_exponent(a),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Construction(_) => "construction",
        Error::Domain(_) => "domain",
        Error::Dim(_) => "dimension",
        Error::Invalid(_) => "invalid_input",
        Error::Integration(_) => "integration",
        Error::Quadrature(_) => "quadrature",
        Error::NoConvergence(_) => "no_convergence",
        Error::Support(_) => "support",
        Error::Statement(_) => "statement",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(payload) => {
            print!("{payload}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let numerical = matches!(
                e,
                Error::Integration(_) | Error::Quadrature(_) | Error::NoConvergence(_)
            );
            if numerical {
                eprintln!(
                    "{}",
                    serde_json::to_string(&ErrOut {
                        error: error_kind(&e),
                        message: e.to_string(),
                    })
                    .expect("serializable error")
                );
                ExitCode::from(3)
            } else {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        }
    }
}
