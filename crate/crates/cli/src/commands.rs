//! Subcommand flags and their JSON outputs.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use cslab_core::flow::{
    classify, flow_run, section_monotonicity_probe, FlowOptions, FlowTrajectory, ProbeOptions,
    ProbeReport, StabilityVerdict, Thresholds,
};
use cslab_core::gaugefield::{cartan_slice, FourierConnection};
use cslab_core::liealg::{build_root_system, Family, RepresentationWeights, RootSystem, Weight};
use cslab_core::spectral::{
    clutched_dbar, kernel_dim, relative_det_truncated, zeta_det_slice, KernelReport, MatrixRep,
    TwistedDolbeault,
};
use cslab_core::theta::{winv_dimension, WinvOptions};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{
    check_positive, check_tau, parse_complex, parse_complex_list, parse_family, parse_group,
    parse_int_list,
};
use crate::report::{tag_floats, CNum, CliError, Num};
use crate::verify::{thread_count, ProbeSummary, Suite, TITLES};

/// JSON output with the exit code it implies.
pub struct Outcome {
    pub json: Value,
    pub code: i32,
}

impl Outcome {
    fn ok(json: Value) -> Self {
        Outcome { json, code: 0 }
    }
}

fn echo<T: Serialize>(a: &T) -> Value {
    tag_floats(serde_json::to_value(a).expect("flags serialize"))
}

fn finite(x: f64) -> Option<Num> {
    x.is_finite().then(|| Num::rounded(x))
}

fn kernel_json(k: &KernelReport) -> Value {
    json!({
        "h0": k.h0,
        "h1": k.h1,
        "gap_ratio": finite(k.gap_ratio),
        "truncations": k.truncations,
        "singular_values_head": k.head.iter().map(|&s| Num::new(s, 1e-13 * s.max(1.0))).collect::<Vec<_>>(),
    })
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BlocksArgs {
    #[arg(long, default_value = "A")]
    pub family: String,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, default_value_t = 1)]
    pub level: u32,
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub tau: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample points per draw (default: twice the basis size plus four).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub threshold: f64,
}

pub fn blocks(a: &BlocksArgs) -> Result<Outcome, CliError> {
    let family = parse_family(&a.family)?;
    let tau = check_tau(parse_complex(&a.tau)?)?;
    check_positive("threshold", a.threshold)?;
    let rs = build_root_system(family, a.rank)?;
    let opts = WinvOptions {
        samples: a.samples,
        threshold: a.threshold,
        seed: a.seed,
        ..Default::default()
    };
    let d = winv_dimension(&rs, a.level, tau, &opts)?;
    Ok(Outcome::ok(json!({
        "config": echo(a),
        "group": format!("{family}{}", a.rank),
        "level": a.level,
        "tau": CNum::new(tau, 0.0),
        "dimension": d.dimension,
        "alcove_count": d.alcove_count,
        "characteristics": d.characteristics,
        "threshold": Num::exact(d.threshold),
        "gap_ratio": finite(d.gap_ratio),
        "singular_values": d.singular_values.iter().map(|&s| Num::rounded(s)).collect::<Vec<_>>(),
    })))
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FlowArgs {
    #[arg(long, default_value = "su2")]
    pub group: String,
    /// Fourier cutoff M.
    #[arg(long, default_value_t = 8)]
    pub modes: usize,
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub tau: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    pub decay: f64,
    #[arg(long, default_value_t = 3.0)]
    pub t_max: f64,
    /// Stop when the gradient norm falls below this value.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub atol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub flat: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub commutator: f64,
    /// Run the determinant probe along the flow.
    #[arg(long)]
    pub probe: bool,
    #[arg(long, default_value = "0.31+0.17i", allow_hyphen_values = true)]
    pub z: String,
    /// Disc radius of the probe's coarser finite section.
    #[arg(long, default_value_t = 8)]
    pub truncation: usize,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Write the time series as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn verdict_json(v: &StabilityVerdict) -> Value {
    let comm = v.commutator.unwrap_or(0.0);
    json!({
        "class": v.class,
        "terminal_ym": Num::rounded(v.terminal_ym),
        "commutator": v.commutator.map(Num::rounded),
        "alcove": v.alcove.as_ref().map(|a| a.iter().map(|&w| CNum::new(w, comm)).collect::<Vec<_>>()),
        "adjoint_h0": v.adjoint_h0,
        "regular": v.regular,
    })
}

fn probe_json(p: &ProbeReport) -> Value {
    json!({
        "summary": ProbeSummary::from_report(p),
        "points": p.points.iter().map(|q| json!({
            "t": Num::exact(q.t),
            "ym": Num::rounded(q.ym),
            "integrated_ym": Num::new(q.integrated_ym, 1e-6 * q.integrated_ym.abs()),
            "log_det": Num::new(q.log_det, q.error),
            "lambda_min": Num::rounded(q.lambda_min),
        })).collect::<Vec<_>>(),
    })
}

fn write_csv(
    path: &PathBuf,
    traj: &FlowTrajectory,
    probe: Option<&ProbeReport>,
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Usage(format!("{}: {e}", path.display()));
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(f, "t,ym,grad_norm,log_det,log_det_error").map_err(io)?;
    for r in &traj.records {
        let det = probe.and_then(|p| p.points.iter().find(|q| q.t == r.t));
        match det {
            Some(q) => writeln!(
                f,
                "{:e},{:e},{:e},{:e},{:e}",
                r.t, r.ym, r.grad_norm, q.log_det, q.error
            ),
            None => writeln!(f, "{:e},{:e},{:e},,", r.t, r.ym, r.grad_norm),
        }
        .map_err(io)?;
    }
    f.flush().map_err(io)
}

pub fn flow(a: &FlowArgs) -> Result<Outcome, CliError> {
    let n = parse_group(&a.group)?;
    let tau = check_tau(parse_complex(&a.tau)?)?;
    let z = parse_complex(&a.z)?;
    for (name, x) in [
        ("t-max", a.t_max),
        ("tol", a.tol),
        ("rtol", a.rtol),
        ("atol", a.atol),
        ("flat", a.flat),
        ("commutator", a.commutator),
        ("amplitude", a.amplitude),
        ("decay", a.decay),
    ] {
        check_positive(name, x)?;
    }
    if a.modes == 0 {
        return Err(CliError::Usage("modes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let a0 = FourierConnection::random(n, a.modes, tau, a.amplitude, a.decay, &mut rng)?;
    let opts = FlowOptions {
        t_max: a.t_max,
        tol: a.tol,
        rtol: a.rtol,
        atol: a.atol,
        stride: if a.probe { 1 } else { 10 },
        ..Default::default()
    };
    let (traj, problem) = match flow_run(&a0, &opts) {
        Ok(t) => (t, None),
        Err(f) => (f.partial, Some(f.error.to_string())),
    };
    let th = Thresholds {
        flat: a.flat,
        commutator: a.commutator,
    };
    let verdict = classify(&traj, &th);
    let probe = if a.probe {
        let po = ProbeOptions {
            truncation: a.truncation,
            samples: a.samples,
            ..Default::default()
        };
        Some(section_monotonicity_probe(
            &traj,
            MatrixRep::Defining,
            z,
            &po,
        ))
    } else {
        None
    };
    let probe_ok = probe.as_ref().and_then(|p| p.as_ref().ok());
    if let Some(path) = &a.csv {
        write_csv(path, &traj, probe_ok)?;
    }
    let last = traj.final_record();
    let ym0 = traj.records[0].ym;
    let max_inc = traj.max_increase();
    let code = if problem.is_some() || matches!(probe, Some(Err(_))) || verdict.is_err() {
        2
    } else {
        0
    };
    let json = json!({
        "config": echo(a),
        "status": problem.as_ref().map_or_else(|| format!("{:?}", traj.status), |_| "StepUnderflow".to_string()),
        "problem": problem,
        "steps": traj.records.len() - 1,
        "rejected": {"error": traj.rejected_error, "monotone": traj.rejected_monotone},
        "t_final": Num::exact(last.t),
        "ym_initial": Num::rounded(ym0),
        "ym_terminal": Num::rounded(last.ym),
        "grad_norm_terminal": Num::rounded(last.grad_norm),
        "max_ym_increase": Num::new(max_inc, opts.ym_slack),
        "monotone": max_inc <= opts.ym_slack,
        "lojasiewicz": traj.lojasiewicz_fit().map(|(b, r2)| json!({"beta": Num::new(b, (1.0 - r2).abs()), "r2": Num::rounded(r2)})),
        "verdict": match &verdict { Ok(v) => verdict_json(v), Err(e) => json!({"error": e.to_string()}) },
        "probe": probe.as_ref().map(|p| match p { Ok(r) => probe_json(r), Err(e) => json!({"error": e.to_string()}) }),
        "trajectory": traj.records.iter().map(|r| json!({
            "t": Num::exact(r.t),
            "ym": Num::rounded(r.ym),
            "grad_norm": Num::rounded(r.grad_norm),
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome { json, code })
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SliceArgs {
    #[arg(long, default_value = "A")]
    pub family: String,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// `defining`, `adjoint` or `trivial`.
    #[arg(long, default_value = "defining")]
    pub rep: String,
    /// Slice point in coroot coordinates, comma separated.
    #[arg(long, default_value = "0.21+0.37i", allow_hyphen_values = true)]
    pub w: String,
    #[arg(long, default_value = "0.31+0.17i", allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub tau: String,
}

struct SliceInput {
    rs: RootSystem,
    rep: RepresentationWeights,
    w: Vec<Complex64>,
    z: Complex64,
    tau: Complex64,
}

fn slice_input(a: &SliceArgs) -> Result<SliceInput, CliError> {
    let family = parse_family(&a.family)?;
    let rs = build_root_system(family, a.rank)?;
    let rep = match a.rep.as_str() {
        "defining" => RepresentationWeights::defining(&rs)?,
        "adjoint" => RepresentationWeights::adjoint(&rs),
        "trivial" => RepresentationWeights::trivial(&rs),
        r => return Err(CliError::Usage(format!("unknown representation {r:?}"))),
    };
    let w = parse_complex_list(&a.w)?;
    if w.len() != rs.rank {
        return Err(CliError::Usage(format!(
            "slice point needs {} coordinates, got {}",
            rs.rank,
            w.len()
        )));
    }
    Ok(SliceInput {
        rs,
        rep,
        w,
        z: parse_complex(&a.z)?,
        tau: check_tau(parse_complex(&a.tau)?)?,
    })
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SpecArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub slice: SliceArgs,
    /// Disc radius of the coarser truncation.
    #[arg(long, default_value_t = 6)]
    pub truncation: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Number of lowest Laplacian eigenvalues to report.
    #[arg(long, default_value_t = 8)]
    pub head: usize,
    /// Degrees of a split bundle, e.g. `2,0,-2`; selects the clutched operator.
    #[arg(long, allow_hyphen_values = true)]
    pub degrees: Option<String>,
    /// Grid points per side for the clutched operator.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
}

pub fn spec(a: &SpecArgs) -> Result<Outcome, CliError> {
    check_positive("tol", a.tol)?;
    if let Some(d) = &a.degrees {
        let degrees = parse_int_list(d)?;
        let z = parse_complex(&a.slice.z)?;
        let tau = check_tau(parse_complex(&a.slice.tau)?)?;
        let op = clutched_dbar(&degrees, z, tau, a.grid)?;
        let total = op.kernel_dim(a.tol)?;
        let summands = op.summand_kernels(a.tol)?;
        return Ok(Outcome::ok(json!({
            "config": echo(a),
            "operator": "clutched",
            "degrees": degrees,
            "z": CNum::new(z, 0.0),
            "tau": CNum::new(tau, 0.0),
            "kernel": kernel_json(&total),
            "summands": summands.iter().map(|(k, r)| json!({
                "degree": k.degree, "h0": k.h0, "h1": k.h1, "gap_ratio": finite(*r),
            })).collect::<Vec<_>>(),
        })));
    }
    let s = slice_input(&a.slice)?;
    let op = TwistedDolbeault::on_slice(&s.rs, &s.rep, &s.w, s.z, s.tau, a.truncation)?;
    let k = kernel_dim(&op, a.tol)?;
    let mut spectrum = op.with_truncation(2 * a.truncation).spectrum();
    spectrum.truncate(a.head);
    Ok(Outcome::ok(json!({
        "config": echo(a),
        "operator": "slice",
        "rep_dim": s.rep.dim(),
        "kernel": kernel_json(&k),
        "laplacian_head": spectrum.iter().map(|&x| Num::new(x, 1e-13 * x.max(1.0))).collect::<Vec<_>>(),
    })))
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DetzetaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub slice: SliceArgs,
    /// Drop zero modes instead of failing on them.
    #[arg(long)]
    pub exclude_kernel: bool,
    /// Also compute the extrapolated finite-section ratio to the trivial
    /// bundle at this disc radius (su(n) defining or adjoint only).
    #[arg(long)]
    pub truncation: Option<usize>,
}

pub fn detzeta(a: &DetzetaArgs) -> Result<Outcome, CliError> {
    let s = slice_input(&a.slice)?;
    let d = zeta_det_slice(&s.rs, &s.rep, &s.w, s.z, s.tau, a.exclude_kernel)?;
    let free = RepresentationWeights {
        weights: vec![(Weight::zero(s.rs.rank), s.rep.dim())],
    };
    let f = zeta_det_slice(&s.rs, &free, &s.w, s.z, s.tau, a.exclude_kernel)?;
    let ratio_log = d.log_value - f.log_value;
    let truncated = match a.truncation {
        None => None,
        Some(n) => {
            if s.rs.family != Family::A {
                return Err(CliError::Usage(
                    "finite sections need an su(n) slice".into(),
                ));
            }
            let rep = match a.slice.rep.as_str() {
                "defining" => MatrixRep::Defining,
                "adjoint" => MatrixRep::Adjoint,
                _ => {
                    return Err(CliError::Usage(
                        "finite sections need the defining or adjoint rep".into(),
                    ))
                }
            };
            let conn = cartan_slice(&s.w, s.tau, 2)?;
            let op = TwistedDolbeault::on_connection(&conn, rep, s.z, n)?;
            let r = relative_det_truncated(&op, &TwistedDolbeault::free(op.rank(), s.z, s.tau, n))?;
            Some(json!({
                "truncation": n,
                "log_ratio": Num::new(r.log_value, r.error),
                "method": r.method,
            }))
        }
    };
    Ok(Outcome::ok(json!({
        "config": echo(a),
        "method": d.method,
        "log_det": Num::new(d.log_value, d.error),
        "det": Num::new(d.value, d.value * d.error),
        "zeta0": d.zeta0.map(Num::rounded),
        "log_ratio_to_trivial": Num::new(ratio_log, d.error + f.error),
        "truncated": truncated,
    })))
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Reduced workloads for every criterion.
    #[arg(long)]
    pub quick: bool,
    /// Comma-separated criterion numbers (default: all).
    #[arg(long)]
    pub criteria: Option<String>,
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let ids: Vec<usize> = match &a.criteria {
        None => (1..=TITLES.len()).collect(),
        Some(s) => parse_int_list(s)?
            .into_iter()
            .map(|i| {
                usize::try_from(i)
                    .ok()
                    .filter(|i| (1..=TITLES.len()).contains(i))
                    .ok_or_else(|| CliError::Usage(format!("no criterion {i}")))
            })
            .collect::<Result<_, _>>()?,
    };
    let report = Suite::new(a.quick, thread_count()).run(&ids);
    for c in &report.criteria {
        eprintln!("{} {}. {}: {}", c.status.label(), c.id, c.title, c.summary);
    }
    let code = report.exit_code();
    let json = serde_json::to_value(&report).map_err(|e| CliError::Failed(e.to_string()))?;
    Ok(Outcome { json, code })
}
