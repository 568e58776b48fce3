//! The acceptance suite: eight criteria, each deterministic, scheduled
//! concurrently.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};

use cslab_core::flow::{
    classify, classify_terminal, flow_run, section_monotonicity_probe, ym_gradient, FlowOptions,
    FlowTrajectory, ProbeOptions, ProbeReport, ProbeVerdict, Stability, StabilityVerdict,
    Thresholds,
};
use cslab_core::gaugefield::{
    cartan_slice, fundamental_field, g_lambda, gauge_act, kahler_metric, moment_pairing,
    symplectic, yang_mills, FourierConnection, GaugeTransformation, MatrixField,
};
use cslab_core::liealg::{
    affine_weyl_reduce, build_root_system, dynkin_index, orbit_distance, Family,
    RepresentationWeights, RootSystem, Weight,
};
use cslab_core::spectral::{
    adjoint_kernel, clutched_dbar, kernel_dim, relative_det_truncated, zeta_det_slice,
    KernelReport, MatrixRep, TwistedDolbeault, KERNEL_TOL,
};
use cslab_core::theta::{winv_dimension, WinvOptions};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{CNum, Num};

/// Twist used by the monotonicity probe.
pub const PROBE_TWIST: Complex64 = Complex64::new(0.31, 0.17);
pub const CORPUS_AMPLITUDE: f64 = 0.5;
pub const CORPUS_DECAY: f64 = 1.0;
/// Gradient-norm stop for corpus flows.
pub const FLOW_TOL: f64 = 1e-5;

pub const TITLES: [&str; 8] = [
    "conformal-block dimension equals the alcove count",
    "Dynkin index of the adjoint is twice the dual Coxeter number",
    "flow monotonicity, convergence and stable alcove points",
    "determinant probe is non-decreasing along converged flows",
    "adjoint kernel jumps by two on a root wall",
    "clutched (2,0,-2) operator has sections everywhere",
    "slice consistency",
    "Hamiltonian structure and gradient consistency",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    fn combine(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Pass,
        }
    }

    fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub status: Status,
    pub summary: String,
    pub details: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub quick: bool,
    pub status: Status,
    pub criteria: Vec<CriterionReport>,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Inconclusive => 2,
            Status::Fail => 3,
        }
    }
}

/// Thread count from `CSLAB_THREADS`, else the available parallelism.
pub fn thread_count() -> usize {
    std::env::var("CSLAB_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Order-preserving parallel map over a work queue.
pub fn par_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, items.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("unpoisoned slot") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| {
            m.into_inner()
                .expect("unpoisoned slot")
                .expect("filled slot")
        })
        .collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn root_system(f: Family, r: usize) -> RootSystem {
    build_root_system(f, r).expect("supported root system")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
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
    })
}

/// Workload sizes.
#[derive(Debug, Clone)]
struct Scale {
    block_cases: Vec<(Family, usize, Vec<u32>)>,
    moduli: usize,
    seeds: u64,
    modes: usize,
    z_side: usize,
    samples: usize,
    flow_tol: f64,
    probe: ProbeOptions,
}

impl Scale {
    fn new(quick: bool) -> Self {
        if quick {
            Scale {
                block_cases: vec![
                    (Family::A, 1, vec![1, 2, 3]),
                    (Family::A, 2, vec![1, 2]),
                    (Family::B, 2, vec![1]),
                    (Family::G, 2, vec![1]),
                ],
                moduli: 1,
                seeds: 4,
                modes: 6,
                z_side: 4,
                samples: 4,
                flow_tol: FLOW_TOL,
                probe: ProbeOptions {
                    truncation: 6,
                    samples: 6,
                    ..Default::default()
                },
            }
        } else {
            Scale {
                block_cases: vec![
                    (Family::A, 1, (1..=6).collect()),
                    (Family::A, 2, (1..=3).collect()),
                    (Family::B, 2, (1..=2).collect()),
                    (Family::G, 2, vec![1]),
                ],
                moduli: 3,
                seeds: 20,
                modes: 8,
                z_side: 8,
                samples: 10,
                flow_tol: FLOW_TOL,
                probe: ProbeOptions::default(),
            }
        }
    }
}

/// Outcome of one seeded flow with its rerun and probe.
#[derive(Debug, Clone, Serialize)]
pub struct FlowEntry {
    pub seed: u64,
    pub status: String,
    pub steps: usize,
    pub initial_ym: Num,
    pub terminal_ym: Num,
    pub max_increase: Num,
    pub converged: bool,
    pub commutator: Option<Num>,
    pub alcove: Option<Vec<CNum>>,
    pub rerun_distance: Option<Num>,
    pub threshold_stable: Option<bool>,
    pub probe: Option<ProbeSummary>,
    pub problem: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeSummary {
    pub verdict: ProbeVerdict,
    pub points: usize,
    pub slope: Option<Num>,
    pub r2: Option<Num>,
    pub worst_drop: Num,
    pub collapse: bool,
}

impl ProbeSummary {
    pub fn from_report(p: &ProbeReport) -> Self {
        let err = p.points.iter().map(|q| q.error).fold(0.0, f64::max);
        let n = p.points.len() as f64;
        let slope = p.slope.zip(p.r2).map(|(s, r2)| {
            let se = if n > 2.0 && r2 > 0.0 {
                s.abs() * ((1.0 / r2 - 1.0).max(0.0) / (n - 2.0)).sqrt()
            } else {
                f64::INFINITY
            };
            Num::new(s, se)
        });
        ProbeSummary {
            verdict: p.verdict,
            points: p.points.len(),
            slope,
            r2: p.r2.map(Num::rounded),
            worst_drop: Num::new(p.worst_drop, err),
            collapse: p.collapse,
        }
    }
}

/// A random constant element of `SU(n)`.
pub fn random_constant_gauge(n: usize, rng: &mut ChaCha8Rng) -> GaugeTransformation {
    let mut xi = MatrixField::random(n, 0, 2.0, 1.0, rng);
    xi.make_antihermitian();
    xi.make_traceless();
    GaugeTransformation::Exponential(xi)
}

fn alcove_point(v: &StabilityVerdict) -> Option<&Vec<Complex64>> {
    v.alcove.as_ref()
}

/// Runs one corpus flow, its gauge-rotated rerun and the probe.
pub fn corpus_entry(seed: u64, modes: usize, tol: f64, probe: Option<&ProbeOptions>) -> FlowEntry {
    let tau = c(0.0, 1.0);
    let rs = root_system(Family::A, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0 = FourierConnection::random(2, modes, tau, CORPUS_AMPLITUDE, CORPUS_DECAY, &mut rng)
        .expect("valid modulus");
    let g = random_constant_gauge(2, &mut rng);
    let mut entry = FlowEntry {
        seed,
        status: String::new(),
        steps: 0,
        initial_ym: Num::rounded(yang_mills(&a0)),
        terminal_ym: Num::exact(f64::NAN),
        max_increase: Num::exact(f64::NAN),
        converged: false,
        commutator: None,
        alcove: None,
        rerun_distance: None,
        threshold_stable: None,
        probe: None,
        problem: None,
    };
    let opts = FlowOptions {
        tol,
        stride: if probe.is_some() { 1 } else { usize::MAX },
        ..Default::default()
    };
    let traj = match flow_run(&a0, &opts) {
        Ok(t) => {
            entry.status = format!("{:?}", t.status);
            t
        }
        Err(f) => {
            entry.status = "StepUnderflow".into();
            entry.problem = Some(f.error.to_string());
            f.partial
        }
    };
    let last = traj.final_record();
    entry.steps = traj.records.len() - 1;
    entry.terminal_ym = Num::rounded(last.ym);
    entry.max_increase = Num::new(traj.max_increase(), 1e-14 * entry.initial_ym.value);
    let th = Thresholds::default();
    let verdict = match classify(&traj, &th) {
        Ok(v) => v,
        Err(e) => {
            entry.problem = Some(e.to_string());
            return entry;
        }
    };
    entry.converged = verdict.class == Stability::Semistable;
    if !entry.converged {
        return entry;
    }
    let comm = verdict.commutator.unwrap_or(f64::NAN);
    entry.commutator = Some(Num::rounded(comm));
    let alcove = alcove_point(&verdict).cloned().unwrap_or_default();
    entry.alcove = Some(alcove.iter().map(|&w| CNum::new(w, comm)).collect());
    entry.threshold_stable = Some(threshold_stable(&traj, &th, &rs, &alcove));
    if let Some(p) = probe {
        match section_monotonicity_probe(&traj, MatrixRep::Defining, PROBE_TWIST, p) {
            Ok(r) => entry.probe = Some(ProbeSummary::from_report(&r)),
            Err(e) => entry.problem = Some(e.to_string()),
        }
    }
    drop(traj);
    let rerun_opts = FlowOptions {
        tol,
        stride: usize::MAX,
        ..Default::default()
    };
    let rotated = gauge_act(&g, &a0).expect("constant gauge acts");
    let rerun = match flow_run(&rotated, &rerun_opts) {
        Ok(t) => t,
        Err(f) => f.partial,
    };
    match classify(&rerun, &th) {
        Ok(v) => {
            if let Some(w2) = alcove_point(&v) {
                entry.rerun_distance = Some(Num::rounded(orbit_distance(&rs, &alcove, w2, tau)));
            }
        }
        Err(e) => entry.problem = Some(format!("rerun: {e}")),
    }
    entry
}

/// Same class and alcove point with both thresholds moved one decade
/// each way.
fn threshold_stable(
    traj: &FlowTrajectory,
    th: &Thresholds,
    rs: &RootSystem,
    alcove: &[Complex64],
) -> bool {
    [0.1, 10.0].iter().all(|&s| {
        let t = Thresholds {
            flat: th.flat * s,
            commutator: th.commutator * s,
        };
        match classify(traj, &t) {
            Ok(v) => match alcove_point(&v) {
                Some(w) => orbit_distance(rs, alcove, w, traj.terminal.tau) < 1e-12,
                None => false,
            },
            Err(_) => false,
        }
    })
}

pub struct Suite {
    quick: bool,
    threads: usize,
    scale: Scale,
    corpus: OnceLock<Vec<FlowEntry>>,
}

impl Suite {
    pub fn new(quick: bool, threads: usize) -> Self {
        Suite {
            quick,
            threads: threads.max(1),
            scale: Scale::new(quick),
            corpus: OnceLock::new(),
        }
    }

    /// Runs the given criteria (1-based ids) concurrently.
    pub fn run(&self, ids: &[usize]) -> VerifyReport {
        let criteria = par_map(ids, self.threads, |&id| self.criterion(id));
        let status = criteria
            .iter()
            .fold(Status::Pass, |s, c| s.combine(c.status));
        VerifyReport {
            quick: self.quick,
            status,
            criteria,
        }
    }

    pub fn run_all(&self) -> VerifyReport {
        self.run(&(1..=TITLES.len()).collect::<Vec<_>>())
    }

    pub fn criterion(&self, id: usize) -> CriterionReport {
        let (status, summary, details) = match id {
            1 => self.block_dimensions(),
            2 => self.dynkin_indices(),
            3 => self.flow_monotonicity(),
            4 => self.probe_monotonicity(),
            5 => self.regularity_wall(),
            6 => self.clutched_scan(),
            7 => self.slice_consistency(),
            8 => self.hamiltonian_structure(),
            _ => (Status::Fail, format!("unknown criterion {id}"), Value::Null),
        };
        CriterionReport {
            id,
            title: TITLES
                .get(id.wrapping_sub(1))
                .copied()
                .unwrap_or("unknown")
                .to_string(),
            status,
            summary,
            details,
        }
    }

    fn corpus(&self) -> &[FlowEntry] {
        self.corpus.get_or_init(|| {
            let seeds: Vec<u64> = (0..self.scale.seeds).collect();
            par_map(&seeds, self.threads, |&s| {
                corpus_entry(
                    s,
                    self.scale.modes,
                    self.scale.flow_tol,
                    Some(&self.scale.probe),
                )
            })
        })
    }

    fn block_dimensions(&self) -> (Status, String, Value) {
        let mut rng = ChaCha8Rng::seed_from_u64(0xb10c);
        let taus: Vec<Complex64> = (0..self.scale.moduli)
            .map(|_| c(rng.random_range(-0.5..0.5), rng.random_range(0.8..1.5)))
            .collect();
        let mut jobs = Vec::new();
        for (f, r, levels) in &self.scale.block_cases {
            for &k in levels {
                for (j, &tau) in taus.iter().enumerate() {
                    jobs.push((*f, *r, k, j as u64, tau));
                }
            }
        }
        let rows = par_map(&jobs, self.threads, |&(f, r, k, j, tau)| {
            let expected = alcove_count_oracle(f, r, k);
            let opts = WinvOptions {
                seed: j,
                ..Default::default()
            };
            match winv_dimension(&root_system(f, r), k, tau, &opts) {
                Ok(d) => {
                    let ok = d.dimension == expected && d.alcove_count == expected;
                    (
                        Status::from_bool(ok),
                        json!({
                            "group": format!("{f}{r}"), "level": k, "tau": CNum::new(tau, 0.0),
                            "dimension": d.dimension, "alcove_count": d.alcove_count, "expected": expected,
                            "gap_ratio": finite(d.gap_ratio),
                        }),
                    )
                }
                Err(e) => (
                    Status::Inconclusive,
                    json!({"group": format!("{f}{r}"), "level": k, "tau": CNum::new(tau, 0.0), "error": e.to_string()}),
                ),
            }
        });
        let status = rows.iter().fold(Status::Pass, |s, r| s.combine(r.0));
        let ok = rows.iter().filter(|r| r.0 == Status::Pass).count();
        (
            status,
            format!("{ok}/{} (group, level, modulus) cases match", rows.len()),
            json!({ "cases": rows.into_iter().map(|r| r.1).collect::<Vec<_>>() }),
        )
    }

    fn dynkin_indices(&self) -> (Status, String, Value) {
        // Dual Coxeter numbers.
        let table = [
            (Family::A, 1, 2),
            (Family::A, 2, 3),
            (Family::A, 3, 4),
            (Family::B, 2, 3),
            (Family::G, 2, 4),
        ];
        let mut rows = Vec::new();
        let mut status = Status::Pass;
        for (f, r, h) in table {
            let rs = root_system(f, r);
            let got = dynkin_index(&rs, &RepresentationWeights::adjoint(&rs));
            let (ok, shown) = match &got {
                Ok(x) => (*x.numer() == 2 * h && *x.denom() == 1, x.to_string()),
                Err(e) => (false, e.to_string()),
            };
            status = status.combine(Status::from_bool(ok));
            rows.push(json!({"group": format!("{f}{r}"), "rep": "adjoint", "index": shown, "expected": 2 * h}));
        }
        let rs = root_system(Family::A, 1);
        let def = RepresentationWeights::defining(&rs).and_then(|d| dynkin_index(&rs, &d));
        let (ok, shown) = match &def {
            Ok(x) => (*x.numer() == 1 && *x.denom() == 1, x.to_string()),
            Err(e) => (false, e.to_string()),
        };
        status = status.combine(Status::from_bool(ok));
        rows.push(json!({"group": "A1", "rep": "defining", "index": shown, "expected": 1}));
        let ok = rows.len() - usize::from(status != Status::Pass);
        (
            status,
            format!(
                "{} indices checked, all exact: {}",
                rows.len(),
                ok == rows.len()
            ),
            json!({ "cases": rows }),
        )
    }

    fn flow_monotonicity(&self) -> (Status, String, Value) {
        let corpus = self.corpus();
        let n = corpus.len();
        let required = n - (n / 10).max(1);
        let monotone = corpus.iter().all(|e| e.max_increase.value <= 1e-12);
        let converged: Vec<&FlowEntry> = corpus.iter().filter(|e| e.converged).collect();
        let commuting = converged
            .iter()
            .all(|e| e.commutator.is_some_and(|c| c.value < 1e-4));
        let reruns = converged
            .iter()
            .all(|e| e.rerun_distance.is_some_and(|d| d.value < 1e-4));
        let thresholds = converged.iter().all(|e| e.threshold_stable == Some(true));
        let ok = monotone && converged.len() >= required && commuting && reruns && thresholds;
        let worst_rerun = converged
            .iter()
            .filter_map(|e| e.rerun_distance.map(|d| d.value))
            .fold(0.0, f64::max);
        let worst_comm = converged
            .iter()
            .filter_map(|e| e.commutator.map(|d| d.value))
            .fold(0.0, f64::max);
        let worst_inc = corpus
            .iter()
            .map(|e| e.max_increase.value)
            .fold(f64::NEG_INFINITY, f64::max);
        (
            Status::from_bool(ok),
            format!(
                "{}/{n} flat (need {required}); max YM increase {worst_inc:.1e}; max commutator {worst_comm:.1e}; max rerun distance {worst_rerun:.1e}; thresholds stable: {thresholds}",
                converged.len()
            ),
            json!({
                "modes": self.scale.modes,
                "tau": CNum::new(c(0.0, 1.0), 0.0),
                "amplitude": Num::exact(CORPUS_AMPLITUDE),
                "flow_tol": Num::exact(self.scale.flow_tol),
                "decay": Num::exact(CORPUS_DECAY),
                "required_flat": required,
                "monotone": monotone,
                "flows": corpus,
            }),
        )
    }

    fn probe_monotonicity(&self) -> (Status, String, Value) {
        let corpus = self.corpus();
        let mut status = Status::Pass;
        let mut slopes = Vec::new();
        let mut rows = Vec::new();
        for e in corpus.iter().filter(|e| e.converged) {
            let s = match &e.probe {
                None => Status::Inconclusive,
                Some(p) => match p.verdict {
                    ProbeVerdict::Inconclusive => Status::Inconclusive,
                    ProbeVerdict::Decreasing => Status::Fail,
                    ProbeVerdict::NonDecreasing => {
                        let fit_ok = p.slope.is_some_and(|s| s.value > 0.0)
                            && p.r2.is_some_and(|r| r.value > 0.99);
                        if let Some(s) = p.slope {
                            slopes.push(s.value);
                        }
                        Status::from_bool(fit_ok && !p.collapse)
                    }
                },
            };
            status = status.combine(s);
            rows.push(json!({"seed": e.seed, "status": s, "probe": e.probe, "problem": e.problem}));
        }
        if rows.is_empty() {
            status = Status::Inconclusive;
        }
        let mean = slopes.iter().sum::<f64>() / slopes.len().max(1) as f64;
        let spread = slopes.iter().map(|s| (s - mean).abs()).fold(0.0, f64::max);
        (
            status,
            format!(
                "{} converged flows probed; proportionality constant {mean:.4} (spread {spread:.1e})",
                rows.len()
            ),
            json!({
                "twist": CNum::new(PROBE_TWIST, 0.0),
                "rep": "defining",
                "options": {
                    "truncation": self.scale.probe.truncation,
                    "samples": self.scale.probe.samples,
                    "band": Num::exact(self.scale.probe.band),
                    "max_error": Num::exact(self.scale.probe.max_error),
                },
                "proportionality": Num::new(mean, spread),
                "flows": rows,
            }),
        )
    }

    fn regularity_wall(&self) -> (Status, String, Value) {
        let rs = root_system(Family::A, 2);
        let tau = c(0.0, 1.0);
        let w2 = c(0.1, 0.45);
        let truncation = 4;
        let mut status = Status::Pass;
        let mut rows = Vec::new();
        let mut seen = Vec::new();
        for j in 0..10 {
            // α₁(w) = 2w₁ − w₂ = 1 + δ crosses the lattice point 1 at j = 5.
            let delta = 0.05 * (j as f64 - 5.0);
            let w1 = (w2 + 1.0 + delta) / 2.0;
            let w = [w1, w2];
            let expected = if j == 5 { rs.rank + 2 } else { rs.rank };
            let res = adjoint_kernel(&rs, &w, tau, truncation);
            let s = match &res {
                Ok(k) => Status::from_bool(k.h0 == expected && k.h1 == expected),
                Err(_) => Status::Inconclusive,
            };
            status = status.combine(s);
            seen.push(
                res.as_ref()
                    .map(|k| k.h0.to_string())
                    .unwrap_or_else(|_| "?".into()),
            );
            rows.push(json!({
                "w": [CNum::new(w1, 0.0), CNum::new(w2, 0.0)],
                "alpha1": CNum::new(2.0 * w1 - w2, 1e-15),
                "expected_h0": expected,
                "kernel": res.as_ref().map(kernel_json).unwrap_or_else(|e| json!({"error": e.to_string()})),
            }));
        }
        // Dense backend on the wall and next to it.
        let mut dense = Vec::new();
        for j in [4usize, 5] {
            let delta = 0.05 * (j as f64 - 5.0);
            let w = [(w2 + 1.0 + delta) / 2.0, w2];
            let res = cartan_slice(&w, tau, 2)
                .and_then(|conn| {
                    TwistedDolbeault::on_connection(&conn, MatrixRep::Adjoint, c(0.0, 0.0), 3)
                })
                .and_then(|op| kernel_dim(&op, KERNEL_TOL));
            let expected = if j == 5 { rs.rank + 2 } else { rs.rank };
            let s = match &res {
                Ok(k) => Status::from_bool(k.h0 == expected),
                Err(_) => Status::Inconclusive,
            };
            status = status.combine(s);
            dense.push(json!({
                "point": j,
                "expected_h0": expected,
                "kernel": res.as_ref().map(kernel_json).unwrap_or_else(|e| json!({"error": e.to_string()})),
            }));
        }
        (
            status,
            format!("adjoint h0 along the path: [{}]", seen.join(", ")),
            json!({"tau": CNum::new(tau, 0.0), "truncation": truncation, "path": rows, "dense": dense}),
        )
    }

    fn clutched_scan(&self) -> (Status, String, Value) {
        let tau = c(0.0, 1.0);
        let degrees = [2i64, 0, -2];
        let grid = 64;
        let side = self.scale.z_side;
        let mut points = Vec::new();
        for a in 0..side {
            for b in 0..side {
                points.push((a, b));
            }
        }
        let rows = par_map(&points, self.threads, |&(a, b)| {
            let z = (a as f64 + tau * b as f64) / side as f64;
            let res = clutched_dbar(&degrees, z, tau, grid).and_then(|op| {
                let total = op.kernel_dim(KERNEL_TOL)?;
                let summands = op.summand_kernels(KERNEL_TOL)?;
                Ok((total, summands))
            });
            let (s, detail) = match &res {
                Ok((total, summands)) => {
                    let positive = summands.iter().find(|k| k.0.degree == 2).map(|k| k.0.h0);
                    let need = if a == 0 && b == 0 { 2 } else { 1 };
                    // Riemann–Roch on the torus: a degree-d line bundle, d > 0,
                    // has d sections and no H¹.
                    let ok = total.h0 >= need && positive == Some(2);
                    (
                        Status::from_bool(ok),
                        json!({
                            "z": CNum::new(z, 0.0), "h0": total.h0, "h1": total.h1,
                            "gap_ratio": finite(total.gap_ratio),
                            "positive_summand_h0": positive, "required_h0": need,
                        }),
                    )
                }
                Err(e) => (
                    Status::Inconclusive,
                    json!({"z": CNum::new(z, 0.0), "error": e.to_string()}),
                ),
            };
            (s, detail, res.ok().map(|r| r.0.h0))
        });
        let status = rows.iter().fold(Status::Pass, |s, r| s.combine(r.0));
        let h0s: Vec<usize> = rows.iter().filter_map(|r| r.2).collect();
        let min = h0s.iter().min().copied().unwrap_or(0);
        let at_zero = rows.first().and_then(|r| r.2).unwrap_or(0);
        (
            status,
            format!(
                "{}x{side} grid at resolution {grid}: min h0 {min}, h0(z=0) = {at_zero}, Riemann-Roch oracle 2 for the degree-2 summand",
                side
            ),
            json!({
                "degrees": degrees, "grid": grid, "tau": CNum::new(tau, 0.0),
                "riemann_roch_positive": 2,
                "points": rows.into_iter().map(|r| r.1).collect::<Vec<_>>(),
            }),
        )
    }

    fn slice_consistency(&self) -> (Status, String, Value) {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51ce);
        let n = self.scale.samples.min(5);
        let rs = root_system(Family::A, 2);

        // Lattice gauge translation.
        let tau = c(0.35, 1.15);
        let mut translation = 0.0f64;
        for _ in 0..n {
            let w: Vec<Complex64> = (0..2)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let lam: Vec<Complex64> = (0..2)
                .map(|_| rng.random_range(-2..=2) as f64 - tau * rng.random_range(-2..=2) as f64)
                .collect();
            let wl: Vec<Complex64> = w.iter().zip(&lam).map(|(a, b)| a + b).collect();
            let moved = g_lambda(&lam, tau).and_then(|g| gauge_act(&g, &cartan_slice(&w, tau, 3)?));
            let want = cartan_slice(&wl, tau, 3).expect("valid slice");
            let scale = want.a.norm_sq().sqrt().max(1.0);
            translation = translation.max(match moved {
                Ok(m) => m.a.max_abs_diff(&want.a) / scale,
                Err(_) => f64::INFINITY,
            });
        }

        // Holonomy round trip.
        let mut round_trip = 0.0f64;
        for _ in 0..n {
            let tau = c(rng.random_range(-0.4..0.4), rng.random_range(0.8..1.4));
            let w: Vec<Complex64> = (0..2)
                .map(|_| c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)))
                .collect();
            let want = affine_weyl_reduce(&rs, &w, tau).representative;
            let got = cartan_slice(&w, tau, 2)
                .and_then(|conn| classify_terminal(&conn, &Thresholds::default()))
                .ok()
                .and_then(|v| v.alcove);
            round_trip = round_trip.max(match got {
                Some(a) => {
                    let d: f64 = a
                        .iter()
                        .zip(&want)
                        .map(|(x, y)| (x - y).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    let s: f64 = want.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                    d / s.max(1.0)
                }
                None => f64::INFINITY,
            });
        }

        // ζ-determinant invariance under the lattice and the Weyl group.
        let mut invariance = 0.0f64;
        let reps = [
            RepresentationWeights::defining(&rs).expect("su(3) defining"),
            RepresentationWeights::adjoint(&rs),
        ];
        let tau = c(0.2, 1.05);
        let z = c(0.13, 0.29);
        for rep in &reps {
            for _ in 0..n {
                let w: Vec<Complex64> = (0..2)
                    .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let base = zeta_det_slice(&rs, rep, &w, z, tau, false);
                let shifted: Vec<Complex64> = w
                    .iter()
                    .map(|x| {
                        x + rng.random_range(-2..=2) as f64 + tau * rng.random_range(-2..=2) as f64
                    })
                    .collect();
                let g = rng.random_range(0..rs.weyl_order());
                let re: Vec<f64> = w.iter().map(|x| x.re).collect();
                let im: Vec<f64> = w.iter().map(|x| x.im).collect();
                let reflected: Vec<Complex64> = rs
                    .act(g, &re)
                    .into_iter()
                    .zip(rs.act(g, &im))
                    .map(|(a, b)| c(a, b))
                    .collect();
                for other in [shifted, reflected] {
                    let d = match (&base, zeta_det_slice(&rs, rep, &other, z, tau, false)) {
                        (Ok(a), Ok(b)) => rel(a.value, b.value),
                        _ => f64::INFINITY,
                    };
                    invariance = invariance.max(d);
                }
            }
        }

        // Continuation against the extrapolated finite section.
        let a1 = root_system(Family::A, 1);
        let def = RepresentationWeights::defining(&a1).expect("su(2) defining");
        let free = RepresentationWeights {
            weights: vec![(Weight::zero(1), 2)],
        };
        let tau = c(0.0, 1.0);
        let mut cross = Vec::new();
        for w in [c(0.21, 0.37), c(-0.34, 0.12)] {
            let cont = zeta_det_slice(&a1, &def, &[w], PROBE_TWIST, tau, false).and_then(|a| {
                Ok(a.log_value
                    - zeta_det_slice(&a1, &free, &[w], PROBE_TWIST, tau, false)?.log_value)
            });
            let trunc = cartan_slice(&[w], tau, 2)
                .and_then(|conn| {
                    TwistedDolbeault::on_connection(&conn, MatrixRep::Defining, PROBE_TWIST, 12)
                })
                .and_then(|op| {
                    relative_det_truncated(&op, &TwistedDolbeault::free(2, PROBE_TWIST, tau, 12))
                });
            cross.push(match (cont, trunc) {
                (Ok(a), Ok(b)) => json!({
                    "w": CNum::new(w, 0.0),
                    "continuation_log": Num::new(a, 1e-12),
                    "truncated_log": Num::new(b.log_value, b.error),
                    "relative_difference": Num::new((b.log_value - a).exp_m1().abs(), b.error),
                }),
                (a, b) => json!({"w": CNum::new(w, 0.0), "error": format!("{:?} / {:?}", a.err(), b.err())}),
            });
        }
        let cross_max = cross
            .iter()
            .map(|r| {
                r["relative_difference"]["value"]
                    .as_f64()
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max);

        let ok = translation < 1e-8 && round_trip < 1e-8 && invariance < 1e-8 && cross_max < 1e-3;
        (
            Status::from_bool(ok),
            format!(
                "translation {translation:.1e}, round trip {round_trip:.1e}, determinant invariance {invariance:.1e} (all < 1e-8); cross-method {cross_max:.1e} (< 1e-3)"
            ),
            json!({
                "translation_relative": Num::new(translation, 1e-8),
                "round_trip_relative": Num::new(round_trip, 1e-8),
                "invariance_relative": Num::new(invariance, 1e-8),
                "cross_method": cross,
            }),
        )
    }

    fn hamiltonian_structure(&self) -> (Status, String, Value) {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4a11);
        let n = self.scale.samples;
        let h = 1e-5;
        let tau = c(0.15, 1.1);
        let mut moment = 0.0f64;
        for _ in 0..n {
            let conn =
                FourierConnection::random(2, 4, tau, 0.4, 1.5, &mut rng).expect("valid modulus");
            let mut xi = MatrixField::random(2, 3, 0.5, 1.5, &mut rng);
            xi.make_antihermitian();
            xi.make_traceless();
            let b = MatrixField::random(2, 4, 0.5, 1.5, &mut rng);
            let fd = (moment_pairing(&conn.tangent_add(&b, h), &xi)
                - moment_pairing(&conn.tangent_add(&b, -h), &xi))
                / (2.0 * h);
            let exact = symplectic(tau, &fundamental_field(&conn, &xi), &b);
            moment = moment.max(rel(fd, exact));
        }
        let tau = c(-0.1, 0.9);
        let mut gradient = 0.0f64;
        for _ in 0..n {
            let conn =
                FourierConnection::random(3, 3, tau, 0.3, 1.2, &mut rng).expect("valid modulus");
            let b = MatrixField::random(3, 3, 0.5, 1.2, &mut rng);
            let g = ym_gradient(&conn);
            let fd = (yang_mills(&conn.tangent_add(&b, h)) - yang_mills(&conn.tangent_add(&b, -h)))
                / (2.0 * h);
            gradient = gradient.max(rel(fd, kahler_metric(tau, &g, &b)));
        }
        let ok = moment < 1e-6 && gradient < 1e-5;
        (
            Status::from_bool(ok),
            format!("moment map {moment:.1e} (< 1e-6), gradient {gradient:.1e} (< 1e-5) over {n} samples each"),
            json!({
                "samples": n,
                "step": Num::exact(h),
                "moment_map_relative": Num::new(moment, 1e-6),
                "gradient_relative": Num::new(gradient, 1e-5),
            }),
        )
    }
}

/// Number of level-`k` integrable weights, from the comarks of each
/// supported type.
fn alcove_count_oracle(f: Family, r: usize, k: u32) -> usize {
    let k = k as usize;
    match (f, r) {
        (Family::A, 1) => k + 1,
        (Family::A, 2) | (Family::B, 2) => (k + 1) * (k + 2) / 2,
        // 2a + b ≤ k
        (Family::G, 2) => (0..=k / 2).map(|a| k - 2 * a + 1).sum(),
        _ => unreachable!("no oracle for {f}{r}"),
    }
}
