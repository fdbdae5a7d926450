//! Continuous-order PID-like controllers and pole-angle tuning.
//!
//! The controller is
//!
//! ```text
//! C(s) = (K_0 s^{N q} + K_1 s^{(N-1) q} + ... + K_N) / s
//! ```
//!
//! with an integer-order integrator. Tuning drives every closed-loop root of
//! every plant towards a target argument in the `w = s^q` plane (by default
//! `180 q` degrees, the edge of the hyper-damped region) with a multi-start
//! Nelder-Mead search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fotf::{closed_loop_char_poly, CommensurateFoTf};
use crate::rational::RationalOrder;
use crate::wplane::WPlanePoleSet;

/// Objective value returned when the root finder fails.
pub const OBJECTIVE_SENTINEL: f64 = 1e12;

/// Weight of the stability-cone penalty in [`objective_jbar`].
pub const CONE_PENALTY: f64 = 1e3;

/// Angular slack, degrees, when deciding that a pole is hyper-damped.
pub const HYPERDAMPED_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousOrderPid {
    q: RationalOrder,
    gains: Vec<f64>,
}

impl ContinuousOrderPid {
    /// `gains` are `K_0..K_N`, descending from `s^{N q}` to `s^0`.
    pub fn new(q: RationalOrder, gains: Vec<f64>) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::invalid("controller needs at least one gain"));
        }
        if gains.iter().any(|g| !g.is_finite()) {
            return Err(Error::invalid("controller gains must be finite"));
        }
        Ok(ContinuousOrderPid { q, gains })
    }

    pub fn q(&self) -> RationalOrder {
        self.q
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// `N`, the index of the constant gain.
    pub fn top_index(&self) -> usize {
        self.gains.len() - 1
    }
}

/// Transfer function of the controller.
///
/// The integrator `s` is expressed as a power of the base `gcd(q, 1)`. All
/// zero gains give the zero transfer function `0/1`.
pub fn controller_tf(c: &ContinuousOrderPid) -> Result<CommensurateFoTf> {
    let base = c.q.gcd(&RationalOrder::ONE);
    if c.gains.iter().all(|g| *g == 0.0) {
        return CommensurateFoTf::new(base, Vec::new(), vec![1.0]);
    }
    let step =
        c.q.multiple_of(&base)
            .expect("q is a multiple of gcd(q, 1)") as usize;
    let s_power = RationalOrder::ONE
        .multiple_of(&base)
        .expect("1 is a multiple of gcd(q, 1)") as usize;
    let n = c.top_index();
    let mut num = vec![0.0; n * step + 1];
    for (i, g) in c.gains.iter().enumerate() {
        num[(n - i) * step] = *g;
    }
    let mut den = vec![0.0; s_power + 1];
    den[s_power] = 1.0;
    CommensurateFoTf::new(base, num, den)
}

/// Classified roots of `D_C D_G + N_C N_G`.
pub fn closed_loop_poles(
    plant: &CommensurateFoTf,
    controller: &CommensurateFoTf,
) -> Result<WPlanePoleSet> {
    let (q, p) = closed_loop_char_poly(plant, controller)?;
    if p.len() < 2 {
        return Ok(WPlanePoleSet {
            q,
            poles: Vec::new(),
        });
    }
    WPlanePoleSet::from_polynomial(q, &p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NelderMeadConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Relative initial step per coordinate.
    pub step_fraction: f64,
    /// Initial step for coordinates that start at zero.
    pub zero_step: f64,
    /// Stop when every vertex lies within this distance of the best one...
    pub x_tolerance: f64,
    /// ...and the objective spread is below this.
    pub f_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            step_fraction: 0.05,
            zero_step: 0.00025,
            x_tolerance: 1e-8,
            f_tolerance: 1e-10,
            max_iterations: 5000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    /// Best objective after each iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Derivative-free simplex minimisation.
pub fn nelder_mead<F>(f: F, x0: &[f64], cfg: &NelderMeadConfig) -> Result<NelderMeadResult>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    if dim == 0 {
        return Err(Error::invalid("nelder_mead needs at least one coordinate"));
    }
    let f0 = f(x0);
    if !f0.is_finite() {
        return Err(Error::invalid(
            "objective is not finite at the initial point",
        ));
    }
    let mut evaluations = 1;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] = if x[i] != 0.0 {
            x[i] * (1.0 + cfg.step_fraction)
        } else {
            cfg.zero_step
        };
        let v = eval(&x);
        simplex.push((x, v));
    }
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| dist(x, &simplex[0].0))
            .fold(0.0, f64::max);
        if diameter < cfg.x_tolerance && (worst - best).abs() < cfg.f_tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(cfg.reflection);
        let fr = eval(&xr);
        if fr < best {
            let xe = along(cfg.reflection * cfg.expansion);
            let fe = eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst {
                let xc = along(cfg.reflection * cfg.contraction);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-cfg.contraction);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(worst) {
                simplex[dim] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = x_best
                        .iter()
                        .zip(&v.0)
                        .map(|(b, xi)| b + cfg.shrink * (xi - b))
                        .collect();
                    let fx = eval(&x);
                    *v = (x, fx);
                }
            }
        }
        let cur = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        trace.push(cur);
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    Ok(NelderMeadResult {
        x,
        f: fx,
        trace,
        iterations,
        evaluations,
        converged,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuningProblem {
    pub plants: Vec<CommensurateFoTf>,
    /// Base order of the controller ladder.
    pub q: RationalOrder,
    /// Number of gains `N + 1`.
    pub gain_count: usize,
    /// Target `|arg|` in degrees for every closed-loop root.
    pub target_angle_deg: f64,
    pub simplex: NelderMeadConfig,
    pub restarts: usize,
    pub seed: u64,
    /// Unperturbed starting gains; all `1e-4` when `None`.
    pub initial_gains: Option<Vec<f64>>,
}

impl TuningProblem {
    /// Defaults: target `180 q`, 10 restarts, seed 0.
    pub fn new(plants: Vec<CommensurateFoTf>, q: RationalOrder, gain_count: usize) -> Self {
        TuningProblem {
            plants,
            q,
            gain_count,
            target_angle_deg: 180.0 * q.value(),
            simplex: NelderMeadConfig::default(),
            restarts: 10,
            seed: 0,
            initial_gains: None,
        }
    }

    /// Base order shared by the plants and the controller.
    pub fn shared_q(&self) -> RationalOrder {
        let c = self.q.gcd(&RationalOrder::ONE);
        self.plants.iter().fold(c, |acc, p| acc.gcd(&p.q()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.plants.is_empty() {
            return Err(Error::invalid("tuning needs at least one plant"));
        }
        if self.gain_count == 0 {
            return Err(Error::invalid("controller needs at least one gain"));
        }
        let q = self.shared_q().value();
        if !(self.target_angle_deg > 90.0 * q && self.target_angle_deg < 180.0) {
            return Err(Error::invalid(format!(
                "target angle {} must lie in ({}, 180) degrees",
                self.target_angle_deg,
                90.0 * q
            )));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if let Some(g) = &self.initial_gains {
            if g.len() != self.gain_count {
                return Err(Error::invalid(
                    "initial gain count does not match gain_count",
                ));
            }
        }
        Ok(())
    }
}

/// Euclidean norm over all closed-loop roots of all plants of
/// `|arg| - target`. Roots inside the instability cone `|arg| < 90 q` add
/// `CONE_PENALTY * (90 q - |arg|)` to the magnitude of their deviation.
pub fn objective_jbar(gains: &[f64], problem: &TuningProblem) -> f64 {
    let Ok(c) = ContinuousOrderPid::new(problem.q, gains.to_vec()) else {
        return OBJECTIVE_SENTINEL;
    };
    let Ok(ctf) = controller_tf(&c) else {
        return OBJECTIVE_SENTINEL;
    };
    let mut sum = 0.0;
    for plant in &problem.plants {
        match closed_loop_poles(plant, &ctf) {
            Ok(set) => sum += angle_deviation_sq(&set, problem.target_angle_deg),
            Err(_) => return OBJECTIVE_SENTINEL,
        }
    }
    let v = sum.sqrt();
    if v.is_finite() {
        v
    } else {
        OBJECTIVE_SENTINEL
    }
}

fn angle_deviation_sq(set: &WPlanePoleSet, target: f64) -> f64 {
    let cone = 90.0 * set.q.value();
    set.poles
        .iter()
        .map(|p| {
            let a = p.argument_deg.abs();
            let mut d = a - target;
            if a < cone {
                d = d.abs() + CONE_PENALTY * (cone - a);
            }
            d * d
        })
        .sum()
}

/// Closed-loop analysis of one controller against a set of plants.
#[derive(Clone, Debug, PartialEq)]
pub struct TuningReport {
    pub controller: ContinuousOrderPid,
    /// Objective with the target `180 q` (or the problem target when tuned).
    pub objective: f64,
    pub pole_sets: Vec<WPlanePoleSet>,
    /// Smallest `|arg|` per plant, degrees.
    pub min_angles: Vec<f64>,
    /// Every pole of every plant has `|arg| >= 180 q - HYPERDAMPED_TOLERANCE`.
    pub all_hyperdamped: bool,
    /// Every pole of every plant has `|arg| > 90 q`.
    pub stable: bool,
    /// Best objective per Nelder-Mead iteration of the selected run.
    pub trace: Vec<f64>,
    pub converged: bool,
    /// Restart that produced the controller, and every restart's objective.
    pub restart_index: usize,
    pub restart_objectives: Vec<f64>,
}

impl TuningReport {
    pub fn min_angle(&self) -> f64 {
        self.min_angles.iter().cloned().fold(180.0, f64::min)
    }
}

/// Closed-loop pole report without optimisation.
pub fn verify(
    controller: &ContinuousOrderPid,
    plants: &[CommensurateFoTf],
) -> Result<TuningReport> {
    if plants.is_empty() {
        return Err(Error::invalid("verification needs at least one plant"));
    }
    let ctf = controller_tf(controller)?;
    let pole_sets = plants
        .iter()
        .map(|p| closed_loop_poles(p, &ctf))
        .collect::<Result<Vec<_>>>()?;
    let min_angles: Vec<f64> = pole_sets.iter().map(|s| s.min_abs_argument()).collect();
    let all_hyperdamped = pole_sets.iter().all(|s| {
        let edge = 180.0 * s.q.value() - HYPERDAMPED_TOLERANCE;
        s.poles.iter().all(|p| p.argument_deg.abs() >= edge)
    });
    let stable = pole_sets.iter().all(|s| s.is_stable());
    let objective = pole_sets
        .iter()
        .map(|s| angle_deviation_sq(s, 180.0 * s.q.value()))
        .sum::<f64>()
        .sqrt();
    Ok(TuningReport {
        controller: controller.clone(),
        objective,
        pole_sets,
        min_angles,
        all_hyperdamped,
        stable,
        trace: Vec::new(),
        converged: true,
        restart_index: 0,
        restart_objectives: Vec::new(),
    })
}

/// Multi-start tuning.
///
/// Restart `r` starts from the initial gains multiplied by independent
/// uniform factors in `[0.5, 1.5]` drawn from a ChaCha8 stream seeded with
/// `seed`. Runs execute in parallel; the winner is the hyper-damped run with
/// the smallest objective, or the smallest objective overall if none is
/// hyper-damped, ties going to the lower restart index.
pub fn tune(problem: &TuningProblem) -> Result<TuningReport> {
    problem.validate()?;
    let base = problem
        .initial_gains
        .clone()
        .unwrap_or_else(|| vec![1e-4; problem.gain_count]);
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let starts: Vec<Vec<f64>> = (0..problem.restarts)
        .map(|_| base.iter().map(|g| g * rng.gen_range(0.5..=1.5)).collect())
        .collect();
    let runs: Vec<Option<(NelderMeadResult, TuningReport)>> = starts
        .par_iter()
        .map(|x0| {
            let nm = nelder_mead(|x| objective_jbar(x, problem), x0, &problem.simplex).ok()?;
            if nm.f >= OBJECTIVE_SENTINEL {
                return None;
            }
            let c = ContinuousOrderPid::new(problem.q, nm.x.clone()).ok()?;
            let report = verify(&c, &problem.plants).ok()?;
            Some((nm, report))
        })
        .collect();
    let restart_objectives: Vec<f64> = runs
        .iter()
        .map(|r| r.as_ref().map_or(f64::INFINITY, |(nm, _)| nm.f))
        .collect();
    let pick = |want_hyper: bool| {
        runs.iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().map(|r| (i, r)))
            .filter(|(_, (_, rep))| !want_hyper || rep.all_hyperdamped)
            .min_by(|a, b| a.1 .0.f.total_cmp(&b.1 .0.f).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
    };
    let idx = pick(true)
        .or_else(|| pick(false))
        .ok_or(Error::RootsNotConverged {
            iterations: 0,
            residual: f64::NAN,
        })?;
    let (nm, mut report) = runs[idx].clone().expect("selected run exists");
    report.objective = nm.f;
    report.trace = nm.trace;
    report.converged = nm.converged;
    report.restart_index = idx;
    report.restart_objectives = restart_objectives;
    Ok(report)
}
