//! Discrete-time identification from sampled input/output records.
//!
//! Model structures, written with polynomials in the backward shift `q^-1`:
//!
//! ```text
//! ARX    A y = B u + e
//! ARMAX  A y = B u + C e
//! BJ     y = (B/F) u + (C/D) e
//! OE     y = (B/F) u + e
//! ```
//!
//! `A, C, D, F` are monic; `B = b_0 q^-nk + ... + b_{nb-1} q^-(nk+nb-1)`.
//! ARX is solved in closed form by QR. The other three minimise the
//! one-step prediction-error sum of squares with a damped Gauss-Newton
//! iteration started from an ARX fit.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fotf::DiscreteTf;
use crate::linalg;
use crate::poly;

/// Uniformly sampled input/output record.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    t: Vec<f64>,
    u: Vec<f64>,
    y: Vec<f64>,
    ts: f64,
}

impl TimeSeries {
    /// Validates equal lengths (at least 2) and uniform spacing to 1e-9 s.
    pub fn new(t: Vec<f64>, u: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != u.len() || t.len() != y.len() {
            return Err(Error::invalid(format!(
                "length mismatch: t {}, u {}, y {}",
                t.len(),
                u.len(),
                y.len()
            )));
        }
        if t.len() < 2 {
            return Err(Error::invalid("time series needs at least two samples"));
        }
        if t.iter().chain(&u).chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("time series contains non-finite values"));
        }
        let ts = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
        if !(ts > 0.0) {
            return Err(Error::invalid("time stamps must increase"));
        }
        for (k, w) in t.windows(2).enumerate() {
            if ((w[1] - w[0]) - ts).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "non-uniform sampling between samples {k} and {}: step {} vs {ts}",
                    k + 1,
                    w[1] - w[0]
                )));
            }
        }
        Ok(TimeSeries { t, u, y, ts })
    }

    /// Record starting at `t = 0` with step `ts`.
    pub fn from_samples(u: Vec<f64>, y: Vec<f64>, ts: f64) -> Result<Self> {
        if !(ts > 0.0) {
            return Err(Error::invalid("sample time must be positive"));
        }
        let t = (0..u.len()).map(|k| k as f64 * ts).collect();
        Self::new(t, u, y)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Estimator family. The derived order (`Arx < Oe < Armax < Bj`) is the
/// tie-break order used when ranking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Arx,
    Oe,
    Armax,
    Bj,
}

impl Structure {
    pub fn as_str(self) -> &'static str {
        match self {
            Structure::Arx => "ARX",
            Structure::Oe => "OE",
            Structure::Armax => "ARMAX",
            Structure::Bj => "BJ",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub structure: Structure,
    #[serde(default)]
    pub na: usize,
    #[serde(default)]
    pub nb: usize,
    #[serde(default)]
    pub nc: usize,
    #[serde(default)]
    pub nd: usize,
    #[serde(default)]
    pub nf: usize,
    #[serde(default)]
    pub nk: usize,
}

impl EstimatorSpec {
    pub fn arx(na: usize, nb: usize, nk: usize) -> Self {
        EstimatorSpec {
            structure: Structure::Arx,
            na,
            nb,
            nc: 0,
            nd: 0,
            nf: 0,
            nk,
        }
    }

    pub fn armax(na: usize, nb: usize, nc: usize, nk: usize) -> Self {
        EstimatorSpec {
            structure: Structure::Armax,
            na,
            nb,
            nc,
            nd: 0,
            nf: 0,
            nk,
        }
    }

    pub fn bj(nb: usize, nc: usize, nd: usize, nf: usize, nk: usize) -> Self {
        EstimatorSpec {
            structure: Structure::Bj,
            na: 0,
            nb,
            nc,
            nd,
            nf,
            nk,
        }
    }

    pub fn oe(nb: usize, nf: usize, nk: usize) -> Self {
        EstimatorSpec {
            structure: Structure::Oe,
            na: 0,
            nb,
            nc: 0,
            nd: 0,
            nf,
            nk,
        }
    }

    /// Rejects orders that the structure does not use.
    pub fn validate(&self) -> Result<()> {
        let unused: &[(&str, usize)] = match self.structure {
            Structure::Arx => &[("nc", self.nc), ("nd", self.nd), ("nf", self.nf)],
            Structure::Armax => &[("nd", self.nd), ("nf", self.nf)],
            Structure::Bj => &[("na", self.na)],
            Structure::Oe => &[("na", self.na), ("nc", self.nc), ("nd", self.nd)],
        };
        if let Some((name, _)) = unused.iter().find(|(_, v)| *v != 0) {
            return Err(Error::invalid(format!(
                "{} does not use order {name}",
                self.structure.as_str()
            )));
        }
        if self.param_count() == 0 {
            return Err(Error::invalid("estimator has no parameters"));
        }
        if self.structure != Structure::Arx && self.nb == 0 {
            return Err(Error::invalid("nb must be at least 1"));
        }
        Ok(())
    }

    /// Number of free parameters `d`.
    pub fn param_count(&self) -> usize {
        self.na + self.nb + self.nc + self.nd + self.nf
    }
}

impl std::fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = self;
        match s.structure {
            Structure::Arx => write!(f, "ARX(na={}, nb={}, nk={})", s.na, s.nb, s.nk),
            Structure::Armax => write!(
                f,
                "ARMAX(na={}, nb={}, nc={}, nk={})",
                s.na, s.nb, s.nc, s.nk
            ),
            Structure::Bj => write!(
                f,
                "BJ(nb={}, nc={}, nd={}, nf={}, nk={})",
                s.nb, s.nc, s.nd, s.nf, s.nk
            ),
            Structure::Oe => write!(f, "OE(nb={}, nf={}, nk={})", s.nb, s.nf, s.nk),
        }
    }
}

/// Outcome of one estimation.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub spec: EstimatorSpec,
    /// Deterministic part `G`.
    pub model: DiscreteTf,
    /// Noise part `H` (`1/A` for ARX, `C/A` for ARMAX, `C/D` for BJ, `1` for OE).
    pub noise_model: DiscreteTf,
    pub theta: Vec<f64>,
    /// Mean squared prediction error over the residuals.
    pub v: f64,
    pub aic: f64,
    pub fpe: f64,
    pub residuals: Vec<f64>,
    /// Loss after each accepted iteration (one entry for ARX).
    pub loss_trace: Vec<f64>,
}

impl FitResult {
    /// `N` used in the information criteria: the residual count.
    pub fn n_samples(&self) -> usize {
        self.residuals.len()
    }
}

/// `ln V + 2 d / N`.
pub fn aic(v: f64, d: usize, n: usize) -> Result<f64> {
    check_criterion_args(v, d, n)?;
    Ok(v.ln() + 2.0 * d as f64 / n as f64)
}

/// `V (1 + d/N) / (1 - d/N)`.
pub fn fpe(v: f64, d: usize, n: usize) -> Result<f64> {
    check_criterion_args(v, d, n)?;
    let r = d as f64 / n as f64;
    Ok(v * (1.0 + r) / (1.0 - r))
}

fn check_criterion_args(v: f64, d: usize, n: usize) -> Result<()> {
    if n <= d {
        return Err(Error::invalid(format!("need N > d, got N = {n}, d = {d}")));
    }
    if !(v > 0.0) {
        return Err(Error::invalid(format!("loss must be positive, got {v}")));
    }
    Ok(())
}

/// First row index where every lag exists.
fn first_row(na: usize, nb: usize, nk: usize) -> usize {
    na.max(if nb > 0 { nk + nb - 1 } else { 0 })
}

/// ARX regression matrix and targets.
///
/// Row for time `t` is `[-y(t-1) .. -y(t-na), u(t-nk) .. u(t-nk-nb+1)]`,
/// starting at the first `t` for which all lags exist.
pub fn build_regressor(
    data: &TimeSeries,
    na: usize,
    nb: usize,
    nk: usize,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = data.len();
    let start = first_row(na, nb, nk);
    if na + nb == 0 {
        return Err(Error::invalid("regressor needs na + nb >= 1"));
    }
    if n <= start {
        return Err(Error::invalid(format!(
            "{n} samples are not enough for na = {na}, nb = {nb}, nk = {nk}"
        )));
    }
    let rows = n - start;
    let (u, y) = (data.u(), data.y());
    let phi = DMatrix::from_fn(rows, na + nb, |r, c| {
        let t = start + r;
        if c < na {
            -y[t - 1 - c]
        } else {
            u[t - nk - (c - na)]
        }
    });
    let target = DVector::from_fn(rows, |r, _| y[start + r]);
    Ok((phi, target))
}

/// Closed-form ARX estimate.
pub fn arx_fit(data: &TimeSeries, spec: &EstimatorSpec) -> Result<FitResult> {
    if spec.structure != Structure::Arx {
        return Err(Error::invalid(format!(
            "arx_fit called with {}",
            spec.structure.as_str()
        )));
    }
    spec.validate()?;
    let (phi, target) = build_regressor(data, spec.na, spec.nb, spec.nk)?;
    let theta = arx_solve(&phi, &target)?;
    let residuals = (&target - &phi * &theta)
        .iter()
        .copied()
        .collect::<Vec<_>>();
    let theta: Vec<f64> = theta.iter().copied().collect();
    finish(spec, theta, residuals, data.ts(), Vec::new())
}

fn arx_solve(phi: &DMatrix<f64>, target: &DVector<f64>) -> Result<DVector<f64>> {
    let dependent = linalg::dependent_columns(phi, 1e-10);
    if !dependent.is_empty() || phi.nrows() < phi.ncols() {
        return Err(Error::RankDeficient { columns: dependent });
    }
    linalg::lstsq_qr(phi, target).ok_or(Error::RankDeficient {
        columns: Vec::new(),
    })
}

/// Polynomials of one parameter vector, all in ascending powers of `q^-1`.
struct Polys {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    f: Vec<f64>,
}

fn monic(tail: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(tail.len() + 1);
    v.push(1.0);
    v.extend_from_slice(tail);
    v
}

/// Parameter layout: ARX `[a, b]`, ARMAX `[a, b, c]`, BJ `[b, c, d, f]`, OE `[b, f]`.
fn unpack(spec: &EstimatorSpec, theta: &[f64]) -> Polys {
    let mut k = 0;
    let mut take = |n: usize| {
        let s = &theta[k..k + n];
        k += n;
        s.to_vec()
    };
    let (a, b, c, d, f) = match spec.structure {
        Structure::Arx => (take(spec.na), take(spec.nb), vec![], vec![], vec![]),
        Structure::Armax => (take(spec.na), take(spec.nb), take(spec.nc), vec![], vec![]),
        Structure::Bj => (
            vec![],
            take(spec.nb),
            take(spec.nc),
            take(spec.nd),
            take(spec.nf),
        ),
        Structure::Oe => (vec![], take(spec.nb), vec![], vec![], take(spec.nf)),
    };
    let mut bq = vec![0.0; spec.nk];
    bq.extend(b);
    Polys {
        a: monic(&a),
        b: bq,
        c: monic(&c),
        d: monic(&d),
        f: monic(&f),
    }
}

fn pack(spec: &EstimatorSpec, p: &Polys) -> Vec<f64> {
    let b = &p.b[spec.nk..];
    let parts: Vec<&[f64]> = match spec.structure {
        Structure::Arx => vec![&p.a[1..], b],
        Structure::Armax => vec![&p.a[1..], b, &p.c[1..]],
        Structure::Bj => vec![b, &p.c[1..], &p.d[1..], &p.f[1..]],
        Structure::Oe => vec![b, &p.f[1..]],
    };
    parts.concat()
}

/// `num(q^-1)/den(q^-1)` applied to `x` with zero initial conditions.
fn filter(num: &[f64], den: &[f64], x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for t in 0..x.len() {
        let mut acc = 0.0;
        for (i, b) in num.iter().enumerate().take(t + 1) {
            acc += b * x[t - i];
        }
        for (i, a) in den.iter().enumerate().skip(1).take(t) {
            acc -= a * y[t - i];
        }
        y[t] = acc / den[0];
    }
    y
}

/// One-step prediction errors `(D/C)(A y - (B/F) u)` over the whole record.
fn prediction_errors(p: &Polys, data: &TimeSeries) -> Vec<f64> {
    let bu = filter(&p.b, &p.f, data.u());
    let ay = filter(&p.a, &[1.0], data.y());
    let w: Vec<f64> = ay.iter().zip(&bu).map(|(a, b)| a - b).collect();
    filter(&p.d, &p.c, &w)
}

/// Reflects roots of a monic polynomial in `q^-1` that lie outside the unit
/// circle (in `z`) to their mirror images `1/conj(r)`.
fn reflect_monic(p: &[f64]) -> Result<Vec<f64>> {
    if p.len() < 2 || p[1..].iter().all(|c| *c == 0.0) {
        return Ok(p.to_vec());
    }
    // z^n + p1 z^(n-1) + ... + pn, ascending in z: [pn, ..., p1, 1]
    let asc: Vec<f64> = p.iter().rev().copied().collect();
    let roots = poly::roots(&asc).map_err(|e| Error::UnstableInit(e.to_string()))?;
    if roots.iter().all(|r| r.norm() < 1.0) {
        return Ok(p.to_vec());
    }
    let mut acc = vec![num_complex::Complex64::new(1.0, 0.0)];
    for r in roots {
        let r = if r.norm() > 1.0 { 1.0 / r.conj() } else { r };
        // multiply by (1 - r q^-1)
        let mut next = acc.clone();
        next.push(num_complex::Complex64::new(0.0, 0.0));
        for i in 1..next.len() {
            next[i] -= r * acc[i - 1];
        }
        acc = next;
    }
    Ok(acc.iter().map(|c| c.re).collect())
}

fn project_stable(spec: &EstimatorSpec, theta: &[f64]) -> Result<Vec<f64>> {
    let mut p = unpack(spec, theta);
    p.f = reflect_monic(&p.f)?;
    p.d = reflect_monic(&p.d)?;
    p.c = reflect_monic(&p.c)?;
    Ok(pack(spec, &p))
}

fn mean_sq(e: &[f64]) -> f64 {
    e.iter().map(|x| x * x).sum::<f64>() / e.len() as f64
}

/// Maximum Gauss-Newton iterations in [`pem_fit`].
pub const PEM_MAX_ITERATIONS: usize = 200;

/// [`pem_fit`] stops once an accepted step lowers the loss by less than this
/// fraction.
pub const PEM_RELATIVE_TOLERANCE: f64 = 1e-9;

/// Prediction-error estimate for ARMAX, BJ and OE.
///
/// Each iteration solves the linearised least-squares step (Jacobian by
/// forward differences), halves the step until the loss decreases, and
/// reflects unstable roots of `C`, `D` and `F` inside the unit circle.
/// The loss trace is non-increasing by construction.
pub fn pem_fit(data: &TimeSeries, spec: &EstimatorSpec) -> Result<FitResult> {
    if spec.structure == Structure::Arx {
        return arx_fit(data, spec);
    }
    spec.validate()?;
    if data.len() <= spec.param_count() + spec.nk {
        return Err(Error::invalid("too few samples for the requested orders"));
    }
    let mut theta = project_stable(spec, &warm_start(data, spec))?;
    let mut eps = prediction_errors(&unpack(spec, &theta), data);
    let mut loss = mean_sq(&eps);
    if !loss.is_finite() {
        return Err(Error::UnstableInit("initial predictor diverges".into()));
    }
    let mut trace = vec![loss];
    let d = theta.len();
    for _ in 0..PEM_MAX_ITERATIONS {
        let n = eps.len();
        let mut jac = DMatrix::zeros(n, d);
        for j in 0..d {
            let h = 1e-7 * theta[j].abs().max(1.0);
            let mut tp = theta.clone();
            tp[j] += h;
            let ep = prediction_errors(&unpack(spec, &tp), data);
            for i in 0..n {
                jac[(i, j)] = (ep[i] - eps[i]) / h;
            }
        }
        let rhs = DVector::from_iterator(n, eps.iter().map(|e| -e));
        let (step, _, _) = linalg::lstsq_svd(&jac, &rhs, 1e-12);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let cand: Vec<f64> = theta
                .iter()
                .zip(step.iter())
                .map(|(t, s)| t + alpha * s)
                .collect();
            let cand = project_stable(spec, &cand)?;
            let e = prediction_errors(&unpack(spec, &cand), data);
            let l = mean_sq(&e);
            if l.is_finite() && l < loss {
                accepted = Some((cand, e, l));
                break;
            }
            alpha *= 0.5;
        }
        let Some((cand, e, l)) = accepted else {
            return finish(spec, theta, eps, data.ts(), trace);
        };
        let rel = (loss - l) / loss.max(f64::MIN_POSITIVE);
        let step_norm = alpha * step.norm();
        theta = cand;
        eps = e;
        loss = l;
        trace.push(l);
        if rel < PEM_RELATIVE_TOLERANCE
            || step_norm < 1e-12 * (1.0 + DVector::from_vec(theta.clone()).norm())
            || l == 0.0
        {
            return finish(spec, theta, eps, data.ts(), trace);
        }
    }
    let best = finish(spec, theta, eps, data.ts(), trace)?;
    Err(Error::NotConverged {
        iterations: PEM_MAX_ITERATIONS,
        best_loss: best.v,
        best: Box::new(best),
    })
}

/// ARX fit of compatible order mapped onto the target structure.
fn warm_start(data: &TimeSeries, spec: &EstimatorSpec) -> Vec<f64> {
    let na = match spec.structure {
        Structure::Armax | Structure::Arx => spec.na,
        Structure::Bj | Structure::Oe => spec.nf,
    };
    let arx = EstimatorSpec::arx(na, spec.nb, spec.nk);
    let (a, b) = match arx_fit(data, &arx) {
        Ok(fit) => (fit.theta[..na].to_vec(), fit.theta[na..].to_vec()),
        Err(_) => (vec![0.0; na], vec![0.0; spec.nb]),
    };
    let p = Polys {
        a: monic(if spec.structure == Structure::Armax {
            &a
        } else {
            &[]
        }),
        b: [vec![0.0; spec.nk], b].concat(),
        c: monic(&vec![0.0; spec.nc]),
        d: monic(&vec![0.0; spec.nd]),
        f: monic(if matches!(spec.structure, Structure::Bj | Structure::Oe) {
            &a
        } else {
            &[]
        }),
    };
    pack(spec, &p)
}

/// Rational function in `q^-1` as a `DiscreteTf` in descending powers of `z`.
fn shift_tf(num: &[f64], den: &[f64], ts: f64) -> Result<DiscreteTf> {
    let l = num.len().max(den.len());
    let pad = |v: &[f64]| {
        let mut w = v.to_vec();
        w.resize(l, 0.0);
        w
    };
    DiscreteTf::new(pad(num), pad(den), ts)
}

fn finish(
    spec: &EstimatorSpec,
    theta: Vec<f64>,
    residuals: Vec<f64>,
    ts: f64,
    mut loss_trace: Vec<f64>,
) -> Result<FitResult> {
    let p = unpack(spec, &theta);
    let (model, noise_model) = match spec.structure {
        Structure::Arx => (shift_tf(&p.b, &p.a, ts)?, shift_tf(&[1.0], &p.a, ts)?),
        Structure::Armax => (shift_tf(&p.b, &p.a, ts)?, shift_tf(&p.c, &p.a, ts)?),
        Structure::Bj => (shift_tf(&p.b, &p.f, ts)?, shift_tf(&p.c, &p.d, ts)?),
        Structure::Oe => (shift_tf(&p.b, &p.f, ts)?, shift_tf(&[1.0], &[1.0], ts)?),
    };
    let v = mean_sq(&residuals);
    if loss_trace.is_empty() {
        loss_trace.push(v);
    }
    let n = residuals.len();
    let d = theta.len();
    if n <= d {
        return Err(Error::invalid(format!(
            "need more residuals ({n}) than parameters ({d})"
        )));
    }
    // an exact fit has V = 0; report ln of the smallest positive double then
    let vv = v.max(f64::MIN_POSITIVE);
    Ok(FitResult {
        spec: *spec,
        model,
        noise_model,
        aic: aic(vv, d, n)?,
        fpe: fpe(vv, d, n)?,
        theta,
        v,
        residuals,
        loss_trace,
    })
}

/// Fits `spec` with the estimator appropriate to its structure.
pub fn fit(data: &TimeSeries, spec: &EstimatorSpec) -> Result<FitResult> {
    match spec.structure {
        Structure::Arx => arx_fit(data, spec),
        _ => pem_fit(data, spec),
    }
}

/// Runs the difference equation of `model` driven by `u`.
///
/// `y0` holds initial output lags `y(-1), y(-2), ...`; missing lags and all
/// inputs before `t = 0` are zero.
pub fn simulate_discrete(model: &DiscreteTf, u: &[f64], y0: &[f64]) -> Vec<f64> {
    let den = model.den();
    let n = den.len();
    let mut num = vec![0.0; n - model.num().len()];
    num.extend_from_slice(model.num());
    let mut y = vec![0.0; u.len()];
    for t in 0..u.len() {
        let mut acc = 0.0;
        for (i, b) in num.iter().enumerate() {
            if i <= t {
                acc += b * u[t - i];
            }
        }
        for (i, a) in den.iter().enumerate().skip(1) {
            let past = if i <= t {
                y[t - i]
            } else {
                y0.get(i - t - 1).copied().unwrap_or(0.0)
            };
            acc -= a * past;
        }
        y[t] = acc / den[0];
    }
    y
}

/// One candidate of a structure sweep.
#[derive(Debug)]
pub struct SweepEntry {
    /// Position in the candidate list.
    pub index: usize,
    pub spec: EstimatorSpec,
    pub outcome: Result<FitResult>,
}

/// Fits every candidate (in parallel) and ranks them.
///
/// Successful fits come first, ordered by AIC, then parameter count, then
/// structure (`ARX < OE < ARMAX < BJ`), then candidate index. Failed fits
/// follow in candidate order.
pub fn structure_sweep(data: &TimeSeries, specs: &[EstimatorSpec]) -> Result<Vec<SweepEntry>> {
    if specs.is_empty() {
        return Err(Error::invalid(
            "structure sweep needs at least one candidate",
        ));
    }
    let mut entries: Vec<SweepEntry> = specs
        .par_iter()
        .enumerate()
        .map(|(index, spec)| SweepEntry {
            index,
            spec: *spec,
            outcome: fit(data, spec),
        })
        .collect();
    entries.sort_by(|a, b| match (&a.outcome, &b.outcome) {
        (Ok(x), Ok(y)) => x
            .aic
            .total_cmp(&y.aic)
            .then(x.theta.len().cmp(&y.theta.len()))
            .then(a.spec.structure.cmp(&b.spec.structure))
            .then(a.index.cmp(&b.index)),
        (Ok(_), Err(_)) => std::cmp::Ordering::Less,
        (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
        (Err(_), Err(_)) => a.index.cmp(&b.index),
    });
    Ok(entries)
}

/// Settings for synthetic step-back records.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegenConfig {
    /// Rod drop as a fraction (0.3 or 0.5 in the case study).
    pub drop_fraction: f64,
    /// Time of the step, seconds.
    pub step_time: f64,
    /// Record length, seconds.
    pub horizon: f64,
    /// Standard deviation of additive white output noise.
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for RegenConfig {
    fn default() -> Self {
        RegenConfig {
            drop_fraction: 0.3,
            step_time: 1.0,
            horizon: 14.0,
            noise_std: 0.0,
            seed: 0,
        }
    }
}

/// Simulated input/output record of a discrete model under a scaled step.
pub fn regenerate(model: &DiscreteTf, cfg: &RegenConfig) -> Result<TimeSeries> {
    let ts = model.ts();
    if !(cfg.horizon > ts) || !(cfg.noise_std >= 0.0) {
        return Err(Error::invalid(
            "horizon must exceed one sample and noise_std must be >= 0",
        ));
    }
    let n = (cfg.horizon / ts).round() as usize + 1;
    let u: Vec<f64> = (0..n)
        .map(|k| {
            if k as f64 * ts >= cfg.step_time - 1e-12 {
                cfg.drop_fraction
            } else {
                0.0
            }
        })
        .collect();
    let mut y = simulate_discrete(model, &u, &[]);
    if cfg.noise_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let normal = Normal::new(0.0, cfg.noise_std).map_err(|e| Error::invalid(e.to_string()))?;
        for v in &mut y {
            *v += normal.sample(&mut rng);
        }
    }
    TimeSeries::from_samples(u, y, ts)
}
