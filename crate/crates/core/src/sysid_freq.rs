//! Levy complex-curve fitting of commensurate fractional models.
//!
//! With `a_0 = 1` the fitting error `E = G D - N` is linear in the unknowns
//! `[b_0..b_m, a_1..a_n]`:
//!
//! ```text
//! sum_k b_k w^k - sum_{k>=1} a_k G w^k = G,    w = (j omega)^q
//! ```
//!
//! Each frequency contributes two real rows (real and imaginary parts).
//! Rows are scaled by `sqrt(w_p)` so the weighted squared error is minimised.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fotf::{jw_power, CommensurateFoTf, FrequencyResponse};
use crate::linalg;
use crate::rational::RationalOrder;

/// Condition numbers above this mark a sweep cell as ill-conditioned.
pub const CONDITION_THRESHOLD: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Uniform,
    Vinagre,
}

impl Weighting {
    pub fn as_str(self) -> &'static str {
        match self {
            Weighting::Uniform => "uniform",
            Weighting::Vinagre => "vinagre",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Sum of the per-frequency normal equations.
    Summed,
    /// One over-determined system solved by SVD (minimum-norm least squares).
    Stacked,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevyProblem {
    pub data: FrequencyResponse,
    /// Highest numerator power of `w`.
    pub m: usize,
    /// Highest denominator power of `w`.
    pub n: usize,
    pub q: RationalOrder,
    pub weighting: Weighting,
    pub aggregation: Aggregation,
}

impl LevyProblem {
    pub fn new(data: FrequencyResponse, m: usize, n: usize, q: RationalOrder) -> Self {
        LevyProblem {
            data,
            m,
            n,
            q,
            weighting: Weighting::Uniform,
            aggregation: Aggregation::Stacked,
        }
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }

    pub fn with_aggregation(mut self, aggregation: Aggregation) -> Self {
        self.aggregation = aggregation;
        self
    }

    pub fn unknowns(&self) -> usize {
        self.m + self.n + 1
    }

    /// Per-frequency weights for the chosen weighting.
    pub fn weights(&self) -> Result<Vec<f64>> {
        match self.weighting {
            Weighting::Uniform => Ok(vec![1.0; self.data.len()]),
            Weighting::Vinagre => vinagre_weights(self.data.omegas()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevyFit {
    /// Fitted model, `a_0 = 1`.
    pub model: CommensurateFoTf,
    pub m: usize,
    pub n: usize,
    /// Mean squared response error.
    pub j: f64,
    /// 2-norm condition number of the solved system (the column-equilibrated
    /// stacked matrix, or the summed normal matrix).
    pub condition: f64,
    /// `|G - G_hat|^2` at each data frequency.
    pub residual_by_freq: Vec<f64>,
    /// Stacked system was rank deficient; the minimum-norm solution was used.
    pub degenerate: bool,
}

/// `w_1 = (w2-w1)/(2 w1^2)`, `w_p = (w_{p+1}-w_{p-1})/(2 w_p^2)`,
/// `w_f = (w_f-w_{f-1})/(2 w_f^2)`.
pub fn vinagre_weights(omegas: &[f64]) -> Result<Vec<f64>> {
    let f = omegas.len();
    if f < 2 {
        return Err(Error::invalid(
            "Vinagre weights need at least two frequencies",
        ));
    }
    if omegas.iter().any(|w| !(*w > 0.0)) || omegas.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::invalid(
            "frequencies must be positive and strictly increasing",
        ));
    }
    Ok((0..f)
        .map(|p| {
            let (lo, hi) = (omegas[p.saturating_sub(1)], omegas[(p + 1).min(f - 1)]);
            (hi - lo) / (2.0 * omegas[p] * omegas[p])
        })
        .collect())
}

/// The two weighted rows and right-hand sides contributed by frequency `p`.
pub fn levy_rows(problem: &LevyProblem, p: usize) -> Result<(DMatrix<f64>, [f64; 2])> {
    let weights = problem.weights()?;
    Ok(rows_with_weight(problem, p, weights[p].sqrt()))
}

fn rows_with_weight(problem: &LevyProblem, p: usize, scale: f64) -> (DMatrix<f64>, [f64; 2]) {
    let omega = problem.data.omegas()[p];
    let g = problem.data.values()[p];
    let q = problem.q.value();
    let mut rows = DMatrix::zeros(2, problem.unknowns());
    for k in 0..=problem.m {
        let b = jw_power(omega, k as f64 * q);
        rows[(0, k)] = scale * b.re;
        rows[(1, k)] = scale * b.im;
    }
    for k in 1..=problem.n {
        let a = -g * jw_power(omega, k as f64 * q);
        rows[(0, problem.m + k)] = scale * a.re;
        rows[(1, problem.m + k)] = scale * a.im;
    }
    (rows, [scale * g.re, scale * g.im])
}

fn stacked_system(problem: &LevyProblem) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let weights = problem.weights()?;
    let f = problem.data.len();
    let mut a = DMatrix::zeros(2 * f, problem.unknowns());
    let mut b = DVector::zeros(2 * f);
    for (p, w) in weights.iter().enumerate() {
        let (rows, rhs) = rows_with_weight(problem, p, w.sqrt());
        a.rows_mut(2 * p, 2).copy_from(&rows);
        b[2 * p] = rhs[0];
        b[2 * p + 1] = rhs[1];
    }
    Ok((a, b))
}

/// Solves the Levy least-squares problem.
pub fn solve_levy(problem: &LevyProblem) -> Result<LevyFit> {
    if problem.data.is_empty() {
        return Err(Error::invalid("Levy fit needs at least one frequency"));
    }
    let (a, b) = stacked_system(problem)?;
    let (x, condition, degenerate) = match problem.aggregation {
        Aggregation::Stacked => {
            // equilibrate columns; the minimiser is unchanged on full-rank problems
            let scales: Vec<f64> = (0..a.ncols())
                .map(|j| {
                    let n = a.column(j).norm();
                    if n > 0.0 {
                        n
                    } else {
                        1.0
                    }
                })
                .collect();
            let mut scaled = a.clone();
            for (j, s) in scales.iter().enumerate() {
                scaled.column_mut(j).unscale_mut(*s);
            }
            let rcond = f64::EPSILON * a.nrows().max(a.ncols()) as f64;
            let (y, cond, degenerate) = linalg::lstsq_svd(&scaled, &b, rcond);
            let x = DVector::from_iterator(y.len(), y.iter().zip(&scales).map(|(v, s)| v / s));
            (x, cond, degenerate)
        }
        Aggregation::Summed => {
            // sum over frequencies of the 2-row blocks' normal equations
            let mut m = DMatrix::zeros(a.ncols(), a.ncols());
            let mut r = DVector::zeros(a.ncols());
            for p in 0..problem.data.len() {
                let blk = a.rows(2 * p, 2);
                m += blk.transpose() * blk;
                r += blk.transpose() * b.rows(2 * p, 2);
            }
            let eig = m.clone().symmetric_eigen();
            let (lmax, lmin) = eig
                .eigenvalues
                .iter()
                .fold((0.0f64, f64::INFINITY), |(hi, lo), v| {
                    (hi.max(v.abs()), lo.min(v.abs()))
                });
            let cond = if lmin > 0.0 {
                lmax / lmin
            } else {
                f64::INFINITY
            };
            if !(cond < 1.0 / f64::EPSILON) {
                return Err(Error::SingularSummed);
            }
            let x = match m.clone().cholesky() {
                Some(ch) => ch.solve(&r),
                None => m.lu().solve(&r).ok_or(Error::SingularSummed)?,
            };
            (x, cond, false)
        }
    };
    let num = x.rows(0, problem.m + 1).iter().copied().collect();
    let mut den = vec![1.0];
    den.extend(x.rows(problem.m + 1, problem.n).iter());
    let model = CommensurateFoTf::new(problem.q, num, den)?;
    let (j, residual_by_freq) = accuracy_j(&problem.data, &model)?;
    Ok(LevyFit {
        model,
        m: problem.m,
        n: problem.n,
        j,
        condition,
        residual_by_freq,
        degenerate,
    })
}

/// `(1/n) sum |G(j w_i) - G_hat(j w_i)|^2` and the per-frequency terms.
pub fn accuracy_j(data: &FrequencyResponse, model: &CommensurateFoTf) -> Result<(f64, Vec<f64>)> {
    let res = data
        .omegas()
        .iter()
        .zip(data.values())
        .map(|(w, g)| Ok((g - model.eval(*w)?).norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    let j = res.iter().sum::<f64>() / res.len() as f64;
    Ok((j, res))
}

/// Orders used for a given base: `top / q`, or `floor(top)` for an integer
/// base that does not divide `top` (the plain integer-order ladder).
pub fn sweep_orders(top: RationalOrder, q: RationalOrder) -> Result<usize> {
    if let Some(k) = top.multiple_of(&q) {
        return Ok(k as usize);
    }
    if q.is_integer() && top.floor_div(&q) > 0 {
        return Ok(top.floor_div(&q) as usize);
    }
    Err(Error::invalid(format!(
        "commensurate order {q} does not divide the top order {top}"
    )))
}

/// One cell of a commensurate-order sweep.
#[derive(Debug)]
pub struct SweepCell {
    pub q: RationalOrder,
    pub weighting: Weighting,
    pub m: usize,
    pub n: usize,
    pub outcome: Result<LevyFit>,
}

impl SweepCell {
    pub fn ill_conditioned(&self) -> bool {
        matches!(&self.outcome, Ok(f) if f.condition > CONDITION_THRESHOLD)
    }
}

/// Fits every `q` with both weightings. Orders follow [`sweep_orders`]
/// with separate numerator and denominator tops. The result lists the cells
/// in input order, uniform before Vinagre for each `q`.
pub fn q_sweep(
    data: &FrequencyResponse,
    num_top: RationalOrder,
    den_top: RationalOrder,
    qs: &[RationalOrder],
    aggregation: Aggregation,
) -> Result<Vec<SweepCell>> {
    if qs.is_empty() {
        return Err(Error::invalid("empty commensurate-order list"));
    }
    let orders = qs
        .iter()
        .map(|q| Ok((*q, sweep_orders(num_top, *q)?, sweep_orders(den_top, *q)?)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(RationalOrder, usize, usize, Weighting)> = orders
        .iter()
        .flat_map(|(q, m, n)| [Weighting::Uniform, Weighting::Vinagre].map(|w| (*q, *m, *n, w)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|(q, m, n, w)| {
            let problem = LevyProblem::new(data.clone(), *m, *n, *q)
                .with_weighting(*w)
                .with_aggregation(aggregation);
            SweepCell {
                q: *q,
                weighting: *w,
                m: *m,
                n: *n,
                outcome: solve_levy(&problem),
            }
        })
        .collect())
}

/// One sample of an order distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrderPoint {
    /// Order `k q` of the power of `s`.
    pub order: f64,
    pub num: Option<f64>,
    pub den: Option<f64>,
}

/// Signed coefficients against their orders, `k = 0..=max(m, n)`.
pub fn order_distribution(fit: &LevyFit) -> Vec<OrderPoint> {
    distribution(&fit.model, fit.m, fit.n)
}

/// Order distribution of any model, using its own degrees.
pub fn order_distribution_of(model: &CommensurateFoTf) -> Vec<OrderPoint> {
    distribution(
        model,
        model.num().len().saturating_sub(1),
        model.den().len() - 1,
    )
}

fn distribution(model: &CommensurateFoTf, m: usize, n: usize) -> Vec<OrderPoint> {
    let q = model.q().value();
    (0..=m.max(n))
        .map(|k| OrderPoint {
            order: k as f64 * q,
            num: (k <= m).then(|| model.num().get(k).copied().unwrap_or(0.0)),
            den: (k <= n).then(|| model.den().get(k).copied().unwrap_or(0.0)),
        })
        .collect()
}

/// Response of a fractional model on a grid, as data for fitting.
pub fn fo_response(model: &CommensurateFoTf, grid: &[f64]) -> Result<FrequencyResponse> {
    let values = grid
        .iter()
        .map(|w| model.eval(*w))
        .collect::<Result<Vec<Complex64>>>()?;
    FrequencyResponse::new(grid.to_vec(), values)
}

/// Random stable model of order at most `top` in `w = s^q`, for
/// recovery self-tests.
///
/// Denominator roots are placed at modulus `[0.5, 2]` and argument between
/// `90 q + 10` and `180` degrees (conjugate pairs plus negative reals), so the
/// model is stable. Numerator coefficients are uniform in `[-1, 1]` with
/// degree at most the denominator degree.
pub fn random_stable_model(
    seed: u64,
    q: RationalOrder,
    top: RationalOrder,
) -> Result<CommensurateFoTf> {
    let max_n = sweep_orders(top, q)?;
    if max_n == 0 {
        return Err(Error::invalid("top order must be at least q"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let lo = (90.0 * q.value() + 10.0).to_radians();
    // ascending coefficients, built as a product of monic factors
    let mut den = vec![1.0];
    let mut left = n;
    while left > 0 {
        let r = rng.gen_range(0.5..2.0);
        if left >= 2 && rng.gen_bool(0.7) {
            let a: f64 = rng.gen_range(lo..std::f64::consts::PI);
            den = crate::poly::mul(&den, &[r * r, -2.0 * r * a.cos(), 1.0]);
            left -= 2;
        } else {
            den = crate::poly::mul(&den, &[r, 1.0]);
            left -= 1;
        }
    }
    let a0 = den[0];
    den.iter_mut().for_each(|c| *c /= a0);
    let m = rng.gen_range(0..=n);
    let mut num: Vec<f64> = (0..=m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    if num[0].abs() < 0.1 {
        num[0] = 0.5;
    }
    CommensurateFoTf::new(q, num, den)
}
