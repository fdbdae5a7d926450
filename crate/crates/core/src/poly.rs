//! Real polynomials in ascending coefficient order and an Aberth–Ehrlich
//! simultaneous root finder.
//!
//! Every routine here takes `coeffs[k]` as the coefficient of `x^k`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Drops trailing (highest-power) zeros. A zero polynomial becomes `[]`.
pub fn trim(coeffs: &[f64]) -> &[f64] {
    let end = coeffs.iter().rposition(|c| *c != 0.0).map_or(0, |i| i + 1);
    &coeffs[..end]
}

pub fn degree(coeffs: &[f64]) -> Option<usize> {
    trim(coeffs).len().checked_sub(1)
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn eval_complex(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Tuning knobs for [`roots_with`].
#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Relative correction size below which a root is considered converged.
    pub step_tolerance: f64,
    /// Residual acceptance: `|p(r)| <= residual_tolerance * max|c| * max(1,|r|)^deg`.
    pub residual_tolerance: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            max_iterations: 500,
            step_tolerance: 4.0 * f64::EPSILON,
            residual_tolerance: 1e-8,
        }
    }
}

/// All roots of a real polynomial, with default options.
pub fn roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    roots_with(coeffs, RootOptions::default())
}

/// All `deg` roots of a real polynomial given in ascending order.
///
/// Exact zero roots (vanishing low-order coefficients) are split off first;
/// the rest are found by Aberth–Ehrlich iteration started from the
/// Newton-polygon circles of the coefficient moduli, then Newton-polished
/// and forced into exact conjugate pairs.
pub fn roots_with(coeffs: &[f64], opts: RootOptions) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("polynomial has non-finite coefficients"));
    }
    let p = trim(coeffs);
    if p.is_empty() {
        return Err(Error::invalid("zero polynomial has no well-defined roots"));
    }
    if p.len() == 1 {
        return Err(Error::invalid(
            "constant polynomial: need a nonzero coefficient beyond the constant term",
        ));
    }
    let zeros = p.iter().position(|c| *c != 0.0).unwrap();
    let reduced = &p[zeros..];
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if reduced.len() > 1 {
        out.extend(aberth(reduced, opts)?);
    }
    check_residuals(p, &out, opts.residual_tolerance)?;
    sort_roots(&mut out);
    Ok(out)
}

fn aberth(p: &[f64], opts: RootOptions) -> Result<Vec<Complex64>> {
    let n = p.len() - 1;
    if n == 1 {
        return Ok(vec![Complex64::new(-p[0] / p[1], 0.0)]);
    }
    let scale = p.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let a: Vec<f64> = p.iter().map(|c| c / scale).collect();
    let da: Vec<f64> = (1..=n).map(|k| k as f64 * a[k]).collect();
    let rev: Vec<f64> = a.iter().rev().copied().collect();
    let drev: Vec<f64> = (1..=n).map(|k| k as f64 * rev[k]).collect();

    let mut z = initial_guesses(&a);
    let mut done = vec![false; n];
    let mut iterations = 0;
    while iterations < opts.max_iterations && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, at_noise) = newton_ratio(&a, &da, &rev, &drev, z[i]);
            if ratio.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    repulsion += (z[i] - zj).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // Coincident iterates; nudge off the collision deterministically.
                let bump = Complex64::new(1e-8, 1e-8) * z[i].norm().max(1.0);
                z[i] += bump;
                continue;
            }
            z[i] -= step;
            if at_noise || step.norm() <= opts.step_tolerance * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
    }

    for zi in z.iter_mut() {
        polish(&a, &da, &rev, &drev, zi);
    }
    pair_conjugates(&mut z);
    Ok(z)
}

/// `p(z)/p'(z)`, evaluated through the reversed polynomial when `|z| > 1`
/// so that large roots do not overflow. The flag is set when `|p(z)|` is
/// within a small multiple of the Horner rounding bound, i.e. no further
/// progress is possible.
fn newton_ratio(
    a: &[f64],
    da: &[f64],
    rev: &[f64],
    drev: &[f64],
    z: Complex64,
) -> (Complex64, bool) {
    let n = (a.len() - 1) as f64;
    if z.norm() <= 1.0 {
        let (pv, bound) = eval_with_bound(a, z);
        let dv = eval_complex(da, z);
        (pv / dv, pv.norm() <= bound)
    } else {
        let y = z.inv();
        let (qv, bound) = eval_with_bound(rev, y);
        let dq = eval_complex(drev, y);
        // p(z) = z^n q(1/z), p'(z) = z^(n-1) (n q(y) - y q'(y))
        (z * qv / (qv * n - y * dq), qv.norm() <= bound)
    }
}

fn eval_with_bound(c: &[f64], z: Complex64) -> (Complex64, f64) {
    let r = z.norm();
    let mut v = Complex64::new(0.0, 0.0);
    let mut m = 0.0;
    for x in c.iter().rev() {
        v = v * z + x;
        m = m * r + x.abs();
    }
    (v, 4.0 * c.len() as f64 * f64::EPSILON * m)
}

fn polish(a: &[f64], da: &[f64], rev: &[f64], drev: &[f64], z: &mut Complex64) {
    let residual = |w: Complex64| scaled_residual(a, w);
    let mut best = residual(*z);
    for _ in 0..3 {
        let (ratio, _) = newton_ratio(a, da, rev, drev, *z);
        let cand = *z - ratio;
        if !cand.re.is_finite() || !cand.im.is_finite() {
            break;
        }
        let r = residual(cand);
        if r < best {
            best = r;
            *z = cand;
        } else {
            break;
        }
    }
}

fn scaled_residual(a: &[f64], z: Complex64) -> f64 {
    let n = (a.len() - 1) as i32;
    if z.norm() <= 1.0 {
        eval_complex(a, z).norm()
    } else {
        let rev: Vec<f64> = a.iter().rev().copied().collect();
        eval_complex(&rev, z.inv()).norm() * z.norm().powi(n)
    }
}

/// Starting points on the circles of the upper Newton polygon of
/// `(k, ln|a_k|)`: each hull edge from `i` to `j` contributes `j - i`
/// points on a circle of radius `(|a_i|/|a_j|)^(1/(j-i))`.
fn initial_guesses(a: &[f64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let pts: Vec<(usize, f64)> = a
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| (k, c.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - x1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma = 0.7;
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, yi) = w[0];
        let (j, yj) = w[1];
        let count = j - i;
        let radius = ((yi - yj) / count as f64).exp();
        for m in 0..count {
            let angle =
                2.0 * std::f64::consts::PI * (m as f64 / count as f64 + i as f64 / n as f64)
                    + sigma;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    out
}

/// Replaces each nonreal root and its nearest conjugate partner by an exact
/// conjugate pair, and snaps numerically real roots onto the real axis.
fn pair_conjugates(z: &mut [Complex64]) {
    let n = z.len();
    let mut matched = vec![false; n];
    for i in 0..n {
        if matched[i] {
            continue;
        }
        let zi = z[i];
        let scale = zi.norm().max(f64::MIN_POSITIVE);
        let mut partner = None;
        let mut best = f64::INFINITY;
        for j in 0..n {
            if j == i || matched[j] {
                continue;
            }
            let d = (z[j] - zi.conj()).norm();
            if d < best {
                best = d;
                partner = Some(j);
            }
        }
        let self_dist = 2.0 * zi.im.abs();
        match partner {
            Some(j) if best < self_dist && best <= 1e-6 * scale => {
                let avg = 0.5 * (zi + z[j].conj());
                let (up, down) = if avg.im >= 0.0 {
                    (avg, avg.conj())
                } else {
                    (avg.conj(), avg)
                };
                z[i] = up;
                z[j] = down;
                matched[i] = true;
                matched[j] = true;
            }
            _ if zi.im.abs() <= 1e-9 * scale => {
                z[i] = Complex64::new(zi.re, 0.0);
                matched[i] = true;
            }
            _ => {}
        }
    }
}

fn check_residuals(p: &[f64], roots: &[Complex64], tol: f64) -> Result<()> {
    let deg = (p.len() - 1) as i32;
    let cmax = p.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let mut worst = 0.0_f64;
    let mut failed = false;
    for r in roots {
        let bound = tol * cmax * r.norm().max(1.0).powi(deg);
        let res = eval_complex(p, *r).norm();
        if !(res <= bound) {
            failed = true;
        }
        worst = worst.max(res / (cmax * r.norm().max(1.0).powi(deg)));
    }
    if failed {
        return Err(Error::RootsNotConverged {
            iterations: RootOptions::default().max_iterations,
            residual: worst,
        });
    }
    Ok(())
}

/// Orders roots by |arg|, then positive imaginary part first, then modulus.
fn sort_roots(z: &mut [Complex64]) {
    z.sort_by(|a, b| {
        let ka = (a.arg().abs(), a.im < 0.0, a.norm());
        let kb = (b.arg().abs(), b.im < 0.0, b.norm());
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
}
