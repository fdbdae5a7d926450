//! Commensurate fractional-order and discrete-time transfer functions.
//!
//! A [`CommensurateFoTf`] with base order `q` is a ratio of two real
//! polynomials in `w = s^q`. Coefficients are stored in ascending powers of
//! `w`; the external model files use descending order (see [`crate::io`]).

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;
use crate::rational::RationalOrder;

/// Denominators with modulus below `POLE_TOLERANCE * sum|a_k w^k|` count as
/// a pole on the evaluation frequency.
const POLE_TOLERANCE: f64 = 64.0 * f64::EPSILON;

/// `N(w)/D(w)` with `w = s^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommensurateFoTf {
    q: RationalOrder,
    num: Vec<f64>,
    den: Vec<f64>,
}

impl CommensurateFoTf {
    /// Builds from ascending coefficient vectors. Trailing zeros of the
    /// denominator are trimmed; the numerator is trimmed likewise but may end
    /// up empty (the zero transfer function).
    pub fn new(q: RationalOrder, num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if q.value() > 1.0 {
            return Err(Error::invalid(format!("commensurate order {q} exceeds 1")));
        }
        if num.iter().chain(den.iter()).any(|c| !c.is_finite()) {
            return Err(Error::invalid(
                "transfer function coefficients must be finite",
            ));
        }
        let den = poly::trim(&den).to_vec();
        if den.is_empty() {
            return Err(Error::invalid("denominator is identically zero"));
        }
        let num = poly::trim(&num).to_vec();
        Ok(CommensurateFoTf { q, num, den })
    }

    /// Builds from descending coefficient vectors, the reading order of
    /// printed models (`b_m s^{mq} + ... + b_0`).
    pub fn from_descending(q: RationalOrder, num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(
            q,
            num.iter().rev().copied().collect(),
            den.iter().rev().copied().collect(),
        )
    }

    pub fn q(&self) -> RationalOrder {
        self.q
    }

    /// Ascending numerator coefficients `b_0..b_m`.
    pub fn num(&self) -> &[f64] {
        &self.num
    }

    /// Ascending denominator coefficients `a_0..a_n`.
    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn num_descending(&self) -> Vec<f64> {
        self.num.iter().rev().copied().collect()
    }

    pub fn den_descending(&self) -> Vec<f64> {
        self.den.iter().rev().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Frequency response at `omega` on the principal branch,
    /// `(j omega)^{kq} = omega^{kq} e^{j k q pi/2}`.
    pub fn eval(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain {
                omega,
                reason: "fractional evaluation requires omega > 0".into(),
            });
        }
        let w = jw_power(omega, self.q.value());
        let d = poly::eval_complex(&self.den, w);
        let scale: f64 = self
            .den
            .iter()
            .enumerate()
            .map(|(k, a)| a.abs() * w.norm().powi(k as i32))
            .sum();
        if d.norm() <= POLE_TOLERANCE * scale {
            return Err(Error::PoleAtFrequency {
                omega,
                modulus: d.norm(),
            });
        }
        Ok(poly::eval_complex(&self.num, w) / d)
    }

    /// Static gain `b_0 / a_0`, the `omega -> 0+` limit when `a_0 != 0`.
    pub fn dc_gain(&self) -> f64 {
        self.num.first().copied().unwrap_or(0.0) / self.den[0]
    }

    /// Same transfer function over a finer base `q / factor`.
    pub fn respaced(&self, base: RationalOrder) -> Result<Self> {
        let factor = self.q.multiple_of(&base).ok_or_else(|| {
            Error::invalid(format!("{base} is not a divisor of the order {}", self.q))
        })? as usize;
        let spread = |c: &[f64]| {
            if c.is_empty() {
                return Vec::new();
            }
            let mut out = vec![0.0; (c.len() - 1) * factor + 1];
            for (k, v) in c.iter().enumerate() {
                out[k * factor] = *v;
            }
            out
        };
        Ok(CommensurateFoTf {
            q: base,
            num: spread(&self.num),
            den: spread(&self.den),
        })
    }
}

/// `(j omega)^alpha` on the principal branch.
pub fn jw_power(omega: f64, alpha: f64) -> Complex64 {
    Complex64::from_polar(omega.powf(alpha), alpha * FRAC_PI_2)
}

/// Re-expresses both transfer functions over the exact rational gcd of their
/// orders.
pub fn to_common_base(
    a: &CommensurateFoTf,
    b: &CommensurateFoTf,
) -> Result<(CommensurateFoTf, CommensurateFoTf)> {
    let base = a.q.gcd(&b.q);
    Ok((a.respaced(base)?, b.respaced(base)?))
}

/// Unity-feedback characteristic polynomial `D_C D_G + N_C N_G` in the shared
/// `w`, ascending, together with that base order.
pub fn closed_loop_char_poly(
    plant: &CommensurateFoTf,
    controller: &CommensurateFoTf,
) -> Result<(RationalOrder, Vec<f64>)> {
    let (g, c) = to_common_base(plant, controller)?;
    let p = poly::add(&poly::mul(c.den(), g.den()), &poly::mul(c.num(), g.num()));
    Ok((g.q(), poly::trim(&p).to_vec()))
}

/// Rational transfer function in `z` with sample time `ts`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteTf {
    num: Vec<f64>,
    den: Vec<f64>,
    ts: f64,
}

impl DiscreteTf {
    /// `num`, `den` in descending powers of `z`. Leading zeros are stripped.
    pub fn new(num: Vec<f64>, den: Vec<f64>, ts: f64) -> Result<Self> {
        if !(ts > 0.0) || !ts.is_finite() {
            return Err(Error::invalid(format!(
                "sample time must be positive, got {ts}"
            )));
        }
        if num.iter().chain(den.iter()).any(|c| !c.is_finite()) {
            return Err(Error::invalid(
                "transfer function coefficients must be finite",
            ));
        }
        let strip = |v: Vec<f64>| -> Vec<f64> {
            let first = v.iter().position(|c| *c != 0.0).unwrap_or(v.len());
            v[first..].to_vec()
        };
        let den = strip(den);
        if den.is_empty() {
            return Err(Error::invalid("denominator is identically zero"));
        }
        let num = strip(num);
        if num.len() > den.len() {
            return Err(Error::invalid(
                "improper discrete model: deg(num) > deg(den)",
            ));
        }
        Ok(DiscreteTf { num, den, ts })
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.ts
    }

    /// `num(z)/den(z)` at `z = e^{j omega Ts}`, `0 < omega <= pi/Ts`.
    pub fn eval(&self, omega: f64) -> Result<Complex64> {
        let nyq = self.nyquist();
        if !(omega > 0.0) || omega > nyq * (1.0 + 1e-12) {
            return Err(Error::Domain {
                omega,
                reason: format!("must lie in (0, {nyq}]"),
            });
        }
        Ok(self.eval_z(Complex64::from_polar(1.0, omega * self.ts)))
    }

    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        let horner = |c: &[f64]| {
            c.iter()
                .fold(Complex64::new(0.0, 0.0), |acc, x| acc * z + x)
        };
        horner(&self.num) / horner(&self.den)
    }

    /// Gain at `z = 1`.
    pub fn dc_gain(&self) -> f64 {
        self.num.iter().sum::<f64>() / self.den.iter().sum::<f64>()
    }

    /// Relative degree `deg(den) - deg(num)` (input delay in samples).
    pub fn relative_degree(&self) -> usize {
        self.den.len() - self.num.len().max(1)
    }
}

/// Sampled complex frequency response.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyResponse {
    omegas: Vec<f64>,
    values: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn new(omegas: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if omegas.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} frequencies but {} response values",
                omegas.len(),
                values.len()
            )));
        }
        if omegas.is_empty() {
            return Err(Error::invalid(
                "frequency response needs at least one point",
            ));
        }
        validate_grid(&omegas)?;
        Ok(FrequencyResponse { omegas, values })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

fn validate_grid(omegas: &[f64]) -> Result<()> {
    if omegas.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::invalid("frequencies must be positive and finite"));
    }
    if omegas.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::invalid("frequencies must be strictly increasing"));
    }
    Ok(())
}

/// Frequency response of a discrete model on `grid`.
pub fn synth_freq_data(tf: &DiscreteTf, grid: &[f64]) -> Result<FrequencyResponse> {
    if grid.is_empty() {
        return Err(Error::invalid("empty frequency grid"));
    }
    validate_grid(grid)?;
    let values = grid
        .iter()
        .map(|w| tf.eval(*w))
        .collect::<Result<Vec<_>>>()?;
    FrequencyResponse::new(grid.to_vec(), values)
}

/// `count` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            let mut v: Vec<f64> = (0..count)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
                .collect();
            v[0] = lo;
            v[count - 1] = hi;
            v
        }
    }
}

/// 100 log-spaced points from 1e-3 rad/s to the Nyquist frequency `pi/ts`.
pub fn default_grid(ts: f64) -> Vec<f64> {
    logspace(1e-3, PI / ts, 100)
}
