//! Fixed-step Grünwald-Letnikov simulation of commensurate models and
//! unity-feedback loops.
//!
//! Every operator `s^{kq}` is replaced by `h^{-kq} sum_j c_j^{(kq)} x(t - jh)`
//! with zero history before `t = 0`. Summing the operators of a polynomial
//! gives one convolution kernel per side, so `D(s) y = N(s) u` becomes
//!
//! ```text
//! W_D[0] y[n] = sum_j W_N[j] u[n-j] - sum_{j>=1} W_D[j] y[n-j]
//! ```
//!
//! and each step is a single scalar division.

use serde::{Deserialize, Serialize};

use crate::ctrl::{controller_tf, verify, ContinuousOrderPid};
use crate::error::{Error, Result};
use crate::fotf::{to_common_base, CommensurateFoTf};
use crate::poly;
use crate::rational::RationalOrder;

/// History used by the GL sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Memory {
    Full,
    /// Only the most recent `L` samples (plus the current one).
    Window(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Step size, seconds.
    pub h: f64,
    /// Horizon, seconds.
    pub horizon: f64,
    pub memory: Memory,
}

impl SimConfig {
    pub fn new(h: f64, horizon: f64) -> Result<Self> {
        let c = SimConfig {
            h,
            horizon,
            memory: Memory::Full,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_memory(mut self, memory: Memory) -> Self {
        self.memory = memory;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::invalid(format!(
                "step size must be positive, got {}",
                self.h
            )));
        }
        if !(self.horizon >= self.h) || !self.horizon.is_finite() {
            return Err(Error::invalid("horizon must be at least one step"));
        }
        if self.memory == Memory::Window(0) {
            return Err(Error::invalid("memory window must be at least 1"));
        }
        Ok(())
    }

    /// Number of samples, `t = 0, h, ..., horizon`.
    pub fn samples(&self) -> usize {
        (self.horizon / self.h).round() as usize + 1
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples()).map(|k| k as f64 * self.h).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SimResult {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    /// Controller output (the plant input for open-loop runs).
    pub u_ctrl: Vec<f64>,
    /// Tracking error `r - y` (zero for open-loop runs).
    pub e: Vec<f64>,
    /// Final value the output should settle to.
    pub target: f64,
    pub warnings: Vec<String>,
}

impl SimResult {
    /// Largest `|y - target|`.
    pub fn peak_deviation(&self) -> f64 {
        self.y
            .iter()
            .map(|v| (v - self.target).abs())
            .fold(0.0, f64::max)
    }

    /// `max(y - target) / |target|`, zero when the output never exceeds the target.
    pub fn overshoot(&self) -> f64 {
        let over = self.y.iter().map(|v| v - self.target).fold(0.0, f64::max);
        if self.target != 0.0 {
            over / self.target.abs()
        } else {
            over
        }
    }
}

/// Grünwald-Letnikov weights `c_0 = 1`, `c_j = c_{j-1} (1 - (alpha+1)/j)`.
pub fn gl_weights(alpha: f64, count: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(count);
    if count == 0 {
        return c;
    }
    c.push(1.0);
    for j in 1..count {
        let prev = c[j - 1];
        c.push(prev * (1.0 - (alpha + 1.0) / j as f64));
    }
    c
}

/// Combined kernel `W[j] = sum_k p_k h^{-kq} c_j^{(kq)}`.
fn kernel(coeffs: &[f64], q: RationalOrder, h: f64, len: usize) -> Vec<f64> {
    let mut w = vec![0.0; len];
    for (k, p) in coeffs.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let alpha = k as f64 * q.value();
        let scale = p * h.powf(-alpha);
        for (wj, cj) in w.iter_mut().zip(gl_weights(alpha, len)) {
            *wj += scale * cj;
        }
    }
    w
}

/// `den(s^q) y = num(s^q) u` driven by `input`, zero history.
fn run_filter(
    num: &[f64],
    den: &[f64],
    q: RationalOrder,
    input: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<f64>> {
    let n = input.len();
    let wn = kernel(num, q, cfg.h, n);
    let wd = kernel(den, q, cfg.h, n);
    let scale: f64 = den
        .iter()
        .enumerate()
        .map(|(k, a)| (a * cfg.h.powf(-(k as f64) * q.value())).abs())
        .sum();
    if !(wd[0].abs() > 1e-12 * scale) {
        return Err(Error::IllPosed { coefficient: wd[0] });
    }
    let mem = match cfg.memory {
        Memory::Full => n,
        Memory::Window(l) => l,
    };
    let mut y = vec![0.0; n];
    for t in 0..n {
        let reach = t.min(mem);
        let mut acc = 0.0;
        for j in 0..=reach {
            acc += wn[j] * input[t - j];
        }
        for j in 1..=reach {
            acc -= wd[j] * y[t - j];
        }
        y[t] = acc / wd[0];
    }
    Ok(y)
}

fn check_proper(num: &[f64], den: &[f64]) -> Result<()> {
    if poly::trim(num).len() > poly::trim(den).len() {
        return Err(Error::invalid("transfer function is improper in w"));
    }
    Ok(())
}

/// Open-loop response of `tf` to `input` sampled at `t = 0, h, ...`.
pub fn simulate_fo(tf: &CommensurateFoTf, input: &[f64], cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    if input.is_empty() {
        return Err(Error::invalid("empty input signal"));
    }
    check_proper(tf.num(), tf.den())?;
    let y = run_filter(tf.num(), tf.den(), tf.q(), input, cfg)?;
    let last_u = *input.last().expect("non-empty");
    let dc = tf.dc_gain();
    let target = if last_u == 0.0 {
        0.0
    } else if dc.is_finite() {
        dc * last_u
    } else {
        *y.last().expect("non-empty")
    };
    Ok(SimResult {
        t: (0..input.len()).map(|k| k as f64 * cfg.h).collect(),
        y,
        u_ctrl: input.to_vec(),
        e: vec![0.0; input.len()],
        target,
        warnings: Vec::new(),
    })
}

/// Unity-feedback loop `C = N_C/D_C`, `G = N_G/D_G` with reference `r` and
/// plant-input disturbance `d`:
///
/// ```text
/// y = (N_C N_G r + D_C N_G d) / P
/// u = (N_C D_G r - N_C N_G d) / P,     P = D_C D_G + N_C N_G
/// e = r - y
/// ```
pub fn closed_loop(
    plant: &CommensurateFoTf,
    controller: &ContinuousOrderPid,
    r: &[f64],
    d: &[f64],
    cfg: &SimConfig,
) -> Result<SimResult> {
    cfg.validate()?;
    if r.len() != d.len() || r.is_empty() {
        return Err(Error::invalid(
            "reference and disturbance must have the same non-zero length",
        ));
    }
    let ctf = controller_tf(controller)?;
    let (g, c) = to_common_base(plant, &ctf)?;
    let q = g.q();
    let ncng = poly::mul(c.num(), g.num());
    let p = poly::trim(&poly::add(&poly::mul(c.den(), g.den()), &ncng)).to_vec();
    if p.is_empty() {
        return Err(Error::invalid(
            "closed-loop characteristic polynomial vanishes",
        ));
    }
    let dcng = poly::mul(c.den(), g.num());
    let ncdg = poly::mul(c.num(), g.den());
    for n in [&ncng, &dcng, &ncdg] {
        check_proper(n, &p)?;
    }
    let has_r = r.iter().any(|v| *v != 0.0);
    let has_d = d.iter().any(|v| *v != 0.0);
    let zeros = vec![0.0; r.len()];
    let part = |num: &[f64], x: &[f64], active: bool| -> Result<Vec<f64>> {
        if active {
            run_filter(num, &p, q, x, cfg)
        } else {
            Ok(zeros.clone())
        }
    };
    let y_r = part(&ncng, r, has_r)?;
    let y_d = part(&dcng, d, has_d)?;
    let u_r = part(&ncdg, r, has_r)?;
    let u_d = part(&ncng, d, has_d)?;
    let y: Vec<f64> = y_r.iter().zip(&y_d).map(|(a, b)| a + b).collect();
    let u_ctrl = u_r.iter().zip(&u_d).map(|(a, b)| a - b).collect();
    let e = r.iter().zip(&y).map(|(a, b)| a - b).collect();
    Ok(SimResult {
        t: (0..r.len()).map(|k| k as f64 * cfg.h).collect(),
        y,
        u_ctrl,
        e,
        target: *r.last().expect("non-empty"),
        warnings: Vec::new(),
    })
}

fn stability_warnings(plant: &CommensurateFoTf, controller: &ContinuousOrderPid) -> Vec<String> {
    match verify(controller, std::slice::from_ref(plant)) {
        Ok(rep) if rep.stable => Vec::new(),
        Ok(rep) => vec![format!(
            "closed loop is not stable: minimum pole angle {:.4} deg",
            rep.min_angle()
        )],
        Err(e) => vec![format!("closed-loop poles could not be computed: {e}")],
    }
}

/// Reference step of the given amplitude at `t = 0`.
pub fn closed_loop_step(
    plant: &CommensurateFoTf,
    controller: &ContinuousOrderPid,
    amplitude: f64,
    cfg: &SimConfig,
) -> Result<SimResult> {
    cfg.validate()?;
    let n = cfg.samples();
    let mut res = closed_loop(plant, controller, &vec![amplitude; n], &vec![0.0; n], cfg)?;
    res.warnings = stability_warnings(plant, controller);
    Ok(res)
}

/// Unit step disturbance at the plant input, zero reference.
pub fn disturbance_step(
    plant: &CommensurateFoTf,
    controller: &ContinuousOrderPid,
    cfg: &SimConfig,
) -> Result<SimResult> {
    cfg.validate()?;
    let n = cfg.samples();
    let mut res = closed_loop(plant, controller, &vec![0.0; n], &vec![1.0; n], cfg)?;
    res.warnings = stability_warnings(plant, controller);
    Ok(res)
}

/// Time after which the output stays within the band around `target`.
///
/// The band half-width is `band_fraction * |target|`, or
/// `band_fraction * peak |y|` when the target is zero. The crossing is
/// interpolated linearly between samples. Returns `0` if the output never
/// leaves the band and `f64::INFINITY` if it is outside at the last sample.
pub fn settling_time(result: &SimResult, band_fraction: f64) -> f64 {
    if result.y.is_empty() {
        return f64::INFINITY;
    }
    let scale = if result.target != 0.0 {
        result.target.abs()
    } else {
        result.peak_deviation()
    };
    let band = band_fraction * scale;
    let dev: Vec<f64> = result.y.iter().map(|v| (v - result.target).abs()).collect();
    let Some(k) = dev.iter().rposition(|d| *d > band) else {
        return result.t[0];
    };
    if k + 1 == dev.len() {
        return f64::INFINITY;
    }
    let (d0, d1) = (dev[k], dev[k + 1]);
    let frac = if d0 > d1 {
        (d0 - band) / (d0 - d1)
    } else {
        0.0
    };
    result.t[k] + frac * (result.t[k + 1] - result.t[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: u32, d: u32) -> RationalOrder {
        RationalOrder::new(n, d).unwrap()
    }

    #[test]
    fn weights_by_hand() {
        assert_eq!(gl_weights(1.0, 4), vec![1.0, -1.0, 0.0, 0.0]);
        assert_eq!(gl_weights(0.0, 3), vec![1.0, 0.0, 0.0]);
        assert_eq!(gl_weights(0.5, 4), vec![1.0, -0.5, -0.125, -0.0625]);
    }

    #[test]
    fn integrator_ramp() {
        let tf = CommensurateFoTf::new(RationalOrder::ONE, vec![1.0], vec![0.0, 1.0]).unwrap();
        let cfg = SimConfig::new(1e-3, 1.0).unwrap();
        let r = simulate_fo(&tf, &vec![1.0; cfg.samples()], &cfg).unwrap();
        assert!((r.y.last().unwrap() - 1.0).abs() < 2e-3);
    }

    #[test]
    fn first_order_lag() {
        let tf = CommensurateFoTf::new(RationalOrder::ONE, vec![1.0], vec![1.0, 1.0]).unwrap();
        let cfg = SimConfig::new(1e-3, 1.0).unwrap();
        let r = simulate_fo(&tf, &vec![1.0; cfg.samples()], &cfg).unwrap();
        assert!((r.y.last().unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-3);
    }

    #[test]
    fn settling_of_exponential() {
        let t: Vec<f64> = (0..=10_000).map(|k| k as f64 * 1e-3).collect();
        let y = t.iter().map(|t| 1.0 - (-t).exp()).collect();
        let r = SimResult {
            t,
            y,
            target: 1.0,
            ..Default::default()
        };
        assert!((settling_time(&r, 0.02) - 50f64.ln()).abs() < 1e-6);
        let flat = SimResult {
            t: vec![0.0, 1.0],
            y: vec![2.0, 2.0],
            target: 2.0,
            ..Default::default()
        };
        assert_eq!(settling_time(&flat, 0.02), 0.0);
    }

    #[test]
    fn window_equal_to_length_matches_full() {
        let tf = CommensurateFoTf::new(q(1, 2), vec![1.0], vec![1.0, 1.0]).unwrap();
        let cfg = SimConfig::new(1e-2, 2.0).unwrap();
        let u = vec![1.0; cfg.samples()];
        let a = simulate_fo(&tf, &u, &cfg).unwrap();
        let b = simulate_fo(&tf, &u, &cfg.with_memory(Memory::Window(cfg.samples()))).unwrap();
        assert_eq!(a.y, b.y);
    }

    #[test]
    fn type_one_loop_rejects_disturbance() {
        let plant = CommensurateFoTf::new(RationalOrder::ONE, vec![1.0], vec![1.0, 1.0]).unwrap();
        let pi = ContinuousOrderPid::new(RationalOrder::ONE, vec![1.0, 1.0]).unwrap();
        let cfg = SimConfig::new(1e-2, 20.0).unwrap();
        let r = disturbance_step(&plant, &pi, &cfg).unwrap();
        assert!(r.y.last().unwrap().abs() < 1e-3);
        assert!(r.peak_deviation() > 0.1);
        let z = closed_loop(&plant, &pi, &vec![0.0; 10], &vec![0.0; 10], &cfg).unwrap();
        assert!(z.y.iter().all(|v| *v == 0.0));
    }
}
