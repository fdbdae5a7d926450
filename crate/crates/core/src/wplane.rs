//! Pole location in the `w = s^q` plane.
//!
//! For base order `q` the physical `s`-plane maps onto the sector
//! `|arg w| < pi q`. The stability boundary sits at `|arg w| = pi q / 2`;
//! roots with `|arg w| > pi q` live on higher Riemann sheets and produce no
//! oscillatory modes.
//!
//! | `|arg w|` (degrees)            | class         |
//! |--------------------------------|---------------|
//! | `< 90 q`                       | Unstable      |
//! | `[90 q, 180 q - tol)`          | Underdamped   |
//! | `180 q +- tol`                 | Overdamped    |
//! | `(180 q + tol, 180 - tol)`     | Hyperdamped   |
//! | `>= 180 - tol`                 | Ultradamped   |

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::fotf::CommensurateFoTf;
use crate::poly;
use crate::rational::RationalOrder;

/// Default half-width, in degrees, of the overdamped and ultradamped bands.
pub const DEFAULT_ANGLE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DampingClass {
    Unstable,
    Underdamped,
    Overdamped,
    Hyperdamped,
    Ultradamped,
}

impl DampingClass {
    pub fn is_stable(self) -> bool {
        self != DampingClass::Unstable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DampingClass::Unstable => "unstable",
            DampingClass::Underdamped => "underdamped",
            DampingClass::Overdamped => "overdamped",
            DampingClass::Hyperdamped => "hyperdamped",
            DampingClass::Ultradamped => "ultradamped",
        }
    }
}

/// Classifies `|arg w|` (degrees, in `[0, 180]`) for base order `q`.
///
/// An argument exactly on `90 q` is assigned to the stable side
/// (`Underdamped`); see [`is_marginal`] to detect that case.
pub fn classify(argument_deg: f64, q: RationalOrder) -> DampingClass {
    classify_with(argument_deg, q, DEFAULT_ANGLE_TOLERANCE)
}

pub fn classify_with(argument_deg: f64, q: RationalOrder, tolerance: f64) -> DampingClass {
    let a = argument_deg.abs();
    let qd = q.value();
    if a >= 180.0 - tolerance {
        DampingClass::Ultradamped
    } else if (a - 180.0 * qd).abs() <= tolerance {
        DampingClass::Overdamped
    } else if a < 90.0 * qd {
        DampingClass::Unstable
    } else if a < 180.0 * qd {
        DampingClass::Underdamped
    } else {
        DampingClass::Hyperdamped
    }
}

/// True when the argument lies exactly on the stability boundary `90 q`.
pub fn is_marginal(argument_deg: f64, q: RationalOrder) -> bool {
    argument_deg.abs() == 90.0 * q.value()
}

/// One classified root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WPole {
    #[serde(serialize_with = "ser_complex")]
    pub root: Complex64,
    pub modulus: f64,
    /// Signed argument in degrees, `(-180, 180]`.
    pub argument_deg: f64,
    pub class: DampingClass,
    pub marginal: bool,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Roots of a polynomial in `w` with their damping classes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WPlanePoleSet {
    pub q: RationalOrder,
    pub poles: Vec<WPole>,
}

impl WPlanePoleSet {
    pub fn from_roots(q: RationalOrder, roots: &[Complex64], tolerance: f64) -> Self {
        let poles = roots
            .iter()
            .map(|r| {
                let argument_deg = r.arg().to_degrees();
                WPole {
                    root: *r,
                    modulus: r.norm(),
                    argument_deg,
                    class: classify_with(argument_deg, q, tolerance),
                    marginal: is_marginal(argument_deg, q),
                }
            })
            .collect();
        WPlanePoleSet { q, poles }
    }

    /// Roots of `coeffs` (ascending in `w`) classified for order `q`.
    pub fn from_polynomial(q: RationalOrder, coeffs: &[f64]) -> Result<Self> {
        let roots = wplane_roots(coeffs)?;
        Ok(Self::from_roots(q, &roots, DEFAULT_ANGLE_TOLERANCE))
    }

    pub fn roots(&self) -> Vec<Complex64> {
        self.poles.iter().map(|p| p.root).collect()
    }

    pub fn arguments_deg(&self) -> Vec<f64> {
        self.poles.iter().map(|p| p.argument_deg).collect()
    }

    /// Smallest `|arg|` over all roots, degrees; `180` for an empty set.
    pub fn min_abs_argument(&self) -> f64 {
        self.poles
            .iter()
            .map(|p| p.argument_deg.abs())
            .fold(180.0, f64::min)
    }

    /// Strict stability: every `|arg| > 90 q`.
    pub fn is_stable(&self) -> bool {
        let bound = 90.0 * self.q.value();
        self.poles.iter().all(|p| p.argument_deg.abs() > bound)
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }
}

/// All roots of a real polynomial in `w` (ascending coefficients).
pub fn wplane_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    poly::roots(coeffs)
}

/// Stability of a fractional transfer function together with its classified
/// poles. A denominator of degree zero has no poles and is stable.
pub fn is_stable(tf: &CommensurateFoTf) -> Result<(bool, WPlanePoleSet)> {
    let set = if tf.den().len() < 2 {
        WPlanePoleSet {
            q: tf.q(),
            poles: Vec::new(),
        }
    } else {
        WPlanePoleSet::from_polynomial(tf.q(), tf.den())?
    };
    Ok((set.is_stable(), set))
}

/// Zeros of a transfer function as a classified set (for pole-zero maps).
pub fn zeros(tf: &CommensurateFoTf) -> Result<WPlanePoleSet> {
    if tf.num().len() < 2 {
        return Ok(WPlanePoleSet {
            q: tf.q(),
            poles: Vec::new(),
        });
    }
    WPlanePoleSet::from_polynomial(tf.q(), tf.num())
}
