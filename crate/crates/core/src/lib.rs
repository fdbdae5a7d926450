//! Commensurate fractional-order modelling and control.
//!
//! The crate covers the path from measured or synthetic data to a tuned
//! controller:
//!
//! * [`fotf`] and [`wplane`]: transfer functions in `w = s^q`, evaluation,
//!   root extraction and damping classes of each pole.
//! * [`sysid_time`]: ARX, ARMAX, Box-Jenkins and output-error estimators for
//!   discrete-time records, ranked by AIC.
//! * [`sysid_freq`]: Levy least-squares fitting of fractional models to a
//!   frequency response, with optional Vinagre weights.
//! * [`ctrl`]: continuous-order PID-like controllers tuned by pole angle.
//! * [`sim`]: Grünwald-Letnikov time-domain simulation.
//! * [`fixtures`]: the published reactor step-back models.
//!
//! ```
//! use fracid_core::{fotf::CommensurateFoTf, wplane, RationalOrder};
//!
//! // 1 / (s + 1.2 s^0.5 + 1) seen as 1 / (w^2 + 1.2 w + 1), w = s^0.5
//! let q: RationalOrder = "1/2".parse().unwrap();
//! let g = CommensurateFoTf::new(q, vec![1.0], vec![1.0, 1.2, 1.0]).unwrap();
//! let (stable, poles) = wplane::is_stable(&g).unwrap();
//! assert!(stable);
//! assert!(poles.poles.iter().all(|p| p.class == wplane::DampingClass::Hyperdamped));
//! ```

pub mod ctrl;
pub mod error;
pub mod fixtures;
pub mod fotf;
pub mod io;
mod linalg;
pub mod poly;
pub mod rational;
pub mod sim;
pub mod sysid_freq;
pub mod sysid_time;
pub mod wplane;

pub use error::{Error, Result};
pub use rational::RationalOrder;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/orders.md")]
    mod orders {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/levy.md")]
    mod levy {}
    #[doc = include_str!("../../../book/src/time_id.md")]
    mod time_id {}
    #[doc = include_str!("../../../book/src/tuning.md")]
    mod tuning {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
