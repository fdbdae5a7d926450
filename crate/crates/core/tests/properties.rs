use num_complex::Complex64;
use proptest::prelude::*;

use fracid_core::fotf::{CommensurateFoTf, DiscreteTf};
use fracid_core::io::Model;
use fracid_core::poly;
use fracid_core::sysid_time::{aic, fpe};
use fracid_core::wplane::{self, classify, DampingClass, WPlanePoleSet};
use fracid_core::RationalOrder;

fn order() -> impl Strategy<Value = RationalOrder> {
    (1u32..=12, 1u32..=60).prop_map(|(n, d)| RationalOrder::new(n, d).unwrap())
}

fn base() -> impl Strategy<Value = RationalOrder> {
    (1u32..=60, 0u32..=60).prop_map(|(d, extra)| RationalOrder::new(d, d + extra).unwrap())
}

fn coeffs(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

/// Roots as `(re, im)`: non-negative `im` stands for a conjugate pair.
fn root_spec() -> impl Strategy<Value = Vec<(f64, f64, bool)>> {
    prop::collection::vec((-3.0f64..3.0, 0.2f64..3.0, any::<bool>()), 1..=5)
}

fn expand(spec: &[(f64, f64, bool)]) -> (Vec<f64>, Vec<Complex64>) {
    let mut p = vec![1.0];
    let mut roots = Vec::new();
    for (re, im, pair) in spec {
        if *pair {
            // w^2 - 2 re w + (re^2 + im^2)
            p = poly::mul(&p, &[re * re + im * im, -2.0 * re, 1.0]);
            roots.push(Complex64::new(*re, *im));
            roots.push(Complex64::new(*re, -im));
        } else {
            p = poly::mul(&p, &[-re, 1.0]);
            roots.push(Complex64::new(*re, 0.0));
        }
    }
    (p, roots)
}

fn separated(roots: &[Complex64], gap: f64) -> bool {
    roots
        .iter()
        .enumerate()
        .all(|(i, a)| roots[i + 1..].iter().all(|b| (a - b).norm() > gap))
}

proptest! {
    #[test]
    fn gcd_divides_both(a in order(), b in order()) {
        let g = a.gcd(&b);
        prop_assert!(a.multiple_of(&g).is_some());
        prop_assert!(b.multiple_of(&g).is_some());
        prop_assert_eq!(g, b.gcd(&a));
        // nothing coarser divides both: the two multiples are coprime
        let (m, n) = (a.multiple_of(&g).unwrap(), b.multiple_of(&g).unwrap());
        let coprime = (2..=m.min(n)).all(|k| m % k != 0 || n % k != 0);
        prop_assert!(coprime);
    }

    #[test]
    fn orders_are_stored_reduced(n in 1u32..500, d in 1u32..500) {
        let r = RationalOrder::new(n, d).unwrap();
        prop_assert_eq!(r.value(), r.numerator() as f64 / r.denominator() as f64);
        prop_assert!((r.value() - n as f64 / d as f64).abs() <= 1e-15 * r.value());
        prop_assert_eq!(r, RationalOrder::new(n * 3, d * 3).unwrap());
    }

    #[test]
    fn roots_reconstruct_the_polynomial(spec in root_spec()) {
        let (p, want) = expand(&spec);
        prop_assume!(separated(&want, 0.05));
        let got = wplane::wplane_roots(&p).unwrap();
        prop_assert_eq!(got.len(), want.len());
        for r in &want {
            let nearest = got.iter().map(|g| (g - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-6 * r.norm().max(1.0), "{} missing from {:?}", r, got);
        }
    }

    #[test]
    fn real_polynomials_have_conjugate_root_sets(c in coeffs(2..=9)) {
        prop_assume!(c.last().unwrap().abs() > 0.1);
        let roots = wplane::wplane_roots(&c).unwrap();
        for r in &roots {
            let nearest = roots.iter().map(|o| (o - r.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest <= 1e-6 * r.norm().max(1.0));
        }
    }

    #[test]
    fn fo_model_json_round_trip(q in base(), num in coeffs(1..=6), mut den in coeffs(1..=8)) {
        prop_assume!(den.iter().any(|v| *v != 0.0));
        if den.last() == Some(&0.0) { den.push(1.0); }
        let m = Model::Fo(CommensurateFoTf::new(q, num, den).unwrap());
        let back = Model::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn discrete_model_json_round_trip(num in coeffs(1..=5), tail in coeffs(5..=5), ts in 0.001f64..10.0) {
        let mut den = vec![1.0];
        den.extend(tail);
        let m = Model::Discrete(DiscreteTf::new(num, den, ts).unwrap());
        prop_assert_eq!(Model::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn information_criteria_grow_with_parameters(v in 1e-6f64..1e3, d in 0usize..40, n in 50usize..500) {
        prop_assert!(aic(v, d + 1, n).unwrap() > aic(v, d, n).unwrap());
        prop_assert!(fpe(v, d + 1, n).unwrap() > fpe(v, d, n).unwrap());
        prop_assert!(aic(v * 1.5, d, n).unwrap() > aic(v, d, n).unwrap());
    }

    #[test]
    fn classification_partitions_the_angle(a in -180.0f64..=180.0, q in (1u32..=19).prop_map(|d| RationalOrder::new(1, d + 1).unwrap())) {
        let c = classify(a, q);
        let (abs, qd) = (a.abs(), q.value());
        let tol = wplane::DEFAULT_ANGLE_TOLERANCE;
        prop_assume!((abs - 90.0 * qd).abs() > tol);
        prop_assert_eq!(c == DampingClass::Unstable, abs < 90.0 * qd);
        prop_assert_eq!(c == DampingClass::Ultradamped, abs >= 180.0 - tol);
        prop_assert_eq!(c == DampingClass::Overdamped, (abs - 180.0 * qd).abs() <= tol);
        if c == DampingClass::Underdamped {
            prop_assert!(abs > 90.0 * qd && abs < 180.0 * qd);
        }
        if c == DampingClass::Hyperdamped {
            prop_assert!(abs > 180.0 * qd && abs < 180.0);
        }
        prop_assert_eq!(c.is_stable(), abs > 90.0 * qd);
        prop_assert_eq!(classify(-a, q), c);
    }

    #[test]
    fn integer_order_stability_is_the_half_plane_test(spec in root_spec()) {
        let (p, roots) = expand(&spec);
        prop_assume!(roots.iter().all(|r| r.re.abs() > 0.05));
        prop_assume!(separated(&roots, 0.05));
        let set = WPlanePoleSet::from_polynomial(RationalOrder::ONE, &p).unwrap();
        prop_assert_eq!(set.is_stable(), roots.iter().all(|r| r.re < 0.0));
    }
}
