use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fracid_core::fixtures::FixtureBank;
use fracid_core::fotf::{
    default_grid, logspace, synth_freq_data, CommensurateFoTf, FrequencyResponse,
};
use fracid_core::sysid_freq::{
    accuracy_j, fo_response, levy_rows, order_distribution, order_distribution_of, q_sweep,
    solve_levy, vinagre_weights, Aggregation, LevyProblem, Weighting,
};
use fracid_core::{Error, RationalOrder};

fn q(n: u32, d: u32) -> RationalOrder {
    RationalOrder::new(n, d).unwrap()
}

fn reference_response() -> FrequencyResponse {
    let bank = FixtureBank::published();
    let d = &bank.get("G30_100").unwrap().discrete;
    synth_freq_data(d, &default_grid(d.ts())).unwrap()
}

#[test]
fn row_shapes_and_basis_values() {
    let data =
        FrequencyResponse::new(vec![0.5, 1.0, 2.0], vec![Complex64::new(1.0, 0.0); 3]).unwrap();
    let p = LevyProblem::new(data.clone(), 2, 1, q(1, 4));
    let (rows, rhs) = levy_rows(&p, 1).unwrap();
    assert_eq!((rows.nrows(), rows.ncols()), (2, 4));
    // (j)^(1/2) = e^{j pi/4}
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((rows[(0, 2)] - h).abs() < 1e-15 && (rows[(1, 2)] - h).abs() < 1e-15);
    assert_eq!(rhs, [1.0, 0.0]);

    let fit = solve_levy(&LevyProblem::new(
        FrequencyResponse::new(vec![1.0], vec![Complex64::new(3.5, 0.0)]).unwrap(),
        0,
        0,
        q(1, 2),
    ))
    .unwrap();
    assert!((fit.model.num()[0] - 3.5).abs() < 1e-14);
}

#[test]
fn vinagre_examples() {
    assert_eq!(
        vinagre_weights(&[1.0, 2.0, 4.0]).unwrap(),
        vec![0.5, 0.375, 0.0625]
    );
    assert!(vinagre_weights(&[1.0]).is_err());
    assert!(vinagre_weights(&[1.0, 1.0]).is_err());
    let w = vinagre_weights(&logspace(1e-3, 1e2, 50)).unwrap();
    assert!(w.iter().all(|v| *v > 0.0));
    // the one-sided first weight spans half an interval, so the decrease
    // starts at the second point on a fine grid
    assert!(w[1..].windows(2).all(|p| p[1] < p[0]));
    assert!(w[0] < w[1]);
}

#[test]
fn exact_recovery_of_half_order_lag() {
    let truth = CommensurateFoTf::new(q(1, 4), vec![1.0], vec![1.0, 0.0, 1.0]).unwrap();
    let data = fo_response(&truth, &logspace(1e-2, 1e2, 30)).unwrap();
    let fit = solve_levy(&LevyProblem::new(data, 0, 2, q(1, 4))).unwrap();
    assert!((fit.model.num()[0] - 1.0).abs() < 1e-10);
    assert!(fit.model.den()[1].abs() < 1e-10 && (fit.model.den()[2] - 1.0).abs() < 1e-10);
    assert!(fit.j < 1e-12);
    assert!(!fit.degenerate);
    let mean = fit.residual_by_freq.iter().sum::<f64>() / fit.residual_by_freq.len() as f64;
    assert_eq!(fit.j, mean);
}

#[test]
fn quarter_order_vinagre_fit_of_first_fixture() {
    let p =
        LevyProblem::new(reference_response(), 10, 10, q(1, 4)).with_weighting(Weighting::Vinagre);
    let fit = solve_levy(&p).unwrap();
    let published = 3.6721e-6;
    assert!(
        fit.j > published / 100.0 && fit.j < published * 100.0,
        "J = {:e}",
        fit.j
    );

    let integer = solve_levy(
        &LevyProblem::new(reference_response(), 2, 2, RationalOrder::ONE)
            .with_weighting(Weighting::Vinagre),
    )
    .unwrap();
    assert!(integer.j >= 1e4 * fit.j, "{:e} vs {:e}", integer.j, fit.j);
}

#[test]
fn stacked_and_summed_agree() {
    let data = reference_response();
    for (m, n, base) in [(2, 2, q(1, 1)), (4, 4, q(1, 2)), (3, 5, q(1, 2))] {
        let p = LevyProblem::new(data.clone(), m, n, base).with_weighting(Weighting::Vinagre);
        let a = solve_levy(&p).unwrap();
        let b = solve_levy(&p.clone().with_aggregation(Aggregation::Summed)).unwrap();
        let xa: Vec<f64> = a.model.num().iter().chain(a.model.den()).copied().collect();
        let xb: Vec<f64> = b.model.num().iter().chain(b.model.den()).copied().collect();
        for (u, v) in xa.iter().zip(&xb) {
            assert!(
                (u - v).abs() <= 1e-8 * u.abs().max(1.0),
                "{m},{n},{base}: {u} vs {v}"
            );
        }
    }
}

#[test]
fn summed_mode_rejects_singular_systems() {
    // more unknowns than equations
    let data = FrequencyResponse::new(vec![1.0], vec![Complex64::new(1.0, 0.5)]).unwrap();
    let p = LevyProblem::new(data.clone(), 2, 2, q(1, 2));
    assert!(matches!(
        solve_levy(&p.clone().with_aggregation(Aggregation::Summed)),
        Err(Error::SingularSummed)
    ));
    let stacked = solve_levy(&p).unwrap();
    assert!(stacked.degenerate);
}

/// Weighted least squares with every weight multiplied by `c`, built from
/// the public rows and solved by SVD.
fn scaled_weight_solution(p: &LevyProblem, c: f64) -> Vec<f64> {
    let f = p.data.len();
    let mut a = DMatrix::zeros(2 * f, p.unknowns());
    let mut b = DVector::zeros(2 * f);
    for i in 0..f {
        let (rows, rhs) = levy_rows(p, i).unwrap();
        a.rows_mut(2 * i, 2).copy_from(&(rows * c.sqrt()));
        b[2 * i] = rhs[0] * c.sqrt();
        b[2 * i + 1] = rhs[1] * c.sqrt();
    }
    a.svd(true, true)
        .solve(&b, 1e-300)
        .unwrap()
        .iter()
        .copied()
        .collect()
}

#[test]
fn weight_scale_invariance() {
    let p =
        LevyProblem::new(reference_response(), 2, 3, q(1, 2)).with_weighting(Weighting::Vinagre);
    let fit = solve_levy(&p).unwrap();
    let want: Vec<f64> = fit
        .model
        .num()
        .iter()
        .chain(&fit.model.den()[1..])
        .copied()
        .collect();
    for c in [1e-3, 1.0, 37.0, 1e4] {
        let x = scaled_weight_solution(&p, c);
        for (u, v) in x.iter().zip(&want) {
            assert!(
                (u - v).abs() <= 1e-10 * v.abs().max(1.0),
                "c = {c}: {x:?} vs {want:?}"
            );
        }
    }
}

/// Independent integer-order Levy: complex `(jw)^k` by repeated
/// multiplication, real normal equations built from complex inner products,
/// solved by Cholesky.
fn integer_levy_oracle(omegas: &[f64], g: &[Complex64], m: usize, n: usize) -> Vec<f64> {
    let u = m + n + 1;
    let mut ata = DMatrix::<f64>::zeros(u, u);
    let mut atb = DVector::<f64>::zeros(u);
    for (w, gi) in omegas.iter().zip(g) {
        let s = Complex64::new(0.0, *w);
        let mut phi = vec![Complex64::new(0.0, 0.0); u];
        for k in 0..=m {
            phi[k] = s.powi(k as i32);
        }
        for k in 1..=n {
            phi[m + k] = -gi * s.powi(k as i32);
        }
        for i in 0..u {
            atb[i] += (phi[i].conj() * gi).re;
            for j in 0..u {
                ata[(i, j)] += (phi[i].conj() * phi[j]).re;
            }
        }
    }
    ata.cholesky()
        .unwrap()
        .solve(&atb)
        .iter()
        .copied()
        .collect()
}

#[test]
fn integer_reduction_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let grid = logspace(0.1, 10.0, 40);
    for _ in 0..10 {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(0..n);
        // stable: product of (s + p) with p in [0.5, 3]
        let mut den = vec![1.0];
        for _ in 0..n {
            let p: f64 = rng.gen_range(0.5..3.0);
            let mut next = vec![0.0; den.len() + 1];
            for (i, c) in den.iter().enumerate() {
                next[i] += p * c;
                next[i + 1] += c;
            }
            den = next;
        }
        let a0 = den[0];
        den.iter_mut().for_each(|c| *c /= a0);
        let num: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.5..2.0)).collect();
        let truth = CommensurateFoTf::new(RationalOrder::ONE, num, den).unwrap();
        // perturb so the fit is not exact
        let data = fo_response(&truth, &grid).unwrap();
        let noisy: Vec<Complex64> = data
            .values()
            .iter()
            .map(|v| {
                v * Complex64::new(1.0 + rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05))
            })
            .collect();
        let data = FrequencyResponse::new(grid.clone(), noisy.clone()).unwrap();
        let fit = solve_levy(&LevyProblem::new(data, m, n, RationalOrder::ONE)).unwrap();
        let want = integer_levy_oracle(&grid, &noisy, m, n);
        let got: Vec<f64> = fit
            .model
            .num()
            .iter()
            .chain(&fit.model.den()[1..])
            .copied()
            .collect();
        for (g, w) in got.iter().zip(&want) {
            assert!(
                (g - w).abs() <= 1e-8 * w.abs().max(1.0),
                "{got:?} vs {want:?}"
            );
        }
    }
}

#[test]
fn accuracy_examples() {
    let truth = CommensurateFoTf::new(q(1, 2), vec![1.0], vec![1.0, 1.0]).unwrap();
    let grid = logspace(0.1, 10.0, 12);
    let data = fo_response(&truth, &grid).unwrap();
    assert_eq!(accuracy_j(&data, &truth).unwrap().0, 0.0);
    let delta = Complex64::new(0.3, -0.4);
    let shifted =
        FrequencyResponse::new(grid, data.values().iter().map(|v| v + delta).collect()).unwrap();
    assert!((accuracy_j(&shifted, &truth).unwrap().0 - 0.25).abs() < 1e-12);
}

#[test]
fn published_model_against_its_source_data() {
    let bank = FixtureBank::published();
    let (j, res) = accuracy_j(&reference_response(), &bank.get("G30_100").unwrap().fo).unwrap();
    assert_eq!(res.len(), 100);
    // frozen on the first run
    assert!((j - 13960.376548672055).abs() <= 1e-9 * j, "{j}");
}

#[test]
fn sweep_trend_and_conditioning() {
    let data = reference_response();
    let qs = [
        q(1, 1),
        q(1, 2),
        q(1, 4),
        q(1, 10),
        q(1, 20),
        q(1, 50),
        q(1, 100),
    ];
    let top = RationalOrder::new(5, 2).unwrap();
    let cells = q_sweep(&data, top, top, &qs, Aggregation::Stacked).unwrap();
    assert_eq!(cells.len(), 14);
    for (i, c) in cells.iter().enumerate() {
        assert_eq!(c.q, qs[i / 2]);
        assert_eq!(
            c.weighting,
            if i % 2 == 0 {
                Weighting::Uniform
            } else {
                Weighting::Vinagre
            }
        );
    }
    let j = |i: usize| cells[i].outcome.as_ref().unwrap().j;
    // integer ladder falls back to floor(2.5) = 2
    assert_eq!((cells[0].m, cells[0].n), (2, 2));
    assert_eq!((cells[4].m, cells[4].n), (10, 10));
    assert!(j(0) >= 1e4 * j(4));
    assert!(j(1) >= 1e4 * j(5));

    for w in 0..2 {
        let cond: Vec<f64> = (3..7)
            .map(|k| cells[2 * k + w].outcome.as_ref().unwrap().condition)
            .collect();
        assert!(cond.windows(2).all(|p| p[1] >= p[0]), "{cond:?}");
        assert!(cells[2 * 6 + w].ill_conditioned());
    }
    assert!(q_sweep(&data, top, top, &[q(1, 3)], Aggregation::Stacked).is_err());
    assert!(q_sweep(&data, top, top, &[], Aggregation::Stacked).is_err());
}

#[test]
fn order_distribution_examples() {
    let bank = FixtureBank::published();
    let fo = &bank.get("G30_100").unwrap().fo;
    let d = order_distribution_of(fo);
    assert_eq!(d.len(), 11);
    for (k, pt) in d.iter().enumerate() {
        assert!((pt.order - 0.25 * k as f64).abs() < 1e-15);
        assert_eq!(pt.den, Some(fo.den()[k]));
    }
    let integer =
        CommensurateFoTf::new(RationalOrder::ONE, vec![1.0, 2.0], vec![1.0, 3.0, 1.0]).unwrap();
    let orders: Vec<f64> = order_distribution_of(&integer)
        .iter()
        .map(|p| p.order)
        .collect();
    assert_eq!(orders, vec![0.0, 1.0, 2.0]);

    let fit = solve_levy(&LevyProblem::new(reference_response(), 3, 5, q(1, 2))).unwrap();
    let d = order_distribution(&fit);
    assert_eq!(d.iter().filter(|p| p.num.is_some()).count(), 4);
    assert_eq!(d.iter().filter(|p| p.den.is_some()).count(), 6);
}
