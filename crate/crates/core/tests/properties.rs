//! Randomized invariants of the spectral layer, the reformulation maps and
//! the norm functionals.

use num_complex::Complex64;
use proptest::prelude::*;

use bql_core::data::{random_etaphi, random_real_field, rng_from_seed, w_from_etaphi};
use bql_core::dynamics::{Trajectory, TrajectoryMeta};
use bql_core::estimates::{frac_leibniz_defect, smoothing_ratio, strichartz_ratio};
use bql_core::norms::{omega, SobolevIndices};
use bql_core::reformulations::{
    curl_residual, diagonalize, differentiate_to_w, reconstruct_from_w, undiagonalize, State,
};
use bql_core::spectral::{
    apply_multiplier, dealias, derivative, fractional_derivative, propagator, riesz, Axis, Branch,
    Symbol,
};
use bql_core::{Field, Grid, GridSpec, Representation};

fn grid(n: usize, l: f64) -> Grid {
    Grid::new(GridSpec::square(n, l)).unwrap()
}

/// Complex mean-zero field with modes below index 6.
fn field(g: &Grid, seed: u64) -> Field {
    let mut rng = rng_from_seed(seed);
    let re = random_real_field(g, &mut rng, 6.0);
    let im = random_real_field(g, &mut rng, 6.0);
    (&re + &im.scaled(Complex64::new(0.0, 1.0))).project_mean_zero()
}

fn close(a: &Field, b: &Field, tol: f64) -> bool {
    a.l2_distance(b) <= tol * a.l2_norm().max(b.l2_norm()).max(1.0)
}

fn time() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![-10.0, -1.0, -0.1, 0.1, 1.0, 10.0])
}

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Plus), Just(Branch::Minus)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transforms_are_unitary_and_invertible(seed in any::<u64>(), l in 3.0f64..40.0) {
        let g = grid(32, l);
        let f = field(&g, seed);
        let hat = f.to_fourier();
        prop_assert!((hat.l2_norm() - f.l2_norm()).abs() <= 1e-13 * f.l2_norm());
        prop_assert!(close(&hat.to_physical(), &f, 1e-14));
    }

    #[test]
    fn propagator_is_unitary_group(seed in any::<u64>(), t in time(), s in time(), b in branch()) {
        let g = grid(32, 10.0);
        let f = field(&g, seed);
        let ut = propagator(&f, t, b);
        prop_assert!((ut.l2_norm() - f.l2_norm()).abs() <= 1e-13 * f.l2_norm());
        let composed = propagator(&ut, s, b);
        prop_assert!(close(&composed, &propagator(&f, t + s, b), 1e-11));
        let back = propagator(&ut, -t, b);
        prop_assert!(close(&back, &f, 1e-11));
    }

    #[test]
    fn multipliers_compose(seed in any::<u64>(), s in 0.0f64..3.0, t in time()) {
        let g = grid(32, 12.0);
        let f = field(&g, seed);
        let a = Symbol::bessel_potential(s);
        let b = Symbol::propagator(t, Branch::Minus);
        let two_step = apply_multiplier(
            &apply_multiplier(&f, &a, Representation::Fourier).unwrap(),
            &b,
            Representation::Physical,
        )
        .unwrap();
        let one_step = apply_multiplier(&f, &a.then(&b), Representation::Physical).unwrap();
        prop_assert!(close(&two_step, &one_step, 1e-13));
    }

    #[test]
    fn riesz_algebra(seed in any::<u64>()) {
        let g = grid(32, 9.0);
        let f = field(&g, seed);
        let mut minus_f = riesz(&riesz(&f, Axis::X1), Axis::X1);
        minus_f += &riesz(&riesz(&f, Axis::X2), Axis::X2);
        prop_assert!(close(&minus_f, &(-&f), 1e-13));
        let mut d1 = riesz(&derivative(&f, Axis::X1), Axis::X1);
        d1 += &riesz(&derivative(&f, Axis::X2), Axis::X2);
        prop_assert!(close(&d1, &fractional_derivative(&f, 1.0).unwrap(), 1e-13));
    }

    #[test]
    fn reformulations_round_trip(seed in any::<u64>(), amp in 0.01f64..10.0) {
        let g = grid(32, 15.0);
        let mut rng = rng_from_seed(seed);
        let s = random_etaphi(&g, &mut rng, 8.0);
        let s = s.map_fields(|f| f.scaled(Complex64::new(amp, 0.0)));
        let uv = diagonalize(&s).unwrap();
        prop_assert!(s.l2_distance(&undiagonalize(&uv).unwrap()) <= 1e-13 * s.l2_norm());
        let w = differentiate_to_w(&uv).unwrap();
        let (cu, cv) = curl_residual(&w);
        prop_assert!(cu.max(cv) <= 1e-14 * w.l2_norm().max(1.0));
        prop_assert!(uv.l2_distance(&reconstruct_from_w(&w).unwrap()) <= 1e-13 * uv.l2_norm());
        prop_assert!(uv.conjugation_defect() <= 1e-14);
        prop_assert!(w_from_etaphi(&s).unwrap().conjugation_defect() <= 1e-14);
    }

    #[test]
    fn omega_is_homogeneous(seed in any::<u64>(), re in -5.0f64..5.0, im in -5.0f64..5.0, j in 1usize..=5) {
        prop_assume!(re.hypot(im) > 1e-3);
        let g = grid(16, 8.0);
        let f = field(&g, seed);
        let times = vec![0.0, 0.1, 0.2, 0.3];
        let states = times.iter().map(|&t| propagator(&f, t, Branch::Minus)).collect();
        let meta = TrajectoryMeta { stepper: "exact".into(), dt: 0.1, dealias_fraction: 1.0 };
        let traj = Trajectory::new(times, states, meta).unwrap();
        let a = Complex64::new(re, im);
        let scaled = traj.try_map(|f| Ok(f.scaled(a))).unwrap();
        let idx = SobolevIndices::new(1.6).unwrap();
        let base = omega(&traj, &idx, j).unwrap();
        let big = omega(&scaled, &idx, j).unwrap();
        prop_assert!((big - a.norm() * base).abs() <= 1e-12 * big.max(1e-300));
    }

    #[test]
    fn ratios_ignore_data_scale(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let g = grid(16, 8.0);
        let f = field(&g, seed);
        let big = f.scaled(Complex64::new(0.0, scale));
        let a = smoothing_ratio(&f, 0.5, 0.05).unwrap();
        prop_assert!((a - smoothing_ratio(&big, 0.5, 0.05).unwrap()).abs() <= 1e-12 * a);
        let a = strichartz_ratio(&f, 0.25, 0.5, 0.05).unwrap();
        prop_assert!((a - strichartz_ratio(&big, 0.25, 0.5, 0.05).unwrap()).abs() <= 1e-12 * a);
    }

    #[test]
    fn leibniz_defect_vanishes_for_constant_factor(
        seed in any::<u64>(), c in -3.0f64..3.0, m in 0.05f64..0.95, p in 1.1f64..8.0,
    ) {
        prop_assume!(c.abs() > 1e-3);
        let g = grid(32, 10.0);
        let f = field(&g, seed);
        let k = Field::from_real_fn(&g, |_, _| c);
        prop_assert!(frac_leibniz_defect(&f, &k, m, p).unwrap() <= 1e-12);
    }

    #[test]
    fn dealias_is_idempotent(seed in any::<u64>(), n in prop::sample::select(vec![16usize, 32, 48])) {
        let g = grid(n, 7.0);
        let mut rng = rng_from_seed(seed);
        let f = random_real_field(&g, &mut rng, n as f64 / 2.0);
        let once = dealias(&f);
        let twice = dealias(&once);
        prop_assert_eq!(twice.data(), once.data());
    }
}
