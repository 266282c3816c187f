//! Cross-checks of the spectral and quadrature machinery against
//! independent evaluations.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use bql_core::data::{random_etaphi, rng_from_seed};
use bql_core::dynamics::{nonlinearity_uv, rhs_etaphi, rhs_uv};
use bql_core::estimates::quad::gauss_kronrod;
use bql_core::estimates::{
    bessel_j, bessel_y0, frac_leibniz_defect, h_envelope_check, hankel_envelope, kernel_sup,
    kernel_value, log_log_fit, radial_hat, van_der_corput_check, KernelOptions, RadialProfile,
};
use bql_core::reformulations::{diagonalize, undiagonalize, StateEtaPhi, StateUV};
use bql_core::spectral::phi_symbol;
use bql_core::{Field, Grid, GridSpec, Representation};

/// A trigonometric polynomial stored as integer wavevector -> coefficient.
#[derive(Clone, Default)]
struct Modes {
    l: f64,
    c: BTreeMap<(i64, i64), Complex64>,
}

impl Modes {
    fn single(l: f64, j: (i64, i64), a: Complex64) -> Self {
        let mut c = BTreeMap::new();
        c.insert(j, a);
        Self { l, c }
    }

    fn k(&self, j: (i64, i64)) -> (f64, f64) {
        let s = 2.0 * PI / self.l;
        (s * j.0 as f64, s * j.1 as f64)
    }

    fn apply(&self, sym: impl Fn(f64, f64) -> Complex64) -> Self {
        let c = self
            .c
            .iter()
            .map(|(&j, &a)| {
                let (kx, ky) = self.k(j);
                (j, sym(kx, ky) * a)
            })
            .collect();
        Self { l: self.l, c }
    }

    fn add(&self, other: &Self, scale: f64) -> Self {
        let mut out = self.clone();
        for (&j, &a) in &other.c {
            *out.c.entry(j).or_default() += scale * a;
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Modes {
            l: self.l,
            c: BTreeMap::new(),
        };
        for (&(a0, a1), &x) in &self.c {
            for (&(b0, b1), &y) in &other.c {
                *out.c.entry((a0 + b0, a1 + b1)).or_default() += x * y;
            }
        }
        out
    }

    fn dx(&self, axis: usize) -> Self {
        self.apply(|kx, ky| Complex64::new(0.0, if axis == 0 { kx } else { ky }))
    }

    fn abs_d(&self) -> Self {
        self.apply(|kx, ky| Complex64::new(kx.hypot(ky), 0.0))
    }

    fn riesz(&self, axis: usize) -> Self {
        self.apply(|kx, ky| {
            let k = kx.hypot(ky);
            if k == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -(if axis == 0 { kx } else { ky }) / k)
            }
        })
    }

    fn field(&self, g: &Grid) -> Field {
        Field::from_fn(g, |x, y| {
            self.c
                .iter()
                .map(|(&j, &a)| {
                    let (kx, ky) = self.k(j);
                    a * Complex64::from_polar(1.0, kx * x + ky * y)
                })
                .sum()
        })
    }
}

fn grid() -> (Grid, f64) {
    let l = 2.0 * PI * 1.5;
    (Grid::new(GridSpec::square(32, l)).unwrap(), l)
}

fn dist(a: &Field, b: &Field) -> f64 {
    a.to_physical().l2_distance(&b.to_physical())
}

#[test]
fn two_mode_nonlinearity_matches_sparse_convolution() {
    let (g, l) = grid();
    let u = Modes::single(l, (2, -1), Complex64::new(0.7, 0.2));
    let v = Modes::single(l, (-1, 3), Complex64::new(-0.3, 0.5));
    let gm = u.add(&v, -1.0).abs_d();
    let sum = u.add(&v, 1.0);
    let (h1, h2) = (sum.dx(0), sum.dx(1));
    let (l1, l2) = (gm.mul(&h1), gm.mul(&h2));
    let l3 = h1.mul(&h1).add(&h2.mul(&h2), 1.0);
    let n1 = l1
        .riesz(0)
        .add(&l2.riesz(1), 1.0)
        .apply(|_, _| Complex64::new(-0.5, 0.0));
    let n2 = l3.apply(|_, _| Complex64::new(0.25, 0.0));

    let state = StateUV {
        u: u.field(&g),
        v: v.field(&g),
    };
    let (a1, a2) = nonlinearity_uv(&state).unwrap();
    assert!(dist(&a1, &n1.field(&g)) < 1e-12);
    assert!(dist(&a2, &n2.field(&g)) < 1e-12);
}

#[test]
fn etaphi_rhs_matches_sparse_evaluation() {
    let (g, l) = grid();
    let real = |j: (i64, i64), a: Complex64| {
        Modes::single(l, j, a).add(&Modes::single(l, (-j.0, -j.1), a.conj()), 1.0)
    };
    let eta = real((1, 2), Complex64::new(0.4, 0.1));
    let phi =
        real((3, 0), Complex64::new(0.0, 0.25)).add(&real((0, 1), Complex64::new(0.3, 0.0)), 1.0);
    let lap = |m: &Modes| m.apply(|kx, ky| Complex64::new(-(kx * kx + ky * ky), 0.0));
    let (p1, p2) = (phi.dx(0), phi.dx(1));
    let div = eta.mul(&p1).dx(0).add(&eta.mul(&p2).dx(1), 1.0);
    let eta_t = Modes::default()
        .add(&lap(&phi), -1.0)
        .add(&lap(&lap(&phi)), 1.0)
        .add(&div, -1.0);
    let phi_t = Modes::default()
        .add(&eta, -1.0)
        .add(&lap(&eta), 1.0)
        .add(&p1.mul(&p1).add(&p2.mul(&p2), 1.0), -0.5);
    let (eta_t, phi_t) = (Modes { l, ..eta_t }, Modes { l, ..phi_t });

    let s = StateEtaPhi {
        eta: eta.field(&g),
        phi: phi.field(&g),
    };
    let (a, b) = rhs_etaphi(&s).unwrap();
    assert!(dist(&a, &eta_t.field(&g)) < 1e-12 * a.l2_norm());
    assert!(dist(&b, &phi_t.field(&g)) < 1e-12 * b.l2_norm());
}

/// `(u_t, v_t) = (-i phi(D) u + F_u, +i phi(D) v + F_v)` mapped back with the
/// linear map `undiagonalize` equals the original right-hand side.
#[test]
fn etaphi_rhs_is_image_of_diagonal_system() {
    let g = Grid::new(GridSpec::square(48, 12.0)).unwrap();
    let mut rng = rng_from_seed(11);
    let s = random_etaphi(&g, &mut rng, 8.0);
    let uv = diagonalize(&s).unwrap();
    let (fu, fv) = rhs_uv(&uv).unwrap();
    let linear = |f: &Field, sign: f64| {
        let mut out = f.to_fourier();
        for (z, &k) in out.data_mut().iter_mut().zip(g.kabs()) {
            *z *= Complex64::new(0.0, sign * phi_symbol(k));
        }
        out
    };
    let u_t = &linear(&uv.u, -1.0) + &fu;
    let v_t = &linear(&uv.v, 1.0) + &fv;
    let image = undiagonalize(&StateUV {
        u: u_t.project_mean_zero(),
        v: v_t.project_mean_zero(),
    })
    .unwrap();
    let (eta_t, phi_t) = rhs_etaphi(&s).unwrap();
    let scale = eta_t.l2_norm().max(1.0);
    assert!(dist(&image.eta, &eta_t.project_mean_zero()) < 1e-10 * scale);
    assert!(dist(&image.phi, &phi_t.project_mean_zero()) < 1e-10 * scale);
}

/// `sum_{j <= 40} (-1)^j (r/2)^(2j + m) / (j! Gamma(j + m + 1))`.
fn series_j(m: f64, r: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0;
    for j in 0..=40 {
        if j > 0 {
            fact *= j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum +=
            sign * (0.5 * r).powf(2.0 * j as f64 + m) / (fact * libm::tgamma(j as f64 + m + 1.0));
    }
    sum
}

#[test]
fn bessel_j_matches_series_and_libm() {
    for m in [0.0, 0.25, 1.0, 1.5, 4.0] {
        for i in 0..=25 {
            let r = 0.2 * i as f64;
            assert!(
                (bessel_j(m, r).unwrap() - series_j(m, r)).abs() < 1e-10,
                "m {m} r {r}"
            );
        }
    }
    for r in [7.5, 40.0, 333.3, 1000.0] {
        assert!(
            (bessel_j(0.0, r).unwrap() - libm::j0(r)).abs() < 1e-10,
            "r {r}"
        );
        assert!(
            (bessel_j(1.0, r).unwrap() - libm::j1(r)).abs() < 1e-10,
            "r {r}"
        );
        assert!(
            (bessel_j(3.0, r).unwrap() - libm::jn(3, r)).abs() < 1e-10,
            "r {r}"
        );
    }
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn bessel_amplitude_decays_like_inverse_square_root() {
    // J_0^2 + J_1^2 removes the oscillation to leading order
    let radii = log_grid(50.0, 500.0, 15);
    let amp: Vec<f64> = radii
        .iter()
        .map(|&r| bessel_j(0.0, r).unwrap().hypot(bessel_j(1.0, r).unwrap()))
        .collect();
    let slope = log_log_fit(&radii, &amp).unwrap().slope;
    assert!((slope + 0.5).abs() < 0.02, "slope {slope}");
}

#[test]
fn small_argument_exponent() {
    let radii = log_grid(1e-4, 1e-2, 7);
    for m in [0.5, 1.0, 2.5] {
        let vals: Vec<f64> = radii.iter().map(|&r| bessel_j(m, r).unwrap()).collect();
        let slope = log_log_fit(&radii, &vals).unwrap().slope;
        assert!((slope - m).abs() < 0.01);
    }
}

#[test]
fn hankel_envelope_is_positive_and_smooth() {
    let radii: Vec<f64> = (0..500).map(|i| 1.0 + i as f64).collect();
    let mags: Vec<f64> = radii
        .iter()
        .map(|&r| hankel_envelope(r).unwrap().norm())
        .collect();
    assert!(mags.iter().all(|m| *m > 0.0));
    // monotone decay without oscillation
    assert!(mags.windows(2).all(|w| w[1] < w[0]));
    // J_0 = Re(exp(ir) h) with the same envelope
    for r in [3.0, 50.0, 420.0] {
        let h = hankel_envelope(r).unwrap();
        let z = Complex64::from_polar(1.0, r) * h;
        let scale = z.norm();
        assert!((z.re / scale - libm::j0(r) / scale).abs() < 1e-10);
        assert!((z.im / scale - bessel_y0(r).unwrap() / scale).abs() < 1e-10);
    }
    let k0 = h_envelope_check(0, &log_grid(1.0, 500.0, 20)).unwrap();
    assert!((k0.fitted_exponent + 0.5).abs() < 0.05);
    assert!(h_envelope_check(1, &[0.5, 2.0]).is_err());
}

#[test]
fn radial_transform_matches_grid_fft() {
    // f(s) = s^2 exp(-s^2), sampled around the centre of a large box
    let profile = RadialProfile::new(9.0, |s| Complex64::new(s * s * (-s * s).exp(), 0.0)).unwrap();
    let at_zero = radial_hat(&profile, 0.0).unwrap();
    assert!((at_zero.re - 0.5).abs() < 1e-12);

    let (n, l) = (256, 40.0);
    let g = Grid::new(GridSpec::square(n, l)).unwrap();
    let c = 0.5 * l;
    let f = Field::from_real_fn(&g, |x, y| {
        let s2 = (x - c).powi(2) + (y - c).powi(2);
        s2 * (-s2).exp()
    });
    let spec = f.to_fourier();
    let root_n = (g.len() as f64).sqrt();
    let cell = g.cell();
    for m in [1usize, 4, 9, 15] {
        let r = 2.0 * PI * m as f64 / l;
        // sum_j f(x_j) exp(-i r x_j) dA, shifted back to the centre
        let shift = Complex64::from_polar(1.0, r * c);
        let fft = spec.data()[m] * root_n * cell * shift / (2.0 * PI);
        let quad = radial_hat(&profile, r).unwrap();
        assert!(
            (fft - quad).norm() < 1e-4 * quad.norm(),
            "r {r}: {fft} vs {quad}"
        );
    }
}

/// `J_0` of a complex argument from `(1/pi) int_0^pi cos(z sin t) dt`.
fn j0_complex(z: Complex64) -> Complex64 {
    let panels = (z.norm() / 2.0).ceil().max(1.0) as usize;
    let w = PI / panels as f64;
    (0..panels)
        .map(|p| {
            let a = p as f64 * w;
            gauss_kronrod(|th| (z * th.sin()).cos(), a, a + w, 1e-15, 1e-13)
                .unwrap()
                .value
        })
        .sum::<Complex64>()
        / PI
}

/// The kernel integral along the rotated ray `s = rho exp(i theta)`, where
/// `exp(i t s^3)` decays. The angle shrinks for `r > t` to keep the growth of
/// `J_0` off the real axis mild.
fn rotated_kernel(t: f64, beta: f64, r: f64) -> Complex64 {
    let theta = if r > t {
        (9.0 * t.sqrt() / (r - t).powf(1.5)).min(PI / 6.0)
    } else {
        PI / 6.0
    };
    let e = Complex64::from_polar(1.0, theta);
    let rho_max = (60.0 / (t * (3.0 * theta).sin())).cbrt() + 1.0;
    let f = |rho: f64| {
        let s = e * rho;
        s.powf(beta + 1.0) * (Complex64::i() * t * (s * s * s + s)).exp() * j0_complex(r * s) * e
    };
    let n = 200;
    (0..n)
        .map(|i| {
            let a = rho_max * i as f64 / n as f64;
            let b = rho_max * (i + 1) as f64 / n as f64;
            gauss_kronrod(f, a, b, 1e-14, 1e-12).unwrap().value
        })
        .sum()
}

#[test]
fn kernel_matches_rotated_contour() {
    let opts = KernelOptions {
        t_min: 1e-3,
        ..Default::default()
    };
    for (t, beta, r) in [
        (2.0, 0.0, 0.0),
        (2.0, 0.5, 7.3),
        (2.0, 1.0, 16.0),
        (5.0, 0.25, 3.0),
        (20.0, 0.5, 30.0),
        (50.0, 0.0, 60.0),
        (0.008, 1.0, 0.0),
    ] {
        let direct = kernel_value(t, beta, r, &opts).unwrap();
        let rotated = rotated_kernel(t, beta, r);
        assert!(
            (direct - rotated).norm() < 1e-9 * rotated.norm(),
            "t {t} beta {beta} r {r}: {direct} vs {rotated}"
        );
    }
}

#[test]
fn kernel_sup_ordering_in_beta_matches_direct_evaluation() {
    let opts = KernelOptions {
        t_min: 1e-3,
        ..Default::default()
    };
    let betas = [0.0, 0.25, 0.5, 0.75];
    let sups = |t: f64| -> Vec<f64> {
        betas
            .iter()
            .map(|&b| {
                let s = kernel_sup(t, b, 16.0, &opts).unwrap();
                let check = rotated_kernel(t, b, s.r).norm();
                assert!((s.value - check).abs() < 1e-8 * check);
                s.value
            })
            .collect()
    };
    // derivative mass wins only while t s^3 has not yet pushed the
    // stationary set to small s
    let small = sups(0.008);
    assert!(small.windows(2).all(|w| w[1] > w[0]), "{small:?}");
    let large = sups(2.0);
    assert!(large.windows(2).all(|w| w[1] < w[0]), "{large:?}");
}

#[test]
fn kernel_sup_halves_for_beta_one() {
    let opts = KernelOptions::default();
    for t in [1.0, 2.0] {
        let a = kernel_sup(t, 1.0, 8.0 * t, &opts).unwrap().value;
        let b = kernel_sup(2.0 * t, 1.0, 16.0 * t, &opts).unwrap().value;
        assert!((b / a - 0.5).abs() < 0.05, "t {t}: ratio {}", b / a);
    }
}

#[test]
fn kernel_sup_scales_by_two_thirds_power_at_small_time() {
    let opts = KernelOptions {
        t_min: 1e-3,
        ..Default::default()
    };
    let a = kernel_sup(0.004, 0.0, 1.0, &opts).unwrap().value;
    let b = kernel_sup(0.008, 0.0, 1.0, &opts).unwrap().value;
    let target = 2f64.powf(-2.0 / 3.0);
    assert!((b / a - target).abs() < 0.1 * target);
}

#[test]
fn van_der_corput_scaling() {
    // nondegenerate stationary point at u = 1
    let phase = |u: f64| u * u * u - 3.0 * u;
    let amp = |u: f64| (-(u - 1.0).powi(2)).exp();
    let rep = van_der_corput_check(&phase, &amp, 0.5, 2.0, &[1e3, 4e3, 1.6e4]).unwrap();
    for w in rep.integrals.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 0.075, "{:?}", rep.integrals);
    }
    let scaled =
        van_der_corput_check(&phase, &|u| 7.0 * amp(u), 0.5, 2.0, &[1e3, 4e3, 1.6e4]).unwrap();
    for (a, b) in rep.ratios.iter().zip(&scaled.ratios) {
        assert!((a - b).abs() < 1e-12 * a);
    }
}

#[test]
fn fresnel_normalized_integral_settles() {
    let lambdas = log_grid(1e2, 1e5, 7);
    let rep = van_der_corput_check(&|x| x * x, &|_| 1.0, 0.0, 1.0, &lambdas).unwrap();
    let limit = PI.sqrt() / 2.0;
    assert!(rep.max_ratio < 1.0);
    assert!((rep.normalized[6] - limit).abs() < (rep.normalized[0] - limit).abs() + 1e-12);
    assert!((rep.normalized[6] - limit).abs() < 5e-3);
}

#[test]
fn leibniz_defect_of_two_modes() {
    let (g, _) = grid();
    let (a, b) = ((2, 1), (-3, 2));
    let f = Field::plane_wave(&g, a.0, a.1);
    let h = Field::plane_wave(&g, b.0, b.1);
    let k = |j: (i64, i64)| 2.0 * PI / g.spec().lx * ((j.0 * j.0 + j.1 * j.1) as f64).sqrt();
    for m in [0.3, 0.5, 0.9] {
        let ka = k(a);
        let kb = k(b);
        let ks = k((a.0 + b.0, a.1 + b.1));
        let expected = (ks.powf(m) - ka.powf(m) - kb.powf(m)).abs() / ka.powf(m);
        for p in [1.5, 2.0, 4.0] {
            let got = frac_leibniz_defect(&f, &h, m, p).unwrap();
            assert!(
                (got - expected).abs() < 1e-10,
                "m {m} p {p}: {got} vs {expected}"
            );
        }
    }
    let same = frac_leibniz_defect(&f, &f, 0.5, 2.0).unwrap();
    assert!(same.is_finite() && same > 0.0);
}

#[test]
fn leibniz_defect_bounded_over_random_ensemble() {
    let g = Grid::new(GridSpec::square(64, 16.0)).unwrap();
    let mut rng = rng_from_seed(21);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let f = random_etaphi(&g, &mut rng, 10.0);
        let r = frac_leibniz_defect(&f.eta, &f.phi, 0.5, 3.0).unwrap();
        assert!(r.is_finite());
        worst = worst.max(r);
    }
    assert!(worst < 10.0, "worst ratio {worst}");
}

#[test]
fn physical_and_fourier_zero_fields_agree() {
    let (g, _) = grid();
    let z = Field::zeros(&g, Representation::Fourier);
    assert_eq!(frac_leibniz_defect(&z, &z, 0.5, 2.0).unwrap(), 0.0);
}
