//! One-dimensional quadrature: adaptive Gauss-Kronrod (7/15) and fixed
//! Gauss-Legendre panels for oscillatory integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Bisection depth limit of [`gauss_kronrod`].
pub const MAX_DEPTH: u32 = 30;

/// Largest number of pieces [`gauss_kronrod`] keeps before giving up.
pub const MAX_PIECES: usize = 20_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

/// Gauss weights for the odd-indexed Kronrod nodes (the last is the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral estimate with its error bound and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// 15-point Kronrod value, the embedded 7-point Gauss value and the
/// Kronrod integral of `|f|`.
fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (lo, hi) = (f(c - dx), f(c + dx));
        let s = lo + hi;
        k += s * WGK[j];
        abs += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, g * h, abs * h.abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn piece(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, depth: u32) -> Piece {
    let (k, g, abs) = gk15(f, a, b);
    let mut error = (k - g).norm();
    // differences at roundoff level carry no information
    if error <= 50.0 * f64::EPSILON * abs {
        error = 0.0;
    }
    Piece {
        a,
        b,
        value: k,
        error,
        depth,
    }
}

/// Adaptive Gauss-Kronrod quadrature of a complex integrand on `[a, b]`.
///
/// The piece with the largest Kronrod-Gauss difference is bisected until
/// the summed difference is below `max(abs_tol, rel_tol |I|)`.
pub fn gauss_kronrod(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("interval [{a}, {b}] must be finite")));
    }
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut heap = BinaryHeap::new();
    heap.push(piece(&f, lo, hi, 0));
    let mut evaluations = 15;
    loop {
        let value: Complex64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(rel_tol * value.norm()) {
            return Ok(QuadResult {
                value: value * sign,
                error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("at least one piece");
        if worst.depth >= MAX_DEPTH || heap.len() >= MAX_PIECES {
            return Err(Error::Quadrature(format!(
                "no convergence on [{}, {}] at depth {} with {} pieces (total error {error:.3e})",
                worst.a,
                worst.b,
                worst.depth,
                heap.len() + 1
            )));
        }
        let m = 0.5 * (worst.a + worst.b);
        heap.push(piece(&f, worst.a, m, worst.depth + 1));
        heap.push(piece(&f, m, worst.b, worst.depth + 1));
        evaluations += 30;
    }
}

/// Real-valued convenience wrapper around [`gauss_kronrod`].
pub fn gauss_kronrod_real(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    gauss_kronrod(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol).map(|r| r.value.re)
}

/// Fixed Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GlRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GlRule {
    pub fn new(points: usize) -> Self {
        let n = NonZeroUsize::new(points.max(1)).expect("at least one point");
        let (nodes, weights) = GaussLegendre::new(n)
            .as_node_weight_pairs()
            .iter()
            .copied()
            .unzip();
        Self { nodes, weights }
    }

    pub fn points(&self) -> usize {
        self.nodes.len()
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    }

    /// Sum of panel integrals over consecutive breakpoints.
    pub fn integrate_panels(&self, breaks: &[f64], f: impl Fn(f64) -> Complex64) -> Complex64 {
        breaks
            .windows(2)
            .map(|p| self.integrate(p[0], p[1], &f))
            .sum()
    }
}

/// Breakpoints on `[a, b]` whose spacing is at most `max_len` at both ends
/// of every panel.
pub fn adaptive_breaks(a: f64, b: f64, max_len: impl Fn(f64) -> f64) -> Vec<f64> {
    let floor = 1e-12 * (b - a).abs().max(1.0);
    let mut out = vec![a];
    let mut x = a;
    while x < b {
        let mut step = max_len(x).max(floor);
        for _ in 0..60 {
            let end = max_len((x + step).min(b)).max(floor);
            if end >= step {
                break;
            }
            step = end;
        }
        x = (x + step).min(b);
        out.push(x);
    }
    out
}
