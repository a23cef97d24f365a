//! One-dimensional rules: Gauss-Legendre, periodic trapezoid and adaptive
//! Gauss-Kronrod.

use std::f64::consts::PI;

use crate::scalar::C64;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[a, b]`,
/// by Newton iteration on `P_n` from the Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(n > 0);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid - half * x, half * w));
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// `n` equispaced nodes on the period `[a, b)` with equal weights.
pub fn trapezoid_periodic(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(n > 0);
    let h = (b - a) / n as f64;
    (0..n).map(|i| (a + i as f64 * h, h)).collect()
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its embedded 7-point Gauss error estimate.
fn gk15(f: &dyn Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * GK_WEIGHTS[7];
    let mut gauss = fc * G_WEIGHTS[3];
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let s = f(mid - dx) + f(mid + dx);
        kron += s * GK_WEIGHTS[i];
        if i % 2 == 1 {
            gauss += s * G_WEIGHTS[i / 2];
        }
    }
    (kron * half, ((kron - gauss) * half).norm())
}

/// Adaptive Gauss-Kronrod on `[a, b]` by recursive bisection until the
/// local error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn adaptive_gk(f: &dyn Fn(f64) -> C64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> C64 {
    let (whole, err) = gk15(f, a, b);
    let tol = abs_tol.max(rel_tol * whole.norm());
    refine(f, a, b, whole, err, tol, 0)
}

const MAX_DEPTH: u32 = 48;

fn refine(f: &dyn Fn(f64) -> C64, a: f64, b: f64, whole: C64, err: f64, tol: f64, depth: u32) -> C64 {
    if err <= tol || depth >= MAX_DEPTH {
        return whole;
    }
    let m = 0.5 * (a + b);
    let (left, el) = gk15(f, a, m);
    let (right, er) = gk15(f, m, b);
    refine(f, a, m, left, el, 0.5 * tol, depth + 1) + refine(f, m, b, right, er, 0.5 * tol, depth + 1)
}
