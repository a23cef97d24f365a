//! Complexified quaternions `H ⊗ C`, realised as 2x2 complex matrices.
//!
//! A point is stored by its matrix entries `z11, z12, z21, z22`. The
//! coordinate form `z^0..z^3` is related to the entries by
//!
//! ```text
//! ⎡z11 z12⎤   ⎡z0 - i z3   -i z1 - z2⎤
//! ⎣z21 z22⎦ = ⎣-i z1 + z2   z0 + i z3⎦
//! ```
//!
//! so that `N(Z) = det Z = z0² + z1² + z2² + z3²`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::C64;

/// Below this `|N(Z)|` a matrix is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Eigenvalues of `ZZ* - R²` smaller than this (times `R²`) in magnitude
/// put a point on the boundary of `D^±_R`.
pub const DEFINITENESS_TOL: f64 = 1e-10;

const I: C64 = Complex { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexQuaternion {
    pub z11: C64,
    pub z12: C64,
    pub z21: C64,
    pub z22: C64,
}

impl ComplexQuaternion {
    pub const fn new(z11: C64, z12: C64, z21: C64, z22: C64) -> Self {
        Self { z11, z12, z21, z22 }
    }

    pub fn zero() -> Self {
        Self::new(C64::zero(), C64::zero(), C64::zero(), C64::zero())
    }

    pub fn identity() -> Self {
        Self::diagonal(C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn diagonal(d1: C64, d2: C64) -> Self {
        Self::new(d1, C64::zero(), C64::zero(), d2)
    }

    pub fn scalar(s: C64) -> Self {
        Self::diagonal(s, s)
    }

    /// Builds the matrix from the coordinates `z^0, z^1, z^2, z^3`.
    pub fn from_coords(z: [C64; 4]) -> Self {
        Self::new(
            z[0] - I * z[3],
            -I * z[1] - z[2],
            -I * z[1] + z[2],
            z[0] + I * z[3],
        )
    }

    pub fn to_coords(&self) -> [C64; 4] {
        [
            (self.z11 + self.z22) * 0.5,
            I * (self.z12 + self.z21) * 0.5,
            (self.z21 - self.z12) * 0.5,
            (self.z22 - self.z11) / (2.0 * I),
        ]
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.z11, self.z12, self.z21, self.z22]
    }

    /// `N(Z) = z11·z22 − z12·z21`.
    pub fn norm(&self) -> C64 {
        self.z11 * self.z22 - self.z12 * self.z21
    }

    pub fn adjugate(&self) -> Self {
        Self::new(self.z22, -self.z12, -self.z21, self.z11)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.norm() < SINGULAR_TOL {
            return Err(Error::SingularMatrix { norm: n.norm() });
        }
        Ok(self.adjugate().scale(n.inv()))
    }

    /// Conjugate transpose `Z*`.
    pub fn star(&self) -> Self {
        Self::new(
            self.z11.conj(),
            self.z21.conj(),
            self.z12.conj(),
            self.z22.conj(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.z11 * s, self.z12 * s, self.z21 * s, self.z22 * s)
    }

    pub fn trace(&self) -> C64 {
        self.z11 + self.z22
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Eigenvalues of the Hermitian matrix `ZZ*`, ascending. Their square
    /// roots are the singular values of `Z`.
    pub fn gram_eigenvalues(&self) -> [f64; 2] {
        let g = *self * self.star();
        let half_tr = 0.5 * (g.z11.re + g.z22.re);
        let half_diff = 0.5 * (g.z11.re - g.z22.re);
        let disc = half_diff.hypot(g.z12.norm());
        [half_tr - disc, half_tr + disc]
    }

    pub fn singular_values(&self) -> [f64; 2] {
        let [lo, hi] = self.gram_eigenvalues();
        [lo.max(0.0).sqrt(), hi.max(0.0).sqrt()]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (*self - *other).frobenius() <= tol
    }
}

impl Add for ComplexQuaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.z11 + o.z11,
            self.z12 + o.z12,
            self.z21 + o.z21,
            self.z22 + o.z22,
        )
    }
}

impl Sub for ComplexQuaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.z11 - o.z11,
            self.z12 - o.z12,
            self.z21 - o.z21,
            self.z22 - o.z22,
        )
    }
}

impl Neg for ComplexQuaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for ComplexQuaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.z11 * o.z11 + self.z12 * o.z21,
            self.z11 * o.z12 + self.z12 * o.z22,
            self.z21 * o.z11 + self.z22 * o.z21,
            self.z21 * o.z12 + self.z22 * o.z22,
        )
    }
}

/// An element `h = (a b; c d)` of `GL(2, H⊗C) ≅ GL(4, C)` together with the
/// blocks `(a' b'; c' d')` of `h^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub a: ComplexQuaternion,
    pub b: ComplexQuaternion,
    pub c: ComplexQuaternion,
    pub d: ComplexQuaternion,
    pub a_inv: ComplexQuaternion,
    pub b_inv: ComplexQuaternion,
    pub c_inv: ComplexQuaternion,
    pub d_inv: ComplexQuaternion,
}

type Mat4 = [[C64; 4]; 4];

fn blocks_to_mat(
    a: &ComplexQuaternion,
    b: &ComplexQuaternion,
    c: &ComplexQuaternion,
    d: &ComplexQuaternion,
) -> Mat4 {
    [
        [a.z11, a.z12, b.z11, b.z12],
        [a.z21, a.z22, b.z21, b.z22],
        [c.z11, c.z12, d.z11, d.z12],
        [c.z21, c.z22, d.z21, d.z22],
    ]
}

fn mat_block(m: &Mat4, row: usize, col: usize) -> ComplexQuaternion {
    ComplexQuaternion::new(
        m[row][col],
        m[row][col + 1],
        m[row + 1][col],
        m[row + 1][col + 1],
    )
}

/// Gauss-Jordan elimination with partial pivoting.
fn invert4(m: &Mat4) -> Option<Mat4> {
    let mut a = *m;
    let mut inv = [[C64::zero(); 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[pivot][col].norm() < SINGULAR_TOL {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].inv();
        for j in 0..4 {
            a[col][j] *= p;
            inv[col][j] *= p;
        }
        for i in 0..4 {
            if i != col {
                let f = a[i][col];
                if f != C64::zero() {
                    for j in 0..4 {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

impl GroupElement {
    pub fn new(
        a: ComplexQuaternion,
        b: ComplexQuaternion,
        c: ComplexQuaternion,
        d: ComplexQuaternion,
    ) -> Result<Self> {
        let inv = invert4(&blocks_to_mat(&a, &b, &c, &d)).ok_or(Error::SingularMatrix { norm: 0.0 })?;
        Ok(Self {
            a,
            b,
            c,
            d,
            a_inv: mat_block(&inv, 0, 0),
            b_inv: mat_block(&inv, 0, 2),
            c_inv: mat_block(&inv, 2, 0),
            d_inv: mat_block(&inv, 2, 2),
        })
    }

    pub fn identity() -> Self {
        let one = ComplexQuaternion::identity();
        let zero = ComplexQuaternion::zero();
        Self::new(one, zero, zero, one).expect("identity is invertible")
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a_inv,
            b: self.b_inv,
            c: self.c_inv,
            d: self.d_inv,
            a_inv: self.a,
            b_inv: self.b,
            c_inv: self.c,
            d_inv: self.d,
        }
    }

    /// Block matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    /// Max-entry distance of `h · h^{-1}` from the 4x4 identity.
    #[allow(clippy::needless_range_loop)]
    pub fn inverse_residual(&self) -> f64 {
        let h = blocks_to_mat(&self.a, &self.b, &self.c, &self.d);
        let g = blocks_to_mat(&self.a_inv, &self.b_inv, &self.c_inv, &self.d_inv);
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let mut s = C64::zero();
                for k in 0..4 {
                    s += h[i][k] * g[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Frobenius distance of the 4x4 matrix from the identity.
    pub fn distance_from_identity(&self) -> f64 {
        let one = ComplexQuaternion::identity();
        ((self.a - one).frobenius().powi(2)
            + self.b.frobenius().powi(2)
            + self.c.frobenius().powi(2)
            + (self.d - one).frobenius().powi(2))
        .sqrt()
    }

    /// `Z ↦ (aZ + b)(cZ + d)^{-1}`.
    pub fn act(&self, z: &ComplexQuaternion) -> Result<ComplexQuaternion> {
        let den = (self.c * *z + self.d).inverse()?;
        Ok((self.a * *z + self.b) * den)
    }

    /// The same map written through the inverse blocks,
    /// `Z ↦ (a' − Z c')^{-1}(−b' + Z d')`.
    pub fn act_via_inverse(&self, z: &ComplexQuaternion) -> Result<ComplexQuaternion> {
        let left = (self.a_inv - *z * self.c_inv).inverse()?;
        Ok(left * (-self.b_inv + *z * self.d_inv))
    }
}

/// Which of the two domains `D^+_R = {ZZ* < R²}` or `D^-_R = {ZZ* > R²}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainSign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Inside,
    Outside,
    /// `ZZ* − R²` has an eigenvalue within tolerance of zero.
    Boundary,
}

/// Definiteness test of `ZZ* − R²·1` through the eigenvalues of `ZZ*`.
pub fn in_domain(z: &ComplexQuaternion, radius: f64, sign: DomainSign) -> Membership {
    let r2 = radius * radius;
    let tol = DEFINITENESS_TOL * r2.max(1.0);
    let shifted = z.gram_eigenvalues().map(|e| e - r2);
    let inside = match sign {
        DomainSign::Plus => shifted.iter().all(|&e| e < -tol),
        DomainSign::Minus => shifted.iter().all(|&e| e > tol),
    };
    if inside {
        Membership::Inside
    } else if shifted.iter().any(|e| e.abs() <= tol) {
        Membership::Boundary
    } else {
        Membership::Outside
    }
}

/// Distance of `Z` from the Shilov boundary `U(2)_R`, measured on singular
/// values: `R − σ_max` for `D^+_R`, `σ_min − R` for `D^-_R`. Negative when
/// `Z` is not in the requested domain.
pub fn domain_margin(z: &ComplexQuaternion, radius: f64, sign: DomainSign) -> f64 {
    let [lo, hi] = z.singular_values();
    match sign {
        DomainSign::Plus => radius - hi,
        DomainSign::Minus => lo - radius,
    }
}

/// A chart point on an integration cycle together with the density of the
/// pulled-back volume form there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CyclePoint {
    pub point: ComplexQuaternion,
    pub weight: C64,
}

/// Parameter ranges of the `U(2)_R` chart `(φ, θ, ξ1, ξ2)`.
pub const U2_RANGES: [(f64, f64); 4] = [(0.0, PI), (0.0, PI / 2.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)];

/// Parameter ranges of the `S^3_R` chart `(θ, ξ1, ξ2)`.
pub const S3_RANGES: [(f64, f64); 3] = [(0.0, PI / 2.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)];

/// Sign fixing the orientation of `U(2)_R`; with it the chart gives
/// `∫ dV / N(Z)² = −2π³ i`.
pub const U2_ORIENTATION: f64 = 1.0;

/// Unit quaternion in Hopf coordinates:
/// `z11 = cos θ e^{iξ1}`, `z12 = sin θ e^{iξ2}`.
fn hopf_point(theta: f64, xi1: f64, xi2: f64) -> ComplexQuaternion {
    let (s, c) = theta.sin_cos();
    ComplexQuaternion::new(
        C64::from_polar(c, xi1),
        C64::from_polar(s, xi2),
        -C64::from_polar(s, -xi2),
        C64::from_polar(c, -xi1),
    )
}

/// `Z = R e^{iφ} q(θ, ξ1, ξ2)` with `φ ∈ [0, π)`; the range of `φ` is halved
/// because `(φ, q)` and `(φ + π, −q)` give the same point.
///
/// The weight is the pullback of `dV = dz0∧dz1∧dz2∧dz3`, which in these
/// coordinates is `−i R⁴ e^{4iφ} sin θ cos θ`.
pub fn chart_u2(radius: f64, params: [f64; 4]) -> CyclePoint {
    let [phi, theta, xi1, xi2] = params;
    let phase = C64::from_polar(radius, phi);
    let point = hopf_point(theta, xi1, xi2).scale(phase);
    let (s, c) = theta.sin_cos();
    let weight = -I * C64::from_polar(radius.powi(4), 4.0 * phi) * (s * c * U2_ORIENTATION);
    CyclePoint { point, weight }
}

/// Real point `R·x(θ, ξ1, ξ2)` of `S^3_R` with the Euclidean surface density
/// `R³ sin θ cos θ`.
pub fn chart_s3(radius: f64, params: [f64; 3]) -> CyclePoint {
    let [theta, xi1, xi2] = params;
    let point = hopf_point(theta, xi1, xi2).scale(C64::new(radius, 0.0));
    let (s, c) = theta.sin_cos();
    CyclePoint {
        point,
        weight: C64::new(radius.powi(3) * s * c, 0.0),
    }
}

#[allow(clippy::needless_range_loop)]
fn det4(m: &Mat4) -> C64 {
    let mut a = *m;
    let mut det = C64::new(1.0, 0.0);
    for col in 0..4 {
        let Some(pivot) = (col..4).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())) else {
            return C64::zero();
        };
        if a[pivot][col] == C64::zero() {
            return C64::zero();
        }
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col];
        for i in col + 1..4 {
            let f = a[i][col] / a[col][col];
            for j in col..4 {
                a[i][j] -= f * a[col][j];
            }
        }
    }
    det
}

/// Which holomorphic 4-form to pull back in [`u2_jacobian_fd`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormCoordinates {
    /// `dz0 ∧ dz1 ∧ dz2 ∧ dz3`.
    Coords,
    /// `¼ dz11 ∧ dz12 ∧ dz21 ∧ dz22`.
    Entries,
}

/// Pullback of `dV` to the `U(2)_R` chart by central finite differences of
/// the chart map. Cross-check for the closed form used by [`chart_u2`].
pub fn u2_jacobian_fd(radius: f64, params: [f64; 4], step: f64, form: FormCoordinates) -> C64 {
    let mut m = [[C64::zero(); 4]; 4];
    for (col, _) in params.iter().enumerate() {
        let mut plus = params;
        let mut minus = params;
        plus[col] += step;
        minus[col] -= step;
        let (zp, zm) = (chart_u2(radius, plus).point, chart_u2(radius, minus).point);
        let (vp, vm) = match form {
            FormCoordinates::Coords => (zp.to_coords(), zm.to_coords()),
            FormCoordinates::Entries => (zp.entries(), zm.entries()),
        };
        for row in 0..4 {
            m[row][col] = (vp[row] - vm[row]) / (2.0 * step);
        }
    }
    let det = det4(&m) * U2_ORIENTATION;
    match form {
        FormCoordinates::Coords => det,
        FormCoordinates::Entries => det * 0.25,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_q(rng: &mut ChaCha8Rng, scale: f64) -> ComplexQuaternion {
        let mut e = || c(rng.gen_range(-1.0..1.0) * scale, rng.gen_range(-1.0..1.0) * scale);
        ComplexQuaternion::new(e(), e(), e(), e())
    }

    fn near_identity(rng: &mut ChaCha8Rng, eps: f64) -> GroupElement {
        let one = ComplexQuaternion::identity();
        GroupElement::new(
            one + random_q(rng, eps),
            random_q(rng, eps),
            random_q(rng, eps),
            one + random_q(rng, eps),
        )
        .unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(ComplexQuaternion::identity().norm(), c(1.0, 0.0));
        let z = ComplexQuaternion::new(C64::zero(), c(1.0, 0.0), c(1.0, 0.0), C64::zero());
        assert_eq!(z.norm(), c(-1.0, 0.0));
    }

    #[test]
    fn norm_matches_coordinate_sum_of_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let coords = [(); 4].map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            let z = ComplexQuaternion::from_coords(coords);
            let sum: C64 = coords.iter().map(|x| x * x).sum();
            assert!((z.norm() - sum).norm() <= 1e-12 * (1.0 + sum.norm()));
            let back = z.to_coords();
            for (a, b) in back.iter().zip(coords.iter()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(ComplexQuaternion::identity().inverse().unwrap(), ComplexQuaternion::identity());
        let two = ComplexQuaternion::diagonal(c(2.0, 0.0), c(2.0, 0.0));
        assert_eq!(two.inverse().unwrap(), ComplexQuaternion::diagonal(c(0.5, 0.0), c(0.5, 0.0)));
        let sing = ComplexQuaternion::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(sing.inverse(), Err(Error::SingularMatrix { .. })));

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let z = random_q(&mut rng, 1.0);
            let inv = z.inverse().unwrap();
            assert!((inv * z).approx_eq(&ComplexQuaternion::identity(), 1e-10));
            let expected = z.norm().inv();
            assert!((inv.norm() - expected).norm() <= 1e-10 * expected.norm());
        }
    }

    #[test]
    fn norm_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (z, w) = (random_q(&mut rng, 1.5), random_q(&mut rng, 1.5));
            let lhs = (z * w).norm();
            let rhs = z.norm() * w.norm();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn conformal_action_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let z = random_q(&mut rng, 1.0);
        assert!(GroupElement::identity().act(&z).unwrap().approx_eq(&z, 1e-14));

        let s = c(1.7, -0.3);
        let one = ComplexQuaternion::identity();
        let zero = ComplexQuaternion::zero();
        let scaling = GroupElement::new(one.scale(s), zero, zero, one).unwrap();
        assert!(scaling.act(&z).unwrap().approx_eq(&z.scale(s), 1e-13));
    }

    #[test]
    fn conformal_action_two_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let h = near_identity(&mut rng, 0.1);
            assert!(h.inverse_residual() < 1e-13);
            let z = random_q(&mut rng, 0.8);
            let lhs = h.act(&z).unwrap();
            let rhs = h.act_via_inverse(&z).unwrap();
            assert!(lhs.approx_eq(&rhs, 1e-12), "{lhs:?} vs {rhs:?}");
        }
    }

    #[test]
    fn conformal_action_is_a_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let h1 = near_identity(&mut rng, 0.1);
            let h2 = near_identity(&mut rng, 0.1);
            let z = random_q(&mut rng, 0.8);
            let lhs = h1.compose(&h2).unwrap().act(&z).unwrap();
            let rhs = h1.act(&h2.act(&z).unwrap()).unwrap();
            assert!((lhs - rhs).frobenius() <= 1e-10 * rhs.frobenius().max(1.0));
        }
    }

    #[test]
    fn domain_examples() {
        assert_eq!(in_domain(&ComplexQuaternion::zero(), 1.0, DomainSign::Plus), Membership::Inside);
        let two = ComplexQuaternion::diagonal(c(2.0, 0.0), c(2.0, 0.0));
        assert_eq!(in_domain(&two, 1.0, DomainSign::Minus), Membership::Inside);
        assert_eq!(in_domain(&two, 1.0, DomainSign::Plus), Membership::Outside);
        let mixed = ComplexQuaternion::diagonal(c(0.5, 0.0), c(2.0, 0.0));
        assert_eq!(in_domain(&mixed, 1.0, DomainSign::Plus), Membership::Outside);
        assert_eq!(in_domain(&mixed, 1.0, DomainSign::Minus), Membership::Outside);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for r in [0.8, 1.0, 1.25] {
            for _ in 0..20 {
                let p = [(); 4].map(|_| rng.gen_range(0.0..std::f64::consts::TAU));
                let z = chart_u2(r, p).point;
                assert_eq!(in_domain(&z, r, DomainSign::Plus), Membership::Boundary);
                assert_eq!(in_domain(&z, r, DomainSign::Minus), Membership::Boundary);
            }
        }
    }

    #[test]
    fn u2_chart_points_are_scaled_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let r = rng.gen_range(0.5..2.0);
            let p = [(); 4].map(|_| rng.gen_range(0.0..std::f64::consts::TAU));
            let z = chart_u2(r, p).point;
            let zz = z * z.star();
            assert!(zz.approx_eq(&ComplexQuaternion::scalar(c(r * r, 0.0)), 1e-12));
        }
    }

    #[test]
    fn s3_chart_points_are_real_with_norm_r_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let r = rng.gen_range(0.5..2.0);
            let p = [(); 3].map(|_| rng.gen_range(0.0..std::f64::consts::TAU));
            let cp = chart_s3(r, p);
            for x in cp.point.to_coords() {
                assert!(x.im.abs() < 1e-14);
            }
            assert!((cp.point.norm() - r * r).norm() < 1e-12);
        }
    }

    #[test]
    fn u2_weight_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..25 {
            let r = rng.gen_range(0.5..2.0);
            let p = [
                rng.gen_range(0.0..PI),
                rng.gen_range(0.05..1.5),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ];
            let closed = chart_u2(r, p).weight;
            for form in [FormCoordinates::Coords, FormCoordinates::Entries] {
                let fd = u2_jacobian_fd(r, p, 1e-5, form);
                assert!((fd - closed).norm() <= 1e-8 * closed.norm().max(1.0), "{form:?}: {fd} vs {closed}");
            }
        }
    }
}
