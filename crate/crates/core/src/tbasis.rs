//! Matrix coefficients `t^l_{n m̲}(Z)` and the basis `t^l_{n m̲}(Z)·N(Z)^k`
//! of `Zh = C[z11, z12, z21, z22, N(Z)^{-1}]`.
//!
//! Half-integers are stored doubled: `two_l = 2l`, `two_n = 2n`, `two_m = 2m`.
//! `n` is the first (plain) lower index and `m` the underlined one, so
//! `t^l_{n m̲}(Z)` is the coefficient of `s^{l-n}` in
//! `(s z11 + z21)^{l-m} (s z12 + z22)^{l+m}`.
//!
//! The pairings are evaluated from the orthogonality relations. Every term
//! written with `Z^{-1}` is first brought back to the plain basis through
//!
//! ```text
//! t^l_{n m̲}(Z^{-1}) = N(Z)^{-2l} t^l_{n m̲}(adj Z)
//! t^l_{n m̲}(adj Z)  = (-1)^{n-m} (l-m)!(l+m)! / ((l-n)!(l+n)!) · t^l_{-m, -n̲}(Z)
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hc_algebra::ComplexQuaternion;
use crate::scalar::{ratio, Scalar, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TIndex {
    pub two_l: u32,
    pub two_n: i32,
    pub two_m: i32,
    pub k: i32,
}

impl TIndex {
    pub fn new(two_l: u32, two_n: i32, two_m: i32, k: i32) -> Result<Self> {
        let idx = Self { two_l, two_n, two_m, k };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.two_l as i32;
        let ok = self.two_n.abs() <= l
            && self.two_m.abs() <= l
            && (l - self.two_n) % 2 == 0
            && (l - self.two_m) % 2 == 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidIndex(self.to_string()))
        }
    }

    /// `(z11)^p = t^{p/2}_{-p/2, -p/2̲}`.
    pub fn z11_power(p: u32) -> Self {
        let q = p as i32;
        Self { two_l: p, two_n: -q, two_m: -q, k: 0 }
    }

    pub fn with_k(self, k: i32) -> Self {
        Self { k, ..self }
    }

    /// All `(n, m)` pairs for a given `2l`, each with power `k`.
    pub fn all_for(two_l: u32, k: i32) -> impl Iterator<Item = TIndex> {
        let l = two_l as i32;
        (-l..=l).step_by(2).flat_map(move |two_n| {
            (-l..=l)
                .step_by(2)
                .map(move |two_m| TIndex { two_l, two_n, two_m, k })
        })
    }

    /// `l - m`, `l + m`, `l - n`, `l + n` as integers.
    fn shifts(&self) -> [u32; 4] {
        let l = self.two_l as i32;
        [
            ((l - self.two_m) / 2) as u32,
            ((l + self.two_m) / 2) as u32,
            ((l - self.two_n) / 2) as u32,
            ((l + self.two_n) / 2) as u32,
        ]
    }

    /// Total degree `2l + 2k` of the basis element.
    pub fn degree(&self) -> i64 {
        self.two_l as i64 + 2 * self.k as i64
    }
}

fn half(v: i64) -> String {
    if v % 2 == 0 {
        (v / 2).to_string()
    } else {
        format!("{v}/2")
    }
}

impl fmt::Display for TIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t^{}_{{{},{}}}·N^{}",
            half(self.two_l as i64),
            half(self.two_n as i64),
            half(self.two_m as i64),
            self.k
        )
    }
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Polynomial in `z11, z12, z21, z22`; exponents are stored in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPolynomial<C> {
    terms: BTreeMap<[u32; 4], C>,
}

impl<C: Scalar> MultiPolynomial<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial([0; 4], C::one())
    }

    pub fn monomial(exponents: [u32; 4], coeff: C) -> Self {
        let mut p = Self::zero();
        p.add_term(exponents, coeff);
        p
    }

    /// The coordinate `z11, z12, z21` or `z22` for `which = 0, 1, 2, 3`.
    pub fn variable(which: usize) -> Self {
        let mut e = [0; 4];
        e[which] = 1;
        Self::monomial(e, C::one())
    }

    /// `N(Z) = z11 z22 − z12 z21`.
    pub fn norm() -> Self {
        let mut p = Self::monomial([1, 0, 0, 1], C::one());
        p.add_term([0, 1, 1, 0], -C::one());
        p
    }

    pub fn add_term(&mut self, exponents: [u32; 4], coeff: C) {
        let entry = self.terms.entry(exponents).or_insert_with(C::zero);
        *entry = entry.clone() + coeff;
        if entry.is_zero() {
            self.terms.remove(&exponents);
        }
    }

    pub fn terms(&self) -> &BTreeMap<[u32; 4], C> {
        &self.terms
    }

    pub fn coeff(&self, exponents: &[u32; 4]) -> C {
        self.terms.get(exponents).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Total degrees of the monomials present.
    pub fn degrees(&self) -> std::collections::BTreeSet<u32> {
        self.terms.keys().map(|e| e.iter().sum()).collect()
    }

    pub fn derivative(&self, which: usize) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            if e[which] > 0 {
                let mut d = *e;
                d[which] -= 1;
                out.add_term(d, v.clone() * C::from_int(e[which] as i64));
            }
        }
        out
    }

    /// `□ = 4 (∂11 ∂22 − ∂12 ∂21)`, the Laplacian `Σ ∂²/∂z_μ²` in matrix
    /// entries.
    pub fn laplacian(&self) -> Self {
        let a = self.derivative(0).derivative(3);
        let b = self.derivative(1).derivative(2);
        (&a - &b).scale(&C::from_int(4))
    }

    /// `Σ z_ij ∂/∂z_ij`, applied term by term through the product rule of
    /// each coordinate.
    pub fn euler(&self) -> Self {
        (0..4).fold(Self::zero(), |acc, i| &acc + &(&Self::variable(i) * &self.derivative(i)))
    }

    /// `deg̃ = 1 + Σ z_ij ∂/∂z_ij`.
    pub fn degt(&self) -> Self {
        self + &self.euler()
    }

    /// Substitutes `Z → adj Z`, that is `z11 ↔ z22`, `z12 → −z12`,
    /// `z21 → −z21`.
    pub fn adjugate(&self) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            let sign = if (e[1] + e[2]) % 2 == 0 { C::one() } else { -C::one() };
            out.add_term([e[3], e[1], e[2], e[0]], v.clone() * sign);
        }
        out
    }

    pub fn eval(&self, z: &ComplexQuaternion) -> C64 {
        let vars = z.entries();
        self.terms
            .iter()
            .map(|(e, v)| {
                e.iter()
                    .zip(vars.iter())
                    .fold(v.to_c64(), |acc, (&p, x)| acc * x.powu(p))
            })
            .sum()
    }

    /// If `other = c · self` for a scalar `c`, returns `c`.
    pub fn ratio_to(&self, other: &Self) -> Option<C> {
        let (e, v) = self.terms.iter().next()?;
        let c = other.coeff(e) * v.recip()?;
        (self.scale(&c) == *other).then_some(c)
    }
}

impl<C: Scalar> Add for &MultiPolynomial<C> {
    type Output = MultiPolynomial<C>;
    fn add(self, rhs: Self) -> MultiPolynomial<C> {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, v.clone());
        }
        out
    }
}

impl<C: Scalar> Sub for &MultiPolynomial<C> {
    type Output = MultiPolynomial<C>;
    fn sub(self, rhs: Self) -> MultiPolynomial<C> {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, -v.clone());
        }
        out
    }
}

impl<C: Scalar> Mul for &MultiPolynomial<C> {
    type Output = MultiPolynomial<C>;
    fn mul(self, rhs: Self) -> MultiPolynomial<C> {
        let mut out = MultiPolynomial::zero();
        for (e1, v1) in &self.terms {
            for (e2, v2) in &rhs.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                out.add_term(e, v1.clone() * v2.clone());
            }
        }
        out
    }
}

impl<C: Scalar> Neg for MultiPolynomial<C> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&-C::one())
    }
}

/// `t^l_{n m̲}(Z)` as an integer polynomial. `idx.k` must be zero.
pub fn t_poly(idx: TIndex) -> Result<MultiPolynomial<BigRational>> {
    idx.validate()?;
    if idx.k != 0 {
        return Err(Error::InvalidIndex(format!("{idx}: t_poly needs k = 0")));
    }
    let [l_minus_m, l_plus_m, power, _] = idx.shifts();
    let mut p = MultiPolynomial::zero();
    // i powers of s from the first factor, power - i from the second
    for i in 0..=power.min(l_minus_m) {
        let j = power - i;
        if j > l_plus_m {
            continue;
        }
        let c = binomial(l_minus_m, i) * binomial(l_plus_m, j);
        p.add_term(
            [i, j, l_minus_m - i, l_plus_m - j],
            BigRational::from_integer(c),
        );
    }
    Ok(p)
}

/// `t^l_{n m̲}(Z)` evaluated directly from the binomial sum.
pub fn eval_t(two_l: u32, two_n: i32, two_m: i32, z: &ComplexQuaternion) -> C64 {
    let idx = TIndex { two_l, two_n, two_m, k: 0 };
    let [l_minus_m, l_plus_m, power, _] = idx.shifts();
    let mut acc = C64::zero();
    for i in 0..=power.min(l_minus_m) {
        let j = power - i;
        if j > l_plus_m {
            continue;
        }
        let c = binomial_f64(l_minus_m, i) * binomial_f64(l_plus_m, j);
        acc += z.z11.powu(i) * z.z12.powu(j) * z.z21.powu(l_minus_m - i) * z.z22.powu(l_plus_m - j) * c;
    }
    acc
}

/// `t^l_{n m̲}(Z)·N(Z)^k`.
pub fn eval_basis(idx: TIndex, z: &ComplexQuaternion) -> Result<C64> {
    idx.validate()?;
    let t = eval_t(idx.two_l, idx.two_n, idx.two_m, z);
    let n = z.norm();
    if idx.k < 0 && n.norm() < crate::hc_algebra::SINGULAR_TOL {
        return Err(Error::SingularMatrix { norm: n.norm() });
    }
    Ok(t * n.powi(idx.k))
}

/// The constant `d` in `t^l_{n m̲}(adj Z) = d · t^l_{-m, -n̲}(Z)`.
pub fn adjugate_coefficient(two_l: u32, two_n: i32, two_m: i32) -> BigRational {
    let idx = TIndex { two_l, two_n, two_m, k: 0 };
    let [l_minus_m, l_plus_m, l_minus_n, l_plus_n] = idx.shifts();
    let mag = BigRational::new(
        factorial(l_minus_m) * factorial(l_plus_m),
        factorial(l_minus_n) * factorial(l_plus_n),
    );
    if ((two_n - two_m) / 2) % 2 == 0 {
        mag
    } else {
        -mag
    }
}

/// Rewrites `t^l_{x y̲}(Z^{-1})·N(Z)^power` as `c · t^l_{-y, -x̲}(Z)·N(Z)^{power-2l}`.
pub fn inverse_term(two_l: u32, two_x: i32, two_y: i32, power: i32) -> Result<(BigRational, TIndex)> {
    TIndex::new(two_l, two_x, two_y, 0)?;
    let c = adjugate_coefficient(two_l, two_x, two_y);
    Ok((c, TIndex::new(two_l, -two_y, -two_x, power - two_l as i32)?))
}

/// Inverse of [`inverse_term`]: `t^l_{n m̲}(Z)·N^k = c · t^l_{x y̲}(Z^{-1})·N^{2l+k}`
/// with `(x, y) = (-m, -n)`; returns `(c, x, y, 2l + k)`.
pub fn to_inverse_form(idx: TIndex) -> (BigRational, i32, i32, i32) {
    let c = adjugate_coefficient(idx.two_l, idx.two_n, idx.two_m);
    (c, -idx.two_m, -idx.two_n, idx.two_l as i32 + idx.k)
}

/// Space tag of a [`BasisExpansion`]; restricts which indices may appear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    /// Harmonic polynomials: `k = 0`.
    HPlus,
    /// Harmonic functions regular at infinity: `k = −(2l+1)`.
    HMinus,
    /// `H− ⊕ H+`.
    H,
    /// Polynomials: `k ≥ 0`.
    ZhPlus,
    Zh,
}

impl Space {
    pub fn admits(&self, idx: &TIndex) -> bool {
        let h_minus = idx.k == -(idx.two_l as i32 + 1);
        match self {
            Space::HPlus => idx.k == 0,
            Space::HMinus => h_minus,
            Space::H => idx.k == 0 || h_minus,
            Space::ZhPlus => idx.k >= 0,
            Space::Zh => true,
        }
    }

    /// Smallest tagged space containing both.
    pub fn join(self, other: Space) -> Space {
        use Space::*;
        match (self, other) {
            (a, b) if a == b => a,
            (HPlus | HMinus | H, HPlus | HMinus | H) => H,
            (HPlus | ZhPlus, HPlus | ZhPlus) => ZhPlus,
            _ => Zh,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Space::HPlus => "H+",
            Space::HMinus => "H-",
            Space::H => "H",
            Space::ZhPlus => "Zh+",
            Space::Zh => "Zh",
        };
        f.write_str(s)
    }
}

/// Finite combination `Σ c_idx · t^l_{n m̲}(Z)·N(Z)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisExpansion<C> {
    space: Space,
    terms: BTreeMap<TIndex, C>,
}

impl<C: Scalar> BasisExpansion<C> {
    pub fn new(space: Space) -> Self {
        Self { space, terms: BTreeMap::new() }
    }

    pub fn single(space: Space, idx: TIndex, coeff: C) -> Result<Self> {
        let mut e = Self::new(space);
        e.add_term(idx, coeff)?;
        Ok(e)
    }

    /// The basis element itself, tagged with the smallest space containing it.
    pub fn basis(idx: TIndex) -> Result<Self> {
        let space = [Space::HPlus, Space::HMinus, Space::ZhPlus, Space::Zh]
            .into_iter()
            .find(|s| s.admits(&idx))
            .unwrap_or(Space::Zh);
        Self::single(space, idx, C::one())
    }

    pub fn add_term(&mut self, idx: TIndex, coeff: C) -> Result<()> {
        idx.validate()?;
        if !self.space.admits(&idx) {
            return Err(Error::UnsupportedSpace(format!("{idx} in {}", self.space)));
        }
        let entry = self.terms.entry(idx).or_insert_with(C::zero);
        *entry = entry.clone() + coeff;
        if entry.is_zero() {
            self.terms.remove(&idx);
        }
        Ok(())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Re-tags the expansion, checking every term against the new space.
    pub fn with_space(mut self, space: Space) -> Result<Self> {
        if let Some(bad) = self.terms.keys().find(|i| !space.admits(i)) {
            return Err(Error::UnsupportedSpace(format!("{bad} in {space}")));
        }
        self.space = space;
        Ok(self)
    }

    pub fn terms(&self) -> &BTreeMap<TIndex, C> {
        &self.terms
    }

    pub fn coeff(&self, idx: &TIndex) -> C {
        self.terms.get(idx).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::new(self.space);
        for (i, v) in &self.terms {
            let v = v.clone() * c.clone();
            if !v.is_zero() {
                out.terms.insert(*i, v);
            }
        }
        out
    }

    /// Multiplies by `N(Z)^j`, shifting every `k`.
    pub fn times_norm_power(&self, j: i32) -> Self {
        let terms: BTreeMap<_, _> = self
            .terms
            .iter()
            .map(|(i, v)| (i.with_k(i.k + j), v.clone()))
            .collect();
        let space = [Space::HPlus, Space::ZhPlus, Space::Zh]
            .into_iter()
            .find(|s| terms.keys().all(|i| s.admits(i)))
            .unwrap_or(Space::Zh);
        Self { space, terms }
    }

    pub fn eval(&self, z: &ComplexQuaternion) -> Result<C64> {
        let mut acc = C64::zero();
        for (i, v) in &self.terms {
            acc += v.to_c64() * eval_basis(*i, z)?;
        }
        Ok(acc)
    }

    /// Explicit polynomial; fails if some term has `k < 0`.
    pub fn to_polynomial(&self) -> Result<MultiPolynomial<C>> {
        let n = MultiPolynomial::<C>::norm();
        let mut out = MultiPolynomial::zero();
        for (i, v) in &self.terms {
            if i.k < 0 {
                return Err(Error::UnsupportedSpace(format!("{i} is not polynomial")));
            }
            let t = t_poly(i.with_k(0))?;
            let mut tc = MultiPolynomial::zero();
            for (e, c) in t.terms() {
                tc.add_term(*e, C::from_rational(c) * v.clone());
            }
            out = &out + &(&tc * &n.pow(i.k as u32));
        }
        Ok(out)
    }
}

impl<C: Scalar> Add for &BasisExpansion<C> {
    type Output = BasisExpansion<C>;
    fn add(self, rhs: Self) -> BasisExpansion<C> {
        let mut out = BasisExpansion::new(self.space.join(rhs.space));
        for (i, v) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(*i, v.clone()).expect("joined space admits both sides");
        }
        out
    }
}

impl<C: Scalar> Sub for &BasisExpansion<C> {
    type Output = BasisExpansion<C>;
    fn sub(self, rhs: Self) -> BasisExpansion<C> {
        self + &rhs.scale(&-C::one())
    }
}

/// `deg̃`: multiplies `t^l_{n m̲}·N^k` by `2l + 2k + 1`.
pub fn degt<C: Scalar>(x: &BasisExpansion<C>) -> BasisExpansion<C> {
    let mut out = BasisExpansion::new(x.space);
    for (i, v) in &x.terms {
        let f = C::from_int(i.degree() + 1);
        let v = v.clone() * f;
        if !v.is_zero() {
            out.terms.insert(*i, v);
        }
    }
    out
}

/// Membership of a single basis element in the invariant subspaces of `Zh`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspaces {
    pub zh_plus: bool,
    pub zh_minus: bool,
    pub zh_zero: bool,
    pub zh2_minus: bool,
    pub i2_minus: bool,
    pub i2_plus: bool,
    pub j2: bool,
}

pub fn classify(idx: &TIndex) -> Subspaces {
    let k = idx.k as i64;
    let two_l = idx.two_l as i64;
    Subspaces {
        zh_plus: k >= 0,
        zh_minus: k <= -(two_l + 2),
        zh_zero: -(two_l + 1) <= k && k <= -1,
        zh2_minus: k <= -(two_l + 3),
        i2_minus: k <= -2,
        i2_plus: k >= -(two_l + 1),
        j2: -(two_l + 1) <= k && k <= -2,
    }
}

/// Pairing of two basis elements under `(i/2π³)∫_{U(2)_R} f1 f2 dV`.
fn pair_zh_basis(i1: &TIndex, i2: &TIndex) -> BigRational {
    let (c, x, y, power) = to_inverse_form(*i2);
    // i2 = c · t^l_{x y̲}(Z^{-1})·N^power, which pairs with t^l_{y x̲}·N^{-power-2}
    if i1.two_l == i2.two_l && i1.two_n == y && i1.two_m == x && i1.k == -power - 2 {
        c / BigRational::from_integer(BigInt::from(i1.two_l + 1))
    } else {
        BigRational::zero()
    }
}

/// `⟨f1, f2⟩ = (i/2π³) ∫_{U(2)_R} f1 f2 dV` on `Zh`.
pub fn pair_zh<C: Scalar>(f1: &BasisExpansion<C>, f2: &BasisExpansion<C>) -> C {
    let mut acc = C::zero();
    for (i2, v2) in &f2.terms {
        let (_, x, y, power) = to_inverse_form(*i2);
        let partner = TIndex { two_l: i2.two_l, two_n: y, two_m: x, k: -power - 2 };
        if let Some(v1) = f1.terms.get(&partner) {
            acc = acc + v1.clone() * v2.clone() * C::from_rational(&pair_zh_basis(&partner, i2));
        }
    }
    acc
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Half {
    Plus,
    Minus,
}

fn half_of(idx: &TIndex) -> Result<Half> {
    if idx.k == 0 {
        Ok(Half::Plus)
    } else if idx.k == -(idx.two_l as i32 + 1) {
        Ok(Half::Minus)
    } else {
        Err(Error::UnsupportedSpace(format!("{idx} is not in H")))
    }
}

/// `(φ1, φ2)_R = (1/2π²) ∫_{S^3_R} (deg̃ φ1) φ2 dS/R` on `H+ × H−` and
/// `H− × H+`, where it is independent of `R`. Pairs of terms from the same
/// half depend on `R` and are rejected.
pub fn pair_h<C: Scalar>(phi1: &BasisExpansion<C>, phi2: &BasisExpansion<C>) -> Result<C> {
    let mut acc = C::zero();
    for (i1, v1) in &phi1.terms {
        let h1 = half_of(i1)?;
        for (i2, v2) in &phi2.terms {
            let h2 = half_of(i2)?;
            if h1 == h2 {
                return Err(Error::UnsupportedSpace(format!(
                    "S^3 pairing of {i1} with {i2} (same half of H)"
                )));
            }
            let (plus, minus) = if h1 == Half::Plus { (i1, i2) } else { (i2, i1) };
            // minus = c · t^l_{x y̲}(Z^{-1})·N^{-1}; pairs to δ with t^l_{y x̲}
            let (c, x, y, _) = to_inverse_form(*minus);
            if plus.two_l == minus.two_l && plus.two_n == y && plus.two_m == x {
                let v = v1.clone() * v2.clone() * C::from_rational(&c);
                acc = if h1 == Half::Plus { acc + v } else { acc - v };
            }
        }
    }
    Ok(acc)
}

/// `(φ1, φ2) = (i/2π³) ∫_{U(2)_R} (deg̃ φ1) φ2 dV/N(Z)`, computed as
/// `pair_zh(deg̃ φ1 · N^{-1}, φ2)`.
pub fn pair_h2<C: Scalar>(phi1: &BasisExpansion<C>, phi2: &BasisExpansion<C>) -> C {
    pair_zh(&degt(phi1).times_norm_power(-1), phi2)
}

/// `⟨φ1, φ2⟩ = (1/2π²) ∫_{S^3_1} (deg̃ φ1) conj(φ2) dS` on `H+`, from the
/// orthogonality of the `t^l_{n m̲}` with norms
/// `(l−m)!(l+m)!/((l−n)!(l+n)!)`.
pub fn inner_product<C: Scalar>(phi1: &BasisExpansion<C>, phi2: &BasisExpansion<C>) -> Result<C> {
    for i in phi1.terms.keys().chain(phi2.terms.keys()) {
        if i.k != 0 {
            return Err(Error::UnsupportedSpace(format!("{i} is not in H+")));
        }
    }
    let mut acc = C::zero();
    for (i, v1) in &phi1.terms {
        if let Some(v2) = phi2.terms.get(i) {
            acc = acc + v1.clone() * v2.conj() * C::from_rational(&unitary_norm(i));
        }
    }
    Ok(acc)
}

/// `⟨t^l_{n m̲}, t^l_{n m̲}⟩ = (l−m)!(l+m)!/((l−n)!(l+n)!)`.
pub fn unitary_norm(idx: &TIndex) -> BigRational {
    let [l_minus_m, l_plus_m, l_minus_n, l_plus_n] = idx.shifts();
    BigRational::new(
        factorial(l_minus_m) * factorial(l_plus_m),
        factorial(l_minus_n) * factorial(l_plus_n),
    )
}

/// Truncation of `1/N(Z−W) = N(W)^{-1} Σ t^l_{m n̲}(Z)·t^l_{n m̲}(W^{-1})`
/// to `2l ≤ max_two_l`, as an expansion in `Z`.
pub fn expand_1_over_n(w: &ComplexQuaternion, max_two_l: u32) -> Result<BasisExpansion<C64>> {
    let w_inv = w.inverse()?;
    let n_inv = w.norm().inv();
    let mut out = BasisExpansion::new(Space::HPlus);
    for two_l in 0..=max_two_l {
        for idx in TIndex::all_for(two_l, 0) {
            // idx = t^l_{m n̲}(Z) with (m, n) = (idx.two_n, idx.two_m)
            let coeff = n_inv * eval_t(two_l, idx.two_m, idx.two_n, &w_inv);
            out.add_term(idx, coeff)?;
        }
    }
    Ok(out)
}

/// `(z11)^p (z'11)^q`-style monomials map to single basis elements; this
/// returns `(z_ij)^p` for the entry `which` (0..4) as an `H+` element.
pub fn entry_power<C: Scalar>(which: usize, p: u32) -> BasisExpansion<C> {
    let q = p as i32;
    let (two_n, two_m) = match which {
        0 => (-q, -q),
        1 => (-q, q),
        2 => (q, -q),
        _ => (q, q),
    };
    BasisExpansion::single(Space::HPlus, TIndex { two_l: p, two_n, two_m, k: 0 }, C::one())
        .expect("valid index")
}

/// `1/(2l+1)` as an exact rational.
pub fn dimension_inverse(two_l: u32) -> BigRational {
    ratio(1, two_l as i64 + 1)
}
