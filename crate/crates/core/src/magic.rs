//! Exact evaluation of the operators `L^(n)` on the generators
//! `(z11)^k ⊗ 1` and `1 ⊗ (z'11)^k` of `H+ ⊗ H+`.
//!
//! An image is stored as the coefficients `c_p` of
//! `(w11)^{k−p} (w'11)^p`, `p = 0..=k`, whichever generator produced it.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::diagrams::{enumerate, BoxDiagram, Site};
use crate::error::{Error, Result};
use crate::scalar::ratio;
use crate::tbasis::{binomial, entry_power, inner_product};

type Rational = BigRational;

/// Which generator an image belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `(z11)^k ⊗ 1`.
    Left,
    /// `1 ⊗ (z'11)^k`.
    Right,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::Left, Family::Right];

    pub fn other(self) -> Self {
        match self {
            Family::Left => Family::Right,
            Family::Right => Family::Left,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Left => "(z11)^k⊗1",
            Family::Right => "1⊗(z'11)^k",
        })
    }
}

/// The generator family whose peel reduction is direct for a slingshot at
/// `site`: the one whose variable sits on the opposite Z-vertex.
pub fn native_family(site: Site) -> Family {
    match site {
        Site::Z1 | Site::W1 => Family::Left,
        Site::Z2 | Site::W2 => Family::Right,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorImage {
    pub k: usize,
    pub family: Family,
    /// `coeffs[p]` multiplies `(w11)^{k−p} (w'11)^p`.
    #[serde(with = "crate::format::serde_rational_vec")]
    pub coeffs: Vec<Rational>,
}

impl GeneratorImage {
    /// Image under the one-loop operator: `(1/(k+1)) Σ_p (w11)^{k−p}(w'11)^p`.
    pub fn one_loop(k: usize, family: Family) -> Self {
        Self { k, family, coeffs: vec![ratio(1, k as i64 + 1); k + 1] }
    }

    /// Applies `w11 ↔ w'11` and exchanges the generator family.
    pub fn swapped(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self { k: self.k, family: self.family.other(), coeffs }
    }

    pub fn coeff_sum(&self) -> Rational {
        self.coeffs.iter().sum()
    }
}

/// `a^k(n, p)` for `p = 0..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub n: usize,
    pub k: usize,
    #[serde(with = "crate::format::serde_rational_vec")]
    pub a: Vec<Rational>,
}

/// `μ^(n)_k` for `k = 1..=mu.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvalueTable {
    pub n: usize,
    #[serde(with = "crate::format::serde_rational_vec")]
    pub mu: Vec<Rational>,
}

fn require_loops(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange { what: "n", value: "0".into(), reason: "loop count starts at 1" });
    }
    Ok(())
}

/// `a^k(n+1, p) = Σ_{q=p}^{k} a^k(n, q)/(q+1)`, as suffix sums.
fn next_row(prev: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); prev.len()];
    let mut acc = Rational::zero();
    for q in (0..prev.len()).rev() {
        acc += &prev[q] / Rational::from_integer(BigInt::from(q + 1));
        out[q] = acc.clone();
    }
    out
}

/// `a^k(1, p) = 1/(k+1)` and `a^k(n+1, p) = Σ_{q≥p} a^k(n, q)/(q+1)`.
pub fn a_table(n: usize, k: usize) -> Result<CoeffTable> {
    require_loops(n)?;
    let mut row = vec![ratio(1, k as i64 + 1); k + 1];
    for _ in 1..n {
        row = next_row(&row);
    }
    Ok(CoeffTable { n, k, a: row })
}

/// `μ^(n)_k = Σ_{p=0}^{k−1} (−1)^{k+p+1} a^{k−1}(n, p) C(k−1, p)`.
pub fn mu(n: usize, k: usize) -> Result<Rational> {
    if k == 0 {
        return Err(Error::OutOfRange { what: "k", value: "0".into(), reason: "eigenvalues are indexed from 1" });
    }
    let table = a_table(n, k - 1)?;
    Ok(alternating_sum(&table.a))
}

fn alternating_sum(coeffs: &[Rational]) -> Rational {
    let k = coeffs.len();
    let mut acc = Rational::zero();
    for (p, c) in coeffs.iter().enumerate() {
        let term = c * Rational::from_integer(binomial(k as u32 - 1, p as u32));
        if (k + p + 1).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

pub fn mu_table(n: usize, k_max: usize) -> Result<EigenvalueTable> {
    let mu = (1..=k_max).map(|k| mu(n, k)).collect::<Result<_>>()?;
    Ok(EigenvalueTable { n, mu })
}

/// `μ^(2)_k`: `1` for `k = 1`, otherwise `(−1)^{k+1}/(k(k−1))`.
pub fn mu2_closed(k: usize) -> Result<Rational> {
    match k {
        0 => Err(Error::OutOfRange { what: "k", value: "0".into(), reason: "eigenvalues are indexed from 1" }),
        1 => Ok(Rational::one()),
        _ => {
            let v = ratio(1, (k * (k - 1)) as i64);
            Ok(if k.is_multiple_of(2) { -v } else { v })
        }
    }
}

/// One peel step: the image of a generator of degree `k` under the diagram
/// whose last slingshot sits at `site`, given the images `lower(p)` of the
/// diagram before that attachment. Only the native family of `site` has a
/// direct reduction.
pub fn peel(
    site: Site,
    family: Family,
    k: usize,
    lower: &dyn Fn(usize) -> GeneratorImage,
) -> Result<GeneratorImage> {
    if native_family(site) != family {
        return Err(Error::UnsupportedPeel { site, family });
    }
    let inv = |v: usize| ratio(1, v as i64);
    let mut coeffs = vec![Rational::zero(); k + 1];
    match site {
        // integrate out Z1, collapse Z2 onto T_n, then T_n against 1/N(W1 − T_n)
        Site::Z2 => {
            for p in 0..=k {
                let img = lower(p);
                for (s, c) in img.coeffs.iter().enumerate() {
                    coeffs[s] += c;
                }
            }
            coeffs.iter_mut().for_each(|c| *c *= inv(k + 1));
        }
        Site::Z1 => {
            for p in 0..=k {
                let img = lower(p);
                for (j, c) in img.coeffs.iter().enumerate() {
                    coeffs[k - p + j] += c;
                }
            }
            coeffs.iter_mut().for_each(|c| *c *= inv(k + 1));
        }
        // the last T_n is integrated against the W-side: one more step of
        // the coefficient recursion
        Site::W2 => {
            coeffs = next_row(&lower(k).coeffs);
        }
        Site::W1 => {
            let mut rev = lower(k).coeffs;
            rev.reverse();
            coeffs = next_row(&rev);
            coeffs.reverse();
        }
    }
    Ok(GeneratorImage { k, family, coeffs })
}

/// Images of both generator families in every degree `0..=k_max` for the
/// diagram with the given attachment history.
fn history_images(history: &[Site], k_max: usize) -> Result<[Vec<GeneratorImage>; 2]> {
    let mut images = Family::BOTH.map(|f| (0..=k_max).map(|k| GeneratorImage::one_loop(k, f)).collect::<Vec<_>>());
    for &site in history {
        let native = native_family(site);
        let prev = &images[native.slot()];
        let lower = |p: usize| prev[p].clone();
        let fresh = (0..=k_max).map(|k| peel(site, native, k, &lower)).collect::<Result<Vec<_>>>()?;
        // the other family follows from the w11 ↔ w'11 symmetry
        let mirrored = fresh.iter().map(GeneratorImage::swapped).collect();
        images[native.slot()] = fresh;
        images[native.other().slot()] = mirrored;
    }
    Ok(images)
}

/// `L^(n)` of the generator of degree `k` in `family`, for the diagram `d`,
/// by peeling its recorded slingshots.
pub fn diagram_image(d: &BoxDiagram, family: Family, k: usize) -> Result<GeneratorImage> {
    let mut images = history_images(d.history(), k)?;
    Ok(images[family.slot()].swap_remove(k))
}

/// `L^(n)(1 ⊗ (z'11)^k)` for the ladder, from the coefficient table and,
/// independently, from `L^(n)(1⊗(z'11)^k) = (1/(k+1)) Σ_p (w11)^{k−p} L^(n−1)(1⊗(z'11)^p)`.
pub fn ladder_image(n: usize, k: usize) -> Result<GeneratorImage> {
    Ok(ladder_images(n, k)?.swap_remove(k))
}

/// [`ladder_image`] for every `k ≤ k_max`, running the recursion once.
pub fn ladder_images(n: usize, k_max: usize) -> Result<Vec<GeneratorImage>> {
    require_loops(n)?;
    let mut level: Vec<GeneratorImage> = (0..=k_max).map(|j| GeneratorImage::one_loop(j, Family::Right)).collect();
    for _ in 1..n {
        let lower = |p: usize| level[p].clone();
        level = (0..=k_max)
            .map(|j| peel(Site::Z2, Family::Right, j, &lower))
            .collect::<Result<_>>()?;
    }
    for (k, img) in level.iter().enumerate() {
        let table = GeneratorImage { k, family: Family::Right, coeffs: a_table(n, k)?.a };
        if *img != table {
            return Err(Error::InconsistentLadder { n, k });
        }
    }
    Ok(level)
}

/// `μ_k` from an image of a degree-`(k−1)` generator as the ratio
/// `⟨L(e), x⟩ / ⟨e, x⟩` with `x = (w11 − w'11)^{k−1}` spanning the `k`-th
/// component, using the orthonormality of the monomials `(z11)^j`.
pub fn eigenvalue_extract(img: &GeneratorImage, k: usize) -> Result<Rational> {
    if k == 0 || img.k != k - 1 || img.coeffs.len() != k {
        return Err(Error::DegreeMismatch { expected: k.saturating_sub(1), found: img.k });
    }
    let deg = k - 1;
    let monomial_norm = |p: usize| -> Result<Rational> {
        let left = entry_power::<Rational>(0, (deg - p) as u32);
        let right = entry_power::<Rational>(0, p as u32);
        Ok(inner_product(&left, &left)? * inner_product(&right, &right)?)
    };
    // x = Σ_p C(k−1, p) (−1)^p (w11)^{k−1−p} (w'11)^p
    let x = |p: usize| {
        let b = Rational::from_integer(binomial(deg as u32, p as u32));
        if p.is_multiple_of(2) { b } else { -b }
    };
    let mut num = Rational::zero();
    for (p, c) in img.coeffs.iter().enumerate() {
        num += c * x(p) * monomial_norm(p)?;
    }
    let e = match img.family {
        Family::Left => 0,
        Family::Right => deg,
    };
    let den = x(e) * monomial_norm(e)?;
    Ok(num / den)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagicRow {
    pub diagram: usize,
    pub history: Vec<Site>,
    pub family: Family,
    pub k: usize,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagicReport {
    pub n: usize,
    pub k_max: usize,
    pub diagrams: usize,
    pub rows: Vec<MagicRow>,
}

impl MagicReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }
}

/// Largest loop order accepted by [`verify_magic`].
pub const MAX_MAGIC_LOOPS: usize = 5;

/// Compares the generator images of every enumerated `n`-loop diagram with
/// the ladder images, for both families and `k ≤ k_max`.
pub fn verify_magic(n: usize, k_max: usize) -> Result<MagicReport> {
    if n > MAX_MAGIC_LOOPS {
        return Err(Error::SizeLimit { what: "loops", value: n, max: MAX_MAGIC_LOOPS });
    }
    let diagrams = enumerate(n)?;
    let ladder = ladder_images(n, k_max)?;
    let mut rows = Vec::new();
    for (i, d) in diagrams.iter().enumerate() {
        let images = history_images(d.history(), k_max)?;
        for family in Family::BOTH {
            for k in 0..=k_max {
                let expected = match family {
                    Family::Right => ladder[k].clone(),
                    Family::Left => ladder[k].swapped(),
                };
                rows.push(MagicRow {
                    diagram: i,
                    history: d.history().to_vec(),
                    family,
                    k,
                    matches: images[family.slot()][k] == expected,
                });
            }
        }
    }
    Ok(MagicReport { n, k_max, diagrams: diagrams.len(), rows })
}

/// `true` when every entry is positive and the sequence is non-increasing.
pub fn is_monotone_positive(a: &[Rational]) -> bool {
    a.iter().all(|x| x.is_positive()) && a.windows(2).all(|w| w[0] >= w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn q(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    #[test]
    fn a_table_examples() {
        assert_eq!(a_table(1, 3).unwrap().a, vec![q(1, 4); 4]);
        assert_eq!(a_table(2, 1).unwrap().a, vec![q(3, 4), q(1, 4)]);
        assert!(a_table(0, 3).is_err());
    }

    #[test]
    fn a_table_row_sums_and_monotone() {
        for n in 1..=10 {
            for k in 0..=20 {
                let a = a_table(n, k).unwrap().a;
                assert_eq!(a.iter().sum::<Rational>(), Rational::one());
                assert!(is_monotone_positive(&a));
                if n >= 2 {
                    let prev = a_table(n - 1, k).unwrap().a;
                    for p in 0..k {
                        assert_eq!(&a[p] - &a[p + 1], &prev[p] / q(p as i64 + 1, 1));
                    }
                }
            }
        }
    }

    #[test]
    fn mu_examples() {
        for n in 1..=16 {
            assert_eq!(mu(n, 1).unwrap(), Rational::one());
        }
        for k in 2..=64 {
            assert!(mu(1, k).unwrap().is_zero());
        }
        assert_eq!(mu(2, 5).unwrap(), q(1, 20));
        let expected3 = [q(1, 1), q(-3, 4), q(17, 36), q(-43, 144), q(247, 1200)];
        assert_eq!(mu_table(3, 5).unwrap().mu, expected3);
    }

    #[test]
    fn mu2_matches_closed_form() {
        assert_eq!(mu2_closed(1).unwrap(), q(1, 1));
        assert_eq!(mu2_closed(2).unwrap(), q(-1, 2));
        assert_eq!(mu2_closed(3).unwrap(), q(1, 6));
        for k in 1..=64 {
            assert_eq!(mu(2, k).unwrap(), mu2_closed(k).unwrap(), "k={k}");
        }
    }

    #[test]
    fn ladder_image_examples() {
        assert_eq!(ladder_image(1, 0).unwrap().coeffs, vec![q(1, 1)]);
        assert_eq!(ladder_image(1, 1).unwrap().coeffs, vec![q(1, 2), q(1, 2)]);
        assert_eq!(ladder_image(2, 1).unwrap().coeffs, vec![q(3, 4), q(1, 4)]);
        for n in 1..=8 {
            for k in 0..=10 {
                assert_eq!(ladder_image(n, k).unwrap().coeff_sum(), Rational::one());
            }
        }
    }

    #[test]
    fn eigenvalue_extraction_matches_theorem_sum() {
        assert_eq!(eigenvalue_extract(&ladder_image(1, 0).unwrap(), 1).unwrap(), Rational::one());
        for k in 1..=20 {
            let img = ladder_image(2, k - 1).unwrap();
            assert_eq!(eigenvalue_extract(&img, k).unwrap(), mu2_closed(k).unwrap());
        }
        for n in 1..=6 {
            for k in 1..=12 {
                let img = ladder_image(n, k - 1).unwrap();
                let m = mu(n, k).unwrap();
                assert_eq!(eigenvalue_extract(&img, k).unwrap(), m);
                assert_eq!(eigenvalue_extract(&img.swapped(), k).unwrap(), m);
            }
        }
        let img = ladder_image(2, 3).unwrap();
        assert!(matches!(eigenvalue_extract(&img, 3), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn unsupported_peels_are_reported() {
        let lower = |p: usize| GeneratorImage::one_loop(p, Family::Left);
        for site in Site::ALL {
            let wrong = native_family(site).other();
            assert_eq!(
                peel(site, wrong, 2, &lower),
                Err(Error::UnsupportedPeel { site, family: wrong })
            );
        }
    }

    #[test]
    fn one_loop_families_are_swaps() {
        let d = BoxDiagram::one_loop();
        for k in 0..6 {
            let l = diagram_image(&d, Family::Left, k).unwrap();
            let r = diagram_image(&d, Family::Right, k).unwrap();
            assert_eq!(l.swapped(), r);
        }
    }

    #[test]
    fn peel_rules_reproduce_the_coefficient_recursion() {
        // Z2 and W2 attachments on the ladder reach the same table by two routes
        for n in 1..=6 {
            for k in 0..=8 {
                let via_z2 = diagram_image(&BoxDiagram::from_history(&vec![Site::Z2; n - 1]).unwrap(), Family::Right, k).unwrap();
                let via_w2 = diagram_image(&BoxDiagram::ladder(n).unwrap(), Family::Right, k).unwrap();
                assert_eq!(via_z2.coeffs, a_table(n, k).unwrap().a);
                assert_eq!(via_w2, via_z2);
            }
        }
    }

    #[test]
    fn magic_identities_hold_for_every_history() {
        for n in 1..=4usize {
            let reference: Vec<_> = (0..=8).map(|k| ladder_image(n, k).unwrap()).collect();
            for hist in (0..n - 1).map(|_| Site::ALL).multi_cartesian_product() {
                let images = history_images(&hist, 8).unwrap();
                for k in 0..=8 {
                    assert_eq!(images[Family::Right.slot()][k], reference[k], "{hist:?} k={k}");
                    assert_eq!(images[Family::Left.slot()][k], reference[k].swapped(), "{hist:?} k={k}");
                }
            }
        }
    }

    #[test]
    fn verify_magic_report() {
        for n in 1..=3 {
            let r = verify_magic(n, 6).unwrap();
            assert!(r.passed());
            assert_eq!(r.rows.len(), r.diagrams * 2 * 7);
        }
        assert!(verify_magic(6, 2).is_err());
    }
}
