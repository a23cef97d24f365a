//! Seeded random points with a guaranteed distance from the Shilov boundary.

use rand::Rng;

use crate::error::Result;
use crate::hc_algebra::{domain_margin, ComplexQuaternion, DomainSign, GroupElement};
use crate::scalar::C64;

/// Smallest allowed distance from `U(2)_R`, as a fraction of `R`.
pub const MIN_MARGIN: f64 = 0.15;

fn random_matrix<R: Rng + ?Sized>(rng: &mut R) -> ComplexQuaternion {
    let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    ComplexQuaternion::new(c(), c(), c(), c())
}

/// A point of `D^+_R` with `σ_max / R` uniform in `ratio`, or of `D^-_R`
/// with `σ_min / R` uniform in `ratio`. Ill-conditioned draws are rejected
/// so that points of `D^-_R` stay at moderate size.
pub fn point_in_domain<R: Rng + ?Sized>(
    rng: &mut R,
    radius: f64,
    sign: DomainSign,
    ratio: (f64, f64),
) -> ComplexQuaternion {
    loop {
        let z = random_matrix(rng);
        let [lo, hi] = z.singular_values();
        if lo <= 0.0 || hi / lo > 3.0 {
            continue;
        }
        let target = rng.gen_range(ratio.0..=ratio.1) * radius;
        let scaled = match sign {
            DomainSign::Plus => z.scale(C64::new(target / hi, 0.0)),
            DomainSign::Minus => z.scale(C64::new(target / lo, 0.0)),
        };
        if domain_margin(&scaled, radius, sign) >= MIN_MARGIN * radius {
            return scaled;
        }
    }
}

/// A random `h` with `‖h − 1‖ = distance` in the 4x4 Frobenius norm.
pub fn group_element_near_identity<R: Rng + ?Sized>(rng: &mut R, distance: f64) -> Result<GroupElement> {
    let blocks = [random_matrix(rng), random_matrix(rng), random_matrix(rng), random_matrix(rng)];
    let size = blocks.iter().map(|b| b.frobenius().powi(2)).sum::<f64>().sqrt();
    let [a, b, c, d] = blocks.map(|m| m.scale(C64::new(distance / size, 0.0)));
    let one = ComplexQuaternion::identity();
    GroupElement::new(one + a, b, c, one + d)
}
