//! Polylogarithms `Li_N` on the principal branch and the ladder functions
//! `Φ^(1)`, `Φ^(2)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::rules::adaptive_gk;
use crate::scalar::C64;

/// Below this modulus `Li_N` is summed as a power series.
pub const SERIES_RADIUS: f64 = 0.5;

/// `Σ_{k≥1} z^k / k^N`, summed until the terms stop contributing.
pub fn li_series(n: u32, z: C64) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    let mut power = z;
    for k in 1..10_000u32 {
        let term = power / (k as f64).powi(n as i32);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() || power.norm() == 0.0 {
            break;
        }
        power *= z;
    }
    sum
}

/// `((−1)^N/(N−1)!) ∫_0^1 ln^{N−1}ξ / (ξ − 1/z) dξ`.
pub fn li_integral(n: u32, z: C64) -> Result<C64> {
    check_argument(n, z)?;
    if z.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let pole = z.inv();
    let f = move |xi: f64| xi.ln().powi(n as i32 - 1) / (xi - pole);
    let integral = adaptive_gk(&f, 0.0, 1.0, 1e-15, 1e-13);
    let fact: f64 = (1..n).map(f64::from).product();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(integral * (sign / fact))
}

fn check_argument(n: u32, z: C64) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange { what: "N", value: "0".into(), reason: "polylog order starts at 1" });
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::OutOfRange { what: "z", value: z.to_string(), reason: "argument must be finite" });
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::BranchCut(z.to_string()));
    }
    Ok(())
}

/// `Li_N(z)`: the series for `|z| ≤ 1/2`, the integral representation
/// otherwise, and `−ln(1 − z)` for `N = 1`.
pub fn li(n: u32, z: C64) -> Result<C64> {
    check_argument(n, z)?;
    if n == 1 {
        return Ok(-(C64::new(1.0, 0.0) - z).ln());
    }
    if z.norm() <= SERIES_RADIUS {
        Ok(li_series(n, z))
    } else {
        li_integral(n, z)
    }
}

fn li_real(n: u32, x: f64) -> Result<f64> {
    Ok(li(n, C64::new(x, 0.0))?.re)
}

/// `λ = √((1−x−y)² − 4xy)` and `ρ = 2/(1−x−y+λ)`.
pub fn lambda_rho(x: f64, y: f64) -> Result<(f64, f64)> {
    let lambda_sq = (1.0 - x - y).powi(2) - 4.0 * x * y;
    if lambda_sq.is_nan() || lambda_sq <= 0.0 {
        return Err(Error::RegionViolation { x, y });
    }
    let lambda = lambda_sq.sqrt();
    let denom = 1.0 - x - y + lambda;
    if denom == 0.0 {
        return Err(Error::RegionViolation { x, y });
    }
    Ok((lambda, 2.0 / denom))
}

/// Constant term of `Φ^(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phi1Constant {
    /// `π³/3`, the default.
    PiCubed,
    /// `π²/3`, the value in the usual dilogarithm form of the one-loop box.
    PiSquared,
}

impl Phi1Constant {
    pub fn value(self) -> f64 {
        match self {
            Phi1Constant::PiCubed => PI.powi(3) / 3.0,
            Phi1Constant::PiSquared => PI.powi(2) / 3.0,
        }
    }
}

impl Default for Phi1Constant {
    fn default() -> Self {
        if cfg!(feature = "phi1-pi-squared") {
            Phi1Constant::PiSquared
        } else {
            Phi1Constant::PiCubed
        }
    }
}

/// `λ, ρx, ρy`, requiring `x, y > 0`, `λ² > 0` and `ρx, ρy > 0`.
fn region(x: f64, y: f64) -> Result<(f64, f64, f64)> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::RegionViolation { x, y });
    }
    let (lambda, rho) = lambda_rho(x, y)?;
    let (rx, ry) = (rho * x, rho * y);
    if !(rx > 0.0 && ry > 0.0) {
        return Err(Error::RegionViolation { x, y });
    }
    Ok((lambda, rx, ry))
}

pub fn phi1(x: f64, y: f64) -> Result<f64> {
    phi1_with(x, y, Phi1Constant::default())
}

pub fn phi1_with(x: f64, y: f64, constant: Phi1Constant) -> Result<f64> {
    let (lambda, rx, ry) = region(x, y)?;
    let sum = 2.0 * li_real(2, -rx)?
        + 2.0 * li_real(2, -ry)?
        + (y / x).ln() * ((1.0 + ry) / (1.0 + rx)).ln()
        + rx.ln() * ry.ln()
        + constant.value();
    Ok(sum / lambda)
}

pub fn phi2(x: f64, y: f64) -> Result<f64> {
    let (lambda, rx, ry) = region(x, y)?;
    let lyx = (y / x).ln();
    let (lx, ly) = (rx.ln(), ry.ln());
    let sum = 6.0 * li_real(4, -rx)?
        + 6.0 * li_real(4, -ry)?
        + 3.0 * lyx * (li_real(3, -rx)? - li_real(3, -ry)?)
        + 0.5 * lyx * lyx * (li_real(2, -rx)? - li_real(2, -ry)?)
        + 0.25 * lx * lx * ly * ly
        + 0.5 * PI * PI * lx * ly
        + PI * PI / 12.0 * lyx
        + 7.0 / 60.0 * PI.powi(4);
    Ok(sum / lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn special_values() {
        for n in 1..=5 {
            assert_eq!(li(n, C64::new(0.0, 0.0)).unwrap(), C64::new(0.0, 0.0));
        }
        let v = li(2, C64::new(-1.0, 0.0)).unwrap();
        assert!((v.re + PI * PI / 12.0).abs() < 1e-14, "{v}");
        // Li_2(1/2) = π²/12 − ln²2/2
        let half = li(2, C64::new(0.5, 0.0)).unwrap().re;
        assert!((half - (PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2))).abs() < 1e-15);
        assert!(matches!(li(2, C64::new(1.0, 0.0)), Err(Error::BranchCut(_))));
        assert!(matches!(li(3, C64::new(4.0, 0.0)), Err(Error::BranchCut(_))));
        assert!(li(0, C64::new(0.1, 0.0)).is_err());
    }

    #[test]
    fn li1_matches_integral_form() {
        let z = C64::new(-0.7, 0.4);
        assert!(rel(li_integral(1, z).unwrap(), li(1, z).unwrap()) < 1e-12);
    }

    #[test]
    fn series_and_integral_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let r = rng.gen_range(0.05..0.9);
            let z = C64::from_polar(r, rng.gen_range(-PI..PI));
            for n in 2..=4 {
                let a = li_series(n, z);
                let b = li_integral(n, z).unwrap();
                assert!(rel(a, b) <= 1e-8, "N={n} z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn derivative_ladder() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let h = 1e-5;
        for _ in 0..20 {
            let z = C64::from_polar(rng.gen_range(0.1..0.9), rng.gen_range(-3.0..3.0));
            for n in 2..=4 {
                let dz = C64::new(h, 0.0);
                let fd = (li(n, z + dz).unwrap() - li(n, z - dz).unwrap()) / (2.0 * h);
                let exact = li(n - 1, z).unwrap() / z;
                assert!(rel(fd, exact) <= 1e-6, "N={n} z={z}");
            }
        }
    }

    #[test]
    fn lambda_rho_examples() {
        let (l, r) = lambda_rho(0.1, 0.1).unwrap();
        assert!((l - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((r * (1.0 - 0.2 + l) - 2.0).abs() < 1e-15);
        let (l2, r2) = lambda_rho(0.3, 0.05).unwrap();
        let (l3, r3) = lambda_rho(0.05, 0.3).unwrap();
        assert_eq!((l2, r2), (l3, r3));
        assert!(matches!(lambda_rho(0.5, 0.5), Err(Error::RegionViolation { .. })));
    }

    #[test]
    fn phi1_symmetry_and_regressions() {
        let d = (phi1(0.1, 0.2).unwrap() - phi1(0.2, 0.1).unwrap()).abs();
        assert!(d <= 1e-10);
        assert!(phi1(0.1, 0.1).unwrap().is_finite());
        assert!(phi2(0.15, 0.15).unwrap().is_finite());
        assert!(matches!(phi1(-0.1, 0.2), Err(Error::RegionViolation { .. })));
        assert!(matches!(phi2(0.5, 0.5), Err(Error::RegionViolation { .. })));
    }

    // 50-digit reference values from an independent arbitrary-precision
    // polylogarithm implementation, rounded to f64.
    const PHI1_PI_CUBED_01_01: f64 = 18.203556417679505706265108987467204429201166686566;
    const PHI1_PI_SQUARED_01_01: f64 = 9.1077808919432743323700224873429288878502097728024;
    const PHI2_01_02: f64 = 34.81032849992975143614077148600357819820264960229;

    #[test]
    fn high_precision_regressions() {
        let a = phi1_with(0.1, 0.1, Phi1Constant::PiCubed).unwrap();
        let b = phi1_with(0.1, 0.1, Phi1Constant::PiSquared).unwrap();
        let c = phi2(0.1, 0.2).unwrap();
        assert!((a - PHI1_PI_CUBED_01_01).abs() <= 1e-13 * PHI1_PI_CUBED_01_01, "{a}");
        assert!((b - PHI1_PI_SQUARED_01_01).abs() <= 1e-13 * PHI1_PI_SQUARED_01_01, "{b}");
        assert!((c - PHI2_01_02).abs() <= 1e-13 * PHI2_01_02, "{c}");

        let z3 = li(3, C64::new(0.3, 0.7)).unwrap();
        let e3 = C64::new(0.236_594_485_459_348_47, 0.741_547_768_542_481);
        assert!(rel(z3, e3) <= 1e-12, "{z3}");
        let z4 = li(4, C64::new(-0.6, -0.5)).unwrap();
        let e4 = C64::new(-0.591_243_114_293_481_4, -0.467_052_579_832_797_2);
        assert!(rel(z4, e4) <= 1e-12, "{z4}");
    }

    #[test]
    fn constant_variants_differ_by_constant_over_lambda() {
        let (l, _) = lambda_rho(0.1, 0.3).unwrap();
        let a = phi1_with(0.1, 0.3, Phi1Constant::PiCubed).unwrap();
        let b = phi1_with(0.1, 0.3, Phi1Constant::PiSquared).unwrap();
        assert!(((a - b) * l - (PI.powi(3) - PI.powi(2)) / 3.0).abs() < 1e-12);
    }
}
