//! Exact pairings and eigenvalues against direct quadrature and against
//! each other.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use boxmagic::diagrams::{canonical_key, enumerate, BoxDiagram};
use boxmagic::magic::{eigenvalue_extract, ladder_image, mu_table, Family};
use boxmagic::quadrature::checks::{one_loop_eval, u2_prefactor};
use boxmagic::quadrature::{integrate, QuadratureSpec};
use boxmagic::scalar::Scalar;
use boxmagic::tbasis::{degt, pair_h, pair_h2, pair_zh, Space};
use boxmagic::{BasisExpansion, ComplexQuaternion, Rational, TIndex, C64};

fn random_expansion(rng: &mut ChaCha8Rng, space: Space, ks: &[i32], terms: usize) -> BasisExpansion<C64> {
    let mut e = BasisExpansion::new(space);
    while e.terms().len() < terms {
        let two_l = rng.gen_range(0..=3u32);
        let l = two_l as i32;
        let two_n = -l + 2 * rng.gen_range(0..=l);
        let two_m = -l + 2 * rng.gen_range(0..=l);
        let k = match space {
            Space::HMinus => -(l + 1),
            _ => ks[rng.gen_range(0..ks.len())],
        };
        let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        e.add_term(TIndex { two_l, two_n, two_m, k }, c).unwrap();
    }
    e
}

fn numeric_u2(f: impl Fn(&ComplexQuaternion) -> C64 + Sync, radius: f64) -> C64 {
    let spec = QuadratureSpec::u2(radius, 20).unwrap();
    integrate(&spec, |p| f(&p.point)).unwrap() * u2_prefactor()
}

fn numeric_s3(f: impl Fn(&ComplexQuaternion) -> C64 + Sync, radius: f64) -> C64 {
    let spec = QuadratureSpec::s3(radius, 24).unwrap();
    integrate(&spec, |p| f(&p.point)).unwrap() / (2.0 * PI * PI * radius)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

#[test]
fn zh_pairing_matches_u2_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for radius in [0.7, 1.0, 1.4] {
        let f1 = random_expansion(&mut rng, Space::Zh, &[-3, -2, -1, 0, 1], 6);
        let f2 = random_expansion(&mut rng, Space::Zh, &[-3, -2, -1, 0, 1], 6);
        // make sure some pairs are dual so the value is not trivially zero
        let mut f2 = f2;
        for (i, v) in f1.terms().clone() {
            let (_, x, y, power) = boxmagic::tbasis::to_inverse_form(i);
            let (_, partner) = boxmagic::tbasis::inverse_term(i.two_l, y, x, -power - 2).unwrap();
            f2.add_term(partner, v).unwrap();
        }
        let exact = pair_zh(&f1, &f2);
        let numeric = numeric_u2(|z| f1.eval(z).unwrap() * f2.eval(z).unwrap(), radius);
        assert!(close(numeric, exact, 1e-10), "R = {radius}: {numeric} vs {exact}");
        assert!(exact.norm() > 1e-3);
    }
}

#[test]
fn s3_pairing_matches_quadrature_and_is_antisymmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for radius in [0.6, 1.0, 1.7] {
        let plus = random_expansion(&mut rng, Space::HPlus, &[0], 5);
        let minus = random_expansion(&mut rng, Space::HMinus, &[], 5);
        let forward = numeric_s3(|z| degt(&plus).eval(z).unwrap() * minus.eval(z).unwrap(), radius);
        let backward = numeric_s3(|z| degt(&minus).eval(z).unwrap() * plus.eval(z).unwrap(), radius);
        let exact = pair_h(&plus, &minus).unwrap();
        assert!(close(forward, exact, 1e-10), "{forward} vs {exact}");
        assert!(close(backward, -exact, 1e-10));
        assert_eq!(pair_h(&minus, &plus).unwrap(), -exact);
    }
}

#[test]
fn second_h_pairing_agrees_with_the_first_on_h_plus_first() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..3 {
        let plus = random_expansion(&mut rng, Space::HPlus, &[0], 5);
        let minus = random_expansion(&mut rng, Space::HMinus, &[], 5);
        let via_u2 = pair_h2(&plus, &minus);
        let numeric =
            numeric_u2(|z| degt(&plus).eval(z).unwrap() * minus.eval(z).unwrap() / z.norm(), 1.1);
        assert!(close(numeric, via_u2, 1e-10));
        assert!(close(via_u2, pair_h(&plus, &minus).unwrap(), 1e-12));
    }
}

#[test]
fn extracted_eigenvalues_match_the_tables() {
    for n in 1..=6 {
        let table = mu_table(n, 12).unwrap();
        for k in 1..=12 {
            let img = ladder_image(n, k - 1).unwrap();
            assert_eq!(eigenvalue_extract(&img, k).unwrap(), table.mu[k - 1], "n = {n}, k = {k}");
            let left = img.swapped();
            assert_eq!(left.family, Family::Left);
            assert_eq!(eigenvalue_extract(&left, k).unwrap(), table.mu[k - 1]);
        }
    }
}

#[test]
fn one_loop_diagram_integrand_matches_the_quadrature_integrand() {
    let c = |re: f64, im: f64| C64::new(re, im);
    let pts = [
        ComplexQuaternion::new(c(1.8, 0.0), c(0.0, 0.2), c(0.1, 0.0), c(2.0, 0.0)),
        ComplexQuaternion::new(c(0.0, 1.7), c(0.3, 0.0), c(0.0, 0.0), c(-1.9, 0.1)),
        ComplexQuaternion::new(c(0.3, 0.0), c(0.1, 0.0), c(0.0, -0.2), c(0.25, 0.0)),
        ComplexQuaternion::new(c(-0.2, 0.1), c(0.0, 0.0), c(0.15, 0.0), c(0.0, 0.35)),
    ];
    let d = BoxDiagram::one_loop();
    let expr = d.integrand();
    let spec = QuadratureSpec::u2(1.0, 24).unwrap();
    let via_expr = integrate(&spec, |p| {
        let mut all = pts.to_vec();
        all.push(p.point);
        expr.eval(&all).unwrap()
    })
    .unwrap()
        * u2_prefactor();
    let direct = one_loop_eval(&pts[0], &pts[1], &pts[2], &pts[3], &spec).unwrap();
    assert!((via_expr - direct).norm() <= 1e-14 * direct.norm());
}

#[test]
fn two_loop_diagrams_have_distinct_integrands() {
    let ds = enumerate(2).unwrap();
    assert_eq!(ds.len(), 2);
    assert_ne!(ds[0].integrand().to_string(), ds[1].integrand().to_string());
    let ladder = canonical_key(&BoxDiagram::ladder(2).unwrap()).unwrap();
    assert_eq!(ds.iter().filter(|d| canonical_key(d).unwrap() == ladder).count(), 1);
}

#[test]
fn exact_scalars_evaluate_like_floats() {
    let mut e = BasisExpansion::<Rational>::new(Space::HPlus);
    e.add_term(TIndex { two_l: 2, two_n: 0, two_m: 2, k: 0 }, Rational::new(3.into(), 7.into())).unwrap();
    let z = ComplexQuaternion::new(C64::new(0.3, 0.1), C64::new(-0.2, 0.0), C64::new(0.1, 0.4), C64::new(0.5, -0.3));
    let f: BasisExpansion<C64> = {
        let mut f = BasisExpansion::new(Space::HPlus);
        for (i, v) in e.terms() {
            f.add_term(*i, v.to_c64()).unwrap();
        }
        f
    };
    assert!((e.eval(&z).unwrap() - f.eval(&z).unwrap()).norm() < 1e-15);
}
