//! Numerical checks of the reproducing and orthogonality identities.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cycle::{integrate, integrate_many, Integrand, QuadratureSpec};
use super::sampling::{group_element_near_identity, point_in_domain};
use crate::error::{Error, Result};
use crate::hc_algebra::{in_domain, ComplexQuaternion, CyclePoint, DomainSign, GroupElement, Membership};
use crate::scalar::{Scalar, C64};
use crate::tbasis::{degt, eval_t, BasisExpansion, TIndex};

/// `i / 2π³`, the normalization of integrals over `U(2)_R`.
pub fn u2_prefactor() -> C64 {
    C64::new(0.0, 1.0 / (2.0 * PI.powi(3)))
}

/// Range of `σ_max / R` for sampled points of `D^+_R`.
pub const INNER_RATIO: (f64, f64) = (0.3, 0.85);
/// Range of `σ_min / R` for sampled points of `D^-_R`.
pub const OUTER_RATIO: (f64, f64) = (1.15, 1.6);

fn require_domain(z: &ComplexQuaternion, radius: f64, sign: DomainSign, name: &str) -> Result<()> {
    match in_domain(z, radius, sign) {
        Membership::Inside => Ok(()),
        m => {
            let dom = match sign {
                DomainSign::Plus => "D+",
                DomainSign::Minus => "D-",
            };
            Err(Error::DomainViolation(format!("{name} is {m:?} relative to {dom} at R = {radius}")))
        }
    }
}

fn require_h_plus<C: Scalar>(phi: &BasisExpansion<C>) -> Result<()> {
    match phi.terms().keys().find(|i| i.k != 0) {
        Some(i) => Err(Error::UnsupportedSpace(format!("{i} is not in H+"))),
        None => Ok(()),
    }
}

/// A polynomial with its coefficients converted once to `C64`.
#[derive(Clone, Debug)]
struct Compiled(Vec<([u32; 4], C64)>);

impl Compiled {
    fn degt_of<C: Scalar>(phi: &BasisExpansion<C>) -> Result<Self> {
        let p = degt(phi).to_polynomial()?;
        Ok(Self(p.terms().iter().map(|(e, v)| (*e, v.to_c64())).collect()))
    }

    fn eval(&self, z: &ComplexQuaternion) -> C64 {
        let vars = z.entries();
        self.0
            .iter()
            .map(|(e, c)| e.iter().zip(&vars).fold(*c, |acc, (&p, x)| acc * x.powu(p)))
            .sum()
    }
}

struct Many<F>(usize, F);

impl<F: Fn(&CyclePoint, &mut [C64]) + Sync> Integrand for Many<F> {
    fn outputs(&self) -> usize {
        self.0
    }
    fn eval(&self, p: &CyclePoint, out: &mut [C64]) {
        (self.1)(p, out)
    }
}

fn require_chart(spec: &QuadratureSpec, chart: super::cycle::Chart) -> Result<()> {
    if spec.chart != chart {
        return Err(Error::OutOfRange {
            what: "chart",
            value: format!("{:?}", spec.chart),
            reason: "wrong integration cycle for this identity",
        });
    }
    Ok(())
}

fn poisson_many(phis: &[Compiled], w: &ComplexQuaternion, spec: &QuadratureSpec) -> Result<Vec<C64>> {
    require_chart(spec, super::cycle::Chart::S3)?;
    require_domain(w, spec.radius, DomainSign::Plus, "W")?;
    let scale = 1.0 / (2.0 * PI * PI * spec.radius);
    let f = Many(phis.len(), |p: &CyclePoint, out: &mut [C64]| {
        let kernel = (p.point - *w).norm().inv();
        for (o, phi) in out.iter_mut().zip(phis) {
            *o = phi.eval(&p.point) * kernel;
        }
    });
    Ok(integrate_many(spec, &f)?.into_iter().map(|v| v * scale).collect())
}

/// `(1/2π²) ∫_{S^3_R} (deg̃ φ)(Z) / N(Z − W) dS/R` for `φ ∈ H+`, `W ∈ D^+_R`.
pub fn poisson_eval<C: Scalar>(phi: &BasisExpansion<C>, w: &ComplexQuaternion, spec: &QuadratureSpec) -> Result<C64> {
    require_h_plus(phi)?;
    Ok(poisson_many(&[Compiled::degt_of(phi)?], w, spec)?[0])
}

/// `(1/(k+1)) Σ_p w^p w'^{k−p}` for the entry `coord` (0..4 in the order
/// `z11, z12, z21, z22`).
pub fn lemma_zp_closed(coord: usize, k: u32, w: &ComplexQuaternion, w2: &ComplexQuaternion) -> C64 {
    let (a, b) = (w.entries()[coord], w2.entries()[coord]);
    (0..=k).map(|p| a.powu(p) * b.powu(k - p)).sum::<C64>() / (k as f64 + 1.0)
}

fn lemma_zp_many(k_max: u32, w: &ComplexQuaternion, w2: &ComplexQuaternion, spec: &QuadratureSpec) -> Result<Vec<C64>> {
    require_chart(spec, super::cycle::Chart::U2)?;
    require_domain(w, spec.radius, DomainSign::Plus, "W")?;
    require_domain(w2, spec.radius, DomainSign::Plus, "W'")?;
    let per = k_max as usize + 1;
    let f = Many(4 * per, |p: &CyclePoint, out: &mut [C64]| {
        let kernel = ((p.point - *w).norm() * (p.point - *w2).norm()).inv();
        for (c, z) in p.point.entries().iter().enumerate() {
            let mut power = kernel;
            for k in 0..per {
                out[c * per + k] = power;
                power *= z;
            }
        }
    });
    let pre = u2_prefactor();
    Ok(integrate_many(spec, &f)?.into_iter().map(|v| v * pre).collect())
}

/// `(i/2π³) ∫_{U(2)_R} z^k dV / (N(Z − W) N(Z − W'))` for one entry `z`.
pub fn lemma_zp_eval(
    coord: usize,
    k: u32,
    w: &ComplexQuaternion,
    w2: &ComplexQuaternion,
    spec: &QuadratureSpec,
) -> Result<C64> {
    if coord >= 4 {
        return Err(Error::OutOfRange { what: "coordinate", value: coord.to_string(), reason: "expected 0..4" });
    }
    Ok(lemma_zp_many(k, w, w2, spec)?[coord * (k as usize + 1) + k as usize])
}

fn collapse_many(phis: &[Compiled], w: &ComplexQuaternion, spec: &QuadratureSpec) -> Result<Vec<C64>> {
    require_chart(spec, super::cycle::Chart::U2)?;
    require_domain(w, spec.radius, DomainSign::Plus, "W")?;
    let f = Many(phis.len(), |p: &CyclePoint, out: &mut [C64]| {
        let kernel = (p.point.norm() * (p.point - *w).norm()).inv();
        for (o, phi) in out.iter_mut().zip(phis) {
            *o = phi.eval(&p.point) * kernel;
        }
    });
    let pre = u2_prefactor();
    Ok(integrate_many(spec, &f)?.into_iter().map(|v| v * pre).collect())
}

/// `(i/2π³) ∫_{U(2)_R} (deg̃ φ)(Z)/N(Z) · 1/N(Z − W) dV`, which reproduces
/// `φ(W)` for `φ ∈ H+`, `W ∈ D^+_R`.
pub fn collapse_z1<C: Scalar>(phi: &BasisExpansion<C>, w: &ComplexQuaternion, spec: &QuadratureSpec) -> Result<C64> {
    require_h_plus(phi)?;
    Ok(collapse_many(&[Compiled::degt_of(phi)?], w, spec)?[0])
}

/// The one-loop box integral
/// `(i/2π³) ∫_{U(2)_r} dV / (N(Z1−T) N(Z2−T) N(W1−T) N(W2−T))`.
///
/// Refuses points outside `Z1, Z2 ∈ D^-_r`, `W1, W2 ∈ D^+_r`: on other
/// cycles the integral computes something else.
pub fn one_loop_eval(
    z1: &ComplexQuaternion,
    z2: &ComplexQuaternion,
    w1: &ComplexQuaternion,
    w2: &ComplexQuaternion,
    spec: &QuadratureSpec,
) -> Result<C64> {
    require_chart(spec, super::cycle::Chart::U2)?;
    let r = spec.radius;
    require_domain(z1, r, DomainSign::Minus, "Z1")?;
    require_domain(z2, r, DomainSign::Minus, "Z2")?;
    require_domain(w1, r, DomainSign::Plus, "W1")?;
    require_domain(w2, r, DomainSign::Plus, "W2")?;
    let v = integrate(spec, |p| {
        let t = p.point;
        ((*z1 - t).norm() * (*z2 - t).norm() * (*w1 - t).norm() * (*w2 - t).norm()).inv()
    })?;
    Ok(v * u2_prefactor())
}

/// Points `(Z1, Z2, W1, W2)` of a four-point integral.
pub type FourPoints = [ComplexQuaternion; 4];

/// `h` applied to all four points, `Z ↦ (aZ + b)(cZ + d)^{-1}`.
pub fn transform_points(h: &GroupElement, pts: &FourPoints) -> Result<FourPoints> {
    Ok([h.act(&pts[0])?, h.act(&pts[1])?, h.act(&pts[2])?, h.act(&pts[3])?])
}

/// `N(a' − Z1 c') N(c Z2 + d) N(c W1 + d) N(a' − W2 c')`, with `(a b; c d)`
/// the blocks of the map and `(a' b'; c' d')` those of its inverse.
pub fn conformal_prefactor(h: &GroupElement, pts: &FourPoints) -> C64 {
    let [z1, z2, w1, w2] = pts;
    (h.a_inv - *z1 * h.c_inv).norm()
        * (h.c * *z2 + h.d).norm()
        * (h.c * *w1 + h.d).norm()
        * (h.a_inv - *w2 * h.c_inv).norm()
}

/// The verification checks exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Normalization,
    Poisson,
    LemmaZp,
    Collapse,
    Orthogonality,
    Conformal,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Normalization,
        Check::Poisson,
        Check::LemmaZp,
        Check::Collapse,
        Check::Orthogonality,
        Check::Conformal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Normalization => "normalization",
            Check::Poisson => "poisson",
            Check::LemmaZp => "lemma-zp",
            Check::Collapse => "collapse",
            Check::Orthogonality => "orthogonality",
            Check::Conformal => "conformal",
        }
    }

    /// Nodes per dimension used when none are requested.
    pub fn default_nodes(self) -> usize {
        match self {
            Check::Normalization => 32,
            Check::Poisson => 64,
            Check::LemmaZp => 40,
            Check::Collapse => 48,
            Check::Orthogonality => 16,
            Check::Conformal => 32,
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::Normalization => 1e-8,
            Check::Poisson => 1e-6,
            Check::LemmaZp => 1e-5,
            Check::Collapse => 1e-6,
            Check::Orthogonality => 1e-6,
            Check::Conformal => 1e-4,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::OutOfRange {
            what: "check",
            value: s.to_string(),
            reason: "unknown verification check",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub radius: f64,
    /// Overrides every check's default node count.
    pub nodes: Option<usize>,
    /// Overrides every tolerance of a check.
    pub tol: Option<f64>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { radius: 1.0, nodes: None, tol: None, seed: 2024 }
    }
}

impl VerifyOptions {
    fn nodes_for(&self, check: Check) -> usize {
        self.nodes.unwrap_or_else(|| check.default_nodes())
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub label: String,
    pub computed: C64,
    pub expected: C64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckEntry {
    fn new(label: impl Into<String>, computed: C64, expected: C64, residual: f64, tolerance: f64) -> Self {
        Self { label: label.into(), computed, expected, residual, tolerance, passed: residual <= tolerance }
    }

    /// Residual relative to `max(1, |expected|)`.
    fn mixed(label: impl Into<String>, computed: C64, expected: C64, tolerance: f64) -> Self {
        let r = (computed - expected).norm() / expected.norm().max(1.0);
        Self::new(label, computed, expected, r, tolerance)
    }

    fn relative(label: impl Into<String>, computed: C64, expected: C64, tolerance: f64) -> Self {
        let r = (computed - expected).norm() / expected.norm();
        Self::new(label, computed, expected, r, tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: Check,
    pub radius: f64,
    pub nodes_per_dim: usize,
    /// Nodes summed over every quadrature the check ran.
    pub total_nodes: usize,
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }
}

struct Builder {
    report: CheckReport,
}

impl Builder {
    fn new(check: Check, opts: &VerifyOptions) -> Self {
        Self {
            report: CheckReport {
                check,
                radius: opts.radius,
                nodes_per_dim: opts.nodes_for(check),
                total_nodes: 0,
                entries: Vec::new(),
            },
        }
    }

    fn spec_u2(&mut self, radius: f64) -> Result<QuadratureSpec> {
        let s = QuadratureSpec::u2(radius, self.report.nodes_per_dim)?;
        self.report.total_nodes += s.total_nodes().unwrap_or(0);
        Ok(s)
    }

    fn spec_s3(&mut self, radius: f64) -> Result<QuadratureSpec> {
        let s = QuadratureSpec::s3(radius, self.report.nodes_per_dim)?;
        self.report.total_nodes += s.total_nodes().unwrap_or(0);
        Ok(s)
    }

    fn push(&mut self, e: CheckEntry) {
        self.report.entries.push(e);
    }
}

fn rng(opts: &VerifyOptions, check: Check) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed ^ (check as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn t_index(two_l: u32, two_n: i32, two_m: i32) -> TIndex {
    TIndex { two_l, two_n, two_m, k: 0 }
}

fn named_functions(indices: &[(&'static str, TIndex)]) -> Result<(Vec<&'static str>, Vec<BasisExpansion<C64>>)> {
    let mut names = Vec::new();
    let mut phis = Vec::new();
    for &(name, idx) in indices {
        names.push(name);
        phis.push(BasisExpansion::basis(idx)?);
    }
    Ok((names, phis))
}

/// `∫_{U(2)_R} dV / N(Z)² = −2π³ i` at `R = 0.8, 1.25` and the requested radius.
pub fn check_normalization(opts: &VerifyOptions) -> Result<CheckReport> {
    let mut b = Builder::new(Check::Normalization, opts);
    let tol = opts.tol_or(Check::Normalization.default_tolerance());
    let expected = C64::new(0.0, -2.0 * PI.powi(3));
    let mut radii = vec![0.8, 1.25];
    if !radii.contains(&opts.radius) {
        radii.push(opts.radius);
    }
    for r in radii {
        let spec = b.spec_u2(r)?;
        let v = integrate(&spec, |p| p.point.norm().powi(-2))?;
        b.push(CheckEntry::relative(format!("R = {r}"), v, expected, tol));
    }
    Ok(b.report)
}

/// Poisson reproduction of `1, z11, z11², t^1_{0 0̲}` at five sampled points
/// of `D^+_R`, and of `t^1_{0 0̲}` at the origin.
pub fn check_poisson(opts: &VerifyOptions) -> Result<CheckReport> {
    let mut b = Builder::new(Check::Poisson, opts);
    let tol = opts.tol_or(Check::Poisson.default_tolerance());
    let mut rng = rng(opts, Check::Poisson);
    let (names, phis) = named_functions(&[
        ("1", t_index(0, 0, 0)),
        ("z11", t_index(1, -1, -1)),
        ("z11^2", t_index(2, -2, -2)),
        ("t1_00", t_index(2, 0, 0)),
    ])?;
    let compiled = phis.iter().map(Compiled::degt_of).collect::<Result<Vec<_>>>()?;
    let r = opts.radius;
    let mut points: Vec<ComplexQuaternion> =
        (0..5).map(|_| point_in_domain(&mut rng, r, DomainSign::Plus, INNER_RATIO)).collect();
    points.push(ComplexQuaternion::zero());
    for (j, w) in points.iter().enumerate() {
        let spec = b.spec_s3(r)?;
        let vals = poisson_many(&compiled, w, &spec)?;
        let origin = j == 5;
        for ((name, phi), v) in names.iter().zip(&phis).zip(vals) {
            if origin && *name != "t1_00" {
                continue;
            }
            let label = if origin { format!("{name} at W = 0") } else { format!("{name} at W{j}") };
            b.push(CheckEntry::mixed(label, v, phi.eval(w)?, tol));
        }
    }
    Ok(b.report)
}

/// Lemma on `z^p`: all four entries, `k ≤ 3`, two sampled pairs `W, W'`.
pub fn check_lemma_zp(opts: &VerifyOptions) -> Result<CheckReport> {
    const K_MAX: u32 = 3;
    const ENTRY_NAMES: [&str; 4] = ["z11", "z12", "z21", "z22"];
    let mut b = Builder::new(Check::LemmaZp, opts);
    let tol = opts.tol_or(Check::LemmaZp.default_tolerance());
    let mut rng = rng(opts, Check::LemmaZp);
    let r = opts.radius;
    for pair in 0..2 {
        let w = point_in_domain(&mut rng, r, DomainSign::Plus, INNER_RATIO);
        let w2 = point_in_domain(&mut rng, r, DomainSign::Plus, INNER_RATIO);
        let spec = b.spec_u2(r)?;
        let vals = lemma_zp_many(K_MAX, &w, &w2, &spec)?;
        let per = K_MAX as usize + 1;
        for (c, name) in ENTRY_NAMES.iter().enumerate() {
            for k in 0..=K_MAX {
                let exact = lemma_zp_closed(c, k, &w, &w2);
                let label = format!("{name}^{k}, pair {pair}");
                b.push(CheckEntry::relative(label, vals[c * per + k as usize], exact, tol));
            }
        }
    }
    Ok(b.report)
}

/// The collapse identity at radii `0.8 R` and `1.25 R` and the agreement of
/// the two values.
pub fn check_collapse(opts: &VerifyOptions) -> Result<CheckReport> {
    const R_INDEPENDENCE_TOL: f64 = 1e-8;
    let mut b = Builder::new(Check::Collapse, opts);
    let tol = opts.tol_or(Check::Collapse.default_tolerance());
    let rtol = opts.tol_or(R_INDEPENDENCE_TOL);
    let mut rng = rng(opts, Check::Collapse);
    let (names, phis) = named_functions(&[
        ("1", t_index(0, 0, 0)),
        ("z11", t_index(1, -1, -1)),
        ("z11^2", t_index(2, -2, -2)),
        ("z11^3", t_index(3, -3, -3)),
        ("t1_00", t_index(2, 0, 0)),
        ("t3/2_(1/2)(-1/2)", t_index(3, 1, -1)),
    ])?;
    let compiled = phis.iter().map(Compiled::degt_of).collect::<Result<Vec<_>>>()?;
    let (r1, r2) = (0.8 * opts.radius, 1.25 * opts.radius);
    let w = point_in_domain(&mut rng, r1, DomainSign::Plus, INNER_RATIO);
    let s1 = b.spec_u2(r1)?;
    let s2 = b.spec_u2(r2)?;
    let v1 = collapse_many(&compiled, &w, &s1)?;
    let v2 = collapse_many(&compiled, &w, &s2)?;
    for (i, (name, phi)) in names.iter().zip(&phis).enumerate() {
        let exact = phi.eval(&w)?;
        b.push(CheckEntry::mixed(format!("{name}, R = {r1}"), v1[i], exact, tol));
        b.push(CheckEntry::mixed(format!("{name}, R = {r2}"), v2[i], exact, tol));
        b.push(CheckEntry::mixed(format!("{name}, R-independence"), v2[i], v1[i], rtol));
    }
    Ok(b.report)
}

/// All `(2l, 2n, 2m)` with `2l ≤ two_l_max`.
fn t_labels(two_l_max: u32) -> Vec<(u32, i32, i32)> {
    let mut out = Vec::new();
    for two_l in 0..=two_l_max {
        let l = two_l as i32;
        for two_n in (-l..=l).step_by(2) {
            for two_m in (-l..=l).step_by(2) {
                out.push((two_l, two_n, two_m));
            }
        }
    }
    out
}

/// Worst deviation of a computed Gram matrix from its exact values,
/// split into the nonzero and the vanishing entries.
fn gram_entries(
    b: &mut Builder,
    label: &str,
    computed: &[C64],
    expected: &[C64],
    tol: f64,
) {
    let mut worst: [Option<(f64, C64, C64)>; 2] = [None, None];
    for (c, e) in computed.iter().zip(expected) {
        let slot = usize::from(e.norm() == 0.0);
        let r = (c - e).norm() / e.norm().max(1.0);
        if worst[slot].is_none_or(|(w, _, _)| r > w) {
            worst[slot] = Some((r, *c, *e));
        }
    }
    for (slot, kind) in [(0, "nonzero entries"), (1, "vanishing entries")] {
        if let Some((r, c, e)) = worst[slot] {
            b.push(CheckEntry::new(format!("{label}, {kind}"), c, e, r, tol));
        }
    }
}

/// Orthogonality of the matrix coefficients for `2l ≤ 3`: the `U(2)_R`
/// pairing of `t^{l'}_{n' m̲'} N^{k'}` with `t^l_{m n̲}(Z^{-1}) N^{-k-2}`
/// (`k, k' ∈ {−1, 0, 1}`), the `S^3_R` pairing of `t^{l'}_{n' m̲'}` with
/// `t^l_{m n̲}(Z^{-1}) N^{-1}` in both orders, and the inner product on
/// `S^3_1`.
pub fn check_orthogonality(opts: &VerifyOptions) -> Result<CheckReport> {
    const TWO_L_MAX: u32 = 3;
    const KS: [i32; 3] = [-1, 0, 1];
    let mut b = Builder::new(Check::Orthogonality, opts);
    let tol = opts.tol_or(Check::Orthogonality.default_tolerance());
    let labels = t_labels(TWO_L_MAX);
    let r = opts.radius;

    // U(2)_R pairing
    let funcs: Vec<(u32, i32, i32, i32)> =
        KS.iter().flat_map(|&k| labels.iter().map(move |&(l, n, m)| (l, n, m, k))).collect();
    let nf = funcs.len();
    let spec = b.spec_u2(r)?;
    let gram = integrate_many(
        &spec,
        &Many(nf * nf, |p: &CyclePoint, out: &mut [C64]| {
            let z = p.point;
            let zi = z.inverse().expect("points of U(2)_R are invertible");
            let nz = z.norm();
            let left: Vec<C64> = funcs.iter().map(|&(l, n, m, k)| eval_t(l, n, m, &z) * nz.powi(k)).collect();
            let right: Vec<C64> = funcs.iter().map(|&(l, n, m, k)| eval_t(l, m, n, &zi) * nz.powi(-k - 2)).collect();
            for (i, a) in left.iter().enumerate() {
                for (j, c) in right.iter().enumerate() {
                    out[i * nf + j] = a * c;
                }
            }
        }),
    )?;
    let pre = u2_prefactor();
    let computed: Vec<C64> = gram.iter().map(|v| v * pre).collect();
    let expected: Vec<C64> = funcs
        .iter()
        .flat_map(|a| {
            funcs.iter().map(move |c| {
                if a == c {
                    C64::new(1.0 / (a.0 as f64 + 1.0), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    gram_entries(&mut b, "U(2) pairing", &computed, &expected, tol);

    // S^3_R pairing (φ1, φ2)_R = (1/2π²) ∫ (deg̃ φ1) φ2 dS/R; deg̃ acts on a
    // function of degree d as multiplication by d + 1.
    let nl = labels.len();
    let spec = b.spec_s3(r)?;
    let raw = integrate_many(
        &spec,
        &Many(nl * nl, |p: &CyclePoint, out: &mut [C64]| {
            let z = p.point;
            let zi = z.inverse().expect("points of S^3_R are invertible");
            let ninv = z.norm().inv();
            let plus: Vec<C64> = labels.iter().map(|&(l, n, m)| eval_t(l, n, m, &z)).collect();
            let minus: Vec<C64> = labels.iter().map(|&(l, n, m)| eval_t(l, m, n, &zi) * ninv).collect();
            for (i, a) in plus.iter().enumerate() {
                for (j, c) in minus.iter().enumerate() {
                    out[i * nl + j] = a * c;
                }
            }
        }),
    )?;
    let scale = 1.0 / (2.0 * PI * PI * r);
    let delta: Vec<C64> = labels
        .iter()
        .flat_map(|a| labels.iter().map(move |c| C64::new(if a == c { 1.0 } else { 0.0 }, 0.0)))
        .collect();
    let forward: Vec<C64> =
        raw.iter().enumerate().map(|(i, v)| v * scale * (labels[i / nl].0 as f64 + 1.0)).collect();
    gram_entries(&mut b, "S3 pairing (t, t~)", &forward, &delta, tol);
    let backward: Vec<C64> =
        raw.iter().enumerate().map(|(i, v)| v * scale * -(labels[i % nl].0 as f64 + 1.0)).collect();
    let minus_delta: Vec<C64> = delta.iter().map(|d| -d).collect();
    gram_entries(&mut b, "S3 pairing (t~, t)", &backward, &minus_delta, tol);

    // inner product on S^3_1
    let spec = b.spec_s3(1.0)?;
    let raw = integrate_many(
        &spec,
        &Many(nl * nl, |p: &CyclePoint, out: &mut [C64]| {
            let vals: Vec<C64> = labels.iter().map(|&(l, n, m)| eval_t(l, n, m, &p.point)).collect();
            for (i, a) in vals.iter().enumerate() {
                for (j, c) in vals.iter().enumerate() {
                    out[i * nl + j] = a * c.conj();
                }
            }
        }),
    )?;
    let computed: Vec<C64> = raw
        .iter()
        .enumerate()
        .map(|(i, v)| v * (labels[i / nl].0 as f64 + 1.0) / (2.0 * PI * PI))
        .collect();
    let expected: Vec<C64> = labels
        .iter()
        .flat_map(|a| {
            labels.iter().map(move |c| {
                if a == c {
                    let norm = crate::tbasis::unitary_norm(&t_index(a.0, a.1, a.2));
                    C64::new(crate::scalar::rational_to_f64(&norm), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    gram_entries(&mut b, "inner product", &computed, &expected, tol);
    Ok(b.report)
}

/// Five random `h` with `‖h − 1‖ ≤ 0.05` applied to sampled points.
pub fn check_conformal(opts: &VerifyOptions) -> Result<CheckReport> {
    const MAX_DISTANCE: f64 = 0.05;
    let mut b = Builder::new(Check::Conformal, opts);
    let tol = opts.tol_or(Check::Conformal.default_tolerance());
    let mut rng = rng(opts, Check::Conformal);
    let r = opts.radius;
    let mut trial = 0;
    while trial < 5 {
        let pts: FourPoints = [
            point_in_domain(&mut rng, r, DomainSign::Minus, OUTER_RATIO),
            point_in_domain(&mut rng, r, DomainSign::Minus, OUTER_RATIO),
            point_in_domain(&mut rng, r, DomainSign::Plus, INNER_RATIO),
            point_in_domain(&mut rng, r, DomainSign::Plus, INNER_RATIO),
        ];
        let dist = rand::Rng::gen_range(&mut rng, 0.2 * MAX_DISTANCE..=MAX_DISTANCE);
        let h = group_element_near_identity(&mut rng, dist)?;
        let moved = transform_points(&h, &pts)?;
        let signs = [DomainSign::Minus, DomainSign::Minus, DomainSign::Plus, DomainSign::Plus];
        if moved.iter().zip(signs).any(|(p, s)| in_domain(p, r, s) != Membership::Inside) {
            continue;
        }
        let spec = b.spec_u2(r)?;
        let base = one_loop_eval(&pts[0], &pts[1], &pts[2], &pts[3], &spec)?;
        let spec = b.spec_u2(r)?;
        let image = one_loop_eval(&moved[0], &moved[1], &moved[2], &moved[3], &spec)?;
        let expected = conformal_prefactor(&h, &pts) * base;
        b.push(CheckEntry::relative(format!("h{trial}, |h - 1| = {dist:.4}"), image, expected, tol));
        trial += 1;
    }
    Ok(b.report)
}

pub fn run_check(check: Check, opts: &VerifyOptions) -> Result<CheckReport> {
    if !(opts.radius.is_finite() && opts.radius > 0.0) {
        return Err(Error::OutOfRange { what: "radius", value: opts.radius.to_string(), reason: "must be positive" });
    }
    match check {
        Check::Normalization => check_normalization(opts),
        Check::Poisson => check_poisson(opts),
        Check::LemmaZp => check_lemma_zp(opts),
        Check::Collapse => check_collapse(opts),
        Check::Orthogonality => check_orthogonality(opts),
        Check::Conformal => check_conformal(opts),
    }
}

/// One refinement step of [`grid_refinement`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementStep {
    pub nodes_per_dim: usize,
    pub max_residual: f64,
}

/// Runs `check` at each node count and records the worst residual.
pub fn grid_refinement(check: Check, opts: &VerifyOptions, nodes: &[usize]) -> Result<Vec<RefinementStep>> {
    nodes
        .iter()
        .map(|&n| {
            let o = VerifyOptions { nodes: Some(n), ..*opts };
            Ok(RefinementStep { nodes_per_dim: n, max_residual: run_check(check, &o)?.max_residual() })
        })
        .collect()
}

/// Whether each step cut the residual by `factor`, or had already reached `floor`.
pub fn refinement_converges(steps: &[RefinementStep], factor: f64, floor: f64) -> bool {
    steps
        .windows(2)
        .all(|w| w[0].max_residual <= floor || w[1].max_residual <= floor || w[1].max_residual * factor <= w[0].max_residual)
}
