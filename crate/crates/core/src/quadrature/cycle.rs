//! Product rules on the `U(2)_R` and `S^3_R` charts.
//!
//! `θ` uses Gauss-Legendre, the angles use the periodic trapezoid rule. The
//! `U(2)_R` phase `φ` is integrated over the full circle with half weight:
//! the chart covers `U(2)_R` twice there, and the integrand becomes
//! periodic in `φ`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rules::{gauss_legendre, trapezoid_periodic};
use crate::error::{Error, Result};
use crate::hc_algebra::{chart_s3, chart_u2, CyclePoint};
use crate::scalar::C64;

pub const MIN_NODES: usize = 4;

/// Upper bound on the total number of nodes of one product rule.
pub const NODE_BUDGET: usize = 1 << 27;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    U2,
    S3,
}

impl Chart {
    pub fn dims(self) -> u32 {
        match self {
            Chart::U2 => 4,
            Chart::S3 => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub chart: Chart,
    pub radius: f64,
    pub nodes_per_dim: usize,
}

impl QuadratureSpec {
    pub fn new(chart: Chart, radius: f64, nodes_per_dim: usize) -> Result<Self> {
        let spec = Self { chart, radius, nodes_per_dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn u2(radius: f64, nodes_per_dim: usize) -> Result<Self> {
        Self::new(Chart::U2, radius, nodes_per_dim)
    }

    pub fn s3(radius: f64, nodes_per_dim: usize) -> Result<Self> {
        Self::new(Chart::S3, radius, nodes_per_dim)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::OutOfRange {
                what: "radius",
                value: self.radius.to_string(),
                reason: "must be positive and finite",
            });
        }
        if self.nodes_per_dim < MIN_NODES {
            return Err(Error::OutOfRange {
                what: "nodes per dimension",
                value: self.nodes_per_dim.to_string(),
                reason: "at least 4 nodes are required",
            });
        }
        let total = self.total_nodes();
        if total.is_none_or(|t| t > NODE_BUDGET) {
            return Err(Error::SizeLimit {
                what: "total quadrature nodes",
                value: total.unwrap_or(usize::MAX),
                max: NODE_BUDGET,
            });
        }
        Ok(())
    }

    pub fn total_nodes(&self) -> Option<usize> {
        self.nodes_per_dim.checked_pow(self.chart.dims())
    }
}

/// Node evaluator writing one value per output slot.
pub trait Integrand: Sync {
    fn outputs(&self) -> usize;
    fn eval(&self, p: &CyclePoint, out: &mut [C64]);
}

struct Single<F>(F);

impl<F: Fn(&CyclePoint) -> C64 + Sync> Integrand for Single<F> {
    fn outputs(&self) -> usize {
        1
    }
    fn eval(&self, p: &CyclePoint, out: &mut [C64]) {
        out[0] = (self.0)(p);
    }
}

/// `Σ weight · f` over the chart nodes.
pub fn integrate<F>(spec: &QuadratureSpec, f: F) -> Result<C64>
where
    F: Fn(&CyclePoint) -> C64 + Sync,
{
    Ok(integrate_many(spec, &Single(f))?[0])
}

/// Integrates all outputs of `f` in one sweep over the nodes.
///
/// Each chunk of nodes is summed in a fixed order and the chunk sums are
/// combined by a pairwise tree, so the result does not depend on the number
/// of worker threads.
pub fn integrate_many(spec: &QuadratureSpec, f: &dyn Integrand) -> Result<Vec<C64>> {
    spec.validate()?;
    let n = spec.nodes_per_dim;
    let m = f.outputs();
    let theta = gauss_legendre(n, 0.0, PI / 2.0);
    let xi = trapezoid_periodic(n, 0.0, 2.0 * PI);
    let outer: Vec<(f64, f64)> = match spec.chart {
        // the chart covers U(2)_R twice for φ ∈ [0, 2π)
        Chart::U2 => trapezoid_periodic(n, 0.0, 2.0 * PI).into_iter().map(|(x, w)| (x, 0.5 * w)).collect(),
        Chart::S3 => vec![(0.0, 1.0)],
    };

    let chunks: Vec<(usize, usize)> = (0..outer.len()).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let sums = chunks
        .par_iter()
        .map(|&(i, j)| {
            let (phi, w_phi) = outer[i];
            let (th, w_th) = theta[j];
            let mut acc = vec![C64::new(0.0, 0.0); m];
            let mut vals = vec![C64::new(0.0, 0.0); m];
            for &(x1, w1) in &xi {
                for &(x2, w2) in &xi {
                    let (p, params) = match spec.chart {
                        Chart::U2 => (chart_u2(spec.radius, [phi, th, x1, x2]), [phi, th, x1, x2]),
                        Chart::S3 => (chart_s3(spec.radius, [th, x1, x2]), [th, x1, x2, 0.0]),
                    };
                    f.eval(&p, &mut vals);
                    let w = p.weight * (w_phi * w_th * w1 * w2);
                    for (a, v) in acc.iter_mut().zip(&vals) {
                        if !(v.re.is_finite() && v.im.is_finite()) {
                            return Err(Error::NonFinite { params });
                        }
                        *a += w * v;
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&sums, m))
}

fn pairwise_sum(parts: &[Vec<C64>], m: usize) -> Vec<C64> {
    match parts {
        [] => vec![C64::new(0.0, 0.0); m],
        [one] => one.clone(),
        _ => {
            let (lo, hi) = parts.split_at(parts.len() / 2);
            let (a, b) = (pairwise_sum(lo, m), pairwise_sum(hi, m));
            a.iter().zip(&b).map(|(x, y)| x + y).collect()
        }
    }
}
