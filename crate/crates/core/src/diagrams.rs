//! Box diagrams: four external vertices `Z1, Z2, W1, W2`, internal vertices
//! `T_1..T_n`, solid edges (factors `N(Y_i − Y_j)^{-1}`) and dashed edges
//! (factors `N(Y_i − Y_j)`), grown from the one-loop diagram by attaching
//! slingshots.
//!
//! Vertices are plain indices: `0..4` are `Z1, Z2, W1, W2` and `4 + i` is
//! `T_{i+1}`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use itertools::Itertools;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hc_algebra::ComplexQuaternion;
use crate::scalar::{ratio, C64};

pub type Vertex = usize;

/// Number of external vertices.
pub const EXTERNALS: usize = 4;

/// Largest loop order accepted by [`canonical_key`].
pub const MAX_KEY_LOOPS: usize = 8;

/// Largest loop order accepted by [`enumerate`].
pub const MAX_ENUMERATE_LOOPS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Site {
    Z1,
    Z2,
    W1,
    W2,
}

impl Site {
    pub const ALL: [Site; 4] = [Site::Z1, Site::Z2, Site::W1, Site::W2];

    pub fn vertex(self) -> Vertex {
        self as usize
    }

    /// The two externals the string of a slingshot attached here joins.
    pub fn adjacent(self) -> [Site; 2] {
        match self {
            Site::Z1 => [Site::Z2, Site::W2],
            Site::Z2 => [Site::Z1, Site::W1],
            Site::W1 => [Site::Z2, Site::W2],
            Site::W2 => [Site::Z1, Site::W1],
        }
    }

    /// Relations `below ≺ T_n ≺ above` created by an attachment here.
    fn new_relations(self) -> (&'static [Site], &'static [Site]) {
        match self {
            Site::Z1 => (&[Site::W2], &[Site::Z1, Site::Z2]),
            Site::Z2 => (&[Site::W1], &[Site::Z1, Site::Z2]),
            Site::W1 => (&[Site::W1, Site::W2], &[Site::Z2]),
            Site::W2 => (&[Site::W1, Site::W2], &[Site::Z1]),
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(vertex_label(self.vertex()).as_str())
    }
}

impl std::str::FromStr for Site {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "Z1" => Ok(Site::Z1),
            "Z2" => Ok(Site::Z2),
            "W1" => Ok(Site::W1),
            "W2" => Ok(Site::W2),
            _ => Err(Error::OutOfRange {
                what: "site",
                value: s.to_string(),
                reason: "expected one of Z1, Z2, W1, W2",
            }),
        }
    }
}

pub fn vertex_label(v: Vertex) -> String {
    match v {
        0 => "Z1".into(),
        1 => "Z2".into(),
        2 => "W1".into(),
        3 => "W2".into(),
        t => format!("T{}", t - EXTERNALS + 1),
    }
}

fn edge(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    (a.min(b), a.max(b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxDiagram {
    internals: usize,
    /// Sorted multiset of normalized pairs.
    solid: Vec<(Vertex, Vertex)>,
    dashed: Vec<(Vertex, Vertex)>,
    /// `(a, b)` means `a ≺ b`; transitively closed.
    order: BTreeSet<(Vertex, Vertex)>,
    /// Attachment sites, oldest first.
    history: Vec<Site>,
}

fn transitive_closure(order: &mut BTreeSet<(Vertex, Vertex)>) {
    loop {
        let new: Vec<_> = order
            .iter()
            .flat_map(|&(a, b)| order.range((b, 0)..(b + 1, 0)).map(move |&(_, c)| (a, c)))
            .filter(|p| !order.contains(p))
            .collect();
        if new.is_empty() {
            return;
        }
        order.extend(new);
    }
}

impl BoxDiagram {
    /// `T` joined to all four externals, with `W1, W2 ≺ T ≺ Z1, Z2`.
    pub fn one_loop() -> Self {
        let t = EXTERNALS;
        let mut order = BTreeSet::from([(2, t), (3, t), (t, 0), (t, 1)]);
        transitive_closure(&mut order);
        Self {
            internals: 1,
            solid: (0..EXTERNALS).map(|v| edge(v, t)).collect(),
            dashed: Vec::new(),
            order,
            history: Vec::new(),
        }
    }

    /// Replays a sequence of attachments on the one-loop diagram.
    pub fn from_history(sites: &[Site]) -> Result<Self> {
        sites.iter().try_fold(Self::one_loop(), |d, &s| d.attach_slingshot(s))
    }

    /// The ladder built by attaching every slingshot at `W2`.
    pub fn ladder(loops: usize) -> Result<Self> {
        if loops == 0 {
            return Err(Error::OutOfRange {
                what: "loops",
                value: "0".into(),
                reason: "need at least one loop",
            });
        }
        Self::from_history(&vec![Site::W2; loops - 1])
    }

    pub fn loops(&self) -> usize {
        self.internals
    }

    pub fn solid_edges(&self) -> &[(Vertex, Vertex)] {
        &self.solid
    }

    pub fn dashed_edges(&self) -> &[(Vertex, Vertex)] {
        &self.dashed
    }

    pub fn order(&self) -> &BTreeSet<(Vertex, Vertex)> {
        &self.order
    }

    pub fn precedes(&self, a: Vertex, b: Vertex) -> bool {
        self.order.contains(&(a, b))
    }

    pub fn history(&self) -> &[Site] {
        &self.history
    }

    pub fn vertex_count(&self) -> usize {
        EXTERNALS + self.internals
    }

    pub fn solid_degree(&self, v: Vertex) -> usize {
        incidence(&self.solid, v)
    }

    pub fn dashed_degree(&self, v: Vertex) -> usize {
        incidence(&self.dashed, v)
    }

    /// Turns the external at `site` into `T_{n+1}`, adds the handle to a
    /// fresh external with the same label, solid edges to the two adjacent
    /// externals and the dashed string between them.
    pub fn attach_slingshot(&self, site: Site) -> Result<Self> {
        let s = site.vertex();
        let t = EXTERNALS + self.internals;
        let relabel = |v: Vertex| if v == s { t } else { v };
        let [a1, a2] = site.adjacent().map(Site::vertex);

        let mut solid: Vec<_> = self.solid.iter().map(|&(a, b)| edge(relabel(a), relabel(b))).collect();
        solid.extend([edge(s, t), edge(t, a1), edge(t, a2)]);
        solid.sort_unstable();
        let mut dashed: Vec<_> = self.dashed.iter().map(|&(a, b)| edge(relabel(a), relabel(b))).collect();
        dashed.push(edge(a1, a2));
        dashed.sort_unstable();

        let mut order: BTreeSet<_> = self.order.iter().map(|&(a, b)| (relabel(a), relabel(b))).collect();
        let (below, above) = site.new_relations();
        order.extend(below.iter().map(|b| (b.vertex(), t)));
        order.extend(above.iter().map(|a| (t, a.vertex())));
        transitive_closure(&mut order);
        if let Some(&(v, _)) = order.iter().find(|(a, b)| a == b) {
            return Err(Error::CyclicOrder(vertex_label(v)));
        }

        let mut history = self.history.clone();
        history.push(site);
        Ok(Self { internals: self.internals + 1, solid, dashed, order, history })
    }

    /// Checks the degree and edge-count invariants and that the order is a
    /// strict partial order.
    pub fn validate(&self) -> Result<()> {
        let n = self.internals;
        if self.solid.len() != 3 * n + 1 || self.dashed.len() != n - 1 {
            return Err(Error::InvalidDiagram(format!(
                "{} solid and {} dashed edges for n = {n}",
                self.solid.len(),
                self.dashed.len()
            )));
        }
        for v in 0..self.vertex_count() {
            let want = if v < EXTERNALS { 1 } else { 4 };
            let have = self.solid_degree(v) as i64 - self.dashed_degree(v) as i64;
            if have != want {
                return Err(Error::InvalidDiagram(format!(
                    "{} has solid − dashed degree {have}, expected {want}",
                    vertex_label(v)
                )));
            }
        }
        for &(a, b) in &self.order {
            if a == b || self.order.contains(&(b, a)) {
                return Err(Error::CyclicOrder(vertex_label(a)));
            }
            for &(_, c) in self.order.range((b, 0)..(b + 1, 0)) {
                if !self.order.contains(&(a, c)) {
                    return Err(Error::InvalidDiagram(format!(
                        "order not transitive at {} ≺ {} ≺ {}",
                        vertex_label(a),
                        vertex_label(b),
                        vertex_label(c)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn integrand(&self) -> IntegrandExpr {
        IntegrandExpr {
            numerator: self.dashed.clone(),
            denominator: self.solid.clone(),
        }
    }

    /// Graphviz rendering: externals boxed, internals filled, strings dashed.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {name} {{");
        for v in 0..EXTERNALS {
            let _ = writeln!(out, "  {} [shape=box];", vertex_label(v));
        }
        for v in EXTERNALS..self.vertex_count() {
            let _ = writeln!(out, "  {} [shape=circle, style=filled, fillcolor=black, fontcolor=white];", vertex_label(v));
        }
        for &(a, b) in &self.solid {
            let _ = writeln!(out, "  {} -- {};", vertex_label(a), vertex_label(b));
        }
        for &(a, b) in &self.dashed {
            let _ = writeln!(out, "  {} -- {} [style=dashed];", vertex_label(a), vertex_label(b));
        }
        out.push_str("}\n");
        out
    }
}

fn incidence(edges: &[(Vertex, Vertex)], v: Vertex) -> usize {
    edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
}

/// `Π N(dashed) / Π N(solid)` as lists of vertex pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrandExpr {
    pub numerator: Vec<(Vertex, Vertex)>,
    pub denominator: Vec<(Vertex, Vertex)>,
}

impl IntegrandExpr {
    /// Evaluates at `points[v]` for every vertex `v`.
    pub fn eval(&self, points: &[ComplexQuaternion]) -> Result<C64> {
        let needed = self
            .numerator
            .iter()
            .chain(&self.denominator)
            .map(|&(_, b)| b + 1)
            .max()
            .unwrap_or(0);
        if points.len() < needed {
            return Err(Error::InvalidDiagram(format!(
                "{} points supplied, {needed} needed",
                points.len()
            )));
        }
        let n = |&(a, b): &(Vertex, Vertex)| (points[a] - points[b]).norm();
        let num: C64 = self.numerator.iter().map(n).product();
        let den: C64 = self.denominator.iter().map(n).product();
        if den.norm() < crate::hc_algebra::SINGULAR_TOL {
            return Err(Error::SingularMatrix { norm: den.norm() });
        }
        Ok(num / den)
    }
}

impl fmt::Display for IntegrandExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |es: &[(Vertex, Vertex)]| {
            if es.is_empty() {
                "1".to_string()
            } else {
                es.iter()
                    .map(|&(a, b)| format!("N({}-{})", vertex_label(a), vertex_label(b)))
                    .join("·")
            }
        };
        write!(f, "{} / {}", show(&self.numerator), show(&self.denominator))
    }
}

/// Exact radii for the nested cycles `U(2)_{r_k}` of the internal vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiiAssignment {
    /// `r[i]` is the radius of `T_{i+1}`.
    pub r: Vec<BigRational>,
    /// `r_max,i = max{r_k : T_k ≺ Z_i}`.
    pub r_max: [BigRational; 2],
    /// `r_min,i = min{r_k : W_i ≺ T_k}`.
    pub r_min: [BigRational; 2],
}

/// Levels internals by the longest `≺`-chain of internals below them and
/// sets `r = (level + 1)/(depth + 2)`.
pub fn assign_radii(d: &BoxDiagram) -> Result<RadiiAssignment> {
    let n = d.internals;
    let internal = |v: Vertex| v >= EXTERNALS;
    for &(a, b) in &d.order {
        if a == b || d.precedes(b, a) {
            return Err(Error::CyclicOrder(vertex_label(a)));
        }
    }
    // longest chain below, by repeated relaxation (the order is acyclic)
    let mut level = vec![0usize; n];
    for _ in 0..n {
        for &(a, b) in d.order.iter().filter(|(a, b)| internal(*a) && internal(*b)) {
            let cand = level[a - EXTERNALS] + 1;
            if cand > level[b - EXTERNALS] {
                level[b - EXTERNALS] = cand;
            }
        }
    }
    let depth = level.iter().copied().max().unwrap_or(0);
    let r: Vec<BigRational> = level
        .iter()
        .map(|&l| ratio(l as i64 + 1, depth as i64 + 2))
        .collect();

    let pick = |ext: Vertex, below: bool| -> Result<BigRational> {
        let rs = (EXTERNALS..d.vertex_count())
            .filter(|&t| if below { d.precedes(t, ext) } else { d.precedes(ext, t) })
            .map(|t| r[t - EXTERNALS].clone());
        let v = if below { rs.max() } else { rs.min() };
        v.ok_or_else(|| Error::InvalidDiagram(format!("no internal vertex related to {}", vertex_label(ext))))
    };
    let out = RadiiAssignment {
        r_max: [pick(0, true)?, pick(1, true)?],
        r_min: [pick(2, false)?, pick(3, false)?],
        r,
    };
    for &(a, b) in d.order.iter().filter(|(a, b)| internal(*a) && internal(*b)) {
        if out.r[a - EXTERNALS] >= out.r[b - EXTERNALS] {
            return Err(Error::InvalidDiagram(format!(
                "radii violate {} ≺ {}",
                vertex_label(a),
                vertex_label(b)
            )));
        }
    }
    Ok(out)
}

/// Encoding that is minimal over all relabelings of the internals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    solid: Vec<(Vertex, Vertex)>,
    dashed: Vec<(Vertex, Vertex)>,
    order: Vec<(Vertex, Vertex)>,
}

pub fn canonical_key(d: &BoxDiagram) -> Result<CanonicalKey> {
    let n = d.internals;
    if n > MAX_KEY_LOOPS {
        return Err(Error::SizeLimit { what: "loops", value: n, max: MAX_KEY_LOOPS });
    }
    let encode = |perm: &[usize]| {
        let map = |v: Vertex| if v < EXTERNALS { v } else { EXTERNALS + perm[v - EXTERNALS] };
        let relabel_edges = |es: &[(Vertex, Vertex)]| {
            let mut out: Vec<_> = es.iter().map(|&(a, b)| edge(map(a), map(b))).collect();
            out.sort_unstable();
            out
        };
        let mut order: Vec<_> = d.order.iter().map(|&(a, b)| (map(a), map(b))).collect();
        order.sort_unstable();
        CanonicalKey { solid: relabel_edges(&d.solid), dashed: relabel_edges(&d.dashed), order }
    };
    Ok((0..n)
        .permutations(n)
        .map(|p| encode(&p))
        .min()
        .expect("at least one permutation"))
}

/// All distinct `n`-loop diagrams, in breadth-first order of discovery over
/// attachments `Z1, Z2, W1, W2`. Each keeps the history of its first
/// occurrence.
pub fn enumerate(loops: usize) -> Result<Vec<BoxDiagram>> {
    if loops == 0 {
        return Err(Error::OutOfRange { what: "loops", value: "0".into(), reason: "need at least one loop" });
    }
    if loops > MAX_ENUMERATE_LOOPS {
        return Err(Error::SizeLimit { what: "loops", value: loops, max: MAX_ENUMERATE_LOOPS });
    }
    let mut level = vec![BoxDiagram::one_loop()];
    for _ in 1..loops {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for d in &level {
            for site in Site::ALL {
                let child = d.attach_slingshot(site)?;
                if seen.insert(canonical_key(&child)?) {
                    next.push(child);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// Stable file name for the DOT export of the `index`-th `n`-loop diagram.
pub fn dot_file_name(loops: usize, index: usize) -> String {
    format!("boxdiag_n{loops}_{index}.dot")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const Z1: Vertex = 0;
    const Z2: Vertex = 1;
    const W1: Vertex = 2;
    const W2: Vertex = 3;
    const T1: Vertex = 4;
    const T2: Vertex = 5;

    #[test]
    fn one_loop_shape() {
        let d = BoxDiagram::one_loop();
        d.validate().unwrap();
        assert_eq!(d.solid_degree(T1), 4);
        assert!(d.dashed_edges().is_empty());
        assert_eq!(d.integrand().denominator, vec![(Z1, T1), (Z2, T1), (W1, T1), (W2, T1)]);
        for w in [W1, W2] {
            for z in [Z1, Z2] {
                assert!(d.precedes(w, T1) && d.precedes(T1, z) && d.precedes(w, z));
            }
        }
    }

    #[test]
    fn two_loop_ladder_from_w2() {
        let d = BoxDiagram::one_loop().attach_slingshot(Site::W2).unwrap();
        d.validate().unwrap();
        let mut t2_neighbours: Vec<_> = d
            .solid_edges()
            .iter()
            .filter(|&&(a, b)| a == T2 || b == T2)
            .map(|&(a, b)| if a == T2 { b } else { a })
            .collect();
        t2_neighbours.sort_unstable();
        assert_eq!(t2_neighbours, vec![Z1, W1, W2, T1]);
        assert_eq!(d.dashed_edges(), &[(Z1, W1)]);
        // old relations carry over: T1 ≺ Z1 stays, W2 ≺ T1 becomes T2 ≺ T1?
        assert!(d.precedes(T2, T1) || d.precedes(T1, T2));
        assert!(d.precedes(W1, T2) && d.precedes(W2, T2) && d.precedes(T2, Z1));
    }

    #[test]
    fn two_two_loop_diagrams() {
        let keys: Vec<_> = Site::ALL
            .iter()
            .map(|&s| canonical_key(&BoxDiagram::one_loop().attach_slingshot(s).unwrap()).unwrap())
            .collect();
        assert_eq!(keys[1], keys[3], "Z2 and W2 give the ladder");
        assert_eq!(keys[0], keys[2], "Z1 and W1 give the other diagram");
        assert_ne!(keys[0], keys[1]);
        assert_eq!(enumerate(2).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<_> = (1..=5).map(|n| enumerate(n).unwrap().len()).collect();
        assert_eq!(counts[0], 1);
        assert_eq!(counts[1], 2);
        // regression values from exhaustive attachment with dedup
        assert_eq!(&counts[2..], &[6, 20, 68]);
    }

    #[test]
    fn enumerated_diagrams_are_valid() {
        for n in 1..=5 {
            for d in enumerate(n).unwrap() {
                d.validate().unwrap();
                assert_eq!(d.loops(), n);
                assert_eq!(d.history().len(), n - 1);
                let e = d.integrand();
                assert_eq!((e.denominator.len(), e.numerator.len()), (3 * n + 1, n - 1));
                let radii = assign_radii(&d).unwrap();
                assert_eq!(radii.r.len(), n);
            }
        }
    }

    #[test]
    fn every_history_is_valid() {
        for n in 1..=5usize {
            for hist in (0..n - 1).map(|_| Site::ALL).multi_cartesian_product() {
                let d = BoxDiagram::from_history(&hist).unwrap();
                d.validate().unwrap();
                assign_radii(&d).unwrap();
            }
        }
    }

    #[test]
    fn radii_examples() {
        let r = assign_radii(&BoxDiagram::one_loop()).unwrap();
        let half = ratio(1, 2);
        assert_eq!(r.r, vec![half.clone()]);
        assert_eq!(r.r_max, [half.clone(), half.clone()]);
        assert_eq!(r.r_min, [half.clone(), half]);

        let d = BoxDiagram::ladder(2).unwrap();
        let r = assign_radii(&d).unwrap();
        assert!(d.precedes(T2, T1));
        assert!(r.r[1] < r.r[0]);
    }

    #[test]
    fn radii_satisfy_max_min_rules() {
        for d in enumerate(4).unwrap() {
            let r = assign_radii(&d).unwrap();
            for (i, z) in [Z1, Z2].into_iter().enumerate() {
                for t in EXTERNALS..d.vertex_count() {
                    if d.precedes(t, z) {
                        assert!(r.r[t - EXTERNALS] <= r.r_max[i]);
                    }
                }
            }
            for (i, w) in [W1, W2].into_iter().enumerate() {
                for t in EXTERNALS..d.vertex_count() {
                    if d.precedes(w, t) {
                        assert!(r.r[t - EXTERNALS] >= r.r_min[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn key_is_invariant_under_relabeling() {
        let d = BoxDiagram::ladder(3).unwrap();
        let k = canonical_key(&d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..6 {
            let mut perm: Vec<usize> = (0..3).collect();
            for i in (1..3).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let map = |v: Vertex| if v < EXTERNALS { v } else { EXTERNALS + perm[v - EXTERNALS] };
            let mut relabeled = d.clone();
            relabeled.solid = d.solid.iter().map(|&(a, b)| edge(map(a), map(b))).sorted().collect();
            relabeled.dashed = d.dashed.iter().map(|&(a, b)| edge(map(a), map(b))).sorted().collect();
            relabeled.order = d.order.iter().map(|&(a, b)| (map(a), map(b))).collect();
            assert_eq!(canonical_key(&relabeled).unwrap(), k);
        }
        assert_eq!(canonical_key(&BoxDiagram::one_loop()).unwrap(), canonical_key(&BoxDiagram::one_loop()).unwrap());
    }

    #[test]
    fn size_limits() {
        assert!(matches!(enumerate(7), Err(Error::SizeLimit { .. })));
        assert!(matches!(canonical_key(&BoxDiagram::ladder(9).unwrap()), Err(Error::SizeLimit { .. })));
        assert!(enumerate(0).is_err());
    }

    #[test]
    fn integrand_eval_matches_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = BoxDiagram::ladder(2).unwrap();
        let pts: Vec<_> = (0..6)
            .map(|_| {
                let mut e = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                ComplexQuaternion::new(e(), e(), e(), e())
            })
            .collect();
        let n = |a: usize, b: usize| (pts[a] - pts[b]).norm();
        let expected = n(Z1, W1)
            / (n(Z1, T1) * n(Z2, T1) * n(W1, T1) * n(T1, T2) * n(Z1, T2) * n(W1, T2) * n(W2, T2));
        let got = d.integrand().eval(&pts).unwrap();
        assert!((got - expected).norm() <= 1e-12 * expected.norm());
        assert!(d.integrand().eval(&pts[..3]).is_err());
    }

    #[test]
    fn dot_export_is_deterministic() {
        let d = BoxDiagram::ladder(2).unwrap();
        let a = d.to_dot("ladder");
        assert_eq!(a, d.to_dot("ladder"));
        assert!(a.contains("Z1 -- W1 [style=dashed];"));
        assert!(a.contains("T2 [shape=circle"));
        assert_eq!(dot_file_name(2, 0), "boxdiag_n2_0.dot");
    }
}
