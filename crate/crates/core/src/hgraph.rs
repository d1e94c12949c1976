//! Hypergraphs over vertices `1..=n`, stored as bitmask edge sets.
//!
//! Vertex `i` is bit `i - 1` of an edge mask. Edges are kept sorted by
//! mask value, and the empty edge is never stored.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;

use crate::error::{budget, domain, Result};

pub const MAX_VERTICES: usize = 24;

pub type Edge = u32;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypergraph {
    n: usize,
    edges: BTreeSet<Edge>,
}

/// Set of Hamming weights with negative amplitude for an `m`-qubit symmetric state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSignature {
    pub m: usize,
    pub weights: BTreeSet<usize>,
}

impl WeightSignature {
    pub fn new(m: usize, weights: impl IntoIterator<Item = usize>) -> Result<Self> {
        let weights: BTreeSet<usize> = weights.into_iter().collect();
        if let Some(&w) = weights.iter().find(|&&w| w > m) {
            return domain(format!("weight {w} exceeds qubit count {m}"));
        }
        Ok(WeightSignature { m, weights })
    }

    pub fn contains(&self, w: usize) -> bool {
        self.weights.contains(&w)
    }
}

pub fn mask_of(vertices: &[usize]) -> Edge {
    vertices.iter().fold(0, |m, &v| m | 1 << (v - 1))
}

pub fn vertices_of(e: Edge) -> Vec<usize> {
    (0..32).filter(|b| e >> b & 1 == 1).map(|b| b + 1).collect()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn full_mask(n: usize) -> Edge {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl Hypergraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return domain(format!("vertex count {n} outside 1..={MAX_VERTICES}"));
        }
        Ok(Hypergraph { n, edges: BTreeSet::new() })
    }

    /// Builds from vertex lists; duplicate edges cancel pairwise.
    pub fn from_edges<I, E>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        let mut h = Hypergraph::new(n)?;
        for e in edges {
            let e = e.as_ref();
            if e.is_empty() {
                return domain("empty edge");
            }
            if let Some(&v) = e.iter().find(|&&v| v == 0 || v > n) {
                return domain(format!("vertex {v} outside 1..={n}"));
            }
            h.toggle(mask_of(e));
        }
        Ok(h)
    }

    pub fn from_masks(n: usize, masks: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut h = Hypergraph::new(n)?;
        let full = full_mask(n);
        for m in masks {
            if m == 0 || m & !full != 0 {
                return domain(format!("edge mask {m:#b} not a nonempty subset of {n} vertices"));
            }
            h.toggle(m);
        }
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn max_cardinality(&self) -> usize {
        self.edges.iter().map(|e| e.count_ones() as usize).max().unwrap_or(0)
    }

    /// Toggles a nonempty edge. Caller guarantees the mask is within range.
    pub fn toggle(&mut self, e: Edge) {
        debug_assert!(e != 0 && e & !full_mask(self.n) == 0);
        if !self.edges.remove(&e) {
            self.edges.insert(e);
        }
    }

    pub(crate) fn check_vertex(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return domain(format!("vertex {i} outside 1..={}", self.n));
        }
        Ok(())
    }

    pub(crate) fn check_subset(&self, e: Edge) -> Result<()> {
        if e == 0 {
            return domain("empty vertex subset");
        }
        if e & !full_mask(self.n) != 0 {
            return domain(format!("subset {:?} outside 1..={}", vertices_of(e), self.n));
        }
        Ok(())
    }

    /// f_H(x) for an index whose bit (i-1) is x_i.
    pub fn phase_bit(&self, x: u64) -> u8 {
        let x = x as u32;
        (self.edges.iter().filter(|&&e| x & e == e).count() & 1) as u8
    }
}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let es: Vec<Vec<usize>> = self.edges.iter().map(|&e| vertices_of(e)).collect();
        write!(f, "H(n={}, {:?})", self.n, es)
    }
}

pub fn make_complete(n: usize, ks: &[usize]) -> Result<Hypergraph> {
    let mut h = Hypergraph::new(n)?;
    let ks: BTreeSet<usize> = ks.iter().copied().collect();
    for &k in &ks {
        if k < 2 || k > n {
            return domain(format!("cardinality {k} outside 2..={n}"));
        }
    }
    for m in 1..=full_mask(n) {
        if ks.contains(&(m.count_ones() as usize)) {
            h.edges.insert(m);
        }
    }
    Ok(h)
}

pub fn sym_diff(a: &Hypergraph, b: &Hypergraph) -> Result<Hypergraph> {
    if a.n != b.n {
        return domain(format!("vertex counts differ: {} vs {}", a.n, b.n));
    }
    Ok(Hypergraph { n: a.n, edges: a.edges.symmetric_difference(&b.edges).copied().collect() })
}

/// Star E(i) and adjacency A(i) of a vertex. The adjacency contains 0 when {i} is an edge.
pub fn incidence(h: &Hypergraph, i: usize) -> Result<(Vec<Edge>, Vec<Edge>)> {
    h.check_vertex(i)?;
    let bit = 1 << (i - 1);
    let star: Vec<Edge> = h.edges().filter(|e| e & bit != 0).collect();
    let adj = star.iter().map(|e| e & !bit).collect();
    Ok((star, adj))
}

pub fn phase_function(h: &Hypergraph, x: &[bool]) -> Result<u8> {
    if x.len() != h.n {
        return domain(format!("bitstring length {} != {}", x.len(), h.n));
    }
    let idx = x.iter().enumerate().fold(0u64, |m, (j, &b)| m | (b as u64) << j);
    Ok(h.phase_bit(idx))
}

/// Removes bit `i-1` and shifts the higher bits down.
pub(crate) fn drop_bit(e: Edge, i: usize) -> Edge {
    let low = e & ((1 << (i - 1)) - 1);
    let high = e >> i;
    low | high << (i - 1)
}

pub fn x_difference(h: &Hypergraph, i: usize) -> Result<Hypergraph> {
    h.check_vertex(i)?;
    if h.n == 1 {
        return domain("x-difference of a one-vertex hypergraph has no vertices");
    }
    let bit = 1 << (i - 1);
    if h.contains(bit) {
        return domain(format!("1-edge {{{i}}} would reduce to the empty edge"));
    }
    let mut d = Hypergraph::new(h.n - 1)?;
    for e in h.edges().filter(|e| e & bit != 0) {
        d.toggle(drop_bit(e & !bit, i));
    }
    Ok(d)
}

pub fn spanning_subs(h: &Hypergraph) -> Result<Vec<Hypergraph>> {
    let m = h.edge_count();
    budget("edge count for spanning sub-hypergraphs", m as u64, 20)?;
    let edges: Vec<Edge> = h.edges().collect();
    Ok((0u32..1 << m)
        .map(|sel| Hypergraph {
            n: h.n,
            edges: edges.iter().enumerate().filter(|(j, _)| sel >> j & 1 == 1).map(|(_, &e)| e).collect(),
        })
        .collect())
}

pub fn weight_signature(h: &Hypergraph) -> Option<WeightSignature> {
    let n = h.n;
    let mut g = vec![None::<u8>; n + 1];
    for x in 0..1u64 << n {
        let w = x.count_ones() as usize;
        let f = h.phase_bit(x);
        match g[w] {
            None => g[w] = Some(f),
            Some(v) if v != f => return None,
            _ => {}
        }
    }
    Some(WeightSignature {
        m: n,
        weights: (0..=n).filter(|&w| g[w] == Some(1)).collect(),
    })
}

pub fn layers_from_signature(sig: &WeightSignature) -> Result<BTreeSet<usize>> {
    if sig.contains(0) {
        return domain("weight 0 cannot carry a negative sign: no edge layer acts on the all-zero string");
    }
    let mut ks = BTreeSet::new();
    for w in 1..=sig.m {
        let cur = ks.iter().map(|&k| binomial(w, k)).sum::<u128>() & 1;
        if cur as u8 != sig.contains(w) as u8 {
            ks.insert(w);
        }
    }
    Ok(ks)
}

pub fn avg_degree(h: &Hypergraph) -> Ratio<u64> {
    let total: u64 = (1..=h.n)
        .map(|v| {
            let bit = 1 << (v - 1);
            let nb = h.edges().filter(|e| e & bit != 0).fold(0, |acc, e| acc | e) & !bit;
            nb.count_ones() as u64
        })
        .sum();
    Ratio::new(total, h.n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hg(n: usize, es: &[&[usize]]) -> Hypergraph {
        Hypergraph::from_edges(n, es.iter().copied()).unwrap()
    }

    #[test]
    fn complete_families() {
        assert_eq!(make_complete(3, &[3]).unwrap(), hg(3, &[&[1, 2, 3]]));
        assert_eq!(make_complete(4, &[3, 4]).unwrap().edge_count(), 5);
        assert_eq!(make_complete(5, &[2]).unwrap().edge_count(), 10);
        assert!(make_complete(3, &[1]).is_err());
        assert!(make_complete(3, &[4]).is_err());
    }

    #[test]
    fn sym_diff_examples() {
        let a = hg(3, &[&[1, 2]]);
        assert_eq!(sym_diff(&a, &a).unwrap().edge_count(), 0);
        let b = sym_diff(&hg(3, &[&[1, 2, 3]]), &hg(3, &[&[2, 3]])).unwrap();
        assert_eq!(b, hg(3, &[&[1, 2, 3], &[2, 3]]));
        assert!(sym_diff(&a, &Hypergraph::new(4).unwrap()).is_err());
    }

    #[test]
    fn incidence_examples() {
        let (s, a) = incidence(&make_complete(3, &[3]).unwrap(), 1).unwrap();
        assert_eq!((s, a), (vec![0b111], vec![0b110]));
        let (s, a) = incidence(&hg(3, &[&[2, 3]]), 1).unwrap();
        assert!(s.is_empty() && a.is_empty());
        let (_, a) = incidence(&hg(2, &[&[1], &[1, 2]]), 1).unwrap();
        assert_eq!(a, vec![0, 0b10]);
        assert!(incidence(&hg(2, &[]), 3).is_err());
    }

    #[test]
    fn phase_function_examples() {
        let k = make_complete(3, &[3]).unwrap();
        assert_eq!(phase_function(&k, &[true, true, true]).unwrap(), 1);
        let k2 = hg(3, &[&[1, 2, 3], &[2, 3]]);
        // x = 011 read as x1=0, x2=1, x3=1
        assert_eq!(phase_function(&k2, &[false, true, true]).unwrap(), 1);
        assert_eq!(phase_function(&k2, &[true, true, true]).unwrap(), 0);
        assert_eq!(phase_function(&hg(4, &[]), &[true; 4]).unwrap(), 0);
    }

    #[test]
    fn x_difference_examples() {
        let d = x_difference(&make_complete(3, &[3]).unwrap(), 3).unwrap();
        assert_eq!(d, hg(2, &[&[1, 2]]));
        for i in 1..=4 {
            let d = x_difference(&make_complete(4, &[3]).unwrap(), i).unwrap();
            assert_eq!(d, make_complete(3, &[2]).unwrap());
        }
        let d = x_difference(&hg(3, &[&[1, 2]]), 3).unwrap();
        assert_eq!((d.n(), d.edge_count()), (2, 0));
        let d = x_difference(&hg(3, &[&[1, 2]]), 1).unwrap();
        assert_eq!(d, hg(2, &[&[1]]));
        assert!(x_difference(&hg(2, &[&[1]]), 1).is_err());
    }

    #[test]
    fn spanning_subs_examples() {
        let subs = spanning_subs(&hg(3, &[&[1, 2], &[1, 2, 3]])).unwrap();
        assert_eq!(subs.len(), 4);
        assert_eq!(subs[0].edge_count(), 0);
        assert_eq!(subs[3].edge_count(), 2);
        assert_eq!(spanning_subs(&hg(3, &[])).unwrap().len(), 1);
        let big = make_complete(7, &[3]).unwrap();
        assert!(matches!(spanning_subs(&big), Err(crate::Error::Budget { .. })));
    }

    #[test]
    fn signature_examples() {
        let s = weight_signature(&make_complete(3, &[3]).unwrap()).unwrap();
        assert_eq!(s.weights, BTreeSet::from([3]));
        assert!(weight_signature(&hg(3, &[&[1, 2], &[2, 3]])).is_none());
        assert!(weight_signature(&hg(3, &[])).unwrap().weights.is_empty());
    }

    #[test]
    fn layers_examples() {
        let s = WeightSignature::new(3, [3]).unwrap();
        assert_eq!(layers_from_signature(&s).unwrap(), BTreeSet::from([3]));
        let s = WeightSignature::new(3, [2, 3]).unwrap();
        assert_eq!(layers_from_signature(&s).unwrap(), BTreeSet::from([2]));
        assert!(layers_from_signature(&WeightSignature::new(3, [0]).unwrap()).is_err());
    }

    #[test]
    fn layers_round_trip_exhaustive() {
        for n in 2..=7 {
            for sel in 0u32..1 << (n - 1) {
                let ks: Vec<usize> = (0..n - 1).filter(|b| sel >> b & 1 == 1).map(|b| b + 2).collect();
                let h = make_complete(n, &ks).unwrap();
                let sig = weight_signature(&h).unwrap();
                let back = layers_from_signature(&sig).unwrap();
                assert_eq!(back, ks.iter().copied().collect::<BTreeSet<_>>());
            }
        }
    }

    #[test]
    fn complete_phase_matches_binomials() {
        for n in 2..=8 {
            for ks in [vec![2], vec![3], vec![2, 4], vec![n]] {
                if ks.iter().any(|&k| k > n) {
                    continue;
                }
                let h = make_complete(n, &ks).unwrap();
                for x in 0..1u64 << n {
                    let w = x.count_ones() as usize;
                    let expect = ks.iter().map(|&k| binomial(w, k)).sum::<u128>() & 1;
                    assert_eq!(h.phase_bit(x) as u128, expect);
                }
            }
        }
    }

    #[test]
    fn avg_degree_examples() {
        assert_eq!(avg_degree(&make_complete(3, &[3]).unwrap()), Ratio::from_integer(2));
        assert_eq!(avg_degree(&hg(4, &[])), Ratio::from_integer(0));
        assert_eq!(avg_degree(&make_complete(4, &[3]).unwrap()), Ratio::from_integer(3));
        assert_eq!(avg_degree(&hg(3, &[&[1, 2]])), Ratio::new(2, 3));
    }

    fn arb_hg(n: usize) -> impl Strategy<Value = Hypergraph> {
        proptest::collection::vec(1u32..(1 << n), 0..12)
            .prop_map(move |ms| Hypergraph::from_masks(n, ms).unwrap())
    }

    proptest! {
        #[test]
        fn sym_diff_algebra(a in arb_hg(5), b in arb_hg(5), c in arb_hg(5)) {
            let ab = sym_diff(&a, &b).unwrap();
            prop_assert_eq!(&ab, &sym_diff(&b, &a).unwrap());
            prop_assert_eq!(
                sym_diff(&ab, &c).unwrap(),
                sym_diff(&a, &sym_diff(&b, &c).unwrap()).unwrap()
            );
            prop_assert_eq!(sym_diff(&a, &a).unwrap().edge_count(), 0);
            prop_assert_eq!(sym_diff(&a, &ab).unwrap(), b);
        }

        #[test]
        fn x_difference_symmetric_independent(n in 3usize..=8, sel in 1u32..64) {
            let ks: Vec<usize> = (0..6).filter(|b| sel >> b & 1 == 1).map(|b| b + 2).filter(|&k| k <= n).collect();
            let h = make_complete(n, &ks).unwrap();
            let sigs: Vec<_> = (1..=n).map(|i| weight_signature(&x_difference(&h, i).unwrap())).collect();
            prop_assert!(sigs[0].is_some());
            prop_assert!(sigs.iter().all(|s| s == &sigs[0]));
        }
    }
}
