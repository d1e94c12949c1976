//! Continuous-variable weighted hypergraphs: Gaussian operations and quadrature
//! measurements as exact weight rewrites, nullifiers, and the cubic-phase cell.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, Result};
use crate::hgraph::{Edge, MAX_VERTICES};

pub type Weight = BigRational;

pub fn weight(num: i64, den: i64) -> Weight {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational closest to a finite float (binary expansion).
pub fn weight_from_f64(x: f64) -> Result<Weight> {
    BigRational::from_float(x).ok_or_else(|| crate::Error::Domain(format!("weight {x} is not finite")))
}

/// Modes 1..=n with real weights on nonempty mode subsets; zero weights are pruned.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedHypergraph {
    n: usize,
    edges: BTreeMap<Edge, Weight>,
}

impl WeightedHypergraph {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return domain(format!("mode count {n} outside 1..={MAX_VERTICES}"));
        }
        Ok(WeightedHypergraph { n, edges: BTreeMap::new() })
    }

    pub fn from_edges<I, E>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, Weight)>,
        E: AsRef<[usize]>,
    {
        let mut h = Self::new(n)?;
        for (e, w) in edges {
            let mask = h.mask(e.as_ref())?;
            if mask == 0 {
                return domain("the empty edge only contributes a global phase");
            }
            h.add(mask, &w);
        }
        Ok(h)
    }

    fn mask(&self, vs: &[usize]) -> Result<Edge> {
        let mut m = 0;
        for &v in vs {
            self.check_mode(v)?;
            m |= 1 << (v - 1);
        }
        Ok(m)
    }

    fn check_mode(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return domain(format!("mode {i} outside 1..={}", self.n));
        }
        Ok(())
    }

    /// Adds w to edge e; the empty edge is a global phase and is dropped.
    fn add(&mut self, e: Edge, w: &Weight) {
        if e == 0 || w.is_zero() {
            return;
        }
        let next = self.edges.get(&e).cloned().unwrap_or_else(Weight::zero) + w;
        if next.is_zero() {
            self.edges.remove(&e);
        } else {
            self.edges.insert(e, next);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeMap<Edge, Weight> {
        &self.edges
    }

    pub fn weight_of(&self, vs: &[usize]) -> Result<Weight> {
        let m = self.mask(vs)?;
        Ok(self.edges.get(&m).cloned().unwrap_or_else(Weight::zero))
    }

    fn star(&self, i: usize) -> Vec<(Edge, Weight)> {
        let bit = 1 << (i - 1);
        self.edges.iter().filter(|(e, _)| *e & bit != 0).map(|(e, w)| (*e, w.clone())).collect()
    }
}

pub fn cv_cz(h: &WeightedHypergraph, e: &[usize], w: &Weight) -> Result<WeightedHypergraph> {
    let mask = h.mask(e)?;
    if mask == 0 {
        return domain("controlled phase needs a nonempty edge");
    }
    let mut g = h.clone();
    g.add(mask, w);
    Ok(g)
}

/// e^{isq̂_i}: adds s to the 1-edge {i}.
pub fn cv_disp_momentum(h: &WeightedHypergraph, i: usize, s: &Weight) -> Result<WeightedHypergraph> {
    h.check_mode(i)?;
    let mut g = h.clone();
    g.add(1 << (i - 1), s);
    Ok(g)
}

/// e^{-isp̂_i}: adds -s·w_{e∪i} to each e in A(i).
pub fn cv_disp_position(h: &WeightedHypergraph, i: usize, s: &Weight) -> Result<WeightedHypergraph> {
    h.check_mode(i)?;
    let bit = 1 << (i - 1);
    let mut g = h.clone();
    for (e, w) in h.star(i) {
        g.add(e & !bit, &(-(s * w)));
    }
    Ok(g)
}

/// Scales every weight in E(i) by r = e^{-ξ} (r > 0, exact).
pub fn cv_squeeze(h: &WeightedHypergraph, i: usize, r: &Weight) -> Result<WeightedHypergraph> {
    h.check_mode(i)?;
    if !r.is_positive() {
        return domain("squeezing factor e^{-xi} must be positive");
    }
    let mut g = h.clone();
    for (e, w) in h.star(i) {
        g.edges.insert(e, w * r);
    }
    Ok(g)
}

/// Squeezing by parameter ξ, with e^{-ξ} rounded to the nearest binary rational.
pub fn cv_squeeze_xi(h: &WeightedHypergraph, i: usize, xi: f64) -> Result<WeightedHypergraph> {
    cv_squeeze(h, i, &weight_from_f64((-xi).exp())?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rotated {
    Hypergraph(WeightedHypergraph),
    /// A rotation by a non-integer multiple of π leaves the hypergraph class.
    LeavesHypergraphClass,
}

/// R_i(nπ): odd n negates the weights in E(i).
pub fn cv_rotate_npi(h: &WeightedHypergraph, i: usize, nint: i64) -> Result<WeightedHypergraph> {
    h.check_mode(i)?;
    let mut g = h.clone();
    if nint.rem_euclid(2) == 1 {
        for (e, w) in h.star(i) {
            g.edges.insert(e, -w);
        }
    }
    Ok(g)
}

/// R_i(θ) for θ given in units of π.
pub fn cv_rotate(h: &WeightedHypergraph, i: usize, multiple_of_pi: f64) -> Result<Rotated> {
    if !multiple_of_pi.is_finite() {
        return domain("rotation angle must be finite");
    }
    if multiple_of_pi.fract() != 0.0 {
        h.check_mode(i)?;
        return Ok(Rotated::LeavesHypergraphClass);
    }
    Ok(Rotated::Hypergraph(cv_rotate_npi(h, i, multiple_of_pi as i64)?))
}

/// Position measurement with outcome q: E(i) is removed and q·w_{e∪i} is added on each e in A(i).
/// Mode i stays in the index set as an isolated, measured mode.
pub fn cv_measure_q(h: &WeightedHypergraph, i: usize, q: &Weight) -> Result<WeightedHypergraph> {
    h.check_mode(i)?;
    let bit = 1 << (i - 1);
    let mut g = h.clone();
    for (e, w) in h.star(i) {
        g.edges.remove(&e);
        g.add(e & !bit, &(q * w));
    }
    Ok(g)
}

/// |p><p|_i |H> = |p>_i ∫dx e^{-ipx} Π_{e∈A(i)} C_e(x w_{e∪i}) Π_{e'∉E(i)} C_{e'}(w_{e'}) |0>_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualExpr {
    pub mode: usize,
    /// (e, w_{e∪i}) for e in A(i); e = 0 is the linear phase e^{ix w_i}.
    pub integrand: Vec<(Edge, Weight)>,
    /// Factors not touching the measured mode.
    pub untouched: WeightedHypergraph,
}

impl ResidualExpr {
    pub fn factor_count(&self) -> usize {
        self.integrand.len() + self.untouched.edges.len()
    }
}

pub fn cv_measure_p(h: &WeightedHypergraph, i: usize) -> Result<ResidualExpr> {
    h.check_mode(i)?;
    let bit = 1 << (i - 1);
    let integrand = h.star(i).into_iter().map(|(e, w)| (e & !bit, w)).collect();
    let mut untouched = h.clone();
    untouched.edges.retain(|e, _| e & bit == 0);
    Ok(ResidualExpr { mode: i, integrand, untouched })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CubicCell {
    /// The integral was carried out. The returned state carries the output mode
    /// `fourier_mode` in the momentum representation (one Fourier byproduct).
    Simplified { h: WeightedHypergraph, survivors: [usize; 3], fourier_mode: usize },
    NoSimplification(String),
}

/// Carries out the integral of a p-measurement residual whose integrand is one
/// 2-edge factor {a,b} (weight w), one 1-edge factor {s} (weight W ≠ 0) and at
/// most a linear phase w_c, with s untouched elsewhere. The delta constraint
/// q_s = (p - w_c - w q_a q_b)/W, read in the momentum basis of s with kernel
/// e^{i p_s q_s}, gives a 3-edge {a,b,s} of weight -w/W and a 1-edge {s} of
/// weight (p - w_c)/W.
pub fn simplify_cubic_cell(r: &ResidualExpr, p: &Weight) -> CubicCell {
    let mut pair = None;
    let mut single = None;
    let mut linear = Weight::zero();
    for (e, w) in &r.integrand {
        match e.count_ones() {
            0 => linear += w,
            1 if single.is_none() => single = Some((*e, w.clone())),
            2 if pair.is_none() => pair = Some((*e, w.clone())),
            _ => return CubicCell::NoSimplification(format!("unexpected integrand factor on {e:#b}")),
        }
    }
    let (Some((ab, w)), Some((s_bit, big_w))) = (pair, single) else {
        return CubicCell::NoSimplification("integrand lacks a 2-edge factor and a 1-edge factor".into());
    };
    if big_w.is_zero() || ab & s_bit != 0 {
        return CubicCell::NoSimplification("degenerate cell".into());
    }
    if r.untouched.edges.keys().any(|e| e & s_bit != 0) {
        return CubicCell::NoSimplification("output mode is coupled outside the integrand".into());
    }
    let mut h = r.untouched.clone();
    h.add(ab | s_bit, &(-(&w / &big_w)));
    h.add(s_bit, &((p - &linear) / &big_w));
    let a = ab.trailing_zeros() as usize + 1;
    let b = (ab & (ab - 1)).trailing_zeros() as usize + 1;
    let s = s_bit.trailing_zeros() as usize + 1;
    CubicCell::Simplified { h, survivors: [a, b, s], fourier_mode: s }
}

/// The teleportation cell on five modes: central c = 4, upper u = 5, survivors
/// a = 1, b = 2, s = 3, with 3-edges {c,a,b}, {u,c,s}, {u,a,b}.
pub fn cubic_cell(w_cab: Weight, w_ucs: Weight, w_uab: Weight) -> Result<WeightedHypergraph> {
    WeightedHypergraph::from_edges(5, [(vec![4, 1, 2], w_cab), (vec![5, 4, 3], w_ucs), (vec![5, 1, 2], w_uab)])
}

/// H_i = p̂_i - Σ_{e∈E(i)} w_e Π_{j∈e\i} q̂_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nullifier {
    pub mode: usize,
    /// (e \ i, w_e); the empty monomial is the constant 1.
    pub q_terms: Vec<(Edge, Weight)>,
}

impl Nullifier {
    pub fn render(&self) -> String {
        let mut out = format!("p{}", self.mode);
        for (m, w) in &self.q_terms {
            let mono: Vec<String> = (0..32).filter(|j| m >> j & 1 == 1).map(|j| format!("q{}", j + 1)).collect();
            let (op, mag) = if w.is_negative() { ('+', -w) } else { ('-', w.clone()) };
            if mono.is_empty() {
                out.push_str(&format!(" {op} {mag}"));
            } else {
                out.push_str(&format!(" {op} {mag}*{}", mono.join("*")));
            }
        }
        out
    }
}

pub fn nullifier(h: &WeightedHypergraph, i: usize) -> Result<Nullifier> {
    h.check_mode(i)?;
    let bit = 1 << (i - 1);
    Ok(Nullifier { mode: i, q_terms: h.star(i).into_iter().map(|(e, w)| (e & !bit, w)).collect() })
}

/// [H_a, H_b] as Σ c_S · i · Π_{j∈S} q̂_j, using [p̂_k, q̂_k] = -i.
pub fn commutator(a: &Nullifier, b: &Nullifier) -> BTreeMap<Edge, Weight> {
    let mut out: BTreeMap<Edge, Weight> = BTreeMap::new();
    let mut acc = |s: Edge, c: Weight| {
        let next = out.get(&s).cloned().unwrap_or_else(Weight::zero) + c;
        if next.is_zero() {
            out.remove(&s);
        } else {
            out.insert(s, next);
        }
    };
    // [p_a, -w Q(S)] = -w [p_a, Q(S)] = i w Q(S \ a) when a ∈ S
    let abit = 1 << (a.mode - 1);
    let bbit = 1 << (b.mode - 1);
    for (s, w) in &b.q_terms {
        if s & abit != 0 {
            acc(s & !abit, w.clone());
        }
    }
    // [-w Q(S), p_b] = -w [Q(S), p_b] = -i w Q(S \ b) when b ∈ S
    for (s, w) in &a.q_terms {
        if s & bbit != 0 {
            acc(s & !bbit, -w.clone());
        }
    }
    out
}

pub fn one() -> Weight {
    Weight::one()
}
