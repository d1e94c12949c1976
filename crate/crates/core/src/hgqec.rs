//! Symmetric hypergraph codes: balancedness and binomial distance-2 criteria,
//! code enumeration, Knill-Laflamme checks, protected-qubit codes, the
//! bicharacter detection condition and secret-sharing encodings.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{budget, domain, Result};
use crate::hgraph::{binomial, layers_from_signature, weight_signature, Edge, Hypergraph, WeightSignature};
use crate::simkit::{build_state, pauli_apply, PureState};
use crate::C64;

/// (M, l): negative weights M of the (n-1)-qubit X-difference state |D> and |I| = l.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeTuple {
    pub n: usize,
    pub m: WeightSignature,
    pub l: usize,
}

impl CodeTuple {
    pub fn new(n: usize, weights: impl IntoIterator<Item = usize>, l: usize) -> Result<Self> {
        if n < 2 {
            return domain("a code needs at least two physical qubits");
        }
        if l == 0 || l > n - 1 {
            return domain(format!("l = {l} outside 1..={} (Z_I acts on the qubits of |D>)", n - 1));
        }
        let m = WeightSignature::new(n - 1, weights)?;
        if m.contains(0) {
            return domain("weight 0 cannot be negative in |D>");
        }
        Ok(CodeTuple { n, m, l })
    }

    pub fn weights(&self) -> &BTreeSet<usize> {
        &self.m.weights
    }

    pub fn m_mask(&self) -> u64 {
        self.m.weights.iter().map(|w| 1u64 << w).sum()
    }

    /// Edge cardinalities of |D>.
    pub fn d_layers(&self) -> Result<BTreeSet<usize>> {
        layers_from_signature(&self.m)
    }

    pub fn is_genuine(&self) -> Result<bool> {
        Ok(self.d_layers()?.iter().any(|&k| k >= 3))
    }

    /// The symmetric code hypergraph on n qubits (each layer of D raised by one)
    /// and I = {1..l}.
    pub fn code_hypergraph(&self) -> Result<(Hypergraph, Edge)> {
        let ks = self.d_layers()?.into_iter().map(|k| k + 1);
        Ok((symmetric_hypergraph(self.n, ks)?, (1 << self.l) - 1))
    }
}

/// Symmetric hypergraph with every k-subset as an edge for k in `ks` (k = 1 allowed).
pub fn symmetric_hypergraph(n: usize, ks: impl IntoIterator<Item = usize>) -> Result<Hypergraph> {
    let ks: BTreeSet<usize> = ks.into_iter().collect();
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > n) {
        return domain(format!("layer {k} outside 1..={n}"));
    }
    Hypergraph::from_masks(n, (1u32..1 << n).filter(|m| ks.contains(&(m.count_ones() as usize))))
}

pub fn d_state(t: &CodeTuple) -> Result<PureState> {
    budget("physical qubits for |D>", t.n as u64, 13)?;
    build_state(&symmetric_hypergraph(t.n - 1, t.d_layers()?)?)
}

fn check_rew(s: &PureState) -> Result<()> {
    let want = (s.amps().len() as f64).sqrt().recip();
    if s.amps().iter().any(|a| a.im.abs() > 1e-9 || (a.re.abs() - want).abs() > 1e-9) {
        return domain("balancedness is defined for real equally weighted states");
    }
    Ok(())
}

/// <+|^{⊗m} |φ> = 0 for a real equally weighted state.
pub fn is_balanced(s: &PureState) -> Result<bool> {
    check_rew(s)?;
    let overlap: f64 = s.amps().iter().map(|a| a.re).sum::<f64>() / (s.amps().len() as f64).sqrt();
    Ok(overlap.abs() < 1e-10)
}

fn z_prefix(s: &PureState, l: usize) -> PureState {
    let mask = (1usize << l) - 1;
    let amps = s.amps().iter().enumerate().map(|(x, a)| if (x & mask).count_ones() % 2 == 1 { -a } else { *a }).collect();
    PureState::from_amps(s.n(), amps).expect("sign flips keep the norm")
}

/// The three balancedness conditions: |D>, Z_1..Z_l |D>, Z_1..Z_{l-1} |D>.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Distance2 {
    pub d: bool,
    pub z_l: bool,
    pub z_l_minus_1: bool,
}

impl Distance2 {
    pub fn holds(&self) -> bool {
        self.d && self.z_l && self.z_l_minus_1
    }

    pub fn violated(&self) -> Option<&'static str> {
        if !self.d {
            Some("|D> is not balanced")
        } else if !self.z_l {
            Some("Z_1..Z_l |D> is not balanced")
        } else if !self.z_l_minus_1 {
            Some("Z_1..Z_{l-1} |D> is not balanced")
        } else {
            None
        }
    }
}

pub fn distance2_check(t: &CodeTuple) -> Result<Distance2> {
    if t.l <= 1 {
        return domain("the distance-2 criterion assumes l > 1");
    }
    let d = d_state(t)?;
    Ok(Distance2 {
        d: is_balanced(&d)?,
        z_l: is_balanced(&z_prefix(&d, t.l))?,
        z_l_minus_1: is_balanced(&z_prefix(&d, t.l - 1))?,
    })
}

fn odd_overlap(nn: usize, weights: &BTreeSet<usize>, l: usize) -> u128 {
    weights
        .iter()
        .map(|&m| (1..=l.min(m)).step_by(2).map(|j| binomial(l, j) * binomial(nn - l, m - j)).sum::<u128>())
        .sum()
}

/// Binomial form of the distance-2 criterion, with n read as the qubit count
/// of |D> (n - 1 physical qubits).
pub fn binomial_check(t: &CodeTuple) -> bool {
    let nn = t.n - 1;
    let w = t.weights();
    let first: u128 = w.iter().map(|&m| binomial(nn, m)).sum();
    if 2 * first != 1u128 << nn {
        return false;
    }
    let quarter = |s: u128| 4 * s == 1u128 << nn;
    t.l >= 1 && quarter(odd_overlap(nn, w, t.l)) && quarter(odd_overlap(nn, w, t.l - 1))
}

/// All tuples with l in 2..=n-1 passing the binomial criterion, ordered by M then l.
pub fn enumerate_codes(n: usize) -> Result<Vec<CodeTuple>> {
    budget("physical qubits for code enumeration", n as u64, 20)?;
    if n < 3 {
        return Ok(Vec::new());
    }
    let nn = n - 1;
    let found: Vec<Vec<CodeTuple>> = (1u64..1 << nn)
        .into_par_iter()
        .map(|bits| {
            let weights: Vec<usize> = (0..nn).filter(|j| bits >> j & 1 == 1).map(|j| j + 1).collect();
            let first: u128 = weights.iter().map(|&m| binomial(nn, m)).sum();
            if 2 * first != 1u128 << nn {
                return Vec::new();
            }
            (2..n)
                .filter_map(|l| {
                    let t = CodeTuple::new(n, weights.iter().copied(), l).ok()?;
                    binomial_check(&t).then_some(t)
                })
                .collect()
        })
        .collect();
    let mut out: Vec<CodeTuple> = found.into_iter().flatten().collect();
    out.sort_by_key(|t| (t.m_mask(), t.l));
    Ok(out)
}

/// |H> and Π_{i∈I} Z_i |H> for a symmetric hypergraph.
pub fn build_codewords(h: &Hypergraph, i_set: Edge) -> Result<(PureState, PureState)> {
    budget("qubits for code words", h.n() as u64, 12)?;
    if weight_signature(h).is_none() {
        return domain("code words need a symmetric hypergraph");
    }
    if i_set == 0 {
        return domain("I must be nonempty");
    }
    h.check_subset(i_set)?;
    let a = build_state(h)?;
    let b = z_prefix_mask(&a, i_set as usize);
    if a.inner(&b).norm() > 1e-10 {
        return domain(format!("|H> and Z_I|H> are not orthogonal for I = {i_set:#b}"));
    }
    Ok((a, b))
}

fn z_prefix_mask(s: &PureState, mask: usize) -> PureState {
    let amps = s.amps().iter().enumerate().map(|(x, a)| if (x & mask).count_ones() % 2 == 1 { -a } else { *a }).collect();
    PureState::from_amps(s.n(), amps).expect("sign flips keep the norm")
}

/// Code words of a tuple.
pub fn tuple_codewords(t: &CodeTuple) -> Result<(PureState, PureState)> {
    let (h, i) = t.code_hypergraph()?;
    build_codewords(&h, i)
}

/// Pauli strings (x-mask, z-mask) of weight 1..=w on n qubits, identity excluded.
pub fn pauli_errors(n: usize, w: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for support in (1usize..1 << n).filter(|s| (s.count_ones() as usize) <= w) {
        let sites: Vec<usize> = (0..n).filter(|j| support >> j & 1 == 1).collect();
        for code in 0..3usize.pow(sites.len() as u32) {
            let (mut x, mut z, mut c) = (0, 0, code);
            for &j in &sites {
                match c % 3 {
                    0 => x |= 1 << j,
                    1 => z |= 1 << j,
                    _ => {
                        x |= 1 << j;
                        z |= 1 << j
                    }
                }
                c /= 3;
            }
            out.push((x, z));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct KlReport {
    /// Error list; index 0 is the identity.
    pub errors: Vec<(usize, usize)>,
    /// α_ij = <c_0|E_i† E_j|c_0>
    pub alpha: DMatrix<C64>,
    pub pass: bool,
    pub worst: f64,
}

fn cdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Knill-Laflamme conditions <c_a|E_i† E_j|c_b> = α_ij δ_ab for all Pauli
/// errors of weight <= t (identity included).
pub fn kl_check(codewords: &(PureState, PureState), t: usize) -> Result<KlReport> {
    let (c0, c1) = codewords;
    let n = c0.n();
    if c1.n() != n {
        return domain("code words have different sizes");
    }
    budget("qubits for Knill-Laflamme check", n as u64, 12)?;
    let mut errors = vec![(0, 0)];
    errors.extend(pauli_errors(n, t));
    budget("error pairs", (errors.len() * errors.len()) as u64, 1 << 22)?;
    let e0: Vec<Vec<C64>> = errors.par_iter().map(|&(x, z)| pauli_apply(c0.amps(), x, z)).collect();
    let e1: Vec<Vec<C64>> = errors.par_iter().map(|&(x, z)| pauli_apply(c1.amps(), x, z)).collect();
    let m = errors.len();
    let rows: Vec<(Vec<C64>, f64)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(m);
            let mut worst = 0.0f64;
            for j in 0..m {
                let a00 = cdot(&e0[i], &e0[j]);
                let a11 = cdot(&e1[i], &e1[j]);
                let a01 = cdot(&e0[i], &e1[j]);
                let a10 = cdot(&e1[i], &e0[j]);
                worst = worst.max((a00 - a11).norm()).max(a01.norm()).max(a10.norm());
                row.push(a00);
            }
            (row, worst)
        })
        .collect();
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let alpha = DMatrix::from_fn(m, m, |i, j| rows[i].0[j]);
    Ok(KlReport { errors, alpha, pass: worst < 1e-9, worst })
}

/// Detection of every Pauli error of weight 1..=w: <c_a|E|c_b> = c_E δ_ab.
/// Distance >= w + 1 exactly when this passes.
pub fn detect_check(codewords: &(PureState, PureState), w: usize) -> Result<KlReport> {
    let (c0, c1) = codewords;
    let n = c0.n();
    budget("qubits for detection check", n as u64, 12)?;
    detect_errors(codewords, pauli_errors(n, w), c1.n())
}

fn detect_errors(codewords: &(PureState, PureState), errors: Vec<(usize, usize)>, n1: usize) -> Result<KlReport> {
    let (c0, c1) = codewords;
    if n1 != c0.n() {
        return domain("code words have different sizes");
    }
    let vals: Vec<(C64, f64)> = errors
        .par_iter()
        .map(|&(x, z)| {
            let e0 = pauli_apply(c0.amps(), x, z);
            let e1 = pauli_apply(c1.amps(), x, z);
            let a00 = cdot(c0.amps(), &e0);
            let a11 = cdot(c1.amps(), &e1);
            let a01 = cdot(c0.amps(), &e1);
            let a10 = cdot(c1.amps(), &e0);
            (a00, (a00 - a11).norm().max(a01.norm()).max(a10.norm()))
        })
        .collect();
    let worst = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    let alpha = DMatrix::from_fn(1, errors.len(), |_, j| vals[j].0);
    Ok(KlReport { errors, alpha, pass: worst < 1e-9, worst })
}

/// D on the protected vertices 1..=|V_d|; the `noisy` new vertices follow.
/// Every edge e of D is replaced by e ∪ {i} for each noisy vertex i.
pub fn protected_code(d: &Hypergraph, noisy: usize) -> Result<Hypergraph> {
    let nd = d.n();
    budget("qubits for balancedness", nd as u64, 20)?;
    if !is_balanced(&build_state(d)?)? {
        return domain("the protected hypergraph D must give a balanced state");
    }
    if noisy == 0 {
        return Ok(d.clone());
    }
    let mut out = Hypergraph::new(nd + noisy)?;
    for e in d.edges() {
        for i in 0..noisy {
            out.toggle(e | 1 << (nd + i));
        }
    }
    Ok(out)
}

fn neighbours(h: &Hypergraph) -> Vec<Edge> {
    (0..h.n()).map(|v| h.edges().filter(|e| e >> v & 1 == 1).fold(0, |a, e| a | e) & !(1 << v)).collect()
}

/// Whether errors on `errs` ⊆ Y are detected by the encoding from inputs X to
/// outputs Y over Z_d, by enumerating g over Z_d^{X ∪ errs}.
pub fn bicharacter_detect(h: &Hypergraph, inputs: Edge, outputs: Edge, errs: Edge, d: u32) -> Result<bool> {
    h.check_subset(inputs)?;
    h.check_subset(outputs)?;
    if inputs & outputs != 0 {
        return domain("input and output vertices must be disjoint");
    }
    if errs & !outputs != 0 {
        return domain("error locations must be output vertices");
    }
    if d < 2 {
        return domain("group order must be at least 2");
    }
    let free = inputs | errs;
    let k = free.count_ones();
    let bits = k as f64 * (d as f64).log2();
    budget("enumeration bits", bits.ceil() as u64, 20)?;
    let nb = neighbours(h);
    let f = |l: usize, k: usize| (nb[l] >> k & 1) as u64;
    let free_v: Vec<usize> = (0..h.n()).filter(|v| free >> v & 1 == 1).collect();
    let checks: Vec<usize> = (0..h.n()).filter(|v| (outputs & !errs) >> v & 1 == 1).collect();
    let in_v: Vec<usize> = (0..h.n()).filter(|v| inputs >> v & 1 == 1).collect();
    let total = (d as u64).pow(k);
    let dd = d as u64;
    let ok = (0..total).into_par_iter().all(|code| {
        let mut g = vec![0u64; h.n()];
        let mut c = code;
        for &v in &free_v {
            g[v] = c % dd;
            c /= dd;
        }
        let premise = checks.iter().all(|&kk| free_v.iter().map(|&l| g[l] * f(l, kk)).sum::<u64>() % dd == 0);
        if !premise {
            return true;
        }
        let gx_zero = in_v.iter().all(|&v| g[v] == 0);
        let fe = in_v.iter().all(|&kk| {
            free_v.iter().filter(|&&l| errs >> l & 1 == 1).map(|&l| g[l] * f(l, kk)).sum::<u64>() % dd == 0
        });
        gx_zero && fe
    });
    Ok(ok)
}

/// Qubit code words of the hypergraph encoding: for each input assignment g_X,
/// the output state Σ_{g_Y} (-1)^{f_H(g_X, g_Y)} |g_Y>, outputs relabelled 1..|Y|.
pub fn bicharacter_codewords(h: &Hypergraph, inputs: Edge, outputs: Edge) -> Result<Vec<PureState>> {
    h.check_subset(inputs)?;
    h.check_subset(outputs)?;
    if inputs & outputs != 0 || inputs | outputs != ((1u64 << h.n()) - 1) as Edge {
        return domain("inputs and outputs must partition the vertices");
    }
    let ny = outputs.count_ones() as usize;
    budget("output qubits", ny as u64, 12)?;
    let out_v: Vec<usize> = (0..h.n()).filter(|v| outputs >> v & 1 == 1).collect();
    let in_v: Vec<usize> = (0..h.n()).filter(|v| inputs >> v & 1 == 1).collect();
    let norm = ((1u64 << ny) as f64).sqrt().recip();
    (0u64..1 << in_v.len())
        .map(|gx| {
            let base: u64 = in_v.iter().enumerate().filter(|(j, _)| gx >> j & 1 == 1).map(|(_, &v)| 1u64 << v).sum();
            let amps = (0u64..1 << ny)
                .map(|gy| {
                    let full = base | out_v.iter().enumerate().filter(|(j, _)| gy >> j & 1 == 1).map(|(_, &v)| 1u64 << v).sum::<u64>();
                    C64::new(if h.phase_bit(full) == 1 { -norm } else { norm }, 0.0)
                })
                .collect();
            PureState::from_amps(ny, amps)
        })
        .collect()
}

/// Detection of all Pauli errors supported on `errs` (output labels 1..|Y|)
/// for a code spanned by orthonormal words.
pub fn detects_support(words: &[PureState], errs: Edge) -> Result<bool> {
    let n = words.first().map(|w| w.n()).unwrap_or(0);
    let errors: Vec<(usize, usize)> =
        pauli_errors(n, n).into_iter().filter(|(x, z)| (x | z) & !(errs as usize) == 0).collect();
    let mut worst = 0.0f64;
    for &(x, z) in &errors {
        let applied: Vec<Vec<C64>> = words.iter().map(|w| pauli_apply(w.amps(), x, z)).collect();
        let c = cdot(words[0].amps(), &applied[0]);
        for (a, wa) in words.iter().enumerate() {
            for (b, eb) in applied.iter().enumerate() {
                let v = cdot(wa.amps(), eb);
                let want = if a == b { c } else { C64::new(0.0, 0.0) };
                worst = worst.max((v - want).norm());
            }
        }
    }
    Ok(worst < 1e-9)
}

/// |0>_D ⊗ |H> or |1>_D ⊗ X^{⊗n} |H>, with D as qubit 1.
pub fn secret_share_encode(h: &Hypergraph, bit: bool) -> Result<PureState> {
    budget("qubits for secret sharing", h.n() as u64 + 1, 14)?;
    let s = build_state(h)?;
    let n = h.n();
    let all = (1usize << n) - 1;
    let body = if bit {
        PureState::from_amps(n, (0..1usize << n).map(|x| s.amps()[x ^ all]).collect())?
    } else {
        s
    };
    PureState::basis(1, bit as usize)?.tensor(&body)
}

/// Two-qubit gate counts for one k-hyperedge: (direct multi-controlled Z, complete graph).
/// The direct count is 2k, the linear count quoted for k = 6.
pub fn gate_comparison(k: usize) -> (u64, u64) {
    (2 * k as u64, (k * k.saturating_sub(1) / 2) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgraph::{make_complete, sym_diff, x_difference};
    use crate::rewrite::rw_x;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn d_state_examples() {
        let t = CodeTuple::new(5, [4], 2).unwrap();
        assert_eq!(d_state(&t).unwrap(), build_state(&make_complete(4, &[4]).unwrap()).unwrap());
        let e = CodeTuple::new(5, [], 2).unwrap();
        assert!(d_state(&e).unwrap().dist(&PureState::plus(4).unwrap()) < 1e-12);
        let t = CodeTuple::new(8, [1, 2, 4, 7], 3).unwrap();
        let d = symmetric_hypergraph(7, t.d_layers().unwrap()).unwrap();
        assert_eq!(weight_signature(&d).unwrap(), t.m);
        assert!(CodeTuple::new(5, [0], 2).is_err());
        assert!(CodeTuple::new(5, [1], 5).is_err());
    }

    #[test]
    fn balanced_examples() {
        assert!(!is_balanced(&PureState::plus(3).unwrap()).unwrap());
        let z1 = z_prefix(&PureState::plus(3).unwrap(), 1);
        assert!(is_balanced(&z1).unwrap());
        assert!(!is_balanced(&build_state(&make_complete(3, &[3]).unwrap()).unwrap()).unwrap());
        assert!(is_balanced(&PureState::basis(2, 1).unwrap()).is_err());
    }

    #[test]
    fn binomial_matches_balancedness() {
        for n in 3..=10usize {
            let nn = n - 1;
            for bits in 0u64..1 << nn {
                let w: Vec<usize> = (0..nn).filter(|j| bits >> j & 1 == 1).map(|j| j + 1).collect();
                for l in 2..n {
                    let t = CodeTuple::new(n, w.iter().copied(), l).unwrap();
                    assert_eq!(binomial_check(&t), distance2_check(&t).unwrap().holds(), "{t:?}");
                }
            }
        }
    }

    #[test]
    fn empty_signature_fails() {
        let t = CodeTuple::new(6, [], 3).unwrap();
        assert!(!binomial_check(&t));
        let v = distance2_check(&t).unwrap();
        assert!(!v.holds());
        assert_eq!(v.violated(), Some("|D> is not balanced"));
        assert!(distance2_check(&CodeTuple::new(6, [1], 1).unwrap()).is_err());
    }

    #[test]
    fn census() {
        let counts: Vec<usize> = (4..=9).map(|n| enumerate_codes(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 4, 7, 6]);
        let four = enumerate_codes(4).unwrap();
        assert_eq!(four, vec![CodeTuple::new(4, [1, 3], 2).unwrap()]);
        for n in 3..8 {
            assert!(enumerate_codes(n).unwrap().iter().all(|t| !t.is_genuine().unwrap()));
        }
        let genuine: Vec<CodeTuple> = enumerate_codes(8).unwrap().into_iter().filter(|t| t.is_genuine().unwrap()).collect();
        assert_eq!(genuine, vec![CodeTuple::new(8, [1, 2, 4, 7], 3).unwrap(), CodeTuple::new(8, [1, 2, 4, 7], 4).unwrap()]);
        for t in &genuine {
            assert!(distance2_check(t).unwrap().holds());
        }
    }

    #[test]
    fn enumerated_codes_detect_single_errors() {
        for n in 4..=8 {
            for t in enumerate_codes(n).unwrap() {
                let cw = tuple_codewords(&t).unwrap();
                assert!(detect_check(&cw, 1).unwrap().pass, "{t:?}");
            }
        }
    }

    #[test]
    fn no_distance_three() {
        for n in 4..=12 {
            for t in enumerate_codes(n).unwrap() {
                let cw = tuple_codewords(&t).unwrap();
                assert!(!detect_check(&cw, 2).unwrap().pass, "{t:?}");
            }
        }
        let t = CodeTuple::new(8, [1, 2, 4, 7], 3).unwrap();
        let kl = kl_check(&tuple_codewords(&t).unwrap(), 1).unwrap();
        assert!(!kl.pass);
        assert_eq!(kl.errors.len(), 1 + 3 * 8);
    }

    #[test]
    fn kl_sanity_and_corruption() {
        // repetition-type graph code |+++>-basis: span{|K_3^2>, Z_1Z_2Z_3|K_3^2>} on a triangle
        let h = make_complete(3, &[2]).unwrap();
        let cw = build_codewords(&h, 0b111).unwrap();
        let det = detect_check(&cw, 1).unwrap();
        let direct: bool = pauli_errors(3, 1).iter().all(|&(x, z)| {
            let e0 = pauli_apply(cw.0.amps(), x, z);
            let e1 = pauli_apply(cw.1.amps(), x, z);
            cdot(cw.0.amps(), &e1).norm() < 1e-12 && (cdot(cw.0.amps(), &e0) - cdot(cw.1.amps(), &e1)).norm() < 1e-12
        });
        assert_eq!(det.pass, direct);
        let t = CodeTuple::new(8, [1, 2, 4, 7], 3).unwrap();
        let (a, b) = tuple_codewords(&t).unwrap();
        let mut amps = b.into_amps();
        amps[0] = -amps[0];
        amps[5] = -amps[5];
        amps[17] = -amps[17];
        let bad = PureState::normalized(8, amps).unwrap();
        let r = detect_check(&(a, bad), 1).unwrap();
        assert!(!r.pass && r.worst > 1e-3);
    }

    #[test]
    fn codeword_construction() {
        let h = make_complete(4, &[2, 3]).unwrap();
        assert!(build_codewords(&h, 0).is_err());
        let nonsym = Hypergraph::from_edges(3, [[1, 2]]).unwrap();
        assert!(build_codewords(&nonsym, 1).is_err());
        let t = CodeTuple::new(8, [1, 2, 4, 7], 4).unwrap();
        let (c0, c1) = tuple_codewords(&t).unwrap();
        assert!(c0.inner(&c1).norm() < 1e-12);
    }

    #[test]
    fn protected_codes() {
        let d = Hypergraph::from_edges(4, [vec![1], vec![2, 3]]).unwrap();
        assert!(is_balanced(&build_state(&d).unwrap()).unwrap());
        assert_eq!(protected_code(&d, 0).unwrap(), d);
        let h = protected_code(&d, 1).unwrap();
        assert_eq!(h, Hypergraph::from_edges(5, [vec![1, 5], vec![2, 3, 5]]).unwrap());
        let s = build_state(&h).unwrap();
        let xs = PureState::from_amps(5, pauli_apply(s.amps(), 1 << 4, 0)).unwrap();
        assert!(s.inner(&xs).norm() < 1e-12);
        assert!(protected_code(&make_complete(3, &[3]).unwrap(), 1).is_err());
    }

    #[test]
    fn bicharacter_examples() {
        // path 1-2-3-4-5, input 1
        let h = Hypergraph::from_edges(5, [[1, 2], [2, 3], [3, 4], [4, 5]]).unwrap();
        assert!(bicharacter_detect(&h, 0b1, 0b11110, 0, 2).unwrap());
        // an isolated output vertex holds |+> regardless of the input, so errors there are detected
        let g = Hypergraph::from_edges(5, [[1, 2], [2, 3], [3, 4]]).unwrap();
        assert!(bicharacter_detect(&g, 0b1, 0b11110, 0b10000, 2).unwrap());
        // the only neighbour of the input reveals it
        assert!(!bicharacter_detect(&g, 0b1, 0b11110, 0b00010, 2).unwrap());
        // a disconnected input is never protected
        let iso = Hypergraph::from_edges(5, [[2, 3], [3, 4], [4, 5]]).unwrap();
        assert!(!bicharacter_detect(&iso, 0b1, 0b11110, 0, 2).unwrap());
        assert!(bicharacter_detect(&h, 0b1, 0b11111, 0, 2).is_err());
    }

    fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> Hypergraph {
        let edges: Vec<u32> = (1u32..1 << n).filter(|m| m.count_ones() == 2 && rng.gen_bool(0.5)).collect();
        Hypergraph::from_masks(n, edges).unwrap()
    }

    #[test]
    fn bicharacter_matches_brute_force_on_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut agree = 0;
        for _ in 0..60 {
            let n = rng.gen_range(3..=6);
            let h = random_graph(n, &mut rng);
            let inputs: Edge = 1;
            let outputs = ((1u32 << n) - 1) & !inputs;
            let words = bicharacter_codewords(&h, inputs, outputs).unwrap();
            if words[0].inner(&words[1]).norm() > 1e-9 {
                continue;
            }
            let errs_local: u32 = rng.gen_range(1..1u32 << (n - 1));
            let errs = errs_local << 1;
            let theory = bicharacter_detect(&h, inputs, outputs, errs, 2).unwrap();
            let brute = detects_support(&words, errs_local).unwrap();
            assert_eq!(theory, brute, "{h:?} errs {errs:#b}");
            agree += 1;
        }
        assert!(agree > 20);
    }

    #[test]
    fn secret_sharing() {
        let h = make_complete(3, &[3]).unwrap();
        let e0 = secret_share_encode(&h, false).unwrap();
        let e1 = secret_share_encode(&h, true).unwrap();
        assert!(e0.inner(&e1).norm() < 1e-12);
        // X on all three qubits via the rewrite rules
        let mut g = h.clone();
        let mut sign = 1i8;
        for i in 1..=3 {
            let r = rw_x(&g, i).unwrap();
            g = r.h;
            sign *= r.sign;
        }
        let want = PureState::basis(1, 1).unwrap().tensor(&build_state(&g).unwrap().scaled(C64::new(sign as f64, 0.0))).unwrap();
        assert!(e1.dist(&want) < 1e-12);
        let a = 1.0 / 8f64.sqrt();
        let expect: Vec<f64> = (0..8).map(|x| if x == 7 { -a } else { a }).collect();
        for (x, v) in expect.iter().enumerate() {
            assert!((e0.amps()[x << 1].re - v).abs() < 1e-12);
        }
    }

    #[test]
    fn gate_counts() {
        assert_eq!(gate_comparison(6), (12, 15));
    }

    proptest! {
        #[test]
        fn orthogonal_iff_balanced_difference(a in proptest::collection::vec(1u32..32, 0..8), b in proptest::collection::vec(1u32..32, 0..8)) {
            let ha = Hypergraph::from_masks(5, a).unwrap();
            let hb = Hypergraph::from_masks(5, b).unwrap();
            let ov = build_state(&ha).unwrap().inner(&build_state(&hb).unwrap()).norm();
            let bal = is_balanced(&build_state(&sym_diff(&ha, &hb).unwrap()).unwrap()).unwrap();
            prop_assert_eq!(ov < 1e-10, bal);
        }

        #[test]
        fn x_difference_is_symmetric_difference(ms in proptest::collection::vec(3u32..32, 0..8), i in 1usize..=5) {
            let h = Hypergraph::from_masks(5, ms.into_iter().filter(|m| m.count_ones() >= 2)).unwrap();
            let x = rw_x(&h, i).unwrap().h;
            let sd = sym_diff(&h, &x).unwrap();
            let bit = 1u32 << (i - 1);
            prop_assert!(sd.edges().all(|e| e & bit == 0));
            let dropped = Hypergraph::from_masks(4, sd.edges().map(|e| (e & (bit - 1)) | (e >> i) << (i - 1))).unwrap();
            prop_assert_eq!(dropped, x_difference(&h, i).unwrap());
        }
    }
}
