//! Non-stabilizerness: stabilizer Rényi entropies, non-quadraticity, stabilizer
//! state enumeration, min-relative entropy and Clifford hierarchy levels.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{budget, domain, Result};
use crate::hgraph::{avg_degree, binomial, Hypergraph};
use crate::simkit::{build_state, OperatorExpr, PureState};
use crate::C64;

/// Truth table of f: {0,1}^n -> {0,1}; entry x uses qubit j as bit j-1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    bits: Vec<bool>,
}

impl TruthTable {
    pub fn new(n: usize, bits: Vec<bool>) -> Result<Self> {
        if n > 20 {
            return domain(format!("truth table on {n} inputs is too large"));
        }
        if bits.len() != 1 << n {
            return domain(format!("truth table needs {} entries, got {}", 1usize << n, bits.len()));
        }
        Ok(TruthTable { n, bits })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        Self::new(n, (0..1usize << n).map(f).collect())
    }

    pub fn from_hypergraph(h: &Hypergraph) -> Result<Self> {
        Self::from_fn(h.n(), |x| h.phase_bit(x as u64) == 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// (-1)^f / sqrt(2^n)
    pub fn state(&self) -> Result<PureState> {
        let norm = (self.bits.len() as f64).sqrt().recip();
        PureState::from_amps(
            self.n,
            self.bits.iter().map(|&b| C64::new(if b { -norm } else { norm }, 0.0)).collect(),
        )
    }
}

fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// All squared Pauli expectations <P>^2, indexed by x-mask then z-mask.
/// For fixed x, Σ_k conj(a_{k⊕x}) a_k (-1)^{k·z} is a Walsh transform; the
/// i^{|x∧z|} prefactor is absorbed by taking real and imaginary parts apart.
fn pauli_squares(s: &PureState) -> Vec<Vec<f64>> {
    let a = s.amps();
    let dim = a.len();
    (0..dim)
        .into_par_iter()
        .map(|x| {
            let mut re: Vec<f64> = Vec::with_capacity(dim);
            let mut im: Vec<f64> = Vec::with_capacity(dim);
            for k in 0..dim {
                let g = a[k ^ x].conj() * a[k];
                re.push(g.re);
                im.push(g.im);
            }
            walsh_hadamard(&mut re);
            walsh_hadamard(&mut im);
            re.iter().zip(&im).map(|(r, i)| r * r + i * i).collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sre {
    pub value: f64,
    /// m_α = 2^{-n} Σ_P <P>^{2α}
    pub moment: f64,
}

pub fn sre(s: &PureState, alpha: f64) -> Result<Sre> {
    budget("qubits for stabilizer Renyi entropy", s.n() as u64, 8)?;
    if !alpha.is_finite() || alpha <= 0.0 || (alpha - 1.0).abs() < 1e-12 {
        return domain(format!("alpha must be positive, finite and not 1, got {alpha}"));
    }
    let n = s.n();
    let sq = pauli_squares(s);
    let total: f64 = sq.par_iter().map(|row| row.iter().map(|p| p.powf(alpha)).sum::<f64>()).sum();
    let moment = total / (1u64 << n) as f64;
    let value = moment.log2() / (1.0 - alpha);
    Ok(Sre { value: if value.abs() < 1e-12 { 0.0 } else { value }, moment })
}

/// Σ_P 2^{-n} <P>^2, which is 1 for pure states.
pub fn pauli_purity(s: &PureState) -> Result<f64> {
    budget("qubits for Pauli expansion", s.n() as u64, 8)?;
    let sq = pauli_squares(s);
    Ok(sq.iter().flatten().sum::<f64>() / (1u64 << s.n()) as f64)
}

/// Hamming distance to the closest affine-quadratic Boolean function.
pub fn non_quadraticity(f: &TruthTable) -> Result<usize> {
    let n = f.n;
    budget("inputs for non-quadraticity", n as u64, 5)?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let dim = 1usize << n;
    // quadratic part only; the best affine part comes from the Walsh spectrum
    let best = (0u64..1 << pairs.len())
        .into_par_iter()
        .map(|q| {
            let mut v: Vec<f64> = (0..dim)
                .map(|x| {
                    let mut b = f.bits[x];
                    for (k, &(i, j)) in pairs.iter().enumerate() {
                        if q >> k & 1 == 1 && x >> i & 1 == 1 && x >> j & 1 == 1 {
                            b = !b;
                        }
                    }
                    if b { -1.0 } else { 1.0 }
                })
                .collect();
            walsh_hadamard(&mut v);
            let peak = v.iter().fold(0.0f64, |m, w| m.max(w.abs()));
            // weight of f+q+affine = (2^n - |W|)/2 at the best affine choice
            ((dim as f64 - peak) / 2.0).round() as usize
        })
        .min()
        .unwrap_or(0);
    Ok(best)
}

/// Number of n-qubit pure stabilizer states: 2^n Π_{k=1}^n (2^k + 1).
pub fn stabilizer_count(n: usize) -> u128 {
    (1..=n).fold(1u128 << n, |acc, k| acc * ((1u128 << k) + 1))
}

fn span(basis: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &b in basis {
        let ext: Vec<usize> = out.iter().map(|v| v ^ b).collect();
        out.extend(ext);
    }
    out
}

/// Reduced row-echelon bases of all k-dimensional subspaces of F_2^n.
fn subspaces(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for pivots in (0usize..1 << n).filter(|m| m.count_ones() as usize == k) {
        let piv: Vec<usize> = (0..n).filter(|&j| pivots >> j & 1 == 1).collect();
        // free slots: row r may have a 1 at non-pivot column c when c > piv[r]
        let slots: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let p = piv[r];
                (p + 1..n).filter(move |&c| pivots >> c & 1 == 0).map(move |c| (r, c))
            })
            .collect();
        for fill in 0usize..1 << slots.len() {
            let mut rows: Vec<usize> = piv.iter().map(|&p| 1 << p).collect();
            for (t, &(r, c)) in slots.iter().enumerate() {
                if fill >> t & 1 == 1 {
                    rows[r] |= 1 << c;
                }
            }
            out.push(rows);
        }
    }
    out
}

/// Every n-qubit pure stabilizer state exactly once (up to global phase), as
/// |A|^{-1/2} Σ_{y} i^{l(y)} (-1)^{q(y)} |x0 + G y> over affine subspaces.
pub fn stabilizer_states(n: usize) -> Result<Vec<PureState>> {
    budget("qubits for stabilizer enumeration", n as u64, 4)?;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for k in 0..=n {
        for basis in subspaces(n, k) {
            let pivot_mask: usize = basis.iter().map(|r| 1usize << r.trailing_zeros()).sum();
            let pts = span(&basis);
            let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
            let norm = (pts.len() as f64).sqrt().recip();
            for x0 in (0usize..1 << n).filter(|x| x & pivot_mask == 0) {
                for il in 0usize..1 << k {
                    for sl in 0usize..1 << k {
                        for sq in 0usize..1 << pairs.len() {
                            let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
                            for (y, &p) in pts.iter().enumerate() {
                                let ipow = (il & y).count_ones() as usize % 4;
                                let mut neg = (sl & y).count_ones() & 1;
                                for (t, &(i, j)) in pairs.iter().enumerate() {
                                    if sq >> t & 1 == 1 && y >> i & 1 == 1 && y >> j & 1 == 1 {
                                        neg ^= 1;
                                    }
                                }
                                let ph = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)]
                                    [(ipow + 2 * neg as usize) % 4];
                                amps[x0 ^ p] = ph * norm;
                            }
                            let s = PureState::from_amps(n, amps)?;
                            if seen.insert(fingerprint(&s)) {
                                out.push(s);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Amplitudes rounded to 1e-9 after fixing the phase of the first nonzero entry.
fn fingerprint(s: &PureState) -> Vec<(i64, i64)> {
    let a = s.amps();
    let lead = a.iter().find(|z| z.norm() > 1e-9).copied().unwrap_or(C64::new(1.0, 0.0));
    let ph = lead.conj() / lead.norm();
    a.iter().map(|z| {
        let w = z * ph;
        ((w.re * 1e9).round() as i64, (w.im * 1e9).round() as i64)
    }).collect()
}

/// -log2 of the largest overlap with a stabilizer state.
pub fn d_min(s: &PureState) -> Result<f64> {
    budget("qubits for min-relative entropy", s.n() as u64, 4)?;
    let stabs = stabilizer_states(s.n())?;
    let best = stabs.par_iter().map(|t| s.fidelity(t)).reduce(|| 0.0, f64::max);
    let v = -best.log2();
    Ok(if v.abs() < 1e-12 { 0.0 } else { v })
}

/// -2 log2(1 - 2^{1-n} χ), the non-quadraticity upper bound on D_min.
pub fn d_min_chi_bound(n: usize, chi: usize) -> f64 {
    -2.0 * (1.0 - chi as f64 * 2f64.powi(1 - n as i32)).log2()
}

pub fn average_degree(h: &Hypergraph) -> f64 {
    let d = avg_degree(h);
    *d.numer() as f64 / *d.denom() as f64
}

/// n [1 - log2(1 + 1/(2(2^α - 1) Δ̄))] / (α - 1); infinite bound when Δ̄ = 0 is excluded.
pub fn degree_bound(h: &Hypergraph, alpha: f64) -> Result<f64> {
    let d = average_degree(h);
    if d == 0.0 {
        return domain("degree bound needs at least one edge of cardinality two or more");
    }
    if alpha <= 1.0 {
        return domain("degree bound is stated for alpha > 1");
    }
    let inner = 1.0 + 1.0 / (2.0 * (2f64.powf(alpha) - 1.0) * d);
    Ok((1.0 - inner.log2()) * h.n() as f64 / (alpha - 1.0))
}

/// (n - (k + 2^{2α-1})) / (α - 1)
pub fn random_magic_bound(n: usize, k: usize, alpha: f64) -> f64 {
    (n as f64 - (k as f64 + 2f64.powf(2.0 * alpha - 1.0))) / (alpha - 1.0)
}

/// Mean M_α over k-uniform random hypergraphs, each k-edge present with probability 1/2.
pub fn random_uniform_magic(n: usize, k: usize, samples: usize, alpha: f64, seed: u64) -> Result<f64> {
    budget("qubits for random magic", n as u64, 8)?;
    if k < 1 || k > n {
        return domain(format!("edge cardinality {k} outside 1..={n}"));
    }
    if samples == 0 {
        return domain("need at least one sample");
    }
    let pool: Vec<u32> = (1u32..1 << n).filter(|m| m.count_ones() as usize == k).collect();
    debug_assert_eq!(pool.len() as u128, binomial(n, k));
    let vals: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let edges: Vec<u32> = pool.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            let h = Hypergraph::from_masks(n, edges)?;
            Ok(sre(&build_state(&h)?, alpha)?.value)
        })
        .collect::<Result<_>>()?;
    Ok(vals.iter().sum::<f64>() / samples as f64)
}

fn pauli_generators(n: usize) -> Result<Vec<DMatrix<C64>>> {
    let mut out = Vec::new();
    for j in 0..n {
        out.push(OperatorExpr::pauli_string(1 << j, 0).matrix(n)?);
        out.push(OperatorExpr::pauli_string(0, 1 << j).matrix(n)?);
    }
    Ok(out)
}

fn is_pauli_up_to_phase(m: &DMatrix<C64>, paulis: &[DMatrix<C64>]) -> bool {
    let dim = m.nrows() as f64;
    paulis.iter().any(|p| {
        let tr: C64 = (p.adjoint() * m).trace();
        (tr.norm() - dim).abs() < 1e-8
    })
}

/// Smallest k <= kmax with u in the k-th level of the Clifford hierarchy, or
/// None when u lies above kmax.
pub fn hierarchy_level(u: &OperatorExpr, n: usize, kmax: usize) -> Result<Option<usize>> {
    budget("qubits for hierarchy test", n as u64, 4)?;
    if !(1..=3).contains(&kmax) {
        return domain(format!("kmax must be 1, 2 or 3, got {kmax}"));
    }
    if u.max_site() > n {
        return domain(format!("operator acts on qubit {} beyond n={n}", u.max_site()));
    }
    let um = u.matrix(n)?;
    let dim = 1usize << n;
    let id = DMatrix::<C64>::identity(dim, dim);
    if ((&um * um.adjoint()) - &id).norm() > 1e-8 {
        return domain("operator is not unitary");
    }
    let all: Vec<DMatrix<C64>> =
        (0..dim * dim).map(|i| OperatorExpr::pauli_string((i % dim) as u32, (i / dim) as u32).matrix(n)).collect::<Result<_>>()?;
    let gens = pauli_generators(n)?;
    let conj = |v: &DMatrix<C64>, p: &DMatrix<C64>| v * p * v.adjoint();
    let clifford = |v: &DMatrix<C64>| gens.iter().all(|g| is_pauli_up_to_phase(&conj(v, g), &all));
    if is_pauli_up_to_phase(&um, &all) {
        return Ok(Some(1));
    }
    if kmax >= 2 && clifford(&um) {
        return Ok(Some(2));
    }
    if kmax >= 3 && gens.iter().all(|g| clifford(&conj(&um, g))) {
        return Ok(Some(3));
    }
    Ok(None)
}
