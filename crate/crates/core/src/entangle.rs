//! Entanglement quantifiers, witnesses and randomized hypergraph mixtures.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{budget, domain, Result};
use crate::hgraph::{Edge, Hypergraph};
use crate::simkit::{
    build_state, expectation, hermitian_eigenvalues, schmidt, Bipartition, MixedState, PureState,
};
use crate::stabgen::generator;

/// Geometric measure over bipartitions: min over cuts of 1 - λ_max².
pub fn em_geometric(s: &PureState) -> Result<f64> {
    let n = s.n();
    budget("qubits for bipartition scan", n as u64, 12)?;
    if n == 1 {
        return Ok(0.0);
    }
    let vals: Vec<f64> = Bipartition::all(n).par_iter().map(|c| 1.0 - schmidt(s, c)[0]).collect();
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// H_n^n
    Hnn,
    /// H_n^{n-1}
    HnNm1,
    /// H_n^{n-1,n}
    HnNm1N,
}

impl Family {
    pub fn hypergraph(self, n: usize) -> Result<Hypergraph> {
        let ks = match self {
            Family::Hnn => vec![n],
            Family::HnNm1 => vec![n - 1],
            Family::HnNm1N => vec![n - 1, n],
        };
        crate::hgraph::make_complete(n, &ks)
    }
}

pub fn em_closed_form(family: Family, n: usize) -> Result<f64> {
    if n < 3 {
        return domain(format!("closed forms are tabulated for n >= 3, got {n}"));
    }
    let p = 2f64.powi(n as i32 - 1);
    let nf = n as f64;
    Ok(match family {
        Family::Hnn => 1.0 / p,
        Family::HnNm1 if n == 4 => (5.0 - 5f64.sqrt()) / 8.0,
        Family::HnNm1 if n % 2 == 0 => nf / p,
        Family::HnNm1 => (nf - 1.0) / p,
        Family::HnNm1N if n == 3 => 0.25,
        Family::HnNm1N if n % 2 == 0 => (nf - 1.0) / p,
        Family::HnNm1N => nf / p,
    })
}

#[derive(Clone, Debug)]
pub struct EgResult {
    pub value: f64,
    /// Per-qubit single-qubit states (amplitudes of |0>, |1>).
    pub product: Vec<[C64; 2]>,
}

/// Contracts ψ with conj(φ_k) for every k except `skip`.
fn partial_overlap(amps: &[C64], prod: &[[C64; 2]], skip: usize) -> [C64; 2] {
    let mut out = [C64::new(0.0, 0.0); 2];
    for (x, a) in amps.iter().enumerate() {
        let mut w = *a;
        for (k, f) in prod.iter().enumerate() {
            if k != skip {
                w *= f[x >> k & 1].conj();
            }
        }
        out[x >> skip & 1] += w;
    }
    out
}

fn ascend(amps: &[C64], prod: &mut [[C64; 2]], iterations: usize) -> f64 {
    let n = prod.len();
    let mut best = 0.0;
    for _ in 0..iterations {
        let mut cur = 0.0;
        for j in 0..n {
            let v = partial_overlap(amps, prod, j);
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if norm < 1e-300 {
                continue;
            }
            prod[j] = [v[0] / norm, v[1] / norm];
            cur = norm;
        }
        if cur - best < 1e-15 {
            best = best.max(cur);
            break;
        }
        best = cur;
    }
    best * best
}

/// Geometric entanglement against fully separable states, by multi-start
/// alternating maximization of the overlap one qubit at a time.
pub fn eg_full(s: &PureState, restarts: usize, iterations: usize, seed: u64) -> Result<EgResult> {
    let n = s.n();
    budget("qubits for product-state optimization", n as u64, 10)?;
    let amps = s.amps();
    let runs: Vec<(f64, Vec<[C64; 2]>)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let mut prod: Vec<[C64; 2]> = (0..n)
                .map(|_| {
                    let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
                    let ph: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    [C64::new((th / 2.0).cos(), 0.0), C64::from_polar((th / 2.0).sin(), ph)]
                })
                .collect();
            let ov = ascend(amps, &mut prod, iterations);
            (ov, prod)
        })
        .collect();
    let (best, product) = runs
        .into_iter()
        .fold((-1.0, Vec::new()), |acc, r| if r.0 > acc.0 { r } else { acc });
    Ok(EgResult { value: (1.0 - best).max(0.0), product })
}

pub fn negativity(m: &MixedState, cut: &Bipartition) -> Result<f64> {
    budget("qubits for negativity", m.n() as u64, 8)?;
    let ev = hermitian_eigenvalues(m.partial_transpose(cut.side_a()));
    let trace_norm: f64 = ev.iter().map(|x| x.abs()).sum();
    Ok(((trace_norm - 1.0) / 2.0).max(0.0))
}

/// Genuine multipartite negativity: the minimum over cuts.
pub fn gmn(m: &MixedState) -> Result<f64> {
    budget("qubits for negativity", m.n() as u64, 8)?;
    if m.n() < 2 {
        return domain("negativity needs at least two qubits");
    }
    let vals: Vec<f64> =
        Bipartition::all(m.n()).par_iter().map(|c| negativity(m, c)).collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

pub fn concurrence(m: &MixedState) -> Result<f64> {
    if m.n() != 2 {
        return domain(format!("concurrence is defined for two qubits, got {}", m.n()));
    }
    let rho = m.rho();
    // Y⊗Y is real up to sign: anti-diagonal with entries (-1, 1, 1, -1)
    let yy = DMatrix::from_fn(4, 4, |r, c| {
        if r + c == 3 {
            C64::new(if r == 0 || r == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let tilde = &yy * rho.map(|z| z.conj()) * &yy;
    let sq = hermitian_sqrt(rho);
    let r = &sq * tilde * &sq;
    let r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let l: Vec<f64> = hermitian_eigenvalues(r).into_iter().map(|x| x.max(0.0).sqrt()).collect();
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Projector,
    Stabilizer,
}

/// Default constant: α = (2^{k-1}-2)/2^{k-1} or β = (n·2^{k-1}-2)/2^{k-1}.
pub fn witness_default_param(kind: WitnessKind, h: &Hypergraph) -> f64 {
    let p = 2f64.powi(h.max_cardinality() as i32 - 1);
    match kind {
        WitnessKind::Projector => (p - 2.0) / p,
        WitnessKind::Stabilizer => (h.n() as f64 * p - 2.0) / p,
    }
}

/// Tr(W ρ) with W = α·1 - |H><H| or W = β·1 - Σ K_i. Negative values flag GME.
pub fn witness_value(kind: WitnessKind, h: &Hypergraph, m: &MixedState, param: Option<f64>) -> Result<f64> {
    if m.n() != h.n() {
        return domain("state and hypergraph sizes differ");
    }
    let c = param.unwrap_or_else(|| witness_default_param(kind, h));
    match kind {
        WitnessKind::Projector => {
            let s = build_state(h)?;
            let v = nalgebra::DVector::from_column_slice(s.amps());
            let f = (v.adjoint() * m.rho() * &v)[(0, 0)].re;
            Ok(c - f)
        }
        WitnessKind::Stabilizer => {
            let mut total = 0.0;
            for i in 1..=h.n() {
                total += m.expectation(&generator(h, i)?)?.re;
            }
            Ok(c - total)
        }
    }
}

/// Stabilizer witness on a pure state, without building matrices.
pub fn witness_value_pure(kind: WitnessKind, h: &Hypergraph, s: &PureState, param: Option<f64>) -> Result<f64> {
    let c = param.unwrap_or_else(|| witness_default_param(kind, h));
    match kind {
        WitnessKind::Projector => Ok(c - build_state(h)?.inner(s).norm_sqr()),
        WitnessKind::Stabilizer => {
            let mut total = 0.0;
            for i in 1..=h.n() {
                total += expectation(s, &generator(h, i)?)?.re;
            }
            Ok(c - total)
        }
    }
}

/// Success probability of a controlled-Z gate, by edge cardinality.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GateNoiseProfile {
    pub probs: BTreeMap<usize, f64>,
}

impl GateNoiseProfile {
    pub fn new(probs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let probs: BTreeMap<usize, f64> = probs.into_iter().collect();
        if let Some((k, p)) = probs.iter().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return domain(format!("probability {p} for cardinality {k} outside [0,1]"));
        }
        Ok(GateNoiseProfile { probs })
    }

    pub fn uniform(ks: &[usize], p: f64) -> Result<Self> {
        GateNoiseProfile::new(ks.iter().map(|&k| (k, p)))
    }

    pub fn get(&self, k: usize) -> Result<f64> {
        self.probs
            .get(&k)
            .copied()
            .ok_or_else(|| crate::Error::Domain(format!("no success probability for {k}-edges")))
    }

    /// Weight of the spanning sub-hypergraph `f` of `h`.
    pub fn weight(&self, h: &Hypergraph, f: &Hypergraph) -> Result<f64> {
        let mut w = 1.0;
        for e in h.edges() {
            let p = self.get(e.count_ones() as usize)?;
            w *= if f.contains(e) { p } else { 1.0 - p };
        }
        Ok(w)
    }
}

/// Mixture over spanning sub-hypergraphs. Entries use the factorized form
/// ρ_xy = 2^{-n} Π_{e : [e⊆x] ≠ [e⊆y]} (1 - 2p_e).
pub fn randomize(h: &Hypergraph, noise: &GateNoiseProfile) -> Result<MixedState> {
    budget("edges for randomization", h.edge_count() as u64, 16)?;
    budget("qubits for randomization", h.n() as u64, 8)?;
    let n = h.n();
    let dim = 1usize << n;
    let edges: Vec<(usize, f64)> =
        h.edges().map(|e| Ok((e as usize, 1.0 - 2.0 * noise.get(e.count_ones() as usize)?))).collect::<Result<_>>()?;
    let norm = 1.0 / dim as f64;
    let rho = DMatrix::from_fn(dim, dim, |x, y| {
        let mut v = norm;
        for &(e, f) in &edges {
            if (x & e == e) != (y & e == e) {
                v *= f;
            }
        }
        C64::new(v, 0.0)
    });
    Ok(MixedState::from_raw(n, rho))
}

fn k_subsets(n: usize, k: usize) -> Vec<Edge> {
    (1u32..1 << n).filter(|m| m.count_ones() as usize == k).collect()
}

/// Mean and variance of the purity of A = {1..n/2} over random k-uniform hypergraphs.
pub fn purity_scaling_experiment(n: usize, k: usize, p: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if n % 2 != 0 || n < 2 {
        return domain(format!("n must be even and at least 2, got {n}"));
    }
    budget("qubits for purity sampling", n as u64, 12)?;
    if k < 2 || k > n {
        return domain(format!("edge cardinality {k} outside 2..={n}"));
    }
    if !(0.0..=1.0).contains(&p) || samples == 0 {
        return domain("need p in [0,1] and at least one sample");
    }
    let pool = k_subsets(n, k);
    let half = n / 2;
    let da = 1usize << half;
    let purities: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut sign = vec![1.0f64; 1 << n];
            for &e in &pool {
                if rng.gen_bool(p) {
                    let e = e as usize;
                    for (x, s) in sign.iter_mut().enumerate() {
                        if x & e == e {
                            *s = -*s;
                        }
                    }
                }
            }
            let m = DMatrix::from_fn(da, da, |a, b| sign[a | b << half]) * 0.5f64.powi(half as i32);
            let rho = &m * m.transpose();
            rho.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    let mean = purities.iter().sum::<f64>() / samples as f64;
    let var = purities.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / samples as f64;
    Ok((mean, var))
}
