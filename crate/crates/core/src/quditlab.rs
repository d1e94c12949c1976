//! Qudit multihypergraph states, generalized Paulis and symplectic gates,
//! stabilizers, elementary-state invariants and geometric entanglement.

use std::collections::{BTreeMap, HashSet, VecDeque};

use nalgebra::DMatrix;
use num_integer::{binomial as nbinom, gcd};

use crate::error::{budget, domain, Result};
use crate::hgraph::{vertices_of, Edge, MAX_VERTICES};
use crate::simkit::hermitian_eigenvalues;
use crate::C64;

/// ω^k with exact values at quarter turns, so d = 2 phases are exactly ±1.
fn omega_pow(d: u32, k: i64) -> C64 {
    let d = d as i64;
    let k = k.rem_euclid(d);
    if (4 * k) % d == 0 {
        return [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)][(4 * k / d) as usize];
    }
    C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64)
}

/// Hyperedges with multiplicities in 1..d-1. The empty edge is kept as a global
/// phase power, singletons act as local Z powers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiHypergraph {
    n: usize,
    d: u32,
    edges: BTreeMap<Edge, u32>,
    phase: u32,
}

impl MultiHypergraph {
    pub fn new(n: usize, d: u32) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return domain(format!("vertex count {n} outside 1..={MAX_VERTICES}"));
        }
        if d < 2 {
            return domain(format!("local dimension must be at least 2, got {d}"));
        }
        Ok(MultiHypergraph { n, d, edges: BTreeMap::new(), phase: 0 })
    }

    pub fn from_edges<I, E>(n: usize, d: u32, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, u32)>,
        E: AsRef<[usize]>,
    {
        let mut h = Self::new(n, d)?;
        for (e, m) in edges {
            let mut mask = 0;
            for &v in e.as_ref() {
                if v == 0 || v > n {
                    return domain(format!("vertex {v} outside 1..={n}"));
                }
                mask |= 1 << (v - 1);
            }
            h.add(mask, m);
        }
        Ok(h)
    }

    /// Multiplicities add mod d; multiplicity 0 removes the edge.
    pub fn add(&mut self, e: Edge, m: u32) {
        if e == 0 {
            self.phase = (self.phase + m) % self.d;
            return;
        }
        let cur = self.edges.get(&e).copied().unwrap_or(0);
        let next = (cur + m) % self.d;
        if next == 0 {
            self.edges.remove(&e);
        } else {
            self.edges.insert(e, next);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn edges(&self) -> &BTreeMap<Edge, u32> {
        &self.edges
    }

    pub fn phase_power(&self) -> u32 {
        self.phase
    }

    pub fn max_cardinality(&self) -> usize {
        self.edges.keys().map(|e| e.count_ones() as usize).max().unwrap_or(0)
    }

    /// The elementary state G_n^m: one n-edge with multiplicity m.
    pub fn elementary(n: usize, d: u32, m: u32) -> Result<Self> {
        if m == 0 || m >= d {
            return domain(format!("multiplicity {m} outside 1..{d}"));
        }
        let mut h = Self::new(n, d)?;
        h.add(((1u64 << n) - 1) as Edge, m);
        Ok(h)
    }

    fn dim(&self) -> Result<usize> {
        let dim = (self.d as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX);
        budget("qudit Hilbert space dimension", dim.min(u64::MAX as u128) as u64, 1 << 16)?;
        Ok(dim as usize)
    }

    /// Σ_e m_e Π_{j∈e} q_j + phase (mod d) for digits q.
    pub fn phase_exponent(&self, q: &[u32]) -> u32 {
        let d = self.d as u64;
        let mut t = self.phase as u64;
        for (&e, &m) in &self.edges {
            let mut p = m as u64;
            for v in vertices_of(e) {
                p = p * q[v - 1] as u64 % d;
            }
            t = (t + p) % d;
        }
        t as u32
    }
}

fn digits(mut idx: usize, n: usize, d: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let q = (idx % d as usize) as u32;
            idx /= d as usize;
            q
        })
        .collect()
}

/// Amplitudes over d^n basis states; qudit 1 is the least significant digit.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditState {
    n: usize,
    d: u32,
    amps: Vec<C64>,
}

impl QuditState {
    pub fn from_amps(n: usize, d: u32, amps: Vec<C64>) -> Result<Self> {
        if d < 2 || (d as usize).checked_pow(n as u32) != Some(amps.len()) {
            return domain(format!("need {d}^{n} amplitudes, got {}", amps.len()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return domain(format!("state norm {norm} is not 1"));
        }
        Ok(QuditState { n, d, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn inner(&self, other: &QuditState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn dist(&self, other: &QuditState) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn stride(&self, site: usize) -> usize {
        (self.d as usize).pow(site as u32 - 1)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n {
            return domain(format!("site {site} outside 1..={}", self.n));
        }
        Ok(())
    }

    /// Applies a d×d matrix u to one site.
    pub fn apply_local(&self, site: usize, u: &DMatrix<C64>) -> Result<QuditState> {
        self.check_site(site)?;
        let d = self.d as usize;
        if u.nrows() != d || u.ncols() != d {
            return domain("local operator has the wrong dimension");
        }
        let st = self.stride(site);
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let q = idx / st % d;
            let base = idx - q * st;
            *o = (0..d).map(|p| u[(q, p)] * self.amps[base + p * st]).sum();
        }
        Ok(QuditState { n: self.n, d: self.d, amps: out })
    }
}

pub fn qudit_build(h: &MultiHypergraph) -> Result<QuditState> {
    let dim = h.dim()?;
    let norm = (1.0 / h.d as f64).powf(h.n as f64 / 2.0);
    let amps = (0..dim).map(|i| omega_pow(h.d, h.phase_exponent(&digits(i, h.n, h.d)) as i64) * norm).collect();
    Ok(QuditState { n: h.n, d: h.d, amps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenPauli {
    X,
    Z,
}

/// Z|q> = ω^q |q>, X|q> = |q+1 mod d>, raised to `power`.
pub fn gen_pauli_apply(s: &QuditState, which: GenPauli, site: usize, power: i64) -> Result<QuditState> {
    s.check_site(site)?;
    let d = s.d as usize;
    let st = s.stride(site);
    let p = power.rem_euclid(d as i64) as usize;
    let mut out = vec![C64::new(0.0, 0.0); s.amps.len()];
    for (idx, a) in s.amps.iter().enumerate() {
        let q = idx / st % d;
        match which {
            GenPauli::Z => out[idx] = a * omega_pow(s.d, (p * q) as i64),
            GenPauli::X => out[idx - q * st + (q + p) % d * st] = *a,
        }
    }
    Ok(QuditState { n: s.n, d: s.d, amps: out })
}

pub fn gen_pauli_matrix(d: u32, which: GenPauli, power: i64) -> DMatrix<C64> {
    let du = d as usize;
    let p = power.rem_euclid(d as i64) as usize;
    DMatrix::from_fn(du, du, |r, c| match which {
        GenPauli::Z => {
            if r == c {
                omega_pow(d, (p * c) as i64)
            } else {
                C64::new(0.0, 0.0)
            }
        }
        GenPauli::X => {
            if r == (c + p) % du {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }
    })
}

/// Fourier matrix with kernel ω^{pq}/√d, mapping |q> to |p_q>.
pub fn fourier(d: u32) -> DMatrix<C64> {
    let du = d as usize;
    let s = (du as f64).sqrt().recip();
    DMatrix::from_fn(du, du, |p, q| omega_pow(d, (p * q) as i64) * s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symplectic {
    /// S(ξ,0,0): |q> -> |ξq>
    Scale,
    /// S(1,ξ,0): diagonal ω^{ξq²/2}
    QuadZ,
    /// S(1,0,ξ): diagonal ω^{-ξq²/2} in the Fourier basis
    QuadX,
}

fn half_quadratic_phase(d: u32, xi: i64, q: usize) -> C64 {
    let q = q as i64;
    if d % 2 == 1 {
        let inv2 = (d as i64 + 1) / 2;
        omega_pow(d, xi.rem_euclid(d as i64) * q * q % d as i64 * inv2)
    } else {
        // literal exponent ξq²/2 taken in the 2d-th roots of unity
        C64::from_polar(1.0, std::f64::consts::PI * (xi * q * q) as f64 / d as f64)
    }
}

pub fn symplectic_matrix(d: u32, kind: Symplectic, xi: i64) -> Result<DMatrix<C64>> {
    if gcd(xi.rem_euclid(d as i64), d as i64) != 1 {
        return domain(format!("gcd({xi}, {d}) != 1, the operator is not unitary"));
    }
    let du = d as usize;
    Ok(match kind {
        Symplectic::Scale => DMatrix::from_fn(du, du, |r, c| {
            if r as i64 == (xi.rem_euclid(d as i64) * c as i64) % d as i64 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        Symplectic::QuadZ => DMatrix::from_fn(du, du, |r, c| if r == c { half_quadratic_phase(d, xi, c) } else { C64::new(0.0, 0.0) }),
        Symplectic::QuadX => {
            let f = fourier(d);
            let diag = DMatrix::from_fn(du, du, |r, c| if r == c { half_quadratic_phase(d, -xi, c) } else { C64::new(0.0, 0.0) });
            &f * diag * f.adjoint()
        }
    })
}

pub fn symplectic_apply(s: &QuditState, kind: Symplectic, site: usize, xi: i64) -> Result<QuditState> {
    let u = symplectic_matrix(s.d, kind, xi)?;
    s.apply_local(site, &u)
}

/// K_i |ψ> with K_i = X_i Π_{e∋i} CZ_{e\i}^{m_e}.
pub fn apply_stabilizer(h: &MultiHypergraph, i: usize, s: &QuditState) -> Result<QuditState> {
    if s.n != h.n || s.d != h.d {
        return domain("state and multihypergraph shapes differ");
    }
    s.check_site(i)?;
    let bit = 1 << (i - 1);
    let mut g = MultiHypergraph::new(h.n, h.d)?;
    for (&e, &m) in &h.edges {
        if e & bit != 0 {
            g.add(e & !bit, m);
        }
    }
    let amps: Vec<C64> = s
        .amps
        .iter()
        .enumerate()
        .map(|(idx, a)| a * omega_pow(h.d, g.phase_exponent(&digits(idx, h.n, h.d)) as i64))
        .collect();
    gen_pauli_apply(&QuditState { n: s.n, d: s.d, amps }, GenPauli::X, i, 1)
}

/// Every generator fixes the state within 1e-10.
pub fn verify_stabilizers(h: &MultiHypergraph) -> Result<bool> {
    budget("qudit dimension for stabilizer check", h.dim()? as u64, 1 << 14)?;
    let s = qudit_build(h)?;
    for i in 1..=h.n {
        if apply_stabilizer(h, i, &s)?.dist(&s) > 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn basis_matrix_of(h: &MultiHypergraph, i: usize) -> Result<DMatrix<C64>> {
    let dim = h.dim()?;
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[c] = C64::new(1.0, 0.0);
        let col = apply_stabilizer(h, i, &QuditState { n: h.n, d: h.d, amps })?;
        for r in 0..dim {
            m[(r, c)] = col.amps[r];
        }
    }
    Ok(m)
}

/// Order of the group generated by the K_i, by closure over explicit matrices.
pub fn stabilizer_group_order(h: &MultiHypergraph) -> Result<usize> {
    budget("qudit dimension for group closure", h.dim()? as u64, 81)?;
    let gens: Vec<DMatrix<C64>> = (1..=h.n).map(|i| basis_matrix_of(h, i)).collect::<Result<_>>()?;
    let key = |m: &DMatrix<C64>| -> Vec<(i64, i64)> { m.iter().map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64)).collect() };
    let dim = gens[0].nrows();
    let id = DMatrix::<C64>::identity(dim, dim);
    let mut seen = HashSet::new();
    seen.insert(key(&id));
    let mut queue = VecDeque::from([id]);
    while let Some(m) = queue.pop_front() {
        for g in &gens {
            let next = g * &m;
            if seen.insert(key(&next)) {
                budget("stabilizer group size", seen.len() as u64, 1 << 16)?;
                queue.push_back(next);
            }
        }
    }
    Ok(seen.len())
}

/// Π_i Z_i^{-m_i} |H>.
pub fn hypergraph_basis_state(h: &MultiHypergraph, m: &[u32]) -> Result<QuditState> {
    if m.len() != h.n {
        return domain("need one exponent per qudit");
    }
    let mut s = qudit_build(h)?;
    for (j, &mj) in m.iter().enumerate() {
        s = gen_pauli_apply(&s, GenPauli::Z, j + 1, -(mj as i64))?;
    }
    Ok(s)
}

/// d / gcd(d, m): the rank of any single-qudit reduced state of G_n^m.
pub fn elementary_rank(d: u32, m: u32) -> Result<u32> {
    if m == 0 || m >= d {
        return domain(format!("multiplicity {m} outside 1..{d}"));
    }
    Ok(d / gcd(d, m))
}

fn reduced_on(s: &QuditState, site: usize) -> Result<DMatrix<C64>> {
    s.check_site(site)?;
    let d = s.d as usize;
    let st = s.stride(site);
    let mut rho = DMatrix::zeros(d, d);
    for (idx, a) in s.amps.iter().enumerate() {
        let q = idx / st % d;
        let base = idx - q * st;
        for p in 0..d {
            rho[(q, p)] += a * s.amps[base + p * st].conj();
        }
    }
    Ok(rho)
}

pub fn reduced_rank_numeric(s: &QuditState, site: usize) -> Result<usize> {
    let rho = reduced_on(s, site)?;
    Ok(hermitian_eigenvalues(rho).into_iter().filter(|&l| l > 1e-9).count())
}

pub fn slocc_elem_equiv(d: u32, m: u32, m2: u32) -> Result<bool> {
    elementary_rank(d, m)?;
    elementary_rank(d, m2)?;
    Ok(gcd(d, m) == gcd(d, m2))
}

fn factorize(mut d: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while d > 1 {
        let mut l = 0;
        while d % p == 0 {
            d /= p;
            l += 1;
        }
        if l > 0 {
            out.push((p, l));
        }
        p += 1;
    }
    out
}

/// Least prime factor.
pub fn lpf(d: u32) -> u32 {
    factorize(d).first().map(|f| f.0).unwrap_or(d)
}

/// Closed-form geometric entanglement of G_n^m over the prime factorization of d.
pub fn em_elementary_closed(n: usize, d: u32, m: u32) -> Result<f64> {
    if n < 2 {
        return domain("need at least two qudits");
    }
    elementary_rank(d, m)?;
    let g = gcd(d, m);
    let mut prod = 1.0;
    for (p, l) in factorize(d) {
        let mut k = 0;
        let mut gg = g;
        while gg % p == 0 {
            gg /= p;
            k += 1;
        }
        if k == l {
            continue;
        }
        let pf = p as f64;
        let sum: f64 = (0..l - k).map(|j| pf.powi(-(j as i32)) * nbinom((n + j as usize - 2) as u64, j as u64) as f64).sum();
        prod *= 1.0 - (1.0 - 1.0 / pf).powi(n as i32 - 1) * sum;
    }
    Ok(1.0 - prod)
}

/// min over bipartitions (qudit 1 on side A) of 1 - λ_max², λ_max the largest Schmidt coefficient.
pub fn em_qudit_numeric(s: &QuditState) -> Result<f64> {
    budget("qudit dimension for E_M", s.amps.len() as u64, 1 << 14)?;
    let n = s.n;
    if n < 2 {
        return domain("need at least two qudits");
    }
    let d = s.d as usize;
    let mut best = f64::INFINITY;
    for a in (1u32..1 << n).filter(|a| a & 1 == 1 && a.count_ones() < n as u32) {
        let sa: Vec<usize> = (0..n).filter(|j| a >> j & 1 == 1).collect();
        let sb: Vec<usize> = (0..n).filter(|j| a >> j & 1 == 0).collect();
        let (ra, rb) = (d.pow(sa.len() as u32), d.pow(sb.len() as u32));
        let mut m = DMatrix::<C64>::zeros(ra, rb);
        for (idx, amp) in s.amps.iter().enumerate() {
            let q = digits(idx, n, s.d);
            let r = sa.iter().rev().fold(0, |acc, &j| acc * d + q[j] as usize);
            let c = sb.iter().rev().fold(0, |acc, &j| acc * d + q[j] as usize);
            m[(r, c)] = *amp;
        }
        let gram = if ra <= rb { &m * m.adjoint() } else { m.adjoint() * &m };
        let top = hermitian_eigenvalues(gram).first().copied().unwrap_or(0.0);
        best = best.min(1.0 - top);
    }
    Ok(best.max(0.0))
}
