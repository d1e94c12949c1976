//! Dense state-vector and density-matrix engine for qubits.
//!
//! Basis index convention: bit (i-1) of an index is qubit i, so qubit 1 is the
//! least significant bit.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{budget, domain, Result};
use crate::hgraph::{vertices_of, Edge, Hypergraph};

pub const MAX_QUBITS: usize = 14;
pub const NORM_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One primitive gate. Sites are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Pauli(Pauli, usize),
    H(usize),
    S(usize),
    Sdg(usize),
    /// |+P><+P| ± i|-P><-P|
    SqrtPauli(Pauli, Sign, usize),
    /// Multi-controlled Z on a subset; a singleton is Z.
    CZ(Edge),
    /// 1 - (1 ∓ i)|1..1><1..1|, i.e. phase ±i on the all-ones component.
    SqrtCZ(Edge, Sign),
    CNOT { controls: Edge, target: usize },
    /// Phase e^{iφ} on the all-ones component of the subset.
    Phase(Edge, f64),
    Scalar(C64),
}

/// Product of factors written left to right; the rightmost factor acts first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorExpr {
    pub factors: Vec<Factor>,
}

impl OperatorExpr {
    pub fn identity() -> Self {
        OperatorExpr::default()
    }

    pub fn of(factors: Vec<Factor>) -> Self {
        OperatorExpr { factors }
    }

    pub fn single(f: Factor) -> Self {
        OperatorExpr { factors: vec![f] }
    }

    /// `self · other`
    pub fn mul(&self, other: &OperatorExpr) -> OperatorExpr {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        OperatorExpr { factors }
    }

    pub fn pauli_string(x: Edge, z: Edge) -> OperatorExpr {
        let mut f = Vec::new();
        for v in vertices_of(x | z) {
            let b = 1 << (v - 1);
            let p = match (x & b != 0, z & b != 0) {
                (true, true) => Pauli::Y,
                (true, false) => Pauli::X,
                _ => Pauli::Z,
            };
            f.push(Factor::Pauli(p, v));
        }
        OperatorExpr { factors: f }
    }

    pub fn max_site(&self) -> usize {
        self.factors
            .iter()
            .map(|f| match *f {
                Factor::Pauli(_, s) | Factor::H(s) | Factor::S(s) | Factor::Sdg(s) | Factor::SqrtPauli(_, _, s) => s,
                Factor::CZ(e) | Factor::SqrtCZ(e, _) | Factor::Phase(e, _) => 32 - e.leading_zeros() as usize,
                Factor::CNOT { controls, target } => target.max(32 - controls.leading_zeros() as usize),
                Factor::Scalar(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Dense matrix on n qubits; columns are images of basis states.
    pub fn matrix(&self, n: usize) -> Result<DMatrix<C64>> {
        budget("qubits for explicit operator matrix", n as u64, 10)?;
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut v = vec![ZERO; dim];
            v[col] = ONE;
            self.apply_in_place(n, &mut v)?;
            for (row, a) in v.into_iter().enumerate() {
                m[(row, col)] = a;
            }
        }
        Ok(m)
    }

    fn apply_in_place(&self, n: usize, amps: &mut [C64]) -> Result<()> {
        let ms = self.max_site();
        if ms > n {
            return domain(format!("operator acts on site {ms} but state has {n} qubits"));
        }
        for f in self.factors.iter().rev() {
            apply_factor(f, amps)?;
        }
        Ok(())
    }
}

/// Weighted sum of operator products, used for observables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OperatorSum {
    pub terms: Vec<(C64, OperatorExpr)>,
}

impl OperatorSum {
    pub fn push(&mut self, c: f64, op: OperatorExpr) {
        self.terms.push((C64::new(c, 0.0), op));
    }

    pub fn matrix(&self, n: usize) -> Result<DMatrix<C64>> {
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for (c, op) in &self.terms {
            m += op.matrix(n)? * *c;
        }
        Ok(m)
    }
}

fn pauli_matrix(p: Pauli) -> [[C64; 2]; 2] {
    match p {
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -I], [I, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

fn apply_1q(amps: &mut [C64], site: usize, u: [[C64; 2]; 2]) {
    let b = 1usize << (site - 1);
    for x in 0..amps.len() {
        if x & b == 0 {
            let (a0, a1) = (amps[x], amps[x | b]);
            amps[x] = u[0][0] * a0 + u[0][1] * a1;
            amps[x | b] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

fn apply_diag_ones(amps: &mut [C64], e: Edge, phase: C64) {
    let e = e as usize;
    for (x, a) in amps.iter_mut().enumerate() {
        if x & e == e {
            *a *= phase;
        }
    }
}

fn apply_factor(f: &Factor, amps: &mut [C64]) -> Result<()> {
    match *f {
        Factor::Pauli(p, s) => apply_1q(amps, s, pauli_matrix(p)),
        Factor::H(s) => {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            apply_1q(amps, s, [[h, h], [h, -h]])
        }
        Factor::S(s) => apply_1q(amps, s, [[ONE, ZERO], [ZERO, I]]),
        Factor::Sdg(s) => apply_1q(amps, s, [[ONE, ZERO], [ZERO, -I]]),
        Factor::SqrtPauli(p, sign, s) => {
            let sg = sign.value();
            let a = C64::new(0.5, 0.5 * sg);
            let b = C64::new(0.5, -0.5 * sg);
            let pm = pauli_matrix(p);
            let mut u = [[ZERO; 2]; 2];
            for r in 0..2 {
                for c in 0..2 {
                    u[r][c] = b * pm[r][c] + if r == c { a } else { ZERO };
                }
            }
            apply_1q(amps, s, u)
        }
        Factor::CZ(e) => {
            if e == 0 {
                return domain("controlled-Z on the empty set");
            }
            apply_diag_ones(amps, e, -ONE)
        }
        Factor::SqrtCZ(e, sign) => {
            if e == 0 {
                return domain("square-root controlled-Z on the empty set");
            }
            apply_diag_ones(amps, e, I * sign.value())
        }
        Factor::Phase(e, phi) => apply_diag_ones(amps, e, C64::from_polar(1.0, phi)),
        Factor::CNOT { controls, target } => {
            let t = 1usize << (target - 1);
            let c = controls as usize;
            if c & t != 0 {
                return domain("CNOT target is among its controls");
            }
            for x in 0..amps.len() {
                if x & c == c && x & t == 0 {
                    amps.swap(x, x | t);
                }
            }
        }
        Factor::Scalar(z) => amps.iter_mut().for_each(|a| *a *= z),
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn from_amps(n: usize, amps: Vec<C64>) -> Result<Self> {
        budget("qubits", n as u64, MAX_QUBITS as u64)?;
        if amps.len() != 1 << n {
            return domain(format!("amplitude vector length {} != 2^{n}", amps.len()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return domain(format!("state not normalized: norm² = {norm}"));
        }
        Ok(PureState { n, amps })
    }

    /// Normalizes; fails on the zero vector.
    pub fn normalized(n: usize, mut amps: Vec<C64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return domain("zero vector cannot be normalized");
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        PureState::from_amps(n, amps)
    }

    pub fn plus(n: usize) -> Result<Self> {
        budget("qubits", n as u64, MAX_QUBITS as u64)?;
        let a = C64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
        Ok(PureState { n, amps: vec![a; 1 << n] })
    }

    pub fn basis(n: usize, idx: usize) -> Result<Self> {
        budget("qubits", n as u64, MAX_QUBITS as u64)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[idx] = ONE;
        Ok(PureState { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// |<self|other>|^2
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `self` on qubits 1..=n_self, `other` on the following qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.n + other.n;
        budget("qubits", n as u64, MAX_QUBITS as u64)?;
        let lo = self.amps.len();
        let mut amps = vec![ZERO; lo * other.amps.len()];
        for (j, b) in other.amps.iter().enumerate() {
            for (i, a) in self.amps.iter().enumerate() {
                amps[i + lo * j] = a * b;
            }
        }
        Ok(PureState { n, amps })
    }

    pub fn scaled(&self, z: C64) -> PureState {
        PureState { n: self.n, amps: self.amps.iter().map(|a| a * z).collect() }
    }

    pub fn dist(&self, other: &PureState) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn density(&self) -> MixedState {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        MixedState { n: self.n, rho: &v * v.adjoint() }
    }
}

pub fn build_state(h: &Hypergraph) -> Result<PureState> {
    let n = h.n();
    budget("qubits", n as u64, MAX_QUBITS as u64)?;
    let a = (0.5f64).powf(n as f64 / 2.0);
    let mut amps = vec![C64::new(a, 0.0); 1 << n];
    for e in h.edges() {
        let e = e as usize;
        for (x, amp) in amps.iter_mut().enumerate() {
            if x & e == e {
                *amp = -*amp;
            }
        }
    }
    Ok(PureState { n, amps })
}

pub fn apply(op: &OperatorExpr, s: &PureState) -> Result<PureState> {
    let mut amps = s.amps.clone();
    op.apply_in_place(s.n, &mut amps)?;
    Ok(PureState { n: s.n, amps })
}

/// Applies a 2x2 unitary `u[row][col]` at `site`.
pub fn apply_local(s: &PureState, site: usize, u: [[C64; 2]; 2]) -> Result<PureState> {
    if site == 0 || site > s.n {
        return domain(format!("site {site} outside 1..={}", s.n));
    }
    let mut amps = s.amps.clone();
    apply_1q(&mut amps, site, u);
    Ok(PureState { n: s.n, amps })
}

pub fn apply_sum(op: &OperatorSum, s: &PureState) -> Result<Vec<C64>> {
    let mut out = vec![ZERO; s.amps.len()];
    for (c, t) in &op.terms {
        let v = apply(t, s)?;
        out.iter_mut().zip(v.amps).for_each(|(o, a)| *o += c * a);
    }
    Ok(out)
}

pub fn expectation(s: &PureState, op: &OperatorExpr) -> Result<C64> {
    Ok(s.inner(&apply(op, s)?))
}

pub fn expectation_sum(s: &PureState, op: &OperatorSum) -> Result<C64> {
    let v = apply_sum(op, s)?;
    Ok(s.amps.iter().zip(&v).map(|(a, b)| a.conj() * b).sum())
}

/// Applies the Pauli string with X-part `x` and Z-part `z` (Y where both).
pub fn pauli_apply(amps: &[C64], x: usize, z: usize) -> Vec<C64> {
    let ph = I.powi((x & z).count_ones() as i32);
    let mut out = vec![ZERO; amps.len()];
    for (k, a) in amps.iter().enumerate() {
        let s = if (z & k).count_ones() & 1 == 1 { -ph } else { ph };
        out[k ^ x] = s * a;
    }
    out
}

/// <ψ|P|ψ> for the Pauli string (x, z).
pub fn pauli_expectation(amps: &[C64], x: usize, z: usize) -> C64 {
    let ph = I.powi((x & z).count_ones() as i32);
    let mut acc = ZERO;
    for (k, a) in amps.iter().enumerate() {
        let t = amps[k ^ x].conj() * a;
        if (z & k).count_ones() & 1 == 1 {
            acc -= t;
        } else {
            acc += t;
        }
    }
    acc * ph
}

/// Nonempty proper subset A of the qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    n: usize,
    a: Edge,
}

impl Bipartition {
    pub fn new(n: usize, a: Edge) -> Result<Self> {
        let full = ((1u64 << n) - 1) as Edge;
        if a == 0 || a & full == full || a & !full != 0 {
            return domain(format!("{:?} is not a nonempty proper subset of 1..={n}", vertices_of(a)));
        }
        Ok(Bipartition { n, a })
    }

    pub fn from_vertices(n: usize, a: &[usize]) -> Result<Self> {
        Bipartition::new(n, crate::hgraph::mask_of(a))
    }

    pub fn side_a(&self) -> Edge {
        self.a
    }

    pub fn side_b(&self) -> Edge {
        !self.a & (((1u64 << self.n) - 1) as Edge)
    }

    /// All cuts with qubit 1 on side A.
    pub fn all(n: usize) -> Vec<Bipartition> {
        let full = (1u32 << n) - 1;
        (1..full).filter(|a| a & 1 == 1).map(|a| Bipartition { n, a }).collect()
    }
}

/// Scatter the bits of `v` into positions listed in `pos`.
pub(crate) fn deposit(v: usize, pos: &[usize]) -> usize {
    pos.iter().enumerate().fold(0, |acc, (j, &p)| acc | ((v >> j) & 1) << p)
}

pub(crate) fn bit_positions(mask: Edge) -> Vec<usize> {
    (0..32).filter(|b| mask >> b & 1 == 1).collect()
}

/// Coefficient matrix with rows indexed by side A and columns by side B.
pub fn cut_matrix(s: &PureState, a: Edge) -> DMatrix<C64> {
    let pa = bit_positions(a);
    let full = ((1u64 << s.n) - 1) as Edge;
    let pb = bit_positions(!a & full);
    let (da, db) = (1usize << pa.len(), 1usize << pb.len());
    let ia: Vec<usize> = (0..da).map(|i| deposit(i, &pa)).collect();
    let ib: Vec<usize> = (0..db).map(|j| deposit(j, &pb)).collect();
    DMatrix::from_fn(da, db, |i, j| s.amps[ia[i] | ib[j]])
}

pub fn hermitian_eigenvalues(m: DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

pub fn schmidt(s: &PureState, cut: &Bipartition) -> Vec<f64> {
    let m = cut_matrix(s, cut.a);
    let g = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
    hermitian_eigenvalues(g).into_iter().map(|x| x.max(0.0)).collect()
}

pub fn reduced(s: &PureState, keep: Edge) -> Result<MixedState> {
    let full = ((1u64 << s.n) - 1) as Edge;
    if keep == 0 || keep & !full != 0 {
        return domain("kept subsystem must be a nonempty subset of the qubits");
    }
    let m = cut_matrix(s, keep);
    Ok(MixedState { n: keep.count_ones() as usize, rho: &m * m.adjoint() })
}

/// Projects onto outcome ±1 of the Pauli at `site`. Returns None as the post-state when the probability vanishes.
pub fn measure_pauli(s: &PureState, site: usize, basis: Pauli, outcome: i8) -> Result<(f64, Option<PureState>)> {
    if site == 0 || site > s.n {
        return domain(format!("site {site} outside 1..={}", s.n));
    }
    if outcome != 1 && outcome != -1 {
        return domain("outcome must be +1 or -1");
    }
    let p = apply(&OperatorExpr::single(Factor::Pauli(basis, site)), s)?;
    let o = outcome as f64;
    let proj: Vec<C64> = s.amps.iter().zip(&p.amps).map(|(a, b)| (a + b * o) * 0.5).collect();
    let prob: f64 = proj.iter().map(|a| a.norm_sqr()).sum();
    if prob < 1e-24 {
        return Ok((prob, None));
    }
    let post = PureState::normalized(s.n, proj)?;
    Ok((prob, Some(post)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    n: usize,
    rho: DMatrix<C64>,
}

impl MixedState {
    pub fn new(n: usize, rho: DMatrix<C64>) -> Result<Self> {
        budget("qubits for density matrix", n as u64, 10)?;
        let dim = 1usize << n;
        if rho.nrows() != dim || rho.ncols() != dim {
            return domain(format!("density matrix must be {dim}x{dim}"));
        }
        if (&rho - rho.adjoint()).iter().any(|z| z.norm() > 1e-12) {
            return domain("density matrix is not Hermitian");
        }
        if (rho.trace().re - 1.0).abs() > 1e-12 {
            return domain("density matrix trace differs from 1");
        }
        let m = MixedState { n, rho };
        if m.eigenvalues().last().copied().unwrap_or(0.0) < -1e-10 {
            return domain("density matrix has a negative eigenvalue");
        }
        Ok(m)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let dim = 1usize << n;
        MixedState::new(n, DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0))
    }

    pub(crate) fn from_raw(n: usize, rho: DMatrix<C64>) -> Self {
        MixedState { n, rho }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.rho.clone())
    }

    /// Convex combination `p·self + (1-p)·other`.
    pub fn mix(&self, other: &MixedState, p: f64) -> Result<MixedState> {
        if self.n != other.n {
            return domain("mixing states of different sizes");
        }
        Ok(MixedState { n: self.n, rho: &self.rho * C64::new(p, 0.0) + &other.rho * C64::new(1.0 - p, 0.0) })
    }

    pub fn partial_transpose(&self, a: Edge) -> DMatrix<C64> {
        let a = a as usize;
        let dim = self.rho.nrows();
        DMatrix::from_fn(dim, dim, |r, c| {
            let sw = (r ^ c) & a;
            self.rho[(r ^ sw, c ^ sw)]
        })
    }

    pub fn expectation(&self, op: &OperatorExpr) -> Result<C64> {
        let m = op.matrix(self.n)?;
        Ok((&self.rho * m).trace())
    }
}
