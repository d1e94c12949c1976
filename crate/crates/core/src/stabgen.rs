//! Generalized stabilizers, hypergraph bases, palindrome and Mermin conditions,
//! essential vertices and the local stabilizer algebra dimension.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{budget, domain, Result};
use crate::hgraph::{binomial, incidence, Edge, Hypergraph};
use crate::simkit::{apply, build_state, Factor, OperatorExpr, Pauli, PureState};

/// K_i = X_i · Π_{e ∈ E(i)} CZ_{e \ i}; a 1-edge {i} contributes the scalar -1.
pub fn generator(h: &Hypergraph, i: usize) -> Result<OperatorExpr> {
    let (_, adj) = incidence(h, i)?;
    let mut op = OperatorExpr::single(Factor::Pauli(Pauli::X, i));
    for a in adj {
        if a == 0 {
            op.factors.push(Factor::Scalar(C64::new(-1.0, 0.0)));
        } else {
            op.factors.push(Factor::CZ(a));
        }
    }
    Ok(op)
}

pub fn verify(h: &Hypergraph) -> Result<bool> {
    budget("qubits for stabilizer verification", h.n() as u64, 12)?;
    let s = build_state(h)?;
    let gens: Vec<OperatorExpr> = (1..=h.n()).map(|i| generator(h, i)).collect::<Result<_>>()?;
    verify_state(h, &s, &gens)
}

fn verify_state(h: &Hypergraph, s: &PureState, gens: &[OperatorExpr]) -> Result<bool> {
    for g in gens {
        if apply(g, s)?.dist(s) > 1e-10 {
            return Ok(false);
        }
    }
    if h.n() <= 4 {
        let ms: Vec<DMatrix<C64>> = gens.iter().map(|g| g.matrix(h.n())).collect::<Result<_>>()?;
        for a in 0..ms.len() {
            for b in a + 1..ms.len() {
                if (&ms[a] * &ms[b] - &ms[b] * &ms[a]).norm() > 1e-10 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Checks an arbitrary state against the generators of `h`.
pub fn verify_against(h: &Hypergraph, s: &PureState) -> Result<bool> {
    if s.n() != h.n() {
        return domain("state and hypergraph sizes differ");
    }
    let gens: Vec<OperatorExpr> = (1..=h.n()).map(|i| generator(h, i)).collect::<Result<_>>()?;
    verify_state(h, s, &gens)
}

/// |H_I> = Π_{i ∈ I} Z_i |H>
pub fn basis_state(h: &Hypergraph, subset: Edge) -> Result<PureState> {
    let s = build_state(h)?;
    h.check_subset(subset).or_else(|e| if subset == 0 { Ok(()) } else { Err(e) })?;
    let z = subset as usize;
    let amps = s
        .amps()
        .iter()
        .enumerate()
        .map(|(x, a)| if (x & z).count_ones() & 1 == 1 { -a } else { *a })
        .collect();
    PureState::from_amps(h.n(), amps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PalindromeVerdict {
    pub x: bool,
    pub minus_x: bool,
    /// None for odd n, where the condition is not defined.
    pub y: Option<bool>,
}

pub fn palindrome(n: usize, ks: &[usize]) -> Result<PalindromeVerdict> {
    if let Some(&k) = ks.iter().find(|&&k| k < 2 || k > n) {
        return domain(format!("cardinality {k} outside 2..={n}"));
    }
    let hw = |u: usize| (ks.iter().map(|&k| binomial(u, k)).sum::<u128>() & 1) as usize;
    let x = (0..=n).all(|w| hw(w) == hw(n - w));
    let minus_x = (0..=n).all(|w| hw(w) != hw(n - w));
    let y = (n % 2 == 0).then(|| (0..=n).all(|w| hw(w) == (hw(n - w) + w + n / 2) % 2));
    Ok(PalindromeVerdict { x, minus_x, y })
}

pub fn mermin_condition(n: usize, k: usize) -> Result<bool> {
    if k < 2 || k > n {
        return domain(format!("need 2 <= k <= n, got k={k}, n={n}"));
    }
    Ok(binomial(n, k) % 2 == 1 && (1..k).all(|l| binomial(n - l, k - l) % 2 == 0))
}

/// Essential vertices (as a mask) and the edges spanned entirely by them.
pub fn essential_vertices(h: &Hypergraph) -> (Edge, Vec<Edge>) {
    let mut ess = 0;
    for i in 1..=h.n() {
        let bi = 1u32 << (i - 1);
        let star: Vec<Edge> = h.edges().filter(|e| e & bi != 0).collect();
        if star.is_empty() {
            continue;
        }
        let ok = star.iter().all(|&e| {
            let r = e & !bi;
            h.edges().any(|f| {
                let j = f & !r;
                f & r == r && j.count_ones() == 1 && j != bi
            })
        });
        if ok {
            ess |= bi;
        }
    }
    let edges = h.edges().filter(|&e| e & ess == e).collect();
    (ess, edges)
}

/// Real dimension of {(a_i) : Σ_i i(a_x X + a_y Y + a_z Z)_i |ψ> = 0}.
pub fn lstab_dim(s: &PureState) -> Result<usize> {
    let n = s.n();
    budget("qubits for local stabilizer algebra", n as u64, 8)?;
    let dim = s.amps().len();
    let mut m = DMatrix::<f64>::zeros(2 * dim, 3 * n);
    for site in 1..=n {
        for (k, p) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().enumerate() {
            let v = apply(&OperatorExpr::of(vec![Factor::Scalar(C64::new(0.0, 1.0)), Factor::Pauli(p, site)]), s)?;
            let col = 3 * (site - 1) + k;
            for (r, a) in v.amps().iter().enumerate() {
                m[(r, col)] = a.re;
                m[(dim + r, col)] = a.im;
            }
        }
    }
    let sv = m.singular_values();
    let rank = sv.iter().filter(|&&x| x > 1e-9).count();
    Ok(3 * n - rank)
}
