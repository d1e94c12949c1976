//! Mermin-type contextuality operators, Hardy and Bell expressions, and their
//! classical bounds by exact enumeration.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{budget, domain, Result};
use crate::hgraph::{incidence, make_complete, vertices_of, Hypergraph};
use crate::simkit::{pauli_expectation, OperatorExpr, OperatorSum, Pauli, PureState};
use crate::stabgen::{mermin_condition, palindrome};

pub type Q = Ratio<i64>;

/// Correlator <Π P_j> or joint probability p(a | P) over the measured parties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Corr { coef: Q, settings: Vec<Option<Pauli>> },
    Prob { coef: Q, settings: Vec<Option<Pauli>>, outcomes: Vec<i8> },
}

impl Term {
    pub fn coef(&self) -> Q {
        match self {
            Term::Corr { coef, .. } | Term::Prob { coef, .. } => *coef,
        }
    }

    pub fn settings(&self) -> &[Option<Pauli>] {
        match self {
            Term::Corr { settings, .. } | Term::Prob { settings, .. } => settings,
        }
    }

    fn with_coef(&self, c: Q) -> Term {
        match self.clone() {
            Term::Corr { settings, .. } => Term::Corr { coef: c, settings },
            Term::Prob { settings, outcomes, .. } => Term::Prob { coef: c, settings, outcomes },
        }
    }
}

/// A linear expression in correlators and outcome probabilities of n parties,
/// each measuring a Pauli setting with outcomes ±1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DichotomicScenario {
    pub n: usize,
    pub terms: Vec<Term>,
}

fn parse_settings(s: &str) -> Vec<Option<Pauli>> {
    s.chars()
        .map(|c| match c {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        })
        .collect()
}

fn parse_outcomes(s: &str) -> Vec<i8> {
    s.chars().map(|c| if c == '+' { 1 } else if c == '-' { -1 } else { 0 }).collect()
}

impl DichotomicScenario {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.settings().len() != n {
                return domain(format!("term references {} parties, scenario has {n}", t.settings().len()));
            }
            if let Term::Prob { settings, outcomes, .. } = t {
                if outcomes.len() != n {
                    return domain("outcome pattern length differs from party count");
                }
                for (s, o) in settings.iter().zip(outcomes) {
                    match (s, o) {
                        (Some(_), 1 | -1) | (None, 0) => {}
                        _ => return domain("each measured party needs outcome ±1, unmeasured parties outcome 0"),
                    }
                }
            }
        }
        Ok(DichotomicScenario { n, terms })
    }

    /// Shorthand: settings "XZZ", outcomes "+--"; '.' leaves a party unmeasured.
    pub fn prob(coef: Q, outcomes: &str, settings: &str) -> Term {
        Term::Prob { coef, settings: parse_settings(settings), outcomes: parse_outcomes(outcomes) }
    }

    pub fn corr(coef: Q, settings: &str) -> Term {
        Term::Corr { coef, settings: parse_settings(settings) }
    }

    pub fn negated(&self) -> DichotomicScenario {
        DichotomicScenario { n: self.n, terms: self.terms.iter().map(|t| t.with_coef(-t.coef())).collect() }
    }

    /// Correlator terms as an observable (probability terms are expanded into correlators).
    pub fn observable(&self) -> OperatorSum {
        let mut out = OperatorSum::default();
        for t in &self.terms {
            for (c, x, z) in expand_term(t) {
                let c = *c.numer() as f64 / *c.denom() as f64;
                out.push(c, OperatorExpr::pauli_string(x as u32, z as u32));
            }
        }
        out
    }
}

fn masks(settings: &[Option<Pauli>], keep: usize) -> (usize, usize) {
    let (mut x, mut z) = (0, 0);
    for (j, s) in settings.iter().enumerate() {
        if keep >> j & 1 == 0 {
            continue;
        }
        match s {
            Some(Pauli::X) => x |= 1 << j,
            Some(Pauli::Z) => z |= 1 << j,
            Some(Pauli::Y) => {
                x |= 1 << j;
                z |= 1 << j
            }
            None => {}
        }
    }
    (x, z)
}

/// Expands a term into signed Pauli correlators (coef, x-mask, z-mask):
/// p(a|P) = 2^{-m} Σ_{T ⊆ measured} Π_{j∈T} a_j <P_T>.
fn expand_term(t: &Term) -> Vec<(Q, usize, usize)> {
    match t {
        Term::Corr { coef, settings } => {
            let (x, z) = masks(settings, usize::MAX);
            vec![(*coef, x, z)]
        }
        Term::Prob { coef, settings, outcomes } => {
            let measured: usize = settings.iter().enumerate().filter(|(_, s)| s.is_some()).map(|(j, _)| 1 << j).sum();
            let m = measured.count_ones();
            let scale = *coef / Q::from_integer(1i64 << m);
            let mut out = Vec::new();
            let mut sub = measured;
            loop {
                let neg = (0..outcomes.len()).filter(|&j| sub >> j & 1 == 1 && outcomes[j] < 0).count();
                let (x, z) = masks(settings, sub);
                out.push((if neg % 2 == 1 { -scale } else { scale }, x, z));
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & measured;
            }
            out
        }
    }
}

/// Quantum value of the expression on a pure state.
pub fn bell_value(s: &PureState, sc: &DichotomicScenario) -> Result<f64> {
    if s.n() != sc.n {
        return domain(format!("state has {} qubits, scenario {} parties", s.n(), sc.n));
    }
    let mut total = 0.0;
    for t in &sc.terms {
        for (c, x, z) in expand_term(t) {
            total += *c.numer() as f64 / *c.denom() as f64 * pauli_expectation(s.amps(), x, z).re;
        }
    }
    Ok(total)
}

/// Exact value on a hypergraph state for X/Z settings: each correlator is an
/// integer sum over basis strings divided by 2^n.
pub fn bell_value_exact(h: &Hypergraph, sc: &DichotomicScenario) -> Result<Q> {
    let n = h.n();
    if n != sc.n {
        return domain("hypergraph and scenario sizes differ");
    }
    budget("qubits for exact Bell evaluation", n as u64, 16)?;
    let f: Vec<u8> = (0..1u64 << n).map(|x| h.phase_bit(x)).collect();
    let mut total = Q::zero();
    for t in &sc.terms {
        if t.settings().iter().any(|s| *s == Some(Pauli::Y)) {
            return domain("exact path supports X and Z settings only");
        }
        for (c, x, z) in expand_term(t) {
            let sum: i64 = (0..f.len())
                .map(|k| {
                    let par = f[k] ^ f[k ^ x] ^ ((k & z).count_ones() & 1) as u8;
                    if par == 1 { -1 } else { 1 }
                })
                .sum();
            total += c * Q::new(sum, 1i64 << n);
        }
    }
    Ok(total)
}

struct Compiled {
    bits: usize,
    denom: i64,
    corr: Vec<(i64, u64)>,
    prob: Vec<(i64, u64, u64)>,
}

fn lcm(a: i64, b: i64) -> i64 {
    a / num_integer::gcd(a, b) * b
}

fn compile(sc: &DichotomicScenario) -> Result<Compiled> {
    let mut slot = vec![[usize::MAX; 3]; sc.n];
    let mut bits = 0;
    for t in &sc.terms {
        for (j, s) in t.settings().iter().enumerate() {
            if let Some(p) = s {
                let k = *p as usize;
                if slot[j][k] == usize::MAX {
                    slot[j][k] = bits;
                    bits += 1;
                }
            }
        }
    }
    let denom = sc.terms.iter().fold(1i64, |d, t| lcm(d, *t.coef().denom()));
    let mut corr = Vec::new();
    let mut prob = Vec::new();
    for t in &sc.terms {
        let num = *t.coef().numer() * (denom / *t.coef().denom());
        let mut mask = 0u64;
        let mut pat = 0u64;
        for (j, s) in t.settings().iter().enumerate() {
            if let Some(p) = s {
                let b = slot[j][*p as usize];
                mask |= 1 << b;
                if let Term::Prob { outcomes, .. } = t {
                    if outcomes[j] < 0 {
                        pat |= 1 << b;
                    }
                }
            }
        }
        match t {
            Term::Corr { .. } => corr.push((num, mask)),
            Term::Prob { .. } => prob.push((num, mask, pat)),
        }
    }
    Ok(Compiled { bits, denom, corr, prob })
}

fn eval_strategy(c: &Compiled, s: u64) -> i64 {
    let mut v = 0;
    for &(k, m) in &c.corr {
        v += if (s & m).count_ones() & 1 == 1 { -k } else { k };
    }
    for &(k, m, p) in &c.prob {
        if s & m == p {
            v += k;
        }
    }
    v
}

fn extremum(sc: &DichotomicScenario, maximize: bool) -> Result<Q> {
    let c = compile(sc)?;
    budget("deterministic strategy bits", c.bits as u64, 26)?;
    let work = (1u64 << c.bits).saturating_mul((c.corr.len() + c.prob.len()).max(1) as u64);
    budget("strategy-term evaluations", work, 1 << 34)?;
    let pick = |a: i64, b: i64| if maximize { a.max(b) } else { a.min(b) };
    let init = if maximize { i64::MIN } else { i64::MAX };
    let best = (0..1u64 << c.bits)
        .into_par_iter()
        .map(|s| eval_strategy(&c, s))
        .reduce(|| init, pick);
    Ok(Q::new(best, c.denom))
}

/// Maximum over deterministic local strategies (one ±1 value per party per setting).
pub fn lhv_max(sc: &DichotomicScenario) -> Result<Q> {
    extremum(sc, true)
}

pub fn lhv_min(sc: &DichotomicScenario) -> Result<Q> {
    extremum(sc, false)
}

/// Maximum over strategies local across some cut {i} | rest, for three parties.
/// The pair may answer any deterministic function of its joint settings.
pub fn bilocal_max(sc: &DichotomicScenario) -> Result<Q> {
    if sc.n != 3 {
        return domain("bipartition-local enumeration is implemented for three parties");
    }
    if sc.terms.iter().any(|t| t.settings().iter().any(|s| s.is_none())) {
        return domain("bipartition-local enumeration needs every party measured in every term");
    }
    let denom = sc.terms.iter().fold(1i64, |d, t| lcm(d, *t.coef().denom()));
    let mut best = i64::MIN;
    for single in 0..3 {
        let pair: Vec<usize> = (0..3).filter(|&j| j != single).collect();
        // joint setting (s_a, s_b) indexes 9 slots; each slot holds two outcome bits
        let mut joint_used = [false; 9];
        let mut single_used = [false; 3];
        for t in &sc.terms {
            let st = t.settings();
            single_used[st[single].unwrap() as usize] = true;
            joint_used[st[pair[0]].unwrap() as usize * 3 + st[pair[1]].unwrap() as usize] = true;
        }
        let js: Vec<usize> = (0..9).filter(|&k| joint_used[k]).collect();
        let ss: Vec<usize> = (0..3).filter(|&k| single_used[k]).collect();
        for sv in 0u32..1 << ss.len() {
            for jv in 0u64..1 << (2 * js.len()) {
                let mut v = 0i64;
                for t in &sc.terms {
                    let st = t.settings();
                    let a = ss.iter().position(|&k| k == st[single].unwrap() as usize).unwrap();
                    let out_s: i64 = if sv >> a & 1 == 1 { -1 } else { 1 };
                    let key = st[pair[0]].unwrap() as usize * 3 + st[pair[1]].unwrap() as usize;
                    let b = js.iter().position(|&k| k == key).unwrap();
                    let o0: i64 = if jv >> (2 * b) & 1 == 1 { -1 } else { 1 };
                    let o1: i64 = if jv >> (2 * b + 1) & 1 == 1 { -1 } else { 1 };
                    let mut out = [0i64; 3];
                    out[single] = out_s;
                    out[pair[0]] = o0;
                    out[pair[1]] = o1;
                    let k = *t.coef().numer() * (denom / *t.coef().denom());
                    match t {
                        Term::Corr { .. } => v += k * out.iter().product::<i64>(),
                        Term::Prob { outcomes, .. } => {
                            if (0..3).all(|j| out[j] == outcomes[j] as i64) {
                                v += k
                            }
                        }
                    }
                }
                best = best.max(v);
            }
        }
    }
    Ok(Q::new(best, denom))
}

/// Sum of ±1-valued symbols products: Σ c_t Π_{s ∈ t} v_s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedExpression {
    pub symbols: Vec<String>,
    pub terms: Vec<(Q, Vec<usize>)>,
}

impl SignedExpression {
    pub fn new(symbols: Vec<String>, terms: Vec<(Q, Vec<usize>)>) -> Result<Self> {
        for (_, t) in &terms {
            if let Some(&s) = t.iter().find(|&&s| s >= symbols.len()) {
                return domain(format!("term references unknown symbol index {s}"));
            }
        }
        Ok(SignedExpression { symbols, terms })
    }

    fn term_masks(&self) -> Vec<Vec<u64>> {
        let words = self.symbols.len().div_ceil(64).max(1);
        self.terms
            .iter()
            .map(|(_, t)| {
                let mut m = vec![0u64; words];
                for &s in t {
                    m[s / 64] ^= 1 << (s % 64);
                }
                m
            })
            .collect()
    }
}

fn common_scale(terms: &[(Q, Vec<usize>)]) -> (i64, Vec<i64>) {
    let denom = terms.iter().fold(1i64, |d, (c, _)| lcm(d, *c.denom()));
    (denom, terms.iter().map(|(c, _)| *c.numer() * (denom / *c.denom())).collect())
}

/// Maximum over all ±1 assignments of the symbols.
///
/// With at most 22 symbols every assignment is enumerated. Otherwise the sign
/// patterns reachable on the terms are enumerated instead: they form the GF(2)
/// span of the symbols' term-incidence vectors, whose dimension is at most the
/// number of terms.
pub fn noncontextual_max(e: &SignedExpression) -> Result<Q> {
    let (denom, coefs) = common_scale(&e.terms);
    if e.symbols.len() <= 22 {
        let masks: Vec<u64> = e.term_masks().into_iter().map(|m| m[0]).collect();
        let best = (0..1u64 << e.symbols.len())
            .into_par_iter()
            .map(|v| {
                masks.iter().zip(&coefs).map(|(m, c)| if (v & m).count_ones() & 1 == 1 { -c } else { *c }).sum::<i64>()
            })
            .max()
            .unwrap_or(0);
        return Ok(Q::new(best, denom));
    }
    noncontextual_max_by_image(e)
}

pub fn noncontextual_max_by_image(e: &SignedExpression) -> Result<Q> {
    let t = e.terms.len();
    budget("terms for sign-pattern enumeration", t as u64, 128)?;
    let (denom, coefs) = common_scale(&e.terms);
    let tm = e.term_masks();
    let mut basis: Vec<u128> = Vec::new();
    for s in 0..e.symbols.len() {
        let mut col: u128 = 0;
        for (k, m) in tm.iter().enumerate() {
            if m[s / 64] >> (s % 64) & 1 == 1 {
                col |= 1 << k;
            }
        }
        for b in &basis {
            col = col.min(col ^ b);
        }
        if col != 0 {
            basis.push(col);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    budget("rank of the sign-pattern space", basis.len() as u64, 26)?;
    let best = (0..1u64 << basis.len())
        .into_par_iter()
        .map(|sel| {
            let pat = basis.iter().enumerate().filter(|(j, _)| sel >> j & 1 == 1).fold(0u128, |a, (_, b)| a ^ b);
            coefs.iter().enumerate().map(|(k, c)| if pat >> k & 1 == 1 { -c } else { *c }).sum::<i64>()
        })
        .max()
        .unwrap_or(0);
    Ok(Q::new(best, denom))
}

/// Σ_i X_i Π_{e ∈ E(i)} CZ_{e\i} - Π_i X_i for a k-uniform complete hypergraph
/// meeting the Mermin condition, with its noncontextual symbol expression.
pub fn mermin_operator(h: &Hypergraph) -> Result<(OperatorSum, SignedExpression)> {
    let n = h.n();
    let k = h.max_cardinality();
    if k < 2 || *h != make_complete(n, &[k])? {
        return domain("Mermin operator needs a k-uniform complete hypergraph");
    }
    if !mermin_condition(n, k)? {
        return domain(format!("Mermin condition fails for n={n}, k={k}"));
    }
    let mut symbols: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    let mut index = std::collections::BTreeMap::new();
    let mut op = OperatorSum::default();
    let mut terms = Vec::new();
    for i in 1..=n {
        let (_, adj) = incidence(h, i)?;
        let mut f = OperatorExpr::single(crate::simkit::Factor::Pauli(Pauli::X, i));
        let mut syms = vec![i - 1];
        for a in adj {
            f.factors.push(crate::simkit::Factor::CZ(a));
            let id = *index.entry(a).or_insert_with(|| {
                let vs = vertices_of(a);
                let name = if vs.len() == 1 {
                    format!("Z{}", vs[0])
                } else {
                    format!("CZ{}", vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
                };
                symbols.push(name);
                symbols.len() - 1
            });
            syms.push(id);
        }
        op.push(1.0, f);
        terms.push((Q::one(), syms));
    }
    let all = ((1u64 << n) - 1) as u32;
    op.push(-1.0, OperatorExpr::pauli_string(all, 0));
    terms.push((-Q::one(), (0..n).collect()));
    Ok((op, SignedExpression::new(symbols, terms)?))
}

/// Zero-probability patterns of |K_n^n>: one party measures X, the rest Z, and
/// the outcomes contradict K_i = +1. Each pattern is checked on the state.
pub fn hardy_forbidden(n: usize) -> Result<Vec<(Vec<i8>, Vec<Pauli>)>> {
    if n < 3 {
        return domain("Hardy patterns need n >= 3");
    }
    budget("qubits for Hardy verification", n as u64, 12)?;
    let state = crate::simkit::build_state(&make_complete(n, &[n])?)?;
    let mut out = Vec::new();
    for i in 0..n {
        let settings: Vec<Pauli> = (0..n).map(|j| if j == i { Pauli::X } else { Pauli::Z }).collect();
        for bits in 0u32..1 << n {
            let outcomes: Vec<i8> = (0..n).map(|j| if bits >> j & 1 == 1 { -1 } else { 1 }).collect();
            let all_minus = (0..n).filter(|&j| j != i).all(|j| outcomes[j] == -1);
            let k_eigen = outcomes[i] * if all_minus { -1 } else { 1 };
            if k_eigen == -1 {
                let t = Term::Prob {
                    coef: Q::one(),
                    settings: settings.iter().map(|&p| Some(p)).collect(),
                    outcomes: outcomes.clone(),
                };
                let p = bell_value(&state, &DichotomicScenario::new(n, vec![t])?)?;
                if p.abs() > 1e-12 {
                    return domain(format!("pattern {outcomes:?} has probability {p}"));
                }
                out.push((outcomes, settings.clone()));
            }
        }
    }
    Ok(out)
}

/// B_3: forbidden XZZ-type probabilities minus the three XXX probabilities with one +.
pub fn b3_scenario() -> DichotomicScenario {
    let mut terms = Vec::new();
    for (pats, set) in [
        (["+--", "-++", "-+-", "--+"], "XZZ"),
        (["-+-", "+-+", "+--", "--+"], "ZXZ"),
        (["--+", "++-", "+--", "-+-"], "ZZX"),
    ] {
        for p in pats {
            terms.push(DichotomicScenario::prob(Q::one(), p, set));
        }
    }
    for p in ["+--", "-+-", "--+"] {
        terms.push(DichotomicScenario::prob(-Q::one(), p, "XXX"));
    }
    DichotomicScenario { n: 3, terms }
}

fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = usize> {
    (0usize..1 << n).filter(move |m| m.count_ones() as usize == k)
}

/// B_n = -Σ_{i=0}^{⌊n/2⌋} (-1)^i Σ_{|S|=2i} X_S Z_{rest}, with the all-Z term counted once.
pub fn bn_operator(n: usize) -> Result<(DichotomicScenario, OperatorSum)> {
    if n < 3 {
        return domain("B_n needs n >= 3");
    }
    let mut terms = Vec::new();
    for i in 0..=n / 2 {
        let c = if i % 2 == 0 { -Q::one() } else { Q::one() };
        for s in subsets_of_size(n, 2 * i) {
            let st = (0..n).map(|j| Some(if s >> j & 1 == 1 { Pauli::X } else { Pauli::Z })).collect();
            terms.push(Term::Corr { coef: c, settings: st });
        }
    }
    let sc = DichotomicScenario::new(n, terms)?;
    let op = sc.observable();
    Ok((sc, op))
}

/// B_n^P = ((P + iZ)^{⊗n} + (P - iZ)^{⊗n}) / 2 = Σ_{|T| even} (-1)^{|T|/2} P_{rest} Z_T.
pub fn bnp_operator(n: usize, p: Pauli) -> Result<(DichotomicScenario, OperatorSum)> {
    if n < 3 {
        return domain("B_n^P needs n >= 3");
    }
    if p == Pauli::Z {
        return domain("B_n^P is defined for P = X or Y");
    }
    let mut terms = Vec::new();
    for t in (0usize..1 << n).filter(|t| t.count_ones() % 2 == 0) {
        let c = if t.count_ones() % 4 == 0 { Q::one() } else { -Q::one() };
        let st = (0..n).map(|j| Some(if t >> j & 1 == 1 { Pauli::Z } else { p })).collect();
        terms.push(Term::Corr { coef: c, settings: st });
    }
    let sc = DichotomicScenario::new(n, terms)?;
    let op = sc.observable();
    Ok((sc, op))
}

/// Checks that |K_n^{ks}> is stabilized by P^{⊗n}, as B_n^P requires.
pub fn bnp_precondition(n: usize, ks: &[usize], p: Pauli) -> Result<()> {
    let v = palindrome(n, ks)?;
    let ok = match p {
        Pauli::X => v.x,
        Pauli::Y => v.y == Some(true),
        Pauli::Z => false,
    };
    if !ok {
        return domain(format!("state with layers {ks:?} on {n} qubits is not stabilized by {p:?}^n"));
    }
    Ok(())
}

/// ((1 + iZ)^{⊗n} + (1 - iZ)^{⊗n}) / 2 = Σ_{|T| even} (-1)^{|T|/2} Z_T, the Z-only form.
pub fn bn_z_form(n: usize) -> Result<DichotomicScenario> {
    if n < 1 {
        return domain("need at least one party");
    }
    let terms = (0usize..1 << n)
        .filter(|t| t.count_ones() % 2 == 0)
        .map(|t| Term::Corr {
            coef: if t.count_ones() % 4 == 0 { Q::one() } else { -Q::one() },
            settings: (0..n).map(|j| (t >> j & 1 == 1).then_some(Pauli::Z)).collect(),
        })
        .collect();
    DichotomicScenario::new(n, terms)
}

/// |value| helper for violation margins.
pub fn margin(quantum: f64, classical: Q) -> f64 {
    quantum - *classical.numer() as f64 / *classical.denom() as f64
}

pub fn q_abs(q: Q) -> Q {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entangle::gmn;
    use crate::simkit::{build_state, expectation_sum, reduced, measure_pauli};
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> Q {
        Q::new(a, b)
    }

    fn k(n: usize, ks: &[usize]) -> Hypergraph {
        make_complete(n, ks).unwrap()
    }

    #[test]
    fn b3_values() {
        let sc = b3_scenario();
        assert_eq!(bell_value_exact(&k(3, &[3]), &sc).unwrap(), q(-3, 16));
        let v = bell_value(&build_state(&k(3, &[3])).unwrap(), &sc).unwrap();
        assert!((v + 3.0 / 16.0).abs() < 1e-12);
        assert_eq!(lhv_min(&sc).unwrap(), Q::zero());
        assert_eq!(lhv_max(&sc.negated()).unwrap(), Q::zero());
    }

    #[test]
    fn xxx_probability() {
        let sc = DichotomicScenario::new(3, vec![DichotomicScenario::prob(Q::one(), "+--", "XXX")]).unwrap();
        assert_eq!(bell_value_exact(&k(3, &[3]), &sc).unwrap(), q(1, 16));
        // independent route: sequential projective measurements
        let mut s = build_state(&k(3, &[3])).unwrap();
        let mut p = 1.0;
        for (site, o) in [(1, 1), (2, -1), (3, -1)] {
            let (pr, post) = measure_pauli(&s, site, Pauli::X, o).unwrap();
            p *= pr;
            s = post.unwrap();
        }
        assert!((p - bell_value(&build_state(&k(3, &[3])).unwrap(), &sc).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hardy_patterns() {
        let pats = hardy_forbidden(3).unwrap();
        assert_eq!(pats.len(), 12);
        let has = |o: &str, s: &str| {
            let o = parse_outcomes(o);
            let s: Vec<Pauli> = parse_settings(s).into_iter().map(|p| p.unwrap()).collect();
            pats.iter().any(|(a, b)| *a == o && *b == s)
        };
        assert!(has("+--", "XZZ") && has("-+-", "ZXZ") && has("--+", "ZZX"));
        assert!(has("-++", "XZZ") && has("-+-", "XZZ") && has("--+", "XZZ"));
        for t in b3_scenario().terms.iter().filter(|t| t.coef() > Q::zero()) {
            if let Term::Prob { settings, outcomes, .. } = t {
                let st: Vec<Pauli> = settings.iter().map(|p| p.unwrap()).collect();
                assert!(pats.iter().any(|(a, b)| a == outcomes && *b == st));
            }
        }
        assert_eq!(hardy_forbidden(4).unwrap().len(), 4 * 8);
        assert!(hardy_forbidden(2).is_err());
    }

    #[test]
    fn mermin_k3() {
        let (op, expr) = mermin_operator(&k(3, &[2])).unwrap();
        let s = build_state(&k(3, &[2])).unwrap();
        assert!((expectation_sum(&s, &op).unwrap().re - 4.0).abs() < 1e-12);
        assert_eq!(expr.symbols.len(), 6);
        assert_eq!(noncontextual_max(&expr).unwrap(), q(2, 1));
        assert_eq!(noncontextual_max_by_image(&expr).unwrap(), q(2, 1));
        assert!(mermin_operator(&k(3, &[3])).is_err());
        assert!(mermin_operator(&Hypergraph::from_edges(3, [[1, 2]]).unwrap()).is_err());
    }

    #[test]
    fn mermin_k74() {
        let h = k(7, &[4]);
        let (op, expr) = mermin_operator(&h).unwrap();
        let s = build_state(&h).unwrap();
        let qv = expectation_sum(&s, &op).unwrap().re;
        assert!((qv - 8.0).abs() < 1e-10);
        assert_eq!(expr.symbols.len(), 42);
        let nc = noncontextual_max(&expr).unwrap();
        assert_eq!(nc, q(6, 1));
    }

    #[test]
    fn noncontextual_small_cases() {
        let e = SignedExpression::new(vec!["A".into()], vec![(Q::one(), vec![0])]).unwrap();
        assert_eq!(noncontextual_max(&e).unwrap(), Q::one());
        assert!(SignedExpression::new(vec![], vec![(Q::one(), vec![0])]).is_err());
    }

    #[test]
    fn bn_values() {
        for n in [5usize, 6, 7] {
            let (sc, op) = bn_operator(n).unwrap();
            let h = k(n, &[3]);
            let exact = bell_value_exact(&h, &sc).unwrap();
            let s = build_state(&h).unwrap();
            assert!((expectation_sum(&s, &op).unwrap().re - bell_value(&s, &sc).unwrap()).abs() < 1e-10);
            let want = if n % 2 == 1 { q((1 << (n - 2)) * 2 - 1, 2) } else { q(1 << (n - 2), 1) };
            assert_eq!(exact, want, "n={n}");
            if n <= 6 {
                assert_eq!(lhv_max(&sc).unwrap(), q(1 << (n / 2), 1));
            }
        }
    }

    #[test]
    fn bnp_values() {
        let (sc, _) = bnp_operator(6, Pauli::X).unwrap();
        bnp_precondition(6, &[3], Pauli::X).unwrap();
        let v = bell_value(&build_state(&k(6, &[3])).unwrap(), &sc).unwrap();
        assert!((v - 16.0).abs() < 1e-9);
        assert_eq!(lhv_max(&sc).unwrap(), q(8, 1));
        bnp_precondition(8, &[3], Pauli::Y).unwrap();
        let (sy, _) = bnp_operator(8, Pauli::Y).unwrap();
        let v = bell_value(&build_state(&k(8, &[3])).unwrap(), &sy).unwrap();
        assert!((v - 64.0).abs() < 1e-9);
        assert!(bnp_precondition(5, &[3], Pauli::X).is_err());
        assert_eq!(bnp_operator(4, Pauli::X).unwrap().0.terms.len(), 8);
    }

    #[test]
    fn z_form_only_uses_z() {
        let z = bn_z_form(6).unwrap();
        assert!(z.terms.iter().all(|t| t.settings().iter().all(|s| s.is_none() || *s == Some(Pauli::Z))));
        assert_eq!(z.terms.len(), 32);
        // conjugation by √X^- on every qubit maps B_6^X onto the Z form as operators
        let (_, bp) = bnp_operator(6, Pauli::X).unwrap();
        let s = build_state(&k(6, &[3])).unwrap();
        let mut u = OperatorExpr::identity();
        for j in 1..=6 {
            u.factors.push(crate::simkit::Factor::SqrtPauli(Pauli::X, crate::simkit::Sign::Plus, j));
        }
        let t = crate::simkit::apply(&u, &s).unwrap();
        let direct = expectation_sum(&s, &bp).unwrap().re;
        let transformed = bell_value(&t, &z).unwrap();
        assert!((direct - 16.0).abs() < 1e-9);
        assert!((transformed - direct).abs() > 1.0);
    }

    #[test]
    fn bilocal_b3() {
        let sc = b3_scenario().negated();
        let b = bilocal_max(&sc).unwrap();
        assert!(b >= lhv_max(&sc).unwrap());
    }

    #[test]
    fn particle_loss_keeps_gmn() {
        let s = build_state(&k(8, &[3])).unwrap();
        for lost in [0b1000_0000u32, 0b1100_0000] {
            let keep = 0xff & !lost;
            let r = reduced(&s, keep).unwrap();
            assert!(gmn(&r).unwrap() > 1e-6);
        }
    }

    fn arb_scenario() -> impl Strategy<Value = DichotomicScenario> {
        let term = (
            -3i64..=3,
            proptest::collection::vec(0u8..4, 3),
            proptest::collection::vec(any::<bool>(), 3),
            any::<bool>(),
        )
            .prop_map(|(c, st, oc, is_prob)| {
                let settings: Vec<Option<Pauli>> =
                    st.iter().map(|s| [None, Some(Pauli::X), Some(Pauli::Z), Some(Pauli::Y)][*s as usize]).collect();
                if is_prob {
                    let outcomes = settings.iter().zip(&oc).map(|(s, o)| if s.is_none() { 0 } else if *o { 1 } else { -1 }).collect();
                    Term::Prob { coef: Q::from_integer(c), settings, outcomes }
                } else {
                    Term::Corr { coef: Q::from_integer(c), settings }
                }
            });
        proptest::collection::vec(term, 1..8).prop_map(|terms| DichotomicScenario::new(3, terms).unwrap())
    }

    proptest! {
        #[test]
        fn lhv_symmetries(sc in arb_scenario(), flip_party in 0usize..3) {
            let base = lhv_max(&sc).unwrap();
            let rotated = DichotomicScenario::new(3, sc.terms.iter().map(|t| match t.clone() {
                Term::Corr { coef, mut settings } => { settings.rotate_left(1); Term::Corr { coef, settings } }
                Term::Prob { coef, mut settings, mut outcomes } => {
                    settings.rotate_left(1); outcomes.rotate_left(1); Term::Prob { coef, settings, outcomes }
                }
            }).collect()).unwrap();
            prop_assert_eq!(lhv_max(&rotated).unwrap(), base);
            // flipping every outcome of one party (sign of correlators containing it)
            let flipped = DichotomicScenario::new(3, sc.terms.iter().map(|t| match t.clone() {
                Term::Corr { coef, settings } => {
                    let c = if settings[flip_party].is_some() { -coef } else { coef };
                    Term::Corr { coef: c, settings }
                }
                Term::Prob { coef, settings, mut outcomes } => {
                    outcomes[flip_party] = -outcomes[flip_party];
                    Term::Prob { coef, settings, outcomes }
                }
            }).collect()).unwrap();
            prop_assert_eq!(lhv_max(&flipped).unwrap(), base);
        }

        #[test]
        fn exact_and_float_agree(ms in proptest::collection::vec(1u32..16, 0..6), sc in arb_scenario()) {
            let h = Hypergraph::from_masks(4, ms).unwrap();
            let sc4 = DichotomicScenario::new(4, sc.terms.iter().filter(|t| t.settings().iter().all(|s| *s != Some(Pauli::Y))).map(|t| match t.clone() {
                Term::Corr { coef, mut settings } => { settings.push(Some(Pauli::X)); Term::Corr { coef, settings } }
                Term::Prob { coef, mut settings, mut outcomes } => {
                    settings.push(Some(Pauli::Z)); outcomes.push(-1); Term::Prob { coef, settings, outcomes }
                }
            }).collect()).unwrap();
            let e = bell_value_exact(&h, &sc4).unwrap();
            let f = bell_value(&build_state(&h).unwrap(), &sc4).unwrap();
            prop_assert!((f - *e.numer() as f64 / *e.denom() as f64).abs() < 1e-12);
        }
    }
}
