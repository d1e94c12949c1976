//! Graphical rewrite rules for hypergraph states.
//!
//! Each rule returns the new hypergraph together with the exact global sign, so
//! that `gate · |H> = sign · |result>`.

use std::collections::BTreeMap;

use crate::error::{domain, Result};
use crate::hgraph::{drop_bit, incidence, Edge, Hypergraph};
use crate::simkit::{Factor, OperatorExpr, Pauli, Sign};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteResult {
    pub h: Hypergraph,
    pub sign: i8,
}

impl RewriteResult {
    fn new(h: Hypergraph, sign: i8) -> Self {
        RewriteResult { h, sign }
    }
}

/// Toggles every edge whose count in `items` is odd. Returns the number of empty-set items.
fn toggle_parity(h: &mut Hypergraph, items: impl IntoIterator<Item = Edge>) -> usize {
    let mut count: BTreeMap<Edge, usize> = BTreeMap::new();
    for e in items {
        *count.entry(e).or_default() += 1;
    }
    let empties = count.remove(&0).unwrap_or(0);
    for (e, c) in count {
        if c % 2 == 1 {
            h.toggle(e);
        }
    }
    empties
}

pub fn rw_z(h: &Hypergraph, i: usize) -> Result<RewriteResult> {
    h.check_vertex(i)?;
    let mut g = h.clone();
    g.toggle(1 << (i - 1));
    Ok(RewriteResult::new(g, 1))
}

pub fn rw_x(h: &Hypergraph, i: usize) -> Result<RewriteResult> {
    let (_, adj) = incidence(h, i)?;
    let mut g = h.clone();
    let empties = toggle_parity(&mut g, adj);
    Ok(RewriteResult::new(g, if empties % 2 == 1 { -1 } else { 1 }))
}

/// `Y_i |H> = -i · sign · |result>`, via Y = -i Z X.
pub fn rw_y(h: &Hypergraph, i: usize) -> Result<RewriteResult> {
    let x = rw_x(h, i)?;
    let z = rw_z(&x.h, i)?;
    Ok(RewriteResult::new(z.h, x.sign * z.sign))
}

pub fn rw_cz(h: &Hypergraph, e: Edge) -> Result<RewriteResult> {
    h.check_subset(e)?;
    let mut g = h.clone();
    g.toggle(e);
    Ok(RewriteResult::new(g, 1))
}

pub fn rw_cknot(h: &Hypergraph, controls: Edge, t: usize) -> Result<RewriteResult> {
    h.check_subset(controls)?;
    h.check_vertex(t)?;
    if controls & 1 << (t - 1) != 0 {
        return domain(format!("target {t} is among the controls"));
    }
    let (_, adj) = incidence(h, t)?;
    let mut g = h.clone();
    toggle_parity(&mut g, adj.into_iter().map(|a| a | controls));
    Ok(RewriteResult::new(g, 1))
}

pub fn rw_epc(h: &Hypergraph, i: usize) -> Result<RewriteResult> {
    let (_, adj) = incidence(h, i)?;
    let mut pairs = Vec::new();
    for (j, &e) in adj.iter().enumerate() {
        for &f in &adj[j + 1..] {
            pairs.push(e | f);
        }
    }
    let mut g = h.clone();
    toggle_parity(&mut g, pairs);
    Ok(RewriteResult::new(g, 1))
}

/// Operator realizing edge-pair complementation exactly (sign +1):
/// √X_i^± · Π_{a ∈ A(i)} √CZ_a^∓, with a scalar ∓i for a = ∅.
pub fn epc_operator(h: &Hypergraph, i: usize, sign: Sign) -> Result<OperatorExpr> {
    let (_, adj) = incidence(h, i)?;
    let mut op = OperatorExpr::single(Factor::SqrtPauli(Pauli::X, sign, i));
    let inner = sign.flip();
    for a in adj {
        if a == 0 {
            let s = if inner == Sign::Plus { 1.0 } else { -1.0 };
            op.factors.push(Factor::Scalar(num_complex::Complex64::new(0.0, s)));
        } else {
            op.factors.push(Factor::SqrtCZ(a, inner));
        }
    }
    Ok(op)
}

/// Z-basis measurement at `i` with outcome bit 0 or 1; the result lives on n-1 vertices.
pub fn rw_measure_z(h: &Hypergraph, i: usize, outcome: u8) -> Result<RewriteResult> {
    h.check_vertex(i)?;
    if outcome > 1 {
        return domain("Z outcome must be 0 or 1");
    }
    if h.n() == 1 {
        return domain("cannot measure away the only vertex");
    }
    let bit = 1 << (i - 1);
    let mut g = Hypergraph::new(h.n() - 1)?;
    let mut items = Vec::new();
    for e in h.edges() {
        if e & bit == 0 {
            items.push(drop_bit(e, i));
        } else if outcome == 1 {
            items.push(drop_bit(e & !bit, i));
        }
    }
    let empties = toggle_parity(&mut g, items);
    Ok(RewriteResult::new(g, if empties % 2 == 1 { -1 } else { 1 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgraph::{make_complete, mask_of};
    use crate::simkit::{apply, build_state, PureState};
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    fn hg(n: usize, es: &[&[usize]]) -> Hypergraph {
        Hypergraph::from_edges(n, es.iter().copied()).unwrap()
    }

    fn check(h: &Hypergraph, op: &OperatorExpr, r: &RewriteResult, phase: C64) {
        let lhs = apply(op, &build_state(h).unwrap()).unwrap();
        let rhs = build_state(&r.h).unwrap().scaled(phase * r.sign as f64);
        assert!(lhs.dist(&rhs) < 1e-12, "{h:?} -> {:?}", r.h);
    }

    /// Projects qubit i onto |outcome> and drops it, rescaled by √2.
    fn z_project(s: &PureState, i: usize, outcome: u8) -> PureState {
        let b = 1usize << (i - 1);
        let amps: Vec<C64> = (0..s.amps().len())
            .filter(|x| (x & b != 0) == (outcome == 1))
            .map(|x| s.amps()[x] * std::f64::consts::SQRT_2)
            .collect();
        PureState::from_amps(s.n() - 1, amps).unwrap()
    }

    #[test]
    fn z_examples() {
        let k = make_complete(3, &[3]).unwrap();
        let r = rw_z(&k, 1).unwrap();
        assert_eq!(r.h, hg(3, &[&[1, 2, 3], &[1]]));
        assert_eq!(rw_z(&r.h, 1).unwrap().h, k);
    }

    #[test]
    fn x_examples() {
        let r = rw_x(&hg(3, &[&[1, 2, 3]]), 1).unwrap();
        assert_eq!(r, RewriteResult::new(hg(3, &[&[1, 2, 3], &[2, 3]]), 1));
        let r = rw_x(&hg(1, &[&[1]]), 1).unwrap();
        assert_eq!(r, RewriteResult::new(hg(1, &[&[1]]), -1));
        check(&hg(1, &[&[1]]), &OperatorExpr::single(Factor::Pauli(Pauli::X, 1)), &r, C64::new(1.0, 0.0));
        let e = hg(3, &[]);
        assert_eq!(rw_x(&e, 2).unwrap().h, e);
    }

    #[test]
    fn y_example_phase() {
        let h = hg(3, &[&[1, 2, 3], &[1]]);
        let r = rw_y(&h, 1).unwrap();
        check(&h, &OperatorExpr::single(Factor::Pauli(Pauli::Y, 1)), &r, C64::new(0.0, -1.0));
    }

    #[test]
    fn cz_matches_sign_pattern() {
        let r = rw_cz(&make_complete(3, &[3]).unwrap(), mask_of(&[2, 3])).unwrap();
        let s = build_state(&r.h).unwrap();
        let neg: Vec<usize> = (0..8).filter(|&x| s.amps()[x].re < 0.0).collect();
        // only x2 = x3 = 1, x1 = 0 is negative
        assert_eq!(neg, vec![0b110]);
        assert!(rw_cz(&r.h, 0).is_err());
    }

    #[test]
    fn cnot_figure_scenario() {
        let h = hg(4, &[&[1, 2], &[1, 3], &[2, 3, 4]]);
        let r = rw_cknot(&h, mask_of(&[4]), 1).unwrap();
        assert_eq!(r.h, hg(4, &[&[1, 2], &[1, 3], &[2, 3, 4], &[2, 4], &[3, 4]]));
        let op = OperatorExpr::single(Factor::CNOT { controls: mask_of(&[4]), target: 1 });
        check(&h, &op, &r, C64::new(1.0, 0.0));
        let lone = hg(3, &[&[2, 3]]);
        assert_eq!(rw_cknot(&lone, mask_of(&[2]), 1).unwrap().h, lone);
        assert!(rw_cknot(&lone, mask_of(&[1, 2]), 1).is_err());
    }

    #[test]
    fn epc_examples() {
        let h = hg(3, &[&[1, 2]]);
        assert_eq!(rw_epc(&h, 1).unwrap().h, h);
        // node 4 adjacent through a 2-edge, a 3-edge and a 2-edge
        let h = hg(5, &[&[1, 4], &[2, 3, 4], &[4, 5]]);
        let r = rw_epc(&h, 4).unwrap();
        assert_eq!(r.h, hg(5, &[&[1, 4], &[2, 3, 4], &[4, 5], &[1, 2, 3], &[1, 5], &[2, 3, 5]]));
        for s in [Sign::Plus, Sign::Minus] {
            check(&h, &epc_operator(&h, 4, s).unwrap(), &r, C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn epc_parity_collapse() {
        // A(1) = {{2},{3},{2,3}}: unions {2,3} twice and {2,3} once -> toggled once
        let h = hg(3, &[&[1, 2], &[1, 3], &[1, 2, 3]]);
        let r = rw_epc(&h, 1).unwrap();
        assert_eq!(r.h, hg(3, &[&[1, 2], &[1, 3], &[1, 2, 3], &[2, 3]]));
        check(&h, &epc_operator(&h, 1, Sign::Plus).unwrap(), &r, C64::new(1.0, 0.0));
    }

    #[test]
    fn measure_examples() {
        let k = make_complete(3, &[3]).unwrap();
        let r0 = rw_measure_z(&k, 3, 0).unwrap();
        assert_eq!((r0.h.n(), r0.h.edge_count()), (2, 0));
        let r1 = rw_measure_z(&k, 3, 1).unwrap();
        assert_eq!(r1.h, hg(2, &[&[1, 2]]));
        let h = hg(3, &[&[1, 2, 3], &[2, 3], &[3], &[1]]);
        for i in 1..=3 {
            for o in 0..2 {
                let r = rw_measure_z(&h, i, o).unwrap();
                let want = build_state(&r.h).unwrap().scaled(C64::new(r.sign as f64, 0.0));
                assert!(z_project(&build_state(&h).unwrap(), i, o).dist(&want) < 1e-12);
            }
        }
    }

    #[test]
    fn measurement_probability_half() {
        let s = build_state(&hg(4, &[&[1, 2, 3], &[2, 4], &[4]])).unwrap();
        for i in 1..=4 {
            let (p, _) = crate::simkit::measure_pauli(&s, i, Pauli::Z, 1).unwrap();
            assert!((p - 0.5).abs() < 1e-12);
        }
    }

    fn arb_hg() -> impl Strategy<Value = Hypergraph> {
        (1usize..=5).prop_flat_map(|n| {
            proptest::collection::vec(1u32..(1 << n), 0..10).prop_map(move |ms| Hypergraph::from_masks(n, ms).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn z_x_cz_oracle(h in arb_hg(), v in 1usize..=5, e in 1u32..32) {
            let i = (v - 1) % h.n() + 1;
            let e = e & ((1 << h.n()) - 1);
            let one = C64::new(1.0, 0.0);
            check(&h, &OperatorExpr::single(Factor::Pauli(Pauli::Z, i)), &rw_z(&h, i).unwrap(), one);
            check(&h, &OperatorExpr::single(Factor::Pauli(Pauli::X, i)), &rw_x(&h, i).unwrap(), one);
            check(&h, &OperatorExpr::single(Factor::Pauli(Pauli::Y, i)), &rw_y(&h, i).unwrap(), C64::new(0.0, -1.0));
            if e != 0 {
                check(&h, &OperatorExpr::single(Factor::CZ(e)), &rw_cz(&h, e).unwrap(), one);
            }
        }

        #[test]
        fn x_preserves_max_cardinality_and_is_involution(h in arb_hg(), v in 1usize..=5) {
            let i = (v - 1) % h.n() + 1;
            let r = rw_x(&h, i).unwrap();
            prop_assert_eq!(r.h.max_cardinality(), h.max_cardinality());
            prop_assert_eq!(rw_x(&r.h, i).unwrap().h, h.clone());
            prop_assert_eq!(rw_cz(&rw_cz(&h, 1).unwrap().h, 1).unwrap().h, h);
        }

        #[test]
        fn cknot_epc_oracle(h in arb_hg(), t in 1usize..=5, c in 1u32..32, s in any::<bool>()) {
            let n = h.n();
            let t = (t - 1) % n + 1;
            let controls = c & ((1 << n) - 1) & !(1 << (t - 1));
            if controls != 0 {
                let op = OperatorExpr::single(Factor::CNOT { controls, target: t });
                check(&h, &op, &rw_cknot(&h, controls, t).unwrap(), C64::new(1.0, 0.0));
            }
            let sign = if s { Sign::Plus } else { Sign::Minus };
            check(&h, &epc_operator(&h, t, sign).unwrap(), &rw_epc(&h, t).unwrap(), C64::new(1.0, 0.0));
        }
    }
}
