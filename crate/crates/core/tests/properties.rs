use std::sync::Arc;

use fundist_core::commutant::{commutant_slice, commutant_slice_enforcing, commutes, is_saturated};
use fundist_core::finset::{decode_tuple, encode_tuple, projections, superpose, OpTable};
use fundist_core::rig::{matrix_multiply, opposite, registry, validate_rig, Matrix};
use fundist_core::theory::{ConcreteTheory, Relation};
use proptest::prelude::*;

fn op_strategy(carrier: usize, arity: usize) -> impl Strategy<Value = OpTable> {
    proptest::collection::vec(0..carrier as u8, carrier.pow(arity as u32))
        .prop_map(move |t| OpTable::new(carrier, arity, t).unwrap())
}

fn gens_strategy(carrier: usize) -> impl Strategy<Value = Vec<OpTable>> {
    proptest::collection::vec(
        (0usize..=2).prop_flat_map(move |k| op_strategy(carrier, k)),
        0..=3,
    )
}

fn subset(left: &[OpTable], right: &fundist_core::theory::TheorySlice) -> bool {
    left.iter().all(|op| right.contains(op))
}

proptest! {
    #[test]
    fn encode_decode_roundtrip(carrier in 1usize..=7, tuple in proptest::collection::vec(0u8..7, 0..=5)) {
        let tuple: Vec<u8> = tuple.into_iter().map(|x| x % carrier as u8).collect();
        let idx = encode_tuple(carrier, &tuple).unwrap();
        prop_assert_eq!(decode_tuple(carrier, tuple.len(), idx).unwrap(), tuple);
    }

    #[test]
    fn superposition_is_associative(
        outer in op_strategy(2, 2),
        mid in proptest::collection::vec(op_strategy(2, 2), 2),
        inner in proptest::collection::vec(op_strategy(2, 3), 2),
    ) {
        let left = superpose(&superpose(&outer, &mid).unwrap(), &inner).unwrap();
        let mid_inner: Vec<OpTable> = mid.iter().map(|m| superpose(m, &inner).unwrap()).collect();
        let right = superpose(&outer, &mid_inner).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn projections_are_superposition_units(op in op_strategy(3, 2)) {
        let ps = projections(3, 2).unwrap();
        prop_assert_eq!(superpose(&op, &ps).unwrap(), op.clone());
        for (i, p) in ps.iter().enumerate() {
            let inners = vec![op.clone(), OpTable::constant(3, 2, 0).unwrap()];
            let picked = superpose(p, &inners).unwrap();
            prop_assert_eq!(&picked, &inners[i]);
        }
    }

    #[test]
    fn closure_is_a_clone(gens in gens_strategy(2)) {
        let t = ConcreteTheory::closure(2, gens.clone()).unwrap();
        let s2 = t.slice(2).unwrap();
        for p in projections(2, 2).unwrap() {
            prop_assert!(s2.contains(&p));
        }
        for g in gens.iter().filter(|g| g.arity() > 0) {
            let k = g.arity();
            let members = s2.ops();
            let total = members.len().pow(k as u32);
            for code in 0..total.min(4096) {
                let mut c = code;
                let inners: Vec<OpTable> = (0..k)
                    .map(|_| { let m = members[c % members.len()].clone(); c /= members.len(); m })
                    .collect();
                prop_assert!(s2.contains(&superpose(g, &inners).unwrap()));
            }
        }
    }

    #[test]
    fn galois_monotonicity(small in gens_strategy(2), extra in gens_strategy(2), n in 0usize..=2) {
        let mut large = small.clone();
        large.extend(extra);
        let c_small = commutant_slice_enforcing(2, &small, n).unwrap();
        let c_large = commutant_slice_enforcing(2, &large, n).unwrap();
        prop_assert!(subset(c_large.ops(), &c_small));
    }

    #[test]
    fn closure_has_same_commutant(gens in gens_strategy(2), n in 0usize..=2) {
        // Enforcing generators or the whole generated clone gives the same commutant.
        let t = ConcreteTheory::closure(2, gens.clone()).unwrap();
        let mut all = Vec::new();
        for k in 0..=2 {
            all.extend(t.slice(k).unwrap().ops().iter().cloned());
        }
        prop_assert_eq!(
            commutant_slice_enforcing(2, &gens, n).unwrap(),
            commutant_slice_enforcing(2, &all, n).unwrap()
        );
    }

    #[test]
    fn commutation_is_symmetric(a in gens_strategy(3), b in gens_strategy(3)) {
        let ta = ConcreteTheory::closure(3, a).unwrap();
        let tb = ConcreteTheory::closure(3, b).unwrap();
        prop_assert_eq!(commutes(&ta, &tb).unwrap().holds, commutes(&tb, &ta).unwrap().holds);
    }

    #[test]
    fn matrix_multiplication_is_associative(
        which in 0usize..6,
        a in proptest::collection::vec(0u8..4, 6),
        b in proptest::collection::vec(0u8..4, 6),
        c in proptest::collection::vec(0u8..4, 4),
    ) {
        let rig = registry()[which].rig.clone();
        let s = rig.size() as u8;
        let fit = |v: Vec<u8>| v.into_iter().map(|x| x % s).collect::<Vec<_>>();
        let a = Matrix::new(&rig, 3, 2, fit(a)).unwrap();
        let b = Matrix::new(&rig, 2, 3, fit(b)).unwrap();
        let c = Matrix::new(&rig, 2, 2, fit(c)).unwrap();
        let left = matrix_multiply(&matrix_multiply(&c, &b).unwrap(), &a).unwrap();
        let right = matrix_multiply(&c, &matrix_multiply(&b, &a).unwrap()).unwrap();
        prop_assert_eq!(left.entries(), right.entries());
        let id = Matrix::identity(&rig, 2);
        let unit = matrix_multiply(&id, &c).unwrap();
        prop_assert_eq!(unit.entries(), c.entries());
    }
}

fn shipped_theories() -> Vec<Arc<ConcreteTheory>> {
    let mut out = Vec::new();
    for entry in registry() {
        let mat = Arc::new(ConcreteTheory::mat(&entry.rig).unwrap());
        out.push(Arc::new(
            ConcreteTheory::affine_core(Arc::clone(&mat)).unwrap(),
        ));
        out.push(mat);
        if entry.expect_ring || entry.rig.name() == "bool2" {
            out.push(Arc::new(ConcreteTheory::pointed_mat(&entry.rig).unwrap()));
        }
    }
    for carrier in 2..=3 {
        out.push(Arc::new(ConcreteTheory::initial(carrier).unwrap()));
        out.push(Arc::new(ConcreteTheory::full(carrier).unwrap()));
    }
    out
}

#[test]
fn galois_monotonicity_on_shipped_pairs() {
    let theories = shipped_theories();
    let mut checked = 0;
    for a in &theories {
        for b in &theories {
            if a.carrier() != b.carrier() {
                continue;
            }
            // Generators of `a` inside the clone `b` make `a` a subtheory of `b`.
            let included = a
                .generators()
                .iter()
                .all(|g| b.slice(g.arity()).map(|s| s.contains(g)).unwrap_or(false));
            if !included {
                continue;
            }
            let max = a.max_arity().min(b.max_arity()).min(2);
            for n in 0..=max {
                let ca = commutant_slice(a, n).unwrap();
                let cb = commutant_slice(b, n).unwrap();
                assert!(
                    subset(cb.ops(), &ca),
                    "{} ⊆ {} but commutants not reversed at arity {n}",
                    a.provenance(),
                    b.provenance()
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 20, "only {checked} comparisons");
}

#[test]
fn theories_sit_inside_their_double_commutant() {
    for t in shipped_theories() {
        let k = t.max_arity().min(2);
        let v = is_saturated(&t, k).unwrap();
        for row in &v.arities {
            assert!(
                matches!(row.relation, Relation::Equal | Relation::LeftSubset),
                "{} escapes its double commutant",
                t.provenance()
            );
        }
    }
}

#[test]
fn shipped_pairs_commute_symmetrically() {
    let theories = shipped_theories();
    for a in &theories {
        for b in &theories {
            if a.carrier() == b.carrier() {
                assert_eq!(commutes(a, b).unwrap().holds, commutes(b, a).unwrap().holds);
            }
        }
    }
}

#[test]
fn opposite_is_an_involution_on_registry() {
    for entry in registry() {
        let op = opposite(&entry.rig);
        assert_eq!(opposite(&op).mul_table(), entry.rig.mul_table());
        assert!(validate_rig(&op).passed());
    }
}
