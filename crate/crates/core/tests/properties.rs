//! Property tests of the reduction lemmas on random subgroups of normalizers.

use maxab_core::cartan::{build_normalizer, params_for, CMOrder};
use maxab_core::classify::{canonicalize, field_degree, AbelianFieldDesc};
use maxab_core::matgroups::{derived_subgroup, kernel_of_reduction, reduce_group, FiniteMatGroup};
use proptest::prelude::*;

const ORDERS: [(i64, i64); 6] = [(-3, 1), (-4, 1), (-7, 1), (-8, 1), (-11, 1), (-3, 2)];

fn subgroup_of_normalizer(order: (i64, i64), p: u64, n: u32, picks: &[usize]) -> FiniteMatGroup {
    let params = params_for(&CMOrder::new(order.0, order.1), p.pow(n)).unwrap();
    let nrm = build_normalizer(&params).unwrap();
    let elems = nrm.elements();
    let gens: Vec<_> = picks.iter().map(|i| elems[i % elems.len()]).collect();
    FiniteMatGroup::generated_by(&gens, p.pow(n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derived_reduction_and_kernel(
        oi in 0usize..ORDERS.len(),
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        n in 1u32..3,
        picks in prop::collection::vec(any::<usize>(), 1..4),
    ) {
        let g_next = subgroup_of_normalizer(ORDERS[oi], p, n + 1, &picks);
        let params = params_for(&CMOrder::new(ORDERS[oi].0, ORDERS[oi].1), p.pow(n + 1)).unwrap();
        let d_next = derived_subgroup(&g_next).unwrap();
        let g = reduce_group(&g_next, p.pow(n)).unwrap();
        let d = derived_subgroup(&g).unwrap();
        // Reduction maps G'(p^{n+1}) onto G'(p^n).
        prop_assert_eq!(reduce_group(&d_next, p.pow(n)).unwrap(), d.clone());
        // The derived kernel has order 1, p or p^2.
        let k = kernel_of_reduction(&d_next, p.pow(n)).unwrap().order();
        prop_assert!([1, p, p * p].contains(&k));
        prop_assert_eq!(k * d.order(), d_next.order());
        // Commutators of a subgroup of the normalizer land in SL2 and in the Cartan subgroup.
        for x in d_next.elements() {
            prop_assert_eq!(x.det(), 1);
            prop_assert!(params.is_cartan(x));
        }
    }

    #[test]
    fn canonical_form_is_idempotent_and_keeps_degree(
        m in prop::sample::select(vec![1u64, 3, 4, 5, 7, 8, 9, 12, 16, 25, 27, 49]),
        discs in prop::collection::vec(prop::sample::select(vec![-4i64, -3, -7, -8, 5, 8, 12, -56, -24, 28, -11, 13]), 0..4),
    ) {
        let c = canonicalize(&AbelianFieldDesc::new(m, discs.clone())).unwrap();
        prop_assert_eq!(canonicalize(&c).unwrap(), c.clone());
        prop_assert_eq!(field_degree(&c).unwrap(), field_degree(&AbelianFieldDesc::new(m, discs)).unwrap());
    }
}
