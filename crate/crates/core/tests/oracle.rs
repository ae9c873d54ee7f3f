//! Cross-checks against a deliberately naive group enumerator written here.
//!
//! The oracle closes generator sets by breadth-first search over plain tuples
//! and builds commutator subgroups from all element pairs, sharing no code
//! with the library's Dimino closure or normal-closure derived subgroup.

use std::collections::{HashSet, VecDeque};

use maxab_core::matgroups::{abelianization_order, derived_subgroup, FiniteMatGroup};
use maxab_core::verify::catalog;

type M = [i64; 4];

fn mul(a: &M, b: &M, m: i64) -> M {
    [
        (a[0] * b[0] + a[1] * b[2]).rem_euclid(m),
        (a[0] * b[1] + a[1] * b[3]).rem_euclid(m),
        (a[2] * b[0] + a[3] * b[2]).rem_euclid(m),
        (a[2] * b[1] + a[3] * b[3]).rem_euclid(m),
    ]
}

fn inv(a: &M, m: i64) -> M {
    let det = (a[0] * a[3] - a[1] * a[2]).rem_euclid(m);
    let di = (1..m).find(|x| (x * det) % m == 1).expect("invertible");
    [(a[3] * di).rem_euclid(m), (-a[1] * di).rem_euclid(m), (-a[2] * di).rem_euclid(m), (a[0] * di).rem_euclid(m)]
}

fn bfs_closure(gens: &[M], m: i64) -> HashSet<M> {
    let id = [1 % m, 0, 0, 1 % m];
    let mut seen = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = mul(&x, g, m);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

fn naive_derived(g: &HashSet<M>, m: i64) -> HashSet<M> {
    let mut comms = HashSet::new();
    for a in g {
        let ai = inv(a, m);
        for b in g {
            let bi = inv(b, m);
            comms.insert(mul(&mul(&mul(a, b, m), &ai, m), &bi, m));
        }
    }
    let gens: Vec<M> = comms.into_iter().collect();
    bfs_closure(&gens, m)
}

fn to_tuple(x: &maxab_core::Mat2) -> M {
    x.entries().map(|e| e as i64)
}

#[test]
fn catalog_groups_match_naive_enumeration() {
    let mut compared = 0;
    for case in catalog() {
        for n in 1..=3 {
            let g = match case.group(n) {
                Ok(g) if g.order() <= 1200 => g,
                _ => continue,
            };
            let m = g.modulus() as i64;
            let gens: Vec<M> = case.generators(n).unwrap().iter().map(to_tuple).collect();
            let naive = bfs_closure(&gens, m);
            let lib: HashSet<M> = g.elements().iter().map(to_tuple).collect();
            assert_eq!(naive, lib, "{} n={}", case.label, n);
            let nd = naive_derived(&naive, m);
            let ld: HashSet<M> = derived_subgroup(&g).unwrap().elements().iter().map(to_tuple).collect();
            assert_eq!(nd, ld, "derived {} n={}", case.label, n);
            assert_eq!(abelianization_order(&g).unwrap(), (naive.len() / nd.len()) as u64);
            compared += 1;
        }
    }
    assert!(compared > 100, "only {compared} groups compared");
}

#[test]
fn nonsplit_and_cartan_presentations_give_isomorphic_abelianizations() {
    // Both presentations of the inert normalizer at 5 have the same derived order.
    use maxab_core::cartan::{build_normalizer, nonsplit_normalizer, params_for, CMOrder};
    for n in 1..=2 {
        let a = build_normalizer(&params_for(&CMOrder::new(-7, 1), 5u64.pow(n)).unwrap()).unwrap();
        let b = nonsplit_normalizer(5, n, (-7, 4)).unwrap();
        assert_eq!(a.order(), b.order());
        assert_eq!(derived_subgroup(&a).unwrap().order(), derived_subgroup(&b).unwrap().order());
        let naive = bfs_closure(&a.generators().iter().map(to_tuple).collect::<Vec<_>>(), a.modulus() as i64);
        assert_eq!(naive.len() as u64, a.order());
    }
    let _ = FiniteMatGroup::generated_by(&[], 5).unwrap();
}
