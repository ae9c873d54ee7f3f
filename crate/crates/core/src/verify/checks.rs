//! Cross-checks of structural lemmas, degree identities and conjugacy.

use serde::Serialize;

use crate::cartan::{
    build_cartan, build_normalizer, expected_cartan_order, kernel_matrices, nonsplit_normalizer, params_for,
    split_normalizer, splitting_type, CMOrder, Flavor,
};
use crate::classify::{canonicalize, classify_max_abelian, AbelianFieldDesc};
use crate::cmcurves::{RationalCurve, TABLE1};
use crate::error::{Error, Result};
use crate::matgroups::{
    abelianization_order, conjugates_onto, derived_subgroup, find_conjugator, kernel_of_reduction, reduce_group,
    subgroup_index,
};
use crate::verify::catalog::ImageCase;

/// Results of the reduction lemmas for one case at the step p^n -> p^{n+1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaReport {
    pub case: String,
    pub n: u32,
    /// G'(p^{n+1}) maps onto G'(p^n).
    pub surjective: bool,
    pub derived_kernel_order: u64,
    /// The derived kernel has order 1, p or p^2.
    pub derived_kernel_ok: bool,
    /// ker(G(p^{n+1}) -> p^n) = ker(N(p^{n+1}) -> p^n); checked only past the level of definition.
    pub kernel_equality: Option<bool>,
    /// The Cartan subgroup at p^n is abelian.
    pub cartan_abelian: bool,
    /// G'(p^n) lies in SL2 and in the Cartan subgroup.
    pub derived_in_sl2_cartan: bool,
    /// [N(p^n) : G(p^n)].
    pub index: u64,
    /// The index divides 4 or 6.
    pub index_ok: bool,
}

impl LemmaReport {
    /// Whether every assertion holds.
    pub fn pass(&self) -> bool {
        self.surjective
            && self.derived_kernel_ok
            && self.kernel_equality.unwrap_or(true)
            && self.cartan_abelian
            && self.derived_in_sl2_cartan
            && self.index_ok
    }

    /// The report, or `AssertionFailure` naming the first violated lemma.
    pub fn into_result(self) -> Result<LemmaReport> {
        let failed = [
            (!self.surjective, "derived-surjectivity"),
            (!self.derived_kernel_ok, "derived-kernel-size"),
            (self.kernel_equality == Some(false), "kernel-equality"),
            (!self.cartan_abelian, "cartan-abelian"),
            (!self.derived_in_sl2_cartan, "derived-in-sl2-cartan"),
            (!self.index_ok, "index-divides-4-or-6"),
        ]
        .into_iter()
        .find(|(bad, _)| *bad);
        match failed {
            Some((_, tag)) => {
                Err(Error::AssertionFailure { check: tag.into(), detail: format!("{} at n = {}", self.case, self.n) })
            }
            None => Ok(self),
        }
    }
}

/// Run the reduction lemmas for the step p^n -> p^{n+1} and the level-p^n invariants.
pub fn check_reduction_lemmas(case: &ImageCase, n: u32) -> Result<LemmaReport> {
    let p = case.p;
    let g = case.group(n)?;
    let g_next = case.group(n + 1)?;
    let d = derived_subgroup(&g)?;
    let d_next = derived_subgroup(&g_next)?;
    let surjective = reduce_group(&d_next, g.modulus())? == d;
    let derived_kernel_order = kernel_of_reduction(&d_next, g.modulus())?.order();
    let derived_kernel_ok = [1, p, p * p].contains(&derived_kernel_order);
    let kernel_equality = if n >= case.level_of_definition {
        let nrm_next = case.normalizer(n + 1)?;
        Some(kernel_of_reduction(&g_next, g.modulus())? == kernel_of_reduction(&nrm_next, g.modulus())?)
    } else {
        None
    };
    let cartan_abelian = case.cartan(n)?.is_abelian();
    let mut derived_in_sl2_cartan = true;
    for x in d.elements() {
        if x.det() != 1 % g.modulus() || !case.in_cartan_shape(x)? {
            derived_in_sl2_cartan = false;
            break;
        }
    }
    let nrm = case.normalizer(n)?;
    let index = subgroup_index(&g, &nrm)?;
    let index_ok = 4 % index == 0 || 6 % index == 0;
    Ok(LemmaReport {
        case: case.label.clone(),
        n,
        surjective,
        derived_kernel_order,
        derived_kernel_ok,
        kernel_equality,
        cartan_abelian,
        derived_in_sl2_cartan,
        index,
        index_ok,
    })
}

/// Abelianization order of an image against the classified field degree of a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeReport {
    pub case: String,
    pub witness: (i64, i64),
    pub n: u32,
    pub abelianization: u64,
    pub degree: u64,
    pub field: AbelianFieldDesc,
    pub pass: bool,
}

/// Compare |G(p^n)| / |G'(p^n)| with [M : Q] from the classifier for the witness curve.
pub fn check_degree_identity(case: &ImageCase, witness: (i64, i64), n: u32) -> Result<DegreeReport> {
    let g = case.group(n)?;
    let abelianization = abelianization_order(&g)?;
    let curve = RationalCurve::from_ints(witness.0, witness.1)?;
    let r = classify_max_abelian(&curve, case.p, n)?;
    Ok(DegreeReport {
        case: case.label.clone(),
        witness,
        n,
        abelianization,
        degree: r.degree,
        field: r.field,
        pass: abelianization == r.degree,
    })
}

/// One pair of inert normalizers at modulus 16.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConjugacyPair {
    pub disc_a: i64,
    pub disc_b: i64,
    pub conjugator: Option<[u64; 4]>,
    /// U N_a U^{-1} = N_b checked on every element.
    pub verified: bool,
}

/// Orders of the inert normalizers and their pairwise conjugators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConjugacyReport {
    pub orders: Vec<(i64, u64)>,
    pub pairs: Vec<ConjugacyPair>,
}

impl ConjugacyReport {
    /// Whether every pair is conjugate with a verified witness.
    pub fn pass(&self) -> bool {
        self.pairs.iter().all(|p| p.verified)
    }
}

/// Orders with 2 inert and |disc| > 4 from the class number one table.
pub const INERT_AT_2_DISCS: [i64; 6] = [-11, -19, -27, -43, -67, -163];

/// Conjugacy of the six inert-at-2 normalizers in GL2(Z/16).
pub fn check_inert_conjugacy() -> Result<ConjugacyReport> {
    use rayon::prelude::*;
    let groups = INERT_AT_2_DISCS
        .iter()
        .map(|&d| build_normalizer(&params_for(&CMOrder::from_disc(d)?, 16)?).map(|g| (d, g)))
        .collect::<Result<Vec<_>>>()?;
    let orders = groups.iter().map(|(d, g)| (*d, g.order())).collect();
    let mut idx = Vec::new();
    for i in 0..groups.len() {
        for j in (i + 1)..groups.len() {
            idx.push((i, j));
        }
    }
    let pairs = idx
        .par_iter()
        .map(|&(i, j)| {
            let (da, ga) = &groups[i];
            let (db, gb) = &groups[j];
            let u = find_conjugator(ga, gb)?;
            let verified = match &u {
                Some(u) => conjugates_onto(u, ga, gb)?,
                None => false,
            };
            Ok(ConjugacyPair { disc_a: *da, disc_b: *db, conjugator: u.map(|u| u.entries()), verified })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConjugacyReport { orders, pairs })
}

/// Enumerated and closed-form Cartan orders for one (order, p, n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CartanSizeRow {
    pub order: CMOrder,
    pub p: u64,
    pub n: u32,
    pub flavor: Flavor,
    pub computed: u64,
    pub expected: u64,
}

/// Cartan orders for every table order, p in `primes` and 1 <= n <= `n_max`.
pub fn check_cartan_sizes(primes: &[u64], n_max: u32) -> Result<Vec<CartanSizeRow>> {
    use rayon::prelude::*;
    let mut jobs = Vec::new();
    for row in TABLE1 {
        for &p in primes {
            for n in 1..=n_max {
                jobs.push((row.order, p, n));
            }
        }
    }
    jobs.par_iter()
        .map(|&(order, p, n)| {
            let params = params_for(&order, p.pow(n))?;
            let flavor = splitting_type(&order, p);
            Ok(CartanSizeRow {
                order,
                p,
                n,
                flavor,
                computed: build_cartan(&params)?.order(),
                expected: expected_cartan_order(flavor, p, n),
            })
        })
        .collect()
}

/// Comparison of the explicit kernel matrices with the enumerated kernel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelRow {
    pub order: CMOrder,
    pub p: u64,
    pub n: u32,
    pub formula_count: usize,
    pub brute_force_count: u64,
    pub equal: bool,
}

/// Kernel of N(p^{n+1}) -> N(p^n) against the explicit p^2 matrices, for every table order.
pub fn check_kernel_structure(levels: &[(u64, u32)]) -> Result<Vec<KernelRow>> {
    let mut out = Vec::new();
    for row in TABLE1 {
        for &(p, n) in levels {
            let params = params_for(&row.order, p.pow(n + 1))?;
            let nrm = build_normalizer(&params)?;
            let brute = kernel_of_reduction(&nrm, p.pow(n))?;
            let mut formula = kernel_matrices(&params)?;
            formula.sort_unstable();
            formula.dedup();
            out.push(KernelRow {
                order: row.order,
                p,
                n,
                formula_count: formula.len(),
                brute_force_count: brute.order(),
                equal: brute.elements() == &formula[..],
            });
        }
    }
    Ok(out)
}

/// |G'| of the split and nonsplit normalizers modulo p.
pub fn base_commutator_orders(p: u64, nonsplit_delta: (i64, i64)) -> Result<(u64, u64)> {
    let sp = derived_subgroup(&split_normalizer(p, 1)?)?.order();
    let ns = derived_subgroup(&nonsplit_normalizer(p, 1, nonsplit_delta)?)?.order();
    Ok((sp, ns))
}

/// A worked example: curve, prime, level and the expected field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GoldenExample {
    pub a: i64,
    pub b: i64,
    pub p: u64,
    pub n: u32,
    pub expected: AbelianFieldDesc,
}

/// The worked examples with their fields before canonicalization.
pub fn golden_examples() -> Vec<GoldenExample> {
    let ex = |a, b, p, n, m, d: &[i64]| GoldenExample { a, b, p, n, expected: AbelianFieldDesc::new(m, d.to_vec()) };
    vec![
        ex(-35, 98, 5, 1, 5, &[-7]),
        ex(-35, 98, 5, 2, 25, &[-7]),
        ex(-140, -784, 7, 1, 7, &[-56]),
        ex(-140, -784, 7, 2, 49, &[-56]),
        ex(0, -6, 3, 1, 3, &[8]),
        ex(0, -6, 3, 2, 9, &[8]),
        // y^2 + y = x^3 - x^2 - 7x + 10 in short form: c4 = 352, c6 = -6776.
        ex(-9504, 365904, 2, 1, 2, &[-11]),
        ex(-9504, 365904, 2, 2, 4, &[-11]),
        ex(-9504, 365904, 2, 3, 8, &[-11]),
        ex(-15, 22, 2, 1, 1, &[12]),
        ex(-15, 22, 2, 2, 8, &[-3]),
        ex(9, 0, 2, 2, 8, &[12]),
        ex(-30, 56, 2, 2, 8, &[12]),
    ]
}

/// Outcome of one worked example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GoldenReport {
    pub example: GoldenExample,
    pub computed: AbelianFieldDesc,
    pub pass: bool,
}

/// Classify each worked example and compare canonical descriptors.
pub fn check_golden_examples() -> Result<Vec<GoldenReport>> {
    golden_examples()
        .into_iter()
        .map(|ex| {
            let curve = RationalCurve::from_ints(ex.a, ex.b)?;
            let computed = classify_max_abelian(&curve, ex.p, ex.n)?.field;
            let pass = canonicalize(&ex.expected)? == computed;
            Ok(GoldenReport { example: ex, computed, pass })
        })
        .collect()
}
