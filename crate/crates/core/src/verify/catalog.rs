//! Explicit generator recipes for the p-adic Galois images of CM curves.
//!
//! Each [`ImageCase`] is a family of subgroups G(p^n) of GL2(Z/p^n) given by
//! symbolic generators, together with the presentation of its ambient
//! normalizer and witness curves whose image is (up to conjugacy) that group.

use serde::Serialize;

use crate::cartan::{
    build_cartan, build_normalizer, cartan_elements, kernel_matrices, nonsplit_kernel_matrices, nonsplit_matrix,
    nonsplit_normalizer, params_for, split_kernel_matrices, split_normalizer, CMOrder, CartanParams,
};
use crate::classify::TheoremCase;
use crate::error::{Error, Result};
use crate::matgroups::{FiniteMatGroup, Mat2};
use crate::residues::{legendre, pow_mod, rational_residue};

/// Which matrix model of the Cartan subgroup a case is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Presentation {
    /// c(a, b) = [[a + b phi, b], [delta b, a]] with the order's own parameters.
    Cartan,
    /// diag(a, b), normalized by [[0, 1], [1, 0]].
    Split,
    /// [[a, delta b], [b, a]] with a non-square delta, normalized by diag(1, -1).
    Nonsplit { delta: (i64, i64) },
}

/// A subset of the Cartan subgroup described by a condition on its coordinates (a, b).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum CartanFilter {
    /// The whole Cartan subgroup.
    All,
    /// a is a nonzero square modulo p.
    ASquare,
    /// a = 1 mod 3.
    AOneMod3,
    /// b = 0 mod 3.
    BZeroMod3,
    /// a = 1 and b = 0 mod 3.
    AOneBZeroMod3,
    /// Cubes of Cartan elements.
    Cubes,
    /// Split presentation only: a / b is a cube.
    RatioCube,
}

/// A symbolic generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum GenSpec {
    /// The involution of the presentation: c_eps, [[0, eps], [eps, 0]] or diag(eps, -eps).
    Conj(i64),
    /// The Cartan matrix with rational coordinates a = a.0 / a.1 and b = b.0 / b.1.
    Cartan { a: (i64, i64), b: (i64, i64) },
    /// The scalar matrix c * I.
    Scalar(i64),
    /// A matrix with integer entries (e11, e12, e21, e22).
    Literal([i64; 4]),
    /// Generators of a subgroup of the Cartan subgroup.
    Subset(CartanFilter),
}

/// A catalogued family of images with witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageCase {
    pub label: String,
    pub theorem: TheoremCase,
    pub order: CMOrder,
    pub p: u64,
    pub presentation: Presentation,
    pub recipe: Vec<GenSpec>,
    /// [N : G] for large n.
    pub nominal_index: u32,
    /// G(p^{n+1}) is the full preimage of G(p^n) for n at least this exponent.
    pub level_of_definition: u32,
    /// Short Weierstrass coefficients (A, B) of curves with this image.
    pub witnesses: Vec<(i64, i64)>,
}

/// Largest level exponent used by the default verification runs.
pub fn default_max_n(p: u64) -> u32 {
    if p == 2 {
        4
    } else {
        3
    }
}

impl ImageCase {
    fn modulus(&self, n: u32) -> Result<u64> {
        if n < 1 {
            return Err(Error::UnsupportedInput("n must be at least 1".into()));
        }
        let m = self.p.checked_pow(n).ok_or(Error::BadModulus(u64::MAX))?;
        if m > crate::matgroups::MAX_MODULUS {
            return Err(Error::BadModulus(m));
        }
        Ok(m)
    }

    fn params(&self, m: u64) -> Result<CartanParams> {
        params_for(&self.order, m)
    }

    /// Cartan elements of the presentation with their coordinates (a, b).
    fn coordinates(&self, m: u64) -> Result<Vec<(u64, u64, Mat2)>> {
        let mut out = Vec::new();
        match self.presentation {
            Presentation::Cartan => {
                let params = self.params(m)?;
                for x in cartan_elements(&params)? {
                    let [_, b, _, a] = x.entries();
                    out.push((a, b, x));
                }
            }
            Presentation::Split => {
                for a in 0..m {
                    for b in 0..m {
                        if a % self.p != 0 && b % self.p != 0 {
                            out.push((a, b, Mat2::new([a as i64, 0, 0, b as i64], m)?));
                        }
                    }
                }
            }
            Presentation::Nonsplit { delta } => {
                for a in 0..m {
                    for b in 0..m {
                        let x = nonsplit_matrix(a as i64, b as i64, delta, m)?;
                        if x.is_invertible() {
                            out.push((a, b, x));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The Cartan subgroup of the presentation modulo p^n.
    pub fn cartan(&self, n: u32) -> Result<FiniteMatGroup> {
        let m = self.modulus(n)?;
        match self.presentation {
            Presentation::Cartan => build_cartan(&self.params(m)?),
            _ => {
                let elems = self.coordinates(m)?.into_iter().map(|(_, _, x)| x).collect();
                FiniteMatGroup::from_closed_set(elems, m)
            }
        }
    }

    /// The normalizer of the presentation's Cartan subgroup modulo p^n.
    pub fn normalizer(&self, n: u32) -> Result<FiniteMatGroup> {
        let m = self.modulus(n)?;
        match self.presentation {
            Presentation::Cartan => build_normalizer(&self.params(m)?),
            Presentation::Split => split_normalizer(self.p, n),
            Presentation::Nonsplit { delta } => nonsplit_normalizer(self.p, n, delta),
        }
    }

    /// The p^2 kernel matrices of N(p^{n+1}) -> N(p^n) in this presentation.
    pub fn kernel_matrices(&self, n: u32) -> Result<Vec<Mat2>> {
        let m = self.modulus(n + 1)?;
        match self.presentation {
            Presentation::Cartan => kernel_matrices(&self.params(m)?),
            Presentation::Split => split_kernel_matrices(self.p, n),
            Presentation::Nonsplit { delta } => nonsplit_kernel_matrices(self.p, n, delta),
        }
    }

    /// Whether a matrix lies in the presentation's Cartan shape (ignoring invertibility).
    pub fn in_cartan_shape(&self, x: &Mat2) -> Result<bool> {
        let m = x.modulus();
        let [e11, e12, e21, e22] = x.entries();
        Ok(match self.presentation {
            Presentation::Cartan => self.params(m)?.is_cartan(x),
            Presentation::Split => e12 == 0 && e21 == 0,
            Presentation::Nonsplit { delta } => {
                let d = rational_residue(delta.0 as i128, delta.1 as i128, m)?.value();
                e11 == e22 && e12 == (d * e21) % m
            }
        })
    }

    fn conj(&self, eps: i64, m: u64) -> Result<Mat2> {
        match self.presentation {
            Presentation::Cartan => self.params(m)?.conj_matrix(eps),
            Presentation::Split => Mat2::new([0, eps, eps, 0], m),
            Presentation::Nonsplit { .. } => Mat2::new([eps, 0, 0, -eps], m),
        }
    }

    fn cartan_at(&self, a: (i64, i64), b: (i64, i64), m: u64) -> Result<Mat2> {
        let ar = rational_residue(a.0 as i128, a.1 as i128, m)?.value() as i64;
        let br = rational_residue(b.0 as i128, b.1 as i128, m)?.value() as i64;
        match self.presentation {
            Presentation::Cartan => self.params(m)?.cartan_matrix(ar, br),
            Presentation::Split => Mat2::new([ar, 0, 0, br], m),
            Presentation::Nonsplit { delta } => nonsplit_matrix(ar, br, delta, m),
        }
    }

    fn subset(&self, filter: CartanFilter, m: u64) -> Result<Vec<Mat2>> {
        let p = self.p;
        let coords = self.coordinates(m)?;
        let elems: Vec<Mat2> = match filter {
            CartanFilter::All => coords.into_iter().map(|(_, _, x)| x).collect(),
            CartanFilter::ASquare => coords
                .into_iter()
                .filter(|&(a, _, _)| a % p != 0 && legendre(a as i128, p) == 1)
                .map(|(_, _, x)| x)
                .collect(),
            CartanFilter::AOneMod3 => coords.into_iter().filter(|&(a, _, _)| a % 3 == 1).map(|(_, _, x)| x).collect(),
            CartanFilter::BZeroMod3 => coords.into_iter().filter(|&(_, b, _)| b % 3 == 0).map(|(_, _, x)| x).collect(),
            CartanFilter::AOneBZeroMod3 => {
                coords.into_iter().filter(|&(a, b, _)| a % 3 == 1 && b % 3 == 0).map(|(_, _, x)| x).collect()
            }
            CartanFilter::Cubes => coords.into_iter().map(|(_, _, x)| x.pow(3)).collect(),
            CartanFilter::RatioCube => {
                if self.presentation != Presentation::Split {
                    return Err(Error::UnsupportedInput("ratio-cube subgroup needs the split presentation".into()));
                }
                let cubes: std::collections::BTreeSet<u64> =
                    (1..m).filter(|x| x % p != 0).map(|x| pow_mod(x, 3, m)).collect();
                coords
                    .into_iter()
                    .filter(|&(a, b, _)| {
                        let binv = crate::residues::inv_mod(b as i128, m).expect("b is a unit");
                        cubes.contains(&(a * binv % m))
                    })
                    .map(|(_, _, x)| x)
                    .collect()
            }
        };
        Ok(FiniteMatGroup::from_closed_set(elems, m)?.generators().to_vec())
    }

    /// Materialized generators modulo p^n.
    pub fn generators(&self, n: u32) -> Result<Vec<Mat2>> {
        let m = self.modulus(n)?;
        let mut gens = Vec::new();
        for spec in &self.recipe {
            match *spec {
                GenSpec::Conj(eps) => gens.push(self.conj(eps, m)?),
                GenSpec::Cartan { a, b } => gens.push(self.cartan_at(a, b, m)?),
                GenSpec::Scalar(c) => gens.push(Mat2::scalar(c, m)?),
                GenSpec::Literal(e) => gens.push(Mat2::new(e, m)?),
                GenSpec::Subset(f) => gens.extend(self.subset(f, m)?),
            }
        }
        for g in &gens {
            if !g.is_invertible() {
                return Err(Error::Singular { modulus: m });
            }
        }
        Ok(gens)
    }

    /// The image group G(p^n).
    pub fn group(&self, n: u32) -> Result<FiniteMatGroup> {
        let m = self.modulus(n)?;
        FiniteMatGroup::generated_by(&self.generators(n)?, m)
    }
}

/// The closure of a case's recipe modulo p^n.
pub fn materialize(case: &ImageCase, n: u32) -> Result<FiniteMatGroup> {
    case.group(n)
}

fn lod(order: &CMOrder, p: u64) -> u32 {
    if p == 2 {
        4
    } else if p == 3 && order.disc() == -3 {
        3
    } else {
        1
    }
}

struct Builder {
    cases: Vec<ImageCase>,
}

impl Builder {
    #[allow(clippy::too_many_arguments)]
    fn add(
        &mut self,
        label: impl Into<String>,
        theorem: TheoremCase,
        order: (i64, i64),
        p: u64,
        presentation: Presentation,
        recipe: Vec<GenSpec>,
        nominal_index: u32,
        witnesses: &[(i64, i64)],
    ) {
        let order = CMOrder::new(order.0, order.1);
        self.cases.push(ImageCase {
            label: label.into(),
            theorem,
            order,
            p,
            presentation,
            recipe,
            nominal_index,
            level_of_definition: lod(&order, p),
            witnesses: witnesses.to_vec(),
        });
    }
}

/// Every catalogued image family, in a fixed order.
pub fn catalog() -> Vec<ImageCase> {
    use CartanFilter as F;
    use GenSpec as G;
    use Presentation as P;
    use TheoremCase as T;
    let full = || vec![G::Subset(F::All), G::Conj(1)];
    let mut b = Builder { cases: Vec::new() };

    // Odd p not dividing the discriminant: the full normalizer.
    b.add("Thm1.1-N-split-disc-4-p5", T::T11, (-4, 1), 5, P::Cartan, full(), 1, &[(1, 0)]);
    b.add("Thm1.1-Nsp-p5", T::T11, (-4, 1), 5, P::Split, full(), 1, &[(1, 0)]);
    b.add("Thm1.1-N-inert-disc-7-p5", T::T11, (-7, 1), 5, P::Cartan, full(), 1, &[(-35, 98)]);
    b.add("Thm1.1-Nns-p5", T::T11, (-7, 1), 5, P::Nonsplit { delta: (-7, 4) }, full(), 1, &[(-35, 98)]);
    b.add("Thm1.1-N-split-disc-3-p7", T::T11, (-3, 1), 7, P::Cartan, full(), 1, &[(0, 16)]);
    b.add("Thm1.1-Nsp-p7", T::T11, (-3, 1), 7, P::Split, full(), 1, &[(0, 16)]);
    b.add("Thm1.1-N-inert-disc-4-p7", T::T11, (-4, 1), 7, P::Cartan, full(), 1, &[(1, 0)]);
    b.add("Thm1.1-Nns-p7", T::T11, (-4, 1), 7, P::Nonsplit { delta: (-1, 1) }, full(), 1, &[(1, 0)]);
    b.add("Thm1.1-N-inert-disc-3-p5", T::T11, (-3, 1), 5, P::Cartan, full(), 1, &[(0, 16)]);
    // j = 0 with an index-3 image.
    for eps in [1, -1] {
        b.add(
            format!("Thm1.1-index3-j0-split-p7-eps{eps}"),
            T::T11,
            (-3, 1),
            7,
            P::Split,
            vec![G::Subset(F::RatioCube), G::Conj(eps)],
            3,
            &[(0, 2)],
        );
    }
    b.add(
        "Thm1.1-index3-j0-nonsplit-p5",
        T::T11,
        (-3, 1),
        5,
        P::Nonsplit { delta: (-3, 4) },
        vec![G::Subset(F::Cubes), G::Conj(1)],
        3,
        &[(0, 2)],
    );

    // Odd p dividing the discriminant, j != 0.
    b.add("Thm1.2-N-disc-7", T::T12, (-7, 1), 7, P::Cartan, full(), 1, &[(-140, -784)]);
    b.add("Thm1.2-N-disc-27", T::T12, (-3, 3), 3, P::Cartan, full(), 1, &[(-1920, 32384)]);
    for eps in [1, -1] {
        b.add(
            format!("Thm1.2-index2-disc-7-eps{eps}"),
            T::T12,
            (-7, 1),
            7,
            P::Cartan,
            vec![G::Subset(F::ASquare), G::Conj(eps)],
            2,
            &[(-1715, 33614)],
        );
        b.add(
            format!("Thm1.2-index2-disc-27-eps{eps}"),
            T::T12,
            (-3, 3),
            3,
            P::Cartan,
            vec![G::Subset(F::ASquare), G::Conj(eps)],
            2,
            &[(-480, 4048), (-4320, -109296)],
        );
    }

    // p = 3, j = 0.
    b.add("Thm1.3-N", T::T13, (-3, 1), 3, P::Cartan, full(), 1, &[(0, 32)]);
    for eps in [1, -1] {
        b.add(
            format!("Thm1.3-index2-eps{eps}"),
            T::T13,
            (-3, 1),
            3,
            P::Cartan,
            vec![G::Subset(F::AOneMod3), G::Conj(eps)],
            2,
            &[(0, 64)],
        );
    }
    let g2 = G::Cartan { a: (1, 1), b: (1, 1) };
    let g3 = G::Cartan { a: (-5, 4), b: (1, 2) };
    b.add(
        "Thm1.3-index6-G1",
        T::T13,
        (-3, 1),
        3,
        P::Cartan,
        vec![G::Subset(F::AOneBZeroMod3), G::Conj(1)],
        6,
        &[(0, 16)],
    );
    b.add("Thm1.3-index6-G2", T::T13, (-3, 1), 3, P::Cartan, vec![G::Conj(1), G::Scalar(4), g2], 6, &[(0, 16)]);
    b.add("Thm1.3-index6-G3", T::T13, (-3, 1), 3, P::Cartan, vec![G::Conj(1), G::Scalar(4), g3], 6, &[(0, 16)]);
    b.add(
        "Thm1.3-index3-G1",
        T::T13,
        (-3, 1),
        3,
        P::Cartan,
        vec![G::Subset(F::BZeroMod3), G::Conj(1)],
        3,
        &[(0, 128), (0, -6)],
    );
    b.add(
        "Thm1.3-index3-G2",
        T::T13,
        (-3, 1),
        3,
        P::Cartan,
        vec![G::Conj(1), G::Scalar(2), g2],
        3,
        &[(0, 128), (0, -6)],
    );
    b.add(
        "Thm1.3-index3-G3",
        T::T13,
        (-3, 1),
        3,
        P::Cartan,
        vec![G::Conj(1), G::Scalar(2), g3],
        3,
        &[(0, 128), (0, -6)],
    );

    // p = 2, odd discriminant.
    b.add("Thm1.4a-N-disc-7", T::T14a, (-7, 1), 2, P::Cartan, full(), 1, &[(-35, 98), (-1715, 33614)]);
    b.add("Thm1.4a-N-disc-11", T::T14a, (-11, 1), 2, P::Cartan, full(), 1, &[(-9504, 365904)]);
    b.add("Thm1.4a-N-disc-3", T::T14a, (-3, 1), 2, P::Cartan, full(), 1, &[(0, 16)]);
    for (name, gamma) in [("c1p", [0, 1, 1, 0]), ("cm1p", [0, -1, -1, 0])] {
        b.add(
            format!("Thm1.4a-index3-j0-gamma-{name}"),
            T::T14a,
            (-3, 1),
            2,
            P::Cartan,
            vec![G::Literal(gamma), G::Scalar(-1), G::Literal([7, 4, -4, 3]), G::Literal([3, 6, -6, -3])],
            3,
            &[(0, 2)],
        );
    }

    // p = 2, discriminants -12 and -28.
    b.add("Thm1.4bi-N-disc-12", T::T14bi, (-3, 2), 2, P::Cartan, full(), 1, &[(-15, 22)]);
    b.add("Thm1.4bi-N-disc-28", T::T14bi, (-7, 2), 2, P::Cartan, full(), 1, &[(-29155, 1915998)]);

    // p = 2, j = 1728.
    b.add("Thm1.4bii-N", T::T14bii, (-4, 1), 2, P::Cartan, full(), 1, &[(3, 0)]);
    let gammas: [(&str, [i64; 4]); 4] =
        [("c1", [1, 0, 0, -1]), ("cm1", [-1, 0, 0, 1]), ("c1p", [0, 1, 1, 0]), ("cm1p", [0, -1, -1, 0])];
    let families: [(&str, Vec<[i64; 4]>, u32); 6] = [
        ("G4a", vec![[5, 0, 0, 5], [1, 2, -2, 1]], 4),
        ("G4b", vec![[5, 0, 0, 5], [-1, -2, 2, -1]], 4),
        ("G4c", vec![[-3, 0, 0, -3], [2, -1, 1, 2]], 4),
        ("G4d", vec![[-3, 0, 0, -3], [-2, 1, -1, -2]], 4),
        ("G2a", vec![[-1, 0, 0, -1], [3, 0, 0, 3], [1, 2, -2, 1]], 2),
        ("G2b", vec![[-1, 0, 0, -1], [3, 0, 0, 3], [2, 1, -1, 2]], 2),
    ];
    for (fam, mats, index) in &families {
        for (gname, gamma) in &gammas {
            let diagonal_gamma = gamma[1] == 0;
            let witness: (i64, i64) = match (*fam, diagonal_gamma) {
                ("G4a" | "G4b", true) => (-1, 0),
                ("G4a" | "G4b", false) => (1, 0),
                ("G4c" | "G4d", true) => (2, 0),
                ("G4c" | "G4d", false) => (-2, 0),
                ("G2a", true) => (-9, 0),
                ("G2a", false) => (9, 0),
                ("G2b", true) => (18, 0),
                _ => (-18, 0),
            };
            let mut recipe = vec![G::Literal(*gamma)];
            recipe.extend(mats.iter().map(|m| G::Literal(*m)));
            b.add(
                format!("Thm1.4bii-{fam}-gamma-{gname}"),
                T::T14bii,
                (-4, 1),
                2,
                P::Cartan,
                recipe,
                *index,
                &[witness],
            );
        }
    }

    // p = 2, discriminants -8 and -16.
    b.add("Thm1.4biii-N-disc-8", T::T14biii, (-8, 1), 2, P::Cartan, full(), 1, &[(-30, 56)]);
    b.add("Thm1.4biii-N-disc-16", T::T14biii, (-4, 2), 2, P::Cartan, full(), 1, &[(-99, 378)]);
    for (order, delta, beta, witnesses) in
        [((-8, 1), -2i64, 3i64, [(-4320, 96768), (-17280, 774144)]), ((-4, 2), -4, 5, [(-11, 14), (-11, -14)])]
    {
        let disc = -order.0 * order.1 * order.1;
        for (gname, s) in [("G1", 1i64), ("G2", -1)] {
            b.add(
                format!("Thm1.4biii-index2-disc-{disc}-{gname}"),
                T::T14biii,
                order,
                2,
                P::Cartan,
                vec![G::Conj(1), G::Scalar(beta), G::Literal([s, s, s * delta, s])],
                2,
                &witnesses,
            );
        }
    }
    b.cases
}

/// Look up a case by label.
pub fn find_case(label: &str) -> Option<ImageCase> {
    catalog().into_iter().find(|c| c.label == label)
}
