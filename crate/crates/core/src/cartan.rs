//! Cartan subgroups attached to imaginary quadratic orders and their normalizers.
//!
//! An order O of discriminant Delta_K f^2 gives parameters (delta, phi) and
//! the Cartan matrices c(a, b) = [[a + b phi, b], [delta b, a]]. Alongside this
//! presentation the module offers the classical split (diagonal) and nonsplit
//! ([[a, delta b], [b, a]]) presentations for odd primes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matgroups::{FiniteMatGroup, Mat2};
use crate::residues::{legendre, prime_power, rational_residue, ModInt};

/// An imaginary quadratic order of discriminant `delta_k * f^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CMOrder {
    /// Fundamental discriminant Delta_K.
    #[serde(rename = "deltaK")]
    pub delta_k: i64,
    /// Conductor f.
    pub f: i64,
}

impl CMOrder {
    /// A new order; no class number condition is imposed here.
    pub const fn new(delta_k: i64, f: i64) -> Self {
        CMOrder { delta_k, f }
    }

    /// The discriminant Delta_K f^2.
    pub fn disc(&self) -> i64 {
        self.delta_k * self.f * self.f
    }

    /// Split the discriminant D = Delta_K f^2 into its fundamental part and conductor.
    pub fn from_disc(disc: i64) -> Result<Self> {
        if disc >= 0 || disc.rem_euclid(4) > 1 {
            return Err(Error::UnsupportedInput(format!("{disc} is not an imaginary quadratic discriminant")));
        }
        let mut best = None;
        let mut f = 1i64;
        while f * f <= disc.abs() {
            if disc % (f * f) == 0 {
                let dk = disc / (f * f);
                let fundamental = match dk.rem_euclid(4) {
                    1 => crate::residues::squarefree_part(dk as i128).map(|s| s == dk as i128).unwrap_or(false),
                    0 => {
                        let q = dk / 4;
                        matches!(q.rem_euclid(4), 2 | 3)
                            && crate::residues::squarefree_part(q as i128).map(|s| s == q as i128).unwrap_or(false)
                    }
                    _ => false,
                };
                if fundamental {
                    best = Some(CMOrder::new(dk, f));
                }
            }
            f += 1;
        }
        best.ok_or_else(|| Error::UnsupportedInput(format!("{disc} is not a discriminant")))
    }
}

/// Behaviour of a prime p in the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Split,
    Inert,
    Ramified,
}

/// Splitting type of p: ramified when p divides Delta_K f, otherwise by the
/// Kronecker symbol (Delta_K | p).
pub fn splitting_type(order: &CMOrder, p: u64) -> Flavor {
    let p_i = p as i64;
    if (order.delta_k * order.f) % p_i == 0 {
        return Flavor::Ramified;
    }
    if p == 2 {
        return if order.delta_k.rem_euclid(8) == 1 { Flavor::Split } else { Flavor::Inert };
    }
    if legendre(order.delta_k as i128, p) == 1 {
        Flavor::Split
    } else {
        Flavor::Inert
    }
}

/// Closed-form order of the Cartan subgroup modulo p^n.
pub fn expected_cartan_order(flavor: Flavor, p: u64, n: u32) -> u64 {
    match flavor {
        Flavor::Ramified => p.pow(2 * n - 1) * (p - 1),
        Flavor::Split => p.pow(2 * (n - 1)) * (p - 1) * (p - 1),
        Flavor::Inert => p.pow(2 * (n - 1)) * (p * p - 1),
    }
}

/// Cartan parameters (delta, phi) modulo M.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CartanParams {
    pub order: CMOrder,
    pub modulus: u64,
    pub delta: ModInt,
    pub phi: ModInt,
    /// Splitting type of p when M is a power of a prime p.
    pub flavor: Option<Flavor>,
}

/// Parameters of the Cartan presentation for `order` modulo `modulus`.
///
/// With disc = 0 mod 4 or M odd: delta = disc/4 and phi = 0. Otherwise
/// delta = ((Delta_K - 1)/4) f^2 and phi = f.
pub fn params_for(order: &CMOrder, modulus: u64) -> Result<CartanParams> {
    if modulus < 2 {
        return Err(Error::BadModulus(modulus));
    }
    let disc = order.disc();
    let (delta, phi) = if disc.rem_euclid(4) == 0 {
        (ModInt::new((disc / 4) as i128, modulus)?, ModInt::new(0, modulus)?)
    } else if modulus % 2 == 1 {
        (rational_residue(disc as i128, 4, modulus)?, ModInt::new(0, modulus)?)
    } else {
        let d = ((order.delta_k - 1) / 4) as i128 * (order.f as i128) * (order.f as i128);
        (ModInt::new(d, modulus)?, ModInt::new(order.f as i128, modulus)?)
    };
    let flavor = prime_power(modulus).map(|(p, _)| splitting_type(order, p));
    Ok(CartanParams { order: *order, modulus, delta, phi, flavor })
}

impl CartanParams {
    fn m(&self) -> i64 {
        self.modulus as i64
    }

    /// The Cartan matrix c(a, b) = [[a + b phi, b], [delta b, a]].
    pub fn cartan_matrix(&self, a: i64, b: i64) -> Result<Mat2> {
        let m = self.m() as i128;
        let (a, b) = (a as i128, b as i128);
        let phi = self.phi.value() as i128;
        let delta = self.delta.value() as i128;
        let e = [(a + b * phi) % m, b % m, (delta * b) % m, a % m].map(|x| x as i64);
        let x = Mat2::new(e, self.modulus)?;
        if !x.is_invertible() {
            return Err(Error::NonUnitDet { modulus: self.modulus });
        }
        Ok(x)
    }

    /// c(a, b) with rational a = an/ad and b = bn/bd.
    pub fn cartan_matrix_rational(&self, a: (i64, i64), b: (i64, i64)) -> Result<Mat2> {
        let ar = rational_residue(a.0 as i128, a.1 as i128, self.modulus)?;
        let br = rational_residue(b.0 as i128, b.1 as i128, self.modulus)?;
        self.cartan_matrix(ar.value() as i64, br.value() as i64)
    }

    /// The matrix c_eps = [[-eps, 0], [phi, eps]] normalizing the Cartan subgroup.
    pub fn conj_matrix(&self, eps: i64) -> Result<Mat2> {
        Mat2::new([-eps, 0, self.phi.value() as i64, eps], self.modulus)
    }

    /// Whether a matrix has the shape c(a, b).
    pub fn is_cartan(&self, x: &Mat2) -> bool {
        let m = self.modulus;
        let [e11, e12, e21, e22] = x.entries();
        let phi = self.phi.value();
        let delta = self.delta.value();
        e11 == (e22 + e12 * phi) % m && e21 == (delta * e12) % m
    }
}

/// All invertible Cartan matrices in canonical order.
pub fn cartan_elements(params: &CartanParams) -> Result<Vec<Mat2>> {
    let m = params.m();
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            match params.cartan_matrix(a, b) {
                Ok(x) => out.push(x),
                Err(Error::NonUnitDet { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// The Cartan subgroup C(M) by enumeration, with a greedy generating set.
pub fn build_cartan(params: &CartanParams) -> Result<FiniteMatGroup> {
    FiniteMatGroup::from_closed_set(cartan_elements(params)?, params.modulus)
}

/// The normalizer N(M) = <C(M), c_1>.
pub fn build_normalizer(params: &CartanParams) -> Result<FiniteMatGroup> {
    let c = build_cartan(params)?;
    let mut gens = c.generators().to_vec();
    gens.push(params.conj_matrix(1)?);
    FiniteMatGroup::generated_by(&gens, params.modulus)
}

/// The p^2 matrices I + p^n [[k1 + phi k2, k2], [delta k2, k1]] modulo p^{n+1}.
///
/// They form the kernel of N(p^{n+1}) -> N(p^n) for n >= 1.
pub fn kernel_matrices(params: &CartanParams) -> Result<Vec<Mat2>> {
    let (p, e) = level(params.modulus)?;
    let t = p.pow(e - 1) as i64;
    let phi = params.phi.value() as i64;
    let delta = params.delta.value() as i64;
    let p = p as i64;
    let mut out = Vec::new();
    for k1 in 0..p {
        for k2 in 0..p {
            out.push(Mat2::new([1 + t * (k1 + phi * k2), t * k2, t * delta * k2, 1 + t * k1], params.modulus)?);
        }
    }
    Ok(out)
}

fn level(modulus: u64) -> Result<(u64, u32)> {
    match prime_power(modulus) {
        Some((p, e)) if e >= 2 => Ok((p, e)),
        _ => Err(Error::UnsupportedInput(format!("kernel matrices need a modulus p^(n+1) with n >= 1, got {modulus}"))),
    }
}

fn odd_prime_power(p: u64, n: u32) -> Result<u64> {
    if p == 2 || !crate::residues::is_prime(p) || n < 1 {
        return Err(Error::UnsupportedInput(format!("need an odd prime and n >= 1, got p = {p}, n = {n}")));
    }
    let m = p.checked_pow(n).ok_or(Error::BadModulus(u64::MAX))?;
    if m > crate::matgroups::MAX_MODULUS {
        return Err(Error::BadModulus(m));
    }
    Ok(m)
}

/// The split Cartan diag(a, b) modulo p^n for an odd prime p.
pub fn split_cartan(p: u64, n: u32) -> Result<FiniteMatGroup> {
    let m = odd_prime_power(p, n)?;
    let mut elems = Vec::new();
    for a in 0..m as i64 {
        if a as u64 % p == 0 {
            continue;
        }
        for b in 0..m as i64 {
            if b as u64 % p != 0 {
                elems.push(Mat2::new([a, 0, 0, b], m)?);
            }
        }
    }
    FiniteMatGroup::from_closed_set(elems, m)
}

/// The split normalizer <C_sp, [[0,1],[1,0]]>.
pub fn split_normalizer(p: u64, n: u32) -> Result<FiniteMatGroup> {
    let c = split_cartan(p, n)?;
    let mut gens = c.generators().to_vec();
    gens.push(Mat2::new([0, 1, 1, 0], c.modulus())?);
    FiniteMatGroup::generated_by(&gens, c.modulus())
}

/// The nonsplit matrix [[a, delta b], [b, a]] with delta given as a rational.
pub fn nonsplit_matrix(a: i64, b: i64, delta: (i64, i64), modulus: u64) -> Result<Mat2> {
    let d = rational_residue(delta.0 as i128, delta.1 as i128, modulus)?.value() as i128;
    let db = (d * b as i128).rem_euclid(modulus as i128) as i64;
    Mat2::new([a, db, b, a], modulus)
}

/// The nonsplit Cartan [[a, delta b], [b, a]] modulo p^n; delta must be a
/// non-square unit modulo p.
pub fn nonsplit_cartan(p: u64, n: u32, delta: (i64, i64)) -> Result<FiniteMatGroup> {
    let m = odd_prime_power(p, n)?;
    let dp = rational_residue(delta.0 as i128, delta.1 as i128, p).map_err(|_| Error::BadDelta {
        num: delta.0,
        den: delta.1,
        p,
    })?;
    if legendre(dp.value() as i128, p) != -1 {
        return Err(Error::BadDelta { num: delta.0, den: delta.1, p });
    }
    let mut elems = Vec::new();
    for a in 0..m as i64 {
        for b in 0..m as i64 {
            let x = nonsplit_matrix(a, b, delta, m)?;
            if x.is_invertible() {
                elems.push(x);
            }
        }
    }
    FiniteMatGroup::from_closed_set(elems, m)
}

/// The nonsplit normalizer <C_ns, diag(1, -1)>.
pub fn nonsplit_normalizer(p: u64, n: u32, delta: (i64, i64)) -> Result<FiniteMatGroup> {
    let c = nonsplit_cartan(p, n, delta)?;
    let mut gens = c.generators().to_vec();
    gens.push(Mat2::new([1, 0, 0, -1], c.modulus())?);
    FiniteMatGroup::generated_by(&gens, c.modulus())
}

/// Kernel matrices diag(1 + k1 p^n, 1 + k2 p^n) modulo p^{n+1}.
pub fn split_kernel_matrices(p: u64, n: u32) -> Result<Vec<Mat2>> {
    let m = odd_prime_power(p, n + 1)?;
    let t = p.pow(n) as i64;
    let mut out = Vec::new();
    for k1 in 0..p as i64 {
        for k2 in 0..p as i64 {
            out.push(Mat2::new([1 + k1 * t, 0, 0, 1 + k2 * t], m)?);
        }
    }
    Ok(out)
}

/// Kernel matrices I + p^n [[k1, delta k2], [k2, k1]] modulo p^{n+1}.
pub fn nonsplit_kernel_matrices(p: u64, n: u32, delta: (i64, i64)) -> Result<Vec<Mat2>> {
    let m = odd_prime_power(p, n + 1)?;
    let t = p.pow(n) as i64;
    let d = rational_residue(delta.0 as i128, delta.1 as i128, m)?.value() as i64;
    let mut out = Vec::new();
    for k1 in 0..p as i64 {
        for k2 in 0..p as i64 {
            out.push(Mat2::new([1 + t * k1, t * d * k2, t * k2, 1 + t * k1], m)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroups::kernel_of_reduction;

    #[test]
    fn order_from_disc() {
        assert_eq!(CMOrder::from_disc(-12).unwrap(), CMOrder::new(-3, 2));
        assert_eq!(CMOrder::from_disc(-16).unwrap(), CMOrder::new(-4, 2));
        assert_eq!(CMOrder::from_disc(-163).unwrap(), CMOrder::new(-163, 1));
        assert_eq!(CMOrder::from_disc(-8).unwrap(), CMOrder::new(-8, 1));
        assert!(CMOrder::from_disc(-5).is_err());
    }

    #[test]
    fn splitting_types() {
        assert_eq!(splitting_type(&CMOrder::new(-7, 1), 2), Flavor::Split);
        assert_eq!(splitting_type(&CMOrder::new(-3, 1), 2), Flavor::Inert);
        assert_eq!(splitting_type(&CMOrder::new(-3, 2), 2), Flavor::Ramified);
        assert_eq!(splitting_type(&CMOrder::new(-4, 1), 5), Flavor::Split);
        assert_eq!(splitting_type(&CMOrder::new(-7, 1), 5), Flavor::Inert);
        assert_eq!(splitting_type(&CMOrder::new(-7, 1), 7), Flavor::Ramified);
    }

    #[test]
    fn params_examples() {
        let p = params_for(&CMOrder::new(-7, 1), 8).unwrap();
        assert_eq!((p.delta.value(), p.phi.value()), (6, 1));
        let p = params_for(&CMOrder::new(-7, 1), 5).unwrap();
        // -7/4 mod 5 = 2.
        assert_eq!((p.delta.value(), p.phi.value()), (2, 0));
        let p = params_for(&CMOrder::new(-4, 1), 4).unwrap();
        assert_eq!((p.delta.value(), p.phi.value()), (3, 0));
    }

    #[test]
    fn cartan_is_abelian_and_normalized() {
        let params = params_for(&CMOrder::new(-11, 1), 8).unwrap();
        let c = build_cartan(&params).unwrap();
        let n = build_normalizer(&params).unwrap();
        assert!(c.is_abelian());
        assert_eq!(n.order(), 2 * c.order());
        let c1 = params.conj_matrix(1).unwrap();
        for g in c.elements() {
            assert!(c.contains(&g.conjugate_by(&c1).unwrap()));
        }
    }

    #[test]
    fn kernel_matrices_match_brute_force() {
        for (order, p, n) in [(CMOrder::new(-7, 1), 2u64, 2u32), (CMOrder::new(-4, 1), 3, 1)] {
            let params = params_for(&order, p.pow(n + 1)).unwrap();
            let nrm = build_normalizer(&params).unwrap();
            let k = kernel_of_reduction(&nrm, p.pow(n)).unwrap();
            let mut km = kernel_matrices(&params).unwrap();
            km.sort_unstable();
            assert_eq!(k.elements(), &km[..]);
        }
    }

    #[test]
    fn nonsplit_rejects_square_delta() {
        assert!(matches!(nonsplit_cartan(5, 1, (4, 1)), Err(Error::BadDelta { .. })));
        assert_eq!(nonsplit_cartan(5, 1, (2, 1)).unwrap().order(), 24);
        assert_eq!(split_normalizer(5, 1).unwrap().order(), 32);
    }
}
