//! Residue arithmetic in Z/MZ and elementary integer number theory.
//!
//! Everything here is exact. Integers are carried as `i128` so that products
//! of curve coefficients stay inside the representable range.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// An element of Z/MZ stored as its least nonnegative representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModInt {
    value: u64,
    modulus: u64,
}

#[allow(clippy::should_implement_trait)]
impl ModInt {
    /// Reduce an arbitrary integer modulo `modulus` (which must be at least 1).
    pub fn new(value: i128, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::BadModulus(modulus));
        }
        let v = value.rem_euclid(modulus as i128) as u64;
        Ok(ModInt { value: v, modulus })
    }

    /// The least nonnegative representative.
    pub fn value(self) -> u64 {
        self.value
    }

    /// The modulus M of the ring Z/MZ.
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    fn check(self, other: ModInt) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch { left: self.modulus, right: other.modulus });
        }
        Ok(())
    }

    /// Sum in Z/MZ.
    pub fn add(self, other: ModInt) -> Result<ModInt> {
        self.check(other)?;
        let v = (self.value as u128 + other.value as u128) % self.modulus as u128;
        Ok(ModInt { value: v as u64, modulus: self.modulus })
    }

    /// Difference in Z/MZ.
    pub fn sub(self, other: ModInt) -> Result<ModInt> {
        self.check(other)?;
        let m = self.modulus as u128;
        let v = (self.value as u128 + m - other.value as u128) % m;
        Ok(ModInt { value: v as u64, modulus: self.modulus })
    }

    /// Product in Z/MZ.
    pub fn mul(self, other: ModInt) -> Result<ModInt> {
        self.check(other)?;
        let v = (self.value as u128 * other.value as u128) % self.modulus as u128;
        Ok(ModInt { value: v as u64, modulus: self.modulus })
    }

    /// Additive inverse.
    pub fn neg(self) -> ModInt {
        let v = (self.modulus - self.value) % self.modulus;
        ModInt { value: v, modulus: self.modulus }
    }

    /// Whether the residue is a unit.
    pub fn is_unit(self) -> bool {
        self.value.gcd(&self.modulus) == 1
    }

    /// Multiplicative inverse, or `NonUnit` when gcd(value, M) > 1.
    pub fn inv(self) -> Result<ModInt> {
        let inv = inv_mod(self.value as i128, self.modulus)?;
        Ok(ModInt { value: inv, modulus: self.modulus })
    }
}

impl fmt::Display for ModInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// Inverse of `a` modulo `m` as a least nonnegative representative.
pub fn inv_mod(a: i128, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::BadModulus(m));
    }
    if m == 1 {
        return Ok(0);
    }
    let a_red = a.rem_euclid(m as i128);
    let egcd = a_red.extended_gcd(&(m as i128));
    if egcd.gcd != 1 {
        return Err(Error::NonUnit { value: a, modulus: m });
    }
    Ok(egcd.x.rem_euclid(m as i128) as u64)
}

/// The residue of num/den in Z/MZ; `den` must be a unit modulo M.
pub fn rational_residue(num: i128, den: i128, modulus: u64) -> Result<ModInt> {
    if modulus == 0 {
        return Err(Error::BadModulus(modulus));
    }
    if den == 0 {
        return Err(Error::ZeroInput);
    }
    let inv = inv_mod(den, modulus).map_err(|_| Error::NonUnit { value: den, modulus })?;
    let n = num.rem_euclid(modulus as i128) as u128;
    let v = (n * inv as u128) % modulus as u128;
    Ok(ModInt { value: v as u64, modulus })
}

/// Deterministic primality test by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization of |n| by trial division, primes ascending.
pub fn factorize(n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut rest = n;
    if rest < 2 {
        return out;
    }
    let mut d: u128 = 2;
    while d * d <= rest {
        if rest % d == 0 {
            let mut e = 0;
            while rest % d == 0 {
                rest /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    out
}

/// If `m` is a prime power p^e with e >= 1, return (p, e).
pub fn prime_power(m: u64) -> Option<(u64, u32)> {
    let f = factorize(m as u128);
    if f.len() == 1 {
        Some((f[0].0 as u64, f[0].1))
    } else {
        None
    }
}

/// Euler's totient.
pub fn euler_phi(m: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    factorize(m as u128).into_iter().fold(1u64, |acc, (p, e)| acc * (p as u64 - 1) * (p as u64).pow(e - 1))
}

/// The k-th-power-free part of a nonzero integer, sign preserved.
///
/// `n = s * t^k` with `s` k-th-power-free; the function returns `s`.
pub fn power_free_part(n: i128, k: u32) -> Result<i128> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if k == 0 {
        return Err(Error::UnsupportedInput("exponent k must be positive".into()));
    }
    let sign = n.signum();
    let mut s: i128 = 1;
    for (p, e) in factorize(n.unsigned_abs()) {
        let r = e % k;
        s *= (p as i128).pow(r);
    }
    // An odd k allows the sign to be absorbed into the k-th power.
    if k % 2 == 1 {
        Ok(s)
    } else {
        Ok(sign * s)
    }
}

/// The squarefree part of a nonzero integer, sign preserved.
pub fn squarefree_part(n: i128) -> Result<i128> {
    power_free_part(n, 2)
}

/// Squarefree representative of the class of num/den in Q^*/Q^{*2}.
pub fn squarefree_class_rational(num: i128, den: i128) -> Result<i128> {
    if num == 0 || den == 0 {
        return Err(Error::ZeroInput);
    }
    let s1 = squarefree_part(num)?;
    let s2 = squarefree_part(den)?;
    let g = s1.unsigned_abs().gcd(&s2.unsigned_abs()) as i128;
    Ok((s1 / g) * (s2 / g))
}

/// Discriminant of Q(sqrt(d)) for a squarefree integer d; returns 1 for d = 1.
pub fn fundamental_discriminant(d: i128) -> Result<i128> {
    if d == 0 {
        return Err(Error::ZeroInput);
    }
    let s = squarefree_part(d)?;
    if s == 1 {
        return Ok(1);
    }
    if s.rem_euclid(4) == 1 {
        Ok(s)
    } else {
        Ok(4 * s)
    }
}

/// Whether Q(sqrt(d)) is contained in the cyclotomic field Q(zeta_m).
pub fn quad_in_cyclotomic(d: i128, m: u64) -> Result<bool> {
    let disc = fundamental_discriminant(d)?;
    Ok((m as u128) % disc.unsigned_abs() == 0)
}

/// Legendre symbol (a | p) for an odd prime p, computed by Euler's criterion.
pub fn legendre(a: i128, p: u64) -> i32 {
    let a = a.rem_euclid(p as i128) as u64;
    if a == 0 {
        return 0;
    }
    let r = pow_mod(a, (p - 1) / 2, p);
    if r == 1 {
        1
    } else {
        -1
    }
}

/// a^e mod m by square-and-multiply.
pub fn pow_mod(a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = (a % m) as u128;
    let mut acc: u128 = 1;
    let mm = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % mm;
        }
        base = base * base % mm;
        e >>= 1;
    }
    acc as u64
}

/// Whether an integer is a perfect k-th power in Z (negative values allowed for odd k).
pub fn is_perfect_power(n: i128, k: u32) -> bool {
    if n == 0 {
        return true;
    }
    if n < 0 && k % 2 == 0 {
        return false;
    }
    factorize(n.unsigned_abs()).iter().all(|&(_, e)| e % k == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_residue_examples() {
        // -7/4 mod 5: 4^{-1} = 4, -28 = 2 mod 5.
        assert_eq!(rational_residue(-7, 4, 5).unwrap().value(), 2);
        assert!(matches!(rational_residue(1, 5, 25), Err(Error::NonUnit { .. })));
        assert!(matches!(rational_residue(1, 0, 7), Err(Error::ZeroInput)));
    }

    #[test]
    fn modulus_mismatch_is_reported() {
        let a = ModInt::new(1, 5).unwrap();
        let b = ModInt::new(1, 7).unwrap();
        assert!(matches!(a.add(b), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn squarefree_and_fundamental() {
        assert_eq!(squarefree_part(-24).unwrap(), -6);
        assert_eq!(squarefree_part(72).unwrap(), 2);
        assert_eq!(power_free_part(-24, 6).unwrap(), -24);
        assert_eq!(power_free_part(64 * 3, 6).unwrap(), 3);
        assert_eq!(power_free_part(-8, 3).unwrap(), 1);
        assert_eq!(fundamental_discriminant(-7).unwrap(), -7);
        assert_eq!(fundamental_discriminant(-14).unwrap(), -56);
        assert_eq!(fundamental_discriminant(3).unwrap(), 12);
        assert_eq!(fundamental_discriminant(-1).unwrap(), -4);
        assert_eq!(fundamental_discriminant(9).unwrap(), 1);
        assert_eq!(squarefree_class_rational(-2, 7).unwrap(), -14);
        assert_eq!(squarefree_class_rational(1, 12).unwrap(), 3);
        assert!(matches!(squarefree_part(0), Err(Error::ZeroInput)));
    }

    #[test]
    fn cyclotomic_quadratic_containment() {
        assert!(quad_in_cyclotomic(-7, 7).unwrap());
        assert!(quad_in_cyclotomic(5, 5).unwrap());
        assert!(!quad_in_cyclotomic(-14, 7).unwrap());
        assert!(quad_in_cyclotomic(2, 8).unwrap());
        assert!(quad_in_cyclotomic(-1, 4).unwrap());
        assert!(!quad_in_cyclotomic(2, 4).unwrap());
    }

    #[test]
    fn totient_and_primes() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(16), 8);
        assert_eq!(euler_phi(343), 294);
        assert!(is_prime(163));
        assert!(!is_prime(1));
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(12), None);
    }

    proptest! {
        #[test]
        fn inverse_round_trips(m in 2u64..5000, a in -100_000i128..100_000) {
            if let Ok(x) = ModInt::new(a, m).unwrap().inv() {
                let one = x.mul(ModInt::new(a, m).unwrap()).unwrap();
                prop_assert_eq!(one.value(), 1 % m);
            } else {
                prop_assert!(num_integer::gcd(a.rem_euclid(m as i128), m as i128) != 1);
            }
        }

        #[test]
        fn squarefree_part_times_square(n in 1i128..1_000_000, neg in any::<bool>()) {
            let n = if neg { -n } else { n };
            let s = squarefree_part(n).unwrap();
            prop_assert_eq!(n % s, 0);
            let q = n / s;
            prop_assert!(q > 0 && is_perfect_power(q, 2));
            prop_assert!(factorize(s.unsigned_abs()).iter().all(|&(_, e)| e == 1));
        }

        #[test]
        fn power_free_part_divides(n in 1i128..1_000_000, k in 2u32..7) {
            let s = power_free_part(n, k).unwrap();
            prop_assert!(is_perfect_power(n / s, k));
        }
    }
}
