//! The maximal abelian subextension of Q(E[p^n]) for a CM curve E over Q.
//!
//! The answer is always a compositum Q(zeta_m, sqrt(d_1), ..., sqrt(d_k)),
//! stored as an [`AbelianFieldDesc`] in a canonical form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::CMOrder;
use crate::cmcurves::{format_rational, predicted_index, square_decomposition, twist_data, RationalCurve};
use crate::error::{Error, Result};
use crate::residues::{euler_phi, factorize, fundamental_discriminant, is_prime, squarefree_part};

/// Q(zeta_m) adjoined with square roots of the listed discriminants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianFieldDesc {
    #[serde(rename = "cycloLevel")]
    pub cyclo_level: u64,
    #[serde(rename = "quadDiscs")]
    pub quad_discs: Vec<i64>,
}

impl AbelianFieldDesc {
    /// A descriptor, not yet canonicalized.
    pub fn new(cyclo_level: u64, quad_discs: Vec<i64>) -> Self {
        AbelianFieldDesc { cyclo_level, quad_discs }
    }
}

/// Squarefree integers viewed as vectors over F_2 (sign bit plus one bit per prime).
struct SquareClasses {
    primes: Vec<i128>,
}

impl SquareClasses {
    fn encode(&self, s: i128) -> u64 {
        let mut v = u64::from(s < 0);
        for (i, p) in self.primes.iter().enumerate() {
            if s % p == 0 {
                v |= 1 << (i + 1);
            }
        }
        v
    }

    fn decode(&self, v: u64) -> i128 {
        let mut s: i128 = if v & 1 == 1 { -1 } else { 1 };
        for (i, p) in self.primes.iter().enumerate() {
            if v >> (i + 1) & 1 == 1 {
                s *= p;
            }
        }
        s
    }
}

/// Add `v` to an F_2 basis kept in echelon form by leading bit; returns whether it was new.
fn insert_basis(basis: &mut Vec<u64>, mut v: u64) -> bool {
    for b in basis.iter() {
        let lead = 63 - b.leading_zeros();
        if v >> lead & 1 == 1 {
            v ^= b;
        }
    }
    if v == 0 {
        return false;
    }
    basis.push(v);
    basis.sort_unstable_by(|a, b| b.cmp(a));
    // Keep basis reduced so the leading-bit elimination above stays valid.
    for i in 0..basis.len() {
        let lead = 63 - basis[i].leading_zeros();
        for j in 0..basis.len() {
            if i != j && basis[j] >> lead & 1 == 1 {
                basis[j] ^= basis[i];
            }
        }
    }
    basis.sort_unstable_by(|a, b| b.cmp(a));
    true
}

fn span(basis: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for b in basis {
        let extra: Vec<u64> = out.iter().map(|x| x ^ b).collect();
        out.extend(extra);
    }
    out
}

/// Ordering key for coset representatives: smaller |s| first, positive before negative.
fn rep_key(s: i128) -> (u128, bool) {
    (s.unsigned_abs(), s < 0)
}

/// Canonical form of a field descriptor.
///
/// The level m = 2 mod 4 is halved, discriminants already inside Q(zeta_m)
/// are dropped, the rest are reduced modulo the quadratic subfields of
/// Q(zeta_m), and each class is represented by the square class of least
/// absolute value (positive on ties). The resulting basis is chosen greedily
/// in that order and stored as fundamental discriminants.
pub fn canonicalize(desc: &AbelianFieldDesc) -> Result<AbelianFieldDesc> {
    let mut m = desc.cyclo_level;
    if m == 0 {
        return Err(Error::BadModulus(0));
    }
    if m % 4 == 2 {
        m /= 2;
    }
    let mut inputs = Vec::new();
    for &d in &desc.quad_discs {
        let s = squarefree_part(d as i128)?;
        if s != 1 {
            inputs.push(s);
        }
    }
    let mut subfield_gens: Vec<i128> = Vec::new();
    for (q, _) in factorize(m as u128) {
        if q != 2 {
            let q = q as i128;
            subfield_gens.push(if q % 4 == 1 { q } else { -q });
        }
    }
    if m % 4 == 0 {
        subfield_gens.push(-1);
    }
    if m % 8 == 0 {
        subfield_gens.push(2);
    }
    let mut primes: Vec<i128> = Vec::new();
    for s in inputs.iter().chain(subfield_gens.iter()) {
        for (p, _) in factorize(s.unsigned_abs()) {
            if !primes.contains(&(p as i128)) {
                primes.push(p as i128);
            }
        }
    }
    primes.sort_unstable();
    if primes.len() > 62 {
        return Err(Error::UnsupportedInput("too many primes in field descriptor".into()));
    }
    let sc = SquareClasses { primes };
    let mut w_basis = Vec::new();
    for s in &subfield_gens {
        insert_basis(&mut w_basis, sc.encode(*s));
    }
    let w = span(&w_basis);
    let mut in_basis = Vec::new();
    for s in &inputs {
        insert_basis(&mut in_basis, sc.encode(*s));
    }
    let mut reps: Vec<i128> = span(&in_basis)
        .into_iter()
        .map(|v| w.iter().map(|x| sc.decode(v ^ x)).min_by_key(|&s| rep_key(s)).expect("span contains zero"))
        .filter(|&s| s != 1)
        .collect();
    reps.sort_unstable_by_key(|&s| rep_key(s));
    reps.dedup();
    let mut basis = w_basis.clone();
    let mut chosen = Vec::new();
    for s in reps {
        if insert_basis(&mut basis, sc.encode(s)) {
            chosen.push(fundamental_discriminant(s)? as i64);
        }
    }
    Ok(AbelianFieldDesc { cyclo_level: m, quad_discs: chosen })
}

/// [M : Q] = phi(m) * 2^k for a canonical descriptor with k discriminants.
pub fn field_degree(desc: &AbelianFieldDesc) -> Result<u64> {
    let c = canonicalize(desc)?;
    Ok(euler_phi(c.cyclo_level) << c.quad_discs.len())
}

/// Which case of the classification applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremCase {
    #[serde(rename = "Thm1.1")]
    T11,
    #[serde(rename = "Thm1.2")]
    T12,
    #[serde(rename = "Thm1.3")]
    T13,
    #[serde(rename = "Thm1.4a")]
    T14a,
    #[serde(rename = "Thm1.4bi")]
    T14bi,
    #[serde(rename = "Thm1.4bii")]
    T14bii,
    #[serde(rename = "Thm1.4biii")]
    T14biii,
}

impl TheoremCase {
    /// Wire tag such as "Thm1.4bii".
    pub fn tag(&self) -> &'static str {
        match self {
            TheoremCase::T11 => "Thm1.1",
            TheoremCase::T12 => "Thm1.2",
            TheoremCase::T13 => "Thm1.3",
            TheoremCase::T14a => "Thm1.4a",
            TheoremCase::T14bi => "Thm1.4bi",
            TheoremCase::T14bii => "Thm1.4bii",
            TheoremCase::T14biii => "Thm1.4biii",
        }
    }
}

impl fmt::Display for TheoremCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Curve coefficients as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCoeffs {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
}

/// Result of classifying one (curve, p, n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub curve: CurveCoeffs,
    pub order: CMOrder,
    pub p: u64,
    pub n: u32,
    pub alpha: Option<i64>,
    pub field: AbelianFieldDesc,
    pub degree: u64,
    #[serde(rename = "predictedIndex")]
    pub predicted_index: Option<u32>,
    #[serde(rename = "theoremCase")]
    pub theorem_case: TheoremCase,
}

impl ClassificationReport {
    /// One-line human-readable description, e.g. "M = K(zeta_5), K = Q(sqrt(-7)), degree 8".
    pub fn describe(&self) -> String {
        describe_field(&self.field, Some(&self.order), self.degree)
    }
}

/// Render a canonical descriptor, writing K for Q(sqrt(Delta_K)) when it is a generator.
pub fn describe_field(desc: &AbelianFieldDesc, order: Option<&CMOrder>, degree: u64) -> String {
    let m = desc.cyclo_level;
    let k_disc = order.and_then(|o| {
        let k = canonicalize(&AbelianFieldDesc::new(m, vec![o.delta_k])).ok()?;
        k.quad_discs.first().copied().filter(|d| desc.quad_discs.contains(d))
    });
    let mut parts = Vec::new();
    if m > 1 {
        parts.push(format!("zeta_{m}"));
    }
    for &d in &desc.quad_discs {
        if Some(d) != k_disc {
            let s = squarefree_part(d as i128).unwrap_or(d as i128);
            parts.push(format!("sqrt({s})"));
        }
    }
    let inner = if parts.is_empty() { String::new() } else { format!("({})", parts.join(", ")) };
    match k_disc {
        Some(d) => {
            let s = squarefree_part(d as i128).unwrap_or(d as i128);
            format!("M = K{inner}, K = Q(sqrt({s})), degree {degree}")
        }
        None => format!("M = Q{inner}, degree {degree}"),
    }
}

fn pow_checked(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e).ok_or_else(|| Error::UnsupportedInput(format!("{p}^{e} overflows")))
}

fn disc_i64(d: i128) -> Result<i64> {
    i64::try_from(d).map_err(|_| Error::UnsupportedInput("alpha out of range".into()))
}

/// The maximal abelian extension of Q inside Q(E[p^n]).
pub fn classify_max_abelian(curve: &RationalCurve, p: u64, n: u32) -> Result<ClassificationReport> {
    if !is_prime(p) {
        return Err(Error::UnsupportedInput(format!("p = {p} is not prime")));
    }
    if n < 1 {
        return Err(Error::UnsupportedInput("n must be at least 1".into()));
    }
    let tw = twist_data(curve)?;
    let order = tw.order;
    let disc = order.disc();
    let alpha = disc_i64(tw.alpha)?;
    let pn = pow_checked(p, n)?;
    let (case, level, discs): (TheoremCase, u64, Vec<i64>) = if p != 2 {
        if disc % p as i64 != 0 {
            (TheoremCase::T11, pn, vec![order.delta_k])
        } else if disc == -3 {
            (TheoremCase::T13, pn, vec![alpha])
        } else {
            (TheoremCase::T12, pn, vec![alpha])
        }
    } else if disc % 2 != 0 {
        (TheoremCase::T14a, pn, vec![order.delta_k])
    } else {
        let next = pow_checked(2, n + 1)?;
        match disc {
            -12 | -28 => {
                if n == 1 {
                    (TheoremCase::T14bi, 1, vec![-disc])
                } else {
                    (TheoremCase::T14bi, next, vec![order.delta_k])
                }
            }
            -4 => {
                let (s, u) = square_decomposition(tw.d)?;
                if n == 1 {
                    let discs = match s {
                        1 => vec![-4],
                        -1 => vec![],
                        _ => vec![disc_i64(-s)?],
                    };
                    (TheoremCase::T14bii, 1, discs)
                } else if n == 2 && (s == 2 || s == -2) && u != 1 && u != 2 {
                    // Index-2 image with d = +-2t^2: the 4-torsion field is
                    // Q(zeta_8, (2t^2)^(1/4)), non-abelian of degree 8, so only Q(zeta_8) survives.
                    (TheoremCase::T14bii, 8, vec![])
                } else {
                    (TheoremCase::T14bii, next, vec![alpha])
                }
            }
            -8 | -16 => {
                if n == 1 {
                    (TheoremCase::T14biii, 1, vec![8])
                } else if n == 2 && disc == -8 && [1, -1, 2, -2].contains(&alpha) {
                    // The 4-torsion field is abelian of degree 8 and unramified
                    // outside 2, which forces it to be Q(zeta_16).
                    (TheoremCase::T14biii, 16, vec![])
                } else {
                    (TheoremCase::T14biii, next, vec![alpha])
                }
            }
            _ => return Err(Error::NotCM),
        }
    };
    let field = canonicalize(&AbelianFieldDesc::new(level, discs))?;
    let degree = field_degree(&field)?;
    Ok(ClassificationReport {
        curve: CurveCoeffs { a: format_rational(curve.a()), b: format_rational(curve.b()) },
        order,
        p,
        n,
        alpha: Some(alpha),
        field,
        degree,
        predicted_index: predicted_index(curve, p, n)?,
        theorem_case: case,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(m: u64, d: &[i64]) -> AbelianFieldDesc {
        canonicalize(&AbelianFieldDesc::new(m, d.to_vec())).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canon(5, &[-7]), AbelianFieldDesc::new(5, vec![-7]));
        assert_eq!(canon(5, &[-35]), AbelianFieldDesc::new(5, vec![-7]));
        assert_eq!(canon(7, &[-56]), AbelianFieldDesc::new(7, vec![8]));
        assert_eq!(canon(7, &[-7]), AbelianFieldDesc::new(7, vec![]));
        assert_eq!(canon(8, &[-3]), AbelianFieldDesc::new(8, vec![12]));
        assert_eq!(canon(6, &[-3]), AbelianFieldDesc::new(3, vec![]));
        assert_eq!(canon(1, &[12, -3, -4]), AbelianFieldDesc::new(1, vec![-4, 12]));
        assert_eq!(canon(3, &[-24]), AbelianFieldDesc::new(3, vec![8]));
        assert_eq!(canon(1, &[1]), AbelianFieldDesc::new(1, vec![]));
    }

    #[test]
    fn degrees() {
        assert_eq!(field_degree(&AbelianFieldDesc::new(5, vec![-7])).unwrap(), 8);
        assert_eq!(field_degree(&AbelianFieldDesc::new(7, vec![-56])).unwrap(), 12);
        assert_eq!(field_degree(&AbelianFieldDesc::new(1, vec![-3, -4, 12])).unwrap(), 4);
    }

    #[test]
    fn describe_examples() {
        let e = RationalCurve::from_ints(-35, 98).unwrap();
        let r = classify_max_abelian(&e, 5, 1).unwrap();
        assert_eq!(r.describe(), "M = K(zeta_5), K = Q(sqrt(-7)), degree 8");
        let e = RationalCurve::from_ints(0, -6).unwrap();
        let r = classify_max_abelian(&e, 3, 1).unwrap();
        assert_eq!(r.describe(), "M = Q(zeta_3, sqrt(2)), degree 4");
    }

    #[test]
    fn report_json_round_trip() {
        let e = RationalCurve::from_ints(-140, -784).unwrap();
        let r = classify_max_abelian(&e, 7, 1).unwrap();
        assert_eq!(r.theorem_case, TheoremCase::T12);
        assert_eq!(r.alpha, Some(-14));
        assert_eq!(r.degree, 12);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"theoremCase\":\"Thm1.2\""));
        assert!(s.contains("\"deltaK\":-7"));
        let back: ClassificationReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn input_errors() {
        let e = RationalCurve::from_ints(-35, 98).unwrap();
        assert!(matches!(classify_max_abelian(&e, 4, 1), Err(Error::UnsupportedInput(_))));
        assert!(matches!(classify_max_abelian(&e, 5, 0), Err(Error::UnsupportedInput(_))));
        let e = RationalCurve::from_ints(1, 1).unwrap();
        assert_eq!(classify_max_abelian(&e, 5, 1), Err(Error::NotCM));
    }
}
