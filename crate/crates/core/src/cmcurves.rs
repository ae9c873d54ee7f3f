//! Rational elliptic curves y^2 = x^3 + A x + B with complex multiplication.
//!
//! A curve with CM by one of the thirteen orders of class number one is a
//! twist of a fixed model from [`TABLE1`]. The twist class (quadratic,
//! quartic for j = 1728, sextic for j = 0) determines the integer alpha used
//! by the classifier.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cartan::CMOrder;
use crate::error::{Error, Result};
use crate::residues::{is_perfect_power, power_free_part, squarefree_class_rational, squarefree_part};

/// One row of the table of CM j-invariants with a model y^2 = x^3 + A' x + B'.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub j: i64,
    pub order: CMOrder,
    pub a: i64,
    pub b: i64,
}

const fn row(j: i64, delta_k: i64, f: i64, a: i64, b: i64) -> TableRow {
    TableRow { j, order: CMOrder::new(delta_k, f), a, b }
}

/// The thirteen rational CM j-invariants with their orders and base models.
pub const TABLE1: [TableRow; 13] = [
    row(0, -3, 1, 0, 16),
    row(54_000, -3, 2, -15, 22),
    row(-12_288_000, -3, 3, -480, 4048),
    row(1728, -4, 1, 1, 0),
    row(287_496, -4, 2, -11, 14),
    row(-3375, -7, 1, -1715, 33_614),
    row(16_581_375, -7, 2, -29_155, 1_915_998),
    row(8000, -8, 1, -4320, 96_768),
    row(-32_768, -11, 1, -9504, 365_904),
    row(-884_736, -19, 1, -608, 5776),
    row(-884_736_000, -43, 1, -13_760, 621_264),
    row(-147_197_952_000, -67, 1, -117_920, 15_585_808),
    row(-262_537_412_640_768_000, -163, 1, -34_790_720, 78_984_748_304),
];

/// The same table as a JSON document with fields j, deltaK, f, A, B.
pub const TABLE1_JSON: &str = include_str!("../data/table1.json");

/// A row of [`TABLE1_JSON`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRecord {
    pub j: String,
    #[serde(rename = "deltaK")]
    pub delta_k: i64,
    pub f: i64,
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
}

/// Parse [`TABLE1_JSON`].
pub fn table1_records() -> Vec<TableRecord> {
    serde_json::from_str(TABLE1_JSON).expect("bundled table is valid JSON")
}

/// The table row of an order, if it has class number one.
pub fn table_row(order: &CMOrder) -> Result<TableRow> {
    TABLE1.iter().find(|r| r.order == *order).copied().ok_or(Error::UnknownOrder { delta_k: order.delta_k, f: order.f })
}

/// The base model E_{Delta_K, f} of an order.
pub fn table_curve(order: &CMOrder) -> Result<RationalCurve> {
    let r = table_row(order)?;
    RationalCurve::from_ints(r.a, r.b)
}

/// A short Weierstrass curve over Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalCurve {
    a: BigRational,
    b: BigRational,
}

impl RationalCurve {
    /// A curve from rational coefficients; fails on a singular model.
    pub fn new(a: BigRational, b: BigRational) -> Result<Self> {
        let c = RationalCurve { a, b };
        if c.discriminant_core().is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(c)
    }

    /// A curve from integer coefficients.
    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        Self::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
    }

    /// A curve from decimal strings such as "-140" or "3/4".
    pub fn parse(a: &str, b: &str) -> Result<Self> {
        Self::new(parse_rational(a)?, parse_rational(b)?)
    }

    /// Coefficient A.
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient B.
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    fn discriminant_core(&self) -> BigRational {
        let four = BigRational::from_integer(4.into());
        let tw7 = BigRational::from_integer(27.into());
        &four * &self.a * &self.a * &self.a + &tw7 * &self.b * &self.b
    }

    /// The j-invariant 1728 * 4A^3 / (4A^3 + 27B^2).
    pub fn j_invariant(&self) -> BigRational {
        let four_a3 = BigRational::from_integer(4.into()) * &self.a * &self.a * &self.a;
        BigRational::from_integer(1728.into()) * &four_a3 / self.discriminant_core()
    }
}

impl fmt::Display for RationalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})x + ({})", self.a, self.b)
    }
}

impl FromStr for RationalCurve {
    type Err = Error;

    /// Parses "A,B".
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(',').ok_or_else(|| Error::UnsupportedInput(format!("expected A,B but got {s:?}")))?;
        Self::parse(a.trim(), b.trim())
    }
}

/// Parse an integer or a fraction p/q.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::UnsupportedInput(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Render a rational as "n" or "n/d".
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// The CM order of a curve, or `NotCM`.
pub fn recognize_cm(curve: &RationalCurve) -> Result<CMOrder> {
    let j = curve.j_invariant();
    TABLE1.iter().find(|r| j == BigRational::from_integer(r.j.into())).map(|r| r.order).ok_or(Error::NotCM)
}

/// Kind of twist relating a CM curve to its base model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwistKind {
    Quadratic,
    Quartic,
    Sextic,
}

/// The twist class of a CM curve and the derived integer alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistData {
    pub order: CMOrder,
    pub kind: TwistKind,
    /// Twist class: squarefree (quadratic), 4th-power-free (quartic) or 6th-power-free (sextic).
    pub d: i128,
    pub alpha: i128,
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or_else(|| Error::UnsupportedInput("coefficients too large for exact factoring".into()))
}

/// Integer representative of a rational modulo k-th powers: x * den^k.
fn integral_mod_powers(x: &BigRational, k: u32) -> Result<i128> {
    let den = x.denom().clone();
    let scaled = x * BigRational::from_integer(num_traits::pow(den, k as usize));
    to_i128(&scaled.to_integer())
}

/// Twist class and alpha of a CM curve.
pub fn twist_data(curve: &RationalCurve) -> Result<TwistData> {
    let order = recognize_cm(curve)?;
    let row = table_row(&order)?;
    match row.j {
        0 => {
            let c = curve.b() / BigRational::from_integer(16.into());
            let n = if c.is_integer() {
                to_i128(&c.to_integer())?
            } else {
                let four_b = curve.b() * BigRational::from_integer(4.into());
                if four_b.is_integer() {
                    to_i128(&four_b.to_integer())?
                } else {
                    integral_mod_powers(&c, 6)?
                }
            };
            let d = power_free_part(n, 6)?;
            Ok(TwistData { order, kind: TwistKind::Sextic, d, alpha: d })
        }
        1728 => {
            let n = integral_mod_powers(curve.a(), 4)?;
            let d = power_free_part(n, 4)?;
            Ok(TwistData { order, kind: TwistKind::Quartic, d, alpha: quartic_alpha(d)? })
        }
        _ => {
            let base_a = BigRational::from_integer(row.a.into());
            let base_b = BigRational::from_integer(row.b.into());
            let t = (curve.b() * &base_a) / (&base_b * curve.a());
            let d = squarefree_class_rational(to_i128(t.numer())?, to_i128(t.denom())?)?;
            Ok(TwistData { order, kind: TwistKind::Quadratic, d, alpha: d })
        }
    }
}

/// Write a nonzero integer as s * u^2 with s squarefree and u > 0.
pub fn square_decomposition(d: i128) -> Result<(i128, i128)> {
    let s = squarefree_part(d)?;
    let q = d / s;
    let u = (q as f64).sqrt().round() as i128;
    let u = (u.saturating_sub(1)..=u + 1).find(|x| x * x == q).expect("q is a perfect square");
    Ok((s, u))
}

/// alpha for j = 1728: u when d = s u^2 with s in {+-1, +-2} and u not in {1, 2}, else d.
fn quartic_alpha(d: i128) -> Result<i128> {
    let (s, u) = square_decomposition(d)?;
    if matches!(s, 1 | -1 | 2 | -2) && u != 1 && u != 2 {
        Ok(u)
    } else {
        Ok(d)
    }
}

/// alpha of a CM curve (see [`twist_data`]).
pub fn alpha(curve: &RationalCurve) -> Result<i128> {
    Ok(twist_data(curve)?.alpha)
}

/// Predicted index [N(p^n) : G(p^n)] when a closed form is available.
pub fn predicted_index(curve: &RationalCurve, p: u64, n: u32) -> Result<Option<u32>> {
    if n < 1 {
        return Err(Error::UnsupportedInput("n must be at least 1".into()));
    }
    let tw = twist_data(curve)?;
    let disc = tw.order.disc();
    let a = tw.alpha;
    if p == 3 && disc == -3 {
        let six: &[i128] = if n == 1 { &[1, -27] } else { &[1, -3, 9, -27, 81, -243] };
        if six.contains(&a) {
            return Ok(Some(6));
        }
        let cube = if n == 1 {
            is_perfect_power(a, 3)
        } else {
            is_perfect_power(a, 3) || is_perfect_power(3 * a, 3) || is_perfect_power(9 * a, 3)
        };
        if cube {
            return Ok(Some(3));
        }
        let excluded: &[i128] = if n == 1 { &[1, 3] } else { &[1, 3, 9] };
        let square_t = |t2: i128| -> bool {
            is_perfect_power(t2, 2) && {
                let (_, t) = square_decomposition(t2).unwrap_or((1, 1));
                !excluded.contains(&t)
            }
        };
        let is_sq = a > 0 && square_t(a);
        let is_m3sq = a < 0 && a % 3 == 0 && square_t(-a / 3);
        return Ok(Some(if is_sq || is_m3sq { 2 } else { 1 }));
    }
    if p == 2 && disc == -4 {
        let d = tw.d;
        if [1, -1, 2, -2, 4, -4, 8, -8].contains(&d) {
            return Ok(Some(4));
        }
        let (s, u) = square_decomposition(d)?;
        let t_squarefree = squarefree_part(u)? == u;
        if matches!(s, 1 | -1 | 2 | -2) && u != 1 && u != 2 && t_squarefree {
            return Ok(Some(2));
        }
        return Ok(Some(1));
    }
    if p == 2 && (disc == -8 || disc == -16) {
        return Ok(Some(if [1, -1, 2, -2].contains(&a) { 2 } else { 1 }));
    }
    Ok(None)
}

/// The quadratic twist y^2 = x^3 + A d^2 x + B d^3.
pub fn quadratic_twist(curve: &RationalCurve, d: i64) -> Result<RationalCurve> {
    let d = BigRational::from_integer(d.into());
    RationalCurve::new(curve.a() * &d * &d, curve.b() * &d * &d * &d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: i64, b: i64) -> RationalCurve {
        RationalCurve::from_ints(a, b).unwrap()
    }

    #[test]
    fn table_models_have_listed_j() {
        for r in TABLE1 {
            let e = c(r.a, r.b);
            assert_eq!(e.j_invariant(), BigRational::from_integer(r.j.into()), "{:?}", r.order);
            assert_eq!(recognize_cm(&e).unwrap(), r.order);
        }
    }

    #[test]
    fn json_table_matches_static_table() {
        let recs = table1_records();
        assert_eq!(recs.len(), TABLE1.len());
        for (rec, row) in recs.iter().zip(TABLE1.iter()) {
            assert_eq!(rec.j, row.j.to_string());
            assert_eq!((rec.delta_k, rec.f), (row.order.delta_k, row.order.f));
            assert_eq!(rec.a, row.a.to_string());
            assert_eq!(rec.b, row.b.to_string());
        }
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(&c(-140, -784)).unwrap(), -14);
        assert_eq!(alpha(&c(-35, 98)).unwrap(), 7);
        assert_eq!(alpha(&c(0, -6)).unwrap(), -24);
        assert_eq!(alpha(&c(-30, 56)).unwrap(), 3);
        assert_eq!(alpha(&c(9, 0)).unwrap(), 3);
        assert_eq!(alpha(&c(-9, 0)).unwrap(), 3);
        assert_eq!(alpha(&c(18, 0)).unwrap(), 3);
        assert_eq!(alpha(&c(4, 0)).unwrap(), 4);
        assert_eq!(alpha(&c(-1715, 33614)).unwrap(), 1);
    }

    #[test]
    fn not_cm_and_singular() {
        assert_eq!(recognize_cm(&c(1, 1)), Err(Error::NotCM));
        assert_eq!(RationalCurve::from_ints(-3, 2), Err(Error::SingularCurve));
    }

    #[test]
    fn predicted_index_examples() {
        assert_eq!(predicted_index(&c(0, 16), 3, 1).unwrap(), Some(6));
        assert_eq!(predicted_index(&c(0, 128), 3, 2).unwrap(), Some(3));
        assert_eq!(predicted_index(&c(0, -6), 3, 2).unwrap(), Some(3));
        assert_eq!(predicted_index(&c(0, -6), 3, 1).unwrap(), Some(1));
        assert_eq!(predicted_index(&c(0, 64), 3, 1).unwrap(), Some(2));
        assert_eq!(predicted_index(&c(0, 32), 3, 1).unwrap(), Some(1));
        assert_eq!(predicted_index(&c(1, 0), 2, 3).unwrap(), Some(4));
        assert_eq!(predicted_index(&c(18, 0), 2, 3).unwrap(), Some(2));
        assert_eq!(predicted_index(&c(3, 0), 2, 3).unwrap(), Some(1));
        assert_eq!(predicted_index(&c(-4320, 96768), 2, 3).unwrap(), Some(2));
        assert_eq!(predicted_index(&c(-30, 56), 2, 3).unwrap(), Some(1));
        assert_eq!(predicted_index(&c(-140, -784), 7, 1).unwrap(), None);
    }

    #[test]
    fn parsing() {
        let e: RationalCurve = "-140, -784".parse().unwrap();
        assert_eq!(e, c(-140, -784));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
    }
}
