//! Exact arithmetic in a real quadratic field `Q(sqrt(d))`.
//!
//! Every [`QNum`] carries its discriminant `d`. Mixing two different fields is
//! an error for the checked operations and a panic for the operator overloads,
//! the same way mismatched shapes are treated by array libraries.
//!
//! The canonical text form is `p/q` for rationals and `p/q+r/s*sqrt(D)`
//! otherwise; integer parts print without a denominator.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed quadratic fields: sqrt({0}) and sqrt({1})")]
    FieldMismatch(u64, u64),
    #[error("discriminant {0} is not a square-free integer >= 2")]
    InvalidDiscriminant(u64),
    #[error("cannot parse number {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// An element `a + b*sqrt(d)` of a real quadratic field, with `sqrt(d) > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QNum {
    a: BigRational,
    b: BigRational,
    d: u64,
}

/// Checks that `d` is square-free and at least 2.
pub fn validate_discriminant(d: u64) -> Result<u64, FieldError> {
    if d < 2 {
        return Err(FieldError::InvalidDiscriminant(d));
    }
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return Err(FieldError::InvalidDiscriminant(d));
            }
        }
        p += 1;
    }
    Ok(d)
}

impl QNum {
    pub fn new(a: BigRational, b: BigRational, d: u64) -> Result<Self, FieldError> {
        validate_discriminant(d)?;
        Ok(Self::raw(a, b, d))
    }

    // BigRational keeps itself reduced with a positive denominator.
    fn raw(a: BigRational, b: BigRational, d: u64) -> Self {
        QNum { a, b, d }
    }

    pub fn zero(d: u64) -> Self {
        Self::raw(BigRational::zero(), BigRational::zero(), d)
    }

    pub fn one(d: u64) -> Self {
        Self::from_int(1, d)
    }

    pub fn from_int(n: i64, d: u64) -> Self {
        Self::raw(BigRational::from_integer(n.into()), BigRational::zero(), d)
    }

    pub fn from_ratio(num: i64, den: i64, d: u64) -> Self {
        Self::raw(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
            d,
        )
    }

    pub fn from_rational(r: BigRational, d: u64) -> Self {
        Self::raw(r, BigRational::zero(), d)
    }

    /// `sqrt(d)` itself.
    pub fn sqrt_d(d: u64) -> Self {
        Self::raw(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn discriminant(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn check_field(&self, other: &QNum) -> Result<(), FieldError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(self.d, other.d))
        }
    }

    pub fn try_add(&self, other: &QNum) -> Result<QNum, FieldError> {
        self.check_field(other)?;
        Ok(Self::raw(&self.a + &other.a, &self.b + &other.b, self.d))
    }

    pub fn try_sub(&self, other: &QNum) -> Result<QNum, FieldError> {
        self.check_field(other)?;
        Ok(Self::raw(&self.a - &other.a, &self.b - &other.b, self.d))
    }

    pub fn try_mul(&self, other: &QNum) -> Result<QNum, FieldError> {
        self.check_field(other)?;
        let d = BigRational::from_integer(self.d.into());
        let a = &self.a * &other.a + &self.b * &other.b * d;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::raw(a, b, self.d))
    }

    /// Multiplicative inverse via the conjugate: `(a - b sqrt d) / (a^2 - d b^2)`.
    pub fn inv(&self) -> Result<QNum, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let norm = self.norm();
        // norm != 0 for nonzero x because d is not a perfect square
        Ok(Self::raw(&self.a / &norm, -(&self.b / &norm), self.d))
    }

    pub fn try_div(&self, other: &QNum) -> Result<QNum, FieldError> {
        self.check_field(other)?;
        self.try_mul(&other.inv()?)
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> BigRational {
        let d = BigRational::from_integer(self.d.into());
        &self.a * &self.a - &self.b * &self.b * d
    }

    pub fn conjugate(&self) -> QNum {
        Self::raw(self.a.clone(), -self.b.clone(), self.d)
    }

    pub fn scale(&self, r: &BigRational) -> QNum {
        Self::raw(&self.a * r, &self.b * r, self.d)
    }

    pub fn scale_int(&self, n: i64) -> QNum {
        self.scale(&BigRational::from_integer(n.into()))
    }

    /// Exact sign of `a + b sqrt(d)` by integer case analysis.
    pub fn signum(&self) -> Ordering {
        sign_of_parts(
            (self.a.numer().clone(), self.a.denom()),
            (self.b.numer().clone(), self.b.denom()),
            self.d,
        )
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// Sign of the difference, from unreduced numerators so no gcd is taken.
    pub fn try_cmp(&self, other: &QNum) -> Result<Ordering, FieldError> {
        self.check_field(other)?;
        if self == other {
            return Ok(Ordering::Equal);
        }
        let diff = |x: &BigRational, y: &BigRational| {
            if x.denom() == y.denom() {
                (x.numer() - y.numer(), x.denom().clone())
            } else {
                (x.numer() * y.denom() - y.numer() * x.denom(), x.denom() * y.denom())
            }
        };
        let (an, ad) = diff(&self.a, &other.a);
        let (bn, bd) = diff(&self.b, &other.b);
        Ok(sign_of_parts((an, &ad), (bn, &bd), self.d))
    }

    pub fn abs(&self) -> QNum {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn max_of(&self, other: &QNum) -> QNum {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min_of(&self, other: &QNum) -> QNum {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Exact `floor`. A float estimate is accepted only after an exact
    /// check; otherwise `floor(b sqrt d) = floor(isqrt(N D) / D)` for
    /// `b^2 d = N / D` gives a candidate that is corrected by at most one.
    pub fn floor(&self) -> BigInt {
        let approx = self.to_f64().floor();
        if approx.is_finite() && approx.abs() < 1e15 {
            let candidate = BigInt::from(approx as i64);
            if self.floor_is(&candidate) {
                return candidate;
            }
        }
        let fa = self.a.floor().to_integer();
        let fb = floor_irrational(&self.b, self.d);
        let candidate = fa + fb;
        if self.floor_is(&(&candidate + 1)) {
            candidate + 1
        } else {
            candidate
        }
    }

    /// `n <= self < n + 1`.
    fn floor_is(&self, n: &BigInt) -> bool {
        let lo = QNum::from_rational(BigRational::from_integer(n.clone()), self.d);
        let hi = QNum::from_rational(BigRational::from_integer(n + 1), self.d);
        &lo <= self && self < &hi
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Nearest float. Not used for any decision.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Decides whether `self / other` is rational. Returns the exact quotient
    /// as witness either way.
    pub fn ratio_is_rational(&self, other: &QNum) -> Result<(bool, QNum), FieldError> {
        let q = self.try_div(other)?;
        Ok((q.is_rational(), q))
    }

    /// Parses the canonical grammar, inferring `d` from the text. A purely
    /// rational literal takes `default_d`.
    pub fn parse(text: &str, default_d: u64) -> Result<QNum, FieldError> {
        let parsed = ParsedQNum::parse(text)?;
        parsed.into_field(default_d)
    }
}

fn sign_of(n: &BigInt) -> Ordering {
    n.sign().cmp(&num_bigint::Sign::NoSign)
}

/// Sign of `an/ad + (bn/bd) sqrt(d)` for positive denominators.
fn sign_of_parts((an, ad): (BigInt, &BigInt), (bn, bd): (BigInt, &BigInt), d: u64) -> Ordering {
    let sa = sign_of(&an);
    let sb = sign_of(&bn);
    match (sa, sb) {
        (s, Ordering::Equal) => s,
        (Ordering::Equal, s) => s,
        (x, y) if x == y => x,
        _ => {
            // opposite signs: the larger of a^2 and d b^2 wins
            let lhs = an * bd;
            let rhs = bn * ad;
            let lhs = &lhs * &lhs;
            let rhs = &rhs * &rhs * BigInt::from(d);
            match lhs.cmp(&rhs) {
                Ordering::Greater => sa,
                Ordering::Less => sb,
                Ordering::Equal => unreachable!("d is not a rational square"),
            }
        }
    }
}

fn floor_irrational(b: &BigRational, d: u64) -> BigInt {
    if b.is_zero() {
        return BigInt::zero();
    }
    // b^2 d = N / D with D = den^2
    let num = b.numer();
    let den = b.denom();
    let n = num * num * BigInt::from(d);
    let dd = den * den;
    let root: BigInt = Roots::sqrt(&(&n * &dd)); // floor(sqrt(N D)), never exact
    if b.is_positive() {
        root.div_floor(&dd)
    } else {
        // -sqrt(N D)/D lies strictly between -(root+1)/D and -root/D
        let below: BigInt = -(root + BigInt::one());
        below.div_floor(&dd)
    }
}

impl PartialOrd for QNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Panics when the fields differ; use [`QNum::try_cmp`] for fallible comparison.
impl Ord for QNum {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.try_cmp(other) {
            Ok(o) => o,
            Err(e) => panic!("{e}"),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QNum> for &QNum {
            type Output = QNum;
            fn $method(self, rhs: &QNum) -> QNum {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $tr<QNum> for QNum {
            type Output = QNum;
            fn $method(self, rhs: QNum) -> QNum {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QNum> for QNum {
            type Output = QNum;
            fn $method(self, rhs: &QNum) -> QNum {
                (&self).$method(rhs)
            }
        }
        impl $tr<QNum> for &QNum {
            type Output = QNum;
            fn $method(self, rhs: QNum) -> QNum {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &QNum {
    type Output = QNum;
    fn neg(self) -> QNum {
        QNum::raw(-self.a.clone(), -self.b.clone(), self.d)
    }
}

impl Neg for QNum {
    type Output = QNum;
    fn neg(self) -> QNum {
        QNum::raw(-self.a, -self.b, self.d)
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.a, f)?;
        if !self.b.is_zero() {
            if self.b.is_positive() {
                f.write_str("+")?;
            }
            fmt_rational(&self.b, f)?;
            write!(f, "*sqrt({})", self.d)?;
        }
        Ok(())
    }
}

impl fmt::Debug for QNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QNum({self})")
    }
}

impl Serialize for QNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A number parsed from text before its field is fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedQNum {
    pub a: BigRational,
    pub b: BigRational,
    pub d: Option<u64>,
}

impl ParsedQNum {
    /// `qnum := rat | rat SIGN rat "*sqrt(" uint ")"`,
    /// `rat := ["-"] uint "/" uint | ["-"] uint`.
    ///
    /// Decimal literals such as `1.25` are also accepted and read exactly.
    pub fn parse(text: &str) -> Result<Self, FieldError> {
        let err = |reason: &str| FieldError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty"));
        }
        if let Some(body) = s.strip_suffix(')') {
            let open = body.rfind("*sqrt(").ok_or_else(|| err("expected '*sqrt('"))?;
            let d: u64 = body[open + 6..]
                .parse()
                .map_err(|_| err("bad discriminant"))?;
            let head = &body[..open];
            // the sign separating the two rationals is the last +/- not at index 0
            let split = head
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last()
                .ok_or_else(|| err("expected rat SIGN rat"))?;
            let a = parse_rat(&head[..split]).ok_or_else(|| err("bad rational part"))?;
            let sign = &head[split..split + 1];
            let mut b = parse_rat(&head[split + 1..]).ok_or_else(|| err("bad sqrt coefficient"))?;
            if head[split + 1..].starts_with('-') {
                return Err(err("doubled sign"));
            }
            if sign == "-" {
                b = -b;
            }
            Ok(ParsedQNum { a, b, d: Some(d) })
        } else {
            let a = parse_rat(&s).ok_or_else(|| err("bad rational"))?;
            Ok(ParsedQNum {
                a,
                b: BigRational::zero(),
                d: None,
            })
        }
    }

    pub fn into_field(self, default_d: u64) -> Result<QNum, FieldError> {
        match self.d {
            Some(d) if d != default_d && !self.b.is_zero() => {
                Err(FieldError::FieldMismatch(d, default_d))
            }
            _ => QNum::new(self.a, self.b, default_d),
        }
    }
}

fn parse_uint(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_rat(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = if let Some((n, d)) = body.split_once('/') {
        let den = parse_uint(d)?;
        if den.is_zero() {
            return None;
        }
        BigRational::new(parse_uint(n)?, den)
    } else if let Some((ip, fp)) = body.split_once('.') {
        let int = if ip.is_empty() { BigInt::zero() } else { parse_uint(ip)? };
        let frac = parse_uint(fp)?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        BigRational::new(int * &scale + frac, scale)
    } else {
        BigRational::from_integer(parse_uint(body)?)
    };
    Some(if neg { -value } else { value })
}

/// Finds the single discriminant used by a set of number literals, if any.
pub fn infer_discriminant<'a, I>(texts: I, default_d: u64) -> Result<u64, FieldError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut found: Option<u64> = None;
    for t in texts {
        let p = ParsedQNum::parse(t)?;
        if let (Some(d), false) = (p.d, p.b.is_zero()) {
            match found {
                Some(f) if f != d => return Err(FieldError::FieldMismatch(f, d)),
                _ => found = Some(d),
            }
        }
    }
    validate_discriminant(found.unwrap_or(default_d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QNum {
        QNum::parse(s, 2).unwrap()
    }

    #[test]
    fn inverse_of_one_plus_root_two() {
        // (1 + sqrt2)(-1 + sqrt2) = -1 + 2 = 1
        let x = q("1+1*sqrt(2)");
        let inv = x.inv().unwrap();
        assert_eq!(inv, q("-1+1*sqrt(2)"));
        assert_eq!(&x * &inv, QNum::one(2));
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(q("2-1*sqrt(2)") * q("2+1*sqrt(2)"), QNum::from_int(2, 2));
    }

    #[test]
    fn additive_inverse() {
        let x = q("3/7-5/11*sqrt(2)");
        assert!((&x + &(-&x)).is_zero());
    }

    #[test]
    fn comparisons() {
        assert_eq!(QNum::one(2).cmp(&QNum::sqrt_d(2)), Ordering::Less);
        assert_eq!(q("-1+1*sqrt(2)").signum(), Ordering::Greater);
        let x = q("5/3-7/2*sqrt(2)");
        assert_eq!(x.cmp(&x), Ordering::Equal);
        // 99/70 is a convergent just above sqrt2
        assert!(q("99/70") > QNum::sqrt_d(2));
        assert!(q("-99/70+1*sqrt(2)").is_negative());
    }

    #[test]
    fn ratios() {
        let (rat, w) = q("0+2*sqrt(2)").ratio_is_rational(&QNum::sqrt_d(2)).unwrap();
        assert!(rat);
        assert_eq!(w, QNum::from_int(2, 2));

        let (rat, w) = QNum::sqrt_d(2)
            .ratio_is_rational(&q("1+1*sqrt(2)"))
            .unwrap();
        assert!(!rat);
        assert_eq!(w, q("2-1*sqrt(2)"));

        let x = q("1/3+1/5*sqrt(2)");
        let (rat, w) = x.ratio_is_rational(&x).unwrap();
        assert!(rat);
        assert_eq!(w, QNum::one(2));

        assert_eq!(
            x.ratio_is_rational(&QNum::zero(2)),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let a = QNum::sqrt_d(2);
        let b = QNum::sqrt_d(3);
        assert_eq!(a.try_add(&b), Err(FieldError::FieldMismatch(2, 3)));
        assert_eq!(a.try_mul(&b), Err(FieldError::FieldMismatch(2, 3)));
        assert!(a.try_cmp(&b).is_err());
    }

    #[test]
    fn discriminant_validation() {
        assert!(validate_discriminant(1).is_err());
        assert!(validate_discriminant(4).is_err());
        assert!(validate_discriminant(12).is_err());
        assert_eq!(validate_discriminant(2), Ok(2));
        assert_eq!(validate_discriminant(30), Ok(30));
    }

    #[test]
    fn floors() {
        assert_eq!(QNum::sqrt_d(2).floor(), BigInt::from(1));
        assert_eq!((-QNum::sqrt_d(2)).floor(), BigInt::from(-2));
        assert_eq!(q("3/2").floor(), BigInt::from(1));
        assert_eq!(q("-3/2").floor(), BigInt::from(-2));
        assert_eq!(q("-1+1*sqrt(2)").floor(), BigInt::from(0));
        assert_eq!(q("3-2*sqrt(2)").floor(), BigInt::from(0));
        assert_eq!(q("7/5+1/2*sqrt(2)").ceil(), BigInt::from(3));
        assert_eq!(QNum::from_int(-4, 2).floor(), BigInt::from(-4));
    }

    #[test]
    fn canonical_text() {
        assert_eq!(q("2-1*sqrt(2)").to_string(), "2-1*sqrt(2)");
        assert_eq!(q("4/6").to_string(), "2/3");
        assert_eq!(q("0+1/2*sqrt(2)").to_string(), "0+1/2*sqrt(2)");
        assert_eq!(q("-7").to_string(), "-7");
        assert_eq!(q("2/4+0/1*sqrt(2)").to_string(), "1/2");
        assert_eq!(q("0.25").to_string(), "1/4");
        assert_eq!(q(" 1 + 1 * sqrt(2) ").to_string(), "1+1*sqrt(2)");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "1/0", "abc", "1+sqrt(2)", "1*sqrt(2)", "1+-1*sqrt(2)", "1/2/3"] {
            assert!(ParsedQNum::parse(bad).is_err(), "{bad}");
        }
        assert_eq!(
            QNum::parse("1+1*sqrt(3)", 2),
            Err(FieldError::FieldMismatch(3, 2))
        );
    }

    #[test]
    fn infer_field() {
        assert_eq!(infer_discriminant(["1/2", "1+1*sqrt(3)"], 2), Ok(3));
        assert_eq!(infer_discriminant(["1/2", "3"], 2), Ok(2));
        assert!(infer_discriminant(["1*sqrt(2)"], 2).is_err());
        assert_eq!(
            infer_discriminant(["1+1*sqrt(2)", "1+1*sqrt(3)"], 2),
            Err(FieldError::FieldMismatch(2, 3))
        );
    }
}
