//! Exact scalars: residues modulo an odd prime and arbitrary-precision rationals.
//!
//! Every [`Scalar`] carries its field so that mixing fields is detected
//! rather than silently producing garbage. Residues are always stored in
//! `0..p` and rationals are always reduced with a positive denominator, so
//! two scalars are equal as field elements exactly when they are equal as
//! Rust values.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// GF(p), p an odd prime that fits a machine word.
    Prime(u64),
    Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { value: u64, modulus: u64 },
    Rational(BigRational),
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn rational() -> Self {
        FieldSpec::Rational
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldSpec::Prime(_))
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self {
            FieldSpec::Prime(p) => Some(*p),
            FieldSpec::Rational => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => {
                let r = (v as i128).rem_euclid(p as i128) as u64;
                Scalar::Mod { value: r, modulus: p }
            }
            FieldSpec::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => Scalar::Mod { value: v % p, modulus: p },
            FieldSpec::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn fraction(&self, num: i64, den: i64) -> Result<Scalar> {
        self.from_i64(num).try_div(&self.from_i64(den))
    }

    /// All elements `0, 1, …, p−1` in order.
    pub fn elements(&self) -> Result<Vec<Scalar>> {
        match *self {
            FieldSpec::Prime(p) => Ok((0..p).map(|v| Scalar::Mod { value: v, modulus: p }).collect()),
            FieldSpec::Rational => Err(Error::InfiniteField),
        }
    }

    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid scalar {s:?} for {self}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (
                BigInt::from_str(n.trim()).map_err(|_| bad())?,
                BigInt::from_str(d.trim()).map_err(|_| bad())?,
            ),
            None => (BigInt::from_str(s).map_err(|_| bad())?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match *self {
            FieldSpec::Prime(p) => {
                let pb = BigInt::from(p);
                let reduce = |x: &BigInt| -> u64 {
                    let r = ((x % &pb) + &pb) % &pb;
                    u64::try_from(r).expect("residue fits in u64")
                };
                let n = Scalar::Mod { value: reduce(&num), modulus: p };
                let d = Scalar::Mod { value: reduce(&den), modulus: p };
                n.try_div(&d)
            }
            FieldSpec::Rational => Ok(Scalar::Rational(BigRational::new(num, den))),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "gf({p})"),
            FieldSpec::Rational => write!(f, "q"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "q" || t == "rational" || t == "rationals" {
            return Ok(FieldSpec::Rational);
        }
        let inner = t
            .strip_prefix("gf(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("unknown field tag {s:?}")))?;
        let p: u64 = inner
            .parse()
            .map_err(|_| Error::Parse(format!("invalid modulus in {s:?}")))?;
        FieldSpec::prime(p)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Tonelli-Shanks; `a` must be a nonzero quadratic residue.
fn sqrt_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        return 0;
    }
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Mod { modulus, .. } => FieldSpec::Prime(*modulus),
            Scalar::Rational(_) => FieldSpec::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 0,
            Scalar::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 1,
            Scalar::Rational(r) => r.is_one(),
        }
    }

    /// Canonical residue for GF(p) scalars.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Scalar::Mod { value, .. } => Some(*value),
            Scalar::Rational(_) => None,
        }
    }

    fn check_same(&self, other: &Scalar) -> Result<()> {
        let (a, b) = (self.field(), other.field());
        if a == b {
            Ok(())
        } else {
            Err(Error::FieldMismatch(a, b))
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (Scalar::Mod { value: a, modulus: p }, Scalar::Mod { value: b, .. }) => {
                let s = (*a as u128 + *b as u128) % *p as u128;
                Scalar::Mod { value: s as u64, modulus: *p }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (Scalar::Mod { value: a, modulus: p }, Scalar::Mod { value: b, .. }) => {
                Scalar::Mod { value: mul_mod(*a, *b, *p), modulus: *p }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same(other)?;
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
        })
    }

    fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
            Scalar::Rational(r) => Scalar::Rational(-r),
        }
    }

    pub fn is_square(&self) -> bool {
        match self {
            Scalar::Mod { value, modulus } => {
                *value == 0 || pow_mod(*value, (modulus - 1) / 2, *modulus) == 1
            }
            Scalar::Rational(r) => {
                exact_isqrt(r.numer()).is_some() && exact_isqrt(r.denom()).is_some()
            }
        }
    }

    /// Square root with a deterministic representative: the smaller residue
    /// over GF(p), the nonnegative root over the rationals.
    pub fn sqrt(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::NotASquare);
        }
        Ok(match self {
            Scalar::Mod { value, modulus } => {
                let r = sqrt_mod(*value, *modulus);
                Scalar::Mod { value: r.min(modulus - r) % modulus, modulus: *modulus }
            }
            Scalar::Rational(r) => {
                let n = exact_isqrt(r.numer()).ok_or(Error::NotASquare)?;
                let d = exact_isqrt(r.denom()).ok_or(Error::NotASquare)?;
                Scalar::Rational(BigRational::new(n, d))
            }
        })
    }

    pub fn pow(&self, mut exp: u64) -> Scalar {
        let mut acc = self.field().one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Sign of a rational scalar; `None` over finite fields.
    pub fn signum(&self) -> Option<i8> {
        match self {
            Scalar::Rational(r) if r.is_positive() => Some(1),
            Scalar::Rational(r) if r.is_negative() => Some(-1),
            Scalar::Rational(_) => Some(0),
            Scalar::Mod { .. } => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { value, .. } => write!(f, "{value}"),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

// Operator forms panic on a field mismatch; matrices keep their entries in a
// single field so internal arithmetic never mixes fields.
macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar field mismatch")
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$checked(&rhs).expect("scalar field mismatch")
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$checked(rhs).expect("scalar field mismatch")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}
