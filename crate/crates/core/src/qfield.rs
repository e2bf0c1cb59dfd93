//! Exact arithmetic in the rational function field Q(s), where s is a formal
//! square root of q.
//!
//! A nonzero [`QScalar`] is stored as `c * s^e * p(s) / d(s)` with `c` a
//! rational, `p` and `d` primitive integer polynomials with positive leading
//! coefficient, nonzero constant term, and no common factor. That form is
//! unique, so structural equality is field equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::half::Half;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QError {
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("pole at s = {0}")]
    Pole(String),
    #[error("cannot parse scalar literal: {0}")]
    Parse(String),
}

type Poly = Vec<BigInt>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Poly {
    if a.len() == 1 {
        return b.iter().map(|x| x * &a[0]).collect();
    }
    if b.len() == 1 {
        return a.iter().map(|x| x * &b[0]).collect();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn is_one(p: &[BigInt]) -> bool {
    p.len() == 1 && p[0].is_one()
}

fn content(p: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Divides out the content and makes the leading coefficient positive.
/// Returns the signed factor that was removed.
fn make_primitive(p: &mut Poly) -> BigInt {
    let mut g = content(p);
    if p.last().is_some_and(|c| c.is_negative()) {
        g = -g;
    }
    if !g.is_one() {
        for c in p.iter_mut() {
            *c = &*c / &g;
        }
    }
    g
}

/// Pseudo-remainder of `a` by `b` (deg a >= deg b).
fn prem(a: &[BigInt], b: &[BigInt]) -> Poly {
    let mut r: Poly = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &lr * bj;
        }
        trim(&mut r);
    }
    r
}

/// Gcd of two primitive polynomials, normalized primitive with positive
/// leading coefficient.
fn poly_gcd(a: &[BigInt], b: &[BigInt]) -> Poly {
    if a.len() == 1 || b.len() == 1 {
        return vec![BigInt::one()];
    }
    let (mut x, mut y) = if a.len() >= b.len() {
        (a.to_vec(), b.to_vec())
    } else {
        (b.to_vec(), a.to_vec())
    };
    loop {
        let mut r = prem(&x, &y);
        if r.is_empty() {
            make_primitive(&mut y);
            return y;
        }
        if r.len() == 1 {
            return vec![BigInt::one()];
        }
        make_primitive(&mut r);
        x = y;
        y = r;
    }
}

/// Exact division of integer polynomials; panics if inexact.
fn poly_divexact(a: &[BigInt], b: &[BigInt]) -> Poly {
    if is_one(b) {
        return a.to_vec();
    }
    let db = b.len() - 1;
    let mut r: Poly = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    let lb = &b[db];
    for k in (0..q.len()).rev() {
        let (qk, rem) = r[k + db].div_rem(lb);
        assert!(rem.is_zero(), "inexact polynomial division");
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &qk * bj;
        }
        q[k] = qk;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    q
}

fn poly_eval(p: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

/// Element of Q(s).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QScalar {
    c: BigRational,
    e: i64,
    p: Poly,
    d: Poly,
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar {
            c: BigRational::zero(),
            e: 0,
            p: vec![BigInt::one()],
            d: vec![BigInt::one()],
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(n.into(), d.into()))
    }

    pub fn from_rational(c: BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QScalar {
            c,
            e: 0,
            p: vec![BigInt::one()],
            d: vec![BigInt::one()],
        }
    }

    /// `s^k`.
    pub fn s_pow(k: i64) -> Self {
        QScalar {
            c: BigRational::one(),
            e: k,
            p: vec![BigInt::one()],
            d: vec![BigInt::one()],
        }
    }

    /// `q^k = s^(2k)` for a half-integer `k`.
    pub fn qpow(k: Half) -> Self {
        Self::s_pow(k.twice())
    }

    /// `q^k` for an integer `k`.
    pub fn qpow_int(k: i64) -> Self {
        Self::s_pow(2 * k)
    }

    /// Builds `num / den` from Laurent polynomials given as
    /// (lowest exponent, ascending integer coefficients).
    pub fn from_laurent(num: (i64, &[BigInt]), den: (i64, &[BigInt])) -> Result<Self, QError> {
        let mut d: Poly = den.1.to_vec();
        trim(&mut d);
        if d.is_empty() {
            return Err(QError::DivisionByZero);
        }
        let mut p: Poly = num.1.to_vec();
        trim(&mut p);
        if p.is_empty() {
            return Ok(Self::zero());
        }
        Ok(Self::normalize(BigRational::one(), num.0 - den.0, p, d))
    }

    fn normalize(mut c: BigRational, mut e: i64, mut p: Poly, mut d: Poly) -> Self {
        trim(&mut p);
        if p.is_empty() || c.is_zero() {
            return Self::zero();
        }
        let lead_p = p.iter().take_while(|x| x.is_zero()).count();
        if lead_p > 0 {
            p.drain(..lead_p);
            e += lead_p as i64;
        }
        let lead_d = d.iter().take_while(|x| x.is_zero()).count();
        if lead_d > 0 {
            d.drain(..lead_d);
            e -= lead_d as i64;
        }
        let gp = make_primitive(&mut p);
        let gd = make_primitive(&mut d);
        if !gp.is_one() || !gd.is_one() {
            c *= BigRational::new(gp, gd);
        }
        if p.len() > 1 && d.len() > 1 {
            let g = poly_gcd(&p, &d);
            if g.len() > 1 {
                p = poly_divexact(&p, &g);
                d = poly_divexact(&d, &g);
            }
        }
        QScalar { c, e, p, d }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.c.is_one() && self.e == 0 && is_one(&self.p) && is_one(&self.d)
    }

    /// True when the value is a rational multiple of a power of s.
    pub fn is_monomial(&self) -> bool {
        is_one(&self.p) && is_one(&self.d)
    }

    /// The rational constant if the value lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        (self.e == 0 && self.is_monomial()).then(|| self.c.clone())
    }

    /// Numerator as a Laurent polynomial: (lowest exponent, ascending coefficients),
    /// with integer coefficients; the denominator carries the rational content.
    pub fn numerator(&self) -> (i64, Vec<BigInt>) {
        if self.is_zero() {
            return (0, vec![]);
        }
        let n = self.c.numer();
        (self.e, self.p.iter().map(|x| x * n).collect())
    }

    /// Denominator polynomial (lowest exponent 0, positive leading coefficient).
    pub fn denominator(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![BigInt::one()];
        }
        let m = self.c.denom();
        self.d.iter().map(|x| x * m).collect()
    }

    pub fn inv(&self) -> Result<Self, QError> {
        if self.is_zero() {
            return Err(QError::DivisionByZero);
        }
        // Swapping p and d keeps both primitive with positive leading coefficient.
        Ok(QScalar {
            c: self.c.recip(),
            e: -self.e,
            p: self.d.clone(),
            d: self.p.clone(),
        })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() || self.is_zero() {
            return Self::zero();
        }
        QScalar {
            c: &self.c * r,
            e: self.e,
            p: self.p.clone(),
            d: self.d.clone(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&BigRational::from_integer(k.into()))
    }

    /// Multiplies by `s^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = self.clone();
        out.e += k;
        out
    }

    fn mul_ref(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let c = &self.c * &o.c;
        let e = self.e + o.e;
        if self.is_monomial() {
            return QScalar { c, e, p: o.p.clone(), d: o.d.clone() };
        }
        if o.is_monomial() {
            return QScalar { c, e, p: self.p.clone(), d: self.d.clone() };
        }
        // Cross-cancel before multiplying; products of primitive
        // polynomials stay primitive.
        let g1 = poly_gcd(&self.p, &o.d);
        let g2 = poly_gcd(&o.p, &self.d);
        let (p1, d2) = if is_one(&g1) {
            (self.p.clone(), o.d.clone())
        } else {
            (poly_divexact(&self.p, &g1), poly_divexact(&o.d, &g1))
        };
        let (p2, d1) = if is_one(&g2) {
            (o.p.clone(), self.d.clone())
        } else {
            (poly_divexact(&o.p, &g2), poly_divexact(&self.d, &g2))
        };
        QScalar { c, e, p: poly_mul(&p1, &p2), d: poly_mul(&d1, &d2) }
    }

    fn add_ref(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        // Common integer scale L so that both contents become integers.
        let l = self.c.denom().lcm(o.c.denom());
        let k1 = self.c.numer() * (&l / self.c.denom());
        let k2 = o.c.numer() * (&l / o.c.denom());
        let e = self.e.min(o.e);
        let s1 = (self.e - e) as usize;
        let s2 = (o.e - e) as usize;
        let (g, d1r, d2r) = if self.d == o.d {
            (self.d.clone(), vec![BigInt::one()], vec![BigInt::one()])
        } else {
            let g = poly_gcd(&self.d, &o.d);
            let a = poly_divexact(&self.d, &g);
            let b = poly_divexact(&o.d, &g);
            (g, a, b)
        };
        let t1 = poly_mul(&self.p, &d2r);
        let t2 = poly_mul(&o.p, &d1r);
        let len = (t1.len() + s1).max(t2.len() + s2);
        let mut num = vec![BigInt::zero(); len];
        for (i, x) in t1.iter().enumerate() {
            num[i + s1] += x * &k1;
        }
        for (i, x) in t2.iter().enumerate() {
            num[i + s2] += x * &k2;
        }
        let den = poly_mul(&poly_mul(&g, &d1r), &d2r);
        Self::normalize(BigRational::new(BigInt::one(), l), e, num, den)
    }

    pub fn pow(&self, k: i64) -> Result<Self, QError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        Ok(acc)
    }

    /// Exact value at `s = s0`.
    pub fn specialize(&self, s0: &BigRational) -> Result<BigRational, QError> {
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        let dv = poly_eval(&self.d, s0);
        if dv.is_zero() || (s0.is_zero() && self.e < 0) {
            return Err(QError::Pole(s0.to_string()));
        }
        let pv = poly_eval(&self.p, s0);
        let sp = rational_pow(s0, self.e);
        Ok(&self.c * sp * pv / dv)
    }

    /// Canonical form recomputed from scratch; the identity on valid values.
    pub fn canonicalize(&self) -> Self {
        Self::normalize(self.c.clone(), self.e, self.p.clone(), self.d.clone())
    }
}

fn rational_pow(x: &BigRational, e: i64) -> BigRational {
    let b = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(b, e.unsigned_abs() as usize)
}

impl Default for QScalar {
    fn default() -> Self {
        Self::zero()
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl $tr<&QScalar> for &QScalar {
            type Output = QScalar;
            fn $f(self, o: &QScalar) -> QScalar {
                $body(self, o)
            }
        }
        impl $tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $f(self, o: QScalar) -> QScalar {
                $body(&self, &o)
            }
        }
        impl $tr<&QScalar> for QScalar {
            type Output = QScalar;
            fn $f(self, o: &QScalar) -> QScalar {
                $body(&self, o)
            }
        }
        impl $tr<QScalar> for &QScalar {
            type Output = QScalar;
            fn $f(self, o: QScalar) -> QScalar {
                $body(self, &o)
            }
        }
    };
}

binop!(Add, add, |a: &QScalar, b: &QScalar| a.add_ref(b));
binop!(Sub, sub, |a: &QScalar, b: &QScalar| a.add_ref(&-b));
binop!(Mul, mul, |a: &QScalar, b: &QScalar| a.mul_ref(b));
binop!(Div, div, |a: &QScalar, b: &QScalar| a
    .mul_ref(&b.inv().expect("division by zero scalar")));

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        if self.is_zero() {
            return QScalar::zero();
        }
        QScalar { c: -&self.c, e: self.e, p: self.p.clone(), d: self.d.clone() }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(mut self) -> QScalar {
        self.c = -self.c;
        self
    }
}

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, o: &QScalar) {
        *self = self.add_ref(o);
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, o: &QScalar) {
        *self = self.add_ref(&-o);
    }
}

impl MulAssign<&QScalar> for QScalar {
    fn mul_assign(&mut self, o: &QScalar) {
        *self = self.mul_ref(o);
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::from_int(n)
    }
}

impl From<BigRational> for QScalar {
    fn from(r: BigRational) -> Self {
        QScalar::from_rational(r)
    }
}

/// ω_Z(b): 0 at b = 0; ½(q^b+1)/(q^b−1) for the integer flavor and
/// q^{b/2}/(q^b−1) for the half-integer flavor.
pub fn omega(integer_flavor: bool, b: i64) -> QScalar {
    if b == 0 {
        return QScalar::zero();
    }
    let qb = QScalar::s_pow(2 * b);
    let den = &qb - QScalar::one();
    if integer_flavor {
        (&qb + QScalar::one()) / den * QScalar::from_ratio(1, 2)
    } else {
        QScalar::s_pow(b) / den
    }
}

// ---------- text form ----------

fn fmt_poly(f: &mut fmt::Formatter<'_>, low: i64, coeffs: &[BigInt]) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let exp = low + k as i64;
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { "-" } else { "+" })?;
        }
        first = false;
        if exp == 0 {
            write!(f, "{mag}")?;
            continue;
        }
        if !mag.is_one() {
            write!(f, "{mag}*")?;
        }
        if exp == 1 {
            write!(f, "s")?;
        } else {
            write!(f, "s^{exp}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (low, num) = self.numerator();
        let mut den = self.denominator();
        let mut nlow = low;
        if low < 0 {
            let mut shifted = vec![BigInt::zero(); (-low) as usize];
            shifted.append(&mut den);
            den = shifted;
            nlow = 0;
        }
        if is_one(&den) {
            return fmt_poly(f, nlow, &num);
        }
        let multi = |c: &[BigInt]| c.iter().filter(|x| !x.is_zero()).count() > 1;
        if multi(&num) {
            write!(f, "(")?;
            fmt_poly(f, nlow, &num)?;
            write!(f, ")")?;
        } else {
            fmt_poly(f, nlow, &num)?;
        }
        if den.len() == 1 {
            return write!(f, "/{}", den[0]);
        }
        write!(f, "/(")?;
        fmt_poly(f, 0, &den)?;
        write!(f, ")")
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QScalar({self})")
    }
}

impl serde::Serialize for QScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for QScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> QError {
        QError::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap()
        })
    }

    fn int(&mut self) -> Result<i64, QError> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let d = self.digits().ok_or_else(|| self.err("expected integer"))?;
        let v = d.to_i64().ok_or_else(|| self.err("exponent too large"))?;
        Ok(if neg { -v } else { v })
    }

    /// `rational? ("*"? "s" ("^" int)?)?`, unsigned.
    fn term(&mut self) -> Result<QScalar, QError> {
        let coeff = match self.digits() {
            Some(n) => {
                // A fraction binds to the coefficient only when a digit follows.
                let save = self.pos;
                if self.eat(b'/') && self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    let d = self.digits().unwrap();
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    Some(BigRational::new(n, d))
                } else {
                    self.pos = save;
                    Some(BigRational::from_integer(n))
                }
            }
            None => None,
        };
        let had_star = coeff.is_some() && self.eat(b'*');
        if self.eat(b's') {
            let exp = if self.eat(b'^') { self.int()? } else { 1 };
            let c = coeff.unwrap_or_else(BigRational::one);
            return Ok(QScalar::s_pow(exp).scale(&c));
        }
        if had_star {
            return Err(self.err("expected s after *"));
        }
        coeff.map(QScalar::from_rational).ok_or_else(|| self.err("expected term"))
    }

    fn atom(&mut self) -> Result<QScalar, QError> {
        if self.eat(b'(') {
            let v = self.poly()?;
            if !self.eat(b')') {
                return Err(self.err("expected )"));
            }
            Ok(v)
        } else {
            self.term()
        }
    }

    fn poly(&mut self) -> Result<QScalar, QError> {
        let mut neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let mut acc = QScalar::zero();
        loop {
            let t = self.atom()?;
            acc = if neg { acc - t } else { acc + t };
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    neg = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    neg = true;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn expr(&mut self) -> Result<QScalar, QError> {
        let num = self.poly()?;
        if self.eat(b'/') {
            let den = self.poly()?;
            return Ok(num.mul_ref(&den.inv()?));
        }
        Ok(num)
    }
}

impl FromStr for QScalar {
    type Err = QError;

    /// Grammar: `expr := poly | poly "/" poly`, `poly := term (("+"|"-") term)*`,
    /// `term := rational? ("*"? "s" ("^" int)?)?`; a parenthesized poly may stand
    /// for a term. In `1/2*s` the fraction is read as the coefficient.
    fn from_str(s: &str) -> Result<Self, QError> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let v = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

impl PartialOrd for QScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but fixed total order, used only for deterministic containers.
impl Ord for QScalar {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.e, &self.p, &self.d, &self.c).cmp(&(o.e, &o.p, &o.d, &o.c))
    }
}

/// How identities are compared: exactly in ℚ(s), or after s ↦ s0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QMode {
    Symbolic,
    Rational(BigRational),
}

impl QMode {
    /// Whether `x` vanishes under this mode; a pole at s0 counts as nonzero.
    pub fn is_zero(&self, x: &QScalar) -> bool {
        match self {
            QMode::Symbolic => x.is_zero(),
            QMode::Rational(s0) => x.specialize(s0).map(|v| v.is_zero()).unwrap_or(false),
        }
    }

    pub fn eq(&self, x: &QScalar, y: &QScalar) -> bool {
        self.is_zero(&(x - y))
    }

    pub fn name(&self) -> String {
        match self {
            QMode::Symbolic => "symbolic".into(),
            QMode::Rational(s0) => format!("rational(s0={s0})"),
        }
    }
}
