//! The quantum torus C_q on t0^{±1}, t1^{±1}, with
//! (t0^a t1^b)(t0^c t1^d) = q^{bc} t0^{a+c} t1^{b+d}.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::qfield::QScalar;

/// Finite linear combination of monomials t0^a t1^b, keyed by (a, b).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TorusElement {
    terms: BTreeMap<(i64, i64), QScalar>,
}

impl TorusElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0)
    }

    pub fn monomial(a: i64, b: i64) -> Self {
        Self::term(QScalar::one(), a, b)
    }

    pub fn term(c: QScalar, a: i64, b: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        TorusElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &QScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: i64, b: i64) -> QScalar {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, c: &QScalar, a: i64, b: i64) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, o: &TorusElement) {
        for (&(a, b), c) in &o.terms {
            self.add_term(c, a, b);
        }
    }

    pub fn scale(&self, k: &QScalar) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        TorusElement {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn mul(&self, o: &TorusElement) -> Self {
        let mut out = Self::zero();
        for (&(a, b), x) in &self.terms {
            for (&(c, d), y) in &o.terms {
                let coeff = x * y * QScalar::qpow_int(b * c);
                out.add_term(&coeff, a + c, b + d);
            }
        }
        out
    }

    /// The anti-involution: bar(t0^a t1^b) = q^{-ab} t0^a t1^{-b}.
    pub fn bar(&self) -> Self {
        TorusElement {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| ((a, -b), c * QScalar::qpow_int(-a * b)))
                .collect(),
        }
    }
}

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, o: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, o: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        out.add_assign(&-o);
        out
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        self.scale(&QScalar::from_int(-1))
    }
}

impl Mul for &TorusElement {
    type Output = TorusElement;
    fn mul(self, o: &TorusElement) -> TorusElement {
        TorusElement::mul(self, o)
    }
}

impl fmt::Display for TorusElement {
    /// Terms `<scalar>*t0^a*t1^b` joined by " + ".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, ((a, b), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*t0^{a}*t1^{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TorusElement[{self}]")
    }
}

impl serde::Serialize for TorusElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for ((a, b), c) in &self.terms {
            seq.serialize_element(&serde_json::json!({"a": a, "b": b, "coeff": c.to_string()}))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(k: i64) -> QScalar {
        QScalar::qpow_int(k)
    }

    #[test]
    fn multiplication_rule() {
        let x = TorusElement::monomial(1, 2);
        let y = TorusElement::monomial(3, 4);
        assert_eq!(x.mul(&y), TorusElement::term(q(6), 4, 6));
        let t0 = TorusElement::monomial(1, 0);
        let t1 = TorusElement::monomial(0, 1);
        assert_eq!(t1.mul(&t0), TorusElement::term(q(1), 1, 1));
        assert_eq!(t0.mul(&t1), TorusElement::monomial(1, 1));
        assert_eq!(TorusElement::one().mul(&x), x);
    }

    #[test]
    fn bar_rule() {
        let x = TorusElement::monomial(2, 3);
        assert_eq!(x.bar(), TorusElement::term(q(-6), 2, -3));
        assert_eq!(x.bar().bar(), x);
        assert_eq!(TorusElement::one().bar(), TorusElement::one());
    }

    #[test]
    fn vector_space_ops() {
        let t0 = TorusElement::monomial(1, 0);
        assert_eq!(&t0 + &TorusElement::zero(), t0);
        assert!((&t0 - &t0).is_zero());
        let a = TorusElement::term(QScalar::from_int(2), 1, 1);
        let b = TorusElement::term(QScalar::from_int(3), 1, 1);
        assert_eq!(&a + &b, TorusElement::term(QScalar::from_int(5), 1, 1));
    }

    fn arb_torus() -> impl Strategy<Value = TorusElement> {
        prop::collection::vec((-3i64..=3, -2i64..=2, -2i64..=2), 0..4).prop_map(|ts| {
            let mut x = TorusElement::zero();
            for (c, a, b) in ts {
                x.add_term(&QScalar::from_int(c), a, b);
            }
            x
        })
    }

    proptest! {
        #[test]
        fn associative(x in arb_torus(), y in arb_torus(), z in arb_torus()) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }

        #[test]
        fn bar_is_anti_involution(x in arb_torus(), y in arb_torus()) {
            prop_assert_eq!(x.mul(&y).bar(), y.bar().mul(&x.bar()));
            prop_assert_eq!(x.bar().bar(), x.clone());
        }

        #[test]
        fn unit_laws(x in arb_torus()) {
            prop_assert_eq!(TorusElement::one().mul(&x), x.clone());
            prop_assert_eq!(x.mul(&TorusElement::one()), x);
        }
    }
}
