//! Half-integers, stored as twice their value.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Half(i64);

impl Half {
    pub const ZERO: Half = Half(0);

    pub const fn from_twice(t: i64) -> Self {
        Half(t)
    }

    pub const fn from_int(k: i64) -> Self {
        Half(2 * k)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// The integer value; panics on a proper half.
    pub fn to_int(self) -> i64 {
        assert!(self.is_integer(), "{self} is not an integer");
        self.0 / 2
    }

    pub fn scale(self, k: i64) -> Self {
        Half(self.0 * k)
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl Add for Half {
    type Output = Half;
    fn add(self, o: Half) -> Half {
        Half(self.0 + o.0)
    }
}

impl Sub for Half {
    type Output = Half;
    fn sub(self, o: Half) -> Half {
        Half(self.0 - o.0)
    }
}

impl Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl fmt::Debug for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Half {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("not a half-integer: {s:?}");
        match s.split_once('/') {
            None => s.parse::<i64>().map(Half::from_int).map_err(|_| bad()),
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                match d {
                    1 => Ok(Half::from_int(n)),
                    2 => Ok(Half(n)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl serde::Serialize for Half {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_forms() {
        assert_eq!(Half::from_twice(-3).to_string(), "-3/2");
        assert_eq!(Half::from_int(2).to_string(), "2");
        assert_eq!("-1/2".parse::<Half>().unwrap(), Half::from_twice(-1));
        assert_eq!("4/2".parse::<Half>().unwrap(), Half::from_int(2));
        assert!("1/3".parse::<Half>().is_err());
    }

    #[test]
    fn arithmetic() {
        let a = Half::from_twice(1);
        assert_eq!(a + a, Half::from_int(1));
        assert_eq!(-a - a, Half::from_int(-1));
        assert!(Half::from_twice(-1) < Half::ZERO);
    }
}
