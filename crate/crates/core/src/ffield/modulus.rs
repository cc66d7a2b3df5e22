use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Characteristic used for all published certificates unless overridden.
pub const DEFAULT_PRIME: u32 = 8191;

/// A prime `p` with `2 <= p < 2^31`.
///
/// Products of two reduced residues stay below `2^62`, so every operation
/// works in `u64` and reduces immediately.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u32")]
pub struct FieldModulus(u32);

impl FieldModulus {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..(1u64 << 31)).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(FieldModulus(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// Reduces an arbitrary unsigned value.
    #[inline]
    pub fn reduce(self, x: u64) -> u32 {
        (x % self.0 as u64) as u32
    }

    /// Reduces a signed value into `[0, p)`.
    #[inline]
    pub fn reduce_signed(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.0 as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + (self.0 - b)
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Result<u32> {
        let a = a % self.0;
        if a == 0 {
            return Err(Error::NoInverse(a, self.0));
        }
        let (mut r0, mut r1) = (self.0 as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_signed(t0))
    }

    pub fn element(self, value: u64) -> FieldElement {
        FieldElement {
            value: self.reduce(value),
            modulus: self,
        }
    }
}

impl Default for FieldModulus {
    fn default() -> Self {
        FieldModulus(DEFAULT_PRIME)
    }
}

impl TryFrom<u64> for FieldModulus {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        FieldModulus::new(p)
    }
}

impl From<FieldModulus> for u32 {
    fn from(m: FieldModulus) -> u32 {
        m.0
    }
}

impl fmt::Display for FieldModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic primality test; trial division is enough below `2^31`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A residue tied to its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    modulus: FieldModulus,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> FieldModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<FieldElement> {
        Ok(FieldElement {
            value: self.modulus.inv(self.value)?,
            modulus: self.modulus,
        })
    }
}

/// Inverse of a field element; fails on zero.
pub fn fe_inv(x: FieldElement) -> Result<FieldElement> {
    x.inv()
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for FieldElement {
            type Output = FieldElement;

            #[inline]
            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(self.modulus, rhs.modulus, "mixed moduli");
                FieldElement {
                    value: self.modulus.$method(self.value, rhs.value),
                    modulus: self.modulus,
                }
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.modulus.neg(self.value),
            modulus: self.modulus,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_out_of_range() {
        assert!(FieldModulus::new(8191).is_ok());
        assert!(FieldModulus::new(2).is_ok());
        assert!(FieldModulus::new(2147483647).is_ok());
        assert_eq!(FieldModulus::new(1), Err(Error::InvalidModulus(1)));
        assert_eq!(FieldModulus::new(8193), Err(Error::InvalidModulus(8193)));
        assert!(FieldModulus::new(1 << 31).is_err());
        assert!(FieldModulus::new(4294967311).is_err());
    }

    #[test]
    fn inverse_examples() {
        let p = FieldModulus::new(8191).unwrap();
        assert_eq!(fe_inv(p.element(1)).unwrap().value(), 1);
        assert_eq!(fe_inv(p.element(8190)).unwrap().value(), 8190);
        let p7 = FieldModulus::new(7).unwrap();
        assert_eq!(fe_inv(p7.element(3)).unwrap().value(), 5);
        assert_eq!(fe_inv(p.element(0)), Err(Error::NoInverse(0, 8191)));
    }

    #[test]
    fn inverse_exhaustive_small_primes() {
        for p in [2u64, 3, 5, 7, 11, 13, 8191] {
            let m = FieldModulus::new(p).unwrap();
            for x in 1..p as u32 {
                let y = m.inv(x).unwrap();
                assert_eq!(m.mul(x, y), 1, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn inverse_near_top_of_range() {
        let m = FieldModulus::new(2147483647).unwrap();
        for x in [1u32, 2, 12345, 2147483646, 1 << 30] {
            assert_eq!(m.mul(x, m.inv(x).unwrap()), 1);
        }
    }

    #[test]
    fn element_arithmetic() {
        let p = FieldModulus::new(7).unwrap();
        let a = p.element(5);
        let b = p.element(4);
        assert_eq!((a + b).value(), 2);
        assert_eq!((a - b).value(), 1);
        assert_eq!((b - a).value(), 6);
        assert_eq!((a * b).value(), 6);
        assert_eq!((-a).value(), 2);
        assert_eq!(p.reduce_signed(-1), 6);
    }
}
