//! Exact coefficient arithmetic over the rationals or a prime field.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The coefficient field of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// Validates the prime for [`Field::Prime`].
    pub fn prime(p: u64) -> Result<Field> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => Scalar::Mod {
                value: v.rem_euclid(p as i64) as u64,
                prime: p,
            },
        }
    }

    pub fn from_bigint(self, v: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(v.clone())),
            Field::Prime(p) => {
                let r = ((v % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
                Scalar::Mod {
                    value: r.to_u64().expect("reduced residue fits u64"),
                    prime: p,
                }
            }
        }
    }

    /// Maps a rational into the field; fails when the denominator vanishes mod p.
    pub fn from_rational(self, q: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(Scalar::Rational(q.clone())),
            Field::Prime(_) => {
                let num = self.from_bigint(q.numer());
                let den = self.from_bigint(q.denom());
                Ok(num.mul(&den.inv()?))
            }
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A field element. Rationals are kept in lowest terms with positive
/// denominator; residues are kept in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Mod { value: u64, prime: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Mod { prime, .. } => Field::Prime(*prime),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Mod { value: a, prime }, Scalar::Mod { value: b, prime: q }) => {
                debug_assert_eq!(prime, q);
                Scalar::Mod {
                    value: ((*a as u128 + *b as u128) % *prime as u128) as u64,
                    prime: *prime,
                }
            }
            _ => panic!("mixed coefficient fields"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Mod { value, prime } => Scalar::Mod {
                value: (prime - value) % prime,
                prime: *prime,
            },
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Mod { value: a, prime }, Scalar::Mod { value: b, prime: q }) => {
                debug_assert_eq!(prime, q);
                Scalar::Mod {
                    value: ((*a as u128 * *b as u128) % *prime as u128) as u64,
                    prime: *prime,
                }
            }
            _ => panic!("mixed coefficient fields"),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::Mod { value, prime } => Scalar::Mod {
                value: mod_pow(*value, prime - 2, *prime),
                prime: *prime,
            },
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: &BigInt) -> Result<Scalar> {
        if exp.is_negative() {
            return self.inv()?.pow(&-exp);
        }
        let mut base = self.clone();
        let mut result = self.field().one();
        let mut e = exp.clone();
        let two = BigInt::from(2);
        while !e.is_zero() {
            if (&e % &two).is_one() {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e /= &two;
        }
        Ok(result)
    }

    /// The rational value, when this is a rational scalar.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Mod { .. } => None,
        }
    }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let m = p as u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn residues_are_reduced() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.from_i64(-1), Scalar::Mod { value: 6, prime: 7 });
        assert_eq!(f.from_i64(15), Scalar::Mod { value: 1, prime: 7 });
        let three = f.from_i64(3);
        assert!(three.mul(&three.inv().unwrap()).is_one());
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(Field::prime(91), Err(Error::NotPrime(91)));
        assert_eq!(Field::prime(1), Err(Error::NotPrime(1)));
        assert!(Field::prime(2).is_ok());
    }

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let q = Field::Rational
            .from_rational(&BigRational::new(BigInt::from(6), BigInt::from(-4)))
            .unwrap();
        assert_eq!(q.to_string(), "-3/2");
    }

    #[test]
    fn rational_reduces_mod_p() {
        let f = Field::prime(5).unwrap();
        let half = f
            .from_rational(&BigRational::new(BigInt::from(1), BigInt::from(2)))
            .unwrap();
        assert_eq!(half, Scalar::Mod { value: 3, prime: 5 });
        let bad = f.from_rational(&BigRational::new(BigInt::from(1), BigInt::from(5)));
        assert_eq!(bad, Err(Error::DivisionByZero));
    }

    #[test]
    fn powers() {
        let two = Field::Rational.from_i64(2);
        assert_eq!(two.pow(&BigInt::from(10)).unwrap(), Field::Rational.from_i64(1024));
        assert_eq!(two.pow(&BigInt::from(-1)).unwrap().to_string(), "1/2");
    }

    proptest! {
        #[test]
        fn rational_inverse_is_exact(n in -10_000i64..10_000, d in 1i64..10_000) {
            prop_assume!(n != 0);
            let q = Scalar::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)));
            prop_assert!(q.mul(&q.inv().unwrap()).is_one());
        }
    }
}
