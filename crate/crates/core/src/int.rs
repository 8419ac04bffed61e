//! Integers that stay machine sized until they overflow.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Coeff {
    Small(i64),
    Big(BigInt),
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::Small(0)
    }
}

impl Coeff {
    pub fn from_big(b: BigInt) -> Coeff {
        match b.to_i64() {
            Some(v) => Coeff::Small(v),
            None => Coeff::Big(b),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            Coeff::Small(v) => BigInt::from(*v),
            Coeff::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Small(v) => *v == 0,
            Coeff::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Coeff::Small(1))
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Small(v) => match v.checked_neg() {
                Some(n) => Coeff::Small(n),
                None => Coeff::Big(-BigInt::from(*v)),
            },
            Coeff::Big(b) => Coeff::from_big(-b),
        }
    }

    pub fn add_assign(&mut self, other: &Coeff) {
        if let (Coeff::Small(a), Coeff::Small(b)) = (&*self, other) {
            if let Some(s) = a.checked_add(*b) {
                *self = Coeff::Small(s);
                return;
            }
        }
        *self = Coeff::from_big(self.to_big() + other.to_big());
    }

    /// `self += a * b`.
    pub fn add_mul(&mut self, a: &Coeff, b: &Coeff) {
        if let (Coeff::Small(s), Coeff::Small(x), Coeff::Small(y)) = (&*self, a, b) {
            if let Some(p) = x.checked_mul(*y) {
                if let Some(r) = s.checked_add(p) {
                    *self = Coeff::Small(r);
                    return;
                }
            }
        }
        *self = Coeff::from_big(self.to_big() + a.to_big() * b.to_big());
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        let mut out = Coeff::Small(0);
        out.add_mul(self, other);
        out
    }
}
