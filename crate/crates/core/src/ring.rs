//! Commutative rings of characteristic p carrying a Frobenius action.
//!
//! Every model map is written once against [`FrobRing`] and then evaluated
//! over a finite field, over truncated power series (branch expansions),
//! over dual numbers (Jacobians) or over symbolic polynomials (equation
//! compilation for the series solver).

use std::fmt::Debug;

pub trait FrobRing: Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn characteristic(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// `a^(p^s)`.
    fn frob(&self, a: &Self::Elem, s: u32) -> Self::Elem;
    /// Inverse if `a` is a unit.
    fn unit_inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.unit_inv(a).is_some()
    }

    /// Multiply by an integer, reduced mod p.
    fn scale_int(&self, a: &Self::Elem, c: i64) -> Self::Elem {
        let p = self.characteristic() as i64;
        match c.rem_euclid(p) {
            0 => self.zero(),
            1 => a.clone(),
            r if r == p - 1 => self.neg(a),
            r => self.mul(a, &self.from_int(r)),
        }
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.unit_inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Power allowing a negative exponent on a unit.
    fn zpow(&self, a: &Self::Elem, e: i64) -> Option<Self::Elem> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.unit_inv(a).map(|ai| self.pow(&ai, e.unsigned_abs()))
        }
    }

    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        let mut acc = self.zero();
        for (x, y) in a.iter().zip(b) {
            if !self.is_zero(x) && !self.is_zero(y) {
                acc = self.add(&acc, &self.mul(x, y));
            }
        }
        acc
    }

    fn frob_vec(&self, v: &[Self::Elem], s: u32) -> Vec<Self::Elem> {
        if s == 0 {
            return v.to_vec();
        }
        v.iter().map(|x| self.frob(x, s)).collect()
    }

    fn lift_vec(&self, v: &[u8]) -> Vec<Self::Elem> {
        v.iter().map(|&c| self.from_int(c as i64)).collect()
    }
}

/// Dual numbers `R[eps]/(eps^2)`.
///
/// A positive Frobenius power annihilates `eps`, so derivatives taken here
/// treat every Frobenius-twisted coordinate as a constant.
pub struct Dual<'a, R: FrobRing> {
    pub base: &'a R,
}

impl<'a, R: FrobRing> Dual<'a, R> {
    pub fn new(base: &'a R) -> Self {
        Dual { base }
    }

    pub fn elem(&self, a: R::Elem, b: R::Elem) -> (R::Elem, R::Elem) {
        (a, b)
    }
}

impl<R: FrobRing> FrobRing for Dual<'_, R> {
    type Elem = (R::Elem, R::Elem);

    fn characteristic(&self) -> u32 {
        self.base.characteristic()
    }
    fn zero(&self) -> Self::Elem {
        (self.base.zero(), self.base.zero())
    }
    fn one(&self) -> Self::Elem {
        (self.base.one(), self.base.zero())
    }
    fn from_int(&self, n: i64) -> Self::Elem {
        (self.base.from_int(n), self.base.zero())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        (self.base.add(&a.0, &b.0), self.base.add(&a.1, &b.1))
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        (self.base.neg(&a.0), self.base.neg(&a.1))
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let r = &self.base;
        (
            r.mul(&a.0, &b.0),
            r.add(&r.mul(&a.0, &b.1), &r.mul(&a.1, &b.0)),
        )
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.base.is_zero(&a.0) && self.base.is_zero(&a.1)
    }
    fn frob(&self, a: &Self::Elem, s: u32) -> Self::Elem {
        if s == 0 {
            a.clone()
        } else {
            (self.base.frob(&a.0, s), self.base.zero())
        }
    }
    fn unit_inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let r = &self.base;
        let i = r.unit_inv(&a.0)?;
        let e = r.neg(&r.mul(&a.1, &r.mul(&i, &i)));
        Some((i, e))
    }
    fn scale_int(&self, a: &Self::Elem, c: i64) -> Self::Elem {
        (self.base.scale_int(&a.0, c), self.base.scale_int(&a.1, c))
    }
}
