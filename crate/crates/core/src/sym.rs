//! Polynomials over GF(p) in Frobenius atoms `x_v^(p^s)`.
//!
//! Model equations are evaluated once over [`SymRing`] to obtain their
//! monomial structure, which the series solver then consumes.

use crate::ring::FrobRing;
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom {
    pub var: u16,
    pub frob: u16,
}

pub type Monomial = Vec<Atom>;

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, u8>,
}

impl Poly {
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }
}

pub struct SymRing {
    pub p: u32,
}

impl SymRing {
    pub fn new(p: u32) -> Self {
        SymRing { p }
    }

    pub fn var(&self, v: usize) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(vec![Atom { var: v as u16, frob: 0 }], 1);
        Poly { terms }
    }

    pub fn vars(&self, n: usize) -> Vec<Poly> {
        (0..n).map(|v| self.var(v)).collect()
    }

    fn insert(&self, out: &mut BTreeMap<Monomial, u8>, m: Monomial, c: u32) {
        let e = out.entry(m).or_insert(0);
        *e = ((*e as u32 + c) % self.p) as u8;
    }
}

impl FrobRing for SymRing {
    type Elem = Poly;

    fn characteristic(&self) -> u32 {
        self.p
    }
    fn zero(&self) -> Poly {
        Poly::default()
    }
    fn one(&self) -> Poly {
        self.from_int(1)
    }
    fn from_int(&self, n: i64) -> Poly {
        let c = n.rem_euclid(self.p as i64) as u8;
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let mut terms = a.terms.clone();
        for (m, &c) in &b.terms {
            self.insert(&mut terms, m.clone(), c as u32);
        }
        terms.retain(|_, c| *c != 0);
        Poly { terms }
    }
    fn neg(&self, a: &Poly) -> Poly {
        Poly {
            terms: a.terms.iter().map(|(m, &c)| (m.clone(), ((self.p - c as u32) % self.p) as u8)).collect(),
        }
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let mut terms = BTreeMap::new();
        for (ma, &ca) in &a.terms {
            for (mb, &cb) in &b.terms {
                let mut m = ma.clone();
                m.extend_from_slice(mb);
                m.sort();
                self.insert(&mut terms, m, ca as u32 * cb as u32);
            }
        }
        terms.retain(|_, c| *c != 0);
        Poly { terms }
    }
    fn is_zero(&self, a: &Poly) -> bool {
        a.terms.is_empty()
    }
    fn frob(&self, a: &Poly, s: u32) -> Poly {
        // Coefficients lie in GF(p) and are fixed; atoms shift their exponent.
        Poly {
            terms: a
                .terms
                .iter()
                .map(|(m, &c)| {
                    let shifted = m.iter().map(|x| Atom { var: x.var, frob: x.frob + s as u16 }).collect();
                    (shifted, c)
                })
                .collect(),
        }
    }
    fn unit_inv(&self, a: &Poly) -> Option<Poly> {
        match a.terms.iter().next() {
            Some((m, &c)) if a.terms.len() == 1 && m.is_empty() => {
                let inv = if c == 1 { 1 } else { 2 };
                Some(self.from_int(inv))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_of_square_in_char_two() {
        let r = SymRing::new(2);
        let x = r.var(0);
        let y = r.var(1);
        let s = r.add(&x, &y);
        let sq = r.mul(&s, &s);
        // (x + y)^2 = x^2 + y^2 as polynomials, but atoms keep x*x distinct from x^(2).
        assert_eq!(sq.terms.len(), 2);
        assert_eq!(r.frob(&s, 1).terms.len(), 2);
        assert_eq!(r.frob(&s, 1).degree(), 1);
    }
}
