//! Finite fields GF(p^k) for p in {2, 3}.
//!
//! Elements are packed into a `u32`. For p = 2 the bits are the polynomial
//! coefficients. For p = 3 each coefficient is a trit split over two bit
//! planes: bit i of the low half is set when coefficient i is 1, bit i of
//! the high half when it is 2. Multiplication, inversion and Frobenius go
//! through log/exp tables.

use crate::error::{Error, Result};
use crate::ring::FrobRing;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest field order for which tables are built.
pub const MAX_ORDER: u32 = 1 << 22;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({:#x})", self.0)
    }
}

#[derive(Clone)]
pub struct Field {
    p: u32,
    k: u32,
    order: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    packed: Vec<u32>,
    tri: Vec<u32>,
    frob_mul: Vec<u64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

// Dense polynomial helpers over GF(p); coefficient vectors are low degree first.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = if m[dm] == 1 { 1 } else { 2 }; // p <= 3
    while r.len() > dm && r.len() > 1 {
        let c = (r[r.len() - 1] * lead_inv) % p;
        let shift = r.len() - 1 - dm;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - c * mi % p) % p;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_powmod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut base = poly_rem(a, m, p);
    let mut acc = vec![1u32];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn digits(mut n: u64, p: u32, len: usize) -> Vec<u32> {
    let mut d = vec![0u32; len];
    for x in d.iter_mut() {
        *x = (n % p as u64) as u32;
        n /= p as u64;
    }
    d
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-p
/// digits of `n` (coefficient of x^(deg-1) most significant).
fn monic_from_index(n: u64, p: u32, deg: u32) -> Vec<u32> {
    let mut c = digits(n, p, deg as usize);
    c.push(1);
    c
}

pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() as u32 - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d);
        for n in 0..count {
            let g = monic_from_index(n, p, d);
            let r = poly_rem(f, &g, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree `k`.
pub fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    (0..count)
        .map(|n| monic_from_index(n, p, k))
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Field {
    pub fn new(p: u32, k: u32) -> Result<Field> {
        if p != 2 && p != 3 {
            return Err(Error::UnsupportedField { p, k, reason: "characteristic must be 2 or 3" });
        }
        if k == 0 || (p == 3 && k > 16) {
            return Err(Error::UnsupportedField { p, k, reason: "degree out of range" });
        }
        let order64 = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if order64 > MAX_ORDER as u64 {
            return Err(Error::UnsupportedField { p, k, reason: "table size limit exceeded" });
        }
        let order = order64 as u32;
        let modulus = least_irreducible(p, k);

        let mut tri = Vec::new();
        if p == 3 {
            tri = (0..1u32 << k)
                .map(|mask| {
                    (0..k).filter(|i| mask >> i & 1 == 1).map(|i| 3u32.pow(i)).sum()
                })
                .collect();
        }
        let pack_digits = |d: &[u32]| -> u32 {
            if p == 2 {
                d.iter().enumerate().map(|(i, &c)| c << i).sum()
            } else {
                let mut v = 0;
                for (i, &c) in d.iter().enumerate() {
                    if c == 1 {
                        v |= 1 << i;
                    } else if c == 2 {
                        v |= 1 << (i + 16);
                    }
                }
                v
            }
        };
        let packed: Vec<u32> = (0..order as u64)
            .map(|n| pack_digits(&digits(n, p, k as usize)))
            .collect();

        let group = (order - 1) as u64;
        let factors = prime_factors(group);
        let gen = (1..order as u64)
            .map(|n| poly_trim(digits(n, p, k as usize)))
            .find(|g| {
                factors
                    .iter()
                    .all(|&r| poly_powmod(g, group / r, &modulus, p) != vec![1])
            })
            .expect("multiplicative group is cyclic");

        let mut exp = vec![0u32; 2 * group as usize];
        let mut log = vec![0u32; order as usize];
        let mut cur = vec![1u32];
        for i in 0..group as usize {
            let mut d = cur.clone();
            d.resize(k as usize, 0);
            let pk = pack_digits(&d);
            exp[i] = pk;
            exp[i + group as usize] = pk;
            let dense: u64 = d.iter().rev().fold(0, |acc, &c| acc * p as u64 + c as u64);
            log[dense as usize] = i as u32;
            cur = poly_mulmod(&cur, &gen, &modulus, p);
        }
        let frob_mul = (0..k)
            .map(|s| {
                let mut m = 1u64;
                for _ in 0..s {
                    m = m * p as u64 % group.max(1);
                }
                m
            })
            .collect();

        Ok(Field { p, k, order, modulus, exp, log, packed, tri, frob_mul })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.k
    }
    pub fn order(&self) -> u32 {
        self.order
    }
    /// Defining polynomial, low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    fn mask(&self) -> u32 {
        (1u32 << self.k) - 1
    }

    /// Index of `x` in `0..order` (base-p digits of the coefficients).
    #[inline]
    pub fn dense(&self, x: Fe) -> usize {
        if self.p == 2 {
            x.0 as usize
        } else {
            (self.tri[(x.0 & 0xffff) as usize] + 2 * self.tri[(x.0 >> 16) as usize]) as usize
        }
    }

    #[inline]
    pub fn from_dense(&self, n: usize) -> Fe {
        Fe(self.packed[n])
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        self.packed.iter().map(|&x| Fe(x))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + '_ {
        self.packed[1..].iter().map(|&x| Fe(x))
    }

    pub fn coeffs(&self, x: Fe) -> Vec<u32> {
        (0..self.k)
            .map(|i| {
                if self.p == 2 {
                    x.0 >> i & 1
                } else if x.0 >> i & 1 == 1 {
                    1
                } else if x.0 >> (i + 16) & 1 == 1 {
                    2
                } else {
                    0
                }
            })
            .collect()
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Fe {
        let mut v = 0;
        for (i, &d) in c.iter().enumerate().take(self.k as usize) {
            match d % self.p {
                0 => {}
                1 => v |= 1 << i,
                _ => v |= 1 << (i + 16),
            }
        }
        Fe(v)
    }

    /// Element with a single coefficient `xi^i`.
    pub fn basis_elem(&self, i: u32) -> Fe {
        Fe(1 << i)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let m = self.mask();
        let (a1, a2) = (a.0 & m, a.0 >> 16);
        let (b1, b2) = (b.0 & m, b.0 >> 16);
        let a0 = !(a1 | a2) & m;
        let b0 = !(b1 | b2) & m;
        let r1 = (a0 & b1) | (a1 & b0) | (a2 & b2);
        let r2 = (a0 & b2) | (a2 & b0) | (a1 & b1);
        Fe(r1 | r2 << 16)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            a
        } else {
            Fe((a.0 >> 16) | (a.0 & 0xffff) << 16)
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn log(&self, a: Fe) -> u32 {
        self.log[self.dense(a)]
    }

    #[inline]
    pub fn exp(&self, e: u64) -> Fe {
        Fe(self.exp[(e % (self.order as u64 - 1)) as usize])
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        Fe(self.exp[(self.log(a) + self.log(b)) as usize])
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        let g = self.order - 1;
        Some(Fe(self.exp[((g - self.log(a)) % g) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let g = self.order as u64 - 1;
        Fe(self.exp[((self.log(a) as u64 * (e % g)) % g) as usize])
    }

    /// `a^(p^s)`; negative `s` applies the inverse automorphism.
    #[inline]
    pub fn frob(&self, a: Fe, s: i64) -> Fe {
        if a.0 == 0 {
            return a;
        }
        let s = s.rem_euclid(self.k as i64) as usize;
        if s == 0 {
            return a;
        }
        let g = self.order as u64 - 1;
        Fe(self.exp[((self.log(a) as u64 * self.frob_mul[s]) % g) as usize])
    }

    pub fn from_int(&self, n: i64) -> Fe {
        match n.rem_euclid(self.p as i64) {
            0 => Fe::ZERO,
            1 => Fe::ONE,
            _ => Fe(1 << 16),
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        self.from_dense(rng.gen_range(0..self.order as usize))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        self.from_dense(rng.gen_range(1..self.order as usize))
    }

    /// True when `x` lies in the subfield GF(p^d).
    pub fn in_subfield(&self, x: Fe, d: u32) -> bool {
        self.frob(x, d as i64) == x
    }

    /// A square root, if one exists.
    pub fn sqrt(&self, x: Fe) -> Option<Fe> {
        if x.0 == 0 {
            return Some(x);
        }
        if self.p == 2 {
            return Some(self.frob(x, self.k as i64 - 1));
        }
        let l = self.log(x);
        (l % 2 == 0).then(|| Fe(self.exp[(l / 2) as usize]))
    }

    /// Degree of the smallest subfield containing `x`.
    pub fn element_degree(&self, x: Fe) -> u32 {
        (1..=self.k)
            .find(|d| self.k % d == 0 && self.in_subfield(x, *d))
            .unwrap()
    }

    pub fn is_subfield_of(&self, big: &Field) -> bool {
        self.p == big.p && big.k % self.k == 0
    }
}

impl FrobRing for Field {
    type Elem = Fe;

    fn characteristic(&self) -> u32 {
        self.p
    }
    fn zero(&self) -> Fe {
        Fe::ZERO
    }
    fn one(&self) -> Fe {
        Fe::ONE
    }
    fn from_int(&self, n: i64) -> Fe {
        Field::from_int(self, n)
    }
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        Field::add(self, *a, *b)
    }
    fn neg(&self, a: &Fe) -> Fe {
        Field::neg(self, *a)
    }
    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        Field::sub(self, *a, *b)
    }
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        Field::mul(self, *a, *b)
    }
    fn is_zero(&self, a: &Fe) -> bool {
        a.0 == 0
    }
    fn frob(&self, a: &Fe, s: u32) -> Fe {
        Field::frob(self, *a, s as i64)
    }
    fn unit_inv(&self, a: &Fe) -> Option<Fe> {
        self.inv(*a)
    }
    fn scale_int(&self, a: &Fe, c: i64) -> Fe {
        match c.rem_euclid(self.p as i64) {
            0 => Fe::ZERO,
            1 => *a,
            _ => Field::neg(self, *a),
        }
    }
    fn pow(&self, a: &Fe, e: u64) -> Fe {
        Field::pow(self, *a, e)
    }
}

/// Field embedding GF(p^a) -> GF(p^b) sending the generator of the source
/// to the root of its modulus that is least in packed order.
pub struct Embedding<'a> {
    src: &'a Field,
    dst: &'a Field,
    powers: Vec<Fe>,
}

impl<'a> Embedding<'a> {
    pub fn new(src: &'a Field, dst: &'a Field) -> Result<Self> {
        if !src.is_subfield_of(dst) {
            return Err(Error::NoEmbedding { p: src.p, from: src.k, to: dst.k });
        }
        let is_root = |r: Fe| {
            let mut acc = Fe::ZERO;
            for &c in src.modulus.iter().rev() {
                acc = dst.add(dst.mul(acc, r), dst.from_int(c as i64));
            }
            acc.is_zero()
        };
        let root = dst
            .elements()
            .filter(|&r| is_root(r))
            .min()
            .ok_or(Error::NoEmbedding { p: src.p, from: src.k, to: dst.k })?;
        let powers = (0..src.k).map(|i| dst.pow(root, i as u64)).collect();
        Ok(Embedding { src, dst, powers })
    }

    pub fn map(&self, x: Fe) -> Fe {
        self.src
            .coeffs(x)
            .iter()
            .zip(&self.powers)
            .fold(Fe::ZERO, |acc, (&c, &r)| {
                self.dst.add(acc, FrobRing::scale_int(self.dst, &r, c as i64))
            })
    }

    pub fn map_vec(&self, v: &[Fe]) -> Vec<Fe> {
        v.iter().map(|&x| self.map(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_moduli() {
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(least_irreducible(2, 4), vec![1, 1, 0, 0, 1]);
    }

    #[test]
    fn frobenius_in_gf4() {
        let f = Field::new(2, 2).unwrap();
        let g = Fe(0b10);
        assert_eq!(f.frob(g, 1), f.add(g, Fe::ONE));
        assert_eq!(f.frob(g, 2), g);
    }

    #[test]
    fn multiplicative_order() {
        let f = Field::new(3, 7).unwrap();
        assert_eq!(f.order(), 2187);
        let g = f.exp(1);
        let mut x = g;
        let mut n = 1;
        while x != Fe::ONE {
            x = f.mul(x, g);
            n += 1;
        }
        assert_eq!(n, 2186);
    }

    #[test]
    fn rejects_oversized() {
        assert!(Field::new(2, 23).is_err());
        assert!(Field::new(5, 1).is_err());
        assert!(Field::new(2, 22).is_ok());
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let a = Field::new(3, 2).unwrap();
        let b = Field::new(3, 4).unwrap();
        let e = Embedding::new(&a, &b).unwrap();
        for x in a.elements() {
            assert!(b.in_subfield(e.map(x), 2));
            for y in a.elements() {
                assert_eq!(e.map(a.mul(x, y)), b.mul(e.map(x), e.map(y)));
                assert_eq!(e.map(a.add(x, y)), b.add(e.map(x), e.map(y)));
            }
        }
        assert!(Embedding::new(&b, &a).is_err());
    }

    fn check_axioms(f: &Field, x: Fe, y: Fe, z: Fe) {
        assert_eq!(f.add(x, y), f.add(y, x));
        assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        assert_eq!(f.add(x, f.neg(x)), Fe::ZERO);
        if !x.is_zero() {
            assert_eq!(f.mul(x, f.inv(x).unwrap()), Fe::ONE);
        }
        assert_eq!(f.frob(f.mul(x, y), 1), f.mul(f.frob(x, 1), f.frob(y, 1)));
        assert_eq!(f.frob(f.add(x, y), 1), f.add(f.frob(x, 1), f.frob(y, 1)));
        assert_eq!(f.frob(x, 1), f.pow(x, f.p() as u64));
        assert_eq!(f.frob(f.frob(x, -1), 1), x);
    }

    proptest! {
        #[test]
        fn field_axioms_gf3_5(a in 0usize..243, b in 0usize..243, c in 0usize..243) {
            let f = Field::new(3, 5).unwrap();
            check_axioms(&f, f.from_dense(a), f.from_dense(b), f.from_dense(c));
        }

        #[test]
        fn field_axioms_gf2_9(a in 0usize..512, b in 0usize..512, c in 0usize..512) {
            let f = Field::new(2, 9).unwrap();
            check_axioms(&f, f.from_dense(a), f.from_dense(b), f.from_dense(c));
        }

        #[test]
        fn dense_round_trip(a in 0usize..6561) {
            let f = Field::new(3, 8).unwrap();
            prop_assert_eq!(f.dense(f.from_dense(a)), a);
            let x = f.from_dense(a);
            prop_assert_eq!(f.from_coeffs(&f.coeffs(x)), x);
        }
    }
}
