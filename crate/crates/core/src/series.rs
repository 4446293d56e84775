//! Truncated power series `K[[t]] / (t^n)` over a finite field.

use crate::gf::{Fe, Field};
use crate::ring::FrobRing;

pub struct SeriesRing<'a> {
    pub field: &'a Field,
    /// Number of coefficients kept (precision).
    pub n: usize,
}

/// Coefficient vector, always of length `n`.
pub type Series = Vec<Fe>;

const SCHOOLBOOK: usize = 32;

fn schoolbook(f: &Field, a: &[Fe], b: &[Fe], out: &mut [Fe]) {
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let lx = f.log(x);
        for (j, &y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let prod = f.exp((lx + f.log(y)) as u64);
            out[i + j] = f.add(out[i + j], prod);
        }
    }
}

/// Full product of equal-length slices into `out` (length `2m - 1`).
fn karatsuba(f: &Field, a: &[Fe], b: &[Fe], out: &mut [Fe]) {
    let m = a.len();
    if m <= SCHOOLBOOK {
        schoolbook(f, a, b, out);
        return;
    }
    let h = m / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let hi = m - h;
    let mut z0 = vec![Fe::ZERO; 2 * h - 1];
    let mut z2 = vec![Fe::ZERO; 2 * hi - 1];
    karatsuba(f, a0, b0, &mut z0);
    karatsuba(f, a1, b1, &mut z2);
    let mut sa = a1.to_vec();
    let mut sb = b1.to_vec();
    for i in 0..h {
        sa[i] = f.add(sa[i], a0[i]);
        sb[i] = f.add(sb[i], b0[i]);
    }
    let mut z1 = vec![Fe::ZERO; 2 * hi - 1];
    karatsuba(f, &sa, &sb, &mut z1);
    for (i, &z) in z0.iter().enumerate() {
        z1[i] = f.sub(z1[i], z);
        out[i] = f.add(out[i], z);
    }
    for (i, &z) in z2.iter().enumerate() {
        z1[i] = f.sub(z1[i], z);
        out[i + 2 * h] = f.add(out[i + 2 * h], z);
    }
    for (i, &z) in z1.iter().enumerate() {
        out[i + h] = f.add(out[i + h], z);
    }
}

impl<'a> SeriesRing<'a> {
    pub fn new(field: &'a Field, n: usize) -> Self {
        assert!(n > 0);
        SeriesRing { field, n }
    }

    pub fn constant(&self, c: Fe) -> Series {
        let mut s = vec![Fe::ZERO; self.n];
        s[0] = c;
        s
    }

    /// `c0 + t`.
    pub fn linear(&self, c0: Fe) -> Series {
        let mut s = self.constant(c0);
        if self.n > 1 {
            s[1] = Fe::ONE;
        }
        s
    }

    pub fn from_coeffs(&self, c: &[Fe]) -> Series {
        let mut s = vec![Fe::ZERO; self.n];
        for (d, x) in s.iter_mut().zip(c) {
            *d = *x;
        }
        s
    }

    pub fn embed_vec(&self, v: &[Fe]) -> Vec<Series> {
        v.iter().map(|&c| self.constant(c)).collect()
    }
}

/// Index of the first nonzero coefficient.
pub fn valuation(s: &[Fe]) -> Option<usize> {
    s.iter().position(|x| !x.is_zero())
}

fn nnz(s: &[Fe]) -> usize {
    s.iter().filter(|x| !x.is_zero()).count()
}

impl FrobRing for SeriesRing<'_> {
    type Elem = Series;

    fn characteristic(&self) -> u32 {
        self.field.p()
    }
    fn zero(&self) -> Series {
        vec![Fe::ZERO; self.n]
    }
    fn one(&self) -> Series {
        self.constant(Fe::ONE)
    }
    fn from_int(&self, n: i64) -> Series {
        self.constant(self.field.from_int(n))
    }
    fn add(&self, a: &Series, b: &Series) -> Series {
        a.iter().zip(b).map(|(&x, &y)| self.field.add(x, y)).collect()
    }
    fn neg(&self, a: &Series) -> Series {
        a.iter().map(|&x| self.field.neg(x)).collect()
    }
    fn sub(&self, a: &Series, b: &Series) -> Series {
        a.iter().zip(b).map(|(&x, &y)| self.field.sub(x, y)).collect()
    }
    fn mul(&self, a: &Series, b: &Series) -> Series {
        let f = self.field;
        let n = self.n;
        let (va, vb) = match (valuation(a), valuation(b)) {
            (Some(x), Some(y)) if x + y < n => (x, y),
            _ => return self.zero(),
        };
        let (na, nb) = (nnz(a), nnz(b));
        let mut out = vec![Fe::ZERO; n];
        if (na.min(nb) as u64) * 16 < n as u64 {
            let (sparse, dense) = if na <= nb { (a, b) } else { (b, a) };
            for (i, &x) in sparse.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let lx = f.log(x);
                for (j, &y) in dense[..n - i].iter().enumerate() {
                    if !y.is_zero() {
                        out[i + j] = f.add(out[i + j], f.exp((lx + f.log(y)) as u64));
                    }
                }
            }
            return out;
        }
        // Shift out valuations, multiply the remaining heads.
        let m = n - va - vb;
        let mut full = vec![Fe::ZERO; 2 * m - 1];
        karatsuba(f, &a[va..va + m], &b[vb..vb + m], &mut full);
        out[va + vb..].copy_from_slice(&full[..m]);
        out
    }
    fn is_zero(&self, a: &Series) -> bool {
        a.iter().all(|x| x.is_zero())
    }
    fn frob(&self, a: &Series, s: u32) -> Series {
        if s == 0 {
            return a.clone();
        }
        let step = (self.field.p() as usize).saturating_pow(s);
        let mut out = vec![Fe::ZERO; self.n];
        for (i, &x) in a.iter().enumerate() {
            match i.checked_mul(step) {
                Some(j) if j < self.n => out[j] = self.field.frob(x, s as i64),
                _ => break,
            }
        }
        out
    }
    fn unit_inv(&self, a: &Series) -> Option<Series> {
        let f = self.field;
        let inv0 = f.inv(a[0])?;
        let mut b = self.constant(inv0);
        let mut prec = 1;
        let two = self.from_int(2);
        while prec < self.n {
            prec = (2 * prec).min(self.n);
            let sub = SeriesRing::new(f, prec);
            let a_t = a[..prec].to_vec();
            let b_t = b[..prec].to_vec();
            let ab = sub.mul(&a_t, &b_t);
            let corr = sub.sub(&two[..prec].to_vec(), &ab);
            let nb = sub.mul(&b_t, &corr);
            b = self.from_coeffs(&nb);
        }
        Some(b)
    }
    fn scale_int(&self, a: &Series, c: i64) -> Series {
        match c.rem_euclid(self.field.p() as i64) {
            0 => self.zero(),
            1 => a.clone(),
            _ => self.neg(a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(f: &Field, a: &[Fe], b: &[Fe], n: usize) -> Vec<Fe> {
        let mut out = vec![Fe::ZERO; n];
        for i in 0..n {
            for j in 0..n - i {
                out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
            }
        }
        out
    }

    #[test]
    fn frobenius_spreads_coefficients() {
        let f = Field::new(3, 2).unwrap();
        let r = SeriesRing::new(&f, 20);
        let x = r.linear(f.from_dense(5));
        let cube = r.mul(&r.mul(&x, &x), &x);
        assert_eq!(r.frob(&x, 1), cube);
    }

    proptest! {
        #[test]
        fn karatsuba_matches_naive(a in proptest::collection::vec(0usize..9, 150), b in proptest::collection::vec(0usize..9, 150), sparse in 0usize..3) {
            let f = Field::new(3, 2).unwrap();
            let n = 150;
            let r = SeriesRing::new(&f, n);
            let mut x: Vec<Fe> = a.iter().map(|&d| f.from_dense(d)).collect();
            let y: Vec<Fe> = b.iter().map(|&d| f.from_dense(d)).collect();
            if sparse == 0 {
                for (i, c) in x.iter_mut().enumerate() {
                    if i % 40 != 3 { *c = Fe::ZERO; }
                }
            }
            prop_assert_eq!(r.mul(&x, &y), naive(&f, &x, &y, n));
        }

        #[test]
        fn inverse_of_unit(a in proptest::collection::vec(0usize..4, 100)) {
            let f = Field::new(2, 2).unwrap();
            let r = SeriesRing::new(&f, 100);
            let mut x: Vec<Fe> = a.iter().map(|&d| f.from_dense(d)).collect();
            x[0] = Fe::ONE;
            let xi = r.unit_inv(&x).unwrap();
            prop_assert_eq!(r.mul(&x, &xi), r.one());
        }
    }
}
