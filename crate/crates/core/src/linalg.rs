//! Dense matrices over a [`FrobRing`], plus elimination over fields.
//!
//! Matrices with entries in the prime field are kept as `PMat` (residues
//! as `u8`) and applied to vectors over any ring of the same
//! characteristic without lifting.

use crate::gf::{Fe, Field};
use crate::ring::FrobRing;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

pub type PMat = Mat<u8>;

impl<T: Clone> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Mat { rows: r, cols: c, data: rows.concat() }
    }

    pub fn from_cols(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl PMat {
    pub fn identity_p(n: usize) -> PMat {
        Mat::from_fn(n, n, |i, j| (i == j) as u8)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && self.data == PMat::identity_p(self.rows).data
    }

    pub fn lift<R: FrobRing>(&self, r: &R) -> Mat<R::Elem> {
        self.map(|&c| r.from_int(c as i64))
    }
}

/// Reduce a matrix over the prime field `f` (degree 1) to residues.
pub fn to_pmat(f: &Field, m: &Mat<Fe>) -> PMat {
    m.map(|&x| f.dense(x) as u8)
}

/// `m * x` for a prime-field matrix acting on ring elements.
pub fn pmat_vec<R: FrobRing>(r: &R, m: &PMat, x: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(m.cols, x.len());
    (0..m.rows)
        .map(|i| {
            let mut acc = r.zero();
            for (j, xj) in x.iter().enumerate() {
                let c = m.data[i * m.cols + j];
                if c != 0 {
                    acc = r.add(&acc, &r.scale_int(xj, c as i64));
                }
            }
            acc
        })
        .collect()
}

pub fn pmat_mul(p: u32, a: &PMat, b: &PMat) -> PMat {
    assert_eq!(a.cols, b.rows);
    Mat::from_fn(a.rows, b.cols, |i, j| {
        let s: u32 = (0..a.cols).map(|k| *a.at(i, k) as u32 * *b.at(k, j) as u32).sum();
        (s % p) as u8
    })
}

pub fn identity<R: FrobRing>(r: &R, n: usize) -> Mat<R::Elem> {
    Mat::from_fn(n, n, |i, j| if i == j { r.one() } else { r.zero() })
}

pub fn mat_vec<R: FrobRing>(r: &R, m: &Mat<R::Elem>, x: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(m.cols, x.len());
    (0..m.rows).map(|i| r.dot(m.row(i), x)).collect()
}

pub fn mat_mul<R: FrobRing>(r: &R, a: &Mat<R::Elem>, b: &Mat<R::Elem>) -> Mat<R::Elem> {
    assert_eq!(a.cols, b.rows);
    let bt = b.transpose();
    Mat::from_fn(a.rows, b.cols, |i, j| r.dot(a.row(i), bt.row(j)))
}

pub fn mat_add<R: FrobRing>(r: &R, a: &Mat<R::Elem>, b: &Mat<R::Elem>) -> Mat<R::Elem> {
    Mat::from_fn(a.rows, a.cols, |i, j| r.add(a.at(i, j), b.at(i, j)))
}

pub fn mat_sub<R: FrobRing>(r: &R, a: &Mat<R::Elem>, b: &Mat<R::Elem>) -> Mat<R::Elem> {
    Mat::from_fn(a.rows, a.cols, |i, j| r.sub(a.at(i, j), b.at(i, j)))
}

pub fn mat_frob<R: FrobRing>(r: &R, a: &Mat<R::Elem>, s: u32) -> Mat<R::Elem> {
    a.map(|x| r.frob(x, s))
}

/// Reduced row echelon form; returns the pivot columns.
/// Pivots must be units, so this is meant for fields.
pub fn rref<R: FrobRing>(r: &R, m: &mut Mat<R::Elem>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(piv) = (row..m.rows).find(|&i| r.is_unit(m.at(i, col))) else {
            continue;
        };
        if piv != row {
            for j in 0..m.cols {
                m.data.swap(piv * m.cols + j, row * m.cols + j);
            }
        }
        let inv = r.unit_inv(m.at(row, col)).unwrap();
        for j in 0..m.cols {
            let v = r.mul(m.at(row, j), &inv);
            m.set(row, j, v);
        }
        for i in 0..m.rows {
            if i == row || r.is_zero(m.at(i, col)) {
                continue;
            }
            let f = m.at(i, col).clone();
            for j in 0..m.cols {
                let v = r.sub(m.at(i, j), &r.mul(&f, m.at(row, j)));
                m.set(i, j, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<R: FrobRing>(r: &R, m: &Mat<R::Elem>) -> usize {
    rref(r, &mut m.clone()).len()
}

/// Basis of the right kernel, one vector per free column in increasing order.
pub fn kernel<R: FrobRing>(r: &R, m: &Mat<R::Elem>) -> Vec<Vec<R::Elem>> {
    let mut a = m.clone();
    let pivots = rref(r, &mut a);
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![r.zero(); m.cols];
        v[free] = r.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = r.neg(a.at(i, free));
        }
        out.push(v);
    }
    out
}

pub fn inverse<R: FrobRing>(r: &R, m: &Mat<R::Elem>) -> Option<Mat<R::Elem>> {
    let n = m.rows;
    if n != m.cols {
        return None;
    }
    let mut aug = Mat::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m.at(i, j).clone()
        } else if j - n == i {
            r.one()
        } else {
            r.zero()
        }
    });
    let piv = rref(r, &mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(Mat::from_fn(n, n, |i, j| aug.at(i, j + n).clone()))
}

pub fn det<R: FrobRing>(r: &R, m: &Mat<R::Elem>) -> R::Elem {
    let n = m.rows;
    let mut a = m.clone();
    let mut d = r.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&i| r.is_unit(a.at(i, col))) else {
            return r.zero();
        };
        if piv != col {
            for j in 0..n {
                a.data.swap(piv * n + j, col * n + j);
            }
            d = r.neg(&d);
        }
        let pv = a.at(col, col).clone();
        d = r.mul(&d, &pv);
        let inv = r.unit_inv(&pv).unwrap();
        for i in col + 1..n {
            let f = r.mul(a.at(i, col), &inv);
            if r.is_zero(&f) {
                continue;
            }
            for j in col..n {
                let v = r.sub(a.at(i, j), &r.mul(&f, a.at(col, j)));
                a.set(i, j, v);
            }
        }
    }
    d
}

/// Solve `m x = b`; any solution if several exist.
pub fn solve<R: FrobRing>(r: &R, m: &Mat<R::Elem>, b: &[R::Elem]) -> Option<Vec<R::Elem>> {
    let mut aug = Mat::from_fn(m.rows, m.cols + 1, |i, j| {
        if j < m.cols {
            m.at(i, j).clone()
        } else {
            b[i].clone()
        }
    });
    let piv = rref(r, &mut aug);
    if piv.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![r.zero(); m.cols];
    for (i, &pc) in piv.iter().enumerate() {
        x[pc] = aug.at(i, m.cols).clone();
    }
    Some(x)
}

/// Left inverse data for a full-column-rank matrix: row indices `rows`
/// and the inverse of the square submatrix on those rows.
#[derive(Clone, Debug)]
pub struct LeftInverse<T> {
    pub rows: Vec<usize>,
    pub inv: Mat<T>,
}

pub fn left_inverse<R: FrobRing>(r: &R, m: &Mat<R::Elem>) -> Option<LeftInverse<R::Elem>> {
    let mut t = m.transpose();
    let rows = rref(r, &mut t);
    if rows.len() < m.cols {
        return None;
    }
    let sub = Mat::from_fn(m.cols, m.cols, |i, j| m.at(rows[i], j).clone());
    Some(LeftInverse { rows, inv: inverse(r, &sub)? })
}

/// Normalize so the first nonzero coordinate is 1.
pub fn normalize<R: FrobRing>(r: &R, v: &[R::Elem]) -> Option<Vec<R::Elem>> {
    let lead = v.iter().find(|x| !r.is_zero(x))?;
    let inv = r.unit_inv(lead)?;
    Some(v.iter().map(|x| r.mul(x, &inv)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Fe, Field};
    use proptest::prelude::*;

    fn mat(f: &Field, n: usize, seed: &[usize]) -> Mat<Fe> {
        Mat::from_fn(n, n, |i, j| f.from_dense(seed[(i * n + j) % seed.len()] % f.order() as usize))
    }

    #[test]
    fn kernel_of_rank_one() {
        let f = Field::new(3, 1).unwrap();
        let m = Mat::from_rows(&[vec![Fe::ONE, f.from_int(2)], vec![f.from_int(2), Fe::ONE]]);
        let k = kernel(&f, &m);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&f, &m, &k[0]).iter().all(|x| x.is_zero()));
    }

    proptest! {
        #[test]
        fn inverse_and_det(seed in proptest::collection::vec(0usize..81, 16)) {
            let f = Field::new(3, 4).unwrap();
            let m = mat(&f, 4, &seed);
            let d = det(&f, &m);
            match inverse(&f, &m) {
                Some(inv) => {
                    prop_assert!(!d.is_zero());
                    prop_assert_eq!(mat_mul(&f, &m, &inv), identity(&f, 4));
                    prop_assert_eq!(f.mul(d, det(&f, &inv)), Fe::ONE);
                }
                None => prop_assert!(d.is_zero()),
            }
            prop_assert_eq!(rank(&f, &m) + kernel(&f, &m).len(), 4);
        }

        #[test]
        fn det_multiplicative(a in proptest::collection::vec(0usize..16, 9), b in proptest::collection::vec(0usize..16, 9)) {
            let f = Field::new(2, 4).unwrap();
            let (x, y) = (mat(&f, 3, &a), mat(&f, 3, &b));
            prop_assert_eq!(det(&f, &mat_mul(&f, &x, &y)), f.mul(det(&f, &x), det(&f, &y)));
        }
    }
}
