//! Imaginary octonions over F_3 with the product x*y, viewed as a Lie
//! algebra; its derivation space W = ker(*: Λ²V → V) and the quotient
//! V′ = W/W⊥ by the inner derivations.
//!
//! Structure constants live in the prime field; all evaluation is generic
//! over a [`FrobRing`] of characteristic 3.

use crate::error::{Error, Result};
use crate::exterior;
use crate::gf::{Fe, Field};
use crate::linalg::{self, LeftInverse, Mat, PMat};
use crate::ring::FrobRing;

/// (a_i, a_{i+1}, a_{i+3}) multiply like (i, j, k) in the quaternions.
pub const TRIPLES: [[usize; 3]; 7] = {
    let mut t = [[0; 3]; 7];
    let mut i = 0;
    while i < 7 {
        t[i] = [i, (i + 1) % 7, (i + 3) % 7];
        i += 1;
    }
    t
};

/// A 7-dimensional algebra over F_3 with a symmetric pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    /// Row-major 7×7 list of products e_i*e_j as sparse (k, c) terms.
    table: Vec<Vec<(usize, u8)>>,
    pub gram: PMat,
}

impl Algebra {
    pub fn octonions() -> Algebra {
        let mut t = vec![[0u8; 7]; 49];
        for [a, b, c] in TRIPLES {
            for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                t[x * 7 + y][z] = 1;
                t[y * 7 + x][z] = 2;
            }
        }
        let gram = Mat::from_fn(7, 7, |i, j| if i == j { 2 } else { 0 });
        Algebra::from_tensor(&t, gram)
    }

    pub fn from_tensor(t: &[[u8; 7]], gram: PMat) -> Algebra {
        let table = t
            .iter()
            .map(|v| v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, &c)| (k, c)).collect())
            .collect();
        Algebra { table, gram }
    }

    pub fn tensor(&self) -> Vec<[u8; 7]> {
        self.table
            .iter()
            .map(|terms| {
                let mut v = [0u8; 7];
                for &(k, c) in terms {
                    v[k] = c;
                }
                v
            })
            .collect()
    }

    pub fn star<R: FrobRing>(&self, r: &R, x: &[R::Elem], y: &[R::Elem]) -> Vec<R::Elem> {
        let mut out = vec![r.zero(); 7];
        for i in 0..7 {
            if r.is_zero(&x[i]) {
                continue;
            }
            for j in 0..7 {
                let terms = &self.table[i * 7 + j];
                if terms.is_empty() || r.is_zero(&y[j]) {
                    continue;
                }
                let xy = r.mul(&x[i], &y[j]);
                for &(k, c) in terms {
                    out[k] = r.add(&out[k], &r.scale_int(&xy, c as i64));
                }
            }
        }
        out
    }

    pub fn pair<R: FrobRing>(&self, r: &R, x: &[R::Elem], y: &[R::Elem]) -> R::Elem {
        r.dot(x, &linalg::pmat_vec(r, &self.gram, y))
    }

    /// Matrix of y ↦ x*y.
    pub fn ad<R: FrobRing>(&self, r: &R, x: &[R::Elem]) -> Mat<R::Elem> {
        let mut m = Mat::from_fn(7, 7, |_, _| r.zero());
        for i in 0..7 {
            if r.is_zero(&x[i]) {
                continue;
            }
            for j in 0..7 {
                for &(k, c) in &self.table[i * 7 + j] {
                    let v = r.add(m.at(k, j), &r.scale_int(&x[i], c as i64));
                    m.set(k, j, v);
                }
            }
        }
        m
    }

    /// e_x = 1 + ad(x) + 2·ad(x)², an automorphism when ⟨x,x⟩ = 0.
    pub fn exp_auto<R: FrobRing>(&self, r: &R, x: &[R::Elem]) -> Mat<R::Elem> {
        let a = self.ad(r, x);
        let a2 = linalg::mat_mul(r, &a, &a);
        let id = linalg::identity(r, 7);
        Mat::from_fn(7, 7, |i, j| r.add(&r.add(id.at(i, j), a.at(i, j)), &r.scale_int(a2.at(i, j), 2)))
    }

    pub fn is_derivation<R: FrobRing>(&self, r: &R, d: &Mat<R::Elem>) -> bool {
        let e = |i: usize| {
            let mut v = vec![r.zero(); 7];
            v[i] = r.one();
            v
        };
        (0..7).all(|i| {
            (0..7).all(|j| {
                let lhs = linalg::mat_vec(r, d, &self.star(r, &e(i), &e(j)));
                let a = self.star(r, &d.col(i), &e(j));
                let b = self.star(r, &e(i), &d.col(j));
                (0..7).all(|k| lhs[k] == r.add(&a[k], &b[k]))
            })
        })
    }

    pub fn is_automorphism<R: FrobRing>(&self, r: &R, g: &Mat<R::Elem>) -> bool {
        (0..7).all(|i| {
            (0..7).all(|j| {
                let mut ei = vec![r.zero(); 7];
                let mut ej = vec![r.zero(); 7];
                ei[i] = r.one();
                ej[j] = r.one();
                linalg::mat_vec(r, g, &self.star(r, &ei, &ej)) == self.star(r, &g.col(i), &g.col(j))
            })
        })
    }

    /// Basis of the derivations, from the linear system
    /// D(e_i*e_j) = D(e_i)*e_j + e_i*D(e_j) in the 49 entries of D.
    pub fn derivations(&self, pf: &Field) -> Vec<Mat<Fe>> {
        let t = self.tensor();
        let mut rows = Vec::with_capacity(343);
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let mut row = vec![0i64; 49];
                    for l in 0..7 {
                        row[k * 7 + l] += t[i * 7 + j][l] as i64;
                        row[l * 7 + i] -= t[l * 7 + j][k] as i64;
                        row[l * 7 + j] -= t[i * 7 + l][k] as i64;
                    }
                    rows.push(row.into_iter().map(|c| pf.from_int(c)).collect());
                }
            }
        }
        linalg::kernel(pf, &Mat::from_rows(&rows))
            .into_iter()
            .map(|v| Mat { rows: 7, cols: 7, data: v })
            .collect()
    }

    /// Whether the columns of `b` multiply like the standard basis.
    pub fn is_frame(&self, pf: &Field, b: &PMat) -> bool {
        let cols: Vec<Vec<Fe>> = (0..7).map(|i| pf.lift_vec(&b.col(i))).collect();
        TRIPLES.iter().all(|&[i, j, k]| self.star(pf, &cols[i], &cols[j]) == cols[k])
            && (0..7).all(|i| (0..7).all(|j| self.pair(pf, &cols[i], &cols[j]) == pf.from_int(if i == j { -1 } else { 0 })))
    }

    /// Frames (b_0, …, b_6) in a fixed search order: b_0, b_1, b_2 run over
    /// vectors of norm −1 in lexicographic order (first coordinate most
    /// significant), b_3 = b_0*b_1 and the rest follow from the triples.
    /// Returns the first frame accepted by `accept`.
    pub fn find_frame(&self, pf: &Field, mut accept: impl FnMut(&PMat) -> bool) -> Option<PMat> {
        let units: Vec<Vec<Fe>> = (0..2187)
            .map(|n| pf.lift_vec(&prime_vec(n)))
            .filter(|v| self.pair(pf, v, v) == pf.from_int(-1))
            .collect();
        let st = |x: &[Fe], y: &[Fe]| self.star(pf, x, y);
        for b0 in &units {
            for b1 in units.iter().filter(|b| self.pair(pf, b0, b).is_zero()) {
                let b3 = st(b0, b1);
                for b2 in &units {
                    if [b0, b1, &b3].iter().any(|b| !self.pair(pf, b2, b).is_zero()) {
                        continue;
                    }
                    let b4 = st(b1, b2);
                    let b5 = st(b2, &b3);
                    let b6 = st(&b3, &b4);
                    let cols = [b0.clone(), b1.clone(), b2.clone(), b3.clone(), b4, b5, b6];
                    let b = linalg::to_pmat(pf, &Mat::from_cols(&cols));
                    if self.is_frame(pf, &b) && accept(&b) {
                        return Some(b);
                    }
                }
            }
        }
        None
    }
}

/// The n-th vector of F_3^7 with coordinate 0 most significant.
pub fn prime_vec(mut n: usize) -> Vec<u8> {
    let mut v = vec![0u8; 7];
    for i in (0..7).rev() {
        v[i] = (n % 3) as u8;
        n /= 3;
    }
    v
}

fn apply_left_inverse<R: FrobRing>(r: &R, li: &LeftInverse<u8>, x: &[R::Elem]) -> Vec<R::Elem> {
    let sel: Vec<R::Elem> = li.rows.iter().map(|&i| x[i].clone()).collect();
    linalg::pmat_vec(r, &li.inv, &sel)
}

fn to_pinv(pf: &Field, li: LeftInverse<Fe>) -> LeftInverse<u8> {
    LeftInverse { rows: li.rows, inv: linalg::to_pmat(pf, &li.inv) }
}

/// Derivations of an [`Algebra`] realized inside Λ²V.
///
/// The basis of W puts the inner derivations W⊥ first (7 vectors) and a
/// complement second, so the last 7 W coordinates are coordinates on V′.
#[derive(Clone, Debug)]
pub struct DerivationSpace {
    pub alg: Algebra,
    /// Sparse operators v ↦ ⟨e_i,v⟩e_j − ⟨e_j,v⟩e_i for each lex pair (i, j).
    iota: Vec<Vec<(usize, usize, u8)>>,
    /// Rows: basis of W in Λ² coordinates.
    pub w_basis: PMat,
    op_inv: LeftInverse<u8>,
    w_inv: LeftInverse<u8>,
}

impl DerivationSpace {
    pub fn new(alg: Algebra) -> Result<Self> {
        let pf = Field::new(3, 1)?;
        let pairs = exterior::pairs(7);
        let g = alg.gram.lift(&pf);
        let iota_dense: Vec<Mat<Fe>> = pairs
            .iter()
            .map(|&(i, j)| {
                Mat::from_fn(7, 7, |a, b| {
                    // row a, column b: coefficient of e_a in the image of e_b
                    let t1 = if a == j { *g.at(i, b) } else { Fe::ZERO };
                    let t2 = if a == i { *g.at(j, b) } else { Fe::ZERO };
                    pf.sub(t1, t2)
                })
            })
            .collect();
        let iota = iota_dense
            .iter()
            .map(|m| {
                let mut v = Vec::new();
                for a in 0..7 {
                    for b in 0..7 {
                        let c = pf.dense(*m.at(a, b)) as u8;
                        if c != 0 {
                            v.push((a, b, c));
                        }
                    }
                }
                v
            })
            .collect();
        let op_mat = Mat::from_cols(&iota_dense.iter().map(|m| m.data.clone()).collect::<Vec<_>>());
        let op_inv = to_pinv(&pf, linalg::left_inverse(&pf, &op_mat).ok_or_else(|| invalid("ι is not injective"))?);

        // *: Λ² → V sends e_i∧e_j to e_i*e_j.
        let unit = |i: usize| {
            let mut v = vec![Fe::ZERO; 7];
            v[i] = Fe::ONE;
            v
        };
        let star_cols: Vec<Vec<Fe>> = pairs.iter().map(|&(i, j)| alg.star(&pf, &unit(i), &unit(j))).collect();
        let w = linalg::kernel(&pf, &Mat::from_cols(&star_cols));
        if w.len() != 14 {
            return Err(invalid(&format!("dim ker(*) = {}, expected 14", w.len())));
        }
        let gr = exterior::lambda2(&pf, &g);
        let w_gr: Vec<Vec<Fe>> = w.iter().map(|x| linalg::mat_vec(&pf, &gr.transpose(), x)).collect();
        let perp = linalg::kernel(&pf, &Mat::from_rows(&w_gr));
        if perp.len() != 7 {
            return Err(invalid(&format!("dim W⊥ = {}, expected 7", perp.len())));
        }
        let echelon = |vs: &[Vec<Fe>]| {
            let mut m = Mat::from_rows(vs);
            let rank = linalg::rref(&pf, &mut m).len();
            m.row_vecs().into_iter().take(rank).collect::<Vec<_>>()
        };
        let mut basis = echelon(&perp);
        for v in echelon(&w) {
            let mut trial = basis.clone();
            trial.push(v);
            if linalg::rank(&pf, &Mat::from_rows(&trial)) > basis.len() {
                basis = trial;
            }
        }
        if basis.len() != 14 {
            return Err(invalid("W⊥ is not contained in W"));
        }
        let w_basis = linalg::to_pmat(&pf, &Mat::from_rows(&basis));
        let w_inv = to_pinv(&pf, linalg::left_inverse(&pf, &Mat::from_rows(&basis).transpose()).unwrap());
        Ok(DerivationSpace { alg, iota, w_basis, op_inv, w_inv })
    }

    /// The operator of a 2-form.
    pub fn op<R: FrobRing>(&self, r: &R, l2: &[R::Elem]) -> Mat<R::Elem> {
        let mut m = Mat::from_fn(7, 7, |_, _| r.zero());
        for (k, terms) in self.iota.iter().enumerate() {
            if r.is_zero(&l2[k]) {
                continue;
            }
            for &(a, b, c) in terms {
                let v = r.add(m.at(a, b), &r.scale_int(&l2[k], c as i64));
                m.set(a, b, v);
            }
        }
        m
    }

    /// The 2-form of an alternating operator.
    pub fn l2_of_op<R: FrobRing>(&self, r: &R, d: &Mat<R::Elem>) -> Vec<R::Elem> {
        apply_left_inverse(r, &self.op_inv, &d.data)
    }

    /// W coordinates of a 2-form in W.
    pub fn w_coords<R: FrobRing>(&self, r: &R, l2: &[R::Elem]) -> Vec<R::Elem> {
        apply_left_inverse(r, &self.w_inv, l2)
    }

    /// Class in V′ of a 2-form in W.
    pub fn quotient<R: FrobRing>(&self, r: &R, l2: &[R::Elem]) -> Vec<R::Elem> {
        self.w_coords(r, l2).split_off(7)
    }

    /// Λ² coordinates from W coordinates.
    pub fn lift<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Vec<R::Elem> {
        linalg::pmat_vec(r, &self.w_basis.transpose(), w)
    }

    /// Λ² representative of the i-th V′ basis vector.
    pub fn rep<R: FrobRing>(&self, r: &R, i: usize) -> Vec<R::Elem> {
        r.lift_vec(self.w_basis.row(7 + i))
    }

    /// Representative derivation of a V′ vector.
    pub fn derivation<R: FrobRing>(&self, r: &R, c: &[R::Elem]) -> Mat<R::Elem> {
        let mut w = vec![r.zero(); 7];
        w.extend_from_slice(c);
        self.op(r, &self.lift(r, &w))
    }

    /// V′ with the bracket [D1, D2] = D2·D1 − D1·D2 and the induced pairing.
    pub fn quotient_algebra(&self) -> Result<Algebra> {
        let pf = Field::new(3, 1)?;
        let reps: Vec<Mat<Fe>> = (0..7).map(|i| self.op(&pf, &self.rep(&pf, i))).collect();
        let mut t = vec![[0u8; 7]; 49];
        for i in 0..7 {
            for j in 0..7 {
                let br = linalg::mat_sub(&pf, &linalg::mat_mul(&pf, &reps[j], &reps[i]), &linalg::mat_mul(&pf, &reps[i], &reps[j]));
                let c = self.quotient(&pf, &self.l2_of_op(&pf, &br));
                for k in 0..7 {
                    t[i * 7 + j][k] = pf.dense(c[k]) as u8;
                }
            }
        }
        let gr = exterior::lambda2(&pf, &self.alg.gram.lift(&pf));
        let gram = Mat::from_fn(7, 7, |i, j| {
            let v = pf.dot(&self.rep(&pf, i), &linalg::mat_vec(&pf, &gr, &self.rep(&pf, j)));
            pf.dense(v) as u8
        });
        Ok(Algebra::from_tensor(&t, gram))
    }

    /// For a linear isomorphism g from this algebra to `target`, the induced
    /// map on quotients d ↦ g·d·g⁻¹.
    pub fn prime_of<R: FrobRing>(&self, r: &R, g: &Mat<R::Elem>, g_inv: &Mat<R::Elem>, target: &DerivationSpace) -> Mat<R::Elem> {
        let cols: Vec<Vec<R::Elem>> = (0..7)
            .map(|i| {
                let d = self.op(r, &self.rep(r, i));
                let conj = linalg::mat_mul(r, &linalg::mat_mul(r, g, &d), g_inv);
                target.quotient(r, &target.l2_of_op(r, &conj))
            })
            .collect();
        Mat::from_cols(&cols)
    }

    /// Whether a 2-form lies in W.
    pub fn contains<R: FrobRing>(&self, r: &R, l2: &[R::Elem]) -> bool {
        let back = self.lift(r, &self.w_coords(r, l2));
        back == l2
    }
}

fn invalid(msg: &str) -> Error {
    Error::InvalidModel(msg.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> Field {
        Field::new(3, 1).unwrap()
    }

    #[test]
    fn quaternion_rule() {
        let pf = f3();
        let alg = Algebra::octonions();
        let e = |i: usize| pf.lift_vec(&PMat::identity_p(7).col(i));
        assert_eq!(alg.star(&pf, &e(0), &e(1)), e(3));
        assert_eq!(alg.star(&pf, &e(1), &e(0)), pf.lift_vec(&[0, 0, 0, 2, 0, 0, 0]));
    }

    #[test]
    fn jacobi_on_basis() {
        let pf = f3();
        let alg = Algebra::octonions();
        let e = |i: usize| pf.lift_vec(&PMat::identity_p(7).col(i));
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    let a = alg.star(&pf, &e(i), &alg.star(&pf, &e(j), &e(k)));
                    let b = alg.star(&pf, &e(j), &alg.star(&pf, &e(k), &e(i)));
                    let c = alg.star(&pf, &e(k), &alg.star(&pf, &e(i), &e(j)));
                    assert!((0..7).all(|t| pf.add(pf.add(a[t], b[t]), c[t]).is_zero()));
                }
            }
        }
    }

    #[test]
    fn derivations_are_w() {
        let pf = f3();
        let alg = Algebra::octonions();
        let ders = alg.derivations(&pf);
        assert_eq!(ders.len(), 14);
        let ds = DerivationSpace::new(alg.clone()).unwrap();
        for d in &ders {
            assert!(ds.contains(&pf, &ds.l2_of_op(&pf, d)));
        }
        // a0∧a1 + a2∧a5 is a derivation
        let mut l2 = vec![Fe::ZERO; 21];
        l2[exterior::pair_index(7, 0, 1)] = Fe::ONE;
        l2[exterior::pair_index(7, 2, 5)] = Fe::ONE;
        assert!(ds.contains(&pf, &l2));
        assert!(alg.is_derivation(&pf, &ds.op(&pf, &l2)));
    }

    #[test]
    fn inner_derivations_are_w_perp() {
        let pf = f3();
        let ds = DerivationSpace::new(Algebra::octonions()).unwrap();
        for i in 0..7 {
            let mut x = vec![Fe::ZERO; 7];
            x[i] = Fe::ONE;
            let w = ds.w_coords(&pf, &ds.l2_of_op(&pf, &ds.alg.ad(&pf, &x)));
            assert!(w[7..].iter().all(|c| c.is_zero()));
        }
    }

    #[test]
    fn standard_frame_is_first_on_v() {
        let pf = f3();
        let alg = Algebra::octonions();
        let b = alg.find_frame(&pf, |_| true).unwrap();
        assert!(alg.is_frame(&pf, &b));
    }

    #[test]
    fn quotient_is_octonionic() {
        let pf = f3();
        let vp = DerivationSpace::new(Algebra::octonions()).unwrap().quotient_algebra().unwrap();
        assert!(vp.find_frame(&pf, |_| true).is_some());
    }

    proptest! {
        #[test]
        fn composition_identity(x in proptest::collection::vec(0u8..3, 7), y in proptest::collection::vec(0u8..3, 7)) {
            let pf = f3();
            let alg = Algebra::octonions();
            let (x, y) = (pf.lift_vec(&x), pf.lift_vec(&y));
            let lhs = alg.star(&pf, &x, &alg.star(&pf, &x, &y));
            let (xx, xy) = (alg.pair(&pf, &x, &x), alg.pair(&pf, &x, &y));
            let rhs: Vec<Fe> = (0..7).map(|i| pf.sub(pf.mul(xx, y[i]), pf.mul(xy, x[i]))).collect();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
