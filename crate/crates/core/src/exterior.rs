//! Exterior squares, wedges into Λ³/Λ⁴, Plücker relations and semilinear maps.
//!
//! Λ²V for dim V = n uses the lex basis `e_i ∧ e_j`, `i < j`.

use crate::gf::{Fe, Field};
use crate::linalg::{self, Mat};
use crate::ring::FrobRing;

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

pub fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push((i, j, k));
            }
        }
    }
    out
}

pub fn quadruples(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for (i, j, k) in triples(n) {
        for l in k + 1..n {
            out.push([i, j, k, l]);
        }
    }
    out
}

/// Index of `e_i ∧ e_j` (`i < j`) in the lex basis.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Coefficient `a_ij` of a 2-form, antisymmetrically extended.
pub fn coeff<R: FrobRing>(r: &R, n: usize, a: &[R::Elem], i: usize, j: usize) -> R::Elem {
    use std::cmp::Ordering::*;
    match i.cmp(&j) {
        Less => a[pair_index(n, i, j)].clone(),
        Greater => r.neg(&a[pair_index(n, j, i)]),
        Equal => r.zero(),
    }
}

pub fn wedge<R: FrobRing>(r: &R, u: &[R::Elem], v: &[R::Elem]) -> Vec<R::Elem> {
    let n = u.len();
    pairs(n)
        .into_iter()
        .map(|(i, j)| r.sub(&r.mul(&u[i], &v[j]), &r.mul(&u[j], &v[i])))
        .collect()
}

/// `v ∧ a` in Λ³ (lex basis of triples).
pub fn wedge3<R: FrobRing>(r: &R, v: &[R::Elem], a: &[R::Elem]) -> Vec<R::Elem> {
    let n = v.len();
    triples(n)
        .into_iter()
        .map(|(i, j, k)| {
            let t1 = r.mul(&v[i], &a[pair_index(n, j, k)]);
            let t2 = r.mul(&v[j], &a[pair_index(n, i, k)]);
            let t3 = r.mul(&v[k], &a[pair_index(n, i, j)]);
            r.add(&r.sub(&t1, &t2), &t3)
        })
        .collect()
}

/// `a ∧ b` in Λ⁴ (lex basis of quadruples).
pub fn wedge22<R: FrobRing>(r: &R, n: usize, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    quadruples(n)
        .into_iter()
        .map(|[i, j, k, l]| {
            let p = |x: usize, y: usize| pair_index(n, x, y);
            // Shuffles of (ij|kl): signs of (i j k l), (i k j l), (i l j k), and the reverses.
            let terms = [
                (p(i, j), p(k, l), false),
                (p(i, k), p(j, l), true),
                (p(i, l), p(j, k), false),
                (p(j, k), p(i, l), false),
                (p(j, l), p(i, k), true),
                (p(k, l), p(i, j), false),
            ];
            let mut acc = r.zero();
            for (x, y, neg) in terms {
                let t = r.mul(&a[x], &b[y]);
                acc = if neg { r.sub(&acc, &t) } else { r.add(&acc, &t) };
            }
            acc
        })
        .collect()
}

/// Three-term Plücker quadrics `p_ij p_kl − p_ik p_jl + p_il p_jk`.
pub fn plucker<R: FrobRing>(r: &R, n: usize, a: &[R::Elem]) -> Vec<R::Elem> {
    quadruples(n)
        .into_iter()
        .map(|[i, j, k, l]| {
            let p = |x: usize, y: usize| &a[pair_index(n, x, y)];
            let t1 = r.mul(p(i, j), p(k, l));
            let t2 = r.mul(p(i, k), p(j, l));
            let t3 = r.mul(p(i, l), p(j, k));
            r.add(&r.sub(&t1, &t2), &t3)
        })
        .collect()
}

/// Induced map on Λ² in the lex basis.
pub fn lambda2<R: FrobRing>(r: &R, g: &Mat<R::Elem>) -> Mat<R::Elem> {
    let n = g.cols;
    let cols: Vec<Vec<R::Elem>> = pairs(n)
        .into_iter()
        .map(|(k, l)| wedge(r, &g.col(k), &g.col(l)))
        .collect();
    Mat::from_cols(&cols)
}

/// Interior product `i_v(a) = Σ a_ij (⟨v,e_i⟩ e_j − ⟨v,e_j⟩ e_i)` for the
/// bilinear form with Gram matrix `gram`.
pub fn contract<R: FrobRing>(r: &R, gram: &Mat<R::Elem>, v: &[R::Elem], a: &[R::Elem]) -> Vec<R::Elem> {
    let n = v.len();
    let gv: Vec<R::Elem> = (0..n).map(|i| r.dot(&v.to_vec(), &gram.col(i))).collect();
    let mut out = vec![r.zero(); n];
    for (idx, (i, j)) in pairs(n).into_iter().enumerate() {
        if r.is_zero(&a[idx]) {
            continue;
        }
        out[j] = r.add(&out[j], &r.mul(&a[idx], &gv[i]));
        out[i] = r.sub(&out[i], &r.mul(&a[idx], &gv[j]));
    }
    out
}

/// Map `x ↦ A·φ^s(x)` where φ is the p-power Frobenius.
#[derive(Clone, Debug, PartialEq)]
pub struct SemilinearMap {
    pub mat: Mat<Fe>,
    pub s: i64,
}

impl SemilinearMap {
    pub fn new(mat: Mat<Fe>, s: i64) -> Self {
        SemilinearMap { mat, s }
    }

    pub fn apply(&self, f: &Field, x: &[Fe]) -> Vec<Fe> {
        let fx: Vec<Fe> = x.iter().map(|&c| f.frob(c, self.s)).collect();
        linalg::mat_vec(f, &self.mat, &fx)
    }

    /// `self ∘ other`.
    pub fn compose(&self, f: &Field, other: &SemilinearMap) -> SemilinearMap {
        let b = other.mat.map(|&c| f.frob(c, self.s));
        SemilinearMap { mat: linalg::mat_mul(f, &self.mat, &b), s: self.s + other.s }
    }

    pub fn inverse(&self, f: &Field) -> Option<SemilinearMap> {
        let inv = linalg::inverse(f, &self.mat)?;
        Some(SemilinearMap { mat: inv.map(|&c| f.frob(c, -self.s)), s: -self.s })
    }
}

/// GF(p)-basis of the solutions `x ∈ K^n` of `Σ_t M_t(x) = 0` for each
/// condition (a list of semilinear terms). Solutions are GF(p)-linear, so the
/// returned vectors span the solution set over the prime field only.
pub fn linearize(f: &Field, n: usize, conditions: &[Vec<SemilinearMap>]) -> Vec<Vec<Fe>> {
    let prime = Field::new(f.p(), 1).expect("prime field");
    let k = f.degree() as usize;
    let mut basis_in = Vec::new();
    for l in 0..n {
        for i in 0..k {
            let mut v = vec![Fe::ZERO; n];
            v[l] = f.basis_elem(i as u32);
            basis_in.push(v);
        }
    }
    let mut cols: Vec<Vec<Fe>> = Vec::new();
    for v in &basis_in {
        let mut col = Vec::new();
        for cond in conditions {
            let mut acc: Option<Vec<Fe>> = None;
            for term in cond {
                let y = term.apply(f, v);
                acc = Some(match acc {
                    None => y,
                    Some(a) => a.iter().zip(&y).map(|(&s, &t)| f.add(s, t)).collect(),
                });
            }
            for c in acc.unwrap_or_default() {
                col.extend(f.coeffs(c).into_iter().map(|d| prime.from_int(d as i64)));
            }
        }
        cols.push(col);
    }
    if cols[0].is_empty() {
        return basis_in;
    }
    let m = Mat::from_cols(&cols);
    linalg::kernel(&prime, &m)
        .into_iter()
        .map(|kv| {
            let mut x = vec![Fe::ZERO; n];
            for (c, v) in kv.iter().zip(&basis_in) {
                if !c.is_zero() {
                    for (xi, vi) in x.iter_mut().zip(v) {
                        *xi = f.add(*xi, FrobRing::scale_int(f, vi, prime.dense(*c) as i64));
                    }
                }
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pair_indexing() {
        for n in 2..8 {
            for (idx, (i, j)) in pairs(n).into_iter().enumerate() {
                assert_eq!(pair_index(n, i, j), idx);
            }
        }
    }

    #[test]
    fn linearize_examples() {
        let f = Field::new(2, 2).unwrap();
        let id = Mat::from_rows(&[vec![Fe::ONE]]);
        let sq = SemilinearMap::new(id.clone(), 1);
        let x = SemilinearMap::new(id.clone(), 0);
        // x^2 = x: GF(2) inside GF(4), one basis vector.
        let sol = linearize(&f, 1, &[vec![sq, x.clone()]]);
        assert_eq!(sol.len(), 1);
        // x - x = 0: the whole space, dimension 2 over GF(2).
        let minus = SemilinearMap::new(Mat::from_rows(&[vec![f.neg(Fe::ONE)]]), 0);
        assert_eq!(linearize(&f, 1, &[vec![x, minus]]).len(), 2);
    }

    fn vec_of(f: &Field, seed: &[usize], n: usize) -> Vec<Fe> {
        (0..n).map(|i| f.from_dense(seed[i] % f.order() as usize)).collect()
    }

    proptest! {
        #[test]
        fn decomposables_satisfy_plucker(a in proptest::collection::vec(0usize..9, 7), b in proptest::collection::vec(0usize..9, 7)) {
            let f = Field::new(3, 2).unwrap();
            let (u, v) = (vec_of(&f, &a, 7), vec_of(&f, &b, 7));
            let w = wedge(&f, &u, &v);
            prop_assert!(plucker(&f, 7, &w).iter().all(|x| x.is_zero()));
            prop_assert!(wedge3(&f, &u, &w).iter().all(|x| x.is_zero()));
            prop_assert!(wedge22(&f, 7, &w, &w).iter().all(|x| x.is_zero()));
        }

        #[test]
        fn lambda2_is_functorial(a in proptest::collection::vec(0usize..16, 16), u in proptest::collection::vec(0usize..16, 4), v in proptest::collection::vec(0usize..16, 4)) {
            let f = Field::new(2, 4).unwrap();
            let g = Mat::from_fn(4, 4, |i, j| f.from_dense(a[i * 4 + j]));
            let (x, y) = (vec_of(&f, &u, 4), vec_of(&f, &v, 4));
            let lhs = linalg::mat_vec(&f, &lambda2(&f, &g), &wedge(&f, &x, &y));
            let rhs = wedge(&f, &linalg::mat_vec(&f, &g, &x), &linalg::mat_vec(&f, &g, &y));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn semilinear_composition(a in proptest::collection::vec(1usize..27, 9), b in proptest::collection::vec(1usize..27, 9), x in proptest::collection::vec(0usize..27, 3), s in 0i64..3, t in 0i64..3) {
            let f = Field::new(3, 3).unwrap();
            let ma = SemilinearMap::new(Mat::from_fn(3, 3, |i, j| f.from_dense(a[i * 3 + j])), s);
            let mb = SemilinearMap::new(Mat::from_fn(3, 3, |i, j| f.from_dense(b[i * 3 + j])), t);
            let xv = vec_of(&f, &x, 3);
            prop_assert_eq!(ma.compose(&f, &mb).apply(&f, &xv), ma.apply(&f, &mb.apply(&f, &xv)));
            if let Some(inv) = ma.inverse(&f) {
                prop_assert_eq!(inv.apply(&f, &ma.apply(&f, &xv)), xv);
            }
        }
    }
}
