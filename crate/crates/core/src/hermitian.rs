//! The ²A₂ model: Fermat curves of degree q0+1 in P(Λ²V), dim V = 3.
//!
//! Points are 2-forms in the lex basis (e01, e02, e12). V′ = Λ²V is
//! identified with the dual of V through the volume form, with basis
//! (e12, −e02, e01), the dual basis of (e0, e1, e2).

use crate::error::{Error, Result};
use crate::exterior;
use crate::gf::{Fe, Field};
use crate::linalg::{self, Mat, PMat};
use crate::model::{CurveModel, Params, RelationTerms};
use crate::ring::FrobRing;
use rand::Rng;

pub struct HermitianModel {
    params: Params,
    /// Matrix of F: V′ → V in the bases above; F(x) = A·φ^m(x).
    a: PMat,
    pf: Field,
}

/// Lex coordinates of a 2-form to V′ coordinates.
pub fn to_vprime<R: FrobRing>(r: &R, w: &[R::Elem]) -> Vec<R::Elem> {
    vec![w[2].clone(), r.neg(&w[1]), w[0].clone()]
}

/// The pairing V × Λ²V → F, `v ∧ ω / Ω`.
pub fn volume_pair<R: FrobRing>(r: &R, v: &[R::Elem], w: &[R::Elem]) -> R::Elem {
    exterior::wedge3(r, v, w).swap_remove(0)
}

/// The induced map g′ on V′ = Λ²V in the V′ basis.
pub fn prime_of<R: FrobRing>(r: &R, g: &Mat<R::Elem>) -> Mat<R::Elem> {
    let l2 = exterior::lambda2(r, g);
    // Basis change lex -> V′ is an involution: (x0, x1, x2) -> (x2, -x1, x0).
    let t = |i: usize, j: usize| -> i64 {
        match (i, j) {
            (0, 2) | (2, 0) => 1,
            (1, 1) => -1,
            _ => 0,
        }
    };
    Mat::from_fn(3, 3, |i, j| {
        let mut acc = r.zero();
        for k in 0..3 {
            for l in 0..3 {
                let c = t(i, k) * t(l, j);
                if c != 0 {
                    acc = r.add(&acc, &r.scale_int(l2.at(k, l), c));
                }
            }
        }
        acc
    })
}

impl HermitianModel {
    /// Default model: F sends the V′ basis to (e0, e1, e2).
    pub fn new(p: u32, m: u32) -> Result<Self> {
        Self::with_f(p, m, PMat::identity_p(3))
    }

    pub fn with_f(p: u32, m: u32, a: PMat) -> Result<Self> {
        if p != 2 && p != 3 {
            return Err(Error::Unsupported(format!("su3 needs p in {{2, 3}}, got {p}")));
        }
        let pf = Field::new(p, 1)?;
        let am = a.lift(&pf);
        let det = linalg::det(&pf, &am);
        if det != Fe::ONE {
            return Err(Error::InvalidModel(format!(
                "F does not respect the volume forms: F(b1)∧F(b2)∧F(b3) = {}·Ω",
                pf.dense(det)
            )));
        }
        let model = HermitianModel { params: Params::su3(p, m), a, pf };
        if !model.frobenius_matrix().is_identity() {
            return Err(Error::InvalidModel(
                "F does not make FR the coordinatewise q-power map".into(),
            ));
        }
        Ok(model)
    }

    /// Model with F given by a random symmetric unimodular `h·hᵀ`.
    pub fn random_conjugate<G: Rng>(p: u32, m: u32, rng: &mut G) -> Result<Self> {
        let pf = Field::new(p, 1)?;
        let h = random_sl(&pf, 3, rng);
        let a = linalg::mat_mul(&pf, &h, &h.transpose());
        Self::with_f(p, m, linalg::to_pmat(&pf, &a))
    }

    pub fn f_matrix(&self) -> &PMat {
        &self.a
    }

    /// Matrix M with FR(x) = M·φ^{2m}(x); ρ is the identity V → V″ here.
    pub fn frobenius_matrix(&self) -> PMat {
        let pf = &self.pf;
        let am = self.a.lift(pf);
        let ap = prime_of(pf, &am);
        linalg::to_pmat(pf, &linalg::mat_mul(pf, &am, &ap))
    }

    /// σ(g) = A·φ^m(g′)·A⁻¹ for g ∈ SL(V).
    pub fn sigma(&self, f: &Field, g: &Mat<Fe>) -> Result<Mat<Fe>> {
        if linalg::det(f, g) != Fe::ONE {
            return Err(Error::InvalidModel("σ is defined on unimodular matrices only".into()));
        }
        let gp = linalg::mat_frob(f, &prime_of(f, g), self.params.m);
        let a = self.a.lift(f);
        let ainv = linalg::inverse(f, &a).expect("F is invertible");
        Ok(linalg::mat_mul(f, &linalg::mat_mul(f, &a, &gp), &ainv))
    }

    /// FE(g) = FR∘g∘FR⁻¹.
    pub fn fe(&self, f: &Field, g: &Mat<Fe>) -> Mat<Fe> {
        linalg::mat_frob(f, g, self.params.s)
    }

    /// P1 evaluated with an explicit auxiliary vector `u ∉ M`.
    pub fn p1_with<R: FrobRing>(&self, r: &R, w: &[R::Elem], u: &[R::Elem]) -> Option<R::Elem> {
        let den = volume_pair(r, u, w);
        let x = self.f_map(r, w);
        let num = volume_pair(r, &self.f_map(r, &exterior::wedge(r, &x, u)), w);
        let den_pow = r.zpow(&den, -(self.params.q0 as i64))?;
        Some(r.mul(&num, &den_pow))
    }
}

pub fn random_sl<G: Rng>(pf: &Field, n: usize, rng: &mut G) -> Mat<Fe> {
    loop {
        let mut g = Mat::from_fn(n, n, |_, _| pf.random(rng));
        let d = linalg::det(pf, &g);
        if let Some(di) = pf.inv(d) {
            for i in 0..n {
                let v = pf.mul(*g.at(i, 0), di);
                g.set(i, 0, v);
            }
            return g;
        }
    }
}

impl CurveModel for HermitianModel {
    fn params(&self) -> &Params {
        &self.params
    }
    fn dim(&self) -> usize {
        3
    }
    fn v_dim(&self) -> usize {
        3
    }
    fn basis_names(&self) -> Vec<String> {
        ["e0^e1", "e0^e2", "e1^e2"].iter().map(|s| s.to_string()).collect()
    }

    fn f_map<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Vec<R::Elem> {
        let b = r.frob_vec(&to_vprime(r, w), self.params.m);
        linalg::pmat_vec(r, &self.a, &b)
    }

    fn equations<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Vec<R::Elem> {
        vec![volume_pair(r, &self.f_map(r, w), w)]
    }

    /// ⟨ω, F(FR^k ω)⟩; k = 1, 2, 3 give F₃, F₅, F₇.
    fn pairing_poly<R: FrobRing>(&self, r: &R, w: &[R::Elem], k: u32) -> R::Elem {
        let fr = r.frob_vec(w, self.params.s * k);
        volume_pair(r, &self.f_map(r, &fr), w)
    }

    fn pairing_degree(&self, k: u32) -> u64 {
        1 + self.params.q0 * self.params.q.pow(k)
    }

    fn p1<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Result<R::Elem> {
        for i in 0..3 {
            let mut u = vec![r.zero(); 3];
            u[i] = r.one();
            if r.is_unit(&volume_pair(r, &u, w)) {
                return self.p1_with(r, w, &u).ok_or(Error::NonUnit);
            }
        }
        Err(Error::NotOnCurve)
    }

    fn relation<R: FrobRing>(&self, r: &R, w: &[R::Elem], cleared: bool) -> Result<RelationTerms<R::Elem>> {
        let (q0, q) = (self.params.q0, self.params.q);
        let e = q - q0 + 1;
        let big_e = q0.pow(3) * (q - 1);
        let f3 = self.pairing_poly(r, w, 1);
        let f5 = self.pairing_poly(r, w, 2);
        let f7 = self.pairing_poly(r, w, 3);
        let p1e = r.pow(&self.p1(r, w)?, big_e);
        if cleared {
            let base = r.sub(&r.mul(&f7, &r.pow(&f3, q0 - 1 + e)), &r.pow(&f5, e + q0));
            let kappa_term = r.mul(&p1e, &r.mul(&r.pow(&f5, q0), &r.pow(&f3, e)));
            return Ok(RelationTerms { base, kappa_term });
        }
        let p3 = r.div(&f5, &f3).ok_or(Error::NonUnit)?;
        let p4 = r.div(&f7, &r.mul(&f3, &r.pow(&p3, q0))).ok_or(Error::NonUnit)?;
        Ok(RelationTerms { base: r.sub(&p4, &r.pow(&p3, e)), kappa_term: p1e })
    }

    fn relation_degree(&self) -> u64 {
        let (q0, q) = (self.params.q0, self.params.q);
        self.pairing_degree(3) + (q0 - 1 + q - q0 + 1) * self.pairing_degree(1)
    }

    fn vscan_plane(&self, f: &Field, x: &[Fe]) -> Option<[Vec<Fe>; 2]> {
        let cands: Vec<Vec<Fe>> = (0..3)
            .map(|i| {
                let mut e = vec![Fe::ZERO; 3];
                e[i] = Fe::ONE;
                exterior::wedge(f, x, &e)
            })
            .collect();
        independent_pair(f, &cands)
    }
}

/// First two linearly independent vectors of a list.
pub fn independent_pair(f: &Field, cands: &[Vec<Fe>]) -> Option<[Vec<Fe>; 2]> {
    let first = cands.iter().find(|v| v.iter().any(|x| !x.is_zero()))?;
    let second = cands.iter().find(|v| {
        linalg::rank(f, &Mat::from_rows(&[first.clone(), v.to_vec()])) == 2
    })?;
    Some([first.clone(), second.clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn membership_examples() {
        let f = Field::new(2, 2).unwrap();
        let m = HermitianModel::new(2, 1).unwrap();
        assert!(m.is_member(&f, &[Fe::ZERO, Fe::ONE, Fe::ONE]));
        assert!(!m.is_member(&f, &[Fe::ONE, Fe::ZERO, Fe::ZERO]));
    }

    #[test]
    fn membership_is_fermat() {
        let f = Field::new(3, 2).unwrap();
        let m = HermitianModel::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let w: Vec<Fe> = (0..3).map(|_| f.random(&mut rng)).collect();
            let fermat = w.iter().fold(Fe::ZERO, |acc, &x| f.add(acc, f.pow(x, 4)));
            assert_eq!(m.equations(&f, &w)[0], fermat);
        }
    }

    #[test]
    fn sigma_of_identity() {
        let f = Field::new(2, 4).unwrap();
        let m = HermitianModel::new(2, 1).unwrap();
        let id = linalg::identity(&f, 3);
        assert_eq!(m.sigma(&f, &id).unwrap(), id);
    }

    #[test]
    fn rejects_non_volume_preserving_f() {
        let mut a = PMat::identity_p(3);
        a.set(0, 0, 2);
        let err = HermitianModel::with_f(3, 1, a).err().unwrap();
        assert!(err.to_string().contains("volume"));
    }

    #[test]
    fn sigma_is_unitary_adjoint() {
        // σ(g)·φ^m(g)ᵀ = 1 for the default F.
        let f = Field::new(3, 8).unwrap();
        let m = HermitianModel::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_sl(&f, 3, &mut rng);
            let sg = m.sigma(&f, &g).unwrap();
            let gt = linalg::mat_frob(&f, &g, 1).transpose();
            assert_eq!(linalg::mat_mul(&f, &sg, &gt), linalg::identity(&f, 3));
        }
    }
}
