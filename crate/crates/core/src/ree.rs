//! The ²G₂ model in characteristic 3: V the imaginary octonions, the curve
//! in P(W) = P¹³ where W ⊂ Λ²V is the derivation space.
//!
//! W coordinates: the first 7 refer to the inner derivations W⊥, the last 7
//! are coordinates on V′ = W/W⊥ (see [`DerivationSpace`]).

use crate::error::{Error, Result};
use crate::exterior;
use crate::gf::{Fe, Field};
use crate::hermitian::independent_pair;
use crate::linalg::{self, Mat, PMat};
use crate::model::{CurveModel, Params, RelationTerms};
use crate::octonion::{prime_vec, Algebra, DerivationSpace};
use crate::ring::FrobRing;
use rand::Rng;
use std::sync::OnceLock;

/// Parameter-independent data: V, V′, V″, ρ_V and the frame-derived F.
#[derive(Debug)]
pub struct G2Structure {
    pub v: DerivationSpace,
    pub vp: DerivationSpace,
    /// V″ as an algebra, for the Lie-map property of ρ.
    pub vpp: Algebra,
    /// ρ_V(x) = R·φ(x) in V″ coordinates.
    pub rho: PMat,
    /// F: V′ → V on coordinates (before the Frobenius twist).
    pub f: PMat,
    /// The frame of V′ the search started from.
    pub frame: PMat,
}

static STRUCTURE: OnceLock<G2Structure> = OnceLock::new();

impl G2Structure {
    pub fn get() -> &'static G2Structure {
        STRUCTURE.get_or_init(|| G2Structure::build().expect("octonion structure"))
    }

    fn build() -> Result<G2Structure> {
        let pf = Field::new(3, 1)?;
        let v = DerivationSpace::new(Algebra::octonions())?;
        let vp = DerivationSpace::new(v.quotient_algebra()?)?;
        let vpp = vp.quotient_algebra()?;
        let rho = rho_matrix(&pf, &v, &vp)?;
        let mut frame = None;
        let mut f = None;
        vp.alg.find_frame(&pf, |b| {
            // Start from the frame map b_i ↦ a_i, then twist by M until the
            // induced Frobenius is the coordinate one.
            let Some(mut a) = linalg::inverse(&pf, &b.lift(&pf)) else { return false };
            for _ in 0..64 {
                let m = frobenius_matrix(&pf, &v, &vp, &a, &rho);
                if m == linalg::identity(&pf, 7) {
                    frame = Some(b.clone());
                    f = Some(linalg::to_pmat(&pf, &a));
                    return true;
                }
                a = linalg::mat_mul(&pf, &m, &a);
            }
            false
        });
        let (Some(frame), Some(f)) = (frame, f) else {
            return Err(Error::InvalidModel("no frame of V′ gives the coordinate Frobenius".into()));
        };
        Ok(G2Structure { v, vp, vpp, rho, f, frame })
    }

    /// ρ(x) on V′ for isotropic x: d ↦ ad(x)·ad(d(x))·ad(x), as a matrix
    /// on V′ coordinates.
    pub fn rho_operator<R: FrobRing>(&self, r: &R, x: &[R::Elem]) -> Mat<R::Elem> {
        rho_operator(r, &self.v, x)
    }

    /// ρ(x) ∈ V″ for isotropic x by the closed formula.
    pub fn rho_exact<R: FrobRing>(&self, r: &R, x: &[R::Elem]) -> Vec<R::Elem> {
        let op = self.rho_operator(r, x);
        self.vp.quotient(r, &self.vp.l2_of_op(r, &op))
    }

    /// ρ(x) for any x via the semilinear extension.
    pub fn rho<R: FrobRing>(&self, r: &R, x: &[R::Elem]) -> Vec<R::Elem> {
        linalg::pmat_vec(r, &self.rho, &r.frob_vec(x, 1))
    }
}

fn rho_operator<R: FrobRing>(r: &R, v: &DerivationSpace, x: &[R::Elem]) -> Mat<R::Elem> {
    let adx = v.alg.ad(r, x);
    let cols: Vec<Vec<R::Elem>> = (0..7)
        .map(|i| {
            let d = v.op(r, &v.rep(r, i));
            let dx = linalg::mat_vec(r, &d, x);
            let op = linalg::mat_mul(r, &linalg::mat_mul(r, &adx, &v.alg.ad(r, &dx)), &adx);
            v.quotient(r, &v.l2_of_op(r, &op))
        })
        .collect();
    Mat::from_cols(&cols)
}

/// ρ on the first 7 independent isotropic vectors of F_3^7, extended
/// linearly (over F_3 the twist is trivial).
fn rho_matrix(pf: &Field, v: &DerivationSpace, vp: &DerivationSpace) -> Result<PMat> {
    let mut basis: Vec<Vec<Fe>> = Vec::new();
    for n in 1..2187 {
        let x = pf.lift_vec(&prime_vec(n));
        if !v.alg.pair(pf, &x, &x).is_zero() {
            continue;
        }
        let mut trial = basis.clone();
        trial.push(x);
        if linalg::rank(pf, &Mat::from_rows(&trial)) > basis.len() {
            basis = trial;
        }
        if basis.len() == 7 {
            break;
        }
    }
    let u = Mat::from_cols(&basis);
    let images: Vec<Vec<Fe>> = basis
        .iter()
        .map(|x| vp.quotient(pf, &vp.l2_of_op(pf, &rho_operator(pf, v, x))))
        .collect();
    let uinv = linalg::inverse(pf, &u).ok_or_else(|| Error::InvalidModel("isotropic vectors do not span".into()))?;
    Ok(linalg::to_pmat(pf, &linalg::mat_mul(pf, &Mat::from_cols(&images), &uinv)))
}

/// M with FR = M·φ^{2m+1} for F = `a`: M = A·A″·R.
fn frobenius_matrix(pf: &Field, v: &DerivationSpace, vp: &DerivationSpace, a: &Mat<Fe>, rho: &PMat) -> Mat<Fe> {
    let ainv = linalg::inverse(pf, a).expect("F invertible");
    let app = vp.prime_of(pf, a, &ainv, v);
    linalg::mat_mul(pf, &linalg::mat_mul(pf, a, &app), &rho.lift(pf))
}

pub struct ReeModel {
    params: Params,
    g2: &'static G2Structure,
}

/// Witness for a curve point ω = x∧y with x = F(ω) and ker ad(x) = ⟨x,y,z⟩.
#[derive(Clone, Debug)]
pub struct Witness<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub z: Vec<T>,
}

fn first_unit<R: FrobRing>(r: &R, v: &[R::Elem]) -> Option<usize> {
    v.iter().position(|x| r.is_unit(x))
}

fn unit_vec<R: FrobRing>(r: &R, i: usize) -> Vec<R::Elem> {
    let mut e = vec![r.zero(); 7];
    e[i] = r.one();
    e
}

impl ReeModel {
    pub fn new(m: u32) -> Result<Self> {
        Ok(ReeModel { params: Params::ree(m), g2: G2Structure::get() })
    }

    pub fn structure(&self) -> &'static G2Structure {
        self.g2
    }

    pub fn algebra(&self) -> &Algebra {
        &self.g2.v.alg
    }

    /// The V′ class of ω.
    pub fn class<'a, T>(&self, w: &'a [T]) -> &'a [T] {
        &w[7..]
    }

    pub fn frobenius_matrix(&self) -> PMat {
        let pf = Field::new(3, 1).unwrap();
        let g = self.g2;
        linalg::to_pmat(&pf, &frobenius_matrix(&pf, &g.v, &g.vp, &g.f.lift(&pf), &g.rho))
    }

    /// σ(g) = F∘φ^m(g′)∘F⁻¹ for an automorphism g of V.
    pub fn sigma(&self, f: &Field, g: &Mat<Fe>) -> Result<Mat<Fe>> {
        let v = &self.g2.v;
        let ginv = linalg::inverse(f, g).ok_or(Error::NonUnit)?;
        let gp = linalg::mat_frob(f, &v.prime_of(f, g, &ginv, v), self.params.m);
        let a = self.g2.f.lift(f);
        let ainv = linalg::inverse(f, &a).unwrap();
        Ok(linalg::mat_mul(f, &linalg::mat_mul(f, &a, &gp), &ainv))
    }

    pub fn fe(&self, f: &Field, g: &Mat<Fe>) -> Mat<Fe> {
        linalg::mat_frob(f, g, self.params.s)
    }

    /// Random automorphism: a product of e_x for isotropic x.
    pub fn random_automorphism<G: Rng>(&self, f: &Field, rng: &mut G, factors: usize) -> Mat<Fe> {
        let alg = self.algebra();
        let mut g = linalg::identity(f, 7);
        for _ in 0..factors {
            let x = random_isotropic(f, alg, rng);
            g = linalg::mat_mul(f, &alg.exp_auto(f, &x), &g);
        }
        g
    }

    pub fn witness<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Result<Witness<R::Elem>> {
        let alg = self.algebra();
        let l = self.g2.v.lift(r, w);
        let x = self.f_map(r, w);
        let j = first_unit(r, &x).ok_or(Error::NotOnCurve)?;
        let xj_inv = r.unit_inv(&x[j]).unwrap();
        let y: Vec<R::Elem> = (0..7)
            .map(|k| if k == j { r.zero() } else { r.mul(&exterior::coeff(r, 7, &l, j, k), &xj_inv) })
            .collect();
        let wc = self.class(w);
        for b in 0..7 {
            let pb = alg.pair(r, &unit_vec(r, b), &x);
            let Some(pb_inv) = r.unit_inv(&pb) else { continue };
            for a in 0..7 {
                if a == b {
                    continue;
                }
                let ea = unit_vec(r, a);
                let t = r.mul(&alg.pair(r, &ea, &x), &pb_inv);
                let u: Vec<R::Elem> = (0..7)
                    .map(|i| if i == b { r.sub(&ea[i], &t) } else { ea[i].clone() })
                    .collect();
                let z = alg.star(r, &x, &u);
                let xz = self.g2.v.quotient(r, &exterior::wedge(r, &x, &z));
                let den = self.g2.vp.quotient(r, &exterior::wedge(r, wc, &xz));
                if first_unit(r, &den).is_some() {
                    return Ok(Witness { x, y, z });
                }
            }
        }
        Err(Error::NotOnCurve)
    }

    /// [ω∧(x∧z)] in V″.
    pub fn flag_vector<R: FrobRing>(&self, r: &R, w: &[R::Elem], wit: &Witness<R::Elem>) -> Vec<R::Elem> {
        let xz = self.g2.v.quotient(r, &exterior::wedge(r, &wit.x, &wit.z));
        self.g2.vp.quotient(r, &exterior::wedge(r, self.class(w), &xz))
    }

    /// The F_q-point polynomial with an explicit witness.
    pub fn p1_with<R: FrobRing>(&self, r: &R, w: &[R::Elem], wit: &Witness<R::Elem>) -> Result<R::Elem> {
        let g = self.g2;
        let wc = self.class(w);
        let den = self.flag_vector(r, w, wit);
        let i = first_unit(r, &den).ok_or(Error::NonUnit)?;
        let xz = g.v.quotient(r, &exterior::wedge(r, &wit.x, &wit.z));
        let fxz = linalg::pmat_vec(r, &g.f, &r.frob_vec(&xz, self.params.m));
        let n = g.v.quotient(r, &exterior::wedge(r, &wit.x, &fxz));
        let num = g.vp.quotient(r, &exterior::wedge(r, &n, wc));
        let rho = g.rho(r, &wit.x);
        let a = r.div(&num[i], &den[i]).ok_or(Error::NonUnit)?;
        let b = r.div(&rho[i], &den[i]).ok_or(Error::NonUnit)?;
        Ok(r.mul(&a, &r.pow(&b, self.params.q0 - 1)))
    }

    pub fn qminus(&self) -> u64 {
        self.params.q - 3 * self.params.q0 + 1
    }

    pub fn qplus(&self) -> u64 {
        self.params.q + 3 * self.params.q0 + 1
    }
}

/// Random nonzero isotropic vector: pick six coordinates, solve for the
/// last from x_6² = −Σ x_i² (pairing −I), retrying when no root exists.
pub fn random_isotropic<G: Rng>(f: &Field, alg: &Algebra, rng: &mut G) -> Vec<Fe> {
    loop {
        let mut x: Vec<Fe> = (0..7).map(|_| f.random(rng)).collect();
        x[6] = Fe::ZERO;
        let s = alg.pair(f, &x, &x);
        // ⟨x,x⟩ = −Σx_i², so the last coordinate needs x_6² = −Σ_{i<6} x_i² = s.
        if let Some(t) = f.sqrt(s) {
            x[6] = t;
            if x.iter().any(|c| !c.is_zero()) && alg.pair(f, &x, &x).is_zero() {
                return x;
            }
        }
    }
}

impl CurveModel for ReeModel {
    fn params(&self) -> &Params {
        &self.params
    }
    fn dim(&self) -> usize {
        14
    }
    fn v_dim(&self) -> usize {
        7
    }
    fn basis_names(&self) -> Vec<String> {
        (0..7).map(|i| format!("i{i}")).chain((0..7).map(|i| format!("c{i}"))).collect()
    }

    fn f_map<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Vec<R::Elem> {
        linalg::pmat_vec(r, &self.g2.f, &r.frob_vec(self.class(w), self.params.m))
    }

    fn equations<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Vec<R::Elem> {
        let l = self.g2.v.lift(r, w);
        let c = self.class(w);
        let mut eqs = exterior::plucker(r, 7, &l);
        eqs.push(self.g2.vp.alg.pair(r, c, c));
        eqs.extend(exterior::wedge3(r, &self.f_map(r, w), &l));
        eqs
    }

    fn pairing_poly<R: FrobRing>(&self, r: &R, w: &[R::Elem], k: u32) -> R::Elem {
        let c = self.class(w);
        self.g2.vp.alg.pair(r, c, &r.frob_vec(c, self.params.s * k))
    }

    fn pairing_degree(&self, k: u32) -> u64 {
        1 + self.params.q.pow(k)
    }

    fn p1<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Result<R::Elem> {
        let wit = self.witness(r, w)?;
        self.p1_with(r, w, &wit)
    }

    fn relation<R: FrobRing>(&self, r: &R, w: &[R::Elem], cleared: bool) -> Result<RelationTerms<R::Elem>> {
        let (q0, q) = (self.params.q0, self.params.q);
        let qm = self.qminus();
        let p1e = r.pow(&self.p1(r, w)?, q * q * q * (q - 1));
        let f3 = self.pairing_poly(r, w, 3);
        let f4 = self.pairing_poly(r, w, 4);
        let f5 = self.pairing_poly(r, w, 5);
        if cleared {
            let base = r.sub(&r.pow(&f4, qm + 3 * q0), &r.mul(&f5, &r.pow(&f3, 3 * q0 - 1 + qm)));
            let kappa_term = r.mul(&p1e, &r.mul(&r.pow(&f3, qm), &r.pow(&f4, 3 * q0)));
            return Ok(RelationTerms { base, kappa_term });
        }
        let p6 = r.div(&f4, &f3).ok_or(Error::NonUnit)?;
        let p7 = r.div(&f5, &r.mul(&f3, &r.pow(&p6, 3 * q0))).ok_or(Error::NonUnit)?;
        Ok(RelationTerms { base: r.sub(&r.pow(&p6, qm), &p7), kappa_term: p1e })
    }

    fn relation_degree(&self) -> u64 {
        (self.qminus() + 3 * self.params.q0) * self.pairing_degree(4)
    }

    fn vscan_plane(&self, f: &Field, x: &[Fe]) -> Option<[Vec<Fe>; 2]> {
        let alg = self.algebra();
        if !alg.pair(f, x, x).is_zero() || x.iter().all(|c| c.is_zero()) {
            return None;
        }
        let ker = linalg::kernel(f, &alg.ad(f, x));
        let cands: Vec<Vec<Fe>> = ker
            .iter()
            .map(|k| self.g2.v.w_coords(f, &exterior::wedge(f, x, k)))
            .collect();
        independent_pair(f, &cands)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frobenius_is_coordinatewise() {
        let m = ReeModel::new(0).unwrap();
        assert!(m.frobenius_matrix().is_identity());
    }

    #[test]
    fn rho_extension_matches_closed_formula() {
        let f = Field::new(3, 4).unwrap();
        let m = ReeModel::new(0).unwrap();
        let g = m.structure();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = random_isotropic(&f, m.algebra(), &mut rng);
            assert_eq!(g.rho(&f, &x), g.rho_exact(&f, &x));
        }
    }

    #[test]
    fn twenty_eight_points_over_f3() {
        let m = ReeModel::new(0).unwrap();
        let pts = enumerate::vscan(&m, 1, u128::MAX).unwrap();
        assert_eq!(pts.points.len(), 28);
        let f = &pts.field;
        for p in &pts.points {
            assert!(m.p1(f, &p.coords).unwrap().is_zero());
            for k in 1..=3 {
                assert!(m.pairing_poly(f, &p.coords, k).is_zero());
            }
        }
    }

    #[test]
    fn sigma_squared_is_fe() {
        let f = Field::new(3, 6).unwrap();
        for mm in [0, 1] {
            let m = ReeModel::new(mm).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for _ in 0..5 {
                let g = m.random_automorphism(&f, &mut rng, 3);
                assert!(m.algebra().is_automorphism(&f, &g));
                let s = m.sigma(&f, &g).unwrap();
                assert_eq!(m.sigma(&f, &s).unwrap(), m.fe(&f, &g));
            }
        }
    }
}
