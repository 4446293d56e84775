//! The ²B₂ model in characteristic 2: a symplectic 4-space V with basis
//! (e0, e1, f0, f1), W = ω⊥ ⊂ Λ²V and the curve in P(W) = P⁴.
//!
//! W coordinates are taken in the basis (e0∧e1, e0∧f1, f0∧f1, e1∧f0, ω),
//! where ω = e0∧f0 + e1∧f1. The first four vectors project to a
//! symplectic basis (E0, E1, F0, F1) of V′ = W/⟨ω⟩.

use crate::error::{Error, Result};
use crate::exterior;
use crate::gf::{Fe, Field};
use crate::hermitian::independent_pair;
use crate::linalg::{self, Mat, PMat};
use crate::model::{CurveModel, Params, RelationTerms};
use crate::ring::FrobRing;
use rand::Rng;

/// Lex Λ² positions of (e0∧e1, e0∧f1, f0∧f1, e1∧f0).
const VPRIME_LEX: [usize; 4] = [0, 2, 5, 3];
/// Symplectic partner of each basis index: e_i pairs with f_i.
const PARTNER: [usize; 4] = [2, 3, 0, 1];

pub fn to_lambda2<R: FrobRing>(_r: &R, a: &[R::Elem]) -> Vec<R::Elem> {
    vec![a[0].clone(), a[4].clone(), a[1].clone(), a[3].clone(), a[4].clone(), a[2].clone()]
}

/// W coordinates of a 2-form that lies in W.
pub fn from_lambda2<R: FrobRing>(_r: &R, l: &[R::Elem]) -> Vec<R::Elem> {
    vec![l[0].clone(), l[2].clone(), l[5].clone(), l[3].clone(), l[1].clone()]
}

/// The symplectic form ⟨x, y⟩ = Σ x_i y_{i'} over the pairs (e_i, f_i).
pub fn sympl<R: FrobRing>(r: &R, x: &[R::Elem], y: &[R::Elem]) -> R::Elem {
    let mut acc = r.zero();
    for i in 0..4 {
        acc = r.add(&acc, &r.mul(&x[i], &y[PARTNER[i]]));
    }
    acc
}

/// ⟨α, β⟩ = α∧β/μ on Λ²V.
pub fn top_pair<R: FrobRing>(r: &R, a: &[R::Elem], b: &[R::Elem]) -> R::Elem {
    exterior::wedge22(r, 4, a, b).swap_remove(0)
}

/// Contraction i_v(α) with the symplectic form.
pub fn contract<R: FrobRing>(r: &R, v: &[R::Elem], a: &[R::Elem]) -> Vec<R::Elem> {
    let gram = Mat::from_fn(4, 4, |i, j| if PARTNER[i] == j { r.one() } else { r.zero() });
    exterior::contract(r, &gram, v, a)
}

/// The pairing (α∧β, v) = ⟨i_v α, i_v β⟩ for α, β ∈ Λ²V.
pub fn rho_pair<R: FrobRing>(r: &R, a: &[R::Elem], b: &[R::Elem], v: &[R::Elem]) -> R::Elem {
    sympl(r, &contract(r, v, a), &contract(r, v, b))
}

/// Lex Λ² vector of the i-th V′ basis element.
pub fn vprime_rep(i: usize) -> Vec<u8> {
    let mut l = vec![0u8; 6];
    l[VPRIME_LEX[i]] = 1;
    l
}

/// Induced map g′ on V′ in the basis (E0, E1, F0, F1).
pub fn prime_of<R: FrobRing>(r: &R, g: &Mat<R::Elem>) -> Mat<R::Elem> {
    let l2 = exterior::lambda2(r, g);
    Mat::from_fn(4, 4, |i, j| l2.at(VPRIME_LEX[i], VPRIME_LEX[j]).clone())
}

/// Matrix of ρ_V: V″ → V (a φ⁻¹-semilinear map) in the V″ basis
/// (E0∧E1, E0∧F1, F0∧F1, E1∧F0), computed from the pairing: ρ(ξ) is the
/// vector u with ⟨u, v⟩² = (ξ, v).
pub fn rho_matrix(f: &Field) -> Mat<Fe> {
    let rep = |i: usize| f.lift_vec(&vprime_rep(i));
    let xi = [(0, 1), (0, 3), (2, 3), (1, 2)];
    let cols: Vec<Vec<Fe>> = xi
        .iter()
        .map(|&(a, b)| {
            let mut u = vec![Fe::ZERO; 4];
            for i in 0..4 {
                let mut bi = vec![Fe::ZERO; 4];
                bi[i] = Fe::ONE;
                let val = rho_pair(f, &rep(a), &rep(b), &bi);
                u[PARTNER[i]] = f.sqrt(val).unwrap();
            }
            u
        })
        .collect();
    Mat::from_cols(&cols)
}

pub struct SuzukiModel {
    params: Params,
    a: PMat,
    rho: PMat,
    pf: Field,
}

/// Auxiliary vectors for the F_q-point polynomial: α ∝ v∧w, ⟨v,w⟩ = 0,
/// u ⊥ v with ⟨u,w⟩ ≠ 0.
#[derive(Clone, Debug)]
pub struct Witness<T> {
    pub v: Vec<T>,
    pub w: Vec<T>,
    pub u: Vec<T>,
}

fn first_unit<R: FrobRing>(r: &R, v: &[R::Elem]) -> Option<usize> {
    v.iter().position(|x| r.is_unit(x))
}

fn unit_ratio<R: FrobRing>(r: &R, num: &[R::Elem], den: &[R::Elem]) -> Result<R::Elem> {
    let i = first_unit(r, den).ok_or(Error::NonUnit)?;
    r.div(&num[i], &den[i]).ok_or(Error::NonUnit)
}

impl SuzukiModel {
    /// Default model: the least symplectic assignment of the V′ basis
    /// making FR the coordinatewise q-power map.
    pub fn new(m: u32) -> Result<Self> {
        let pf = Field::new(2, 1)?;
        let rho = linalg::to_pmat(&pf, &rho_matrix(&pf));
        let col = |c: u8| -> Vec<u8> { (0..4).map(|i| c >> i & 1).collect() };
        for c0 in 1..16u8 {
            for c1 in 1..16u8 {
                for c2 in 1..16u8 {
                    for c3 in 1..16u8 {
                        let a = Mat::from_cols(&[col(c0), col(c1), col(c2), col(c3)]);
                        if let Ok(model) = Self::build(m, a, rho.clone()) {
                            return Ok(model);
                        }
                    }
                }
            }
        }
        Err(Error::InvalidModel("no symplectic F with coordinate Frobenius".into()))
    }

    pub fn with_f(m: u32, a: PMat) -> Result<Self> {
        let pf = Field::new(2, 1)?;
        let rho = linalg::to_pmat(&pf, &rho_matrix(&pf));
        Self::build(m, a, rho)
    }

    fn build(m: u32, a: PMat, rho: PMat) -> Result<Self> {
        let pf = Field::new(2, 1)?;
        let am = a.lift(&pf);
        for i in 0..4 {
            for j in 0..4 {
                let mut ei = vec![Fe::ZERO; 4];
                let mut ej = vec![Fe::ZERO; 4];
                ei[i] = Fe::ONE;
                ej[j] = Fe::ONE;
                let lhs = sympl(&pf, &am.col(i), &am.col(j));
                if lhs != sympl(&pf, &ei, &ej) {
                    return Err(Error::InvalidModel(format!("F is not symplectic on basis pair ({i}, {j})")));
                }
            }
        }
        let model = SuzukiModel { params: Params::sz(m), a, rho, pf };
        if !model.frobenius_matrix().is_identity() {
            return Err(Error::InvalidModel("F does not make FR the coordinatewise q-power map".into()));
        }
        Ok(model)
    }

    pub fn f_matrix(&self) -> &PMat {
        &self.a
    }

    pub fn rho(&self) -> &PMat {
        &self.rho
    }

    /// M with FR(x) = M·φ^{2m+1}(x): FR = F∘F′∘ρ⁻¹.
    pub fn frobenius_matrix(&self) -> PMat {
        let pf = &self.pf;
        let am = self.a.lift(pf);
        let ap = prime_of(pf, &am);
        let rinv = linalg::inverse(pf, &self.rho.lift(pf)).expect("ρ invertible");
        linalg::to_pmat(pf, &linalg::mat_mul(pf, &linalg::mat_mul(pf, &am, &ap), &rinv))
    }

    pub fn sigma(&self, f: &Field, g: &Mat<Fe>) -> Mat<Fe> {
        let gp = linalg::mat_frob(f, &prime_of(f, g), self.params.m);
        let a = self.a.lift(f);
        let ainv = linalg::inverse(f, &a).expect("F invertible");
        linalg::mat_mul(f, &linalg::mat_mul(f, &a, &gp), &ainv)
    }

    pub fn fe(&self, f: &Field, g: &Mat<Fe>) -> Mat<Fe> {
        linalg::mat_frob(f, g, self.params.s)
    }

    /// Canonical witness recovered from α.
    pub fn witness<R: FrobRing>(&self, r: &R, a: &[R::Elem]) -> Result<Witness<R::Elem>> {
        let l = to_lambda2(r, a);
        let v = self.f_map(r, a);
        let j = first_unit(r, &v).ok_or(Error::NotOnCurve)?;
        let vj_inv = r.unit_inv(&v[j]).unwrap();
        let w: Vec<R::Elem> = (0..4)
            .map(|k| if k == j { r.zero() } else { r.mul(&exterior::coeff(r, 4, &l, j, k), &vj_inv) })
            .collect();
        for b in 0..4 {
            let eb = unit_vec(r, b);
            let pb = sympl(r, &eb, &v);
            let Some(pb_inv) = r.unit_inv(&pb) else { continue };
            for c in 0..4 {
                if c == b {
                    continue;
                }
                let ec = unit_vec(r, c);
                let t = r.mul(&sympl(r, &ec, &v), &pb_inv);
                let u: Vec<R::Elem> = (0..4).map(|i| r.sub(&ec[i], &r.mul(&t, &eb[i]))).collect();
                if r.is_unit(&sympl(r, &u, &w)) && first_unit(r, &exterior::wedge3(r, &u, &l)).is_some() {
                    return Ok(Witness { v, w, u });
                }
            }
        }
        Err(Error::NotOnCurve)
    }

    /// The F_q-point polynomial evaluated with an explicit witness.
    pub fn p1_with<R: FrobRing>(&self, r: &R, a: &[R::Elem], wit: &Witness<R::Elem>) -> Result<R::Elem> {
        let (q0, q) = (self.params.q0 as i64, self.params.q as i64);
        let l = to_lambda2(r, a);
        let vw = exterior::wedge(r, &wit.v, &wit.w);
        let lambda = unit_ratio(r, &l, &vw)?;
        let mu = unit_ratio(r, &self.f_map(r, &from_lambda2(r, &vw)), &wit.v)?;
        let fvu = self.f_map(r, &from_lambda2(r, &exterior::wedge(r, &wit.v, &wit.u)));
        let c = unit_ratio(r, &exterior::wedge3(r, &fvu, &l), &exterior::wedge3(r, &wit.u, &l))?;
        let uw = sympl(r, &wit.u, &wit.w);
        let terms = [
            r.zpow(&lambda, q - 2 * q0 + 1),
            Some(c),
            r.zpow(&uw, 1 - q0),
            r.zpow(&mu, 2 * q0 - 1),
        ];
        terms
            .into_iter()
            .try_fold(r.one(), |acc, t| t.map(|t| r.mul(&acc, &t)))
            .ok_or(Error::NonUnit)
    }
}

fn unit_vec<R: FrobRing>(r: &R, i: usize) -> Vec<R::Elem> {
    let mut e = vec![r.zero(); 4];
    e[i] = r.one();
    e
}

/// Random product of symplectic transvections x ↦ x + c⟨x,v⟩v.
pub fn random_symplectic<G: Rng>(f: &Field, rng: &mut G, factors: usize) -> Mat<Fe> {
    let mut g = linalg::identity(f, 4);
    for _ in 0..factors {
        let v: Vec<Fe> = (0..4).map(|_| f.random(rng)).collect();
        let c = f.random(rng);
        let t = Mat::from_fn(4, 4, |i, j| {
            let d = if i == j { Fe::ONE } else { Fe::ZERO };
            f.add(d, f.mul(c, f.mul(v[i], v[PARTNER[j]])))
        });
        g = linalg::mat_mul(f, &t, &g);
    }
    g
}

impl CurveModel for SuzukiModel {
    fn params(&self) -> &Params {
        &self.params
    }
    fn dim(&self) -> usize {
        5
    }
    fn v_dim(&self) -> usize {
        4
    }
    fn basis_names(&self) -> Vec<String> {
        ["e0^e1", "e0^f1", "f0^f1", "e1^f0", "e0^f0+e1^f1"].iter().map(|s| s.to_string()).collect()
    }

    fn f_map<R: FrobRing>(&self, r: &R, a: &[R::Elem]) -> Vec<R::Elem> {
        linalg::pmat_vec(r, &self.a, &r.frob_vec(&a[..4], self.params.m))
    }

    fn equations<R: FrobRing>(&self, r: &R, a: &[R::Elem]) -> Vec<R::Elem> {
        let l = to_lambda2(r, a);
        let mut eqs = exterior::plucker(r, 4, &l);
        eqs.extend(exterior::wedge3(r, &self.f_map(r, a), &l));
        eqs
    }

    /// ⟨α, FR^k α⟩ with the pairing of V′.
    fn pairing_poly<R: FrobRing>(&self, r: &R, a: &[R::Elem], k: u32) -> R::Elem {
        let fr = r.frob_vec(&a[..4], self.params.s * k);
        sympl(r, &a[..4], &fr)
    }

    fn pairing_degree(&self, k: u32) -> u64 {
        1 + self.params.q.pow(k)
    }

    fn p1<R: FrobRing>(&self, r: &R, a: &[R::Elem]) -> Result<R::Elem> {
        let wit = self.witness(r, a)?;
        self.p1_with(r, a, &wit)
    }

    fn relation<R: FrobRing>(&self, r: &R, a: &[R::Elem], cleared: bool) -> Result<RelationTerms<R::Elem>> {
        let (q0, q) = (self.params.q0, self.params.q);
        let e = q - 2 * q0 + 1;
        let p1e = r.pow(&self.p1(r, a)?, q * q * (q - 1));
        let f2 = self.pairing_poly(r, a, 2);
        let f3 = self.pairing_poly(r, a, 3);
        let f4 = self.pairing_poly(r, a, 4);
        if cleared {
            let base = r.add(
                &r.pow(&f3, e + 2 * q0),
                &r.mul(&f4, &r.pow(&f2, 2 * q0 - 1 + e)),
            );
            let kappa_term = r.mul(&p1e, &r.mul(&r.pow(&f2, e), &r.pow(&f3, 2 * q0)));
            return Ok(RelationTerms { base, kappa_term });
        }
        let p4 = r.div(&f3, &f2).ok_or(Error::NonUnit)?;
        let p5 = r.div(&f4, &r.mul(&r.pow(&p4, 2 * q0), &f2)).ok_or(Error::NonUnit)?;
        Ok(RelationTerms { base: r.add(&r.pow(&p4, e), &p5), kappa_term: p1e })
    }

    fn relation_degree(&self) -> u64 {
        let (q0, q) = (self.params.q0, self.params.q);
        (q - 2 * q0 + 1 + 2 * q0) * self.pairing_degree(3)
    }

    fn vscan_plane(&self, f: &Field, x: &[Fe]) -> Option<[Vec<Fe>; 2]> {
        let row: Vec<Fe> = (0..4).map(|i| x[PARTNER[i]]).collect();
        let perp = linalg::kernel(f, &Mat::from_rows(&[row]));
        let cands: Vec<Vec<Fe>> =
            perp.iter().map(|y| from_lambda2(f, &exterior::wedge(f, x, y))).collect();
        independent_pair(f, &cands)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rho_basis_images_are_the_identity() {
        let f = Field::new(2, 1).unwrap();
        assert_eq!(linalg::to_pmat(&f, &rho_matrix(&f)), PMat::identity_p(4));
    }

    #[test]
    fn default_f_is_identity() {
        let m = SuzukiModel::new(1).unwrap();
        assert!(m.f_matrix().is_identity());
    }

    #[test]
    fn vprime_basis_is_symplectic() {
        let f = Field::new(2, 1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let v = top_pair(&f, &f.lift_vec(&vprime_rep(i)), &f.lift_vec(&vprime_rep(j)));
                let expect = if PARTNER[i] == j { Fe::ONE } else { Fe::ZERO };
                assert_eq!(v, expect, "({i},{j})");
            }
        }
    }

    #[test]
    fn membership_examples() {
        let f = Field::new(2, 3).unwrap();
        let m = SuzukiModel::new(1).unwrap();
        assert!(m.is_member(&f, &[Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO]));
        assert!(!m.is_member(&f, &[Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ONE]));
    }

    #[test]
    fn symplectic_matrices_have_det_one() {
        let f = Field::new(2, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = random_symplectic(&f, &mut rng, 6);
            assert_eq!(linalg::det(&f, &g), Fe::ONE);
        }
    }
}
