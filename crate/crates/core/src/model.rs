//! Interface shared by the three curve families.

use crate::error::Result;
use crate::gf::{Fe, Field};
use crate::ring::FrobRing;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Su3,
    Sz,
    Ree,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Su3 => "su3",
            Family::Sz => "sz",
            Family::Ree => "ree",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "su3" => Ok(Family::Su3),
            "sz" => Ok(Family::Sz),
            "ree" => Ok(Family::Ree),
            _ => Err(format!("unknown family `{s}` (expected su3, sz or ree)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub family: Family,
    pub p: u32,
    pub m: u32,
    pub q0: u64,
    pub q: u64,
    /// `q = p^s`; FR acts on coordinates as the `p^s` power map.
    pub s: u32,
    /// Exponent of the Frobenius twist in ρ (0 for su3, 1 otherwise).
    pub a: u32,
    /// Coxeter number: exact-degree points exist only for n = 1, n ≥ d.
    pub d: u32,
}

impl Params {
    pub fn su3(p: u32, m: u32) -> Params {
        let q0 = (p as u64).pow(m);
        Params { family: Family::Su3, p, m, q0, q: q0 * q0, s: 2 * m, a: 0, d: 3 }
    }

    pub fn sz(m: u32) -> Params {
        let q0 = 1u64 << m;
        Params { family: Family::Sz, p: 2, m, q0, q: 2 * q0 * q0, s: 2 * m + 1, a: 1, d: 4 }
    }

    pub fn ree(m: u32) -> Params {
        let q0 = 3u64.pow(m);
        Params { family: Family::Ree, p: 3, m, q0, q: 3 * q0 * q0, s: 2 * m + 1, a: 1, d: 6 }
    }

    /// Degree of the curve in its projective embedding.
    pub fn curve_degree(&self) -> u64 {
        let (q0, q) = (self.q0, self.q);
        match self.family {
            Family::Su3 => q0 + 1,
            Family::Sz => q + 2 * q0 + 1,
            Family::Ree => (q + 3 * q0 + 1) * (q + 1),
        }
    }

    /// Degree of the polynomial cutting out the F_q-points with multiplicity one.
    pub fn p1_degree(&self) -> u64 {
        let (q0, q) = (self.q0, self.q);
        match self.family {
            Family::Su3 => q - q0 + 1,
            Family::Sz => q - 2 * q0 + 1,
            Family::Ree => q - 3 * q0 + 1,
        }
    }

    /// Degree of a field over the prime field holding the F_{q^n}-points.
    pub fn field_degree(&self, n: u32) -> u32 {
        self.s * n
    }
}

/// A three-term relation `base + κ·kappa_term = 0` for an unknown constant κ.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationTerms<T> {
    pub base: T,
    pub kappa_term: T,
}

pub trait CurveModel: Sync + Send {
    fn params(&self) -> &Params;

    /// Number of projective coordinates of the ambient space P(W).
    fn dim(&self) -> usize;

    /// Dimension of the natural representation V.
    fn v_dim(&self) -> usize;

    /// Coordinate labels in basis order.
    fn basis_names(&self) -> Vec<String>;

    /// Polynomial equations cutting out the curve in P(W).
    fn equations<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Vec<R::Elem>;

    /// The line `F(ω)` in V.
    fn f_map<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Vec<R::Elem>;

    /// The family's pairing polynomial indexed by `k`.
    fn pairing_poly<R: FrobRing>(&self, r: &R, w: &[R::Elem], k: u32) -> R::Elem;

    /// The degree `q − c·q0 + 1` polynomial vanishing simply on F_q-points.
    fn p1<R: FrobRing>(&self, r: &R, w: &[R::Elem]) -> Result<R::Elem>;

    /// Terms of the curve relation. With `cleared` the terms are polynomials of
    /// degree [`CurveModel::relation_degree`]; otherwise they are the quotient
    /// form, which requires unit denominators.
    fn relation<R: FrobRing>(&self, r: &R, w: &[R::Elem], cleared: bool) -> Result<RelationTerms<R::Elem>>;

    fn relation_degree(&self) -> u64;

    /// Degree of `pairing_poly(k)` as a polynomial in the coordinates.
    fn pairing_degree(&self, k: u32) -> u64;

    /// Two W-vectors spanning the candidate plane through the line `x`, or
    /// `None` when `x` cannot be the line of a curve point.
    fn vscan_plane(&self, f: &Field, x: &[Fe]) -> Option<[Vec<Fe>; 2]>;

    fn is_member(&self, f: &Field, w: &[Fe]) -> bool {
        w.iter().any(|x| !x.is_zero()) && self.equations(f, w).iter().all(|x| x.is_zero())
    }
}

/// Checked integer power.
pub fn pow_u64(b: u64, e: u64) -> u64 {
    b.checked_pow(e as u32).expect("integer overflow")
}
