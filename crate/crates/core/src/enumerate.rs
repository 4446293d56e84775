//! Point enumeration over F_{q^n}: exhaustive ambient scan of P(W), the
//! v-scan over lines of V, and seeded random v-scan sampling.

use crate::error::{Error, Result};
use crate::exterior;
use crate::gf::{Fe, Field};
use crate::linalg::{self, Mat};
use crate::model::{CurveModel, Params};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Ambient,
    Vscan,
    /// Ambient when within budget, v-scan otherwise.
    Auto,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ambient" => Ok(Strategy::Ambient),
            "vscan" => Ok(Strategy::Vscan),
            "auto" => Ok(Strategy::Auto),
            _ => Err(format!("unknown strategy `{s}` (expected ambient, vscan or auto)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvePoint {
    /// Canonical coordinates: first nonzero entry is 1.
    pub coords: Vec<Fe>,
    /// Least n′ | n with the point defined over F_{q^{n′}}.
    pub degree: u32,
}

#[derive(Clone, Debug)]
pub struct PointSet {
    pub field: Field,
    pub n: u32,
    pub strategy: Strategy,
    pub candidates: u128,
    pub points: Vec<CurvePoint>,
}

impl PointSet {
    pub fn exact_count(&self, d: u32) -> usize {
        self.points.iter().filter(|p| p.degree == d).count()
    }

    pub fn exact(&self, d: u32) -> impl Iterator<Item = &CurvePoint> {
        self.points.iter().filter(move |p| p.degree == d)
    }
}

/// Field holding the F_{q^n}-points of a model.
pub fn point_field<M: CurveModel>(model: &M, n: u32) -> Result<Field> {
    let p = model.params();
    Field::new(p.p, p.field_degree(n))
}

/// |P^{k-1}(F_Q)|, saturating at `u128::MAX`.
pub fn projective_size(order: u128, k: usize) -> u128 {
    (0..k).fold(0u128, |acc, i| acc.saturating_add(order.saturating_pow(i as u32)))
}

fn point_field_order(p: &Params, n: u32) -> u128 {
    (p.p as u128).saturating_pow(p.field_degree(n))
}

pub fn ambient_cost<M: CurveModel>(model: &M, n: u32) -> u128 {
    let p = model.params();
    projective_size(point_field_order(p, n), model.dim())
}

pub fn vscan_cost<M: CurveModel>(model: &M, n: u32) -> u128 {
    let p = model.params();
    projective_size(point_field_order(p, n), model.v_dim())
}

/// Decodes the `idx`-th point of P^{k-1}(F) in canonical form, ordered by
/// leading position and then lexicographically on the tail.
pub fn projective_point(f: &Field, k: usize, mut idx: u128) -> Vec<Fe> {
    let q = f.order() as u128;
    let mut lead = 0;
    loop {
        let block = q.pow((k - 1 - lead) as u32);
        if idx < block {
            break;
        }
        idx -= block;
        lead += 1;
    }
    let mut v = vec![Fe::ZERO; k];
    v[lead] = Fe::ONE;
    for i in (lead + 1..k).rev() {
        v[i] = f.from_dense((idx % q) as usize);
        idx /= q;
    }
    v
}

pub fn canonical(f: &Field, w: &[Fe]) -> Option<Vec<Fe>> {
    linalg::normalize(f, w)
}

/// Least divisor n′ of n such that all coordinates lie in F_{q^{n′}}.
pub fn exact_degree(f: &Field, s: u32, n: u32, w: &[Fe]) -> u32 {
    (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| w.iter().all(|&x| f.in_subfield(x, s * d)))
        .unwrap_or(n)
}

fn sort_key(f: &Field, w: &[Fe]) -> Vec<usize> {
    w.iter().map(|&x| f.dense(x)).collect()
}

fn finish<M: CurveModel>(model: &M, f: Field, n: u32, strategy: Strategy, candidates: u128, raw: Vec<Vec<Fe>>) -> PointSet {
    let s = model.params().s;
    let mut seen = BTreeSet::new();
    let mut points = Vec::new();
    let mut keyed: Vec<(Vec<usize>, Vec<Fe>)> = raw.into_iter().map(|w| (sort_key(&f, &w), w)).collect();
    keyed.sort();
    for (key, w) in keyed {
        if seen.insert(key) {
            let degree = exact_degree(&f, s, n, &w);
            points.push(CurvePoint { coords: w, degree });
        }
    }
    PointSet { field: f, n, strategy, candidates, points }
}

fn check_budget(needed: u128, limit: u128) -> Result<()> {
    if needed > limit {
        return Err(Error::Budget { needed, limit });
    }
    Ok(())
}

/// Every point of P(W)(F_{q^n}) on the curve.
pub fn ambient_scan<M: CurveModel>(model: &M, n: u32, budget: u128) -> Result<PointSet> {
    let cost = ambient_cost(model, n);
    check_budget(cost, budget)?;
    let f = point_field(model, n)?;
    let k = model.dim();
    let raw: Vec<Vec<Fe>> = (0..cost as u64)
        .into_par_iter()
        .filter_map(|i| {
            let w = projective_point(&f, k, i as u128);
            model.is_member(&f, &w).then_some(w)
        })
        .collect();
    Ok(finish(model, f, n, Strategy::Ambient, cost, raw))
}

/// Curve points whose line F(ω) is `x`.
pub fn vscan_at<M: CurveModel>(model: &M, f: &Field, x: &[Fe]) -> Vec<Vec<Fe>> {
    let Some(plane) = model.vscan_plane(f, x) else { return Vec::new() };
    let m = model.params().m as i64;
    let images: Vec<Vec<Fe>> = plane.iter().map(|pi| exterior::wedge(f, &model.f_map(f, pi), x)).collect();
    let sys = Mat::from_cols(&images);
    let ker = linalg::kernel(f, &sys);
    let combos: Vec<(Fe, Fe)> = match ker.len() {
        0 => return Vec::new(),
        1 => vec![(f.frob(ker[0][0], -m), f.frob(ker[0][1], -m))],
        _ => std::iter::once((Fe::ZERO, Fe::ONE)).chain(f.elements().map(|t| (Fe::ONE, t))).collect(),
    };
    combos
        .into_iter()
        .filter_map(|(s, t)| {
            let w: Vec<Fe> = (0..plane[0].len())
                .map(|i| f.add(f.mul(s, plane[0][i]), f.mul(t, plane[1][i])))
                .collect();
            if model.is_member(f, &w) {
                canonical(f, &w)
            } else {
                None
            }
        })
        .collect()
}

/// Curve points over F_{q^n} found by solving for ω on each line of V.
pub fn vscan<M: CurveModel>(model: &M, n: u32, budget: u128) -> Result<PointSet> {
    let cost = vscan_cost(model, n);
    check_budget(cost, budget)?;
    let f = point_field(model, n)?;
    let k = model.v_dim();
    let raw: Vec<Vec<Fe>> = (0..cost as u64)
        .into_par_iter()
        .flat_map_iter(|i| vscan_at(model, &f, &projective_point(&f, k, i as u128)))
        .collect();
    Ok(finish(model, f, n, Strategy::Vscan, cost, raw))
}

pub fn enumerate_points<M: CurveModel>(model: &M, n: u32, strategy: Strategy, budget: u128) -> Result<PointSet> {
    match strategy {
        Strategy::Ambient => ambient_scan(model, n, budget),
        Strategy::Vscan => vscan(model, n, budget),
        Strategy::Auto if ambient_cost(model, n) <= budget => ambient_scan(model, n, budget),
        Strategy::Auto => vscan(model, n, budget),
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub trials: u64,
    pub hits: u64,
    pub points: PointSet,
}

const SAMPLE_CHUNK: u64 = 1 << 14;

/// Random v-scan over `trials` lines. Each chunk of trials draws from its own
/// ChaCha8 stream, so the result does not depend on the thread count.
pub fn sample_points<M: CurveModel>(model: &M, n: u32, trials: u64, seed: u64) -> Result<Sample> {
    let f = point_field(model, n)?;
    let k = model.v_dim();
    let chunks = trials.div_ceil(SAMPLE_CHUNK);
    let per_chunk: Vec<(u64, Vec<Vec<Fe>>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = SAMPLE_CHUNK.min(trials - c * SAMPLE_CHUNK);
            let mut hits = 0;
            let mut found = Vec::new();
            for _ in 0..len {
                let x: Vec<Fe> = (0..k).map(|_| f.random(&mut rng)).collect();
                let Some(x) = canonical(&f, &x) else { continue };
                let pts = vscan_at(model, &f, &x);
                hits += pts.len() as u64;
                found.extend(pts);
            }
            (hits, found)
        })
        .collect();
    let hits = per_chunk.iter().map(|(h, _)| h).sum();
    let raw = per_chunk.into_iter().flat_map(|(_, v)| v).collect();
    Ok(Sample { trials, hits, points: finish(model, f, n, Strategy::Vscan, trials as u128, raw) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::HermitianModel;
    use crate::suzuki::SuzukiModel;

    #[test]
    fn projective_decoding_is_a_bijection() {
        let f = Field::new(3, 1).unwrap();
        let n = projective_size(3, 3);
        assert_eq!(n, 13);
        let pts: BTreeSet<Vec<usize>> = (0..n).map(|i| sort_key(&f, &projective_point(&f, 3, i))).collect();
        assert_eq!(pts.len(), 13);
    }

    #[test]
    fn hermitian_q0_2_small_counts() {
        let m = HermitianModel::new(2, 1).unwrap();
        let a = ambient_scan(&m, 1, u128::MAX).unwrap();
        assert_eq!(a.points.len(), 9);
        let v = vscan(&m, 1, u128::MAX).unwrap();
        assert_eq!(a.points, v.points);
        let two = ambient_scan(&m, 2, u128::MAX).unwrap();
        assert_eq!((two.exact_count(1), two.exact_count(2)), (9, 0));
    }

    #[test]
    fn suzuki_q8_points_agree() {
        let m = SuzukiModel::new(1).unwrap();
        let a = ambient_scan(&m, 1, u128::MAX).unwrap();
        assert_eq!(a.points.len(), 65);
        let v = vscan(&m, 1, u128::MAX).unwrap();
        assert_eq!(a.points, v.points);
    }

    #[test]
    fn budget_refusal() {
        let m = SuzukiModel::new(1).unwrap();
        assert!(matches!(ambient_scan(&m, 4, 10_000_000), Err(Error::Budget { .. })));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let m = SuzukiModel::new(1).unwrap();
        let a = sample_points(&m, 1, 3000, 9).unwrap();
        let b = sample_points(&m, 1, 3000, 9).unwrap();
        assert_eq!(a.points.points, b.points.points);
        assert!(a.hits > 0);
        for p in &a.points.points {
            assert!(m.is_member(&a.points.field, &p.coords));
        }
    }
}
