//! Verification suites: the per-family checks behind `verify`, and the
//! count tables behind `count`.

mod ree;
mod su3;
mod sz;

use crate::branch::{self, CompiledSystem, Order, SeriesBranch};
use crate::counts::{expected_counts, CountTable};
use crate::enumerate::{self, CurvePoint, PointSet, Strategy};
use crate::error::{Error, Result};
use crate::gf::{Embedding, Fe, Field};
use crate::model::{CurveModel, Family, Params};
use crate::report::{Outcome, PointDump, Provenance, Recorder, Report};
use crate::series::SeriesRing;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ci,
    Full,
    Longrun,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ci" => Ok(Mode::Ci),
            "full" => Ok(Mode::Full),
            "longrun" => Ok(Mode::Longrun),
            _ => Err(format!("unknown mode `{s}` (expected ci, full or longrun)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Ci => "ci",
            Mode::Full => "full",
            Mode::Longrun => "longrun",
        })
    }
}

impl Mode {
    /// Candidate budget for one enumeration (points of P(W) or lines of V).
    pub fn budget(self) -> u128 {
        match self {
            Mode::Ci => 10_000_000,
            Mode::Full => 100_000_000,
            Mode::Longrun => 1_000_000_000,
        }
    }

    /// Longest branch expansion attempted.
    pub fn series_cap(self) -> usize {
        match self {
            Mode::Ci => 4_096,
            Mode::Full => 20_000,
            Mode::Longrun => 100_000,
        }
    }

    /// Lines drawn by the random v-scan.
    pub fn sample_trials(self) -> u64 {
        match self {
            Mode::Ci => 200_000,
            Mode::Full | Mode::Longrun => 10_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub mode: Mode,
    pub seed: u64,
    pub timings: bool,
    /// Random instances per structural property.
    pub instances: usize,
}

impl Config {
    pub fn new(mode: Mode, seed: u64) -> Self {
        Config { mode, seed, timings: false, instances: 100 }
    }
}

/// Family, characteristic and m as given on the command line.
pub fn params_for(family: Family, p: Option<u32>, m: u32) -> Result<Params> {
    let p_default = match family {
        Family::Su3 => 2,
        Family::Sz => 2,
        Family::Ree => 3,
    };
    let p = p.unwrap_or(p_default);
    // Largest m whose fields fit the element tables and whose degrees and
    // exponents fit in u64.
    let max_m = match (family, p) {
        (Family::Su3, 3) => 1,
        _ => 2,
    };
    if m > max_m {
        return Err(Error::Unsupported(format!("{family} with p = {p} is supported for m <= {max_m}, got {m}")));
    }
    match family {
        Family::Su3 if p == 2 || p == 3 => {
            if m == 0 {
                return Err(Error::Config("su3 needs m >= 1".into()));
            }
            Ok(Params::su3(p, m))
        }
        Family::Su3 => Err(Error::Config(format!("su3 is implemented for p in {{2, 3}}, got {p}"))),
        Family::Sz if p == 2 => Ok(Params::sz(m)),
        Family::Ree if p == 3 => Ok(Params::ree(m)),
        _ => Err(Error::Config(format!("{family} is defined only for p = {p_default}"))),
    }
}

/// Run the verification suite of a family.
pub fn verify(params: &Params, cfg: &Config) -> Result<Report> {
    let rec = Recorder::new(*params, cfg.seed, cfg.timings);
    let rec = match params.family {
        Family::Su3 => su3::run(params, cfg, rec)?,
        Family::Sz => sz::run(params, cfg, rec)?,
        Family::Ree => ree::run(params, cfg, rec)?,
    };
    Ok(rec.into_report("verify", &cfg.mode.to_string()))
}

/// Exact-degree counts over F_{q^n} for every divisor of n, against the
/// closed forms where they exist. A budget refusal is returned as an error.
pub fn count(params: &Params, n: u32, strategy: Strategy, cfg: &Config) -> Result<Report> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    match params.family {
        Family::Su3 => count_with(&crate::hermitian::HermitianModel::new(params.p, params.m)?, n, strategy, cfg),
        Family::Sz => count_with(&crate::suzuki::SuzukiModel::new(params.m)?, n, strategy, cfg),
        Family::Ree => count_with(&crate::ree::ReeModel::new(params.m)?, n, strategy, cfg),
    }
}

/// Enumerate F_{q^n}-points for a CSV dump; returns the basis names too.
pub fn dump_points(params: &Params, n: u32, strategy: Strategy, cfg: &Config) -> Result<(Vec<String>, PointSet)> {
    fn go<M: CurveModel>(model: &M, n: u32, strategy: Strategy, budget: u128) -> Result<(Vec<String>, PointSet)> {
        Ok((model.basis_names(), enumerate::enumerate_points(model, n, strategy, budget)?))
    }
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let budget = cfg.mode.budget();
    match params.family {
        Family::Su3 => go(&crate::hermitian::HermitianModel::new(params.p, params.m)?, n, strategy, budget),
        Family::Sz => go(&crate::suzuki::SuzukiModel::new(params.m)?, n, strategy, budget),
        Family::Ree => go(&crate::ree::ReeModel::new(params.m)?, n, strategy, budget),
    }
}

/// Re-verify a point dump against a model: header, membership, canonical
/// form, exact-degree labels and distinctness.
pub fn ingest(params: &Params, dump: &PointDump, cfg: &Config) -> Result<Report> {
    match params.family {
        Family::Su3 => ingest_with(&crate::hermitian::HermitianModel::new(params.p, params.m)?, dump, cfg),
        Family::Sz => ingest_with(&crate::suzuki::SuzukiModel::new(params.m)?, dump, cfg),
        Family::Ree => ingest_with(&crate::ree::ReeModel::new(params.m)?, dump, cfg),
    }
}

fn ingest_with<M: CurveModel>(model: &M, dump: &PointDump, cfg: &Config) -> Result<Report> {
    let params = model.params();
    if dump.basis != model.basis_names() {
        return Err(Error::Config(format!(
            "basis columns {} do not match the {} model ({})",
            dump.basis.join(","),
            params.family,
            model.basis_names().join(",")
        )));
    }
    let f = &dump.field;
    if f.p() != params.p || f.degree() % params.s != 0 {
        return Err(Error::Config(format!("GF({}^{}) is not an extension of F_q = GF({}^{})", f.p(), f.degree(), params.p, params.s)));
    }
    let n = f.degree() / params.s;
    let mut rec = Recorder::new(*params, cfg.seed, cfg.timings);
    let total = dump.points.len();
    rec.check("ingest.membership", Provenance::Identity, || {
        let bad = dump.points.par_iter().filter(|(_, w)| !model.is_member(f, w)).count();
        Ok(Outcome::holds(bad == 0, serde_json::json!({ "points": total, "failures": bad })))
    });
    rec.check("ingest.canonical_form", Provenance::Identity, || {
        let bad = dump.points.iter().filter(|(_, w)| enumerate::canonical(f, w).as_ref() != Some(w)).count();
        Ok(Outcome::holds(bad == 0, serde_json::json!({ "points": total, "failures": bad })))
    });
    rec.check("ingest.degree_labels", Provenance::Identity, || {
        let bad = dump.points.iter().filter(|(d, w)| enumerate::exact_degree(f, params.s, n, w) != *d).count();
        Ok(Outcome::holds(bad == 0, serde_json::json!({ "points": total, "failures": bad })))
    });
    rec.check("ingest.distinct", Provenance::Identity, || {
        let distinct: std::collections::BTreeSet<&Vec<Fe>> = dump.points.iter().map(|(_, w)| w).collect();
        Ok(Outcome::compare(distinct.len(), total))
    });
    let table = expected_counts(params);
    rec.check("ingest.exact_degree_counts", Provenance::Measured, || {
        let mut counts = BTreeMap::<u32, usize>::new();
        for (d, _) in &dump.points {
            *counts.entry(*d).or_default() += 1;
        }
        let expected: BTreeMap<u32, Option<String>> =
            counts.keys().map(|&d| (d, table.expected(d).map(|e| e.to_string()))).collect();
        let mut out = Outcome::measured(serde_json::json!({ "n": n, "counts": counts }));
        out.expected = serde_json::json!(expected);
        Ok(out.with_note("a dump may be partial, so counts are reported rather than asserted"))
    });
    Ok(rec.into_report("ingest", &cfg.mode.to_string()))
}

fn count_with<M: CurveModel>(model: &M, n: u32, strategy: Strategy, cfg: &Config) -> Result<Report> {
    let set = enumerate::enumerate_points(model, n, strategy, cfg.mode.budget())?;
    let table = expected_counts(model.params());
    let mut rec = Recorder::new(*model.params(), cfg.seed, cfg.timings);
    for d in (1..=n).filter(|d| n % d == 0) {
        let got = set.exact_count(d) as u128;
        rec.check(&format!("count.exact.n{d}"), Provenance::ClosedForm, || {
            Ok(match table.expected(d) {
                Some(e) => Outcome::compare(got, e),
                None => Outcome::measured(got),
            })
        });
    }
    let total = set.points.len();
    rec.check(&format!("count.total.n{n}"), Provenance::Measured, || {
        Ok(Outcome::measured(serde_json::json!({
            "points": total,
            "strategy": set.strategy,
            "candidates": set.candidates.to_string(),
        })))
    });
    Ok(rec.into_report("count", &cfg.mode.to_string()))
}

/// Lazily enumerated point sets of one model.
pub(crate) struct Ctx<'m, M: CurveModel> {
    pub model: &'m M,
    pub cfg: &'m Config,
    pub table: CountTable,
    sets: BTreeMap<u32, PointSet>,
    sys: Option<CompiledSystem>,
}

impl<'m, M: CurveModel> Ctx<'m, M> {
    pub fn new(model: &'m M, cfg: &'m Config) -> Self {
        Ctx { model, cfg, table: expected_counts(model.params()), sets: BTreeMap::new(), sys: None }
    }

    pub fn points(&mut self, n: u32) -> Result<&PointSet> {
        if !self.sets.contains_key(&n) {
            let set = enumerate::enumerate_points(self.model, n, Strategy::Auto, self.cfg.mode.budget())?;
            self.sets.insert(n, set);
        }
        Ok(&self.sets[&n])
    }

    /// Already enumerated sets.
    pub fn cached(&self) -> impl Iterator<Item = &PointSet> {
        self.sets.values()
    }

    pub fn cached_set(&self, n: u32) -> Option<&PointSet> {
        self.sets.get(&n)
    }

    /// Add a set found another way (sampling) unless one is cached for `n`.
    pub fn adopt(&mut self, set: PointSet) {
        self.sets.entry(set.n).or_insert(set);
    }

    pub fn system(&mut self) -> Result<&CompiledSystem> {
        if self.sys.is_none() {
            self.sys = Some(CompiledSystem::new(self.model)?);
        }
        Ok(self.sys.as_ref().unwrap())
    }
}

/// Exact-degree counts for each n, partition consistency between scans,
/// and agreement of the two strategies at n = 1.
pub(crate) fn count_checks<M: CurveModel>(rec: &mut Recorder, ctx: &mut Ctx<'_, M>, ns: &[u32]) {
    for &n in ns {
        let expected = ctx.table.expected(n);
        rec.check(&format!("count.exact.n{n}"), Provenance::ClosedForm, || {
            let got = ctx.points(n)?.exact_count(n) as u128;
            Ok(match expected {
                Some(e) => Outcome::compare(got, e),
                None => Outcome::measured(got),
            })
        });
    }
    for &n in ns {
        let divisors: Vec<u32> = ns.iter().copied().filter(|&d| d < n && n % d == 0).collect();
        let (Some(big), false) = (ctx.cached_set(n), divisors.is_empty()) else { continue };
        let pairs: Vec<(u32, usize, usize)> = divisors
            .iter()
            .filter_map(|&d| ctx.cached_set(d).map(|small| (d, big.exact_count(d), small.exact_count(d))))
            .collect();
        if pairs.is_empty() {
            continue;
        }
        rec.check(&format!("count.partition.n{n}"), Provenance::CrossCheck, || {
            let ok = pairs.iter().all(|&(_, a, b)| a == b);
            let seen: Vec<_> = pairs.iter().map(|&(d, a, b)| serde_json::json!({"d": d, "in_n": a, "in_d": b})).collect();
            Ok(Outcome::holds(ok, seen))
        });
    }
    strategy_agreement(rec, ctx.model, 1, ctx.cfg.mode.budget(), ctx.cached_set(1));
}

/// Ambient scan and v-scan agree; a cached set from either strategy is reused.
pub(crate) fn strategy_agreement<M: CurveModel>(
    rec: &mut Recorder,
    model: &M,
    n: u32,
    budget: u128,
    cached: Option<&PointSet>,
) {
    rec.check(&format!("strategy.agreement.n{n}"), Provenance::CrossCheck, || {
        let run = |strategy: Strategy| -> Result<PointSet> {
            match cached {
                Some(set) if set.strategy == strategy => Ok(set.clone()),
                _ => enumerate::enumerate_points(model, n, strategy, budget),
            }
        };
        let a = run(Strategy::Ambient)?;
        let v = run(Strategy::Vscan)?;
        Ok(Outcome::holds(a.points == v.points, [a.points.len(), v.points.len()]))
    });
}

/// Each point once, taken from the smallest cached set containing it.
pub(crate) fn distinct_points(sets: &[PointSet]) -> Vec<(&PointSet, &CurvePoint)> {
    let owner = |d: u32| sets.iter().map(|s| s.n).filter(|n| n % d == 0).min();
    sets.iter()
        .flat_map(|set| set.points.iter().map(move |p| (set, p)))
        .filter(|(set, p)| owner(p.degree) == Some(set.n))
        .collect()
}

/// Branches at many points in parallel.
pub(crate) fn branches(sys: &CompiledSystem, f: &Field, pts: &[&CurvePoint], len: usize) -> Result<Vec<SeriesBranch>> {
    pts.par_iter().map(|p| branch::branch_expand(sys, f, &p.coords, len)).collect()
}

/// Vanishing orders of `eval` along each branch.
pub(crate) fn orders<E>(f: &Field, bs: &[SeriesBranch], eval: E) -> Result<Vec<Order>>
where
    E: for<'a> Fn(&SeriesRing<'a>, &[Vec<Fe>]) -> Result<Vec<Fe>> + Sync,
{
    bs.par_iter().map(|b| branch::vanishing_order(f, b, &eval)).collect()
}

/// Outcome asserting every order equals `expected`.
pub(crate) fn all_orders(found: &[Order], expected: usize) -> Outcome {
    let mut distinct: Vec<String> = found.iter().map(|o| o.to_string()).collect();
    distinct.sort();
    distinct.dedup();
    let ok = !found.is_empty() && found.iter().all(|&o| o == Order::Exact(expected));
    let mut out = Outcome::holds(ok, distinct).with_note(format!("{} points", found.len()));
    out.expected = serde_json::json!(expected);
    out
}

/// Dense indices in GF(p^s) of the image of GF(p^s) inside `big`, so that
/// F_q-constants found in different fields can be compared.
pub(crate) struct BaseLookup {
    images: BTreeMap<u32, usize>,
}

impl BaseLookup {
    pub fn new(big: &Field, s: u32) -> Result<Self> {
        let small = Field::new(big.p(), s)?;
        let e = Embedding::new(&small, big)?;
        Ok(BaseLookup { images: small.elements().map(|y| (e.map(y).0, small.dense(y))).collect() })
    }

    pub fn get(&self, x: Fe) -> Option<usize> {
        self.images.get(&x.0).copied()
    }
}

/// Tangent dimensions at every point of the enumerated sets.
pub(crate) fn tangent_check<M: CurveModel>(rec: &mut Recorder, ctx: &mut Ctx<'_, M>, assert: bool) {
    let Ok(sys) = ctx.system().cloned() else {
        rec.skip("tangent.dimension", "could not compile the membership system");
        return;
    };
    let sets: Vec<PointSet> = ctx.cached().cloned().collect();
    let pts = distinct_points(&sets);
    let mut kernel = BTreeMap::<usize, usize>::new();
    let mut projective = BTreeMap::<usize, usize>::new();
    let mut total = 0usize;
    let dims: Vec<branch::Tangent> = pts.par_iter().map(|(s, p)| branch::tangent(&sys, &s.field, &p.coords)).collect();
    for t in dims {
        *kernel.entry(t.kernel_dim).or_default() += 1;
        *projective.entry(t.projective_dim).or_default() += 1;
        total += 1;
    }
    if total == 0 {
        rec.skip("tangent.dimension", "no points enumerated or sampled");
        rec.skip("tangent.projection_drops_one", "no points enumerated or sampled");
        return;
    }
    let m0 = ctx.model.params().m == 0;
    rec.check("tangent.dimension", Provenance::Identity, || {
        let ok = projective.keys().eq([1usize].iter());
        let out = Outcome::holds(ok, serde_json::json!({ "points": total, "projective_dim_histogram": projective }));
        Ok(if assert { out } else { out.measured_only("smoothness is claimed for m > 0 only") })
    });
    rec.check("tangent.projection_drops_one", Provenance::Identity, || {
        let ok = kernel.values().sum::<usize>() == total
            && kernel.iter().map(|(&k, &c)| (k - 1, c)).collect::<BTreeMap<_, _>>() == projective;
        let out = Outcome::holds(ok, serde_json::json!({ "kernel_dim_histogram": kernel }));
        Ok(if m0 && !ok { out.measured_only("m = 0") } else { out })
    });
}

/// Common value of `vals` if all agree.
pub(crate) fn common<T: PartialEq + Clone>(vals: &[T]) -> Option<T> {
    let first = vals.first()?;
    vals.iter().all(|v| v == first).then(|| first.clone())
}

/// The branch solves the equations to its full length, moves (nonzero t¹
/// term) and has coefficients in F_q.
pub(crate) fn residual_check<M: CurveModel>(rec: &mut Recorder, model: &M, f: &Field, bs: &[SeriesBranch]) {
    let s = model.params().s;
    rec.check("branch.residual_and_rationality", Provenance::Identity, || {
        let len = bs.first().map_or(0, |b| b.len);
        let ring = SeriesRing::new(f, len);
        let ok = !bs.is_empty()
            && bs.iter().all(|b| {
                let series = b.series(&ring);
                model.equations(&ring, &series).iter().all(|e| e.iter().all(|c| c.is_zero()))
                    && b.coords.iter().any(|c| !c[1].is_zero())
                    && b.coords.iter().all(|c| c.iter().all(|&x| f.in_subfield(x, s)))
            });
        Ok(Outcome::holds(ok, serde_json::json!({ "branches": bs.len(), "length": len })))
    });
}

/// Series certification of the cleared relation at the first F_q-point.
pub(crate) fn certify<M: CurveModel>(
    rec: &mut Recorder,
    model: &M,
    sys: &CompiledSystem,
    rational: Option<&PointSet>,
    cfg: &Config,
) {
    let params = model.params();
    let need = branch::certification_length(model.relation_degree(), params.curve_degree());
    let name = "relation.series_certified";
    if need > cfg.mode.series_cap() {
        rec.check(name, Provenance::Identity, || {
            Ok(Outcome::skipped(format!("needs {need} series coefficients; {} mode allows {}", cfg.mode, cfg.mode.series_cap())))
        });
        return;
    }
    let Some(set) = rational.filter(|s| !s.points.is_empty()) else {
        rec.check(name, Provenance::Identity, || Ok(Outcome::skipped("no F_q-point enumerated")));
        return;
    };
    rec.check(name, Provenance::Identity, || {
        let f = &set.field;
        let b = branch::branch_expand(sys, f, &set.points[0].coords, need)?;
        let c = branch::certify_relation(model, f, &b)?;
        let base = BaseLookup::new(f, params.s)?;
        let kappa = c.kappa.and_then(|k| base.get(k));
        let measured = serde_json::json!({
            "order": c.order,
            "relation_degree": c.relation_degree,
            "curve_degree": c.curve_degree,
            "kappa_in_fq": kappa,
            "first_failure": c.failure,
            "first_order": match c.failure { Some(i) => Order::Exact(i).to_string(), None => Order::AtLeast(c.order).to_string() },
        });
        Ok(Outcome::holds(c.holds, measured).with_note("certifies the relation on C assuming C is irreducible"))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn params_ranges() {
        assert!(params_for(Family::Su3, Some(3), 1).is_ok());
        assert!(matches!(params_for(Family::Su3, Some(3), 2), Err(Error::Unsupported(_))));
        assert!(matches!(params_for(Family::Su3, None, 0), Err(Error::Config(_))));
        assert!(matches!(params_for(Family::Sz, Some(3), 0), Err(Error::Config(_))));
        assert!(matches!(params_for(Family::Ree, None, 3), Err(Error::Unsupported(_))));
        assert_eq!(params_for(Family::Ree, None, 1).unwrap().q, 27);
    }

    #[test]
    fn modes_are_ordered() {
        let modes = [Mode::Ci, Mode::Full, Mode::Longrun];
        assert!(modes.windows(2).all(|w| w[0].budget() < w[1].budget()));
        assert!(modes.windows(2).all(|w| w[0].series_cap() < w[1].series_cap()));
        assert!(modes.windows(2).all(|w| w[0].sample_trials() <= w[1].sample_trials()));
    }

    #[test]
    fn sz_base_suite_passes() {
        let cfg = Config::new(Mode::Ci, 7);
        let r = verify(&params_for(Family::Sz, None, 0).unwrap(), &cfg).unwrap();
        assert!(r.passed());
        for (n, want) in [(1, 5), (2, 0), (3, 0), (4, 20), (5, 20)] {
            assert_eq!(r.get(&format!("count.exact.n{n}")).unwrap().measured, want);
        }
        assert_eq!(r.get("relation.series_certified").unwrap().status, Status::Pass);
    }

    #[test]
    fn count_rejects_n0_and_refuses_over_budget() {
        let cfg = Config::new(Mode::Ci, 0);
        let sz1 = params_for(Family::Sz, None, 1).unwrap();
        assert!(matches!(count(&sz1, 0, Strategy::Auto, &cfg), Err(Error::Config(_))));
        assert!(matches!(count(&sz1, 4, Strategy::Auto, &cfg), Err(Error::Budget { .. })));
    }

    #[test]
    fn dump_ingest_round_trip() {
        let cfg = Config::new(Mode::Ci, 0);
        let p = params_for(Family::Su3, Some(2), 1).unwrap();
        let (basis, set) = dump_points(&p, 2, Strategy::Ambient, &cfg).unwrap();
        let mut buf = Vec::new();
        crate::report::write_points(&mut buf, &basis, &set).unwrap();
        let dump = crate::report::read_points(buf.as_slice()).unwrap();
        assert_eq!(dump.points.len(), set.points.len());
        for (pt, (deg, coords)) in set.points.iter().zip(&dump.points) {
            assert_eq!((pt.degree, &pt.coords), (*deg, coords));
        }
        assert!(ingest(&p, &dump, &cfg).unwrap().passed());
    }
}
