//! ²A₂ checks.

use super::{distinct_points, all_orders, branches, certify, common, count_checks, orders, residual_check, tangent_check, BaseLookup, Config, Ctx};
use crate::branch;
use crate::enumerate::{self, PointSet, Strategy};
use crate::error::Result;
use crate::gf::{Fe, Field};
use crate::hermitian::{random_sl, volume_pair, HermitianModel};
use crate::linalg;
use crate::model::{CurveModel, Params};
use crate::report::{Outcome, Provenance, Recorder};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub(super) fn run(params: &Params, cfg: &Config, mut rec: Recorder) -> Result<Recorder> {
    let model = HermitianModel::new(params.p, params.m)?;
    let mut ctx = Ctx::new(&model, cfg);
    let (p, m, q0, q, s) = (params.p, params.m, params.q0, params.q, params.s);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = cfg.instances;

    rec.check("model.frobenius_is_coordinatewise", Provenance::Identity, || {
        Ok(Outcome::holds(model.frobenius_matrix().is_identity(), "FR = q-power map"))
    });
    rec.check("count_table.degree_identity", Provenance::ClosedForm, || {
        Ok(Outcome::compare(ctx.table.embedding_degree(), Some(params.curve_degree() as u128)))
    });
    rec.check("relation.exponent_homogeneity", Provenance::Identity, || {
        let e = q - q0 + 1;
        let big_e = q0.pow(3) * (q - 1);
        let deg_p3 = model.pairing_degree(2) - model.pairing_degree(1);
        let d_r = model.relation_degree();
        let terms = [
            model.pairing_degree(3) + (q0 - 1 + e) * model.pairing_degree(1),
            (e + q0) * model.pairing_degree(2),
            big_e * params.p1_degree() + q0 * model.pairing_degree(2) + e * model.pairing_degree(1),
        ];
        let ok = params.p1_degree() * big_e == deg_p3 * e && terms.iter().all(|&t| t == d_r);
        Ok(Outcome::holds(ok, json!({ "deg_p1_times_e": params.p1_degree() * big_e, "deg_p3_times_e": deg_p3 * e, "cleared_term_degrees": terms, "d_r": d_r })))
    });

    count_checks(&mut rec, &mut ctx, &[1, 2, 3, 4, 5]);
    super::strategy_agreement(&mut rec, &model, 3, cfg.mode.budget(), ctx.cached_set(3));

    rec.check("conjugate_model.counts", Provenance::CrossCheck, || {
        let conj = HermitianModel::random_conjugate(p, m, &mut rng)?;
        let mut got = Vec::new();
        let mut want = Vec::new();
        for n in [1, 3, 4] {
            let Ok(a) = enumerate::enumerate_points(&conj, n, Strategy::Auto, cfg.mode.budget()) else { continue };
            got.push((n, a.exact_count(n)));
            want.push((n, ctx.points(n)?.exact_count(n)));
        }
        Ok(Outcome::compare(got, want))
    });

    // Group-theoretic identities over F_{q^4}.
    let big = Field::new(p, 4 * s)?;
    let id = linalg::identity(&big, 3);
    rec.check("sigma.identity", Provenance::Identity, || Ok(Outcome::holds(model.sigma(&big, &id)? == id, "σ(1) = 1")));
    let gs: Vec<_> = (0..k).map(|_| random_sl(&big, 3, &mut rng)).collect();
    rec.check("sigma.squared_is_fe", Provenance::Identity, || {
        let mut bad = 0;
        for g in &gs {
            let sg = model.sigma(&big, g)?;
            if model.sigma(&big, &sg)? != model.fe(&big, g) {
                bad += 1;
            }
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": gs.len(), "failures": bad })))
    });
    rec.check("sigma.unitary_adjoint", Provenance::Identity, || {
        let mut bad = 0;
        for g in &gs {
            let sg = model.sigma(&big, g)?;
            let gt = linalg::mat_frob(&big, g, m).transpose();
            if linalg::mat_mul(&big, &sg, &gt) != id {
                bad += 1;
            }
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": gs.len(), "failures": bad })))
    });
    rec.check("membership.fermat_form", Provenance::Identity, || {
        let f = Field::new(p, 3 * s)?;
        let bad = (0..k)
            .filter(|_| {
                let w: Vec<Fe> = (0..3).map(|_| f.random(&mut rng)).collect();
                let fermat = w.iter().fold(Fe::ZERO, |acc, &x| f.add(acc, f.pow(x, q0 + 1)));
                model.equations(&f, &w)[0] != fermat
            })
            .count();
        Ok(Outcome::holds(bad == 0, json!({ "instances": k, "failures": bad })))
    });

    // Pointwise identities on the enumerated sets.
    let sets: Vec<PointSet> = ctx.cached().cloned().collect();
    let find = |n: u32| sets.iter().find(|s| s.n == n);
    let zero_at = |n: u32, deg: u32, kk: u32| -> Option<(usize, usize)> {
        let set = find(n)?;
        let pts: Vec<_> = set.exact(deg).collect();
        let zeros = pts.iter().filter(|pt| model.pairing_poly(&set.field, &pt.coords, kk).is_zero()).count();
        Some((pts.len(), zeros))
    };
    for (name, n, deg, kk) in [
        ("f3.zero_at_fq", 1, 1, 1),
        ("f5.zero_at_exact_degree_3", 3, 3, 2),
        ("f7.zero_at_exact_degree_4", 4, 4, 3),
    ] {
        match zero_at(n, deg, kk) {
            Some((total, zeros)) => rec.check(name, Provenance::Identity, || {
                Ok(Outcome::holds(total > 0 && zeros == total, json!({ "points": total, "zeros": zeros })))
            }),
            None => rec.check(name, Provenance::Identity, || Ok(Outcome::skipped(format!("F_{{q^{n}}} points not enumerated")))),
        };
    }
    match find(4) {
        Some(set) => rec.check("f5_f3.power_identity_exact_degree_4", Provenance::Identity, || {
            let f = &set.field;
            let pts: Vec<_> = set.exact(4).collect();
            let bad = pts
                .iter()
                .filter(|pt| {
                    let f3 = model.pairing_poly(f, &pt.coords, 1);
                    let f5 = model.pairing_poly(f, &pt.coords, 2);
                    f.pow(f5, q0.pow(3) + 1) != f.pow(f3, q0.pow(5) + 1)
                })
                .count();
            Ok(Outcome::holds(!pts.is_empty() && bad == 0, json!({ "points": pts.len(), "failures": bad })))
        }),
        None => rec.check("f5_f3.power_identity_exact_degree_4", Provenance::Identity, || Ok(Outcome::skipped("F_{q^4} points not enumerated"))),
    };

    rec.check("p1.zero_at_fq", Provenance::Identity, || {
        let set = find(1).ok_or(crate::Error::Config("no F_q points".into()))?;
        let vals: Vec<bool> = set.points.iter().map(|pt| model.p1(&set.field, &pt.coords).map(|v| v.is_zero())).collect::<Result<_>>()?;
        Ok(Outcome::holds(!vals.is_empty() && vals.iter().all(|&z| z), json!({ "points": vals.len() })))
    });
    let distinct = distinct_points(&sets);
    rec.check("p1.nonzero_off_fq", Provenance::Identity, || {
        let mut by_degree = std::collections::BTreeMap::<u32, (usize, usize)>::new();
        for (set, pt) in distinct.iter().filter(|(_, p)| p.degree > 1) {
            let e = by_degree.entry(pt.degree).or_default();
            e.0 += 1;
            e.1 += usize::from(model.p1(&set.field, &pt.coords).map_or(true, |v| v.is_zero()));
        }
        if by_degree.is_empty() {
            return Ok(Outcome::skipped("no points off F_q enumerated"));
        }
        let ok = by_degree.values().all(|&(_, z)| z == 0);
        let seen: Vec<_> = by_degree.iter().map(|(d, (n, z))| json!({ "degree": d, "points": n, "zeros": z })).collect();
        Ok(Outcome::holds(ok, seen))
    });
    rec.check("p1.witness_independence", Provenance::Identity, || {
        let mut checked = 0;
        let mut bad = 0;
        for (set, pt) in &distinct {
            let f = &set.field;
            let w = &pt.coords;
            let mut us: Vec<Vec<Fe>> = (0..3).map(|i| (0..3).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }).collect()).collect();
            us.push((0..3).map(|_| f.random(&mut rng)).collect());
            let vals: Vec<Fe> = us.iter().filter_map(|u| model.p1_with(f, w, u)).collect();
            if vals.len() >= 2 {
                checked += 1;
                bad += usize::from(common(&vals).is_none());
            }
        }
        Ok(Outcome::holds(checked > 0 && bad == 0, json!({ "points": checked, "failures": bad })))
    });
    rec.check("pairing_with_fq_point.unique_zero", Provenance::Identity, || {
        let mut seen = Vec::new();
        let mut ok = true;
        for set in &sets {
            let f = &set.field;
            for w0 in set.exact(1) {
                let line = model.f_map(f, &w0.coords);
                let zeros: Vec<_> = set.points.iter().filter(|pt| volume_pair(f, &line, &pt.coords).is_zero()).collect();
                ok &= zeros.len() == 1 && zeros[0].coords == w0.coords;
            }
            seen.push(json!({ "n": set.n, "fq_points": set.exact_count(1), "points": set.points.len() }));
        }
        Ok(Outcome::holds(ok, seen))
    });
    rec.check("p1_ratio.constant", Provenance::Identity, || {
        // P1^{q0+1} / F3 on all non-F_q points, compared as elements of F_q.
        let mut consts = Vec::new();
        let mut points = 0;
        for set in sets.iter().filter(|s| s.n > 1) {
            let f = &set.field;
            let base = BaseLookup::new(f, s)?;
            let pairs: Vec<(Fe, Fe)> = set
                .points
                .iter()
                .filter(|pt| pt.degree > 1)
                .map(|pt| Ok((f.pow(model.p1(f, &pt.coords)?, q0 + 1), model.pairing_poly(f, &pt.coords, 1))))
                .collect::<Result<_>>()?;
            if pairs.is_empty() {
                continue;
            }
            points += pairs.len();
            let (c, constant) = branch::ratio_constancy(f, &pairs)?;
            consts.push(if constant { base.get(c) } else { None });
        }
        if points == 0 {
            return Ok(Outcome::skipped("no points off F_q enumerated"));
        }
        let value = common(&consts).flatten();
        Ok(Outcome::holds(value.is_some(), json!({ "points": points, "constant_in_fq": value })))
    });
    rec.check("relation.pointwise", Provenance::Identity, || {
        // P4 − P3^{q−q0+1} + a·P1^E = 0 at the exact-degree-4 and -5 points.
        let mut a_vals = Vec::new();
        let mut root_ok = true;
        let mut rejected = Vec::new();
        let mut points = 0;
        for set in sets.iter().filter(|s| s.n == 4 || s.n == 5) {
            let f = &set.field;
            let base = BaseLookup::new(f, s)?;
            for pt in set.exact(set.n) {
                let Ok(t) = model.relation(f, &pt.coords, false) else {
                    rejected.push(pt.degree);
                    continue;
                };
                let Some(a) = f.div(f.neg(t.base), t.kappa_term) else {
                    rejected.push(pt.degree);
                    continue;
                };
                points += 1;
                root_ok &= f.pow(a, q0 + 1) == Fe::ONE;
                a_vals.push(base.get(a));
            }
        }
        if points == 0 {
            return Ok(Outcome::skipped("no exact-degree-4 or -5 points enumerated"));
        }
        let a = common(&a_vals).flatten();
        Ok(Outcome::holds(a.is_some() && root_ok, json!({ "points": points, "a_in_fq": a, "a_is_root_of_unity": root_ok, "rejected_degrees": rejected })))
    });

    // Series at F_q-points and at F_{q^3}-points.
    let sys = ctx.system()?.clone();
    let rational = find(1).cloned();
    if let Some(set) = &rational {
        let f = &set.field;
        let pts: Vec<_> = set.points.iter().collect();
        let bs = branches(&sys, f, &pts, 64)?;
        residual_check(&mut rec, &model, f, &bs);
        for (name, kk) in [("order.f3_at_fq", 1), ("order.f5_at_fq", 2), ("order.f7_at_fq", 3)] {
            rec.check(name, Provenance::Identity, || {
                Ok(all_orders(&orders(f, &bs, |r, w| Ok(model.pairing_poly(r, w, kk)))?, (q0 + 1) as usize))
            });
        }
        rec.check("order.p1_at_fq", Provenance::Identity, || Ok(all_orders(&orders(f, &bs, |r, w| model.p1(r, w))?, 1)));
    }
    if let Some(set) = find(3) {
        let f = &set.field;
        let pts: Vec<_> = set.exact(3).collect();
        let bs = branches(&sys, f, &pts, 32)?;
        rec.check("order.f5_at_exact_degree_3", Provenance::Identity, || {
            Ok(all_orders(&orders(f, &bs, |r, w| Ok(model.pairing_poly(r, w, 2)))?, 1))
        });
        rec.check("order.f7_at_exact_degree_3", Provenance::Identity, || {
            Ok(all_orders(&orders(f, &bs, |r, w| Ok(model.pairing_poly(r, w, 3)))?, q0 as usize))
        });
    }
    if let Some(set) = find(4) {
        let f = &set.field;
        let pts: Vec<_> = set.exact(4).collect();
        let bs = branches(&sys, f, &pts, 16)?;
        rec.check("order.f7_at_exact_degree_4", Provenance::Identity, || {
            Ok(all_orders(&orders(f, &bs, |r, w| Ok(model.pairing_poly(r, w, 3)))?, 1))
        });
    }
    tangent_check(&mut rec, &mut ctx, true);

    certify(&mut rec, &model, &sys, rational.as_ref(), cfg);
    Ok(rec)
}
