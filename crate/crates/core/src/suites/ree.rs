//! ²G₂ checks.

use super::{distinct_points, all_orders, branches, certify, count_checks, orders, residual_check, tangent_check, Config, Ctx};
use crate::branch::{self, Order};
use crate::enumerate::{self, PointSet};
use crate::error::Result;
use crate::exterior;
use crate::gf::{Fe, Field};
use crate::linalg::{self, Mat};
use crate::model::{CurveModel, Params};
use crate::octonion::{Algebra, DerivationSpace, TRIPLES};
use crate::ree::{random_isotropic, G2Structure, ReeModel, Witness};
use crate::report::{Outcome, Provenance, Recorder};
use crate::ring::{Dual, FrobRing};
use crate::series::SeriesRing;
use crate::suites::Mode;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Random points used per structural check are drawn from this field.
const CHECK_DEGREE: u32 = 4;

pub(super) fn run(params: &Params, cfg: &Config, mut rec: Recorder) -> Result<Recorder> {
    let model = ReeModel::new(params.m)?;
    let g2 = model.structure();
    let alg = model.algebra();
    let mut ctx = Ctx::new(&model, cfg);
    let (m, q0, q) = (params.m, params.q0, params.q);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = cfg.instances;
    let f = Field::new(3, CHECK_DEGREE)?;

    octonion_checks(&mut rec, &f, alg, &mut rng)?;
    derivation_checks(&mut rec, g2)?;
    isotropic_checks(&mut rec, &f, alg, &mut rng, k)?;
    rho_checks(&mut rec, &f, g2, &mut rng, k);
    commutator_check(&mut rec, &f, &g2.v, &mut rng, k);

    rec.check("model.frobenius_is_coordinatewise", Provenance::Identity, || {
        Ok(Outcome::holds(model.frobenius_matrix().is_identity(), "FR = q-power map"))
    });
    rec.check("sigma.squared_is_fe", Provenance::Identity, || {
        let big = Field::new(3, (2 * params.s).max(6))?;
        let mut bad = 0;
        for _ in 0..k {
            let g = model.random_automorphism(&big, &mut rng, 3);
            let sg = model.sigma(&big, &g)?;
            bad += usize::from(model.sigma(&big, &sg)? != model.fe(&big, &g));
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": k, "failures": bad })))
    });
    rec.check("params.qminus_qplus", Provenance::Identity, || {
        Ok(Outcome::compare(model.qminus() * model.qplus(), q * q - q + 1))
    });
    rec.check("count_table.degree_identity", Provenance::ClosedForm, || {
        Ok(Outcome::compare(ctx.table.embedding_degree(), Some(params.curve_degree() as u128)))
    });
    rec.check("relation.exponent_homogeneity", Provenance::Identity, || {
        let qm = model.qminus();
        let big_e = q.pow(3) * (q - 1);
        let d = |kk| model.pairing_degree(kk);
        let terms = [(qm + 3 * q0) * d(4), d(5) + (3 * q0 - 1 + qm) * d(3), big_e * params.p1_degree() + qm * d(3) + 3 * q0 * d(4)];
        let d_r = model.relation_degree();
        let ok = params.p1_degree() == qm && big_e * qm == qm * (d(4) - d(3)) && terms.iter().all(|&t| t == d_r);
        Ok(Outcome::holds(ok, json!({ "deg_p1": params.p1_degree(), "cleared_term_degrees": terms, "d_r": d_r })))
    });

    let mut ns = vec![1, 2];
    if cfg.mode == Mode::Longrun {
        ns.push(3);
    }
    count_checks(&mut rec, &mut ctx, &ns);

    if ctx.cached_set(1).is_none() {
        let trials = cfg.mode.sample_trials();
        let mut sampled = None;
        rec.check("sample.fq_points", Provenance::Measured, || {
            let s = enumerate::sample_points(&model, 1, trials, cfg.seed)?;
            let found = s.points.points.len();
            let out = Outcome::holds(found >= 100, json!({ "trials": s.trials, "hits": s.hits, "distinct_points": found }));
            sampled = Some(s.points);
            // The hit rate falls like 1/q, so the count is asserted only at q = 27.
            Ok(match (trials >= 10_000_000, params.m) {
                (true, 1) => out,
                (false, _) => out.measured_only("fewer than 10^7 trials"),
                (true, _) => out.measured_only("the 100-point target is set for m = 1"),
            })
        });
        if let Some(set) = sampled.filter(|s| !s.points.is_empty()) {
            ctx.adopt(set);
        }
    }

    let sets: Vec<PointSet> = ctx.cached().cloned().collect();
    let distinct = distinct_points(&sets);
    let all_points = || distinct.iter().copied();
    let fq_points = || all_points().filter(|(_, p)| p.degree == 1);
    let none = || Ok(Outcome::skipped("no curve points enumerated or sampled"));
    if sets.is_empty() {
        for name in ["membership.recheck", "f1_f2.zero_on_curve", "f3.zero_at_fq", "p1.zero_at_fq", "p1.witness_independence", "witness.isotropic_kernel", "rho.flag_proportional"] {
            rec.check(name, Provenance::Identity, none);
        }
    } else {
        rec.check("membership.recheck", Provenance::Identity, || {
            let bad = all_points().filter(|(s, p)| !model.is_member(&s.field, &p.coords)).count();
            Ok(Outcome::holds(bad == 0, json!({ "points": all_points().count(), "failures": bad })))
        });
        rec.check("f1_f2.zero_on_curve", Provenance::Identity, || {
            let bad = all_points()
                .filter(|(s, p)| (1..=2).any(|kk| !model.pairing_poly(&s.field, &p.coords, kk).is_zero()))
                .count();
            Ok(Outcome::holds(bad == 0, json!({ "points": all_points().count(), "failures": bad })))
        });
        rec.check("f3.zero_at_fq", Provenance::Identity, || {
            let bad = fq_points().filter(|(s, p)| !model.pairing_poly(&s.field, &p.coords, 3).is_zero()).count();
            Ok(Outcome::holds(bad == 0, json!({ "points": fq_points().count(), "failures": bad })))
        });
        rec.check("p1.zero_at_fq", Provenance::Identity, || {
            let mut bad = 0;
            for (s, p) in fq_points() {
                bad += usize::from(!model.p1(&s.field, &p.coords)?.is_zero());
            }
            Ok(Outcome::holds(bad == 0, json!({ "points": fq_points().count(), "failures": bad })))
        });
        rec.check("p1.witness_independence", Provenance::Identity, || {
            // z′ = c·z + y + x is another valid choice of z.
            let mut bad = 0;
            for (s, p) in all_points() {
                let f = &s.field;
                let wit = model.witness(f, &p.coords)?;
                let c = f.random_nonzero(&mut rng);
                let z = (0..7).map(|i| f.add(f.add(f.mul(c, wit.z[i]), wit.y[i]), wit.x[i])).collect();
                let alt = Witness { x: wit.x.clone(), y: wit.y.clone(), z };
                bad += usize::from(model.p1_with(f, &p.coords, &wit)? != model.p1_with(f, &p.coords, &alt)?);
            }
            Ok(Outcome::holds(bad == 0, json!({ "points": all_points().count(), "failures": bad })).with_note("P1 vanishes at every available point"))
        });
        rec.check("witness.isotropic_kernel", Provenance::Identity, || {
            let mut bad = 0;
            for (s, p) in all_points() {
                let f = &s.field;
                let w = model.witness(f, &p.coords)?;
                let ok = alg.pair(f, &w.x, &w.x).is_zero()
                    && alg.star(f, &w.x, &w.y).iter().all(|c| c.is_zero())
                    && alg.star(f, &w.x, &w.z).iter().all(|c| c.is_zero());
                bad += usize::from(!ok);
            }
            Ok(Outcome::holds(bad == 0, json!({ "points": all_points().count(), "failures": bad })))
        });
        rec.check("rho.flag_proportional", Provenance::Identity, || {
            let mut bad = 0;
            for (s, p) in all_points() {
                let f = &s.field;
                let w = model.witness(f, &p.coords)?;
                let flag = model.flag_vector(f, &p.coords, &w);
                let rho = g2.rho(f, &w.x);
                let nonzero = flag.iter().any(|c| !c.is_zero()) && rho.iter().any(|c| !c.is_zero());
                bad += usize::from(!nonzero || linalg::rank(f, &Mat::from_rows(&[flag, rho])) != 1);
            }
            Ok(Outcome::holds(bad == 0, json!({ "points": all_points().count(), "failures": bad })))
        });
    }

    // Series at F_q-points. Sampled points at m > 0 are expanded a few at a time.
    let sys = ctx.system()?.clone();
    let rational = sets.iter().find(|s| s.n == 1).cloned();
    let ord_f3 = (model.qplus() * (q + 1)) as usize;
    if let Some(set) = rational.as_ref().filter(|s| !s.points.is_empty()) {
        let f = &set.field;
        let take = if m == 0 { set.points.len() } else { 4 };
        let pts: Vec<_> = set.points.iter().take(take).collect();
        let bs = branches(&sys, f, &pts, (ord_f3 + 8).max(64))?;
        residual_check(&mut rec, &model, f, &bs);
        let o3 = orders(f, &bs, |r, w| Ok(model.pairing_poly(r, w, 3)))?;
        let o1 = orders(f, &bs, |r, w| model.p1(r, w))?;
        rec.check("order.f3_at_fq", Provenance::Identity, || Ok(all_orders(&o3, ord_f3)));
        rec.check("order.p1_at_fq", Provenance::Identity, || Ok(all_orders(&o1, 1)));
        rec.check("order.f3_over_p1_ratio", Provenance::Identity, || {
            // P1^{q₊(q+1)}/F3 is a unit at F_q-points.
            let ok = o3.iter().zip(&o1).all(|(a, b)| match (a, b) {
                (Order::Exact(a), Order::Exact(b)) => *a == ord_f3 * b,
                _ => false,
            });
            Ok(Outcome::holds(ok && !o3.is_empty(), json!({ "points": o3.len(), "q_plus_times_q_plus_1": ord_f3 })))
        });
    } else {
        for name in ["order.f3_at_fq", "order.p1_at_fq"] {
            rec.check(name, Provenance::Identity, || Ok(Outcome::skipped("no F_q-points available")));
        }
    }
    tangent_check(&mut rec, &mut ctx, m > 0);
    rec.check("tangent.pre_projection_dim", Provenance::Identity, || {
        let dims: Vec<usize> = all_points().map(|(s, p)| branch::tangent(&sys, &s.field, &p.coords).kernel_dim).collect();
        if dims.is_empty() {
            return Ok(Outcome::skipped("no curve points enumerated or sampled"));
        }
        let mut distinct = dims.clone();
        distinct.sort();
        distinct.dedup();
        Ok(Outcome::holds(distinct == [2], json!({ "points": dims.len(), "dims": distinct })))
    });

    certify(&mut rec, &model, &sys, rational.as_ref(), cfg);
    rec.check("relation.pointwise", Provenance::Identity, || {
        Ok(Outcome::skipped("needs points off F_q, F_{q^6} and F_{q^7}; none are enumerable"))
    });
    chain_links(&mut rec, &model, &mut rng, k)?;
    Ok(rec)
}

fn rand_vec(f: &Field, rng: &mut ChaCha8Rng, n: usize) -> Vec<Fe> {
    (0..n).map(|_| f.random(rng)).collect()
}

fn unit(i: usize) -> Vec<Fe> {
    (0..7).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }).collect()
}

fn scale(f: &Field, m: &Mat<Fe>, c: Fe) -> Mat<Fe> {
    m.map(|&x| f.mul(c, x))
}

fn octonion_checks(rec: &mut Recorder, f: &Field, alg: &Algebra, rng: &mut ChaCha8Rng) -> Result<()> {
    let pf = Field::new(3, 1)?;
    rec.check("octonion.quaternion_triples", Provenance::Identity, || {
        let st = |a: usize, b: usize| alg.star(&pf, &unit(a), &unit(b));
        let ok = TRIPLES.iter().all(|&[a, b, c]| st(a, b) == unit(c) && st(b, c) == unit(a) && st(c, a) == unit(b));
        Ok(Outcome::holds(ok, json!({ "triples": TRIPLES })))
    });
    rec.check("octonion.composition_identity", Provenance::Identity, || {
        // x*(x*y) = ⟨x,x⟩y − ⟨x,y⟩x on basis pairs and 500 random pairs.
        let holds = |fld: &Field, x: &[Fe], y: &[Fe]| {
            let lhs = alg.star(fld, x, &alg.star(fld, x, y));
            let (xx, xy) = (alg.pair(fld, x, x), alg.pair(fld, x, y));
            lhs.iter().enumerate().all(|(i, &l)| l == fld.sub(fld.mul(xx, y[i]), fld.mul(xy, x[i])))
        };
        let mut bad = (0..49).filter(|&n| !holds(&pf, &unit(n / 7), &unit(n % 7))).count();
        for _ in 0..500 {
            let (x, y) = (rand_vec(f, rng, 7), rand_vec(f, rng, 7));
            bad += usize::from(!holds(f, &x, &y));
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": 549, "failures": bad })))
    });
    rec.check("octonion.jacobi_on_basis", Provenance::Identity, || {
        let st = |x: &[Fe], y: &[Fe]| alg.star(&pf, x, y);
        let mut bad = 0;
        for n in 0..343 {
            let (a, b, c) = (unit(n / 49), unit(n / 7 % 7), unit(n % 7));
            let (s1, s2, s3) = (st(&a, &st(&b, &c)), st(&b, &st(&c, &a)), st(&c, &st(&a, &b)));
            bad += usize::from((0..7).any(|i| !pf.add(pf.add(s1[i], s2[i]), s3[i]).is_zero()));
        }
        Ok(Outcome::holds(bad == 0, json!({ "triples": 343, "failures": bad })))
    });
    rec.check("octonion.gram_is_minus_identity", Provenance::Identity, || {
        let ok = (0..7).all(|i| (0..7).all(|j| alg.pair(&pf, &unit(i), &unit(j)) == pf.from_int(if i == j { -1 } else { 0 })));
        Ok(Outcome::holds(ok, "⟨a_i, a_j⟩ = −δ_ij"))
    });
    Ok(())
}

fn derivation_checks(rec: &mut Recorder, g2: &G2Structure) -> Result<()> {
    let pf = Field::new(3, 1)?;
    let v = &g2.v;
    rec.check("derivations.dimension_and_equal_ker_star", Provenance::Identity, || {
        let ders = v.alg.derivations(&pf);
        let inside = ders.iter().all(|d| v.contains(&pf, &v.l2_of_op(&pf, d)));
        let rows: Vec<Vec<Fe>> = ders.iter().map(|d| v.l2_of_op(&pf, d)).collect();
        let rank = linalg::rank(&pf, &Mat::from_rows(&rows));
        Ok(Outcome::holds(ders.len() == 14 && inside && rank == 14, json!({ "dim_der": ders.len(), "rank_in_ker_star": rank })))
    });
    rec.check("derivations.inner_equal_w_perp", Provenance::Identity, || {
        let coords: Vec<Vec<Fe>> = (0..7).map(|i| v.w_coords(&pf, &v.l2_of_op(&pf, &v.alg.ad(&pf, &unit(i))))).collect();
        let in_perp = coords.iter().all(|w| w[7..].iter().all(|c| c.is_zero()));
        let rank = linalg::rank(&pf, &Mat::from_rows(&coords));
        let are_derivations = (0..7).all(|i| v.alg.is_derivation(&pf, &v.alg.ad(&pf, &unit(i))));
        Ok(Outcome::holds(in_perp && rank == 7 && are_derivations, json!({ "rank_inner": rank, "inside_w_perp": in_perp })))
    });
    rec.check("derivations.example_a0a1_plus_a2a5", Provenance::Identity, || {
        let mut l2 = vec![Fe::ZERO; 21];
        l2[exterior::pair_index(7, 0, 1)] = Fe::ONE;
        l2[exterior::pair_index(7, 2, 5)] = Fe::ONE;
        Ok(Outcome::holds(v.contains(&pf, &l2) && v.alg.is_derivation(&pf, &v.op(&pf, &l2)), "in W and a derivation"))
    });
    rec.check("vprime.is_octonionic", Provenance::CrossCheck, || {
        let own = v.alg.find_frame(&pf, |_| true).is_some();
        let quotient = g2.vp.alg.is_frame(&pf, &g2.frame);
        Ok(Outcome::holds(own && quotient, json!({ "frame_of_v": own, "frame_of_vprime": quotient })))
    });
    Ok(())
}

fn isotropic_checks(rec: &mut Recorder, f: &Field, alg: &Algebra, rng: &mut ChaCha8Rng, k: usize) -> Result<()> {
    let xs: Vec<Vec<Fe>> = (0..k).map(|_| random_isotropic(f, alg, rng)).collect();
    let mut kernel_dims = std::collections::BTreeMap::<usize, usize>::new();
    let (mut null_bad, mut image_bad, mut auto_bad) = (0, 0, 0);
    for x in &xs {
        let ad = alg.ad(f, x);
        let ker = linalg::kernel(f, &ad);
        *kernel_dims.entry(ker.len()).or_default() += 1;
        null_bad += usize::from(ker.iter().any(|a| ker.iter().any(|b| !alg.pair(f, a, b).is_zero())));
        let perp = linalg::kernel(f, &Mat::from_rows(&[(0..7).map(|i| alg.pair(f, &unit(i), x)).collect()]));
        let image: Vec<Vec<Fe>> = perp.iter().map(|y| linalg::mat_vec(f, &ad, y)).collect();
        let both: Vec<Vec<Fe>> = image.iter().chain(&ker).cloned().collect();
        let r_img = linalg::rank(f, &Mat::from_rows(&image));
        image_bad += usize::from(r_img != ker.len() || linalg::rank(f, &Mat::from_rows(&both)) != ker.len());
        let e = alg.exp_auto(f, x);
        let gram = alg.gram.lift(f);
        let preserves = linalg::mat_mul(f, &linalg::mat_mul(f, &e.transpose(), &gram), &e) == gram;
        auto_bad += usize::from(!alg.is_automorphism(f, &e) || !preserves);
    }
    rec.check("ad.kernel_dimension", Provenance::Identity, || {
        Ok(Outcome::holds(kernel_dims.keys().eq([3usize].iter()), json!({ "instances": xs.len(), "histogram": kernel_dims })))
    });
    rec.check("ad.kernel_null_plane", Provenance::Identity, || {
        Ok(Outcome::holds(null_bad == 0, json!({ "instances": xs.len(), "failures": null_bad })))
    });
    rec.check("ad.kernel_is_image_of_perp", Provenance::Identity, || {
        Ok(Outcome::holds(image_bad == 0, json!({ "instances": xs.len(), "failures": image_bad })))
    });
    rec.check("exp.automorphism_and_isometry", Provenance::Identity, || {
        Ok(Outcome::holds(auto_bad == 0, json!({ "instances": xs.len(), "failures": auto_bad })))
    });
    rec.check("exp.frame_images", Provenance::Identity, || {
        let pf = Field::new(3, 1)?;
        let mut bad = 0;
        for _ in 0..k {
            let x = random_isotropic(&pf, alg, rng);
            bad += usize::from(!alg.is_frame(&pf, &linalg::to_pmat(&pf, &alg.exp_auto(&pf, &x))));
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": k, "failures": bad })))
    });
    Ok(())
}

fn rho_checks(rec: &mut Recorder, f: &Field, g2: &G2Structure, rng: &mut ChaCha8Rng, k: usize) {
    let (v, vp) = (&g2.v, &g2.vp);
    let alg = &v.alg;
    let xs: Vec<Vec<Fe>> = (0..k).map(|_| random_isotropic(f, alg, rng)).collect();
    rec.check("rho.operator_is_derivation", Provenance::Identity, || {
        // ad(x)·ad(d(x))·ad(x) for a random derivation d: a derivation of V,
        // and x ↦ that class is a derivation of V′.
        let (mut bad_v, mut bad_vp) = (0, 0);
        for x in &xs {
            let d = v.op(f, &v.lift(f, &rand_vec(f, rng, 14)));
            let ad = alg.ad(f, x);
            let op = linalg::mat_mul(f, &linalg::mat_mul(f, &ad, &alg.ad(f, &linalg::mat_vec(f, &d, x))), &ad);
            bad_v += usize::from(!alg.is_derivation(f, &op));
            bad_vp += usize::from(!vp.alg.is_derivation(f, &g2.rho_operator(f, x)));
        }
        Ok(Outcome::holds(bad_v + bad_vp == 0, json!({ "instances": xs.len(), "not_derivation_of_v": bad_v, "not_derivation_of_vprime": bad_vp })))
    });
    rec.check("rho.extension_matches_closed_form", Provenance::CrossCheck, || {
        let bad = xs.iter().filter(|x| g2.rho(f, x) != g2.rho_exact(f, x)).count();
        Ok(Outcome::holds(bad == 0, json!({ "instances": xs.len(), "failures": bad })))
    });
    rec.check("rho.additive_on_null_planes", Provenance::Identity, || {
        let mut bad = 0;
        for x in &xs {
            let ker = linalg::kernel(f, &alg.ad(f, x));
            let cs = rand_vec(f, rng, ker.len());
            let y: Vec<Fe> = (0..7).map(|i| ker.iter().zip(&cs).fold(Fe::ZERO, |a, (b, &c)| f.add(a, f.mul(c, b[i])))).collect();
            let sum: Vec<Fe> = x.iter().zip(&y).map(|(&a, &b)| f.add(a, b)).collect();
            let (rx, ry) = (g2.rho_exact(f, x), g2.rho_exact(f, &y));
            let rs: Vec<Fe> = rx.iter().zip(&ry).map(|(&a, &b)| f.add(a, b)).collect();
            bad += usize::from(g2.rho_exact(f, &sum) != rs);
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": xs.len(), "failures": bad })))
    });
    rec.check("rho.cubic_homogeneity", Provenance::Identity, || {
        let mut bad = 0;
        for x in &xs {
            let c = f.random_nonzero(rng);
            let cx: Vec<Fe> = x.iter().map(|&a| f.mul(c, a)).collect();
            let want: Vec<Fe> = g2.rho_exact(f, x).iter().map(|&a| f.mul(f.pow(c, 3), a)).collect();
            bad += usize::from(g2.rho_exact(f, &cx) != want);
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": xs.len(), "failures": bad })))
    });
    rec.check("rho.lie_map", Provenance::Identity, || {
        // ρ(x*y) = ρ(x)*ρ(y) in V″, for arbitrary x and y.
        let (mut plus, mut minus) = (0, 0);
        for _ in 0..k {
            let (x, y) = (rand_vec(f, rng, 7), rand_vec(f, rng, 7));
            let lhs = g2.rho(f, &alg.star(f, &x, &y));
            let rhs = g2.vpp.star(f, &g2.rho(f, &x), &g2.rho(f, &y));
            plus += usize::from(lhs == rhs);
            minus += usize::from(lhs.iter().zip(&rhs).all(|(&a, &b)| a == f.neg(b)));
        }
        Ok(Outcome::holds(plus == k, json!({ "instances": k, "equal": plus, "equal_up_to_sign": minus })))
    });
}

/// The ε-expansion of [e_x, e_d] = e_x·e_d·e_x⁻¹·e_d⁻¹ in End(V)[ε, δ]/(ε⁴, δ²),
/// with e_x = 1 + ε·ad(x) + 2ε²·ad(x)² and e_d = 1 + δ·d.
fn commutator_check(rec: &mut Recorder, f: &Field, v: &DerivationSpace, rng: &mut ChaCha8Rng, k: usize) {
    let alg = &v.alg;
    let sr = SeriesRing::new(f, 4);
    let dr = Dual::new(&sr);
    let two = f.from_int(2);
    let (mut signs, mut third_bad, mut unit_bad) = (std::collections::BTreeMap::<i64, usize>::new(), 0, 0);
    for _ in 0..k {
        let x = random_isotropic(f, alg, rng);
        let d = v.op(f, &v.lift(f, &rand_vec(f, rng, 14)));
        let a = alg.ad(f, &x);
        let a2 = linalg::mat_mul(f, &a, &a);
        let id = |i: usize, j: usize| if i == j { Fe::ONE } else { Fe::ZERO };
        let ex = |sign: Fe| {
            Mat::from_fn(7, 7, |i, j| {
                (sr.from_coeffs(&[id(i, j), f.mul(sign, *a.at(i, j)), f.mul(two, *a2.at(i, j))]), sr.constant(Fe::ZERO))
            })
        };
        let ed = |sign: Fe| Mat::from_fn(7, 7, |i, j| (sr.constant(id(i, j)), sr.constant(f.mul(sign, *d.at(i, j)))));
        let minus = f.neg(Fe::ONE);
        let c = [ex(Fe::ONE), ed(Fe::ONE), ex(minus), ed(minus)]
            .into_iter()
            .reduce(|acc, m| linalg::mat_mul(&dr, &acc, &m))
            .unwrap();
        unit_bad += usize::from((0..7).any(|i| (0..7).any(|j| c.at(i, j).0 != sr.constant(id(i, j)) || !c.at(i, j).1[0].is_zero())));
        let coeff = |n: usize| Mat::from_fn(7, 7, |i, j| c.at(i, j).1[n]);
        let dx = linalg::mat_vec(f, &d, &x);
        let t1 = alg.ad(f, &dx);
        let t2 = scale(f, &alg.ad(f, &alg.star(f, &x, &dx)), two);
        let t3 = linalg::mat_mul(f, &linalg::mat_mul(f, &a, &t1), &a);
        let sign = [1, -1].into_iter().find(|&s| {
            let sf = f.from_int(s);
            coeff(1) == scale(f, &t1, sf) && coeff(2) == scale(f, &t2, sf)
        });
        *signs.entry(sign.unwrap_or(0)).or_default() += 1;
        let c3 = coeff(3);
        let class = |m: &Mat<Fe>| v.quotient(f, &v.l2_of_op(f, m));
        let (k3, r3) = (class(&c3), class(&t3));
        let matches = k3 == r3 || k3.iter().zip(&r3).all(|(&p, &q)| p == f.neg(q));
        third_bad += usize::from(!alg.is_derivation(f, &c3) || !matches);
    }
    rec.check("commutator.eps_expansion", Provenance::Identity, || {
        let ok = unit_bad == 0 && signs.len() == 1 && !signs.contains_key(&0);
        let sign = signs.keys().next().copied().filter(|_| ok);
        Ok(Outcome::holds(ok, json!({ "instances": k, "sign_histogram": signs, "sign": sign }))
            .with_note("coefficients of εδ and ε²δ equal s·ad(d(x)) and s·ad(x*d(x))/2 for one sign s, with ad(x)y = x*y"))
    });
    rec.check("commutator.eps3_term", Provenance::Identity, || {
        Ok(Outcome::holds(third_bad == 0, json!({ "instances": k, "failures": third_bad }))
            .with_note("the ε³δ coefficient is a derivation whose class is ±ρ(x)(d)"))
    });
}

/// Links of the F3^{q⁴+1} = F4^{q³+1} chain on random FR⁷-fixed vectors of W
/// (coordinates in F_{q^7}). Reported, not asserted.
fn chain_links(rec: &mut Recorder, model: &ReeModel, rng: &mut ChaCha8Rng, k: usize) -> Result<()> {
    let params = model.params();
    if params.m > 0 {
        rec.skip("chain.links_on_fixed_vectors", "F_{q^7} is too large for table arithmetic when m > 0");
        return Ok(());
    }
    let f = Field::new(3, 7 * params.s)?;
    let vp = &model.structure().vp.alg;
    let s = params.s;
    let q = params.q;
    let mut holds = [0usize; 4];
    for _ in 0..k {
        let w = rand_vec(&f, rng, 14);
        let c = model.class(&w);
        let fr = |n: u32| f.frob_vec(c, s * n);
        let pr = |a: &[Fe], b: &[Fe]| vp.pair(&f, a, b);
        let l0 = f.pow(model.pairing_poly(&f, &w, 3), q.pow(4) + 1);
        let l1 = f.mul(pr(&fr(4), &fr(7)), pr(c, &fr(3)));
        let l2 = f.mul(pr(&fr(4), c), pr(&fr(7), &fr(3)));
        let l3 = f.mul(f.pow(pr(c, &fr(4)), q.pow(3)), pr(c, &fr(4)));
        let l4 = f.pow(model.pairing_poly(&f, &w, 4), q.pow(3) + 1);
        for (i, (a, b)) in [(l0, l1), (l1, l2), (l2, l3), (l3, l4)].into_iter().enumerate() {
            holds[i] += usize::from(a == b);
        }
    }
    rec.check("chain.links_on_fixed_vectors", Provenance::Measured, || {
        Ok(Outcome::measured(json!({ "instances": k, "links_holding": holds })).with_note("the argument-swap link is reported, not asserted"))
    });
    Ok(())
}
