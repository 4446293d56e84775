//! ²B₂ checks.

use super::{distinct_points, 
    all_orders, branches, certify, common, count_checks, orders, residual_check, tangent_check, BaseLookup, Config, Ctx,
};
use crate::enumerate::PointSet;
use crate::error::{Error, Result};
use crate::exterior;
use crate::gf::{Fe, Field};
use crate::linalg::{self, Mat};
use crate::model::{CurveModel, Params};
use crate::report::{Outcome, Provenance, Recorder};
use crate::ring::FrobRing;
use crate::suzuki::{
    prime_of, random_symplectic, rho_matrix, rho_pair, sympl, to_lambda2, vprime_rep, SuzukiModel, Witness,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Λ² lex vector of ω = e0∧f0 + e1∧f1.
const OMEGA_LEX: [u8; 6] = [0, 1, 0, 0, 1, 0];

pub(super) fn run(params: &Params, cfg: &Config, mut rec: Recorder) -> Result<Recorder> {
    let model = SuzukiModel::new(params.m)?;
    let mut ctx = Ctx::new(&model, cfg);
    let (m, q0, q, s) = (params.m, params.q0, params.q, params.s);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = cfg.instances;

    rec.check("model.frobenius_is_coordinatewise", Provenance::Identity, || {
        Ok(Outcome::holds(model.frobenius_matrix().is_identity(), "FR = q-power map"))
    });
    rec.check("model.f_is_symplectic", Provenance::Identity, || {
        let pf = Field::new(2, 1)?;
        let a = model.f_matrix().lift(&pf);
        let unit = |i: usize| (0..4).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }).collect::<Vec<_>>();
        let ok = (0..4).all(|i| {
            (0..4).all(|j| {
                let (x, y) = (unit(i), unit(j));
                sympl(&pf, &linalg::mat_vec(&pf, &a, &x), &linalg::mat_vec(&pf, &a, &y)) == sympl(&pf, &x, &y)
            })
        });
        Ok(Outcome::holds(ok, "⟨Fx, Fy⟩ = ⟨x, y⟩ on basis pairs"))
    });
    rec.check("count_table.degree_identity", Provenance::ClosedForm, || {
        Ok(Outcome::compare(ctx.table.embedding_degree(), Some(params.curve_degree() as u128)))
    });
    rec.check("relation.exponent_homogeneity", Provenance::Identity, || {
        let e = q - 2 * q0 + 1;
        let big_e = q * q * (q - 1);
        let d = |kk| model.pairing_degree(kk);
        let deg_p4 = d(3) - d(2);
        let terms = [(e + 2 * q0) * d(3), d(4) + (2 * q0 - 1 + e) * d(2), big_e * params.p1_degree() + e * d(2) + 2 * q0 * d(3)];
        let d_r = model.relation_degree();
        let ok = big_e * params.p1_degree() == e * deg_p4 && terms.iter().all(|&t| t == d_r);
        Ok(Outcome::holds(ok, json!({ "deg_p1_times_e": big_e * params.p1_degree(), "deg_p4_times_e": e * deg_p4, "cleared_term_degrees": terms, "d_r": d_r })))
    });

    count_checks(&mut rec, &mut ctx, &[1, 2, 3, 4, 5]);

    // Group identities over F_{q^4}.
    let big = Field::new(2, 4 * s)?;
    let gs: Vec<Mat<Fe>> = (0..k).map(|_| random_symplectic(&big, &mut rng, 8)).collect();
    rec.check("sigma.squared_is_fe", Provenance::Identity, || {
        let bad = gs.iter().filter(|g| model.sigma(&big, &model.sigma(&big, g)) != model.fe(&big, g)).count();
        Ok(Outcome::holds(bad == 0, json!({ "instances": gs.len(), "failures": bad })))
    });
    rec.check("sigma.det_one", Provenance::Identity, || {
        let bad = gs.iter().filter(|g| linalg::det(&big, &model.sigma(&big, g)) != Fe::ONE).count();
        Ok(Outcome::holds(bad == 0, json!({ "instances": gs.len(), "failures": bad })))
    });

    rho_checks(&mut rec, &mut rng, k)?;

    let sets: Vec<PointSet> = ctx.cached().cloned().collect();
    let find = |n: u32| sets.iter().find(|s| s.n == n);
    let distinct = distinct_points(&sets);
    let all_points = || distinct.iter().copied();

    rec.check("p1.zero_at_fq", Provenance::Identity, || {
        let set = find(1).ok_or(Error::Config("no F_q points".into()))?;
        let vals: Vec<bool> = set.points.iter().map(|pt| model.p1(&set.field, &pt.coords).map(|v| v.is_zero())).collect::<Result<_>>()?;
        Ok(Outcome::holds(!vals.is_empty() && vals.iter().all(|&z| z), json!({ "points": vals.len() })))
    });
    rec.check("p1.nonzero_off_fq", Provenance::Identity, || {
        let mut by_degree = std::collections::BTreeMap::<u32, (usize, usize)>::new();
        for (set, pt) in all_points().filter(|(_, p)| p.degree > 1) {
            let e = by_degree.entry(pt.degree).or_default();
            e.0 += 1;
            if model.p1(&set.field, &pt.coords).map_or(true, |v| v.is_zero()) {
                e.1 += 1;
            }
        }
        if by_degree.is_empty() {
            return Ok(Outcome::skipped("no points off F_q enumerated"));
        }
        let ok = by_degree.values().all(|&(_, z)| z == 0);
        let seen: Vec<_> = by_degree.iter().map(|(d, (n, z))| json!({ "degree": d, "points": n, "zeros": z })).collect();
        Ok(Outcome::holds(ok, seen))
    });
    rec.check("p1.witness_independence", Provenance::Identity, || {
        let (mut checked, mut bad) = (0, 0);
        for (set, pt) in all_points().filter(|(_, p)| p.degree > 1) {
            let f = &set.field;
            let wit = model.witness(f, &pt.coords)?;
            let c = f.random_nonzero(&mut rng);
            let add = |x: &[Fe], y: &[Fe]| x.iter().zip(y).map(|(&a, &b)| f.add(a, b)).collect::<Vec<_>>();
            let alt = Witness {
                v: wit.v.iter().map(|&x| f.mul(c, x)).collect(),
                w: add(&wit.w, &wit.v),
                u: add(&wit.u, &wit.v),
            };
            checked += 1;
            if model.p1_with(f, &pt.coords, &wit)? != model.p1_with(f, &pt.coords, &alt)? {
                bad += 1;
            }
        }
        if checked == 0 {
            return Ok(Outcome::skipped("no points off F_q enumerated"));
        }
        Ok(Outcome::holds(bad == 0, json!({ "points": checked, "failures": bad })))
    });

    // Zero sets of the pairing polynomials.
    let zero_set = |kk: u32, allowed: &[u32]| -> Outcome {
        let mut zero_degrees = std::collections::BTreeSet::new();
        let mut ok = true;
        let mut total = 0;
        for (set, pt) in all_points() {
            total += 1;
            let zero = model.pairing_poly(&set.field, &pt.coords, kk).is_zero();
            if zero {
                zero_degrees.insert(pt.degree);
            }
            ok &= zero == allowed.contains(&pt.degree);
        }
        Outcome::holds(ok && total > 0, json!({ "points": total, "zero_at_degrees": zero_degrees }))
    };
    rec.check("f1.identically_zero", Provenance::Identity, || {
        let bad = all_points().filter(|(s, p)| !model.pairing_poly(&s.field, &p.coords, 1).is_zero()).count();
        Ok(Outcome::holds(bad == 0 && !sets.is_empty(), json!({ "nonzero": bad })))
    });
    rec.check("f2.zero_exactly_at_fq", Provenance::Identity, || Ok(zero_set(2, &[1])));
    rec.check("f3.zero_exactly_at_fq_and_degree_4", Provenance::Identity, || Ok(zero_set(3, &[1, 4])));
    rec.check("pairing_with_fq_point.unique_zero", Provenance::Identity, || {
        let mut ok = true;
        let mut fq_points = 0;
        for set in &sets {
            let f = &set.field;
            for w0 in set.exact(1) {
                fq_points += 1;
                let zeros: Vec<_> =
                    set.points.iter().filter(|pt| sympl(f, &w0.coords[..4], &pt.coords[..4]).is_zero()).collect();
                ok &= zeros.len() == 1 && zeros[0].coords == w0.coords;
            }
        }
        Ok(Outcome::holds(ok && fq_points > 0, json!({ "fq_points_checked": fq_points })))
    });
    rec.check("p1_ratio.constant", Provenance::Identity, || {
        let mut consts = Vec::new();
        let mut points = 0;
        for set in sets.iter().filter(|s| s.n > 1) {
            let f = &set.field;
            let base = BaseLookup::new(f, s)?;
            let pairs: Vec<(Fe, Fe)> = set
                .points
                .iter()
                .filter(|pt| pt.degree > 1)
                .map(|pt| Ok((f.pow(model.p1(f, &pt.coords)?, q + 2 * q0 + 1), model.pairing_poly(f, &pt.coords, 2))))
                .collect::<Result<_>>()?;
            if pairs.is_empty() {
                continue;
            }
            points += pairs.len();
            let (c, constant) = crate::branch::ratio_constancy(f, &pairs)?;
            consts.push(if constant { base.get(c) } else { None });
        }
        if points == 0 {
            return Ok(Outcome::skipped("no points off F_q enumerated"));
        }
        let value = common(&consts).flatten();
        Ok(Outcome::holds(value.is_some(), json!({ "points": points, "constant_in_fq": value })))
    });
    rec.check("relation.pointwise", Provenance::Identity, || {
        // P4^e + P5 + c·P1^E = 0 wherever F2 and F3 are units.
        let mut vals = Vec::new();
        let mut points = 0;
        for set in &sets {
            let f = &set.field;
            let base = BaseLookup::new(f, s)?;
            for pt in set.points.iter().filter(|p| p.degree != 1 && p.degree != 4) {
                let t = model.relation(f, &pt.coords, false)?;
                let c = f.div(f.neg(t.base), t.kappa_term).ok_or(Error::NonUnit)?;
                points += 1;
                vals.push(base.get(c));
            }
        }
        if points == 0 {
            return Ok(Outcome::skipped("no points of degree other than 1 and 4 enumerated"));
        }
        let c = common(&vals).flatten();
        Ok(Outcome::holds(c.is_some(), json!({ "points": points, "c_in_fq": c })))
    });
    match find(5) {
        Some(set) => rec.check("chain.f2_f3_power_identity_degree_5", Provenance::Identity, || {
            let f = &set.field;
            let pts: Vec<_> = set.exact(5).collect();
            let bad = pts
                .iter()
                .filter(|pt| {
                    let f2 = model.pairing_poly(f, &pt.coords, 2);
                    let f3 = model.pairing_poly(f, &pt.coords, 3);
                    f.pow(f2, q.pow(3) + 1) != f.pow(f3, q * q + 1)
                })
                .count();
            Ok(Outcome::holds(!pts.is_empty() && bad == 0, json!({ "points": pts.len(), "failures": bad })))
        }),
        None => rec.check("chain.f2_f3_power_identity_degree_5", Provenance::Identity, || {
            Ok(Outcome::skipped("F_{q^5} points not enumerated"))
        }),
    };

    let sys = ctx.system()?.clone();
    let rational = find(1).cloned();
    if let Some(set) = &rational {
        let f = &set.field;
        let pts: Vec<_> = set.points.iter().collect();
        let ord = (q + 2 * q0 + 1) as usize;
        let bs = branches(&sys, f, &pts, (4 * ord + 8).max(64))?;
        residual_check(&mut rec, &model, f, &bs);
        rec.check("order.f2_at_fq", Provenance::Identity, || {
            Ok(all_orders(&orders(f, &bs, |r, w| Ok(model.pairing_poly(r, w, 2)))?, ord))
        });
        rec.check("order.p1_at_fq", Provenance::Identity, || {
            let out = all_orders(&orders(f, &bs, |r, w| model.p1(r, w))?, 1);
            Ok(if m == 0 { out.measured_only("m = 0") } else { out })
        });
    }
    tangent_check(&mut rec, &mut ctx, m > 0);
    certify(&mut rec, &model, &sys, rational.as_ref(), cfg);
    Ok(rec)
}

/// Properties of the square-root map ρ: V″ → V, on random vectors over F_{2^7}.
fn rho_checks(rec: &mut Recorder, rng: &mut ChaCha8Rng, k: usize) -> Result<()> {
    let f = Field::new(2, 7)?;
    let r = rho_matrix(&f);
    let rep = |i: usize| f.lift_vec(&vprime_rep(i));
    let rand_vec = |rng: &mut ChaCha8Rng, n: usize| (0..n).map(|_| f.random(rng)).collect::<Vec<Fe>>();
    let rho_of = |xi: &[Fe]| linalg::mat_vec(&f, &r, &xi.iter().map(|&x| f.frob(x, -1)).collect::<Vec<_>>());
    let vs: Vec<Vec<Fe>> = (0..k).map(|_| rand_vec(rng, 4)).collect();

    rec.check("rho.basis_images", Provenance::Identity, || {
        // ξ_i = (E0∧E1, E0∧F1, F0∧F1, E1∧F0) maps to (e0, e1, f0, f1).
        let xi = [(0, 1), (0, 3), (2, 3), (1, 2)];
        let ok_images = linalg::to_pmat(&f, &r).is_identity();
        let ok_pairing = xi.iter().enumerate().all(|(i, &(a, b))| {
            vs.iter().all(|v| f.pow(sympl(&f, &r.col(i), v), 2) == rho_pair(&f, &rep(a), &rep(b), v))
        });
        Ok(Outcome::holds(ok_images && ok_pairing, json!({ "images_are_basis": ok_images, "square_pairing": ok_pairing, "instances": vs.len() })))
    });
    rec.check("rho.omega_annihilates", Provenance::Identity, || {
        let omega = f.lift_vec(&OMEGA_LEX);
        let bad = vs
            .iter()
            .filter(|v| {
                let alpha = to_lambda2(&f, &rand_vec(&mut rng.clone(), 5));
                !rho_pair(&f, &omega, &alpha, v).is_zero()
            })
            .count();
        Ok(Outcome::holds(bad == 0, json!({ "instances": vs.len(), "failures": bad })))
    });
    rec.check("rho.pairing_symmetric", Provenance::Identity, || {
        // Enough to check α = a∧b, β = a∧c with b, c ⊥ a.
        let gram = Mat::from_fn(4, 4, |i, j| if (i + 2) % 4 == j { Fe::ONE } else { Fe::ZERO });
        let mut bad = 0;
        for _ in 0..k {
            let a = rand_vec(rng, 4);
            let perp = linalg::kernel(&f, &Mat::from_rows(&[linalg::mat_vec(&f, &gram, &a)]));
            let mut in_perp = || {
                let cs = rand_vec(rng, perp.len());
                (0..4).map(|i| perp.iter().zip(&cs).fold(Fe::ZERO, |acc, (p, &c)| f.add(acc, f.mul(c, p[i])))).collect::<Vec<_>>()
            };
            let (b, c) = (in_perp(), in_perp());
            let (alpha, beta) = (exterior::wedge(&f, &a, &b), exterior::wedge(&f, &a, &c));
            let (u, v) = (rand_vec(rng, 4), rand_vec(rng, 4));
            let lhs = sympl(&f, &exterior::contract(&f, &gram, &u, &alpha), &exterior::contract(&f, &gram, &v, &beta));
            let rhs = sympl(&f, &exterior::contract(&f, &gram, &v, &alpha), &exterior::contract(&f, &gram, &u, &beta));
            bad += usize::from(lhs != rhs);
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": k, "failures": bad })))
    });
    rec.check("rho.vanishing_element", Provenance::Identity, || {
        // E0E1·F0F1 + E0F1·E1F0 pairs to zero with every v.
        let bad = vs
            .iter()
            .filter(|v| f.add(rho_pair(&f, &rep(0), &rep(2), v), rho_pair(&f, &rep(1), &rep(3), v)) != Fe::ZERO)
            .count();
        Ok(Outcome::holds(bad == 0, json!({ "instances": vs.len(), "failures": bad })))
    });
    rec.check("rho.symplectic", Provenance::Identity, || {
        let mut bad = 0;
        for _ in 0..k {
            let (xi, eta) = (rand_vec(rng, 4), rand_vec(rng, 4));
            bad += usize::from(sympl(&f, &rho_of(&xi), &rho_of(&eta)) != f.frob(sympl(&f, &xi, &eta), -1));
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": k, "failures": bad })))
    });
    rec.check("rho.naturality", Provenance::Identity, || {
        let mut bad = 0;
        let trials = 20;
        for _ in 0..trials {
            let g = random_symplectic(&f, rng, 8);
            let gpp = prime_of(&f, &prime_of(&f, &g));
            let xi = rand_vec(rng, 4);
            bad += usize::from(rho_of(&linalg::mat_vec(&f, &gpp, &xi)) != linalg::mat_vec(&f, &g, &rho_of(&xi)));
        }
        Ok(Outcome::holds(bad == 0, json!({ "instances": trials, "failures": bad })))
    });
    Ok(())
}
