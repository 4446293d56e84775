//! Power-series branches of a curve at a point, vanishing orders and
//! certification of polynomial identities along a branch.
//!
//! The membership equations are compiled once into quadrics in Frobenius
//! atoms x_v^(p^s). Coefficients of the branch are then solved one order at
//! a time: at order n ≥ 1 the unknown coefficient enters only through
//! atoms with s = 0 (an atom with s > 0 moves it to order n·p^s), so each
//! step is a linear system with the fixed Jacobian J0 at the base point.

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::linalg::{self, Mat};
use crate::model::CurveModel;
use crate::series::{valuation, SeriesRing};
use crate::sym::{Atom, SymRing};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug)]
enum Term {
    Const,
    Lin(usize),
    Quad(usize),
}

/// Membership equations as sparse combinations of shared monomials.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    pub p: u32,
    pub nvars: usize,
    linear: Vec<Atom>,
    quads: Vec<(Atom, Atom)>,
    rows: Vec<Vec<(Term, u8)>>,
}

impl CompiledSystem {
    pub fn new<M: CurveModel>(model: &M) -> Result<Self> {
        let p = model.params().p;
        let sym = SymRing::new(p);
        let nvars = model.dim();
        let eqs = model.equations(&sym, &sym.vars(nvars));
        let mut lin_idx = BTreeMap::new();
        let mut quad_idx = BTreeMap::new();
        let mut rows = Vec::with_capacity(eqs.len());
        for e in &eqs {
            let mut row = Vec::with_capacity(e.terms.len());
            for (mono, &c) in &e.terms {
                let term = match mono.as_slice() {
                    [] => Term::Const,
                    [a] => {
                        let n = lin_idx.len();
                        Term::Lin(*lin_idx.entry(*a).or_insert(n))
                    }
                    [a, b] => {
                        let n = quad_idx.len();
                        Term::Quad(*quad_idx.entry((*a, *b)).or_insert(n))
                    }
                    _ => return Err(Error::Unsupported("membership equations of degree > 2".into())),
                };
                row.push((term, c));
            }
            rows.push(row);
        }
        let mut linear = vec![Atom { var: 0, frob: 0 }; lin_idx.len()];
        for (a, i) in lin_idx {
            linear[i] = a;
        }
        let mut quads = vec![(Atom { var: 0, frob: 0 }, Atom { var: 0, frob: 0 }); quad_idx.len()];
        for (a, i) in quad_idx {
            quads[i] = a;
        }
        Ok(CompiledSystem { p, nvars, linear, quads, rows })
    }

    pub fn num_equations(&self) -> usize {
        self.rows.len()
    }

    pub fn num_monomials(&self) -> usize {
        self.linear.len() + self.quads.len()
    }

    /// Jacobian in the atoms with s = 0, at `x`.
    pub fn jacobian(&self, f: &Field, x: &[Fe]) -> Mat<Fe> {
        let at0 = |a: Atom| f.frob(x[a.var as usize], a.frob as i64);
        let mut j = Mat::from_fn(self.rows.len(), self.nvars, |_, _| Fe::ZERO);
        for (r, row) in self.rows.iter().enumerate() {
            for &(term, c) in row {
                let c = f.from_int(c as i64);
                let mut add = |v: usize, val: Fe| {
                    let cur = *j.at(r, v);
                    j.set(r, v, f.add(cur, f.mul(c, val)));
                };
                match term {
                    Term::Const => {}
                    Term::Lin(i) => {
                        let a = self.linear[i];
                        if a.frob == 0 {
                            add(a.var as usize, Fe::ONE);
                        }
                    }
                    Term::Quad(i) => {
                        let (a, b) = self.quads[i];
                        if a.frob == 0 {
                            add(a.var as usize, at0(b));
                        }
                        if b.frob == 0 {
                            add(b.var as usize, at0(a));
                        }
                    }
                }
            }
        }
        j
    }

    pub fn evaluate(&self, f: &Field, x: &[Fe]) -> Vec<Fe> {
        let at0 = |a: Atom| f.frob(x[a.var as usize], a.frob as i64);
        self.rows
            .iter()
            .map(|row| {
                row.iter().fold(Fe::ZERO, |acc, &(term, c)| {
                    let v = match term {
                        Term::Const => Fe::ONE,
                        Term::Lin(i) => at0(self.linear[i]),
                        Term::Quad(i) => f.mul(at0(self.quads[i].0), at0(self.quads[i].1)),
                    };
                    f.add(acc, f.mul(f.from_int(c as i64), v))
                })
            })
            .collect()
    }
}

/// Tangent data at a point: dimension of ker J0 and of its image in
/// the tangent space of P(W) (quotient by the point itself).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tangent {
    pub kernel_dim: usize,
    pub projective_dim: usize,
}

pub fn tangent(sys: &CompiledSystem, f: &Field, x: &[Fe]) -> Tangent {
    let j = sys.jacobian(f, x);
    let ker = linalg::kernel(f, &j);
    let with_point = {
        let mut rows = ker.clone();
        rows.push(x.to_vec());
        linalg::rank(f, &Mat::from_rows(&rows))
    };
    // dim (ker + ⟨x⟩)/⟨x⟩
    Tangent { kernel_dim: ker.len(), projective_dim: with_point - 1 }
}

/// Power-series branch ω(t) with ω(0) the base point, mod t^len.
#[derive(Clone, Debug)]
pub struct SeriesBranch {
    pub base: Vec<Fe>,
    pub len: usize,
    /// Per-coordinate coefficient vectors.
    pub coords: Vec<Vec<Fe>>,
    /// Coordinate normalized to 1.
    pub fixed: usize,
    /// Coordinate used as local parameter: ω_π(t) = ω_π(0) + t.
    pub parameter: usize,
    pub tangent: Tangent,
}

impl SeriesBranch {
    pub fn series<'a>(&self, ring: &SeriesRing<'a>) -> Vec<Vec<Fe>> {
        self.coords.iter().map(|c| ring.from_coeffs(c)).collect()
    }
}

/// Row-reduction of a fixed matrix, reused for many right-hand sides.
struct Solver {
    /// E with E·A in reduced echelon form.
    e: Mat<Fe>,
    pivots: Vec<usize>,
    cols: usize,
}

impl Solver {
    fn new(f: &Field, a: &Mat<Fe>) -> Self {
        let n = a.rows;
        let mut aug = Mat::from_fn(n, a.cols + n, |i, j| {
            if j < a.cols {
                *a.at(i, j)
            } else if j - a.cols == i {
                Fe::ONE
            } else {
                Fe::ZERO
            }
        });
        let all = linalg::rref(f, &mut aug);
        let pivots: Vec<usize> = all.into_iter().filter(|&c| c < a.cols).collect();
        let e = Mat::from_fn(n, n, |i, j| *aug.at(i, a.cols + j));
        Solver { e, pivots, cols: a.cols }
    }

    /// A solution with free variables zero, or `None` if inconsistent.
    fn solve(&self, f: &Field, b: &[Fe]) -> Option<Vec<Fe>> {
        let y = linalg::mat_vec(f, &self.e, b);
        if y[self.pivots.len()..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut x = vec![Fe::ZERO; self.cols];
        for (i, &pc) in self.pivots.iter().enumerate() {
            x[pc] = y[i];
        }
        Some(x)
    }
}

const PARALLEL_FROM: usize = 512;

/// Expand the branch through `point` to `len` coefficients.
///
/// With a one-dimensional tangent the expansion is unique given the
/// parameter; otherwise a particular solution is taken at each order (free
/// coordinates zero), and an inconsistent order is reported as an error.
pub fn branch_expand(sys: &CompiledSystem, f: &Field, point: &[Fe], len: usize) -> Result<SeriesBranch> {
    let k = sys.nvars;
    let base = linalg::normalize(f, point).ok_or(Error::NotOnCurve)?;
    if sys.evaluate(f, &base).iter().any(|c| !c.is_zero()) {
        return Err(Error::NotOnCurve);
    }
    let fixed = base.iter().position(|c| !c.is_zero()).unwrap();
    let tangent = tangent(sys, f, &base);
    let j0 = sys.jacobian(f, &base);

    // Order 1: a kernel vector of J0 with zero in the fixed coordinate.
    let mut constrained = j0.row_vecs();
    let mut unit = vec![Fe::ZERO; k];
    unit[fixed] = Fe::ONE;
    constrained.push(unit);
    let ker = linalg::kernel(f, &Mat::from_rows(&constrained));
    let Some(dir) = ker.first() else {
        return Err(Error::Singular(0));
    };
    let parameter = dir.iter().position(|c| !c.is_zero()).unwrap();
    let dir = linalg::normalize(f, dir).unwrap();

    // Later orders: the unknowns are all coordinates but `fixed` and `parameter`.
    let free: Vec<usize> = (0..k).filter(|&v| v != fixed && v != parameter).collect();
    let reduced = Mat::from_fn(j0.rows, free.len(), |i, j| *j0.at(i, free[j]));
    let solver = Solver::new(f, &reduced);

    let mut coords: Vec<Vec<Fe>> = (0..k).map(|v| {
        let mut c = vec![Fe::ZERO; len];
        c[0] = base[v];
        if len > 1 {
            c[1] = dir[v];
        }
        c
    }).collect();

    let p = sys.p as usize;
    let step = |s: u16| p.checked_pow(s as u32).unwrap_or(usize::MAX);
    for n in 2..len {
        let coeff = |a: Atom, i: usize, coords: &Vec<Vec<Fe>>| -> Fe {
            if a.frob == 0 {
                return coords[a.var as usize][i];
            }
            let st = step(a.frob);
            if i % st != 0 {
                return Fe::ZERO;
            }
            f.frob(coords[a.var as usize][i / st], a.frob as i64)
        };
        // Known part of [t^n] for each monomial.
        let quad_val = |&(a, b): &(Atom, Atom)| -> Fe {
            let mut acc = Fe::ZERO;
            if a.frob == 0 && b.frob == 0 {
                let (ca, cb) = (&coords[a.var as usize], &coords[b.var as usize]);
                for i in 1..n {
                    let (x, y) = (ca[i], cb[n - i]);
                    if !x.is_zero() && !y.is_zero() {
                        acc = f.add(acc, f.mul(x, y));
                    }
                }
                return acc;
            }
            // Walk the sparse factor.
            let (sp, other) = if a.frob != 0 { (a, b) } else { (b, a) };
            let st = step(sp.frob);
            // The only unknown is the other factor at order n when it has s = 0.
            let mut i = if other.frob == 0 { st } else { 0 };
            while i <= n {
                let x = coeff(sp, i, &coords);
                if !x.is_zero() {
                    acc = f.add(acc, f.mul(x, coeff(other, n - i, &coords)));
                }
                match i.checked_add(st) {
                    Some(next) => i = next,
                    None => break,
                }
            }
            acc
        };
        let quad_vals: Vec<Fe> = if n >= PARALLEL_FROM {
            sys.quads.par_iter().map(quad_val).collect()
        } else {
            sys.quads.iter().map(quad_val).collect()
        };
        let rhs: Vec<Fe> = sys
            .rows
            .iter()
            .map(|row| {
                let mut acc = Fe::ZERO;
                for &(term, c) in row {
                    let v = match term {
                        Term::Const => Fe::ZERO,
                        Term::Lin(i) => {
                            let a = sys.linear[i];
                            if a.frob == 0 { Fe::ZERO } else { coeff(a, n, &coords) }
                        }
                        Term::Quad(i) => quad_vals[i],
                    };
                    acc = f.add(acc, f.mul(f.from_int(c as i64), v));
                }
                f.neg(acc)
            })
            .collect();
        let delta = solver.solve(f, &rhs).ok_or_else(|| Error::Expansion {
            order: n,
            reason: "linearized system is inconsistent".into(),
        })?;
        for (j, &v) in free.iter().enumerate() {
            coords[v][n] = delta[j];
        }
    }
    Ok(SeriesBranch { base, len, coords, fixed, parameter, tangent })
}

/// t-adic valuation of a series, or a lower bound when it vanishes to
/// the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Order {
    Exact(usize),
    AtLeast(usize),
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Exact(n) => write!(f, "{n}"),
            Order::AtLeast(n) => write!(f, ">= {n}"),
        }
    }
}

pub fn order_of(s: &[Fe]) -> Order {
    match valuation(s) {
        Some(v) => Order::Exact(v),
        None => Order::AtLeast(s.len()),
    }
}

/// Order of vanishing of `eval` along the branch.
pub fn vanishing_order<F>(f: &Field, branch: &SeriesBranch, eval: F) -> Result<Order>
where
    F: for<'a> Fn(&SeriesRing<'a>, &[Vec<Fe>]) -> Result<Vec<Fe>>,
{
    let ring = SeriesRing::new(f, branch.len);
    let s = eval(&ring, &branch.series(&ring))?;
    Ok(order_of(&s))
}

/// Outcome of expanding `base + κ·kappa_term` along a branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    /// Number of coefficients checked.
    pub order: usize,
    pub relation_degree: u64,
    pub curve_degree: u64,
    pub kappa: Option<Fe>,
    pub holds: bool,
    /// Order of the first coefficient that failed, if any.
    pub failure: Option<usize>,
}

/// Least branch length certifying a degree-`d_r` identity on a curve of
/// degree `deg_c`: the expansion must vanish beyond d_r·deg_c.
pub fn certification_length(d_r: u64, deg_c: u64) -> usize {
    (d_r * deg_c + 2) as usize
}

/// Solve for κ and check `base + κ·kappa_term ≡ 0` to the branch precision.
pub fn certify_terms(f: &Field, base: &[Fe], kappa_term: &[Fe]) -> (Option<Fe>, Option<usize>) {
    let Some(v) = valuation(kappa_term) else {
        return (None, valuation(base));
    };
    if let Some(b) = valuation(base) {
        if b < v {
            return (None, Some(b));
        }
    }
    let kappa = f.neg(f.div(base[v], kappa_term[v]).unwrap());
    let bad = (0..base.len()).find(|&i| !f.add(base[i], f.mul(kappa, kappa_term[i])).is_zero());
    (Some(kappa), bad)
}

/// Certify the cleared relation of `model` along a branch at an F_q-point.
pub fn certify_relation<M: CurveModel>(model: &M, f: &Field, branch: &SeriesBranch) -> Result<Certification> {
    let d_r = model.relation_degree();
    let deg_c = model.params().curve_degree();
    let need = certification_length(d_r, deg_c);
    if branch.len < need {
        return Err(Error::Expansion {
            order: branch.len,
            reason: format!("certification needs {need} coefficients (D_R = {d_r}, deg C = {deg_c})"),
        });
    }
    let ring = SeriesRing::new(f, branch.len);
    let terms = model.relation(&ring, &branch.series(&ring), true)?;
    let (kappa, failure) = certify_terms(f, &terms.base, &terms.kappa_term);
    Ok(Certification {
        order: branch.len,
        relation_degree: d_r,
        curve_degree: deg_c,
        kappa,
        holds: kappa.is_some() && failure.is_none(),
        failure,
    })
}

/// The common value of f/g over a list of (f, g) pairs, and whether it is
/// constant.
pub fn ratio_constancy(f: &Field, values: &[(Fe, Fe)]) -> Result<(Fe, bool)> {
    let (&(a0, b0), rest) = values.split_first().ok_or_else(|| Error::Config("empty point list".into()))?;
    let c = f.div(a0, b0).ok_or(Error::NonUnit)?;
    let constant = rest.iter().all(|&(a, b)| !b.is_zero() && f.div(a, b) == Some(c));
    Ok((c, constant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate;
    use crate::hermitian::HermitianModel;
    use crate::ring::Dual;
    use crate::suzuki::SuzukiModel;

    #[test]
    fn jacobian_matches_dual_numbers() {
        let m = SuzukiModel::new(1).unwrap();
        let sys = CompiledSystem::new(&m).unwrap();
        let f = Field::new(2, 3).unwrap();
        let pts = enumerate::ambient_scan(&m, 1, u128::MAX).unwrap();
        let x = &pts.points[3].coords;
        let j = sys.jacobian(&f, x);
        let d = Dual::new(&f);
        for v in 0..5 {
            let w: Vec<(Fe, Fe)> = (0..5).map(|i| (x[i], if i == v { Fe::ONE } else { Fe::ZERO })).collect();
            let col: Vec<Fe> = m.equations(&d, &w).into_iter().map(|e| e.1).collect();
            assert_eq!(col, j.col(v));
        }
        assert_eq!(sys.evaluate(&f, x), m.equations(&f, x));
    }

    #[test]
    fn hermitian_branch_residual() {
        let m = HermitianModel::new(2, 1).unwrap();
        let sys = CompiledSystem::new(&m).unwrap();
        let pts = enumerate::ambient_scan(&m, 1, u128::MAX).unwrap();
        let f = &pts.field;
        for p in &pts.points {
            let b = branch_expand(&sys, f, &p.coords, 64).unwrap();
            assert_eq!(b.tangent.projective_dim, 1);
            let ring = SeriesRing::new(f, 64);
            let s = b.series(&ring);
            for e in m.equations(&ring, &s) {
                assert!(e.iter().all(|c| c.is_zero()));
            }
            assert!(b.coords.iter().any(|c| !c[1].is_zero()));
            // F_q-rational coefficients
            assert!(b.coords.iter().all(|c| c.iter().all(|&x| f.in_subfield(x, 2))));
        }
    }

    #[test]
    fn kappa_solve() {
        let f = Field::new(2, 2).unwrap();
        let g = f.from_dense(2);
        let k = vec![Fe::ZERO, Fe::ONE, g];
        let b: Vec<Fe> = k.iter().map(|&x| f.mul(x, g)).collect();
        let (kappa, bad) = certify_terms(&f, &b, &k);
        assert_eq!(kappa, Some(g));
        assert_eq!(bad, None);
    }

    #[test]
    fn ratio_of_equal_values_is_one() {
        let f = Field::new(3, 2).unwrap();
        let v: Vec<(Fe, Fe)> = f.nonzero().map(|x| (x, x)).collect();
        assert_eq!(ratio_constancy(&f, &v).unwrap(), (Fe::ONE, true));
        assert!(ratio_constancy(&f, &[]).is_err());
    }
}
