use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exterior::AffineMap;
use crate::linalg;
use crate::manifold::{map_descends, CoordConstraint, CoordRegion, ManifoldModel, DEFAULT_SEARCH_BOUND};
use crate::poly::{PolyScalar, Var};
use crate::rational::Rational;

use super::{Certificate, DisplacementVerdict, Polyhedron};

/// Ranges wider than this are clipped to the search window.
const ENUMERATION_CAP: i64 = 10_000;

/// Decides whether `φ(R) ∩ R = ∅` in the quotient, i.e. whether
/// `φ(p) = g(q)` has a solution with `p, q ∈ R` and `g` a deck element.
/// Integer exponents left unconstrained by the exact elimination are searched
/// in `[−bound, bound]`; if that window is exhausted the verdict is
/// inconclusive.
pub fn quotient_disjoint(
    phi: &AffineMap,
    region: &CoordRegion,
    model: &ManifoldModel,
    bound: i64,
) -> Result<DisplacementVerdict> {
    let n = model.dim();
    if phi.dim() != n || region.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: phi.dim().max(region.dim()) });
    }
    if !map_descends(phi, model, DEFAULT_SEARCH_BOUND.max(bound))?.is_yes() {
        return Err(Error::Precondition("map does not descend to the quotient".into()));
    }
    let word = model.symbolic_deck_element()?;
    let p: Vec<PolyScalar> = (0..n).map(PolyScalar::coord).collect();
    let qv: Vec<PolyScalar> = (n..2 * n).map(PolyScalar::coord).collect();
    let gq = word.apply(&qv);
    let mut fixed: BTreeMap<Var, PolyScalar> = BTreeMap::new();
    let mut ineqs = Vec::new();
    for (i, c) in region.constraints().iter().enumerate() {
        match c {
            CoordConstraint::Free => {}
            CoordConstraint::Fixed(v) => {
                fixed.insert(Var::Coord(i), PolyScalar::constant(v.clone()));
                fixed.insert(Var::Coord(n + i), PolyScalar::constant(v.clone()));
            }
            CoordConstraint::Band { center, radius } => {
                for x in [&p[i], &qv[i]] {
                    let shifted = x - &PolyScalar::constant(center.clone());
                    ineqs.push(Ineq { expr: &shifted - &PolyScalar::constant(radius.clone()), strict: true });
                    ineqs.push(Ineq { expr: -&shifted - PolyScalar::constant(radius.clone()), strict: true });
                }
            }
        }
    }
    let eqs: Vec<PolyScalar> = (0..n)
        .map(|i| {
            let mut lhs = PolyScalar::constant(phi.translation()[i].clone());
            for j in 0..n {
                lhs += &p[j].scale(&phi.linear()[i][j]);
            }
            (&lhs - &gq[i]).substitute(&fixed)
        })
        .collect();

    let mut search = Search { bound, fresh: n };
    match search.solve(eqs, ineqs)? {
        Found::Yes(values) => {
            let value = |v: Var| -> Rational {
                if let Some(c) = fixed.get(&v) {
                    return c.constant_term();
                }
                values.get(&v).cloned().unwrap_or_else(Rational::zero)
            };
            let pp: Vec<Rational> = (0..n).map(|i| value(Var::Coord(i))).collect();
            let qq: Vec<Rational> = (n..2 * n).map(|i| value(Var::Coord(i))).collect();
            let word: Vec<BigInt> = (0..n).map(|j| value(Var::Lattice(j)).to_integer()).collect();
            let exps: Vec<i64> = word
                .iter()
                .map(|w| w.to_i64().ok_or_else(|| Error::Internal("deck exponent overflow".into())))
                .collect::<Result<_>>()?;
            let g = model.deck_element(&exps)?;
            if phi.apply(&pp) != g.apply(&qq) || !region.contains(&pp) || !region.contains(&qq) {
                return Err(Error::Internal("quotient witness failed re-check".into()));
            }
            Ok(DisplacementVerdict::intersects(Certificate::QuotientWitness { p: pp, q: qq, word }))
        }
        Found::No(reason) => Ok(DisplacementVerdict::disjoint(Certificate::Obstruction { reason })),
        Found::Unknown(detail) => Ok(DisplacementVerdict::inconclusive("integer search", detail)),
    }
}

/// `expr < 0` or `expr ≤ 0`.
#[derive(Clone, Debug)]
struct Ineq {
    expr: PolyScalar,
    strict: bool,
}

enum Found {
    Yes(BTreeMap<Var, Rational>),
    No(String),
    Unknown(String),
}

struct Search {
    bound: i64,
    /// Next unused lattice index for integer parameters.
    fresh: usize,
}

fn is_real(v: &Var) -> bool {
    matches!(v, Var::Coord(_))
}

fn is_unknown(v: &Var) -> bool {
    matches!(v, Var::Coord(_) | Var::Lattice(_))
}

fn split_linear(expr: &PolyScalar, pred: impl Fn(&Var) -> bool) -> Result<Option<(BTreeMap<Var, Rational>, Rational)>> {
    let Some((coeffs, rest)) = expr.linear_split(&pred) else { return Ok(None) };
    let mut out = BTreeMap::new();
    for (v, c) in coeffs {
        match c.as_constant() {
            Some(c) => {
                out.insert(v, c);
            }
            None => return Ok(None),
        }
    }
    match rest.as_constant() {
        Some(r) => Ok(Some((out, r))),
        None if rest.depends_on(|v| matches!(v, Var::Param(_) | Var::Time)) => {
            Err(Error::NotAffine(format!("symbolic term in coincidence system: {rest:?}")))
        }
        None => Ok(None),
    }
}

/// Builds a polyhedron over `vars` from linear equalities and inequalities.
fn polyhedron(vars: &[Var], eqs: &[PolyScalar], ineqs: &[Ineq]) -> Result<Polyhedron> {
    let index: BTreeMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let row = |expr: &PolyScalar| -> Result<(Vec<Rational>, Rational)> {
        let (coeffs, rest) = split_linear(expr, |v| index.contains_key(v))?
            .ok_or_else(|| Error::Internal("nonlinear constraint in polyhedron".into()))?;
        let mut a = vec![Rational::zero(); vars.len()];
        for (v, c) in coeffs {
            a[index[&v]] = c;
        }
        Ok((a, -rest))
    };
    let mut poly = Polyhedron::universe(vars.len());
    for e in eqs {
        let (a, r) = row(e)?;
        poly.add(super::Constraint::new(a.clone(), r.clone(), false))?;
        poly.add(super::Constraint::new(a.iter().map(|x| -x).collect(), -r, false))?;
    }
    for ineq in ineqs {
        let (a, r) = row(&ineq.expr)?;
        poly.add(super::Constraint::new(a, r, ineq.strict))?;
    }
    Ok(poly)
}

fn vars_of(eqs: &[PolyScalar], ineqs: &[Ineq]) -> Vec<Var> {
    let mut set = BTreeSet::new();
    for e in eqs.iter().chain(ineqs.iter().map(|i| &i.expr)) {
        set.extend(e.vars().into_iter().filter(is_unknown));
    }
    set.into_iter().collect()
}

/// Integer candidates of a coordinate range, smallest magnitude first, and
/// whether the list covers the whole range.
fn candidates(poly: &Polyhedron, j: usize, bound: i64) -> (Vec<BigInt>, bool) {
    if poly.constraints().iter().all(|c| c.coeffs[j].is_zero()) {
        return (vec![BigInt::zero()], true);
    }
    let r = poly.coordinate_range(j);
    let lo = r.lower.map(|b| {
        if b.strict {
            b.value.floor().to_integer() + 1
        } else {
            b.value.ceil().to_integer()
        }
    });
    let hi = r.upper.map(|b| {
        if b.strict {
            b.value.ceil().to_integer() - 1
        } else {
            b.value.floor().to_integer()
        }
    });
    match (lo, hi) {
        (Some(l), Some(h)) if &h - &l < BigInt::from(ENUMERATION_CAP) => (sorted_range(l, h), true),
        (l, h) => (window(l, h, bound), false),
    }
}

/// `[lo, hi] ∩ [−bound, bound]`, smallest magnitude first.
fn window(lo: Option<BigInt>, hi: Option<BigInt>, bound: i64) -> Vec<BigInt> {
    let from = lo.map_or(BigInt::from(-bound), |l| l.max(BigInt::from(-bound)));
    let to = hi.map_or(BigInt::from(bound), |h| h.min(BigInt::from(bound)));
    sorted_range(from, to)
}

fn sorted_range(from: BigInt, to: BigInt) -> Vec<BigInt> {
    let mut values = Vec::new();
    let mut v = from;
    while v <= to {
        values.push(v.clone());
        v += 1;
    }
    values.sort_by(|a, b| (a.magnitude(), a.sign()).cmp(&(b.magnitude(), b.sign())));
    values
}

fn integer_point(poly: &Polyhedron, j: usize, bound: i64) -> (Option<Vec<BigInt>>, bool) {
    if poly.is_trivially_empty() {
        return (None, true);
    }
    if j == poly.dim() {
        return if poly.is_empty() { (None, true) } else { (Some(Vec::new()), true) };
    }
    let (values, mut complete) = candidates(poly, j, bound);
    for v in values {
        let r = Rational::from_integer(v.clone());
        let fixed = poly.clone().with_interval(j, r.clone(), r, false);
        let (found, sub_complete) = integer_point(&fixed, j + 1, bound);
        if let Some(mut rest) = found {
            rest.insert(0, v);
            return (Some(rest), true);
        }
        complete &= sub_complete;
    }
    (None, complete)
}

impl Search {
    fn solve(&mut self, eqs: Vec<PolyScalar>, ineqs: Vec<Ineq>) -> Result<Found> {
        let mut linear = Vec::new();
        let mut nonlinear = Vec::new();
        for e in eqs {
            if split_linear(&e, is_unknown)?.is_some() {
                linear.push(e);
            } else {
                nonlinear.push(e);
            }
        }
        if nonlinear.is_empty() {
            return self.solve_linear(linear, ineqs);
        }
        // dropping the nonlinear equations gives an exact relaxation
        if let Found::No(reason) = self.solve_linear(linear.clone(), ineqs.clone())? {
            return Ok(Found::No(reason));
        }
        let mut branch: BTreeSet<Var> = BTreeSet::new();
        for e in &nonlinear {
            for (m, _) in e.terms() {
                if m.degree_where(is_unknown) >= 2 {
                    branch.extend(m.factors().iter().map(|(v, _)| v.clone()).filter(|v| matches!(v, Var::Lattice(_))));
                }
            }
        }
        if branch.is_empty() {
            return Ok(Found::Unknown("nonlinear coincidence system without integer factors".into()));
        }
        let vars = vars_of(&linear, &ineqs);
        let relaxed = polyhedron(&vars, &linear, &ineqs)?;
        if relaxed.is_empty() {
            return Ok(Found::No("linear part of the coincidence system is infeasible".into()));
        }
        let mut best: Option<(Var, Vec<BigInt>, bool)> = None;
        for v in branch {
            let (values, complete) = match vars.iter().position(|w| *w == v) {
                Some(j) => candidates(&relaxed, j, self.bound),
                None => (window(None, None, self.bound), false),
            };
            let better = match &best {
                None => true,
                Some((_, bv, bc)) => (complete && !bc) || (complete == *bc && values.len() < bv.len()),
            };
            if better {
                best = Some((v, values, complete));
            }
        }
        let (v, values, complete) = best.expect("nonempty branch set");
        let mut unknown = !complete;
        for value in &values {
            let c = PolyScalar::constant(Rational::from_integer(value.clone()));
            let sub_eqs = linear.iter().chain(&nonlinear).map(|e| e.substitute_var(&v, &c)).collect();
            let sub_ineqs = ineqs
                .iter()
                .map(|i| Ineq { expr: i.expr.substitute_var(&v, &c), strict: i.strict })
                .collect();
            match self.solve(sub_eqs, sub_ineqs)? {
                Found::Yes(mut vals) => {
                    vals.insert(v, Rational::from_integer(value.clone()));
                    return Ok(Found::Yes(vals));
                }
                Found::No(_) => {}
                Found::Unknown(_) => unknown = true,
            }
        }
        let name = crate::poly::default_var_name(&v);
        if unknown {
            Ok(Found::Unknown(format!("branching on {name} did not resolve within |{name}| <= {}", self.bound)))
        } else {
            Ok(Found::No(format!("no admissible value of {name} among {} candidates", values.len())))
        }
    }

    fn solve_linear(&mut self, eqs: Vec<PolyScalar>, ineqs: Vec<Ineq>) -> Result<Found> {
        let mut pivots: Vec<(Var, PolyScalar)> = Vec::new();
        let mut int_eqs: Vec<PolyScalar> = Vec::new();
        for e in eqs {
            let mut e = e;
            for (v, expr) in &pivots {
                e = e.substitute_var(v, expr);
            }
            if e.is_zero() {
                continue;
            }
            let (coeffs, rest) = split_linear(&e, is_unknown)?
                .ok_or_else(|| Error::Internal("linear equation became nonlinear".into()))?;
            if coeffs.is_empty() {
                return Ok(Found::No(format!("equation reduces to {} = 0", crate::rational::format_rational(&rest))));
            }
            match coeffs.iter().find(|(v, _)| is_real(v)) {
                Some((v, c)) => {
                    let solved = (&e - &PolyScalar::var(v.clone()).scale(c)).scale(&(-c.recip()));
                    pivots.push((v.clone(), solved));
                }
                None => int_eqs.push(e),
            }
        }
        let mut ineqs = ineqs;
        for (v, expr) in &pivots {
            for i in ineqs.iter_mut() {
                i.expr = i.expr.substitute_var(v, expr);
            }
            for e in int_eqs.iter_mut() {
                *e = e.substitute_var(v, expr);
            }
        }

        // integer equations: e = e0 + K z
        let int_vars: Vec<Var> = {
            let mut set: BTreeSet<Var> = BTreeSet::new();
            for e in &int_eqs {
                set.extend(e.vars().into_iter().filter(|v| matches!(v, Var::Lattice(_))));
            }
            set.into_iter().collect()
        };
        let mut param: Vec<(Var, PolyScalar)> = Vec::new();
        if !int_eqs.is_empty() {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for e in &int_eqs {
                let (coeffs, rest) = split_linear(e, is_unknown)?
                    .ok_or_else(|| Error::Internal("integer equation is nonlinear".into()))?;
                a.push(int_vars.iter().map(|v| coeffs.get(v).cloned().unwrap_or_else(Rational::zero)).collect());
                b.push(-rest);
            }
            let Some((x0, kernel)) = linalg::solve_integer(&a, &b, int_vars.len()) else {
                let shown: Vec<String> = int_eqs
                    .iter()
                    .map(|e| format!("{} = 0", e.fmt_with(&crate::poly::default_var_name)))
                    .collect();
                return Ok(Found::No(format!("no integer solution of {}", shown.join(", "))));
            };
            let zs: Vec<PolyScalar> = kernel
                .iter()
                .map(|_| {
                    let z = PolyScalar::var(Var::Lattice(self.fresh));
                    self.fresh += 1;
                    z
                })
                .collect();
            for (i, v) in int_vars.iter().enumerate() {
                let mut expr = PolyScalar::constant(Rational::from_integer(x0[i].clone()));
                for (k, z) in kernel.iter().zip(&zs) {
                    expr += &z.scale(&Rational::from_integer(k[i].clone()));
                }
                param.push((v.clone(), expr));
            }
            for (v, expr) in &param {
                for i in ineqs.iter_mut() {
                    i.expr = i.expr.substitute_var(v, expr);
                }
            }
        }

        let vars = vars_of(&[], &ineqs);
        let reals: Vec<usize> = (0..vars.len()).filter(|&i| is_real(&vars[i])).collect();
        let ints: Vec<usize> = (0..vars.len()).filter(|&i| !is_real(&vars[i])).collect();
        let full = polyhedron(&vars, &[], &ineqs)?;
        let int_vars_z: Vec<Var> = ints.iter().map(|&i| vars[i].clone()).collect();
        let projected = full.eliminate(&reals);
        // restrict to the integer coordinates
        let int_only = Polyhedron::from_constraints(
            ints.len(),
            projected.constraints().into_iter().map(|c| {
                super::Constraint::new(ints.iter().map(|&i| c.coeffs[i].clone()).collect(), c.rhs, c.strict)
            }),
        )?;
        let (point, complete) = integer_point(&int_only, 0, self.bound);
        let Some(z) = point else {
            return Ok(if complete {
                Found::No("the real elimination leaves no integer point".into())
            } else {
                Found::Unknown(format!("no integer point with entries in [-{0}, {0}]", self.bound))
            });
        };

        let mut values: BTreeMap<Var, Rational> = BTreeMap::new();
        let mut assign: BTreeMap<Var, PolyScalar> = BTreeMap::new();
        for (v, zi) in int_vars_z.iter().zip(&z) {
            let r = Rational::from_integer(zi.clone());
            values.insert(v.clone(), r.clone());
            assign.insert(v.clone(), PolyScalar::constant(r));
        }
        let real_vars: Vec<Var> = reals.iter().map(|&i| vars[i].clone()).collect();
        let fixed_ineqs: Vec<Ineq> = ineqs
            .iter()
            .map(|i| Ineq { expr: i.expr.substitute(&assign), strict: i.strict })
            .collect();
        let real_poly = polyhedron(&real_vars, &[], &fixed_ineqs)?;
        let x = real_poly
            .feasible_point()
            .ok_or_else(|| Error::Internal("projection feasible but fibre empty".into()))?;
        for (v, xi) in real_vars.iter().zip(x) {
            values.insert(v.clone(), xi);
        }
        let eval = |expr: &PolyScalar, values: &BTreeMap<Var, Rational>| -> Result<Rational> {
            let map: BTreeMap<Var, PolyScalar> = expr
                .vars()
                .into_iter()
                .map(|v| {
                    let val = values.get(&v).cloned().unwrap_or_else(Rational::zero);
                    (v, PolyScalar::constant(val))
                })
                .collect();
            expr.substitute(&map)
                .as_constant()
                .ok_or_else(|| Error::Internal("unresolved variable in back-substitution".into()))
        };
        for (v, expr) in &param {
            let r = eval(expr, &values)?;
            if !r.is_integer() {
                return Err(Error::Internal("integer parametrization gave a fraction".into()));
            }
            values.insert(v.clone(), r);
        }
        for (v, expr) in pivots.iter().rev() {
            let r = eval(expr, &values)?;
            values.insert(v.clone(), r);
        }
        Ok(Found::Yes(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displacement::Outcome;
    use crate::flux::phi_abc;
    use crate::manifold::{kodaira_thurston, torus4};
    use crate::rational::{frac, q};

    fn kt_region(fixed: &[(usize, Rational)]) -> CoordRegion {
        CoordRegion::fixing(4, fixed).unwrap()
    }

    #[test]
    fn t_shift_by_half_is_disjoint() {
        let m = kodaira_thurston();
        let r = kt_region(&[(1, q(0)), (3, q(0))]);
        let v = quotient_disjoint(&phi_abc(&frac(1, 2), &q(0), &q(0)), &r, &m, 8).unwrap();
        assert_eq!(v.outcome, Outcome::Disjoint);
    }

    #[test]
    fn x_shift_by_half_is_disjoint_after_branching() {
        let m = kodaira_thurston();
        let r = kt_region(&[(0, q(0)), (2, q(0))]);
        let v = quotient_disjoint(&phi_abc(&q(0), &frac(1, 2), &q(0)), &r, &m, 8).unwrap();
        assert_eq!(v.outcome, Outcome::Disjoint, "{v:?}");
    }

    #[test]
    fn s_shift_by_half_is_disjoint() {
        let m = kodaira_thurston();
        let r = kt_region(&[(0, q(0)), (2, q(0))]);
        let v = quotient_disjoint(&phi_abc(&q(0), &q(0), &frac(1, 2)), &r, &m, 8).unwrap();
        assert_eq!(v.outcome, Outcome::Disjoint);
    }

    #[test]
    fn identity_intersects_with_checked_witness() {
        let m = kodaira_thurston();
        let r = kt_region(&[(0, q(0)), (2, q(0))]);
        let v = quotient_disjoint(&AffineMap::identity(4), &r, &m, 8).unwrap();
        assert_eq!(v.outcome, Outcome::Intersects);
        let Certificate::QuotientWitness { p, q: qq, word } = v.certificate else { panic!() };
        assert!(r.contains(&p) && r.contains(&qq));
        assert_eq!(word.len(), 4);
    }

    #[test]
    fn integer_x_shift_intersects() {
        let m = kodaira_thurston();
        let r = kt_region(&[(0, q(0)), (2, q(0))]);
        let v = quotient_disjoint(&phi_abc(&q(0), &q(1), &q(0)), &r, &m, 8).unwrap();
        assert_eq!(v.outcome, Outcome::Intersects);
    }

    fn torus_band(radius: Rational) -> CoordRegion {
        CoordRegion::new(vec![
            CoordConstraint::Band { center: q(0), radius },
            CoordConstraint::Free,
            CoordConstraint::Free,
            CoordConstraint::Free,
        ])
        .unwrap()
    }

    #[test]
    fn torus_band_displacement() {
        let m = torus4();
        let shift = AffineMap::translation_by(vec![frac(1, 2), q(0), q(0), q(0)]);
        let narrow = quotient_disjoint(&shift, &torus_band(frac(1, 8)), &m, 8).unwrap();
        assert_eq!(narrow.outcome, Outcome::Disjoint);
        let wide = quotient_disjoint(&shift, &torus_band(frac(3, 8)), &m, 8).unwrap();
        assert_eq!(wide.outcome, Outcome::Intersects);
    }

    #[test]
    fn t_band_is_disjoint_without_bounding_the_shear() {
        let m = kodaira_thurston();
        let r = CoordRegion::new(vec![
            CoordConstraint::Free,
            CoordConstraint::Band { center: q(0), radius: frac(1, 8) },
            CoordConstraint::Free,
            CoordConstraint::Free,
        ])
        .unwrap();
        let phi = crate::flux::phi_abc_linear(&q(1), &q(2), &frac(1, 2), &frac(1, 3), &frac(1, 5));
        let v = quotient_disjoint(&phi, &r, &m, 8).unwrap();
        assert_eq!(v.outcome, Outcome::Disjoint, "{v:?}");
    }

    #[test]
    fn non_descending_map_is_refused() {
        let m = kodaira_thurston();
        let mut lin = linalg::identity(4);
        lin[2][3] = frac(1, 2);
        let half_shear = AffineMap::new(lin, vec![q(0); 4]).unwrap();
        let r = kt_region(&[(0, q(0)), (2, q(0))]);
        assert!(matches!(quotient_disjoint(&half_shear, &r, &m, 8), Err(Error::Precondition(_))));
    }
}
