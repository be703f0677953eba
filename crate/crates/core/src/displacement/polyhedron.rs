use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exterior::AffineMap;
use crate::linalg;
use crate::rational::{format_rational, Rational};

/// `Σ coeffs_i x_i < rhs` (strict) or `≤ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
    pub strict: bool,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational, strict: bool) -> Self {
        Self { coeffs, rhs, strict }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let l = self.lhs(x);
        if self.strict {
            l < self.rhs
        } else {
            l <= self.rhs
        }
    }

    /// The complementary half-space.
    pub fn negation(&self) -> Constraint {
        Constraint {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            rhs: -self.rhs.clone(),
            strict: !self.strict,
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Scales so the first nonzero coefficient has absolute value one.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            if !lead.is_one() {
                for c in self.coeffs.iter_mut() {
                    *c /= &lead;
                }
                self.rhs /= &lead;
            }
        }
        self
    }

    /// True when `self` is at least as tight as `other` (same direction).
    fn tighter_than(&self, other: &Constraint) -> bool {
        self.rhs < other.rhs || (self.rhs == other.rhs && (self.strict || !other.strict))
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (c, name) in self.coeffs.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                out.push_str(&format_rational(&mag));
                out.push('·');
            }
            out.push_str(name);
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("{out} {} {}", if self.strict { "<" } else { "<=" }, format_rational(&self.rhs))
    }
}

/// A conjunction of affine inequalities, stored canonically: one constraint
/// per normalized direction, keeping only the tightest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polyhedron {
    dim: usize,
    constraints: BTreeMap<Vec<Rational>, (Rational, bool)>,
    /// Set when a constant constraint is false.
    contradiction: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub value: Rational,
    pub strict: bool,
}

/// Range of a single coordinate over a polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordRange {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl Polyhedron {
    /// All of `R^dim`.
    pub fn universe(dim: usize) -> Self {
        Self { dim, constraints: BTreeMap::new(), contradiction: false }
    }

    pub fn from_constraints(dim: usize, constraints: impl IntoIterator<Item = Constraint>) -> Result<Self> {
        let mut p = Self::universe(dim);
        for c in constraints {
            p.add(c)?;
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&mut self, c: Constraint) -> Result<()> {
        if c.coeffs.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: c.coeffs.len() });
        }
        self.insert(c);
        Ok(())
    }

    fn insert(&mut self, c: Constraint) {
        if c.is_constant() {
            let zero = Rational::zero();
            let ok = if c.strict { zero < c.rhs } else { zero <= c.rhs };
            if !ok {
                self.contradiction = true;
            }
            return;
        }
        let c = c.normalized();
        match self.constraints.get(&c.coeffs) {
            Some((rhs, strict)) => {
                let old = Constraint::new(c.coeffs.clone(), rhs.clone(), *strict);
                if c.tighter_than(&old) {
                    self.constraints.insert(c.coeffs, (c.rhs, c.strict));
                }
            }
            None => {
                self.constraints.insert(c.coeffs, (c.rhs, c.strict));
            }
        }
    }

    fn unit(&self, i: usize, scale: Rational) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim];
        v[i] = scale;
        v
    }

    /// `lo < x_i < hi` (or with `≤` when `strict` is false).
    pub fn with_interval(mut self, i: usize, lo: Rational, hi: Rational, strict: bool) -> Self {
        self.insert(Constraint::new(self.unit(i, Rational::one()), hi, strict));
        self.insert(Constraint::new(self.unit(i, -Rational::one()), -lo, strict));
        self
    }

    /// `|x_i − center| < radius`.
    pub fn with_band(self, i: usize, center: &Rational, radius: &Rational) -> Self {
        self.with_interval(i, center - radius, center + radius, true)
    }

    /// `lo < a·x < hi` for a linear functional `a`.
    pub fn with_functional_interval(mut self, a: &[Rational], lo: Rational, hi: Rational, strict: bool) -> Self {
        self.insert(Constraint::new(a.to_vec(), hi, strict));
        self.insert(Constraint::new(a.iter().map(|c| -c).collect(), -lo, strict));
        self
    }

    pub fn constraints(&self) -> Vec<Constraint> {
        if self.contradiction {
            return vec![Constraint::new(vec![Rational::zero(); self.dim], Rational::zero(), true)];
        }
        self.constraints
            .iter()
            .map(|(a, (r, s))| Constraint::new(a.clone(), r.clone(), *s))
            .collect()
    }

    pub fn is_trivially_empty(&self) -> bool {
        self.contradiction
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        !self.contradiction && self.constraints().iter().all(|c| c.holds(x))
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = self.clone();
        out.contradiction |= other.contradiction;
        for c in other.constraints() {
            out.insert(c);
        }
        Ok(out)
    }

    /// `{x : g(x) ∈ self}`.
    pub fn preimage(&self, g: &AffineMap) -> Result<Polyhedron> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: g.dim() });
        }
        let mut out = Polyhedron::universe(self.dim);
        out.contradiction = self.contradiction;
        let lt = linalg::transpose(g.linear());
        for c in self.constraints() {
            let coeffs = linalg::mat_vec(&lt, &c.coeffs);
            let shift: Rational = c.coeffs.iter().zip(g.translation()).map(|(a, b)| a * b).sum();
            out.insert(Constraint::new(coeffs, c.rhs - shift, c.strict));
        }
        Ok(out)
    }

    /// `g(self)`.
    pub fn image(&self, g: &AffineMap) -> Result<Polyhedron> {
        self.preimage(&g.inverse()?)
    }

    /// Fourier–Motzkin projection eliminating the listed coordinates; the
    /// result lives in the same space with zero coefficients on them.
    pub fn eliminate(&self, coords: &[usize]) -> Polyhedron {
        let mut order: Vec<usize> = coords.to_vec();
        order.sort_unstable();
        order.dedup();
        if self.contradiction {
            return self.clone();
        }
        let mut rows: Vec<(Constraint, BTreeSet<usize>)> = self
            .constraints()
            .into_iter()
            .enumerate()
            .map(|(i, c)| (c, BTreeSet::from([i])))
            .collect();
        for (step, &j) in order.iter().enumerate() {
            let limit = step + 2;
            let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
            for row in rows {
                match row.0.coeffs[j].partial_cmp(&Rational::zero()) {
                    Some(std::cmp::Ordering::Greater) => pos.push(row),
                    Some(std::cmp::Ordering::Less) => neg.push(row),
                    _ => rest.push(row),
                }
            }
            let mut merged: BTreeMap<Vec<Rational>, (Rational, bool, BTreeSet<usize>)> = BTreeMap::new();
            let keep = |c: Constraint, h: BTreeSet<usize>, merged: &mut BTreeMap<_, _>| -> bool {
                if c.is_constant() {
                    let zero = Rational::zero();
                    return if c.strict { zero < c.rhs } else { zero <= c.rhs };
                }
                let c = c.normalized();
                let entry: Option<&(Rational, bool, BTreeSet<usize>)> = merged.get(&c.coeffs);
                let replace = match entry {
                    None => true,
                    Some((r, s, old_h)) => {
                        let old = Constraint::new(c.coeffs.clone(), r.clone(), *s);
                        if c == old {
                            h.len() < old_h.len()
                        } else {
                            c.tighter_than(&old)
                        }
                    }
                };
                if replace {
                    merged.insert(c.coeffs, (c.rhs, c.strict, h));
                }
                true
            };
            for (c, h) in rest {
                if !keep(c, h, &mut merged) {
                    return Self::empty(self.dim);
                }
            }
            for (p, hp) in &pos {
                for (n, hn) in &neg {
                    let h: BTreeSet<usize> = hp.union(hn).copied().collect();
                    if h.len() > limit {
                        continue;
                    }
                    let fp = p.coeffs[j].recip();
                    let fnn = -n.coeffs[j].recip();
                    let coeffs: Vec<Rational> =
                        p.coeffs.iter().zip(&n.coeffs).map(|(a, b)| a * &fp + b * &fnn).collect();
                    let mut coeffs = coeffs;
                    coeffs[j] = Rational::zero();
                    let c = Constraint::new(coeffs, &p.rhs * &fp + &n.rhs * &fnn, p.strict || n.strict);
                    if !keep(c, h, &mut merged) {
                        return Self::empty(self.dim);
                    }
                }
            }
            rows = merged
                .into_iter()
                .map(|(a, (r, s, h))| (Constraint::new(a, r, s), h))
                .collect();
        }
        let mut out = Polyhedron::universe(self.dim);
        for (c, _) in rows {
            out.insert(c);
        }
        out
    }

    fn empty(dim: usize) -> Self {
        Self { dim, constraints: BTreeMap::new(), contradiction: true }
    }

    /// Projection onto the listed coordinates.
    pub fn project(&self, keep: &[usize]) -> Polyhedron {
        let drop: Vec<usize> = (0..self.dim).filter(|i| !keep.contains(i)).collect();
        self.eliminate(&drop)
    }

    /// A rational point of the polyhedron, or `None` when it is empty.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let n = self.dim;
        // stages[k]: variables k.. eliminated
        let mut stages = vec![self.clone()];
        for j in (0..n).rev() {
            let next = stages.last().expect("nonempty").eliminate(&[j]);
            stages.push(next);
        }
        stages.reverse();
        if stages[0].contradiction {
            return None;
        }
        let mut x = vec![Rational::zero(); n];
        for j in 0..n {
            let stage = &stages[j + 1];
            let mut lower: Option<Bound> = None;
            let mut upper: Option<Bound> = None;
            for c in stage.constraints() {
                let a = &c.coeffs[j];
                if a.is_zero() {
                    continue;
                }
                let rest: Rational = (0..j).map(|i| &c.coeffs[i] * &x[i]).sum();
                let v = (&c.rhs - rest) / a;
                let b = Bound { value: v, strict: c.strict };
                if a.is_positive() {
                    if upper.as_ref().is_none_or(|u| b.value < u.value || (b.value == u.value && b.strict)) {
                        upper = Some(b);
                    }
                } else if lower.as_ref().is_none_or(|l| b.value > l.value || (b.value == l.value && b.strict)) {
                    lower = Some(b);
                }
            }
            x[j] = choose(&lower, &upper);
        }
        debug_assert!(self.contains(&x), "back-substitution produced an infeasible point");
        if self.contains(&x) {
            Some(x)
        } else {
            None
        }
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    /// First constraint of `other` that some point of `self` violates, with
    /// such a point; `None` when `self ⊆ other`.
    pub fn first_escape(&self, other: &Polyhedron) -> Result<Option<(Constraint, Vec<Rational>)>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: other.dim, found: self.dim });
        }
        for c in other.constraints() {
            let mut outside = self.clone();
            outside.insert(c.negation());
            if let Some(p) = outside.feasible_point() {
                return Ok(Some((c, p)));
            }
        }
        Ok(None)
    }

    pub fn is_subset_of(&self, other: &Polyhedron) -> Result<bool> {
        Ok(self.first_escape(other)?.is_none())
    }

    /// Range of coordinate `i` (exact projection).
    pub fn coordinate_range(&self, i: usize) -> CoordRange {
        let proj = self.project(&[i]);
        let mut range = CoordRange { lower: None, upper: None };
        for c in proj.constraints() {
            let a = &c.coeffs[i];
            if a.is_zero() {
                continue;
            }
            let b = Bound { value: &c.rhs / a, strict: c.strict };
            if a.is_positive() {
                range.upper = Some(b);
            } else {
                range.lower = Some(b);
            }
        }
        range
    }

    pub fn render(&self, names: &[String]) -> Vec<String> {
        self.constraints().iter().map(|c| c.render(names)).collect()
    }
}

fn choose(lower: &Option<Bound>, upper: &Option<Bound>) -> Rational {
    let zero = Rational::zero();
    let above = |b: &Bound, v: &Rational| if b.strict { v > &b.value } else { v >= &b.value };
    let below = |b: &Bound, v: &Rational| if b.strict { v < &b.value } else { v <= &b.value };
    let zero_ok = lower.as_ref().is_none_or(|l| above(l, &zero)) && upper.as_ref().is_none_or(|u| below(u, &zero));
    if zero_ok {
        return zero;
    }
    match (lower, upper) {
        (Some(l), Some(u)) => (&l.value + &u.value) / Rational::from_integer(2.into()),
        (Some(l), None) => &l.value + Rational::one(),
        (None, Some(u)) => &u.value - Rational::one(),
        (None, None) => zero,
    }
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.dim).map(|i| format!("x{i}")).collect();
        write!(f, "{{{}}}", self.render(&names).join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn c(coeffs: &[i64], rhs: Rational, strict: bool) -> Constraint {
        Constraint::new(coeffs.iter().map(|&x| q(x)).collect(), rhs, strict)
    }

    #[test]
    fn eliminate_y_from_strip() {
        // 0 < y < 1, y < x  ⇒  x > 0
        let p = Polyhedron::from_constraints(
            2,
            [c(&[0, -1], q(0), true), c(&[0, 1], q(1), true), c(&[-1, 1], q(0), true)],
        )
        .unwrap();
        let e = p.eliminate(&[1]);
        assert_eq!(e.constraints(), vec![c(&[-1, 0], q(0), true)]);
        assert_eq!(p.eliminate(&[]), p);
    }

    #[test]
    fn contradictory_pair_is_empty() {
        let p = Polyhedron::from_constraints(1, [c(&[1], q(0), true), c(&[-1], q(0), true)]).unwrap();
        assert!(p.is_empty());
        let touching = Polyhedron::from_constraints(1, [c(&[1], q(0), false), c(&[-1], q(0), false)]).unwrap();
        assert_eq!(touching.feasible_point(), Some(vec![q(0)]));
    }

    #[test]
    fn witness_prefers_zero_then_midpoint() {
        let eps = frac(1, 4);
        let tau = q(1);
        let v0 = Polyhedron::universe(4)
            .with_band(0, &q(0), &(&eps / q(2)))
            .with_band(2, &q(0), &(&eps / q(2)))
            .with_interval(3, q(0), &tau / q(2), true);
        assert_eq!(v0.feasible_point(), Some(vec![q(0), q(0), q(0), frac(1, 4)]));
    }

    #[test]
    fn parallel_constraints_keep_the_tightest() {
        let p = Polyhedron::from_constraints(2, [c(&[2, 4], q(2), false), c(&[1, 2], q(1), true)]).unwrap();
        assert_eq!(p.constraints(), vec![c(&[1, 2], q(1), true)]);
    }

    #[test]
    fn preimage_under_translation() {
        let p = Polyhedron::universe(1).with_interval(0, q(0), q(1), true);
        let g = AffineMap::translation_by(vec![q(-3)]);
        let pre = p.preimage(&g).unwrap();
        assert_eq!(pre, Polyhedron::universe(1).with_interval(0, q(3), q(4), true));
        assert_eq!(pre.image(&g).unwrap(), p);
    }

    #[test]
    fn subset_and_escape() {
        let small = Polyhedron::universe(1).with_interval(0, q(0), q(1), true);
        let big = Polyhedron::universe(1).with_interval(0, q(0), q(1), false);
        assert!(small.is_subset_of(&big).unwrap());
        let (violated, point) = big.first_escape(&small).unwrap().unwrap();
        assert!(!violated.holds(&point) && big.contains(&point));
    }

    #[test]
    fn coordinate_range_of_triangle() {
        // x ≥ 0, y ≥ 0, x + y < 2
        let p = Polyhedron::from_constraints(
            2,
            [c(&[-1, 0], q(0), false), c(&[0, -1], q(0), false), c(&[1, 1], q(2), true)],
        )
        .unwrap();
        let r = p.coordinate_range(0);
        assert_eq!(r.lower, Some(Bound { value: q(0), strict: false }));
        assert_eq!(r.upper, Some(Bound { value: q(2), strict: true }));
    }
}
