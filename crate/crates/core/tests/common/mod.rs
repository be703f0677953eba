#![allow(dead_code)]

use nilflux_core::displacement::{Constraint, Polyhedron};
use nilflux_core::exterior::{AffineMap, Basis, DiffForm, VecField};
use nilflux_core::poly::PolyScalar;
use nilflux_core::rational::{frac, q, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn rational(rng: &mut impl Rng) -> Rational {
    frac(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let r = rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Up to three terms of total degree at most two in the first `n` coordinates.
pub fn poly(rng: &mut impl Rng, n: usize) -> PolyScalar {
    let mut out = PolyScalar::zero();
    for _ in 0..rng.gen_range(0..=3) {
        let mut m = PolyScalar::constant(nonzero_rational(rng));
        for _ in 0..rng.gen_range(0..=2) {
            m = m * PolyScalar::coord(rng.gen_range(0..n));
        }
        out += &m;
    }
    out
}

pub fn constant_poly(rng: &mut impl Rng) -> PolyScalar {
    PolyScalar::constant(rational(rng))
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn random_form(rng: &mut impl Rng, n: usize, k: usize, basis: Basis, constant: bool) -> DiffForm {
    let mut terms = Vec::new();
    for idx in subsets(n, k) {
        if rng.gen_bool(0.5) {
            let c = if constant { constant_poly(rng) } else { poly(rng, n) };
            terms.push((idx, c));
        }
    }
    DiffForm::from_terms(n, k, basis, terms).unwrap()
}

pub fn form(rng: &mut impl Rng, n: usize, k: usize, basis: Basis) -> DiffForm {
    random_form(rng, n, k, basis, false)
}

pub fn constant_form(rng: &mut impl Rng, n: usize, k: usize, basis: Basis) -> DiffForm {
    random_form(rng, n, k, basis, true)
}

pub fn field(rng: &mut impl Rng, n: usize) -> VecField {
    VecField::new((0..n).map(|_| poly(rng, n)).collect())
}

/// `x ↦ Ax + c` with `A` unimodular: a product of random elementary shears.
pub fn affine_map(rng: &mut impl Rng, n: usize) -> AffineMap {
    let mut a: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect();
    for _ in 0..3 {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let r = rational(rng);
        for col in 0..n {
            let add = &a[j][col] * &r;
            a[i][col] += add;
        }
    }
    AffineMap::new(a, (0..n).map(|_| rational(rng)).collect()).unwrap()
}

/// Strictly upper triangular linear part plus a constant.
pub fn nilpotent_affine_field(rng: &mut impl Rng, n: usize) -> VecField {
    let comps = (0..n)
        .map(|i| {
            let mut c = PolyScalar::constant(rational(rng));
            for j in i + 1..n {
                if rng.gen_bool(0.5) {
                    c += &PolyScalar::coord(j).scale(&rational(rng));
                }
            }
            c
        })
        .collect();
    VecField::new(comps)
}

/// Random non-strict constraints inside the box `|x_i| ≤ 3`.
pub fn bounded_polyhedron(rng: &mut impl Rng, n: usize, extra: usize) -> Vec<Constraint> {
    let mut cs = Vec::new();
    for i in 0..n {
        let mut up = vec![q(0); n];
        up[i] = q(1);
        let down: Vec<Rational> = up.iter().map(|x| -x).collect();
        cs.push(Constraint::new(up, q(3), false));
        cs.push(Constraint::new(down, q(3), false));
    }
    for _ in 0..extra {
        let a: Vec<Rational> = (0..n).map(|_| frac(rng.gen_range(-3..=3), 1)).collect();
        cs.push(Constraint::new(a, frac(rng.gen_range(-6..=6), rng.gen_range(1..=3)), false));
    }
    cs.shuffle(rng);
    cs
}

/// Gaussian elimination on a square system; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some(b)
}

/// Feasibility of a bounded closed polyhedron by checking every candidate
/// vertex obtained from `n` tight constraints.
pub fn vertex_feasible(cs: &[Constraint], n: usize) -> bool {
    for rows in subsets(cs.len(), n) {
        let a = rows.iter().map(|&r| cs[r].coeffs.clone()).collect();
        let b = rows.iter().map(|&r| cs[r].rhs.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if cs.iter().all(|c| c.holds(&x)) {
                return true;
            }
        }
    }
    false
}

pub fn polyhedron(cs: &[Constraint], n: usize) -> Polyhedron {
    Polyhedron::from_constraints(n, cs.to_vec()).unwrap()
}

pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                for k in c..cols {
                    let d = &f * &rows[r][k];
                    rows[i][k] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Constant coefficients of a form over all `k`-subsets, in lexicographic order.
pub fn coefficients(a: &DiffForm) -> Vec<Rational> {
    subsets(a.dim(), a.degree())
        .iter()
        .map(|idx| a.coefficient(idx).as_constant().expect("constant coefficients"))
        .collect()
}

/// Whether two families of constant forms span the same space.
pub fn same_span(a: &[DiffForm], b: &[DiffForm]) -> bool {
    let va: Vec<_> = a.iter().map(coefficients).collect();
    let vb: Vec<_> = b.iter().map(coefficients).collect();
    let ra = rank(va.clone());
    ra == rank(vb.clone()) && ra == rank([va, vb].concat())
}
