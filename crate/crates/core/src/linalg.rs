//! Exact linear algebra over the rationals and the integers.
//!
//! Matrices are plain row-major `Vec<Vec<_>>`; sizes here never exceed a few
//! dozen, so clarity wins over layout tricks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{common_denominator, Rational};

pub type Matrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, aik) in row.iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..cols {
                out[i][j] += aik * &b[k][j];
            }
        }
    }
    out
}

pub fn mat_vec(a: &Matrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// The `rows × cols.len()` matrix with the given columns.
pub fn transpose_cols(cols: &[Vec<Rational>], rows: usize) -> Matrix {
    (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

pub fn is_zero_matrix(a: &Matrix) -> bool {
    a.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// Reduced row echelon form and the pivot column of each nonzero row.
pub fn rref(a: &Matrix) -> (Matrix, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Matrix) -> usize {
    rref(a).1.len()
}

/// Basis of `{x : a x = 0}`, one vector per free column.
pub fn kernel(a: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[row][f].clone();
            }
            v
        })
        .collect()
}

/// Solution set of `a x = b`: a particular solution (free variables set to
/// zero) together with a kernel basis, or `None` when inconsistent.
pub fn solve(a: &Matrix, b: &[Rational], cols: usize) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r[row][cols].clone();
    }
    Some((x, kernel(a, cols)))
}

pub fn determinant(a: &Matrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let sub = &f * &m[c][j];
                m[i][j] -= sub;
            }
        }
    }
    det
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let aug: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Coordinates of `v` in the span of `vectors` (exact), if it lies there.
pub fn express_in_span(vectors: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    if vectors.is_empty() {
        return v.iter().all(Zero::is_zero).then(Vec::new);
    }
    let a = transpose(&vectors.to_vec());
    solve(&a, v, vectors.len()).map(|(x, _)| x)
}

// ---------------------------------------------------------------------------
// Integer lattices

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Column-style Hermite normal form `a · u = h` with `u` unimodular.
#[derive(Clone, Debug)]
pub struct ColumnHermite {
    /// `rows × cols`; the first `pivots.len()` columns are in echelon form,
    /// the remaining columns are zero.
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Row index of the leading entry of each nonzero column.
    pub pivots: Vec<usize>,
}

pub fn column_hermite(a: &IntMatrix, cols: usize) -> ColumnHermite {
    let rows = a.len();
    let mut h = a.clone();
    let mut u: IntMatrix = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let col_op = |m: &mut IntMatrix, dst: usize, src: usize, f: &BigInt| {
        for row in m.iter_mut() {
            let d = &row[src] * f;
            row[dst] -= d;
        }
    };
    let col_swap = |m: &mut IntMatrix, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    };
    let mut pivots = Vec::new();
    let mut pc = 0;
    for r in 0..rows {
        if pc == cols {
            break;
        }
        loop {
            // smallest nonzero magnitude among columns pc.. in row r
            let best = (pc..cols)
                .filter(|&j| !h[r][j].is_zero())
                .min_by(|&i, &j| h[r][i].abs().cmp(&h[r][j].abs()));
            let Some(best) = best else { break };
            col_swap(&mut h, pc, best);
            col_swap(&mut u, pc, best);
            let mut done = true;
            for j in pc + 1..cols {
                if h[r][j].is_zero() {
                    continue;
                }
                let f = h[r][j].div_floor(&h[r][pc]);
                col_op(&mut h, j, pc, &f);
                col_op(&mut u, j, pc, &f);
                if !h[r][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][pc].is_zero() {
            continue;
        }
        if h[r][pc].is_negative() {
            for m in [&mut h, &mut u] {
                for row in m.iter_mut() {
                    row[pc] = -row[pc].clone();
                }
            }
        }
        for j in 0..pc {
            let f = h[r][j].div_floor(&h[r][pc]);
            if !f.is_zero() {
                col_op(&mut h, j, pc, &f);
                col_op(&mut u, j, pc, &f);
            }
        }
        pivots.push(r);
        pc += 1;
    }
    ColumnHermite { h, u, pivots }
}

/// Integer solutions of `a x = b` for rational `a`, `b`:
/// `x = x0 + Σ z_i k_i` with `z` integral, or `None` when there is none.
pub fn solve_integer(a: &Matrix, b: &[Rational], cols: usize) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    // clear denominators row by row
    let mut ia: IntMatrix = Vec::with_capacity(a.len());
    let mut ib: Vec<BigInt> = Vec::with_capacity(a.len());
    for (row, bi) in a.iter().zip(b) {
        let den = common_denominator(row.iter().chain(std::iter::once(bi)));
        let scale = Rational::from_integer(den);
        ia.push(row.iter().map(|x| (x * &scale).to_integer()).collect());
        ib.push((bi * &scale).to_integer());
    }
    let hnf = column_hermite(&ia, cols);
    let rank = hnf.pivots.len();
    // forward substitution on the echelon columns
    let mut y = vec![BigInt::zero(); cols];
    for (j, &pr) in hnf.pivots.iter().enumerate() {
        let acc: BigInt = (0..j).map(|k| &hnf.h[pr][k] * &y[k]).sum();
        let rem = &ib[pr] - acc;
        let (q, r) = rem.div_rem(&hnf.h[pr][j]);
        if !r.is_zero() {
            return None;
        }
        y[j] = q;
    }
    for (i, bi) in ib.iter().enumerate() {
        let lhs: BigInt = (0..rank).map(|k| &hnf.h[i][k] * &y[k]).sum();
        if &lhs != bi {
            return None;
        }
    }
    let x0: Vec<BigInt> = (0..cols)
        .map(|i| (0..cols).map(|k| &hnf.u[i][k] * &y[k]).sum())
        .collect();
    let kernel = (rank..cols)
        .map(|k| (0..cols).map(|i| hnf.u[i][k].clone()).collect())
        .collect();
    Some((x0, kernel))
}

/// `Z^n / L` for a saturated sublattice `L`, with coordinates read off the
/// non-pivot rows of the Hermite form of `L`.
#[derive(Clone, Debug)]
pub struct LatticeQuotient {
    dim: usize,
    hnf: ColumnHermite,
    rank: usize,
    free_rows: Vec<usize>,
}

impl LatticeQuotient {
    /// Fails (returning the offending pivot) when `Z^n / L` has torsion
    /// visible as a non-unit Hermite pivot.
    pub fn new(dim: usize, generators: &[Vec<BigInt>]) -> Result<Self, (usize, BigInt)> {
        let a: IntMatrix = (0..dim)
            .map(|i| generators.iter().map(|g| g[i].clone()).collect())
            .collect();
        let hnf = column_hermite(&a, generators.len());
        let rank = hnf.pivots.len();
        for (j, &r) in hnf.pivots.iter().enumerate() {
            if !hnf.h[r][j].is_one() {
                return Err((r, hnf.h[r][j].clone()));
            }
        }
        let free_rows = (0..dim).filter(|r| !hnf.pivots.contains(r)).collect();
        Ok(Self { dim, hnf, rank, free_rows })
    }

    /// Generator indices whose classes form the quotient basis.
    pub fn basis_rows(&self) -> &[usize] {
        &self.free_rows
    }

    pub fn quotient_dim(&self) -> usize {
        self.free_rows.len()
    }

    pub fn project(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut w = v.to_vec();
        for j in 0..self.rank {
            let r = self.hnf.pivots[j];
            let f = w[r].clone();
            if f.is_zero() {
                continue;
            }
            for i in 0..self.dim {
                let d = &f * &self.hnf.h[i][j];
                w[i] -= d;
            }
        }
        self.free_rows.iter().map(|&r| w[r].clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn inverse_and_determinant() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(determinant(&a), q(1));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), q(-1));
    }

    #[test]
    fn solve_reports_kernel() {
        let a = m(&[&[1, 1, 0]]);
        let (x, k) = solve(&a, &[q(2)], 3).unwrap();
        assert_eq!(mat_vec(&a, &x), vec![q(2)]);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(mat_vec(&a, v), vec![q(0)]);
        }
        assert!(solve(&m(&[&[1, 1], &[2, 2]]), &[q(1), q(3)], 2).is_none());
    }

    #[test]
    fn integer_solutions() {
        // 2x + 4y = 6 has integer solutions, 2x + 4y = 3 does not
        let a = m(&[&[2, 4]]);
        let (x0, k) = solve_integer(&a, &[q(6)], 2).unwrap();
        assert_eq!(&x0[0] * 2 + &x0[1] * 4, BigInt::from(6));
        assert_eq!(k.len(), 1);
        assert!(solve_integer(&a, &[q(3)], 2).is_none());
        // rational coefficients are cleared first: x/2 = 1/4 has none
        assert!(solve_integer(&vec![vec![frac(1, 2)]], &[frac(1, 4)], 1).is_none());
    }

    #[test]
    fn quotient_by_commutator_line() {
        let quot = LatticeQuotient::new(4, &[bi(&[0, 0, 1, 0])]).unwrap();
        assert_eq!(quot.basis_rows(), &[0, 1, 3]);
        assert_eq!(quot.project(&bi(&[1, 2, 7, 3])), bi(&[1, 2, 3]));
        assert_eq!(quot.project(&bi(&[0, 0, 1, 0])), bi(&[0, 0, 0]));
    }

    #[test]
    fn quotient_rejects_torsion() {
        assert!(LatticeQuotient::new(2, &[bi(&[2, 0])]).is_err());
    }
}
