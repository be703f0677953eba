//! Exterior calculus with polynomial coefficients on `R^n`.
//!
//! Forms are stored on strictly increasing index tuples, either over the
//! coordinate differentials `dx_i` or over the 1-forms of a [`Coframe`].
//! Every sign that arises from reordering wedge factors goes through
//! [`canonical_order`].

mod affine;
mod coframe;
mod field;
mod form;

pub use affine::{exp_affine_field, AffineMap, PolyAffine};
pub use coframe::Coframe;
pub use field::VecField;
pub use form::{Basis, DiffForm};

/// Sorts `indices` into increasing order and returns the sign of the sorting
/// permutation, or `None` when an index repeats (the wedge monomial vanishes).
pub fn canonical_order(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// All strictly increasing `k`-subsets of `0..n` in lexicographic order.
pub fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        assert_eq!(canonical_order(&[0, 1, 2]), Some((vec![0, 1, 2], 1)));
        assert_eq!(canonical_order(&[1, 0, 2]), Some((vec![0, 1, 2], -1)));
        assert_eq!(canonical_order(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(canonical_order(&[2, 0, 3, 1]), Some((vec![0, 1, 2, 3], -1)));
        assert_eq!(canonical_order(&[1, 1]), None);
    }

    #[test]
    fn tuples_count() {
        assert_eq!(index_tuples(4, 2).len(), 6);
        assert_eq!(index_tuples(4, 0), vec![Vec::<usize>::new()]);
        assert!(index_tuples(2, 3).is_empty());
    }
}
