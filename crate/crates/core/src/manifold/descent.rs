use std::collections::HashMap;

use crate::error::Result;
use crate::exterior::{AffineMap, VecField};

use super::{is_integral, ManifoldModel};

/// Default bound on deck-word exponents searched for descent witnesses.
pub const DEFAULT_SEARCH_BOUND: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeckWitness {
    pub generator: usize,
    /// Exponents of the deck word `g′` with `φ ∘ g = g′ ∘ φ`.
    pub word: Vec<i64>,
    pub map: AffineMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapDescent {
    Yes(Vec<DeckWitness>),
    /// `φ ∘ g ∘ φ⁻¹` is provably not a deck transformation.
    No { generator: usize, residual: AffineMap, reason: String },
    /// No witness within the search bound, and no proof that none exists.
    Inconclusive { generator: usize, residual: AffineMap, bound: i64 },
}

impl MapDescent {
    pub fn is_yes(&self) -> bool {
        matches!(self, MapDescent::Yes(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldDescent {
    Yes,
    No { generator: usize, pushforward: VecField },
}

/// Decides whether `φ` induces a map of the quotient by finding, for every
/// generator `g`, a deck word `g′` with `φ ∘ g = g′ ∘ φ`.
pub fn map_descends(phi: &AffineMap, model: &ManifoldModel, bound: i64) -> Result<MapDescent> {
    let phi_inv = phi.inverse()?;
    let search = WordSearch::new(model, bound)?;
    let mut witnesses = Vec::new();
    for (i, g) in model.generators().iter().enumerate() {
        let residual = phi.compose(g).compose(&phi_inv);
        match search.find(&residual) {
            Some(word) => witnesses.push(DeckWitness { generator: i, word, map: residual }),
            None => {
                if model.has_integral_lattice() && !is_integral(&residual) {
                    return Ok(MapDescent::No {
                        generator: i,
                        residual,
                        reason: "residual map is not integral, but every deck transformation is".into(),
                    });
                }
                return Ok(MapDescent::Inconclusive { generator: i, residual, bound });
            }
        }
    }
    Ok(MapDescent::Yes(witnesses))
}

/// `X` descends iff `g_* X = X` for every generator.
pub fn field_descends(x: &VecField, model: &ManifoldModel) -> Result<FieldDescent> {
    for (i, g) in model.generators().iter().enumerate() {
        let pushed = x.pushforward(g)?;
        if &pushed != x {
            return Ok(FieldDescent::No { generator: i, pushforward: pushed });
        }
    }
    Ok(FieldDescent::Yes)
}

/// Meet-in-the-middle lookup of deck words with exponents in `[-bound, bound]`:
/// a word splits as `outer ∘ inner`, inner words are tabulated.
struct WordSearch {
    split: usize,
    inner: HashMap<AffineMap, Vec<i64>>,
    outer: Vec<(Vec<i64>, AffineMap)>,
}

impl WordSearch {
    fn new(model: &ManifoldModel, bound: i64) -> Result<Self> {
        let n = model.dim();
        let split = n / 2;
        let powers: Vec<Vec<AffineMap>> = model
            .generators()
            .iter()
            .map(|g| (-bound..=bound).map(|k| g.pow(k)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let words = |range: std::ops::Range<usize>| -> Vec<(Vec<i64>, AffineMap)> {
            let mut acc = vec![(Vec::new(), AffineMap::identity(n))];
            for gi in range {
                let mut next = Vec::with_capacity(acc.len() * powers[gi].len());
                // smaller exponents first keeps the reported word minimal
                let mut order: Vec<i64> = (-bound..=bound).collect();
                order.sort_by_key(|k| (k.abs(), *k));
                for (exps, map) in &acc {
                    for &k in &order {
                        let mut e = exps.clone();
                        e.push(k);
                        next.push((e, powers[gi][(k + bound) as usize].compose(map)));
                    }
                }
                acc = next;
            }
            acc
        };
        let mut inner = HashMap::new();
        for (e, m) in words(0..split) {
            inner.entry(m).or_insert(e);
        }
        let outer = words(split..n);
        Ok(Self { split, inner, outer })
    }

    fn find(&self, target: &AffineMap) -> Option<Vec<i64>> {
        for (outer_exps, outer_map) in &self.outer {
            let inv = outer_map.inverse().ok()?;
            if let Some(inner_exps) = self.inner.get(&inv.compose(target)) {
                let mut word = inner_exps.clone();
                word.extend_from_slice(outer_exps);
                debug_assert_eq!(word.len(), self.split + outer_exps.len());
                return Some(word);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::manifold::kodaira_thurston;
    use crate::poly::PolyScalar;
    use crate::rational::{frac, q};

    #[test]
    fn identity_descends_with_generators_as_witnesses() {
        let kt = kodaira_thurston();
        let MapDescent::Yes(w) = map_descends(&AffineMap::identity(4), &kt, 2).unwrap() else {
            panic!("identity must descend");
        };
        for (i, wit) in w.iter().enumerate() {
            assert_eq!(&wit.map, &kt.generators()[i]);
            let mut unit = vec![0; 4];
            unit[i] = 1;
            assert_eq!(wit.word, unit);
        }
    }

    #[test]
    fn half_shear_does_not_descend() {
        // (s,t,x,y) ↦ (s, t, x + s/2, y)
        let kt = kodaira_thurston();
        let mut lin = linalg::identity(4);
        lin[2][0] = frac(1, 2);
        let phi = AffineMap::new(lin, vec![q(0); 4]).unwrap();
        match map_descends(&phi, &kt, DEFAULT_SEARCH_BOUND).unwrap() {
            MapDescent::No { generator, residual, .. } => {
                assert_eq!(generator, 0);
                assert_eq!(residual.translation()[2], frac(1, 2));
            }
            other => panic!("expected no, got {other:?}"),
        }
    }

    #[test]
    fn integral_non_deck_map_is_inconclusive() {
        // swapping x and y conjugates the s-generator to
        // (s+1, t, x, x+y), integral but not a deck transformation
        let kt = kodaira_thurston();
        let mut lin = linalg::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            lin[i][j] = q(1);
        }
        let phi = AffineMap::new(lin, vec![q(0); 4]).unwrap();
        let out = map_descends(&phi, &kt, 1).unwrap();
        assert!(matches!(out, MapDescent::Inconclusive { .. }), "{out:?}");
    }

    #[test]
    fn dy_does_not_descend_on_kt() {
        let kt = kodaira_thurston();
        match field_descends(&VecField::coordinate(4, 3), &kt).unwrap() {
            FieldDescent::No { generator, pushforward } => {
                assert_eq!(generator, 0);
                assert_eq!(pushforward.component(2), &PolyScalar::one());
            }
            FieldDescent::Yes => panic!("∂y is not invariant"),
        }
        assert_eq!(field_descends(&VecField::coordinate(4, 2), &kt).unwrap(), FieldDescent::Yes);
    }
}
