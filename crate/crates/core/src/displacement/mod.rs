//! Exact displacement tests on affine regions.

mod partial;
mod polyhedron;
mod quotient;

use num_bigint::BigInt;

pub use partial::{apply_partial, commutator_displacement, Direction, PartialAffineMap};
pub use polyhedron::{Bound, Constraint, CoordRange, Polyhedron};
pub use quotient::quotient_disjoint;

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Disjoint,
    Intersects,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The projections onto `coordinates` have empty intersection.
    Separation { coordinates: Vec<usize>, first: Polyhedron, second: Polyhedron },
    /// A point lying in both sets.
    Witness { point: Vec<Rational> },
    /// `φ(p) = g(q)` with `g` the deck element of exponent vector `word`.
    QuotientWitness { p: Vec<Rational>, q: Vec<Rational>, word: Vec<BigInt> },
    /// The lifted coincidence system has no solution.
    Obstruction { reason: String },
    /// The step at which the decision procedure gave up.
    FailedStep { step: String, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisplacementVerdict {
    pub outcome: Outcome,
    pub certificate: Certificate,
}

impl DisplacementVerdict {
    fn disjoint(certificate: Certificate) -> Self {
        Self { outcome: Outcome::Disjoint, certificate }
    }

    fn intersects(certificate: Certificate) -> Self {
        Self { outcome: Outcome::Intersects, certificate }
    }

    fn inconclusive(step: &str, detail: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::Inconclusive,
            certificate: Certificate::FailedStep { step: step.into(), detail: detail.into() },
        }
    }
}
