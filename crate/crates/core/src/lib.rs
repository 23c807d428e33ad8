//! Orthogonality criteria for left-translated Gaussian product measures.
//!
//! The crate bundles the pieces needed to decide, at desk scale, whether the
//! left translate of an infinite Gaussian product measure on a space of `m`
//! two-sided rows is orthogonal to the measure itself, and to render the
//! resulting irreducibility verdict for `m <= 2`:
//!
//! * [`seqlang`]: a small expression language for the symbolic parameter
//!   families `b_{kn} > 0` and `a_{kn}`, with sound asymptotic extraction;
//! * [`identities`]: the exact small-matrix identity engine (minors,
//!   `det(I + X^T X)` expansions, Gram determinants, structured inverses);
//! * [`series`]: every criterion series as a partial-sum trace plus the
//!   three-valued divergence classifier (symbolic first, numeric fallback);
//! * [`gaussian`]: finite-dimensional Gaussian measure algebra: densities,
//!   pushforwards, Hellinger integrals, the Kakutani dichotomy primitives;
//! * [`ortho`]: the orthogonality decision procedures and canonical test
//!   batteries, plus minimal perp-set generators;
//! * [`irred`]: the approximation-criteria layer and the top-level
//!   irreducibility verdict with case classification;
//! * [`commlab`]: an exact finite-dimensional commutant laboratory.

pub mod commlab;
pub mod gaussian;
pub mod identities;
pub mod irred;
pub mod ortho;
pub mod seqlang;
pub mod series;

pub use identities::SquareMatrix;
pub use seqlang::{AsymptoticClass, FamilyExpr, Rational};
pub use series::{
    ClassifyPolicy, DivergenceVerdict, Grids, MeasureFamilySpec, PartialSumTrace, SeriesKind,
    Verdict,
};
