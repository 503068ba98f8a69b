//! Exact computations with flag valuations on section spaces: value
//! semigroups, Okounkov body estimates, lattice polytope queries and
//! toric degeneration certificates.

pub mod degeneration;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod polytope;
pub mod scalar;
pub mod semigroup;
pub mod valuation;

pub use error::{Error, Result};
pub use linalg::SectionSpace;
pub use poly::{parse_polynomial, variables, ExponentVector, Polynomial, Variables};
pub use polytope::{convex_hull, Halfspace, QVec, RationalPolytope};
pub use scalar::{Field, Scalar};
pub use semigroup::{
    build_gamma, GenerationReport, GenerationStatus, GradedSemigroup, Limits, NormalityRecord,
};
pub use valuation::{
    nu, nu_image, nu_prefix_image, restricted_system, saturation_check, FlagSpec, GradedPoint,
    SaturationRecord, ValuationVector,
};
pub use degeneration::{
    choose_weight_vector, degenerate_sections, degenerate_semigroup, Degeneration, FlatnessReport,
    Presentation, Relation, RelationSet, WeightVector,
};
