//! Dynamics of isometries on the boundary of a model space: types and
//! fixed points, lengths, shadows, attractor selection and sampled
//! `(r, eps)`-certification.

mod attractor;
mod classify;
mod shadow;

pub use attractor::{
    certify_r_eps_proximal_boundary, choose_attractor_pair, criterion_implies_proximal_boundary,
    lineal_threshold_check, measure_boundary, shadow_contraction_check, shadow_sigma,
    AttractorPair, LinealThreshold, ShadowContraction,
};
pub use classify::{
    classify_isometry, displacement, hyperbolic_axis, length_gap_check, length_subadditivity_check,
    same_boundary_point, stable_length, translation_length, IsometryClass, IsometryKind, LengthGap,
    StableLength,
};
pub use shadow::{shadow_contains, shadow_lemma_check, ShadowItem, ShadowReport, ShadowSpec};

pub(crate) use attractor::canonical_pair;
