//! Matrix dynamics on projective space: Cartan and Jordan projections,
//! proximal flags, sampled `(r, eps)`-certification and the gap bounds.

mod bounds;
mod certify;
mod jacobi;
mod matrix;
mod space;
mod spectral;

pub use bounds::{gap_bound_check, mu_subadditivity_check, unipotent_gap_formula, GapBound};
pub use certify::{
    certify_r_eps_proximal, certify_with_flag, chart_constant, contraction_check,
    criterion_implies_proximal, flag_from_vectors, ContractionReport, CriterionReport, Measurement,
};
pub use matrix::SquareMatrix;
pub use space::{
    hyperplane_distance, point_hyperplane_distance, proj_distance, ProjFlag, ProjHyperplane,
    ProjPoint,
};
pub use spectral::{
    cartan_projection, cartan_projection_power, exterior_power, jordan_projection, proximal_data,
    sup_distance, sup_norm, svd_attractor, svd_flag_lenient, CartanVector, JordanVector,
};

pub(crate) use certify::measure;
pub(crate) use jacobi::singular_values;
pub(crate) use spectral::svd_frame;
