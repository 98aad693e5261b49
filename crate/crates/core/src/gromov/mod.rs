//! Model Gromov hyperbolic spaces with closed-form boundary products: the
//! Cayley tree of a free group and the hyperbolic plane.

mod model;
mod plane;
pub mod sample;
mod tree;
mod word;

pub use model::{
    bourdon_distance, busemann, dist_gromov_identity_constant, distance, estimate_delta,
    gromov_inequality_check, gromov_product, gromov_product_boundary, gromov_product_mixed,
    BoundaryPoint, ModelKind, SpaceIsometry, SpaceModel, SpacePoint,
};
pub use plane::{distance_to_geodesic, plane_distance, Mobius, PlaneBoundary, PlanePoint};
pub use tree::{
    tree_busemann, tree_distance, tree_product, tree_product_boundary, tree_product_mixed,
};
pub use word::{FreeWord, Letter, TreeRay};

pub(crate) use plane::{normalize_hom, visual_hom, Hom};
