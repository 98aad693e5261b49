//! Quantitative projective and boundary dynamics.
//!
//! Cartan and Jordan projections, `(r, eps)`-proximality in projective
//! space and on Gromov boundaries of two model spaces (the Cayley tree of a
//! free group and the hyperbolic plane), and a constructive search for a
//! finite set `S` making every semigroup element simultaneously proximal
//! after right multiplication by some `s` in `S`.

pub mod ams;
pub mod boundary;
pub mod certificate;
pub mod error;
pub mod gromov;
pub mod numfmt;
pub mod projective;
pub mod sampling;
pub mod tolerances;

pub use certificate::{BoundaryCertificate, ProximalityCertificate, Verdict};
pub use error::{Error, Result};
