//! Numerical tolerances shared by all modules.

/// Relative determinant floor: a matrix is singular when
/// `|det| < TAU_DET_REL * ||g||^dim`.
pub const TAU_DET_REL: f64 = 1e-12;

/// Default gap `lambda_1 - lambda_2` required for proximality.
pub const SPECTRAL_TOL: f64 = 1e-6;

/// Minimal `mu_1 - mu_2` for the SVD attractor to be unambiguous.
pub const TAU_SVDGAP: f64 = 1e-9;

/// Coordinates below this magnitude are skipped when fixing the sign of a
/// projective representative.
pub const CANON_THRESHOLD: f64 = 1e-12;

/// Unit-norm tolerance for projective points and normals.
pub const UNIT_TOL: f64 = 1e-12;

/// Relative residual allowed in an SVD reconstruction.
pub const SVD_RECONSTRUCTION: f64 = 1e-9;

/// Violations smaller than this are reported as inconclusive, not refuted.
pub const TAU_MARGIN: f64 = 1e-7;

/// Minimal transversality margin accepted by searches.
pub const TAU_TRANS: f64 = 1e-3;

/// Guard band around `|tr| = 2` for plane isometries.
pub const TAU_TRACE: f64 = 1e-9;

/// Determinant tolerance for plane isometries.
pub const PLANE_DET_TOL: f64 = 1e-10;

/// Visual distance below which two plane boundary points are identified.
pub const PLANE_POINT_TOL: f64 = 1e-9;

/// Default upper bound on the power scan for `gamma_0^n`.
pub const N_SCAN_MAX: usize = 512;

/// Fewest sample pairs accepted by the contraction check.
pub const MIN_CONTRACTION_PAIRS: usize = 10;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 16;

/// Iteration cap passed to the Schur eigensolver.
pub const SOLVER_MAX_ITER: usize = 10_000;

/// Convergence threshold passed to the Schur eigensolver.
pub const EIG_EPS: f64 = f64::EPSILON;
