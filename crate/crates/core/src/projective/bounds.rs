use super::matrix::SquareMatrix;
use super::spectral::{cartan_projection, jordan_projection, proximal_data, sup_distance};
use crate::error::Result;
use crate::tolerances::SPECTRAL_TOL;

/// `(mu_1(u), d(x^+, X^-))` for the unipotent `u` with `u e_1 = e_1 + v`
/// fixing `e_1^⊥` pointwise, as functions of `||v||`.
pub fn unipotent_gap_formula(v_norm: f64) -> (f64, f64) {
    let v2 = v_norm * v_norm;
    let root = v_norm * (4.0 + v2).sqrt();
    let mu1 = 0.5 * ((v2 + root) / 2.0).ln_1p();
    let gap = 1.0 / (1.0 + v2).sqrt();
    (mu1, gap)
}

/// Both sides of `mu_1 - |log(gap^2 / 2)| <= lambda_1 <= mu_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapBound {
    pub lhs: f64,
    pub lambda1: f64,
    pub mu1: f64,
    pub gap: f64,
}

impl GapBound {
    /// Violation of the sandwich (positive means violated).
    pub fn violation(&self) -> f64 {
        (self.lhs - self.lambda1).max(self.lambda1 - self.mu1)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.violation() <= tol
    }
}

/// Evaluates both sides of the gap bound. The lower bound is a theorem in
/// dimension 2 only: in higher dimension the restriction of `g` to `X^-`
/// may have operator norm above `e^{lambda_1}`, e.g. `diag(1, [[0.5, 100],
/// [0, 0.4]])` has gap 1 and violates it by about 3.9.
pub fn gap_bound_check(g: &SquareMatrix) -> Result<GapBound> {
    let flag = proximal_data(g, SPECTRAL_TOL)?;
    let lambda1 = jordan_projection(g)?.values[0];
    let mu1 = cartan_projection(g)?.values[0];
    let lhs = mu1 - (flag.gap * flag.gap / 2.0).ln().abs();
    Ok(GapBound {
        lhs,
        lambda1,
        mu1,
        gap: flag.gap,
    })
}

/// `||mu(g1)|| + ||mu(g2)|| - ||mu(g1 g g2) - mu(g)||` in the sup norm.
pub fn mu_subadditivity_check(
    g1: &SquareMatrix,
    g: &SquareMatrix,
    g2: &SquareMatrix,
) -> Result<f64> {
    let prod = g1.mul(g).mul(g2);
    let lhs = sup_distance(
        &cartan_projection(&prod)?.values,
        &cartan_projection(g)?.values,
    );
    let rhs = cartan_projection(g1)?.sup_norm() + cartan_projection(g2)?.sup_norm();
    Ok(rhs - lhs)
}
