use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerances::{MAX_DIM, TAU_DET_REL};

/// Smallest `s_min / s_max` of the stored entries solved by LU directly.
const WELL_CONDITIONED: f64 = 1e-8;

/// Invertible real square matrix of dimension at least 2.
///
/// Entries are stored scaled by an exact power of two so that long products
/// neither overflow nor underflow; `log|det|` is tracked separately so that
/// quantities determined by the determinant stay accurate even when the
/// stored entries are numerically rank one.
#[derive(Clone, Debug)]
pub struct SquareMatrix {
    entries: DMatrix<f64>,
    exp2: i64,
    log_abs_det: f64,
    det_sign: f64,
}

fn normalize(m: &mut DMatrix<f64>) -> i64 {
    let max = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if max == 0.0 || !max.is_finite() {
        return 0;
    }
    let k = max.log2().floor() as i64;
    if k != 0 {
        let s = (-k as f64).exp2();
        m.iter_mut().for_each(|x| *x *= s);
    }
    k
}

impl SquareMatrix {
    /// Builds a matrix from rows, checking shape, finiteness and the
    /// determinant floor `|det| >= 1e-12 * ||g||^dim` (spectral norm).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim < 2 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "matrix dimension {dim} outside 2..={MAX_DIM}"
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "row {bad} has length {} (expected {dim})",
                rows[bad].len()
            )));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Self::from_dmatrix(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
    }

    /// Builds a matrix from a dense nalgebra matrix.
    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || dim < 2 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "expected a square matrix of dimension 2..={MAX_DIM}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut entries = m;
        let exp2 = normalize(&mut entries);
        let det = entries.clone().lu().determinant();
        let norm = spectral_norm(&entries)?;
        let tol = TAU_DET_REL * norm.powi(dim as i32);
        if !(det.abs() >= tol) || det == 0.0 {
            let scale = (exp2 as f64 * dim as f64).exp2();
            return Err(Error::SingularMatrix {
                det: det * scale,
                tol: tol * scale,
            });
        }
        let log_abs_det = det.abs().ln() + (exp2 * dim as i64) as f64 * std::f64::consts::LN_2;
        Ok(Self {
            entries,
            exp2,
            log_abs_det,
            det_sign: det.signum(),
        })
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        Self::from_dmatrix(DMatrix::identity(dim, dim)).expect("identity is invertible")
    }

    /// Diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        Self::from_dmatrix(DMatrix::from_fn(
            d,
            d,
            |i, j| if i == j { values[i] } else { 0.0 },
        ))
    }

    /// Plane rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_rows(&[vec![c, -s], vec![s, c]]).expect("rotations are invertible")
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Entries divided by `2^exponent()`; largest magnitude in `[1, 2)`.
    pub fn scaled_entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Power-of-two exponent relating stored and true entries.
    pub fn exponent(&self) -> i64 {
        self.exp2
    }

    /// Natural log of the scale factor `2^exponent()`.
    pub fn log_scale(&self) -> f64 {
        self.exp2 as f64 * std::f64::consts::LN_2
    }

    /// `log|det g|`, exact up to rounding for products.
    pub fn log_abs_det(&self) -> f64 {
        self.log_abs_det
    }

    /// Sign of `det g`, exact for products.
    pub fn det_sign(&self) -> f64 {
        self.det_sign
    }

    /// True entries (may overflow to infinity for very long products).
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let s = (self.exp2 as f64).exp2();
        &self.entries * s
    }

    /// True entries as rows.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let m = self.to_dmatrix();
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| m[(i, j)]).collect())
            .collect()
    }

    /// Entry `(i, j)` of the true matrix.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)] * (self.exp2 as f64).exp2()
    }

    /// Matrix product `self * rhs`.
    ///
    /// # Panics
    /// If the dimensions differ.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.dim(),
            rhs.dim(),
            "dimension mismatch in matrix product"
        );
        let mut entries = &self.entries * &rhs.entries;
        let k = normalize(&mut entries);
        Self {
            entries,
            exp2: self.exp2 + rhs.exp2 + k,
            log_abs_det: self.log_abs_det + rhs.log_abs_det,
            det_sign: self.det_sign * rhs.det_sign,
        }
    }

    /// `self^n` by repeated squaring; `n = 0` gives the identity.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut result = Self::identity(self.dim());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Matrix inverse.
    ///
    /// Well-conditioned stored entries go through LU. Long products whose
    /// stored entries are numerically rank one go through the singular value
    /// decomposition: `V diag(prod_{j != k} s_j) U^T` is a positive multiple
    /// of the inverse that stays accurate in norm, and the multiple is
    /// recovered from the tracked determinant.
    pub fn inverse(&self) -> Self {
        if let Some(inv) = self
            .lu_if_well_conditioned()
            .and_then(|lu| lu.try_inverse())
        {
            let mut entries = inv;
            let k = normalize(&mut entries);
            return Self {
                entries,
                exp2: -self.exp2 + k,
                log_abs_det: -self.log_abs_det,
                det_sign: self.det_sign,
            };
        }
        let (u, w, v) = self.adjugate_factors();
        let n = self.dim();
        let mut entries = &v * DMatrix::from_diagonal(&w) * u.transpose();
        // stored^{-1} = entries * s1^(n-1) / |det stored|
        let s1 = self.stored_top_singular_value();
        let log_det_stored =
            self.log_abs_det - (self.exp2 * n as i64) as f64 * std::f64::consts::LN_2;
        let log_factor = (n as f64 - 1.0) * s1.ln() - log_det_stored;
        let l2 = log_factor / std::f64::consts::LN_2;
        let whole = l2.floor();
        entries *= (l2 - whole).exp2();
        let k = normalize(&mut entries);
        Self {
            entries,
            exp2: -self.exp2 + whole as i64 + k,
            log_abs_det: -self.log_abs_det,
            det_sign: self.det_sign,
        }
    }

    fn lu_if_well_conditioned(&self) -> Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
        let s = super::jacobi::singular_values(&self.entries).ok()?;
        let ratio = s[s.len() - 1] / s[0];
        (ratio > WELL_CONDITIONED).then(|| self.entries.clone().lu())
    }

    fn stored_top_singular_value(&self) -> f64 {
        spectral_norm(&self.entries).expect("stored entries are finite")
    }

    /// `(U, w, V)` with `w_k = prod_{j != k} s_j / s_1^(n-1)`, so that
    /// `V diag(w) U^T` is a positive multiple of the stored inverse.
    fn adjugate_factors(&self) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
        let mut d = super::jacobi::svd(&self.entries).expect("stored entries are finite");
        // When the smallest singular value is at rounding level the sign of
        // its left vector is noise; the tracked determinant sign fixes it.
        let orientation =
            d.u.clone().lu().determinant().signum() * d.v.clone().lu().determinant().signum();
        if orientation != self.det_sign {
            let last = d.u.ncols() - 1;
            d.u.column_mut(last).neg_mut();
        }
        let s1 = d.s[0];
        let n = d.s.len();
        let w = DVector::from_fn(n, |k, _| {
            (0..n)
                .filter(|&j| j != k)
                .map(|j| d.s[j] / s1)
                .product::<f64>()
        });
        (d.u, w, d.v)
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        Self {
            entries: self.entries.transpose(),
            exp2: self.exp2,
            log_abs_det: self.log_abs_det,
            det_sign: self.det_sign,
        }
    }

    /// Direction of `g v` (the scale is irrelevant projectively).
    pub fn apply_direction(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.entries * v
    }

    /// Solves `g^T x = n` up to scale: the image of a hyperplane normal
    /// under the dual action.
    pub fn dual_direction(&self, n: &DVector<f64>) -> DVector<f64> {
        if let Some(x) = self
            .lu_if_well_conditioned()
            .and_then(|_| self.entries.transpose().lu().solve(n))
        {
            return x;
        }
        let (u, w, v) = self.adjugate_factors();
        let c = DVector::from_fn(w.len(), |k, _| w[k] * v.column(k).dot(n));
        u * c
    }

    /// Frobenius distance between true entries, relative to `self`.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        // Compare at the larger of the two exponents so that overflowing
        // products still give a finite answer.
        let e = self.exp2.max(other.exp2);
        let a = &self.entries * ((self.exp2 - e) as f64).exp2();
        let b = &other.entries * ((other.exp2 - e) as f64).exp2();
        (&a - &b).norm() / a.norm().max(f64::MIN_POSITIVE)
    }
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(super::jacobi::singular_values(m)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_singular_and_bad_shapes() {
        assert!(matches!(
            SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(Error::SingularMatrix { .. })
        ));
        assert!(SquareMatrix::from_rows(&[vec![1.0]]).is_err());
        assert!(SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0]]).is_err());
    }

    #[test]
    fn scaling_is_exact_for_inputs() {
        let g = SquareMatrix::from_rows(&[vec![3.0, 5.0], vec![-7.0, 11.0]]).unwrap();
        assert_eq!(g.to_rows(), vec![vec![3.0, 5.0], vec![-7.0, 11.0]]);
        assert!((g.log_abs_det() - 68f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn long_powers_do_not_overflow() {
        let g = SquareMatrix::from_rows(&[vec![5.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let p = g.pow(600);
        assert!(p.scaled_entries().iter().all(|x| x.is_finite()));
        assert!(p.log_abs_det().abs() < 1e-9);
    }

    #[test]
    fn product_and_inverse() {
        let a = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let b = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(a.mul(&b).to_rows(), vec![vec![5.0, 2.0], vec![2.0, 1.0]]);
        let id = a.mul(&a.inverse());
        assert!(id.relative_distance(&SquareMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn inverse_of_numerically_rank_one_products() {
        let a = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let b = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![2.0, 1.0]]).unwrap();
        let g = a.mul(&b).pow(40);
        let gi = g.inverse();
        // g^{-1} = (b^{-1} a^{-1})^40, built from exact integer inverses
        let ai = SquareMatrix::from_rows(&[vec![1.0, -2.0], vec![0.0, 1.0]]).unwrap();
        let bi = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![-2.0, 1.0]]).unwrap();
        let oracle = bi.mul(&ai).pow(40);
        assert!(
            gi.relative_distance(&oracle) < 1e-12,
            "{}",
            gi.relative_distance(&oracle)
        );
        let n = DVector::from_vec(vec![0.3, -1.0]);
        let x = g.dual_direction(&n);
        let y = oracle.transpose().apply_direction(&n);
        let cross = x[0] * y[1] - x[1] * y[0];
        assert!(cross.abs() < 1e-12 * x.norm() * y.norm());
    }
}
