use nalgebra::{DMatrix, DVector, Schur};

use super::matrix::SquareMatrix;
use super::space::{ProjFlag, ProjHyperplane, ProjPoint};
use crate::error::{Error, Result};
use crate::tolerances::{EIG_EPS, SOLVER_MAX_ITER, SVD_RECONSTRUCTION, TAU_SVDGAP};

/// Sorted log singular values `mu_1 >= ... >= mu_d` (nats).
#[derive(Clone, Debug, PartialEq)]
pub struct CartanVector {
    pub values: Vec<f64>,
}

/// Sorted log moduli of the complex eigenvalues (nats).
#[derive(Clone, Debug, PartialEq)]
pub struct JordanVector {
    pub values: Vec<f64>,
}

impl CartanVector {
    pub fn gap(&self) -> f64 {
        self.values[0] - self.values[1]
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }
}

impl JordanVector {
    pub fn gap(&self) -> f64 {
        self.values[0] - self.values[1]
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }
}

/// The norm used on Cartan and Jordan vectors throughout.
pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// `||a - b||_inf`.
pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Singular value decomposition of the stored entries, with the log
/// singular values shifted back to the true scale.
#[derive(Clone, Debug)]
pub(crate) struct SvdFrame {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub mu: Vec<f64>,
}

impl SvdFrame {
    /// `exp(mu_i - mu_1)`.
    pub fn ratios(&self) -> Vec<f64> {
        self.mu.iter().map(|m| (m - self.mu[0]).exp()).collect()
    }
}

pub(crate) fn svd_frame(g: &SquareMatrix) -> Result<SvdFrame> {
    let a = g.scaled_entries();
    let d = g.dim();
    let svd = super::jacobi::svd(a)?;
    let (u, v) = (svd.u, svd.v);
    let s = &svd.s;
    let recon = &u * DMatrix::from_diagonal(s) * v.transpose();
    let err = (&recon - a).norm();
    if !(err <= SVD_RECONSTRUCTION * a.norm()) {
        return Err(Error::NumericalFailure(format!(
            "SVD reconstruction residual {err:e} too large"
        )));
    }
    let shift = g.log_scale();
    let mut mu: Vec<f64> = s.iter().map(|x| x.ln() + shift).collect();
    if d == 2 {
        // The determinant identity is exact where the small singular value
        // is lost to rounding.
        mu[1] = g.log_abs_det() - mu[0];
    }
    Ok(SvdFrame { u, v, mu })
}

/// Log singular values, nonincreasing. Singular values below the floating
/// point resolution of the stored entries are lost; for powers use
/// [`cartan_projection_power`].
pub fn cartan_projection(g: &SquareMatrix) -> Result<CartanVector> {
    let f = svd_frame(g)?;
    let mut values = f.mu;
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure(
            "singular value below floating point resolution".into(),
        ));
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(CartanVector { values })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Matrix of `∧^k a` in the basis of increasing index subsets.
pub fn exterior_power(a: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let idx = subsets(a.nrows(), k);
    let n = idx.len();
    DMatrix::from_fn(n, n, |i, j| {
        let minor = DMatrix::from_fn(k, k, |p, q| a[(idx[i][p], idx[j][q])]);
        minor.determinant()
    })
}

/// Cartan projection of `g^n` computed through exterior powers.
///
/// `mu_1 + ... + mu_k` is the log operator norm of `(∧^k g)^n`, which stays
/// accurate even when the singular values of `g^n` spread beyond the
/// floating point range of a single matrix.
pub fn cartan_projection_power(g: &SquareMatrix, n: u64) -> Result<CartanVector> {
    let d = g.dim();
    let a = g.scaled_entries();
    let mut partial = vec![0.0; d + 1];
    for k in 1..d {
        let ext = exterior_power(a, k);
        let shift = (k as f64) * g.log_scale();
        let pow = if ext.nrows() >= 2 {
            let m = SquareMatrix::from_dmatrix(ext)?;
            let p = m.pow(n);
            super::matrix::spectral_norm(p.scaled_entries())?.ln() + p.log_scale()
        } else {
            unreachable!("k < d gives at least two subsets")
        };
        partial[k] = pow + n as f64 * shift;
    }
    partial[d] = n as f64 * g.log_abs_det();
    let mut values: Vec<f64> = (1..=d).map(|k| partial[k] - partial[k - 1]).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(CartanVector { values })
}

pub(crate) fn eigenvalues(g: &SquareMatrix) -> Result<Vec<nalgebra::Complex<f64>>> {
    let schur = Schur::try_new(g.scaled_entries().clone(), EIG_EPS, SOLVER_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("eigensolver did not converge".into()))?;
    let mut ev: Vec<_> = schur.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    Ok(ev)
}

/// Log moduli of the complex eigenvalues, nonincreasing.
pub fn jordan_projection(g: &SquareMatrix) -> Result<JordanVector> {
    let ev = eigenvalues(g)?;
    let shift = g.log_scale();
    let mut values: Vec<f64> = ev.iter().map(|z| z.norm().ln() + shift).collect();
    if g.dim() == 2 {
        if ev[0].im != 0.0 {
            let half = 0.5 * g.log_abs_det();
            values = vec![half, half];
        } else {
            values[1] = g.log_abs_det() - values[0];
        }
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(JordanVector { values })
}

fn null_vector(m: DMatrix<f64>) -> Result<DVector<f64>> {
    let v = super::jacobi::svd(&m)?.v;
    Ok(v.column(v.ncols() - 1).into_owned())
}

/// Attracting point and repelling hyperplane of a proximal matrix.
///
/// Fails with `NotProximal` unless `lambda_1 - lambda_2 > spectral_tol`.
pub fn proximal_data(g: &SquareMatrix, spectral_tol: f64) -> Result<ProjFlag> {
    let lambda = jordan_projection(g)?;
    let gap = lambda.gap();
    if !(gap > spectral_tol) {
        return Err(Error::NotProximal { gap });
    }
    let ev = eigenvalues(g)?;
    let top = ev[0];
    if top.im.abs() > 1e-12 * top.norm() {
        return Err(Error::NotProximal { gap: 0.0 });
    }
    let t = top.re;
    let a = g.scaled_entries();
    let d = g.dim();
    let id = DMatrix::<f64>::identity(d, d);
    let attractor = null_vector(a - &id * t)?;
    let normal = null_vector(a.transpose() - id * t)?;
    Ok(ProjFlag::new(
        ProjPoint::new(attractor)?,
        ProjHyperplane::from_normal(normal)?,
    ))
}

/// `(y_g^+, Y_g^-)` read off a computed singular value decomposition:
/// `y^+` is the top left singular vector, `Y^-` the orthogonal complement of
/// the top right singular vector.
pub fn svd_attractor(g: &SquareMatrix) -> Result<ProjFlag> {
    let f = svd_frame(g)?;
    let flag = flag_from_frame(&f)?;
    let gap = f.mu[0] - f.mu[1];
    if gap < TAU_SVDGAP {
        return Err(Error::Ambiguous {
            gap,
            flag: Box::new(flag),
        });
    }
    Ok(flag)
}

pub(crate) fn flag_from_frame(f: &SvdFrame) -> Result<ProjFlag> {
    let y = ProjPoint::new(f.u.column(0).into_owned())?;
    let h = ProjHyperplane::from_normal(f.v.column(0).into_owned())?;
    Ok(ProjFlag::new(y, h))
}

/// The SVD flag, accepting ambiguous decompositions.
pub fn svd_flag_lenient(g: &SquareMatrix) -> Result<ProjFlag> {
    match svd_attractor(g) {
        Ok(f) => Ok(f),
        Err(Error::Ambiguous { flag, .. }) => Ok(*flag),
        Err(e) => Err(e),
    }
}
