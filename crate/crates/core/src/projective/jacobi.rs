//! One-sided Jacobi SVD.
//!
//! The bidiagonal solver shipped with nalgebra loses accuracy on nearly
//! rank-one matrices (relative residuals around 1e-3 on powers of
//! `[[5, 2], [2, 1]]`); plane rotations of column pairs keep the residual at
//! rounding level and the small singular values accurate relative to the
//! matrix norm.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `a = u diag(s) v^T` with `s` nonincreasing. For an `m x n` input,
/// `u` is `m x k`, `v` is `n x k` with `k = min(m, n)`.
#[derive(Clone, Debug)]
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn svd(a: &DMatrix<f64>) -> Result<Svd> {
    if a.nrows() < a.ncols() {
        let t = svd(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure("SVD of a non-finite matrix".into()));
    }
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let tol = f64::EPSILON * m as f64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(
            "Jacobi SVD did not converge".into(),
        ));
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s = DVector::from_iterator(n, order.iter().map(|&j| norms[j]));
    let v = DMatrix::from_columns(
        &order
            .iter()
            .map(|&j| v.column(j).into_owned())
            .collect::<Vec<_>>(),
    );
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    for &j in &order {
        let c = if norms[j] > f64::MIN_POSITIVE {
            w.column(j) / norms[j]
        } else {
            complete(&cols, m)
        };
        cols.push(c);
    }
    Ok(Svd {
        u: DMatrix::from_columns(&cols),
        s,
        v,
    })
}

fn rotate(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let a = m[(i, p)];
        let b = m[(i, q)];
        m[(i, p)] = c * a - s * b;
        m[(i, q)] = s * a + c * b;
    }
}

/// A unit vector orthogonal to `cols`.
fn complete(cols: &[DVector<f64>], m: usize) -> DVector<f64> {
    let mut best = DVector::zeros(m);
    for k in 0..m {
        let mut e = DVector::from_fn(m, |i, _| if i == k { 1.0 } else { 0.0 });
        for c in cols {
            e -= c * c.dot(&e);
        }
        if e.norm() > best.norm() {
            best = e;
        }
    }
    best.normalize()
}

pub(crate) fn singular_values(a: &DMatrix<f64>) -> Result<DVector<f64>> {
    Ok(svd(a)?.s)
}
