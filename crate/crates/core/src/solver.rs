//! Jacobi-preconditioned conjugate gradients for the SPD step systems.

use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, CsrMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    /// Relative residual target `‖b − Ax‖ ≤ tol ‖b‖`.
    pub tol: f64,
    /// Iteration cap; `None` means `10 n`.
    pub max_iter: Option<usize>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-10,
            max_iter: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Solve `A x = b` starting from `x0`.
///
/// A non-converged run is not an error: the report says so and the caller
/// decides. Zero (or negative) diagonal entries are rejected up front.
pub fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolverReport)> {
    let n = a.nrows();
    if b.len() != n || x0.len() != n || a.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            found: b.len().min(x0.len()),
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .enumerate()
        .map(|(i, &d)| if d > 0.0 { Ok(1.0 / d) } else { Err(Error::ZeroDiagonal(i)) })
        .collect::<Result<_>>()?;

    let b_norm = norm2(b);
    let mut x = x0.to_vec();
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok((
            x,
            SolverReport {
                iterations: 0,
                residual: 0.0,
                converged: true,
            },
        ));
    }

    let mut r = a.mul_vec(&x);
    r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    let mut res = norm2(&r) / b_norm;
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, d)| ri * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut it = 0;

    while res > tol && it < max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        it += 1;
        res = norm2(&r) / b_norm;
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    Ok((
        x,
        SolverReport {
            iterations: it,
            residual: res,
            converged: res <= tol,
        },
    ))
}

/// [`pcg`] with [`SolverSettings`], turning non-convergence into an error.
pub fn solve(a: &CsrMatrix, b: &[f64], x0: &[f64], settings: &SolverSettings) -> Result<(Vec<f64>, SolverReport)> {
    let max_iter = settings.max_iter.unwrap_or(10 * a.nrows().max(1));
    let (x, report) = pcg(a, b, x0, settings.tol, max_iter)?;
    if !report.converged {
        return Err(Error::SolverDiverged {
            iterations: report.iterations,
            residual: report.residual,
        });
    }
    Ok((x, report))
}
