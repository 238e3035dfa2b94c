//! One-sided Jacobi SVD: rotate column pairs until all columns are mutually
//! orthogonal. Slower than the bidiagonal route but very accurate, which is
//! why it doubles as the cross-check method.

use crate::error::{Error, Result};
use crate::mat::Mat;

const SWEEP_CAP: usize = 60;
const ORTH_TOL: f64 = 1e-15;

/// Thin SVD of a tall matrix (`rows >= cols`): `a = left * diag(sigma) * right^T`
/// with `sigma` descending and nonnegative.
pub(crate) fn decompose(a: &Mat) -> Result<(Mat, Vec<f64>, Mat)> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut w = a.clone();
    let mut v = Mat::identity(n);

    let mut worst = 0.0f64;
    let mut converged = n < 2;
    for _ in 0..SWEEP_CAP {
        if n < 2 {
            break;
        }
        worst = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                let rel = apq.abs() / (app * aqq).sqrt();
                worst = worst.max(rel);
                if rel <= ORTH_TOL {
                    continue;
                }
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if worst <= ORTH_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { residual: worst });
    }

    let mut sigma: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)] * w[(i, j)]).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    sigma = sorted;
    let left = Mat::from_fn(m, n, |i, c| {
        let j = order[c];
        if sigma[c] > 0.0 {
            w[(i, j)] / sigma[c]
        } else {
            0.0
        }
    });
    let right = Mat::from_fn(n, n, |i, c| v[(i, order[c])]);
    Ok((left, sigma, right))
}
