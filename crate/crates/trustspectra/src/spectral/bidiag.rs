//! Householder bidiagonalization, applied alternately from the left and the
//! right.

use crate::mat::Mat;

pub(crate) struct Reduction {
    /// Left orthogonal accumulator, `m x p` (p = m full, min(m,n) thin).
    pub left: Mat,
    /// The reduced matrix, upper bidiagonal.
    pub band: Mat,
    /// Right orthogonal accumulator, `n x n`.
    pub right: Mat,
}

/// Householder vector annihilating `x[1..]`. Returns None when nothing to do,
/// so an already-bidiagonal input passes through untouched.
fn householder(x: &[f64]) -> Option<(Vec<f64>, f64)> {
    if x.len() < 2 || x[1..].iter().all(|&v| v == 0.0) {
        return None;
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let alpha = if x[0] >= 0.0 { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vtv: f64 = v.iter().map(|a| a * a).sum();
    Some((v, 2.0 / vtv))
}

/// Applies `H = I - beta v v^T` to rows `k..` of `a`, columns `from..`.
fn apply_left(a: &mut Mat, k: usize, v: &[f64], beta: f64, from: usize) {
    for j in from..a.cols() {
        let mut s = 0.0;
        for (t, vt) in v.iter().enumerate() {
            s += vt * a[(k + t, j)];
        }
        s *= beta;
        for (t, vt) in v.iter().enumerate() {
            a[(k + t, j)] -= s * vt;
        }
    }
}

/// Applies `H` to columns `k..` of `a`, rows `from..` (right multiplication).
fn apply_right(a: &mut Mat, k: usize, v: &[f64], beta: f64, from: usize) {
    for i in from..a.rows() {
        let mut s = 0.0;
        for (t, vt) in v.iter().enumerate() {
            s += vt * a[(i, k + t)];
        }
        s *= beta;
        for (t, vt) in v.iter().enumerate() {
            a[(i, k + t)] -= s * vt;
        }
    }
}

/// Reduces `a` to upper bidiagonal form `a = left * band * right^T`.
pub(crate) fn reduce(a: &Mat, thin_left: bool) -> Reduction {
    let (m, n) = (a.rows(), a.cols());
    let mut band = a.clone();
    let mut left_refl: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    let mut right_refl: Vec<(usize, Vec<f64>, f64)> = Vec::new();

    for k in 0..m.min(n) {
        // zero column k below the diagonal
        let col: Vec<f64> = (k..m).map(|i| band[(i, k)]).collect();
        if let Some((v, beta)) = householder(&col) {
            apply_left(&mut band, k, &v, beta, k);
            for i in k + 1..m {
                band[(i, k)] = 0.0;
            }
            left_refl.push((k, v, beta));
        }
        // zero row k beyond the superdiagonal
        if k + 2 < n {
            let row: Vec<f64> = (k + 1..n).map(|j| band[(k, j)]).collect();
            if let Some((v, beta)) = householder(&row) {
                apply_right(&mut band, k + 1, &v, beta, k);
                for j in k + 2..n {
                    band[(k, j)] = 0.0;
                }
                right_refl.push((k + 1, v, beta));
            }
        }
    }

    // accumulate products backwards: H_1 (H_2 (... H_p I))
    let p = if thin_left { m.min(n) } else { m };
    let mut left = Mat::identity_rect(m, p);
    for (k, v, beta) in left_refl.iter().rev() {
        apply_left(&mut left, *k, v, *beta, 0);
    }
    let mut right = Mat::identity(n);
    for (k, v, beta) in right_refl.iter().rev() {
        apply_left(&mut right, *k, v, *beta, 0);
    }
    Reduction { left, band, right }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(r: &Reduction) -> Mat {
        r.left.matmul(&r.band).matmul(&r.right.transpose())
    }

    #[test]
    fn reduce_reconstructs_tall() {
        let a = Mat::from_fn(7, 4, |i, j| ((3 * i + 5 * j) % 11) as f64 - 4.0);
        let r = reduce(&a, false);
        assert!(reconstruct(&r).sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn reduce_reconstructs_tall_thin() {
        let a = Mat::from_fn(7, 4, |i, j| ((3 * i + 5 * j) % 11) as f64 - 4.0);
        let r = reduce(&a, true);
        assert_eq!(r.left.cols(), 4);
        // thin left still has orthonormal columns
        let g = r.left.transpose().matmul(&r.left);
        assert!(g.sub(&Mat::identity(4)).max_abs() <= 1e-13);
        // band rows beyond n are zero, so thin reconstruction is exact
        let core = Mat::from_fn(4, 4, |i, j| r.band[(i, j)]);
        let rec = r.left.matmul(&core).matmul(&r.right.transpose());
        assert!(rec.sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn reduce_reconstructs_wide() {
        let a = Mat::from_fn(3, 6, |i, j| (i as f64 + 1.0) * (j as f64 - 2.5));
        let r = reduce(&a, false);
        assert!(reconstruct(&r).sub(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn band_structure() {
        let a = Mat::from_fn(5, 5, |i, j| (i * 7 + j * 3) as f64 % 6.0 - 2.0);
        let r = reduce(&a, false);
        for i in 0..5 {
            for j in 0..5 {
                if j != i && j != i + 1 {
                    assert_eq!(r.band[(i, j)], 0.0, "nonzero at ({i},{j})");
                }
            }
        }
    }
}
