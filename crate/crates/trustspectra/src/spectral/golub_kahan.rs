//! Bidiagonalize-then-iterate SVD: Householder reduction followed by
//! implicit-shift (Wilkinson) QR sweeps on the bidiagonal core.

use crate::error::{Error, Result};
use crate::mat::Mat;

use super::bidiag;

/// Plane rotation with `c*a + s*b = r`, `-s*a + c*b = 0`.
fn givens(a: f64, b: f64) -> (f64, f64, f64) {
    if b == 0.0 {
        (1.0, 0.0, a)
    } else {
        let r = a.hypot(b);
        (a / r, b / r, r)
    }
}

/// Mixes columns x and y of `m`: x' = c x + s y, y' = -s x + c y.
fn rot_cols(m: &mut Mat, x: usize, y: usize, c: f64, s: f64) {
    for i in 0..m.rows() {
        let (a, b) = (m[(i, x)], m[(i, y)]);
        m[(i, x)] = c * a + s * b;
        m[(i, y)] = -s * a + c * b;
    }
}

/// Wilkinson shift from the trailing 2x2 of B^T B over the active block.
fn wilkinson_shift(d: &[f64], e: &[f64], l: usize, h: usize) -> f64 {
    let t11 = d[h - 1] * d[h - 1] + if h - 1 > l { e[h - 2] * e[h - 2] } else { 0.0 };
    let t12 = d[h - 1] * e[h - 1];
    let t22 = d[h] * d[h] + e[h - 1] * e[h - 1];
    if t12 == 0.0 {
        return t22;
    }
    let delta = (t11 - t22) / 2.0;
    let sgn = if delta >= 0.0 { 1.0 } else { -1.0 };
    t22 - t12 * t12 / (delta + sgn * delta.hypot(t12))
}

/// One implicit-shift QR sweep on the block d[l..=h], chasing the bulge down
/// the band while accumulating rotations into `q` (left) and `p` (right).
fn qr_step(d: &mut [f64], e: &mut [f64], l: usize, h: usize, q: &mut Mat, p: &mut Mat) {
    let mu = wilkinson_shift(d, e, l, h);
    let mut y = d[l] * d[l] - mu;
    let mut z = d[l] * e[l];
    for k in l..h {
        // right rotation on columns (k, k+1)
        let (c, s, r) = givens(y, z);
        if k > l {
            e[k - 1] = r;
        }
        let (dk, ek) = (d[k], e[k]);
        d[k] = c * dk + s * ek;
        e[k] = -s * dk + c * ek;
        let bulge = s * d[k + 1];
        d[k + 1] *= c;
        rot_cols(p, k, k + 1, c, s);

        // left rotation on rows (k, k+1) removes the bulge below the diagonal
        let (c2, s2, r2) = givens(d[k], bulge);
        d[k] = r2;
        let (ek, dk1) = (e[k], d[k + 1]);
        e[k] = c2 * ek + s2 * dk1;
        d[k + 1] = -s2 * ek + c2 * dk1;
        rot_cols(q, k, k + 1, c2, s2);
        if k < h - 1 {
            y = e[k];
            z = s2 * e[k + 1];
            e[k + 1] *= c2;
        }
    }
}

/// Zero diagonal entry inside the block: chase e[i] to the right with left
/// rotations so the block splits at i.
fn chase_zero_row(d: &mut [f64], e: &mut [f64], i: usize, h: usize, q: &mut Mat) {
    let mut f = e[i];
    e[i] = 0.0;
    for j in i + 1..=h {
        let (c, s, r) = givens(d[j], f);
        d[j] = r;
        rot_cols(q, j, i, c, s);
        if j < h {
            f = -s * e[j];
            e[j] *= c;
        }
    }
}

/// Zero diagonal entry at the bottom of the block: chase e[h-1] upward with
/// right rotations.
fn chase_zero_col(d: &mut [f64], e: &mut [f64], l: usize, h: usize, p: &mut Mat) {
    let mut f = e[h - 1];
    e[h - 1] = 0.0;
    for j in (l..h).rev() {
        let (c, s, r) = givens(d[j], f);
        d[j] = r;
        rot_cols(p, j, h, c, s);
        if j > l {
            f = -s * e[j - 1];
            e[j - 1] *= c;
        }
    }
}

/// Thin SVD of a tall matrix (`rows >= cols`): `a = left * diag(sigma) * right^T`
/// with `sigma` descending and nonnegative.
pub(crate) fn decompose(a: &Mat) -> Result<(Mat, Vec<f64>, Mat)> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let red = bidiag::reduce(a, true);
    let mut q = red.left; // m x n
    let mut p = red.right; // n x n
    let mut d: Vec<f64> = (0..n).map(|i| red.band[(i, i)]).collect();
    let mut e: Vec<f64> = (0..n.saturating_sub(1))
        .map(|i| red.band[(i, i + 1)])
        .collect();

    let eps = f64::EPSILON;
    let bnorm = d
        .iter()
        .chain(e.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let dthresh = eps * bnorm;
    let max_iter = 100 * n.max(1);
    let mut iter = 0usize;

    if n > 0 {
        loop {
            for i in 0..n - 1 {
                if e[i].abs() <= eps * (d[i].abs() + d[i + 1].abs()) {
                    e[i] = 0.0;
                }
            }
            let mut h = n - 1;
            while h > 0 && e[h - 1] == 0.0 {
                h -= 1;
            }
            if h == 0 {
                break;
            }
            let mut l = h;
            while l > 0 && e[l - 1] != 0.0 {
                l -= 1;
            }
            if let Some(i) = (l..h).find(|&i| d[i].abs() <= dthresh) {
                d[i] = 0.0;
                chase_zero_row(&mut d, &mut e, i, h, &mut q);
                continue;
            }
            if d[h].abs() <= dthresh {
                d[h] = 0.0;
                chase_zero_col(&mut d, &mut e, l, h, &mut p);
                continue;
            }
            iter += 1;
            if iter > max_iter {
                let residual = e.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                return Err(Error::NoConvergence { residual });
            }
            qr_step(&mut d, &mut e, l, h, &mut q, &mut p);
        }
    }

    // fold signs into the left factor, then sort descending
    for (i, di) in d.iter_mut().enumerate() {
        if *di < 0.0 {
            *di = -*di;
            for r in 0..q.rows() {
                q[(r, i)] = -q[(r, i)];
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].partial_cmp(&d[x]).unwrap());
    let sigma: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let left = Mat::from_fn(m, n, |r, c| q[(r, order[c])]);
    let right = Mat::from_fn(n, n, |r, c| p[(r, order[c])]);
    Ok((left, sigma, right))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &Mat) {
        let (u, s, v) = decompose(a).unwrap();
        let n = a.cols();
        let sig = Mat::from_fn(n, n, |i, j| if i == j { s[i] } else { 0.0 });
        let rec = u.matmul(&sig).matmul(&v.transpose());
        let scale = a.frobenius_norm().max(1.0);
        assert!(
            rec.sub(a).frobenius_norm() <= 1e-10 * scale,
            "reconstruction failed: {:e}",
            rec.sub(a).frobenius_norm()
        );
        assert!(u.transpose().matmul(&u).sub(&Mat::identity(n)).max_abs() <= 1e-11);
        assert!(v.transpose().matmul(&v).sub(&Mat::identity(n)).max_abs() <= 1e-11);
        for w in s.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(s.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn square_matrix() {
        check(&Mat::from_fn(6, 6, |i, j| ((i * 5 + j * 11) % 13) as f64 - 6.0));
    }

    #[test]
    fn tall_matrix() {
        check(&Mat::from_fn(9, 4, |i, j| ((i * 3 + j * 7) % 10) as f64 - 4.5));
    }

    #[test]
    fn rank_deficient() {
        // rank 1 by construction
        let a = Mat::from_fn(5, 3, |i, j| (i as f64 + 1.0) * (j as f64 + 1.0));
        let (_, s, _) = decompose(&a).unwrap();
        assert!(s[1] <= 1e-12 * s[0]);
        check(&a);
    }

    #[test]
    fn zero_matrix() {
        let a = Mat::zeros(4, 3);
        let (_, s, _) = decompose(&a).unwrap();
        assert!(s.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn diagonal_with_zero_inside() {
        let a = Mat::from_fn(4, 4, |i, j| {
            if i == j {
                [2.0, 0.0, 1.0, 3.0][i]
            } else if j == i + 1 {
                0.5
            } else {
                0.0
            }
        });
        check(&a);
    }
}
