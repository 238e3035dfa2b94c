//! Alternating power iteration for the top singular pair, in the style of
//! hubs-and-authorities ranking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mat::norm;
use crate::model::DenseTrustMatrix;

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

/// Sign-insensitive distance between successive iterates.
fn ray_delta(a: &[f64], b: &[f64]) -> f64 {
    let plus: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let minus: f64 = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum();
    plus.min(minus).sqrt()
}

/// Iterates `u <- M^T v / |M^T v|`, `v <- M u / |M u|` from a seeded random
/// start until successive `u` change less than `eps`.
/// Returns `(lambda, u, v)` with `lambda = |M u|`.
pub fn top_singular_pair(
    m: &DenseTrustMatrix,
    max_iters: usize,
    eps: f64,
    seed: u64,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let a = m.values();
    if a.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if a.frobenius_norm() == 0.0 {
        return Err(Error::InvalidArgument("matrix is zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..a.rows()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    normalize(&mut v);

    let mut u_prev: Option<Vec<f64>> = None;
    let mut last_delta = f64::INFINITY;
    for _ in 0..max_iters {
        let mut u = a.matvec_t(&v);
        if normalize(&mut u) == 0.0 {
            // restarted: v landed in the kernel of M^T
            v = (0..a.rows()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            normalize(&mut v);
            continue;
        }
        let mut w = a.matvec(&u);
        let lambda = normalize(&mut w);
        if lambda == 0.0 {
            v = (0..a.rows()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            normalize(&mut v);
            continue;
        }
        v = w;
        if let Some(prev) = &u_prev {
            last_delta = ray_delta(&u, prev);
            if last_delta < eps {
                // canonical sign: largest-magnitude entry of u positive
                let pivot = u
                    .iter()
                    .enumerate()
                    .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
                    .map(|(i, _)| i)
                    .unwrap();
                if u[pivot] < 0.0 {
                    for x in u.iter_mut() {
                        *x = -*x;
                    }
                    for x in v.iter_mut() {
                        *x = -*x;
                    }
                }
                return Ok((lambda, u, v));
            }
        }
        u_prev = Some(u);
    }
    Err(Error::NoConvergence {
        residual: last_delta,
    })
}
