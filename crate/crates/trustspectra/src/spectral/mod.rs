//! Self-contained singular value decomposition of dense trust matrices.

mod bidiag;
mod golub_kahan;
mod jacobi;
mod power;

pub use power::top_singular_pair;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::model::DenseTrustMatrix;

/// Relative gap under which neighbouring singular values are treated as one
/// degenerate subspace; individual vectors are only subspace-unique there.
pub const DEGENERACY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvdMethod {
    GolubKahan,
    Jacobi,
}

/// `M = left * bidiag * right^T` with `bidiag` upper bidiagonal.
/// The factorization is thin: `left` is `m x min(m, n)` with orthonormal
/// columns, `bidiag` is `min(m, n) x n`, `right` is `n x n` orthogonal.
#[derive(Debug, Clone)]
pub struct BidiagonalFactorization {
    pub left: Mat,
    pub bidiag: Mat,
    pub right: Mat,
}

/// Householder bidiagonalization of a dense block.
pub fn bidiagonalize(m: &DenseTrustMatrix) -> Result<BidiagonalFactorization> {
    if m.values().is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let red = bidiag::reduce(m.values(), true);
    let p = red.left.cols();
    let band = Mat::from_fn(p, red.band.cols(), |i, j| red.band[(i, j)]);
    Ok(BidiagonalFactorization {
        left: red.left,
        bidiag: band,
        right: red.right,
    })
}

/// `M = V diag(lambdas) U^T` restricted to the numerically nonzero part of
/// the spectrum. Rows of `v` follow `row_ids` (trustees), rows of `u` follow
/// `col_ids` (trustors).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    row_ids: Vec<String>,
    col_ids: Vec<String>,
    lambdas: Vec<f64>,
    u: Mat,
    v: Mat,
    tol: f64,
}

impl SpectralDecomposition {
    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `|S| x r` matrix of subject-side singular vectors.
    pub fn u(&self) -> &Mat {
        &self.u
    }

    /// `|O| x r` matrix of object-side singular vectors.
    pub fn v(&self) -> &Mat {
        &self.v
    }

    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `V diag(lambdas) U^T`.
    pub fn reconstruct(&self) -> Mat {
        let r = self.rank();
        let lam = Mat::from_fn(r, r, |i, j| if i == j { self.lambdas[i] } else { 0.0 });
        self.v.matmul(&lam).matmul(&self.u.transpose())
    }

    /// Indices grouped by near-equal singular values. Groups of size >= 2 are
    /// degenerate subspaces: their individual vectors are basis-dependent.
    pub fn degenerate_groups(&self) -> Vec<Vec<usize>> {
        let mut groups = Vec::new();
        let mut current = vec![0usize];
        for i in 1..self.rank() {
            let prev = self.lambdas[i - 1];
            if (prev - self.lambdas[i]).abs() <= DEGENERACY_TOL * prev.abs().max(f64::MIN_POSITIVE)
            {
                current.push(i);
            } else {
                groups.push(std::mem::replace(&mut current, vec![i]));
            }
        }
        if self.rank() > 0 {
            groups.push(current);
        }
        groups
    }

    pub fn is_degenerate(&self, index: usize) -> bool {
        self.degenerate_groups()
            .iter()
            .any(|g| g.len() >= 2 && g.contains(&index))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionWire {
    row_ids: Vec<String>,
    col_ids: Vec<String>,
    lambdas: Vec<f64>,
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    tol: f64,
    rank: usize,
}

impl Serialize for SpectralDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionWire {
            row_ids: self.row_ids.clone(),
            col_ids: self.col_ids.clone(),
            lambdas: self.lambdas.clone(),
            u: self.u.to_nested(),
            v: self.v.to_nested(),
            tol: self.tol,
            rank: self.rank(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpectralDecomposition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = DecompositionWire::deserialize(d)?;
        if wire.rank != wire.lambdas.len() {
            return Err(serde::de::Error::custom("rank does not match lambdas"));
        }
        let u = Mat::from_rows(&wire.u);
        let v = Mat::from_rows(&wire.v);
        if u.rows() != wire.col_ids.len()
            || v.rows() != wire.row_ids.len()
            || u.cols() != wire.rank
            || v.cols() != wire.rank
        {
            return Err(serde::de::Error::custom("inconsistent factor shapes"));
        }
        Ok(SpectralDecomposition {
            row_ids: wire.row_ids,
            col_ids: wire.col_ids,
            lambdas: wire.lambdas,
            u,
            v,
            tol: wire.tol,
        })
    }
}

/// Full SVD with rank cut at `max(tol, eps * max(dim) * lambda_1)`.
///
/// Both methods run on the taller orientation of the input; row/column roles
/// are restored afterwards.
pub fn svd(m: &DenseTrustMatrix, tol: f64, method: SvdMethod) -> Result<SpectralDecomposition> {
    if m.values().is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if tol < 0.0 {
        return Err(Error::InvalidArgument("tol must be >= 0".into()));
    }
    let a = m.values();
    let transposed = a.rows() < a.cols();
    let work = if transposed { a.transpose() } else { a.clone() };
    let (left, sigma, right) = match method {
        SvdMethod::GolubKahan => golub_kahan::decompose(&work)?,
        SvdMethod::Jacobi => jacobi::decompose(&work)?,
    };
    // M = V diag U^T: V holds object-side vectors, U subject-side
    let (v_full, u_full) = if transposed {
        (right, left)
    } else {
        (left, right)
    };

    let lambda1 = sigma.first().copied().unwrap_or(0.0);
    let tol_eff = tol.max(f64::EPSILON * a.rows().max(a.cols()) as f64 * lambda1);
    let rank = sigma.iter().take_while(|&&s| s > tol_eff).count();

    let mut u = Mat::from_fn(a.cols(), rank, |i, j| u_full[(i, j)]);
    let mut v = Mat::from_fn(a.rows(), rank, |i, j| v_full[(i, j)]);
    canonicalize_signs(&mut u, &mut v);

    Ok(SpectralDecomposition {
        row_ids: m.row_ids().to_vec(),
        col_ids: m.col_ids().to_vec(),
        lambdas: sigma[..rank].to_vec(),
        u,
        v,
        tol,
    })
}

/// Keeps the first k singular triples.
pub fn truncate(d: &SpectralDecomposition, k: usize) -> Result<SpectralDecomposition> {
    if k < 1 || k > d.rank() {
        return Err(Error::RankOutOfRange {
            index: k,
            rank: d.rank(),
        });
    }
    Ok(SpectralDecomposition {
        row_ids: d.row_ids.clone(),
        col_ids: d.col_ids.clone(),
        lambdas: d.lambdas[..k].to_vec(),
        u: Mat::from_fn(d.u.rows(), k, |i, j| d.u[(i, j)]),
        v: Mat::from_fn(d.v.rows(), k, |i, j| d.v[(i, j)]),
        tol: d.tol,
    })
}

/// In each column of `u` the largest-magnitude entry is made positive (ties:
/// lowest index); the matching column of `v` flips together with it.
fn canonicalize_signs(u: &mut Mat, v: &mut Mat) {
    for j in 0..u.cols() {
        let mut pivot = 0;
        let mut best = -1.0f64;
        for i in 0..u.rows() {
            if u[(i, j)].abs() > best {
                best = u[(i, j)].abs();
                pivot = i;
            }
        }
        if u[(pivot, j)] < 0.0 {
            for i in 0..u.rows() {
                u[(i, j)] = -u[(i, j)];
            }
            for i in 0..v.rows() {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
}
