//! Trust concepts mined from a spectral decomposition: the concept spectrum,
//! rank-1 qualified trust matrices, and per-edge trust decompositions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat::{norm, Mat};
use crate::model::DenseTrustMatrix;
use crate::similarity::Ray;
use crate::spectral::SpectralDecomposition;

/// One singular triple: a pair of correlated trustor/trustee communities
/// weighted by its singular value. Indices are 1-based, descending by weight.
///
/// The two rays carry paired signs from the decomposition, so
/// `M u = lambda v` holds with the stored representatives.
#[derive(Debug, Clone, Serialize)]
pub struct Concept {
    pub index: usize,
    pub lambda: f64,
    pub subject_ray: Ray,
    pub object_ray: Ray,
    pub degenerate: bool,
}

/// Rank-1 qualified trust matrix `F = v u^T` for a single concept.
#[derive(Debug, Clone)]
pub struct QualifiedMatrix {
    pub concept_index: usize,
    pub values: Mat,
}

/// Extracts the concept list from a decomposition, verifying the singular
/// triple residuals against the source matrix. A residual above the bound
/// signals a stale decomposition.
pub fn concept_spectrum(
    d: &SpectralDecomposition,
    m: &DenseTrustMatrix,
) -> Result<Vec<Concept>> {
    if d.row_ids() != m.row_ids() || d.col_ids() != m.col_ids() {
        return Err(Error::InvalidArgument(
            "decomposition ids do not match the matrix".into(),
        ));
    }
    let lambda1 = d.lambdas().first().copied().unwrap_or(0.0);
    let bound = 1e-8 * lambda1;
    let mut out = Vec::with_capacity(d.rank());
    for idx in 0..d.rank() {
        let lambda = d.lambdas()[idx];
        let u = d.u().col(idx);
        let v = d.v().col(idx);
        let mu = m.values().matvec(&u);
        let res_v: f64 = norm(
            &mu.iter()
                .zip(&v)
                .map(|(a, b)| a - lambda * b)
                .collect::<Vec<_>>(),
        );
        let mtv = m.values().matvec_t(&v);
        let res_u: f64 = norm(
            &mtv.iter()
                .zip(&u)
                .map(|(a, b)| a - lambda * b)
                .collect::<Vec<_>>(),
        );
        if res_v > bound || res_u > bound {
            return Err(Error::InvalidArgument(format!(
                "stale decomposition: concept {} residual {:e}",
                idx + 1,
                res_v.max(res_u)
            )));
        }
        out.push(Concept {
            index: idx + 1,
            lambda,
            subject_ray: Ray::from_unit_signed(u),
            object_ray: Ray::from_unit_signed(v),
            degenerate: d.is_degenerate(idx),
        });
    }
    Ok(out)
}

/// `F_phi = v u^T`.
pub fn qualified_matrix(c: &Concept) -> QualifiedMatrix {
    QualifiedMatrix {
        concept_index: c.index,
        values: Mat::outer(c.object_ray.direction(), c.subject_ray.direction()),
    }
}

/// The similarity-preserving matrix `F = V U^T`, equal to the sum of all
/// qualified matrices.
pub fn similarity_preserving_matrix(d: &SpectralDecomposition) -> Mat {
    d.v().matmul(&d.u().transpose())
}

/// `sum(lambda_phi F_phi) = V diag U^T`; equals the source matrix within the
/// decomposition's reconstruction bound.
pub fn reconstruct(d: &SpectralDecomposition) -> Mat {
    d.reconstruct()
}

/// Contribution of one concept to one trust rating.
#[derive(Debug, Clone, Serialize)]
pub struct EdgeComponent {
    pub concept: usize,
    pub r: f64,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeDecomposition {
    pub subject: String,
    pub object: String,
    pub total: f64,
    pub components: Vec<EdgeComponent>,
}

/// Splits one trust rating into per-concept contributions
/// `r_phi = lambda_phi * U[subject, phi] * V[object, phi]`; their sum is the
/// reconstructed entry.
pub fn decompose_edge(
    d: &SpectralDecomposition,
    subject: &str,
    object: &str,
) -> Result<EdgeDecomposition> {
    let s = d
        .col_ids()
        .iter()
        .position(|id| id == subject)
        .ok_or_else(|| Error::UnknownId(subject.to_string()))?;
    let o = d
        .row_ids()
        .iter()
        .position(|id| id == object)
        .ok_or_else(|| Error::UnknownId(object.to_string()))?;
    let components: Vec<EdgeComponent> = (0..d.rank())
        .map(|idx| EdgeComponent {
            concept: idx + 1,
            r: d.lambdas()[idx] * d.u()[(s, idx)] * d.v()[(o, idx)],
            degenerate: d.is_degenerate(idx),
        })
        .collect();
    let total = components.iter().map(|c| c.r).sum();
    Ok(EdgeDecomposition {
        subject: subject.to_string(),
        object: object.to_string(),
        total,
        components,
    })
}
