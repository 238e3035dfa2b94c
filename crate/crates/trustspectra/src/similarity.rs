//! Similarity networks over communities of trustors/trustees, the induced
//! map of a trust matrix on rays, and the similarity-preserving map obtained
//! by factoring the singular values out of the decomposition.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat::{dot, norm, Mat};
use crate::model::DenseTrustMatrix;
use crate::spectral::SpectralDecomposition;

/// Two rays are the same when their similarity reaches this bound.
pub const RAY_EQ_TOL: f64 = 1e-9;

/// Image vectors shorter than this (relative to the operator scale) count as
/// kernel hits.
const KERNEL_TOL: f64 = 1e-12;

/// A community: a 1-dimensional subspace, stored as a canonically signed unit
/// vector (largest-magnitude entry positive, ties to the lowest index).
#[derive(Debug, Clone, Serialize)]
pub struct Ray {
    direction: Vec<f64>,
}

impl Ray {
    pub fn new(v: &[f64]) -> Result<Ray> {
        let n = norm(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        let mut direction: Vec<f64> = v.iter().map(|x| x / n).collect();
        let pivot = direction
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if direction[pivot] < 0.0 {
            for x in &mut direction {
                *x = -*x;
            }
        }
        Ok(Ray { direction })
    }

    /// Wraps a unit vector keeping its sign, for vectors whose sign is paired
    /// with another factor (e.g. the object-side half of a concept).
    pub(crate) fn from_unit_signed(v: Vec<f64>) -> Ray {
        debug_assert!((norm(&v) - 1.0).abs() < 1e-9);
        Ray { direction: v }
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }
}

impl PartialEq for Ray {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && dot(&self.direction, &other.direction).abs() >= 1.0 - RAY_EQ_TOL
    }
}

/// `s(p, q) = |<p|q>|` on unit representatives.
pub fn ray_similarity(p: &Ray, q: &Ray) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    Ok(dot(p.direction(), q.direction()).abs().min(1.0))
}

/// The induced map of `M` on rays: the ray of `M phi`. Kernel rays are an
/// explicit error.
pub fn induced_map(m: &DenseTrustMatrix, p: &Ray) -> Result<Ray> {
    if p.dim() != m.values().cols() {
        return Err(Error::DimensionMismatch {
            expected: m.values().cols(),
            got: p.dim(),
        });
    }
    let image = m.values().matvec(p.direction());
    let scale = m.values().frobenius_norm();
    if norm(&image) <= KERNEL_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::KernelRay);
    }
    Ray::new(&image)
}

/// The similarity-preserving map on rays: the ray of `V U^T phi`.
pub fn similarity_map_f(d: &SpectralDecomposition, p: &Ray) -> Result<Ray> {
    if p.dim() != d.u().rows() {
        return Err(Error::DimensionMismatch {
            expected: d.u().rows(),
            got: p.dim(),
        });
    }
    let coords = d.u().matvec_t(p.direction());
    if norm(&coords) <= KERNEL_TOL {
        return Err(Error::KernelRay);
    }
    let image = d.v().matvec(&coords);
    Ray::new(&image)
}

/// Before/after similarities of one ray pair under the induced map.
#[derive(Debug, Clone, Serialize)]
pub struct ViolationRecord {
    pub pair: usize,
    pub s_before: f64,
    pub s_after: f64,
    pub violated: bool,
}

/// Checks whether the induced map of `M` decreases similarity on the given
/// pairs. A violation means `s_after < s_before - 1e-12`.
pub fn morphism_violation_report(
    m: &DenseTrustMatrix,
    pairs: &[(Ray, Ray)],
) -> Result<Vec<ViolationRecord>> {
    pairs
        .iter()
        .enumerate()
        .map(|(i, (p, q))| {
            let s_before = ray_similarity(p, q)?;
            let s_after = ray_similarity(&induced_map(m, p)?, &induced_map(m, q)?)?;
            Ok(ViolationRecord {
                pair: i,
                s_before,
                s_after,
                violated: s_after < s_before - 1e-12,
            })
        })
        .collect()
}

/// A finite set with a reflexive symmetric similarity map into [0,1].
#[derive(Debug, Clone)]
pub struct FiniteSimilarityNetwork {
    elements: Vec<String>,
    sim: Mat,
}

impl FiniteSimilarityNetwork {
    pub fn new(elements: Vec<String>, sim: Mat) -> Result<Self> {
        let n = elements.len();
        if sim.rows() != n || sim.cols() != n {
            return Err(Error::Malformed("similarity matrix shape mismatch".into()));
        }
        for i in 0..n {
            if (sim[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::Malformed(format!("sim({i},{i}) must be 1")));
            }
            for j in 0..n {
                let s = sim[(i, j)];
                if !(0.0..=1.0).contains(&s) {
                    return Err(Error::Malformed(format!("sim({i},{j}) = {s} outside [0,1]")));
                }
                if (s - sim[(j, i)]).abs() > 1e-12 {
                    return Err(Error::Malformed("similarity must be symmetric".into()));
                }
            }
        }
        Ok(FiniteSimilarityNetwork { elements, sim })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn sim(&self, x: usize, y: usize) -> f64 {
        self.sim[(x, y)]
    }
}

/// Section/retraction pair exhibiting `C` as clusters of `A`; maps are given
/// as index tables.
#[derive(Debug, Clone)]
pub struct ClusteringPair {
    /// c': C -> A, picks a representative of each cluster.
    pub section: Vec<usize>,
    /// c'': A -> C, assigns each node to its cluster.
    pub retraction: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusteringReport {
    pub ok: bool,
    pub violation: Option<String>,
}

/// Verifies all clustering axioms by direct evaluation: retraction after
/// section is the identity, the section preserves similarity exactly, and
/// both maps never decrease similarity.
pub fn check_clustering(
    net_a: &FiniteSimilarityNetwork,
    net_c: &FiniteSimilarityNetwork,
    pair: &ClusteringPair,
) -> ClusteringReport {
    let fail = |msg: String| ClusteringReport {
        ok: false,
        violation: Some(msg),
    };
    if pair.section.len() != net_c.len() || pair.retraction.len() != net_a.len() {
        return fail("map domains do not match the networks".into());
    }
    if pair.section.iter().any(|&x| x >= net_a.len())
        || pair.retraction.iter().any(|&x| x >= net_c.len())
    {
        return fail("map image out of range".into());
    }
    for x in 0..net_c.len() {
        if pair.retraction[pair.section[x]] != x {
            return fail(format!("retraction(section({x})) != {x}"));
        }
    }
    for x in 0..net_c.len() {
        for y in 0..net_c.len() {
            let lhs = net_c.sim(x, y);
            let rhs = net_a.sim(pair.section[x], pair.section[y]);
            if (lhs - rhs).abs() > 1e-12 {
                return fail(format!(
                    "section does not preserve similarity at ({x},{y}): {lhs} vs {rhs}"
                ));
            }
        }
    }
    for x in 0..net_a.len() {
        for y in 0..net_a.len() {
            let before = net_a.sim(x, y);
            let after = net_c.sim(pair.retraction[x], pair.retraction[y]);
            if after < before - 1e-12 {
                return fail(format!(
                    "retraction decreases similarity at ({x},{y}): {before} -> {after}"
                ));
            }
        }
    }
    ClusteringReport {
        ok: true,
        violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::spectral::{svd, SvdMethod};

    fn e(i: usize, n: usize) -> Ray {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Ray::new(&v).unwrap()
    }

    #[test]
    fn ray_canonical_sign() {
        let r = Ray::new(&[0.0, -3.0, 1.0]).unwrap();
        assert!(r.direction()[1] > 0.0);
        let s = Ray::new(&[0.0, 3.0, -1.0]).unwrap();
        assert_eq!(r, s); // Ray(v) = Ray(-v)
        assert!((norm(r.direction()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ray_zero_rejected() {
        assert!(matches!(Ray::new(&[0.0, 0.0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn similarity_axioms() {
        assert_eq!(ray_similarity(&e(0, 3), &e(0, 3)).unwrap(), 1.0);
        assert_eq!(ray_similarity(&e(0, 3), &e(1, 3)).unwrap(), 0.0);
        let err = ray_similarity(&e(0, 3), &e(0, 4)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    /// Oracle: direct arithmetic <phi,psi>/(|phi||psi|) = .49/(.98995*.70356).
    #[test]
    fn similarity_of_published_pair() {
        let phi = Ray::new(&[0.0, 0.5, 0.3, -0.8]).unwrap();
        let psi = Ray::new(&[0.25, 0.5, 0.4, -0.15]).unwrap();
        let s = ray_similarity(&phi, &psi).unwrap();
        let oracle = 0.49 / (0.98f64.sqrt() * 0.495f64.sqrt());
        assert!((s - oracle).abs() < 1e-12);
        assert!((s - 0.7035).abs() < 5e-4, "s = {s}");
    }

    #[test]
    fn induced_map_identity() {
        let m = crate::model::DenseTrustMatrix::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec!["p".into(), "q".into(), "r".into()],
            Mat::identity(3),
        )
        .unwrap();
        let r = Ray::new(&[1.0, 2.0, -2.0]).unwrap();
        assert_eq!(induced_map(&m, &r).unwrap(), r);
    }

    /// Oracle: direct matrix-vector product on the score values.
    #[test]
    fn induced_map_published_vector() {
        let m = fixture::fixture_block();
        let phi = Ray::new(&[0.0, 0.5, 0.3, -0.8]).unwrap();
        let image = induced_map(&m, &phi).unwrap();
        let expect = Ray::new(&[-0.395, 0.591, 0.686]).unwrap();
        assert_eq!(image, expect);
    }

    #[test]
    fn induced_map_kernel_error() {
        // rank-1 w z^T sends anything orthogonal to z to zero
        let w = [1.0, 2.0];
        let z = [3.0, 4.0];
        let m = crate::model::DenseTrustMatrix::new(
            vec!["x".into(), "y".into()],
            vec!["p".into(), "q".into()],
            Mat::outer(&w, &z),
        )
        .unwrap();
        let orth = Ray::new(&[4.0, -3.0]).unwrap();
        assert!(matches!(induced_map(&m, &orth), Err(Error::KernelRay)));
    }

    #[test]
    fn published_counterexample_violates() {
        let m = fixture::fixture_block();
        let phi = Ray::new(&[0.0, 0.5, 0.3, -0.8]).unwrap();
        let psi = Ray::new(&[0.25, 0.5, 0.4, -0.15]).unwrap();
        let report = morphism_violation_report(&m, &[(phi, psi)]).unwrap();
        assert_eq!(report.len(), 1);
        let rec = &report[0];
        assert!(rec.violated);
        assert!((rec.s_before - 0.7035).abs() < 5e-4, "{}", rec.s_before);
        assert!((rec.s_after - 0.3124).abs() < 5e-4, "{}", rec.s_after);
    }

    #[test]
    fn orthogonal_matrix_never_violates() {
        // a rotation is an isometry on rays
        let theta: f64 = 0.7;
        let q = Mat::from_rows(&[
            vec![theta.cos(), -theta.sin()],
            vec![theta.sin(), theta.cos()],
        ]);
        let m = crate::model::DenseTrustMatrix::new(
            vec!["x".into(), "y".into()],
            vec!["p".into(), "q".into()],
            q,
        )
        .unwrap();
        let pairs = vec![
            (Ray::new(&[1.0, 0.2]).unwrap(), Ray::new(&[0.3, -1.0]).unwrap()),
            (Ray::new(&[1.0, 1.0]).unwrap(), Ray::new(&[1.0, -1.0]).unwrap()),
        ];
        for rec in morphism_violation_report(&m, &pairs).unwrap() {
            assert!(!rec.violated);
            assert!((rec.s_before - rec.s_after).abs() < 1e-12);
        }
    }

    #[test]
    fn map_f_sends_u_column_to_v_column() {
        let m = fixture::fixture_block();
        let d = svd(&m, 0.0, SvdMethod::GolubKahan).unwrap();
        let p = Ray::new(&d.u().col(0)).unwrap();
        let image = similarity_map_f(&d, &p).unwrap();
        let expect = Ray::new(&d.v().col(0)).unwrap();
        assert_eq!(image, expect);
    }

    #[test]
    fn map_f_uniform_ray() {
        let m = fixture::fixture_block();
        let d = svd(&m, 0.0, SvdMethod::GolubKahan).unwrap();
        let p = Ray::new(&[0.5, 0.5, 0.5, 0.5]).unwrap();
        let image = similarity_map_f(&d, &p).unwrap();
        let expect = [0.83, 0.55, 0.0];
        for (got, want) in image.direction().iter().zip(expect) {
            assert!((got - want).abs() <= 0.05, "{got} vs {want}");
        }
    }

    #[test]
    fn map_f_kernel_error() {
        let m = fixture::fixture_block();
        let d = svd(&m, 0.0, SvdMethod::GolubKahan).unwrap();
        // Gram-Schmidt a vector against both retained U columns
        let mut x = vec![1.0, -0.3, 0.7, 0.2];
        for j in 0..d.rank() {
            let col = d.u().col(j);
            let c = dot(&x, &col);
            for (xi, ui) in x.iter_mut().zip(&col) {
                *xi -= c * ui;
            }
        }
        let p = Ray::new(&x).unwrap();
        assert!(matches!(similarity_map_f(&d, &p), Err(Error::KernelRay)));
    }

    #[test]
    fn identity_clustering_checks() {
        let sim = Mat::from_rows(&[vec![1.0, 0.4], vec![0.4, 1.0]]);
        let net = FiniteSimilarityNetwork::new(vec!["x".into(), "y".into()], sim).unwrap();
        let pair = ClusteringPair {
            section: vec![0, 1],
            retraction: vec![0, 1],
        };
        assert!(check_clustering(&net, &net, &pair).ok);
    }

    /// Exhaustive check of both candidate sections when two points collapse
    /// to one cluster. With a singleton cluster range the section equation
    /// only quantifies over the single pair (c,c), so the axioms hold; a
    /// failing section shows up as soon as the cluster range keeps both
    /// points but distorts their similarity.
    #[test]
    fn collapse_and_distort_clusterings() {
        let sim = Mat::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]);
        let a = FiniteSimilarityNetwork::new(vec!["x".into(), "y".into()], sim).unwrap();
        let c1 = FiniteSimilarityNetwork::new(vec!["c".into()], Mat::identity(1)).unwrap();
        for section in [vec![0], vec![1]] {
            let pair = ClusteringPair {
                section,
                retraction: vec![0, 0],
            };
            assert!(check_clustering(&a, &c1, &pair).ok);
        }
        // same shape as A but claiming similarity .9: every section violates
        // the exact-preservation equation
        let distorted = Mat::from_rows(&[vec![1.0, 0.9], vec![0.9, 1.0]]);
        let c2 = FiniteSimilarityNetwork::new(vec!["p".into(), "q".into()], distorted).unwrap();
        let pair = ClusteringPair {
            section: vec![0, 1],
            retraction: vec![0, 1],
        };
        let report = check_clustering(&a, &c2, &pair);
        assert!(!report.ok);
        assert!(report.violation.unwrap().contains("section"));
    }

    /// Clusters built from the retained concepts: map each sampled ray to its
    /// nearest concept axis, represent each cluster by that axis. Verified by
    /// brute-force evaluation of every axiom instance.
    #[test]
    fn concept_clustering_of_sampled_rays() {
        let m = fixture::fixture_block();
        let d = svd(&m, 0.0, SvdMethod::GolubKahan).unwrap();
        let axes: Vec<Ray> = (0..d.rank())
            .map(|j| Ray::new(&d.u().col(j)).unwrap())
            .collect();
        // elements of A: the two concept axes first, then sampled rays
        let mut rays: Vec<Ray> = axes.clone();
        rays.push(Ray::new(&[1.0, 1.0, 1.0, 0.9]).unwrap());
        rays.push(Ray::new(&[0.1, 0.4, 0.3, -0.9]).unwrap());
        let n = rays.len();
        let sim_a = Mat::from_fn(n, n, |i, j| ray_similarity(&rays[i], &rays[j]).unwrap());
        let names: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
        let net_a = FiniteSimilarityNetwork::new(names, sim_a).unwrap();
        let sim_c = Mat::from_fn(2, 2, |i, j| ray_similarity(&axes[i], &axes[j]).unwrap());
        let net_c =
            FiniteSimilarityNetwork::new(vec!["phi1".into(), "phi2".into()], sim_c).unwrap();
        let retraction: Vec<usize> = rays
            .iter()
            .map(|r| {
                (0..2)
                    .max_by(|&x, &y| {
                        ray_similarity(r, &axes[x])
                            .unwrap()
                            .partial_cmp(&ray_similarity(r, &axes[y]).unwrap())
                            .unwrap()
                    })
                    .unwrap()
            })
            .collect();
        let pair = ClusteringPair {
            section: vec![0, 1],
            retraction,
        };
        let report = check_clustering(&net_a, &net_c, &pair);
        // the concept axes are orthogonal while distinct rays keep nonzero
        // similarity, so the retraction legitimately fails the morphism test
        // for rays assigned to different clusters; verify agreement with a
        // direct evaluation of the axiom instances
        let mut expect_ok = true;
        for x in 0..n {
            for y in 0..n {
                if net_c.sim(pair.retraction[x], pair.retraction[y]) < net_a.sim(x, y) - 1e-12 {
                    expect_ok = false;
                }
            }
        }
        assert_eq!(report.ok, expect_ok);
    }
}
