//! Randomized invariants over the core operations.

use proptest::prelude::*;

use trustspectra::mat::Mat;
use trustspectra::model::DenseTrustMatrix;
use trustspectra::similarity::{ray_similarity, Ray};
use trustspectra::spectral::{svd, SvdMethod};

fn vector(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

fn matrix() -> impl Strategy<Value = DenseTrustMatrix> {
    (1usize..8, 1usize..8)
        .prop_flat_map(|(r, c)| {
            prop::collection::vec(-10.0f64..10.0, r * c).prop_map(move |data| (r, c, data))
        })
        .prop_map(|(r, c, data)| {
            let m = Mat::from_fn(r, c, |i, j| data[i * c + j]);
            let rows = (0..r).map(|i| format!("o{i}")).collect();
            let cols = (0..c).map(|j| format!("s{j}")).collect();
            DenseTrustMatrix::new(rows, cols, m).unwrap()
        })
}

proptest! {
    #[test]
    fn ray_similarity_is_symmetric_and_bounded(a in vector(5), b in vector(5)) {
        let (Ok(p), Ok(q)) = (Ray::new(&a), Ray::new(&b)) else {
            return Ok(()); // zero vectors carry no direction
        };
        let s = ray_similarity(&p, &q).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
        prop_assert!((s - ray_similarity(&q, &p).unwrap()).abs() <= 1e-15);
        prop_assert!((ray_similarity(&p, &p).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn svd_reconstructs_and_orders_weights(m in matrix()) {
        let d = svd(&m, 0.0, SvdMethod::GolubKahan).unwrap();
        let err = d.reconstruct().sub(m.values()).frobenius_norm();
        prop_assert!(err <= 1e-10 * m.values().frobenius_norm().max(1.0));
        for w in d.lambdas().windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        for l in d.lambdas() {
            prop_assert!(*l > 0.0);
        }
    }

    #[test]
    fn serialized_decomposition_reconstructs_identically(m in matrix()) {
        let d = svd(&m, 0.0, SvdMethod::GolubKahan).unwrap();
        let back = trustspectra::spectral::SpectralDecomposition::from_json(&d.to_json()).unwrap();
        prop_assert!(back.reconstruct().sub(&d.reconstruct()).max_abs() <= 1e-12);
    }

    #[test]
    fn edge_components_sum_to_reconstructed_entry(m in matrix()) {
        let d = svd(&m, 0.0, SvdMethod::GolubKahan).unwrap();
        let recon = d.reconstruct();
        let subject = m.col_ids()[0].clone();
        let object = m.row_ids()[0].clone();
        let edge = trustspectra::concepts::decompose_edge(&d, &subject, &object).unwrap();
        prop_assert!((edge.total - recon[(0, 0)]).abs() <= 1e-10);
    }
}
