//! Per-concept trustee rankings and refinement queries over merged or
//! restricted provider sets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;

#[derive(Debug, Clone, Serialize)]
pub struct RankedEntry {
    pub object: String,
    pub rating: f64,
}

/// Trustees ranked for one subject under one concept, by the qualified
/// rating `r = lambda * U[subject] * V[object]`.
#[derive(Debug, Clone, Serialize)]
pub struct RankedRecommendation {
    pub subject: String,
    pub concept: usize,
    /// Set when the subject's loading on the concept is negative: the
    /// ordering then steers away from the concept's strongest providers.
    pub negative_affinity: bool,
    pub ranking: Vec<RankedEntry>,
}

fn concept_column(d: &SpectralDecomposition, concept: usize) -> Result<usize> {
    if concept < 1 || concept > d.rank() {
        return Err(Error::RankOutOfRange {
            index: concept,
            rank: d.rank(),
        });
    }
    Ok(concept - 1)
}

/// Ranks every trustee for `subject` under the given concept (1-based).
/// Ties keep the object order of the source matrix.
pub fn rank_trustees(
    d: &SpectralDecomposition,
    subject: &str,
    concept: usize,
) -> Result<RankedRecommendation> {
    let col = concept_column(d, concept)?;
    let s = d
        .col_ids()
        .iter()
        .position(|id| id == subject)
        .ok_or_else(|| Error::UnknownId(subject.to_string()))?;
    let affinity = d.u()[(s, col)];
    let lambda = d.lambdas()[col];
    let mut ranking: Vec<RankedEntry> = d
        .row_ids()
        .iter()
        .enumerate()
        .map(|(o, id)| RankedEntry {
            object: id.clone(),
            rating: lambda * affinity * d.v()[(o, col)],
        })
        .collect();
    ranking.sort_by(|a, b| b.rating.partial_cmp(&a.rating).unwrap());
    Ok(RankedRecommendation {
        subject: subject.to_string(),
        concept,
        negative_affinity: affinity < 0.0,
        ranking,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RefineResult {
    pub subject: String,
    pub concept: usize,
    pub best: String,
    pub negative_affinity: bool,
    pub ratings: Vec<RankedEntry>,
}

/// Restricts the ranking to the given outlets and reports the best one.
pub fn refine_query(
    d: &SpectralDecomposition,
    subject: &str,
    outlets: &[String],
    concept: usize,
) -> Result<RefineResult> {
    if outlets.is_empty() {
        return Err(Error::InvalidArgument("outlets list is empty".into()));
    }
    for o in outlets {
        if !d.row_ids().contains(o) {
            return Err(Error::UnknownId(o.clone()));
        }
    }
    let full = rank_trustees(d, subject, concept)?;
    let ratings: Vec<RankedEntry> = full
        .ranking
        .into_iter()
        .filter(|e| outlets.contains(&e.object))
        .collect();
    Ok(RefineResult {
        subject: subject.to_string(),
        concept,
        best: ratings[0].object.clone(),
        negative_affinity: full.negative_affinity,
        ratings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::spectral::{svd, SvdMethod};

    fn fixture() -> SpectralDecomposition {
        fixture::fixture_decomposition(SvdMethod::GolubKahan)
    }

    fn order(rec: &RankedRecommendation) -> Vec<&str> {
        rec.ranking.iter().map(|e| e.object.as_str()).collect()
    }

    #[test]
    fn food_concept_sends_b_to_k() {
        let d = fixture();
        let rec = rank_trustees(&d, "b", 2).unwrap();
        assert_eq!(order(&rec), ["k", "j", "i"]);
        assert!((rec.ranking[0].rating - 0.35).abs() <= 0.02);
        assert!((rec.ranking[1].rating - 0.30).abs() <= 0.02);
        assert!((rec.ranking[2].rating - (-0.20)).abs() <= 0.02);
        // the sign canon orients this concept by its largest loading (d), so
        // b's loading comes out negative; the ordering is unaffected
        assert!(rec.negative_affinity);
    }

    #[test]
    fn gun_concept_sends_b_to_i() {
        let d = fixture();
        let rec = rank_trustees(&d, "b", 1).unwrap();
        assert_eq!(order(&rec)[0], "i");
        assert!((rec.ranking[0].rating - 1.245).abs() <= 0.02);
    }

    /// Subject d sits on the opposite side of the second concept from b and
    /// k, so its ordering inverts relative to theirs.
    #[test]
    fn opposed_subject_inverts_ordering() {
        let d = fixture();
        let rec = rank_trustees(&d, "d", 2).unwrap();
        assert_eq!(order(&rec), ["i", "j", "k"]);
        assert!((rec.ranking[0].rating - 0.32).abs() <= 0.02);
        assert!((rec.ranking[2].rating - (-0.56)).abs() <= 0.02);
        // d carries the canonical (positive) orientation of this concept
        assert!(!rec.negative_affinity);
    }

    #[test]
    fn unknown_subject_and_concept() {
        let d = fixture();
        assert!(rank_trustees(&d, "zz", 1).is_err());
        assert!(rank_trustees(&d, "b", 0).is_err());
        assert!(rank_trustees(&d, "b", 3).is_err());
    }

    #[test]
    fn refine_acquisition_question() {
        let d = fixture();
        let outlets = vec!["i".to_string(), "j".to_string()];
        let food = refine_query(&d, "b", &outlets, 2).unwrap();
        assert_eq!(food.best, "j");
        assert!((food.ratings[0].rating - 0.30).abs() <= 0.02);
        let guns = refine_query(&d, "b", &outlets, 1).unwrap();
        assert_eq!(guns.best, "i");
        assert!((guns.ratings[0].rating - 1.245).abs() <= 0.02);
        assert!((guns.ratings[1].rating - 0.825).abs() <= 0.02);
    }

    #[test]
    fn refine_single_outlet() {
        let d = fixture();
        let r = refine_query(&d, "b", &["j".to_string()], 1).unwrap();
        assert_eq!(r.best, "j");
        assert_eq!(r.ratings.len(), 1);
    }

    #[test]
    fn refine_unknown_outlet() {
        let d = fixture();
        assert!(refine_query(&d, "b", &["zz".to_string()], 1).is_err());
        assert!(refine_query(&d, "b", &[], 1).is_err());
    }

    #[test]
    fn ordering_invariant_under_scaling() {
        let m = fixture::fixture_block();
        let scaled = crate::model::DenseTrustMatrix::new(
            m.row_ids().to_vec(),
            m.col_ids().to_vec(),
            m.values().scale(10.0),
        )
        .unwrap();
        let d1 = svd(&m, 0.0, SvdMethod::GolubKahan).unwrap();
        let d2 = svd(&scaled, 0.0, SvdMethod::GolubKahan).unwrap();
        for subject in ["a", "b", "c", "d"] {
            for concept in 1..=2 {
                let r1 = rank_trustees(&d1, subject, concept).unwrap();
                let r2 = rank_trustees(&d2, subject, concept).unwrap();
                assert_eq!(order(&r1), order(&r2));
            }
        }
    }

    #[test]
    fn refine_is_order_consistent_with_full_ranking() {
        let d = fixture();
        let outlets = vec!["k".to_string(), "i".to_string()];
        let refined = refine_query(&d, "c", &outlets, 2).unwrap();
        let full = rank_trustees(&d, "c", 2).unwrap();
        let filtered: Vec<&str> = full
            .ranking
            .iter()
            .filter(|e| outlets.contains(&e.object))
            .map(|e| e.object.as_str())
            .collect();
        let got: Vec<&str> = refined.ratings.iter().map(|e| e.object.as_str()).collect();
        assert_eq!(got, filtered);
    }

    #[test]
    fn per_concept_ratings_sum_to_edge_total() {
        let d = fixture();
        for subject in ["a", "b", "c", "d"] {
            for object in ["i", "j", "k"] {
                let total: f64 = (1..=d.rank())
                    .map(|c| {
                        rank_trustees(&d, subject, c)
                            .unwrap()
                            .ranking
                            .iter()
                            .find(|e| e.object == object)
                            .unwrap()
                            .rating
                    })
                    .sum();
                let edge = crate::concepts::decompose_edge(&d, subject, object).unwrap();
                assert!((total - edge.total).abs() <= 1e-12);
            }
        }
    }
}
