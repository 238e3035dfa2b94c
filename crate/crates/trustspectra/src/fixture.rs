//! The built-in trust-score fixture from the worked example: four shops
//! rated by five shopping agents, with four missing cells.

use crate::model::{extract_block, ingest_scores, DenseTrustMatrix, InputFormat, ScoreTable};
use crate::spectral::{svd, SpectralDecomposition, SvdMethod};

/// Rank tolerance for the fixture block. The block is numerically rank 3,
/// but its third singular value (~0.008) is an artifact of the two-decimal
/// scores; the worked example treats the block as rank 2, which a cut at
/// 0.01 recovers.
pub const FIXTURE_RANK_TOL: f64 = 0.01;

pub const TABLE1_WIDE_CSV: &str = include_str!("../fixtures/table1.csv");

pub fn table1() -> ScoreTable {
    ingest_scores(TABLE1_WIDE_CSV.as_bytes(), InputFormat::WideCsv)
        .expect("embedded fixture parses")
}

/// The complete 3x4 block over trustees {i,j,k} and trustors {a,b,c,d}.
pub fn fixture_block() -> DenseTrustMatrix {
    let table = table1();
    let rows: Vec<String> = ["i", "j", "k"].iter().map(|s| s.to_string()).collect();
    let cols: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    extract_block(&table, &rows, &cols).expect("fixture block is complete")
}

/// Rank-2 decomposition of the fixture block.
pub fn fixture_decomposition(method: SvdMethod) -> SpectralDecomposition {
    svd(&fixture_block(), FIXTURE_RANK_TOL, method).expect("fixture block decomposes")
}
