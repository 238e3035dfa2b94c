//! Trust-graph data model: statements, score tables, and extraction of
//! complete dense blocks.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;

/// One trust statement: a trustor rates a trustee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustStatement {
    pub trustor: String,
    pub trustee: String,
    pub rating: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concept_label: Option<String>,
}

/// Bipartite labelled graph of trust statements between subjects (trustors)
/// and objects (trustees).
#[derive(Debug, Clone, PartialEq)]
pub struct TrustGraph {
    subjects: Vec<String>,
    objects: Vec<String>,
    edges: Vec<TrustStatement>,
}

impl TrustGraph {
    pub fn new(
        subjects: Vec<String>,
        objects: Vec<String>,
        edges: Vec<TrustStatement>,
    ) -> Result<Self> {
        check_unique(&subjects)?;
        check_unique(&objects)?;
        let mut seen: HashMap<(&str, &str, Option<&str>), ()> = HashMap::new();
        for e in &edges {
            if !e.rating.is_finite() {
                return Err(Error::NonFinite {
                    row: e.trustee.clone(),
                    col: e.trustor.clone(),
                    value: e.rating,
                });
            }
            if !subjects.iter().any(|s| *s == e.trustor) {
                return Err(Error::UnknownId(e.trustor.clone()));
            }
            if !objects.iter().any(|o| *o == e.trustee) {
                return Err(Error::UnknownId(e.trustee.clone()));
            }
            let key = (
                e.trustor.as_str(),
                e.trustee.as_str(),
                e.concept_label.as_deref(),
            );
            if seen.insert(key, ()).is_some() {
                return Err(Error::DuplicateCell {
                    row: e.trustee.clone(),
                    col: e.trustor.clone(),
                });
            }
        }
        Ok(TrustGraph {
            subjects,
            objects,
            edges,
        })
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn edges(&self) -> &[TrustStatement] {
        &self.edges
    }

    /// Collapses the graph into a score table, ignoring concept labels.
    /// Fails if two statements rate the same (trustor, trustee) pair.
    pub fn to_score_table(&self) -> Result<ScoreTable> {
        let mut table = ScoreTable::new(self.objects.clone(), self.subjects.clone())?;
        for e in &self.edges {
            table.set(&e.trustee, &e.trustor, e.rating)?;
        }
        Ok(table)
    }
}

/// Partial table of ratings: rows are trustees (objects), columns are
/// trustors (subjects). Missing cells are absent, never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    rows: Vec<String>,
    cols: Vec<String>,
    row_index: HashMap<String, usize>,
    col_index: HashMap<String, usize>,
    cells: HashMap<(usize, usize), f64>,
}

impl ScoreTable {
    pub fn new(rows: Vec<String>, cols: Vec<String>) -> Result<Self> {
        let row_index = index_of(&rows)?;
        let col_index = index_of(&cols)?;
        Ok(ScoreTable {
            rows,
            cols,
            row_index,
            col_index,
            cells: HashMap::new(),
        })
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn filled(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        let r = self.row_index.get(row)?;
        let c = self.col_index.get(col)?;
        self.cells.get(&(*r, *c)).copied()
    }

    pub fn set(&mut self, row: &str, col: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::NonFinite {
                row: row.to_string(),
                col: col.to_string(),
                value,
            });
        }
        let r = *self
            .row_index
            .get(row)
            .ok_or_else(|| Error::UnknownId(row.to_string()))?;
        let c = *self
            .col_index
            .get(col)
            .ok_or_else(|| Error::UnknownId(col.to_string()))?;
        if self.cells.insert((r, c), value).is_some() {
            return Err(Error::DuplicateCell {
                row: row.to_string(),
                col: col.to_string(),
            });
        }
        Ok(())
    }

    pub fn to_graph(&self) -> TrustGraph {
        let edges = self
            .cells
            .iter()
            .map(|(&(r, c), &v)| TrustStatement {
                trustor: self.cols[c].clone(),
                trustee: self.rows[r].clone(),
                rating: v,
                concept_label: None,
            })
            .collect();
        TrustGraph::new(self.cols.clone(), self.rows.clone(), edges)
            .expect("a valid table always yields a valid graph")
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = (&str, &str, f64)> + '_ {
        let mut keys: Vec<_> = self.cells.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter().map(move |(r, c)| {
            (
                self.rows[r].as_str(),
                self.cols[c].as_str(),
                self.cells[&(r, c)],
            )
        })
    }
}

/// A complete block of ratings over chosen trustee/trustor subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTrustMatrix {
    row_ids: Vec<String>,
    col_ids: Vec<String>,
    values: Mat,
}

impl DenseTrustMatrix {
    pub fn new(row_ids: Vec<String>, col_ids: Vec<String>, values: Mat) -> Result<Self> {
        check_unique(&row_ids)?;
        check_unique(&col_ids)?;
        if values.rows() != row_ids.len() || values.cols() != col_ids.len() {
            return Err(Error::Malformed(format!(
                "matrix is {}x{} but {} row ids and {} col ids given",
                values.rows(),
                values.cols(),
                row_ids.len(),
                col_ids.len()
            )));
        }
        for i in 0..values.rows() {
            for j in 0..values.cols() {
                if !values[(i, j)].is_finite() {
                    return Err(Error::NonFinite {
                        row: row_ids[i].clone(),
                        col: col_ids[j].clone(),
                        value: values[(i, j)],
                    });
                }
            }
        }
        Ok(DenseTrustMatrix {
            row_ids,
            col_ids,
            values,
        })
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[String] {
        &self.col_ids
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        let r = self.row_ids.iter().position(|id| id == row)?;
        let c = self.col_ids.iter().position(|id| id == col)?;
        Some(self.values[(r, c)])
    }
}

/// Input formats understood by [`ingest_scores`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    WideCsv,
    LongCsv,
    Json,
}

#[derive(Deserialize)]
struct JsonCell {
    trustee: String,
    trustor: String,
    rating: f64,
}

#[derive(Deserialize)]
struct JsonTable {
    subjects: Vec<String>,
    objects: Vec<String>,
    cells: Vec<JsonCell>,
}

/// Parses a score-table document. Empty cells stay missing.
pub fn ingest_scores<R: Read>(source: R, format: InputFormat) -> Result<ScoreTable> {
    match format {
        InputFormat::WideCsv => ingest_wide_csv(source),
        InputFormat::LongCsv => ingest_long_csv(source),
        InputFormat::Json => ingest_json(source),
    }
}

fn parse_rating(raw: &str, row: &str, col: &str) -> Result<f64> {
    let v: f64 = raw.trim().parse().map_err(|_| {
        Error::Malformed(format!("cannot parse rating {raw:?} at ({row}, {col})"))
    })?;
    if !v.is_finite() {
        return Err(Error::NonFinite {
            row: row.to_string(),
            col: col.to_string(),
            value: v,
        });
    }
    Ok(v)
}

fn ingest_wide_csv<R: Read>(source: R) -> Result<ScoreTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(source);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Malformed("empty document".into()))??;
    let cols: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    if cols.is_empty() || cols.iter().any(String::is_empty) {
        return Err(Error::Malformed("header must list subject ids".into()));
    }
    let mut rows = Vec::new();
    let mut data = Vec::new();
    for rec in records {
        let rec = rec?;
        let row_id = rec
            .get(0)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::Malformed("row without object id".into()))?
            .to_string();
        let mut cells = Vec::new();
        for (j, raw) in rec.iter().skip(1).enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            cells.push((j, parse_rating(raw, &row_id, &cols[j])?));
        }
        rows.push(row_id);
        data.push(cells);
    }
    let mut table = ScoreTable::new(rows.clone(), cols.clone())?;
    for (i, cells) in data.into_iter().enumerate() {
        for (j, v) in cells {
            table.set(&rows[i], &cols[j], v)?;
        }
    }
    Ok(table)
}

fn ingest_long_csv<R: Read>(source: R) -> Result<ScoreTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source);
    {
        let headers = rdr.headers()?;
        let expected = ["trustor", "trustee", "rating"];
        let got: Vec<&str> = headers.iter().map(str::trim).collect();
        if got != expected {
            return Err(Error::Malformed(format!(
                "long CSV header must be trustor,trustee,rating, got {}",
                got.join(",")
            )));
        }
    }
    let mut statements: Vec<(String, String, f64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Malformed("long CSV rows need 3 fields".into()));
        }
        let trustor = rec[0].trim().to_string();
        let trustee = rec[1].trim().to_string();
        let rating = parse_rating(&rec[2], &trustee, &trustor)?;
        statements.push((trustor, trustee, rating));
    }
    // row/col order is order of first appearance
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for (trustor, trustee, _) in &statements {
        if !rows.contains(trustee) {
            rows.push(trustee.clone());
        }
        if !cols.contains(trustor) {
            cols.push(trustor.clone());
        }
    }
    let mut table = ScoreTable::new(rows, cols)?;
    for (trustor, trustee, rating) in statements {
        table.set(&trustee, &trustor, rating)?;
    }
    Ok(table)
}

fn ingest_json<R: Read>(source: R) -> Result<ScoreTable> {
    let doc: JsonTable = serde_json::from_reader(source)?;
    let mut table = ScoreTable::new(doc.objects, doc.subjects)?;
    for cell in doc.cells {
        table.set(&cell.trustee, &cell.trustor, cell.rating)?;
    }
    Ok(table)
}

/// Extracts the complete matrix over (objs x subjs), in the given order.
/// Fails on the first missing cell.
pub fn extract_block(
    table: &ScoreTable,
    objs: &[String],
    subjs: &[String],
) -> Result<DenseTrustMatrix> {
    for o in objs {
        if !table.rows().contains(o) {
            return Err(Error::UnknownId(o.clone()));
        }
    }
    for s in subjs {
        if !table.cols().contains(s) {
            return Err(Error::UnknownId(s.clone()));
        }
    }
    let mut values = Mat::zeros(objs.len(), subjs.len());
    for (i, o) in objs.iter().enumerate() {
        for (j, s) in subjs.iter().enumerate() {
            match table.get(o, s) {
                Some(v) => values[(i, j)] = v,
                None => {
                    return Err(Error::MissingCell {
                        row: o.clone(),
                        col: s.clone(),
                    })
                }
            }
        }
    }
    DenseTrustMatrix::new(objs.to_vec(), subjs.to_vec(), values)
}

/// Greedy heuristic for a large complete block: repeatedly drop the row or
/// column with the most missing cells until no cell is missing. Ties go to
/// the drop that keeps the larger area.
pub fn greedy_complete_block(table: &ScoreTable) -> Result<(Vec<String>, Vec<String>)> {
    let mut rows: Vec<String> = table.rows().to_vec();
    let mut cols: Vec<String> = table.cols().to_vec();

    loop {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::NoCompleteBlock);
        }
        let mut row_missing = vec![0usize; rows.len()];
        let mut col_missing = vec![0usize; cols.len()];
        for (i, r) in rows.iter().enumerate() {
            for (j, c) in cols.iter().enumerate() {
                if table.get(r, c).is_none() {
                    row_missing[i] += 1;
                    col_missing[j] += 1;
                }
            }
        }
        if row_missing.iter().all(|&m| m == 0) {
            break;
        }
        let (ri, &rmax) = row_missing
            .iter()
            .enumerate()
            .max_by_key(|&(_, m)| *m)
            .unwrap();
        let (ci, &cmax) = col_missing
            .iter()
            .enumerate()
            .max_by_key(|&(_, m)| *m)
            .unwrap();
        // area left after dropping a row vs a column
        let area_drop_row = (rows.len() - 1) * cols.len();
        let area_drop_col = rows.len() * (cols.len() - 1);
        let drop_row = match rmax.cmp(&cmax) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => area_drop_row > area_drop_col,
        };
        if drop_row {
            rows.remove(ri);
        } else {
            cols.remove(ci);
        }
    }
    // verify before reporting
    extract_block(table, &rows, &cols)?;
    Ok((rows, cols))
}

/// Replaces a group of trustee rows by their arithmetic mean, modelling one
/// provider delivering the same services through several outlets.
pub fn merge_trustees(
    m: &DenseTrustMatrix,
    group: &[String],
    new_id: &str,
) -> Result<DenseTrustMatrix> {
    if group.len() < 2 {
        return Err(Error::GroupTooSmall);
    }
    let mut positions = Vec::new();
    for g in group {
        let p = m
            .row_ids()
            .iter()
            .position(|id| id == g)
            .ok_or_else(|| Error::UnknownId(g.clone()))?;
        if positions.contains(&p) {
            return Err(Error::DuplicateId(g.clone()));
        }
        positions.push(p);
    }
    if m.row_ids().iter().any(|id| id == new_id) && !group.iter().any(|g| g == new_id) {
        return Err(Error::DuplicateId(new_id.to_string()));
    }

    let n = m.values().cols();
    let mut mean = vec![0.0; n];
    for &p in &positions {
        for (s, v) in mean.iter_mut().zip(m.values().row(p)) {
            *s += v;
        }
    }
    for s in &mut mean {
        *s /= group.len() as f64;
    }

    let anchor = *positions.iter().min().unwrap();
    let mut row_ids = Vec::new();
    let mut data = Vec::new();
    for (i, id) in m.row_ids().iter().enumerate() {
        if i == anchor {
            row_ids.push(new_id.to_string());
            data.push(mean.clone());
        } else if !positions.contains(&i) {
            row_ids.push(id.clone());
            data.push(m.values().row(i).to_vec());
        }
    }
    DenseTrustMatrix::new(row_ids, m.col_ids().to_vec(), Mat::from_rows(&data))
}

fn check_unique(ids: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

fn index_of(ids: &[String]) -> Result<HashMap<String, usize>> {
    check_unique(ids)?;
    Ok(ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect())
}
