//! Typed tabular data: CSV loading, bootstrap resampling and injection of
//! pure-noise columns.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{Purpose, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Logical,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Numeric => "numeric",
            ColumnKind::Categorical => "categorical",
            ColumnKind::Logical => "logical",
        }
    }
}

/// Column storage. Categorical and logical columns share the factor layout:
/// an ordered level list plus one level index per row.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Factor {
        levels: Vec<String>,
        codes: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    pub data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            kind: ColumnKind::Numeric,
            data: ColumnData::Numeric(values),
        }
    }

    /// Categorical column with levels ordered by first appearance.
    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, values: &[S]) -> Self {
        let mut levels: Vec<String> = Vec::new();
        let codes = values
            .iter()
            .map(|v| {
                let v = v.as_ref();
                match levels.iter().position(|l| l == v) {
                    Some(i) => i as u32,
                    None => {
                        levels.push(v.to_string());
                        (levels.len() - 1) as u32
                    }
                }
            })
            .collect();
        Self {
            name: name.into(),
            kind: ColumnKind::Categorical,
            data: ColumnData::Factor { levels, codes },
        }
    }

    /// Logical column; levels are the observed subset of `[FALSE, TRUE]`.
    pub fn logical(name: impl Into<String>, values: &[bool]) -> Self {
        let has_false = values.iter().any(|v| !v);
        let has_true = values.iter().any(|v| *v);
        let mut levels = Vec::new();
        if has_false {
            levels.push("FALSE".to_string());
        }
        if has_true {
            levels.push("TRUE".to_string());
        }
        let true_code = if has_false { 1 } else { 0 };
        let codes = values
            .iter()
            .map(|&v| if v { true_code } else { 0 })
            .collect();
        Self {
            name: name.into(),
            kind: ColumnKind::Logical,
            data: ColumnData::Factor { levels, codes },
        }
    }

    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Factor { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Factor { .. } => None,
        }
    }

    pub fn levels(&self) -> Option<&[String]> {
        match &self.data {
            ColumnData::Factor { levels, .. } => Some(levels),
            ColumnData::Numeric(_) => None,
        }
    }

    pub fn codes(&self) -> Option<&[u32]> {
        match &self.data {
            ColumnData::Factor { codes, .. } => Some(codes),
            ColumnData::Numeric(_) => None,
        }
    }

    fn cell_text(&self, row: usize) -> String {
        match &self.data {
            ColumnData::Numeric(v) => format!("{}", v[row]),
            ColumnData::Factor { levels, codes } => levels[codes[row] as usize].clone(),
        }
    }

    fn take(&self, rows: &[usize]) -> Column {
        let data = match &self.data {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Factor { levels, codes } => ColumnData::Factor {
                levels: levels.clone(),
                codes: rows.iter().map(|&r| codes[r]).collect(),
            },
        };
        Column {
            name: self.name.clone(),
            kind: self.kind,
            data,
        }
    }
}

/// Immutable table with one designated numeric outcome column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    n_rows: usize,
    outcome: String,
}

impl Dataset {
    pub fn new(columns: Vec<Column>, outcome: impl Into<String>) -> Result<Self> {
        let outcome = outcome.into();
        let n_rows = columns.first().map(Column::len).unwrap_or(0);
        if n_rows == 0 {
            return Err(Error::EmptyBody);
        }
        for (i, c) in columns.iter().enumerate() {
            if c.len() != n_rows {
                return Err(Error::InvalidData(format!(
                    "column '{}' has {} rows, expected {}",
                    c.name,
                    c.len(),
                    n_rows
                )));
            }
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
            match &c.data {
                ColumnData::Numeric(v) => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidData(format!(
                            "column '{}' has non-finite values",
                            c.name
                        )));
                    }
                }
                ColumnData::Factor { levels, codes } => {
                    if codes.iter().any(|&k| k as usize >= levels.len()) {
                        return Err(Error::InvalidData(format!(
                            "column '{}' has codes outside its level list",
                            c.name
                        )));
                    }
                }
            }
        }
        match columns.iter().find(|c| c.name == outcome) {
            None => return Err(Error::MissingColumn(outcome)),
            Some(c) if c.kind != ColumnKind::Numeric => {
                return Err(Error::NonNumericOutcome(outcome))
            }
            Some(_) => {}
        }
        Ok(Self {
            columns,
            n_rows,
            outcome,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn outcome(&self) -> &str {
        &self.outcome
    }

    pub fn outcome_values(&self) -> &[f64] {
        self.column(&self.outcome)
            .and_then(Column::as_numeric)
            .expect("outcome validated at construction")
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Predictor columns in their original order.
    pub fn predictors(&self) -> impl Iterator<Item = &Column> {
        self.columns.iter().filter(move |c| c.name != self.outcome)
    }

    pub fn predictor_names(&self) -> Vec<String> {
        self.predictors().map(|c| c.name.clone()).collect()
    }

    /// Looks up a predictor column, rejecting the outcome.
    pub fn predictor(&self, name: &str) -> Result<&Column> {
        if name == self.outcome {
            return Err(Error::OutcomeAsPredictor(name.to_string()));
        }
        self.column(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    /// New dataset made of the given rows (repeats allowed). Level lists are
    /// kept even when a level no longer occurs.
    pub fn take_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.iter().map(|c| c.take(rows)).collect(),
            n_rows: rows.len(),
            outcome: self.outcome.clone(),
        }
    }

    /// Copy with a numeric column's values replaced.
    pub fn with_numeric(&self, name: &str, values: Vec<f64>) -> Result<Dataset> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        if values.len() != self.n_rows {
            return Err(Error::InvalidData(format!(
                "replacement for '{name}' has {} values, expected {}",
                values.len(),
                self.n_rows
            )));
        }
        if self.columns[idx].kind != ColumnKind::Numeric {
            return Err(Error::InvalidData(format!(
                "column '{name}' is not numeric"
            )));
        }
        let mut out = self.clone();
        out.columns[idx].data = ColumnData::Numeric(values);
        Ok(out)
    }

    /// Copy with a factor column's level codes replaced.
    pub fn with_codes(&self, name: &str, new_codes: Vec<u32>) -> Result<Dataset> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        if new_codes.len() != self.n_rows {
            return Err(Error::InvalidData(format!(
                "replacement for '{name}' has {} values, expected {}",
                new_codes.len(),
                self.n_rows
            )));
        }
        let mut out = self.clone();
        match &mut out.columns[idx].data {
            ColumnData::Factor { levels, codes } => {
                if new_codes.iter().any(|&k| k as usize >= levels.len()) {
                    return Err(Error::InvalidData(format!(
                        "code out of range for '{name}'"
                    )));
                }
                *codes = new_codes;
            }
            ColumnData::Numeric(_) => {
                return Err(Error::InvalidData(format!(
                    "column '{name}' is not a factor"
                )))
            }
        }
        Ok(out)
    }

    pub fn with_column(&self, column: Column) -> Result<Dataset> {
        if self.column(&column.name).is_some() {
            return Err(Error::DuplicateColumn(column.name));
        }
        let mut columns = self.columns.clone();
        columns.push(column);
        Dataset::new(columns, self.outcome.clone())
    }

    pub fn without_column(&self, name: &str) -> Result<Dataset> {
        if name == self.outcome {
            return Err(Error::OutcomeAsPredictor(name.to_string()));
        }
        let columns: Vec<Column> = self
            .columns
            .iter()
            .filter(|c| c.name != name)
            .cloned()
            .collect();
        if columns.len() == self.columns.len() {
            return Err(Error::MissingColumn(name.to_string()));
        }
        Dataset::new(columns, self.outcome.clone())
    }

    /// Writes the table as CSV with a header. Numbers use the shortest
    /// representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, out: W, include_outcome: bool) -> Result<()> {
        let cols: Vec<&Column> = self
            .columns
            .iter()
            .filter(|c| include_outcome || c.name != self.outcome)
            .collect();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(cols.iter().map(|c| c.name.as_str()))?;
        for row in 0..self.n_rows {
            w.write_record(cols.iter().map(|c| c.cell_text(row)))?;
        }
        w.flush().map_err(|e| Error::Exec(e.to_string()))?;
        Ok(())
    }
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "NA"
}

fn parse_finite(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_logical(cell: &str) -> Option<bool> {
    match cell {
        "TRUE" | "true" => Some(true),
        "FALSE" | "false" => Some(false),
        _ => None,
    }
}

/// Loads a CSV file with a header row and infers each column's kind.
pub fn load_csv(path: impl AsRef<Path>, outcome: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&bytes, outcome)
}

pub fn parse_csv(bytes: &[u8], outcome: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if is_missing(cell) {
                return Err(Error::MissingValue {
                    column: header[j].clone(),
                    row,
                });
            }
            cells[j].push(cell.to_string());
        }
    }
    if cells.first().is_none_or(Vec::is_empty) {
        return Err(Error::EmptyBody);
    }
    if !header.iter().any(|h| h == outcome) {
        return Err(Error::MissingColumn(outcome.to_string()));
    }

    let columns = header
        .into_iter()
        .zip(cells)
        .map(|(name, values)| infer_column(name, &values))
        .collect();
    Dataset::new(columns, outcome)
}

fn infer_column(name: String, values: &[String]) -> Column {
    let numeric: Option<Vec<f64>> = values.iter().map(|v| parse_finite(v)).collect();
    if let Some(v) = numeric {
        return Column::numeric(name, v);
    }
    let logical: Option<Vec<bool>> = values.iter().map(|v| parse_logical(v)).collect();
    if let Some(v) = logical {
        return Column::logical(name, &v);
    }
    Column::categorical(name, values)
}

/// Row indices of a bootstrap sample: `n` uniform draws with replacement.
pub fn resample_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = SeededRng::new(seed, Purpose::Resample);
    (0..n).map(|_| rng.index(n)).collect()
}

/// Bootstrap sample of the same size as `d`.
pub fn resample(d: &Dataset, seed: u64) -> Dataset {
    d.take_rows(&resample_indices(d.n_rows(), seed))
}

/// Appends a column of i.i.d. standard normal draws.
pub fn append_random_column(d: &Dataset, name: &str, seed: u64) -> Result<Dataset> {
    if d.column(name).is_some() {
        return Err(Error::DuplicateColumn(name.to_string()));
    }
    let mut rng = SeededRng::new(seed, Purpose::RandomColumn);
    d.with_column(Column::numeric(name, rng.normals(d.n_rows())))
}
