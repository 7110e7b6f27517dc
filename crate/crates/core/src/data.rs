//! Dataset handling: CSV loading, label encoding of categorical columns,
//! protected-attribute designation, seeded stratified train/holdout splits,
//! and masked column views.
//!
//! Everything is immutable after construction; views share the underlying
//! matrix through an `Arc` and are safe to read from many evaluation workers.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::Chromosome;
use crate::rng;

/// Column type as declared by the dataset manifest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

/// Per-column schema. Categorical columns carry their encoder: code `i`
/// decodes to `categories[i]`, codes assigned in first-appearance order.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub categories: Vec<String>,
}

impl ColumnSchema {
    /// Decode an integer code back to its category string.
    pub fn decode(&self, code: usize) -> Option<&str> {
        match self.kind {
            ColumnKind::Categorical => self.categories.get(code).map(String::as_str),
            ColumnKind::Numeric => None,
        }
    }
}

/// Raw parsed table: header plus string cells, with a consistent column
/// count on every row.
#[derive(Clone, Debug)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Rows removed because they contained the missing-value token.
    pub dropped_rows: usize,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.header.len()
    }

    fn column_index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("column {name:?} not found in table header")))
    }
}

/// CSV parsing options. A `" "` delimiter is treated as "any run of
/// whitespace", which is how the space-separated UCI files are laid out.
#[derive(Clone, Debug)]
pub struct LoadOptions {
    pub delimiter: char,
    pub has_header: bool,
    /// Token marking a missing value; rows containing it in any cell are
    /// dropped and counted.
    pub missing_token: Option<String>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: ',',
            has_header: false,
            missing_token: None,
        }
    }
}

fn split_line(line: &str, delimiter: char) -> Vec<String> {
    if delimiter == ' ' {
        line.split_whitespace().map(str::to_string).collect()
    } else {
        line.split(delimiter)
            .map(|cell| cell.trim().to_string())
            .collect()
    }
}

/// Parse a delimited text file into a [`RawTable`].
pub fn load_csv(path: &Path, options: &LoadOptions) -> Result<RawTable> {
    let content = fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_csv(&content, options, path)
}

/// Parser behind [`load_csv`], split out so tests can feed literal content.
pub fn parse_csv(content: &str, options: &LoadOptions, path: &Path) -> Result<RawTable> {
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut dropped_rows = 0usize;

    for (line_index, raw_line) in content.lines().enumerate() {
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let cells = split_line(line, options.delimiter);
        match header {
            None if options.has_header => {
                header = Some(cells);
                continue;
            }
            None => {
                header = Some((0..cells.len()).map(|i| format!("col_{i}")).collect());
            }
            Some(_) => {}
        }
        let expected = header.as_ref().unwrap().len();
        if cells.len() != expected {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: line_index + 1,
                message: format!("expected {expected} columns, found {}", cells.len()),
            });
        }
        if let Some(token) = &options.missing_token {
            if cells.iter().any(|c| c == token) {
                dropped_rows += 1;
                continue;
            }
        }
        rows.push(cells);
    }

    let header = header.ok_or_else(|| Error::Data(format!("{} is empty", path.display())))?;
    if rows.is_empty() {
        return Err(Error::Data(format!("{} has no data rows", path.display())));
    }
    if header.iter().any(String::is_empty) {
        return Err(Error::Data(format!(
            "{} has an empty header name",
            path.display()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for name in &header {
        if !seen.insert(name) {
            return Err(Error::Data(format!("duplicate column name {name:?}")));
        }
    }
    Ok(RawTable {
        header,
        rows,
        dropped_rows,
    })
}

/// How to turn a [`RawTable`] into an [`EncodedDataset`].
#[derive(Clone, Debug)]
pub struct EncodeOptions {
    /// One kind per table column, in table order (label column included).
    pub kinds: Vec<ColumnKind>,
    pub label_column: String,
    pub positive_label: String,
    pub protected_column: String,
    pub reference_group: String,
}

/// Fully numeric dataset: feature matrix, binary labels, and the binarized
/// protected column carried separately from the features so fairness stays
/// measurable when the optimizer deselects the protected column.
#[derive(Clone, Debug)]
pub struct EncodedDataset {
    features: Vec<f64>,
    n_features: usize,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
    pub protected_index: usize,
    pub protected_values: Vec<u8>,
    pub schemas: Vec<ColumnSchema>,
    pub label_name: String,
    pub positive_label: String,
    pub reference_group: String,
    pub dropped_rows: usize,
}

impl EncodedDataset {
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn feature(&self, row: usize, col: usize) -> f64 {
        self.features[row * self.n_features + col]
    }

    /// View over all rows and all feature columns.
    pub fn view(self: &Arc<Self>) -> DataView {
        DataView {
            dataset: Arc::clone(self),
            rows: (0..self.n_rows()).collect::<Vec<_>>().into(),
            cols: (0..self.n_features()).collect::<Vec<_>>().into(),
        }
    }
}

/// Label-encode a raw table.
///
/// Categorical codes are assigned in first-appearance order over the full
/// dataset; numeric columns are parsed as reals; the label is binarized with
/// `positive_label` mapping to 1 and the protected column with
/// `reference_group` mapping to group 1.
pub fn encode(table: &RawTable, options: &EncodeOptions) -> Result<EncodedDataset> {
    if options.kinds.len() != table.n_cols() {
        return Err(Error::Data(format!(
            "schema declares {} columns but table has {}",
            options.kinds.len(),
            table.n_cols()
        )));
    }
    let label_col = table.column_index(&options.label_column)?;
    let protected_col = table.column_index(&options.protected_column)?;
    if protected_col == label_col {
        return Err(Error::Data(
            "protected column cannot be the label column".into(),
        ));
    }

    // label: exactly two distinct values, positive_label one of them
    let mut label_values: Vec<&str> = Vec::new();
    for row in &table.rows {
        let v = row[label_col].as_str();
        if !label_values.contains(&v) {
            label_values.push(v);
        }
    }
    if label_values.len() != 2 {
        return Err(Error::Data(format!(
            "label column {:?} has {} distinct values, expected 2",
            options.label_column,
            label_values.len()
        )));
    }
    if !label_values.contains(&options.positive_label.as_str()) {
        return Err(Error::Data(format!(
            "positive label {:?} not present in label column (saw {:?})",
            options.positive_label, label_values
        )));
    }
    let labels: Vec<u8> = table
        .rows
        .iter()
        .map(|row| u8::from(row[label_col] == options.positive_label))
        .collect();

    if !table
        .rows
        .iter()
        .any(|row| row[protected_col] == options.reference_group)
    {
        return Err(Error::Data(format!(
            "reference group {:?} not found in protected column {:?}",
            options.reference_group, options.protected_column
        )));
    }
    let protected_values: Vec<u8> = table
        .rows
        .iter()
        .map(|row| u8::from(row[protected_col] == options.reference_group))
        .collect();

    let feature_cols: Vec<usize> = (0..table.n_cols()).filter(|&c| c != label_col).collect();
    let n_features = feature_cols.len();
    let mut schemas = Vec::with_capacity(n_features);
    let mut features = vec![0.0f64; table.n_rows() * n_features];

    for (out_col, &col) in feature_cols.iter().enumerate() {
        match options.kinds[col] {
            ColumnKind::Categorical => {
                let mut categories: Vec<String> = Vec::new();
                let mut codes: HashMap<&str, usize> = HashMap::new();
                for (r, row) in table.rows.iter().enumerate() {
                    let cell = row[col].as_str();
                    let code = match codes.get(cell) {
                        Some(&code) => code,
                        None => {
                            let code = categories.len();
                            categories.push(cell.to_string());
                            codes.insert(cell, code);
                            code
                        }
                    };
                    features[r * n_features + out_col] = code as f64;
                }
                schemas.push(ColumnSchema {
                    name: table.header[col].clone(),
                    kind: ColumnKind::Categorical,
                    categories,
                });
            }
            ColumnKind::Numeric => {
                for (r, row) in table.rows.iter().enumerate() {
                    let cell = row[col].as_str();
                    let value: f64 = cell
                        .parse()
                        .ok()
                        .filter(|v: &f64| v.is_finite())
                        .ok_or_else(|| {
                            Error::Data(format!(
                                "unparseable numeric cell {:?} at row {}, column {:?}",
                                cell,
                                r + 1,
                                table.header[col]
                            ))
                        })?;
                    features[r * n_features + out_col] = value;
                }
                schemas.push(ColumnSchema {
                    name: table.header[col].clone(),
                    kind: ColumnKind::Numeric,
                    categories: Vec::new(),
                });
            }
        }
    }

    let protected_index = feature_cols
        .iter()
        .position(|&c| c == protected_col)
        .expect("protected column is a feature column");

    Ok(EncodedDataset {
        features,
        n_features,
        labels,
        feature_names: feature_cols
            .iter()
            .map(|&c| table.header[c].clone())
            .collect(),
        protected_index,
        protected_values,
        schemas,
        label_name: options.label_column.clone(),
        positive_label: options.positive_label.clone(),
        reference_group: options.reference_group.clone(),
        dropped_rows: table.dropped_rows,
    })
}

/// Read-only view of an [`EncodedDataset`]: a subset of rows and feature
/// columns. The protected vector and labels follow the row subset but ignore
/// the column subset.
#[derive(Clone, Debug)]
pub struct DataView {
    dataset: Arc<EncodedDataset>,
    rows: Arc<[usize]>,
    cols: Arc<[usize]>,
}

impl DataView {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.cols.len()
    }

    pub fn dataset(&self) -> &Arc<EncodedDataset> {
        &self.dataset
    }

    /// Feature value at view coordinates (row `i`, column `j`).
    pub fn feature(&self, i: usize, j: usize) -> f64 {
        self.dataset.feature(self.rows[i], self.cols[j])
    }

    pub fn label(&self, i: usize) -> u8 {
        self.dataset.labels[self.rows[i]]
    }

    pub fn protected_of(&self, i: usize) -> u8 {
        self.dataset.protected_values[self.rows[i]]
    }

    pub fn labels(&self) -> Vec<u8> {
        self.rows.iter().map(|&r| self.dataset.labels[r]).collect()
    }

    pub fn protected(&self) -> Vec<u8> {
        self.rows
            .iter()
            .map(|&r| self.dataset.protected_values[r])
            .collect()
    }

    /// Original dataset column index of view column `j`.
    pub fn source_column(&self, j: usize) -> usize {
        self.cols[j]
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.rows
    }

    /// Materialize the view as a dense row-major matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let d = self.n_features();
        let mut out = vec![0.0; self.n_rows() * d];
        for (i, &r) in self.rows.iter().enumerate() {
            for (j, &c) in self.cols.iter().enumerate() {
                out[i * d + j] = self.dataset.feature(r, c);
            }
        }
        out
    }

    /// Restrict the view to the columns selected by `mask`.
    pub fn mask(&self, mask: &Chromosome) -> Result<DataView> {
        if mask.len() != self.n_features() {
            return Err(Error::Runtime(format!(
                "mask length {} does not match view feature count {}",
                mask.len(),
                self.n_features()
            )));
        }
        if mask.is_all_zero() {
            return Err(Error::Runtime("all-zero mask selects no features".into()));
        }
        let cols: Vec<usize> = (0..self.cols.len())
            .filter(|&j| mask.get(j))
            .map(|j| self.cols[j])
            .collect();
        Ok(DataView {
            dataset: Arc::clone(&self.dataset),
            rows: Arc::clone(&self.rows),
            cols: cols.into(),
        })
    }

    pub(crate) fn with_rows(&self, rows: Vec<usize>) -> DataView {
        DataView {
            dataset: Arc::clone(&self.dataset),
            rows: rows.into(),
            cols: Arc::clone(&self.cols),
        }
    }
}

/// Expose only the columns selected by `mask`; labels and protected values
/// stay available regardless of whether the protected column is selected.
pub fn mask_view(view: &DataView, mask: &Chromosome) -> Result<DataView> {
    view.mask(mask)
}

/// Disjoint train/holdout row partition of one dataset.
#[derive(Clone, Debug)]
pub struct SplitPair {
    pub train: DataView,
    pub holdout: DataView,
    pub seed: u64,
    pub train_fraction: f64,
}

/// Stream tag separating split shuffles from the evolutionary streams.
const SPLIT_STREAM: u64 = 0x73706c6974;

/// Stratified split: per label class, a seeded shuffle assigns
/// `round(class_size * train_fraction)` rows to train. Identical
/// (dataset, seed, fraction) inputs always produce identical partitions.
pub fn split(dataset: &Arc<EncodedDataset>, seed: u64, train_fraction: f64) -> Result<SplitPair> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must lie strictly inside (0, 1), got {train_fraction}"
        )));
    }
    if dataset.n_rows() == 0 {
        return Err(Error::Data("cannot split an empty dataset".into()));
    }

    let mut train_rows: Vec<usize> = Vec::new();
    let mut holdout_rows: Vec<usize> = Vec::new();
    for class in [0u8, 1u8] {
        let mut members: Vec<usize> = (0..dataset.n_rows())
            .filter(|&r| dataset.labels[r] == class)
            .collect();
        if members.is_empty() {
            continue;
        }
        let mut class_rng = rng::stream(seed, &[SPLIT_STREAM, class as u64]);
        rng::shuffle(&mut members, &mut class_rng);
        let take = ((members.len() as f64) * train_fraction).round() as usize;
        let take = take.min(members.len());
        train_rows.extend(&members[..take]);
        holdout_rows.extend(&members[take..]);
    }
    if train_rows.is_empty() || holdout_rows.is_empty() {
        return Err(Error::Config(format!(
            "train_fraction {train_fraction} produces an empty partition for {} rows",
            dataset.n_rows()
        )));
    }
    train_rows.sort_unstable();
    holdout_rows.sort_unstable();

    let full = dataset.view();
    Ok(SplitPair {
        train: full.with_rows(train_rows),
        holdout: full.with_rows(holdout_rows),
        seed,
        train_fraction,
    })
}

// ---------------------------------------------------------------------------
// Dataset manifest
// ---------------------------------------------------------------------------

/// On-disk manifest describing one dataset: column names and kinds, CSV
/// options, label and protected designations, and the data file location
/// (resolved relative to the manifest file).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    /// Path to the data file, relative to the manifest's directory.
    pub data: PathBuf,
    #[serde(default)]
    pub csv: CsvSection,
    pub label: LabelSection,
    pub protected: ProtectedSection,
    pub columns: Vec<ColumnDecl>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CsvSection {
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
    #[serde(default)]
    pub has_header: bool,
    #[serde(default)]
    pub missing_token: Option<String>,
}

fn default_delimiter() -> String {
    ",".to_string()
}

impl Default for CsvSection {
    fn default() -> Self {
        Self {
            delimiter: default_delimiter(),
            has_header: false,
            missing_token: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelSection {
    pub column: String,
    pub positive: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProtectedSection {
    pub column: String,
    pub reference_group: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColumnDecl {
    pub name: String,
    pub kind: ColumnKind,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read manifest {}: {e}", path.display())))?;
        let mut manifest: DatasetManifest = toml::from_str(&content)
            .map_err(|e| Error::Config(format!("malformed manifest {}: {e}", path.display())))?;
        if manifest.csv.delimiter.chars().count() != 1 {
            return Err(Error::Config(format!(
                "manifest {}: delimiter must be a single character",
                path.display()
            )));
        }
        if manifest.data.is_relative() {
            if let Some(dir) = path.parent() {
                manifest.data = dir.join(&manifest.data);
            }
        }
        Ok(manifest)
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            delimiter: self.csv.delimiter.chars().next().unwrap_or(','),
            has_header: self.csv.has_header,
            missing_token: self.csv.missing_token.clone(),
        }
    }

    pub fn encode_options(&self) -> EncodeOptions {
        EncodeOptions {
            kinds: self.columns.iter().map(|c| c.kind).collect(),
            label_column: self.label.column.clone(),
            positive_label: self.label.positive.clone(),
            protected_column: self.protected.column.clone(),
            reference_group: self.protected.reference_group.clone(),
        }
    }
}

/// Load and encode the dataset a manifest describes. `data_override`
/// replaces the manifest's data path when given.
pub fn load_dataset(
    manifest: &DatasetManifest,
    data_override: Option<&Path>,
) -> Result<EncodedDataset> {
    let data_path = data_override.unwrap_or(&manifest.data);
    let mut table = load_csv(data_path, &manifest.load_options())?;
    if manifest.csv.has_header {
        let declared: Vec<&str> = manifest.columns.iter().map(|c| c.name.as_str()).collect();
        let found: Vec<&str> = table.header.iter().map(String::as_str).collect();
        if declared != found {
            return Err(Error::Data(format!(
                "header of {} does not match manifest columns",
                data_path.display()
            )));
        }
    } else {
        if manifest.columns.len() != table.n_cols() {
            return Err(Error::Data(format!(
                "manifest declares {} columns but {} has {}",
                manifest.columns.len(),
                data_path.display(),
                table.n_cols()
            )));
        }
        table.header = manifest.columns.iter().map(|c| c.name.clone()).collect();
    }
    encode(&table, &manifest.encode_options())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_options() -> LoadOptions {
        LoadOptions {
            delimiter: ',',
            has_header: true,
            missing_token: None,
        }
    }

    fn toy_path() -> PathBuf {
        PathBuf::from("test.csv")
    }

    #[test]
    fn parse_basic_csv() {
        let t = parse_csv("a,b\n1,x\n2,y", &toy_options(), &toy_path()).unwrap();
        assert_eq!(t.header, vec!["a", "b"]);
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.n_cols(), 2);
        assert_eq!(t.dropped_rows, 0);
    }

    #[test]
    fn parse_drops_and_counts_missing_rows() {
        let options = LoadOptions {
            missing_token: Some("?".into()),
            ..toy_options()
        };
        let t = parse_csv("a,b\n1,x\n?,y\n2,?\n3,z", &options, &toy_path()).unwrap();
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.dropped_rows, 2);
    }

    #[test]
    fn parse_ragged_row_names_line() {
        let err = parse_csv("a,b\n1,x\n2", &toy_options(), &toy_path()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_empty_file_is_an_error() {
        assert!(parse_csv("", &toy_options(), &toy_path()).is_err());
        assert!(parse_csv("a,b\n", &toy_options(), &toy_path()).is_err());
    }

    #[test]
    fn parse_whitespace_delimited() {
        let options = LoadOptions {
            delimiter: ' ',
            has_header: false,
            missing_token: None,
        };
        let t = parse_csv("A11 6 1\nA12  48 2\n", &options, &toy_path()).unwrap();
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.n_cols(), 3);
        assert_eq!(t.rows[1], vec!["A12", "48", "2"]);
    }

    fn toy_table() -> RawTable {
        parse_csv(
            "group,size,outcome\nb,1,yes\na,2,no\nb,3,yes\nc,4,no",
            &toy_options(),
            &toy_path(),
        )
        .unwrap()
    }

    fn toy_encode_options() -> EncodeOptions {
        EncodeOptions {
            kinds: vec![
                ColumnKind::Categorical,
                ColumnKind::Numeric,
                ColumnKind::Categorical,
            ],
            label_column: "outcome".into(),
            positive_label: "yes".into(),
            protected_column: "group".into(),
            reference_group: "b".into(),
        }
    }

    #[test]
    fn encode_first_appearance_order() {
        let encoded = encode(&toy_table(), &toy_encode_options()).unwrap();
        // column "group" with values [b, a, b, c] encodes to [0, 1, 0, 2]
        let codes: Vec<f64> = (0..4).map(|r| encoded.feature(r, 0)).collect();
        assert_eq!(codes, vec![0.0, 1.0, 0.0, 2.0]);
        assert_eq!(encoded.labels, vec![1, 0, 1, 0]);
        assert_eq!(encoded.protected_values, vec![1, 0, 1, 0]);
        assert_eq!(encoded.protected_index, 0);
        assert_eq!(encoded.n_features(), 2);
        assert_eq!(encoded.feature(3, 1), 4.0);
    }

    #[test]
    fn encode_round_trips_categories() {
        let encoded = encode(&toy_table(), &toy_encode_options()).unwrap();
        let schema = &encoded.schemas[0];
        for (r, original) in ["b", "a", "b", "c"].iter().enumerate() {
            let code = encoded.feature(r, 0) as usize;
            assert_eq!(schema.decode(code), Some(*original));
        }
    }

    #[test]
    fn encode_rejects_bad_label_and_protected_configs() {
        let mut bad_label = toy_encode_options();
        bad_label.label_column = "group".into(); // three distinct values
        assert!(encode(&toy_table(), &bad_label).is_err());

        let mut bad_positive = toy_encode_options();
        bad_positive.positive_label = "maybe".into();
        assert!(encode(&toy_table(), &bad_positive).is_err());

        let mut bad_reference = toy_encode_options();
        bad_reference.reference_group = "z".into();
        assert!(encode(&toy_table(), &bad_reference).is_err());
    }

    #[test]
    fn encode_rejects_unparseable_numeric() {
        let table = parse_csv(
            "group,size,outcome\nb,one,yes\na,2,no",
            &toy_options(),
            &toy_path(),
        )
        .unwrap();
        assert!(encode(&table, &toy_encode_options()).is_err());
    }

    fn balanced_dataset(n_pos: usize, n_neg: usize) -> Arc<EncodedDataset> {
        let mut content = String::from("x,label\n");
        for i in 0..n_pos {
            content.push_str(&format!("{i},p\n"));
        }
        for i in 0..n_neg {
            content.push_str(&format!("{},n\n", 100 + i));
        }
        let table = parse_csv(&content, &toy_options(), &toy_path()).unwrap();
        let options = EncodeOptions {
            kinds: vec![ColumnKind::Numeric, ColumnKind::Categorical],
            label_column: "label".into(),
            positive_label: "p".into(),
            protected_column: "x".into(),
            reference_group: "0".into(),
        };
        // protected designation is irrelevant here; x is numeric but equality
        // against "0" still marks the first row as the reference group
        Arc::new(encode(&table, &options).unwrap())
    }

    #[test]
    fn split_is_stratified_and_deterministic() {
        let data = balanced_dataset(5, 5);
        let pair = split(&data, 42, 0.8).unwrap();
        assert_eq!(pair.train.n_rows(), 8);
        assert_eq!(pair.holdout.n_rows(), 2);
        let train_pos: usize = pair.train.labels().iter().map(|&y| y as usize).sum();
        assert_eq!(train_pos, 4);

        let again = split(&data, 42, 0.8).unwrap();
        assert_eq!(pair.train.row_indices(), again.train.row_indices());
        assert_eq!(pair.holdout.row_indices(), again.holdout.row_indices());

        let other_seed = split(&data, 43, 0.8).unwrap();
        assert_ne!(pair.train.row_indices(), other_seed.train.row_indices());
    }

    #[test]
    fn split_conserves_rows() {
        let data = balanced_dataset(7, 13);
        let pair = split(&data, 3, 0.6).unwrap();
        let mut all: Vec<usize> = pair
            .train
            .row_indices()
            .iter()
            .chain(pair.holdout.row_indices())
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn split_rejects_degenerate_fractions() {
        let data = balanced_dataset(2, 2);
        assert!(split(&data, 0, 0.0).is_err());
        assert!(split(&data, 0, 1.0).is_err());
        // fraction so high every row lands in train
        assert!(split(&data, 0, 0.999).is_err());
    }

    #[test]
    fn mask_view_selects_columns_in_order() {
        let table = parse_csv(
            "a,b,c,d,e,label\n1,2,3,4,5,yes\n6,7,8,9,10,no",
            &toy_options(),
            &toy_path(),
        )
        .unwrap();
        let options = EncodeOptions {
            kinds: vec![ColumnKind::Numeric; 5]
                .into_iter()
                .chain([ColumnKind::Categorical])
                .collect(),
            label_column: "label".into(),
            positive_label: "yes".into(),
            protected_column: "a".into(),
            reference_group: "1".into(),
        };
        let data = Arc::new(encode(&table, &options).unwrap());
        let view = data.view();

        let identity = view.mask(&Chromosome::ones(5)).unwrap();
        assert_eq!(identity.to_dense(), view.to_dense());

        let mask = Chromosome::from_mask_str("10110").unwrap();
        let masked = view.mask(&mask).unwrap();
        assert_eq!(masked.n_features(), 3);
        assert_eq!(masked.to_dense(), vec![1.0, 3.0, 4.0, 6.0, 8.0, 9.0]);

        // excluding the protected column keeps the protected vector available
        let without_protected = view
            .mask(&Chromosome::from_mask_str("01111").unwrap())
            .unwrap();
        assert_eq!(without_protected.n_features(), 4);
        assert_eq!(without_protected.protected(), vec![1, 0]);

        assert!(view.mask(&Chromosome::ones(4)).is_err());
        assert!(view.mask(&Chromosome::from_bits(vec![false; 5])).is_err());
    }

    proptest! {
        /// Splits partition the rows exactly and reproduce under the same seed,
        /// and class proportions stay within a percentage point of the full
        /// dataset when classes are large enough for the arithmetic to allow it.
        #[test]
        fn split_partition_properties(
            n_pos in 20usize..120,
            n_neg in 20usize..120,
            seed in any::<u64>(),
            fraction in 0.2f64..0.8,
        ) {
            let data = balanced_dataset(n_pos, n_neg);
            let pair = split(&data, seed, fraction).unwrap();
            let n = n_pos + n_neg;
            prop_assert_eq!(pair.train.n_rows() + pair.holdout.n_rows(), n);

            let repeat = split(&data, seed, fraction).unwrap();
            prop_assert_eq!(pair.train.row_indices(), repeat.train.row_indices());

            let full_rate = n_pos as f64 / n as f64;
            for side in [&pair.train, &pair.holdout] {
                let pos: usize = side.labels().iter().map(|&y| y as usize).sum();
                let rate = pos as f64 / side.n_rows() as f64;
                prop_assert!((rate - full_rate).abs() <= 0.01 + 1.0 / side.n_rows() as f64);
            }
        }
    }
}
