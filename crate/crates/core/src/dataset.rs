//! Tabular datasets with binary labels, feature masks and seeded splits.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Scalar;

/// Row ids at or above this value belong to synthetic (oversampled) rows.
pub const SYNTHETIC_ROW_ID: u64 = 1 << 63;

/// Dense row-major matrix. Used wherever missing values are no longer allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::FeatureCount {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Copy of the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * columns.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(columns.iter().map(|&j| row[j]));
        }
        Self {
            rows: self.rows,
            cols: columns.len(),
            data,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }
}

/// A feature subset: bit `i` set means feature `i` is used.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureMask {
    bits: Vec<bool>,
}

impl FeatureMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn ones(n: usize) -> Self {
        Self::new(vec![true; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![false; n])
    }

    /// Mask with bit `i` set iff bit `i` of `pattern` is set (bit 0 = feature 0).
    pub fn from_index(pattern: u64, n: usize) -> Self {
        Self::new((0..n).map(|i| pattern >> i & 1 == 1).collect())
    }

    pub fn from_indices(n: usize, selected: &[usize]) -> Self {
        let mut m = Self::zeros(n);
        for &i in selected {
            m.bits[i] = true;
        }
        m
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when no feature is selected.
    pub fn is_all_zero(&self) -> bool {
        !self.bits.contains(&true)
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.bits[i] = v;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// `100·(1 − popcount/N)`.
    pub fn reduction_pct(&self) -> f64 {
        if self.bits.is_empty() {
            return 0.0;
        }
        100.0 * (1.0 - self.popcount() as f64 / self.len() as f64)
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::config(format!("invalid mask character `{c}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub(crate) fn check_evaluable(&self, n_features: usize) -> Result<()> {
        if self.len() != n_features {
            return Err(Error::MaskLength {
                mask: self.len(),
                features: n_features,
            });
        }
        if self.is_all_zero() {
            return Err(Error::EmptyMask);
        }
        Ok(())
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl fmt::Debug for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureMask({})", self.to_bit_string())
    }
}

impl Serialize for FeatureMask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bit_string())
    }
}

impl<'de> Deserialize<'de> for FeatureMask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FeatureMask::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Train/test split request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Self {
        Self {
            train_fraction,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::config(format!(
                "train fraction {} outside (0, 1)",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// CSV loading rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoadOptions {
    pub label_column: String,
    pub missing_tokens: Vec<String>,
    /// Columns where a literal zero means "not measured".
    pub zero_missing_columns: Vec<String>,
    /// Label token mapped to 1 when labels are not numeric. Without it the
    /// two distinct tokens are coded in sorted order.
    pub positive_label: Option<String>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            label_column: "Outcome".into(),
            missing_tokens: vec![String::new(), "?".into(), "NaN".into()],
            zero_missing_columns: Vec::new(),
            positive_label: None,
        }
    }
}

impl LoadOptions {
    pub fn with_label(label_column: impl Into<String>) -> Self {
        Self {
            label_column: label_column.into(),
            ..Self::default()
        }
    }
}

/// Feature table with a binary label per row. `None` marks a missing cell.
///
/// Immutable once built: every transformation returns a new dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    names: Vec<String>,
    label_name: String,
    values: Vec<Option<T>>,
    labels: Vec<u8>,
    row_ids: Vec<u64>,
    categories: BTreeMap<String, Vec<String>>,
    source: String,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(
        names: Vec<String>,
        rows: Vec<Vec<Option<T>>>,
        labels: Vec<u8>,
        source: impl Into<String>,
    ) -> Result<Self> {
        let n = names.len();
        let mut values = Vec::with_capacity(rows.len() * n);
        for r in &rows {
            if r.len() != n {
                return Err(Error::FeatureCount {
                    expected: n,
                    found: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        let row_ids = (0..rows.len() as u64).collect();
        Self::from_parts(names, "label".into(), values, labels, row_ids, BTreeMap::new(), source.into())
    }

    /// Builds a fully observed dataset from a dense matrix.
    pub fn from_matrix(names: Vec<String>, x: &Matrix<T>, labels: Vec<u8>) -> Result<Self> {
        let rows = x.iter_rows().map(|r| r.iter().copied().map(Some).collect()).collect();
        Self::new(names, rows, labels, "matrix")
    }

    pub(crate) fn from_parts(
        names: Vec<String>,
        label_name: String,
        values: Vec<Option<T>>,
        labels: Vec<u8>,
        row_ids: Vec<u64>,
        categories: BTreeMap<String, Vec<String>>,
        source: String,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateFeature(name.clone()));
            }
            if *name == label_name {
                return Err(Error::DuplicateFeature(name.clone()));
            }
        }
        if values.len() != labels.len() * names.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: labels.len() * names.len(),
            });
        }
        if labels.len() != row_ids.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: row_ids.len(),
            });
        }
        if let Some(row) = labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidLabel {
                row,
                value: labels[row].to_string(),
            });
        }
        Ok(Self {
            names,
            label_name,
            values,
            labels,
            row_ids,
            categories,
            source,
        })
    }

    /// Same schema, new rows.
    pub(crate) fn with_rows(&self, values: Vec<Option<T>>, labels: Vec<u8>, row_ids: Vec<u64>) -> Self {
        debug_assert_eq!(values.len(), labels.len() * self.n_features());
        debug_assert_eq!(labels.len(), row_ids.len());
        Self {
            names: self.names.clone(),
            label_name: self.label_name.clone(),
            values,
            labels,
            row_ids,
            categories: self.categories.clone(),
            source: self.source.clone(),
        }
    }

    pub fn with_label_name(mut self, label_name: impl Into<String>) -> Result<Self> {
        let label_name = label_name.into();
        if self.names.contains(&label_name) {
            return Err(Error::DuplicateFeature(label_name));
        }
        self.label_name = label_name;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.names
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn row_ids(&self) -> &[u64] {
        &self.row_ids
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Code dictionaries for columns that were loaded from text tokens.
    pub fn categories(&self) -> &BTreeMap<String, Vec<String>> {
        &self.categories
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Option<T>] {
        let n = self.n_features();
        &self.values[i * n..(i + 1) * n]
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> Option<T> {
        self.values[i * self.n_features() + j]
    }

    pub fn values(&self) -> &[Option<T>] {
        &self.values
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = Option<T>> + '_ {
        (0..self.n_rows()).map(move |i| self.value(i, j))
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(Option::is_none)
    }

    /// `[count of label 0, count of label 1]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }

    /// Dense copy of the features; fails while any cell is missing.
    pub fn to_matrix(&self) -> Result<Matrix<T>> {
        let data = self
            .values
            .iter()
            .map(|v| v.ok_or(Error::HasMissing))
            .collect::<Result<Vec<_>>>()?;
        Matrix::new(self.n_rows(), self.n_features(), data)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let n = self.n_features();
        let mut values = Vec::with_capacity(rows.len() * n);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        let labels = rows.iter().map(|&i| self.labels[i]).collect();
        let ids = rows.iter().map(|&i| self.row_ids[i]).collect();
        self.with_rows(values, labels, ids)
    }

    /// Keeps exactly the columns whose mask bit is set, in original order.
    pub fn project(&self, mask: &FeatureMask) -> Result<Self> {
        mask.check_evaluable(self.n_features())?;
        let keep = mask.indices();
        let mut values = Vec::with_capacity(self.n_rows() * keep.len());
        for i in 0..self.n_rows() {
            let row = self.row(i);
            values.extend(keep.iter().map(|&j| row[j]));
        }
        let names: Vec<String> = keep.iter().map(|&j| self.names[j].clone()).collect();
        let categories = self
            .categories
            .iter()
            .filter(|(k, _)| names.contains(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Ok(Self {
            names,
            label_name: self.label_name.clone(),
            values,
            labels: self.labels.clone(),
            row_ids: self.row_ids.clone(),
            categories,
            source: self.source.clone(),
        })
    }

    /// Row indices of a seeded train/test partition, both sorted ascending.
    pub fn split_indices(&self, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
        spec.validate()?;
        let rows = self.n_rows();
        let n_train = (spec.train_fraction * rows as f64).round() as usize;
        if rows < 2 || n_train == 0 || n_train >= rows {
            return Err(Error::TooFewRows(format!(
                "{rows} rows cannot be split at fraction {}",
                spec.train_fraction
            )));
        }
        let mut rng = rng::stream(spec.seed, &[rng::tag::SPLIT]);
        let mut train = Vec::with_capacity(n_train);
        let mut test = Vec::with_capacity(rows - n_train);

        if spec.stratified {
            let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
            for (i, &l) in self.labels.iter().enumerate() {
                by_class[l as usize].push(i);
            }
            if by_class.iter().any(|c| c.len() < 2) {
                return Err(Error::TooFewRows(format!(
                    "stratified split needs at least 2 rows per class, got {:?}",
                    self.class_counts()
                )));
            }
            let quotas = largest_remainder(
                &[by_class[0].len(), by_class[1].len()],
                spec.train_fraction,
                n_train,
            );
            for (class, quota) in by_class.iter_mut().zip(quotas) {
                class.shuffle(&mut rng);
                train.extend_from_slice(&class[..quota]);
                test.extend_from_slice(&class[quota..]);
            }
        } else {
            let mut all: Vec<usize> = (0..rows).collect();
            all.shuffle(&mut rng);
            train.extend_from_slice(&all[..n_train]);
            test.extend_from_slice(&all[n_train..]);
        }
        train.sort_unstable();
        test.sort_unstable();
        Ok((train, test))
    }

    pub fn split(&self, spec: &SplitSpec) -> Result<(Self, Self)> {
        let (train, test) = self.split_indices(spec)?;
        Ok((self.select_rows(&train), self.select_rows(&test)))
    }

    /// 64-bit hash of names, values and labels.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.names.hash(&mut h);
        for v in &self.values {
            match v {
                Some(x) => x.as_f64().to_bits().hash(&mut h),
                None => u64::MAX.hash(&mut h),
            }
        }
        self.labels.hash(&mut h);
        h.finish()
    }

    /// Parses a CSV with a header row.
    ///
    /// Columns whose observed cells are all non-numeric are coded by sorted
    /// token order; a column mixing numbers and text is rejected.
    pub fn load_csv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, opts, &path.display().to_string())
    }

    pub fn read_csv<R: std::io::Read>(reader: R, opts: &LoadOptions, source: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let label_idx = header
            .iter()
            .position(|h| *h == opts.label_column)
            .ok_or_else(|| Error::MissingLabelColumn(opts.label_column.clone()))?;

        let mut raw: Vec<Vec<String>> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: header.len(),
                    found: rec.len(),
                });
            }
            raw.push(rec.iter().map(str::to_owned).collect());
        }
        if raw.is_empty() {
            return Err(Error::EmptyDataset);
        }

        let missing: HashSet<&str> = opts.missing_tokens.iter().map(String::as_str).collect();
        let feature_cols: Vec<usize> = (0..header.len()).filter(|&c| c != label_idx).collect();
        let names: Vec<String> = feature_cols.iter().map(|&c| header[c].clone()).collect();
        let n = names.len();
        let n_rows = raw.len();
        let mut values = vec![None; n_rows * n];
        let mut categories = BTreeMap::new();

        for (j, &c) in feature_cols.iter().enumerate() {
            let zero_missing = opts.zero_missing_columns.contains(&header[c]);
            let cells: Vec<Option<&str>> = raw
                .iter()
                .map(|r| Some(r[c].as_str()).filter(|s| !missing.contains(s)))
                .collect();
            let parsed: Vec<Option<std::result::Result<T, ()>>> = cells
                .iter()
                .map(|cell| cell.map(|s| parse_finite::<T>(s).ok_or(())))
                .collect();
            let numeric = parsed.iter().flatten().filter(|p| p.is_ok()).count();
            let textual = parsed.iter().flatten().filter(|p| p.is_err()).count();

            if textual > 0 && numeric == 0 {
                let dict: Vec<String> = cells
                    .iter()
                    .flatten()
                    .map(|s| s.to_string())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                for (i, cell) in cells.iter().enumerate() {
                    values[i * n + j] = cell.map(|s| {
                        T::of_usize(dict.binary_search_by(|d| d.as_str().cmp(s)).expect("token in dictionary"))
                    });
                }
                categories.insert(header[c].clone(), dict);
                continue;
            }
            for (i, p) in parsed.into_iter().enumerate() {
                values[i * n + j] = match p {
                    None => None,
                    Some(Ok(v)) if zero_missing && v == T::zero() => None,
                    Some(Ok(v)) => Some(v),
                    Some(Err(())) => {
                        return Err(Error::UnparseableCell {
                            row: i + 1,
                            column: header[c].clone(),
                            value: raw[i][c].clone(),
                        })
                    }
                };
            }
        }

        let labels = coerce_labels(raw.iter().map(|r| r[label_idx].as_str()), opts)?;
        let row_ids = (0..n_rows as u64).collect();
        Self::from_parts(
            names,
            header[label_idx].clone(),
            values,
            labels,
            row_ids,
            categories,
            source.to_owned(),
        )
    }

    /// Writes features then the label column. Missing cells are written empty;
    /// coded categorical columns are written as their codes.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = self.names.clone();
        header.push(self.label_name.clone());
        w.write_record(&header)?;
        let mut rec = Vec::with_capacity(header.len());
        for i in 0..self.n_rows() {
            rec.clear();
            rec.extend(
                self.row(i)
                    .iter()
                    .map(|v| v.map_or_else(String::new, |x| x.to_string())),
            );
            rec.push(self.labels[i].to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Seeded two-class table for tests and benchmarks. The first
/// `informative` features are shifted up or down by the label (with a
/// per-feature strength in [0.05, 0.35]) under uniform noise; the rest are
/// pure noise. Labels are fair coin flips.
pub fn synthetic<T: Scalar>(rows: usize, features: usize, informative: usize, seed: u64) -> Dataset<T> {
    use rand::Rng as _;
    let mut r = rng::stream(seed, &[rng::tag::SYNTHETIC]);
    let shifts: Vec<f64> = (0..features).map(|_| r.random_range(0.05..0.35)).collect();
    let mut labels = Vec::with_capacity(rows);
    let mut data = Vec::with_capacity(rows);
    for _ in 0..rows {
        let y: bool = r.random();
        let sign = if y { 1.0 } else { -1.0 };
        data.push(
            (0..features)
                .map(|j| {
                    let noise = r.random_range(-0.5..0.5);
                    let shift = if j < informative { sign * shifts[j] } else { 0.0 };
                    Some(T::of(0.5 + shift + noise))
                })
                .collect(),
        );
        labels.push(u8::from(y));
    }
    let names = (0..features).map(|j| format!("x{j}")).collect();
    Dataset::new(names, data, labels, format!("synthetic:{seed}")).expect("well-formed synthetic table")
}

fn parse_finite<T: Scalar>(s: &str) -> Option<T> {
    s.parse::<T>().ok().filter(|v| v.is_finite())
}

fn coerce_labels<'a>(cells: impl Iterator<Item = &'a str>, opts: &LoadOptions) -> Result<Vec<u8>> {
    let cells: Vec<&str> = cells.collect();
    let all_numeric = cells.iter().all(|s| s.parse::<f64>().is_ok());
    if all_numeric {
        return cells
            .iter()
            .enumerate()
            .map(|(row, s)| match s.parse::<f64>() {
                Ok(0.0) => Ok(0),
                Ok(1.0) => Ok(1),
                _ => Err(Error::InvalidLabel {
                    row: row + 1,
                    value: s.to_string(),
                }),
            })
            .collect();
    }
    let tokens: BTreeSet<&str> = cells.iter().copied().collect();
    let positive = match &opts.positive_label {
        Some(p) => p.as_str(),
        None if tokens.len() == 2 => tokens.iter().next_back().copied().unwrap_or_default(),
        None => {
            let bad = cells.iter().position(|s| s.is_empty()).unwrap_or(0);
            return Err(Error::InvalidLabel {
                row: bad + 1,
                value: format!("{} distinct label tokens", tokens.len()),
            });
        }
    };
    let negative: Vec<&str> = tokens.iter().copied().filter(|t| *t != positive).collect();
    if negative.len() > 1 {
        return Err(Error::InvalidLabel {
            row: 1,
            value: format!("{} distinct label tokens", tokens.len()),
        });
    }
    Ok(cells.iter().map(|s| u8::from(*s == positive)).collect())
}

/// Splits `total` across groups proportionally to `sizes`, rounding by
/// largest remainder (ties to the lower group index).
fn largest_remainder(sizes: &[usize], fraction: f64, total: usize) -> Vec<usize> {
    let exact: Vec<f64> = sizes.iter().map(|&s| s as f64 * fraction).collect();
    let mut quotas: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut assigned: usize = quotas.iter().sum();
    for &g in order.iter().cycle().take(4 * sizes.len()) {
        if assigned >= total {
            break;
        }
        if quotas[g] < sizes[g] {
            quotas[g] += 1;
            assigned += 1;
        }
    }
    while assigned > total {
        let g = order.iter().rev().copied().find(|&g| quotas[g] > 0).expect("nonzero quota");
        quotas[g] -= 1;
        assigned -= 1;
    }
    quotas
}
