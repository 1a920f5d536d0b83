//! Transaction databases over a finite item alphabet.
//!
//! A database is an m×n 0/1 matrix: one row per transaction, one column per
//! item. Rows are stored as bit-sets, so coverage queries reduce to subset
//! tests. Two file formats are supported:
//!
//! * `transactions`: UTF-8 text, one transaction per line, item labels
//!   separated by whitespace; blank lines are skipped. Transaction `k` gets
//!   the id `tk`. The alphabet is the sorted union of observed labels.
//! * `matrix`: CSV whose first row lists the item labels and whose
//!   remaining rows hold 0/1 cells.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use fixedbitset::FixedBitSet;
use rand::SeedableRng;
use rand::{seq::index::sample, Rng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("failed to read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("dataset {path} contains no transactions")]
    Empty { path: PathBuf },
    #[error("unknown item label `{0}`")]
    UnknownItem(String),
    #[error("itemset is over an alphabet of {got} items, database has {expected}")]
    AlphabetMismatch { got: usize, expected: usize },
    #[error("generator: {0}")]
    Generator(String),
}

/// A set of items, as indices into a database alphabet of fixed width.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Itemset(FixedBitSet);

impl Itemset {
    pub fn empty(num_items: usize) -> Itemset {
        Itemset(FixedBitSet::with_capacity(num_items))
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(num_items: usize, indices: I) -> Itemset {
        let mut bits = FixedBitSet::with_capacity(num_items);
        for i in indices {
            bits.insert(i);
        }
        Itemset(bits)
    }

    /// Width of the alphabet this set ranges over.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.contains(item)
    }

    pub fn insert(&mut self, item: usize) {
        self.0.insert(item);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn is_subset(&self, other: &Itemset) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &Itemset) -> Itemset {
        let mut bits = self.0.clone();
        bits.union_with(&other.0);
        Itemset(bits)
    }
}

impl PartialOrd for Itemset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Itemset {
    /// Lexicographic order on the ascending index sequences; gives
    /// containers of itemsets a deterministic iteration order.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.ones().cmp(other.0.ones())
    }
}

/// A set of transactions, as indices into a database of fixed height.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TransactionSet(FixedBitSet);

impl TransactionSet {
    pub fn empty(num_transactions: usize) -> TransactionSet {
        TransactionSet(FixedBitSet::with_capacity(num_transactions))
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(
        num_transactions: usize,
        indices: I,
    ) -> TransactionSet {
        let mut bits = FixedBitSet::with_capacity(num_transactions);
        for t in indices {
            bits.insert(t);
        }
        TransactionSet(bits)
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, t: usize) -> bool {
        self.0.contains(t)
    }

    pub fn insert(&mut self, t: usize) {
        self.0.insert(t);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn intersection(&self, other: &TransactionSet) -> TransactionSet {
        let mut bits = self.0.clone();
        bits.intersect_with(&other.0);
        TransactionSet(bits)
    }
}

/// File formats understood by [`ItemsetDatabase::load`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DatasetFormat {
    Transactions,
    Matrix,
}

/// An immutable m×n transaction/item matrix with an ordered item alphabet.
///
/// Duplicate transactions are retained; the database is a multi-set. Safe to
/// share across threads once built.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ItemsetDatabase {
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    rows: Vec<Itemset>,
    ids: Vec<String>,
}

impl ItemsetDatabase {
    /// Builds a database from an alphabet and bit-rows. Ids default to
    /// `t1..tm`. Panics if invariants are violated; the file loaders report
    /// proper errors instead.
    pub fn new(labels: Vec<String>, rows: Vec<Itemset>) -> ItemsetDatabase {
        assert!(!labels.is_empty(), "alphabet must be non-empty");
        assert!(!rows.is_empty(), "database must hold at least one transaction");
        let label_index: HashMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        assert_eq!(label_index.len(), labels.len(), "item labels must be unique");
        for row in &rows {
            assert_eq!(row.universe(), labels.len(), "row width must match alphabet");
        }
        let ids = (1..=rows.len()).map(|k| format!("t{k}")).collect();
        ItemsetDatabase {
            labels,
            label_index,
            rows,
            ids,
        }
    }

    pub fn num_items(&self) -> usize {
        self.labels.len()
    }

    pub fn num_transactions(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn item_label(&self, item: usize) -> &str {
        &self.labels[item]
    }

    pub fn transaction_id(&self, t: usize) -> &str {
        &self.ids[t]
    }

    pub fn item_index(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    /// Row `t` as the set of items it contains.
    pub fn row(&self, t: usize) -> &Itemset {
        &self.rows[t]
    }

    pub fn rows(&self) -> &[Itemset] {
        &self.rows
    }

    /// Resolves item labels into an [`Itemset`] over this alphabet.
    pub fn itemset_from_labels<S: AsRef<str>>(
        &self,
        labels: &[S],
    ) -> Result<Itemset, DatasetError> {
        let mut set = Itemset::empty(self.num_items());
        for l in labels {
            let idx = self
                .item_index(l.as_ref())
                .ok_or_else(|| DatasetError::UnknownItem(l.as_ref().to_string()))?;
            set.insert(idx);
        }
        Ok(set)
    }

    fn check_itemset(&self, itemset: &Itemset) -> Result<(), DatasetError> {
        if itemset.universe() != self.num_items() {
            return Err(DatasetError::AlphabetMismatch {
                got: itemset.universe(),
                expected: self.num_items(),
            });
        }
        Ok(())
    }

    /// Transactions containing every item of `itemset`; the empty itemset
    /// covers everything.
    pub fn coverage(&self, itemset: &Itemset) -> Result<TransactionSet, DatasetError> {
        self.check_itemset(itemset)?;
        let mut covered = TransactionSet::empty(self.num_transactions());
        for (t, row) in self.rows.iter().enumerate() {
            if itemset.is_subset(row) {
                covered.insert(t);
            }
        }
        Ok(covered)
    }

    /// Coverage size.
    pub fn support(&self, itemset: &Itemset) -> Result<usize, DatasetError> {
        Ok(self.coverage(itemset)?.len())
    }

    /// Support divided by the number of transactions.
    pub fn frequency(&self, itemset: &Itemset) -> Result<f64, DatasetError> {
        Ok(self.support(itemset)? as f64 / self.num_transactions() as f64)
    }

    /// Fraction of ones in the matrix.
    pub fn density(&self) -> f64 {
        let ones: usize = self.rows.iter().map(|r| r.len()).sum();
        ones as f64 / (self.num_transactions() * self.num_items()) as f64
    }

    pub fn load<P: AsRef<Path>>(
        path: P,
        format: DatasetFormat,
    ) -> Result<ItemsetDatabase, DatasetError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        match format {
            DatasetFormat::Transactions => Self::parse_transactions(&text, path),
            DatasetFormat::Matrix => Self::parse_matrix(&text, path),
        }
    }

    /// Parses the `transactions` format from a string.
    pub fn parse_transactions(text: &str, path: &Path) -> Result<ItemsetDatabase, DatasetError> {
        let mut raw_rows: Vec<Vec<String>> = Vec::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            raw_rows.push(line.split_whitespace().map(str::to_string).collect());
        }
        if raw_rows.is_empty() {
            return Err(DatasetError::Empty {
                path: path.to_path_buf(),
            });
        }
        let mut labels: Vec<String> = raw_rows.iter().flatten().cloned().collect();
        labels.sort();
        labels.dedup();
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let rows = raw_rows
            .iter()
            .map(|items| {
                Itemset::from_indices(labels.len(), items.iter().map(|l| index[l.as_str()]))
            })
            .collect();
        Ok(ItemsetDatabase::new(labels, rows))
    }

    /// Parses the `matrix` format (CSV, header of labels, 0/1 cells).
    pub fn parse_matrix(text: &str, path: &Path) -> Result<ItemsetDatabase, DatasetError> {
        let parse_err = |line: usize, message: String| DatasetError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| DatasetError::Empty {
            path: path.to_path_buf(),
        })?;
        let labels: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        if labels.iter().any(String::is_empty) {
            return Err(parse_err(1, "empty item label in header".into()));
        }
        {
            let mut seen = labels.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != labels.len() {
                return Err(parse_err(1, "duplicate item label in header".into()));
            }
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != labels.len() {
                return Err(parse_err(
                    lineno + 1,
                    format!("expected {} cells, found {}", labels.len(), cells.len()),
                ));
            }
            let mut row = Itemset::empty(labels.len());
            for (i, cell) in cells.iter().enumerate() {
                match *cell {
                    "0" => {}
                    "1" => row.insert(i),
                    other => {
                        return Err(parse_err(
                            lineno + 1,
                            format!("cell must be 0 or 1, found `{other}`"),
                        ))
                    }
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(DatasetError::Empty {
                path: path.to_path_buf(),
            });
        }
        Ok(ItemsetDatabase::new(labels, rows))
    }

    /// Renders the database in the `transactions` format.
    pub fn to_transactions_string(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mut first = true;
            for i in row.iter() {
                if !first {
                    out.push(' ');
                }
                out.push_str(&self.labels[i]);
                first = false;
            }
            out.push('\n');
        }
        out
    }

    /// Renders the database in the `matrix` format.
    pub fn to_matrix_string(&self) -> String {
        let mut out = self.labels.join(",");
        out.push('\n');
        for row in &self.rows {
            for i in 0..self.num_items() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", u8::from(row.contains(i)));
            }
            out.push('\n');
        }
        out
    }
}

/// Parameters of the synthetic dataset generator.
#[derive(Clone, Debug)]
pub struct GeneratorParams {
    /// Alphabet size n.
    pub items: usize,
    /// Transaction count m.
    pub transactions: usize,
    /// Target fraction of ones, in (0, 1).
    pub density: f64,
    /// Pattern bias: each planted itemset is embedded into ⌈gamma·m⌉ rows.
    pub gamma: f64,
    /// Number of planted itemsets.
    pub planted: usize,
    pub seed: u64,
}

/// Generates a random database: `planted` itemsets are superimposed onto
/// γ-proportional row subsets, then remaining cells are filled to hit the
/// target density exactly (up to rounding).
///
/// Deterministic under a fixed seed.
pub fn generate(params: &GeneratorParams) -> Result<ItemsetDatabase, DatasetError> {
    let n = params.items;
    let m = params.transactions;
    if n == 0 || m == 0 {
        return Err(DatasetError::Generator(
            "need at least one item and one transaction".into(),
        ));
    }
    if !(params.density > 0.0 && params.density < 1.0) {
        return Err(DatasetError::Generator(format!(
            "density must lie in (0, 1), got {}",
            params.density
        )));
    }
    if !(0.0..=1.0).contains(&params.gamma) {
        return Err(DatasetError::Generator(format!(
            "gamma must lie in [0, 1], got {}",
            params.gamma
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut grid = vec![false; m * n];

    // Plant patterns: random itemsets of size in [2, max(3, n/4)], each
    // stamped onto ⌈γ·m⌉ random rows.
    let rows_per_pattern = (params.gamma * m as f64).ceil() as usize;
    let max_size = (n / 4).max(3).min(n);
    let min_size = 2.min(n);
    for _ in 0..params.planted {
        let size = rng.gen_range(min_size..=max_size);
        let items = sample(&mut rng, n, size);
        let rows = sample(&mut rng, m, rows_per_pattern.min(m));
        for t in rows.iter() {
            for i in items.iter() {
                grid[t * n + i] = true;
            }
        }
    }

    let target_ones = (params.density * (m * n) as f64).round() as usize;
    let planted_ones = grid.iter().filter(|&&b| b).count();
    if planted_ones > target_ones {
        return Err(DatasetError::Generator(format!(
            "planted patterns already occupy {planted_ones} cells, above the \
             target of {target_ones}; raise density or lower gamma/planted"
        )));
    }
    let zeros: Vec<usize> = (0..m * n).filter(|&c| !grid[c]).collect();
    let need = target_ones - planted_ones;
    for k in sample(&mut rng, zeros.len(), need).iter() {
        grid[zeros[k]] = true;
    }

    let labels = (1..=n).map(|i| format!("i{i}")).collect();
    let rows = (0..m)
        .map(|t| Itemset::from_indices(n, (0..n).filter(|&i| grid[t * n + i])))
        .collect();
    Ok(ItemsetDatabase::new(labels, rows))
}
