//! Worlds, datasets of worlds, and the distributions they induce.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use smallvec::SmallVec;
use thiserror::Error;

use crate::formula::{is_identifier, AtomUniverse, Formula, FormulaError, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatasetError {
    #[error("dataset has no entries")]
    EmptyDataset,
    #[error("entry {0} has a zero count")]
    ZeroCount(usize),
    #[error("entry {entry} has width {found}, expected {expected}")]
    WidthMismatch {
        entry: usize,
        expected: usize,
        found: usize,
    },
    #[error("worlds csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Total truth assignment; atom `i` is bit `i`.
///
/// Worlds order by their bit pattern read as an unsigned integer, atom 0
/// being the least significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct World {
    width: usize,
    words: SmallVec<[u64; 2]>,
}

impl World {
    /// All atoms false.
    pub fn new(width: usize) -> Self {
        World {
            width,
            words: SmallVec::from_elem(0, width.div_ceil(64)),
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut w = World::new(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            w.set(i, b);
        }
        w
    }

    /// World whose bit pattern is `index`; requires `width <= 64`.
    pub fn from_index(width: usize, index: u64) -> Self {
        assert!(width <= 64, "from_index supports at most 64 atoms");
        let mut w = World::new(width);
        if width > 0 {
            let mask = if width == 64 { !0 } else { (1u64 << width) - 1 };
            w.words[0] = index & mask;
        }
        w
    }

    /// Bit pattern as an integer, when it fits.
    pub fn index(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, atom: usize) -> bool {
        assert!(atom < self.width, "atom {atom} out of range {}", self.width);
        (self.words[atom / 64] >> (atom % 64)) & 1 == 1
    }

    pub fn set(&mut self, atom: usize, value: bool) {
        assert!(atom < self.width, "atom {atom} out of range {}", self.width);
        let bit = 1u64 << (atom % 64);
        if value {
            self.words[atom / 64] |= bit;
        } else {
            self.words[atom / 64] &= !bit;
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(move |i| self.get(i))
    }
}

impl Ord for World {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for World {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Set of worlds over a small universe, one bit per world index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldSet {
    width: usize,
    words: Vec<u64>,
}

impl WorldSet {
    pub fn empty(width: usize) -> Self {
        assert!(width <= 40, "world sets are limited to 40 atoms");
        let n_worlds = 1u64 << width;
        WorldSet {
            width,
            words: vec![0; n_worlds.div_ceil(64) as usize],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn contains(&self, w: &World) -> bool {
        match w.index() {
            Some(i) if w.width() == self.width => {
                (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
            }
            _ => false,
        }
    }

    pub fn insert(&mut self, w: &World) {
        assert_eq!(w.width(), self.width, "world width does not match set");
        let i = w.index().expect("width checked");
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.width == other.width
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        assert_eq!(self.width, other.width);
        WorldSet {
            width: self.width,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union(&self, other: &WorldSet) -> WorldSet {
        assert_eq!(self.width, other.width);
        WorldSet {
            width: self.width,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    /// Members in canonical (integer) order.
    pub fn iter(&self) -> impl Iterator<Item = World> + '_ {
        let width = self.width;
        self.words
            .iter()
            .enumerate()
            .flat_map(move |(block, &word)| {
                let mut rest = word;
                std::iter::from_fn(move || {
                    if rest == 0 {
                        return None;
                    }
                    let t = rest.trailing_zeros() as u64;
                    rest &= rest - 1;
                    Some(World::from_index(width, block as u64 * 64 + t))
                })
            })
    }
}

/// Multiset of data, each datum supporting one world, stored as
/// `(world, count)` pairs. `K` is the sum of counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    width: usize,
    entries: Vec<(World, u64)>,
    total: u64,
}

impl Dataset {
    pub fn new(width: usize, entries: Vec<(World, u64)>) -> Result<Self, DatasetError> {
        if entries.is_empty() {
            return Err(DatasetError::EmptyDataset);
        }
        let mut total = 0u64;
        for (i, (w, c)) in entries.iter().enumerate() {
            if w.width() != width {
                return Err(DatasetError::WidthMismatch {
                    entry: i,
                    expected: width,
                    found: w.width(),
                });
            }
            if *c == 0 {
                return Err(DatasetError::ZeroCount(i));
            }
            total += c;
        }
        Ok(Dataset {
            width,
            entries,
            total,
        })
    }

    /// One datum per world.
    pub fn from_worlds<I: IntoIterator<Item = World>>(
        width: usize,
        worlds: I,
    ) -> Result<Self, DatasetError> {
        Dataset::new(width, worlds.into_iter().map(|w| (w, 1)).collect())
    }

    /// Dataset over `width <= 64` atoms given `(world index, count)` pairs;
    /// zero counts are dropped.
    pub fn from_index_counts(width: usize, counts: &[(u64, u64)]) -> Result<Self, DatasetError> {
        Dataset::new(
            width,
            counts
                .iter()
                .filter(|(_, c)| *c > 0)
                .map(|&(i, c)| (World::from_index(width, i), c))
                .collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn entries(&self) -> &[(World, u64)] {
        &self.entries
    }

    /// `K`, the number of data.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Same multiset with duplicate worlds merged, in canonical world order.
    pub fn normalized(&self) -> Dataset {
        let dist = world_dist(self);
        Dataset {
            width: self.width,
            entries: dist.counts.into_iter().collect(),
            total: self.total,
        }
    }

    /// Same data with every count multiplied by `factor >= 1`.
    pub fn scaled(&self, factor: u64) -> Dataset {
        assert!(factor >= 1);
        Dataset {
            width: self.width,
            entries: self
                .entries
                .iter()
                .map(|(w, c)| (w.clone(), c * factor))
                .collect(),
            total: self.total * factor,
        }
    }
}

/// Distribution over worlds induced by a dataset: `p(m) = count(m) / K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldDist {
    width: usize,
    counts: BTreeMap<World, u64>,
    total: u64,
}

impl WorldDist {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, w: &World) -> u64 {
        self.counts.get(w).copied().unwrap_or(0)
    }

    pub fn prob(&self, w: &World) -> BigRational {
        BigRational::new(BigInt::from(self.count(w)), BigInt::from(self.total))
    }

    pub fn prob_f64(&self, w: &World) -> f64 {
        self.count(w) as f64 / self.total as f64
    }

    /// Possible worlds (nonzero mass) with their counts, canonical order.
    pub fn support(&self) -> impl Iterator<Item = (&World, u64)> {
        self.counts.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_possible(&self, w: &World) -> bool {
        self.counts.contains_key(w)
    }
}

/// `p(M)` marginalised over the uniform data prior.
pub fn world_dist(ds: &Dataset) -> WorldDist {
    let mut counts = BTreeMap::new();
    for (w, c) in &ds.entries {
        *counts.entry(w.clone()).or_insert(0) += c;
    }
    WorldDist {
        width: ds.width,
        counts,
        total: ds.total,
    }
}

/// Worlds of `gamma` that carry nonzero mass under `ds`.
pub fn possible_models(ds: &Dataset, gamma: &[Formula]) -> Result<WorldSet, FormulaError> {
    if ds.width > DEFAULT_ENUMERATION_CAP {
        return Err(FormulaError::UniverseTooLarge {
            atoms: ds.width,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    for f in gamma {
        f.check_width(ds.width)?;
    }
    let mut set = WorldSet::empty(ds.width);
    for (w, _) in world_dist(ds).support() {
        if gamma.iter().all(|f| f.holds_in(w)) {
            set.insert(w);
        }
    }
    Ok(set)
}

/// Parses a worlds CSV: a header of atom names plus one `count` column,
/// then one row per world with `0`/`1` per atom and a positive count.
/// Returns the (frozen) universe taken from the header and the dataset.
pub fn parse_worlds_csv(text: &str) -> Result<(AtomUniverse, Dataset), DatasetError> {
    let err = |line: usize, message: String| DatasetError::Csv { line, message };
    let mut lines = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .filter(|(_, h)| !h.is_empty())
        .ok_or_else(|| err(1, "missing header".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    let count_cols: Vec<usize> = columns
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == "count")
        .map(|(i, _)| i)
        .collect();
    let count_col = match count_cols.as_slice() {
        [c] => *c,
        [] => return Err(err(1, "header has no `count` column".into())),
        _ => return Err(err(1, "header has more than one `count` column".into())),
    };
    let mut atoms = Vec::new();
    for c in columns
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != count_col)
        .map(|(_, c)| *c)
    {
        if !is_identifier(c) {
            return Err(err(1, format!("invalid atom name `{c}`")));
        }
        atoms.push(c);
    }
    let universe = AtomUniverse::frozen(atoms.iter().copied())?;
    let width = universe.len();

    let mut entries = Vec::new();
    let mut trailing_blank = false;
    for (n, line) in lines {
        if line.is_empty() {
            trailing_blank = true;
            continue;
        }
        if trailing_blank {
            return Err(err(n, "blank line inside data".into()));
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(err(
                n,
                format!("expected {} fields, found {}", columns.len(), cells.len()),
            ));
        }
        let mut world = World::new(width);
        let mut atom = 0;
        let mut count = 0u64;
        for (i, cell) in cells.iter().enumerate() {
            if i == count_col {
                count = parse_count(cell)
                    .ok_or_else(|| err(n, format!("count `{cell}` is not a positive integer")))?;
                continue;
            }
            match *cell {
                "0" => {}
                "1" => world.set(atom, true),
                other => {
                    return Err(err(
                        n,
                        format!("value `{other}` for `{}` is not 0 or 1", atoms[atom]),
                    ))
                }
            }
            atom += 1;
        }
        entries.push((world, count));
    }
    if entries.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    Ok((universe, Dataset::new(width, entries)?))
}

fn parse_count(cell: &str) -> Option<u64> {
    if cell.is_empty() || !cell.bytes().all(|b| b.is_ascii_digit()) || cell.starts_with('0') {
        return None;
    }
    cell.parse().ok()
}

/// Writes `ds` in the format read by [`parse_worlds_csv`], `count` last.
pub fn write_worlds_csv(universe: &AtomUniverse, ds: &Dataset) -> String {
    let mut out = String::new();
    for name in universe.names() {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("count\n");
    for (w, c) in ds.entries() {
        for b in w.bits() {
            out.push_str(if b { "1," } else { "0," });
        }
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}
