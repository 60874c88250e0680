//! Label compression, keyed record batches, radix sort and the marking sweep.
//!
//! Exact values are replaced by their rank among all values of one linear
//! functional over the live points. Labels support equality only: a query
//! copies labels from existing points and never does arithmetic on them.
//! Queries are then matched against input points by sorting both kinds of
//! records together with a base-`m` LSD radix sort and sweeping equal-key
//! groups, which is what keeps the engines free of a logarithmic factor.

use crate::geometry::{LinearFunctional, PointSet};
use crate::scalar::Scalar;

/// Sentinel for an unmatched query.
pub const NO_MARK: u32 = u32::MAX;

const QUERY_FLAG: u32 = 1 << 31;

/// Sorted distinct values of one functional; label of a value is its
/// 1-based rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelTable {
    functional: usize,
    values: Vec<Scalar>,
}

impl LabelTable {
    pub fn functional(&self) -> usize {
        self.functional
    }

    /// Number of distinct values, i.e. the largest label.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn label(&self, value: &Scalar) -> Option<u32> {
        self.values.binary_search(value).ok().map(|i| i as u32 + 1)
    }
}

/// Builds the rank table of `values` (duplicates collapse to one label).
pub fn build_label_table(functional: usize, values: &[Scalar]) -> LabelTable {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    LabelTable {
        functional,
        values: sorted,
    }
}

/// Labels of a sequence of values: `labels[i]` is the rank of `values[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranks {
    pub labels: Vec<u32>,
    /// Number of distinct values.
    pub alphabet: u32,
}

/// Ranks values without materializing a table. Equivalent to looking every
/// value up in [`build_label_table`], in one sort.
pub fn rank_values(values: &[Scalar]) -> Ranks {
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| values[a as usize].cmp(&values[b as usize]));
    let mut labels = vec![0u32; values.len()];
    let mut alphabet = 0u32;
    let mut prev: Option<&Scalar> = None;
    for &i in &order {
        let v = &values[i as usize];
        if prev != Some(v) {
            alphabet += 1;
            prev = Some(v);
        }
        labels[i as usize] = alphabet;
    }
    Ranks { labels, alphabet }
}

/// Per-functional labels of every point: `column(f)[p]` is the label of
/// `catalog[f]` evaluated at point `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMatrix {
    columns: Vec<Ranks>,
}

impl LabelMatrix {
    pub fn column(&self, functional: usize) -> &[u32] {
        &self.columns[functional].labels
    }

    pub fn label(&self, point: usize, functional: usize) -> u32 {
        self.columns[functional].labels[point]
    }

    pub fn alphabet(&self, functional: usize) -> u32 {
        self.columns[functional].alphabet
    }

    /// Largest alphabet over all functionals.
    pub fn max_alphabet(&self) -> u32 {
        self.columns.iter().map(|c| c.alphabet).max().unwrap_or(0)
    }

    pub fn functionals(&self) -> usize {
        self.columns.len()
    }
}

/// Labels every point of `points` under every functional of `catalog`.
pub fn label_points(points: &PointSet, catalog: &[LinearFunctional]) -> LabelMatrix {
    label_coords(points.points().iter().map(|p| p.coords.as_slice()), catalog)
}

/// Labels arbitrary coordinate rows (used for transformed or filtered sets).
pub fn label_coords<'a>(
    rows: impl Iterator<Item = &'a [Scalar]> + Clone,
    catalog: &[LinearFunctional],
) -> LabelMatrix {
    let columns = catalog
        .iter()
        .map(|f| {
            let values: Vec<Scalar> = rows.clone().map(|x| f.eval(x)).collect();
            rank_values(&values)
        })
        .collect();
    LabelMatrix { columns }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordKind {
    Input,
    Query,
}

/// Borrowed view of one record in a [`RecordBatch`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyedRecord<'a> {
    pub kind: RecordKind,
    pub key: &'a [u32],
    /// Point id for inputs, query id for queries.
    pub payload: u32,
}

/// A batch of fixed-width keyed records, stored flat.
#[derive(Clone, Debug, Default)]
pub struct RecordBatch {
    width: usize,
    keys: Vec<u32>,
    tags: Vec<u32>,
}

impl RecordBatch {
    pub fn new(width: usize) -> Self {
        assert!(width > 0);
        RecordBatch {
            width,
            keys: Vec::new(),
            tags: Vec::new(),
        }
    }

    /// Empties the batch and switches it to `width`, keeping allocations.
    pub fn reset(&mut self, width: usize) {
        assert!(width > 0);
        self.width = width;
        self.keys.clear();
        self.tags.clear();
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn push_input(&mut self, key: &[u32], point: u32) {
        debug_assert_eq!(key.len(), self.width);
        assert!(point < QUERY_FLAG, "point id out of range");
        self.keys.extend_from_slice(key);
        self.tags.push(point);
    }

    pub fn push_query(&mut self, key: &[u32], query: u32) {
        debug_assert_eq!(key.len(), self.width);
        assert!(query < QUERY_FLAG, "query id out of range");
        self.keys.extend_from_slice(key);
        self.tags.push(query | QUERY_FLAG);
    }

    pub fn key(&self, i: usize) -> &[u32] {
        &self.keys[i * self.width..(i + 1) * self.width]
    }

    pub fn record(&self, i: usize) -> KeyedRecord<'_> {
        let tag = self.tags[i];
        KeyedRecord {
            kind: if tag & QUERY_FLAG != 0 {
                RecordKind::Query
            } else {
                RecordKind::Input
            },
            key: self.key(i),
            payload: tag & !QUERY_FLAG,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = KeyedRecord<'_>> + '_ {
        (0..self.len()).map(|i| self.record(i))
    }
}

/// Reusable buffers for [`radix_sort`].
#[derive(Clone, Debug, Default)]
pub struct RadixScratch {
    counts: Vec<usize>,
    keys: Vec<u32>,
    tags: Vec<u32>,
}

/// Stable lexicographic sort by key: one counting pass per key component,
/// least significant first, `O(width * (len + alphabet))`.
///
/// Every key component must lie in `1..=alphabet`.
pub fn radix_sort(batch: &mut RecordBatch, alphabet: u32, scratch: &mut RadixScratch) {
    let n = batch.len();
    let w = batch.width;
    if n < 2 {
        for &k in &batch.keys {
            assert!(k >= 1 && k <= alphabet, "key component {k} outside 1..={alphabet}");
        }
        return;
    }
    let m = alphabet as usize;
    scratch.keys.resize(batch.keys.len(), 0);
    scratch.tags.resize(n, 0);
    for c in (0..w).rev() {
        let counts = &mut scratch.counts;
        counts.clear();
        counts.resize(m + 2, 0);
        for i in 0..n {
            let k = batch.keys[i * w + c] as usize;
            assert!(k >= 1 && k <= m, "key component {k} outside 1..={m}");
            counts[k + 1] += 1;
        }
        if counts[batch.keys[c] as usize + 1] == n {
            // every record shares this component
            continue;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let (src_keys, src_tags) = (&batch.keys, &batch.tags);
        let (dst_keys, dst_tags) = (&mut scratch.keys, &mut scratch.tags);
        if w == 2 {
            for i in 0..n {
                let k = src_keys[i * 2 + c] as usize;
                let pos = counts[k];
                counts[k] += 1;
                dst_keys[pos * 2] = src_keys[i * 2];
                dst_keys[pos * 2 + 1] = src_keys[i * 2 + 1];
                dst_tags[pos] = src_tags[i];
            }
        } else {
            for i in 0..n {
                let k = src_keys[i * w + c] as usize;
                let pos = counts[k];
                counts[k] += 1;
                dst_keys[pos * w..(pos + 1) * w].copy_from_slice(&src_keys[i * w..(i + 1) * w]);
                dst_tags[pos] = src_tags[i];
            }
        }
        std::mem::swap(&mut batch.keys, &mut scratch.keys);
        std::mem::swap(&mut batch.tags, &mut scratch.tags);
    }
}

/// Walks equal-key groups of a sorted batch and, for each group holding an
/// input record, writes that input's point id into `marks[query]` for every
/// query of the group. Queries in groups without an input are set to
/// [`NO_MARK`]. Returns the number of marked queries.
///
/// Panics if two input records share a key.
pub fn mark_queries(batch: &RecordBatch, marks: &mut [u32]) -> usize {
    let n = batch.len();
    let mut marked = 0;
    let mut start = 0;
    while start < n {
        let key = batch.key(start);
        let mut end = start + 1;
        while end < n && batch.key(end) == key {
            end += 1;
        }
        let mut input = NO_MARK;
        for &tag in &batch.tags[start..end] {
            if tag & QUERY_FLAG == 0 {
                assert!(input == NO_MARK, "two input records share key {key:?}");
                input = tag;
            }
        }
        for &tag in &batch.tags[start..end] {
            if tag & QUERY_FLAG != 0 {
                marks[(tag & !QUERY_FLAG) as usize] = input;
                marked += usize::from(input != NO_MARK);
            }
        }
        start = end;
    }
    marked
}

/// Record-level form of the sweep: entry `i` is the mark of the `i`-th
/// record of the sorted batch (always `None` for input records).
pub fn mark_and_match(batch: &RecordBatch) -> Vec<Option<u32>> {
    let queries = batch.iter().filter(|r| r.kind == RecordKind::Query).count();
    let max_query = batch
        .iter()
        .filter(|r| r.kind == RecordKind::Query)
        .map(|r| r.payload as usize + 1)
        .max()
        .unwrap_or(0);
    let mut marks = vec![NO_MARK; max_query.max(queries)];
    mark_queries(batch, &mut marks);
    batch
        .iter()
        .map(|r| match r.kind {
            RecordKind::Query if marks[r.payload as usize] != NO_MARK => Some(marks[r.payload as usize]),
            _ => None,
        })
        .collect()
}
