//! Streaming report contract shared by every engine.

use crate::geometry::{Pattern, PointSet};
use crate::linalg;
use crate::scalar::Scalar;

/// One discovered copy, fully materialized.
///
/// `vertices[j]` is the input index of the image of pattern vertex `j`; the
/// image satisfies `point = scale * q_j + translation` exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CopyReport {
    pub vertices: Vec<usize>,
    pub scale: Scalar,
    pub translation: Vec<Scalar>,
}

/// A copy as seen by a [`Reporter`]: cheap to construct, materialized on
/// demand so count-only consumers never touch the exact arithmetic.
#[derive(Clone, Copy)]
pub struct Occurrence<'a> {
    points: &'a PointSet,
    pattern: &'a Pattern,
    ids: &'a [u32],
    round: usize,
}

impl<'a> Occurrence<'a> {
    pub(crate) fn new(points: &'a PointSet, pattern: &'a Pattern, ids: &'a [u32], round: usize) -> Self {
        debug_assert_eq!(ids.len(), pattern.len());
        Occurrence {
            points,
            pattern,
            ids,
            round,
        }
    }

    /// Dense point ids (positions in the deduplicated set), in pattern order.
    pub fn ids(&self) -> &'a [u32] {
        self.ids
    }

    /// Input indices of the vertex images, in pattern order.
    pub fn vertex_indices(&self) -> Vec<usize> {
        self.ids.iter().map(|&id| self.points.input_index(id as usize)).collect()
    }

    /// Round (or phase) of the engine that found this copy, starting at 0.
    /// The safe-mode residual recursion and fallback continue the numbering.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn pattern(&self) -> &'a Pattern {
        self.pattern
    }

    pub fn coords(&self, j: usize) -> &'a [Scalar] {
        self.points.coords(self.ids[j] as usize)
    }

    pub fn scale(&self) -> Scalar {
        let q0 = self.pattern.vertex(0);
        let q1 = self.pattern.vertex(1);
        let axis = (0..q0.len()).find(|&i| q0[i] != q1[i]).expect("distinct pattern vertices");
        let image = &self.coords(1)[axis] - &self.coords(0)[axis];
        &image / &(&q1[axis] - &q0[axis])
    }

    pub fn translation(&self) -> Vec<Scalar> {
        let s = self.scale();
        linalg::sub(self.coords(0), &linalg::scale(self.pattern.vertex(0), &s))
    }

    pub fn to_report(&self) -> CopyReport {
        let scale = self.scale();
        let translation = linalg::sub(self.coords(0), &linalg::scale(self.pattern.vertex(0), &scale));
        CopyReport {
            vertices: self.vertex_indices(),
            scale,
            translation,
        }
    }

    /// Exact recheck that every reported point is `scale * q_j + translation`.
    pub fn is_exact(&self) -> bool {
        let s = self.scale();
        if s.is_zero() {
            return false;
        }
        let t = linalg::sub(self.coords(0), &linalg::scale(self.pattern.vertex(0), &s));
        (0..self.pattern.len()).all(|j| {
            linalg::add(&linalg::scale(self.pattern.vertex(j), &s), &t) == self.coords(j)
        })
    }
}

/// Receives copies as they are found. Output is streamed, never buffered in
/// full by the engines.
pub trait Reporter {
    fn report(&mut self, occurrence: &Occurrence<'_>);
}

impl<F: FnMut(&Occurrence<'_>)> Reporter for F {
    fn report(&mut self, occurrence: &Occurrence<'_>) {
        self(occurrence)
    }
}

/// Counts reports and discards them.
#[derive(Clone, Copy, Debug, Default)]
pub struct CountingReporter {
    pub count: u64,
}

impl Reporter for CountingReporter {
    fn report(&mut self, _: &Occurrence<'_>) {
        self.count += 1;
    }
}

/// Tuning knobs common to all engines.
#[derive(Clone, Debug)]
pub struct EngineOptions {
    /// Replaces the short-line threshold `floor(n^(1/d))`. Testing only.
    pub threshold: Option<usize>,
    /// Worker threads for batch processing; 0 runs sequentially.
    pub threads: usize,
    /// Recheck every report with exact arithmetic before emitting it.
    pub check_exact: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            threshold: None,
            threads: 0,
            check_exact: cfg!(debug_assertions),
        }
    }
}

/// Work and space counters collected during one enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EngineStats {
    /// Points in the input set.
    pub n: usize,
    pub threshold: usize,
    pub reported: u64,
    /// Reports per round (phase), in round order.
    pub per_round: Vec<u64>,
    pub batches: u64,
    /// Anchor pairs (or pair-role assignments) processed.
    pub pairs: u64,
    pub queries: u64,
    /// Largest number of records alive at once in one batch: all queries of
    /// the batch plus the input records of the array being matched.
    pub peak_live_records: usize,
    /// Sum of squared lengths of the short lines processed, per round.
    pub short_line_work: Vec<u64>,
    /// Residual recursion depth reached (safe mode only).
    pub residual_levels: usize,
    /// Points handed to the exhaustive fallback (safe mode only).
    pub fallback_points: usize,
}

impl EngineStats {
    pub(crate) fn new(n: usize, threshold: usize) -> Self {
        EngineStats {
            n,
            threshold,
            ..Default::default()
        }
    }

    pub(crate) fn note_batch(&mut self, pairs: usize, queries: usize, live: usize) {
        self.batches += 1;
        self.pairs += pairs as u64;
        self.queries += queries as u64;
        self.peak_live_records = self.peak_live_records.max(live);
    }

    pub(crate) fn note_report(&mut self, round: usize) {
        self.reported += 1;
        if self.per_round.len() <= round {
            self.per_round.resize(round + 1, 0);
        }
        self.per_round[round] += 1;
    }

    pub(crate) fn note_line_work(&mut self, round: usize, work: u64) {
        if self.short_line_work.len() <= round {
            self.short_line_work.resize(round + 1, 0);
        }
        self.short_line_work[round] += work;
    }
}

/// Largest `t` with `t^d <= n`.
pub fn integer_root(n: usize, d: usize) -> usize {
    assert!(d >= 1);
    if d == 1 || n < 2 {
        return n;
    }
    let fits = |t: usize| {
        let mut acc: usize = 1;
        for _ in 0..d {
            match acc.checked_mul(t) {
                Some(v) if v <= n => acc = v,
                _ => return false,
            }
        }
        true
    };
    let mut t = (n as f64).powf(1.0 / d as f64) as usize;
    while t > 0 && !fits(t) {
        t -= 1;
    }
    while fits(t + 1) {
        t += 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_roots() {
        assert_eq!(integer_root(0, 2), 0);
        assert_eq!(integer_root(1, 2), 1);
        assert_eq!(integer_root(8, 2), 2);
        assert_eq!(integer_root(9, 2), 3);
        assert_eq!(integer_root(63, 3), 3);
        assert_eq!(integer_root(64, 3), 4);
        assert_eq!(integer_root(80, 4), 2);
        assert_eq!(integer_root(81, 4), 3);
        assert_eq!(integer_root(250_000, 2), 500);
        for n in 0..2000usize {
            for d in 1..5 {
                let t = integer_root(n, d);
                assert!(t.pow(d as u32) <= n);
                assert!((t + 1).pow(d as u32) > n);
            }
        }
    }

    #[test]
    fn occurrence_scale_and_shift() {
        let points = PointSet::from_ints(&[[2, 3], [6, 3], [2, 7], [6, 7]]).unwrap();
        let square = Pattern::unit_cube(2);
        let ids = [0u32, 1, 2, 3];
        let occ = Occurrence::new(&points, &square, &ids, 0);
        assert_eq!(occ.scale(), Scalar::from_int(4));
        assert_eq!(occ.translation(), vec![Scalar::from_int(2), Scalar::from_int(3)]);
        assert!(occ.is_exact());
        let bad = [0u32, 1, 3, 2];
        assert!(!Occurrence::new(&points, &square, &bad, 0).is_exact());
    }
}
