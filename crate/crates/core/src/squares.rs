//! Axis-parallel squares in the plane.
//!
//! [`enumerate_squares`] runs in `O(n sqrt n)` time and `O(n)` space:
//!
//! 1. Label `x`, `y`, `x+y` and `y-x` by rank.
//! 2. Group points into columns; a column is short when it holds at most
//!    `T = floor(sqrt n)` points.
//! 3. For every pair `p1 = (x, y1)`, `p2 = (x, y2)` with `y1 < y2` on a short
//!    column, emit four label-keyed queries: the right complement
//!    `(y1, [x+y] of p2)` and `(y2, [y-x] of p1)`, and the left complement
//!    `(y1, [y-x] of p2)` and `(y2, [x+y] of p1)`. These are exact because
//!    `x' + y1 = x + y2` and `x' - y2 = x - y1` for `x' = x + (y2 - y1)`.
//! 4. Pairs are handled `n` at a time; each batch's queries are radix-sorted
//!    together with all input points and matched by one sweep.
//! 5. A right complement is always reported. A left complement is reported
//!    only when the matched column is long, since a short one reports the
//!    same square from its own right complement.
//! 6. Points on short columns are deleted, coordinates are swapped, and the
//!    survivors (rows of at most `T` points) are processed the same way with
//!    right complements only.

use std::collections::BTreeMap;

use crate::batch::{ranges, run_batches};
use crate::error::{Error, Result};
use crate::geometry::{Pattern, PointSet};
use crate::label::{mark_queries, radix_sort, rank_values, RadixScratch, RecordBatch, NO_MARK};
use crate::lines::{LinePartition, PairSchedule};
use crate::report::{integer_root, EngineOptions, EngineStats, Occurrence, Reporter};
use crate::scalar::Scalar;

fn require_planar(points: &PointSet) -> Result<()> {
    if points.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: points.dim(),
            reason: "squares need planar input",
        });
    }
    Ok(())
}

/// Reports every axis-parallel square with vertices in `points`, exactly
/// once, as a copy of the unit square `(0,0), (1,0), (0,1), (1,1)`.
pub fn enumerate_squares(points: &PointSet, reporter: &mut dyn Reporter) -> Result<EngineStats> {
    enumerate_squares_with(points, &EngineOptions::default(), reporter)
}

pub fn enumerate_squares_with(
    points: &PointSet,
    options: &EngineOptions,
    reporter: &mut dyn Reporter,
) -> Result<EngineStats> {
    require_planar(points)?;
    let n = points.len();
    let threshold = options.threshold.unwrap_or_else(|| integer_root(n, 2));
    let mut stats = EngineStats::new(n, threshold);
    if n < 4 {
        return Ok(stats);
    }
    let pattern = Pattern::unit_cube(2);
    let all: Vec<u32> = (0..n as u32).collect();
    let mut sink = Sink {
        points,
        pattern: &pattern,
        options,
        stats: &mut stats,
        reporter,
    };
    let survivors = run_phase(&mut sink, &all, Phase::Columns, threshold);
    if survivors.len() >= 4 {
        run_phase(&mut sink, &survivors, Phase::Rows, threshold);
    }
    Ok(stats)
}

struct Sink<'a, 'r> {
    points: &'a PointSet,
    pattern: &'a Pattern,
    options: &'a EngineOptions,
    stats: &'a mut EngineStats,
    reporter: &'r mut dyn Reporter,
}

impl Sink<'_, '_> {
    fn emit(&mut self, ids: &[u32], round: usize) {
        let occ = Occurrence::new(self.points, self.pattern, ids, round);
        if self.options.check_exact {
            assert!(occ.is_exact(), "inexact square report {:?}", occ.vertex_indices());
        }
        self.stats.note_report(round);
        self.reporter.report(&occ);
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Original coordinates, short columns only, both complements.
    Columns,
    /// Swapped coordinates, every line, right complements only.
    Rows,
}

impl Phase {
    fn round(self) -> usize {
        match self {
            Phase::Columns => 0,
            Phase::Rows => 1,
        }
    }
}

struct PhaseState {
    live: Vec<u32>,
    y: Vec<u32>,
    sum: Vec<u32>,
    diff: Vec<u32>,
    sum_alphabet: u32,
    diff_alphabet: u32,
    part: LinePartition,
    short: Vec<bool>,
    phase: Phase,
    schedule: PairSchedule,
}

#[derive(Default)]
struct Scratch {
    batch: RecordBatch,
    radix: RadixScratch,
    marks: Vec<u32>,
    pairs: Vec<(u32, u32)>,
}

struct BatchOut {
    found: Vec<u32>,
    pairs: usize,
    queries: usize,
    live: usize,
}

/// Runs one phase over `live` and returns the points on long lines.
fn run_phase(sink: &mut Sink<'_, '_>, live: &[u32], phase: Phase, threshold: usize) -> Vec<u32> {
    let (ax, ay) = match phase {
        Phase::Columns => (0, 1),
        Phase::Rows => (1, 0),
    };
    let coords = |p: u32, a: usize| &sink.points.coords(p as usize)[a];
    let xs: Vec<Scalar> = live.iter().map(|&p| coords(p, ax).clone()).collect();
    let ys: Vec<Scalar> = live.iter().map(|&p| coords(p, ay).clone()).collect();
    let sums: Vec<Scalar> = xs.iter().zip(&ys).map(|(x, y)| x + y).collect();
    let diffs: Vec<Scalar> = xs.iter().zip(&ys).map(|(x, y)| y - x).collect();
    let (x_rank, y_rank) = (rank_values(&xs), rank_values(&ys));
    let (sum_rank, diff_rank) = (rank_values(&sums), rank_values(&diffs));
    drop((xs, ys, sums, diffs));

    let nl = live.len();
    let part = LinePartition::build(nl, &[&x_rank.labels], &y_rank.labels);
    let short: Vec<bool> = (0..part.lines())
        .map(|l| phase == Phase::Rows || part.size(l) <= threshold)
        .collect();
    if phase == Phase::Rows && sink.options.threshold.is_none() {
        debug_assert!((0..part.lines()).all(|l| part.size(l) <= threshold));
    }
    let work: u64 = (0..part.lines())
        .filter(|&l| short[l])
        .map(|l| (part.size(l) as u64).pow(2))
        .sum();
    sink.stats.note_line_work(phase.round(), work);

    let schedule = PairSchedule::new(&part, |l| short[l], 1);
    let state = PhaseState {
        live: live.to_vec(),
        sum_alphabet: y_rank.alphabet.max(sum_rank.alphabet),
        diff_alphabet: y_rank.alphabet.max(diff_rank.alphabet),
        y: y_rank.labels,
        sum: sum_rank.labels,
        diff: diff_rank.labels,
        part,
        short,
        phase,
        schedule,
    };

    let round = phase.round();
    run_batches(
        sink.options.threads,
        ranges(state.schedule.total(), nl as u64),
        Scratch::default,
        |scratch, (a, b)| process_batch(&state, scratch, a, b),
        |out| {
            sink.stats.note_batch(out.pairs, out.queries, out.live);
            for ids in out.found.chunks_exact(4) {
                sink.emit(ids, round);
            }
        },
    );

    (0..nl)
        .filter(|&p| !state.short[state.part.line_of(p)])
        .map(|p| state.live[p])
        .collect()
}

fn process_batch(st: &PhaseState, sc: &mut Scratch, a: u64, b: u64) -> BatchOut {
    let part = &st.part;
    sc.pairs.clear();
    st.schedule.visit(part, a, b, |line, i, _, j| {
        let members = part.line(line);
        sc.pairs.push((members[i], members[j]));
    });
    let np = sc.pairs.len();
    let nl = st.live.len();
    let left = st.phase == Phase::Columns;
    sc.marks.clear();
    sc.marks.resize(4 * np, NO_MARK);

    // B1: keys (y, x+y)
    sc.batch.reset(2);
    for (q, &(p1, p2)) in sc.pairs.iter().enumerate() {
        let (p1, p2) = (p1 as usize, p2 as usize);
        sc.batch.push_query(&[st.y[p1], st.sum[p2]], 4 * q as u32);
        if left {
            sc.batch.push_query(&[st.y[p2], st.sum[p1]], 4 * q as u32 + 3);
        }
    }
    for p in 0..nl {
        sc.batch.push_input(&[st.y[p], st.sum[p]], p as u32);
    }
    radix_sort(&mut sc.batch, st.sum_alphabet, &mut sc.radix);
    mark_queries(&sc.batch, &mut sc.marks);

    // B2: keys (y, y-x)
    sc.batch.reset(2);
    for (q, &(p1, p2)) in sc.pairs.iter().enumerate() {
        let (p1, p2) = (p1 as usize, p2 as usize);
        sc.batch.push_query(&[st.y[p2], st.diff[p1]], 4 * q as u32 + 1);
        if left {
            sc.batch.push_query(&[st.y[p1], st.diff[p2]], 4 * q as u32 + 2);
        }
    }
    for p in 0..nl {
        sc.batch.push_input(&[st.y[p], st.diff[p]], p as u32);
    }
    radix_sort(&mut sc.batch, st.diff_alphabet, &mut sc.radix);
    mark_queries(&sc.batch, &mut sc.marks);

    let g = |p: u32| st.live[p as usize];
    let mut found = Vec::new();
    for (q, &(p1, p2)) in sc.pairs.iter().enumerate() {
        let m = &sc.marks[4 * q..4 * q + 4];
        if m[0] != NO_MARK && m[1] != NO_MARK {
            // corners in order lower-left, lower-right, upper-left, upper-right
            match st.phase {
                Phase::Columns => found.extend([g(p1), g(m[0]), g(p2), g(m[1])]),
                Phase::Rows => found.extend([g(p1), g(p2), g(m[0]), g(m[1])]),
            }
        }
        if left && m[2] != NO_MARK && m[3] != NO_MARK && !st.short[part.line_of(m[2] as usize)] {
            found.extend([g(m[2]), g(p1), g(m[3]), g(p2)]);
        }
    }
    let queries = if left { 4 * np } else { 2 * np };
    BatchOut {
        found,
        pairs: np,
        queries,
        live: queries + nl,
    }
}

/// The classic tree-based listing: same two phases, but complements are
/// looked up in an ordered map with exact coordinates, costing an extra
/// logarithmic factor. Kept as a benchmark comparator.
pub fn baseline_squares(points: &PointSet, reporter: &mut dyn Reporter) -> Result<EngineStats> {
    baseline_squares_with(points, &EngineOptions::default(), reporter)
}

pub fn baseline_squares_with(
    points: &PointSet,
    options: &EngineOptions,
    reporter: &mut dyn Reporter,
) -> Result<EngineStats> {
    require_planar(points)?;
    let n = points.len();
    let threshold = options.threshold.unwrap_or_else(|| integer_root(n, 2));
    let mut stats = EngineStats::new(n, threshold);
    if n < 4 {
        return Ok(stats);
    }
    let pattern = Pattern::unit_cube(2);
    let mut sink = Sink {
        points,
        pattern: &pattern,
        options,
        stats: &mut stats,
        reporter,
    };
    let all: Vec<u32> = (0..n as u32).collect();
    let survivors = baseline_phase(&mut sink, &all, Phase::Columns, threshold);
    if survivors.len() >= 4 {
        baseline_phase(&mut sink, &survivors, Phase::Rows, threshold);
    }
    Ok(stats)
}

fn baseline_phase(sink: &mut Sink<'_, '_>, live: &[u32], phase: Phase, threshold: usize) -> Vec<u32> {
    let (ax, ay) = match phase {
        Phase::Columns => (0, 1),
        Phase::Rows => (1, 0),
    };
    let points = sink.points;
    let key = |p: u32| {
        let c = points.coords(p as usize);
        (c[ax].clone(), c[ay].clone())
    };
    let tree: BTreeMap<(Scalar, Scalar), u32> = live.iter().map(|&p| (key(p), p)).collect();
    // Columns are contiguous runs of the tree's in-order traversal.
    let mut columns: Vec<Vec<u32>> = Vec::new();
    let mut column_size: BTreeMap<Scalar, usize> = BTreeMap::new();
    let mut prev: Option<&Scalar> = None;
    for ((x, _), &p) in &tree {
        if prev != Some(x) {
            columns.push(Vec::new());
            prev = Some(x);
        }
        columns.last_mut().unwrap().push(p);
    }
    for col in &columns {
        column_size.insert(key(col[0]).0, col.len());
    }
    let round = phase.round();
    let mut work = 0u64;
    let mut found: Vec<[u32; 4]> = Vec::new();
    for col in &columns {
        if phase == Phase::Columns && col.len() > threshold {
            continue;
        }
        work += (col.len() as u64).pow(2);
        for i in 0..col.len() {
            let (x, y1) = key(col[i]);
            for &p2 in &col[i + 1..] {
                let y2 = key(p2).1;
                let delta = &y2 - &y1;
                let right = &x + &delta;
                if let (Some(&a), Some(&b)) = (
                    tree.get(&(right.clone(), y1.clone())),
                    tree.get(&(right, y2.clone())),
                ) {
                    found.push(match phase {
                        Phase::Columns => [col[i], a, p2, b],
                        Phase::Rows => [col[i], p2, a, b],
                    });
                }
                if phase == Phase::Columns {
                    let left = &x - &delta;
                    if column_size.get(&left).is_some_and(|&s| s > threshold) {
                        if let (Some(&a), Some(&b)) = (
                            tree.get(&(left.clone(), y1.clone())),
                            tree.get(&(left, y2)),
                        ) {
                            found.push([a, col[i], b, p2]);
                        }
                    }
                }
            }
        }
        for ids in found.drain(..) {
            sink.emit(&ids, round);
        }
    }
    sink.stats.note_line_work(round, work);
    columns
        .iter()
        .filter(|c| c.len() > threshold)
        .flatten()
        .copied()
        .collect()
}
