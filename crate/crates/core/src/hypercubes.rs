//! Axis-parallel full-dimensional hypercubes in `R^d`, `O(n^(1+1/d))`.
//!
//! The engine runs `d` rounds. In each round one axis is active: points are
//! grouped into lines that agree on every other coordinate, and a line is
//! short when it holds at most `T = floor(n^(1/d))` points. Every pair
//! `t, r` on a short line (with `delta = r_act - t_act > 0`) spans
//! `2^(d-1)` candidate cubes, one per orientation `e in {-1,+1}^(d-1)`.
//! Each candidate has `2^d - 2` unknown vertices, keyed purely by labels
//! copied from `t` and `r`: a displaced coordinate `b_i + e_i * delta` is
//! pinned by `x_i + x_act` or `x_i - x_act`, whose value equals that of
//! `t` or `r`, e.g. `(b_i + delta) + t_act = b_i + r_act`.
//!
//! Queries sharing the same per-axis table choice form one array together
//! with all input points; arrays are radix-sorted and swept. A cube is
//! reported from the short line of its active-axis edges with the smallest
//! canonical index. After the round the points on short lines are deleted;
//! the final round processes every line, which are all short by pigeonhole.

use crate::batch::{ranges, run_batches};
use crate::error::{Error, Result};
use crate::geometry::{Pattern, PointSet, D_MAX};
use crate::label::{mark_queries, radix_sort, rank_values, RadixScratch, RecordBatch, NO_MARK};
use crate::lines::{LinePartition, PairSchedule};
use crate::report::{integer_root, EngineOptions, EngineStats, Occurrence, Reporter};
use crate::scalar::Scalar;

/// Per-axis key component of a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Table {
    Coord = 0,
    Sum = 1,
    Diff = 2,
}

/// One unknown vertex of a candidate: orientation bits (bit `i` set means
/// `e_i = -1`), displaced subset `S` (nonempty) and whether the active
/// coordinate is taken from `r` instead of `t`.
#[derive(Clone, Copy, Debug)]
struct Combo {
    orientation: usize,
    subset: usize,
    upper: bool,
}

impl Combo {
    fn table(&self, i: usize) -> Table {
        if self.subset >> i & 1 == 0 {
            return Table::Coord;
        }
        let plus = self.orientation >> i & 1 == 0;
        match (plus, self.upper) {
            (true, false) | (false, true) => Table::Sum,
            (true, true) | (false, false) => Table::Diff,
        }
    }

    /// Endpoint whose label is copied for transverse axis `i`: `true` = r.
    fn source_is_r(&self, i: usize) -> bool {
        self.subset >> i & 1 == 1 && !self.upper
    }
}

/// Query layout shared by all rounds of one enumeration.
struct Layout {
    /// transverse axis count, `d - 1`
    t: usize,
    /// queries per (pair, orientation): `2 (2^(d-1) - 1)`
    per_orientation: usize,
    /// queries per pair: `2^(d-1) * per_orientation`
    per_pair: usize,
    /// for each schema (base-3 code over transverse axes), its combos with
    /// their query slot within the pair
    schemas: Vec<Schema>,
}

type Schema = (Vec<Table>, Vec<(Combo, usize)>);

impl Layout {
    fn new(d: usize) -> Self {
        let t = d - 1;
        let per_orientation = 2 * ((1 << t) - 1);
        let per_pair = (1 << t) * per_orientation;
        let n_codes = 3usize.pow(t as u32);
        let mut schemas: Vec<Schema> = (0..n_codes)
            .map(|code| {
                let tables = (0..t)
                    .map(|i| match code / 3usize.pow(i as u32) % 3 {
                        0 => Table::Coord,
                        1 => Table::Sum,
                        _ => Table::Diff,
                    })
                    .collect();
                (tables, Vec::new())
            })
            .collect();
        for orientation in 0..1usize << t {
            for subset in 1..1usize << t {
                for upper in [false, true] {
                    let combo = Combo {
                        orientation,
                        subset,
                        upper,
                    };
                    let code: usize = (0..t).map(|i| combo.table(i) as usize * 3usize.pow(i as u32)).sum();
                    schemas[code].1.push((combo, Self::slot(per_orientation, combo)));
                }
            }
        }
        schemas.retain(|(_, combos)| !combos.is_empty());
        Layout {
            t,
            per_orientation,
            per_pair,
            schemas,
        }
    }

    fn slot(per_orientation: usize, c: Combo) -> usize {
        c.orientation * per_orientation + (c.subset - 1) * 2 + usize::from(c.upper)
    }
}

struct RoundState<'a> {
    layout: &'a Layout,
    live: Vec<u32>,
    /// original axis of transverse slot `i`, and of the active axis
    axes: Vec<usize>,
    active: usize,
    coord: Vec<Vec<u32>>,
    sum: Vec<Vec<u32>>,
    diff: Vec<Vec<u32>>,
    act: Vec<u32>,
    alphabet: u32,
    part: LinePartition,
    processed: Vec<bool>,
    schedule: PairSchedule,
}

impl RoundState<'_> {
    fn label(&self, table: Table, i: usize, p: usize) -> u32 {
        match table {
            Table::Coord => self.coord[i][p],
            Table::Sum => self.sum[i][p],
            Table::Diff => self.diff[i][p],
        }
    }
}

#[derive(Default)]
struct Scratch {
    batch: RecordBatch,
    radix: RadixScratch,
    marks: Vec<u32>,
    pairs: Vec<(u32, u32, u32)>,
    key: Vec<u32>,
}

struct BatchOut {
    found: Vec<u32>,
    pairs: usize,
    queries: usize,
    live: usize,
}

/// Reports every axis-parallel hypercube spanned by `points` exactly once,
/// as a copy of the unit cube with vertices in corner order.
pub fn enumerate_hypercubes(points: &PointSet, reporter: &mut dyn Reporter) -> Result<EngineStats> {
    enumerate_hypercubes_with(points, &EngineOptions::default(), reporter)
}

pub fn enumerate_hypercubes_with(
    points: &PointSet,
    options: &EngineOptions,
    reporter: &mut dyn Reporter,
) -> Result<EngineStats> {
    let d = points.dim();
    if !(2..=D_MAX).contains(&d) {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "hypercubes need 2 <= d <= 6",
        });
    }
    let n = points.len();
    let threshold = options.threshold.unwrap_or_else(|| integer_root(n, d));
    let mut stats = EngineStats::new(n, threshold);
    let pattern = Pattern::unit_cube(d);
    if n < pattern.len() {
        return Ok(stats);
    }
    let layout = Layout::new(d);
    let mut live: Vec<u32> = (0..n as u32).collect();
    for round in 0..d {
        if live.len() < pattern.len() {
            break;
        }
        let last = round + 1 == d;
        let state = build_round(points, &layout, live, d - 1 - round, threshold, last, &mut stats, round);
        let batch_pairs = (state.live.len() >> (d - 2)).max(1) as u64;
        run_batches(
            options.threads,
            ranges(state.schedule.total(), batch_pairs),
            Scratch::default,
            |scratch, (a, b)| process_batch(&state, scratch, a, b),
            |out| {
                stats.note_batch(out.pairs, out.queries, out.live);
                for ids in out.found.chunks_exact(pattern.len()) {
                    let occ = Occurrence::new(points, &pattern, ids, round);
                    if options.check_exact {
                        assert!(occ.is_exact(), "inexact cube report {:?}", occ.vertex_indices());
                    }
                    stats.note_report(round);
                    reporter.report(&occ);
                }
            },
        );
        live = (0..state.live.len())
            .filter(|&p| !state.processed[state.part.line_of(p)])
            .map(|p| state.live[p])
            .collect();
    }
    Ok(stats)
}

#[allow(clippy::too_many_arguments)]
fn build_round<'a>(
    points: &PointSet,
    layout: &'a Layout,
    live: Vec<u32>,
    active: usize,
    threshold: usize,
    last: bool,
    stats: &mut EngineStats,
    round: usize,
) -> RoundState<'a> {
    let d = points.dim();
    let axes: Vec<usize> = (0..d).filter(|&a| a != active).collect();
    let value = |p: u32, a: usize| &points.coords(p as usize)[a];
    let column = |f: &dyn Fn(u32) -> Scalar| rank_values(&live.iter().map(|&p| f(p)).collect::<Vec<_>>());

    let act = column(&|p| value(p, active).clone());
    let mut alphabet = act.alphabet;
    let (mut coord, mut sum, mut diff) = (Vec::new(), Vec::new(), Vec::new());
    for &a in &axes {
        let c = column(&|p| value(p, a).clone());
        let s = column(&|p| value(p, a) + value(p, active));
        let df = column(&|p| value(p, a) - value(p, active));
        alphabet = alphabet.max(c.alphabet).max(s.alphabet).max(df.alphabet);
        coord.push(c.labels);
        sum.push(s.labels);
        diff.push(df.labels);
    }
    let transverse: Vec<&[u32]> = coord.iter().map(Vec::as_slice).collect();
    let part = LinePartition::build(live.len(), &transverse, &act.labels);
    let processed: Vec<bool> = (0..part.lines())
        .map(|l| last || part.size(l) <= threshold)
        .collect();
    let work: u64 = (0..part.lines())
        .filter(|&l| processed[l])
        .map(|l| (part.size(l) as u64).pow(2))
        .sum();
    stats.note_line_work(round, work);
    let schedule = PairSchedule::new(&part, |l| processed[l], 1);
    RoundState {
        layout,
        live,
        axes,
        active,
        coord,
        sum,
        diff,
        act: act.labels,
        alphabet,
        part,
        processed,
        schedule,
    }
}

fn process_batch(st: &RoundState<'_>, sc: &mut Scratch, a: u64, b: u64) -> BatchOut {
    let layout = st.layout;
    let t = layout.t;
    let part = &st.part;
    sc.pairs.clear();
    st.schedule.visit(part, a, b, |line, i, _, j| {
        let members = part.line(line);
        sc.pairs.push((members[i], members[j], line as u32));
    });
    let np = sc.pairs.len();
    let nl = st.live.len();
    sc.marks.clear();
    sc.marks.resize(np * layout.per_pair, NO_MARK);
    sc.key.resize(t + 1, 0);

    for (tables, combos) in &layout.schemas {
        sc.batch.reset(t + 1);
        for (q, &(tp, rp, _)) in sc.pairs.iter().enumerate() {
            let (tp, rp) = (tp as usize, rp as usize);
            for &(combo, slot) in combos {
                for (i, &table) in tables.iter().enumerate() {
                    let src = if combo.source_is_r(i) { rp } else { tp };
                    sc.key[i] = st.label(table, i, src);
                }
                sc.key[t] = st.act[if combo.upper { rp } else { tp }];
                sc.batch.push_query(&sc.key, (q * layout.per_pair + slot) as u32);
            }
        }
        for p in 0..nl {
            for (i, &table) in tables.iter().enumerate() {
                sc.key[i] = st.label(table, i, p);
            }
            sc.key[t] = st.act[p];
            sc.batch.push_input(&sc.key, p as u32);
        }
        radix_sort(&mut sc.batch, st.alphabet, &mut sc.radix);
        mark_queries(&sc.batch, &mut sc.marks);
    }

    let d = t + 1;
    let mut found = Vec::new();
    let mut cube = vec![0u32; 1 << d];
    for (q, &(tp, rp, line)) in sc.pairs.iter().enumerate() {
        'orientation: for orientation in 0..1usize << t {
            let base = q * layout.per_pair + orientation * layout.per_orientation;
            let marks = &sc.marks[base..base + layout.per_orientation];
            if marks.contains(&NO_MARK) {
                continue;
            }
            // Each active-axis edge of the cube is labelled by its subset S;
            // S = 0 is (t, r). Report only from the smallest processed line.
            for subset in 1..1usize << t {
                let other = part.line_of(marks[(subset - 1) * 2] as usize);
                if st.processed[other] && (other as u32) < line {
                    continue 'orientation;
                }
            }
            for subset in 0..1usize << t {
                for upper in [false, true] {
                    let local = if subset == 0 {
                        if upper { rp } else { tp }
                    } else {
                        marks[(subset - 1) * 2 + usize::from(upper)]
                    };
                    let mut corner = usize::from(upper) << st.active;
                    for i in 0..t {
                        let displaced = subset >> i & 1 == 1;
                        let plus = orientation >> i & 1 == 0;
                        if displaced == plus {
                            corner |= 1 << st.axes[i];
                        }
                    }
                    cube[corner] = st.live[local as usize];
                }
            }
            found.extend_from_slice(&cube);
        }
    }
    let queries = np * layout.per_pair;
    BatchOut {
        found,
        pairs: np,
        queries,
        live: queries + nl,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squares::enumerate_squares;
    use crate::testkit::{generate, grid_cube_count, oracle_hypercubes, InstanceSpec};
    use std::collections::BTreeSet;

    fn cubes(set: &PointSet) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        enumerate_hypercubes(set, &mut |o: &Occurrence<'_>| out.push(o.vertex_indices())).unwrap();
        out
    }

    #[test]
    fn layout_counts() {
        for d in 2..=5 {
            let layout = Layout::new(d);
            assert_eq!(layout.per_pair, (1 << (d - 1)) * ((1 << d) - 2));
            assert_eq!(layout.schemas.len(), 3usize.pow(d as u32 - 1) - 1);
            let total: usize = layout.schemas.iter().map(|s| s.1.len()).sum();
            assert_eq!(total, layout.per_pair);
            let mut slots: Vec<usize> = layout.schemas.iter().flat_map(|s| s.1.iter().map(|c| c.1)).collect();
            slots.sort();
            assert_eq!(slots, (0..layout.per_pair).collect::<Vec<_>>());
        }
    }

    #[test]
    fn grid_fixtures() {
        for (m, d) in [(2, 3), (4, 3), (3, 4), (5, 2)] {
            let set = generate(&InstanceSpec::Grid { side: m, dim: d }).unwrap();
            let found = cubes(&set);
            assert_eq!(found.len() as u64, grid_cube_count(m as u64, d as u32), "m={m} d={d}");
            let unique: BTreeSet<_> = found.into_iter().collect();
            assert_eq!(unique, oracle_hypercubes(&set).unwrap());
        }
    }

    #[test]
    fn unit_cube_vertex_order() {
        let set = generate(&InstanceSpec::Grid { side: 2, dim: 3 }).unwrap();
        assert_eq!(cubes(&set), vec![(0..8).collect::<Vec<_>>()]);
    }

    #[test]
    fn planar_case_matches_squares() {
        for seed in 0..10 {
            let set = generate(&InstanceSpec::Random {
                n: 150,
                ranges: vec![12, 12],
                seed,
            })
            .unwrap();
            let mut sq = Vec::new();
            enumerate_squares(&set, &mut |o: &Occurrence<'_>| sq.push(o.vertex_indices())).unwrap();
            let a: BTreeSet<_> = sq.into_iter().collect();
            let b: BTreeSet<_> = cubes(&set).into_iter().collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn random_sets_match_oracle() {
        for seed in 0..10 {
            let set = generate(&InstanceSpec::Random {
                n: 300,
                ranges: vec![6, 6, 6],
                seed,
            })
            .unwrap();
            let found = cubes(&set);
            let unique: BTreeSet<_> = found.iter().cloned().collect();
            assert_eq!(unique.len(), found.len());
            assert_eq!(unique, oracle_hypercubes(&set).unwrap());
        }
    }

    #[test]
    fn dimension_checks() {
        let line = PointSet::from_ints(&[[0], [1]]).unwrap();
        assert!(enumerate_hypercubes(&line, &mut |_: &Occurrence<'_>| {}).is_err());
    }
}
