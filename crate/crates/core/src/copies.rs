//! Homothetic copies `s * Q + t` of a compiled pattern.
//!
//! Each round works along one direction class of the pattern. Points are
//! grouped into lines parallel to the class direction; every pair on a
//! processed line, in every role of the class, emits one keyed query per
//! off-line pattern vertex, and on-line vertices are confirmed by a merge
//! along the line. A copy is reported from the first class pair (in
//! canonical order) whose witness line is processed in that round.
//!
//! Paper mode deletes the points on short lines after every round and
//! processes all lines in the last one; it is complete for deletion-safe
//! patterns. Safe mode never deletes. It runs one round per class, reports
//! a copy in the first round holding a short witness, and recurses on the
//! points that can still belong to a copy without any short witness.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;

use crate::batch::{ranges, run_batches};
use crate::compile::{compile_pattern, CompileConfig, CompiledPattern, RoundPlan, Safety, Source, Strategy, VertexRecipe};
use crate::error::{Error, Result};
use crate::geometry::{Pattern, PointSet};
use crate::label::{mark_queries, radix_sort, rank_values, RadixScratch, RecordBatch, NO_MARK};
use crate::linalg;
use crate::lines::{LinePartition, PairSchedule};
use crate::report::{integer_root, EngineOptions, EngineStats, Occurrence, Reporter};
use crate::scalar::Scalar;

/// Requested execution mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Paper mode for deletion-safe patterns, safe mode otherwise.
    #[default]
    Auto,
    /// `d` rounds with deletion. May miss copies of patterns that are not
    /// deletion-safe.
    Paper,
    /// No deletion, one round per direction class, residual recursion.
    Safe,
}

/// What actually runs for a compiled pattern and requested mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Paper,
    Safe,
    /// Two-point and one-dimensional patterns: every pair on every line.
    PairScan,
}

impl fmt::Display for Execution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Execution::Paper => "paper",
            Execution::Safe => "safe",
            Execution::PairScan => "pair-scan",
        })
    }
}

pub fn execution(compiled: &CompiledPattern, mode: Mode) -> Execution {
    match (compiled.strategy, mode) {
        (Strategy::PairScan, _) => Execution::PairScan,
        (_, Mode::Paper) => Execution::Paper,
        (_, Mode::Safe) => Execution::Safe,
        (_, Mode::Auto) if compiled.safety == Safety::DeletionSafe => Execution::Paper,
        (_, Mode::Auto) => Execution::Safe,
    }
}

/// For each partner position `j > anchor` of a line whose exact active
/// coordinates are `line` (strictly increasing), the position holding
/// `line[anchor] + c * (line[j] - line[anchor])`, if any. One merge per
/// anchor.
pub fn collinear_companion_check(line: &[Scalar], anchor: usize, c: &Scalar) -> Vec<Option<usize>> {
    let mut out = Vec::with_capacity(line.len().saturating_sub(anchor + 1));
    companion_positions(line, anchor, c, anchor + 1..line.len(), &mut out);
    out
}

fn companion_positions(line: &[Scalar], anchor: usize, c: &Scalar, partners: Range<usize>, out: &mut Vec<Option<usize>>) {
    if partners.is_empty() {
        return;
    }
    let base = &line[anchor];
    let target = |j: usize| base + &(c * &(&line[j] - base));
    let first = target(partners.start);
    if c.is_positive() {
        // targets increase with j
        let mut ptr = line.partition_point(|x| *x < first);
        for j in partners {
            let u = target(j);
            while ptr < line.len() && line[ptr] < u {
                ptr += 1;
            }
            out.push((ptr < line.len() && line[ptr] == u).then_some(ptr));
        }
    } else {
        // targets decrease with j; `ptr` counts positions holding values <= u
        let mut ptr = line.partition_point(|x| *x <= first);
        for j in partners {
            let u = target(j);
            while ptr > 0 && line[ptr - 1] > u {
                ptr -= 1;
            }
            out.push((ptr > 0 && line[ptr - 1] == u).then(|| ptr - 1));
        }
    }
}

/// Keyed vertices of a role with the sources of their key components.
type Keyed<'a> = Vec<(usize, &'a [Source])>;

/// One direction-class round over a live subset.
struct Round<'a> {
    plan: &'a RoundPlan,
    k: usize,
    live: Vec<u32>,
    /// Labels per catalog functional; empty when the plan does not use it.
    labels: Vec<Vec<u32>>,
    alphabet: u32,
    part: LinePartition,
    /// Exact active coordinates in line order.
    line_active: Vec<Scalar>,
    processed: Vec<bool>,
    schedule: PairSchedule,
    /// `entries[schema][role]`: keyed vertices of the role using the schema.
    entries: Vec<Vec<Keyed<'a>>>,
    /// `companions[role]`: on-line vertices with their parameter.
    companions: Vec<Vec<(usize, &'a Scalar)>>,
    /// Skip a copy whose smaller-index class pair has a processed line.
    dedup_pairs: bool,
}

impl<'a> Round<'a> {
    fn build(
        points: &PointSet,
        compiled: &CompiledPattern,
        plan: &'a RoundPlan,
        live: Vec<u32>,
        processed: impl Fn(usize) -> bool,
        dedup_pairs: bool,
    ) -> Self {
        let d = points.dim();
        let rows = |f: &[Scalar]| -> Vec<Scalar> {
            live.iter().map(|&p| linalg::dot(f, points.coords(p as usize))).collect()
        };
        let transverse: Vec<Vec<u32>> = (0..d - 1).map(|i| rank_values(&rows(plan.matrix.row(i))).labels).collect();
        let active = rows(plan.active_row());
        let active_labels = rank_values(&active);
        let refs: Vec<&[u32]> = transverse.iter().map(Vec::as_slice).collect();
        let part = LinePartition::build(live.len(), &refs, &active_labels.labels);
        let line_active = part.order().iter().map(|&p| active[p as usize].clone()).collect();
        let processed: Vec<bool> = (0..part.lines()).map(|l| processed(part.size(l))).collect();

        let mut labels = vec![Vec::new(); compiled.catalog.len()];
        let mut alphabet = 1;
        for &f in plan.schemas.iter().flatten() {
            if labels[f].is_empty() {
                let r = rank_values(&rows(compiled.catalog[f].coeffs()));
                alphabet = alphabet.max(r.alphabet);
                labels[f] = r.labels;
            }
        }
        let mut entries = vec![vec![Vec::new(); plan.roles.len()]; plan.schemas.len()];
        let mut companions = vec![Vec::new(); plan.roles.len()];
        for (ri, role) in plan.roles.iter().enumerate() {
            for (j, recipe) in role.recipes.iter().enumerate() {
                match recipe {
                    VertexRecipe::Keyed { schema, sources } => entries[*schema][ri].push((j, sources.as_slice())),
                    VertexRecipe::Companion { c } => companions[ri].push((j, c)),
                    VertexRecipe::Anchor | VertexRecipe::Partner => {}
                }
            }
        }
        let schedule = PairSchedule::new(&part, |l| processed[l], plan.roles.len());
        Round {
            plan,
            k: compiled.len(),
            live,
            labels,
            alphabet,
            part,
            line_active,
            processed,
            schedule,
            entries,
            companions,
            dedup_pairs,
        }
    }

    fn short_flags(&self) -> Vec<bool> {
        (0..self.live.len()).map(|p| self.processed[self.part.line_of(p)]).collect()
    }

    fn line_work(&self) -> u64 {
        (0..self.part.lines())
            .filter(|&l| self.processed[l])
            .map(|l| (self.part.size(l) as u64).pow(2))
            .sum()
    }
}

#[derive(Default)]
struct Scratch {
    batch: RecordBatch,
    radix: RadixScratch,
    marks: Vec<u32>,
    /// (line, anchor position, role, partner position)
    assignments: Vec<(u32, u32, u32, u32)>,
    key: Vec<u32>,
    merged: Vec<Option<usize>>,
    ids: Vec<u32>,
}

struct BatchOut {
    /// Global ids, `k` per copy.
    found: Vec<u32>,
    pairs: usize,
    queries: usize,
    live: usize,
}

/// Extra acceptance test on a candidate's local ids.
type Filter<'f> = &'f (dyn Fn(&[u32]) -> bool + Sync);

fn process_batch(rd: &Round<'_>, sc: &mut Scratch, a: u64, b: u64, accept: Filter<'_>) -> BatchOut {
    let plan = rd.plan;
    let part = &rd.part;
    let k = rd.k;
    let d = plan.matrix.dim();
    sc.assignments.clear();
    rd.schedule.visit(part, a, b, |line, i, role, j| {
        sc.assignments.push((line as u32, i as u32, role as u32, j as u32));
    });
    let na = sc.assignments.len();
    sc.marks.clear();
    sc.marks.resize(na * k, NO_MARK);
    let point_at = |line: u32, pos: u32| part.line(line as usize)[pos as usize];

    // keyed vertices, one array per schema
    sc.key.resize(d, 0);
    let mut queries = 0;
    for (s, functionals) in plan.schemas.iter().enumerate() {
        sc.batch.reset(d);
        for (q, &(line, i, role, j)) in sc.assignments.iter().enumerate() {
            let (p1, p2) = (point_at(line, i) as usize, point_at(line, j) as usize);
            for &(vertex, sources) in &rd.entries[s][role as usize] {
                for (c, (&f, src)) in functionals.iter().zip(sources).enumerate() {
                    sc.key[c] = rd.labels[f][if *src == Source::P1 { p1 } else { p2 }];
                }
                sc.batch.push_query(&sc.key, (q * k + vertex) as u32);
            }
        }
        if sc.batch.is_empty() {
            continue;
        }
        queries += sc.batch.len();
        for p in 0..rd.live.len() {
            for (c, &f) in functionals.iter().enumerate() {
                sc.key[c] = rd.labels[f][p];
            }
            sc.batch.push_input(&sc.key, p as u32);
        }
        radix_sort(&mut sc.batch, rd.alphabet, &mut sc.radix);
        mark_queries(&sc.batch, &mut sc.marks);
    }

    // anchors, partners and on-line companions; runs of equal
    // (line, anchor, role) have consecutive partners
    let mut q = 0;
    while q < na {
        let (line, i, role, j0) = sc.assignments[q];
        let mut end = q + 1;
        while end < na && sc.assignments[end].0 == line && sc.assignments[end].1 == i && sc.assignments[end].2 == role {
            end += 1;
        }
        let r = &plan.roles[role as usize];
        let members = part.line(line as usize);
        for (x, slot) in (q..end).enumerate() {
            sc.marks[slot * k + r.r] = members[i as usize];
            sc.marks[slot * k + r.t] = members[j0 as usize + x];
        }
        let off = part.offset(line as usize);
        let coords = &rd.line_active[off..off + members.len()];
        for &(vertex, c) in &rd.companions[role as usize] {
            sc.merged.clear();
            let j1 = j0 as usize + (end - q);
            companion_positions(coords, i as usize, c, j0 as usize..j1, &mut sc.merged);
            for (x, pos) in sc.merged.iter().enumerate() {
                if let Some(pos) = pos {
                    sc.marks[(q + x) * k + vertex] = members[*pos];
                }
            }
        }
        q = end;
    }

    let mut found = Vec::new();
    for (q, &(_, _, role, _)) in sc.assignments.iter().enumerate() {
        let ids = &sc.marks[q * k..(q + 1) * k];
        if ids.contains(&NO_MARK) {
            continue;
        }
        let pair = plan.roles[role as usize].pair;
        if rd.dedup_pairs
            && plan.pairs[..pair].iter().any(|&(u, _)| rd.processed[part.line_of(ids[u] as usize)])
        {
            continue;
        }
        if !accept(ids) {
            continue;
        }
        sc.ids.clear();
        sc.ids.extend(ids.iter().map(|&p| rd.live[p as usize]));
        found.extend_from_slice(&sc.ids);
    }
    BatchOut {
        found,
        pairs: na,
        queries,
        live: queries + if queries > 0 { rd.live.len() } else { 0 },
    }
}

struct Engine<'a, 'r> {
    points: &'a PointSet,
    compiled: &'a CompiledPattern,
    options: &'a EngineOptions,
    stats: EngineStats,
    reporter: &'r mut dyn Reporter,
}

impl Engine<'_, '_> {
    fn run_round(&mut self, rd: &Round<'_>, round: usize, accept: Filter<'_>) {
        self.stats.note_line_work(round, rd.line_work());
        let batch = rd.live.len().max(1) as u64;
        let (points, pattern, options) = (self.points, &self.compiled.pattern, self.options);
        let stats = &mut self.stats;
        let reporter = &mut *self.reporter;
        run_batches(
            options.threads,
            ranges(rd.schedule.total(), batch),
            Scratch::default,
            |sc, (a, b)| process_batch(rd, sc, a, b, accept),
            |out| {
                stats.note_batch(out.pairs, out.queries, out.live);
                for ids in out.found.chunks_exact(pattern.len()) {
                    emit(points, pattern, options, stats, reporter, ids, round);
                }
            },
        );
    }

    fn paper(&mut self) {
        let rounds = self.compiled.plans.len().min(self.compiled.dim());
        let threshold = self.stats.threshold;
        let mut live: Vec<u32> = (0..self.points.len() as u32).collect();
        for round in 0..rounds {
            if live.len() < self.compiled.len() {
                break;
            }
            let last = round + 1 == rounds;
            let plan = &self.compiled.plans[round];
            let rd = Round::build(self.points, self.compiled, plan, live, |s| last || s <= threshold, true);
            self.run_round(&rd, round, &|_| true);
            live = (0..rd.live.len())
                .filter(|&p| !rd.processed[rd.part.line_of(p)])
                .map(|p| rd.live[p])
                .collect();
        }
    }

    fn safe(&mut self) {
        let compiled = self.compiled;
        let plans = &compiled.plans;
        let k = compiled.len();
        let n = self.points.len();
        let threshold = self.stats.threshold;
        // plans[l] touches vertex j
        let touches: Vec<Vec<bool>> = plans
            .iter()
            .map(|p| {
                let mut t = vec![false; k];
                for &(a, b) in &p.pairs {
                    t[a] = true;
                    t[b] = true;
                }
                t
            })
            .collect();
        // ancestor[l][global]: on a short class-l line at an earlier level
        let mut ancestor = vec![vec![false; n]; plans.len()];
        let mut set: Vec<u32> = (0..n as u32).collect();
        let mut level = 0;
        while set.len() >= k {
            let mut short: Vec<Vec<bool>> = Vec::with_capacity(plans.len());
            for (l, plan) in plans.iter().enumerate() {
                let rd = Round::build(self.points, compiled, plan, set.clone(), |s| s <= threshold, true);
                let earlier = &short;
                let anc = &ancestor;
                let set_ref = &set;
                let accept = move |ids: &[u32]| {
                    let early = earlier.iter().enumerate().any(|(e, flags)| {
                        plans[e].pairs.iter().any(|&(a, _)| flags[ids[a] as usize])
                    });
                    !early && !witnessed(plans, anc, ids.iter().map(|&p| set_ref[p as usize]).collect::<Vec<_>>().as_slice())
                };
                self.run_round(&rd, level * (plans.len() + 1) + l, &accept);
                short.push(rd.short_flags());
            }
            for (l, flags) in short.iter().enumerate() {
                for (p, &f) in flags.iter().enumerate() {
                    ancestor[l][set[p] as usize] |= f;
                }
            }
            // points that may still be a vertex of a copy with no short witness
            let residual: Vec<u32> = (0..set.len())
                .filter(|&p| (0..k).any(|j| (0..plans.len()).all(|l| !touches[l][j] || !short[l][p])))
                .map(|p| set[p])
                .collect();
            if residual.len() == set.len() {
                self.stats.fallback_points = set.len();
                self.exhaustive(&set, &ancestor, level * (plans.len() + 1) + plans.len());
                break;
            }
            set = residual;
            level += 1;
            if set.len() >= k {
                self.stats.residual_levels = level;
            }
        }
    }

    /// Every copy inside `set` with no short witness so far, by trying all
    /// ordered pairs as images of `q_0, q_1`.
    fn exhaustive(&mut self, set: &[u32], ancestor: &[Vec<bool>], round: usize) {
        let pattern = &self.compiled.pattern;
        let d = pattern.dim();
        let index: HashMap<&[Scalar], u32> = set.iter().map(|&p| (self.points.coords(p as usize), p)).collect();
        let (q0, q1) = (pattern.vertex(0), pattern.vertex(1));
        let dir = linalg::sub(q1, q0);
        let axis = (0..d).find(|&i| !dir[i].is_zero()).expect("distinct vertices");
        let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
        for &a in set {
            for &b in set {
                let (pa, pb) = (self.points.coords(a as usize), self.points.coords(b as usize));
                if a == b {
                    continue;
                }
                let s = &(&pb[axis] - &pa[axis]) / &dir[axis];
                if !(s.is_positive() || (self.compiled.allow_negative_scale() && !s.is_zero())) {
                    continue;
                }
                if linalg::sub(pb, pa) != linalg::scale(&dir, &s) {
                    continue;
                }
                let ids: Option<Vec<u32>> = pattern
                    .vertices()
                    .iter()
                    .map(|q| {
                        let v = linalg::add(pa, &linalg::scale(&linalg::sub(q, q0), &s));
                        index.get(v.as_slice()).copied()
                    })
                    .collect();
                if let Some(ids) = ids {
                    if !witnessed(&self.compiled.plans, ancestor, &ids) {
                        found.insert(ids);
                    }
                }
            }
        }
        for ids in found {
            emit(
                self.points,
                pattern,
                self.options,
                &mut self.stats,
                &mut *self.reporter,
                &ids,
                round,
            );
        }
    }

    fn pair_scan(&mut self) {
        let plan = &self.compiled.plans[0];
        let live = (0..self.points.len() as u32).collect();
        let rd = Round::build(self.points, self.compiled, plan, live, |_| true, false);
        self.run_round(&rd, 0, &|_| true);
    }
}

/// True when some class pair of the copy (global ids) had a short line.
fn witnessed(plans: &[RoundPlan], ancestor: &[Vec<bool>], ids: &[u32]) -> bool {
    plans
        .iter()
        .zip(ancestor)
        .any(|(plan, flags)| plan.pairs.iter().any(|&(a, _)| flags[ids[a] as usize]))
}

fn emit(
    points: &PointSet,
    pattern: &Pattern,
    options: &EngineOptions,
    stats: &mut EngineStats,
    reporter: &mut dyn Reporter,
    ids: &[u32],
    round: usize,
) {
    let occ = Occurrence::new(points, pattern, ids, round);
    if options.check_exact {
        assert!(occ.is_exact(), "inexact copy report {:?}", occ.vertex_indices());
    }
    stats.note_report(round);
    reporter.report(&occ);
}

/// Reports every copy of the compiled pattern in `points` exactly once
/// (exactly once for any mode on deletion-safe patterns; paper mode on
/// other patterns may miss copies).
pub fn enumerate_copies(
    points: &PointSet,
    compiled: &CompiledPattern,
    mode: Mode,
    reporter: &mut dyn Reporter,
) -> Result<EngineStats> {
    enumerate_copies_with(points, compiled, mode, &EngineOptions::default(), reporter)
}

pub fn enumerate_copies_with(
    points: &PointSet,
    compiled: &CompiledPattern,
    mode: Mode,
    options: &EngineOptions,
    reporter: &mut dyn Reporter,
) -> Result<EngineStats> {
    if points.dim() != compiled.dim() {
        return Err(Error::DimensionMismatch {
            expected: compiled.dim(),
            found: points.dim(),
        });
    }
    let n = points.len();
    let threshold = options.threshold.unwrap_or_else(|| integer_root(n, compiled.dim()));
    let mut engine = Engine {
        points,
        compiled,
        options,
        stats: EngineStats::new(n, threshold),
        reporter,
    };
    if n >= compiled.len() {
        match execution(compiled, mode) {
            Execution::Paper => engine.paper(),
            Execution::Safe => engine.safe(),
            Execution::PairScan => engine.pair_scan(),
        }
    }
    Ok(engine.stats)
}

/// Compiles `pattern` and enumerates its copies.
pub fn find_copies(
    points: &PointSet,
    pattern: &Pattern,
    config: CompileConfig,
    mode: Mode,
    options: &EngineOptions,
    reporter: &mut dyn Reporter,
) -> Result<EngineStats> {
    let compiled = compile_pattern(pattern, config)?;
    enumerate_copies_with(points, &compiled, mode, options, reporter)
}

/// Copies of a two-point pattern: ordered pairs `(A, B)` with `B - A` a
/// positive multiple of `q_1 - q_0`, found line by line.
pub fn enumerate_two_point_pattern(
    points: &PointSet,
    pattern: &Pattern,
    reporter: &mut dyn Reporter,
) -> Result<EngineStats> {
    if pattern.len() != 2 {
        return Err(Error::InvalidPattern(format!(
            "expected a two-point pattern, got {} vertices",
            pattern.len()
        )));
    }
    find_copies(points, pattern, CompileConfig::default(), Mode::Auto, &EngineOptions::default(), reporter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{generate, oracle_copies, planted_instance, InstanceSpec};
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    fn run(points: &PointSet, pattern: &Pattern, negative: bool, mode: Mode) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let config = CompileConfig {
            allow_negative_scale: negative,
        };
        find_copies(points, pattern, config, mode, &EngineOptions::default(), &mut |o: &Occurrence<'_>| {
            out.push(o.vertex_indices())
        })
        .unwrap();
        out
    }

    fn assert_oracle(points: &PointSet, pattern: &Pattern, negative: bool, mode: Mode) {
        let got = run(points, pattern, negative, mode);
        let unique: BTreeSet<_> = got.iter().cloned().collect();
        assert_eq!(unique.len(), got.len(), "duplicate reports");
        assert_eq!(unique, oracle_copies(points, pattern, negative).unwrap());
    }

    #[test]
    fn merge_fixtures() {
        let line = ints(&[0, 1, 2, 3]);
        let half = Scalar::ratio(1, 2);
        assert_eq!(collinear_companion_check(&line, 0, &half), vec![None, Some(1), None]);
        let back = Scalar::from_int(-1);
        assert_eq!(collinear_companion_check(&ints(&[0, 1, 2, 3, 4]), 2, &back), vec![Some(1), Some(0)]);
    }

    proptest! {
        #[test]
        fn merge_matches_binary_search(
            values in prop::collection::btree_set(-30i64..30, 1..25),
            num in -6i64..=6,
            den in 1i64..=3,
            anchor_seed in any::<prop::sample::Index>(),
        ) {
            prop_assume!(num != 0);
            let line: Vec<Scalar> = values.iter().map(|&v| Scalar::from_int(v)).collect();
            let anchor = anchor_seed.index(line.len());
            let c = Scalar::ratio(num, den);
            let got = collinear_companion_check(&line, anchor, &c);
            let want: Vec<Option<usize>> = (anchor + 1..line.len())
                .map(|j| {
                    let u = &line[anchor] + &(&c * &(&line[j] - &line[anchor]));
                    line.binary_search(&u).ok()
                })
                .collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn triangle_on_a_grid() {
        let tri = Pattern::from_ints(&[[0, 0], [1, 0], [0, 1]]).unwrap();
        let g4 = generate(&InstanceSpec::Grid { side: 4, dim: 2 }).unwrap();
        assert_eq!(run(&g4, &tri, false, Mode::Auto).len(), 14);
        assert_oracle(&g4, &tri, false, Mode::Auto);
        assert_oracle(&g4, &tri, true, Mode::Auto);
    }

    #[test]
    fn square_pattern_matches_grid() {
        let g3 = generate(&InstanceSpec::Grid { side: 3, dim: 2 }).unwrap();
        let sq = Pattern::unit_cube(2);
        for mode in [Mode::Auto, Mode::Paper, Mode::Safe] {
            assert_eq!(run(&g3, &sq, false, mode).len(), 5);
        }
    }

    #[test]
    fn collinear_quadrilateral_via_merge() {
        let quad = Pattern::from_ints(&[[0, 0], [2, 0], [1, 0], [0, 1]]).unwrap();
        // one planted copy at scale 3
        let mut raw: Vec<Vec<Scalar>> = quad
            .vertices()
            .iter()
            .map(|q| q.iter().zip([5, 7]).map(|(x, t)| &(x * &Scalar::from_int(3)) + &Scalar::from_int(t)).collect())
            .collect();
        raw.push(ints(&[0, 0]));
        raw.push(ints(&[20, 3]));
        let set = PointSet::normalize(raw).unwrap();
        assert_eq!(run(&set, &quad, false, Mode::Auto), vec![vec![0, 1, 2, 3]]);
        for seed in 0..5 {
            let planted = planted_instance(&quad, 6, 4, 120, 24, seed).unwrap();
            assert_oracle(&planted, &quad, false, Mode::Auto);
            assert_oracle(&planted, &quad, true, Mode::Safe);
        }
    }

    #[test]
    fn random_sets_match_the_oracle() {
        let patterns = [
            Pattern::from_ints(&[[0, 0], [1, 0], [0, 1]]).unwrap(),
            Pattern::from_ints(&[[0, 0], [3, 0], [1, 1], [2, 1]]).unwrap(),
            Pattern::unit_cube(2),
            Pattern::from_ints(&[[0, 0], [2, 1], [1, 3]]).unwrap(),
        ];
        for (i, pattern) in patterns.iter().enumerate() {
            for seed in 0..4 {
                let set = generate(&InstanceSpec::Random {
                    n: 250,
                    ranges: vec![14, 14],
                    seed: seed + 10 * i as u64,
                })
                .unwrap();
                for mode in [Mode::Auto, Mode::Safe] {
                    assert_oracle(&set, pattern, false, mode);
                }
            }
        }
    }

    #[test]
    fn simplex_in_space() {
        let simplex = Pattern::from_ints(&[[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]).unwrap();
        for seed in 0..3 {
            let set = generate(&InstanceSpec::Random {
                n: 300,
                ranges: vec![6, 6, 6],
                seed,
            })
            .unwrap();
            assert_oracle(&set, &simplex, false, Mode::Auto);
        }
    }

    #[test]
    fn two_point_patterns() {
        let diag = Pattern::from_ints(&[[0, 0], [1, 1]]).unwrap();
        let set = PointSet::from_ints(&[[0, 0], [2, 2], [5, 5]]).unwrap();
        let mut count = crate::report::CountingReporter::default();
        enumerate_two_point_pattern(&set, &diag, &mut count).unwrap();
        assert_eq!(count.count, 3);
        let flat = Pattern::from_ints(&[[0, 0], [1, 0]]).unwrap();
        let column = PointSet::from_ints(&[[0, 0], [0, 1]]).unwrap();
        assert!(run(&column, &flat, false, Mode::Auto).is_empty());
        let random = generate(&InstanceSpec::Random {
            n: 120,
            ranges: vec![8, 8],
            seed: 3,
        })
        .unwrap();
        let skew = Pattern::from_ints(&[[0, 0], [2, -1]]).unwrap();
        assert_oracle(&random, &skew, false, Mode::Auto);
        assert_oracle(&random, &skew, true, Mode::Auto);
    }

    #[test]
    fn line_patterns() {
        let pat = Pattern::from_ints(&[[0], [3], [1]]).unwrap();
        let set = generate(&InstanceSpec::Random {
            n: 40,
            ranges: vec![60],
            seed: 9,
        })
        .unwrap();
        assert_oracle(&set, &pat, false, Mode::Auto);
        assert_oracle(&set, &pat, true, Mode::Auto);
    }

    #[test]
    fn thresholds_do_not_change_output() {
        let tri = Pattern::from_ints(&[[0, 0], [1, 0], [0, 1]]).unwrap();
        let set = generate(&InstanceSpec::Random {
            n: 200,
            ranges: vec![12, 12],
            seed: 5,
        })
        .unwrap();
        let want = oracle_copies(&set, &tri, false).unwrap();
        let compiled = compile_pattern(&tri, CompileConfig::default()).unwrap();
        for threshold in [0, 1, 2, 5, 50] {
            for threads in [0, 2] {
                let options = EngineOptions {
                    threshold: Some(threshold),
                    threads,
                    check_exact: true,
                };
                let mut got = Vec::new();
                enumerate_copies_with(&set, &compiled, Mode::Safe, &options, &mut |o: &Occurrence<'_>| {
                    got.push(o.vertex_indices())
                })
                .unwrap();
                let unique: BTreeSet<_> = got.iter().cloned().collect();
                assert_eq!(unique.len(), got.len());
                assert_eq!(unique, want, "threshold {threshold}");
            }
        }
    }
}
