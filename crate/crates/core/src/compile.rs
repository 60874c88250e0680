//! Turns a pattern into round plans for the copies engine.
//!
//! Pattern pairs are grouped into direction classes (pairs with parallel
//! difference vectors). Each round plan works along one class direction `v`:
//! an invertible matrix `M` maps `v` onto the last axis, so lines parallel
//! to `v` become lines along `e_d`. For an input pair `P1, P2` on such a
//! line playing the role of a pattern pair `(q_r, q_t)`, every other vertex
//! lies at `P1 + delta * w` with `delta = (P2 - P1)_d` and
//! `w = M (q_j - q_r) / h`, `h = (M (q_t - q_r))_d`. A recipe gives, per key
//! component, a functional whose value at that vertex equals its value at
//! `P1` or at `P2`, so the query key is copied from endpoint labels.
//! Vertices on the pair's own line cannot be keyed that way and are checked
//! by a merge along the line instead.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{LinearFunctional, Pattern};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// Compilation switches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompileConfig {
    /// Also report copies `s * Q + t` with `s < 0`.
    pub allow_negative_scale: bool,
}

/// Endpoint of the input pair whose label a key component copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    /// The lower point (smaller active coordinate).
    P1,
    /// The upper point.
    P2,
}

/// How the image of one pattern vertex is found for a given role.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexRecipe {
    /// The vertex is the role's `q_r`, matched to `P1`.
    Anchor,
    /// The vertex is the role's `q_t`, matched to `P2`.
    Partner,
    /// Located by a keyed query: component `i` is the label of functional
    /// `schemas[schema][i]` read at `sources[i]`.
    Keyed { schema: usize, sources: Vec<Source> },
    /// On the pair's line at active coordinate `P1_d + c * (P2_d - P1_d)`.
    Companion { c: Scalar },
}

/// An ordered pattern pair `(q_r, q_t)` of the plan's class that an input
/// pair `(P1, P2)` may represent. The implied scale is `delta / h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Role {
    pub r: usize,
    pub t: usize,
    /// `(M (q_t - q_r))_d`; negative only for negative-scale roles.
    pub h: Scalar,
    /// Index of the unordered pair `{r, t}` in [`RoundPlan::pairs`].
    pub pair: usize,
    /// One recipe per pattern vertex.
    pub recipes: Vec<VertexRecipe>,
}

impl Role {
    pub fn keyed(&self) -> usize {
        self.recipes
            .iter()
            .filter(|r| matches!(r, VertexRecipe::Keyed { .. }))
            .count()
    }
}

/// Everything one round needs for a single direction class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundPlan {
    /// Direction class index in [`CompiledPattern::classes`].
    pub class: usize,
    /// The base pair `(a, b)` defining `v = q_b - q_a`.
    pub base: (usize, usize),
    /// `M`, with `M v` a nonzero multiple of `e_d`.
    pub matrix: Matrix,
    /// Catalog indices of the functionals `x'_1 .. x'_(d-1)` (rows of `M`,
    /// normalized) that identify a line.
    pub transverse: Vec<usize>,
    /// Unordered class pairs `(a, b)`, `a < b`, in canonical order. Copies
    /// are reported from the first pair whose witness line is processed.
    pub pairs: Vec<(usize, usize)>,
    pub roles: Vec<Role>,
    /// Distinct functional tuples used by keyed recipes.
    pub schemas: Vec<Vec<usize>>,
}

impl RoundPlan {
    /// Last row of `M`: the coordinate along the lines.
    pub fn active_row(&self) -> &[Scalar] {
        self.matrix.row(self.matrix.dim() - 1)
    }
}

/// Whether post-round deletion is complete for this pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Safety {
    /// Every vertex has a parallel partner in every round direction.
    DeletionSafe,
    /// Some vertex lacks a partner in some direction; use safe mode.
    NeedsSafeMode,
}

/// Which engine runs the pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Rounds over short lines with keyed queries (`k >= 3`, `d >= 2`).
    Rounds,
    /// All pairs on all lines of the base direction, every other vertex
    /// confirmed by merge (`k = 2`, or `d = 1`).
    PairScan,
}

/// A class of pattern pairs with parallel difference vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionClass {
    /// Normalized direction (first nonzero component 1).
    pub direction: Vec<Scalar>,
    /// Unordered pairs `(a, b)`, `a < b`, in lexicographic order.
    pub pairs: Vec<(usize, usize)>,
}

impl DirectionClass {
    /// True when every pattern vertex occurs in some pair of the class.
    pub fn covers(&self, k: usize) -> bool {
        let mut seen = vec![false; k];
        for &(a, b) in &self.pairs {
            seen[a] = true;
            seen[b] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledPattern {
    pub pattern: Pattern,
    pub config: CompileConfig,
    pub strategy: Strategy,
    pub safety: Safety,
    pub classes: Vec<DirectionClass>,
    /// Round plans; the first `min(d, len)` have independent directions.
    pub plans: Vec<RoundPlan>,
    /// Distinct normalized functionals used by any plan.
    pub catalog: Vec<LinearFunctional>,
}

impl CompiledPattern {
    pub fn dim(&self) -> usize {
        self.pattern.dim()
    }

    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }

    pub fn allow_negative_scale(&self) -> bool {
        self.config.allow_negative_scale
    }
}

#[derive(Default)]
struct Catalog {
    functionals: Vec<LinearFunctional>,
    index: HashMap<Vec<Scalar>, usize>,
}

impl Catalog {
    fn intern(&mut self, coeffs: Vec<Scalar>) -> usize {
        let f = LinearFunctional::new(coeffs).normalized();
        let next = self.functionals.len();
        *self.index.entry(f.coeffs().to_vec()).or_insert_with(|| {
            self.functionals.push(f);
            next
        })
    }
}

fn direction_classes(pattern: &Pattern) -> Vec<DirectionClass> {
    let k = pattern.len();
    let mut classes: Vec<DirectionClass> = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let dir = linalg::normalize_direction(&linalg::sub(pattern.vertex(b), pattern.vertex(a)));
            match classes.iter_mut().find(|c| c.direction == dir) {
                Some(c) => c.pairs.push((a, b)),
                None => classes.push(DirectionClass {
                    direction: dir,
                    pairs: vec![(a, b)],
                }),
            }
        }
    }
    classes
}

/// True when no third pattern vertex lies on the line through `q_a`, `q_b`.
fn is_ordinary(pattern: &Pattern, a: usize, b: usize) -> bool {
    let v = linalg::sub(pattern.vertex(b), pattern.vertex(a));
    (0..pattern.len())
        .filter(|&j| j != a && j != b)
        .all(|j| !linalg::parallel(&linalg::sub(pattern.vertex(j), pattern.vertex(a)), &v))
}

/// Greedy independent selection over `order`; returns the chosen indices.
fn independent_prefix(classes: &[DirectionClass], order: &[usize], d: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut dirs: Vec<Vec<Scalar>> = Vec::new();
    for &c in order {
        if chosen.len() == d {
            break;
        }
        dirs.push(classes[c].direction.clone());
        if linalg::rank(&dirs) == dirs.len() {
            chosen.push(c);
        } else {
            dirs.pop();
        }
    }
    chosen
}

/// `M` with `M v = v_p e_d`, `p` the last nonzero component of `v`: swap
/// `p` to the last axis, then subtract multiples of it from the others.
fn align_matrix(v: &[Scalar]) -> Matrix {
    let d = v.len();
    let p = (0..d).rev().find(|&i| !v[i].is_zero()).expect("nonzero direction");
    let mut swapped = v.to_vec();
    swapped.swap(p, d - 1);
    let mut rows: Vec<Vec<Scalar>> = Matrix::identity(d).rows();
    rows.swap(p, d - 1);
    let pivot = &swapped[d - 1];
    let last = rows[d - 1].clone();
    for (i, row) in rows.iter_mut().enumerate().take(d - 1) {
        let factor = &swapped[i] / pivot;
        if !factor.is_zero() {
            *row = linalg::sub(row, &linalg::scale(&last, &factor));
        }
    }
    let m = Matrix::from_rows(&rows);
    debug_assert!(m.apply(v)[..d - 1].iter().all(Scalar::is_zero));
    m
}

/// Transformed-coordinate functional `gamma` as original coefficients `M^T gamma`.
fn pull_back(m: &Matrix, gamma: &[Scalar]) -> Vec<Scalar> {
    let d = m.dim();
    (0..d)
        .map(|col| (0..d).map(|row| &gamma[row] * m.get(row, col)).sum())
        .collect()
}

fn unit(d: usize, i: usize) -> Vec<Scalar> {
    let mut e = vec![Scalar::ZERO; d];
    e[i] = Scalar::ONE;
    e
}

/// Key functionals (in transformed coordinates) and sources for a vertex at
/// relative position `w`, or `None` when `w` is parallel to `e_d`.
fn keyed_recipe(w: &[Scalar]) -> Option<Vec<(Vec<Scalar>, Source)>> {
    let d = w.len();
    let last = &w[d - 1];
    let m = (0..d - 1).find(|&i| !w[i].is_zero())?;
    let mut comps = Vec::with_capacity(d);
    for (i, alpha) in w.iter().enumerate().take(d - 1) {
        // f = x_i - beta x_d
        let (beta, src) = if !last.is_zero() {
            (alpha / last, Source::P1)
        } else {
            (alpha / &(last - &Scalar::ONE), Source::P2)
        };
        let mut f = unit(d, i);
        f[d - 1] = -beta;
        comps.push((f, src));
    }
    if last.is_zero() {
        comps.push((unit(d, d - 1), Source::P1));
    } else if *last == Scalar::ONE {
        comps.push((unit(d, d - 1), Source::P2));
    } else {
        let mut f = unit(d, d - 1);
        f[m] = -(&(last - &Scalar::ONE) / &w[m]);
        comps.push((f, Source::P2));
    }
    Some(comps)
}

fn build_plan(
    pattern: &Pattern,
    classes: &[DirectionClass],
    class: usize,
    base_only: bool,
    config: CompileConfig,
    catalog: &mut Catalog,
) -> RoundPlan {
    let d = pattern.dim();
    let k = pattern.len();
    let pairs = classes[class].pairs.clone();
    let base = pairs
        .iter()
        .copied()
        .find(|&(a, b)| is_ordinary(pattern, a, b))
        .unwrap_or(pairs[0]);
    let v = linalg::sub(pattern.vertex(base.1), pattern.vertex(base.0));
    let matrix = align_matrix(&v);
    let transverse = (0..d - 1).map(|i| catalog.intern(matrix.row(i).to_vec())).collect();
    catalog.intern(matrix.row(d - 1).to_vec());

    let mut schemas: Vec<Vec<usize>> = Vec::new();
    let mut roles = Vec::new();
    let role_pairs: Vec<usize> = if base_only {
        vec![pairs.iter().position(|&p| p == base).unwrap()]
    } else {
        (0..pairs.len()).collect()
    };
    for u in role_pairs {
        let (a, b) = pairs[u];
        let h_ab = matrix.apply(&linalg::sub(pattern.vertex(b), pattern.vertex(a)))[d - 1].clone();
        let mut orderings = vec![if h_ab.is_positive() { (a, b) } else { (b, a) }];
        if config.allow_negative_scale {
            orderings.push((orderings[0].1, orderings[0].0));
        }
        for (r, t) in orderings {
            let h = matrix.apply(&linalg::sub(pattern.vertex(t), pattern.vertex(r)))[d - 1].clone();
            let recipes = (0..k)
                .map(|j| {
                    if j == r {
                        return VertexRecipe::Anchor;
                    }
                    if j == t {
                        return VertexRecipe::Partner;
                    }
                    let w: Vec<Scalar> = matrix
                        .apply(&linalg::sub(pattern.vertex(j), pattern.vertex(r)))
                        .iter()
                        .map(|x| x / &h)
                        .collect();
                    match keyed_recipe(&w) {
                        None => VertexRecipe::Companion { c: w[d - 1].clone() },
                        Some(comps) => {
                            let originals: Vec<Vec<Scalar>> =
                                comps.iter().map(|(f, _)| pull_back(&matrix, f)).collect();
                            assert!(
                                !linalg::determinant(&originals).is_zero(),
                                "recipe functionals must be independent"
                            );
                            let ids: Vec<usize> = originals.into_iter().map(|f| catalog.intern(f)).collect();
                            let schema = match schemas.iter().position(|s| *s == ids) {
                                Some(s) => s,
                                None => {
                                    schemas.push(ids);
                                    schemas.len() - 1
                                }
                            };
                            VertexRecipe::Keyed {
                                schema,
                                sources: comps.into_iter().map(|(_, s)| s).collect(),
                            }
                        }
                    }
                })
                .collect();
            roles.push(Role {
                r,
                t,
                h,
                pair: u,
                recipes,
            });
        }
    }
    RoundPlan {
        class,
        base,
        matrix,
        transverse,
        pairs,
        roles,
        schemas,
    }
}

/// Compiles `pattern` into round plans. Deterministic: equal inputs give
/// equal plans.
pub fn compile_pattern(pattern: &Pattern, config: CompileConfig) -> Result<CompiledPattern> {
    let d = pattern.dim();
    let k = pattern.len();
    let vertex_rank = linalg::rank(
        &pattern.vertices()[1..]
            .iter()
            .map(|v| linalg::sub(v, pattern.vertex(0)))
            .collect::<Vec<_>>(),
    );
    if k >= 3 && vertex_rank < d {
        return Err(Error::InvalidPattern(format!(
            "pattern spans only {vertex_rank} of {d} dimensions"
        )));
    }
    let classes = direction_classes(pattern);
    let mut catalog = Catalog::default();

    if k == 2 || d == 1 {
        let plan = build_plan(pattern, &classes, 0, true, config, &mut catalog);
        return Ok(CompiledPattern {
            pattern: pattern.clone(),
            config,
            strategy: Strategy::PairScan,
            safety: Safety::DeletionSafe,
            classes,
            plans: vec![plan],
            catalog: catalog.functionals,
        });
    }

    // classes holding an ordinary pair first, so base pairs avoid companions
    let mut preference: Vec<usize> = (0..classes.len()).collect();
    preference.sort_by_key(|&c| !classes[c].pairs.iter().any(|&(a, b)| is_ordinary(pattern, a, b)));
    let covering: Vec<usize> = preference.iter().copied().filter(|&c| classes[c].covers(k)).collect();
    let safe = independent_prefix(&classes, &covering, d);
    let (safety, order) = if safe.len() == d {
        (Safety::DeletionSafe, safe)
    } else {
        let mut order = independent_prefix(&classes, &preference, d);
        let rest: Vec<usize> = preference.iter().copied().filter(|c| !order.contains(c)).collect();
        order.extend(rest);
        (Safety::NeedsSafeMode, order)
    };
    let plans = order
        .into_iter()
        .map(|c| build_plan(pattern, &classes, c, false, config, &mut catalog))
        .collect();
    Ok(CompiledPattern {
        pattern: pattern.clone(),
        config,
        strategy: Strategy::Rounds,
        safety,
        classes,
        plans,
        catalog: catalog.functionals,
    })
}
