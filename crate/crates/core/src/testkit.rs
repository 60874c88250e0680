//! Brute-force oracles and deterministic instance generators.
//!
//! The oracles use nothing but exact coordinates and an ordered membership
//! index; they share no enumeration logic with the engines. Random
//! instances draw from `ChaCha8Rng::seed_from_u64(seed)` with
//! `random_range(0..range)` per coordinate, in point-major, axis-minor order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Pattern, PointSet, D_MAX};
use crate::scalar::Scalar;

/// Every point keyed by its exact coordinate tuple.
#[derive(Clone, Debug)]
pub struct MembershipIndex {
    map: BTreeMap<Vec<Scalar>, usize>,
}

impl MembershipIndex {
    pub fn new(points: &PointSet) -> Self {
        MembershipIndex {
            map: points
                .points()
                .iter()
                .map(|p| (p.coords.clone(), p.index))
                .collect(),
        }
    }

    /// Input index of the point at `coords`, if present.
    pub fn get(&self, coords: &[Scalar]) -> Option<usize> {
        self.map.get(coords).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Vertex-index tuples, one per copy.
pub type CopySet = BTreeSet<Vec<usize>>;

fn lines_along_last_axis(points: &PointSet) -> BTreeMap<Vec<Scalar>, Vec<&[Scalar]>> {
    let d = points.dim();
    let mut lines: BTreeMap<Vec<Scalar>, Vec<&[Scalar]>> = BTreeMap::new();
    for p in points.points() {
        lines.entry(p.coords[..d - 1].to_vec()).or_default().push(&p.coords);
    }
    for line in lines.values_mut() {
        line.sort_by(|a, b| a[d - 1].cmp(&b[d - 1]));
    }
    lines
}

/// All axis-parallel squares, as input indices in the order lower-left,
/// lower-right, upper-left, upper-right. `O(n^2 log n)`.
pub fn oracle_squares(points: &PointSet) -> Result<CopySet> {
    if points.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            dim: points.dim(),
            reason: "squares need planar input",
        });
    }
    let index = MembershipIndex::new(points);
    let mut out = CopySet::new();
    // columns: points sharing x, sorted by y
    let mut columns: BTreeMap<&Scalar, Vec<&Scalar>> = BTreeMap::new();
    for p in points.points() {
        columns.entry(&p.coords[0]).or_default().push(&p.coords[1]);
    }
    for (x, ys) in &mut columns {
        ys.sort();
        for i in 0..ys.len() {
            for j in i + 1..ys.len() {
                let (y1, y2) = (ys[i], ys[j]);
                let delta = y2 - y1;
                let at = |x: &Scalar, y: &Scalar| index.get(&[x.clone(), y.clone()]);
                let p1 = at(x, y1).unwrap();
                let p2 = at(x, y2).unwrap();
                let right = *x + &delta;
                if let (Some(a), Some(b)) = (at(&right, y1), at(&right, y2)) {
                    out.insert(vec![p1, a, p2, b]);
                }
                let left = *x - &delta;
                if let (Some(a), Some(b)) = (at(&left, y1), at(&left, y2)) {
                    out.insert(vec![a, p1, b, p2]);
                }
            }
        }
    }
    Ok(out)
}

/// All axis-parallel full-dimensional hypercubes, vertices in corner order:
/// corner `c` has coordinate `i` at the cube's maximum iff bit `i` of `c`
/// is set. `O(2^d n^2 log n)`.
pub fn oracle_hypercubes(points: &PointSet) -> Result<CopySet> {
    let d = points.dim();
    if !(2..=D_MAX).contains(&d) {
        return Err(Error::UnsupportedDimension {
            dim: d,
            reason: "hypercubes need 2 <= d <= 6",
        });
    }
    let index = MembershipIndex::new(points);
    let mut out = CopySet::new();
    for line in lines_along_last_axis(points).values() {
        for i in 0..line.len() {
            for j in i + 1..line.len() {
                let (t, r) = (line[i], line[j]);
                let delta = &r[d - 1] - &t[d - 1];
                for orientation in 0..1usize << (d - 1) {
                    // lowest corner of the cube spanned from (t, r)
                    let mut low: Vec<Scalar> = t.to_vec();
                    for (axis, c) in low.iter_mut().enumerate().take(d - 1) {
                        if orientation >> axis & 1 == 1 {
                            *c = &*c - &delta;
                        }
                    }
                    let vertices: Option<Vec<usize>> = (0..1usize << d)
                        .map(|corner| {
                            let v: Vec<Scalar> = (0..d)
                                .map(|a| {
                                    if corner >> a & 1 == 1 {
                                        &low[a] + &delta
                                    } else {
                                        low[a].clone()
                                    }
                                })
                                .collect();
                            index.get(&v)
                        })
                        .collect();
                    if let Some(v) = vertices {
                        out.insert(v);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All homothetic copies `s * Q + t` with `s > 0` (or `s != 0` when
/// `allow_negative_scale`), as input indices in pattern order. Every copy is
/// pinned down by the images of `q_0` and `q_1`, so all ordered pairs are
/// tried. `O(n^2 k log n)`.
pub fn oracle_copies(points: &PointSet, pattern: &Pattern, allow_negative_scale: bool) -> Result<CopySet> {
    if points.dim() != pattern.dim() {
        return Err(Error::DimensionMismatch {
            expected: pattern.dim(),
            found: points.dim(),
        });
    }
    let d = points.dim();
    let index = MembershipIndex::new(points);
    let (q0, q1) = (pattern.vertex(0), pattern.vertex(1));
    let dir: Vec<Scalar> = (0..d).map(|i| &q1[i] - &q0[i]).collect();
    let axis = (0..d).find(|&i| !dir[i].is_zero()).expect("distinct vertices");
    let mut out = CopySet::new();
    if points.len() < pattern.len() {
        return Ok(out);
    }
    for a in points.points() {
        for b in points.points() {
            if a.index == b.index {
                continue;
            }
            let s = &(&b.coords[axis] - &a.coords[axis]) / &dir[axis];
            if !(s.is_positive() || (allow_negative_scale && !s.is_zero())) {
                continue;
            }
            if (0..d).any(|i| &b.coords[i] - &a.coords[i] != &s * &dir[i]) {
                continue;
            }
            let t: Vec<Scalar> = (0..d).map(|i| &a.coords[i] - &(&s * &q0[i])).collect();
            let vertices: Option<Vec<usize>> = pattern
                .vertices()
                .iter()
                .map(|q| {
                    let v: Vec<Scalar> = (0..d).map(|i| &(&s * &q[i]) + &t[i]).collect();
                    index.get(&v)
                })
                .collect();
            if let Some(v) = vertices {
                out.insert(v);
            }
        }
    }
    Ok(out)
}

/// Parameters of a deterministic test instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceSpec {
    /// The full integer grid `{0..side-1}^dim`.
    Grid { side: usize, dim: usize },
    /// `n` draws of integer points, axis `i` uniform in `0..ranges[i]`;
    /// duplicates collapse, so the set may hold fewer than `n` points.
    Random { n: usize, ranges: Vec<i64>, seed: u64 },
    /// `columns` planar columns at `x = i * spacing`, each with `height`
    /// points at `y = 0..height-1`.
    TallColumns { columns: usize, height: usize, spacing: i64 },
    /// Points of `{0..side+pad-1}^dim` with at most one coordinate `>= side`:
    /// a grid whose rows and columns all extend into long arms.
    PaddedGrid { side: usize, pad: usize, dim: usize },
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::Grid { side, dim } => write!(f, "grid-{side}^{dim}"),
            InstanceSpec::Random { n, ranges, seed } => {
                let r: Vec<String> = ranges.iter().map(i64::to_string).collect();
                write!(f, "random-{n}-{}-s{seed}", r.join("x"))
            }
            InstanceSpec::TallColumns {
                columns,
                height,
                spacing,
            } => write!(f, "tall-{columns}x{height}-g{spacing}"),
            InstanceSpec::PaddedGrid { side, pad, dim } => write!(f, "padded-{side}+{pad}^{dim}"),
        }
    }
}

const MAX_GENERATED: usize = 50_000_000;

fn check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInstance(msg.to_string()))
    }
}

fn lattice(extent: usize, dim: usize, mut keep: impl FnMut(&[i64]) -> bool) -> Vec<Vec<Scalar>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; dim];
    loop {
        if keep(&cur) {
            out.push(cur.iter().map(|&c| Scalar::from_int(c)).collect());
        }
        // odometer, first axis fastest
        let mut axis = 0;
        loop {
            if axis == dim {
                return out;
            }
            cur[axis] += 1;
            if (cur[axis] as usize) < extent {
                break;
            }
            cur[axis] = 0;
            axis += 1;
        }
    }
}

/// Builds the point set described by `spec`. Same spec, same set.
pub fn generate(spec: &InstanceSpec) -> Result<PointSet> {
    match spec {
        InstanceSpec::Grid { side, dim } => {
            check(*side >= 1, "grid side must be positive")?;
            check((1..=D_MAX).contains(dim), "dimension must be in 1..=6")?;
            check(
                side.checked_pow(*dim as u32).is_some_and(|n| n <= MAX_GENERATED),
                "grid too large",
            )?;
            PointSet::normalize(lattice(*side, *dim, |_| true))
        }
        InstanceSpec::Random { n, ranges, seed } => {
            check(*n >= 1 && *n <= MAX_GENERATED, "point count out of range")?;
            check((1..=D_MAX).contains(&ranges.len()), "dimension must be in 1..=6")?;
            check(ranges.iter().all(|&r| r >= 1), "coordinate ranges must be positive")?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let raw = (0..*n)
                .map(|_| {
                    ranges
                        .iter()
                        .map(|&r| Scalar::from_int(rng.random_range(0..r)))
                        .collect()
                })
                .collect();
            PointSet::normalize(raw)
        }
        InstanceSpec::TallColumns {
            columns,
            height,
            spacing,
        } => {
            check(*columns >= 1 && *height >= 1, "columns and height must be positive")?;
            check(*spacing >= 1, "spacing must be positive")?;
            check(columns.saturating_mul(*height) <= MAX_GENERATED, "instance too large")?;
            let raw = (0..*columns)
                .flat_map(|c| {
                    (0..*height).map(move |y| {
                        vec![Scalar::from_int(c as i64 * spacing), Scalar::from_int(y as i64)]
                    })
                })
                .collect();
            PointSet::normalize(raw)
        }
        InstanceSpec::PaddedGrid { side, pad, dim } => {
            check(*side >= 1, "side must be positive")?;
            check((1..=D_MAX).contains(dim), "dimension must be in 1..=6")?;
            let extent = side + pad;
            check(
                extent.checked_pow(*dim as u32).is_some_and(|n| n <= MAX_GENERATED),
                "instance too large",
            )?;
            let side = *side as i64;
            PointSet::normalize(lattice(extent, *dim, |c| {
                c.iter().filter(|&&x| x >= side).count() <= 1
            }))
        }
    }
}

/// `copies` random positive-scale images of `pattern` (integer scale in
/// `1..=max_scale`, integer translation in `0..range`) mixed with `noise`
/// uniform points in `0..range`. Used to plant copies of patterns that a
/// uniform sample would rarely contain.
pub fn planted_instance(
    pattern: &Pattern,
    copies: usize,
    max_scale: i64,
    noise: usize,
    range: i64,
    seed: u64,
) -> Result<PointSet> {
    check(max_scale >= 1 && range >= 1, "scale and range must be positive")?;
    let d = pattern.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: Vec<Vec<Scalar>> = Vec::new();
    for _ in 0..copies {
        let s = Scalar::from_int(rng.random_range(1..=max_scale));
        let t: Vec<Scalar> = (0..d).map(|_| Scalar::from_int(rng.random_range(0..range))).collect();
        for q in pattern.vertices() {
            raw.push((0..d).map(|i| &(&s * &q[i]) + &t[i]).collect());
        }
    }
    for _ in 0..noise {
        raw.push((0..d).map(|_| Scalar::from_int(rng.random_range(0..range))).collect());
    }
    PointSet::with_dim(d, raw)
}

/// `sum_{j=1}^{m-1} j^d`: hypercubes (squares for `d = 2`) in the `m^d` grid.
pub fn grid_cube_count(m: u64, d: u32) -> u64 {
    (1..m).map(|j| j.pow(d)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_square_fixtures() {
        let unit = PointSet::from_ints(&[[0, 0], [1, 0], [0, 1], [1, 1]]).unwrap();
        assert_eq!(oracle_squares(&unit).unwrap().into_iter().collect::<Vec<_>>(), vec![vec![0, 1, 2, 3]]);
        let g3 = generate(&InstanceSpec::Grid { side: 3, dim: 2 }).unwrap();
        assert_eq!(oracle_squares(&g3).unwrap().len(), 5);
        assert_eq!(grid_cube_count(3, 2), 5);
    }

    #[test]
    fn oracle_cube_fixtures() {
        let g2 = generate(&InstanceSpec::Grid { side: 2, dim: 3 }).unwrap();
        let cubes = oracle_hypercubes(&g2).unwrap();
        assert_eq!(cubes.len(), 1);
        // the lattice enumerates with the first axis fastest, matching corner order
        assert_eq!(cubes.into_iter().next().unwrap(), (0..8).collect::<Vec<_>>());
        let g4 = generate(&InstanceSpec::Grid { side: 4, dim: 3 }).unwrap();
        assert_eq!(oracle_hypercubes(&g4).unwrap().len(), 36);
        assert_eq!(grid_cube_count(4, 3), 36);
        // a planar "hypercube" is a square
        let g5 = generate(&InstanceSpec::Grid { side: 5, dim: 2 }).unwrap();
        assert_eq!(oracle_hypercubes(&g5).unwrap(), oracle_squares(&g5).unwrap());
    }

    #[test]
    fn oracle_copy_fixtures() {
        let tri = Pattern::from_ints(&[[0, 0], [1, 0], [0, 1]]).unwrap();
        let g4 = generate(&InstanceSpec::Grid { side: 4, dim: 2 }).unwrap();
        assert_eq!(oracle_copies(&g4, &tri, false).unwrap().len(), 14);

        let own = PointSet::from_ints(&[[0, 0], [1, 0], [0, 1]]).unwrap();
        assert!(oracle_copies(&own, &tri, false).unwrap().contains(&vec![0, 1, 2]));

        let few = PointSet::from_ints(&[[0, 0], [1, 0]]).unwrap();
        assert!(oracle_copies(&few, &tri, false).unwrap().is_empty());

        let square = Pattern::unit_cube(2);
        assert_eq!(oracle_copies(&g4, &square, false).unwrap(), oracle_squares(&g4).unwrap());
        // negative scales add the point reflection's copies
        let with_neg = oracle_copies(&g4, &tri, true).unwrap();
        let reflected = oracle_copies(&g4, &tri.reflected(), false).unwrap();
        let mut union = oracle_copies(&g4, &tri, false).unwrap();
        union.extend(reflected);
        assert_eq!(with_neg, union);
    }

    #[test]
    fn generators() {
        assert_eq!(generate(&InstanceSpec::Grid { side: 3, dim: 2 }).unwrap().len(), 9);
        let spec = InstanceSpec::Random {
            n: 200,
            ranges: vec![40, 40],
            seed: 7,
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = InstanceSpec::Random {
            n: 200,
            ranges: vec![40, 40],
            seed: 8,
        };
        assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
        let tall = generate(&InstanceSpec::TallColumns {
            columns: 2,
            height: 10,
            spacing: 3,
        })
        .unwrap();
        assert_eq!(tall.len(), 20);
        let padded = generate(&InstanceSpec::PaddedGrid { side: 3, pad: 2, dim: 2 }).unwrap();
        assert_eq!(padded.len(), 25 - 4);
        assert!(generate(&InstanceSpec::Grid { side: 0, dim: 2 }).is_err());
        assert!(generate(&InstanceSpec::Random { n: 5, ranges: vec![], seed: 0 }).is_err());
    }
}
