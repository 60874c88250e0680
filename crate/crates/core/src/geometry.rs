//! Points, point sets, patterns and linear functionals.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Largest supported pattern size.
pub const K_MAX: usize = 12;
/// Largest supported ambient dimension.
pub const D_MAX: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub coords: Vec<Scalar>,
    /// Position of the (first) occurrence of this point in the input.
    pub index: usize,
}

/// A deduplicated set of points in a common dimension.
///
/// Points keep the order of their first occurrence; `provenance(i)` lists
/// every input position that carried the coordinates of point `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
    provenance: Vec<Vec<usize>>,
}

impl PointSet {
    /// Deduplicates raw coordinate tuples, checking that they share one arity.
    pub fn normalize(raw: Vec<Vec<Scalar>>) -> Result<Self> {
        let dim = raw.first().map(Vec::len).ok_or(Error::EmptyInput)?;
        Self::with_dim(dim, raw)
    }

    /// Like [`PointSet::normalize`] but accepts an empty input of known dimension.
    pub fn with_dim(dim: usize, raw: Vec<Vec<Scalar>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedDimension {
                dim,
                reason: "points need at least one coordinate",
            });
        }
        let mut seen: HashMap<Vec<Scalar>, usize> = HashMap::with_capacity(raw.len());
        let mut points = Vec::new();
        let mut provenance: Vec<Vec<usize>> = Vec::new();
        for (index, coords) in raw.into_iter().enumerate() {
            if coords.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: coords.len(),
                });
            }
            match seen.get(&coords) {
                Some(&rep) => provenance[rep].push(index),
                None => {
                    seen.insert(coords.clone(), points.len());
                    points.push(Point { coords, index });
                    provenance.push(vec![index]);
                }
            }
        }
        Ok(PointSet {
            dim,
            points,
            provenance,
        })
    }

    /// Convenience constructor for integer coordinates.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::normalize(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn coords(&self, id: usize) -> &[Scalar] {
        &self.points[id].coords
    }

    /// Input position reported for point `id`.
    pub fn input_index(&self, id: usize) -> usize {
        self.points[id].index
    }

    pub fn provenance(&self, id: usize) -> &[usize] {
        &self.provenance[id]
    }

    /// Applies `f` to every point, keeping input indices. Panics if the
    /// image of two distinct points coincides (only injective maps allowed).
    pub fn map_points(&self, mut f: impl FnMut(&[Scalar]) -> Vec<Scalar>) -> PointSet {
        let points: Vec<Point> = self
            .points
            .iter()
            .map(|p| Point {
                coords: f(&p.coords),
                index: p.index,
            })
            .collect();
        let dim = points.first().map_or(self.dim, |p| p.coords.len());
        PointSet {
            dim,
            points,
            provenance: self.provenance.clone(),
        }
    }
}

/// Deduplicates raw points, retaining provenance. No coordinate shift is
/// applied: negative coordinates are accepted as they are.
pub fn normalize_input(raw: Vec<Vec<Scalar>>) -> Result<PointSet> {
    PointSet::normalize(raw)
}

/// `f(x) = sum_i coeffs[i] * x[i]` with a nonzero coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearFunctional {
    coeffs: Vec<Scalar>,
}

impl LinearFunctional {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        assert!(coeffs.iter().any(|c| !c.is_zero()), "functional must be nonzero");
        LinearFunctional { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    /// The coordinate projection `x_axis` in dimension `dim`.
    pub fn axis(dim: usize, axis: usize) -> Self {
        let mut coeffs = vec![Scalar::ZERO; dim];
        coeffs[axis] = Scalar::ONE;
        LinearFunctional { coeffs }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Rescaled so the first nonzero coefficient is 1. Equality of values is
    /// invariant under this rescaling, so labels may use it.
    pub fn normalized(&self) -> Self {
        LinearFunctional {
            coeffs: linalg::normalize_direction(&self.coeffs),
        }
    }

    /// Exact evaluation; `x` must have the functional's arity.
    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        linalg::dot(&self.coeffs, x)
    }
}

impl fmt::Debug for LinearFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{:?}", self.coeffs)
    }
}

/// Evaluates `f` at `p`, checking arities.
pub fn functional_eval(f: &LinearFunctional, p: &[Scalar]) -> Result<Scalar> {
    if f.dim() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: p.len(),
        });
    }
    Ok(f.eval(p))
}

/// A fixed pattern `q_0 .. q_{k-1}` whose homothetic copies are sought.
///
/// Vertices are pairwise distinct and `2 <= k <= K_MAX`. Patterns with three
/// or more vertices must be full-dimensional; two-point patterns are accepted
/// in any dimension and handled by a dedicated pair scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    dim: usize,
    vertices: Vec<Vec<Scalar>>,
}

impl Pattern {
    pub fn new(vertices: Vec<Vec<Scalar>>) -> Result<Self> {
        let k = vertices.len();
        if !(2..=K_MAX).contains(&k) {
            return Err(Error::InvalidPattern(format!(
                "pattern has {k} vertices, supported range is 2..={K_MAX}"
            )));
        }
        let dim = vertices[0].len();
        if !(1..=D_MAX).contains(&dim) {
            return Err(Error::UnsupportedDimension {
                dim,
                reason: "pattern dimension must be in 1..=6",
            });
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        for i in 0..k {
            for j in i + 1..k {
                if vertices[i] == vertices[j] {
                    return Err(Error::InvalidPattern(format!(
                        "vertices {i} and {j} coincide"
                    )));
                }
            }
        }
        if k >= 3 {
            let diffs: Vec<Vec<Scalar>> =
                vertices[1..].iter().map(|v| linalg::sub(v, &vertices[0])).collect();
            let rank = linalg::rank(&diffs);
            if rank < dim {
                return Err(Error::InvalidPattern(format!(
                    "pattern spans only {rank} of {dim} dimensions"
                )));
            }
        }
        Ok(Pattern { dim, vertices })
    }

    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    /// The unit hypercube `{0,1}^dim`, vertex `c` having bit `i` of `c` as
    /// its `i`-th coordinate.
    pub fn unit_cube(dim: usize) -> Self {
        let vertices = (0..1usize << dim)
            .map(|c| {
                (0..dim)
                    .map(|i| Scalar::from_int(((c >> i) & 1) as i64))
                    .collect()
            })
            .collect();
        Pattern { dim, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, j: usize) -> &[Scalar] {
        &self.vertices[j]
    }

    pub fn vertices(&self) -> &[Vec<Scalar>] {
        &self.vertices
    }

    /// The point reflection `-Q`.
    pub fn reflected(&self) -> Pattern {
        Pattern {
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(|x| -x).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    #[test]
    fn normalize_dedups_with_provenance() {
        let set = PointSet::from_ints(&[[0, 0], [0, 0], [1, 1]]).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.provenance(0), &[0, 1]);
        assert_eq!(set.provenance(1), &[2]);
        assert_eq!(set.input_index(1), 2);
    }

    #[test]
    fn negative_coordinates_are_kept() {
        let set = PointSet::from_ints(&[[-5, -5], [0, 0]]).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.coords(0), &[s(-5), s(-5)]);
    }

    #[test]
    fn mixed_arity_is_rejected() {
        let raw = vec![vec![s(0), s(0)], vec![s(1), s(2), s(3)]];
        assert!(matches!(
            normalize_input(raw),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(normalize_input(vec![]), Err(Error::EmptyInput)));
    }

    #[test]
    fn functional_evaluation() {
        let p = [s(2), s(5)];
        assert_eq!(functional_eval(&LinearFunctional::from_ints(&[1, 1]), &p).unwrap(), s(7));
        assert_eq!(functional_eval(&LinearFunctional::from_ints(&[-1, 1]), &p).unwrap(), s(3));
        assert_eq!(functional_eval(&LinearFunctional::from_ints(&[1, 0]), &p).unwrap(), s(2));
        assert!(functional_eval(&LinearFunctional::from_ints(&[1, 0, 0]), &p).is_err());
    }

    #[test]
    fn pattern_validation() {
        assert!(Pattern::from_ints(&[[0, 0], [1, 0], [0, 1]]).is_ok());
        assert!(matches!(
            Pattern::from_ints(&[[0, 0], [1, 1], [2, 2]]),
            Err(Error::InvalidPattern(_))
        ));
        assert!(matches!(
            Pattern::from_ints(&[[0, 0], [0, 0], [1, 0]]),
            Err(Error::InvalidPattern(_))
        ));
        assert!(matches!(Pattern::from_ints(&[[0, 0]]), Err(Error::InvalidPattern(_))));
        // two-point patterns need not be full-dimensional
        assert!(Pattern::from_ints(&[[0, 0], [1, 1]]).is_ok());
        assert_eq!(Pattern::unit_cube(2).vertices().len(), 4);
        assert_eq!(Pattern::unit_cube(3).vertex(5), &[s(1), s(0), s(1)]);
    }
}
