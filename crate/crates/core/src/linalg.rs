//! Tiny exact linear algebra over [`Scalar`]: only what the pattern compiler
//! needs (rank, determinant, matrix-vector products on d <= 6).

use crate::scalar::Scalar;

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    dim: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Scalar::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Scalar::ONE;
        }
        Matrix { dim, entries }
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Matrix {
            dim,
            entries: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Scalar] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.dim)
    }

    pub fn determinant(&self) -> Scalar {
        determinant(&self.rows())
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Scalar::ZERO;
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    acc
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(v: &[Scalar], s: &Scalar) -> Vec<Scalar> {
    v.iter().map(|x| x * s).collect()
}

/// Row-echelon reduction in place; returns the rank.
fn eliminate(rows: &mut [Vec<Scalar>]) -> (usize, Scalar) {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut det = Scalar::ONE;
    for col in 0..n_cols {
        let Some(pivot) = (rank..n_rows).find(|&r| !rows[r][col].is_zero()) else {
            det = Scalar::ZERO;
            continue;
        };
        if pivot != rank {
            rows.swap(pivot, rank);
            det = -det;
        }
        let p = rows[rank][col].clone();
        det = &det * &p;
        let (top, below) = rows.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in below {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &p;
            for (x, y) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x = &*x - &(&factor * y);
            }
        }
        rank += 1;
        if rank == n_rows {
            break;
        }
    }
    (rank, det)
}

pub fn rank(vectors: &[Vec<Scalar>]) -> usize {
    let mut rows = vectors.to_vec();
    eliminate(&mut rows).0
}

pub fn determinant(rows: &[Vec<Scalar>]) -> Scalar {
    assert!(rows.iter().all(|r| r.len() == rows.len()), "determinant needs a square matrix");
    let mut rows = rows.to_vec();
    let (rank, det) = eliminate(&mut rows);
    if rank < rows.len() {
        Scalar::ZERO
    } else {
        det
    }
}

/// True when `u` and `v` (both nonzero) are parallel.
pub fn parallel(u: &[Scalar], v: &[Scalar]) -> bool {
    rank(&[u.to_vec(), v.to_vec()]) < 2
}

/// Scales a nonzero vector so that its first nonzero component is 1.
pub fn normalize_direction(v: &[Scalar]) -> Vec<Scalar> {
    let lead = v.iter().find(|x| !x.is_zero()).expect("zero vector has no direction");
    v.iter().map(|x| x / lead).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect()
    }

    #[test]
    fn determinant_and_rank() {
        assert_eq!(determinant(&ints(&[&[1, 2], &[3, 4]])), Scalar::from_int(-2));
        assert_eq!(determinant(&ints(&[&[0, 1], &[1, 0]])), Scalar::from_int(-1));
        assert_eq!(determinant(&ints(&[&[2, 0, 0], &[0, 3, 0], &[1, 1, 1]])), Scalar::from_int(6));
        assert_eq!(determinant(&ints(&[&[1, 1], &[2, 2]])), Scalar::ZERO);
        assert_eq!(rank(&ints(&[&[1, 1], &[2, 2]])), 1);
        assert_eq!(rank(&ints(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0]])), 2);
        assert_eq!(rank(&ints(&[&[0, 0]])), 0);
    }

    #[test]
    fn parallel_and_normalized() {
        let u = ints(&[&[2, -4]]).remove(0);
        let v = ints(&[&[-1, 2]]).remove(0);
        assert!(parallel(&u, &v));
        assert_eq!(normalize_direction(&u), normalize_direction(&v));
        assert!(!parallel(&u, &ints(&[&[1, 2]])[0]));
    }
}
