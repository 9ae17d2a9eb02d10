//! Dense matrices over the Gaussian rationals with exact elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::{GaussianRational, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct GMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl GMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GMatrix {
            rows,
            cols,
            data: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = GaussianRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        GMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussianRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        GMatrix { rows, cols, data }
    }

    /// Integer matrix shorthand, row major.
    pub fn from_ints(rows: Vec<Vec<i64>>) -> Self {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(GaussianRational::from_int).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[GaussianRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.adjoint()
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * s)
    }

    pub fn matmul(&self, rhs: &GMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows);
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = GaussianRational::zero();
            for k in 0..self.cols {
                if !self[(i, k)].is_zero() && !rhs[(k, j)].is_zero() {
                    acc += &(&self[(i, k)] * &rhs[(k, j)]);
                }
            }
            acc
        })
    }

    pub fn trace(&self) -> GaussianRational {
        assert_eq!(self.rows, self.cols);
        let mut acc = GaussianRational::zero();
        for i in 0..self.rows {
            acc += &self[(i, i)];
        }
        acc
    }

    /// Column-stacked vectorization: columns of `self` concatenated top to bottom.
    pub fn vectorize(&self) -> Vec<GaussianRational> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)].clone());
            }
        }
        v
    }

    /// Exact rank via fraction-free (Bareiss) elimination with first-nonzero
    /// pivoting. Rows are scaled to Gaussian integers first so every interior
    /// division is exact.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        for i in 0..m.rows {
            let mut l = BigInt::one();
            for j in 0..m.cols {
                let e = &m[(i, j)];
                l = l.lcm(e.re.denom());
                l = l.lcm(e.im.denom());
            }
            if !l.is_one() {
                let s = GaussianRational::from_real(Rational::from_integer(l));
                for j in 0..m.cols {
                    let v = &m[(i, j)] * &s;
                    m[(i, j)] = v;
                }
            }
        }
        let mut prev = GaussianRational::one();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            if p != rank {
                for j in 0..m.cols {
                    m.data.swap(rank * m.cols + j, p * m.cols + j);
                }
            }
            let pivot = m[(rank, col)].clone();
            for i in rank + 1..m.rows {
                let head = m[(i, col)].clone();
                for j in col + 1..m.cols {
                    let num = &pivot * &m[(i, j)] - &head * &m[(rank, j)];
                    m[(i, j)] = &num / &prev;
                }
                m[(i, col)] = GaussianRational::zero();
            }
            prev = pivot;
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form over the field, returning the pivot columns.
    pub fn rref(&self) -> (GMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(r * m.cols + j, p * m.cols + j);
                }
            }
            let inv = m[(r, col)].checked_recip().expect("nonzero pivot");
            for j in col..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, col)].is_zero() {
                    continue;
                }
                let f = m[(i, col)].clone();
                for j in col..m.cols {
                    let v = &m[(i, j)] - &(&f * &m[(r, j)]);
                    m[(i, j)] = v;
                }
            }
            pivots.push(col);
            r += 1;
        }
        (m, pivots)
    }

    /// Basis of the right null space, one vector per free column, scaled to
    /// coprime Gaussian integers for stable presentation.
    pub fn null_space(&self) -> Vec<Vec<GaussianRational>> {
        let (rr, pivots) = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![GaussianRational::zero(); self.cols];
            v[free] = GaussianRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&rr[(row, free)];
            }
            basis.push(integer_scaled(v));
        }
        basis
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect()
    }
}

/// Scales a rational vector by a positive rational so its entries become
/// Gaussian integers with no common integer factor.
pub fn integer_scaled(v: Vec<GaussianRational>) -> Vec<GaussianRational> {
    let mut l = BigInt::one();
    for e in &v {
        l = l.lcm(e.re.denom());
        l = l.lcm(e.im.denom());
    }
    let mut g = BigInt::zero();
    for e in &v {
        g = g.gcd(&(e.re.numer() * &l / e.re.denom()));
        g = g.gcd(&(e.im.numer() * &l / e.im.denom()));
    }
    if g.is_zero() {
        return v;
    }
    let s = GaussianRational::from_real(Rational::new(l, g.abs()));
    v.into_iter().map(|e| &e * &s).collect()
}

impl Index<(usize, usize)> for GMatrix {
    type Output = GaussianRational;
    fn index(&self, (i, j): (usize, usize)) -> &GaussianRational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for GMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GaussianRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for GMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(
                f,
                "[{}]",
                (0..self.cols)
                    .map(|j| self[(i, j)].to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        Ok(())
    }
}

impl serde::Serialize for GMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<&GaussianRational>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for GMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<GaussianRational>>::deserialize(d)?;
        if rows.is_empty() {
            return Ok(GMatrix::zeros(0, 0));
        }
        let c = rows[0].len();
        if !rows.iter().all(|r| r.len() == c) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(GMatrix::from_rows(rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank() {
        assert_eq!(GMatrix::identity(4).rank(), 4);
    }

    #[test]
    fn rank_of_planted_products() {
        // rank-1 outer product
        let u = [1i64, -2, 3];
        let v = [2i64, 0, 5, 7];
        let m = GMatrix::from_fn(3, 4, |i, j| GaussianRational::from_int(u[i] * v[j]));
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_with_rational_and_complex_entries() {
        let m = GMatrix::from_rows(vec![
            vec![
                GaussianRational::from_ratio(1, 2),
                GaussianRational::from_ints(0, 1),
            ],
            vec![
                GaussianRational::from_ratio(1, 4),
                GaussianRational::new(
                    Rational::zero(),
                    Rational::new(BigInt::from(1), BigInt::from(2)),
                ),
            ],
        ]);
        // second row is half the first
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn null_space_dimension_and_orthogonality() {
        let m = GMatrix::from_ints(vec![vec![1, 1, 0, 0], vec![0, 0, 1, -1]]);
        let ns = m.null_space();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for i in 0..m.rows() {
                let mut acc = GaussianRational::zero();
                for j in 0..m.cols() {
                    acc += &(&m[(i, j)] * &v[j]);
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn bareiss_and_rref_agree_on_rank() {
        let mut seed = 12345u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..50 {
            let r = (next() % 4 + 1) as usize;
            let inner: Vec<Vec<i64>> = (0..5)
                .map(|_| (0..r).map(|_| (next() % 7) as i64 - 3).collect())
                .collect();
            let outer: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..5).map(|_| (next() % 7) as i64 - 3).collect())
                .collect();
            let m = GMatrix::from_fn(5, 5, |i, j| {
                let mut acc = 0i64;
                for k in 0..r {
                    acc += inner[i][k] * outer[k][j];
                }
                GaussianRational::from_int(acc)
            });
            let (_, pivots) = m.rref();
            assert_eq!(m.rank(), pivots.len());
        }
    }
}
