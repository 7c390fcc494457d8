use std::ops::{Add, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense real symmetric matrix with finite entries.
///
/// Construction checks symmetry exactly, so every value of this type can be
/// fed to the solvers without further validation.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T: Real> {
    data: DMatrix<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    /// Wraps a dense matrix after checking squareness, symmetry, and finiteness.
    pub fn new(data: DMatrix<T>) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        for j in 0..cols {
            for i in 0..rows {
                let v = data[(i, j)];
                if !v.is_finite_value() {
                    return Err(Error::NonFinite { i, j });
                }
                if i < j && v != data[(j, i)] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { data })
    }

    /// Builds the matrix from its upper triangle (diagonal included).
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.is_finite_value() {
                    return Err(Error::NonFinite { i, j });
                }
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Ok(Self { data })
    }

    /// Symmetric part `(A + Aᵀ)/2` of an arbitrary square matrix.
    pub fn symmetrize(a: &DMatrix<T>) -> Result<Self> {
        let (rows, cols) = a.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        let half = T::lit(0.5);
        Self::from_upper_fn(rows, |i, j| {
            if i == j {
                a[(i, i)]
            } else {
                (a[(i, j)] + a[(j, i)]) * half
            }
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: DMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { data: DMatrix::identity(n, n) }
    }

    /// All-ones matrix `𝟙𝟙ᵀ`.
    pub fn ones(n: usize) -> Self {
        Self { data: DMatrix::from_element(n, n, T::one()) }
    }

    pub fn from_diagonal(d: &[T]) -> Result<Self> {
        let n = d.len();
        Self::from_upper_fn(n, |i, j| if i == j { d[i] } else { T::zero() })
    }

    /// `c · x xᵀ`.
    pub fn outer(x: &[T], c: T) -> Result<Self> {
        Self::from_upper_fn(x.len(), |i, j| c * x[i] * x[j])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<T> {
        self.data
    }

    /// Column `j`, which by symmetry is also row `j`, as a contiguous slice.
    #[inline]
    pub fn column_slice(&self, j: usize) -> &[T] {
        let n = self.n();
        &self.data.as_slice()[j * n..(j + 1) * n]
    }

    pub fn trace(&self) -> T {
        self.data.trace()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n()).map(|i| self.data[(i, i)]).collect()
    }

    /// Frobenius inner product `⟨self, x⟩ = Σᵢⱼ selfᵢⱼ xᵢⱼ`.
    pub fn inner(&self, x: &DMatrix<T>) -> T {
        self.data.dot(x)
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { data: &self.data * c }
    }

    /// Copy with every diagonal entry set to zero.
    pub fn with_zero_diagonal(&self) -> Self {
        let mut data = self.data.clone();
        data.fill_diagonal(T::zero());
        Self { data }
    }

    /// `self + diag(d)`.
    pub fn add_diagonal(&self, d: &[T]) -> Result<Self> {
        if d.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: d.len() });
        }
        let mut data = self.data.clone();
        for (i, &v) in d.iter().enumerate() {
            data[(i, i)] += v;
        }
        Self::new(data)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.norm()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == T::zero())
    }

    /// Sum of all entries, `𝟙ᵀ self 𝟙`.
    pub fn total_sum(&self) -> T {
        self.data.sum()
    }

    pub fn mul_vec(&self, x: &DVector<T>) -> DVector<T> {
        &self.data * x
    }

    /// Elementwise conversion to another scalar type.
    pub fn cast<U: Real>(&self) -> SymmetricMatrix<U> {
        SymmetricMatrix { data: self.data.map(|v| U::lit(v.as_f64())) }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self { data: &self.data - &other.data })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self { data: &self.data + &other.data })
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }
}

impl<T: Real> Sub for &SymmetricMatrix<T> {
    type Output = SymmetricMatrix<T>;

    /// Panics on a dimension mismatch; use [`SymmetricMatrix::checked_sub`]
    /// when shapes come from user input.
    fn sub(self, rhs: Self) -> SymmetricMatrix<T> {
        self.checked_sub(rhs).expect("matrix dimensions agree")
    }
}

impl<T: Real> Add for &SymmetricMatrix<T> {
    type Output = SymmetricMatrix<T>;

    fn add(self, rhs: Self) -> SymmetricMatrix<T> {
        self.checked_add(rhs).expect("matrix dimensions agree")
    }
}

impl<T: Real> Neg for &SymmetricMatrix<T> {
    type Output = SymmetricMatrix<T>;

    fn neg(self) -> SymmetricMatrix<T> {
        SymmetricMatrix { data: -&self.data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(SymmetricMatrix::new(m), Err(Error::NotSymmetric { i: 0, j: 1 }));
    }

    #[test]
    fn rejects_nan_and_non_square() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, f64::NAN, 4.0]);
        assert!(matches!(SymmetricMatrix::new(m), Err(Error::NonFinite { .. })));
        let r = DMatrix::<f64>::zeros(2, 3);
        assert_eq!(SymmetricMatrix::new(r), Err(Error::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn inner_and_trace() {
        let a = SymmetricMatrix::from_diagonal(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(a.trace(), 6.0);
        assert_eq!(a.inner(&DMatrix::identity(3, 3)), 6.0);
        let ones = SymmetricMatrix::<f64>::ones(3);
        assert_eq!(ones.total_sum(), 9.0);
        assert_eq!(ones.with_zero_diagonal().total_sum(), 6.0);
    }

    #[test]
    fn column_slice_is_row() {
        let a = SymmetricMatrix::from_upper_fn(3, |i, j| (i * 3 + j) as f64).unwrap();
        let c = a.column_slice(1);
        assert_eq!(c, &[a.get(1, 0), a.get(1, 1), a.get(1, 2)]);
    }
}
