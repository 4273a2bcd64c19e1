//! Small dense square matrices and vectors over any [`Real`] scalar.

use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    pub fn diag(d: &[T]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, o: &Mat<T>) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| {
            (0..n).fold(T::zero(), |acc, k| acc + self.get(i, k) * o.get(k, j))
        })
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::zero(), |acc, j| acc + self.get(i, j) * v[j]))
            .collect()
    }

    pub fn add(&self, o: &Mat<T>) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j) + o.get(i, j))
    }

    pub fn sub(&self, o: &Mat<T>) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j) - o.get(i, j))
    }

    pub fn scaled(&self, c: T) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j) * c)
    }

    /// Entrywise sum of squares, |E|^2 in an orthonormal frame.
    pub fn frob_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    /// tr(E^2) = sum_ij E_ij E_ji.
    pub fn trace_sq(&self) -> T {
        let n = self.n;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.get(i, j) * self.get(j, i);
            }
        }
        acc
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.val().is_finite())
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

pub fn outer<T: Real>(a: &[T], b: &[T]) -> Mat<T> {
    Mat::from_fn(a.len(), |i, j| a[i] * b[j])
}

pub fn axpy<T: Real>(alpha: T, x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&xi, &yi)| alpha * xi + yi).collect()
}

pub fn scale_vec<T: Real>(alpha: T, x: &[T]) -> Vec<T> {
    x.iter().map(|&xi| alpha * xi).collect()
}

pub fn sub_vec<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_sq_and_frobenius_differ_for_nonsymmetric() {
        let m = Mat::from_fn(2, |i, j| [[1.0, 2.0], [0.0, 3.0]][i][j]);
        assert_eq!(m.trace_sq(), 1.0 + 9.0);
        assert_eq!(m.frob_sq(), 1.0 + 4.0 + 9.0);
        assert_eq!(m.matmul(&m).trace(), m.trace_sq());
    }
}
