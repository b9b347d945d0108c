use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};

/// Dense square matrix over an exact ring or field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { n: self.n, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Clone + Num> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).fold(T::zero(), |acc, k| acc + self.get(i, k).clone() * other.get(k, j).clone()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i).is_one() && (i + 1..self.n).all(|j| self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i).clone()).collect()
    }

    /// Fraction-free (Bareiss) elimination with row pivoting; every division is exact.
    pub fn det_bareiss(&self) -> T {
        let n = self.n;
        if n == 0 {
            return T::one();
        }
        let mut a = self.data.clone();
        let mut negate = false;
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                    Some(r) => {
                        for j in 0..n {
                            a.swap(k * n + j, r * n + j);
                        }
                        negate = !negate;
                    }
                    None => return T::zero(),
                }
            }
            let pivot = a[k * n + k].clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[i * n + j].clone() * pivot.clone() - a[i * n + k].clone() * a[k * n + j].clone();
                    a[i * n + j] = v / prev.clone();
                }
            }
            prev = pivot;
        }
        let d = a[n * n - 1].clone();
        if negate {
            T::zero() - d
        } else {
            d
        }
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = self.data[i * self.n..(i + 1) * self.n].iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn to_rational(m: &Matrix<BigInt>) -> Matrix<BigRational> {
    m.map(|v| BigRational::from_integer(v.clone()))
}

/// Exact determinant of a rational matrix: rows are scaled to integers and
/// eliminated fraction-free.
pub fn det_exact(m: &Matrix<BigRational>) -> BigRational {
    let n = m.dim();
    let mut scale = BigInt::one();
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        let l = m.row(i).iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        for v in m.row(i) {
            rows.push(v.numer() * (&l / v.denom()));
        }
        scale *= l;
    }
    let int = Matrix::from_fn(n, |i, j| rows[i * n + j].clone());
    BigRational::new(int.det_bareiss(), scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(rows: &[&[i64]]) -> Matrix<BigInt> {
        Matrix::from_fn(rows.len(), |i, j| BigInt::from(rows[i][j]))
    }

    #[test]
    fn small_determinants() {
        assert_eq!(Matrix::<BigInt>::identity(4).det_bareiss(), BigInt::one());
        assert_eq!(Matrix::<BigInt>::zeros(0).det_bareiss(), BigInt::one());
        assert_eq!(int(&[&[1, 1], &[1, 3]]).det_bareiss(), BigInt::from(2));
        // zero pivot forces a swap
        assert_eq!(int(&[&[0, 1, 2], &[3, 4, 5], &[6, 7, 9]]).det_bareiss(), BigInt::from(-3));
        assert_eq!(int(&[&[1, 2], &[2, 4]]).det_bareiss(), BigInt::zero());
    }

    #[test]
    fn rational_fallback_matches_cofactor() {
        let r = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
        let m = Matrix::from_fn(2, |i, j| [[r(1, 2), r(1, 3)], [r(2, 5), r(7, 4)]][i][j].clone());
        assert_eq!(det_exact(&m), r(1, 2) * r(7, 4) - r(1, 3) * r(2, 5));
        let direct = m.det_bareiss();
        assert_eq!(direct, det_exact(&m));
    }
}
