use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Matrix;
use crate::boundary::StartSequence;

/// Memoized factorial table; binomials follow `C(m, k) = 0` unless `0 <= k <= m`.
#[derive(Clone, Debug)]
pub struct Binomials {
    fact: Vec<BigInt>,
}

impl Default for Binomials {
    fn default() -> Self {
        Self::new()
    }
}

impl Binomials {
    pub fn new() -> Self {
        Self { fact: vec![BigInt::one()] }
    }

    pub fn with_capacity(n: usize) -> Self {
        let mut b = Self::new();
        b.extend(n);
        b
    }

    fn extend(&mut self, n: usize) {
        while self.fact.len() <= n {
            let k = self.fact.len();
            let next = &self.fact[k - 1] * BigInt::from(k);
            self.fact.push(next);
        }
    }

    pub fn factorial(&mut self, n: usize) -> BigInt {
        self.extend(n);
        self.fact[n].clone()
    }

    pub fn binom(&mut self, m: i64, k: i64) -> BigInt {
        if k < 0 || m < 0 || k > m {
            return BigInt::zero();
        }
        let (m, k) = (m as usize, k as usize);
        self.extend(m);
        &self.fact[m] / (&self.fact[k] * &self.fact[m - k])
    }
}

pub fn binom(m: i64, k: i64) -> BigInt {
    if k < 0 || m < 0 || k > m {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(m), BigInt::from(k))
}

fn rat(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

/// `A_{ij} = C(a_i + j, j)`.
pub fn lgv_a(seq: &StartSequence) -> Matrix<BigInt> {
    let a = seq.a();
    let mut b = Binomials::with_capacity((seq.last() as usize) + seq.n());
    Matrix::from_fn(seq.n() + 1, |i, j| b.binom(a[i] + j as i64, j as i64))
}

/// `A~_{ij} = C(a~_i, j)`.
pub fn lgv_atilde(seq: &StartSequence) -> Matrix<BigInt> {
    let t = seq.tilde();
    let at = t.values();
    let mut b = Binomials::with_capacity(seq.last() as usize);
    Matrix::from_fn(seq.n() + 1, |i, j| b.binom(at[i], j as i64))
}

/// `Â_{ij} = C(n+1, b_i - j + 1)` for `i, j = 1..m`.
pub fn lgv_ahat(seq: &StartSequence) -> Matrix<BigInt> {
    let c = seq.complement();
    let bs = c.values();
    let n = seq.n() as i64;
    let mut b = Binomials::with_capacity(seq.n() + 1);
    Matrix::from_fn(c.m(), |i, j| b.binom(n + 1, bs[i] - (j as i64 + 1) + 1))
}

/// Matrix with its last column replaced by `col(i)`.
pub fn replace_last_column(m: &Matrix<BigInt>, col: impl Fn(usize) -> BigInt) -> Matrix<BigInt> {
    let n = m.dim();
    Matrix::from_fn(n, |i, j| if j + 1 == n { col(i) } else { m.get(i, j).clone() })
}

/// `A'`: last column `C(a_i + n - ℓ, n)` (exit through `(ℓ, n)`).
pub fn lgv_a_modified(seq: &StartSequence, ell: i64) -> Matrix<BigInt> {
    let n = seq.n() as i64;
    let a = seq.a().to_vec();
    replace_last_column(&lgv_a(seq), |i| binom(a[i] + n - ell, n))
}

/// `Â'`: last column `C(n - ℓ + 1, n + m - b_i)`.
pub fn lgv_ahat_modified(seq: &StartSequence, ell: i64) -> Matrix<BigInt> {
    let n = seq.n() as i64;
    let m = seq.m() as i64;
    let b = seq.complement().values().to_vec();
    replace_last_column(&lgv_ahat(seq), |i| binom(n - ell + 1, n + m - b[i]))
}

/// Closed-form `L⁻¹` with `L⁻¹ A` upper triangular.
pub fn lu_linv(seq: &StartSequence) -> Matrix<BigRational> {
    let a = seq.a();
    let dim = seq.n() + 1;
    Matrix::from_fn(dim, |i, j| {
        if j > i {
            return BigRational::zero();
        }
        let num: BigInt = (0..i).map(|s| int(a[i] - a[s])).product();
        let den: BigInt = (0..=i).filter(|&s| s != j).map(|s| int(a[j] - a[s])).product();
        BigRational::new(num, den)
    })
}

/// `U_ii = (1/i!) ∏_{s<i} (a_i - a_s)`.
pub fn u_diagonal(seq: &StartSequence) -> Vec<BigRational> {
    let a = seq.a();
    let mut b = Binomials::new();
    (0..=seq.n())
        .map(|i| {
            let num: BigInt = (0..i).map(|s| int(a[i] - a[s])).product();
            BigRational::new(num, b.factorial(i))
        })
        .collect()
}

/// Closed-form `L̂⁻¹` with `L̂⁻¹ Â` upper triangular (requires `m >= 1`).
pub fn lu_linv_hat(seq: &StartSequence) -> Matrix<BigRational> {
    let c = seq.complement();
    let b = c.values();
    let m = c.m();
    let nm = seq.n() as i64 + m as i64;
    let mut bin = Binomials::with_capacity(nm as usize);
    Matrix::from_fn(m, |i0, j0| {
        if j0 > i0 {
            return BigRational::zero();
        }
        // 1-based indices as in the closed form
        let (i, j) = (i0 + 1, j0 + 1);
        let mi = (m + 1 - i) as i64;
        let bi = b[i - 1];
        let bj = b[j - 1];
        let top = bin.binom(nm, bi) * bin.binom(nm - bi, mi);
        let bottom = bin.binom(nm, bj) * bin.binom(nm - bj, mi);
        let num: BigInt = (1..i).map(|s| int(bi - b[s - 1])).product();
        let den: BigInt = (1..=i).filter(|&s| s != j).map(|s| int(bj - b[s - 1])).product();
        BigRational::new(top * num, bottom * den)
    })
}

/// `Û_ii = C(n+i, b_i) ∏_{s<i} (b_i - b_s)/(n + i - b_s)`.
pub fn u_hat_diagonal(seq: &StartSequence) -> Vec<BigRational> {
    let c = seq.complement();
    let b = c.values();
    let n = seq.n() as i64;
    (1..=c.m())
        .map(|i| {
            let bi = b[i - 1];
            let ii = i as i64;
            (1..i).fold(rat(binom(n + ii, bi)), |acc, s| {
                acc * BigRational::new(int(bi - b[s - 1]), int(n + ii - b[s - 1]))
            })
        })
        .collect()
}

fn vandermonde(v: &[i64]) -> BigInt {
    let mut p = BigInt::one();
    for j in 0..v.len() {
        for i in 0..j {
            p *= int(v[j] - v[i]);
        }
    }
    p
}

/// `Δ(0, 1, ..., N) = ∏_{k=1}^N k!`.
fn superfactorial(n: usize, b: &mut Binomials) -> BigInt {
    (1..=n).map(|k| b.factorial(k)).product()
}

/// `Z = Δ(a) / Δ(0..n)`.
pub fn partition_product(seq: &StartSequence) -> BigInt {
    let mut b = Binomials::new();
    let den = superfactorial(seq.n(), &mut b);
    let num = vandermonde(seq.a());
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// `Z = Δ(0..n+m)/Δ(0..n) · Δ(b) / ∏ b_i! (n+m-b_i)!`.
pub fn partition_bform(seq: &StartSequence) -> BigInt {
    let c = seq.complement();
    let n = seq.n();
    let nm = n + c.m();
    let mut bin = Binomials::with_capacity(nm);
    let num = superfactorial(nm, &mut bin) * vandermonde(c.values());
    let den: BigInt = superfactorial(n, &mut bin)
        * c.values().iter().map(|&bi| bin.factorial(bi as usize) * bin.factorial(nm - bi as usize)).product::<BigInt>();
    debug_assert!((&num % &den).is_zero());
    num / den
}
