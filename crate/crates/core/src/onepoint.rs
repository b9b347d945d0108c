//! Exact one-point functions H, H~, Ĥ, Ȟ and the escape-path factors.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::boundary::StartSequence;
use crate::exactcomb::{binom, Binomials};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OnePointError {
    #[error("exit index {ell} outside [{lo}, {hi}]")]
    OutOfRange { ell: i64, lo: i64, hi: i64 },
    #[error("sequence has no second-family paths (m = 0)")]
    NoSecondFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    H,
    Htilde,
    Hhat,
    Hcheck,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::H, Kind::Htilde, Kind::Hhat, Kind::Hcheck];

    pub fn name(self) -> &'static str {
        match self {
            Kind::H => "H",
            Kind::Htilde => "Htilde",
            Kind::Hhat => "Hhat",
            Kind::Hcheck => "Hcheck",
        }
    }

    /// Admissible exit indices for a sequence.
    pub fn range(self, seq: &StartSequence) -> (i64, i64) {
        let n = seq.n() as i64;
        match self {
            Kind::H => (0, seq.last()),
            Kind::Htilde => (n - 1, seq.last()),
            Kind::Hhat => (0, n + 1),
            Kind::Hcheck => (0, n),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown one-point kind `{s}` (H, Htilde, Hhat, Hcheck)"))
    }
}

fn check(ell: i64, (lo, hi): (i64, i64)) -> Result<(), OnePointError> {
    if ell < lo || ell > hi {
        return Err(OnePointError::OutOfRange { ell, lo, hi });
    }
    Ok(())
}

/// Precomputed data for H over all exits of one sequence: `O(n^2)` setup, `O(n)` per exit.
#[derive(Clone, Debug)]
pub struct HEvaluator {
    a: Vec<i64>,
    n: i64,
    // ∏_{s≠k} (a_k - a_s)
    denominators: Vec<BigInt>,
}

impl HEvaluator {
    pub fn new(seq: &StartSequence) -> Self {
        let a = seq.a().to_vec();
        let denominators = (0..a.len())
            .map(|k| (0..a.len()).filter(|&s| s != k).map(|s| BigInt::from(a[k] - a[s])).product())
            .collect();
        Self { a, n: seq.n() as i64, denominators }
    }

    /// `H = U'_nn / U_nn = n! Σ_k C(a_k + n - ℓ, n) / ∏_{s≠k}(a_k - a_s)`.
    pub fn eval(&self, ell: i64) -> Result<BigRational, OnePointError> {
        check(ell, (0, *self.a.last().unwrap()))?;
        let mut acc = BigRational::zero();
        for (k, &ak) in self.a.iter().enumerate() {
            if ak < ell {
                continue;
            }
            // n! C(a_k + n - ℓ, n) as a rising product
            let num: BigInt = (1..=self.n).map(|s| BigInt::from(ak - ell + s)).product();
            acc += BigRational::new(num, self.denominators[k].clone());
        }
        Ok(acc)
    }
}

pub fn h(seq: &StartSequence, ell: i64) -> Result<BigRational, OnePointError> {
    HEvaluator::new(seq).eval(ell)
}

/// Reflected one-point function, `H~(ℓ) = H(a~, a_n - ℓ + n)`, with `H~(n-1) = 0`.
pub fn htilde(seq: &StartSequence, ell: i64) -> Result<BigRational, OnePointError> {
    let n = seq.n() as i64;
    check(ell, Kind::Htilde.range(seq))?;
    if ell == n - 1 {
        return Ok(BigRational::zero());
    }
    h(&seq.tilde().as_sequence(), seq.last() - ell + n)
}

/// Precomputed data for Ĥ over all exits.
#[derive(Clone, Debug)]
pub struct HhatEvaluator {
    n: i64,
    m: i64,
    b: Vec<i64>,
    prefactor: BigInt,
    // C(n+m, b_k) (n+m-b_k) ∏_{s≠k}(b_k - b_s)
    denominators: Vec<BigInt>,
}

impl HhatEvaluator {
    pub fn new(seq: &StartSequence) -> Result<Self, OnePointError> {
        let c = seq.complement();
        if c.m() == 0 {
            return Err(OnePointError::NoSecondFamily);
        }
        let b = c.values().to_vec();
        let n = seq.n() as i64;
        let m = c.m() as i64;
        let mut bin = Binomials::with_capacity((n + m) as usize);
        let prefactor = b.iter().map(|&bs| BigInt::from(n + m - bs)).product();
        let denominators = (0..b.len())
            .map(|k| {
                let others: BigInt = (0..b.len()).filter(|&s| s != k).map(|s| BigInt::from(b[k] - b[s])).product();
                bin.binom(n + m, b[k]) * BigInt::from(n + m - b[k]) * others
            })
            .collect();
        Ok(Self { n, m, b, prefactor, denominators })
    }

    pub fn eval(&self, ell: i64) -> Result<BigRational, OnePointError> {
        check(ell, (0, self.n + 1))?;
        let mut acc = BigRational::zero();
        for (k, &bk) in self.b.iter().enumerate() {
            let c = binom(self.n - ell + 1, self.n + self.m - bk);
            if c.is_zero() {
                continue;
            }
            acc += BigRational::new(c, self.denominators[k].clone());
        }
        Ok(acc * BigRational::from_integer(self.prefactor.clone()))
    }
}

/// Right-edge one-point function `Ĥ = Û'_mm / Û_mm`.
pub fn hhat(seq: &StartSequence, ell: i64) -> Result<BigRational, OnePointError> {
    HhatEvaluator::new(seq)?.eval(ell)
}

/// Moved-starting-point function `Ȟ(ℓ) = 1 - Ĥ(ℓ + 1)`.
pub fn hcheck(seq: &StartSequence, ell: i64) -> Result<BigRational, OnePointError> {
    check(ell, (0, seq.n() as i64))?;
    Ok(BigRational::one() - hhat(seq, ell + 1)?)
}

/// Ȟ from its residue expansion around `t = a_n - s`, `s = 0..n-ℓ`
/// (independent of the Ĥ route).
pub fn hcheck_residues(seq: &StartSequence, ell: i64) -> Result<BigRational, OnePointError> {
    let n = seq.n() as i64;
    check(ell, (0, n))?;
    let a = seq.a();
    let an = seq.last();
    let base: BigInt = a[..a.len() - 1].iter().map(|&s| BigInt::from(an - s)).product();
    let mut bin = Binomials::new();
    let top = n - ell;
    let fact = bin.factorial(top as usize);
    let mut acc = BigRational::one();
    for s0 in 1..=top {
        let t = an - s0;
        let num: BigInt = a[..a.len() - 1].iter().map(|&s| BigInt::from(t - s)).product();
        if num.is_zero() {
            continue;
        }
        let den: BigInt = (1..=top).filter(|&s| s != s0).map(|s| BigInt::from(s - s0)).product();
        acc -= BigRational::new(num * &fact, den * BigInt::from(s0) * &base);
    }
    Ok(acc)
}

/// Escape factor for exits through the top boundary, `C(ℓ + r - 1, ℓ)`.
pub fn y_factor(ell: i64, r: i64) -> BigInt {
    binom(ell + r - 1, ell)
}

/// `C(a_n - ℓ - 1, r - 1)`.
pub fn y_tilde(seq: &StartSequence, ell: i64, r: i64) -> BigInt {
    binom(seq.last() - ell - 1, r - 1)
}

/// `C(ℓ - 1, p - 1)`.
pub fn y_hat(p: i64, ell: i64) -> BigInt {
    binom(ell - 1, p - 1)
}

pub fn value(seq: &StartSequence, kind: Kind, ell: i64) -> Result<BigRational, OnePointError> {
    match kind {
        Kind::H => h(seq, ell),
        Kind::Htilde => htilde(seq, ell),
        Kind::Hhat => hhat(seq, ell),
        Kind::Hcheck => hcheck(seq, ell),
    }
}

/// Natural logarithm of a (possibly huge) positive integer.
pub fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln(x)` for a positive rational; `-inf` at 0.
pub fn ln_rational(x: &BigRational) -> f64 {
    match x.numer().sign() {
        Sign::Plus => ln_bigint(x.numer()) - ln_bigint(x.denom()),
        Sign::NoSign => f64::NEG_INFINITY,
        Sign::Minus => f64::NAN,
    }
}

/// Exact values of one kind of one-point function over all admissible exits.
#[derive(Clone, Debug)]
pub struct OnePointTable {
    pub kind: Kind,
    pub seq: StartSequence,
    pub values: BTreeMap<i64, BigRational>,
}

impl OnePointTable {
    pub fn build(seq: &StartSequence, kind: Kind) -> Result<Self, OnePointError> {
        let (lo, hi) = kind.range(seq);
        let values: Vec<(i64, BigRational)> = match kind {
            Kind::H => {
                let ev = HEvaluator::new(seq);
                (lo..=hi).into_par_iter().map(|l| ev.eval(l).map(|v| (l, v))).collect::<Result<_, _>>()?
            }
            Kind::Htilde => {
                let ev = HEvaluator::new(&seq.tilde().as_sequence());
                let n = seq.n() as i64;
                (lo..=hi)
                    .into_par_iter()
                    .map(|l| {
                        if l == n - 1 {
                            Ok((l, BigRational::zero()))
                        } else {
                            ev.eval(seq.last() - l + n).map(|v| (l, v))
                        }
                    })
                    .collect::<Result<_, _>>()?
            }
            Kind::Hhat | Kind::Hcheck => {
                let ev = HhatEvaluator::new(seq)?;
                let shift = if kind == Kind::Hcheck { 1 } else { 0 };
                (lo..=hi)
                    .into_par_iter()
                    .map(|l| ev.eval(l + shift).map(|v| (l, if shift == 1 { BigRational::one() - v } else { v })))
                    .collect::<Result<_, _>>()?
            }
        };
        Ok(Self { kind, seq: seq.clone(), values: values.into_iter().collect() })
    }

    /// Every value in [0, 1] and the monotonicity expected for the kind.
    pub fn check_invariants(&self) -> Result<(), String> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        for (l, v) in &self.values {
            if v < &zero || v > &one {
                return Err(format!("{}({l}) = {v} outside [0, 1]", self.kind));
            }
        }
        let vals: Vec<&BigRational> = self.values.values().collect();
        let ok = match self.kind {
            Kind::H | Kind::Hhat => vals.windows(2).all(|w| w[0] >= w[1]),
            Kind::Htilde | Kind::Hcheck => vals.windows(2).all(|w| w[0] <= w[1]),
        };
        if !ok {
            return Err(format!("{} table is not monotone", self.kind));
        }
        Ok(())
    }

    /// CSV with columns `ell,numerator,denominator,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["ell", "numerator", "denominator", "value"])?;
        for (l, v) in &self.values {
            let f = v.to_f64().unwrap_or(f64::NAN);
            w.write_record([l.to_string(), v.numer().to_string(), v.denom().to_string(), f.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Convenience: is a rational in [0, 1]?
pub fn in_unit_interval(v: &BigRational) -> bool {
    !v.is_negative() && v <= &BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcomb::{lgv_a, lgv_a_modified, lgv_ahat, lgv_ahat_modified};

    fn seq(a: &[i64]) -> StartSequence {
        StartSequence::new(a.to_vec()).unwrap()
    }

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn h_boundary_values() {
        let s = seq(&[0, 2, 3, 6, 10, 12, 15]);
        assert_eq!(h(&s, 0).unwrap(), r(1, 1));
        assert_eq!(h(&s, 6).unwrap(), r(1, 1));
        assert!(h(&s, 16).is_err());
    }

    #[test]
    fn h_matches_modified_determinant() {
        let s = StartSequence::pure(3, 2).unwrap();
        let det = BigRational::from_integer(lgv_a(&s).det_bareiss());
        let mdet = BigRational::from_integer(lgv_a_modified(&s, 5).det_bareiss());
        assert_eq!(h(&s, 5).unwrap(), mdet / det);
    }

    #[test]
    fn htilde_examples() {
        assert_eq!(htilde(&seq(&[0, 2]), 1).unwrap(), r(0, 1) + BigRational::one() - h(&seq(&[0, 2]), 2).unwrap());
        let s = seq(&[0, 2, 4]);
        assert_eq!(htilde(&s, 1).unwrap(), r(0, 1));
        assert_eq!(htilde(&s, 3).unwrap(), BigRational::one() - h(&s, 4).unwrap());
    }

    #[test]
    fn hhat_examples() {
        let s = seq(&[0, 3]);
        let det = BigRational::from_integer(lgv_ahat(&s).det_bareiss());
        let mdet = BigRational::from_integer(lgv_ahat_modified(&s, 1).det_bareiss());
        assert_eq!(hhat(&s, 1).unwrap(), mdet / det);
        assert_eq!(hhat(&s, 0).unwrap(), r(1, 1));
        assert_eq!(hhat(&s, 2).unwrap(), r(0, 1));
        assert!(matches!(hhat(&seq(&[0, 1]), 1), Err(OnePointError::NoSecondFamily)));
        assert_eq!(hcheck(&seq(&[0, 2]), 0).unwrap(), BigRational::one() - hhat(&seq(&[0, 2]), 1).unwrap());
    }

    #[test]
    fn hcheck_routes_agree() {
        for a in [&[0, 2, 4][..], &[0, 2, 3, 6, 10, 12, 15], &[0, 1, 5], &[0, 4]] {
            let s = seq(a);
            for l in 0..=s.n() as i64 {
                assert_eq!(hcheck(&s, l).unwrap(), hcheck_residues(&s, l).unwrap(), "{a:?} ell={l}");
            }
        }
    }

    #[test]
    fn y_factors() {
        assert_eq!(y_factor(0, 3), BigInt::from(1));
        assert_eq!(y_hat(4, 4), BigInt::from(1));
        let s = StartSequence::new((0..=6).map(|i| [0, 2, 3, 6, 10, 12, 15][i]).collect()).unwrap();
        assert_eq!(y_tilde(&s, 14, 1), BigInt::from(1));
    }

    #[test]
    fn tables_and_csv() {
        let s = seq(&[0, 2, 3, 6, 10, 12, 15]);
        for kind in Kind::ALL {
            let t = OnePointTable::build(&s, kind).unwrap();
            t.check_invariants().unwrap();
        }
        let t = OnePointTable::build(&seq(&[0, 1]), Kind::H).unwrap();
        assert!(t.values.values().all(|v| v.is_one()));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "ell,numerator,denominator,value\n0,1,1,1\n1,1,1,1\n");
    }

    #[test]
    fn big_logs() {
        let x = BigInt::from(10).pow(400);
        assert!((ln_bigint(&x) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!((ln_rational(&r(1, 8)) + 8f64.ln()).abs() < 1e-15);
    }
}
