use std::fmt;
use std::str::FromStr;

use super::BoundaryError;

/// Starting points `(a_0, ..., a_n)` of the `n+1` paths, `a_0 = 0`, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StartSequence {
    a: Vec<i64>,
}

impl StartSequence {
    pub fn new(a: Vec<i64>) -> Result<Self, BoundaryError> {
        if a.is_empty() {
            return Err(BoundaryError::EmptySequence);
        }
        if a[0] != 0 {
            return Err(BoundaryError::SequenceStart(a[0]));
        }
        if let Some(i) = (1..a.len()).find(|&i| a[i] <= a[i - 1]) {
            return Err(BoundaryError::NotIncreasing { index: i });
        }
        Ok(Self { a })
    }

    /// `a_i = p i` for `i = 0..=n`.
    pub fn pure(p: i64, n: usize) -> Result<Self, BoundaryError> {
        Self::new((0..=n as i64).map(|i| p * i).collect())
    }

    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn last(&self) -> i64 {
        self.a[self.a.len() - 1]
    }

    /// Number of second-family paths, `a_n - n`.
    pub fn m(&self) -> usize {
        (self.last() - self.n() as i64) as usize
    }

    pub fn tilde(&self) -> TildeSequence {
        tilde_of(self)
    }

    pub fn complement(&self) -> ComplementarySequence {
        complement_of(self)
    }
}

impl fmt::Display for StartSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for StartSequence {
    type Err = BoundaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let a = s
            .split(',')
            .map(|p| p.trim())
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<i64>().map_err(|_| BoundaryError::Parse(p.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(a)
    }
}

/// Reflected sequence `a~_i = a_n - a_{n-i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TildeSequence {
    atilde: Vec<i64>,
}

impl TildeSequence {
    pub fn values(&self) -> &[i64] {
        &self.atilde
    }

    pub fn as_sequence(&self) -> StartSequence {
        StartSequence { a: self.atilde.clone() }
    }
}

/// Sorted complement of `{a_i}` in `{0, ..., a_n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementarySequence {
    b: Vec<i64>,
}

impl ComplementarySequence {
    pub fn values(&self) -> &[i64] {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }
}

pub fn tilde_of(seq: &StartSequence) -> TildeSequence {
    let n = seq.n();
    let last = seq.last();
    TildeSequence { atilde: (0..=n).map(|i| last - seq.a[n - i]).collect() }
}

pub fn complement_of(seq: &StartSequence) -> ComplementarySequence {
    let mut b = Vec::with_capacity(seq.m());
    let mut it = seq.a.iter().peekable();
    for v in 0..=seq.last() {
        if it.peek() == Some(&&v) {
            it.next();
        } else {
            b.push(v);
        }
    }
    ComplementarySequence { b }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(a: &[i64]) -> StartSequence {
        StartSequence::new(a.to_vec()).unwrap()
    }

    #[test]
    fn tilde_examples() {
        let s = seq(&[0, 2, 3, 6, 10, 12, 15]);
        assert_eq!(tilde_of(&s).values(), &[0, 3, 5, 9, 12, 13, 15]);
        assert_eq!(tilde_of(&seq(&[0, 1, 2, 3])).values(), &[0, 1, 2, 3]);
        assert_eq!(tilde_of(&seq(&[0, 2])).values(), &[0, 2]);
        assert_eq!(tilde_of(&tilde_of(&s).as_sequence()).as_sequence(), s);
    }

    #[test]
    fn complement_examples() {
        let s = seq(&[0, 2, 3, 6, 10, 12, 15]);
        assert_eq!(complement_of(&s).values(), &[1, 4, 5, 7, 8, 9, 11, 13, 14]);
        assert_eq!(complement_of(&seq(&[0, 1, 2])).m(), 0);
        let c = complement_of(&seq(&[0, 3]));
        assert_eq!(c.values(), &[1, 2]);
        assert_eq!(c.m(), 2);
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(StartSequence::new(vec![]).is_err());
        assert!(StartSequence::new(vec![1, 2]).is_err());
        assert!(StartSequence::new(vec![0, 2, 2]).is_err());
        assert_eq!("0, 2,3".parse::<StartSequence>().unwrap(), seq(&[0, 2, 3]));
        assert!("0,x".parse::<StartSequence>().is_err());
    }
}
