use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;

use super::ExactError;
use crate::boundary::StartSequence;

/// Largest instance accepted by the exhaustive enumerator.
pub const BRUTE_MAX_LAST: i64 = 12;
pub const BRUTE_MAX_N: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    W,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TileKind {
    /// Carries a west step.
    Upper,
    /// Carries a north step.
    Right,
    /// Unvisited vertex.
    Front,
}

/// One family of non-intersecting paths, path `i` going from `(a_i, 0)` to `(0, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathConfiguration {
    start: Vec<i64>,
    words: Vec<Vec<Step>>,
}

impl PathConfiguration {
    pub fn new(seq: &StartSequence, words: Vec<Vec<Step>>) -> Result<Self, ExactError> {
        let c = Self { start: seq.a().to_vec(), words };
        if !c.is_valid() {
            return Err(ExactError::InvalidConfiguration);
        }
        Ok(c)
    }

    pub(crate) fn from_parts_unchecked(start: Vec<i64>, words: Vec<Vec<Step>>) -> Self {
        Self { start, words }
    }

    pub fn words(&self) -> &[Vec<Step>] {
        &self.words
    }

    pub fn start(&self) -> &[i64] {
        &self.start
    }

    /// Lattice vertices visited by path `i`, from its start to its end.
    pub fn vertices(&self, i: usize) -> Vec<(i64, i64)> {
        let mut p = (self.start[i], 0);
        let mut out = Vec::with_capacity(self.words[i].len() + 1);
        out.push(p);
        for s in &self.words[i] {
            match s {
                Step::W => p.0 -= 1,
                Step::N => p.1 += 1,
            }
            out.push(p);
        }
        out
    }

    /// Abscissa at which the topmost path first reaches its final row `y = n`.
    pub fn top_exit(&self) -> i64 {
        let n = self.words.len() - 1;
        self.vertices(n).into_iter().find(|v| v.1 == n as i64).map_or(0, |v| v.0)
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = HashSet::new();
        for i in 0..self.words.len() {
            let w = self.words[i].iter().filter(|s| **s == Step::W).count() as i64;
            let nn = self.words[i].len() as i64 - w;
            if w != self.start[i] || nn != i as i64 {
                return false;
            }
            for v in self.vertices(i) {
                if !seen.insert(v) {
                    return false;
                }
            }
        }
        true
    }

    /// Number of upper, right and front tiles over `[0, a_n] x [0, n]`.
    pub fn tile_counts(&self) -> [(TileKind, usize); 3] {
        let n = self.words.len() - 1;
        let last = *self.start.last().unwrap();
        let upper: usize = self.words.iter().flatten().filter(|s| **s == Step::W).count();
        let right: usize = self.words.iter().flatten().filter(|s| **s == Step::N).count();
        let visited: usize = self.words.iter().map(|w| w.len() + 1).sum();
        let front = (last as usize + 1) * (n + 1) - visited;
        [(TileKind::Upper, upper), (TileKind::Right, right), (TileKind::Front, front)]
    }

    /// Compact run-length text, paths separated by spaces, empty words as `-`.
    pub fn to_runlength(&self) -> String {
        let parts: Vec<String> = self
            .words
            .iter()
            .map(|w| {
                if w.is_empty() {
                    return "-".to_string();
                }
                let mut s = String::new();
                let mut k = 0;
                while k < w.len() {
                    let mut r = k;
                    while r < w.len() && w[r] == w[k] {
                        r += 1;
                    }
                    s.push(if w[k] == Step::W { 'W' } else { 'N' });
                    s.push_str(&(r - k).to_string());
                    k = r;
                }
                s
            })
            .collect();
        parts.join(" ")
    }

    pub fn from_runlength(seq: &StartSequence, text: &str) -> Result<Self, ExactError> {
        let mut words = Vec::new();
        for part in text.split_whitespace() {
            let mut w = Vec::new();
            if part != "-" {
                let mut chars = part.chars().peekable();
                while let Some(c) = chars.next() {
                    let step = match c {
                        'W' => Step::W,
                        'N' => Step::N,
                        _ => return Err(ExactError::Parse(part.to_string())),
                    };
                    let mut digits = String::new();
                    while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                        digits.push(*d);
                        chars.next();
                    }
                    let k: usize = digits.parse().map_err(|_| ExactError::Parse(part.to_string()))?;
                    w.extend(std::iter::repeat_n(step, k));
                }
            }
            words.push(w);
        }
        if words.len() != seq.n() + 1 {
            return Err(ExactError::Parse(text.to_string()));
        }
        Self::new(seq, words)
    }
}

impl fmt::Display for PathConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_runlength())
    }
}

fn guard(seq: &StartSequence) -> Result<(), ExactError> {
    if seq.last() > BRUTE_MAX_LAST || seq.n() > BRUTE_MAX_N {
        return Err(ExactError::SizeGuard { n: seq.n(), last: seq.last() });
    }
    Ok(())
}

struct Search<'a> {
    a: &'a [i64],
    occupied: HashSet<(i64, i64)>,
    words: Vec<Vec<Step>>,
}

impl Search<'_> {
    fn run(&mut self, i: usize, visit: &mut dyn FnMut(&[Vec<Step>])) {
        if i == self.a.len() {
            visit(&self.words);
            return;
        }
        let start = (self.a[i], 0);
        if self.occupied.contains(&start) {
            return;
        }
        self.occupied.insert(start);
        self.words.push(Vec::new());
        self.walk(i, start, visit);
        self.words.pop();
        self.occupied.remove(&start);
    }

    fn walk(&mut self, i: usize, p: (i64, i64), visit: &mut dyn FnMut(&[Vec<Step>])) {
        if p == (0, i as i64) {
            self.run(i + 1, visit);
            return;
        }
        for (step, q) in [(Step::W, (p.0 - 1, p.1)), (Step::N, (p.0, p.1 + 1))] {
            if q.0 < 0 || q.1 > i as i64 || self.occupied.contains(&q) {
                continue;
            }
            self.occupied.insert(q);
            self.words[i].push(step);
            self.walk(i, q, visit);
            self.words[i].pop();
            self.occupied.remove(&q);
        }
    }
}

fn search(seq: &StartSequence, visit: &mut dyn FnMut(&[Vec<Step>])) {
    let mut s = Search { a: seq.a(), occupied: HashSet::new(), words: Vec::new() };
    s.run(0, visit);
}

pub fn brute_force_count(seq: &StartSequence) -> Result<BigInt, ExactError> {
    guard(seq)?;
    let mut count: u64 = 0;
    search(seq, &mut |_| count += 1);
    Ok(BigInt::from(count))
}

pub fn brute_force_enumerate(seq: &StartSequence) -> Result<Vec<PathConfiguration>, ExactError> {
    guard(seq)?;
    let mut out = Vec::new();
    search(seq, &mut |w| out.push(PathConfiguration::from_parts_unchecked(seq.a().to_vec(), w.to_vec())));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcomb::{lgv_a, partition_product};

    fn seq(a: &[i64]) -> StartSequence {
        StartSequence::new(a.to_vec()).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(brute_force_count(&seq(&[0, 1])).unwrap(), BigInt::from(1));
        let two = brute_force_enumerate(&seq(&[0, 2])).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(brute_force_count(&seq(&[0, 2, 4])).unwrap(), BigInt::from(8));
        let s = seq(&[0, 2, 3, 6, 10, 12]);
        assert_eq!(brute_force_count(&s).unwrap(), lgv_a(&s).det_bareiss());
        assert_eq!(brute_force_count(&s).unwrap(), partition_product(&s));
    }

    #[test]
    fn enumeration_is_valid_and_distinct() {
        let s = seq(&[0, 2, 3, 5]);
        let all = brute_force_enumerate(&s).unwrap();
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for c in &all {
            assert!(c.is_valid());
            let back = PathConfiguration::from_runlength(&s, &c.to_runlength()).unwrap();
            assert_eq!(&back, c);
            let counts = c.tile_counts();
            assert_eq!(counts[0].1 as i64, s.a().iter().sum::<i64>());
        }
    }

    #[test]
    fn guard_refuses_large() {
        let s = StartSequence::pure(3, 6).unwrap();
        assert!(matches!(brute_force_count(&s), Err(ExactError::SizeGuard { .. })));
    }

    #[test]
    fn runlength_format() {
        let s = seq(&[0, 2]);
        let c = PathConfiguration::new(&s, vec![vec![], vec![Step::W, Step::N, Step::W]]).unwrap();
        assert_eq!(c.to_runlength(), "- W1N1W1");
        assert_eq!(c.top_exit(), 1);
        assert!(PathConfiguration::new(&s, vec![vec![], vec![Step::N, Step::W]]).is_err());
    }
}
