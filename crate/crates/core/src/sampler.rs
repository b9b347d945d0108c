//! Uniform sampling of path configurations by Metropolis corner flips, with uniformity
//! and overlay statistics.

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::arctic::{ArcticPortion, PortionKind, SvgFigure};
use crate::boundary::StartSequence;
use crate::exactcomb::{PathConfiguration, Step};

/// Initial configuration of a chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Start {
    #[default]
    Minimal,
    Maximal,
}

fn minimal_words(seq: &StartSequence) -> Vec<Vec<Step>> {
    let a = seq.a();
    // rightmost[y]: rightmost vertex of the previous path on row y
    let mut rightmost: Vec<i64> = Vec::new();
    let mut words = Vec::with_capacity(a.len());
    for (i, &ai) in a.iter().enumerate() {
        let mut w = Vec::with_capacity(ai as usize + i);
        let mut x = ai;
        let mut next = vec![0; i + 1];
        for y in 0..=i {
            let target = if y < rightmost.len() { rightmost[y] + 1 } else { 0 };
            next[y] = x;
            while x > target {
                w.push(Step::W);
                x -= 1;
            }
            if y < i {
                w.push(Step::N);
            }
        }
        rightmost = next;
        words.push(w);
    }
    words
}

/// Markov chain over the configurations of one sequence.
#[derive(Clone, Debug)]
pub struct ChainState {
    start: Vec<i64>,
    words: Vec<Vec<Step>>,
    /// `pos[i][k]`: vertex k of path i.
    pos: Vec<Vec<(i64, i64)>>,
    occupied: Vec<bool>,
    width: i64,
    /// `offsets[i]`: number of flip positions in paths before i.
    offsets: Vec<usize>,
    rng: ChaCha8Rng,
    pub seed: u64,
    pub steps: u64,
    pub accepted: u64,
}

impl ChainState {
    /// Lowest configuration: on every row each path runs west as far as the path below allows.
    pub fn init_minimal(seq: &StartSequence, seed: u64) -> Self {
        Self::init_stream(seq, seed, 0)
    }

    /// Highest configuration: every path takes all its north steps first.
    pub fn init_maximal(seq: &StartSequence, seed: u64) -> Self {
        Self::init_stream_from(seq, seed, 0, Start::Maximal)
    }

    /// As [`ChainState::init_minimal`], on an independent RNG stream of the same seed.
    pub fn init_stream(seq: &StartSequence, seed: u64, stream: u64) -> Self {
        Self::init_stream_from(seq, seed, stream, Start::Minimal)
    }

    pub fn init_stream_from(seq: &StartSequence, seed: u64, stream: u64, start: Start) -> Self {
        let words = match start {
            Start::Minimal => minimal_words(seq),
            Start::Maximal => seq
                .a()
                .iter()
                .enumerate()
                .map(|(i, &ai)| {
                    std::iter::repeat_n(Step::N, i).chain(std::iter::repeat_n(Step::W, ai as usize)).collect()
                })
                .collect(),
        };
        let a = seq.a();
        let width = seq.last() + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut s = Self {
            start: a.to_vec(),
            words,
            pos: Vec::new(),
            occupied: vec![false; (width * a.len() as i64) as usize],
            width,
            offsets: Vec::new(),
            rng,
            seed,
            steps: 0,
            accepted: 0,
        };
        s.rebuild();
        assert!(s.configuration().is_valid());
        s
    }

    fn rebuild(&mut self) {
        self.occupied.iter_mut().for_each(|o| *o = false);
        self.pos.clear();
        let mut off = 0;
        self.offsets.clear();
        for (i, w) in self.words.iter().enumerate() {
            let mut p = (self.start[i], 0);
            let mut v = vec![p];
            for s in w {
                match s {
                    Step::W => p.0 -= 1,
                    Step::N => p.1 += 1,
                }
                v.push(p);
            }
            for &q in &v {
                self.occupied[(q.1 * self.width + q.0) as usize] = true;
            }
            self.pos.push(v);
            self.offsets.push(off);
            off += w.len().saturating_sub(1);
        }
        self.offsets.push(off);
    }

    fn flip_positions(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// One proposal: a uniform (path, position) pair; a W-N or N-W corner is swapped when the
    /// new corner vertex is free. Returns whether the move was accepted.
    pub fn flip_step(&mut self) -> bool {
        self.steps += 1;
        let total = self.flip_positions();
        if total == 0 {
            return false;
        }
        let r = self.rng.random_range(0..total);
        let i = self.offsets.partition_point(|&o| o <= r) - 1;
        let k = r - self.offsets[i];
        let w = &self.words[i];
        if w[k] == w[k + 1] {
            return false;
        }
        let (x, y) = self.pos[i][k];
        let new = match w[k] {
            Step::W => (x, y + 1),
            Step::N => (x - 1, y),
        };
        let idx = (new.1 * self.width + new.0) as usize;
        if self.occupied[idx] {
            return false;
        }
        let old = self.pos[i][k + 1];
        self.occupied[(old.1 * self.width + old.0) as usize] = false;
        self.occupied[idx] = true;
        self.pos[i][k + 1] = new;
        self.words[i].swap(k, k + 1);
        self.accepted += 1;
        // a flip moves one vertex, so validity reduces to the new vertex being free and in range
        debug_assert!(new.0 >= 0 && new.1 >= 0 && new.1 <= i as i64);
        if self.accepted.is_multiple_of(1000) {
            assert!(self.configuration().is_valid(), "corner flip produced an invalid configuration");
        }
        true
    }

    pub fn run(&mut self, proposals: u64) {
        for _ in 0..proposals {
            self.flip_step();
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.steps as f64
        }
    }

    pub fn configuration(&self) -> PathConfiguration {
        PathConfiguration::from_parts_unchecked(self.start.clone(), self.words.clone())
    }

    /// Vertices of the topmost path.
    pub fn top_path(&self) -> &[(i64, i64)] {
        self.pos.last().unwrap()
    }
}

/// Chain lengths for [`sample_ensemble`]; `None` selects the defaults
/// `burn_in = 20 n a_n` and `thin = 10 n a_n` proposals.
#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub n_samples: usize,
    pub burn_in: Option<u64>,
    pub thin: Option<u64>,
    pub seed: u64,
    /// Independent chains run in parallel, each contributing an equal share of the samples.
    pub chains: usize,
    pub start: Start,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self { n_samples: 100, burn_in: None, thin: None, seed: 0, chains: 1, start: Start::Minimal }
    }
}

impl SampleOptions {
    pub fn burn_in_for(&self, seq: &StartSequence) -> u64 {
        self.burn_in.unwrap_or(20 * Self::scale(seq))
    }

    pub fn thin_for(&self, seq: &StartSequence) -> u64 {
        self.thin.unwrap_or(10 * Self::scale(seq)).max(1)
    }

    fn scale(seq: &StartSequence) -> u64 {
        (seq.n() as u64 * seq.last() as u64).max(1)
    }
}

/// Runs the chains and applies `visit` to every kept state; results come back in chain order.
pub fn run_chains<R: Send>(
    seq: &StartSequence,
    opts: &SampleOptions,
    visit: impl Fn(&ChainState) -> R + Sync,
) -> Vec<R> {
    let chains = opts.chains.max(1);
    let (burn, thin) = (opts.burn_in_for(seq), opts.thin_for(seq));
    let per: Vec<usize> =
        (0..chains).map(|c| opts.n_samples / chains + usize::from(c < opts.n_samples % chains)).collect();
    let parts: Vec<Vec<R>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut st = ChainState::init_stream_from(seq, opts.seed, c as u64, opts.start);
            st.run(burn);
            let mut out = Vec::with_capacity(per[c]);
            for _ in 0..per[c] {
                st.run(thin);
                out.push(visit(&st));
            }
            out
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// `n_samples` configurations, deterministic given the options.
pub fn sample_ensemble(seq: &StartSequence, opts: &SampleOptions) -> Vec<PathConfiguration> {
    run_chains(seq, opts, |s| s.configuration())
}

/// Pearson chi-square test of the sample frequencies against the uniform law on `states`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquare {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value > significance
    }
}

/// Panics if a sample is not among `states`.
pub fn chi_square_uniform(samples: &[PathConfiguration], states: &[PathConfiguration]) -> ChiSquare {
    let index: HashMap<&PathConfiguration, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut counts = vec![0u64; states.len()];
    for s in samples {
        counts[*index.get(s).expect("sample outside the enumerated state space")] += 1;
    }
    let expected = samples.len() as f64 / states.len() as f64;
    let statistic = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = states.len().saturating_sub(1);
    let p_value = if dof == 0 { 1.0 } else { 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(statistic) };
    ChiSquare { statistic, dof, p_value }
}

/// Largest `|c_ij - c_ji| / sqrt(c_ij + c_ji)` over pairs of distinct states, from the
/// transitions of one chain run for `proposals` steps.
pub fn transition_balance(seq: &StartSequence, proposals: u64, seed: u64) -> f64 {
    let mut st = ChainState::init_minimal(seq, seed);
    let mut ids: HashMap<Vec<Vec<Step>>, usize> = HashMap::new();
    let mut counts: HashMap<(usize, usize), u64> = HashMap::new();
    let id_of = |w: &Vec<Vec<Step>>, ids: &mut HashMap<Vec<Vec<Step>>, usize>| {
        let n = ids.len();
        *ids.entry(w.clone()).or_insert(n)
    };
    let mut cur = id_of(&st.words, &mut ids);
    for _ in 0..proposals {
        if st.flip_step() {
            let next = id_of(&st.words, &mut ids);
            *counts.entry((cur, next)).or_default() += 1;
            cur = next;
        }
    }
    let mut worst = 0.0f64;
    for (&(i, j), &c) in &counts {
        let back = counts.get(&(j, i)).copied().unwrap_or(0);
        worst = worst.max((c as f64 - back as f64).abs() / ((c + back) as f64).sqrt());
    }
    worst
}

/// Region left of the generic-I portion of the curve, `X ≤ X_I(Y)`, in rescaled units.
#[derive(Clone, Debug)]
pub struct OverlayRegion {
    /// Portion-I points sorted by Y.
    boundary: Vec<(f64, f64)>,
    alpha_end: f64,
}

impl OverlayRegion {
    pub fn from_portions(portions: &[ArcticPortion<f64>], alpha_end: f64) -> Option<Self> {
        let p = portions.iter().find(|p| p.kind == PortionKind::GenericI)?;
        let mut boundary: Vec<(f64, f64)> =
            p.samples.iter().filter(|s| s.px.is_finite() && s.py.is_finite()).map(|s| (s.px, s.py)).collect();
        boundary.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        Some(Self { boundary, alpha_end })
    }

    fn boundary_x(&self, y: f64) -> f64 {
        let b = &self.boundary;
        if y <= b[0].1 {
            return self.alpha_end;
        }
        if y >= b[b.len() - 1].1 {
            return b[b.len() - 1].0;
        }
        let k = b.partition_point(|p| p.1 < y);
        let (p, q) = (b[k - 1], b[k]);
        let f = if q.1 > p.1 { (y - p.1) / (q.1 - p.1) } else { 0.0 };
        p.0 + f * (q.0 - p.0)
    }

    /// Euclidean distance to the boundary polyline.
    pub fn distance(&self, pt: (f64, f64)) -> f64 {
        self.boundary
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let d = (b.0 - a.0, b.1 - a.1);
                let len2 = d.0 * d.0 + d.1 * d.1;
                let s =
                    if len2 > 0.0 { (((pt.0 - a.0) * d.0 + (pt.1 - a.1) * d.1) / len2).clamp(0.0, 1.0) } else { 0.0 };
                ((pt.0 - a.0 - s * d.0).powi(2) + (pt.1 - a.1 - s * d.1).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, pt: (f64, f64), margin: f64) -> bool {
        pt.0 <= self.boundary_x(pt.1) || self.distance(pt) <= margin
    }
}

/// Overlay of sampled outer paths on the predicted curve.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlayStats {
    /// Topmost-path vertices inside the region inflated by the margin, over all vertices.
    pub inside_fraction: f64,
    /// Mean distance from the topmost-path vertices right of the apex to the curve.
    pub mean_distance: f64,
    pub vertices: usize,
}

pub fn overlay_stats(points: &[(f64, f64)], region: &OverlayRegion, apex_x: f64, margin: f64) -> OverlayStats {
    let inside = points.iter().filter(|&&p| region.contains(p, margin)).count();
    let right: Vec<f64> = points.iter().filter(|p| p.0 > apex_x).map(|&p| region.distance(p)).collect();
    OverlayStats {
        inside_fraction: if points.is_empty() { 1.0 } else { inside as f64 / points.len() as f64 },
        mean_distance: if right.is_empty() { 0.0 } else { right.iter().sum::<f64>() / right.len() as f64 },
        vertices: points.len(),
    }
}

/// Rescaled `(x/n, y/n)` vertices of the topmost path of every sample.
pub fn outer_shell(samples: &[PathConfiguration]) -> Vec<(f64, f64)> {
    samples
        .iter()
        .flat_map(|c| {
            let n = (c.words().len() - 1).max(1) as f64;
            c.vertices(c.words().len() - 1).into_iter().map(move |(x, y)| (x as f64 / n, y as f64 / n))
        })
        .collect()
}

/// SVG of the point cloud over the curve portions, plus a CSV of the cloud (`X,Y`).
pub fn overlay_export<W: Write>(
    samples: &[PathConfiguration],
    portions: &[ArcticPortion<f64>],
    alpha_end: f64,
    csv_out: W,
) -> csv::Result<String> {
    let pts = outer_shell(samples);
    let mut w = csv::Writer::from_writer(csv_out);
    w.write_record(["X", "Y"])?;
    for p in &pts {
        w.write_record([p.0.to_string(), p.1.to_string()])?;
    }
    w.flush()?;
    Ok(SvgFigure::new(alpha_end, portions).with_points(pts).render())
}
