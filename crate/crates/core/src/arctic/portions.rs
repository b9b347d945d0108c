use std::fmt;

use rayon::prelude::*;

use crate::boundary::{EdgeSlope, Piece};
use crate::quadrature::QuadOptions;
use crate::Real;

use super::special::{left_edge_integral, right_edge_integral};
use super::{ArcticError, Resolvent, ResolventValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PortionKind {
    GenericI,
    GenericII,
    FrozenR,
    Gap,
    EdgeFreezeLeft,
    EdgeFreezeRight,
}

impl PortionKind {
    pub fn name(self) -> &'static str {
        match self {
            PortionKind::GenericI => "generic-I",
            PortionKind::GenericII => "generic-II",
            PortionKind::FrozenR => "frozen-R",
            PortionKind::Gap => "gap",
            PortionKind::EdgeFreezeLeft => "edge-freeze-left",
            PortionKind::EdgeFreezeRight => "edge-freeze-right",
        }
    }
}

impl fmt::Display for PortionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One sample of a portion: parameter, resolvent value and curve point `(X, Y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample<T> {
    pub t: T,
    pub x: T,
    /// `1 - x`, kept separately since x is within rounding of 1 near the apex.
    pub omx: T,
    pub px: T,
    pub py: T,
    pub slope: T,
}

impl<T: Real> CurveSample<T> {
    fn from_value(v: &ResolventValue<T>) -> Self {
        let (px, py) = v.point();
        Self { t: v.t, x: v.x(), omx: v.one_minus_x(), px, py, slope: v.slope() }
    }

    /// `x Y + (1 - x)(X - t)`, divided by `max(1, |x|)` so that the line has coefficients of order one.
    pub fn tangency_residual(&self) -> T {
        (self.x * self.py + self.omx * (self.px - self.t)) / self.x.abs().max(T::one())
    }
}

#[derive(Clone, Debug)]
pub struct ArcticPortion<T> {
    pub kind: PortionKind,
    /// Interior freezing portions follow from a conjectured continuation.
    pub conjectured: bool,
    /// Parameter range; may be half-infinite.
    pub domain: (T, T),
    /// Sorted by `t`.
    pub samples: Vec<CurveSample<T>>,
    pub cusps: Vec<T>,
    /// Parameters where x = 1, i.e. where the curve touches the X-axis at X = t.
    pub axis_contacts: Vec<T>,
}

impl<T: Real> ArcticPortion<T> {
    pub fn max_tangency_residual(&self) -> T {
        self.samples.iter().map(|s| s.tangency_residual().abs()).fold(T::zero(), T::max)
    }

    /// Samples violating `0 ≤ Y ≤ 1`, `0 ≤ X ≤ α(1)` or `Y ≤ X` beyond `tol`.
    pub fn domain_violations(&self, alpha_end: T, tol: T) -> usize {
        self.samples
            .iter()
            .filter(|s| {
                !(s.py >= -tol
                    && s.py <= T::one() + tol
                    && s.px >= -tol
                    && s.px <= alpha_end + tol
                    && s.py <= s.px + tol)
            })
            .count()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SamplingOptions {
    /// Base number of samples per portion.
    pub grid: usize,
    /// Endpoint refinement stops once successive points move by less than this.
    pub end_tol: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self { grid: 400, end_tol: 1e-7 }
    }
}

/// Solves `f(s) = target` for `f` monotone on `[lo, hi]`; `f` returns the value and its derivative.
fn monotone_root<T: Real>(
    f: &dyn Fn(T) -> Result<(T, T), ArcticError>,
    mut lo: T,
    mut hi: T,
    target: T,
) -> Result<Option<T>, ArcticError> {
    let (flo, _) = f(lo)?;
    let (fhi, _) = f(hi)?;
    let increasing = fhi > flo;
    let below = |v: T| if increasing { v < target } else { v > target };
    if below(flo) == below(fhi) {
        return Ok(None);
    }
    let mut s = (lo + hi) * T::lit(0.5);
    for _ in 0..200 {
        let (v, d) = f(s)?;
        let err = v - target;
        if err.abs() <= T::epsilon() * T::lit(8.0) * target.abs().max(T::one()) {
            return Ok(Some(s));
        }
        if below(v) {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - err / d;
        s = if newton > lo.min(hi) && newton < lo.max(hi) && d.is_finite() && d != T::zero() {
            newton
        } else {
            (lo + hi) * T::lit(0.5)
        };
        if (hi - lo).abs() <= T::epsilon() * T::lit(4.0) * s.abs().max(T::one()) {
            break;
        }
    }
    Ok(Some(s))
}

struct Sampler<'a, T: Real> {
    res: &'a Resolvent<T>,
    opts: SamplingOptions,
}

impl<T: Real> Sampler<'_, T> {
    fn at(&self, t: T) -> Option<CurveSample<T>> {
        let v = self.res.eval(t).ok()?;
        let s = CurveSample::from_value(&v);
        (s.px.is_finite() && s.py.is_finite() && s.x.is_finite()).then_some(s)
    }

    fn close(&self, a: &CurveSample<T>, b: &CurveSample<T>) -> bool {
        let tol = T::lit(self.opts.end_tol);
        (a.px - b.px).abs() < tol && (a.py - b.py).abs() < tol
    }

    /// Parameters `t(u)` for `u` approaching an end geometrically from a starting offset.
    fn refine(&self, param: &dyn Fn(T) -> Option<T>, start: T) -> Vec<CurveSample<T>> {
        let mut out: Vec<CurveSample<T>> = Vec::new();
        let mut h = start;
        for _ in 0..80 {
            h = h * T::lit(0.5);
            let Some(t) = param(h) else { break };
            let Some(s) = self.at(t) else { break };
            if let Some(prev) = out.last() {
                if prev.t == s.t {
                    break;
                }
                let done = self.close(prev, &s);
                out.push(s);
                if done {
                    break;
                }
            } else {
                out.push(s);
            }
        }
        out
    }

    /// Portion I: uniform in `x` on `(x(α(1)⁺), 1)`, with `t = α(1) + e^s`.
    fn generic_one(&self, quad: &QuadOptions<T>) -> Result<ArcticPortion<T>, ArcticError> {
        let shape = self.res.shape();
        let a1 = shape.alpha_end();
        let x_lo = match shape.end_slope() {
            EdgeSlope::Infinite { .. } => (-right_edge_integral(shape, 1, T::zero(), quad)?).exp(),
            _ => T::zero(),
        };
        let s_lo = (a1.abs().max(T::one()) * T::epsilon() * T::lit(64.0)).ln();
        let s_hi = (T::one() / T::epsilon().sqrt()).ln() * T::lit(2.0);
        let f = |s: T| -> Result<(T, T), ArcticError> {
            let v = self.res.eval(a1 + s.exp())?;
            Ok((v.log_abs, v.q * s.exp()))
        };
        let param = |x: T| -> Option<T> { monotone_root(&f, s_lo, s_hi, x.ln()).ok().flatten().map(|s| a1 + s.exp()) };
        self.unbounded(PortionKind::GenericI, (a1, T::infinity()), x_lo, &param)
    }

    /// Portion II: uniform in `σ = 1/x` on `(1/x(0⁻), 1)`, with `t = -e^s`.
    fn generic_two(&self, quad: &QuadOptions<T>) -> Result<ArcticPortion<T>, ArcticError> {
        let shape = self.res.shape();
        let sigma_lo = match shape.start_slope() {
            EdgeSlope::Infinite { .. } => (-left_edge_integral(shape, 1, T::zero(), quad)?).exp(),
            _ => T::zero(),
        };
        let s_lo = (shape.alpha_end().abs().max(T::one()) * T::epsilon() * T::lit(64.0)).ln();
        let s_hi = (T::one() / T::epsilon().sqrt()).ln() * T::lit(2.0);
        let f = |s: T| -> Result<(T, T), ArcticError> {
            let v = self.res.eval(-s.exp())?;
            Ok((-v.log_abs, v.q * s.exp()))
        };
        let param =
            |sigma: T| -> Option<T> { monotone_root(&f, s_lo, s_hi, sigma.ln()).ok().flatten().map(|s| -s.exp()) };
        self.unbounded(PortionKind::GenericII, (T::neg_infinity(), T::zero()), sigma_lo, &param)
    }

    /// Samples over a variable running uniformly from `lo` to 1, refined at both ends.
    fn unbounded(
        &self,
        kind: PortionKind,
        domain: (T, T),
        lo: T,
        param: &(dyn Fn(T) -> Option<T> + Sync),
    ) -> Result<ArcticPortion<T>, ArcticError> {
        let n = self.opts.grid.max(3);
        let step = (T::one() - lo) / T::int(n as i64 + 1);
        let mut samples: Vec<CurveSample<T>> = (1..=n)
            .into_par_iter()
            .filter_map(|k| param(lo + step * T::int(k as i64)).and_then(|t| self.at(t)))
            .collect();
        samples.extend(self.refine(&|h| param(lo + h), step));
        samples.extend(self.refine(&|h| param(T::one() - h), step));
        Ok(self.finish(kind, false, domain, samples))
    }

    /// Bounded interval `(t0, t1)`: Chebyshev nodes plus endpoint refinement.
    fn bounded(&self, kind: PortionKind, conjectured: bool, t0: T, t1: T) -> ArcticPortion<T> {
        let n = self.opts.grid.max(3);
        let half = (t1 - t0) * T::lit(0.5);
        let node = |k: usize| {
            let c = (T::PI() * (T::int(k as i64) + T::lit(0.5)) / T::int(n as i64)).cos();
            t0 + half * (T::one() - c)
        };
        let mut samples: Vec<CurveSample<T>> = (0..n).into_par_iter().filter_map(|k| self.at(node(k))).collect();
        let first = node(0) - t0;
        let inside = |t: T| (t > t0 && t < t1).then_some(t);
        samples.extend(self.refine(&|h| inside(t0 + h), first * T::lit(2.0)));
        samples.extend(self.refine(&|h| inside(t1 - h), first * T::lit(2.0)));
        self.finish(kind, conjectured, (t0, t1), samples)
    }

    fn finish(
        &self,
        kind: PortionKind,
        conjectured: bool,
        domain: (T, T),
        mut samples: Vec<CurveSample<T>>,
    ) -> ArcticPortion<T> {
        samples.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
        samples.dedup_by(|a, b| a.t == b.t);
        let cusps = find_cusps(self.res, &samples);
        let axis_contacts = find_axis_contacts(self.res, &samples);
        ArcticPortion { kind, conjectured, domain, samples, cusps, axis_contacts }
    }
}

fn bisect<T: Real>(mut lo: T, mut hi: T, positive: impl Fn(T) -> Option<bool>) -> Option<T> {
    let at_lo = positive(lo)?;
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if (hi - lo).abs() <= T::lit(1e-12) * mid.abs().max(T::one()) || mid == lo || mid == hi {
            break;
        }
        if positive(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) * T::lit(0.5))
}

/// Parameters where dX/dt changes sign while 1 - x keeps its sign.
pub fn find_cusps<T: Real>(res: &Resolvent<T>, samples: &[CurveSample<T>]) -> Vec<T> {
    let vel = |t: T| res.eval(t).ok().map(|v| (v.velocity().0, v.one_minus_x()));
    let data: Vec<Option<(T, T)>> = samples.par_iter().map(|s| vel(s.t)).collect();
    let mut out = Vec::new();
    for i in 1..samples.len() {
        let (Some((d0, m0)), Some((d1, m1))) = (data[i - 1], data[i]) else { continue };
        if (d0 > T::zero()) != (d1 > T::zero()) && (m0 > T::zero()) == (m1 > T::zero()) {
            if let Some(t) = bisect(samples[i - 1].t, samples[i].t, |t| vel(t).map(|v| v.0 > T::zero())) {
                out.push(t);
            }
        }
    }
    out
}

/// Parameters where x crosses 1 (Y = 0 there).
pub fn find_axis_contacts<T: Real>(res: &Resolvent<T>, samples: &[CurveSample<T>]) -> Vec<T> {
    let mut out = Vec::new();
    for w in samples.windows(2) {
        if (w[0].x > T::one()) != (w[1].x > T::one()) && w[0].x > T::zero() && w[1].x > T::zero() {
            if let Some(t) = bisect(w[0].t, w[1].t, |t| res.eval(t).ok().map(|v| v.log_abs > T::zero())) {
                out.push(t);
            }
        }
    }
    out
}

/// All portions of the arctic curve: the two generic ones, one per slope-1 stretch and one per gap.
pub fn portions<T: Real>(res: &Resolvent<T>, opts: SamplingOptions) -> Result<Vec<ArcticPortion<T>>, ArcticError> {
    let shape = res.shape();
    let sampler = Sampler { res, opts };
    let quad = *res.options();
    let mut out = vec![sampler.generic_one(&quad)?, sampler.generic_two(&quad)?];
    let th = shape.theta();
    let last = shape.pieces().len() - 1;
    for (i, p) in shape.pieces().iter().enumerate() {
        let (kind, conjectured) = match p {
            Piece::Jump { .. } => (PortionKind::Gap, true),
            _ if p.is_frozen() && i == 0 => (PortionKind::EdgeFreezeLeft, false),
            _ if p.is_frozen() && i == last => (PortionKind::EdgeFreezeRight, false),
            _ if p.is_frozen() => (PortionKind::FrozenR, true),
            _ => continue,
        };
        out.push(sampler.bounded(kind, conjectured, th[i], th[i + 1]));
    }
    Ok(out)
}
