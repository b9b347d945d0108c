//! Saddle-point actions, most likely exit solutions and rate functions, and a harness
//! comparing `(1/n) log` of exact one-point functions with the predicted actions.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::arctic::{apex, curve_density, ArcticError, Resolvent};
use crate::boundary::{BoundaryError, BoundaryShape, Piece};
use crate::onepoint::{ln_rational, HEvaluator, HhatEvaluator, OnePointError};
use crate::quadrature::{integrate_singular, Offset, QuadError, QuadOptions};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error(transparent)]
    Arctic(#[from] ArcticError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    OnePoint(#[from] OnePointError),
    #[error("no saddle point brackets ξ = {0}")]
    NoBracket(f64),
    #[error("t = {0} is outside the admissible range of this family")]
    OutsideDomain(f64),
    #[error("the hat family needs a slope-1 stretch ending at u = 1")]
    NoEdgeFreeze,
    #[error("unknown family `{0}` (expected I, II or hat)")]
    UnknownFamily(String),
}

/// Which exit geometry the actions describe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Exit on the top boundary, moved endpoint to the west; t > α(1).
    I,
    /// Exit on the top boundary, moved endpoint to the east; t < 0.
    II,
    /// Exit on the right boundary above an edge freeze; α(1) - ρ < t < α(1).
    Hat,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::I, Family::II, Family::Hat];

    pub fn name(self) -> &'static str {
        match self {
            Family::I => "I",
            Family::II => "II",
            Family::Hat => "hat",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = AsymptoticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" | "i" | "1" => Ok(Family::I),
            "II" | "ii" | "2" => Ok(Family::II),
            "hat" => Ok(Family::Hat),
            other => Err(AsymptoticsError::UnknownFamily(other.to_string())),
        }
    }
}

/// `v log v` with the convention `0 log 0 = 0`.
fn xlogx<T: Real>(v: T) -> T {
    if v == T::zero() {
        T::zero()
    } else {
        v * v.ln()
    }
}

/// `f(a + d) - f(a - d)` for `f(v) = v log v`, rearranged to avoid cancellation.
fn xlogx_diff<T: Real>(a: T, d: T) -> T {
    a * ((d / a).ln_1p() - (-d / a).ln_1p()) + d * (a * a - d * d).ln()
}

/// `∫_{θ0}^{θ1} log|c - v| dv`.
fn segment_log<T: Real>(c: T, t0: T, t1: T) -> T {
    xlogx((c - t0).abs()) * (c - t0).signum() - xlogx((c - t1).abs()) * (c - t1).signum() - (t1 - t0)
}

/// `∫_0^1 log|t - α(u)| du` for t outside `[0, α(1)]`.
pub fn log_integral<T: Real>(shape: &BoundaryShape<T>, t: T, opts: &QuadOptions<T>) -> Result<T, QuadError> {
    let th = shape.theta();
    let mut acc = T::zero();
    for (i, p) in shape.pieces().iter().enumerate() {
        let (t0, t1) = (th[i], th[i + 1]);
        match p {
            Piece::Jump { .. } => {}
            Piece::Segment { slope, .. } => acc = acc + segment_log(t, t0, t1) / *slope,
            Piece::Curve(c) => {
                let f = |o: Offset<T>| {
                    let d = match o {
                        Offset::FromLeft(s) => t - t0 - c.g(s),
                        Offset::FromRight(s) => t - t1 + c.g_from_end(s),
                    };
                    [d.abs().ln()]
                };
                acc = acc + integrate_singular(f, T::zero(), c.width, None, None, opts)?[0];
            }
        }
    }
    Ok(acc)
}

/// `∫ (1 - ρ(v)) log((c - v)/(t - v)) dv` over `[0, α(1)]`, the integral over the
/// complementary sequence appearing in the hat action. Requires `t, c ≥` every point
/// where the complementary density is nonzero.
pub fn complement_log_ratio<T: Real>(
    shape: &BoundaryShape<T>,
    c: T,
    t: T,
    opts: &QuadOptions<T>,
) -> Result<T, QuadError> {
    let th = shape.theta();
    let mut acc = T::zero();
    for (i, p) in shape.pieces().iter().enumerate() {
        let (t0, t1) = (th[i], th[i + 1]);
        let weight = match p {
            Piece::Jump { .. } => T::one(),
            Piece::Segment { slope, .. } => T::one() - T::one() / *slope,
            Piece::Curve(cp) => {
                let f = |o: Offset<T>| {
                    let v = o.u(t0, t1);
                    [(T::one() - curve_density(cp, v - t0)) * ((c - v) / (t - v)).ln()]
                };
                acc = acc + integrate_singular(f, t0, t1, None, None, opts)?[0];
                continue;
            }
        };
        if weight != T::zero() {
            acc = acc + weight * (segment_log(c, t0, t1) - segment_log(t, t0, t1));
        }
    }
    Ok(acc)
}

/// Exit position and escape-path parameter for one value of t: `(ξ, z)` for family I,
/// `(ξ, z~)` for family II, `(ξ^, w)` for the hat family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExitSolution<T> {
    pub t: T,
    pub xi: T,
    pub z: T,
}

/// Root of `∂_t S0 = 0` for a given exit position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Saddle<T> {
    pub t: T,
    /// `|∂_t S0|` at the returned t.
    pub residual: T,
    /// ξ sits at the apex end of the range, where the saddle runs off to infinity.
    pub divergent: bool,
}

/// Parametric samples `(ξ(t), S0(ξ(t)))`, sorted by ξ.
#[derive(Clone, Debug)]
pub struct RateFunction<T> {
    pub family: Family,
    pub samples: Vec<(T, T)>,
}

/// Actions `S0`, `S1` of one family for one shape.
#[derive(Clone, Debug)]
pub struct Actions<T: Real> {
    family: Family,
    res: Resolvent<T>,
    /// `X1`, or `ρ` for the hat family.
    edge: T,
}

impl<T: Real> Actions<T> {
    pub fn new(shape: BoundaryShape<T>, family: Family) -> Result<Self, AsymptoticsError> {
        let edge = match family {
            Family::Hat => shape.right_freeze().ok_or(AsymptoticsError::NoEdgeFreeze)?,
            _ => apex(&shape)?,
        };
        Ok(Self { family, res: Resolvent::new(shape), edge })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn resolvent(&self) -> &Resolvent<T> {
        &self.res
    }

    fn a1(&self) -> T {
        self.res.shape().alpha_end()
    }

    fn opts(&self) -> &QuadOptions<T> {
        self.res.options()
    }

    /// Open t-range of the family.
    pub fn t_range(&self) -> (T, T) {
        match self.family {
            Family::I => (self.a1(), T::infinity()),
            Family::II => (T::neg_infinity(), T::zero()),
            Family::Hat => (self.a1() - self.edge, self.a1()),
        }
    }

    fn check_t(&self, t: T) -> Result<(), AsymptoticsError> {
        let (lo, hi) = self.t_range();
        if t > lo && t < hi {
            Ok(())
        } else {
            Err(AsymptoticsError::OutsideDomain(t.to64()))
        }
    }

    /// `(X1, α(1))` for family I, `(1, X1)` for family II, `(ξ^(α(1)-ρ), ξ^(α(1)))` for the hat family.
    pub fn xi_range(&self) -> Result<(T, T), AsymptoticsError> {
        Ok(match self.family {
            Family::I => (self.edge, self.a1()),
            Family::II => (T::one(), self.edge),
            Family::Hat => {
                let (lo, hi) = self.t_range();
                let eps = self.edge * T::lit(1e-9);
                let a = self.exit(lo + eps)?.xi;
                let b = self.exit(hi - eps)?.xi;
                (a.min(b), a.max(b))
            }
        })
    }

    /// `log y(t)` for the hat family.
    fn log_y(&self, t: T) -> Result<T, AsymptoticsError> {
        Ok(self.res.y_complement(t)?.ln())
    }

    /// Most likely exit for the tangent line with intercept t.
    pub fn exit(&self, t: T) -> Result<ExitSolution<T>, AsymptoticsError> {
        self.check_t(t)?;
        let one = T::one();
        Ok(match self.family {
            Family::I => {
                let v = self.res.eval(t)?;
                let (x, omx) = (v.x(), v.one_minus_x());
                ExitSolution { t, xi: t - x / omx, z: t * omx / x - one }
            }
            Family::II => {
                let v = self.res.eval(t)?;
                let (x, omx) = (v.x(), v.one_minus_x());
                ExitSolution { t, xi: t - x / omx, z: -(self.a1() - t) * omx / x - one }
            }
            Family::Hat => {
                let mu = self.a1() - one;
                let ty = t * self.log_y(t)?.exp();
                let s = t - ty;
                ExitSolution { t, xi: t - mu - ty, z: (s - mu) / (one + mu - s) * (one + mu - t) }
            }
        })
    }

    /// `S0(t, ξ)` (or `S~0`, `S^0`).
    pub fn s0(&self, t: T, xi: T) -> Result<T, AsymptoticsError> {
        let one = T::one();
        Ok(match self.family {
            Family::I => -one + xlogx(t + one - xi) - xlogx(t - xi) - log_integral(self.res.shape(), t, self.opts())?,
            Family::II => -one - xlogx(xi - t - one) + xlogx(xi - t) - log_integral(self.res.shape(), t, self.opts())?,
            Family::Hat => {
                let a1 = self.a1();
                let mu = a1 - one;
                complement_log_ratio(self.res.shape(), a1, t, self.opts())? + xlogx(t) - xlogx(t - mu - xi) - xlogx(a1)
                    + xlogx(one - xi)
            }
        })
    }

    /// `S1(ξ, z)` (or `S~1(ξ, z~)`, `S^1(ξ^)` with `z = w`).
    pub fn s1(&self, xi: T, z: T) -> T {
        match self.family {
            Family::I => xlogx(xi + z) - xlogx(xi) - xlogx(z),
            Family::II => {
                let r = self.a1() - xi;
                xlogx(r) - xlogx(z) - xlogx(r - z)
            }
            Family::Hat => xlogx(xi) - xlogx(z) - xlogx(xi - z),
        }
    }

    /// `∂_t S0(t, ξ)`.
    pub fn dt_s0(&self, t: T, xi: T) -> Result<T, AsymptoticsError> {
        Ok(match self.family {
            Family::I => (T::one() / (t - xi)).ln_1p() + self.res.eval(t)?.log_abs,
            Family::II => (-T::one() / (xi - t)).ln_1p() + self.res.eval(t)?.log_abs,
            Family::Hat => {
                let mu = self.a1() - T::one();
                self.log_y(t)? + (t / (t - mu - xi)).ln()
            }
        })
    }

    /// Bracketing variable `s ↦ t` covering the family's t-range.
    fn t_of(&self, s: T) -> T {
        match self.family {
            Family::I => self.a1() + s.exp(),
            Family::II => -s.exp(),
            Family::Hat => self.a1() - self.edge * s,
        }
    }

    fn s_range(&self) -> (T, T) {
        match self.family {
            Family::I | Family::II => {
                let lo = (self.a1().max(T::one()) * T::epsilon() * T::lit(64.0)).ln();
                (lo, -lo)
            }
            Family::Hat => (T::lit(1e-12), T::one() - T::lit(1e-12)),
        }
    }

    /// Saddle point `t*(ξ)`: bracket on a grid in the bracketing variable, then bisection.
    pub fn saddle_t(&self, xi: T) -> Result<Saddle<T>, AsymptoticsError> {
        let (xlo, xhi) = self.xi_range()?;
        let apex_end = match self.family {
            Family::I => xi <= xlo,
            Family::II => xi >= xhi,
            Family::Hat => false,
        };
        if apex_end {
            return Ok(Saddle {
                t: self.t_range().1.max(self.t_range().0.abs()),
                residual: T::zero(),
                divergent: true,
            });
        }
        let (s_lo, s_hi) = self.s_range();
        let g = |s: T| -> Option<T> {
            let t = self.t_of(s);
            self.dt_s0(t, xi).ok().filter(|v| v.is_finite())
        };
        let steps = 400;
        let mut prev: Option<(T, T)> = None;
        let mut bracket = None;
        for k in 0..=steps {
            let s = s_lo + (s_hi - s_lo) * T::int(k) / T::int(steps);
            let Some(v) = g(s) else { continue };
            if v == T::zero() {
                bracket = Some((s, s));
                break;
            }
            if let Some((ps, pv)) = prev {
                if (pv > T::zero()) != (v > T::zero()) {
                    bracket = Some((ps, s));
                    break;
                }
            }
            prev = Some((s, v));
        }
        let (mut a, mut b) = bracket.ok_or(AsymptoticsError::NoBracket(xi.to64()))?;
        let ga = g(a).unwrap_or(T::zero());
        for _ in 0..300 {
            let m = (a + b) * T::lit(0.5);
            if m == a || m == b {
                break;
            }
            match g(m) {
                Some(v) if (v > T::zero()) == (ga > T::zero()) => a = m,
                Some(_) => b = m,
                None => break,
            }
        }
        let (fa, fb) = (g(a).unwrap_or(T::infinity()).abs(), g(b).unwrap_or(T::infinity()).abs());
        let s = if fa <= fb { a } else { b };
        Ok(Saddle { t: self.t_of(s), residual: fa.min(fb), divergent: false })
    }

    /// `S0(ξ) = S0(t*(ξ), ξ)`; zero at the apex end.
    pub fn rate(&self, xi: T) -> Result<T, AsymptoticsError> {
        let sd = self.saddle_t(xi)?;
        if sd.divergent {
            return Ok(T::zero());
        }
        self.s0(sd.t, xi)
    }

    /// Samples of the rate function on `grid` values of the bracketing variable.
    pub fn rate_function(&self, grid: usize) -> Result<RateFunction<T>, AsymptoticsError> {
        let (s_lo, mut s_hi) = self.s_range();
        if self.family != Family::Hat {
            // beyond |t| ~ 1e4 the action is below its own rounding; the apex point closes the curve
            s_hi = (T::lit(1e4) * self.a1().max(T::one())).ln();
        }
        let mut samples: Vec<(T, T)> = (0..=grid)
            .into_par_iter()
            .filter_map(|k| {
                let t = self.t_of(s_lo + (s_hi - s_lo) * T::int(k as i64) / T::int(grid as i64));
                let e = self.exit(t).ok()?;
                let v = self.s0(t, e.xi).ok()?;
                (e.xi.is_finite() && v.is_finite()).then_some((e.xi, v))
            })
            .collect();
        if self.family != Family::Hat {
            samples.push((self.edge, T::zero()));
        }
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(RateFunction { family: self.family, samples })
    }

    /// ξ-dependent terms of `S0 + S1` as `(c, a)` pairs standing for `c · f(a + ξ sgn c)`
    /// with `f(v) = v log v`; `|c| = 1` and the sign of c carries the orientation.
    fn xi_terms(&self, t: T, xi: T, z: T) -> [(T, T, T); 4] {
        let (p, m) = (T::one(), -T::one());
        let a1 = self.a1();
        match self.family {
            // (coefficient, ξ-orientation, argument at the current ξ)
            Family::I => [(p, m, t + p - xi), (m, m, t - xi), (p, p, xi + z), (m, p, xi)],
            Family::II => [(m, p, xi - t - p), (p, p, xi - t), (p, m, a1 - xi), (m, m, a1 - xi - z)],
            Family::Hat => {
                let mu = a1 - p;
                [(m, m, t - mu - xi), (p, m, p - xi), (p, p, xi), (m, p, xi - z)]
            }
        }
    }

    /// Centered difference of `S0 + S1` in ξ at fixed t and z, at the exit solution for t.
    /// Only the ξ-dependent terms are differenced, each in a cancellation-free form.
    pub fn action_gradient(&self, t: T, h: T) -> Result<T, AsymptoticsError> {
        let e = self.exit(t)?;
        let diff: T = self.xi_terms(t, e.xi, e.z).iter().map(|&(c, o, a)| c * o * xlogx_diff(a, h)).sum();
        Ok(diff / (h + h))
    }
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub family: Family,
    pub n: usize,
    pub xi: f64,
    pub exact_log_over_n: f64,
    pub predicted_s0: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Largest deviation for each n, in the order of first appearance.
    pub fn max_deviation_by_n(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for r in &self.rows {
            match out.iter_mut().find(|(n, _)| *n == r.n) {
                Some(e) => e.1 = e.1.max(r.deviation),
                None => out.push((r.n, r.deviation)),
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["family", "n", "xi", "exact_log_over_n", "predicted_S0", "deviation"])?;
        for r in &self.rows {
            w.write_record([
                r.family.name().to_string(),
                r.n.to_string(),
                r.xi.to_string(),
                r.exact_log_over_n.to_string(),
                r.predicted_s0.to_string(),
                r.deviation.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Margin kept away from the ends of the ξ-range, where the saddle degenerates.
pub const XI_MARGIN: f64 = 0.02;

/// Compares `(1/n) log H` (H, H~ or Ĥ by family) of the realized sequences with the
/// predicted rate at every `ξ = ℓ/n` inside `window` (default: the family's ξ-range
/// shrunk by [`XI_MARGIN`]).
pub fn convergence_study(
    shape: &BoundaryShape<f64>,
    ns: &[usize],
    family: Family,
    window: Option<(f64, f64)>,
) -> Result<ConvergenceTable, AsymptoticsError> {
    let actions = Actions::new(shape.clone(), family)?;
    let (lo, hi) = match window {
        Some((lo, hi)) => {
            // exits with exact values: I on [0, a_n], II on [n - 1, a_n], hat on [0, n + 1]
            let (a, b) = match family {
                Family::I => (0.0, shape.alpha_end()),
                Family::II => (1.0, shape.alpha_end()),
                Family::Hat => (0.0, 1.0),
            };
            for v in [lo, hi] {
                if !(a..=b).contains(&v) {
                    return Err(AsymptoticsError::OutsideDomain(v));
                }
            }
            (lo, hi)
        }
        None => {
            let (a, b) = actions.xi_range()?;
            (a + XI_MARGIN, b - XI_MARGIN)
        }
    };
    let per_n: Vec<Result<Vec<ConvergenceRow>, AsymptoticsError>> = ns
        .par_iter()
        .map(|&n| {
            let seq = shape.realize(n)?;
            let nf = n as f64;
            let ells: Vec<i64> = ((lo * nf).ceil() as i64..=(hi * nf).floor() as i64).collect();
            enum Exact {
                Plain(HEvaluator),
                Reflected(HEvaluator, i64),
                Hat(HhatEvaluator),
            }
            let exact = match family {
                Family::I => Exact::Plain(HEvaluator::new(&seq)),
                // H~(ℓ) = H(a~, a_n - ℓ + n)
                Family::II => Exact::Reflected(HEvaluator::new(&seq.tilde().as_sequence()), seq.last() + n as i64),
                Family::Hat => Exact::Hat(HhatEvaluator::new(&seq)?),
            };
            ells.par_iter()
                .map(|&ell| {
                    let v = match &exact {
                        Exact::Plain(e) => e.eval(ell)?,
                        Exact::Reflected(e, shift) => e.eval(shift - ell)?,
                        Exact::Hat(e) => e.eval(ell)?,
                    };
                    let xi = ell as f64 / nf;
                    let exact_log_over_n = ln_rational(&v) / nf;
                    let predicted_s0 = actions.rate(xi)?;
                    Ok(ConvergenceRow {
                        family,
                        n,
                        xi,
                        exact_log_over_n,
                        predicted_s0,
                        deviation: (exact_log_over_n - predicted_s0).abs(),
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_n {
        rows.extend(r?);
    }
    Ok(ConvergenceTable { rows })
}
