use std::fmt;
use std::sync::Arc;

use num_traits::Num;

use super::{BoundaryError, StartSequence};
use crate::Real;

pub type Profile<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Local behaviour of α at an end of a curved piece.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndBehavior<T> {
    /// Finite one-sided derivative.
    Slope(T),
    /// `|α(u) - α(u_0)| ~ c |u - u_0|^exponent` with `0 < exponent < 1`, so α' is unbounded.
    Power { exponent: T },
}

/// Element of a piecewise-linear description, generic so that the same data can
/// be held exactly (rationals) or in floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum PlElement<N> {
    Segment { width: N, slope: N },
    Jump { height: N },
}

/// Smooth piece given by its local increment `g(s) = α(φ + s) - α(φ)` on `[0, width]`.
#[derive(Clone)]
pub struct CurvePiece<T> {
    pub width: T,
    pub rise: T,
    pub profile: Profile<T>,
    /// Accurate `rise - g(width - d)` for small `d`, when available.
    pub tail: Option<Profile<T>>,
    pub derivative: Option<Profile<T>>,
    pub left: EndBehavior<T>,
    pub right: EndBehavior<T>,
}

impl<T: Real> CurvePiece<T> {
    pub fn new(
        width: T,
        profile: Profile<T>,
        derivative: Option<Profile<T>>,
        left: EndBehavior<T>,
        right: EndBehavior<T>,
    ) -> Self {
        let rise = profile(width);
        Self { width, rise, profile, tail: None, derivative, left, right }
    }

    pub fn with_tail(mut self, tail: Profile<T>) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn g(&self, s: T) -> T {
        (self.profile)(s)
    }

    /// `α(end) - α(end - d)` within the piece.
    pub fn g_from_end(&self, d: T) -> T {
        match &self.tail {
            Some(t) => t(d),
            None => self.rise - self.g(self.width - d),
        }
    }

    /// α' inside the piece (finite differences when no derivative was supplied).
    pub fn slope(&self, s: T) -> T {
        if let Some(d) = &self.derivative {
            return d(s);
        }
        let h = self.width * T::lit(1e-6);
        let lo = (s - h).max(T::zero());
        let hi = (s + h).min(self.width);
        (self.g(hi) - self.g(lo)) / (hi - lo)
    }
}

impl<T: fmt::Debug> fmt::Debug for CurvePiece<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurvePiece")
            .field("width", &self.width)
            .field("rise", &self.rise)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum Piece<T> {
    /// Linear stretch; `slope == 1` exactly means a freezing boundary.
    Segment {
        width: T,
        slope: T,
    },
    /// Gap in the starting points: α advances by `height` with no advance in u.
    Jump {
        height: T,
    },
    Curve(CurvePiece<T>),
}

impl<T: Real> Piece<T> {
    pub fn width(&self) -> T {
        match self {
            Piece::Segment { width, .. } => *width,
            Piece::Jump { .. } => T::zero(),
            Piece::Curve(c) => c.width,
        }
    }

    pub fn rise(&self) -> T {
        match self {
            Piece::Segment { width, slope } => *width * *slope,
            Piece::Jump { height } => *height,
            Piece::Curve(c) => c.rise,
        }
    }

    pub fn is_frozen(&self) -> bool {
        matches!(self, Piece::Segment { slope, .. } if *slope == T::one())
    }

    pub fn is_jump(&self) -> bool {
        matches!(self, Piece::Jump { .. })
    }

    fn reversed(&self) -> Self {
        match self {
            Piece::Curve(c) => {
                let w = c.width;
                let rise = c.rise;
                let profile: Profile<T> = match &c.tail {
                    Some(t) => t.clone(),
                    None => {
                        let g = c.profile.clone();
                        Arc::new(move |s| rise - g(w - s))
                    }
                };
                let tail = Some(c.profile.clone());
                let derivative = c.derivative.clone().map(|d| {
                    let f: Profile<T> = Arc::new(move |s| d(w - s));
                    f
                });
                Piece::Curve(CurvePiece { width: w, rise, profile, tail, derivative, left: c.right, right: c.left })
            }
            other => other.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    PiecewiseLinear,
    Analytic,
}

/// Behaviour of α at u = 0 or u = 1, which selects the special-point formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeSlope<T> {
    /// α' > 1, finite.
    Transversal(T),
    /// α' = 1.
    Tangential,
    /// α' unbounded with the given local exponent.
    Infinite { exponent: T },
}

/// Scaling profile α(u) on [0, 1].
#[derive(Clone, Debug)]
pub struct BoundaryShape<T> {
    pieces: Vec<Piece<T>>,
    phi: Vec<T>,
    theta: Vec<T>,
    kind: ShapeKind,
}

/// Evaluator-based description, split into pieces by [`BoundaryShape::analytic`].
///
/// `alpha` is the continuous part of the profile; declared jumps are added on top,
/// so that α(u) = alpha(u) + Σ_{u_k ≤ u} δ_k.
#[derive(Clone)]
pub struct AnalyticShape<T> {
    pub alpha: Profile<T>,
    pub derivative: Option<Profile<T>>,
    /// Accurate `alpha(1) - alpha(1 - d)`, used by the last piece.
    pub tail: Option<Profile<T>>,
    pub frozen: Vec<(T, T)>,
    pub jumps: Vec<(T, T)>,
    pub left: EndBehavior<T>,
    pub right: EndBehavior<T>,
}

impl<T: Real> AnalyticShape<T> {
    pub fn new(alpha: Profile<T>, left: EndBehavior<T>, right: EndBehavior<T>) -> Self {
        Self { alpha, derivative: None, tail: None, frozen: Vec::new(), jumps: Vec::new(), left, right }
    }

    pub fn with_derivative(mut self, d: Profile<T>) -> Self {
        self.derivative = Some(d);
        self
    }

    pub fn with_tail(mut self, t: Profile<T>) -> Self {
        self.tail = Some(t);
        self
    }

    pub fn with_frozen(mut self, u1: T, u2: T) -> Self {
        self.frozen.push((u1, u2));
        self
    }

    pub fn with_jump(mut self, u: T, delta: T) -> Self {
        self.jumps.push((u, delta));
        self
    }
}

impl<T: Real> BoundaryShape<T> {
    /// α(u) = p u.
    pub fn linear(p: T) -> Result<Self, BoundaryError> {
        Self::piecewise(&[PlElement::Segment { width: T::one(), slope: p }])
    }

    pub fn piecewise(elements: &[PlElement<T>]) -> Result<Self, BoundaryError> {
        let pieces = elements
            .iter()
            .map(|e| match e {
                PlElement::Segment { width, slope } => Piece::Segment { width: *width, slope: *slope },
                PlElement::Jump { height } => Piece::Jump { height: *height },
            })
            .collect();
        Self::from_pieces(pieces)
    }

    /// Converts an exactly specified piecewise-linear profile.
    pub fn from_exact<N: Clone + num_traits::ToPrimitive>(elements: &[PlElement<N>]) -> Result<Self, BoundaryError> {
        let conv = |v: &N| T::lit(v.to_f64().unwrap_or(f64::NAN));
        let els: Vec<PlElement<T>> = elements
            .iter()
            .map(|e| match e {
                PlElement::Segment { width, slope } => PlElement::Segment { width: conv(width), slope: conv(slope) },
                PlElement::Jump { height } => PlElement::Jump { height: conv(height) },
            })
            .collect();
        Self::piecewise(&els)
    }

    pub fn analytic(spec: AnalyticShape<T>) -> Result<Self, BoundaryError> {
        let f = spec.alpha.clone();
        if f(T::zero()).abs() > T::width_tol() {
            return Err(BoundaryError::NonzeroOrigin);
        }
        let mut cuts = vec![T::zero(), T::one()];
        for &(u1, u2) in &spec.frozen {
            if !(u1 >= T::zero() && u2 <= T::one() && u1 < u2) {
                return Err(BoundaryError::BadInterval);
            }
            let rise = f(u2) - f(u1);
            if (rise - (u2 - u1)).abs() > T::lit(1e-9) {
                return Err(BoundaryError::FrozenMismatch);
            }
            cuts.push(u1);
            cuts.push(u2);
        }
        for &(u, d) in &spec.jumps {
            if !(u > T::zero() && u < T::one()) {
                return Err(BoundaryError::JumpAtEnd);
            }
            if !(d > T::zero()) {
                return Err(BoundaryError::BadJump);
            }
            cuts.push(u);
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();

        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let (u0, u1) = (w[0], w[1]);
            for &(ju, d) in &spec.jumps {
                if ju == u0 {
                    pieces.push(Piece::Jump { height: d });
                }
            }
            let frozen = spec.frozen.iter().any(|&(a, b)| a <= u0 && u1 <= b);
            if frozen {
                pieces.push(Piece::Segment { width: u1 - u0, slope: T::one() });
                continue;
            }
            let base = f(u0);
            let g = f.clone();
            let profile: Profile<T> = Arc::new(move |s| g(u0 + s) - base);
            let derivative = spec.derivative.clone().map(|d| {
                let p: Profile<T> = Arc::new(move |s| d(u0 + s));
                p
            });
            let end = |u: T, spec_end: EndBehavior<T>| {
                if u == T::zero() || u == T::one() {
                    return spec_end;
                }
                match &spec.derivative {
                    Some(d) => EndBehavior::Slope(d(u)),
                    None => EndBehavior::Slope(T::nan()),
                }
            };
            let left = end(u0, spec.left);
            let right = end(u1, spec.right);
            let mut piece = CurvePiece::new(u1 - u0, profile, derivative, left, right);
            if u1 == T::one() {
                piece.tail = spec.tail.clone();
            }
            pieces.push(Piece::Curve(piece));
        }
        let shape = Self::from_pieces(pieces)?;
        shape.check_monotone()?;
        Ok(shape)
    }

    /// General constructor; validates and normalizes the piece list.
    pub fn from_pieces(pieces: Vec<Piece<T>>) -> Result<Self, BoundaryError> {
        if pieces.is_empty() {
            return Err(BoundaryError::EmptyShape);
        }
        let mut merged: Vec<Piece<T>> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match &p {
                Piece::Segment { width, slope } => {
                    if !(*width > T::zero()) {
                        return Err(BoundaryError::BadWidth);
                    }
                    if !(*slope >= T::one()) || !slope.is_finite() {
                        return Err(BoundaryError::SlopeBelowOne(slope.to64()));
                    }
                }
                Piece::Jump { height } => {
                    if !(*height > T::zero()) || !height.is_finite() {
                        return Err(BoundaryError::BadJump);
                    }
                }
                Piece::Curve(c) => {
                    if !(c.width > T::zero()) || !(c.rise >= c.width * (T::one() - T::lit(1e-9))) {
                        return Err(BoundaryError::BadWidth);
                    }
                }
            }
            match (merged.last_mut(), &p) {
                (Some(Piece::Segment { width: w0, slope: s0 }), Piece::Segment { width, slope }) if s0 == slope => {
                    *w0 = *w0 + *width;
                }
                (Some(Piece::Jump { height: h0 }), Piece::Jump { height }) => {
                    *h0 = *h0 + *height;
                }
                _ => merged.push(p),
            }
        }
        if merged.first().is_some_and(Piece::is_jump) || merged.last().is_some_and(Piece::is_jump) {
            return Err(BoundaryError::JumpAtEnd);
        }
        let total: T = merged.iter().map(Piece::width).sum();
        if (total - T::one()).abs() > T::width_tol() {
            return Err(BoundaryError::WidthSum(total.to64()));
        }
        let mut phi = vec![T::zero()];
        let mut theta = vec![T::zero()];
        for p in &merged {
            phi.push(*phi.last().unwrap() + p.width());
            theta.push(*theta.last().unwrap() + p.rise());
        }
        let kind = if merged.iter().any(|p| matches!(p, Piece::Curve(_))) {
            ShapeKind::Analytic
        } else {
            ShapeKind::PiecewiseLinear
        };
        Ok(Self { pieces: merged, phi, theta, kind })
    }

    fn check_monotone(&self) -> Result<(), BoundaryError> {
        for p in &self.pieces {
            if let Piece::Curve(c) = p {
                let k = 512;
                let mut prev = T::zero();
                for j in 1..=k {
                    let s = c.width * T::int(j) / T::int(k);
                    let v = c.g(s);
                    let ds = c.width / T::int(k);
                    if v - prev < ds * (T::one() - T::lit(1e-9)) {
                        return Err(BoundaryError::SlopeBelowOne((v - prev).to64() / ds.to64()));
                    }
                    prev = v;
                }
            }
        }
        Ok(())
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    /// Cumulative widths at piece boundaries (`len = pieces + 1`).
    pub fn phi(&self) -> &[T] {
        &self.phi
    }

    /// Cumulative α values at piece boundaries (`len = pieces + 1`).
    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn kind(&self) -> ShapeKind {
        self.kind
    }

    pub fn alpha_end(&self) -> T {
        *self.theta.last().unwrap()
    }

    /// α(u), right-continuous at jumps.
    pub fn alpha(&self, u: T) -> T {
        let u = u.max(T::zero()).min(T::one());
        let mut best = None;
        for (i, p) in self.pieces.iter().enumerate() {
            if p.is_jump() {
                continue;
            }
            if u >= self.phi[i] && u <= self.phi[i + 1] {
                best = Some(i);
                if u < self.phi[i + 1] {
                    break;
                }
            }
        }
        let i = best.unwrap_or(self.pieces.len() - 1);
        let s = u - self.phi[i];
        self.theta[i]
            + match &self.pieces[i] {
                Piece::Segment { slope, .. } => *slope * s,
                Piece::Curve(c) => c.g(s),
                Piece::Jump { .. } => T::zero(),
            }
    }

    fn edge(&self, first: bool) -> EdgeSlope<T> {
        let p = if first { self.pieces.first() } else { self.pieces.last() }.unwrap();
        let behaviour = match p {
            Piece::Segment { slope, .. } => EndBehavior::Slope(*slope),
            Piece::Curve(c) => {
                if first {
                    c.left
                } else {
                    c.right
                }
            }
            Piece::Jump { .. } => unreachable!("jumps are interior"),
        };
        match behaviour {
            EndBehavior::Slope(v) if v == T::one() => EdgeSlope::Tangential,
            EndBehavior::Slope(v) => EdgeSlope::Transversal(v),
            EndBehavior::Power { exponent } => EdgeSlope::Infinite { exponent },
        }
    }

    pub fn start_slope(&self) -> EdgeSlope<T> {
        self.edge(true)
    }

    pub fn end_slope(&self) -> EdgeSlope<T> {
        self.edge(false)
    }

    /// Profile of the reflected boundary, α~(u) = α(1) - α(1 - u).
    pub fn reflect(&self) -> Self {
        let pieces = self.pieces.iter().rev().map(Piece::reversed).collect();
        Self::from_pieces(pieces).expect("reflection of a valid shape")
    }

    /// Checks α(u) + α(1-u) = α(1) on a grid avoiding jump points.
    pub fn is_symmetric(&self, tol: T) -> bool {
        let k = 997;
        let a1 = self.alpha_end();
        (0..k).all(|j| {
            let u = (T::int(j) + T::lit(0.5)) / T::int(k);
            (self.alpha(u) + self.alpha(T::one() - u) - a1).abs() <= tol
        })
    }

    /// Indices of slope-1 segments.
    pub fn frozen_pieces(&self) -> Vec<usize> {
        (0..self.pieces.len()).filter(|&i| self.pieces[i].is_frozen()).collect()
    }

    pub fn jump_pieces(&self) -> Vec<usize> {
        (0..self.pieces.len()).filter(|&i| self.pieces[i].is_jump()).collect()
    }

    /// Width ρ of a slope-1 stretch ending at u = 1, if any.
    pub fn right_freeze(&self) -> Option<T> {
        match self.pieces.last() {
            Some(p) if p.is_frozen() => Some(p.width()),
            _ => None,
        }
    }

    /// Starting points `a_i = floor(n α(i/n))`.
    pub fn realize(&self, n: usize) -> Result<StartSequence, BoundaryError> {
        if n == 0 {
            return StartSequence::new(vec![0]);
        }
        for i in self.jump_pieces() {
            let need = (T::one() / self.pieces[i].rise()).ceil().to64() as usize;
            if n < need {
                return Err(BoundaryError::TooCoarse { n, need });
            }
        }
        let nn = T::int(n as i64);
        let a: Vec<i64> = (0..=n)
            .map(|i| {
                let v = nn * self.alpha(T::int(i as i64) / nn);
                let nudge = T::lit(1e-9) * v.abs().max(T::one());
                (v + nudge).floor().to64() as i64
            })
            .collect();
        StartSequence::new(a).map_err(|_| BoundaryError::TooCoarse { n, need: n + 1 })
    }
}

/// Moments `∫_0^1 α(u)^k du` for `k = 0..=k_max` of a piecewise-linear profile,
/// exact when `N` is an exact field.
pub fn piecewise_moments<N: Num + Clone>(elements: &[PlElement<N>], k_max: usize) -> Vec<N> {
    let from_usize = |v: usize| (0..v).fold(N::zero(), |acc, _| acc + N::one());
    let pow = |x: &N, k: usize| (0..k).fold(N::one(), |acc, _| acc * x.clone());
    let mut out = vec![N::zero(); k_max + 1];
    let mut theta = N::zero();
    for e in elements {
        match e {
            PlElement::Jump { height } => theta = theta + height.clone(),
            PlElement::Segment { width, slope } => {
                let end = theta.clone() + width.clone() * slope.clone();
                for (k, m) in out.iter_mut().enumerate() {
                    let num = pow(&end, k + 1) - pow(&theta, k + 1);
                    *m = m.clone() + num / (slope.clone() * from_usize(k + 1));
                }
                theta = end;
            }
        }
    }
    out
}
