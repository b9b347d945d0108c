use crate::boundary::{BoundaryShape, Piece};
use crate::quadrature::{integrate_singular, Offset, QuadOptions};
use crate::Real;

use super::ArcticError;

/// How a resolvent value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
    /// Inside a slope-1 stretch or a gap, where the integral is continued analytically.
    Continuation,
}

/// `x(t)` in log-modulus/sign form together with `q = x'/x` and `q'`.
#[derive(Clone, Copy, Debug)]
pub struct ResolventValue<T> {
    pub t: T,
    pub log_abs: T,
    pub negative: bool,
    pub q: T,
    pub dq: T,
    pub method: Method,
}

impl<T: Real> ResolventValue<T> {
    pub fn x(&self) -> T {
        let m = self.log_abs.exp();
        if self.negative {
            -m
        } else {
            m
        }
    }

    /// `1 - x`, accurate when x is close to 1.
    pub fn one_minus_x(&self) -> T {
        if self.negative {
            T::one() + self.log_abs.exp()
        } else {
            -self.log_abs.exp_m1()
        }
    }

    pub fn x_prime(&self) -> T {
        self.x() * self.q
    }

    /// Point of the envelope, `X = t - (1-x)/q`, `Y = (1-x)^2/(x q)`.
    pub fn point(&self) -> (T, T) {
        let omx = self.one_minus_x();
        (self.t - omx / self.q, omx * omx / (self.x() * self.q))
    }

    /// `dX/dt = 1 + x + (1-x) q'/q^2`; `dY/dt = -(1-x)/x dX/dt`.
    pub fn velocity(&self) -> (T, T) {
        let x = self.x();
        let omx = self.one_minus_x();
        let dx = T::one() + x + omx * self.dq / (self.q * self.q);
        (dx, -omx / x * dx)
    }

    /// Slope `-(1-x)/x` of the tangent line through `(t, 0)`.
    pub fn slope(&self) -> T {
        -self.one_minus_x() / self.x()
    }
}

/// `t ↦ x(t) = exp(-∫ du/(t - α(u)))` for one boundary shape.
#[derive(Clone, Debug)]
pub struct Resolvent<T: Real> {
    shape: BoundaryShape<T>,
    opts: QuadOptions<T>,
}

impl<T: Real> Resolvent<T> {
    pub fn new(shape: BoundaryShape<T>) -> Self {
        Self { shape, opts: QuadOptions::default() }
    }

    pub fn with_options(mut self, opts: QuadOptions<T>) -> Self {
        self.opts = opts;
        self
    }

    pub fn shape(&self) -> &BoundaryShape<T> {
        &self.shape
    }

    pub fn options(&self) -> &QuadOptions<T> {
        &self.opts
    }

    pub fn eval(&self, t: T) -> Result<ResolventValue<T>, ArcticError> {
        if !t.is_finite() {
            return Err(ArcticError::Singular(t.to64()));
        }
        let th = self.shape.theta();
        let mut log_abs = T::zero();
        let mut q = T::zero();
        let mut dq = T::zero();
        let mut negative = false;
        let mut method = Method::ClosedForm;
        for (i, p) in self.shape.pieces().iter().enumerate() {
            let (t0, t1) = (th[i], th[i + 1]);
            let a = t - t0;
            let b = t - t1;
            let inside = a > T::zero() && b < T::zero();
            match p {
                Piece::Jump { .. } => {
                    if inside {
                        method = Method::Continuation;
                    }
                }
                Piece::Segment { slope, .. } => {
                    if a == T::zero() || b == T::zero() {
                        return Err(ArcticError::Singular(t.to64()));
                    }
                    if inside {
                        if *slope != T::one() {
                            return Err(ArcticError::BranchCut(t.to64()));
                        }
                        negative = !negative;
                        method = Method::Continuation;
                    }
                    let rise = t1 - t0;
                    let r = rise / a;
                    let ln = if !inside && r.abs() < T::lit(0.5) { (-r).ln_1p() } else { (b / a).abs().ln() };
                    log_abs = log_abs + ln / *slope;
                    let w = rise / *slope;
                    q = q + w / (a * b);
                    dq = dq - w * (a + b) / (a * a * b * b);
                }
                Piece::Curve(c) => {
                    if a >= T::zero() && b <= T::zero() {
                        return Err(if a == T::zero() || b == T::zero() {
                            ArcticError::Singular(t.to64())
                        } else {
                            ArcticError::BranchCut(t.to64())
                        });
                    }
                    if method == Method::ClosedForm {
                        method = Method::Quadrature;
                    }
                    let f = |o: Offset<T>| {
                        let d = match o {
                            Offset::FromLeft(s) => a - c.g(s),
                            Offset::FromRight(s) => b + c.g_from_end(s),
                        };
                        let r = T::one() / d;
                        [r, r * r, r * r * r]
                    };
                    let v = integrate_singular(f, T::zero(), c.width, None, None, &self.opts)?;
                    log_abs = log_abs - v[0];
                    q = q + v[1];
                    dq = dq - T::lit(2.0) * v[2];
                }
            }
        }
        Ok(ResolventValue { t, log_abs, negative, q, dq, method })
    }

    pub fn x(&self, t: T) -> Result<T, ArcticError> {
        Ok(self.eval(t)?.x())
    }

    pub fn x_prime(&self, t: T) -> Result<T, ArcticError> {
        Ok(self.eval(t)?.x_prime())
    }

    /// Envelope point at parameter `t`.
    pub fn curve_point(&self, t: T) -> Result<(T, T), ArcticError> {
        let v = self.eval(t)?;
        if v.q == T::zero() || !v.q.is_finite() {
            return Err(ArcticError::Degenerate(t.to64()));
        }
        Ok(v.point())
    }

    /// Complementary-density form `x(t) = -(α(1) - t) / (t y(t))`, valid on a
    /// right frozen interval `(α(1) - ρ, α(1))`.
    pub fn complement_form(&self, t: T) -> Result<T, ArcticError> {
        Ok(-(self.shape.alpha_end() - t) / (t * self.y_complement(t)?))
    }

    /// `y(t) = exp(-∫ (1 - ρ(v)) dv / (t - v))` from the density of the complementary sequence.
    pub fn y_complement(&self, t: T) -> Result<T, ArcticError> {
        let th = self.shape.theta();
        let mut acc = T::zero();
        for (i, p) in self.shape.pieces().iter().enumerate() {
            let (t0, t1) = (th[i], th[i + 1]);
            if t0 < t && t < t1 && !p.is_frozen() {
                return Err(ArcticError::BranchCut(t.to64()));
            }
            let weight = match p {
                Piece::Jump { .. } => T::one(),
                Piece::Segment { slope, .. } => T::one() - T::one() / *slope,
                Piece::Curve(c) => {
                    let f = |o: Offset<T>| {
                        let d = match o {
                            Offset::FromLeft(s) => t - t0 - s,
                            Offset::FromRight(s) => t - t1 + s,
                        };
                        [(T::one() - curve_density(c, o.u(T::zero(), t1 - t0))) / d]
                    };
                    acc = acc + integrate_singular(f, t0, t1, None, None, &self.opts)?[0];
                    continue;
                }
            };
            if weight != T::zero() {
                acc = acc + weight * ((t - t0) / (t - t1)).ln();
            }
        }
        Ok((-acc).exp())
    }
}

/// `1/α'` at height `dv` above the start of a curved piece.
pub(crate) fn curve_density<T: Real>(c: &crate::boundary::CurvePiece<T>, dv: T) -> T {
    let (mut lo, mut hi) = (T::zero(), c.width);
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if c.g(mid) < dv {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * c.width {
            break;
        }
    }
    T::one() / c.slope((lo + hi) * T::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::PlElement;

    fn seg(width: f64, slope: f64) -> PlElement<f64> {
        PlElement::Segment { width, slope }
    }

    #[test]
    fn pure_shape_closed_form() {
        let r = Resolvent::new(BoundaryShape::linear(3.0).unwrap());
        let x = r.x(6.0).unwrap();
        assert!((x - 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert!((r.x(1e9).unwrap() - 1.0).abs() < 1e-8);
        assert!((r.x(-1e9).unwrap() - 1.0).abs() < 1e-8);
        assert!(matches!(r.eval(1.0), Err(ArcticError::BranchCut(_))));
        assert!(matches!(r.eval(3.0), Err(ArcticError::Singular(_))));
    }

    #[test]
    fn frozen_interval_is_negative() {
        let s = BoundaryShape::piecewise(&[seg(1.0 / 3.0, 2.0), seg(1.0 / 3.0, 1.0), seg(1.0 / 3.0, 2.0)]).unwrap();
        let r = Resolvent::new(s);
        let v = r.eval(0.8).unwrap();
        assert!(v.x() < 0.0);
        assert_eq!(v.method, Method::Continuation);
        let direct = ((0.8f64 - 2.0 / 3.0) / 0.8).sqrt() * (0.8 - 1.0) / (0.8 - 2.0 / 3.0)
            * ((0.8f64 - 5.0 / 3.0) / (0.8 - 1.0)).abs().sqrt();
        assert!((v.x() - direct).abs() < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let s = BoundaryShape::piecewise(&[seg(0.5, 2.0), PlElement::Jump { height: 1.0 }, seg(0.5, 2.0)]).unwrap();
        let r = Resolvent::new(s);
        for t in [-2.0, 1.5, 3.5, 9.0] {
            let v = r.eval(t).unwrap();
            let h = 1e-6;
            let fd = (r.x(t + h).unwrap() - r.x(t - h).unwrap()) / (2.0 * h);
            assert!((fd - v.x_prime()).abs() < 1e-6 * v.x_prime().abs().max(1.0), "t={t}");
            let fdq = (r.eval(t + h).unwrap().q - r.eval(t - h).unwrap().q) / (2.0 * h);
            assert!((fdq - v.dq).abs() < 1e-6 * v.dq.abs().max(1.0));
        }
    }

    #[test]
    fn f32_evaluation() {
        let r = Resolvent::new(BoundaryShape::<f32>::linear(2.0).unwrap());
        assert!((r.x(4.0).unwrap() - 0.5f32.sqrt()).abs() < 1e-6);
    }
}
