use crate::boundary::{density_of, BoundaryShape, EdgeSlope, EndBehavior, Piece};
use crate::quadrature::{integrate_singular, Offset, QuadError, QuadOptions};
use crate::Real;

use super::ArcticError;

/// Which edge formula produced a special point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeCase {
    /// The horizontal-tangent apex on the top boundary.
    Apex,
    /// Finite slope above 1 at the edge.
    Transversal,
    /// Slope exactly 1 at the edge.
    Tangential,
    /// Unbounded slope with both edge integrals finite.
    PowerFinite,
    /// Unbounded slope with the second edge integral divergent.
    PowerDivergent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecialPoint<T> {
    pub x: T,
    pub y: T,
    /// Tangent slope dY/dX (infinite for a vertical tangent).
    pub slope: T,
    pub case: EdgeCase,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecialPoints<T> {
    /// Contact with the top boundary, reached as t → ±∞.
    pub top: SpecialPoint<T>,
    /// Right end of generic portion I (t → α(1)⁺).
    pub right: SpecialPoint<T>,
    /// Left end of generic portion II (t → 0⁻).
    pub left: SpecialPoint<T>,
}

/// `∫_0^1 [ (α(1) - α(u))^{-k} - c [k = 1] / (1 - u) ] du`.
pub fn right_edge_integral<T: Real>(
    shape: &BoundaryShape<T>,
    k: i32,
    c: T,
    opts: &QuadOptions<T>,
) -> Result<T, QuadError> {
    let th = shape.theta();
    let phi = shape.phi();
    let a1 = shape.alpha_end();
    let last = shape.pieces().len() - 1;
    let sub = if k == 1 { c } else { T::zero() };
    let mut acc = T::zero();
    for (i, p) in shape.pieces().iter().enumerate() {
        let (d0, d1) = (a1 - th[i], a1 - th[i + 1]);
        let (e0, e1) = (T::one() - phi[i], T::one() - phi[i + 1]);
        match p {
            Piece::Jump { .. } => {}
            Piece::Segment { slope, .. } if i == last => {
                if k != 1 || (T::one() / *slope - sub).abs() > T::epsilon() * T::lit(16.0) {
                    return Err(QuadError::Divergent(1.0));
                }
            }
            Piece::Segment { slope, .. } => {
                acc = acc
                    + if k == 1 {
                        (d0 / d1).ln() / *slope - sub * (e0 / e1).ln()
                    } else {
                        (T::one() / d1 - T::one() / d0) / *slope
                    };
            }
            Piece::Curve(cp) => {
                let singular = match (i == last, cp.right) {
                    (true, EndBehavior::Power { exponent }) => Some(exponent * T::int(k as i64)),
                    (true, EndBehavior::Slope(_)) if k == 2 => Some(T::one()),
                    _ => None,
                };
                let f = |o: Offset<T>| {
                    let (d, e) = match o {
                        Offset::FromLeft(s) => (d0 - cp.g(s), e0 - s),
                        Offset::FromRight(s) => (d1 + cp.g_from_end(s), e1 + s),
                    };
                    let v = if k == 1 { T::one() / d } else { T::one() / (d * d) };
                    [if sub == T::zero() { v } else { v - sub / e }]
                };
                acc = acc + integrate_singular(f, T::zero(), cp.width, None, singular, opts)?[0];
            }
        }
    }
    Ok(acc)
}

/// `∫_0^1 [ α(u)^{-k} - c [k = 1] / u ] du`, via the reflected profile.
pub fn left_edge_integral<T: Real>(
    shape: &BoundaryShape<T>,
    k: i32,
    c: T,
    opts: &QuadOptions<T>,
) -> Result<T, QuadError> {
    right_edge_integral(&shape.reflect(), k, c, opts)
}

fn right_point<T: Real>(shape: &BoundaryShape<T>, opts: &QuadOptions<T>) -> Result<SpecialPoint<T>, ArcticError> {
    let a1 = shape.alpha_end();
    let vertical = T::infinity();
    Ok(match shape.end_slope() {
        EdgeSlope::Transversal(_) => SpecialPoint { x: a1, y: T::zero(), slope: vertical, case: EdgeCase::Transversal },
        EdgeSlope::Tangential => {
            let y = right_edge_integral(shape, 1, T::one(), opts)?.exp();
            SpecialPoint { x: a1, y, slope: vertical, case: EdgeCase::Tangential }
        }
        EdgeSlope::Infinite { exponent } => {
            let i1 = right_edge_integral(shape, 1, T::zero(), opts)?;
            let slope = -i1.exp_m1();
            if exponent * T::lit(2.0) < T::one() {
                let i2 = right_edge_integral(shape, 2, T::zero(), opts)?;
                let omx = -(-i1).exp_m1();
                SpecialPoint { x: a1 - omx / i2, y: omx * omx / (i2 * (-i1).exp()), slope, case: EdgeCase::PowerFinite }
            } else {
                SpecialPoint { x: a1, y: T::zero(), slope, case: EdgeCase::PowerDivergent }
            }
        }
    })
}

fn left_point<T: Real>(shape: &BoundaryShape<T>, opts: &QuadOptions<T>) -> Result<SpecialPoint<T>, ArcticError> {
    Ok(match shape.start_slope() {
        EdgeSlope::Transversal(_) => {
            SpecialPoint { x: T::zero(), y: T::zero(), slope: T::one(), case: EdgeCase::Transversal }
        }
        EdgeSlope::Tangential => {
            let v = left_edge_integral(shape, 1, T::one(), opts)?.exp();
            SpecialPoint { x: v, y: v, slope: T::one(), case: EdgeCase::Tangential }
        }
        EdgeSlope::Infinite { exponent } => {
            let j1 = left_edge_integral(shape, 1, T::zero(), opts)?;
            let slope = -(-j1).exp_m1();
            if exponent * T::lit(2.0) < T::one() {
                let j2 = left_edge_integral(shape, 2, T::zero(), opts)?;
                let xm1 = j1.exp_m1();
                SpecialPoint { x: xm1 / j2, y: xm1 * xm1 / (j2 * j1.exp()), slope, case: EdgeCase::PowerFinite }
            } else {
                SpecialPoint { x: T::zero(), y: T::zero(), slope, case: EdgeCase::PowerDivergent }
            }
        }
    })
}

/// `X_1 = 1/2 + ∫α`.
pub fn apex<T: Real>(shape: &BoundaryShape<T>) -> Result<T, ArcticError> {
    let d = density_of(shape, 1)?;
    Ok(T::lit(0.5) + d.moments()[1])
}

pub fn special_points<T: Real>(shape: &BoundaryShape<T>) -> Result<SpecialPoints<T>, ArcticError> {
    let opts = QuadOptions::default();
    Ok(SpecialPoints {
        top: SpecialPoint { x: apex(shape)?, y: T::one(), slope: T::zero(), case: EdgeCase::Apex },
        right: right_point(shape, &opts)?,
        left: left_point(shape, &opts)?,
    })
}
