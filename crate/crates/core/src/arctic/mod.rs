//! Boundary shape to arctic curve: the resolvent x(t), every portion of the curve,
//! special points, consistency checks and CSV/SVG output.

mod checks;
mod output;
mod portions;
mod resolvent;
mod special;

use thiserror::Error;

use crate::quadrature::QuadError;

pub use checks::{edge_freeze_check, legendre_check, moments_check, symmetry_check, x_prime_check, MomentFit};
pub use output::{
    to_triangular, triangular, triangular_tangency_residual, write_portions_csv, FigurePortion, SvgFigure,
};
pub use portions::{
    find_axis_contacts, find_cusps, portions, ArcticPortion, CurveSample, PortionKind, SamplingOptions,
};
pub(crate) use resolvent::curve_density;
pub use resolvent::{Method, Resolvent, ResolventValue};
pub use special::{
    apex, left_edge_integral, right_edge_integral, special_points, EdgeCase, SpecialPoint, SpecialPoints,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArcticError {
    #[error("t = {0} lies on a branch cut of x(t)")]
    BranchCut(f64),
    #[error("x(t) is singular at t = {0}")]
    Singular(f64),
    #[error("x'(t) vanishes or is undefined at t = {0}")]
    Degenerate(f64),
    #[error("portion has only {0} samples")]
    TooFewSamples(usize),
    #[error("{0}")]
    Unsupported(&'static str),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Tangent line `x Y + (1 - x)(X - t) = 0` through `(t, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentLine<T> {
    pub t: T,
    pub x: T,
    pub slope: T,
    pub kind: Option<PortionKind>,
}

impl<T: crate::Real> TangentLine<T> {
    pub fn residual(&self, px: T, py: T) -> T {
        self.x * py + (T::one() - self.x) * (px - self.t)
    }
}

pub fn tangent_at<T: crate::Real>(res: &Resolvent<T>, t: T) -> Result<TangentLine<T>, ArcticError> {
    let v = res.eval(t)?;
    let kind = classify(res, t);
    Ok(TangentLine { t, x: v.x(), slope: v.slope(), kind })
}

/// Portion kind whose parameter range contains `t`.
pub fn classify<T: crate::Real>(res: &Resolvent<T>, t: T) -> Option<PortionKind> {
    let shape = res.shape();
    if t > shape.alpha_end() {
        return Some(PortionKind::GenericI);
    }
    if t < T::zero() {
        return Some(PortionKind::GenericII);
    }
    let th = shape.theta();
    let last = shape.pieces().len() - 1;
    shape.pieces().iter().enumerate().find_map(|(i, p)| {
        if !(t > th[i] && t < th[i + 1]) {
            return None;
        }
        if p.is_jump() {
            Some(PortionKind::Gap)
        } else if p.is_frozen() {
            Some(match i {
                0 => PortionKind::EdgeFreezeLeft,
                _ if i == last => PortionKind::EdgeFreezeRight,
                _ => PortionKind::FrozenR,
            })
        } else {
            None
        }
    })
}
