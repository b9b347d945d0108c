//! Starting-point sequences, scaling profiles and the maps between them.

mod density;
mod sequence;
mod shape;
pub mod shapefile;

use thiserror::Error;

pub use density::{density_of, StartDensity};
pub use sequence::{complement_of, tilde_of, ComplementarySequence, StartSequence, TildeSequence};
pub use shape::{
    piecewise_moments, AnalyticShape, BoundaryShape, CurvePiece, EdgeSlope, EndBehavior, Piece, PlElement, Profile,
    ShapeKind,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("sequence is empty")]
    EmptySequence,
    #[error("sequence must start at 0, found {0}")]
    SequenceStart(i64),
    #[error("sequence is not strictly increasing at index {index}")]
    NotIncreasing { index: usize },
    #[error("cannot parse `{0}` as an integer")]
    Parse(String),
    #[error("shape has no pieces")]
    EmptyShape,
    #[error("piece widths must be positive")]
    BadWidth,
    #[error("slopes must be at least 1 (found {0})")]
    SlopeBelowOne(f64),
    #[error("jump heights must be positive and finite")]
    BadJump,
    #[error("jumps are only allowed strictly inside (0, 1)")]
    JumpAtEnd,
    #[error("widths sum to {0}, expected 1")]
    WidthSum(f64),
    #[error("profile must vanish at u = 0")]
    NonzeroOrigin,
    #[error("frozen interval must satisfy 0 <= u1 < u2 <= 1")]
    BadInterval,
    #[error("profile does not rise with slope 1 on a declared frozen interval")]
    FrozenMismatch,
    #[error("n = {n} is too small to realize the shape strictly (need n >= {need})")]
    TooCoarse { n: usize, need: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn realize_examples() {
        let s = BoundaryShape::linear(3.0f64).unwrap().realize(4).unwrap();
        assert_eq!(s.a(), &[0, 3, 6, 9, 12]);
        let def = AnalyticShape::new(Arc::new(|u: f64| u + u * u), EndBehavior::Slope(1.0), EndBehavior::Slope(3.0));
        let s = BoundaryShape::analytic(def).unwrap().realize(4).unwrap();
        assert_eq!(s.a(), &[0, 1, 3, 5, 8]);
        let jumpy = BoundaryShape::piecewise(&[
            PlElement::Segment { width: 0.5f64, slope: 1.0 },
            PlElement::Jump { height: 0.5 },
            PlElement::Segment { width: 0.5, slope: 1.0 },
        ])
        .unwrap();
        assert!(matches!(jumpy.realize(1), Err(BoundaryError::TooCoarse { .. })));
        assert!(jumpy.realize(2).is_ok());
    }

    #[test]
    fn piece_bookkeeping() {
        let shape = BoundaryShape::piecewise(&[
            PlElement::Segment { width: 1.0 / 3.0, slope: 1.0f64 },
            PlElement::Jump { height: 1.0 },
            PlElement::Segment { width: 2.0 / 3.0, slope: 1.0 },
        ])
        .unwrap();
        assert_eq!(shape.pieces().len(), 3);
        assert!((shape.alpha_end() - 2.0).abs() < 1e-15);
        assert!((shape.alpha(1.0 / 3.0) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(shape.frozen_pieces(), vec![0, 2]);
        assert_eq!(shape.jump_pieces(), vec![1]);
        assert_eq!(shape.start_slope(), EdgeSlope::Tangential);
        assert!(shape.right_freeze().is_some());
    }

    #[test]
    fn merges_and_rejects() {
        let s = BoundaryShape::piecewise(&[
            PlElement::Segment { width: 0.5f64, slope: 2.0 },
            PlElement::Segment { width: 0.5, slope: 2.0 },
        ])
        .unwrap();
        assert_eq!(s.pieces().len(), 1);
        assert!(BoundaryShape::piecewise(&[PlElement::Segment { width: 0.9f64, slope: 2.0 }]).is_err());
        assert!(BoundaryShape::piecewise(&[PlElement::Segment { width: 1.0f64, slope: 0.5 }]).is_err());
        assert!(BoundaryShape::piecewise(&[
            PlElement::Jump { height: 1.0f64 },
            PlElement::Segment { width: 1.0, slope: 2.0 }
        ])
        .is_err());
    }

    #[test]
    fn reflection_and_symmetry() {
        let five: Vec<PlElement<f64>> =
            [1.0, 2.0, 1.0, 2.0, 1.0].iter().map(|&p| PlElement::Segment { width: 0.2, slope: p }).collect();
        let s = BoundaryShape::piecewise(&five).unwrap();
        assert!(s.is_symmetric(1e-12));
        let lop = BoundaryShape::piecewise(&[
            PlElement::Segment { width: 0.5f64, slope: 3.0 },
            PlElement::Segment { width: 0.5, slope: 1.0 },
        ])
        .unwrap();
        assert!(!lop.is_symmetric(1e-6));
        let r = lop.reflect();
        for u in [0.1, 0.4, 0.6, 0.9] {
            assert!((r.alpha(u) - (lop.alpha_end() - lop.alpha(1.0 - u))).abs() < 1e-14);
        }
        let def = AnalyticShape::new(Arc::new(|u: f64| u + u * u), EndBehavior::Slope(1.0), EndBehavior::Slope(3.0));
        let c = BoundaryShape::analytic(def).unwrap();
        let rc = c.reflect();
        assert_eq!(rc.start_slope(), EdgeSlope::Transversal(3.0));
        assert!((rc.alpha(0.3) - (2.0 - c.alpha(0.7))).abs() < 1e-14);
    }

    #[test]
    fn complement_of_realized_partitions_range() {
        let s = BoundaryShape::linear(2.5f64).unwrap().realize(13).unwrap();
        let mut all: Vec<i64> = s.a().iter().chain(s.complement().values()).copied().collect();
        all.sort();
        assert_eq!(all, (0..=s.last()).collect::<Vec<_>>());
    }
}
