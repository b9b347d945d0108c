use super::{BoundaryShape, Piece};
use crate::quadrature::{integrate_singular, QuadError, QuadOptions};
use crate::Real;

/// Density of starting points ρ(v) = 1/α'(α⁻¹(v)) on [0, α(1)] with its moments.
#[derive(Clone, Debug)]
pub struct StartDensity<T> {
    shape: BoundaryShape<T>,
    moments: Vec<T>,
}

impl<T: Real> StartDensity<T> {
    /// μ_k = ∫ α(u)^k du = ∫ v^k ρ(v) dv.
    pub fn moments(&self) -> &[T] {
        &self.moments
    }

    pub fn rho(&self, v: T) -> T {
        let th = self.shape.theta();
        for (i, p) in self.shape.pieces().iter().enumerate() {
            if v < th[i] || v > th[i + 1] {
                continue;
            }
            return match p {
                Piece::Segment { slope, .. } => T::one() / *slope,
                Piece::Jump { .. } => T::zero(),
                Piece::Curve(c) => {
                    let target = v - th[i];
                    let (mut lo, mut hi) = (T::zero(), c.width);
                    for _ in 0..200 {
                        let mid = (lo + hi) * T::lit(0.5);
                        if c.g(mid) < target {
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
            };
        }
        T::zero()
    }
}

pub fn density_of<T: Real>(shape: &BoundaryShape<T>, k_max: usize) -> Result<StartDensity<T>, QuadError> {
    let mut moments = vec![T::zero(); k_max + 1];
    let th = shape.theta();
    let opts = QuadOptions::default();
    for (i, p) in shape.pieces().iter().enumerate() {
        match p {
            Piece::Jump { .. } => {}
            Piece::Segment { slope, .. } => {
                let (a, b) = (th[i], th[i + 1]);
                for (k, m) in moments.iter_mut().enumerate() {
                    let e = (k + 1) as i32;
                    *m = *m + (b.powi(e) - a.powi(e)) / (*slope * T::int(e as i64));
                }
            }
            Piece::Curve(c) => {
                let base = th[i];
                for (k, m) in moments.iter_mut().enumerate() {
                    let v = integrate_singular(
                        |o| [(base + c.g(o.u(T::zero(), c.width))).powi(k as i32)],
                        T::zero(),
                        c.width,
                        None,
                        None,
                        &opts,
                    )?;
                    *m = *m + v[0];
                }
            }
        }
    }
    Ok(StartDensity { shape: shape.clone(), moments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{piecewise_moments, AnalyticShape, EndBehavior, PlElement};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use std::sync::Arc;

    #[test]
    fn linear_moments() {
        let d = density_of(&BoundaryShape::linear(3.0f64).unwrap(), 3).unwrap();
        assert!((d.moments()[0] - 1.0).abs() < 1e-15);
        assert!((d.moments()[1] - 1.5).abs() < 1e-15);
        assert!((d.moments()[2] - 3.0).abs() < 1e-14);
        let d = density_of(&BoundaryShape::linear(1.0f64).unwrap(), 1).unwrap();
        for v in [0.1, 0.5, 0.9] {
            assert_eq!(d.rho(v), 1.0);
        }
    }

    #[test]
    fn exact_and_float_moments_agree() {
        let r = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
        let exact = vec![
            PlElement::Segment { width: r(1, 3), slope: r(2, 1) },
            PlElement::Segment { width: r(1, 3), slope: r(1, 1) },
            PlElement::Jump { height: r(1, 2) },
            PlElement::Segment { width: r(1, 3), slope: r(5, 2) },
        ];
        let mom = piecewise_moments(&exact, 4);
        let shape = BoundaryShape::<f64>::from_exact(&exact).unwrap();
        let d = density_of(&shape, 4).unwrap();
        for (m, got) in mom.iter().zip(d.moments()) {
            let e: f64 = num_traits::ToPrimitive::to_f64(m).unwrap();
            assert!((e - got).abs() < 1e-13 * e.max(1.0));
        }
        assert_eq!(mom[0], r(1, 1));
    }

    #[test]
    fn analytic_moments_and_density() {
        let spec = AnalyticShape::new(Arc::new(|u: f64| u + u * u), EndBehavior::Slope(1.0), EndBehavior::Slope(3.0))
            .with_derivative(Arc::new(|u: f64| 1.0 + 2.0 * u));
        let shape = BoundaryShape::analytic(spec).unwrap();
        let d = density_of(&shape, 2).unwrap();
        // ∫(u+u²)² = 1/3 + 1/2 + 1/5
        assert!((d.moments()[2] - (1.0 / 3.0 + 0.5 + 0.2)).abs() < 1e-13);
        // α = 3/4 at u = 1/2 where α' = 2
        assert!((d.rho(0.75) - 0.5).abs() < 1e-9);
    }
}
