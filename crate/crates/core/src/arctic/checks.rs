use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::density_of;
use crate::Real;

use super::{ArcticError, ArcticPortion, Resolvent};

/// Distance from `t` to the nearest breakpoint of the profile.
fn gap_to_breakpoints<T: Real>(res: &Resolvent<T>, t: T) -> T {
    res.shape().theta().iter().map(|&b| (t - b).abs()).fold(T::infinity(), T::min)
}

/// Largest `|s(t) + dX/dY|` over the interior samples of a portion, with `s = x/(1-x)` and
/// dX/dY from centered differences in t. The deviation is taken relative to `max(1, |s|)`.
/// Samples where the curve is locally degenerate (a cusp or a straight stretch), or where the
/// difference quotient would be dominated by rounding in `X = t - (1-x)/q`, are skipped.
pub fn legendre_check<T: Real>(res: &Resolvent<T>, portion: &ArcticPortion<T>) -> Result<T, ArcticError> {
    if portion.samples.len() < 3 {
        return Err(ArcticError::TooFewSamples(portion.samples.len()));
    }
    let mut worst = T::zero();
    for s in &portion.samples[1..portion.samples.len() - 1] {
        let h = gap_to_breakpoints(res, s.t) * T::lit(1e-4);
        let v = res.eval(s.t)?;
        let (vx, vy) = v.velocity();
        if vx.abs() < T::lit(1e-3) || vy.abs() < T::lit(1e-3) || (T::one() - s.x).abs() < T::lit(1e-3) {
            continue;
        }
        let noise = T::epsilon() * (s.t.abs() + s.px.abs()) / (h * vx.abs());
        if noise > T::lit(1e-8) {
            continue;
        }
        let (xp, yp) = res.curve_point(s.t + h)?;
        let (xm, ym) = res.curve_point(s.t - h)?;
        let dxdy = (xp - xm) / (yp - ym);
        let sv = s.x / (T::one() - s.x);
        let dev = (sv + dxdy).abs() / sv.abs().max(T::one());
        worst = worst.max(dev);
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct MomentFit {
    pub fitted: Vec<f64>,
    pub expected: Vec<f64>,
    /// `|fitted_k - expected_k|` for each k.
    pub deviations: Vec<f64>,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

impl MomentFit {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

/// Least-squares fit of `-log x(t) = Σ_{k≤K} μ_k / t^{k+1}` on `t ∈ [10^2, 10^4]`.
pub fn moments_check<T: Real>(res: &Resolvent<T>, k_max: usize) -> Result<MomentFit, ArcticError> {
    if k_max > 8 {
        return Err(ArcticError::Unsupported("moments_check needs K ≤ 8"));
    }
    let npts = 80;
    let cols = k_max + 1;
    let w_max = 1e-2;
    let mut a = DMatrix::<f64>::zeros(npts, cols);
    let mut b = DVector::<f64>::zeros(npts);
    for i in 0..npts {
        let t = 10f64.powf(2.0 + 2.0 * i as f64 / (npts - 1) as f64);
        let w = 1.0 / t;
        b[i] = -res.eval(T::lit(t))?.log_abs.to64();
        for k in 0..cols {
            // columns scaled to (w / w_max)^{k+1}
            a[(i, k)] = (w / w_max).powi(k as i32 + 1);
        }
    }
    let svd = a.clone().svd(true, true);
    let sol = svd.solve(&b, 1e-15).map_err(|_| ArcticError::Unsupported("singular moment fit"))?;
    let fitted: Vec<f64> = (0..cols).map(|k| sol[k] / w_max.powi(k as i32 + 1)).collect();
    let expected: Vec<f64> = density_of(res.shape(), k_max)?.moments().iter().map(|m| m.to64()).collect();
    let deviations = fitted.iter().zip(&expected).map(|(f, e)| (f - e).abs()).collect();
    let r = &a * &sol - &b;
    let residual = (r.norm_squared() / npts as f64).sqrt();
    Ok(MomentFit { fitted, expected, deviations, residual })
}

/// For a reflection-symmetric profile: largest of `|x(α(1)-t) x(t) - 1|` and the
/// deviations from `X(α(1)-t) = α(1) - X(t) + Y(t)`, `Y(α(1)-t) = Y(t)` over the given parameters.
pub fn symmetry_check<T: Real>(res: &Resolvent<T>, ts: &[T]) -> Result<(T, T), ArcticError> {
    let a1 = res.shape().alpha_end();
    let mut x_dev = T::zero();
    let mut curve_dev = T::zero();
    for &t in ts {
        let v = res.eval(t)?;
        let w = res.eval(a1 - t)?;
        x_dev = x_dev.max((v.x() * w.x() - T::one()).abs());
        let (x1, y1) = v.point();
        let (x2, y2) = w.point();
        curve_dev = curve_dev.max((x2 - (a1 - x1 + y1)).abs()).max((y2 - y1).abs());
    }
    Ok((x_dev, curve_dev))
}

/// Largest relative gap between the continued resolvent and the complementary-density form
/// on the right frozen interval, sampled at `grid` interior points.
pub fn edge_freeze_check<T: Real>(res: &Resolvent<T>, grid: usize) -> Result<T, ArcticError> {
    let shape = res.shape();
    let rho = shape.right_freeze().ok_or(ArcticError::Unsupported("no slope-1 stretch at u = 1"))?;
    let a1 = shape.alpha_end();
    let t0 = a1 - rho;
    let mut worst = T::zero();
    for k in 1..=grid {
        let t = t0 + rho * T::int(k as i64) / T::int(grid as i64 + 1);
        let cont = res.x(t)?;
        let comp = res.complement_form(t)?;
        worst = worst.max((cont - comp).abs() / cont.abs().max(T::one()));
    }
    Ok(worst)
}

/// Largest relative gap between `x'` and centered differences of `x` at `count` random
/// parameters drawn inside the sampled range of the portion. The differences are taken on
/// `log|x|` and multiplied back by `x`, which avoids cancellation when x is close to 1.
pub fn x_prime_check<T: Real>(
    res: &Resolvent<T>,
    portion: &ArcticPortion<T>,
    count: usize,
    seed: u64,
) -> Result<T, ArcticError> {
    if portion.samples.len() < 2 {
        return Ok(T::zero());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..count {
        // interpolate between two neighbouring samples to follow the sampling density
        let i = rng.random_range(0..portion.samples.len() - 1);
        let f: f64 = rng.random_range(0.1..0.9);
        let (a, b) = (portion.samples[i].t, portion.samples[i + 1].t);
        let t = a + (b - a) * T::lit(f);
        let d = gap_to_breakpoints(res, t);
        // closer than this to a breakpoint, t itself is too coarse to difference
        if d < t.abs().max(T::one()) * T::lit(1e-8) {
            continue;
        }
        let (tp, tm) = (t + d * T::lit(1e-4), t - d * T::lit(1e-4));
        let v = res.eval(t)?;
        let (Ok(p), Ok(m)) = (res.eval(tp), res.eval(tm)) else { continue };
        let fd = v.x() * (p.log_abs - m.log_abs) / (tp - tm);
        let exact = v.x_prime();
        worst = worst.max((fd - exact).abs() / exact.abs().max(T::min_positive_value()));
    }
    Ok(worst)
}
