//! Globally adaptive Gauss–Kronrod (10/21) quadrature for vector-valued integrands.

use thiserror::Error;

use crate::Real;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_980_185,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not finite at u = {0}")]
    NonFinite(f64),
    #[error("tolerance not reached: estimated error {error:e} after {intervals} intervals")]
    NoConvergence { error: f64, intervals: usize },
    #[error("endpoint exponent {0} makes the integral divergent")]
    Divergent(f64),
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-12).max(T::epsilon() * T::lit(50.0)),
            abs_tol: T::lit(1e-300).max(T::min_positive_value()),
            max_intervals: 4000,
        }
    }
}

struct Interval<T, const N: usize> {
    a: T,
    b: T,
    value: [T; N],
    error: [T; N],
}

fn gk21<T: Real, const N: usize, F: Fn(T) -> [T; N]>(f: &F, a: T, b: T) -> Result<Interval<T, N>, QuadError> {
    let half = (b - a) * T::lit(0.5);
    let center = (a + b) * T::lit(0.5);
    let mut kron = [T::zero(); N];
    let mut gauss = [T::zero(); N];
    let mut add = |u: T, wk: T, wg: Option<T>| -> Result<(), QuadError> {
        let v = f(u);
        for k in 0..N {
            if !v[k].is_finite() {
                return Err(QuadError::NonFinite(u.to64()));
            }
            kron[k] = kron[k] + wk * v[k];
            if let Some(wg) = wg {
                gauss[k] = gauss[k] + wg * v[k];
            }
        }
        Ok(())
    };
    add(center, T::lit(WGK[10]), None)?;
    for j in 0..10 {
        let dx = half * T::lit(XGK[j]);
        let wg = if j % 2 == 1 { Some(T::lit(WG[j / 2])) } else { None };
        add(center - dx, T::lit(WGK[j]), wg)?;
        add(center + dx, T::lit(WGK[j]), wg)?;
    }
    let mut value = [T::zero(); N];
    let mut error = [T::zero(); N];
    for k in 0..N {
        value[k] = kron[k] * half;
        error[k] = ((kron[k] - gauss[k]) * half).abs();
    }
    Ok(Interval { a, b, value, error })
}

/// Integrates `f` over `[a, b]`, starting from the subdivision given by `points`
/// (which must lie strictly inside).
pub fn integrate_with_points<T, const N: usize, F>(
    f: F,
    a: T,
    b: T,
    points: &[T],
    opts: &QuadOptions<T>,
) -> Result<[T; N], QuadError>
where
    T: Real,
    F: Fn(T) -> [T; N],
{
    if a == b {
        return Ok([T::zero(); N]);
    }
    let mut cuts = vec![a];
    cuts.extend(points.iter().copied().filter(|p| *p > a && *p < b));
    cuts.push(b);
    let mut list = Vec::new();
    for w in cuts.windows(2) {
        list.push(gk21(&f, w[0], w[1])?);
    }
    loop {
        let mut total = [T::zero(); N];
        let mut err = [T::zero(); N];
        for iv in &list {
            for k in 0..N {
                total[k] = total[k] + iv.value[k];
                err[k] = err[k] + iv.error[k];
            }
        }
        let done = (0..N).all(|k| err[k] <= opts.abs_tol.max(opts.rel_tol * total[k].abs()));
        if done {
            return Ok(total);
        }
        // The interval carrying the largest (scaled) error is split next.
        let scale: Vec<T> = (0..N).map(|k| opts.abs_tol.max(opts.rel_tol * total[k].abs())).collect();
        let mut worst = 0;
        let mut worst_err = T::neg_infinity();
        for (i, iv) in list.iter().enumerate() {
            let e = (0..N).map(|k| iv.error[k] / scale[k]).fold(T::zero(), T::max);
            let splittable = (iv.b - iv.a).abs() > T::epsilon() * T::lit(64.0) * iv.a.abs().max(iv.b.abs());
            if splittable && e > worst_err {
                worst_err = e;
                worst = i;
            }
        }
        let roundoff_limited = (0..N).all(|k| err[k] <= T::lit(1e3) * scale[k]);
        if list.len() >= opts.max_intervals || worst_err == T::neg_infinity() {
            if roundoff_limited {
                return Ok(total);
            }
            let e = (0..N).map(|k| err[k]).fold(T::zero(), T::max);
            return Err(QuadError::NoConvergence { error: e.to64(), intervals: list.len() });
        }
        let iv = list.swap_remove(worst);
        let mid = (iv.a + iv.b) * T::lit(0.5);
        list.push(gk21(&f, iv.a, mid)?);
        list.push(gk21(&f, mid, iv.b)?);
    }
}

pub fn integrate<T, const N: usize, F>(f: F, a: T, b: T, opts: &QuadOptions<T>) -> Result<[T; N], QuadError>
where
    T: Real,
    F: Fn(T) -> [T; N],
{
    integrate_with_points(f, a, b, &[], opts)
}

/// Position inside `[a, b]` given by its exact distance to the nearer end, so that
/// integrands singular at an end can be evaluated without cancellation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Offset<T> {
    FromLeft(T),
    FromRight(T),
}

impl<T: Real> Offset<T> {
    pub fn u(self, a: T, b: T) -> T {
        match self {
            Offset::FromLeft(d) => a + d,
            Offset::FromRight(d) => b - d,
        }
    }
}

/// Integrates over `[a, b]` with an integrable power singularity `|u - end|^(-c)`
/// declared at either end; `u = end ± h s^k` with `k = 1/(1-c)` flattens it.
pub fn integrate_singular<T, const N: usize, F>(
    f: F,
    a: T,
    b: T,
    left: Option<T>,
    right: Option<T>,
    opts: &QuadOptions<T>,
) -> Result<[T; N], QuadError>
where
    T: Real,
    F: Fn(Offset<T>) -> [T; N],
{
    for c in [left, right].into_iter().flatten() {
        if c >= T::one() {
            return Err(QuadError::Divergent(c.to64()));
        }
    }
    let power = |c: Option<T>| match c {
        Some(c) if c > T::zero() => (T::one() / (T::one() - c)).min(T::lit(16.0)),
        _ => T::one(),
    };
    let (kl, kr) = (power(left), power(right));
    let half = (b - a) * T::lit(0.5);
    let side = |k: T, right_side: bool| {
        let f = &f;
        move |s: T| {
            let d = half * s.powf(k);
            let jac = half * k * s.powf(k - T::one());
            if jac == T::zero() || d == T::zero() {
                return [T::zero(); N];
            }
            let mut v = f(if right_side { Offset::FromRight(d) } else { Offset::FromLeft(d) });
            v.iter_mut().for_each(|x| *x = *x * jac);
            v
        }
    };
    let lhs = integrate(side(kl, false), T::zero(), T::one(), opts)?;
    let rhs = integrate(side(kr, true), T::zero(), T::one(), opts)?;
    let mut out = [T::zero(); N];
    for k in 0..N {
        out[k] = lhs[k] + rhs[k];
    }
    Ok(out)
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate1<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, opts: &QuadOptions<T>) -> Result<T, QuadError> {
    integrate(|u| [f(u)], a, b, opts).map(|v| v[0])
}
