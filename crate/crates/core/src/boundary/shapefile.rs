//! Text format for boundary shapes (TOML).
//!
//! Piecewise description, one table per element in order:
//!
//! ```toml
//! [[pieces]]
//! width = "1/3"        # integers, floats or "p/q" strings
//! slope = 2            # or "frozen" for exactly 1
//!
//! [[pieces]]
//! jump = 1
//!
//! [[pieces]]
//! width = "1/3"
//! poly = [1, 1]        # local increment g(s) = s + s^2 on [0, width]
//!
//! [[pieces]]
//! width = 1
//! power = "1/3"        # g(s) = scale * s^power
//! scale = 3
//! ```
//!
//! Analytic description, with the continuous part of α given once on [0, 1]:
//!
//! ```toml
//! [analytic]
//! expr = "poly"        # "poly" (coeffs of 1, u, u^2, ...), "power" (scale * u^exponent) or "table"
//! coeffs = [0, 1, 1]
//! table = [[0, 0], [0.5, 1], [1, 2]]   # for expr = "table": linear interpolation
//! frozen = [[0.5, 1]]
//! jumps = [{ u = 0.5, delta = 1 }]
//! ```
//!
//! Widths must sum to 1 within 1e-12.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use super::{AnalyticShape, BoundaryError, BoundaryShape, CurvePiece, EndBehavior, Piece, PlElement, Profile};
use crate::Real;

#[derive(Debug, Error)]
pub enum ShapeFileError {
    #[error("malformed shape file: {0}")]
    Syntax(String),
    #[error("field `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error(transparent)]
    Shape(#[from] BoundaryError),
}

fn field(name: &str, reason: impl Into<String>) -> ShapeFileError {
    ShapeFileError::Field { field: name.to_string(), reason: reason.into() }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    fn exact(&self) -> Option<BigRational> {
        match self {
            Number::Int(v) => Some(BigRational::from_integer(BigInt::from(*v))),
            Number::Float(_) => None,
            Number::Text(s) => {
                let s = s.trim();
                match s.split_once('/') {
                    Some((p, q)) => {
                        let p: BigInt = p.trim().parse().ok()?;
                        let q: BigInt = q.trim().parse().ok()?;
                        if q.is_zero() {
                            None
                        } else {
                            Some(BigRational::new(p, q))
                        }
                    }
                    None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
                }
            }
        }
    }

    fn value(&self, name: &str) -> Result<f64, ShapeFileError> {
        match self {
            Number::Int(v) => Ok(*v as f64),
            Number::Float(v) => Ok(*v),
            Number::Text(s) if s.trim() == "frozen" => Ok(1.0),
            Number::Text(s) => {
                if let Some(r) = self.exact() {
                    return Ok(r.to_f64().unwrap_or(f64::NAN));
                }
                s.trim().parse::<f64>().map_err(|_| field(name, format!("not a number: `{s}`")))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    width: Option<Number>,
    slope: Option<Number>,
    jump: Option<Number>,
    poly: Option<Vec<Number>>,
    power: Option<Number>,
    scale: Option<Number>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJump {
    u: Number,
    delta: Number,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalytic {
    expr: String,
    coeffs: Option<Vec<Number>>,
    scale: Option<Number>,
    exponent: Option<Number>,
    table: Option<Vec<[Number; 2]>>,
    #[serde(default)]
    frozen: Vec<[Number; 2]>,
    #[serde(default)]
    jumps: Vec<RawJump>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    pieces: Option<Vec<RawPiece>>,
    analytic: Option<RawAnalytic>,
}

/// Parsed shape file; keeps an exact copy of piecewise-linear data when every
/// number was given exactly.
#[derive(Clone, Debug)]
pub struct ShapeFile {
    raw: RawFile,
    exact: Option<Vec<PlElement<BigRational>>>,
}

impl ShapeFile {
    pub fn parse(text: &str) -> Result<Self, ShapeFileError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| ShapeFileError::Syntax(e.to_string()))?;
        match (&raw.pieces, &raw.analytic) {
            (Some(_), Some(_)) => return Err(field("pieces", "give either `pieces` or `analytic`, not both")),
            (None, None) => return Err(field("pieces", "missing (or `analytic`)")),
            _ => {}
        }
        let mut file = Self { raw, exact: None };
        file.exact = file.exact_elements();
        // Validate once in f64 so errors surface at parse time.
        file.shape::<f64>()?;
        Ok(file)
    }

    /// Exact piecewise-linear elements, if the file is piecewise linear with exact numbers.
    pub fn exact(&self) -> Option<&[PlElement<BigRational>]> {
        self.exact.as_deref()
    }

    fn exact_elements(&self) -> Option<Vec<PlElement<BigRational>>> {
        let pieces = self.raw.pieces.as_ref()?;
        let mut out = Vec::new();
        for p in pieces {
            if let Some(h) = &p.jump {
                out.push(PlElement::Jump { height: h.exact()? });
            } else {
                let slope = match p.slope.as_ref()? {
                    Number::Text(s) if s.trim() == "frozen" => BigRational::one(),
                    other => other.exact()?,
                };
                out.push(PlElement::Segment { width: p.width.as_ref()?.exact()?, slope });
            }
        }
        Some(out)
    }

    pub fn shape<T: Real>(&self) -> Result<BoundaryShape<T>, ShapeFileError> {
        if let Some(pieces) = &self.raw.pieces {
            let mut out = Vec::new();
            let mut total = 0.0;
            for (i, p) in pieces.iter().enumerate() {
                let name = |f: &str| format!("pieces[{i}].{f}");
                if let Some(h) = &p.jump {
                    if p.width.is_some() || p.slope.is_some() || p.poly.is_some() || p.power.is_some() {
                        return Err(field(&name("jump"), "a jump takes no other fields"));
                    }
                    out.push(Piece::Jump { height: T::lit(h.value(&name("jump"))?) });
                    continue;
                }
                let w = p.width.as_ref().ok_or_else(|| field(&name("width"), "missing"))?.value(&name("width"))?;
                total += w;
                let width = T::lit(w);
                match (&p.slope, &p.poly, &p.power) {
                    (Some(s), None, None) => {
                        out.push(Piece::Segment { width, slope: T::lit(s.value(&name("slope"))?) });
                    }
                    (None, Some(coeffs), None) => {
                        let c =
                            coeffs.iter().map(|v| v.value(&name("poly")).map(T::lit)).collect::<Result<Vec<T>, _>>()?;
                        let c = [vec![T::zero()], c].concat();
                        let (g, dg) = poly_profile(&c);
                        let left = EndBehavior::Slope(dg(T::zero()));
                        let right = EndBehavior::Slope(dg(width));
                        let piece = CurvePiece::new(width, g, Some(dg), left, right).with_tail(poly_tail(&c, width));
                        out.push(Piece::Curve(piece));
                    }
                    (None, None, Some(e)) => {
                        let e = T::lit(e.value(&name("power"))?);
                        let scale = match &p.scale {
                            Some(s) => T::lit(s.value(&name("scale"))?),
                            None => T::one(),
                        };
                        let (g, dg) = power_profile(scale, e);
                        let left = if e < T::one() {
                            EndBehavior::Power { exponent: e }
                        } else {
                            EndBehavior::Slope(dg(T::zero()))
                        };
                        let right = EndBehavior::Slope(dg(width));
                        let piece =
                            CurvePiece::new(width, g, Some(dg), left, right).with_tail(power_tail(scale, e, width));
                        out.push(Piece::Curve(piece));
                    }
                    _ => return Err(field(&name("slope"), "exactly one of `slope`, `poly`, `power` is required")),
                }
            }
            if (total - 1.0).abs() > 1e-12 {
                return Err(field("pieces", format!("widths sum to {total}, expected 1")));
            }
            return Ok(BoundaryShape::from_pieces(out)?);
        }
        let a = self.raw.analytic.as_ref().expect("checked at parse time");
        let frozen = a
            .frozen
            .iter()
            .map(|[x, y]| Ok((T::lit(x.value("analytic.frozen")?), T::lit(y.value("analytic.frozen")?))))
            .collect::<Result<Vec<_>, ShapeFileError>>()?;
        let jumps = a
            .jumps
            .iter()
            .map(|j| Ok((T::lit(j.u.value("analytic.jumps.u")?), T::lit(j.delta.value("analytic.jumps.delta")?))))
            .collect::<Result<Vec<_>, ShapeFileError>>()?;
        let (alpha, deriv, tail, left, right): (Profile<T>, Option<Profile<T>>, Option<Profile<T>>, _, _) = match a
            .expr
            .as_str()
        {
            "poly" => {
                let c = a
                    .coeffs
                    .as_ref()
                    .ok_or_else(|| field("analytic.coeffs", "missing"))?
                    .iter()
                    .map(|v| v.value("analytic.coeffs").map(T::lit))
                    .collect::<Result<Vec<T>, _>>()?;
                let (g, dg) = poly_profile(&c);
                let (l, r) = (dg(T::zero()), dg(T::one()));
                (g, Some(dg), Some(poly_tail(&c, T::one())), EndBehavior::Slope(l), EndBehavior::Slope(r))
            }
            "power" => {
                let e = T::lit(
                    a.exponent
                        .as_ref()
                        .ok_or_else(|| field("analytic.exponent", "missing"))?
                        .value("analytic.exponent")?,
                );
                let scale = match &a.scale {
                    Some(s) => T::lit(s.value("analytic.scale")?),
                    None => T::one(),
                };
                let (g, dg) = power_profile(scale, e);
                let left =
                    if e < T::one() { EndBehavior::Power { exponent: e } } else { EndBehavior::Slope(dg(T::zero())) };
                let r = dg(T::one());
                (g, Some(dg), Some(power_tail(scale, e, T::one())), left, EndBehavior::Slope(r))
            }
            "table" => {
                let table = a.table.as_ref().ok_or_else(|| field("analytic.table", "missing"))?;
                return table_shape(table, &frozen, &jumps);
            }
            other => return Err(field("analytic.expr", format!("unknown expression kind `{other}`"))),
        };
        let mut spec = AnalyticShape::new(alpha, left, right);
        if let Some(d) = deriv {
            spec = spec.with_derivative(d);
        }
        spec.tail = tail;
        spec.frozen = frozen;
        spec.jumps = jumps;
        // A frozen stretch at an end overrides the declared end behaviour.
        Ok(BoundaryShape::analytic(spec)?)
    }
}

fn poly_profile<T: Real>(c: &[T]) -> (Profile<T>, Profile<T>) {
    let c = c.to_vec();
    let c2 = c.clone();
    let g: Profile<T> = Arc::new(move |u: T| c.iter().rev().fold(T::zero(), |acc, &k| acc * u + k) - c[0]);
    let dg: Profile<T> = Arc::new(move |u: T| {
        c2.iter().enumerate().skip(1).rev().fold(T::zero(), |acc, (k, &v)| acc * u + v * T::int(k as i64))
    });
    (g, dg)
}

fn power_profile<T: Real>(scale: T, e: T) -> (Profile<T>, Profile<T>) {
    let g: Profile<T> = Arc::new(move |u: T| scale * u.powf(e));
    let dg: Profile<T> = Arc::new(move |u: T| scale * e * u.powf(e - T::one()));
    (g, dg)
}

/// `p(w) - p(w - d)` expanded in powers of `d` (Taylor shift of the coefficients to `w`).
pub(crate) fn poly_tail<T: Real>(c: &[T], w: T) -> Profile<T> {
    let mut t = c.to_vec();
    let n = t.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            t[j] = t[j] + w * t[j + 1];
        }
    }
    // t[j] = p^(j)(w)/j!; p(w - d) = Σ t[j] (-d)^j.
    Arc::new(move |d: T| {
        let mut acc = T::zero();
        for j in (1..n).rev() {
            acc = (acc + t[j]) * (-d);
        }
        -acc
    })
}

/// `scale (w^e - (w - d)^e)` without cancellation.
pub(crate) fn power_tail<T: Real>(scale: T, e: T, w: T) -> Profile<T> {
    Arc::new(move |d: T| -scale * w.powf(e) * (e * (-d / w).ln_1p()).exp_m1())
}

fn table_shape<T: Real>(
    table: &[[Number; 2]],
    frozen: &[(T, T)],
    jumps: &[(T, T)],
) -> Result<BoundaryShape<T>, ShapeFileError> {
    let pts = table
        .iter()
        .map(|[u, a]| Ok((T::lit(u.value("analytic.table")?), T::lit(a.value("analytic.table")?))))
        .collect::<Result<Vec<_>, ShapeFileError>>()?;
    if pts.len() < 2 || pts[0] != (T::zero(), T::zero()) || pts.last().unwrap().0 != T::one() {
        return Err(field("analytic.table", "must run from (0, 0) to u = 1"));
    }
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let ((u0, a0), (u1, a1)) = (w[0], w[1]);
        for &(ju, d) in jumps {
            if ju == u0 {
                out.push(PlElement::Jump { height: d });
            }
        }
        let width = u1 - u0;
        if !(width > T::zero()) {
            return Err(field("analytic.table", "u values must increase"));
        }
        let declared = frozen.iter().any(|&(x, y)| x <= u0 && u1 <= y);
        let slope = if declared { T::one() } else { (a1 - a0) / width };
        if !declared && (slope - T::one()).abs() < T::lit(1e-12) {
            return Err(field("analytic.frozen", "table has a slope-1 stretch that is not declared frozen"));
        }
        out.push(PlElement::Segment { width, slope });
    }
    Ok(BoundaryShape::piecewise(&out)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_file() {
        let f = ShapeFile::parse(
            r#"
[[pieces]]
width = "1/3"
slope = 2
[[pieces]]
width = "1/3"
slope = "frozen"
[[pieces]]
width = "1/3"
slope = 2
"#,
        )
        .unwrap();
        let s = f.shape::<f64>().unwrap();
        assert_eq!(s.pieces().len(), 3);
        assert!((s.theta()[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.exact().unwrap().len(), 3);
    }

    #[test]
    fn width_sum_rejected() {
        let e = ShapeFile::parse("[[pieces]]\nwidth = 0.5\nslope = 2\n").unwrap_err();
        assert!(e.to_string().contains("widths sum"));
        let e = ShapeFile::parse("[[pieces]]\nwidth = 1\n").unwrap_err();
        assert!(e.to_string().contains("pieces[0]"));
    }

    #[test]
    fn analytic_files() {
        let f = ShapeFile::parse("[analytic]\nexpr = \"poly\"\ncoeffs = [0, 1, 1]\n").unwrap();
        let s = f.shape::<f64>().unwrap();
        assert!((s.alpha(0.5) - 0.75).abs() < 1e-15);
        assert!(f.exact().is_none());
        let f = ShapeFile::parse("[analytic]\nexpr = \"power\"\nexponent = \"1/3\"\nscale = 3\n").unwrap();
        let s = f.shape::<f64>().unwrap();
        assert!(matches!(s.start_slope(), crate::boundary::EdgeSlope::Infinite { .. }));
        let f = ShapeFile::parse(
            "[analytic]\nexpr = \"table\"\ntable = [[0, 0], [0.5, 1], [1, 1.5]]\nfrozen = [[0.5, 1]]\njumps = [{ u = 0.5, delta = 1 }]\n",
        )
        .unwrap();
        let s = f.shape::<f64>().unwrap();
        assert_eq!(s.pieces().len(), 3);
        assert!((s.alpha_end() - 2.5).abs() < 1e-15);
        assert!(ShapeFile::parse("[analytic]\nexpr = \"table\"\ntable = [[0, 0], [1, 1]]\n").is_err());
    }

    #[test]
    fn tails_match_naive_difference() {
        let c = [0.0f64, 1.0, 2.0, -0.5];
        let (g, _) = poly_profile(&c);
        let t = poly_tail(&c, 0.7);
        for d in [0.5, 0.1, 1e-3] {
            assert!((t(d) - (g(0.7) - g(0.7 - d))).abs() < 1e-14);
        }
        let t = power_tail(3.0, 1.0 / 3.0, 1.0);
        assert!((t(0.5) - 3.0 * (1.0 - 0.5f64.powf(1.0 / 3.0))).abs() < 1e-15);
        assert!((t(1e-18) - 1e-18).abs() < 1e-30);
    }
}
