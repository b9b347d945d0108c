use std::fmt::Write as _;
use std::io::Write;

use crate::Real;

use super::{ArcticPortion, CurveSample, PortionKind, Resolvent};

/// `(X, Y) ↦ (X - Y/2, √3 Y/2)`.
pub fn triangular<T: Real>(px: T, py: T) -> (T, T) {
    let half = T::lit(0.5);
    (px - py * half, T::lit(3.0).sqrt() * py * half)
}

/// Portion with every sample mapped to triangular coordinates. The tangent through
/// `(t, 0)` then reads `(1 + x) Y + √3 (1 - x)(X - t) = 0`.
pub fn to_triangular<T: Real>(portion: &ArcticPortion<T>) -> ArcticPortion<T> {
    let mut out = portion.clone();
    let s3 = T::lit(3.0).sqrt();
    for s in &mut out.samples {
        let (a, b) = triangular(s.px, s.py);
        s.px = a;
        s.py = b;
        s.slope = -s3 * s.omx / (T::one() + s.x);
    }
    out
}

/// `(1 + x) Y + √3 (1 - x)(X - t)` for a sample already in triangular coordinates,
/// scaled like [`CurveSample::tangency_residual`].
pub fn triangular_tangency_residual<T: Real>(s: &CurveSample<T>) -> T {
    ((T::one() + s.x) * s.py + T::lit(3.0).sqrt() * s.omx * (s.px - s.t)) / s.x.abs().max(T::one())
}

/// CSV with columns `kind,conjectured,t,x,X,Y,slope`, one row per sample of every portion.
pub fn write_portions_csv<T: Real, W: Write>(portions: &[ArcticPortion<T>], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "conjectured", "t", "x", "X", "Y", "slope"])?;
    for p in portions {
        for s in &p.samples {
            w.write_record([
                p.kind.name().to_string(),
                p.conjectured.to_string(),
                s.t.to64().to_string(),
                s.x.to64().to_string(),
                s.px.to64().to_string(),
                s.py.to64().to_string(),
                s.slope.to64().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn color(kind: PortionKind) -> &'static str {
    match kind {
        PortionKind::GenericI => "#c0392b",
        PortionKind::GenericII => "#2471a3",
        PortionKind::FrozenR => "#7d3c98",
        PortionKind::Gap => "#b9770e",
        PortionKind::EdgeFreezeLeft | PortionKind::EdgeFreezeRight => "#1e8449",
    }
}

/// Kind, conjectured flag and rescaled points of one portion.
pub type FigurePortion = (PortionKind, bool, Vec<(f64, f64)>);

/// Self-contained SVG of the rescaled domain `[0, α(1)] × [0, 1]`.
#[derive(Clone, Debug)]
pub struct SvgFigure {
    pub alpha_end: f64,
    pub triangular: bool,
    pub portions: Vec<FigurePortion>,
    /// Tangent lines `(t, x)` drawn across the domain.
    pub tangents: Vec<(f64, f64)>,
    /// Point cloud in rescaled coordinates.
    pub points: Vec<(f64, f64)>,
}

impl SvgFigure {
    pub fn new<T: Real>(alpha_end: T, portions: &[ArcticPortion<T>]) -> Self {
        Self {
            alpha_end: alpha_end.to64(),
            triangular: false,
            portions: portions
                .iter()
                .map(|p| (p.kind, p.conjectured, p.samples.iter().map(|s| (s.px.to64(), s.py.to64())).collect()))
                .collect(),
            tangents: Vec::new(),
            points: Vec::new(),
        }
    }

    pub fn triangular(mut self, on: bool) -> Self {
        self.triangular = on;
        self
    }

    /// Adds tangent lines at the given parameters; parameters where x is undefined are skipped.
    pub fn with_tangents<T: Real>(mut self, res: &Resolvent<T>, ts: &[T]) -> Self {
        for &t in ts {
            if let Ok(x) = res.x(t) {
                self.tangents.push((t.to64(), x.to64()));
            }
        }
        self
    }

    pub fn with_points(mut self, points: Vec<(f64, f64)>) -> Self {
        self.points = points;
        self
    }

    fn map(&self, p: (f64, f64)) -> (f64, f64) {
        if self.triangular {
            triangular(p.0, p.1)
        } else {
            p
        }
    }

    pub fn render(&self) -> String {
        let a1 = self.alpha_end;
        let corners = [(0.0, 0.0), (a1, 0.0), (a1, 1.0), (0.0, 1.0)].map(|c| self.map(c));
        let xmin = corners.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let xmax = corners.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
        let ymax = corners.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        let width = 800.0;
        let pad = 10.0;
        let scale = width / (xmax - xmin);
        let height = ymax * scale;
        let px = |p: (f64, f64)| {
            let (x, y) = self.map(p);
            ((x - xmin) * scale, height - y * scale)
        };
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.1}" viewBox="{:.0} {:.0} {:.0} {:.1}">"#,
            -pad,
            -pad,
            width + 2.0 * pad,
            height + 2.0 * pad
        );
        let _ = writeln!(s, r#"<rect x="-10" y="-10" width="100%" height="100%" fill="white"/>"#);
        let outline: Vec<String> =
            [(0.0, 0.0), (a1, 0.0), (a1, 1.0), (0.0, 1.0)].iter().map(|&c| fmt_pt(px(c))).collect();
        let _ =
            writeln!(s, r#"<polygon points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, outline.join(" "));
        let (g0, g1) = (px((0.0, 0.0)), px((1.0, 1.0)));
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="6 4"/>"##,
            g0.0, g0.1, g1.0, g1.1
        );
        for &(t, x) in &self.tangents {
            // x Y + (1 - x)(X - t) = 0 clipped to 0 ≤ Y ≤ 1
            let at = |y: f64| if (1.0 - x).abs() < 1e-300 { t } else { t - x * y / (1.0 - x) };
            let (p0, p1) = (px((at(0.0), 0.0)), px((at(1.0), 1.0)));
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#aaa" stroke-width="0.6"/>"##,
                p0.0, p0.1, p1.0, p1.1
            );
        }
        for &p in &self.points {
            let q = px(p);
            let _ =
                writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="1.2" fill="#555" fill-opacity="0.5"/>"##, q.0, q.1);
        }
        for (kind, conjectured, pts) in &self.portions {
            if pts.is_empty() {
                continue;
            }
            let path: Vec<String> =
                pts.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).map(|&p| fmt_pt(px(p))).collect();
            let dash = if *conjectured { r#" stroke-dasharray="8 3""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"{dash}><title>{}</title></polyline>"#,
                path.join(" "),
                color(*kind),
                kind.name()
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn fmt_pt(p: (f64, f64)) -> String {
    format!("{:.2},{:.2}", p.0, p.1)
}
