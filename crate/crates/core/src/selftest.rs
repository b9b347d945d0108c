//! Fast invariant suite over every module, used by the CLI `selftest` command.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::arctic::{
    edge_freeze_check, legendre_check, moments_check, portions, special_points, symmetry_check, SamplingOptions,
};
use crate::asymptotics::{convergence_study, Family};
use crate::boundary::{PlElement, StartSequence};
use crate::exactcomb::{brute_force_count, brute_force_enumerate, lgv_a, lgv_a_modified, PartitionReport};
use crate::onepoint::{htilde, HEvaluator, Kind, OnePointTable};
use crate::sampler::{chi_square_uniform, sample_ensemble, transition_balance, SampleOptions};
use crate::{Resolvent64, Shape64};

#[derive(Clone, Debug)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> SelfCheck {
    match f() {
        Ok(detail) => SelfCheck { name, passed: true, detail },
        Err(detail) => SelfCheck { name, passed: false, detail },
    }
}

fn seq(a: &[i64]) -> StartSequence {
    StartSequence::new(a.to_vec()).expect("fixed test sequence")
}

fn seg(width: f64, slope: f64) -> PlElement<f64> {
    PlElement::Segment { width, slope }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn bound(what: &str, v: f64, tol: f64) -> Result<String, String> {
    if v < tol {
        Ok(format!("{what} {v:.1e}"))
    } else {
        Err(format!("{what} {v:.1e} >= {tol:.0e}"))
    }
}

pub fn run() -> Vec<SelfCheck> {
    let reference = seq(&[0, 2, 3, 6, 10, 12, 15]);
    vec![
        check("partition routes", || {
            for s in [reference.clone(), seq(&[0, 1, 2]), StartSequence::pure(3, 4).map_err(err)?] {
                let r = PartitionReport::compute(&s);
                if !r.consistent() {
                    return Err(format!("routes disagree on {s}"));
                }
            }
            let z = PartitionReport::compute(&StartSequence::pure(3, 4).map_err(err)?).det_a;
            if z != BigInt::from(59049) {
                return Err(format!("Z(3i, n=4) = {z}"));
            }
            let small = seq(&[0, 2, 3, 6, 10, 12]);
            let c = brute_force_count(&small).map_err(err)?;
            if c != lgv_a(&small).det_bareiss() {
                return Err("enumeration disagrees".into());
            }
            Ok(format!("Z = {c} on {small} by enumeration"))
        }),
        check("one-point tables", || {
            for kind in Kind::ALL {
                OnePointTable::build(&reference, kind).map_err(err)?.check_invariants()?;
            }
            let h = HEvaluator::new(&reference);
            let det = BigRational::from_integer(lgv_a(&reference).det_bareiss());
            for l in reference.n() as i64..=reference.last() {
                if h.eval(l).map_err(err)? + htilde(&reference, l - 1).map_err(err)? != BigRational::one() {
                    return Err(format!("sum rule fails at {l}"));
                }
                if h.eval(l).map_err(err)? * &det
                    != BigRational::from_integer(lgv_a_modified(&reference, l).det_bareiss())
                {
                    return Err(format!("modified determinant disagrees at {l}"));
                }
            }
            Ok("bounds, monotonicity, sum rule, oracle".into())
        }),
        check("curve residuals", || {
            let r = Resolvent64::new(Shape64::linear(3.0).map_err(err)?);
            let ps = portions(&r, SamplingOptions { grid: 200, ..Default::default() }).map_err(err)?;
            let q = ps
                .iter()
                .flat_map(|p| p.samples.iter())
                .map(|s| {
                    let (x, y) = (s.px, s.py);
                    ((3.0 * x * x - 3.0 * x * y + y * y).powi(2)
                        - 2.0 * (3.0 * x - y) * (9.0 * x * x - 15.0 * x * y + 7.0 * y * y)
                        + 81.0 * (x - y).powi(2))
                    .abs()
                })
                .fold(0.0, f64::max);
            let t = ps.iter().map(|p| p.max_tangency_residual()).fold(0.0, f64::max);
            Ok(format!("{}, {}", bound("quartic", q, 1e-7)?, bound("tangency", t, 1e-9)?))
        }),
        check("envelope properties", || {
            let r = Resolvent64::new(Shape64::linear(2.0).map_err(err)?);
            let ps = portions(&r, SamplingOptions { grid: 100, ..Default::default() }).map_err(err)?;
            let mut l = 0.0f64;
            for p in &ps {
                l = l.max(legendre_check(&r, p).map_err(err)?);
            }
            let mut parts = vec![bound("Legendre", l, 1e-6)?];
            let m = moments_check(&Resolvent64::new(Shape64::linear(3.0).map_err(err)?), 4).map_err(err)?;
            parts.push(bound("mu_1", m.deviations[1], 1e-6)?);
            let five = Shape64::piecewise(&[seg(0.2, 1.0), seg(0.2, 2.0), seg(0.2, 1.0), seg(0.2, 2.0), seg(0.2, 1.0)])
                .map_err(err)?;
            let r = Resolvent64::new(five);
            let ts: Vec<f64> = (0..30)
                .map(|k| -4.0 + k as f64 * 0.31)
                .filter(|t| r.eval(*t).is_ok() && r.eval(1.4 - t).is_ok())
                .collect();
            let (xd, cd) = symmetry_check(&r, &ts).map_err(err)?;
            parts.push(bound("symmetry", xd.max(cd), 1e-8)?);
            let e = edge_freeze_check(
                &Resolvent64::new(Shape64::piecewise(&[seg(0.5, 2.0), seg(0.5, 1.0)]).map_err(err)?),
                50,
            )
            .map_err(err)?;
            parts.push(bound("edge freeze", e, 1e-10)?);
            Ok(parts.join(", "))
        }),
        check("special points", || {
            let sp = special_points(&Shape64::linear(3.0).map_err(err)?).map_err(err)?;
            let d =
                [(sp.top.x - 2.0).abs(), (sp.right.x - 3.0).abs(), sp.right.y.abs(), sp.left.x.abs(), sp.left.y.abs()];
            bound("max deviation", d.iter().copied().fold(0.0, f64::max), 1e-8)
        }),
        check("convergence", || {
            let t = convergence_study(&Shape64::linear(3.0).map_err(err)?, &[20, 50], Family::I, Some((2.2, 2.8)))
                .map_err(err)?;
            let d = t.max_deviation_by_n();
            if d[1].1 < d[0].1 {
                Ok(format!("{:.4} -> {:.4}", d[0].1, d[1].1))
            } else {
                Err(format!("not decreasing: {d:?}"))
            }
        }),
        check("sampler", || {
            let s = seq(&[0, 2, 4]);
            let states = brute_force_enumerate(&s).map_err(err)?;
            let samples = sample_ensemble(&s, &SampleOptions { n_samples: 20_000, seed: 7, ..Default::default() });
            let chi = chi_square_uniform(&samples, &states);
            if !chi.passes(0.01) {
                return Err(format!("chi-square p = {:.4}", chi.p_value));
            }
            let b = bound("transition imbalance (sigma)", transition_balance(&s, 100_000, 3), 3.0)?;
            Ok(format!("chi-square p = {:.3}, {b}", chi.p_value))
        }),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_pass() {
        for c in super::run() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
