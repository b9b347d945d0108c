use nilp_arctic::asymptotics::{convergence_study, Actions, Family};
use nilp_arctic::boundary::PlElement;
use nilp_arctic::Shape64;

fn pure3() -> Actions<f64> {
    Actions::new(Shape64::linear(3.0).unwrap(), Family::I).unwrap()
}

fn edge_frozen() -> Shape64 {
    Shape64::piecewise(&[PlElement::Segment { width: 0.5, slope: 2.0 }, PlElement::Segment { width: 0.5, slope: 1.0 }])
        .unwrap()
}

// parametric rate function for α = 3u, written out independently of the general integral
fn s0_pure3(t: f64) -> (f64, f64) {
    let x = ((t - 3.0) / t).cbrt();
    let xi = t - x / (1.0 - x);
    let s0 = (t - 3.0) * (t - 3.0).ln() / 3.0 - t * t.ln() / 3.0 + (1.0 / (1.0 - x)) * (1.0 / (1.0 - x)).ln()
        - (x / (1.0 - x)) * (x / (1.0 - x)).ln();
    (xi, s0)
}

#[test]
fn pure3_rate_matches_parametric_form() {
    let a = pure3();
    for t in [3.01, 3.5, 4.0, 7.0, 20.0, 100.0] {
        let (xi, s0) = s0_pure3(t);
        let e = a.exit(t).unwrap();
        assert!((e.xi - xi).abs() < 1e-12);
        assert!((a.s0(t, xi).unwrap() - s0).abs() < 1e-11, "t={t}");
    }
}

#[test]
fn saddle_inverts_exit_map() {
    let a = pure3();
    for xi in [2.05, 2.3, 2.5, 2.7, 2.95] {
        let sd = a.saddle_t(xi).unwrap();
        assert!(!sd.divergent && sd.t > 3.0);
        assert!(sd.residual < 1e-12, "{xi} {}", sd.residual);
        assert!((a.exit(sd.t).unwrap().xi - xi).abs() < 1e-9);
    }
    assert!(a.saddle_t(2.0).unwrap().divergent);
    assert!(a.saddle_t(2.999).unwrap().t - 3.0 < 1e-3);
}

#[test]
fn rate_function_nonpositive() {
    let a = pure3();
    assert_eq!(a.rate(2.0).unwrap(), 0.0);
    assert!(a.rate(2.5).unwrap() < 0.0);
    let rf = a.rate_function(300).unwrap();
    assert!(rf.samples.iter().all(|&(_, s)| s <= 1e-9));
    let first = rf.samples.first().unwrap();
    assert!((first.0 - 2.0).abs() < 1e-12 && first.1 == 0.0);
    let near = rf.samples.iter().filter(|(xi, _)| *xi > 2.0 && *xi < 2.001).map(|s| s.1.abs()).fold(0.0, f64::max);
    assert!(near < 1e-5);
}

#[test]
fn action_gradient_vanishes() {
    let shapes = [Shape64::linear(3.0).unwrap(), Shape64::linear(1.5).unwrap(), edge_frozen()];
    for s in shapes {
        for (family, ts) in [(Family::I, vec![3.2f64, 5.0, 12.0]), (Family::II, vec![-0.3, -2.0, -9.0])] {
            let a = Actions::new(s.clone(), family).unwrap();
            for t in ts {
                let t = if family == Family::I { t.max(s.alpha_end() + 0.1) } else { t };
                let g = a.action_gradient(t, 1e-6).unwrap();
                assert!(g.abs() < 1e-9, "{family} t={t} {g}");
            }
        }
    }
    let a = Actions::new(edge_frozen(), Family::Hat).unwrap();
    for t in [1.05, 1.2, 1.4] {
        assert!(a.action_gradient(t, 1e-6).unwrap().abs() < 1e-9);
    }
}

#[test]
fn family_two_mirrors_family_one() {
    let s = Shape64::linear(3.0).unwrap();
    let one = Actions::new(s.clone(), Family::I).unwrap();
    let two = Actions::new(s, Family::II).unwrap();
    for t in [3.3, 4.0, 9.0] {
        let a = one.exit(t).unwrap();
        let b = two.exit(3.0 - t).unwrap();
        assert!((b.xi - (4.0 - a.xi)).abs() < 1e-12);
        assert!((two.s0(3.0 - t, b.xi).unwrap() - one.s0(t, a.xi).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn hat_family_matches_resolvent() {
    let s = edge_frozen();
    let a = Actions::new(s.clone(), Family::Hat).unwrap();
    let res = a.resolvent();
    for t in [1.02, 1.2, 1.45] {
        // the tangent w Y - ξ^ (X - t) = 0 is the line x Y + (1 - x)(X - t) = 0
        let e = a.exit(t).unwrap();
        let x = res.x(t).unwrap();
        assert!((e.z / e.xi + x / (1.0 - x)).abs() < 1e-10);
        assert!(e.z >= 0.0 && e.xi >= e.z);
    }
    let (x, y) = res.curve_point(1.0 + 1e-14).unwrap();
    assert!((x - 1.0).abs() < 1e-6 && y.abs() < 1e-6);
}

#[test]
fn convergence_pure3() {
    let tab = convergence_study(&Shape64::linear(3.0).unwrap(), &[20, 50, 100], Family::I, Some((2.2, 2.8))).unwrap();
    let d: Vec<f64> = tab.max_deviation_by_n().iter().map(|p| p.1).collect();
    assert!(d[0] > d[1] && d[1] > d[2] && d[2] < 0.05, "{d:?}");
    for (got, want) in d.iter().zip([0.0793, 0.0404, 0.0236]) {
        assert!((got - want).abs() < 5e-4, "{d:?}");
    }
    let mut out = Vec::new();
    tab.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("family,n,xi,exact_log_over_n,predicted_S0,deviation\n"));
}

#[test]
fn convergence_other_families() {
    let d =
        convergence_study(&Shape64::linear(3.0).unwrap(), &[20, 50], Family::II, None).unwrap().max_deviation_by_n();
    assert!(d[1].1 < d[0].1);
    let d = convergence_study(&edge_frozen(), &[20, 40, 80], Family::Hat, None).unwrap().max_deviation_by_n();
    assert!(d[0].1 > d[1].1 && d[1].1 > d[2].1 && d[2].1 < 0.03, "{d:?}");
    // below the apex the exact value tends to 1
    let tab = convergence_study(&Shape64::linear(3.0).unwrap(), &[100], Family::I, Some((1.5, 1.9))).unwrap();
    assert!(tab.rows.iter().all(|r| r.exact_log_over_n.abs() < 0.01 && r.predicted_s0 == 0.0));
}
