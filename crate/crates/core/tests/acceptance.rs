//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//! Run with `cargo test --release --test acceptance` for realistic timings.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilp_arctic::arctic::{
    apex, edge_freeze_check, legendre_check, moments_check, portions, special_points, symmetry_check, ArcticPortion,
    SamplingOptions,
};
use nilp_arctic::asymptotics::{convergence_study, Family};
use nilp_arctic::boundary::shapefile::ShapeFile;
use nilp_arctic::boundary::{PlElement, StartSequence};
use nilp_arctic::exactcomb::{
    brute_force_count, brute_force_enumerate, det_exact, lgv_a, lgv_a_modified, lgv_ahat, lgv_ahat_modified,
    to_rational, PartitionReport,
};
use nilp_arctic::onepoint::{hcheck_residues, HEvaluator, HhatEvaluator};
use nilp_arctic::sampler::{
    chi_square_uniform, outer_shell, overlay_stats, sample_ensemble, OverlayRegion, SampleOptions, Start,
};
use nilp_arctic::{Resolvent64, Shape64};

// pinned tolerances and budgets
const C1_BUDGET: Duration = Duration::from_secs(30);
const C5_PARABOLA: f64 = 1e-9;
const C5_QUARTIC: f64 = 1e-7;
const C5_THREE_HALVES: f64 = 1e-7;
const C5_ELLIPSE: f64 = 1e-8;
const C6_TIGHT: f64 = 1e-8;
const C6_POWER: f64 = 1e-6;
const C7_BOUND: f64 = 0.05;
const C7_BUDGET: Duration = Duration::from_secs(300);
const C8_TANGENCY: f64 = 1e-9;
const C8_LEGENDRE: f64 = 1e-6;
const C8_MOMENTS: [f64; 3] = [1e-8, 1e-6, 1e-5];
const C8_SYMMETRY: f64 = 1e-8;
const C8_SYMMETRY_X: f64 = 1e-10;
const C8_EDGE: f64 = 1e-10;
const C9_SIGNIFICANCE: f64 = 0.01;
const C9_SAMPLES: usize = 100_000;
const C9_BUDGET: Duration = Duration::from_secs(60);
const C10_FRACTION: f64 = 0.95;
const C10_MARGIN: f64 = 0.1;
const C10_N: usize = 60;
const C10_BURN_IN: u64 = 30_000_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn seq(a: &[i64]) -> StartSequence {
    StartSequence::new(a.to_vec()).unwrap()
}

/// `n` in `1..=max_n`, distinct points drawn from `1..=max_last`.
fn random_sequence(rng: &mut ChaCha8Rng, max_n: usize, max_last: i64) -> StartSequence {
    let n = rng.random_range(1..=max_n);
    let mut pool: Vec<i64> = (1..=max_last).collect();
    let mut a = vec![0];
    for _ in 0..n {
        let k = rng.random_range(0..pool.len());
        a.push(pool.swap_remove(k));
    }
    a.sort_unstable();
    seq(&a)
}

fn shape_file(text: &str) -> Shape64 {
    ShapeFile::parse(text).unwrap().shape().unwrap()
}

fn seg(width: f64, slope: f64) -> PlElement<f64> {
    PlElement::Segment { width, slope }
}

fn hexagon() -> Shape64 {
    Shape64::piecewise(&[seg(1.0 / 3.0, 1.0), PlElement::Jump { height: 1.0 }, seg(2.0 / 3.0, 1.0)]).unwrap()
}

fn five_piece() -> Shape64 {
    Shape64::piecewise(&[seg(0.2, 1.0), seg(0.2, 2.0), seg(0.2, 1.0), seg(0.2, 2.0), seg(0.2, 1.0)]).unwrap()
}

fn sampled(shape: Shape64, grid: usize) -> Result<(Resolvent64, Vec<ArcticPortion<f64>>), String> {
    let r = Resolvent64::new(shape);
    let p = portions(&r, SamplingOptions { grid, ..Default::default() }).map_err(|e| e.to_string())?;
    Ok((r, p))
}

fn max_residual(ps: &[ArcticPortion<f64>], f: impl Fn(f64, f64) -> f64) -> f64 {
    ps.iter().flat_map(|p| p.samples.iter()).map(|s| f(s.px, s.py).abs()).fold(0.0, f64::max)
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_identities() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut brute = 0;
    for _ in 0..200 {
        let s = random_sequence(&mut rng, 8, 20);
        let r = PartitionReport::compute(&s);
        require(r.consistent(), || format!("routes disagree on {s}: {r:?}"))?;
        let rational = det_exact(&to_rational(&lgv_a(&s)));
        require(rational == BigRational::from_integer(r.det_a.clone()), || {
            format!("rational elimination differs on {s}")
        })?;
        if let Ok(c) = brute_force_count(&s) {
            require(c == r.det_a, || format!("enumeration gives {c} on {s}, determinant {}", r.det_a))?;
            brute += 1;
        }
    }
    let el = t.elapsed();
    require(el < C1_BUDGET, || format!("took {el:?}"))?;
    Ok(format!("200 sequences, 5 routes + rational elimination agree, {brute} also enumerated, {el:.2?}"))
}

fn c2_pure() -> Outcome {
    for p in [2i64, 3, 5] {
        for n in 0..=10usize {
            let s = StartSequence::pure(p, n).unwrap();
            let want = BigInt::from(p).pow((n * (n + 1) / 2) as u32);
            let r = PartitionReport::compute(&s);
            require(r.consistent() && r.det_a == want, || format!("p={p} n={n}: {} vs {want}", r.det_a))?;
        }
    }
    Ok("p in {2,3,5}, n = 0..10".into())
}

fn c3_sum_rules() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for _ in 0..50 {
        let s = random_sequence(&mut rng, 8, 24);
        let n = s.n() as i64;
        let h = HEvaluator::new(&s);
        let ht = HEvaluator::new(&s.tilde().as_sequence());
        for l in n..=s.last() {
            // H~(n-1) = 0; otherwise H~(l-1) = H(a~, a_n - l + 1 + n)
            let tilde = if l - 1 == n - 1 {
                BigRational::from_integer(0.into())
            } else {
                ht.eval(s.last() - (l - 1) + n).unwrap()
            };
            require(h.eval(l).unwrap() + tilde == BigRational::one(), || format!("H + H~ != 1 on {s} at {l}"))?;
            checked += 1;
        }
        if s.m() > 0 {
            let hat = HhatEvaluator::new(&s).unwrap();
            for l in 0..=n {
                let lhs = hcheck_residues(&s, l).unwrap();
                require(lhs == BigRational::one() - hat.eval(l + 1).unwrap(), || {
                    format!("Hcheck != 1 - Hhat on {s} at {l}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("50 sequences, {checked} identities exact"))
}

fn c4_oracle() -> Outcome {
    let mut instances = 0;
    let mut identities = 0;
    // every subset of 1..=12 of size 1..=5
    for mask in 1u32..(1 << 12) {
        if mask.count_ones() > 5 {
            continue;
        }
        let mut a = vec![0];
        a.extend((1..=12).filter(|k| mask & (1 << (k - 1)) != 0));
        let s = seq(&a);
        instances += 1;
        let det = BigRational::from_integer(lgv_a(&s).det_bareiss());
        let h = HEvaluator::new(&s);
        for l in 0..=s.last() {
            let m = BigRational::from_integer(lgv_a_modified(&s, l).det_bareiss());
            require(h.eval(l).unwrap() * &det == m, || format!("H det(A) != det(A') on {s} at {l}"))?;
            identities += 1;
        }
        if s.m() > 0 {
            let dethat = BigRational::from_integer(lgv_ahat(&s).det_bareiss());
            let hat = HhatEvaluator::new(&s).unwrap();
            for l in 0..=s.n() as i64 + 1 {
                let m = BigRational::from_integer(lgv_ahat_modified(&s, l).det_bareiss());
                require(hat.eval(l).unwrap() * &dethat == m, || format!("Hhat det != det(Â') on {s} at {l}"))?;
                identities += 1;
            }
        }
    }
    Ok(format!("{instances} guarded instances, {identities} identities exact"))
}

fn c5_curves() -> Outcome {
    let (_, ps) = sampled(Shape64::linear(2.0).unwrap(), 400)?;
    let r2 = max_residual(&ps, |x, y| (2.0 * x - y).powi(2) - 8.0 * (x - y));
    let (_, ps) = sampled(Shape64::linear(3.0).unwrap(), 400)?;
    let r3 = max_residual(&ps, |x, y| {
        (3.0 * x * x - 3.0 * x * y + y * y).powi(2) - 2.0 * (3.0 * x - y) * (9.0 * x * x - 15.0 * x * y + 7.0 * y * y)
            + 81.0 * (x - y).powi(2)
    });
    let (_, ps) = sampled(Shape64::linear(1.5).unwrap(), 400)?;
    let r32 = max_residual(&ps, |x, y| {
        32.0 * (3.0 * x * x - 3.0 * x * y + y * y).powi(2)
            - 16.0 * (54.0 * x.powi(3) - 135.0 * x * x * y + 99.0 * x * y * y - 19.0 * y.powi(3))
            + 162.0 * (5.0 * x - 8.0 * y) * (x - y)
            - 243.0 * (x - y)
    });
    let (a, b, c) = (1.0 / 3.0, 1.0, 2.0 / 3.0);
    let (_, ps) = sampled(hexagon(), 400)?;
    let re =
        max_residual(&ps, |x, y| ((c - b) * y - (a + c) * x + a * (a + b + c)).powi(2) + 4.0 * b * c * y * (y - x));
    let msg = format!("2u {r2:.1e}, 3u {r3:.1e}, 3u/2 {r32:.1e}, hexagon {re:.1e}");
    require(r2 < C5_PARABOLA && r3 < C5_QUARTIC && r32 < C5_THREE_HALVES && re < C5_ELLIPSE, || msg.clone())?;
    Ok(msg)
}

fn c6_special() -> Outcome {
    let e = |v: f64, w: f64| (v - w).abs();
    let sp = special_points(&Shape64::linear(3.0).unwrap()).map_err(|e| e.to_string())?;
    let d1 = [
        e(sp.top.x, 2.0),
        e(sp.top.y, 1.0),
        e(sp.right.x, 3.0),
        e(sp.right.y, 0.0),
        e(sp.left.x, 0.0),
        e(sp.left.y, 0.0),
    ];
    let sp = special_points(&shape_file("[analytic]\nexpr = \"power\"\nexponent = \"1/3\"\nscale = 3\n"))
        .map_err(|e| e.to_string())?;
    let d2 = [e(sp.top.x, 2.75), e(sp.top.y, 1.0), e(sp.right.x, 3.0), e(sp.right.y, 3.0 * (-1.5f64).exp())];
    let sp =
        special_points(&shape_file("[analytic]\nexpr = \"poly\"\ncoeffs = [0, 1, 1]\n")).map_err(|e| e.to_string())?;
    let d3 = [e(sp.left.x, 0.5), e(sp.left.y, 0.5)];
    let m = |d: &[f64]| d.iter().copied().fold(0.0, f64::max);
    let msg = format!("3u {:.1e}, u^(1/3)/(1/3) {:.1e}, u+u^2 {:.1e}", m(&d1), m(&d2), m(&d3));
    require(m(&d1) < C6_TIGHT && m(&d2) < C6_POWER && m(&d3) < C6_TIGHT, || msg.clone())?;
    Ok(msg)
}

fn c7_convergence() -> Outcome {
    let t = Instant::now();
    let tab = convergence_study(&Shape64::linear(3.0).unwrap(), &[20, 50, 100], Family::I, Some((2.2, 2.8)))
        .map_err(|e| e.to_string())?;
    let d: Vec<f64> = tab.max_deviation_by_n().iter().map(|p| p.1).collect();
    let el = t.elapsed();
    let msg = format!("max deviation n=20,50,100: {:.4} {:.4} {:.4}, {el:.2?}", d[0], d[1], d[2]);
    require(d[0] > d[1] && d[1] > d[2] && d[2] < C7_BOUND && el < C7_BUDGET, || msg.clone())?;
    Ok(msg)
}

fn c8_properties() -> Outcome {
    let shapes = [
        Shape64::linear(2.0).unwrap(),
        Shape64::linear(3.0).unwrap(),
        hexagon(),
        five_piece(),
        Shape64::piecewise(&[seg(0.5, 2.0), PlElement::Jump { height: 1.0 }, seg(0.5, 2.0)]).unwrap(),
        Shape64::piecewise(&[seg(1.0 / 3.0, 2.0), seg(1.0 / 3.0, 1.0), seg(1.0 / 3.0, 2.0)]).unwrap(),
        shape_file("[analytic]\nexpr = \"poly\"\ncoeffs = [0, 1, 1]\n"),
        shape_file("[analytic]\nexpr = \"power\"\nexponent = \"1/3\"\nscale = 3\n"),
    ];
    let mut tangency = 0.0f64;
    for s in shapes {
        let (_, ps) = sampled(s, 200)?;
        tangency = ps.iter().map(|p| p.max_tangency_residual()).fold(tangency, f64::max);
    }
    let mut legendre = 0.0f64;
    for p in [2.0, 3.0] {
        let (r, ps) = sampled(Shape64::linear(p).unwrap(), 200)?;
        for portion in &ps {
            legendre = legendre.max(legendre_check(&r, portion).map_err(|e| e.to_string())?);
        }
    }
    let f1 = moments_check(&Resolvent64::new(Shape64::linear(2.0).unwrap()), 4).map_err(|e| e.to_string())?;
    let f3 = moments_check(&Resolvent64::new(Shape64::linear(3.0).unwrap()), 4).map_err(|e| e.to_string())?;
    let fq = moments_check(&Resolvent64::new(shape_file("[analytic]\nexpr = \"poly\"\ncoeffs = [0, 1, 1]\n")), 4)
        .map_err(|e| e.to_string())?;
    let moments = [f1.deviations[0].max(f3.deviations[0]), f3.deviations[1], fq.deviations[2]];
    let r = Resolvent64::new(five_piece());
    let a1 = r.shape().alpha_end();
    let ts: Vec<f64> =
        (0..60).map(|k| -5.0 + k as f64 * 0.173).filter(|t| r.eval(*t).is_ok() && r.eval(a1 - t).is_ok()).collect();
    let (xd, cd) = symmetry_check(&r, &ts).map_err(|e| e.to_string())?;
    let edge = edge_freeze_check(&Resolvent64::new(Shape64::piecewise(&[seg(0.5, 2.0), seg(0.5, 1.0)]).unwrap()), 200)
        .map_err(|e| e.to_string())?;
    let msg = format!(
        "tangency {tangency:.1e}, Legendre {legendre:.1e}, moments {:.1e}/{:.1e}/{:.1e}, symmetry {cd:.1e} (x {xd:.1e}), edge freeze {edge:.1e}",
        moments[0], moments[1], moments[2]
    );
    let ok = tangency < C8_TANGENCY
        && legendre < C8_LEGENDRE
        && moments.iter().zip(C8_MOMENTS).all(|(d, tol)| *d < tol)
        && cd < C8_SYMMETRY
        && xd < C8_SYMMETRY_X
        && edge < C8_EDGE;
    require(ok, || msg.clone())?;
    Ok(msg)
}

fn c9_uniformity() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let random = loop {
        let mut pool: Vec<i64> = (1..=10).collect();
        let mut a = vec![0];
        for _ in 0..3 {
            let k = rng.random_range(0..pool.len());
            a.push(pool.swap_remove(k));
        }
        a.sort_unstable();
        let s = seq(&a);
        if brute_force_count(&s).unwrap() > BigInt::from(2) {
            break s;
        }
    };
    let mut parts = Vec::new();
    for (k, s) in [seq(&[0, 2]), seq(&[0, 2, 4]), random].iter().enumerate() {
        let states = brute_force_enumerate(s).map_err(|e| e.to_string())?;
        let samples =
            sample_ensemble(s, &SampleOptions { n_samples: C9_SAMPLES, seed: 90 + k as u64, ..Default::default() });
        let chi = chi_square_uniform(&samples, &states);
        parts.push(format!("{s} [{} states] p={:.3}", states.len(), chi.p_value));
        require(chi.passes(C9_SIGNIFICANCE), || parts.join(", "))?;
    }
    let el = t.elapsed();
    require(el < C9_BUDGET, || format!("took {el:?}"))?;
    Ok(format!("{}, {el:.2?}", parts.join(", ")))
}

fn c10_overlay() -> Outcome {
    let t = Instant::now();
    let shape = Shape64::linear(3.0).unwrap();
    let s = shape.realize(C10_N).map_err(|e| e.to_string())?;
    let (_, ps) = sampled(shape.clone(), 400)?;
    let region = OverlayRegion::from_portions(&ps, 3.0).ok_or("no generic-I portion")?;
    // highest start: begins with about a quarter of the shell outside the region
    let opts = SampleOptions {
        n_samples: 20,
        burn_in: Some(C10_BURN_IN),
        thin: Some(200_000),
        seed: 10,
        chains: 4,
        start: Start::Maximal,
    };
    let samples = sample_ensemble(&s, &opts);
    let st = overlay_stats(&outer_shell(&samples), &region, apex(&shape).map_err(|e| e.to_string())?, C10_MARGIN);
    let msg = format!(
        "{:.2}% of {} vertices inside, mean distance {:.3}, {:.2?}",
        100.0 * st.inside_fraction,
        st.vertices,
        st.mean_distance,
        t.elapsed()
    );
    require(st.inside_fraction >= C10_FRACTION, || msg.clone())?;
    Ok(msg)
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact identity suite", c1_identities),
        ("pure-case partition function", c2_pure),
        ("sum rules", c3_sum_rules),
        ("oracle determinants", c4_oracle),
        ("algebraic curve residuals", c5_curves),
        ("special points", c6_special),
        ("convergence of (1/n) log H", c7_convergence),
        ("envelope property suite", c8_properties),
        ("sampler uniformity", c9_uniformity),
        ("sampler/curve overlay", c10_overlay),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
