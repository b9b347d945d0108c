use nilp_arctic::arctic::{apex, portions, SamplingOptions};
use nilp_arctic::boundary::StartSequence;
use nilp_arctic::exactcomb::brute_force_enumerate;
use nilp_arctic::sampler::{
    chi_square_uniform, outer_shell, overlay_export, overlay_stats, sample_ensemble, transition_balance, ChainState,
    OverlayRegion, SampleOptions,
};
use nilp_arctic::{Resolvent64, Shape64};

fn seq(a: &[i64]) -> StartSequence {
    StartSequence::new(a.to_vec()).unwrap()
}

#[test]
fn minimal_states() {
    let one = ChainState::init_minimal(&seq(&[0, 1]), 1);
    assert!(one.configuration().is_valid());
    let two = ChainState::init_minimal(&seq(&[0, 2]), 1);
    assert_eq!(two.configuration().to_runlength(), "- W1N1W1");
    let big = ChainState::init_minimal(&seq(&[0, 2, 3, 6, 10, 12, 15]), 1);
    assert!(big.configuration().is_valid());
}

#[test]
fn single_state_rejects_everything() {
    let mut st = ChainState::init_minimal(&seq(&[0, 1]), 3);
    let before = st.configuration();
    st.run(1000);
    assert_eq!(st.accepted, 0);
    assert_eq!(st.configuration(), before);
}

#[test]
fn two_state_chain_alternates_evenly() {
    let s = seq(&[0, 2]);
    let samples = sample_ensemble(&s, &SampleOptions { n_samples: 20_000, seed: 5, ..Default::default() });
    let states = brute_force_enumerate(&s).unwrap();
    let lowest = ChainState::init_minimal(&s, 0).configuration();
    let frac = samples.iter().filter(|c| **c == lowest).count() as f64 / samples.len() as f64;
    assert!((frac - 0.5).abs() < 0.02, "{frac}");
    assert!(chi_square_uniform(&samples, &states).passes(0.01));
}

#[test]
fn acceptance_positive_and_balanced() {
    let s = seq(&[0, 2, 4]);
    let mut st = ChainState::init_minimal(&s, 11);
    st.run(10_000);
    assert!(st.acceptance_rate() > 0.0);
    assert!(transition_balance(&s, 200_000, 4) < 3.0);
}

#[test]
fn deterministic_given_seed() {
    let s = seq(&[0, 2, 3, 6]);
    let o = SampleOptions { n_samples: 50, seed: 42, chains: 3, ..Default::default() };
    assert_eq!(sample_ensemble(&s, &o), sample_ensemble(&s, &o));
    let other = SampleOptions { seed: 43, ..o };
    assert_ne!(sample_ensemble(&s, &o), sample_ensemble(&s, &other));
}

#[test]
fn uniform_on_eight_states() {
    let s = seq(&[0, 2, 4]);
    let states = brute_force_enumerate(&s).unwrap();
    assert_eq!(states.len(), 8);
    let t = std::time::Instant::now();
    let samples = sample_ensemble(
        &s,
        &SampleOptions { n_samples: 100_000, burn_in: Some(10_000), seed: 9, ..Default::default() },
    );
    let chi = chi_square_uniform(&samples, &states);
    assert!(chi.passes(0.01), "{chi:?}");
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn overlay_small() {
    let shape = Shape64::linear(3.0).unwrap();
    let s = shape.realize(12).unwrap();
    let samples = sample_ensemble(&s, &SampleOptions { n_samples: 20, seed: 1, ..Default::default() });
    let res = Resolvent64::new(shape.clone());
    let ps = portions(&res, SamplingOptions { grid: 200, ..Default::default() }).unwrap();
    let region = OverlayRegion::from_portions(&ps, 3.0).unwrap();
    let st = overlay_stats(&outer_shell(&samples), &region, apex(&shape).unwrap(), 0.1);
    assert!(st.inside_fraction > 0.9, "{st:?}");
    let mut csv = Vec::new();
    let svg = overlay_export(&[], &ps, 3.0, &mut csv).unwrap();
    assert!(svg.contains("<polyline") && !svg.contains("<circle"));
    assert_eq!(String::from_utf8(csv).unwrap(), "X,Y\n");
}
