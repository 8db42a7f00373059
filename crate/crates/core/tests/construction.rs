use polar_wiretap::channels::DiscreteChannel;
use polar_wiretap::construction::{
    bec_z_profile, mc_z_estimate, profile_for, select_wiretap_sets, select_wiretap_sets_with,
    ProfileMethod, SelectionParams,
};
use polar_wiretap::rng::StreamKey;
use polar_wiretap::Error;

#[test]
fn monte_carlo_on_a_noiseless_channel_is_zero() {
    let p = mc_z_estimate(&DiscreteChannel::noiseless(), 32, 200, StreamKey::root(1)).unwrap();
    assert!(p.z.iter().all(|&z| z == 0.0));
    assert!(p.low_trial_warning);
}

#[test]
fn monte_carlo_on_a_useless_channel_is_one_half() {
    let p = mc_z_estimate(
        &DiscreteChannel::bsc(0.5).unwrap(),
        16,
        500,
        StreamKey::root(2),
    )
    .unwrap();
    assert!(p.z.iter().all(|&z| (z - 0.5).abs() < 1e-12), "{:?}", p.z);
}

#[test]
fn monte_carlo_on_erasures_tracks_half_the_bhattacharyya_parameter() {
    let (n, trials) = (64, 20_000u64);
    let exact = bec_z_profile(0.4, n).unwrap().z;
    let mc = mc_z_estimate(
        &DiscreteChannel::bec(0.4).unwrap(),
        n,
        trials,
        StreamKey::root(3),
    )
    .unwrap();
    assert_eq!(mc.method, ProfileMethod::MonteCarlo);
    for (i, (&z, &e)) in exact.iter().zip(&mc.z).enumerate() {
        let p = z / 2.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (e - p).abs() <= 3.0 * sigma + 1e-12,
            "index {i}: {e} vs {p}"
        );
    }
}

#[test]
fn monte_carlo_ranking_agrees_with_the_exact_ranking() {
    let n = 64;
    let exact = bec_z_profile(0.5, n).unwrap().z;
    let mc = mc_z_estimate(
        &DiscreteChannel::bec(0.5).unwrap(),
        n,
        100_000,
        StreamKey::root(4),
    )
    .unwrap()
    .z;
    let (mut agree, mut total) = (0usize, 0usize);
    for i in 0..n {
        for j in i + 1..n {
            if exact[i] == exact[j] {
                continue;
            }
            total += 1;
            agree += usize::from((exact[i] < exact[j]) == (mc[i] < mc[j]));
        }
    }
    let frac = agree as f64 / total as f64;
    assert!(frac >= 0.95, "agreement {frac}");
}

#[test]
fn monte_carlo_is_reproducible() {
    let c = DiscreteChannel::bsc(0.1).unwrap();
    let a = mc_z_estimate(&c, 32, 1000, StreamKey::root(5)).unwrap();
    let b = mc_z_estimate(&c, 32, 1000, StreamKey::root(5)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn profile_for_uses_the_exact_recursion_on_erasures() {
    let p = profile_for(
        &DiscreteChannel::bec(0.3).unwrap(),
        16,
        10,
        StreamKey::root(6),
    )
    .unwrap();
    assert_eq!(p.method, ProfileMethod::BecExact);
    assert_eq!(p.z, bec_z_profile(0.3, 16).unwrap().z);
}

#[test]
fn noisy_set_is_reliable_for_the_legitimate_user_on_degraded_erasures() {
    let n = 1024;
    let legit = bec_z_profile(0.2, n).unwrap();
    let eve = bec_z_profile(0.5, n).unwrap();
    let spec = select_wiretap_sets_with(
        &legit,
        &eve,
        &SelectionParams::from_capacities(0.8, 0.5, 0.1),
    )
    .unwrap();
    assert_eq!(spec.noisy_set().len(), 409);
    assert_eq!(spec.info_set().len() + spec.noisy_set().len(), 716);
    // Every noisy index is at least as good for the legitimate user.
    assert!(spec.noisy_set().iter().all(|&i| legit.z[i] <= eve.z[i]));
    let worst_decoded = spec
        .decoded_set()
        .iter()
        .map(|&i| legit.z[i])
        .fold(0.0, f64::max);
    let mut sorted = legit.z.clone();
    sorted.sort_by(f64::total_cmp);
    assert!(worst_decoded <= sorted[715]);
    // Erasure profiles are nested, so A and N together form the legitimate best set.
    let best: f64 = sorted[..716].iter().sum();
    assert!((legit.sum_over(&spec.decoded_set()) - best).abs() <= 1e-9);
}

#[test]
fn rates_above_capacity_are_infeasible() {
    let legit = bec_z_profile(0.5, 64).unwrap();
    let eve = bec_z_profile(0.7, 64).unwrap();
    match select_wiretap_sets(&legit, &eve, 0.6, 0.1) {
        Err(Error::Infeasible {
            needed,
            available,
            deficit,
            ..
        }) => {
            assert_eq!((needed, available, deficit), (38, 32, 6));
        }
        other => panic!("expected an infeasible selection, got {other:?}"),
    }
    assert!(matches!(
        select_wiretap_sets(&legit, &eve, 0.5, 0.4),
        Err(Error::Infeasible { .. })
    ));
}
