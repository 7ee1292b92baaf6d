//! Samplers checked against enumeration oracles and closed forms.

use std::f64::consts::FRAC_PI_4;

use bls_core::circuit::{accumulate_unitary, sample_random_circuit, BeamSplitterGate, Circuit};
use bls_core::diagnostics::{
    empirical_distribution, enumerate_distinguishable_distribution, enumerate_fock_distribution, enumerate_model, tvd,
    Distribution,
};
use bls_core::gaussian::{input_covariance, quad_to_complex};
use bls_core::lattice::{build_lattice, LatticeSpec};
use bls_core::rng::substream;
use bls_core::sampling::{
    approx_sublattice_sample, distinguishable_fock_sample, gbs_exact_sample, threshold_coarse_grain, ApproxSampler,
    ExactSampler, Outcome, TruncationPolicy,
};
use rand::Rng;

fn sigma3(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

/// One 50/50 gate on two modes, each holding a source.
fn balanced_pair() -> (LatticeSpec, Circuit) {
    let layout = build_lattice(1, 2, 1).unwrap();
    let gate = BeamSplitterGate { modes: (0, 1), theta: FRAC_PI_4, phi: 0.0, layer: 0 };
    let c = Circuit { layout: layout.clone(), layers: vec![vec![gate]], seed: None };
    (layout, c)
}

#[test]
fn single_mode_vacuum_frequency() {
    let r: f64 = 0.5;
    let sigma = quad_to_complex(&input_covariance(&build_lattice(1, 1, 1).unwrap(), r).unwrap());
    let policy = TruncationPolicy::certified(1, r, 1e-6).unwrap();
    let mut rng = substream(101, 1);
    let n = 100_000;
    let zeros = (0..n).filter(|_| gbs_exact_sample(&sigma, &policy, &mut rng).unwrap()[0] == 0).count();
    let p0 = 1.0 / r.cosh();
    assert!((zeros as f64 / n as f64 - p0).abs() <= sigma3(p0, n));
}

#[test]
fn unsqueezed_sources_emit_nothing() {
    let layout = build_lattice(1, 2, 3).unwrap();
    let c = sample_random_circuit(&layout, 4, &mut substream(5, 0));
    let policy = TruncationPolicy::certified(2, 0.0, 1e-6).unwrap();
    let exact = ExactSampler::new(&c, 0.0, policy).unwrap();
    let mut rng = substream(5, 1);
    for _ in 0..1000 {
        assert!(exact.sample(&mut rng).unwrap().iter().all(|&n| n == 0));
        assert!(approx_sublattice_sample(&c, &layout, 0.0, &policy, &mut rng).unwrap().iter().all(|&n| n == 0));
    }
}

#[test]
fn single_source_approximation_is_exact() {
    let layout = build_lattice(1, 1, 5).unwrap();
    let c = sample_random_circuit(&layout, 6, &mut substream(8, 0));
    let r = 0.6;
    let policy = TruncationPolicy::certified(1, r, 1e-6).unwrap();
    let exact = enumerate_model(ExactSampler::new(&c, r, policy).unwrap().model(), &policy).unwrap();
    let approx = ApproxSampler::new(&c, &layout, r, policy).unwrap();
    let approx = enumerate_model(&approx.models()[0], &policy).unwrap();
    assert!(tvd(&exact, &approx).unwrap() <= 1e-12);
}

#[test]
fn zero_depth_approximation_is_single_mode_statistics() {
    let layout = build_lattice(1, 2, 2).unwrap();
    let c = sample_random_circuit(&layout, 0, &mut substream(9, 0));
    let r: f64 = 0.5;
    let policy = TruncationPolicy::certified(2, r, 1e-6).unwrap();
    let approx = ApproxSampler::new(&c, &layout, r, policy).unwrap();
    let (sech, t2) = (1.0 / r.cosh(), r.tanh().powi(2));
    for (model, sub) in approx.models().iter().zip(approx.sublattices()) {
        let d = enumerate_model(model, &policy).unwrap();
        let local_source = sub.iter().position(|m| layout.sources.contains(m)).unwrap();
        let mut counts = vec![0; sub.len()];
        // P(2m) = sech r · (2m)! / (2^m m!)² · tanh^{2m} r
        let mut coeff = 1.0;
        for m in 0..4 {
            counts[local_source] = 2 * m;
            assert!((d.prob_counts(&counts) - sech * coeff * t2.powi(m as i32)).abs() < 1e-12);
            coeff *= (2 * m + 1) as f64 / (2 * m + 2) as f64;
            counts[local_source] = 2 * m + 1;
            assert_eq!(d.prob_counts(&counts), 0.0);
        }
    }
}

#[test]
fn distinguishable_photons_stay_put_without_gates() {
    let layout = build_lattice(1, 3, 3).unwrap();
    let c = sample_random_circuit(&layout, 0, &mut substream(1, 0));
    let u = accumulate_unitary(&c).unwrap().u;
    let mut expected = vec![0; layout.modes];
    for &s in &layout.sources {
        expected[s] = 1;
    }
    let mut rng = substream(1, 1);
    for _ in 0..100 {
        assert_eq!(distinguishable_fock_sample(&u, &layout, &mut rng).unwrap(), expected);
    }
    let exact = enumerate_fock_distribution(&u, &layout).unwrap();
    assert_eq!(exact.len(), 1);
    assert!((exact.prob_counts(&expected) - 1.0).abs() < 1e-15);
}

#[test]
fn single_photon_balanced_split() {
    let (_, c) = balanced_pair();
    let one = build_lattice(1, 1, 2).unwrap();
    // one photon entering the first mode of the 50/50 gate
    let mut u = accumulate_unitary(&c).unwrap().u;
    if one.sources[0] != 0 {
        u.swap_columns(0, one.sources[0]);
    }
    let mut rng = substream(3, 1);
    let n = 100_000;
    let left = (0..n).filter(|_| distinguishable_fock_sample(&u, &one, &mut rng).unwrap() == vec![1, 0]).count();
    assert!((left as f64 / n as f64 - 0.5).abs() <= sigma3(0.5, n));
}

#[test]
fn hong_ou_mandel_gap() {
    let (layout, c) = balanced_pair();
    let u = accumulate_unitary(&c).unwrap().u;
    let exact = enumerate_fock_distribution(&u, &layout).unwrap();
    assert!(exact.prob_counts(&[1, 1]).abs() < 1e-15);
    assert!((exact.prob_counts(&[2, 0]) - 0.5).abs() < 1e-14);
    assert!((exact.prob_counts(&[0, 2]) - 0.5).abs() < 1e-14);
    let dist = enumerate_distinguishable_distribution(&u, &layout).unwrap();
    assert!((dist.prob_counts(&[1, 1]) - 0.5).abs() < 1e-14);
    let mut rng = substream(4, 1);
    let n = 100_000;
    let coincidences =
        (0..n).filter(|_| distinguishable_fock_sample(&u, &layout, &mut rng).unwrap() == vec![1, 1]).count();
    assert!((coincidences as f64 / n as f64 - 0.5).abs() <= sigma3(0.5, n));
}

#[test]
fn coarse_graining_examples() {
    assert_eq!(threshold_coarse_grain(&[0, 0, 0]), vec![false, false, false]);
    assert_eq!(threshold_coarse_grain(&[2, 0, 1]), vec![true, false, true]);
}

#[test]
fn click_marginals_from_samples_match_enumeration() {
    let layout = build_lattice(1, 2, 2).unwrap();
    let c = sample_random_circuit(&layout, 3, &mut substream(31, 0));
    let r = 0.5;
    let policy = TruncationPolicy::certified(2, r, 1e-6).unwrap();
    let sampler = ExactSampler::new(&c, r, policy).unwrap();
    let clicks_exact = enumerate_model(sampler.model(), &policy).unwrap().coarse_grain().unwrap();
    let n = 20_000;
    let samples: Vec<Outcome> = (0..n as u64)
        .map(|i| Outcome::Clicks(threshold_coarse_grain(&sampler.sample(&mut substream(31, i + 1)).unwrap())))
        .collect();
    let empirical = empirical_distribution(&samples).unwrap();
    for j in 0..layout.modes {
        let p = clicks_exact.marginal(&[j]).unwrap().prob(&Outcome::Clicks(vec![true]));
        let q = empirical.marginal(&[j]).unwrap().prob(&Outcome::Clicks(vec![true]));
        assert!((p - q).abs() <= sigma3(p, n), "mode {j}: {q} vs {p}");
    }
}

#[test]
fn empirical_distribution_concentrates() {
    let truth = Distribution::from_counts([(vec![0], 0.2), (vec![1], 0.5), (vec![2], 0.3)]).unwrap();
    let mut rng = substream(77, 1);
    let samples: Vec<Outcome> = (0..100_000)
        .map(|_| {
            let u: f64 = rng.random();
            Outcome::Counts(vec![if u < 0.2 {
                0
            } else if u < 0.7 {
                1
            } else {
                2
            }])
        })
        .collect();
    assert!(tvd(&truth, &empirical_distribution(&samples).unwrap()).unwrap() <= 0.02);
}
