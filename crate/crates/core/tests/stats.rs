//! Monte-Carlo checks of the stream and the greedy phases against exact
//! expectations.

mod common;

use semirandom::high_d::MatchingState;
use semirandom::plan::n_ln_n;
use semirandom::{
    repeated_edge_count, run_trial, Decision, ProposalStream, StreamMode, TrialConfig,
};

use common::matching_waiting_time;

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    a * (2 * n - a - 1) / 2 + b - a - 1
}

#[test]
fn early_proposals_are_uniform_over_pairs() {
    let n = 1000usize;
    let prefix = 1000;
    let seeds = 100_000u64;
    let pairs = n * (n - 1) / 2;
    let mut counts = vec![0u32; pairs];
    for seed in 0..seeds {
        let stream = ProposalStream::new(n as u32, seed, StreamMode::Real).unwrap();
        for p in stream.take(prefix) {
            let (a, b) = p.edge.endpoints();
            counts[pair_index(n, a as usize, b as usize)] += 1;
        }
    }
    // each pair is in a uniform prefix with probability prefix / pairs
    let p = prefix as f64 / pairs as f64;
    let mean = seeds as f64 * p;
    let se = (seeds as f64 * p * (1.0 - p)).sqrt();
    let outside3 = counts
        .iter()
        .filter(|&&c| (c as f64 - mean).abs() > 3.0 * se)
        .count();
    let worst = counts
        .iter()
        .map(|&c| (c as f64 - mean).abs() / se)
        .fold(0.0, f64::max);
    // 0.27% expected beyond three standard errors
    assert!(
        (outside3 as f64) < 0.005 * pairs as f64,
        "{outside3} pairs beyond 3 SE"
    );
    assert!(worst < 6.0, "a pair deviates by {worst:.1} SE");
}

#[test]
fn matching_phase_leaves_the_predicted_number_unmatched() {
    let n = 2000u32;
    let omega = 4.0;
    let length = (n_ln_n(n) / omega).ceil() as u64;
    // matching size reached after `length` rounds by the exact waiting times
    let mut k = 0;
    while matching_waiting_time(n as u64, k + 1) <= length as f64 {
        k += 1;
    }
    let predicted = (n as u64 - 2 * k) as f64;
    let mut total = 0usize;
    for seed in 0..100 {
        let mut m = MatchingState::new(n);
        let stream = ProposalStream::new(n, seed, StreamMode::Real).unwrap();
        for p in stream.take(length as usize) {
            if m.decide(p.edge) == Decision::Accept {
                m.record(p.edge);
            }
        }
        total += m.unmatched_count();
    }
    let mean = total as f64 / 100.0;
    assert!(
        (mean - predicted).abs() <= 0.1 * predicted,
        "mean {mean}, predicted {predicted}"
    );
}

#[test]
fn auxiliary_repeats_stay_below_the_binomial_edge_count() {
    let n = 2000u32;
    let d = 4u32;
    let length = (n_ln_n(n) / 4.0).ceil() as u64;
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    // P(pair drawn in at least two of d independent phases)
    let q = length as f64 / pairs;
    let at_most_one = (1.0 - q).powi(d as i32) + d as f64 * q * (1.0 - q).powi(d as i32 - 1);
    let analytic = pairs * (1.0 - at_most_one);
    let mut total = 0usize;
    for seed in 0..100 {
        let mode = StreamMode::Auxiliary {
            num_phases: d,
            phase_length: length,
        };
        let log: Vec<_> = ProposalStream::new(n, seed, mode)
            .unwrap()
            .map(|p| (p.phase, p.edge))
            .collect();
        total += repeated_edge_count(&log);
    }
    let mean = total as f64 / 100.0;
    assert!(mean <= n_ln_n(n) / 2.0);
    assert!(
        (mean - analytic).abs() <= 0.1 * analytic,
        "mean {mean}, analytic {analytic}"
    );
}

/// Boost needs met before the round budget runs out, `n = 2000`, `d = 4`.
/// Fails at this size: a vertex sees about (1 + ε) ln n ≈ 9.9 proposals over
/// the whole run, so some vertex almost surely cannot reach degree 4.
#[test]
#[ignore = "asymptotic; fails at n = 2000, see README"]
fn boost_needs_are_met_at_desk_scale() {
    let cfg = TrialConfig::new(2000, 4);
    let met = (0..100)
        .filter(|&seed| run_trial(&cfg, seed).unwrap().diagnostics["needs_satisfied"] == 1.0)
        .count();
    assert!(met >= 95, "needs met in {met} of 100 trials");
}
