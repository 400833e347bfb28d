// SPDX-License-Identifier: Apache-2.0

use rand::Rng;
use serde::Serialize;

use super::classical::{run_classical, ClassicalStrategy};
use super::efficiency::{measurement_count, EfficiencyModel};
use super::ProtocolKind;
use crate::model::InputAssignment;
use crate::qudit::{entangled_state, uniform_state, Side};

/// What one hop of a run produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRecord {
    /// Classical dit sent on a hop.
    Message(usize),
    /// Fourier outcome observed by the receiver of a hop (`P1` records the
    /// running phase label only at the last hop, so earlier hops carry none).
    Outcome(Option<usize>),
    /// Outcomes `(l1, l2)` of the sender and receiver halves of an entangled link.
    LinkOutcomes(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunTranscript {
    pub kind: ProtocolKind,
    pub per_step: Vec<StepRecord>,
    pub final_answer: usize,
    pub correct: bool,
    pub detector_failed: bool,
}

/// One stochastic run of `kind` on fixed inputs.
///
/// With an efficiency model every physical measurement fails independently
/// with probability `1 - eta`; any failure replaces the final answer with a
/// uniform guess.
pub fn simulate_run<R: Rng + ?Sized>(
    kind: ProtocolKind,
    assignment: &InputAssignment,
    strategy: &ClassicalStrategy,
    rng: &mut R,
    efficiency: Option<EfficiencyModel>,
) -> RunTranscript {
    let instance = assignment.instance();
    let n = instance.n();
    let d = instance.d();
    let xs = assignment.xs();
    let ys = assignment.ys();
    let links = instance.links();

    let (per_step, mut final_answer) = match kind {
        ProtocolKind::Classical => {
            let (messages, answer) = run_classical(assignment, strategy);
            (
                messages.into_iter().map(StepRecord::Message).collect(),
                answer,
            )
        }
        ProtocolKind::P1 => {
            // R_1: U(x_1); R_i: U(x_i - y_i); R_M: U(-y_M), then measure.
            let mut state = uniform_state(d)
                .and_then(|s| s.apply_phase(xs[0] as i64, n, d))
                .expect("valid qudit");
            for i in 1..links {
                state = state
                    .apply_phase(xs[i] as i64 - ys[i - 1] as i64, n, d)
                    .expect("valid qudit");
            }
            state = state
                .apply_phase(-(ys[links - 1] as i64), n, d)
                .expect("valid qudit");
            let l = state.fourier_distribution().sample(rng);
            let mut steps = vec![StepRecord::Outcome(None); links];
            steps[links - 1] = StepRecord::Outcome(Some(l));
            (steps, l)
        }
        ProtocolKind::P2 => {
            let mut state = uniform_state(d)
                .and_then(|s| s.apply_phase(xs[0] as i64, n, d))
                .expect("valid qudit");
            let mut steps = Vec::with_capacity(links);
            let mut last = 0;
            for i in 0..links {
                state = state
                    .apply_phase(-(ys[i] as i64), n, d)
                    .expect("valid qudit");
                let (l, collapsed) = state.qnd_collapse(rng).expect("single qudit");
                steps.push(StepRecord::Outcome(Some(l)));
                last = l;
                if i + 1 < links {
                    state = collapsed
                        .apply_phase(xs[i + 1] as i64, n, d)
                        .expect("valid qudit");
                }
            }
            (steps, last)
        }
        ProtocolKind::PE => {
            let pair = entangled_state(d).expect("valid dimension");
            let mut running = 0;
            let mut steps = Vec::with_capacity(links);
            for (&x, &y) in xs.iter().zip(ys) {
                let dist = pair
                    .apply_phase_local(x as i64, Side::Left, n, d)
                    .and_then(|s| s.apply_phase_local(-(y as i64), Side::Right, n, d))
                    .expect("valid pair")
                    .fourier_distribution();
                let idx = dist.sample(rng);
                let (l1, l2) = (idx / d, idx % d);
                running = (running + l1 + l2) % d;
                steps.push(StepRecord::LinkOutcomes(l1, l2));
            }
            (steps, running)
        }
    };

    let mut detector_failed = false;
    if let Some(model) = efficiency {
        let m = measurement_count(kind, instance);
        for _ in 0..m {
            if !rng.random_bool(model.eta()) {
                detector_failed = true;
            }
        }
        if detector_failed {
            final_answer = rng.random_range(0..d);
        }
    }

    RunTranscript {
        kind,
        per_step,
        final_answer,
        correct: final_answer == assignment.ground_truth(),
        detector_failed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_assignment, CcpInstance};
    use crate::protocols::{exact_success, Evaluation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transcripts_have_one_record_per_hop() {
        let i = CcpInstance::new(30, 5, 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = sample_assignment(&i, &mut rng);
        for k in ProtocolKind::ALL {
            let t = simulate_run(k, &a, &ClassicalStrategy::default(), &mut rng, None);
            assert_eq!(t.per_step.len(), 4);
            assert_eq!(t.kind, k);
            assert!(!t.detector_failed);
        }
    }

    #[test]
    fn perfect_detectors_never_fail() {
        let i = CcpInstance::new(60, 4, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let a = sample_assignment(&i, &mut rng);
            for k in ProtocolKind::ALL {
                let t = simulate_run(
                    k,
                    &a,
                    &ClassicalStrategy::default(),
                    &mut rng,
                    Some(EfficiencyModel::new(1.0).unwrap()),
                );
                assert!(!t.detector_failed);
            }
        }
    }

    #[test]
    fn blind_detectors_guess() {
        let i = CcpInstance::new(60, 3, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trials = 20_000;
        for k in ProtocolKind::QUANTUM {
            let mut wins = 0;
            for _ in 0..trials {
                let a = sample_assignment(&i, &mut rng);
                let t = simulate_run(
                    k,
                    &a,
                    &ClassicalStrategy::default(),
                    &mut rng,
                    Some(EfficiencyModel::new(0.0).unwrap()),
                );
                assert!(t.detector_failed);
                wins += t.correct as usize;
            }
            let p = wins as f64 / trials as f64;
            let sigma = (0.25 / trials as f64).sqrt();
            assert!((p - 0.5).abs() <= 3.0 * sigma, "{k}: {p}");
        }
    }

    #[test]
    fn zero_drift_runs_always_succeed() {
        let i = CcpInstance::new(12, 4, 3, 1).unwrap();
        let a = crate::model::InputAssignment::new(&i, 5, &[(7, 29), (0, 19)], 12).unwrap();
        assert_eq!(a.total_drift(), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for k in ProtocolKind::ALL {
            let p = exact_success(k, Evaluation::Assignment(&a), &ClassicalStrategy::default());
            for _ in 0..50 {
                let t = simulate_run(k, &a, &ClassicalStrategy::default(), &mut rng, None);
                if k != ProtocolKind::Classical {
                    assert!(t.correct, "{k}");
                }
            }
            if k != ProtocolKind::Classical {
                assert!((p - 1.0).abs() < 1e-12);
            }
        }
    }
}
