// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo batches.
//!
//! Trial `i` of a batch with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`, so any trial can be
//! replayed alone and the outcome does not depend on how trials are spread
//! over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::classical::ClassicalStrategy;
use super::efficiency::EfficiencyModel;
use super::simulate::simulate_run;
use super::ProtocolKind;
use crate::model::{sample_assignment, CcpInstance, InputAssignment};

/// Random source of trial `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct BatchSpec {
    pub instance: CcpInstance,
    pub kind: ProtocolKind,
    pub trials: u64,
    pub seed: u64,
    pub efficiency: Option<EfficiencyModel>,
    pub strategy: ClassicalStrategy,
    /// Fixed inputs for every trial; `None` samples fresh inputs per trial.
    pub assignment: Option<InputAssignment>,
}

impl BatchSpec {
    pub fn new(instance: CcpInstance, kind: ProtocolKind, trials: u64, seed: u64) -> Self {
        Self {
            instance,
            kind,
            trials,
            seed,
            efficiency: None,
            strategy: ClassicalStrategy::default(),
            assignment: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatchResult {
    pub trials: u64,
    pub successes: u64,
    pub detector_failures: u64,
}

impl BatchResult {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Binomial standard error of [`success_rate`](Self::success_rate).
    pub fn standard_error(&self) -> f64 {
        let p = self.success_rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

fn run_trial(spec: &BatchSpec, index: u64) -> (bool, bool) {
    let mut rng = trial_rng(spec.seed, index);
    let sampled;
    let assignment = match &spec.assignment {
        Some(a) => a,
        None => {
            sampled = sample_assignment(&spec.instance, &mut rng);
            &sampled
        }
    };
    let t = simulate_run(
        spec.kind,
        assignment,
        &spec.strategy,
        &mut rng,
        spec.efficiency,
    );
    (t.correct, t.detector_failed)
}

/// Runs a batch on `workers` threads (`None`: rayon's global pool).
pub fn run_batch(spec: &BatchSpec, workers: Option<usize>) -> BatchResult {
    let go = || {
        (0..spec.trials)
            .into_par_iter()
            .map(|i| {
                let (ok, failed) = run_trial(spec, i);
                (ok as u64, failed as u64)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    };
    let (successes, detector_failures) = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(go),
        None => go(),
    };
    BatchResult {
        trials: spec.trials,
        successes,
        detector_failures,
    }
}
