// SPDX-License-Identifier: Apache-2.0

//! Protocol engines for the chained communication task.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{CcpInstance, InputAssignment};

mod batch;
mod classical;
mod efficiency;
mod quantum;
mod simulate;
mod step;

pub use batch::{run_batch, trial_rng, BatchResult, BatchSpec};
pub use classical::{
    classical_average_step, classical_average_success, classical_step_error_distribution,
    classical_success_given_receivers, run_classical, ClassicalStrategy,
};
pub use efficiency::{
    crossover_eta, efficiency_adjusted_success, measurement_count, EfficiencyModel,
};
pub use quantum::{
    average_success_p1, average_success_p2, average_success_pe, drift_kernel,
    entangled_link_error_distribution, exact_success_p1, exact_success_p2, exact_success_pe,
    quantum_step_error_distribution,
};
pub use simulate::{simulate_run, RunTranscript, StepRecord};
pub use step::StepErrorDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolKind {
    Classical,
    /// Entangled pairs between neighbours, measured on both sides.
    PE,
    /// One qudit, one final measurement.
    P1,
    /// One qudit, a non-demolition measurement at every intermediate party.
    P2,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::Classical,
        ProtocolKind::PE,
        ProtocolKind::P1,
        ProtocolKind::P2,
    ];

    pub const QUANTUM: [ProtocolKind; 3] = [ProtocolKind::PE, ProtocolKind::P1, ProtocolKind::P2];

    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::Classical => "classical",
            ProtocolKind::PE => "PE",
            ProtocolKind::P1 => "P1",
            ProtocolKind::P2 => "P2",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classical" | "c" => Ok(ProtocolKind::Classical),
            "pe" => Ok(ProtocolKind::PE),
            "p1" => Ok(ProtocolKind::P1),
            "p2" => Ok(ProtocolKind::P2),
            other => Err(format!("unknown protocol '{other}'")),
        }
    }
}

/// What an exact evaluator averages over.
#[derive(Debug, Clone, Copy)]
pub enum Evaluation<'a> {
    /// The distributor's uniform law over all promise-respecting inputs.
    Average(&'a CcpInstance),
    /// Fixed inputs. For the classical strategy, whose outcome on fixed
    /// inputs is deterministic, the senders' inputs are averaged out given
    /// the receivers' inputs.
    Assignment(&'a InputAssignment),
}

/// Exact success probability of `kind`, including cancelling errors.
pub fn exact_success(
    kind: ProtocolKind,
    eval: Evaluation<'_>,
    strategy: &ClassicalStrategy,
) -> f64 {
    match (kind, eval) {
        (ProtocolKind::Classical, Evaluation::Average(i)) => classical_average_success(i, strategy),
        (ProtocolKind::Classical, Evaluation::Assignment(a)) => {
            classical_success_given_receivers(a, strategy)
        }
        (ProtocolKind::P1, Evaluation::Average(i)) => average_success_p1(i),
        (ProtocolKind::P1, Evaluation::Assignment(a)) => exact_success_p1(a),
        (ProtocolKind::P2, Evaluation::Average(i)) => average_success_p2(i),
        (ProtocolKind::P2, Evaluation::Assignment(a)) => exact_success_p2(a),
        (ProtocolKind::PE, Evaluation::Average(i)) => average_success_pe(i),
        (ProtocolKind::PE, Evaluation::Assignment(a)) => exact_success_pe(a),
    }
}

/// Exhaustive enumeration limit on `(2mu+1)^(M-1)` drift vectors.
pub const WORST_CASE_ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCase {
    pub value: f64,
    /// False when the extremal all-`mu` drift vector stood in for enumeration.
    pub exhaustive: bool,
}

/// Minimum exact success of a quantum protocol over every drift vector.
///
/// Only drifts matter, so labels are left at zero. Beyond
/// [`WORST_CASE_ENUMERATION_LIMIT`] vectors the all-`mu` vector is used; that
/// is exact for `d = 2` and a heuristic otherwise.
pub fn worst_case_success(kind: ProtocolKind, instance: &CcpInstance) -> Option<WorstCase> {
    let mu = instance.mu() as i64;
    let links = instance.links();
    let n = instance.n();
    let d = instance.d();
    match kind {
        ProtocolKind::Classical => None,
        ProtocolKind::P1 => {
            let span = mu * links as i64;
            let value = (-span..=span)
                .map(|b| drift_kernel(b, n, d))
                .fold(f64::INFINITY, f64::min);
            Some(WorstCase {
                value,
                exhaustive: true,
            })
        }
        ProtocolKind::P2 | ProtocolKind::PE => {
            let law = |b: i64| match kind {
                ProtocolKind::P2 => quantum_step_error_distribution(b, instance),
                _ => entangled_link_error_distribution(b, instance),
            };
            let vectors = (2 * mu as u128 + 1).checked_pow(links as u32);
            let exhaustive = vectors.is_some_and(|v| v <= WORST_CASE_ENUMERATION_LIMIT);
            if !exhaustive {
                return Some(WorstCase {
                    value: law(mu).power(links).success(),
                    exhaustive: false,
                });
            }
            // Deviations commute, so multisets of drifts suffice.
            let laws: Vec<_> = (-mu..=mu).map(law).collect();
            let mut worst = f64::INFINITY;
            let mut stack = vec![(0usize, 0usize, StepErrorDistribution::exact(d))];
            while let Some((start, depth, acc)) = stack.pop() {
                if depth == links {
                    worst = worst.min(acc.success());
                    continue;
                }
                for (i, l) in laws.iter().enumerate().skip(start) {
                    stack.push((i, depth + 1, acc.convolve(l)));
                }
            }
            Some(WorstCase {
                value: worst,
                exhaustive: true,
            })
        }
    }
}
