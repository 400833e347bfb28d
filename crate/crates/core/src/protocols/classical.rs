// SPDX-License-Identifier: Apache-2.0

//! Block strategy: the sender announces which of the `d` blocks
//! `G_k = {Nk, ..., N(k+1)-1}` its input falls in and the receiver picks the
//! maximum-a-posteriori label given its own input.

use super::step::StepErrorDistribution;
use crate::model::{CcpInstance, InputAssignment};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassicalStrategy {
    /// Rotation of the blocks; `G_k` starts at `Nk + offset`.
    pub partition_offset: u64,
}

impl ClassicalStrategy {
    pub fn with_offset(partition_offset: u64) -> Self {
        Self { partition_offset }
    }

    /// `f(x) = k` iff `x ∈ G_k`.
    pub fn encode(&self, x: i64, instance: &CcpInstance) -> usize {
        let md = instance.modulus() as i64;
        let shifted = (x - self.partition_offset as i64).rem_euclid(md) as u64;
        (shifted / instance.n()) as usize
    }

    /// MAP estimate of `l'` from the message `k` and own input `y`.
    ///
    /// With uniform priors the posterior of label `l` is proportional to the
    /// number of drifts `b` for which `y + lN + b` encodes to `k`. Ties go to
    /// the label circularly closest to `k - f(y)`, then to the smaller label.
    pub fn decode(&self, message: usize, y: i64, instance: &CcpInstance) -> usize {
        let d = instance.d();
        let n = instance.n() as i64;
        let mu = instance.mu() as i64;
        let reference = (message + d - self.encode(y, instance)) % d;
        let mut best = (0usize, usize::MAX, usize::MAX);
        for l in 0..d {
            let score = (-mu..=mu)
                .filter(|b| self.encode(y + l as i64 * n + b, instance) == message)
                .count();
            let off = (l + d - reference) % d;
            let dist = off.min(d - off);
            let better = score > best.0
                || (score == best.0 && (dist < best.1 || (dist == best.1 && l < best.2)));
            if better {
                best = (score, dist, l);
            }
        }
        best.2
    }
}

/// Exact deviation law of one hop for a fixed receiver input `y`, averaging
/// over every promise-consistent sender input.
pub fn classical_step_error_distribution(
    y: u64,
    instance: &CcpInstance,
    strategy: &ClassicalStrategy,
) -> StepErrorDistribution {
    let d = instance.d();
    let n = instance.n() as i64;
    let mu = instance.mu() as i64;
    let y = y as i64;
    let weight = 1.0 / (d as f64 * (2 * mu + 1) as f64);
    let mut probs = vec![0.0; d];
    for a in 0..d {
        for b in -mu..=mu {
            let x = y + a as i64 * n + b;
            let k = strategy.encode(x, instance);
            let decoded = strategy.decode(k, y, instance);
            probs[(decoded + d - a) % d] += weight;
        }
    }
    StepErrorDistribution::new(probs).expect("finite mixture of point masses")
}

/// Per-hop law averaged over every receiver input in `Z_{dN}`.
pub fn classical_average_step(
    instance: &CcpInstance,
    strategy: &ClassicalStrategy,
) -> StepErrorDistribution {
    let steps: Vec<_> = (0..instance.modulus())
        .map(|y| classical_step_error_distribution(y, instance, strategy))
        .collect();
    StepErrorDistribution::mixture(&steps).expect("modulus is positive")
}

/// Success of the chained block strategy averaged over the distributor's law.
///
/// Includes cancelling errors, unlike the first-order `(M-1)`-fold estimate.
pub fn classical_average_success(instance: &CcpInstance, strategy: &ClassicalStrategy) -> f64 {
    classical_average_step(instance, strategy)
        .power(instance.links())
        .success()
}

/// Success for the receivers' inputs of `assignment`, averaging over every
/// sender input consistent with them.
pub fn classical_success_given_receivers(
    assignment: &InputAssignment,
    strategy: &ClassicalStrategy,
) -> f64 {
    let instance = assignment.instance();
    let steps: Vec<_> = assignment
        .ys()
        .iter()
        .map(|&y| classical_step_error_distribution(y, instance, strategy))
        .collect();
    StepErrorDistribution::chain_success(instance.d(), &steps)
}

/// Runs the chained block strategy on fixed inputs. Returns the message sent
/// on each hop and the final answer.
///
/// Each intermediate party adds `N` times its decoded running label to its
/// own input before encoding, so the running label accumulates `Σ a_i`.
pub fn run_classical(
    assignment: &InputAssignment,
    strategy: &ClassicalStrategy,
) -> (Vec<usize>, usize) {
    let instance = assignment.instance();
    let n = instance.n() as i64;
    let mut running = 0usize;
    let mut messages = Vec::with_capacity(instance.links());
    for (&x, &y) in assignment.xs().iter().zip(assignment.ys()) {
        let k = strategy.encode(x as i64 + running as i64 * n, instance);
        messages.push(k);
        running = strategy.decode(k, y as i64, instance);
    }
    (messages, running)
}
