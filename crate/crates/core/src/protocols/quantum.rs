// SPDX-License-Identifier: Apache-2.0

//! Exact success evaluators for the three quantum protocols.
//!
//! * `P1` sends one qudit down the whole line; only the last party measures,
//!   so the outcome depends on the total drift `B = Σ b_i`.
//! * `P2` also sends one qudit, but every intermediate receiver performs a
//!   non-demolition Fourier measurement. After a collapse to `|e_l⟩` the next
//!   hop's deviation law no longer depends on `l`, so the hops chain as
//!   independent deviations.
//! * `PE` gives each neighbouring pair a maximally entangled qudit pair; the
//!   summed outcomes of each pair deviate independently.

use std::f64::consts::TAU;

use super::step::StepErrorDistribution;
use crate::model::{CcpInstance, InputAssignment};

/// Squared modulus of `(1/d) Σ_k exp(2πi·k·shift/(dN))`, evaluated term by
/// term as a cosine sum and a sine sum.
///
/// This is the probability of reading the Fourier label `A + ε` when the
/// accumulated phase corresponds to `AN + drift`, with `shift = drift - εN`.
pub fn drift_kernel(shift: i64, n: u64, d: usize) -> f64 {
    let den = d as i128 * n as i128;
    let (mut c, mut s) = (0.0, 0.0);
    for k in 0..d as i128 {
        let r = (k * shift as i128).rem_euclid(den);
        let angle = TAU * r as f64 / den as f64;
        c += angle.cos();
        s += angle.sin();
    }
    ((c * c + s * s) / (d * d) as f64).min(1.0)
}

/// Outcome-deviation law of one `P2` hop (or one `P1` link on its own) with
/// drift `b`.
pub fn quantum_step_error_distribution(b: i64, instance: &CcpInstance) -> StepErrorDistribution {
    let n = instance.n();
    let d = instance.d();
    let probs = (0..d)
        .map(|eps| drift_kernel(b - eps as i64 * n as i64, n, d))
        .collect();
    StepErrorDistribution::new(probs).expect("Fourier outcome law sums to one")
}

/// Law of `l1 + l2 - a (mod d)` for one entangled link, obtained by summing
/// the joint two-outcome probabilities
/// `(1/d³)|Σ_k exp(2πik((x-y)/N - l1 - l2)/d)|²` over every pair `(l1, l2)`.
pub fn entangled_link_error_distribution(b: i64, instance: &CcpInstance) -> StepErrorDistribution {
    let n = instance.n();
    let d = instance.d();
    let den = d as i128 * n as i128;
    let mut probs = vec![0.0; d];
    for l1 in 0..d {
        for l2 in 0..d {
            let shift = b as i128 - ((l1 + l2) as i128) * n as i128;
            let (mut c, mut s) = (0.0, 0.0);
            for k in 0..d as i128 {
                let angle = TAU * (k * shift).rem_euclid(den) as f64 / den as f64;
                c += angle.cos();
                s += angle.sin();
            }
            probs[(l1 + l2) % d] += (c * c + s * s) / (d * d * d) as f64;
        }
    }
    StepErrorDistribution::new(probs).expect("joint outcome law sums to one")
}

pub fn exact_success_p1(assignment: &InputAssignment) -> f64 {
    let instance = assignment.instance();
    drift_kernel(assignment.total_drift(), instance.n(), instance.d())
}

pub fn exact_success_p2(assignment: &InputAssignment) -> f64 {
    let instance = assignment.instance();
    let steps: Vec<_> = assignment
        .links()
        .iter()
        .map(|l| quantum_step_error_distribution(l.b, instance))
        .collect();
    StepErrorDistribution::chain_success(instance.d(), &steps)
}

pub fn exact_success_pe(assignment: &InputAssignment) -> f64 {
    let instance = assignment.instance();
    let links: Vec<_> = assignment
        .links()
        .iter()
        .map(|l| entangled_link_error_distribution(l.b, instance))
        .collect();
    StepErrorDistribution::chain_success(instance.d(), &links)
}

/// Number of ways to reach each total drift from `links` uniform drifts,
/// indexed by `B + mu·links`.
fn drift_sum_counts(mu: i64, links: usize) -> Vec<f64> {
    let width = (2 * mu + 1) as usize;
    let mut counts = vec![1.0];
    for _ in 0..links {
        let mut next = vec![0.0; counts.len() + width - 1];
        for (i, c) in counts.iter().enumerate() {
            for j in 0..width {
                next[i + j] += c;
            }
        }
        counts = next;
    }
    counts
}

/// `P1` success averaged over uniform drifts.
pub fn average_success_p1(instance: &CcpInstance) -> f64 {
    let mu = instance.mu() as i64;
    let links = instance.links();
    let counts = drift_sum_counts(mu, links);
    let total: f64 = counts.iter().sum();
    let offset = mu * links as i64;
    counts
        .iter()
        .enumerate()
        .map(|(i, c)| c * drift_kernel(i as i64 - offset, instance.n(), instance.d()))
        .sum::<f64>()
        / total
}

fn average_step<F>(instance: &CcpInstance, law: F) -> StepErrorDistribution
where
    F: Fn(i64, &CcpInstance) -> StepErrorDistribution,
{
    let mu = instance.mu() as i64;
    let steps: Vec<_> = (-mu..=mu).map(|b| law(b, instance)).collect();
    StepErrorDistribution::mixture(&steps).expect("at least one drift")
}

/// `P2` success averaged over uniform drifts.
pub fn average_success_p2(instance: &CcpInstance) -> f64 {
    average_step(instance, quantum_step_error_distribution)
        .power(instance.links())
        .success()
}

/// `PE` success averaged over uniform drifts.
pub fn average_success_pe(instance: &CcpInstance) -> f64 {
    average_step(instance, entangled_link_error_distribution)
        .power(instance.links())
        .success()
}
