// SPDX-License-Identifier: Apache-2.0

//! Closed-form estimates and bounds, plus the Fejér success kernel.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{CcpError, Result};
use crate::model::CcpInstance;
use crate::protocols::{
    classical_average_success, worst_case_success, ClassicalStrategy, ProtocolKind,
};

/// A formula value after clamping into its meaningful range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl BoundValue {
    fn clamp(raw: f64, lo: f64, hi: f64) -> Self {
        let value = raw.clamp(lo, hi);
        Self {
            value,
            raw,
            clamped: value != raw,
        }
    }
}

/// First-order error of the chained classical strategy,
/// `mu(mu+1)(M-1) / (N(2mu+1))`, ignoring cancelling errors.
pub fn classical_error_estimate(instance: &CcpInstance) -> BoundValue {
    let mu = instance.mu() as f64;
    let raw = mu * (mu + 1.0) * instance.links() as f64 / (instance.n() as f64 * (2.0 * mu + 1.0));
    BoundValue::clamp(raw, 0.0, 1.0)
}

/// `4π² mu² (d-1)² / (d² N²)`, the per-link deficit of both bounds.
fn link_deficit(instance: &CcpInstance) -> f64 {
    let mu = instance.mu() as f64;
    let d = instance.d() as f64;
    let n = instance.n() as f64;
    4.0 * PI * PI * mu * mu * (d - 1.0) * (d - 1.0) / (d * d * n * n)
}

/// Lower bound for the entangled protocol (and `P2`): deficit linear in `M-1`.
pub fn pe_success_bound(instance: &CcpInstance) -> BoundValue {
    let raw = 1.0 - link_deficit(instance) * instance.links() as f64;
    BoundValue::clamp(raw, 1.0 / instance.d() as f64, 1.0)
}

/// Lower bound for `P1`: deficit quadratic in `M-1`.
pub fn p1_success_bound(instance: &CcpInstance) -> BoundValue {
    let links = instance.links() as f64;
    let raw = 1.0 - link_deficit(instance) * links * links;
    BoundValue::clamp(raw, 1.0 / instance.d() as f64, 1.0)
}

/// `(1/d²)·[sin(πB/N) / sin(πB/(dN))]²`: probability that a single Fourier
/// measurement returns the correct label under total drift `drift`.
///
/// The removable singularity at `drift ≡ 0 (mod dN)` is detected on the
/// integer drift, before any division.
pub fn fejer_success(drift: i64, n: u64, d: usize) -> f64 {
    let period = d as i128 * n as i128;
    let r = (drift as i128).rem_euclid(period);
    if r == 0 {
        return 1.0;
    }
    let num = (PI * r as f64 / n as f64).sin();
    let den = (PI * r as f64 / period as f64).sin();
    let ratio = num / den;
    (ratio * ratio / (d * d) as f64).min(1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub instance: CcpInstance,
    pub classical_error_est: f64,
    pub pe_bound: f64,
    pub p1_bound: f64,
    pub exact_worst_p1: f64,
    pub exact_worst_p2: f64,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn compute(instance: &CcpInstance) -> Self {
        let est = classical_error_estimate(instance);
        let pe = pe_success_bound(instance);
        let p1 = p1_success_bound(instance);
        let w1 = worst_case_success(ProtocolKind::P1, instance).expect("quantum");
        let w2 = worst_case_success(ProtocolKind::P2, instance).expect("quantum");
        let mut notes: Vec<String> = instance.notes().iter().map(|n| n.to_string()).collect();
        for (name, b) in [
            ("classical estimate", est),
            ("PE bound", pe),
            ("P1 bound", p1),
        ] {
            if b.clamped {
                notes.push(format!("{name} clamped from {:.6}", b.raw));
            }
        }
        if !w2.exhaustive {
            notes.push("P2 worst case uses the all-mu drift vector".into());
        }
        Self {
            instance: *instance,
            classical_error_est: est.value,
            pe_bound: pe.value,
            p1_bound: p1.value,
            exact_worst_p1: w1.value,
            exact_worst_p2: w2.value,
            notes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingSlopes {
    pub classical_slope: f64,
    pub quantum_slope: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Error of the exact classical average and the exact worst-case `P1` at one
/// instance.
pub fn scaling_errors(instance: &CcpInstance) -> (f64, f64) {
    let classical = 1.0 - classical_average_success(instance, &ClassicalStrategy::default());
    let quantum = 1.0
        - worst_case_success(ProtocolKind::P1, instance)
            .expect("quantum")
            .value;
    (classical, quantum)
}

/// Fits log-log slopes of the classical and `P1` errors over a family of
/// instances that differ only in `N`.
pub fn scaling_slopes(family: &[CcpInstance]) -> Result<ScalingSlopes> {
    if family.len() < 3 {
        return Err(CcpError::DegenerateGrid(format!(
            "{} points, need at least 3",
            family.len()
        )));
    }
    let first = family[0];
    if family
        .iter()
        .any(|i| i.m() != first.m() || i.d() != first.d() || i.mu() != first.mu())
    {
        return Err(CcpError::DegenerateGrid("M, d and mu must be fixed".into()));
    }
    let mut ns: Vec<u64> = family.iter().map(|i| i.n()).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() != family.len() {
        return Err(CcpError::DegenerateGrid("repeated N values".into()));
    }
    let xs: Vec<f64> = family.iter().map(|i| i.n() as f64).collect();
    let (mut ce, mut qe) = (Vec::new(), Vec::new());
    for i in family {
        let (c, q) = scaling_errors(i);
        if c <= 0.0 || q <= 0.0 {
            return Err(CcpError::DegenerateGrid(format!(
                "zero error at N={} (classical {c}, quantum {q})",
                i.n()
            )));
        }
        ce.push(c);
        qe.push(q);
    }
    Ok(ScalingSlopes {
        classical_slope: log_log_slope(&xs, &ce),
        quantum_slope: log_log_slope(&xs, &qe),
    })
}
