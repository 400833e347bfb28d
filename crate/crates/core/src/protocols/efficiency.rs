// SPDX-License-Identifier: Apache-2.0

//! Detector efficiency. A protocol needing `m` measurements completes with
//! probability `eta^m`; otherwise the last party can only guess.

use serde::Serialize;

use super::ProtocolKind;
use crate::error::{CcpError, Result};
use crate::model::CcpInstance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyModel {
    eta: f64,
}

impl EfficiencyModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(CcpError::InvalidEfficiency(eta));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Physical measurements one run needs: `2(M-1)` for `PE`, `M-1` for `P2`,
/// one for `P1` and none for the classical strategy.
pub fn measurement_count(kind: ProtocolKind, instance: &CcpInstance) -> usize {
    match kind {
        ProtocolKind::Classical => 0,
        ProtocolKind::P1 => 1,
        ProtocolKind::P2 => instance.links(),
        ProtocolKind::PE => 2 * instance.links(),
    }
}

/// `eta^m · p + (1 - eta^m)/d`.
pub fn efficiency_adjusted_success(
    p_ideal: f64,
    kind: ProtocolKind,
    instance: &CcpInstance,
    eta: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_ideal) {
        return Err(CcpError::InvalidProbability(p_ideal));
    }
    let eta = EfficiencyModel::new(eta)?.eta();
    let complete = eta.powi(measurement_count(kind, instance) as i32);
    Ok(complete * p_ideal + (1.0 - complete) / instance.d() as f64)
}

/// Efficiency below which `P1` (ideal success `p1`) beats `other` (ideal
/// success `p_other`) once detector losses are included.
///
/// Solves `(p1 - 1/d)·eta = (p_other - 1/d)·eta^m`. Returns `None` when the
/// two curves do not cross inside `(0, 1)`.
pub fn crossover_eta(
    p1: f64,
    other: ProtocolKind,
    p_other: f64,
    instance: &CcpInstance,
) -> Option<f64> {
    let guess = 1.0 / instance.d() as f64;
    let m = measurement_count(other, instance);
    if m <= 1 {
        return None;
    }
    let (gain1, gain_other) = (p1 - guess, p_other - guess);
    if gain1 <= 0.0 || gain_other <= 0.0 {
        return None;
    }
    let ratio = gain1 / gain_other;
    if ratio >= 1.0 {
        return None;
    }
    Some(ratio.powf(1.0 / (m - 1) as f64))
}
