// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = CcpError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CcpError {
    #[error("invalid dimension {0}: need at least 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operation needs a bipartite state")]
    NotBipartite,

    #[error("operation needs a single-qudit state")]
    NotSingle,

    #[error("state is not normalised: squared norm {0}")]
    NotNormalized(f64),

    #[error("probabilities sum to {0}, expected 1")]
    BadDistribution(f64),

    #[error("invalid instance: {}", format_violations(.0))]
    InvalidInstance(Vec<Violation>),

    #[error(
        "promise violated: x={x}, y={y} (x-y mod {modulus} = {diff}); nearest set is S_{nearest} at distance {distance} > mu={mu}"
    )]
    PromiseViolation {
        x: i64,
        y: i64,
        modulus: u64,
        diff: u64,
        nearest: usize,
        distance: u64,
        mu: u64,
    },

    #[error("assignment has {actual} links, instance with M={m} needs {expected}")]
    WrongPartyCount {
        m: usize,
        expected: usize,
        actual: usize,
    },

    #[error("detector efficiency {0} outside [0, 1]")]
    InvalidEfficiency(f64),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("unsupported dimension d={0}: only d=2 has an optical model")]
    UnsupportedDimension(usize),

    #[error("protocol {0} is not supported by this operation")]
    UnsupportedProtocol(crate::protocols::ProtocolKind),

    #[error("degenerate scaling grid: {0}")]
    DegenerateGrid(String),

    #[error("dataset error: {reason} (expected sha256 {expected})")]
    Dataset { reason: String, expected: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
