// SPDX-License-Identifier: Apache-2.0

use crate::error::{CcpError, Result};
use crate::qudit::NORM_TOLERANCE;

/// Law of a single link's deviation `ε = (decoded label - a) mod d`.
///
/// Deviations of independent links add modulo `d`, so chained protocols are
/// evaluated by cyclic convolution; the protocol succeeds when the summed
/// deviation is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StepErrorDistribution {
    probs: Vec<f64>,
}

impl StepErrorDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(CcpError::InvalidDimension(probs.len()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(CcpError::BadDistribution(total));
        }
        Ok(Self { probs })
    }

    /// All mass on `ε = 0`.
    pub fn exact(d: usize) -> Self {
        let mut probs = vec![0.0; d];
        probs[0] = 1.0;
        Self { probs }
    }

    /// Uniform mixture of `parts`, which must share a dimension.
    pub fn mixture<'a, I>(parts: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a StepErrorDistribution>,
    {
        let mut acc: Option<Vec<f64>> = None;
        let mut count = 0usize;
        for p in parts {
            let acc = acc.get_or_insert_with(|| vec![0.0; p.probs.len()]);
            for (a, q) in acc.iter_mut().zip(&p.probs) {
                *a += q;
            }
            count += 1;
        }
        acc.map(|mut v| {
            for p in &mut v {
                *p /= count as f64;
            }
            Self { probs: v }
        })
    }

    pub fn d(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, eps: usize) -> f64 {
        self.probs[eps % self.probs.len()]
    }

    /// Probability of zero deviation.
    pub fn success(&self) -> f64 {
        self.probs[0]
    }

    /// Law of the sum of two independent deviations.
    pub fn convolve(&self, other: &Self) -> Self {
        let d = self.d();
        assert_eq!(d, other.d(), "convolving laws over different alphabets");
        let mut out = vec![0.0; d];
        for (i, p) in self.probs.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            for (j, q) in other.probs.iter().enumerate() {
                out[(i + j) % d] += p * q;
            }
        }
        Self { probs: out }
    }

    /// Law of the sum of `k` independent copies.
    pub fn power(&self, mut k: usize) -> Self {
        let mut result = Self::exact(self.d());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.convolve(&base);
            }
            base = base.convolve(&base);
            k >>= 1;
        }
        result
    }

    /// Success of a chain of independent links.
    pub fn chain_success<'a, I>(d: usize, steps: I) -> f64
    where
        I: IntoIterator<Item = &'a StepErrorDistribution>,
    {
        steps
            .into_iter()
            .fold(Self::exact(d), |acc, s| acc.convolve(s))
            .success()
    }
}
