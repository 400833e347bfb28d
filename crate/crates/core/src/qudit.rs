// SPDX-License-Identifier: Apache-2.0

//! Pure qudit states, diagonal phase unitaries and Fourier-basis statistics.
//!
//! Conventions:
//!
//! * `U(z)` multiplies amplitude `k` by `exp(2πi·z·k / (dN))`, i.e. by
//!   `ω^{zk/N}` with `ω = exp(2πi/d)`.
//! * The Fourier basis is `|e_l⟩ = d^{-1/2} Σ_k ω^{kl} |k⟩`; overlaps
//!   `⟨e_l|ψ⟩` conjugate the basis vector.
//! * Bipartite states are dense vectors of length `d²` indexed by
//!   `d·k_left + k_right`.
//!
//! Every phase is reduced with exact integer arithmetic before the complex
//! exponential is taken, so negative arguments and large inputs do not lose
//! precision.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{CcpError, Result};

/// Tolerance on state norms and distribution sums.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Probabilities further than this outside `[0, 1]` are a bug, not rounding.
const CLAMP_TOLERANCE: f64 = 1e-12;

/// Which tensor factor of a bipartite state an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `exp(2πi · num / den)` with `num` reduced modulo `den` first.
fn root_of_unity(num: i128, den: i128) -> Complex64 {
    let r = num.rem_euclid(den);
    Complex64::from_polar(1.0, TAU * r as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: Vec<Complex64>,
    bipartite: bool,
}

impl PureState {
    /// Builds a state from raw amplitudes; the squared norm must be 1.
    pub fn from_amplitudes(amps: Vec<Complex64>, bipartite: bool) -> Result<Self> {
        let state = Self::unchecked(amps, bipartite)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(CcpError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Builds a state from amplitudes of arbitrary non-zero norm.
    pub fn normalized(mut amps: Vec<Complex64>, bipartite: bool) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(CcpError::NotNormalized(norm * norm));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::unchecked(amps, bipartite)
    }

    fn unchecked(amps: Vec<Complex64>, bipartite: bool) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 {
            return Err(CcpError::InvalidDimension(dim));
        }
        if bipartite {
            let local = integer_sqrt(dim);
            if local * local != dim || local < 2 {
                return Err(CcpError::DimensionMismatch {
                    expected: local.max(2) * local.max(2),
                    actual: dim,
                });
            }
        }
        Ok(Self { amps, bipartite })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Dimension of one tensor factor (`d`), for single and bipartite states alike.
    pub fn local_dim(&self) -> usize {
        if self.bipartite {
            integer_sqrt(self.amps.len())
        } else {
            self.amps.len()
        }
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartite
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `U(z)` to a single qudit of dimension `d` with period `n`.
    pub fn apply_phase(&self, z: i64, n: u64, d: usize) -> Result<Self> {
        if self.bipartite {
            return Err(CcpError::NotSingle);
        }
        if self.dim() != d {
            return Err(CcpError::DimensionMismatch {
                expected: d,
                actual: self.dim(),
            });
        }
        let den = d as i128 * n as i128;
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(k, a)| a * root_of_unity(z as i128 * k as i128, den))
            .collect();
        Ok(Self {
            amps,
            bipartite: false,
        })
    }

    /// Applies `U(z)` to one factor of a bipartite state.
    pub fn apply_phase_local(&self, z: i64, side: Side, n: u64, d: usize) -> Result<Self> {
        if !self.bipartite {
            return Err(CcpError::NotBipartite);
        }
        if self.local_dim() != d {
            return Err(CcpError::DimensionMismatch {
                expected: d * d,
                actual: self.dim(),
            });
        }
        let den = d as i128 * n as i128;
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let k = match side {
                    Side::Left => idx / d,
                    Side::Right => idx % d,
                };
                a * root_of_unity(z as i128 * k as i128, den)
            })
            .collect();
        Ok(Self {
            amps,
            bipartite: true,
        })
    }

    /// Outcome statistics of a Fourier-basis measurement (of both factors,
    /// for a bipartite state).
    pub fn fourier_distribution(&self) -> OutcomeDistribution {
        let d = self.local_dim();
        let d_i = d as i128;
        if !self.bipartite {
            let scale = 1.0 / d as f64;
            let probs = (0..d)
                .map(|l| {
                    let overlap: Complex64 = self
                        .amps
                        .iter()
                        .enumerate()
                        .map(|(k, a)| a * root_of_unity(-((k * l) as i128), d_i))
                        .sum();
                    overlap.norm_sqr() * scale
                })
                .collect();
            OutcomeDistribution::from_raw(Outcomes::Single(d), probs)
        } else {
            let scale = 1.0 / (d * d) as f64;
            let mut probs = Vec::with_capacity(d * d);
            for l1 in 0..d {
                for l2 in 0..d {
                    let overlap: Complex64 = self
                        .amps
                        .iter()
                        .enumerate()
                        .map(|(idx, a)| {
                            let (k1, k2) = (idx / d, idx % d);
                            a * root_of_unity(-((k1 * l1 + k2 * l2) as i128), d_i)
                        })
                        .sum();
                    probs.push(overlap.norm_sqr() * scale);
                }
            }
            OutcomeDistribution::from_raw(Outcomes::Joint(d), probs)
        }
    }

    /// Non-demolition Fourier measurement: samples `l` and returns `|e_l⟩`.
    pub fn qnd_collapse<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, Self)> {
        if self.bipartite {
            return Err(CcpError::NotSingle);
        }
        let d = self.dim();
        let l = self.fourier_distribution().sample(rng);
        Ok((l, fourier_basis_state(d, l)?))
    }
}

/// `d^{-1/2} Σ_k |k⟩`, the Fourier vector `|e_0⟩`.
pub fn uniform_state(d: usize) -> Result<PureState> {
    fourier_basis_state(d, 0)
}

/// `|e_l⟩ = d^{-1/2} Σ_k ω^{kl} |k⟩`.
pub fn fourier_basis_state(d: usize, l: usize) -> Result<PureState> {
    if d < 2 {
        return Err(CcpError::InvalidDimension(d));
    }
    let amp = 1.0 / (d as f64).sqrt();
    let amps = (0..d)
        .map(|k| root_of_unity((k * l) as i128, d as i128) * amp)
        .collect();
    Ok(PureState {
        amps,
        bipartite: false,
    })
}

/// The maximally entangled pair `d^{-1/2} Σ_k |kk⟩`.
pub fn entangled_state(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(CcpError::InvalidDimension(d));
    }
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for k in 0..d {
        amps[d * k + k] = amp;
    }
    Ok(PureState {
        amps,
        bipartite: true,
    })
}

fn integer_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Label set of an [`OutcomeDistribution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcomes {
    /// `Z_d`.
    Single(usize),
    /// `Z_d × Z_d`, flattened as `d·l1 + l2`.
    Joint(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    outcomes: Outcomes,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Validates sum and range of `probs` and clamps rounding excursions.
    pub fn new(outcomes: Outcomes, probs: Vec<f64>) -> Result<Self> {
        let expected = match outcomes {
            Outcomes::Single(d) => d,
            Outcomes::Joint(d) => d * d,
        };
        if probs.len() != expected {
            return Err(CcpError::DimensionMismatch {
                expected,
                actual: probs.len(),
            });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(CcpError::BadDistribution(total));
        }
        if let Some(&p) = probs
            .iter()
            .find(|&&p| !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&p))
        {
            return Err(CcpError::InvalidProbability(p));
        }
        Ok(Self::from_raw(outcomes, probs))
    }

    fn from_raw(outcomes: Outcomes, mut probs: Vec<f64>) -> Self {
        for p in &mut probs {
            debug_assert!(
                (-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(p),
                "probability {p} beyond rounding tolerance"
            );
            *p = p.clamp(0.0, 1.0);
        }
        Self { outcomes, probs }
    }

    pub fn outcomes(&self) -> Outcomes {
        self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, l: usize) -> f64 {
        self.probs[l]
    }

    /// `P(l1, l2)` of a joint distribution.
    pub fn joint_prob(&self, l1: usize, l2: usize) -> f64 {
        match self.outcomes {
            Outcomes::Joint(d) => self.probs[d * l1 + l2],
            Outcomes::Single(_) => panic!("joint_prob on a single-qudit distribution"),
        }
    }

    /// Inverse-CDF draw of a flat outcome index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = i;
                if u < acc {
                    return i;
                }
            }
        }
        last
    }
}
