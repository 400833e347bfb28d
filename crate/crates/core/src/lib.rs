// SPDX-License-Identifier: Apache-2.0

//! Simulation of a family of multi-party communication complexity problems
//! parameterised by `(N, M, d, mu)`.
//!
//! A distributor hands `M` parties inputs in `Z_{dN}` such that every
//! consecutive difference `x_i - y_{i+1}` lies in one of the promise sets
//! `S_l = {Nl - mu, ..., Nl + mu} (mod dN)`. Each party may forward a single
//! `d`-level message to its neighbour and the last party has to name the
//! label `l'` of the set containing the summed difference.
//!
//! The crate provides:
//!
//! * [`qudit`]: pure-state qudit substrate (phase unitaries, Fourier-basis
//!   statistics, entangled pairs and non-demolition collapse).
//! * [`model`]: problem instances, inputs, link decompositions and the
//!   ground-truth answer.
//! * [`protocols`]: the classical block strategy and the three quantum
//!   protocols, with exact evaluators, stochastic runs, the detector
//!   efficiency model and a deterministic parallel batch driver.
//! * [`bounds`]: closed-form error estimates, lower bounds and the Fejér
//!   success kernel.
//! * [`experiment`]: the bundled three-party qubit dataset, its
//!   reproduction report and the polarisation-rotation picture for `d = 2`.

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod model;
pub mod protocols;
pub mod qudit;

pub use error::{CcpError, Result};
pub use model::{CcpInstance, InputAssignment, LinkDecomposition};
pub use protocols::ProtocolKind;
