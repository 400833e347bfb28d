// SPDX-License-Identifier: Apache-2.0

//! Problem instances `(N, M, d, mu)`, party inputs and the promise.
//!
//! Inputs live in `Z_{dN}`. Party `R_1` holds `x_1`, parties `R_2..R_{M-1}`
//! hold a pair `(x_i, y_i)` and `R_M` holds `y_M`. Link `i` joins `x_i` to
//! `y_{i+1}`, and the promise says `x_i - y_{i+1} ≡ a_i N + b_i (mod dN)`
//! for some `a_i ∈ Z_d` and `|b_i| ≤ mu`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CcpError, Result};

/// A hard constraint an instance fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    AlphabetTooSmall { d: usize },
    TooFewParties { m: usize },
    ZeroPeriod,
    OverlappingPromiseSets { n: u64, mu: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AlphabetTooSmall { d } => write!(f, "d={d} must be at least 2"),
            Violation::TooFewParties { m } => write!(f, "M={m} must be at least 2"),
            Violation::ZeroPeriod => write!(f, "N must be positive"),
            Violation::OverlappingPromiseSets { n, mu } => write!(
                f,
                "2*mu+1 = {} exceeds N = {n}; promise sets overlap",
                2 * mu + 1
            ),
        }
    }
}

/// A non-fatal observation about the parameter regime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "note")]
pub enum RegimeNote {
    /// `N <= 10·mu·M`: the large-`N` approximations are strained.
    Strained { n: u64, mu: u64, m: usize },
    /// `mu(M-1) >= N - mu`: the summed drift can leave every promise set.
    DriftMayEscape { max_drift: u64, n: u64, mu: u64 },
    /// `mu = 0`: every difference is an exact multiple of `N`.
    DegeneratePromise,
}

impl fmt::Display for RegimeNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeNote::Strained { n, mu, m } => write!(
                f,
                "N={n} <= 10*mu*M = {}: asymptotic regime is strained",
                10 * mu * *m as u64
            ),
            RegimeNote::DriftMayEscape { max_drift, n, mu } => write!(
                f,
                "total drift up to {max_drift} >= N-mu = {}: the sum may leave every S_l",
                n - mu
            ),
            RegimeNote::DegeneratePromise => write!(f, "mu=0: promise pins every difference"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Validation {
    pub violations: Vec<Violation>,
    pub notes: Vec<RegimeNote>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `(N, M, d, mu)` without constructing an instance.
pub fn validate_instance(n: u64, m: usize, d: usize, mu: u64) -> Validation {
    let mut v = Validation::default();
    if d < 2 {
        v.violations.push(Violation::AlphabetTooSmall { d });
    }
    if m < 2 {
        v.violations.push(Violation::TooFewParties { m });
    }
    if n == 0 {
        v.violations.push(Violation::ZeroPeriod);
    } else if 2 * mu + 1 > n {
        v.violations
            .push(Violation::OverlappingPromiseSets { n, mu });
    }
    if !v.is_ok() {
        return v;
    }
    if mu == 0 {
        v.notes.push(RegimeNote::DegeneratePromise);
    } else if n <= 10 * mu * m as u64 {
        v.notes.push(RegimeNote::Strained { n, mu, m });
    }
    let max_drift = mu * (m as u64 - 1);
    if mu > 0 && max_drift >= n - mu {
        v.notes
            .push(RegimeNote::DriftMayEscape { max_drift, n, mu });
    }
    v
}

/// Problem parameters. `mu = 0` is accepted as a degenerate promise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct CcpInstance {
    n: u64,
    m: usize,
    d: usize,
    mu: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawInstance {
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "M")]
    m: usize,
    d: usize,
    mu: u64,
}

impl TryFrom<RawInstance> for CcpInstance {
    type Error = CcpError;

    fn try_from(r: RawInstance) -> Result<Self> {
        CcpInstance::new(r.n, r.m, r.d, r.mu)
    }
}

impl From<CcpInstance> for RawInstance {
    fn from(i: CcpInstance) -> Self {
        RawInstance {
            n: i.n,
            m: i.m,
            d: i.d,
            mu: i.mu,
        }
    }
}

impl CcpInstance {
    pub fn new(n: u64, m: usize, d: usize, mu: u64) -> Result<Self> {
        let v = validate_instance(n, m, d, mu);
        if !v.is_ok() {
            return Err(CcpError::InvalidInstance(v.violations));
        }
        Ok(Self { n, m, d, mu })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mu(&self) -> u64 {
        self.mu
    }

    /// Number of links, `M - 1`.
    pub fn links(&self) -> usize {
        self.m - 1
    }

    /// Size of the input alphabet, `dN`.
    pub fn modulus(&self) -> u64 {
        self.d as u64 * self.n
    }

    /// Same parameters with a different party count.
    pub fn with_parties(&self, m: usize) -> Result<Self> {
        Self::new(self.n, m, self.d, self.mu)
    }

    pub fn notes(&self) -> Vec<RegimeNote> {
        validate_instance(self.n, self.m, self.d, self.mu).notes
    }

    /// Whether `mu(M-1) >= N - mu`.
    pub fn drift_may_escape(&self) -> bool {
        self.mu > 0 && self.mu * (self.m as u64 - 1) >= self.n - self.mu
    }

    /// Elements of `S_l = {Nl - mu, ..., Nl + mu} mod dN`.
    pub fn promise_set(&self, l: usize) -> Vec<u64> {
        let md = self.modulus() as i64;
        let centre = (self.n * l as u64) as i64;
        (-(self.mu as i64)..=self.mu as i64)
            .map(|b| (centre + b).rem_euclid(md) as u64)
            .collect()
    }

    fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.modulus() as i64) as u64
    }
}

/// `x - y ≡ aN + b (mod dN)` with `a ∈ Z_d`, `|b| ≤ mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LinkDecomposition {
    pub a: usize,
    pub b: i64,
}

/// Splits a link difference into label and drift; inputs are reduced mod `dN`.
pub fn decompose_link(x: i64, y: i64, instance: &CcpInstance) -> Result<LinkDecomposition> {
    let n = instance.n;
    let mu = instance.mu;
    let diff = instance.reduce(x - y);
    let shifted = (diff + mu) % instance.modulus();
    let offset = shifted % n;
    if offset <= 2 * mu {
        return Ok(LinkDecomposition {
            a: (shifted / n) as usize,
            b: offset as i64 - mu as i64,
        });
    }
    let nearest = ((diff + n / 2) / n) as usize % instance.d;
    let centre = nearest as u64 * n;
    let up = (diff + instance.modulus() - centre) % instance.modulus();
    let distance = up.min(instance.modulus() - up);
    Err(CcpError::PromiseViolation {
        x,
        y,
        modulus: instance.modulus(),
        diff,
        nearest,
        distance,
        mu,
    })
}

/// A full set of party inputs together with its link decompositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputAssignment {
    instance: CcpInstance,
    /// `x_1, ..., x_{M-1}`.
    xs: Vec<u64>,
    /// `y_2, ..., y_M`.
    ys: Vec<u64>,
    links: Vec<LinkDecomposition>,
}

impl InputAssignment {
    /// Builds an assignment from party-ordered inputs: `x_1`, the middle
    /// pairs `(x_i, y_i)` for `i = 2..M-1`, and `y_M`.
    pub fn new(
        instance: &CcpInstance,
        x_first: i64,
        middle: &[(i64, i64)],
        y_last: i64,
    ) -> Result<Self> {
        let mut xs = vec![x_first];
        let mut ys = Vec::with_capacity(middle.len() + 1);
        for &(x, y) in middle {
            ys.push(y);
            xs.push(x);
        }
        ys.push(y_last);
        Self::from_links(instance, &xs, &ys)
    }

    /// Builds an assignment from link-ordered inputs: `xs[i]` and `ys[i]` are
    /// the two ends of link `i`.
    pub fn from_links(instance: &CcpInstance, xs: &[i64], ys: &[i64]) -> Result<Self> {
        let expected = instance.links();
        if xs.len() != expected || ys.len() != expected {
            return Err(CcpError::WrongPartyCount {
                m: instance.m,
                expected,
                actual: xs.len().min(ys.len()),
            });
        }
        let links = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| decompose_link(x, y, instance))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            instance: *instance,
            xs: xs.iter().map(|&x| instance.reduce(x)).collect(),
            ys: ys.iter().map(|&y| instance.reduce(y)).collect(),
            links,
        })
    }

    pub fn instance(&self) -> &CcpInstance {
        &self.instance
    }

    /// Sender inputs `x_1..x_{M-1}`, one per link.
    pub fn xs(&self) -> &[u64] {
        &self.xs
    }

    /// Receiver inputs `y_2..y_M`, one per link.
    pub fn ys(&self) -> &[u64] {
        &self.ys
    }

    pub fn links(&self) -> &[LinkDecomposition] {
        &self.links
    }

    pub fn x_first(&self) -> u64 {
        self.xs[0]
    }

    pub fn y_last(&self) -> u64 {
        self.ys[self.ys.len() - 1]
    }

    /// `(x_i, y_i)` for the middle parties `i = 2..M-1`.
    pub fn middle(&self) -> Vec<(u64, u64)> {
        self.xs[1..]
            .iter()
            .zip(&self.ys[..self.ys.len() - 1])
            .map(|(&x, &y)| (x, y))
            .collect()
    }

    /// `A = Σ a_i mod d`.
    pub fn total_label(&self) -> usize {
        self.links.iter().map(|l| l.a).sum::<usize>() % self.instance.d
    }

    /// `B = Σ b_i`.
    pub fn total_drift(&self) -> i64 {
        self.links.iter().map(|l| l.b).sum()
    }

    /// The label `l'` the last party must announce.
    pub fn ground_truth(&self) -> usize {
        self.total_label()
    }

    /// As [`ground_truth`](Self::ground_truth), flagging instances where the
    /// summed drift may leave every promise set.
    pub fn ground_truth_checked(&self) -> (usize, Option<RegimeNote>) {
        let note = self
            .instance
            .notes()
            .into_iter()
            .find(|n| matches!(n, RegimeNote::DriftMayEscape { .. }));
        (self.ground_truth(), note)
    }

    pub fn to_doc(&self) -> AssignmentDoc {
        AssignmentDoc {
            n: self.instance.n,
            m: self.instance.m,
            d: self.instance.d,
            mu: self.instance.mu,
            x1: self.x_first() as i64,
            pairs: self
                .middle()
                .into_iter()
                .map(|(x, y)| [x as i64, y as i64])
                .collect(),
            y_m: self.y_last() as i64,
        }
    }
}

/// JSON form of an instance with one assignment:
/// `{"N":60,"M":3,"d":2,"mu":1,"x1":70,"pairs":[[55,71]],"yM":56}`.
///
/// Each entry of `pairs` is `[x_i, y_i]` for a middle party.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentDoc {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub d: usize,
    pub mu: u64,
    pub x1: i64,
    pub pairs: Vec<[i64; 2]>,
    #[serde(rename = "yM")]
    pub y_m: i64,
}

impl AssignmentDoc {
    pub fn instance(&self) -> Result<CcpInstance> {
        CcpInstance::new(self.n, self.m, self.d, self.mu)
    }

    pub fn to_assignment(&self) -> Result<InputAssignment> {
        let instance = self.instance()?;
        let middle: Vec<(i64, i64)> = self.pairs.iter().map(|p| (p[0], p[1])).collect();
        InputAssignment::new(&instance, self.x1, &middle, self.y_m)
    }
}

/// Draws one assignment: per link, `x` uniform on `Z_{dN}` and `(a, b)`
/// uniform on `Z_d × [-mu, mu]`, independently; `y = x - aN - b`.
pub fn sample_assignment<R: Rng + ?Sized>(instance: &CcpInstance, rng: &mut R) -> InputAssignment {
    let md = instance.modulus() as i64;
    let mu = instance.mu as i64;
    let mut xs = Vec::with_capacity(instance.links());
    let mut ys = Vec::with_capacity(instance.links());
    let mut links = Vec::with_capacity(instance.links());
    for _ in 0..instance.links() {
        let x = rng.random_range(0..md);
        let a = rng.random_range(0..instance.d);
        let b = rng.random_range(-mu..=mu);
        let y = (x - a as i64 * instance.n as i64 - b).rem_euclid(md);
        xs.push(x as u64);
        ys.push(y as u64);
        links.push(LinkDecomposition { a, b });
    }
    InputAssignment {
        instance: *instance,
        xs,
        ys,
        links,
    }
}
