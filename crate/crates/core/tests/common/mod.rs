// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference implementations shared by the integration tests.
//!
//! Everything here works on explicit state vectors or explicit enumerations
//! and shares no evaluation code with the library.

#![allow(dead_code)]

use std::f64::consts::TAU;

use ccp_core::model::{decompose_link, CcpInstance, InputAssignment};
use ccp_core::protocols::{run_classical, ClassicalStrategy};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Multiplies the amplitude of `|k⟩` by `exp(2πi·z·k/(dN))`, using floating
/// point angles throughout.
fn phase(state: &mut [Complex64], z: i64, n: u64, d: usize) {
    for (k, a) in state.iter_mut().enumerate() {
        let angle = TAU * z as f64 * k as f64 / (d as f64 * n as f64);
        *a *= Complex64::from_polar(1.0, angle);
    }
}

/// `|⟨e_l|ψ⟩|²` for every `l`.
fn fourier_probs(state: &[Complex64]) -> Vec<f64> {
    let d = state.len();
    (0..d)
        .map(|l| {
            let amp: Complex64 = state
                .iter()
                .enumerate()
                .map(|(k, a)| a * Complex64::from_polar(1.0, -TAU * (k * l) as f64 / d as f64))
                .sum();
            amp.norm_sqr() / d as f64
        })
        .collect()
}

fn uniform(d: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / (d as f64).sqrt(), 0.0); d]
}

fn fourier_vector(d: usize, l: usize) -> Vec<Complex64> {
    (0..d)
        .map(|k| Complex64::from_polar(1.0 / (d as f64).sqrt(), TAU * (k * l) as f64 / d as f64))
        .collect()
}

/// Single qudit, every party applies its phase, the last party measures.
pub fn oracle_p1(a: &InputAssignment) -> f64 {
    let inst = a.instance();
    let (n, d) = (inst.n(), inst.d());
    let mut psi = uniform(d);
    let (xs, ys) = (a.xs(), a.ys());
    phase(&mut psi, xs[0] as i64, n, d);
    for i in 0..inst.links() {
        phase(&mut psi, -(ys[i] as i64), n, d);
        if i + 1 < inst.links() {
            phase(&mut psi, xs[i + 1] as i64, n, d);
        }
    }
    fourier_probs(&psi)[a.ground_truth()]
}

/// Single qudit with a Fourier measurement at every receiver; every branch of
/// the measurement tree is followed.
pub fn oracle_p2(a: &InputAssignment) -> f64 {
    fn branch(a: &InputAssignment, hop: usize, mut psi: Vec<Complex64>) -> f64 {
        let inst = a.instance();
        let (n, d) = (inst.n(), inst.d());
        phase(&mut psi, a.xs()[hop] as i64, n, d);
        phase(&mut psi, -(a.ys()[hop] as i64), n, d);
        let probs = fourier_probs(&psi);
        if hop + 1 == inst.links() {
            return probs[a.ground_truth()];
        }
        probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(l, &p)| p * branch(a, hop + 1, fourier_vector(d, l)))
            .sum()
    }
    branch(a, 0, uniform(a.instance().d()))
}

/// Full tensor product of every entangled pair, a Fourier transform on every
/// qudit, and the probability that the summed outcomes equal the answer.
pub fn oracle_pe(a: &InputAssignment) -> f64 {
    let inst = a.instance();
    let (n, d, links) = (inst.n(), inst.d(), inst.links());
    let qudits = 2 * links;
    let dim = d.pow(qudits as u32);
    let digit = |idx: usize, q: usize| (idx / d.pow(q as u32)) % d;
    let norm = (d as f64).powf(-(links as f64) / 2.0);

    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    for (idx, amp) in psi.iter_mut().enumerate() {
        if (0..links).all(|i| digit(idx, 2 * i) == digit(idx, 2 * i + 1)) {
            let mut v = Complex64::new(norm, 0.0);
            for i in 0..links {
                let k = digit(idx, 2 * i) as f64;
                let z = a.xs()[i] as f64 - a.ys()[i] as f64;
                v *= Complex64::from_polar(1.0, TAU * z * k / (d as f64 * n as f64));
            }
            *amp = v;
        }
    }

    for q in 0..qudits {
        let stride = d.pow(q as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (idx, slot) in out.iter_mut().enumerate() {
            let l = digit(idx, q);
            let base = idx - l * stride;
            *slot = (0..d)
                .map(|k| {
                    psi[base + k * stride]
                        * Complex64::from_polar(1.0, -TAU * (k * l) as f64 / d as f64)
                })
                .sum::<Complex64>()
                / (d as f64).sqrt();
        }
        psi = out;
    }

    let target = a.ground_truth();
    psi.iter()
        .enumerate()
        .filter(|(idx, _)| (0..qudits).map(|q| digit(*idx, q)).sum::<usize>() % d == target)
        .map(|(_, amp)| amp.norm_sqr())
        .sum()
}

/// Every sender input that respects the promise for receiver input `y`.
fn senders(y: u64, inst: &CcpInstance) -> Vec<i64> {
    let md = inst.modulus() as i64;
    (0..md)
        .filter(|&x| {
            decompose_link(x, y as i64, inst)
                .map(|l| l.b.unsigned_abs() <= inst.mu())
                .unwrap_or(false)
        })
        .collect()
}

/// Classical success for fixed receivers, averaged over every consistent
/// choice of senders by running the strategy on each one.
pub fn oracle_classical_given_receivers(a: &InputAssignment, s: &ClassicalStrategy) -> f64 {
    let inst = a.instance();
    let choices: Vec<Vec<i64>> = a.ys().iter().map(|&y| senders(y, inst)).collect();
    let ys: Vec<i64> = a.ys().iter().map(|&y| y as i64).collect();
    let mut total = 0usize;
    let mut good = 0usize;
    let mut pick = vec![0usize; choices.len()];
    loop {
        let xs: Vec<i64> = pick.iter().zip(&choices).map(|(&p, c)| c[p]).collect();
        let full = InputAssignment::from_links(inst, &xs, &ys).expect("promise holds");
        let (_, answer) = run_classical(&full, s);
        total += 1;
        good += (answer == full.ground_truth()) as usize;
        if !advance(&mut pick, &choices.iter().map(Vec::len).collect::<Vec<_>>()) {
            break;
        }
    }
    good as f64 / total as f64
}

/// Classical success averaged over every receiver input and every sender.
pub fn oracle_classical_average(inst: &CcpInstance, s: &ClassicalStrategy) -> f64 {
    let md = inst.modulus() as usize;
    let links = inst.links();
    let radix = vec![md; links];
    let mut pick = vec![0usize; links];
    let (mut sum, mut count) = (0.0, 0.0);
    loop {
        let ys: Vec<i64> = pick.iter().map(|&y| y as i64).collect();
        let xs: Vec<i64> = ys.clone();
        let a = InputAssignment::from_links(inst, &xs, &ys).expect("zero drift");
        sum += oracle_classical_given_receivers(&a, s);
        count += 1.0;
        if !advance(&mut pick, &radix) {
            break;
        }
    }
    sum / count
}

/// Two-party block strategy error over every promise-respecting `(x, y)`.
pub fn two_party_error_by_enumeration(inst: &CcpInstance) -> f64 {
    let s = ClassicalStrategy::default();
    let md = inst.modulus() as i64;
    let (mut wrong, mut total) = (0usize, 0usize);
    for y in 0..md {
        for x in 0..md {
            let Ok(link) = decompose_link(x, y, inst) else {
                continue;
            };
            if link.b.unsigned_abs() > inst.mu() {
                continue;
            }
            let a = InputAssignment::from_links(inst, &[x], &[y]).expect("promise holds");
            let (_, answer) = run_classical(&a, &s);
            total += 1;
            wrong += (answer != a.ground_truth()) as usize;
        }
    }
    wrong as f64 / total as f64
}

/// Mixed-radix counter; false once it wraps around.
fn advance(digits: &mut [usize], radix: &[usize]) -> bool {
    for (d, &r) in digits.iter_mut().zip(radix) {
        *d += 1;
        if *d < r {
            return true;
        }
        *d = 0;
    }
    false
}
