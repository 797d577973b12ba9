// SPDX-License-Identifier: Apache-2.0

//! Bit-parallel simulation under error-free and ε-noisy gate models.
//!
//! Vector `v` of a run lives in bit `v % 64` of word `v / 64` of every
//! [`NetTrace`]. Primary inputs are i.i.d. uniform bits, one counter-based
//! stream per input; in noisy runs each gate output is XORed with an
//! independent Bernoulli(ε) mask from a per-gate stream, after the gate has
//! evaluated its (possibly already corrupted) inputs. Primary inputs are
//! never flipped.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::noisy_sw;
use crate::netlist::Circuit;
use crate::rng::{probability_threshold, Domain, Stream};

pub const DEFAULT_VECTORS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("epsilon must lie in [0, 0.5], got {0}")]
    Epsilon(f64),
    #[error("need at least 2 vectors, got {0}")]
    TooFewVectors(usize),
    #[error("lane count must be a positive multiple of 64, got {0}")]
    Lanes(usize),
    #[error("trace {index} has length {got}, expected {expected}")]
    LengthMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("no traces to measure")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of random input vectors T.
    pub vectors: usize,
    pub seed: u64,
    /// Per-gate output flip probability.
    pub epsilon: f64,
    /// Vectors evaluated per work batch. Has no effect on results.
    pub lanes: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            vectors: DEFAULT_VECTORS,
            seed: 1,
            epsilon: 0.0,
            lanes: 64,
        }
    }
}

impl SimConfig {
    pub fn new(vectors: usize, seed: u64) -> Self {
        SimConfig {
            vectors,
            seed,
            ..Default::default()
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_lanes(mut self, lanes: usize) -> Self {
        self.lanes = lanes;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        check_epsilon(self.epsilon)?;
        if self.vectors < 2 {
            return Err(SimError::TooFewVectors(self.vectors));
        }
        if self.lanes == 0 || !self.lanes.is_multiple_of(64) {
            return Err(SimError::Lanes(self.lanes));
        }
        Ok(())
    }
}

fn check_epsilon(epsilon: f64) -> Result<(), SimError> {
    if (0.0..=0.5).contains(&epsilon) {
        Ok(())
    } else {
        Err(SimError::Epsilon(epsilon))
    }
}

/// A bit sequence packed 64 per word. Bits past `len` are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetTrace {
    len: usize,
    words: Vec<u64>,
}

fn tail_mask(len: usize) -> u64 {
    match len % 64 {
        0 => !0,
        r => (1u64 << r) - 1,
    }
}

impl NetTrace {
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(len.div_ceil(64), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        NetTrace { len, words }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            words[i / 64] |= 1 << (i % 64);
        }
        NetTrace {
            len: bits.len(),
            words,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions `i` with `bit(i) != bit(i + 1)`.
    pub fn transitions(&self) -> usize {
        if self.len < 2 {
            return 0;
        }
        let n = self.words.len();
        let mut count = 0usize;
        for (w, &x) in self.words.iter().enumerate() {
            let next = if w + 1 < n { self.words[w + 1] } else { 0 };
            let diff = x ^ ((x >> 1) | (next << 63));
            // Valid pair starts are 0..len-1.
            let valid = if (w + 1) * 64 < self.len {
                !0
            } else {
                let r = self.len - 1 - w * 64;
                (1u64 << r) - 1
            };
            count += (diff & valid).count_ones() as usize;
        }
        count
    }

    pub fn signal_probability(&self) -> f64 {
        self.ones() as f64 / self.len as f64
    }

    /// Transitions per adjacent pair, `transitions / (T - 1)`.
    pub fn switching_activity(&self) -> f64 {
        self.transitions() as f64 / (self.len - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetActivity {
    pub signal_probability: f64,
    pub switching_activity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityProfile {
    pub nets: Vec<NetActivity>,
    /// Mean signal probability over the averaged nets.
    pub avg_p: f64,
    /// Mean switching activity over the averaged nets.
    pub avg_sw: f64,
}

impl ActivityProfile {
    fn from_traces(traces: &[NetTrace], include: impl Fn(usize) -> bool) -> Self {
        let nets: Vec<NetActivity> = traces
            .iter()
            .map(|t| NetActivity {
                signal_probability: t.signal_probability(),
                switching_activity: t.switching_activity(),
            })
            .collect();
        let (mut sp, mut ss, mut count) = (0.0, 0.0, 0usize);
        for (_, a) in nets.iter().enumerate().filter(|(i, _)| include(*i)) {
            sp += a.signal_probability;
            ss += a.switching_activity;
            count += 1;
        }
        let denom = count.max(1) as f64;
        ActivityProfile {
            nets,
            avg_p: sp / denom,
            avg_sw: ss / denom,
        }
    }
}

/// Per-net signal probability and switching activity; averages cover every
/// trace given.
pub fn measure_activity(traces: &[NetTrace]) -> Result<ActivityProfile, SimError> {
    let first = traces.first().ok_or(SimError::Empty)?;
    if first.len() < 2 {
        return Err(SimError::TooFewVectors(first.len()));
    }
    for (index, t) in traces.iter().enumerate() {
        if t.len() != first.len() {
            return Err(SimError::LengthMismatch {
                index,
                got: t.len(),
                expected: first.len(),
            });
        }
    }
    Ok(ActivityProfile::from_traces(traces, |_| true))
}

/// Activity of a simulated circuit, averaged over gate-driven nets only.
fn circuit_activity(c: &Circuit, traces: &[NetTrace]) -> ActivityProfile {
    let gate_driven: Vec<bool> = (0..c.nets().len())
        .map(|i| c.is_gate_driven(crate::netlist::NetId(i)))
        .collect();
    ActivityProfile::from_traces(traces, |i| gate_driven[i])
}

/// Evaluates every net over `words` consecutive words.
///
/// Returns a net-major buffer: net `i` occupies `[i * words, (i + 1) * words)`.
pub(crate) fn eval_words(
    c: &Circuit,
    words: usize,
    mut input_word: impl FnMut(usize, usize) -> u64,
    mut noise_word: impl FnMut(usize, usize) -> u64,
) -> Vec<u64> {
    let mut values = vec![0u64; c.nets().len() * words];
    for (i, id) in c.inputs().iter().enumerate() {
        for w in 0..words {
            values[id.0 * words + w] = input_word(i, w);
        }
    }
    for &g in c.topo_order() {
        let gate = &c.gates()[g];
        let out = gate.output.0 * words;
        for w in 0..words {
            let v = gate
                .kind
                .eval_word(gate.inputs.iter().map(|i| values[i.0 * words + w]));
            values[out + w] = v ^ noise_word(g, w);
        }
    }
    values
}

struct Batch {
    words: Range<usize>,
    golden: Vec<u64>,
    noisy: Option<Vec<u64>>,
}

fn run_batches(c: &Circuit, cfg: &SimConfig, noisy: bool) -> Vec<Batch> {
    let total_words = cfg.vectors.div_ceil(64);
    let per_batch = cfg.lanes / 64;
    let input_streams: Vec<Stream> = (0..c.inputs().len())
        .map(|i| Stream::new(cfg.seed, Domain::Input, i as u64))
        .collect();
    let noise_streams: Vec<Stream> = (0..c.gates().len())
        .map(|g| Stream::new(cfg.seed, Domain::GateNoise, g as u64))
        .collect();
    let threshold = probability_threshold(cfg.epsilon);

    let starts: Vec<usize> = (0..total_words).step_by(per_batch).collect();
    starts
        .into_par_iter()
        .with_min_len(16)
        .map(|start| {
            let range = start..(start + per_batch).min(total_words);
            let n = range.len();
            let input = |i: usize, w: usize| input_streams[i].at((start + w) as u64);
            let golden = eval_words(c, n, input, |_, _| 0);
            let noisy = noisy.then(|| {
                eval_words(c, n, input, |g, w| {
                    noise_streams[g].bernoulli_word((start + w) as u64, threshold)
                })
            });
            Batch {
                words: range,
                golden,
                noisy,
            }
        })
        .collect()
}

fn gather(
    c: &Circuit,
    vectors: usize,
    batches: &[Batch],
    pick: impl Fn(&Batch) -> &[u64],
) -> Vec<NetTrace> {
    let total_words = vectors.div_ceil(64);
    (0..c.nets().len())
        .map(|net| {
            let mut words = Vec::with_capacity(total_words);
            for b in batches {
                let n = b.words.len();
                words.extend_from_slice(&pick(b)[net * n..(net + 1) * n]);
            }
            NetTrace::from_words(vectors, words)
        })
        .collect()
}

/// Error-free simulation over `cfg.vectors` random vectors.
///
/// `cfg.epsilon` is ignored. Returns one trace per net (indexed like
/// [`Circuit::nets`]) and the activity profile averaged over gate-driven
/// nets.
pub fn simulate(
    c: &Circuit,
    cfg: &SimConfig,
) -> Result<(Vec<NetTrace>, ActivityProfile), SimError> {
    SimConfig {
        epsilon: 0.0,
        ..*cfg
    }
    .validate()?;
    let batches = run_batches(c, cfg, false);
    let traces = gather(c, cfg.vectors, &batches, |b| &b.golden);
    let activity = circuit_activity(c, &traces);
    Ok((traces, activity))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Activity of the noisy run.
    pub activity: ActivityProfile,
    /// Activity of the error-free run on the same input vectors.
    pub golden_activity: ActivityProfile,
    /// Fraction of vectors with at least one wrong output bit.
    pub output_error_delta: f64,
    pub per_output_error: Vec<f64>,
    /// Single-channel prediction `noisy_sw(golden avg_sw, ε)`.
    pub predicted_avg_sw: f64,
    /// Measured noisy `avg_sw` minus `predicted_avg_sw`.
    pub channel_gap: f64,
}

/// Noisy simulation compared against an error-free run on identical inputs.
pub fn simulate_noisy(c: &Circuit, cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let batches = run_batches(c, cfg, true);
    let golden = gather(c, cfg.vectors, &batches, |b| &b.golden);
    let noisy = gather(c, cfg.vectors, &batches, |b| b.noisy.as_deref().unwrap());

    let words = cfg.vectors.div_ceil(64);
    let mut any_wrong = vec![0u64; words];
    let mut per_output_error = Vec::with_capacity(c.outputs().len());
    for &out in c.outputs() {
        let (g, n) = (&golden[out.0], &noisy[out.0]);
        let mut wrong = 0usize;
        for (w, acc) in any_wrong.iter_mut().enumerate() {
            let diff = g.words()[w] ^ n.words()[w];
            *acc |= diff;
            wrong += diff.count_ones() as usize;
        }
        per_output_error.push(wrong as f64 / cfg.vectors as f64);
    }
    let wrong_vectors: usize = any_wrong.iter().map(|w| w.count_ones() as usize).sum();

    let activity = circuit_activity(c, &noisy);
    let golden_activity = circuit_activity(c, &golden);
    let predicted_avg_sw = noisy_sw(golden_activity.avg_sw, cfg.epsilon);
    Ok(SimResult {
        channel_gap: activity.avg_sw - predicted_avg_sw,
        predicted_avg_sw,
        activity,
        golden_activity,
        output_error_delta: wrong_vectors as f64 / cfg.vectors as f64,
        per_output_error,
    })
}

/// Passes a trace through a binary symmetric channel: each bit flips
/// independently with probability `epsilon`.
pub fn apply_channel(trace: &NetTrace, epsilon: f64, seed: u64) -> Result<NetTrace, SimError> {
    check_epsilon(epsilon)?;
    let stream = Stream::new(seed, Domain::Channel, 0);
    let threshold = probability_threshold(epsilon);
    let words = trace
        .words()
        .iter()
        .enumerate()
        .map(|(w, &x)| x ^ stream.bernoulli_word(w as u64, threshold))
        .collect();
    Ok(NetTrace::from_words(trace.len(), words))
}
