// SPDX-License-Identifier: Apache-2.0

//! Boolean sensitivity of a circuit's multi-output function.
//!
//! An input flip counts toward the sensitivity at `x` when it changes any
//! output bit, i.e. sensitivity is taken on the vector-valued function
//! directly rather than on a characteristic-function rewrite.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{BoundsError, CircuitSummary};
use crate::logic_sim::{eval_words, ActivityProfile};
use crate::netlist::{structural_metrics, Circuit};
use crate::rng::{Domain, Stream};

/// Largest input count enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Words per evaluation chunk during enumeration.
const CHUNK_WORDS: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error(
        "circuit has {n} inputs; exhaustive sensitivity is limited to {limit}, use sampled mode"
    )]
    TooManyInputs { n: usize, limit: usize },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("error-free switching activity is zero; energy bounds need sw0 > 0")]
    ZeroActivity,
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensitivityMode {
    Exact,
    Sampled,
}

impl std::fmt::Display for SensitivityMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SensitivityMode::Exact => "exact",
            SensitivityMode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub value: usize,
    pub mode: SensitivityMode,
    /// Input vector (input `i` at index `i`) attaining `value`.
    pub witness_input: Vec<bool>,
    /// Number of inputs examined in sampled mode; 0 for exact.
    pub samples_used: usize,
}

/// Lane masks selecting positions whose bit `i` is 0, for `i < 6`.
const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Swaps lane `x` with lane `x ^ (1 << i)` inside a word.
fn swap_lanes(word: u64, i: usize) -> u64 {
    let shift = 1 << i;
    let m = LOW_MASKS[i];
    ((word & m) << shift) | ((word >> shift) & m)
}

/// Exact sensitivity by enumerating all `2^n` inputs.
///
/// Input `i` takes bit `i` of the enumeration index, so the whole truth
/// table is produced 64 rows per word. Ties resolve to the smallest input.
pub fn sensitivity_exact(c: &Circuit) -> Result<SensitivityResult, SensitivityError> {
    sensitivity_exact_with_limit(c, EXHAUSTIVE_LIMIT)
}

pub fn sensitivity_exact_with_limit(
    c: &Circuit,
    limit: usize,
) -> Result<SensitivityResult, SensitivityError> {
    let n = c.inputs().len();
    if n > limit {
        return Err(SensitivityError::TooManyInputs { n, limit });
    }
    let rows = 1usize << n;
    let total_words = rows.div_ceil(64);
    let valid = if rows >= 64 { !0 } else { (1u64 << rows) - 1 };

    // Output truth tables, one Vec<u64> per output.
    let chunks: Vec<Vec<u64>> = (0..total_words)
        .step_by(CHUNK_WORDS)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| {
            let len = CHUNK_WORDS.min(total_words - start);
            let values = eval_words(
                c,
                len,
                |i, w| {
                    if i < 6 {
                        !LOW_MASKS[i]
                    } else if ((start + w) >> (i - 6)) & 1 == 1 {
                        !0
                    } else {
                        0
                    }
                },
                |_, _| 0,
            );
            c.outputs()
                .iter()
                .flat_map(|o| values[o.0 * len..(o.0 + 1) * len].iter().copied())
                .collect()
        })
        .collect();
    let mut tables = vec![Vec::with_capacity(total_words); c.outputs().len()];
    for (chunk_idx, chunk) in chunks.iter().enumerate() {
        let len = CHUNK_WORDS.min(total_words - chunk_idx * CHUNK_WORDS);
        for (o, table) in tables.iter_mut().enumerate() {
            table.extend_from_slice(&chunk[o * len..(o + 1) * len]);
        }
    }

    let best = (0..total_words)
        .into_par_iter()
        .map(|w| {
            let mut counts = [0u8; 64];
            for i in 0..n {
                let mut diff = 0u64;
                for table in &tables {
                    let here = table[w];
                    let flipped = if i < 6 {
                        swap_lanes(here, i)
                    } else {
                        table[w ^ (1 << (i - 6))]
                    };
                    diff |= here ^ flipped;
                }
                diff &= valid;
                while diff != 0 {
                    counts[diff.trailing_zeros() as usize] += 1;
                    diff &= diff - 1;
                }
            }
            let (lane, &count) = counts
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .unwrap();
            (count as usize, w * 64 + lane)
        })
        .reduce(
            || (0, usize::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    let (value, x) = best;
    Ok(SensitivityResult {
        value,
        mode: SensitivityMode::Exact,
        witness_input: (0..n).map(|i| x >> i & 1 == 1).collect(),
        samples_used: 0,
    })
}

/// Lower estimate of sensitivity from `samples` uniformly drawn inputs.
///
/// Sample `j` depends only on `(seed, j)`, so raising the sample count
/// never lowers the estimate.
pub fn sensitivity_sampled(
    c: &Circuit,
    samples: usize,
    seed: u64,
) -> Result<SensitivityResult, SensitivityError> {
    if samples == 0 {
        return Err(SensitivityError::NoSamples);
    }
    let n = c.inputs().len();
    let input_words = n.div_ceil(64).max(1);
    // Lane 0 holds x, lane j + 1 holds x with input j flipped.
    let lane_words = (n + 1).div_ceil(64);
    let stream = Stream::new(seed, Domain::Sensitivity, 0);

    let draw = |j: usize| -> Vec<bool> {
        (0..n)
            .map(|i| {
                let word = stream.at((j * input_words + i / 64) as u64);
                word >> (i % 64) & 1 == 1
            })
            .collect()
    };

    let (value, sample) = (0..samples)
        .into_par_iter()
        .map(|j| {
            let x = draw(j);
            let values = eval_words(
                c,
                lane_words,
                |i, w| {
                    let base = if x[i] { !0u64 } else { 0 };
                    // Flip input i in lane i + 1.
                    let lane = i + 1;
                    if lane / 64 == w {
                        base ^ (1u64 << (lane % 64))
                    } else {
                        base
                    }
                },
                |_, _| 0,
            );
            let mut count = 0usize;
            for w in 0..lane_words {
                let mut diff = 0u64;
                for o in c.outputs() {
                    let reference = if values[o.0 * lane_words] & 1 == 1 {
                        !0
                    } else {
                        0
                    };
                    diff |= values[o.0 * lane_words + w] ^ reference;
                }
                // Only lanes 1..=n are flips.
                let lo = w * 64;
                let mut valid = !0u64;
                if lo == 0 {
                    valid &= !1;
                }
                let hi = n + 1;
                if hi < lo + 64 {
                    valid &= (1u64 << (hi - lo)) - 1;
                }
                count += (diff & valid).count_ones() as usize;
            }
            (count, j)
        })
        .reduce(
            || (0, usize::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    Ok(SensitivityResult {
        value,
        mode: SensitivityMode::Sampled,
        witness_input: if sample == usize::MAX {
            vec![false; n]
        } else {
            draw(sample)
        },
        samples_used: samples,
    })
}

/// Bundles the bound inputs measured from a circuit.
///
/// `activity` must come from an error-free run of `c`; its gate-net average
/// becomes `sw0`.
pub fn summarize(
    c: &Circuit,
    activity: &ActivityProfile,
    sens: &SensitivityResult,
) -> Result<CircuitSummary, SensitivityError> {
    if activity.avg_sw <= 0.0 {
        return Err(SensitivityError::ZeroActivity);
    }
    let m = structural_metrics(c);
    let summary = CircuitSummary {
        s: sens.value,
        s0: m.size_s0,
        sw0: activity.avg_sw,
        k: m.avg_fanin_k,
        n: m.n_inputs,
        d0: Some(m.depth_d0),
        m: m.m_outputs,
    };
    summary.validate()?;
    Ok(summary)
}
