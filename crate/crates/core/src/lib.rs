// SPDX-License-Identifier: Apache-2.0

//! Gate-level energy, delay and redundancy lower bounds for circuits built
//! from noisy gates, plus the netlist, simulation and sensitivity tooling
//! that measures their inputs.

pub mod boolean_metrics;
pub mod bounds;
pub mod logic_sim;
pub mod netlist;
pub mod rng;
pub mod sweep_report;

pub use boolean_metrics::{
    sensitivity_exact, sensitivity_sampled, summarize, SensitivityError, SensitivityMode,
    SensitivityResult,
};
pub use bounds::{
    BoundsError, BoundsReport, ChannelParams, CircuitSummary, DelayMode, DepthBound, EnergyModel,
};
pub use logic_sim::{
    apply_channel, measure_activity, simulate, simulate_noisy, ActivityProfile, NetTrace,
    SimConfig, SimError, SimResult,
};
pub use netlist::{
    emit_bench, gen_array_multiplier, gen_parity, gen_ripple_adder, nmr_transform, parse_bench,
    parse_bench_named, structural_metrics, Circuit, CircuitBuilder, GateKind, NetId, NetlistError,
    StructuralMetrics,
};
pub use sweep_report::{
    figure_preset, read_csv, read_json, run_bench, run_sweep, run_sweeps, write_csv, write_json,
    BenchConfig, Grid, Record, ReportError, Row, SweepParam, SweepSpec, Table,
};
