// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use faultbound_core::sweep_report::{fig4_curve, measure, round9, Grid, Spacing};
use faultbound_core::{
    emit_bench, figure_preset, gen_array_multiplier, gen_parity, gen_ripple_adder, nmr_transform,
    parse_bench_named, run_bench, run_sweeps, simulate_noisy, write_csv, write_json, BenchConfig,
    Circuit, DelayMode, EnergyModel, NetlistError, ReportError, SimConfig, SweepParam, SweepSpec,
    Table,
};
use serde_json::{json, Value};

use crate::args::{
    AnalyzeArgs, BenchArgs, Command, GenArgs, GenKind, MeasureArgs, ModelArgs, SimFormat,
    SimulateArgs, SweepArgs, TableFormat,
};

pub enum CliError {
    /// Bad flag values (exit 1).
    Usage(String),
    /// Unreadable or unparsable input (exit 2).
    Input(String),
}

pub enum Outcome {
    Done,
    InfeasibleOnly,
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Gen(a) => gen(a),
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Bench(a) => bench(a),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

fn load(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "top".into());
    parse_bench_named(&name, &text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn gen(a: GenArgs) -> Result<Outcome> {
    let circuit = match a.kind {
        GenKind::Parity => gen_parity(a.n, a.k),
        GenKind::Adder => gen_ripple_adder(a.width),
        GenKind::Multiplier => gen_array_multiplier(a.width),
    }
    .map_err(|e| match e {
        NetlistError::InvalidParameter(msg) => CliError::Usage(msg),
        other => CliError::Input(other.to_string()),
    })?;
    emit(a.output.as_deref(), &emit_bench(&circuit))?;
    if let Some(path) = &a.output {
        eprintln!(
            "wrote {} ({} inputs, {} gates)",
            path.display(),
            circuit.inputs().len(),
            circuit.gates().len()
        );
    }
    Ok(Outcome::Done)
}

fn model(m: &ModelArgs) -> EnergyModel {
    EnergyModel {
        leakage_share: m.leakage_share,
        vdd: m.vdd,
        vt: m.vt,
        alpha: m.alpha,
    }
}

fn bench_config(
    epsilons: &[f64],
    m: &ModelArgs,
    meas: &MeasureArgs,
    mode: DelayMode,
) -> Result<BenchConfig> {
    let cfg = BenchConfig {
        epsilons: epsilons.to_vec(),
        delta: m.delta,
        model: model(m),
        sim: SimConfig::new(meas.vectors, meas.seed),
        mode,
        sensitivity_samples: meas.samples,
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

/// Configuration echo for a measured batch; excludes --jobs, which does not
/// affect results.
fn bench_echo(cfg: &BenchConfig) -> Value {
    json!({
        "epsilons": cfg.epsilons,
        "delta": cfg.delta,
        "leakage_share": cfg.model.leakage_share,
        "vdd": cfg.model.vdd,
        "vt": cfg.model.vt,
        "alpha": cfg.model.alpha,
        "vectors": cfg.sim.vectors,
        "seed": cfg.sim.seed,
        "sensitivity_samples": cfg.sensitivity_samples,
        "delay_mode": cfg.mode.to_string(),
    })
}

fn finish(table: Table, format: TableFormat, output: Option<&Path>) -> Result<Outcome> {
    for f in &table.failures {
        eprintln!("warning: {}: {}", f.name, f.error);
    }
    let text = match format {
        TableFormat::Csv => write_csv(&table),
        TableFormat::Json => write_json(&table),
    };
    emit(output, &text)?;
    Ok(if table.infeasible_only() {
        Outcome::InfeasibleOnly
    } else {
        Outcome::Done
    })
}

fn with_echo(mut table: Table, mut echo: Value, extra: &[(&str, Value)]) -> Table {
    if let Value::Object(map) = &mut echo {
        for (k, v) in extra {
            map.insert((*k).to_string(), v.clone());
        }
    }
    table.spec = echo;
    table
}

fn analyze(a: AnalyzeArgs) -> Result<Outcome> {
    let cfg = bench_config(&a.epsilon, &a.model, &a.measure, a.delay_mode)?;
    let circuit = load(&a.netlist)?;
    let table = run_bench(std::slice::from_ref(&circuit), &cfg).map_err(usage)?;
    if let Some(f) = table.failures.first() {
        return Err(CliError::Input(format!(
            "{}: {}",
            a.netlist.display(),
            f.error
        )));
    }
    let table = with_echo(
        table,
        bench_echo(&cfg),
        &[("netlist", json!(a.netlist.display().to_string()))],
    );
    finish(table, a.format, a.output.as_deref())
}

fn simulate(a: SimulateArgs) -> Result<Outcome> {
    let cfg = SimConfig::new(a.vectors, a.seed).with_epsilon(a.epsilon);
    cfg.validate().map_err(usage)?;
    if let Some(n) = a.nmr {
        if n < 3 || n % 2 == 0 {
            return Err(CliError::Usage(format!(
                "--nmr needs an odd count >= 3, got {n}"
            )));
        }
    }
    let mut circuit = load(&a.netlist)?;
    if let Some(n) = a.nmr {
        circuit = nmr_transform(&circuit, n).map_err(usage)?;
    }
    let r = simulate_noisy(&circuit, &cfg).map_err(usage)?;
    let text = match a.format {
        SimFormat::Json => {
            let doc = json!({
                "netlist": a.netlist.display().to_string(),
                "circuit": circuit.name(),
                "epsilon": a.epsilon,
                "vectors": a.vectors,
                "seed": a.seed,
                "nmr": a.nmr,
                "gates": circuit.gates().len(),
                "result": r,
            });
            serde_json::to_string_pretty(&doc).expect("JSON encoding") + "\n"
        }
        SimFormat::Text => {
            let mut s = String::new();
            s.push_str(&format!("# netlist={}\n", a.netlist.display()));
            s.push_str(&format!("# epsilon={}\n", a.epsilon));
            s.push_str(&format!("# vectors={}\n", a.vectors));
            s.push_str(&format!("# seed={}\n", a.seed));
            match a.nmr {
                Some(n) => s.push_str(&format!("# nmr={n}\n")),
                None => s.push_str("# nmr=none\n"),
            }
            s.push_str(&format!("gates={}\n", circuit.gates().len()));
            s.push_str(&format!("delta_emp={}\n", round9(r.output_error_delta)));
            s.push_str(&format!("avg_p={}\n", round9(r.activity.avg_p)));
            s.push_str(&format!("avg_sw={}\n", round9(r.activity.avg_sw)));
            s.push_str(&format!(
                "golden_avg_sw={}\n",
                round9(r.golden_activity.avg_sw)
            ));
            s.push_str(&format!(
                "predicted_avg_sw={}\n",
                round9(r.predicted_avg_sw)
            ));
            s.push_str(&format!("channel_gap={}\n", round9(r.channel_gap)));
            for (id, err) in circuit.outputs().iter().zip(&r.per_output_error) {
                s.push_str(&format!(
                    "output_error.{}={}\n",
                    circuit.net(*id).name,
                    round9(*err)
                ));
            }
            s
        }
    };
    emit(a.output.as_deref(), &text)?;
    Ok(Outcome::Done)
}

fn default_grid(param: SweepParam) -> Grid {
    match param {
        SweepParam::Epsilon | SweepParam::Delta => Grid::log(1e-4, 0.499, 50),
        SweepParam::Sw0 => Grid::linear(0.01, 0.99, 50),
        SweepParam::K => Grid::linear(1.0, 8.0, 50),
    }
}

fn sweep(a: SweepArgs) -> Result<Outcome> {
    if let Some(sw0) = a.sw0 {
        if !(sw0 > 0.0 && sw0 < 1.0) {
            return Err(CliError::Usage(format!(
                "--sw0 must lie in (0, 1), got {sw0}"
            )));
        }
    }
    let specs = match a.figure {
        Some(figure) => {
            let mut specs = match (figure, a.sw0) {
                (4, Some(sw0)) => vec![fig4_curve(sw0)],
                _ => figure_preset(figure).map_err(usage)?,
            };
            for spec in &mut specs {
                spec.grid.points = a.points;
            }
            specs
        }
        None => vec![explicit_spec(&a)?],
    };
    for spec in &specs {
        spec.validate().map_err(usage)?;
    }
    let table = run_sweeps(&specs).map_err(|e| match e {
        ReportError::Json(e) => CliError::Input(e.to_string()),
        other => usage(other),
    })?;
    let echo = match a.figure {
        Some(figure) => {
            json!({ "figure": figure, "curves": serde_json::to_value(&specs).expect("JSON encoding") })
        }
        None => json!({ "curves": serde_json::to_value(&specs).expect("JSON encoding") }),
    };
    let mut table = Table {
        spec: echo,
        ..table
    };
    if let (Some(path), Value::Object(map)) = (&a.netlist, &mut table.spec) {
        map.insert("netlist".into(), json!(path.display().to_string()));
        map.insert("vectors".into(), json!(a.measure.vectors));
        map.insert("seed".into(), json!(a.measure.seed));
    }
    finish(table, a.format, a.output.as_deref())
}

fn explicit_spec(a: &SweepArgs) -> Result<SweepSpec> {
    let base = default_grid(a.param);
    let spacing = if a.log {
        Spacing::Log
    } else if a.linear {
        Spacing::Linear
    } else {
        base.spacing
    };
    let grid = Grid {
        start: a.start.unwrap_or(base.start),
        stop: a.stop.unwrap_or(base.stop),
        points: a.points,
        spacing,
    };
    let summary = match &a.netlist {
        Some(path) => {
            let cfg = bench_config(&[a.epsilon], &a.model, &a.measure, a.delay_mode)?;
            let circuit = load(path)?;
            let (summary, sens) = measure(&circuit, &cfg)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            eprintln!(
                "measured {}: s={} ({}), S0={}, k={}, n={}, sw0={}",
                circuit.name(),
                summary.s,
                sens.mode,
                summary.s0,
                round9(summary.k),
                summary.n,
                round9(summary.sw0)
            );
            summary
        }
        None => faultbound_core::CircuitSummary {
            s: a.s,
            s0: a.s0,
            sw0: a.sw0.unwrap_or(0.5),
            k: a.k,
            n: a.n,
            d0: None,
            m: 1,
        },
    };
    Ok(SweepSpec {
        name: a.name.clone(),
        param: a.param,
        grid,
        summary,
        epsilon: a.epsilon,
        delta: a.model.delta,
        model: model(&a.model),
        mode: a.delay_mode,
    })
}

fn bench_files(a: &BenchArgs) -> Result<Vec<PathBuf>> {
    let mut files = a.files.clone();
    if let Some(dir) = &a.dir {
        let entries = fs::read_dir(dir)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", dir.display())))?;
        let mut found = Vec::new();
        for entry in entries {
            let path = entry
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", dir.display())))?
                .path();
            if path.extension().is_some_and(|x| x == "bench") {
                found.push(path);
            }
        }
        found.sort();
        files.extend(found);
    }
    Ok(files)
}

fn bench(a: BenchArgs) -> Result<Outcome> {
    let cfg = bench_config(&a.epsilons, &a.model, &a.measure, a.delay_mode)?;
    let files = bench_files(&a)?;
    let circuits = files.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
    let table = run_bench(&circuits, &cfg).map_err(usage)?;
    let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    let table = with_echo(table, bench_echo(&cfg), &[("files", json!(names))]);
    finish(table, a.format, a.output.as_deref())
}
