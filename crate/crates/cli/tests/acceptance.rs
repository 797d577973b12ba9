// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use faultbound_core::bounds::{
    depth_lb, edp_ratio_lb, leakage_ratio, noisy_sw, power_ratio, redundancy_lb,
    total_energy_ratio_lb, ChannelParams, DepthBound,
};
use faultbound_core::rng::{Domain, Stream};
use faultbound_core::{
    apply_channel, gen_parity, gen_ripple_adder, nmr_transform, parse_bench, sensitivity_exact,
    sensitivity_sampled, simulate, simulate_noisy, summarize, Circuit, CircuitBuilder,
    CircuitSummary, DelayMode, EnergyModel, GateKind, SimConfig,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn figure_summary(k: f64) -> CircuitSummary {
    CircuitSummary::manual(10, 21, k, 10, 0.5).unwrap()
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let note = format!("{:.2}s", elapsed.as_secs_f64());
    match out {
        Ok(d) if elapsed < limit => Ok(format!("{d}; {note}")),
        Ok(d) => Err(format!("{d}; too slow: {note} >= {}s", limit.as_secs())),
        Err(d) => Err(format!("{d}; {note}")),
    }
}

fn channel_law() -> Outcome {
    timed(Duration::from_secs(5), || {
        let c = gen_parity(16, 2).unwrap();
        let (traces, _) = simulate(&c, &SimConfig::new(100_000, 11)).unwrap();
        let mut worst = 0.0f64;
        for eps in [0.05, 0.1, 0.3] {
            for (i, t) in traces.iter().enumerate() {
                let sw0 = t.switching_activity();
                let sw = apply_channel(t, eps, 1000 + i as u64)
                    .unwrap()
                    .switching_activity();
                worst = worst.max((sw - noisy_sw(sw0, eps)).abs());
            }
        }
        check(
            worst < 0.01,
            format!(
                "{} nets x 3 eps, max |sw - predicted| = {worst:.5}",
                traces.len()
            ),
        )
    })
}

fn noisy_delta() -> Outcome {
    timed(Duration::from_secs(5), || {
        let c = gen_parity(16, 2).unwrap();
        let r = simulate_noisy(&c, &SimConfig::new(100_000, 7).with_epsilon(0.05)).unwrap();
        let expected = (1.0 - 0.9f64.powi(15)) / 2.0;
        let d = r.output_error_delta;
        check(
            within(d, 0.3971, 0.005),
            format!("delta_emp = {d:.5}, closed form {expected:.5}"),
        )
    })
}

fn redundancy_order() -> Outcome {
    let r = redundancy_lb(10, 0.01, 2.0, 0.49).unwrap() / 21.0;
    check(within(r, 11.07, 0.02) && r > 10.0, format!("R/S0 = {r:.5}"))
}

fn headline_energy() -> Outcome {
    let c = gen_parity(16, 2).unwrap();
    let (_, act) = simulate(&c, &SimConfig::new(100_000, 1)).unwrap();
    let sens = sensitivity_exact(&c).unwrap();
    let s = summarize(&c, &act, &sens).unwrap();
    let e = total_energy_ratio_lb(&s, 0.01, 0.01, &EnergyModel::default()).unwrap();
    check(
        s.s == 16 && s.s0 == 15 && s.k == 2.0 && within(e, 1.416, 0.01) && e >= 1.4,
        format!(
            "s = {}, S0 = {}, k = {}, sw0 = {:.4}, total energy ratio = {e:.5}",
            s.s, s.s0, s.k, s.sw0
        ),
    )
}

fn leakage_direction() -> Outcome {
    let mut bad = Vec::new();
    let mut points = 0;
    for i in 1..=9 {
        let sw0 = i as f64 / 10.0;
        for j in 1..=49 {
            let eps = j as f64 / 100.0;
            let r = leakage_ratio(sw0, eps).unwrap();
            points += 1;
            let ok = if i == 5 {
                within(r, 1.0, 1e-12)
            } else {
                (r < 1.0) == (sw0 < 0.5)
            };
            if !ok {
                bad.push(format!("sw0={sw0} eps={eps} ratio={r}"));
            }
        }
    }
    check(
        bad.is_empty(),
        format!("{points} grid points, violations: {bad:?}"),
    )
}

fn depth_bound() -> Outcome {
    let d = depth_lb(10, 0.01, 3.0, 0.01).unwrap();
    let inf = depth_lb(10, 0.01, 2.0, 0.15).unwrap();
    let levels = d.levels().unwrap_or(f64::NAN);
    let max_inputs = match inf {
        DepthBound::Infeasible { max_inputs } => max_inputs,
        _ => f64::NAN,
    };
    check(
        within(levels, 2.0963, 0.001) && inf.is_infeasible() && within(max_inputs, 1.088, 0.001),
        format!("depth = {levels:.5}, k=2 eps=0.15 -> {inf:?}"),
    )
}

fn power_crossover() -> Outcome {
    let s = figure_summary(3.0);
    let m = EnergyModel::default();
    let lo = power_ratio(&s, 0.01, 0.001, &m, DelayMode::Figure)
        .unwrap()
        .unwrap_or(f64::NAN);
    let hi = power_ratio(&s, 0.01, 0.2, &m, DelayMode::Figure)
        .unwrap()
        .unwrap_or(f64::NAN);
    check(
        within(lo, 1.072, 0.002) && lo > 1.0 && within(hi, 0.091, 0.002) && hi < 1.0,
        format!("power(0.001) = {lo:.5}, power(0.2) = {hi:.5}"),
    )
}

/// Small random circuit over `n` inputs built from a seeded stream.
fn random_circuit(seed: u64, n: usize, gates: usize) -> Circuit {
    let stream = Stream::new(seed, Domain::Sensitivity, 99);
    let mut counter = 0u64;
    let mut next = |m: usize| {
        counter += 1;
        (stream.at(counter) % m as u64) as usize
    };
    let kinds = [
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Nor,
        GateKind::Xor,
        GateKind::Xnor,
        GateKind::Not,
        GateKind::Maj3,
    ];
    let mut b = CircuitBuilder::new(format!("rand{seed}"));
    let mut nets: Vec<String> = (0..n).map(|i| format!("i{i}")).collect();
    for name in &nets {
        b.input(name.clone());
    }
    for g in 0..gates {
        let kind = kinds[next(kinds.len())];
        let arity = match kind {
            GateKind::Not => 1,
            GateKind::Maj3 => 3,
            _ => 2 + next(2),
        };
        let operands: Vec<String> = (0..arity).map(|_| nets[next(nets.len())].clone()).collect();
        let name = format!("g{g}");
        b.gate(name.clone(), kind, operands);
        nets.push(name);
    }
    b.output(format!("g{}", gates - 1));
    b.output(format!("g{}", gates - 2));
    b.build().unwrap()
}

fn sensitivity_oracle() -> Outcome {
    let mut notes = Vec::new();
    for n in 2..=12 {
        let v = sensitivity_exact(&gen_parity(n, 2).unwrap()).unwrap().value;
        if v != n {
            notes.push(format!("parity{n} -> {v}"));
        }
    }
    let constants = [
        "INPUT(a)\nINPUT(b)\nOUTPUT(z)\nt = XOR(a, a)\nz = BUFF(t)",
        "INPUT(a)\nOUTPUT(z)\nna = NOT(a)\nz = OR(a, na)",
        "INPUT(a)\nINPUT(b)\nOUTPUT(z)\nOUTPUT(y)\nna = NOT(a)\nz = AND(a, na)\ny = XNOR(b, b)",
    ];
    for text in constants {
        let v = sensitivity_exact(&parse_bench(text).unwrap())
            .unwrap()
            .value;
        if v != 0 {
            notes.push(format!("constant -> {v}"));
        }
    }
    let adder = sensitivity_exact(&gen_ripple_adder(4).unwrap())
        .unwrap()
        .value;
    if adder != 9 {
        notes.push(format!("adder4 -> {adder}"));
    }
    let mut sampled_ok = 0;
    for seed in 0..20u64 {
        let c = random_circuit(seed, 3 + (seed as usize % 6), 12);
        let exact = sensitivity_exact(&c).unwrap().value;
        let sampled = sensitivity_sampled(&c, 16, seed).unwrap().value;
        if sampled <= exact {
            sampled_ok += 1;
        } else {
            notes.push(format!("{}: sampled {sampled} > exact {exact}", c.name()));
        }
    }
    check(
        notes.is_empty(),
        format!("parity 2..12, 3 constants, adder4 = {adder}, sampled <= exact on {sampled_ok}/20; {notes:?}"),
    )
}

fn identities() -> Outcome {
    let stream = Stream::new(2024, Domain::Channel, 7);
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..1000u64 {
        // Uniform on (0, 0.5].
        let u = (stream.at(i) >> 11) as f64 / (1u64 << 53) as f64;
        let eps = 0.5 * (1.0 - u);
        let p = ChannelParams::new(eps, 0.01).unwrap();
        let t_ref = (2.0 - 3.0 * eps) / eps;
        worst.0 = worst.0.max(((p.t - t_ref) / t_ref).abs());
        worst.1 = worst
            .1
            .max(((p.omega * (1.0 - p.omega) - eps / 2.0) / (eps / 2.0)).abs());
        let sw0 = 0.01 + 0.98 * ((stream.at(i + 5000) >> 11) as f64 / (1u64 << 53) as f64);
        let r = leakage_ratio(sw0, eps).unwrap();
        let sw_e = noisy_sw(sw0, eps);
        let odds = ((1.0 - sw_e) * sw0) / (sw_e * (1.0 - sw0));
        worst.2 = worst.2.max(((r - odds) / odds).abs());
    }
    check(
        worst.0 <= 1e-12 && worst.1 <= 1e-12 && worst.2 <= 1e-12,
        format!(
            "max rel err: t {:.1e}, omega(1-omega) {:.1e}, leakage odds {:.1e}",
            worst.0, worst.1, worst.2
        ),
    )
}

fn nmr_harness() -> Outcome {
    let c = gen_parity(8, 2).unwrap();
    let tmr = nmr_transform(&c, 3).unwrap();
    let cfg = SimConfig::new(100_000, 5).with_epsilon(0.01);
    let plain = simulate_noisy(&c, &cfg).unwrap().output_error_delta;
    let voted = simulate_noisy(&tmr, &cfg).unwrap().output_error_delta;
    check(
        within(plain, 0.066, 0.005) && voted < plain,
        format!("plain = {plain:.5}, 3-MR = {voted:.5}"),
    )
}

fn run_bin(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_faultbound"))
        .current_dir(dir)
        .env_remove("FAULTBOUND_SEED")
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(out.stdout)
    } else {
        Err(format!(
            "{args:?} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    run_bin(
        d,
        &[
            "gen",
            "parity",
            "--n",
            "16",
            "--k",
            "2",
            "-o",
            "parity16.bench",
        ],
    )?;
    run_bin(d, &["gen", "adder", "--width", "4", "-o", "adder4.bench"])?;
    run_bin(
        d,
        &["gen", "multiplier", "--width", "3", "-o", "mult3.bench"],
    )?;
    let bench = |jobs: &str| {
        run_bin(
            d,
            &[
                "--jobs",
                jobs,
                "bench",
                "--dir",
                ".",
                "--epsilons",
                "0.001,0.01,0.1",
                "--delta",
                "0.01",
                "--seed",
                "42",
            ],
        )
    };
    let one = bench("1")?;
    let eight = bench("8")?;
    let rows = String::from_utf8_lossy(&one)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .count();
    check(
        one == eight && rows == 10,
        format!(
            "{} bytes, {} data rows, identical = {}",
            one.len(),
            rows - 1,
            one == eight
        ),
    )
}

fn edp_trend() -> Outcome {
    let s = figure_summary(3.0);
    let m = EnergyModel::default();
    let edp = |eps: f64| edp_ratio_lb(&s, 0.01, eps, &m, DelayMode::Figure).unwrap();
    let grid: Vec<f64> = (0..=199)
        .map(|i| 0.001 + 0.199 * i as f64 / 199.0)
        .collect();
    let values: Option<Vec<f64>> = grid.iter().map(|&e| edp(e)).collect();
    let Some(values) = values else {
        return Err("EDP undefined somewhere on [0.001, 0.2]".into());
    };
    let monotone = values.windows(2).all(|w| w[1] > w[0]);
    let at = edp(0.1).unwrap_or(f64::NAN);
    check(
        monotone && within(at, 2.03, 0.02),
        format!("200-point grid monotone = {monotone}, EDP(0.1) = {at:.5}"),
    )
}

fn main() {
    // A criterion that panics counts as a failure with the panic message.
    let criteria: [Criterion; 12] = [
        ("channel law through a symmetric channel", channel_law),
        ("noisy parity-16 output error", noisy_delta),
        ("order-of-magnitude redundancy", redundancy_order),
        ("parity-16 total energy at 1% gate error", headline_energy),
        ("leakage ratio direction", leakage_direction),
        ("depth bound and infeasibility", depth_bound),
        ("average power crossover", power_crossover),
        ("sensitivity oracle", sensitivity_oracle),
        ("closed-form identities", identities),
        ("NMR lowers parity-8 output error", nmr_harness),
        ("bench output independent of --jobs", determinism),
        ("energy-delay trend", edp_trend),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
