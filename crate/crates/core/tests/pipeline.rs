// SPDX-License-Identifier: Apache-2.0

use faultbound_core::bounds::{noisy_sw, total_energy_ratio_lb};
use faultbound_core::{
    emit_bench, gen_array_multiplier, gen_parity, gen_ripple_adder, nmr_transform, parse_bench,
    read_csv, read_json, run_bench, sensitivity_exact, sensitivity_sampled, simulate,
    simulate_noisy, summarize, write_csv, write_json, BenchConfig, Circuit, CircuitBuilder,
    EnergyModel, GateKind, SimConfig,
};
use proptest::prelude::*;

const KINDS: [GateKind; 9] = [
    GateKind::And,
    GateKind::Nand,
    GateKind::Or,
    GateKind::Nor,
    GateKind::Xor,
    GateKind::Xnor,
    GateKind::Not,
    GateKind::Buf,
    GateKind::Maj3,
];

/// Random DAG: each gate draws its kind and operands from `picks`.
fn build(n: usize, picks: &[(usize, Vec<usize>)]) -> Circuit {
    let mut b = CircuitBuilder::new("rand");
    let mut nets: Vec<String> = (0..n).map(|i| format!("i{i}")).collect();
    for name in &nets {
        b.input(name.clone());
    }
    for (g, (kind, ops)) in picks.iter().enumerate() {
        let kind = KINDS[kind % KINDS.len()];
        let arity = match kind {
            GateKind::Not | GateKind::Buf => 1,
            GateKind::Maj3 => 3,
            _ => 2 + ops[0] % 3,
        };
        let operands: Vec<String> = (0..arity)
            .map(|j| nets[ops[j + 1] % nets.len()].clone())
            .collect();
        let name = format!("g{g}");
        b.gate(name.clone(), kind, operands);
        nets.push(name);
    }
    let last = picks.len() - 1;
    b.output(format!("g{last}"));
    if last > 0 {
        b.output(format!("g{}", last / 2));
    }
    b.build().unwrap()
}

fn circuit() -> impl Strategy<Value = Circuit> {
    (
        2usize..9,
        prop::collection::vec((0usize..9, prop::collection::vec(0usize..64, 5)), 1..14),
    )
        .prop_map(|(n, picks)| build(n, &picks))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bench_text_round_trips(c in circuit()) {
        let text = emit_bench(&c);
        let back = parse_bench(&text).unwrap();
        prop_assert!(back.structurally_eq(&c));
        prop_assert_eq!(emit_bench(&back), text);
    }

    #[test]
    fn word_simulation_matches_interpreter(c in circuit(), seed in any::<u64>()) {
        let (traces, _) = simulate(&c, &SimConfig::new(130, seed)).unwrap();
        for v in 0..130 {
            let inputs: Vec<bool> = c.inputs().iter().map(|i| traces[i.0].get(v)).collect();
            let outs = c.eval(&inputs);
            for (o, id) in c.outputs().iter().enumerate() {
                prop_assert_eq!(traces[id.0].get(v), outs[o]);
            }
        }
    }

    #[test]
    fn sampled_never_exceeds_exact(c in circuit(), seed in any::<u64>(), samples in 1usize..64) {
        let exact = sensitivity_exact(&c).unwrap();
        let sampled = sensitivity_sampled(&c, samples, seed).unwrap();
        prop_assert!(sampled.value <= exact.value);
        prop_assert!(exact.value <= c.inputs().len());
    }

    #[test]
    fn nmr_preserves_function(c in circuit(), copies in prop::sample::select(vec![3usize, 5])) {
        let t = nmr_transform(&c, copies).unwrap();
        for x in 0u64..1 << c.inputs().len() {
            prop_assert_eq!(t.eval_u64(x), c.eval_u64(x));
        }
        prop_assert_eq!(sensitivity_exact(&t).unwrap().value, sensitivity_exact(&c).unwrap().value);
    }

    #[test]
    fn noise_free_simulation_has_no_errors(c in circuit(), seed in any::<u64>()) {
        let r = simulate_noisy(&c, &SimConfig::new(500, seed)).unwrap();
        prop_assert_eq!(r.output_error_delta, 0.0);
        prop_assert_eq!(r.activity, r.golden_activity);
    }
}

#[test]
fn measured_summary_feeds_bounds() {
    let c = gen_parity(16, 2).unwrap();
    let (_, act) = simulate(&c, &SimConfig::default()).unwrap();
    let s = summarize(&c, &act, &sensitivity_exact(&c).unwrap()).unwrap();
    let e = total_energy_ratio_lb(&s, 0.01, 0.01, &EnergyModel::default()).unwrap();
    assert!((e - 1.41575557864101).abs() < 0.01, "{e}");
}

#[test]
fn noisy_activity_tracks_channel_prediction_on_shallow_circuit() {
    let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(x)\nOUTPUT(y)\nx = AND(a, b)\ny = OR(a, b)")
        .unwrap();
    for eps in [0.05, 0.2] {
        let r = simulate_noisy(&c, &SimConfig::new(200_000, 4).with_epsilon(eps)).unwrap();
        assert!(
            r.channel_gap.abs() < 0.006,
            "eps {eps}: gap {}",
            r.channel_gap
        );
        assert_eq!(r.predicted_avg_sw, noisy_sw(r.golden_activity.avg_sw, eps));
    }
}

#[test]
fn bench_table_round_trips_through_both_formats() {
    let circuits = [
        gen_parity(16, 2).unwrap(),
        gen_ripple_adder(4).unwrap(),
        gen_array_multiplier(3).unwrap(),
    ];
    let cfg = BenchConfig {
        sim: SimConfig::new(20_000, 9),
        ..BenchConfig::default()
    };
    let table = run_bench(&circuits, &cfg).unwrap();
    let records = table.records();
    assert_eq!(read_csv(&write_csv(&table)).unwrap(), records);
    let json: Vec<_> = read_json(&write_json(&table))
        .unwrap()
        .rows
        .into_iter()
        .map(|r| r.values)
        .collect();
    assert_eq!(json, records);
    assert_eq!(run_bench(&circuits, &cfg).unwrap(), table);
}

#[test]
fn bench_is_independent_of_thread_count() {
    let circuits = [gen_parity(16, 2).unwrap(), gen_array_multiplier(3).unwrap()];
    let cfg = BenchConfig {
        sim: SimConfig::new(30_000, 3),
        ..BenchConfig::default()
    };
    let pool = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
    };
    let one = pool(1).install(|| write_csv(&run_bench(&circuits, &cfg).unwrap()));
    let many = pool(6).install(|| write_csv(&run_bench(&circuits, &cfg).unwrap()));
    assert_eq!(one, many);
}
