// SPDX-License-Identifier: Apache-2.0

//! Fixture circuits shared by the benchmarks.

use faultbound_core::{gen_array_multiplier, gen_parity, gen_ripple_adder, nmr_transform, Circuit};

/// The standard trio: 16-input parity, 4-bit adder, 3-bit multiplier.
pub fn standard_circuits() -> Vec<Circuit> {
    vec![
        gen_parity(16, 2).expect("valid parameters"),
        gen_ripple_adder(4).expect("valid parameters"),
        gen_array_multiplier(3).expect("valid parameters"),
    ]
}

/// A larger circuit for throughput measurements.
pub fn wide_multiplier() -> Circuit {
    gen_array_multiplier(8).expect("valid parameters")
}

pub fn triplicated_parity() -> Circuit {
    nmr_transform(&gen_parity(16, 2).expect("valid parameters"), 3).expect("odd copy count")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let sizes: Vec<usize> = standard_circuits()
            .iter()
            .map(|c| c.inputs().len())
            .collect();
        assert_eq!(sizes, [16, 9, 6]);
        assert_eq!(wide_multiplier().outputs().len(), 16);
        assert_eq!(triplicated_parity().gates().len(), 46);
    }
}
