//! Workloads shared by the criterion benches.

use bmv_core::bit_antibit::run_bit_antibit_protocol_with;
use bmv_core::fermion_ssr::{count_scaling_check, decomposability_check, run_fermion_protocol};
use bmv_core::ising_anyon::run_anyon_protocol;

pub fn fermion_run() -> f64 {
    run_fermion_protocol().unwrap().final_matter.norm()
}

pub fn anyon_run() -> f64 {
    run_anyon_protocol().unwrap().final_matter.norm()
}

pub fn bit_antibit_run(mediator_bits: usize) -> f64 {
    run_bit_antibit_protocol_with(mediator_bits)
        .unwrap()
        .trace
        .final_matter
        .norm()
}

/// Counts physical observables for every `k <= k_max`.
pub fn observable_counts(k_max: usize) -> usize {
    count_scaling_check(k_max)
        .unwrap()
        .iter()
        .map(|r| r.count)
        .sum()
}

pub fn span_residual() -> f64 {
    decomposability_check().residual
}
