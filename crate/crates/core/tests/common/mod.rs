#![allow(dead_code)]

use bmv_core::statecore::{c, ComplexScalar, OperatorMatrix, StateVector};
use nalgebra::DMatrix;
use proptest::collection::vec;
use proptest::prelude::*;

pub fn complex() -> impl Strategy<Value = ComplexScalar> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b))
}

pub fn operator(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    vec(complex(), dim * dim).prop_map(move |v| OperatorMatrix::from_fn(dim, |i, j| v[i * dim + j]))
}

pub fn hermitian(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    operator(dim).prop_map(|m| &m + &m.adjoint())
}

/// Any operator of dimension 1 to 4.
pub fn small_operator() -> impl Strategy<Value = OperatorMatrix> {
    (1usize..=4).prop_flat_map(operator)
}

pub fn unit_vector(dim: usize) -> impl Strategy<Value = StateVector> {
    vec(complex(), dim)
        .prop_filter("nonzero", |v| {
            v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3
        })
        .prop_map(|v| StateVector::from_amplitudes(v).normalized().unwrap())
}

/// Haar-ish unitary from the QR factor of a random complex matrix.
pub fn unitary(dim: usize) -> impl Strategy<Value = OperatorMatrix> {
    operator(dim)
        .prop_filter("invertible", |m| {
            let d = DMatrix::from_fn(m.dim(), m.dim(), |i, j| m[(i, j)]);
            d.determinant().norm() > 1e-3
        })
        .prop_map(|m| {
            let d = DMatrix::from_fn(m.dim(), m.dim(), |i, j| m[(i, j)]);
            let q = d.qr().q();
            OperatorMatrix::from_fn(m.dim(), |i, j| q[(i, j)])
        })
}

/// Singular values of `ψ` reshaped row-major to `dim_a × dim_b`.
pub fn singular_values(state: &StateVector, dim_a: usize) -> Vec<f64> {
    let dim_b = state.dim() / dim_a;
    let m = DMatrix::from_fn(dim_a, dim_b, |i, j| state.amplitudes()[i * dim_b + j]);
    m.svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

pub fn schmidt_rank(state: &StateVector, dim_a: usize) -> usize {
    singular_values(state, dim_a)
        .into_iter()
        .filter(|&s| s > 1e-9)
        .count()
}

/// Jordan-Wigner annihilator on `n` modes, mode 1 most significant.
pub fn jw_annihilator(n: usize, j: usize) -> OperatorMatrix {
    let z = OperatorMatrix::from_real_diag(&[1.0, -1.0]);
    let lower = OperatorMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let id = OperatorMatrix::identity(2);
    let factors: Vec<&OperatorMatrix> = (1..=n)
        .map(|k| {
            if k < j {
                &z
            } else if k == j {
                &lower
            } else {
                &id
            }
        })
        .collect();
    bmv_core::statecore::tensor_all(factors)
}

pub fn jw_creator(n: usize, j: usize) -> OperatorMatrix {
    jw_annihilator(n, j).adjoint()
}
