mod common;

use bmv_core::ising_anyon::*;
use bmv_core::statecore::{OperatorMatrix, ZERO};
use common::{unit_vector, unitary};
use proptest::prelude::*;

const EPS: f64 = 1e-10;

fn shape() -> impl Strategy<Value = PartitionShape> {
    (0usize..3).prop_map(|k| PartitionShape::ALL[k])
}

fn state() -> impl Strategy<Value = AnyonState> {
    (unit_vector(SECTOR_DIM), shape()).prop_map(|(v, s)| {
        let mut amps = [ZERO; SECTOR_DIM];
        amps.copy_from_slice(v.amplitudes());
        AnyonState::new(s, amps).unwrap()
    })
}

fn unitaries() -> [EmbeddedUnitary; 3] {
    [
        EmbeddedUnitary::UMQ2,
        EmbeddedUnitary::VQ1M,
        EmbeddedUnitary::WMQ2,
    ]
}

/// Matter map acting on `(x1, x2)` separately in each `t` block.
fn block_matter_map(u0: &OperatorMatrix, u2: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::from_fn(SECTOR_DIM, |i, j| {
        if i % 2 != j % 2 {
            return ZERO;
        }
        let u = if i % 2 == 0 { u0 } else { u2 };
        u[(i / 2, j / 2)]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partition_changes_preserve_norm(s in state(), to in shape()) {
        let moved = change_partition(&s, to);
        prop_assert_eq!(moved.shape(), to);
        prop_assert!((moved.to_vector().norm() - 1.0).abs() <= EPS);
    }

    #[test]
    fn closed_loops_return_the_state(s in state(), a in shape(), b in shape()) {
        let back = change_partition(&change_partition(&change_partition(&s, a), b), s.shape());
        prop_assert!(back.approx_eq(&s, EPS));
    }

    #[test]
    fn partition_changes_keep_label_distributions(s in state(), to in shape()) {
        let moved = change_partition(&s, to);
        for (p, q) in s.q1_distribution().iter().zip(moved.q1_distribution()) {
            prop_assert!((p - q).abs() <= EPS);
        }
        for (p, q) in s.q2_distribution().iter().zip(moved.q2_distribution()) {
            prop_assert!((p - q).abs() <= EPS);
        }
    }

    #[test]
    fn embedded_unitaries_preserve_norm_and_shape(s in state()) {
        for u in unitaries() {
            let out = u.apply(&s);
            prop_assert_eq!(out.shape(), s.shape());
            prop_assert!((out.to_vector().norm() - 1.0).abs() <= EPS);
        }
    }

    #[test]
    fn untouched_system_keeps_its_labels(s in state()) {
        let v = EmbeddedUnitary::VQ1M.apply(&s);
        for (p, q) in s.q2_distribution().iter().zip(v.q2_distribution()) {
            prop_assert!((p - q).abs() <= EPS);
        }
        for u in [EmbeddedUnitary::UMQ2, EmbeddedUnitary::WMQ2] {
            let out = u.apply(&s);
            for (p, q) in s.q1_distribution().iter().zip(out.q1_distribution()) {
                prop_assert!((p - q).abs() <= EPS);
            }
        }
    }

    #[test]
    fn mediator_trace_commutes_with_matter_maps(
        s in state(),
        u0 in unitary(4),
        u2 in unitary(4),
    ) {
        let m = block_matter_map(&u0, &u2);
        let center = change_partition(&s, PartitionShape::Center);
        let v = m.apply(&center.to_vector());
        let mut amps = [ZERO; SECTOR_DIM];
        amps.copy_from_slice(v.amplitudes());
        let moved = AnyonState::new(PartitionShape::Center, amps).unwrap();
        let lhs = trace_mediator(&moved);
        let rhs = &(&m * &trace_mediator(&s)) * &m.adjoint();
        prop_assert!(lhs.approx_eq(&rhs, 1e-9));
    }

    #[test]
    fn mediator_is_always_the_sigma_charge(s in state()) {
        let rho = trace_matter_to_mediator(&s);
        prop_assert!((rho[(1, 1)].re - 1.0).abs() <= EPS);
        prop_assert!((rho.trace().re - 1.0).abs() <= EPS);
    }
}

#[test]
fn partition_matrices_are_unitary() {
    for a in PartitionShape::ALL {
        for b in PartitionShape::ALL {
            assert!(partition_matrix(a, b).is_unitary(EPS));
        }
    }
}

#[test]
fn local_x_and_z_anticommute_as_qubit_operators() {
    for q in [1, 2] {
        let comm = embedded_x(q).commutator(&embedded_z(q));
        assert!(comm.frobenius_norm() > 0.1);
    }
    let q1 = matter_observable_set(1);
    let q2 = matter_observable_set(2);
    q1.validate_against(&q2, EPS).unwrap();
}

#[test]
fn states_refuse_unnormalized_amplitudes() {
    let mut amps = [ZERO; SECTOR_DIM];
    amps[0] = bmv_core::statecore::re(2.0);
    assert!(AnyonState::new(PartitionShape::Center, amps).is_err());
}
