//! Numbered acceptance criteria. Each prints one PASS/FAIL line; values are
//! checked against oracles built here rather than library helpers.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use bmv_core::bit_antibit;
use bmv_core::fermion_ssr as fermion;
use bmv_core::ising_anyon::{self as anyon, Charge, PartitionShape, SectorLabel};
use bmv_core::statecore::{c, re, OperatorMatrix, StateVector, ZERO};
use bmv_core::verify;
use common::{jw_annihilator, jw_creator, schmidt_rank};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const EPS: f64 = 1e-10;

type Outcome = Result<(), String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn close(a: f64, b: f64, what: &str) -> Outcome {
    ensure((a - b).abs() <= EPS, || format!("{what}: {a} vs {b}"))
}

fn close_m(a: &OperatorMatrix, b: &OperatorMatrix, what: &str) -> Outcome {
    ensure(a.dim() == b.dim() && a.max_abs_diff(b) <= EPS, || {
        format!("{what}: {a:?} vs {b:?}")
    })
}

// Fermion oracle: build everything from Jordan-Wigner matrices.

fn jw_swap(n: usize, i: usize, j: usize) -> OperatorMatrix {
    let (fi, fj) = (jw_annihilator(n, i), jw_annihilator(n, j));
    let (ni, nj) = (&fi.adjoint() * &fi, &fj.adjoint() * &fj);
    let hop = &(&fi.adjoint() * &fj) + &(&fj.adjoint() * &fi);
    &(&(&OperatorMatrix::identity(1 << n) - &ni) - &nj) + &hop
}

fn jw_vacuum(n: usize) -> StateVector {
    StateVector::basis(1 << n, 0)
}

fn jw_create(n: usize, factors: &[&[usize]]) -> StateVector {
    let mut v = jw_vacuum(n);
    for modes in factors.iter().rev() {
        let mut op = OperatorMatrix::zeros(1 << n);
        for &m in *modes {
            op = &op + &jw_creator(n, m);
        }
        v = op.apply(&v);
    }
    v
}

struct FermionOracle {
    mediator_occupation: Vec<f64>,
    final_matter: StateVector,
}

fn fermion_oracle() -> FermionOracle {
    let n = 5;
    let mut psi = jw_create(n, &[&[1, 2], &[3], &[4, 5]]).scale(re(0.5));
    let n3 = &jw_creator(n, 3) * &jw_annihilator(n, 3);
    let mut occ = vec![n3.expectation(&psi).re];
    for (i, j) in [(2, 3), (3, 4), (2, 3)] {
        psi = jw_swap(n, i, j).apply(&psi);
        occ.push(n3.expectation(&psi).re);
    }
    // mode 3 is occupied at the end; drop it, carrying the sign of the modes after it
    let mut matter = StateVector::zeros(16);
    for idx in 0..32usize {
        let bits: Vec<usize> = (0..5).map(|k| (idx >> (4 - k)) & 1).collect();
        if bits[2] != 1 {
            continue;
        }
        let sign = if (bits[3] + bits[4]) % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let m = (bits[0] << 3) | (bits[1] << 2) | (bits[3] << 1) | bits[4];
        matter[m] += psi[idx] * sign;
    }
    FermionOracle {
        mediator_occupation: occ,
        final_matter: matter,
    }
}

fn ordinary_trace_last_two(rho: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::from_fn(4, |i, j| (0..4).map(|k| rho[(i * 4 + k, j * 4 + k)]).sum())
}

fn ordinary_trace_first_two(rho: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::from_fn(4, |i, j| (0..4).map(|k| rho[(k * 4 + i, k * 4 + j)]).sum())
}

fn criterion_1() -> Outcome {
    let trace = fermion::run_fermion_protocol().map_err(|e| e.to_string())?;
    let oracle = fermion_oracle();
    let expected = jw_create(4, &[&[1, 3], &[2, 4]]).scale(re(0.5));
    close_m(
        &oracle.final_matter.dyad(),
        &expected.dyad(),
        "oracle final matter",
    )?;
    close_m(&trace.final_matter.dyad(), &expected.dyad(), "final matter")?;

    let x1 =
        &(&jw_creator(4, 1) * &jw_annihilator(4, 2)) + &(&jw_creator(4, 2) * &jw_annihilator(4, 1));
    let x2 =
        &(&jw_creator(4, 3) * &jw_annihilator(4, 4)) + &(&jw_creator(4, 4) * &jw_annihilator(4, 3));
    close(x1.expectation(&expected).re, 0.0, "<X1>")?;
    close(x2.expectation(&expected).re, 0.0, "<X2>")?;
    close((&x1 * &x2).expectation(&expected).re, -0.5, "<X1 X2>")?;
    let k = &trace.key_correlation;
    close(k.mean_a, 0.0, "library <X1>")?;
    close(k.mean_b, 0.0, "library <X2>")?;
    close(k.joint, -0.5, "library <X1 X2>")
}

fn criterion_2() -> Outcome {
    let trace = fermion::run_fermion_protocol().map_err(|e| e.to_string())?;
    let oracle = fermion_oracle();
    let want = [1.0, 0.5, 0.5, 1.0];
    ensure(trace.steps.len() == 4, || "four recorded stages".into())?;
    for (i, step) in trace.steps.iter().enumerate() {
        close(oracle.mediator_occupation[i], want[i], "oracle occupation")?;
        let diag = OperatorMatrix::from_real_diag(&[1.0 - want[i], want[i]]);
        close_m(&step.mediator, &diag, &format!("mediator at stage {i}"))?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let trace = fermion::run_fermion_protocol().map_err(|e| e.to_string())?;
    let quarter = OperatorMatrix::from_real_diag(&[0.25; 4]);
    // parity-even pure state: ordinary and signed traces agree
    let rho = fermion_oracle().final_matter.dyad();
    close_m(&ordinary_trace_last_two(&rho), &quarter, "oracle rho_Q1")?;
    close_m(&ordinary_trace_first_two(&rho), &quarter, "oracle rho_Q2")?;
    close_m(&trace.marginals[0], &quarter, "rho_Q1")?;
    close_m(&trace.marginals[1], &quarter, "rho_Q2")
}

fn criterion_4() -> Outcome {
    for row in fermion::count_scaling_check(4).map_err(|e| e.to_string())? {
        // parity-even Hermitian operators: two Hermitian blocks of size 2^{k-1}
        let blocks = 2 * (1usize << (row.k - 1)).pow(2);
        ensure(
            row.count == blocks && row.count == [2, 8, 32, 128][row.k - 1],
            || format!("k = {}: count {} vs {blocks}", row.k, row.count),
        )?;
    }
    let parity = OperatorMatrix::from_fn(16, |i, j| {
        if i == j {
            re(if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            ZERO
        }
    });
    let a = fermion::enumerate_physical_observables(4, &[1, 2]).map_err(|e| e.to_string())?;
    let b = fermion::enumerate_physical_observables(4, &[3, 4]).map_err(|e| e.to_string())?;
    for x in a.matrices.iter().chain(&b.matrices) {
        ensure(x.commutator(&parity).frobenius_norm() <= EPS, || {
            "observable breaks parity".into()
        })?;
    }
    for x in &a.matrices {
        for y in &b.matrices {
            let norm = x.commutator(y).frobenius_norm();
            ensure(norm <= EPS, || format!("cross-sector commutator {norm}"))?;
        }
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let target =
        &(&jw_annihilator(5, 2) * &jw_annihilator(5, 3)) + &(&jw_creator(5, 3) * &jw_creator(5, 2));
    // local parity-even observables on a single mode are diagonal, so the
    // residual is the full norm whenever the target has an empty diagonal
    ensure(target.is_hermitian(EPS), || "target Hermitian".into())?;
    ensure((0..32).all(|i| target[(i, i)].norm() == 0.0), || {
        "target diagonal".into()
    })?;
    let oracle_residual = target.frobenius_norm();
    close(
        oracle_residual,
        verify::DECOMPOSABILITY_RESIDUAL,
        "oracle residual",
    )?;
    close_m(
        &fermion::pairing_interaction(),
        &target,
        "pairing interaction",
    )?;
    let span = fermion::decomposability_check();
    ensure(!span.decomposable, || "decomposable".into())?;
    ensure(span.residual > 0.1, || {
        format!("residual {}", span.residual)
    })?;
    close(span.residual, oracle_residual, "residual")
}

fn criterion_6() -> Outcome {
    use PartitionShape::*;
    let h = 1.0 / 2f64.sqrt();
    let lr = OperatorMatrix::from_real_rows(&[&[h, h], &[h, -h]]);
    let cr = OperatorMatrix::from_rows(&[vec![re(h), re(h)], vec![c(0.0, -h), c(0.0, h)]]).unwrap();
    close_m(&anyon::partition_matrix(Left, Right), &lr, "P L->R")?;
    close_m(&anyon::partition_matrix(Center, Right), &cr, "P C->R")?;
    let id = OperatorMatrix::identity(2);
    for a in PartitionShape::ALL {
        for b in PartitionShape::ALL {
            let pair = &anyon::partition_matrix(b, a) * &anyon::partition_matrix(a, b);
            close_m(&pair, &id, &format!("{a:?}->{b:?}->{a:?}"))?;
            for m in PartitionShape::ALL {
                let lp = &anyon::partition_matrix(m, a)
                    * &(&anyon::partition_matrix(b, m) * &anyon::partition_matrix(a, b));
                close_m(&lp, &id, &format!("{a:?}->{b:?}->{m:?}->{a:?}"))?;
            }
        }
    }
    Ok(())
}

fn sector(shape: PartitionShape, terms: &[((u8, u8, u8), (f64, f64))]) -> anyon::AnyonState {
    let terms: Vec<_> = terms
        .iter()
        .map(|&((x1, x2, t), (a, b))| {
            (
                SectorLabel::new(x1, x2, Charge::from_value(t).unwrap()).unwrap(),
                c(a, b),
            )
        })
        .collect();
    anyon::AnyonState::from_terms(shape, &terms).unwrap()
}

fn amplitudes_match(got: &anyon::AnyonState, want: &anyon::AnyonState, what: &str) -> Outcome {
    ensure(got.shape() == want.shape(), || format!("{what}: shape"))?;
    for l in SectorLabel::all() {
        let d = (got.amplitude(l) - want.amplitude(l)).norm();
        ensure(d <= EPS, || format!("{what}: amplitude {l} off by {d}"))?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    use PartitionShape::*;
    let run = anyon::run_anyon_protocol_detailed().map_err(|e| e.to_string())?;
    let h = 1.0 / 2f64.sqrt();
    let cp = &run.checkpoints;
    amplitudes_match(
        &cp[1].right,
        &sector(
            Right,
            &[
                ((1, 1, 0), (0.5, 0.0)),
                ((1, 1, 2), (0.5, 0.0)),
                ((1, 0, 0), (0.5, 0.0)),
                ((1, 0, 2), (-0.5, 0.0)),
            ],
        ),
        "U psi0 in right shape",
    )?;
    amplitudes_match(
        &cp[1].left,
        &sector(Left, &[((1, 1, 0), (h, 0.0)), ((1, 0, 2), (h, 0.0))]),
        "U psi0 in left shape",
    )?;
    amplitudes_match(
        &cp[2].left,
        &sector(Left, &[((1, 1, 0), (h, 0.0)), ((0, 0, 2), (h, 0.0))]),
        "V U psi0 in left shape",
    )?;
    amplitudes_match(
        &cp[3].right,
        &sector(
            Right,
            &[
                ((1, 1, 0), (0.5, 0.0)),
                ((1, 1, 2), (0.0, -0.5)),
                ((0, 0, 0), (0.5, 0.0)),
                ((0, 0, 2), (0.0, -0.5)),
            ],
        ),
        "W V U psi0 in right shape",
    )?;
    amplitudes_match(
        &cp[3].center,
        &sector(Center, &[((1, 1, 0), (h, 0.0)), ((0, 0, 0), (h, 0.0))]),
        "final state",
    )?;

    // |eta> = (|00> + |11>)/sqrt2 in the encoded qubits, t = 0
    let mut eta = StateVector::zeros(8);
    eta[SectorLabel::new(1, 1, Charge::Vacuum).unwrap().index()] = re(h);
    eta[SectorLabel::new(0, 0, Charge::Vacuum).unwrap().index()] = re(h);
    close_m(&run.trace.final_matter.dyad(), &eta.dyad(), "final matter")?;
    let flip1 = OperatorMatrix::from_fn(8, |i, j| {
        let (a, b) = (SectorLabel::from_index(i), SectorLabel::from_index(j));
        re(
            if a.x1 != b.x1 && a.x2 == b.x2 && a.internal == b.internal {
                1.0
            } else {
                0.0
            },
        )
    });
    let flip2 = OperatorMatrix::from_fn(8, |i, j| {
        let (a, b) = (SectorLabel::from_index(i), SectorLabel::from_index(j));
        re(
            if a.x1 == b.x1 && a.x2 != b.x2 && a.internal == b.internal {
                1.0
            } else {
                0.0
            },
        )
    });
    close(flip1.expectation(&eta).re, 0.0, "<X1>")?;
    close(flip2.expectation(&eta).re, 0.0, "<X2>")?;
    close((&flip1 * &flip2).expectation(&eta).re, 1.0, "<X1 X2>")?;
    let k = &run.trace.key_correlation;
    close(k.mean_a, 0.0, "library <X1>")?;
    close(k.mean_b, 0.0, "library <X2>")?;
    close(k.joint, 1.0, "library <X1 X2>")
}

fn criterion_8() -> Outcome {
    let run = anyon::run_anyon_protocol_detailed().map_err(|e| e.to_string())?;
    let one = OperatorMatrix::from_real_diag(&[0.0, 1.0, 0.0]);
    ensure(run.checkpoints.len() == 4, || "four checkpoints".into())?;
    for cp in &run.checkpoints {
        close(cp.mediator_purity, 1.0, &format!("purity at {}", cp.label))?;
        close(
            (&cp.mediator * &cp.mediator).trace().re,
            1.0,
            &format!("Tr rho^2 at {}", cp.label),
        )?;
        close_m(&cp.mediator, &one, &format!("mediator at {}", cp.label))?;
    }
    Ok(())
}

/// Classical bookkeeping of the swap protocol: basis labels are slot arrays.
fn bit_oracle(k: usize) -> (StateVector, StateVector) {
    let len = k + 4;
    let mut full = StateVector::zeros(1 << len);
    let mut matter = StateVector::zeros(16);
    for a1 in 0..2usize {
        for a2 in 0..2usize {
            let mut slots = vec![0usize; len];
            slots[0] = a1;
            slots[1] = a1;
            slots[len - 2] = a2;
            slots[len - 1] = a2;
            for (i, j) in bit_antibit::swap_chain(k) {
                slots.swap(i, j);
            }
            let idx = slots.iter().fold(0, |acc, &b| (acc << 1) | b);
            full[idx] = re(0.5);
            assert!(slots[2..len - 2].iter().all(|&b| b == 0));
            let m = (slots[0] << 3) | (slots[1] << 2) | (slots[len - 2] << 1) | slots[len - 1];
            matter[m] = re(0.5);
        }
    }
    (full, matter)
}

fn criterion_9() -> Outcome {
    let mut eq_q = StateVector::zeros(16);
    for idx in [0b0000, 0b1010, 0b0101, 0b1111] {
        eq_q[idx] = re(0.5);
    }
    for k in [2, 3, 4] {
        let run = bit_antibit::run_bit_antibit_protocol_with(k).map_err(|e| e.to_string())?;
        let t = &run.trace;
        let (full, matter) = bit_oracle(k);
        close_m(&matter.dyad(), &eq_q.dyad(), "oracle matter")?;
        ensure(t.final_step().state.distance(&full) <= EPS, || {
            format!("k = {k}: final full state")
        })?;
        close_m(
            &t.final_matter.dyad(),
            &eq_q.dyad(),
            &format!("k = {k}: final matter"),
        )?;
        ensure(run.certificates.iter().all(Option::is_some), || {
            format!("k = {k}: disallowed step")
        })?;
        let dim = 1 << k;
        let zero =
            OperatorMatrix::from_fn(dim, |i, j| re(if i == 0 && j == 0 { 1.0 } else { 0.0 }));
        close_m(&t.steps[0].mediator, &zero, "mediator start")?;
        close_m(&t.final_step().mediator, &zero, "mediator end")?;
    }
    let flip = OperatorMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 0.0],
        &[1.0, 0.0, 0.0, 0.0],
    ]);
    let id = OperatorMatrix::identity(4);
    let x1 = bmv_core::tensor(&flip, &id);
    let x2 = bmv_core::tensor(&id, &flip);
    close(
        x1.expectation(&eq_q).re * x2.expectation(&eq_q).re,
        0.0,
        "<X1><X2>",
    )?;
    close((&x1 * &x2).expectation(&eq_q).re, 0.5, "<X1 X2>")?;
    let t = bit_antibit::run_bit_antibit_protocol().map_err(|e| e.to_string())?;
    close(
        t.key_correlation.product_of_means(),
        0.0,
        "library <X1><X2>",
    )?;
    close(t.key_correlation.joint, 0.5, "library <X1 X2>")?;
    let quarter = OperatorMatrix::from_real_diag(&[0.25; 4]);
    close_m(&t.marginals[0], &quarter, "rho_Q1")?;
    close_m(&t.marginals[1], &quarter, "rho_Q2")
}

fn criterion_10() -> Outcome {
    let traces = [
        fermion::run_fermion_protocol(),
        anyon::run_anyon_protocol(),
        bit_antibit::run_bit_antibit_protocol(),
    ];
    for t in traces {
        let t = t.map_err(|e| e.to_string())?;
        let name = t.model.name();
        ensure(t.initial_report.uncorrelated, || {
            format!("{name}: initial not uncorrelated")
        })?;
        ensure(t.final_report.entangled, || {
            format!("{name}: final not entangled")
        })?;
        if name == "bitantibit" {
            let r0 = schmidt_rank(&t.initial_matter, 4);
            let r1 = schmidt_rank(&t.final_matter, 4);
            // maximally mixed 4-dim marginals force full rank
            ensure(r0 == 1 && r1 == 4, || format!("Schmidt ranks {r0}, {r1}"))?;
            ensure((r0 == 1) == t.initial_report.uncorrelated, || {
                "initial verdict vs rank".into()
            })?;
            ensure((r1 > 1) == t.final_report.entangled, || {
                "final verdict vs rank".into()
            })?;
        }
    }
    Ok(())
}

fn criterion_11() -> Outcome {
    let config = Config {
        cases: 100,
        failure_persistence: None,
        ..Config::default()
    };
    let runner = || {
        TestRunner::new_with_rng(
            config.clone(),
            TestRng::deterministic_rng(RngAlgorithm::ChaCha),
        )
    };

    runner()
        .run(
            &(common::small_operator(), common::small_operator()),
            |(a, b)| {
                let prod = bmv_core::tensor(&a, &b);
                let reduced = bmv_core::partial_trace(&prod, &[a.dim(), b.dim()], &[0]).unwrap();
                proptest::prop_assert!(reduced.max_abs_diff(&a.scale(b.trace())) <= 1e-9);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;
    runner()
        .run(
            &(
                common::small_operator(),
                common::small_operator(),
                common::small_operator(),
            ),
            |(a, b, d)| {
                let l = bmv_core::tensor(&bmv_core::tensor(&a, &b), &d);
                let r = bmv_core::tensor(&a, &bmv_core::tensor(&b, &d));
                proptest::prop_assert!(l.max_abs_diff(&r) <= EPS);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;
    runner()
        .run(
            &(common::unit_vector(8), 0usize..3, 0usize..3),
            |(v, a, b)| {
                let mut amps = [ZERO; 8];
                amps.copy_from_slice(v.amplitudes());
                let s = anyon::AnyonState::new(PartitionShape::ALL[a], amps).unwrap();
                let moved = anyon::change_partition(&s, PartitionShape::ALL[b]);
                proptest::prop_assert!((moved.to_vector().norm() - 1.0).abs() <= EPS);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())?;

    for n in 1..=5 {
        let id = OperatorMatrix::identity(1 << n);
        for i in 1..=n {
            for j in 1..=n {
                let fi = fermion::annihilator_matrix(n, i).map_err(|e| e.to_string())?;
                let fj = fermion::annihilator_matrix(n, j).map_err(|e| e.to_string())?;
                let want = if i == j {
                    id.clone()
                } else {
                    OperatorMatrix::zeros(1 << n)
                };
                close_m(&fi.anticommutator(&fj.adjoint()), &want, "{f_i, f_j^dag}")?;
                close(fi.anticommutator(&fj).frobenius_norm(), 0.0, "{f_i, f_j}")?;
                close_m(&fi, &jw_annihilator(n, i), "Jordan-Wigner agreement")?;
                if i < j {
                    let s = fermion::fermionic_swap(n, i, j).map_err(|e| e.to_string())?;
                    ensure(s.is_unitary(EPS), || "swap unitary".into())?;
                    close_m(&(&s * &s), &id, "swap self-inverse")?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("fermionic correlations", criterion_1),
        ("fermionic mediator sequence", criterion_2),
        ("fermionic marginals", criterion_3),
        ("observable counting and microcausality", criterion_4),
        ("non-decomposability", criterion_5),
        ("anyon recoupling", criterion_6),
        ("anyon protocol", criterion_7),
        ("anyon mediator purity", criterion_8),
        ("bit/anti-bit protocol", criterion_9),
        ("witness coherence", criterion_10),
        ("property suites", criterion_11),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(()) => println!("criterion {:>2} PASS  {title}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.2?}",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
