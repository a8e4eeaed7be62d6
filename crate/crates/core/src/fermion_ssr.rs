//! Spinless fermionic modes under the parity superselection rule.
//!
//! Basis convention: the occupation vector `(s_1, ..., s_n)` labels the state
//! `f_1†^{s_1} ... f_n†^{s_n} |0>` and sits at index `Σ s_j 2^{n-j}`, so mode 1
//! is the most significant bit. With this ordering the annihilator `f_j` picks
//! up the sign `(-1)^{Σ_{k<j} s_k}` and the signed partial trace is literal.

use crate::error::{Error, Result};
use crate::statecore::{
    in_span, re, ComplexScalar, OperatorMatrix, OrthoBasis, SpanTest, StateVector, ONE, ZERO,
};
use crate::witness::{
    pure_state_from_density, uncorrelated_test, Composition, Correlation, LocalObservableSet,
    ModelTag, ProtocolStep, ProtocolTrace,
};

/// Occupation-number basis vector over `n` modes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FockState {
    occupations: Vec<bool>,
}

impl FockState {
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            occupations: vec![false; n_modes],
        }
    }

    pub fn from_occupations(occupations: Vec<bool>) -> Self {
        Self { occupations }
    }

    pub fn from_index(n_modes: usize, index: usize) -> Self {
        Self {
            occupations: (1..=n_modes)
                .map(|j| (index >> (n_modes - j)) & 1 == 1)
                .collect(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.occupations.len()
    }

    /// Occupation of mode `j` (1-based).
    pub fn occupied(&self, j: usize) -> bool {
        self.occupations[j - 1]
    }

    pub fn occupations(&self) -> &[bool] {
        &self.occupations
    }

    pub fn index(&self) -> usize {
        self.occupations
            .iter()
            .fold(0, |acc, &s| (acc << 1) | usize::from(s))
    }

    /// Occupied modes in ascending order, i.e. the creation word of this state.
    pub fn occupied_modes(&self) -> Vec<usize> {
        (1..=self.n_modes()).filter(|&j| self.occupied(j)).collect()
    }

    pub fn particle_number(&self) -> usize {
        self.occupations.iter().filter(|&&s| s).count()
    }
}

/// A single creation (`dagger = true`) or annihilation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }
}

/// Brings a creation word `f_{a_1}† ... f_{a_k}† |0>` to mode order by
/// adjacent transpositions. Returns the accumulated sign and the resulting
/// occupations, or `None` when a mode repeats (the state vanishes).
pub fn normal_order_creators(n_modes: usize, word: &[usize]) -> Option<(f64, FockState)> {
    let mut w = word.to_vec();
    let mut sign = 1.0;
    // bubble sort: each swap of two distinct creators flips the sign
    for pass in 0..w.len() {
        for k in 0..w.len().saturating_sub(1 + pass) {
            if w[k] == w[k + 1] {
                return None;
            }
            if w[k] > w[k + 1] {
                w.swap(k, k + 1);
                sign = -sign;
            }
        }
    }
    if w.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    let mut occ = vec![false; n_modes];
    for m in w {
        occ[m - 1] = true;
    }
    Some((sign, FockState::from_occupations(occ)))
}

/// `coefficient · w_1 w_2 ... w_k`, a word of ladder operators.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionMonomial {
    pub coefficient: ComplexScalar,
    pub word: Vec<Ladder>,
}

impl FermionMonomial {
    pub fn new(coefficient: ComplexScalar, word: Vec<Ladder>) -> Self {
        Self { coefficient, word }
    }

    pub fn unit(word: Vec<Ladder>) -> Self {
        Self::new(ONE, word)
    }

    pub fn degree(&self) -> usize {
        self.word.len()
    }

    /// 0 for even words, 1 for odd.
    pub fn parity(&self) -> usize {
        self.word.len() % 2
    }

    /// Parity-even monomials are the only ones allowed in physical observables.
    pub fn is_physical(&self) -> bool {
        self.parity() == 0
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coefficient: self.coefficient.conj(),
            word: self
                .word
                .iter()
                .rev()
                .map(|l| Ladder {
                    mode: l.mode,
                    dagger: !l.dagger,
                })
                .collect(),
        }
    }

    /// Acts on a basis state using only the anticommutation relations: the
    /// word is applied right to left to the creation word of `state`, an
    /// annihilator is anticommuted leftwards until it meets its creator, and
    /// the final word is normal-ordered. `None` means the result is zero.
    pub fn act_on(&self, state: &FockState) -> Option<(ComplexScalar, FockState)> {
        let n = state.n_modes();
        let mut creators = state.occupied_modes();
        let mut sign = 1.0;
        for op in self.word.iter().rev() {
            if op.mode == 0 || op.mode > n {
                return None;
            }
            if op.dagger {
                if creators.contains(&op.mode) {
                    return None;
                }
                creators.insert(0, op.mode);
            } else {
                let pos = creators.iter().position(|&m| m == op.mode)?;
                if pos % 2 == 1 {
                    sign = -sign;
                }
                creators.remove(pos);
            }
        }
        let (s, out) = normal_order_creators(n, &creators)?;
        Some((self.coefficient * (sign * s), out))
    }

    /// Matrix of the monomial built as a product of ladder-operator matrices.
    pub fn to_matrix(&self, n_modes: usize) -> Result<OperatorMatrix> {
        let mut m = OperatorMatrix::identity(1 << n_modes);
        for op in &self.word {
            let f = if op.dagger {
                creator_matrix(n_modes, op.mode)?
            } else {
                annihilator_matrix(n_modes, op.mode)?
            };
            m = &m * &f;
        }
        Ok(m.scale(self.coefficient))
    }

    /// Matrix of the monomial assembled column by column from [`Self::act_on`].
    pub fn to_matrix_by_normal_ordering(&self, n_modes: usize) -> OperatorMatrix {
        let dim = 1 << n_modes;
        let mut m = OperatorMatrix::zeros(dim);
        for col in 0..dim {
            if let Some((amp, out)) = self.act_on(&FockState::from_index(n_modes, col)) {
                m[(out.index(), col)] += amp;
            }
        }
        m
    }
}

fn check_mode(n_modes: usize, mode: usize) -> Result<()> {
    if mode == 0 || mode > n_modes {
        Err(Error::BadMode { mode, n_modes })
    } else {
        Ok(())
    }
}

/// `f_j` on `n` modes: `f_j |s> = (-1)^{Σ_{k<j} s_k} |s with s_j = 0>` when `s_j = 1`.
pub fn annihilator_matrix(n_modes: usize, j: usize) -> Result<OperatorMatrix> {
    check_mode(n_modes, j)?;
    let dim = 1 << n_modes;
    let bit = 1 << (n_modes - j);
    let mut m = OperatorMatrix::zeros(dim);
    for col in 0..dim {
        if col & bit == 0 {
            continue;
        }
        // modes k < j are the bits above `bit`
        let lower_modes = (col >> (n_modes - j + 1)).count_ones();
        let sign = if lower_modes.is_multiple_of(2) { 1.0 } else { -1.0 };
        m[(col ^ bit, col)] = re(sign);
    }
    Ok(m)
}

pub fn creator_matrix(n_modes: usize, j: usize) -> Result<OperatorMatrix> {
    Ok(annihilator_matrix(n_modes, j)?.adjoint())
}

/// `f_j† f_j`.
pub fn number_operator(n_modes: usize, j: usize) -> Result<OperatorMatrix> {
    let f = annihilator_matrix(n_modes, j)?;
    Ok(&f.adjoint() * &f)
}

/// `T_j = f_j f_j† - f_j† f_j`, the single generator of a mode's local algebra.
pub fn mode_generator(n_modes: usize, j: usize) -> Result<OperatorMatrix> {
    let f = annihilator_matrix(n_modes, j)?;
    let fd = f.adjoint();
    Ok(&(&f * &fd) - &(&fd * &f))
}

/// Parity operator `(-1)^N` restricted to a set of modes.
pub fn parity_operator(n_modes: usize, modes: &[usize]) -> Result<OperatorMatrix> {
    let mut p = OperatorMatrix::identity(1 << n_modes);
    for &j in modes {
        p = &p * &mode_generator(n_modes, j)?;
    }
    Ok(p)
}

/// `f_i† f_j + f_j† f_i`, the hopping observable between two modes.
pub fn hopping(n_modes: usize, i: usize, j: usize) -> Result<OperatorMatrix> {
    let m =
        FermionMonomial::unit(vec![Ladder::create(i), Ladder::annihilate(j)]).to_matrix(n_modes)?;
    Ok(&m + &m.adjoint())
}

/// `f_j f_k + f_k† f_j†`, the pairing observable between two modes.
pub fn pairing(n_modes: usize, j: usize, k: usize) -> Result<OperatorMatrix> {
    let m = FermionMonomial::unit(vec![Ladder::annihilate(j), Ladder::annihilate(k)])
        .to_matrix(n_modes)?;
    Ok(&m + &m.adjoint())
}

/// Applies a product of creation operators (each a sum over modes) to the
/// vacuum: `Π_k (Σ_{j ∈ factors[k]} f_j†) |0>`, leftmost factor outermost.
pub fn create_from_vacuum(n_modes: usize, factors: &[&[usize]]) -> Result<StateVector> {
    let mut v = StateVector::basis(1 << n_modes, 0);
    for modes in factors.iter().rev() {
        let mut sum = OperatorMatrix::zeros(1 << n_modes);
        for &j in *modes {
            sum = &sum + &creator_matrix(n_modes, j)?;
        }
        v = sum.apply(&v);
    }
    Ok(v)
}

/// Linearly independent parity-even Hermitian operators supported on a mode subset.
#[derive(Clone, Debug)]
pub struct FermionObservableBasis {
    pub n_modes: usize,
    pub modes: Vec<usize>,
    pub matrices: Vec<OperatorMatrix>,
}

impl FermionObservableBasis {
    pub fn count(&self) -> usize {
        self.matrices.len()
    }

    pub fn as_local_set(&self, label: &str) -> LocalObservableSet {
        LocalObservableSet::new(label, self.matrices.clone())
    }
}

/// Builds a maximal independent set of physical observables on `subset`.
///
/// Every operator on the subset is a combination of mode-ordered products
/// `Π_j w_j` with `w_j ∈ {I, T_j, f_j†, f_j}`. The parity-even products `M`
/// yield the Hermitian candidates `M` (if self-adjoint) or `M + M†` and
/// `i(M - M†)`; a Gram-Schmidt pass keeps the independent ones.
pub fn enumerate_physical_observables(
    n_modes: usize,
    subset: &[usize],
) -> Result<FermionObservableBasis> {
    if subset.is_empty() {
        return Err(Error::BadMode { mode: 0, n_modes });
    }
    let mut modes = subset.to_vec();
    modes.sort_unstable();
    modes.dedup();
    for &j in &modes {
        check_mode(n_modes, j)?;
    }
    let dim = 1 << n_modes;

    // factor 0: I, 1: T, 2: f†, 3: f
    let mut factors = Vec::with_capacity(modes.len());
    for &j in &modes {
        let f = annihilator_matrix(n_modes, j)?;
        factors.push([
            OperatorMatrix::identity(dim),
            mode_generator(n_modes, j)?,
            f.adjoint(),
            f,
        ]);
    }

    let k = modes.len();
    let mut ortho = OrthoBasis::new();
    let mut matrices = Vec::new();
    let mut keep = |m: OperatorMatrix, ortho: &mut OrthoBasis| {
        debug_assert!(m.is_hermitian(1e-12));
        if ortho.push(m.entries()) {
            matrices.push(m);
        }
    };
    for code in 0..4usize.pow(k as u32) {
        let choice: Vec<usize> = (0..k).map(|p| (code >> (2 * (k - 1 - p))) & 3).collect();
        let degree = choice.iter().filter(|&&c| c >= 2).count();
        if degree % 2 == 1 {
            continue;
        }
        let mut m = OperatorMatrix::identity(dim);
        for (p, &c) in choice.iter().enumerate() {
            m = &m * &factors[p][c];
        }
        let adj = m.adjoint();
        if m.approx_eq(&adj, 1e-12) {
            keep(m, &mut ortho);
        } else {
            keep(&m + &adj, &mut ortho);
            keep((&m - &adj).scale(crate::statecore::I), &mut ortho);
        }
    }
    Ok(FermionObservableBasis {
        n_modes,
        modes,
        matrices,
    })
}

/// One row of the observable-count table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CountRow {
    pub k: usize,
    pub count: usize,
    pub expected: usize,
    pub matches: bool,
}

pub const MAX_COUNT_MODES: usize = 5;

/// Counts independent physical observables on `k` modes for `k = 1..=k_max`
/// and compares with `2^{2k-1}`.
pub fn count_scaling_check(k_max: usize) -> Result<Vec<CountRow>> {
    if k_max > MAX_COUNT_MODES {
        return Err(Error::TooLarge(format!(
            "k_max = {k_max} exceeds {MAX_COUNT_MODES}"
        )));
    }
    (1..=k_max)
        .map(|k| {
            let modes: Vec<usize> = (1..=k).collect();
            let count = enumerate_physical_observables(k, &modes)?.count();
            let expected = 1 << (2 * k - 1);
            Ok(CountRow {
                k,
                count,
                expected,
                matches: count == expected,
            })
        })
        .collect()
}

/// `f_2 f_3 + f_3† f_2†` on five modes: physical, yet not a sum of products
/// of physical observables on modes 2 and 3.
pub fn pairing_interaction() -> OperatorMatrix {
    let f2 = annihilator_matrix(PROTOCOL_MODES, 2).expect("mode in range");
    let f3 = annihilator_matrix(PROTOCOL_MODES, 3).expect("mode in range");
    &(&f2 * &f3) + &(&f3.adjoint() * &f2.adjoint())
}

/// Span test of [`pairing_interaction`] against all products `A_2 · B_3` of
/// physical single-mode observables.
pub fn decomposability_check() -> SpanTest {
    let local = |j| enumerate_physical_observables(PROTOCOL_MODES, &[j]).expect("mode in range");
    let (b2, b3) = (local(2), local(3));
    let products: Vec<_> = b2
        .matrices
        .iter()
        .flat_map(|a| b3.matrices.iter().map(move |b| a * b))
        .collect();
    in_span(&pairing_interaction(), &products)
}

/// Signed partial trace over a single mode `j` of an `n`-mode operator.
///
/// Each dyad `|s><r|` survives only if `s_j = r_j`, picks up
/// `(-1)^{Σ_{k>j} (s_j s_k + r_j r_k)}`, and loses slot `j`.
pub fn fermionic_partial_trace(
    m: &OperatorMatrix,
    n_modes: usize,
    j: usize,
) -> Result<OperatorMatrix> {
    if n_modes == 0 || m.dim() != 1 << n_modes {
        return Err(Error::BadPartition(format!(
            "operator of dimension {} is not on {n_modes} modes",
            m.dim()
        )));
    }
    check_mode(n_modes, j)?;
    let shift = n_modes - j;
    let bit = 1usize << shift;
    let below = bit - 1; // modes k > j
    let drop_slot = |idx: usize| ((idx >> (shift + 1)) << shift) | (idx & below);
    let sign_of = |idx: usize| -> i32 {
        if idx & bit != 0 && (idx & below).count_ones() % 2 == 1 {
            -1
        } else {
            1
        }
    };
    let mut out = OperatorMatrix::zeros(1 << (n_modes - 1));
    let dim = m.dim();
    for s in 0..dim {
        for r in 0..dim {
            if (s & bit) != (r & bit) {
                continue;
            }
            let entry = m[(s, r)];
            if entry == ZERO {
                continue;
            }
            let sign = sign_of(s) * sign_of(r);
            out[(drop_slot(s), drop_slot(r))] += entry * f64::from(sign);
        }
    }
    Ok(out)
}

/// Traces out `modes` one at a time in the given order, re-indexing the
/// surviving modes after each step. Mode labels refer to the original operator.
pub fn fermionic_partial_trace_ordered(
    m: &OperatorMatrix,
    n_modes: usize,
    modes: &[usize],
) -> Result<OperatorMatrix> {
    let mut remaining: Vec<usize> = (1..=n_modes).collect();
    let mut out = m.clone();
    for &j in modes {
        check_mode(n_modes, j)?;
        let pos = remaining
            .iter()
            .position(|&x| x == j)
            .ok_or_else(|| Error::BadPartition(format!("mode {j} traced twice")))?;
        out = fermionic_partial_trace(&out, remaining.len(), pos + 1)?;
        remaining.remove(pos);
    }
    Ok(out)
}

/// Traces out `modes`, highest-indexed first.
pub fn fermionic_partial_trace_modes(
    m: &OperatorMatrix,
    n_modes: usize,
    modes: &[usize],
) -> Result<OperatorMatrix> {
    let mut sorted = modes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    fermionic_partial_trace_ordered(m, n_modes, &sorted)
}

/// Keeps `keep` (re-indexed in ascending order) and traces everything else.
pub fn fermionic_reduce_to(
    m: &OperatorMatrix,
    n_modes: usize,
    keep: &[usize],
) -> Result<OperatorMatrix> {
    let traced: Vec<usize> = (1..=n_modes).filter(|j| !keep.contains(j)).collect();
    fermionic_partial_trace_modes(m, n_modes, &traced)
}

/// The unitary `S_ij` with `S|0> = |0>` and `S f_k S† = f_{π(k)}` for the
/// transposition `π = (i j)`. Built on basis states by permuting the creation
/// word and normal-ordering it.
pub fn fermionic_swap(n_modes: usize, i: usize, j: usize) -> Result<OperatorMatrix> {
    check_mode(n_modes, i)?;
    check_mode(n_modes, j)?;
    if i == j {
        return Err(Error::BadSwap(i));
    }
    let dim = 1 << n_modes;
    let mut s = OperatorMatrix::zeros(dim);
    for col in 0..dim {
        let word: Vec<usize> = FockState::from_index(n_modes, col)
            .occupied_modes()
            .into_iter()
            .map(|m| {
                if m == i {
                    j
                } else if m == j {
                    i
                } else {
                    m
                }
            })
            .collect();
        let (sign, out) =
            normal_order_creators(n_modes, &word).expect("a permutation cannot repeat modes");
        s[(out.index(), col)] = re(sign);
    }
    Ok(s)
}

pub const PROTOCOL_MODES: usize = 5;
pub const MEDIATOR_MODE: usize = 3;

/// `½(f_1† + f_2†) f_3† (f_4† + f_5†) |0>`.
pub fn initial_state() -> StateVector {
    create_from_vacuum(PROTOCOL_MODES, &[&[1, 2], &[3], &[4, 5]])
        .expect("valid modes")
        .scale(re(0.5))
}

/// Expected matter state after the protocol, on the re-indexed modes
/// (1, 2, 4, 5) -> (1, 2, 3, 4): `½(f_1† + f_3†)(f_2† + f_4†)|0>`.
pub fn expected_final_matter_state() -> StateVector {
    create_from_vacuum(4, &[&[1, 3], &[2, 4]])
        .expect("valid modes")
        .scale(re(0.5))
}

/// Expected initial matter state: `½(f_1† + f_2†)(f_3† + f_4†)|0>` on 4 modes.
pub fn expected_initial_matter_state() -> StateVector {
    create_from_vacuum(4, &[&[1, 2], &[3, 4]])
        .expect("valid modes")
        .scale(re(0.5))
}

/// Expected mediator sequence in the basis `{|0>, f_3†|0>}`.
pub fn expected_mediator_sequence() -> [OperatorMatrix; 4] {
    [
        OperatorMatrix::from_real_diag(&[0.0, 1.0]),
        OperatorMatrix::from_real_diag(&[0.5, 0.5]),
        OperatorMatrix::from_real_diag(&[0.5, 0.5]),
        OperatorMatrix::from_real_diag(&[0.0, 1.0]),
    ]
}

/// Local observable sets of the two qubits inside the 4-mode matter space:
/// all physical observables on modes {1, 2} and on modes {3, 4}.
pub fn matter_observable_sets() -> (LocalObservableSet, LocalObservableSet) {
    let q1 = enumerate_physical_observables(4, &[1, 2]).expect("valid modes");
    let q2 = enumerate_physical_observables(4, &[3, 4]).expect("valid modes");
    (q1.as_local_set("Q1"), q2.as_local_set("Q2"))
}

fn step(label: &str, state: StateVector) -> Result<ProtocolStep> {
    let rho = state.dyad();
    let mediator = fermionic_reduce_to(&rho, PROTOCOL_MODES, &[MEDIATOR_MODE])?;
    let matter = fermionic_partial_trace(&rho, PROTOCOL_MODES, MEDIATOR_MODE)?;
    Ok(ProtocolStep {
        label: label.to_string(),
        state,
        mediator,
        matter,
    })
}

/// Runs `S_23 S_34 S_23 |ψ_0>` (rightmost swap first) and records every stage.
pub fn run_fermion_protocol() -> Result<ProtocolTrace> {
    let s23 = fermionic_swap(PROTOCOL_MODES, 2, 3)?;
    let s34 = fermionic_swap(PROTOCOL_MODES, 3, 4)?;

    let mut state = initial_state();
    let mut steps = vec![step("initial", state.clone())?];
    for (label, gate) in [("S23", &s23), ("S34", &s34), ("S23", &s23)] {
        state = gate.apply(&state);
        steps.push(step(label, state.clone())?);
    }

    let (q1, q2) = matter_observable_sets();
    let initial_matter = pure_state_from_density(&steps[0].matter)?;
    let final_matter = pure_state_from_density(&steps[steps.len() - 1].matter)?;
    let initial_report = uncorrelated_test(&initial_matter, &q1, &q2, Composition::MatrixProduct)?;
    let final_report = uncorrelated_test(&final_matter, &q1, &q2, Composition::MatrixProduct)?;

    let final_rho = final_matter.dyad();
    let rho_q1 = fermionic_reduce_to(&final_rho, 4, &[1, 2])?;
    let rho_q2 = fermionic_reduce_to(&final_rho, 4, &[3, 4])?;

    let x_local = hopping(2, 1, 2)?;
    let x1 = hopping(4, 1, 2)?;
    let x2 = hopping(4, 3, 4)?;
    let key_correlation = Correlation {
        a_label: "X1".into(),
        b_label: "X2".into(),
        mean_a: x_local.expectation_in(&rho_q1).re,
        mean_b: x_local.expectation_in(&rho_q2).re,
        joint: (&x1 * &x2).expectation(&final_matter).re,
    };

    Ok(ProtocolTrace {
        model: ModelTag::Fermion,
        steps,
        initial_matter,
        final_matter,
        marginals: [rho_q1, rho_q2],
        key_correlation,
        initial_report,
        final_report,
    })
}
