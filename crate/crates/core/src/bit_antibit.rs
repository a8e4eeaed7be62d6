//! Bits and anti-bits: composites whose pure states pair every anti-bit with a
//! bit up to a fixed flip, and the bit-swap mediation protocol.
//!
//! An anti-bit `A_k` in state `i` forces its partner bit to `i ⊕ q_k`; bits with
//! no partner are classical and take fixed values. Superpositions are allowed
//! only among basis states sharing one such pairing pattern.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::statecore::{
    partial_trace, pauli_products, re, tensor, OperatorMatrix, StateVector, EPS, ONE, ZERO,
};
use crate::witness::{
    pure_state_from_density, uncorrelated_test, Composition, Correlation, LocalObservableSet,
    ModelTag, ProtocolStep, ProtocolTrace,
};

/// One tensor slot. Labels are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Slot {
    AntiBit(usize),
    Bit(usize),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::AntiBit(k) => write!(f, "A{k}"),
            Slot::Bit(k) => write!(f, "B{k}"),
        }
    }
}

/// `(m, n)` system with an explicit slot order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemSignature {
    ordering: Vec<Slot>,
    m: usize,
    n: usize,
}

impl SystemSignature {
    /// Anti-bits must be labelled `1..=m` and bits `1..=n`, each exactly once.
    pub fn new(ordering: Vec<Slot>) -> Result<Self> {
        let mut anti: Vec<usize> = Vec::new();
        let mut bits: Vec<usize> = Vec::new();
        for s in &ordering {
            match *s {
                Slot::AntiBit(k) => anti.push(k),
                Slot::Bit(k) => bits.push(k),
            }
        }
        anti.sort_unstable();
        bits.sort_unstable();
        let labelled = |v: &[usize]| v.iter().enumerate().all(|(i, &k)| k == i + 1);
        if !labelled(&anti) || !labelled(&bits) {
            return Err(Error::BadPartition(format!(
                "slot labels must run 1..=m and 1..=n without repeats: {ordering:?}"
            )));
        }
        Ok(Self {
            m: anti.len(),
            n: bits.len(),
            ordering,
        })
    }

    /// `A1 … Am B1 … Bn`.
    pub fn standard(m: usize, n: usize) -> Self {
        let ordering = (1..=m)
            .map(Slot::AntiBit)
            .chain((1..=n).map(Slot::Bit))
            .collect();
        Self::new(ordering).expect("well labelled")
    }

    /// `A1 B1 … B_{k+2} A2` for `k` mediator bits.
    pub fn protocol(mediator_bits: usize) -> Self {
        let mut ordering = vec![Slot::AntiBit(1)];
        ordering.extend((1..=mediator_bits + 2).map(Slot::Bit));
        ordering.push(Slot::AntiBit(2));
        Self::new(ordering).expect("well labelled")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ordering(&self) -> &[Slot] {
        &self.ordering
    }

    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.ordering.len()
    }

    pub fn position(&self, slot: Slot) -> Option<usize> {
        self.ordering.iter().position(|&s| s == slot)
    }

    /// Value of slot position `pos` in basis index `index` (first slot is the
    /// most significant bit).
    fn value_at(&self, index: usize, pos: usize) -> u8 {
        ((index >> (self.ordering.len() - 1 - pos)) & 1) as u8
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BitAntibitState {
    pub signature: SystemSignature,
    pub vector: StateVector,
}

impl BitAntibitState {
    pub fn new(signature: SystemSignature, vector: StateVector) -> Result<Self> {
        if vector.dim() != signature.dim() {
            return Err(Error::DimensionMismatch {
                expected: signature.dim(),
                actual: vector.dim(),
            });
        }
        Ok(Self { signature, vector })
    }
}

/// Anti-bit `k` (0-based here) pairs with bit `pairing[k]` (1-based label) and
/// forces it to `i_k ⊕ q[k]`; `tail` fixes each unpaired bit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingCertificate {
    pub pairing: Vec<usize>,
    pub q: Vec<u8>,
    pub tail: Vec<(usize, u8)>,
}

impl PairingCertificate {
    /// Whether basis index `index` lies in this certificate's support pattern.
    pub fn admits(&self, sig: &SystemSignature, index: usize) -> bool {
        let value = |slot| sig.value_at(index, sig.position(slot).expect("slot exists"));
        self.pairing
            .iter()
            .zip(&self.q)
            .enumerate()
            .all(|(k, (&bit, &q))| value(Slot::Bit(bit)) == value(Slot::AntiBit(k + 1)) ^ q)
            && self.tail.iter().all(|&(bit, v)| value(Slot::Bit(bit)) == v)
    }
}

// All injective maps {0..m} -> {1..=n}, lexicographic.
fn injections(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(m);
    fn rec(m: usize, n: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == m {
            out.push(current.clone());
            return;
        }
        for b in 1..=n {
            if !current.contains(&b) {
                current.push(b);
                rec(m, n, current, out);
                current.pop();
            }
        }
    }
    rec(m, n, &mut current, &mut out);
    out
}

/// Finds the first pairing certificate whose support pattern contains the
/// state's support, or `None` if the state is not allowed.
pub fn validate_state(s: &BitAntibitState) -> Result<Option<PairingCertificate>> {
    s.vector.require_normalized(EPS)?;
    let sig = &s.signature;
    if sig.n < sig.m {
        return Err(Error::BadPartition(format!(
            "validation needs n >= m, got m = {}, n = {}",
            sig.m, sig.n
        )));
    }
    let support = s.vector.support(EPS);
    let first = support[0];
    let value = |index, slot| sig.value_at(index, sig.position(slot).expect("slot exists"));

    for pairing in injections(sig.m, sig.n) {
        // q and the tail are forced by any one support element
        let q = pairing
            .iter()
            .enumerate()
            .map(|(k, &b)| value(first, Slot::Bit(b)) ^ value(first, Slot::AntiBit(k + 1)))
            .collect();
        let tail = (1..=sig.n)
            .filter(|b| !pairing.contains(b))
            .map(|b| (b, value(first, Slot::Bit(b))))
            .collect();
        let cert = PairingCertificate { pairing, q, tail };
        if support.iter().all(|&i| cert.admits(sig, i)) {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// Permutation matrix exchanging the bits at slot positions `a` and `b`.
pub fn swap_bits(sig: &SystemSignature, a: usize, b: usize) -> Result<OperatorMatrix> {
    for p in [a, b] {
        match sig.ordering.get(p) {
            None => {
                return Err(Error::BadPartition(format!(
                    "slot {p} is outside 0..{}",
                    sig.len()
                )))
            }
            Some(Slot::AntiBit(_)) => return Err(Error::SwapOnAntibit(p)),
            Some(Slot::Bit(_)) => {}
        }
    }
    if a == b {
        return Err(Error::BadSwap(a));
    }
    let len = sig.len();
    let (sa, sb) = (len - 1 - a, len - 1 - b);
    let mut m = OperatorMatrix::zeros(sig.dim());
    for col in 0..sig.dim() {
        let (va, vb) = ((col >> sa) & 1, (col >> sb) & 1);
        let row = col & !(1 << sa) & !(1 << sb) | (vb << sa) | (va << sb);
        m[(row, col)] = ONE;
    }
    Ok(m)
}

/// Swap by bit labels: `S_{B_i B_j}`.
pub fn swap_bit_labels(sig: &SystemSignature, i: usize, j: usize) -> Result<OperatorMatrix> {
    let pos = |k| {
        sig.position(Slot::Bit(k))
            .ok_or_else(|| Error::BadPartition(format!("no bit B{k} in signature")))
    };
    swap_bits(sig, pos(i)?, pos(j)?)
}

/// `S_{B1B2}, …, S_{B_{k+1}B_{k+2}}, …, S_{B1B2}` for `k` mediator bits.
pub fn swap_chain(mediator_bits: usize) -> Vec<(usize, usize)> {
    let up = (1..=mediator_bits + 1).map(|b| (b, b + 1));
    let down = (1..=mediator_bits).rev().map(|b| (b, b + 1));
    up.chain(down).collect()
}

pub const DEFAULT_MEDIATOR_BITS: usize = 2;

/// `|00> + |11>` over two slots, normalized.
fn paired_bell() -> StateVector {
    let h = re(1.0 / 2f64.sqrt());
    StateVector::from_amplitudes(vec![h, ZERO, ZERO, h])
}

/// `(|00> + |11>)/√2 ⊗ |0…0> ⊗ (|00> + |11>)/√2` on `A1 B1 … B_{k+2} A2`.
pub fn initial_state(mediator_bits: usize) -> StateVector {
    paired_bell()
        .tensor(&StateVector::basis(1 << mediator_bits, 0))
        .tensor(&paired_bell())
}

/// `½(|0000> + |1010> + |0101> + |1111>)` on `A1 B1 B_last A2`.
pub fn expected_final_matter_state() -> StateVector {
    let mut v = StateVector::zeros(16);
    for k in [0b0000, 0b1010, 0b0101, 0b1111] {
        v[k] = re(0.5);
    }
    v
}

/// `|00><11| + |11><00|` on one matter pair.
pub fn pair_flip() -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(4);
    m[(0, 3)] = ONE;
    m[(3, 0)] = ONE;
    m
}

/// Hermitian basis of one 4-dimensional matter pair.
pub fn pair_observable_set(label: &str) -> LocalObservableSet {
    LocalObservableSet::new(label, pauli_products(2))
}

#[derive(Clone, Debug)]
pub struct BitAntibitRun {
    pub trace: ProtocolTrace,
    pub signature: SystemSignature,
    /// Bit labels swapped at each step after the first.
    pub swaps: Vec<(usize, usize)>,
    /// Certificate found for every recorded state.
    pub certificates: Vec<Option<PairingCertificate>>,
}

pub fn run_bit_antibit_protocol() -> Result<ProtocolTrace> {
    Ok(run_bit_antibit_protocol_with(DEFAULT_MEDIATOR_BITS)?.trace)
}

pub fn run_bit_antibit_protocol_with(mediator_bits: usize) -> Result<BitAntibitRun> {
    if mediator_bits < 1 {
        return Err(Error::BadPartition(
            "at least one mediator bit is needed".into(),
        ));
    }
    let sig = SystemSignature::protocol(mediator_bits);
    let len = sig.len();
    let dims = vec![2; len];
    let mediator_slots: Vec<usize> = (2..2 + mediator_bits).collect();
    let matter_slots = [0, 1, len - 2, len - 1];

    let swaps = swap_chain(mediator_bits);
    let reversed: Vec<_> = swaps.iter().rev().copied().collect();
    debug_assert_eq!(swaps, reversed, "swap chain is palindromic");

    let mut state = initial_state(mediator_bits);
    let mut steps = Vec::with_capacity(swaps.len() + 1);
    let mut certificates = Vec::with_capacity(swaps.len() + 1);
    let mut record = |label: String, state: &StateVector| -> Result<()> {
        let rho = state.dyad();
        certificates.push(validate_state(&BitAntibitState::new(
            sig.clone(),
            state.clone(),
        )?)?);
        steps.push(ProtocolStep {
            label,
            state: state.clone(),
            mediator: partial_trace(&rho, &dims, &mediator_slots)?,
            matter: partial_trace(&rho, &dims, &matter_slots)?,
        });
        Ok(())
    };
    record("initial".into(), &state)?;
    for &(i, j) in &swaps {
        state = swap_bit_labels(&sig, i, j)?.apply(&state);
        record(format!("S_B{i}B{j}"), &state)?;
    }

    let q1 = pair_observable_set("A1B1");
    let q2 = pair_observable_set(&format!("B{}A2", mediator_bits + 2));
    let initial_matter = pure_state_from_density(&steps[0].matter)?;
    let final_matter = pure_state_from_density(&steps[steps.len() - 1].matter)?;
    let initial_report = uncorrelated_test(&initial_matter, &q1, &q2, Composition::Tensor)?;
    let final_report = uncorrelated_test(&final_matter, &q1, &q2, Composition::Tensor)?;

    let final_rho = final_matter.dyad();
    let rho_q1 = partial_trace(&final_rho, &[4, 4], &[0])?;
    let rho_q2 = partial_trace(&final_rho, &[4, 4], &[1])?;
    let x = pair_flip();
    let key_correlation = Correlation {
        a_label: "X1".into(),
        b_label: "X2".into(),
        mean_a: x.expectation_in(&rho_q1).re,
        mean_b: x.expectation_in(&rho_q2).re,
        joint: tensor(&x, &x).expectation(&final_matter).re,
    };

    Ok(BitAntibitRun {
        trace: ProtocolTrace {
            model: ModelTag::BitAntibit,
            steps,
            initial_matter,
            final_matter,
            marginals: [rho_q1, rho_q2],
            key_correlation,
            initial_report,
            final_report,
        },
        signature: sig,
        swaps,
        certificates,
    })
}
