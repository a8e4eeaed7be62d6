//! Ising-anyon fusion trees and the restricted sector used for mediation.
//!
//! Charges are `0` (vacuum), `1` (σ) and `2` (ψ). Two matter systems `Q1`,
//! `Q2` each fuse a pair `(x_i, y_i)` with `y_i = 1 - x_i` to total charge 1,
//! the mediator carries `m = 1`, and the global charge is `g = 1`. What is left
//! is an 8-dimensional space per association order ("partition shape"),
//! labelled by `(x1, x2, internal)` where the internal charge is `t`, `h1` or
//! `h2` and only takes the values 0 and 2.
//!
//! Sector index: `q1 * 4 + q2 * 2 + [internal == 2]` with the encoded qubit
//! `q_i = 1 - x_i`, so `(1,0) ↦ |0>` and `(0,1) ↦ |1>`. In this layout the
//! matter space factors as `Q1 ⊗ Q2 ⊗ internal` for the standard partial trace.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::statecore::{
    approx_eq, c, partial_trace, re, ComplexScalar, OperatorMatrix, StateVector, EPS, I, ONE, ZERO,
};
use crate::witness::{
    pure_state_from_density, purity, uncorrelated_test, Composition, Correlation,
    LocalObservableSet, ModelTag, ProtocolStep, ProtocolTrace,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Charge {
    Vacuum = 0,
    Sigma = 1,
    Psi = 2,
}

impl Charge {
    pub const ALL: [Charge; 3] = [Charge::Vacuum, Charge::Sigma, Charge::Psi];

    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn from_value(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Charge::Vacuum),
            1 => Ok(Charge::Sigma),
            2 => Ok(Charge::Psi),
            _ => Err(Error::BadFusionTree(format!(
                "charge {v} is not in {{0, 1, 2}}"
            ))),
        }
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Whether `x × y → z` is an allowed fusion channel.
pub fn fusion_allowed(x: Charge, y: Charge, z: Charge) -> bool {
    use Charge::*;
    match (x, y) {
        (Vacuum, y) => z == y,
        (x, Vacuum) => z == x,
        (Sigma, Sigma) => z == Vacuum || z == Psi,
        (Sigma, Psi) | (Psi, Sigma) => z == Sigma,
        (Psi, Psi) => z == Vacuum,
    }
}

pub fn fusion_outcomes(x: Charge, y: Charge) -> Vec<Charge> {
    Charge::ALL
        .into_iter()
        .filter(|&z| fusion_allowed(x, y, z))
        .collect()
}

/// Labels of a binary fusion tree on two or three leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GeneralFusionLabel {
    /// `|x, y; z>`.
    Pair { x: Charge, y: Charge, z: Charge },
    /// `|(x0, x1), x2; z01, x2; g>`.
    Left {
        x0: Charge,
        x1: Charge,
        x2: Charge,
        z01: Charge,
        g: Charge,
    },
    /// `|x0, (x1, x2); x0, z12; g>`.
    Right {
        x0: Charge,
        x1: Charge,
        x2: Charge,
        z12: Charge,
        g: Charge,
    },
}

impl GeneralFusionLabel {
    pub fn is_valid(&self) -> bool {
        match *self {
            Self::Pair { x, y, z } => fusion_allowed(x, y, z),
            Self::Left { x0, x1, x2, z01, g } => {
                fusion_allowed(x0, x1, z01) && fusion_allowed(z01, x2, g)
            }
            Self::Right { x0, x1, x2, z12, g } => {
                fusion_allowed(x1, x2, z12) && fusion_allowed(x0, z12, g)
            }
        }
    }

    pub fn total_charge(&self) -> Charge {
        match *self {
            Self::Pair { z, .. } => z,
            Self::Left { g, .. } | Self::Right { g, .. } => g,
        }
    }
}

/// All valid two-leaf labels.
pub fn two_leaf_labels() -> Vec<GeneralFusionLabel> {
    let mut out = Vec::new();
    for x in Charge::ALL {
        for y in Charge::ALL {
            for z in fusion_outcomes(x, y) {
                out.push(GeneralFusionLabel::Pair { x, y, z });
            }
        }
    }
    out
}

/// All valid three-leaf labels in the left (`right = false`) or right association.
pub fn three_leaf_labels(right: bool) -> Vec<GeneralFusionLabel> {
    let mut out = Vec::new();
    for x0 in Charge::ALL {
        for x1 in Charge::ALL {
            for x2 in Charge::ALL {
                for inner in Charge::ALL {
                    for g in Charge::ALL {
                        let label = if right {
                            GeneralFusionLabel::Right {
                                x0,
                                x1,
                                x2,
                                z12: inner,
                                g,
                            }
                        } else {
                            GeneralFusionLabel::Left {
                                x0,
                                x1,
                                x2,
                                z01: inner,
                                g,
                            }
                        };
                        if label.is_valid() {
                            out.push(label);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Counts labels per total charge `[g=0, g=1, g=2]`.
pub fn block_sizes(labels: &[GeneralFusionLabel]) -> [usize; 3] {
    let mut sizes = [0; 3];
    for l in labels {
        sizes[l.total_charge().value() as usize] += 1;
    }
    sizes
}

/// Recouples a left-associated three-leaf label into right-associated ones.
///
/// Every label maps to the unique right label with the same leaves and total
/// charge, except when all leaves and `g` are σ, where
/// `z01 = 0 ↦ (|z12=0> + |z12=2>)/√2` and `z01 = 2 ↦ (|z12=0> - |z12=2>)/√2`.
pub fn f_move(label: &GeneralFusionLabel) -> Result<Vec<(ComplexScalar, GeneralFusionLabel)>> {
    let GeneralFusionLabel::Left { x0, x1, x2, z01, g } = *label else {
        return Err(Error::BadFusionTree(format!(
            "{label:?} is not a left-associated three-leaf label"
        )));
    };
    if !label.is_valid() {
        return Err(Error::BadFusionTree(format!(
            "{label:?} violates the fusion rules"
        )));
    }
    use Charge::*;
    let right = |z12| GeneralFusionLabel::Right { x0, x1, x2, z12, g };
    if [x0, x1, x2, g] == [Sigma; 4] {
        let h = 1.0 / 2f64.sqrt();
        let sign = if z01 == Vacuum { 1.0 } else { -1.0 };
        return Ok(vec![(re(h), right(Vacuum)), (re(sign * h), right(Psi))]);
    }
    let candidates: Vec<_> = Charge::ALL
        .into_iter()
        .map(right)
        .filter(GeneralFusionLabel::is_valid)
        .collect();
    match candidates.as_slice() {
        [only] => Ok(vec![(ONE, *only)]),
        _ => Err(Error::BadFusionTree(format!(
            "{label:?} has {} right-associated partners",
            candidates.len()
        ))),
    }
}

/// Association order of `Q1`, `M`, `Q2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PartitionShape {
    /// `(Q1 Q2) M`, internal label `t`.
    Center,
    /// `(Q1 M) Q2`, internal label `h1`.
    Left,
    /// `Q1 (M Q2)`, internal label `h2`.
    Right,
}

impl PartitionShape {
    pub const ALL: [PartitionShape; 3] = [Self::Center, Self::Left, Self::Right];

    pub fn internal_label(self) -> &'static str {
        match self {
            Self::Center => "t",
            Self::Left => "h1",
            Self::Right => "h2",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Center => "center",
            Self::Left => "left",
            Self::Right => "right",
        }
    }
}

/// Basis label of the restricted sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SectorLabel {
    /// Charge of the first constituent of `Q1` (the second is `1 - x1`).
    pub x1: u8,
    pub x2: u8,
    /// `t`, `h1` or `h2` depending on the shape; 0 or 2.
    pub internal: Charge,
}

pub const SECTOR_DIM: usize = 8;

impl SectorLabel {
    pub fn new(x1: u8, x2: u8, internal: Charge) -> Result<Self> {
        if x1 > 1 || x2 > 1 || internal == Charge::Sigma {
            return Err(Error::BadFusionTree(format!(
                "({x1}, {x2}; {internal}) is outside the restricted sector"
            )));
        }
        Ok(Self { x1, x2, internal })
    }

    pub fn index(self) -> usize {
        let q1 = usize::from(1 - self.x1);
        let q2 = usize::from(1 - self.x2);
        q1 * 4 + q2 * 2 + usize::from(self.internal == Charge::Psi)
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < SECTOR_DIM, "sector index out of range");
        Self {
            x1: 1 - ((index >> 2) & 1) as u8,
            x2: 1 - ((index >> 1) & 1) as u8,
            internal: if index & 1 == 1 {
                Charge::Psi
            } else {
                Charge::Vacuum
            },
        }
    }

    pub fn all() -> impl Iterator<Item = SectorLabel> {
        (0..SECTOR_DIM).map(Self::from_index)
    }

    /// The full fusion-tree labels this sector label stands for.
    pub fn fusion_vertices(self, shape: PartitionShape) -> Vec<GeneralFusionLabel> {
        use Charge::*;
        let ch = |v: u8| Charge::from_value(v).expect("0 or 1");
        let q1 = GeneralFusionLabel::Pair {
            x: ch(self.x1),
            y: ch(1 - self.x1),
            z: Sigma,
        };
        let q2 = GeneralFusionLabel::Pair {
            x: ch(self.x2),
            y: ch(1 - self.x2),
            z: Sigma,
        };
        let t = self.internal;
        let (a, b) = match shape {
            // (z1, z2) -> t, then (t, m) -> g
            PartitionShape::Center => (
                GeneralFusionLabel::Pair {
                    x: Sigma,
                    y: Sigma,
                    z: t,
                },
                GeneralFusionLabel::Pair {
                    x: t,
                    y: Sigma,
                    z: Sigma,
                },
            ),
            // (z1, m) -> h1, then (h1, z2) -> g
            PartitionShape::Left => (
                GeneralFusionLabel::Pair {
                    x: Sigma,
                    y: Sigma,
                    z: t,
                },
                GeneralFusionLabel::Pair {
                    x: t,
                    y: Sigma,
                    z: Sigma,
                },
            ),
            // (m, z2) -> h2, then (z1, h2) -> g
            PartitionShape::Right => (
                GeneralFusionLabel::Pair {
                    x: Sigma,
                    y: Sigma,
                    z: t,
                },
                GeneralFusionLabel::Pair {
                    x: Sigma,
                    y: t,
                    z: Sigma,
                },
            ),
        };
        vec![q1, q2, a, b]
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{}),({},{});{}",
            self.x1,
            1 - self.x1,
            self.x2,
            1 - self.x2,
            self.internal
        )
    }
}

/// Unit-norm amplitudes over the restricted sector in a fixed partition shape.
#[derive(Clone, Debug, PartialEq)]
pub struct AnyonState {
    shape: PartitionShape,
    amps: [ComplexScalar; SECTOR_DIM],
}

impl AnyonState {
    pub fn new(shape: PartitionShape, amps: [ComplexScalar; SECTOR_DIM]) -> Result<Self> {
        let s = Self { shape, amps };
        let norm = s.to_vector().norm();
        if (norm - 1.0).abs() > EPS {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Normalizes `amps` first.
    pub fn normalized(shape: PartitionShape, amps: [ComplexScalar; SECTOR_DIM]) -> Result<Self> {
        let v = StateVector::from_amplitudes(amps.to_vec()).normalized()?;
        let mut out = [ZERO; SECTOR_DIM];
        out.copy_from_slice(v.amplitudes());
        Ok(Self { shape, amps: out })
    }

    pub fn from_terms(
        shape: PartitionShape,
        terms: &[(SectorLabel, ComplexScalar)],
    ) -> Result<Self> {
        let mut amps = [ZERO; SECTOR_DIM];
        for (label, a) in terms {
            amps[label.index()] += *a;
        }
        Self::new(shape, amps)
    }

    pub fn shape(&self) -> PartitionShape {
        self.shape
    }

    pub fn amplitude(&self, label: SectorLabel) -> ComplexScalar {
        self.amps[label.index()]
    }

    pub fn amplitudes(&self) -> &[ComplexScalar; SECTOR_DIM] {
        &self.amps
    }

    pub fn to_vector(&self) -> StateVector {
        StateVector::from_amplitudes(self.amps.to_vec())
    }

    /// Amplitude-wise comparison; shapes must agree.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.shape == other.shape
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| approx_eq(*a, *b, tol))
    }

    /// Probability distribution over `x1` (index 0: `x1 = 0`).
    pub fn q1_distribution(&self) -> [f64; 2] {
        let mut p = [0.0; 2];
        for l in SectorLabel::all() {
            p[l.x1 as usize] += self.amplitude(l).norm_sqr();
        }
        p
    }

    pub fn q2_distribution(&self) -> [f64; 2] {
        let mut p = [0.0; 2];
        for l in SectorLabel::all() {
            p[l.x2 as usize] += self.amplitude(l).norm_sqr();
        }
        p
    }
}

fn two_by_two(rows: [[ComplexScalar; 2]; 2]) -> OperatorMatrix {
    OperatorMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).expect("2x2")
}

/// Coordinate map on the internal label `{0, 2}`: amplitudes in shape `to`
/// are `P_{from→to}` times amplitudes in shape `from`.
///
/// `P_{L→R} = [[1, 1], [1, -1]]/√2` and `P_{C→R} = [[1, 1], [-i, i]]/√2`;
/// every other pair is composed from these two and their inverses.
pub fn partition_matrix(from: PartitionShape, to: PartitionShape) -> OperatorMatrix {
    use PartitionShape::*;
    let h = 1.0 / 2f64.sqrt();
    let l_to_r = two_by_two([[re(h), re(h)], [re(h), re(-h)]]);
    let c_to_r = two_by_two([[re(h), re(h)], [c(0.0, -h), c(0.0, h)]]);
    match (from, to) {
        _ if from == to => OperatorMatrix::identity(2),
        (Left, Right) => l_to_r,
        (Center, Right) => c_to_r,
        (Right, Left) => l_to_r.adjoint(),
        (Right, Center) => c_to_r.adjoint(),
        (Left, Center) => &c_to_r.adjoint() * &l_to_r,
        (Center, Left) => &l_to_r.adjoint() * &c_to_r,
        _ => unreachable!(),
    }
}

/// Expresses `s` in another partition shape; only the internal label changes.
pub fn change_partition(s: &AnyonState, to: PartitionShape) -> AnyonState {
    if s.shape == to {
        return s.clone();
    }
    let p = partition_matrix(s.shape, to);
    let mut amps = [ZERO; SECTOR_DIM];
    for block in 0..SECTOR_DIM / 2 {
        let a = [s.amps[2 * block], s.amps[2 * block + 1]];
        for r in 0..2 {
            amps[2 * block + r] = p[(r, 0)] * a[0] + p[(r, 1)] * a[1];
        }
    }
    AnyonState { shape: to, amps }
}

/// The three system-local unitaries of the mediation protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EmbeddedUnitary {
    /// Controlled `iZ` on `Q2`, controlled by `h2 = 2`; local to `M Q2`.
    UMQ2,
    /// Controlled `X` on `Q1`, controlled by `h1 = 2`; local to `Q1 M`.
    VQ1M,
    /// Controlled `-iZ` on `Q2`, controlled by `h2 = 2`; local to `M Q2`.
    WMQ2,
}

impl EmbeddedUnitary {
    pub fn label(self) -> &'static str {
        match self {
            Self::UMQ2 => "U_MQ2",
            Self::VQ1M => "V_Q1M",
            Self::WMQ2 => "W_MQ2",
        }
    }

    /// Shape in which the unitary is diagonal in the internal label.
    pub fn acting_shape(self) -> PartitionShape {
        match self {
            Self::UMQ2 | Self::WMQ2 => PartitionShape::Right,
            Self::VQ1M => PartitionShape::Left,
        }
    }

    /// Matrix on the sector basis of [`Self::acting_shape`].
    pub fn matrix(self) -> OperatorMatrix {
        let mut m = OperatorMatrix::zeros(SECTOR_DIM);
        for l in SectorLabel::all() {
            let col = l.index();
            if l.internal == Charge::Vacuum {
                m[(col, col)] = ONE;
                continue;
            }
            match self {
                Self::UMQ2 | Self::WMQ2 => {
                    let phase = if l.x2 == 1 { I } else { -I };
                    m[(col, col)] = if self == Self::UMQ2 {
                        phase
                    } else {
                        phase.conj()
                    };
                }
                Self::VQ1M => {
                    let flipped = SectorLabel { x1: 1 - l.x1, ..l };
                    m[(flipped.index(), col)] = ONE;
                }
            }
        }
        m
    }

    /// Converts to the acting shape, applies, and converts back.
    pub fn apply(self, s: &AnyonState) -> AnyonState {
        let inner = change_partition(s, self.acting_shape());
        let v = self.matrix().apply(&inner.to_vector());
        let mut amps = [ZERO; SECTOR_DIM];
        amps.copy_from_slice(v.amplitudes());
        change_partition(
            &AnyonState {
                shape: inner.shape,
                amps,
            },
            s.shape,
        )
    }
}

/// Reduced state of `Q1 Q2` on the 8-dimensional `(x1, x2, t)` space. Dyads
/// survive only with equal mediator charge and equal `t`.
pub fn trace_mediator(s: &AnyonState) -> OperatorMatrix {
    let center = change_partition(s, PartitionShape::Center);
    let v = center.to_vector();
    OperatorMatrix::from_fn(SECTOR_DIM, |i, j| {
        let (li, lj) = (SectorLabel::from_index(i), SectorLabel::from_index(j));
        if li.internal == lj.internal {
            v[i] * v[j].conj()
        } else {
            ZERO
        }
    })
}

/// Reduced state of the mediator on its charge basis `{0, 1, 2}`. Dyads
/// survive only with equal matter labels and equal `t`; every sector state has
/// `m = 1`.
pub fn trace_matter_to_mediator(s: &AnyonState) -> OperatorMatrix {
    let center = change_partition(s, PartitionShape::Center);
    let weight: f64 = center.amps.iter().map(|a| a.norm_sqr()).sum();
    let mut rho = OperatorMatrix::zeros(3);
    rho[(1, 1)] = re(weight);
    rho
}

fn check_matter_dim(m: &OperatorMatrix) -> Result<()> {
    if m.dim() != SECTOR_DIM {
        return Err(Error::BadPartition(format!(
            "matter operator must be {SECTOR_DIM}x{SECTOR_DIM}, got {}",
            m.dim()
        )));
    }
    Ok(())
}

/// Traces `Q2` out of a matter operator: dyads survive with equal `Q2` labels
/// and equal total charge `t`. The result is on `Q1`'s encoded qubit.
pub fn trace_q2(m: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_matter_dim(m)?;
    partial_trace(m, &[2, 2, 2], &[0])
}

/// Mirror of [`trace_q2`] keeping `Q2`.
pub fn trace_q1(m: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_matter_dim(m)?;
    partial_trace(m, &[2, 2, 2], &[1])
}

/// Local qubit operator `op` (2x2, encoded basis) on `Q1` (`qubit = 1`) or
/// `Q2` (`qubit = 2`), identity on the other system and on `t`.
pub fn embed_matter_observable(op: &OperatorMatrix, qubit: usize) -> OperatorMatrix {
    let i2 = OperatorMatrix::identity(2);
    match qubit {
        1 => crate::statecore::tensor_all([op, &i2, &i2]),
        2 => crate::statecore::tensor_all([&i2, op, &i2]),
        _ => panic!("qubit must be 1 or 2"),
    }
}

/// `X̂`: `|(1,0);1> <-> |(0,1);1>`.
pub fn local_x() -> OperatorMatrix {
    OperatorMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

/// `Ẑ`: `+1` on `(1,0)`, `-1` on `(0,1)`.
pub fn local_z() -> OperatorMatrix {
    OperatorMatrix::from_real_diag(&[1.0, -1.0])
}

pub fn embedded_x(qubit: usize) -> OperatorMatrix {
    embed_matter_observable(&local_x(), qubit)
}

pub fn embedded_z(qubit: usize) -> OperatorMatrix {
    embed_matter_observable(&local_z(), qubit)
}

/// `{I, X̂, i X̂ Ẑ, Ẑ}` embedded for one matter system; spans its local algebra.
pub fn matter_observable_set(qubit: usize) -> LocalObservableSet {
    let x = local_x();
    let z = local_z();
    let y = (&x * &z).scale(I);
    let ops = [OperatorMatrix::identity(2), x, y, z]
        .iter()
        .map(|op| embed_matter_observable(op, qubit))
        .collect();
    LocalObservableSet::new(if qubit == 1 { "Q1" } else { "Q2" }, ops)
}

/// Encoded two-qubit state on `t = 0`: `amps[q1 * 2 + q2]`.
pub fn encode_two_qubits(amps: [ComplexScalar; 4]) -> StateVector {
    let mut v = StateVector::zeros(SECTOR_DIM);
    for (k, a) in amps.into_iter().enumerate() {
        v[k * 2] = a;
    }
    v
}

fn label(x1: u8, x2: u8, internal: u8) -> SectorLabel {
    SectorLabel::new(x1, x2, Charge::from_value(internal).expect("0 or 2")).expect("sector label")
}

/// `(|(1,0)),1,((1,0)..;t=0> + |(1,0)),1,((0,1)..;t=0>)/√2` in the Center shape.
pub fn initial_state() -> AnyonState {
    let h = re(1.0 / 2f64.sqrt());
    AnyonState::from_terms(
        PartitionShape::Center,
        &[(label(1, 1, 0), h), (label(1, 0, 0), h)],
    )
    .expect("normalized")
}

/// `|η>`: the encoded Bell state `(|00> + |11>)/√2` on `t = 0`.
pub fn eta() -> StateVector {
    let h = re(1.0 / 2f64.sqrt());
    encode_two_qubits([h, ZERO, ZERO, h])
}

/// Encoded `|0> ⊗ |+>` on `t = 0`.
pub fn initial_matter_state() -> StateVector {
    let h = re(1.0 / 2f64.sqrt());
    encode_two_qubits([h, h, ZERO, ZERO])
}

/// Intermediate states of the protocol written out term by term.
pub fn reference_expansions() -> Vec<(&'static str, AnyonState)> {
    let half = re(0.5);
    let mhalf = re(-0.5);
    let mi_half = c(0.0, -0.5);
    let h = re(1.0 / 2f64.sqrt());
    let st = |shape, terms: &[(SectorLabel, ComplexScalar)]| {
        AnyonState::from_terms(shape, terms).expect("normalized reference")
    };
    use PartitionShape::*;
    vec![
        (
            "psi0 in right shape",
            st(
                Right,
                &[
                    (label(1, 1, 0), half),
                    (label(1, 1, 2), mi_half),
                    (label(1, 0, 0), half),
                    (label(1, 0, 2), mi_half),
                ],
            ),
        ),
        (
            "U psi0 in right shape",
            st(
                Right,
                &[
                    (label(1, 1, 0), half),
                    (label(1, 1, 2), half),
                    (label(1, 0, 0), half),
                    (label(1, 0, 2), mhalf),
                ],
            ),
        ),
        (
            "U psi0 in left shape",
            st(Left, &[(label(1, 1, 0), h), (label(1, 0, 2), h)]),
        ),
        (
            "V U psi0 in left shape",
            st(Left, &[(label(1, 1, 0), h), (label(0, 0, 2), h)]),
        ),
        (
            "V U psi0 in right shape",
            st(
                Right,
                &[
                    (label(1, 1, 0), half),
                    (label(1, 1, 2), half),
                    (label(0, 0, 0), half),
                    (label(0, 0, 2), mhalf),
                ],
            ),
        ),
        (
            "W V U psi0 in right shape",
            st(
                Right,
                &[
                    (label(1, 1, 0), half),
                    (label(1, 1, 2), mi_half),
                    (label(0, 0, 0), half),
                    (label(0, 0, 2), mi_half),
                ],
            ),
        ),
        (
            "final state in center shape",
            st(Center, &[(label(1, 1, 0), h), (label(0, 0, 0), h)]),
        ),
    ]
}

/// One protocol checkpoint in all three shapes.
#[derive(Clone, Debug)]
pub struct AnyonCheckpoint {
    pub label: String,
    pub center: AnyonState,
    pub left: AnyonState,
    pub right: AnyonState,
    pub mediator: OperatorMatrix,
    pub mediator_purity: f64,
}

#[derive(Clone, Debug)]
pub struct AnyonRun {
    pub trace: ProtocolTrace,
    pub checkpoints: Vec<AnyonCheckpoint>,
}

/// Applies `Û_{MQ2}`, `V̂_{Q1M}`, `Ŵ_{MQ2}` in that order to the initial state.
pub fn run_anyon_protocol_detailed() -> Result<AnyonRun> {
    let mut state = initial_state();
    let mut checkpoints = Vec::new();
    let mut steps = Vec::new();
    let mut record = |label: &str, s: &AnyonState| -> Result<()> {
        let center = change_partition(s, PartitionShape::Center);
        let mediator = trace_matter_to_mediator(&center);
        let matter = trace_mediator(&center);
        checkpoints.push(AnyonCheckpoint {
            label: label.to_string(),
            left: change_partition(s, PartitionShape::Left),
            right: change_partition(s, PartitionShape::Right),
            mediator_purity: purity(&mediator)?,
            mediator: mediator.clone(),
            center: center.clone(),
        });
        steps.push(ProtocolStep {
            label: label.to_string(),
            state: center.to_vector(),
            mediator,
            matter,
        });
        Ok(())
    };
    record("initial", &state)?;
    for u in [
        EmbeddedUnitary::UMQ2,
        EmbeddedUnitary::VQ1M,
        EmbeddedUnitary::WMQ2,
    ] {
        state = u.apply(&state);
        record(u.label(), &state)?;
    }

    let q1 = matter_observable_set(1);
    let q2 = matter_observable_set(2);
    let initial_matter = pure_state_from_density(&steps[0].matter)?;
    let final_matter = pure_state_from_density(&steps[steps.len() - 1].matter)?;
    let initial_report = uncorrelated_test(&initial_matter, &q1, &q2, Composition::MatrixProduct)?;
    let final_report = uncorrelated_test(&final_matter, &q1, &q2, Composition::MatrixProduct)?;

    let final_rho = final_matter.dyad();
    let rho_q1 = trace_q2(&final_rho)?;
    let rho_q2 = trace_q1(&final_rho)?;
    let key_correlation = Correlation {
        a_label: "X1".into(),
        b_label: "X2".into(),
        mean_a: local_x().expectation_in(&rho_q1).re,
        mean_b: local_x().expectation_in(&rho_q2).re,
        joint: (&embedded_x(1) * &embedded_x(2))
            .expectation(&final_matter)
            .re,
    };

    Ok(AnyonRun {
        trace: ProtocolTrace {
            model: ModelTag::Anyon,
            steps,
            initial_matter,
            final_matter,
            marginals: [rho_q1, rho_q2],
            key_correlation,
            initial_report,
            final_report,
        },
        checkpoints,
    })
}

pub fn run_anyon_protocol() -> Result<ProtocolTrace> {
    Ok(run_anyon_protocol_detailed()?.trace)
}
