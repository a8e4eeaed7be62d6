//! Entanglement certification shared by all three models.
//!
//! A pure bipartite state is uncorrelated when every pair of local
//! observables `(A, B)` satisfies `<A><B> = <A·B>`; a pure state that is not
//! uncorrelated is entangled. The condition is bilinear in `(A, B)`, so it is
//! enough to check it on a spanning set of each side's local observables.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::statecore::{tensor, ComplexScalar, OperatorMatrix, StateVector, EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Fermion,
    Anyon,
    #[serde(rename = "bitantibit")]
    BitAntibit,
}

impl ModelTag {
    pub fn name(self) -> &'static str {
        match self {
            ModelTag::Fermion => "fermion",
            ModelTag::Anyon => "anyon",
            ModelTag::BitAntibit => "bitantibit",
        }
    }
}

/// Hermitian observables of one subsystem.
#[derive(Clone, Debug)]
pub struct LocalObservableSet {
    pub label: String,
    pub matrices: Vec<OperatorMatrix>,
}

impl LocalObservableSet {
    pub fn new(label: &str, matrices: Vec<OperatorMatrix>) -> Self {
        Self {
            label: label.to_string(),
            matrices,
        }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// Checks Hermiticity and that every element commutes with every element
    /// of `complement` (both sets embedded in the same global space).
    pub fn validate_against(&self, complement: &Self, tol: f64) -> Result<()> {
        for (i, m) in self.matrices.iter().enumerate() {
            if !m.is_hermitian(tol) {
                return Err(Error::NotDensity(format!(
                    "{} observable {i} is not Hermitian",
                    self.label
                )));
            }
            for (j, n) in complement.matrices.iter().enumerate() {
                let norm = m.commutator(n).frobenius_norm();
                if norm > tol {
                    return Err(Error::BadPartition(format!(
                        "{}[{i}] and {}[{j}] do not commute (norm {norm:e})",
                        self.label, complement.label
                    )));
                }
            }
        }
        Ok(())
    }
}

/// How an element of each local set combines into a global observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Composition {
    /// Both sets are already embedded in the global space; compose with `A·B`.
    MatrixProduct,
    /// Sets act on the two tensor factors; compose with `A ⊗ B`.
    Tensor,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationEntry {
    pub a: usize,
    pub b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub joint: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub purity: f64,
    pub uncorrelated: bool,
    pub entangled: bool,
    /// Pair with the largest `|<A><B> - <A·B>|`; present only when it exceeds the tolerance.
    pub violating_pair: Option<(usize, usize)>,
    /// `<A><B>` of the maximal pair.
    pub lhs: f64,
    /// `<A·B>` of the maximal pair.
    pub rhs: f64,
    pub violation: f64,
    pub correlations: Vec<CorrelationEntry>,
}

/// A named observable pair evaluated on the final matter state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Correlation {
    pub a_label: String,
    pub b_label: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub joint: f64,
}

impl Correlation {
    pub fn product_of_means(&self) -> f64 {
        self.mean_a * self.mean_b
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolStep {
    pub label: String,
    /// Global state after this step.
    pub state: StateVector,
    pub mediator: OperatorMatrix,
    pub matter: OperatorMatrix,
}

/// Full record of one entanglement-mediation run.
#[derive(Clone, Debug)]
pub struct ProtocolTrace {
    pub model: ModelTag,
    pub steps: Vec<ProtocolStep>,
    pub initial_matter: StateVector,
    pub final_matter: StateVector,
    /// Final reduced states of the two matter systems.
    pub marginals: [OperatorMatrix; 2],
    pub key_correlation: Correlation,
    pub initial_report: WitnessReport,
    pub final_report: WitnessReport,
}

impl ProtocolTrace {
    pub fn final_step(&self) -> &ProtocolStep {
        self.steps
            .last()
            .expect("protocols record at least one step")
    }
}

/// `Tr(ρ²)` of a density operator.
pub fn purity(rho: &OperatorMatrix) -> Result<f64> {
    purity_with_tol(rho, EPS)
}

pub fn purity_with_tol(rho: &OperatorMatrix, tol: f64) -> Result<f64> {
    if !rho.is_density(tol) {
        return Err(Error::NotDensity(format!(
            "{}x{} operator is not a density operator",
            rho.dim(),
            rho.dim()
        )));
    }
    Ok((rho * rho).trace().re)
}

/// Recovers `|ψ>` (up to a global phase) from a pure density operator.
pub fn pure_state_from_density(rho: &OperatorMatrix) -> Result<StateVector> {
    let p = purity(rho)?;
    if (p - 1.0).abs() > EPS {
        return Err(Error::NotPure(p));
    }
    let k = (0..rho.dim())
        .max_by(|&a, &b| rho[(a, a)].re.total_cmp(&rho[(b, b)].re))
        .expect("nonempty");
    let scale = rho[(k, k)].re.sqrt();
    let amps = (0..rho.dim()).map(|i| rho[(i, k)] / scale).collect();
    Ok(StateVector::from_amplitudes(amps))
}

fn expectation(op: &OperatorMatrix, state: &StateVector) -> ComplexScalar {
    op.expectation(state)
}

/// Evaluates the uncorrelated-state condition on every pair with [`EPS`].
pub fn uncorrelated_test(
    state: &StateVector,
    a: &LocalObservableSet,
    b: &LocalObservableSet,
    composition: Composition,
) -> Result<WitnessReport> {
    uncorrelated_test_with_tol(state, a, b, composition, EPS)
}

pub fn uncorrelated_test_with_tol(
    state: &StateVector,
    a: &LocalObservableSet,
    b: &LocalObservableSet,
    composition: Composition,
    tol: f64,
) -> Result<WitnessReport> {
    let norm_sq = state.norm().powi(2);
    let purity = norm_sq * norm_sq;
    if (purity - 1.0).abs() > tol {
        return Err(Error::NotPure(purity));
    }

    let (means_a, means_b, joint_of): (Vec<_>, Vec<_>, Box<dyn Fn(usize, usize) -> ComplexScalar>) =
        match composition {
            Composition::MatrixProduct => {
                for m in a.matrices.iter().chain(&b.matrices) {
                    if m.dim() != state.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: state.dim(),
                            actual: m.dim(),
                        });
                    }
                }
                (
                    a.matrices.iter().map(|m| expectation(m, state)).collect(),
                    b.matrices.iter().map(|m| expectation(m, state)).collect(),
                    Box::new(|i, j| expectation(&(&a.matrices[i] * &b.matrices[j]), state)),
                )
            }
            Composition::Tensor => {
                let da = a.matrices.first().map_or(1, OperatorMatrix::dim);
                let db = b.matrices.first().map_or(1, OperatorMatrix::dim);
                if da * db != state.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: state.dim(),
                        actual: da * db,
                    });
                }
                let ia = OperatorMatrix::identity(da);
                let ib = OperatorMatrix::identity(db);
                (
                    a.matrices
                        .iter()
                        .map(|m| expectation(&tensor(m, &ib), state))
                        .collect(),
                    b.matrices
                        .iter()
                        .map(|m| expectation(&tensor(&ia, m), state))
                        .collect(),
                    Box::new(|i, j| expectation(&tensor(&a.matrices[i], &b.matrices[j]), state)),
                )
            }
        };

    let mut correlations = Vec::with_capacity(a.len() * b.len());
    let mut best: Option<(usize, usize, f64, ComplexScalar, ComplexScalar)> = None;
    for (i, ma) in means_a.iter().enumerate() {
        for (j, mb) in means_b.iter().enumerate() {
            let joint = joint_of(i, j);
            let lhs = ma * mb;
            let dev = (lhs - joint).norm();
            correlations.push(CorrelationEntry {
                a: i,
                b: j,
                mean_a: ma.re,
                mean_b: mb.re,
                joint: joint.re,
            });
            // ties (within tolerance) keep the lowest index pair
            if best.is_none_or(|(_, _, d, _, _)| dev > d + tol) {
                best = Some((i, j, dev, lhs, joint));
            }
        }
    }

    let (bi, bj, violation, lhs, rhs) = best.unwrap_or((
        0,
        0,
        0.0,
        ComplexScalar::default(),
        ComplexScalar::default(),
    ));
    let uncorrelated = violation <= tol;
    Ok(WitnessReport {
        purity,
        uncorrelated,
        entangled: !uncorrelated,
        violating_pair: (!uncorrelated).then_some((bi, bj)),
        lhs: lhs.re,
        rhs: rhs.re,
        violation,
        correlations,
    })
}

/// Singular values of `ψ` reshaped to a `dim_a × (dim/dim_a)` matrix, descending.
pub fn schmidt_coefficients(state: &StateVector, dim_a: usize) -> Result<Vec<f64>> {
    if dim_a == 0 || !state.dim().is_multiple_of(dim_a) {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            actual: dim_a,
        });
    }
    let dim_b = state.dim() / dim_a;
    let m = nalgebra::DMatrix::from_fn(dim_a, dim_b, |i, j| state[i * dim_b + j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Number of Schmidt coefficients above `tol`.
pub fn schmidt_rank(state: &StateVector, dim_a: usize, tol: f64) -> Result<usize> {
    Ok(schmidt_coefficients(state, dim_a)?
        .into_iter()
        .filter(|&s| s > tol)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statecore::{pauli_products, paulis, re, ZERO};

    fn bell() -> StateVector {
        let h = 1.0 / 2f64.sqrt();
        StateVector::from_amplitudes(vec![re(h), ZERO, ZERO, re(h)])
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&OperatorMatrix::from_real_diag(&[0.0, 1.0])).unwrap() - 1.0).abs() < EPS);
        assert!((purity(&OperatorMatrix::from_real_diag(&[0.5, 0.5])).unwrap() - 0.5).abs() < EPS);
        assert!(matches!(
            purity(&OperatorMatrix::from_real_diag(&[1.0, 1.0])),
            Err(Error::NotDensity(_))
        ));
    }

    #[test]
    fn product_basis_state_is_uncorrelated() {
        let p = pauli_products(1);
        let set = LocalObservableSet::new("q", p.to_vec());
        for k in 0..4 {
            let r = uncorrelated_test(&StateVector::basis(4, k), &set, &set, Composition::Tensor)
                .unwrap();
            assert!(r.uncorrelated, "basis state {k}");
            assert!(r.violating_pair.is_none());
        }
    }

    #[test]
    fn bell_state_is_entangled() {
        let set = LocalObservableSet::new("q", pauli_products(1));
        let r = uncorrelated_test(&bell(), &set, &set, Composition::Tensor).unwrap();
        assert!(r.entangled);
        // XX is the first pair reaching the maximal violation of 1
        assert_eq!(r.violating_pair, Some((1, 1)));
        assert!((r.lhs - 0.0).abs() < EPS);
        assert!((r.rhs - 1.0).abs() < EPS);
    }

    #[test]
    fn non_normalized_input_is_not_pure() {
        let set = LocalObservableSet::new("q", vec![paulis()[3].clone()]);
        let v = bell().scale(re(2.0));
        assert!(matches!(
            uncorrelated_test(&v, &set, &set, Composition::Tensor),
            Err(Error::NotPure(_))
        ));
    }

    #[test]
    fn schmidt_rank_of_bell_and_product() {
        assert_eq!(schmidt_rank(&bell(), 2, EPS).unwrap(), 2);
        assert_eq!(schmidt_rank(&StateVector::basis(4, 2), 2, EPS).unwrap(), 1);
        assert!(schmidt_rank(&bell(), 3, EPS).is_err());
    }

    #[test]
    fn recovers_pure_state() {
        let rho = bell().dyad();
        let v = pure_state_from_density(&rho).unwrap();
        assert!(v.dyad().approx_eq(&rho, EPS));
        assert!(matches!(
            pure_state_from_density(&OperatorMatrix::from_real_diag(&[0.5, 0.5])),
            Err(Error::NotPure(_))
        ));
    }
}
