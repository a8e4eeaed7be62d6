//! Dense complex linear algebra shared by every model.
//!
//! All matrices are square and stored row-major. Tensor products use the
//! row-major Kronecker convention: the pair `(i, j)` of a `dim_a x dim_b`
//! product maps to index `i * dim_b + j`. Partial traces, embeddings and every
//! model-specific basis in this crate follow that convention.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout. Equality is never exact; see [`approx_eq`].
pub type ComplexScalar = Complex64;

/// Global tolerance for equality checks and verdicts.
pub const EPS: f64 = 1e-10;

/// Relative threshold under which a vector is treated as linearly dependent
/// on the ones already accepted by an [`OrthoBasis`].
pub const RANK_TOL: f64 = 1e-9;

pub const ZERO: ComplexScalar = Complex64::new(0.0, 0.0);
pub const ONE: ComplexScalar = Complex64::new(1.0, 0.0);
pub const I: ComplexScalar = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> ComplexScalar {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> ComplexScalar {
    Complex64::new(x, 0.0)
}

/// `|a - b| <= tol`.
#[inline]
pub fn approx_eq(a: ComplexScalar, b: ComplexScalar, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    data: Vec<ComplexScalar>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> ComplexScalar) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<ComplexScalar>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Convenience for real-valued literals; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<ComplexScalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| re(x)).collect())
            .collect();
        Self::from_rows(&rows).expect("square literal")
    }

    pub fn from_diag(diag: &[ComplexScalar]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_diag(&diag.iter().map(|&x| re(x)).collect::<Vec<_>>())
    }

    /// `|a><b|`.
    pub fn outer(a: &StateVector, b: &StateVector) -> Self {
        assert_eq!(a.dim(), b.dim(), "outer product of mismatched vectors");
        Self::from_fn(a.dim(), |i, j| a[i] * b[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[ComplexScalar] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[ComplexScalar]> {
        self.data.chunks(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, k: ComplexScalar) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * k).collect(),
        }
    }

    pub fn trace(&self) -> ComplexScalar {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "comparing mismatched operators");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim)
            .all(|i| (i..self.dim).all(|j| approx_eq(self[(i, j)], self[(j, i)].conj(), tol)))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self * &self.adjoint()).approx_eq(&Self::identity(self.dim), tol)
    }

    /// Hermitian, unit trace, and no eigenvalue below `-tol`.
    pub fn is_density(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && approx_eq(self.trace(), ONE, tol)
            && self.hermitian_eigenvalues().iter().all(|&ev| ev >= -tol)
    }

    /// Off-diagonal entries all within `tol` of zero.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (self + &self.adjoint()).scale(re(0.5));
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| h[(i, j)]);
        let mut evs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        evs.sort_by(|a, b| a.total_cmp(b));
        evs
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.dim(), "applying operator to mismatched vector");
        StateVector::from_amplitudes(
            self.rows()
                .map(|row| row.iter().zip(v.amplitudes()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// `<v|M|v>`.
    pub fn expectation(&self, v: &StateVector) -> ComplexScalar {
        v.inner(&self.apply(v))
    }

    /// `Tr(M rho)`.
    pub fn expectation_in(&self, rho: &Self) -> ComplexScalar {
        (self * rho).trace()
    }

    /// Row-major flattening into a `dim^2` vector.
    pub fn vectorize(&self) -> Vec<ComplexScalar> {
        self.data.clone()
    }
}

impl Index<(usize, usize)> for OperatorMatrix {
    type Output = ComplexScalar;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &ComplexScalar {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for OperatorMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexScalar {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "multiplying mismatched operators");
        let n = self.dim;
        let mut out = OperatorMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "adding mismatched operators");
        OperatorMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim, rhs.dim, "subtracting mismatched operators");
        OperatorMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        self.scale(re(-1.0))
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorMatrix({}x{})", self.dim, self.dim)?;
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Pure state amplitudes. Not necessarily normalized; protocol entry points
/// check [`StateVector::is_normalized`].
#[derive(Clone, PartialEq, Debug)]
pub struct StateVector {
    amps: Vec<ComplexScalar>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<ComplexScalar>) -> Self {
        assert!(!amps.is_empty(), "state dimension must be positive");
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_amplitudes(vec![ZERO; dim])
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amps[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[ComplexScalar] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= EPS {
            return Err(Error::NotNormalized(n));
        }
        Ok(self.scale(re(1.0 / n)))
    }

    /// Errors unless the norm is already 1 within `tol`.
    pub fn require_normalized(&self, tol: f64) -> Result<()> {
        if self.is_normalized(tol) {
            Ok(())
        } else {
            Err(Error::NotNormalized(self.norm()))
        }
    }

    pub fn scale(&self, k: ComplexScalar) -> Self {
        Self::from_amplitudes(self.amps.iter().map(|&a| a * k).collect())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> ComplexScalar {
        assert_eq!(
            self.dim(),
            other.dim(),
            "inner product of mismatched vectors"
        );
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn dyad(&self) -> OperatorMatrix {
        OperatorMatrix::outer(self, self)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                out.push(a * b);
            }
        }
        Self::from_amplitudes(out)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "comparing mismatched vectors");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .amps
                .iter()
                .zip(&other.amps)
                .all(|(a, b)| approx_eq(*a, *b, tol))
    }

    /// Indices with `|amplitude| > tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > tol)
            .map(|(i, _)| i)
            .collect()
    }
}

impl Index<usize> for StateVector {
    type Output = ComplexScalar;
    fn index(&self, i: usize) -> &ComplexScalar {
        &self.amps[i]
    }
}

impl IndexMut<usize> for StateVector {
    fn index_mut(&mut self, i: usize) -> &mut ComplexScalar {
        &mut self.amps[i]
    }
}

/// Kronecker product `a ⊗ b`; entry `(i_a*dim_b + i_b, j_a*dim_b + j_b)` is
/// `a[i_a, j_a] * b[i_b, j_b]`.
pub fn tensor(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    let (da, db) = (a.dim(), b.dim());
    OperatorMatrix::from_fn(da * db, |i, j| a[(i / db, j / db)] * b[(i % db, j % db)])
}

/// Folds [`tensor`] left to right over `factors`.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a OperatorMatrix>) -> OperatorMatrix {
    let mut it = factors.into_iter();
    let first = it
        .next()
        .expect("tensor_all needs at least one factor")
        .clone();
    it.fold(first, |acc, f| tensor(&acc, f))
}

/// Splits a flat index into per-subsystem digits, most significant first.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

/// Standard partial trace. `dims` lists subsystem dimensions in tensor order
/// and `keep` the (0-based) subsystems that survive; the result orders the
/// kept subsystems as they appear in `dims`.
pub fn partial_trace(m: &OperatorMatrix, dims: &[usize], keep: &[usize]) -> Result<OperatorMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != m.dim() {
        return Err(Error::BadPartition(format!(
            "subsystem dims {dims:?} do not factor dimension {}",
            m.dim()
        )));
    }
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::BadPartition(format!(
            "keep set {keep:?} is not a nonempty subset of 0..{}",
            dims.len()
        )));
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        if kept[k] {
            return Err(Error::BadPartition(format!("subsystem {k} listed twice")));
        }
        kept[k] = true;
    }
    let kept_dims: Vec<usize> = (0..dims.len())
        .filter(|&k| kept[k])
        .map(|k| dims[k])
        .collect();
    let out_dim: usize = kept_dims.iter().product();

    let reduce = |ds: &[usize]| -> usize {
        ds.iter()
            .zip(dims)
            .zip(&kept)
            .filter(|(_, &k)| k)
            .fold(0, |acc, ((&digit, &d), _)| acc * d + digit)
    };

    let mut out = OperatorMatrix::zeros(out_dim);
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..total {
        digits(i, dims, &mut di);
        let ri = reduce(&di);
        for j in 0..total {
            digits(j, dims, &mut dj);
            let traced_match = (0..dims.len()).all(|k| kept[k] || di[k] == dj[k]);
            if traced_match {
                out[(ri, reduce(&dj))] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Outcome of a span-membership test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpanTest {
    pub decomposable: bool,
    /// Frobenius norm of the least-squares residual.
    pub residual: f64,
}

/// Orthonormal basis grown by modified Gram-Schmidt with one
/// re-orthogonalization pass.
#[derive(Clone, Debug, Default)]
pub struct OrthoBasis {
    vectors: Vec<Vec<ComplexScalar>>,
}

fn vdot(a: &[ComplexScalar], b: &[ComplexScalar]) -> ComplexScalar {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn vnorm(a: &[ComplexScalar]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl OrthoBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Component of `v` orthogonal to the current span.
    pub fn residual_vector(&self, v: &[ComplexScalar]) -> Vec<ComplexScalar> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for q in &self.vectors {
                let proj = vdot(q, &r);
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        r
    }

    /// Adds `v` if it is independent of the current span; returns whether it was added.
    pub fn push(&mut self, v: &[ComplexScalar]) -> bool {
        let scale = vnorm(v);
        if scale == 0.0 {
            return false;
        }
        let r = self.residual_vector(v);
        let rn = vnorm(&r);
        if rn <= RANK_TOL * scale {
            return false;
        }
        self.vectors.push(r.into_iter().map(|x| x / rn).collect());
        true
    }

    pub fn residual(&self, v: &[ComplexScalar]) -> f64 {
        vnorm(&self.residual_vector(v))
    }
}

/// Rank of a family of operators viewed as vectors in `dim^2` space.
pub fn operator_rank(ops: &[OperatorMatrix]) -> usize {
    let mut basis = OrthoBasis::new();
    for op in ops {
        basis.push(op.entries());
    }
    basis.rank()
}

/// Least-squares membership of `target` in the linear span of `basis`, using
/// the global [`EPS`] relative to `‖target‖`.
pub fn in_span(target: &OperatorMatrix, basis: &[OperatorMatrix]) -> SpanTest {
    in_span_with_tol(target, basis, EPS)
}

pub fn in_span_with_tol(target: &OperatorMatrix, basis: &[OperatorMatrix], tol: f64) -> SpanTest {
    let norm = target.frobenius_norm();
    if basis.is_empty() {
        return SpanTest {
            decomposable: false,
            residual: norm,
        };
    }
    let mut ortho = OrthoBasis::new();
    for b in basis {
        assert_eq!(b.dim(), target.dim(), "span basis of mismatched dimension");
        ortho.push(b.entries());
    }
    let residual = ortho.residual(target.entries());
    SpanTest {
        decomposable: residual <= tol * norm,
        residual,
    }
}

/// Single-qubit Pauli matrices in the order I, X, Y, Z.
pub fn paulis() -> [OperatorMatrix; 4] {
    [
        OperatorMatrix::identity(2),
        OperatorMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        OperatorMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).expect("2x2"),
        OperatorMatrix::from_real_diag(&[1.0, -1.0]),
    ]
}

/// All `4^n` tensor products of Paulis on `n` qubits: a Hermitian operator basis.
pub fn pauli_products(n: usize) -> Vec<OperatorMatrix> {
    let p = paulis();
    let mut out = vec![OperatorMatrix::identity(1)];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|acc| p.iter().map(move |q| tensor(acc, q)))
            .collect();
    }
    out
}
