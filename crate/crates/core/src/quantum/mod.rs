//! Finite-dimensional quantum states, channels and measurements.
//!
//! Everything here is a thin, validated layer over dense complex matrices.
//! Constructors reject invalid input instead of repairing it: a density
//! matrix that is slightly non-PSD or a Kraus family that leaks trace is an
//! error, never silently projected back.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod random;

/// Dense complex matrix used for every operator in the crate.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Absolute tolerances used by the validity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max entry of `|M - M^dagger|`.
    pub herm: f64,
    /// Smallest eigenvalue allowed is `-psd`.
    pub psd: f64,
    /// Frobenius deviation of `sum K^dagger K` from the identity.
    pub tp: f64,
    /// Frobenius deviation of `sum E_j` from the identity.
    pub povm: f64,
    pub trace: f64,
    pub prob: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-9,
            psd: 1e-9,
            tp: 1e-9,
            povm: 1e-9,
            trace: 1e-9,
            prob: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has NaN or infinite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error("Kraus operators are not trace preserving (||sum K^dagger K - I|| = {0:e})")]
    NotTracePreserving(f64),
    #[error("POVM elements do not sum to the identity (||sum E_j - I|| = {0:e})")]
    PovmIncomplete(f64),
    #[error("POVM element {index} is invalid: {reason}")]
    InvalidPovmElement { index: usize, reason: Box<QuantumError> },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator list is empty")]
    Empty,
    #[error("outcome {index} has probability with imaginary part {imag:e}")]
    ComplexProbability { index: usize, imag: f64 },
    #[error("outcome {index} has probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
}

pub type Result<T, E = QuantumError> = std::result::Result<T, E>;

fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(QuantumError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(QuantumError::NonFinite)
    }
}

/// Largest entry of `|M - M^dagger|`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part `(M + M^dagger) / 2`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// `tr(A B)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

fn identity_deviation(sum: &ComplexMatrix) -> f64 {
    let n = sum.nrows();
    (sum - ComplexMatrix::identity(n, n)).norm()
}

/// Rank-one projector `|v><v|`.
pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Computational basis vector `|i>` in dimension `d`.
pub fn basis_vector(d: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d);
    v[i] = ONE;
    v
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// A validated density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `m` as a quantum state. Does not repair the input.
    pub fn new(m: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        ensure_square(&m)?;
        ensure_finite(&m)?;
        let herm = hermiticity_defect(&m);
        if herm > tol.herm {
            return Err(QuantumError::NotHermitian(herm));
        }
        let min_ev = min_eigenvalue(&m);
        if min_ev < -tol.psd {
            return Err(QuantumError::NotPsd(min_ev));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(QuantumError::TraceNotOne(tr.re));
        }
        Ok(Self { matrix: m })
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// Pure state `|psi><psi|`; `psi` is normalized first.
    ///
    /// Panics if `psi` is the zero vector.
    pub fn pure(psi: &ComplexVector) -> Self {
        let norm = psi.norm();
        assert!(norm > 0.0, "pure state from zero vector");
        Self::from_matrix_unchecked(projector(&psi.unscale(norm)))
    }

    /// Computational basis state `|i><i|`.
    pub fn basis(d: usize, i: usize) -> Self {
        Self::pure(&basis_vector(d, i))
    }

    /// `I / d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_matrix_unchecked(ComplexMatrix::identity(d, d).unscale(d as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.matrix.kronecker(&other.matrix))
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &DensityMatrix, alpha: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(DensityMatrix::from_matrix_unchecked(
            self.matrix.scale(alpha) + other.matrix.scale(1.0 - alpha),
        ))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }
}

/// Trace-preserving completely positive map given by its Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

fn common_dim(ops: &[ComplexMatrix]) -> Result<usize> {
    let first = ops.first().ok_or(QuantumError::Empty)?;
    let d = ensure_square(first)?;
    for m in ops {
        let k = ensure_square(m)?;
        if k != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: k,
            });
        }
        ensure_finite(m)?;
    }
    Ok(d)
}

impl QuantumChannel {
    /// Validates the Kraus family: `sum K^dagger K = I` within `tol.tp`.
    pub fn new(kraus: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let dim = common_dim(&kraus)?;
        let sum = kraus
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        let dev = identity_deviation(&sum);
        if dev > tol.tp {
            return Err(QuantumError::NotTracePreserving(dev));
        }
        Ok(Self { dim, kraus })
    }

    pub(crate) fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Self {
        let dim = kraus[0].nrows();
        Self { dim, kraus }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus_unchecked(vec![ComplexMatrix::identity(d, d)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `sum_m K_m rho K_m^dagger`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        let out = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k * rho.matrix() * k.adjoint()
            });
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// `p(j) = tr(E(rho) E_j)` for every POVM element.
    pub fn outcome_probabilities(
        &self,
        rho: &DensityMatrix,
        povm: &Povm,
        tol: &Tolerances,
    ) -> Result<ProbVector> {
        if povm.dim() != self.dim {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim,
                found: povm.dim(),
            });
        }
        let sigma = self.apply(rho)?;
        povm.measure(&sigma, tol)
    }

    /// Product channel acting on `self ⊗ other`; Kraus operators are all
    /// pairwise Kronecker products.
    pub fn tensor(&self, other: &QuantumChannel) -> QuantumChannel {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kronecker(b)))
            .collect();
        QuantumChannel::from_kraus_unchecked(kraus)
    }
}

/// Positive operator-valued measure `{E_j}` with `sum E_j = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let dim = common_dim(&elements)?;
        for (index, e) in elements.iter().enumerate() {
            let wrap = |reason| QuantumError::InvalidPovmElement {
                index,
                reason: Box::new(reason),
            };
            let herm = hermiticity_defect(e);
            if herm > tol.herm {
                return Err(wrap(QuantumError::NotHermitian(herm)));
            }
            let min_ev = min_eigenvalue(e);
            if min_ev < -tol.psd {
                return Err(wrap(QuantumError::NotPsd(min_ev)));
            }
        }
        let dev = identity_deviation(&Self::sum(dim, &elements));
        if dev > tol.povm {
            return Err(QuantumError::PovmIncomplete(dev));
        }
        Ok(Self { dim, elements })
    }

    pub(crate) fn from_elements_unchecked(elements: Vec<ComplexMatrix>) -> Self {
        let dim = elements[0].nrows();
        Self { dim, elements }
    }

    fn sum(dim: usize, elements: &[ComplexMatrix]) -> ComplexMatrix {
        elements
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, e| acc + e)
    }

    /// Projective measurement in the computational basis.
    pub fn computational(d: usize) -> Self {
        Self::from_elements_unchecked((0..d).map(|i| projector(&basis_vector(d, i))).collect())
    }

    /// Rank-one projective measurement onto the columns of a unitary.
    pub fn from_unitary_columns(u: &ComplexMatrix) -> Self {
        let elements = (0..u.ncols())
            .map(|j| projector(&u.column(j).into_owned()))
            .collect();
        Self::from_elements_unchecked(elements)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes `N`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Frobenius norm of `sum E_j - I`.
    pub fn completeness_deviation(&self) -> f64 {
        identity_deviation(&Self::sum(self.dim, &self.elements))
    }

    /// Outcome distribution `tr(sigma E_j)` of an already-received state.
    pub fn measure(&self, sigma: &DensityMatrix, tol: &Tolerances) -> Result<ProbVector> {
        if sigma.dim() != self.dim {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim,
                found: sigma.dim(),
            });
        }
        let raw = self
            .elements
            .iter()
            .map(|e| trace_of_product(sigma.matrix(), e))
            .collect();
        ProbVector::from_complex(raw, tol)
    }

    /// Product measurement: outcome `(j, k)` maps to index `j * other.len() + k`.
    pub fn tensor(&self, other: &Povm) -> Povm {
        let elements = self
            .elements
            .iter()
            .flat_map(|a| other.elements.iter().map(move |b| a.kronecker(b)))
            .collect();
        Povm::from_elements_unchecked(elements)
    }
}

/// Outcome distribution, clamped to `[0, 1]` after validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    /// Accepts entries in `[-tol, 1 + tol]` summing to one within `tol`,
    /// then clamps to `[0, 1]`.
    pub fn new(probs: Vec<f64>, tol: f64) -> Result<Self> {
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() || value < -tol || value > 1.0 + tol {
                return Err(QuantumError::ProbabilityOutOfRange { index, value });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(QuantumError::NotNormalized(total));
        }
        Ok(Self {
            probs: probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect(),
        })
    }

    fn from_complex(raw: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        for (index, z) in raw.iter().enumerate() {
            if z.im.abs() >= tol.prob {
                return Err(QuantumError::ComplexProbability { index, imag: z.im });
            }
        }
        Self::new(raw.into_iter().map(|z| z.re).collect(), tol.prob)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}
