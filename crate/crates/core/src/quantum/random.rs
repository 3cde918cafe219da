//! Seeded random states, unitaries, channels and POVMs.
//!
//! All generators take an explicit RNG so results are reproducible from a
//! seed. Haar unitaries come from the QR decomposition of a complex Ginibre
//! matrix with the phases of `R`'s diagonal divided out.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, ComplexVector, DensityMatrix, Povm, QuantumChannel};

/// Deterministic RNG used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unit vector in `C^d`.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    loop {
        let v = ComplexVector::from_fn(d, |_, _| gaussian(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::pure(&random_unit_vector(d, rng))
}

/// Random mixed state `G G^dagger / tr(G G^dagger)` with `G` a `d x rank` Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(m.unscale(tr))
}

/// Haar-random `d x d` unitary.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `rows x cols` isometry (`V^dagger V = I`), `rows >= cols`.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    haar_unitary(rows, rng).columns(0, cols).into_owned()
}

/// Splits a `(k*d) x d` isometry into `k` blocks `V_m` with `sum V_m^dagger V_m = I`.
fn isometry_blocks<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let v = random_isometry(k * d, d, rng);
    (0..k).map(|m| v.rows(m * d, d).into_owned()).collect()
}

/// Random channel from a Stinespring isometry with `kraus_count` Kraus operators.
pub fn random_channel<R: Rng + ?Sized>(d: usize, kraus_count: usize, rng: &mut R) -> QuantumChannel {
    QuantumChannel::from_kraus_unchecked(isometry_blocks(d, kraus_count.max(1), rng))
}

/// Random general POVM with `outcomes` elements `E_j = V_j^dagger V_j`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Povm {
    let elements = isometry_blocks(d, outcomes.max(1), rng)
        .into_iter()
        .map(|b| b.adjoint() * b)
        .collect();
    Povm::from_elements_unchecked(elements)
}

/// Random rank-one projective POVM from a Haar unitary's columns.
pub fn random_projective_povm<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Povm {
    Povm::from_unitary_columns(&haar_unitary(d, rng))
}

/// GUE-style Hermitian matrix with unit-variance entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// `exp(i * step * H)` for a random Hermitian `H`; equals the identity at `step = 0`.
pub fn near_identity_unitary<R: Rng + ?Sized>(d: usize, step: f64, rng: &mut R) -> ComplexMatrix {
    let h = random_hermitian(d, rng);
    let eig = h.symmetric_eigen();
    let phases = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
        d,
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, step * l)),
    ));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}
