//! Quantum states, ensembles and contexts.
//!
//! Construction validates the physical invariants (Hermitian, PSD, unit
//! trace) once; after that a [`DensityMatrix`] is immutable and can be
//! shared freely. Random generators take explicit seeds so every property
//! suite is reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c64, clip_spectrum, C64, ComplexMatrix, SubsystemDims};
use crate::measurements::Observable;
use crate::{Error, Result, EPS_HERM, EPS_PSD, EPS_TRACE};

/// Trace-one positive Hermitian operator with declared subsystem structure.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: SubsystemDims,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace before accepting.
    pub fn new(matrix: ComplexMatrix, dims: SubsystemDims) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if dims.total() != matrix.rows() {
            return Err(Error::InvalidDims(format!(
                "dims {:?} do not partition dimension {}",
                dims.dims(),
                matrix.rows()
            )));
        }
        let violation = matrix.hermiticity_violation();
        if violation > EPS_HERM {
            return Err(Error::NotHermitian { violation });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > EPS_TRACE || tr.im.abs() > EPS_TRACE {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        let min = matrix.hermitized().min_eigenvalue()?;
        if min < -EPS_PSD {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self { matrix, dims })
    }

    /// Single-subsystem state of dimension `matrix.rows()`.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.rows();
        Self::new(matrix, SubsystemDims::single(d))
    }

    /// I_d / d.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let m = ComplexMatrix::identity(dim).scale(c64(1.0 / dim as f64, 0.0));
        Self::new(m, SubsystemDims::single(dim))
    }

    /// Normalised projector |v⟩⟨v| / ⟨v|v⟩.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::InvalidState(
                "pure state needs a non-zero finite vector".into(),
            ));
        }
        let m = ComplexMatrix::outer(v, v).scale(c64(1.0 / norm_sq, 0.0));
        Self::from_matrix(m)
    }

    /// Re-annotates the same operator with a subsystem split.
    pub fn with_dims(self, dims: SubsystemDims) -> Result<Self> {
        if dims.total() != self.matrix.rows() {
            return Err(Error::InvalidDims(format!(
                "dims {:?} do not partition dimension {}",
                dims.dims(),
                self.matrix.rows()
            )));
        }
        Ok(Self {
            matrix: self.matrix,
            dims,
        })
    }

    /// Seeded Ginibre-induced state G·G†/Tr of the requested rank.
    pub fn random(dim: usize, rank: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if rank == 0 || rank > dim {
            return Err(Error::InvalidRank { rank, dim });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ginibre(dim, rank, &mut rng);
        let gram = g.mul(&g.dagger()).hermitized();
        let tr = gram.trace().re;
        Self::new(
            gram.scale(c64(1.0 / tr, 0.0)).hermitized(),
            SubsystemDims::single(dim),
        )
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Eigenvalues ascending, roundoff-clipped to [0, ∞).
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let (eigenvalues, _) = self.matrix.hermitized().hermitian_eig()?;
        clip_spectrum(&eigenvalues)
    }

    /// Reduced state on the kept subsystems.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let reduced = self.matrix.partial_trace(&self.dims, keep)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        let kept_dims: Vec<usize> = keep_sorted
            .iter()
            .map(|&k| self.dims.dims()[k])
            .collect();
        DensityMatrix::new(reduced.hermitized(), SubsystemDims::new(kept_dims)?)
    }

    /// Tensor product, concatenating the subsystem annotations.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.dims().to_vec();
        dims.extend_from_slice(other.dims.dims());
        DensityMatrix {
            matrix: self.matrix.kron(&other.matrix),
            dims: SubsystemDims::new(dims).expect("non-empty dims"),
        }
    }
}

/// Probability-weighted list of states on a common space.
#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    /// Probabilities must lie in the unit interval and sum to 1 within 1e−9 (the sum is
    /// silently renormalised inside that band). Zero-probability members are
    /// kept; information functionals skip them with the 0·ln 0 = 0 convention.
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidState("ensemble needs at least one member".into()));
        }
        let dim = members[0].1.dim();
        let mut sum = 0.0;
        for (p, state) in &members {
            if !(-1e-12..=1.0 + 1e-9).contains(p) {
                return Err(Error::InvalidState(format!(
                    "ensemble probability {p} out of [0,1]"
                )));
            }
            if state.dim() != dim {
                return Err(Error::DimensionMismatch(
                    "ensemble members live on different spaces".into(),
                ));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > EPS_TRACE {
            return Err(Error::ProbabilitySum { sum });
        }
        let members = members
            .into_iter()
            .map(|(p, s)| (p.max(0.0) / sum, s))
            .collect();
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, DensityMatrix)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }

    /// Σ p_x ρ_x.
    pub fn average_state(&self) -> Result<DensityMatrix> {
        let dim = self.dim();
        let mut avg = ComplexMatrix::zeros(dim, dim);
        for (p, state) in &self.members {
            avg = avg.add(&state.matrix().scale(c64(*p, 0.0)));
        }
        DensityMatrix::new(avg.hermitized(), SubsystemDims::single(dim))
    }

    /// Pushes every member through a map of states, keeping the weights.
    pub fn map_states<F>(&self, mut f: F) -> Result<Ensemble>
    where
        F: FnMut(&DensityMatrix) -> Result<DensityMatrix>,
    {
        let mut members = Vec::with_capacity(self.members.len());
        for (p, state) in &self.members {
            members.push((*p, f(state)?));
        }
        Ensemble::new(members)
    }
}

/// A state and the two observables measured on it, in order.
///
/// The second observable must act on the space the first party's parent
/// instrument emits: the input space itself when the first observable is
/// sharp rank-one, the canonical dilation space d·n otherwise.
#[derive(Clone, Debug)]
pub struct Context {
    state: DensityMatrix,
    x_obs: Observable,
    y_obs: Observable,
}

impl Context {
    pub fn new(state: DensityMatrix, x_obs: Observable, y_obs: Observable) -> Result<Self> {
        if x_obs.dim() != state.dim() {
            return Err(Error::InvalidContext(format!(
                "first observable acts on dimension {}, state has {}",
                x_obs.dim(),
                state.dim()
            )));
        }
        let alice_out = if x_obs.is_sharp() && x_obs.is_rank_one() {
            state.dim()
        } else {
            state.dim() * x_obs.len()
        };
        if y_obs.dim() != alice_out {
            return Err(Error::InvalidContext(format!(
                "second observable acts on dimension {}, expected {}",
                y_obs.dim(),
                alice_out
            )));
        }
        Ok(Self {
            state,
            x_obs,
            y_obs,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn x_obs(&self) -> &Observable {
        &self.x_obs
    }

    pub fn y_obs(&self) -> &Observable {
        &self.y_obs
    }
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let normal = StandardNormal;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = normal.sample(rng);
        let im: f64 = normal.sample(rng);
        data.push(c64(re, im));
    }
    ComplexMatrix::new(rows, cols, data).expect("gaussian entries are finite")
}

/// Haar-random unitary: QR of a seeded Ginibre matrix with the R diagonal
/// fixed positive (modified Gram-Schmidt does both at once).
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    assert!(dim >= 1, "unitary dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(dim, &mut rng)
}

/// Same as [`random_unitary`] but drawing from a caller-owned generator.
pub fn random_unitary_with(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let mut cols: Vec<Vec<C64>> = (0..dim).map(|j| g.column(j)).collect();
    for j in 0..dim {
        let (done, rest) = cols.split_at_mut(j);
        let current = &mut rest[0];
        for prev in done.iter() {
            let inner: C64 = prev
                .iter()
                .zip(current.iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            for (c, p) in current.iter_mut().zip(prev.iter()) {
                *c -= p * inner;
            }
        }
        let norm: f64 = current.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in current.iter_mut() {
            *z /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Seeded random density matrix, full control over rank (see
/// [`DensityMatrix::random`]).
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    DensityMatrix::random(dim, rank, seed)
}
