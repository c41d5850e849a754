//! Quantum instruments in Kraus form.
//!
//! An instrument is an outcome-indexed family of CP trace-non-increasing
//! maps summing to a channel; it carries both the outcome statistics of an
//! observable and the post-measurement states. The module also builds the
//! canonical Naimark extension of a POVM and the parent instrument every
//! compatible channel post-processes from.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{c64, ComplexMatrix, SubsystemDims};
use crate::measurements::Observable;
use crate::states::{random_unitary_with, DensityMatrix, Ensemble};
use crate::{Error, Result, EPS_TRACE, WEIGHT_FLOOR};

/// Completely positive trace-non-increasing map as a list of Kraus operators.
#[derive(Clone, Debug)]
pub struct KrausMap {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausMap {
    /// Validates shapes and the trace-non-increasing bound Σ K†K ≼ I.
    pub fn new(in_dim: usize, out_dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidInstrument("empty Kraus list".into()));
        }
        for k in &kraus {
            if k.rows() != out_dim || k.cols() != in_dim {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    out_dim,
                    in_dim
                )));
            }
        }
        let map = Self {
            in_dim,
            out_dim,
            kraus,
        };
        let excess = map.total_effect().sub(&ComplexMatrix::identity(in_dim));
        let (vals, _) = excess.hermitized().hermitian_eig()?;
        if let Some(max) = vals.last() {
            if *max > EPS_TRACE {
                return Err(Error::InvalidInstrument(format!(
                    "map increases trace (largest excess eigenvalue {max:.3e})"
                )));
            }
        }
        Ok(map)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Σ_k K_k† K_k.
    pub fn total_effect(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            acc = acc.add(&k.dagger().mul(k));
        }
        acc.hermitized()
    }

    /// Σ_k K_k M K_k† on a raw operator.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            acc = acc.add(&k.mul(m).mul(&k.dagger()));
        }
        acc
    }

    /// Tensors the map with an identity on a trailing factor of dimension `d`.
    pub fn tensor_identity(&self, d: usize) -> KrausMap {
        let id = ComplexMatrix::identity(d);
        KrausMap {
            in_dim: self.in_dim * d,
            out_dim: self.out_dim * d,
            kraus: self.kraus.iter().map(|k| k.kron(&id)).collect(),
        }
    }

    /// Unnormalised Choi operator Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|).
    ///
    /// Two Kraus lists describe the same map iff their Choi operators agree,
    /// so equality of maps is always tested here, never on the Kraus lists.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let d_in = self.in_dim;
        let d_out = self.out_dim;
        let mut choi = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
        for i in 0..d_in {
            for j in 0..d_in {
                let mut unit = ComplexMatrix::zeros(d_in, d_in);
                unit[(i, j)] = c64(1.0, 0.0);
                let block = self.apply_matrix(&unit);
                for r in 0..d_out {
                    for c in 0..d_out {
                        choi[(i * d_out + r, j * d_out + c)] = block[(r, c)];
                    }
                }
            }
        }
        choi
    }
}

/// Trace-preserving Kraus map.
#[derive(Clone, Debug)]
pub struct Channel {
    map: KrausMap,
}

impl Channel {
    pub fn new(map: KrausMap) -> Result<Self> {
        let defect = map
            .total_effect()
            .max_abs_diff(&ComplexMatrix::identity(map.in_dim));
        if defect > EPS_TRACE {
            return Err(Error::InvalidInstrument(format!(
                "channel is not trace preserving (defect {defect:.3e})"
            )));
        }
        Ok(Self { map })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            map: KrausMap::new(dim, dim, vec![ComplexMatrix::identity(dim)]).unwrap(),
        }
    }

    pub fn from_unitary(u: ComplexMatrix) -> Result<Self> {
        let d = u.rows();
        Self::new(KrausMap::new(d, d, vec![u])?)
    }

    /// Completely depolarising channel T ↦ Tr(T)·η.
    pub fn depolarizing_to(eta: &DensityMatrix, in_dim: usize) -> Result<Self> {
        let (vals, vecs) = eta.matrix().hermitized().hermitian_eig()?;
        let mut kraus = Vec::new();
        for (j, lambda) in vals.iter().enumerate() {
            if *lambda <= WEIGHT_FLOOR {
                continue;
            }
            let e_j = vecs.column(j);
            for k in 0..in_dim {
                let mut basis = vec![c64(0., 0.); in_dim];
                basis[k] = c64(1., 0.);
                kraus.push(ComplexMatrix::outer(&e_j, &basis).scale(c64(lambda.sqrt(), 0.0)));
            }
        }
        Self::new(KrausMap::new(in_dim, eta.dim(), kraus)?)
    }

    /// Seeded random channel from a Stinespring dilation with a qubit
    /// environment: K_j = (I⊗⟨j|) U (I⊗|0⟩).
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(dim, &mut rng)
    }

    pub fn random_with(dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let env = 2;
        let u = random_unitary_with(dim * env, rng);
        let id = ComplexMatrix::identity(dim);
        let ket0 = ComplexMatrix::col_vector(&[c64(1., 0.), c64(0., 0.)]);
        let embed = id.kron(&ket0);
        let mut kraus = Vec::with_capacity(env);
        for j in 0..env {
            let mut bra = ComplexMatrix::zeros(1, env);
            bra[(0, j)] = c64(1., 0.);
            let project = id.kron(&bra);
            kraus.push(project.mul(&u).mul(&embed));
        }
        Self::new(KrausMap::new(dim, dim, kraus).unwrap()).unwrap()
    }

    pub fn in_dim(&self) -> usize {
        self.map.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.map.out_dim
    }

    pub fn kraus_map(&self) -> &KrausMap {
        &self.map
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.map.in_dim {
            return Err(Error::DimensionMismatch(format!(
                "state dimension {} vs channel input {}",
                rho.dim(),
                self.map.in_dim
            )));
        }
        DensityMatrix::new(
            self.map.apply_matrix(rho.matrix()).hermitized(),
            SubsystemDims::single(self.map.out_dim),
        )
    }

    /// Concatenation self ∘ other.
    pub fn compose(&self, other: &Channel) -> Result<Channel> {
        if self.in_dim() != other.out_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}→{} after {}→{}",
                self.in_dim(),
                self.out_dim(),
                other.in_dim(),
                other.out_dim()
            )));
        }
        let mut kraus = Vec::with_capacity(self.map.kraus.len() * other.map.kraus.len());
        for t in &self.map.kraus {
            for k in &other.map.kraus {
                kraus.push(t.mul(k));
            }
        }
        Channel::new(KrausMap::new(other.in_dim(), self.out_dim(), kraus)?)
    }

    pub fn choi_matrix(&self) -> ComplexMatrix {
        self.map.choi_matrix()
    }
}

/// Outcome-indexed CP maps whose sum is a channel.
#[derive(Clone, Debug)]
pub struct Instrument {
    labels: Vec<String>,
    branches: Vec<KrausMap>,
}

impl Instrument {
    pub fn new<L: Into<String>>(labels: Vec<L>, branches: Vec<KrausMap>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidInstrument("no branches".into()));
        }
        if labels.len() != branches.len() {
            return Err(Error::InvalidInstrument(format!(
                "{} labels for {} branches",
                labels.len(),
                branches.len()
            )));
        }
        let in_dim = branches[0].in_dim;
        let out_dim = branches[0].out_dim;
        for b in &branches {
            if b.in_dim != in_dim || b.out_dim != out_dim {
                return Err(Error::DimensionMismatch(
                    "instrument branches disagree on dimensions".into(),
                ));
            }
        }
        let mut total = ComplexMatrix::zeros(in_dim, in_dim);
        for b in &branches {
            total = total.add(&b.total_effect());
        }
        let defect = total.max_abs_diff(&ComplexMatrix::identity(in_dim));
        if defect > EPS_TRACE {
            return Err(Error::InvalidInstrument(format!(
                "branch effects do not sum to identity (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            labels: labels.into_iter().map(Into::into).collect(),
            branches,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn branches(&self) -> &[KrausMap] {
        &self.branches
    }

    pub fn branch(&self, x: usize) -> &KrausMap {
        &self.branches[x]
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn in_dim(&self) -> usize {
        self.branches[0].in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.branches[0].out_dim
    }

    /// One-line descriptor used in reports.
    pub fn describe(&self) -> String {
        format!(
            "instrument({} outcomes, {}→{}, {} Kraus operators)",
            self.len(),
            self.in_dim(),
            self.out_dim(),
            self.branches.iter().map(|b| b.kraus.len()).sum::<usize>()
        )
    }

    /// The observable whose statistics this instrument reproduces:
    /// A(x) = Σ_k K_{x,k}† K_{x,k}.
    pub fn implemented_observable(&self) -> Result<Observable> {
        Observable::new(
            self.labels.clone(),
            self.branches.iter().map(|b| b.total_effect()).collect(),
        )
    }
}

/// Applies one instrument branch: outcome weight and normalised post-state
/// (none when the branch weight vanishes).
pub fn apply_branch(
    phi: &KrausMap,
    rho: &DensityMatrix,
) -> Result<(f64, Option<DensityMatrix>)> {
    if rho.dim() != phi.in_dim {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs branch input {}",
            rho.dim(),
            phi.in_dim
        )));
    }
    let raw = phi.apply_matrix(rho.matrix());
    let weight = raw.trace().re;
    if weight <= WEIGHT_FLOOR {
        return Ok((weight.max(0.0), None));
    }
    let state = DensityMatrix::new(
        raw.scale(c64(1.0 / weight, 0.0)).hermitized(),
        SubsystemDims::single(phi.out_dim),
    )?;
    Ok((weight, Some(state)))
}

/// Runs every branch on ρ and collects the surviving outcomes into an
/// ensemble {p_x, Φ_x(ρ)/p_x}.
pub fn apply_instrument(inst: &Instrument, rho: &DensityMatrix) -> Result<Ensemble> {
    let mut members = Vec::with_capacity(inst.len());
    for phi in &inst.branches {
        let (weight, state) = apply_branch(phi, rho)?;
        if let Some(state) = state {
            members.push((weight, state));
        }
    }
    Ensemble::new(members)
}

/// The channel Λ(ρ) = Σ_x Φ_x(ρ) obtained by forgetting the outcome.
pub fn induced_channel(inst: &Instrument) -> Result<Channel> {
    let mut kraus = Vec::new();
    for b in &inst.branches {
        kraus.extend(b.kraus.iter().cloned());
    }
    Channel::new(KrausMap::new(inst.in_dim(), inst.out_dim(), kraus)?)
}

/// True iff the instrument implements the observable: Σ_k K_{x,k}†K_{x,k} =
/// A(x) for every outcome (the operator form of Tr[ρA(x)] = Tr[Φ_x(ρ)]).
pub fn implements(inst: &Instrument, obs: &Observable) -> Result<bool> {
    if inst.labels() != obs.labels() {
        return Err(Error::LabelMismatch(format!(
            "instrument outcomes {:?} vs observable outcomes {:?}",
            inst.labels(),
            obs.labels()
        )));
    }
    if inst.in_dim() != obs.dim() {
        return Err(Error::DimensionMismatch(format!(
            "instrument input {} vs observable dimension {}",
            inst.in_dim(),
            obs.dim()
        )));
    }
    for (b, e) in inst.branches.iter().zip(obs.effects()) {
        if b.total_effect().max_abs_diff(e) > EPS_TRACE {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Instrument with the single Kraus operator √A(x) per outcome; the standard
/// generalisation of the projective Lüders update to unsharp effects.
pub fn luders_instrument(obs: &Observable) -> Result<Instrument> {
    let d = obs.dim();
    let mut branches = Vec::with_capacity(obs.len());
    for e in obs.effects() {
        let root = e.hermitized().matrix_sqrt_psd()?;
        branches.push(KrausMap::new(d, d, vec![root])?);
    }
    Instrument::new(obs.labels().to_vec(), branches)
}

/// Isometry into a larger space on which the observable becomes projective.
#[derive(Clone, Debug)]
pub struct NaimarkExtension {
    isometry: ComplexMatrix,
    pvm: Observable,
    k_dim: usize,
}

impl NaimarkExtension {
    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    pub fn pvm(&self) -> &Observable {
        &self.pvm
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }
}

/// Canonical Naimark extension on K = H ⊗ C^n:
/// V|ψ⟩ = Σ_x (√A(x)|ψ⟩) ⊗ |x⟩ with the pointer PVM Â(x) = I ⊗ |x⟩⟨x|,
/// so that V†Â(x)V = A(x).
pub fn naimark_extension(obs: &Observable) -> Result<NaimarkExtension> {
    let d = obs.dim();
    let n = obs.len();
    let k_dim = d * n;
    let mut isometry = ComplexMatrix::zeros(k_dim, d);
    let mut pvm_effects = Vec::with_capacity(n);
    for (x, effect) in obs.effects().iter().enumerate() {
        let root = effect.hermitized().matrix_sqrt_psd()?;
        for i in 0..d {
            for j in 0..d {
                // Composite index (i, x) with the outcome slot second.
                isometry[(i * n + x, j)] = root[(i, j)];
            }
        }
        let mut outcome = ComplexMatrix::zeros(n, n);
        outcome[(x, x)] = c64(1., 0.);
        pvm_effects.push(ComplexMatrix::identity(d).kron(&outcome));
    }
    let pvm = Observable::new(obs.labels().to_vec(), pvm_effects)?;
    Ok(NaimarkExtension {
        isometry,
        pvm,
        k_dim,
    })
}

/// Parent instrument of an observable: branch x acts as ρ ↦ Â(x)VρV†Â(x).
///
/// Every channel compatible with the observable is a post-processing of the
/// induced parent channel. Sharp rank-one observables take the V = I
/// shortcut, which collapses the parent to the Lüders instrument on the
/// original space; `parent_instrument_dilated` forces the full dilation.
pub fn parent_instrument(obs: &Observable) -> Result<Instrument> {
    if obs.is_sharp() && obs.is_rank_one() {
        return luders_instrument(obs);
    }
    parent_instrument_dilated(obs)
}

/// Parent instrument through the canonical dilation regardless of sharpness.
pub fn parent_instrument_dilated(obs: &Observable) -> Result<Instrument> {
    let ext = naimark_extension(obs)?;
    let d = obs.dim();
    let mut branches = Vec::with_capacity(obs.len());
    for effect in ext.pvm.effects() {
        let k = effect.mul(&ext.isometry);
        branches.push(KrausMap::new(d, ext.k_dim, vec![k])?);
    }
    Instrument::new(obs.labels().to_vec(), branches)
}

/// Instrument whose branch y acts as ρ ↦ Tr[ρB(y)]·η: it implements the
/// observable while completely depolarising every post-measurement state.
pub fn depolarizing_instrument(obs: &Observable, eta: &DensityMatrix) -> Result<Instrument> {
    let d = obs.dim();
    let d_out = eta.dim();
    let (eta_vals, eta_vecs) = eta.matrix().hermitized().hermitian_eig()?;
    let mut branches = Vec::with_capacity(obs.len());
    for effect in obs.effects() {
        let root = effect.hermitized().matrix_sqrt_psd()?;
        let mut kraus = Vec::new();
        for (j, lambda) in eta_vals.iter().enumerate() {
            if *lambda <= WEIGHT_FLOOR {
                continue;
            }
            let e_j = eta_vecs.column(j);
            for k in 0..d {
                let mut basis = vec![c64(0., 0.); d];
                basis[k] = c64(1., 0.);
                let bra_w = ComplexMatrix::outer(&e_j, &basis).mul(&root);
                kraus.push(bra_w.scale(c64(lambda.sqrt(), 0.0)));
            }
        }
        if kraus.is_empty() {
            kraus.push(ComplexMatrix::zeros(d_out, d));
        }
        branches.push(KrausMap::new(d, d_out, kraus)?);
    }
    Instrument::new(obs.labels().to_vec(), branches)
}

/// Feeds every branch of an instrument through a channel; the result still
/// implements the same observable.
pub fn post_process(theta: &Channel, inst: &Instrument) -> Result<Instrument> {
    if theta.in_dim() != inst.out_dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel input {} vs instrument output {}",
            theta.in_dim(),
            inst.out_dim()
        )));
    }
    let mut branches = Vec::with_capacity(inst.len());
    for b in &inst.branches {
        let mut kraus = Vec::with_capacity(b.kraus.len() * theta.kraus_map().kraus.len());
        for t in &theta.kraus_map().kraus {
            for k in &b.kraus {
                kraus.push(t.mul(k));
            }
        }
        branches.push(KrausMap::new(inst.in_dim(), theta.out_dim(), kraus)?);
    }
    Instrument::new(inst.labels.clone(), branches)
}

/// Random member of the compatible-instrument family of a random POVM: the
/// parent instrument post-processed by a random unitary channel.
pub fn random_instrument(dim: usize, outcomes: usize, seed: u64) -> Result<Instrument> {
    let obs = Observable::random(dim, outcomes, seed)?;
    let parent = parent_instrument(&obs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    let u = random_unitary_with(parent.out_dim(), &mut rng);
    post_process(&Channel::from_unitary(u)?, &parent)
}

/// Random instrument on `dim` with a mix of Eve-style behaviours: parent,
/// Lüders, depolarising or post-processed parent, chosen by the seed.
pub fn random_eve_instrument(dim: usize, seed: u64) -> Result<Instrument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcomes = rng.random_range(2..=3usize);
    let obs = Observable::random(dim, outcomes, rng.random::<u64>())?;
    match rng.random_range(0..4u8) {
        0 => parent_instrument(&obs),
        1 => luders_instrument(&obs),
        2 => {
            // Completely depolarising Eve, sometimes to a pure target.
            let rank = if rng.random::<bool>() { 1 } else { dim };
            let eta = DensityMatrix::random(dim, rank, rng.random::<u64>())?;
            depolarizing_instrument(&obs, &eta)
        }
        _ => {
            let parent = parent_instrument(&obs)?;
            let u = random_unitary_with(parent.out_dim(), &mut rng);
            post_process(&Channel::from_unitary(u)?, &parent)
        }
    }
}
