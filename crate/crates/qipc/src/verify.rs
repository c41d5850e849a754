//! Seeded property suites.
//!
//! Each suite draws reproducible random inputs, measures the worst violation
//! of one contract and compares it against the contract's tolerance. The CLI
//! `verify` command and the test suites both run through here so the checks
//! are defined exactly once.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::info::{
    coherent_information, concurrence, entropy, holevo_chi, mutual_information,
};
use crate::instruments::{
    depolarizing_instrument, implements, induced_channel, luders_instrument, naimark_extension,
    parent_instrument, post_process, random_eve_instrument, random_instrument, Channel,
};
use crate::ipc::{
    chi_alice, ipc_modified, leak, memory_gap, old_ipc, old_ipc_generalized,
    sharp_relation_residual, MemoryContext,
};
use crate::linalg::{c64, ComplexMatrix, SubsystemDims};
use crate::measurements::{born_probabilities, marginals_of_joint, joint_label, luders_channel, Observable};
use crate::scenarios::{build_example2_state, run_example2, uniform_grid, Example2Config};
use crate::states::{random_density, random_unitary, Context, DensityMatrix, Ensemble};
use crate::Result;

/// Outcome of one suite run.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub tolerance: f64,
    pub max_violation: f64,
    pub passed: bool,
    pub note: String,
}

impl SuiteOutcome {
    fn new(name: &'static str, trials: usize, tolerance: f64, max_violation: f64) -> Self {
        Self {
            name,
            trials,
            tolerance,
            max_violation,
            passed: max_violation <= tolerance,
            note: String::new(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

type Suite = fn(u64, usize) -> Result<SuiteOutcome>;

/// Registered suites in execution order.
pub const SUITES: &[(&str, Suite)] = &[
    ("eig-reconstruction", suite_eig_reconstruction),
    ("kron-partial-trace", suite_kron_partial_trace),
    ("sqrt-psd", suite_sqrt_psd),
    ("random-density-rank", suite_random_density_rank),
    ("luders-idempotent", suite_luders_idempotent),
    ("model-instrument", suite_model_instrument),
    ("joint-marginals", suite_joint_marginals),
    ("naimark-parent", suite_naimark_parent),
    ("post-process-choi", suite_post_process_choi),
    ("holevo-bounds", suite_holevo_bounds),
    ("data-processing", suite_data_processing),
    ("entropy-concavity", suite_entropy_concavity),
    ("concurrence-family", suite_concurrence_family),
    ("leak-nonnegativity", suite_leak_nonnegativity),
    ("old-ipc-negativity", suite_old_ipc_negativity),
    ("parent-optimality", suite_parent_optimality),
    ("sharp-relation", suite_sharp_relation),
    ("memory-antisymmetry", suite_memory_antisymmetry),
    ("commuting-context", suite_commuting_context),
    ("example-sweep", suite_example_sweep),
];

/// Names of every registered suite.
pub fn available() -> Vec<&'static str> {
    SUITES.iter().map(|(name, _)| *name).collect()
}

/// Runs one suite by name.
pub fn run(name: &str, seed: u64, trials: usize) -> Option<Result<SuiteOutcome>> {
    SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f(seed, trials))
}

/// Runs every suite whose name contains `filter` (all when `None`).
pub fn run_filtered(filter: Option<&str>, seed: u64, trials: usize) -> Result<Vec<SuiteOutcome>> {
    let mut outcomes = Vec::new();
    for (name, suite) in SUITES {
        if let Some(f) = filter {
            if !name.contains(f) {
                continue;
            }
        }
        outcomes.push(suite(seed, trials)?);
    }
    Ok(outcomes)
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = c64(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
        }
    }
    m.add(&m.dagger()).scale(c64(0.5, 0.0)).hermitized()
}

fn suite_eig_reconstruction(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=8usize);
        let h = random_hermitian(dim, &mut rng);
        let (vals, vecs) = h.hermitian_eig()?;
        let mut recon = ComplexMatrix::zeros(dim, dim);
        for (k, lambda) in vals.iter().enumerate() {
            let v = vecs.column(k);
            recon = recon.add(&ComplexMatrix::outer(&v, &v).scale(c64(*lambda, 0.0)));
        }
        worst = worst.max(recon.max_abs_diff(&h));
        let gram = vecs.dagger().mul(&vecs);
        worst = worst.max(gram.max_abs_diff(&ComplexMatrix::identity(dim)));
    }
    Ok(SuiteOutcome::new("eig-reconstruction", trials, 1e-9, worst)
        .with_note("‖QΛQ†−H‖ and ‖Q†Q−I‖ on random Hermitian matrices"))
}

fn suite_kron_partial_trace(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let d1 = rng.random_range(2..=3usize);
        let d2 = rng.random_range(2..=3usize);
        let a = random_hermitian(d1, &mut rng);
        let b = random_hermitian(d2, &mut rng);
        let ab = a.kron(&b);
        let trace_product = (a.trace() * b.trace() - ab.trace()).norm();
        worst = worst.max(trace_product);

        let dims = SubsystemDims::new(vec![d1, d2])?;
        let full = ab.partial_trace(&dims, &[0, 1])?;
        worst = worst.max(full.max_abs_diff(&ab));
        let scalar = ab.partial_trace(&dims, &[0])?.trace() - ab.trace();
        worst = worst.max(scalar.norm());
    }
    Ok(
        SuiteOutcome::new("kron-partial-trace", trials, 1e-12, worst)
            .with_note("kron trace factorisation and trace preservation of partial traces"),
    )
}

fn suite_sqrt_psd(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=8usize);
        let rank = rng.random_range(1..=dim);
        let rho = random_density(dim, rank, rng.random::<u64>())?;
        let scale = rng.random::<f64>() * 3.0 + 0.1;
        let psd = rho.matrix().scale(c64(scale, 0.0)).hermitized();
        let root = psd.matrix_sqrt_psd()?;
        worst = worst.max(root.mul(&root).max_abs_diff(&psd));
        worst = worst.max((-root.hermitized().min_eigenvalue()?).max(0.0));
    }
    Ok(SuiteOutcome::new("sqrt-psd", trials, 1e-9, worst)
        .with_note("√M·√M = M and √M PSD for random PSD matrices up to dimension 8"))
}

fn suite_random_density_rank(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=4usize);
        let rank = rng.random_range(1..=dim);
        let rho = random_density(dim, rank, rng.random::<u64>())?;
        let above = rho.spectrum()?.iter().filter(|l| **l > 1e-9).count();
        worst = worst.max((above as f64 - rank as f64).abs());
        worst = worst.max((rho.matrix().trace().re - 1.0).abs());
    }
    Ok(SuiteOutcome::new("random-density-rank", trials, 1e-12, worst)
        .with_note("Ginibre states have exactly the requested rank and unit trace"))
}

fn suite_luders_idempotent(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=3usize);
        let basis = Observable::from_unitary_columns(&random_unitary(dim, rng.random::<u64>()))?;
        let channel = luders_channel(&basis)?;
        let rho = random_density(dim, dim, rng.random::<u64>())?;
        let once = channel.apply(&rho)?;
        let twice = channel.apply(&once)?;
        worst = worst.max(once.matrix().max_abs_diff(twice.matrix()));
        worst = worst.max((once.matrix().trace().re - 1.0).abs());
    }
    Ok(SuiteOutcome::new("luders-idempotent", trials, 1e-9, worst)
        .with_note("projective channels are idempotent and trace preserving"))
}

fn suite_model_instrument(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let d_s = rng.random_range(2..=3usize);
        let d_a = 2usize;
        let u = random_unitary(d_s * d_a, rng.random::<u64>());
        let ancilla = random_density(d_a, rng.random_range(1..=d_a), rng.random::<u64>())?;
        let pointer = Observable::from_unitary_columns(&random_unitary(d_a, rng.random::<u64>()))?;
        let model = crate::measurements::MeasurementModel::new(ancilla.clone(), u.clone(), pointer.clone())?;
        let inst = crate::measurements::model_to_instrument(&model)?;

        // Completeness of the condensed instrument.
        let total = inst
            .branches()
            .iter()
            .fold(ComplexMatrix::zeros(d_s, d_s), |acc, b| {
                acc.add(&b.total_effect())
            });
        worst = worst.max(total.max_abs_diff(&ComplexMatrix::identity(d_s)));

        // Outcome probabilities agree with the dilated picture.
        let rho = random_density(d_s, d_s, rng.random::<u64>())?;
        let joint = rho.tensor(&ancilla);
        let evolved = u.mul(joint.matrix()).mul(&u.dagger());
        for (x, effect) in pointer.effects().iter().enumerate() {
            let lifted = ComplexMatrix::identity(d_s).kron(effect);
            let expect = evolved.mul(&lifted).trace().re;
            let got = inst.branch(x).apply_matrix(rho.matrix()).trace().re;
            worst = worst.max((expect - got).abs());
        }

        // The induced channel equals the traced-out dilation.
        let dims = SubsystemDims::new(vec![d_s, d_a])?;
        let averaged = evolved.partial_trace(&dims, &[0])?;
        let channel = induced_channel(&inst)?;
        worst = worst.max(
            channel
                .kraus_map()
                .apply_matrix(rho.matrix())
                .max_abs_diff(&averaged),
        );
    }
    Ok(SuiteOutcome::new("model-instrument", trials, 1e-9, worst)
        .with_note("condensed instruments reproduce the dilated model's statistics and channel"))
}

fn suite_joint_marginals(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=3usize);
        let nx = rng.random_range(2..=3usize);
        let ny = rng.random_range(2..=3usize);
        let grid = Observable::random(dim, nx * ny, rng.random::<u64>())?;
        let labels: Vec<String> = (0..nx)
            .flat_map(|x| (0..ny).map(move |y| joint_label(&x.to_string(), &y.to_string())))
            .collect();
        let joint = Observable::new(labels, grid.effects().to_vec())?;
        let (a, b) = marginals_of_joint(&joint)?;
        let report_a = a.validate();
        let report_b = b.validate();
        worst = worst
            .max(report_a.hermiticity_violation)
            .max(report_a.psd_violation)
            .max(report_a.completeness_violation)
            .max(report_b.hermiticity_violation)
            .max(report_b.psd_violation)
            .max(report_b.completeness_violation);

        // Σ_y Tr[ρ G(x,y)] = Tr[ρ A(x)].
        let rho = random_density(dim, dim, rng.random::<u64>())?;
        let joint_probs = born_probabilities(&rho, &joint)?;
        let a_probs = born_probabilities(&rho, &a)?;
        for (x, pa) in a_probs.iter().enumerate() {
            let summed: f64 = (0..ny).map(|y| joint_probs[x * ny + y]).sum();
            worst = worst.max((summed - pa).abs());
        }
    }
    Ok(SuiteOutcome::new("joint-marginals", trials, 1e-9, worst)
        .with_note("marginals of random joint observables are valid and Born-consistent"))
}

fn suite_naimark_parent(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=3usize);
        let outcomes = rng.random_range(2..=4usize);
        let obs = Observable::random(dim, outcomes, rng.random::<u64>())?;
        let ext = naimark_extension(&obs)?;
        let gram = ext.isometry().dagger().mul(ext.isometry());
        worst = worst.max(gram.max_abs_diff(&ComplexMatrix::identity(dim)));
        for (x, effect) in obs.effects().iter().enumerate() {
            let pulled = ext
                .isometry()
                .dagger()
                .mul(ext.pvm().effect(x))
                .mul(ext.isometry());
            worst = worst.max(pulled.max_abs_diff(effect));
        }

        let parent = parent_instrument(&obs)?;
        if !implements(&parent, &obs)? {
            worst = worst.max(1.0);
        }
        let rho = random_density(dim, dim, rng.random::<u64>())?;
        let born = born_probabilities(&rho, &obs)?;
        for (x, b) in born.iter().enumerate() {
            let got = parent.branch(x).apply_matrix(rho.matrix()).trace().re;
            worst = worst.max((got - b).abs());
        }
    }
    Ok(SuiteOutcome::new("naimark-parent", trials, 1e-9, worst).with_note(
        "V†V = I, V†Â(x)V = A(x) and Tr[Φ_x(ρ)] = Tr[ρA(x)] over random POVMs",
    ))
}

fn suite_post_process_choi(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=3usize);
        let obs = Observable::random(dim, rng.random_range(2..=3usize), rng.random::<u64>())?;
        let parent = parent_instrument(&obs)?;
        let theta = Channel::random(parent.out_dim(), rng.random::<u64>());
        let processed = post_process(&theta, &parent)?;
        if !implements(&processed, &obs)? {
            worst = worst.max(1.0);
        }
        let lhs = induced_channel(&processed)?.choi_matrix();
        let rhs = theta.compose(&induced_channel(&parent)?)?.choi_matrix();
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    Ok(SuiteOutcome::new("post-process-choi", trials, 1e-9, worst)
        .with_note("post-processing preserves the observable and composes channels Choi-exactly"))
}

fn random_ensemble(dim: usize, rng: &mut ChaCha8Rng) -> Result<Ensemble> {
    let members = rng.random_range(2..=4usize);
    let mut weights: Vec<f64> = (0..members).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut list = Vec::with_capacity(members);
    for w in weights {
        let rank = rng.random_range(1..=dim);
        list.push((w, random_density(dim, rank, rng.random::<u64>())?));
    }
    Ensemble::new(list)
}

fn suite_holevo_bounds(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=3usize);
        let ensemble = random_ensemble(dim, &mut rng)?;
        let chi = holevo_chi(&ensemble)?;
        worst = worst.max(-chi);
        let avg_entropy = entropy(&ensemble.average_state()?)?;
        worst = worst.max(chi - avg_entropy);
    }
    Ok(SuiteOutcome::new("holevo-bounds", trials, 1e-9, worst)
        .with_note("0 ≤ χ(E) ≤ S(average state) on random ensembles"))
}

fn suite_data_processing(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let dim = if trial % 2 == 0 { 2 } else { 3 };
        let ensemble = random_ensemble(dim, &mut rng)?;
        let channel = Channel::random_with(dim, &mut rng);
        let mapped = ensemble.map_states(|s| channel.apply(s))?;
        worst = worst.max(holevo_chi(&mapped)? - holevo_chi(&ensemble)?);
    }
    Ok(SuiteOutcome::new("data-processing", trials, 1e-9, worst)
        .with_note("χ(Λ(E)) ≤ χ(E) for random channels on qubit and qutrit ensembles"))
}

fn suite_entropy_concavity(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=4usize);
        let a = random_density(dim, rng.random_range(1..=dim), rng.random::<u64>())?;
        let b = random_density(dim, rng.random_range(1..=dim), rng.random::<u64>())?;
        let mix = DensityMatrix::new(
            a.matrix()
                .scale(c64(0.5, 0.))
                .add(&b.matrix().scale(c64(0.5, 0.)))
                .hermitized(),
            SubsystemDims::single(dim),
        )?;
        let gap = 0.5 * entropy(&a)? + 0.5 * entropy(&b)? - entropy(&mix)?;
        worst = worst.max(gap);
    }
    Ok(SuiteOutcome::new("entropy-concavity", trials, 1e-9, worst)
        .with_note("S(½ρ+½σ) ≥ ½S(ρ)+½S(σ) on random pairs"))
}

fn suite_concurrence_family(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        // Pure Schmidt pair plus white noise; the closed form is
        // max(0, 2p√(α′β′) − (1−p)/2).
        let alpha_prime = rng.random::<f64>();
        let p = rng.random::<f64>();
        let psi = [
            c64(alpha_prime.sqrt(), 0.),
            c64(0., 0.),
            c64(0., 0.),
            c64((1.0 - alpha_prime).sqrt(), 0.),
        ];
        let pure = ComplexMatrix::outer(&psi, &psi);
        let rho = DensityMatrix::new(
            pure.scale(c64(p, 0.))
                .add(&ComplexMatrix::identity(4).scale(c64((1.0 - p) / 4.0, 0.)))
                .hermitized(),
            SubsystemDims::new(vec![2, 2])?,
        )?;
        let expect =
            (2.0 * p * (alpha_prime * (1.0 - alpha_prime)).sqrt() - (1.0 - p) / 2.0).max(0.0);
        worst = worst.max((concurrence(&rho)? - expect).abs());
    }
    Ok(SuiteOutcome::new("concurrence-family", trials, 1e-9, worst)
        .with_note("noisy Schmidt pairs match the closed-form concurrence"))
}

fn suite_leak_nonnegativity(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let dim = if trial % 2 == 0 { 2 } else { 3 };
        let rho = random_density(dim, rng.random_range(1..=dim), rng.random::<u64>())?;
        let alice = random_instrument(dim, rng.random_range(2..=3usize), rng.random::<u64>())?;
        let eve = random_eve_instrument(alice.out_dim(), rng.random::<u64>())?;
        let report = leak(&rho, &alice, &eve)?;
        worst = worst.max(-report.leak);
    }
    Ok(SuiteOutcome::new("leak-nonnegativity", trials, 1e-9, worst)
        .with_note("I^H ≥ 0 over random states, Alice instruments and Eve instruments"))
}

fn suite_old_ipc_negativity(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=3usize);
        let rho = random_density(dim, rng.random_range(1..=dim), rng.random::<u64>())?;
        let alice = random_instrument(dim, rng.random_range(2..=3usize), rng.random::<u64>())?;
        let out_dim = alice.out_dim();
        let eve_obs = Observable::random(out_dim, 2, rng.random::<u64>())?;
        let eta = random_density(out_dim, 1, rng.random::<u64>())?;
        let eve = depolarizing_instrument(&eve_obs, &eta)?;

        // The spectrum measure equals −S(Λ_A(ρ)) with a depolarising-to-pure
        // eavesdropper.
        let value = old_ipc_generalized(&rho, &alice, &eve)?;
        let after_alice = induced_channel(&alice)?.apply(&rho)?;
        worst = worst.max((value + entropy(&after_alice)?).abs());

        // While the leakage stays non-negative on the same inputs.
        worst = worst.max(-leak(&rho, &alice, &eve)?.leak);
    }
    Ok(SuiteOutcome::new("old-ipc-negativity", trials, 1e-9, worst)
        .with_note("spectrum measure hits −S(Λ_A(ρ)) where the leakage stays ≥ 0"))
}

fn suite_parent_optimality(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=3usize);
        let rho = random_density(dim, rng.random_range(1..=dim), rng.random::<u64>())?;
        let alice = random_instrument(dim, 2, rng.random::<u64>())?;
        let (_, ensemble) = chi_alice(&rho, &alice)?;

        let eve_obs = Observable::random(alice.out_dim(), 2, rng.random::<u64>())?;
        let parent = parent_instrument(&eve_obs)?;
        let parent_channel = induced_channel(&parent)?;
        let chi_parent = holevo_chi(&ensemble.map_states(|s| parent_channel.apply(s))?)?;

        // Every other eavesdropper compatible with the same observable
        // keeps at most as much Holevo information: degraded parents,
        // Lüders updates and depolarising readouts alike.
        let theta = Channel::random_with(parent.out_dim(), &mut rng);
        let degraded = theta.compose(&parent_channel)?;
        let chi_degraded = holevo_chi(&ensemble.map_states(|s| degraded.apply(s))?)?;
        worst = worst.max(chi_degraded - chi_parent);

        let luders = induced_channel(&luders_instrument(&eve_obs)?)?;
        let chi_luders = holevo_chi(&ensemble.map_states(|s| luders.apply(s))?)?;
        worst = worst.max(chi_luders - chi_parent);

        let eta = random_density(alice.out_dim(), 1, rng.random::<u64>())?;
        let depo = induced_channel(&depolarizing_instrument(&eve_obs, &eta)?)?;
        let chi_depo = holevo_chi(&ensemble.map_states(|s| depo.apply(s))?)?;
        worst = worst.max(chi_depo - chi_parent);
    }
    Ok(SuiteOutcome::new("parent-optimality", trials, 1e-9, worst)
        .with_note("no compatible eavesdropper retains more χ than the parent instrument"))
}

fn suite_sharp_relation(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let dim = if trial % 2 == 0 { 2 } else { 3 };
        let rho = random_density(dim, rng.random_range(1..=dim), rng.random::<u64>())?;
        let x = Observable::from_unitary_columns(&random_unitary(dim, rng.random::<u64>()))?;
        let y = Observable::from_unitary_columns(&random_unitary(dim, rng.random::<u64>()))?;
        worst = worst.max(sharp_relation_residual(&rho, &x, &y)?);
    }
    Ok(SuiteOutcome::new("sharp-relation", trials, 1e-9, worst)
        .with_note("generic leakage equals Σp_xS(N_Y(ρ_x)) − old_ipc on sharp rank-one contexts"))
}

fn suite_memory_antisymmetry(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let rank = rng.random_range(1..=4usize);
        let joint = random_density(4, rank, rng.random::<u64>())?
            .with_dims(SubsystemDims::new(vec![2, 2])?)?;
        let mc = MemoryContext::new(joint, Observable::pauli_z(), Observable::pauli_x())?;
        let gap = memory_gap(&mc)?;
        worst = worst.max(gap.old_gap);
        worst = worst.max(-gap.new_gap);
        worst = worst.max((gap.old_gap + gap.new_gap).abs());
    }
    Ok(SuiteOutcome::new("memory-antisymmetry", trials, 1e-9, worst)
        .with_note("old gap ≤ 0 ≤ new gap and the gaps cancel on random memory contexts"))
}

fn suite_commuting_context(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let dim = rng.random_range(2..=3usize);
        let rho = random_density(dim, rng.random_range(1..=dim), rng.random::<u64>())?;
        let x = Observable::from_unitary_columns(&random_unitary(dim, rng.random::<u64>()))?;
        if !x.commutes(&x)? {
            worst = worst.max(1.0);
        }
        let ctx = Context::new(rho, x.clone(), x)?;
        worst = worst.max(ipc_modified(&ctx)?.abs());
    }

    // A maximally mixed state separates the measures: the spectrum measure
    // vanishes, the leakage does not.
    let mixed = DensityMatrix::maximally_mixed(2)?;
    let old = old_ipc(&mixed, &Observable::pauli_z(), &Observable::pauli_x())?;
    let ctx = Context::new(mixed, Observable::pauli_z(), Observable::pauli_x())?;
    let new = ipc_modified(&ctx)?;
    worst = worst.max(old.abs());
    worst = worst.max((new - std::f64::consts::LN_2).abs());
    Ok(SuiteOutcome::new("commuting-context", trials, 1e-9, worst)
        .with_note("ipc vanishes on commuting pairs but not on the maximally mixed context"))
}

fn suite_example_sweep(seed: u64, trials: usize) -> Result<SuiteOutcome> {
    let _ = seed;
    let steps = trials.clamp(2, 101);
    let cfg = Example2Config {
        p_grid: uniform_grid(0.5, 1.0, steps),
        ..Default::default()
    };
    let sweep = run_example2(&cfg)?;
    let mut worst = 0.0f64;
    let x_obs = Observable::pauli_z();
    let y_obs = Observable::pauli_x();
    for row in &sweep.rows {
        let joint = build_example2_state(&cfg, row.p)?;
        let mc = MemoryContext::new(joint, x_obs.clone(), y_obs.clone())?;
        let n_x = luders_channel(&x_obs)?.kraus_map().tensor_identity(2);
        let rho_am = DensityMatrix::new(
            n_x.apply_matrix(mc.joint().matrix()).hermitized(),
            SubsystemDims::new(vec![2, 2])?,
        )?;

        // leak difference equals the surviving mutual information, by two
        // independent routes.
        worst = worst.max((row.leak_difference - mutual_information(&rho_am)?).abs());
        let a = rho_am.partial_trace(&[0])?;
        let m = rho_am.partial_trace(&[1])?;
        let recomputed = entropy(&m)? + entropy(&a)? - entropy(&rho_am)?;
        worst = worst.max((row.leak_difference - recomputed).abs());

        // σ_A after the first measurement is maximally mixed, and after the
        // second the pair decouples into I/2 ⊗ σ_M.
        worst = worst.max(
            a.matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(2)?.matrix()),
        );
        let n_y = luders_channel(&y_obs)?.kraus_map().tensor_identity(2);
        let rho_apm = DensityMatrix::new(
            n_y.apply_matrix(rho_am.matrix()).hermitized(),
            SubsystemDims::new(vec![2, 2])?,
        )?;
        let mem = rho_apm.partial_trace(&[1])?;
        let product = DensityMatrix::maximally_mixed(2)?.tensor(&mem);
        worst = worst.max(rho_apm.matrix().max_abs_diff(product.matrix()));

        // Coherent-information oracle for the gap.
        let expect_gap = coherent_information(&rho_am)? - coherent_information(&rho_apm)?;
        worst = worst.max((row.leak_difference - expect_gap).abs());
    }
    Ok(SuiteOutcome::new("example-sweep", sweep.rows.len(), 1e-9, worst)
        .with_note("sweep columns match the mutual-information and coherent-information oracles"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_smoke_counts() {
        for outcome in run_filtered(None, 0, 25).unwrap() {
            assert!(
                outcome.passed,
                "{} violated: {:.3e} > {:.3e}",
                outcome.name, outcome.max_violation, outcome.tolerance
            );
        }
    }

    #[test]
    fn filter_selects_subset() {
        let outcomes = run_filtered(Some("data-processing"), 0, 5).unwrap();
        assert_eq!(outcomes.len(), 1);
        assert_eq!(outcomes[0].name, "data-processing");
    }

    #[test]
    fn unknown_suite_is_none() {
        assert!(run("no-such-suite", 0, 1).is_none());
    }
}
