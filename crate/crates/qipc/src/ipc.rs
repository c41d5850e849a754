//! Context-incompatibility measures.
//!
//! Two generations of the measure live here. The spectrum-based one takes
//! the entropy difference of post-measurement states and can go negative
//! once the agents are allowed arbitrary instruments; the Holevo-based one
//! quantifies the information an eavesdropper drains out of the ensemble
//! and is non-negative by data processing. Both come with memory-conditioned
//! variants for a bipartite input whose second half is kept as a reference.

use crate::info::{entropy, holevo_chi};
use crate::instruments::{
    apply_instrument, induced_channel, parent_instrument, Channel, Instrument, KrausMap,
};
use crate::measurements::{luders_channel, Observable};
use crate::states::{Context, DensityMatrix, Ensemble};
use crate::{Error, Result, WEIGHT_FLOOR};

/// Outcome of one leakage computation: the Holevo information of the
/// ensemble Alice prepared, what is left of it after Eve's channel, and the
/// difference.
#[derive(Clone, Debug)]
pub struct LeakReport {
    pub chi_alice: f64,
    pub chi_after_eve: f64,
    pub leak: f64,
    pub alice_ensemble: Ensemble,
    pub eve_channel_id: String,
}

/// Entropy-difference incompatibility of a sharp context:
/// S(N_Y(N_X(ρ))) − S(N_X(ρ)).
pub fn old_ipc(rho: &DensityMatrix, x: &Observable, y: &Observable) -> Result<f64> {
    let n_x = luders_channel(x)?;
    let n_y = luders_channel(y)?;
    let after_x = n_x.apply(rho)?;
    let after_yx = n_y.apply(&after_x)?;
    Ok(entropy(&after_yx)? - entropy(&after_x)?)
}

/// The same entropy difference with arbitrary instruments for both parties,
/// using their induced channels. Exists to exhibit the failure mode of the
/// spectrum-based measure: with a depolarising-to-pure eavesdropper it is
/// −S(Λ_A(ρ)) ≤ 0.
pub fn old_ipc_generalized(
    rho: &DensityMatrix,
    inst_a: &Instrument,
    inst_b: &Instrument,
) -> Result<f64> {
    check_composable(inst_a, inst_b)?;
    let lambda_a = induced_channel(inst_a)?;
    let lambda_b = induced_channel(inst_b)?;
    let after_a = lambda_a.apply(rho)?;
    let after_ba = lambda_b.apply(&after_a)?;
    Ok(entropy(&after_ba)? - entropy(&after_a)?)
}

/// Holevo information χ(ρ, I_A) of the ensemble Alice's instrument prepares,
/// together with the ensemble itself.
pub fn chi_alice(rho: &DensityMatrix, inst_a: &Instrument) -> Result<(f64, Ensemble)> {
    let ensemble = apply_instrument(inst_a, rho)?;
    Ok((holevo_chi(&ensemble)?, ensemble))
}

/// Information leakage I^H = χ(ρ, I_A) − χ(ρ, I_A, I_B).
///
/// Eve's outcomes stay with Eve, so her instrument enters only through its
/// induced channel acting on every member of Alice's ensemble. Data
/// processing of the Holevo bound makes the leak non-negative.
pub fn leak(rho: &DensityMatrix, inst_a: &Instrument, inst_b: &Instrument) -> Result<LeakReport> {
    check_composable(inst_a, inst_b)?;
    let eve = induced_channel(inst_b)?;
    leak_through_channel(rho, inst_a, &eve, inst_b.describe())
}

fn check_composable(inst_a: &Instrument, inst_b: &Instrument) -> Result<()> {
    if inst_b.in_dim() != inst_a.out_dim() {
        return Err(Error::DimensionMismatch(format!(
            "eavesdropper instrument expects dimension {}, the first instrument outputs {}",
            inst_b.in_dim(),
            inst_a.out_dim()
        )));
    }
    Ok(())
}

fn leak_through_channel(
    rho: &DensityMatrix,
    inst_a: &Instrument,
    eve: &Channel,
    eve_channel_id: String,
) -> Result<LeakReport> {
    let (chi_a, ensemble) = chi_alice(rho, inst_a)?;
    let after_eve = ensemble.map_states(|state| eve.apply(state))?;
    let chi_b = holevo_chi(&after_eve)?;
    Ok(LeakReport {
        chi_alice: chi_a,
        chi_after_eve: chi_b,
        leak: chi_a - chi_b,
        alice_ensemble: ensemble,
        eve_channel_id,
    })
}

/// Leakage against the best eavesdropper implementing `y`: every
/// y-compatible channel factors through the parent channel, so by data
/// processing the parent instrument of `y` minimises the leak over the
/// whole y-compatible family.
pub fn min_leak_over_eve(
    rho: &DensityMatrix,
    inst_a: &Instrument,
    y: &Observable,
) -> Result<LeakReport> {
    if y.dim() != inst_a.out_dim() {
        return Err(Error::DimensionMismatch(format!(
            "eavesdropper observable acts on dimension {}, Alice's output is {}",
            y.dim(),
            inst_a.out_dim()
        )));
    }
    let eve = parent_instrument(y)?;
    leak(rho, inst_a, &eve)
}

/// The context-incompatibility measure: minimal leakage with both parties on
/// parent instruments, 𝔍(ρ, X, Y) = I^H(ρ, parent(X), parent(Y)).
pub fn ipc_modified(context: &Context) -> Result<f64> {
    let alice = parent_instrument(context.x_obs())?;
    let report = min_leak_over_eve(context.state(), &alice, context.y_obs())?;
    Ok(report.leak)
}

/// Residual between the generic leakage route and the closed form for sharp
/// rank-one contexts, 𝔍 = Σ_x p_x S(N_Y(ρ_x)) − old_ipc. Contract: ≤ 1e−9.
pub fn sharp_relation_residual(
    rho: &DensityMatrix,
    x: &Observable,
    y: &Observable,
) -> Result<f64> {
    for (name, obs) in [("first", x), ("second", y)] {
        if !obs.is_sharp() || !obs.is_rank_one() {
            return Err(Error::RequiresSharp(format!(
                "{name} observable must be sharp and rank-one"
            )));
        }
    }
    let context = Context::new(rho.clone(), x.clone(), y.clone())?;
    let generic = ipc_modified(&context)?;

    let n_y = luders_channel(y)?;
    let alice = apply_instrument(&parent_instrument(x)?, rho)?;
    let mut closed = -old_ipc(rho, x, y)?;
    for (p, state) in alice.members() {
        if *p <= 0.0 {
            continue;
        }
        closed += p * entropy(&n_y.apply(state)?)?;
    }
    Ok((generic - closed).abs())
}

/// Bipartite context: a joint state on A ⊗ M with two sharp rank-one
/// observables measured on the A side while M is kept untouched.
#[derive(Clone, Debug)]
pub struct MemoryContext {
    joint: DensityMatrix,
    x_obs: Observable,
    y_obs: Observable,
}

impl MemoryContext {
    pub fn new(joint: DensityMatrix, x_obs: Observable, y_obs: Observable) -> Result<Self> {
        if joint.dims().len() != 2 {
            return Err(Error::InvalidContext(format!(
                "memory context needs a bipartite state, got dims {:?}",
                joint.dims().dims()
            )));
        }
        let d_a = joint.dims().dims()[0];
        for (name, obs) in [("first", &x_obs), ("second", &y_obs)] {
            if obs.dim() != d_a {
                return Err(Error::InvalidContext(format!(
                    "{name} observable acts on dimension {}, subsystem A has {}",
                    obs.dim(),
                    d_a
                )));
            }
            if !obs.is_sharp() || !obs.is_rank_one() {
                return Err(Error::InvalidContext(format!(
                    "{name} observable must be a rank-one PVM in the memory setting"
                )));
            }
        }
        Ok(Self {
            joint,
            x_obs,
            y_obs,
        })
    }

    pub fn joint(&self) -> &DensityMatrix {
        &self.joint
    }

    pub fn x_obs(&self) -> &Observable {
        &self.x_obs
    }

    pub fn y_obs(&self) -> &Observable {
        &self.y_obs
    }

    /// Alice's marginal σ_in = Tr_M of the joint state.
    pub fn reduced_state(&self) -> Result<DensityMatrix> {
        self.joint.partial_trace(&[0])
    }

    fn mem_dim(&self) -> usize {
        self.joint.dims().dims()[1]
    }

    /// (N_X ⊗ id)(joint) with the bipartite annotation preserved.
    fn measure_side_a(&self, obs: &Observable, state: &DensityMatrix) -> Result<DensityMatrix> {
        let d_m = self.mem_dim();
        let lifted = luders_channel(obs)?.kraus_map().tensor_identity(d_m);
        DensityMatrix::new(
            lifted.apply_matrix(state.matrix()).hermitized(),
            state.dims().clone(),
        )
    }

    /// Outcome-resolved branches ((p_x, ρ^x_AM)) of the X measurement.
    fn branch_states(&self) -> Result<Vec<(f64, DensityMatrix)>> {
        let d_m = self.mem_dim();
        let dims = self.joint.dims().clone();
        let mut out = Vec::with_capacity(self.x_obs.len());
        for effect in self.x_obs.effects() {
            let lifted = KrausMap::new(
                self.joint.dim(),
                self.joint.dim(),
                vec![effect.kron(&crate::linalg::ComplexMatrix::identity(d_m))],
            )?;
            let raw = lifted.apply_matrix(self.joint.matrix());
            let p = raw.trace().re;
            if p <= WEIGHT_FLOOR {
                continue;
            }
            let state = DensityMatrix::new(
                raw.scale(crate::linalg::c64(1.0 / p, 0.0)).hermitized(),
                dims.clone(),
            )?;
            out.push((p, state));
        }
        Ok(out)
    }
}

/// Memory-conditioned spectrum measure S(ρ_A′M) − S(ρ_AM).
pub fn old_ipc_mem(mc: &MemoryContext) -> Result<f64> {
    let rho_am = mc.measure_side_a(mc.x_obs(), mc.joint())?;
    let rho_apm = mc.measure_side_a(mc.y_obs(), &rho_am)?;
    Ok(entropy(&rho_apm)? - entropy(&rho_am)?)
}

/// Both routes through the memory-conditioned Holevo measure.
#[derive(Clone, Debug)]
pub struct MemoryLeakDetail {
    /// The conditional-mutual-information value, with the branch entropies
    /// carrying their outcome probabilities.
    pub value: f64,
    /// The same expression with unweighted branch entropy sums; kept for
    /// comparison because it only agrees with `value` in degenerate cases.
    pub printed_form: f64,
    /// |value − printed_form|.
    pub divergence: f64,
}

/// Memory-conditioned Holevo measure
/// 𝔍^mem = S(ρ_AM) − S(ρ_A′M) + Σ_x p_x [S(ρ^x_A′M) − S(ρ^x_AM)].
///
/// The branch sum is the classical-quantum expansion of the conditional
/// mutual information, so the weights p_x are required; for rank-one sharp X
/// each branch is a product |x⟩⟨x| ⊗ ρ^x_M and the bracket collapses to
/// S(N_Y(|x⟩⟨x|)).
pub fn new_ipc_mem(mc: &MemoryContext) -> Result<f64> {
    Ok(new_ipc_mem_detailed(mc)?.value)
}

/// As [`new_ipc_mem`], also reporting the unweighted variant of the branch
/// sum so divergence between the two conventions is visible.
pub fn new_ipc_mem_detailed(mc: &MemoryContext) -> Result<MemoryLeakDetail> {
    let rho_am = mc.measure_side_a(mc.x_obs(), mc.joint())?;
    let rho_apm = mc.measure_side_a(mc.y_obs(), &rho_am)?;
    let base = entropy(&rho_am)? - entropy(&rho_apm)?;

    let mut weighted = 0.0;
    let mut unweighted = 0.0;
    for (p, branch) in mc.branch_states()? {
        let branch_after = mc.measure_side_a(mc.y_obs(), &branch)?;
        let gain = entropy(&branch_after)? - entropy(&branch)?;
        weighted += p * gain;
        let a_after = branch_after.partial_trace(&[0])?;
        unweighted += entropy(&a_after)?;
    }
    let value = base + weighted;
    let printed_form = base + unweighted;
    Ok(MemoryLeakDetail {
        value,
        printed_form,
        divergence: (value - printed_form).abs(),
    })
}

/// How much each measure moves when the memory is taken into account.
#[derive(Clone, Copy, Debug)]
pub struct MemoryGap {
    /// old_ipc − old_ipc_mem; equals I^coh(M⟩A′) − I^coh(M⟩A) ≤ 0.
    pub old_gap: f64,
    /// ipc_modified − new_ipc_mem; equals I^coh(M⟩A) − I^coh(M⟩A′) ≥ 0.
    pub new_gap: f64,
}

pub fn memory_gap(mc: &MemoryContext) -> Result<MemoryGap> {
    let reduced = mc.reduced_state()?;
    let old_flat = old_ipc(&reduced, mc.x_obs(), mc.y_obs())?;
    let context = Context::new(reduced, mc.x_obs().clone(), mc.y_obs().clone())?;
    let new_flat = ipc_modified(&context)?;
    Ok(MemoryGap {
        old_gap: old_flat - old_ipc_mem(mc)?,
        new_gap: new_flat - new_ipc_mem(mc)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{coherent_information, mutual_information};
    use crate::instruments::{depolarizing_instrument, luders_instrument};
    use crate::linalg::{c64, SubsystemDims};
    use crate::states::random_density;

    const LN2: f64 = std::f64::consts::LN_2;

    fn mixed() -> DensityMatrix {
        DensityMatrix::maximally_mixed(2).unwrap()
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[c64(1., 0.), c64(1., 0.)]).unwrap()
    }

    fn zero() -> DensityMatrix {
        DensityMatrix::pure(&[c64(1., 0.), c64(0., 0.)]).unwrap()
    }

    #[test]
    fn old_ipc_values() {
        let z = Observable::pauli_z();
        let x = Observable::pauli_x();
        assert!(old_ipc(&mixed(), &z, &x).unwrap().abs() < 1e-12);
        assert!(old_ipc(&random_density(2, 2, 1).unwrap(), &z, &z)
            .unwrap()
            .abs()
            < 1e-9);
        // N_z fixes |0⟩⟨0| (S = 0), N_x then lands on I/2 (S = ln 2).
        assert!((old_ipc(&zero(), &z, &x).unwrap() - LN2).abs() < 1e-9);
        assert!(old_ipc(&mixed(), &Observable::trine(), &x).is_err());
    }

    #[test]
    fn old_generalized_negativity() {
        let z = luders_instrument(&Observable::pauli_z()).unwrap();
        let eta = zero();
        let depo = depolarizing_instrument(&Observable::pauli_x(), &eta).unwrap();

        let witness = old_ipc_generalized(&plus(), &z, &depo).unwrap();
        assert!((witness + LN2).abs() < 1e-9);

        let witness_mixed = old_ipc_generalized(&mixed(), &z, &depo).unwrap();
        assert!((witness_mixed + LN2).abs() < 1e-9);

        let same = old_ipc_generalized(&random_density(2, 2, 2).unwrap(), &z, &z).unwrap();
        assert!(same.abs() < 1e-9);

        // Mismatched spaces are reported up front.
        let qutrit_eve =
            luders_instrument(&Observable::computational(3).unwrap()).unwrap();
        assert!(matches!(
            old_ipc_generalized(&mixed(), &z, &qutrit_eve),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            leak(&mixed(), &z, &qutrit_eve),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn chi_alice_values() {
        let z = luders_instrument(&Observable::pauli_z()).unwrap();
        let (chi, ensemble) = chi_alice(&mixed(), &z).unwrap();
        assert!((chi - LN2).abs() < 1e-9);
        assert_eq!(ensemble.len(), 2);

        let (chi, ensemble) = chi_alice(&zero(), &z).unwrap();
        assert!(chi.abs() < 1e-12);
        assert_eq!(ensemble.len(), 1);

        // Dilated parent and Lüders agree for sharp rank-one observables.
        let rho = random_density(2, 2, 3).unwrap();
        let luders_chi = chi_alice(&rho, &z).unwrap().0;
        let dilated =
            crate::instruments::parent_instrument_dilated(&Observable::pauli_z()).unwrap();
        let parent_chi = chi_alice(&rho, &dilated).unwrap().0;
        assert!((luders_chi - parent_chi).abs() < 1e-9);
    }

    #[test]
    fn leak_values() {
        let z = luders_instrument(&Observable::pauli_z()).unwrap();
        let x = luders_instrument(&Observable::pauli_x()).unwrap();

        let report = leak(&mixed(), &z, &x).unwrap();
        assert!((report.leak - LN2).abs() < 1e-9);
        assert!(report.chi_after_eve.abs() < 1e-9);

        let report = leak(&random_density(2, 2, 4).unwrap(), &z, &z).unwrap();
        assert!(report.leak.abs() < 1e-9);

        // Depolarising Eve wipes the ensemble: leak = χ_alice, positive even
        // where the spectrum measure reported −ln 2.
        let eta = zero();
        let depo = depolarizing_instrument(&Observable::pauli_x(), &eta).unwrap();
        let report = leak(&plus(), &z, &depo).unwrap();
        assert!((report.leak - LN2).abs() < 1e-9);
        assert!(report.leak >= -1e-9);
    }

    #[test]
    fn min_leak_and_modified_ipc() {
        let z_inst = luders_instrument(&Observable::pauli_z()).unwrap();
        let report = min_leak_over_eve(&mixed(), &z_inst, &Observable::pauli_x()).unwrap();
        assert!((report.leak - LN2).abs() < 1e-9);

        let report = min_leak_over_eve(&random_density(2, 2, 5).unwrap(), &z_inst, &Observable::pauli_z())
            .unwrap();
        assert!(report.leak.abs() < 1e-9);

        // Any non-parent Eve leaks at least as much.
        for seed in 0..30u64 {
            let rho = random_density(2, 2, seed).unwrap();
            let y = Observable::pauli_x();
            let optimal = min_leak_over_eve(&rho, &z_inst, &y).unwrap().leak;
            let eta = random_density(2, 1, seed + 500).unwrap();
            let depo = depolarizing_instrument(&y, &eta).unwrap();
            let worse = leak(&rho, &z_inst, &depo).unwrap().leak;
            assert!(worse >= optimal - 1e-9);
        }

        let ctx = Context::new(mixed(), Observable::pauli_z(), Observable::pauli_x()).unwrap();
        assert!((ipc_modified(&ctx).unwrap() - LN2).abs() < 1e-9);
        let ctx = Context::new(mixed(), Observable::pauli_z(), Observable::pauli_z()).unwrap();
        assert!(ipc_modified(&ctx).unwrap().abs() < 1e-9);

        // Commuting pair on arbitrary states.
        let rho = random_density(2, 2, 6).unwrap();
        let ctx = Context::new(rho, Observable::pauli_x(), Observable::pauli_x()).unwrap();
        assert!(ipc_modified(&ctx).unwrap().abs() < 1e-9);
    }

    #[test]
    fn modified_ipc_with_unsharp_first_observable() {
        // A POVM first measurement dilates: Eve must act on the extended
        // space of dimension d·n.
        let trine = Observable::trine();
        let rho = random_density(2, 2, 19).unwrap();
        let wrong = Context::new(rho.clone(), trine.clone(), Observable::pauli_x());
        assert!(wrong.is_err());

        let y6 = Observable::from_unitary_columns(&crate::states::random_unitary(6, 3)).unwrap();
        let ctx = Context::new(rho.clone(), trine.clone(), y6.clone()).unwrap();
        let value = ipc_modified(&ctx).unwrap();
        assert!(value >= -1e-9);

        // Consistency with the explicit leak computation.
        let alice = parent_instrument(&trine).unwrap();
        let report = min_leak_over_eve(&rho, &alice, &y6).unwrap();
        assert!((value - report.leak).abs() < 1e-12);
        assert!(report.leak <= report.chi_alice + 1e-12);
    }

    #[test]
    fn sharp_relation() {
        let z = Observable::pauli_z();
        let x = Observable::pauli_x();
        assert!(sharp_relation_residual(&mixed(), &z, &x).unwrap() <= 1e-9);
        assert!(sharp_relation_residual(&random_density(2, 1, 7).unwrap(), &z, &x).unwrap() <= 1e-9);

        // Qutrit contexts from random rank-one PVMs.
        for seed in 0..10u64 {
            let rho = random_density(3, 3, seed).unwrap();
            let x3 =
                Observable::from_unitary_columns(&crate::states::random_unitary(3, seed + 100))
                    .unwrap();
            let y3 =
                Observable::from_unitary_columns(&crate::states::random_unitary(3, seed + 200))
                    .unwrap();
            assert!(sharp_relation_residual(&rho, &x3, &y3).unwrap() <= 1e-9);
        }

        assert!(sharp_relation_residual(&mixed(), &Observable::trine(), &x).is_err());
    }

    fn example_memory_context(joint: DensityMatrix) -> MemoryContext {
        MemoryContext::new(joint, Observable::pauli_z(), Observable::pauli_x()).unwrap()
    }

    #[test]
    fn memory_product_reductions() {
        // Product joint state: the memory decouples from both measures.
        let rho = random_density(2, 2, 8).unwrap();
        let sigma = random_density(2, 2, 9).unwrap();
        let joint = rho.clone().tensor(&sigma);
        let mc = example_memory_context(joint);

        let flat_old = old_ipc(&rho, mc.x_obs(), mc.y_obs()).unwrap();
        assert!((old_ipc_mem(&mc).unwrap() - flat_old).abs() < 1e-9);

        let ctx = Context::new(rho, Observable::pauli_z(), Observable::pauli_x()).unwrap();
        let flat_new = ipc_modified(&ctx).unwrap();
        assert!((new_ipc_mem(&mc).unwrap() - flat_new).abs() < 1e-9);

        let gap = memory_gap(&mc).unwrap();
        assert!(gap.old_gap.abs() < 1e-9);
        assert!(gap.new_gap.abs() < 1e-9);
    }

    #[test]
    fn memory_measures_on_the_pure_pair() {
        // At p = 1 with marginal weights (¼, ¾) in the σ_y basis the joint
        // entropies reduce to S(σ_AM) = ln 2 and S(σ_A'M) = ln 2 + H(¼, ¾),
        // so the spectrum measure with memory equals H(¼, ¾).
        let cfg = crate::scenarios::Example2Config::default();
        let joint = crate::scenarios::build_example2_state(&cfg, 1.0).unwrap();
        let mc = example_memory_context(joint);
        let h = crate::info::shannon_entropy(&[0.25, 0.75]);
        assert!((old_ipc_mem(&mc).unwrap() - h).abs() < 1e-9);

        // The new gap hits the same number from the other side.
        let gap = memory_gap(&mc).unwrap();
        assert!((gap.new_gap - h).abs() < 1e-9);
        assert!((gap.old_gap + h).abs() < 1e-9);
    }

    #[test]
    fn memory_commuting_measurements_vanish() {
        let joint = random_density(4, 3, 10)
            .unwrap()
            .with_dims(SubsystemDims::new(vec![2, 2]).unwrap())
            .unwrap();
        let mc = MemoryContext::new(joint, Observable::pauli_z(), Observable::pauli_z()).unwrap();
        assert!(old_ipc_mem(&mc).unwrap().abs() < 1e-9);
        assert!(new_ipc_mem(&mc).unwrap().abs() < 1e-9);
    }

    #[test]
    fn memory_gap_antisymmetry_and_coherent_information() {
        for seed in 0..40u64 {
            let rank = 1 + (seed as usize % 4);
            let joint = random_density(4, rank, seed)
                .unwrap()
                .with_dims(SubsystemDims::new(vec![2, 2]).unwrap())
                .unwrap();
            let mc = example_memory_context(joint.clone());
            let gap = memory_gap(&mc).unwrap();
            assert!(gap.old_gap <= 1e-9, "old gap sign violated: {}", gap.old_gap);
            assert!(gap.new_gap >= -1e-9, "new gap sign violated: {}", gap.new_gap);
            assert!(
                (gap.old_gap + gap.new_gap).abs() <= 1e-9,
                "antisymmetry violated: {} vs {}",
                gap.old_gap,
                gap.new_gap
            );

            // Independent oracle: both gaps are coherent-information moves.
            let rho_am = mc.measure_side_a(mc.x_obs(), mc.joint()).unwrap();
            let rho_apm = mc.measure_side_a(mc.y_obs(), &rho_am).unwrap();
            let expected_new =
                coherent_information(&rho_am).unwrap() - coherent_information(&rho_apm).unwrap();
            assert!((gap.new_gap - expected_new).abs() < 1e-9);
        }
    }

    #[test]
    fn memory_branch_weights_matter() {
        // A joint state with skewed outcome probabilities separates the
        // weighted branch sum from the unweighted printed variant.
        let skew = DensityMatrix::new(
            crate::linalg::ComplexMatrix::from_real(
                4,
                4,
                &[
                    0.7, 0., 0., 0., //
                    0., 0.1, 0., 0., //
                    0., 0., 0.15, 0., //
                    0., 0., 0., 0.05,
                ],
            )
            .unwrap(),
            SubsystemDims::new(vec![2, 2]).unwrap(),
        )
        .unwrap();
        let mc = example_memory_context(skew);
        let detail = new_ipc_mem_detailed(&mc).unwrap();
        assert!(detail.divergence > 0.1);
        assert!((detail.value + detail.divergence - detail.printed_form).abs() < 1e-12);

        // The weighted value matches the purity-argument simplification
        // Σ_x p_x S(N_Y(|x⟩⟨x|)) added to the joint entropy difference.
        let rho_am = mc.measure_side_a(mc.x_obs(), mc.joint()).unwrap();
        let rho_apm = mc.measure_side_a(mc.y_obs(), &rho_am).unwrap();
        let n_y = luders_channel(mc.y_obs()).unwrap();
        let mut simplified = entropy(&rho_am).unwrap() - entropy(&rho_apm).unwrap();
        for (p, branch) in mc.branch_states().unwrap() {
            let a_part = branch.partial_trace(&[0]).unwrap();
            simplified += p * entropy(&n_y.apply(&a_part).unwrap()).unwrap();
        }
        assert!((detail.value - simplified).abs() < 1e-9);
    }

    #[test]
    fn memory_gap_mutual_information_link() {
        // When Eve's basis is unbiased to Alice's output the joint state
        // after Eve is product, and the new gap is exactly I(A:M) of the
        // post-Alice state.
        let joint = random_density(4, 2, 77)
            .unwrap()
            .with_dims(SubsystemDims::new(vec![2, 2]).unwrap())
            .unwrap();
        let mc = example_memory_context(joint);
        let gap = memory_gap(&mc).unwrap();
        let rho_am = mc.measure_side_a(mc.x_obs(), mc.joint()).unwrap();
        assert!((gap.new_gap - mutual_information(&rho_am).unwrap()).abs() < 1e-9);
    }
}
