//! Observables (POVMs and PVMs), Born probabilities and measurement models.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::instruments::{Channel, Instrument, KrausMap};
use crate::linalg::{c64, C64, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::{Error, Result, EPS_HERM, EPS_PSD, EPS_TRACE, WEIGHT_FLOOR};

/// Outcome-indexed positive operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    labels: Vec<String>,
    effects: Vec<ComplexMatrix>,
    dim: usize,
}

/// Per-property outcome of [`Observable::validate`]: the worst violation of
/// each invariant, reported rather than thrown.
#[derive(Clone, Debug)]
pub struct ValidityReport {
    pub hermiticity_violation: f64,
    pub psd_violation: f64,
    pub completeness_violation: f64,
}

impl ValidityReport {
    pub fn hermitian_ok(&self) -> bool {
        self.hermiticity_violation <= EPS_HERM
    }

    pub fn psd_ok(&self) -> bool {
        self.psd_violation <= EPS_PSD
    }

    pub fn complete_ok(&self) -> bool {
        self.completeness_violation <= EPS_TRACE
    }

    pub fn all_ok(&self) -> bool {
        self.hermitian_ok() && self.psd_ok() && self.complete_ok()
    }
}

impl Observable {
    /// Validated constructor; rejects effect lists that fail the report.
    pub fn new<L: Into<String>>(labels: Vec<L>, effects: Vec<ComplexMatrix>) -> Result<Self> {
        let obs = Self::new_unchecked(labels, effects)?;
        let report = obs.validate();
        if !report.all_ok() {
            return Err(Error::InvalidObservable(format!(
                "hermiticity {:.3e}, psd {:.3e}, completeness {:.3e}",
                report.hermiticity_violation,
                report.psd_violation,
                report.completeness_violation
            )));
        }
        Ok(obs)
    }

    /// Structural checks only (shapes, label count); invariants are left to
    /// [`Observable::validate`], so invalid effect lists can still be
    /// inspected and reported on.
    pub fn new_unchecked<L: Into<String>>(
        labels: Vec<L>,
        effects: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidObservable("no effects".into()));
        }
        if labels.len() != effects.len() {
            return Err(Error::InvalidObservable(format!(
                "{} labels for {} effects",
                labels.len(),
                effects.len()
            )));
        }
        let dim = effects[0].rows();
        for e in &effects {
            if !e.is_square() || e.rows() != dim {
                return Err(Error::DimensionMismatch(
                    "all effects must be square on a common space".into(),
                ));
            }
        }
        Ok(Self {
            labels: labels.into_iter().map(Into::into).collect(),
            effects,
            dim,
        })
    }

    /// Reports the worst Hermiticity/PSD/completeness violation.
    pub fn validate(&self) -> ValidityReport {
        let mut herm = 0.0f64;
        let mut psd = 0.0f64;
        for e in &self.effects {
            herm = herm.max(e.hermiticity_violation());
            if let Ok(min) = e.hermitized().min_eigenvalue() {
                psd = psd.max((-min).max(0.0));
            } else {
                psd = f64::INFINITY;
            }
        }
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.effects {
            sum = sum.add(e);
        }
        let completeness = sum.max_abs_diff(&ComplexMatrix::identity(self.dim));
        ValidityReport {
            hermiticity_violation: herm,
            psd_violation: psd,
            completeness_violation: completeness,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, x: usize) -> &ComplexMatrix {
        &self.effects[x]
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True iff every effect is an orthogonal projector (PVM).
    pub fn is_sharp(&self) -> bool {
        self.effects
            .iter()
            .all(|e| e.mul(e).max_abs_diff(e) <= EPS_TRACE)
    }

    /// True iff every non-vanishing effect has rank one.
    pub fn is_rank_one(&self) -> bool {
        self.effects.iter().all(|e| {
            if e.max_abs() <= WEIGHT_FLOOR {
                return true;
            }
            match e.hermitized().hermitian_eig() {
                Ok((vals, _)) => vals.iter().filter(|l| l.abs() > 1e-9).count() == 1,
                Err(_) => false,
            }
        })
    }

    /// True iff every pair of effects commutes within tolerance.
    pub fn commutes(&self, other: &Observable) -> Result<bool> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "observables on dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        for a in &self.effects {
            for b in &other.effects {
                let comm = a.mul(b).sub(&b.mul(a));
                if comm.max_abs() > EPS_TRACE {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// σ_x eigenprojectors {|+⟩⟨+|, |−⟩⟨−|}.
    pub fn pauli_x() -> Self {
        let plus = [c64(1., 0.), c64(1., 0.)];
        let minus = [c64(1., 0.), c64(-1., 0.)];
        Self::from_basis_vectors(vec!["+", "-"], &[&plus, &minus]).unwrap()
    }

    /// σ_y eigenprojectors.
    pub fn pauli_y() -> Self {
        let up = [c64(1., 0.), c64(0., 1.)];
        let down = [c64(1., 0.), c64(0., -1.)];
        Self::from_basis_vectors(vec!["+i", "-i"], &[&up, &down]).unwrap()
    }

    /// σ_z eigenprojectors {|0⟩⟨0|, |1⟩⟨1|}.
    pub fn pauli_z() -> Self {
        let zero = [c64(1., 0.), c64(0., 0.)];
        let one = [c64(0., 0.), c64(1., 0.)];
        Self::from_basis_vectors(vec!["0", "1"], &[&zero, &one]).unwrap()
    }

    /// Computational-basis PVM in dimension `d`.
    pub fn computational(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut effects = Vec::with_capacity(d);
        let mut labels = Vec::with_capacity(d);
        for i in 0..d {
            let mut v = vec![c64(0., 0.); d];
            v[i] = c64(1., 0.);
            effects.push(ComplexMatrix::outer(&v, &v));
            labels.push(i.to_string());
        }
        Self::new(labels, effects)
    }

    /// Rank-one PVM from (not necessarily normalised) orthogonal vectors.
    pub fn from_basis_vectors<L: Into<String>>(labels: Vec<L>, basis: &[&[C64]]) -> Result<Self> {
        let effects = basis
            .iter()
            .map(|v| {
                let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                ComplexMatrix::outer(v, v).scale(c64(1.0 / n, 0.0))
            })
            .collect();
        Self::new(labels, effects)
    }

    /// Rank-one PVM built from the columns of a unitary.
    pub fn from_unitary_columns(u: &ComplexMatrix) -> Result<Self> {
        let d = u.rows();
        let mut effects = Vec::with_capacity(d);
        let mut labels = Vec::with_capacity(d);
        for j in 0..d {
            let col = u.column(j);
            effects.push(ComplexMatrix::outer(&col, &col));
            labels.push(j.to_string());
        }
        Self::new(labels, effects)
    }

    /// Symmetric three-outcome qubit POVM {⅔|φ_k⟩⟨φ_k|}.
    pub fn trine() -> Self {
        let mut effects = Vec::new();
        let mut labels = Vec::new();
        for k in 0..3 {
            let theta = k as f64 * std::f64::consts::PI / 3.0;
            let v = [c64(theta.cos(), 0.), c64(theta.sin(), 0.)];
            effects.push(ComplexMatrix::outer(&v, &v).scale(c64(2.0 / 3.0, 0.0)));
            labels.push(format!("t{k}"));
        }
        Self::new(labels, effects).unwrap()
    }

    /// Seeded random POVM: n Ginibre Gram operators whitened by the inverse
    /// square root of their sum.
    pub fn random(dim: usize, outcomes: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if outcomes == 0 {
            return Err(Error::InvalidObservable("no outcomes requested".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = StandardNormal;
        let mut raw = Vec::with_capacity(outcomes);
        for _ in 0..outcomes {
            let mut data = Vec::with_capacity(dim * dim);
            for _ in 0..dim * dim {
                let re: f64 = normal.sample(&mut rng);
                let im: f64 = normal.sample(&mut rng);
                data.push(c64(re, im));
            }
            let g = ComplexMatrix::new(dim, dim, data).unwrap();
            raw.push(g.mul(&g.dagger()).hermitized());
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for g in &raw {
            sum = sum.add(g);
        }
        let whiten = inv_sqrt_psd(&sum)?;
        let effects = raw
            .iter()
            .map(|g| whiten.mul(g).mul(&whiten).hermitized())
            .collect();
        let labels = (0..outcomes).map(|k| k.to_string()).collect::<Vec<_>>();
        Self::new(labels, effects)
    }
}

fn inv_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vals, vecs) = m.hermitian_eig()?;
    let d = m.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for (k, lambda) in vals.iter().enumerate() {
        if *lambda <= 1e-12 {
            return Err(Error::NotPsd {
                min_eigenvalue: *lambda,
            });
        }
        let w = 1.0 / lambda.sqrt();
        let v = vecs.column(k);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += v[i] * v[j].conj() * w;
            }
        }
    }
    Ok(out.hermitized())
}

/// Builds the canonical joint label for a product-outcome grid.
pub fn joint_label(x: &str, y: &str) -> String {
    format!("({x},{y})")
}

/// Splits a joint observable over Ω_A×Ω_B into its two marginals
/// A(x)=Σ_y G(x,y) and B(y)=Σ_x G(x,y).
///
/// Labels must be the canonical `(x,y)` pairs covering a full grid.
pub fn marginals_of_joint(joint: &Observable) -> Result<(Observable, Observable)> {
    let mut pairs = Vec::with_capacity(joint.len());
    for label in joint.labels() {
        let inner = label
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidLabels(format!("label `{label}` is not `(x,y)`")))?;
        let (x, y) = inner
            .split_once(',')
            .ok_or_else(|| Error::InvalidLabels(format!("label `{label}` is not `(x,y)`")))?;
        pairs.push((x.to_string(), y.to_string()));
    }
    let mut xs: Vec<String> = Vec::new();
    let mut ys: Vec<String> = Vec::new();
    for (x, y) in &pairs {
        if !xs.contains(x) {
            xs.push(x.clone());
        }
        if !ys.contains(y) {
            ys.push(y.clone());
        }
    }
    if xs.len() * ys.len() != joint.len() {
        return Err(Error::InvalidLabels(format!(
            "{} labels do not tile a {}x{} grid",
            joint.len(),
            xs.len(),
            ys.len()
        )));
    }
    let index_of = |x: &str, y: &str| -> Result<usize> {
        pairs
            .iter()
            .position(|(px, py)| px == x && py == y)
            .ok_or_else(|| Error::InvalidLabels(format!("missing grid point ({x},{y})")))
    };

    let d = joint.dim();
    let mut a_effects = Vec::with_capacity(xs.len());
    for x in &xs {
        let mut acc = ComplexMatrix::zeros(d, d);
        for y in &ys {
            acc = acc.add(joint.effect(index_of(x, y)?));
        }
        a_effects.push(acc);
    }
    let mut b_effects = Vec::with_capacity(ys.len());
    for y in &ys {
        let mut acc = ComplexMatrix::zeros(d, d);
        for x in &xs {
            acc = acc.add(joint.effect(index_of(x, y)?));
        }
        b_effects.push(acc);
    }
    Ok((
        Observable::new(xs, a_effects)?,
        Observable::new(ys, b_effects)?,
    ))
}

/// Born rule p_x = Tr[ρ A(x)], clipped to the unit interval.
pub fn born_probabilities(rho: &DensityMatrix, obs: &Observable) -> Result<Vec<f64>> {
    if rho.dim() != obs.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs observable dimension {}",
            rho.dim(),
            obs.dim()
        )));
    }
    let probs = obs
        .effects()
        .iter()
        .map(|e| rho.matrix().mul(e).trace().re.clamp(0.0, 1.0))
        .collect();
    Ok(probs)
}

/// Projective (Lüders) channel ρ ↦ Σ_i X_i ρ X_i of a sharp observable.
pub fn luders_channel(obs: &Observable) -> Result<Channel> {
    if !obs.is_sharp() {
        return Err(Error::RequiresSharp(
            "Lüders channel with projector Kraus operators needs a PVM".into(),
        ));
    }
    Channel::new(KrausMap::new(obs.dim(), obs.dim(), obs.effects().to_vec())?)
}

/// Ancilla + joint unitary + pointer description of a measurement process.
#[derive(Clone, Debug)]
pub struct MeasurementModel {
    ancilla: DensityMatrix,
    unitary: ComplexMatrix,
    pointer: Observable,
    system_dim: usize,
}

impl MeasurementModel {
    /// `unitary` acts on system ⊗ ancilla; the pointer PVM acts on the ancilla.
    pub fn new(
        ancilla: DensityMatrix,
        unitary: ComplexMatrix,
        pointer: Observable,
    ) -> Result<Self> {
        let d_a = ancilla.dim();
        if pointer.dim() != d_a {
            return Err(Error::DimensionMismatch(format!(
                "pointer dimension {} vs ancilla dimension {}",
                pointer.dim(),
                d_a
            )));
        }
        if !pointer.is_sharp() {
            return Err(Error::UnsupportedPointer(
                "pointer must be a PVM; unsharp pointers leave post-measurement states underdetermined".into(),
            ));
        }
        if !unitary.is_square() || !unitary.rows().is_multiple_of(d_a) {
            return Err(Error::InvalidDims(format!(
                "unitary of dimension {} does not factor over an ancilla of dimension {}",
                unitary.rows(),
                d_a
            )));
        }
        let gram = unitary.dagger().mul(&unitary);
        let defect = gram.max_abs_diff(&ComplexMatrix::identity(unitary.rows()));
        if defect > EPS_TRACE {
            return Err(Error::InvalidState(format!(
                "interaction is not unitary (defect {defect:.3e})"
            )));
        }
        let system_dim = unitary.rows() / d_a;
        Ok(Self {
            ancilla,
            unitary,
            pointer,
            system_dim,
        })
    }

    pub fn ancilla(&self) -> &DensityMatrix {
        &self.ancilla
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn pointer(&self) -> &Observable {
        &self.pointer
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }
}

/// Condenses a measurement model into the instrument
/// Φ_x(ρ) = Tr_a[(I⊗A′(x)) U(ρ⊗σ_a)U† (I⊗A′(x))].
///
/// Kraus operators are K_{x,(j,m)} = √s_j (I⊗⟨m|) U (I⊗|a_j⟩) over the
/// spectral decomposition σ_a = Σ_j s_j|a_j⟩⟨a_j| and an orthonormal basis
/// {|m⟩} of each pointer eigenspace.
pub fn model_to_instrument(model: &MeasurementModel) -> Result<Instrument> {
    let d_s = model.system_dim;
    let id_s = ComplexMatrix::identity(d_s);

    let (anc_vals, anc_vecs) = model.ancilla.matrix().hermitized().hermitian_eig()?;
    let mut branches = Vec::with_capacity(model.pointer.len());
    for effect in model.pointer.effects() {
        let (p_vals, p_vecs) = effect.hermitized().hermitian_eig()?;
        let mut kraus = Vec::new();
        for (j, s_j) in anc_vals.iter().enumerate() {
            if *s_j <= WEIGHT_FLOOR {
                continue;
            }
            let a_j = anc_vecs.column(j);
            let embed = id_s.kron(&ComplexMatrix::col_vector(&a_j));
            let scaled = model.unitary.mul(&embed).scale(c64(s_j.sqrt(), 0.0));
            for (m, lambda) in p_vals.iter().enumerate() {
                if *lambda < 0.5 {
                    continue;
                }
                let bra = ComplexMatrix::col_vector(&p_vecs.column(m)).dagger();
                let project = id_s.kron(&bra);
                kraus.push(project.mul(&scaled));
            }
        }
        if kraus.is_empty() {
            kraus.push(ComplexMatrix::zeros(d_s, d_s));
        }
        branches.push(KrausMap::new(d_s, d_s, kraus)?);
    }
    Instrument::new(model.pointer.labels().to_vec(), branches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instruments::apply_instrument;
    use crate::linalg::SubsystemDims;

    #[test]
    fn validate_reports() {
        assert!(Observable::pauli_z().validate().all_ok());
        assert!(Observable::pauli_z().is_sharp());

        let half = ComplexMatrix::identity(2).scale(c64(0.5, 0.));
        let unsharp = Observable::new(
            vec!["a", "b"],
            vec![half.scale(c64(1.2, 0.)), half.scale(c64(0.8, 0.))],
        )
        .unwrap();
        assert!(!unsharp.is_sharp());

        // Two copies of |0⟩⟨0| miss completeness by exactly 1.
        let p0 = ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]).unwrap();
        let bad = Observable::new_unchecked(vec!["0", "0'"], vec![p0.clone(), p0]).unwrap();
        let report = bad.validate();
        assert!(!report.complete_ok());
        assert!((report.completeness_violation - 1.0).abs() < 1e-12);

        // A 1e−5 perturbation of one effect is caught as a completeness
        // violation above 1e−6 and rejected by the validated constructor.
        let z = Observable::pauli_z();
        let bumped = z.effect(0).add(&ComplexMatrix::from_real(2, 2, &[1e-5, 0., 0., 0.]).unwrap());
        let perturbed =
            Observable::new_unchecked(vec!["0", "1"], vec![bumped.clone(), z.effect(1).clone()])
                .unwrap();
        assert!(perturbed.validate().completeness_violation > 1e-6);
        assert!(Observable::new(vec!["0", "1"], vec![bumped, z.effect(1).clone()]).is_err());
        assert!(Observable::new(vec!["0", "0'"], vec![
            ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]).unwrap(),
            ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]).unwrap(),
        ])
        .is_err());
    }

    #[test]
    fn sharp_and_rank_one_flags() {
        assert!(Observable::pauli_x().is_sharp());
        assert!(Observable::pauli_x().is_rank_one());

        let half = ComplexMatrix::identity(2).scale(c64(0.5, 0.));
        let trivial = Observable::new(vec!["a", "b"], vec![half.clone(), half]).unwrap();
        assert!(!trivial.is_sharp());
        assert!(!trivial.is_rank_one());

        let trine = Observable::trine();
        assert!(!trine.is_sharp());
        assert!(trine.is_rank_one());
    }

    #[test]
    fn commutation_checks() {
        let z = Observable::pauli_z();
        let x = Observable::pauli_x();
        assert!(z.commutes(&z).unwrap());
        assert!(!z.commutes(&x).unwrap());

        let half = ComplexMatrix::identity(2).scale(c64(0.5, 0.));
        let trivial = Observable::new(vec!["a", "b"], vec![half.clone(), half]).unwrap();
        assert!(z.commutes(&trivial).unwrap());

        let qutrit = Observable::computational(3).unwrap();
        assert!(z.commutes(&qutrit).is_err());
    }

    #[test]
    fn joint_marginals() {
        // Diagonal joint of a PVM with itself: G(x,y) = X_x δ_{xy}.
        let z = Observable::pauli_z();
        let zero2 = ComplexMatrix::zeros(2, 2);
        let joint = Observable::new(
            vec![
                joint_label("0", "0"),
                joint_label("0", "1"),
                joint_label("1", "0"),
                joint_label("1", "1"),
            ],
            vec![
                z.effect(0).clone(),
                zero2.clone(),
                zero2.clone(),
                z.effect(1).clone(),
            ],
        )
        .unwrap();
        let (a, b) = marginals_of_joint(&joint).unwrap();
        assert!(a.effect(0).max_abs_diff(z.effect(0)) < 1e-12);
        assert!(b.effect(1).max_abs_diff(z.effect(1)) < 1e-12);

        // Product weights: G(x,y) = p(y)·A(x) gives a trivial second marginal.
        let p = [0.3, 0.7];
        let mut labels = Vec::new();
        let mut effects = Vec::new();
        for (x, e) in z.effects().iter().enumerate() {
            for (y, w) in p.iter().enumerate() {
                labels.push(joint_label(&x.to_string(), &y.to_string()));
                effects.push(e.scale(c64(*w, 0.)));
            }
        }
        let joint = Observable::new(labels, effects).unwrap();
        let (a, b) = marginals_of_joint(&joint).unwrap();
        assert!(a.effect(0).max_abs_diff(z.effect(0)) < 1e-12);
        for (y, w) in p.iter().enumerate() {
            let expect = ComplexMatrix::identity(2).scale(c64(*w, 0.));
            assert!(b.effect(y).max_abs_diff(&expect) < 1e-12);
        }
        assert!(a.validate().all_ok() && b.validate().all_ok());

        // Non-grid labels rejected.
        let bad = Observable::new(
            vec!["(0,0)", "oops"],
            vec![
                ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]).unwrap(),
                ComplexMatrix::from_real(2, 2, &[0., 0., 0., 1.]).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(
            marginals_of_joint(&bad),
            Err(Error::InvalidLabels(_))
        ));
    }

    #[test]
    fn born_rule() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let z = Observable::pauli_z();
        let p = born_probabilities(&mixed, &z).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);

        let zero = DensityMatrix::pure(&[c64(1., 0.), c64(0., 0.)]).unwrap();
        let p = born_probabilities(&zero, &z).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12);

        let x = Observable::pauli_x();
        let p = born_probabilities(&zero, &x).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);

        let qutrit = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(born_probabilities(&qutrit, &z).is_err());
    }

    #[test]
    fn luders_channel_dephases() {
        let z = Observable::pauli_z();
        let n_z = luders_channel(&z).unwrap();
        let plus = DensityMatrix::pure(&[c64(1., 0.), c64(1., 0.)]).unwrap();
        let out = n_z.apply(&plus).unwrap();
        assert!(out
            .matrix()
            .max_abs_diff(DensityMatrix::maximally_mixed(2).unwrap().matrix())
            < 1e-12);

        let zero = DensityMatrix::pure(&[c64(1., 0.), c64(0., 0.)]).unwrap();
        let fixed = n_z.apply(&zero).unwrap();
        assert!(fixed.matrix().max_abs_diff(zero.matrix()) < 1e-12);

        // Dephasing in two unbiased bases in a row lands on I/2.
        let n_x = luders_channel(&Observable::pauli_x()).unwrap();
        let rho = DensityMatrix::random(2, 2, 11).unwrap();
        let twice = n_x.apply(&n_z.apply(&rho).unwrap()).unwrap();
        assert!(twice
            .matrix()
            .max_abs_diff(DensityMatrix::maximally_mixed(2).unwrap().matrix())
            < 1e-9);

        let trine = Observable::trine();
        assert!(matches!(
            luders_channel(&trine),
            Err(Error::RequiresSharp(_))
        ));
    }

    #[test]
    fn model_to_instrument_cnot() {
        // CNOT with the system as control copies σ_z outcomes onto the
        // ancilla; reading the ancilla pointer reproduces the Lüders
        // σ_z instrument on the system.
        let mut cnot = ComplexMatrix::zeros(4, 4);
        cnot[(0, 0)] = c64(1., 0.);
        cnot[(1, 1)] = c64(1., 0.);
        cnot[(2, 3)] = c64(1., 0.);
        cnot[(3, 2)] = c64(1., 0.);
        let ancilla = DensityMatrix::pure(&[c64(1., 0.), c64(0., 0.)]).unwrap();
        let model = MeasurementModel::new(ancilla, cnot, Observable::pauli_z()).unwrap();
        let inst = model_to_instrument(&model).unwrap();

        let plus = DensityMatrix::pure(&[c64(1., 0.), c64(1., 0.)]).unwrap();
        let ensemble = apply_instrument(&inst, &plus).unwrap();
        assert_eq!(ensemble.len(), 2);
        for (p, state) in ensemble.members() {
            assert!((p - 0.5).abs() < 1e-9);
            // Post-states are the σ_z eigenprojectors.
            let purity = state.matrix().mul(state.matrix()).trace().re;
            assert!((purity - 1.0).abs() < 1e-9);
        }

        // Trivial model: U = I with a single-outcome pointer is the identity
        // instrument.
        let ancilla = DensityMatrix::maximally_mixed(2).unwrap();
        let pointer = Observable::new(vec!["only"], vec![ComplexMatrix::identity(2)]).unwrap();
        let model =
            MeasurementModel::new(ancilla, ComplexMatrix::identity(4), pointer).unwrap();
        let inst = model_to_instrument(&model).unwrap();
        let rho = DensityMatrix::random(2, 2, 3).unwrap();
        let out = apply_instrument(&inst, &rho).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out.members()[0].1.matrix().max_abs_diff(rho.matrix()) < 1e-9);
    }

    #[test]
    fn model_probabilities_match_born_rule() {
        // Tr[Φ_x(ρ)] must equal Tr[U(ρ⊗σ_a)U†(I⊗A′(x))] for every x.
        let u = crate::states::random_unitary(4, 5);
        let ancilla = DensityMatrix::random(2, 2, 6).unwrap();
        let model = MeasurementModel::new(ancilla.clone(), u.clone(), Observable::pauli_z()).unwrap();
        let inst = model_to_instrument(&model).unwrap();

        let rho = DensityMatrix::random(2, 2, 7).unwrap();
        let joint = rho.tensor(&ancilla);
        let evolved = u.mul(joint.matrix()).mul(&u.dagger());
        for (x, effect) in model.pointer().effects().iter().enumerate() {
            let lifted = ComplexMatrix::identity(2).kron(effect);
            let expect = evolved.mul(&lifted).trace().re;
            let got = inst.branch(x).apply_matrix(rho.matrix()).trace().re;
            assert!((expect - got).abs() < 1e-9, "outcome {x}: {expect} vs {got}");
        }

        let _ = SubsystemDims::new(vec![2, 2]).unwrap();
    }
}
