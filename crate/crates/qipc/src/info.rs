//! Entropic and correlation functionals. All results are in nats.

use crate::linalg::{pauli_y, ComplexMatrix};
use crate::states::{DensityMatrix, Ensemble};
use crate::{Error, Result};

/// Clips an analytically non-negative result whose roundoff may dip within
/// −1e−9 of zero; anything more negative is left alone so tests can see it.
fn clip_nonneg(x: f64) -> f64 {
    if (-1e-9..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// Von Neumann entropy S(ρ) = −Tr(ρ ln ρ) with the 0·ln 0 = 0 convention.
pub fn entropy(rho: &DensityMatrix) -> Result<f64> {
    let spectrum = rho.spectrum()?;
    let s: f64 = spectrum
        .iter()
        .filter(|l| **l > 0.0)
        .map(|l| -l * l.ln())
        .sum();
    Ok(clip_nonneg(s).max(0.0))
}

/// Scalar Shannon entropy of a probability vector, same convention.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// Spectrum-based information content ln d − S(ρ).
pub fn old_information(rho: &DensityMatrix) -> Result<f64> {
    Ok((rho.dim() as f64).ln() - entropy(rho)?)
}

/// Holevo bound χ(E) = S(Σ p_x ρ_x) − Σ p_x S(ρ_x).
///
/// Zero-probability members are skipped; the result is non-negative up to
/// roundoff by concavity.
pub fn holevo_chi(ensemble: &Ensemble) -> Result<f64> {
    let avg = ensemble.average_state()?;
    let mut conditional = 0.0;
    for (p, state) in ensemble.members() {
        if *p <= 0.0 {
            continue;
        }
        conditional += p * entropy(state)?;
    }
    Ok(clip_nonneg(entropy(&avg)? - conditional))
}

fn bipartite_check(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().len() != 2 {
        return Err(Error::InvalidDims(format!(
            "need exactly two subsystems, got {:?}",
            rho.dims().dims()
        )));
    }
    Ok(())
}

/// I(A:B) = S(A) + S(B) − S(AB) for a bipartite state.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    bipartite_check(rho)?;
    let a = rho.partial_trace(&[0])?;
    let b = rho.partial_trace(&[1])?;
    Ok(clip_nonneg(
        entropy(&a)? + entropy(&b)? - entropy(rho)?,
    ))
}

/// S(rest | condition_on) = S(AB) − S(conditioning subsystem).
///
/// Negative values are meaningful (entanglement), so nothing is clipped.
pub fn conditional_entropy(rho: &DensityMatrix, condition_on: usize) -> Result<f64> {
    bipartite_check(rho)?;
    if condition_on > 1 {
        return Err(Error::InvalidDims(format!(
            "subsystem index {condition_on} out of range for a bipartite state"
        )));
    }
    let conditioner = rho.partial_trace(&[condition_on])?;
    Ok(entropy(rho)? - entropy(&conditioner)?)
}

/// Coherent information I^coh(M⟩A) = S(ρ_A) − S(ρ_AM) for a state ordered
/// (A, M). Non-increasing under channels on A; may be negative.
pub fn coherent_information(rho: &DensityMatrix) -> Result<f64> {
    bipartite_check(rho)?;
    let a = rho.partial_trace(&[0])?;
    Ok(entropy(&a)? - entropy(rho)?)
}

/// Two-qubit concurrence C = max(0, λ₁ − λ₂ − λ₃ − λ₄) with λ descending.
///
/// The λ_i are the square roots of the eigenvalues of
/// R = √ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y) √ρ, i.e. the singular values of
/// M = √ρ (σ_y⊗σ_y) (√ρ)* since R = MM†. They are read off the Hermitian
/// block embedding [[0, M], [M†, 0]], whose positive spectrum is exactly
/// {λ_i}; going through R itself would square the λ_i and turn 1e−16
/// roundoff into 1e−8 noise on separable states.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().dims() != [2, 2] {
        return Err(Error::InvalidDims(format!(
            "concurrence is defined for dims [2, 2], got {:?}",
            rho.dims().dims()
        )));
    }
    let yy = pauli_y().kron(&pauli_y());
    let root = rho.matrix().hermitized().matrix_sqrt_psd()?;
    let m = root.mul(&yy).mul(&root.conj());
    let mut block = ComplexMatrix::zeros(8, 8);
    for r in 0..4 {
        for c in 0..4 {
            block[(r, 4 + c)] = m[(r, c)];
            block[(4 + r, c)] = m[(c, r)].conj();
        }
    }
    let (vals, _) = block.hermitian_eig()?;
    // Ascending ±λ spectrum: the top four are the singular values descending.
    let c = vals[7] - vals[6] - vals[5] - vals[4];
    Ok(c.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, C64, SubsystemDims};
    use crate::states::random_density;

    fn ket(entries: &[f64]) -> Vec<C64> {
        entries.iter().map(|&x| c64(x, 0.)).collect()
    }

    fn bell() -> DensityMatrix {
        DensityMatrix::pure(&ket(&[1., 0., 0., 1.]))
            .unwrap()
            .with_dims(SubsystemDims::new(vec![2, 2]).unwrap())
            .unwrap()
    }

    #[test]
    fn entropy_basics() {
        let zero = DensityMatrix::pure(&ket(&[1., 0.])).unwrap();
        assert!(entropy(&zero).unwrap().abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((entropy(&mixed).unwrap() - 2f64.ln()).abs() < 1e-12);

        // (|0⟩⟨0| + |+⟩⟨+|)/2: closed-form spectrum (1 ± 1/√2)/2 gives the
        // frozen oracle value.
        let mix = DensityMatrix::from_matrix(
            ComplexMatrix::from_real(2, 2, &[0.75, 0.25, 0.25, 0.25]).unwrap(),
        )
        .unwrap();
        let lo = (1.0 - 1.0 / 2f64.sqrt()) / 2.0;
        let hi = (1.0 + 1.0 / 2f64.sqrt()) / 2.0;
        let oracle = shannon_entropy(&[lo, hi]);
        assert!((oracle - 0.4164955306996875).abs() < 1e-12);
        assert!((entropy(&mix).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn old_information_values() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(old_information(&mixed).unwrap().abs() < 1e-12);

        let pure = random_density(2, 1, 3).unwrap();
        assert!((old_information(&pure).unwrap() - 2f64.ln()).abs() < 1e-9);

        let diag = DensityMatrix::from_matrix(
            ComplexMatrix::from_real(2, 2, &[0.25, 0., 0., 0.75]).unwrap(),
        )
        .unwrap();
        let oracle = 2f64.ln() - shannon_entropy(&[0.25, 0.75]);
        assert!((oracle - 0.13081203594113694).abs() < 1e-12);
        assert!((old_information(&diag).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn holevo_values() {
        let z0 = DensityMatrix::pure(&ket(&[1., 0.])).unwrap();
        let z1 = DensityMatrix::pure(&ket(&[0., 1.])).unwrap();
        let orthogonal = Ensemble::new(vec![(0.5, z0.clone()), (0.5, z1)]).unwrap();
        assert!((holevo_chi(&orthogonal).unwrap() - 2f64.ln()).abs() < 1e-12);

        let single = Ensemble::new(vec![(1.0, random_density(2, 2, 9).unwrap())]).unwrap();
        assert!(holevo_chi(&single).unwrap().abs() < 1e-12);

        // {½|0⟩⟨0|, ½|+⟩⟨+|}: χ equals the average-state entropy.
        let plus = DensityMatrix::pure(&ket(&[1., 1.])).unwrap();
        let mixed_pair = Ensemble::new(vec![(0.5, z0), (0.5, plus)]).unwrap();
        assert!((holevo_chi(&mixed_pair).unwrap() - 0.4164955306996875).abs() < 1e-12);
    }

    #[test]
    fn bipartite_functionals() {
        let product = random_density(2, 2, 1)
            .unwrap()
            .tensor(&random_density(2, 2, 2).unwrap());
        assert!(mutual_information(&product).unwrap().abs() < 1e-9);
        assert!(coherent_information(&product).unwrap() <= 1e-9);

        let bell = bell();
        assert!((mutual_information(&bell).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-9);
        assert!((conditional_entropy(&bell, 1).unwrap() + 2f64.ln()).abs() < 1e-9);
        assert!((coherent_information(&bell).unwrap() - 2f64.ln()).abs() < 1e-9);

        // Classically correlated state.
        let cc = DensityMatrix::new(
            ComplexMatrix::from_real(
                4,
                4,
                &[
                    0.5, 0., 0., 0., //
                    0., 0., 0., 0., //
                    0., 0., 0., 0., //
                    0., 0., 0., 0.5,
                ],
            )
            .unwrap(),
            SubsystemDims::new(vec![2, 2]).unwrap(),
        )
        .unwrap();
        assert!((mutual_information(&cc).unwrap() - 2f64.ln()).abs() < 1e-9);

        let i4 = DensityMatrix::maximally_mixed(4)
            .unwrap()
            .with_dims(SubsystemDims::new(vec![2, 2]).unwrap())
            .unwrap();
        assert!((conditional_entropy(&i4, 1).unwrap() - 2f64.ln()).abs() < 1e-9);
        assert!((coherent_information(&i4).unwrap() + 2f64.ln()).abs() < 1e-9);

        // Product with pure first factor: I^coh = −S(σ).
        let pure = DensityMatrix::pure(&ket(&[1., 0.])).unwrap();
        let sigma = random_density(2, 2, 8).unwrap();
        let prod = pure.tensor(&sigma);
        let expect = -entropy(&sigma).unwrap();
        assert!((coherent_information(&prod).unwrap() - expect).abs() < 1e-9);

        // Wrong subsystem count.
        let flat = DensityMatrix::maximally_mixed(4).unwrap();
        assert!(mutual_information(&flat).is_err());
        assert!(conditional_entropy(&flat, 0).is_err());
        assert!(coherent_information(&flat).is_err());
    }

    #[test]
    fn concurrence_values() {
        assert!((concurrence(&bell()).unwrap() - 1.0).abs() < 1e-9);

        let product = random_density(2, 1, 4)
            .unwrap()
            .tensor(&random_density(2, 1, 5).unwrap());
        assert!(concurrence(&product).unwrap() < 1e-9);

        // Werner family p|Φ+⟩⟨Φ+| + (1−p)I/4 has C = max(0, (3p−1)/2).
        let p = 0.5;
        let noisy = DensityMatrix::new(
            bell()
                .matrix()
                .scale(c64(p, 0.))
                .add(&ComplexMatrix::identity(4).scale(c64((1.0 - p) / 4.0, 0.))),
            SubsystemDims::new(vec![2, 2]).unwrap(),
        )
        .unwrap();
        assert!((concurrence(&noisy).unwrap() - 0.25).abs() < 1e-9);

        assert!(concurrence(&DensityMatrix::maximally_mixed(4).unwrap()).is_err());
    }
}
