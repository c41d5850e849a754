//! Worked scenarios: the QKD-style averaging example, the memory sweep with
//! concurrence/mutual-information curves, and the monotonicity probe.

use crate::info::{concurrence, mutual_information};
use crate::ipc::{ipc_modified, memory_gap, new_ipc_mem, old_ipc, MemoryContext};
use crate::linalg::{c64, C64, ComplexMatrix, SubsystemDims};
use crate::measurements::Observable;
use crate::states::{Context, DensityMatrix};
use crate::{Error, Result};

/// Qubit basis used for the correlated-pair family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QubitBasis {
    PauliX,
    #[default]
    PauliY,
    PauliZ,
}

impl QubitBasis {
    /// The (+1, −1) eigenvectors.
    pub fn vectors(&self) -> ([C64; 2], [C64; 2]) {
        let inv = 1.0 / 2f64.sqrt();
        match self {
            QubitBasis::PauliX => (
                [c64(inv, 0.), c64(inv, 0.)],
                [c64(inv, 0.), c64(-inv, 0.)],
            ),
            QubitBasis::PauliY => (
                [c64(inv, 0.), c64(0., inv)],
                [c64(inv, 0.), c64(0., -inv)],
            ),
            QubitBasis::PauliZ => ([c64(1., 0.), c64(0., 0.)], [c64(0., 0.), c64(1., 0.)]),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "x" => Ok(QubitBasis::PauliX),
            "y" => Ok(QubitBasis::PauliY),
            "z" => Ok(QubitBasis::PauliZ),
            other => Err(Error::InvalidParameter(format!(
                "unknown basis `{other}` (expected x, y or z)"
            ))),
        }
    }
}

/// Configuration of the correlated-pair sweep.
///
/// The pair family is σ(p) = p|ψ⟩⟨ψ| + (1−p)/4·I with
/// |ψ⟩ = √α′|λ₁λ′₁⟩ + √β′|λ₂λ′₂⟩, where α′ is fixed by requiring the
/// system marginal to stay at α|λ₁⟩⟨λ₁| + (1−α)|λ₂⟩⟨λ₂| for every p:
/// α = pα′ + (1−p)/2.
#[derive(Clone, Debug)]
pub struct Example2Config {
    pub alpha: f64,
    pub p_grid: Vec<f64>,
    pub eigenbasis: QubitBasis,
}

impl Default for Example2Config {
    fn default() -> Self {
        Self {
            alpha: 0.25,
            p_grid: uniform_grid(0.5, 1.0, 101),
            eigenbasis: QubitBasis::default(),
        }
    }
}

/// Uniform grid with `steps` points including both endpoints.
pub fn uniform_grid(p_min: f64, p_max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![p_min];
    }
    (0..steps)
        .map(|k| p_min + (p_max - p_min) * k as f64 / (steps - 1) as f64)
        .collect()
}

impl Example2Config {
    /// Schmidt weight α′(p) keeping the system marginal fixed.
    pub fn alpha_prime(&self, p: f64) -> Result<f64> {
        if p <= 0.0 || p > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "noise weight p = {p} out of (0, 1]"
            )));
        }
        let a = (self.alpha - (1.0 - p) / 2.0) / p;
        if !(-1e-12..=1.0 + 1e-12).contains(&a) {
            return Err(Error::InvalidParameter(format!(
                "alpha' = {a:.6} out of [0, 1] at p = {p} (needs p >= {})",
                1.0 - 2.0 * self.alpha.min(1.0 - self.alpha)
            )));
        }
        Ok(a.clamp(0.0, 1.0))
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} out of [0, 1]",
                self.alpha
            )));
        }
        if self.p_grid.is_empty() {
            return Err(Error::InvalidParameter("empty p grid".into()));
        }
        for &p in &self.p_grid {
            self.alpha_prime(p)?;
        }
        Ok(())
    }

    fn grid_sorted(&self) -> bool {
        self.p_grid.windows(2).all(|w| w[0] <= w[1])
    }
}

/// One row of the sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub p: f64,
    pub concurrence: f64,
    pub mutual_info_in_m: f64,
    pub leak_no_mem: f64,
    pub leak_with_mem: f64,
    pub leak_difference: f64,
    pub normalized_concurrence: f64,
    pub normalized_mutual_info: f64,
    pub normalized_leak_difference: f64,
}

/// Sweep output: rows ordered by p, plus the names of any columns whose grid
/// maximum vanished and were therefore left unnormalised.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub degenerate_columns: Vec<&'static str>,
}

/// Averaged four-context comparison of the two measures on I/2 with the
/// σ_z/σ_x measurement pair.
#[derive(Clone, Debug)]
pub struct Example1Result {
    /// (X label, Y label, old measure, modified measure) per context.
    pub contexts: Vec<(String, String, f64, f64)>,
    pub old_avg: f64,
    pub new_avg: f64,
}

/// Runs the four-context random-basis game on the maximally mixed state.
pub fn run_example1() -> Result<Example1Result> {
    let mixed = DensityMatrix::maximally_mixed(2)?;
    let pairs = [
        ("z", Observable::pauli_z()),
        ("x", Observable::pauli_x()),
    ];
    let mut contexts = Vec::with_capacity(4);
    let mut old_avg = 0.0;
    let mut new_avg = 0.0;
    for (x_name, x_obs) in &pairs {
        for (y_name, y_obs) in &pairs {
            let old = old_ipc(&mixed, x_obs, y_obs)?;
            let context = Context::new(mixed.clone(), x_obs.clone(), y_obs.clone())?;
            let new = ipc_modified(&context)?;
            old_avg += old / 4.0;
            new_avg += new / 4.0;
            contexts.push((x_name.to_string(), y_name.to_string(), old, new));
        }
    }
    Ok(Example1Result {
        contexts,
        old_avg,
        new_avg,
    })
}

/// Builds the correlated pair σ(p) for one grid point.
pub fn build_example2_state(cfg: &Example2Config, p: f64) -> Result<DensityMatrix> {
    let alpha_prime = cfg.alpha_prime(p)?;
    let beta_prime = 1.0 - alpha_prime;
    let (lambda1, lambda2) = cfg.eigenbasis.vectors();
    let mut psi = vec![c64(0., 0.); 4];
    for i in 0..2 {
        for j in 0..2 {
            psi[i * 2 + j] =
                lambda1[i] * lambda1[j] * c64(alpha_prime.sqrt(), 0.)
                    + lambda2[i] * lambda2[j] * c64(beta_prime.sqrt(), 0.);
        }
    }
    let pure = ComplexMatrix::outer(&psi, &psi);
    let matrix = pure
        .scale(c64(p, 0.))
        .add(&ComplexMatrix::identity(4).scale(c64((1.0 - p) / 4.0, 0.)));
    DensityMatrix::new(matrix.hermitized(), SubsystemDims::new(vec![2, 2])?)
}

/// Closed-form concurrence of the pair family,
/// C(p) = max(0, 2p√(α′β′) − (1−p)/2).
pub fn family_concurrence(cfg: &Example2Config, p: f64) -> Result<f64> {
    let a = cfg.alpha_prime(p)?;
    Ok((2.0 * p * (a * (1.0 - a)).sqrt() - (1.0 - p) / 2.0).max(0.0))
}

/// Closed-form zero crossing of the family concurrence, if it lies in the
/// physical window [½, 1].
pub fn concurrence_crossing(alpha: f64) -> Option<f64> {
    // 4(α−u)(1−α−u) = u² with u = (1−p)/2 reduces to 3u² − 4u + 4α(1−α) = 0.
    let disc = 4.0 - 12.0 * alpha * (1.0 - alpha);
    if disc < 0.0 {
        return None;
    }
    let u = (2.0 - disc.sqrt()) / 3.0;
    let p = 1.0 - 2.0 * u;
    (0.5..=1.0).contains(&p).then_some(p)
}

/// Runs the sweep: per grid point the pair correlations and the leakage with
/// and without the memory, with per-column max normalisation.
pub fn run_example2(cfg: &Example2Config) -> Result<Sweep> {
    cfg.validate()?;
    let x_obs = Observable::pauli_z();
    let y_obs = Observable::pauli_x();
    let mut rows = Vec::with_capacity(cfg.p_grid.len());
    for &p in &cfg.p_grid {
        let joint = build_example2_state(cfg, p)?;
        let c = concurrence(&joint)?;
        let mi = mutual_information(&joint)?;
        let mc = MemoryContext::new(joint.clone(), x_obs.clone(), y_obs.clone())?;
        let reduced = mc.reduced_state()?;
        let context = Context::new(reduced, x_obs.clone(), y_obs.clone())?;
        let leak_no_mem = ipc_modified(&context)?;
        let leak_with_mem = new_ipc_mem(&mc)?;
        let leak_difference = memory_gap(&mc)?.new_gap;
        rows.push(SweepRow {
            p,
            concurrence: c,
            mutual_info_in_m: mi,
            leak_no_mem,
            leak_with_mem,
            leak_difference,
            normalized_concurrence: 0.0,
            normalized_mutual_info: 0.0,
            normalized_leak_difference: 0.0,
        });
    }

    // A column maximum at roundoff scale would amplify noise if divided
    // through; such columns are flagged and passed through unscaled.
    const NORMALISATION_FLOOR: f64 = 1e-12;
    let mut degenerate = Vec::new();
    let max_of = |get: fn(&SweepRow) -> f64, rows: &[SweepRow]| {
        rows.iter().map(get).fold(0.0f64, f64::max)
    };
    let c_max = max_of(|r| r.concurrence, &rows);
    let mi_max = max_of(|r| r.mutual_info_in_m, &rows);
    let ld_max = max_of(|r| r.leak_difference, &rows);
    for (name, max) in [
        ("concurrence", c_max),
        ("mutual_info", mi_max),
        ("leak_diff", ld_max),
    ] {
        if max <= NORMALISATION_FLOOR {
            degenerate.push(name);
        }
    }
    for row in &mut rows {
        row.normalized_concurrence = if c_max > NORMALISATION_FLOOR {
            row.concurrence / c_max
        } else {
            row.concurrence
        };
        row.normalized_mutual_info = if mi_max > NORMALISATION_FLOOR {
            row.mutual_info_in_m / mi_max
        } else {
            row.mutual_info_in_m
        };
        row.normalized_leak_difference = if ld_max > NORMALISATION_FLOOR {
            row.leak_difference / ld_max
        } else {
            row.leak_difference
        };
    }
    Ok(Sweep {
        rows,
        degenerate_columns: degenerate,
    })
}

/// Monotonicity status of one sweep column.
#[derive(Clone, Debug)]
pub struct ColumnMonotonicity {
    pub name: &'static str,
    pub non_decreasing: bool,
    /// First offending pair ((p, value), (p, value)), verbatim from the rows.
    pub counterexample: Option<((f64, f64), (f64, f64))>,
}

/// Report of the correlation-vs-leakage monotonicity probe.
#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub columns: Vec<ColumnMonotonicity>,
    pub all_monotone: bool,
}

/// Checks whether concurrence, mutual information and the leakage difference
/// are all non-decreasing in p (within 1e−9 slack), i.e. whether the memory
/// keeps suppressing the leak as the correlations grow.
pub fn probe_conjecture(cfg: &Example2Config, resort_grid: bool) -> Result<MonotonicityReport> {
    let mut cfg = cfg.clone();
    if !cfg.grid_sorted() {
        if resort_grid {
            cfg.p_grid
                .sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        } else {
            return Err(Error::InvalidParameter(
                "p grid must be sorted ascending (pass resort_grid to sort it)".into(),
            ));
        }
    }
    let sweep = run_example2(&cfg)?;
    let columns = [
        ("concurrence", (|r: &SweepRow| r.concurrence) as fn(&SweepRow) -> f64),
        ("mutual_info", |r: &SweepRow| r.mutual_info_in_m),
        ("leak_diff", |r: &SweepRow| r.leak_difference),
    ]
    .into_iter()
    .map(|(name, get)| {
        let mut counterexample = None;
        for pair in sweep.rows.windows(2) {
            if get(&pair[1]) < get(&pair[0]) - 1e-9 {
                counterexample = Some((
                    (pair[0].p, get(&pair[0])),
                    (pair[1].p, get(&pair[1])),
                ));
                break;
            }
        }
        ColumnMonotonicity {
            name,
            non_decreasing: counterexample.is_none(),
            counterexample,
        }
    })
    .collect::<Vec<_>>();
    let all_monotone = columns.iter().all(|c| c.non_decreasing);
    Ok(MonotonicityReport {
        columns,
        all_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::entropy;
    use crate::instruments::{luders_instrument, depolarizing_instrument};
    use crate::ipc::leak;
    use crate::states::DensityMatrix;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn example1_matches_paper_values() {
        let result = run_example1().unwrap();
        assert!(result.old_avg.abs() < 1e-9);
        assert!((result.new_avg - LN2 / 2.0).abs() < 1e-9);
        assert_eq!(result.contexts.len(), 4);
        for (x, y, old, new) in &result.contexts {
            assert!(old.abs() < 1e-9);
            if x == y {
                assert!(new.abs() < 1e-9);
            } else {
                assert!((new - LN2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn example1_with_non_parent_eve_leaks_more() {
        // Replacing Eve's parent instruments with depolarising ones can only
        // raise the average leak.
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let pairs = [Observable::pauli_z(), Observable::pauli_x()];
        let mut avg = 0.0;
        for x_obs in &pairs {
            for y_obs in &pairs {
                let alice = luders_instrument(x_obs).unwrap();
                let eta = DensityMatrix::pure(&[c64(1., 0.), c64(0., 0.)]).unwrap();
                let eve = depolarizing_instrument(y_obs, &eta).unwrap();
                avg += leak(&mixed, &alice, &eve).unwrap().leak / 4.0;
            }
        }
        assert!(avg >= LN2 / 2.0 - 1e-9);
    }

    #[test]
    fn example2_state_construction() {
        let cfg = Example2Config::default();

        // p = 1 gives the pure pair with α′ = α.
        assert!((cfg.alpha_prime(1.0).unwrap() - 0.25).abs() < 1e-12);
        let pure = build_example2_state(&cfg, 1.0).unwrap();
        let purity = pure.matrix().mul(pure.matrix()).trace().re;
        assert!((purity - 1.0).abs() < 1e-9);

        // At p = 3/4 the Schmidt weight works out to α′ = 1/6.
        assert!((cfg.alpha_prime(0.75).unwrap() - 1.0 / 6.0).abs() < 1e-12);

        // The system marginal is pinned to spectrum {α, 1−α} at every p.
        for &p in &[0.5, 0.6, 0.75, 0.9, 1.0] {
            let joint = build_example2_state(&cfg, p).unwrap();
            let reduced = joint.partial_trace(&[0]).unwrap();
            let spectrum = reduced.spectrum().unwrap();
            assert!((spectrum[0] - 0.25).abs() < 1e-9, "p={p}");
            assert!((spectrum[1] - 0.75).abs() < 1e-9, "p={p}");
        }

        // α′ < 0 below p = 1/2 for α = 1/4.
        assert!(cfg.alpha_prime(0.4).is_err());
        assert!(build_example2_state(&cfg, 0.4).is_err());
    }

    #[test]
    fn example2_sweep_invariants() {
        let cfg = Example2Config {
            p_grid: uniform_grid(0.5, 1.0, 21),
            ..Default::default()
        };
        let sweep = run_example2(&cfg).unwrap();
        assert_eq!(sweep.rows.len(), 21);
        assert!(sweep.degenerate_columns.is_empty());

        let x_obs = Observable::pauli_z();
        for row in &sweep.rows {
            // Closed-form concurrence.
            let expect_c = family_concurrence(&cfg, row.p).unwrap();
            assert!((row.concurrence - expect_c).abs() < 1e-9, "p={}", row.p);

            // leak difference = leak_no_mem − leak_with_mem, never negative,
            // and equals I(A:M) of the post-measurement joint state.
            assert!(
                (row.leak_difference - (row.leak_no_mem - row.leak_with_mem)).abs() < 1e-12
            );
            assert!(row.leak_difference >= -1e-9);
            let joint = build_example2_state(&cfg, row.p).unwrap();
            let mc = MemoryContext::new(joint, x_obs.clone(), Observable::pauli_x()).unwrap();
            let rho_am = {
                let lifted = crate::measurements::luders_channel(&x_obs)
                    .unwrap()
                    .kraus_map()
                    .tensor_identity(2);
                DensityMatrix::new(
                    lifted.apply_matrix(mc.joint().matrix()).hermitized(),
                    SubsystemDims::new(vec![2, 2]).unwrap(),
                )
                .unwrap()
            };
            assert!((row.leak_difference - mutual_information(&rho_am).unwrap()).abs() < 1e-9);

            // After Eve the A side is maximally mixed and decoupled.
            let n_x = crate::measurements::luders_channel(&Observable::pauli_x())
                .unwrap()
                .kraus_map()
                .tensor_identity(2);
            let rho_apm = DensityMatrix::new(
                n_x.apply_matrix(rho_am.matrix()).hermitized(),
                SubsystemDims::new(vec![2, 2]).unwrap(),
            )
            .unwrap();
            let a_part = rho_apm.partial_trace(&[0]).unwrap();
            assert!(
                a_part
                    .matrix()
                    .max_abs_diff(DensityMatrix::maximally_mixed(2).unwrap().matrix())
                    < 1e-9
            );
            let m_part = rho_apm.partial_trace(&[1]).unwrap();
            let product = a_part.tensor(&m_part);
            assert!(rho_apm.matrix().max_abs_diff(product.matrix()) < 1e-9);
        }

        // End point: the leak difference at p = 1 is the binary entropy of
        // the marginal weights.
        let last = sweep.rows.last().unwrap();
        let h = crate::info::shannon_entropy(&[0.25, 0.75]);
        assert!((last.leak_difference - h).abs() < 1e-9);
        assert!((last.normalized_concurrence - 1.0).abs() < 1e-12);

        // At p = 1/2 the pair degenerates: α′ = 0 makes the post-measurement
        // joint state exactly product, so the leak difference vanishes with
        // the concurrence even though σ_in,M itself is still correlated.
        let first = &sweep.rows[0];
        assert!(first.concurrence.abs() < 1e-12);
        assert!(first.leak_difference.abs() < 1e-9);
        assert!(first.mutual_info_in_m > 1e-2);

        // Strictly above 1/2 but below the crossing the concurrence still
        // vanishes while the memory keeps suppressing leakage.
        let below_crossing = sweep
            .rows
            .iter()
            .find(|r| r.p > 0.5 && r.p < 0.548)
            .unwrap();
        assert!(below_crossing.concurrence.abs() < 1e-12);
        assert!(below_crossing.leak_difference > 1e-4);
    }

    #[test]
    fn degenerate_normalisation_is_flagged() {
        // A single grid point at p = 1/2 has zero concurrence and zero leak
        // difference; those columns are flagged and passed through unscaled.
        let cfg = Example2Config {
            p_grid: vec![0.5],
            ..Default::default()
        };
        let sweep = run_example2(&cfg).unwrap();
        assert_eq!(sweep.rows.len(), 1);
        assert_eq!(sweep.degenerate_columns, vec!["concurrence", "leak_diff"]);
        let row = &sweep.rows[0];
        assert_eq!(row.normalized_concurrence, row.concurrence);
        assert!((row.normalized_mutual_info - 1.0).abs() < 1e-12);
    }

    #[test]
    fn crossing_location() {
        let p = concurrence_crossing(0.25).unwrap();
        assert!((p - 0.5485837703548636).abs() < 1e-12);
        // Slightly above the crossing the concurrence is positive.
        let cfg = Example2Config::default();
        assert!(family_concurrence(&cfg, p + 1e-6).unwrap() > 0.0);
        assert!(family_concurrence(&cfg, p - 1e-6).unwrap() == 0.0);
    }

    #[test]
    fn conjecture_probe() {
        let cfg = Example2Config {
            p_grid: uniform_grid(0.5, 1.0, 51),
            ..Default::default()
        };
        let report = probe_conjecture(&cfg, false).unwrap();
        assert!(report.all_monotone, "{:?}", report.columns);

        // Single point is trivially monotone.
        let single = Example2Config {
            p_grid: vec![0.7],
            ..Default::default()
        };
        assert!(probe_conjecture(&single, false).unwrap().all_monotone);

        // Reversed grids error unless resorting is requested.
        let reversed = Example2Config {
            p_grid: vec![1.0, 0.5],
            ..Default::default()
        };
        assert!(probe_conjecture(&reversed, false).is_err());
        assert!(probe_conjecture(&reversed, true).unwrap().all_monotone);
    }

    #[test]
    fn entropy_of_memory_states_sane() {
        // S(σ_M) at p = 1 equals the binary entropy of (α, β).
        let cfg = Example2Config::default();
        let joint = build_example2_state(&cfg, 1.0).unwrap();
        let mem = joint.partial_trace(&[1]).unwrap();
        let h = crate::info::shannon_entropy(&[0.25, 0.75]);
        assert!((entropy(&mem).unwrap() - h).abs() < 1e-9);

        // The memory marginal is α|λ′₁⟩⟨λ′₁| + β|λ′₂⟩⟨λ′₂| at every p.
        let (l1, l2) = cfg.eigenbasis.vectors();
        let expect = ComplexMatrix::outer(&l1, &l1)
            .scale(c64(0.25, 0.))
            .add(&ComplexMatrix::outer(&l2, &l2).scale(c64(0.75, 0.)));
        for &p in &[0.5, 0.75, 0.9, 1.0] {
            let joint = build_example2_state(&cfg, p).unwrap();
            let mem = joint.partial_trace(&[1]).unwrap();
            assert!(mem.matrix().max_abs_diff(&expect) < 1e-9, "p={p}");
        }
    }
}
