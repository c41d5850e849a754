//! Scenario file schema and object construction.
//!
//! Scenario files are JSON. Complex numbers are two-element arrays
//! `[re, im]`; matrices are flat row-major arrays of such pairs with the
//! (square) dimension inferred from the length. Every object is a tagged
//! map with a `kind` field; unknown fields and unknown output names are
//! errors, not warnings.

use anyhow::{anyhow, bail, Context as AnyhowContext, Result};
use serde::Deserialize;

use qipc::instruments::{
    depolarizing_instrument, luders_instrument, parent_instrument, parent_instrument_dilated,
    post_process, Channel, Instrument,
};
use qipc::linalg::{c64, C64, ComplexMatrix, SubsystemDims};
use qipc::measurements::{model_to_instrument, MeasurementModel, Observable};
use qipc::scenarios::{build_example2_state, Example2Config, QubitBasis};
use qipc::states::{random_unitary, DensityMatrix};

/// Root document.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub state: StateSpec,
    pub observables: ObservablePair,
    #[serde(default)]
    pub alice: Option<InstrumentSpec>,
    #[serde(default)]
    pub eve: Option<InstrumentSpec>,
    #[serde(default)]
    pub memory: Option<MemorySpec>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservablePair {
    pub x: ObservableSpec,
    pub y: ObservableSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemorySpec {
    pub joint_state: StateSpec,
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    MaximallyMixed {
        dim: usize,
    },
    Pure {
        vector: Vec<[f64; 2]>,
    },
    Matrix {
        matrix: Vec<[f64; 2]>,
        #[serde(default)]
        dims: Option<Vec<usize>>,
    },
    Random {
        dim: usize,
        rank: usize,
        seed: u64,
    },
    /// Two-qubit pair family: p |ψ⟩⟨ψ| + (1−p)/4 I with the system marginal
    /// pinned at weights (alpha, 1−alpha) in the chosen basis.
    CorrelatedPair {
        alpha: f64,
        p: f64,
        #[serde(default)]
        basis: Option<String>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableSpec {
    Pauli {
        axis: String,
    },
    Computational {
        dim: usize,
    },
    Trine,
    Effects {
        #[serde(default)]
        labels: Option<Vec<String>>,
        effects: Vec<Vec<[f64; 2]>>,
    },
    Random {
        dim: usize,
        outcomes: usize,
        seed: u64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstrumentSpec {
    Parent,
    ParentDilated,
    Luders,
    Depolarizing {
        target: StateSpec,
    },
    Model {
        ancilla: StateSpec,
        unitary: Vec<[f64; 2]>,
        pointer: ObservableSpec,
    },
    PostProcess {
        channel: ChannelSpec,
        inner: Box<InstrumentSpec>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Identity,
    Unitary { matrix: Vec<[f64; 2]> },
    RandomUnitary { seed: u64 },
    Random { seed: u64 },
    Depolarizing { target: StateSpec },
}

/// Parses a scenario document, reporting position-annotated errors.
pub fn parse(text: &str) -> Result<ScenarioFile> {
    serde_json::from_str(text).map_err(|e| {
        anyhow!(
            "scenario parse error at line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        )
    })
}

fn square_matrix(entries: &[[f64; 2]], what: &str) -> Result<ComplexMatrix> {
    let len = entries.len();
    let dim = (len as f64).sqrt().round() as usize;
    if dim * dim != len {
        bail!("{what}: {len} entries do not form a square row-major matrix");
    }
    let data: Vec<C64> = entries.iter().map(|[re, im]| c64(*re, *im)).collect();
    Ok(ComplexMatrix::new(dim, dim, data)?)
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        let state = match self {
            StateSpec::MaximallyMixed { dim } => DensityMatrix::maximally_mixed(*dim)?,
            StateSpec::Pure { vector } => {
                let v: Vec<C64> = vector.iter().map(|[re, im]| c64(*re, *im)).collect();
                DensityMatrix::pure(&v)?
            }
            StateSpec::Matrix { matrix, dims } => {
                let m = square_matrix(matrix, "state matrix")?;
                match dims {
                    Some(dims) => DensityMatrix::new(m, SubsystemDims::new(dims.clone())?)?,
                    None => DensityMatrix::from_matrix(m)?,
                }
            }
            StateSpec::Random { dim, rank, seed } => DensityMatrix::random(*dim, *rank, *seed)?,
            StateSpec::CorrelatedPair { alpha, p, basis } => {
                let eigenbasis = match basis {
                    Some(name) => QubitBasis::parse(name)?,
                    None => QubitBasis::default(),
                };
                let cfg = Example2Config {
                    alpha: *alpha,
                    p_grid: vec![*p],
                    eigenbasis,
                };
                build_example2_state(&cfg, *p)?
            }
        };
        Ok(state)
    }
}

impl ObservableSpec {
    pub fn build(&self) -> Result<Observable> {
        let obs = match self {
            ObservableSpec::Pauli { axis } => match axis.to_ascii_lowercase().as_str() {
                "x" => Observable::pauli_x(),
                "y" => Observable::pauli_y(),
                "z" => Observable::pauli_z(),
                other => bail!("unknown Pauli axis `{other}` (expected x, y or z)"),
            },
            ObservableSpec::Computational { dim } => Observable::computational(*dim)?,
            ObservableSpec::Trine => Observable::trine(),
            ObservableSpec::Effects { labels, effects } => {
                let built: Vec<ComplexMatrix> = effects
                    .iter()
                    .enumerate()
                    .map(|(k, e)| square_matrix(e, &format!("effect {k}")))
                    .collect::<Result<_>>()?;
                let labels = match labels {
                    Some(l) => l.clone(),
                    None => (0..built.len()).map(|k| k.to_string()).collect(),
                };
                Observable::new(labels, built)?
            }
            ObservableSpec::Random {
                dim,
                outcomes,
                seed,
            } => Observable::random(*dim, *outcomes, *seed)?,
        };
        Ok(obs)
    }
}

impl ChannelSpec {
    pub fn build(&self, in_dim: usize) -> Result<Channel> {
        let channel = match self {
            ChannelSpec::Identity => Channel::identity(in_dim),
            ChannelSpec::Unitary { matrix } => {
                let u = square_matrix(matrix, "channel unitary")?;
                if u.rows() != in_dim {
                    bail!(
                        "channel unitary has dimension {}, expected {in_dim}",
                        u.rows()
                    );
                }
                Channel::from_unitary(u)?
            }
            ChannelSpec::RandomUnitary { seed } => {
                Channel::from_unitary(random_unitary(in_dim, *seed))?
            }
            ChannelSpec::Random { seed } => Channel::random(in_dim, *seed),
            ChannelSpec::Depolarizing { target } => {
                Channel::depolarizing_to(&target.build()?, in_dim)?
            }
        };
        Ok(channel)
    }
}

impl InstrumentSpec {
    /// Builds the instrument measuring `obs`.
    pub fn build(&self, obs: &Observable) -> Result<Instrument> {
        let inst = match self {
            InstrumentSpec::Parent => parent_instrument(obs)?,
            InstrumentSpec::ParentDilated => parent_instrument_dilated(obs)?,
            InstrumentSpec::Luders => luders_instrument(obs)?,
            InstrumentSpec::Depolarizing { target } => {
                depolarizing_instrument(obs, &target.build()?)?
            }
            InstrumentSpec::Model {
                ancilla,
                unitary,
                pointer,
            } => {
                let model = MeasurementModel::new(
                    ancilla.build()?,
                    square_matrix(unitary, "model unitary")?,
                    pointer.build()?,
                )?;
                let inst = model_to_instrument(&model)?;
                if inst.len() != obs.len() {
                    bail!(
                        "model pointer has {} outcomes, observable has {}",
                        inst.len(),
                        obs.len()
                    );
                }
                inst
            }
            InstrumentSpec::PostProcess { channel, inner } => {
                let inner = inner.build(obs)?;
                post_process(&channel.build(inner.out_dim())?, &inner)?
            }
        };
        Ok(inst)
    }
}

impl MemorySpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        let state = self.joint_state.build()?;
        let state = match &self.dims {
            Some(dims) => {
                let total: usize = dims.iter().product();
                if total != state.dim() {
                    bail!(
                        "memory dims {:?} do not partition dimension {}",
                        dims,
                        state.dim()
                    );
                }
                state.with_dims(SubsystemDims::new(dims.clone())?)?
            }
            None if state.dims().len() == 2 => state,
            None => {
                let d = state.dim();
                let side = (d as f64).sqrt().round() as usize;
                if side * side != d {
                    bail!("memory state of dimension {d} needs an explicit dims split");
                }
                state.with_dims(SubsystemDims::new(vec![side, side])?)?
            }
        };
        Ok(state)
    }
}

/// Checks every requested output against the known set up front.
pub fn validate_outputs(outputs: &[String]) -> Result<()> {
    const KNOWN: &[&str] = &[
        "old_ipc",
        "old_ipc_generalized",
        "chi_alice",
        "leak",
        "min_leak",
        "ipc_modified",
        "sharp_relation_residual",
        "old_ipc_mem",
        "new_ipc_mem",
        "memory_gap",
    ];
    if outputs.is_empty() {
        bail!("scenario requests no outputs");
    }
    for name in outputs {
        if !KNOWN.contains(&name.as_str()) {
            bail!(
                "unknown output `{name}` (known outputs: {})",
                KNOWN.join(", ")
            );
        }
    }
    Ok(())
}

/// Loads and fully validates a scenario from disk.
pub fn load(path: &std::path::Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read scenario file {}", path.display()))?;
    let scenario = parse(&text)?;
    validate_outputs(&scenario.outputs)?;
    Ok(scenario)
}
