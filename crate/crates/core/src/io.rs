//! JSON encodings for matrices, states, Kraus sets and scenarios.
//!
//! ```text
//! matrix:   {"rows": n, "cols": m, "data": [[re, im], ...]}        (row-major)
//! state:    {"bloch": {"r": .., "theta": .., "phi": ..}}  |  {"matrix": <matrix>}
//! kraus:    {"d_in": n, "d_out": m, "ops": [<matrix>, ...]}
//! scenario: {"scenario": "cnot", "r0": x}
//!         | {"scenario": "custom", "hamiltonian": <matrix>, "rho_ie0": <matrix>, "dims": [d_i, d_e]}
//! ```
//!
//! Floats are written with 17 significant digits so every value round-trips.

use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::dynamics::{CnotScenario, CompositeState, Scenario};
use crate::error::{Error, Result};
use crate::kraus::KrausSet;
use crate::linalg::{c, ComplexMatrix};
use crate::state::{bloch_to_density, validate_density, BlochVector, DensityMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        ComplexMatrix::new(j.rows, j.cols, j.data.into_iter().map(|[re, im]| c(re, im)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlochJson {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<BlochJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixJson>,
}

impl StateJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            bloch: None,
            matrix: Some(m.into()),
        }
    }

    pub fn from_bloch(b: &BlochVector) -> Self {
        Self {
            bloch: Some(BlochJson {
                r: b.r,
                theta: b.theta,
                phi: b.phi,
            }),
            matrix: None,
        }
    }

    /// Decodes and validates. A matrix that parses but is not a density
    /// matrix yields [`Error::InvalidState`] with the full violation report.
    pub fn into_state(self, tol: f64) -> Result<DensityMatrix> {
        match (self.bloch, self.matrix) {
            (Some(b), None) => bloch_to_density(&BlochVector::new(b.r, b.theta, b.phi)?),
            (None, Some(m)) => {
                let m = ComplexMatrix::try_from(m)?;
                validate_density(&m, tol).map_err(Error::InvalidState)
            }
            _ => Err(Error::Format(
                "state must have exactly one of \"bloch\" or \"matrix\"".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausJson {
    pub d_in: usize,
    pub d_out: usize,
    pub ops: Vec<MatrixJson>,
}

impl From<&KrausSet> for KrausJson {
    fn from(k: &KrausSet) -> Self {
        Self {
            d_in: k.d_in(),
            d_out: k.d_out(),
            ops: k.ops().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl TryFrom<KrausJson> for KrausSet {
    type Error = Error;

    fn try_from(j: KrausJson) -> Result<Self> {
        let ops = j
            .ops
            .into_iter()
            .map(ComplexMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        let k = KrausSet::new(ops)?;
        if (k.d_in(), k.d_out()) != (j.d_in, j.d_out) {
            return Err(Error::Format(format!(
                "declared dimensions {}->{} do not match operators {}->{}",
                j.d_in,
                j.d_out,
                k.d_in(),
                k.d_out()
            )));
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScenarioJson {
    Cnot {
        r0: f64,
    },
    Custom {
        hamiltonian: MatrixJson,
        rho_ie0: MatrixJson,
        dims: [usize; 2],
    },
}

impl ScenarioJson {
    pub fn into_scenario(self, tol: f64) -> Result<Scenario> {
        match self {
            ScenarioJson::Cnot { r0 } => Ok(Scenario::Cnot(CnotScenario::new(r0)?)),
            ScenarioJson::Custom {
                hamiltonian,
                rho_ie0,
                dims,
            } => {
                let h = ComplexMatrix::try_from(hamiltonian)?;
                let m = ComplexMatrix::try_from(rho_ie0)?;
                let rho = validate_density(&m, tol).map_err(Error::InvalidState)?;
                Scenario::custom(h, CompositeState::new(rho, (dims[0], dims[1]))?)
            }
        }
    }
}

/// serde_json formatter printing every float with 17 significant digits.
#[derive(Debug, Default, Clone, Copy)]
pub struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = to_json_string(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_state(path: &Path, tol: f64) -> Result<DensityMatrix> {
    read_json::<StateJson>(path)?.into_state(tol)
}

pub fn load_kraus(path: &Path) -> Result<KrausSet> {
    KrausSet::try_from(read_json::<KrausJson>(path)?)
}

pub fn load_matrix(path: &Path) -> Result<ComplexMatrix> {
    ComplexMatrix::try_from(read_json::<MatrixJson>(path)?)
}

pub fn load_scenario(path: &Path, tol: f64) -> Result<Scenario> {
    read_json::<ScenarioJson>(path)?.into_scenario(tol)
}
