//! JSON interchange documents for channels, states and Gaussian parameters.
//!
//! Complex entries are `[re, im]` pairs. Documents are emitted with
//! shortest round-trip float formatting, so `parse(emit(x))` reproduces
//! every entry bit for bit.

use qcap_core::channels::{DensityOperator, QuantumChannel};
use qcap_core::gaussian::{GaussianChannelParams, RealMatrix};
use qcap_core::numerics::CMatrix;
use qcap_core::C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1.0";

type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDocument {
    pub schema_version: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<ComplexRows>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub schema_version: String,
    pub dim: usize,
    pub matrix: ComplexRows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianDocument {
    pub schema_version: String,
    pub s_a: usize,
    pub s_b: usize,
    pub k: Vec<Vec<f64>>,
    pub l: Vec<f64>,
    pub alpha: Vec<Vec<f64>>,
}

/// Any of the three document kinds, told apart by their distinguishing key.
#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Channel(ChannelDocument),
    State(StateDocument),
    Gaussian(GaussianDocument),
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn decode<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let message = e.into_inner().to_string();
        // point a missing field at the field itself
        let missing = message
            .strip_prefix("missing field `")
            .and_then(|rest| rest.split('`').next());
        let path = match (path.as_str(), missing) {
            (".", Some(field)) => field.to_owned(),
            (".", None) => "$".to_owned(),
            (p, Some(field)) => format!("{p}.{field}"),
            (p, None) => p.to_owned(),
        };
        schema(path, message)
    })
}

fn check_version(v: &str) -> Result<(), CliError> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(schema(
            "schema_version",
            format!("unsupported version {v:?}, expected {SCHEMA_VERSION:?}"),
        ))
    }
}

fn complex_matrix(rows: &ComplexRows, shape: (usize, usize), path: &str) -> Result<CMatrix, CliError> {
    if rows.len() != shape.0 {
        return Err(schema(path, format!("expected {} rows, found {}", shape.0, rows.len())));
    }
    let mut data = Vec::with_capacity(shape.0 * shape.1);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != shape.1 {
            return Err(schema(
                format!("{path}[{i}]"),
                format!("expected {} columns, found {}", shape.1, row.len()),
            ));
        }
        for (j, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(schema(format!("{path}[{i}][{j}]"), "non-finite entry"));
            }
            data.push(C64::new(*re, *im));
        }
    }
    Ok(CMatrix::from_vec(shape.0, shape.1, data)?)
}

fn complex_rows(m: &CMatrix) -> ComplexRows {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn real_matrix(rows: &[Vec<f64>], shape: (usize, usize), path: &str) -> Result<RealMatrix, CliError> {
    if rows.len() != shape.0 {
        return Err(schema(path, format!("expected {} rows, found {}", shape.0, rows.len())));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != shape.1) {
        return Err(schema(
            format!("{path}[{i}]"),
            format!("expected {} columns, found {}", shape.1, row.len()),
        ));
    }
    RealMatrix::from_rows(rows).map_err(|e| schema(path, e.to_string()))
}

impl ChannelDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        decode(text)
    }

    pub fn from_channel(ch: &QuantumChannel) -> Self {
        ChannelDocument {
            schema_version: SCHEMA_VERSION.to_owned(),
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().iter().map(complex_rows).collect(),
        }
    }

    /// Shape checks per Kraus operator, then CPTP validation.
    pub fn to_channel(&self) -> Result<QuantumChannel, CliError> {
        check_version(&self.schema_version)?;
        if self.kraus.is_empty() {
            return Err(schema("kraus", "at least one Kraus operator is required"));
        }
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(k, m)| complex_matrix(m, (self.dim_out, self.dim_in), &format!("kraus[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        QuantumChannel::new(kraus).map_err(|e| schema("kraus", e.to_string()))
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

impl StateDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        decode(text)
    }

    pub fn from_state(rho: &DensityOperator) -> Self {
        StateDocument {
            schema_version: SCHEMA_VERSION.to_owned(),
            dim: rho.dim(),
            matrix: complex_rows(rho.matrix()),
        }
    }

    pub fn to_state(&self) -> Result<DensityOperator, CliError> {
        check_version(&self.schema_version)?;
        let m = complex_matrix(&self.matrix, (self.dim, self.dim), "matrix")?;
        DensityOperator::new(m).map_err(|e| schema("matrix", e.to_string()))
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

impl GaussianDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        decode(text)
    }

    pub fn from_params(p: &GaussianChannelParams) -> Self {
        GaussianDocument {
            schema_version: SCHEMA_VERSION.to_owned(),
            s_a: p.s_a(),
            s_b: p.s_b(),
            k: p.k().to_rows(),
            l: p.l().to_vec(),
            alpha: p.alpha().to_rows(),
        }
    }

    /// Shapes and symmetry only; the noise inequality is checked by the caller.
    pub fn to_params_unchecked(&self) -> Result<GaussianChannelParams, CliError> {
        check_version(&self.schema_version)?;
        let k = real_matrix(&self.k, (2 * self.s_a, 2 * self.s_b), "k")?;
        if self.l.len() != 2 * self.s_b {
            return Err(schema("l", format!("expected length {}, found {}", 2 * self.s_b, self.l.len())));
        }
        if self.l.iter().any(|x| !x.is_finite()) {
            return Err(schema("l", "non-finite entry"));
        }
        let alpha = real_matrix(&self.alpha, (2 * self.s_b, 2 * self.s_b), "alpha")?;
        GaussianChannelParams::from_parts(self.s_a, self.s_b, k, self.l.clone(), alpha)
            .map_err(|e| schema("alpha", e.to_string()))
    }

    /// Fully validated parameters, including the noise inequality.
    pub fn to_params(&self) -> Result<GaussianChannelParams, CliError> {
        let p = self.to_params_unchecked()?;
        let min = p.nid_min_eigenvalue()?;
        if min < -qcap_core::gaussian::NID_TOL {
            return Err(schema(
                "alpha",
                format!("noise inequality violated (minimum eigenvalue {min:.3e})"),
            ));
        }
        Ok(p)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| schema("$", e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| schema("$", "expected a JSON object"))?;
        if obj.contains_key("kraus") {
            ChannelDocument::parse(text).map(Document::Channel)
        } else if obj.contains_key("s_a") || obj.contains_key("alpha") {
            GaussianDocument::parse(text).map(Document::Gaussian)
        } else if obj.contains_key("matrix") {
            StateDocument::parse(text).map(Document::State)
        } else {
            Err(schema("$", "unrecognised document: expected one of `kraus`, `matrix`, `s_a`"))
        }
    }
}
