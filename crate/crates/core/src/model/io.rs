//! Model persistence: a versioned, self-describing JSON document.
//!
//! Floats are written in shortest round-trip form, so save -> load -> predict
//! reproduces scores bit-exactly. The schema is documented in the README.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::antecedent::AntecedentParams;
use crate::dataset::Standardizer;
use crate::error::{Error, Result};
use crate::solver::{SolverState, TrainConfig};

use super::{ConsequentMatrix, MlTskModel, Timings, TrainingReport};

pub const MODEL_FORMAT: &str = "ml-tsk-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    /// Row-major entries.
    data: Vec<f64>,
}

impl MatrixRepr {
    fn from_matrix(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        MatrixRepr {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    fn into_matrix(self) -> Result<DMatrix<f64>> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::validation(format!(
                "matrix block declares {}x{} but carries {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

#[derive(Serialize, Deserialize)]
struct StandardizerRepr {
    mean: Vec<f64>,
    stddev: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct AntecedentRepr {
    h: f64,
    centers: MatrixRepr,
    widths: MatrixRepr,
}

#[derive(Serialize, Deserialize)]
struct TrainingRepr {
    solver: SolverState,
    fcm_iterations: usize,
    fcm_objective_trace: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    tau: f64,
    label_names: Vec<String>,
    config: TrainConfig,
    standardizer: StandardizerRepr,
    antecedents: AntecedentRepr,
    consequents: MatrixRepr,
    training: TrainingRepr,
}

#[derive(Deserialize)]
struct Probe {
    format: Option<String>,
    version: Option<u32>,
}

/// Writes the model document to `path`.
pub fn save_model(model: &MlTskModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = ModelFile {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        tau: model.tau,
        label_names: model.label_names.clone(),
        config: model.config.clone(),
        standardizer: StandardizerRepr {
            mean: model.standardizer.mean().iter().copied().collect(),
            stddev: model.standardizer.stddev().iter().copied().collect(),
        },
        antecedents: AntecedentRepr {
            h: model.antecedents.h(),
            centers: MatrixRepr::from_matrix(model.antecedents.centers()),
            widths: MatrixRepr::from_matrix(model.antecedents.widths()),
        },
        consequents: MatrixRepr::from_matrix(model.consequents.matrix()),
        training: TrainingRepr {
            solver: model.report.solver.clone(),
            fcm_iterations: model.report.fcm_iterations,
            fcm_objective_trace: model.report.fcm_objective_trace.clone(),
        },
    };
    let mut text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::numerical(format!("model serialization: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a model document, rejecting unknown versions before a full parse.
pub fn load_model(path: impl AsRef<Path>) -> Result<MlTskModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |e: &serde_json::Error| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    };
    let probe: Probe = serde_json::from_str(&text).map_err(|e| parse_err(&e))?;
    match probe.format.as_deref() {
        Some(MODEL_FORMAT) => {}
        other => {
            return Err(Error::validation(format!(
                "{} is not a model file (format field: {other:?})",
                path.display()
            )))
        }
    }
    let version = probe.version.unwrap_or(0);
    if version != MODEL_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            supported: MODEL_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| parse_err(&e))?;

    let centers = file.antecedents.centers.into_matrix()?;
    let widths = file.antecedents.widths.into_matrix()?;
    let rules = centers.nrows();
    let features = centers.ncols();
    let antecedents = AntecedentParams::new(centers, widths, file.antecedents.h)?;
    let consequents = ConsequentMatrix::new(file.consequents.into_matrix()?, rules, features)?;
    if consequents.num_labels() != file.label_names.len() {
        return Err(Error::validation(format!(
            "model declares {} labels but consequents have {} columns",
            file.label_names.len(),
            consequents.num_labels()
        )));
    }
    let standardizer = Standardizer::new(
        DVector::from_vec(file.standardizer.mean),
        DVector::from_vec(file.standardizer.stddev),
    )?;
    if standardizer.num_features() != features {
        return Err(Error::validation(
            "standardizer dimension does not match antecedents",
        ));
    }
    Ok(MlTskModel {
        antecedents,
        consequents,
        standardizer,
        tau: file.tau,
        label_names: file.label_names,
        config: file.config,
        report: TrainingReport {
            solver: file.training.solver,
            fcm_iterations: file.training.fcm_iterations,
            fcm_objective_trace: file.training.fcm_objective_trace,
            timings: Timings::default(),
        },
    })
}
