//! The end-to-end multi-label TSK fuzzy system: antecedent learning,
//! fuzzification, correlation, and the consequent solver composed into
//! train / predict, with versioned persistence.

mod io;

use nalgebra::DMatrix;

use crate::antecedent::{estimate_antecedents, fcm_cluster, AntecedentParams};
use crate::correlation::build_r;
use crate::dataset::{apply_standardizer, fit_standardizer, Dataset, Standardizer};
use crate::error::{Error, Result};
use crate::fuzzify::fuzzy_map;
use crate::solver::{fit, SolverState, TrainConfig};

pub use io::{load_model, save_model, MODEL_FORMAT, MODEL_VERSION};

/// Consequent parameter matrix, `K(D+1) x L`. Rows follow the design-matrix
/// block layout (rule-major, bias row first); column l holds the
/// discriminative-feature weights for label l.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsequentMatrix {
    p: DMatrix<f64>,
    rules: usize,
    features: usize,
}

impl ConsequentMatrix {
    pub fn new(p: DMatrix<f64>, rules: usize, features: usize) -> Result<Self> {
        if p.nrows() != rules * (features + 1) {
            return Err(Error::validation(format!(
                "consequent matrix has {} rows, expected {} for {rules} rules over {features} features",
                p.nrows(),
                rules * (features + 1)
            )));
        }
        if p.ncols() == 0 {
            return Err(Error::validation("consequent matrix has no label columns"));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("consequent matrix has non-finite entries"));
        }
        Ok(ConsequentMatrix { p, rules, features })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn num_labels(&self) -> usize {
        self.p.ncols()
    }
}

/// Wall-clock timings of a training run; informational only, never persisted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timings {
    pub clustering_secs: f64,
    pub mapping_secs: f64,
    pub solving_secs: f64,
    pub total_secs: f64,
}

/// Deterministic record of how training went.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub solver: SolverState,
    pub fcm_iterations: usize,
    pub fcm_objective_trace: Vec<f64>,
    pub timings: Timings,
}

/// A trained multi-label TSK fuzzy system.
#[derive(Debug, Clone, PartialEq)]
pub struct MlTskModel {
    antecedents: AntecedentParams,
    consequents: ConsequentMatrix,
    standardizer: Standardizer,
    tau: f64,
    label_names: Vec<String>,
    config: TrainConfig,
    report: TrainingReport,
}

impl MlTskModel {
    pub fn num_rules(&self) -> usize {
        self.antecedents.num_rules()
    }

    pub fn num_features(&self) -> usize {
        self.antecedents.num_features()
    }

    pub fn num_labels(&self) -> usize {
        self.consequents.num_labels()
    }

    pub fn antecedents(&self) -> &AntecedentParams {
        &self.antecedents
    }

    pub fn consequents(&self) -> &ConsequentMatrix {
        &self.consequents
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn report(&self) -> &TrainingReport {
        &self.report
    }

    /// Raw scores `P^T x_g` for raw (unstandardized) instances, `L x N'`.
    pub fn predict_scores(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.nrows() != self.num_features() {
            return Err(Error::validation(format!(
                "model expects {} features, input has {}",
                self.num_features(),
                x.nrows()
            )));
        }
        let z = self.standardizer.transform(x)?;
        let g = fuzzy_map(&z, &self.antecedents)?;
        Ok(self.consequents.matrix().transpose() * g.matrix())
    }

    /// Thresholded predictions using the model's own tau.
    pub fn predict(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(predict_labels(&self.predict_scores(x)?, self.tau))
    }
}

/// Trains a model: standardize, cluster, map through the rules, build the
/// label-correlation penalty, and solve for the consequents.
pub fn train(data: &Dataset, config: &TrainConfig) -> Result<MlTskModel> {
    config.validate()?;
    let n = data.num_instances();
    if n < config.rules.max(2) {
        return Err(Error::validation(format!(
            "{n} instances cannot support training with {} rules",
            config.rules
        )));
    }
    let total_start = std::time::Instant::now();

    let standardizer = fit_standardizer(data);
    let standardized = apply_standardizer(&standardizer, data)?;

    let fcm_start = std::time::Instant::now();
    let fcm = fcm_cluster(
        standardized.features(),
        config.rules,
        config.fuzzifier,
        config.fcm_tol,
        config.fcm_max_iter,
        config.seed,
    )?;
    let antecedents = estimate_antecedents(standardized.features(), &fcm.memberships, config.h)?;
    let clustering_secs = fcm_start.elapsed().as_secs_f64();

    let map_start = std::time::Instant::now();
    let design = fuzzy_map(standardized.features(), &antecedents)?;
    let mapping_secs = map_start.elapsed().as_secs_f64();

    let correlation = build_r(data.labels())?;

    let solve_start = std::time::Instant::now();
    let (p, solver_state) = fit(design.matrix(), data.labels(), correlation.penalty(), config)?;
    let solving_secs = solve_start.elapsed().as_secs_f64();

    let consequents = ConsequentMatrix::new(p, config.rules, data.num_features())?;
    let report = TrainingReport {
        solver: solver_state,
        fcm_iterations: fcm.iterations,
        fcm_objective_trace: fcm.objective_trace,
        timings: Timings {
            clustering_secs,
            mapping_secs,
            solving_secs,
            total_secs: total_start.elapsed().as_secs_f64(),
        },
    };
    Ok(MlTskModel {
        antecedents,
        consequents,
        standardizer,
        tau: config.tau,
        label_names: data.label_names().to_vec(),
        config: config.clone(),
        report,
    })
}

/// Thresholds scores into binary labels: 1 where the score strictly exceeds
/// tau, else 0.
pub fn predict_labels(scores: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    assert!(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1), got {tau}");
    scores.map(|s| if s > tau { 1.0 } else { 0.0 })
}
