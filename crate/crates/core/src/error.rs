use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid grid: {0}")]
    InvalidSpec(String),

    #[error("state shape {edges}x{points} does not match the grid")]
    ShapeMismatch { edges: usize, points: usize },

    #[error("vertex continuity defect {defect:.3e} exceeds tolerance {tolerance:.1e}")]
    ContinuityDefect { defect: f64, tolerance: f64 },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("value {value} outside admissible domain {domain}")]
    Domain { value: f64, domain: String },

    #[error("no admissible offset: 2*m1 > m2 (m1 = {m1}, m2 = {m2}); relabel edges so the lightest comes first")]
    NoAdmissibleOffset { m1: f64, m2: f64 },

    #[error("operation requires a {required}-edge graph, got {actual}")]
    EdgeCount { required: usize, actual: usize },

    #[error("comparison sesquisoliton degenerates: edge {edge} carries zero mass, the energy bound is the infimum -M^3/96")]
    ZeroEdgeMass { edge: usize },

    #[error("fixed-point iteration did not converge in {iterations} iterations (last update {last_update:.3e}); reduce dt")]
    StepFailure { iterations: usize, last_update: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<GraphError>,
    },

    #[error("phase aliasing: a sampled phase increment of {0:.3} rad is too close to pi")]
    PhaseAliasing(f64),

    #[error("probe invalid: constraint projection changes the norm by {0:.1}% (> 10%)")]
    ProbeInvalid(f64),

    #[error("truncation too short: soliton peak too close to the far end; smallest admissible m1 is {m1_floor:.6e}")]
    Truncation { m1_floor: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GraphError>;
