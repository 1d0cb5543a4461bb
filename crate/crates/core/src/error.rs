use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate {kind} identifier `{id}`")]
    DuplicateIdentifier { kind: &'static str, id: String },

    #[error("incidence pair ({object}, {feature}) out of range for {objects}x{features} context")]
    IncidenceOutOfRange {
        object: usize,
        feature: usize,
        objects: usize,
        features: usize,
    },

    #[error("empty {0} list")]
    EmptyIdentifiers(&'static str),

    #[error("empty table")]
    EmptyTable,

    #[error("ragged row {row}: expected {expected} cells, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("missing value for attribute `{attribute}` of object `{object}`")]
    MissingValue { object: String, attribute: String },

    #[error("unknown value `{value}` for attribute `{attribute}`")]
    UnknownValue { attribute: String, value: String },

    #[error("invalid scaling for `{attribute}`: {reason}")]
    InvalidScaling { attribute: String, reason: String },

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("concept count exceeded the cap of {cap} (enumerated {found} so far)")]
    ConceptCapExceeded { cap: usize, found: usize },

    #[error("lattice of agenda {agenda:?} exceeded the concept cap of {cap} (enumerated {found} so far)")]
    AgendaCapExceeded {
        agenda: Vec<String>,
        cap: usize,
        found: usize,
    },

    #[error("no mass: every weight is non-positive")]
    NoMass,

    #[error("negative weight {0} not allowed without clipping")]
    NegativeWeight(f64),

    #[error("total conflict between mass functions")]
    TotalConflict,

    #[error("mass assigned to the empty set")]
    MassOnEmptySet,

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("degenerate plausibility: every singleton has zero plausibility")]
    DegeneratePlausibility,

    #[error("weight sum {sum} is below the denominator guard {delta}")]
    DenominatorGuard { sum: f64, delta: f64 },

    #[error("empty basis")]
    EmptyBasis,

    #[error("no surviving agenda after the first adaptive round")]
    NoSurvivingAgenda,

    #[error("no labeled objects")]
    NoLabels,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model format: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
