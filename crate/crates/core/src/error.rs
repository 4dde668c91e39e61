use thiserror::Error;

/// Errors raised by the rdlab library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element {element} does not belong to group {group}")]
    KindMismatch { group: String, element: String },

    #[error("operands live in different groups ({left} vs {right})")]
    SpecMismatch { left: String, right: String },

    #[error("element {element} lies outside the length index of radius {radius}")]
    OutsideIndex { element: String, radius: u32 },

    #[error("radius {needed} exceeds the available index radius {available}")]
    IndexTooSmall { needed: u32, available: u32 },

    #[error("no closed-form word length for {group}; a length index is required")]
    IndexRequired { group: String },

    #[error("element budget of {limit} exceeded ({context}; radius reached: {reached})")]
    BudgetExceeded {
        limit: usize,
        reached: u32,
        context: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("group {0} is not amenable")]
    NotAmenable(String),

    #[error("element has negative coefficient {value} at {element}")]
    NegativeCoefficient { element: String, value: f64 },

    #[error("generator images do not define an injective homomorphism: {0}")]
    Homomorphism(String),

    #[error("subgroup index does not cover the requested radius: {0}")]
    Coverage(String),

    #[error("balls of radius r·k do not double in ℓ² norm for r = {r} (min ratio {min_ratio})")]
    DoublingFailed { r: u32, min_ratio: f64 },

    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),

    #[error("ball cache error: {0}")]
    CacheFormat(String),

    #[error("digest mismatch for {path}: expected {expected}, found {found}")]
    DigestMismatch {
        path: String,
        expected: String,
        found: String,
    },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
