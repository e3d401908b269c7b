use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("box coordinates must be finite")]
    NonFinite,
    #[error("box must have positive width and height (got {w} x {h})")]
    EmptyBox { w: f64, h: f64 },
    #[error("confidence {0} outside the accepted range")]
    Confidence(f64),
    #[error("frame data length {len} does not match {width}x{height}")]
    FrameSize {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("image size {width}x{height} must be positive")]
    ImageSize { width: u32, height: u32 },
    #[error("box lies entirely outside the image")]
    OutsideImage,
}

/// A tracker configuration constraint that does not hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{constraint} violated")]
pub struct ConfigError {
    pub constraint: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrelationError {
    #[error("flat patch: intensity variance is zero")]
    FlatPatch,
    #[error("patch dimensions differ: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),
    #[error("search region {search:?} is smaller than template {template:?}")]
    SearchTooSmall {
        template: (usize, usize),
        search: (usize, usize),
    },
    #[error("region is empty after rounding to pixels")]
    EmptyRegion,
    #[error("rgb buffer has {len} bytes, expected {expected}")]
    RgbLength { len: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("frame index {got} does not follow {previous}")]
    NonMonotoneFrame { previous: u64, got: u64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("malformed xml: {0}")]
    Xml(String),
    #[error("missing element <{0}>")]
    Missing(&'static str),
    #[error("invalid value in <{field}>: {value:?}")]
    Value { field: &'static str, value: String },
    #[error("object {index}: xmax <= xmin or ymax <= ymin")]
    InvertedBox { index: usize },
    #[error("object {index}: {source}")]
    Object { index: usize, source: ModelError },
    #[error("text label: {0}")]
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("object {object:?} does not fit in frame {frame:?}")]
    ObjectTooLarge {
        object: (f64, f64),
        frame: (u32, u32),
    },
    #[error("frame {0} is both a dip frame and a dropout frame")]
    DipDropoutOverlap(u64),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// A parse failure in one of the line-oriented interchange formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}
