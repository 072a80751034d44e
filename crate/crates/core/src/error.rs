use thiserror::Error;

/// Errors produced by the transform library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid is {width}x{height}; at least 3x3 is required")]
    GridTooSmall { width: usize, height: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("negative wave amplitude {0}")]
    NegativeAmplitude(f64),

    #[error("empty input")]
    EmptyInput,

    #[error("template ({tw}x{th}) is larger than the image ({fw}x{fh})")]
    TemplateLargerThanImage { tw: usize, th: usize, fw: usize, fh: usize },

    #[error("sample spacing mismatch: {0} vs {1}")]
    SpacingMismatch(f64, f64),

    #[error("imaginary residue {residue:e} of Fourier correlation exceeds {limit:e}")]
    FourierResidueTooLarge { residue: f64, limit: f64 },

    #[error("bad lattice: {0}")]
    BadLattice(String),

    #[error("bad geometry: {0}")]
    BadGeometry(String),

    #[error("bad group element: {0}")]
    BadGroupElement(String),

    #[error("incompatible filter components: {0}")]
    IncompatibleComponents(String),

    #[error("the Radon filter requires unit scale, got s = {0}")]
    ScaleNotUnity(f64),

    #[error("accumulators are defined on different lattices")]
    LatticeMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability map has no cells")]
    EmptyMap,

    #[error("frequency {k} exceeds the Nyquist limit {limit}")]
    NyquistExceeded { k: f64, limit: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
