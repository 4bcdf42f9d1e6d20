use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A waveguide or lattice parameter is outside its valid range.
    InvalidParameter { name: &'static str, reason: &'static str },
    /// Zero index contrast: no guided transverse solution exists.
    NoGuidedMode,
    /// The transverse wavenumbers exceed k·n_g, so β would be imaginary.
    ModeCutOff,
    /// A root search failed to find a sign change in its bracket.
    NoBracket { what: &'static str },
    /// An iteration did not reach its tolerance.
    NoConvergence { what: &'static str },
    /// The mode amplitude is zero or not finite.
    Unnormalized,
    /// A target coupling lies outside what the separation window can realize.
    UnreachableCoupling { target: f64, min: f64, max: f64 },
    /// A target detuning lies outside what the fabrication knob can realize.
    UnreachableDetuning { target: f64, min: f64, max: f64 },
    /// A sampled coupling was zero, negative, or not finite.
    NonPositiveCoupling { index: usize, value: f64 },
    /// The matrix is not symmetric within tolerance.
    NonHermitian { row: usize, col: usize },
    /// Dimension mismatch between a matrix and a vector.
    DimensionMismatch { expected: usize, found: usize },
    /// The coupling matrix has no nonzero off-diagonal entry.
    ZeroMatrix,
    /// Output grid step exceeds the allowed maximum.
    GridTooCoarse { step: f64, max: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => write!(f, "invalid `{name}`: {reason}"),
            Error::NoGuidedMode => f.write_str("no guided mode: index contrast is zero"),
            Error::ModeCutOff => f.write_str("mode is cut off: k²n_g² − k_x² − k_y² ≤ 0"),
            Error::NoBracket { what } => write!(f, "{what}: no sign change in bracket"),
            Error::NoConvergence { what } => write!(f, "{what}: did not converge"),
            Error::Unnormalized => f.write_str("mode amplitude is not normalized"),
            Error::UnreachableCoupling { target, min, max } => write!(
                f,
                "coupling {target:e} 1/m is outside the reachable range [{min:e}, {max:e}]"
            ),
            Error::UnreachableDetuning { target, min, max } => write!(
                f,
                "detuning {target:e} 1/m is outside the reachable range [{min:e}, {max:e}]"
            ),
            Error::NonPositiveCoupling { index, value } => {
                write!(f, "coupling sample {index} is not positive and finite ({value:e})")
            }
            Error::NonHermitian { row, col } => {
                write!(f, "matrix is not Hermitian at ({row}, {col})")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ZeroMatrix => f.write_str("coupling matrix has no nonzero off-diagonal entry"),
            Error::GridTooCoarse { step, max } => {
                write!(f, "grid step {step:e} m exceeds the maximum {max:e} m")
            }
        }
    }
}

impl core::error::Error for Error {}
