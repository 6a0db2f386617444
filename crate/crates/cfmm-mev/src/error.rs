use alloc::boxed::Box;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor or operation received an out-of-range argument.
    InvalidParameter(&'static str),
    NonPositiveReserves,
    ReservesDepleted,
    OutputExceedsReserves,
    DomainViolation,
    /// The sandwich defining equation has no root.
    NoSolution,
    /// The root bracket grew without bound.
    BracketExhausted,
    ConvergenceFailure { iterations: usize },
    /// Curvature constants with `kappa >= mu` (or non-finite values).
    InvalidCurvature,
    BetaZero,
    TooManyTrades { n: usize, max: usize },
    CyclicGraph,
    NoPath,
    /// A smoothness coefficient is nonpositive.
    DegenerateConstants,
    /// Every sampled ordering produced identical profits.
    DegenerateDenominator,
    InvalidConstants,
    /// Failure while processing the trade at `index` of a sequence.
    AtTrade { index: usize, cause: Box<Error> },
}

impl Error {
    pub(crate) fn at(index: usize, cause: Error) -> Error {
        Error::AtTrade { index, cause: Box::new(cause) }
    }

    /// The innermost error, looking through [`Error::AtTrade`].
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtTrade { cause, .. } => cause.root_cause(),
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::NonPositiveReserves => f.write_str("reserves must be strictly positive"),
            Error::ReservesDepleted => f.write_str("trade would deplete pool reserves"),
            Error::OutputExceedsReserves => f.write_str("requested output exceeds reserves"),
            Error::DomainViolation => f.write_str("argument outside the exchange function domain"),
            Error::NoSolution => f.write_str("sandwich equation has no solution"),
            Error::BracketExhausted => f.write_str("root bracket overflowed"),
            Error::ConvergenceFailure { iterations } => {
                write!(f, "no convergence after {iterations} iterations")
            }
            Error::InvalidCurvature => f.write_str("curvature constants require 0 < kappa < mu"),
            Error::BetaZero => f.write_str("liquidity constant beta is zero"),
            Error::TooManyTrades { n, max } => write!(f, "{n} trades exceeds limit {max}"),
            Error::CyclicGraph => f.write_str("token graph contains a cycle"),
            Error::NoPath => f.write_str("no path from source to sink"),
            Error::DegenerateConstants => f.write_str("smoothness coefficients are nonpositive"),
            Error::DegenerateDenominator => {
                f.write_str("all orderings yield identical profits; ratio undefined")
            }
            Error::InvalidConstants => f.write_str("sequence bound constants are not finite"),
            Error::AtTrade { index, cause } => write!(f, "trade {index}: {cause}"),
        }
    }
}

impl core::error::Error for Error {}
