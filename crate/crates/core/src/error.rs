use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },

    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("grid too coarse: {axis} has {count} bins, at least {min} required")]
    GridTooCoarse {
        axis: &'static str,
        count: usize,
        min: usize,
    },

    #[error("record length mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("lattice unstable: {product} = {value:.6} exceeds {limit}")]
    Unstable {
        product: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("dispersion relation has a pole at s = 0")]
    Pole,

    #[error("wavepacket not resolvable: {0}")]
    Unresolvable(String),

    #[error("{0} is outside the supported regime")]
    Regime(&'static str),

    #[error("empty scan range")]
    EmptyRange,

    #[error(transparent)]
    Bessel(#[from] crate::special::BesselError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be strictly positive",
        })
    }
}
