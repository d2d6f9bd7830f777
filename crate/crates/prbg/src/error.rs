use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrbgError {
    #[error("ring oscillator is powered down")]
    Unpowered,
    #[error("request while the previous handshake is still open")]
    Overlap,
    #[error("release without an open request")]
    NoRequest,
    #[error("tap {0} does not exist")]
    NoSuchTap(usize),
    #[error("duty cycle {0} is outside (0, 1)")]
    InvalidDuty(f64),
    #[error("period must be positive and finite, got {0}")]
    InvalidPeriod(f64),
    #[error("at least one tap is required")]
    NoTaps,
    #[error("LFSR state must be nonzero")]
    ZeroState,
    #[error("no bits to analyse")]
    Empty,
}
