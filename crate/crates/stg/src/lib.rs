//! A small Petri net / signal transition graph (STG) kernel.
//!
//! Nets are built with [`StgBuilder`], played with [`Stg::enabled`] and
//! [`Stg::fire`], explored with [`reachability`] and checked with [`verify`].
//! [`build_ta_stg`] generates the interpreted net of a two-action Tsetlin
//! automaton with a four-phase penalty/reward handshake.

mod error;
mod gformat;
mod net;
mod reach;
mod ta;
mod verify;

pub use error::StgError;
pub use gformat::{parse_g, write_g};
pub use net::{
    Edge, Label, Marking, PlaceId, Signal, SignalId, SignalKind, Stg, StgBuilder, Transition,
    TransitionId,
};
pub use reach::{reachability, ReachState, ReachabilityGraph};
pub use ta::{build_ta_stg, build_ta_stg_from, state_signal_name, TaStgLayout};
pub use verify::{verify, CheckResult, VerifyReport};
