//! Purification planning and entanglement routing on quantum repeater
//! networks.
//!
//! Links carry Werner pairs at an integer entanglement generation rate (EGR)
//! per timestep. [`chainopt`] chooses where along a repeater chain to run one
//! round of purification and how selective it should be; [`routing`] picks
//! the chain (or several edge-disjoint chains) through a [`netgraph`]
//! lattice; [`harness`] runs declarative parameter sweeps over both and
//! writes plot-ready tables.

pub mod chainopt;
pub mod error;
pub mod harness;
pub mod netgraph;
pub mod par;
pub mod purification;
pub mod quantmath;
pub mod routing;

pub use error::{Error, Result};
pub use par::Exec;
