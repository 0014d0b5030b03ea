//! Circuits, resource accounting and amplitude-amplification simulation for
//! quantum key-recovery attacks on SIMON.

pub mod circuit;
pub mod circuits;
pub mod cost;
pub mod decompose;
pub mod diff;
pub mod error;
pub mod par;
pub mod qaa;
pub mod report;
pub mod schedule;
pub mod sim;
pub mod simon;
pub mod toy;
pub mod verify;

pub use error::{Error, Result};
