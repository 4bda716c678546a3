//! Quantum tomography toolkit: protocol design and completeness auditing,
//! measurement simulation, maximum-likelihood reconstruction over purified
//! states, and the statistics to score the result — chi-square adequacy,
//! the loss-of-fidelity distribution and adjusted fidelity for incomplete
//! protocols.
//!
//! The narrative guide lives in `book/`; its code blocks compile as doctests
//! of this crate, so the two cannot drift apart.

pub mod error;
pub mod io;
pub mod linalg;
pub mod processes;
pub mod protocols;
pub mod reconstruction;
pub mod simulator;
pub mod statistics;
pub mod states;
pub mod tol;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Result, TomoError};
pub use linalg::CMatrix;

// Keep the book's code in lockstep with the library: every fenced Rust block
// in the guide runs under `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states-and-processes.md")]
    mod states_and_processes {}
    #[doc = include_str!("../../../book/src/fidelity.md")]
    mod fidelity {}
    #[doc = include_str!("../../../book/src/protocols.md")]
    mod protocols {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/loss-and-adequacy.md")]
    mod loss_and_adequacy {}
    #[doc = include_str!("../../../book/src/adjusted-fidelity.md")]
    mod adjusted_fidelity {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
