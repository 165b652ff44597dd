//! Row-merged pre-transformed polar-like codes.
//!
//! The crate constructs polar-like codes whose information set follows the
//! Reed–Muller rule (rows of the polarization matrix with the highest
//! Hamming weight) and then raises the information length beyond the RM
//! code by encoding extra bits with merged row triples, without lowering
//! the minimum distance. Around that construction it provides:
//!
//! * exact Hamming-weight machinery for sums of polarization-matrix rows
//!   (closed form, XOR oracle, partition lower bound, code spectra),
//! * executable predicates for the admissible-triple conditions, the
//!   canonical triple form and the circular-shift ensemble,
//! * an encoder and successive-cancellation list decoder honoring static
//!   and dynamic frozen bits,
//! * a reproducible AWGN/BPSK frame-error-rate simulator.

pub mod bits;
pub mod checks;
pub mod codec;
pub mod construct;
mod error;
pub mod merge;
pub mod rows;
pub mod sim;
pub mod weight;

pub use error::{Error, Result};
