//! Maximum information leakage under a spoofing-relay active eavesdropper.
//!
//! The eavesdropper E splits its received signal: part is decoded, the rest
//! is amplified and forwarded to the legitimate receiver D as a full-duplex
//! relay. By adding the forwarded copy in or out of phase with the direct
//! path (and amplifying its own noise), E steers the SNR at D and therefore
//! the rate the source adapts to. [`optimizer::solve_attack`] returns the
//! control that maximizes the rate E can still decode.
//!
//! * [`channel`] builds scenarios from gains or a free-space collinear layout.
//! * [`leakage`] holds the rate and SNR formulas and the achievable-SNR envelope.
//! * [`optimizer`] classifies a scenario and solves for the optimal attack.
//! * [`oracle`] provides brute-force and Monte-Carlo references.
//! * [`experiments`] sweeps the eavesdropper position along the S–D line.

// `!(x <= y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod files;
pub mod leakage;
pub mod optimizer;
pub mod oracle;
pub mod roots;
pub mod verify;

pub use channel::{build_collinear_scenario, ComplexGain, GeometryConfig, Scenario};
pub use error::{Error, Result};
pub use leakage::{Envelope, RelayControl};
pub use optimizer::{solve_attack, AttackSolution, StrategyClass};
