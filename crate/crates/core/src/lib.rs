//! Adaptive hybrid NOMA-TDMA scheduling for a single-LED visible light downlink.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`] turns room, LED and photodiode geometry into line-of-sight
//!   channel gains and SNRs.
//! * [`rate`] holds the two-user rate model: FTPA power split, NOMA and TDMA
//!   pair sum-rates and the gap function whose sign decides between them.
//! * [`region`] finds the interval of squared gain ratios on which NOMA wins,
//!   with a successive convex approximation solver and a bisection oracle.
//! * [`scheduler`] pairs users (adaptive, forced and pure TDMA plans) and
//!   evaluates the resulting frame sum-rate.
//! * [`experiment`] drives the region map, user-count sweep and LED power
//!   sweep and writes CSV.

pub mod channel;
pub mod error;
pub mod experiment;
pub mod rate;
pub mod region;
pub mod scheduler;

pub use error::{Error, Result};
