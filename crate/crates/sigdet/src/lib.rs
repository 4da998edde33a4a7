//! Sequential decentralized binary detection on directed sensor graphs.
//!
//! Each of `N` sensors takes noisy observations of a binary hypothesis over a
//! finite horizon, watches the stop/continue decisions of its graph
//! predecessors, and must eventually stop and declare. Staying blank is
//! itself a signal, which is what makes the problem interesting: the optimal
//! per-sensor rule is not always a threshold in the posterior.
//!
//! The crate provides exact and Monte Carlo evaluation of strategy profiles
//! ([`evaluator`]), belief machinery over private histories ([`belief`]),
//! a best-response dynamic program over belief/message information states
//! with structural verifiers ([`solver`]), and the two-sensor instance where
//! a signaling rule strictly beats every threshold rule ([`model`]).

pub mod belief;
pub mod cli;
pub mod evaluator;
pub mod model;
pub mod solver;
pub mod strategy;
