//! Production-network modelling and supply-disruption analysis.
//!
//! The crate models multi-country economies with fixed technology recipes
//! and computes the short-, medium-, and long-run impact of supply
//! disruptions, disruption centrality, inter-country power, and
//! complexity-driven fragility. See the README for the file formats and
//! the `prodnet` binary for the command-line front end.

#![forbid(unsafe_code)]

pub mod centrality;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod fragility;
pub mod graph;
pub mod hulten;
pub mod io;
mod linalg;
pub mod medium_run;
pub mod model;
pub mod power;
pub mod propagation;
mod simplex;
pub mod validate;

pub use error::{Error, Result};
pub use model::{
    effective_input_price, gdp, Country, CountryId, DisruptionOutcome, Economy, FlowState, Good,
    GoodId, GoodKind, ShockSpec, TechId, Technology, TransportCosts,
};
