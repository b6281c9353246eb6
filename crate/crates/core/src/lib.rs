//! Social-network sensors for epidemic forecasting.
//!
//! The crate simulates SI/SEIR epidemics on weighted contact networks,
//! extracts per-run transmission forests (dendrograms), and selects small
//! "sensor" node sets whose epidemic peak leads the population's peak.
//! Selection strategies cover transmission-tree and dominator-tree depth
//! ranking, friend-of-friend degree nomination, weighted-degree nomination,
//! uniform random baselines, and a demographics-only surrogate pipeline.
//! Curve analytics (logistic fitting, peak lead time, Fano-factor sweeps,
//! window-stability and cubic population prediction) quantify the lead.
//!
//! Ensembles and sweeps run data-parallel via rayon when the `parallel`
//! feature (default) is enabled; disabling it yields a sequential build
//! with bit-identical outputs.

pub mod domtree;
pub mod epicurve;
pub mod epidemic;
pub mod experiments;
pub mod graph;
pub(crate) mod par;
pub mod rng;
pub mod sensors;
pub mod surrogate;
