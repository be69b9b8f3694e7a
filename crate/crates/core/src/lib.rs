//! Round-based simulator for clustering protocols in three-tier
//! heterogeneous wireless sensor networks.
//!
//! The field is split into three horizontal strips holding normal, advance
//! and super nodes, and each round the base station picks cluster heads per
//! strip from residual-energy averages ([`ceec`]). LEACH, SEP, E-SEP and
//! DEEC are provided as distributed-election baselines ([`baselines`]).
//! [`engine`] drives rounds with first-order radio accounting ([`energy`]),
//! and [`experiment`] batches runs into CSV files and SVG plots.
//!
//! All numeric code is generic over [`Scalar`]; the aliases below fix it to
//! `f64`, which is what the command-line tool uses.

pub mod baselines;
pub mod ceec;
pub mod config;
pub mod energy;
pub mod engine;
pub mod experiment;
pub mod plot;
pub mod scalar;
pub mod topology;

pub use baselines::ProtocolKind;
pub use ceec::{ceec_select, ClusterAssignment, ClusterError};
pub use engine::{run_simulation, stability_period, EngineError, Landmark, Simulation};
pub use scalar::Scalar;
pub use topology::{Region, Role, Tier};

pub type RadioParams = energy::RadioParams<f64>;
pub type NetworkConfig = topology::NetworkConfig<f64>;
pub type NodeState = topology::NodeState<f64>;
pub type RoundMetrics = engine::RoundMetrics<f64>;
pub type SimulationResult = engine::SimulationResult<f64>;

pub type RadioParamsF32 = energy::RadioParams<f32>;
pub type NetworkConfigF32 = topology::NetworkConfig<f32>;
pub type SimulationResultF32 = engine::SimulationResult<f32>;
