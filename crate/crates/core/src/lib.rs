//! Network design with coverage costs.
//!
//! Every edge pays its cost once per distinct packet that crosses it. The
//! crate solves two tractable demand families:
//!
//! * laminar demands (any two demand sets are nested or disjoint), via a
//!   primal-dual algorithm whose output carries a dual certificate proving
//!   cost at most twice optimal ([`laminar`]);
//! * sunflower demands (all pairwise intersections equal one core), via a
//!   linear-size group spanner with logarithmic stretch ([`spanner`],
//!   [`sunflower`]).
//!
//! All cost and dual accounting uses exact rationals. The [`oracle`] module
//! holds exponential exact solvers for checking results on small inputs.

pub mod batch;
pub mod error;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod io;
pub mod laminar;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod spanner;
pub mod sunflower;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, VertexId};
pub use instance::{classify_demands, load_cost, DemandShape, Instance, RoutingSolution};
pub use rational::Rational;
