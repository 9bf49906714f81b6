//! Routing for fixed-wireless-access mesh backhaul networks.
//!
//! Each user reaches the core network through a chain of base stations. The
//! router picks, for every user, a path whose weakest link (lowest SNIR) is
//! as strong as possible, taking into account the interference that the
//! other users' chosen paths create. Users can be split into groups to keep
//! the combinatorial search tractable.
//!
//! Modules, bottom up:
//!
//! * [`linkbudget`]: path loss, antenna pattern, interference and SNIR.
//! * [`topology`]: the network model, random generation and JSON files.
//! * [`pathtree`]: per-user exploration trees and valid paths.
//! * [`model`]: precomputed SNIR evaluation used by the searches.
//! * [`router`]: the grouped tree search and assignment scoring.
//! * [`baselines`]: interference-blind, random and genetic baselines.
//! * [`experiments`]: CoA, the complexity bound and the comparison harness.

pub mod baselines;
pub mod error;
pub mod experiments;
pub mod linkbudget;
pub mod model;
pub mod pathtree;
pub mod router;
pub mod topology;

pub use error::{Error, Result};
pub use linkbudget::{DirectedLink, InterferenceContext, RadioConfig};
pub use model::{CountingModel, LinkModel, RadioModel};
pub use pathtree::{build_tree, valid_paths, Path, PathTree};
pub use router::{
    evaluate_assignment, route, Assignment, Counters, GroupingPlan, RouteOutcome, SearchMode,
    UserTrees,
};
pub use topology::{generate_network, GenParams, MeshNetwork, NodeId};
