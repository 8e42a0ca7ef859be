//! Random probabilities on the simplex: Dirichlet and quasi-Bernoulli laws,
//! the `T_c` transform that characterizes them, the perpetuity chain with a
//! Dirichlet stationary law, and the tests used to check all of it.

pub mod chain;
pub mod combinatorics;
pub mod continuous;
pub mod error;
pub mod io;
pub mod process;
pub mod rng;
pub mod samplers;
pub mod simplex;
pub mod special;
pub mod stats;
pub mod transforms;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use samplers::{QbRoute, QuasiBernoulliSpec};
pub use simplex::{DirichletParams, FaceSubset, SimplexPoint};
