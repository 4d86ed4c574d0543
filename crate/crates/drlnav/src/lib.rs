pub mod error;
pub mod vehicle;
pub mod world;
pub mod nn;
pub mod env;
pub mod agents;
pub mod harness;
