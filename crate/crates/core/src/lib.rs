pub mod cml;
pub mod error;
pub mod experience;
pub mod graph;
pub mod harness;
pub mod hdc;
pub mod hierarchy;
pub mod proxy;
pub mod seed;
