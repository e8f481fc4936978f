pub mod cli;
pub mod dramsim;
pub mod eval;
pub mod features;
pub mod geometry;
pub mod kv;
pub mod models;
pub mod pipeline;
pub mod suite;
pub mod trace;

pub use geometry::Geometry;
