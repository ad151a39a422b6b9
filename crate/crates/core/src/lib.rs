pub mod check;
pub mod cli;
pub mod config;
pub mod correlation;
pub mod error;
pub mod lattice;
pub mod numeric;
pub mod measure;
pub mod functional;
pub mod report;
pub mod saddle;
pub mod phase;
pub mod simulate;
