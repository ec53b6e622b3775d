pub mod cli;
pub mod error;
pub mod hypothesis_tests;
pub mod linear_model;
pub mod randomization;
pub mod sim_engine;
pub mod trial;

pub use error::{Error, Result};
pub use trial::TrialData;
