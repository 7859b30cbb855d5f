//! Oracles and checks shared by the module tests and the acceptance run.
#![allow(dead_code)]

pub mod evidential;
pub mod push;
pub mod reward;
