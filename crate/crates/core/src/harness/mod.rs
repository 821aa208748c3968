pub mod commands;
pub mod config;
pub mod experiment;
pub mod io;
pub mod plot;
pub mod suite;
