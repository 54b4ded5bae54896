pub mod cli;
pub mod config;
pub mod dynamics;
pub mod elliptic;
pub mod geometry;
pub mod hanzawa;
pub mod models;
pub mod spectral;
pub mod stepper;
pub mod verify;
