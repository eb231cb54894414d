pub mod acceptance;
pub mod artifacts;
pub mod basis;
pub mod christoffel;
pub mod commands;
pub mod config;
pub mod cubature;
pub mod cutoff;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod lp;
pub mod needlets;
pub mod orthopoly;
pub mod quadrature;
pub mod sum;

pub use error::{Error, Result};
