//! Social-network-aware user association for small-cell networks with
//! device-to-device relaying.

pub mod clustering;
pub mod error;
pub mod geometry;
pub mod matching;
pub mod network;
pub mod sim;
pub mod social;
pub mod wireless;

pub use error::{Error, Result};
