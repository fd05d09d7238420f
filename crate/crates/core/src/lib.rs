pub mod cli;
pub mod error;
pub mod exactnum;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod localring;
pub mod newton;
pub mod lp;
pub mod par;
pub mod poly;
pub mod preparation;
pub mod render;
pub mod selftest;

pub use error::{Error, Result};
