pub mod builtin;
pub mod cli;
pub mod condition;
pub mod error;
pub mod function;
pub mod generate;
pub mod instance;
pub mod polymorphism;
pub mod reduction;
pub mod search;
pub mod selftest;
pub mod solver;
pub mod structure;
mod text;
mod union_find;

pub use error::{Error, Result};
