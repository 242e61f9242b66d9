//! Command-line front end: the object-expression parser, the command
//! dispatcher and the machine-readable report documents. The binary in
//! `main.rs` is a thin wrapper.

pub mod machine;
pub mod parse;
pub mod run;
