//! Command-line front end for `kfield-core`: an expression parser for
//! polynomials over finite fields, report formats, and command dispatch.

pub mod cli;
pub mod parse;
pub mod report;
