//! Low-level token plagiarism detection for JVM programs.
//!
//! Class files (or JSON fixtures) are turned into generalized instruction
//! tokens per method. Abstract methods are filled from their implementers,
//! invocations are inlined, and methods paired by signature are tiled with
//! greedy string tiling. A lexical baseline over source text is included for
//! comparison.

pub mod bytecode;
pub mod classfile;
pub mod descriptor;
mod error;
pub mod extract;
pub mod fixture;
pub mod linearize;
pub mod program;
pub mod report;
pub mod rkgst;
pub mod run;
pub mod similarity;
pub mod slt;
pub mod token;

pub use error::Error;
pub use program::{MethodKey, ProgramModel};
pub use similarity::{ComparisonReport, Mode};
pub use token::{Mnemonic, Token, TokenSequence};
