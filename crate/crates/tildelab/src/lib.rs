//! Standard-library companion to `tildelab-core`: state files, verification
//! reports, threaded ledger and search, and the `tildelab` command line.

pub mod commands;
pub mod io;
pub mod parallel;
pub mod report;
pub mod selftest;

pub use io::{FileError, OperatorFile, StateFile};
pub use report::{Check, Format, RunReport};
