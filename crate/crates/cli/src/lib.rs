//! Library side of the `polyeig` command-line tool: problem files, generators,
//! reports, benchmark sweeps and the subcommands themselves.

pub mod bench;
pub mod check;
pub mod commands;
pub mod generate;
pub mod problem_file;
pub mod report;
