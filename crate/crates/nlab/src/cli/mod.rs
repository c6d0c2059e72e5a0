//! Command-line front end: stream files, report files, command
//! orchestration, and the built-in verification recipes.

mod commands;
pub mod recipes;
mod report;
mod stream_file;

pub use commands::{
    cmd_analyze, cmd_gen, cmd_select, AnalyzeOptions, AnalyzeOutput, Defaults, SelectOutput,
};
pub use report::ReportDoc;
pub use stream_file::{
    read_stream, read_stream_from_path, write_stream, write_stream_to_path, StreamFile,
    StreamHeaderExtra,
};
