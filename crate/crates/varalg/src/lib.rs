//! Problem files, reports and the command-line front end for
//! [`varalg_core`].

pub mod commands;
pub mod problem_file;
pub mod report;
pub mod verify;
