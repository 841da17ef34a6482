//! Library side of the `bures` command: subcommands, figure data and the
//! acceptance suite, kept out of `main` so they can be tested directly.

pub mod commands;
pub mod figure;
pub mod verify;
