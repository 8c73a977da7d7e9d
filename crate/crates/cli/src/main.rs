//! `discloc`: optic disc localization, ground-truth review and evaluation.

mod args;
mod evaluate;
mod output;
mod pipeline;
mod synth;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// How a command finished when it did not abort.
pub(crate) enum Status {
    Ok,
    /// Some items failed; they have been listed on stderr.
    ItemFailures,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Localize(a) => pipeline::localize(a),
        Command::Propose(a) => pipeline::propose(a),
        Command::Serve(a) => pipeline::serve(a),
        Command::ExportGt(a) => pipeline::export_gt(a),
        Command::EvalLoc(a) => evaluate::eval_loc(a),
        Command::EvalClf(a) => evaluate::eval_clf(a),
        Command::Split(a) => evaluate::split(a),
        Command::Synth(a) => synth::synth(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::ItemFailures) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
