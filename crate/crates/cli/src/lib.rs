//! Command-line front end: fixtures, reports and figures.

pub mod fixture;
pub mod report;
pub mod svg;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::Value;

use horosark_core::exactnum::parse_rat;
use horosark_core::mmp::run_hmmp;
use horosark_core::sarkisov::{mori_chain, run_sarkisov};
use horosark_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("the family is not generic: {0}")]
    NotGeneric(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NotGeneric(_) => 3,
            CliError::Output(_) => 4,
            CliError::Core(e) => match e {
                Error::Genericity(_) => 3,
                Error::Internal(_) | Error::NotQFactorial(_) | Error::NotQCartier(_) | Error::NotNef(_) => 4,
                _ => 2,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "horosark", version, about = "Two-parameter families of moment polytopes and their Sarkisov links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a fixture and test genericity.
    Check {
        fixture: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Cells, walls and point strata of the strip.
    Decompose {
        fixture: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Minimal model program with scaling along a vertical line.
    Mmp {
        fixture: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        epsilon: String,
        #[arg(long)]
        json: bool,
    },
    /// Links along the Mori polygonal chain.
    Sarkisov {
        fixture: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Stratum of a parameter point.
    Classify {
        fixture: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long, allow_hyphen_values = true)]
        epsilon: String,
        #[arg(long)]
        json: bool,
    },
    /// Write an SVG figure of the decomposition.
    Plot {
        fixture: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit(out: &mut dyn Write, json: bool, value: Value, text: String) -> Result<(), CliError> {
    let body = if json { serde_json::to_string_pretty(&value).expect("json") + "\n" } else { text };
    out.write_all(body.as_bytes()).map_err(|e| CliError::Output(e.to_string()))
}

fn rat_arg(what: &str, s: &str) -> Result<horosark_core::exactnum::Rat, CliError> {
    parse_rat(s).map_err(|e| CliError::Validation(format!("--{what}: {e}")))
}

/// Builds the SVG for a loaded fixture.
pub fn plot(loaded: &fixture::Loaded) -> Result<String, CliError> {
    let family = &loaded.family;
    let inside = family.empty_set_region().closure.with(&loaded.strip.constraints());
    if inside.shape().dim < 2 {
        return Ok(svg::empty(&loaded.strip));
    }
    let d = family.decompose(&loaded.strip)?;
    let chain = mori_chain(family).ok();
    Ok(svg::render(loaded, &d, chain.as_ref()))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Check { fixture, json } => {
            let loaded = fixture::load_path(&fixture)?;
            let report = loaded.family.check_genericity();
            emit(out, json, report::check_json(&loaded, &report), report::check_text(&loaded, &report))?;
            if !report.is_generic() {
                return Err(CliError::NotGeneric(report.violations.join("; ")));
            }
        }
        Command::Decompose { fixture, json } => {
            let loaded = fixture::load_path(&fixture)?;
            let d = loaded.family.decompose(&loaded.strip)?;
            emit(out, json, report::decomposition_json(&loaded, &d), report::decomposition_text(&loaded, &d))?;
        }
        Command::Mmp { fixture, delta, epsilon, json } => {
            let loaded = fixture::load_path(&fixture)?;
            let run = run_hmmp(&loaded.family, &rat_arg("delta", &delta)?, &rat_arg("epsilon", &epsilon)?)?;
            emit(out, json, report::mmp_json(&loaded, &run), report::mmp_text(&loaded, &run))?;
        }
        Command::Sarkisov { fixture, json } => {
            let loaded = fixture::load_path(&fixture)?;
            let start = loaded.space(&loaded.fixture.start_space)?;
            let end = loaded.space(&loaded.fixture.end_space)?;
            let program = run_sarkisov(&loaded.family, start.as_ref(), end.as_ref())?;
            emit(out, json, report::sarkisov_json(&loaded, &program), report::sarkisov_text(&loaded, &program))?;
        }
        Command::Classify { fixture, delta, epsilon, json } => {
            let loaded = fixture::load_path(&fixture)?;
            let p = fixture::parse_point(&delta, &epsilon)?;
            let class = loaded.family.classify_point(&p);
            emit(out, json, report::classify_json(&loaded, &p, &class), report::classify_text(&loaded, &class))?;
        }
        Command::Plot { fixture, out: path } => {
            let loaded = fixture::load_path(&fixture)?;
            let doc = plot(&loaded)?;
            std::fs::write(&path, doc).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(())
}
