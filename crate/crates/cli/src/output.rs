use std::fs::File;
use std::io::{self, Write};

use fkg_core::engine::{NAIVE_CAP, PARTITION_CAP, RECURSIVE_CAP};
use fkg_core::series::EXTRACT_CAP;
use fkg_core::verify::{PRNG_ID, SCHEMA};
use serde::Serialize;

use crate::args::{Format, GlobalOpts};
use crate::CliError;

/// Effective configuration of a run. Replaying it reproduces the report.
/// Worker count and output path are not recorded since neither
/// affects the report.
#[derive(Serialize, Debug, Clone, Default)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prop: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_large: Option<bool>,
    pub seed: u64,
    pub budget: u64,
    pub list_limit: usize,
    pub format: &'static str,
    pub caps: Caps,
}

#[derive(Serialize, Debug, Clone)]
pub struct Caps {
    pub naive: usize,
    pub partition: usize,
    pub recursive: usize,
    pub series_extract: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            naive: NAIVE_CAP,
            partition: PARTITION_CAP,
            recursive: RECURSIVE_CAP,
            series_extract: EXTRACT_CAP,
        }
    }
}

impl RunConfig {
    pub fn new(command: &str, subcommand: Option<&str>, g: &GlobalOpts) -> Self {
        RunConfig {
            command: command.to_string(),
            subcommand: subcommand.map(str::to_string),
            seed: g.seed,
            budget: g.budget,
            list_limit: g.list_limit,
            format: match g.format {
                Format::Json => "json",
                Format::Csv => "csv",
            },
            ..RunConfig::default()
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    prng: &'static str,
    config: &'a RunConfig,
    result: &'a T,
}

/// A report ready to be written: the JSON payload plus its flat CSV view.
pub struct Report<T: Serialize> {
    pub config: RunConfig,
    pub result: T,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl<T: Serialize> Report<T> {
    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let env = Envelope {
                    schema: SCHEMA,
                    prng: PRNG_ID,
                    config: &self.config,
                    result: &self.result,
                };
                let mut out =
                    serde_json::to_vec_pretty(&env).map_err(|e| CliError::Io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let csv_err = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&self.header).map_err(csv_err)?;
                for row in &self.rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                w.into_inner().map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }

    pub fn emit(&self, g: &GlobalOpts) -> Result<(), CliError> {
        let bytes = self.render(g.format)?;
        let io_err = |e: io::Error| CliError::Io(e.to_string());
        match &g.output {
            Some(path) => File::create(path)
                .and_then(|mut f| f.write_all(&bytes))
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => io::stdout().lock().write_all(&bytes).map_err(io_err),
        }
    }
}
