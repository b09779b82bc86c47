use std::path::Path;

use fkg_core::engine::Backend;
use fkg_core::engine::{
    en, EnResult, GridFunctionOracle, IndicatorOracle, RectangleOracle, StaircaseOracle,
};
use fkg_core::lattice::{GridFunction, GridIndicator, RectangleFamily, StaircaseSeq};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::CliError;

/// A validated input file: `{"kind": ..., "functions": ...}`.
#[derive(Debug, Clone)]
pub enum Input {
    Staircases(Vec<StaircaseSeq>),
    Indicators(Vec<GridIndicator>),
    GridFunctions(Vec<GridFunction>),
    Rectangles(RectangleFamily),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    kind: String,
    functions: serde_json::Value,
}

fn typed<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let at = if path == "." {
            "functions".to_string()
        } else {
            format!("functions{}", prefixed(&path))
        };
        CliError::Input(format!("{at}: {}", e.inner()))
    })
}

fn prefixed(path: &str) -> String {
    if path.starts_with('[') {
        path.to_string()
    } else {
        format!(".{path}")
    }
}

impl Input {
    pub fn parse(text: &str) -> Result<Input, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawInput = serde_path_to_error::deserialize(de)
            .map_err(|e| CliError::Input(format!("{}: {}", e.path(), e.inner())))?;
        let input = match raw.kind.as_str() {
            "staircases" => Input::Staircases(typed(raw.functions)?),
            "indicators" => Input::Indicators(typed(raw.functions)?),
            "grid_functions" => Input::GridFunctions(typed(raw.functions)?),
            "rectangles" => Input::Rectangles(typed(raw.functions)?),
            other => {
                return Err(CliError::Input(format!(
                    "kind: unknown input kind {other:?} (expected staircases, indicators, grid_functions or rectangles)"
                )))
            }
        };
        input.check_resolution()?;
        Ok(input)
    }

    pub fn read(path: &Path) -> Result<Input, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Input::parse(&text)
    }

    fn check_resolution(&self) -> Result<(), CliError> {
        let ms: Vec<usize> = match self {
            Input::Staircases(v) => v.iter().map(StaircaseSeq::m).collect(),
            Input::Indicators(v) => v.iter().map(GridIndicator::m).collect(),
            Input::GridFunctions(v) => v.iter().map(GridFunction::m).collect(),
            Input::Rectangles(_) => Vec::new(),
        };
        if let Some(pos) = ms.iter().position(|&m| m != ms[0]) {
            return Err(CliError::Input(format!(
                "functions[{pos}]: mismatched resolution: m = {} vs m = {}",
                ms[pos], ms[0]
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match self {
            Input::Staircases(v) => v.len(),
            Input::Indicators(v) => v.len(),
            Input::GridFunctions(v) => v.len(),
            Input::Rectangles(f) => f.len(),
        }
    }

    /// Keeps the first `n` functions.
    pub fn take(self, n: usize) -> Result<Input, CliError> {
        if n == 0 || n > self.len() {
            return Err(CliError::Input(format!(
                "--n {n} is out of range for an input with {} functions",
                self.len()
            )));
        }
        Ok(match self {
            Input::Staircases(mut v) => {
                v.truncate(n);
                Input::Staircases(v)
            }
            Input::Indicators(mut v) => {
                v.truncate(n);
                Input::Indicators(v)
            }
            Input::GridFunctions(mut v) => {
                v.truncate(n);
                Input::GridFunctions(v)
            }
            Input::Rectangles(f) => {
                Input::Rectangles(RectangleFamily::new(f.k(), f.rects()[..n].to_vec())?)
            }
        })
    }

    pub fn evaluate(&self, backend: Backend) -> Result<EnResult, CliError> {
        Ok(match self {
            Input::Staircases(v) => en(&StaircaseOracle::new(v.clone())?, backend)?,
            Input::Indicators(v) => en(&IndicatorOracle::new(v.clone())?, backend)?,
            Input::GridFunctions(v) => en(&GridFunctionOracle::new(v.clone())?, backend)?,
            Input::Rectangles(f) => en(&RectangleOracle::new(f.clone())?, backend)?,
        })
    }

    /// The functions as grid functions, for the series commands.
    pub fn grid_functions(&self) -> Result<Vec<GridFunction>, CliError> {
        match self {
            Input::Staircases(v) => Ok(v.iter().map(GridFunction::from_staircase).collect()),
            Input::Indicators(v) => v
                .iter()
                .map(|g| GridFunction::from_indicator(g, false).map_err(CliError::from))
                .collect(),
            Input::GridFunctions(v) => Ok(v.clone()),
            Input::Rectangles(_) => Err(CliError::Input(
                "series commands need grid inputs (staircases, indicators or grid_functions)"
                    .into(),
            )),
        }
    }
}
