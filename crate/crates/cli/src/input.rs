//! JSON inputs. All numbers are strings in the qfield grammar; the field
//! discriminant comes from `"d"` when present, otherwise from the literals.

use std::fs;
use std::path::Path;

use leafspace::leafaction::{build_paper_action, standard_beta, ActionSpec};
use leafspace::plhomeo::{Breakpoint, PlMap};
use leafspace::qfield::{infer_discriminant, QNum};
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_D: u64 = 2;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDto {
    x: String,
    y: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDto {
    #[serde(default)]
    d: Option<u64>,
    period: String,
    breakpoints: Vec<PointDto>,
}

impl MapDto {
    fn literals(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.period.as_str())
            .chain(self.breakpoints.iter().flat_map(|p| [p.x.as_str(), p.y.as_str()]))
    }

    fn build(&self, d: u64) -> Result<PlMap, CliError> {
        let period = parse_num(&self.period, d)?;
        let points = self
            .breakpoints
            .iter()
            .map(|p| Ok(Breakpoint::new(parse_num(&p.x, d)?, parse_num(&p.y, d)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(PlMap::new(period, points)?)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDto {
    #[serde(default)]
    d: Option<u64>,
    t: String,
    s: String,
    #[serde(default)]
    beta_l: Option<MapDto>,
    #[serde(default)]
    beta_r: Option<MapDto>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

fn from_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

pub fn parse_num(text: &str, d: u64) -> Result<QNum, CliError> {
    Ok(QNum::parse(text, d)?)
}

/// Discriminant shared by a set of literals, `explicit` taking precedence.
pub fn field_of<'a>(explicit: Option<u64>, texts: impl IntoIterator<Item = &'a str>) -> Result<u64, CliError> {
    match explicit {
        Some(d) => Ok(leafspace::qfield::validate_discriminant(d)?),
        None => Ok(infer_discriminant(texts, DEFAULT_D)?),
    }
}

pub fn load_map(path: &Path) -> Result<PlMap, CliError> {
    let dto: MapDto = from_json(path)?;
    let d = field_of(dto.d, dto.literals())?;
    dto.build(d)
}

pub struct LoadedConfig {
    pub spec: ActionSpec,
    pub d: u64,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, CliError> {
    let dto: ConfigDto = from_json(path)?;
    let mut texts: Vec<&str> = vec![&dto.t, &dto.s];
    for m in [&dto.beta_l, &dto.beta_r].into_iter().flatten() {
        texts.extend(m.literals());
    }
    let d = field_of(dto.d, texts)?;
    let t = parse_num(&dto.t, d)?;
    let s = parse_num(&dto.s, d)?;
    let beta = |m: &Option<MapDto>| -> Result<PlMap, CliError> {
        match m {
            Some(m) => m.build(d),
            None => Ok(standard_beta(d)),
        }
    };
    let spec = build_paper_action(&t, &s, &beta(&dto.beta_l)?, &beta(&dto.beta_r)?)?;
    Ok(LoadedConfig { spec, d })
}
