//! Flat `key = value` sweep configuration. Blank lines and `#` comments are
//! ignored; later keys override earlier ones.
//!
//! ```text
//! param = l
//! exponents = 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2
//! n = 1000
//! families = gnp-expander, grid
//! replicas = 10
//! seed = 7
//! ```

use super::{length_grid, ExperimentError, LengthSetting, SweepSpec, SweptParam};
use crate::graph::{Family, RoutingMode};
use crate::sim::Capacity;
use crate::walk::LambdaRule;

pub fn parse_config(text: &str) -> Result<SweepSpec, ExperimentError> {
    let mut param = None;
    let mut values: Option<Vec<f64>> = None;
    let mut exponents: Option<Vec<f64>> = None;
    let mut spec = SweepSpec::new(SweptParam::Length, Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| ExperimentError::Config { line: i + 1, reason };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let num = |v: &str| -> Result<f64, ExperimentError> {
            v.parse::<f64>().map_err(|_| err(format!("{key}: not a number: {v:?}")))
        };
        let list = |v: &str| -> Result<Vec<f64>, ExperimentError> {
            v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(num).collect()
        };
        match key {
            "param" => param = Some(value.parse::<SweptParam>().map_err(|e| err(e.to_string()))?),
            "values" => values = Some(list(value)?),
            "exponents" => exponents = Some(list(value)?),
            "n" => spec.n = parse_int(value).map_err(err)?,
            "l" | "length" => {
                spec.length = if value == "n" {
                    LengthSetting::EqualsN
                } else {
                    LengthSetting::Fixed(parse_int(value).map_err(err)?)
                }
            }
            "eta" => spec.eta = num(value)?,
            "lambda" => {
                spec.lambda = value.parse::<LambdaRule>().map_err(|e| err(e.to_string()))?
            }
            "families" => {
                spec.families = value
                    .split(',')
                    .map(|f| f.parse::<Family>().map_err(|e| err(e.to_string())))
                    .collect::<Result<_, _>>()?
            }
            "replicas" => spec.replicas = parse_int(value).map_err(err)?,
            "seed" => spec.seed = parse_int(value).map_err(err)?,
            "capacity" => {
                spec.capacity = value.parse::<Capacity>().map_err(|e| err(e.to_string()))?
            }
            "routing" => {
                spec.routing = value.parse::<RoutingMode>().map_err(|e| err(e.to_string()))?
            }
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    spec.param =
        param.ok_or(ExperimentError::Config { line: 0, reason: "missing param".into() })?;
    spec.values = match (values, exponents) {
        (Some(v), None) => v,
        (None, Some(e)) if spec.param == SweptParam::Length => length_grid(spec.n, &e),
        (None, Some(_)) => {
            return Err(ExperimentError::Config {
                line: 0,
                reason: "exponents only apply to an l sweep".into(),
            })
        }
        (Some(_), Some(_)) => {
            return Err(ExperimentError::Config {
                line: 0,
                reason: "give either values or exponents, not both".into(),
            })
        }
        (None, None) => Vec::new(),
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_int<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.replace('_', "").parse::<T>().map_err(|_| format!("not an integer: {v:?}"))
}
