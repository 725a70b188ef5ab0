//! Text formats for scenarios, geometries and sweep configurations.
//!
//! Two spellings are accepted for the same flat set of numeric fields:
//!
//! ```text
//! # key = value, one per line; `:` also works as separator
//! h_sd_re = 1.0
//! h_sd_im = 0
//! ```
//!
//! or a JSON object `{"h_sd_re": 1.0, "h_sd_im": 0, ...}`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;

use crate::channel::{GeometryConfig, Scenario};
use crate::error::{Error, Result};
use crate::experiments::SweepConfig;

const SCENARIO_FIELDS: [&str; 9] = [
    "h_sd_re", "h_sd_im", "h_se_re", "h_se_im", "h_ed_re", "h_ed_im", "p_s", "p_e", "sigma2",
];
const GEOMETRY_FIELDS: [&str; 6] = [
    "d_sd",
    "d_se",
    "carrier_hz",
    "snr_d_db",
    "pe_over_ps",
    "min_distance_m",
];
const SWEEP_FIELDS: [&str; 3] = ["d_se_start", "d_se_stop", "d_se_step"];

/// Parsed `key -> (value, line)` pairs of one file.
#[derive(Debug, Clone, Default)]
pub struct Fields {
    path: String,
    values: BTreeMap<String, (f64, usize)>,
}

impl Fields {
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text, path)
        } else {
            Self::parse_key_value(text, path)
        }
    }

    fn parse_key_value(text: &str, path: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse {
                path: path.to_string(),
                line,
                msg,
            };
            let (key, value) = content
                .split_once('=')
                .or_else(|| content.split_once(':'))
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let value = value.trim();
            let number: f64 = value
                .parse()
                .map_err(|_| err(format!("field `{key}`: `{value}` is not a number")))?;
            if values.insert(key.to_string(), (number, line)).is_some() {
                return Err(err(format!("field `{key}` given twice")));
            }
        }
        Ok(Fields {
            path: path.to_string(),
            values,
        })
    }

    fn parse_json(text: &str, path: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_string(),
            line: e.line(),
            msg: e.to_string(),
        })?;
        let serde_json::Value::Object(map) = value else {
            return Err(Error::Parse {
                path: path.to_string(),
                line: 1,
                msg: "expected a JSON object".into(),
            });
        };
        let mut values = BTreeMap::new();
        for (key, v) in map {
            let number = v.as_f64().ok_or_else(|| Error::Field {
                path: path.to_string(),
                field: key.clone(),
                msg: format!("`{v}` is not a number"),
            })?;
            values.insert(key, (number, 0));
        }
        Ok(Fields {
            path: path.to_string(),
            values,
        })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn field_error(&self, field: &str, msg: impl Into<String>) -> Error {
        match self.values.get(field) {
            Some(&(_, line)) if line > 0 => Error::Parse {
                path: self.path.clone(),
                line,
                msg: format!("field `{field}`: {}", msg.into()),
            },
            _ => Error::Field {
                path: self.path.clone(),
                field: field.to_string(),
                msg: msg.into(),
            },
        }
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.values
            .get(key)
            .map(|&(v, _)| v)
            .ok_or_else(|| self.field_error(key, "missing"))
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.values.get(key).map_or(default, |&(v, _)| v)
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(self.field_error(key, "unknown field"));
            }
        }
        Ok(())
    }

    pub fn to_scenario(&self) -> Result<Scenario> {
        self.reject_unknown(&SCENARIO_FIELDS)?;
        let c = |re: &str, im: &str| -> Result<Complex64> {
            Ok(Complex64::new(self.get(re)?, self.get(im)?))
        };
        let h_sd = c("h_sd_re", "h_sd_im")?;
        let h_se = c("h_se_re", "h_se_im")?;
        let h_ed = c("h_ed_re", "h_ed_im")?;
        let (p_s, p_e, sigma2) = (self.get("p_s")?, self.get("p_e")?, self.get("sigma2")?);
        Scenario::new(h_sd, h_se, h_ed, p_s, p_e, sigma2).map_err(|e| Error::Field {
            path: self.path.clone(),
            field: "scenario".into(),
            msg: e.to_string(),
        })
    }

    fn geometry_with(&self, d_se: f64) -> Result<GeometryConfig> {
        let cfg = GeometryConfig {
            d_sd: self.get("d_sd")?,
            d_se,
            carrier_hz: self.get("carrier_hz")?,
            snr_d_db: self.get("snr_d_db")?,
            pe_over_ps: self.get("pe_over_ps")?,
            min_distance_m: self.get_or("min_distance_m", 1.0),
        };
        cfg.validate().map_err(|e| Error::Field {
            path: self.path.clone(),
            field: "geometry".into(),
            msg: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn to_geometry(&self) -> Result<GeometryConfig> {
        self.reject_unknown(&GEOMETRY_FIELDS)?;
        self.geometry_with(self.get("d_se")?)
    }

    pub fn to_sweep(&self) -> Result<SweepConfig> {
        let allowed: Vec<&str> = GEOMETRY_FIELDS
            .iter()
            .chain(&SWEEP_FIELDS)
            .copied()
            .collect();
        self.reject_unknown(&allowed)?;
        let start = self.get("d_se_start")?;
        let cfg = SweepConfig {
            geometry: self.geometry_with(self.get_or("d_se", start))?,
            d_se_start: start,
            d_se_stop: self.get("d_se_stop")?,
            d_se_step: self.get("d_se_step")?,
        };
        cfg.validate().map_err(|e| Error::Field {
            path: self.path.clone(),
            field: "sweep".into(),
            msg: e.to_string(),
        })?;
        Ok(cfg)
    }
}

/// Contents of a file given to `solve`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioInput {
    Direct(Scenario),
    Geometry(GeometryConfig),
}

impl ScenarioInput {
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let fields = Fields::parse(text, path)?;
        if fields.contains("d_sd") || fields.contains("d_se") {
            Ok(ScenarioInput::Geometry(fields.to_geometry()?))
        } else {
            Ok(ScenarioInput::Direct(fields.to_scenario()?))
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        match self {
            ScenarioInput::Direct(s) => Ok(*s),
            ScenarioInput::Geometry(g) => crate::channel::build_collinear_scenario(g),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_scenario_file(path: &Path) -> Result<ScenarioInput> {
    ScenarioInput::parse(&read(path)?, &path.display().to_string())
}

pub fn read_sweep_file(path: &Path) -> Result<SweepConfig> {
    Fields::parse(&read(path)?, &path.display().to_string())?.to_sweep()
}

/// Scenario as a one-line JSON object in the file format, for reproduction.
pub fn scenario_to_json(s: &Scenario) -> String {
    let mut map = serde_json::Map::new();
    let vals = [
        s.h_sd().re,
        s.h_sd().im,
        s.h_se().re,
        s.h_se().im,
        s.h_ed().re,
        s.h_ed().im,
        s.p_s(),
        s.p_e(),
        s.sigma2(),
    ];
    for (k, v) in SCENARIO_FIELDS.iter().zip(vals) {
        map.insert(k.to_string(), serde_json::json!(v));
    }
    serde_json::Value::Object(map).to_string()
}
