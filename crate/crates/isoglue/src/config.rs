//! Run configuration: command-line flags over an optional `key=value` file.
//!
//! Every setting has one key, shared by the flag (`--key`), the file and the
//! report. Flags win over the file; the `ISOGLUE_SEED` environment variable
//! overrides the seed from the file but not from a flag.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use isoglue_core::numerics::parse_rational;
use isoglue_core::{Axis, ExactScalar, GluingParams, GramMatrix, OneParamSubgroup, QuadraticField, TorusPoint};
use num_rational::BigRational;
use num_traits::Signed;

use crate::error::UsageError;

pub const SEED_ENV: &str = "ISOGLUE_SEED";

/// Keys accepted in config files and reports, with their defaults. An empty
/// default means the subcommand picks one.
pub const KEYS: &[(&str, &str)] = &[
    ("alpha", "1"),
    ("allow-invalid-metric", "false"),
    ("axis", "first"),
    ("basepoint", ""),
    ("budget", "10000000"),
    ("convergents", "60"),
    ("d", "2"),
    ("epsilon", "1e-9"),
    ("epsilons", ""),
    ("format", "json"),
    ("gram", "1,0,1"),
    ("grid", "100"),
    ("k-range", "5"),
    ("M", "2"),
    ("mode", ""),
    ("R", "1"),
    ("s", ""),
    ("samples", ""),
    ("seed", "7"),
    ("space", "z"),
    ("strategy", ""),
    ("t", ""),
    ("t-grid", "401"),
    ("target", ""),
    ("targets", ""),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Z,
    X,
}

/// Raw settings from one source.
pub type Settings = BTreeMap<String, String>;

/// Reads a `key=value` file. Blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<Settings, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError::new("config", format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Settings, UsageError> {
    let mut out = Settings::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| UsageError::new("config", format!("line {}: expected key=value", n + 1)))?;
        let k = k.trim();
        if !KEYS.iter().any(|(key, _)| *key == k) {
            return Err(UsageError::new(k, "unknown key".into()));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Merges the sources: flags, then the environment seed, then the file,
/// then defaults.
pub fn merge(flags: &Settings, env_seed: Option<&str>, file: &Settings) -> Settings {
    let mut out: Settings = KEYS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    out.extend(file.iter().map(|(k, v)| (k.clone(), v.clone())));
    if let Some(seed) = env_seed {
        out.insert("seed".into(), seed.to_string());
    }
    out.extend(flags.iter().map(|(k, v)| (k.clone(), v.clone())));
    out
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field: QuadraticField,
    pub alpha: ExactScalar,
    pub gram: GramMatrix,
    pub r: BigRational,
    pub m: BigRational,
    pub strict: bool,
    pub mode: Option<Mode>,
    pub epsilon: f64,
    pub epsilons: Vec<f64>,
    pub seed: u64,
    pub samples: Option<u64>,
    pub format: Format,
    pub grid: usize,
    pub t_grid: usize,
    pub budget: u64,
    pub convergents: usize,
    pub k_range: i64,
    pub space: SpaceKind,
    pub axis: Axis,
    pub strategy: Option<String>,
    pub target: Option<String>,
    pub basepoint: Option<String>,
    pub targets: Option<usize>,
    pub t: Option<ExactScalar>,
    pub s: Option<ExactScalar>,
    /// The merged settings, echoed into reports.
    pub settings: Settings,
}

fn bad(key: &str, msg: impl Into<String>) -> UsageError {
    UsageError::new(key, msg.into())
}

fn get<'a>(s: &'a Settings, key: &str) -> &'a str {
    s.get(key).map(String::as_str).unwrap_or("")
}

fn opt<'a>(s: &'a Settings, key: &str) -> Option<&'a str> {
    Some(get(s, key)).filter(|v| !v.is_empty())
}

fn parse_num<T: std::str::FromStr>(s: &Settings, key: &str) -> Result<T, UsageError> {
    get(s, key).parse().map_err(|_| bad(key, format!("cannot parse `{}`", get(s, key))))
}

fn parse_positive_f64(key: &str, v: &str) -> Result<f64, UsageError> {
    match v.trim().parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(bad(key, format!("`{v}` is not a positive number"))),
    }
}

fn rational(key: &str, v: &str) -> Result<BigRational, UsageError> {
    parse_rational(v).map_err(|e| bad(key, e.to_string()))
}

/// A scalar in the wire grammar, or a plain rational.
pub fn parse_scalar(key: &str, v: &str, field: QuadraticField) -> Result<ExactScalar, UsageError> {
    if v.contains("sqrt") {
        let x: ExactScalar = v.parse().map_err(|e: isoglue_core::Error| bad(key, e.to_string()))?;
        if x.field() != field {
            return Err(bad(key, format!("`{v}` is not in Q(sqrt({}))", field.d())));
        }
        Ok(x)
    } else {
        Ok(field.rational(rational(key, v)?))
    }
}

/// `u1,u2`, each a scalar; `;` also separates, for scalars containing commas.
pub fn parse_point(key: &str, v: &str, field: QuadraticField) -> Result<TorusPoint<ExactScalar>, UsageError> {
    let parts: Vec<&str> = if v.contains(';') { v.split(';').collect() } else { v.split(',').collect() };
    match parts.as_slice() {
        [a, b] => Ok(TorusPoint::new(parse_scalar(key, a.trim(), field)?, parse_scalar(key, b.trim(), field)?)),
        _ => Err(bad(key, format!("`{v}` is not a point `u1,u2`"))),
    }
}

impl RunConfig {
    pub fn from_settings(settings: Settings) -> Result<Self, UsageError> {
        let s = &settings;
        let d: u64 = parse_num(s, "d")?;
        let field = QuadraticField::new(d).map_err(|e| bad("d", e.to_string()))?;

        let alpha_raw = get(s, "alpha");
        let alpha = if alpha_raw.contains("sqrt") {
            parse_scalar("alpha", alpha_raw, field)?
        } else {
            field.surd(rational("alpha", alpha_raw)?)
        };
        if alpha.as_rational().is_some() {
            return Err(bad("alpha", "slope must be irrational"));
        }

        let g: Vec<&str> = get(s, "gram").split(',').map(str::trim).collect();
        let [g11, g12, g22] = g.as_slice() else {
            return Err(bad("gram", "expected g11,g12,g22"));
        };
        let gram = GramMatrix::new(rational("gram", g11)?, rational("gram", g12)?, rational("gram", g22)?)
            .map_err(|e| bad("gram", e.to_string()))?;

        let r = rational("R", get(s, "R"))?;
        if !r.is_positive() {
            return Err(bad("R", "must be positive"));
        }
        let m = rational("M", get(s, "M"))?;
        if !m.is_positive() {
            return Err(bad("M", "must be positive"));
        }
        let strict = match get(s, "allow-invalid-metric") {
            "false" => true,
            "true" => false,
            other => return Err(bad("allow-invalid-metric", format!("`{other}` is not a boolean"))),
        };
        if strict && &r + &r < m {
            return Err(bad("R", "2R < M is not a metric; pass --allow-invalid-metric to explore it"));
        }

        let mode = match get(s, "mode") {
            "" => None,
            "exact" => Some(Mode::Exact),
            "float" => Some(Mode::Float),
            other => return Err(bad("mode", format!("`{other}` is not exact|float"))),
        };
        let epsilon = parse_positive_f64("epsilon", get(s, "epsilon"))?;
        let epsilons = get(s, "epsilons")
            .split(',')
            .filter(|e| !e.trim().is_empty())
            .map(|e| parse_positive_f64("epsilons", e))
            .collect::<Result<Vec<_>, _>>()?;
        let seed = parse_num(s, "seed")?;
        let samples = opt(s, "samples").map(|_| parse_num(s, "samples")).transpose()?;
        let format = match get(s, "format") {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => return Err(bad("format", format!("`{other}` is not json|csv"))),
        };
        let positive = |key: &str| -> Result<u64, UsageError> {
            let v: u64 = parse_num(s, key)?;
            if v == 0 {
                return Err(bad(key, "must be positive"));
            }
            Ok(v)
        };
        let grid = positive("grid")? as usize;
        let t_grid = positive("t-grid")? as usize;
        let budget = positive("budget")?;
        let convergents = positive("convergents")? as usize;
        let k_range: i64 = parse_num(s, "k-range")?;
        if k_range < 0 {
            return Err(bad("k-range", "must be non-negative"));
        }
        let space = match get(s, "space") {
            "z" | "Z" => SpaceKind::Z,
            "x" | "X" => SpaceKind::X,
            other => return Err(bad("space", format!("`{other}` is not z|x"))),
        };
        let axis = match get(s, "axis") {
            "first" => Axis::First,
            "second" => Axis::Second,
            other => return Err(bad("axis", format!("`{other}` is not first|second"))),
        };
        let strategy = opt(s, "strategy").map(str::to_string);
        if let Some(st) = &strategy {
            if st != "grid-torus" && st != "cf-circle" {
                return Err(bad("strategy", format!("`{st}` is not grid-torus|cf-circle")));
            }
        }
        let target = opt(s, "target").map(str::to_string);
        let basepoint = opt(s, "basepoint").map(str::to_string);
        let targets = opt(s, "targets").map(|_| positive("targets")).transpose()?.map(|n| n as usize);
        let t = opt(s, "t").map(|v| parse_scalar("t", v, field)).transpose()?;
        let sv = opt(s, "s").map(|v| parse_scalar("s", v, field)).transpose()?;

        Ok(RunConfig {
            field,
            alpha,
            gram,
            r,
            m,
            strict,
            mode,
            epsilon,
            epsilons,
            seed,
            samples,
            format,
            grid,
            t_grid,
            budget,
            convergents,
            k_range,
            space,
            axis,
            strategy,
            target,
            basepoint,
            targets,
            t,
            s: sv,
            settings,
        })
    }

    pub fn mode_or(&self, default: Mode) -> Mode {
        self.mode.unwrap_or(default)
    }

    pub fn samples_or(&self, default: u64) -> u64 {
        self.samples.unwrap_or(default)
    }

    pub fn subgroup(&self) -> OneParamSubgroup<ExactScalar> {
        OneParamSubgroup::canonical(self.alpha.clone()).expect("alpha validated irrational")
    }

    pub fn params(&self) -> GluingParams<ExactScalar> {
        GluingParams::new(self.field.rational(self.r.clone()), self.field.rational(self.m.clone()), self.strict)
            .expect("R and M validated")
    }

    pub fn point(&self, key: &str, raw: Option<&str>, default: TorusPoint<ExactScalar>) -> Result<TorusPoint<ExactScalar>, UsageError> {
        raw.map_or(Ok(default), |v| parse_point(key, v, self.field))
    }

    /// Settings with the per-command defaults filled in, for the report.
    pub fn effective(&self, filled: &[(&str, String)]) -> Settings {
        let mut out = self.settings.clone();
        for (k, v) in filled {
            if get(&out, k).is_empty() {
                out.insert(k.to_string(), v.clone());
            }
        }
        out.retain(|_, v| !v.is_empty());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let flags: Settings = [("seed".to_string(), "1".to_string())].into();
        let file = parse_config_text("seed = 3\nR=2\n# comment\n").unwrap();
        let m = merge(&flags, Some("2"), &file);
        assert_eq!(m["seed"], "1");
        assert_eq!(m["R"], "2");
        let m = merge(&Settings::new(), Some("2"), &file);
        assert_eq!(m["seed"], "2");
        assert_eq!(merge(&Settings::new(), None, &file)["seed"], "3");
    }

    #[test]
    fn errors_name_the_key() {
        let e = parse_config_text("bogus=1").unwrap_err();
        assert_eq!(e.key, "bogus");
        let mut s = merge(&Settings::new(), None, &Settings::new());
        s.insert("R".into(), "-1".into());
        assert_eq!(RunConfig::from_settings(s.clone()).unwrap_err().key, "R");
        s.insert("R".into(), "0.4".into());
        s.insert("M".into(), "1".into());
        assert_eq!(RunConfig::from_settings(s.clone()).unwrap_err().key, "R");
        s.insert("allow-invalid-metric".into(), "true".into());
        assert!(RunConfig::from_settings(s.clone()).is_ok());
        s.insert("gram".into(), "1,2,1".into());
        assert_eq!(RunConfig::from_settings(s).unwrap_err().key, "gram");
    }

    #[test]
    fn scalars_and_points() {
        let f = QuadraticField::default();
        assert_eq!(parse_scalar("t", "-1 + 1*sqrt(2)", f).unwrap(), f.sqrt_d() - &f.one());
        assert_eq!(parse_scalar("t", "0.25", f).unwrap(), f.ratio(1, 4));
        assert!(parse_scalar("t", "1 + 1*sqrt(3)", f).is_err());
        let p = parse_point("target", "0,1/2", f).unwrap();
        assert_eq!(p, TorusPoint::new(f.zero(), f.ratio(1, 2)));
    }
}
