//! Simulation settings: defaults, `key=value` config files and flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use exmex::Express;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::FieldState;

/// Keys accepted in a config file; the same names as the long flags.
pub const CONFIG_KEYS: [&str; 15] = [
    "system",
    "params",
    "system-file",
    "length",
    "n",
    "dt",
    "t-end",
    "soliton",
    "init",
    "init-file",
    "ghost",
    "diag",
    "record-every",
    "out",
    "seed",
];

/// Reads `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::arg(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim();
        if !CONFIG_KEYS.contains(&k) {
            return Err(Error::arg(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::arg(format!("config line {}: duplicate key `{k}`", i + 1)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitSpec {
    Soliton { k: f64, x0: f64 },
    Expr(String),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GhostSpec {
    Derivative,
    Field,
    Zero,
    /// Smooth random Fourier data from `seed`.
    Random,
    Expr(String),
}

impl GhostSpec {
    pub fn parse(text: &str) -> GhostSpec {
        match text.trim() {
            "derivative" => GhostSpec::Derivative,
            "field" => GhostSpec::Field,
            "zero" => GhostSpec::Zero,
            "random" => GhostSpec::Random,
            other => GhostSpec::Expr(other.to_string()),
        }
    }
}

/// Effective settings of one `simulate` run, echoed into the manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub system: String,
    pub params: String,
    pub system_file: Option<PathBuf>,
    pub length: f64,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub init: InitSpec,
    pub ghost: GhostSpec,
    pub diagnostics: Vec<String>,
    pub record_every: usize,
    pub out: PathBuf,
    pub seed: u64,
}

/// Settings as given, before defaults. Flags and config files both land here.
#[derive(Clone, Debug, Default)]
pub struct PartialConfig {
    pub system: Option<String>,
    pub params: Option<String>,
    pub system_file: Option<PathBuf>,
    pub length: Option<f64>,
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub soliton: Option<String>,
    pub init: Option<String>,
    pub init_file: Option<PathBuf>,
    pub ghost: Option<String>,
    pub diag: Option<Vec<String>>,
    pub record_every: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::arg(format!("config value for `{key}` is not a valid number: `{v}`")))
}

pub fn split_list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

impl PartialConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = PartialConfig::default();
        for (k, v) in map {
            match k.as_str() {
                "system" => c.system = Some(v.clone()),
                "params" => c.params = Some(v.clone()),
                "system-file" => c.system_file = Some(v.into()),
                "length" => c.length = Some(num(k, v)?),
                "n" => c.n = Some(num(k, v)?),
                "dt" => c.dt = Some(num(k, v)?),
                "t-end" => c.t_end = Some(num(k, v)?),
                "soliton" => c.soliton = Some(v.clone()),
                "init" => c.init = Some(v.clone()),
                "init-file" => c.init_file = Some(v.into()),
                "ghost" => c.ghost = Some(v.clone()),
                "diag" => c.diag = Some(split_list(v)),
                "record-every" => c.record_every = Some(num(k, v)?),
                "out" => c.out = Some(v.into()),
                "seed" => c.seed = Some(num(k, v)?),
                other => return Err(Error::arg(format!("unknown config key `{other}`"))),
            }
        }
        Ok(c)
    }

    fn init_count(&self) -> usize {
        [self.soliton.is_some(), self.init.is_some(), self.init_file.is_some()].iter().filter(|b| **b).count()
    }

    /// Fields set in `self` win over `base`. The three initial-data settings
    /// are one slot: any of them in `self` replaces all of them in `base`.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        let own_init = self.init_count() > 0;
        PartialConfig {
            system: self.system.or(base.system),
            params: self.params.or(base.params),
            system_file: self.system_file.or(base.system_file),
            length: self.length.or(base.length),
            n: self.n.or(base.n),
            dt: self.dt.or(base.dt),
            t_end: self.t_end.or(base.t_end),
            soliton: if own_init { self.soliton } else { base.soliton },
            init: if own_init { self.init } else { base.init },
            init_file: if own_init { self.init_file } else { base.init_file },
            ghost: self.ghost.or(base.ghost),
            diag: self.diag.or(base.diag),
            record_every: self.record_every.or(base.record_every),
            out: self.out.or(base.out),
            seed: self.seed.or(base.seed),
        }
    }

    /// Fills defaults and validates. `has_soliton` says whether the system
    /// has built-in soliton data, which is then the default initial state.
    pub fn resolve(self, has_soliton: bool) -> Result<RunConfig> {
        if self.init_count() > 1 {
            return Err(Error::arg("give only one of --soliton, --init, --init-file"));
        }
        let length = self.length.unwrap_or(40.0);
        let n = self.n.unwrap_or(512);
        let dt = self.dt.unwrap_or(1e-3);
        let t_end = self.t_end.unwrap_or(1.0);
        for (name, v) in [("length", length), ("dt", dt), ("t-end", t_end)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("{name} must be positive, got {v}")));
            }
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::arg(format!("n must be a power of two >= 4, got {n}")));
        }
        let record_every = self.record_every.unwrap_or(100);
        if record_every == 0 {
            return Err(Error::arg("record-every must be at least 1"));
        }
        let init = if let Some(s) = &self.soliton {
            parse_soliton(s, length)?
        } else if let Some(e) = self.init {
            InitSpec::Expr(e)
        } else if let Some(f) = self.init_file {
            InitSpec::File(f)
        } else if has_soliton {
            InitSpec::Soliton { k: 0.7, x0: 0.5 * length }
        } else {
            return Err(Error::arg("this system has no built-in initial data; pass --init or --init-file"));
        };
        Ok(RunConfig {
            system: self.system.unwrap_or_else(|| "kdv".into()),
            params: self.params.unwrap_or_default(),
            system_file: self.system_file,
            length,
            n,
            dt,
            t_end,
            init,
            ghost: GhostSpec::parse(self.ghost.as_deref().unwrap_or("derivative")),
            diagnostics: self.diag.unwrap_or_default(),
            record_every,
            out: self.out.unwrap_or_else(|| ".".into()),
            seed: self.seed.unwrap_or(0),
        })
    }
}

/// `k=0.7` or `k=0.7,x0=12`; `x0` defaults to `L/2`.
pub fn parse_soliton(text: &str, length: f64) -> Result<InitSpec> {
    let mut k = None;
    let mut x0 = 0.5 * length;
    for part in split_list(text) {
        let (key, v) =
            part.split_once('=').ok_or_else(|| Error::arg(format!("soliton: expected key=value, got `{part}`")))?;
        let v: f64 = num(key, v.trim())?;
        match key.trim() {
            "k" => k = Some(v),
            "x0" => x0 = v,
            other => return Err(Error::arg(format!("soliton: unknown key `{other}`"))),
        }
    }
    let k = k.ok_or_else(|| Error::arg("soliton: missing k"))?;
    Ok(InitSpec::Soliton { k, x0 })
}

/// Evaluates an expression in `x` and `L` on the grid of `state`.
pub fn sample_expression(text: &str, state: &FieldState) -> Result<Vec<f64>> {
    let expr = exmex::parse::<f64>(text).map_err(|e| Error::arg(format!("expression `{text}`: {e}")))?;
    let names: Vec<String> = expr.var_names().to_vec();
    if let Some(bad) = names.iter().find(|v| !matches!(v.as_str(), "x" | "L" | "pi")) {
        return Err(Error::arg(format!("expression `{text}`: unknown variable `{bad}` (use x, L and pi)")));
    }
    let mut out = Vec::with_capacity(state.n);
    for x in state.grid() {
        let vars: Vec<f64> = names
            .iter()
            .map(|v| match v.as_str() {
                "x" => x,
                "L" => state.l,
                _ => std::f64::consts::PI,
            })
            .collect();
        let y = expr.eval(&vars).map_err(|e| Error::arg(format!("expression `{text}`: {e}")))?;
        if !y.is_finite() {
            return Err(Error::arg(format!("expression `{text}` is not finite at x = {x}")));
        }
        out.push(y);
    }
    Ok(out)
}

/// One value per line; comma-separated lines contribute their last column
/// and lines that do not parse (headers) are skipped.
pub fn read_values(path: &Path, n: usize) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let values: Vec<f64> =
        text.lines().filter_map(|l| l.rsplit(',').next().and_then(|v| v.trim().parse().ok())).collect();
    if values.len() != n {
        return Err(Error::arg(format!("{} holds {} values, the grid has {n}", path.display(), values.len())));
    }
    Ok(values)
}

/// Eight random Fourier modes with amplitudes decaying like `2^-m`.
pub fn random_profile(state: &FieldState, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64)> = (0..8).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    state
        .grid()
        .iter()
        .map(|&x| {
            modes
                .iter()
                .enumerate()
                .map(|(m, (a, b))| {
                    let w = 2.0 * std::f64::consts::PI * (m + 1) as f64 * x / state.l;
                    0.5f64.powi(m as i32) * (a * w.cos() + b * w.sin())
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let m = parse_config("# run\nsystem = kdv\n\nn=64 # small\ndiag = H0, H3\n").unwrap();
        assert_eq!(m["system"], "kdv");
        assert_eq!(m["n"], "64");
        let c = PartialConfig::from_map(&m).unwrap();
        assert_eq!(c.diag.unwrap(), vec!["H0", "H3"]);
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("n = 1\nn = 2").is_err());
        assert!(parse_config("just words").is_err());
        assert!(PartialConfig::from_map(&parse_config("n = many").unwrap()).is_err());
    }

    #[test]
    fn precedence_and_defaults() {
        let file = PartialConfig { n: Some(64), dt: Some(0.01), soliton: Some("k=0.5".into()), ..Default::default() };
        let flags = PartialConfig { dt: Some(0.002), init: Some("sin(x)".into()), ..Default::default() };
        let c = flags.over(file).resolve(true).unwrap();
        assert_eq!((c.n, c.dt, c.length), (64, 0.002, 40.0));
        assert_eq!(c.init, InitSpec::Expr("sin(x)".into()));
        assert_eq!(c.ghost, GhostSpec::Derivative);

        let c = PartialConfig::default().resolve(true).unwrap();
        assert_eq!(c.init, InitSpec::Soliton { k: 0.7, x0: 20.0 });
        assert!(PartialConfig::default().resolve(false).is_err());
        assert!(PartialConfig { n: Some(100), ..Default::default() }.resolve(true).is_err());
        assert!(PartialConfig { dt: Some(-1.0), ..Default::default() }.resolve(true).is_err());
        let both = PartialConfig { soliton: Some("k=1".into()), init: Some("x".into()), ..Default::default() };
        assert!(both.resolve(true).is_err());
    }

    #[test]
    fn soliton_spec() {
        assert_eq!(parse_soliton("k=0.7", 40.0).unwrap(), InitSpec::Soliton { k: 0.7, x0: 20.0 });
        assert_eq!(parse_soliton("k=1, x0=3", 40.0).unwrap(), InitSpec::Soliton { k: 1.0, x0: 3.0 });
        assert!(parse_soliton("x0=3", 40.0).is_err());
        assert!(parse_soliton("k=1,z=2", 40.0).is_err());
    }

    #[test]
    fn expressions_on_the_grid() {
        let st = FieldState::new(8.0, 8).unwrap();
        let v = sample_expression("x/L + 1", &st).unwrap();
        assert_eq!(v[4], 1.5);
        assert!(sample_expression("y", &st).is_err());
        let s = sample_expression("sin(2*pi*x/L)", &st).unwrap();
        assert!((s[2] - 1.0).abs() < 1e-15, "{s:?}");
        assert!(sample_expression("1/(x-x)", &st).is_err());
    }

    #[test]
    fn random_profile_is_seeded() {
        let st = FieldState::new(10.0, 32).unwrap();
        assert_eq!(random_profile(&st, 7), random_profile(&st, 7));
        assert_ne!(random_profile(&st, 7), random_profile(&st, 8));
    }

    #[test]
    fn values_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.csv");
        std::fs::write(&p, "x,u\n0,1\n1,2\n2,3\n3,4\n").unwrap();
        assert_eq!(read_values(&p, 4).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert!(read_values(&p, 8).is_err());
    }
}
