//! Experiment configuration: `key = value` files, flag overrides, echo.
//!
//! Precedence, lowest first: per-experiment defaults, the config file,
//! `--set KEY=VALUE`, dedicated flags. A pnlab output file is also accepted as
//! a config file: its `# config:` lines are read and everything else is
//! skipped, so any output can be regenerated from its own header.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use pnlab_core::channel::{ChannelConfig, Constellation, FiniteConstellation};
use pnlab_core::grid::{BasisIndex, TimeGrid};
use pnlab_core::output::fmt_f64;
use pnlab_core::stochastics::{NoiseLevel, PhaseNoiseModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Lemma,
    Psd,
    Mi,
    Equiv,
    Gram,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lemma => "lemma",
            Self::Psd => "psd",
            Self::Mi => "mi",
            Self::Equiv => "equiv",
            Self::Gram => "gram",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    Gaussian,
    Uniform,
    None,
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    Line(usize),
    Flag(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag(flag) => write!(f, "{flag}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Keys in echo order.
pub const KEYS: [&str; 18] = [
    "S",
    "l",
    "T",
    "phase",
    "sigma2",
    "es",
    "snr_db",
    "constellation",
    "constellation_file",
    "seed",
    "trials",
    "ladder",
    "k",
    "n",
    "m",
    "n_max",
    "segments",
    "overlap",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiment: Experiment,
    pub half_width: f64,
    pub level: usize,
    pub symbol_period: f64,
    pub phase: PhaseKind,
    pub sigma2: f64,
    pub es: f64,
    pub snr_db: f64,
    pub constellation: String,
    pub constellation_file: Option<PathBuf>,
    pub seed: u64,
    pub trials: usize,
    pub ladder: Vec<usize>,
    pub k: i64,
    pub n: usize,
    pub m: i64,
    pub n_max: usize,
    pub segments: usize,
    pub overlap: f64,
    origins: BTreeMap<&'static str, Origin>,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str, what: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("{key}: expected {what}, got `{v}`"))
}

fn parse_real(key: &str, v: &str) -> Result<f64, String> {
    let x: f64 = parse_num(key, v, "a number")?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{key}: expected a finite number, got `{v}`"))
    }
}

fn parse_ladder(v: &str) -> Result<Vec<usize>, String> {
    let levels: Vec<usize> = if let Some((lo, hi)) = v.split_once(':') {
        let lo: u32 = parse_num("ladder", lo.trim(), "an exponent")?;
        let hi: u32 = parse_num("ladder", hi.trim(), "an exponent")?;
        if lo > hi || hi >= usize::BITS - 1 {
            return Err(format!("ladder: exponent range `{v}` must satisfy lo <= hi < 63"));
        }
        (lo..=hi).map(|e| 1usize << e).collect()
    } else {
        v.split(',')
            .map(|s| parse_num("ladder", s.trim(), "a list of levels"))
            .collect::<Result<_, _>>()?
    };
    if levels.is_empty() || levels.windows(2).any(|w| w[1] <= w[0]) || levels[0] == 0 {
        return Err(format!("ladder: `{v}` must be positive and strictly increasing"));
    }
    Ok(levels)
}

fn ladder_string(levels: &[usize]) -> String {
    let lo = levels[0].trailing_zeros();
    let contiguous = levels
        .iter()
        .enumerate()
        .all(|(i, &l)| l.is_power_of_two() && l.trailing_zeros() == lo + i as u32);
    if contiguous {
        format!("{}:{}", lo, lo + levels.len() as u32 - 1)
    } else {
        levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl Config {
    pub fn defaults(experiment: Experiment) -> Self {
        let (half_width, level, trials, snr_db) = match experiment {
            Experiment::Lemma => (2.0, 2, 1000, 10.0),
            Experiment::Psd => (512.0, 1 << 14, 4, f64::INFINITY),
            Experiment::Mi => (4.0, 1 << 12, 16_000, 10.0),
            Experiment::Equiv => (2.0, 32, 10_000, 10.0),
            Experiment::Gram => (2.0, 64, 1, 10.0),
        };
        Self {
            experiment,
            half_width,
            level,
            symbol_period: 1.0,
            phase: PhaseKind::Gaussian,
            sigma2: 1.0,
            es: 1.0,
            snr_db,
            constellation: "qpsk".into(),
            constellation_file: None,
            seed: 1,
            trials,
            ladder: (8..=16).map(|e| 1usize << e).collect(),
            k: 0,
            n: 0,
            m: 0,
            n_max: 4,
            segments: 64,
            overlap: 0.5,
            origins: BTreeMap::new(),
        }
    }

    pub fn origin(&self, key: &str) -> Origin {
        self.origins.get(key).cloned().unwrap_or(Origin::Default)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        self.apply(key, value.trim())
            .map_err(|e| ConfigError(format!("{origin}: {e}")))?;
        let key = KEYS.iter().find(|k| **k == key).expect("validated key");
        self.origins.insert(key, origin);
        Ok(())
    }

    fn apply(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "S" => self.half_width = parse_real(key, v)?,
            "l" => self.level = parse_num(key, v, "a positive integer")?,
            "T" => self.symbol_period = parse_real(key, v)?,
            "phase" => {
                self.phase = match v {
                    "gaussian" => PhaseKind::Gaussian,
                    "uniform" => PhaseKind::Uniform,
                    "none" => PhaseKind::None,
                    _ => return Err(format!("phase: expected gaussian, uniform or none, got `{v}`")),
                }
            }
            "sigma2" => {
                let x = parse_real(key, v)?;
                if x < 0.0 {
                    return Err(format!("sigma2: must be >= 0, got {v}"));
                }
                self.sigma2 = x;
            }
            "es" => {
                let x = parse_real(key, v)?;
                if x < 0.0 {
                    return Err(format!("es: must be >= 0, got {v}"));
                }
                self.es = x;
            }
            "snr_db" => {
                let x: f64 = parse_num(key, v, "a number or inf")?;
                if x.is_nan() || x == f64::NEG_INFINITY {
                    return Err(format!("snr_db: expected a number or inf, got `{v}`"));
                }
                self.snr_db = x;
            }
            "constellation" => {
                Constellation::by_name(v).map_err(|e| format!("constellation: {e}"))?;
                self.constellation = v.to_string();
            }
            "constellation_file" => self.constellation_file = (!v.is_empty()).then(|| PathBuf::from(v)),
            "seed" => self.seed = parse_num(key, v, "a non-negative integer")?,
            "trials" => self.trials = parse_num(key, v, "a positive integer")?,
            "ladder" => self.ladder = parse_ladder(v)?,
            "k" => self.k = parse_num(key, v, "an integer")?,
            "n" => self.n = parse_num(key, v, "a non-negative integer")?,
            "m" => self.m = parse_num(key, v, "an integer")?,
            "n_max" => self.n_max = parse_num(key, v, "a non-negative integer")?,
            "segments" => self.segments = parse_num(key, v, "a positive integer")?,
            "overlap" => {
                let x = parse_real(key, v)?;
                if !(0.0..1.0).contains(&x) {
                    return Err(format!("overlap: must be in [0, 1), got {v}"));
                }
                self.overlap = x;
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        if matches!(key, "trials" | "segments" | "l") && v.parse::<usize>() == Ok(0) {
            return Err(format!("{key}: must be >= 1"));
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> String {
        match key {
            "S" => fmt_f64(self.half_width),
            "l" => self.level.to_string(),
            "T" => fmt_f64(self.symbol_period),
            "phase" => match self.phase {
                PhaseKind::Gaussian => "gaussian",
                PhaseKind::Uniform => "uniform",
                PhaseKind::None => "none",
            }
            .into(),
            "sigma2" => fmt_f64(self.sigma2),
            "es" => fmt_f64(self.es),
            "snr_db" => fmt_f64(self.snr_db),
            "constellation" => self.constellation.clone(),
            "constellation_file" => self
                .constellation_file
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            "seed" => self.seed.to_string(),
            "trials" => self.trials.to_string(),
            "ladder" => ladder_string(&self.ladder),
            "k" => self.k.to_string(),
            "n" => self.n.to_string(),
            "m" => self.m.to_string(),
            "n_max" => self.n_max.to_string(),
            "segments" => self.segments.to_string(),
            "overlap" => fmt_f64(self.overlap),
            _ => panic!("unknown key {key}"),
        }
    }

    /// Every effective setting, in [`KEYS`] order.
    pub fn echo(&self) -> Vec<(String, String)> {
        KEYS.iter().map(|k| (k.to_string(), self.get(k))).collect()
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let output_file = text.starts_with("# pnlab ");
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = if output_file {
                match raw.strip_prefix("# config:") {
                    Some(rest) => rest,
                    None => continue,
                }
            } else {
                raw.split('#').next().unwrap_or("")
            };
            if body.trim().is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {line}: expected `key = value`, got `{}`", raw.trim())))?;
            self.set(key.trim(), value, Origin::Line(line))?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid, ConfigError> {
        self.grid_at(self.level)
    }

    /// The grid at another refinement level, with config-aware error text.
    pub fn grid_at(&self, level: usize) -> Result<TimeGrid, ConfigError> {
        TimeGrid::new(self.half_width, level, self.symbol_period).map_err(|e| {
            let involved: &[&str] = match &e {
                pnlab_core::Error::NonIntegral { ratio, .. } if *ratio == "S/T" => &["S", "T"],
                pnlab_core::Error::NonIntegral { .. } => &["T", "S", "l"],
                _ => &["S", "l", "T"],
            };
            let at = involved
                .iter()
                .map(|k| format!("{k} from {}", self.origin(k)))
                .collect::<Vec<_>>()
                .join(", ");
            ConfigError(format!("{e} ({at})"))
        })
    }

    pub fn phase_model(&self) -> Result<PhaseNoiseModel, ConfigError> {
        match self.phase {
            PhaseKind::Gaussian => PhaseNoiseModel::wrapped_gaussian(self.sigma2)
                .map_err(|e| ConfigError(format!("{}: {e}", self.origin("sigma2")))),
            PhaseKind::Uniform => Ok(PhaseNoiseModel::UniformCircle),
            PhaseKind::None => Ok(PhaseNoiseModel::Off),
        }
    }

    pub fn noise(&self) -> Result<NoiseLevel, ConfigError> {
        NoiseLevel::from_snr_db(self.es, self.snr_db)
            .map_err(|e| ConfigError(format!("{}: {e}", self.origin("snr_db"))))
    }

    pub fn channel(&self) -> Result<ChannelConfig, ConfigError> {
        ChannelConfig::new(self.es, self.noise()?, self.phase_model()?, self.grid()?, self.seed)
            .map_err(|e| ConfigError(e.to_string()))
    }

    /// `constellation_file`, when set, takes precedence over the name.
    pub fn constellation(&self) -> Result<Constellation, ConfigError> {
        match &self.constellation_file {
            Some(path) => FiniteConstellation::load(path)
                .map(Constellation::Finite)
                .map_err(|e| ConfigError(format!("constellation_file {}: {e}", path.display()))),
            None => Constellation::by_name(&self.constellation).map_err(|e| ConfigError(e.to_string())),
        }
    }

    pub fn basis_index(&self) -> BasisIndex {
        BasisIndex::new(self.n, self.m)
    }
}

/// Defaults for `experiment`, then the file at `path`.
pub fn load_config(path: &Path, experiment: Experiment) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let mut cfg = Config::defaults(experiment);
    cfg.merge_text(&text)
        .map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip_through_echo() {
        let mut a = Config::defaults(Experiment::Mi);
        a.merge_text("ladder = 256,1024\nsnr_db = inf\nphase = uniform\nconstellation_file = c.txt\n")
            .unwrap();
        let mut b = Config::defaults(Experiment::Lemma);
        b.experiment = Experiment::Mi;
        for (k, v) in a.echo() {
            b.set(&k, &v, Origin::Default).unwrap();
        }
        assert_eq!(a.echo(), b.echo());
        assert_eq!(a.get("ladder"), "256,1024");
        assert_eq!(Config::defaults(Experiment::Lemma).get("ladder"), "8:16");
    }

    #[test]
    fn line_numbered_errors() {
        let mut c = Config::defaults(Experiment::Lemma);
        let e = c.merge_text("# header\n\nsigma2 = 1\nbogus = 3\n").unwrap_err();
        assert_eq!(e.0, "line 4: unknown key `bogus`");
        let e = c.merge_text("trials = many").unwrap_err();
        assert!(e.0.starts_with("line 1: trials: expected"), "{e}");
        let e = c.merge_text("\n\nsigma2").unwrap_err();
        assert!(e.0.starts_with("line 3: expected `key = value`"), "{e}");
        assert!(c.merge_text("overlap = 1").is_err());
        assert!(c.merge_text("trials = 0").is_err());
        assert!(c.merge_text("snr_db = nan").is_err());
        assert!(c.merge_text("ladder = 9:8").is_err());
    }

    #[test]
    fn nonconforming_grid_names_its_lines() {
        let mut c = Config::defaults(Experiment::Gram);
        c.merge_text("T = 1\nS = 1.5\n").unwrap();
        let e = c.grid().unwrap_err();
        assert!(e.0.contains("S/T"), "{e}");
        assert!(e.0.contains("S from line 2") && e.0.contains("T from line 1"), "{e}");
    }

    #[test]
    fn output_header_is_a_config() {
        let text = "# pnlab lemma\n# config: sigma2 = 0.25\n# result: x = 1\nl,mean_re\n256,0.1\n";
        let mut c = Config::defaults(Experiment::Lemma);
        c.merge_text(text).unwrap();
        assert_eq!(c.sigma2, 0.25);
        assert_eq!(c.origin("sigma2"), Origin::Line(2));
    }
}
