//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use shadows_core::specfun::Exponent;
use shadows_core::HolderPair;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Constants,
    GammaCheck,
    Converge,
    MeanWidth,
    SmallBallMc,
    Exponent,
    SectionVolume,
    OneDim,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Constants,
        Command::GammaCheck,
        Command::Converge,
        Command::MeanWidth,
        Command::SmallBallMc,
        Command::Exponent,
        Command::SectionVolume,
        Command::OneDim,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::GammaCheck => "gamma-check",
            Command::Converge => "converge",
            Command::MeanWidth => "meanwidth",
            Command::SmallBallMc => "smallball-mc",
            Command::Exponent => "exponent",
            Command::SectionVolume => "section-volume",
            Command::OneDim => "onedim",
        }
    }

    /// Stream id used as the first component of every seed path of this command.
    pub fn stream_id(self) -> u64 {
        Command::ALL.iter().position(|&c| c == self).unwrap() as u64 + 1
    }
}

impl FromStr for Command {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown command `{s}`")))
    }
}

impl std::fmt::Display for Command {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The exponent as written in the file: either the projection index `p` or the
/// zonotope/section index `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExponentSpec {
    P(Exponent),
    Q(f64),
}

impl ExponentSpec {
    /// The `q` that every formula is stated in.
    pub fn q(self) -> f64 {
        match self {
            ExponentSpec::P(Exponent::Infinity) => 1.0,
            ExponentSpec::P(Exponent::Finite(p)) => p / (p - 1.0),
            ExponentSpec::Q(q) => q,
        }
    }

    pub fn pair(self) -> Result<HolderPair, HarnessError> {
        let pair = match self {
            ExponentSpec::P(p) => HolderPair::from_p(p),
            ExponentSpec::Q(q) => HolderPair::from_q(q),
        };
        pair.map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// `p` for display, `inf` for the cube.
    pub fn p_label(self) -> String {
        match self {
            ExponentSpec::P(p) => p.to_string(),
            ExponentSpec::Q(q) if q == 1.0 => "inf".into(),
            ExponentSpec::Q(q) => (q / (q - 1.0)).to_string(),
        }
    }
}

/// Ball radius: `beta` for outer containment, `alpha` for inner containment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Beta(f64),
    Alpha(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n_schedule: Vec<usize>,
    pub k: usize,
    pub exponent: ExponentSpec,
    pub radius: Option<Radius>,
    pub replicates: u64,
    pub grid_resolution: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Directions per mean-width estimate, or grid side for `gamma-check`.
    pub samples: Option<usize>,
    /// Write one CSV row per Monte Carlo replicate.
    pub replicate_csv: bool,
}

const KEYS: [&str; 13] = [
    "command",
    "n_schedule",
    "k",
    "p",
    "q",
    "beta",
    "alpha",
    "replicates",
    "grid_resolution",
    "master_seed",
    "output_dir",
    "samples",
    "replicate_csv",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_p(value: &str) -> Result<Exponent, HarnessError> {
    if matches!(value, "inf" | "infinity" | "∞") {
        return Ok(Exponent::Infinity);
    }
    Ok(Exponent::Finite(parse_value("p", value)?))
}

fn default_grid(k: usize) -> usize {
    match k {
        1 => 2,
        2 => 2048,
        3 => 10_000,
        _ => 4096,
    }
}

impl ExperimentConfig {
    /// Parses the flat format. Blank lines and `#` comments are ignored; keys may
    /// appear once each.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(HarnessError::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            if map.insert(key, value).is_some() {
                return Err(HarnessError::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        let command: Command = map
            .get("command")
            .ok_or_else(|| HarnessError::Config("missing `command`".into()))?
            .parse()?;
        let n_schedule = match map.get("n_schedule") {
            Some(v) if !v.is_empty() => v
                .split(',')
                .map(|s| parse_value::<usize>("n_schedule", s.trim()))
                .collect::<Result<Vec<_>, _>>()?,
            _ => Vec::new(),
        };
        let k = match map.get("k") {
            Some(v) => parse_value("k", v)?,
            None => 2,
        };
        let exponent = match (map.get("p"), map.get("q")) {
            (Some(_), Some(_)) => return Err(HarnessError::Config("give either `p` or `q`, not both".into())),
            (Some(p), None) => ExponentSpec::P(parse_p(p)?),
            (None, Some(q)) => ExponentSpec::Q(parse_value("q", q)?),
            (None, None) => ExponentSpec::P(Exponent::Infinity),
        };
        let radius = match (map.get("beta"), map.get("alpha")) {
            (Some(_), Some(_)) => return Err(HarnessError::Config("give either `beta` or `alpha`, not both".into())),
            (Some(b), None) => Some(Radius::Beta(parse_value("beta", b)?)),
            (None, Some(a)) => Some(Radius::Alpha(parse_value("alpha", a)?)),
            (None, None) => None,
        };
        let cfg = ExperimentConfig {
            command,
            n_schedule,
            k,
            exponent,
            radius,
            replicates: map.get("replicates").map(|v| parse_value("replicates", v)).transpose()?.unwrap_or(1),
            grid_resolution: map
                .get("grid_resolution")
                .map(|v| parse_value("grid_resolution", v))
                .transpose()?
                .unwrap_or_else(|| default_grid(k)),
            master_seed: map.get("master_seed").map(|v| parse_value("master_seed", v)).transpose()?.unwrap_or(0),
            output_dir: map.get("output_dir").map_or_else(|| PathBuf::from("out"), PathBuf::from),
            samples: map.get("samples").map(|v| parse_value("samples", v)).transpose()?,
            replicate_csv: map
                .get("replicate_csv")
                .map(|v| parse_value("replicate_csv", v))
                .transpose()?
                .unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text)
    }

    /// Canonical text form; `parse(to_text())` returns an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command);
        if !self.n_schedule.is_empty() {
            let list: Vec<String> = self.n_schedule.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(s, "n_schedule = {}", list.join(","));
        }
        let _ = writeln!(s, "k = {}", self.k);
        match self.exponent {
            ExponentSpec::P(p) => {
                let _ = writeln!(s, "p = {p}");
            }
            ExponentSpec::Q(q) => {
                let _ = writeln!(s, "q = {q}");
            }
        }
        match self.radius {
            Some(Radius::Beta(b)) => {
                let _ = writeln!(s, "beta = {b}");
            }
            Some(Radius::Alpha(a)) => {
                let _ = writeln!(s, "alpha = {a}");
            }
            None => {}
        }
        let _ = writeln!(s, "replicates = {}", self.replicates);
        let _ = writeln!(s, "grid_resolution = {}", self.grid_resolution);
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        if let Some(m) = self.samples {
            let _ = writeln!(s, "samples = {m}");
        }
        if self.replicate_csv {
            let _ = writeln!(s, "replicate_csv = true");
        }
        s
    }

    /// Flat key/value view used in the JSON summary.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.to_text()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        let q = self.exponent.q();
        let q_ok = if self.command == Command::Constants {
            (1.0..=2.0).contains(&q)
        } else {
            (1.0..2.0).contains(&q)
        };
        if !q_ok {
            return bad("exponent outside the supported range (2 < p <= inf, 1 <= q < 2)");
        }
        if self.replicates == 0 {
            return bad("replicates must be positive");
        }
        if self.grid_resolution < 2 * self.k {
            return bad("grid_resolution must be at least 2k");
        }
        if let Some(Radius::Beta(r) | Radius::Alpha(r)) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return bad("beta/alpha must be positive");
            }
        }
        if self.n_schedule.iter().any(|&n| n < self.k) {
            return bad("every n in n_schedule must be at least k");
        }
        let needs_n = matches!(
            self.command,
            Command::Converge | Command::MeanWidth | Command::SmallBallMc | Command::SectionVolume | Command::OneDim
        );
        if needs_n && self.n_schedule.is_empty() {
            return bad("this command needs n_schedule");
        }
        match self.command {
            Command::SmallBallMc if !matches!(self.radius, Some(Radius::Beta(_))) => bad("smallball-mc needs beta"),
            Command::SectionVolume if self.k != 2 => bad("section-volume needs k = 2"),
            Command::OneDim if self.k != 1 => bad("onedim needs k = 1"),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# small-ball trend\ncommand = smallball-mc\nn_schedule = 10, 20,40\nk = 1\np = inf\nbeta = 0.6\nreplicates = 1000\nmaster_seed = 7\noutput_dir = out/sb\nreplicate_csv = true\n";

    #[test]
    fn parse_and_round_trip() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.command, Command::SmallBallMc);
        assert_eq!(c.n_schedule, vec![10, 20, 40]);
        assert_eq!(c.exponent, ExponentSpec::P(Exponent::Infinity));
        assert_eq!(c.radius, Some(Radius::Beta(0.6)));
        assert_eq!(c.grid_resolution, 2);
        assert!(c.replicate_csv);
        let again = ExperimentConfig::parse(&c.to_text()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_text(), c.to_text());
    }

    #[test]
    fn awkward_floats_round_trip() {
        let text = "command = exponent\nk = 3\nq = 1.2345678901234567\nbeta = 0.1\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
        let text = "command = meanwidth\nn_schedule = 100\np = 4\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "k = 2\n",
            "command = nope\n",
            "command = exponent\nbogus = 1\n",
            "command = exponent\nk = 2\nk = 3\n",
            "command = exponent\np = 1.5\n",
            "command = exponent\np = 4\nq = 1.2\n",
            "command = converge\n",
            "command = smallball-mc\nn_schedule = 10\nk = 1\n",
            "command = section-volume\nn_schedule = 10\nk = 3\n",
            "command = converge\nn_schedule = 1\nk = 2\n",
        ] {
            assert!(ExperimentConfig::parse(bad).is_err(), "{bad}");
        }
    }
}
