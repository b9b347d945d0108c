use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use nilp_arctic::asymptotics::Family;
use nilp_arctic::boundary::shapefile::ShapeFile;
use nilp_arctic::boundary::StartSequence;
use nilp_arctic::onepoint::Kind;
use nilp_arctic::sampler::Start;
use nilp_arctic::Shape64;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag, file or combination; the message names the field.
    Config(String),
    Invariant(String),
    SizeGuard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::SizeGuard(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
            CliError::SizeGuard(m) => write!(f, "refused: {m}"),
        }
    }
}

pub fn field(name: &str, reason: impl fmt::Display) -> CliError {
    CliError::Config(format!("`{name}`: {reason}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Partition,
    Onepoint,
    Arctic,
    Converge,
    Sample,
    Selftest,
}

/// Everything one run needs. The TOML form written by [`RunConfig::to_text`] is canonical:
/// parsing it back gives the same config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
    #[serde(default = "defaults::grid")]
    pub grid: usize,
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub svg: bool,
    #[serde(default)]
    pub triangular: bool,
    #[serde(default = "defaults::kind")]
    pub kind: String,
    #[serde(default = "defaults::family")]
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tangents: Vec<f64>,
    #[serde(default)]
    pub enumerate: bool,
    #[serde(default = "defaults::samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin: Option<u64>,
    #[serde(default = "defaults::chains")]
    pub chains: usize,
    #[serde(default = "defaults::start")]
    pub start: String,
}

mod defaults {
    pub fn grid() -> usize {
        400
    }
    pub fn tol() -> f64 {
        1e-7
    }
    pub fn kind() -> String {
        "H".into()
    }
    pub fn family() -> String {
        "I".into()
    }
    pub fn samples() -> usize {
        100
    }
    pub fn chains() -> usize {
        1
    }
    pub fn start() -> String {
        "minimal".into()
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            shape: None,
            seq: None,
            n: Vec::new(),
            grid: defaults::grid(),
            tol: defaults::tol(),
            seed: 0,
            out: None,
            svg: false,
            triangular: false,
            kind: defaults::kind(),
            family: defaults::family(),
            window: None,
            tangents: Vec::new(),
            enumerate: false,
            samples: defaults::samples(),
            burn_in: None,
            thin: None,
            chains: defaults::chains(),
            start: defaults::start(),
        }
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.shape.is_some() && self.seq.is_some() {
            return Err(field("seq", "give either --seq or --shape, not both"));
        }
        if self.grid < 2 {
            return Err(field("grid", "must be at least 2"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(field("tol", "must be positive"));
        }
        if self.n.contains(&0) {
            return Err(field("n", "sizes must be positive"));
        }
        if self.samples == 0 {
            return Err(field("samples", "must be positive"));
        }
        if self.chains == 0 {
            return Err(field("chains", "must be positive"));
        }
        self.kind()?;
        self.family()?;
        self.start()?;
        if let Some((a, b)) = self.window {
            if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
                return Err(field("window", "needs lo < hi"));
            }
        }
        if (self.svg || self.triangular) && self.out.is_none() {
            return Err(field("out", "--svg needs an output directory"));
        }
        if let Some(dir) = &self.out {
            std::fs::create_dir_all(dir).map_err(|e| field("out", format!("{}: {e}", dir.display())))?;
            let probe = dir.join(".write-test");
            std::fs::write(&probe, b"").map_err(|e| field("out", format!("{} not writable: {e}", dir.display())))?;
            let _ = std::fs::remove_file(probe);
        }
        Ok(())
    }

    pub fn kind(&self) -> Result<Kind, CliError> {
        Kind::from_str(&self.kind).map_err(|e| field("kind", e))
    }

    pub fn family(&self) -> Result<Family, CliError> {
        Family::from_str(&self.family).map_err(|e| field("family", e))
    }

    pub fn start(&self) -> Result<Start, CliError> {
        match self.start.to_ascii_lowercase().as_str() {
            "minimal" | "min" => Ok(Start::Minimal),
            "maximal" | "max" => Ok(Start::Maximal),
            other => Err(field("start", format!("unknown start `{other}` (minimal, maximal)"))),
        }
    }

    pub fn shape(&self) -> Result<Option<Shape64>, CliError> {
        let Some(path) = &self.shape else { return Ok(None) };
        load_shape(path).map(Some)
    }

    pub fn require_shape(&self) -> Result<Shape64, CliError> {
        self.shape()?.ok_or_else(|| field("shape", "this command needs --shape"))
    }

    /// The explicit sequence, or the shape realized at each `--n`.
    pub fn sequences(&self) -> Result<Vec<StartSequence>, CliError> {
        if let Some(a) = &self.seq {
            return StartSequence::new(a.clone()).map(|s| vec![s]).map_err(|e| field("seq", e));
        }
        let shape = self.shape()?.ok_or_else(|| field("seq", "give --seq or --shape with --n"))?;
        if self.n.is_empty() {
            return Err(field("n", "--shape needs --n to build a sequence"));
        }
        self.n.iter().map(|&n| shape.realize(n).map_err(|e| field("n", e))).collect()
    }

    pub fn out_path(&self, name: &str) -> Option<PathBuf> {
        self.out.as_ref().map(|d| d.join(name))
    }
}

pub fn load_shape(path: &Path) -> Result<Shape64, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| field("shape", format!("{}: {e}", path.display())))?;
    ShapeFile::parse(&text).and_then(|f| f.shape()).map_err(|e| field("shape", format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = RunConfig::new(Command::Sample);
        c.seq = Some(vec![0, 2, 4]);
        c.burn_in = Some(1000);
        c.window = Some((2.2, 2.8));
        c.tangents = vec![3.5, -1.0];
        let text = c.to_text();
        let back = RunConfig::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
        assert_eq!(RunConfig::from_text("command = \"arctic\"\n").unwrap(), RunConfig::new(Command::Arctic));
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = RunConfig::new(Command::Onepoint);
        c.kind = "Q".into();
        assert!(matches!(c.validate(), Err(CliError::Config(m)) if m.contains("`kind`")));
        let mut c = RunConfig::new(Command::Arctic);
        c.svg = true;
        assert!(matches!(c.validate(), Err(CliError::Config(m)) if m.contains("`out`")));
        assert!(RunConfig::from_text("command = \"arctic\"\ncolour = 1\n").is_err());
    }
}
