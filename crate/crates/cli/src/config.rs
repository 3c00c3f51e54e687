//! Run configuration shared by the command-line flags and the JSON config
//! file. Every key of the file is a flag of the same name with `_` in place
//! of `-`; a flag given on the command line overrides the file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use cmc_index::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum Ambient {
    #[value(name = "R3", alias = "r3")]
    R3,
    #[value(name = "T3", alias = "t3")]
    T3,
    #[value(name = "S3", alias = "s3")]
    S3,
}

impl Ambient {
    pub fn tag(self) -> &'static str {
        match self {
            Ambient::R3 => "R3",
            Ambient::T3 => "T3",
            Ambient::S3 => "S3",
        }
    }
}

fn parse_sign(s: &str) -> std::result::Result<i8, String> {
    match s.trim() {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        other => Err(format!("expected +1 or -1, got `{other}`")),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand; filled from the command line, checked against the file.
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    /// Mesh file (`.json`, `.off` or `.obj`).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    /// Zoo generator used as the surface when no mesh is given.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    /// Ambient space of a mesh file without one.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<Ambient>,
    /// Sign of the invariant shape operator in S3.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_sign)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_sign: Option<i8>,

    /// Sphere or cylinder radius.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Icosphere subdivision level, at most 7.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    /// Radius of the flat torus in S3, in (0, 1).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Geodesic radius of the sphere in S3, in (0, pi/2).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nv: Option<usize>,
    /// Cylinder length.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// Amplitude of the perturbed sphere.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Use the outward normal on the round sphere.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outward: Option<bool>,
    /// T3 lattice basis, nine numbers row by row.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Vec<f64>>,
    /// Offset of the flat torus in T3, three numbers.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,

    /// Negative-eigenvalue tolerance.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_neg: Option<f64>,
    /// Number of lowest full-space eigenvalues to compute.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_spectrum: Option<usize>,
    /// Largest system sent to the dense eigensolver.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense_limit: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Grid size of the verification suite.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Add the non-CMC control surface to the verification suite.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<bool>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Worker threads; 1 gives bitwise reproducible output.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),* $(,)?) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::BadParameter(format!("config {}: {e}", path.display())))
    }

    /// Field-wise overlay: values set in `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        let top = self;
        overlay!(base, top;
            command, mesh, generator, ambient, alpha_sign, radius, level, r, rho, nu, nv, length,
            amplitude, outward, lattice, offset, eps_neg, full_spectrum, dense_limit, seed,
            resolution, control, out, format, threads,
        )
    }

    /// Sets the subcommand, rejecting a file that names a different one.
    pub fn with_command(mut self, command: &str) -> Result<Self> {
        match &self.command {
            Some(c) if c != command => {
                return Err(Error::BadParameter(format!("config is for `{c}`, not `{command}`")));
            }
            _ => self.command = Some(command.into()),
        }
        Ok(self)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(l) = self.level {
            if l > 7 {
                return Err(Error::BadParameter(format!("level {l} exceeds 7")));
            }
        }
        if let Some(l) = &self.lattice {
            if l.len() != 9 {
                return Err(Error::BadParameter(format!("lattice needs 9 numbers, got {}", l.len())));
            }
        }
        if let Some(o) = &self.offset {
            if o.len() != 3 {
                return Err(Error::BadParameter(format!("offset needs 3 numbers, got {}", o.len())));
            }
        }
        if let Some(e) = self.eps_neg {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::BadParameter(format!("eps_neg {e} must be finite and non-negative")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::BadParameter("threads must be at least 1".into()));
        }
        if self.mesh.is_some() && self.generator.is_some() {
            return Err(Error::BadParameter("give either a mesh or a generator, not both".into()));
        }
        Ok(())
    }
}
