//! Experiment configuration for `bench`, stored as TOML.
//!
//! ```toml
//! protocols = ["rtz", "rto"]
//! formats = ["csv", "json"]
//!
//! [vectors]
//! kind = "random"
//! count = 2000
//! seed = 7
//!
//! [delay]
//! mode = "unit"
//!
//! [[specs]]
//! legend = 8
//! architecture = "rca"
//! width = 32
//! fa_flavor = "early"
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qdilab::adders::Architecture;
use qdilab::metrics;
use qdilab::vectors::{self, Vector};
use qdilab::{AdderSpec, DelayModel, FullAdderFlavor, Protocol};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocols: Vec<Protocol>,
    #[serde(default)]
    pub delay: DelayModel,
    pub vectors: VectorSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    pub specs: Vec<SpecEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorSource {
    /// Uniform operands. The seed is mandatory.
    Random { count: usize, seed: u64 },
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

/// One adder, protocol-free. `legend` is the reference-table row number;
/// the protocol prefix is added per run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legend: Option<u32>,
    pub architecture: Architecture,
    pub width: u32,
    #[serde(default = "default_flavor")]
    pub fa_flavor: FullAdderFlavor,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub partition: Vec<u32>,
    #[serde(default)]
    pub lsb_rca_width: u32,
}

fn default_flavor() -> FullAdderFlavor {
    FullAdderFlavor::Early
}

impl SpecEntry {
    pub fn from_spec(legend: Option<u32>, s: &AdderSpec) -> Self {
        Self {
            legend,
            architecture: s.architecture,
            width: s.width,
            fa_flavor: s.fa_flavor,
            partition: s.partition.clone(),
            lsb_rca_width: s.lsb_rca_width,
        }
    }

    pub fn spec(&self, protocol: Protocol) -> AdderSpec {
        AdderSpec {
            architecture: self.architecture,
            width: self.width,
            protocol,
            fa_flavor: self.fa_flavor,
            partition: self.partition.clone(),
            lsb_rca_width: self.lsb_rca_width,
        }
    }

    pub fn label(&self, protocol: Protocol) -> String {
        match self.legend {
            Some(n) => format!("{}{n}", protocol.legend_prefix()),
            None => self.spec(protocol).summary(),
        }
    }
}

impl ExperimentConfig {
    /// Every mapped reference legend, both protocols, 2000 random vectors.
    pub fn default_bench() -> Self {
        let specs = metrics::legends(Protocol::Rtz)
            .iter()
            .map(|(l, s)| SpecEntry::from_spec(l[1..].parse().ok(), s))
            .collect();
        Self {
            protocols: Protocol::ALL.to_vec(),
            delay: DelayModel::Unit,
            vectors: VectorSource::Random { count: 2000, seed: 7 },
            out_dir: None,
            formats: vec![Format::Csv, Format::Json],
            specs,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.protocols.is_empty() {
            bail!("config lists no protocols");
        }
        if self.specs.is_empty() {
            bail!("config lists no adder specs");
        }
        for e in &self.specs {
            e.spec(Protocol::Rtz).validate()?;
        }
        Ok(())
    }

    /// Vectors for one spec width. File vectors are relative to `base`.
    pub fn vectors_for(&self, width: u32, base: &Path) -> Result<Vec<Vector>> {
        match &self.vectors {
            VectorSource::Random { count, seed } => Ok(metrics::bench_vectors(width, *count, *seed)),
            VectorSource::File { path } => {
                let p = base.join(path);
                let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                let vs = vectors::parse(&text)?;
                for v in &vs {
                    v.check_width(width)?;
                }
                Ok(vs)
            }
        }
    }
}
