use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use qdilab::adders::{self, Architecture};
use qdilab::metrics;
use qdilab::vectors::{self, Vector};
use qdilab::{AdderSpec, DelayModel, FullAdderFlavor, Netlist, Protocol};

#[derive(Debug, Args)]
pub struct SpecArgs {
    /// Reference legend (Z8, O28, ...) to take the adder from.
    #[arg(long, conflicts_with_all = ["arch", "partition", "lsb_rca_width"])]
    pub legend: Option<String>,
    /// rca, rca-dbfa, hybrid-rca, csla, ccla, bcla, bclarc, hybrid-bclarc-rca
    #[arg(long, default_value = "rca")]
    pub arch: Architecture,
    #[arg(long, default_value_t = 32)]
    pub width: u32,
    #[arg(long, default_value = "rtz")]
    pub protocol: Protocol,
    /// Full adder of the plain RCA: strong, weak or early.
    #[arg(long, default_value = "early")]
    pub flavor: FullAdderFlavor,
    /// CSLA segment widths, LSB first, e.g. 8,8,8,8.
    #[arg(long, value_delimiter = ',')]
    pub partition: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    pub lsb_rca_width: u32,
}

impl SpecArgs {
    pub fn spec(&self) -> Result<AdderSpec> {
        if let Some(l) = &self.legend {
            return match metrics::legend_spec(l) {
                Some(s) => Ok(s),
                None => bail!("legend `{l}` has no implemented adder"),
            };
        }
        let mut s = AdderSpec::new(self.arch, self.width, self.protocol);
        s.fa_flavor = self.flavor;
        s.lsb_rca_width = self.lsb_rca_width;
        if !self.partition.is_empty() {
            s.partition = self.partition.clone();
            if self.arch == Architecture::Csla {
                s.width = self.partition.iter().sum();
            }
        }
        s.validate()?;
        Ok(s)
    }
}

/// A netlist file, or an adder generated from spec flags.
#[derive(Debug, Args)]
pub struct NetlistArgs {
    /// Netlist JSON written by `generate`.
    #[arg(long)]
    pub netlist: Option<PathBuf>,
    #[command(flatten)]
    pub spec: SpecArgs,
}

impl NetlistArgs {
    pub fn load(&self) -> Result<Netlist> {
        match &self.netlist {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Ok(Netlist::from_json(&text).with_context(|| format!("parsing {}", p.display()))?)
            }
            None => Ok(adders::generate(&self.spec.spec()?)?),
        }
    }
}

#[derive(Debug, Args)]
pub struct VectorArgs {
    /// Vector file: `a b cin` per line, operands in hex.
    #[arg(long, conflicts_with = "random")]
    pub vectors: Option<PathBuf>,
    /// Number of uniform random vectors.
    #[arg(long, default_value_t = 2000)]
    pub random: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Gate delay model: unit or per-kind.
    #[arg(long, default_value = "unit", value_parser = parse_delay)]
    pub delay: DelayModel,
}

fn parse_delay(s: &str) -> Result<DelayModel, String> {
    match s {
        "unit" => Ok(DelayModel::Unit),
        "per-kind" => Ok(DelayModel::per_kind_default()),
        _ => Err(format!("unknown delay model `{s}` (expected unit or per-kind)")),
    }
}

/// Port values for one simulation cycle, in netlist input order.
pub type Stimulus = Vec<u64>;

/// True for netlists with the generated adder interface.
pub fn is_adder(nl: &Netlist) -> bool {
    let names: Vec<&str> = nl.inputs().iter().map(|p| p.name.as_str()).collect();
    names == ["a", "b", "cin"] && nl.output("sum").is_some() && nl.output("cout").is_some()
}

pub fn adder_width(nl: &Netlist) -> u32 {
    nl.input("a").map_or(0, |p| p.width() as u32)
}

impl VectorArgs {
    /// Adder vectors from the file or the random source.
    pub fn adder_vectors(&self, width: u32) -> Result<Vec<Vector>> {
        match &self.vectors {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let vs = vectors::parse(&text)?;
                for v in &vs {
                    v.check_width(width)?;
                }
                Ok(vs)
            }
            None => Ok(vectors::random(width, self.random, self.seed)),
        }
    }

    /// Stimuli for any netlist: adder vectors when it has the adder
    /// interface, otherwise every input combination.
    pub fn stimuli(&self, nl: &Netlist) -> Result<Vec<Stimulus>> {
        if is_adder(nl) {
            let vs = self.adder_vectors(adder_width(nl))?;
            return Ok(vs.iter().map(|v| v.port_values().to_vec()).collect());
        }
        let widths: Vec<u32> = nl.inputs().iter().map(|p| p.width() as u32).collect();
        let total: u32 = widths.iter().sum();
        if total > 16 {
            bail!("netlist is not an adder and has {total} input bits; at most 16 can be enumerated");
        }
        Ok((0..1u64 << total)
            .map(|mut x| {
                widths
                    .iter()
                    .map(|&w| {
                        let v = x & vectors::mask(w);
                        x >>= w;
                        v
                    })
                    .collect()
            })
            .collect())
    }
}
