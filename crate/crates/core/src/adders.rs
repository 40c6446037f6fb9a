//! Architecture-level adder generators and the RTZ/RTO dual transform.
//!
//! Every generated adder has input ports `a[w]`, `b[w]`, `cin`, output ports
//! `sum[w]` and `cout`, and two completion detectors: `ack_in` over the
//! inputs and `ack_out` over the outputs.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::Protocol;
use crate::logiclib::{self, BitTerms, BlockTerms, FullAdderFlavor, Indication};
use crate::netlist::{NetPair, Netlist};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdderError {
    #[error("invalid adder spec: {0}")]
    SpecInvalid(String),
    #[error("netlist is already RTO")]
    AlreadyRto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Architecture {
    /// Ripple-carry chain of single-bit full adders.
    #[serde(rename = "rca", alias = "rca-sbfa")]
    RcaSbfa,
    /// Ripple-carry chain of dual-bit full adders.
    RcaDbfa,
    /// Two single-bit adders at the LSBs, dual-bit adders above.
    HybridRca,
    /// Carry-select adder.
    Csla,
    /// Conventional carry lookahead with indicating (C-element) lookahead.
    Ccla,
    /// Block carry lookahead.
    Bcla,
    /// Block carry lookahead with redundant carry logic.
    Bclarc,
    /// Early-output RCA on the LSBs feeding a BCLARC.
    #[serde(alias = "hybrid-bclarc")]
    HybridBclarcRca,
}

impl Architecture {
    pub const ALL: [Architecture; 8] = [
        Architecture::RcaSbfa,
        Architecture::RcaDbfa,
        Architecture::HybridRca,
        Architecture::Csla,
        Architecture::Ccla,
        Architecture::Bcla,
        Architecture::Bclarc,
        Architecture::HybridBclarcRca,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::RcaSbfa => "rca",
            Architecture::RcaDbfa => "rca-dbfa",
            Architecture::HybridRca => "hybrid-rca",
            Architecture::Csla => "csla",
            Architecture::Ccla => "ccla",
            Architecture::Bcla => "bcla",
            Architecture::Bclarc => "bclarc",
            Architecture::HybridBclarcRca => "hybrid-bclarc-rca",
        }
    }

    fn is_block(self) -> bool {
        matches!(
            self,
            Architecture::Ccla | Architecture::Bcla | Architecture::Bclarc | Architecture::HybridBclarcRca
        )
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        Architecture::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .or(match s.as_str() {
                "rca-sbfa" => Some(Architecture::RcaSbfa),
                "hybrid-bclarc" => Some(Architecture::HybridBclarcRca),
                _ => None,
            })
            .ok_or_else(|| format!("unknown architecture `{s}`"))
    }
}

/// Everything needed to generate one adder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdderSpec {
    pub architecture: Architecture,
    pub width: u32,
    pub protocol: Protocol,
    /// Full-adder flavor of `RcaSbfa`; ignored elsewhere.
    #[serde(default = "default_flavor")]
    pub fa_flavor: FullAdderFlavor,
    /// Segment widths of `Csla`, LSB segment first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub partition: Vec<u32>,
    /// Width of the LSB ripple-carry section of `HybridBclarcRca`.
    #[serde(default)]
    pub lsb_rca_width: u32,
}

fn default_flavor() -> FullAdderFlavor {
    Indication::Early
}

pub const MAX_WIDTH: u32 = 63;

impl AdderSpec {
    pub fn new(architecture: Architecture, width: u32, protocol: Protocol) -> Self {
        let partition = if architecture == Architecture::Csla {
            uniform_partition(width)
        } else {
            Vec::new()
        };
        Self {
            architecture,
            width,
            protocol,
            fa_flavor: Indication::Early,
            partition,
            lsb_rca_width: 0,
        }
    }

    pub fn rca(width: u32, flavor: FullAdderFlavor, protocol: Protocol) -> Self {
        Self { fa_flavor: flavor, ..Self::new(Architecture::RcaSbfa, width, protocol) }
    }

    pub fn csla(partition: Vec<u32>, protocol: Protocol) -> Self {
        let width = partition.iter().sum();
        Self { partition, ..Self::new(Architecture::Csla, width, protocol) }
    }

    pub fn hybrid_bclarc(width: u32, lsb_rca_width: u32, protocol: Protocol) -> Self {
        Self { lsb_rca_width, ..Self::new(Architecture::HybridBclarcRca, width, protocol) }
    }

    pub fn with_protocol(&self, protocol: Protocol) -> Self {
        Self { protocol, ..self.clone() }
    }

    /// Short human-readable label, e.g. `rca/early/32` or `csla/8-8-8-8`.
    pub fn summary(&self) -> String {
        match self.architecture {
            Architecture::RcaSbfa => format!("rca/{}/{}", self.fa_flavor, self.width),
            Architecture::Csla => format!(
                "csla/{}",
                self.partition.iter().map(u32::to_string).collect::<Vec<_>>().join("-")
            ),
            Architecture::HybridBclarcRca => format!("hybrid-bclarc-rca/{}+{}", self.lsb_rca_width, self.width - self.lsb_rca_width.min(self.width)),
            arch => format!("{}/{}", arch, self.width),
        }
    }

    pub fn validate(&self) -> Result<(), AdderError> {
        let bad = |m: String| Err(AdderError::SpecInvalid(m));
        let w = self.width;
        if w < 2 {
            return bad(format!("width must be at least 2, got {w}"));
        }
        if w > MAX_WIDTH {
            return bad(format!("width must be at most {MAX_WIDTH}, got {w}"));
        }
        if self.architecture.is_block() && !w.is_multiple_of(4) {
            return bad(format!("{} requires width divisible by 4, got {w}", self.architecture));
        }
        match self.architecture {
            Architecture::RcaDbfa | Architecture::HybridRca if !w.is_multiple_of(2) => {
                return bad(format!("{} requires an even width, got {w}", self.architecture));
            }
            Architecture::Csla => {
                if self.partition.is_empty() || self.partition.contains(&0) {
                    return bad("partition must be non-empty with positive segment widths".into());
                }
                let total: u32 = self.partition.iter().sum();
                if total != w {
                    return bad(format!("partition sums to {total}, width is {w}"));
                }
            }
            Architecture::HybridBclarcRca => {
                let l = self.lsb_rca_width;
                if ![0, 4, 8, 12].contains(&l) {
                    return bad(format!("lsb_rca_width must be one of 0, 4, 8, 12, got {l}"));
                }
                if l >= w {
                    return bad(format!("lsb_rca_width {l} must be below width {w}"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Segments of 8 bits where possible, remainder in the LSB segment.
fn uniform_partition(width: u32) -> Vec<u32> {
    let mut parts = Vec::new();
    let mut rest = width;
    if !rest.is_multiple_of(8) {
        parts.push(rest % 8);
        rest -= rest % 8;
    }
    parts.extend(std::iter::repeat_n(8, (rest / 8) as usize));
    parts
}

pub fn generate(spec: &AdderSpec) -> Result<Netlist, AdderError> {
    spec.validate()?;
    let w = spec.width as usize;
    let mut nl = Netlist::new(spec.protocol);
    let a = nl.add_input("a", w);
    let b = nl.add_input("b", w);
    let cin = nl.add_input("cin", 1)[0];
    let (sums, cout) = match spec.architecture {
        Architecture::RcaSbfa => rca(&mut nl, spec.fa_flavor, &a, &b, cin),
        Architecture::RcaDbfa => rca_dbfa(&mut nl, &a, &b, cin, 0),
        Architecture::HybridRca => rca_dbfa(&mut nl, &a, &b, cin, 2),
        Architecture::Csla => csla(&mut nl, &spec.partition, &a, &b, cin),
        Architecture::Ccla => ccla(&mut nl, &a, &b, cin),
        Architecture::Bcla => bcla(&mut nl, &a, &b, cin, false),
        Architecture::Bclarc => bcla(&mut nl, &a, &b, cin, true),
        Architecture::HybridBclarcRca => {
            let l = spec.lsb_rca_width as usize;
            let (mut sums, c) = nl.scoped("lsb", |nl| rca(nl, Indication::Early, &a[..l], &b[..l], cin));
            let (hi, cout) = nl.scoped("msb", |nl| bcla(nl, &a[l..], &b[l..], c, true));
            sums.extend(hi);
            (sums, cout)
        }
    };
    nl.add_output("sum", sums.clone());
    nl.add_output("cout", vec![cout]);
    let ins: Vec<NetPair> = a.iter().chain(&b).copied().chain(std::iter::once(cin)).collect();
    let ack_in = nl.scoped("cd_in", |nl| logiclib::completion_detector(nl, &ins));
    nl.add_ack("ack_in", ack_in);
    let outs: Vec<NetPair> = sums.into_iter().chain(std::iter::once(cout)).collect();
    let ack_out = nl.scoped("cd_out", |nl| logiclib::completion_detector(nl, &outs));
    nl.add_ack("ack_out", ack_out);
    Ok(nl)
}

fn rca(nl: &mut Netlist, flavor: FullAdderFlavor, a: &[NetPair], b: &[NetPair], cin: NetPair) -> (Vec<NetPair>, NetPair) {
    if a.is_empty() {
        return (Vec::new(), cin);
    }
    nl.add_instance("rca", a.len() as u32);
    let mut carry = cin;
    let mut sums = Vec::with_capacity(a.len());
    for i in 0..a.len() {
        let (s, c) = nl.scoped(&format!("fa{i}"), |nl| logiclib::full_adder(nl, flavor, a[i], b[i], carry));
        sums.push(s);
        carry = c;
    }
    (sums, carry)
}

/// Chain of DBFAs above `sbfa_lsbs` early single-bit adders.
fn rca_dbfa(nl: &mut Netlist, a: &[NetPair], b: &[NetPair], cin: NetPair, sbfa_lsbs: usize) -> (Vec<NetPair>, NetPair) {
    let (mut sums, mut carry) = nl.scoped("lsb", |nl| rca(nl, Indication::Early, &a[..sbfa_lsbs], &b[..sbfa_lsbs], cin));
    for (j, i) in (sbfa_lsbs..a.len()).step_by(2).enumerate() {
        let (s, c) = nl.scoped(&format!("dbfa{j}"), |nl| {
            logiclib::dbfa(nl, [a[i], a[i + 1]], [b[i], b[i + 1]], carry)
        });
        sums.extend(s);
        carry = c;
    }
    (sums, carry)
}

/// Carry-select adder. Segment 0 is an early RCA on the real carry-in; each
/// later segment computes both outcomes with carry-ins tied to data 0 and
/// data 1 and selects with a mux bank driven by the incoming carry.
fn csla(nl: &mut Netlist, partition: &[u32], a: &[NetPair], b: &[NetPair], cin: NetPair) -> (Vec<NetPair>, NetPair) {
    let mut lo = 0usize;
    let mut sums = Vec::new();
    let mut carry = cin;
    for (k, &width) in partition.iter().enumerate() {
        let hi = lo + width as usize;
        let (sa, sb) = (&a[lo..hi], &b[lo..hi]);
        if k == 0 {
            let (s, c) = nl.scoped("seg0", |nl| rca(nl, Indication::Early, sa, sb, carry));
            sums.extend(s);
            carry = c;
        } else {
            let (s, c) = nl.scoped(&format!("seg{k}"), |nl| {
                let zero = nl.tie_data(false);
                let one = nl.tie_data(true);
                let (s0, c0) = nl.scoped("cin0", |nl| rca(nl, Indication::Early, sa, sb, zero));
                let (s1, c1) = nl.scoped("cin1", |nl| rca(nl, Indication::Early, sa, sb, one));
                nl.scoped("mux", |nl| {
                    nl.add_instance("mux-bank", width + 1);
                    let s: Vec<NetPair> = s0
                        .iter()
                        .zip(&s1)
                        .enumerate()
                        .map(|(i, (&x, &y))| nl.scoped(&format!("m{i}"), |nl| logiclib::mux2(nl, carry, x, y)))
                        .collect();
                    let c = nl.scoped("mc", |nl| logiclib::mux2(nl, carry, c0, c1));
                    (s, c)
                })
            });
            sums.extend(s);
            carry = c;
        }
        lo = hi;
    }
    (sums, carry)
}

fn ccla(nl: &mut Netlist, a: &[NetPair], b: &[NetPair], cin: NetPair) -> (Vec<NetPair>, NetPair) {
    let mut sums = Vec::with_capacity(a.len());
    let mut carry = cin;
    for k in 0..a.len() / 4 {
        let r = 4 * k..4 * k + 4;
        let (s, c) = nl.scoped(&format!("blk{k}"), |nl| logiclib::ccla_block(nl, &a[r.clone()], &b[r.clone()], carry));
        sums.extend(s);
        carry = c;
    }
    (sums, carry)
}

/// Block carry lookahead over 4-bit blocks. Inter-block carries come from
/// the non-redundant BCLG chain, or, when `redundant`, from the flattened
/// recurrence that skips one block (the first block stays non-redundant).
fn bcla(nl: &mut Netlist, a: &[NetPair], b: &[NetPair], cin: NetPair, redundant: bool) -> (Vec<NetPair>, NetPair) {
    let blocks = a.len() / 4;
    let mut bits: Vec<[BitTerms; 4]> = Vec::with_capacity(blocks);
    let mut terms: Vec<BlockTerms> = Vec::with_capacity(blocks);
    for k in 0..blocks {
        nl.scoped(&format!("blk{k}"), |nl| {
            let t: [BitTerms; 4] = std::array::from_fn(|i| {
                nl.scoped(&format!("t{i}"), |nl| logiclib::bit_terms(nl, a[4 * k + i], b[4 * k + i]))
            });
            terms.push(logiclib::block_terms(nl, &t));
            bits.push(t);
        });
    }
    // carries[k] is the carry into block k.
    let mut carries = vec![cin];
    for k in 0..blocks {
        let c = nl.scoped(&format!("blk{k}"), |nl| {
            if redundant && k > 0 {
                nl.add_instance("bclgrc", 4);
                logiclib::bclg_carry_redundant(nl, terms[k], terms[k - 1], carries[k - 1])
            } else {
                nl.add_instance("bclg", 4);
                logiclib::bclg_carry(nl, terms[k], carries[k])
            }
        });
        carries.push(c);
    }
    let mut sums = Vec::with_capacity(a.len());
    for (k, t) in bits.iter().enumerate() {
        sums.extend(nl.scoped(&format!("blk{k}"), |nl| logiclib::block_sums(nl, t, carries[k])));
    }
    (sums, carries[blocks])
}

/// RTZ to RTO conversion: AND and OR swap at equal arity, NOT and C-elements
/// stay, constant rails are complemented (so tied data values keep their
/// meaning under RTO encoding), and the protocol tag flips.
pub fn dualize(netlist: &Netlist) -> Result<Netlist, AdderError> {
    if netlist.protocol() == Protocol::Rto {
        return Err(AdderError::AlreadyRto);
    }
    Ok(netlist.map_dual())
}

/// The dual in either direction. An involution: `dual(&dual(n)) == n`.
pub fn dual(netlist: &Netlist) -> Netlist {
    netlist.map_dual()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::GateKind;

    #[test]
    fn spec_validation() {
        assert!(AdderSpec::new(Architecture::Bclarc, 30, Protocol::Rtz).validate().is_err());
        assert!(AdderSpec::new(Architecture::Bclarc, 32, Protocol::Rtz).validate().is_ok());
        assert!(AdderSpec::new(Architecture::RcaDbfa, 7, Protocol::Rtz).validate().is_err());
        assert!(AdderSpec::rca(1, Indication::Early, Protocol::Rtz).validate().is_err());
        assert!(AdderSpec::rca(64, Indication::Early, Protocol::Rtz).validate().is_err());
        let mut csla = AdderSpec::csla(vec![8, 8, 8, 8], Protocol::Rtz);
        assert!(csla.validate().is_ok());
        csla.partition = vec![8, 8, 8];
        assert!(matches!(csla.validate(), Err(AdderError::SpecInvalid(m)) if m.contains("partition sums")));
        assert!(AdderSpec::hybrid_bclarc(32, 6, Protocol::Rtz).validate().is_err());
        assert!(AdderSpec::hybrid_bclarc(8, 8, Protocol::Rtz).validate().is_err());
        assert!(AdderSpec::hybrid_bclarc(32, 12, Protocol::Rtz).validate().is_ok());
    }

    #[test]
    fn default_partition_is_uniform() {
        assert_eq!(AdderSpec::new(Architecture::Csla, 32, Protocol::Rtz).partition, vec![8, 8, 8, 8]);
        assert_eq!(uniform_partition(12), vec![4, 8]);
    }

    #[test]
    fn composition_audits() {
        let early = generate(&AdderSpec::rca(32, Indication::Early, Protocol::Rtz)).unwrap();
        assert_eq!(early.instance_count("fa-early"), 32);

        let dbfa = generate(&AdderSpec::new(Architecture::RcaDbfa, 32, Protocol::Rtz)).unwrap();
        assert_eq!(dbfa.instance_count("dbfa"), 16);

        let hybrid = generate(&AdderSpec::new(Architecture::HybridRca, 32, Protocol::Rtz)).unwrap();
        assert_eq!(hybrid.instance_count("dbfa"), 15);
        assert_eq!(hybrid.instance_count("fa-early"), 2);

        let csla = generate(&AdderSpec::csla(vec![8, 8, 8, 8], Protocol::Rtz)).unwrap();
        let rcas: Vec<_> = csla.instances().iter().filter(|i| i.kind == "rca").collect();
        assert_eq!(rcas.len(), 7);
        assert!(rcas.iter().all(|i| i.width == 8));
        assert_eq!(csla.instance_count("mux-bank"), 3);

        let bcla = generate(&AdderSpec::new(Architecture::Bcla, 32, Protocol::Rtz)).unwrap();
        assert_eq!(bcla.instance_count("bclg"), 8);
        let bclarc = generate(&AdderSpec::new(Architecture::Bclarc, 32, Protocol::Rtz)).unwrap();
        assert_eq!(bclarc.instance_count("bclg"), 1);
        assert_eq!(bclarc.instance_count("bclgrc"), 7);
        let hyb = generate(&AdderSpec::hybrid_bclarc(32, 8, Protocol::Rtz)).unwrap();
        assert_eq!(hyb.instance_count("fa-early"), 8);
        assert_eq!(hyb.instance_count("bclgrc") + hyb.instance_count("bclg"), 6);
        let ccla = generate(&AdderSpec::new(Architecture::Ccla, 32, Protocol::Rtz)).unwrap();
        assert_eq!(ccla.instance_count("ccla-block"), 8);
    }

    #[test]
    fn strong_rca_census_is_a_multiple_of_the_dims_census() {
        let fa = logiclib::build_full_adder(Indication::Strong, Protocol::Rtz).stats().unwrap();
        let rca = generate(&AdderSpec::rca(32, Indication::Strong, Protocol::Rtz)).unwrap().stats().unwrap();
        for (kind, count) in &fa.datapath {
            assert_eq!(rca.datapath[kind], 32 * count);
        }
        assert_eq!(rca.datapath.len(), fa.datapath.len());
    }

    #[test]
    fn every_generated_adder_validates() {
        for p in Protocol::ALL {
            for spec in sample_specs(p) {
                let nl = generate(&spec).unwrap();
                let report = nl.validate();
                assert!(report.is_clean(), "{}: {:?}", spec.summary(), report.findings);
            }
        }
    }

    pub(crate) fn sample_specs(p: Protocol) -> Vec<AdderSpec> {
        let mut v: Vec<AdderSpec> = Indication::ALL.iter().map(|&f| AdderSpec::rca(8, f, p)).collect();
        for arch in [
            Architecture::RcaDbfa,
            Architecture::HybridRca,
            Architecture::Ccla,
            Architecture::Bcla,
            Architecture::Bclarc,
        ] {
            v.push(AdderSpec::new(arch, 8, p));
        }
        v.push(AdderSpec::csla(vec![2, 3, 3], p));
        v.push(AdderSpec::hybrid_bclarc(16, 4, p));
        v
    }

    #[test]
    fn generation_is_deterministic() {
        for spec in sample_specs(Protocol::Rtz) {
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        }
    }

    #[test]
    fn dualize_swaps_and_or_and_keeps_c_elements() {
        let cd = logiclib::build_completion_detector(3, Protocol::Rtz);
        let d = dualize(&cd).unwrap();
        assert_eq!(d.protocol(), Protocol::Rto);
        let t = d.stats().unwrap().total();
        assert_eq!(t[&GateKind::And2], 3);
        assert_eq!(t[&GateKind::C3], 1);
        assert_eq!(dualize(&d), Err(AdderError::AlreadyRto));
        assert_eq!(dual(&d), cd);

        let spec = AdderSpec::csla(vec![4, 4], Protocol::Rtz);
        let rtz = generate(&spec).unwrap();
        let rto = generate(&spec.with_protocol(Protocol::Rto)).unwrap();
        assert_eq!(dualize(&rtz).unwrap(), rto);
        let (a, b) = (rtz.stats().unwrap().total(), rto.stats().unwrap().total());
        for kind in GateKind::ALL {
            assert_eq!(a.get(&kind), b.get(&kind.dual()), "{kind}");
        }
    }
}
