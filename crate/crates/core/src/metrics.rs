//! Latency, area and power figures, normalization, and ordinal comparison
//! against the bundled reference table of published 32-bit adders.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adders::{self, AdderError, AdderSpec, Architecture};
use crate::encoding::Protocol;
use crate::logiclib::Indication;
use crate::netlist::{GateKind, Netlist, NetlistError};
use crate::sim::{self, DelayModel, HandshakeTrace, SimError};
use crate::vectors::{self, Vector};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no traces to average")]
    EmptyTraceSet,
    #[error("normalize needs a non-empty list of positive values")]
    EmptyOrNonPositive,
    #[error("unknown legend `{0}`")]
    UnknownLegend(String),
    #[error("reference table line {line}: {msg}")]
    Reference { line: usize, msg: String },
    #[error(transparent)]
    Adder(#[from] AdderError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Per-kind area weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AreaWeights(pub BTreeMap<GateKind, u64>);

impl Default for AreaWeights {
    fn default() -> Self {
        AreaWeights(
            GateKind::ALL
                .into_iter()
                .map(|k| {
                    let w = match k {
                        GateKind::Not => 1,
                        GateKind::And2 | GateKind::Or2 => 2,
                        GateKind::And3 | GateKind::Or3 => 3,
                        GateKind::And4 | GateKind::Or4 | GateKind::C2 => 4,
                        GateKind::C3 => 6,
                    };
                    (k, w)
                })
                .collect(),
        )
    }
}

impl AreaWeights {
    pub fn weight(&self, kind: GateKind) -> u64 {
        self.0.get(&kind).copied().unwrap_or(0)
    }
}

/// Weighted gate count, completion detectors included.
pub fn area_proxy(nl: &Netlist, weights: &AreaWeights) -> Result<u64, NetlistError> {
    let census = nl.stats()?;
    Ok(census.total().iter().map(|(&k, &n)| weights.weight(k) * n as u64).sum())
}

/// Mean number of transitions per full cycle.
pub fn power_proxy(traces: &[HandshakeTrace]) -> Result<f64, MetricsError> {
    if traces.is_empty() {
        return Err(MetricsError::EmptyTraceSet);
    }
    let total: usize = traces.iter().map(|t| t.transitions.len()).sum();
    Ok(total as f64 / traces.len() as f64)
}

pub fn pctp(power: f64, ct: f64) -> f64 {
    power * ct
}

/// Divides every value by the maximum.
pub fn normalize(values: &[f64]) -> Result<Vec<f64>, MetricsError> {
    if values.is_empty() || values.iter().any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(MetricsError::EmptyOrNonPositive);
    }
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    Ok(values.iter().map(|&v| v / max).collect())
}

/// Measured counterpart of one reference-table row. Latencies are in gate
/// delay units; `fl`, `rl`, `ct` are worst case over the vector set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub legend: String,
    pub architecture: String,
    pub protocol: Protocol,
    pub fl: u64,
    pub rl: u64,
    pub ct: u64,
    pub fl_mean: f64,
    pub rl_mean: f64,
    pub ct_mean: f64,
    pub area: u64,
    pub power: f64,
    pub pctp: f64,
    pub vectors: usize,
}

/// Random vectors followed by the directed corner cases.
pub fn bench_vectors(width: u32, count: usize, seed: u64) -> Vec<Vector> {
    let mut v = vectors::random(width, count, seed);
    v.extend(vectors::directed(width));
    v
}

pub fn measure(
    spec: &AdderSpec,
    legend: &str,
    vectors: &[Vector],
    delay: &DelayModel,
    weights: &AreaWeights,
) -> Result<MetricsRow, MetricsError> {
    let nl = adders::generate(spec)?;
    measure_netlist(&nl, &spec.summary(), legend, vectors, delay, weights)
}

pub fn measure_netlist(
    nl: &Netlist,
    architecture: &str,
    legend: &str,
    vectors: &[Vector],
    delay: &DelayModel,
    weights: &AreaWeights,
) -> Result<MetricsRow, MetricsError> {
    if vectors.is_empty() {
        return Err(MetricsError::EmptyTraceSet);
    }
    let stats = sim::run_sequence_streaming(nl, vectors, delay, |_, _| {})?;
    let power = stats.transitions as f64 / stats.cycles as f64;
    Ok(MetricsRow {
        legend: legend.to_string(),
        architecture: architecture.to_string(),
        protocol: nl.protocol(),
        fl: stats.fl.max,
        rl: stats.rl.max,
        ct: stats.ct.max,
        fl_mean: stats.fl.mean,
        rl_mean: stats.rl.mean,
        ct_mean: stats.ct.mean,
        area: area_proxy(nl, weights)?,
        power,
        pctp: pctp(power, stats.ct.max as f64),
        vectors: stats.cycles,
    })
}

/// One published row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub legend: String,
    pub architecture: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub fl_ns: f64,
    pub rl_ns: f64,
    pub ct_ns: f64,
    pub area_um2: f64,
    pub power_uw: f64,
    pub protocol: Protocol,
}

impl ReferenceRow {
    pub fn pctp(&self) -> f64 {
        pctp(self.power_uw, self.ct_ns)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    rows: Vec<ReferenceRow>,
}

const BUNDLED: &str = include_str!("../data/reference_v1.csv");

impl ReferenceTable {
    pub fn bundled() -> Self {
        Self::from_csv(BUNDLED).expect("bundled reference table is valid")
    }

    /// Parses and validates `ct = fl + rl` to within 0.01 on every row.
    pub fn from_csv(text: &str) -> Result<Self, MetricsError> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, rec) in rdr.deserialize::<ReferenceRow>().enumerate() {
            let line = i + 2;
            let row = rec.map_err(|e| MetricsError::Reference { line, msg: e.to_string() })?;
            if (row.ct_ns - (row.fl_ns + row.rl_ns)).abs() > 0.01 + 1e-9 {
                return Err(MetricsError::Reference {
                    line,
                    msg: format!("{}: CT {} differs from FL + RL = {}", row.legend, row.ct_ns, row.fl_ns + row.rl_ns),
                });
            }
            rows.push(row);
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[ReferenceRow] {
        &self.rows
    }

    pub fn get(&self, legend: &str) -> Option<&ReferenceRow> {
        self.rows.iter().find(|r| r.legend == legend)
    }

    pub fn protocol_rows(&self, protocol: Protocol) -> impl Iterator<Item = &ReferenceRow> {
        self.rows.iter().filter(move |r| r.protocol == protocol)
    }
}

/// Generator configuration standing in for a table legend (`Z8`, `O28`, ...),
/// at 32 bits. `None` for legends without an implemented counterpart.
pub fn legend_spec(legend: &str) -> Option<AdderSpec> {
    let protocol = match legend.chars().next()? {
        'Z' => Protocol::Rtz,
        'O' => Protocol::Rto,
        _ => return None,
    };
    let n: u32 = legend[1..].parse().ok()?;
    let spec = match n {
        1..=3 => AdderSpec::rca(32, Indication::Strong, protocol),
        4..=7 => AdderSpec::rca(32, Indication::Weak, protocol),
        8 => AdderSpec::rca(32, Indication::Early, protocol),
        9 | 11 => AdderSpec::new(Architecture::RcaDbfa, 32, protocol),
        10 | 12 => AdderSpec::new(Architecture::HybridRca, 32, protocol),
        13 => AdderSpec::csla(vec![8, 8, 8, 8], protocol),
        15 | 17 | 20 | 22 | 27 => AdderSpec::new(Architecture::Bcla, 32, protocol),
        16 | 18 | 21 | 23 | 28 => AdderSpec::new(Architecture::Bclarc, 32, protocol),
        19 => AdderSpec::new(Architecture::Ccla, 32, protocol),
        24 | 29 => AdderSpec::hybrid_bclarc(32, 4, protocol),
        25 | 30 => AdderSpec::hybrid_bclarc(32, 8, protocol),
        26 | 31 => AdderSpec::hybrid_bclarc(32, 12, protocol),
        _ => return None,
    };
    Some(spec)
}

/// Every mapped legend of one protocol, in table order.
pub fn legends(protocol: Protocol) -> Vec<(String, AdderSpec)> {
    (1..=31)
        .map(|n| format!("{}{n}", protocol.legend_prefix()))
        .filter_map(|l| legend_spec(&l).map(|s| (l, s)))
        .collect()
}

/// A comparison: two legends, or one legend's FL against its own RL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum LegendPair {
    Between(String, String),
    Within(String),
}

impl fmt::Display for LegendPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LegendPair::Between(x, y) => write!(f, "{x}:{y}"),
            LegendPair::Within(x) => f.write_str(x),
        }
    }
}

impl FromStr for LegendPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let ok = |l: &str| !l.is_empty() && l.chars().all(|c| c.is_ascii_alphanumeric());
        match s.split_once(':') {
            Some((x, y)) if ok(x) && ok(y) => Ok(LegendPair::Between(x.to_string(), y.to_string())),
            None if ok(s) => Ok(LegendPair::Within(s.to_string())),
            _ => Err(format!("bad legend pair `{s}`")),
        }
    }
}

impl From<LegendPair> for String {
    fn from(p: LegendPair) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for LegendPair {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

pub fn parse_pairs(s: &str) -> Result<Vec<LegendPair>, String> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Fl,
    Rl,
    Ct,
    Area,
    Power,
    Pctp,
}

impl Metric {
    pub const ALL: [Metric; 6] = [Metric::Fl, Metric::Rl, Metric::Ct, Metric::Area, Metric::Power, Metric::Pctp];

    fn measured(self, r: &MetricsRow) -> f64 {
        match self {
            Metric::Fl => r.fl as f64,
            Metric::Rl => r.rl as f64,
            Metric::Ct => r.ct as f64,
            Metric::Area => r.area as f64,
            Metric::Power => r.power,
            Metric::Pctp => r.pctp,
        }
    }

    fn reference(self, r: &ReferenceRow) -> f64 {
        match self {
            Metric::Fl => r.fl_ns,
            Metric::Rl => r.rl_ns,
            Metric::Ct => r.ct_ns,
            Metric::Area => r.area_um2,
            Metric::Power => r.power_uw,
            Metric::Pctp => r.pctp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub pair: String,
    pub metric: Metric,
    pub measured: i8,
    pub reference: i8,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalReport {
    pub entries: Vec<Agreement>,
    /// Fraction of agreeing entries per metric.
    pub by_metric: BTreeMap<Metric, f64>,
    pub overall: f64,
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign agreement of measured and published differences. Pairs compare
/// every metric across two legends; a lone legend compares its FL with its
/// RL.
pub fn compare_ordinal(
    measured: &[MetricsRow],
    reference: &ReferenceTable,
    pairs: &[LegendPair],
) -> Result<OrdinalReport, MetricsError> {
    let by_legend: HashMap<&str, &MetricsRow> = measured.iter().map(|r| (r.legend.as_str(), r)).collect();
    let lookup = |l: &str| -> Result<(&MetricsRow, &ReferenceRow), MetricsError> {
        match (by_legend.get(l), reference.get(l)) {
            (Some(m), Some(r)) => Ok((m, r)),
            _ => Err(MetricsError::UnknownLegend(l.to_string())),
        }
    };
    let mut entries = Vec::new();
    for pair in pairs {
        match pair {
            LegendPair::Between(x, y) => {
                let (mx, rx) = lookup(x)?;
                let (my, ry) = lookup(y)?;
                for metric in Metric::ALL {
                    let m = sign(metric.measured(mx) - metric.measured(my));
                    let r = sign(metric.reference(rx) - metric.reference(ry));
                    entries.push(Agreement { pair: pair.to_string(), metric, measured: m, reference: r, agree: m == r });
                }
            }
            LegendPair::Within(x) => {
                let (m, r) = lookup(x)?;
                let ms = sign(m.fl as f64 - m.rl as f64);
                let rs = sign(r.fl_ns - r.rl_ns);
                entries.push(Agreement { pair: pair.to_string(), metric: Metric::Fl, measured: ms, reference: rs, agree: ms == rs });
            }
        }
    }
    let mut by_metric = BTreeMap::new();
    for metric in Metric::ALL {
        let es: Vec<&Agreement> = entries.iter().filter(|e| e.metric == metric).collect();
        if !es.is_empty() {
            by_metric.insert(metric, es.iter().filter(|e| e.agree).count() as f64 / es.len() as f64);
        }
    }
    let overall = if entries.is_empty() {
        1.0
    } else {
        entries.iter().filter(|e| e.agree).count() as f64 / entries.len() as f64
    };
    Ok(OrdinalReport { entries, by_metric, overall })
}

/// Max-normalized CT and PCTP of one protocol's rows, in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPoint {
    pub legend: String,
    pub protocol: Protocol,
    pub ct: f64,
    pub pctp: f64,
}

pub fn normalized_series(rows: &[MetricsRow]) -> Result<Vec<NormalizedPoint>, MetricsError> {
    let mut out = Vec::new();
    for p in Protocol::ALL {
        let rs: Vec<&MetricsRow> = rows.iter().filter(|r| r.protocol == p).collect();
        if rs.is_empty() {
            continue;
        }
        let ct = normalize(&rs.iter().map(|r| r.ct as f64).collect::<Vec<_>>())?;
        let pc = normalize(&rs.iter().map(|r| r.pctp).collect::<Vec<_>>())?;
        for (i, r) in rs.iter().enumerate() {
            out.push(NormalizedPoint { legend: r.legend.clone(), protocol: p, ct: ct[i], pctp: pc[i] });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logiclib;
    use proptest::prelude::*;

    #[test]
    fn full_adder_areas() {
        let w = AreaWeights::default();
        let dims = area_proxy(&logiclib::build_full_adder(Indication::Strong, Protocol::Rtz), &w).unwrap();
        let early = area_proxy(&logiclib::build_full_adder(Indication::Early, Protocol::Rtz), &w).unwrap();
        assert_eq!(dims, 8 * 6 + 4 * 4);
        assert_eq!(early, 12 * 2 + 6 * 2);
        assert!(early < dims);
    }

    #[test]
    fn power_of_single_trace() {
        assert!(matches!(power_proxy(&[]), Err(MetricsError::EmptyTraceSet)));
        let nl = logiclib::build_full_adder(Indication::Early, Protocol::Rtz);
        let t = sim::run_cycle(&nl, 1, 0, true, &DelayModel::Unit).unwrap();
        let n = t.transitions.len();
        assert_eq!(n % 2, 0);
        assert_eq!(power_proxy(&[t]).unwrap(), n as f64);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[10.0, 5.0, 2.5]).unwrap(), vec![1.0, 0.5, 0.25]);
        assert_eq!(normalize(&[3.7]).unwrap(), vec![1.0]);
        assert!(normalize(&[]).is_err());
        assert!(normalize(&[1.0, 0.0]).is_err());
        assert!(normalize(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn reference_table_loads_and_is_complete() {
        let t = ReferenceTable::bundled();
        assert_eq!(t.rows().len(), 62);
        assert_eq!(t.protocol_rows(Protocol::Rtz).count(), 31);
        let z8 = t.get("Z8").unwrap();
        assert_eq!((z8.fl_ns, z8.rl_ns, z8.ct_ns, z8.area_um2), (3.10, 0.61, 3.71, 1658.80));
        assert_eq!(t.get("O28").unwrap().ct_ns, 2.89);
    }

    #[test]
    fn reference_loader_rejects_bad_sums() {
        let bad = "legend,architecture,ref,fl_ns,rl_ns,ct_ns,area_um2,power_uw,protocol\nZ1,X,[1],1.00,1.00,2.50,1,1,rtz\n";
        assert!(matches!(ReferenceTable::from_csv(bad), Err(MetricsError::Reference { line: 2, .. })));
    }

    #[test]
    fn reference_sanity() {
        let t = ReferenceTable::bundled();
        assert!(t.get("Z28").unwrap().ct_ns < t.get("Z8").unwrap().ct_ns);
        let min_area = t.protocol_rows(Protocol::Rtz).min_by(|a, b| a.area_um2.total_cmp(&b.area_um2)).unwrap();
        assert_eq!(min_area.legend, "Z8");
        let top = t.protocol_rows(Protocol::Rtz).max_by(|a, b| a.pctp().total_cmp(&b.pctp())).unwrap();
        assert_eq!(top.legend, "Z1");
        let min_ct = t.protocol_rows(Protocol::Rto).min_by(|a, b| a.ct_ns.total_cmp(&b.ct_ns)).unwrap();
        assert_eq!(min_ct.legend, "O28");
    }

    #[test]
    fn legend_mapping() {
        assert_eq!(legend_spec("Z8"), Some(AdderSpec::rca(32, Indication::Early, Protocol::Rtz)));
        assert_eq!(legend_spec("O28").unwrap().architecture, Architecture::Bclarc);
        assert_eq!(legend_spec("Z14"), None);
        assert_eq!(legend_spec("Q1"), None);
        assert_eq!(legends(Protocol::Rto).len(), 30);
    }

    #[test]
    fn pair_parsing() {
        let p = parse_pairs("Z22:Z23, Z19").unwrap();
        assert_eq!(p, vec![LegendPair::Between("Z22".into(), "Z23".into()), LegendPair::Within("Z19".into())]);
        assert!(parse_pairs("Z1:").is_err());
    }

    fn row(legend: &str, fl: u64, rl: u64) -> MetricsRow {
        MetricsRow {
            legend: legend.into(),
            architecture: String::new(),
            protocol: Protocol::Rtz,
            fl,
            rl,
            ct: fl + rl,
            fl_mean: fl as f64,
            rl_mean: rl as f64,
            ct_mean: (fl + rl) as f64,
            area: 1,
            power: 1.0,
            pctp: (fl + rl) as f64,
            vectors: 1,
        }
    }

    #[test]
    fn ordinal_comparison() {
        let t = ReferenceTable::bundled();
        let rows = vec![row("Z22", 10, 8), row("Z23", 9, 5), row("Z19", 7, 7)];
        let pairs = parse_pairs("Z22:Z23,Z19,Z22:Z22").unwrap();
        let r = compare_ordinal(&rows, &t, &pairs).unwrap();
        let ct: Vec<&Agreement> = r.entries.iter().filter(|e| e.metric == Metric::Ct).collect();
        assert!(ct.iter().all(|e| e.agree));
        assert!(r.entries.iter().filter(|e| e.pair == "Z22:Z22").all(|e| e.agree));
        assert!(r.entries.iter().find(|e| e.pair == "Z19").unwrap().agree);
        assert!(matches!(
            compare_ordinal(&rows, &t, &parse_pairs("Z22:Z99").unwrap()),
            Err(MetricsError::UnknownLegend(l)) if l == "Z99"
        ));
    }

    proptest! {
        #[test]
        fn normalize_max_is_one_and_scale_invariant(
            v in prop::collection::vec(1e-3f64..1e6, 1..20),
            k in 1e-3f64..1e3,
        ) {
            let n = normalize(&v).unwrap();
            prop_assert_eq!(n.iter().copied().fold(f64::MIN, f64::max), 1.0);
            let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
            let m = normalize(&scaled).unwrap();
            for (a, b) in n.iter().zip(&m) {
                prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()));
            }
            prop_assert_eq!(normalize(&n).unwrap(), n);
        }

        #[test]
        fn pctp_is_monotone(p in 0.1f64..1e4, c in 0.1f64..1e4, dp in 0.0f64..10.0, dc in 0.0f64..10.0) {
            prop_assert!(pctp(p + dp, c) >= pctp(p, c));
            prop_assert!(pctp(p, c + dc) >= pctp(p, c));
        }
    }
}
