use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qdilab::metrics::{self, AreaWeights, LegendPair, MetricsRow, ReferenceTable};
use qdilab::qdicheck::{self, Violation, ViolationKind};
use qdilab::sim::{self, SimError, Simulator, StatsBuilder};
use qdilab::{adders, Protocol};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{self, NetlistArgs, SpecArgs, VectorArgs};
use crate::config::{ExperimentConfig, Format, VectorSource};

pub enum Outcome {
    Clean,
    Violations,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

pub fn generate(spec: &SpecArgs, dual: bool, output: Option<&Path>) -> Result<()> {
    let s = spec.spec()?;
    let mut nl = adders::generate(&s)?;
    if dual {
        nl = adders::dual(&nl);
    }
    let json = nl.to_json();
    match output {
        Some(p) => {
            let mut f = create(p)?;
            writeln!(f, "{json}")?;
            f.flush()?;
        }
        None => println!("{json}"),
    }
    let mut blocks: BTreeMap<&str, usize> = BTreeMap::new();
    for i in nl.instances() {
        *blocks.entry(i.kind.as_str()).or_default() += 1;
    }
    let blocks: Vec<String> = blocks.iter().map(|(k, n)| format!("{n} {k}")).collect();
    eprintln!("{}: {} gates, {} nets, {}", s.summary(), nl.gates().len(), nl.net_count(), blocks.join(", "));
    Ok(())
}

pub struct SimulateOpts<'a> {
    pub source: &'a NetlistArgs,
    pub vectors: &'a VectorArgs,
    pub out_dir: &'a Path,
    pub vcd: bool,
}

pub fn simulate(o: SimulateOpts) -> Result<()> {
    let nl = o.source.load()?;
    let stimuli = o.vectors.stimuli(&nl)?;
    let mut sim = Simulator::new(&nl, &o.vectors.delay)?;
    let mut traces = Vec::with_capacity(stimuli.len());
    let mut stats = StatsBuilder::default();
    for s in &stimuli {
        let t = sim.run_cycle(s)?;
        stats.push(&t);
        traces.push(t);
    }
    let path = o.out_dir.join("traces.jsonl");
    let mut f = create(&path)?;
    sim::write_jsonl(&mut f, &traces)?;
    f.flush()?;
    if o.vcd {
        if let Some(t) = traces.first() {
            let p = o.out_dir.join("cycle0.vcd");
            let mut f = create(&p)?;
            sim::write_vcd(&mut f, &nl, t, sim.initial_values())?;
            f.flush()?;
        }
    }
    let s = stats.finish();
    println!("cycles {}", s.cycles);
    for (name, x) in [("fl", s.fl), ("rl", s.rl), ("ct", s.ct)] {
        println!("{name:<3} min {} max {} mean {:.3}", x.min, x.max, x.mean);
    }
    println!("transitions {}", s.transitions);
    if let VectorSource::Random { count, seed } = vector_source(o.vectors) {
        println!("vectors random count {count} seed {seed}");
    }
    println!("traces {}", path.display());
    Ok(())
}

fn vector_source(v: &VectorArgs) -> VectorSource {
    match &v.vectors {
        Some(p) => VectorSource::File { path: p.clone() },
        None => VectorSource::Random { count: v.random, seed: v.seed },
    }
}

/// A violation seen in one or more cycles.
#[derive(Debug, Serialize)]
struct Finding {
    #[serde(flatten)]
    violation: Violation,
    first_cycle: usize,
    cycles: usize,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    cycles: usize,
    mismatches: Vec<Mismatch>,
    findings: Vec<Finding>,
}

#[derive(Debug, Serialize)]
struct Mismatch {
    cycle: usize,
    inputs: Vec<u64>,
    expected: u64,
    got: u64,
}

pub struct VerifyOpts<'a> {
    pub source: &'a NetlistArgs,
    pub vectors: &'a VectorArgs,
    pub strict: bool,
    pub dsop: bool,
    pub json: bool,
}

pub fn verify(o: VerifyOpts) -> Result<Outcome> {
    let nl = o.source.load()?;
    let stimuli = o.vectors.stimuli(&nl)?;
    let adder = args::is_adder(&nl);
    let width = args::adder_width(&nl);
    let mut sim = Simulator::new(&nl, &o.vectors.delay)?;
    let mut found: BTreeMap<(ViolationKind, Vec<String>), Finding> = BTreeMap::new();
    let mut note = |cycle: usize, v: Violation| {
        found
            .entry((v.kind, v.location.clone()))
            .and_modify(|f| f.cycles += 1)
            .or_insert(Finding { violation: v, first_cycle: cycle, cycles: 1 });
    };
    let mut mismatches = Vec::new();
    let mut cycles = 0;
    for (i, s) in stimuli.iter().enumerate() {
        let t = match sim.run_cycle(s) {
            Ok(t) => t,
            Err(e @ (SimError::OutputIllegal { .. } | SimError::OutputIncomplete { .. } | SimError::NonQuiescence { .. })) => {
                note(i, Violation { kind: ViolationKind::NonRestoring, location: vec![], time: None, detail: e.to_string() });
                sim.reset();
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        cycles += 1;
        if adder {
            let got = t.adder_result(width);
            let expected = s[0] + s[1] + s[2];
            if got != expected {
                mismatches.push(Mismatch { cycle: i, inputs: s.clone(), expected, got });
            }
        }
        for v in qdicheck::check_monotonic(&t, nl.protocol(), Some(&nl)) {
            note(i, v);
        }
        for v in qdicheck::check_round_trip(&t, &nl) {
            note(i, v);
        }
        if o.strict {
            for v in qdicheck::check_round_trip_strict(&t, &nl, &o.vectors.delay) {
                note(i, v);
            }
        }
        if !sim.is_restored() {
            note(i, Violation {
                kind: ViolationKind::NonRestoring,
                location: vec![],
                time: None,
                detail: "state differs from the initial state after the spacer".into(),
            });
            sim.reset();
        }
    }
    let mut cover_notes = Vec::new();
    if o.dsop {
        for port in nl.outputs() {
            for pair in &port.pairs {
                for net in [pair.rail1, pair.rail0] {
                    match qdicheck::extract_cover(&nl, net) {
                        Ok(c) => qdicheck::check_dsop(&c).into_iter().for_each(|v| note(0, v)),
                        Err(e) => cover_notes.push(format!("{}: {e}", nl.net_name(net))),
                    }
                }
            }
        }
    }
    let report = VerifyReport { cycles, mismatches, findings: found.into_values().collect() };
    let clean = report.mismatches.is_empty() && report.findings.is_empty();
    if o.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for m in &report.mismatches {
            println!("MISMATCH cycle {} inputs {:?}: expected {:#x}, got {:#x}", m.cycle, m.inputs, m.expected, m.got);
        }
        for f in &report.findings {
            let v = &f.violation;
            println!(
                "{:?} [{}] {} (first cycle {}, {} cycle(s))",
                v.kind,
                v.location.join(", "),
                v.detail,
                f.first_cycle,
                f.cycles
            );
        }
        for n in &cover_notes {
            println!("note: cover skipped for {n}");
        }
        if let VectorSource::Random { count, seed } = vector_source(o.vectors) {
            if adder {
                println!("vectors random count {count} seed {seed}");
            }
        }
        println!(
            "{} cycle(s), {} mismatch(es), {} violation(s)",
            report.cycles,
            report.mismatches.len(),
            report.findings.len()
        );
    }
    Ok(if clean { Outcome::Clean } else { Outcome::Violations })
}

pub struct BenchOpts {
    pub config: Option<PathBuf>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub protocols: Vec<Protocol>,
    pub out_dir: PathBuf,
}

pub fn bench(o: BenchOpts) -> Result<()> {
    let (mut cfg, base) = match &o.config {
        Some(p) => (ExperimentConfig::load(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (ExperimentConfig::default_bench(), PathBuf::new()),
    };
    if let VectorSource::Random { count, seed } = &mut cfg.vectors {
        *count = o.count.unwrap_or(*count);
        *seed = o.seed.unwrap_or(*seed);
    }
    if !o.protocols.is_empty() {
        cfg.protocols = o.protocols.clone();
    }
    let out_dir = cfg.out_dir.clone().map(|d| base.join(d)).unwrap_or(o.out_dir);
    cfg.validate()?;

    let jobs: Vec<_> = cfg
        .protocols
        .iter()
        .flat_map(|&p| cfg.specs.iter().map(move |e| (e.label(p), e.spec(p))))
        .collect();
    let weights = AreaWeights::default();
    let rows: Vec<MetricsRow> = jobs
        .par_iter()
        .map(|(label, spec)| -> Result<MetricsRow> {
            let vs = cfg.vectors_for(spec.width, &base)?;
            Ok(metrics::measure(spec, label, &vs, &cfg.delay, &weights)?)
        })
        .collect::<Result<_>>()?;
    let series = metrics::normalized_series(&rows)?;

    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for format in &cfg.formats {
        match format {
            Format::Csv => {
                write_csv(&out_dir.join("metrics.csv"), &rows)?;
                write_csv(&out_dir.join("normalized.csv"), &series)?;
            }
            Format::Json => {
                let mut f = create(&out_dir.join("metrics.json"))?;
                serde_json::to_writer_pretty(&mut f, &rows)?;
                writeln!(f)?;
                f.flush()?;
            }
        }
    }
    fs::write(out_dir.join("config.toml"), cfg.to_toml())?;

    let mut out = io::stdout().lock();
    writeln!(out, "{:<8} {:<28} {:>5} {:>5} {:>5} {:>9} {:>6} {:>9} {:>10}", "legend", "architecture", "fl", "rl", "ct", "ct_mean", "area", "power", "pctp")?;
    for r in &rows {
        writeln!(
            out,
            "{:<8} {:<28} {:>5} {:>5} {:>5} {:>9.3} {:>6} {:>9.2} {:>10.1}",
            r.legend, r.architecture, r.fl, r.rl, r.ct, r.ct_mean, r.area, r.power, r.pctp
        )?;
    }
    writeln!(out, "results in {}", out_dir.display())?;
    Ok(())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_measured(path: &Path) -> Result<Vec<MetricsRow>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let rows = r.deserialize().collect::<Result<Vec<MetricsRow>, _>>();
    rows.with_context(|| format!("parsing {}", path.display()))
}

pub struct CompareOpts {
    pub measured: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub pairs: String,
    pub count: usize,
    pub seed: u64,
    pub json: bool,
}

pub fn compare(o: CompareOpts) -> Result<()> {
    let pairs = metrics::parse_pairs(&o.pairs).map_err(anyhow::Error::msg)?;
    let reference = match &o.reference {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ReferenceTable::from_csv(&text)?
        }
        None => ReferenceTable::bundled(),
    };
    let measured = match &o.measured {
        Some(p) => read_measured(p)?,
        None => {
            let mut legends: Vec<&str> = pairs
                .iter()
                .flat_map(|p| match p {
                    LegendPair::Between(a, b) => vec![a.as_str(), b.as_str()],
                    LegendPair::Within(a) => vec![a.as_str()],
                })
                .collect();
            legends.sort_unstable();
            legends.dedup();
            let weights = AreaWeights::default();
            legends
                .par_iter()
                .map(|l| -> Result<MetricsRow> {
                    let spec = metrics::legend_spec(l).ok_or_else(|| anyhow::anyhow!("legend `{l}` has no implemented adder"))?;
                    let vs = metrics::bench_vectors(spec.width, o.count, o.seed);
                    Ok(metrics::measure(&spec, l, &vs, &sim::DelayModel::Unit, &weights)?)
                })
                .collect::<Result<_>>()?
        }
    };
    let report = metrics::compare_ordinal(&measured, &reference, &pairs)?;
    if o.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }
    for e in &report.entries {
        println!(
            "{:<10} {:<6} measured {:>2} reference {:>2} {}",
            e.pair,
            format!("{:?}", e.metric).to_lowercase(),
            e.measured,
            e.reference,
            if e.agree { "agree" } else { "DISAGREE" }
        );
    }
    for (m, a) in &report.by_metric {
        println!("agreement {:<6} {:.0}%", format!("{m:?}").to_lowercase(), a * 100.0);
    }
    println!("agreement overall {:.0}%", report.overall * 100.0);
    Ok(())
}
