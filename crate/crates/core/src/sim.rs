//! Event-driven gate simulation and the 4-phase handshake environment.
//!
//! Time is an integer. Events are ordered by `(time, seq)`. All events of a
//! timestamp are applied first, then every gate whose inputs changed is
//! re-evaluated in gate-id order. A gate whose new output differs from the
//! output it is already heading towards schedules an event after its delay
//! (transport delay). A net's transition reaches all of its fanout pins at
//! the same timestamp.
//!
//! A cycle applies data to all inputs at `t = 0`, settles, waits
//! `ack_latency`, applies the spacer and settles again. `fl` is the time of
//! the last primary-output transition of the data phase; `rl` is the time of
//! the last primary-output transition of the spacer phase, counted from the
//! moment the spacer was applied. `fl_cd` and `rl_cd` extend the same
//! measurement to the output completion detector (`ack_out`).

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{self, classify_pair, Decoded, DualRailWord, PairClass, Protocol, RailPair};
use crate::netlist::{Driver, GateKind, NetId, Netlist, NetlistError};
use crate::vectors::Vector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("output {port}[{bit}] became illegal at t={time}")]
    OutputIllegal { port: String, bit: usize, time: u64 },
    #[error("outputs incomplete after the {phase} phase settled")]
    OutputIncomplete { phase: Phase },
    #[error("no quiescence after {transitions} transitions in the {phase} phase")]
    NonQuiescence { phase: Phase, transitions: usize },
    #[error("expected {expected} input values, got {got}")]
    PortMismatch { expected: usize, got: usize },
    #[error("input value {value:#x} does not fit port `{port}`")]
    ValueTooWide { port: String, value: u64 },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Data,
    Spacer,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Data => "data",
            Phase::Spacer => "spacer",
        })
    }
}

/// Gate delays. Every delay is at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", content = "table", rename_all = "snake_case")]
pub enum DelayModel {
    #[default]
    Unit,
    PerKind(BTreeMap<GateKind, u64>),
}

impl DelayModel {
    /// Per-kind table where wide gates and C-elements take two units.
    pub fn per_kind_default() -> Self {
        DelayModel::PerKind(
            GateKind::ALL
                .into_iter()
                .map(|k| {
                    let d = match k {
                        GateKind::Not | GateKind::And2 | GateKind::Or2 => 1,
                        _ => 2,
                    };
                    (k, d)
                })
                .collect(),
        )
    }

    pub fn delay(&self, kind: GateKind) -> u64 {
        match self {
            DelayModel::Unit => 1,
            DelayModel::PerKind(t) => t.get(&kind).copied().unwrap_or(1).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub time: u64,
    pub net: NetId,
    pub rising: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseMarks {
    pub data_applied: u64,
    pub data_settled: u64,
    pub spacer_applied: u64,
    pub spacer_settled: u64,
}

/// One full data + spacer cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandshakeTrace {
    pub protocol: Protocol,
    pub inputs: Vec<u64>,
    /// Decoded data value of every output port at the end of the data phase.
    pub outputs: Vec<u64>,
    pub transitions: Vec<Transition>,
    /// Index of the first spacer-phase transition.
    pub spacer_index: usize,
    pub marks: PhaseMarks,
    pub fl: u64,
    pub rl: u64,
    pub ct: u64,
    pub fl_cd: u64,
    pub rl_cd: u64,
}

impl HandshakeTrace {
    pub fn phase(&self, phase: Phase) -> &[Transition] {
        match phase {
            Phase::Data => &self.transitions[..self.spacer_index],
            Phase::Spacer => &self.transitions[self.spacer_index..],
        }
    }

    /// `sum | cout << width` for a generated adder.
    pub fn adder_result(&self, width: u32) -> u64 {
        self.outputs[0] | self.outputs.get(1).copied().unwrap_or(0) << width
    }
}

pub struct Simulator<'a> {
    nl: &'a Netlist,
    delay: Vec<u64>,
    fanout: Vec<Vec<u32>>,
    is_output: Vec<bool>,
    values: Vec<bool>,
    projected: Vec<bool>,
    initial: Vec<bool>,
    queue: BinaryHeap<Reverse<(u64, u64, u32, bool)>>,
    seq: u64,
    now: u64,
    transitions: Vec<Transition>,
    bound: usize,
    ack_out: Option<NetId>,
    pub ack_latency: u64,
}

impl<'a> Simulator<'a> {
    pub fn new(nl: &'a Netlist, delay: &DelayModel) -> Result<Self, SimError> {
        let report = nl.validate();
        if !report.is_simulatable() {
            return Err(NetlistError::InvalidNetlist(report.findings.len()).into());
        }
        let n = nl.net_count();
        let mut fanout = vec![Vec::new(); n];
        for (i, g) in nl.gates().iter().enumerate() {
            for x in &g.inputs {
                if fanout[x.index()].last() != Some(&(i as u32)) {
                    fanout[x.index()].push(i as u32);
                }
            }
        }
        let mut is_output = vec![false; n];
        for net in nl.output_nets() {
            is_output[net.index()] = true;
        }
        let mut sim = Self {
            nl,
            delay: nl.gates().iter().map(|g| delay.delay(g.kind)).collect(),
            fanout,
            is_output,
            values: vec![false; n],
            projected: vec![false; n],
            initial: Vec::new(),
            queue: BinaryHeap::new(),
            seq: 0,
            now: 0,
            transitions: Vec::new(),
            bound: 10 * n.max(1),
            ack_out: nl.ack("ack_out"),
            ack_latency: 0,
        };
        sim.initial = sim.spacer_state()?;
        sim.reset();
        Ok(sim)
    }

    /// Quiescent state with every input at the spacer: C-elements start at
    /// the spacer level, everything else is evaluated in topological order.
    fn spacer_state(&self) -> Result<Vec<bool>, SimError> {
        let level = self.nl.protocol().spacer_level();
        let mut v = vec![level; self.nl.net_count()];
        for (net, d) in self.nl.drivers().into_iter().enumerate() {
            if let Some(Driver::Tie(value)) = d {
                v[net] = value;
            }
        }
        let order = self
            .nl
            .topo_order()
            .map_err(|left| NetlistError::InvalidNetlist(left.len()))?;
        for g in order {
            let gate = self.nl.gate(g);
            let out = gate.kind.eval(gate.inputs.iter().map(|x| v[x.index()]), level);
            v[gate.output.index()] = out;
        }
        Ok(v)
    }

    /// Back to the initial spacer state with an empty queue and time 0.
    pub fn reset(&mut self) {
        self.values.clone_from(&self.initial);
        self.projected.clone_from(&self.initial);
        self.queue.clear();
        self.transitions.clear();
        self.now = 0;
    }

    pub fn set_bound(&mut self, bound: usize) {
        self.bound = bound;
    }

    pub fn netlist(&self) -> &'a Netlist {
        self.nl
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn value(&self, net: NetId) -> bool {
        self.values[net.index()]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn initial_values(&self) -> &[bool] {
        &self.initial
    }

    /// True when every net holds its initial spacer value.
    pub fn is_restored(&self) -> bool {
        self.values == self.initial
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn take_transitions(&mut self) -> Vec<Transition> {
        std::mem::take(&mut self.transitions)
    }

    /// Schedules `net := value` at time `at`.
    pub fn drive(&mut self, net: NetId, value: bool, at: u64) {
        self.seq += 1;
        self.queue.push(Reverse((at, self.seq, net.0, value)));
        self.projected[net.index()] = value;
    }

    /// Drives every pair of input port `port` to the encoding of `value`.
    pub fn drive_port(&mut self, port: usize, word: &DualRailWord, at: u64) {
        let pairs = self.nl.inputs()[port].pairs.clone();
        for (p, r) in pairs.iter().zip(word.pairs()) {
            self.drive(p.rail1, r.rail1, at);
            self.drive(p.rail0, r.rail0, at);
        }
    }

    /// Current word on output port `port`.
    pub fn output_word(&self, port: usize) -> DualRailWord {
        self.port_word(&self.nl.outputs()[port].pairs)
    }

    fn port_word(&self, pairs: &[crate::netlist::NetPair]) -> DualRailWord {
        DualRailWord::new(
            pairs
                .iter()
                .map(|p| RailPair { rail1: self.value(p.rail1), rail0: self.value(p.rail0) })
                .collect(),
            self.nl.protocol(),
        )
    }

    /// Processes events until the queue is empty. Returns the time of the last
    /// transition (or the current time when nothing changed).
    pub fn settle(&mut self, phase: Phase) -> Result<u64, SimError> {
        let start = self.transitions.len();
        let mut last = self.now;
        let mut dirty: Vec<u32> = Vec::new();
        while let Some(&Reverse((t, ..))) = self.queue.peek() {
            self.now = t;
            dirty.clear();
            let mut output_changed = false;
            while let Some(&Reverse((t2, _, net, v))) = self.queue.peek() {
                if t2 != t {
                    break;
                }
                self.queue.pop();
                let i = net as usize;
                if self.values[i] != v {
                    self.values[i] = v;
                    self.transitions.push(Transition { time: t, net: NetId(net), rising: v });
                    dirty.extend_from_slice(&self.fanout[i]);
                    output_changed |= self.is_output[i];
                    last = t;
                }
            }
            dirty.sort_unstable();
            dirty.dedup();
            for &g in &dirty {
                let gate = &self.nl.gates()[g as usize];
                let out = gate.output.index();
                let prev = self.projected[out];
                let next = gate.kind.eval(gate.inputs.iter().map(|x| self.values[x.index()]), prev);
                if next != prev {
                    self.projected[out] = next;
                    self.seq += 1;
                    self.queue.push(Reverse((t + self.delay[g as usize], self.seq, gate.output.0, next)));
                }
            }
            if output_changed {
                self.check_outputs_legal()?;
            }
            let count = self.transitions.len() - start;
            if count > self.bound {
                self.queue.clear();
                return Err(SimError::NonQuiescence { phase, transitions: count });
            }
        }
        Ok(last)
    }

    fn check_outputs_legal(&self) -> Result<(), SimError> {
        let protocol = self.nl.protocol();
        for port in self.nl.outputs() {
            for (bit, p) in port.pairs.iter().enumerate() {
                let pair = RailPair { rail1: self.value(p.rail1), rail0: self.value(p.rail0) };
                if classify_pair(pair, protocol) == PairClass::Illegal {
                    return Err(SimError::OutputIllegal { port: port.name.clone(), bit, time: self.now });
                }
            }
        }
        Ok(())
    }

    fn encode_inputs(&self, values: &[u64]) -> Result<Vec<DualRailWord>, SimError> {
        let ports = self.nl.inputs();
        if ports.len() != values.len() {
            return Err(SimError::PortMismatch { expected: ports.len(), got: values.len() });
        }
        ports
            .iter()
            .zip(values)
            .map(|(p, &v)| {
                encoding::encode_word(v, p.width(), self.nl.protocol())
                    .map_err(|_| SimError::ValueTooWide { port: p.name.clone(), value: v })
            })
            .collect()
    }

    /// One full 4-phase cycle from the quiescent spacer state. `values` holds
    /// one integer per input port, in port order.
    pub fn run_cycle(&mut self, values: &[u64]) -> Result<HandshakeTrace, SimError> {
        let words = self.encode_inputs(values)?;
        let protocol = self.nl.protocol();
        let spacers: Vec<DualRailWord> = self
            .nl
            .inputs()
            .iter()
            .map(|p| encoding::spacer_word(p.width(), protocol).expect("port width is positive"))
            .collect();
        self.now = 0;
        self.transitions.clear();

        for (i, w) in words.iter().enumerate() {
            self.drive_port(i, w, 0);
        }
        let data_settled = self.settle(Phase::Data)?;
        let mut outputs = Vec::with_capacity(self.nl.outputs().len());
        for i in 0..self.nl.outputs().len() {
            match encoding::decode_word(&self.output_word(i)) {
                Decoded::Value(v) => outputs.push(v),
                _ => return Err(SimError::OutputIncomplete { phase: Phase::Data }),
            }
        }
        let spacer_index = self.transitions.len();

        let spacer_applied = data_settled + self.ack_latency;
        self.now = spacer_applied;
        for (i, w) in spacers.iter().enumerate() {
            self.drive_port(i, w, spacer_applied);
        }
        let spacer_settled = self.settle(Phase::Spacer)?.max(spacer_applied);
        for i in 0..self.nl.outputs().len() {
            if encoding::decode_word(&self.output_word(i)) != Decoded::Spacer {
                return Err(SimError::OutputIncomplete { phase: Phase::Spacer });
            }
        }

        let transitions = self.take_transitions();
        let last = |ts: &[Transition], pred: &dyn Fn(NetId) -> bool, from: u64| {
            ts.iter().filter(|t| pred(t.net)).map(|t| t.time - from).max().unwrap_or(0)
        };
        let is_out = |n: NetId| self.is_output[n.index()];
        let ack = self.ack_out;
        let is_out_or_ack = |n: NetId| self.is_output[n.index()] || Some(n) == ack;
        let (data, spacer) = transitions.split_at(spacer_index);
        let fl = last(data, &is_out, 0);
        let rl = last(spacer, &is_out, spacer_applied);
        let fl_cd = last(data, &is_out_or_ack, 0);
        let rl_cd = last(spacer, &is_out_or_ack, spacer_applied);
        let ct = fl + rl;
        debug_assert_eq!(ct, fl + rl);
        Ok(HandshakeTrace {
            protocol,
            inputs: values.to_vec(),
            outputs,
            transitions,
            spacer_index,
            marks: PhaseMarks { data_applied: 0, data_settled, spacer_applied, spacer_settled },
            fl,
            rl,
            ct,
            fl_cd,
            rl_cd,
        })
    }

    pub fn run_vector(&mut self, v: &Vector) -> Result<HandshakeTrace, SimError> {
        self.run_cycle(&v.port_values())
    }
}

/// One cycle of a generated adder (ports `a`, `b`, `cin`) from a fresh simulator.
pub fn run_cycle(nl: &Netlist, a: u64, b: u64, cin: bool, delay: &DelayModel) -> Result<HandshakeTrace, SimError> {
    Simulator::new(nl, delay)?.run_cycle(&[a, b, cin as u64])
}

/// Min / max / mean / population variance of a series.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Default, Clone)]
struct Accumulator {
    n: u64,
    min: u64,
    max: u64,
    sum: u128,
    sum_sq: u128,
}

impl Accumulator {
    fn push(&mut self, x: u64) {
        if self.n == 0 {
            self.min = x;
            self.max = x;
        }
        self.min = self.min.min(x);
        self.max = self.max.max(x);
        self.n += 1;
        self.sum += x as u128;
        self.sum_sq += (x as u128) * (x as u128);
    }

    fn summary(&self) -> Summary {
        if self.n == 0 {
            return Summary::default();
        }
        let n = self.n as f64;
        let mean = self.sum as f64 / n;
        // Exact integer numerator keeps zero variance exactly zero.
        let num = self.n as u128 * self.sum_sq - self.sum * self.sum;
        Summary { min: self.min, max: self.max, mean, variance: num as f64 / (n * n) }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SequenceStats {
    pub cycles: usize,
    pub fl: Summary,
    pub rl: Summary,
    pub ct: Summary,
    pub transitions: u64,
}

#[derive(Debug, Default, Clone)]
pub struct StatsBuilder {
    cycles: usize,
    fl: Accumulator,
    rl: Accumulator,
    ct: Accumulator,
    transitions: u64,
}

impl StatsBuilder {
    pub fn push(&mut self, t: &HandshakeTrace) {
        self.cycles += 1;
        self.fl.push(t.fl);
        self.rl.push(t.rl);
        self.ct.push(t.ct);
        self.transitions += t.transitions.len() as u64;
    }

    pub fn finish(&self) -> SequenceStats {
        SequenceStats {
            cycles: self.cycles,
            fl: self.fl.summary(),
            rl: self.rl.summary(),
            ct: self.ct.summary(),
            transitions: self.transitions,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SequenceResult {
    pub traces: Vec<HandshakeTrace>,
    pub stats: SequenceStats,
}

pub fn run_sequence(nl: &Netlist, vectors: &[Vector], delay: &DelayModel) -> Result<SequenceResult, SimError> {
    let mut traces = Vec::with_capacity(vectors.len());
    let stats = run_sequence_streaming(nl, vectors, delay, |_, t| traces.push(t))?;
    Ok(SequenceResult { traces, stats })
}

/// Like [`run_sequence`] but hands each trace to `visit` instead of keeping it.
pub fn run_sequence_streaming(
    nl: &Netlist,
    vectors: &[Vector],
    delay: &DelayModel,
    mut visit: impl FnMut(usize, HandshakeTrace),
) -> Result<SequenceStats, SimError> {
    let mut stats = StatsBuilder::default();
    if vectors.is_empty() {
        return Ok(stats.finish());
    }
    let mut sim = Simulator::new(nl, delay)?;
    for (i, v) in vectors.iter().enumerate() {
        let t = sim.run_vector(v)?;
        stats.push(&t);
        visit(i, t);
    }
    Ok(stats.finish())
}

/// One JSON object per trace per line.
pub fn write_jsonl<W: Write>(mut w: W, traces: &[HandshakeTrace]) -> io::Result<()> {
    for t in traces {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn vcd_id(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'!' + (i % 94) as u8) as char);
        i /= 94;
        if i == 0 {
            return s;
        }
    }
}

/// Value-change dump of one trace. Every net is a 1-bit wire named after it.
pub fn write_vcd<W: Write>(mut w: W, nl: &Netlist, trace: &HandshakeTrace, initial: &[bool]) -> io::Result<()> {
    writeln!(w, "$timescale 1ns $end")?;
    writeln!(w, "$scope module top $end")?;
    for (i, name) in nl.net_names().iter().enumerate() {
        writeln!(w, "$var wire 1 {} {} $end", vcd_id(i), name.replace(' ', "_"))?;
    }
    writeln!(w, "$upscope $end")?;
    writeln!(w, "$enddefinitions $end")?;
    writeln!(w, "#0")?;
    writeln!(w, "$dumpvars")?;
    for (i, &v) in initial.iter().enumerate() {
        writeln!(w, "{}{}", v as u8, vcd_id(i))?;
    }
    writeln!(w, "$end")?;
    let mut time = 0;
    for t in &trace.transitions {
        if t.time != time {
            time = t.time;
            writeln!(w, "#{time}")?;
        }
        writeln!(w, "{}{}", t.rising as u8, vcd_id(t.net.index()))?;
    }
    Ok(())
}
