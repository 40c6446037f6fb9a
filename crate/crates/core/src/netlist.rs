//! Typed gate-level netlists.
//!
//! Every generator emits a [`Netlist`] and every simulator and checker
//! consumes one. Gates are positive-unate AND/OR (plus NOT for hand-built
//! fixtures) and Muller C-elements. Nets have exactly one driver: a gate, a
//! primary input, or a constant tie. Because `add_gate` only accepts nets
//! that already exist, netlists built through the API are acyclic and their
//! gate order is a topological order. Netlists loaded from JSON are checked
//! by [`Netlist::validate`].
//!
//! Rail order is fixed: bit `i` of port `X` is the pair `(Xi.1, Xi.0)`,
//! LSB first.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::Protocol;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("{kind} takes {expected} inputs, got {got}")]
    ArityMismatch { kind: GateKind, expected: usize, got: usize },
    #[error("unknown net {0}")]
    UnknownNet(NetId),
    #[error("netlist failed validation with {0} finding(s)")]
    InvalidNetlist(usize),
    #[error("malformed netlist JSON: {0}")]
    Json(String),
    #[error("unsupported netlist format `{0}`")]
    Format(String),
}

/// Gate alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Not,
    And2,
    And3,
    And4,
    Or2,
    Or3,
    Or4,
    /// Two-input Muller C-element.
    C2,
    /// Three-input Muller C-element.
    C3,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::Not,
        GateKind::And2,
        GateKind::And3,
        GateKind::And4,
        GateKind::Or2,
        GateKind::Or3,
        GateKind::Or4,
        GateKind::C2,
        GateKind::C3,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            GateKind::And2 | GateKind::Or2 | GateKind::C2 => 2,
            GateKind::And3 | GateKind::Or3 | GateKind::C3 => 3,
            GateKind::And4 | GateKind::Or4 => 4,
        }
    }

    /// C-elements hold state; everything else is a pure function of its inputs.
    pub fn is_stateful(self) -> bool {
        matches!(self, GateKind::C2 | GateKind::C3)
    }

    pub fn and(arity: usize) -> Option<GateKind> {
        match arity {
            2 => Some(GateKind::And2),
            3 => Some(GateKind::And3),
            4 => Some(GateKind::And4),
            _ => None,
        }
    }

    pub fn or(arity: usize) -> Option<GateKind> {
        match arity {
            2 => Some(GateKind::Or2),
            3 => Some(GateKind::Or3),
            4 => Some(GateKind::Or4),
            _ => None,
        }
    }

    pub fn c_element(arity: usize) -> Option<GateKind> {
        match arity {
            2 => Some(GateKind::C2),
            3 => Some(GateKind::C3),
            _ => None,
        }
    }

    /// De Morgan dual: AND and OR swap at equal arity, NOT and C-elements are self-dual.
    pub fn dual(self) -> GateKind {
        match self {
            GateKind::And2 => GateKind::Or2,
            GateKind::And3 => GateKind::Or3,
            GateKind::And4 => GateKind::Or4,
            GateKind::Or2 => GateKind::And2,
            GateKind::Or3 => GateKind::And3,
            GateKind::Or4 => GateKind::And4,
            other => other,
        }
    }

    /// Output for the given inputs. `prev` is the held output of a C-element.
    pub fn eval(self, inputs: impl IntoIterator<Item = bool>, prev: bool) -> bool {
        let mut it = inputs.into_iter();
        match self {
            GateKind::Not => !it.next().unwrap_or(false),
            GateKind::And2 | GateKind::And3 | GateKind::And4 => it.all(|v| v),
            GateKind::Or2 | GateKind::Or3 | GateKind::Or4 => it.any(|v| v),
            GateKind::C2 | GateKind::C3 => {
                let (mut ones, mut zeros) = (false, false);
                for v in it {
                    if v {
                        ones = true;
                    } else {
                        zeros = true;
                    }
                }
                match (ones, zeros) {
                    (true, false) => true,
                    (false, true) => false,
                    _ => prev,
                }
            }
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::Not => "NOT",
            GateKind::And2 => "AND2",
            GateKind::And3 => "AND3",
            GateKind::And4 => "AND4",
            GateKind::Or2 => "OR2",
            GateKind::Or3 => "OR3",
            GateKind::Or4 => "OR4",
            GateKind::C2 => "C2",
            GateKind::C3 => "C3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NetId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateId(pub u32);

impl NetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl GateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// The two rails carrying one dual-rail bit. Serialized as `[rail1, rail0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[NetId; 2]", into = "[NetId; 2]")]
pub struct NetPair {
    pub rail1: NetId,
    pub rail0: NetId,
}

impl NetPair {
    pub fn new(rail1: NetId, rail0: NetId) -> Self {
        Self { rail1, rail0 }
    }

    pub fn rails(self) -> [NetId; 2] {
        [self.rail1, self.rail0]
    }
}

impl From<[NetId; 2]> for NetPair {
    fn from([rail1, rail0]: [NetId; 2]) -> Self {
        Self { rail1, rail0 }
    }
}

impl From<NetPair> for [NetId; 2] {
    fn from(p: NetPair) -> Self {
        [p.rail1, p.rail0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<NetId>,
    pub output: NetId,
    pub name: String,
}

/// A named dual-rail bus, LSB first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub name: String,
    pub pairs: Vec<NetPair>,
}

impl Port {
    pub fn width(&self) -> usize {
        self.pairs.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tie {
    pub net: NetId,
    #[serde(with = "bit")]
    pub value: bool,
}

/// Output of a completion detector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ack {
    pub name: String,
    pub net: NetId,
}

/// Bookkeeping record of a sub-block placed by a generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub kind: String,
    pub name: String,
    pub width: u32,
}

mod bit {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*v as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!("expected 0 or 1, got {other}"))),
        }
    }
}

/// Who drives a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Gate(GateId),
    Input,
    Tie(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    protocol: Protocol,
    nets: Vec<String>,
    gates: Vec<Gate>,
    inputs: Vec<Port>,
    outputs: Vec<Port>,
    ties: Vec<Tie>,
    acks: Vec<Ack>,
    instances: Vec<Instance>,
    scope: Vec<String>,
}

impl Netlist {
    pub fn new(protocol: Protocol) -> Self {
        Self {
            protocol,
            nets: Vec::new(),
            gates: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            ties: Vec::new(),
            acks: Vec::new(),
            instances: Vec::new(),
            scope: Vec::new(),
        }
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    pub fn net_count(&self) -> usize {
        self.nets.len()
    }

    pub fn net_name(&self, net: NetId) -> &str {
        &self.nets[net.index()]
    }

    pub fn net_names(&self) -> &[String] {
        &self.nets
    }

    pub fn net_by_name(&self, name: &str) -> Option<NetId> {
        self.nets.iter().position(|n| n == name).map(|i| NetId(i as u32))
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id.index()]
    }

    pub fn inputs(&self) -> &[Port] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Port] {
        &self.outputs
    }

    pub fn input(&self, name: &str) -> Option<&Port> {
        self.inputs.iter().find(|p| p.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&Port> {
        self.outputs.iter().find(|p| p.name == name)
    }

    pub fn ties(&self) -> &[Tie] {
        &self.ties
    }

    pub fn acks(&self) -> &[Ack] {
        &self.acks
    }

    pub fn ack(&self, name: &str) -> Option<NetId> {
        self.acks.iter().find(|a| a.name == name).map(|a| a.net)
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    /// Number of placed instances of the given kind.
    pub fn instance_count(&self, kind: &str) -> usize {
        self.instances.iter().filter(|i| i.kind == kind).count()
    }

    fn scoped_name(&self, leaf: &str) -> String {
        if self.scope.is_empty() {
            leaf.to_string()
        } else {
            format!("{}/{}", self.scope.join("/"), leaf)
        }
    }

    /// Runs `f` with `name` pushed onto the naming scope of new gates.
    pub fn scoped<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        self.scope.push(name.to_string());
        let out = f(self);
        self.scope.pop();
        out
    }

    /// A fresh undriven net.
    pub fn add_net(&mut self, name: impl Into<String>) -> NetId {
        let id = NetId(self.nets.len() as u32);
        self.nets.push(name.into());
        id
    }

    /// Declares an input bus of `width` rail pairs named `name{i}.1` / `name{i}.0`.
    pub fn add_input(&mut self, name: &str, width: usize) -> Vec<NetPair> {
        let pairs: Vec<NetPair> = (0..width)
            .map(|i| {
                let r1 = self.add_net(format!("{name}{i}.1"));
                let r0 = self.add_net(format!("{name}{i}.0"));
                NetPair::new(r1, r0)
            })
            .collect();
        self.inputs.push(Port { name: name.to_string(), pairs: pairs.clone() });
        pairs
    }

    pub fn add_output(&mut self, name: &str, pairs: Vec<NetPair>) {
        self.outputs.push(Port { name: name.to_string(), pairs });
    }

    pub fn add_ack(&mut self, name: &str, net: NetId) {
        self.acks.push(Ack { name: name.to_string(), net });
    }

    pub fn add_instance(&mut self, kind: &str, width: u32) {
        let name = self.scoped_name(kind);
        self.instances.push(Instance { kind: kind.to_string(), name, width });
    }

    /// Constant rail. One net per level is shared by every tie-off.
    pub fn tie(&mut self, value: bool) -> NetId {
        if let Some(t) = self.ties.iter().find(|t| t.value == value) {
            return t.net;
        }
        let net = self.add_net(if value { "tie1" } else { "tie0" });
        self.ties.push(Tie { net, value });
        net
    }

    /// Constant dual-rail data bit under this netlist's protocol.
    pub fn tie_data(&mut self, bit: bool) -> NetPair {
        let pair = crate::encoding::encode_bit(bit, self.protocol);
        NetPair::new(self.tie(pair.rail1), self.tie(pair.rail0))
    }

    pub fn add_gate(&mut self, kind: GateKind, inputs: &[NetId]) -> Result<(GateId, NetId), NetlistError> {
        if inputs.len() != kind.arity() {
            return Err(NetlistError::ArityMismatch { kind, expected: kind.arity(), got: inputs.len() });
        }
        if let Some(&bad) = inputs.iter().find(|n| n.index() >= self.nets.len()) {
            return Err(NetlistError::UnknownNet(bad));
        }
        let id = GateId(self.gates.len() as u32);
        let name = self.scoped_name(&format!("g{}", id.0));
        let output = self.add_net(name.clone());
        self.gates.push(Gate { kind, inputs: inputs.to_vec(), output, name });
        Ok((id, output))
    }

    /// `add_gate` for generator code whose arity is correct by construction.
    pub(crate) fn push_gate(&mut self, kind: GateKind, inputs: &[NetId]) -> NetId {
        self.add_gate(kind, inputs).expect("generator produced a malformed gate").1
    }

    /// Gives the most recently created net a readable scoped name.
    pub(crate) fn label(&mut self, net: NetId, leaf: &str) -> NetId {
        let name = self.scoped_name(leaf);
        self.nets[net.index()] = name.clone();
        if let Some(g) = self.gates.iter_mut().rev().find(|g| g.output == net) {
            g.name = name;
        }
        net
    }

    /// Gate-for-gate De Morgan dual with complemented ties and flipped
    /// protocol. Ids and names are kept.
    pub(crate) fn map_dual(&self) -> Netlist {
        let mut out = self.clone();
        out.protocol = self.protocol.dual();
        for g in &mut out.gates {
            g.kind = g.kind.dual();
        }
        for t in &mut out.ties {
            t.value = !t.value;
            out.nets[t.net.index()] = if t.value { "tie1" } else { "tie0" }.to_string();
        }
        out
    }

    /// Driver of every net; `None` when undriven. Later drivers of a
    /// multiply-driven net are reported by `validate`, not here.
    pub fn drivers(&self) -> Vec<Option<Driver>> {
        let mut d = vec![None; self.nets.len()];
        for p in &self.inputs {
            for pair in &p.pairs {
                for r in pair.rails() {
                    if let Some(slot) = d.get_mut(r.index()) {
                        slot.get_or_insert(Driver::Input);
                    }
                }
            }
        }
        for t in &self.ties {
            if let Some(slot) = d.get_mut(t.net.index()) {
                slot.get_or_insert(Driver::Tie(t.value));
            }
        }
        for (i, g) in self.gates.iter().enumerate() {
            if let Some(slot) = d.get_mut(g.output.index()) {
                slot.get_or_insert(Driver::Gate(GateId(i as u32)));
            }
        }
        d
    }

    /// Gate fanout of every net as (gate, pin).
    pub fn fanout(&self) -> Vec<Vec<(GateId, usize)>> {
        let mut f = vec![Vec::new(); self.nets.len()];
        for (i, g) in self.gates.iter().enumerate() {
            for (pin, n) in g.inputs.iter().enumerate() {
                if let Some(slot) = f.get_mut(n.index()) {
                    slot.push((GateId(i as u32), pin));
                }
            }
        }
        f
    }

    pub fn input_nets(&self) -> impl Iterator<Item = NetId> + '_ {
        self.inputs.iter().flat_map(|p| p.pairs.iter().flat_map(|q| q.rails()))
    }

    pub fn output_nets(&self) -> impl Iterator<Item = NetId> + '_ {
        self.outputs.iter().flat_map(|p| p.pairs.iter().flat_map(|q| q.rails()))
    }

    /// Gates in topological order, or the gates left over when a cycle blocks the sort.
    pub fn topo_order(&self) -> Result<Vec<GateId>, Vec<GateId>> {
        let drivers = self.drivers();
        let fanout = self.fanout();
        let mut pending: Vec<usize> = self
            .gates
            .iter()
            .map(|g| {
                g.inputs
                    .iter()
                    .filter(|n| matches!(drivers.get(n.index()), Some(Some(Driver::Gate(_)))))
                    .count()
            })
            .collect();
        let mut ready: VecDeque<GateId> = pending
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(i, _)| GateId(i as u32))
            .collect();
        let mut order = Vec::with_capacity(self.gates.len());
        while let Some(g) = ready.pop_front() {
            order.push(g);
            let out = self.gates[g.index()].output;
            if drivers[out.index()] != Some(Driver::Gate(g)) {
                continue;
            }
            for &(succ, _) in &fanout[out.index()] {
                pending[succ.index()] -= 1;
                if pending[succ.index()] == 0 {
                    ready.push_back(succ);
                }
            }
        }
        if order.len() == self.gates.len() {
            Ok(order)
        } else {
            Err((0..self.gates.len())
                .filter(|&i| pending[i] > 0)
                .map(|i| GateId(i as u32))
                .collect())
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut findings = Vec::new();
        let n = self.nets.len();
        let known = |net: NetId| net.index() < n;

        for (i, g) in self.gates.iter().enumerate() {
            let gid = GateId(i as u32);
            if g.inputs.len() != g.kind.arity() {
                findings.push(Finding::ArityMismatch { gate: gid });
            }
            if let Some(&bad) = g.inputs.iter().chain(std::iter::once(&g.output)).find(|&&x| !known(x)) {
                findings.push(Finding::UnknownNet { net: bad });
            }
        }
        let io_unknown = self
            .input_nets()
            .chain(self.output_nets())
            .chain(self.ties.iter().map(|t| t.net))
            .chain(self.acks.iter().map(|a| a.net))
            .filter(|&x| !known(x))
            .collect::<Vec<_>>();
        for net in io_unknown {
            findings.push(Finding::UnknownNet { net });
        }
        if !findings.is_empty() {
            return ValidationReport { findings };
        }

        // Drivers and rail pairing.
        let mut driver_count = vec![0usize; n];
        for net in self.input_nets() {
            driver_count[net.index()] += 1;
        }
        for t in &self.ties {
            driver_count[t.net.index()] += 1;
        }
        for g in &self.gates {
            driver_count[g.output.index()] += 1;
        }
        for (i, &c) in driver_count.iter().enumerate() {
            if c > 1 {
                findings.push(Finding::MultipleDrivers { net: NetId(i as u32) });
            }
        }
        // A net may sit in one input slot and one output slot (feed-through),
        // never in two slots on the same side.
        for (side, ports) in [("input", &self.inputs), ("output", &self.outputs)] {
            let mut slots: HashMap<NetId, usize> = HashMap::new();
            for port in ports {
                for pair in &port.pairs {
                    if pair.rail1 == pair.rail0 {
                        findings.push(Finding::RailPairing {
                            net: pair.rail1,
                            detail: format!("port `{}` pairs a net with itself", port.name),
                        });
                    }
                    for r in pair.rails() {
                        *slots.entry(r).or_default() += 1;
                    }
                }
            }
            let mut shared: Vec<_> = slots.into_iter().filter(|&(_, c)| c > 1).map(|(r, _)| r).collect();
            shared.sort();
            for net in shared {
                findings.push(Finding::RailPairing {
                    net,
                    detail: format!("net appears in more than one {side} rail"),
                });
            }
        }

        let fanout = self.fanout();
        let is_output: Vec<bool> = {
            let mut v = vec![false; n];
            for net in self.output_nets() {
                v[net.index()] = true;
            }
            v
        };
        for net in self.input_nets() {
            if fanout[net.index()].is_empty() && !is_output[net.index()] {
                findings.push(Finding::DanglingIo { net });
            }
        }
        for net in self.output_nets() {
            if driver_count[net.index()] == 0 {
                findings.push(Finding::DanglingIo { net });
            }
        }
        for (i, g) in self.gates.iter().enumerate() {
            for &x in &g.inputs {
                if driver_count[x.index()] == 0 {
                    findings.push(Finding::UndrivenNet { net: x, gate: GateId(i as u32) });
                }
            }
        }

        let order = match self.topo_order() {
            Ok(o) => o,
            Err(stuck) => {
                findings.extend(stuck.into_iter().map(|gate| Finding::Cycle { gate }));
                return ValidationReport { findings };
            }
        };

        // Forward reachability from primary inputs.
        let mut from_input = vec![false; n];
        for net in self.input_nets() {
            from_input[net.index()] = true;
        }
        for &g in &order {
            let gate = &self.gates[g.index()];
            if gate.inputs.iter().any(|x| from_input[x.index()]) {
                from_input[gate.output.index()] = true;
            } else {
                findings.push(Finding::Unreachable { gate: g });
            }
        }
        // Backward reachability to outputs and detector acks.
        let mut to_sink = is_output.clone();
        for a in &self.acks {
            to_sink[a.net.index()] = true;
        }
        for &g in order.iter().rev() {
            let gate = &self.gates[g.index()];
            if to_sink[gate.output.index()] {
                for &x in &gate.inputs {
                    to_sink[x.index()] = true;
                }
            }
        }
        for &g in &order {
            if !to_sink[self.gates[g.index()].output.index()] {
                findings.push(Finding::DeadEnd { gate: g });
            }
        }
        ValidationReport { findings }
    }

    /// Gate census. Gates that cannot reach a primary output are counted as
    /// completion-detector gates.
    pub fn stats(&self) -> Result<GateCensus, NetlistError> {
        let report = self.validate();
        if !report.is_clean() {
            return Err(NetlistError::InvalidNetlist(report.findings.len()));
        }
        let order = self.topo_order().expect("validated netlist is acyclic");
        let n = self.nets.len();
        let mut reaches_output = vec![false; n];
        for net in self.output_nets() {
            reaches_output[net.index()] = true;
        }
        for &g in order.iter().rev() {
            let gate = &self.gates[g.index()];
            if reaches_output[gate.output.index()] {
                for &x in &gate.inputs {
                    reaches_output[x.index()] = true;
                }
            }
        }
        // Depth: longest input-to-output path counted in gates.
        let mut level: Vec<Option<usize>> = vec![None; n];
        for net in self.input_nets() {
            level[net.index()] = Some(0);
        }
        let mut census = GateCensus { nets: n, ..GateCensus::default() };
        for &g in &order {
            let gate = &self.gates[g.index()];
            let depth = gate.inputs.iter().filter_map(|x| level[x.index()]).max().map(|d| d + 1);
            level[gate.output.index()] = depth;
            let bucket = if reaches_output[gate.output.index()] {
                &mut census.datapath
            } else {
                &mut census.detector
            };
            *bucket.entry(gate.kind).or_default() += 1;
        }
        census.depth = self.output_nets().filter_map(|x| level[x.index()]).max().unwrap_or(0);
        Ok(census)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&NetlistDoc::from(self)).expect("netlist serializes")
    }

    pub fn from_json(text: &str) -> Result<Netlist, NetlistError> {
        let doc: NetlistDoc = serde_json::from_str(text).map_err(|e| NetlistError::Json(e.to_string()))?;
        doc.try_into()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    /// Declared input rail with no fanout, or declared output rail with no driver.
    DanglingIo { net: NetId },
    UndrivenNet { net: NetId, gate: GateId },
    MultipleDrivers { net: NetId },
    UnknownNet { net: NetId },
    ArityMismatch { gate: GateId },
    Cycle { gate: GateId },
    /// Gate not reachable from any primary input.
    Unreachable { gate: GateId },
    /// Gate whose output reaches neither a primary output nor a detector ack.
    DeadEnd { gate: GateId },
    RailPairing { net: NetId, detail: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    /// No finding that prevents simulation: every net has one known driver,
    /// arities hold and the graph is acyclic. Dead ends, unreachable gates
    /// and dangling ports are tolerated.
    pub fn is_simulatable(&self) -> bool {
        self.findings.iter().all(|f| {
            matches!(
                f,
                Finding::DanglingIo { .. } | Finding::Unreachable { .. } | Finding::DeadEnd { .. } | Finding::RailPairing { .. }
            )
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GateCensus {
    /// Gates on some path to a primary output.
    pub datapath: BTreeMap<GateKind, usize>,
    /// Completion-detector gates (reach only ack nets).
    pub detector: BTreeMap<GateKind, usize>,
    pub nets: usize,
    /// Longest primary-input to primary-output path, in gates.
    pub depth: usize,
}

impl GateCensus {
    pub fn total(&self) -> BTreeMap<GateKind, usize> {
        let mut t = self.datapath.clone();
        for (&k, &c) in &self.detector {
            *t.entry(k).or_default() += c;
        }
        t
    }

    pub fn gate_count(&self) -> usize {
        self.datapath.values().chain(self.detector.values()).sum()
    }
}

const FORMAT: &str = "qdilab-netlist/1";

#[derive(Serialize, Deserialize)]
struct GateDoc {
    id: u32,
    kind: GateKind,
    inputs: Vec<NetId>,
    output: NetId,
    name: String,
}

#[derive(Serialize, Deserialize)]
struct NetlistDoc {
    format: String,
    protocol: Protocol,
    nets: Vec<String>,
    inputs: Vec<Port>,
    outputs: Vec<Port>,
    #[serde(default)]
    ties: Vec<Tie>,
    #[serde(default)]
    acks: Vec<Ack>,
    #[serde(default)]
    instances: Vec<Instance>,
    gates: Vec<GateDoc>,
}

impl From<&Netlist> for NetlistDoc {
    fn from(nl: &Netlist) -> Self {
        NetlistDoc {
            format: FORMAT.to_string(),
            protocol: nl.protocol,
            nets: nl.nets.clone(),
            inputs: nl.inputs.clone(),
            outputs: nl.outputs.clone(),
            ties: nl.ties.clone(),
            acks: nl.acks.clone(),
            instances: nl.instances.clone(),
            gates: nl
                .gates
                .iter()
                .enumerate()
                .map(|(i, g)| GateDoc {
                    id: i as u32,
                    kind: g.kind,
                    inputs: g.inputs.clone(),
                    output: g.output,
                    name: g.name.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<NetlistDoc> for Netlist {
    type Error = NetlistError;

    fn try_from(doc: NetlistDoc) -> Result<Self, Self::Error> {
        if doc.format != FORMAT {
            return Err(NetlistError::Format(doc.format));
        }
        let mut gates = Vec::with_capacity(doc.gates.len());
        for (i, g) in doc.gates.into_iter().enumerate() {
            if g.id as usize != i {
                return Err(NetlistError::Json(format!("gate ids must be dense and ordered; found {} at {}", g.id, i)));
            }
            gates.push(Gate { kind: g.kind, inputs: g.inputs, output: g.output, name: g.name });
        }
        Ok(Netlist {
            protocol: doc.protocol,
            nets: doc.nets,
            gates,
            inputs: doc.inputs,
            outputs: doc.outputs,
            ties: doc.ties,
            acks: doc.acks,
            instances: doc.instances,
            scope: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_is_enforced() {
        let mut nl = Netlist::new(Protocol::Rtz);
        let a = nl.add_input("a", 1)[0];
        let b = nl.add_input("b", 1)[0];
        let (_, out) = nl.add_gate(GateKind::C2, &[a.rail1, b.rail1]).unwrap();
        assert_eq!(nl.gate(GateId(0)).inputs.len(), 2);
        assert_eq!(nl.gate(GateId(0)).output, out);
        assert_eq!(
            nl.add_gate(GateKind::Or4, &[a.rail1, a.rail0, b.rail1]),
            Err(NetlistError::ArityMismatch { kind: GateKind::Or4, expected: 4, got: 3 })
        );
        assert_eq!(nl.add_gate(GateKind::Not, &[NetId(99)]), Err(NetlistError::UnknownNet(NetId(99))));
    }

    #[test]
    fn empty_netlist_reports_every_declared_rail() {
        let mut nl = Netlist::new(Protocol::Rtz);
        nl.add_input("a", 2);
        let z1 = nl.add_net("z0.1");
        let z0 = nl.add_net("z0.0");
        nl.add_output("z", vec![NetPair::new(z1, z0)]);
        let report = nl.validate();
        assert_eq!(report.findings.len(), 6);
        assert!(report.findings.iter().all(|f| matches!(f, Finding::DanglingIo { .. })));
    }

    #[test]
    fn undriven_output_rail_is_one_finding() {
        let mut nl = Netlist::new(Protocol::Rtz);
        let x = nl.add_input("x", 1)[0];
        let y1 = nl.push_gate(GateKind::Or2, &[x.rail1, x.rail0]);
        let y0 = nl.add_net("y0.0");
        nl.add_output("y", vec![NetPair::new(y1, y0)]);
        let report = nl.validate();
        assert_eq!(report.findings, vec![Finding::DanglingIo { net: y0 }]);
    }

    #[test]
    fn single_not_census() {
        let mut nl = Netlist::new(Protocol::Rtz);
        let x = nl.add_input("x", 1)[0];
        let y1 = nl.push_gate(GateKind::Not, &[x.rail1]);
        nl.add_output("y", vec![NetPair::new(y1, x.rail0)]);
        let c = nl.stats().unwrap();
        assert_eq!(c.datapath, BTreeMap::from([(GateKind::Not, 1)]));
        assert!(c.detector.is_empty());
        assert_eq!(c.depth, 1);
    }

    #[test]
    fn cycles_and_multiple_drivers_from_json_are_reported() {
        let text = r#"{
            "format": "qdilab-netlist/1", "protocol": "rtz",
            "nets": ["x0.1","x0.0","p","q"],
            "inputs": [{"name":"x","pairs":[[0,1]]}],
            "outputs": [{"name":"y","pairs":[[2,3]]}],
            "gates": [
                {"id":0,"kind":"OR2","inputs":[0,3],"output":2,"name":"p"},
                {"id":1,"kind":"OR2","inputs":[1,2],"output":3,"name":"q"},
                {"id":2,"kind":"AND2","inputs":[0,1],"output":3,"name":"q2"}
            ]
        }"#;
        let nl = Netlist::from_json(text).unwrap();
        let report = nl.validate();
        assert!(report.findings.contains(&Finding::MultipleDrivers { net: NetId(3) }));
        let mut acyclic = text.replace(r#""inputs":[0,3]"#, r#""inputs":[0,1]"#);
        acyclic = acyclic.replace(r#",
                {"id":2,"kind":"AND2","inputs":[0,1],"output":3,"name":"q2"}"#, "");
        assert!(Netlist::from_json(&acyclic).unwrap().validate().is_clean());
        let cyclic = text.replace(r#",
                {"id":2,"kind":"AND2","inputs":[0,1],"output":3,"name":"q2"}"#, "");
        let report = Netlist::from_json(&cyclic).unwrap().validate();
        assert!(report.findings.iter().any(|f| matches!(f, Finding::Cycle { .. })));
    }

    #[test]
    fn json_rejects_unknown_format() {
        let text = r#"{"format":"other","protocol":"rtz","nets":[],"inputs":[],"outputs":[],"gates":[]}"#;
        assert_eq!(Netlist::from_json(text), Err(NetlistError::Format("other".into())));
    }

    #[test]
    fn c_element_holds_on_disagreement() {
        assert!(GateKind::C2.eval([true, true], false));
        assert!(GateKind::C2.eval([true, false], true));
        assert!(!GateKind::C2.eval([true, false], false));
        assert!(!GateKind::C3.eval([false, false, false], true));
    }
}
