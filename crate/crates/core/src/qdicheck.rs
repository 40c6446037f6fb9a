//! QDI safety checks and indication classification.
//!
//! Trace checks work on one [`HandshakeTrace`]: monotonicity per phase,
//! restoration of every net over the cycle, and observability of every
//! transition. A transition is observed when the structural fanout cone of
//! its net contains a primary output or detector ack that also transitions
//! in the same phase. The strict variant instead requires each transition
//! to be the cause of some later transition (or to be an output).

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{self, DualRailWord, PairClass, Protocol, RailPair};
use crate::logiclib::Indication;
use crate::netlist::{Driver, GateKind, NetId, NetPair, Netlist};
use crate::sim::{DelayModel, HandshakeTrace, Phase, SimError, Simulator, Transition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    Monotonicity,
    Orphan,
    DsopOverlap,
    IllegalCode,
    NonRestoring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Net names, cube indices or codeword indices.
    pub location: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<u64>,
    pub detail: String,
}

impl Violation {
    fn new(kind: ViolationKind, location: Vec<String>, time: Option<u64>, detail: impl Into<String>) -> Self {
        Self { kind, location, time, detail: detail.into() }
    }
}

fn phase_slices(trace: &HandshakeTrace) -> [(Phase, &[Transition]); 2] {
    [(Phase::Data, trace.phase(Phase::Data)), (Phase::Spacer, trace.phase(Phase::Spacer))]
}

/// Flags transitions in the wrong direction for their phase and nets that
/// switch more than once in a phase.
pub fn check_monotonic(trace: &HandshakeTrace, protocol: Protocol, names: Option<&Netlist>) -> Vec<Violation> {
    let name = |n: NetId| names.map_or_else(|| n.to_string(), |nl| nl.net_name(n).to_string());
    let mut out = Vec::new();
    for (phase, ts) in phase_slices(trace) {
        let want_rising = match phase {
            Phase::Data => protocol.active_level(),
            Phase::Spacer => protocol.spacer_level(),
        };
        let mut seen: HashMap<NetId, u32> = HashMap::new();
        for t in ts {
            if t.rising != want_rising {
                out.push(Violation::new(
                    ViolationKind::Monotonicity,
                    vec![name(t.net)],
                    Some(t.time),
                    format!("{} transition in the {phase} phase", if t.rising { "rising" } else { "falling" }),
                ));
            }
            let count = seen.entry(t.net).or_default();
            *count += 1;
            if *count == 2 {
                out.push(Violation::new(
                    ViolationKind::Monotonicity,
                    vec![name(t.net)],
                    Some(t.time),
                    format!("second transition in the {phase} phase"),
                ));
            }
        }
    }
    out
}

/// Nets that are observed through their fanout cone by a transitioning
/// primary output or ack in the given transition set.
fn observed(nl: &Netlist, switched: &HashSet<NetId>) -> Vec<bool> {
    let n = nl.net_count();
    let mut obs = vec![false; n];
    for net in nl.output_nets().chain(nl.acks().iter().map(|a| a.net)) {
        if switched.contains(&net) {
            obs[net.index()] = true;
        }
    }
    // Gates are appended after their inputs exist, but loaded netlists may
    // be in any order: use the topological order when there is one.
    let order: Vec<usize> = match nl.topo_order() {
        Ok(o) => o.into_iter().map(|g| g.index()).collect(),
        Err(_) => (0..nl.gates().len()).collect(),
    };
    for &g in order.iter().rev() {
        let gate = &nl.gates()[g];
        if obs[gate.output.index()] {
            for x in &gate.inputs {
                obs[x.index()] = true;
            }
        }
    }
    obs
}

/// Cycle-level restoration and orphan check.
pub fn check_round_trip(trace: &HandshakeTrace, nl: &Netlist) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut counts: HashMap<NetId, (u32, u64)> = HashMap::new();
    for t in &trace.transitions {
        let e = counts.entry(t.net).or_default();
        e.0 += 1;
        e.1 = t.time;
    }
    let mut odd: Vec<(NetId, u64)> = counts.iter().filter(|(_, c)| c.0 % 2 == 1).map(|(&n, c)| (n, c.1)).collect();
    odd.sort();
    for (net, time) in odd {
        out.push(Violation::new(
            ViolationKind::NonRestoring,
            vec![nl.net_name(net).to_string()],
            Some(time),
            "net does not return to its initial value by the end of the cycle",
        ));
    }
    for (phase, ts) in phase_slices(trace) {
        let switched: HashSet<NetId> = ts.iter().map(|t| t.net).collect();
        let obs = observed(nl, &switched);
        let mut reported = HashSet::new();
        for t in ts {
            if !obs[t.net.index()] && reported.insert(t.net) {
                out.push(Violation::new(
                    ViolationKind::Orphan,
                    vec![nl.net_name(t.net).to_string()],
                    Some(t.time),
                    format!("transition in the {phase} phase reaches no switching output or ack"),
                ));
            }
        }
    }
    out
}

/// Per-transition acknowledgment. Each gate-output transition is attributed
/// to the input that changed exactly one gate delay earlier (lowest pin on
/// ties). A transition that is neither an output/ack nor the attributed
/// cause of any transition is flagged. Overlapping covers such as the weak
/// majority carry are expected to be flagged here.
pub fn check_round_trip_strict(trace: &HandshakeTrace, nl: &Netlist, delay: &DelayModel) -> Vec<Violation> {
    let drivers = nl.drivers();
    let sinks: HashSet<NetId> = nl.output_nets().chain(nl.acks().iter().map(|a| a.net)).collect();
    let mut out = Vec::new();
    for (phase, ts) in phase_slices(trace) {
        let at: HashSet<(NetId, u64)> = ts.iter().map(|t| (t.net, t.time)).collect();
        let mut acked: HashSet<(NetId, u64)> = HashSet::new();
        for t in ts {
            let Some(Some(Driver::Gate(g))) = drivers.get(t.net.index()) else { continue };
            let gate = nl.gate(*g);
            let d = delay.delay(gate.kind);
            if let Some(cause) = t.time.checked_sub(d) {
                if let Some(&x) = gate.inputs.iter().find(|&&x| at.contains(&(x, cause))) {
                    acked.insert((x, cause));
                }
            }
        }
        for t in ts {
            if !sinks.contains(&t.net) && !acked.contains(&(t.net, t.time)) {
                out.push(Violation::new(
                    ViolationKind::Orphan,
                    vec![nl.net_name(t.net).to_string()],
                    Some(t.time),
                    format!("unacknowledged transition in the {phase} phase"),
                ));
            }
        }
    }
    out
}

/// Products over named literals. Literals in the same exclusive group can
/// never be active together (the two rails of a dual-rail input).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeList {
    pub literals: Vec<String>,
    #[serde(default)]
    pub exclusive: Vec<Vec<usize>>,
    pub cubes: Vec<Vec<usize>>,
}

impl CubeList {
    /// Builds a list from cubes written as literal names. Literals ending
    /// in `1` / `0` with a common stem form exclusive rail pairs.
    pub fn from_names(cubes: &[&[&str]]) -> Self {
        let mut literals: Vec<String> = Vec::new();
        let idx = |l: &str, lits: &mut Vec<String>| match lits.iter().position(|x| x == l) {
            Some(i) => i,
            None => {
                lits.push(l.to_string());
                lits.len() - 1
            }
        };
        let cubes: Vec<Vec<usize>> = cubes.iter().map(|c| c.iter().map(|l| idx(l, &mut literals)).collect()).collect();
        let mut exclusive = Vec::new();
        for (i, l) in literals.iter().enumerate() {
            if let Some(stem) = l.strip_suffix('1') {
                if let Some(j) = literals.iter().position(|m| m.strip_suffix('0') == Some(stem)) {
                    exclusive.push(vec![i, j]);
                }
            }
        }
        Self { literals, exclusive, cubes }
    }

    /// True when both cubes can be active under one assignment.
    pub fn overlaps(&self, i: usize, j: usize) -> bool {
        let union: BTreeSet<usize> = self.cubes[i].iter().chain(&self.cubes[j]).copied().collect();
        !self.exclusive.iter().any(|g| g.iter().filter(|l| union.contains(l)).count() >= 2)
    }

    fn render(&self, i: usize) -> String {
        self.cubes[i].iter().map(|&l| self.literals[l].as_str()).collect::<Vec<_>>().join("·")
    }
}

pub fn check_dsop(cubes: &CubeList) -> Vec<Violation> {
    let mut out = Vec::new();
    for i in 0..cubes.cubes.len() {
        for j in i + 1..cubes.cubes.len() {
            if cubes.overlaps(i, j) {
                out.push(Violation::new(
                    ViolationKind::DsopOverlap,
                    vec![format!("cube{i}"), format!("cube{j}")],
                    None,
                    format!("{} and {} can be active together", cubes.render(i), cubes.render(j)),
                ));
            }
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("net {0} is driven by a NOT gate; covers need positive logic")]
    NotUnate(String),
    #[error("cover of {0} exceeds {1} cubes")]
    TooLarge(String, usize),
    #[error("net {0} has no driver")]
    Undriven(String),
}

pub const MAX_CUBES: usize = 4096;

/// Sum-of-products of `net` over primary-input rails, in active-level
/// logic: OR under RTZ (AND under RTO) is a sum, the other gate and the
/// C-element set function are products. Constant rails simplify away, and
/// products that need both rails of one input pair are dropped.
pub fn extract_cover(nl: &Netlist, net: NetId) -> Result<CubeList, CoverError> {
    let drivers = nl.drivers();
    let mut literals: Vec<String> = Vec::new();
    let mut lit_of: HashMap<NetId, usize> = HashMap::new();
    let mut pair_of: HashMap<NetId, NetId> = HashMap::new();
    for port in nl.inputs() {
        for p in &port.pairs {
            pair_of.insert(p.rail1, p.rail0);
            pair_of.insert(p.rail0, p.rail1);
        }
    }
    let active = nl.protocol().active_level();
    let mut memo: HashMap<NetId, Vec<BTreeSet<NetId>>> = HashMap::new();

    fn expand(
        nl: &Netlist,
        net: NetId,
        drivers: &[Option<Driver>],
        pair_of: &HashMap<NetId, NetId>,
        active: bool,
        memo: &mut HashMap<NetId, Vec<BTreeSet<NetId>>>,
    ) -> Result<Vec<BTreeSet<NetId>>, CoverError> {
        if let Some(c) = memo.get(&net) {
            return Ok(c.clone());
        }
        let name = || nl.net_name(net).to_string();
        let cover = match drivers.get(net.index()).copied().flatten() {
            None => return Err(CoverError::Undriven(name())),
            Some(Driver::Input) => vec![BTreeSet::from([net])],
            Some(Driver::Tie(v)) if v == active => vec![BTreeSet::new()],
            Some(Driver::Tie(_)) => Vec::new(),
            Some(Driver::Gate(g)) => {
                let gate = nl.gate(g);
                let is_sum = match gate.kind {
                    GateKind::Not => return Err(CoverError::NotUnate(name())),
                    GateKind::C2 | GateKind::C3 => false,
                    GateKind::Or2 | GateKind::Or3 | GateKind::Or4 => active,
                    GateKind::And2 | GateKind::And3 | GateKind::And4 => !active,
                };
                let mut acc: Vec<BTreeSet<NetId>> = if is_sum { Vec::new() } else { vec![BTreeSet::new()] };
                for &x in &gate.inputs {
                    let sub = expand(nl, x, drivers, pair_of, active, memo)?;
                    if is_sum {
                        acc.extend(sub);
                    } else {
                        let mut next = Vec::new();
                        for a in &acc {
                            for b in &sub {
                                let cube: BTreeSet<NetId> = a.union(b).copied().collect();
                                if !cube.iter().any(|l| pair_of.get(l).is_some_and(|o| cube.contains(o))) {
                                    next.push(cube);
                                }
                            }
                        }
                        acc = next;
                    }
                    if acc.len() > MAX_CUBES {
                        return Err(CoverError::TooLarge(name(), MAX_CUBES));
                    }
                }
                acc
            }
        };
        memo.insert(net, cover.clone());
        Ok(cover)
    }

    let cover = expand(nl, net, &drivers, &pair_of, active, &mut memo)?;
    let cubes = cover
        .into_iter()
        .map(|cube| {
            cube.into_iter()
                .map(|l| {
                    *lit_of.entry(l).or_insert_with(|| {
                        literals.push(nl.net_name(l).to_string());
                        literals.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    let exclusive = lit_of
        .iter()
        .filter_map(|(n, &i)| pair_of.get(n).and_then(|o| lit_of.get(o)).filter(|&&j| i < j).map(|&j| vec![i, j]))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(CubeList { literals, exclusive, cubes })
}

/// Unordered-code check: no codeword's active rails may contain another's.
pub fn check_code(words: &[DualRailWord]) -> Vec<Violation> {
    let mut out = Vec::new();
    let Some(first) = words.first() else { return out };
    let active: Vec<Vec<bool>> = words.iter().map(DualRailWord::active_rails).collect();
    for (i, w) in words.iter().enumerate() {
        if w.width() != first.width() || w.protocol() != first.protocol() {
            out.push(Violation::new(
                ViolationKind::IllegalCode,
                vec![format!("word{i}")],
                None,
                "codeword width or protocol differs from word0",
            ));
            return out;
        }
    }
    for i in 0..words.len() {
        for j in 0..words.len() {
            if i != j && active[i] != active[j] && active[i].iter().zip(&active[j]).all(|(&x, &y)| !x || y) {
                out.push(Violation::new(
                    ViolationKind::IllegalCode,
                    vec![format!("word{i}"), format!("word{j}")],
                    None,
                    format!("active rails of word{j} contain those of word{i}"),
                ));
            }
        }
    }
    out
}

/// File form of a codeword set: rail values as `[rail1, rail0]` pairs, LSB first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSet {
    pub protocol: Protocol,
    pub words: Vec<Vec<[u8; 2]>>,
}

impl CodeSet {
    pub fn from_words(protocol: Protocol, words: &[DualRailWord]) -> Self {
        let words = words
            .iter()
            .map(|w| w.pairs().iter().map(|p| [p.rail1 as u8, p.rail0 as u8]).collect())
            .collect();
        Self { protocol, words }
    }

    pub fn to_words(&self) -> Vec<DualRailWord> {
        self.words
            .iter()
            .map(|w| DualRailWord::new(w.iter().map(|&[r1, r0]| RailPair::new(r1 != 0, r0 != 0)).collect(), self.protocol))
            .collect()
    }
}

/// Indication class from staggered-input experiments.
///
/// For every data assignment and every non-empty strict subset `S` of the
/// input pairs: drive `S` to data and settle, then the rest; drive `S` back
/// to the spacer and settle, then the rest. Early set and early reset both
/// count: a circuit is EARLY if some experiment completes every output
/// before the remaining inputs move, STRONG if no experiment moves any
/// output early, and WEAK otherwise.
pub fn classify_indication(nl: &Netlist, delay: &DelayModel) -> Result<Indication, SimError> {
    const EXHAUSTIVE_PAIRS: usize = 6;
    const SAMPLES: usize = 512;
    let pairs: Vec<NetPair> = nl.inputs().iter().flat_map(|p| p.pairs.iter().copied()).collect();
    let outs: Vec<NetPair> = nl.outputs().iter().flat_map(|p| p.pairs.iter().copied()).collect();
    let n = pairs.len();
    let protocol = nl.protocol();
    let mut sim = Simulator::new(nl, delay)?;

    let experiments: Vec<(u64, u64)> = if n <= EXHAUSTIVE_PAIRS {
        let full = (1u64 << n) - 1;
        (0..=full).flat_map(|data| (1..full).map(move |s| (data, s))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51ab);
        let mut idx: Vec<usize> = (0..n).collect();
        (0..SAMPLES)
            .map(|_| {
                idx.shuffle(&mut rng);
                let k = rng.gen_range(1..n);
                let s = idx[..k].iter().fold(0u64, |m, &i| m | 1 << i);
                let data = (0..n).fold(0u64, |m, i| m | (rng.gen::<bool>() as u64) << i);
                (data, s)
            })
            .collect()
    };

    let classes = |sim: &Simulator| -> Vec<PairClass> {
        outs.iter()
            .map(|p| encoding::classify_pair(RailPair { rail1: sim.value(p.rail1), rail0: sim.value(p.rail0) }, protocol))
            .collect()
    };
    let drive = |sim: &mut Simulator, mask: u64, data: Option<u64>| {
        let t = sim.now();
        for (i, p) in pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1) {
            let r = match data {
                Some(d) => encoding::encode_bit(d >> i & 1 == 1, protocol),
                None => encoding::spacer_pair(protocol),
            };
            sim.drive(p.rail1, r.rail1, t);
            sim.drive(p.rail0, r.rail0, t);
        }
    };

    let all = (1u64 << n) - 1;
    let (mut any_early, mut all_early) = (false, false);
    for (data, s) in experiments {
        sim.reset();
        drive(&mut sim, s, Some(data));
        sim.settle(Phase::Data)?;
        let set = classes(&sim);
        any_early |= set.iter().any(|c| c.is_data());
        all_early |= set.iter().all(|c| c.is_data());
        drive(&mut sim, all & !s, Some(data));
        sim.settle(Phase::Data)?;
        drive(&mut sim, s, None);
        sim.settle(Phase::Spacer)?;
        let reset = classes(&sim);
        any_early |= reset.contains(&PairClass::Spacer);
        all_early |= reset.iter().all(|&c| c == PairClass::Spacer);
        drive(&mut sim, all & !s, None);
        sim.settle(Phase::Spacer)?;
    }
    Ok(if all_early {
        Indication::Early
    } else if any_early {
        Indication::Weak
    } else {
        Indication::Strong
    })
}

/// Hand-built netlists that each checker must flag.
pub mod fixtures {
    use super::*;

    /// `h = x1·¬x1` glitches high for one unit when `x1` rises.
    pub fn glitch() -> Netlist {
        let mut nl = Netlist::new(Protocol::Rtz);
        let x = nl.add_input("x", 1)[0];
        let n = nl.push_gate(GateKind::Not, &[x.rail1]);
        let n = nl.label(n, "n");
        let h = nl.push_gate(GateKind::And2, &[x.rail1, n]);
        let h = nl.label(h, "h");
        let z1 = nl.push_gate(GateKind::Or2, &[x.rail1, h]);
        let z0 = nl.push_gate(GateKind::Or2, &[x.rail0, x.rail0]);
        nl.add_output("z", vec![NetPair::new(z1, z0)]);
        nl
    }

    /// An AND2 whose output goes nowhere.
    pub fn dead_end() -> Netlist {
        let mut nl = Netlist::new(Protocol::Rtz);
        let x = nl.add_input("x", 1)[0];
        let z1 = nl.push_gate(GateKind::Or2, &[x.rail1, x.rail1]);
        let z0 = nl.push_gate(GateKind::Or2, &[x.rail0, x.rail0]);
        let stub = nl.push_gate(GateKind::And2, &[x.rail1, x.rail1]);
        nl.label(stub, "stub");
        nl.add_output("z", vec![NetPair::new(z1, z0)]);
        nl
    }

    /// A C-element with one input tied high never resets.
    pub fn non_restoring() -> Netlist {
        let mut nl = Netlist::new(Protocol::Rtz);
        let x = nl.add_input("x", 1)[0];
        let one = nl.tie(true);
        let c = nl.push_gate(GateKind::C2, &[x.rail1, one]);
        let c = nl.label(c, "held");
        let h = nl.push_gate(GateKind::And2, &[c, x.rail1]);
        let z1 = nl.push_gate(GateKind::Or2, &[x.rail1, h]);
        let z0 = nl.push_gate(GateKind::Or2, &[x.rail0, x.rail0]);
        nl.add_output("z", vec![NetPair::new(z1, z0)]);
        nl
    }

    /// `{(1,0), (1,1)}`: the second word's active rails contain the first's.
    pub fn ordered_code() -> Vec<DualRailWord> {
        vec![
            DualRailWord::new(vec![RailPair { rail1: true, rail0: false }], Protocol::Rtz),
            DualRailWord::new(vec![RailPair { rail1: true, rail0: true }], Protocol::Rtz),
        ]
    }

    /// `{a1·b1, b1·cin1}` overlaps at `a = b = cin = 1`.
    pub fn overlapping_cover() -> CubeList {
        CubeList::from_names(&[&["a1", "b1"], &["b1", "cin1"]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logiclib;
    use crate::sim::Simulator;
    use proptest::prelude::*;

    fn one_cycle(nl: &Netlist, values: &[u64]) -> HandshakeTrace {
        Simulator::new(nl, &DelayModel::Unit).unwrap().run_cycle(values).unwrap()
    }

    #[test]
    fn glitch_is_non_monotonic() {
        let nl = fixtures::glitch();
        let t = one_cycle(&nl, &[1]);
        let v = check_monotonic(&t, Protocol::Rtz, Some(&nl));
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| x.kind == ViolationKind::Monotonicity));
    }

    #[test]
    fn dead_end_is_orphan() {
        let nl = fixtures::dead_end();
        let v = check_round_trip(&one_cycle(&nl, &[1]), &nl);
        assert_eq!(v.iter().filter(|x| x.kind == ViolationKind::Orphan).count(), 2);
        assert!(check_round_trip(&one_cycle(&nl, &[0]), &nl).is_empty());
    }

    #[test]
    fn held_c_element_is_non_restoring() {
        let nl = fixtures::non_restoring();
        let v = check_round_trip(&one_cycle(&nl, &[1]), &nl);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::NonRestoring);
    }

    #[test]
    fn weak_full_adder_round_trip() {
        let nl = logiclib::build_full_adder(Indication::Weak, Protocol::Rtz);
        let t = one_cycle(&nl, &[1, 1, 1]);
        assert!(check_round_trip(&t, &nl).is_empty());
        assert!(check_monotonic(&t, Protocol::Rtz, None).is_empty());
        let strict = check_round_trip_strict(&t, &nl, &DelayModel::Unit);
        assert!(strict.iter().any(|v| v.kind == ViolationKind::Orphan));
    }

    #[test]
    fn rto_data_phase_falls() {
        let nl = logiclib::build_full_adder(Indication::Early, Protocol::Rto);
        let t = one_cycle(&nl, &[1, 0, 1]);
        assert!(t.phase(Phase::Data).iter().all(|x| !x.rising));
        assert!(check_monotonic(&t, Protocol::Rto, None).is_empty());
    }

    #[test]
    fn dsop_examples() {
        assert_eq!(check_dsop(&fixtures::overlapping_cover()).len(), 1);
        let sum = CubeList {
            literals: ["p", "e", "cin0", "cin1"].map(String::from).to_vec(),
            exclusive: vec![vec![0, 1], vec![2, 3]],
            cubes: vec![vec![0, 2], vec![1, 3]],
        };
        assert!(check_dsop(&sum).is_empty());
        assert!(check_dsop(&CubeList::from_names(&[&["a1", "b1"]])).is_empty());
    }

    /// Brute force over assignments with at most one active literal per group.
    fn overlaps_oracle(c: &CubeList, i: usize, j: usize) -> bool {
        let n = c.literals.len();
        (0u32..1 << n).any(|m| {
            let on = |l: usize| m >> l & 1 == 1;
            c.exclusive.iter().all(|g| g.iter().filter(|&&l| on(l)).count() <= 1)
                && c.cubes[i].iter().chain(&c.cubes[j]).all(|&l| on(l))
        })
    }

    proptest! {
        #[test]
        fn dsop_matches_brute_force(cubes in prop::collection::vec(prop::collection::vec(0usize..6, 1..4), 1..6)) {
            let c = CubeList {
                literals: ["a1", "a0", "b1", "b0", "c1", "c0"].map(String::from).to_vec(),
                exclusive: vec![vec![0, 1], vec![2, 3], vec![4, 5]],
                cubes,
            };
            let expected: usize = (0..c.cubes.len())
                .flat_map(|i| (i + 1..c.cubes.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| overlaps_oracle(&c, i, j))
                .count();
            prop_assert_eq!(check_dsop(&c).len(), expected);
        }
    }

    fn output_covers(nl: &Netlist) -> Vec<CubeList> {
        nl.output_nets().map(|n| extract_cover(nl, n).unwrap()).collect()
    }

    #[test]
    fn early_blocks_are_dsop() {
        for p in Protocol::ALL {
            for nl in [
                logiclib::build_full_adder(Indication::Early, p),
                logiclib::build_dbfa(p),
                logiclib::build_mux2(p),
                logiclib::build_bclg(4, p, false).unwrap(),
            ] {
                for c in output_covers(&nl) {
                    assert!(check_dsop(&c).is_empty(), "{c:?}");
                }
            }
        }
    }

    #[test]
    fn early_sum_cover_is_the_four_minterms() {
        let nl = logiclib::build_full_adder(Indication::Early, Protocol::Rtz);
        let s1 = nl.output("sum").unwrap().pairs[0].rail1;
        let c = extract_cover(&nl, s1).unwrap();
        assert_eq!(c.cubes.len(), 4);
        assert!(c.cubes.iter().all(|k| k.len() == 3));
        assert_eq!(c.exclusive.len(), 3);
    }

    #[test]
    fn weak_majority_cover_overlaps() {
        let nl = logiclib::build_full_adder(Indication::Weak, Protocol::Rtz);
        let c1 = nl.output("cout").unwrap().pairs[0].rail1;
        assert_eq!(check_dsop(&extract_cover(&nl, c1).unwrap()).len(), 3);
    }

    #[test]
    fn cover_rejects_not_gates() {
        let nl = fixtures::glitch();
        let z1 = nl.output("z").unwrap().pairs[0].rail1;
        assert!(matches!(extract_cover(&nl, z1), Err(CoverError::NotUnate(_))));
    }

    #[test]
    fn code_checks() {
        for p in Protocol::ALL {
            let words: Vec<DualRailWord> = (0..16).map(|v| encoding::encode_word(v, 4, p).unwrap()).collect();
            assert!(check_code(&words).is_empty());
        }
        let v = check_code(&fixtures::ordered_code());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].location, vec!["word0", "word1"]);
    }

    #[test]
    fn full_adder_classes() {
        for delay in [DelayModel::Unit, DelayModel::per_kind_default()] {
            for f in Indication::ALL {
                let nl = logiclib::build_full_adder(f, Protocol::Rtz);
                assert_eq!(classify_indication(&nl, &delay).unwrap(), f);
                assert_eq!(classify_indication(&nl.map_dual(), &delay).unwrap(), f);
            }
        }
    }
}
