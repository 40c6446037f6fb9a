//! Gate-level building blocks.
//!
//! Builders come in two shapes: fragment functions that add gates to an
//! existing [`Netlist`] and return the nets they produce, and `build_*`
//! functions that wrap a fragment into a standalone netlist with ports.
//!
//! Fragments are written against two helpers, [`any`] and [`all`], which
//! produce OR and AND gates under RTZ and the swapped pair under RTO. A block
//! built directly for RTO is therefore gate-for-gate the dual of its RTZ
//! build. C-elements are self-dual and used unchanged.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::Protocol;
use crate::netlist::{GateKind, NetId, NetPair, Netlist};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("block carry lookahead generators are 4 bits wide, got {0}")]
    UnsupportedBlockWidth(usize),
}

/// Indication class of a circuit, and the flavor of a full adder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Indication {
    /// Every output waits for every input (DIMS).
    Strong,
    /// Some outputs may appear early; the last output waits for the last input.
    Weak,
    /// All outputs may appear from a strict subset of the inputs.
    Early,
}

pub type FullAdderFlavor = Indication;

impl Indication {
    pub const ALL: [Indication; 3] = [Indication::Strong, Indication::Weak, Indication::Early];

    pub fn name(self) -> &'static str {
        match self {
            Indication::Strong => "strong",
            Indication::Weak => "weak",
            Indication::Early => "early",
        }
    }
}

impl std::fmt::Display for Indication {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Indication {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strong" | "dims" => Ok(Indication::Strong),
            "weak" => Ok(Indication::Weak),
            "early" => Ok(Indication::Early),
            other => Err(format!("unknown full-adder flavor `{other}`")),
        }
    }
}

/// Muller C-element: all-ones gives 1, all-zeros gives 0, otherwise hold `prev`.
pub fn c_element_eval(prev: bool, inputs: &[bool]) -> bool {
    GateKind::C2.eval(inputs.iter().copied(), prev)
}

/// Disjunction of active levels: OR under RTZ, AND under RTO. Wide inputs
/// become a tree of 4-input gates.
pub fn any(nl: &mut Netlist, inputs: &[NetId]) -> NetId {
    reduce(nl, inputs, |nl, arity| match nl.protocol() {
        Protocol::Rtz => GateKind::or(arity),
        Protocol::Rto => GateKind::and(arity),
    })
}

/// Conjunction of active levels: AND under RTZ, OR under RTO.
pub fn all(nl: &mut Netlist, inputs: &[NetId]) -> NetId {
    reduce(nl, inputs, |nl, arity| match nl.protocol() {
        Protocol::Rtz => GateKind::and(arity),
        Protocol::Rto => GateKind::or(arity),
    })
}

/// C-element over any number of inputs, as a C2/C3 tree.
pub fn c(nl: &mut Netlist, inputs: &[NetId]) -> NetId {
    reduce(nl, inputs, |_, arity| GateKind::c_element(arity))
}

fn reduce(
    nl: &mut Netlist,
    inputs: &[NetId],
    kind: impl Fn(&Netlist, usize) -> Option<GateKind>,
) -> NetId {
    assert!(!inputs.is_empty(), "gate needs at least one input");
    let max = (2..=4).rev().find(|&k| kind(nl, k).is_some()).unwrap_or(2);
    let mut level = inputs.to_vec();
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len() / max + 1);
        let mut rest = &level[..];
        while !rest.is_empty() {
            // Never leave a single straggler when it can be avoided.
            let take = match rest.len() {
                n if n <= max => n,
                n if n == max + 1 => n.div_ceil(2),
                _ => max,
            };
            let (chunk, tail) = rest.split_at(take);
            rest = tail;
            if chunk.len() == 1 {
                next.push(chunk[0]);
            } else {
                let k = kind(nl, chunk.len()).expect("arity within gate alphabet");
                next.push(nl.push_gate(k, chunk));
            }
        }
        level = next;
    }
    level[0]
}

/// Completion detector over `pairs`: per-pair OR (RTZ) or AND (RTO) merged by
/// a C-element tree. The result is at the active level iff every pair holds
/// data and returns to the spacer level once every pair holds the spacer.
pub fn completion_detector(nl: &mut Netlist, pairs: &[NetPair]) -> NetId {
    let valid: Vec<NetId> = pairs.iter().map(|p| any(nl, &[p.rail1, p.rail0])).collect();
    c_tree(nl, &valid)
}

/// C-element tree that prefers C3 nodes and avoids single stragglers.
fn c_tree(nl: &mut Netlist, nets: &[NetId]) -> NetId {
    let mut level = nets.to_vec();
    while level.len() > 1 {
        let mut next = Vec::new();
        let mut rest = &level[..];
        while !rest.is_empty() {
            let take = match rest.len() {
                4 => 2,
                n => n.min(3),
            };
            let (chunk, tail) = rest.split_at(take);
            rest = tail;
            next.push(if chunk.len() == 1 { chunk[0] } else { c(nl, chunk) });
        }
        level = next;
    }
    level[0]
}

pub fn build_completion_detector(pairs: usize, protocol: Protocol) -> Netlist {
    let mut nl = Netlist::new(protocol);
    let x = nl.add_input("x", pairs);
    let ack = nl.scoped("cd", |nl| completion_detector(nl, &x));
    nl.add_ack("ack", ack);
    nl
}

/// Full adder of the requested flavor. Returns `(sum, cout)`.
pub fn full_adder(nl: &mut Netlist, flavor: FullAdderFlavor, a: NetPair, b: NetPair, cin: NetPair) -> (NetPair, NetPair) {
    match flavor {
        Indication::Strong => dims_fa(nl, a, b, cin),
        Indication::Weak => weak_fa(nl, a, b, cin),
        Indication::Early => early_fa(nl, a, b, cin),
    }
}

/// The eight DIMS minterms, indexed by `a | b << 1 | c << 2`.
fn minterms(nl: &mut Netlist, a: NetPair, b: NetPair, cin: NetPair) -> [NetId; 8] {
    let rail = |p: NetPair, v: usize| if v == 1 { p.rail1 } else { p.rail0 };
    std::array::from_fn(|i| {
        let (x, y, z) = (i & 1, i >> 1 & 1, i >> 2 & 1);
        let m = c(nl, &[rail(a, x), rail(b, y), rail(cin, z)]);
        nl.label(m, &format!("m{x}{y}{z}"))
    })
}

fn parity(i: usize) -> bool {
    (i & 1) ^ (i >> 1 & 1) ^ (i >> 2 & 1) == 1
}

fn majority(i: usize) -> bool {
    (i & 1) + (i >> 1 & 1) + (i >> 2 & 1) >= 2
}

fn select(m: &[NetId; 8], pred: impl Fn(usize) -> bool) -> Vec<NetId> {
    (0..8).filter(|&i| pred(i)).map(|i| m[i]).collect()
}

/// Strong-indication DIMS full adder: 8 C3 minterms, 4 OR4.
pub fn dims_fa(nl: &mut Netlist, a: NetPair, b: NetPair, cin: NetPair) -> (NetPair, NetPair) {
    nl.add_instance("fa-strong", 1);
    let m = minterms(nl, a, b, cin);
    let s1 = any(nl, &select(&m, parity));
    let s0 = any(nl, &select(&m, |i| !parity(i)));
    let c1 = any(nl, &select(&m, majority));
    let c0 = any(nl, &select(&m, |i| !majority(i)));
    (NetPair::new(s1, s0), NetPair::new(c1, c0))
}

/// Weak-indication full adder: DIMS sum, majority carry from C2 products.
/// The carry products overlap (a=b=cin=1 fires all three) and are reset in
/// the spacer phase.
pub fn weak_fa(nl: &mut Netlist, a: NetPair, b: NetPair, cin: NetPair) -> (NetPair, NetPair) {
    nl.add_instance("fa-weak", 1);
    let m = minterms(nl, a, b, cin);
    let s1 = any(nl, &select(&m, parity));
    let s0 = any(nl, &select(&m, |i| !parity(i)));
    let mut carry = |r: fn(NetPair) -> NetId| {
        let ab = c(nl, &[r(a), r(b)]);
        let bc = c(nl, &[r(b), r(cin)]);
        let ac = c(nl, &[r(a), r(cin)]);
        any(nl, &[ab, bc, ac])
    };
    let c1 = carry(|p| p.rail1);
    let c0 = carry(|p| p.rail0);
    (NetPair::new(s1, s0), NetPair::new(c1, c0))
}

/// Early-output full adder in disjoint sum-of-products form over AND/OR.
pub fn early_fa(nl: &mut Netlist, a: NetPair, b: NetPair, cin: NetPair) -> (NetPair, NetPair) {
    nl.add_instance("fa-early", 1);
    let ab10 = all(nl, &[a.rail1, b.rail0]);
    let ab01 = all(nl, &[a.rail0, b.rail1]);
    let p = any(nl, &[ab10, ab01]);
    let p = nl.label(p, "p");
    let ab11 = all(nl, &[a.rail1, b.rail1]);
    let ab00 = all(nl, &[a.rail0, b.rail0]);
    let e = any(nl, &[ab11, ab00]);
    let e = nl.label(e, "e");
    let sum = early_sum(nl, p, e, cin);
    let g = all(nl, &[a.rail1, b.rail1]);
    let pc1 = all(nl, &[p, cin.rail1]);
    let c1 = any(nl, &[g, pc1]);
    let k = all(nl, &[a.rail0, b.rail0]);
    let pc0 = all(nl, &[p, cin.rail0]);
    let c0 = any(nl, &[k, pc0]);
    (sum, NetPair::new(c1, c0))
}

/// Sum logic from the disjoint "differ" (`p`) and "equal" (`e`) terms.
fn early_sum(nl: &mut Netlist, p: NetId, e: NetId, cin: NetPair) -> NetPair {
    let t1 = all(nl, &[p, cin.rail0]);
    let t2 = all(nl, &[e, cin.rail1]);
    let s1 = any(nl, &[t1, t2]);
    let t3 = all(nl, &[p, cin.rail1]);
    let t4 = all(nl, &[e, cin.rail0]);
    let s0 = any(nl, &[t3, t4]);
    NetPair::new(s1, s0)
}

/// Per-bit generate / kill / propagate / equal terms. `g`, `k`, `p` are
/// mutually exclusive and exactly one is active for data; `e = g + k`.
#[derive(Debug, Clone, Copy)]
pub struct BitTerms {
    pub g: NetId,
    pub k: NetId,
    pub p: NetId,
    pub e: NetId,
}

/// Bit terms from AND/OR gates (early reset).
pub fn bit_terms(nl: &mut Netlist, a: NetPair, b: NetPair) -> BitTerms {
    let g = all(nl, &[a.rail1, b.rail1]);
    let k = all(nl, &[a.rail0, b.rail0]);
    let ab10 = all(nl, &[a.rail1, b.rail0]);
    let ab01 = all(nl, &[a.rail0, b.rail1]);
    let p = any(nl, &[ab10, ab01]);
    let e = any(nl, &[g, k]);
    BitTerms {
        g: nl.label(g, "g"),
        k: nl.label(k, "k"),
        p: nl.label(p, "p"),
        e: nl.label(e, "e"),
    }
}

/// Bit terms from C-elements (indicating, set and reset wait for both operands).
pub fn bit_terms_indicating(nl: &mut Netlist, a: NetPair, b: NetPair) -> BitTerms {
    let g = c(nl, &[a.rail1, b.rail1]);
    let k = c(nl, &[a.rail0, b.rail0]);
    let ab10 = c(nl, &[a.rail1, b.rail0]);
    let ab01 = c(nl, &[a.rail0, b.rail1]);
    let p = any(nl, &[ab10, ab01]);
    let e = any(nl, &[g, k]);
    BitTerms {
        g: nl.label(g, "g"),
        k: nl.label(k, "k"),
        p: nl.label(p, "p"),
        e: nl.label(e, "e"),
    }
}

/// Early sum bit plus rippled carry out from precomputed bit terms.
fn early_bit(nl: &mut Netlist, t: BitTerms, cin: NetPair) -> (NetPair, NetPair) {
    let sum = early_sum(nl, t.p, t.e, cin);
    let pc1 = all(nl, &[t.p, cin.rail1]);
    let c1 = any(nl, &[t.g, pc1]);
    let pc0 = all(nl, &[t.p, cin.rail0]);
    let c0 = any(nl, &[t.k, pc0]);
    (sum, NetPair::new(c1, c0))
}

/// Early-output dual-bit full adder. Sums ripple an internal carry; the
/// block carry-out is computed from block generate/kill/propagate and does
/// not wait on the internal ripple.
pub fn dbfa(nl: &mut Netlist, a: [NetPair; 2], b: [NetPair; 2], cin: NetPair) -> ([NetPair; 2], NetPair) {
    nl.add_instance("dbfa", 2);
    let t0 = nl.scoped("b0", |nl| bit_terms(nl, a[0], b[0]));
    let t1 = nl.scoped("b1", |nl| bit_terms(nl, a[1], b[1]));
    let (s0, c_mid) = nl.scoped("b0", |nl| early_bit(nl, t0, cin));
    let s1 = nl.scoped("b1", |nl| early_sum(nl, t1.p, t1.e, c_mid));
    let pg = all(nl, &[t1.p, t0.g]);
    let g2 = any(nl, &[t1.g, pg]);
    let g2 = nl.label(g2, "G");
    let pk = all(nl, &[t1.p, t0.k]);
    let k2 = any(nl, &[t1.k, pk]);
    let k2 = nl.label(k2, "K");
    let p2 = all(nl, &[t1.p, t0.p]);
    let p2 = nl.label(p2, "P");
    let pc1 = all(nl, &[p2, cin.rail1]);
    let cout1 = any(nl, &[g2, pc1]);
    let pc0 = all(nl, &[p2, cin.rail0]);
    let cout0 = any(nl, &[k2, pc0]);
    ([s0, s1], NetPair::new(cout1, cout0))
}

/// Strong-indication 2:1 multiplexer; `s = 0` selects `x`.
pub fn mux2(nl: &mut Netlist, s: NetPair, x: NetPair, y: NetPair) -> NetPair {
    nl.add_instance("mux2", 1);
    let x1 = c(nl, &[s.rail0, x.rail1]);
    let y1 = c(nl, &[s.rail1, y.rail1]);
    let z1 = any(nl, &[x1, y1]);
    let x0 = c(nl, &[s.rail0, x.rail0]);
    let y0 = c(nl, &[s.rail1, y.rail0]);
    let z0 = any(nl, &[x0, y0]);
    NetPair::new(z1, z0)
}

/// Block generate / kill / propagate of a 4-bit block.
#[derive(Debug, Clone, Copy)]
pub struct BlockTerms {
    pub g: NetId,
    pub k: NetId,
    pub p: NetId,
}

/// Disjoint AND/OR lookahead trees over four bits of terms (LSB first).
pub fn block_terms(nl: &mut Netlist, t: &[BitTerms; 4]) -> BlockTerms {
    let mut tree = |sel: fn(&BitTerms) -> NetId| {
        let x1 = all(nl, &[t[3].p, sel(&t[2])]);
        let x2 = all(nl, &[t[3].p, t[2].p, sel(&t[1])]);
        let x3 = all(nl, &[t[3].p, t[2].p, t[1].p, sel(&t[0])]);
        any(nl, &[sel(&t[3]), x1, x2, x3])
    };
    let g = tree(|b| b.g);
    let k = tree(|b| b.k);
    let p = all(nl, &[t[3].p, t[2].p, t[1].p, t[0].p]);
    BlockTerms {
        g: nl.label(g, "G"),
        k: nl.label(k, "K"),
        p: nl.label(p, "P"),
    }
}

/// Non-redundant block carry: `cout = G + P·cin`, with a C-element on the
/// carry-in product so a propagating block indicates its carry-in.
pub fn bclg_carry(nl: &mut Netlist, blk: BlockTerms, cin: NetPair) -> NetPair {
    let pc1 = c(nl, &[blk.p, cin.rail1]);
    let c1 = any(nl, &[blk.g, pc1]);
    let pc0 = c(nl, &[blk.p, cin.rail0]);
    let c0 = any(nl, &[blk.k, pc0]);
    NetPair::new(c1, c0)
}

/// Redundant block carry: the recurrence of the block below is inlined, so
/// the carry out of `hi` depends on the carry into `lo`:
/// `cout = G_hi + P_hi·G_lo + P_hi·P_lo·cin_lo`, with a single C-element on
/// the residual carry term.
pub fn bclg_carry_redundant(nl: &mut Netlist, hi: BlockTerms, lo: BlockTerms, cin_lo: NetPair) -> NetPair {
    let pp = all(nl, &[hi.p, lo.p]);
    let pg = all(nl, &[hi.p, lo.g]);
    let pc1 = c(nl, &[pp, cin_lo.rail1]);
    let c1 = any(nl, &[hi.g, pg, pc1]);
    let pk = all(nl, &[hi.p, lo.k]);
    let pc0 = c(nl, &[pp, cin_lo.rail0]);
    let c0 = any(nl, &[hi.k, pk, pc0]);
    NetPair::new(c1, c0)
}

/// Early sums of a block on a carry rippled from the block carry-in.
pub fn block_sums(nl: &mut Netlist, t: &[BitTerms], cin: NetPair) -> Vec<NetPair> {
    let mut carry = cin;
    let mut sums = Vec::with_capacity(t.len());
    for (i, &bit) in t.iter().enumerate() {
        if i + 1 == t.len() {
            sums.push(nl.scoped(&format!("s{i}"), |nl| early_sum(nl, bit.p, bit.e, carry)));
        } else {
            let (s, next) = nl.scoped(&format!("s{i}"), |nl| early_bit(nl, bit, carry));
            sums.push(s);
            carry = next;
        }
    }
    sums
}

/// Standalone block carry lookahead generator.
///
/// Non-redundant: 4-bit operands `a`, `b` and `cin`, outputs `sum` and `cout`.
/// Redundant: two 4-bit blocks (8-bit operands) whose carry-out is the
/// flattened recurrence from `cin`.
pub fn build_bclg(block_width: usize, protocol: Protocol, redundant: bool) -> Result<Netlist, LogicError> {
    if block_width != 4 {
        return Err(LogicError::UnsupportedBlockWidth(block_width));
    }
    let blocks = if redundant { 2 } else { 1 };
    let mut nl = Netlist::new(protocol);
    let a = nl.add_input("a", 4 * blocks);
    let b = nl.add_input("b", 4 * blocks);
    let cin = nl.add_input("cin", 1)[0];
    let bits: Vec<[BitTerms; 4]> = (0..blocks)
        .map(|k| {
            nl.scoped(&format!("blk{k}"), |nl| {
                std::array::from_fn(|i| nl.scoped(&format!("t{i}"), |nl| bit_terms(nl, a[4 * k + i], b[4 * k + i])))
            })
        })
        .collect();
    let terms: Vec<BlockTerms> = bits
        .iter()
        .enumerate()
        .map(|(k, t)| nl.scoped(&format!("blk{k}"), |nl| block_terms(nl, t)))
        .collect();
    let mut carries = vec![cin];
    let cout = if redundant {
        nl.add_instance("bclgrc", 8);
        carries.push(nl.scoped("cl", |nl| bclg_carry(nl, terms[0], cin)));
        nl.scoped("rc", |nl| bclg_carry_redundant(nl, terms[1], terms[0], cin))
    } else {
        nl.add_instance("bclg", 4);
        nl.scoped("cl", |nl| bclg_carry(nl, terms[0], cin))
    };
    let sums: Vec<NetPair> = bits
        .iter()
        .zip(&carries)
        .enumerate()
        .flat_map(|(k, (t, &c))| nl.scoped(&format!("blk{k}"), |nl| block_sums(nl, t, c)))
        .collect();
    nl.add_output("sum", sums);
    nl.add_output("cout", vec![cout]);
    Ok(nl)
}

/// Indicating carry lookahead block: every product is a C-element and every
/// OR has mutually exclusive inputs, so set and reset follow identical
/// paths. Computes all four carries of the block by lookahead over `g/k/p`.
pub fn ccla_block(nl: &mut Netlist, a: &[NetPair], b: &[NetPair], cin: NetPair) -> (Vec<NetPair>, NetPair) {
    assert_eq!(a.len(), 4);
    nl.add_instance("ccla-block", 4);
    let t: Vec<BitTerms> = (0..4)
        .map(|i| nl.scoped(&format!("t{i}"), |nl| bit_terms_indicating(nl, a[i], b[i])))
        .collect();
    let p32 = c(nl, &[t[3].p, t[2].p]);
    let p21 = c(nl, &[t[2].p, t[1].p]);
    let p10 = c(nl, &[t[1].p, t[0].p]);
    let p3210 = c(nl, &[p32, p10]);
    let mut rail = |sel: fn(&BitTerms) -> NetId, cr: NetId| -> [NetId; 4] {
        let p0c = c(nl, &[t[0].p, cr]);
        let p1x0 = c(nl, &[t[1].p, sel(&t[0])]);
        let c1 = any(nl, &[sel(&t[0]), p0c]);
        let p10c = c(nl, &[t[1].p, t[0].p, cr]);
        let c2 = any(nl, &[sel(&t[1]), p1x0, p10c]);
        let p2x1 = c(nl, &[t[2].p, sel(&t[1])]);
        let p21x0 = c(nl, &[t[2].p, t[1].p, sel(&t[0])]);
        let p210c = c(nl, &[p21, p0c]);
        let c3 = any(nl, &[sel(&t[2]), p2x1, p21x0, p210c]);
        let p3x2 = c(nl, &[t[3].p, sel(&t[2])]);
        let p32x1 = c(nl, &[t[3].p, t[2].p, sel(&t[1])]);
        let p321x0 = c(nl, &[p32, p1x0]);
        let p3210c = c(nl, &[p3210, cr]);
        let c4 = any(nl, &[sel(&t[3]), p3x2, p32x1, p321x0, p3210c]);
        [c1, c2, c3, c4]
    };
    let ones = rail(|x| x.g, cin.rail1);
    let zeros = rail(|x| x.k, cin.rail0);
    let carries: Vec<NetPair> = std::iter::once(cin)
        .chain((0..4).map(|i| NetPair::new(ones[i], zeros[i])))
        .collect();
    let sums = (0..4)
        .map(|i| {
            nl.scoped(&format!("s{i}"), |nl| {
                let ci = carries[i];
                let x1 = c(nl, &[t[i].p, ci.rail0]);
                let x2 = c(nl, &[t[i].e, ci.rail1]);
                let s1 = any(nl, &[x1, x2]);
                let x3 = c(nl, &[t[i].p, ci.rail1]);
                let x4 = c(nl, &[t[i].e, ci.rail0]);
                let s0 = any(nl, &[x3, x4]);
                NetPair::new(s1, s0)
            })
        })
        .collect();
    (sums, carries[4])
}

/// Standalone full adder with ports `a`, `b`, `cin` and `sum`, `cout`.
pub fn build_full_adder(flavor: FullAdderFlavor, protocol: Protocol) -> Netlist {
    let mut nl = Netlist::new(protocol);
    let a = nl.add_input("a", 1)[0];
    let b = nl.add_input("b", 1)[0];
    let cin = nl.add_input("cin", 1)[0];
    let (s, co) = nl.scoped("fa", |nl| full_adder(nl, flavor, a, b, cin));
    nl.add_output("sum", vec![s]);
    nl.add_output("cout", vec![co]);
    nl
}

/// Standalone dual-bit full adder: `a[1:0]`, `b[1:0]`, `cin` to `sum[1:0]`, `cout`.
pub fn build_dbfa(protocol: Protocol) -> Netlist {
    let mut nl = Netlist::new(protocol);
    let a = nl.add_input("a", 2);
    let b = nl.add_input("b", 2);
    let cin = nl.add_input("cin", 1)[0];
    let (s, co) = nl.scoped("dbfa", |nl| dbfa(nl, [a[0], a[1]], [b[0], b[1]], cin));
    nl.add_output("sum", s.to_vec());
    nl.add_output("cout", vec![co]);
    nl
}

/// Standalone multiplexer with ports `x`, `y`, `s` and output `z`.
pub fn build_mux2(protocol: Protocol) -> Netlist {
    let mut nl = Netlist::new(protocol);
    let x = nl.add_input("x", 1)[0];
    let y = nl.add_input("y", 1)[0];
    let s = nl.add_input("s", 1)[0];
    let z = nl.scoped("mux", |nl| mux2(nl, s, x, y));
    nl.add_output("z", vec![z]);
    nl
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn census(nl: &Netlist) -> BTreeMap<GateKind, usize> {
        nl.stats().unwrap().total()
    }

    #[test]
    fn c_element_truth() {
        assert!(c_element_eval(false, &[true, true]));
        assert!(c_element_eval(true, &[true, false]));
        assert!(!c_element_eval(false, &[false, false, false]));
        assert!(!c_element_eval(false, &[true, false]));
    }

    #[test]
    fn completion_detector_shapes() {
        let one = build_completion_detector(1, Protocol::Rtz);
        assert_eq!(census(&one), BTreeMap::from([(GateKind::Or2, 1)]));
        let three = build_completion_detector(3, Protocol::Rtz);
        assert_eq!(census(&three), BTreeMap::from([(GateKind::Or2, 3), (GateKind::C3, 1)]));
        let rto = build_completion_detector(3, Protocol::Rto);
        assert_eq!(census(&rto), BTreeMap::from([(GateKind::And2, 3), (GateKind::C3, 1)]));
        // Wide trees use C3 nodes with at most one C2 per level.
        let wide = build_completion_detector(65, Protocol::Rtz);
        let t = census(&wide);
        assert_eq!(t[&GateKind::Or2], 65);
        assert!(wide.validate().is_clean());
    }

    #[test]
    fn full_adder_censuses() {
        let dims = build_full_adder(Indication::Strong, Protocol::Rtz);
        assert_eq!(dims.gates().len(), 12);
        let c = dims.stats().unwrap();
        assert_eq!(c.datapath, BTreeMap::from([(GateKind::Or4, 4), (GateKind::C3, 8)]));
        assert_eq!(c.depth, 2);

        let weak = build_full_adder(Indication::Weak, Protocol::Rtz);
        assert_eq!(
            census(&weak),
            BTreeMap::from([(GateKind::Or3, 2), (GateKind::Or4, 2), (GateKind::C2, 6), (GateKind::C3, 8)])
        );

        let early = build_full_adder(Indication::Early, Protocol::Rtz);
        assert_eq!(census(&early), BTreeMap::from([(GateKind::And2, 12), (GateKind::Or2, 6)]));
    }

    #[test]
    fn mux_census() {
        let m = build_mux2(Protocol::Rtz);
        assert_eq!(census(&m), BTreeMap::from([(GateKind::Or2, 2), (GateKind::C2, 4)]));
    }

    #[test]
    fn rto_builds_are_duals_of_rtz_builds() {
        for flavor in Indication::ALL {
            let rtz = build_full_adder(flavor, Protocol::Rtz);
            let rto = build_full_adder(flavor, Protocol::Rto);
            assert_eq!(rtz.map_dual(), rto);
        }
        assert_eq!(build_dbfa(Protocol::Rtz).map_dual(), build_dbfa(Protocol::Rto));
        assert_eq!(build_mux2(Protocol::Rtz).map_dual(), build_mux2(Protocol::Rto));
    }

    #[test]
    fn bclg_width_is_fixed() {
        assert_eq!(build_bclg(8, Protocol::Rtz, false).unwrap_err(), LogicError::UnsupportedBlockWidth(8));
        assert!(build_bclg(4, Protocol::Rtz, false).unwrap().validate().is_clean());
        assert!(build_bclg(4, Protocol::Rto, true).unwrap().validate().is_clean());
    }

    #[test]
    fn generated_blocks_validate() {
        for nl in [
            build_full_adder(Indication::Strong, Protocol::Rtz),
            build_full_adder(Indication::Weak, Protocol::Rto),
            build_full_adder(Indication::Early, Protocol::Rtz),
            build_dbfa(Protocol::Rtz),
            build_mux2(Protocol::Rto),
        ] {
            assert!(nl.validate().is_clean(), "{:?}", nl.validate());
        }
    }
}
