use qdilab::encoding::{classify_pair, encode_bit, PairClass, RailPair};
use qdilab::logiclib::{self, Indication};
use qdilab::netlist::NetPair;
use qdilab::sim::{self, DelayModel, Phase, Simulator};
use qdilab::{Netlist, Protocol};

fn drive(sim: &mut Simulator, pair: NetPair, bit: bool, p: Protocol) {
    let r = encode_bit(bit, p);
    let t = sim.now();
    sim.drive(pair.rail1, r.rail1, t);
    sim.drive(pair.rail0, r.rail0, t);
}

fn class(sim: &Simulator, nl: &Netlist, port: &str) -> PairClass {
    let p = nl.output(port).unwrap().pairs[0];
    classify_pair(RailPair::new(sim.value(p.rail1), sim.value(p.rail0)), nl.protocol())
}

fn input(nl: &Netlist, port: &str, bit: usize) -> NetPair {
    nl.input(port).unwrap().pairs[bit]
}

#[test]
fn every_flavor_adds_one_one_one() {
    for p in Protocol::ALL {
        for f in Indication::ALL {
            let nl = logiclib::build_full_adder(f, p);
            let t = sim::run_cycle(&nl, 1, 1, true, &DelayModel::Unit).unwrap();
            assert_eq!(t.outputs, vec![1, 1], "{f} {p}");
        }
    }
}

#[test]
fn full_adders_match_integer_addition() {
    for p in Protocol::ALL {
        for f in Indication::ALL {
            let nl = logiclib::build_full_adder(f, p);
            let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
            for v in 0..8u64 {
                let (a, b, c) = (v & 1, v >> 1 & 1, v >> 2);
                let t = sim.run_cycle(&[a, b, c]).unwrap();
                assert_eq!(t.outputs[0] | t.outputs[1] << 1, a + b + c);
            }
        }
    }
}

#[test]
fn early_carry_needs_only_a_and_b() {
    let nl = logiclib::build_full_adder(Indication::Early, Protocol::Rtz);
    let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
    drive(&mut sim, input(&nl, "a", 0), true, Protocol::Rtz);
    drive(&mut sim, input(&nl, "b", 0), true, Protocol::Rtz);
    sim.settle(Phase::Data).unwrap();
    assert_eq!(class(&sim, &nl, "cout"), PairClass::Data1);
    assert_eq!(class(&sim, &nl, "sum"), PairClass::Spacer);
}

#[test]
fn strong_adder_waits_for_every_input() {
    let nl = logiclib::build_full_adder(Indication::Strong, Protocol::Rtz);
    for missing in ["a", "b", "cin"] {
        let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
        for port in ["a", "b", "cin"].into_iter().filter(|&x| x != missing) {
            drive(&mut sim, input(&nl, port, 0), true, Protocol::Rtz);
        }
        sim.settle(Phase::Data).unwrap();
        assert_eq!(class(&sim, &nl, "sum"), PairClass::Spacer);
        assert_eq!(class(&sim, &nl, "cout"), PairClass::Spacer);
    }
}

#[test]
fn dbfa_examples() {
    let nl = logiclib::build_dbfa(Protocol::Rtz);
    let t = sim::run_cycle(&nl, 3, 0, true, &DelayModel::Unit).unwrap();
    assert_eq!(t.outputs, vec![0, 1]);

    // Block generate: cout is data before cin arrives.
    let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
    for bit in 0..2 {
        drive(&mut sim, input(&nl, "a", bit), true, Protocol::Rtz);
        drive(&mut sim, input(&nl, "b", bit), true, Protocol::Rtz);
    }
    sim.settle(Phase::Data).unwrap();
    assert_eq!(class(&sim, &nl, "cout"), PairClass::Data1);
}

#[test]
fn dbfa_equals_two_chained_early_adders() {
    let fa = logiclib::build_full_adder(Indication::Early, Protocol::Rtz);
    let dbfa = logiclib::build_dbfa(Protocol::Rtz);
    let mut s_fa = Simulator::new(&fa, &DelayModel::Unit).unwrap();
    let mut s_db = Simulator::new(&dbfa, &DelayModel::Unit).unwrap();
    for a in 0..4u64 {
        for b in 0..4u64 {
            for c in 0..2u64 {
                let lo = s_fa.run_cycle(&[a & 1, b & 1, c]).unwrap();
                let hi = s_fa.run_cycle(&[a >> 1, b >> 1, lo.outputs[1]]).unwrap();
                let chained = lo.outputs[0] | hi.outputs[0] << 1 | hi.outputs[1] << 2;
                let t = s_db.run_cycle(&[a, b, c]).unwrap();
                assert_eq!(t.outputs[0] | t.outputs[1] << 2, chained);
                assert_eq!(chained, a + b + c);
            }
        }
    }
}

#[test]
fn mux_selects_and_waits_for_select() {
    for p in Protocol::ALL {
        let nl = logiclib::build_mux2(p);
        // Port order: x, y, s.
        let t = sim::run_cycle(&nl, 1, 0, false, &DelayModel::Unit);
        let t = t.unwrap();
        assert_eq!(t.outputs, vec![1]);

        let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
        drive(&mut sim, input(&nl, "x", 0), true, p);
        drive(&mut sim, input(&nl, "y", 0), false, p);
        sim.settle(Phase::Data).unwrap();
        assert_eq!(class(&sim, &nl, "z"), PairClass::Spacer);

        let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
        drive(&mut sim, input(&nl, "s", 0), true, p);
        drive(&mut sim, input(&nl, "y", 0), true, p);
        sim.settle(Phase::Data).unwrap();
        assert_eq!(class(&sim, &nl, "z"), PairClass::Data1);
    }
}

#[test]
fn mux_truth_table() {
    let nl = logiclib::build_mux2(Protocol::Rtz);
    let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
    for v in 0..8u64 {
        let (x, y, s) = (v & 1, v >> 1 & 1, v >> 2);
        let t = sim.run_cycle(&[x, y, s]).unwrap();
        assert_eq!(t.outputs[0], if s == 1 { y } else { x });
    }
}

#[test]
fn bclg_examples() {
    for redundant in [false, true] {
        let nl = logiclib::build_bclg(4, Protocol::Rtz, redundant).unwrap();
        let width = if redundant { 8 } else { 4 };
        let full = (1u64 << width) - 1;
        let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
        for cin in 0..2 {
            // Full propagate: carry-out follows carry-in.
            let t = sim.run_cycle(&[full, 0, cin]).unwrap();
            assert_eq!(t.outputs[1], cin);
            // Generate: carry-out set regardless of carry-in.
            let t = sim.run_cycle(&[full, 1, cin]).unwrap();
            assert_eq!(t.outputs[1], 1);
        }
    }
}

#[test]
fn bclg_exhaustive() {
    let nl = logiclib::build_bclg(4, Protocol::Rto, false).unwrap();
    let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
    for a in 0..16u64 {
        for b in 0..16u64 {
            for c in 0..2u64 {
                let t = sim.run_cycle(&[a, b, c]).unwrap();
                assert_eq!(t.outputs[0] | t.outputs[1] << 4, a + b + c);
            }
        }
    }
}

#[test]
fn completion_detector_fires_only_on_complete_data() {
    for p in Protocol::ALL {
        let nl = logiclib::build_completion_detector(5, p);
        let ack = nl.ack("ack").unwrap();
        let mut sim = Simulator::new(&nl, &DelayModel::Unit).unwrap();
        let pairs = nl.input("x").unwrap().pairs.clone();
        for (i, &pair) in pairs.iter().enumerate() {
            assert_eq!(sim.value(ack), p.spacer_level());
            drive(&mut sim, pair, i % 2 == 0, p);
            sim.settle(Phase::Data).unwrap();
        }
        assert_eq!(sim.value(ack), p.active_level());
        let spacer = qdilab::encoding::spacer_pair(p);
        for (i, &pair) in pairs.iter().enumerate() {
            assert_eq!(sim.value(ack), p.active_level(), "released after {i} spacers");
            let t = sim.now();
            sim.drive(pair.rail1, spacer.rail1, t);
            sim.drive(pair.rail0, spacer.rail0, t);
            sim.settle(Phase::Spacer).unwrap();
        }
        assert_eq!(sim.value(ack), p.spacer_level());
    }
}
