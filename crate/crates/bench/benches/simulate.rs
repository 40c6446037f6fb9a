use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use qdilab::adders;
use qdilab::qdicheck;
use qdilab::sim::{self, DelayModel, Simulator};
use qdilab::{AdderSpec, FullAdderFlavor, Protocol};
use qdilab_bench::{adders32, workload};

fn simulate(c: &mut Criterion) {
    let vs = workload(200);
    let mut g = c.benchmark_group("simulate32");
    g.throughput(Throughput::Elements(vs.len() as u64));
    for (name, nl) in adders32() {
        g.bench_with_input(BenchmarkId::from_parameter(&name), &nl, |b, nl| {
            b.iter(|| sim::run_sequence_streaming(nl, black_box(&vs), &DelayModel::Unit, |_, _| {}).unwrap())
        });
    }
    g.finish();
}

fn generate(c: &mut Criterion) {
    let spec = AdderSpec::rca(32, FullAdderFlavor::Early, Protocol::Rtz);
    c.bench_function("generate/rca32", |b| b.iter(|| adders::generate(black_box(&spec)).unwrap()));
}

fn check(c: &mut Criterion) {
    let nl = adders::generate(&AdderSpec::new(qdilab::adders::Architecture::Bclarc, 32, Protocol::Rtz)).unwrap();
    let mut s = Simulator::new(&nl, &DelayModel::Unit).unwrap();
    let t = s.run_vector(&workload(1)[0]).unwrap();
    c.bench_function("check/round_trip/bclarc32", |b| b.iter(|| qdicheck::check_round_trip(black_box(&t), &nl)));
}

criterion_group!(benches, simulate, generate, check);
criterion_main!(benches);
