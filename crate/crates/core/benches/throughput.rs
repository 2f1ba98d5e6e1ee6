use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use tdgen::campaign::{run_campaign, sample_input, CampaignConfig, MaxSize, StopRule};
use tdgen::corpus;
use tdgen::interp::{Interpreter, DEFAULT_STEP_BUDGET};
use tdgen::schema::{InputVector, Shape};

fn executions(c: &mut Criterion) {
    let bubble = corpus::bubble_sort();
    let interp = Interpreter::new(&bubble.program, &bubble.table);
    let mut group = c.benchmark_group("bubble_execute");
    for n in [5usize, 20, 50] {
        let mut rng = tdgen::rng::stream(1, n as u64, 0);
        let inputs: Vec<InputVector> = (0..64)
            .map(|_| sample_input(&bubble.schema, &Shape(vec![n]), 1000, &mut rng).unwrap())
            .collect();
        group.throughput(Throughput::Elements(inputs.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &inputs, |b, inputs| {
            b.iter(|| {
                for input in inputs {
                    interp.run(input, DEFAULT_STEP_BUDGET).unwrap();
                }
            })
        });
    }
    group.finish();
}

fn campaigns(c: &mut Criterion) {
    let matrix = corpus::matrix_mult();
    let cfg = CampaignConfig {
        max_size: MaxSize::Uniform(3),
        stop_rule: StopRule::Saturation { window: 3 },
        ..CampaignConfig::default()
    };
    c.bench_function("matrix_campaign_3", |b| {
        b.iter(|| run_campaign(&matrix.program, &matrix.table, &matrix.schema, &cfg).unwrap())
    });
}

criterion_group!(benches, executions, campaigns);
criterion_main!(benches);
