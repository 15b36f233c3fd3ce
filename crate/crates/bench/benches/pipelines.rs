use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use diledge::pipelines::{ParamMap, Pipeline, PIPELINE_IDS};
use diledge_bench::scene;
use std::hint::black_box;

fn defaults(c: &mut Criterion) {
    let img = scene(320, 240);
    let mut g = c.benchmark_group("pipeline_defaults_320x240");
    g.sample_size(20);
    for id in PIPELINE_IDS {
        let p = Pipeline::from_params(id, &ParamMap::new()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(id), &p, |b, p| {
            b.iter(|| p.run(black_box(&img)).unwrap())
        });
    }
    g.finish();
}

fn dilated_canny(c: &mut Criterion) {
    let img = scene(320, 240);
    let mut g = c.benchmark_group("canny_prewitt_dilate");
    g.sample_size(20);
    for f in 0..3 {
        let map: ParamMap = [("operator", "prewitt".to_string()), ("dilate", f.to_string())]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let p = Pipeline::from_params("canny", &map).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(f), &p, |b, p| {
            b.iter(|| p.run(black_box(&img)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, defaults, dilated_canny);
criterion_main!(benches);
