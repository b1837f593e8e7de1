use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nctheta::{theta, Form, SdpOptions};
use nctheta_bench::{cycle_instance, random_instance};

fn by_size(c: &mut Criterion) {
    let opts = SdpOptions::default();
    let mut group = c.benchmark_group("min_Y by n");
    group.sample_size(10);
    for n in 2..=5 {
        let (g, w) = random_instance(n, 7).expect("instance");
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| theta(&g, &w, Form::MinY, &opts).expect("solve"))
        });
    }
    group.finish();
}

fn by_form(c: &mut Criterion) {
    let opts = SdpOptions::default();
    let (g, w) = random_instance(3, 11).expect("instance");
    let mut group = c.benchmark_group("forms at n = 3");
    group.sample_size(10);
    for form in Form::ALL {
        group.bench_function(form.name(), |b| b.iter(|| theta(&g, &w, form, &opts).expect("solve")));
    }
    group.finish();
}

fn classical(c: &mut Criterion) {
    let opts = SdpOptions::default();
    let (g, w) = cycle_instance(5).expect("instance");
    c.bench_function("pentagon", |b| b.iter(|| theta(&g, &w, Form::MinY, &opts).expect("solve")));
}

criterion_group!(benches, by_size, by_form, classical);
criterion_main!(benches);
