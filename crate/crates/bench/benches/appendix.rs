use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fairshare::ladder::{path_sums, verify_appendix, x_from_y};
use fairshare_bench::y_sequences;

fn bench_appendix(c: &mut Criterion) {
    let mut group = c.benchmark_group("appendix");
    for k in [4, 6, 8] {
        let ys = y_sequences(k, 16);
        group.bench_with_input(BenchmarkId::new("verify", k), &ys, |b, ys| {
            b.iter(|| {
                for y in ys {
                    verify_appendix(black_box(y)).unwrap();
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("x_from_y", k), &ys, |b, ys| {
            b.iter(|| {
                ys.iter()
                    .map(|y| x_from_y(black_box(y)))
                    .collect::<Vec<_>>()
            })
        });
        group.bench_with_input(BenchmarkId::new("path_sums", k), &ys, |b, ys| {
            b.iter(|| {
                ys.iter()
                    .map(|y| path_sums(black_box(y), k).len())
                    .sum::<usize>()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_appendix);
criterion_main!(benches);
