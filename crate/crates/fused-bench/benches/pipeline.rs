//! End-to-end timings for the hot paths: canonicalization, the free-group
//! action, last-strand combing, and the rewrite search on the smallest
//! nontrivial identity.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fused_core::{
    artin_image, bfs_equivalent, canonical_form, check_central_base, comb_last_strand,
    random_classical_word, BraidWord, Budget, Level,
};

fn sample_words(strands: u32, len: usize, count: usize) -> Vec<BraidWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    (0..count)
        .map(|_| {
            let m = rng.gen_range(2..=strands);
            random_classical_word(&mut rng, m, len)
        })
        .collect()
}

fn bench_canonical_form(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonical_form");
    group.sample_size(20);
    for (strands, len) in [(3u32, 12usize), (4, 20), (5, 30)] {
        let words = sample_words(strands, len, 8);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{strands}x{len}")),
            &words,
            |b, words| {
                b.iter(|| {
                    for w in words {
                        canonical_form(w).unwrap();
                    }
                })
            },
        );
    }
    group.finish();
}

fn bench_artin_image(c: &mut Criterion) {
    let mut group = c.benchmark_group("artin_image");
    group.sample_size(30);
    for (strands, len) in [(4u32, 20usize), (6, 40)] {
        let words = sample_words(strands, len, 8);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{strands}x{len}")),
            &words,
            |b, words| {
                b.iter(|| {
                    for w in words {
                        artin_image(w);
                    }
                })
            },
        );
    }
    group.finish();
}

fn bench_comb(c: &mut Criterion) {
    let mut group = c.benchmark_group("comb_last_strand");
    group.sample_size(30);
    for (strands, len) in [(4u32, 20usize), (6, 40)] {
        let words = sample_words(strands, len, 8);
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{strands}x{len}")),
            &words,
            |b, words| {
                b.iter(|| {
                    for w in words {
                        comb_last_strand(w).unwrap();
                    }
                })
            },
        );
    }
    group.finish();
}

fn bench_search(c: &mut Criterion) {
    let lemma = check_central_base(2, 3).unwrap();
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    group.bench_function("central_base_2_3", |b| {
        b.iter(|| {
            let budget = Budget::default();
            bfs_equivalent(&lemma.start, &lemma.end, Level::Word, &budget)
                .unwrap()
                .expect("identity connects within budget")
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_canonical_form,
    bench_artin_image,
    bench_comb,
    bench_search
);
criterion_main!(benches);
