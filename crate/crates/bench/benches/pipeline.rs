use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use syntheto::eval::OracleConfig;
use syntheto::parse_program;
use syntheto::session::Session;
use syntheto::transfer::{ast_to_transfer, parse_sexpr, serialize, transfer_to_ast};
use syntheto_bench::corpus;

fn session(text: &str, trials: usize) -> Session {
    let mut s = Session::from_notebook(
        text,
        OracleConfig {
            trials,
            ..OracleConfig::default()
        },
    );
    s.run_pending(|_, _| {});
    s
}

fn syntax(c: &mut Criterion) {
    let pip = corpus("point_in_polygon.synth");
    c.bench_function("parse point_in_polygon", |b| {
        b.iter(|| parse_program(black_box(&pip)).unwrap())
    });
    let units = parse_program(&pip).unwrap();
    c.bench_function("transfer round trip", |b| {
        b.iter(|| {
            for u in &units {
                let text = serialize(&ast_to_transfer(black_box(u))).unwrap();
                transfer_to_ast(&parse_sexpr(&text).unwrap()).unwrap();
            }
        })
    });
}

fn sessions(c: &mut Criterion) {
    let basics = corpus("basics.synth");
    let pip = corpus("point_in_polygon.synth");
    let mut g = c.benchmark_group("session");
    g.sample_size(10);
    g.bench_function("basics, 100 trials", |b| b.iter(|| session(&basics, 100)));
    g.bench_function("point_in_polygon, 100 trials", |b| {
        b.iter(|| session(&pip, 100))
    });
    g.finish();
}

criterion_group!(benches, syntax, sessions);
criterion_main!(benches);
