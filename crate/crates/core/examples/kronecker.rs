//! Simultaneous returns of unimodular scalars: roots of unity return on an
//! arithmetic progression, irrational rotations on a syndetic set.

use reclab::operators::parse_scalar;
use reclab::verify::kronecker_check;

fn main() {
    let cases: &[(&[&str], f64, u64)] = &[
        (&["i"], 1.0, 10_000),
        (&["turn(1/6)", "turn(1/4)"], 0.5, 10_000),
        (&["cis(2*pi*sqrt(2))"], 0.1, 100_000),
        (&["cis(1)", "cis(sqrt(3))"], 0.5, 100_000),
    ];
    for (lits, eps, h) in cases {
        let lambdas: Vec<_> = lits.iter().map(|s| parse_scalar(s).unwrap()).collect();
        let o = kronecker_check(&lambdas, *eps, *h, 8, 1e-10).unwrap();
        println!(
            "{lits:?} eps={eps}: {} max_gap={} ip={}",
            o.status.word(),
            o.metric("max_gap").unwrap_or("-"),
            o.metric("ip").unwrap_or("-")
        );
    }
}
