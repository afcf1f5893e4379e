//! Row rotation on a Fréchet space: the special vector returns along
//! dyadic times, its orbit is unbounded, and the continuity bound holds.

use reclab::classify::classify;
use reclab::operators::rows::combination_seminorm;
use reclab::operators::{continuity_constant, parse_operator, RowBlocks};
use reclab::orbit::{orbit_growth, return_sets, Precision};
use reclab::scalar::Rational;
use reclab::StateVector;
use num_traits::One;

fn main() {
    let op = parse_operator("rowrotation").unwrap();
    let x = RowBlocks::special();

    for (nu, l) in [(1u64, 3u32), (5, 6), (100, 12)] {
        let m = nu << l;
        let y = x.rotate(m).unwrap();
        let d = combination_seminorm(&[(Rational::one(), &y), (-Rational::one(), &x)], 2).unwrap();
        println!("p_2(T^({nu}*2^{l}) x - x) = {}", d.value);
    }
    // The orbit is unbounded: p_1 peaks just before each dyadic time.
    for k in [4u32, 8, 16] {
        for m in [(1u64 << (k - 1)) - 1, (1u64 << (k - 1)) + 1] {
            println!("k={k}: p_1(T^{m} x) = {}", x.rotate(m).unwrap().seminorm(1).unwrap().value);
        }
    }
    for n in 1..=4 {
        println!("continuity constant for p_{n}: {}", continuity_constant(n));
    }

    let sx = StateVector::rows(x);
    let recs = return_sets(&op, &sx, &[0.5, 0.25], &[0, 1, 2], 4096, Precision::Exact).unwrap();
    let v = classify(&recs, &Default::default()).unwrap();
    let g = orbit_growth(&op, &sx, 1, 1 << 16, Precision::Exact).unwrap();
    println!("label {}, growth witness: {}", v.label, g.is_growing());
}
