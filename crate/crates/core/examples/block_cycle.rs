//! The dyadic block cycle: every basis vector is periodic, yet a vector with
//! coordinates 2/j on the block starts `2^j` is not reiteratively recurrent.

use std::time::Instant;

use reclab::classify::blockcycle_rrec_refutation;
use reclab::operators::{apply_n, parse_operator, parse_vector, StateVector};
use reclab::scalar::{rat, Scalar};
use reclab::verify::{verdict_of, Sweep};

fn main() {
    let op = parse_operator("blockcycle").unwrap();
    let space = op.space();

    let t = Instant::now();
    let mut checked = 0;
    for j in 0..=10u32 {
        for k in (1u64 << j)..(1u64 << (j + 1)) {
            let e = parse_vector(&format!("e({k})"), &space).unwrap();
            assert_eq!(apply_n(&op, &e, 1 << j).unwrap(), e);
            checked += 1;
        }
    }
    println!("T^(2^j) e_k = e_k for {checked} basis vectors in {:?}", t.elapsed());

    let e5 = parse_vector("e(5)", &space).unwrap();
    let v = verdict_of(&op, &e5, &Sweep::new(&[0.5, 0.1], 10_000)).unwrap();
    println!("e_5: {}", v.label);

    let x = StateVector::sparse(space, (1..=20u32).map(|j| (1i64 << j, Scalar::real(rat(2, j as i64))))).unwrap();
    let r = blockcycle_rrec_refutation(&x, 0.1, 0.5).unwrap();
    println!(
        "x = sum 2/j e_(2^j): block j = {}, tail index {}, {} exact blow-up checks, at most {} returns per window of {} (density cap {:.4})",
        r.j, r.tail_index, r.pairs_checked, r.max_returns_per_window, r.window_len, r.density_cap
    );
}
