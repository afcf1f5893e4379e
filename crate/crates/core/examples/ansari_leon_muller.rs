//! Powers and unimodular multiples keep the uniformly recurrent vectors:
//! the exact window identity for `T^p` and label agreement for `λT`.
//!
//! The irrational multiple shows the limit of a finite window: `e_5` returns
//! under `λT` only when `λ^(4m)` is close to 1, and at ε = 0.1 those times are
//! spaced wider than the gap bound allows on 10^4 steps.

use reclab::operators::parse_scalar;
use reclab::verify::{ansari_check, leon_muller_check, zoo, Sweep};

fn main() {
    let sweep = Sweep::new(&[0.5, 0.1], 10_000);
    for entry in zoo() {
        let (op, x) = entry.build().unwrap();
        let sweep = sweep.clone().with_seminorms(entry.seminorms);
        let row: Vec<String> = [2, 3, 5, 7]
            .iter()
            .map(|&p| {
                let o = ansari_check(&op, &x, p, &sweep).unwrap();
                format!("p={p}:{}", o.status.word())
            })
            .collect();
        println!("{:<20} {}", entry.name, row.join(" "));
    }

    let (op, x) = zoo()[0].build().unwrap();
    for l in ["-1", "i", "cis(2*pi*sqrt(2))"] {
        let o = leon_muller_check(&op, &x, &parse_scalar(l).unwrap(), &sweep).unwrap();
        println!(
            "blockcycle e_5 under {l}T: {} vs {} -> {}",
            o.metric("label_t").unwrap(),
            o.metric("label_scaled").unwrap(),
            o.status.word()
        );
    }
}
