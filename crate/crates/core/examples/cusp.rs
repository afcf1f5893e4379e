//! Cut-shift-paste: cut a set along a partition, shift each piece, and check
//! that family membership survives.

use reclab::classify::{Family, Thresholds};
use reclab::families::{cusp_transform, parse_window_expr, CuspInstance, IndexPredicate};
use reclab::verify::cusp_family_check;

fn main() {
    let a = parse_window_expr("residue(5, 0)", 200).unwrap();
    let inst = CuspInstance::new(
        vec![IndexPredicate::residue(2, 0), IndexPredicate::residue(2, 1)],
        vec![0, 3],
    )
    .unwrap();
    let b = cusp_transform(&a, &inst).unwrap();
    println!("5N0 cut by parity, odd part shifted by 3: {:?}", &b.elements()[..10]);

    for f in ["infinite", "syndetic", "lower-density", "upper-density", "banach-density"] {
        let fam = Family::parse(f).unwrap();
        let o = cusp_family_check(fam, 200, 7, 10_000, &Thresholds::default()).unwrap();
        println!("{f}: {} violations={}", o.status.word(), o.metric("violations").unwrap_or("-"));
    }
}
