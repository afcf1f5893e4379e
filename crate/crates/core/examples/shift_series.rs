//! The weight series of a backward shift: geometric weights converge and
//! give a fixed point, harmonic weights diverge past any threshold.

use reclab::families::{parse_window_expr, IndexWindow};
use reclab::operators::Expr;
use reclab::verify::{shift_series_check, ShiftSeriesParams};

fn main() {
    let runs = [
        ("2", IndexWindow::from_predicate(1000, |n| n >= 1)),
        ("(n+1)/n", IndexWindow::from_predicate(100_000, |n| n >= 1)),
        ("2", parse_window_expr("explicit(1, 2, 4, 8, 16, 32, 64, 128, 256, 512)", 1000).unwrap()),
    ];
    for (w, set) in runs {
        let o = shift_series_check(&ShiftSeriesParams::new(Expr::parse(w).unwrap(), set)).unwrap();
        let keys = ["verdict", "partial_sum", "crossing", "predicted_crossing", "certified_tail", "fixed_point_residual"];
        let shown: Vec<String> = keys
            .iter()
            .filter_map(|k| o.metric(k).map(|v| format!("{k}={v}")))
            .collect();
        println!("w_n = {w}: {}", shown.join(" "));
    }
}
