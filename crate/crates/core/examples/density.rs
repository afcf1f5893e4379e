//! Density toolkit on a few structured sets: running densities, the sliding
//! window Banach estimate, bounded gaps and the IP* probe.

use reclab::families::{default_schedule, density_report, ip_star_probe, parse_window_expr, syndetic_certificate};

fn main() {
    let h = 10_000;
    for expr in ["residue(3, 0)", "intervals(0:99, 1000:1999, 5000:)", "fs(1, 2, 4, 8, 16, 32, 64; 7)", "explicit(1, 4, 9, 16, 25, 36, 49, 64, 81, 100)"] {
        let a = parse_window_expr(expr, h).expect("set expression");
        let rep = density_report(&a, h / 10, &default_schedule(h)).expect("density report");
        let gaps = match syndetic_certificate(&a) {
            Ok(c) => format!("syndetic, gap {}", c.max_gap),
            Err(f) => format!("not syndetic on [0, {h}], trailing {}", f.trailing_gap),
        };
        println!("{expr}");
        println!("  |A| = {}, lower {:.4}, upper {:.4}, banach {:.4}", a.len(), rep.lower_est, rep.upper_est, rep.banach_upper_est);
        println!("  {gaps}; IP*: {:?}", ip_star_probe(&a, 8).verdict);
    }
}
