//! Finite matrices: diagonalizable with unimodular spectrum against what the
//! orbits actually do.

use reclab::cli::describe;
use reclab::operators::{parse_operator, OperatorSpec};
use reclab::verify::{matrix_recurrence_check, Sweep};

fn main() {
    let sweep = Sweep::new(&[0.5, 0.1], 10_000);
    for lit in [
        "matrix([[0, -1], [1, 0]])",
        "matrix([[cos(2*pi/7), -sin(2*pi/7)], [sin(2*pi/7), cos(2*pi/7)]])",
        "matrix([[1, 1], [0, 1]])",
        "matrix([[cis(1), 1], [0, cis(2)]])",
        "matrix([[2, 0], [0, 1]])",
    ] {
        let OperatorSpec::Matrix(m) = parse_operator(lit).unwrap() else { unreachable!() };
        let o = matrix_recurrence_check(&m, &sweep, 1e-10).unwrap();
        println!(
            "{lit}\n  criterion={} simulation={} labels={} -> {}",
            o.metric("criterion").unwrap_or("?"),
            o.metric("simulation").unwrap_or("?"),
            o.metric("labels").unwrap_or("?"),
            o.status.word()
        );
    }
    print!("{}", describe("matrix([[0, -1], [1, 0]])").unwrap());
}
