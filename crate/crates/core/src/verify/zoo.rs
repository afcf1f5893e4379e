use crate::operators::{parse_operator, parse_vector, OperatorError, OperatorSpec, StateVector};

/// A named operator with a starting vector, used for sweeping identities over
/// every kind of operator the crate knows.
#[derive(Clone, Debug, PartialEq)]
pub struct ZooEntry {
    pub name: &'static str,
    pub operator: &'static str,
    pub vector: &'static str,
    pub seminorms: &'static [u64],
}

impl ZooEntry {
    pub fn build(&self) -> Result<(OperatorSpec, StateVector), OperatorError> {
        let op = parse_operator(self.operator)?;
        let x = parse_vector(self.vector, &op.space())?;
        Ok((op, x))
    }
}

const ZOO: &[ZooEntry] = &[
    ZooEntry {
        name: "block-cycle-unit",
        operator: "blockcycle",
        vector: "e(5)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "block-cycle-mixed",
        operator: "blockcycle",
        vector: "vec(sparse: 1:1, 5:1/2, 9:-1/4)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "quarter-rotation",
        operator: "matrix([[0, -1], [1, 0]])",
        vector: "vec(1, 2)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "float-rotation",
        operator: "matrix([[float(0.6), float(-0.8)], [float(0.8), float(0.6)]])",
        vector: "vec(1, 0)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "jordan-block",
        operator: "matrix([[1, 1], [0, 1]])",
        vector: "vec(0, 1)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "root-diagonal",
        operator: "diag([i, turn(1/3), -1])",
        vector: "vec(1, 1, 1)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "golden-diagonal",
        operator: "diag([cis(pi*(sqrt(5)-1))])",
        vector: "e(1)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "contracting-diagonal",
        operator: "diag([1/2, 1])",
        vector: "vec(1, 1)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "weighted-shift",
        operator: "shift(weights=2, side=uni, space=l1)",
        vector: "e(3)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "bilateral-shift",
        operator: "shift(weights=1, side=bi, space=l2z)",
        vector: "e(0)",
        seminorms: &[0],
    },
    ZooEntry {
        name: "row-rotation",
        operator: "rowrotation",
        vector: "rows(tail=onehot(1))",
        seminorms: &[0, 1, 2],
    },
    ZooEntry {
        name: "affine-rotation",
        operator: "comp(a=turn(1/4), b=0, deg=3)",
        vector: "vec(1, 1, 0, 1)",
        seminorms: &[0, 1],
    },
    ZooEntry {
        name: "affine-translation",
        operator: "comp(a=1, b=1, deg=2)",
        vector: "vec(0, 1, 1)",
        seminorms: &[0],
    },
];

/// One entry per operator kind, with a vector that exercises it.
pub fn zoo() -> &'static [ZooEntry] {
    ZOO
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses() {
        for e in zoo() {
            let (op, x) = e.build().unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert_eq!(x.space, op.space(), "{}", e.name);
        }
    }
}
