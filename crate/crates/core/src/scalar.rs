//! Scalars with an exact track.
//!
//! Coordinates are Gaussian rationals whenever the operator allows it, exact
//! roots of unity (a Gaussian rational times `e^{2πi t}` with rational `t`)
//! when a phase is involved, and complex floats otherwise. Mixing any value
//! with a float degrades to float; nothing ever silently goes the other way.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;
pub type GaussQ = Complex<BigRational>;
pub type C64 = Complex<f64>;

/// A fraction of a full turn, kept reduced into `[0, 1)`.
pub type Turn = Ratio<i64>;

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussQ),
    /// `scale · e^{2πi·turn}`; never holds a turn that is a multiple of 1/4.
    Root { scale: GaussQ, turn: Turn },
    Float(C64),
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact conversion of a finite float into a rational.
pub fn f64_to_rat(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

/// `gcd(a, b)` for nonnegative inputs. Falls back to the library only when
/// both are large and neither is a power of two; its binary algorithm is
/// quadratic in the bit length even against tiny operands.
fn fast_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let (small, big) = if a.bits() <= b.bits() { (a, b) } else { (b, a) };
    if let Some(s) = small.to_u64() {
        let r = (big % small).to_u64().expect("remainder below a u64");
        return BigInt::from(r.gcd(&s));
    }
    let pow2 = |x: &BigInt| x.trailing_zeros() == Some(x.bits() - 1);
    if pow2(a) || pow2(b) {
        let tz = a.trailing_zeros().unwrap_or(0).min(b.trailing_zeros().unwrap_or(0));
        return BigInt::one() << tz;
    }
    a.gcd(b)
}

/// `n/d` in lowest terms with a positive denominator.
fn reduced(mut n: BigInt, mut d: BigInt) -> Rational {
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    if d.is_one() {
        return Ratio::new_raw(n, d);
    }
    let g = fast_gcd(&n.abs(), &d);
    if !g.is_one() {
        n /= &g;
        d /= &g;
    }
    Ratio::new_raw(n, d)
}

/// Henrici's sum: only the denominators' common factor `g` needs a gcd
/// against the numerator, never the full product.
fn rat_add(a: &Rational, b: &Rational) -> Rational {
    if a.denom() == b.denom() {
        return reduced(a.numer() + b.numer(), a.denom().clone());
    }
    let g = fast_gcd(a.denom(), b.denom());
    if g.is_one() {
        return Ratio::new_raw(a.numer() * b.denom() + b.numer() * a.denom(), a.denom() * b.denom());
    }
    let (ad, bd) = (a.denom() / &g, b.denom() / &g);
    let t = a.numer() * &bd + b.numer() * &ad;
    if t.is_zero() {
        return Rational::zero();
    }
    let g2 = fast_gcd(&t.abs(), &g);
    if g2.is_one() {
        Ratio::new_raw(t, ad * b.denom())
    } else {
        Ratio::new_raw(t / &g2, ad * (b.denom() / &g2))
    }
}

fn gauss_add(x: &GaussQ, y: &GaussQ) -> GaussQ {
    gauss(rat_add(&x.re, &y.re), rat_add(&x.im, &y.im))
}

fn gauss_mul(x: &GaussQ, y: &GaussQ) -> GaussQ {
    gauss(
        rat_add(&rat_mul(&x.re, &y.re), &-rat_mul(&x.im, &y.im)),
        rat_add(&rat_mul(&x.re, &y.im), &rat_mul(&x.im, &y.re)),
    )
}

/// Cross-cancels before multiplying: with both inputs reduced, the product of
/// the cancelled parts is already in lowest terms.
fn rat_mul(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    let g1 = fast_gcd(&a.numer().abs(), b.denom());
    let g2 = fast_gcd(&b.numer().abs(), a.denom());
    let (an, bd) = if g1.is_one() { (a.numer().clone(), b.denom().clone()) } else { (a.numer() / &g1, b.denom() / &g1) };
    let (bn, ad) = if g2.is_one() { (b.numer().clone(), a.denom().clone()) } else { (b.numer() / &g2, a.denom() / &g2) };
    Ratio::new_raw(an * bn, ad * bd)
}

/// Approximate `log₂|r|`, finite even when `r` is far outside the f64 range.
pub fn rat_log2_abs(r: &Rational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    big_log2(r.numer()) - big_log2(r.denom())
}

fn big_log2(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(|v| v.abs().log2()).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(1.0);
    top.log2() + shift as f64
}

fn gauss(re: Rational, im: Rational) -> GaussQ {
    Complex::new(re, im)
}

fn gauss_to_c64(z: &GaussQ) -> C64 {
    C64::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

fn reduce_turn(t: Turn) -> Turn {
    let d = *t.denom();
    let n = t.numer().mod_floor(&d);
    Ratio::new(n, d)
}

/// `e^{2πi t}` when it is a Gaussian integer unit.
fn quarter_unit(t: &Turn) -> Option<GaussQ> {
    let t = reduce_turn(*t);
    let four = t * Ratio::from_integer(4);
    if !four.is_integer() {
        return None;
    }
    let z = Rational::zero();
    let o = Rational::one();
    Some(match four.to_integer() {
        0 => gauss(o, z),
        1 => gauss(z, o),
        2 => gauss(-o, z),
        _ => gauss(z, -o),
    })
}

fn turn_cis(t: &Turn) -> C64 {
    let t = reduce_turn(*t);
    let angle = 2.0 * std::f64::consts::PI * (*t.numer() as f64) / (*t.denom() as f64);
    C64::from_polar(1.0, angle)
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(GaussQ::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(GaussQ::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::real(Rational::from_integer(BigInt::from(n)))
    }

    pub fn real(r: Rational) -> Self {
        Scalar::Exact(gauss(r, Rational::zero()))
    }

    pub fn gaussian(re: Rational, im: Rational) -> Self {
        Scalar::Exact(gauss(re, im))
    }

    pub fn imag_unit() -> Self {
        Scalar::Exact(gauss(Rational::zero(), Rational::one()))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(C64::new(re, im))
    }

    /// `scale · e^{2πi t}`, normalized so that quarter turns stay Gaussian.
    pub fn root(scale: GaussQ, turn: Turn) -> Self {
        let turn = reduce_turn(turn);
        if scale.is_zero() {
            return Scalar::Exact(scale);
        }
        match quarter_unit(&turn) {
            Some(unit) => Scalar::Exact(scale * unit),
            None => Scalar::Root { scale, turn },
        }
    }

    /// The unimodular number `e^{2πi t}`.
    pub fn turn(t: Turn) -> Self {
        Scalar::root(GaussQ::one(), t)
    }

    /// `e^{iθ}` in floating point.
    pub fn cis(theta: f64) -> Self {
        Scalar::Float(C64::from_polar(1.0, theta))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Float(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(z) => z.is_zero(),
            Scalar::Root { scale, .. } => scale.is_zero(),
            Scalar::Float(z) => *z == C64::zero(),
        }
    }

    pub fn to_c64(&self) -> C64 {
        match self {
            Scalar::Exact(z) => gauss_to_c64(z),
            Scalar::Root { scale, turn } => gauss_to_c64(scale) * turn_cis(turn),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_c64())
    }

    /// The value as a real rational, if it is one.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(z) if z.im.is_zero() => Some(&z.re),
            _ => None,
        }
    }

    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Exact(z) => exact_abs(z),
            Scalar::Root { scale, .. } => exact_abs(scale),
            Scalar::Float(z) => z.norm(),
        }
    }

    /// `|z|²`, exact when possible.
    pub fn abs_sq_exact(&self) -> Option<Rational> {
        match self {
            Scalar::Exact(z) | Scalar::Root { scale: z, .. } => {
                Some(&z.re * &z.re + &z.im * &z.im)
            }
            Scalar::Float(_) => None,
        }
    }

    /// Approximate `log₂|z|`; stays finite where `abs` would overflow.
    pub fn log2_abs(&self) -> f64 {
        match self {
            Scalar::Exact(z) | Scalar::Root { scale: z, .. } => {
                let a = rat_log2_abs(&z.re);
                let b = rat_log2_abs(&z.im);
                let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                if lo == f64::NEG_INFINITY {
                    return hi;
                }
                hi + 0.5 * (2f64.powf(2.0 * (lo - hi))).ln_1p() / std::f64::consts::LN_2
            }
            Scalar::Float(z) => z.norm().log2(),
        }
    }

    /// Exact equality when both sides are exact, `None` if a float is involved.
    pub fn exact_eq(&self, other: &Scalar) -> Option<bool> {
        match (self, other) {
            (Scalar::Float(_), _) | (_, Scalar::Float(_)) => None,
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a == b),
            (Scalar::Root { scale: a, turn: s }, Scalar::Root { scale: b, turn: t }) => {
                Some(s == t && a == b)
            }
            // A normalized root is never a Gaussian rational unless its scale vanishes.
            _ => Some(self.is_zero() && other.is_zero()),
        }
    }

    /// The polar angle as an exact turn when available.
    pub fn exact_turn(&self) -> Option<Turn> {
        match self {
            Scalar::Root { scale, turn } if scale.is_one() => Some(*turn),
            Scalar::Exact(z) => {
                let z0 = Rational::zero();
                let o = Rational::one();
                if z.re == o && z.im == z0 {
                    Some(Ratio::from_integer(0))
                } else if z.re.is_zero() && z.im == o {
                    Some(Ratio::new(1, 4))
                } else if z.re == -o.clone() && z.im.is_zero() {
                    Some(Ratio::new(1, 2))
                } else if z.re.is_zero() && z.im == -o {
                    Some(Ratio::new(3, 4))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// `|zⁿ − 1|` computed without accumulating rounding for exact turns.
    pub fn pow_distance_to_one(&self, n: u64) -> f64 {
        if let Some(t) = self.exact_turn() {
            let d = *t.denom() as u128;
            let num = (*t.numer() as u128 * n as u128) % d;
            let frac = num as f64 / d as f64;
            return 2.0 * (std::f64::consts::PI * frac).sin().abs();
        }
        let z = self.to_c64();
        let (r, theta) = z.to_polar();
        let angle = theta * n as f64;
        (C64::from_polar(r.powf(n as f64), angle) - C64::one()).norm()
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(z.conj()),
            Scalar::Root { scale, turn } => Scalar::root(scale.conj(), -*turn),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn recip(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Exact(z) => Scalar::Exact(gauss_inv(z)),
            Scalar::Root { scale, turn } => Scalar::root(gauss_inv(scale), -*turn),
            Scalar::Float(z) => Scalar::Float(z.inv()),
        })
    }

    pub fn pow(&self, mut n: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Round-trippable literal.
    /// Text that parses back to the same scalar, floats included.
    pub fn literal(&self) -> String {
        match self {
            Scalar::Float(z) => {
                let part = |v: f64| {
                    let d = format!("{:?}", v.abs());
                    if d.contains(['e', 'i', 'N']) {
                        let r = f64_to_rat(v.abs()).unwrap_or_else(|| Rational::from_integer(0.into()));
                        format!("({})", r)
                    } else {
                        d
                    }
                };
                let sign = |v: f64| if v < 0.0 { "-" } else { "" };
                if z.im == 0.0 {
                    format!("float({}{})", sign(z.re), part(z.re))
                } else {
                    let op = if z.im < 0.0 { "-" } else { "+" };
                    format!("float({}{}{op}{} i)", sign(z.re), part(z.re), part(z.im))
                }
            }
            _ => self.to_string(),
        }
    }
}

fn exact_abs(z: &GaussQ) -> f64 {
    if z.im.is_zero() {
        return rat_to_f64(&z.re).abs();
    }
    if z.re.is_zero() {
        return rat_to_f64(&z.im).abs();
    }
    let sq = &z.re * &z.re + &z.im * &z.im;
    let v = rat_to_f64(&sq);
    if v.is_finite() && v > 0.0 {
        v.sqrt()
    } else {
        rat_log2_abs(&sq).mul_add(0.5, 0.0).exp2()
    }
}

fn gauss_inv(z: &GaussQ) -> GaussQ {
    let den = &z.re * &z.re + &z.im * &z.im;
    gauss(&z.re / &den, -(&z.im / &den))
}

fn mul(a: &Scalar, b: &Scalar) -> Scalar {
    use Scalar::*;
    match (a, b) {
        (Float(x), y) | (y, Float(x)) => Float(x * y.to_c64()),
        // real operands skip the three products that would vanish
        (Exact(x), Exact(y)) if x.im.is_zero() && y.im.is_zero() => Exact(gauss(rat_mul(&x.re, &y.re), Rational::zero())),
        (Exact(x), Exact(y)) => Exact(gauss_mul(x, y)),
        (Exact(x), Root { scale, turn }) | (Root { scale, turn }, Exact(x)) => {
            Scalar::root(x * scale, *turn)
        }
        (Root { scale: s1, turn: t1 }, Root { scale: s2, turn: t2 }) => {
            match t1.numer().checked_mul(*t2.denom()).and_then(|a| {
                t2.numer()
                    .checked_mul(*t1.denom())
                    .and_then(|b| a.checked_add(b))
                    .zip(t1.denom().checked_mul(*t2.denom()))
            }) {
                Some((n, d)) => Scalar::root(s1 * s2, Ratio::new(n, d)),
                None => Float(a.to_c64() * b.to_c64()),
            }
        }
    }
}

fn add(a: &Scalar, b: &Scalar) -> Scalar {
    use Scalar::*;
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    match (a, b) {
        (Exact(x), Exact(y)) if x.im.is_zero() && y.im.is_zero() => Exact(gauss(rat_add(&x.re, &y.re), Rational::zero())),
        (Exact(x), Exact(y)) => Exact(gauss_add(x, y)),
        (Root { scale: s1, turn: t1 }, Root { scale: s2, turn: t2 }) if t1 == t2 => {
            Scalar::root(s1 + s2, *t1)
        }
        _ => Float(a.to_c64() + b.to_c64()),
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        mul(self, rhs)
    }
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        add(self, rhs)
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(z) => Scalar::Exact(-z.clone()),
            Scalar::Root { scale, turn } => Scalar::root(-scale.clone(), *turn),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        add(self, &-rhs)
    }
}

fn fmt_rat(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_gauss(z: &GaussQ) -> String {
    match (z.re.is_zero(), z.im.is_zero()) {
        (_, true) => fmt_rat(&z.re),
        (true, false) => format!("{} i", fmt_rat(&z.im)),
        (false, false) => {
            if z.im.is_negative() {
                format!("{}-{} i", fmt_rat(&z.re), fmt_rat(&-z.im.clone()))
            } else {
                format!("{}+{} i", fmt_rat(&z.re), fmt_rat(&z.im))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) => f.write_str(&fmt_gauss(z)),
            Scalar::Root { scale, turn } => {
                let t = format!("turn({}/{})", turn.numer(), turn.denom());
                if scale.is_one() {
                    f.write_str(&t)
                } else {
                    write!(f, "({})*{}", fmt_gauss(scale), t)
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{:?}", z.re)
                } else if z.im < 0.0 {
                    write!(f, "{:?}-{:?} i", z.re, -z.im)
                } else {
                    write!(f, "{:?}+{:?} i", z.re, z.im)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_rational_ops_match_library() {
        let big = |k: u32| -> Rational { Ratio::new(BigInt::from(3).pow(k), BigInt::from(2).pow(k)) };
        for (a, b) in [(big(40), big(37)), (big(90), rat(-5, 6)), (rat(7, 1), rat(-7, 1)), (big(70), -big(70))] {
            assert_eq!(rat_add(&a, &b), &a + &b);
            assert_eq!(rat_mul(&a, &b), &a * &b);
        }
        let tenth = |k: u32| -> Rational { Ratio::new(BigInt::from(9).pow(k), BigInt::from(10).pow(k)) };
        for (a, b) in [(tenth(300), rat(-1, 1)), (tenth(300), rat(7, 6)), (tenth(5), tenth(3)), (rat(1, 6), rat(1, 3)), (rat(1, 6), rat(-1, 6)), (rat(5, 12), rat(1, 18))] {
            assert_eq!(rat_add(&a, &b), &a + &b);
        }
        let z = gauss(rat(1, 2), rat(-3, 4));
        let w = gauss(rat(5, 6), rat(1, 3));
        assert_eq!(gauss_mul(&z, &w), &z * &w);
        assert_eq!(gauss_add(&z, &w), &z + &w);
        assert_eq!(fast_gcd(&BigInt::from(12), &(BigInt::from(18) << 200u32)), BigInt::from(12));
        assert_eq!(fast_gcd(&(BigInt::from(35) << 100u32), &(BigInt::from(21) << 130u32)), BigInt::from(7) << 100u32);
    }

    #[test]
    fn quarter_turns_collapse_to_gaussian() {
        assert_eq!(Scalar::turn(Ratio::new(1, 4)), Scalar::imag_unit());
        assert_eq!(Scalar::turn(Ratio::new(5, 2)), Scalar::int(-1));
    }

    #[test]
    fn roots_of_unity_are_periodic_exactly() {
        let z = Scalar::turn(Ratio::new(1, 7));
        assert!(matches!(z, Scalar::Root { .. }));
        assert_eq!(z.pow(7), Scalar::one());
        assert_eq!(z.pow(7 * 13 + 2), z.pow(2));
        assert_eq!(z.pow(3).exact_eq(&z.pow(10)), Some(true));
    }

    #[test]
    fn mixing_with_float_degrades() {
        let z = &Scalar::int(2) * &Scalar::float(0.5, 0.0);
        assert!(!z.is_exact());
        assert_eq!(z.to_c64(), C64::new(1.0, 0.0));
    }

    #[test]
    fn log2_track_survives_huge_magnitudes() {
        let big = Scalar::int(2).pow(3000);
        assert!(big.abs().is_infinite());
        assert!((big.log2_abs() - 3000.0).abs() < 1e-9);
        let tiny = big.recip().unwrap();
        assert!((tiny.log2_abs() + 3000.0).abs() < 1e-9);
    }

    #[test]
    fn pow_distance_uses_exact_turns() {
        let z = Scalar::turn(Ratio::new(1, 3));
        assert!(z.pow_distance_to_one(3_000_000_000) < 1e-15);
        assert!((z.pow_distance_to_one(1) - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn literal_display() {
        assert_eq!(Scalar::gaussian(rat(1, 2), rat(-3, 4)).to_string(), "1/2-3/4 i");
        assert_eq!(Scalar::turn(Ratio::new(2, 5)).to_string(), "turn(2/5)");
        assert_eq!(Scalar::float(2.0, 0.0).to_string(), "2.0");
    }
}
