//! Exact rational scalars, generic-point specialization of the ground field
//! `C(hbar, x_1, .., x_N)`, and univariate polynomials / truncated series in
//! the formal variable `u`.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(&self.0 / &rhs.0))
    }

    /// Integer power; negative exponents invert (and panic on zero).
    pub fn pow(&self, exp: i32) -> Scalar {
        if exp >= 0 {
            let mut acc = Scalar::one();
            let mut base = self.clone();
            let mut e = exp as u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = &acc * &base;
                }
                e >>= 1;
                if e > 0 {
                    base = &base * &base;
                }
            }
            acc
        } else {
            self.inv().expect("negative power of zero").pow(-exp)
        }
    }

    /// `(-1)^k`
    pub fn sign_power(k: u64) -> Scalar {
        if k % 2 == 0 {
            Scalar::one()
        } else {
            -Scalar::one()
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Scalar(BigRational::new(parse_int(n)?, d)))
            }
            None => Ok(Scalar(BigRational::from_integer(parse_int(s)?))),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a, 'b> $tr<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                Scalar($tr::$method(&self.0, &rhs.0))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($tr::$method(self.0, rhs.0))
            }
        }
        impl<'b> $tr<&'b Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                Scalar($tr::$method(self.0, &rhs.0))
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($tr::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

// ---------------------------------------------------------------------------
// Specialization environment

const MAX_REDRAWS: u32 = 1000;

/// Values of `x_1..x_N` and `hbar` at one generic rational point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecEnv {
    pub n: usize,
    pub x: Vec<Scalar>,
    pub hbar: Scalar,
    pub seed: u64,
    pub degree_cap: u32,
}

impl SpecEnv {
    /// Builds an environment from explicit values; checks the same genericity
    /// conditions as [`make_spec_env`].
    pub fn from_values(x: Vec<Scalar>, hbar: Scalar, degree_cap: u32) -> Result<SpecEnv> {
        let env = SpecEnv { n: x.len(), x, hbar, seed: 0, degree_cap };
        if env.is_generic() {
            Ok(env)
        } else {
            Err(Error::Parameter("specialization is not generic".into()))
        }
    }

    /// hbar != 0 and x_i - x_j - m*hbar != 0 for i != j, |m| <= degree_cap.
    pub fn is_generic(&self) -> bool {
        if self.hbar.is_zero() {
            return false;
        }
        let cap = self.degree_cap as i64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let diff = &self.x[i] - &self.x[j];
                for m in -cap..=cap {
                    if (&diff - &self.hbar * Scalar::from_int(m)).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The same point with `x` reindexed: `x'[k] = x[perm[k]]`.
    pub fn with_permuted_x(&self, perm: &[usize]) -> SpecEnv {
        assert_eq!(perm.len(), self.n);
        SpecEnv { x: perm.iter().map(|&k| self.x[k].clone()).collect(), ..self.clone() }
    }

    /// Seed of the `trial`-th independent environment derived from `seed`.
    pub fn trial_seed(seed: u64, trial: u32) -> u64 {
        seed.wrapping_add((trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

fn draw_rational(rng: &mut ChaCha8Rng, nonzero: bool) -> Scalar {
    loop {
        let num: i64 = rng.gen_range(-40..=40);
        let den: i64 = rng.gen_range(1..=9);
        if !(nonzero && num == 0) {
            return Scalar::new(num, den);
        }
    }
}

/// Draws a reproducible generic specialization of `x_1..x_N, hbar`.
pub fn make_spec_env(n: usize, degree_cap: u32, seed: u64) -> Result<SpecEnv> {
    if n == 0 {
        return Err(Error::Parameter("N must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REDRAWS {
        let x = (0..n).map(|_| draw_rational(&mut rng, false)).collect();
        let hbar = draw_rational(&mut rng, true);
        let env = SpecEnv { n, x, hbar, seed, degree_cap };
        if env.is_generic() {
            return Ok(env);
        }
    }
    Err(Error::GenericityExhausted(MAX_REDRAWS))
}

/// Truncation order for `u^{-1}` series: `cap * max(p_i) + N + 2`.
pub fn default_series_order(degree_cap: u32, max_part: u32, n_total: u32) -> usize {
    (degree_cap * max_part + n_total + 2) as usize
}

// ---------------------------------------------------------------------------
// Polynomials in u

/// Dense univariate polynomial, `coeffs[k]` multiplies `u^k`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct UPoly {
    coeffs: Vec<Scalar>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Scalar>) -> UPoly {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> UPoly {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> UPoly {
        UPoly::new(vec![c])
    }

    /// `u + c`
    pub fn linear(c: Scalar) -> UPoly {
        UPoly::new(vec![c, Scalar::one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(Scalar::is_one)
    }

    pub fn eval(&self, u: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc * u + c)
    }

    pub fn scale(&self, c: &Scalar) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `p(u + c)`
    pub fn shift(&self, c: &Scalar) -> UPoly {
        let lin = UPoly::linear(c.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(UPoly::zero(), |acc, a| &(&acc * &lin) + &UPoly::constant(a.clone()))
    }

    /// Lagrange interpolation through `(nodes[k], values[k])`.
    pub fn interpolate(nodes: &[Scalar], values: &[Scalar]) -> Result<UPoly> {
        assert_eq!(nodes.len(), values.len());
        let mut out = UPoly::zero();
        for (k, (xk, yk)) in nodes.iter().zip(values).enumerate() {
            if yk.is_zero() {
                continue;
            }
            let mut basis = UPoly::constant(Scalar::one());
            let mut denom = Scalar::one();
            for (m, xm) in nodes.iter().enumerate() {
                if m == k {
                    continue;
                }
                let gap = xk - xm;
                if gap.is_zero() {
                    return Err(Error::CoincidentNodes);
                }
                denom *= &gap;
                basis = &basis * &UPoly::linear(-xm);
            }
            out = &out + &basis.scale(&(yk / &denom));
        }
        Ok(out)
    }
}

/// Monic `prod (u + r)` over `roots`.
pub fn poly_from_roots(roots: &[Scalar]) -> UPoly {
    roots
        .iter()
        .fold(UPoly::constant(Scalar::one()), |acc, r| &acc * &UPoly::linear(r.clone()))
}

impl Add for &UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UPoly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, rhs: &UPoly) -> UPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UPoly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &UPoly {
    type Output = UPoly;
    fn mul(self, rhs: &UPoly) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})u"),
                _ => format!("({c})u^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// Series in u^{-1}

/// Truncated power series in `u^{-1}`; `coeffs[s]` multiplies `u^{-s}` for
/// `s = 0..=order`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct USeries {
    coeffs: Vec<Scalar>,
    order: usize,
}

impl USeries {
    pub fn new(mut coeffs: Vec<Scalar>, order: usize) -> USeries {
        assert!(order >= 1, "truncation order must be at least 1");
        coeffs.resize(order + 1, Scalar::zero());
        USeries { coeffs, order }
    }

    pub fn one(order: usize) -> USeries {
        USeries::new(vec![Scalar::one()], order)
    }

    /// `1 + a u^{-1}`
    pub fn linear(a: Scalar, order: usize) -> USeries {
        USeries::new(vec![Scalar::one(), a], order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> Scalar {
        self.coeffs.get(s).cloned().unwrap_or_default()
    }

    pub fn mul(&self, rhs: &USeries) -> USeries {
        let order = self.order.min(rhs.order);
        let mut out = vec![Scalar::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        USeries { coeffs: out, order }
    }

    pub fn inverse(&self) -> Result<USeries> {
        series_inverse(self)
    }
}

/// Inverse of a series with constant term 1, by the triangular recursion
/// `sum_{t=0}^{r} s_t * inv_{r-t} = delta_{r0}`.
pub fn series_inverse(s: &USeries) -> Result<USeries> {
    if !s.coeffs[0].is_one() {
        return Err(Error::SeriesConstantTerm(s.coeffs[0].to_string()));
    }
    let mut inv = vec![Scalar::zero(); s.order + 1];
    inv[0] = Scalar::one();
    for r in 1..=s.order {
        let acc: Scalar = (1..=r).map(|t| &s.coeffs[t] * &inv[r - t]).sum();
        inv[r] = -acc;
    }
    Ok(USeries { coeffs: inv, order: s.order })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n, d)
    }

    #[test]
    fn display_is_reduced() {
        assert_eq!(q(6, 4).to_string(), "3/2");
        assert_eq!(q(-6, 3).to_string(), "-2");
        assert_eq!(q(5, -10).to_string(), "-1/2");
        assert_eq!("-3/6".parse::<Scalar>().unwrap(), q(-1, 2));
        assert_eq!("7".parse::<Scalar>().unwrap(), q(7, 1));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
    }

    #[test]
    fn serde_as_string() {
        let s = serde_json::to_string(&q(-4, 6)).unwrap();
        assert_eq!(s, "\"-2/3\"");
        let back: Scalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q(-2, 3));
    }

    #[test]
    fn powers() {
        assert_eq!(q(2, 3).pow(3), q(8, 27));
        assert_eq!(q(2, 3).pow(-2), q(9, 4));
        assert_eq!(q(0, 1).pow(0), Scalar::one());
        assert!(Scalar::zero().inv().is_err());
    }

    #[test]
    fn env_generic_and_deterministic() {
        let a = make_spec_env(2, 4, 42).unwrap();
        let b = make_spec_env(2, 4, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.x[0], a.x[1]);
        let diff = &a.x[0] - &a.x[1];
        for m in -4..=4 {
            assert!(!(&diff - &a.hbar * Scalar::from_int(m)).is_zero());
        }
        let single = make_spec_env(1, 0, 7).unwrap();
        assert!(!single.hbar.is_zero());
        assert!(make_spec_env(0, 0, 7).is_err());
    }

    #[test]
    fn env_rejects_resonant_values() {
        let x = vec![q(3, 1), q(1, 1)];
        assert!(SpecEnv::from_values(x.clone(), q(2, 1), 1).is_err());
        assert!(SpecEnv::from_values(x.clone(), q(0, 1), 0).is_err());
        assert!(SpecEnv::from_values(x, q(3, 1), 1).is_ok());
    }

    #[test]
    fn inverse_of_one_and_geometric() {
        let one = USeries::one(5);
        assert_eq!(series_inverse(&one).unwrap(), one);
        let a = q(3, 7);
        let inv = series_inverse(&USeries::linear(a.clone(), 4)).unwrap();
        for s in 0..=4 {
            assert_eq!(inv.coeff(s), (-&a).pow(s as i32));
        }
        let bad = USeries::new(vec![q(2, 1), q(1, 1)], 3);
        assert!(matches!(series_inverse(&bad), Err(Error::SeriesConstantTerm(_))));
    }

    #[test]
    fn roots_products() {
        assert_eq!(poly_from_roots(&[]), UPoly::constant(Scalar::one()));
        assert_eq!(poly_from_roots(&[q(5, 2)]), UPoly::linear(q(5, 2)));
        let c = q(-3, 4);
        let sq = poly_from_roots(&[c.clone(), -&c]);
        assert_eq!(sq, UPoly::new(vec![-(&c * &c), Scalar::zero(), Scalar::one()]));
    }

    #[test]
    fn shift_and_eval_agree() {
        let p = UPoly::new(vec![q(1, 2), q(-3, 1), q(0, 1), q(2, 5)]);
        let c = q(7, 3);
        let shifted = p.shift(&c);
        for t in [q(0, 1), q(1, 1), q(-5, 2)] {
            assert_eq!(shifted.eval(&t), p.eval(&(&t + &c)));
        }
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = UPoly::new(vec![q(1, 2), q(-3, 1), q(4, 9)]);
        let nodes = vec![q(0, 1), q(1, 3), q(-2, 1)];
        let values: Vec<_> = nodes.iter().map(|t| p.eval(t)).collect();
        assert_eq!(UPoly::interpolate(&nodes, &values).unwrap(), p);
        // degree-0 interpolation is the point value
        assert_eq!(
            UPoly::interpolate(&[q(5, 1)], &[q(-2, 3)]).unwrap(),
            UPoly::constant(q(-2, 3))
        );
        assert_eq!(
            UPoly::interpolate(&[q(1, 1), q(1, 1)], &[q(1, 1), q(2, 1)]),
            Err(Error::CoincidentNodes)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn scalar() -> impl Strategy<Value = Scalar> {
            (-50i64..50, 1i64..20).prop_map(|(n, d)| Scalar::new(n, d))
        }

        fn series() -> impl Strategy<Value = USeries> {
            proptest::collection::vec(scalar(), 1..6).prop_map(|mut c| {
                c.insert(0, Scalar::one());
                USeries::new(c, 6)
            })
        }

        proptest! {
            #[test]
            fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
                prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
                prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
                prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
                if !b.is_zero() {
                    prop_assert_eq!(&(&a / &b) * &b, a.clone());
                }
            }

            #[test]
            fn inverse_is_involution(s in series()) {
                let inv = series_inverse(&s).unwrap();
                prop_assert_eq!(s.mul(&inv), USeries::one(6));
                prop_assert_eq!(series_inverse(&inv).unwrap(), s);
            }

            #[test]
            fn roots_concatenate(r1 in proptest::collection::vec(scalar(), 0..4),
                                 r2 in proptest::collection::vec(scalar(), 0..4)) {
                let mut both = r1.clone();
                both.extend(r2.iter().cloned());
                prop_assert_eq!(poly_from_roots(&both), &poly_from_roots(&r1) * &poly_from_roots(&r2));
            }
        }
    }
}
