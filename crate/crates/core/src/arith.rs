//! Arbitrary-precision rational scalars, vectors, and matrices.
//!
//! [`Rat`] wraps a `BigRational` kept in canonical reduced form: the
//! denominator is always positive and coprime to the numerator. Every
//! arithmetic operation re-normalizes, so any observable value is
//! canonical. Serialization uses the `"p/q"` format (`"p"` when the
//! denominator is 1) shared by every file format in this repository.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Exact rational number in canonical reduced form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// `num / den`. Panics if `den` is zero.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "rational with zero denominator");
        Rat(BigRational::new(num, den))
    }

    /// 2^exp for any integer exponent.
    pub fn pow2(exp: i64) -> Self {
        let one = BigInt::one();
        if exp >= 0 {
            Rat(BigRational::from_integer(one << exp as usize))
        } else {
            Rat(BigRational::new(one.clone(), one << (-exp) as usize))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rat(self.0.recip())
    }

    pub fn min(self, other: Rat) -> Rat {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Rat) -> Rat {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Largest integer `<= self`.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Lossy conversion for diagnostics only; never used on a result path.
    pub fn to_f64_lossy(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    }

    /// Total bit count of the canonical representation.
    ///
    /// Numerator and denominator each contribute at least one bit, plus a
    /// two-bit tag, so that 0/1 measures 4 and 3/4 measures 6. The measure
    /// is sub-additive under multiplication up to the constant tag.
    pub fn encoding_length(&self) -> EncodingLength {
        let num_bits = self.numer().magnitude().bits().max(1);
        let den_minus_one = self.denom() - BigInt::one();
        let den_bits = den_minus_one.magnitude().bits().max(1);
        EncodingLength::from_bits(num_bits + den_bits + 2)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Error parsing a `"p/q"` rational literal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRatError(pub String);

impl FromStr for Rat {
    type Err = ParseRatError;

    /// Accepts `"p"` or `"p/q"` with an optional leading minus sign
    /// (either ASCII `-` or U+2212).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let raw = s.trim();
        let err = || ParseRatError(s.to_string());
        let (neg, body) = if let Some(rest) = raw.strip_prefix('\u{2212}') {
            (true, rest)
        } else if let Some(rest) = raw.strip_prefix('-') {
            (true, rest)
        } else {
            (false, raw)
        };
        let (num_s, den_s) = match body.split_once('/') {
            Some((n, d)) => (n, d),
            None => (body, "1"),
        };
        let num: BigInt = num_s.parse().map_err(|_| err())?;
        let den: BigInt = den_s.parse().map_err(|_| err())?;
        if den <= BigInt::zero() {
            return Err(err());
        }
        let num = if neg { -num } else { num };
        Ok(Rat(BigRational::new(num, den)))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rat(&self.0 / &rhs.0)
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        (&self).div(&rhs)
    }
}

impl Div<&Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        (&self).div(rhs)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

/// Total bit-length of all coefficients of an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct EncodingLength {
    pub bits: u64,
}

impl EncodingLength {
    pub fn from_bits(bits: u64) -> Self {
        EncodingLength { bits }
    }
}

impl Add for EncodingLength {
    type Output = EncodingLength;
    fn add(self, rhs: EncodingLength) -> EncodingLength {
        EncodingLength {
            bits: self.bits + rhs.bits,
        }
    }
}

impl std::iter::Sum for EncodingLength {
    fn sum<I: Iterator<Item = EncodingLength>>(iter: I) -> Self {
        iter.fold(EncodingLength::default(), |a, b| a + b)
    }
}

impl fmt::Display for EncodingLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.bits)
    }
}

/// Dense rational vector with an immutable dimension.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatVec {
    entries: Vec<Rat>,
}

impl RatVec {
    pub fn zeros(dim: usize) -> Self {
        RatVec {
            entries: vec![Rat::zero(); dim],
        }
    }

    pub fn from_entries(entries: Vec<Rat>) -> Self {
        RatVec { entries }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        RatVec {
            entries: values.iter().map(|&v| Rat::from_int(v)).collect(),
        }
    }

    /// Unit vector `e_i` of the given dimension.
    pub fn unit(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut v = Self::zeros(dim);
        v.entries[i] = Rat::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.entries.iter()
    }

    pub fn as_slice(&self) -> &[Rat] {
        &self.entries
    }

    pub fn set(&mut self, i: usize, value: Rat) {
        self.entries[i] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    pub fn dot(&self, other: &RatVec) -> Rat {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dimensions");
        let mut acc = Rat::zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(a * b);
            }
        }
        acc
    }

    pub fn scale(&self, c: &Rat) -> RatVec {
        RatVec {
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn add(&self, other: &RatVec) -> RatVec {
        assert_eq!(self.dim(), other.dim(), "add of mismatched dimensions");
        RatVec {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RatVec) -> RatVec {
        assert_eq!(self.dim(), other.dim(), "sub of mismatched dimensions");
        RatVec {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> RatVec {
        RatVec {
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    /// Extends with zeros up to `dim`.
    pub fn zero_padded(&self, dim: usize) -> RatVec {
        assert!(dim >= self.dim());
        let mut entries = self.entries.clone();
        entries.resize(dim, Rat::zero());
        RatVec { entries }
    }

    pub fn encoding_length(&self) -> EncodingLength {
        self.entries.iter().map(Rat::encoding_length).sum()
    }
}

impl Index<usize> for RatVec {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.entries[i]
    }
}

impl fmt::Debug for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Dense row-major rational matrix with immutable dimensions.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<RatVec>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, RatVec::dim);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.dim(), ncols, "ragged matrix rows");
            data.extend(r.entries);
        }
        RatMat {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| RatVec::from_ints(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> RatVec {
        RatVec {
            entries: self.row(r).to_vec(),
        }
    }

    pub fn row_vecs(&self) -> Vec<RatVec> {
        (0..self.rows).map(|r| self.row_vec(r)).collect()
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &RatVec) -> RatVec {
        assert_eq!(self.cols, x.dim(), "mul_vec dimension mismatch");
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut acc = Rat::zero();
            for (a, b) in self.row(r).iter().zip(x.iter()) {
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            out.push(acc);
        }
        RatVec { entries: out }
    }

    /// `A^T x`.
    pub fn tr_mul_vec(&self, x: &RatVec) -> RatVec {
        assert_eq!(self.rows, x.dim(), "tr_mul_vec dimension mismatch");
        let mut out = vec![Rat::zero(); self.cols];
        for r in 0..self.rows {
            let xr = &x[r];
            if xr.is_zero() {
                continue;
            }
            for (c, a) in self.row(r).iter().enumerate() {
                if !a.is_zero() {
                    out[c] += &(a * xr);
                }
            }
        }
        RatVec { entries: out }
    }

    pub fn transpose(&self) -> RatMat {
        let mut m = RatMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *m.get_mut(c, r) = self.get(r, c).clone();
            }
        }
        m
    }

    /// `x^T A y`, the bilinear form.
    pub fn bilinear(&self, x: &RatVec, y: &RatVec) -> Rat {
        self.mul_vec(y).dot(x)
    }

    /// Exact determinant by fraction-preserving Gaussian elimination.
    pub fn determinant(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.get(r, col).is_zero());
            let Some(pivot) = pivot else {
                return Rat::zero();
            };
            if pivot != col {
                for c in 0..n {
                    let a = m.get(pivot, c).clone();
                    let b = m.get(col, c).clone();
                    *m.get_mut(pivot, c) = b;
                    *m.get_mut(col, c) = a;
                }
                det = -det;
            }
            let p = m.get(col, col).clone();
            det = det * &p;
            for r in col + 1..n {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col) / &p;
                for c in col..n {
                    let delta = &factor * m.get(col, c);
                    *m.get_mut(r, c) -= &delta;
                }
            }
        }
        det
    }

    pub fn encoding_length(&self) -> EncodingLength {
        self.data.iter().map(Rat::encoding_length).sum()
    }
}

impl fmt::Debug for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row_vec(r))?;
        }
        Ok(())
    }
}

/// Total encoding length of one inequality `a^T x <= b` (or equality),
/// summed entrywise over the coefficients and the bound.
pub fn inequality_encoding_length(coeffs: &RatVec, bound: &Rat) -> EncodingLength {
    coeffs.encoding_length() + bound.encoding_length()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form_after_arithmetic() {
        let a = Rat::new(2, 4);
        assert_eq!(a, Rat::new(1, 2));
        assert_eq!(a.to_string(), "1/2");
        let b = Rat::new(-3, -6);
        assert_eq!(b.to_string(), "1/2");
        let c = Rat::new(1, -2);
        assert!(c.denom() > &num_bigint::BigInt::from(0));
        assert_eq!(c.to_string(), "-1/2");
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "7", "-7", "3/4", "-3/4", "22/7"] {
            assert_eq!(rat(s).to_string(), s);
        }
        // Unicode minus accepted on input.
        assert_eq!(rat("\u{2212}3/4"), Rat::new(-3, 4));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn encoding_length_examples() {
        assert_eq!(Rat::new(0, 1).encoding_length().bits, 4);
        assert_eq!(Rat::new(3, 4).encoding_length().bits, 6);
        // Inequality length is the sum of the three coefficient lengths.
        let coeffs = RatVec::from_entries(vec![Rat::new(3, 4), Rat::new(-1, 2)]);
        let bound = Rat::from_int(5);
        let expect = Rat::new(3, 4).encoding_length()
            + Rat::new(-1, 2).encoding_length()
            + Rat::from_int(5).encoding_length();
        assert_eq!(inequality_encoding_length(&coeffs, &bound), expect);
    }

    #[test]
    fn determinant_small() {
        let m = RatMat::from_ints(&[&[1, 2], &[3, 4]]);
        assert_eq!(m.determinant(), Rat::from_int(-2));
        let id = RatMat::identity(4);
        assert_eq!(id.determinant(), Rat::one());
        let sing = RatMat::from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.determinant(), Rat::zero());
    }

    #[test]
    fn matrix_vector_products() {
        let m = RatMat::from_ints(&[&[1, -1], &[-1, 1]]);
        let x = RatVec::from_entries(vec![Rat::new(1, 2), Rat::new(1, 2)]);
        assert!(m.mul_vec(&x).is_zero());
        let e0 = RatVec::unit(2, 0);
        assert_eq!(m.tr_mul_vec(&e0), RatVec::from_ints(&[1, -1]));
        assert_eq!(m.bilinear(&e0, &e0), Rat::one());
    }

    proptest! {
        #[test]
        fn prop_always_reduced(n in -200i64..200, d in 1i64..200) {
            let r = Rat::new(n, d);
            let g = num_integer::gcd(r.numer().clone(), r.denom().clone());
            prop_assert!(g == num_bigint::BigInt::from(1) || r.is_zero());
            prop_assert!(r.denom() > &num_bigint::BigInt::from(0));
        }

        #[test]
        fn prop_encoding_subadditive_mul(
            a in -100i64..100, b in 1i64..100, c in -100i64..100, d in 1i64..100,
        ) {
            let x = Rat::new(a, b);
            let y = Rat::new(c, d);
            let lhs = (&x * &y).encoding_length().bits;
            prop_assert!(lhs <= x.encoding_length().bits + y.encoding_length().bits + 2);
        }

        #[test]
        fn prop_parse_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = Rat::new(n, d);
            let back: Rat = r.to_string().parse().unwrap();
            prop_assert_eq!(back, r);
        }
    }
}
