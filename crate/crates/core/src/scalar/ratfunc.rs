//! Reduced rational functions in one variable `v`.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::field::Field;
use super::poly::Poly;
use super::ScalarError;

/// Rational function `num / den` in `v`, kept in canonical form:
/// `gcd(num, den) = 1`, `den` monic, and zero is `0 / 1`.
///
/// `d` records which field `Q(q^{1/d})` the variable `v = q^{1/d}` belongs to.
/// `d = 0` marks a value that does not depend on `v` having been fixed yet
/// (constants built without a datum); it combines with any `d`.
#[derive(Clone, Debug)]
pub struct RatFunc<F: Field> {
    num: Poly<F>,
    den: Poly<F>,
    d: u32,
}

fn merge_d(a: u32, b: u32) -> Result<u32, ScalarError> {
    match (a, b) {
        (0, x) | (x, 0) => Ok(x),
        (x, y) if x == y => Ok(x),
        (x, y) => Err(ScalarError::FieldMismatch { left: x, right: y }),
    }
}

/// `gcd` with shortcuts for the frequent cases of a unit or a pure power of `v`.
fn quick_gcd<F: Field>(a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
    if a.degree() == Some(0) || b.degree() == Some(0) {
        return Poly::one();
    }
    if is_monomial(a) || is_monomial(b) {
        let k = if a.is_zero() {
            b.valuation()
        } else if b.is_zero() {
            a.valuation()
        } else {
            a.valuation().min(b.valuation())
        };
        return Poly::monomial(F::one(), k);
    }
    Poly::gcd(a, b)
}

fn is_monomial<F: Field>(p: &Poly<F>) -> bool {
    match p.degree() {
        Some(k) => p.valuation() == k,
        None => false,
    }
}

impl<F: Field> RatFunc<F> {
    /// Builds `num / den` and reduces it.
    pub fn new(num: Poly<F>, den: Poly<F>, d: u32) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::reduce(num, den, d))
    }

    fn reduce(num: Poly<F>, den: Poly<F>, d: u32) -> Self {
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(), d };
        }
        let g = quick_gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let (lead, den) = den.monic_parts();
        let num = if lead.is_one() {
            num
        } else {
            num.scale(&lead.inv().expect("nonzero"))
        };
        RatFunc { num, den, d }
    }

    pub fn from_poly(num: Poly<F>, d: u32) -> Self {
        RatFunc { num, den: Poly::one(), d }
    }

    pub fn constant(c: F) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::one(), d: 0 }
    }

    /// `v^e` in the field with parameter `d`.
    pub fn v_pow(e: i64, d: u32) -> Self {
        let m = Poly::monomial(F::one(), e.unsigned_abs() as usize);
        if e >= 0 {
            RatFunc { num: m, den: Poly::one(), d }
        } else {
            RatFunc { num: Poly::one(), den: m, d }
        }
    }

    pub fn numer(&self) -> &Poly<F> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<F> {
        &self.den
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Same value, tagged with the field parameter `d`.
    pub fn with_d(mut self, d: u32) -> Self {
        self.d = d;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.degree().unwrap_or(0) == 0
    }

    /// True when the denominator is a power of `v`.
    pub fn is_laurent(&self) -> bool {
        is_monomial(&self.den)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = merge_d(self.d, other.d)?;
        if other.num.is_zero() {
            return Ok(self.clone().with_d(d));
        }
        if self.num.is_zero() {
            return Ok(other.clone().with_d(d));
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return Ok(RatFunc { num, den: Poly::one(), d });
            }
            return Ok(Self::reduce(num, self.den.clone(), d));
        }
        let g = quick_gcd(&self.den, &other.den);
        let (bd, dd) = if g.is_one() {
            (self.den.clone(), other.den.clone())
        } else {
            (self.den.div_exact(&g).expect("divides"), other.den.div_exact(&g).expect("divides"))
        };
        let num = self.num.mul(&dd).add(&other.num.mul(&bd));
        let den = self.den.mul(&dd);
        Ok(Self::reduce(num, den, d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        let d = merge_d(self.d, other.d)?;
        if self.num.is_zero() || other.num.is_zero() {
            return Ok(RatFunc { num: Poly::zero(), den: Poly::one(), d });
        }
        if self.den.is_one() && other.den.is_one() {
            return Ok(RatFunc { num: self.num.mul(&other.num), den: Poly::one(), d });
        }
        let g1 = quick_gcd(&self.num, &other.den);
        let g2 = quick_gcd(&other.num, &self.den);
        let a = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).expect("divides") };
        let dd = if g1.is_one() { other.den.clone() } else { other.den.div_exact(&g1).expect("divides") };
        let c = if g2.is_one() { other.num.clone() } else { other.num.div_exact(&g2).expect("divides") };
        let b = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).expect("divides") };
        let num = a.mul(&c);
        let den = b.mul(&dd);
        let (lead, den) = den.monic_parts();
        let num = if lead.is_one() { num } else { num.scale(&lead.inv().expect("nonzero")) };
        Ok(RatFunc { num, den, d })
    }

    pub fn try_inv(&self) -> Result<Self, ScalarError> {
        if self.num.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let (lead, num) = self.num.monic_parts();
        let inv = lead.inv().expect("nonzero");
        Ok(RatFunc { num: self.den.scale(&inv), den: num, d: self.d })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.try_mul(&other.try_inv()?)
    }

    pub fn neg_ref(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone(), d: self.d }
    }

    pub fn pow(&self, e: i32) -> Result<Self, ScalarError> {
        let base = if e < 0 { self.try_inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k), d: self.d })
    }

    /// The substitution `v -> 1/v`.
    pub fn bar(&self) -> Self {
        if self.num.is_zero() {
            return self.clone();
        }
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        // num(1/v)/den(1/v) = v^dd rev(num) / (v^dn rev(den))
        let num = self.num.reversed().shift_up(dd);
        let den = self.den.reversed().shift_up(dn);
        Self::reduce(num, den, self.d)
    }

    /// Value at `v = x`; `None` if `x` is a pole.
    pub fn eval(&self, x: &F) -> Option<F> {
        self.num.eval(x).div_ref(&self.den.eval(x))
    }
}

impl<F: Field> PartialEq for RatFunc<F> {
    fn eq(&self, other: &Self) -> bool {
        if self.num != other.num || self.den != other.den {
            return false;
        }
        self.d == other.d || self.d == 0 || other.d == 0 || self.is_constant()
    }
}

impl<F: Field> Zero for RatFunc<F> {
    fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one(), d: 0 }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: Field> One for RatFunc<F> {
    fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one(), d: 0 }
    }

    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
}

// Operator impls panic on a field mismatch or division by zero; the
// `try_*` methods are the fallible forms.
impl<F: Field> Add for RatFunc<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<F: Field> Sub for RatFunc<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<F: Field> Mul for RatFunc<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<F: Field> Div for RatFunc<F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.try_div(&rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a, F: Field> Add<&'a RatFunc<F>> for &'a RatFunc<F> {
    type Output = RatFunc<F>;
    fn add(self, rhs: &RatFunc<F>) -> RatFunc<F> {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a, F: Field> Sub<&'a RatFunc<F>> for &'a RatFunc<F> {
    type Output = RatFunc<F>;
    fn sub(self, rhs: &RatFunc<F>) -> RatFunc<F> {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a, F: Field> Mul<&'a RatFunc<F>> for &'a RatFunc<F> {
    type Output = RatFunc<F>;
    fn mul(self, rhs: &RatFunc<F>) -> RatFunc<F> {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a, F: Field> Div<&'a RatFunc<F>> for &'a RatFunc<F> {
    type Output = RatFunc<F>;
    fn div(self, rhs: &RatFunc<F>) -> RatFunc<F> {
        self.try_div(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<F: Field> Neg for RatFunc<F> {
    type Output = Self;
    fn neg(self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den, d: self.d }
    }
}

impl<F: Field> AddAssign<&RatFunc<F>> for RatFunc<F> {
    fn add_assign(&mut self, rhs: &RatFunc<F>) {
        *self = self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"));
    }
}

impl<F: Field> SubAssign<&RatFunc<F>> for RatFunc<F> {
    fn sub_assign(&mut self, rhs: &RatFunc<F>) {
        *self = self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"));
    }
}

impl<F: Field> MulAssign<&RatFunc<F>> for RatFunc<F> {
    fn mul_assign(&mut self, rhs: &RatFunc<F>) {
        *self = self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"));
    }
}

impl<F: Field> Field for RatFunc<F> {
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }

    fn from_i64(n: i64) -> Self {
        Self::constant(F::from_i64(n))
    }
}
