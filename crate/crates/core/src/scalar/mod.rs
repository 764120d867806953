//! Exact scalars: rational functions in `v = q^{1/d}` with rational
//! coefficients, the bar involution `v -> 1/v`, and balanced q-integers.

mod field;
mod parse;
mod poly;
mod ratfunc;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use field::Field;
pub use poly::Poly;
pub use ratfunc::RatFunc;

/// The working scalar field `Q(q^{1/d})`.
pub type Scalar = RatFunc<BigRational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalars from different fields: d = {left} and d = {right}")]
    FieldMismatch { left: u32, right: u32 },
    #[error("negative argument {0} to a q-combinatorial function")]
    NegativeArgument(i64),
    #[error("cannot parse scalar {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn from_int(n: i64) -> Self {
        Scalar::constant(rat(n))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::constant(r)
    }

    /// `q^(num/den)` in the field with parameter `d`; errors unless
    /// `d * num / den` is an integer.
    pub fn q_pow_frac(num: i64, den: i64, d: u32) -> Result<Self, ScalarError> {
        let scaled = num * d as i64;
        if den == 0 || scaled % den != 0 {
            return Err(ScalarError::Parse {
                input: format!("q^({num}/{den})"),
                reason: format!("exponent is not in (1/{d})Z"),
            });
        }
        Ok(Scalar::v_pow(scaled / den, d))
    }

    /// `q^n` for integer `n`.
    pub fn q_pow(n: i64, d: u32) -> Self {
        Scalar::v_pow(n * d as i64, d)
    }

    /// Parse the textual grammar: integers, `q`, `q^(a/b)`, `+ - * / ( )`.
    pub fn parse(s: &str, d: u32) -> Result<Self, ScalarError> {
        parse::parse(s, d)
    }

    /// Value at a rational point `v`, or `None` at a pole.
    pub fn eval_at(&self, v: &BigRational) -> Option<BigRational> {
        self.eval(v)
    }
}

/// Balanced q-integer `[n]` for `q_i = v^e`: `(q_i^n - q_i^{-n}) / (q_i - q_i^{-1})`.
pub fn qint_v(n: i64, e: i64, d: u32) -> Result<Scalar, ScalarError> {
    if n < 0 {
        return Err(ScalarError::NegativeArgument(n));
    }
    let mut acc = Scalar::zero().with_d(d);
    for k in 0..n {
        acc += &Scalar::v_pow(e * (n - 1 - 2 * k), d);
    }
    Ok(acc)
}

/// `[n]! = [1][2]...[n]` for `q_i = v^e`.
pub fn qfactorial_v(n: i64, e: i64, d: u32) -> Result<Scalar, ScalarError> {
    if n < 0 {
        return Err(ScalarError::NegativeArgument(n));
    }
    let mut acc = Scalar::one().with_d(d);
    for k in 1..=n {
        acc *= &qint_v(k, e, d)?;
    }
    Ok(acc)
}

/// Balanced q-binomial `[m choose n]` for `q_i = v^e`, computed by the Pascal
/// rule `[m, n] = q_i^{-n} [m-1, n] + q_i^{m-n} [m-1, n-1]`.
pub fn qbinom_v(m: i64, n: i64, e: i64, d: u32) -> Result<Scalar, ScalarError> {
    if m < 0 {
        return Err(ScalarError::NegativeArgument(m));
    }
    if n < 0 {
        return Err(ScalarError::NegativeArgument(n));
    }
    if n > m {
        return Ok(Scalar::zero().with_d(d));
    }
    let mut row = vec![Scalar::one().with_d(d)];
    for mm in 1..=m {
        let mut next = Vec::with_capacity(row.len() + 1);
        for nn in 0..=mm.min(n) {
            let mut v = Scalar::zero().with_d(d);
            if nn < mm && (nn as usize) < row.len() {
                v += &(&Scalar::v_pow(-e * nn, d) * &row[nn as usize]);
            }
            if nn >= 1 {
                v += &(&Scalar::v_pow(e * (mm - nn), d) * &row[nn as usize - 1]);
            }
            next.push(v);
        }
        row = next;
    }
    Ok(row[n as usize].clone())
}

fn fmt_exponent(k: i64, d: u32) -> String {
    let d = d.max(1) as i64;
    let g = num_integer::gcd(k.abs(), d);
    let (a, b) = (k / g, d / g);
    match (a, b) {
        (1, 1) => "q".to_string(),
        (a, 1) if a > 0 => format!("q^{a}"),
        (a, 1) => format!("q^({a})"),
        (a, b) => format!("q^({a}/{b})"),
    }
}

/// Writes `sum_k c_k v^{k+shift}` in the q-grammar, highest power first.
fn fmt_laurent(p: &Poly<BigRational>, shift: i64, d: u32) -> String {
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let e = k as i64 + shift;
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff = if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        };
        if e == 0 {
            out.push_str(&coeff);
        } else if a.is_one() {
            out.push_str(&fmt_exponent(e, d));
        } else {
            out.push_str(&coeff);
            out.push('*');
            out.push_str(&fmt_exponent(e, d));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.d();
        if self.is_laurent() {
            let shift = -(self.denom().degree().unwrap_or(0) as i64);
            return f.write_str(&fmt_laurent(self.numer(), shift, d));
        }
        // Pull the power of v out of the denominator so both parts print as
        // ordinary Laurent polynomials.
        let val = self.denom().valuation();
        let den = self.denom().shift_down(val);
        write!(
            f,
            "({})/({})",
            fmt_laurent(self.numer(), -(val as i64), d),
            fmt_laurent(&den, 0, d)
        )
    }
}
