//! Working-precision arithmetic.
//!
//! One [`PrecisionContext`] is fixed per run. It converts a requested decimal
//! precision into a binary mantissa size with guard digits on top, constructs
//! reals at that size, and renders results back to decimal strings. A small
//! rectangular [`Complex`] type covers the map evaluations on complex
//! neighborhoods needed by the contraction check.

use crate::{Error, Result};
use rug::float::{Constant, Round};
use rug::ops::AssignRound;
use rug::Float;
use std::cmp::Ordering;

/// Arbitrary-precision real number (binary mantissa, correctly rounded).
pub type Real = Float;

/// Smallest supported working precision in decimal digits.
pub const MIN_DIGITS: u32 = 30;

/// Guard digits carried on top of the requested precision.
pub const DEFAULT_GUARD: u32 = 15;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Fixed-precision arithmetic context: requested decimal digits, guard
/// digits, and the derived binary mantissa size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    digits: u32,
    guard: u32,
    bits: u32,
}

impl PrecisionContext {
    /// Context carrying `digits` decimal digits plus the default guard.
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, DEFAULT_GUARD)
    }

    /// Context with an explicit guard-digit count.
    pub fn with_guard(digits: u32, guard: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::PrecisionTooLow { digits });
        }
        let bits = (f64::from(digits + guard) * LOG2_10).ceil() as u32 + 8;
        Ok(PrecisionContext { digits, guard, bits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Binary mantissa size used for every real in this context.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// A real at context precision from anything `rug` can assign.
    pub fn real<T>(&self, val: T) -> Real
    where
        Real: AssignRound<T, Round = Round, Ordering = Ordering>,
    {
        Real::with_val(self.bits, val)
    }

    pub fn zero(&self) -> Real {
        Real::with_val(self.bits, 0)
    }

    pub fn one(&self) -> Real {
        Real::with_val(self.bits, 1)
    }

    pub fn pi(&self) -> Real {
        Real::with_val(self.bits, Constant::Pi)
    }

    /// `10^e` for a possibly fractional exponent.
    pub fn pow10(&self, e: f64) -> Real {
        Real::with_val(self.bits, e).exp10()
    }

    /// Parses a decimal literal (`0.25`, `-1.5e-3`) at context precision.
    pub fn parse_real(&self, s: &str) -> Result<Real> {
        let incomplete = Float::parse(s)
            .map_err(|_| Error::InvalidInput(format!("cannot parse number '{s}'")))?;
        Ok(Real::with_val(self.bits, incomplete))
    }

    /// Decimal rendering with `digits` significant digits, round-to-nearest.
    ///
    /// Rejects requests for more digits than the context carries; guard
    /// digits are never rendered.
    pub fn render(&self, x: &Real, digits: u32) -> Result<String> {
        if digits == 0 || digits > self.digits {
            return Err(Error::RenderDigits { requested: digits, carried: self.digits });
        }
        if !x.is_finite() {
            return Err(Error::Numeric("cannot render a non-finite value".into()));
        }
        if x.is_zero() {
            return Ok(if digits == 1 {
                "0".into()
            } else {
                format!("0.{}", "0".repeat(digits as usize - 1))
            });
        }
        let request = digits.max(2) as usize;
        let (neg, mut ds, exp) = x.to_sign_string_exp(10, Some(request));
        let mut exp = exp.expect("finite nonzero value has an exponent");
        if digits == 1 {
            let bytes = ds.as_bytes();
            let mut lead = bytes[0] - b'0';
            if bytes[1] >= b'5' {
                lead += 1;
            }
            if lead == 10 {
                ds = "1".into();
                exp += 1;
            } else {
                ds = ((lead + b'0') as char).to_string();
            }
        }
        // Mantissa convention: value = ±0.ds × 10^exp.
        let body = if exp.abs() > 4000 {
            format!("0.{ds}e{exp}")
        } else if exp <= 0 {
            format!("0.{}{}", "0".repeat(exp.unsigned_abs() as usize), ds)
        } else if (exp as usize) >= ds.len() {
            format!("{}{}", ds, "0".repeat(exp as usize - ds.len()))
        } else {
            format!("{}.{}", &ds[..exp as usize], &ds[exp as usize..])
        };
        Ok(if neg { format!("-{body}") } else { body })
    }
}

/// Rough count of leading decimal digits on which `a` and `b` agree,
/// measured as the order-of-magnitude gap between the values and their
/// difference. Returns `u32::MAX` for exactly equal values.
pub fn agreeing_digits(a: &Real, b: &Real) -> u32 {
    if a == b {
        return u32::MAX;
    }
    let prec = a.prec().max(b.prec());
    let diff = Real::with_val(prec, a - b).abs();
    let mag_a = Real::with_val(prec, a.abs_ref());
    let mag_b = Real::with_val(prec, b.abs_ref());
    let mag = mag_a.max(&mag_b);
    if diff.is_zero() || mag.is_zero() {
        return u32::MAX;
    }
    let ratio = Real::with_val(prec, mag / diff);
    let l = ratio.ln().to_f64() / std::f64::consts::LN_10;
    if l <= 0.0 {
        0
    } else {
        l.floor() as u32
    }
}

/// Rectangular complex number over [`Real`].
#[derive(Debug, Clone)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let im = Real::with_val(re.prec(), 0);
        Complex { re, im }
    }

    fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn add(&self, o: &Complex) -> Complex {
        let p = self.prec().max(o.prec());
        Complex {
            re: Real::with_val(p, &self.re + &o.re),
            im: Real::with_val(p, &self.im + &o.im),
        }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        let p = self.prec().max(o.prec());
        Complex {
            re: Real::with_val(p, &self.re - &o.re),
            im: Real::with_val(p, &self.im - &o.im),
        }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        let p = self.prec().max(o.prec());
        let re = Real::with_val(p, &self.re * &o.re) - Real::with_val(p, &self.im * &o.im);
        let im = Real::with_val(p, &self.re * &o.im) + Real::with_val(p, &self.im * &o.re);
        Complex { re: Real::with_val(p, re), im: Real::with_val(p, im) }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let p = self.prec().max(o.prec());
        let den = Real::with_val(p, o.re.square_ref()) + Real::with_val(p, o.im.square_ref());
        let re = Real::with_val(p, &self.re * &o.re) + Real::with_val(p, &self.im * &o.im);
        let im = Real::with_val(p, &self.im * &o.re) - Real::with_val(p, &self.re * &o.im);
        Complex {
            re: Real::with_val(p, re / &den),
            im: Real::with_val(p, im / &den),
        }
    }

    pub fn scale(&self, c: &Real) -> Complex {
        let p = self.prec().max(c.prec());
        Complex {
            re: Real::with_val(p, &self.re * c),
            im: Real::with_val(p, &self.im * c),
        }
    }

    pub fn add_real(&self, c: &Real) -> Complex {
        let p = self.prec().max(c.prec());
        Complex { re: Real::with_val(p, &self.re + c), im: self.im.clone() }
    }

    pub fn abs(&self) -> Real {
        let p = self.prec();
        Real::with_val(p, self.re.hypot_ref(&self.im))
    }

    /// `sin(x+iy) = sin x cosh y + i cos x sinh y`.
    pub fn sin(&self) -> Complex {
        let p = self.prec();
        let (sx, cx) = Real::with_val(p, &self.re).sin_cos(Real::new(p));
        let chy = Real::with_val(p, self.im.cosh_ref());
        let shy = Real::with_val(p, self.im.sinh_ref());
        Complex {
            re: Real::with_val(p, sx * chy),
            im: Real::with_val(p, cx * shy),
        }
    }

    /// `cos(x+iy) = cos x cosh y − i sin x sinh y`.
    pub fn cos(&self) -> Complex {
        let p = self.prec();
        let (sx, cx) = Real::with_val(p, &self.re).sin_cos(Real::new(p));
        let chy = Real::with_val(p, self.im.cosh_ref());
        let shy = Real::with_val(p, self.im.sinh_ref());
        Complex {
            re: Real::with_val(p, cx * chy),
            im: -Real::with_val(p, sx * shy),
        }
    }
}
