//! Polynomials with arbitrary-precision coefficients.

use crate::precision::{Complex, PrecisionContext, Real};
use crate::{Error, Result};

/// Dense polynomial `c_0 + c_1 x + … + c_d x^d`.
#[derive(Debug, Clone)]
pub struct Poly {
    coeffs: Vec<Real>,
}

impl Poly {
    /// Coefficients in ascending degree order; must be nonempty.
    pub fn new(coeffs: Vec<Real>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("polynomial needs at least one coefficient".into()));
        }
        Ok(Poly { coeffs })
    }

    pub fn constant(ctx: &PrecisionContext, value: Real) -> Self {
        let _ = ctx;
        Poly { coeffs: vec![value] }
    }

    /// The monomial `x^n`.
    pub fn monomial(ctx: &PrecisionContext, n: u32) -> Self {
        let mut coeffs = vec![ctx.zero(); n as usize + 1];
        coeffs[n as usize] = ctx.one();
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn prec(&self) -> u32 {
        self.coeffs.iter().map(Real::prec).max().unwrap_or(53)
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, x: &Real) -> Real {
        let p = self.prec().max(x.prec());
        let mut acc = Real::new(p);
        for c in self.coeffs.iter().rev() {
            acc = Real::with_val(p, acc * x) + c;
        }
        Real::with_val(p, acc)
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let p = self.prec().max(z.re.prec()).max(z.im.prec());
        let mut acc = Complex::new(Real::new(p), Real::new(p));
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add_real(c);
        }
        acc
    }

    /// `a·g + b·h` coefficientwise.
    pub fn linear_combination(ctx: &PrecisionContext, a: &Real, g: &Poly, b: &Real, h: &Poly) -> Poly {
        let len = g.coeffs.len().max(h.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for i in 0..len {
            let mut term = ctx.zero();
            if let Some(c) = g.coeffs.get(i) {
                term += ctx.real(a * c);
            }
            if let Some(c) = h.coeffs.get(i) {
                term += ctx.real(b * c);
            }
            coeffs.push(term);
        }
        Poly { coeffs }
    }

    /// `Σ_j j·|c_j|`, a Lipschitz bound for the polynomial on `[0,1]`.
    pub fn derivative_l1_bound(&self, ctx: &PrecisionContext) -> Real {
        let mut acc = ctx.zero();
        for (j, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += ctx.real(j as u32) * ctx.real(c.abs_ref());
        }
        acc
    }
}
