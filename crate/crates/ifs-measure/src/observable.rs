//! Integrands.
//!
//! Three shapes cover every application here: polynomials, the
//! log-derivative observable `x ↦ −Σ_i p_i log|φ'_i(x)|` whose integral is
//! the Lyapunov exponent, and an integrand composed with a cylinder map
//! `g ∘ φ_ι` for piecewise integration. All of them extend holomorphically
//! to the complex neighborhoods used by the machinery, which is what the
//! estimator relies on.

use crate::ifs::{MapSpec, ValidatedIfs};
use crate::orbit::Word;
use crate::poly::Poly;
use crate::precision::{PrecisionContext, Real};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum Observable {
    Polynomial(Poly),
    /// `−Σ_i p_i log|φ'_i(x)|` for a constant-weight system.
    LogDerivative { weights: Vec<Real>, maps: Vec<MapSpec> },
    /// `inner ∘ φ_word`.
    Composed { inner: Box<Observable>, maps: Vec<MapSpec>, word: Word },
}

impl Observable {
    pub fn polynomial(p: Poly) -> Self {
        Observable::Polynomial(p)
    }

    pub fn constant(ctx: &PrecisionContext, value: Real) -> Self {
        Observable::Polynomial(Poly::constant(ctx, value))
    }

    /// `g(x) = x`.
    pub fn identity(ctx: &PrecisionContext) -> Self {
        Observable::Polynomial(Poly::monomial(ctx, 1))
    }

    /// `g(x) = x^n`.
    pub fn monomial(ctx: &PrecisionContext, n: u32) -> Self {
        Observable::Polynomial(Poly::monomial(ctx, n))
    }

    /// The observable whose integral is the Lyapunov exponent of the system.
    /// Requires constant weights and derivatives bounded away from zero on
    /// `[0,1]`.
    pub fn log_derivative(ifs: &ValidatedIfs) -> Result<Self> {
        let weights = ifs
            .constant_weights()
            .ok_or_else(|| {
                Error::Unsupported("log-derivative observable needs constant weights".into())
            })?
            .to_vec();
        let ctx = ifs.ctx();
        let floor = ctx.pow10(-(f64::from(ctx.digits()) / 2.0));
        for (i, map) in ifs.maps().iter().enumerate() {
            for j in 0..=64u32 {
                let x = ctx.real(rug::Rational::from((j, 64u32)));
                let d = map.deriv_real(ctx, &x)?;
                if ctx.real(d.abs_ref()) < floor {
                    return Err(Error::Validation(format!(
                        "map {} has a derivative too close to 0 on [0,1]; \
                         the log-derivative observable is unbounded",
                        i + 1
                    )));
                }
            }
        }
        Ok(Observable::LogDerivative { weights, maps: ifs.maps().to_vec() })
    }

    /// `inner ∘ φ_word` over the maps of `ifs`.
    pub fn composed_on_cylinder(inner: Observable, ifs: &ValidatedIfs, word: Word) -> Result<Self> {
        if word.symbols().iter().any(|&s| s as usize > ifs.n_maps()) {
            return Err(Error::InvalidInput("cylinder word uses an unknown map".into()));
        }
        Ok(Observable::Composed {
            inner: Box::new(inner),
            maps: ifs.maps().to_vec(),
            word,
        })
    }

    pub fn eval(&self, ctx: &PrecisionContext, x: &Real) -> Result<Real> {
        match self {
            Observable::Polynomial(p) => Ok(p.eval(x)),
            Observable::LogDerivative { weights, maps } => {
                let mut acc = ctx.zero();
                for (p, map) in weights.iter().zip(maps) {
                    let d = ctx.real(map.deriv_real(ctx, x)?.abs_ref());
                    if d.is_zero() {
                        return Err(Error::Domain(
                            "log-derivative observable at a critical point".into(),
                        ));
                    }
                    acc -= ctx.real(p * d.ln());
                }
                Ok(acc)
            }
            Observable::Composed { inner, maps, word } => {
                let mut v = x.clone();
                for pos in (0..word.len()).rev() {
                    v = maps[word.map_index(pos)].eval_real(ctx, &v)?;
                }
                inner.eval(ctx, &v)
            }
        }
    }

    /// A Lipschitz bound for the observable on `[0,1]`. Exact for
    /// polynomials; for the other shapes it combines per-map derivative
    /// bounds from the catalog's closed forms.
    pub fn lipschitz_bound(&self, ctx: &PrecisionContext) -> Result<Real> {
        match self {
            Observable::Polynomial(p) => Ok(p.derivative_l1_bound(ctx)),
            Observable::LogDerivative { weights, maps } => {
                // |d/dx log|φ'|| = |φ''/φ'|, bounded per catalog entry.
                let mut acc = ctx.zero();
                for (p, map) in weights.iter().zip(maps) {
                    acc += ctx.real(p * log_deriv_slope_bound(ctx, map)?);
                }
                Ok(acc)
            }
            Observable::Composed { inner, maps, word } => {
                let mut bound = inner.lipschitz_bound(ctx)?;
                for pos in 0..word.len() {
                    bound *= deriv_sup_on_unit(ctx, &maps[word.map_index(pos)])?;
                }
                Ok(bound)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Observable::Polynomial(p) => format!("polynomial of degree {}", p.degree()),
            Observable::LogDerivative { .. } => "log-derivative".into(),
            Observable::Composed { inner, word, .. } => {
                format!("{} on cylinder {}", inner.label(), word)
            }
        }
    }
}

/// Sup of `|φ''/φ'|` over `[0,1]`.
fn log_deriv_slope_bound(ctx: &PrecisionContext, map: &MapSpec) -> Result<Real> {
    match map {
        MapSpec::Affine { .. } => Ok(ctx.zero()),
        MapSpec::Moebius { c, d, .. } => {
            // |φ''/φ'| = |2c/(cx+d)|, monotone in x, so check the endpoints.
            let at = |x: &Real| -> Result<Real> {
                let den = ctx.real(c.value() * x) + d.value();
                if den.is_zero() {
                    return Err(Error::Domain("Moebius pole in [0,1]".into()));
                }
                Ok(ctx.real(ctx.real(c.value() * 2u32) / den).abs())
            };
            let a = at(&ctx.zero())?;
            let b = at(&ctx.one())?;
            Ok(a.max(&b))
        }
        MapSpec::SineAffine { .. } => {
            // |φ''/φ'| = (π/4)|tan(πx/4)|, maximal at x = 1 where it is π/4.
            Ok(ctx.real(ctx.pi() / 4u32))
        }
    }
}

/// Sup of `|φ'|` over `[0,1]`, from the catalog's monotonicity in each case.
fn deriv_sup_on_unit(ctx: &PrecisionContext, map: &MapSpec) -> Result<Real> {
    match map {
        MapSpec::Affine { ratio, .. } => Ok(ctx.real(ratio.value().abs_ref())),
        MapSpec::Moebius { .. } => {
            // |φ'| = |det|/(cx+d)^2 is monotone on [0,1] when the pole is
            // outside, so the endpoints dominate.
            let a = ctx.real(map.deriv_real(ctx, &ctx.zero())?.abs_ref());
            let b = ctx.real(map.deriv_real(ctx, &ctx.one())?.abs_ref());
            Ok(a.max(&b))
        }
        MapSpec::SineAffine { amplitude, .. } => {
            // |φ'| = |A|(π/4)|cos(πx/4)| peaks at x = 0.
            Ok(ctx.real(amplitude.value().abs_ref()) * ctx.real(ctx.pi() / 4u32))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{IfsConfig, Scalar, WeightSpec};
    use rug::Rational;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn s(c: &PrecisionContext, t: &str) -> Scalar {
        Scalar::parse(c, t).unwrap()
    }

    fn thirds(c: &PrecisionContext) -> ValidatedIfs {
        let maps = vec![
            MapSpec::affine(s(c, "1/3"), s(c, "0")).unwrap(),
            MapSpec::affine(s(c, "1/3"), s(c, "2/3")).unwrap(),
        ];
        let weights = WeightSpec::ConstantVector(vec![s(c, "1/3"), s(c, "2/3")]);
        ValidatedIfs::new(IfsConfig::new(c, maps, weights).unwrap(), c).unwrap()
    }

    fn moebius(c: &PrecisionContext) -> ValidatedIfs {
        let maps = vec![
            MapSpec::moebius(s(c, "0"), s(c, "1"), s(c, "1"), s(c, "2")).unwrap(),
            MapSpec::moebius(s(c, "0"), s(c, "1"), s(c, "1"), s(c, "4")).unwrap(),
        ];
        let weights = WeightSpec::ConstantVector(vec![s(c, "1/2"), s(c, "1/2")]);
        ValidatedIfs::new(IfsConfig::new(c, maps, weights).unwrap(), c).unwrap()
    }

    #[test]
    fn polynomial_eval() {
        let c = ctx();
        let g = Observable::monomial(&c, 2);
        let x = c.real(Rational::from((1, 4)));
        assert_eq!(g.eval(&c, &x).unwrap(), c.real(Rational::from((1, 16))));
    }

    #[test]
    fn log_derivative_is_constant_for_equal_ratios() {
        let c = ctx();
        let g = Observable::log_derivative(&thirds(&c)).unwrap();
        let expected = c.real(3u32).ln();
        for t in ["0", "1/2", "1"] {
            let x = c.real(Scalar::parse(&c, t).unwrap().value());
            let d = c.real(g.eval(&c, &x).unwrap() - &expected).abs();
            assert!(d < c.pow10(-38.0));
        }
    }

    #[test]
    fn log_derivative_on_moebius_at_zero() {
        let c = ctx();
        let g = Observable::log_derivative(&moebius(&c)).unwrap();
        // −(1/2)ln(1/4) − (1/2)ln(1/16) = 3 ln 2.
        let expected = c.real(2u32).ln() * 3u32;
        let d = c.real(g.eval(&c, &c.zero()).unwrap() - expected).abs();
        assert!(d < c.pow10(-38.0));
    }

    #[test]
    fn composition_applies_cylinder_map_first() {
        let c = ctx();
        let ifs = thirds(&c);
        let word = Word::parse("12", 2).unwrap();
        let g = Observable::composed_on_cylinder(Observable::monomial(&c, 2), &ifs, word).unwrap();
        // φ_1(φ_2(1/4)) = 1/4, then squared.
        let x = c.real(Rational::from((1, 4)));
        let d = c.real(g.eval(&c, &x).unwrap() - c.real(Rational::from((1, 16)))).abs();
        assert!(d < c.pow10(-38.0));
    }

    #[test]
    fn lipschitz_bounds() {
        let c = ctx();
        let p = Observable::polynomial(
            Poly::new(vec![c.real(4), c.real(-2), c.real(3)]).unwrap(),
        );
        assert_eq!(p.lipschitz_bound(&c).unwrap(), c.real(8));

        let lyap = Observable::log_derivative(&thirds(&c)).unwrap();
        assert!(lyap.lipschitz_bound(&c).unwrap().is_zero());

        let ifs = thirds(&c);
        let word = Word::parse("11", 2).unwrap();
        let composed =
            Observable::composed_on_cylinder(Observable::identity(&c), &ifs, word).unwrap();
        let expected = c.real(Rational::from((1, 9)));
        let d = c.real(composed.lipschitz_bound(&c).unwrap() - expected).abs();
        assert!(d < c.pow10(-38.0));
    }

    #[test]
    fn log_derivative_requires_constant_weights() {
        let c = ctx();
        let maps = vec![
            MapSpec::affine(s(&c, "1/3"), s(&c, "0")).unwrap(),
            MapSpec::affine(s(&c, "1/3"), s(&c, "2/3")).unwrap(),
        ];
        let ifs = ValidatedIfs::new(
            IfsConfig::new(
                &c,
                maps,
                WeightSpec::FunctionWeights(vec![vec![s(&c, "1/3")], vec![s(&c, "2/3")]]),
            )
            .unwrap(),
            &c,
        )
        .unwrap();
        assert!(matches!(
            Observable::log_derivative(&ifs),
            Err(Error::Unsupported(_))
        ));
    }
}
