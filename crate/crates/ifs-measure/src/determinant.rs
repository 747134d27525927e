//! Coefficient recursions and the estimate series.
//!
//! The traces determine two coefficient sequences:
//!
//! ```text
//! a_0 = 1,  a_n = −(1/n) Σ_{m=1}^{n} t_m a_{n−m}
//! α_0 = 0,  α_n = −Σ_{m=1}^{n} (τ_m / m) a_{n−m}
//! ```
//!
//! and the level-`k` approximation of `∫ g dμ` is the ratio of partial sums
//!
//! ```text
//! μ_k(g) = (Σ_{n≤k} α_n) / (Σ_{n≤k} n·a_n).
//! ```
//!
//! The recursion is the production path (O(k²) products). An independent
//! expansion over integer compositions, exponentially slower but derived
//! from a different formula, is kept as a cross-check oracle:
//!
//! ```text
//! a_n = Σ_{l≥1} ((−1)^l / l!) Σ_{n_1+…+n_l = n} Π_i t_{n_i}/n_i
//! ```
//!
//! with `α_n` the same sum after replacing one factor `t_{n_j}/n_j` by
//! `τ_{n_j}/n_j` in all possible positions.

use crate::precision::{agreeing_digits, PrecisionContext, Real};
use crate::trace::TraceTable;
use crate::{Error, Result};

/// `a_0..a_k` and `α_0..α_k`.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub k: u32,
    pub a: Vec<Real>,
    pub alpha: Vec<Real>,
}

/// The production recursion.
pub fn coeffs_recursive(ctx: &PrecisionContext, traces: &TraceTable) -> CoefficientTable {
    let k = traces.k() as usize;
    let mut a = Vec::with_capacity(k + 1);
    let mut alpha = Vec::with_capacity(k + 1);
    a.push(ctx.one());
    alpha.push(ctx.zero());
    for n in 1..=k {
        let mut s = ctx.zero();
        let mut s_alpha = ctx.zero();
        for m in 1..=n {
            s += ctx.real(traces.t(m as u32) * &a[n - m]);
            let tau_over_m = ctx.real(traces.tau(m as u32) / ctx.real(m as u32));
            s_alpha += ctx.real(tau_over_m * &a[n - m]);
        }
        a.push(ctx.real(-s) / n as u32);
        alpha.push(ctx.real(-s_alpha));
    }
    CoefficientTable { k: traces.k(), a, alpha }
}

/// The composition-sum oracle for a single `(a_n, α_n)` pair. Exponential in
/// `n`; intended for small `n` as an independent check on the recursion.
pub fn coeffs_direct(ctx: &PrecisionContext, traces: &TraceTable, n: u32) -> Result<(Real, Real)> {
    if n > traces.k() {
        return Err(Error::InvalidInput(format!(
            "coefficient index {n} exceeds the trace table length {}",
            traces.k()
        )));
    }
    if n > 24 {
        return Err(Error::Budget(format!("composition sum for n = {n} has 2^{} terms", n - 1)));
    }
    if n == 0 {
        return Ok((ctx.one(), ctx.zero()));
    }
    let mut a_acc = ctx.zero();
    let mut alpha_acc = ctx.zero();
    let mut parts: Vec<u32> = Vec::new();
    for_each_composition(n, &mut parts, &mut |parts| {
        let l = parts.len();
        // (−1)^l / l!
        let fact = ctx.real(Real::factorial(l as u32));
        let sign = if l % 2 == 0 { 1 } else { -1 };
        let factors: Vec<Real> = parts
            .iter()
            .map(|&m| ctx.real(traces.t(m) / ctx.real(m)))
            .collect();
        let mut prod = ctx.one();
        for f in &factors {
            prod *= f;
        }
        a_acc += ctx.real(ctx.real(&prod * sign) / &fact);
        // Product rule: swap position j's factor for τ_{n_j}/n_j.
        for j in 0..l {
            let mut swapped = ctx.real(traces.tau(parts[j]) / ctx.real(parts[j]));
            for (i, f) in factors.iter().enumerate() {
                if i != j {
                    swapped *= f;
                }
            }
            alpha_acc += ctx.real(ctx.real(swapped * sign) / &fact);
        }
    });
    Ok((a_acc, alpha_acc))
}

/// Visits the ordered compositions of `n` (tuples of positive integers
/// summing to `n`) in lexicographic order of first parts.
fn for_each_composition(n: u32, parts: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if n == 0 {
        f(parts);
        return;
    }
    for first in 1..=n {
        parts.push(first);
        for_each_composition(n - first, parts, f);
        parts.pop();
    }
}

/// The estimates `μ_1..μ_k` with convergence bookkeeping.
#[derive(Debug, Clone)]
pub struct EstimateSeries {
    pub label: String,
    /// `values[j-1]` is `μ_j`; `None` where the denominator was too small
    /// to divide by safely.
    pub values: Vec<Option<Real>>,
    /// Digits on which `μ_j` agrees with `μ_{j−1}`, capped at the context
    /// precision; 0 for the first level and around unavailable values.
    pub stable_digits: Vec<u32>,
    /// The partial-sum denominators, for diagnostics.
    pub denominators: Vec<Real>,
}

impl EstimateSeries {
    pub fn k(&self) -> u32 {
        self.values.len() as u32
    }

    /// `μ_j`, 1-based.
    pub fn value(&self, j: u32) -> Option<&Real> {
        self.values[j as usize - 1].as_ref()
    }

    /// The level-`k` estimate, or an error if it was unavailable.
    pub fn final_value(&self) -> Result<&Real> {
        self.values
            .last()
            .and_then(Option::as_ref)
            .ok_or_else(|| {
                Error::Numeric(format!(
                    "estimate '{}' unavailable at the requested level: denominator too small",
                    self.label
                ))
            })
    }
}

/// Partial-sum ratios from a coefficient table.
///
/// A level is marked unavailable when its denominator is below
/// `10^(guard − digits)` in magnitude, the point where guard digits can no
/// longer vouch for the quotient.
pub fn estimate(ctx: &PrecisionContext, coeffs: &CoefficientTable, label: &str) -> EstimateSeries {
    let k = coeffs.k as usize;
    let threshold = ctx.pow10(f64::from(ctx.guard()) - f64::from(ctx.digits()));
    let mut values: Vec<Option<Real>> = Vec::with_capacity(k);
    let mut stable = Vec::with_capacity(k);
    let mut denominators = Vec::with_capacity(k);
    let mut num = ctx.real(&coeffs.alpha[0]);
    let mut den = ctx.zero();
    for j in 1..=k {
        num += &coeffs.alpha[j];
        den += ctx.real(&coeffs.a[j] * ctx.real(j as u32));
        denominators.push(den.clone());
        let value = if ctx.real(den.abs_ref()) < threshold {
            None
        } else {
            Some(ctx.real(&num / &den))
        };
        let digits = match (&value, values.last().and_then(|v: &Option<Real>| v.as_ref())) {
            (Some(cur), Some(prev)) => agreeing_digits(cur, prev).min(ctx.digits()),
            _ => 0,
        };
        values.push(value);
        stable.push(digits);
    }
    EstimateSeries { label: label.to_string(), values, stable_digits: stable, denominators }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{IfsConfig, MapSpec, Scalar, WeightSpec};
    use crate::observable::Observable;
    use crate::trace::{OrbitSet, TraceTable};
    use rug::Rational;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn s(c: &PrecisionContext, t: &str) -> Scalar {
        Scalar::parse(c, t).unwrap()
    }

    fn thirds(c: &PrecisionContext) -> crate::ifs::ValidatedIfs {
        let maps = vec![
            MapSpec::affine(s(c, "1/3"), s(c, "0")).unwrap(),
            MapSpec::affine(s(c, "1/3"), s(c, "2/3")).unwrap(),
        ];
        let weights = WeightSpec::ConstantVector(vec![s(c, "1/3"), s(c, "2/3")]);
        crate::ifs::ValidatedIfs::new(IfsConfig::new(c, maps, weights).unwrap(), c).unwrap()
    }

    fn moebius(c: &PrecisionContext) -> crate::ifs::ValidatedIfs {
        let maps = vec![
            MapSpec::moebius(s(c, "0"), s(c, "1"), s(c, "1"), s(c, "2")).unwrap(),
            MapSpec::moebius(s(c, "0"), s(c, "1"), s(c, "1"), s(c, "4")).unwrap(),
        ];
        let weights = WeightSpec::ConstantVector(vec![s(c, "1/2"), s(c, "1/2")]);
        crate::ifs::ValidatedIfs::new(IfsConfig::new(c, maps, weights).unwrap(), c).unwrap()
    }

    fn table(ifs: &crate::ifs::ValidatedIfs, g: &Observable, k: u32) -> TraceTable {
        let orbits = OrbitSet::compute(ifs, k, 1).unwrap();
        TraceTable::compute(ifs, &orbits, g, 1).unwrap()
    }

    #[test]
    fn thirds_coefficients_by_hand() {
        let c = ctx();
        let ifs = thirds(&c);
        let g = Observable::identity(&c);
        let traces = table(&ifs, &g, 2);
        let coeffs = coeffs_recursive(&c, &traces);
        // a = (1, -3/2, 9/16), alpha = (0, -1, 3/4).
        let close = |x: &Real, q: (i32, i32)| {
            c.real(x - c.real(Rational::from(q))).abs() < c.pow10(-38.0)
        };
        assert!(close(&coeffs.a[0], (1, 1)));
        assert!(close(&coeffs.a[1], (-3, 2)));
        assert!(close(&coeffs.a[2], (9, 16)));
        assert!(close(&coeffs.alpha[0], (0, 1)));
        assert!(close(&coeffs.alpha[1], (-1, 1)));
        assert!(close(&coeffs.alpha[2], (3, 4)));
        // mu_2 = 2/3.
        let series = estimate(&c, &coeffs, "x");
        let mu2 = series.value(2).unwrap();
        assert!(close(mu2, (2, 3)));
    }

    #[test]
    fn direct_matches_recursive_on_two_systems() {
        let c = ctx();
        for ifs in [thirds(&c), moebius(&c)] {
            let g = Observable::identity(&c);
            let traces = table(&ifs, &g, 6);
            let coeffs = coeffs_recursive(&c, &traces);
            for n in 0..=6u32 {
                let (a, alpha) = coeffs_direct(&c, &traces, n).unwrap();
                let da = c.real(&a - &coeffs.a[n as usize]).abs();
                let dalpha = c.real(&alpha - &coeffs.alpha[n as usize]).abs();
                assert!(da < c.pow10(-34.0), "a_{n}");
                assert!(dalpha < c.pow10(-34.0), "alpha_{n}");
            }
        }
    }

    #[test]
    fn constant_observable_estimates_to_one() {
        let c = ctx();
        let ifs = moebius(&c);
        let one = Observable::constant(&c, c.one());
        let traces = table(&ifs, &one, 8);
        let coeffs = coeffs_recursive(&c, &traces);
        let series = estimate(&c, &coeffs, "1");
        for j in 1..=8 {
            let v = series.value(j).unwrap();
            assert!(c.real(v - 1u32).abs() < c.pow10(-45.0), "mu_{j}(1) = 1");
        }
    }

    #[test]
    fn estimates_converge_on_thirds() {
        let c = ctx();
        let ifs = thirds(&c);
        let g = Observable::identity(&c);
        let traces = table(&ifs, &g, 8);
        let coeffs = coeffs_recursive(&c, &traces);
        let series = estimate(&c, &coeffs, "x");
        let expected = c.real(Rational::from((2, 3)));
        let err8 = c.real(series.value(8).unwrap() - &expected).abs();
        assert!(err8 < c.pow10(-20.0), "level 8 already very close");
        assert!(series.stable_digits[7] > 10);
    }

    #[test]
    fn tiny_denominator_marks_unavailable() {
        let c = ctx();
        let coeffs = CoefficientTable {
            k: 2,
            a: vec![c.one(), c.zero(), c.real(Rational::from((1, 2)))],
            alpha: vec![c.zero(), c.one(), c.one()],
        };
        let series = estimate(&c, &coeffs, "synthetic");
        assert!(series.value(1).is_none(), "denominator 0 at level 1");
        assert!(series.value(2).is_some());
        assert_eq!(series.stable_digits, vec![0, 0]);
        assert!(series.final_value().is_ok());
        let broken = CoefficientTable {
            k: 1,
            a: vec![c.one(), c.zero()],
            alpha: vec![c.zero(), c.one()],
        };
        let series = estimate(&c, &broken, "synthetic");
        assert!(series.final_value().is_err());
    }

    #[test]
    fn composition_count_is_two_to_n_minus_one() {
        let mut count = 0usize;
        let mut parts = Vec::new();
        for_each_composition(7, &mut parts, &mut |_| count += 1);
        assert_eq!(count, 64);
    }
}
