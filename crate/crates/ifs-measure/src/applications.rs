//! End-to-end computations: integration, moments, Wasserstein distances,
//! Lyapunov exponents, piecewise integrands, and a push-forward oracle.

use crate::determinant::{coeffs_recursive, estimate, EstimateSeries};
use crate::ifs::{Scalar, ValidatedIfs, WeightSpec};
use crate::observable::Observable;
use crate::orbit::Word;
use crate::precision::{agreeing_digits, PrecisionContext, Real};
use crate::trace::{parallel_map_result, OrbitSet, TraceTable};
use crate::{Error, Result};
use rug::Rational;

/// Default node budget for [`iterate_oracle`].
pub const DEFAULT_ORACLE_BUDGET: u64 = 1 << 26;

/// Shares one orbit computation across any number of observables over the
/// same system; the orbits dominate the cost, the traces are cheap.
pub struct Integrator<'a> {
    ifs: &'a ValidatedIfs,
    workers: usize,
    orbits: OrbitSet,
}

impl<'a> Integrator<'a> {
    pub fn new(ifs: &'a ValidatedIfs, k: u32, workers: usize) -> Result<Self> {
        let orbits = OrbitSet::compute(ifs, k, workers)?;
        Ok(Integrator { ifs, workers, orbits })
    }

    pub fn orbits(&self) -> &OrbitSet {
        &self.orbits
    }

    pub fn traces(&self, g: &Observable) -> Result<TraceTable> {
        TraceTable::compute(self.ifs, &self.orbits, g, self.workers)
    }

    /// The full estimate series `μ_1..μ_k` for one observable.
    pub fn series(&self, g: &Observable) -> Result<EstimateSeries> {
        let traces = self.traces(g)?;
        let coeffs = coeffs_recursive(self.ifs.ctx(), &traces);
        Ok(estimate(self.ifs.ctx(), &coeffs, &g.label()))
    }

    fn series_over(&self, orbits: &OrbitSet, g: &Observable) -> Result<EstimateSeries> {
        let traces = TraceTable::compute(self.ifs, orbits, g, self.workers)?;
        let coeffs = coeffs_recursive(self.ifs.ctx(), &traces);
        Ok(estimate(self.ifs.ctx(), &coeffs, &g.label()))
    }
}

/// `∫ g dμ` approximated at truncation level `k`.
pub fn integrate(
    ifs: &ValidatedIfs,
    g: &Observable,
    k: u32,
    workers: usize,
) -> Result<EstimateSeries> {
    Integrator::new(ifs, k, workers)?.series(g)
}

/// Moments `γ_0..γ_order` of the stationary measure; `γ_0 = 1` by
/// definition, the rest from the level-`k` estimates.
#[derive(Debug, Clone)]
pub struct MomentVector {
    pub order: u32,
    pub values: Vec<Real>,
}

pub fn moments(ifs: &ValidatedIfs, order: u32, k: u32, workers: usize) -> Result<MomentVector> {
    let ctx = ifs.ctx();
    let integrator = Integrator::new(ifs, k, workers)?;
    let mut values = vec![ctx.one()];
    for n in 1..=order {
        let series = integrator.series(&Observable::monomial(ctx, n))?;
        values.push(series.final_value()?.clone());
    }
    Ok(MomentVector { order, values })
}

/// Exact rational moments for an affine system with rational parameters,
/// via the closed recursion the stationarity identity gives for
/// `∫ (ρx+t)^n dμ`. No estimator involved; this is the independent check.
pub fn moments_oracle_affine(ifs: &ValidatedIfs, order: u32) -> Result<Vec<Rational>> {
    let params = affine_rational_params(ifs)?;
    let binom = pascal(order);
    let mut gamma: Vec<Rational> = vec![Rational::from(1)];
    for n in 1..=order as usize {
        let mut num = Rational::new();
        for (j, g_j) in gamma.iter().enumerate() {
            let mut inner = Rational::new();
            for (p, rho, t) in &params {
                inner += Rational::from(p * &rat_pow(rho, j as u32)) * rat_pow(t, (n - j) as u32);
            }
            num += Rational::from(&binom[n][j] * g_j) * inner;
        }
        let mut den = Rational::from(1);
        for (p, rho, _) in &params {
            den -= Rational::from(p * &rat_pow(rho, n as u32));
        }
        gamma.push(num / den);
    }
    Ok(gamma)
}

/// `(p_i, ρ_i, t_i)` as exact rationals, or why not.
fn affine_rational_params(ifs: &ValidatedIfs) -> Result<Vec<(Rational, Rational, Rational)>> {
    let ps = match ifs.config().weights() {
        WeightSpec::ConstantVector(ps) => ps,
        WeightSpec::FunctionWeights(_) => {
            return Err(Error::Unsupported("the affine oracle needs constant weights".into()))
        }
    };
    let mut params = Vec::with_capacity(ifs.n_maps());
    for (i, map) in ifs.maps().iter().enumerate() {
        let (ratio, offset) = match map {
            crate::ifs::MapSpec::Affine { ratio, offset } => (ratio, offset),
            _ => {
                return Err(Error::Unsupported(format!(
                    "the affine oracle needs affine maps; map {} is not",
                    i + 1
                )))
            }
        };
        let rho = ratio
            .rational()
            .ok_or_else(|| rational_needed(i, "ratio"))?
            .clone();
        let t = offset
            .rational()
            .ok_or_else(|| rational_needed(i, "offset"))?
            .clone();
        let p = ps[i]
            .rational()
            .ok_or_else(|| rational_needed(i, "weight"))?
            .clone();
        if rug::Rational::from(rho.abs_ref()) >= 1 {
            return Err(Error::Unsupported(format!(
                "the affine oracle needs |ratio| < 1; map {} has ratio {rho}",
                i + 1
            )));
        }
        params.push((p, rho, t));
    }
    Ok(params)
}

fn rational_needed(i: usize, what: &str) -> Error {
    Error::Unsupported(format!("the affine oracle needs rational parameters; {what} of map {} is not", i + 1))
}

fn rat_pow(q: &Rational, e: u32) -> Rational {
    let mut out = Rational::from(1);
    for _ in 0..e {
        out *= q;
    }
    out
}

fn pascal(order: u32) -> Vec<Vec<Rational>> {
    let n = order as usize;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let mut row = vec![Rational::from(1); r + 1];
        for c in 1..r {
            row[c] = Rational::from(&rows[r - 1][c - 1] + &rows[r - 1][c]);
        }
        rows.push(row);
    }
    rows
}

/// Level-by-level Wasserstein estimates between the stationary measures of
/// the same maps under weights `p` and `q`.
#[derive(Debug, Clone)]
pub struct WassersteinResult {
    /// The level-`k` distance estimate.
    pub value: Real,
    /// The verified sign condition (a failed condition is an error, so this
    /// is true on every returned result).
    pub sign_condition_ok: bool,
    /// `|μ_j^(p)(x) − μ_j^(q)(x)|` for each level `j`.
    pub per_k: Vec<Option<Real>>,
    /// Agreement between successive levels, as in the estimate series.
    pub stable_digits: Vec<u32>,
}

/// The 1-Wasserstein distance between the two stationary measures, as the
/// difference of first moments. Licensed only for increasing maps with
/// disjoint level-1 cylinders and weight differences whose partial sums
/// keep one sign; anything else is refused with an explanation.
pub fn wasserstein(ifs: &ValidatedIfs, k: u32, workers: usize) -> Result<WassersteinResult> {
    let ctx = ifs.ctx();
    let q = wasserstein_gate(ifs)?;
    let integrator = Integrator::new(ifs, k, workers)?;
    let g = Observable::identity(ctx);
    let series_p = integrator.series(&g)?;
    let ifs_q = ifs.with_constant_weights(q.to_vec())?;
    let orbits_q = integrator.orbits().reweighted_constant(&ifs_q)?;
    let series_q = integrator.series_over(&orbits_q, &g)?;
    let mut per_k: Vec<Option<Real>> = Vec::with_capacity(k as usize);
    let mut stable = Vec::with_capacity(k as usize);
    for j in 1..=k {
        let w = match (series_p.value(j), series_q.value(j)) {
            (Some(a), Some(b)) => Some(ctx.real(a - b).abs()),
            _ => None,
        };
        let digits = match (&w, per_k.last().and_then(|v: &Option<Real>| v.as_ref())) {
            (Some(cur), Some(prev)) => agreeing_digits(cur, prev).min(ctx.digits()),
            _ => 0,
        };
        per_k.push(w);
        stable.push(digits);
    }
    let value = per_k
        .last()
        .and_then(Option::as_ref)
        .cloned()
        .ok_or_else(|| Error::Numeric("Wasserstein estimate unavailable at the requested level".into()))?;
    Ok(WassersteinResult { value, sign_condition_ok: true, per_k, stable_digits: stable })
}

/// Checks every hypothesis the Wasserstein formula needs and returns the
/// second weight vector.
fn wasserstein_gate(ifs: &ValidatedIfs) -> Result<&[Scalar]> {
    let ctx = ifs.ctx();
    let q = ifs
        .config()
        .second_weights()
        .ok_or_else(|| Error::InvalidInput("Wasserstein needs a second weight vector q".into()))?;
    let p = match ifs.config().weights() {
        WeightSpec::ConstantVector(ps) => ps,
        WeightSpec::FunctionWeights(_) => {
            return Err(Error::Unsupported(
                "the Wasserstein formula is stated for constant weights".into(),
            ))
        }
    };
    if !ifs.config().check_nonoverlap(ctx, 1)? {
        return Err(Error::Validation(
            "level-1 cylinders overlap; the Wasserstein moment formula is not licensed".into(),
        ));
    }
    let tol = ctx.pow10(-(f64::from(ctx.digits()) / 2.0));
    for (i, map) in ifs.maps().iter().enumerate() {
        for j in 0..=32u32 {
            let x = ctx.real(Rational::from((j, 32u32)));
            if !(map.deriv_real(ctx, &x)? > tol) {
                return Err(Error::Validation(format!(
                    "the Wasserstein moment formula needs increasing maps; map {} is not",
                    i + 1
                )));
            }
        }
    }
    if !sign_condition_holds(ctx, p, q) {
        return Err(Error::Validation(
            "sign condition failed: the partial sums of p − q change sign, \
             so the first-moment formula does not give the Wasserstein distance"
                .into(),
        ));
    }
    Ok(q)
}

/// Partial sums of `p − q` all nonnegative or all nonpositive. Exact when
/// every entry is rational.
fn sign_condition_holds(ctx: &PrecisionContext, p: &[Scalar], q: &[Scalar]) -> bool {
    let exact: Option<Vec<Rational>> = p
        .iter()
        .zip(q)
        .map(|(a, b)| Some(Rational::from(a.rational()? - b.rational()?)))
        .collect();
    if let Some(diffs) = exact {
        let mut partial = Rational::new();
        let (mut pos, mut neg) = (false, false);
        for d in diffs {
            partial += d;
            pos |= partial > 0;
            neg |= partial < 0;
        }
        return !(pos && neg);
    }
    let tol = ctx.pow10(-(f64::from(ctx.digits()) / 2.0));
    let mut partial = ctx.zero();
    let (mut pos, mut neg) = (false, false);
    for (a, b) in p.iter().zip(q) {
        partial += ctx.real(a.value() - b.value());
        pos |= partial > tol;
        neg |= partial < ctx.real(-tol.clone());
    }
    !(pos && neg)
}

/// Closed-form Wasserstein distance for affine systems: the first moment of
/// an affine system is `Σ p_i t_i / (1 − Σ p_i ρ_i)`. Gated by the same
/// hypotheses as [`wasserstein`].
pub fn wasserstein_oracle_affine(ifs: &ValidatedIfs) -> Result<Real> {
    let ctx = ifs.ctx();
    let exact = wasserstein_oracle_affine_exact(ifs)?;
    Ok(ctx.real(&exact))
}

/// The oracle value as an exact rational.
pub fn wasserstein_oracle_affine_exact(ifs: &ValidatedIfs) -> Result<Rational> {
    let q_scalars = wasserstein_gate(ifs)?;
    let params = affine_rational_params(ifs)?;
    let q_weights: Result<Vec<Rational>> = q_scalars
        .iter()
        .enumerate()
        .map(|(i, s)| s.rational().cloned().ok_or_else(|| rational_needed(i, "second weight")))
        .collect();
    let q_weights = q_weights?;
    let first_moment = |weights: &[Rational]| {
        let mut num = Rational::new();
        let mut den = Rational::from(1);
        for ((_, rho, t), w) in params.iter().zip(weights) {
            num += Rational::from(w * t);
            den -= Rational::from(w * rho);
        }
        num / den
    };
    let p_weights: Vec<Rational> = params.iter().map(|(p, _, _)| p.clone()).collect();
    let diff = first_moment(&p_weights) - first_moment(&q_weights);
    Ok(Rational::from(diff.abs_ref()))
}

/// The Lyapunov exponent `−Σ_i p_i ∫ log|φ'_i| dμ` as an estimate series.
pub fn lyapunov(ifs: &ValidatedIfs, k: u32, workers: usize) -> Result<EstimateSeries> {
    let g = Observable::log_derivative(ifs)?;
    integrate(ifs, &g, k, workers)
}

/// `∫ g dμ` for an integrand defined piecewise on the level-`level`
/// cylinders: `g = g_ι` on `φ_ι([0,1])`. Uses the exact decomposition
/// `∫ g dμ = Σ_ι p_ι ∫ g_ι ∘ φ_ι dμ`, so it needs constant weights and
/// disjoint cylinders at that level, and a piece for every word.
pub fn integrate_piecewise(
    ifs: &ValidatedIfs,
    level: u32,
    pieces: &[(Word, Observable)],
    k: u32,
    workers: usize,
) -> Result<Real> {
    let ctx = ifs.ctx();
    let weights = ifs
        .constant_weights()
        .ok_or_else(|| Error::Unsupported("piecewise integration needs constant weights".into()))?;
    if !ifs.config().check_nonoverlap(ctx, level)? {
        return Err(Error::Validation(format!(
            "cylinders overlap at level {level}; a piecewise integrand is not well defined there"
        )));
    }
    let n = ifs.n_maps() as u64;
    let expected = n.pow(level);
    if pieces.len() as u64 != expected {
        return Err(Error::InvalidInput(format!(
            "need one piece per word: {} words at level {level}, got {} pieces",
            expected,
            pieces.len()
        )));
    }
    let mut seen = std::collections::BTreeMap::new();
    for (w, g) in pieces {
        if w.len() != level as usize {
            return Err(Error::InvalidInput(format!(
                "piece word {w} has length {}, expected {level}",
                w.len()
            )));
        }
        if seen.insert(w.clone(), g).is_some() {
            return Err(Error::InvalidInput(format!("duplicate piece for word {w}")));
        }
    }
    let integrator = Integrator::new(ifs, k, workers)?;
    let mut total = ctx.zero();
    for (w, g) in &seen {
        let composed = Observable::composed_on_cylinder((*g).clone(), ifs, w.clone())?;
        let series = integrator.series(&composed)?;
        let mu = series.final_value()?;
        let mut p_word = ctx.one();
        for pos in 0..w.len() {
            p_word *= &weights[w.map_index(pos)];
        }
        total += ctx.real(p_word * mu);
    }
    Ok(total)
}

/// Push-forward cross-check: `Σ_{ι ∈ I^n} p_ι g(φ_ι(x0))`, the integral of
/// `g` against the `n`-step push-forward of the point mass at `x0`. Slowly
/// convergent but estimator-free.
pub fn iterate_oracle(
    ifs: &ValidatedIfs,
    g: &Observable,
    n: u32,
    x0: &Real,
    budget: u64,
    workers: usize,
) -> Result<Real> {
    let ctx = ifs.ctx();
    if !(x0 >= &0u32 && x0 <= &1u32) {
        return Err(Error::InvalidInput("oracle start point must lie in [0,1]".into()));
    }
    let maps = ifs.n_maps() as u64;
    let nodes = maps
        .checked_pow(n)
        .filter(|&c| c <= budget)
        .ok_or_else(|| Error::Budget(format!("{maps}^{n} oracle terms exceed the budget {budget}")))?;
    let _ = nodes;
    if n == 0 {
        return g.eval(ctx, x0);
    }
    // Group by the first symbols applied; the split depth is a fixed
    // function of n and N, so the fold shape never depends on the worker
    // count.
    let mut split = 0u32;
    while split < n && maps.pow(split + 1) <= 4096 {
        split += 1;
    }
    let mut groups = vec![(x0.clone(), ctx.one())];
    for _ in 0..split {
        let mut next = Vec::with_capacity(groups.len() * ifs.n_maps());
        for (v, weight) in &groups {
            for i in 0..ifs.n_maps() {
                let factor = ifs.weight_factor(i, v);
                let v2 = ifs.maps()[i].eval_real(ctx, v)?;
                next.push((v2, ctx.real(weight * factor)));
            }
        }
        groups = next;
    }
    let remaining = n - split;
    let sums = parallel_map_result(groups.len(), workers, |i| {
        let (v, weight) = &groups[i];
        oracle_dfs(ifs, g, remaining, v, weight)
    })?;
    let mut total = ctx.zero();
    for s in sums {
        total += s;
    }
    Ok(total)
}

fn oracle_dfs(
    ifs: &ValidatedIfs,
    g: &Observable,
    depth: u32,
    v: &Real,
    weight: &Real,
) -> Result<Real> {
    let ctx = ifs.ctx();
    if depth == 0 {
        return Ok(ctx.real(weight * g.eval(ctx, v)?));
    }
    let mut acc = ctx.zero();
    for i in 0..ifs.n_maps() {
        let factor = ctx.real(weight * ifs.weight_factor(i, v));
        let v2 = ifs.maps()[i].eval_real(ctx, v)?;
        acc += oracle_dfs(ifs, g, depth - 1, &v2, &factor)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{IfsConfig, MapSpec, WeightSpec};

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

    fn mixed(c: &PrecisionContext) -> ValidatedIfs {
        // x/3 and x/2 + 1/2 with p = (1/3, 2/3), q = (3/4, 1/4).
        let maps = vec![
            MapSpec::affine(s(c, "1/3"), s(c, "0")).unwrap(),
            MapSpec::affine(s(c, "1/2"), s(c, "1/2")).unwrap(),
        ];
        let weights = WeightSpec::ConstantVector(vec![s(c, "1/3"), s(c, "2/3")]);
        let config = IfsConfig::new(c, maps, weights)
            .unwrap()
            .with_second_weights(vec![s(c, "3/4"), s(c, "1/4")])
            .unwrap();
        ValidatedIfs::new(config, c).unwrap()
    }

    #[test]
    fn moment_oracle_matches_hand_values() {
        let c = ctx();
        let ifs = thirds(&c);
        let gamma = moments_oracle_affine(&ifs, 3).unwrap();
        assert_eq!(gamma[0], Rational::from(1));
        assert_eq!(gamma[1], Rational::from((2, 3)));
        assert_eq!(gamma[2], Rational::from((5, 9)));
        assert_eq!(gamma[3], Rational::from((58, 117)));
    }

    #[test]
    fn estimated_moments_land_on_oracle() {
        let c = ctx();
        let ifs = thirds(&c);
        let numeric = moments(&ifs, 2, 10, 1).unwrap();
        let exact = moments_oracle_affine(&ifs, 2).unwrap();
        assert_eq!(numeric.values[0], c.one(), "gamma_0 is exact");
        for n in 1..=2usize {
            let e = c.real(&exact[n]);
            let d = c.real(&numeric.values[n] - &e).abs();
            assert!(d < c.pow10(-20.0), "gamma_{n}");
        }
    }

    #[test]
    fn oracle_refuses_non_affine() {
        let c = ctx();
        let maps = vec![
            MapSpec::moebius(s(&c, "0"), s(&c, "1"), s(&c, "1"), s(&c, "2")).unwrap(),
            MapSpec::moebius(s(&c, "0"), s(&c, "1"), s(&c, "1"), s(&c, "4")).unwrap(),
        ];
        let weights = WeightSpec::ConstantVector(vec![s(&c, "1/2"), s(&c, "1/2")]);
        let ifs = ValidatedIfs::new(IfsConfig::new(&c, maps, weights).unwrap(), &c).unwrap();
        assert!(matches!(moments_oracle_affine(&ifs, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn wasserstein_on_mixed_system() {
        let c = ctx();
        let ifs = mixed(&c);
        let exact = wasserstein_oracle_affine_exact(&ifs).unwrap();
        assert_eq!(exact, Rational::from((2, 5)));
        let result = wasserstein(&ifs, 8, 1).unwrap();
        assert!(result.sign_condition_ok);
        let d = c.real(&result.value - c.real(Rational::from((2, 5)))).abs();
        assert!(d < c.pow10(-10.0));
        assert_eq!(result.per_k.len(), 8);
    }

    #[test]
    fn wasserstein_needs_q() {
        let c = ctx();
        let ifs = thirds(&c);
        assert!(matches!(wasserstein(&ifs, 4, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn wasserstein_refuses_sign_violation() {
        let c = ctx();
        let maps = vec![
            MapSpec::affine(s(&c, "1/4"), s(&c, "0")).unwrap(),
            MapSpec::affine(s(&c, "1/4"), s(&c, "3/8")).unwrap(),
            MapSpec::affine(s(&c, "1/4"), s(&c, "3/4")).unwrap(),
        ];
        let weights =
            WeightSpec::ConstantVector(vec![s(&c, "1/2"), s(&c, "1/6"), s(&c, "1/3")]);
        let config = IfsConfig::new(&c, maps, weights)
            .unwrap()
            .with_second_weights(vec![s(&c, "1/3"), s(&c, "1/2"), s(&c, "1/6")])
            .unwrap();
        let ifs = ValidatedIfs::new(config, &c).unwrap();
        let err = wasserstein(&ifs, 4, 1);
        match err {
            Err(Error::Validation(m)) => assert!(m.contains("sign condition"), "{m}"),
            other => panic!("expected a sign-condition refusal, got {other:?}"),
        }
    }

    #[test]
    fn wasserstein_refuses_overlap() {
        let c = ctx();
        let maps = vec![
            MapSpec::affine(s(&c, "2/3"), s(&c, "0")).unwrap(),
            MapSpec::affine(s(&c, "2/3"), s(&c, "1/3")).unwrap(),
        ];
        let weights = WeightSpec::ConstantVector(vec![s(&c, "1/3"), s(&c, "2/3")]);
        let config = IfsConfig::new(&c, maps, weights)
            .unwrap()
            .with_second_weights(vec![s(&c, "1/2"), s(&c, "1/2")])
            .unwrap();
        let ifs = ValidatedIfs::new(config, &c).unwrap();
        assert!(matches!(wasserstein(&ifs, 4, 1), Err(Error::Validation(_))));
    }

    #[test]
    fn lyapunov_of_equal_ratios_is_log3() {
        let c = ctx();
        let ifs = thirds(&c);
        let series = lyapunov(&ifs, 6, 1).unwrap();
        let expected = c.real(3u32).ln();
        let d = c.real(series.final_value().unwrap() - &expected).abs();
        assert!(d < c.pow10(-15.0));
    }

    #[test]
    fn piecewise_matches_hand_computation() {
        let c = ctx();
        let ifs = thirds(&c);
        // g = x on the first cylinder, g = x^2 on the second: 148/243.
        let pieces = vec![
            (Word::parse("1", 2).unwrap(), Observable::identity(&c)),
            (Word::parse("2", 2).unwrap(), Observable::monomial(&c, 2)),
        ];
        let value = integrate_piecewise(&ifs, 1, &pieces, 12, 1).unwrap();
        let expected = c.real(Rational::from((148, 243)));
        let d = c.real(value - expected).abs();
        assert!(d < c.pow10(-20.0));
    }

    #[test]
    fn piecewise_requires_complete_cover() {
        let c = ctx();
        let ifs = thirds(&c);
        let missing = vec![(Word::parse("1", 2).unwrap(), Observable::identity(&c))];
        assert!(matches!(
            integrate_piecewise(&ifs, 1, &missing, 6, 1),
            Err(Error::InvalidInput(_))
        ));
        let duplicate = vec![
            (Word::parse("1", 2).unwrap(), Observable::identity(&c)),
            (Word::parse("1", 2).unwrap(), Observable::monomial(&c, 2)),
        ];
        assert!(matches!(
            integrate_piecewise(&ifs, 1, &duplicate, 6, 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn iterate_oracle_matches_affine_mean_recursion() {
        let c = ctx();
        let ifs = thirds(&c);
        // E[x] after n steps from 1/2: E' = E/3 + 4/9, three times: 107/162.
        let value = iterate_oracle(
            &ifs,
            &Observable::identity(&c),
            3,
            &c.real(Rational::from((1, 2))),
            DEFAULT_ORACLE_BUDGET,
            1,
        )
        .unwrap();
        let expected = c.real(Rational::from((107, 162)));
        assert!(c.real(value - expected).abs() < c.pow10(-30.0));
    }

    #[test]
    fn iterate_oracle_respects_budget_and_domain() {
        let c = ctx();
        let ifs = thirds(&c);
        let g = Observable::identity(&c);
        let half = c.real(Rational::from((1, 2)));
        assert!(matches!(
            iterate_oracle(&ifs, &g, 30, &half, 1 << 20, 1),
            Err(Error::Budget(_))
        ));
        assert!(matches!(
            iterate_oracle(&ifs, &g, 2, &c.real(2), DEFAULT_ORACLE_BUDGET, 1),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn iterate_oracle_is_worker_invariant() {
        let c = ctx();
        let ifs = mixed(&c);
        let g = Observable::monomial(&c, 2);
        let half = c.real(Rational::from((1, 2)));
        let a = iterate_oracle(&ifs, &g, 6, &half, DEFAULT_ORACLE_BUDGET, 1).unwrap();
        let b = iterate_oracle(&ifs, &g, 6, &half, DEFAULT_ORACLE_BUDGET, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn iterate_oracle_handles_function_weights() {
        let c = ctx();
        let maps = vec![
            MapSpec::affine(s(&c, "1/3"), s(&c, "0")).unwrap(),
            MapSpec::affine(s(&c, "1/3"), s(&c, "2/3")).unwrap(),
        ];
        let ifs = ValidatedIfs::new(
            IfsConfig::new(
                &c,
                maps,
                WeightSpec::FunctionWeights(vec![
                    vec![s(&c, "1/4"), s(&c, "1/2")],
                    vec![s(&c, "3/4"), s(&c, "-1/2")],
                ]),
            )
            .unwrap(),
            &c,
        )
        .unwrap();
        // One step from x0 = 1/2: p1(1/2) g(φ1(1/2)) + p2(1/2) g(φ2(1/2))
        // = (1/2)(1/6) + (1/2)(5/6) = 1/2 with g = x.
        let g = Observable::identity(&c);
        let half = c.real(Rational::from((1, 2)));
        let v = iterate_oracle(&ifs, &g, 1, &half, DEFAULT_ORACLE_BUDGET, 1).unwrap();
        assert!(c.real(v - &half).abs() < c.pow10(-35.0));
    }

    #[test]
    fn integrator_reuses_orbits_across_observables() {
        let c = ctx();
        let ifs = thirds(&c);
        let integrator = Integrator::new(&ifs, 8, 1).unwrap();
        let s1 = integrator.series(&Observable::monomial(&c, 1)).unwrap();
        let s2 = integrate(&ifs, &Observable::monomial(&c, 1), 8, 1).unwrap();
        assert_eq!(s1.final_value().unwrap(), s2.final_value().unwrap());
    }
}
