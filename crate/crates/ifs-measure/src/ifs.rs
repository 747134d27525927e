//! System configuration: map catalog, weights, and hypothesis checks.
//!
//! A system is a list of maps from a closed catalog (affine, Moebius,
//! sine-affine), a weight vector (constants or per-map polynomials), an
//! optional second constant weight vector, and a neighborhood half-width
//! `ε`. Checks cover complex contraction on the rectangle
//! `[−ε, 1+ε] × [−ε, ε]`, weight positivity/normalization, and pairwise
//! disjointness of level-`n` cylinder images. The contraction and
//! non-overlap checks are sampled numerical screens, not proofs, and the
//! reports say so.

use crate::poly::Poly;
use crate::precision::{Complex, PrecisionContext, Real};
use crate::{Error, Result};
use rug::ops::Pow;
use rug::{Integer, Rational};

/// A numeric parameter that remembers how it was written.
///
/// Fractions and finite decimals both carry an exact [`Rational`]; the
/// original literal is kept so a config can be echoed back unchanged.
#[derive(Debug, Clone)]
pub struct Scalar {
    literal: String,
    rational: Option<Rational>,
    value: Real,
}

impl Scalar {
    /// Parses `2`, `-3/2`, `0.25`, or `1.5e-3`.
    pub fn parse(ctx: &PrecisionContext, text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::InvalidInput("empty number".into()));
        }
        let rational = parse_exact(t)?;
        let value = ctx.real(&rational);
        Ok(Scalar { literal: t.to_string(), rational: Some(rational), value })
    }

    pub fn from_rational(ctx: &PrecisionContext, q: Rational) -> Self {
        let value = ctx.real(&q);
        Scalar { literal: q.to_string(), rational: Some(q), value }
    }

    pub fn from_integer(ctx: &PrecisionContext, n: i64) -> Self {
        Self::from_rational(ctx, Rational::from(n))
    }

    /// A scalar with no exact form, e.g. a computed value.
    pub fn from_real(ctx: &PrecisionContext, value: Real) -> Self {
        let literal = ctx
            .render(&value, ctx.digits())
            .unwrap_or_else(|_| "0".into());
        Scalar { literal, rational: None, value }
    }

    pub fn literal(&self) -> &str {
        &self.literal
    }

    pub fn rational(&self) -> Option<&Rational> {
        self.rational.as_ref()
    }

    pub fn value(&self) -> &Real {
        &self.value
    }

    fn is_zero(&self) -> bool {
        match &self.rational {
            Some(q) => *q == 0,
            None => self.value.is_zero(),
        }
    }
}

/// Parses a fraction, integer, or (possibly exponent-carrying) finite
/// decimal into an exact rational.
fn parse_exact(t: &str) -> Result<Rational> {
    let bad = |why: &str| Error::InvalidInput(format!("cannot parse number '{t}': {why}"));
    if let Some((num, den)) = t.split_once('/') {
        let n: Integer = num.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: Integer = den.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::from((n, d)));
    }
    let (mantissa, exp10) = match t.split_once(['e', 'E']) {
        Some((m, e)) => {
            let e: i32 = e.parse().map_err(|_| bad("bad exponent"))?;
            (m, e)
        }
        None => (t, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits: String = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad("no digits"));
    }
    let n: Integer = digits.parse().map_err(|_| bad("bad digits"))?;
    let shift = exp10 - frac_part.len() as i32;
    let mut q = Rational::from(n);
    let scale = Integer::from(10).pow(shift.unsigned_abs());
    if shift >= 0 {
        q *= scale;
    } else {
        q /= scale;
    }
    Ok(q)
}

/// The closed map catalog.
#[derive(Debug, Clone)]
pub enum MapSpec {
    /// `x ↦ ρx + t`.
    Affine { ratio: Scalar, offset: Scalar },
    /// `z ↦ (az + b)/(cz + d)` with `ad − bc ≠ 0`.
    Moebius { a: Scalar, b: Scalar, c: Scalar, d: Scalar },
    /// `x ↦ A·sin(πx/4) + B`.
    SineAffine { amplitude: Scalar, offset: Scalar },
}

impl MapSpec {
    pub fn affine(ratio: Scalar, offset: Scalar) -> Result<Self> {
        if ratio.is_zero() {
            return Err(Error::InvalidInput("affine map with ratio 0 is degenerate".into()));
        }
        Ok(MapSpec::Affine { ratio, offset })
    }

    pub fn moebius(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self> {
        let degenerate = match (a.rational(), b.rational(), c.rational(), d.rational()) {
            (Some(qa), Some(qb), Some(qc), Some(qd)) => {
                Rational::from(qa * qd) == Rational::from(qb * qc)
            }
            _ => {
                let prec = a.value().prec();
                let ad = Real::with_val(prec, a.value() * d.value());
                let bc = Real::with_val(prec, b.value() * c.value());
                ad == bc
            }
        };
        if degenerate {
            return Err(Error::InvalidInput("Moebius map with ad - bc = 0 is degenerate".into()));
        }
        Ok(MapSpec::Moebius { a, b, c, d })
    }

    pub fn sine_affine(amplitude: Scalar, offset: Scalar) -> Result<Self> {
        if amplitude.is_zero() {
            return Err(Error::InvalidInput("sine-affine map with amplitude 0 is degenerate".into()));
        }
        Ok(MapSpec::SineAffine { amplitude, offset })
    }

    /// `φ(x)` at a real point.
    pub fn eval_real(&self, ctx: &PrecisionContext, x: &Real) -> Result<Real> {
        match self {
            MapSpec::Affine { ratio, offset } => {
                Ok(ctx.real(ratio.value() * x) + offset.value())
            }
            MapSpec::Moebius { a, b, c, d } => {
                let den = ctx.real(c.value() * x) + d.value();
                if den.is_zero() {
                    return Err(Error::Domain("Moebius map evaluated at its pole".into()));
                }
                let num = ctx.real(a.value() * x) + b.value();
                Ok(ctx.real(num / den))
            }
            MapSpec::SineAffine { amplitude, offset } => {
                let arg = ctx.real(ctx.pi() * x) / 4u32;
                Ok(ctx.real(amplitude.value() * arg.sin()) + offset.value())
            }
        }
    }

    /// `φ(z)` at a complex point.
    pub fn eval_complex(&self, ctx: &PrecisionContext, z: &Complex) -> Result<Complex> {
        match self {
            MapSpec::Affine { ratio, offset } => {
                Ok(z.scale(ratio.value()).add_real(offset.value()))
            }
            MapSpec::Moebius { a, b, c, d } => {
                let den = z.scale(c.value()).add_real(d.value());
                if den.abs().is_zero() {
                    return Err(Error::Domain("Moebius map evaluated at its pole".into()));
                }
                let num = z.scale(a.value()).add_real(b.value());
                Ok(num.div(&den))
            }
            MapSpec::SineAffine { amplitude, offset } => {
                let quarter_pi = ctx.real(ctx.pi() / 4u32);
                let arg = z.scale(&quarter_pi);
                Ok(arg.sin().scale(amplitude.value()).add_real(offset.value()))
            }
        }
    }

    /// `φ'(x)` at a real point.
    pub fn deriv_real(&self, ctx: &PrecisionContext, x: &Real) -> Result<Real> {
        match self {
            MapSpec::Affine { ratio, .. } => Ok(ratio.value().clone()),
            MapSpec::Moebius { a, b, c, d } => {
                let den = ctx.real(c.value() * x) + d.value();
                if den.is_zero() {
                    return Err(Error::Domain("Moebius map evaluated at its pole".into()));
                }
                let det = ctx.real(a.value() * d.value()) - ctx.real(b.value() * c.value());
                Ok(ctx.real(det / ctx.real(den.square_ref())))
            }
            MapSpec::SineAffine { amplitude, .. } => {
                let quarter_pi = ctx.real(ctx.pi() / 4u32);
                let arg = ctx.real(&quarter_pi * x);
                Ok(ctx.real(amplitude.value() * quarter_pi) * arg.cos())
            }
        }
    }

    /// `φ'(z)` at a complex point.
    pub fn deriv_complex(&self, ctx: &PrecisionContext, z: &Complex) -> Result<Complex> {
        match self {
            MapSpec::Affine { ratio, .. } => Ok(Complex::from_real(ctx.real(ratio.value()))),
            MapSpec::Moebius { a, b, c, d } => {
                let den = z.scale(c.value()).add_real(d.value());
                if den.abs().is_zero() {
                    return Err(Error::Domain("Moebius map evaluated at its pole".into()));
                }
                let det = ctx.real(a.value() * d.value()) - ctx.real(b.value() * c.value());
                let den2 = den.mul(&den);
                Ok(Complex::from_real(det).div(&den2))
            }
            MapSpec::SineAffine { amplitude, .. } => {
                let quarter_pi = ctx.real(ctx.pi() / 4u32);
                let arg = z.scale(&quarter_pi);
                let factor = ctx.real(amplitude.value() * &quarter_pi);
                Ok(arg.cos().scale(&factor))
            }
        }
    }
}

/// Weighting: one probability per map, or one polynomial per map for
/// place-dependent weights.
#[derive(Debug, Clone)]
pub enum WeightSpec {
    ConstantVector(Vec<Scalar>),
    FunctionWeights(Vec<Vec<Scalar>>),
}

impl WeightSpec {
    fn len(&self) -> usize {
        match self {
            WeightSpec::ConstantVector(v) => v.len(),
            WeightSpec::FunctionWeights(v) => v.len(),
        }
    }
}

/// An iterated function system configuration, prior to validation.
#[derive(Debug, Clone)]
pub struct IfsConfig {
    maps: Vec<MapSpec>,
    weights: WeightSpec,
    second_weights: Option<Vec<Scalar>>,
    epsilon: Scalar,
}

impl IfsConfig {
    pub fn new(ctx: &PrecisionContext, maps: Vec<MapSpec>, weights: WeightSpec) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a system needs at least 2 maps, got {}",
                maps.len()
            )));
        }
        if weights.len() != maps.len() {
            return Err(Error::InvalidInput(format!(
                "{} maps but {} weights",
                maps.len(),
                weights.len()
            )));
        }
        if let WeightSpec::FunctionWeights(polys) = &weights {
            if polys.iter().any(Vec::is_empty) {
                return Err(Error::InvalidInput("empty weight polynomial".into()));
            }
        }
        let epsilon = Scalar::parse(ctx, "1/4")?;
        Ok(IfsConfig { maps, weights, second_weights: None, epsilon })
    }

    pub fn with_epsilon(mut self, epsilon: Scalar) -> Result<Self> {
        if !(epsilon.value() > &0u32) {
            return Err(Error::InvalidInput("epsilon must be positive".into()));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn with_second_weights(mut self, q: Vec<Scalar>) -> Result<Self> {
        if q.len() != self.maps.len() {
            return Err(Error::InvalidInput(format!(
                "{} maps but {} second weights",
                self.maps.len(),
                q.len()
            )));
        }
        self.second_weights = Some(q);
        Ok(self)
    }

    pub fn maps(&self) -> &[MapSpec] {
        &self.maps
    }

    pub fn weights(&self) -> &WeightSpec {
        &self.weights
    }

    pub fn second_weights(&self) -> Option<&[Scalar]> {
        self.second_weights.as_deref()
    }

    pub fn epsilon(&self) -> &Scalar {
        &self.epsilon
    }

    pub fn n_maps(&self) -> usize {
        self.maps.len()
    }

    /// Samples `|φ'|` on the boundary of the complex rectangle
    /// `[−ε, 1+ε] × [−ε, ε]` and checks endpoint images stay in `[0,1]`.
    ///
    /// `|φ'|` attains its maximum over the rectangle on the boundary, so
    /// boundary sampling is what makes this a screen rather than a blind
    /// grid; density is still finite, hence the "not a proof" note.
    pub fn check_contraction(
        &self,
        ctx: &PrecisionContext,
        boundary_samples: u32,
    ) -> Result<ValidationReport> {
        if boundary_samples < 64 {
            return Err(Error::InvalidInput(format!(
                "need at least 64 boundary samples per edge, got {boundary_samples}"
            )));
        }
        let eps = ctx.real(self.epsilon.value());
        let lo = ctx.real(-eps.clone());
        let hi = ctx.real(ctx.one() + &eps);
        let mut messages =
            vec!["note: contraction screen samples the neighborhood boundary numerically; it is not a proof".to_string()];
        let mut sup = ctx.zero();
        let mut pole_hit = false;
        'maps: for (i, map) in self.maps.iter().enumerate() {
            for z in rectangle_boundary(ctx, &lo, &hi, &eps, boundary_samples) {
                match map.deriv_complex(ctx, &z) {
                    Ok(d) => {
                        let m = d.abs();
                        if m > sup {
                            sup = m;
                        }
                    }
                    Err(_) => {
                        messages.push(format!(
                            "failure: map {} has a pole on the neighborhood boundary",
                            i + 1
                        ));
                        pole_hit = true;
                        continue 'maps;
                    }
                }
            }
        }
        let tol = ctx.pow10(-(f64::from(ctx.digits()) / 2.0));
        for (i, map) in self.maps.iter().enumerate() {
            for (label, x) in [("0", ctx.zero()), ("1", ctx.one())] {
                match map.eval_real(ctx, &x) {
                    Ok(y) => {
                        let below = ctx.real(-tol.clone());
                        let above = ctx.real(ctx.one() + &tol);
                        if y < below || y > above {
                            messages.push(format!(
                                "failure: map {} leaves [0,1]: image of {} is {}",
                                i + 1,
                                label,
                                ctx.render(&y, 8).unwrap_or_else(|_| "?".into())
                            ));
                        }
                    }
                    Err(_) => {
                        messages.push(format!("failure: map {} has a pole in [0,1]", i + 1));
                    }
                }
            }
        }
        if pole_hit {
            sup = ctx.real(rug::float::Special::Infinity);
        }
        let is_contracting = !pole_hit && sup < 1;
        if !is_contracting {
            messages.push("failure: sampled derivative supremum is not below 1".into());
        }
        Ok(ValidationReport {
            contraction_sup: sup,
            is_contracting,
            nonoverlap_level_checked: None,
            weight_ok: true,
            messages,
        })
    }

    /// Checks the weights are a probability vector: positive entries that
    /// sum to 1 (constants, exact when all entries are rational), or
    /// polynomials positive and summing to 1 at `samples` points of `[0,1]`
    /// (function weights).
    pub fn check_weights(&self, ctx: &PrecisionContext, samples: u32) -> Result<()> {
        let tol = ctx.pow10(-(f64::from(ctx.digits()) / 2.0));
        match &self.weights {
            WeightSpec::ConstantVector(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if !(p.value() > &0u32) {
                        return Err(Error::Validation(format!(
                            "weight {} is not positive",
                            i + 1
                        )));
                    }
                }
                if let Some(total) = exact_sum(ps) {
                    if total != 1 {
                        return Err(Error::Validation(format!("weights sum to {total}, not 1")));
                    }
                } else {
                    let mut total = ctx.zero();
                    for p in ps {
                        total += p.value();
                    }
                    let gap = ctx.real(total - 1u32).abs();
                    if gap > tol {
                        return Err(Error::Validation("weights do not sum to 1".into()));
                    }
                }
            }
            WeightSpec::FunctionWeights(polys) => {
                let compiled: Vec<Poly> = polys
                    .iter()
                    .map(|cs| Poly::new(cs.iter().map(|s| ctx.real(s.value())).collect()))
                    .collect::<Result<_>>()?;
                for (j, x) in unit_samples(ctx, samples.max(2)).into_iter().enumerate() {
                    let mut total = ctx.zero();
                    for (i, p) in compiled.iter().enumerate() {
                        let v = p.eval(&x);
                        if !(v > 0u32) {
                            return Err(Error::Validation(format!(
                                "weight polynomial {} is not positive at sample {} of [0,1]",
                                i + 1,
                                j
                            )));
                        }
                        total += v;
                    }
                    let gap = ctx.real(total - 1u32).abs();
                    if gap > tol {
                        return Err(Error::Validation(format!(
                            "weight polynomials do not sum to 1 at sample {j} of [0,1]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks the level-`level` cylinder intervals `φ_ι([0,1])` are pairwise
    /// disjoint (touching endpoints allowed). Requires strictly monotone
    /// maps so interval endpoints determine the image.
    pub fn check_nonoverlap(&self, ctx: &PrecisionContext, level: u32) -> Result<bool> {
        if level == 0 {
            return Err(Error::InvalidInput("non-overlap level must be at least 1".into()));
        }
        let n = self.maps.len() as u64;
        let count = n
            .checked_pow(level)
            .filter(|&c| c <= 1 << 20)
            .ok_or_else(|| Error::Budget(format!("{n}^{level} cylinders is too many to check")))?;
        let tol = ctx.pow10(-(f64::from(ctx.digits()) / 2.0));
        for (i, map) in self.maps.iter().enumerate() {
            let mut sign = 0i32;
            for x in unit_samples(ctx, 33) {
                let d = map.deriv_real(ctx, &x)?;
                let s = if d > tol {
                    1
                } else if d < ctx.real(-tol.clone()) {
                    -1
                } else {
                    0
                };
                if s == 0 || (sign != 0 && s != sign) {
                    return Err(Error::Unsupported(format!(
                        "non-overlap check requires strictly monotone maps; map {} is not",
                        i + 1
                    )));
                }
                sign = s;
            }
        }
        let mut intervals = Vec::with_capacity(count as usize);
        let mut word = vec![0usize; level as usize];
        loop {
            let mut a = ctx.zero();
            let mut b = ctx.one();
            for &idx in word.iter().rev() {
                a = self.maps[idx].eval_real(ctx, &a)?;
                b = self.maps[idx].eval_real(ctx, &b)?;
            }
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            intervals.push((a, b));
            if !next_word(&mut word, self.maps.len()) {
                break;
            }
        }
        intervals.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite endpoints"));
        for pair in intervals.windows(2) {
            let gap = ctx.real(&pair[1].0 - &pair[0].1);
            if gap < ctx.real(-tol.clone()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Runs every hypothesis check and merges the results.
    pub fn validate(&self, ctx: &PrecisionContext, boundary_samples: u32) -> Result<ValidationReport> {
        let mut report = self.check_contraction(ctx, boundary_samples)?;
        match self.check_weights(ctx, 65) {
            Ok(()) => report.weight_ok = true,
            Err(Error::Validation(m)) => {
                report.weight_ok = false;
                report.messages.push(format!("failure: {m}"));
            }
            Err(e) => return Err(e),
        }
        if let Some(q) = &self.second_weights {
            let probe = IfsConfig {
                maps: self.maps.clone(),
                weights: WeightSpec::ConstantVector(q.clone()),
                second_weights: None,
                epsilon: self.epsilon.clone(),
            };
            match probe.check_weights(ctx, 65) {
                Ok(()) => {}
                Err(Error::Validation(m)) => {
                    report.weight_ok = false;
                    report.messages.push(format!("failure: second weights: {m}"));
                }
                Err(e) => return Err(e),
            }
        }
        match self.check_nonoverlap(ctx, 1) {
            Ok(disjoint) => {
                report.nonoverlap_level_checked = Some(1);
                report
                    .messages
                    .push(format!("note: level-1 cylinders pairwise disjoint: {disjoint}"));
            }
            Err(Error::Unsupported(m)) => {
                report.messages.push(format!("note: non-overlap not checked: {m}"));
            }
            Err(e) => return Err(e),
        }
        Ok(report)
    }
}

fn exact_sum(ps: &[Scalar]) -> Option<Rational> {
    let mut total = Rational::new();
    for p in ps {
        total += p.rational()?;
    }
    Some(total)
}

fn unit_samples(ctx: &PrecisionContext, n: u32) -> Vec<Real> {
    (0..n)
        .map(|i| ctx.real(Rational::from((i, n - 1))))
        .collect()
}

fn next_word(word: &mut [usize], base: usize) -> bool {
    for slot in word.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

fn rectangle_boundary(
    ctx: &PrecisionContext,
    lo: &Real,
    hi: &Real,
    eps: &Real,
    samples: u32,
) -> Vec<Complex> {
    let mut pts = Vec::with_capacity(4 * samples as usize);
    let width = ctx.real(hi - lo);
    let neg_eps = ctx.real(-eps.clone());
    for i in 0..samples {
        let t = ctx.real(Rational::from((i, samples - 1)));
        let x = ctx.real(lo + ctx.real(&width * &t));
        let y = ctx.real(&neg_eps + ctx.real(ctx.real(eps * 2u32) * &t));
        pts.push(Complex::new(x.clone(), neg_eps.clone()));
        pts.push(Complex::new(x, eps.clone()));
        pts.push(Complex::new(lo.clone(), y.clone()));
        pts.push(Complex::new(hi.clone(), y));
    }
    pts
}

/// Outcome of the hypothesis checks.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Sampled supremum of `|φ'|` over the complex neighborhood boundary.
    pub contraction_sup: Real,
    pub is_contracting: bool,
    /// Level at which cylinder disjointness was checked, if it was.
    pub nonoverlap_level_checked: Option<u32>,
    pub weight_ok: bool,
    /// `note:` lines are informational; `failure:` lines block validation.
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.is_contracting
            && self.weight_ok
            && !self.messages.iter().any(|m| m.starts_with("failure:"))
    }

    pub fn failures(&self) -> Vec<&str> {
        self.messages
            .iter()
            .filter(|m| m.starts_with("failure:"))
            .map(String::as_str)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub(crate) enum CompiledWeights {
    Constant(Vec<Real>),
    Functions(Vec<Poly>),
}

/// A system that passed validation, pinned to the context it was validated
/// against. All downstream computations take one of these.
#[derive(Debug, Clone)]
pub struct ValidatedIfs {
    config: IfsConfig,
    ctx: PrecisionContext,
    report: ValidationReport,
    weights: CompiledWeights,
}

impl ValidatedIfs {
    pub fn new(config: IfsConfig, ctx: &PrecisionContext) -> Result<Self> {
        Self::with_boundary_samples(config, ctx, 256)
    }

    pub fn with_boundary_samples(
        config: IfsConfig,
        ctx: &PrecisionContext,
        boundary_samples: u32,
    ) -> Result<Self> {
        let report = config.validate(ctx, boundary_samples)?;
        if !report.passed() {
            return Err(Error::Validation(report.failures().join("; ")));
        }
        let weights = match config.weights() {
            WeightSpec::ConstantVector(ps) => {
                CompiledWeights::Constant(ps.iter().map(|p| ctx.real(p.value())).collect())
            }
            WeightSpec::FunctionWeights(polys) => CompiledWeights::Functions(
                polys
                    .iter()
                    .map(|cs| Poly::new(cs.iter().map(|s| ctx.real(s.value())).collect()))
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(ValidatedIfs { config, ctx: *ctx, report, weights })
    }

    pub fn config(&self) -> &IfsConfig {
        &self.config
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn contraction_sup(&self) -> &Real {
        &self.report.contraction_sup
    }

    pub fn n_maps(&self) -> usize {
        self.config.n_maps()
    }

    pub fn maps(&self) -> &[MapSpec] {
        self.config.maps()
    }

    pub fn is_function_weighted(&self) -> bool {
        matches!(self.weights, CompiledWeights::Functions(_))
    }

    /// Constant weight values, if this system uses constant weights.
    pub fn constant_weights(&self) -> Option<&[Real]> {
        match &self.weights {
            CompiledWeights::Constant(v) => Some(v),
            CompiledWeights::Functions(_) => None,
        }
    }

    /// The weight factor `p_i` or `p_i(x)` picked up when map `i` is applied
    /// at the point `x`.
    pub(crate) fn weight_factor(&self, map_index: usize, x: &Real) -> Real {
        match &self.weights {
            CompiledWeights::Constant(v) => v[map_index].clone(),
            CompiledWeights::Functions(polys) => polys[map_index].eval(x),
        }
    }

    /// Same maps and context, different constant weights. Reuses the
    /// contraction report; only the new weights are rechecked.
    pub fn with_constant_weights(&self, weights: Vec<Scalar>) -> Result<Self> {
        let config = IfsConfig {
            maps: self.config.maps.clone(),
            weights: WeightSpec::ConstantVector(weights),
            second_weights: None,
            epsilon: self.config.epsilon.clone(),
        };
        config.check_weights(&self.ctx, 65)?;
        let compiled = match config.weights() {
            WeightSpec::ConstantVector(ps) => {
                CompiledWeights::Constant(ps.iter().map(|p| self.ctx.real(p.value())).collect())
            }
            WeightSpec::FunctionWeights(_) => unreachable!(),
        };
        Ok(ValidatedIfs {
            config,
            ctx: self.ctx,
            report: self.report.clone(),
            weights: compiled,
        })
    }
}
