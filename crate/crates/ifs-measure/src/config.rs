//! Flat `key = value` run configs.
//!
//! ```text
//! # two affine maps with weights 1/3, 2/3
//! map = affine 1/3 0
//! map = affine 1/3 2/3
//! p = 1/3 2/3
//! g = poly 0 1
//! k = 12
//! digits = 64
//! ```
//!
//! Keys: `map` (one per line: `affine R T`, `moebius A B C D`,
//! `sineaffine A B`), `p` (constant weights) or `pfn` (one polynomial per
//! map, coefficients in ascending degree), `q` (second weights), `epsilon`,
//! `g` (`poly c0 c1 …` or `lyapunov`), `M` (moment order), `K` (piecewise
//! level), `piece` (`WORD poly c0 c1 …`), `n` (oracle depth), `x0`,
//! `budget`, `k`, `digits`. Lines starting with `#` are comments. Numbers
//! may be fractions, integers, or finite decimals; the original spelling is
//! preserved for `--echo`.

use crate::ifs::{IfsConfig, MapSpec, Scalar, WeightSpec};
use crate::observable::Observable;
use crate::orbit::Word;
use crate::poly::Poly;
use crate::precision::PrecisionContext;
use crate::{Error, Result};
use std::fmt::Write as _;

/// The integrand named by `g =`.
#[derive(Debug, Clone)]
pub enum ObservableSpec {
    Poly(Vec<Scalar>),
    Lyapunov,
}

/// A parsed run config.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ifs: IfsConfig,
    pub observable: Option<ObservableSpec>,
    pub moment_order: Option<u32>,
    pub piecewise_level: Option<u32>,
    pub pieces: Vec<(String, Vec<Scalar>)>,
    pub oracle_depth: Option<u32>,
    pub x0: Option<Scalar>,
    pub budget: Option<u64>,
    pub k: Option<u32>,
    pub digits: Option<u32>,
}

/// Pre-scan for `digits = N` so the context can be built before parsing
/// numbers at that precision.
pub fn scan_digits(text: &str) -> Result<Option<u32>> {
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            if key.trim() == "digits" {
                let d = value
                    .trim()
                    .parse()
                    .map_err(|_| bad_value("digits", value))?;
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

fn bad_value(key: &str, value: &str) -> Error {
    Error::Config(format!("bad value for key '{key}': '{}'", value.trim()))
}

pub fn parse(text: &str, ctx: &PrecisionContext) -> Result<RunConfig> {
    let mut maps: Vec<MapSpec> = Vec::new();
    let mut p: Option<Vec<Scalar>> = None;
    let mut pfn: Vec<Vec<Scalar>> = Vec::new();
    let mut q: Option<Vec<Scalar>> = None;
    let mut epsilon: Option<Scalar> = None;
    let mut observable: Option<ObservableSpec> = None;
    let mut pieces: Vec<(String, Vec<Scalar>)> = Vec::new();
    let mut moment_order: Option<u32> = None;
    let mut piecewise_level: Option<u32> = None;
    let mut oracle_depth: Option<u32> = None;
    let mut x0: Option<Scalar> = None;
    let mut budget: Option<u64> = None;
    let mut k: Option<u32> = None;
    let mut digits: Option<u32> = None;

    fn set_once<T>(slot: &mut Option<T>, key: &str, value: T) -> Result<()> {
        if slot.is_some() {
            return Err(Error::Config(format!("duplicate key '{key}'")));
        }
        *slot = Some(value);
        Ok(())
    }

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        let tokens: Vec<&str> = value.split_whitespace().collect();
        match key {
            "map" => maps.push(parse_map(ctx, &tokens, value)?),
            "p" => set_once(&mut p, key, scalars(ctx, key, &tokens)?)?,
            "pfn" => pfn.push(scalars(ctx, key, &tokens)?),
            "q" => set_once(&mut q, key, scalars(ctx, key, &tokens)?)?,
            "epsilon" => set_once(&mut epsilon, key, one_scalar(ctx, key, &tokens)?)?,
            "g" => {
                let spec = match tokens.split_first() {
                    Some((&"poly", coeffs)) if !coeffs.is_empty() => {
                        ObservableSpec::Poly(scalars(ctx, key, coeffs)?)
                    }
                    Some((&"lyapunov", rest)) if rest.is_empty() => ObservableSpec::Lyapunov,
                    _ => return Err(bad_value(key, value)),
                };
                set_once(&mut observable, key, spec)?;
            }
            "piece" => {
                let (word, rest) = tokens.split_first().ok_or_else(|| bad_value(key, value))?;
                match rest.split_first() {
                    Some((&"poly", coeffs)) if !coeffs.is_empty() => {
                        pieces.push((word.to_string(), scalars(ctx, key, coeffs)?));
                    }
                    _ => return Err(bad_value(key, value)),
                }
            }
            "M" => set_once(&mut moment_order, key, int(key, value)?)?,
            "K" => set_once(&mut piecewise_level, key, int(key, value)?)?,
            "n" => set_once(&mut oracle_depth, key, int(key, value)?)?,
            "x0" => set_once(&mut x0, key, one_scalar(ctx, key, &tokens)?)?,
            "budget" => set_once(&mut budget, key, int(key, value)?)?,
            "k" => set_once(&mut k, key, int(key, value)?)?,
            "digits" => set_once(&mut digits, key, int(key, value)?)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
    }

    if maps.is_empty() {
        return Err(Error::Config("no maps: add 'map = …' lines".into()));
    }
    let weights = match (p, pfn.is_empty()) {
        (Some(_), false) => {
            return Err(Error::Config("give either 'p' or 'pfn' lines, not both".into()))
        }
        (Some(v), true) => WeightSpec::ConstantVector(v),
        (None, false) => WeightSpec::FunctionWeights(pfn),
        (None, true) => {
            return Err(Error::Config("no weights: add a 'p' or 'pfn' line".into()))
        }
    };
    let mut ifs = IfsConfig::new(ctx, maps, weights)?;
    if let Some(q) = q {
        ifs = ifs.with_second_weights(q)?;
    }
    if let Some(eps) = epsilon {
        ifs = ifs.with_epsilon(eps)?;
    }
    Ok(RunConfig {
        ifs,
        observable,
        moment_order,
        piecewise_level,
        pieces,
        oracle_depth,
        x0,
        budget,
        k,
        digits,
    })
}

fn parse_map(ctx: &PrecisionContext, tokens: &[&str], value: &str) -> Result<MapSpec> {
    let err = || bad_value("map", value);
    let (kind, params) = tokens.split_first().ok_or_else(err)?;
    let ss = scalars(ctx, "map", params)?;
    match (*kind, ss.len()) {
        ("affine", 2) => MapSpec::affine(ss[0].clone(), ss[1].clone()),
        ("moebius", 4) => MapSpec::moebius(ss[0].clone(), ss[1].clone(), ss[2].clone(), ss[3].clone()),
        ("sineaffine", 2) => MapSpec::sine_affine(ss[0].clone(), ss[1].clone()),
        _ => Err(err()),
    }
}

fn scalars(ctx: &PrecisionContext, key: &str, tokens: &[&str]) -> Result<Vec<Scalar>> {
    if tokens.is_empty() {
        return Err(Error::Config(format!("key '{key}' needs at least one number")));
    }
    tokens
        .iter()
        .map(|t| {
            Scalar::parse(ctx, t)
                .map_err(|_| Error::Config(format!("bad number '{t}' for key '{key}'")))
        })
        .collect()
}

fn one_scalar(ctx: &PrecisionContext, key: &str, tokens: &[&str]) -> Result<Scalar> {
    let mut v = scalars(ctx, key, tokens)?;
    if v.len() != 1 {
        return Err(Error::Config(format!("key '{key}' takes exactly one number")));
    }
    Ok(v.pop().expect("length checked"))
}

fn int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| bad_value(key, value))
}

impl RunConfig {
    /// The configured integrand, or `g(x) = x` if none was given.
    pub fn observable(
        &self,
        ctx: &PrecisionContext,
        ifs: &crate::ifs::ValidatedIfs,
    ) -> Result<Observable> {
        match &self.observable {
            None => Ok(Observable::identity(ctx)),
            Some(ObservableSpec::Poly(coeffs)) => Ok(Observable::polynomial(Poly::new(
                coeffs.iter().map(|s| ctx.real(s.value())).collect(),
            )?)),
            Some(ObservableSpec::Lyapunov) => Observable::log_derivative(ifs),
        }
    }

    /// The piece list as words and observables.
    pub fn piece_observables(
        &self,
        ctx: &PrecisionContext,
        n_maps: usize,
    ) -> Result<Vec<(Word, Observable)>> {
        self.pieces
            .iter()
            .map(|(text, coeffs)| {
                let word = Word::parse(text, n_maps)?;
                let poly = Poly::new(coeffs.iter().map(|s| ctx.real(s.value())).collect())?;
                Ok((word, Observable::polynomial(poly)))
            })
            .collect()
    }
}

/// Emits a parsed config in canonical form; re-parsing gives an identical
/// system. Literals are preserved as written.
pub fn echo(rc: &RunConfig) -> String {
    let mut out = String::new();
    for map in rc.ifs.maps() {
        match map {
            MapSpec::Affine { ratio, offset } => {
                let _ = writeln!(out, "map = affine {} {}", ratio.literal(), offset.literal());
            }
            MapSpec::Moebius { a, b, c, d } => {
                let _ = writeln!(
                    out,
                    "map = moebius {} {} {} {}",
                    a.literal(),
                    b.literal(),
                    c.literal(),
                    d.literal()
                );
            }
            MapSpec::SineAffine { amplitude, offset } => {
                let _ = writeln!(
                    out,
                    "map = sineaffine {} {}",
                    amplitude.literal(),
                    offset.literal()
                );
            }
        }
    }
    match rc.ifs.weights() {
        WeightSpec::ConstantVector(ps) => {
            let _ = writeln!(out, "p = {}", literals(ps));
        }
        WeightSpec::FunctionWeights(polys) => {
            for coeffs in polys {
                let _ = writeln!(out, "pfn = {}", literals(coeffs));
            }
        }
    }
    if let Some(q) = rc.ifs.second_weights() {
        let _ = writeln!(out, "q = {}", literals(q));
    }
    let _ = writeln!(out, "epsilon = {}", rc.ifs.epsilon().literal());
    match &rc.observable {
        Some(ObservableSpec::Poly(coeffs)) => {
            let _ = writeln!(out, "g = poly {}", literals(coeffs));
        }
        Some(ObservableSpec::Lyapunov) => {
            let _ = writeln!(out, "g = lyapunov");
        }
        None => {}
    }
    for (word, coeffs) in &rc.pieces {
        let _ = writeln!(out, "piece = {word} poly {}", literals(coeffs));
    }
    if let Some(m) = rc.moment_order {
        let _ = writeln!(out, "M = {m}");
    }
    if let Some(level) = rc.piecewise_level {
        let _ = writeln!(out, "K = {level}");
    }
    if let Some(n) = rc.oracle_depth {
        let _ = writeln!(out, "n = {n}");
    }
    if let Some(x0) = &rc.x0 {
        let _ = writeln!(out, "x0 = {}", x0.literal());
    }
    if let Some(b) = rc.budget {
        let _ = writeln!(out, "budget = {b}");
    }
    if let Some(k) = rc.k {
        let _ = writeln!(out, "k = {k}");
    }
    if let Some(d) = rc.digits {
        let _ = writeln!(out, "digits = {d}");
    }
    out
}

fn literals(ss: &[Scalar]) -> String {
    ss.iter().map(Scalar::literal).collect::<Vec<_>>().join(" ")
}
