//! Words, cyclic classes, and periodic orbit data.
//!
//! A word `ι = (i_1, …, i_m)` names the composition `φ_ι = φ_{i_1} ∘ … ∘
//! φ_{i_m}`. Each word has a unique fixed point `z_ι` in `[0,1]`, and the
//! quantities the traces need (the orbit of `z_ι` under cyclic shifts,
//! `φ'_ι(z_ι)`, and the weight product) are invariant under rotating the
//! word, so levels are enumerated by cyclic equivalence classes.

use crate::ifs::ValidatedIfs;
use crate::precision::Real;
use crate::{Error, Result};
use rug::Rational;
use std::fmt;

/// Cap on `N^m`, the number of words per level.
const WORD_BUDGET: u64 = 1 << 24;

/// A nonempty word over the map alphabet, symbols `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    symbols: Vec<u8>,
}

impl Word {
    pub fn new(symbols: Vec<u8>, n_maps: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidInput("empty word".into()));
        }
        for &s in &symbols {
            if s == 0 || s as usize > n_maps {
                return Err(Error::InvalidInput(format!(
                    "word symbol {s} outside 1..={n_maps}"
                )));
            }
        }
        Ok(Word { symbols })
    }

    /// Parses a digit string like `"122"`.
    pub fn parse(text: &str, n_maps: usize) -> Result<Self> {
        let symbols = text
            .trim()
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d >= 1)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidInput(format!("bad word character '{c}'")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Word::new(symbols, n_maps)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based map index at 0-based position `pos`.
    pub fn map_index(&self, pos: usize) -> usize {
        self.symbols[pos] as usize - 1
    }

    /// Left rotation by `k`: `(i_{k+1}, …, i_m, i_1, …, i_k)`.
    pub fn rotate(&self, k: usize) -> Word {
        let m = self.symbols.len();
        let k = k % m;
        let mut symbols = Vec::with_capacity(m);
        symbols.extend_from_slice(&self.symbols[k..]);
        symbols.extend_from_slice(&self.symbols[..k]);
        Word { symbols }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A cyclic equivalence class: its lexicographically least word and the
/// number of distinct rotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicClass {
    pub representative: Word,
    pub class_size: u32,
}

/// All cyclic classes of words of the given length, representatives in
/// lexicographic order. Class sizes sum to `N^length`.
pub fn cyclic_classes(n_maps: usize, length: u32) -> Result<Vec<CyclicClass>> {
    if n_maps == 0 || length == 0 {
        return Err(Error::InvalidInput("need at least one map and length >= 1".into()));
    }
    if n_maps > 9 {
        return Err(Error::InvalidInput("at most 9 maps (single-digit symbols)".into()));
    }
    (n_maps as u64)
        .checked_pow(length)
        .filter(|&c| c <= WORD_BUDGET)
        .ok_or_else(|| Error::Budget(format!("{n_maps}^{length} words at level {length}")))?;
    let m = length as usize;
    let mut classes = Vec::new();
    let mut w = vec![1u8; m];
    loop {
        if is_least_rotation(&w) {
            let p = smallest_period(&w);
            classes.push(CyclicClass {
                representative: Word { symbols: w.clone() },
                class_size: p as u32,
            });
        }
        if !advance(&mut w, n_maps as u8) {
            break;
        }
    }
    Ok(classes)
}

fn is_least_rotation(w: &[u8]) -> bool {
    let m = w.len();
    for r in 1..m {
        for i in 0..m {
            match w[(r + i) % m].cmp(&w[i]) {
                std::cmp::Ordering::Less => return false,
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    true
}

fn smallest_period(w: &[u8]) -> usize {
    let m = w.len();
    'p: for p in 1..=m {
        if m % p != 0 {
            continue;
        }
        for i in p..m {
            if w[i] != w[i - p] {
                continue 'p;
            }
        }
        return p;
    }
    m
}

fn advance(w: &mut [u8], n: u8) -> bool {
    for slot in w.iter_mut().rev() {
        if *slot < n {
            *slot += 1;
            return true;
        }
        *slot = 1;
    }
    false
}

/// Everything the traces need from one periodic point.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub word: Word,
    /// The fixed point `z_ι` of `φ_ι`.
    pub z: Real,
    /// `orbit[k]` is the fixed point of the `k`-fold rotated word;
    /// `orbit[0] = z`.
    pub orbit: Vec<Real>,
    /// `φ'_ι(z_ι)`.
    pub deriv: Real,
    /// The weight product along the orbit.
    pub weight: Real,
}

/// Applies `φ_ι` to `x` (innermost symbol `i_m` first).
fn apply_word(ifs: &ValidatedIfs, w: &Word, x: &Real) -> Result<Real> {
    let ctx = ifs.ctx();
    let mut v = x.clone();
    for pos in (0..w.len()).rev() {
        v = ifs.maps()[w.map_index(pos)].eval_real(ctx, &v)?;
    }
    Ok(v)
}

/// `(φ_ι(x), φ'_ι(x))` by the chain rule.
fn apply_word_with_derivative(ifs: &ValidatedIfs, w: &Word, x: &Real) -> Result<(Real, Real)> {
    let ctx = ifs.ctx();
    let mut v = x.clone();
    let mut d = ctx.one();
    for pos in (0..w.len()).rev() {
        let map = &ifs.maps()[w.map_index(pos)];
        let step = map.deriv_real(ctx, &v)?;
        v = map.eval_real(ctx, &v)?;
        d *= step;
    }
    Ok((v, d))
}

/// The fixed point of `φ_ι` in `[0,1]`.
///
/// Picard iteration from `1/2` until successive iterates agree to within
/// `10^(−digits − guard/2)`, then one Newton step, then a clamp to `[0,1]`.
/// The iteration count is capped using the validated contraction factor.
pub fn fixed_point(ifs: &ValidatedIfs, w: &Word) -> Result<Real> {
    let ctx = ifs.ctx();
    let tol = ctx.pow10(-(f64::from(ctx.digits()) + f64::from(ctx.guard()) / 2.0));
    let sup = ifs.contraction_sup().to_f64();
    let per_digit = -sup.log10();
    let cap = if per_digit > 1e-12 {
        (f64::from(ctx.digits() + ctx.guard()) / per_digit).ceil() as u64 + 50
    } else {
        u64::from(ctx.digits() + ctx.guard()) * 1000 + 50
    };
    let mut z = ctx.real(Rational::from((1, 2)));
    let mut steps = 0u64;
    loop {
        let nz = apply_word(ifs, w, &z)?;
        let diff = ctx.real(&nz - &z).abs();
        z = nz;
        if diff < tol {
            break;
        }
        steps += 1;
        if steps > cap {
            return Err(Error::Numeric(format!(
                "fixed-point iteration for word {w} exceeded {cap} steps"
            )));
        }
    }
    let (val, dv) = apply_word_with_derivative(ifs, w, &z)?;
    let den = ctx.real(dv - 1u32);
    let correction = ctx.real(ctx.real(val - &z) / den);
    z -= correction;
    if z < 0u32 {
        z = ctx.zero();
    } else if z > 1u32 {
        z = ctx.one();
    }
    Ok(z)
}

/// Fixed point, rotated-word orbit, derivative, and weight for one word.
pub fn orbit_data(ifs: &ValidatedIfs, w: &Word) -> Result<PeriodicOrbit> {
    let ctx = ifs.ctx();
    let m = w.len();
    let z = fixed_point(ifs, w)?;
    // v_k = φ_{i_{k+1}} ∘ … ∘ φ_{i_m}(z) is the fixed point of the k-fold
    // rotation; walk the suffix images from v_m = z down to v_1.
    let mut orbit = vec![z.clone(); m];
    let mut v = z.clone();
    for k in (1..m).rev() {
        v = ifs.maps()[w.map_index(k)].eval_real(ctx, &v)?;
        orbit[k] = v.clone();
    }
    let mut deriv = ctx.one();
    let mut weight = ctx.one();
    for k in 1..=m {
        let input = &orbit[k % m];
        let map = &ifs.maps()[w.map_index(k - 1)];
        deriv *= map.deriv_real(ctx, input)?;
        weight *= ifs.weight_factor(w.map_index(k - 1), input);
    }
    Ok(PeriodicOrbit { word: w.clone(), z, orbit, deriv, weight })
}
