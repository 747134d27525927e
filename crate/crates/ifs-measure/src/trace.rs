//! Periodic-point traces.
//!
//! For each level `m`, the traces sum over all words of length `m`:
//!
//! ```text
//! t_m   = Σ_ι w_ι / (1 − φ'_ι(z_ι))
//! τ_m   = Σ_ι w_ι · (Σ_{k<m} g(z_{σ^k ι})) / (1 − φ'_ι(z_ι))
//! ```
//!
//! Every summand is invariant under rotating the word, so the sums run over
//! cyclic classes with multiplicity. Summation is sequential over classes in
//! lexicographic order, folded in fixed blocks of 64, so results are
//! bit-identical regardless of the worker count; workers only parallelize
//! the per-class orbit computations.

use crate::ifs::ValidatedIfs;
use crate::observable::Observable;
use crate::orbit::{cyclic_classes, orbit_data, PeriodicOrbit};
use crate::precision::{PrecisionContext, Real};
use crate::{Error, Result};

const BLOCK: usize = 64;

/// Splits `0..n` into contiguous ranges and maps them on scoped threads.
/// Output order matches input order, so callers stay deterministic.
pub(crate) fn parallel_map_result<T, F>(n: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let workers = workers.max(1).min(n.max(1));
    if workers == 1 {
        return (0..n).map(&f).collect();
    }
    let chunk = n.div_ceil(workers);
    let mut out = Vec::with_capacity(n);
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for w in 0..workers {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(n);
            if lo >= hi {
                break;
            }
            let f = &f;
            handles.push(scope.spawn(move || (lo..hi).map(f).collect::<Vec<Result<T>>>()));
        }
        for handle in handles {
            let results = handle.join().expect("worker panicked");
            for r in results {
                out.push(r?);
            }
        }
        Ok(())
    })?;
    Ok(out)
}

/// Fixed-shape summation: terms are pushed in order, folded into blocks of
/// 64, and the blocks are folded in order. The result depends only on the
/// term sequence.
struct BlockSum {
    blocks: Vec<Real>,
    acc: Real,
    in_acc: usize,
}

impl BlockSum {
    fn new(ctx: &PrecisionContext) -> Self {
        BlockSum { blocks: Vec::new(), acc: ctx.zero(), in_acc: 0 }
    }

    fn push(&mut self, ctx: &PrecisionContext, term: Real) {
        self.acc += term;
        self.in_acc += 1;
        if self.in_acc == BLOCK {
            self.blocks.push(std::mem::replace(&mut self.acc, ctx.zero()));
            self.in_acc = 0;
        }
    }

    fn finish(self, ctx: &PrecisionContext) -> Real {
        let mut total = ctx.zero();
        for b in self.blocks {
            total += b;
        }
        total + self.acc
    }
}

/// Orbit data for every cyclic class at every level up to `k`, computed once
/// and shared by all traces over the same system.
#[derive(Debug, Clone)]
pub struct OrbitSet {
    k: u32,
    levels: Vec<Vec<(u32, PeriodicOrbit)>>,
}

impl OrbitSet {
    pub fn compute(ifs: &ValidatedIfs, k: u32, workers: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("truncation level k must be at least 1".into()));
        }
        let mut levels = Vec::with_capacity(k as usize);
        for m in 1..=k {
            let classes = cyclic_classes(ifs.n_maps(), m)?;
            let orbits = parallel_map_result(classes.len(), workers, |i| {
                orbit_data(ifs, &classes[i].representative)
            })?;
            levels.push(
                classes
                    .iter()
                    .map(|c| c.class_size)
                    .zip(orbits)
                    .collect::<Vec<(u32, PeriodicOrbit)>>(),
            );
        }
        Ok(OrbitSet { k, levels })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Classes at level `m` (1-based): `(class_size, orbit)` pairs.
    pub fn level(&self, m: u32) -> &[(u32, PeriodicOrbit)] {
        &self.levels[m as usize - 1]
    }

    /// The same orbits under different constant weights. Fixed points and
    /// derivatives are weight-independent, so only the weight products are
    /// recomputed, in the same multiplication order as `orbit_data`.
    pub fn reweighted_constant(&self, ifs: &ValidatedIfs) -> Result<OrbitSet> {
        let ctx = ifs.ctx();
        if ifs.constant_weights().is_none() {
            return Err(Error::Unsupported("reweighting needs constant weights".into()));
        }
        let levels = self
            .levels
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|(size, orb)| {
                        let m = orb.word.len();
                        let mut weight = ctx.one();
                        for k in 1..=m {
                            weight *= ifs.weight_factor(orb.word.map_index(k - 1), &orb.orbit[k % m]);
                        }
                        (*size, PeriodicOrbit { weight, ..orb.clone() })
                    })
                    .collect()
            })
            .collect();
        Ok(OrbitSet { k: self.k, levels })
    }
}

/// The trace sequences `t_1..t_k` and `τ_1..τ_k` for one observable.
#[derive(Debug, Clone)]
pub struct TraceTable {
    k: u32,
    t: Vec<Real>,
    tau: Vec<Real>,
}

impl TraceTable {
    pub fn compute(
        ifs: &ValidatedIfs,
        orbits: &OrbitSet,
        g: &Observable,
        workers: usize,
    ) -> Result<Self> {
        let ctx = ifs.ctx();
        let mut t = Vec::with_capacity(orbits.k() as usize);
        let mut tau = Vec::with_capacity(orbits.k() as usize);
        for m in 1..=orbits.k() {
            let level = orbits.level(m);
            let terms = parallel_map_result(level.len(), workers, |i| {
                let (size, orb) = &level[i];
                class_terms(ctx, *size, orb, g)
            })?;
            let mut t_sum = BlockSum::new(ctx);
            let mut tau_sum = BlockSum::new(ctx);
            for (t_term, tau_term) in terms {
                t_sum.push(ctx, t_term);
                tau_sum.push(ctx, tau_term);
            }
            t.push(t_sum.finish(ctx));
            tau.push(tau_sum.finish(ctx));
        }
        Ok(TraceTable { k: orbits.k(), t, tau })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `t_m`, 1-based.
    pub fn t(&self, m: u32) -> &Real {
        &self.t[m as usize - 1]
    }

    /// `τ_m`, 1-based.
    pub fn tau(&self, m: u32) -> &Real {
        &self.tau[m as usize - 1]
    }
}

/// One class's contribution to `(t_m, τ_m)`, with multiplicity.
fn class_terms(
    ctx: &PrecisionContext,
    class_size: u32,
    orb: &PeriodicOrbit,
    g: &Observable,
) -> Result<(Real, Real)> {
    let denom = ctx.real(1u32 - &orb.deriv);
    if !(denom > 0u32) {
        return Err(Error::Numeric(format!(
            "derivative at the fixed point of word {} is not below 1",
            orb.word
        )));
    }
    let base = ctx.real(&orb.weight / &denom) * class_size;
    let mut birkhoff = ctx.zero();
    for point in &orb.orbit {
        birkhoff += g.eval(ctx, point)?;
    }
    let tau_term = ctx.real(&base * &birkhoff);
    Ok((base, tau_term))
}

/// `t_m` for one level, computed from scratch.
pub fn trace_t(ifs: &ValidatedIfs, m: u32) -> Result<Real> {
    let g = Observable::constant(ifs.ctx(), ifs.ctx().zero());
    Ok(level_traces(ifs, &g, m)?.0)
}

/// `τ_m` for one level, computed from scratch.
pub fn trace_tau(ifs: &ValidatedIfs, g: &Observable, m: u32) -> Result<Real> {
    Ok(level_traces(ifs, g, m)?.1)
}

fn level_traces(ifs: &ValidatedIfs, g: &Observable, m: u32) -> Result<(Real, Real)> {
    if m == 0 {
        return Err(Error::InvalidInput("trace level must be at least 1".into()));
    }
    let ctx = ifs.ctx();
    let classes = cyclic_classes(ifs.n_maps(), m)?;
    let mut t_sum = BlockSum::new(ctx);
    let mut tau_sum = BlockSum::new(ctx);
    for class in &classes {
        let orb = orbit_data(ifs, &class.representative)?;
        let (t_term, tau_term) = class_terms(ctx, class.class_size, &orb, g)?;
        t_sum.push(ctx, t_term);
        tau_sum.push(ctx, tau_term);
    }
    Ok((t_sum.finish(ctx), tau_sum.finish(ctx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{IfsConfig, MapSpec, Scalar, WeightSpec};
    use crate::orbit::Word;
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
    fn traces_on_thirds_match_hand_computation() {
        let c = ctx();
        let ifs = thirds(&c);
        let g = Observable::identity(&c);

        let t1 = trace_t(&ifs, 1).unwrap();
        assert!(c.real(t1 - Rational::from((3, 2))).abs() < c.pow10(-38.0));
        let t2 = trace_t(&ifs, 2).unwrap();
        assert!(c.real(t2 - Rational::from((9, 8))).abs() < c.pow10(-38.0));

        let tau1 = trace_tau(&ifs, &g, 1).unwrap();
        assert!(c.real(tau1 - 1u32).abs() < c.pow10(-38.0));
        let tau2 = trace_tau(&ifs, &g, 2).unwrap();
        assert!(c.real(tau2 - Rational::from((3, 2))).abs() < c.pow10(-38.0));
    }

    #[test]
    fn table_matches_single_level_functions() {
        let c = ctx();
        let ifs = moebius(&c);
        let g = Observable::monomial(&c, 2);
        let orbits = OrbitSet::compute(&ifs, 5, 1).unwrap();
        let table = TraceTable::compute(&ifs, &orbits, &g, 1).unwrap();
        for m in 1..=5 {
            let t = trace_t(&ifs, m).unwrap();
            let tau = trace_tau(&ifs, &g, m).unwrap();
            assert_eq!(&t, table.t(m), "t_{m}");
            assert_eq!(&tau, table.tau(m), "tau_{m}");
        }
    }

    #[test]
    fn class_sum_equals_full_word_sum() {
        let c = ctx();
        let ifs = moebius(&c);
        let m = 4u32;
        // Brute force over all 16 words, no cyclic reduction.
        let mut brute = c.zero();
        for bits in 0..16u32 {
            let symbols: Vec<u8> = (0..4).map(|j| 1 + ((bits >> j) & 1) as u8).collect();
            let w = Word::new(symbols, 2).unwrap();
            let orb = orbit_data(&ifs, &w).unwrap();
            let denom = c.real(1u32 - &orb.deriv);
            brute += c.real(&orb.weight / &denom);
        }
        let reduced = trace_t(&ifs, m).unwrap();
        assert!(c.real(brute - reduced).abs() < c.pow10(-36.0));
    }

    #[test]
    fn constant_observable_gives_m_times_t() {
        let c = ctx();
        let ifs = moebius(&c);
        let one = Observable::constant(&c, c.one());
        for m in 1..=4 {
            let t = trace_t(&ifs, m).unwrap();
            let tau = trace_tau(&ifs, &one, m).unwrap();
            let d = c.real(tau - c.real(t * m)).abs();
            assert!(d < c.pow10(-36.0), "tau_m(1) = m t_m at m = {m}");
        }
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let c = ctx();
        let ifs = moebius(&c);
        let g = Observable::identity(&c);
        let orbits1 = OrbitSet::compute(&ifs, 6, 1).unwrap();
        let orbits3 = OrbitSet::compute(&ifs, 6, 3).unwrap();
        let t1 = TraceTable::compute(&ifs, &orbits1, &g, 1).unwrap();
        let t3 = TraceTable::compute(&ifs, &orbits3, &g, 3).unwrap();
        for m in 1..=6 {
            assert_eq!(t1.t(m), t3.t(m));
            assert_eq!(t1.tau(m), t3.tau(m));
        }
    }

    #[test]
    fn reweighting_matches_direct_computation() {
        let c = ctx();
        let ifs = thirds(&c);
        let orbits = OrbitSet::compute(&ifs, 4, 1).unwrap();
        let swapped = ifs
            .with_constant_weights(vec![s(&c, "2/3"), s(&c, "1/3")])
            .unwrap();
        let reweighted = orbits.reweighted_constant(&swapped).unwrap();
        let direct = OrbitSet::compute(&swapped, 4, 1).unwrap();
        for m in 1..=4 {
            for (a, b) in reweighted.level(m).iter().zip(direct.level(m)) {
                assert_eq!(a.0, b.0);
                assert_eq!(a.1.weight, b.1.weight);
                assert_eq!(a.1.z, b.1.z);
            }
        }
    }
}
