//! Integrating a function defined piecewise on the level-1 cylinders: when
//! the cylinder images are disjoint, ∫ g dμ splits into per-cylinder
//! integrals of g∘φ_ι, each handled by the usual estimator.
//!
//!     cargo run --release --example piecewise

use ifs_measure::{integrate_piecewise, IfsConfig, MapSpec, Observable, PrecisionContext, Scalar, ValidatedIfs, WeightSpec, Word};
use rug::Rational;

fn main() -> ifs_measure::Result<()> {
    let ctx = PrecisionContext::new(64)?;
    let s = |t: &str| Scalar::parse(&ctx, t);

    let maps = vec![
        MapSpec::affine(s("1/3")?, s("0")?)?,
        MapSpec::affine(s("1/3")?, s("2/3")?)?,
    ];
    let weights = WeightSpec::ConstantVector(vec![s("1/3")?, s("2/3")?]);
    let ifs = ValidatedIfs::new(IfsConfig::new(&ctx, maps, weights)?, &ctx)?;

    // g = x on the image of the first map, g = x² on the image of the second.
    let pieces = vec![
        (Word::parse("1", 2)?, Observable::identity(&ctx)),
        (Word::parse("2", 2)?, Observable::monomial(&ctx, 2)),
    ];
    let value = integrate_piecewise(&ifs, 1, &pieces, 12, 1)?;

    // For this system the answer is exactly 148/243:
    // (1/3)·∫(x/3)dμ + (2/3)·∫(x/3 + 2/3)²dμ with γ₁ = 2/3, γ₂ = 5/9.
    let exact = ctx.real(Rational::from((148, 243)));
    println!("piecewise integral = {}", ctx.render(&value, 40)?);
    println!("exact 148/243      = {}", ctx.render(&exact, 40)?);
    let err = ctx.real(&value - exact).abs();
    println!("|error|            = {}", ctx.render(&err, 3)?);
    Ok(())
}
