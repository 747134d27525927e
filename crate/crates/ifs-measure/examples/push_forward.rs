//! Estimator-free cross-check: pushing a point mass forward n steps through
//! every length-n word approximates ∫ g dμ to within Lip(g)·(sup|φ'|)ⁿ.
//! Slow but independent of the trace machinery.
//!
//!     cargo run --release --example push_forward

use ifs_measure::{integrate, iterate_oracle, IfsConfig, MapSpec, Observable, PrecisionContext, Scalar, ValidatedIfs, WeightSpec};
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
    let g = Observable::identity(&ctx);

    let series = integrate(&ifs, &g, 10, 1)?;
    let estimate = series.final_value()?;
    println!("trace estimate (k = 10): {}", ctx.render(estimate, 40)?);

    let x0 = ctx.real(Rational::from((1, 2)));
    println!();
    println!("n    push-forward of the point mass at 1/2   |difference|");
    for n in [4, 8, 12, 16] {
        let oracle = iterate_oracle(&ifs, &g, n, &x0, 1 << 26, 1)?;
        let diff = ctx.real(estimate - &oracle).abs();
        println!(
            "{n:<4} {}   {}",
            ctx.render(&oracle, 30)?,
            ctx.render(&diff, 3)?
        );
    }
    println!();
    println!("the difference contracts like (1/3)^n; both routes agree on ∫ x dμ = 2/3");
    Ok(())
}
