//! Moments γ_n = ∫ xⁿ dμ of a self-similar measure, checked against the
//! exact rational recursion available for affine maps.
//!
//!     cargo run --release --example moments

use ifs_measure::{moments, moments_oracle_affine, IfsConfig, MapSpec, PrecisionContext, Scalar, ValidatedIfs, WeightSpec};

fn main() -> ifs_measure::Result<()> {
    let ctx = PrecisionContext::new(64)?;
    let s = |t: &str| Scalar::parse(&ctx, t);

    // x ↦ x/3 and x ↦ x/3 + 2/3 with weights (1/3, 2/3): a biased measure
    // on the middle-thirds Cantor set.
    let maps = vec![
        MapSpec::affine(s("1/3")?, s("0")?)?,
        MapSpec::affine(s("1/3")?, s("2/3")?)?,
    ];
    let weights = WeightSpec::ConstantVector(vec![s("1/3")?, s("2/3")?]);
    let ifs = ValidatedIfs::new(IfsConfig::new(&ctx, maps, weights)?, &ctx)?;

    let order = 10;
    let k = 14;
    let approx = moments(&ifs, order, k, 1)?;
    let exact = moments_oracle_affine(&ifs, order)?;

    println!("n   gamma_n (truncation level k = {k})          |error|");
    for n in 0..=order as usize {
        let value = &approx.values[n];
        let err = ctx.real(value - ctx.real(&exact[n])).abs();
        println!(
            "{n:<3} {}  {}",
            ctx.render(value, 40)?,
            ctx.render(&err, 3)?
        );
    }
    println!();
    println!("exact gamma_{order} = {}", exact[order as usize]);
    Ok(())
}
