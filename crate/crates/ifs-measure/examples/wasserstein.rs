//! 1-Wasserstein distance between two stationary measures of the same maps
//! under different weight vectors, with the closed-form check available for
//! affine systems.
//!
//!     cargo run --release --example wasserstein

use ifs_measure::{wasserstein, wasserstein_oracle_affine_exact, IfsConfig, MapSpec, PrecisionContext, Scalar, ValidatedIfs, WeightSpec};

fn main() -> ifs_measure::Result<()> {
    let ctx = PrecisionContext::new(64)?;
    let s = |t: &str| Scalar::parse(&ctx, t);

    // x/3 and x/2 + 1/2 carry p = (1/3, 2/3) and q = (3/4, 1/4). The maps
    // are increasing with disjoint images and p − q has one-signed partial
    // sums, so W₁ is exactly the difference of the first moments.
    let maps = vec![
        MapSpec::affine(s("1/3")?, s("0")?)?,
        MapSpec::affine(s("1/2")?, s("1/2")?)?,
    ];
    let p = WeightSpec::ConstantVector(vec![s("1/3")?, s("2/3")?]);
    let q = vec![s("3/4")?, s("1/4")?];
    let config = IfsConfig::new(&ctx, maps, p)?.with_second_weights(q)?;
    let ifs = ValidatedIfs::new(config, &ctx)?;

    let k = 12;
    let result = wasserstein(&ifs, k, 1)?;
    println!("k   |mu_k(p) - mu_k(q)| applied to g(x) = x");
    for (i, w) in result.per_k.iter().enumerate() {
        match w {
            Some(w) => println!("{:<3} {}", i + 1, ctx.render(w, 40)?),
            None => println!("{:<3} unavailable", i + 1),
        }
    }
    println!();
    println!("W1 estimate  = {}", ctx.render(&result.value, 40)?);
    println!("W1 exact     = {}", wasserstein_oracle_affine_exact(&ifs)?);
    Ok(())
}
