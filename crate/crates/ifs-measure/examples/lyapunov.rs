//! Lyapunov exponent of an IFS whose maps are not affine: the integral of
//! −Σ p_i log|φ'_i| against the stationary measure.
//!
//!     cargo run --release --example lyapunov

use ifs_measure::{lyapunov, IfsConfig, MapSpec, PrecisionContext, Scalar, ValidatedIfs, WeightSpec};

fn main() -> ifs_measure::Result<()> {
    let ctx = PrecisionContext::new(80)?;
    let s = |t: &str| Scalar::parse(&ctx, t);

    // sin(πx/4)/6 + 1/4 and sin(πx/4)/3 + 2/3 with weights (1/3, 2/3).
    let maps = vec![
        MapSpec::sine_affine(s("1/6")?, s("1/4")?)?,
        MapSpec::sine_affine(s("1/3")?, s("2/3")?)?,
    ];
    let weights = WeightSpec::ConstantVector(vec![s("1/3")?, s("2/3")?]);
    let ifs = ValidatedIfs::new(IfsConfig::new(&ctx, maps, weights)?, &ctx)?;

    let series = lyapunov(&ifs, 12, 1)?;
    println!("k   Lyapunov exponent estimate                       stable digits");
    for j in 1..=series.k() {
        match series.value(j) {
            Some(v) => println!(
                "{j:<3} {}  {}",
                ctx.render(v, 48)?,
                series.stable_digits[j as usize - 1]
            ),
            None => println!("{j:<3} unavailable"),
        }
    }
    Ok(())
}
