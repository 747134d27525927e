//! The hypothesis checks behind every run: complex contraction on a
//! neighborhood of [0,1], endpoint containment, and weight admissibility.
//! The report carries the numbers, not just a verdict.
//!
//!     cargo run --release --example validate_system

use ifs_measure::{IfsConfig, MapSpec, PrecisionContext, Scalar, WeightSpec};

fn report(ctx: &PrecisionContext, label: &str, config: &IfsConfig) -> ifs_measure::Result<()> {
    let report = config.validate(ctx, 256)?;
    println!("{label}");
    println!("  sup |phi'| near [0,1] = {}", ctx.render(&report.contraction_sup, 20)?);
    println!("  contracting           = {}", report.is_contracting);
    println!("  weights admissible    = {}", report.weight_ok);
    match report.nonoverlap_level_checked {
        Some(l) => println!("  overlap checked       = level {l} (result in the notes)"),
        None => println!("  overlap checked       = skipped"),
    }
    for m in &report.messages {
        println!("  {m}");
    }
    println!("  verdict               = {}", if report.passed() { "usable" } else { "rejected" });
    println!();
    Ok(())
}

fn main() -> ifs_measure::Result<()> {
    let ctx = PrecisionContext::new(40)?;
    let s = |t: &str| Scalar::parse(&ctx, t);

    let good = IfsConfig::new(
        &ctx,
        vec![
            MapSpec::moebius(s("0")?, s("1")?, s("1")?, s("2")?)?,
            MapSpec::moebius(s("0")?, s("1")?, s("1")?, s("4")?)?,
        ],
        WeightSpec::ConstantVector(vec![s("1/2")?, s("1/2")?]),
    )?;
    report(&ctx, "1/(x+2), 1/(x+4) with weights (1/2, 1/2):", &good)?;

    // Same maps, weights that do not sum to 1.
    let bad_weights = IfsConfig::new(
        &ctx,
        vec![
            MapSpec::moebius(s("0")?, s("1")?, s("1")?, s("2")?)?,
            MapSpec::moebius(s("0")?, s("1")?, s("1")?, s("4")?)?,
        ],
        WeightSpec::ConstantVector(vec![s("1/2")?, s("1/3")?]),
    )?;
    report(&ctx, "same maps, weights (1/2, 1/3):", &bad_weights)?;

    // An expanding map fails the contraction screen.
    let expanding = IfsConfig::new(
        &ctx,
        vec![
            MapSpec::affine(s("3/2")?, s("0")?)?,
            MapSpec::affine(s("1/4")?, s("3/4")?)?,
        ],
        WeightSpec::ConstantVector(vec![s("1/2")?, s("1/2")?]),
    )?;
    report(&ctx, "3x/2 and x/4 + 3/4 with weights (1/2, 1/2):", &expanding)?;
    Ok(())
}
