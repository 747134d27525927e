//! Command-line front end.
//!
//! Exit codes: 0 success, 1 config or usage problems, 2 unmet mathematical
//! hypotheses, 3 numeric or budget failures.

use crate::applications::{
    integrate_piecewise, iterate_oracle, moments, wasserstein, wasserstein_oracle_affine,
    Integrator, DEFAULT_ORACLE_BUDGET,
};
use crate::config::{self, RunConfig};
use crate::determinant::{coeffs_recursive, EstimateSeries};
use crate::ifs::ValidatedIfs;
use crate::precision::{PrecisionContext, Real};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::path::PathBuf;

const DEFAULT_DIGITS: u32 = 64;
const DEFAULT_K: u32 = 12;

#[derive(Parser)]
#[command(
    name = "ifs-measure",
    version,
    about = "Integrals against stationary measures of iterated function systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the system config file.
    config: PathBuf,
    /// Working precision in decimal digits (overrides the config).
    #[arg(long)]
    digits: Option<u32>,
    /// Significant digits to print.
    #[arg(long = "print-digits", default_value_t = 40)]
    print_digits: u32,
    /// Truncation level (overrides the config).
    #[arg(long)]
    k: Option<u32>,
    /// Worker threads for orbit computations; never changes the digits.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the hypothesis checks and print the report.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Print the parsed config back in canonical form instead.
        #[arg(long)]
        echo: bool,
    },
    /// Approximate ∫ g dμ, one row per truncation level.
    Integrate {
        #[command(flatten)]
        common: Common,
    },
    /// Moments γ_0..γ_M of the stationary measure.
    Moments {
        #[command(flatten)]
        common: Common,
    },
    /// Wasserstein distance between the p- and q-weighted measures.
    Wasserstein {
        #[command(flatten)]
        common: Common,
    },
    /// Lyapunov exponent of the system.
    Lyapunov {
        #[command(flatten)]
        common: Common,
    },
    /// ∫ g dμ for a piecewise integrand given per cylinder.
    Piecewise {
        #[command(flatten)]
        common: Common,
    },
    /// Push-forward cross-check Σ p_ι g(φ_ι(x0)) over words of length n.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Dump traces and determinant coefficients for debugging.
    Traces {
        #[command(flatten)]
        common: Common,
    },
}

/// Runs the CLI; `args` excludes the binary name. Returns the exit code.
pub fn run<I>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = String>,
{
    let full = std::iter::once("ifs-measure".to_string()).chain(args);
    let cli = match Cli::try_parse_from(full) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            let _ = write!(out, "{rendered}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let mut buf = String::new();
    let result = execute(&cli.command, &mut buf);
    let _ = out.write_all(buf.as_bytes());
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionTooLow { .. }
        | Error::RenderDigits { .. }
        | Error::InvalidInput(_)
        | Error::Config(_) => 1,
        Error::Domain(_) | Error::Validation(_) | Error::Unsupported(_) => 2,
        Error::Budget(_) | Error::Numeric(_) => 3,
    }
}

struct Loaded {
    ctx: PrecisionContext,
    rc: RunConfig,
    k: u32,
}

fn load(common: &Common) -> Result<Loaded> {
    let text = std::fs::read_to_string(&common.config).map_err(|e| {
        Error::Config(format!("cannot read '{}': {e}", common.config.display()))
    })?;
    let digits = common
        .digits
        .or(config::scan_digits(&text)?)
        .unwrap_or(DEFAULT_DIGITS);
    let ctx = PrecisionContext::new(digits)?;
    let rc = config::parse(&text, &ctx)?;
    let k = common.k.or(rc.k).unwrap_or(DEFAULT_K);
    Ok(Loaded { ctx, rc, k })
}

fn validated(loaded: &Loaded) -> Result<ValidatedIfs> {
    ValidatedIfs::new(loaded.rc.ifs.clone(), &loaded.ctx)
}

fn execute(command: &Command, buf: &mut String) -> Result<()> {
    match command {
        Command::Validate { common, echo } => {
            let loaded = load(common)?;
            if *echo {
                buf.push_str(&config::echo(&loaded.rc));
                return Ok(());
            }
            let report = loaded.rc.ifs.validate(&loaded.ctx, 256)?;
            let sup = if report.contraction_sup.is_finite() {
                loaded.ctx.render(&report.contraction_sup, common.print_digits)?
            } else {
                "inf".into()
            };
            let _ = writeln!(buf, "contraction_sup = {sup}");
            let _ = writeln!(buf, "is_contracting = {}", report.is_contracting);
            let _ = writeln!(buf, "weight_ok = {}", report.weight_ok);
            let level = report
                .nonoverlap_level_checked
                .map_or("none".to_string(), |l| l.to_string());
            let _ = writeln!(buf, "nonoverlap_level_checked = {level}");
            for m in &report.messages {
                let _ = writeln!(buf, "{m}");
            }
            if !report.passed() {
                let mut failed = Vec::new();
                if !report.is_contracting {
                    failed.push("contraction check failed");
                }
                if !report.weight_ok {
                    failed.push("weight check failed");
                }
                if failed.is_empty() {
                    failed.push("hypothesis checks failed");
                }
                return Err(Error::Validation(failed.join("; ")));
            }
            Ok(())
        }
        Command::Integrate { common } => {
            let loaded = load(common)?;
            let ifs = validated(&loaded)?;
            let g = loaded.rc.observable(&loaded.ctx, &ifs)?;
            let series = crate::applications::integrate(&ifs, &g, loaded.k, common.workers)?;
            print_series(buf, &loaded.ctx, &series, common)?;
            series.final_value().map(|_| ())
        }
        Command::Moments { common } => {
            let loaded = load(common)?;
            let order = loaded
                .rc
                .moment_order
                .ok_or_else(|| Error::Config("moments needs 'M = <order>' in the config".into()))?;
            let ifs = validated(&loaded)?;
            let mv = moments(&ifs, order, loaded.k, common.workers)?;
            if common.format == Format::Csv {
                let _ = writeln!(buf, "n,value");
            }
            for (n, v) in mv.values.iter().enumerate() {
                let r = loaded.ctx.render(v, common.print_digits)?;
                match common.format {
                    Format::Plain => {
                        let _ = writeln!(buf, "n={n}  {r}");
                    }
                    Format::Csv => {
                        let _ = writeln!(buf, "{n},{r}");
                    }
                }
            }
            Ok(())
        }
        Command::Wasserstein { common } => {
            let loaded = load(common)?;
            let ifs = validated(&loaded)?;
            let result = wasserstein(&ifs, loaded.k, common.workers)?;
            if common.format == Format::Csv {
                let _ = writeln!(buf, "k,value,stable_digits");
            }
            for (i, w) in result.per_k.iter().enumerate() {
                let j = i + 1;
                let stable = result.stable_digits[i];
                let rendered = w
                    .as_ref()
                    .map(|v| loaded.ctx.render(v, common.print_digits))
                    .transpose()?;
                print_row(buf, common.format, j, rendered, stable);
            }
            match common.format {
                Format::Plain => {
                    let r = loaded.ctx.render(&result.value, common.print_digits)?;
                    let _ = writeln!(buf, "W1 = {r}");
                    if let Ok(oracle) = wasserstein_oracle_affine(&ifs) {
                        let r = loaded.ctx.render(&oracle, common.print_digits)?;
                        let _ = writeln!(buf, "oracle = {r}");
                    }
                }
                Format::Csv => {}
            }
            Ok(())
        }
        Command::Lyapunov { common } => {
            let loaded = load(common)?;
            let ifs = validated(&loaded)?;
            let series = crate::applications::lyapunov(&ifs, loaded.k, common.workers)?;
            print_series(buf, &loaded.ctx, &series, common)?;
            series.final_value().map(|_| ())
        }
        Command::Piecewise { common } => {
            let loaded = load(common)?;
            let level = loaded.rc.piecewise_level.ok_or_else(|| {
                Error::Config("piecewise needs 'K = <level>' in the config".into())
            })?;
            let ifs = validated(&loaded)?;
            let pieces = loaded.rc.piece_observables(&loaded.ctx, ifs.n_maps())?;
            let value = integrate_piecewise(&ifs, level, &pieces, loaded.k, common.workers)?;
            let r = loaded.ctx.render(&value, common.print_digits)?;
            match common.format {
                Format::Plain => {
                    let _ = writeln!(buf, "value = {r}");
                }
                Format::Csv => {
                    let _ = writeln!(buf, "k,value");
                    let _ = writeln!(buf, "{},{r}", loaded.k);
                }
            }
            Ok(())
        }
        Command::Oracle { common } => {
            let loaded = load(common)?;
            let n = loaded
                .rc
                .oracle_depth
                .ok_or_else(|| Error::Config("oracle needs 'n = <depth>' in the config".into()))?;
            let ifs = validated(&loaded)?;
            let g = loaded.rc.observable(&loaded.ctx, &ifs)?;
            let x0 = match &loaded.rc.x0 {
                Some(s) => loaded.ctx.real(s.value()),
                None => loaded.ctx.real(rug::Rational::from((1, 2))),
            };
            let budget = loaded.rc.budget.unwrap_or(DEFAULT_ORACLE_BUDGET);
            let value = iterate_oracle(&ifs, &g, n, &x0, budget, common.workers)?;
            let r = loaded.ctx.render(&value, common.print_digits)?;
            match common.format {
                Format::Plain => {
                    let _ = writeln!(buf, "value = {r}");
                }
                Format::Csv => {
                    let _ = writeln!(buf, "n,value");
                    let _ = writeln!(buf, "{n},{r}");
                }
            }
            Ok(())
        }
        Command::Traces { common } => {
            let loaded = load(common)?;
            let ifs = validated(&loaded)?;
            let g = loaded.rc.observable(&loaded.ctx, &ifs)?;
            let integrator = Integrator::new(&ifs, loaded.k, common.workers)?;
            let traces = integrator.traces(&g)?;
            let coeffs = coeffs_recursive(&loaded.ctx, &traces);
            let render = |v: &Real| loaded.ctx.render(v, common.print_digits);
            match common.format {
                Format::Plain => {
                    for m in 1..=loaded.k {
                        let _ = writeln!(
                            buf,
                            "m={m}  t={}  tau={}",
                            render(traces.t(m))?,
                            render(traces.tau(m))?
                        );
                    }
                    for n in 0..=loaded.k as usize {
                        let _ = writeln!(
                            buf,
                            "n={n}  a={}  alpha={}",
                            render(&coeffs.a[n])?,
                            render(&coeffs.alpha[n])?
                        );
                    }
                }
                Format::Csv => {
                    let _ = writeln!(buf, "level,t,tau,a,alpha");
                    let _ = writeln!(
                        buf,
                        "0,,,{},{}",
                        render(&coeffs.a[0])?,
                        render(&coeffs.alpha[0])?
                    );
                    for m in 1..=loaded.k {
                        let _ = writeln!(
                            buf,
                            "{m},{},{},{},{}",
                            render(traces.t(m))?,
                            render(traces.tau(m))?,
                            render(&coeffs.a[m as usize])?,
                            render(&coeffs.alpha[m as usize])?
                        );
                    }
                }
            }
            Ok(())
        }
    }
}

fn print_series(
    buf: &mut String,
    ctx: &PrecisionContext,
    series: &EstimateSeries,
    common: &Common,
) -> Result<()> {
    if common.format == Format::Csv {
        let _ = writeln!(buf, "k,value,stable_digits");
    }
    for j in 1..=series.k() {
        let rendered = series
            .value(j)
            .map(|v| ctx.render(v, common.print_digits))
            .transpose()?;
        print_row(buf, common.format, j as usize, rendered, series.stable_digits[j as usize - 1]);
    }
    Ok(())
}

fn print_row(buf: &mut String, format: Format, j: usize, value: Option<String>, stable: u32) {
    match format {
        Format::Plain => {
            let v = value.unwrap_or_else(|| "unavailable".into());
            let _ = writeln!(buf, "k={j}  {v}  stable={stable}");
        }
        Format::Csv => {
            let v = value.unwrap_or_default();
            let _ = writeln!(buf, "{j},{v},{stable}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_vec(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let code = run(args.iter().map(|s| s.to_string()), &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    fn write_config(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("ifs-measure-cli-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{name}-{}.cfg", std::process::id()));
        std::fs::write(&path, text).unwrap();
        path
    }

    const THIRDS: &str = "\
map = affine 1/3 0
map = affine 1/3 2/3
p = 1/3 2/3
g = poly 0 1
";

    #[test]
    fn validate_reports_and_echoes() {
        let path = write_config("validate", THIRDS);
        let (code, out) = run_vec(&["validate", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("is_contracting = true"));
        assert!(out.contains("nonoverlap_level_checked = 1"));

        let (code, out) = run_vec(&["validate", path.to_str().unwrap(), "--echo"]);
        assert_eq!(code, 0);
        assert!(out.contains("map = affine 1/3 0"));
        assert!(out.contains("p = 1/3 2/3"));
    }

    #[test]
    fn integrate_prints_series_in_both_formats() {
        let path = write_config("integrate", THIRDS);
        let (code, plain) = run_vec(&[
            "integrate",
            path.to_str().unwrap(),
            "--k=6",
            "--print-digits=20",
        ]);
        assert_eq!(code, 0, "{plain}");
        assert!(plain.contains("k=6  0.66666666666666666667"), "{plain}");

        let (code, csv) = run_vec(&[
            "integrate",
            path.to_str().unwrap(),
            "--k=6",
            "--print-digits=20",
            "--format=csv",
        ]);
        assert_eq!(code, 0);
        assert!(csv.starts_with("k,value,stable_digits\n"), "{csv}");
        assert!(csv.contains("6,0.66666666666666666667,"), "{csv}");
    }

    #[test]
    fn missing_config_and_bad_key_are_exit_1() {
        let (code, out) = run_vec(&["integrate", "/nonexistent/config.cfg"]);
        assert_eq!(code, 1, "{out}");

        let path = write_config("badkey", "map = affine 1/3 0\nbogus = 2\n");
        let (code, out) = run_vec(&["validate", path.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(out.contains("bogus"));
    }

    #[test]
    fn failed_hypotheses_are_exit_2() {
        let path = write_config(
            "expanding",
            "map = affine 2 0\nmap = affine 1/3 0\np = 1/2 1/2\n",
        );
        let (code, out) = run_vec(&["validate", path.to_str().unwrap()]);
        assert_eq!(code, 2, "{out}");
        assert!(out.contains("is_contracting = false"));
    }

    #[test]
    fn budget_blowout_is_exit_3() {
        let path = write_config("budget", "map = affine 1/3 0\nmap = affine 1/3 2/3\np = 1/3 2/3\nn = 30\nbudget = 1024\n");
        let (code, out) = run_vec(&["oracle", path.to_str().unwrap()]);
        assert_eq!(code, 3, "{out}");
    }

    #[test]
    fn help_is_exit_0() {
        let (code, out) = run_vec(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("integrate"));
    }
}
