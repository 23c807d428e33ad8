//! Command-line front end: config ingestion, pipeline dispatch, and
//! machine-readable JSON reports.
//!
//! Exit codes: 0 for definitive verdicts, 2 for inconclusive ones, 1 for
//! configuration or runtime errors. Reports are deterministic for a fixed
//! (config, seed) pair.

mod report;
mod verify;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use koopman_core::identities::SquareMatrix;
use koopman_core::irred;
use koopman_core::ortho::{self, TestElement};
use koopman_core::series::{self, SeriesKind};
use koopman_core::{ClassifyPolicy, Grids, MeasureFamilySpec};
use report::{Report, RunConfig};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "koopman",
    about = "Orthogonality criteria for translated Gaussian product measures and the m <= 2 irreducibility verdict"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config file (families, window, grids, seed).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the window half-width.
    #[arg(long, global = true)]
    n_max: Option<u32>,
    /// Override the RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Test element, e.g. `E12:t=1`, `tau-minus:phi=0.5,s=2`,
    /// `diag:a=2`, or `matrix:a,b;c,d`.
    #[arg(long, global = true)]
    element: Option<String>,
    /// Named example (commutant command): `s3-coset`, `dixmier:z2`,
    /// `dixmier:z4`, `dixmier:s3`, `schur-weyl:MxN`.
    #[arg(long, global = true)]
    example: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical orthogonality battery, or a single-element test with --element.
    Orthogonality,
    /// Full irreducibility verdict with case classification (m <= 2).
    Irreducibility,
    /// Self-check of the exact identity suites on seeded random instances.
    IdentitiesVerify,
    /// Finite-dimensional commutant laboratory examples.
    Commutant,
    /// Classify one criterion series from the config's `series` block.
    Series,
}

fn main() {
    let code = match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    };
    std::process::exit(code);
}

fn configure_threads() {
    if let Ok(v) = std::env::var("KOOPMAN_CRITERIA_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build_global();
        }
    }
}

fn run() -> Result<i32> {
    configure_threads();
    let cli = Cli::parse();
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.n_max {
        config.n_max = n;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }

    let (name, result, exit) = match cli.command {
        Command::Orthogonality => cmd_orthogonality(&config, cli.element.as_deref())?,
        Command::Irreducibility => cmd_irreducibility(&config)?,
        Command::IdentitiesVerify => cmd_identities_verify(&config)?,
        Command::Commutant => cmd_commutant(cli.example.as_deref())?,
        Command::Series => cmd_series(&config)?,
    };

    let report = Report::new(name, &config, result);
    let json = report.to_json()?;
    if let Some(path) = &cli.out {
        std::fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(exit)
}

fn spec_from(config: &RunConfig) -> Result<MeasureFamilySpec> {
    let b: Vec<&str> = config.families.b.iter().map(|s| s.as_str()).collect();
    let a: Vec<&str> = config.families.a.iter().map(|s| s.as_str()).collect();
    MeasureFamilySpec::parse(config.m, config.n_max, &b, &a)
        .map_err(|e| anyhow!("invalid measure families: {e}"))
}

fn parse_element(text: &str) -> Result<TestElement> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("element must look like `E12:t=1`"))?;
    if kind == "matrix" {
        let rows: Vec<Vec<f64>> = rest
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|e| anyhow!("{e}")))
                    .collect()
            })
            .collect::<Result<_>>()?;
        return Ok(TestElement::generic(
            SquareMatrix::from_rows(&rows).map_err(|e| anyhow!("bad matrix: {e}"))?,
        ));
    }
    let params: std::collections::BTreeMap<&str, &str> = rest
        .split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.split_once('=')
                .ok_or_else(|| anyhow!("bad element parameter `{p}`"))
        })
        .collect::<Result<_>>()?;
    let get = |k: &str| -> Result<f64> {
        params
            .get(k)
            .ok_or_else(|| anyhow!("element `{kind}` needs parameter `{k}`"))?
            .parse::<f64>()
            .map_err(|e| anyhow!("parameter `{k}`: {e}"))
    };
    Ok(match kind {
        "E12" => TestElement::e12(get("t")?),
        "E21" => TestElement::e21(get("t")?),
        "E12P1" => TestElement::e12_p1(get("t")?),
        "E21P2" => TestElement::e21_p2(get("t")?),
        "tau-minus" => TestElement::tau_minus(get("phi")?, get("s")?),
        "diag" => TestElement::diag(get("a")?),
        other => bail!("unknown element kind `{other}`"),
    })
}

fn cmd_orthogonality(
    config: &RunConfig,
    element: Option<&str>,
) -> Result<(&'static str, serde_json::Value, i32)> {
    let spec = spec_from(config)?;
    let grids = config.grids();
    let policy = ClassifyPolicy::default();
    if let Some(text) = element {
        let elem = parse_element(text)?;
        let r = ortho::orthogonal_general(&spec, &elem.matrix, config.n_max, &policy)
            .map_err(|e| anyhow!("{e}"))?;
        let exit = exit_for(matches!(r.verdict, ortho::OrthogonalityVerdict::Inconclusive));
        println!(
            "orthogonality[{text}]: {:?} (centered {:?}, mean {:?})",
            r.verdict, r.centered.verdict, r.mean.verdict
        );
        return Ok((
            "orthogonality",
            serde_json::json!({ "element": elem, "general": r }),
            exit,
        ));
    }
    let battery = match spec.m() {
        1 => ortho::canonical_battery_m1(&spec, config.n_max, &policy),
        _ => ortho::canonical_battery_m2(&spec, config.n_max, &grids, &policy),
    }
    .map_err(|e| anyhow!("{e}"))?;
    println!(
        "orthogonality battery: {:?} ({} conditions, all_orthogonal = {})",
        battery.overall,
        battery.conditions.len(),
        battery.all_orthogonal
    );
    for c in &battery.conditions {
        println!(
            "  {:24} {:?}{}",
            c.name,
            c.verdict,
            c.witness
                .as_ref()
                .map(|w| format!(" (fails at {w})"))
                .unwrap_or_default()
        );
    }
    let exit = exit_for(matches!(
        battery.overall,
        ortho::OrthogonalityVerdict::Inconclusive
    ));
    Ok(("orthogonality", serde_json::to_value(&battery)?, exit))
}

fn cmd_irreducibility(config: &RunConfig) -> Result<(&'static str, serde_json::Value, i32)> {
    let spec = spec_from(config)?;
    let grids = config.grids();
    let policy = ClassifyPolicy::default();
    let r = irred::irreducibility_verdict(&spec, config.n_max, &grids, &policy)
        .map_err(|e| anyhow!("{e}"))?;
    println!("irreducibility: {:?}", r.verdict);
    if let Some(case) = &r.case {
        println!(
            "  case: table I {:?}, table II {:?}, split {:?}, approximable {:?}",
            case.table_i, case.table_ii, case.split, case.approximable
        );
    }
    let exit = exit_for(matches!(r.verdict, irred::IrredVerdict::Inconclusive));
    Ok(("irreducibility", serde_json::to_value(&r)?, exit))
}

fn cmd_identities_verify(config: &RunConfig) -> Result<(&'static str, serde_json::Value, i32)> {
    let outcome = verify::run_identity_suites(config.seed);
    let all_pass = outcome.iter().all(|s| s.failures == 0);
    for s in &outcome {
        println!(
            "identity suite {:28} {:5} instances, {} failures, max rel err {:.3e}",
            s.name, s.instances, s.failures, s.max_rel_err
        );
    }
    println!(
        "identities-verify: {}",
        if all_pass { "PASS" } else { "FAIL" }
    );
    let exit = if all_pass { 0 } else { 1 };
    Ok(("identities-verify", serde_json::to_value(&outcome)?, exit))
}

fn cmd_commutant(example: Option<&str>) -> Result<(&'static str, serde_json::Value, i32)> {
    use koopman_core::commlab;
    let name = example.unwrap_or("s3-coset");
    let value = match name {
        "s3-coset" => {
            let r = commlab::s3_coset_example().map_err(|e| anyhow!("{e}"))?;
            println!(
                "s3-coset: commutant dim {}, permutation centralizer size {}",
                r.commutant_dim, r.permutation_centralizer_size
            );
            serde_json::to_value(&r)?
        }
        "dixmier:z2" | "dixmier:z4" | "dixmier:s3" => {
            let table = match name {
                "dixmier:z2" => commlab::cyclic_group_table(2),
                "dixmier:z4" => commlab::cyclic_group_table(4),
                _ => commlab::s3_group_table(),
            };
            let r = commlab::dixmier_check(&table).map_err(|e| anyhow!("{e}"))?;
            println!(
                "{name}: |G| = {}, right commutant dim {}, left span dim {}",
                r.order, r.right_commutant_dim, r.left_span_dim
            );
            serde_json::to_value(&r)?
        }
        other => {
            let dims = other
                .strip_prefix("schur-weyl:")
                .and_then(|d| d.split_once('x'))
                .ok_or_else(|| anyhow!("unknown commutant example `{other}`"))?;
            let m: usize = dims.0.parse()?;
            let n: usize = dims.1.parse()?;
            let r = commlab::schur_weyl_check(m, n).map_err(|e| anyhow!("{e}"))?;
            println!(
                "schur-weyl {m}x{n}: perm span {}, GL commutant {}, mutual ok {}",
                r.perm_span_dim, r.gl_commutant_dim, r.mutual_commutants_ok
            );
            serde_json::to_value(&r)?
        }
    };
    Ok(("commutant", value, 0))
}

fn cmd_series(config: &RunConfig) -> Result<(&'static str, serde_json::Value, i32)> {
    let spec = spec_from(config)?;
    let policy = ClassifyPolicy::default();
    let kind = config.series_kind()?;
    let outcome = series::classify_series(&spec, &kind, config.n_max, &policy)
        .map_err(|e| anyhow!("{e}"))?;
    let trace = series::partial_sums(&spec, &kind, config.n_max.min(spec.n_max()))
        .map_err(|e| anyhow!("{e}"))?;
    println!(
        "series {:?}: {:?} ({:?}), final partial sum {:.6e}",
        kind,
        outcome.verdict.verdict,
        outcome.verdict.method,
        trace.final_sum()
    );
    let exit = exit_for(matches!(
        outcome.verdict.verdict,
        series::Verdict::Inconclusive
    ));
    Ok((
        "series",
        serde_json::json!({ "kind": kind, "verdict": outcome.verdict, "trace": trace }),
        exit,
    ))
}

fn exit_for(inconclusive: bool) -> i32 {
    if inconclusive {
        2
    } else {
        0
    }
}

impl RunConfig {
    fn grids(&self) -> Grids {
        let mut grids = Grids::default();
        if let Some(g) = &self.grid_overrides {
            if let Some(t) = &g.t {
                grids.t = t.clone();
            }
            if let Some(s) = &g.s {
                grids.s = s.clone();
            }
            if let Some(phi) = &g.phi {
                grids.phi = phi.clone();
            }
            if let Some(c) = &g.c {
                grids.c = c.iter().map(|p| (p[0], p[1])).collect();
            }
        }
        grids
    }

    fn series_kind(&self) -> Result<SeriesKind> {
        let s = self
            .series
            .as_ref()
            .ok_or_else(|| anyhow!("config is missing the `series` block"))?;
        let k = s.k.unwrap_or(1);
        let j = s.j.unwrap_or(2);
        let t = s.t.unwrap_or(1.0);
        let sv = s.s.unwrap_or(1.0);
        let phi = s.phi.unwrap_or(0.0);
        Ok(match s.kind.as_str() {
            "SL" => SeriesKind::SL { k, j },
            "SLminus" => SeriesKind::SLminus { k, j, t },
            "Sigma1" => SeriesKind::Sigma1 { s: sv },
            "Sigma2Minus" => SeriesKind::Sigma2Minus { phi, s: sv },
            "Sigma2C" => SeriesKind::Sigma2C {
                c1: s.c1.unwrap_or(1.0),
                c2: s.c2.unwrap_or(1.0),
            },
            "Sigma12Minus" => SeriesKind::Sigma12Minus { phi, s: sv },
            "SL11" => SeriesKind::SL11,
            "SL22" => SeriesKind::SL22,
            "RatioB12" => SeriesKind::RatioB12,
            "RatioB21" => SeriesKind::RatioB21,
            "NormF" => SeriesKind::NormF,
            "NormG" => SeriesKind::NormG,
            "FplusSG" => SeriesKind::FplusSG { s: sv },
            other => bail!("unknown series kind `{other}`"),
        })
    }
}
