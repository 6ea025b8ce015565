use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use qram_core::noise::{
    estimate_with, fit_scaling, simulate_derangement, simulate_persistent_accumulation, DerangementResult, ErrorKinds,
    Estimate, FitModel, Locus, NoiseModel, PersistentCurve, ScalingFit, ScalingPoint,
};
use qram_core::{BuilderKind, BuilderSpec};
use serde::{Deserialize, Serialize};

use crate::circuits::SpecArgs;
use crate::{parse_enum, print_json, require, Status};

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct NoiseArgs {
    #[command(subcommand)]
    model: Option<NoiseCommand>,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Subcommand)]
enum NoiseCommand {
    /// Router corruption that persists across queries.
    Persistent {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        queries: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Heralded derangement check over `m` copies.
    Derangement {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Fit scaling exponents to a sweep CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// `power_in_N` or `power_in_logN`.
        #[arg(long, value_parser = parse_enum::<FitModel>)]
        model: FitModel,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Builder kinds, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_enum::<BuilderKind>)]
    kind: Vec<BuilderKind>,
    /// Single table size.
    #[arg(long, conflicts_with = "sweep_n")]
    n: Option<usize>,
    /// Doubling range `lo:hi` of table sizes.
    #[arg(long)]
    sweep_n: Option<String>,
    /// Error probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `bitflip`, `phaseflip` or `both`.
    #[arg(long, default_value = "bitflip")]
    errors: String,
    /// `live_qubits` or `gate_operands`.
    #[arg(long, value_parser = parse_enum::<Locus>, default_value = "live_qubits")]
    locus: Locus,
    /// Router levels treated as error corrected.
    #[arg(long, default_value_t = 0)]
    protected_levels: usize,
    /// Accept p up to 1.
    #[arg(long)]
    stress: bool,
    /// `csv` or `json`.
    #[arg(long, default_value = "csv")]
    format: String,
    #[command(flatten)]
    spec: SpecArgs,
}

fn sizes(a: &SweepArgs) -> Result<Vec<usize>> {
    if let Some(n) = a.n {
        return Ok(vec![n]);
    }
    let range = require(a.sweep_n.as_deref(), "n or --sweep-n", "for a sweep")?;
    let (lo, hi) = range.split_once(':').context("--sweep-n takes lo:hi")?;
    let (lo, hi): (usize, usize) = (lo.parse()?, hi.parse()?);
    if lo == 0 || lo > hi {
        bail!("--sweep-n needs 0 < lo <= hi");
    }
    Ok(std::iter::successors(Some(lo), |&n| n.checked_mul(2)).take_while(|&n| n <= hi).collect())
}

fn sweep(a: SweepArgs) -> Status {
    if a.kind.is_empty() || a.p.is_empty() {
        bail!("--kind and --p are required for a sweep");
    }
    let trials = require(a.trials, "trials", "for a sweep")?;
    let seed = require(a.seed, "seed", "for a sweep")?;
    let kinds = match a.errors.as_str() {
        "bitflip" => ErrorKinds::BITFLIP,
        "phaseflip" => ErrorKinds::PHASEFLIP,
        "both" => ErrorKinds::BOTH,
        other => bail!("unknown --errors `{other}`"),
    };
    if !matches!(a.format.as_str(), "csv" | "json") {
        bail!("--format must be csv or json");
    }
    let ns = sizes(&a)?;
    let mut rows: Vec<Estimate> = vec![];
    for &kind in &a.kind {
        let spec: BuilderSpec = a.spec.spec(kind);
        for &n in &ns {
            for &p in &a.p {
                let noise = if a.stress { NoiseModel::stress(p, kinds, seed)? } else { NoiseModel::new(p, kinds, seed)? };
                let noise = noise.locus(a.locus).protected_levels(a.protected_levels);
                let e = estimate_with(&spec, n, &noise, trials)?;
                eprintln!("noise: {kind} N={n} p={p} infidelity={:.6}", e.infidelity);
                rows.push(e);
            }
        }
    }
    if a.format == "json" {
        print_json(&SweepOutput { schema: "qramwb.noise/1", rows })?;
    } else {
        println!("{}", Estimate::CSV_HEADER);
        for e in &rows {
            println!("{}", e.csv_row());
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct SweepOutput {
    schema: &'static str,
    rows: Vec<Estimate>,
}

#[derive(Serialize)]
struct PersistentOutput {
    schema: &'static str,
    growth_exponent: Option<f64>,
    #[serde(flatten)]
    curve: PersistentCurve,
}

#[derive(Serialize)]
struct DerangementOutput {
    schema: &'static str,
    #[serde(flatten)]
    result: DerangementResult,
}

#[derive(Deserialize)]
struct CsvRow {
    builder: String,
    #[serde(rename = "N")]
    n: usize,
    p: f64,
    infidelity: f64,
    ci_lo: f64,
    ci_hi: f64,
}

#[derive(Serialize)]
struct FitEntry {
    builder: String,
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<ScalingFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct FitOutput {
    schema: &'static str,
    fits: Vec<FitEntry>,
}

fn fit(input: PathBuf, model: FitModel) -> Status {
    let mut reader = csv::Reader::from_path(&input).with_context(|| format!("reading {}", input.display()))?;
    let mut groups: BTreeMap<(String, String), Vec<ScalingPoint>> = BTreeMap::new();
    for row in reader.deserialize() {
        let r: CsvRow = row?;
        let point = ScalingPoint { n: r.n as f64, infidelity: r.infidelity, ci_halfwidth: (r.ci_hi - r.ci_lo) / 2.0 };
        groups.entry((r.builder, r.p.to_string())).or_default().push(point);
    }
    let mut ok = true;
    let fits = groups
        .into_iter()
        .map(|((builder, p), points)| {
            let p = p.parse().unwrap_or(f64::NAN);
            match fit_scaling(&points, model) {
                Ok(f) => FitEntry { builder, p, fit: Some(f), error: None },
                Err(e) => {
                    ok = false;
                    FitEntry { builder, p, fit: None, error: Some(e.to_string()) }
                }
            }
        })
        .collect();
    print_json(&FitOutput { schema: "qramwb.fit/1", fits })?;
    Ok(ok)
}

pub fn run(a: NoiseArgs) -> Status {
    match a.model {
        None => sweep(a.sweep),
        Some(NoiseCommand::Persistent { n, p, queries, trials, seed }) => {
            let curve = simulate_persistent_accumulation(n, p, queries, trials, seed)?;
            print_json(&PersistentOutput { schema: "qramwb.persistent/1", growth_exponent: curve.growth_exponent(), curve })?;
            Ok(true)
        }
        Some(NoiseCommand::Derangement { m, p, trials, seed }) => {
            let result = simulate_derangement(m, p, trials, seed)?;
            print_json(&DerangementOutput { schema: "qramwb.derangement/1", result })?;
            Ok(true)
        }
        Some(NoiseCommand::Fit { input, model }) => fit(input, model),
    }
}
