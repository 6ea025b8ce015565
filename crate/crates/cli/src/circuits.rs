use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use qram_core::builders::BuildInfo;
use qram_core::resources::ProfileName;
use qram_core::sim::{verify_circuit, VerificationReport, VerifyMode};
use qram_core::{build as build_circuit, BitTable, BuilderKind, BuilderSpec, Circuit, ResourceProfile, ResourceReport, UncomputeMode};
use serde::Serialize;

use crate::{parse_enum, print_json, require, Status};

#[derive(Args)]
pub struct TableArgs {
    /// Table source: `random`, `hex:<packed digits>` or `file:<path.qtbl>`.
    #[arg(long)]
    pub table: String,
    /// Number of entries (random and hex tables).
    #[arg(long)]
    pub n: Option<usize>,
    /// Word width in bits.
    #[arg(long, default_value_t = 1)]
    pub width: usize,
    /// Seed for random tables.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl TableArgs {
    pub fn load(&self) -> Result<BitTable> {
        let table = if self.table == "random" {
            let n = require(self.n, "n", "for a random table")?;
            let seed = require(self.seed, "seed", "for a random table")?;
            BitTable::random(n, self.width, seed)?
        } else if let Some(hex) = self.table.strip_prefix("hex:") {
            BitTable::from_hex(hex, require(self.n, "n", "for a hex table")?, self.width)?
        } else if let Some(path) = self.table.strip_prefix("file:") {
            let bytes = std::fs::read(path).with_context(|| format!("reading {path}"))?;
            let t = BitTable::from_qtbl(&bytes)?;
            if self.n.is_some_and(|n| n != t.len()) {
                bail!("--n {} does not match the {} entries in {path}", self.n.unwrap(), t.len());
            }
            t
        } else {
            bail!("unknown table source `{}` (expected random, hex:… or file:…)", self.table);
        };
        Ok(table)
    }
}

#[derive(Args)]
pub struct SpecArgs {
    /// Page size exponent (select_swap).
    #[arg(long)]
    pub page_log: Option<usize>,
    /// Simultaneous queries (parallel_sorted).
    #[arg(long, default_value_t = 1)]
    pub queries: usize,
    /// `coherent` or `measurement_based`.
    #[arg(long, value_parser = parse_enum::<UncomputeMode>)]
    pub uncompute: Option<UncomputeMode>,
    /// Add a control qubit (recursive).
    #[arg(long)]
    pub controlled: bool,
    /// Swap the word out of memory (fanout_swap_qraqm).
    #[arg(long)]
    pub swap_variant: bool,
}

impl SpecArgs {
    pub fn spec(&self, kind: BuilderKind) -> BuilderSpec {
        BuilderSpec {
            kind,
            page_log: self.page_log,
            query_count: self.queries,
            uncompute: self.uncompute,
            controlled: self.controlled,
            swap_variant: self.swap_variant,
        }
    }
}

#[derive(Args)]
pub struct BuildArgs {
    #[arg(long, value_parser = parse_enum::<BuilderKind>)]
    kind: BuilderKind,
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    spec: SpecArgs,
    /// `surface-code` or `unit-gate`.
    #[arg(long, value_parser = parse_enum::<ProfileName>, default_value = "surface-code")]
    profile: ProfileName,
    /// Cost Toffoli-class gates at 7 T.
    #[arg(long)]
    strict_toffoli: bool,
    /// Write the circuit JSON here.
    #[arg(long)]
    circuit_out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BuildOutput<'a> {
    schema: &'static str,
    spec: &'a BuilderSpec,
    info: &'a BuildInfo,
    profile: ResourceProfile,
    report: ResourceReport,
    layers: usize,
}

pub fn build(a: BuildArgs) -> Status {
    let table = a.table.load()?;
    let spec = a.spec.spec(a.kind);
    let q = build_circuit(&spec, &table)?;
    let profile = ResourceProfile { name: a.profile, strict_toffoli: a.strict_toffoli };
    if let Some(path) = &a.circuit_out {
        std::fs::write(path, q.circuit.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    print_json(&BuildOutput {
        schema: "qramwb.build/1",
        spec: &q.spec,
        info: &q.info,
        profile,
        report: qram_core::count_resources(&q.circuit, &profile),
        layers: q.circuit.depth(),
    })?;
    Ok(true)
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Builder kind, or `all`.
    #[arg(long)]
    kind: String,
    #[command(flatten)]
    table: TableArgs,
    #[command(flatten)]
    spec: SpecArgs,
    /// Check this many sampled address tuples instead of all of them.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for address sampling.
    #[arg(long)]
    sample_seed: Option<u64>,
    /// Verify a saved circuit in place of the freshly built one.
    #[arg(long)]
    circuit: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyOutput {
    schema: &'static str,
    all_pass: bool,
    reports: Vec<VerifyEntry>,
}

#[derive(Serialize)]
struct VerifyEntry {
    #[serde(flatten)]
    report: VerificationReport,
    structural_errors: Vec<String>,
}

pub fn verify(a: VerifyArgs) -> Status {
    let table = a.table.load()?;
    let kinds: Vec<BuilderKind> = if a.kind == "all" {
        if a.circuit.is_some() {
            bail!("--circuit needs a single --kind");
        }
        BuilderKind::ALL.to_vec()
    } else {
        vec![parse_enum(&a.kind).map_err(anyhow::Error::msg)?]
    };
    let mode = match a.samples {
        Some(count) => VerifyMode::Sampled { count, seed: require(a.sample_seed, "sample-seed", "with --samples")? },
        None => VerifyMode::Exhaustive,
    };
    let mut reports = vec![];
    for kind in kinds {
        // `all` skips option flags a builder does not take.
        let spec = a.spec.spec(kind);
        if a.kind == "all" && spec.validate(table.len()).is_err() {
            continue;
        }
        let mut q = build_circuit(&spec, &table)?;
        let mut structural_errors = vec![];
        if let Some(path) = &a.circuit {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let loaded = Circuit::from_json(&text)?;
            if loaded.registers() != q.circuit.registers() {
                bail!("{} does not have the register layout of {kind} for this table", path.display());
            }
            structural_errors = loaded.validate();
            q.circuit = loaded;
        }
        let report = verify_circuit(&q, &table, mode)?;
        eprintln!("verify: {kind} {}/{} cases pass", report.passed, report.cases);
        reports.push(VerifyEntry { report, structural_errors });
    }
    let all_pass = reports.iter().all(|r| r.report.all_pass() && r.structural_errors.is_empty());
    print_json(&VerifyOutput { schema: "qramwb.verify/1", all_pass, reports })?;
    Ok(all_pass)
}
