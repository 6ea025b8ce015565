use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use num_complex::Complex64;
use qram_core::qla::{
    eigen_oracle, poly_eigen_transform, read_matrix_market, read_vector, regime_markdown, regime_table,
    relative_error, stepcount, write_vector, Polynomial, RegimeReport, StepCount, StepModel,
};
use serde::Serialize;

use crate::{print_json, Status};

/// Oracle agreement required by `cost transform --check`.
const CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Subcommand)]
pub enum CostCommand {
    /// Advantage verdicts for the three hardware regimes.
    Regime {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        k: f64,
        /// `md` or `json`.
        #[arg(long, default_value = "md")]
        format: String,
    },
    /// Steps for one sparse matrix-vector product on P processors.
    Steps {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        p: f64,
        /// shared_memory, hypercube_sort, mesh2d_sort or dense_grid.
        #[arg(long)]
        model: StepModel,
    },
    /// f(H)v / ‖f(H)v‖ for a Hermitian Matrix Market file.
    Transform {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        vector: PathBuf,
        /// Real coefficients a_0,a_1,… of f.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "coeffs_file")]
        coeffs: Vec<f64>,
        /// Complex coefficients, one per line in vector-file format.
        #[arg(long)]
        coeffs_file: Option<PathBuf>,
        /// Rescale H to unit spectral norm first.
        #[arg(long)]
        rescale: bool,
        /// Compare against dense eigendecomposition (dimension ≤ 256).
        #[arg(long)]
        check: bool,
        /// Write the result vector here instead of into the JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct RegimeOutput {
    schema: &'static str,
    rows: Vec<RegimeReport>,
}

#[derive(Serialize)]
struct StepsOutput {
    schema: &'static str,
    #[serde(flatten)]
    steps: StepCount,
}

#[derive(Serialize)]
struct TransformOutput {
    schema: &'static str,
    dim: usize,
    nnz: usize,
    degree: usize,
    matvecs: usize,
    norm: f64,
    /// Factor H was divided by, when rescaled.
    #[serde(skip_serializing_if = "Option::is_none")]
    rescaled_by: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vector: Option<Vec<[f64; 2]>>,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn run(cmd: CostCommand) -> Status {
    match cmd {
        CostCommand::Regime { n, d, k, format } => {
            let rows = regime_table(n, d, k)?;
            match format.as_str() {
                "md" => print!("{}", regime_markdown(&rows)),
                "json" => print_json(&RegimeOutput { schema: "qramwb.regime/1", rows })?,
                other => bail!("unknown --format `{other}` (md or json)"),
            }
            Ok(true)
        }
        CostCommand::Steps { n, d, p, model } => {
            print_json(&StepsOutput { schema: "qramwb.steps/1", steps: stepcount(n, d, p, model)? })?;
            Ok(true)
        }
        CostCommand::Transform { matrix, vector, coeffs, coeffs_file, rescale, check, out } => {
            let mut h = read_matrix_market(&read(&matrix)?)?;
            h.check_hermitian()?;
            let v = read_vector(&read(&vector)?)?;
            let f = match coeffs_file {
                Some(path) => Polynomial::new(read_vector(&read(&path)?)?)?,
                None if coeffs.is_empty() => bail!("give --coeffs or --coeffs-file"),
                None => Polynomial::real(&coeffs)?,
            };
            let rescaled_by = rescale.then(|| h.rescale_to_unit_norm());
            let t = poly_eigen_transform(&h, &v, &f)?;
            let oracle_relative_error = if check {
                Some(relative_error(&t.vector, &eigen_oracle(&h.to_dense(), &v, &f)?))
            } else {
                None
            };
            let vector = match &out {
                Some(path) => {
                    std::fs::write(path, write_vector(&t.vector)).with_context(|| format!("writing {}", path.display()))?;
                    None
                }
                None => Some(t.vector.iter().map(|z: &Complex64| [z.re, z.im]).collect()),
            };
            print_json(&TransformOutput {
                schema: "qramwb.transform/1",
                dim: h.dim(),
                nnz: h.nnz(),
                degree: f.degree(),
                matvecs: t.matvecs,
                norm: t.norm,
                rescaled_by,
                oracle_relative_error,
                vector,
            })?;
            Ok(oracle_relative_error.is_none_or(|e| e < CHECK_TOLERANCE))
        }
    }
}
