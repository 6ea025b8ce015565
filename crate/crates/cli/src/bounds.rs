use clap::Subcommand;
use qram_core::bounds::{
    ballistic_constraint, diagonal_pair, distillation_fidelity_cap, hamiltonian_distance_floor, log2_circuit_count,
    min_gates_for_table, verify_hamiltonian_lemma, verify_indistinguishable_tables, BallisticMode, BallisticParams,
    CircuitCountParams, DistillationParams,
};
use serde::Serialize;

use crate::{parse_enum, print_json, Status};

#[derive(Subcommand)]
pub enum BoundsCommand {
    /// log2 of the number of distinct circuits of a given shape.
    CircuitCount {
        #[arg(long)]
        w: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        gates: u64,
        #[arg(long)]
        g: u64,
        #[arg(long)]
        k: u64,
    },
    /// Fewest gates that can realise every table of size N.
    MinGates {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        w: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        g: u64,
        #[arg(long)]
        k: u64,
    },
    /// Whether n Hamiltonian evolutions of time t and energy E can encode N bits.
    Ballistic {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        e: f64,
        #[arg(long)]
        w: f64,
        #[arg(long)]
        table_size: f64,
        #[arg(long, default_value_t = 2)]
        locality: u32,
        /// `summary` or `stirling`.
        #[arg(long, value_parser = parse_enum::<BallisticMode>, default_value = "summary")]
        mode: BallisticMode,
    },
    /// Fidelity ceiling for distilling a table access from d noisy calls.
    DistillCap {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        ell: u64,
    },
    /// Smallest Hamiltonian distance for unitaries at distance delta.
    HamFloor {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        t: f64,
    },
    /// The commuting diagonal pair and how close it gets to the floor.
    Diagonal {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        t: f64,
    },
    /// Random-instance check of the Hamiltonian distance floor.
    HamLemma {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Random-instance check of the indistinguishable-tables bound.
    TablesLemma {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct Output<P: Serialize, D: Serialize> {
    value: f64,
    calc: &'static str,
    schema: &'static str,
    params: P,
    detail: D,
}

fn emit<P: Serialize, D: Serialize>(calc: &'static str, value: f64, params: P, detail: D) -> anyhow::Result<()> {
    print_json(&Output { value, calc, schema: "qramwb.bounds/1", params, detail })
}

#[derive(Serialize)]
struct Empty {}

#[derive(Serialize)]
struct FloorParams {
    delta: f64,
    t: f64,
}

#[derive(Serialize)]
struct DiagonalParams {
    eps: f64,
    t: f64,
}

#[derive(Serialize)]
struct LemmaParams {
    dim: usize,
    t: f64,
    trials: u64,
    seed: u64,
}

#[derive(Serialize)]
struct TablesParams {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    ell: usize,
    trials: u64,
    seed: u64,
}

pub fn run(cmd: BoundsCommand) -> Status {
    match cmd {
        BoundsCommand::CircuitCount { w, d, gates, g, k } => {
            let p = CircuitCountParams { w, d, gates, g, k };
            emit("circuit-count", log2_circuit_count(&p)?, p, Empty {})?;
        }
        BoundsCommand::MinGates { n, w, d, g, k } => {
            let m = min_gates_for_table(n, w, d, g, k)?;
            let p = CircuitCountParams { w, d, gates: m.gates, g, k };
            emit("min-gates", m.gates as f64, p, m)?;
        }
        BoundsCommand::Ballistic { n, t, e, w, table_size, locality, mode } => {
            let p = BallisticParams { n, t, e, w, table_size, locality };
            let r = ballistic_constraint(&p, mode)?;
            emit("ballistic", r.lhs, p, r)?;
        }
        BoundsCommand::DistillCap { d, n, ell } => {
            let p = DistillationParams { d, n, ell };
            let c = distillation_fidelity_cap(&p)?;
            emit("distill-cap", c.cap, p, c)?;
        }
        BoundsCommand::HamFloor { delta, t } => {
            let f = hamiltonian_distance_floor(delta, t)?;
            emit("ham-floor", f.floor, FloorParams { delta, t }, f)?;
        }
        BoundsCommand::Diagonal { eps, t } => {
            let c = diagonal_pair(eps, t)?;
            emit("diagonal", c.tightness, DiagonalParams { eps, t }, c)?;
        }
        BoundsCommand::HamLemma { dim, t, trials, seed } => {
            let r = verify_hamiltonian_lemma(dim, t, trials, seed)?;
            emit("ham-lemma", r.violations as f64, LemmaParams { dim, t, trials, seed }, r)?;
            return Ok(r.violations == 0);
        }
        BoundsCommand::TablesLemma { d, n, ell, trials, seed } => {
            let r = verify_indistinguishable_tables(d, n, ell, trials, seed)?;
            let violations = r.violations;
            emit("tables-lemma", violations as f64, TablesParams { d, n, ell, trials, seed }, r)?;
            return Ok(violations == 0);
        }
    }
    Ok(true)
}
