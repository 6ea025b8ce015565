use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::QlaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepModel {
    SharedMemory,
    HypercubeSort,
    Mesh2dSort,
    DenseGrid,
}

impl StepModel {
    pub const ALL: [StepModel; 4] = [Self::SharedMemory, Self::HypercubeSort, Self::Mesh2dSort, Self::DenseGrid];

    pub fn name(self) -> &'static str {
        match self {
            Self::SharedMemory => "shared_memory",
            Self::HypercubeSort => "hypercube_sort",
            Self::Mesh2dSort => "mesh2d_sort",
            Self::DenseGrid => "dense_grid",
        }
    }
}

impl std::str::FromStr for StepModel {
    type Err = QlaError;

    fn from_str(s: &str) -> Result<Self, QlaError> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| QlaError::Invalid(format!("unknown step model {s:?}")))
    }
}

/// One additive term of a step count, with unit constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub value: f64,
    /// Polynomial order of the term in the machine size (`Nd`, or `N²` for
    /// dense), logarithmic factors ignored.
    pub order: f64,
}

fn term(name: &str, value: f64, order: f64) -> Term {
    Term { name: name.to_string(), value, order }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCount {
    pub model: StepModel,
    #[serde(rename = "N")]
    pub n: f64,
    pub d: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub terms: Vec<Term>,
    pub total: f64,
}

impl StepCount {
    /// Leading polynomial order among the terms.
    pub fn order(&self) -> f64 {
        self.terms.iter().map(|t| t.order).fold(0.0, f64::max)
    }
}

/// Abstract time steps for one sparse matrix-vector product on `p`
/// processors.
pub fn stepcount(n: f64, d: f64, p: f64, model: StepModel) -> Result<StepCount, QlaError> {
    if !(n >= 1.0 && d >= 1.0 && p >= 1.0) || ![n, d, p].iter().all(|x| x.is_finite()) {
        return Err(QlaError::Invalid("need N, d, P ≥ 1".into()));
    }
    let nd = n * d;
    // order of Nd/P relative to the machine size; P is usually Θ(Nd)
    let work_order = (nd / p).log2().max(0.0) / nd.log2().max(1.0);
    let terms = match model {
        StepModel::SharedMemory => vec![
            term("Nd/P", nd / p, work_order),
            term("lg(P/N) reduction", (p / n).log2().max(0.0), 0.0),
        ],
        StepModel::HypercubeSort => vec![
            term("sort lg²(Nd)", nd.log2().powi(2), 0.0),
            term("Nd/P", nd / p, work_order),
            term("lg d", d.log2(), 0.0),
        ],
        StepModel::Mesh2dSort => vec![
            term("sort (Nd)^(1/2)", nd.sqrt(), 0.5),
            term("Nd/P", nd / p, work_order),
            term("lg d", d.log2(), 0.0),
        ],
        StepModel::DenseGrid => vec![term("lg N", n.log2(), 0.0)],
    };
    let total = terms.iter().map(|t| t.value).sum();
    Ok(StepCount { model, n, d, p, terms, total })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Small,
    Medium,
    Large,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Small, Regime::Medium, Regime::Large];

    pub fn label(self) -> &'static str {
        match self {
            Regime::Small => "Small",
            Regime::Medium => "Medium",
            Regime::Large => "Large",
        }
    }

    pub fn free_wires(self) -> bool {
        self == Regime::Small
    }

    pub fn instant_communication(self) -> bool {
        self != Regime::Large
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advantage {
    /// `None`, or the advantage as a soft-O expression.
    pub verdict: String,
    /// Value of the soft-O expression (no logarithmic factors).
    pub value: Option<f64>,
    /// Classical matvec steps over QRAM access steps, all terms included.
    pub step_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub free_wires: bool,
    pub instant_communication: bool,
    #[serde(rename = "N")]
    pub n: f64,
    pub d: f64,
    pub k: f64,
    pub sparse_classical: StepCount,
    pub dense_classical: StepCount,
    /// QRAM access time for an `Nd`-register memory (sparse) and an
    /// `N²`-register memory (dense).
    pub sparse_access: Term,
    pub dense_access: Term,
    pub sparse_advantage: Advantage,
    pub dense_advantage: Advantage,
    pub assumptions: Vec<String>,
}

fn access_time(regime: Regime, size: f64) -> Term {
    if regime.instant_communication() {
        term("lg(size) circuit depth", size.log2().max(1.0), 0.0)
    } else {
        term("(size)^(1/2) signal latency", size.sqrt(), 0.5)
    }
}

fn advantage(classical: &StepCount, access: &Term, size: f64) -> Advantage {
    let gap = classical.order() - access.order;
    let step_ratio = classical.total / access.value;
    if gap > 0.0 {
        let expr = if size == classical.n * classical.d { "Nd" } else { "N^2" };
        let power = if gap == 0.5 { "1/2".to_string() } else { gap.to_string() };
        Advantage { verdict: format!("Õ(({expr})^{{{power}}})"), value: Some(size.powf(gap)), step_ratio }
    } else {
        Advantage { verdict: "None".into(), value: None, step_ratio }
    }
}

/// One row per regime for a `k`-degree transform of an `N×N` matrix with
/// `d` nonzeros per row. The machine has one processor per QRAM register.
pub fn regime_table(n: f64, d: f64, k: f64) -> Result<Vec<RegimeReport>, QlaError> {
    if d > n {
        return Err(QlaError::Invalid(format!("sparsity d={d} exceeds N={n}")));
    }
    if k.is_nan() || k < 1.0 {
        return Err(QlaError::Invalid("degree k must be ≥ 1".into()));
    }
    let (sparse_size, dense_size) = (n * d, n * n);
    Regime::ALL
        .into_iter()
        .map(|regime| {
            let (sparse_classical, dense_classical) = match regime {
                Regime::Small => (
                    stepcount(n, d, sparse_size, StepModel::SharedMemory)?,
                    stepcount(n, n, dense_size, StepModel::SharedMemory)?,
                ),
                Regime::Medium => (
                    stepcount(n, d, sparse_size, StepModel::Mesh2dSort)?,
                    stepcount(n, n, dense_size, StepModel::DenseGrid)?,
                ),
                Regime::Large => (
                    stepcount(n, d, sparse_size, StepModel::Mesh2dSort)?,
                    stepcount(n, n, dense_size, StepModel::Mesh2dSort)?,
                ),
            };
            let sparse_access = access_time(regime, sparse_size);
            let dense_access = access_time(regime, dense_size);
            let mut assumptions = vec![
                format!("free wires: {}", if regime.free_wires() { "yes" } else { "no" }),
                format!("instant communication: {}", if regime.instant_communication() { "yes" } else { "no" }),
                "classical processors = QRAM registers; both sides repeat k times".to_string(),
            ];
            if regime == Regime::Medium {
                assumptions.push("hypercube sort would need Ω̃((Nd)^(3/2)) wire length; 2-D mesh used".to_string());
            }
            Ok(RegimeReport {
                regime,
                free_wires: regime.free_wires(),
                instant_communication: regime.instant_communication(),
                n,
                d,
                k,
                sparse_advantage: advantage(&sparse_classical, &sparse_access, sparse_size),
                dense_advantage: advantage(&dense_classical, &dense_access, dense_size),
                sparse_classical,
                dense_classical,
                sparse_access,
                dense_access,
                assumptions,
            })
        })
        .collect()
}

fn cell(a: &Advantage) -> String {
    match a.value {
        Some(v) => format!("{} ≈ {v:.4e}", a.verdict),
        None => a.verdict.clone(),
    }
}

pub fn regime_markdown(rows: &[RegimeReport]) -> String {
    let yes = |b: bool| if b { "Yes" } else { "No" };
    let mut s = String::new();
    if let Some(r) = rows.first() {
        let _ = writeln!(s, "N = {}, d = {}, k = {}\n", r.n, r.d, r.k);
    }
    s.push_str("| Scale | Free wires | Instant communication | Sparse Matrices | Dense Matrices |\n");
    s.push_str("|---|---|---|---|---|\n");
    for r in rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            r.regime.label(),
            yes(r.free_wires),
            yes(r.instant_communication),
            cell(&r.sparse_advantage),
            cell(&r.dense_advantage)
        );
    }
    s
}
