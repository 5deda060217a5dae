//! Social interaction matrices and their spectral quantities.
//!
//! A [`WeightMatrix`] is a row-stochastic matrix `W` where `W[i][j] > 0`
//! means agent `i` listens to agent `j`. Adjacency is never stored
//! separately; it is always read off the positive entries.

use std::fmt;

use nalgebra::{DMatrix, Schur};
use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row sums must equal one within this tolerance.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;
/// Power iteration stops once `‖vW − v‖∞` drops below this.
pub const STATIONARY_TOLERANCE: f64 = 1e-12;
pub const STATIONARY_MAX_ITERATIONS: usize = 1_000_000;
/// Largest graph handed to the dense eigensolver.
pub const MAX_DENSE_AGENTS: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct WeightMatrix {
    n: usize,
    // row-major
    weights: Vec<f64>,
}

impl WeightMatrix {
    /// Builds a matrix from rows. Only shape and entry range are checked here;
    /// the stochastic-matrix assumptions are reported by [`WeightMatrix::validate`].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Input("weight matrix has no agents".into()));
        }
        let mut weights = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &w) in row.iter().enumerate() {
                if !w.is_finite() || !(0.0..=1.0).contains(&w) {
                    return Err(Error::Input(format!("entry ({i}, {j}) = {w} is outside [0, 1]")));
                }
            }
            weights.extend(row);
        }
        Ok(WeightMatrix { n, weights })
    }

    pub fn identity(n: usize) -> Self {
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            weights[i * n + i] = 1.0;
        }
        WeightMatrix { n, weights }
    }

    pub fn n_agents(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.weights.chunks(self.n)
    }

    /// Closed neighbourhood `N(i)`: every `j` with `W[i][j] > 0`, with its weight.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(j, &w)| (j, w))
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.weights)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Reads the edge-list text format: a header `agents N` followed by one
    /// `i j w` line per directed edge. Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Input("edge list is empty".into()))?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["agents", count] => count
                .parse::<usize>()
                .map_err(|e| Error::Input(format!("bad agent count {count:?}: {e}")))?,
            _ => return Err(Error::Input(format!("expected `agents N` header, got {header:?}"))),
        };
        if n == 0 {
            return Err(Error::Input("edge list declares zero agents".into()));
        }

        let mut rows = vec![vec![0.0; n]; n];
        let mut seen = vec![false; n * n];
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Input(format!("line {line_no}: expected `i j w`, got {line:?}")));
            }
            let parse_index = |s: &str| -> Result<usize> {
                let idx = s
                    .parse::<usize>()
                    .map_err(|e| Error::Input(format!("line {line_no}: bad index {s:?}: {e}")))?;
                if idx >= n {
                    return Err(Error::Input(format!("line {line_no}: index {idx} >= {n}")));
                }
                Ok(idx)
            };
            let i = parse_index(fields[0])?;
            let j = parse_index(fields[1])?;
            let w = fields[2]
                .parse::<f64>()
                .map_err(|e| Error::Input(format!("line {line_no}: bad weight {:?}: {e}", fields[2])))?;
            if std::mem::replace(&mut seen[i * n + j], true) {
                return Err(Error::Input(format!("line {line_no}: duplicate edge {i} {j}")));
            }
            rows[i][j] = w;
        }
        WeightMatrix::from_rows(rows)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("agents {}\n", self.n);
        for i in 0..self.n {
            for (j, w) in self.neighbors(i) {
                out.push_str(&format!("{i} {j} {w:?}\n"));
            }
        }
        out
    }

    /// Checks stochasticity, self-loops, irreducibility and aperiodicity.
    pub fn validate(&self) -> ValidationReport {
        let n = self.n;
        let mut violations = Vec::new();
        for (i, row) in self.rows().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                violations.push(Violation::RowSum { row: i, sum });
            }
            if row[i] <= 0.0 {
                violations.push(Violation::MissingSelfLoop { row: i });
            }
        }

        let components = strongly_connected_components(self);
        let strongly_connected = components == 1;
        if !strongly_connected {
            violations.push(Violation::Reducible { components });
        }
        let period = if strongly_connected { period(self) } else { 0 };
        if strongly_connected && period != 1 {
            violations.push(Violation::Periodic { period });
        }

        ValidationReport {
            n_agents: n,
            strongly_connected,
            period,
            violations,
        }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report))
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for WeightMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        WeightMatrix::from_rows(rows)
    }
}

impl From<WeightMatrix> for Vec<Vec<f64>> {
    fn from(w: WeightMatrix) -> Self {
        w.rows().map(<[f64]>::to_vec).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    RowSum { row: usize, sum: f64 },
    MissingSelfLoop { row: usize },
    Reducible { components: usize },
    Periodic { period: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSum { row, sum } => write!(f, "row {row} sums to {sum:.17} instead of 1"),
            Violation::MissingSelfLoop { row } => write!(f, "row {row} has no self-loop"),
            Violation::Reducible { components } => {
                write!(f, "not irreducible: {components} strongly connected components")
            }
            Violation::Periodic { period } => write!(f, "periodic with period {period}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_agents: usize,
    pub strongly_connected: bool,
    /// gcd of cycle lengths; 0 when the graph is not strongly connected.
    pub period: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn digraph(w: &WeightMatrix) -> DiGraph<(), ()> {
    let mut edges = Vec::new();
    for i in 0..w.n_agents() {
        for (j, _) in w.neighbors(i) {
            edges.push((i as u32, j as u32));
        }
    }
    let mut g = DiGraph::from_edges(edges);
    while g.node_count() < w.n_agents() {
        g.add_node(());
    }
    g
}

fn strongly_connected_components(w: &WeightMatrix) -> usize {
    kosaraju_scc(&digraph(w)).len()
}

/// Period of a strongly connected pattern: gcd over edges `u → v` of
/// `level(u) + 1 − level(v)` for BFS levels from node 0.
fn period(w: &WeightMatrix) -> usize {
    let n = w.n_agents();
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for (v, _) in w.neighbors(u) {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0usize;
    for u in 0..n {
        for (v, _) in w.neighbors(u) {
            let diff = (level[u] + 1).abs_diff(level[v]);
            g = gcd(g, diff);
        }
    }
    g
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Left Perron vector of `W` (eigenvector centrality), by power iteration on `Wᵀ`.
pub fn stationary_distribution(w: &WeightMatrix) -> Result<Vec<f64>> {
    w.ensure_valid()?;
    let n = w.n_agents();
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..STATIONARY_MAX_ITERATIONS {
        left_multiply(&v, w, &mut next);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        residual = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        if residual <= STATIONARY_TOLERANCE {
            return Ok(v);
        }
    }
    Err(Error::NoConvergence {
        what: "stationary distribution",
        residual,
        iterations: STATIONARY_MAX_ITERATIONS,
    })
}

/// `out = vᵀ W`
fn left_multiply(v: &[f64], w: &WeightMatrix, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (i, row) in w.rows().enumerate() {
        let vi = v[i];
        if vi == 0.0 {
            continue;
        }
        for (o, &wij) in out.iter_mut().zip(row) {
            *o += vi * wij;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    /// Largest modulus among the eigenvalues other than the Perron root.
    pub lambda_max: f64,
    /// Largest real part among the same eigenvalues; equals `lambda_max`
    /// for symmetric matrices with nonnegative spectrum.
    pub lambda_max_real: f64,
    pub gap: f64,
}

/// Second-largest eigenvalue modulus of `W` via a dense Schur decomposition.
pub fn spectral_gap(w: &WeightMatrix) -> Result<SpectralGap> {
    w.ensure_valid()?;
    let n = w.n_agents();
    if n > MAX_DENSE_AGENTS {
        return Err(Error::Capability(format!(
            "{n} agents exceeds the dense eigensolver limit of {MAX_DENSE_AGENTS}"
        )));
    }
    if n == 1 {
        return Ok(SpectralGap {
            lambda_max: 0.0,
            lambda_max_real: 0.0,
            gap: 1.0,
        });
    }
    let schur = Schur::try_new(w.to_matrix(), 1e-14, 100_000)
        .ok_or_else(|| Error::Numeric("Schur decomposition did not converge".into()))?;
    let mut eigenvalues: Vec<_> = schur.complex_eigenvalues().iter().copied().collect();
    let perron = eigenvalues
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            let da = (*a - 1.0).norm();
            let db = (*b - 1.0).norm();
            da.total_cmp(&db)
        })
        .map(|(k, _)| k)
        .expect("n >= 2");
    eigenvalues.swap_remove(perron);
    let lambda_max = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max).min(1.0);
    let lambda_max_real = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectralGap {
        lambda_max,
        lambda_max_real,
        gap: 1.0 - lambda_max,
    })
}

/// Upper bound `4 log N / (1 − λ_max)` on `∑_k ∑_j |W^k_ij − v_j|`.
pub fn mixing_bound(w: &WeightMatrix) -> Result<f64> {
    let gap = spectral_gap(w)?;
    mixing_bound_from(w.n_agents(), gap.lambda_max)
}

pub(crate) fn mixing_bound_from(n_agents: usize, lambda_max: f64) -> Result<f64> {
    let gap = 1.0 - lambda_max;
    if gap <= 1e-12 {
        return Err(Error::DegenerateGraph { gap });
    }
    Ok(4.0 * (n_agents as f64).ln() / gap)
}

/// Per-agent `∑_{k=1}^{horizon} ∑_j |W^k_ij − v_j|`, computed by propagating
/// each unit row vector through `W`.
pub fn powers_deviation(w: &WeightMatrix, horizon: usize) -> Result<Vec<f64>> {
    if horizon == 0 || horizon > 100_000 {
        return Err(Error::Input(format!("horizon {horizon} must be in 1..=100000")));
    }
    let v = stationary_distribution(w)?;
    let n = w.n_agents();
    let mut out = Vec::with_capacity(n);
    let mut row = vec![0.0; n];
    let mut next = vec![0.0; n];
    for i in 0..n {
        row.iter_mut().for_each(|x| *x = 0.0);
        row[i] = 1.0;
        let mut total = 0.0;
        for _ in 0..horizon {
            left_multiply(&row, w, &mut next);
            std::mem::swap(&mut row, &mut next);
            total += row.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum::<f64>();
        }
        out.push(total);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub centrality: Vec<f64>,
    pub lambda_max: f64,
    pub lambda_max_real: f64,
    pub spectral_gap: f64,
    pub mixing_bound: f64,
}

impl SpectralSummary {
    pub fn compute(w: &WeightMatrix) -> Result<Self> {
        let centrality = stationary_distribution(w)?;
        let gap = spectral_gap(w)?;
        let mixing_bound = mixing_bound_from(w.n_agents(), gap.lambda_max)?;
        Ok(SpectralSummary {
            centrality,
            lambda_max: gap.lambda_max,
            lambda_max_real: gap.lambda_max_real,
            spectral_gap: gap.gap,
            mixing_bound,
        })
    }
}
