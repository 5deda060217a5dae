use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightMatrix;

/// Declarative network description used in scenario files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TopologySpec {
    /// Agent 0 is the hub; edge agents put `confidence` on it.
    Star { edges: usize, confidence: f64 },
    /// `side × side` grid, 4-neighbourhood plus self, uniform weights.
    Grid { side: usize },
    /// Undirected ring; the remaining mass is split between both neighbours.
    Ring { agents: usize, self_weight: f64 },
    Explicit { rows: Vec<Vec<f64>> },
    /// Inline edge-list text (`agents N` header, then `i j w` lines).
    EdgeList { text: String },
    /// Hub plus `edges` agents of which `active` connect to the hub per round.
    TimeVaryingStar { edges: usize, active: usize, confidence: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Topology {
    Static(WeightMatrix),
    TimeVarying(TimeVaryingStarSchedule),
}

impl Topology {
    pub fn n_agents(&self) -> usize {
        match self {
            Topology::Static(w) => w.n_agents(),
            Topology::TimeVarying(s) => s.n_agents(),
        }
    }

    /// Weight matrix used in round `round` (rounds start at 1).
    pub fn weights_at(&self, round: usize) -> &WeightMatrix {
        match self {
            Topology::Static(w) => w,
            Topology::TimeVarying(s) => s.weights_at(round),
        }
    }

    pub fn is_active(&self, round: usize, agent: usize) -> bool {
        match self {
            Topology::Static(_) => true,
            Topology::TimeVarying(s) => s.is_active(round, agent),
        }
    }

    pub fn as_static(&self) -> Option<&WeightMatrix> {
        match self {
            Topology::Static(w) => Some(w),
            Topology::TimeVarying(_) => None,
        }
    }
}

pub fn build_topology(spec: &TopologySpec) -> Result<Topology> {
    Ok(match spec {
        TopologySpec::Star { edges, confidence } => Topology::Static(star(*edges, *confidence)?),
        TopologySpec::Grid { side } => Topology::Static(grid(*side)?),
        TopologySpec::Ring { agents, self_weight } => Topology::Static(ring(*agents, *self_weight)?),
        TopologySpec::Explicit { rows } => Topology::Static(WeightMatrix::from_rows(rows.clone())?),
        TopologySpec::EdgeList { text } => Topology::Static(WeightMatrix::parse_edge_list(text)?),
        TopologySpec::TimeVaryingStar {
            edges,
            active,
            confidence,
        } => Topology::TimeVarying(TimeVaryingStarSchedule::new(*edges, *active, *confidence)?),
    })
}

fn check_confidence(a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Input(format!("confidence {a} must lie in (0, 1)")));
    }
    Ok(())
}

/// Star over `edges + 1` agents. The hub weights everyone (itself included)
/// equally; edge agent `i` puts `a` on the hub and `1 − a` on itself.
pub fn star(edges: usize, a: f64) -> Result<WeightMatrix> {
    check_confidence(a)?;
    if edges == 0 {
        return Err(Error::Input("star needs at least one edge agent".into()));
    }
    let n = edges + 1;
    let mut rows = vec![vec![0.0; n]; n];
    rows[0] = vec![1.0 / n as f64; n];
    for (i, row) in rows.iter_mut().enumerate().skip(1) {
        row[0] = a;
        row[i] = 1.0 - a;
    }
    WeightMatrix::from_rows(rows)
}

/// `W_ij = 1/|N(i)|` over the closed von Neumann neighbourhood; agent
/// `r·side + c` sits at row `r`, column `c`.
pub fn grid(side: usize) -> Result<WeightMatrix> {
    if side < 2 {
        return Err(Error::Input(format!("grid side {side} must be at least 2")));
    }
    let n = side * side;
    let mut rows = vec![vec![0.0; n]; n];
    for r in 0..side {
        for c in 0..side {
            let i = r * side + c;
            let mut nbrs = vec![i];
            if r > 0 {
                nbrs.push(i - side);
            }
            if r + 1 < side {
                nbrs.push(i + side);
            }
            if c > 0 {
                nbrs.push(i - 1);
            }
            if c + 1 < side {
                nbrs.push(i + 1);
            }
            let w = 1.0 / nbrs.len() as f64;
            for j in nbrs {
                rows[i][j] = w;
            }
        }
    }
    WeightMatrix::from_rows(rows)
}

pub fn ring(agents: usize, self_weight: f64) -> Result<WeightMatrix> {
    if agents < 2 {
        return Err(Error::Input("ring needs at least two agents".into()));
    }
    check_confidence(self_weight)?;
    let mut rows = vec![vec![0.0; agents]; agents];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = self_weight;
        let share = (1.0 - self_weight) / 2.0;
        row[(i + 1) % agents] += share;
        row[(i + agents - 1) % agents] += share;
    }
    WeightMatrix::from_rows(rows)
}

/// Rotating star: agents `0..=edges`, hub 0. In round `r` only the block
/// `k = (r − 1) mod (edges / active)` of edge agents is linked to the hub;
/// everyone else keeps a self-weight of one.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeVaryingStarSchedule {
    edges: usize,
    active: usize,
    confidence: f64,
    phases: Vec<WeightMatrix>,
}

impl TimeVaryingStarSchedule {
    pub fn new(edges: usize, active: usize, confidence: f64) -> Result<Self> {
        check_confidence(confidence)?;
        if active == 0 || edges == 0 || edges % active != 0 {
            return Err(Error::Input(format!(
                "{edges} edge agents cannot be split into blocks of {active}"
            )));
        }
        let n = edges + 1;
        let phases = (0..edges / active)
            .map(|k| {
                let mut rows = vec![vec![0.0; n]; n];
                let block = k * active + 1..=(k + 1) * active;
                for (i, row) in rows.iter_mut().enumerate() {
                    if i == 0 {
                        row[0] = 1.0 / (active + 1) as f64;
                        for j in block.clone() {
                            row[j] = 1.0 / (active + 1) as f64;
                        }
                    } else if block.contains(&i) {
                        row[0] = confidence;
                        row[i] = 1.0 - confidence;
                    } else {
                        row[i] = 1.0;
                    }
                }
                WeightMatrix::from_rows(rows)
            })
            .collect::<Result<Vec<_>>>()?;
        let schedule = TimeVaryingStarSchedule {
            edges,
            active,
            confidence,
            phases,
        };
        let union = schedule.union_pattern();
        if !union.validate().strongly_connected {
            return Err(Error::Assumption("union of the schedule is not strongly connected".into()));
        }
        Ok(schedule)
    }

    pub fn n_agents(&self) -> usize {
        self.edges + 1
    }

    pub fn cycle_length(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[WeightMatrix] {
        &self.phases
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    fn phase(&self, round: usize) -> usize {
        (round.max(1) - 1) % self.phases.len()
    }

    pub fn weights_at(&self, round: usize) -> &WeightMatrix {
        &self.phases[self.phase(round)]
    }

    pub fn is_active(&self, round: usize, agent: usize) -> bool {
        if agent == 0 {
            return true;
        }
        let k = self.phase(round);
        (k * self.active + 1..=(k + 1) * self.active).contains(&agent)
    }

    /// Row-normalized union of all phase patterns.
    pub fn union_pattern(&self) -> WeightMatrix {
        let n = self.n_agents();
        let mut rows = vec![vec![0.0; n]; n];
        for w in &self.phases {
            for (i, row) in rows.iter_mut().enumerate() {
                for (j, _) in w.neighbors(i) {
                    row[j] = 1.0;
                }
            }
        }
        for row in rows.iter_mut() {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        WeightMatrix::from_rows(rows).expect("normalized pattern")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_agent_star_rows() {
        let w = star(8, 0.5).unwrap();
        assert_eq!(w.row(0), &[1.0 / 9.0; 9]);
        assert_eq!(w.get(3, 0), 0.5);
        assert_eq!(w.get(3, 3), 0.5);
        assert!(w.validate().is_valid());
        assert!(star(8, 1.0).is_err());
        assert!(star(8, 0.0).is_err());
    }

    #[test]
    fn three_by_three_grid_degrees() {
        let w = grid(3).unwrap();
        assert!(w.validate().is_valid());
        let degree = |i: usize| w.neighbors(i).count();
        assert_eq!(degree(4), 5);
        assert_eq!(degree(0), 3);
        assert_eq!(degree(1), 4);
        assert!(w.neighbors(4).all(|(_, x)| x == 0.2));
        assert!(grid(1).is_err());
    }

    #[test]
    fn ring_weights() {
        let w = ring(3, 0.5).unwrap();
        assert_eq!(w.row(0), &[0.5, 0.25, 0.25]);
        let two = ring(2, 0.6).unwrap();
        assert!((two.get(0, 1) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rotating_star_phases() {
        let s = TimeVaryingStarSchedule::new(25, 5, 0.5).unwrap();
        assert_eq!(s.cycle_length(), 5);
        assert_eq!(s.n_agents(), 26);
        let distinct: std::collections::HashSet<String> =
            s.phases().iter().map(|w| w.to_edge_list()).collect();
        assert_eq!(distinct.len(), 5);
        assert!(s.union_pattern().validate().strongly_connected);

        // round 1 uses block {1..5}, round 6 wraps back to it
        assert!(s.is_active(1, 3) && !s.is_active(1, 6));
        assert!(s.is_active(2, 6) && s.is_active(6, 5));
        assert!(s.is_active(17, 0));
        let w = s.weights_at(1);
        assert_eq!(w.get(0, 5), 1.0 / 6.0);
        assert_eq!(w.get(0, 6), 0.0);
        assert_eq!(w.get(7, 7), 1.0);
        assert_eq!(w.get(2, 0), 0.5);
        for w in s.phases() {
            assert!(w.rows().all(|r| (r.iter().sum::<f64>() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn rotating_star_needs_divisible_blocks() {
        assert!(TimeVaryingStarSchedule::new(25, 4, 0.5).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let spec = TopologySpec::TimeVaryingStar {
            edges: 10,
            active: 5,
            confidence: 0.5,
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"time-varying-star\""));
        assert_eq!(serde_json::from_str::<TopologySpec>(&json).unwrap(), spec);
    }
}
