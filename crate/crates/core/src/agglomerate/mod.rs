//! Mesh agglomeration by alpha-beta swap minimization of a quality-based
//! labeling energy.
//!
//! Labels are cell indices of the input mesh. A cell carrying the label of a
//! neighbor is merged with that neighbor's label class at the end. Costs:
//!
//! * data `dc(P, l)`: 0 for `l == P`, `1 - rho(P ∪ cell_l)` when `cell_l` is a
//!   neighbor of `P`, 1 otherwise;
//! * smoothness `sc(l1, l2)` on every adjacent cell pair, weighted by lambda.
//!
//! Both are scaled by `cost_scale` (default: the cell count) and rounded to
//! integers before the graph cuts.

pub mod maxflow;

use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::merge::{is_edge_connected, merge_groups};
use crate::mesh::polygon::{is_straight_turn, COLLINEAR_TOL};
use crate::mesh::{merge_cells, simplify_aligned_edges, PolygonalMesh};
use crate::quality;

/// Smoothness-cost variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScMode {
    /// `sc(l1, l2) = 1` iff the cells indexed by `l1` and `l2` are adjacent and distinct.
    Literal,
    /// `sc(l1, l2) = 1` iff `l1 != l2`.
    #[default]
    Potts,
}

impl FromStr for ScMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ScMode::Literal),
            "potts" => Ok(ScMode::Potts),
            _ => Err(Error::Config(format!("unknown sc mode '{s}' (expected literal|potts)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgglomerationConfig {
    pub lambda: f64,
    pub sc_mode: ScMode,
    pub max_cycles: usize,
    /// Integerization factor; `None` uses the number of cells.
    pub cost_scale: Option<i64>,
}

impl Default for AgglomerationConfig {
    fn default() -> Self {
        AgglomerationConfig { lambda: 0.25, sc_mode: ScMode::default(), max_cycles: 50, cost_scale: None }
    }
}

impl AgglomerationConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        AgglomerationConfig { lambda, ..Default::default() }
    }

    pub fn validate(&self, num_cells: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!("lambda {} outside [0, 1]", self.lambda)));
        }
        if self.max_cycles == 0 {
            return Err(Error::Config("max_cycles must be positive".into()));
        }
        if let Some(s) = self.cost_scale {
            if s < num_cells as i64 {
                return Err(Error::Config(format!("cost_scale {s} below the cell count {num_cells}")));
            }
        }
        Ok(())
    }
}

pub type Labeling = Vec<usize>;

pub fn trivial_labeling(n: usize) -> Labeling {
    (0..n).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnergyBreakdown {
    pub data_term: i64,
    /// Number of adjacent pairs charged by the smoothness cost.
    pub smooth_term: i64,
    /// `data_term + weight * smooth_term`.
    pub total: i64,
    pub iterations: usize,
}

/// Union polygon of two adjacent cells with straight vertices that belong to
/// no other cell removed, or `None` when the union is not a simple polygon.
pub fn pair_union_points(mesh: &PolygonalMesh, p: usize, q: usize) -> Option<Vec<crate::mesh::Point>> {
    let loop_ = merge_cells(mesh, &[p, q]).ok()?;
    let n = loop_.len();
    let keep: Vec<bool> = (0..n)
        .map(|i| {
            let v = loop_[i];
            let private = mesh.vertex_cells(v).iter().all(|&c| c == p || c == q);
            let straight = is_straight_turn(
                &mesh.position(loop_[(i + n - 1) % n]),
                &mesh.position(v),
                &mesh.position(loop_[(i + 1) % n]),
                COLLINEAR_TOL,
            );
            mesh.vertices[v].constrained || !private || !straight
        })
        .collect();
    Some((0..n).filter(|&i| keep[i]).map(|i| mesh.position(loop_[i])).collect())
}

/// Real-valued data cost `dc(P, cell_l)`.
pub fn data_cost(mesh: &PolygonalMesh, p: usize, l: usize) -> f64 {
    if p == l {
        0.0
    } else if mesh.are_adjacent(p, l) {
        pair_union_points(mesh, p, l).map_or(1.0, |pts| 1.0 - quality::scores(&pts).rho)
    } else {
        1.0
    }
}

/// Literal smoothness cost between two labels.
pub fn smoothness_cost(mesh: &PolygonalMesh, l1: usize, l2: usize) -> i64 {
    i64::from(l1 != l2 && mesh.are_adjacent(l1, l2))
}

/// Integerized cost tables for one mesh and configuration.
pub struct CostModel<'m> {
    mesh: &'m PolygonalMesh,
    pub scale: i64,
    /// Integer weight of one unit of smoothness cost.
    pub weight: i64,
    pub sc_mode: ScMode,
    pair_cost: HashMap<(usize, usize), i64>,
}

fn round_half_away(x: f64) -> i64 {
    x.round() as i64
}

impl<'m> CostModel<'m> {
    pub fn new(mesh: &'m PolygonalMesh, config: &AgglomerationConfig) -> Self {
        let scale = config.cost_scale.unwrap_or(mesh.num_cells() as i64).max(1);
        let pairs = mesh.adjacent_pairs();
        let costs: Vec<i64> = pairs
            .par_iter()
            .map(|&(p, q)| round_half_away(data_cost(mesh, p, q) * scale as f64))
            .collect();
        CostModel {
            mesh,
            scale,
            weight: round_half_away(config.lambda * scale as f64),
            sc_mode: config.sc_mode,
            pair_cost: pairs.into_iter().zip(costs).collect(),
        }
    }

    pub fn mesh(&self) -> &PolygonalMesh {
        self.mesh
    }

    pub fn data(&self, p: usize, l: usize) -> i64 {
        if p == l {
            return 0;
        }
        let key = if p < l { (p, l) } else { (l, p) };
        self.pair_cost.get(&key).copied().unwrap_or(self.scale)
    }

    pub fn smooth(&self, l1: usize, l2: usize) -> i64 {
        match self.sc_mode {
            ScMode::Potts => i64::from(l1 != l2),
            ScMode::Literal => smoothness_cost(self.mesh, l1, l2),
        }
    }

    pub fn energy(&self, labeling: &[usize]) -> EnergyBreakdown {
        let data_term: i64 = labeling.iter().enumerate().map(|(p, &l)| self.data(p, l)).sum();
        let smooth_term: i64 = self
            .mesh
            .adjacent_pairs()
            .iter()
            .map(|&(p, q)| self.smooth(labeling[p], labeling[q]))
            .sum();
        EnergyBreakdown { data_term, smooth_term, total: data_term + self.weight * smooth_term, iterations: 0 }
    }

    /// Energy terms touching the cells in `nodes` (data terms plus every
    /// adjacent pair with at least one endpoint in the set).
    fn local_energy(&self, labeling: &[usize], nodes: &[usize], in_set: &HashSet<usize>) -> i64 {
        let mut e = 0;
        for &p in nodes {
            e += self.data(p, labeling[p]);
            for &q in &self.mesh.adjacency[p] {
                if in_set.contains(&q) && q < p {
                    continue;
                }
                e += self.weight * self.smooth(labeling[p], labeling[q]);
            }
        }
        e
    }

    /// One alpha-beta swap move. Cells labeled `alpha` or `beta` are
    /// relabeled optimally between the two; the labeling changes only if the
    /// energy strictly decreases. Returns the energy change (≤ 0).
    pub fn swap_move(&self, labeling: &mut [usize], alpha: usize, beta: usize) -> i64 {
        assert_ne!(alpha, beta, "swap needs two distinct labels");
        let nodes: Vec<usize> = (0..labeling.len()).filter(|&p| labeling[p] == alpha || labeling[p] == beta).collect();
        if nodes.is_empty() {
            return 0;
        }
        let in_set: HashSet<usize> = nodes.iter().copied().collect();
        let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let v_ab = self.weight * self.smooth(alpha, beta);
        let mut terminal = Vec::with_capacity(nodes.len());
        let mut pairs = Vec::new();
        for (i, &p) in nodes.iter().enumerate() {
            let mut cost_a = self.data(p, alpha);
            let mut cost_b = self.data(p, beta);
            for &q in &self.mesh.adjacency[p] {
                match local.get(&q) {
                    Some(&j) => {
                        if j > i && v_ab > 0 {
                            pairs.push((i, j, v_ab, v_ab));
                        }
                    }
                    None => {
                        cost_a += self.weight * self.smooth(alpha, labeling[q]);
                        cost_b += self.weight * self.smooth(beta, labeling[q]);
                    }
                }
            }
            // source side takes alpha: pays cost_b when cut from the source
            terminal.push((cost_b, cost_a));
        }
        let before = self.local_energy(labeling, &nodes, &in_set);
        let (cut, side) = maxflow::min_cut(&terminal, &pairs);
        let delta = cut - before;
        if delta < 0 {
            for (i, &p) in nodes.iter().enumerate() {
                labeling[p] = if side[i] { alpha } else { beta };
            }
            delta
        } else {
            0
        }
    }

    /// Label pairs worth trying: labels meeting across an adjacency, plus
    /// each cell's current label against the index of itself and its neighbors.
    pub fn candidate_pairs(&self, labeling: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut push = |a: usize, b: usize| {
            if a != b {
                out.push((a.min(b), a.max(b)));
            }
        };
        for (p, nb) in self.mesh.adjacency.iter().enumerate() {
            push(labeling[p], p);
            for &q in nb {
                push(labeling[p], labeling[q]);
                push(labeling[p], q);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeResult {
    pub labeling: Labeling,
    /// Energy of the starting labeling followed by the energy after each cycle.
    pub history: Vec<EnergyBreakdown>,
    /// Energy change of every accepted or rejected swap, in visit order.
    pub deltas: Vec<i64>,
    pub cycles: usize,
}

/// Alpha-beta swap cycles from the trivial labeling until a cycle brings no
/// decrease or `max_cycles` is reached.
pub fn minimize(mesh: &PolygonalMesh, config: &AgglomerationConfig) -> Result<MinimizeResult> {
    config.validate(mesh.num_cells())?;
    let costs = CostModel::new(mesh, config);
    Ok(minimize_with(&costs, trivial_labeling(mesh.num_cells()), config.max_cycles))
}

pub fn minimize_with(costs: &CostModel<'_>, mut labeling: Labeling, max_cycles: usize) -> MinimizeResult {
    let mut history = vec![costs.energy(&labeling)];
    let mut deltas = Vec::new();
    let mut cycles = 0;
    while cycles < max_cycles {
        cycles += 1;
        let mut decrease = 0;
        for (a, b) in costs.candidate_pairs(&labeling) {
            let d = costs.swap_move(&mut labeling, a, b);
            deltas.push(d);
            decrease -= d;
        }
        let mut e = costs.energy(&labeling);
        e.iterations = cycles;
        history.push(e);
        log::debug!("cycle {cycles}: energy {} (decrease {decrease})", e.total);
        if decrease == 0 {
            break;
        }
    }
    MinimizeResult { labeling, history, deltas, cycles }
}

/// Edge-connected components of every label class, each sorted, ordered by
/// their smallest cell.
pub fn label_components(mesh: &PolygonalMesh, labeling: &[usize]) -> Vec<Vec<usize>> {
    let n = mesh.num_cells();
    let mut comp = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = groups.len();
        comp[start] = id;
        let mut group = vec![start];
        let mut stack = vec![start];
        while let Some(c) = stack.pop() {
            for &q in &mesh.adjacency[c] {
                if comp[q] == usize::MAX && labeling[q] == labeling[start] {
                    comp[q] = id;
                    group.push(q);
                    stack.push(q);
                }
            }
        }
        group.sort_unstable();
        debug_assert!(is_edge_connected(mesh, &group));
        groups.push(group);
    }
    groups
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ApplyReport {
    /// Components left unmerged because their union was not a simple polygon.
    pub failed_components: usize,
}

/// Merges every label component and then removes aligned hanging nodes.
pub fn apply_labeling(mesh: &PolygonalMesh, labeling: &[usize]) -> Result<(PolygonalMesh, ApplyReport)> {
    if labeling.len() != mesh.num_cells() {
        return Err(Error::Config(format!(
            "labeling has {} entries for {} cells",
            labeling.len(),
            mesh.num_cells()
        )));
    }
    if let Some(&l) = labeling.iter().find(|&&l| l >= mesh.num_cells()) {
        return Err(Error::Config(format!("label {l} is not a cell index")));
    }
    let groups = label_components(mesh, labeling);
    let (merged, failed) = merge_groups(mesh, &groups)?;
    let simplified = simplify_aligned_edges(&merged, COLLINEAR_TOL);
    Ok((simplified, ApplyReport { failed_components: failed.len() }))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionStats {
    pub cells_before: usize,
    pub cells_after: usize,
    pub edges_before: usize,
    pub edges_after: usize,
    pub vertices_before: usize,
    pub vertices_after: usize,
    pub energy_before: i64,
    pub energy_after: i64,
    /// `(E1 - E2) / E1`, 0 when `E1 = 0`.
    pub energy_saved: f64,
    pub cycles: usize,
    pub failed_components: usize,
}

#[derive(Debug, Clone)]
pub struct Agglomeration {
    pub mesh: PolygonalMesh,
    pub labeling: Labeling,
    pub history: Vec<EnergyBreakdown>,
    pub stats: ReductionStats,
}

pub fn agglomerate(mesh: &PolygonalMesh, config: &AgglomerationConfig) -> Result<Agglomeration> {
    let res = minimize(mesh, config)?;
    let (out, report) = apply_labeling(mesh, &res.labeling)?;
    let e1 = res.history.first().map_or(0, |e| e.total);
    let e2 = res.history.last().map_or(0, |e| e.total);
    let stats = ReductionStats {
        cells_before: mesh.num_cells(),
        cells_after: out.num_cells(),
        edges_before: mesh.num_edges(),
        edges_after: out.num_edges(),
        vertices_before: mesh.num_vertices(),
        vertices_after: out.num_vertices(),
        energy_before: e1,
        energy_after: e2,
        energy_saved: if e1 > 0 { (e1 - e2) as f64 / e1 as f64 } else { 0.0 },
        cycles: res.cycles,
        failed_components: report.failed_components,
    };
    Ok(Agglomeration { mesh: out, labeling: res.labeling, history: res.history, stats })
}
