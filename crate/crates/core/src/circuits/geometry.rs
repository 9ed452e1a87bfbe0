//! Processor geometries: qubit coordinates, 4-colored nearest-neighbor edge
//! layers, cycle schedule, probe qubit, and nested decoding patches.
//!
//! Geometries are shipped as JSON data files and can be rebuilt with the
//! generator functions here.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Result, SimError};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Orange,
    Blue,
    Green,
    Red,
}

pub const COLOR_CYCLE: [Color; 4] = [Color::Orange, Color::Blue, Color::Green, Color::Red];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Geometry {
    pub name: String,
    /// integer (x, y) coordinates
    pub qubits: Vec<(i32, i32)>,
    /// (qubit, qubit, color); nearest neighbors only
    pub edges: Vec<(usize, usize, Color)>,
    /// color applied at cycle t = 1, 2, ... (repeats if depth exceeds it)
    pub cycle_colors: Vec<Color>,
    pub probe: usize,
    /// nested decoding patches D_1 subset D_2 subset ... D_rmax
    /// (D_0 = empty is implicit; D_rmax = all qubits except the probe)
    pub patches: Vec<Vec<usize>>,
}

impl Geometry {
    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn color_at_cycle(&self, t: usize) -> Color {
        debug_assert!(t >= 1);
        self.cycle_colors[(t - 1) % self.cycle_colors.len()]
    }

    pub fn edges_of_color(&self, c: Color) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .filter(move |&&(_, _, ec)| ec == c)
            .map(|&(i, j, _)| (i, j))
    }

    pub fn index_of(&self, x: i32, y: i32) -> Option<usize> {
        self.qubits.iter().position(|&q| q == (x, y))
    }

    /// Structural checks: nearest-neighbor edges, one color per edge,
    /// colors form matchings, patches strictly nested and complete.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        for &(i, j, _) in &self.edges {
            if i >= n || j >= n {
                return Err(SimError::Geometry(format!(
                    "edge ({i},{j}) out of range in {}",
                    self.name
                )));
            }
            // nearest neighbors of the lattice: unit step on the square
            // lattice, diagonal step on the checkerboard lattice
            let (a, b) = (self.qubits[i], self.qubits[j]);
            let d = (a.0 - b.0).abs().max((a.1 - b.1).abs());
            if d != 1 {
                return Err(SimError::Geometry(format!(
                    "edge ({i},{j}) is not nearest-neighbor in {}",
                    self.name
                )));
            }
        }
        for c in COLOR_CYCLE {
            let mut seen = BTreeSet::new();
            for (i, j) in self.edges_of_color(c) {
                if !seen.insert(i) || !seen.insert(j) {
                    return Err(SimError::Geometry(format!(
                        "color {c:?} is not a matching in {}",
                        self.name
                    )));
                }
            }
        }
        if self.probe >= n {
            return Err(SimError::Geometry("probe out of range".into()));
        }
        let mut prev: BTreeSet<usize> = BTreeSet::new();
        for (r, patch) in self.patches.iter().enumerate() {
            let cur: BTreeSet<usize> = patch.iter().copied().collect();
            if cur.contains(&self.probe) {
                return Err(SimError::Geometry(format!(
                    "patch D_{} contains the probe",
                    r + 1
                )));
            }
            if !prev.is_subset(&cur) || cur.len() <= prev.len() {
                return Err(SimError::Geometry(format!(
                    "patches not strictly nested at D_{}",
                    r + 1
                )));
            }
            prev = cur;
        }
        if prev.len() + 1 != n {
            return Err(SimError::Geometry(
                "last patch must cover all qubits except the probe".into(),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: Geometry = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Rectangular grid of `rows x cols` (plus `extra` qubits in one additional
/// centered partial column). Vertical edges colored orange/green by y
/// parity, horizontal ones blue/red by x parity; horizontal layers then
/// fire on 2 of every 4 cycles, which keeps the 1D sweep window at three
/// columns and mapped gates at range <= 3 for depth 5. Probe at the middle
/// of the left column; decoding patches are column slabs growing away from
/// it.
pub fn rect_grid(name: &str, rows: usize, cols: usize, extra: usize) -> Geometry {
    assert!(extra < rows);
    let mut qubits = Vec::new();
    for x in 0..cols {
        for y in 0..rows {
            qubits.push((x as i32, y as i32));
        }
    }
    if extra > 0 {
        let y0 = (rows - extra) / 2;
        for y in y0..y0 + extra {
            qubits.push((cols as i32, y as i32));
        }
    }
    let idx = |x: i32, y: i32| qubits.iter().position(|&q| q == (x, y));
    let mut edges = Vec::new();
    for (i, &(x, y)) in qubits.iter().enumerate() {
        if let Some(j) = idx(x + 1, y) {
            let c = if x.rem_euclid(2) == 0 { Color::Blue } else { Color::Red };
            edges.push((i, j, c));
        }
        if let Some(j) = idx(x, y + 1) {
            let c = if y.rem_euclid(2) == 0 { Color::Orange } else { Color::Green };
            edges.push((i, j, c));
        }
    }
    let probe = idx(0, (rows / 2) as i32).unwrap();
    let total_cols = cols + usize::from(extra > 0);
    let mut patches = Vec::new();
    let mut acc: Vec<usize> = Vec::new();
    for x in 0..total_cols {
        for (i, &(qx, _)) in qubits.iter().enumerate() {
            if qx == x as i32 && i != probe {
                acc.push(i);
            }
        }
        let mut p = acc.clone();
        p.sort_unstable();
        patches.push(p);
    }
    let g = Geometry {
        name: name.to_string(),
        qubits,
        edges,
        cycle_colors: COLOR_CYCLE.to_vec(),
        probe,
        patches,
    };
    g.validate().expect("rect_grid produced invalid geometry");
    g
}

/// Checkerboard lattice in a `width x height` bounding box: qubits at
/// (x, y) with x + y even, edges along the two diagonal directions (the
/// lattice's nearest neighbors). Up-right edges are orange/green by
/// (x+y)/2 parity, down-right edges blue/red by (x-y)/2 parity, so every
/// cycle advances the sweep direction and each cycle color is a matching.
/// `trim` removes that many qubits from the far (largest x+y) corner.
/// Probe at the middle of the left side; patches are column slabs.
pub fn checkerboard(name: &str, width: usize, height: usize, trim: usize) -> Geometry {
    let mut qubits: Vec<(i32, i32)> = (0..width as i32)
        .flat_map(|x| (0..height as i32).map(move |y| (x, y)))
        .filter(|&(x, y)| (x + y) % 2 == 0)
        .collect();
    if trim > 0 {
        qubits.sort_by_key(|&(x, y)| (x + y, y));
        qubits.truncate(qubits.len() - trim);
        qubits.sort_by_key(|&(x, y)| (x, y));
    }
    let idx = |x: i32, y: i32| qubits.iter().position(|&q| q == (x, y));
    let mut edges = Vec::new();
    for (i, &(x, y)) in qubits.iter().enumerate() {
        if let Some(j) = idx(x + 1, y + 1) {
            let c = if ((x + y) / 2).rem_euclid(2) == 0 { Color::Orange } else { Color::Green };
            edges.push((i, j, c));
        }
        if let Some(j) = idx(x + 1, y - 1) {
            let c = if ((x - y) / 2).rem_euclid(2) == 0 { Color::Blue } else { Color::Red };
            edges.push((i, j, c));
        }
    }
    let mut left_ys: Vec<i32> = qubits
        .iter()
        .filter(|&&(x, _)| x == 0)
        .map(|&(_, y)| y)
        .collect();
    left_ys.sort_unstable();
    let probe_y = left_ys[left_ys.len() / 2];
    let probe = idx(0, probe_y).unwrap();
    let x_max = qubits.iter().map(|q| q.0).max().unwrap();
    let mut patches = Vec::new();
    let mut acc: Vec<usize> = Vec::new();
    for x in 0..=x_max {
        for (i, &(qx, _)) in qubits.iter().enumerate() {
            if qx == x && i != probe {
                acc.push(i);
            }
        }
        let mut p = acc.clone();
        p.sort_unstable();
        if patches.last().map_or(true, |prev: &Vec<usize>| p.len() > prev.len()) {
            patches.push(p);
        }
    }
    let g = Geometry {
        name: name.to_string(),
        qubits,
        edges,
        cycle_colors: COLOR_CYCLE.to_vec(),
        probe,
        patches,
    };
    g.validate().expect("checkerboard produced invalid geometry");
    g
}

/// The 19-qubit grid: a chain column of 7 qubits fed by a 7 + 5 qubit bulk.
/// Columns x = 0 (7 qubits), x = 1 (5, centered), x = 2 (7, the chain).
/// Vertical edges are orange/green by y parity; horizontal edges blue/red
/// arranged so chain-bulk coupling fires every other cycle.
pub fn grid19() -> Geometry {
    let mut qubits = Vec::new();
    for y in 0..7 {
        qubits.push((0, y));
    }
    for y in 1..6 {
        qubits.push((1, y));
    }
    for y in 0..7 {
        qubits.push((2, y));
    }
    let idx = |x: i32, y: i32| qubits.iter().position(|&q| q == (x, y));
    let mut edges = Vec::new();
    for (i, &(x, y)) in qubits.iter().enumerate() {
        if let Some(j) = idx(x, y + 1) {
            let c = if y.rem_euclid(2) == 0 { Color::Orange } else { Color::Green };
            edges.push((i, j, c));
        }
        if let Some(j) = idx(x + 1, y) {
            // horizontal: parity of y picks blue/red, flipped between the
            // two column pairs so each bulk qubit sees distinct colors
            let c = match (x, y.rem_euclid(2)) {
                (0, 0) => Color::Red,
                (0, _) => Color::Blue,
                (1, 0) => Color::Blue,
                _ => Color::Red,
            };
            edges.push((i, j, c));
        }
    }
    // probe at a chain-column end so the MPS decoder can keep it at an edge
    let probe = idx(2, 0).unwrap();
    // patches: graph-distance shells around the probe
    let n = qubits.len();
    let dist = bfs_distances(&qubits, &edges, probe);
    let maxd = *dist.iter().max().unwrap();
    let mut patches = Vec::new();
    let mut acc: Vec<usize> = Vec::new();
    for d in 1..=maxd {
        for i in 0..n {
            if dist[i] == d {
                acc.push(i);
            }
        }
        let mut p = acc.clone();
        p.sort_unstable();
        patches.push(p);
    }
    let g = Geometry {
        name: "grid19".to_string(),
        qubits,
        edges,
        cycle_colors: COLOR_CYCLE.to_vec(),
        probe,
        patches,
    };
    g.validate().expect("grid19 invalid");
    g
}

fn bfs_distances(
    qubits: &[(i32, i32)],
    edges: &[(usize, usize, Color)],
    src: usize,
) -> Vec<usize> {
    let n = qubits.len();
    let mut adj = vec![Vec::new(); n];
    for &(i, j, _) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut dist = vec![usize::MAX; n];
    dist[src] = 0;
    let mut queue = std::collections::VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// The chain hosting the final state in the grid19 experiments: the x = 2
/// column, ordered by y.
pub fn grid19_chain(g: &Geometry) -> Vec<usize> {
    let mut chain: Vec<(i32, usize)> = g
        .qubits
        .iter()
        .enumerate()
        .filter(|(_, &(x, _))| x == 2)
        .map(|(i, &(_, y))| (y, i))
        .collect();
    chain.sort_unstable();
    chain.into_iter().map(|(_, i)| i).collect()
}
