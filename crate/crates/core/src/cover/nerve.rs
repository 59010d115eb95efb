use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Overlap `U_from ∩ (U_to + deck)`, oriented from `from` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub deck: [i64; 2],
}

/// A stored edge read in its stored direction or reversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRef {
    pub edge: usize,
    pub forward: bool,
}

/// Triple overlap `(i, j, k)` with the edges realizing `ij`, `jk` and `ik`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub ij: EdgeRef,
    pub jk: EdgeRef,
    pub ik: EdgeRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum CoverKind {
    Grid { m: usize },
    Custom,
}

/// Nerve of a finite cover of the torus with deck labels.
///
/// Invariants: connected; every triangle satisfies `deck(ij) + deck(jk) = deck(ik)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cover {
    kind: CoverKind,
    vertices: usize,
    edges: Vec<Edge>,
    triangles: Vec<Triangle>,
    /// Least-squares lifts `a_j` minimizing `sum |deck + a_to - a_from|^2`, `a_0 = 0`.
    potentials: Vec<[f64; 2]>,
    /// Deck sums of a cycle basis.
    cycles: Vec<[i64; 2]>,
}

const GRID_DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

fn deck_of(r: EdgeRef, edges: &[Edge]) -> [i64; 2] {
    let d = edges[r.edge].deck;
    if r.forward {
        d
    } else {
        [-d[0], -d[1]]
    }
}

fn ends(r: EdgeRef, edges: &[Edge]) -> (usize, usize) {
    let e = edges[r.edge];
    if r.forward {
        (e.from, e.to)
    } else {
        (e.to, e.from)
    }
}

impl Cover {
    /// `m x m` grid of slightly enlarged squares with 8-neighbour overlaps.
    pub fn grid(m: usize) -> Result<Cover> {
        if m < 3 {
            return Err(Error::TooCoarse(m));
        }
        let mi = m as i64;
        let idx = |a: i64, b: i64| (a.rem_euclid(mi) + mi * b.rem_euclid(mi)) as usize;
        let mut edges = Vec::with_capacity(4 * m * m);
        for b in 0..mi {
            for a in 0..mi {
                for &(da, db) in &GRID_DIRS {
                    let (na, nb) = (a + da, b + db);
                    edges.push(Edge { from: idx(a, b), to: idx(na, nb), deck: [na.div_euclid(mi), nb.div_euclid(mi)] });
                }
            }
        }
        let e = |v: usize, dir: usize| 4 * v + dir;
        let fwd = |edge| EdgeRef { edge, forward: true };
        let rev = |edge| EdgeRef { edge, forward: false };
        let mut triangles = Vec::with_capacity(4 * m * m);
        for b in 0..mi {
            for a in 0..mi {
                let (pa, pb, pc, pd) = (idx(a, b), idx(a + 1, b), idx(a, b + 1), idx(a + 1, b + 1));
                let ab = fwd(e(pa, 0));
                let ad = fwd(e(pa, 2));
                let bd = fwd(e(pb, 1));
                let ac = fwd(e(pa, 1));
                let cd = fwd(e(pc, 0));
                let bc = rev(e(pc, 3));
                triangles.push(Triangle { vertices: [pa, pb, pd], ij: ab, jk: bd, ik: ad });
                triangles.push(Triangle { vertices: [pa, pc, pd], ij: ac, jk: cd, ik: ad });
                triangles.push(Triangle { vertices: [pa, pb, pc], ij: ab, jk: bc, ik: ac });
                triangles.push(Triangle { vertices: [pb, pc, pd], ij: bc, jk: cd, ik: bd });
            }
        }
        Cover::assemble(CoverKind::Grid { m }, m * m, edges, triangles)
    }

    /// Arbitrary nerve; triangles are given by vertex triples and matched to edges.
    pub fn custom(vertices: usize, edges: Vec<Edge>, triangles: &[[usize; 3]]) -> Result<Cover> {
        if vertices == 0 {
            return Err(Error::InvalidInput("nerve needs at least one vertex".into()));
        }
        for e in &edges {
            if e.from >= vertices || e.to >= vertices {
                return Err(Error::IndexMismatch(format!("edge {}->{} outside {vertices} vertices", e.from, e.to)));
            }
        }
        let refs_between = |a: usize, b: usize| -> Vec<EdgeRef> {
            edges
                .iter()
                .enumerate()
                .filter_map(|(i, e)| {
                    if e.from == a && e.to == b {
                        Some(EdgeRef { edge: i, forward: true })
                    } else if e.from == b && e.to == a {
                        Some(EdgeRef { edge: i, forward: false })
                    } else {
                        None
                    }
                })
                .collect()
        };
        let mut tris = Vec::with_capacity(triangles.len());
        for &[i, j, k] in triangles {
            let mut found = None;
            'search: for ij in refs_between(i, j) {
                for jk in refs_between(j, k) {
                    for ik in refs_between(i, k) {
                        let (x, y, z) = (deck_of(ij, &edges), deck_of(jk, &edges), deck_of(ik, &edges));
                        if x[0] + y[0] == z[0] && x[1] + y[1] == z[1] {
                            found = Some(Triangle { vertices: [i, j, k], ij, jk, ik });
                            break 'search;
                        }
                    }
                }
            }
            match found {
                Some(t) => tris.push(t),
                None => {
                    return Err(Error::InvalidInput(format!(
                        "triangle ({i},{j},{k}) has no edges with additive deck labels"
                    )))
                }
            }
        }
        Cover::assemble(CoverKind::Custom, vertices, edges, tris)
    }

    fn assemble(kind: CoverKind, vertices: usize, edges: Vec<Edge>, triangles: Vec<Triangle>) -> Result<Cover> {
        for t in &triangles {
            let (x, y, z) = (deck_of(t.ij, &edges), deck_of(t.jk, &edges), deck_of(t.ik, &edges));
            let [i, j, k] = t.vertices;
            let ok_ends = ends(t.ij, &edges) == (i, j) && ends(t.jk, &edges) == (j, k) && ends(t.ik, &edges) == (i, k);
            if !ok_ends || x[0] + y[0] != z[0] || x[1] + y[1] != z[1] {
                return Err(Error::InvalidInput(format!("triangle {:?} violates deck additivity", t.vertices)));
            }
        }
        let cycles = cycle_basis(vertices, &edges)?;
        let potentials = harmonic_potentials(vertices, &edges);
        Ok(Cover { kind, vertices, edges, triangles, potentials, cycles })
    }

    pub fn kind(&self) -> &CoverKind {
        &self.kind
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn potentials(&self) -> &[[f64; 2]] {
        &self.potentials
    }

    pub fn cycles(&self) -> &[[i64; 2]] {
        &self.cycles
    }

    /// Stable identifier used in file headers.
    pub fn id(&self) -> String {
        match self.kind {
            CoverKind::Grid { m } => format!("grid-{m}"),
            CoverKind::Custom => format!("custom-{}v-{}e", self.vertices, self.edges.len()),
        }
    }

    pub fn deck(&self, r: EdgeRef) -> [i64; 2] {
        deck_of(r, &self.edges)
    }

    pub fn to_json(&self) -> NerveJson {
        NerveJson {
            vertices: VertexList::Count(self.vertices),
            edges: self.edges.clone(),
            triangles: self.triangles.iter().map(|t| t.vertices).collect(),
        }
    }
}

/// Deck sums around the fundamental cycles of a BFS spanning tree.
fn cycle_basis(vertices: usize, edges: &[Edge]) -> Result<Vec<[i64; 2]>> {
    let mut adj = vec![Vec::new(); vertices];
    for (i, e) in edges.iter().enumerate() {
        adj[e.from].push(i);
        adj[e.to].push(i);
    }
    let mut lift: Vec<Option<[i64; 2]>> = vec![None; vertices];
    let mut tree = vec![false; edges.len()];
    lift[0] = Some([0, 0]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let lv = lift[v].expect("visited");
        for &i in &adj[v] {
            let e = edges[i];
            let (w, lw) = if e.from == v {
                (e.to, [lv[0] + e.deck[0], lv[1] + e.deck[1]])
            } else {
                (e.from, [lv[0] - e.deck[0], lv[1] - e.deck[1]])
            };
            if lift[w].is_none() {
                lift[w] = Some(lw);
                tree[i] = true;
                queue.push_back(w);
            }
        }
    }
    if lift.iter().any(Option::is_none) {
        return Err(Error::InvalidInput("nerve is not connected".into()));
    }
    Ok(edges
        .iter()
        .zip(&tree)
        .filter(|(_, &t)| !t)
        .map(|(e, _)| {
            let (a, b) = (lift[e.from].unwrap(), lift[e.to].unwrap());
            [a[0] + e.deck[0] - b[0], a[1] + e.deck[1] - b[1]]
        })
        .collect())
}

fn harmonic_potentials(vertices: usize, edges: &[Edge]) -> Vec<[f64; 2]> {
    if vertices == 1 {
        return vec![[0.0, 0.0]];
    }
    let n = vertices - 1;
    let mut lap = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DMatrix::<f64>::zeros(n, 2);
    for e in edges {
        if e.from == e.to {
            continue;
        }
        let (j, k) = (e.from, e.to);
        let d = [e.deck[0] as f64, e.deck[1] as f64];
        // residual deck + a_k - a_j
        for (v, sign) in [(k, 1.0), (j, -1.0)] {
            if v == 0 {
                continue;
            }
            lap[(v - 1, v - 1)] += 1.0;
            for c in 0..2 {
                rhs[(v - 1, c)] -= sign * d[c];
            }
        }
        if j != 0 && k != 0 {
            lap[(j - 1, k - 1)] -= 1.0;
            lap[(k - 1, j - 1)] -= 1.0;
        }
    }
    let sol = lap.cholesky().expect("connected nerve has a positive definite reduced Laplacian").solve(&rhs);
    let mut out = vec![[0.0, 0.0]];
    out.extend((0..n).map(|i| [sol[(i, 0)], sol[(i, 1)]]));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexList {
    Count(usize),
    Labels(Vec<serde_json::Value>),
}

/// `{"vertices": [...], "edges": [{"from", "to", "deck"}], "triangles": [[i, j, k]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NerveJson {
    pub vertices: VertexList,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub triangles: Vec<[usize; 3]>,
}

impl NerveJson {
    pub fn into_cover(self) -> Result<Cover> {
        let n = match &self.vertices {
            VertexList::Count(n) => *n,
            VertexList::Labels(v) => v.len(),
        };
        Cover::custom(n, self.edges, &self.triangles)
    }
}
