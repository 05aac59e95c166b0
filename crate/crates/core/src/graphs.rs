//! Finite simple graphs, rooted graphs and the random graph ensembles.

use std::collections::{HashSet, VecDeque};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{seeded_rng, Seed};

/// Default cap on the number of vertices a deterministic generator may emit.
pub const DEFAULT_VERTEX_CAP: usize = 10_000_000;

/// Pairing attempts before the configuration model falls back to erasure.
pub const CONFIG_MODEL_MAX_ATTEMPTS: usize = 100;

/// Simple undirected graph in compressed adjacency form.
///
/// Neighbor lists are sorted, free of duplicates and self-loops, and
/// symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    /// Builds a graph from an undirected edge list, rejecting loops,
    /// repeated edges and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
        }
        let g = Self::build(n, edges);
        for v in 0..n {
            if g.neighbors(v).windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("repeated edge at vertex {v}")));
            }
        }
        Ok(g)
    }

    /// Builds from per-vertex neighbor lists, validating symmetry.
    pub fn from_adjacency(adjacency: &[Vec<usize>]) -> Result<Self> {
        let n = adjacency.len();
        let mut edges = Vec::new();
        for (u, list) in adjacency.iter().enumerate() {
            for &v in list {
                if v >= n {
                    return Err(Error::invalid(format!("neighbor {v} of {u} out of range")));
                }
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        let g = Self::from_edges(n, &edges)?;
        for (u, list) in adjacency.iter().enumerate() {
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted != g.neighbors(u) {
                return Err(Error::invalid(format!("adjacency of {u} is not symmetric or simple")));
            }
        }
        Ok(g)
    }

    /// Edges must already be distinct and loop-free.
    fn build(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0usize; offsets[n]];
        for &(u, v) in edges {
            neighbors[fill[u]] = v;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph { offsets, neighbors }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.vertex_count()).map(|v| self.degree(v)).collect()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count())
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count() > 0
            && self.edge_count() + 1 == self.vertex_count()
            && self.is_connected()
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.bfs_distances(0, usize::MAX).iter().all(|d| d.is_some())
    }

    /// BFS distances from `source`, `None` beyond `max_depth` or unreachable.
    pub fn bfs_distances(&self, source: usize, max_depth: usize) -> Vec<Option<usize>> {
        self.multi_source_distances(&[source], max_depth)
    }

    pub fn multi_source_distances(&self, sources: &[usize], max_depth: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if du == max_depth {
                continue;
            }
            for &w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices within `radius` of `source`, in BFS order (source first).
    pub fn ball_vertices(&self, source: usize, radius: usize) -> Vec<usize> {
        let mut seen = HashSet::new();
        let mut order = vec![source];
        seen.insert(source);
        let mut frontier = vec![source];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in self.neighbors(u) {
                    if seen.insert(w) {
                        next.push(w);
                        order.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        order
    }

    /// Induced subgraph on `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for w in self.neighbors(v) {
                if let Some(&j) = local.get(w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        Self::build(vertices.len(), &edges)
    }

    /// Connected component labels (numbered by smallest member) and sizes.
    pub fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            label[s] = c;
            queue.push_back(s);
            let mut size = 0;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &w in self.neighbors(u) {
                    if label[w] == usize::MAX {
                        label[w] = c;
                        queue.push_back(w);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    /// Checks the simple-graph invariants; used by tests on generator output.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.vertex_count();
        for v in 0..n {
            let adj = self.neighbors(v);
            if adj.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("adjacency of {v} not strictly sorted")));
            }
            for &w in adj {
                if w >= n || w == v || !self.has_edge(w, v) {
                    return Err(Error::invalid(format!("bad edge ({v},{w})")));
                }
            }
        }
        Ok(())
    }
}

/// Connected graph with a distinguished root.
///
/// `origin[i]` is the index vertex `i` had in the graph this one was cut
/// out of (the identity for freshly generated graphs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    graph: Graph,
    root: usize,
    origin: Vec<usize>,
}

impl RootedGraph {
    pub fn new(graph: Graph, root: usize) -> Result<Self> {
        let n = graph.vertex_count();
        Self::with_origin(graph, root, (0..n).collect())
    }

    pub fn with_origin(graph: Graph, root: usize, origin: Vec<usize>) -> Result<Self> {
        if root >= graph.vertex_count() {
            return Err(Error::invalid(format!("root {root} out of range")));
        }
        if origin.len() != graph.vertex_count() {
            return Err(Error::invalid("origin map length differs from vertex count"));
        }
        if !graph.is_connected() {
            return Err(Error::invalid("rooted graph must be connected"));
        }
        Ok(RootedGraph { graph, root, origin })
    }

    /// Single vertex.
    pub fn trivial() -> Self {
        RootedGraph {
            graph: Graph::empty(1),
            root: 0,
            origin: vec![0],
        }
    }

    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }
}

/// Rooted graph carrying one mark per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedGraph<M> {
    rooted: RootedGraph,
    marks: Vec<M>,
}

impl<M> MarkedGraph<M> {
    pub fn new(rooted: RootedGraph, marks: Vec<M>) -> Result<Self> {
        if marks.len() != rooted.vertex_count() {
            return Err(Error::Mismatch(format!(
                "{} marks for {} vertices",
                marks.len(),
                rooted.vertex_count()
            )));
        }
        Ok(MarkedGraph { rooted, marks })
    }

    pub fn rooted(&self) -> &RootedGraph {
        &self.rooted
    }

    pub fn marks(&self) -> &[M] {
        &self.marks
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability {p} outside [0,1]")));
    }
    Ok(())
}

/// Erdős-Rényi graph G(n, p).
///
/// Uses geometric skipping over the lexicographic list of vertex pairs, so
/// the cost is linear in `n + |E|`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    check_probability(p)?;
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((w, v));
            }
        }
    } else if p > 0.0 {
        let mut rng = seeded_rng(seed);
        let log_q = (1.0 - p).ln();
        let (mut v, mut w) = (1usize, -1i64);
        while v < n {
            let r: f64 = rng.gen();
            w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    }
    Ok(Graph::build(n, &edges))
}

/// Uniform graph with exactly `m` edges.
pub fn gen_gnm(n: usize, m: usize, seed: Seed) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let pairs = n as u128 * (n as u128 - 1) / 2;
    if m as u128 > pairs {
        return Err(Error::invalid(format!("{m} edges exceed the {pairs} available pairs")));
    }
    let pairs = pairs as u64;
    let mut rng = seeded_rng(seed);
    // Floyd's sampling of m distinct pair indices.
    let mut chosen = HashSet::with_capacity(m);
    for j in (pairs - m as u64)..pairs {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut idx: Vec<u64> = chosen.into_iter().collect();
    idx.sort_unstable();
    let edges: Vec<(usize, usize)> = idx.into_iter().map(pair_from_index).collect();
    Ok(Graph::build(n, &edges))
}

/// Inverse of the enumeration `(w, v), w < v` ordered by `v` then `w`.
fn pair_from_index(t: u64) -> (usize, usize) {
    let mut v = ((((8 * t + 1) as f64).sqrt() + 1.0) / 2.0).floor() as u64;
    while v * (v - 1) / 2 > t {
        v -= 1;
    }
    while (v + 1) * v / 2 <= t {
        v += 1;
    }
    let w = t - v * (v - 1) / 2;
    (w as usize, v as usize)
}

/// Configuration model output; `erased` marks the fallback path where
/// loops and multi-edges were removed instead of resampled away.
#[derive(Clone, Debug)]
pub struct ConfigurationGraph {
    pub graph: Graph,
    pub erased: bool,
    pub attempts: usize,
}

pub fn gen_configuration_model(degrees: &[usize], seed: Seed) -> Result<ConfigurationGraph> {
    gen_configuration_model_with(degrees, CONFIG_MODEL_MAX_ATTEMPTS, seed)
}

/// Uniform half-edge pairing, resampled up to `max_attempts` times until
/// simple, then erased.
pub fn gen_configuration_model_with(
    degrees: &[usize],
    max_attempts: usize,
    seed: Seed,
) -> Result<ConfigurationGraph> {
    let n = degrees.len();
    let total: u64 = degrees.iter().map(|&d| d as u64).sum();
    if total % 2 == 1 {
        return Err(Error::OddDegreeSum(total));
    }
    if let Some((v, &d)) = degrees.iter().enumerate().find(|(_, &d)| d >= n) {
        return Err(Error::invalid(format!("degree {d} of vertex {v} is not below n = {n}")));
    }
    let mut stubs: Vec<usize> = Vec::with_capacity(total as usize);
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat(v).take(d));
    }
    let mut rng = seeded_rng(seed);
    let mut last = Vec::new();
    for attempt in 1..=max_attempts.max(1) {
        stubs.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = stubs
            .chunks_exact(2)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
            .collect();
        edges.sort_unstable();
        let simple = edges.iter().all(|&(u, v)| u != v) && edges.windows(2).all(|w| w[0] != w[1]);
        if simple {
            return Ok(ConfigurationGraph {
                graph: Graph::build(n, &edges),
                erased: false,
                attempts: attempt,
            });
        }
        last = edges;
    }
    last.retain(|&(u, v)| u != v);
    last.dedup();
    Ok(ConfigurationGraph {
        graph: Graph::build(n, &last),
        erased: true,
        attempts: max_attempts.max(1),
    })
}

/// Uniform `k`-regular graph via the configuration model.
pub fn gen_random_regular(n: usize, k: usize, seed: Seed) -> Result<ConfigurationGraph> {
    if k >= n {
        return Err(Error::invalid(format!("degree {k} must be below n = {n}")));
    }
    if (n * k) % 2 == 1 {
        return Err(Error::OddDegreeSum((n * k) as u64));
    }
    gen_configuration_model(&vec![k; n], seed)
}

/// Exponent condition on a degree sequence: every degree stays below
/// `n^(1/4 - delta)`.
pub fn degree_growth_ok(degrees: &[usize], delta: f64) -> bool {
    let bound = (degrees.len() as f64).powf(0.25 - delta);
    degrees.iter().all(|&d| (d as f64) < bound)
}

fn cap_check(what: &'static str, requested: u128, cap: usize) -> Result<usize> {
    if requested > cap as u128 {
        return Err(Error::SizeCap {
            what,
            requested,
            cap: cap as u128,
        });
    }
    Ok(requested as usize)
}

/// Geometry of the box `[-radius, radius]^dim` in `Z^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeBox {
    pub dim: usize,
    pub radius: usize,
}

impl LatticeBox {
    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    /// Index of a point with coordinates in `[-radius, radius]`.
    pub fn index(&self, coords: &[i64]) -> Option<usize> {
        if coords.len() != self.dim {
            return None;
        }
        let r = self.radius as i64;
        let mut idx = 0usize;
        for &c in coords {
            if c < -r || c > r {
                return None;
            }
            idx = idx * self.side() + (c + r) as usize;
        }
        Some(idx)
    }

    pub fn coords(&self, mut index: usize) -> Vec<i64> {
        let side = self.side();
        let mut out = vec![0i64; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = (index % side) as i64 - self.radius as i64;
            index /= side;
        }
        out
    }

    pub fn origin(&self) -> usize {
        self.index(&vec![0; self.dim]).expect("origin lies in every box")
    }
}

pub fn gen_lattice_box(dim: usize, n: usize) -> Result<RootedGraph> {
    gen_lattice_box_with_cap(dim, n, DEFAULT_VERTEX_CAP)
}

/// Nearest-neighbour box `Z^dim ∩ [-n, n]^dim`, rooted at the origin.
pub fn gen_lattice_box_with_cap(dim: usize, n: usize, cap: usize) -> Result<RootedGraph> {
    if dim == 0 {
        return Err(Error::invalid("lattice dimension must be at least 1"));
    }
    let side = 2 * n as u128 + 1;
    let requested = (0..dim).try_fold(1u128, |acc, _| acc.checked_mul(side)).unwrap_or(u128::MAX);
    let count = cap_check("lattice box", requested, cap)?;
    let lattice = LatticeBox { dim, radius: n };
    let mut edges = Vec::with_capacity(count * dim);
    let mut stride = 1usize;
    for _ in 0..dim {
        for v in 0..count {
            let coordinate = (v / stride) % lattice.side();
            if coordinate + 1 < lattice.side() {
                edges.push((v, v + stride));
            }
        }
        stride *= lattice.side();
    }
    RootedGraph::new(Graph::build(count, &edges), lattice.origin())
}

/// `|T^k_h|`, or `None` on overflow.
pub fn regular_tree_size(k: usize, height: usize) -> Option<u128> {
    let mut total: u128 = 1;
    let mut level: u128 = 1;
    for depth in 0..height {
        let branching = if depth == 0 { k } else { k.saturating_sub(1) } as u128;
        level = level.checked_mul(branching)?;
        if level == 0 {
            break;
        }
        total = total.checked_add(level)?;
    }
    Some(total)
}

pub fn gen_regular_tree(k: usize, height: usize) -> Result<RootedGraph> {
    gen_regular_tree_with_cap(k, height, DEFAULT_VERTEX_CAP)
}

/// Ball of radius `height` in the `k`-regular tree: the root has `k`
/// children, every other internal vertex `k - 1`.
pub fn gen_regular_tree_with_cap(k: usize, height: usize, cap: usize) -> Result<RootedGraph> {
    let size = cap_check("regular tree", regular_tree_size(k, height).unwrap_or(u128::MAX), cap)?;
    let mut edges = Vec::with_capacity(size.saturating_sub(1));
    let mut frontier = vec![0usize];
    let mut next_id = 1usize;
    for depth in 0..height {
        let branching = if depth == 0 { k } else { k.saturating_sub(1) };
        let mut next = Vec::with_capacity(frontier.len() * branching);
        for &parent in &frontier {
            for _ in 0..branching {
                edges.push((parent, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    RootedGraph::new(Graph::build(next_id, &edges), 0)
}

/// Finite piece of the canopy tree with level coordinates per vertex.
#[derive(Clone, Debug)]
pub struct CanopyTruncation {
    pub rooted: RootedGraph,
    /// `(level, position)` of every vertex of `rooted`.
    pub coords: Vec<(usize, usize)>,
}

pub fn gen_canopy_truncation(
    d: usize,
    levels: usize,
    base_width: usize,
    root_level: usize,
) -> Result<CanopyTruncation> {
    gen_canopy_truncation_with_cap(d, levels, base_width, root_level, DEFAULT_VERTEX_CAP)
}

/// Levels `0..=levels` of the canopy tree with edges
/// `(i, j) -- (i + 1, j / (d - 1))`, level `i` holding
/// `base_width * (d - 1)^(levels - i)` vertices. Returns the component of
/// the root `(root_level, 0)`.
pub fn gen_canopy_truncation_with_cap(
    d: usize,
    levels: usize,
    base_width: usize,
    root_level: usize,
    cap: usize,
) -> Result<CanopyTruncation> {
    if d < 3 {
        return Err(Error::invalid("canopy tree needs d >= 3"));
    }
    if levels < 1 || base_width < 1 {
        return Err(Error::invalid("canopy truncation needs levels >= 1 and base_width >= 1"));
    }
    if root_level > levels {
        return Err(Error::invalid(format!("root level {root_level} above top level {levels}")));
    }
    let branching = (d - 1) as u128;
    let mut widths = Vec::with_capacity(levels + 1);
    let mut total: u128 = 0;
    for i in 0..=levels {
        let w = branching
            .checked_pow((levels - i) as u32)
            .and_then(|p| p.checked_mul(base_width as u128))
            .unwrap_or(u128::MAX);
        total = total.saturating_add(w);
        widths.push(w);
    }
    cap_check("canopy truncation", total, cap)?;
    let widths: Vec<usize> = widths.into_iter().map(|w| w as usize).collect();
    let mut offset = vec![0usize; levels + 2];
    for i in 0..=levels {
        offset[i + 1] = offset[i] + widths[i];
    }
    let mut edges = Vec::new();
    for i in 0..levels {
        for j in 0..widths[i] {
            edges.push((offset[i] + j, offset[i + 1] + j / (d - 1)));
        }
    }
    let full = Graph::build(offset[levels + 1], &edges);
    let comp = component_of(&full, offset[root_level])?;
    let coords = comp
        .origin()
        .iter()
        .map(|&v| {
            let i = offset.partition_point(|&o| o <= v) - 1;
            (i, v - offset[i])
        })
        .collect();
    Ok(CanopyTruncation { rooted: comp, coords })
}

/// Component of `v`, reindexed with `v` as root.
pub fn component_of(g: &Graph, v: usize) -> Result<RootedGraph> {
    if v >= g.vertex_count() {
        return Err(Error::invalid(format!("vertex {v} out of range")));
    }
    let vertices = g.ball_vertices(v, usize::MAX);
    Ok(RootedGraph {
        graph: g.induced(&vertices),
        root: 0,
        origin: vertices,
    })
}

pub fn uniform_root_component(g: &Graph, seed: Seed) -> Result<RootedGraph> {
    if g.vertex_count() == 0 {
        return Err(Error::invalid("empty graph has no root"));
    }
    let v = seeded_rng(seed).gen_range(0..g.vertex_count());
    component_of(g, v)
}

/// Largest component, ties to the one holding the smallest vertex index,
/// rooted at its smallest vertex.
pub fn largest_component(g: &Graph) -> Result<RootedGraph> {
    if g.vertex_count() == 0 {
        return Err(Error::invalid("empty graph has no components"));
    }
    let (label, sizes) = g.components();
    // Labels are assigned in order of smallest member, so the first maximum wins ties.
    let best = (0..sizes.len()).fold(0, |b, c| if sizes[c] > sizes[b] { c } else { b });
    let min_vertex = label.iter().position(|&l| l == best).expect("component is nonempty");
    component_of(g, min_vertex)
}

/// Ball plus the map from ball vertices to vertices of `rg` (not to
/// `rg`'s own origin).
pub(crate) fn ball_local(rg: &RootedGraph, k: usize) -> (RootedGraph, Vec<usize>) {
    let vertices = rg.graph.ball_vertices(rg.root, k);
    let origin = vertices.iter().map(|&v| rg.origin[v]).collect();
    let ball = RootedGraph {
        graph: rg.graph.induced(&vertices),
        root: 0,
        origin,
    };
    (ball, vertices)
}

/// Ball of radius `k` around `v` in an unrooted graph.
pub(crate) fn ball_around(g: &Graph, v: usize, k: usize) -> RootedGraph {
    let vertices = g.ball_vertices(v, k);
    RootedGraph {
        graph: g.induced(&vertices),
        root: 0,
        origin: vertices,
    }
}

/// Induced subgraph on vertices within distance `k` of the root.
pub fn ball(rg: &RootedGraph, k: usize) -> RootedGraph {
    ball_local(rg, k).0
}

/// Restriction of a marked graph to the radius-`k` ball.
pub fn marked_ball<M: Clone>(mg: &MarkedGraph<M>, k: usize) -> MarkedGraph<M> {
    let (rooted, local) = ball_local(&mg.rooted, k);
    let marks = local.iter().map(|&v| mg.marks[v].clone()).collect();
    MarkedGraph { rooted, marks }
}

/// Writes the edge-list format: a header `n <count> root <index|none>`
/// followed by one `u v` line per edge.
pub fn write_edge_list<W: Write>(out: &mut W, g: &Graph, root: Option<usize>) -> Result<()> {
    match root {
        Some(r) => writeln!(out, "n {} root {}", g.vertex_count(), r)?,
        None => writeln!(out, "n {} root none", g.vertex_count())?,
    }
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<(Graph, Option<usize>)> {
    let mut lines = input.lines().enumerate();
    let parse_err = |line: usize, message: &str| Error::Parse {
        line: line + 1,
        message: message.to_string(),
    };
    let (_, header) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
    let header = header?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "n" || fields[2] != "root" {
        return Err(parse_err(0, "expected `n <count> root <index|none>`"));
    }
    let n: usize = fields[1].parse().map_err(|_| parse_err(0, "bad vertex count"))?;
    let root = match fields[3] {
        "none" => None,
        r => Some(r.parse::<usize>().map_err(|_| parse_err(0, "bad root"))?),
    };
    let mut edges = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
            _ => return Err(parse_err(i, "expected `u v`")),
        }
    }
    let g = Graph::from_edges(n, &edges)?;
    if let Some(r) = root {
        if r >= n {
            return Err(parse_err(0, "root out of range"));
        }
    }
    Ok((g, root))
}
