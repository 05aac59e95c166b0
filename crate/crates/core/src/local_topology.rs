//! Rooted isomorphism classes, the local metric `d_*`, and neighbourhood
//! statistics used to diagnose local weak convergence.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{ball_around, ball_local, Graph, MarkedGraph, RootedGraph};
use crate::num::Real;
use crate::rng::{derive_seed, Seed};
use crate::Symbol;

/// Largest non-tree rooted graph accepted by [`canonical_code`].
pub const GENERAL_ISO_CAP: usize = 24;
/// Largest non-tree ball for which isomorphisms are enumerated in
/// [`d_star_marked`].
pub const MARKED_ENUMERATION_CAP: usize = 12;
const SEARCH_BUDGET: usize = 200_000;

/// Byte string identifying a rooted graph up to root-preserving isomorphism.
///
/// Trees are encoded as `T` followed by nested parentheses (sorted
/// recursive subtree codes); other graphs as `G`, the vertex count, and the
/// lexicographically smallest adjacency bit string over canonical orderings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BallCode(Vec<u8>);

impl BallCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn canonical_code(rg: &RootedGraph) -> Result<BallCode> {
    canonical_code_with_cap(rg, GENERAL_ISO_CAP)
}

pub fn canonical_code_with_cap(rg: &RootedGraph, cap: usize) -> Result<BallCode> {
    let g = rg.graph();
    if g.edge_count() + 1 == g.vertex_count() {
        // Rooted graphs are connected, so this is a tree.
        let mut code = vec![b'T'];
        code.extend(tree_codes(g, rg.root()).swap_remove(rg.root()));
        return Ok(BallCode(code));
    }
    if g.vertex_count() > cap {
        return Err(Error::IsomorphismTooLarge {
            vertices: g.vertex_count(),
            cap,
        });
    }
    general_code(g, rg.root()).map(BallCode)
}

/// BFS parent pointers and order from `root`.
fn bfs_tree(g: &Graph, root: usize) -> (Vec<usize>, Vec<usize>) {
    let n = g.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    parent[root] = root;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &w in g.neighbors(u) {
            if parent[w] == usize::MAX {
                parent[w] = u;
                order.push(w);
            }
        }
    }
    (parent, order)
}

/// AHU subtree code of every vertex of a tree rooted at `root`.
fn tree_codes(g: &Graph, root: usize) -> Vec<Vec<u8>> {
    let (parent, order) = bfs_tree(g, root);
    let mut codes: Vec<Vec<u8>> = vec![Vec::new(); g.vertex_count()];
    for &v in order.iter().rev() {
        let mut children: Vec<&Vec<u8>> = g
            .neighbors(v)
            .iter()
            .filter(|&&w| parent[w] == v && w != v)
            .map(|&w| &codes[w])
            .collect();
        children.sort();
        let mut code = Vec::with_capacity(2 + children.iter().map(|c| c.len()).sum::<usize>());
        code.push(b'(');
        for c in children {
            code.extend_from_slice(c);
        }
        code.push(b')');
        codes[v] = code;
    }
    codes
}

fn refine(g: &Graph, mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut cell_of = vec![0usize; n];
    loop {
        for (i, cell) in cells.iter().enumerate() {
            for &v in cell {
                cell_of[v] = i;
            }
        }
        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut sigs: Vec<(Vec<usize>, usize)> = cell
                .iter()
                .map(|&v| {
                    let mut counts = vec![0usize; cells.len()];
                    for &w in g.neighbors(v) {
                        counts[cell_of[w]] += 1;
                    }
                    (counts, v)
                })
                .collect();
            sigs.sort();
            let mut start = 0;
            for i in 1..=sigs.len() {
                if i == sigs.len() || sigs[i].0 != sigs[start].0 {
                    next.push(sigs[start..i].iter().map(|s| s.1).collect());
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

/// Every cell is a clique or independent, and every pair of cells is
/// completely joined or disjoint: all refinements share one code.
fn homogeneous(g: &Graph, cells: &[Vec<usize>]) -> bool {
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i..] {
            let mut seen: Option<bool> = None;
            for &u in a {
                for &w in b {
                    if u == w {
                        continue;
                    }
                    let e = g.has_edge(u, w);
                    match seen {
                        None => seen = Some(e),
                        Some(s) if s != e => return false,
                        _ => {}
                    }
                }
            }
        }
    }
    true
}

fn adjacency_bits(g: &Graph, order: &[usize]) -> Vec<u8> {
    let n = order.len();
    let mut out = vec![0u8; (n * (n - 1) / 2).div_ceil(8)];
    let mut bit = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if g.has_edge(order[i], order[j]) {
                out[bit / 8] |= 0x80 >> (bit % 8);
            }
            bit += 1;
        }
    }
    out
}

fn general_code(g: &Graph, root: usize) -> Result<Vec<u8>> {
    let n = g.vertex_count();
    let rest: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut cells = vec![vec![root]];
    if !rest.is_empty() {
        cells.push(rest);
    }
    let mut best: Option<Vec<u8>> = None;
    let mut budget = SEARCH_BUDGET;
    search(g, refine(g, cells), &mut best, &mut budget)?;
    let mut code = vec![b'G', (n >> 8) as u8, n as u8];
    code.extend(best.expect("search visits at least one leaf"));
    Ok(code)
}

fn search(g: &Graph, cells: Vec<Vec<usize>>, best: &mut Option<Vec<u8>>, budget: &mut usize) -> Result<()> {
    if *budget == 0 {
        return Err(Error::SearchBudget(SEARCH_BUDGET));
    }
    *budget -= 1;
    if cells.iter().all(|c| c.len() == 1) || homogeneous(g, &cells) {
        let order: Vec<usize> = cells.iter().flatten().copied().collect();
        let code = adjacency_bits(g, &order);
        if best.as_ref().is_none_or(|b| code < *b) {
            *best = Some(code);
        }
        return Ok(());
    }
    let target = cells.iter().position(|c| c.len() > 1).expect("some cell is not a singleton");
    for &v in &cells[target] {
        let mut next = Vec::with_capacity(cells.len() + 1);
        next.extend_from_slice(&cells[..target]);
        next.push(vec![v]);
        next.push(cells[target].iter().copied().filter(|&w| w != v).collect());
        next.extend_from_slice(&cells[target + 1..]);
        search(g, refine(g, next), best, budget)?;
    }
    Ok(())
}

/// Root-preserving isomorphism test.
pub fn rooted_isomorphic(a: &RootedGraph, b: &RootedGraph) -> Result<bool> {
    if a.vertex_count() != b.vertex_count() || a.graph().edge_count() != b.graph().edge_count() {
        return Ok(false);
    }
    let (mut da, mut db) = (a.graph().degrees(), b.graph().degrees());
    if a.graph().degree(a.root()) != b.graph().degree(b.root()) {
        return Ok(false);
    }
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Ok(false);
    }
    Ok(canonical_code(a)? == canonical_code(b)?)
}

/// Truncated value of an infinite series: the true value lies in
/// `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

fn tail_sum(from: usize, to: usize) -> f64 {
    (from..=to).map(|k| 0.5f64.powi(k as i32)).sum()
}

/// `d_*` between unmarked rooted graphs, summed over radii `1..=k_max`.
pub fn d_star_unmarked(a: &RootedGraph, b: &RootedGraph, k_max: usize) -> Result<Interval> {
    let mut lower = 0.0;
    for k in 1..=k_max {
        let (ba, _) = ball_local(a, k);
        let (bb, _) = ball_local(b, k);
        if !rooted_isomorphic(&ba, &bb)? {
            // B_k determines B_j for j < k, so the mismatch persists upward.
            lower += tail_sum(k, k_max);
            break;
        }
        if ba.vertex_count() == a.vertex_count() && bb.vertex_count() == b.vertex_count() {
            break;
        }
    }
    Ok(Interval {
        lower,
        upper: lower + 0.5f64.powi(k_max as i32),
    })
}

/// Distance on a mark space.
pub trait MarkDistance {
    fn mark_distance(&self, other: &Self) -> f64;
}

impl MarkDistance for Symbol {
    fn mark_distance(&self, other: &Self) -> f64 {
        if self == other {
            0.0
        } else {
            1.0
        }
    }
}

impl<T: Real> MarkDistance for Vec<T> {
    fn mark_distance(&self, other: &Self) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.iter()
            .zip(other)
            .map(|(&x, &y)| (x - y).as_f64().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Marked `d_*`: per radius, `2^-k * min(1, inf_phi max_v d(x_v, y_phi(v)))`
/// with the infimum over root-preserving isomorphisms of the balls.
pub fn d_star_marked<M: MarkDistance>(a: &MarkedGraph<M>, b: &MarkedGraph<M>, k_max: usize) -> Result<Interval> {
    let mut lower = 0.0;
    for k in 1..=k_max {
        let (ba, la) = ball_local(a.rooted(), k);
        let (bb, lb) = ball_local(b.rooted(), k);
        if !rooted_isomorphic(&ba, &bb)? {
            lower += tail_sum(k, k_max);
            break;
        }
        let ma: Vec<&M> = la.iter().map(|&v| &a.marks()[v]).collect();
        let mb: Vec<&M> = lb.iter().map(|&v| &b.marks()[v]).collect();
        let best = min_max_mark_distance(&ba, &ma, &bb, &mb)?;
        let term = best.min(1.0);
        if ba.vertex_count() == a.rooted().vertex_count() && bb.vertex_count() == b.rooted().vertex_count() {
            lower += term * tail_sum(k, k_max);
            break;
        }
        lower += term * 0.5f64.powi(k as i32);
    }
    Ok(Interval {
        lower,
        upper: lower + 0.5f64.powi(k_max as i32),
    })
}

/// Infimum over isomorphisms `a -> b` of the largest mark discrepancy.
/// The graphs must be isomorphic.
fn min_max_mark_distance<M: MarkDistance>(a: &RootedGraph, ma: &[&M], b: &RootedGraph, mb: &[&M]) -> Result<f64> {
    if a.graph().is_tree() {
        let ca = tree_codes(a.graph(), a.root());
        let cb = tree_codes(b.graph(), b.root());
        let (pa, _) = bfs_tree(a.graph(), a.root());
        let (pb, _) = bfs_tree(b.graph(), b.root());
        let ctx = TreeMatch {
            a: a.graph(),
            b: b.graph(),
            pa: &pa,
            pb: &pb,
            ca: &ca,
            cb: &cb,
            ma,
            mb,
        };
        return Ok(ctx.cost(a.root(), b.root()));
    }
    if a.vertex_count() > MARKED_ENUMERATION_CAP {
        return Err(Error::IsomorphismTooLarge {
            vertices: a.vertex_count(),
            cap: MARKED_ENUMERATION_CAP,
        });
    }
    let mut search = IsoEnumeration::new(a, b, ma, mb);
    search.run();
    search
        .best
        .ok_or_else(|| Error::Diagnostic("isomorphic balls admitted no isomorphism".into()))
}

struct TreeMatch<'a, M> {
    a: &'a Graph,
    b: &'a Graph,
    pa: &'a [usize],
    pb: &'a [usize],
    ca: &'a [Vec<u8>],
    cb: &'a [Vec<u8>],
    ma: &'a [&'a M],
    mb: &'a [&'a M],
}

impl<M: MarkDistance> TreeMatch<'_, M> {
    fn children(g: &Graph, parent: &[usize], codes: &[Vec<u8>], v: usize) -> Vec<usize> {
        let mut c: Vec<usize> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| parent[w] == v && w != v)
            .collect();
        c.sort_by(|&x, &y| codes[x].cmp(&codes[y]));
        c
    }

    fn cost(&self, u: usize, w: usize) -> f64 {
        let mut worst = self.ma[u].mark_distance(self.mb[w]);
        let cu = Self::children(self.a, self.pa, self.ca, u);
        let cw = Self::children(self.b, self.pb, self.cb, w);
        let mut start = 0;
        while start < cu.len() {
            let mut end = start + 1;
            while end < cu.len() && self.ca[cu[end]] == self.ca[cu[start]] {
                end += 1;
            }
            let matrix: Vec<Vec<f64>> = (start..end)
                .map(|i| (start..end).map(|j| self.cost(cu[i], cw[j])).collect())
                .collect();
            worst = worst.max(bottleneck_assignment(&matrix));
            start = end;
        }
        worst
    }
}

/// Smallest threshold admitting a perfect matching using only entries at
/// or below it.
fn bottleneck_assignment(cost: &[Vec<f64>]) -> f64 {
    let m = cost.len();
    if m == 0 {
        return 0.0;
    }
    let mut values: Vec<f64> = cost.iter().flatten().copied().collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let (mut lo, mut hi) = (0usize, values.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(cost, values[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    values[lo]
}

fn has_perfect_matching(cost: &[Vec<f64>], threshold: f64) -> bool {
    let m = cost.len();
    let mut match_right = vec![usize::MAX; m];
    fn augment(i: usize, cost: &[Vec<f64>], t: f64, seen: &mut [bool], mr: &mut [usize]) -> bool {
        for j in 0..cost.len() {
            if cost[i][j] <= t && !seen[j] {
                seen[j] = true;
                if mr[j] == usize::MAX || augment(mr[j], cost, t, seen, mr) {
                    mr[j] = i;
                    return true;
                }
            }
        }
        false
    }
    (0..m).all(|i| augment(i, cost, threshold, &mut vec![false; m], &mut match_right))
}

struct IsoEnumeration<'a, M> {
    a: &'a Graph,
    b: &'a Graph,
    ma: &'a [&'a M],
    mb: &'a [&'a M],
    order: Vec<usize>,
    da: Vec<usize>,
    db: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    best: Option<f64>,
}

impl<'a, M: MarkDistance> IsoEnumeration<'a, M> {
    fn new(a: &'a RootedGraph, b: &'a RootedGraph, ma: &'a [&'a M], mb: &'a [&'a M]) -> Self {
        let dist = |g: &RootedGraph| -> Vec<usize> {
            g.graph()
                .bfs_distances(g.root(), usize::MAX)
                .into_iter()
                .map(|d| d.unwrap_or(usize::MAX))
                .collect()
        };
        let (_, order) = bfs_tree(a.graph(), a.root());
        let n = a.vertex_count();
        IsoEnumeration {
            a: a.graph(),
            b: b.graph(),
            ma,
            mb,
            order,
            da: dist(a),
            db: dist(b),
            map: vec![usize::MAX; n],
            used: vec![false; n],
            best: None,
        }
    }

    fn run(&mut self) {
        self.extend(0, 0.0);
    }

    fn extend(&mut self, depth: usize, current: f64) {
        if self.best.is_some_and(|b| current >= b) {
            return;
        }
        if depth == self.order.len() {
            self.best = Some(current);
            return;
        }
        let u = self.order[depth];
        for w in 0..self.b.vertex_count() {
            if self.used[w] || self.da[u] != self.db[w] || self.a.degree(u) != self.b.degree(w) {
                continue;
            }
            let consistent = self.order[..depth]
                .iter()
                .all(|&x| self.a.has_edge(u, x) == self.b.has_edge(w, self.map[x]));
            if !consistent {
                continue;
            }
            let d = current.max(self.ma[u].mark_distance(self.mb[w]));
            self.map[u] = w;
            self.used[w] = true;
            self.extend(depth + 1, d);
            self.used[w] = false;
            self.map[u] = usize::MAX;
        }
    }
}

/// Counts of radius-`r` ball types.
#[derive(Clone, Debug, PartialEq)]
pub struct BallHistogram {
    pub radius: usize,
    pub counts: BTreeMap<BallCode, u64>,
    pub total: u64,
}

impl BallHistogram {
    pub fn from_codes(radius: usize, codes: impl IntoIterator<Item = BallCode>) -> Self {
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for c in codes {
            *counts.entry(c).or_insert(0) += 1;
            total += 1;
        }
        BallHistogram { radius, counts, total }
    }

    pub fn frequency(&self, code: &BallCode) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts.get(code).copied().unwrap_or(0) as f64 / self.total as f64
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "code_hex,count")?;
        for (code, count) in &self.counts {
            writeln!(out, "{},{}", code.to_hex(), count)?;
        }
        Ok(())
    }
}

/// Histogram of `B_r(C_v(g))` over every vertex `v`.
pub fn neighborhood_histogram(g: &Graph, r: usize) -> Result<BallHistogram> {
    neighborhood_histogram_with_cap(g, r, GENERAL_ISO_CAP)
}

/// As [`neighborhood_histogram`], with the size cap for balls that are not
/// trees.
pub fn neighborhood_histogram_with_cap(g: &Graph, r: usize, cap: usize) -> Result<BallHistogram> {
    let partial = (0..g.vertex_count())
        .into_par_iter()
        .try_fold(HashMap::new, |mut acc: HashMap<BallCode, u64>, v| {
            *acc.entry(canonical_code_with_cap(&ball_around(g, v, r), cap)?).or_insert(0) += 1;
            Ok::<_, Error>(acc)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
            Ok(a)
        })?;
    Ok(BallHistogram {
        radius: r,
        total: g.vertex_count() as u64,
        counts: partial.into_iter().collect(),
    })
}

/// Total variation between the normalised histograms.
pub fn histogram_tv(a: &BallHistogram, b: &BallHistogram) -> Result<f64> {
    if a.radius != b.radius {
        return Err(Error::Mismatch(format!("histogram radii {} and {}", a.radius, b.radius)));
    }
    let mut sum = 0.0;
    let mut keys: Vec<&BallCode> = a.counts.keys().chain(b.counts.keys()).collect();
    keys.sort();
    keys.dedup();
    for code in keys {
        sum += (a.frequency(code) - b.frequency(code)).abs();
    }
    Ok(0.5 * sum)
}

/// Histogram of radius-`r` balls of `n_samples` draws from a limit sampler.
pub fn sampled_histogram<F>(sampler: &F, r: usize, n_samples: usize, seed: Seed) -> Result<BallHistogram>
where
    F: Fn(Seed) -> RootedGraph + Sync,
{
    let codes = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let rg = sampler(derive_seed(seed, i as u64));
            canonical_code(&ball_local(&rg, r).0)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BallHistogram::from_codes(r, codes))
}

/// TV distance between the neighbourhood histogram of `g` and a Monte
/// Carlo histogram of the limit sampler.
pub fn lw_deficiency<F>(g: &Graph, limit_ball_sampler: &F, r: usize, n_samples: usize, seed: Seed) -> Result<f64>
where
    F: Fn(Seed) -> RootedGraph + Sync,
{
    let observed = neighborhood_histogram(g, r)?;
    let limit = sampled_histogram(limit_ball_sampler, r, n_samples, seed)?;
    histogram_tv(&observed, &limit)
}

/// Largest gap in mean value over a battery of bounded test functionals,
/// evaluated on two samples of marked rooted graphs.
pub fn battery_discrepancy<M>(
    a: &[MarkedGraph<M>],
    b: &[MarkedGraph<M>],
    battery: &[&(dyn Fn(&MarkedGraph<M>) -> f64 + Sync)],
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("battery comparison needs nonempty samples"));
    }
    let mean = |xs: &[MarkedGraph<M>], f: &dyn Fn(&MarkedGraph<M>) -> f64| {
        xs.iter().map(|x| f(x).clamp(-1.0, 1.0)).sum::<f64>() / xs.len() as f64
    };
    Ok(battery
        .iter()
        .map(|f| (mean(a, *f) - mean(b, *f)).abs())
        .fold(0.0, f64::max))
}

/// Root-mark indicators and neighbour-mark frequencies for symbol marks.
pub fn symbol_battery(alphabet_size: usize) -> Vec<Box<dyn Fn(&MarkedGraph<Symbol>) -> f64 + Sync>> {
    let mut out: Vec<Box<dyn Fn(&MarkedGraph<Symbol>) -> f64 + Sync>> = Vec::new();
    for s in 0..alphabet_size as Symbol {
        out.push(Box::new(move |mg: &MarkedGraph<Symbol>| {
            f64::from(u8::from(mg.marks()[mg.rooted().root()] == s))
        }));
        out.push(Box::new(move |mg: &MarkedGraph<Symbol>| {
            let rg = mg.rooted();
            let nb = rg.graph().neighbors(rg.root());
            if nb.is_empty() {
                return 0.0;
            }
            nb.iter().filter(|&&w| mg.marks()[w] == s).count() as f64 / nb.len() as f64
        }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{gen_regular_tree, Graph};

    fn rooted(n: usize, edges: &[(usize, usize)], root: usize) -> RootedGraph {
        RootedGraph::new(Graph::from_edges(n, edges).unwrap(), root).unwrap()
    }

    #[test]
    fn single_vertex_code_is_fixed() {
        assert_eq!(canonical_code(&RootedGraph::trivial()).unwrap().as_bytes(), b"T()");
    }

    #[test]
    fn path_rooted_at_center_differs_from_end() {
        let center = rooted(3, &[(0, 1), (1, 2)], 1);
        let end = rooted(3, &[(0, 1), (1, 2)], 0);
        assert_ne!(canonical_code(&center).unwrap(), canonical_code(&end).unwrap());
        assert!(!rooted_isomorphic(&center, &end).unwrap());
    }

    #[test]
    fn relabelled_trees_share_codes() {
        let t = gen_regular_tree(3, 2).unwrap();
        let n = t.vertex_count();
        let perm: Vec<usize> = (0..n).map(|v| (v * 7 + 3) % n).collect();
        let edges: Vec<_> = t.graph().edges().map(|(u, v)| (perm[u], perm[v])).collect();
        let relabelled = rooted(n, &edges, perm[t.root()]);
        assert!(rooted_isomorphic(&t, &relabelled).unwrap());
    }

    #[test]
    fn general_graph_codes() {
        let tri_a = rooted(3, &[(0, 1), (1, 2), (0, 2)], 0);
        let tri_b = rooted(3, &[(0, 1), (1, 2), (0, 2)], 2);
        assert!(rooted_isomorphic(&tri_a, &tri_b).unwrap());
        // Triangle with pendant: root on the pendant vs on the triangle.
        let e = [(0, 1), (1, 2), (2, 0), (2, 3)];
        let a = rooted(4, &e, 3);
        let b = rooted(4, &e, 0);
        let c = rooted(4, &e, 1);
        assert!(!rooted_isomorphic(&a, &b).unwrap());
        assert!(rooted_isomorphic(&b, &c).unwrap());
    }

    #[test]
    fn symmetric_dense_graphs_stay_fast() {
        // K_{11,12} plus a root joined to everything.
        let mut edges = Vec::new();
        for i in 1..12 {
            for j in 12..24 {
                edges.push((i, j));
            }
        }
        for v in 1..24 {
            edges.push((0, v));
        }
        let g = rooted(24, &edges, 0);
        assert!(canonical_code(&g).is_ok());
        let big = rooted(25, &(0..25).map(|v| (v, (v + 1) % 25)).collect::<Vec<_>>(), 0);
        assert!(matches!(canonical_code(&big), Err(Error::IsomorphismTooLarge { .. })));
    }

    #[test]
    fn d_star_examples() {
        let single = RootedGraph::trivial();
        let edge = rooted(2, &[(0, 1)], 0);
        let d = d_star_unmarked(&single, &edge, 10).unwrap();
        assert!((d.lower - 1023.0 / 1024.0).abs() < 1e-15);
        assert!((d.upper - d.lower - 1.0 / 1024.0).abs() < 1e-15);
        let same = d_star_unmarked(&edge, &edge, 6).unwrap();
        assert_eq!(same.lower, 0.0);
        assert_eq!(same.upper, 1.0 / 64.0);
        let t5 = gen_regular_tree(3, 5).unwrap();
        let t7 = gen_regular_tree(3, 7).unwrap();
        let d = d_star_unmarked(&t5, &t7, 4).unwrap();
        assert_eq!((d.lower, d.upper), (0.0, 1.0 / 16.0));
        let d = d_star_unmarked(&t5, &t7, 8).unwrap();
        assert!(d.lower > 0.0);
    }

    #[test]
    fn d_star_marked_examples() {
        let t = gen_regular_tree(3, 3).unwrap();
        let n = t.vertex_count();
        let base: Vec<Vec<f64>> = (0..n).map(|v| vec![v as f64 * 0.01]).collect();
        let a = MarkedGraph::new(t.clone(), base.clone()).unwrap();
        let same = d_star_marked(&a, &a, 5).unwrap();
        assert_eq!(same.lower, 0.0);

        let eps = 0.3;
        let shifted: Vec<Vec<f64>> = base.iter().map(|m| vec![m[0] + eps]).collect();
        let b = MarkedGraph::new(t.clone(), shifted).unwrap();
        let k_max = 6;
        let d = d_star_marked(&a, &b, k_max).unwrap();
        assert!((d.lower - eps * (1.0 - 0.5f64.powi(k_max as i32))).abs() < 1e-12);

        // Only a depth-3 vertex differs; radii 1 and 2 see nothing.
        let p = rooted(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], 0);
        let m1: Vec<Symbol> = vec![0, 0, 0, 0, 0];
        let mut m2 = m1.clone();
        m2[3] = 1;
        let x = MarkedGraph::new(p.clone(), m1).unwrap();
        let y = MarkedGraph::new(p, m2).unwrap();
        let d = d_star_marked(&x, &y, 2).unwrap();
        assert_eq!((d.lower, d.upper), (0.0, 0.25));
    }

    #[test]
    fn marked_distance_uses_best_isomorphism() {
        // Star with two leaves: swapping leaf marks is free.
        let s = rooted(3, &[(0, 1), (0, 2)], 0);
        let a = MarkedGraph::new(s.clone(), vec![0 as Symbol, 1, 2]).unwrap();
        let b = MarkedGraph::new(s.clone(), vec![0 as Symbol, 2, 1]).unwrap();
        assert_eq!(d_star_marked(&a, &b, 3).unwrap().lower, 0.0);
        // Same on a triangle (non-tree enumeration path).
        let tri = rooted(3, &[(0, 1), (1, 2), (0, 2)], 0);
        let a = MarkedGraph::new(tri.clone(), vec![0 as Symbol, 1, 2]).unwrap();
        let b = MarkedGraph::new(tri, vec![0 as Symbol, 2, 1]).unwrap();
        assert_eq!(d_star_marked(&a, &b, 3).unwrap().lower, 0.0);
    }

    #[test]
    fn histogram_examples() {
        let h = neighborhood_histogram(&Graph::empty(5), 1).unwrap();
        assert_eq!(h.counts.len(), 1);
        assert_eq!(h.total, 5);
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let h = neighborhood_histogram(&tri, 1).unwrap();
        assert_eq!(h.counts.values().copied().collect::<Vec<_>>(), vec![3]);
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let h = neighborhood_histogram(&p4, 1).unwrap();
        assert_eq!(h.counts.values().copied().collect::<Vec<_>>(), vec![2, 2]);
    }

    #[test]
    fn tv_examples() {
        let code = |s: &[u8]| BallCode(s.to_vec());
        let ab = BallHistogram::from_codes(1, vec![code(b"A"), code(b"B")]);
        let aa = BallHistogram::from_codes(1, vec![code(b"A"), code(b"A")]);
        let cc = BallHistogram::from_codes(1, vec![code(b"C")]);
        assert_eq!(histogram_tv(&ab, &ab).unwrap(), 0.0);
        assert_eq!(histogram_tv(&ab, &cc).unwrap(), 1.0);
        assert_eq!(histogram_tv(&ab, &aa).unwrap(), 0.5);
        let other = BallHistogram::from_codes(2, vec![code(b"A")]);
        assert!(matches!(histogram_tv(&ab, &other), Err(Error::Mismatch(_))));
    }

    #[test]
    fn deficiency_against_deterministic_limit() {
        let sampler = |_s: Seed| RootedGraph::trivial();
        assert_eq!(lw_deficiency(&Graph::empty(7), &sampler, 2, 50, 1).unwrap(), 0.0);
    }

    #[test]
    fn csv_output() {
        let h = neighborhood_histogram(&Graph::empty(2), 0).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "code_hex,count\n542829,2\n");
    }
}
