//! Arity-two graph machinery: maximum matching via blossom contraction,
//! the disedge test, and the core/star/singleton decomposition driven by
//! the canonical half-integral dual.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lpbounds::{half_integral_dual, HalfIntegralDual, HalfValue, Hypergraph};
use crate::relation::AttrSet;

const NONE: usize = usize::MAX;

/// Simple graph over `0..n` allowing self-loops, stored canonically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut cleaned: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        for &(u, v) in &cleaned {
            if v >= n {
                return Err(Error::InvalidInput(format!("edge ({u},{v}) out of range for n={n}")));
            }
        }
        cleaned.sort_unstable();
        cleaned.dedup();
        Ok(Graph { n, edges: cleaned })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn non_loop_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied().filter(|&(u, v)| u != v)
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.edges.binary_search(&(v, v)).is_ok()
    }

    /// Non-loop neighbors in ascending order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v && b != v {
                Some(b)
            } else if b == v && a != v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    /// Edges as vertex sets: a self-loop contributes the singleton set.
    pub fn edge_sets(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.edges.iter().map(|&(u, v)| if u == v { vec![u] } else { vec![u, v] })
    }

    pub fn to_hypergraph(&self) -> Hypergraph {
        Hypergraph::new(self.n, self.edge_sets().collect()).expect("graph edges are valid")
    }

    /// Subgraph induced by `keep`, renumbered so local vertex `i` is the
    /// `i`-th smallest member of `keep`.
    pub fn induced(&self, keep: &AttrSet) -> Graph {
        let verts: Vec<usize> = keep.iter().copied().collect();
        let local = |v: usize| verts.binary_search(&v).ok();
        let edges = self
            .edges
            .iter()
            .filter_map(|&(u, v)| Some((local(u)?, local(v)?)))
            .collect();
        Graph::new(verts.len(), edges).expect("induced edges in range")
    }

    /// Connected components over non-loop edges, each sorted, ordered by
    /// smallest vertex. Loop-only and isolated vertices form singleton
    /// components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                for w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| vec![u, v]).collect(),
        })
        .expect("graph serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Graph> {
        let raw: GraphJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidInput(format!("malformed graph: {e}")))?;
        let mut edges = Vec::with_capacity(raw.edges.len());
        for e in raw.edges {
            if e.len() != 2 {
                return Err(Error::InvalidInput(format!("edge {e:?} is not a pair")));
            }
            edges.push((e[0], e[1]));
        }
        Graph::new(raw.n, edges)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<Vec<usize>>,
}

/// A matching, as a sorted list of vertex-disjoint non-loop edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub edges: Vec<(usize, usize)>,
}

impl Matching {
    /// Number of matched vertices (twice the edge count).
    pub fn matched_vertex_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn vertices(&self) -> AttrSet {
        self.edges.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    pub fn covers(&self, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| a == v || b == v)
    }
}

/// Blossom-contraction search for a maximum cardinality matching.
struct BlossomState {
    adj: Vec<Vec<usize>>,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
}

impl BlossomState {
    fn new(adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        BlossomState {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let n = self.adj.len();
        let mut marked = vec![false; n];
        loop {
            a = self.base[a];
            marked[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if marked[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize, in_blossom: &mut [bool]) {
        while self.base[v] != b {
            in_blossom[self.base[v]] = true;
            in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_augmenting_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used = vec![false; n];
        self.parent = vec![NONE; n];
        self.base = (0..n).collect();
        self.used[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for i in 0..self.adj[v].len() {
                let to = self.adj[v][i];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    // Odd cycle: contract the blossom.
                    let cur_base = self.lca(v, to);
                    let mut in_blossom = vec![false; n];
                    self.mark_path(v, cur_base, to, &mut in_blossom);
                    self.mark_path(to, cur_base, v, &mut in_blossom);
                    for i in 0..n {
                        if in_blossom[self.base[i]] {
                            self.base[i] = cur_base;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    self.used[self.mate[to]] = true;
                    queue.push_back(self.mate[to]);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }

    fn run(&mut self) -> usize {
        let n = self.adj.len();
        let mut matched = 0;
        for v in 0..n {
            if self.mate[v] == NONE {
                if let Some(end) = self.find_augmenting_path(v) {
                    self.augment(end);
                    matched += 1;
                }
            }
        }
        matched
    }
}

fn matching_number(g: &Graph, excluded: &[bool]) -> usize {
    let mut adj = vec![Vec::new(); g.n];
    for (u, v) in g.non_loop_edges() {
        if !excluded[u] && !excluded[v] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    BlossomState::new(adj).run()
}

/// A maximum-cardinality matching with ties broken toward the
/// lexicographically smallest sorted edge list.
pub fn maximum_matching(g: &Graph) -> Matching {
    let mut excluded = vec![false; g.n];
    let target = matching_number(g, &excluded);
    let mut chosen = Vec::new();
    for (u, v) in g.non_loop_edges() {
        if chosen.len() == target {
            break;
        }
        if excluded[u] || excluded[v] {
            continue;
        }
        excluded[u] = true;
        excluded[v] = true;
        if chosen.len() + 1 + matching_number(g, &excluded) == target {
            chosen.push((u, v));
        } else {
            excluded[u] = false;
            excluded[v] = false;
        }
    }
    Matching { edges: chosen }
}

/// True iff every connected component (ignoring self-loops) has at most
/// two vertices.
pub fn is_disedge(g: &Graph) -> bool {
    g.components().iter().all(|c| c.len() <= 2)
}

/// A star group: one center plus the leaves matched to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: usize,
    pub leaves: Vec<usize>,
}

/// Partition of the vertices into an even core, star groups, and
/// singletons, together with a part-respecting maximum matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub core_vertices: Vec<usize>,
    pub star_groups: Vec<Star>,
    pub singleton_vertices: Vec<usize>,
    pub matching: Matching,
    /// Number of core vertices the matching leaves unmatched.
    pub core_unmatched: usize,
    pub dual: HalfIntegralDual,
}

impl Decomposition {
    pub fn star_vertices(&self) -> AttrSet {
        self.star_groups
            .iter()
            .flat_map(|s| std::iter::once(s.center).chain(s.leaves.iter().copied()))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "core": self.core_vertices,
            "stars": self.star_groups,
            "singletons": self.singleton_vertices,
            "matching": self.matching.edges.iter().map(|&(u, v)| vec![u, v]).collect::<Vec<_>>(),
            "core_unmatched": self.core_unmatched,
        })
    }
}

/// Maximum bipartite matching from `left` into `right` by augmenting paths,
/// deterministic in vertex order. Returns the partner of each left vertex.
fn bipartite_match(g: &Graph, left: &[usize], right: &[usize]) -> Vec<Option<usize>> {
    let right_pos: std::collections::BTreeMap<usize, usize> =
        right.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&l| g.neighbors(l).filter_map(|u| right_pos.get(&u).copied()).collect())
        .collect();
    let mut right_owner = vec![NONE; right.len()];

    fn try_augment(
        l: usize,
        adj: &[Vec<usize>],
        right_owner: &mut [usize],
        visited: &mut [bool],
    ) -> bool {
        for &r in &adj[l] {
            if visited[r] {
                continue;
            }
            visited[r] = true;
            if right_owner[r] == NONE || try_augment(right_owner[r], adj, right_owner, visited) {
                right_owner[r] = l;
                return true;
            }
        }
        false
    }

    for l in 0..left.len() {
        let mut visited = vec![false; right.len()];
        try_augment(l, &adj, &mut right_owner, &mut visited);
    }
    let mut pairs = vec![None; left.len()];
    for (r, &owner) in right_owner.iter().enumerate() {
        if owner != NONE {
            pairs[owner] = Some(right[r]);
        }
    }
    pairs
}

/// Decomposes `g` into core, stars and singletons from the canonical
/// half-integral dual: the core is the set of half-valued vertices, each
/// zero-valued vertex is matched to a one-valued neighbor to form a star,
/// and the remaining one-valued vertices are singletons. The returned
/// matching is a maximum matching of `g` that never crosses parts.
pub fn decompose(g: &Graph) -> Result<Decomposition> {
    let dual = half_integral_dual(g)?;
    let core_vertices: Vec<usize> =
        (0..g.n).filter(|&v| dual.value(v) == HalfValue::Half).collect();
    let zeros: Vec<usize> = (0..g.n).filter(|&v| dual.value(v) == HalfValue::Zero).collect();
    let ones: Vec<usize> = (0..g.n).filter(|&v| dual.value(v) == HalfValue::One).collect();

    // Core matching, computed on the induced subgraph and mapped back.
    let core_set: AttrSet = core_vertices.iter().copied().collect();
    let core_graph = g.induced(&core_set);
    let core_matching = maximum_matching(&core_graph);
    let core_edges: Vec<(usize, usize)> = core_matching
        .edges
        .iter()
        .map(|&(a, b)| (core_vertices[a], core_vertices[b]))
        .collect();

    // Every zero vertex pairs with a distinct one-valued neighbor.
    let pairs = bipartite_match(g, &zeros, &ones);
    let mut star_groups = Vec::new();
    let mut centers = AttrSet::new();
    for (leaf, partner) in zeros.iter().zip(&pairs) {
        let Some(center) = partner else {
            return Err(Error::Internal(format!(
                "zero-valued vertex {leaf} has no distinct one-valued partner"
            )));
        };
        star_groups.push(Star { center: *center, leaves: vec![*leaf] });
        centers.insert(*center);
    }
    star_groups.sort_by_key(|s| s.center);
    let singleton_vertices: Vec<usize> =
        ones.iter().copied().filter(|v| !centers.contains(v)).collect();

    let mut matching_edges = core_edges;
    for star in &star_groups {
        let (a, b) = (star.center.min(star.leaves[0]), star.center.max(star.leaves[0]));
        matching_edges.push((a, b));
    }
    matching_edges.sort_unstable();
    let matching = Matching { edges: matching_edges };

    // The part-respecting matching must still be maximum overall.
    let global = maximum_matching(g);
    if matching.edges.len() != global.edges.len() {
        return Err(Error::Internal(format!(
            "part-respecting matching has {} edges, maximum is {}",
            matching.edges.len(),
            global.edges.len()
        )));
    }
    // Singletons carry no non-loop edge between each other.
    for (i, &a) in singleton_vertices.iter().enumerate() {
        for &b in &singleton_vertices[i + 1..] {
            if g.neighbors(a).any(|w| w == b) {
                return Err(Error::Internal(format!("singletons {a},{b} are adjacent")));
            }
        }
    }

    let core_unmatched = core_vertices.len() - core_matching.matched_vertex_count();
    Ok(Decomposition {
        core_vertices,
        star_groups,
        singleton_vertices,
        matching,
        core_unmatched,
        dual,
    })
}

/// Splits the decomposition's matching into its core part and its star
/// part. An edge crossing parts flags a decomposition bug.
pub fn matching_split(d: &Decomposition) -> Result<(Matching, Matching)> {
    let core: AttrSet = d.core_vertices.iter().copied().collect();
    let star: AttrSet = d.star_vertices();
    let mut m_core = Vec::new();
    let mut m_star = Vec::new();
    for &(u, v) in &d.matching.edges {
        if core.contains(&u) && core.contains(&v) {
            m_core.push((u, v));
        } else if star.contains(&u) && star.contains(&v) {
            m_star.push((u, v));
        } else {
            return Err(Error::Internal(format!("matching edge ({u},{v}) crosses parts")));
        }
    }
    Ok((Matching { edges: m_core }, Matching { edges: m_star }))
}

/// Brute-force maximum matching size by searching all edge subsets; test
/// oracle for small graphs.
pub fn matching_number_exhaustive(g: &Graph) -> usize {
    let edges: Vec<(usize, usize)> = g.non_loop_edges().collect();
    fn go(edges: &[(usize, usize)], used: &mut Vec<bool>, i: usize) -> usize {
        if i == edges.len() {
            return 0;
        }
        let mut best = go(edges, used, i + 1);
        let (u, v) = edges[i];
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            best = best.max(1 + go(edges, used, i + 1));
            used[u] = false;
            used[v] = false;
        }
        best
    }
    go(&edges, &mut vec![false; g.n], 0)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Triangle {0,1,2}, pendant path 0-3-4, self-loop on 5.
    pub fn decomposition_example() -> Graph {
        Graph::new(6, vec![(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (5, 5)]).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()).unwrap()
    }
}
