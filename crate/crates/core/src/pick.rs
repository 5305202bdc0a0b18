//! Case classification for arity-two graphs and the subset-picking
//! procedures: which row of the case table applies for a given radius
//! parameter, the light-regime path picking, the per-row subset choice,
//! and the heavy-light instance decomposition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graphs::{decompose, is_disedge, maximum_matching, Graph};
use crate::rational::{rat, rat_usize, ratio, Rat};
use crate::relation::{naive_join, AttrSet, QueryInstance, Relation};

/// One row of the case table: the applicable row number, the subset size
/// `s = n - delta + 1`, and the predicted exponent of `N` bounding the
/// projected join.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseRow {
    pub row: u8,
    pub s: usize,
    pub predicted_exponent: Rat,
}

/// Classifies `(g, delta)` into the unique applicable row.
///
/// With `m` the matched-vertex count of a maximum matching and `u` the
/// number of core vertices the matching misses, the rows are: `s = 1`;
/// even `s <= m`; odd `s in [3, m-1]` split by the disedge property; then
/// `s in [m+1, m+u]` and `s in [m+u+1, n]`.
pub fn classify_case(g: &Graph, delta: usize) -> Result<CaseRow> {
    if delta == 0 || delta > g.n {
        return Err(Error::Precondition(format!("delta={delta} outside 1..={}", g.n)));
    }
    let s = g.n - delta + 1;
    let m = maximum_matching(g).matched_vertex_count();
    let u = decompose(g)?.core_unmatched;
    let (row, exponent) = if s == 1 {
        (1, rat(1))
    } else if s % 2 == 0 && s <= m {
        (2, ratio(s as i64, 2))
    } else if s % 2 == 1 && (3..m).contains(&s) {
        if is_disedge(g) {
            (4, ratio(s as i64 + 1, 2))
        } else {
            (3, ratio(s as i64, 2))
        }
    } else if s <= m + u {
        (5, ratio(s as i64, 2))
    } else {
        (6, rat_usize(s) - ratio((m + u) as i64, 2))
    };
    Ok(CaseRow { row, s, predicted_exponent: exponent })
}

/// Simple path with exactly `want` vertices inside `comp`, searched from
/// the lowest-index vertex by bounded backtracking; `None` if the budget
/// runs out or no such path exists.
fn find_path(g: &Graph, comp: &[usize], want: usize) -> Option<Vec<usize>> {
    let inside: AttrSet = comp.iter().copied().collect();
    let mut budget = 200_000usize;
    fn dfs(
        g: &Graph,
        inside: &AttrSet,
        path: &mut Vec<usize>,
        on_path: &mut AttrSet,
        want: usize,
        budget: &mut usize,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        if path.len() == want {
            return true;
        }
        let last = *path.last().unwrap();
        for nb in g.neighbors(last) {
            if inside.contains(&nb) && !on_path.contains(&nb) {
                path.push(nb);
                on_path.insert(nb);
                if dfs(g, inside, path, on_path, want, budget) {
                    return true;
                }
                path.pop();
                on_path.remove(&nb);
            }
        }
        false
    }
    for &start in comp {
        let mut path = vec![start];
        let mut on_path: AttrSet = [start].into_iter().collect();
        if dfs(g, &inside, &mut path, &mut on_path, want, &mut budget) {
            return Some(path);
        }
        if budget == 0 {
            return None;
        }
    }
    None
}

/// First `want` vertices in breadth-first order from the component's
/// lowest vertex; always a connected set.
fn bfs_prefix(g: &Graph, comp: &[usize], want: usize) -> Vec<usize> {
    let inside: AttrSet = comp.iter().copied().collect();
    let start = comp[0];
    let mut order = vec![start];
    let mut seen: AttrSet = [start].into_iter().collect();
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if order.len() == want {
            break;
        }
        for nb in g.neighbors(u) {
            if inside.contains(&nb) && !seen.contains(&nb) {
                seen.insert(nb);
                order.push(nb);
                queue.push_back(nb);
                if order.len() == want {
                    break;
                }
            }
        }
    }
    order.truncate(want);
    order
}

/// Light-regime pick: collects `s` vertices component by component in
/// decreasing component size, preferring connected paths, swapping one
/// path endpoint for an edge when a single pick would strand a vertex.
///
/// Requires an odd `s >= 3` on a graph that is not a disedge, with `s` no
/// larger than the number of vertices living in components of size at
/// least two (the matched-vertex count always satisfies this). The result
/// never contains a vertex isolated in its induced subgraph.
pub fn light_picking(g: &Graph, s: usize) -> Result<AttrSet> {
    if is_disedge(g) {
        return Err(Error::Precondition("light picking needs a component of size > 2".into()));
    }
    if s % 2 == 0 {
        return Err(Error::Precondition(format!("light picking needs odd s, got {s}")));
    }
    let paired: usize = g.components().iter().map(|c| c.len()).filter(|&l| l >= 2).sum();
    if !(3..=paired).contains(&s) {
        return Err(Error::Precondition(format!(
            "light picking needs 3 <= s <= {paired}, got {s}"
        )));
    }
    let mut comps = g.components();
    comps.sort_by_key(|c| (usize::MAX - c.len(), c[0]));

    let mut picked: AttrSet = AttrSet::new();
    let mut last_pick: Option<Vec<usize>> = None;
    for comp in &comps {
        if picked.len() == s {
            break;
        }
        let topick = (s - picked.len()).min(comp.len());
        if topick > 1 {
            let chosen = match find_path(g, comp, topick) {
                Some(path) => path,
                None => bfs_prefix(g, comp, topick),
            };
            picked.extend(chosen.iter().copied());
            if chosen.len() > 2 {
                last_pick = Some(chosen);
            }
        } else {
            // One slot left: free a path endpoint and take an edge here so
            // no picked vertex ends up isolated.
            let path = last_pick
                .as_ref()
                .ok_or_else(|| Error::Internal("single pick before any path pick".into()))?;
            let endpoint = *path.last().unwrap();
            picked.remove(&endpoint);
            let edge = comp
                .iter()
                .flat_map(|&u| g.neighbors(u).map(move |v| (u.min(v), u.max(v))))
                .filter(|&(u, v)| comp.binary_search(&u).is_ok() && comp.binary_search(&v).is_ok())
                .min()
                .ok_or_else(|| Error::Internal("component without an edge".into()))?;
            picked.insert(edge.0);
            picked.insert(edge.1);
            break;
        }
    }
    if picked.len() != s {
        return Err(Error::Internal(format!("picked {} vertices, wanted {s}", picked.len())));
    }
    // No picked vertex may be isolated within the induced subgraph.
    for &v in &picked {
        if !g.neighbors(v).any(|u| picked.contains(&u)) {
            return Err(Error::Internal(format!("picked vertex {v} is isolated in the pick")));
        }
    }
    Ok(picked)
}

/// Chooses the size-`s` subset prescribed by the classified row, with
/// deterministic lowest-index tie-breaking.
pub fn pick_subset(g: &Graph, delta: usize) -> Result<(AttrSet, CaseRow)> {
    let case = classify_case(g, delta)?;
    let s = case.s;
    let d = decompose(g)?;
    let matching = &d.matching;
    let matched: AttrSet = matching.vertices();
    let set: AttrSet = match case.row {
        1 => {
            let v = (0..g.n)
                .find(|&v| g.neighbors(v).next().is_some() || g.has_loop(v))
                .unwrap_or(0);
            [v].into_iter().collect()
        }
        2 => matching.edges.iter().take(s / 2).flat_map(|&(a, b)| [a, b]).collect(),
        3 => light_picking(g, s)?,
        4 => {
            let mut set: AttrSet = matching
                .edges
                .iter()
                .take((s - 1) / 2)
                .flat_map(|&(a, b)| [a, b])
                .collect();
            let extra = (0..g.n)
                .find(|v| !set.contains(v))
                .ok_or_else(|| Error::Internal("no vertex left for the odd pick".into()))?;
            set.insert(extra);
            set
        }
        5 => {
            let mut set = matched.clone();
            for &v in d.core_vertices.iter().filter(|v| !matched.contains(v)) {
                if set.len() == s {
                    break;
                }
                set.insert(v);
            }
            set
        }
        _ => {
            let mut set = matched.clone();
            set.extend(d.core_vertices.iter().copied());
            for v in 0..g.n {
                if set.len() == s {
                    break;
                }
                set.insert(v);
            }
            set
        }
    };
    if set.len() != s {
        return Err(Error::Internal(format!(
            "row {} produced {} vertices, wanted {s}",
            case.row,
            set.len()
        )));
    }
    Ok((set, case))
}

/// Split of an arity-two instance into a light instance plus one instance
/// per vertex capturing its heavy values.
#[derive(Debug, Clone)]
pub struct HeavyLightSplit {
    pub light: QueryInstance,
    /// One instance per vertex, in vertex order; the vertex's incident
    /// edges are replaced by a unary relation of its heavy values.
    pub heavy: Vec<(usize, QueryInstance)>,
    pub threshold: usize,
}

/// Default heavy threshold: the integer square root of the size bound.
pub fn default_threshold(q: &QueryInstance) -> Result<usize> {
    let n = q.size_bound().ok_or_else(|| {
        Error::Precondition("instance declares no size bound to derive a threshold from".into())
    })?;
    let mut root = (n as f64).sqrt() as usize;
    while (root + 1) * (root + 1) <= n {
        root += 1;
    }
    while root * root > n {
        root -= 1;
    }
    Ok(root.max(1))
}

/// Processes vertices in ascending order: a value of vertex `h` is heavy
/// when some incident relation currently holds at least `threshold` tuples
/// with that value. Each vertex yields an instance where its incident
/// edges are replaced by the unary heavy-value relation (relations as of
/// that step), after which the heavy values are stripped from the running
/// relations. The stripped instance is the light remainder.
pub fn heavy_light_split(q: &QueryInstance, threshold: usize) -> Result<HeavyLightSplit> {
    if q.max_arity() > 2 {
        return Err(Error::Precondition("heavy-light split needs arity at most two".into()));
    }
    if threshold == 0 {
        return Err(Error::Precondition("threshold must be positive".into()));
    }
    let n = q.attr_count();
    let mut current: Vec<Relation> = q.relations().to_vec();
    let edges = q.edges().to_vec();
    let mut heavy = Vec::new();
    for h in 0..n {
        let mut heavy_values: BTreeSet<u32> = BTreeSet::new();
        for (e, rel) in edges.iter().zip(&current) {
            let Ok(pos) = e.binary_search(&h) else { continue };
            let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
            for row in rel.rows() {
                *counts.entry(row[pos]).or_insert(0) += 1;
            }
            heavy_values
                .extend(counts.into_iter().filter(|&(_, c)| c >= threshold).map(|(v, _)| v));
        }
        // The vertex's instance: a unary relation of its heavy values plus
        // all edges not incident to it, relations as they stand now.
        let mut h_edges = vec![vec![h]];
        let mut h_rels =
            vec![Relation::new(vec![h], heavy_values.iter().map(|&v| vec![v]).collect())?];
        for (e, rel) in edges.iter().zip(&current) {
            if e.binary_search(&h).is_err() {
                h_edges.push(e.clone());
                h_rels.push(rel.clone());
            }
        }
        heavy.push((h, QueryInstance::new(n, q.domains().to_vec(), h_edges, h_rels, None)?));
        // Strip the heavy values from every incident relation.
        for (e, rel) in edges.iter().zip(current.iter_mut()) {
            let Ok(pos) = e.binary_search(&h) else { continue };
            let rows: Vec<Vec<u32>> = rel
                .rows()
                .iter()
                .filter(|row| !heavy_values.contains(&row[pos]))
                .cloned()
                .collect();
            *rel = Relation::new(e.clone(), rows)?;
        }
    }
    let light = QueryInstance::new(n, q.domains().to_vec(), edges, current, None)?;
    Ok(HeavyLightSplit { light, heavy, threshold })
}

/// Checks that the original join output is contained in the union of the
/// split's joins.
pub fn heavy_light_containment(q: &QueryInstance, split: &HeavyLightSplit) -> bool {
    let full = naive_join(q);
    if full.is_empty() {
        return true;
    }
    let light_join = naive_join(&split.light);
    let heavy_joins: Vec<Relation> = split.heavy.iter().map(|(_, qh)| naive_join(qh)).collect();
    full.rows()
        .iter()
        .all(|row| light_join.contains_row(row) || heavy_joins.iter().any(|j| j.contains_row(row)))
}
