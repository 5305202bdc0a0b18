//! Exact-rational LP bounds: fractional edge cover (AGM), the polymatroid
//! degree bound (PMB), the fractional-matching dual with half-integral
//! extraction, and the covering/packing LP pair used for general arity.
//!
//! All objectives are exponents of the relation-size budget `N`: a report
//! objective of `3/2` means a bound of `N^{3/2}`. Degree-constraint bounds
//! are likewise carried as exponents (`1` for `N`, `1/2` for `sqrt(N)`).

pub mod simplex;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};


use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::rational::{is_half_integral_value, rat, rat_to_string, rat_usize, ratio, Rat};
use crate::relation::AttrSet;

pub use simplex::{solve_lp, Cmp, Constraint, LinearProgram, LpSolution};

/// A hypergraph over vertices `0..n`; edges are sorted vertex sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut cleaned = Vec::with_capacity(edges.len());
        for e in edges {
            let mut e: Vec<usize> = e;
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::InvalidInput("empty hyperedge".into()));
            }
            if *e.last().unwrap() >= n {
                return Err(Error::InvalidInput(format!("edge {e:?} out of range for n={n}")));
            }
            cleaned.push(e);
        }
        cleaned.sort();
        cleaned.dedup();
        Ok(Hypergraph { n, edges: cleaned })
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edges_at(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.binary_search(&v).is_ok())
            .map(|(i, _)| i)
    }

    pub fn covers_vertex(&self, v: usize) -> bool {
        self.edges_at(v).next().is_some()
    }
}

/// Which program produced a [`BoundReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundKind {
    Agm,
    Pmb,
    LpLb,
    LpUb,
    LpUbStar,
    FecDual,
}

/// An LP objective (as an exponent of `N`) plus the witness solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub objective: Rat,
    pub solution: BTreeMap<String, Rat>,
}

impl BoundReport {
    pub fn to_json(&self) -> serde_json::Value {
        let solution: BTreeMap<String, String> =
            self.solution.iter().map(|(k, v)| (k.clone(), rat_to_string(v))).collect();
        serde_json::json!({
            "kind": serde_json::to_value(self.kind).unwrap(),
            "objective": rat_to_string(&self.objective),
            "solution": solution,
        })
    }
}

fn edge_var_name(index: usize) -> String {
    format!("x[{index}]")
}

fn vertex_var_name(index: usize) -> String {
    format!("y[{index}]")
}

/// Fractional edge cover bound on the vertices of `s`: minimize the total
/// edge weight subject to weight at least one across each vertex of `s`.
pub fn agm_bound(h: &Hypergraph, s: &AttrSet) -> Result<BoundReport> {
    for &v in s {
        if v >= h.n {
            return Err(Error::InvalidInput(format!("vertex {v} out of range")));
        }
        if !h.covers_vertex(v) {
            return Err(Error::Infeasible(format!("vertex {v} lies in no edge")));
        }
    }
    let lp = LinearProgram {
        num_vars: h.edges.len(),
        maximize: false,
        objective: (0..h.edges.len()).map(|j| (j, rat(1))).collect(),
        constraints: s
            .iter()
            .map(|&v| {
                Constraint::new(h.edges_at(v).map(|j| (j, rat(1))).collect(), Cmp::Ge, rat(1))
            })
            .collect(),
    };
    let sol = solve_lp(&lp)?;
    Ok(BoundReport {
        kind: BoundKind::Agm,
        objective: sol.objective,
        solution: sol
            .values
            .into_iter()
            .enumerate()
            .map(|(j, v)| (edge_var_name(j), v))
            .collect(),
    })
}

/// Dual of the fractional edge cover on `s`: maximize the vertex weights
/// subject to total weight at most one inside every edge (restricted to
/// `s`). Weights are additionally capped at one so the program stays
/// bounded on vertices no edge touches.
pub fn fec_dual(h: &Hypergraph, s: &AttrSet) -> Result<BoundReport> {
    let vars: Vec<usize> = s.iter().copied().collect();
    let position: BTreeMap<usize, usize> =
        vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut constraints: Vec<Constraint> = h
        .edges
        .iter()
        .filter_map(|e| {
            let coeffs: Vec<(usize, Rat)> = e
                .iter()
                .filter_map(|v| position.get(v).map(|&i| (i, rat(1))))
                .collect();
            if coeffs.is_empty() {
                None
            } else {
                Some(Constraint::new(coeffs, Cmp::Le, rat(1)))
            }
        })
        .collect();
    for i in 0..vars.len() {
        constraints.push(Constraint::new(vec![(i, rat(1))], Cmp::Le, rat(1)));
    }
    let lp = LinearProgram {
        num_vars: vars.len(),
        maximize: true,
        objective: (0..vars.len()).map(|i| (i, rat(1))).collect(),
        constraints,
    };
    let sol = solve_lp(&lp)?;
    Ok(BoundReport {
        kind: BoundKind::FecDual,
        objective: sol.objective,
        solution: vars
            .iter()
            .zip(sol.values)
            .map(|(&v, val)| (vertex_var_name(v), val))
            .collect(),
    })
}

// --- degree constraints and PMB --------------------------------------------

/// A degree constraint `(X, Y, N^exponent)` guarded by one edge: within the
/// guard relation, each `X`-value extends to at most `N^exponent` distinct
/// `Y`-projections. Cardinality constraints are the `X = {}` case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeConstraint {
    pub x: AttrSet,
    pub y: AttrSet,
    /// Bound as an exponent of `N`: `1` for `N`, `1/2` for `sqrt(N)`.
    pub exponent: Rat,
    pub guard: usize,
}

impl DegreeConstraint {
    pub fn cardinality(guard: usize, edge: &[usize]) -> Self {
        DegreeConstraint {
            x: AttrSet::new(),
            y: edge.iter().copied().collect(),
            exponent: rat(1),
            guard,
        }
    }

    pub fn sqrt_degree(from: usize, to: usize, guard: usize) -> Self {
        DegreeConstraint {
            x: [from].into_iter().collect(),
            y: [from, to].into_iter().collect(),
            exponent: ratio(1, 2),
            guard,
        }
    }

    fn validate(&self, h: &Hypergraph) -> Result<()> {
        if self.guard >= h.edges.len() {
            return Err(Error::InvalidInput(format!("guard edge {} out of range", self.guard)));
        }
        let guard: AttrSet = h.edges[self.guard].iter().copied().collect();
        if !self.x.is_subset(&self.y) || self.x == self.y {
            return Err(Error::InvalidInput("degree constraint needs X strictly inside Y".into()));
        }
        if !self.y.is_subset(&guard) {
            return Err(Error::InvalidInput(format!(
                "degree constraint target {:?} not guarded by edge {:?}",
                self.y, h.edges[self.guard]
            )));
        }
        Ok(())
    }
}

fn degree_constraint_graph_is_acyclic(s: &AttrSet, dcs: &[DegreeConstraint]) -> bool {
    // Directed graph on s with an arc x -> y per constraint pair.
    let verts: Vec<usize> = s.iter().copied().collect();
    let pos: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); verts.len()];
    for dc in dcs {
        for &x in dc.x.iter().filter(|v| s.contains(v)) {
            for y in dc.y.difference(&dc.x).filter(|v| s.contains(v)) {
                adj[pos[&x]].push(pos[y]);
            }
        }
    }
    // Iterative DFS three-coloring.
    let mut color = vec![0u8; verts.len()];
    for start in 0..verts.len() {
        if color[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        color[start] = 1;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next < adj[u].len() {
                let w = adj[u][*next];
                *next += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            } else {
                color[u] = 2;
                stack.pop();
            }
        }
    }
    true
}

/// Polymatroid degree bound on `s` in the log scale: minimize the weighted
/// degree-constraint mix that covers every vertex of `s`.
///
/// Cardinality constraints (exponent 1) for every edge are always included;
/// `extra` adds proper degree constraints on top. The LP is only a valid
/// bound when the degree-constraint graph is acyclic, so a cyclic graph is
/// rejected and the caller is expected to prune (see
/// [`tree_degree_constraints`]).
pub fn pmb_bound(
    h: &Hypergraph,
    s: &AttrSet,
    extra: &[DegreeConstraint],
) -> Result<BoundReport> {
    for &v in s {
        if v >= h.n {
            return Err(Error::InvalidInput(format!("vertex {v} out of range")));
        }
    }
    let mut dcs: Vec<DegreeConstraint> = h
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| DegreeConstraint::cardinality(i, e))
        .collect();
    for dc in extra {
        dc.validate(h)?;
        dcs.push(dc.clone());
    }
    if !degree_constraint_graph_is_acyclic(s, &dcs) {
        return Err(Error::Precondition(
            "degree-constraint graph is cyclic; prune constraints to an acyclic orientation first"
                .into(),
        ));
    }
    for &v in s {
        let covered = dcs.iter().any(|dc| dc.y.contains(&v) && !dc.x.contains(&v));
        if !covered {
            return Err(Error::Infeasible(format!("vertex {v} not covered by any constraint")));
        }
    }
    let lp = LinearProgram {
        num_vars: dcs.len(),
        maximize: false,
        objective: dcs.iter().enumerate().map(|(j, dc)| (j, dc.exponent.clone())).collect(),
        constraints: s
            .iter()
            .map(|&v| {
                Constraint::new(
                    dcs.iter()
                        .enumerate()
                        .filter(|(_, dc)| dc.y.contains(&v) && !dc.x.contains(&v))
                        .map(|(j, _)| (j, rat(1)))
                        .collect(),
                    Cmp::Ge,
                    rat(1),
                )
            })
            .collect(),
    };
    let sol = solve_lp(&lp)?;
    Ok(BoundReport {
        kind: BoundKind::Pmb,
        objective: sol.objective,
        solution: sol
            .values
            .into_iter()
            .enumerate()
            .map(|(j, v)| (format!("delta[{j}]"), v))
            .collect(),
    })
}

/// Checks the subadditivity of PMB across a decomposition: the bound on the
/// whole is at most the sum of the bounds on the parts. Cardinality-only
/// constraints on each side.
pub fn pmb_union_check(
    whole: (&Hypergraph, &AttrSet),
    parts: &[(Hypergraph, AttrSet)],
) -> Result<bool> {
    let union: AttrSet = parts.iter().flat_map(|(_, s)| s.iter().copied()).collect();
    if &union != whole.1 {
        return Err(Error::Precondition("part attribute sets do not union to the whole".into()));
    }
    let lhs = pmb_bound(whole.0, whole.1, &[])?.objective;
    let mut rhs = rat(0);
    for (h, s) in parts {
        rhs += pmb_bound(h, s, &[])?.objective;
    }
    Ok(lhs <= rhs)
}

/// Degree constraints for the light regime, pruned to an acyclic
/// orientation: one BFS tree per component of the subgraph induced by `s`,
/// with a half-exponent constraint oriented along every tree edge except
/// the root's first child edge (whose cardinality constraint pays for the
/// root).
pub fn tree_degree_constraints(g: &Graph, s: &AttrSet) -> Result<Vec<DegreeConstraint>> {
    let h = g.to_hypergraph();
    let edge_index = |u: usize, v: usize| -> Option<usize> {
        let key = if u <= v { vec![u, v] } else { vec![v, u] };
        h.edges().iter().position(|e| *e == key)
    };
    let mut out = Vec::new();
    let mut visited: AttrSet = AttrSet::new();
    for &root in s {
        if visited.contains(&root) {
            continue;
        }
        // BFS over the induced subgraph.
        let mut queue = std::collections::VecDeque::from([root]);
        visited.insert(root);
        let mut tree_edges: Vec<(usize, usize)> = Vec::new();
        while let Some(u) = queue.pop_front() {
            for v in g.neighbors(u) {
                if s.contains(&v) && !visited.contains(&v) {
                    visited.insert(v);
                    tree_edges.push((u, v));
                    queue.push_back(v);
                }
            }
        }
        // The first tree edge stays a cardinality constraint; the rest are
        // oriented parent-to-child at exponent one half.
        for &(u, v) in tree_edges.iter().skip(1) {
            let guard = edge_index(u, v).ok_or_else(|| {
                Error::Internal(format!("tree edge ({u},{v}) missing from hypergraph"))
            })?;
            out.push(DegreeConstraint::sqrt_degree(u, v, guard));
        }
    }
    Ok(out)
}

// --- half-integral dual and its canonical construction ----------------------

/// A vertex value of the canonical optimal fractional-matching dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfValue {
    Zero,
    Half,
    One,
}

impl HalfValue {
    pub fn to_rat(self) -> Rat {
        match self {
            HalfValue::Zero => rat(0),
            HalfValue::Half => ratio(1, 2),
            HalfValue::One => rat(1),
        }
    }
}

/// An optimal dual solution with every value in `{0, 1/2, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfIntegralDual {
    pub values: Vec<HalfValue>,
    pub objective: Rat,
}

impl HalfIntegralDual {
    pub fn value(&self, v: usize) -> HalfValue {
        self.values[v]
    }
}

fn dual_objective(values: &[HalfValue]) -> Rat {
    values.iter().fold(rat(0), |acc, v| acc + v.to_rat())
}

fn dual_feasible(g: &Graph, values: &[HalfValue]) -> bool {
    g.edge_sets().all(|e| {
        let sum: Rat = e.iter().fold(rat(0), |acc, &v| acc + values[v].to_rat());
        sum <= rat(1)
    })
}

/// Greedy structural construction of an optimal half-integral dual: leaves
/// absorb weight one with their support at zero, vertices with no non-loop
/// edges take one, and whatever remains (minimum degree two) takes one half
/// per vertex when that is optimal for the component.
fn peel_construct(g: &Graph) -> Option<Vec<HalfValue>> {
    let n = g.n;
    let mut assigned: Vec<Option<HalfValue>> = vec![None; n];
    let mut alive: Vec<bool> = vec![true; n];
    let alive_neighbors = |alive: &[bool], v: usize| -> Vec<usize> {
        g.neighbors(v).filter(|&u| u != v && alive[u]).collect()
    };
    loop {
        let mut progressed = false;
        // Vertices with no remaining non-loop neighbors take one.
        for v in 0..n {
            if alive[v] && alive_neighbors(&alive, v).is_empty() {
                assigned[v] = Some(HalfValue::One);
                alive[v] = false;
                progressed = true;
            }
        }
        // Lowest-index pendant: the leaf takes one, its support zero.
        let pendant = (0..n).find(|&v| alive[v] && alive_neighbors(&alive, v).len() == 1);
        if let Some(v) = pendant {
            let u = alive_neighbors(&alive, v)[0];
            assigned[v] = Some(HalfValue::One);
            assigned[u] = Some(HalfValue::Zero);
            alive[v] = false;
            alive[u] = false;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    // Remaining components all have minimum degree two.
    let mut seen = vec![false; n];
    for start in 0..n {
        if !alive[start] || seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < comp.len() {
            let u = comp[i];
            for w in g.neighbors(u) {
                if alive[w] && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        let sub = g.induced(&comp.iter().copied().collect());
        let opt = fec_dual(&sub.to_hypergraph(), &(0..comp.len()).collect()).ok()?.objective;
        if opt == ratio(comp.len() as i64, 2) {
            for &v in &comp {
                assigned[v] = Some(HalfValue::Half);
            }
        } else if comp.len() <= 12 {
            let best = exhaustive_component_dual(&sub)?;
            for (local, &v) in comp.iter().enumerate() {
                assigned[v] = Some(best[local]);
            }
        } else {
            return None;
        }
    }
    assigned.into_iter().collect()
}

/// Exhaustive search over `{0, 1/2, 1}^k` for an optimal feasible dual of a
/// small graph, deterministic in enumeration order.
fn exhaustive_component_dual(g: &Graph) -> Option<Vec<HalfValue>> {
    let k = g.n;
    let mut best: Option<(Rat, Vec<HalfValue>)> = None;
    let mut digits = vec![0u8; k];
    loop {
        let values: Vec<HalfValue> = digits
            .iter()
            .map(|&d| match d {
                0 => HalfValue::Zero,
                1 => HalfValue::Half,
                _ => HalfValue::One,
            })
            .collect();
        if dual_feasible(g, &values) {
            let obj = dual_objective(&values);
            if best.as_ref().is_none_or(|(b, _)| obj > *b) {
                best = Some((obj, values));
            }
        }
        // Increment the base-3 counter.
        let mut i = 0;
        loop {
            if i == k {
                return best.map(|(_, v)| v);
            }
            digits[i] += 1;
            if digits[i] < 3 {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// An optimal dual of the fractional edge cover LP with all values in
/// `{0, 1/2, 1}`, constructed so that leaf/support pairs take `{1, 0}` and
/// even cores keep one half everywhere. Verified optimal against the exact
/// LP optimum on every call.
pub fn half_integral_dual(g: &Graph) -> Result<HalfIntegralDual> {
    let h = g.to_hypergraph();
    let all: AttrSet = (0..g.n).collect();
    let opt = fec_dual(&h, &all)?.objective;
    if let Some(values) = peel_construct(g) {
        if dual_feasible(g, &values) && dual_objective(&values) == opt {
            return Ok(HalfIntegralDual { values, objective: opt });
        }
    }
    // Fall back to the simplex witness when the structural construction
    // does not reach the optimum.
    let report = fec_dual(&h, &all)?;
    let basic: Vec<Rat> = (0..g.n)
        .map(|v| report.solution.get(&vertex_var_name(v)).cloned().unwrap_or_else(|| rat(0)))
        .collect();
    if basic.iter().all(is_half_integral_value) {
        let values = basic
            .iter()
            .map(|r| {
                if r.is_zero() {
                    HalfValue::Zero
                } else if *r == rat(1) {
                    HalfValue::One
                } else {
                    HalfValue::Half
                }
            })
            .collect();
        return Ok(HalfIntegralDual { values, objective: opt });
    }
    if g.n <= 16 {
        if let Some(values) = exhaustive_component_dual(g) {
            let obj = dual_objective(&values);
            if obj == opt {
                return Ok(HalfIntegralDual { values, objective: opt });
            }
        }
        Err(Error::Internal("no half-integral optimum found by exhaustion".into()))
    } else {
        Err(Error::DeskScaleLimit(format!(
            "non-half-integral basic solution on {} vertices",
            g.n
        )))
    }
}

// --- the covering/packing LP pair -------------------------------------------

/// Packing-side program: maximize the guaranteed weight of the `s` lightest
/// vertices over fractional vertex packings. Solved by a cutting-plane loop
/// over violated size-`s` subsets, exactly.
pub fn lp_lb(h: &Hypergraph, s: usize) -> Result<BoundReport> {
    if s == 0 || s > h.n {
        return Err(Error::Precondition(format!("s={s} outside 1..={}", h.n)));
    }
    let n = h.n;
    let level_var = n; // L
    let mut cuts: Vec<AttrSet> = vec![(0..s).collect()];
    loop {
        let mut constraints: Vec<Constraint> = h
            .edges
            .iter()
            .map(|e| {
                Constraint::new(e.iter().map(|&v| (v, rat(1))).collect(), Cmp::Le, rat(1))
            })
            .collect();
        for v in 0..n {
            constraints.push(Constraint::new(vec![(v, rat(1))], Cmp::Le, rat(1)));
        }
        for cut in &cuts {
            let mut coeffs: Vec<(usize, Rat)> =
                cut.iter().map(|&v| (v, rat(1))).collect();
            coeffs.push((level_var, rat(-1)));
            constraints.push(Constraint::new(coeffs, Cmp::Ge, rat(0)));
        }
        let lp = LinearProgram {
            num_vars: n + 1,
            maximize: true,
            objective: vec![(level_var, rat(1))],
            constraints,
        };
        let sol = solve_lp(&lp)?;
        // The lightest s vertices give the most violated subset.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| sol.values[a].cmp(&sol.values[b]).then(a.cmp(&b)));
        let lightest: AttrSet = order[..s].iter().copied().collect();
        let light_sum: Rat =
            lightest.iter().fold(rat(0), |acc, &v| acc + &sol.values[v]);
        if light_sum >= sol.values[level_var] {
            let mut solution: BTreeMap<String, Rat> = (0..n)
                .map(|v| (vertex_var_name(v), sol.values[v].clone()))
                .collect();
            solution.insert("L".into(), sol.values[level_var].clone());
            return Ok(BoundReport { kind: BoundKind::LpLb, objective: sol.objective, solution });
        }
        if cuts.contains(&lightest) {
            return Err(Error::Internal("cutting plane repeated a subset".into()));
        }
        cuts.push(lightest);
    }
}

/// Covering-side fractional program: minimize total edge weight while
/// fractionally covering at least `s` vertices.
pub fn lp_ub(h: &Hypergraph, s: usize) -> Result<BoundReport> {
    if s == 0 || s > h.n {
        return Err(Error::Precondition(format!("s={s} outside 1..={}", h.n)));
    }
    let ne = h.edges.len();
    let n = h.n;
    // Variables: x_e then z_v.
    let mut constraints: Vec<Constraint> = Vec::new();
    for v in 0..n {
        let mut coeffs: Vec<(usize, Rat)> = h.edges_at(v).map(|j| (j, rat(-1))).collect();
        coeffs.push((ne + v, rat(1)));
        constraints.push(Constraint::new(coeffs, Cmp::Le, rat(0)));
    }
    constraints.push(Constraint::new(
        (0..n).map(|v| (ne + v, rat(1))).collect(),
        Cmp::Ge,
        rat_usize(s),
    ));
    for v in 0..n {
        constraints.push(Constraint::new(vec![(ne + v, rat(1))], Cmp::Le, rat(1)));
    }
    let lp = LinearProgram {
        num_vars: ne + n,
        maximize: false,
        objective: (0..ne).map(|j| (j, rat(1))).collect(),
        constraints,
    };
    let sol = solve_lp(&lp)?;
    let mut solution: BTreeMap<String, Rat> = (0..ne)
        .map(|j| (edge_var_name(j), sol.values[j].clone()))
        .collect();
    for v in 0..n {
        solution.insert(format!("z[{v}]"), sol.values[ne + v].clone());
    }
    Ok(BoundReport { kind: BoundKind::LpUb, objective: sol.objective, solution })
}

/// Integral-selection variant: the minimum AGM bound over all size-`s`
/// vertex subsets, by enumeration. Guarded to `n <= 20`.
pub fn lp_ub_star(h: &Hypergraph, s: usize) -> Result<BoundReport> {
    if s == 0 || s > h.n {
        return Err(Error::Precondition(format!("s={s} outside 1..={}", h.n)));
    }
    if h.n > 20 {
        return Err(Error::DeskScaleLimit(format!(
            "subset enumeration over {} vertices",
            h.n
        )));
    }
    let mut best: Option<(Rat, AttrSet, BoundReport)> = None;
    let mut subset: Vec<usize> = (0..s).collect();
    loop {
        let set: AttrSet = subset.iter().copied().collect();
        if set.iter().all(|&v| h.covers_vertex(v)) {
            let report = agm_bound(h, &set)?;
            if best.as_ref().is_none_or(|(b, _, _)| report.objective < *b) {
                best = Some((report.objective.clone(), set, report));
            }
        }
        // Next combination in lexicographic order.
        let n = h.n;
        let mut i = s;
        loop {
            if i == 0 {
                let Some((objective, set, report)) = best else {
                    return Err(Error::Infeasible(
                        "every size-s subset touches an uncovered vertex".into(),
                    ));
                };
                let mut solution = report.solution;
                for &v in &set {
                    solution.insert(format!("z[{v}]"), rat(1));
                }
                return Ok(BoundReport { kind: BoundKind::LpUbStar, objective, solution });
            }
            i -= 1;
            if subset[i] != i + n - s {
                subset[i] += 1;
                for j in i + 1..s {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;

    fn cycle(n: usize) -> Hypergraph {
        Hypergraph::new(n, (0..n).map(|i| vec![i, (i + 1) % n]).collect()).unwrap()
    }

    fn all(n: usize) -> AttrSet {
        (0..n).collect()
    }

    #[test]
    fn agm_four_cycle() {
        let h = cycle(4);
        assert_eq!(agm_bound(&h, &all(4)).unwrap().objective, rat(2));
        // Three vertices of the cycle still need weight two.
        assert_eq!(agm_bound(&h, &[0, 1, 2].into_iter().collect()).unwrap().objective, rat(2));
    }

    #[test]
    fn agm_star_with_loop() {
        // Star query: two binary edges plus a unary loop.
        let h = Hypergraph::new(3, vec![vec![0, 1], vec![0, 2], vec![2]]).unwrap();
        assert_eq!(agm_bound(&h, &all(3)).unwrap().objective, rat(2));
    }

    #[test]
    fn agm_single_full_edge() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(agm_bound(&h, &all(3)).unwrap().objective, rat(1));
        assert_eq!(agm_bound(&h, &[1].into_iter().collect()).unwrap().objective, rat(1));
    }

    #[test]
    fn agm_uncovered_vertex_is_infeasible() {
        let h = Hypergraph::new(2, vec![vec![0]]).unwrap();
        assert!(matches!(agm_bound(&h, &all(2)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn agm_special_families() {
        // Vertex-disjoint cycles on k vertices: k/2.
        for k in [3usize, 4, 5, 6, 7, 8, 9, 10] {
            let h = cycle(k);
            assert_eq!(agm_bound(&h, &all(k)).unwrap().objective, ratio(k as i64, 2));
        }
        // t disjoint stars on k vertices in total: k - t.
        let h = Hypergraph::new(
            7,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![4, 5], vec![4, 6]],
        )
        .unwrap();
        assert_eq!(agm_bound(&h, &all(7)).unwrap().objective, rat(5));
        // k singletons: k.
        let h = Hypergraph::new(4, (0..4).map(|v| vec![v]).collect()).unwrap();
        assert_eq!(agm_bound(&h, &all(4)).unwrap().objective, rat(4));
        // Even-length disjoint paths on k vertices: k/2.
        let h = Hypergraph::new(
            8,
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![4, 5], vec![5, 6], vec![6, 7]],
        )
        .unwrap();
        assert_eq!(agm_bound(&h, &all(8)).unwrap().objective, rat(4));
    }

    #[test]
    fn fec_dual_matches_agm() {
        for h in [cycle(4), cycle(5), Hypergraph::new(1, vec![vec![0]]).unwrap()] {
            let n = h.n;
            let agm = agm_bound(&h, &all(n)).unwrap().objective;
            let dual = fec_dual(&h, &all(n)).unwrap().objective;
            assert_eq!(agm, dual);
        }
        assert_eq!(fec_dual(&cycle(4), &all(4)).unwrap().objective, rat(2));
        // Triangle: 3/2.
        assert_eq!(fec_dual(&cycle(3), &all(3)).unwrap().objective, ratio(3, 2));
    }

    #[test]
    fn pmb_with_cardinality_only_equals_agm() {
        for h in [cycle(4), cycle(5)] {
            let n = h.n;
            let s = all(n);
            assert_eq!(
                pmb_bound(&h, &s, &[]).unwrap().objective,
                agm_bound(&h, &s).unwrap().objective
            );
        }
    }

    #[test]
    fn pmb_path_with_pruned_degree_constraints() {
        // Path on three vertices, degree constraints oriented forward from
        // the second edge: exponent 3/2.
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let h = g.to_hypergraph();
        let s = all(3);
        let dcs = tree_degree_constraints(&g, &s).unwrap();
        assert_eq!(dcs.len(), 1);
        let report = pmb_bound(&h, &s, &dcs).unwrap();
        assert_eq!(report.objective, ratio(3, 2));
    }

    #[test]
    fn pmb_rejects_cyclic_constraint_graph() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let h = g.to_hypergraph();
        let dcs = vec![
            DegreeConstraint::sqrt_degree(0, 1, 0),
            DegreeConstraint::sqrt_degree(1, 0, 0),
        ];
        assert!(matches!(
            pmb_bound(&h, &all(3), &dcs),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pmb_heavy_vertex_instance() {
        // A heavy vertex carries a unary relation bounded by sqrt(N); with
        // (s-1)/2 matching edges the optimum lands at s/2.
        let s_val = 5usize;
        let n = 1 + (s_val - 1);
        let mut edges = vec![vec![0usize]];
        for i in 0..(s_val - 1) / 2 {
            edges.push(vec![1 + 2 * i, 2 + 2 * i]);
        }
        let h = Hypergraph::new(n, edges).unwrap();
        // Shrink the unary cardinality to sqrt(N) via a degree constraint is
        // not expressible with X strictly inside Y, so model it by scaling
        // the objective: solve with a custom program instead.
        let lp = LinearProgram {
            num_vars: h.edges().len(),
            maximize: false,
            objective: h
                .edges()
                .iter()
                .enumerate()
                .map(|(j, e)| (j, if e.len() == 1 { ratio(1, 2) } else { rat(1) }))
                .collect(),
            constraints: (0..n)
                .map(|v| {
                    Constraint::new(h.edges_at(v).map(|j| (j, rat(1))).collect(), Cmp::Ge, rat(1))
                })
                .collect(),
        };
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.objective, ratio(s_val as i64, 2));
    }

    #[test]
    fn union_check_holds() {
        let h = cycle(4);
        let parts = vec![
            (Hypergraph::new(4, vec![vec![0, 1]]).unwrap(), [0, 1].into_iter().collect()),
            (Hypergraph::new(4, vec![vec![2, 3]]).unwrap(), [2, 3].into_iter().collect()),
        ];
        assert!(pmb_union_check((&h, &all(4)), &parts).unwrap());
        // Single-part split: equality.
        let parts = vec![(h.clone(), all(4))];
        assert!(pmb_union_check((&h, &all(4)), &parts).unwrap());
    }

    #[test]
    fn lp_lb_examples() {
        let h = cycle(4);
        assert_eq!(lp_lb(&h, 3).unwrap().objective, ratio(3, 2));
        // s = n reduces to the fractional packing optimum.
        assert_eq!(lp_lb(&h, 4).unwrap().objective, rat(2));
        // One covering edge over all vertices: best uniform weight 1/n.
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(lp_lb(&h, 1).unwrap().objective, ratio(1, 3));
    }

    #[test]
    fn lp_ub_examples() {
        let h = cycle(4);
        assert_eq!(lp_ub(&h, 4).unwrap().objective, rat(2));
        assert_eq!(lp_ub_star(&h, 3).unwrap().objective, rat(2));
        // Fractional relaxation never exceeds the integral selection.
        for s in 1..=4 {
            let frac = lp_ub(&h, s).unwrap().objective;
            let star = lp_ub_star(&h, s).unwrap().objective;
            assert!(frac <= star, "s={s}: {frac} > {star}");
        }
        assert_eq!(lp_ub(&h, 3).unwrap().objective, lp_lb(&h, 3).unwrap().objective);
    }

    #[test]
    fn half_integral_dual_examples() {
        // Single edge: {0,1} pattern, objective 1.
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let d = half_integral_dual(&g).unwrap();
        assert_eq!(d.objective, rat(1));
        let mut vals = d.values.clone();
        vals.sort_by_key(|v| match v {
            HalfValue::Zero => 0,
            HalfValue::Half => 1,
            HalfValue::One => 2,
        });
        assert_eq!(vals, vec![HalfValue::Zero, HalfValue::One]);

        // Five-cycle: all halves, objective 5/2.
        let g = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5)).collect()).unwrap();
        let d = half_integral_dual(&g).unwrap();
        assert_eq!(d.objective, ratio(5, 2));
        assert!(d.values.iter().all(|&v| v == HalfValue::Half));

        // Four-cycle: the canonical dual keeps the even core at one half.
        let g = Graph::new(4, (0..4).map(|i| (i, (i + 1) % 4)).collect()).unwrap();
        let d = half_integral_dual(&g).unwrap();
        assert_eq!(d.objective, rat(2));
        assert!(d.values.iter().all(|&v| v == HalfValue::Half));
    }

    #[test]
    fn half_integral_dual_on_decomposition_example() {
        // Triangle + pendant pair + loop vertex.
        let g = Graph::new(6, vec![(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (5, 5)]).unwrap();
        let d = half_integral_dual(&g).unwrap();
        assert_eq!(d.objective, ratio(7, 2));
        assert_eq!(d.values[0], HalfValue::Half);
        assert_eq!(d.values[1], HalfValue::Half);
        assert_eq!(d.values[2], HalfValue::Half);
        assert_eq!(d.values[3], HalfValue::Zero);
        assert_eq!(d.values[4], HalfValue::One);
        assert_eq!(d.values[5], HalfValue::One);
    }

    #[test]
    fn half_integral_matches_lp_optimum_on_bipartite_like_graphs() {
        // Complete bipartite 2x3 needs the {0,1} side pattern.
        let g = Graph::new(
            5,
            vec![(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)],
        )
        .unwrap();
        let d = half_integral_dual(&g).unwrap();
        assert_eq!(d.objective, rat(3));
    }
}
