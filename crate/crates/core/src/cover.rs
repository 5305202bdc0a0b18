//! Join covers and packings: the emptiness oracle, instance restriction,
//! greedy packing-as-cover, exact branch-and-bound oracles, and the
//! oracle-driven cover construction that extends a projected join one
//! attribute at a time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::{
    generic_join, join_is_nonempty, projected_query, AttrSet,
    QueryInstance, Relation, Tuple,
};

/// Exhaustive-search size limit for the exact cover/packing oracles.
pub const EXACT_SEARCH_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoverRole {
    Cover,
    Packing,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoverMethod {
    Greedy,
    Exact,
    AlgB,
}

/// A computed cover or packing: a subset of the join output plus the
/// radius parameter it was computed for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    pub tuples: Relation,
    pub delta: usize,
    pub role: CoverRole,
    pub method: CoverMethod,
}

impl CoverResult {
    pub fn size(&self) -> usize {
        self.tuples.len()
    }

    pub fn to_json(&self, q: &QueryInstance) -> serde_json::Value {
        serde_json::json!({
            "delta": self.delta,
            "role": self.role,
            "method": self.method,
            "size": self.size(),
            "tuples": self
                .tuples
                .rows()
                .iter()
                .map(|r| q.row_symbols(r))
                .collect::<Vec<_>>(),
        })
    }
}

/// Emptiness of the join output, decided with first-tuple early exit.
pub fn bcq(q: &QueryInstance) -> bool {
    join_is_nonempty(q)
}

/// Filters every relation down to the tuples agreeing with the partial
/// assignment on the shared attributes.
pub fn restrict_instance(q: &QueryInstance, partial: &Tuple) -> Result<QueryInstance> {
    for &a in partial.attrs() {
        if a >= q.attr_count() {
            return Err(Error::InvalidInput(format!("attribute {a} out of range")));
        }
    }
    let mut relations = Vec::with_capacity(q.relations().len());
    for (edge, rel) in q.edges().iter().zip(q.relations()) {
        let shared: Vec<(usize, u32)> = edge
            .iter()
            .enumerate()
            .filter_map(|(pos, &a)| partial.get(a).map(|v| (pos, v)))
            .collect();
        if shared.is_empty() {
            relations.push(rel.clone());
            continue;
        }
        let rows: Vec<Vec<u32>> = rel
            .rows()
            .iter()
            .filter(|row| shared.iter().all(|&(pos, v)| row[pos] == v))
            .cloned()
            .collect();
        relations.push(Relation::new(edge.clone(), rows)?);
    }
    QueryInstance::new(
        q.attr_count(),
        q.domains().to_vec(),
        q.edges().to_vec(),
        relations,
        q.size_bound(),
    )
}

fn pairwise_distance(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Scans the join in sorted order keeping every tuple at distance at least
/// `delta` from all kept ones: a maximal packing, hence also a cover.
pub fn greedy_packing(join: &Relation, delta: usize) -> Result<CoverResult> {
    if delta == 0 {
        return Err(Error::Precondition("delta must be at least one".into()));
    }
    let mut kept: Vec<Vec<u32>> = Vec::new();
    for row in join.rows() {
        if kept.iter().all(|k| pairwise_distance(k, row) >= delta) {
            kept.push(row.clone());
        }
    }
    Ok(CoverResult {
        tuples: Relation::new(join.schema().to_vec(), kept)?,
        delta,
        role: CoverRole::Both,
        method: CoverMethod::Greedy,
    })
}

/// Minimum-cardinality cover of the join by radius-(delta-1) balls centered
/// at join tuples, by branch and bound. Radius-zero and whole-space radii
/// short-circuit; anything else requires at most [`EXACT_SEARCH_LIMIT`]
/// tuples.
pub fn exact_min_cover(join: &Relation, delta: usize) -> Result<CoverResult> {
    if delta == 0 {
        return Err(Error::Precondition("delta must be at least one".into()));
    }
    let m = join.len();
    let done = |rows: Vec<Vec<u32>>| -> Result<CoverResult> {
        Ok(CoverResult {
            tuples: Relation::new(join.schema().to_vec(), rows)?,
            delta,
            role: CoverRole::Cover,
            method: CoverMethod::Exact,
        })
    };
    if m == 0 {
        return done(vec![]);
    }
    if delta == 1 {
        // Radius zero: every tuple covers only itself.
        return done(join.rows().to_vec());
    }
    if delta > join.schema().len() {
        // Whole space within radius: any single tuple suffices.
        return done(vec![join.rows()[0].clone()]);
    }
    if m > EXACT_SEARCH_LIMIT {
        return Err(Error::DeskScaleLimit(format!(
            "exact cover search limited to {EXACT_SEARCH_LIMIT} tuples, got {m}; use the greedy method"
        )));
    }
    // Ball masks: bit t of balls[c] says center c covers tuple t.
    let rows = join.rows();
    let balls: Vec<u64> = (0..m)
        .map(|c| {
            (0..m)
                .filter(|&t| pairwise_distance(&rows[c], &rows[t]) < delta)
                .fold(0u64, |acc, t| acc | 1 << t)
        })
        .collect();
    let full: u64 = if m == 64 { u64::MAX } else { (1 << m) - 1 };
    let max_ball = balls.iter().map(|b| b.count_ones() as usize).max().unwrap_or(1);

    // Greedy upper bound.
    let mut covered = 0u64;
    let mut greedy: Vec<usize> = Vec::new();
    while covered != full {
        let best = (0..m)
            .max_by_key(|&c| (balls[c] & !covered).count_ones())
            .expect("nonempty");
        greedy.push(best);
        covered |= balls[best];
    }
    let mut best_set = greedy.clone();

    fn branch(
        balls: &[u64],
        full: u64,
        max_ball: usize,
        covered: u64,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if covered == full {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        }
        let uncovered = (full & !covered).count_ones() as usize;
        if chosen.len() + uncovered.div_ceil(max_ball) >= best.len() {
            return;
        }
        // Branch on the uncovered tuple with the fewest candidate centers.
        let m = balls.len();
        let target = (0..m)
            .filter(|&t| covered & (1 << t) == 0)
            .min_by_key(|&t| (0..m).filter(|&c| balls[c] >> t & 1 == 1).count())
            .expect("uncovered tuple exists");
        for c in 0..m {
            if balls[c] >> target & 1 == 1 {
                chosen.push(c);
                branch(balls, full, max_ball, covered | balls[c], chosen, best);
                chosen.pop();
            }
        }
    }
    branch(&balls, full, max_ball, 0, &mut Vec::new(), &mut best_set);
    done(best_set.into_iter().map(|c| rows[c].clone()).collect())
}

/// Maximum packing of the join at pairwise distance `delta`, by branch and
/// bound over the conflict graph.
pub fn exact_max_packing(join: &Relation, delta: usize) -> Result<CoverResult> {
    if delta == 0 {
        return Err(Error::Precondition("delta must be at least one".into()));
    }
    let m = join.len();
    let done = |rows: Vec<Vec<u32>>| -> Result<CoverResult> {
        Ok(CoverResult {
            tuples: Relation::new(join.schema().to_vec(), rows)?,
            delta,
            role: CoverRole::Packing,
            method: CoverMethod::Exact,
        })
    };
    if m == 0 {
        return done(vec![]);
    }
    if delta == 1 {
        return done(join.rows().to_vec());
    }
    if delta > join.schema().len() {
        return done(vec![join.rows()[0].clone()]);
    }
    if m > EXACT_SEARCH_LIMIT {
        return Err(Error::DeskScaleLimit(format!(
            "exact packing search limited to {EXACT_SEARCH_LIMIT} tuples, got {m}; use the greedy method"
        )));
    }
    let rows = join.rows();
    // compatible[t]: tuples at distance >= delta from t (candidates after t).
    let compatible: Vec<u64> = (0..m)
        .map(|t| {
            (0..m)
                .filter(|&u| pairwise_distance(&rows[t], &rows[u]) >= delta)
                .fold(0u64, |acc, u| acc | 1 << u)
        })
        .collect();

    fn branch(
        compatible: &[u64],
        m: usize,
        candidates: u64,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if chosen.len() + (candidates.count_ones() as usize) <= best.len() {
            return;
        }
        if candidates == 0 {
            if chosen.len() > best.len() {
                *best = chosen.clone();
            }
            return;
        }
        let t = candidates.trailing_zeros() as usize;
        // Either take t...
        chosen.push(t);
        branch(compatible, m, candidates & compatible[t] & !((1 << (t + 1)) - 1), chosen, best);
        chosen.pop();
        // ...or skip it.
        branch(compatible, m, candidates & !(1 << t), chosen, best);
    }
    let all: u64 = if m == 64 { u64::MAX } else { (1 << m) - 1 };
    let mut best = Vec::new();
    branch(&compatible, m, all, &mut Vec::new(), &mut best);
    best.sort_unstable();
    done(best.into_iter().map(|t| rows[t].clone()).collect())
}

/// Oracle deciding join emptiness for restricted instances.
pub type BcqOracle<'a> = dyn Fn(&QueryInstance) -> bool + 'a;

/// Search-to-decision cover construction: join the query projected to `s`,
/// then extend each surviving partial tuple one missing attribute at a
/// time, keeping for each parent the first candidate value whose restricted
/// instance the oracle reports non-empty.
///
/// The result is a cover of size at most the projected join: every output
/// tuple agrees with some result tuple on `s`, hence lies within distance
/// `n - |s| = delta - 1` of it.
pub fn algorithm_b(
    q: &QueryInstance,
    delta: usize,
    s: &AttrSet,
    oracle: &BcqOracle,
) -> Result<CoverResult> {
    let n = q.attr_count();
    if delta == 0 || delta > n {
        return Err(Error::Precondition(format!("delta={delta} outside 1..={n}")));
    }
    if s.len() != n - delta + 1 {
        return Err(Error::Precondition(format!(
            "subset of size {} does not match n - delta + 1 = {}",
            s.len(),
            n - delta + 1
        )));
    }
    let projected = projected_query(q, s)?;
    let order: Vec<usize> = (0..projected.attr_count()).collect();
    let base = generic_join(&projected, &order)?;
    // Translate the projected rows back to original attribute ids.
    let s_attrs: Vec<usize> = s.iter().copied().collect();
    let mut frontier: Vec<Tuple> = base
        .rows()
        .iter()
        .map(|row| {
            Tuple::new(s_attrs.iter().copied().zip(row.iter().copied()).collect())
                .expect("projected row is a valid tuple")
        })
        .collect();
    for v in (0..n).filter(|v| !s.contains(v)) {
        let mut next = Vec::with_capacity(frontier.len());
        for parent in &frontier {
            for value in 0..q.domain(v).len() as u32 {
                let candidate = parent.extended(v, value)?;
                if oracle(&restrict_instance(q, &candidate)?) {
                    next.push(candidate);
                    break;
                }
            }
        }
        frontier = next;
    }
    let rows: Vec<Vec<u32>> = frontier.iter().map(|t| t.values().to_vec()).collect();
    Ok(CoverResult {
        tuples: Relation::new((0..n).collect(), rows)?,
        delta,
        role: CoverRole::Cover,
        method: CoverMethod::AlgB,
    })
}

/// Exhaustive check that `cover` is a subset of `join` within distance
/// `delta - 1` of every join tuple.
pub fn verify_cover(join: &Relation, cover: &Relation, delta: usize) -> bool {
    if cover.schema() != join.schema() {
        return false;
    }
    if cover.rows().iter().any(|r| !join.contains_row(r)) {
        return false;
    }
    join.rows()
        .iter()
        .all(|t| cover.rows().iter().any(|u| pairwise_distance(t, u) < delta))
}

/// Exhaustive check of pairwise distance at least `delta`.
pub fn verify_packing(packing: &Relation, delta: usize) -> bool {
    let rows = packing.rows();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if pairwise_distance(&rows[i], &rows[j]) < delta {
                return false;
            }
        }
    }
    true
}

/// Smallest projected-join size over all attribute subsets of size `s`:
/// the quantity sandwiching packings from above.
pub fn min_projection_size(q: &QueryInstance, join: &Relation, s: usize) -> Result<usize> {
    let n = q.attr_count();
    if s == 0 || s > n {
        return Err(Error::Precondition(format!("s={s} outside 1..={n}")));
    }
    let mut best = usize::MAX;
    let mut subset: Vec<usize> = (0..s).collect();
    loop {
        let set: AttrSet = subset.iter().copied().collect();
        best = best.min(join.project(&set)?.len());
        let mut i = s;
        loop {
            if i == 0 {
                return Ok(best);
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
