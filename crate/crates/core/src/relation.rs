//! Relations over attribute hypergraphs, Hamming distance, projection and
//! join evaluation.
//!
//! Attributes are dense indices `0..n`. Symbols are interned per attribute
//! into `u32` ids pointing into that attribute's [`Domain`]; relations store
//! sorted, deduplicated tuples so every operation iterates deterministically.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Set of attribute indices. Kept ordered for deterministic iteration.
pub type AttrSet = BTreeSet<usize>;

pub fn attr_set<I: IntoIterator<Item = usize>>(attrs: I) -> AttrSet {
    attrs.into_iter().collect()
}

/// Finite ordered set of symbols for one attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    values: Vec<String>,
    index: HashMap<String, u32>,
}

impl Domain {
    pub fn new(values: Vec<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty domain".into()));
        }
        let mut index = HashMap::new();
        for (i, v) in values.iter().enumerate() {
            if index.insert(v.clone(), i as u32).is_some() {
                return Err(Error::InvalidInput(format!("duplicate domain symbol {v:?}")));
            }
        }
        Ok(Domain { values, index })
    }

    /// Domain of the integers `0..size` rendered in decimal.
    pub fn integers(size: u64) -> Self {
        let values: Vec<String> = (0..size).map(|v| v.to_string()).collect();
        Domain::new(values).expect("integer domain is valid")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn symbol(&self, id: u32) -> &str {
        &self.values[id as usize]
    }

    pub fn id_of(&self, symbol: &str) -> Option<u32> {
        self.index.get(symbol).copied()
    }

    pub fn symbols(&self) -> &[String] {
        &self.values
    }
}

/// Assignment of interned symbols to a declared attribute set.
///
/// `attrs` is sorted and `values[i]` is the symbol id for `attrs[i]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tuple {
    attrs: Vec<usize>,
    values: Vec<u32>,
}

impl Tuple {
    pub fn new(mut pairs: Vec<(usize, u32)>) -> Result<Self> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!("attribute {} assigned twice", w[0].0)));
            }
        }
        Ok(Tuple {
            attrs: pairs.iter().map(|p| p.0).collect(),
            values: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn empty() -> Self {
        Tuple { attrs: vec![], values: vec![] }
    }

    pub fn attrs(&self) -> &[usize] {
        &self.attrs
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, attr: usize) -> Option<u32> {
        self.attrs.binary_search(&attr).ok().map(|i| self.values[i])
    }

    /// Extends by one fresh attribute.
    pub fn extended(&self, attr: usize, value: u32) -> Result<Tuple> {
        if self.get(attr).is_some() {
            return Err(Error::InvalidInput(format!("attribute {attr} already assigned")));
        }
        let mut pairs: Vec<(usize, u32)> =
            self.attrs.iter().copied().zip(self.values.iter().copied()).collect();
        pairs.push((attr, value));
        Tuple::new(pairs)
    }
}

/// Number of attributes on which two tuples over the same attribute set
/// disagree.
pub fn hamming_dist(a: &Tuple, b: &Tuple) -> Result<usize> {
    if a.attrs != b.attrs {
        return Err(Error::SchemaMismatch(format!(
            "tuples declared over {:?} vs {:?}",
            a.attrs, b.attrs
        )));
    }
    Ok(a.values.iter().zip(&b.values).filter(|(x, y)| x != y).count())
}

/// Set of tuples over a fixed schema, stored sorted without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    schema: Vec<usize>,
    tuples: Vec<Vec<u32>>,
}

impl Relation {
    pub fn new(schema: Vec<usize>, mut tuples: Vec<Vec<u32>>) -> Result<Self> {
        let mut sorted = schema.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != schema.len() {
            return Err(Error::InvalidInput("relation schema has duplicate attributes".into()));
        }
        for t in &tuples {
            if t.len() != sorted.len() {
                return Err(Error::SchemaMismatch(format!(
                    "tuple of width {} in relation of arity {}",
                    t.len(),
                    sorted.len()
                )));
            }
        }
        // Re-align tuple columns if the caller's schema was unsorted.
        if sorted != schema {
            let perm: Vec<usize> =
                sorted.iter().map(|a| schema.iter().position(|b| b == a).unwrap()).collect();
            tuples = tuples
                .into_iter()
                .map(|t| perm.iter().map(|&i| t[i]).collect())
                .collect();
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Relation { schema: sorted, tuples })
    }

    pub fn empty(schema: Vec<usize>) -> Result<Self> {
        Relation::new(schema, vec![])
    }

    pub fn schema(&self) -> &[usize] {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    pub fn contains_row(&self, row: &[u32]) -> bool {
        self.tuples.binary_search_by(|t| t.as_slice().cmp(row)).is_ok()
    }

    pub fn tuples(&self) -> impl Iterator<Item = Tuple> + '_ {
        self.tuples.iter().map(move |vals| Tuple {
            attrs: self.schema.clone(),
            values: vals.clone(),
        })
    }

    pub fn tuple_at(&self, i: usize) -> Tuple {
        Tuple { attrs: self.schema.clone(), values: self.tuples[i].clone() }
    }

    /// Projection onto `attrs`, duplicates removed.
    pub fn project(&self, attrs: &AttrSet) -> Result<Relation> {
        let positions: Result<Vec<usize>> = attrs
            .iter()
            .map(|a| {
                self.schema
                    .binary_search(a)
                    .map_err(|_| Error::SchemaMismatch(format!("attribute {a} not in schema")))
            })
            .collect();
        let positions = positions?;
        let rows = self
            .tuples
            .iter()
            .map(|t| positions.iter().map(|&i| t[i]).collect())
            .collect();
        Relation::new(attrs.iter().copied().collect(), rows)
    }

    fn intersect(&self, other: &Relation) -> Result<Relation> {
        if self.schema != other.schema {
            return Err(Error::SchemaMismatch("intersecting relations with different schemas".into()));
        }
        let rows = self
            .tuples
            .iter()
            .filter(|t| other.contains_row(t))
            .cloned()
            .collect();
        Relation::new(self.schema.clone(), rows)
    }
}

/// A join query: hypergraph edges over `0..n` plus one relation per edge.
///
/// Hyperedges on identical attribute sets are collapsed at construction by
/// intersecting their relations, which preserves the join output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryInstance {
    n: usize,
    domains: Vec<Domain>,
    edges: Vec<Vec<usize>>,
    relations: Vec<Relation>,
    size_bound: Option<usize>,
}

impl QueryInstance {
    pub fn new(
        n: usize,
        domains: Vec<Domain>,
        edges: Vec<Vec<usize>>,
        relations: Vec<Relation>,
        size_bound: Option<usize>,
    ) -> Result<Self> {
        if domains.len() != n {
            return Err(Error::InvalidInput(format!(
                "{} domains for {} attributes",
                domains.len(),
                n
            )));
        }
        if edges.len() != relations.len() {
            return Err(Error::InvalidInput(format!(
                "{} edges but {} relations",
                edges.len(),
                relations.len()
            )));
        }
        let mut collapsed: BTreeMap<Vec<usize>, Relation> = BTreeMap::new();
        for (edge, rel) in edges.into_iter().zip(relations) {
            let mut e = edge.clone();
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::InvalidInput("empty hyperedge".into()));
            }
            if *e.last().unwrap() >= n {
                return Err(Error::InvalidInput(format!("edge {e:?} out of range for n={n}")));
            }
            if rel.schema() != e.as_slice() {
                return Err(Error::SchemaMismatch(format!(
                    "relation schema {:?} does not match edge {:?}",
                    rel.schema(),
                    e
                )));
            }
            for row in rel.rows() {
                for (pos, &attr) in e.iter().enumerate() {
                    if row[pos] as usize >= domains[attr].len() {
                        return Err(Error::InvalidInput(format!(
                            "symbol id {} outside domain of attribute {}",
                            row[pos], attr
                        )));
                    }
                }
            }
            match collapsed.remove(&e) {
                None => {
                    collapsed.insert(e, rel);
                }
                Some(existing) => {
                    collapsed.insert(e, existing.intersect(&rel)?);
                }
            }
        }
        if let Some(bound) = size_bound {
            for (e, rel) in &collapsed {
                if rel.len() > bound {
                    return Err(Error::InvalidInput(format!(
                        "relation on {e:?} has {} tuples, exceeding N={bound}",
                        rel.len()
                    )));
                }
            }
        }
        let (edges, relations) = collapsed.into_iter().unzip();
        Ok(QueryInstance { n, domains, edges, relations, size_bound })
    }

    pub fn attr_count(&self) -> usize {
        self.n
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn domain(&self, attr: usize) -> &Domain {
        &self.domains[attr]
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, edge_idx: usize) -> &Relation {
        &self.relations[edge_idx]
    }

    pub fn size_bound(&self) -> Option<usize> {
        self.size_bound
    }

    pub fn max_arity(&self) -> usize {
        self.edges.iter().map(|e| e.len()).max().unwrap_or(0)
    }

    /// Replaces the relation on one edge, keeping the schema.
    pub fn with_relation(&self, edge_idx: usize, rel: Relation) -> Result<QueryInstance> {
        if rel.schema() != self.edges[edge_idx].as_slice() {
            return Err(Error::SchemaMismatch("replacement relation schema differs".into()));
        }
        let mut relations = self.relations.clone();
        relations[edge_idx] = rel;
        Ok(QueryInstance {
            n: self.n,
            domains: self.domains.clone(),
            edges: self.edges.clone(),
            relations,
            size_bound: self.size_bound,
        })
    }
}

fn pairwise_join(left: &Relation, right: &Relation) -> Relation {
    let schema: Vec<usize> = {
        let mut s: Vec<usize> = left.schema().to_vec();
        s.extend_from_slice(right.schema());
        s.sort_unstable();
        s.dedup();
        s
    };
    let shared: Vec<usize> = left
        .schema()
        .iter()
        .copied()
        .filter(|a| right.schema().binary_search(a).is_ok())
        .collect();
    let left_shared: Vec<usize> =
        shared.iter().map(|a| left.schema().binary_search(a).unwrap()).collect();
    let right_shared: Vec<usize> =
        shared.iter().map(|a| right.schema().binary_search(a).unwrap()).collect();

    // Hash join on the shared attributes.
    let mut buckets: HashMap<Vec<u32>, Vec<&Vec<u32>>> = HashMap::new();
    for row in right.rows() {
        let key: Vec<u32> = right_shared.iter().map(|&i| row[i]).collect();
        buckets.entry(key).or_default().push(row);
    }
    let mut out = Vec::new();
    for lrow in left.rows() {
        let key: Vec<u32> = left_shared.iter().map(|&i| lrow[i]).collect();
        let Some(matches) = buckets.get(&key) else { continue };
        for rrow in matches {
            let mut combined = vec![0u32; schema.len()];
            for (pos, &attr) in schema.iter().enumerate() {
                combined[pos] = match left.schema().binary_search(&attr) {
                    Ok(i) => lrow[i],
                    Err(_) => rrow[right.schema().binary_search(&attr).unwrap()],
                };
            }
            out.push(combined);
        }
    }
    Relation::new(schema, out).expect("join rows conform to schema")
}

/// Full join output over all `n` attributes, by pairwise joins in edge order.
///
/// Attributes outside every hyperedge are unconstrained and range over their
/// whole domain.
pub fn naive_join(q: &QueryInstance) -> Relation {
    let mut acc = Relation::new(vec![], vec![vec![]]).unwrap();
    for rel in q.relations() {
        if acc.is_empty() {
            break;
        }
        acc = pairwise_join(&acc, rel);
    }
    // Pad with unconstrained attributes.
    for attr in 0..q.attr_count() {
        if acc.schema().binary_search(&attr).is_err() && !acc.is_empty() {
            let unary = Relation::new(
                vec![attr],
                (0..q.domain(attr).len() as u32).map(|v| vec![v]).collect(),
            )
            .unwrap();
            acc = pairwise_join(&acc, &unary);
        }
    }
    if acc.schema().len() != q.attr_count() {
        return Relation::empty((0..q.attr_count()).collect()).unwrap();
    }
    acc
}

struct GenericJoin<'a> {
    q: &'a QueryInstance,
    order: &'a [usize],
    assignment: Vec<Option<u32>>,
    out: Vec<Vec<u32>>,
    limit: Option<usize>,
}

impl<'a> GenericJoin<'a> {
    fn candidates(&self, attr: usize) -> Vec<u32> {
        let mut result: Option<BTreeSet<u32>> = None;
        for (edge, rel) in self.q.edges().iter().zip(self.q.relations()) {
            let Ok(vpos) = edge.binary_search(&attr) else { continue };
            let bound: Vec<(usize, u32)> = edge
                .iter()
                .enumerate()
                .filter_map(|(i, &a)| self.assignment[a].map(|v| (i, v)))
                .collect();
            let mut values = BTreeSet::new();
            for row in rel.rows() {
                if bound.iter().all(|&(i, v)| row[i] == v) {
                    values.insert(row[vpos]);
                }
            }
            result = Some(match result {
                None => values,
                Some(acc) => acc.intersection(&values).copied().collect(),
            });
            if result.as_ref().is_some_and(BTreeSet::is_empty) {
                break;
            }
        }
        match result {
            Some(set) => set.into_iter().collect(),
            // Attribute in no edge: unconstrained over its domain.
            None => (0..self.q.domain(attr).len() as u32).collect(),
        }
    }

    fn recurse(&mut self, depth: usize) -> bool {
        if self.limit.is_some_and(|l| self.out.len() >= l) {
            return true;
        }
        if depth == self.order.len() {
            let row: Vec<u32> = (0..self.q.attr_count())
                .map(|a| self.assignment[a].expect("all attributes assigned"))
                .collect();
            self.out.push(row);
            return self.limit.is_some_and(|l| self.out.len() >= l);
        }
        let attr = self.order[depth];
        for value in self.candidates(attr) {
            self.assignment[attr] = Some(value);
            if self.recurse(depth + 1) {
                self.assignment[attr] = None;
                return true;
            }
        }
        self.assignment[attr] = None;
        false
    }
}

/// Attribute-at-a-time worst-case-optimal join. Produces the same tuple set
/// as [`naive_join`] for any processing order.
pub fn generic_join(q: &QueryInstance, order: &[usize]) -> Result<Relation> {
    generic_join_limited(q, order, None)
}

pub(crate) fn generic_join_limited(
    q: &QueryInstance,
    order: &[usize],
    limit: Option<usize>,
) -> Result<Relation> {
    let mut seen: Vec<usize> = order.to_vec();
    seen.sort_unstable();
    if seen != (0..q.attr_count()).collect::<Vec<_>>() {
        return Err(Error::InvalidInput(format!(
            "order {order:?} is not a permutation of 0..{}",
            q.attr_count()
        )));
    }
    if q.relations().iter().any(Relation::is_empty) {
        return Relation::empty((0..q.attr_count()).collect());
    }
    let mut engine = GenericJoin {
        q,
        order,
        assignment: vec![None; q.attr_count()],
        out: Vec::new(),
        limit,
    };
    engine.recurse(0);
    Relation::new((0..q.attr_count()).collect(), engine.out)
}

/// True iff the join output is non-empty, with first-tuple early exit.
pub fn join_is_nonempty(q: &QueryInstance) -> bool {
    let order: Vec<usize> = (0..q.attr_count()).collect();
    !generic_join_limited(q, &order, Some(1))
        .expect("identity order is a permutation")
        .is_empty()
}

/// The induced query on attribute subset `s`: edges are intersected with
/// `s` (empty intersections dropped, coinciding edges collapsed) and each
/// relation is projected accordingly.
///
/// Attributes are renumbered: attribute `i` of the result is the `i`-th
/// smallest element of `s`.
pub fn projected_query(q: &QueryInstance, s: &AttrSet) -> Result<QueryInstance> {
    if s.is_empty() {
        return Err(Error::InvalidInput("projection onto empty attribute set".into()));
    }
    if let Some(&max) = s.iter().max() {
        if max >= q.attr_count() {
            return Err(Error::InvalidInput(format!("attribute {max} out of range")));
        }
    }
    let renumber: BTreeMap<usize, usize> =
        s.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let domains: Vec<Domain> = s.iter().map(|&a| q.domain(a).clone()).collect();
    let mut edges = Vec::new();
    let mut relations = Vec::new();
    for (edge, rel) in q.edges().iter().zip(q.relations()) {
        let kept: AttrSet = edge.iter().copied().filter(|a| s.contains(a)).collect();
        if kept.is_empty() {
            continue;
        }
        let projected = rel.project(&kept)?;
        let new_edge: Vec<usize> = kept.iter().map(|a| renumber[a]).collect();
        let rows = projected.rows().to_vec();
        edges.push(new_edge.clone());
        relations.push(Relation::new(new_edge, rows)?);
    }
    QueryInstance::new(s.len(), domains, edges, relations, q.size_bound())
}

// --- JSON surface ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct QueryInstanceJson {
    n: usize,
    domains: Vec<Vec<String>>,
    edges: Vec<Vec<usize>>,
    relations: Vec<Vec<Vec<String>>>,
    #[serde(rename = "N")]
    size_bound: Option<usize>,
}

impl QueryInstance {
    /// Wire format: `{"n","domains","edges","relations","N"}` with symbols
    /// as strings and 0-based attribute ids.
    pub fn to_json(&self) -> serde_json::Value {
        let relations = self
            .edges
            .iter()
            .zip(&self.relations)
            .map(|(edge, rel)| {
                rel.rows()
                    .iter()
                    .map(|row| {
                        edge.iter()
                            .zip(row)
                            .map(|(&a, &v)| self.domains[a].symbol(v).to_string())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        serde_json::to_value(QueryInstanceJson {
            n: self.n,
            domains: self.domains.iter().map(|d| d.symbols().to_vec()).collect(),
            edges: self.edges.clone(),
            relations,
            size_bound: self.size_bound,
        })
        .expect("query instance serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<QueryInstance> {
        let raw: QueryInstanceJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::InvalidInput(format!("malformed query instance: {e}")))?;
        let domains: Result<Vec<Domain>> = raw.domains.into_iter().map(Domain::new).collect();
        let domains = domains?;
        if domains.len() != raw.n {
            return Err(Error::InvalidInput("domain count differs from n".into()));
        }
        let mut relations = Vec::new();
        for (edge, rows) in raw.edges.iter().zip(raw.relations) {
            let mut sorted = edge.clone();
            sorted.sort_unstable();
            sorted.dedup();
            let mut interned = Vec::new();
            for row in rows {
                if row.len() != edge.len() {
                    return Err(Error::InvalidInput(format!(
                        "tuple of width {} on edge {edge:?}",
                        row.len()
                    )));
                }
                // Symbols arrive in the edge's declared order.
                let mut by_attr: Vec<(usize, &str)> =
                    edge.iter().copied().zip(row.iter().map(String::as_str)).collect();
                by_attr.sort_unstable_by_key(|p| p.0);
                let ids: Result<Vec<u32>> = by_attr
                    .iter()
                    .map(|&(a, sym)| {
                        if a >= raw.n {
                            return Err(Error::InvalidInput(format!("attribute {a} out of range")));
                        }
                        domains[a].id_of(sym).ok_or_else(|| {
                            Error::InvalidInput(format!(
                                "symbol {sym:?} not in domain of attribute {a}"
                            ))
                        })
                    })
                    .collect();
                interned.push(ids?);
            }
            relations.push(Relation::new(sorted, interned)?);
        }
        QueryInstance::new(raw.n, domains, raw.edges, relations, raw.size_bound)
    }

    /// Renders one full-width row back to symbol strings.
    pub fn row_symbols(&self, row: &[u32]) -> Vec<String> {
        row.iter()
            .enumerate()
            .map(|(a, &v)| self.domains[a].symbol(v).to_string())
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The four-attribute cycle with full bipartite relations on each edge:
    /// one conference, four years, one continent, four countries.
    pub fn conference_cycle() -> QueryInstance {
        let domains = vec![
            Domain::new(vec!["ICDT".into()]).unwrap(),
            Domain::new(vec!["2017".into(), "2018".into(), "2019".into(), "2020".into()]).unwrap(),
            Domain::new(vec!["Europe".into()]).unwrap(),
            Domain::new(vec![
                "Austria".into(),
                "Denmark".into(),
                "Italy".into(),
                "Portugal".into(),
            ])
            .unwrap(),
        ];
        let full = |a: usize, b: usize, la: u32, lb: u32| -> (Vec<usize>, Relation) {
            let rows: Vec<Vec<u32>> =
                (0..la).flat_map(|x| (0..lb).map(move |y| vec![x, y])).collect();
            (vec![a, b], Relation::new(vec![a, b], rows).unwrap())
        };
        let (e1, r1) = full(0, 1, 1, 4);
        let (e2, r2) = full(1, 2, 4, 1);
        let (e3, r3) = full(2, 3, 1, 4);
        let (e4, r4) = full(0, 3, 1, 4);
        QueryInstance::new(
            4,
            domains,
            vec![e1, e2, e3, e4],
            vec![r1, r2, r3, r4],
            Some(4),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::conference_cycle;
    use super::*;

    fn t(pairs: &[(usize, u32)]) -> Tuple {
        Tuple::new(pairs.to_vec()).unwrap()
    }

    #[test]
    fn hamming_examples() {
        // Two join rows differing in year and country.
        let a = t(&[(0, 0), (1, 0), (2, 0), (3, 2)]);
        let b = t(&[(0, 0), (1, 1), (2, 0), (3, 0)]);
        assert_eq!(hamming_dist(&a, &b).unwrap(), 2);
        assert_eq!(hamming_dist(&a, &a).unwrap(), 0);
        let c = t(&[(0, 0), (1, 0), (2, 0), (3, 0)]);
        let d = t(&[(0, 0), (1, 0), (2, 0), (3, 1)]);
        assert_eq!(hamming_dist(&c, &d).unwrap(), 1);
    }

    #[test]
    fn hamming_rejects_schema_mismatch() {
        let a = t(&[(0, 0), (1, 0)]);
        let b = t(&[(0, 0), (2, 0)]);
        assert!(matches!(hamming_dist(&a, &b), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn projection_examples() {
        let q = conference_cycle();
        // Edge (2,3) projected to the continent attribute: a single row.
        let r34 = q.relation(q.edges().iter().position(|e| e == &vec![2, 3]).unwrap());
        let p = r34.project(&attr_set([2])).unwrap();
        assert_eq!(p.len(), 1);

        // Identity projection.
        let r12 = q.relation(0);
        assert_eq!(&r12.project(&attr_set(r12.schema().iter().copied())).unwrap(), r12);

        // Edge (0,1) projected to years: all four of them.
        let p = q.relation(0).project(&attr_set([1])).unwrap();
        assert_eq!(p.len(), 4);

        assert!(r12.project(&attr_set([5])).is_err());
    }

    #[test]
    fn naive_join_examples() {
        let q = conference_cycle();
        assert_eq!(naive_join(&q).len(), 16);

        // Any empty relation annihilates the join.
        let empty = q.with_relation(0, Relation::empty(vec![0, 1]).unwrap()).unwrap();
        assert!(naive_join(&empty).is_empty());

        // Two disjoint unary relations: a plain Cartesian product.
        let q2 = QueryInstance::new(
            2,
            vec![Domain::integers(2), Domain::integers(3)],
            vec![vec![0], vec![1]],
            vec![
                Relation::new(vec![0], vec![vec![0], vec![1]]).unwrap(),
                Relation::new(vec![1], vec![vec![0], vec![1], vec![2]]).unwrap(),
            ],
            None,
        )
        .unwrap();
        assert_eq!(naive_join(&q2).len(), 6);
    }

    #[test]
    fn generic_join_matches_naive() {
        let q = conference_cycle();
        let j = naive_join(&q);
        assert_eq!(generic_join(&q, &[0, 1, 2, 3]).unwrap(), j);
        assert_eq!(generic_join(&q, &[3, 1, 0, 2]).unwrap(), j);
        assert!(generic_join(&q, &[0, 1, 2]).is_err());
    }

    #[test]
    fn duplicate_edges_collapse_by_intersection() {
        let d = Domain::integers(3);
        let r1 = Relation::new(vec![0, 1], vec![vec![0, 0], vec![1, 1]]).unwrap();
        let r2 = Relation::new(vec![0, 1], vec![vec![1, 1], vec![2, 2]]).unwrap();
        let q = QueryInstance::new(
            2,
            vec![d.clone(), d],
            vec![vec![0, 1], vec![0, 1]],
            vec![r1, r2],
            None,
        )
        .unwrap();
        assert_eq!(q.edges().len(), 1);
        assert_eq!(q.relation(0).len(), 1);
    }

    #[test]
    fn projected_query_star() {
        let q = conference_cycle();
        let s = attr_set([0, 1, 2]);
        let qs = projected_query(&q, &s).unwrap();
        // Edges (0,1), (1,2) and the unary projection of (2,3); edge (0,3)
        // collapses onto attribute 0.
        assert_eq!(qs.attr_count(), 3);
        let j = naive_join(&qs);
        assert_eq!(j.len(), 4);
        // Projection of the full join has the same cardinality here.
        let full = naive_join(&q);
        assert_eq!(full.project(&s).unwrap().len(), 4);
    }

    #[test]
    fn projection_of_join_contained_in_projected_join() {
        let q = conference_cycle();
        let full = naive_join(&q);
        for s in [attr_set([0, 1]), attr_set([1, 3]), attr_set([0, 1, 2, 3])] {
            let qs = projected_query(&q, &s).unwrap();
            let projected = naive_join(&qs);
            let narrowed = full.project(&s).unwrap();
            for row in narrowed.rows() {
                assert!(projected.contains_row(row));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let q = conference_cycle();
        let json = q.to_json();
        let back = QueryInstance::from_json(&json).unwrap();
        assert_eq!(back, q);
        assert_eq!(back.to_json(), json);
    }
}
