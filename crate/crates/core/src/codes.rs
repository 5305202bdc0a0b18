//! Explicit codebooks over mixed alphabets and the worst-case instance
//! builders that turn them into join queries.
//!
//! The generators cover evaluation codes over prime fields, residue codes
//! over distinct primes, the endpoint-duplication transform for disedge
//! graphs, and the per-row lower-bound instances. Every instance builder
//! enforces the relation-size budget exactly and checks that the join
//! output reproduces the codeword set, since the cover-size argument
//! depends on both.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::lpbounds::Hypergraph;
use crate::pick::classify_case;
use crate::rational::Rat;
use crate::relation::{naive_join, Domain, QueryInstance, Relation};

/// Hard cap on explicitly enumerated codewords.
pub const MAX_CODEWORDS: u128 = 1 << 20;

/// Allowed multiplicative slack on relation sizes in [`crt_from_dual`].
pub const CRT_EDGE_SLACK: u64 = 16;

/// Explicit codeword set with per-coordinate alphabet sizes and the
/// distance the construction is designed to reach.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    pub len: usize,
    pub alphabet_sizes: Vec<u64>,
    pub codewords: Vec<Vec<u64>>,
    pub designed_distance: usize,
}

impl Codebook {
    pub fn size(&self) -> usize {
        self.codewords.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.len,
            "alphabets": self.alphabet_sizes,
            "codewords": self.codewords,
            "delta": self.designed_distance,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Codebook> {
        let n = value["n"]
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("codebook missing n".into()))?
            as usize;
        let alphabet_sizes: Vec<u64> = serde_json::from_value(value["alphabets"].clone())
            .map_err(|e| Error::InvalidInput(format!("bad alphabets: {e}")))?;
        let codewords: Vec<Vec<u64>> = serde_json::from_value(value["codewords"].clone())
            .map_err(|e| Error::InvalidInput(format!("bad codewords: {e}")))?;
        let designed_distance = value["delta"]
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("codebook missing delta".into()))?
            as usize;
        if alphabet_sizes.len() != n || codewords.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("codebook dimensions disagree".into()));
        }
        Ok(Codebook { len: n, alphabet_sizes, codewords, designed_distance })
    }
}

/// Exact minimum pairwise Hamming distance by full scan.
pub fn min_distance(c: &Codebook) -> Result<usize> {
    if c.size() < 2 {
        return Err(Error::Precondition("minimum distance needs at least two codewords".into()));
    }
    let mut best = c.len + 1;
    for i in 0..c.codewords.len() {
        for j in i + 1..c.codewords.len() {
            let d = c.codewords[i]
                .iter()
                .zip(&c.codewords[j])
                .filter(|(a, b)| a != b)
                .count();
            if d < best {
                best = d;
                if best == 0 {
                    return Ok(0);
                }
            }
        }
    }
    Ok(best)
}

// --- primes ------------------------------------------------------------------

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn largest_prime_at_most(x: u64) -> Option<u64> {
    (2..=x).rev().find(|&p| is_prime(p))
}

pub fn smallest_prime_at_least(x: u64) -> u64 {
    let mut p = x.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

pub fn integer_sqrt(x: u64) -> u64 {
    (x as u128).sqrt() as u64
}

// --- evaluation codes over prime fields ---------------------------------------

fn check_prime_field(q: u64) -> Result<()> {
    if !is_prime(q) {
        return Err(Error::InvalidInput(format!("{q} is not prime")));
    }
    if q >= 1 << 31 {
        return Err(Error::DeskScaleLimit(format!("field size {q} too large")));
    }
    Ok(())
}

fn eval_poly(coeffs: &[u64], x: u64, q: u64) -> u64 {
    // Horner, highest coefficient first.
    coeffs.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % q)
}

fn guard_size(size: u128) -> Result<usize> {
    if size > MAX_CODEWORDS {
        return Err(Error::DeskScaleLimit(format!(
            "{size} codewords exceed the enumeration cap {MAX_CODEWORDS}"
        )));
    }
    Ok(size as usize)
}

/// Evaluation code with an explicit message dimension `k`: codewords are
/// evaluations of all polynomials of degree below `k` at the given points.
/// Minimum distance is exactly `len - k + 1`.
fn evaluation_code(
    q: u64,
    eval_points: &[u64],
    k: usize,
    designed_distance: usize,
) -> Result<Codebook> {
    check_prime_field(q)?;
    let len = eval_points.len();
    if k == 0 || k > len {
        return Err(Error::Precondition(format!("message dimension {k} outside 1..={len}")));
    }
    let mut sorted = eval_points.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != len || eval_points.iter().any(|&p| p >= q) {
        return Err(Error::InvalidInput(
            "evaluation points must be distinct field elements".into(),
        ));
    }
    let size = guard_size((q as u128).pow(k as u32))?;
    let mut codewords = Vec::with_capacity(size);
    let mut message = vec![0u64; k];
    loop {
        codewords.push(eval_points.iter().map(|&x| eval_poly(&message, x, q)).collect());
        let mut i = 0;
        loop {
            if i == k {
                return Ok(Codebook {
                    len,
                    alphabet_sizes: vec![q; len],
                    codewords,
                    designed_distance,
                });
            }
            message[i] += 1;
            if message[i] < q {
                break;
            }
            message[i] = 0;
            i += 1;
        }
    }
}

/// Polynomial-evaluation code of length `n` and minimum distance exactly
/// `delta` over the prime field of size `q`, using evaluation points
/// `0..n` unless others are supplied.
pub fn rs_codebook(
    q: u64,
    n: usize,
    delta: usize,
    eval_points: Option<&[u64]>,
) -> Result<Codebook> {
    check_prime_field(q)?;
    if n as u64 > q {
        return Err(Error::Precondition(format!("length {n} exceeds field size {q}")));
    }
    if delta == 0 || delta > n {
        return Err(Error::Precondition(format!("distance {delta} outside 1..={n}")));
    }
    let default_points: Vec<u64> = (0..n as u64).collect();
    let points = eval_points.unwrap_or(&default_points);
    if points.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} evaluation points for length {n}",
            points.len()
        )));
    }
    evaluation_code(q, points, n - delta + 1, delta)
}

/// Lengthens an `(n, q^{n-delta+1}, delta)` code by `t` extra evaluation
/// points, giving designed distance `delta + t`. Needs `q >= n + t`.
pub fn rs_extend(q: u64, n: usize, delta: usize, t: usize) -> Result<Codebook> {
    if (n + t) as u64 > q {
        return Err(Error::Precondition(format!(
            "field size {q} cannot host {} evaluation points",
            n + t
        )));
    }
    if delta == 0 || delta > n {
        return Err(Error::Precondition(format!("distance {delta} outside 1..={n}")));
    }
    let points: Vec<u64> = (0..(n + t) as u64).collect();
    evaluation_code(q, &points, n - delta + 1, delta + t)
}

/// Evaluation code allowing length `q + 1`: the extra coordinate carries
/// the top message coefficient, which preserves distance `len - k + 1`.
fn extended_evaluation_code(q: u64, len: usize, k: usize, designed: usize) -> Result<Codebook> {
    if len as u64 <= q {
        let points: Vec<u64> = (0..len as u64).collect();
        return evaluation_code(q, &points, k, designed);
    }
    if len as u64 != q + 1 {
        return Err(Error::Precondition(format!(
            "length {len} exceeds field size {q} by more than one"
        )));
    }
    check_prime_field(q)?;
    let size = guard_size((q as u128).pow(k as u32))?;
    let points: Vec<u64> = (0..q).collect();
    let mut codewords = Vec::with_capacity(size);
    let mut message = vec![0u64; k];
    loop {
        let mut word: Vec<u64> = points.iter().map(|&x| eval_poly(&message, x, q)).collect();
        word.push(message[k - 1]);
        codewords.push(word);
        let mut i = 0;
        loop {
            if i == k {
                return Ok(Codebook {
                    len,
                    alphabet_sizes: vec![q; len],
                    codewords,
                    designed_distance: designed,
                });
            }
            message[i] += 1;
            if message[i] < q {
                break;
            }
            message[i] = 0;
            i += 1;
        }
    }
}

// --- residue codes -------------------------------------------------------------

/// Residue code over strictly increasing distinct primes: codewords are the
/// residue vectors of all integers below the product of the first `k`
/// moduli; minimum distance is at least `n - k + 1`.
pub fn crt_codebook(primes: &[u64], k: usize) -> Result<Codebook> {
    let n = primes.len();
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("k={k} outside 1..={n}")));
    }
    for w in primes.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidInput("moduli must be strictly increasing".into()));
        }
    }
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("modulus {p} is not prime")));
        }
    }
    let m: u128 = primes[..k].iter().map(|&p| p as u128).product();
    let size = guard_size(m)?;
    let codewords = (0..size as u128)
        .map(|msg| primes.iter().map(|&p| (msg % p as u128) as u64).collect())
        .collect();
    Ok(Codebook {
        len: n,
        alphabet_sizes: primes.to_vec(),
        codewords,
        designed_distance: n - k + 1,
    })
}

/// Residue code with a per-vertex prime assignment (not necessarily
/// sorted) and full message range: all residue vectors of integers below
/// the product of every modulus.
fn crt_profile_codebook(primes_by_vertex: &[u64]) -> Result<Codebook> {
    let mut sorted = primes_by_vertex.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidInput("vertex primes must be distinct".into()));
        }
    }
    for &p in primes_by_vertex {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("modulus {p} is not prime")));
        }
    }
    let m: u128 = primes_by_vertex.iter().map(|&p| p as u128).product();
    let size = guard_size(m)?;
    let codewords = (0..size as u128)
        .map(|msg| primes_by_vertex.iter().map(|&p| (msg % p as u128) as u64).collect())
        .collect();
    Ok(Codebook {
        len: primes_by_vertex.len(),
        alphabet_sizes: primes_by_vertex.to_vec(),
        codewords,
        designed_distance: 1,
    })
}

// --- endpoint duplication -------------------------------------------------------

/// Parameters of the disedge construction: matched-vertex count, singleton
/// count, and the distance surplus the duplication must produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisedgeParams {
    pub matched_vertex_count: usize,
    pub singleton_count: usize,
    pub distance_surplus: usize,
}

/// Duplicates the first `matched/2` coordinates of an extended evaluation
/// code, one pair per matched edge, leaving the singleton coordinates
/// untouched. The designed distance `surplus + singletons` is re-verified
/// by brute force rather than trusted.
pub fn duplicated_code(extended: &Codebook, params: &DisedgeParams) -> Result<Codebook> {
    let ns = params.matched_vertex_count;
    let nt = params.singleton_count;
    let ds = params.distance_surplus;
    if ds == 0 || ds % 2 != 0 {
        return Err(Error::Precondition(format!("distance surplus {ds} must be positive even")));
    }
    if ns % 2 != 0 {
        return Err(Error::Precondition("matched vertex count must be even".into()));
    }
    if extended.len != ns / 2 + nt {
        return Err(Error::Precondition(format!(
            "input length {} does not match {} pairs plus {} singletons",
            extended.len,
            ns / 2,
            nt
        )));
    }
    let designed = ds + nt;
    let mut alphabet_sizes = Vec::with_capacity(ns + nt);
    for pair in 0..ns / 2 {
        let a = extended.alphabet_sizes[pair];
        alphabet_sizes.push(a);
        alphabet_sizes.push(a);
    }
    alphabet_sizes.extend_from_slice(&extended.alphabet_sizes[ns / 2..]);
    let mut codewords = Vec::with_capacity(extended.size());
    for word in &extended.codewords {
        let mut out = Vec::with_capacity(ns + nt);
        for &v in &word[..ns / 2] {
            out.push(v);
            out.push(v);
        }
        out.extend_from_slice(&word[ns / 2..]);
        codewords.push(out);
    }
    let code = Codebook { len: ns + nt, alphabet_sizes, codewords, designed_distance: designed };
    if code.size() >= 2 {
        let measured = min_distance(&code)?;
        if measured < designed {
            return Err(Error::Internal(format!(
                "duplicated code reaches distance {measured}, designed {designed}"
            )));
        }
    }
    Ok(code)
}

// --- instances from codebooks ------------------------------------------------

/// Builds the query instance whose relation on each edge is the projection
/// of the codeword set, over integer domains sized by the alphabets.
pub fn instance_from_codebook(h: &Hypergraph, c: &Codebook) -> Result<QueryInstance> {
    if c.len != h.n {
        return Err(Error::Precondition(format!(
            "codebook length {} does not match {} vertices",
            c.len, h.n
        )));
    }
    let domains: Vec<Domain> = c.alphabet_sizes.iter().map(|&a| Domain::integers(a)).collect();
    let mut edges = Vec::new();
    let mut relations = Vec::new();
    for e in h.edges() {
        let rows: Vec<Vec<u32>> = c
            .codewords
            .iter()
            .map(|w| e.iter().map(|&v| w[v] as u32).collect())
            .collect();
        edges.push(e.clone());
        relations.push(Relation::new(e.clone(), rows)?);
    }
    QueryInstance::new(h.n, domains, edges, relations, None)
}

// --- blocked diagonal construction ---------------------------------------------

#[derive(Debug, Clone)]
struct Block {
    vertices: Vec<usize>,
    /// Alphabet exponent in units of `q`: the block ranges over `q^weight`.
    weight: u8,
}

/// Connected vertex subsets of size at least `min_size`, as sorted vertex
/// lists ordered by (smallest vertex, size).
fn connected_subsets(g: &Graph, min_size: usize) -> Vec<Vec<usize>> {
    let n = g.n;
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if verts.len() < min_size {
            continue;
        }
        // Connectivity by flood fill inside the mask.
        let mut seen = vec![false; n];
        let mut stack = vec![verts[0]];
        seen[verts[0]] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for w in g.neighbors(u) {
                if mask >> w & 1 == 1 && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count == verts.len() {
            out.push(verts);
        }
    }
    out.sort_by_key(|v| (v[0], v.len(), v.clone()));
    out
}

fn blocks_compatible(g: &Graph, a: &Block, b: &Block) -> bool {
    if a.weight + b.weight <= 2 {
        return true;
    }
    // Heavier pairings must not be adjacent.
    !a.vertices
        .iter()
        .any(|&u| g.neighbors(u).any(|w| b.vertices.binary_search(&w).is_ok()))
}

/// Searches for vertex-disjoint connected blocks of size at least `delta`
/// whose weights sum to `s`, such that no two adjacent blocks exceed a
/// combined weight of two. Returns `None` when no family exists.
fn find_blocks(g: &Graph, s: usize, delta: usize) -> Option<Vec<Block>> {
    if delta == 1 {
        // Full product: every vertex is its own unit block.
        if s != g.n {
            return None;
        }
        return Some((0..g.n).map(|v| Block { vertices: vec![v], weight: 1 }).collect());
    }
    if g.n > 16 {
        return None;
    }
    let candidates = connected_subsets(g, delta);
    fn search(
        g: &Graph,
        candidates: &[Vec<usize>],
        from: usize,
        used: &mut Vec<bool>,
        chosen: &mut Vec<Block>,
        remaining: usize,
    ) -> bool {
        if remaining == 0 {
            return true;
        }
        for i in from..candidates.len() {
            let verts = &candidates[i];
            if verts.iter().any(|&v| used[v]) {
                continue;
            }
            for weight in [2u8, 1u8] {
                if (weight as usize) > remaining {
                    continue;
                }
                let block = Block { vertices: verts.clone(), weight };
                if !chosen.iter().all(|b| blocks_compatible(g, b, &block)) {
                    continue;
                }
                for &v in verts {
                    used[v] = true;
                }
                chosen.push(block);
                if search(g, candidates, i + 1, used, chosen, remaining - weight as usize) {
                    return true;
                }
                chosen.pop();
                for &v in verts {
                    used[v] = false;
                }
            }
        }
        false
    }
    let mut used = vec![false; g.n];
    let mut chosen = Vec::new();
    if search(g, &candidates, 0, &mut used, &mut chosen, s) {
        Some(chosen)
    } else {
        None
    }
}

/// Codebook of a blocked-diagonal construction: all coordinates of a block
/// carry the same symbol from an alphabet of size `q^weight`, non-block
/// coordinates are constant, and codewords range over the full product of
/// the blocks. Within-block relations come out as diagonals, cross-block
/// relations as full products, so the join reproduces the codeword set.
fn blocked_codebook(n: usize, blocks: &[Block], q: u64, delta: usize) -> Result<Codebook> {
    let mut alphabet_sizes = vec![1u64; n];
    for b in blocks {
        let a = (q as u128).pow(b.weight as u32);
        for &v in &b.vertices {
            alphabet_sizes[v] = a as u64;
        }
    }
    let size: u128 = blocks.iter().map(|b| (q as u128).pow(b.weight as u32)).product();
    let size = guard_size(size)?;
    let mut codewords = Vec::with_capacity(size);
    let mut values: Vec<u64> = vec![0; blocks.len()];
    loop {
        let mut word = vec![0u64; n];
        for (b, &val) in blocks.iter().zip(&values) {
            for &v in &b.vertices {
                word[v] = val;
            }
        }
        codewords.push(word);
        let mut i = 0;
        loop {
            if i == blocks.len() {
                return Ok(Codebook {
                    len: n,
                    alphabet_sizes,
                    codewords,
                    designed_distance: delta,
                });
            }
            values[i] += 1;
            if values[i] < alphabet_sizes[blocks[i].vertices[0]] {
                break;
            }
            values[i] = 0;
            i += 1;
        }
    }
}

// --- lower-bound instances -------------------------------------------------------

/// A worst-case instance: the query, the codebook its join realizes, and
/// the cover size the construction predicts.
#[derive(Debug, Clone)]
pub struct LowerBoundInstance {
    pub row: u8,
    pub query: QueryInstance,
    pub codebook: Codebook,
    pub predicted_cover_size: u128,
}

fn verify_join_equals_codebook(q: &QueryInstance, c: &Codebook) -> Result<()> {
    if c.size() as u128 > 200_000 {
        return Ok(());
    }
    let join = naive_join(q);
    if join.len() != c.size() {
        return Err(Error::Internal(format!(
            "join has {} tuples, codebook {}",
            join.len(),
            c.size()
        )));
    }
    for word in &c.codewords {
        let row: Vec<u32> = word.iter().map(|&v| v as u32).collect();
        if !join.contains_row(&row) {
            return Err(Error::Internal("codeword missing from join".into()));
        }
    }
    Ok(())
}

fn covered_everywhere(g: &Graph) -> Result<()> {
    for v in 0..g.n {
        if g.neighbors(v).next().is_none() && !g.has_loop(v) {
            return Err(Error::InvalidInput(format!(
                "vertex {v} lies in no edge; add a self-loop to carry its relation"
            )));
        }
    }
    Ok(())
}

fn with_size_bound(q: QueryInstance, bound: u64) -> Result<QueryInstance> {
    QueryInstance::new(
        q.attr_count(),
        q.domains().to_vec(),
        q.edges().to_vec(),
        q.relations().to_vec(),
        Some(bound as usize),
    )
}

/// Builds the worst-case instance for `(g, N, delta)` according to the
/// classified row.
///
/// Every produced instance satisfies: all relations within the size
/// budget, join output equal to the codeword set, and pairwise codeword
/// distance at least `delta` -- so the smallest cover is the whole join.
/// Rows whose construction cannot meet the join-equality requirement on
/// the given graph return `Unsupported`.
pub fn lower_bound_instance(g: &Graph, n_bound: u64, delta: usize) -> Result<LowerBoundInstance> {
    if n_bound < 4 {
        return Err(Error::Precondition("size budget must be at least 4".into()));
    }
    covered_everywhere(g)?;
    let case = classify_case(g, delta)?;
    let s = case.s;
    let h = g.to_hypergraph();
    match case.row {
        1 => {
            if g.components().len() != 1 {
                return Err(Error::Unsupported(
                    "the diagonal instance needs a connected graph".into(),
                ));
            }
            let q = largest_prime_at_most(n_bound)
                .ok_or_else(|| Error::Unsupported("no prime within the size budget".into()))?;
            let codebook = Codebook {
                len: g.n,
                alphabet_sizes: vec![q; g.n],
                codewords: (0..q).map(|i| vec![i; g.n]).collect(),
                designed_distance: g.n,
            };
            let query = with_size_bound(instance_from_codebook(&h, &codebook)?, n_bound)?;
            verify_join_equals_codebook(&query, &codebook)?;
            Ok(LowerBoundInstance { row: 1, query, codebook, predicted_cover_size: q as u128 })
        }
        2 | 3 | 5 => {
            let root = integer_sqrt(n_bound);
            let q = largest_prime_at_most(root).ok_or_else(|| {
                Error::Unsupported("no prime below the square root budget".into())
            })?;
            let blocks = find_blocks(g, s, delta).ok_or_else(|| {
                Error::Unsupported(format!(
                    "no diagonal block family of total weight {s} with blocks of {delta}+ vertices"
                ))
            })?;
            let codebook = blocked_codebook(g.n, &blocks, q, delta)?;
            let query = with_size_bound(instance_from_codebook(&h, &codebook)?, n_bound)?;
            verify_join_equals_codebook(&query, &codebook)?;
            Ok(LowerBoundInstance {
                row: case.row,
                query,
                codebook,
                predicted_cover_size: (q as u128).pow(s as u32),
            })
        }
        4 => {
            let m = crate::graphs::maximum_matching(g);
            let ns = m.matched_vertex_count();
            let nt = g.n - ns;
            let surplus = (ns + 1)
                .checked_sub(s)
                .filter(|d| d % 2 == 0 && *d > 0)
                .ok_or_else(|| {
                    Error::Precondition("distance surplus must be positive even".into())
                })?;
            if surplus != 2 || nt != 0 {
                return Err(Error::Unsupported(
                    "the duplication instance realizes its codebook only on perfect-matching \
                     disedges with surplus two"
                        .into(),
                ));
            }
            let q = largest_prime_at_most(n_bound)
                .ok_or_else(|| Error::Unsupported("no prime within the size budget".into()))?;
            let pairs = ns / 2;
            let base = extended_evaluation_code(q, pairs, pairs, 1)?;
            let params = DisedgeParams {
                matched_vertex_count: ns,
                singleton_count: 0,
                distance_surplus: surplus,
            };
            let duplicated = duplicated_code(&base, &params)?;
            // Reorder coordinates so each matched edge owns one duplicated
            // pair.
            let mut perm = vec![0usize; g.n];
            for (i, &(u, v)) in m.edges.iter().enumerate() {
                perm[u] = 2 * i;
                perm[v] = 2 * i + 1;
            }
            let codebook = Codebook {
                len: g.n,
                alphabet_sizes: (0..g.n).map(|v| duplicated.alphabet_sizes[perm[v]]).collect(),
                codewords: duplicated
                    .codewords
                    .iter()
                    .map(|w| (0..g.n).map(|v| w[perm[v]]).collect())
                    .collect(),
                designed_distance: duplicated.designed_distance,
            };
            let query = with_size_bound(instance_from_codebook(&h, &codebook)?, n_bound)?;
            verify_join_equals_codebook(&query, &codebook)?;
            let predicted = (q as u128).pow(((s + 1) / 2) as u32);
            Ok(LowerBoundInstance { row: 4, query, codebook, predicted_cover_size: predicted })
        }
        _ => {
            if delta != 1 {
                return Err(Error::Unsupported(
                    "singleton vertices admit no join-realizable code of distance above one"
                        .into(),
                ));
            }
            let primes = dual_prime_profile(g, n_bound)?;
            let codebook = crt_profile_codebook(&primes)?;
            let query = with_size_bound(instance_from_codebook(&h, &codebook)?, n_bound)?;
            verify_join_equals_codebook(&query, &codebook)?;
            let predicted: u128 = primes.iter().map(|&p| p as u128).product();
            Ok(LowerBoundInstance { row: 6, query, codebook, predicted_cover_size: predicted })
        }
    }
}

/// Distinct primes per vertex following the canonical half-integral dual:
/// zeros take the smallest primes, halves primes near the square root of
/// the budget (shrinking as assigned neighbors demand), ones the largest
/// primes their assigned neighbors leave room for. Every edge product is
/// verified against the budget at the end.
fn dual_prime_profile(g: &Graph, n_bound: u64) -> Result<Vec<u64>> {
    use crate::lpbounds::HalfValue;
    let d = crate::graphs::decompose(g)?;
    let mut primes = vec![0u64; g.n];
    let mut used: std::collections::BTreeSet<u64> = std::collections::BTreeSet::new();
    let take_smallest = |used: &mut std::collections::BTreeSet<u64>| -> u64 {
        let mut p = 2;
        while used.contains(&p) {
            p = smallest_prime_at_least(p + 1);
        }
        used.insert(p);
        p
    };
    let take_largest_below =
        |used: &mut std::collections::BTreeSet<u64>, cap: u64| -> Result<u64> {
            let mut cap = cap;
            loop {
                let p = largest_prime_at_most(cap).ok_or_else(|| {
                    Error::Unsupported("prime budget exhausted during assignment".into())
                })?;
                if !used.contains(&p) {
                    used.insert(p);
                    return Ok(p);
                }
                cap = p - 1;
            }
        };
    for v in 0..g.n {
        if d.dual.value(v) == HalfValue::Zero {
            primes[v] = take_smallest(&mut used);
        }
    }
    let root = integer_sqrt(n_bound);
    for v in 0..g.n {
        if d.dual.value(v) == HalfValue::Half {
            // Budget against assigned neighbors; while half-valued
            // neighbors are still pending, stay at the square-root scale
            // so they keep room.
            let assigned_cap = g
                .neighbors(v)
                .filter(|&u| primes[u] > 0)
                .map(|u| n_bound / primes[u])
                .min()
                .unwrap_or(n_bound);
            let pending_half = g
                .neighbors(v)
                .any(|u| primes[u] == 0 && d.dual.value(u) == HalfValue::Half);
            let cap = if pending_half { assigned_cap.min(root) } else { assigned_cap };
            primes[v] = take_largest_below(&mut used, cap)?;
        }
    }
    for v in 0..g.n {
        if d.dual.value(v) == HalfValue::One {
            let neighbor_max =
                g.neighbors(v).map(|u| primes[u]).filter(|&p| p > 0).max().unwrap_or(1);
            primes[v] = take_largest_below(&mut used, n_bound / neighbor_max)?;
        }
    }
    for e in g.edge_sets() {
        let product: u128 = e.iter().map(|&v| primes[v] as u128).product();
        if product > n_bound as u128 {
            return Err(Error::Unsupported(format!(
                "edge {e:?} carries alphabet product {product} above the budget {n_bound}"
            )));
        }
    }
    Ok(primes)
}

/// Residue-code instance from a feasible fractional packing `y`: each
/// vertex takes the smallest unused prime of order `N^{y_v}`, relations
/// are codeword projections, and edge alphabets stay within a declared
/// slack factor of the budget.
pub fn crt_from_dual(
    h: &Hypergraph,
    n_bound: u64,
    y: &[Rat],
    k: usize,
) -> Result<(QueryInstance, Codebook)> {
    use num_traits::Zero;
    if y.len() != h.n {
        return Err(Error::Precondition(format!("{} weights for {} vertices", y.len(), h.n)));
    }
    if y.iter().all(Zero::is_zero) {
        return Err(Error::InvalidInput("all-zero weights give a degenerate code".into()));
    }
    for e in h.edges() {
        let total: Rat = e.iter().map(|&v| y[v].clone()).sum();
        if total > crate::rational::rat(1) {
            return Err(Error::Precondition(format!("weights exceed one on edge {e:?}")));
        }
    }
    let mut used: std::collections::BTreeSet<u64> = std::collections::BTreeSet::new();
    let mut primes = Vec::with_capacity(h.n);
    for v in 0..h.n {
        let target = rational_power(n_bound, &y[v])?;
        let mut p = smallest_prime_at_least(target.max(2));
        while used.contains(&p) {
            p = smallest_prime_at_least(p + 1);
        }
        // Constant-order targets may slide upward for distinctness; the
        // four-times guard polices only the large-prime searches.
        if target > 64 && p > 4 * target {
            return Err(Error::Unsupported(format!(
                "no unused prime within four times the weight target for vertex {v}"
            )));
        }
        used.insert(p);
        primes.push(p);
    }
    if k == 0 || k > h.n {
        return Err(Error::Precondition(format!("k={k} outside 1..={}", h.n)));
    }
    let sorted: Vec<u64> = {
        let mut s = primes.clone();
        s.sort_unstable();
        s
    };
    let m: u128 = sorted[..k].iter().map(|&p| p as u128).product();
    guard_size(m)?;
    let codewords: Vec<Vec<u64>> = (0..m)
        .map(|msg| primes.iter().map(|&p| (msg % p as u128) as u64).collect())
        .collect();
    let codebook = Codebook {
        len: h.n,
        alphabet_sizes: primes.clone(),
        codewords,
        designed_distance: h.n - k + 1,
    };
    let query = instance_from_codebook(h, &codebook)?;
    for (e, rel) in query.edges().iter().zip(query.relations()) {
        if rel.len() as u64 > CRT_EDGE_SLACK * n_bound {
            return Err(Error::Unsupported(format!(
                "relation on {e:?} exceeds the slack budget"
            )));
        }
    }
    Ok((query, codebook))
}

/// Smallest integer at least `N^y` for rational `y` in `[0, 1]`.
fn rational_power(n_bound: u64, y: &Rat) -> Result<u64> {
    use num_traits::Zero;
    if y.is_negative() {
        return Err(Error::Precondition("negative weight".into()));
    }
    if y.is_zero() {
        return Ok(1);
    }
    let p = y.numer().to_u32().ok_or_else(|| Error::DeskScaleLimit("weight too large".into()))?;
    let r = y.denom().to_u32().ok_or_else(|| Error::DeskScaleLimit("weight too large".into()))?;
    let raised = BigInt::from(n_bound).pow(p);
    let root = raised.nth_root(r);
    let value = if root.clone().pow(r) < raised { root + 1 } else { root };
    value
        .to_u64()
        .ok_or_else(|| Error::DeskScaleLimit("prime target exceeds machine range".into()))
}

/// Convenience wrapper building the instance on a graph's hypergraph.
pub fn graph_instance_from_codebook(g: &Graph, c: &Codebook) -> Result<QueryInstance> {
    instance_from_codebook(&g.to_hypergraph(), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::fixtures::{cycle, decomposition_example};
    use crate::rational::ratio;

    #[test]
    fn rs_examples() {
        // Binary repetition pair.
        let c = rs_codebook(2, 2, 2, None).unwrap();
        assert_eq!(c.size(), 2);
        assert_eq!(c.codewords, vec![vec![0, 0], vec![1, 1]]);

        // q=5, n=4, delta=2: 125 words at measured distance exactly 2.
        let c = rs_codebook(5, 4, 2, None).unwrap();
        assert_eq!(c.size(), 125);
        assert_eq!(min_distance(&c).unwrap(), 2);

        // q=7, n=4, delta=4: constants, distance 4.
        let c = rs_codebook(7, 4, 4, None).unwrap();
        assert_eq!(c.size(), 7);
        assert_eq!(min_distance(&c).unwrap(), 4);

        assert!(rs_codebook(6, 3, 2, None).is_err());
        assert!(rs_codebook(3, 4, 2, None).is_err());
    }

    #[test]
    fn rs_extension_examples() {
        // (5,3,2) extended by one point: (4, 25, 3).
        let c = rs_extend(5, 3, 2, 1).unwrap();
        assert_eq!((c.len, c.size()), (4, 25));
        assert_eq!(min_distance(&c).unwrap(), 3);

        // t = 0 leaves the code unchanged.
        let base = rs_codebook(5, 3, 2, None).unwrap();
        let same = rs_extend(5, 3, 2, 0).unwrap();
        assert_eq!(base.codewords, same.codewords);

        // (7,2,1) extended by two: (4, 49, 3).
        let c = rs_extend(7, 2, 1, 2).unwrap();
        assert_eq!((c.len, c.size()), (4, 49));
        assert_eq!(min_distance(&c).unwrap(), 3);

        assert!(rs_extend(5, 4, 2, 3).is_err());
    }

    #[test]
    fn crt_examples() {
        let c = crt_codebook(&[2, 3, 5], 2).unwrap();
        assert_eq!(c.size(), 6);
        // Message 4 encodes as residues (0, 1, 4).
        assert_eq!(c.codewords[4], vec![0, 1, 4]);
        assert_eq!(min_distance(&c).unwrap(), 2);
        assert_eq!(c.designed_distance, 2);

        let c = crt_codebook(&[2, 3], 2).unwrap();
        assert_eq!(c.size(), 6);
        assert!(min_distance(&c).unwrap() >= 1);

        assert!(crt_codebook(&[3, 2], 1).is_err());
        assert!(crt_codebook(&[2, 4], 1).is_err());
    }

    #[test]
    fn duplication_examples() {
        // Four matched vertices, no singletons, surplus two over q=5:
        // 25 words of length 4 at distance 2.
        let base = extended_evaluation_code(5, 2, 2, 1).unwrap();
        let params = DisedgeParams {
            matched_vertex_count: 4,
            singleton_count: 0,
            distance_surplus: 2,
        };
        let c = duplicated_code(&base, &params).unwrap();
        assert_eq!((c.len, c.size()), (4, 25));
        assert_eq!(min_distance(&c).unwrap(), 2);

        // One matched pair plus a singleton: (3, 5, 3).
        let base = rs_extend(5, 1, 1, 1).unwrap();
        let params = DisedgeParams {
            matched_vertex_count: 2,
            singleton_count: 1,
            distance_surplus: 2,
        };
        let c = duplicated_code(&base, &params).unwrap();
        assert_eq!((c.len, c.size()), (3, 5));
        assert_eq!(min_distance(&c).unwrap(), 3);
    }

    #[test]
    fn min_distance_guards() {
        let c = Codebook {
            len: 2,
            alphabet_sizes: vec![2, 2],
            codewords: vec![vec![0, 0]],
            designed_distance: 1,
        };
        assert!(min_distance(&c).is_err());
        let c = Codebook {
            len: 2,
            alphabet_sizes: vec![2, 2],
            codewords: vec![vec![0, 0], vec![0, 0]],
            designed_distance: 1,
        };
        // Duplicate codewords collapse to distance zero.
        assert_eq!(min_distance(&c).unwrap(), 0);
    }

    #[test]
    fn instance_projection_examples() {
        // Single full edge: the relation is the codeword set itself.
        let c = rs_codebook(5, 3, 2, None).unwrap();
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let q = instance_from_codebook(&h, &c).unwrap();
        assert_eq!(q.relation(0).len(), c.size());

        // Repetition code on a cycle: every relation is a diagonal.
        let diag = Codebook {
            len: 4,
            alphabet_sizes: vec![5; 4],
            codewords: (0..5).map(|i| vec![i; 4]).collect(),
            designed_distance: 4,
        };
        let q = graph_instance_from_codebook(&cycle(4), &diag).unwrap();
        for rel in q.relations() {
            assert_eq!(rel.len(), 5);
            assert!(rel.rows().iter().all(|r| r[0] == r[1]));
        }
    }

    #[test]
    fn lower_bound_row1() {
        let g = cycle(4);
        let inst = lower_bound_instance(&g, 8, 4).unwrap();
        assert_eq!(inst.row, 1);
        // Largest prime within the budget, at least half of it.
        assert_eq!(inst.predicted_cover_size, 7);
        assert_eq!(naive_join(&inst.query).len(), 7);
    }

    #[test]
    fn lower_bound_row2_four_cycle() {
        let g = cycle(4);
        let inst = lower_bound_instance(&g, 9, 3).unwrap();
        assert_eq!(inst.row, 2);
        assert_eq!(inst.predicted_cover_size, 9);
        assert_eq!(naive_join(&inst.query).len(), 9);
        assert!(min_distance(&inst.codebook).unwrap() >= 3);
        for rel in inst.query.relations() {
            assert!(rel.len() <= 9);
        }
    }

    #[test]
    fn lower_bound_row2_disjoint_components() {
        // Path plus a disjoint edge at s = 4: two weight-two blocks.
        let g = Graph::new(5, vec![(0, 1), (1, 2), (3, 4)]).unwrap();
        let inst = lower_bound_instance(&g, 9, 2).unwrap();
        assert_eq!(inst.row, 2);
        assert_eq!(inst.predicted_cover_size, 81);
        assert_eq!(naive_join(&inst.query).len(), 81);
        assert!(min_distance(&inst.codebook).unwrap() >= 2);
    }

    #[test]
    fn lower_bound_row3_has_no_realizable_code() {
        // Odd light case on the four-cycle: no family of diagonal blocks
        // reaches total weight three with every block of two-plus vertices
        // non-adjacent as required, so the construction refuses.
        let g = cycle(4);
        assert!(matches!(
            lower_bound_instance(&g, 9, 2),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn lower_bound_row4_disedge() {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        let inst = lower_bound_instance(&g, 5, 2).unwrap();
        assert_eq!(inst.row, 4);
        assert_eq!(inst.predicted_cover_size, 25);
        assert_eq!(naive_join(&inst.query).len(), 25);
        assert!(min_distance(&inst.codebook).unwrap() >= 2);
    }

    #[test]
    fn lower_bound_row5_triangle() {
        let g = cycle(3);
        let inst = lower_bound_instance(&g, 9, 1).unwrap();
        assert_eq!(inst.row, 5);
        assert_eq!(inst.predicted_cover_size, 27);
        assert_eq!(naive_join(&inst.query).len(), 27);
    }

    #[test]
    fn lower_bound_row6_example_graph() {
        let g = decomposition_example();
        let inst = lower_bound_instance(&g, 35, 1).unwrap();
        assert_eq!(inst.row, 6);
        let join = naive_join(&inst.query);
        assert_eq!(join.len() as u128, inst.predicted_cover_size);
        for rel in inst.query.relations() {
            assert!(rel.len() <= 35);
        }
    }

    #[test]
    fn crt_from_dual_examples() {
        let h = cycle(4).to_hypergraph();
        let half = ratio(1, 2);
        let y = vec![half.clone(), half.clone(), half.clone(), half];
        let (q, c) = crt_from_dual(&h, 100, &y, 2).unwrap();
        assert!(c.alphabet_sizes.iter().all(|&p| p >= 10));
        for rel in q.relations() {
            assert!((rel.len() as u64) <= CRT_EDGE_SLACK * 100);
        }

        // Indicator weight on unary edges: one big prime, the rest minimal.
        let y = vec![crate::rational::rat(1), ratio(0, 1), ratio(0, 1), ratio(0, 1)];
        let h1 = Hypergraph::new(4, vec![vec![0], vec![1], vec![2], vec![3]]).unwrap();
        let (_, c) = crt_from_dual(&h1, 50, &y, 1).unwrap();
        assert!(c.alphabet_sizes[0] >= 50);

        // Degenerate all-zero weights are rejected.
        let y = vec![ratio(0, 1); 4];
        assert!(crt_from_dual(&h, 50, &y, 1).is_err());
    }

    #[test]
    fn codebook_json_round_trip() {
        let c = rs_codebook(3, 3, 2, None).unwrap();
        let j = c.to_json();
        assert_eq!(Codebook::from_json(&j).unwrap(), c);
    }
}
