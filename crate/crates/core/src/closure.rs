//! The commutation graph of a finite ring and commutative closures.
//!
//! Two distinct elements are adjacent when one is `cd` and the other `dc` for
//! some `c, d`. The graph is built by sweeping every ordered pair once; the
//! connected components are exactly the commutative closures of singletons,
//! and the BFS depth from a seed set is the index of the first `S_i` that
//! contains an element.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ring::{ElementId, RingDescriptor, RingHandle, SIZE_GUARD};

/// Dense bitset deduplication is used up to this many elements.
pub const BITSET_LIMIT: u32 = 1 << 15;

/// Cap on distinct edges held by the sparse (hash) path.
pub const EDGE_BUDGET: u64 = 1 << 28;

#[derive(Debug, Clone, Copy, Default)]
pub struct GraphOptions {
    /// Worker threads for the pair sweep; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Allow rings above [`SIZE_GUARD`].
    pub allow_large: bool,
}

/// Undirected simple graph on element ids, stored as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationGraph {
    ring: RingDescriptor,
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
    components: Vec<u32>,
    members: Vec<Vec<u32>>,
    edge_count: u64,
}

impl CommutationGraph {
    /// Builds from an edge list with `u < v`, sorted ascending and
    /// deduplicated.
    pub fn from_sorted_edges(ring: RingDescriptor, size: u32, edges: &[(u32, u32)]) -> Result<Self> {
        let n = size as usize;
        let mut degree = vec![0usize; n];
        let mut prev: Option<(u32, u32)> = None;
        for &(u, v) in edges {
            if u >= v || v >= size {
                return Err(Error::InvalidArgument(format!("bad edge ({u}, {v})")));
            }
            if prev.is_some_and(|p| p >= (u, v)) {
                return Err(Error::InvalidArgument("edges must be sorted and unique".into()));
            }
            prev = Some((u, v));
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![0u32; offsets[n]];
        // Scanning edges in (u, v) order appends each endpoint's partners in
        // ascending order: for vertex w, partners u < w arrive first (sorted
        // by u), then partners v > w (sorted by v).
        for &(u, v) in edges {
            adjacency[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for &(u, v) in edges {
            adjacency[fill[u as usize]] = v;
            fill[u as usize] += 1;
        }
        Ok(Self::from_csr(ring, offsets, adjacency, edges.len() as u64))
    }

    fn from_csr(ring: RingDescriptor, offsets: Vec<usize>, adjacency: Vec<u32>, edge_count: u64) -> Self {
        let n = offsets.len() - 1;
        let mut components = vec![u32::MAX; n];
        let mut members = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if components[start] != u32::MAX {
                continue;
            }
            let label = members.len() as u32;
            let mut list = vec![start as u32];
            components[start] = label;
            queue.push_back(start as u32);
            while let Some(u) = queue.pop_front() {
                for &w in &adjacency[offsets[u as usize]..offsets[u as usize + 1]] {
                    if components[w as usize] == u32::MAX {
                        components[w as usize] = label;
                        list.push(w);
                        queue.push_back(w);
                    }
                }
            }
            list.sort_unstable();
            members.push(list);
        }
        CommutationGraph { ring, offsets, adjacency, components, members, edge_count }
    }

    pub fn ring(&self) -> &RingDescriptor {
        &self.ring
    }

    pub fn vertex_count(&self) -> u32 {
        (self.offsets.len() - 1) as u32
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Sorted neighbors of `a`, excluding `a` itself.
    pub fn neighbors(&self, a: ElementId) -> &[u32] {
        &self.adjacency[self.offsets[a.index()]..self.offsets[a.index() + 1]]
    }

    pub fn degree(&self, a: ElementId) -> usize {
        self.neighbors(a).len()
    }

    pub fn adjacent(&self, a: ElementId, b: ElementId) -> bool {
        self.neighbors(a).binary_search(&b.0).is_ok()
    }

    /// `a ~1 b`: equal or adjacent.
    pub fn related_one(&self, a: ElementId, b: ElementId) -> bool {
        a == b || self.adjacent(a, b)
    }

    /// `{a}_1`: the neighbors of `a` together with `a`.
    pub fn one_step(&self, a: ElementId) -> Vec<ElementId> {
        let mut out: Vec<ElementId> = self.neighbors(a).iter().map(|&v| ElementId(v)).collect();
        let at = out.partition_point(|&v| v < a);
        out.insert(at, a);
        out
    }

    pub fn component_of(&self, a: ElementId) -> u32 {
        self.components[a.index()]
    }

    pub fn component_count(&self) -> usize {
        self.members.len()
    }

    /// Members of component `label`, ascending. Labels number components in
    /// order of their smallest element.
    pub fn component(&self, label: u32) -> &[u32] {
        &self.members[label as usize]
    }

    pub fn class_of(&self, a: ElementId) -> &[u32] {
        self.component(self.component_of(a))
    }

    pub fn components(&self) -> impl Iterator<Item = &[u32]> {
        self.members.iter().map(|m| m.as_slice())
    }

    /// Edges `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            let nb = self.neighbors(ElementId(u));
            let start = nb.partition_point(|&v| v <= u);
            nb[start..].iter().map(move |&v| (u, v))
        })
    }

    pub fn closure(&self, seed: &[ElementId]) -> Result<ClosureResult> {
        closure(self, seed)
    }
}

pub fn build_commutation_graph(ring: &RingHandle) -> Result<CommutationGraph> {
    build_commutation_graph_with(ring, GraphOptions::default())
}

pub fn build_commutation_graph_with(ring: &RingHandle, opts: GraphOptions) -> Result<CommutationGraph> {
    let size = ring.size();
    if size as u64 > SIZE_GUARD && !opts.allow_large {
        return Err(Error::SizeGuard { size: size as u64, limit: SIZE_GUARD });
    }
    let run = || {
        if size <= BITSET_LIMIT {
            sweep_dense(ring)
        } else {
            sweep_sparse(ring)
        }
    };
    match opts.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(run)
        }
        None => run(),
    }
}

/// Pairs `(c, d)` and `(d, c)` yield the same edge and `c = d` yields none, so
/// only `c < d` is visited.
fn sweep_dense(ring: &RingHandle) -> Result<CommutationGraph> {
    let n = ring.size() as usize;
    let words_per_row = n.div_ceil(64);
    let bits: Vec<AtomicU64> = (0..n * words_per_row).map(|_| AtomicU64::new(0)).collect();
    let set = |u: u32, v: u32| {
        let word = &bits[u as usize * words_per_row + (v as usize >> 6)];
        let mask = 1u64 << (v & 63);
        if word.load(Ordering::Relaxed) & mask == 0 {
            word.fetch_or(mask, Ordering::Relaxed);
        }
    };
    (0..n as u32).into_par_iter().with_min_len(8).for_each(|c| {
        for d in c + 1..n as u32 {
            let x = ring.mul_raw(c, d);
            let y = ring.mul_raw(d, c);
            if x != y {
                set(x, y);
                set(y, x);
            }
        }
    });
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    let mut adjacency = Vec::new();
    for u in 0..n {
        let row = &bits[u * words_per_row..(u + 1) * words_per_row];
        for (w, word) in row.iter().enumerate() {
            let mut value = word.load(Ordering::Relaxed);
            while value != 0 {
                let bit = value.trailing_zeros();
                adjacency.push((w * 64) as u32 + bit);
                value &= value - 1;
            }
        }
        offsets.push(adjacency.len());
    }
    let edge_count = (adjacency.len() / 2) as u64;
    Ok(CommutationGraph::from_csr(ring.descriptor().clone(), offsets, adjacency, edge_count))
}

/// Contiguous chunks of `c` each produce a sorted, deduplicated edge buffer;
/// buffers are merged by a global sort, so the result is independent of
/// scheduling.
fn sweep_sparse(ring: &RingHandle) -> Result<CommutationGraph> {
    let n = ring.size();
    let chunk = 256u32;
    let chunks: Vec<u32> = (0..n.div_ceil(chunk)).collect();
    let buffers: Vec<Vec<(u32, u32)>> = chunks
        .into_par_iter()
        .map(|k| {
            let mut local = Vec::new();
            for c in k * chunk..((k + 1) * chunk).min(n) {
                for d in c + 1..n {
                    let x = ring.mul_raw(c, d);
                    let y = ring.mul_raw(d, c);
                    if x != y {
                        local.push((x.min(y), x.max(y)));
                    }
                }
                if local.len() > 1 << 20 {
                    local.sort_unstable();
                    local.dedup();
                }
            }
            local.sort_unstable();
            local.dedup();
            local
        })
        .collect();
    let total: u64 = buffers.iter().map(|b| b.len() as u64).sum();
    if total > EDGE_BUDGET * 4 {
        return Err(Error::MemoryBudget { limit: EDGE_BUDGET });
    }
    let mut edges: Vec<(u32, u32)> = buffers.into_iter().flatten().collect();
    edges.par_sort_unstable();
    edges.dedup();
    if edges.len() as u64 > EDGE_BUDGET {
        return Err(Error::MemoryBudget { limit: EDGE_BUDGET });
    }
    CommutationGraph::from_sorted_edges(ring.descriptor().clone(), n, &edges)
}

/// `{a}_1 = {dc : cd = a}` by direct enumeration; contains `a` since
/// `a = a * 1`.
pub fn neighbors_one(ring: &RingHandle, a: ElementId) -> Vec<ElementId> {
    let n = ring.size();
    let mut hit = vec![false; n as usize];
    for c in 0..n {
        for d in 0..n {
            if ring.mul_raw(c, d) == a.0 {
                hit[ring.mul_raw(d, c) as usize] = true;
            }
        }
    }
    (0..n).filter(|&i| hit[i as usize]).map(ElementId).collect()
}

/// One application of `S -> S ∪ {dc : cd ∈ S}` by a full pair sweep.
pub fn one_step(ring: &RingHandle, set: &[ElementId]) -> Vec<ElementId> {
    let n = ring.size() as usize;
    let mut member = vec![false; n];
    for a in set {
        member[a.index()] = true;
    }
    let reached: Vec<u32> = (0..n as u32)
        .into_par_iter()
        .flat_map_iter(|c| {
            let member = &member;
            (0..n as u32).filter(move |&d| member[ring.mul_raw(c, d) as usize]).map(move |d| ring.mul_raw(d, c))
        })
        .collect();
    for r in reached {
        member[r as usize] = true;
    }
    (0..n as u32).filter(|&i| member[i as usize]).map(ElementId).collect()
}

/// A commutative closure with the `S_i` level of every member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureResult {
    pub seed: Vec<ElementId>,
    /// Ascending.
    pub members: Vec<ElementId>,
    /// `levels[i]` is the level of `members[i]`.
    pub levels: Vec<u32>,
}

impl ClosureResult {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: ElementId) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    pub fn level(&self, a: ElementId) -> Option<u32> {
        self.members.binary_search(&a).ok().map(|i| self.levels[i])
    }

    pub fn max_level(&self) -> u32 {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    /// `S_i`: members with level at most `i`.
    pub fn up_to_level(&self, i: u32) -> Vec<ElementId> {
        self.members.iter().zip(&self.levels).filter(|(_, &l)| l <= i).map(|(&m, _)| m).collect()
    }
}

fn normalize_seed(seed: &[ElementId], size: u32) -> Result<Vec<ElementId>> {
    if seed.is_empty() {
        return Err(Error::EmptySeed);
    }
    if let Some(bad) = seed.iter().find(|a| a.0 >= size) {
        return Err(Error::OutOfRange { id: bad.0 as u64, size: size as u64 });
    }
    let mut seed = seed.to_vec();
    seed.sort_unstable();
    seed.dedup();
    Ok(seed)
}

/// Multi-source BFS over the commutation graph.
pub fn closure(graph: &CommutationGraph, seed: &[ElementId]) -> Result<ClosureResult> {
    let seed = normalize_seed(seed, graph.vertex_count())?;
    let mut level = vec![u32::MAX; graph.vertex_count() as usize];
    let mut queue = VecDeque::new();
    for &s in &seed {
        level[s.index()] = 0;
        queue.push_back(s.0);
    }
    let mut reached = seed.iter().map(|s| s.0).collect::<Vec<_>>();
    while let Some(u) = queue.pop_front() {
        let next = level[u as usize] + 1;
        for &w in graph.neighbors(ElementId(u)) {
            if level[w as usize] == u32::MAX {
                level[w as usize] = next;
                reached.push(w);
                queue.push_back(w);
            }
        }
    }
    reached.sort_unstable();
    let levels = reached.iter().map(|&m| level[m as usize]).collect();
    Ok(ClosureResult { seed, members: reached.into_iter().map(ElementId).collect(), levels })
}

/// The same closure computed without a graph: iterate [`one_step`] to a fixed
/// point, recording when each element first appears.
pub fn closure_by_sweep(ring: &RingHandle, seed: &[ElementId]) -> Result<ClosureResult> {
    let seed = normalize_seed(seed, ring.size())?;
    let mut level = vec![u32::MAX; ring.size() as usize];
    for s in &seed {
        level[s.index()] = 0;
    }
    let mut current = seed.clone();
    let mut i = 0;
    loop {
        let next = one_step(ring, &current);
        if next.len() == current.len() {
            break;
        }
        i += 1;
        for a in &next {
            if level[a.index()] == u32::MAX {
                level[a.index()] = i;
            }
        }
        current = next;
    }
    let levels = current.iter().map(|a| level[a.index()]).collect();
    Ok(ClosureResult { seed, members: current, levels })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closedness {
    Closed,
    /// `c * d` lies in the set but `d * c` does not.
    Counterexample {
        c: ElementId,
        d: ElementId,
    },
}

impl Closedness {
    pub fn is_closed(&self) -> bool {
        matches!(self, Closedness::Closed)
    }
}

/// Checks `cd ∈ S => dc ∈ S` over all pairs. The reported counterexample is
/// the lexicographically smallest `(c, d)`.
pub fn is_commutatively_closed(ring: &RingHandle, set: &[ElementId]) -> Closedness {
    let n = ring.size();
    let mut member = vec![false; n as usize];
    for a in set {
        if a.0 < n {
            member[a.index()] = true;
        }
    }
    let hit = (0..n).into_par_iter().find_map_first(|c| {
        (0..n).find_map(|d| {
            let cd = ring.mul_raw(c, d);
            (member[cd as usize] && !member[ring.mul_raw(d, c) as usize]).then_some((c, d))
        })
    });
    match hit {
        Some((c, d)) => Closedness::Counterexample { c: ElementId(c), d: ElementId(d) },
        None => Closedness::Closed,
    }
}

/// Smallest `n` with `{a}_n` equal to the closure of `a`.
pub fn stabilization_depth(graph: &CommutationGraph, a: ElementId) -> Result<u32> {
    Ok(closure(graph, &[a])?.max_level())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::MatrixRep;

    fn ring(spec: &str) -> RingHandle {
        RingHandle::from_spec(spec).unwrap()
    }

    #[test]
    fn commutative_ring_has_no_edges() {
        let r = ring("Z(12)");
        let g = build_commutation_graph(&r).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.component_count(), 12);
        for a in r.elements() {
            assert_eq!(neighbors_one(&r, a), vec![a]);
            assert_eq!(stabilization_depth(&g, a).unwrap(), 0);
        }
    }

    #[test]
    fn m2f2_examples() {
        let r = ring("M(2,GF(2))");
        let g = build_commutation_graph(&r).unwrap();
        let e12 = r.encode_matrix(&MatrixRep::unit(2, 0, 1)).unwrap();
        let e11 = r.encode_matrix(&MatrixRep::unit(2, 0, 0)).unwrap();
        assert!(g.adjacent(e12, r.zero()));
        assert!(neighbors_one(&r, e12).contains(&r.zero()));
        assert_eq!(g.class_of(r.zero()).len(), 4);
        let brute = r.elements().filter(|&a| r.mul(a, a) == r.zero()).count();
        assert_eq!(brute, 4);
        assert_eq!(neighbors_one(&r, r.one()), vec![r.one()]);
        assert_eq!(is_commutatively_closed(&r, &[e12]), Closedness::Counterexample { c: e11, d: e12 });
    }

    #[test]
    fn closure_of_zero_in_m3f2() {
        let r = ring("M(3,GF(2))");
        let g = build_commutation_graph(&r).unwrap();
        let c = g.closure(&[r.zero()]).unwrap();
        assert_eq!(c.len(), 64);
        assert_eq!(c.max_level(), 2);
        for &m in &c.members {
            assert_eq!(r.pow(m, 3), r.zero());
        }
        let one = g.closure(&[r.one()]).unwrap();
        assert_eq!(one.members, vec![r.one()]);
        let j3 = r.encode_matrix(&crate::linalg::jordan_block(3).unwrap()).unwrap();
        assert_eq!(stabilization_depth(&g, j3).unwrap(), 2);
    }

    #[test]
    fn empty_seed_rejected() {
        let r = ring("Z(4)");
        let g = build_commutation_graph(&r).unwrap();
        assert!(matches!(g.closure(&[]), Err(Error::EmptySeed)));
        assert!(matches!(g.closure(&[ElementId(9)]), Err(Error::OutOfRange { .. })));
        assert!(matches!(closure_by_sweep(&r, &[]), Err(Error::EmptySeed)));
    }

    #[test]
    fn sparse_and_dense_sweeps_agree() {
        for spec in ["M(2,GF(2))", "M(2,GF(2))xZ(3)", "Z(3)xM(3,GF(2))"] {
            let r = ring(spec);
            let dense = sweep_dense(&r).unwrap();
            let sparse = sweep_sparse(&r).unwrap();
            assert_eq!(dense, sparse, "{spec}");
        }
    }

    #[test]
    fn graph_matches_factorization_definition() {
        let r = ring("M(2,GF(2))");
        let g = build_commutation_graph(&r).unwrap();
        for a in r.elements() {
            let mut expected = neighbors_one(&r, a);
            expected.retain(|&b| b != a);
            let got: Vec<ElementId> = g.neighbors(a).iter().map(|&v| ElementId(v)).collect();
            assert_eq!(got, expected);
            assert_eq!(g.one_step(a), neighbors_one(&r, a));
        }
    }

    #[test]
    fn from_sorted_edges_validates() {
        let d = RingDescriptor::ModularInt(4);
        assert!(CommutationGraph::from_sorted_edges(d.clone(), 4, &[(1, 0)]).is_err());
        assert!(CommutationGraph::from_sorted_edges(d.clone(), 4, &[(0, 1), (0, 1)]).is_err());
        assert!(CommutationGraph::from_sorted_edges(d.clone(), 4, &[(0, 4)]).is_err());
        let g = CommutationGraph::from_sorted_edges(d, 4, &[(0, 1), (0, 3), (1, 3)]).unwrap();
        assert_eq!(g.neighbors(ElementId(3)), &[0, 1]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 3), (1, 3)]);
        assert_eq!(g.component_count(), 2);
    }

    #[test]
    fn thread_count_does_not_change_graph() {
        let r = ring("M(3,GF(2))xZ(2)");
        let a = build_commutation_graph_with(&r, GraphOptions { threads: Some(1), allow_large: false }).unwrap();
        let b = build_commutation_graph_with(&r, GraphOptions { threads: Some(4), allow_large: false }).unwrap();
        assert_eq!(a, b);
    }
}
