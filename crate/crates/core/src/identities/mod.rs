//! Explicit algebraic identities behind the closure machinery.
//!
//! - `diag(1 + xy, 1)` and `diag(1 + yx, 1)` are associated in `M_2(R)`,
//!   witnessed by explicit invertible matrices built from elementary factors.
//! - Elementary `~1` moves: `a ~1 a(1+b)` for `b a = 0`, `a(1+ba) ~1 a(1+ab)`,
//!   and `xy ~1 (y+b)x` for `x b = 0`.
//! - In the free algebra `K<x, y>`, `x + y x^l` reaches `x + x^l y` in `l`
//!   factorization steps.

mod ncpoly;

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closure::CommutationGraph;
use crate::error::{Error, Result};
use crate::ring::{ElementId, RingHandle};

pub use ncpoly::{ncpoly_add, ncpoly_mul, NcPoly, Word};

/// Rings up to this size are quantified exhaustively.
pub const EXHAUSTIVE_LIMIT: u32 = 512;
pub const SAMPLE_COUNT: usize = 10_000;

/// A 2x2 matrix over a finite ring, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BlockMatrix2(pub [[ElementId; 2]; 2]);

impl BlockMatrix2 {
    pub fn new(a: ElementId, b: ElementId, c: ElementId, d: ElementId) -> Self {
        BlockMatrix2([[a, b], [c, d]])
    }

    pub fn identity(ring: &RingHandle) -> Self {
        Self::diag(ring, ring.one(), ring.one())
    }

    pub fn diag(ring: &RingHandle, a: ElementId, b: ElementId) -> Self {
        Self::new(a, ring.zero(), ring.zero(), b)
    }

    pub fn mul(&self, ring: &RingHandle, other: &BlockMatrix2) -> BlockMatrix2 {
        let (a, b) = (&self.0, &other.0);
        let entry = |i: usize, j: usize| ring.add(ring.mul(a[i][0], b[0][j]), ring.mul(a[i][1], b[1][j]));
        BlockMatrix2([[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]])
    }

    pub fn render(&self, ring: &RingHandle) -> String {
        let m = &self.0;
        format!(
            "[[{}, {}], [{}, {}]]",
            ring.render(m[0][0]),
            ring.render(m[0][1]),
            ring.render(m[1][0]),
            ring.render(m[1][1])
        )
    }
}

/// An invertible 2x2 matrix together with an inverse, both assembled from
/// elementary factors.
#[derive(Debug, Clone, Copy)]
pub struct Invertible2 {
    pub matrix: BlockMatrix2,
    pub inverse: BlockMatrix2,
}

impl Invertible2 {
    fn is_valid(&self, ring: &RingHandle) -> bool {
        let id = BlockMatrix2::identity(ring);
        self.matrix.mul(ring, &self.inverse) == id && self.inverse.mul(ring, &self.matrix) == id
    }

    /// `(A, A^-1)(B, B^-1) = (AB, B^-1 A^-1)`.
    fn then(&self, ring: &RingHandle, right: &Invertible2) -> Invertible2 {
        Invertible2 { matrix: self.matrix.mul(ring, &right.matrix), inverse: right.inverse.mul(ring, &self.inverse) }
    }

    fn identity(ring: &RingHandle) -> Invertible2 {
        let id = BlockMatrix2::identity(ring);
        Invertible2 { matrix: id, inverse: id }
    }
}

/// The matrices `P`, `Q` with `P diag(1+xy, 1) Q = diag(1+yx, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct StableAssociation {
    pub left: Invertible2,
    pub right: Invertible2,
}

/// `P = [[-y, -yx-1], [1, x]] = [[-y, -1], [1, 0]] [[1, x], [0, 1]]` and
/// `Q = [[x, 1], [-yx-1, -y]] = [[1, 0], [-y, 1]] [[x, 1], [-1, 0]]`. Each
/// factor comes with an explicit two-sided inverse.
pub fn stable_association(ring: &RingHandle, x: ElementId, y: ElementId) -> StableAssociation {
    let (zero, one) = (ring.zero(), ring.one());
    let neg = |a| ring.neg(a);
    let f1 = Invertible2 {
        matrix: BlockMatrix2::new(neg(y), neg(one), one, zero),
        inverse: BlockMatrix2::new(zero, one, neg(one), neg(y)),
    };
    let f2 = Invertible2 {
        matrix: BlockMatrix2::new(one, x, zero, one),
        inverse: BlockMatrix2::new(one, neg(x), zero, one),
    };
    let g1 = Invertible2 {
        matrix: BlockMatrix2::new(one, zero, neg(y), one),
        inverse: BlockMatrix2::new(one, zero, y, one),
    };
    let g2 = Invertible2 {
        matrix: BlockMatrix2::new(x, one, neg(one), zero),
        inverse: BlockMatrix2::new(zero, neg(one), one, x),
    };
    StableAssociation { left: f1.then(ring, &f2), right: g1.then(ring, &g2) }
}

/// Checks every factor is invertible, the factor products equal the displayed
/// `P` and `Q`, and `P diag(1+xy, 1) Q = diag(1+yx, 1)`.
pub fn verify_stable_association(ring: &RingHandle, x: ElementId, y: ElementId) -> bool {
    let one = ring.one();
    let neg = |a| ring.neg(a);
    let yx = ring.mul(y, x);
    let xy = ring.mul(x, y);
    let assoc = stable_association(ring, x, y);
    let p_expected = BlockMatrix2::new(neg(y), ring.sub(neg(yx), one), one, x);
    let q_expected = BlockMatrix2::new(x, one, ring.sub(neg(yx), one), neg(y));
    if assoc.left.matrix != p_expected || assoc.right.matrix != q_expected {
        return false;
    }
    if !assoc.left.is_valid(ring) || !assoc.right.is_valid(ring) {
        return false;
    }
    let source = BlockMatrix2::diag(ring, ring.add(one, xy), one);
    let target = BlockMatrix2::diag(ring, ring.add(one, yx), one);
    assoc.left.matrix.mul(ring, &source).mul(ring, &assoc.right.matrix) == target
}

/// A single `c d` / `d c` factorization, `cd = from` and `dc = to`.
pub fn find_factorization(ring: &RingHandle, from: ElementId, to: ElementId) -> Option<(ElementId, ElementId)> {
    ring.elements()
        .flat_map(|c| ring.elements().map(move |d| (c, d)))
        .find(|&(c, d)| ring.mul(c, d) == from && ring.mul(d, c) == to)
}

fn shortest_path(graph: &CommutationGraph, a: ElementId, b: ElementId) -> Option<Vec<ElementId>> {
    if graph.component_of(a) != graph.component_of(b) {
        return None;
    }
    let mut parent = vec![u32::MAX; graph.vertex_count() as usize];
    parent[a.index()] = a.0;
    let mut queue = VecDeque::from([a.0]);
    while let Some(u) = queue.pop_front() {
        if u == b.0 {
            break;
        }
        for &w in graph.neighbors(ElementId(u)) {
            if parent[w as usize] == u32::MAX {
                parent[w as usize] = u;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![b];
    while path.last() != Some(&a) {
        let last = *path.last().unwrap();
        path.push(ElementId(parent[last.index()]));
    }
    path.reverse();
    Some(path)
}

/// Composes one stable association per edge of a shortest path from `a` to
/// `b`, turning `diag(1-a, 1)` into `diag(1-b, 1)`. `None` when `a` and `b`
/// lie in different classes; otherwise whether the composed transform checks
/// out.
pub fn verify_association_along_path(
    ring: &RingHandle,
    graph: &CommutationGraph,
    a: ElementId,
    b: ElementId,
) -> Option<bool> {
    let path = shortest_path(graph, a, b)?;
    let one = ring.one();
    let mut left = Invertible2::identity(ring);
    let mut right = Invertible2::identity(ring);
    for step in path.windows(2) {
        let Some((c, d)) = find_factorization(ring, step[0], step[1]) else {
            return Some(false);
        };
        // 1 - cd = 1 + (-c)d and 1 - dc = 1 + d(-c)
        let assoc = stable_association(ring, ring.neg(c), d);
        left = assoc.left.then(ring, &left);
        right = right.then(ring, &assoc.right);
    }
    let source = BlockMatrix2::diag(ring, ring.sub(one, a), one);
    let target = BlockMatrix2::diag(ring, ring.sub(one, b), one);
    let ok = left.is_valid(ring)
        && right.is_valid(ring)
        && left.matrix.mul(ring, &source).mul(ring, &right.matrix) == target;
    Some(ok)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityViolation {
    pub identity: &'static str,
    pub elements: Vec<ElementId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureIdentityReport {
    pub exhaustive: bool,
    pub checked: u64,
    pub violations: Vec<IdentityViolation>,
}

impl ClosureIdentityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct IdentityChecker<'a> {
    ring: &'a RingHandle,
    graph: &'a CommutationGraph,
    checked: u64,
    violations: Vec<IdentityViolation>,
}

impl IdentityChecker<'_> {
    fn expect(&mut self, identity: &'static str, u: ElementId, v: ElementId, elements: &[ElementId]) {
        self.checked += 1;
        if !self.graph.related_one(u, v) && self.violations.len() < 16 {
            self.violations.push(IdentityViolation { identity, elements: elements.to_vec() });
        }
    }

    /// `a ~1 a(1+b)` when `ba = 0`, `a ~1 (1+b)a` when `ab = 0`, and
    /// `a(1+ba) ~1 a(1+ab)`.
    fn pair(&mut self, a: ElementId, b: ElementId) {
        let r = self.ring;
        let one_b = r.add(r.one(), b);
        if r.mul(b, a) == r.zero() {
            self.expect("left-annihilator", a, r.mul(a, one_b), &[a, b]);
        }
        if r.mul(a, b) == r.zero() {
            self.expect("right-annihilator", a, r.mul(one_b, a), &[a, b]);
        }
        let lhs = r.mul(a, r.add(r.one(), r.mul(b, a)));
        let rhs = r.mul(a, r.add(r.one(), r.mul(a, b)));
        self.expect("swap", lhs, rhs, &[a, b]);
    }

    /// `xb = 0 => xy ~1 (y+b)x` and `cy = 0 => xy ~1 y(x+c)`.
    fn annihilated_shift(&mut self, x: ElementId, y: ElementId, b: ElementId) {
        let r = self.ring;
        let xy = r.mul(x, y);
        if r.mul(x, b) == r.zero() {
            self.expect("shift-right", xy, r.mul(r.add(y, b), x), &[x, y, b]);
        }
        if r.mul(b, y) == r.zero() {
            self.expect("shift-left", xy, r.mul(y, r.add(x, b)), &[x, y, b]);
        }
    }
}

/// Exhaustive for rings of at most [`EXHAUSTIVE_LIMIT`] elements, otherwise
/// [`SAMPLE_COUNT`] seeded samples. `graph` must be the ring's commutation
/// graph.
pub fn check_closure_identities(ring: &RingHandle, graph: &CommutationGraph, seed: u64) -> ClosureIdentityReport {
    let mut checker = IdentityChecker { ring, graph, checked: 0, violations: Vec::new() };
    let exhaustive = ring.size() <= EXHAUSTIVE_LIMIT;
    if exhaustive {
        for a in ring.elements() {
            for b in ring.elements() {
                checker.pair(a, b);
            }
        }
        for x in ring.elements() {
            let right_ann: Vec<ElementId> = ring.elements().filter(|&b| ring.mul(x, b) == ring.zero()).collect();
            let left_ann: Vec<ElementId> = ring.elements().filter(|&c| ring.mul(c, x) == ring.zero()).collect();
            for y in ring.elements() {
                for &b in &right_ann {
                    checker.annihilated_shift(x, y, b);
                }
                // with the roles of the shifted factor swapped: c y = 0 with y := x
                for &c in &left_ann {
                    checker.annihilated_shift(y, x, c);
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = ring.size();
        for _ in 0..SAMPLE_COUNT {
            let a = ElementId(rng.gen_range(0..n));
            let b = ElementId(rng.gen_range(0..n));
            checker.pair(a, b);
            let x = ElementId(rng.gen_range(0..n));
            let y = ElementId(rng.gen_range(0..n));
            let right_ann: Vec<ElementId> = ring.elements().filter(|&b| ring.mul(x, b) == ring.zero()).collect();
            let b = right_ann[rng.gen_range(0..right_ann.len())];
            checker.annihilated_shift(x, y, b);
            let left_ann: Vec<ElementId> = ring.elements().filter(|&c| ring.mul(c, y) == ring.zero()).collect();
            let c = left_ann[rng.gen_range(0..left_ann.len())];
            checker.annihilated_shift(x, y, c);
        }
    }
    ClosureIdentityReport { exhaustive, checked: checker.checked, violations: checker.violations }
}

pub fn verify_closure_identities(ring: &RingHandle, graph: &CommutationGraph) -> bool {
    check_closure_identities(ring, graph, 0).passed()
}

/// One factorization move `left = factor * x ~1 x * factor = right` in the
/// free algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub left: NcPoly,
    pub right: NcPoly,
    pub factor: NcPoly,
}

fn word_xyx(before: usize, after: usize) -> NcPoly {
    let mut w = vec![0u8; before];
    w.push(1);
    w.extend(std::iter::repeat_n(0u8, after));
    NcPoly::monomial(w, 1)
}

/// Emits the `l` steps carrying `x + y x^l` to `x + x^l y`. Step `i` writes
/// `x + x^{i-1} y x^{l-i+1} = (1 + x^{i-1} y x^{l-i}) x` and moves to
/// `x (1 + x^{i-1} y x^{l-i}) = x + x^i y x^{l-i}`; every product is checked
/// symbolically and an error is returned if any fails.
pub fn verify_free_algebra_chain(l: usize) -> Result<Vec<ChainStep>> {
    if l < 1 {
        return Err(Error::InvalidArgument("chain length must be at least 1".into()));
    }
    let x = NcPoly::x();
    let mut steps = Vec::with_capacity(l);
    let mut current = &x + &word_xyx(0, l);
    for i in 1..=l {
        let left = &x + &word_xyx(i - 1, l - i + 1);
        let right = &x + &word_xyx(i, l - i);
        let factor = &NcPoly::one() + &word_xyx(i - 1, l - i);
        let ok = left == current && ncpoly_mul(&factor, &x) == left && ncpoly_mul(&x, &factor) == right;
        if !ok {
            return Err(Error::InvalidArgument(format!("chain step {i} of {l} does not hold")));
        }
        current = right.clone();
        steps.push(ChainStep { left, right, factor });
    }
    if current != &x + &word_xyx(l, 0) {
        return Err(Error::InvalidArgument("chain does not end at x + x^l y".into()));
    }
    Ok(steps)
}

/// Exhaustive search for `x, y` with `ax = xb`, `ya = by`, `a^n = xy` and
/// `b^n = yx`.
pub fn find_relation_witnesses(
    ring: &RingHandle,
    a: ElementId,
    b: ElementId,
    n: u32,
) -> Option<(ElementId, ElementId)> {
    let an = ring.pow(a, n);
    let bn = ring.pow(b, n);
    ring.elements()
        .filter(|&x| ring.mul(a, x) == ring.mul(x, b))
        .flat_map(|x| ring.elements().map(move |y| (x, y)))
        .find(|&(x, y)| ring.mul(y, a) == ring.mul(b, y) && ring.mul(x, y) == an && ring.mul(y, x) == bn)
}
