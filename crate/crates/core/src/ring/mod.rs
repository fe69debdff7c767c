//! Finite rings with a canonical bijection between elements and integer ids.
//!
//! Encodings:
//! - `Z(n)`: residue `k` has id `k`.
//! - `GF(p^k)`: base-`p` digits of the polynomial coefficients, constant term
//!   least significant.
//! - `M(n,F)`: base-`|F|` digits of the row-major entries, entry `(0,0)` least
//!   significant.
//! - `AxB`: `(a, b)` has id `id(a) + |A| * id(b)`.

mod field;
mod matrix;
mod spec;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use field::GaloisField;
pub use matrix::MatrixRep;
pub(crate) use spec::is_prime;
pub use spec::{parse_ring_spec, RingDescriptor};

use crate::error::{Error, Result};

/// Rings above this size need an explicit override to be built.
pub const SIZE_GUARD: u64 = 1 << 20;

/// Rings up to this size get precomputed addition and multiplication tables.
pub const TABLE_LIMIT: u32 = 1024;

/// Largest matrix dimension that fits the `u32` id space over `GF(2)`.
const MAX_MATRIX_ENTRIES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl ElementId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for ElementId {
    fn from(v: u32) -> Self {
        ElementId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TablePolicy {
    /// Tables for rings of at most [`TABLE_LIMIT`] elements.
    #[default]
    Auto,
    Never,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    /// Bypass [`SIZE_GUARD`].
    pub allow_large: bool,
    pub tables: TablePolicy,
}

/// A realized finite ring. Immutable once built.
#[derive(Debug, Clone)]
pub struct RingHandle {
    descriptor: RingDescriptor,
    size: u32,
    kind: Kind,
    tables: Option<Tables>,
}

#[derive(Debug, Clone)]
enum Kind {
    Modular(u32),
    Field(GaloisField),
    Matrix(MatrixArith),
    Product(Box<RingHandle>, Box<RingHandle>),
}

#[derive(Debug, Clone)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
}

#[derive(Debug, Clone)]
struct MatrixArith {
    n: usize,
    field: GaloisField,
    q: u32,
    /// `q x q` field tables, present for small fields.
    fadd: Option<Vec<u32>>,
    fmul: Option<Vec<u32>>,
    /// Decoded entries of every element, `n*n` per element, when affordable.
    decoded: Option<Vec<u32>>,
}

impl MatrixArith {
    fn new(n: usize, field: GaloisField, size: u32) -> Self {
        let q = field.order();
        let (fadd, fmul) = if q <= 256 {
            let mut add = vec![0; (q * q) as usize];
            let mut mul = vec![0; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = field.add(a, b);
                    mul[(a * q + b) as usize] = field.mul(a, b);
                }
            }
            (Some(add), Some(mul))
        } else {
            (None, None)
        };
        let mut arith = MatrixArith { n, field, q, fadd, fmul, decoded: None };
        let cells = size as u64 * (n * n) as u64;
        if cells <= 1 << 24 {
            let mut decoded = Vec::with_capacity(cells as usize);
            let mut buf = [0u32; MAX_MATRIX_ENTRIES];
            for id in 0..size {
                arith.decode_into(id, &mut buf);
                decoded.extend_from_slice(&buf[..n * n]);
            }
            arith.decoded = Some(decoded);
        }
        arith
    }

    #[inline]
    fn fadd(&self, a: u32, b: u32) -> u32 {
        match &self.fadd {
            Some(t) => t[(a * self.q + b) as usize],
            None => self.field.add(a, b),
        }
    }

    #[inline]
    fn fmul(&self, a: u32, b: u32) -> u32 {
        match &self.fmul {
            Some(t) => t[(a * self.q + b) as usize],
            None => self.field.mul(a, b),
        }
    }

    #[inline]
    fn decode_into(&self, mut id: u32, out: &mut [u32; MAX_MATRIX_ENTRIES]) {
        let cells = self.n * self.n;
        if let Some(d) = &self.decoded {
            out[..cells].copy_from_slice(&d[id as usize * cells..(id as usize + 1) * cells]);
            return;
        }
        for slot in out.iter_mut().take(cells) {
            *slot = id % self.q;
            id /= self.q;
        }
    }

    #[inline]
    fn encode(&self, entries: &[u32]) -> u32 {
        entries.iter().rev().fold(0, |acc, &e| acc * self.q + e)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let n = self.n;
        let mut x = [0u32; MAX_MATRIX_ENTRIES];
        let mut y = [0u32; MAX_MATRIX_ENTRIES];
        let mut z = [0u32; MAX_MATRIX_ENTRIES];
        self.decode_into(a, &mut x);
        self.decode_into(b, &mut y);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for k in 0..n {
                    let xv = x[i * n + k];
                    if xv != 0 {
                        acc = self.fadd(acc, self.fmul(xv, y[k * n + j]));
                    }
                }
                z[i * n + j] = acc;
            }
        }
        self.encode(&z[..n * n])
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let cells = self.n * self.n;
        let mut x = [0u32; MAX_MATRIX_ENTRIES];
        let mut y = [0u32; MAX_MATRIX_ENTRIES];
        self.decode_into(a, &mut x);
        self.decode_into(b, &mut y);
        for i in 0..cells {
            x[i] = self.fadd(x[i], y[i]);
        }
        self.encode(&x[..cells])
    }

    fn neg(&self, a: u32) -> u32 {
        let cells = self.n * self.n;
        let mut x = [0u32; MAX_MATRIX_ENTRIES];
        self.decode_into(a, &mut x);
        for v in x.iter_mut().take(cells) {
            *v = self.field.neg(*v);
        }
        self.encode(&x[..cells])
    }

    fn one(&self) -> u32 {
        (0..self.n).map(|i| self.q.pow((i * self.n + i) as u32)).sum()
    }

    fn rep(&self, id: u32) -> MatrixRep {
        let mut buf = [0u32; MAX_MATRIX_ENTRIES];
        self.decode_into(id, &mut buf);
        MatrixRep { size: self.n, entries: buf[..self.n * self.n].to_vec() }
    }
}

impl RingHandle {
    pub fn build(desc: &RingDescriptor) -> Result<Self> {
        Self::build_with(desc, BuildOptions::default())
    }

    pub fn from_spec(spec: &str) -> Result<Self> {
        Self::build(&parse_ring_spec(spec)?)
    }

    pub fn build_with(desc: &RingDescriptor, opts: BuildOptions) -> Result<Self> {
        desc.validate()?;
        let size = desc
            .cardinality()
            .filter(|&s| s <= u32::MAX as u64)
            .ok_or(Error::SizeGuard { size: u64::MAX, limit: u32::MAX as u64 })?;
        if size > SIZE_GUARD && !opts.allow_large {
            return Err(Error::SizeGuard { size, limit: SIZE_GUARD });
        }
        let size = size as u32;
        let kind = match desc {
            RingDescriptor::ModularInt(n) => Kind::Modular(*n as u32),
            RingDescriptor::GaloisField { p, k } => Kind::Field(GaloisField::new(*p as u32, *k)),
            RingDescriptor::MatrixRing { size: n, base } => {
                let RingDescriptor::GaloisField { p, k } = **base else {
                    return Err(Error::Semantic("matrix base must be a field".into()));
                };
                Kind::Matrix(MatrixArith::new(*n as usize, GaloisField::new(p as u32, k), size))
            }
            RingDescriptor::Product(a, b) => {
                let inner = BuildOptions { allow_large: true, ..opts };
                Kind::Product(Box::new(Self::build_with(a, inner)?), Box::new(Self::build_with(b, inner)?))
            }
        };
        let mut ring = RingHandle { descriptor: desc.clone(), size, kind, tables: None };
        if opts.tables == TablePolicy::Auto && size <= TABLE_LIMIT {
            let n = size as usize;
            let mut add = vec![0; n * n];
            let mut mul = vec![0; n * n];
            for a in 0..size {
                for b in 0..size {
                    add[a as usize * n + b as usize] = ring.raw_add(a, b);
                    mul[a as usize * n + b as usize] = ring.raw_mul(a, b);
                }
            }
            ring.tables = Some(Tables { add, mul });
        }
        Ok(ring)
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.descriptor
    }

    pub fn spec(&self) -> String {
        self.descriptor.to_string()
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.size).map(ElementId)
    }

    pub fn zero(&self) -> ElementId {
        ElementId(0)
    }

    pub fn one(&self) -> ElementId {
        ElementId(self.raw_one())
    }

    pub fn check(&self, id: u64) -> Result<ElementId> {
        if id < self.size as u64 {
            Ok(ElementId(id as u32))
        } else {
            Err(Error::OutOfRange { id, size: self.size as u64 })
        }
    }

    #[inline]
    pub fn mul(&self, a: ElementId, b: ElementId) -> ElementId {
        ElementId(self.mul_raw(a.0, b.0))
    }

    #[inline]
    pub fn add(&self, a: ElementId, b: ElementId) -> ElementId {
        ElementId(self.add_raw(a.0, b.0))
    }

    pub fn neg(&self, a: ElementId) -> ElementId {
        ElementId(self.raw_neg(a.0))
    }

    pub fn sub(&self, a: ElementId, b: ElementId) -> ElementId {
        self.add(a, self.neg(b))
    }

    pub fn checked_mul(&self, a: ElementId, b: ElementId) -> Result<ElementId> {
        self.check(a.0 as u64)?;
        self.check(b.0 as u64)?;
        Ok(self.mul(a, b))
    }

    pub fn checked_add(&self, a: ElementId, b: ElementId) -> Result<ElementId> {
        self.check(a.0 as u64)?;
        self.check(b.0 as u64)?;
        Ok(self.add(a, b))
    }

    pub fn pow(&self, a: ElementId, e: u32) -> ElementId {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    /// Multiplication on raw ids, the hot path of the pair sweep.
    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[a as usize * self.size as usize + b as usize],
            None => self.raw_mul(a, b),
        }
    }

    #[inline]
    pub fn add_raw(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[a as usize * self.size as usize + b as usize],
            None => self.raw_add(a, b),
        }
    }

    fn raw_mul(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            Kind::Modular(n) => ((a as u64 * b as u64) % *n as u64) as u32,
            Kind::Field(f) => f.mul(a, b),
            Kind::Matrix(m) => m.mul(a, b),
            Kind::Product(l, r) => {
                let ls = l.size;
                let prod_l = l.mul_raw(a % ls, b % ls);
                let prod_r = r.mul_raw(a / ls, b / ls);
                prod_l + ls * prod_r
            }
        }
    }

    fn raw_add(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            Kind::Modular(n) => ((a as u64 + b as u64) % *n as u64) as u32,
            Kind::Field(f) => f.add(a, b),
            Kind::Matrix(m) => m.add(a, b),
            Kind::Product(l, r) => {
                let ls = l.size;
                l.add_raw(a % ls, b % ls) + ls * r.add_raw(a / ls, b / ls)
            }
        }
    }

    fn raw_neg(&self, a: u32) -> u32 {
        match &self.kind {
            Kind::Modular(n) => (*n - a) % *n,
            Kind::Field(f) => f.neg(a),
            Kind::Matrix(m) => m.neg(a),
            Kind::Product(l, r) => {
                let ls = l.size;
                l.raw_neg(a % ls) + ls * r.raw_neg(a / ls)
            }
        }
    }

    fn raw_one(&self) -> u32 {
        match &self.kind {
            Kind::Modular(_) | Kind::Field(_) => 1,
            Kind::Matrix(m) => m.one(),
            Kind::Product(l, r) => l.raw_one() + l.size * r.raw_one(),
        }
    }

    /// Splits a product element into its components.
    pub fn split(&self, a: ElementId) -> Option<(ElementId, ElementId)> {
        match &self.kind {
            Kind::Product(l, _) => Some((ElementId(a.0 % l.size), ElementId(a.0 / l.size))),
            _ => None,
        }
    }

    pub fn pair(&self, a: ElementId, b: ElementId) -> Option<ElementId> {
        match &self.kind {
            Kind::Product(l, _) => Some(ElementId(a.0 + l.size * b.0)),
            _ => None,
        }
    }

    pub fn factors(&self) -> Option<(&RingHandle, &RingHandle)> {
        match &self.kind {
            Kind::Product(l, r) => Some((l, r)),
            _ => None,
        }
    }

    /// Matrix dimension and base field, for `M(n,F)`.
    pub fn matrix_shape(&self) -> Option<(usize, &GaloisField)> {
        match &self.kind {
            Kind::Matrix(m) => Some((m.n, &m.field)),
            _ => None,
        }
    }

    pub fn field(&self) -> Option<&GaloisField> {
        match &self.kind {
            Kind::Field(f) => Some(f),
            _ => None,
        }
    }

    pub fn encode_matrix(&self, m: &MatrixRep) -> Result<ElementId> {
        let Kind::Matrix(arith) = &self.kind else {
            return Err(Error::Shape(format!("{} is not a matrix ring", self.descriptor)));
        };
        if m.size != arith.n || m.entries.len() != arith.n * arith.n {
            return Err(Error::Shape(format!("expected a {0}x{0} matrix, got size {1}", arith.n, m.size)));
        }
        if let Some(&bad) = m.entries.iter().find(|&&e| e >= arith.q) {
            return Err(Error::Shape(format!("entry {bad} is not an element of GF({})", arith.q)));
        }
        Ok(ElementId(arith.encode(&m.entries)))
    }

    pub fn decode_matrix(&self, id: ElementId) -> Result<MatrixRep> {
        let Kind::Matrix(arith) = &self.kind else {
            return Err(Error::Shape(format!("{} is not a matrix ring", self.descriptor)));
        };
        self.check(id.0 as u64)?;
        Ok(arith.rep(id.0))
    }

    /// Inverse of a two-sided unit. In a finite ring one-sided inverses are
    /// two-sided, so this is `None` exactly for non-units.
    pub fn inverse(&self, a: ElementId) -> Option<ElementId> {
        match &self.kind {
            Kind::Modular(n) => mod_inverse(a.0 as i64, *n as i64).map(|v| ElementId(v as u32)),
            Kind::Field(f) => f.inv(a.0).map(ElementId),
            Kind::Matrix(m) => {
                let inv = crate::linalg::inverse(&m.field, &m.rep(a.0))?;
                Some(ElementId(m.encode(&inv.entries)))
            }
            Kind::Product(l, r) => {
                let (x, y) = self.split(a)?;
                let xi = l.inverse(x)?;
                let yi = r.inverse(y)?;
                Some(ElementId(xi.0 + l.size * yi.0))
            }
        }
    }

    pub fn is_unit(&self, a: ElementId) -> bool {
        self.inverse(a).is_some()
    }

    pub fn units(&self) -> Vec<ElementId> {
        self.elements().filter(|&a| self.is_unit(a)).collect()
    }

    pub fn is_nilpotent(&self, a: ElementId) -> bool {
        self.nilpotency_index(a).is_some()
    }

    /// Least `k >= 1` with `a^k = 0`.
    pub fn nilpotency_index(&self, a: ElementId) -> Option<u32> {
        let mut x = a;
        let mut seen = 1u32;
        // In a finite ring a nilpotent element has index at most log2 |R|.
        let bound = 64 - (self.size as u64).leading_zeros();
        while seen <= bound.max(1) {
            if x.0 == 0 {
                return Some(seen);
            }
            x = self.mul(x, a);
            seen += 1;
        }
        None
    }

    /// `a != 0` killed on the right by a nonzero element; `0` counts as a
    /// zero divisor in a nonzero ring.
    pub fn is_left_zero_divisor(&self, a: ElementId) -> bool {
        a.0 == 0 || self.elements().any(|b| b.0 != 0 && self.mul(a, b).0 == 0)
    }

    pub fn is_right_zero_divisor(&self, a: ElementId) -> bool {
        a.0 == 0 || self.elements().any(|b| b.0 != 0 && self.mul(b, a).0 == 0)
    }

    /// Human-readable rendering: residue, field polynomial, matrix rows or tuple.
    pub fn render(&self, a: ElementId) -> String {
        match &self.kind {
            Kind::Modular(_) => a.0.to_string(),
            Kind::Field(f) => f.render(a.0),
            Kind::Matrix(m) => m.rep(a.0).render(&m.field),
            Kind::Product(l, r) => {
                let (x, y) = self.split(a).expect("product ring");
                format!("({},{})", l.render(x), r.render(y))
            }
        }
    }

    /// Parses an element given either as a bare integer id or as a literal in
    /// the form produced by [`render`](Self::render).
    pub fn parse_element(&self, text: &str) -> Result<ElementId> {
        let trimmed = text.trim();
        if let Ok(id) = trimmed.parse::<u64>() {
            return self.check(id);
        }
        let compact: String = trimmed.chars().filter(|c| !c.is_whitespace()).collect();
        self.parse_literal(&compact).ok_or_else(|| {
            Error::InvalidArgument(format!("cannot parse `{text}` as an element of {}", self.descriptor))
        })
    }

    fn parse_literal(&self, text: &str) -> Option<ElementId> {
        match &self.kind {
            Kind::Modular(n) => text.parse::<u32>().ok().filter(|v| v < n).map(ElementId),
            Kind::Field(f) => f.parse_literal(text).map(ElementId),
            Kind::Matrix(m) => {
                let inner = text.strip_prefix('[')?.strip_suffix(']')?;
                let rows = split_top_level(inner);
                if rows.len() != m.n {
                    return None;
                }
                let mut entries = Vec::with_capacity(m.n * m.n);
                for row in rows {
                    let cells = row.strip_prefix('[')?.strip_suffix(']')?;
                    let cells: Vec<&str> = cells.split(',').collect();
                    if cells.len() != m.n {
                        return None;
                    }
                    for c in cells {
                        entries.push(m.field.parse_literal(c)?);
                    }
                }
                Some(ElementId(m.encode(&entries)))
            }
            Kind::Product(l, r) => {
                let inner = text.strip_prefix('(')?.strip_suffix(')')?;
                let parts = split_top_level(inner);
                if parts.len() != 2 {
                    return None;
                }
                let x = l.parse_literal(parts[0])?;
                let y = r.parse_literal(parts[1])?;
                self.pair(x, y)
            }
        }
    }
}

/// Splits on commas that sit outside any bracket pair of either kind.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    let (mut r0, mut r1) = (n, a.rem_euclid(n));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(spec: &str) -> RingHandle {
        RingHandle::from_spec(spec).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(ring("Z(12)").size(), 12);
        assert_eq!(ring("M(3,GF(2))").size(), 512);
        assert_eq!(ring("M(2,GF(4))xZ(6)").size(), 1536);
        assert_eq!(ring("GF(3^2)").size(), 9);
    }

    #[test]
    fn size_guard() {
        let d = parse_ring_spec("M(3,GF(2^2))xZ(5)").unwrap();
        assert_eq!(d.cardinality(), Some(1_310_720));
        assert!(matches!(RingHandle::build(&d), Err(Error::SizeGuard { size: 1_310_720, .. })));
        let big = RingHandle::build_with(&d, BuildOptions { allow_large: true, tables: TablePolicy::Auto }).unwrap();
        assert_eq!(big.size(), 1_310_720);
        let ten = RingHandle::from_spec("M(10,GF(2))");
        assert!(matches!(ten, Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn arithmetic_examples() {
        let z = ring("Z(12)");
        assert_eq!(z.mul(ElementId(5), ElementId(8)), ElementId(4));
        let gf4 = ring("GF(4)");
        // t * t = t + 1
        assert_eq!(gf4.mul(ElementId(2), ElementId(2)), ElementId(3));
        let m = ring("M(2,GF(2))");
        let e12 = m.encode_matrix(&MatrixRep::unit(2, 0, 1)).unwrap();
        let e21 = m.encode_matrix(&MatrixRep::unit(2, 1, 0)).unwrap();
        let e11 = m.encode_matrix(&MatrixRep::unit(2, 0, 0)).unwrap();
        assert_eq!(m.mul(e12, e21), e11);
    }

    #[test]
    fn out_of_range_ids() {
        let z = ring("Z(12)");
        assert!(matches!(z.checked_mul(ElementId(12), ElementId(1)), Err(Error::OutOfRange { id: 12, size: 12 })));
        assert!(z.checked_add(ElementId(3), ElementId(4)).is_ok());
        assert!(z.decode_matrix(ElementId(0)).is_err());
    }

    #[test]
    fn matrix_encoding() {
        let m = ring("M(2,GF(2))");
        assert_eq!(m.encode_matrix(&MatrixRep::zero(2)).unwrap(), ElementId(0));
        assert_eq!(m.encode_matrix(&MatrixRep::identity(2)).unwrap(), ElementId(9));
        assert_eq!(m.one(), ElementId(9));
        assert!(matches!(m.encode_matrix(&MatrixRep::identity(3)), Err(Error::Shape(_))));
        assert!(matches!(m.encode_matrix(&MatrixRep::from_rows(&[&[2, 0], &[0, 0]])), Err(Error::Shape(_))));
    }

    #[test]
    fn matrix_round_trip_random() {
        use rand::{Rng, SeedableRng};
        let m = ring("M(3,GF(3))");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let entries: Vec<u32> = (0..9).map(|_| rng.gen_range(0..3)).collect();
            let rep = MatrixRep { size: 3, entries };
            let id = m.encode_matrix(&rep).unwrap();
            assert_eq!(m.decode_matrix(id).unwrap(), rep);
        }
    }

    #[test]
    fn units_counts() {
        assert_eq!(ring("Z(12)").units(), vec![ElementId(1), ElementId(5), ElementId(7), ElementId(11)]);
        assert_eq!(ring("GF(4)").units().len(), 3);
        for (spec, q, n) in [("M(2,GF(2))", 2u64, 2u32), ("M(2,GF(3))", 3, 2), ("M(3,GF(2))", 2, 3)] {
            let r = ring(spec);
            let brute = r.elements().filter(|&a| r.elements().any(|b| r.mul(a, b) == r.one())).count() as u64;
            let formula: u64 = (0..n).map(|i| q.pow(n) - q.pow(i)).product();
            assert_eq!(brute, formula, "{spec}");
            assert_eq!(r.units().len() as u64, formula, "{spec}");
        }
    }

    #[test]
    fn zero_divisors() {
        let z = ring("Z(12)");
        assert!(z.is_left_zero_divisor(ElementId(4)));
        assert!(!z.is_left_zero_divisor(ElementId(5)));
        assert!(z.is_left_zero_divisor(ElementId(0)));
        let m = ring("M(2,GF(2))");
        let e12 = m.encode_matrix(&MatrixRep::unit(2, 0, 1)).unwrap();
        assert!(m.is_left_zero_divisor(e12));
        assert!(m.is_right_zero_divisor(e12));
        assert!(!m.is_left_zero_divisor(m.one()));
    }

    #[test]
    fn dedekind_finite_exhaustive() {
        for spec in ["Z(12)", "GF(8)", "M(2,GF(2))", "M(3,GF(2))", "Z(4)xM(2,GF(2))", "M(2,GF(4))"] {
            let r = ring(spec);
            let one = r.one();
            for a in r.elements() {
                for b in r.elements() {
                    if r.mul(a, b) == one {
                        assert_eq!(r.mul(b, a), one, "{spec}: {a}*{b}");
                    }
                }
            }
        }
    }

    #[test]
    fn tables_match_direct_arithmetic() {
        for spec in ["Z(30)", "GF(27)", "M(2,GF(2))", "M(2,GF(4))", "Z(4)xM(2,GF(2))", "GF(4)xZ(6)"] {
            let d = parse_ring_spec(spec).unwrap();
            let fast = RingHandle::build(&d).unwrap();
            let slow =
                RingHandle::build_with(&d, BuildOptions { allow_large: false, tables: TablePolicy::Never }).unwrap();
            assert!(fast.has_tables() && !slow.has_tables());
            for a in fast.elements() {
                for b in fast.elements() {
                    assert_eq!(fast.mul(a, b), slow.mul(a, b));
                    assert_eq!(fast.add(a, b), slow.add(a, b));
                }
            }
        }
    }

    #[test]
    fn product_is_componentwise() {
        let p = ring("Z(4)xM(2,GF(2))");
        let (a, b) = p.factors().unwrap();
        for x in p.elements() {
            for y in p.elements() {
                let (x1, x2) = p.split(x).unwrap();
                let (y1, y2) = p.split(y).unwrap();
                assert_eq!(p.split(p.mul(x, y)).unwrap(), (a.mul(x1, y1), b.mul(x2, y2)));
                assert_eq!(p.split(p.add(x, y)).unwrap(), (a.add(x1, y1), b.add(x2, y2)));
            }
        }
        assert_eq!(p.one(), p.pair(ElementId(1), ElementId(9)).unwrap());
    }

    #[test]
    fn render_and_parse_literals() {
        for spec in ["Z(12)", "GF(9)", "M(2,GF(4))", "GF(4)xM(2,GF(2))", "Z(2)xZ(3)xGF(4)"] {
            let r = ring(spec);
            for a in r.elements() {
                let text = r.render(a);
                assert_eq!(r.parse_element(&text).unwrap(), a, "{spec}: {text}");
            }
        }
        let m = ring("M(2,GF(2))");
        assert_eq!(m.render(ElementId(9)), "[[1,0],[0,1]]");
        assert_eq!(m.parse_element("[[1, 0], [0, 1]]").unwrap(), ElementId(9));
        assert_eq!(m.parse_element("9").unwrap(), ElementId(9));
        assert!(m.parse_element("16").is_err());
        assert!(m.parse_element("[[1,0]]").is_err());
    }

    #[test]
    fn nilpotency() {
        let m = ring("M(3,GF(2))");
        let j3 = m.encode_matrix(&MatrixRep::from_rows(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]])).unwrap();
        assert_eq!(m.nilpotency_index(j3), Some(3));
        assert_eq!(m.nilpotency_index(m.zero()), Some(1));
        assert_eq!(m.nilpotency_index(m.one()), None);
        let z = ring("Z(8)");
        assert_eq!(z.nilpotency_index(ElementId(2)), Some(3));
    }

    fn arb_ring() -> impl Strategy<Value = &'static str> {
        prop_oneof![
            Just("Z(12)"),
            Just("GF(9)"),
            Just("M(2,GF(3))"),
            Just("M(3,GF(2))"),
            Just("M(2,GF(4))xZ(6)"),
            Just("GF(8)xM(2,GF(2))"),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn ring_axioms(spec in arb_ring(), seeds in proptest::collection::vec(any::<u32>(), 3)) {
            let r = RingHandle::from_spec(spec).unwrap();
            let [a, b, c] = [seeds[0], seeds[1], seeds[2]].map(|s| ElementId(s % r.size()));
            prop_assert_eq!(r.mul(r.mul(a, b), c), r.mul(a, r.mul(b, c)));
            prop_assert_eq!(r.add(r.add(a, b), c), r.add(a, r.add(b, c)));
            prop_assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
            prop_assert_eq!(r.mul(r.add(a, b), c), r.add(r.mul(a, c), r.mul(b, c)));
            prop_assert_eq!(r.mul(r.one(), a), a);
            prop_assert_eq!(r.mul(a, r.one()), a);
            prop_assert_eq!(r.add(a, r.neg(a)), r.zero());
            prop_assert_ne!(r.zero(), r.one());
            if let Some(inv) = r.inverse(a) {
                prop_assert_eq!(r.mul(a, inv), r.one());
                prop_assert_eq!(r.mul(inv, a), r.one());
            }
        }
    }
}
