//! Exact linear algebra over finite fields: rank, nilpotency, Jordan
//! partitions of nilpotent matrices, characteristic polynomials and the
//! Fitting decomposition.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{GaloisField, MatrixRep};

pub fn mul(f: &GaloisField, a: &MatrixRep, b: &MatrixRep) -> MatrixRep {
    assert_eq!(a.size, b.size, "matrix sizes differ");
    let n = a.size;
    let mut out = MatrixRep::zero(n);
    for i in 0..n {
        for k in 0..n {
            let x = a.get(i, k);
            if x == 0 {
                continue;
            }
            for j in 0..n {
                let v = f.add(out.get(i, j), f.mul(x, b.get(k, j)));
                out.set(i, j, v);
            }
        }
    }
    out
}

pub fn add(f: &GaloisField, a: &MatrixRep, b: &MatrixRep) -> MatrixRep {
    assert_eq!(a.size, b.size, "matrix sizes differ");
    MatrixRep { size: a.size, entries: a.entries.iter().zip(&b.entries).map(|(&x, &y)| f.add(x, y)).collect() }
}

pub fn sub(f: &GaloisField, a: &MatrixRep, b: &MatrixRep) -> MatrixRep {
    assert_eq!(a.size, b.size, "matrix sizes differ");
    MatrixRep { size: a.size, entries: a.entries.iter().zip(&b.entries).map(|(&x, &y)| f.sub(x, y)).collect() }
}

pub fn pow(f: &GaloisField, a: &MatrixRep, e: usize) -> MatrixRep {
    let mut acc = MatrixRep::identity(a.size);
    for _ in 0..e {
        acc = mul(f, &acc, a);
    }
    acc
}

pub fn trace(f: &GaloisField, a: &MatrixRep) -> u32 {
    (0..a.size).fold(0, |acc, i| f.add(acc, a.get(i, i)))
}

pub fn is_strictly_upper_triangular(a: &MatrixRep) -> bool {
    (0..a.size).all(|i| (0..=i).all(|j| a.get(i, j) == 0))
}

/// Row-reduces a rectangular `rows x cols` matrix in place to reduced row
/// echelon form and returns the pivot columns.
fn rref(f: &GaloisField, m: &mut [Vec<u32>], cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = f.inv(m[r][c]).expect("pivot is nonzero");
        for v in m[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let factor = row[c];
                for (v, &p) in row.iter_mut().zip(&pivot_row).take(cols) {
                    *v = f.sub(*v, f.mul(factor, p));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn rows_of(a: &MatrixRep) -> Vec<Vec<u32>> {
    (0..a.size).map(|i| (0..a.size).map(|j| a.get(i, j)).collect()).collect()
}

pub fn rank(f: &GaloisField, a: &MatrixRep) -> usize {
    let mut rows = rows_of(a);
    rref(f, &mut rows, a.size).len()
}

/// Gauss-Jordan inverse, `None` for singular matrices.
pub fn inverse(f: &GaloisField, a: &MatrixRep) -> Option<MatrixRep> {
    let n = a.size;
    let mut aug: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut row: Vec<u32> = (0..n).map(|j| a.get(i, j)).collect();
            row.extend((0..n).map(|j| u32::from(i == j)));
            row
        })
        .collect();
    let pivots = rref(f, &mut aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    let mut out = MatrixRep::zero(n);
    for (i, row) in aug.iter().enumerate() {
        for j in 0..n {
            out.set(i, j, row[n + j]);
        }
    }
    Some(out)
}

/// Basis of the null space `{v : a v = 0}`, as column vectors.
fn kernel_basis(f: &GaloisField, a: &MatrixRep) -> Vec<Vec<u32>> {
    let n = a.size;
    let mut rows = rows_of(a);
    let pivots = rref(f, &mut rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u32; n];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(rows[r][fc]);
            }
            v
        })
        .collect()
}

/// Basis of the column space of `a`: the columns at the pivot positions.
fn image_basis(f: &GaloisField, a: &MatrixRep) -> Vec<Vec<u32>> {
    let mut rows = rows_of(a);
    let pivots = rref(f, &mut rows, a.size);
    pivots.iter().map(|&c| (0..a.size).map(|i| a.get(i, c)).collect()).collect()
}

/// Least `k >= 1` with `a^k = 0`, or `None` when `a` is not nilpotent. The
/// zero matrix has index 1.
pub fn nilpotency_index(f: &GaloisField, a: &MatrixRep) -> Option<usize> {
    let mut power = a.clone();
    for k in 1..=a.size.max(1) {
        if power.is_zero() {
            return Some(k);
        }
        power = mul(f, &power, a);
    }
    None
}

/// Superdiagonal ones, zero elsewhere; `J_1` is the 1x1 zero matrix.
pub fn jordan_block(l: usize) -> Result<MatrixRep> {
    if l < 1 {
        return Err(Error::InvalidArgument("Jordan block size must be at least 1".into()));
    }
    let mut m = MatrixRep::zero(l);
    for i in 0..l - 1 {
        m.set(i, i + 1, 1);
    }
    Ok(m)
}

/// Jordan block sizes of a nilpotent matrix, weakly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JordanPartition {
    pub blocks: Vec<usize>,
}

impl JordanPartition {
    pub fn size(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn largest(&self) -> usize {
        self.blocks.first().copied().unwrap_or(0)
    }

    /// The Jordan normal form `diag(J_{b1}, J_{b2}, ...)`.
    pub fn normal_form(&self) -> MatrixRep {
        let mut out = MatrixRep::zero(0);
        for &b in &self.blocks {
            out = out.direct_sum(&jordan_block(b).expect("blocks are positive"));
        }
        out
    }
}

impl fmt::Display for JordanPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Uses the rank sequence `r_k = rank(a^k)`: the number of blocks of size at
/// least `k` is `r_{k-1} - r_k`.
pub fn jordan_partition(f: &GaloisField, a: &MatrixRep) -> Result<JordanPartition> {
    let n = a.size;
    let index = nilpotency_index(f, a).ok_or(Error::NotNilpotent)?;
    let mut ranks = vec![n];
    let mut power = a.clone();
    for _ in 1..=index {
        ranks.push(rank(f, &power));
        power = mul(f, &power, a);
    }
    // at_least[k] = number of blocks of size >= k, for k = 1..=index
    let at_least: Vec<usize> = (1..=index).map(|k| ranks[k - 1] - ranks[k]).collect();
    let mut blocks = Vec::new();
    for k in (1..=index).rev() {
        let exact = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
        blocks.extend(std::iter::repeat_n(k, exact));
    }
    if n == 0 {
        blocks.clear();
    }
    Ok(JordanPartition { blocks })
}

/// Monic characteristic polynomial `det(tI - A)`, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharPoly {
    pub coefficients: Vec<u32>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn render(&self, f: &GaloisField) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = f.render(c);
            let coeff = if coeff.contains('+') { format!("({coeff})") } else { coeff };
            terms.push(match (i, c) {
                (0, _) => coeff,
                (1, 1) => "x".into(),
                (1, _) => format!("{coeff}x"),
                (_, 1) => format!("x^{i}"),
                _ => format!("{coeff}x^{i}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

fn poly_sub_assign(f: &GaloisField, acc: &mut Vec<u32>, p: &[u32], scale: u32) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0);
    }
    for (i, &c) in p.iter().enumerate() {
        acc[i] = f.sub(acc[i], f.mul(scale, c));
    }
}

/// Reduces to upper Hessenberg form by similarity, then expands with the
/// standard determinant recurrence. Only divides by nonzero pivots, so it is
/// exact in every characteristic.
pub fn char_poly(f: &GaloisField, a: &MatrixRep) -> CharPoly {
    let n = a.size;
    let mut h = rows_of(a);
    for j in 0..n.saturating_sub(2) {
        let Some(p) = (j + 1..n).find(|&i| h[i][j] != 0) else { continue };
        if p != j + 1 {
            h.swap(p, j + 1);
            for row in h.iter_mut() {
                row.swap(p, j + 1);
            }
        }
        let inv = f.inv(h[j + 1][j]).expect("pivot is nonzero");
        for i in j + 2..n {
            if h[i][j] == 0 {
                continue;
            }
            let u = f.mul(h[i][j], inv);
            let pivot_row = h[j + 1].clone();
            for (v, &p) in h[i].iter_mut().zip(&pivot_row) {
                *v = f.sub(*v, f.mul(u, p));
            }
            for row in h.iter_mut() {
                let v = f.add(row[j + 1], f.mul(u, row[i]));
                row[j + 1] = v;
            }
        }
    }
    // polys[m] = char poly of the leading m x m block
    let mut polys: Vec<Vec<u32>> = vec![vec![1]];
    for m in 0..n {
        // (t - h[m][m]) * polys[m]
        let prev = &polys[m];
        let mut next = vec![0u32; prev.len() + 1];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = f.add(next[i + 1], c);
            next[i] = f.sub(next[i], f.mul(h[m][m], c));
        }
        let mut sub_prod = 1u32;
        for i in (0..m).rev() {
            sub_prod = f.mul(sub_prod, h[i + 1][i]);
            let scale = f.mul(h[i][m], sub_prod);
            if scale != 0 {
                let earlier = polys[i].clone();
                poly_sub_assign(f, &mut next, &earlier, scale);
            }
        }
        next.truncate(m + 2);
        polys.push(next);
    }
    CharPoly { coefficients: polys.pop().unwrap() }
}

/// `P^{-1} A P = diag(U, N)` with `U` invertible and `N` nilpotent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FittingDecomposition {
    pub basis_change: MatrixRep,
    /// Size `r`; the 0x0 matrix when `A` is nilpotent.
    pub invertible_part: MatrixRep,
    /// Size `n - r`; the 0x0 matrix when `A` is invertible.
    pub nilpotent_part: MatrixRep,
}

impl FittingDecomposition {
    pub fn invertible_size(&self) -> usize {
        self.invertible_part.size
    }
}

/// Splits `F^n = image(A^n) + kernel(A^n)`; both are `A`-invariant, `A` acts
/// invertibly on the first and nilpotently on the second.
pub fn fitting_decomposition(f: &GaloisField, a: &MatrixRep) -> FittingDecomposition {
    let n = a.size;
    let stable = pow(f, a, n);
    let mut columns = image_basis(f, &stable);
    let r = columns.len();
    columns.extend(kernel_basis(f, &stable));
    debug_assert_eq!(columns.len(), n);
    let mut p = MatrixRep::zero(n);
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            p.set(i, j, v);
        }
    }
    let p_inv = inverse(f, &p).expect("image and kernel of A^n are complementary");
    let conj = mul(f, &mul(f, &p_inv, a), &p);
    FittingDecomposition { invertible_part: conj.block(0, r), nilpotent_part: conj.block(r, n - r), basis_change: p }
}

/// Similarity test. Nilpotent pairs compare Jordan partitions; otherwise the
/// general linear group is searched when it has at most `10^6` elements.
/// Returns `None` when neither route applies.
pub fn is_similar(f: &GaloisField, a: &MatrixRep, b: &MatrixRep) -> Option<bool> {
    if a.size != b.size {
        return Some(false);
    }
    match (jordan_partition(f, a), jordan_partition(f, b)) {
        (Ok(pa), Ok(pb)) => return Some(pa == pb),
        (Ok(_), Err(_)) | (Err(_), Ok(_)) => return Some(false),
        _ => {}
    }
    if char_poly(f, a) != char_poly(f, b) {
        return Some(false);
    }
    let n = a.size;
    let q = f.order() as u64;
    let gl: u64 = (0..n as u32).map(|i| q.pow(n as u32) - q.pow(i)).product();
    if gl > 1_000_000 {
        return None;
    }
    let total = q.checked_pow((n * n) as u32)?;
    for code in 0..total {
        let mut x = code;
        let entries = (0..n * n)
            .map(|_| {
                let d = (x % q) as u32;
                x /= q;
                d
            })
            .collect();
        let p = MatrixRep { size: n, entries };
        // A P = P B with P invertible
        if mul(f, a, &p) == mul(f, &p, b) && rank(f, &p) == n {
            return Some(true);
        }
    }
    Some(false)
}
