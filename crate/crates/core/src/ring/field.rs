//! Finite fields `GF(p^k)`.
//!
//! An element is stored as the integer whose base-`p` digits are its
//! polynomial coefficients, constant term least significant. Extension fields
//! use the lexicographically smallest monic irreducible modulus, comparing
//! coefficients from the constant term upward.

use std::fmt;

/// Polynomial over `GF(p)`, constant term first.
type Poly = Vec<u32>;

#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    k: u32,
    q: u32,
    /// Coefficients of the monic modulus, constant term first, length `k + 1`.
    modulus: Poly,
    /// Discrete log tables for `k > 1`: `exp[i] = g^i`, `log[exp[i]] = i`.
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaloisField").field("p", &self.p).field("k", &self.k).field("modulus", &self.modulus).finish()
    }
}

impl GaloisField {
    /// `p` must be prime and `p^k` must fit in `u32`; both are checked by the
    /// descriptor before a field is built.
    pub fn new(p: u32, k: u32) -> Self {
        assert!(k >= 1);
        let q = p.checked_pow(k).expect("field order overflows u32");
        let modulus = if k == 1 { vec![0, 1] } else { smallest_irreducible(p, k) };
        let mut field = GaloisField { p, k, q, modulus, exp: Vec::new(), log: Vec::new() };
        if k > 1 {
            field.build_log_tables();
        }
        field
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        if self.p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a, 0, 1);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.q - 1;
        let e = self.log[a as usize] + self.log[b as usize];
        self.exp[(if e >= order { e - order } else { e }) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if self.k == 1 {
            return Some(mod_pow(a as u64, (self.p - 2) as u64, self.p as u64) as u32);
        }
        let order = self.q - 1;
        let l = self.log[a as usize];
        Some(self.exp[((order - l) % order) as usize])
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplication by reducing polynomial products modulo the modulus.
    /// Independent of the log tables; used to build them and as a test oracle.
    pub fn mul_by_reduction(&self, a: u32, b: u32) -> u32 {
        let pa = self.to_poly(a);
        let pb = self.to_poly(b);
        let prod = poly_mul(&pa, &pb, self.p);
        let rem = poly_rem(&prod, &self.modulus, self.p);
        self.from_poly(&rem)
    }

    pub fn to_poly(&self, mut a: u32) -> Poly {
        let mut out = Vec::with_capacity(self.k as usize);
        for _ in 0..self.k {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    pub fn from_poly(&self, coeffs: &[u32]) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// Human rendering: an integer for prime fields, a polynomial in `t` otherwise.
    pub fn render(&self, a: u32) -> String {
        if self.k == 1 {
            return a.to_string();
        }
        let coeffs = self.to_poly(a);
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// Parses the output of [`render`](Self::render).
    pub fn parse_literal(&self, text: &str) -> Option<u32> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if self.k == 1 {
            let v: u64 = text.parse().ok()?;
            return (v < self.p as u64).then_some(v as u32);
        }
        let mut coeffs = vec![0u32; self.k as usize];
        for term in text.split('+') {
            let (c, e) = match term.find('t') {
                None => (term.parse::<u32>().ok()?, 0usize),
                Some(i) => {
                    let c = if i == 0 { 1 } else { term[..i].parse::<u32>().ok()? };
                    let rest = &term[i + 1..];
                    let e = if rest.is_empty() { 1 } else { rest.strip_prefix('^')?.parse().ok()? };
                    (c, e)
                }
            };
            if c >= self.p || e >= self.k as usize {
                return None;
            }
            coeffs[e] = (coeffs[e] + c) % self.p;
        }
        Some(self.from_poly(&coeffs))
    }

    fn build_log_tables(&mut self) {
        let order = self.q - 1;
        let factors = distinct_prime_factors(order as u64);
        let generator = (2..self.q)
            .find(|&g| factors.iter().all(|&f| self.pow_by_reduction(g, (order as u64) / f) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x;
            log[x as usize] = i;
            x = self.mul_by_reduction(x, generator);
        }
        self.exp = exp;
        self.log = log;
    }

    fn pow_by_reduction(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_by_reduction(acc, base);
            }
            base = self.mul_by_reduction(base, base);
            e >>= 1;
        }
        acc
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

/// Remainder modulo a monic polynomial.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Poly {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = (lead as u64 * c as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = trim(r);
    }
    r
}

/// Irreducibility by trial division with every monic polynomial of degree
/// `1..=deg/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for lower in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut x = lower;
            for _ in 0..d {
                g.push((x % p as u64) as u32);
                x /= p as u64;
            }
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: u32) -> Poly {
    // Lexicographic order with the constant term most significant.
    let count = (p as u64).pow(k);
    for idx in 0..count {
        let mut coeffs = vec![0u32; k as usize];
        let mut x = idx;
        for slot in coeffs.iter_mut().rev() {
            *slot = (x % p as u64) as u32;
            x /= p as u64;
        }
        coeffs.push(1);
        if coeffs[0] != 0 && is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_modulus_and_product() {
        let f = GaloisField::new(2, 2);
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // t = 2, t + 1 = 3
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.render(3), "t+1");
    }

    #[test]
    fn moduli_are_lexicographically_smallest() {
        // GF(8): t^3 + 1 has the root 1, so t^3 + t^2 + 1 wins over t^3 + t + 1.
        assert_eq!(GaloisField::new(2, 3).modulus(), &[1, 0, 1, 1]);
        // GF(9): t^2 + 1, since -1 is not a square mod 3.
        assert_eq!(GaloisField::new(3, 2).modulus(), &[1, 0, 1]);
        // GF(16): t^4 + 1 = (t + 1)^4, next is t^4 + t^3 + 1.
        assert_eq!(GaloisField::new(2, 4).modulus(), &[1, 0, 0, 1, 1]);
    }

    #[test]
    fn log_tables_agree_with_reduction() {
        for (p, k) in [(2, 2), (2, 3), (3, 2), (5, 2), (2, 5), (3, 3)] {
            let f = GaloisField::new(p, k);
            for a in 0..f.order() {
                for b in 0..f.order() {
                    assert_eq!(f.mul(a, b), f.mul_by_reduction(a, b), "GF({p}^{k}) {a}*{b}");
                }
            }
        }
    }

    #[test]
    fn field_axioms_small() {
        for (p, k) in [(2, 1), (3, 1), (7, 1), (2, 2), (3, 2), (2, 3)] {
            let f = GaloisField::new(p, k);
            for a in 0..f.order() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..f.order() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..f.order() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
            assert_eq!(f.inv(0), None);
        }
    }

    #[test]
    fn literal_round_trip() {
        let f = GaloisField::new(3, 2);
        for a in 0..9 {
            assert_eq!(f.parse_literal(&f.render(a)), Some(a));
        }
        assert_eq!(f.parse_literal("2t+1"), Some(7));
        assert_eq!(f.parse_literal("3"), None);
    }
}
