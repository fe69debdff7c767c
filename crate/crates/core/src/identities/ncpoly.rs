//! Noncommutative polynomials with integer coefficients.
//!
//! Words are sequences of letter indices (`0 = x`, `1 = y`, `2 = z`, ...);
//! the empty word is `1`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

const LETTERS: &[u8] = b"xyzuvw";

pub type Word = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct NcPoly {
    terms: BTreeMap<Word, i64>,
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(Vec::new(), 1)
    }

    /// The single letter with index `letter`.
    pub fn var(letter: u8) -> Self {
        Self::monomial(vec![letter], 1)
    }

    pub fn x() -> Self {
        Self::var(0)
    }

    pub fn y() -> Self {
        Self::var(1)
    }

    pub fn monomial(word: Word, coeff: i64) -> Self {
        let mut p = NcPoly::zero();
        p.add_term(word, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn coefficient(&self, word: &[u8]) -> i64 {
        self.terms.get(word).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    fn add_term(&mut self, word: Word, coeff: i64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if *slot.get() == 0 {
                    slot.remove();
                }
            }
        }
    }

    pub fn scale(&self, k: i64) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w, c) in self.terms() {
            out.add_term(w.clone(), c * k);
        }
        out
    }

    pub fn pow(&self, e: u32) -> NcPoly {
        (0..e).fold(NcPoly::one(), |acc, _| &acc * self)
    }
}

pub fn ncpoly_add(p: &NcPoly, q: &NcPoly) -> NcPoly {
    let mut out = p.clone();
    for (w, c) in q.terms() {
        out.add_term(w.clone(), c);
    }
    out
}

/// Word-concatenation convolution.
pub fn ncpoly_mul(p: &NcPoly, q: &NcPoly) -> NcPoly {
    let mut out = NcPoly::zero();
    for (u, a) in p.terms() {
        for (v, b) in q.terms() {
            let mut w = u.clone();
            w.extend_from_slice(v);
            out.add_term(w, a * b);
        }
    }
    out
}

impl Add for &NcPoly {
    type Output = NcPoly;
    fn add(self, rhs: &NcPoly) -> NcPoly {
        ncpoly_add(self, rhs)
    }
}

impl Sub for &NcPoly {
    type Output = NcPoly;
    fn sub(self, rhs: &NcPoly) -> NcPoly {
        ncpoly_add(self, &rhs.scale(-1))
    }
}

impl Mul for &NcPoly {
    type Output = NcPoly;
    fn mul(self, rhs: &NcPoly) -> NcPoly {
        ncpoly_mul(self, rhs)
    }
}

impl Neg for &NcPoly {
    type Output = NcPoly;
    fn neg(self) -> NcPoly {
        self.scale(-1)
    }
}

fn render_word(w: &[u8]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    let mut out = String::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        let letter = LETTERS.get(w[i] as usize).map_or_else(|| format!("a{}", w[i]), |&c| (c as char).to_string());
        out.push_str(&letter);
        if j - i > 1 {
            out.push_str(&format!("^{}", j - i));
        }
        i = j;
    }
    out
}

impl fmt::Display for NcPoly {
    /// Terms by increasing degree, then lexicographically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<(&Word, i64)> = self.terms().collect();
        terms.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        for (i, (w, c)) in terms.into_iter().enumerate() {
            let word = render_word(w);
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            match (i, sign) {
                (0, "-") => f.write_str("-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            if w.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                f.write_str(&word)?;
            } else {
                write!(f, "{mag}{word}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn product_examples() {
        let (x, y) = (NcPoly::x(), NcPoly::y());
        assert_eq!(&x * &y, NcPoly::monomial(vec![0, 1], 1));
        let lhs = &(&NcPoly::one() + &(&y * &x)) * &x;
        assert_eq!(lhs.to_string(), "x + yx^2");
        let diff = &(&x + &y) * &(&x - &y);
        assert_eq!(diff.to_string(), "x^2 - xy + yx - y^2");
        assert_ne!(diff, &(&x * &x) - &(&y * &y));
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = NcPoly::x();
        let zero = &x - &x;
        assert!(zero.is_zero());
        assert_eq!(zero.to_string(), "0");
        assert_eq!(zero.terms().count(), 0);
    }

    fn arb_poly() -> impl Strategy<Value = NcPoly> {
        proptest::collection::vec((proptest::collection::vec(0u8..2, 0..=2), -3i64..=3), 0..4).prop_map(|terms| {
            let mut p = NcPoly::zero();
            for (w, c) in terms {
                p = &p + &NcPoly::monomial(w, c);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&a * &NcPoly::one(), a.clone());
            prop_assert!(a.terms().all(|(_, c)| c != 0));
            prop_assert!((&(&a * &b) * &c).degree().unwrap_or(0) <= 6);
        }
    }
}
