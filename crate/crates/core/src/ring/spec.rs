//! Textual ring specifications.
//!
//! Grammar (whitespace is ignored everywhere):
//!
//! ```text
//! ring    := atom ( 'x' atom )*          left associative
//! atom    := 'Z(' int ')'
//!          | 'GF(' int ')' | 'GF(' int '^' int ')'
//!          | 'M(' int ',' field ')'
//!          | '(' ring ')'
//! ```
//!
//! `GF(q)` accepts any prime power `q`; the canonical rendering always spells
//! out `GF(p^k)` for `k > 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingDescriptor {
    ModularInt(u64),
    GaloisField { p: u64, k: u32 },
    MatrixRing { size: u32, base: Box<RingDescriptor> },
    Product(Box<RingDescriptor>, Box<RingDescriptor>),
}

impl RingDescriptor {
    pub fn product(left: RingDescriptor, right: RingDescriptor) -> Self {
        RingDescriptor::Product(Box::new(left), Box::new(right))
    }

    pub fn matrix(size: u32, base: RingDescriptor) -> Result<Self> {
        let desc = RingDescriptor::MatrixRing { size, base: Box::new(base) };
        desc.validate()?;
        Ok(desc)
    }

    pub fn is_field(&self) -> bool {
        matches!(self, RingDescriptor::GaloisField { .. })
    }

    pub fn is_commutative(&self) -> bool {
        match self {
            RingDescriptor::ModularInt(_) | RingDescriptor::GaloisField { .. } => true,
            RingDescriptor::MatrixRing { size, .. } => *size == 1,
            RingDescriptor::Product(a, b) => a.is_commutative() && b.is_commutative(),
        }
    }

    /// Number of elements, or `None` on overflow.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            RingDescriptor::ModularInt(n) => Some(*n),
            RingDescriptor::GaloisField { p, k } => p.checked_pow(*k),
            RingDescriptor::MatrixRing { size, base } => {
                let q = base.cardinality()?;
                let e = size.checked_mul(*size)?;
                q.checked_pow(e)
            }
            RingDescriptor::Product(a, b) => a.cardinality()?.checked_mul(b.cardinality()?),
        }
    }

    /// Flattens nested products into their factors, left to right.
    pub fn factors(&self) -> Vec<&RingDescriptor> {
        match self {
            RingDescriptor::Product(a, b) => {
                let mut out = a.factors();
                out.extend(b.factors());
                out
            }
            other => vec![other],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RingDescriptor::ModularInt(n) => {
                if *n < 2 {
                    return Err(Error::Semantic(format!("Z({n}): modulus must be at least 2")));
                }
            }
            RingDescriptor::GaloisField { p, k } => {
                if !is_prime(*p) {
                    return Err(Error::Semantic(format!("GF: {p} is not prime")));
                }
                if *k == 0 {
                    return Err(Error::Semantic("GF: exponent must be at least 1".into()));
                }
                if p.checked_pow(*k).is_none() {
                    return Err(Error::Semantic(format!("GF({p}^{k}) is too large")));
                }
            }
            RingDescriptor::MatrixRing { size, base } => {
                if *size == 0 {
                    return Err(Error::Semantic("M: size must be at least 1".into()));
                }
                if !base.is_field() {
                    return Err(Error::Semantic(format!("M: base ring {base} is not a field")));
                }
                base.validate()?;
            }
            RingDescriptor::Product(a, b) => {
                a.validate()?;
                b.validate()?;
            }
        }
        Ok(())
    }

    fn render(&self, f: &mut fmt::Formatter<'_>, nested_right: bool) -> fmt::Result {
        match self {
            RingDescriptor::ModularInt(n) => write!(f, "Z({n})"),
            RingDescriptor::GaloisField { p, k: 1 } => write!(f, "GF({p})"),
            RingDescriptor::GaloisField { p, k } => write!(f, "GF({p}^{k})"),
            RingDescriptor::MatrixRing { size, base } => write!(f, "M({size},{base})"),
            RingDescriptor::Product(a, b) => {
                if nested_right {
                    f.write_str("(")?;
                }
                a.render(f, false)?;
                f.write_str("x")?;
                b.render(f, true)?;
                if nested_right {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(f, false)
    }
}

impl FromStr for RingDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ring_spec(s)
    }
}

pub fn parse_ring_spec(text: &str) -> Result<RingDescriptor> {
    let tokens: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut parser = Parser { tokens, pos: 0, len: text.len() };
    let desc = parser.ring()?;
    if let Some(&(at, c)) = parser.tokens.get(parser.pos) {
        return Err(Error::Syntax { pos: at, msg: format!("unexpected `{c}`") });
    }
    desc.validate()?;
    Ok(desc)
}

struct Parser {
    tokens: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.err(format!("expected `{want}`, found `{c}`")),
            None => self.err(format!("expected `{want}`, found end of input")),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<()> {
        for c in word.chars() {
            self.expect(c)?;
        }
        Ok(())
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.offset();
        let mut value: u64 = 0;
        let mut digits = 0;
        while let Some(c) = self.peek() {
            let Some(d) = c.to_digit(10) else { break };
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as u64))
                .ok_or(Error::Syntax { pos: start, msg: "integer too large".into() })?;
            digits += 1;
            self.pos += 1;
        }
        if digits == 0 {
            return self.err("expected an integer");
        }
        Ok(value)
    }

    fn ring(&mut self) -> Result<RingDescriptor> {
        let mut left = self.atom()?;
        while self.peek() == Some('x') {
            self.pos += 1;
            let right = self.atom()?;
            left = RingDescriptor::product(left, right);
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<RingDescriptor> {
        let at = self.offset();
        match self.peek() {
            Some('Z') => {
                self.keyword("Z(")?;
                let n = self.integer()?;
                self.expect(')')?;
                Ok(RingDescriptor::ModularInt(n))
            }
            Some('G') => self.field(),
            Some('M') => {
                self.keyword("M(")?;
                let n = self.integer()?;
                self.expect(',')?;
                let base_at = self.offset();
                let base = self.ring()?;
                self.expect(')')?;
                let size = u32::try_from(n).map_err(|_| Error::Semantic(format!("M({n},..): size too large")))?;
                if !base.is_field() {
                    return Err(Error::Semantic(format!("M({n},{base}): base at position {base_at} is not a field")));
                }
                Ok(RingDescriptor::MatrixRing { size, base: Box::new(base) })
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.ring()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(c) => Err(Error::Syntax { pos: at, msg: format!("unexpected `{c}`, expected Z, GF, M or `(`") }),
            None => Err(Error::Syntax { pos: at, msg: "unexpected end of input".into() }),
        }
    }

    fn field(&mut self) -> Result<RingDescriptor> {
        self.keyword("GF(")?;
        let base = self.integer()?;
        let desc = if self.peek() == Some('^') {
            self.pos += 1;
            let k = self.integer()?;
            let k = u32::try_from(k).map_err(|_| Error::Semantic("GF: exponent too large".into()))?;
            RingDescriptor::GaloisField { p: base, k }
        } else {
            let (p, k) =
                prime_power(base).ok_or_else(|| Error::Semantic(format!("GF({base}): {base} is not a prime power")))?;
            RingDescriptor::GaloisField { p, k }
        };
        self.expect(')')?;
        Ok(desc)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^k` with `p` prime, or returns `None`.
pub(crate) fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_basic_specs() {
        assert_eq!(parse_ring_spec("Z(12)").unwrap(), RingDescriptor::ModularInt(12));
        assert_eq!(
            parse_ring_spec("M(3,GF(2))").unwrap(),
            RingDescriptor::MatrixRing { size: 3, base: Box::new(RingDescriptor::GaloisField { p: 2, k: 1 }) }
        );
        assert_eq!(parse_ring_spec(" GF( 4 ) ").unwrap(), RingDescriptor::GaloisField { p: 2, k: 2 });
        assert_eq!(parse_ring_spec("GF(3^2)").unwrap(), RingDescriptor::GaloisField { p: 3, k: 2 });
    }

    #[test]
    fn product_is_left_associative() {
        let d = parse_ring_spec("Z(2) x Z(3) x Z(5)").unwrap();
        let expected = RingDescriptor::product(
            RingDescriptor::product(RingDescriptor::ModularInt(2), RingDescriptor::ModularInt(3)),
            RingDescriptor::ModularInt(5),
        );
        assert_eq!(d, expected);
        assert_eq!(d.to_string(), "Z(2)xZ(3)xZ(5)");
    }

    #[test]
    fn right_nested_product_renders_with_parens() {
        let d = RingDescriptor::product(
            RingDescriptor::ModularInt(2),
            RingDescriptor::product(RingDescriptor::ModularInt(3), RingDescriptor::ModularInt(5)),
        );
        assert_eq!(d.to_string(), "Z(2)x(Z(3)xZ(5))");
        assert_eq!(parse_ring_spec(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn canonical_rendering() {
        let d = parse_ring_spec("M( 2 , GF(4) ) x Z(6)").unwrap();
        assert_eq!(d.to_string(), "M(2,GF(2^2))xZ(6)");
    }

    #[test]
    fn rejects_non_prime_power_field() {
        let err = parse_ring_spec("GF(6)").unwrap_err();
        assert!(matches!(err, Error::Semantic(ref m) if m.contains("not a prime power")), "{err}");
        assert!(matches!(parse_ring_spec("GF(4^2)"), Err(Error::Semantic(_))));
    }

    #[test]
    fn rejects_non_field_matrix_base() {
        assert!(matches!(parse_ring_spec("M(2,Z(4))"), Err(Error::Semantic(_))));
        assert!(matches!(parse_ring_spec("M(2,M(2,GF(2)))"), Err(Error::Semantic(_))));
    }

    #[test]
    fn syntax_errors_report_position() {
        match parse_ring_spec("Z(12").unwrap_err() {
            Error::Syntax { pos, .. } => assert_eq!(pos, 4),
            e => panic!("unexpected {e}"),
        }
        match parse_ring_spec("Z(12)y").unwrap_err() {
            Error::Syntax { pos, .. } => assert_eq!(pos, 5),
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(parse_ring_spec(""), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_ring_spec("Z(1)"), Err(Error::Semantic(_))));
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    fn arb_field() -> impl Strategy<Value = RingDescriptor> {
        prop_oneof![Just(2u64), Just(3), Just(5), Just(7), Just(101)]
            .prop_flat_map(|p| (Just(p), 1u32..4))
            .prop_map(|(p, k)| RingDescriptor::GaloisField { p, k })
    }

    fn arb_desc() -> impl Strategy<Value = RingDescriptor> {
        let leaf = prop_oneof![
            (2u64..1000).prop_map(RingDescriptor::ModularInt),
            arb_field(),
            (1u32..5, arb_field()).prop_map(|(n, f)| RingDescriptor::MatrixRing { size: n, base: Box::new(f) }),
        ];
        leaf.prop_recursive(3, 8, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| RingDescriptor::product(a, b)))
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(d in arb_desc()) {
            let text = d.to_string();
            prop_assert_eq!(parse_ring_spec(&text).unwrap(), d);
        }
    }
}
