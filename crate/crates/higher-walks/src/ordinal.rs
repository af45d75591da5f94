//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite list of terms `ω^e·c` with strictly decreasing
//! exponents and positive coefficients; the empty list is `0`. Values are
//! immutable and cheap to clone.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// One Cantor normal form term `ω^exp · coef`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Term {
    pub exp: Ordinal,
    pub coef: BigUint,
}

/// An ordinal below ε₀.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordinal(Arc<[Term]>);

/// Result of [`Ordinal::classify`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Kind {
    Zero,
    Successor(Ordinal),
    Limit,
}

/// The cofinality class of an ordinal.
///
/// `Uncountable` never arises from an [`Ordinal`]; it is the rank of the
/// virtual top context used to stand in for ω_n (see [`crate::ladder::Context`]).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CofRank {
    Zero,
    Succ,
    Omega,
    Uncountable,
}

impl fmt::Display for CofRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CofRank::Zero => "ZERO",
            CofRank::Succ => "SUCC",
            CofRank::Omega => "OMEGA",
            CofRank::Uncountable => "UNCOUNTABLE",
        })
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

/// Natural numbers below this are shared rather than allocated.
const SMALL: u64 = 1024;

fn small(n: u64) -> Ordinal {
    static TABLE: OnceLock<Vec<Ordinal>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let zero = Ordinal(Arc::from(Vec::new()));
        let mut v = vec![zero.clone()];
        v.extend((1..SMALL).map(|c| Ordinal(Arc::from(vec![Term { exp: zero.clone(), coef: BigUint::from(c) }]))));
        v
    });
    table[n as usize].clone()
}

impl Ordinal {
    pub fn zero() -> Ordinal {
        small(0)
    }

    pub fn one() -> Ordinal {
        Ordinal::from(1u64)
    }

    pub fn omega() -> Ordinal {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `ω^e`.
    pub fn omega_pow(e: Ordinal) -> Ordinal {
        Ordinal::from_terms(vec![Term { exp: e, coef: BigUint::one() }])
    }

    /// `ω^e · c`, or `0` when `c = 0`.
    pub fn monomial(e: Ordinal, c: u64) -> Ordinal {
        if c == 0 {
            return Ordinal::zero();
        }
        Ordinal::from_terms(vec![Term { exp: e, coef: BigUint::from(c) }])
    }

    /// Builds an ordinal from terms that are already in canonical order.
    ///
    /// # Panics
    /// Panics if exponents do not strictly decrease or a coefficient is zero.
    pub fn from_terms(terms: Vec<Term>) -> Ordinal {
        for w in terms.windows(2) {
            assert!(w[0].exp > w[1].exp, "exponents must strictly decrease");
        }
        assert!(terms.iter().all(|t| !t.coef.is_zero()), "zero coefficient");
        Ordinal(Arc::from(terms))
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// True for the natural numbers (ordinals below ω).
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|t| t.exp.is_zero())
    }

    /// The value as a machine integer when the ordinal is a natural number
    /// that fits.
    pub fn to_u64(&self) -> Option<u64> {
        match &self.0[..] {
            [] => Some(0),
            [t] if t.exp.is_zero() => t.coef.to_u64(),
            _ => None,
        }
    }

    /// Exponent of the leading term (`None` for zero).
    pub fn leading_exp(&self) -> Option<&Ordinal> {
        self.0.first().map(|t| &t.exp)
    }

    /// Exponent of the trailing term (`None` for zero).
    pub fn last_exp(&self) -> Option<&Ordinal> {
        self.0.last().map(|t| &t.exp)
    }

    pub fn classify(&self) -> Kind {
        match self.0.last() {
            None => Kind::Zero,
            Some(t) if t.exp.is_zero() => {
                let mut terms = self.0.to_vec();
                let last = terms.last_mut().unwrap();
                last.coef -= 1u32;
                if last.coef.is_zero() {
                    terms.pop();
                }
                Kind::Successor(Ordinal(Arc::from(terms)))
            }
            Some(_) => Kind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.0.last(), Some(t) if !t.exp.is_zero())
    }

    pub fn is_successor(&self) -> bool {
        matches!(self.0.last(), Some(t) if t.exp.is_zero())
    }

    pub fn predecessor(&self) -> Option<Ordinal> {
        match self.classify() {
            Kind::Successor(p) => Some(p),
            _ => None,
        }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    pub fn cof_rank(&self) -> CofRank {
        match self.0.last() {
            None => CofRank::Zero,
            Some(t) if t.exp.is_zero() => CofRank::Succ,
            Some(_) => CofRank::Omega,
        }
    }

    /// Ordinal addition `self + other`.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = other.0.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = Vec::with_capacity(self.0.len() + other.0.len());
        let mut rest = &other.0[..];
        for t in self.0.iter() {
            match t.exp.cmp(&lead.exp) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => {
                    terms.push(Term { exp: t.exp.clone(), coef: &t.coef + &lead.coef });
                    rest = &other.0[1..];
                    break;
                }
                Ordering::Less => break,
            }
        }
        terms.extend(rest.iter().cloned());
        Ordinal(Arc::from(terms))
    }

    /// Left subtraction: for `x ≥ self`, the unique `r` with `self + r = x`.
    /// Returns `None` when `x < self`.
    pub fn left_sub(&self, x: &Ordinal) -> Option<Ordinal> {
        let (a, b) = (&self.0[..], &x.0[..]);
        for i in 0..a.len() {
            let Some(bt) = b.get(i) else {
                return None;
            };
            let at = &a[i];
            match bt.exp.cmp(&at.exp) {
                Ordering::Less => return None,
                Ordering::Greater => return Some(Ordinal(Arc::from(&b[i..]))),
                Ordering::Equal => match bt.coef.cmp(&at.coef) {
                    Ordering::Less => return None,
                    Ordering::Greater => {
                        let mut terms = vec![Term { exp: bt.exp.clone(), coef: &bt.coef - &at.coef }];
                        terms.extend(b[i + 1..].iter().cloned());
                        return Some(Ordinal(Arc::from(terms)));
                    }
                    Ordering::Equal => {}
                },
            }
        }
        Some(Ordinal(Arc::from(&b[a.len()..])))
    }

    /// Splits a limit `λ` as `(μ, e)` with `λ = μ + ω^e`, `e > 0`.
    fn split_last(&self) -> (Ordinal, Ordinal) {
        let mut terms = self.0.to_vec();
        let last = terms.last_mut().expect("split_last of zero");
        let e = last.exp.clone();
        last.coef -= 1u32;
        if last.coef.is_zero() {
            terms.pop();
        }
        (Ordinal(Arc::from(terms)), e)
    }

    /// The standard fundamental sequence `λ[k]` of a limit ordinal:
    /// `(μ + ω^{e+1})[k] = μ + ω^e·k` and `(μ + ω^e)[k] = μ + ω^{e[k]}` for
    /// limit `e`.
    ///
    /// # Panics
    /// Panics if `self` is not a limit.
    pub fn fund(&self, k: u64) -> Ordinal {
        assert!(self.is_limit(), "fund of a non-limit ordinal {self}");
        let (mu, e) = self.split_last();
        match e.classify() {
            Kind::Successor(p) => mu.add(&Ordinal::monomial(p, k)),
            Kind::Limit => mu.add(&Ordinal::omega_pow(e.fund(k))),
            Kind::Zero => unreachable!(),
        }
    }

    /// The least `k` with `λ[k] ≥ x`, for a limit `λ` and `x < λ`.
    ///
    /// # Panics
    /// Panics if `self` is not a limit or `x ≥ self`.
    pub fn fund_ceil(&self, x: &Ordinal) -> u64 {
        assert!(self.is_limit(), "fund_ceil of a non-limit ordinal {self}");
        assert!(x < self, "fund_ceil: {x} is not below {self}");
        let (mu, e) = self.split_last();
        if *x <= mu {
            return 0;
        }
        let r = mu.left_sub(x).expect("x > mu");
        let lead = &r.0[0];
        match e.classify() {
            Kind::Successor(p) => {
                if lead.exp < p {
                    1
                } else {
                    let c = lead.coef.to_u64().expect("coefficient too large for an index");
                    if r.0.len() == 1 {
                        c
                    } else {
                        c + 1
                    }
                }
            }
            Kind::Limit => {
                let k = e.fund_ceil(&lead.exp);
                let exact = r.0.len() == 1 && lead.coef.is_one();
                if e.fund(k) == lead.exp && !exact {
                    k + 1
                } else {
                    k
                }
            }
            Kind::Zero => unreachable!(),
        }
    }

    /// The `k` with `λ[k] = y`, if any.
    pub fn fund_index(&self, y: &Ordinal) -> Option<u64> {
        if y >= self {
            return None;
        }
        let k = self.fund_ceil(y);
        (self.fund(k) == *y).then_some(k)
    }

    /// Parses ordinal notation, e.g. `w^(w)*2+w^3+4`.
    pub fn parse(text: &str) -> Result<Ordinal, ParseError> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let o = p.ordinal()?;
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(o)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Ordinal {
        if n < SMALL {
            small(n)
        } else {
            Ordinal::monomial(Ordinal::zero(), n)
        }
    }
}

impl From<usize> for Ordinal {
    fn from(n: usize) -> Ordinal {
        Ordinal::from(n as u64)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Ordinal) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Ordinal) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            let c = a.exp.cmp(&b.exp).then_with(|| a.coef.cmp(&b.coef));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coef)?;
                continue;
            }
            f.write_str("w")?;
            if t.exp != Ordinal::one() {
                match t.exp.to_u64() {
                    Some(n) => write!(f, "^{n}")?,
                    None => write!(f, "^({})", t.exp)?,
                }
            }
            if !t.coef.is_one() {
                write!(f, "*{}", t.coef)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Ordinal {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Ordinal, ParseError> {
        Ordinal::parse(s)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> ParseError {
        ParseError { position: self.pos, message: message.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<BigUint, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a natural number"));
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        if digits.len() > 1 && digits.starts_with('0') {
            return Err(ParseError { position: start, message: "leading zero".into() });
        }
        Ok(digits.parse().unwrap())
    }

    fn ordinal(&mut self) -> Result<Ordinal, ParseError> {
        let mut terms: Vec<Term> = Vec::new();
        loop {
            let term_pos = self.pos;
            let t = self.term()?;
            if t.coef.is_zero() {
                if terms.is_empty() && self.peek() != Some(b'+') {
                    return Ok(Ordinal::zero());
                }
                return Err(ParseError { position: term_pos, message: "coefficient 0 is not allowed".into() });
            }
            if let Some(prev) = terms.last() {
                if prev.exp <= t.exp {
                    return Err(ParseError {
                        position: term_pos,
                        message: "non-canonical form: exponents must strictly decrease".into(),
                    });
                }
            }
            terms.push(t);
            if !self.eat(b'+') {
                break;
            }
        }
        Ok(Ordinal(Arc::from(terms)))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let mut exp = Ordinal::one();
                if self.eat(b'^') {
                    let exp_pos = self.pos;
                    if self.eat(b'(') {
                        exp = self.ordinal()?;
                        if !self.eat(b')') {
                            return Err(self.err("expected ')'"));
                        }
                        if exp.to_u64().is_some() {
                            return Err(ParseError {
                                position: exp_pos,
                                message: "non-canonical form: natural exponents are written without parentheses".into(),
                            });
                        }
                    } else {
                        let n = self.nat()?;
                        if n.is_zero() || n.is_one() {
                            return Err(ParseError {
                                position: exp_pos,
                                message: "non-canonical form: exponents 0 and 1 are not written".into(),
                            });
                        }
                        exp = Ordinal::from_terms(vec![Term { exp: Ordinal::zero(), coef: n }]);
                    }
                }
                let mut coef = BigUint::one();
                if self.eat(b'*') {
                    let coef_pos = self.pos;
                    coef = self.nat()?;
                    if coef.is_zero() {
                        return Err(ParseError { position: coef_pos, message: "coefficient 0 is not allowed".into() });
                    }
                    if coef.is_one() {
                        return Err(ParseError { position: coef_pos, message: "non-canonical form: coefficient 1 is not written".into() });
                    }
                }
                Ok(Term { exp, coef })
            }
            Some(b'0'..=b'9') => {
                let coef = self.nat()?;
                Ok(Term { exp: Ordinal::zero(), coef })
            }
            _ => Err(self.err("expected 'w' or a natural number")),
        }
    }
}

/// Shorthand for parsing notation in tests and examples.
///
/// # Panics
/// Panics on malformed notation.
pub fn ord(text: &str) -> Ordinal {
    Ordinal::parse(text).unwrap_or_else(|e| panic!("bad ordinal {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: ordinals as sorted multisets of exponent terms,
    /// added by concatenation and then rewritten with `ω^a + ω^b = ω^b` for
    /// `a < b` until no rewrite applies.
    fn rewrite_add(a: &Ordinal, b: &Ordinal) -> Ordinal {
        let mut seq: Vec<Ordinal> = Vec::new();
        for x in [a, b] {
            for t in x.terms() {
                for _ in 0..t.coef.to_u64().unwrap() {
                    seq.push(t.exp.clone());
                }
            }
        }
        loop {
            let pos = seq.windows(2).position(|w| w[0] < w[1]);
            match pos {
                Some(i) => {
                    seq.remove(i);
                }
                None => break,
            }
        }
        let mut terms: Vec<Term> = Vec::new();
        for e in seq {
            match terms.last_mut() {
                Some(t) if t.exp == e => t.coef += 1u32,
                _ => terms.push(Term { exp: e, coef: BigUint::one() }),
            }
        }
        Ordinal::from_terms(terms)
    }

    pub(crate) fn arb_ordinal(depth: u32) -> BoxedStrategy<Ordinal> {
        let leaf = (0u64..6).prop_map(Ordinal::from).boxed();
        if depth == 0 {
            return leaf;
        }
        let exp = arb_ordinal(depth - 1);
        prop::collection::vec((exp, 1u64..4), 0..4)
            .prop_map(|mut pairs| {
                pairs.sort_by(|a, b| b.0.cmp(&a.0));
                pairs.dedup_by(|a, b| a.0 == b.0);
                Ordinal::from_terms(
                    pairs.into_iter().map(|(e, c)| Term { exp: e, coef: BigUint::from(c) }).collect(),
                )
            })
            .boxed()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(ord("0"), Ordinal::zero());
        let x = ord("w^2*3+w+5");
        assert_eq!(x.to_string(), "w^2*3+w+5");
        assert_eq!(x.terms().len(), 3);
        assert!(Ordinal::parse("w+w").is_err());
        assert!(Ordinal::parse("w*0").is_err());
        assert!(Ordinal::parse("w+0").is_err());
        assert!(Ordinal::parse("3+w").is_err());
        assert_eq!(ord("w^(w)*2+w^3+4").to_string(), "w^(w)*2+w^3+4");
        assert_eq!(ord("w^(w+1)").to_string(), "w^(w+1)");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = Ordinal::parse("w^2+w^3").unwrap_err();
        assert_eq!(e.position, 4);
        let e = Ordinal::parse("w*").unwrap_err();
        assert_eq!(e.position, 2);
        let e = Ordinal::parse("w^(w").unwrap_err();
        assert_eq!(e.position, 4);
        let e = Ordinal::parse("").unwrap_err();
        assert_eq!(e.position, 0);
    }

    #[test]
    fn compare_examples() {
        assert!(ord("5") < ord("w"));
        assert!(ord("w*2") > ord("w+7"));
        assert_eq!(ord("w^2").cmp(&ord("w^2")), Ordering::Equal);
        assert!(ord("w^2") > ord("w*9"));
        assert!(ord("w^(w)") > ord("w^100*7"));
    }

    #[test]
    fn add_examples() {
        assert_eq!(ord("1").add(&ord("w")), ord("w"));
        assert_eq!(ord("w").add(&ord("1")), ord("w+1"));
        assert_eq!(ord("w^2+w").add(&ord("w*3")), ord("w^2+w*4"));
        assert_eq!(rewrite_add(&ord("w^2+w"), &ord("w*3")), ord("w^2+w*4"));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(ord("0").classify(), Kind::Zero);
        assert_eq!(ord("w+3").classify(), Kind::Successor(ord("w+2")));
        assert_eq!(ord("w^2").classify(), Kind::Limit);
        assert_eq!(ord("0").cof_rank(), CofRank::Zero);
        assert_eq!(ord("w*5+1").cof_rank(), CofRank::Succ);
        assert_eq!(ord("w^(w)").cof_rank(), CofRank::Omega);
    }

    #[test]
    fn fundamental_sequences() {
        assert_eq!(ord("w").fund(4), ord("4"));
        assert_eq!(ord("w*2").fund(3), ord("w+3"));
        assert_eq!(ord("w^2").fund(3), ord("w*3"));
        assert_eq!(ord("w^2").fund(0), ord("0"));
        assert_eq!(ord("w^3+w^2").fund(2), ord("w^3+w*2"));
        assert_eq!(ord("w^(w)").fund(3), ord("w^3"));
        assert_eq!(ord("w^(w*2)").fund(2), ord("w^(w+2)"));
        assert_eq!(ord("w^(w)").fund_ceil(&ord("w^3+1")), 4);
        assert_eq!(ord("w^(w)").fund_ceil(&ord("w^3")), 3);
        assert_eq!(ord("w^2").fund_ceil(&ord("w*3")), 3);
        assert_eq!(ord("w^2").fund_ceil(&ord("w*3+1")), 4);
        assert_eq!(ord("w^2").fund_ceil(&ord("5")), 1);
        assert_eq!(ord("w*2").fund_index(&ord("w+4")), Some(4));
        assert_eq!(ord("w^2").fund_index(&ord("w+4")), None);
    }

    #[test]
    fn left_subtraction() {
        assert_eq!(ord("w+3").left_sub(&ord("w*2")), Some(ord("w")));
        assert_eq!(ord("w*2+1").left_sub(&ord("w^2")), Some(ord("w^2")));
        assert_eq!(ord("w").left_sub(&ord("w+5")), Some(ord("5")));
        assert_eq!(ord("w+5").left_sub(&ord("w")), None);
    }

    proptest! {
        #[test]
        fn add_matches_rewriting(a in arb_ordinal(2), b in arb_ordinal(2)) {
            prop_assert_eq!(a.add(&b), rewrite_add(&a, &b));
        }

        #[test]
        fn order_and_addition_laws(a in arb_ordinal(2), b in arb_ordinal(2), c in arb_ordinal(2)) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.add(&Ordinal::zero()), a.clone());
            prop_assert_eq!(Ordinal::zero().add(&a), a.clone());
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
            prop_assert!(a.add(&b) >= b);
            if !b.is_zero() {
                prop_assert!(a.add(&b) > a);
            }
        }

        #[test]
        fn left_sub_inverts_add(a in arb_ordinal(2), b in arb_ordinal(2)) {
            let x = a.add(&b);
            let r = a.left_sub(&x).unwrap();
            prop_assert_eq!(a.add(&r), x);
        }

        #[test]
        fn classify_consistent(a in arb_ordinal(2)) {
            match a.classify() {
                Kind::Zero => prop_assert_eq!(a.cof_rank(), CofRank::Zero),
                Kind::Successor(p) => {
                    prop_assert_eq!(a.cof_rank(), CofRank::Succ);
                    prop_assert_eq!(p.succ(), a.clone());
                }
                Kind::Limit => prop_assert_eq!(a.cof_rank(), CofRank::Omega),
            }
        }

        #[test]
        fn round_trip(a in arb_ordinal(3)) {
            prop_assert_eq!(Ordinal::parse(&a.to_string()).unwrap(), a);
        }

        #[test]
        fn fundamental_sequence_laws(a in arb_ordinal(2), k in 0u64..6, x in arb_ordinal(2)) {
            prop_assume!(a.is_limit());
            prop_assert!(a.fund(k) < a.fund(k + 1));
            prop_assert!(a.fund(k + 1) < a);
            if x < a {
                let c = a.fund_ceil(&x);
                prop_assert!(a.fund(c) >= x);
                if c > 0 {
                    prop_assert!(a.fund(c - 1) < x);
                }
            }
        }
    }
}
