//! Finite integer combinations of generators `⟨α⃗⟩`, with the boundary map
//! and the augmentation.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::ordinal::Ordinal;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("generator {0:?} is not strictly increasing")]
    NotIncreasing(Vec<Ordinal>),
    #[error("generator {0:?} is empty")]
    Empty(Vec<Ordinal>),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("the boundary of a degree 0 chain is the augmentation")]
    DegreeZero,
    #[error("augmentation is only defined in degree 0, got degree {0}")]
    NotDegreeZero(usize),
    #[error("coefficient overflow")]
    Overflow,
    #[error("malformed chain JSON: {0}")]
    Json(String),
}

/// Whether a tuple is strictly increasing.
pub fn is_increasing(t: &[Ordinal]) -> bool {
    t.windows(2).all(|w| w[0] < w[1])
}

/// `α⃗ⁱ`: the tuple with coordinate `i` removed.
pub fn face(t: &[Ordinal], i: usize) -> Vec<Ordinal> {
    let mut v = t.to_vec();
    v.remove(i);
    v
}

/// A finite sum `Σ z⟨α⃗⟩` over increasing tuples of a common length. Zero
/// coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Chain {
    terms: BTreeMap<Vec<Ordinal>, i64>,
}

impl Chain {
    pub fn zero() -> Chain {
        Chain::default()
    }

    /// The generator `⟨t⟩`.
    pub fn gen(t: Vec<Ordinal>) -> Result<Chain, ChainError> {
        Chain::from_terms([(t, 1)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<Ordinal>, i64)>>(terms: I) -> Result<Chain, ChainError> {
        let mut c = Chain::zero();
        for (t, z) in terms {
            if t.is_empty() {
                return Err(ChainError::Empty(t));
            }
            if !is_increasing(&t) {
                return Err(ChainError::NotIncreasing(t));
            }
            if let Some(d) = c.degree() {
                if d + 1 != t.len() {
                    return Err(ChainError::DegreeMismatch(d, t.len() - 1));
                }
            }
            c.try_add_term(t, z)?;
        }
        Ok(c)
    }

    /// Tuple length minus one, or `None` for the zero chain.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|t| t.len() - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, t: &[Ordinal]) -> i64 {
        self.terms.get(t).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Ordinal>, i64)> {
        self.terms.iter().map(|(t, z)| (t, *z))
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<Ordinal>> {
        self.terms.keys()
    }

    /// Least coordinate occurring in the support.
    pub fn min_coord(&self) -> Option<&Ordinal> {
        self.terms.keys().filter_map(|t| t.first()).min()
    }

    /// Greatest coordinate occurring in the support.
    pub fn max_coord(&self) -> Option<&Ordinal> {
        self.terms.keys().filter_map(|t| t.last()).max()
    }

    fn try_add_term(&mut self, t: Vec<Ordinal>, z: i64) -> Result<(), ChainError> {
        if z == 0 {
            return Ok(());
        }
        let entry = self.terms.entry(t);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(z);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().checked_add(z).ok_or(ChainError::Overflow)?;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    /// Adds `z⟨t⟩` in place.
    ///
    /// # Panics
    /// Panics on coefficient overflow, or (in debug builds) on a tuple that
    /// is not increasing or has the wrong length.
    pub fn add_term(&mut self, t: Vec<Ordinal>, z: i64) {
        debug_assert!(is_increasing(&t), "generator {t:?} is not increasing");
        debug_assert!(self.degree().map_or(true, |d| d + 1 == t.len()), "degree mismatch at {t:?}");
        self.try_add_term(t, z).expect("coefficient overflow");
    }

    /// `self + z·other`.
    pub fn combine(&self, z: i64, other: &Chain) -> Result<Chain, ChainError> {
        if let (Some(a), Some(b)) = (self.degree(), other.degree()) {
            if a != b {
                return Err(ChainError::DegreeMismatch(a, b));
            }
        }
        let mut out = self.clone();
        for (t, c) in other.terms() {
            let w = c.checked_mul(z).ok_or(ChainError::Overflow)?;
            out.try_add_term(t.clone(), w)?;
        }
        Ok(out)
    }

    /// In-place `self += z·other`.
    ///
    /// # Panics
    /// Panics on degree mismatch or overflow.
    pub fn add_scaled(&mut self, z: i64, other: &Chain) {
        if self.terms.len() < other.terms.len() {
            self.add_scaled_owned(z, other.clone());
        } else {
            self.absorb(z, other.terms.iter().map(|(t, c)| (t.clone(), *c)));
        }
    }

    /// In-place `self += z·other`, reusing the storage of `other` when it is
    /// the larger of the two.
    ///
    /// # Panics
    /// Panics on degree mismatch or overflow.
    pub fn add_scaled_owned(&mut self, z: i64, mut other: Chain) {
        if self.terms.len() < other.terms.len() {
            if z != 1 {
                for c in other.terms.values_mut() {
                    *c = c.checked_mul(z).expect("chain arithmetic");
                }
            }
            let mine = std::mem::replace(self, other);
            self.absorb(1, mine.terms.into_iter());
        } else {
            self.absorb(z, other.terms.into_iter());
        }
    }

    fn absorb<I: Iterator<Item = (Vec<Ordinal>, i64)>>(&mut self, z: i64, terms: I) {
        let mut terms = terms.peekable();
        if let (Some(a), Some((t, _))) = (self.degree(), terms.peek()) {
            assert_eq!(a + 1, t.len(), "chain arithmetic: degree mismatch");
        }
        for (t, c) in terms {
            let w = c.checked_mul(z).expect("chain arithmetic");
            self.try_add_term(t, w).expect("chain arithmetic");
        }
    }

    pub fn scale(&self, z: i64) -> Chain {
        Chain::zero().combine(z, self).expect("chain arithmetic")
    }

    /// `∂⟨α⃗⟩ = Σᵢ (−1)ⁱ ⟨α⃗ⁱ⟩`, extended linearly.
    pub fn boundary(&self) -> Result<Chain, ChainError> {
        match self.degree() {
            None => Ok(Chain::zero()),
            Some(0) => Err(ChainError::DegreeZero),
            Some(_) => {
                let mut out = Chain::zero();
                for (t, z) in self.terms() {
                    for i in 0..t.len() {
                        let s = if i % 2 == 0 { z } else { z.checked_neg().ok_or(ChainError::Overflow)? };
                        out.try_add_term(face(t, i), s)?;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Sum of the coefficients of a degree 0 chain.
    pub fn augment(&self) -> Result<i64, ChainError> {
        match self.degree() {
            None => Ok(0),
            Some(0) => self
                .terms
                .values()
                .try_fold(0i64, |acc, z| acc.checked_add(*z))
                .ok_or(ChainError::Overflow),
            Some(d) => Err(ChainError::NotDegreeZero(d)),
        }
    }

    /// The subchain of terms satisfying `keep`.
    pub fn restrict<F: Fn(&[Ordinal]) -> bool>(&self, keep: F) -> Chain {
        Chain { terms: self.terms.iter().filter(|(t, _)| keep(t)).map(|(t, z)| (t.clone(), *z)).collect() }
    }

    /// `[{"coeff": z, "gen": [...]}, ...]` in tuple order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(t, z)| json!({"coeff": z, "gen": t.iter().map(|o| o.to_string()).collect::<Vec<_>>()}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Chain, ChainError> {
        let arr = v.as_array().ok_or_else(|| ChainError::Json("expected an array".into()))?;
        let mut terms = Vec::new();
        for item in arr {
            let z = item
                .get("coeff")
                .and_then(Value::as_i64)
                .ok_or_else(|| ChainError::Json("missing integer \"coeff\"".into()))?;
            let gen = item
                .get("gen")
                .and_then(Value::as_array)
                .ok_or_else(|| ChainError::Json("missing array \"gen\"".into()))?;
            let mut t = Vec::new();
            for g in gen {
                let s = g.as_str().ok_or_else(|| ChainError::Json("generator entries must be strings".into()))?;
                t.push(s.parse::<Ordinal>().map_err(|e| ChainError::Json(e.to_string()))?);
            }
            terms.push((t, z));
        }
        Chain::from_terms(terms)
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (t, z)) in self.terms().enumerate() {
            let gen: Vec<String> = t.iter().map(|o| o.to_string()).collect();
            let gen = gen.join(",");
            match (k, z) {
                (0, 1) => write!(f, "<{gen}>")?,
                (0, -1) => write!(f, "-<{gen}>")?,
                (0, z) => write!(f, "{z}<{gen}>")?,
                (_, 1) => write!(f, " + <{gen}>")?,
                (_, -1) => write!(f, " - <{gen}>")?,
                (_, z) if z < 0 => write!(f, " - {}<{gen}>", -z)?,
                (_, z) => write!(f, " + {z}<{gen}>")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
