//! Ladder systems (C-sequences), compounded views and internality.
//!
//! A [`LadderSystem`] assigns to every ordinal `β` a ladder `C_β`: the empty
//! set for `0`, `{α}` for `α+1`, and a strictly increasing cofinal
//! ω-sequence of `0` and successor ordinals for every limit.
//!
//! A [`Context`] is a compounded view `C_{β_k … β_1 T}` where the top `T` is
//! either an ordinal `ε` or the virtual top `Ω`. The view of `Ω` is the
//! identity (every ordinal is an element, indexed by itself), so
//! `C_{βΩ} = C_β`; `Ω` plays the role of an uncountable regular cardinal at
//! desk scale and carries the rank [`CofRank::Uncountable`].

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ordinal::{CofRank, Kind, Ordinal};

/// How limit ladders are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LadderKind {
    /// `C_λ = {0} ∪ {λ[k]+1 : k < ω}` for the standard fundamental sequence.
    Canonical,
    /// Deterministic pseudo-random ladders derived from a seed.
    Seeded(u64),
}

impl fmt::Display for LadderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LadderKind::Canonical => f.write_str("canonical"),
            LadderKind::Seeded(s) => write!(f, "seeded:{s}"),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LadderError {
    #[error("ordinal {0} is outside the universe bound {1}")]
    OutOfBounds(Ordinal, Ordinal),
    #[error("invalid ladder kind {0:?} (expected canonical or seeded:<n>)")]
    BadKind(String),
}

/// The lazily generated prefix of one seeded ladder.
struct SeededPrefix {
    rng: ChaCha8Rng,
    elements: Vec<Ordinal>,
    next_k: u64,
}

/// An assignment `β ↦ C_β`.
///
/// Cloning is cheap; clones share the lazily generated seeded prefixes.
#[derive(Clone)]
pub struct LadderSystem {
    kind: LadderKind,
    bound: Option<Ordinal>,
    seeded: Arc<Mutex<HashMap<Ordinal, SeededPrefix>>>,
}

impl fmt::Debug for LadderSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LadderSystem").field("kind", &self.kind).field("bound", &self.bound).finish()
    }
}

impl LadderSystem {
    pub fn new(kind: LadderKind) -> LadderSystem {
        LadderSystem { kind, bound: None, seeded: Arc::new(Mutex::new(HashMap::new())) }
    }

    pub fn canonical() -> LadderSystem {
        LadderSystem::new(LadderKind::Canonical)
    }

    pub fn seeded(seed: u64) -> LadderSystem {
        LadderSystem::new(LadderKind::Seeded(seed))
    }

    /// Parses `canonical` or `seeded:<n>`.
    pub fn from_spec(spec: &str) -> Result<LadderSystem, LadderError> {
        if spec == "canonical" {
            return Ok(LadderSystem::canonical());
        }
        if let Some(n) = spec.strip_prefix("seeded:") {
            if let Ok(seed) = n.parse() {
                return Ok(LadderSystem::seeded(seed));
            }
        }
        Err(LadderError::BadKind(spec.to_string()))
    }

    /// Restricts the universe to ordinals below `bound`.
    pub fn with_bound(mut self, bound: Ordinal) -> LadderSystem {
        self.bound = Some(bound);
        self
    }

    pub fn kind(&self) -> LadderKind {
        self.kind
    }

    pub fn bound(&self) -> Option<&Ordinal> {
        self.bound.as_ref()
    }

    /// Checks that `x` lies below the universe bound.
    pub fn check(&self, x: &Ordinal) -> Result<(), LadderError> {
        match &self.bound {
            Some(b) if x >= b => Err(LadderError::OutOfBounds(x.clone(), b.clone())),
            _ => Ok(()),
        }
    }

    /// The view `C_β`.
    pub fn ladder(&self, beta: &Ordinal) -> Result<Context, LadderError> {
        self.check(beta)?;
        Ok(Context::ordinal(beta.clone()))
    }

    /// The compounded view `C_{β⃗}`: the ladder of the last coordinate,
    /// compounded successively by the earlier ones. `Ok(None)` means the
    /// compounding is undefined because some coordinate is not an element of
    /// the view built so far.
    pub fn compound(&self, tuple: &[Ordinal]) -> Result<Option<Context>, LadderError> {
        let Some((top, rest)) = tuple.split_last() else {
            return Ok(None);
        };
        for x in tuple {
            self.check(x)?;
        }
        let mut ctx = Context::ordinal(top.clone());
        for c in rest.iter().rev() {
            match ctx.compound(self, c) {
                Some(next) => ctx = next,
                None => return Ok(None),
            }
        }
        Ok(Some(ctx))
    }

    /// `C^{β⃗}(α) = min(C_{β⃗} \ (α+1))`; `Ok(None)` when undefined.
    pub fn step(&self, tuple: &[Ordinal], alpha: &Ordinal) -> Result<Option<Ordinal>, LadderError> {
        Ok(self.compound(tuple)?.and_then(|ctx| ctx.step(self, alpha)))
    }

    /// Number of elements of `C_β` (`None` for ω).
    pub fn len(&self, beta: &Ordinal) -> Option<u64> {
        match beta.classify() {
            Kind::Zero => Some(0),
            Kind::Successor(_) => Some(1),
            Kind::Limit => None,
        }
    }

    /// The `k`-th element of `C_β`.
    pub fn elem(&self, beta: &Ordinal, k: u64) -> Option<Ordinal> {
        match beta.classify() {
            Kind::Zero => None,
            Kind::Successor(p) => (k == 0).then_some(p),
            Kind::Limit => Some(match self.kind {
                LadderKind::Canonical => {
                    if k == 0 {
                        Ordinal::zero()
                    } else {
                        beta.fund(k - 1).succ()
                    }
                }
                LadderKind::Seeded(seed) => self.seeded_elem(seed, beta, k),
            }),
        }
    }

    /// The least `k` with `elem(β, k) ≥ x`, or `None` if every element is
    /// below `x`.
    pub fn ceil_index(&self, beta: &Ordinal, x: &Ordinal) -> Option<u64> {
        match beta.classify() {
            Kind::Zero => None,
            Kind::Successor(p) => (*x <= p).then_some(0),
            Kind::Limit => {
                if x >= beta {
                    return None;
                }
                if x.is_zero() {
                    return Some(0);
                }
                // least k ≥ 1 with λ[k-1]+1 ≥ x, i.e. λ[k-1] ≥ x' where x' is
                // the predecessor of a successor x and x itself otherwise
                let xp = x.predecessor().unwrap_or_else(|| x.clone());
                let canonical = 1 + beta.fund_ceil(&xp);
                match self.kind {
                    LadderKind::Canonical => Some(canonical),
                    LadderKind::Seeded(_) => {
                        // seeded elements dominate canonical ones index by
                        // index, so the answer is at most `canonical`
                        let mut k = 0;
                        loop {
                            if self.elem(beta, k).expect("limit ladder") >= *x {
                                return Some(k);
                            }
                            k += 1;
                            debug_assert!(k <= canonical);
                        }
                    }
                }
            }
        }
    }

    /// The index of `y` in `C_β`, if `y ∈ C_β`.
    pub fn index_of(&self, beta: &Ordinal, y: &Ordinal) -> Option<u64> {
        let k = self.ceil_index(beta, y)?;
        (self.elem(beta, k).as_ref() == Some(y)).then_some(k)
    }

    pub fn contains(&self, beta: &Ordinal, y: &Ordinal) -> bool {
        self.index_of(beta, y).is_some()
    }

    /// `min(C_β \ x)`: the least element `≥ x`.
    pub fn min_from(&self, beta: &Ordinal, x: &Ordinal) -> Option<Ordinal> {
        self.ceil_index(beta, x).and_then(|k| self.elem(beta, k))
    }

    /// `|x ∩ C_β|`.
    pub fn count_below(&self, beta: &Ordinal, x: &Ordinal) -> u64 {
        match self.ceil_index(beta, x) {
            Some(k) => k,
            None => self.len(beta).expect("a limit ladder is cofinal"),
        }
    }

    /// `max(x ∩ C_β)`, with the convention `max ∅ = 0`.
    pub fn max_below(&self, beta: &Ordinal, x: &Ordinal) -> Ordinal {
        match self.count_below(beta, x) {
            0 => Ordinal::zero(),
            k => self.elem(beta, k - 1).expect("element exists"),
        }
    }

    /// `C^β(α) = min(C_β \ (α+1))`.
    pub fn next_above(&self, beta: &Ordinal, alpha: &Ordinal) -> Option<Ordinal> {
        self.min_from(beta, &alpha.succ())
    }

    fn seeded_elem(&self, seed: u64, lambda: &Ordinal, k: u64) -> Ordinal {
        let mut cache = self.seeded.lock().expect("ladder cache poisoned");
        let prefix = cache.entry(lambda.clone()).or_insert_with(|| {
            let mut h = Sha256::new();
            h.update(seed.to_le_bytes());
            h.update(lambda.to_string().as_bytes());
            SeededPrefix {
                rng: ChaCha8Rng::from_seed(h.finalize().into()),
                elements: vec![Ordinal::zero()],
                next_k: 0,
            }
        });
        // gaps between consecutive fundamental-sequence terms are infinite
        // unless λ = μ + ω, so only then must the offsets vanish
        let infinite_gaps = lambda.last_exp() != Some(&Ordinal::one());
        while prefix.elements.len() as u64 <= k {
            let kj = prefix.next_k + prefix.rng.gen_range(0..3u64);
            let r: u64 = if infinite_gaps { prefix.rng.gen_range(0..4) } else { 0 };
            prefix.elements.push(lambda.fund(kj).add(&Ordinal::from(1 + r)));
            prefix.next_k = kj + 1;
        }
        prefix.elements[k as usize].clone()
    }
}

/// A compounded ladder view together with the cofinality rank of its head.
///
/// Elements are addressed by ordinal indices: the view of `Ω` indexes every
/// ordinal by itself, and every other view is a composition
/// `j ↦ L_{m_0}(L_{m_1}(… L_{m_r}(j)))` of ladder enumerations.
#[derive(Clone)]
pub struct Context {
    omega_top: bool,
    maps: Vec<Ordinal>,
    rank: CofRank,
    chain: Vec<Ordinal>,
}

impl PartialEq for Context {
    fn eq(&self, other: &Context) -> bool {
        self.maps == other.maps && self.rank == other.rank
    }
}

impl Eq for Context {}

impl Hash for Context {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.maps.hash(state);
        self.rank.hash(state);
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Context{:?}", self.labels())
    }
}

/// Order type of a view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderType {
    Finite(u64),
    Omega,
    /// The view of `Ω` (every ordinal).
    All,
}

impl Context {
    /// The virtual top `Ω`.
    pub fn omega() -> Context {
        Context { omega_top: true, maps: Vec::new(), rank: CofRank::Uncountable, chain: Vec::new() }
    }

    /// The view `C_ε`.
    pub fn ordinal(eps: Ordinal) -> Context {
        Context { omega_top: false, rank: eps.cof_rank(), maps: vec![eps.clone()], chain: vec![eps] }
    }

    pub fn rank(&self) -> CofRank {
        self.rank
    }

    pub fn is_omega(&self) -> bool {
        self.omega_top && self.maps.is_empty()
    }

    /// The compounding chain, innermost head first, e.g. `["w+1", "w*2"]`
    /// for `C_{ω+1, ω·2}` or `["w", "Omega"]` for `C_{ωΩ}`.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = self.chain.iter().rev().map(|o| o.to_string()).collect();
        if self.omega_top {
            out.push("Omega".to_string());
        }
        out
    }

    /// The head ordinal of the context (`None` for bare `Ω`).
    pub fn head(&self) -> Option<&Ordinal> {
        self.chain.last()
    }

    /// `C_{cV}` for an element `c` of this view; `None` if `c` is not an
    /// element.
    pub fn compound(&self, sys: &LadderSystem, c: &Ordinal) -> Option<Context> {
        let idx = self.index_of(sys, c)?;
        let mut maps = self.maps.clone();
        maps.push(idx);
        let mut chain = self.chain.clone();
        chain.push(c.clone());
        Some(Context { omega_top: self.omega_top, maps, rank: c.cof_rank(), chain })
    }

    /// Compounds by the coordinates of `tuple` from last to first, giving
    /// `C_{tuple ⌢ V}`.
    pub fn compound_tuple(&self, sys: &LadderSystem, tuple: &[Ordinal]) -> Option<Context> {
        let mut ctx = self.clone();
        for c in tuple.iter().rev() {
            ctx = ctx.compound(sys, c)?;
        }
        Some(ctx)
    }

    /// The element with index `j`.
    pub fn elem(&self, sys: &LadderSystem, j: &Ordinal) -> Option<Ordinal> {
        let mut x = j.clone();
        for m in self.maps.iter().rev() {
            x = sys.elem(m, x.to_u64()?)?;
        }
        Some(x)
    }

    /// The index of `y`, if `y` is an element.
    pub fn index_of(&self, sys: &LadderSystem, y: &Ordinal) -> Option<Ordinal> {
        let mut x = y.clone();
        for m in &self.maps {
            x = Ordinal::from(sys.index_of(m, &x)?);
        }
        Some(x)
    }

    pub fn contains(&self, sys: &LadderSystem, y: &Ordinal) -> bool {
        self.index_of(sys, y).is_some()
    }

    /// The least index whose element is `≥ x`.
    pub fn ceil_index(&self, sys: &LadderSystem, x: &Ordinal) -> Option<Ordinal> {
        let mut x = x.clone();
        for m in &self.maps {
            x = Ordinal::from(sys.ceil_index(m, &x)?);
        }
        Some(x)
    }

    /// `min(V \ x)`.
    pub fn min_from(&self, sys: &LadderSystem, x: &Ordinal) -> Option<Ordinal> {
        self.elem(sys, &self.ceil_index(sys, x)?)
    }

    /// `C^V(α) = min(V \ (α+1))`.
    pub fn step(&self, sys: &LadderSystem, alpha: &Ordinal) -> Option<Ordinal> {
        self.min_from(sys, &alpha.succ())
    }

    /// The element preceding `y` in the view, if `y` is an element with a
    /// predecessor index.
    pub fn pred_in(&self, sys: &LadderSystem, y: &Ordinal) -> Option<Ordinal> {
        let idx = self.index_of(sys, y)?;
        self.elem(sys, &idx.predecessor()?)
    }

    pub fn order_type(&self, sys: &LadderSystem) -> OrderType {
        if self.maps.is_empty() {
            return OrderType::All;
        }
        match sys.len(self.maps.last().unwrap()) {
            None => OrderType::Omega,
            Some(n) => OrderType::Finite(n),
        }
    }

    /// Up to `limit` elements of the view in increasing order, and whether
    /// the list was cut short.
    pub fn prefix(&self, sys: &LadderSystem, limit: usize) -> (Vec<Ordinal>, bool) {
        let mut out = Vec::new();
        for j in 0..limit as u64 {
            match self.elem(sys, &Ordinal::from(j)) {
                Some(x) => out.push(x),
                None => return (out, false),
            }
        }
        let more = self.elem(sys, &Ordinal::from(limit as u64)).is_some();
        (out, more)
    }

    /// Elements of the view lying in `[lo, hi]`.
    pub fn elements_between(&self, sys: &LadderSystem, lo: &Ordinal, hi: &Ordinal) -> Vec<Ordinal> {
        let mut out = Vec::new();
        let mut cur = self.min_from(sys, lo);
        while let Some(x) = cur {
            if x > *hi {
                break;
            }
            cur = self.step(sys, &x);
            out.push(x);
        }
        out
    }

    /// Whether `tuple` is internal to this view: its last coordinate is an
    /// element, each earlier coordinate is an element of the view compounded
    /// by the coordinates after it, and the cofinality ranks satisfy
    /// `rank α₀ ≤ rank α₁ < … < rank α_n < rank(top)` (no rank condition for
    /// a single coordinate).
    pub fn is_internal(&self, sys: &LadderSystem, tuple: &[Ordinal]) -> bool {
        if tuple.is_empty() {
            return true;
        }
        if tuple.len() >= 2 {
            let ranks: Vec<CofRank> = tuple.iter().map(|x| x.cof_rank()).collect();
            if ranks[0] > ranks[1] {
                return false;
            }
            let mut prev = ranks[1];
            for &r in ranks[2..].iter().chain(std::iter::once(&self.rank)) {
                if r <= prev {
                    return false;
                }
                prev = r;
            }
        }
        self.compound_tuple(sys, tuple).is_some()
    }

    /// Splits `tuple` as `head ⌢ tail` with `tail` the longest proper tail
    /// internal to this view (possibly empty).
    pub fn max_proper_internal_tail(&self, sys: &LadderSystem, tuple: &[Ordinal]) -> usize {
        for start in 1..tuple.len() {
            if self.is_internal(sys, &tuple[start..]) {
                return start;
            }
        }
        tuple.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use proptest::prelude::*;

    fn elems(sys: &LadderSystem, ctx: &Context, n: usize) -> Vec<String> {
        ctx.prefix(sys, n).0.iter().map(|o| o.to_string()).collect()
    }

    #[test]
    fn ladder_examples() {
        let sys = LadderSystem::canonical();
        assert_eq!(elems(&sys, &sys.ladder(&ord("7")).unwrap(), 5), ["6"]);
        assert_eq!(elems(&sys, &sys.ladder(&ord("w")).unwrap(), 4), ["0", "1", "2", "3"]);
        assert_eq!(elems(&sys, &sys.ladder(&ord("w*2")).unwrap(), 4), ["0", "w+1", "w+2", "w+3"]);
        assert_eq!(elems(&sys, &sys.ladder(&ord("w^2")).unwrap(), 3), ["0", "1", "w+1"]);
        assert!(sys.ladder(&ord("0")).unwrap().prefix(&sys, 3).0.is_empty());
    }

    #[test]
    fn compound_examples() {
        let sys = LadderSystem::canonical();
        let c = sys.compound(&[ord("w+1"), ord("w*2")]).unwrap().unwrap();
        assert_eq!(elems(&sys, &c, 3), ["0"]);
        let c = sys.compound(&[ord("w+2"), ord("w*2")]).unwrap().unwrap();
        assert_eq!(elems(&sys, &c, 3), ["w+1"]);
        let c = sys.compound(&[ord("w*3"), ord("w*3+1")]).unwrap().unwrap();
        assert!(elems(&sys, &c, 3).is_empty());
        assert!(sys.compound(&[ord("w"), ord("w*2")]).unwrap().is_none());
    }

    #[test]
    fn step_examples() {
        let sys = LadderSystem::canonical();
        assert_eq!(sys.step(&[ord("w")], &ord("5")).unwrap(), Some(ord("6")));
        assert_eq!(sys.step(&[ord("w*2")], &ord("5")).unwrap(), Some(ord("w+1")));
        assert_eq!(sys.step(&[ord("w+1"), ord("w*2")], &ord("3")).unwrap(), None);
    }

    #[test]
    fn internality_examples() {
        let sys = LadderSystem::canonical();
        let d = ord("w^2");
        assert!(Context::ordinal(d.succ()).is_internal(&sys, &[d.clone()]));
        assert!(Context::ordinal(ord("w*2")).is_internal(&sys, &[ord("w+1"), ord("w+2")]));
        assert!(!Context::ordinal(ord("w*2")).is_internal(&sys, &[ord("w")]));
        let ctx = Context::ordinal(d.succ());
        assert_eq!(ctx.max_proper_internal_tail(&sys, &[ord("3"), d.clone()]), 1);
        let ctx = Context::ordinal(ord("w"));
        assert_eq!(ctx.max_proper_internal_tail(&sys, &[ord("2"), ord("5")]), 1);
        let ctx = Context::ordinal(ord("w*2"));
        assert_eq!(ctx.max_proper_internal_tail(&sys, &[ord("1"), ord("w")]), 2);
    }

    #[test]
    fn omega_top_views() {
        let sys = LadderSystem::canonical();
        let om = Context::omega();
        assert_eq!(om.step(&sys, &ord("w+4")), Some(ord("w+5")));
        assert!(om.pred_in(&sys, &ord("w")).is_none());
        assert_eq!(om.pred_in(&sys, &ord("w+1")), Some(ord("w")));
        let c = om.compound(&sys, &ord("w*2")).unwrap();
        assert_eq!(c, Context::ordinal(ord("w*2")));
        assert_eq!(c.labels(), ["w*2", "Omega"]);
        // 3-tuples internal to Ω: a limit, an element of its ladder, and the
        // preceding ladder element
        assert!(om.is_internal(&sys, &[ord("w+1"), ord("w+2"), ord("w*2")]));
        assert!(om.is_internal(&sys, &[ord("w+2"), ord("w+3"), ord("w*2")]));
        assert!(!om.is_internal(&sys, &[ord("w+1"), ord("w+3"), ord("w*2")]));
        assert!(!om.is_internal(&sys, &[ord("1"), ord("w+1"), ord("w+2"), ord("w*2")]));
    }

    fn check_ladder(sys: &LadderSystem, beta: &Ordinal) -> Result<(), TestCaseError> {
        match beta.classify() {
            Kind::Zero => prop_assert_eq!(sys.elem(beta, 0), None),
            Kind::Successor(p) => {
                prop_assert_eq!(sys.elem(beta, 0), Some(p));
                prop_assert_eq!(sys.elem(beta, 1), None);
            }
            Kind::Limit => {
                let mut prev: Option<Ordinal> = None;
                for k in 0..8 {
                    let e = sys.elem(beta, k).unwrap();
                    prop_assert!(e < *beta);
                    prop_assert!(e.is_zero() || e.is_successor());
                    prop_assert_eq!(k == 0, e.is_zero());
                    if let Some(p) = &prev {
                        prop_assert!(*p < e);
                    }
                    prop_assert_eq!(sys.index_of(beta, &e), Some(k));
                    prev = Some(e);
                }
                // cofinality: each fundamental-sequence term is passed
                for k in 0..4 {
                    let target = beta.fund(k);
                    let c = sys.ceil_index(beta, &target).unwrap();
                    prop_assert!(sys.elem(beta, c).unwrap() >= target);
                    if c > 0 {
                        prop_assert!(sys.elem(beta, c - 1).unwrap() < target);
                    }
                }
            }
        }
        Ok(())
    }

    fn arb_small() -> impl Strategy<Value = Ordinal> {
        (0u64..3, 0u64..3, 0u64..4, 0u64..5).prop_map(|(a, b, c, d)| {
            Ordinal::monomial(ord("3"), a)
                .add(&Ordinal::monomial(ord("2"), b))
                .add(&Ordinal::monomial(ord("1"), c))
                .add(&Ordinal::from(d))
        })
    }

    fn arb_limit() -> impl Strategy<Value = Ordinal> {
        (0u64..3, 0u64..3, 0u64..4).prop_filter_map("zero", |(a, b, c)| {
            let x = Ordinal::monomial(ord("3"), a)
                .add(&Ordinal::monomial(ord("2"), b))
                .add(&Ordinal::monomial(ord("1"), c));
            (!x.is_zero()).then_some(x)
        })
    }

    proptest! {
        #[test]
        fn canonical_invariants(beta in arb_small()) {
            check_ladder(&LadderSystem::canonical(), &beta)?;
        }

        #[test]
        fn seeded_invariants(seed in 0u64..100, beta in arb_small()) {
            check_ladder(&LadderSystem::seeded(seed), &beta)?;
        }

        #[test]
        fn seeded_is_deterministic(seed in 0u64..1000, beta in arb_limit()) {
            let a = LadderSystem::seeded(seed);
            let b = LadderSystem::seeded(seed);
            for k in (0..6).rev() {
                prop_assert_eq!(a.elem(&beta, k), b.elem(&beta, k));
            }
        }

        #[test]
        fn compounding_is_coherent(beta in arb_limit(), k in 1u64..5, seed in 0u64..5) {
            let sys = LadderSystem::seeded(seed);
            let top = Context::ordinal(beta.clone());
            let c = sys.elem(&beta, k).unwrap();
            let sub = top.compound(&sys, &c).unwrap();
            for x in sub.prefix(&sys, 4).0 {
                prop_assert!(top.contains(&sys, &x));
                prop_assert!(x < c);
            }
        }

        #[test]
        fn step_above_limit_head_is_successor(beta in arb_limit(), a in arb_small(), seed in 0u64..5) {
            prop_assume!(a < beta);
            let sys = LadderSystem::seeded(seed);
            let s = sys.next_above(&beta, &a).unwrap();
            prop_assert!(s.is_successor());
            prop_assert!(s > a);
        }
    }
}
