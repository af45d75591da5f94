//! The generator sets `B_n(ε)[C_ε]`, the nearest basis element `b`, the
//! decomposition of boundaries over `d B_n(ε)` and the section `s`.
//!
//! Every function takes a [`Context`] `V`, either the ladder `C_ε` of an
//! ordinal `ε` (possibly compounded) or the top [`Context::omega`], which
//! stands in for `ω₁` and `ω₂`: every coordinate is countable and the
//! ladder of the top is the identity.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::chain::{face, is_increasing, Chain, ChainError};
use crate::ladder::{Context, LadderError, LadderSystem};
use crate::ordinal::{CofRank, Ordinal};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BasisError {
    #[error("the chain is not a boundary: {0}")]
    NotABoundary(String),
    #[error("coordinate {0} lies outside the universe {1:?}")]
    OutOfUniverse(Ordinal, Vec<String>),
    #[error(transparent)]
    Bound(#[from] LadderError),
    #[error("no basis of degree {degree} in context {context:?}")]
    Degree { degree: usize, context: Vec<String> },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// The result of the nearest-basis-element function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nearest {
    /// The step `C^{β⃗V}(α_i)` is undefined.
    Zero,
    /// `b(γ⃗)`, with the index at which the new coordinate was inserted.
    Gen { tuple: Vec<Ordinal>, inserted: usize },
}

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

fn snoc(t: &[Ordinal], x: &Ordinal) -> Vec<Ordinal> {
    let mut v = t.to_vec();
    v.push(x.clone());
    v
}

/// Basis computations over one ladder system, with a shared memo of
/// generator decompositions keyed by context and tuple.
#[derive(Clone)]
pub struct Basis {
    sys: LadderSystem,
    memo: Arc<Mutex<HashMap<(Context, Vec<Ordinal>), Chain>>>,
}

impl Basis {
    pub fn new(sys: LadderSystem) -> Basis {
        Basis { sys, memo: Arc::new(Mutex::new(HashMap::new())) }
    }

    pub fn system(&self) -> &LadderSystem {
        &self.sys
    }

    fn in_universe(&self, ctx: &Context, x: &Ordinal) -> Result<(), BasisError> {
        self.sys.check(x)?;
        match ctx.head() {
            Some(h) if x >= h => Err(BasisError::OutOfUniverse(x.clone(), ctx.labels())),
            _ => Ok(()),
        }
    }

    /// Whether `γ⃗` lies in `B_n(V)`: it splits as `α⃗ ⌢ β⃗` with `α⃗`
    /// nonempty, `β⃗` internal to `V` and `C^{β⃗⁰V}(last α⃗) = β₀`.
    pub fn is_member(&self, ctx: &Context, g: &[Ordinal]) -> bool {
        if g.len() < 2 || !is_increasing(g) {
            return false;
        }
        (0..g.len() - 1).any(|i| self.split_works(ctx, g, i))
    }

    fn split_works(&self, ctx: &Context, g: &[Ordinal], i: usize) -> bool {
        let beta = &g[i + 1..];
        ctx.is_internal(&self.sys, beta)
            && ctx
                .compound_tuple(&self.sys, &beta[1..])
                .and_then(|c| c.step(&self.sys, &g[i]))
                .as_ref()
                == Some(&beta[0])
    }

    /// `b(γ⃗)`: insert `C^{β⃗V}(α_i)` before the maximal proper internal
    /// tail `β⃗`.
    pub fn nearest(&self, ctx: &Context, g: &[Ordinal]) -> Nearest {
        assert!(!g.is_empty() && is_increasing(g), "b needs a nonempty increasing tuple");
        let start = ctx.max_proper_internal_tail(&self.sys, g);
        let (head, tail) = g.split_at(start);
        let step = ctx.compound_tuple(&self.sys, tail).and_then(|c| c.step(&self.sys, head.last().unwrap()));
        match step {
            None => Nearest::Zero,
            Some(x) => {
                let mut tuple = head.to_vec();
                tuple.push(x);
                tuple.extend_from_slice(tail);
                Nearest::Gen { tuple, inserted: start }
            }
        }
    }

    fn check_degree(&self, ctx: &Context, gen_len: usize) -> Result<(), BasisError> {
        // B_n(ε) needs cf(ε) < ℵ_n; the top behaves as a cardinal of
        // cofinality ℵ₁
        let min = if ctx.rank() == CofRank::Uncountable { 3 } else { 2 };
        if gen_len < min {
            return Err(BasisError::Degree { degree: gen_len.saturating_sub(1), context: ctx.labels() });
        }
        Ok(())
    }

    /// `s d⟨γ⃗⟩`: the `d B_n(V)` decomposition of `d⟨γ⃗⟩`, as a chain of
    /// basis members.
    pub fn sd_generator(&self, ctx: &Context, g: &[Ordinal]) -> Result<Chain, BasisError> {
        if !is_increasing(g) {
            return Err(ChainError::NotIncreasing(g.to_vec()).into());
        }
        self.check_degree(ctx, g.len())?;
        for x in g {
            self.in_universe(ctx, x)?;
        }
        self.sd(ctx, g)
    }

    fn sd(&self, ctx: &Context, g: &[Ordinal]) -> Result<Chain, BasisError> {
        let key = (ctx.clone(), g.to_vec());
        if let Some(c) = self.memo.lock().expect("memo poisoned").get(&key) {
            return Ok(c.clone());
        }
        for x in g {
            self.sys.check(x)?;
        }
        let n = g.len() - 1;
        let last = &g[n];
        let delta = ctx
            .min_from(&self.sys, last)
            .ok_or_else(|| BasisError::OutOfUniverse(last.clone(), ctx.labels()))?;
        self.sys.check(&delta)?;
        let mut out = Chain::zero();
        if *last < delta {
            // d d⟨γ⃗,δ⟩ = 0
            for i in 0..=n {
                let t = snoc(&face(g, i), &delta);
                out.add_scaled_owned(sign(n + i), self.sd(ctx, &t)?);
            }
        } else {
            // walk δ down through its predecessors in V until the tuple is a
            // member or δ is a limit point of V
            let beta = &g[..n];
            let mut top = delta;
            let mut first = true;
            loop {
                let t = snoc(beta, &top);
                if !first {
                    // the rest of the descent is s d⟨β⃗,top⟩, possibly known
                    let known = self.memo.lock().expect("memo poisoned").get(&(ctx.clone(), t.clone())).cloned();
                    if let Some(c) = known {
                        out.add_scaled_owned(1, c);
                        break;
                    }
                }
                first = false;
                if self.is_member(ctx, &t) {
                    out.add_term(t, 1);
                    break;
                }
                match ctx.pred_in(&self.sys, &top) {
                    Some(eta) => {
                        debug_assert!(beta[n - 1] < eta, "non-members sit below the predecessor");
                        for k in 0..n {
                            let mut m = face(beta, k);
                            m.push(eta.clone());
                            m.push(top.clone());
                            debug_assert!(self.is_member(ctx, &m), "{m:?} should be a member");
                            out.add_term(m, sign(n - 1 + k));
                        }
                        top = eta;
                    }
                    None => {
                        out.add_scaled_owned(1, self.sd_limit(ctx, beta, &top)?);
                        break;
                    }
                }
            }
        }
        self.memo.lock().expect("memo poisoned").insert(key, out.clone());
        Ok(out)
    }

    /// `s d⟨α⃗,δ⟩` for a limit point `δ` of `V` (only possible under the
    /// top), via the decomposition of `d⟨α⃗⟩` over `B_{n−1}(δ)[C_{δV}]`.
    fn sd_limit(&self, ctx: &Context, alpha: &[Ordinal], delta: &Ordinal) -> Result<Chain, BasisError> {
        let n = alpha.len();
        if n < 2 {
            return Err(BasisError::Degree { degree: n, context: ctx.labels() });
        }
        let inner = ctx.compound(&self.sys, delta).expect("δ is an element of V");
        let lower = self.sd(&inner, alpha)?;
        let mut out = Chain::zero();
        // d⟨α⃗,δ⟩ − Σ z_j d⟨β⃗_j,δ⟩ = (−1)ⁿ(⟨α⃗⟩ − Σ z_j⟨β⃗_j⟩)
        let mut rest = Chain::zero();
        rest.add_term(alpha.to_vec(), sign(n));
        for (b, z) in lower.terms() {
            out.add_term(snoc(b, delta), z);
            rest.add_term(b.clone(), -sign(n) * z);
        }
        if !rest.is_zero() {
            out.add_scaled_owned(1, self.decompose_inner(ctx, &rest)?);
        }
        Ok(out)
    }

    /// The section `s`: the unique chain `y` over `B_n(V)` with `d y = x`.
    ///
    /// `x` must be certified as a boundary: `∂x = 0` in positive degree, or
    /// augmentation zero in degree 0.
    pub fn section(&self, ctx: &Context, x: &Chain) -> Result<Chain, BasisError> {
        let Some(deg) = x.degree() else {
            return Ok(Chain::zero());
        };
        self.check_degree(ctx, deg + 2)?;
        for t in x.support() {
            for c in t {
                self.in_universe(ctx, c)?;
            }
        }
        if deg == 0 {
            let a = x.augment()?;
            if a != 0 {
                return Err(BasisError::NotABoundary(format!("augmentation {a}")));
            }
        } else {
            let b = x.boundary()?;
            if !b.is_zero() {
                return Err(BasisError::NotABoundary(format!("boundary {b}")));
            }
        }
        self.decompose_inner(ctx, x)
    }

    /// The decomposition as (coefficient, member) pairs in tuple order.
    pub fn decompose(&self, ctx: &Context, x: &Chain) -> Result<Vec<(i64, Vec<Ordinal>)>, BasisError> {
        Ok(self.section(ctx, x)?.terms().map(|(t, z)| (z, t.clone())).collect())
    }

    /// Cone lift from the least coordinate `v`: `x = d(h x)` with
    /// `h⟨t⃗⟩ = ⟨v,t⃗⟩` for `t₀ > v` and `0` otherwise, so `s x = Σ s d(h x)`.
    fn decompose_inner(&self, ctx: &Context, x: &Chain) -> Result<Chain, BasisError> {
        let v = x.min_coord().expect("nonzero chain").clone();
        let mut out = Chain::zero();
        for (t, z) in x.terms() {
            if t[0] > v {
                let mut lifted = vec![v.clone()];
                lifted.extend_from_slice(t);
                out.add_scaled_owned(z, self.sd(ctx, &lifted)?);
            }
        }
        Ok(out)
    }

    /// Members of `B_n(V)` (tuples of length `n+1`) with all coordinates in
    /// `window`.
    pub fn members_in(&self, ctx: &Context, n: usize, window: &[Ordinal]) -> Vec<Vec<Ordinal>> {
        let w: Vec<Ordinal> = window.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let mut out = Vec::new();
        let mut idx: Vec<usize> = (0..=n).collect();
        if w.len() < n + 1 {
            return out;
        }
        loop {
            let t: Vec<Ordinal> = idx.iter().map(|&i| w[i].clone()).collect();
            if self.is_member(ctx, &t) {
                out.push(t);
            }
            // next combination
            let mut k = n as isize;
            while k >= 0 && idx[k as usize] == w.len() - 1 - (n - k as usize) {
                k -= 1;
            }
            if k < 0 {
                return out;
            }
            let k = k as usize;
            idx[k] += 1;
            for j in k + 1..=n {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}

/// Exclusive universe bound for re-running a decomposition of `x` in a
/// truncated universe: everything up to and including
/// `min(V \ max supp x) + ω²`.
pub fn stability_bound(basis: &Basis, ctx: &Context, x: &Chain) -> Ordinal {
    let hi = x.max_coord().expect("nonzero chain");
    let top = ctx.min_from(basis.system(), hi).unwrap_or_else(|| hi.clone());
    top.add(&Ordinal::omega_pow(Ordinal::from(2u64))).succ()
}

/// Brute-force section for a countable context: enumerates the members of
/// `B_n(V)` over the window of the coordinates of `x` together with the
/// elements of `V` from its least coordinate up to `min(V \ max)`, and solves
/// `Σ z_g d g = x` by exact rational elimination. Returns `None` when no
/// solution exists on the window.
pub fn brute_force_section(basis: &Basis, ctx: &Context, x: &Chain) -> Option<Chain> {
    assert!(!ctx.is_omega(), "the brute-force oracle runs in countable contexts");
    let deg = x.degree()?;
    let sys = basis.system();
    let lo = x.min_coord()?.clone();
    let hi = x.max_coord()?.clone();
    let mut window: BTreeSet<Ordinal> = x.support().flatten().cloned().collect();
    let top = ctx.min_from(sys, &hi)?;
    window.extend(ctx.elements_between(sys, &lo, &top));
    let window: Vec<Ordinal> = window.into_iter().collect();
    let members = basis.members_in(ctx, deg + 1, &window);
    let columns: Vec<Chain> = members.iter().map(|m| Chain::gen(m.clone()).unwrap().boundary().unwrap()).collect();
    let solution = solve_integral(&columns, x)?;
    let mut out = Chain::zero();
    for (m, z) in members.into_iter().zip(solution) {
        out.add_term(m, z);
    }
    Some(out)
}

/// Solves `Σ z_j c_j = x` over the rationals; returns the solution when it
/// exists, is unique and is integral.
pub fn solve_integral(columns: &[Chain], x: &Chain) -> Option<Vec<i64>> {
    let mut rows: Vec<&Vec<Ordinal>> = columns.iter().flat_map(|c| c.support()).chain(x.support()).collect();
    rows.sort();
    rows.dedup();
    let row_of: HashMap<&Vec<Ordinal>, usize> = rows.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let ncol = columns.len();
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); ncol + 1]; rows.len()];
    for (j, c) in columns.iter().enumerate() {
        for (t, z) in c.terms() {
            m[row_of[t]][j] = BigRational::from_integer(BigInt::from(z));
        }
    }
    for (t, z) in x.terms() {
        m[row_of[t]][ncol] = BigRational::from_integer(BigInt::from(z));
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncol {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            // a free column means the solution is not unique
            return None;
        };
        m.swap(r, p);
        let inv = BigRational::one() / m[r][c].clone();
        for k in c..=ncol {
            m[r][k] = &m[r][k] * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=ncol {
                    let v = &m[r][k] * &f;
                    m[i][k] = &m[i][k] - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[ncol].is_zero()) {
        return None;
    }
    let mut out = vec![0i64; ncol];
    for (i, &c) in pivots.iter().enumerate() {
        let v = &m[i][ncol];
        if !v.is_integer() || v.abs() > BigRational::from_integer(BigInt::from(i64::MAX)) {
            return None;
        }
        out[c] = i64::try_from(v.to_integer()).ok()?;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use proptest::prelude::*;

    fn t(s: &[&str]) -> Vec<Ordinal> {
        s.iter().map(|x| ord(x)).collect()
    }

    fn d(g: &[Ordinal]) -> Chain {
        Chain::gen(g.to_vec()).unwrap().boundary().unwrap()
    }

    #[test]
    fn membership_examples() {
        let basis = Basis::new(LadderSystem::canonical());
        let succ = Context::ordinal(ord("w+6"));
        assert!(basis.is_member(&succ, &t(&["3", "w", "w+5"])));
        assert!(!basis.is_member(&succ, &t(&["3", "w", "w+4"])));
        let w = Context::ordinal(ord("w"));
        assert!(basis.is_member(&w, &t(&["4", "5"])));
        assert!(!basis.is_member(&w, &t(&["4", "6"])));
        let w2 = Context::ordinal(ord("w*2"));
        assert!(basis.is_member(&w2, &t(&["5", "w+1", "w+2"])));
        assert!(basis.is_member(&w2, &t(&["5", "w+2", "w+3"])));
        assert!(!basis.is_member(&w2, &t(&["5", "w+1", "w+3"])));
        assert!(!basis.is_member(&w2, &t(&["w", "w+1", "w+3"])));
    }

    #[test]
    fn nearest_examples() {
        let basis = Basis::new(LadderSystem::canonical());
        let w = Context::ordinal(ord("w"));
        assert_eq!(basis.nearest(&w, &t(&["2", "5"])), Nearest::Gen { tuple: t(&["2", "4", "5"]), inserted: 1 });
        assert_eq!(basis.nearest(&Context::omega(), &t(&["w+3", "w+4"])), Nearest::Zero);
        assert_eq!(basis.nearest(&w, &t(&["3"])), Nearest::Gen { tuple: t(&["3", "4"]), inserted: 1 });
    }

    #[test]
    fn telescope() {
        let basis = Basis::new(LadderSystem::canonical());
        let w = Context::ordinal(ord("w"));
        for j in 0..20u64 {
            for k in j + 1..25 {
                let x = d(&[Ordinal::from(j), Ordinal::from(k)]);
                let s = basis.section(&w, &x).unwrap();
                let expect = Chain::from_terms((j..k).map(|i| (vec![Ordinal::from(i), Ordinal::from(i + 1)], 1))).unwrap();
                assert_eq!(s, expect);
            }
        }
    }

    #[test]
    fn successor_pattern() {
        let basis = Basis::new(LadderSystem::canonical());
        let ctx = Context::ordinal(ord("w*2+1"));
        let g = t(&["1", "w", "w+7"]);
        let s = basis.section(&ctx, &d(&g)).unwrap();
        let delta = ord("w*2");
        let mut expect = Chain::zero();
        for i in 0..3 {
            expect.add_term(snoc(&face(&g, i), &delta), sign(2 + i));
        }
        assert_eq!(s, expect);
    }

    #[test]
    fn rejects_non_boundaries() {
        let basis = Basis::new(LadderSystem::canonical());
        let w = Context::ordinal(ord("w"));
        let x = Chain::gen(t(&["1", "3"])).unwrap();
        assert!(matches!(basis.section(&w, &x), Err(BasisError::NotABoundary(_))));
        assert!(basis.section(&w, &Chain::zero()).unwrap().is_zero());
        let omega = Context::omega();
        assert!(matches!(basis.section(&omega, &d(&t(&["1", "3"]))), Err(BasisError::Degree { .. })));
    }

    #[test]
    fn omega_top_decomposes_through_limits() {
        let basis = Basis::new(LadderSystem::canonical());
        let omega = Context::omega();
        for g in [t(&["0", "1", "w"]), t(&["0", "w", "w*2"]), t(&["3", "w+1", "w^2"]), t(&["0", "1", "2", "w*2"])] {
            let x = d(&g);
            let s = basis.section(&omega, &x).unwrap();
            assert_eq!(s.boundary().unwrap(), x, "{g:?}");
            for m in s.support() {
                assert!(basis.is_member(&omega, m), "{m:?}");
            }
        }
    }

    fn contexts() -> Vec<Ordinal> {
        ["w", "w*2", "w^2", "w^2+w*3+2", "w^3"].iter().map(|s| ord(s)).collect()
    }

    fn arb_below(eps: Ordinal) -> impl Strategy<Value = Ordinal> {
        (0u64..3, 0u64..4, 0u64..5)
            .prop_map(|(a, b, c)| {
                Ordinal::monomial(ord("2"), a).add(&Ordinal::monomial(ord("1"), b)).add(&Ordinal::from(c))
            })
            .prop_filter_map("below ε", move |x| (x < eps).then_some(x))
    }

    fn arb_case() -> impl Strategy<Value = (usize, u64, usize, Vec<Ordinal>)> {
        (0usize..5, 0u64..3, 1usize..3).prop_flat_map(|(e, seed, n)| {
            let eps = contexts()[e].clone();
            (Just(e), Just(seed), Just(n), prop::collection::btree_set(arb_below(eps), n + 1))
                .prop_map(|(e, s, n, set)| (e, s, n, set.into_iter().collect()))
        })
    }

    fn sys_for(seed: u64) -> LadderSystem {
        if seed == 0 {
            LadderSystem::canonical()
        } else {
            LadderSystem::seeded(seed)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn section_is_right_inverse_and_matches_brute_force((e, seed, _n, g) in arb_case()) {
            let basis = Basis::new(sys_for(seed));
            let ctx = Context::ordinal(contexts()[e].clone());
            let x = d(&g);
            let s = basis.section(&ctx, &x).unwrap();
            prop_assert_eq!(s.boundary().unwrap(), x.clone());
            let lo = x.min_coord().unwrap().clone();
            for m in s.support() {
                prop_assert!(basis.is_member(&ctx, m));
                prop_assert!(m[0] >= lo);
            }
            let brute = brute_force_section(&basis, &ctx, &x).expect("window suffices");
            prop_assert_eq!(brute, s);
        }

        #[test]
        fn members_decompose_to_themselves((e, seed, _n, g) in arb_case()) {
            let basis = Basis::new(sys_for(seed));
            let ctx = Context::ordinal(contexts()[e].clone());
            if let Nearest::Gen { tuple, .. } = basis.nearest(&ctx, &g) {
                prop_assert!(basis.is_member(&ctx, &tuple));
                let s = basis.section(&ctx, &d(&tuple)).unwrap();
                prop_assert_eq!(s, Chain::gen(tuple).unwrap());
            }
        }

        #[test]
        fn stability_under_truncation((e, seed, _n, g) in arb_case()) {
            let basis = Basis::new(sys_for(seed));
            let ctx = Context::ordinal(contexts()[e].clone());
            let x = d(&g);
            let s = basis.section(&ctx, &x).unwrap();
            let truncated = Basis::new(sys_for(seed).with_bound(stability_bound(&basis, &ctx, &x)));
            prop_assert_eq!(truncated.section(&ctx, &x).unwrap(), s);
        }
    }
}
