//! Checkers for n-coherence and n-triviality in both senses, the
//! rearrangement `ã_n` from the first sense to the second, and the families
//! `φ^x`, `φ^⋆`, `φ^θ`, `s¹`, `s²` derived from the systems `f_n`.
//!
//! Functions on infinite ordinals cannot be inspected everywhere. A family
//! therefore carries a support hint: for every index tuple it either names
//! a finite set outside of which the defect must vanish, or declares the
//! defect infinite. The checkers evaluate exactly on the hint and on a
//! window of further arguments, and a defect found outside the hint refutes
//! the claim. Without a hint an infinite comparison is reported as
//! uncertified, never as coherent.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::chain::{face, is_increasing, Chain};
use crate::fsys::{fmt_tuple, m_value, FSystem, FsysError};
use crate::ladder::LadderSystem;
use crate::ordinal::Ordinal;
use crate::walks::rho2;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CoherenceError {
    #[error("no support hint for the infinite comparison at {0}")]
    NoHint(String),
    #[error("no witness supplied for the pair {0}")]
    MissingWitness(String),
    #[error("{0}")]
    Domain(String),
    #[error("the pairing code of {0} overflows")]
    Overflow(String),
    #[error(transparent)]
    Fsys(#[from] FsysError),
}

/// A finitely supported integer function on tuples of ordinals: an element
/// of `⊕ Z`. Integers sit on the empty label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Value(BTreeMap<Vec<Ordinal>, i64>);

impl Value {
    pub fn zero() -> Value {
        Value::default()
    }

    pub fn int(z: i64) -> Value {
        let mut v = Value::zero();
        v.add_at(Vec::new(), z);
        v
    }

    pub fn from_chain(c: &Chain) -> Value {
        let mut v = Value::zero();
        for (t, z) in c.terms() {
            v.add_at(t.clone(), z);
        }
        v
    }

    fn add_at(&mut self, k: Vec<Ordinal>, z: i64) {
        let e = self.0.entry(k).or_insert(0);
        *e += z;
        if *e == 0 {
            self.0.retain(|_, z| *z != 0);
        }
    }

    pub fn add_scaled(&mut self, z: i64, other: &Value) {
        for (k, w) in &other.0 {
            self.add_at(k.clone(), z * w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest absolute coefficient.
    pub fn norm(&self) -> i64 {
        self.0.values().map(|z| z.abs()).max().unwrap_or(0)
    }

    pub fn reduce(&mut self, modulus: i64) {
        for z in self.0.values_mut() {
            *z = z.rem_euclid(modulus);
        }
        self.0.retain(|_, z| *z != 0);
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.0.len() {
            0 => Some(0),
            1 => self.0.get(&Vec::new()).copied(),
            _ => None,
        }
    }
}

/// Where the defect of a family at one index tuple can be nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportHint {
    /// Contained in this finite set of arguments.
    Within(BTreeSet<Ordinal>),
    /// Certified to be infinite.
    Infinite,
}

type Eval = Arc<dyn Fn(&[Ordinal], &Ordinal) -> Result<Value, CoherenceError> + Send + Sync>;
type Hint = Arc<dyn Fn(&[Ordinal]) -> Result<SupportHint, CoherenceError> + Send + Sync>;
type Wit = Arc<dyn Fn(&Ordinal, &Ordinal, &Ordinal) -> Result<Value, CoherenceError> + Send + Sync>;

/// A family `Φ_n = {φ_β⃗ : β₀ → A | β⃗ ∈ [ε]ⁿ}` in the first sense.
#[derive(Clone)]
pub struct FamilyOracle {
    pub arity: usize,
    pub name: String,
    /// Values are reduced modulo this when set.
    pub modulus: Option<i64>,
    eval: Eval,
    hint: Option<Hint>,
}

impl FamilyOracle {
    pub fn new<F>(arity: usize, name: &str, eval: F) -> FamilyOracle
    where
        F: Fn(&[Ordinal], &Ordinal) -> Result<Value, CoherenceError> + Send + Sync + 'static,
    {
        FamilyOracle { arity, name: name.to_string(), modulus: None, eval: Arc::new(eval), hint: None }
    }

    pub fn with_hint<H>(mut self, hint: H) -> FamilyOracle
    where
        H: Fn(&[Ordinal]) -> Result<SupportHint, CoherenceError> + Send + Sync + 'static,
    {
        self.hint = Some(Arc::new(hint));
        self
    }

    pub fn with_modulus(mut self, m: i64) -> FamilyOracle {
        self.modulus = Some(m);
        self
    }

    pub fn eval(&self, index: &[Ordinal], alpha: &Ordinal) -> Result<Value, CoherenceError> {
        let mut v = (self.eval)(index, alpha)?;
        if let Some(m) = self.modulus {
            v.reduce(m);
        }
        Ok(v)
    }

    /// `Σᵢ(−1)ⁱ φ_{α⃗ⁱ}(α)` for an index tuple of length `n + 1`.
    pub fn defect(&self, tuple: &[Ordinal], alpha: &Ordinal) -> Result<Value, CoherenceError> {
        let mut out = Value::zero();
        for i in 0..tuple.len() {
            out.add_scaled(if i % 2 == 0 { 1 } else { -1 }, &self.eval(&face(tuple, i), alpha)?);
        }
        if let Some(m) = self.modulus {
            out.reduce(m);
        }
        Ok(out)
    }

    pub fn hint(&self, tuple: &[Ordinal]) -> Option<Result<SupportHint, CoherenceError>> {
        self.hint.as_ref().map(|h| h(tuple))
    }
}

/// Verdict on one index tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The defect vanishes off a certified finite set.
    Trivial,
    /// The defect is nonzero outside the certified set, or certified infinite.
    NotTrivial,
    /// No certificate; only the window was inspected.
    Uncertified,
}

#[derive(Clone, Debug)]
pub struct TupleReport {
    pub tuple: Vec<Ordinal>,
    /// Arguments with a nonzero defect among those inspected.
    pub defect_support: Vec<Ordinal>,
    pub verdict: Verdict,
}

impl TupleReport {
    pub fn to_json(&self) -> Json {
        json!({
            "tuple": fmt_tuple(&self.tuple),
            "defect_support": self.defect_support.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "pass": self.verdict == Verdict::Trivial,
            "verdict": format!("{:?}", self.verdict).to_lowercase(),
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub tuples: Vec<TupleReport>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.tuples.iter().all(|t| t.verdict == Verdict::Trivial)
    }

    pub fn to_json(&self) -> Json {
        Json::Array(self.tuples.iter().map(TupleReport::to_json).collect())
    }
}

/// Whether `f` restricted to arguments below `bound` is finitely supported.
///
/// Finite domains are inspected completely. Otherwise the hint must name a
/// finite set; `f` is evaluated there and on the window, and any nonzero
/// value outside the hint makes the answer false. Returns the inspected
/// support alongside the answer.
pub fn is_0_trivial<F>(
    f: F,
    bound: &Ordinal,
    window: &[Ordinal],
    hint: Option<SupportHint>,
) -> Result<(bool, Vec<Ordinal>), CoherenceError>
where
    F: Fn(&Ordinal) -> Result<Value, CoherenceError>,
{
    let (verdict, support) = classify(&f, bound, window, hint)?;
    match verdict {
        Verdict::Uncertified => Err(CoherenceError::NoHint(format!("arguments below {bound}"))),
        v => Ok((v == Verdict::Trivial, support)),
    }
}

fn classify<F>(
    f: &F,
    bound: &Ordinal,
    window: &[Ordinal],
    hint: Option<SupportHint>,
) -> Result<(Verdict, Vec<Ordinal>), CoherenceError>
where
    F: Fn(&Ordinal) -> Result<Value, CoherenceError>,
{
    let mut args: BTreeSet<Ordinal> = BTreeSet::new();
    let finite_domain = bound.to_u64();
    if let Some(n) = finite_domain {
        args.extend((0..n).map(Ordinal::from));
    }
    args.extend(window.iter().filter(|x| *x < bound).cloned());
    let allowed = match &hint {
        Some(SupportHint::Within(s)) => {
            args.extend(s.iter().filter(|x| *x < bound).cloned());
            Some(s.clone())
        }
        _ => None,
    };
    let mut support = Vec::new();
    for a in &args {
        if !f(a)?.is_zero() {
            support.push(a.clone());
        }
    }
    let verdict = if finite_domain.is_some() {
        Verdict::Trivial
    } else {
        match (&hint, &allowed) {
            (Some(SupportHint::Infinite), _) => Verdict::NotTrivial,
            (_, Some(s)) if support.iter().all(|a| s.contains(a)) => Verdict::Trivial,
            (_, Some(_)) => Verdict::NotTrivial,
            _ => Verdict::Uncertified,
        }
    };
    Ok((verdict, support))
}

/// Checks `Σᵢ(−1)ⁱ φ_{α⃗ⁱ} =* 0` on each sampled index tuple of length
/// `n + 1`, as functions on `α₀`.
pub fn check_coherent_i(fam: &FamilyOracle, tuples: &[Vec<Ordinal>], window: &[Ordinal]) -> Result<CheckReport, CoherenceError> {
    let mut report = CheckReport::default();
    for t in tuples {
        if t.len() != fam.arity + 1 || !is_increasing(t) {
            return Err(CoherenceError::Domain(format!("{} is not an increasing ({})-tuple", fmt_tuple(t), fam.arity + 1)));
        }
        let hint = fam.hint(t).transpose()?;
        let (verdict, defect_support) = classify(&|a: &Ordinal| fam.defect(t, a), &t[0], window, hint)?;
        report.tuples.push(TupleReport { tuple: t.clone(), defect_support, verdict });
    }
    Ok(report)
}

/// Largest `|Σᵢ(−1)ⁱ φ_{α⃗ⁱ}(α)|` over the window: the mod-bounded reading.
pub fn bounded_defect(fam: &FamilyOracle, tuple: &[Ordinal], window: &[Ordinal]) -> Result<i64, CoherenceError> {
    let mut worst = 0;
    for a in window.iter().filter(|a| *a < &tuple[0]) {
        worst = worst.max(fam.defect(tuple, a)?.norm());
    }
    Ok(worst)
}

/// A family `{sⁿ_γ : [γ]ⁿ → A}` in the second sense; `eval(γ, args)` with
/// `args = (α, β₀, …, β_{n−2})`.
#[derive(Clone)]
pub struct FamilyII {
    pub arity: usize,
    pub name: String,
    pub modulus: Option<i64>,
    eval: Eval,
}

impl FamilyII {
    pub fn new<F>(arity: usize, name: &str, eval: F) -> FamilyII
    where
        F: Fn(&[Ordinal], &Ordinal) -> Result<Value, CoherenceError> + Send + Sync + 'static,
    {
        // stored as (args, γ) ↦ value
        FamilyII { arity, name: name.to_string(), modulus: None, eval: Arc::new(eval) }
    }

    pub fn eval(&self, gamma: &Ordinal, args: &[Ordinal]) -> Result<Value, CoherenceError> {
        let mut v = (self.eval)(args, gamma)?;
        if let Some(m) = self.modulus {
            v.reduce(m);
        }
        Ok(v)
    }
}

/// Cascading trivializations witnessing coherence in the second sense. For
/// `n = 2`, `t(γ, δ, α) = t¹_{γδ}(α)`; for `n = 1` no witness is needed. The
/// hint bounds the support of each 0-trivial remainder, indexed by
/// `(γ, δ)` for `n = 1` and by `(β, γ, δ)` for `n = 2`.
#[derive(Clone, Default)]
pub struct Witnesses {
    t: Option<Wit>,
    hint: Option<Hint>,
}

impl Witnesses {
    pub fn vacuous() -> Witnesses {
        Witnesses::default()
    }

    pub fn with_t<F>(mut self, t: F) -> Witnesses
    where
        F: Fn(&Ordinal, &Ordinal, &Ordinal) -> Result<Value, CoherenceError> + Send + Sync + 'static,
    {
        self.t = Some(Arc::new(t));
        self
    }

    pub fn with_hint<H>(mut self, hint: H) -> Witnesses
    where
        H: Fn(&[Ordinal]) -> Result<SupportHint, CoherenceError> + Send + Sync + 'static,
    {
        self.hint = Some(Arc::new(hint));
        self
    }
}

/// Checks that `sⁿ_δ|_{[γ]ⁿ} − sⁿ_γ` is `(n−1)`-trivial for each sampled pair
/// `γ < δ`, down the cascade of witnesses to 0-triviality on windows.
/// Supports `n ∈ {1, 2}`.
pub fn check_coherent_ii(
    fam: &FamilyII,
    wit: &Witnesses,
    pairs: &[(Ordinal, Ordinal)],
    window: &[Ordinal],
) -> Result<CheckReport, CoherenceError> {
    let mut report = CheckReport::default();
    for (g, d) in pairs {
        if g >= d {
            return Err(CoherenceError::Domain(format!("pair ({g},{d}) is not increasing")));
        }
        match fam.arity {
            1 => {
                let idx = vec![g.clone(), d.clone()];
                let hint = wit.hint.as_ref().map(|h| h(&idx)).transpose()?;
                let f = |a: &Ordinal| -> Result<Value, CoherenceError> {
                    let mut v = fam.eval(d, std::slice::from_ref(a))?;
                    v.add_scaled(-1, &fam.eval(g, std::slice::from_ref(a))?);
                    Ok(v)
                };
                let (verdict, defect_support) = classify(&f, g, window, hint)?;
                report.tuples.push(TupleReport { tuple: idx, defect_support, verdict });
            }
            2 => {
                let t = wit.t.as_ref().ok_or_else(|| CoherenceError::MissingWitness(format!("({g},{d})")))?;
                for b in window.iter().filter(|b| *b < g && !b.is_zero()) {
                    let idx = vec![b.clone(), g.clone(), d.clone()];
                    let hint = wit.hint.as_ref().map(|h| h(&idx)).transpose()?;
                    let f = |a: &Ordinal| -> Result<Value, CoherenceError> {
                        let mut v = t(g, d, a)?;
                        v.add_scaled(-1, &fam.eval(d, &[a.clone(), b.clone()])?);
                        v.add_scaled(1, &fam.eval(g, &[a.clone(), b.clone()])?);
                        if let Some(m) = fam.modulus {
                            v.reduce(m);
                        }
                        Ok(v)
                    };
                    let (verdict, defect_support) = classify(&f, b, window, hint)?;
                    report.tuples.push(TupleReport { tuple: idx, defect_support, verdict });
                }
            }
            n => return Err(CoherenceError::Domain(format!("second-sense checks cover n ∈ {{1, 2}}, got {n}"))),
        }
    }
    Ok(report)
}

/// `ã_n`: `sⁿ_{β_{n−1}}(α, β₀, …, β_{n−2}) = φ_β⃗(α)`, with the natural
/// witnesses `t¹_{γδ} = φ_{γδ}` and hints carried over from `Φ`.
pub fn a_n_convert(fam: &FamilyOracle) -> (FamilyII, Witnesses) {
    let n = fam.arity;
    let f = fam.clone();
    let mut out = FamilyII::new(n, &format!("ã({})", fam.name), move |args: &[Ordinal], gamma: &Ordinal| {
        let mut idx = args[1..].to_vec();
        idx.push(gamma.clone());
        f.eval(&idx, &args[0])
    });
    out.modulus = fam.modulus;
    let mut wit = Witnesses::vacuous();
    if n == 2 {
        let f = fam.clone();
        wit = wit.with_t(move |g, d, a| f.eval(&[g.clone(), d.clone()], a));
    }
    if let Some(h) = &fam.hint {
        let h = h.clone();
        wit = wit.with_hint(move |idx| h(idx));
    }
    (out, wit)
}

/// Inverse of `ã₁`: `φ_β(α) = s¹_β(α)`.
pub fn a_1_reverse(fam: &FamilyII) -> Result<FamilyOracle, CoherenceError> {
    if fam.arity != 1 {
        return Err(CoherenceError::Domain("only ã₁ is a bijective reindexing".into()));
    }
    let f = fam.clone();
    let mut out = FamilyOracle::new(1, &format!("reverse({})", fam.name), move |idx: &[Ordinal], a: &Ordinal| {
        f.eval(&idx[0], std::slice::from_ref(a))
    });
    out.modulus = fam.modulus;
    Ok(out)
}

fn hint_from_defect(c: &Chain, below: &Ordinal) -> SupportHint {
    SupportHint::Within(c.support().map(|t| t[0].clone()).filter(|x| x < below).collect())
}

/// `φ^x_β(α) = f₁(0,β)|_{{α}⊗[ω₁]²}`, hinted by coherence: the defect at
/// `(β₀, β₁)` is `−s d⟨0, β₀, β₁⟩` below `β₀`.
pub fn phi_x_family(fs: &FSystem) -> FamilyOracle {
    let (a, b) = (fs.clone(), fs.clone());
    FamilyOracle::new(1, "phi_x", move |idx: &[Ordinal], alpha: &Ordinal| {
        Ok(Value::from_chain(&a.x_slice(&[Ordinal::zero(), idx[0].clone()], alpha)?))
    })
    .with_hint(move |t: &[Ordinal]| {
        let sd = b.sd(&[Ordinal::zero(), t[0].clone(), t[1].clone()])?;
        Ok(hint_from_defect(&sd, &t[0]))
    })
}

/// `φ^⋆_{β⃗}(α) = f₂(0,β⃗)|_{{α}⊗[ω₂]³}`, the first-coordinate slices of `f₂`.
pub fn phi_star_family(fs: &FSystem) -> FamilyOracle {
    let (a, b) = (fs.clone(), fs.clone());
    FamilyOracle::new(2, "phi_star", move |idx: &[Ordinal], alpha: &Ordinal| {
        Ok(Value::from_chain(&a.x_slice(&[Ordinal::zero(), idx[0].clone(), idx[1].clone()], alpha)?))
    })
    .with_hint(move |t: &[Ordinal]| {
        let sd = b.sd(&[Ordinal::zero(), t[0].clone(), t[1].clone(), t[2].clone()])?;
        Ok(hint_from_defect(&sd, &t[0]))
    })
}

/// The `ρ₂` fiber maps `φ_β(α) = ρ₂(α, β)`. No hint: their coherence holds
/// modulo bounded functions, not modulo finite ones.
pub fn rho2_fiber_family(sys: &LadderSystem) -> FamilyOracle {
    let sys = sys.clone();
    FamilyOracle::new(1, "rho2_fibers", move |idx: &[Ordinal], a: &Ordinal| Ok(Value::int(rho2(&sys, a, &idx[0]) as i64)))
}

/// The zero family of the given arity.
pub fn zero_family(arity: usize) -> FamilyOracle {
    FamilyOracle::new(arity, "zero", |_: &[Ordinal], _: &Ordinal| Ok(Value::zero()))
        .with_hint(|_: &[Ordinal]| Ok(SupportHint::Within(BTreeSet::new())))
}

// ---------------------------------------------------------------------------
// The pairing θ.

fn cantor_pair(x: u128, y: u128) -> Option<u128> {
    let s = x.checked_add(y)?;
    s.checked_mul(s.checked_add(1)?).map(|p| p / 2 + y)
}

fn cantor_unpair(z: u128) -> (u128, u128) {
    let w = ((((8 * z + 1) as f64).sqrt() as u128).saturating_sub(1)) / 2;
    let mut w = w;
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}

fn pair_many(xs: &[u128]) -> Option<u128> {
    match xs {
        [] => Some(0),
        [x] => Some(*x),
        [x, rest @ ..] => cantor_pair(*x, pair_many(rest)?),
    }
}

fn unpair_many(z: u128, k: usize) -> Vec<u128> {
    match k {
        0 => Vec::new(),
        1 => vec![z],
        _ => {
            let (x, rest) = cantor_unpair(z);
            let mut v = vec![x];
            v.extend(unpair_many(rest, k - 1));
            v
        }
    }
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Colex rank of a `k`-subset of ℕ given increasingly.
fn colex_rank(xs: &[u128]) -> u128 {
    xs.iter().enumerate().map(|(i, &x)| binom(x, i as u128 + 1)).sum()
}

fn colex_unrank(mut r: u128, k: usize) -> Vec<u128> {
    let mut out = vec![0; k];
    for i in (0..k).rev() {
        let mut x = i as u128;
        while binom(x + 1, i as u128 + 1) <= r {
            x += 1;
        }
        out[i] = x;
        r -= binom(x, i as u128 + 1);
    }
    out
}

/// Cantor normal form coefficients `(c_{K−1}, …, c₀)` of an ordinal below
/// `ω^ω`.
fn coeffs(x: &Ordinal, k: usize) -> Option<Vec<u128>> {
    let mut v = vec![0u128; k];
    for t in x.terms() {
        let e = t.exp.to_u64()? as usize;
        if e >= k {
            return None;
        }
        v[k - 1 - e] = u128::try_from(&t.coef).ok()?;
    }
    Some(v)
}

fn from_coeffs(v: &[u128]) -> Ordinal {
    let k = v.len();
    let mut out = Ordinal::zero();
    for (i, &c) in v.iter().enumerate() {
        if c > 0 {
            out = out.add(&Ordinal::monomial(Ordinal::from((k - 1 - i) as u64), c as u64));
        }
    }
    out
}

fn degree(x: &Ordinal) -> Option<usize> {
    match x.leading_exp() {
        None => Some(0),
        Some(e) => Some(e.to_u64()? as usize + 1),
    }
}

/// An enumeration `e` of the ordinals below `c = λ + j` (`λ > 0` a limit)
/// by the naturals: `λ + i ↦ i` for `i < j`, then the infinite pieces
/// `prefix ⌢ d ⌢ ℕ^p` (`d` below the coefficient of `c` at position `p`)
/// interleaved.
struct Enumeration {
    target: Vec<u128>,
    j: u128,
    pieces: Vec<(usize, u128)>,
}

impl Enumeration {
    fn new(c: &Ordinal) -> Option<Enumeration> {
        let k = degree(c)?;
        let target = coeffs(c, k)?;
        let j = target[k - 1];
        let mut pieces = Vec::new();
        for (pos, &t) in target.iter().enumerate().take(k - 1) {
            for d in 0..t {
                pieces.push((pos, d));
            }
        }
        Some(Enumeration { target, j, pieces })
    }

    fn encode(&self, x: &Ordinal) -> Option<u128> {
        let k = self.target.len();
        let v = coeffs(x, k)?;
        let pos = (0..k).find(|&i| v[i] != self.target[i])?;
        if v[pos] > self.target[pos] {
            return None;
        }
        if pos == k - 1 {
            return Some(v[pos]);
        }
        let piece = self.pieces.iter().position(|&(p, d)| p == pos && d == v[pos])? as u128;
        let inner = pair_many(&v[pos + 1..])?;
        let np = self.pieces.len() as u128;
        inner.checked_mul(np)?.checked_add(piece)?.checked_add(self.j)
    }

    fn decode(&self, n: u128) -> Ordinal {
        let k = self.target.len();
        if n < self.j {
            let mut v = self.target.clone();
            v[k - 1] = n;
            return from_coeffs(&v);
        }
        let np = self.pieces.len() as u128;
        let (inner, piece) = ((n - self.j) / np, (n - self.j) % np);
        let (pos, d) = self.pieces[piece as usize];
        let mut v = self.target[..pos].to_vec();
        v.push(d);
        v.extend(unpair_many(inner, k - 1 - pos));
        from_coeffs(&v)
    }
}

fn limit_and_finite(x: &Ordinal) -> (Ordinal, u128) {
    let fin = x.terms().iter().find(|t| t.exp.is_zero()).map(|t| u128::try_from(&t.coef).unwrap_or(u128::MAX)).unwrap_or(0);
    let lim = Ordinal::from_terms(x.terms().iter().filter(|t| !t.exp.is_zero()).cloned().collect());
    (lim, fin)
}

/// The fixed bijection `θ` from the ordinals below `ω^ω` onto their
/// increasing triples. It maps each block `[λ, λ+ω)` (`λ` zero or a limit)
/// onto the triples whose largest entry lies in that block, so
/// `E_θ = {β : θ''β = [β]³}` contains every limit ordinal.
///
/// On `[0, ω)` it is the colex enumeration of `[ω]³`. For `λ > 0`,
/// `θ(λ + m)` unpairs `m` as `(j, r)` and decodes the `r`-th pair (colex) of
/// the enumeration of `λ + j`.
pub fn theta(alpha: &Ordinal) -> Result<[Ordinal; 3], CoherenceError> {
    let (lam, m) = limit_and_finite(alpha);
    if lam.is_zero() {
        let v = colex_unrank(m, 3);
        return Ok([Ordinal::from(v[0] as u64), Ordinal::from(v[1] as u64), Ordinal::from(v[2] as u64)]);
    }
    let (j, r) = cantor_unpair(m);
    let c = lam.add(&Ordinal::from(j as u64));
    let en = Enumeration::new(&c).ok_or_else(|| CoherenceError::Overflow(alpha.to_string()))?;
    let uv = colex_unrank(r, 2);
    let mut xy = [en.decode(uv[0]), en.decode(uv[1])];
    xy.sort();
    let [x, y] = xy;
    Ok([x, y, c])
}

/// `θ⁻¹`.
pub fn theta_inv(t: &[Ordinal]) -> Result<Ordinal, CoherenceError> {
    if t.len() != 3 || !is_increasing(t) {
        return Err(CoherenceError::Domain(format!("{} is not an increasing triple", fmt_tuple(t))));
    }
    let overflow = || CoherenceError::Overflow(fmt_tuple(t));
    let (lam, j) = limit_and_finite(&t[2]);
    if lam.is_zero() {
        let v: Vec<u128> = t.iter().map(|x| x.to_u64().unwrap() as u128).collect();
        return Ok(Ordinal::from(u64::try_from(colex_rank(&v)).map_err(|_| overflow())?));
    }
    let en = Enumeration::new(&t[2]).ok_or_else(overflow)?;
    let mut uv = [en.encode(&t[0]).ok_or_else(overflow)?, en.encode(&t[1]).ok_or_else(overflow)?];
    uv.sort();
    let m = cantor_pair(j, colex_rank(&uv)).ok_or_else(overflow)?;
    Ok(lam.add(&Ordinal::from(u64::try_from(m).map_err(|_| overflow())?)))
}

/// Whether `β ∈ E_θ`.
pub fn in_e_theta(beta: &Ordinal) -> bool {
    beta.is_zero() || beta.is_limit()
}

/// `φ^θ_β(α)`: 1 when `θ(α)` lies in the support of `f₁(0,β)`.
pub fn phi_theta(fs: &FSystem, beta: &Ordinal, alpha: &Ordinal) -> Result<u8, CoherenceError> {
    if alpha >= beta {
        return Err(CoherenceError::Domain(format!("φ^θ_{beta} is defined below {beta}, got {alpha}")));
    }
    if !in_e_theta(beta) {
        return Err(CoherenceError::Domain(format!("{beta} is not a closure point of θ")));
    }
    let t = theta(alpha)?;
    Ok(u8::from(fs.coeff(&[Ordinal::zero(), beta.clone()], &t)? != 0))
}

/// The family `{φ^θ_β | β ∈ E_θ}` with values in `Z/2`.
pub fn phi_theta_family(fs: &FSystem) -> FamilyOracle {
    let (a, b) = (fs.clone(), fs.clone());
    FamilyOracle::new(1, "phi_theta", move |idx: &[Ordinal], alpha: &Ordinal| {
        Ok(Value::int(phi_theta(&a, &idx[0], alpha)? as i64))
    })
    .with_modulus(2)
    .with_hint(move |t: &[Ordinal]| {
        let sd = b.sd(&[Ordinal::zero(), t[0].clone(), t[1].clone()])?;
        let mut s = BTreeSet::new();
        for g in sd.support().filter(|g| g[2] < t[0]) {
            s.insert(theta_inv(g)?);
        }
        Ok(SupportHint::Within(s))
    })
}

/// `s¹_γ(α, β)` for `α < β ≤ γ`.
pub fn s1(fs: &FSystem, gamma: &Ordinal, alpha: &Ordinal, beta: &Ordinal) -> Result<u8, CoherenceError> {
    if !(alpha < beta && beta <= gamma) {
        return Err(CoherenceError::Domain(format!("s¹ needs α < β ≤ γ, got ({alpha},{beta},{gamma})")));
    }
    let sys = fs.system();
    if beta.is_limit() {
        let m = m_value(fs, beta, gamma, 4)?;
        Ok(u8::from(sys.contains(beta, alpha) && *alpha >= m))
    } else {
        Ok(u8::from(*beta == alpha.succ()))
    }
}

/// `s²_δ(β, γ) = f₂(0,γ,δ)|_{min{β,γ}⊗[β]²⊗{β}}`, for `β ≤ δ` and
/// `0 < γ < δ`.
pub fn s2(fs: &FSystem, delta: &Ordinal, beta: &Ordinal, gamma: &Ordinal) -> Result<Chain, CoherenceError> {
    if beta > delta || gamma >= delta || gamma.is_zero() {
        return Err(CoherenceError::Domain(format!("s² needs β ≤ δ and 0 < γ < δ, got ({beta},{gamma},{delta})")));
    }
    let cut = beta.min(gamma);
    let full = fs.full(&[Ordinal::zero(), gamma.clone(), delta.clone()])?;
    Ok(full.restrict(|t| t[3] == *beta && t[0] < *cut))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use crate::sample;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ords(v: &[&str]) -> Vec<Ordinal> {
        v.iter().map(|s| ord(s)).collect()
    }

    fn window(lo: &str, hi: &str, sys: &LadderSystem) -> Vec<Ordinal> {
        sample::neighbourhood(sys, &ords(&["w", "w*2", "w*3", "w^2", "w^2+w", hi]), &ord(lo), &ord(hi), 6)
    }

    #[test]
    fn zero_tests() {
        let w = ords(&["0", "1", "5", "w+2"]);
        let (ok, supp) = is_0_trivial(|_| Ok(Value::zero()), &ord("w*2"), &w, Some(SupportHint::Within(BTreeSet::new()))).unwrap();
        assert!(ok && supp.is_empty());
        let sys = LadderSystem::canonical();
        let club = |a: &Ordinal| Ok(Value::int(i64::from(sys.contains(&ord("w"), a) && *a >= ord("3"))));
        let (ok, _) = is_0_trivial(club, &ord("w"), &w, Some(SupportHint::Infinite)).unwrap();
        assert!(!ok);
        assert!(matches!(is_0_trivial(club, &ord("w"), &w, None), Err(CoherenceError::NoHint(_))));
        // finite domains need no hint
        let (ok, supp) = is_0_trivial(club, &ord("7"), &[], None).unwrap();
        assert!(ok && supp.len() == 4);
        // two x-slice families of f₁ differ finitely
        let fs = FSystem::new(sys.clone());
        let fam = phi_x_family(&fs);
        let t = ords(&["w*2", "w^2"]);
        let hint = fam.hint(&t).unwrap().unwrap();
        let (ok, _) = is_0_trivial(|a| fam.defect(&t, a), &t[0], &window("0", "w*2", &sys), Some(hint)).unwrap();
        assert!(ok);
    }

    #[test]
    fn first_sense_examples() {
        let sys = LadderSystem::canonical();
        let fs = FSystem::new(sys.clone());
        let win = window("0", "w^2+w", &sys);
        let pairs = vec![ords(&["w", "w*2"]), ords(&["w+3", "w^2"]), ords(&["w*2", "w^2+w"]), ords(&["5", "w+1"])];
        assert!(check_coherent_i(&phi_x_family(&fs), &pairs, &win).unwrap().pass());
        assert!(check_coherent_i(&zero_family(1), &pairs, &win).unwrap().pass());
        let rho = check_coherent_i(&rho2_fiber_family(&sys), &pairs, &win).unwrap();
        assert!(!rho.pass());
        assert!(rho.tuples.iter().any(|t| t.verdict == Verdict::Uncertified));
        for p in &pairs {
            let d = bounded_defect(&rho2_fiber_family(&sys), p, &win).unwrap();
            assert!(d as usize <= rho2(&sys, &p[0], &p[1]) + 1);
        }
        let triples = vec![ords(&["w", "w*2", "w^2"]), ords(&["3", "w+2", "w*3"])];
        assert!(check_coherent_i(&phi_star_family(&fs), &triples, &win).unwrap().pass());
    }

    #[test]
    fn second_sense_examples() {
        let sys = LadderSystem::canonical();
        let fs = FSystem::new(sys.clone());
        let win = window("0", "w^2+w", &sys);
        let pairs = vec![(ord("w"), ord("w*2")), (ord("w*2"), ord("w^2")), (ord("w+1"), ord("w*3"))];
        let (s, wit) = a_n_convert(&phi_star_family(&fs));
        assert!(check_coherent_ii(&s, &wit, &pairs, &win).unwrap().pass());
        let broken = wit.clone().with_t({
            let f = phi_star_family(&fs);
            let sys = sys.clone();
            move |g, d, a| {
                let mut v = f.eval(&[g.clone(), d.clone()], a)?;
                if sys.contains(&ord("w"), a) {
                    v.add_scaled(1, &Value::int(1));
                }
                Ok(v)
            }
        });
        assert!(!check_coherent_ii(&s, &broken, &pairs, &win).unwrap().pass());
        assert!(matches!(
            check_coherent_ii(&s, &Witnesses::vacuous(), &pairs, &win),
            Err(CoherenceError::MissingWitness(_))
        ));
        let (s1fam, wit1) = a_n_convert(&phi_x_family(&fs));
        assert!(check_coherent_ii(&s1fam, &wit1, &pairs, &win).unwrap().pass());
        let back = a_1_reverse(&s1fam).unwrap();
        for b in ords(&["w", "w*2+3", "w^2"]) {
            for a in win.iter().filter(|a| **a < b) {
                assert_eq!(back.eval(std::slice::from_ref(&b), a).unwrap(), phi_x_family(&fs).eval(std::slice::from_ref(&b), a).unwrap());
            }
        }
    }

    #[test]
    fn theta_examples() {
        let fs = FSystem::new(LadderSystem::canonical());
        for m in 0..200u64 {
            let a = Ordinal::from(m);
            let t = theta(&a).unwrap();
            assert!(t[2] < ord("w"));
            assert_eq!(theta_inv(&t).unwrap(), a);
        }
        assert_eq!(theta(&ord("0")).unwrap(), [ord("0"), ord("1"), ord("2")]);
        for k in 1..6u64 {
            let t = [Ordinal::from(k), Ordinal::from(k + 1), ord("w")];
            let a = theta_inv(&t).unwrap();
            assert_eq!(phi_theta(&fs, &ord("w*2"), &a).unwrap(), 1);
            assert_eq!(phi_theta(&fs, &ord("w^2"), &a).unwrap(), 1);
        }
        // θ(α) outside [[0,β]]³
        let far = theta_inv(&ords(&["0", "1", "w*3"])).unwrap();
        assert!(far >= ord("w*3"));
        assert_eq!(phi_theta(&fs, &ord("w^2"), &far).unwrap(), 0);
        assert!(phi_theta(&fs, &ord("w"), &ord("w")).is_err());
        let fam = phi_theta_family(&fs);
        let win = window("0", "w^2", fs.system());
        let pairs = vec![ords(&["w", "w*2"]), ords(&["w*2", "w^2"]), ords(&["w*3", "w^2+w"])];
        assert!(check_coherent_i(&fam, &pairs, &win).unwrap().pass());
    }

    #[test]
    fn s1_s2_examples() {
        let sys = LadderSystem::canonical();
        let fs = FSystem::new(sys.clone());
        for (a, b) in [("3", "4"), ("w", "w+1"), ("3", "5")] {
            assert_eq!(s1(&fs, &ord("w*2"), &ord(a), &ord(b)).unwrap(), u8::from(ord(b) == ord(a).succ()));
        }
        let m = m_value(&fs, &ord("w"), &ord("w^2"), 4).unwrap();
        for k in 0..10u64 {
            let eta = Ordinal::from(k);
            assert_eq!(s1(&fs, &ord("w^2"), &eta, &ord("w")).unwrap(), u8::from(eta >= m));
        }
        // (2'): s²_δ(·,α) − s²_γ(·,α) is trivialized by f₂(0,γ,δ)
        let (g, d) = (ord("w*2"), ord("w^2"));
        for a in ords(&["1", "w", "w+1", "w+3"]) {
            for b in ords(&["w", "w+2", "w+4", "w*2"]) {
                let t = fs.full(&[ord("0"), g.clone(), d.clone()]).unwrap().restrict(|x| x[3] == b && x[0] < a.clone().min(b.clone()));
                let diff = s2(&fs, &d, &b, &a).unwrap().combine(-1, &s2(&fs, &g, &b, &a).unwrap()).unwrap();
                let sd = fs.sd(&[ord("0"), a.clone(), g.clone(), d.clone()]).unwrap();
                let rem = t.combine(-1, &diff).unwrap();
                let want = sd.restrict(|x| x[3] == b && x[0] < a.clone().min(b.clone()));
                assert_eq!(rem, want.scale(-1), "α={a} β={b}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn theta_is_a_bijection_on_blocks(lam in 1u64..4, hi in 0u64..3, m in 0u64..400) {
            let l = Ordinal::monomial(Ordinal::from(2u64), hi).add(&Ordinal::monomial(Ordinal::one(), lam));
            let a = l.add(&Ordinal::from(m));
            let t = theta(&a).unwrap();
            prop_assert!(is_increasing(&t));
            prop_assert!(t[2] >= l && t[2] < l.add(&Ordinal::omega()));
            prop_assert_eq!(theta_inv(&t).unwrap(), a);
        }

        #[test]
        fn a_n_is_additive(seed in 0u64..50) {
            let fs = FSystem::new(LadderSystem::canonical());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let idx = sample::increasing_tuple(&mut rng, 2, 3, 3);
            prop_assume!(!idx[0].is_zero());
            let sum = {
                let (x, z) = (phi_star_family(&fs), rho2_like(&fs));
                FamilyOracle::new(2, "sum", move |i: &[Ordinal], a: &Ordinal| {
                    let mut v = x.eval(i, a)?;
                    v.add_scaled(1, &z.eval(i, a)?);
                    Ok(v)
                })
            };
            let (s_sum, _) = a_n_convert(&sum);
            let (s_x, _) = a_n_convert(&phi_star_family(&fs));
            let (s_z, _) = a_n_convert(&rho2_like(&fs));
            for a in sample::neighbourhood(fs.system(), &idx, &Ordinal::zero(), &idx[0], 4).iter().filter(|a| **a < idx[0]) {
                let args = [a.clone(), idx[0].clone()];
                let mut want = s_x.eval(&idx[1], &args).unwrap();
                want.add_scaled(1, &s_z.eval(&idx[1], &args).unwrap());
                prop_assert_eq!(s_sum.eval(&idx[1], &args).unwrap(), want);
            }
        }
    }

    fn rho2_like(fs: &FSystem) -> FamilyOracle {
        let sys = fs.system().clone();
        FamilyOracle::new(2, "rho2n", move |i: &[Ordinal], a: &Ordinal| {
            Ok(Value::int(crate::walks::rho2_n(&sys, &[a.clone(), i[0].clone(), i[1].clone()])))
        })
    }
}
