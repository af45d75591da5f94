//! Classical walks (`Tr`, `L`, `ρ₁`, `ρ₂`), internal walks `Tr^δ`, the
//! higher walk trees `tr₂` and `Tr₂`, and the signed counts `ρ₂ⁿ`.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::ladder::{Context, LadderSystem};
use crate::ordinal::Ordinal;

/// The upper and lower traces of a walk from `β` down to `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    /// Strictly decreasing: `β = β₀ > β₁ > … > β_k = α`.
    pub steps: Vec<Ordinal>,
    /// `L(α,β)`: `lower[i] = max_{j ≤ i} max(α ∩ C_{β_j})`, with
    /// `max ∅ = 0`; one entry per step below the start.
    pub lower: Vec<Ordinal>,
}

impl Trace {
    /// `ρ₂`: the number of steps.
    pub fn rho2(&self) -> usize {
        self.steps.len() - 1
    }
}

/// The walk `Tr(α,β)`, for `α ≤ β`.
///
/// # Panics
/// Panics if `α > β`.
pub fn upper_trace(sys: &LadderSystem, alpha: &Ordinal, beta: &Ordinal) -> Trace {
    assert!(alpha <= beta, "walk from {beta} down to {alpha}");
    let mut steps = vec![beta.clone()];
    let mut lower = Vec::new();
    let mut cur = beta.clone();
    let mut running = Ordinal::zero();
    while cur != *alpha {
        let m = sys.max_below(&cur, alpha);
        if m > running {
            running = m;
        }
        lower.push(running.clone());
        cur = sys.min_from(&cur, alpha).expect("ladders of ordinals above α reach α");
        steps.push(cur.clone());
    }
    Trace { steps, lower }
}

/// `ρ₂(α,β)`.
pub fn rho2(sys: &LadderSystem, alpha: &Ordinal, beta: &Ordinal) -> usize {
    upper_trace(sys, alpha, beta).rho2()
}

/// `ρ₁(α,β) = max_{i<ρ₂(α,β)} |α ∩ C_{β_i}|` (0 for the trivial walk).
pub fn rho1(sys: &LadderSystem, alpha: &Ordinal, beta: &Ordinal) -> u64 {
    let t = upper_trace(sys, alpha, beta);
    t.steps[..t.rho2()].iter().map(|b| sys.count_below(b, alpha)).max().unwrap_or(0)
}

/// The `C_δ`-internal walk `Tr^δ(α,β)` for a limit `δ` and `α ≤ β < δ`.
///
/// With `η_i = min(C_δ \ α)` and `η_k = min(C_δ \ β)` this is `{β}` followed by
/// the image under the enumeration of `C_δ` of the walk from `k` down to `i`.
/// When `β ∉ C_δ` the first step climbs up into `C_δ`, so the walk need not
/// end at `α`.
pub fn internal_trace(sys: &LadderSystem, delta: &Ordinal, alpha: &Ordinal, beta: &Ordinal) -> Trace {
    assert!(delta.is_limit(), "internal walks need a limit δ, got {delta}");
    assert!(alpha <= beta && beta < delta, "internal walk needs α ≤ β < δ");
    let i = sys.ceil_index(delta, alpha).expect("cofinal ladder");
    let k = sys.ceil_index(delta, beta).expect("cofinal ladder");
    let mut steps = Vec::new();
    if !sys.contains(delta, beta) {
        steps.push(beta.clone());
    }
    let index_walk = upper_trace(sys, &Ordinal::from(i), &Ordinal::from(k));
    for j in &index_walk.steps {
        steps.push(sys.elem(delta, j.to_u64().expect("finite index")).expect("element"));
    }
    let mut lower = Vec::new();
    let mut running = Ordinal::zero();
    for b in &steps[..steps.len() - 1] {
        // a first step up into C_δ may start at or below α
        if b > alpha {
            let m = sys.max_below(b, alpha);
            if m > running {
                running = m;
            }
        }
        lower.push(running.clone());
    }
    Trace { steps, lower }
}

/// `ρ₂[δ](α,β)`.
pub fn rho2_internal(sys: &LadderSystem, delta: &Ordinal, alpha: &Ordinal, beta: &Ordinal) -> usize {
    internal_trace(sys, delta, alpha, beta).rho2()
}

/// Sign attached to an output of a signed walk tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// A node of a (possibly signed) walk tree. An empty tree is a node with no
/// output and no children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkTree {
    pub input: Vec<Ordinal>,
    pub output: Option<Ordinal>,
    pub sign: Option<Sign>,
    pub children: Vec<WalkTree>,
}

impl WalkTree {
    fn empty(input: Vec<Ordinal>) -> WalkTree {
        WalkTree { input, output: None, sign: None, children: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.output.is_none()
    }

    /// Number of nodes carrying an output.
    pub fn size(&self) -> usize {
        usize::from(self.output.is_some()) + self.children.iter().map(WalkTree::size).sum::<usize>()
    }

    /// Every (input, output, sign) triple, preorder.
    pub fn outputs(&self) -> Vec<(Vec<Ordinal>, Ordinal, Option<Sign>)> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<(Vec<Ordinal>, Ordinal, Option<Sign>)>) {
        if let Some(o) = &self.output {
            out.push((self.input.clone(), o.clone(), self.sign));
        }
        for c in &self.children {
            c.collect(out);
        }
    }

    /// Outputs along the leftmost branch.
    pub fn leftmost_outputs(&self) -> Vec<Ordinal> {
        let mut out = Vec::new();
        let mut node = self;
        while let Some(o) = &node.output {
            out.push(o.clone());
            node = &node.children[0];
        }
        out
    }

    /// Inputs visited along the rightmost branch, including the final empty
    /// node.
    pub fn rightmost_inputs(&self) -> Vec<Vec<Ordinal>> {
        let mut out = vec![self.input.clone()];
        let mut node = self;
        while node.output.is_some() {
            node = node.children.last().expect("binary node");
            out.push(node.input.clone());
        }
        out
    }

    /// Number of negative outputs minus number of positive outputs.
    pub fn signed_count(&self) -> i64 {
        let own = match (self.output.is_some(), self.sign) {
            (true, Some(Sign::Minus)) => 1,
            (true, Some(Sign::Plus)) => -1,
            _ => 0,
        };
        own + self.children.iter().map(WalkTree::signed_count).sum::<i64>()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "input": self.input.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "output": self.output.as_ref().map(|o| o.to_string()),
            "sign": self.sign.map(|s| s.as_str()),
            "children": self.children.iter().map(WalkTree::to_json).collect::<Vec<_>>(),
        })
    }

    /// Graphviz rendering; empty subtrees are omitted.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph walk {\n  node [shape=box];\n");
        let mut next = 0usize;
        self.dot_node(&mut s, &mut next);
        s.push_str("}\n");
        s
    }

    fn dot_node(&self, s: &mut String, next: &mut usize) -> Option<usize> {
        let o = self.output.as_ref()?;
        let id = *next;
        *next += 1;
        let input: Vec<String> = self.input.iter().map(|x| x.to_string()).collect();
        let sign = self.sign.map(|x| x.as_str()).unwrap_or("");
        let _ = writeln!(s, "  n{id} [label=\"({})\\n{sign}{o}\"];", input.join(","));
        for c in &self.children {
            if let Some(cid) = c.dot_node(s, next) {
                let _ = writeln!(s, "  n{id} -> n{cid};");
            }
        }
        Some(id)
    }
}

/// The next output of `tr₂(α,β,γ)` and whether `β ∈ C_γ`, or `None` for an
/// empty tree.
fn tr2_step(sys: &LadderSystem, alpha: &Ordinal, beta: &Ordinal, gamma: &Ordinal) -> Option<(Ordinal, bool)> {
    if beta == gamma {
        return None;
    }
    let top = Context::ordinal(gamma.clone());
    match top.compound(sys, beta) {
        Some(view) => view.min_from(sys, alpha).map(|o| (o, true)),
        None => Some((sys.min_from(gamma, beta).expect("β < γ"), false)),
    }
}

/// The degree-2 walk tree `tr₂(α,β,γ)` for `α ≤ β ≤ γ`.
pub fn tr2(sys: &LadderSystem, alpha: &Ordinal, beta: &Ordinal, gamma: &Ordinal) -> WalkTree {
    assert!(alpha <= beta && beta <= gamma, "tr2 needs α ≤ β ≤ γ");
    let input = vec![alpha.clone(), beta.clone(), gamma.clone()];
    let Some((o, in_ladder)) = tr2_step(sys, alpha, beta, gamma) else {
        return WalkTree::empty(input);
    };
    let children = if in_ladder {
        vec![tr2(sys, alpha, &o, gamma), tr2(sys, alpha, &o, beta)]
    } else {
        vec![tr2(sys, alpha, &o, gamma), tr2(sys, alpha, beta, &o)]
    };
    WalkTree { input, output: Some(o), sign: None, children }
}

/// The signed tree `Tr₂(±,α,β,γ)`: when `β ∈ C_γ` the output carries the
/// opposite sign and the right child flips the sign; otherwise the sign is
/// kept throughout.
pub fn tr2_signed(sys: &LadderSystem, sign: Sign, alpha: &Ordinal, beta: &Ordinal, gamma: &Ordinal) -> WalkTree {
    assert!(alpha <= beta && beta <= gamma, "Tr2 needs α ≤ β ≤ γ");
    let input = vec![alpha.clone(), beta.clone(), gamma.clone()];
    let Some((o, in_ladder)) = tr2_step(sys, alpha, beta, gamma) else {
        return WalkTree::empty(input);
    };
    let (out_sign, children) = if in_ladder {
        (
            sign.flip(),
            vec![tr2_signed(sys, sign, alpha, &o, gamma), tr2_signed(sys, sign.flip(), alpha, &o, beta)],
        )
    } else {
        (sign, vec![tr2_signed(sys, sign, alpha, &o, gamma), tr2_signed(sys, sign, alpha, beta, &o)])
    };
    WalkTree { input, output: Some(o), sign: Some(out_sign), children }
}

/// The signed classical walk `Tr₁(±,α,β)`: each step `min(C_β \ α)` is
/// recorded with the opposite sign, and the walk stops on reaching `α`.
pub fn tr1_signed(sys: &LadderSystem, sign: Sign, alpha: &Ordinal, beta: &Ordinal) -> WalkTree {
    assert!(alpha <= beta, "Tr1 needs α ≤ β");
    let input = vec![alpha.clone(), beta.clone()];
    if alpha == beta {
        return WalkTree::empty(input);
    }
    let o = sys.min_from(beta, alpha).expect("α < β");
    let child = tr1_signed(sys, sign, alpha, &o);
    WalkTree { input, output: Some(o), sign: Some(sign.flip()), children: vec![child] }
}

/// `ρ₂ⁿ(α⃗)` for `n ∈ {1, 2}`: negative minus positive outputs of
/// `Tr_n(+, α⃗)`.
///
/// # Panics
/// Panics unless `α⃗` has length 2 or 3 and is non-decreasing.
pub fn rho2_n(sys: &LadderSystem, tuple: &[Ordinal]) -> i64 {
    match tuple {
        [a, b] => tr1_signed(sys, Sign::Plus, a, b).signed_count(),
        [a, b, c] => tr2_signed(sys, Sign::Plus, a, b, c).signed_count(),
        _ => panic!("rho2_n is defined for n ∈ {{1, 2}} only"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::ord;
    use proptest::prelude::*;

    fn strs(v: &[Ordinal]) -> Vec<String> {
        v.iter().map(|o| o.to_string()).collect()
    }

    #[test]
    fn classical_examples() {
        let sys = LadderSystem::canonical();
        let t = upper_trace(&sys, &ord("5"), &ord("w*2"));
        assert_eq!(strs(&t.steps), ["w*2", "w+1", "w", "5"]);
        assert_eq!(strs(&t.lower), ["0", "0", "4"]);
        assert_eq!(t.rho2(), 3);
        assert_eq!(rho1(&sys, &ord("5"), &ord("w*2")), 5);
        let t = upper_trace(&sys, &ord("2"), &ord("7"));
        assert_eq!(strs(&t.steps), ["7", "6", "5", "4", "3", "2"]);
        let b = ord("w^2+3");
        assert_eq!(rho2(&sys, &b, &b), 0);
        assert_eq!(upper_trace(&sys, &b, &b).steps, vec![b.clone()]);
    }

    #[test]
    fn internal_examples() {
        let sys = LadderSystem::canonical();
        let t = internal_trace(&sys, &ord("w*2"), &ord("0"), &ord("w+3"));
        assert_eq!(strs(&t.steps), ["w+3", "w+2", "w+1", "0"]);
        let t = internal_trace(&sys, &ord("w*2"), &ord("w"), &ord("w"));
        assert_eq!(strs(&t.steps), ["w", "w+1"]);
        assert_eq!(t.rho2(), 1);
        for j in 0..6u64 {
            for k in j..8 {
                let (a, b) = (Ordinal::from(j), Ordinal::from(k));
                assert_eq!(internal_trace(&sys, &ord("w"), &a, &b).steps, upper_trace(&sys, &a, &b).steps);
            }
        }
    }

    #[test]
    fn tr2_examples() {
        let sys = LadderSystem::canonical();
        let g = ord("w*2");
        assert!(tr2(&sys, &ord("3"), &g, &g).is_empty());
        let t = tr2(&sys, &ord("0"), &ord("w"), &g);
        assert_eq!(t.output, Some(ord("w+1")));
        assert_eq!(t.children[0].input, vec![ord("0"), ord("w+1"), g.clone()]);
        assert_eq!(t.children[1].input, vec![ord("0"), ord("w"), ord("w+1")]);
        let s = tr2_signed(&sys, Sign::Plus, &ord("0"), &ord("w"), &g);
        assert_eq!(s.sign, Some(Sign::Plus));
        assert!(tr2_signed(&sys, Sign::Plus, &ord("0"), &g, &g).is_empty());
    }

    #[test]
    fn rho2_one_matches_rho2() {
        let sys = LadderSystem::canonical();
        assert_eq!(rho2_n(&sys, &[ord("5"), ord("w*2")]), 3);
        assert_eq!(rho2_n(&sys, &[ord("w"), ord("w")]), 0);
    }

    /// Independent count of `ρ₂²` that follows the signed recursion directly
    /// with explicit ladder lookups and never materialises a tree.
    fn rho2_2_direct(sys: &LadderSystem, plus: bool, a: &Ordinal, b: &Ordinal, c: &Ordinal) -> i64 {
        if b == c {
            return 0;
        }
        if let Some(k) = sys.index_of(c, b) {
            // C_{bc} is the ladder element just below b, if any
            let Some(o) = k.checked_sub(1).and_then(|j| sys.elem(c, j)) else {
                return 0;
            };
            if o < *a {
                return 0;
            }
            let own = if plus { 1 } else { -1 };
            own + rho2_2_direct(sys, plus, a, &o, c) + rho2_2_direct(sys, !plus, a, &o, b)
        } else {
            let o = sys.min_from(c, b).unwrap();
            let own = if plus { -1 } else { 1 };
            own + rho2_2_direct(sys, plus, a, &o, c) + rho2_2_direct(sys, plus, a, b, &o)
        }
    }

    /// Every node two levels below another has a smaller second or third
    /// coordinate.
    fn two_step_descent(t: &WalkTree) -> bool {
        t.children.iter().all(|c| {
            c.children
                .iter()
                .filter(|g| !g.is_empty())
                .all(|g| g.input[1] < t.input[1] || g.input[2] < t.input[2])
                && two_step_descent(c)
        })
    }

    fn arb_below_w3() -> impl Strategy<Value = Ordinal> {
        (0u64..3, 0u64..4, 0u64..6).prop_map(|(a, b, c)| {
            Ordinal::monomial(ord("2"), a).add(&Ordinal::monomial(ord("1"), b)).add(&Ordinal::from(c))
        })
    }

    fn sorted3(x: Ordinal, y: Ordinal, z: Ordinal) -> (Ordinal, Ordinal, Ordinal) {
        let mut v = [x, y, z];
        v.sort();
        let [a, b, c] = v;
        (a, b, c)
    }

    proptest! {
        #[test]
        fn walk_invariants(x in arb_below_w3(), y in arb_below_w3(), seed in 0u64..4) {
            let sys = if seed == 0 { LadderSystem::canonical() } else { LadderSystem::seeded(seed) };
            let (a, b) = if x <= y { (x, y) } else { (y, x) };
            let t = upper_trace(&sys, &a, &b);
            prop_assert_eq!(t.steps.last().unwrap(), &a);
            prop_assert_eq!(t.lower.len(), t.rho2());
            for w in t.steps.windows(2) {
                prop_assert!(w[0] > w[1]);
            }
            for w in t.lower.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for (i, s) in t.steps.iter().enumerate() {
                let sub = upper_trace(&sys, &a, s);
                prop_assert_eq!(&sub.steps[..], &t.steps[i..]);
            }
            prop_assert_eq!(rho2_n(&sys, &[a.clone(), b.clone()]), t.rho2() as i64);
        }

        #[test]
        fn internal_walk_matches_direct_recursion(x in arb_below_w3(), y in arb_below_w3(), seed in 0u64..4) {
            let sys = if seed == 0 { LadderSystem::canonical() } else { LadderSystem::seeded(seed) };
            let delta = ord("w^3");
            let (a, b) = if x <= y { (x, y) } else { (y, x) };
            let t = internal_trace(&sys, &delta, &a, &b);
            // direct recursion through compounded ladders C_{βδ}
            let top = Context::ordinal(delta.clone());
            let goal = sys.min_from(&delta, &a).unwrap();
            let mut direct = vec![b.clone()];
            let mut cur = b.clone();
            if !top.contains(&sys, &cur) {
                cur = top.min_from(&sys, &cur).unwrap();
                direct.push(cur.clone());
            }
            while cur != goal {
                cur = top.compound(&sys, &cur).unwrap().min_from(&sys, &a).unwrap();
                direct.push(cur.clone());
            }
            prop_assert_eq!(t.steps, direct);
        }

        #[test]
        fn tr2_structure(x in arb_below_w3(), y in arb_below_w3(), z in arb_below_w3(), seed in 0u64..4) {
            let sys = if seed == 0 { LadderSystem::canonical() } else { LadderSystem::seeded(seed) };
            let (a, b, c) = sorted3(x, y, z);
            let tree = tr2(&sys, &a, &b, &c);
            prop_assert!(tree.size() < 100_000);
            let signed = tr2_signed(&sys, Sign::Plus, &a, &b, &c);
            prop_assert_eq!(signed.size(), tree.size());
            prop_assert_eq!(signed.signed_count(), rho2_2_direct(&sys, true, &a, &b, &c));
            let flipped = tr2_signed(&sys, Sign::Minus, &a, &b, &c);
            prop_assert_eq!(flipped.signed_count(), -signed.signed_count());
            prop_assert!(two_step_descent(&tree));
            if b < c {
                let right: Vec<Ordinal> = tree
                    .rightmost_inputs()
                    .into_iter()
                    .take_while(|t| t[1] == b)
                    .map(|t| t[2].clone())
                    .collect();
                let walk = upper_trace(&sys, &b, &c).steps;
                prop_assert_eq!(&right[..], &walk[..walk.len() - 1]);
            }
            if c.is_limit() && b < c {
                let internal = internal_trace(&sys, &c, &a, &b).steps;
                prop_assert_eq!(&tree.leftmost_outputs()[..], &internal[1..]);
            }
        }
    }
}
