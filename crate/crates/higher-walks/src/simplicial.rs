//! Finite abstract simplicial complexes on ordinal vertex sets, exact
//! integral reduced homology by Smith normal form, good graphs,
//! tail-acyclicity, and the complexes built from walks and from the bases
//! `B_n(ε)`.
//!
//! Infinite objects only enter through finite windows; graphs built from a
//! window over an infinite ordinal carry a `truncated` flag.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::basis::Basis;
use crate::chain::Chain;
use crate::ladder::{Context, LadderSystem};
use crate::ordinal::{Ordinal, ParseError};
use crate::walks::upper_trace;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {0}: a face repeats a vertex")]
    RepeatedVertex(usize),
    #[error("{0}")]
    Domain(String),
}

// ---------------------------------------------------------------------------
// Complexes.

/// A finite downward-closed family of nonempty finite sets of ordinals.
/// Faces are stored as increasing lists of indices into `vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    vertices: Vec<Ordinal>,
    faces: BTreeSet<Vec<usize>>,
}

impl Complex {
    /// The downward closure of `tops`, on the union of their vertices and
    /// the extra `vertices`.
    pub fn closure(tops: &[Vec<Ordinal>], vertices: &[Ordinal]) -> Complex {
        let mut vs: BTreeSet<Ordinal> = vertices.iter().cloned().collect();
        for t in tops {
            vs.extend(t.iter().cloned());
        }
        let vertices: Vec<Ordinal> = vs.into_iter().collect();
        let index: HashMap<&Ordinal, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut faces = BTreeSet::new();
        for v in 0..vertices.len() {
            faces.insert(vec![v]);
        }
        for t in tops {
            let mut idx: Vec<usize> = t.iter().map(|v| index[v]).collect();
            idx.sort_unstable();
            idx.dedup();
            for mask in 1u64..(1u64 << idx.len()) {
                faces.insert(idx.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect());
            }
        }
        Complex { vertices, faces }
    }

    /// A complex on vertices `0, …, n−1` given by index faces.
    pub fn from_index_faces(n: usize, tops: &[Vec<usize>]) -> Complex {
        let vertices: Vec<Ordinal> = (0..n as u64).map(Ordinal::from).collect();
        let tops: Vec<Vec<Ordinal>> = tops.iter().map(|t| t.iter().map(|&i| vertices[i].clone()).collect()).collect();
        Complex::closure(&tops, &vertices)
    }

    /// Parses a face list: one face per line, vertices as ordinal notation
    /// separated by commas. Blank lines and lines starting with `#` are
    /// skipped. The result is the downward closure.
    pub fn parse_face_list(text: &str) -> Result<Complex, SimplicialError> {
        let mut tops = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut face = Vec::new();
            for part in line.split(',') {
                face.push(Ordinal::parse(part.trim()).map_err(|source| SimplicialError::Parse { line: i + 1, source })?);
            }
            let distinct: BTreeSet<&Ordinal> = face.iter().collect();
            if distinct.len() != face.len() {
                return Err(SimplicialError::RepeatedVertex(i + 1));
            }
            tops.push(face);
        }
        Ok(Complex::closure(&tops, &[]))
    }

    /// A random complex: the closure of `tops` random faces of at most
    /// `max_dim + 1` vertices among `n`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, max_dim: usize, tops: usize) -> Complex {
        let faces: Vec<Vec<usize>> = (0..tops)
            .map(|_| {
                let size = rng.gen_range(1..=(max_dim + 1).min(n));
                let mut f = rand::seq::index::sample(rng, n, size).into_vec();
                f.sort_unstable();
                f
            })
            .collect();
        Complex::from_index_faces(n, &faces)
    }

    pub fn vertices(&self) -> &[Ordinal] {
        &self.vertices
    }

    /// Largest face size minus one; `−1` for the empty complex.
    pub fn dim(&self) -> isize {
        self.faces.iter().map(|f| f.len() as isize - 1).max().unwrap_or(-1)
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> impl Iterator<Item = Vec<Ordinal>> + '_ {
        self.faces.iter().map(|f| f.iter().map(|&i| self.vertices[i].clone()).collect())
    }

    fn faces_of_dim(&self, k: usize) -> Vec<&Vec<usize>> {
        self.faces.iter().filter(|f| f.len() == k + 1).collect()
    }

    pub fn contains(&self, face: &[Ordinal]) -> bool {
        let idx: Option<Vec<usize>> = face.iter().map(|v| self.vertices.binary_search(v).ok()).collect();
        idx.is_some_and(|i| self.faces.contains(&i))
    }

    /// The subcomplex induced on the vertices satisfying `keep`.
    pub fn induced<F: Fn(&Ordinal) -> bool>(&self, keep: F) -> Complex {
        let kept: Vec<usize> = (0..self.vertices.len()).filter(|&i| keep(&self.vertices[i])).collect();
        let new_index: HashMap<usize, usize> = kept.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let faces = self
            .faces
            .iter()
            .filter(|f| f.iter().all(|v| new_index.contains_key(v)))
            .map(|f| f.iter().map(|v| new_index[v]).collect())
            .collect();
        Complex { vertices: kept.iter().map(|&i| self.vertices[i].clone()).collect(), faces }
    }

    /// The tail restriction `G|_{[α, ∞)}`.
    pub fn tail(&self, alpha: &Ordinal) -> Complex {
        self.induced(|v| v >= alpha)
    }

    /// Whether every `k`-subset of the vertices is a face.
    pub fn has_complete_skeleton(&self, k: usize) -> bool {
        let n = self.vertices.len() as u128;
        let want = (0..k as u128).fold(1u128, |acc, i| acc * (n - i) / (i + 1));
        k as u128 > n || self.faces.iter().filter(|f| f.len() == k).count() as u128 == want
    }

    /// `∂_k : C_k → C_{k−1}` as sparse triples `(row, col, value)`, with the
    /// augmentation `⟨α⟩ ↦ 1` for `k = 0`.
    fn boundary_entries(&self, k: usize) -> (usize, usize, Vec<(usize, usize, i64)>) {
        let cols = self.faces_of_dim(k);
        if k == 0 {
            return (1, cols.len(), (0..cols.len()).map(|j| (0, j, 1)).collect());
        }
        let rows = self.faces_of_dim(k - 1);
        let row_of: HashMap<&Vec<usize>, usize> = rows.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut entries = Vec::new();
        for (j, f) in cols.iter().enumerate() {
            for i in 0..f.len() {
                let mut g = (*f).clone();
                g.remove(i);
                entries.push((row_of[&g], j, if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        (rows.len(), cols.len(), entries)
    }

    /// The boundary matrices densely, for the rank oracle.
    pub fn boundary_matrix(&self, k: usize) -> Vec<Vec<i64>> {
        let (r, c, entries) = self.boundary_entries(k);
        let mut m = vec![vec![0; c]; r];
        for (i, j, z) in entries {
            m[i][j] += z;
        }
        m
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "dim": self.dim(),
            "faces": self.faces().map(|f| f.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

// ---------------------------------------------------------------------------
// Smith normal form.

/// The nonzero invariant factors of an integer matrix given by sparse
/// entries, in divisibility order.
///
/// Unit pivots are eliminated sparsely first; whatever remains is reduced
/// densely over arbitrary-precision integers.
pub fn invariant_factors(nrows: usize, ncols: usize, entries: &[(usize, usize, i64)]) -> Vec<BigInt> {
    let mut rows: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); nrows];
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for &(i, j, z) in entries {
        let e = rows[i].entry(j).or_insert_with(BigInt::zero);
        *e += z;
        if e.is_zero() {
            rows[i].remove(&j);
            cols[j].remove(&i);
        } else {
            cols[j].insert(i);
        }
    }
    let mut alive = vec![true; nrows];
    let mut factors = Vec::new();
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        'scan: for (i, row) in rows.iter().enumerate().filter(|(i, _)| alive[*i]) {
            for (&j, v) in row {
                if v.abs().is_one() {
                    let cost = (row.len() - 1) * (cols[j].len() - 1);
                    if best.map_or(true, |b| cost < b.2) {
                        best = Some((i, j, cost));
                        if cost == 0 {
                            break 'scan;
                        }
                    }
                }
            }
        }
        let Some((p, c, _)) = best else { break };
        let pivot_row = rows[p].clone();
        let unit = pivot_row[&c].clone();
        let others: Vec<usize> = cols[c].iter().copied().filter(|&i| i != p).collect();
        for i in others {
            let f = &rows[i][&c] * &unit;
            for (j, v) in &pivot_row {
                let e = rows[i].entry(*j).or_insert_with(BigInt::zero);
                *e -= &f * v;
                if e.is_zero() {
                    rows[i].remove(j);
                    cols[*j].remove(&i);
                } else {
                    cols[*j].insert(i);
                }
            }
        }
        for j in pivot_row.keys() {
            cols[*j].remove(&p);
        }
        rows[p].clear();
        alive[p] = false;
        factors.push(BigInt::one());
    }
    let live_rows: Vec<usize> = (0..nrows).filter(|&i| alive[i] && !rows[i].is_empty()).collect();
    let live_cols: Vec<usize> = (0..ncols).filter(|&j| !cols[j].is_empty()).collect();
    let col_of: HashMap<usize, usize> = live_cols.iter().enumerate().map(|(n, &j)| (j, n)).collect();
    let mut dense = vec![vec![BigInt::zero(); live_cols.len()]; live_rows.len()];
    for (r, &i) in live_rows.iter().enumerate() {
        for (j, v) in &rows[i] {
            dense[r][col_of[j]] = v.clone();
        }
    }
    factors.extend(dense_smith(dense));
    factors
}

fn dense_smith(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { return out };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..n {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for i in t..m {
                        let d = &q * &a[i][t];
                        a[i][j] -= d;
                    }
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..n {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        out.push(a[t][t].abs());
    }
    out
}

/// Whether the chains are linearly independent over `Z`, certified by the
/// rank of their Smith normal form.
pub fn integer_kernel_trivial(chains: &[Chain]) -> bool {
    let mut row_of: HashMap<&Vec<Ordinal>, usize> = HashMap::new();
    let mut entries = Vec::new();
    for (j, c) in chains.iter().enumerate() {
        for (t, z) in c.terms() {
            let n = row_of.len();
            let i = *row_of.entry(t).or_insert(n);
            entries.push((i, j, z));
        }
    }
    invariant_factors(row_of.len(), chains.len(), &entries).len() == chains.len()
}

// ---------------------------------------------------------------------------
// Homology.

/// `H̃_k ≅ Z^betti ⊕ ⊕ Z/t` for one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHomology {
    pub k: isize,
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl DegreeHomology {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for DegreeHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".into()),
            b => parts.push(format!("Z^{b}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "H~_{} = {}", self.k, parts.join(" + "))
    }
}

/// Reduced homology in degrees `−1, …, dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyReport {
    pub degrees: Vec<DegreeHomology>,
}

impl HomologyReport {
    pub fn is_acyclic(&self) -> bool {
        self.degrees.iter().all(DegreeHomology::is_zero)
    }

    pub fn degree(&self, k: isize) -> Option<&DegreeHomology> {
        self.degrees.iter().find(|d| d.k == k)
    }

    /// Number of torsion coefficients in degree `k` divisible by `p`.
    pub fn p_torsion(&self, k: isize, p: u64) -> usize {
        self.degree(k).map_or(0, |d| d.torsion.iter().filter(|t| t.is_multiple_of(&BigInt::from(p))).count())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.degrees
                .iter()
                .map(|d| json!({"k": d.k, "betti": d.betti, "torsion": d.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>()}))
                .collect(),
        )
    }
}

impl fmt::Display for HomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.degrees {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Exact reduced homology over `Z`, with `C_{−1} = Z` and `∂₀⟨α⟩ = 1`.
pub fn reduced_homology(c: &Complex) -> HomologyReport {
    let dim = c.dim();
    let size = |k: isize| if k < 0 { 1 } else { c.faces_of_dim(k as usize).len() };
    // factors[k] are the invariant factors of ∂_k, k = 0..=dim
    let factors: Vec<Vec<BigInt>> = (0..=dim.max(-1))
        .map(|k| {
            let (r, cols, e) = c.boundary_entries(k as usize);
            invariant_factors(r, cols, &e)
        })
        .collect();
    let rank = |k: isize| if k < 0 || k > dim { 0 } else { factors[k as usize].len() };
    let degrees = (-1..=dim)
        .map(|k| DegreeHomology {
            k,
            betti: size(k) - rank(k) - rank(k + 1),
            torsion: if k + 1 <= dim {
                factors[(k + 1) as usize].iter().filter(|t| !t.is_one()).cloned().collect()
            } else {
                Vec::new()
            },
        })
        .collect();
    HomologyReport { degrees }
}

/// Rank of an integer matrix over the rationals by fraction-free
/// elimination.
pub fn rank_rational(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&z| BigInt::from(z)).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Rank of an integer matrix over `F_p`.
pub fn rank_mod_p(m: &[Vec<i64>], p: u64) -> usize {
    let p = p as i64;
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|z| z.rem_euclid(p)).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let inv = |x: i64| -> i64 {
        let mut r = 1i64;
        let (mut b, mut e) = (x, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(q) = (rank..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(rank, q);
        let s = inv(a[rank][c]);
        for j in c..cols {
            a[rank][j] = a[rank][j] * s % p;
        }
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                for j in c..cols {
                    a[i][j] = (a[i][j] - f * a[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Homology read off from ranks alone: Betti numbers from ranks over `Q`
/// and, for each prime `p`, the number of torsion coefficients divisible by
/// `p` from `rank_Q − rank_{F_p}` of the next boundary map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankHomology {
    pub k: isize,
    pub betti: usize,
    pub p_torsion: Vec<(u64, usize)>,
}

pub fn homology_by_ranks(c: &Complex, primes: &[u64]) -> Vec<RankHomology> {
    let dim = c.dim();
    let mats: Vec<Vec<Vec<i64>>> = (0..=dim.max(-1)).map(|k| c.boundary_matrix(k as usize)).collect();
    let rq: Vec<usize> = mats.iter().map(|m| rank_rational(m)).collect();
    let size = |k: isize| if k < 0 { 1 } else { c.faces_of_dim(k as usize).len() };
    let r = |k: isize| if k < 0 || k > dim { 0 } else { rq[k as usize] };
    (-1..=dim)
        .map(|k| RankHomology {
            k,
            betti: size(k) - r(k) - r(k + 1),
            p_torsion: primes
                .iter()
                .map(|&p| (p, if k + 1 <= dim { r(k + 1) - rank_mod_p(&mats[(k + 1) as usize], p) } else { 0 }))
                .collect(),
        })
        .collect()
}

/// Whether the Smith normal form report and the rank oracle agree.
pub fn homology_agrees(c: &Complex, primes: &[u64]) -> bool {
    let snf = reduced_homology(c);
    homology_by_ranks(c, primes).iter().all(|r| {
        snf.degree(r.k).is_some_and(|d| d.betti == r.betti) && r.p_torsion.iter().all(|&(p, n)| snf.p_torsion(r.k, p) == n)
    })
}

// ---------------------------------------------------------------------------
// Tail-acyclicity.

#[derive(Clone, Debug)]
pub struct TailReport {
    pub dim: isize,
    pub complete_skeleton: bool,
    /// The least vertex whose tail has nonvanishing reduced homology.
    pub failing_tail: Option<(Ordinal, HomologyReport)>,
}

impl TailReport {
    pub fn pass(&self) -> bool {
        self.complete_skeleton && self.failing_tail.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "complete_skeleton": self.complete_skeleton,
            "failing_tail": self.failing_tail.as_ref().map(|(v, h)| json!({"from": v.to_string(), "homology": h.to_json()})),
            "pass": self.pass(),
        })
    }
}

/// An `n`-dimensional complex on a finite linear order is tail-acyclic when
/// it has a complete `(n−1)`-skeleton and every tail restriction has
/// vanishing reduced homology.
pub fn tail_acyclic_report(c: &Complex) -> TailReport {
    let dim = c.dim();
    let complete_skeleton = dim < 1 || c.has_complete_skeleton(dim as usize);
    let failing_tail = c.vertices().iter().find_map(|v| {
        let h = reduced_homology(&c.tail(v));
        (!h.is_acyclic()).then(|| (v.clone(), h))
    });
    TailReport { dim, complete_skeleton, failing_tail }
}

pub fn is_tail_acyclic(c: &Complex) -> bool {
    tail_acyclic_report(c).pass()
}

/// The downward closure of the members of `B_n` of the context that lie in
/// `window`, on the vertex set `window`.
pub fn basis_to_complex(basis: &Basis, ctx: &Context, n: usize, window: &[Ordinal]) -> Complex {
    Complex::closure(&basis.members_in(ctx, n, window), window)
}

// ---------------------------------------------------------------------------
// Graphs.

/// A finite graph on a finite set of ordinals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<Ordinal>,
    edges: BTreeSet<(usize, usize)>,
    /// Set when the graph is a window of an infinite one.
    pub truncated: bool,
}

impl Graph {
    pub fn new(vertices: &[Ordinal], edges: &[(Ordinal, Ordinal)]) -> Result<Graph, SimplicialError> {
        let mut vs: BTreeSet<Ordinal> = vertices.iter().cloned().collect();
        for (a, b) in edges {
            vs.insert(a.clone());
            vs.insert(b.clone());
        }
        let vertices: Vec<Ordinal> = vs.into_iter().collect();
        let mut out = Graph { vertices, edges: BTreeSet::new(), truncated: false };
        for (a, b) in edges {
            if a == b {
                return Err(SimplicialError::Domain(format!("loop at {a}")));
            }
            let (i, j) = (out.index(a), out.index(b));
            out.edges.insert((i.min(j), i.max(j)));
        }
        Ok(out)
    }

    /// A graph on `{0, …, n−1}`.
    pub fn on_naturals(n: usize, edges: &[(usize, usize)]) -> Graph {
        let vs: Vec<Ordinal> = (0..n as u64).map(Ordinal::from).collect();
        let es: Vec<(Ordinal, Ordinal)> = edges.iter().map(|&(a, b)| (vs[a].clone(), vs[b].clone())).collect();
        Graph::new(&vs, &es).expect("edges between distinct vertices")
    }

    /// `G₀` on 4: every vertex joined to 3.
    pub fn g0() -> Graph {
        Graph::on_naturals(4, &[(0, 3), (1, 3), (2, 3)])
    }

    /// `G₁` on 3: the edges `{0,1}` and `{0,2}`.
    pub fn g1() -> Graph {
        Graph::on_naturals(3, &[(0, 1), (0, 2)])
    }

    fn index(&self, v: &Ordinal) -> usize {
        self.vertices.binary_search(v).expect("vertex of the graph")
    }

    pub fn vertices(&self) -> &[Ordinal] {
        &self.vertices
    }

    pub fn edges(&self) -> Vec<(Ordinal, Ordinal)> {
        self.edges.iter().map(|&(i, j)| (self.vertices[i].clone(), self.vertices[j].clone())).collect()
    }

    fn connected_from(&self, lo: usize) -> bool {
        let n = self.vertices.len();
        if lo + 1 >= n {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut comps = n - lo;
        for &(i, j) in &self.edges {
            if i >= lo {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                    comps -= 1;
                }
            }
        }
        comps == 1
    }

    pub fn is_connected(&self) -> bool {
        self.connected_from(0)
    }

    pub fn is_cycle_free(&self) -> bool {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j) in &self.edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    /// Cycle-free with every tail `G|_{[α, ∞)}` connected.
    pub fn is_good(&self) -> bool {
        let good = self.is_cycle_free() && (0..self.vertices.len()).all(|a| self.connected_from(a));
        if self.is_connected() {
            debug_assert_eq!(good, self.forbidden_configuration().is_none(), "good-graph characterization");
        }
        good
    }

    /// A copy of `G₁`: edges `{α,β}` and `{α,γ}` with `α < β < γ`.
    pub fn forbidden_configuration(&self) -> Option<(Ordinal, Ordinal, Ordinal)> {
        let mut up: BTreeMap<usize, usize> = BTreeMap::new();
        for &(i, j) in &self.edges {
            if let Some(&k) = up.get(&i) {
                let (b, c) = (k.min(j), k.max(j));
                return Some((self.vertices[i].clone(), self.vertices[b].clone(), self.vertices[c].clone()));
            }
            up.insert(i, j);
        }
        None
    }

    pub fn as_complex(&self) -> Complex {
        let tops: Vec<Vec<Ordinal>> = self.edges().into_iter().map(|(a, b)| vec![a, b]).collect();
        Complex::closure(&tops, &self.vertices)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "vertices": self.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "edges": self.edges().iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>(),
            "truncated": self.truncated,
        })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for v in &self.vertices {
            s.push_str(&format!("  \"{v}\";\n"));
        }
        for (a, b) in self.edges() {
            s.push_str(&format!("  \"{a}\" -- \"{b}\";\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// `⋃_{α<γ} Tr²(α,γ)`: every step of every walk from `γ` as an edge. For
/// finite `γ` the graph on `γ+1` is complete; otherwise only walks to the
/// window are followed and the graph is flagged truncated.
pub fn walk_graph(sys: &LadderSystem, gamma: &Ordinal, window: &[Ordinal]) -> Graph {
    let finite = gamma.to_u64();
    let targets: Vec<Ordinal> = match finite {
        Some(n) => (0..n).map(Ordinal::from).collect(),
        None => window.iter().filter(|a| *a < gamma).cloned().collect(),
    };
    let mut vs = vec![gamma.clone()];
    if let Some(n) = finite {
        vs.extend((0..n).map(Ordinal::from));
    }
    let mut edges = Vec::new();
    for a in &targets {
        let tr = upper_trace(sys, a, gamma);
        for w in tr.steps.windows(2) {
            edges.push((w[1].clone(), w[0].clone()));
        }
    }
    let mut g = Graph::new(&vs, &edges).expect("walk steps are distinct");
    g.truncated = finite.is_none();
    g
}

/// `{{α, min(C_γ \ (α+1))} | α < γ}` on `γ`; windowed and flagged truncated
/// for infinite `γ`.
pub fn elementary_good_graph(sys: &LadderSystem, gamma: &Ordinal, window: &[Ordinal]) -> Graph {
    let finite = gamma.to_u64();
    let sources: Vec<Ordinal> = match finite {
        Some(n) => (0..n).map(Ordinal::from).collect(),
        None => window.iter().filter(|a| *a < gamma).cloned().collect(),
    };
    let mut edges = Vec::new();
    for a in &sources {
        if let Some(b) = sys.next_above(gamma, a) {
            edges.push((a.clone(), b));
        }
    }
    let mut g = Graph::new(&sources, &edges).expect("ladder elements above α differ from α");
    g.truncated = finite.is_none();
    g
}

// ---------------------------------------------------------------------------
// Exhaustive check of the forbidden-configuration characterization.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub vertices: usize,
    pub graphs: u64,
    pub connected: u64,
    pub good: u64,
    /// Edge mask of the first graph on which the two conditions differ.
    pub counterexample: Option<u64>,
}

/// Runs over every graph on `{0, …, n−1}` and compares, on connected ones,
/// goodness checked from the definition with the absence of `G₁`.
pub fn forbidden_configuration_exhaustive(n: usize) -> ExhaustiveReport {
    assert!((1..=8).contains(&n), "exhaustive runs cover 1 to 8 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let e = pairs.len();
    let full: u32 = (1u32 << n) - 1;
    let mut adj = [0u32; 8];
    let mut edges = 0usize;
    let mut report = ExhaustiveReport { vertices: n, graphs: 0, connected: 0, good: 0, counterexample: None };
    let reach = |adj: &[u32; 8], set: u32| -> bool {
        let start = set & set.wrapping_neg();
        let mut seen = start;
        loop {
            let mut next = seen;
            let mut bits = seen;
            while bits != 0 {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= adj[v] & set;
            }
            if next == seen {
                return seen == set;
            }
            seen = next;
        }
    };
    for i in 0u64..(1u64 << e) {
        if i > 0 {
            let (a, b) = pairs[i.trailing_zeros() as usize];
            let added = adj[a] >> b & 1 == 0;
            adj[a] ^= 1 << b;
            adj[b] ^= 1 << a;
            if added {
                edges += 1;
            } else {
                edges -= 1;
            }
        }
        report.graphs += 1;
        if !reach(&adj, full) {
            continue;
        }
        report.connected += 1;
        let cycle_free = edges + 1 == n;
        let good = cycle_free && (1..n).all(|a| reach(&adj, full & !((1u32 << a) - 1)));
        let no_g1 = (0..n).all(|v| (adj[v] >> (v + 1)).count_ones() <= 1);
        report.good += good as u64;
        if good != no_g1 && report.counterexample.is_none() {
            report.counterexample = Some(i ^ (i >> 1));
        }
    }
    report
}
