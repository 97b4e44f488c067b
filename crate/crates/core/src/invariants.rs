//! Exact integer invariants: Smith normal form, Bowen–Franks group,
//! `det(I-A)`, the Franks flow-equivalence decision for irreducible SFTs,
//! and the bipartite multiplicity graph with the near-Markov decision.
//!
//! All arithmetic is exact over arbitrary-precision integers. The
//! determinant is computed by fraction-free (Bareiss) elimination,
//! independently of the Smith normal form, so `|det|` versus the product
//! of invariant factors is a genuine cross-check.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::fischer::FischerCover;
use crate::skew::cycle_weight;
use crate::tupleflow::{ShiftClassReport, TupleEdge, TupleGraph};
use crate::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let data = rows.into_iter().flatten().map(BigInt::from).collect();
        IntMatrix { rows: r, cols: c, data }
    }

    /// `I - A` for a nonnegative adjacency matrix.
    pub fn i_minus(adjacency: &[Vec<u64>]) -> Self {
        let n = adjacency.len();
        let mut m = Self::identity(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] -= BigInt::from(adjacency[i][j]);
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += q * row[b]
    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let add = q * &self[(b, j)];
            self[(a, j)] += add;
        }
    }

    /// col[a] += q * col[b]
    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let add = q * &self[(i, b)];
            self[(i, a)] += add;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self[(a, j)].clone();
            self[(a, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, nonnegative,
/// with each diagonal entry dividing the next.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Checks all postconditions against the original matrix.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        if self.u.mul(a).mul(&self.v) != self.d {
            return false;
        }
        if det_bareiss(&self.u).abs() != BigInt::one() || det_bareiss(&self.v).abs() != BigInt::one() {
            return false;
        }
        let m = self.d.rows.min(self.d.cols);
        for i in 0..self.d.rows {
            for j in 0..self.d.cols {
                if i != j && !self.d[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        for i in 0..m {
            if self.d[(i, i)].is_negative() {
                return false;
            }
        }
        for i in 0..m.saturating_sub(1) {
            let (a, b) = (&self.d[(i, i)], &self.d[(i + 1, i + 1)]);
            if a.is_zero() && !b.is_zero() {
                return false;
            }
            if !a.is_zero() && !(b % a).is_zero() {
                return false;
            }
        }
        true
    }

    /// Diagonal entries, one per `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Smith normal form by row/column reduction with least-absolute-value
/// pivoting, exact arithmetic throughout.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let mut d = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut v = IntMatrix::identity(a.cols);
    let m = a.rows.min(a.cols);
    let mut t = 0;
    while t < m {
        // Least-absolute-value pivot in the remaining block.
        let pivot = {
            let mut best: Option<(usize, usize)> = None;
            for i in t..d.rows {
                for j in t..d.cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    match best {
                        Some(b) if d[b].magnitude() <= d[(i, j)].magnitude() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            best
        };
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        // Clear row and column t; the pivot may shrink while remainders
        // appear, so iterate.
        loop {
            let mut dirty = false;
            for i in t + 1..d.rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &d[(t, t)]);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !d[(i, t)].is_zero() {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..d.cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &d[(t, t)]);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !d[(t, j)].is_zero() {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        t += 1;
    }
    // Zero out any remaining diagonal positions are already zero; normalize
    // signs, then fix the divisibility chain.
    for i in 0..m {
        if d[(i, i)].is_negative() {
            d.negate_row(i);
            u.negate_row(i);
        }
    }
    // diag(a, b) with a ∤ b: add col j to col i, then reduce the 2x2 block
    // again. Repeat to a fixpoint.
    loop {
        let mut fixed = true;
        for i in 0..m.saturating_sub(1) {
            let (di, dj) = (d[(i, i)].clone(), d[(i + 1, i + 1)].clone());
            let needs = if di.is_zero() { !dj.is_zero() } else { !(&dj % &di).is_zero() };
            if !needs {
                continue;
            }
            fixed = false;
            d.add_col(i, i + 1, &BigInt::one());
            v.add_col(i, i + 1, &BigInt::one());
            // Reduce the disturbed 2x2 block by gcd steps.
            loop {
                if d[(i + 1, i)].is_zero() && d[(i, i + 1)].is_zero() {
                    break;
                }
                if !d[(i + 1, i)].is_zero() {
                    if d[(i, i)].is_zero()
                        || (!d[(i + 1, i)].is_zero()
                            && d[(i + 1, i)].magnitude() < d[(i, i)].magnitude())
                    {
                        d.swap_rows(i, i + 1);
                        u.swap_rows(i, i + 1);
                    }
                    let q = -(&d[(i + 1, i)] / &d[(i, i)]);
                    d.add_row(i + 1, i, &q);
                    u.add_row(i + 1, i, &q);
                    if !d[(i + 1, i)].is_zero() {
                        d.swap_rows(i, i + 1);
                        u.swap_rows(i, i + 1);
                    }
                    continue;
                }
                let q = -(&d[(i, i + 1)] / &d[(i, i)]);
                d.add_col(i + 1, i, &q);
                v.add_col(i + 1, i, &q);
                if !d[(i, i + 1)].is_zero() {
                    d.swap_cols(i, i + 1);
                    v.swap_cols(i, i + 1);
                }
            }
            for x in [i, i + 1] {
                if d[(x, x)].is_negative() {
                    d.negate_row(x);
                    u.negate_row(x);
                }
            }
        }
        if fixed {
            break;
        }
    }
    SmithDecomposition { d, u, v }
}

/// Exact determinant by fraction-free Bareiss elimination.
pub fn det_bareiss(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows, a.cols, "determinant needs a square matrix");
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                Some(i) => {
                    m.swap_rows(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = num / &prev;
            }
            m[(i, k)] = BigInt::zero();
        }
        prev = m[(k, k)].clone();
    }
    sign * m[(n - 1, n - 1)].clone()
}

/// A finitely generated abelian group in invariant-factor form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    /// Factors ≥ 2, each dividing the next.
    pub invariant_factors: Vec<String>,
    pub free_rank: usize,
}

impl AbelianGroup {
    fn from_diagonal(diag: &[BigInt], ambient: usize) -> AbelianGroup {
        let factors: Vec<String> = diag
            .iter()
            .filter(|d| !d.is_zero() && d.abs() > BigInt::one())
            .map(|d| d.to_string())
            .collect();
        let zeros = diag.iter().filter(|d| d.is_zero()).count();
        // Rows beyond the diagonal length contribute free generators too
        // (cannot happen for square input, kept for completeness).
        let free_rank = zeros + ambient.saturating_sub(diag.len());
        AbelianGroup { invariant_factors: factors, free_rank }
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    /// `Z^r ⊕ Z/d1 ⊕ … ⊕ Z/dm`; `0` for the trivial group.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ⊕ ")
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Bowen–Franks data of an adjacency matrix: `cok(I-A)` and the exact
/// `det(I-A)` with its sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BowenFranks {
    pub group: AbelianGroup,
    pub det: String,
    pub sign: i8,
}

impl BowenFranks {
    pub fn det_bigint(&self) -> BigInt {
        self.det.parse().expect("det is a rendered integer")
    }
}

/// Computes the Bowen–Franks group from the Smith normal form of `I-A`
/// and the determinant by an independent fraction-free elimination.
pub fn bowen_franks(adjacency: &[Vec<u64>]) -> BowenFranks {
    let ia = IntMatrix::i_minus(adjacency);
    let snf = smith_normal_form(&ia);
    let group = AbelianGroup::from_diagonal(&snf.diagonal(), adjacency.len());
    let det = det_bareiss(&ia);
    let sign = match det.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    };
    BowenFranks { group, det: det.to_string(), sign }
}

/// Verdict of the Franks decision, with the compared invariants.
#[derive(Debug, Clone, Serialize)]
pub struct SftFeVerdict {
    pub equivalent: bool,
    pub left: BowenFranks,
    pub right: BowenFranks,
    pub left_trivial: bool,
    pub right_trivial: bool,
    pub explanation: String,
}

/// Single cycle (zero-entropy) check for an essential irreducible graph.
fn is_single_cycle(adjacency: &[Vec<u64>]) -> bool {
    adjacency.iter().all(|row| row.iter().sum::<u64>() == 1)
        && (0..adjacency.len()).all(|j| adjacency.iter().map(|row| row[j]).sum::<u64>() == 1)
}

/// Flow equivalence of irreducible SFTs: both single cycles → equivalent
/// (both mapping tori are circles); exactly one trivial → not; otherwise
/// Bowen–Franks group isomorphism plus equal determinant sign.
pub fn sft_flow_equivalent(a: &[Vec<u64>], b: &[Vec<u64>]) -> Result<SftFeVerdict> {
    for (name, m) in [("left", a), ("right", b)] {
        let adj: Vec<Vec<usize>> = m
            .iter()
            .map(|row| row.iter().enumerate().filter(|(_, &x)| x > 0).map(|(j, _)| j).collect())
            .collect();
        let essential = m.iter().enumerate().all(|(i, row)| {
            row.iter().sum::<u64>() > 0 && m.iter().map(|r| r[i]).sum::<u64>() > 0
        });
        if m.is_empty() || !essential || crate::graphutil::strongly_connected_witness(&adj).is_some() {
            return Err(Error::Precondition {
                stage: "sft-fe",
                detail: format!("{name} input must be an essential irreducible adjacency matrix"),
            });
        }
    }
    let (lt, rt) = (is_single_cycle(a), is_single_cycle(b));
    let left = bowen_franks(a);
    let right = bowen_franks(b);
    let (equivalent, explanation) = if lt && rt {
        (true, "both are single cycles; both mapping tori are circles".to_string())
    } else if lt != rt {
        (false, "exactly one side is a single cycle".to_string())
    } else {
        let groups = left.group == right.group;
        let signs = left.sign == right.sign;
        (
            groups && signs,
            format!(
                "Bowen–Franks groups {} ({} vs {}); det signs {} ({} vs {})",
                if groups { "agree" } else { "differ" },
                left.group.render(),
                right.group.render(),
                if signs { "agree" } else { "differ" },
                left.sign,
                right.sign
            ),
        )
    };
    Ok(SftFeVerdict { equivalent, left, right, left_trivial: lt, right_trivial: rt, explanation })
}

/// One left orbit attached to its image orbit with winding number `w`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MultiplicityEdge {
    /// Orbit length of the preimage orbit (diagnostic only).
    pub left_len: u64,
    /// `w = left_len / right_len`, the number of parallel edges.
    pub weight: u64,
}

/// The bipartite multiplicity graph: each right vertex (an orbit of the
/// image multiplicity set) with its attached left orbits. Only the
/// bipartite structure and the weights enter the isomorphism decision;
/// orbit lengths are diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityGraph {
    pub rights: Vec<MultiplicityRight>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MultiplicityRight {
    /// Orbit length of the image orbit (diagnostic only).
    pub right_len: u64,
    pub edges: Vec<MultiplicityEdge>,
}

impl MultiplicityGraph {
    pub fn is_empty(&self) -> bool {
        self.rights.is_empty()
    }

    /// Sorted multiset of per-right-vertex weight multisets; two graphs
    /// are isomorphic exactly when the forms agree, since every left
    /// vertex has a single target.
    fn canonical_form(&self) -> Vec<Vec<u64>> {
        let mut form: Vec<Vec<u64>> = self
            .rights
            .iter()
            .map(|r| {
                let mut ws: Vec<u64> = r.edges.iter().map(|e| e.weight).collect();
                ws.sort_unstable();
                ws
            })
            .collect();
        form.sort();
        form
    }
}

/// Bipartite multigraph isomorphism on weights and attachment only.
pub fn multiplicity_graph_iso(a: &MultiplicityGraph, b: &MultiplicityGraph) -> bool {
    a.canonical_form() == b.canonical_form()
}

/// Builds the multiplicity graph of a near-Markov cover from the trimmed
/// tuple graph: each simple cycle of a size-k component is an image orbit,
/// and the cycles of its weight permutation are the preimage orbits.
///
/// A size-k cycle whose point actually has more than k preimages is a
/// tracking-closed union of preimage orbits of a higher-multiplicity
/// orbit, not an image orbit of its own; those cycles are skipped (the
/// exact count comes from the word fiber, so this needs no bound).
pub fn multiplicity_graph(
    cover: &FischerCover,
    trimmed: &TupleGraph,
    class: &ShiftClassReport,
) -> Result<MultiplicityGraph> {
    if !class.is_near_markov {
        return Err(Error::Precondition {
            stage: "multiplicity-graph",
            detail: "cover is not near Markov".into(),
        });
    }
    let p = cover.presentation();
    let mut rights = Vec::new();
    for level in trimmed.levels() {
        if level.k < 2 {
            continue;
        }
        for cycle in disjoint_cycles(trimmed, &level.vertices) {
            let word: Vec<u16> = cycle.iter().map(|e| e.sym as u16).collect();
            let (true_count, _) = crate::oracle::count_preimages(p, &word);
            if true_count != level.k {
                continue;
            }
            let weight = cycle_weight(cover, trimmed, &cycle)?;
            let l = cycle.len() as u64;
            let mut edges: Vec<MultiplicityEdge> = weight
                .cycles()
                .iter()
                .map(|c| MultiplicityEdge { left_len: l * c.len() as u64, weight: c.len() as u64 })
                .collect();
            edges.sort();
            rights.push(MultiplicityRight { right_len: l, edges });
        }
    }
    rights.sort();
    Ok(MultiplicityGraph { rights })
}

/// Decomposes a component in which every vertex has in- and out-degree one
/// into its simple cycles, each starting at its least vertex.
fn disjoint_cycles(g: &TupleGraph, vertices: &[usize]) -> Vec<Vec<TupleEdge>> {
    let next: BTreeMap<usize, TupleEdge> = g
        .edges()
        .iter()
        .filter(|e| vertices.contains(&e.src) && vertices.contains(&e.dst))
        .map(|e| (e.src, *e))
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for &start in vertices {
        if seen.contains(&start) {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        loop {
            seen.insert(v);
            let e = next[&v];
            cycle.push(e);
            v = e.dst;
            if v == start {
                break;
            }
        }
        out.push(cycle);
    }
    out
}

/// The complete near-Markov invariant: Bowen–Franks data of the cover and
/// the multiplicity graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantTriple {
    pub bf: BowenFranks,
    pub mugraph: MultiplicityGraph,
}

pub fn near_markov_invariant(
    cover: &FischerCover,
    trimmed: &TupleGraph,
    class: &ShiftClassReport,
) -> Result<InvariantTriple> {
    let bf = bowen_franks(&cover.presentation().adjacency());
    let mugraph = multiplicity_graph(cover, trimmed, class)?;
    Ok(InvariantTriple { bf, mugraph })
}

/// Verdict of the near-Markov flow-equivalence decision.
#[derive(Debug, Clone, Serialize)]
pub struct NearMarkovFeVerdict {
    pub equivalent: bool,
    pub sft: SftFeVerdict,
    pub mugraph_iso: bool,
    pub left: InvariantTriple,
    pub right: InvariantTriple,
}

/// Flow equivalence of near-Markov shifts: the covers must be Franks
/// equivalent and the multiplicity graphs isomorphic.
pub fn near_markov_fe(
    left: (&FischerCover, &InvariantTriple),
    right: (&FischerCover, &InvariantTriple),
) -> Result<NearMarkovFeVerdict> {
    let sft = sft_flow_equivalent(
        &left.0.presentation().adjacency(),
        &right.0.presentation().adjacency(),
    )?;
    let mugraph_iso = multiplicity_graph_iso(&left.1.mugraph, &right.1.mugraph);
    Ok(NearMarkovFeVerdict {
        equivalent: sft.equivalent && mugraph_iso,
        sft,
        mugraph_iso,
        left: left.1.clone(),
        right: right.1.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf_of(rows: Vec<Vec<i64>>) -> SmithDecomposition {
        let a = IntMatrix::from_rows(rows);
        let s = smith_normal_form(&a);
        assert!(s.verify(&a), "postconditions must hold");
        s
    }

    fn diag_u64(s: &SmithDecomposition) -> Vec<u64> {
        s.diagonal().iter().map(|d| u64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn snf_diag_two_zero() {
        let s = snf_of(vec![vec![2, 0], vec![0, 0]]);
        assert_eq!(diag_u64(&s), vec![2, 0]);
    }

    #[test]
    fn snf_antidiagonal_swaps_to_identity() {
        let s = snf_of(vec![vec![0, -1], vec![-1, 0]]);
        assert_eq!(diag_u64(&s), vec![1, 1]);
    }

    #[test]
    fn snf_normalizes_sign() {
        let s = snf_of(vec![vec![-2]]);
        assert_eq!(diag_u64(&s), vec![2]);
    }

    #[test]
    fn snf_divisibility_chain() {
        let s = snf_of(vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(diag_u64(&s), vec![1, 6]);
        let s = snf_of(vec![vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 10]]);
        assert_eq!(diag_u64(&s), vec![2, 2, 60]);
    }

    #[test]
    fn bareiss_matches_cofactor_small() {
        let m = IntMatrix::from_rows(vec![vec![2, -1, 3], vec![0, 4, 1], vec![-2, 5, 0]]);
        // Cofactor expansion by hand: 2*(0-5) - (-1)*(0+2) + 3*(0+8) = 16.
        assert_eq!(det_bareiss(&m), BigInt::from(16));
    }

    #[test]
    fn bareiss_zero_determinant() {
        let m = IntMatrix::from_rows(vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(det_bareiss(&m), BigInt::zero());
    }

    #[test]
    fn bowen_franks_full_three_shift() {
        let bf = bowen_franks(&[vec![3]]);
        assert_eq!(bf.group.invariant_factors, vec!["2".to_string()]);
        assert_eq!(bf.group.free_rank, 0);
        assert_eq!(bf.det, "-2");
        assert_eq!(bf.sign, -1);
    }

    #[test]
    fn bowen_franks_full_two_shift_both_presentations() {
        for adj in [vec![vec![2]], vec![vec![1, 1], vec![1, 1]]] {
            let bf = bowen_franks(&adj);
            assert!(bf.group.is_trivial(), "{bf:?}");
            assert_eq!(bf.det, "-1");
        }
    }

    #[test]
    fn bowen_franks_even_cover() {
        let bf = bowen_franks(&[vec![1, 1], vec![1, 0]]);
        assert!(bf.group.is_trivial());
        assert_eq!(bf.det, "-1");
    }

    #[test]
    fn bowen_franks_single_cycle_group_is_z() {
        let bf = bowen_franks(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(bf.group.free_rank, 1);
        assert_eq!(bf.sign, 0);
        assert_eq!(bf.group.render(), "Z");
    }

    #[test]
    fn sft_fe_two_presentations_of_full_two_shift() {
        let v = sft_flow_equivalent(&[vec![2]], &[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(v.equivalent, "{}", v.explanation);
    }

    #[test]
    fn sft_fe_cycles_of_different_length() {
        let five = vec![
            vec![0, 1, 0, 0, 0],
            vec![0, 0, 1, 0, 0],
            vec![0, 0, 0, 1, 0],
            vec![0, 0, 0, 0, 1],
            vec![1, 0, 0, 0, 0],
        ];
        let v = sft_flow_equivalent(&five, &[vec![1]]).unwrap();
        assert!(v.equivalent);
        assert!(v.left_trivial && v.right_trivial);
    }

    #[test]
    fn sft_fe_distinguishes_two_and_three_shift() {
        let v = sft_flow_equivalent(&[vec![2]], &[vec![3]]).unwrap();
        assert!(!v.equivalent);
    }

    #[test]
    fn sft_fe_cycle_vs_full_shift() {
        let v = sft_flow_equivalent(&[vec![1]], &[vec![2]]).unwrap();
        assert!(!v.equivalent);
    }

    #[test]
    fn sft_fe_rejects_reducible() {
        let err = sft_flow_equivalent(&[vec![1, 1], vec![0, 1]], &[vec![2]]);
        assert!(err.is_err());
    }

    #[test]
    fn multiplicity_iso_on_weights_only() {
        let g1 = MultiplicityGraph {
            rights: vec![MultiplicityRight {
                right_len: 1,
                edges: vec![MultiplicityEdge { left_len: 2, weight: 2 }],
            }],
        };
        let g2 = MultiplicityGraph {
            rights: vec![MultiplicityRight {
                right_len: 5,
                edges: vec![MultiplicityEdge { left_len: 10, weight: 2 }],
            }],
        };
        assert!(multiplicity_graph_iso(&g1, &g2));
        let g3 = MultiplicityGraph {
            rights: vec![MultiplicityRight {
                right_len: 1,
                edges: vec![MultiplicityEdge { left_len: 3, weight: 3 }],
            }],
        };
        assert!(!multiplicity_graph_iso(&g1, &g3));
    }

    #[test]
    fn multiplicity_iso_unordered_pairs() {
        let mk = |ws: Vec<u64>| MultiplicityGraph {
            rights: ws
                .into_iter()
                .map(|w| MultiplicityRight {
                    right_len: 1,
                    edges: vec![MultiplicityEdge { left_len: w, weight: w }],
                })
                .collect(),
        };
        assert!(multiplicity_graph_iso(&mk(vec![1, 2]), &mk(vec![2, 1])));
    }
}
