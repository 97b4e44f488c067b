//! Skewing permutations on the size-k tuple components and the matrices
//! over `Z_+ S_k` they assemble into.
//!
//! For an edge `E` from tuple `i` to tuple `j` labeled `a` in a size-k
//! component, `τ(E)` is the unique permutation with a cover `a`-edge from
//! `i_t` to `j_{τ(t)}` for every position `t`; right-resolving makes it
//! total and unique. The matrix `B_k(i, j)` collects `τ(E)` over the edges
//! from `i` to `j`; the entrywise augmentation (multiset size) recovers the
//! integer adjacency.
//!
//! Composition follows the skew-product convention: traversing edges
//! `E_1 … E_L` in order gives `τ(E_L) ∘ … ∘ τ(E_1)`, later edges composing
//! on the left. `opp` (entrywise inversion) converts to the other skew
//! convention.

use std::fmt;

use serde::Serialize;

use crate::fischer::FischerCover;
use crate::tupleflow::{TupleEdge, TupleGraph};
use crate::{Error, Result};

/// A permutation of `{1, …, k}`, stored as 0-based images.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation { images: (0..k).collect() }
    }

    /// Builds from 0-based images; must be a bijection.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x >= k || seen[x] {
                return Err(Error::Internal { stage: "skew", detail: "images are not a bijection".into() });
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, t: usize) -> usize {
        self.images[t]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation { images: (0..self.degree()).map(|t| self.images[other.images[t]]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (t, &x) in self.images.iter().enumerate() {
            images[x] = t;
        }
        Permutation { images }
    }

    /// Cycles in increasing order of least element, fixed points included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut t = self.images[start];
            while t != start {
                seen[t] = true;
                cycle.push(t);
                t = self.images[t];
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted multiset of cycle lengths (including fixed points).
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        t.sort_unstable();
        t
    }

    /// 1-based one-line notation, for machine output.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x + 1).collect()
    }

    /// Cycle notation with 1-based points; `id` for the identity.
    pub fn cycle_notation(&self) -> String {
        if self.is_identity() {
            return "id".to_string();
        }
        let mut out = String::new();
        for cycle in self.cycles() {
            if cycle.len() == 1 {
                continue;
            }
            out.push('(');
            for (idx, t) in cycle.iter().enumerate() {
                if idx > 0 {
                    out.push(' ');
                }
                out.push_str(&(t + 1).to_string());
            }
            out.push(')');
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation())
    }
}

/// Square matrix over `Z_+ S_k`: each cell holds a sorted multiset of
/// permutations of common degree `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingMatrix {
    k: usize,
    dim: usize,
    entries: Vec<Vec<Permutation>>,
}

impl GroupRingMatrix {
    pub fn new(k: usize, dim: usize, mut entries: Vec<Vec<Permutation>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Internal { stage: "skew", detail: "entry count mismatch".into() });
        }
        for cell in &mut entries {
            for p in cell.iter() {
                if p.degree() != k {
                    return Err(Error::Internal { stage: "skew", detail: "mixed permutation degrees".into() });
                }
            }
            cell.sort();
        }
        Ok(GroupRingMatrix { k, dim, entries })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell(&self, i: usize, j: usize) -> &[Permutation] {
        &self.entries[i * self.dim + j]
    }

    /// Entrywise multiset sizes; equals the integer adjacency of the
    /// size-k component.
    pub fn augmentation(&self) -> Vec<Vec<u64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.cell(i, j).len() as u64).collect())
            .collect()
    }

    /// Entrywise inversion of every permutation, in place in its cell.
    pub fn opp(&self) -> GroupRingMatrix {
        let entries = self
            .entries
            .iter()
            .map(|cell| {
                let mut c: Vec<Permutation> = cell.iter().map(|p| p.inverse()).collect();
                c.sort();
                c
            })
            .collect();
        GroupRingMatrix { k: self.k, dim: self.dim, entries }
    }

    /// Renders cells as `id + (1 2 3)`-style sums, row by row.
    pub fn render_cells(&self) -> Vec<Vec<String>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let cell = self.cell(i, j);
                        if cell.is_empty() {
                            "0".to_string()
                        } else {
                            cell.iter().map(|p| p.cycle_notation()).collect::<Vec<_>>().join(" + ")
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Machine form of one multiplicity level: `B̄_k`, `B_k`, and `opp(B_k)`.
#[derive(Debug, Clone, Serialize)]
pub struct SkewLevelReport {
    pub k: usize,
    pub vertices: Vec<String>,
    pub b_bar: Vec<Vec<u64>>,
    /// Per cell, permutations in 1-based one-line notation.
    pub b_k: Vec<Vec<Vec<Vec<usize>>>>,
    pub b_k_cycles: Vec<Vec<String>>,
    pub b_k_opp_cycles: Vec<Vec<String>>,
}

/// `τ(E)` for an edge of a size-k component: position `t` maps to the
/// position in the target tuple of the unique `a`-edge out of `i_t`.
pub fn skew_permutation(cover: &FischerCover, g: &TupleGraph, e: &TupleEdge) -> Result<Permutation> {
    let p = cover.presentation();
    let i = g.vertices()[e.src];
    let j = g.vertices()[e.dst];
    if i.len() != j.len() {
        return Err(Error::Precondition {
            stage: "skew",
            detail: format!("edge {} changes tuple size", g.render_edge(e, p)),
        });
    }
    let mut images = Vec::with_capacity(i.len());
    for s in i.entries() {
        let target = p
            .edges_by_symbol(e.sym)
            .find(|edge| edge.src == s)
            .map(|edge| edge.dst)
            .ok_or_else(|| Error::Internal {
                stage: "skew",
                detail: format!(
                    "no {}-edge out of cover state {} along {}",
                    p.symbol_name(e.sym),
                    p.state_name(s),
                    g.render_edge(e, p)
                ),
            })?;
        let pos = j.position(target).ok_or_else(|| Error::Internal {
            stage: "skew",
            detail: format!("target {} not in tuple {}", p.state_name(target), j.display()),
        })?;
        images.push(pos);
    }
    Permutation::from_images(images)
}

/// Assembles `B_k` over the size-k component of a trimmed tuple graph.
pub fn build_bk(cover: &FischerCover, g: &TupleGraph, k: usize) -> Result<GroupRingMatrix> {
    let level = g.level(k).ok_or_else(|| Error::Precondition {
        stage: "skew",
        detail: format!("no size-{k} component: k is not in the multiplicity spectrum"),
    })?;
    let dim = level.vertices.len();
    let index: std::collections::BTreeMap<usize, usize> =
        level.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut entries: Vec<Vec<Permutation>> = vec![Vec::new(); dim * dim];
    for e in g.level_edges(k) {
        let i = index[&e.src];
        let j = index[&e.dst];
        entries[i * dim + j].push(skew_permutation(cover, g, &e)?);
    }
    GroupRingMatrix::new(k, dim, entries)
}

/// Weight of a directed cycle `E_1 … E_L`: `τ(E_L) ∘ … ∘ τ(E_1)`.
///
/// A base cycle of length `L` with weight `ρ` lifts to one preimage orbit
/// of length `L·c` per cycle of `ρ` of length `c`.
pub fn cycle_weight(cover: &FischerCover, g: &TupleGraph, cycle: &[TupleEdge]) -> Result<Permutation> {
    if cycle.is_empty() {
        return Err(Error::Precondition { stage: "skew", detail: "empty cycle".into() });
    }
    for pair in cycle.windows(2) {
        if pair[0].dst != pair[1].src {
            return Err(Error::Precondition { stage: "skew", detail: "edges do not chain".into() });
        }
    }
    if cycle.last().unwrap().dst != cycle[0].src {
        return Err(Error::Precondition { stage: "skew", detail: "cycle does not close".into() });
    }
    let mut acc = Permutation::identity(g.vertices()[cycle[0].src].len());
    for e in cycle {
        acc = skew_permutation(cover, g, e)?.compose(&acc);
    }
    Ok(acc)
}

/// Builds the per-level machine reports for every k in the multiplicity
/// spectrum of a trimmed PET-compatible graph.
pub fn skew_level_reports(cover: &FischerCover, g: &TupleGraph) -> Result<Vec<SkewLevelReport>> {
    let mut out = Vec::new();
    for level in g.levels() {
        if level.k < 2 {
            continue;
        }
        let bk = build_bk(cover, g, level.k)?;
        let opp = bk.opp();
        out.push(SkewLevelReport {
            k: level.k,
            vertices: level.vertices.iter().map(|&v| g.vertices()[v].display()).collect(),
            b_bar: level.adjacency.clone(),
            b_k: (0..bk.dim())
                .map(|i| {
                    (0..bk.dim())
                        .map(|j| bk.cell(i, j).iter().map(|p| p.one_line()).collect())
                        .collect()
                })
                .collect(),
            b_k_cycles: bk.render_cells(),
            b_k_opp_cycles: opp.render_cells(),
        });
    }
    Ok(out)
}
