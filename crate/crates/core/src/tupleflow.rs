//! The ordered-tuple automaton over cover vertices.
//!
//! Starting from the tuple of all cover states, new tuples are reached by
//! reading a symbol `a`: the successor of tuple `i` is the set `f(i, a)` of
//! terminal states of `a`-edges leaving `{i}`. An edge into a strictly
//! smaller singleton additionally requires at least two `a`-edges out of
//! `{i}` (a genuine merge). Trimming to the bi-essential part yields the
//! graph whose size-`k` components present the uniformly separated points
//! with exactly `k` cover preimages; the shape of that graph decides the
//! AFT, PET and near-Markov properties.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::fischer::FischerCover;
use crate::presentation::SymbolicPresentation;
use crate::{Error, Result};

/// An ordered tuple `i1 < i2 < … < ik` of cover-state indices, stored as a
/// bitmask (ascending bit order matches the required entry order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleVertex {
    bits: u64,
}

impl TupleVertex {
    pub fn from_entries(entries: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        let mut last = None;
        for &e in entries {
            if e >= crate::MAX_STATES {
                return Err(Error::TooManyStates(crate::MAX_STATES));
            }
            if let Some(prev) = last {
                if e <= prev {
                    return Err(Error::Internal {
                        stage: "tupleflow",
                        detail: "tuple entries must be strictly increasing".into(),
                    });
                }
            }
            last = Some(e);
            bits |= 1u64 << e;
        }
        if bits == 0 {
            return Err(Error::Internal { stage: "tupleflow", detail: "empty tuple".into() });
        }
        Ok(TupleVertex { bits })
    }

    pub fn from_mask(bits: u64) -> Self {
        debug_assert!(bits != 0);
        TupleVertex { bits }
    }

    pub fn mask(&self) -> u64 {
        self.bits
    }

    /// `|i|`: the number of entries.
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The entries in increasing order (0-based state indices).
    pub fn entries(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut m = self.bits;
        while m != 0 {
            out.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        out
    }

    pub fn contains(&self, state: usize) -> bool {
        state < 64 && self.bits >> state & 1 == 1
    }

    /// Position (0-based) of `state` within the tuple, if present.
    pub fn position(&self, state: usize) -> Option<usize> {
        if !self.contains(state) {
            return None;
        }
        Some((self.bits & ((1u64 << state) - 1)).count_ones() as usize)
    }

    /// Renders `[i1 i2 ... ik]` with 1-based state numbers.
    pub fn display(&self) -> String {
        let parts: Vec<String> = self.entries().iter().map(|e| (e + 1).to_string()).collect();
        format!("[{}]", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TupleEdge {
    pub src: usize,
    pub dst: usize,
    pub sym: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    Raw,
    Trimmed,
}

/// One size component: the vertices of size `k` with their integer
/// adjacency matrix (counting parallel edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleLevel {
    pub k: usize,
    /// Indices into the parent graph's vertex list.
    pub vertices: Vec<usize>,
    /// Adjacency of the induced subgraph, in `vertices` order.
    pub adjacency: Vec<Vec<u64>>,
}

/// The tuple automaton, raw or trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleGraph {
    stage: Stage,
    vertices: Vec<TupleVertex>,
    edges: Vec<TupleEdge>,
    levels: Vec<TupleLevel>,
}

impl TupleGraph {
    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn vertices(&self) -> &[TupleVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[TupleEdge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_index(&self, v: TupleVertex) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    /// Size components in decreasing `k`, nonempty ones only.
    pub fn levels(&self) -> &[TupleLevel] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> Option<&TupleLevel> {
        self.levels.iter().find(|l| l.k == k)
    }

    /// Edges within the size-`k` component.
    pub fn level_edges(&self, k: usize) -> Vec<TupleEdge> {
        self.edges
            .iter()
            .filter(|e| self.vertices[e.src].len() == k && self.vertices[e.dst].len() == k)
            .copied()
            .collect()
    }

    /// The unique edge of the deterministic tuple automaton leaving `src`
    /// with label `sym`, if present.
    pub fn edge_from(&self, src: usize, sym: usize) -> Option<TupleEdge> {
        self.edges.iter().find(|e| e.src == src && e.sym == sym).copied()
    }

    pub fn render_edge(&self, e: &TupleEdge, cover: &SymbolicPresentation) -> String {
        format!(
            "{} -{}-> {}",
            self.vertices[e.src].display(),
            cover.symbol_name(e.sym),
            self.vertices[e.dst].display()
        )
    }
}

/// Classification flags read off the trimmed tuple graph, with a witness
/// edge for each negative answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftClassReport {
    pub is_aft: bool,
    pub is_pet: bool,
    pub is_near_markov: bool,
    /// For PET covers, the exact multiplicity spectrum (size classes with
    /// a genuine cycle); otherwise the nonempty size classes of the
    /// trimmed graph, a bound on the uniformly separated spectrum.
    pub multicard: BTreeSet<usize>,
    pub multicard_exact: bool,
    pub aft_witness: Option<String>,
    pub pet_witness: Option<String>,
    pub near_markov_witness: Option<String>,
}

/// Per-level genuineness verdicts: for every same-size edge lying on a
/// cycle, whether the shortest cycle through it tracks a point with
/// exactly k preimages.
///
/// The count is never below the size (a constant-size closed walk moves
/// its tokens injectively, so they trace distinct preimages); a larger
/// count marks the cycle as a tracking-closed union of preimage orbits of
/// a higher-multiplicity point.
struct LevelVerdicts {
    k: usize,
    genuine_vertices: BTreeSet<usize>,
    spurious_vertices: BTreeSet<usize>,
    spurious_edges: Vec<TupleEdge>,
    has_genuine_cycle: bool,
}

fn level_verdicts(cover: &FischerCover, g: &TupleGraph) -> Vec<LevelVerdicts> {
    let p = cover.presentation();
    let mut out = Vec::new();
    for level in &g.levels {
        if level.k < 2 {
            continue;
        }
        let in_level: Vec<TupleEdge> = g.level_edges(level.k);
        let mut v = LevelVerdicts {
            k: level.k,
            genuine_vertices: BTreeSet::new(),
            spurious_vertices: BTreeSet::new(),
            spurious_edges: Vec::new(),
            has_genuine_cycle: false,
        };
        for e in &in_level {
            let Some(cycle) = shortest_cycle_through(&in_level, e) else { continue };
            let word: Vec<usize> = cycle.iter().map(|c| c.sym).collect();
            let (count, _) = p.periodic_fiber(&word);
            debug_assert!(count >= level.k);
            let verts = cycle.iter().flat_map(|c| [c.src, c.dst]);
            if count == level.k {
                v.genuine_vertices.extend(verts);
                v.has_genuine_cycle = true;
            } else {
                v.spurious_vertices.extend(verts);
                v.spurious_edges.push(*e);
            }
        }
        out.push(v);
    }
    out
}

/// Looks for a same-size edge on a path from a genuinely k-fold cycle to
/// a sub-union cycle; such a path is exactly a failure of the k-fold
/// multiplicity set to be closed.
fn spurious_feed_edge(g: &TupleGraph, verdicts: &[LevelVerdicts]) -> Option<TupleEdge> {
    for v in verdicts {
        if v.genuine_vertices.is_empty() || v.spurious_vertices.is_empty() {
            continue;
        }
        if let Some(&shared) = v.genuine_vertices.intersection(&v.spurious_vertices).next() {
            return v.spurious_edges.iter().find(|e| e.src == shared || e.dst == shared).copied();
        }
        // BFS from the genuine region within the level; touching the
        // spurious region witnesses the closure failure.
        let in_level: Vec<TupleEdge> = g.level_edges(v.k);
        let mut frontier: VecDeque<usize> = v.genuine_vertices.iter().copied().collect();
        let mut seen: BTreeSet<usize> = v.genuine_vertices.clone();
        while let Some(x) = frontier.pop_front() {
            for e in in_level.iter().filter(|e| e.src == x) {
                if v.spurious_vertices.contains(&e.dst) {
                    return Some(*e);
                }
                if seen.insert(e.dst) {
                    frontier.push_back(e.dst);
                }
            }
        }
    }
    None
}

/// The trimmed graph with sub-union cycle edges removed and the result
/// re-trimmed. The full graph stays the object of record; this is the
/// graph the per-k skew matrices and the multiplicity spectrum read from.
pub fn prune_spurious(cover: &FischerCover, g: &TupleGraph) -> TupleGraph {
    let verdicts = level_verdicts(cover, g);
    let drop: BTreeSet<TupleEdge> =
        verdicts.iter().flat_map(|v| v.spurious_edges.iter().copied()).collect();
    if drop.is_empty() {
        return g.clone();
    }
    let kept: Vec<TupleEdge> = g.edges.iter().filter(|e| !drop.contains(e)).copied().collect();
    let pruned = finish_graph(Stage::Trimmed, g.vertices.clone(), kept);
    trim_tuple_graph(&pruned)
}

/// Shortest cycle through `edge` within the given edge set, as an edge
/// sequence starting with `edge`; `None` when the edge lies on no cycle.
fn shortest_cycle_through(edges: &[TupleEdge], edge: &TupleEdge) -> Option<Vec<TupleEdge>> {
    if edge.dst == edge.src {
        return Some(vec![*edge]);
    }
    // BFS from edge.dst back to edge.src.
    let mut pred: BTreeMap<usize, TupleEdge> = BTreeMap::new();
    let mut frontier = VecDeque::from([edge.dst]);
    let mut seen = BTreeSet::from([edge.dst]);
    while let Some(v) = frontier.pop_front() {
        for e in edges.iter().filter(|e| e.src == v) {
            if !seen.insert(e.dst) {
                continue;
            }
            pred.insert(e.dst, *e);
            if e.dst == edge.src {
                let mut path = vec![*edge];
                let mut tail = Vec::new();
                let mut cur = edge.src;
                while cur != edge.dst {
                    let pe = pred[&cur];
                    tail.push(pe);
                    cur = pe.src;
                }
                tail.reverse();
                path.extend(tail);
                return Some(path);
            }
            frontier.push_back(e.dst);
        }
    }
    None
}

/// `f(i, a)`: the set of terminal states of `a`-labeled cover edges whose
/// initial state lies in `{i}`. Returned as sorted state indices.
pub fn successor(cover: &SymbolicPresentation, i: &TupleVertex, sym: usize) -> Vec<usize> {
    let mut out = BTreeSet::new();
    for e in cover.edges_by_symbol(sym) {
        if i.contains(e.src) {
            out.insert(e.dst);
        }
    }
    out.into_iter().collect()
}

/// Builds the raw tuple graph: vertex sets grown from the full tuple along
/// edges satisfying both edge conditions, to the fixpoint.
pub fn build_tuple_graph(cover: &FischerCover) -> Result<TupleGraph> {
    let p = cover.presentation();
    let n = p.state_count();
    if n == 0 {
        return Err(Error::Precondition { stage: "tupleflow", detail: "empty cover".into() });
    }
    let masks = p.target_masks()?;
    let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut ids: BTreeMap<u64, usize> = BTreeMap::new();
    let mut vertices: Vec<TupleVertex> = Vec::new();
    let mut edges: Vec<TupleEdge> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(full, 0);
    vertices.push(TupleVertex::from_mask(full));
    queue.push_back(0usize);
    while let Some(vi) = queue.pop_front() {
        let i = vertices[vi];
        for sym in 0..p.alphabet().len() {
            let mut img = 0u64;
            let mut sources = 0usize;
            let mut m = i.mask();
            while m != 0 {
                let s = m.trailing_zeros() as usize;
                m &= m - 1;
                let t = masks[sym][s];
                if t != 0 {
                    // The cover is right-resolving, so each source
                    // contributes at most one a-edge.
                    debug_assert_eq!(t.count_ones(), 1);
                    sources += 1;
                    img |= t;
                }
            }
            if img == 0 {
                continue;
            }
            // Condition on merges into singletons: a size-drop to 1 needs
            // at least two merging edges.
            if img.count_ones() == 1 && i.len() > 1 && sources < 2 {
                continue;
            }
            let id = *ids.entry(img).or_insert_with(|| {
                vertices.push(TupleVertex::from_mask(img));
                queue.push_back(vertices.len() - 1);
                vertices.len() - 1
            });
            edges.push(TupleEdge { src: vi, dst: id, sym });
        }
    }
    Ok(finish_graph(Stage::Raw, vertices, edges))
}

/// Deletes vertices lacking an incoming or outgoing edge until stable; the
/// maximal bi-essential subgraph is unique, so deletion order is
/// irrelevant. An empty result is a valid outcome (injective cover).
pub fn trim_tuple_graph(g: &TupleGraph) -> TupleGraph {
    let mut alive = vec![true; g.vertices.len()];
    loop {
        let mut indeg = vec![0usize; g.vertices.len()];
        let mut outdeg = vec![0usize; g.vertices.len()];
        for e in &g.edges {
            if alive[e.src] && alive[e.dst] {
                outdeg[e.src] += 1;
                indeg[e.dst] += 1;
            }
        }
        let mut changed = false;
        for v in 0..g.vertices.len() {
            if alive[v] && (indeg[v] == 0 || outdeg[v] == 0) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let keep: Vec<usize> = (0..g.vertices.len()).filter(|&v| alive[v]).collect();
    let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let vertices: Vec<TupleVertex> = keep.iter().map(|&v| g.vertices[v]).collect();
    let edges: Vec<TupleEdge> = g
        .edges
        .iter()
        .filter(|e| alive[e.src] && alive[e.dst])
        .map(|e| TupleEdge { src: pos[&e.src], dst: pos[&e.dst], sym: e.sym })
        .collect();
    finish_graph(Stage::Trimmed, vertices, edges)
}

/// Canonicalizes vertex order (size descending, then entries
/// lexicographic) and computes the size components.
fn finish_graph(stage: Stage, vertices: Vec<TupleVertex>, edges: Vec<TupleEdge>) -> TupleGraph {
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(vertices[v].len()), vertices[v].entries()));
    let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let vertices: Vec<TupleVertex> = order.iter().map(|&v| vertices[v]).collect();
    let mut edges: Vec<TupleEdge> = edges
        .into_iter()
        .map(|e| TupleEdge { src: pos[&e.src], dst: pos[&e.dst], sym: e.sym })
        .collect();
    edges.sort();
    let mut levels = Vec::new();
    let sizes: BTreeSet<usize> = vertices.iter().map(|v| v.len()).collect();
    for &k in sizes.iter().rev() {
        let vs: Vec<usize> = (0..vertices.len()).filter(|&v| vertices[v].len() == k).collect();
        let index: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adjacency = vec![vec![0u64; vs.len()]; vs.len()];
        for e in &edges {
            if let (Some(&i), Some(&j)) = (index.get(&e.src), index.get(&e.dst)) {
                adjacency[i][j] += 1;
            }
        }
        levels.push(TupleLevel { k, vertices: vs, adjacency });
    }
    TupleGraph { stage, vertices, edges, levels }
}

/// Reads the classification off a trimmed tuple graph.
///
/// * AFT holds exactly when the cover is left-closing (no recurrent
///   merging pair): a merge is two distinct preimages becoming forward
///   asymptotic. The witness is the merging tuple edge when the merge is
///   visible in the trimmed graph (more same-labeled cover edges leave
///   the tuple than the target has entries; the singleton drop is the
///   special case), and the merging state pair itself otherwise - a merge
///   behind a stranded tuple target never reaches the trimmed graph.
/// * PET additionally requires every edge to stay within one size, and
///   no genuine size-k flow reaching a cycle whose point has more than k
///   preimages: a size-k cycle can track a k-element union of preimage
///   orbits of a higher-multiplicity point, and a same-size path from a
///   genuinely k-fold cycle into such a union is exactly a failure of the
///   k-fold multiplicity set to be closed.
/// * Near Markov additionally requires every size-k component (k ≥ 2) to
///   be a disjoint union of simple cycles.
///
/// An empty graph means the cover is injective on all recurrent behavior:
/// every flag holds and the multiplicity spectrum is empty.
pub fn classify(cover: &FischerCover, g: &TupleGraph) -> Result<ShiftClassReport> {
    if g.stage != Stage::Trimmed {
        return Err(Error::Precondition { stage: "tupleflow", detail: "classify requires a trimmed graph".into() });
    }
    let p = cover.presentation();
    let merging_pair = crate::fischer::left_closing_witness(p);
    let is_aft = merging_pair.is_none();
    let aft_tuple_edge = g.edges.iter().find(|e| {
        let sources = g.vertices[e.src]
            .entries()
            .iter()
            .filter(|&&s| p.edges_by_symbol(e.sym).any(|edge| edge.src == s))
            .count();
        sources > g.vertices[e.dst].len()
    });
    let aft_witness = merging_pair.as_ref().map(|w| match aft_tuple_edge {
        Some(e) => g.render_edge(e, p),
        None => format!("merging pair ({}, {}) -{}-> {}", w.left, w.right, w.symbol, w.target),
    });
    let verdicts = level_verdicts(cover, g);
    let pet_edge = g
        .edges
        .iter()
        .find(|e| g.vertices[e.src].len() != g.vertices[e.dst].len())
        .copied()
        .or_else(|| spurious_feed_edge(g, &verdicts));
    let pet_edge = pet_edge.as_ref();
    let is_pet = is_aft && pet_edge.is_none();
    let pet_witness = pet_edge
        .map(|e| g.render_edge(e, p))
        .or_else(|| if is_aft { None } else { aft_witness.clone() });
    let mut near_markov_witness = None;
    let is_near_markov = is_pet && {
        let mut ok = true;
        'levels: for level in &g.levels {
            if level.k < 2 {
                continue;
            }
            for (li, &v) in level.vertices.iter().enumerate() {
                let outdeg: u64 = level.adjacency[li].iter().sum();
                let indeg: u64 = level.adjacency.iter().map(|row| row[li]).sum();
                if outdeg != 1 || indeg != 1 {
                    let extra = g
                        .edges
                        .iter()
                        .filter(|e| e.src == v || e.dst == v)
                        .nth(1)
                        .or_else(|| g.edges.iter().find(|e| e.src == v || e.dst == v));
                    near_markov_witness = extra.map(|e| g.render_edge(e, p));
                    ok = false;
                    break 'levels;
                }
            }
        }
        ok
    };
    if !is_pet && near_markov_witness.is_none() {
        near_markov_witness = pet_witness.clone();
    }
    // For PET covers a size class enters the spectrum only on the
    // strength of a genuine cycle (sub-union cycles track points counted
    // at a higher size), and the census oracle verifies the result. For
    // the rest the spectrum is reported as the raw nonempty size classes
    // of the graph, a bound on the uniformly separated spectrum.
    let multicard: BTreeSet<usize> = if is_pet {
        verdicts.iter().filter(|v| v.has_genuine_cycle).map(|v| v.k).collect()
    } else {
        g.levels.iter().filter(|l| l.k >= 2 && !l.vertices.is_empty()).map(|l| l.k).collect()
    };
    Ok(ShiftClassReport {
        is_aft,
        is_pet,
        is_near_markov,
        multicard,
        multicard_exact: is_pet,
        aft_witness,
        pet_witness,
        near_markov_witness,
    })
}
