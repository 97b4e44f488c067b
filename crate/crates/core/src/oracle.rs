//! Brute-force, definition-level computations used to differentially
//! validate the fast algorithms at desk scale: language sampling, periodic
//! preimage censuses, fiber products with the constant-to-one test, and
//! word-probed follower partitions.
//!
//! These are finite-scale checks; nothing here attempts unbounded
//! verification.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::fischer::FischerCover;
use crate::graphutil;
use crate::presentation::SymbolicPresentation;
use crate::skew::cycle_weight;
use crate::tupleflow::{ShiftClassReport, TupleGraph};
use crate::{Error, Result};

/// Default word-probe depth.
pub const DEFAULT_WORD_BOUND: usize = 8;
/// Default periodic-point period bound.
pub const DEFAULT_PERIOD_BOUND: usize = 6;

/// All words of each length up to a bound, as sorted symbol-id sequences.
/// Symbol ids are alphabet-sorted, so samples from presentations with equal
/// alphabets are directly comparable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSample {
    /// `by_length[l]` holds the words of length `l + 1`.
    pub by_length: Vec<BTreeSet<Vec<u16>>>,
}

impl LanguageSample {
    pub fn of_length(&self, len: usize) -> Option<&BTreeSet<Vec<u16>>> {
        self.by_length.get(len.checked_sub(1)?)
    }

    /// Every subword of a sampled word is sampled.
    pub fn is_factorial_closed(&self) -> bool {
        for l in 1..self.by_length.len() {
            for w in &self.by_length[l] {
                for start in 0..=1 {
                    let sub = w[start..start + l].to_vec();
                    if !self.by_length[l - 1].contains(&sub) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Enumerates all label words of length ≤ `max_len` readable along paths.
pub fn language(p: &SymbolicPresentation, max_len: usize) -> LanguageSample {
    let nsym = p.alphabet().len();
    // frontier: word -> set of end states, grown one symbol at a time.
    let mut frontier: BTreeMap<Vec<u16>, BTreeSet<usize>> = BTreeMap::new();
    frontier.insert(Vec::new(), (0..p.state_count()).collect());
    let mut by_length = Vec::with_capacity(max_len);
    let mut succ: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); nsym]; p.state_count()];
    for e in p.edges() {
        succ[e.src][e.sym].push(e.dst);
    }
    for _ in 0..max_len {
        let mut next: BTreeMap<Vec<u16>, BTreeSet<usize>> = BTreeMap::new();
        for (word, ends) in &frontier {
            for sym in 0..nsym {
                let mut targets = BTreeSet::new();
                for &s in ends {
                    targets.extend(succ[s][sym].iter().copied());
                }
                if targets.is_empty() {
                    continue;
                }
                let mut w = word.clone();
                w.push(sym as u16);
                next.insert(w, targets);
            }
        }
        by_length.push(next.keys().cloned().collect());
        frontier = next;
    }
    LanguageSample { by_length }
}

/// Exact equality of the factor languages of two presentations, by BFS
/// over pairs of subset-automaton states. Presentations with different
/// alphabets present different languages.
pub fn languages_equal_exact(p: &SymbolicPresentation, q: &SymbolicPresentation) -> Result<bool> {
    let pa: Vec<&str> = p.alphabet().iter().map(|s| s.name()).collect();
    let qa: Vec<&str> = q.alphabet().iter().map(|s| s.name()).collect();
    if pa != qa {
        return Ok(false);
    }
    let pm = p.target_masks()?;
    let qm = q.target_masks()?;
    let full = |n: usize| if n == 64 { !0u64 } else { (1u64 << n) - 1 };
    let step = |masks: &[Vec<u64>], set: u64, sym: usize| -> u64 {
        let mut out = 0u64;
        let mut m = set;
        while m != 0 {
            let s = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= masks[sym][s];
        }
        out
    };
    let start = (full(p.state_count()), full(q.state_count()));
    let mut seen = BTreeSet::from([start]);
    let mut work = vec![start];
    while let Some((s, t)) = work.pop() {
        for sym in 0..pa.len() {
            let (ns, nt) = (step(&pm, s, sym), step(&qm, t, sym));
            if (ns == 0) != (nt == 0) {
                return Ok(false);
            }
            if ns != 0 && seen.insert((ns, nt)) {
                work.push((ns, nt));
            }
        }
    }
    Ok(true)
}

/// One base orbit of the image shift with its preimage structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    /// Least period of the base point.
    pub period: usize,
    /// Canonical (least) rotation of the primitive base word.
    pub base_word: Vec<String>,
    /// `|π⁻¹(y)|` for the base point `y`.
    pub preimage_count: usize,
    /// Orbit lengths of the preimage orbits, sorted.
    pub orbit_lengths: Vec<u64>,
}

/// Enumerates label cycles of period ≤ `max_period` in the image shift and
/// counts cover orbits over each by exhaustive matching.
pub fn periodic_preimage_census(cover: &FischerCover, max_period: usize) -> Vec<CensusRow> {
    let p = cover.presentation();
    let mut rows = Vec::new();
    for q in 1..=max_period {
        for word in walk_words(p, q) {
            if !is_primitive(&word) || canonical_rotation(&word) != word {
                continue;
            }
            let (count, lengths) = count_preimages(p, &word);
            if count == 0 {
                continue;
            }
            rows.push(CensusRow {
                period: q,
                base_word: word.iter().map(|&s| p.symbol_name(s as usize).to_string()).collect(),
                preimage_count: count,
                orbit_lengths: lengths,
            });
        }
    }
    rows
}

/// Preimages of `w^∞`: cycles of the deterministic fiber over the word.
/// Returns the preimage count and the sorted preimage orbit lengths.
/// Exact for any word length.
pub fn count_preimages(p: &SymbolicPresentation, word: &[u16]) -> (usize, Vec<u64>) {
    let syms: Vec<usize> = word.iter().map(|&s| s as usize).collect();
    p.periodic_fiber(&syms)
}

/// All label words of length `len` readable along walks.
fn walk_words(p: &SymbolicPresentation, len: usize) -> BTreeSet<Vec<u16>> {
    let nsym = p.alphabet().len();
    let mut succ: Vec<Vec<u64>> = vec![vec![0u64; nsym]; p.state_count()];
    if p.state_count() > crate::MAX_STATES {
        return BTreeSet::new();
    }
    for e in p.edges() {
        succ[e.src][e.sym] |= 1u64 << e.dst;
    }
    let full = if p.state_count() == 64 { !0u64 } else { (1u64 << p.state_count()) - 1 };
    let mut frontier: BTreeMap<Vec<u16>, u64> = BTreeMap::from([(Vec::new(), full)]);
    for _ in 0..len {
        let mut next = BTreeMap::new();
        for (word, ends) in &frontier {
            for sym in 0..nsym {
                let mut img = 0u64;
                let mut m = *ends;
                while m != 0 {
                    let s = m.trailing_zeros() as usize;
                    m &= m - 1;
                    img |= succ[s][sym];
                }
                if img == 0 {
                    continue;
                }
                let mut w = word.clone();
                w.push(sym as u16);
                next.insert(w, img);
            }
        }
        frontier = next;
    }
    frontier.into_keys().collect()
}

fn is_primitive(word: &[u16]) -> bool {
    let q = word.len();
    for d in 1..q {
        if q % d == 0 && word.iter().cycle().skip(d).take(q).eq(word.iter()) {
            return false;
        }
    }
    true
}

fn canonical_rotation(word: &[u16]) -> Vec<u16> {
    let q = word.len();
    (0..q)
        .map(|r| {
            let mut w = Vec::with_capacity(q);
            w.extend_from_slice(&word[r..]);
            w.extend_from_slice(&word[..r]);
            w
        })
        .min()
        .unwrap_or_default()
}

/// The fiber product `E(π)`: pairs of cover states with equal-label edge
/// pairs, trimmed to its bi-essential part.
#[derive(Debug, Clone, Serialize)]
pub struct FiberProduct {
    /// Pair states `(u, v)` surviving the trim, as state-name pairs.
    pub vertices: Vec<(String, String)>,
    /// Edges as `(src, dst, symbol)` indices into `vertices`.
    pub edges: Vec<(usize, usize, String)>,
    /// Indices of diagonal vertices (the `E₁` slice).
    pub diagonal: Vec<usize>,
    /// Weakly connected components of the off-diagonal part.
    pub components: Vec<Vec<usize>>,
    /// An edge from an off-diagonal vertex into the diagonal, if any
    /// (witnesses failure of left-closing, hence of AFT).
    pub merge_edge: Option<(usize, usize)>,
}

struct PairGraph {
    verts: Vec<(usize, usize)>,
    edges: Vec<(usize, usize, usize)>, // (src, dst, sym)
}

fn build_pair_graph(p: &SymbolicPresentation) -> PairGraph {
    let n = p.state_count();
    let id = |u: usize, v: usize| u * n + v;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for e in p.edges() {
        for f in p.edges_by_symbol(e.sym) {
            edges.push((id(e.src, f.src), id(e.dst, f.dst), e.sym));
        }
    }
    // Trim to the bi-essential subgraph.
    let mut alive = vec![true; n * n];
    loop {
        let mut indeg = vec![0usize; n * n];
        let mut outdeg = vec![0usize; n * n];
        for &(s, d, _) in &edges {
            if alive[s] && alive[d] {
                outdeg[s] += 1;
                indeg[d] += 1;
            }
        }
        let mut changed = false;
        for v in 0..n * n {
            if alive[v] && (indeg[v] == 0 || outdeg[v] == 0) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let keep: Vec<usize> = (0..n * n).filter(|&v| alive[v]).collect();
    let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    PairGraph {
        verts: keep.iter().map(|&v| (v / n, v % n)).collect(),
        edges: edges
            .into_iter()
            .filter(|&(s, d, _)| alive[s] && alive[d])
            .map(|(s, d, sym)| (pos[&s], pos[&d], sym))
            .collect(),
    }
}

pub fn fiber_product(cover: &FischerCover) -> FiberProduct {
    let p = cover.presentation();
    let g = build_pair_graph(p);
    let diagonal: Vec<usize> =
        (0..g.verts.len()).filter(|&i| g.verts[i].0 == g.verts[i].1).collect();
    let off: Vec<usize> = (0..g.verts.len()).filter(|&i| g.verts[i].0 != g.verts[i].1).collect();
    let off_pos: BTreeMap<usize, usize> = off.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let off_edges: Vec<(usize, usize)> = g
        .edges
        .iter()
        .filter(|&&(s, d, _)| off_pos.contains_key(&s) && off_pos.contains_key(&d))
        .map(|&(s, d, _)| (off_pos[&s], off_pos[&d]))
        .collect();
    let components = graphutil::weak_components(off.len(), off_edges.into_iter())
        .into_iter()
        .map(|c| c.into_iter().map(|i| off[i]).collect())
        .collect();
    let merge_edge = g
        .edges
        .iter()
        .find(|&&(s, d, _)| g.verts[s].0 != g.verts[s].1 && g.verts[d].0 == g.verts[d].1)
        .map(|&(s, d, _)| (s, d));
    FiberProduct {
        vertices: g
            .verts
            .iter()
            .map(|&(u, v)| (p.state_name(u).to_string(), p.state_name(v).to_string()))
            .collect(),
        edges: g.edges.iter().map(|&(s, d, sym)| (s, d, p.symbol_name(sym).to_string())).collect(),
        diagonal,
        components,
        merge_edge,
    }
}

/// Fiber-product PET decision.
#[derive(Debug, Clone, Serialize)]
pub struct PetFiberReport {
    pub is_pet: bool,
    pub reason: String,
    /// Per off-diagonal component, the distinct lift counts observed on
    /// probed periodic points of its image.
    pub observed_counts: Vec<Vec<usize>>,
}

/// Decides PET at the fiber-product level: on each indecomposable
/// (weakly connected, off-diagonal) component of `E(π)` the projection
/// must be constant-to-one, and components with overlapping images must
/// have equal images. The constant-to-one condition is probed on periodic
/// image points of period ≤ `period_bound`; overlap and image equality are
/// decided exactly on the component automata.
pub fn pet_by_fiber(cover: &FischerCover, period_bound: usize) -> Result<PetFiberReport> {
    let p = cover.presentation();
    let g = build_pair_graph(p);
    let off: Vec<usize> = (0..g.verts.len()).filter(|&i| g.verts[i].0 != g.verts[i].1).collect();
    if let Some(&(s, d, _)) = g
        .edges
        .iter()
        .find(|&&(s, d, _)| g.verts[s].0 != g.verts[s].1 && g.verts[d].0 == g.verts[d].1)
    {
        let (u, v) = g.verts[s];
        let (w, _) = g.verts[d];
        return Ok(PetFiberReport {
            is_pet: false,
            reason: format!(
                "recurrent merging pair ({}, {}) flows into the diagonal at {}: the cover is not left-closing",
                p.state_name(u),
                p.state_name(v),
                p.state_name(w)
            ),
            observed_counts: Vec::new(),
        });
    }
    let off_pos: BTreeMap<usize, usize> = off.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let off_edges: Vec<(usize, usize, usize)> = g
        .edges
        .iter()
        .filter(|&&(s, d, _)| off_pos.contains_key(&s) && off_pos.contains_key(&d))
        .map(|&(s, d, sym)| (off_pos[&s], off_pos[&d], sym))
        .collect();
    let components = graphutil::weak_components(
        off.len(),
        off_edges.iter().map(|&(s, d, _)| (s, d)),
    );
    // Component membership and per-component edge sets over local indices.
    let comps: Vec<Component> = components
        .iter()
        .map(|members| Component::build(p, &g, &off, members, &off_edges))
        .collect();
    // Constant-to-one probe, in two layers. First enumerate image points
    // of period up to the bound, compute their preimage orbits exactly
    // from the word fiber (any orbit length), and count each orbit's
    // lifts per component. Then probe transitional points p^∞ u q^∞ built
    // from pairs of the probed cover orbits and short connecting paths;
    // their lift counts are finitely computable and periodic probing
    // alone cannot see them.
    let mut observed: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps.len()];
    let mut liftable_orbits: Vec<Vec<usize>> = Vec::new();
    for q in 1..=period_bound {
        for word in walk_words(p, q) {
            if !is_primitive(&word) || canonical_rotation(&word) != word {
                continue;
            }
            for orbit in preimage_orbit_edge_cycles(p, &word) {
                let mut liftable = false;
                for (ci, c) in comps.iter().enumerate() {
                    let m = c.lift_count(&orbit);
                    if m > 0 {
                        observed[ci].insert(m);
                        liftable = true;
                    }
                }
                // A transitional thread needs an infinite past over the
                // past orbit and a surviving tail over the future orbit,
                // so only orbits with off-diagonal lifts can contribute.
                if liftable {
                    liftable_orbits.push(orbit);
                }
            }
        }
    }
    for (ci, c) in comps.iter().enumerate() {
        for m in c.transitional_counts(&liftable_orbits) {
            observed[ci].insert(m);
        }
    }
    let observed: Vec<Vec<usize>> = observed.into_iter().map(|s| s.into_iter().collect()).collect();
    if let Some(counts) = observed.iter().find(|c| c.len() > 1) {
        return Ok(PetFiberReport {
            is_pet: false,
            reason: format!(
                "projection is not constant-to-one on a component: lift counts {counts:?}"
            ),
            observed_counts: observed.clone(),
        });
    }
    // Overlapping images must be equal.
    for i in 0..comps.len() {
        for j in i + 1..comps.len() {
            if comps[i].overlaps(&comps[j]) && !comps[i].same_image(&comps[j])? {
                return Ok(PetFiberReport {
                    is_pet: false,
                    reason: format!(
                        "components {i} and {j} have overlapping but unequal images"
                    ),
                    observed_counts: observed,
                });
            }
        }
    }
    Ok(PetFiberReport { is_pet: true, reason: "all components pass".into(), observed_counts: observed })
}

/// One off-diagonal component, viewed as an automaton over cover edges:
/// the transition label of a pair edge is the first-coordinate cover edge.
struct Component {
    /// Pair states as (first cover state, second cover state).
    verts: Vec<(usize, usize)>,
    /// (src, dst, cover edge id) over local vertex indices.
    edges: Vec<(usize, usize, usize)>,
    /// Source state of every cover edge, indexed by cover edge id.
    cover_edge_src: Vec<usize>,
}

impl Component {
    fn build(
        p: &SymbolicPresentation,
        g: &PairGraph,
        off: &[usize],
        members: &[usize],
        off_edges: &[(usize, usize, usize)],
    ) -> Component {
        let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let verts: Vec<(usize, usize)> = members.iter().map(|&m| g.verts[off[m]]).collect();
        let mut edges = Vec::new();
        for &(s, d, sym) in off_edges {
            if let (Some(&ls), Some(&ld)) = (local.get(&s), local.get(&d)) {
                let (u, _) = verts[ls];
                let (u2, _) = verts[ld];
                let cover_edge = p
                    .edges()
                    .iter()
                    .position(|e| e.src == u && e.dst == u2 && e.sym == sym)
                    .expect("pair edge projects to a cover edge");
                edges.push((ls, ld, cover_edge));
            }
        }
        let cover_edge_src = p.edges().iter().map(|e| e.src).collect();
        Component { verts, edges, cover_edge_src }
    }

    /// The unique component edge from `v` following the given cover edge.
    fn step(&self, v: usize, cover_edge: usize) -> Option<usize> {
        self.edges.iter().find(|&&(s, _, ce)| s == v && ce == cover_edge).map(|&(_, d, _)| d)
    }

    /// Functional fiber over the cyclic cover-edge word: `next[v*q + t]`.
    fn fiber_next(&self, word: &[usize]) -> Vec<Option<usize>> {
        let q = word.len();
        let node = |v: usize, t: usize| v * q + t;
        let mut next = vec![None; self.verts.len() * q];
        for t in 0..q {
            for &(s, d, ce) in &self.edges {
                if ce == word[t] {
                    next[node(s, t)] = Some(node(d, (t + 1) % q));
                }
            }
        }
        next
    }

    /// Number of lifts of the periodic point tracing `cycle` (cover edge
    /// ids, closing up) inside this component.
    fn lift_count(&self, cycle: &[usize]) -> usize {
        let q = cycle.len();
        let next = self.fiber_next(cycle);
        let on_cycle = functional_cycle_nodes(&next);
        let mut seen = vec![false; next.len()];
        let mut total = 0;
        for v in 0..self.verts.len() {
            let start = v * q;
            if !on_cycle[start] || seen[start] {
                continue;
            }
            let mut len = 0usize;
            let mut cur = start;
            loop {
                seen[cur] = true;
                len += 1;
                cur = next[cur].expect("cycle node advances");
                if cur == start {
                    break;
                }
            }
            total += len / q;
        }
        total
    }

    /// Lift counts of transitional points `past^∞ u future^∞` over every
    /// connecting word `u`, for all ordered pairs of the given cover
    /// orbits. A thread with an infinite past is exactly a phase-0 cycle
    /// node of the past fiber (one backward walk each); the subsets those
    /// threads can reach under arbitrary connectors are explored
    /// exhaustively, and a thread survives a future rotation when its
    /// forward orbit over that fiber can still reach a fiber cycle.
    fn transitional_counts(&self, orbits: &[Vec<usize>]) -> BTreeSet<usize> {
        // survivors[oi][j] = vertices alive forever over orbit oi rotated
        // to start at position j.
        let mut survivors: Vec<Vec<BTreeSet<usize>>> = Vec::with_capacity(orbits.len());
        for orbit in orbits {
            let q = orbit.len();
            let mut per_rot = Vec::with_capacity(q);
            for j in 0..q {
                let mut rotated: Vec<usize> = orbit[j..].to_vec();
                rotated.extend_from_slice(&orbit[..j]);
                let next = self.fiber_next(&rotated);
                let cycles = functional_cycle_nodes(&next);
                let alive: BTreeSet<usize> = (0..self.verts.len())
                    .filter(|&v| {
                        let mut cur = v * q;
                        let mut steps = 0;
                        loop {
                            if cycles[cur] {
                                return true;
                            }
                            match next[cur] {
                                Some(n) if steps <= next.len() => {
                                    cur = n;
                                    steps += 1;
                                }
                                _ => return false,
                            }
                        }
                    })
                    .collect();
                per_rot.push(alive);
            }
            survivors.push(per_rot);
        }
        let mut counts = BTreeSet::new();
        for past in orbits {
            let qp = past.len();
            let past_next = self.fiber_next(past);
            let past_cycles = functional_cycle_nodes(&past_next);
            let start: BTreeSet<usize> =
                (0..self.verts.len()).filter(|&v| past_cycles[v * qp]).collect();
            if start.is_empty() {
                continue;
            }
            let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::from([start.clone()]);
            let mut work = VecDeque::from([start]);
            while let Some(threads) = work.pop_front() {
                let head = self.verts[*threads.iter().next().expect("nonempty")].0;
                for (oi, orbit) in orbits.iter().enumerate() {
                    for (j, alive) in survivors[oi].iter().enumerate() {
                        if self.cover_edge_src[orbit[j]] != head {
                            continue;
                        }
                        let m = threads.intersection(alive).count();
                        if m > 0 {
                            counts.insert(m);
                        }
                    }
                }
                // Advance all threads along each cover edge out of the head.
                let out_edges: BTreeSet<usize> = self
                    .edges
                    .iter()
                    .filter(|&&(s, _, _)| threads.contains(&s))
                    .map(|&(_, _, ce)| ce)
                    .collect();
                for ce in out_edges {
                    let next: BTreeSet<usize> =
                        threads.iter().filter_map(|&v| self.step(v, ce)).collect();
                    if !next.is_empty() && seen.insert(next.clone()) {
                        work.push_back(next);
                    }
                }
            }
        }
        counts
    }

    /// Whether the images share a point: the synchronized product on
    /// first-coordinate edges has a biinfinite path.
    fn overlaps(&self, other: &Component) -> bool {
        let mut verts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let intern = |verts: &mut BTreeMap<(usize, usize), usize>, key: (usize, usize)| {
            let next = verts.len();
            *verts.entry(key).or_insert(next)
        };
        for &(s1, d1, e1) in &self.edges {
            for &(s2, d2, e2) in &other.edges {
                if e1 != e2 {
                    continue;
                }
                let a = intern(&mut verts, (s1, s2));
                let b = intern(&mut verts, (d1, d2));
                edges.push((a, b));
            }
        }
        // Bi-essential trim on the product.
        let n = verts.len();
        let mut alive = vec![true; n];
        loop {
            let mut indeg = vec![0usize; n];
            let mut outdeg = vec![0usize; n];
            for &(s, d) in &edges {
                if alive[s] && alive[d] {
                    outdeg[s] += 1;
                    indeg[d] += 1;
                }
            }
            let mut changed = false;
            for v in 0..n {
                if alive[v] && (indeg[v] == 0 || outdeg[v] == 0) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        alive.iter().any(|&a| a)
    }

    /// Exact equality of the component images as subshifts over the cover
    /// edge alphabet: mutual factor-language containment by subset pairs.
    fn same_image(&self, other: &Component) -> Result<bool> {
        Ok(self.image_contained_in(other)? && other.image_contained_in(self)?)
    }

    fn image_contained_in(&self, other: &Component) -> Result<bool> {
        let edge_ids: BTreeSet<usize> = self.edges.iter().map(|&(_, _, e)| e).collect();
        let start = (
            (0..self.verts.len()).collect::<BTreeSet<usize>>(),
            (0..other.verts.len()).collect::<BTreeSet<usize>>(),
        );
        let mut seen = BTreeSet::from([start.clone()]);
        let mut work = VecDeque::from([start]);
        let mut guard = 0usize;
        while let Some((s, t)) = work.pop_front() {
            guard += 1;
            if guard > 1_000_000 {
                return Err(Error::Internal {
                    stage: "oracle",
                    detail: "image comparison exceeded the exploration cap".into(),
                });
            }
            for &e in &edge_ids {
                let ns: BTreeSet<usize> = self
                    .edges
                    .iter()
                    .filter(|&&(src, _, ce)| ce == e && s.contains(&src))
                    .map(|&(_, d, _)| d)
                    .collect();
                if ns.is_empty() {
                    continue;
                }
                let nt: BTreeSet<usize> = other
                    .edges
                    .iter()
                    .filter(|&&(src, _, ce)| ce == e && t.contains(&src))
                    .map(|&(_, d, _)| d)
                    .collect();
                if nt.is_empty() {
                    return Ok(false);
                }
                let key = (ns, nt);
                if seen.insert(key.clone()) {
                    work.push_back(key);
                }
            }
        }
        Ok(true)
    }
}

/// Preimage orbits of `w^∞` as cover edge cycles: each cycle of the word
/// fiber, converted to the unique edge sequence it follows.
fn preimage_orbit_edge_cycles(p: &SymbolicPresentation, word: &[u16]) -> Vec<Vec<usize>> {
    let q = word.len();
    let n = p.state_count();
    let mut step: Vec<Vec<Option<usize>>> = vec![vec![None; q]; n];
    for (t, &sym) in word.iter().enumerate() {
        for (ei, e) in p.edges().iter().enumerate() {
            if e.sym == sym as usize {
                step[e.src][t] = Some(ei);
            }
        }
    }
    let node = |s: usize, t: usize| s * q + t;
    let mut on_cycle = vec![false; n * q];
    let mut color = vec![0u8; n * q];
    let advance = |s: usize, t: usize| step[s][t].map(|ei| (p.edges()[ei].dst, (t + 1) % q));
    for s0 in 0..n {
        for t0 in 0..q {
            if color[node(s0, t0)] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let (mut s, mut t) = (s0, t0);
            loop {
                let id = node(s, t);
                if color[id] == 1 {
                    let pos = path.iter().position(|&x| x == id).unwrap();
                    for &x in &path[pos..] {
                        on_cycle[x] = true;
                    }
                    break;
                }
                if color[id] == 2 {
                    break;
                }
                color[id] = 1;
                path.push(id);
                match advance(s, t) {
                    Some(next) => {
                        s = next.0;
                        t = next.1;
                    }
                    None => break,
                }
            }
            for &x in &path {
                color[x] = 2;
            }
        }
    }
    let mut seen = vec![false; n * q];
    let mut out = Vec::new();
    for s0 in 0..n {
        let start = node(s0, 0);
        if !on_cycle[start] || seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let (mut s, mut t) = (s0, 0);
        loop {
            seen[node(s, t)] = true;
            let ei = step[s][t].expect("cycle node advances");
            cycle.push(ei);
            s = p.edges()[ei].dst;
            t = (t + 1) % q;
            if node(s, t) == start {
                break;
            }
        }
        out.push(cycle);
    }
    out
}

/// Deepens the word probe until the partition stops changing (bounded by
/// `2^n` rounds).
pub fn stabilized_follower_partition(p: &SymbolicPresentation) -> Vec<usize> {
    let cap = 1usize << p.state_count().min(16);
    let mut l = 1;
    let mut prev = follower_partition_by_words(p, l);
    loop {
        l += 1;
        let cur = follower_partition_by_words(p, l);
        if cur == prev || l >= cap {
            return cur;
        }
        prev = cur;
    }
}

/// Partition of states by equality of their word sets to depth `max_len`.
/// Returns the class of each state.
pub fn follower_partition_by_words(p: &SymbolicPresentation, max_len: usize) -> Vec<usize> {
    let n = p.state_count();
    let nsym = p.alphabet().len();
    let mut succ: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); nsym]; n];
    for e in p.edges() {
        succ[e.src][e.sym].push(e.dst);
    }
    let mut word_sets: Vec<BTreeSet<Vec<u16>>> = vec![BTreeSet::new(); n];
    for (s, set) in word_sets.iter_mut().enumerate() {
        let mut frontier: Vec<(Vec<u16>, usize)> = vec![(Vec::new(), s)];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (word, at) in frontier {
                for sym in 0..nsym {
                    for &d in &succ[at][sym] {
                        let mut w = word.clone();
                        w.push(sym as u16);
                        set.insert(w.clone());
                        next.push((w, d));
                    }
                }
            }
            frontier = next;
        }
    }
    let mut index: BTreeMap<&BTreeSet<Vec<u16>>, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(n);
    for set in &word_sets {
        let next = index.len();
        out.push(*index.entry(set).or_insert(next));
    }
    out
}

/// Summary of all oracle cross-checks against the fast pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub word_bound: usize,
    pub period_bound: usize,
    /// Input and cover present the same language (decided exactly).
    pub language_preserved: bool,
    pub pet_tuple: bool,
    pub pet_fiber: bool,
    pub pet_agree: bool,
    pub pet_fiber_reason: String,
    /// AFT from the tuple graph versus left-closing of the cover, decided
    /// exactly on the trimmed pair graph (no recurrent merging pair).
    pub aft_tuple: bool,
    pub aft_fiber: bool,
    pub aft_agree: bool,
    pub census: Vec<CensusRow>,
    /// Whether the census ↔ tuple-graph comparison ran (PET covers only).
    pub census_checked: bool,
    pub census_agrees: bool,
    pub census_witness: Option<String>,
    /// Word-probed follower partition of the cover stabilizes discrete.
    pub follower_words_agree: bool,
    pub all_ok: bool,
}

/// Runs every oracle comparison for an analyzed cover.
pub fn cross_check(
    input: &SymbolicPresentation,
    cover: &FischerCover,
    trimmed: &TupleGraph,
    class: &ShiftClassReport,
    word_bound: usize,
    period_bound: usize,
) -> Result<OracleReport> {
    let language_preserved = languages_equal_exact(input, cover.presentation())?;
    let fiber = pet_by_fiber(cover, period_bound)?;
    let pet_agree = fiber.is_pet == class.is_pet;
    let aft_fiber = fiber_product(cover).merge_edge.is_none();
    let aft_agree = aft_fiber == class.is_aft;
    let census = periodic_preimage_census(cover, period_bound);
    let (census_checked, census_agrees, census_witness) = if class.is_pet {
        match census_matches_tuples(cover, trimmed, &census, period_bound) {
            Ok(()) => (true, true, None),
            Err(w) => (true, false, Some(w)),
        }
    } else {
        (false, true, None)
    };
    // Word probing stabilizes and then matches partition refinement; on
    // the cover both must come out discrete.
    let follower_words_agree = {
        let p = cover.presentation();
        let stabilized = stabilized_follower_partition(p);
        let discrete = stabilized.iter().collect::<BTreeSet<_>>().len() == p.state_count();
        discrete && p.validate().is_follower_separated
    };
    let all_ok =
        language_preserved && pet_agree && aft_agree && census_agrees && follower_words_agree;
    Ok(OracleReport {
        word_bound,
        period_bound,
        language_preserved,
        pet_tuple: class.is_pet,
        pet_fiber: fiber.is_pet,
        pet_agree,
        pet_fiber_reason: fiber.reason,
        aft_tuple: class.is_aft,
        aft_fiber,
        aft_agree,
        census,
        census_checked,
        census_agrees,
        census_witness,
        follower_words_agree,
        all_ok,
    })
}

/// For a PET cover: every census orbit with k ≥ 2 preimages is carried by
/// exactly one closed walk in the size-k tuple component, whose weight
/// predicts the preimage orbit lengths.
///
/// Components of other sizes may also carry closed walks over the same
/// word (a union of preimage orbits that is closed under the tracking
/// dynamics shows up as a smaller recurrent tuple); those are not points
/// of a different multiplicity class, so they are not compared here.
pub fn census_matches_tuples(
    cover: &FischerCover,
    trimmed: &TupleGraph,
    census: &[CensusRow],
    period_bound: usize,
) -> std::result::Result<(), String> {
    let p = cover.presentation();
    for row in census {
        if row.preimage_count < 2 {
            continue;
        }
        let word: Vec<usize> = row
            .base_word
            .iter()
            .map(|s| p.symbol_index(s).expect("census symbol exists"))
            .collect();
        let k = row.preimage_count;
        // Closed word-walks starting at size-k vertices. The walk from a
        // vertex is unique (the tuple automaton is deterministic), and at
        // the true multiplicity level there is exactly one closed one.
        let mut matches = Vec::new();
        for (vi, v) in trimmed.vertices().iter().enumerate() {
            if v.len() != k {
                continue;
            }
            let mut at = vi;
            let mut edges = Vec::new();
            let mut ok = true;
            for &sym in &word {
                match trimmed.edge_from(at, sym) {
                    Some(e) => {
                        at = e.dst;
                        edges.push(e);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && at == vi {
                matches.push(edges);
            }
        }
        if matches.len() != 1 {
            return Err(format!(
                "base orbit {:?}: expected one closed size-{k} tuple walk, found {}",
                row.base_word,
                matches.len()
            ));
        }
        let weight = cycle_weight(cover, trimmed, &matches[0]).map_err(|e| e.to_string())?;
        let mut predicted: Vec<u64> =
            weight.cycle_type().iter().map(|&c| (c * row.period) as u64).collect();
        predicted.sort_unstable();
        if predicted != row.orbit_lengths {
            return Err(format!(
                "base orbit {:?}: weight predicts orbit lengths {:?}, census found {:?}",
                row.base_word, predicted, row.orbit_lengths
            ));
        }
    }
    // Reverse direction: every closed walk of a size-k component must
    // carry a point with exactly k preimages. A closed walk keeps its
    // size, so its k tokens trace k distinct preimages and the true count
    // is at least k; a larger count exposes the walk as a tracking-closed
    // union of preimage orbits of a higher-multiplicity point.
    for (word, k) in closed_level_walk_words(trimmed, period_bound) {
        let (count, _) = count_preimages(p, &word);
        if count != k {
            let rendered: Vec<&str> =
                word.iter().map(|&s| p.symbol_name(s as usize)).collect();
            return Err(format!(
                "size-{k} tuple cycle over {rendered:?} tracks a point with {count} preimages"
            ));
        }
    }
    Ok(())
}

/// Nodes on cycles of a functional graph (`next[i]` = unique successor).
fn functional_cycle_nodes(next: &[Option<usize>]) -> Vec<bool> {
    let mut on_cycle = vec![false; next.len()];
    let mut color = vec![0u8; next.len()];
    for start in 0..next.len() {
        if color[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if color[cur] == 1 {
                let pos = path.iter().position(|&x| x == cur).unwrap();
                for &x in &path[pos..] {
                    on_cycle[x] = true;
                }
                break;
            }
            if color[cur] == 2 {
                break;
            }
            color[cur] = 1;
            path.push(cur);
            match next[cur] {
                Some(n) => cur = n,
                None => break,
            }
        }
        for &x in &path {
            color[x] = 2;
        }
    }
    on_cycle
}

/// Primitive-core words of closed walks of length ≤ `bound` in size-k
/// components (k ≥ 2), with their component size. Composite walks are
/// enumerated too; words are cut to their primitive core and deduplicated.
fn closed_level_walk_words(g: &TupleGraph, bound: usize) -> Vec<(Vec<u16>, usize)> {
    let mut out: BTreeSet<(Vec<u16>, usize)> = BTreeSet::new();
    for (vi, v) in g.vertices().iter().enumerate() {
        let k = v.len();
        if k < 2 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<u16>)> = vec![(vi, Vec::new())];
        while let Some((at, word)) = stack.pop() {
            if !word.is_empty() && at == vi {
                let core = primitive_core(&word);
                out.insert((canonical_rotation(&core), k));
            }
            if word.len() >= bound {
                continue;
            }
            for e in g.edges().iter().filter(|e| e.src == at) {
                let mut w = word.clone();
                w.push(e.sym as u16);
                stack.push((e.dst, w));
            }
        }
    }
    out.into_iter().collect()
}

fn primitive_core(word: &[u16]) -> Vec<u16> {
    let q = word.len();
    for d in 1..q {
        if q % d == 0 && word.iter().cycle().skip(d).take(q).eq(word.iter()) {
            return word[..d].to_vec();
        }
    }
    word.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fischer::{default_magic_bound, fischer_cover};
    use crate::presentation::parse;
    use crate::tupleflow::{build_tuple_graph, classify, trim_tuple_graph};

    const MATRIX_B: &str = "states: 1 2 3\nmatrix:\na+f | 0 | c\n0 | a | b\nd | b | a\n";
    const MATRIX_C: &str =
        "states: 1 2 3 4\nmatrix:\nd | e | 0 | 0\nf | a+d | b | c\n0 | c | a | b\n0 | b | c | a\n";
    const EVEN: &str = "states: A B\nmatrix:\no | z\nz | 0\n";
    const FULL2_DISTINCT: &str = "states: 1 2\nmatrix:\na | b\nc | d\n";

    fn cover_of(text: &str) -> FischerCover {
        let p = parse(text).unwrap();
        fischer_cover(&p, default_magic_bound(p.state_count())).unwrap()
    }

    #[test]
    fn language_full_two_shift() {
        let p = parse("states: 1\nmatrix:\na+b\n").unwrap();
        // not right-resolving is fine for language sampling
        let l = language(&p, 2);
        assert_eq!(l.of_length(2).unwrap().len(), 4);
        assert!(l.is_factorial_closed());
    }

    #[test]
    fn language_even_shift_excludes_o_z_o() {
        let p = parse(EVEN).unwrap();
        let l = language(&p, 3);
        // symbols sorted: o = 0, z = 1; "o z o" is the unique excluded
        // length-3 word.
        let all: BTreeSet<Vec<u16>> = (0..8u8)
            .map(|m| (0..3).map(|i| (m >> i & 1) as u16).collect())
            .collect();
        let missing: Vec<Vec<u16>> =
            all.difference(l.of_length(3).unwrap()).cloned().collect();
        assert_eq!(missing, vec![vec![0, 1, 0]]);
    }

    #[test]
    fn language_preserved_by_fischer_cover() {
        for text in [MATRIX_B, MATRIX_C, EVEN] {
            let p = parse(text).unwrap();
            let c = cover_of(text);
            assert!(languages_equal_exact(&p, c.presentation()).unwrap(), "{text}");
            let l1 = language(&p, 4);
            let l2 = language(c.presentation(), 4);
            assert_eq!(l1, l2);
        }
    }

    #[test]
    fn census_even_shift_fixed_point() {
        let c = cover_of(EVEN);
        let rows = periodic_preimage_census(&c, 1);
        // z^∞ (the paper's 0^∞) has one preimage orbit of length 2.
        let z = rows.iter().find(|r| r.base_word == vec!["z".to_string()]).unwrap();
        assert_eq!(z.preimage_count, 2);
        assert_eq!(z.orbit_lengths, vec![2]);
        let o = rows.iter().find(|r| r.base_word == vec!["o".to_string()]).unwrap();
        assert_eq!(o.preimage_count, 1);
    }

    #[test]
    fn census_matrix_c_period_one() {
        let c = cover_of(MATRIX_C);
        let rows = periodic_preimage_census(&c, 1);
        let a = rows.iter().find(|r| r.base_word == vec!["a".to_string()]).unwrap();
        assert_eq!(a.preimage_count, 3);
        assert_eq!(a.orbit_lengths, vec![1, 1, 1]);
        let b = rows.iter().find(|r| r.base_word == vec!["b".to_string()]).unwrap();
        assert_eq!(b.preimage_count, 3);
        assert_eq!(b.orbit_lengths, vec![3]);
        let d = rows.iter().find(|r| r.base_word == vec!["d".to_string()]).unwrap();
        assert_eq!(d.preimage_count, 2);
        assert_eq!(d.orbit_lengths, vec![1, 1]);
    }

    #[test]
    fn census_injective_cover_counts_all_one() {
        let c = cover_of(FULL2_DISTINCT);
        for row in periodic_preimage_census(&c, 4) {
            assert_eq!(row.preimage_count, 1, "{row:?}");
        }
    }

    #[test]
    fn fiber_product_diagonal_is_cover_copy() {
        let c = cover_of(EVEN);
        let f = fiber_product(&c);
        assert_eq!(f.diagonal.len(), c.presentation().state_count());
        // Even shift: one off-diagonal component, the (A,B)/(B,A) 2-cycle.
        assert_eq!(f.components.len(), 1);
        assert!(f.merge_edge.is_none());
    }

    #[test]
    fn pet_by_fiber_agrees_on_the_examples() {
        for (text, expected) in
            [(MATRIX_B, false), (MATRIX_C, true), (EVEN, true), (FULL2_DISTINCT, true)]
        {
            let c = cover_of(text);
            let r = pet_by_fiber(&c, DEFAULT_PERIOD_BOUND).unwrap();
            assert_eq!(r.is_pet, expected, "{text}: {}", r.reason);
        }
    }

    #[test]
    fn follower_words_separate_even_cover() {
        let p = parse(EVEN).unwrap();
        let classes = follower_partition_by_words(&p, 2);
        assert_eq!(classes.iter().collect::<BTreeSet<_>>().len(), 2);
    }

    #[test]
    fn follower_words_merge_duplicates() {
        let p = parse("states: 1 2\nmatrix:\n0 | a\na | 0\n").unwrap();
        for l in 1..6 {
            let classes = follower_partition_by_words(&p, l);
            assert_eq!(classes[0], classes[1]);
        }
    }

    #[test]
    fn cross_check_passes_on_examples() {
        for text in [MATRIX_B, MATRIX_C, EVEN, FULL2_DISTINCT] {
            let p = parse(text).unwrap();
            let c = cover_of(text);
            let g = trim_tuple_graph(&build_tuple_graph(&c).unwrap());
            let class = classify(&c, &g).unwrap();
            let report =
                cross_check(&p, &c, &g, &class, DEFAULT_WORD_BOUND, DEFAULT_PERIOD_BOUND).unwrap();
            assert!(report.all_ok, "{text}: {report:?}");
        }
    }
}
