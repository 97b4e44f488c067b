//! Right Fischer cover construction and verification.
//!
//! The cover of an irreducible sofic shift is extracted from an arbitrary
//! essential, irreducible presentation by determinizing the subset
//! automaton from the full state set, trimming, merging follower-equivalent
//! states by partition refinement, and restricting to the strongly
//! connected component of a reachable subset of minimal cardinality. The
//! result is re-verified and the round repeated until it is right-resolving,
//! essential, irreducible and follower-separated; each cover state then is
//! the follower set of some magic word, witnessed by an explicit
//! certificate.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::graphutil;
use crate::presentation::{SymbolicPresentation, ValidationReport};
use crate::{Error, Result};

/// Default cap on magic-word search length for an `n`-state presentation.
pub fn default_magic_bound(n: usize) -> usize {
    if n >= 20 {
        usize::MAX
    } else {
        (1usize << n) * n.max(1)
    }
}

/// A word that synchronizes the subset automaton to a single state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MagicWordCertificate {
    pub word: Vec<String>,
    /// The cover state (follower class) every path reading `word` ends in.
    pub follower_class: String,
}

/// A verified minimal right-resolving presentation together with the
/// follower-set provenance of each state.
#[derive(Debug, Clone)]
pub struct FischerCover {
    presentation: SymbolicPresentation,
    /// Per cover state, the sorted subset of input states it denotes.
    provenance: Vec<Vec<String>>,
    /// Per cover state, a magic word reaching it from the full state set.
    magic_words: Vec<Vec<String>>,
}

impl FischerCover {
    pub fn presentation(&self) -> &SymbolicPresentation {
        &self.presentation
    }

    pub fn provenance(&self) -> &[Vec<String>] {
        &self.provenance
    }

    pub fn magic_words(&self) -> &[Vec<String>] {
        &self.magic_words
    }

    pub fn state_count(&self) -> usize {
        self.presentation.state_count()
    }

    /// Wraps a presentation that already passed [`verify_fischer`].
    pub fn assume_verified(p: SymbolicPresentation, magic_bound: usize) -> Result<FischerCover> {
        let outcome = verify_fischer(&p, magic_bound)?;
        if !outcome.report.all_ok() {
            return Err(Error::Precondition {
                stage: "fischer",
                detail: format!("presentation is not a Fischer cover: {:?}", outcome.report),
            });
        }
        let magic_words = per_state_magic_words(&p, magic_bound)?;
        let provenance = p.state_names().iter().map(|s| vec![s.clone()]).collect();
        Ok(FischerCover { presentation: p, provenance, magic_words })
    }
}

/// Outcome of checking that a presentation is its own right Fischer cover.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub report: ValidationReport,
    /// Present when the four flags hold and the synchronization search
    /// found a magic word within the bound.
    pub certificate: Option<MagicWordCertificate>,
    /// Set when the flags hold but the search hit the bound.
    pub search_exhausted: bool,
}

impl VerifyOutcome {
    /// All four structural flags plus an exhibited magic word.
    pub fn is_fischer(&self) -> bool {
        self.report.all_ok() && self.certificate.is_some()
    }
}

/// Confirms right-resolving + essential + irreducible + follower-separated
/// and exhibits a magic word synchronizing the subset automaton to a
/// singleton.
pub fn verify_fischer(p: &SymbolicPresentation, magic_bound: usize) -> Result<VerifyOutcome> {
    let report = p.validate();
    if !report.all_ok() {
        return Ok(VerifyOutcome { report, certificate: None, search_exhausted: false });
    }
    match shortest_magic_word(p, magic_bound)? {
        Some((word, state)) => Ok(VerifyOutcome {
            report,
            certificate: Some(MagicWordCertificate {
                word: word.iter().map(|&s| p.symbol_name(s).to_string()).collect(),
                follower_class: p.state_name(state).to_string(),
            }),
            search_exhausted: false,
        }),
        None => Ok(VerifyOutcome { report, certificate: None, search_exhausted: true }),
    }
}

/// Constructs the right Fischer cover of the irreducible sofic shift
/// presented by `p`.
///
/// `p` must be essential and irreducible; it need not be right-resolving
/// (the subset construction determinizes it first).
pub fn fischer_cover(p: &SymbolicPresentation, magic_bound: usize) -> Result<FischerCover> {
    let v = p.validate();
    if !v.is_essential || !v.is_irreducible {
        return Err(Error::Precondition {
            stage: "fischer",
            detail: format!(
                "input must be essential and irreducible (essential={}, irreducible={})",
                v.is_essential, v.is_irreducible
            ),
        });
    }
    let mut current = p.clone();
    // Provenance of each current state, as sets of input state names.
    let mut provenance: Vec<BTreeSet<String>> =
        p.state_names().iter().map(|s| BTreeSet::from([s.clone()])).collect();
    let mut rounds = 0usize;
    loop {
        let v = current.validate();
        if v.all_ok() {
            break;
        }
        rounds += 1;
        if rounds > 64 {
            return Err(Error::Internal { stage: "fischer", detail: "minimization did not stabilize".into() });
        }
        let (next, next_prov) = minimization_round(&current, &provenance)?;
        if next.is_empty() {
            return Err(Error::Internal { stage: "fischer", detail: "empty minimization result".into() });
        }
        current = next;
        provenance = next_prov;
    }
    let magic_words = per_state_magic_words(&current, magic_bound)?;
    // Name cover states by their provenance when those are distinct
    // singletons (so minimal inputs come back with their own names).
    let singleton_names: Vec<Option<&String>> =
        provenance.iter().map(|s| if s.len() == 1 { s.iter().next() } else { None }).collect();
    let all_singleton = singleton_names.iter().all(|o| o.is_some()) && {
        let set: BTreeSet<&&String> = singleton_names.iter().flatten().collect();
        set.len() == singleton_names.len()
    };
    let names: Vec<String> = if all_singleton {
        singleton_names.into_iter().map(|o| o.unwrap().clone()).collect()
    } else {
        (0..current.state_count()).map(|i| format!("q{i}")).collect()
    };
    let rebuilt = SymbolicPresentation::new(
        names,
        current
            .edges()
            .iter()
            .map(|e| (e.src, e.dst, current.symbol_name(e.sym).to_string()))
            .collect(),
    )?;
    Ok(FischerCover {
        presentation: rebuilt,
        provenance: provenance.into_iter().map(|s| s.into_iter().collect()).collect(),
        magic_words,
    })
}

/// One determinize → trim → merge → minimal-subset-SCC pass.
fn minimization_round(
    p: &SymbolicPresentation,
    provenance: &[BTreeSet<String>],
) -> Result<(SymbolicPresentation, Vec<BTreeSet<String>>)> {
    let n = p.state_count();
    let masks = p.target_masks()?;
    let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    // Subset automaton reachable from the full state set.
    let mut ids: BTreeMap<u64, usize> = BTreeMap::new();
    let mut subsets: Vec<u64> = Vec::new();
    let mut trans: Vec<Vec<Option<usize>>> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(full, 0);
    subsets.push(full);
    trans.push(vec![None; p.alphabet().len()]);
    queue.push_back(0usize);
    while let Some(s) = queue.pop_front() {
        for sym in 0..p.alphabet().len() {
            let img = step_mask(&masks[sym], subsets[s]);
            if img == 0 {
                continue;
            }
            let id = *ids.entry(img).or_insert_with(|| {
                subsets.push(img);
                trans.push(vec![None; p.alphabet().len()]);
                queue.push_back(subsets.len() - 1);
                subsets.len() - 1
            });
            trans[s][sym] = Some(id);
        }
    }
    // Trim to the essential part.
    let mut alive = vec![true; subsets.len()];
    loop {
        let mut indeg = vec![0usize; subsets.len()];
        let mut outdeg = vec![0usize; subsets.len()];
        for s in 0..subsets.len() {
            if !alive[s] {
                continue;
            }
            for t in trans[s].iter().flatten() {
                if alive[*t] {
                    outdeg[s] += 1;
                    indeg[*t] += 1;
                }
            }
        }
        let mut changed = false;
        for s in 0..subsets.len() {
            if alive[s] && (indeg[s] == 0 || outdeg[s] == 0) {
                alive[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !alive.iter().any(|&a| a) {
        return Err(Error::Internal { stage: "fischer", detail: "subset automaton trimmed to empty".into() });
    }
    // Merge follower-equivalent subset states by partition refinement on
    // the trimmed deterministic automaton.
    let live: Vec<usize> = (0..subsets.len()).filter(|&s| alive[s]).collect();
    let pos: BTreeMap<usize, usize> = live.iter().enumerate().map(|(k, &s)| (s, k)).collect();
    let step = |k: usize, sym: usize| -> Option<usize> {
        trans[live[k]][sym].filter(|t| alive[*t]).map(|t| pos[&t])
    };
    let mut class: Vec<usize> = {
        let sigs: Vec<Vec<bool>> = (0..live.len())
            .map(|k| (0..p.alphabet().len()).map(|x| step(k, x).is_some()).collect())
            .collect();
        number_by_signature(&sigs)
    };
    loop {
        let sigs: Vec<(usize, Vec<Option<usize>>)> = (0..live.len())
            .map(|k| (class[k], (0..p.alphabet().len()).map(|x| step(k, x).map(|t| class[t])).collect()))
            .collect();
        let refined = number_by_signature(&sigs);
        if refined == class {
            break;
        }
        class = refined;
    }
    let ncls = class.iter().max().map(|m| m + 1).unwrap_or(0);
    // Quotient transitions are well defined because refinement is stable.
    let mut qtrans: Vec<Vec<Option<usize>>> = vec![vec![None; p.alphabet().len()]; ncls];
    for k in 0..live.len() {
        for sym in 0..p.alphabet().len() {
            if let Some(t) = step(k, sym) {
                qtrans[class[k]][sym] = Some(class[t]);
            }
        }
    }
    // Cardinality of a class: least popcount among its member subsets.
    let mut card = vec![u32::MAX; ncls];
    let mut least_mask = vec![u64::MAX; ncls];
    for k in 0..live.len() {
        let m = subsets[live[k]];
        let c = m.count_ones();
        let cl = class[k];
        if (c, m) < (card[cl], least_mask[cl]) {
            card[cl] = c;
            least_mask[cl] = m;
        }
    }
    let start = (0..ncls)
        .min_by_key(|&c| (card[c], least_mask[c]))
        .expect("nonempty quotient");
    let adj: Vec<Vec<usize>> = qtrans
        .iter()
        .map(|row| {
            let mut v: Vec<usize> = row.iter().flatten().copied().collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let scc = graphutil::tarjan_scc(&adj)
        .into_iter()
        .find(|c| c.contains(&start))
        .expect("start class has a component");
    let keep: Vec<usize> = scc;
    let newpos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    // Provenance of a class: union of provenances across member subsets.
    let mut prov: Vec<BTreeSet<String>> = vec![BTreeSet::new(); keep.len()];
    for k in 0..live.len() {
        if let Some(&i) = newpos.get(&class[k]) {
            let mut m = subsets[live[k]];
            while m != 0 {
                let s = m.trailing_zeros() as usize;
                m &= m - 1;
                prov[i].extend(provenance[s].iter().cloned());
            }
        }
    }
    let names: Vec<String> = (0..keep.len()).map(|i| format!("q{i}")).collect();
    let mut edges = Vec::new();
    for (i, &c) in keep.iter().enumerate() {
        for sym in 0..p.alphabet().len() {
            if let Some(t) = qtrans[c][sym] {
                if let Some(&j) = newpos.get(&t) {
                    edges.push((i, j, p.symbol_name(sym).to_string()));
                }
            }
        }
    }
    let next = SymbolicPresentation::new(names, edges)?;
    Ok((next.trim(), trim_provenance(&next, prov)))
}

/// Keeps provenance rows aligned with `p.trim()`'s surviving states.
fn trim_provenance(p: &SymbolicPresentation, prov: Vec<BTreeSet<String>>) -> Vec<BTreeSet<String>> {
    let t = p.trim();
    t.state_names()
        .iter()
        .map(|name| prov[p.state_index(name).expect("trimmed state existed")].clone())
        .collect()
}

fn step_mask(targets: &[u64], mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let s = m.trailing_zeros() as usize;
        m &= m - 1;
        out |= targets[s];
    }
    out
}

/// Shortest word driving the subset automaton from the full set to a
/// singleton, lexicographically least in symbol order among the shortest.
/// Returns the synchronized state as well. `None` when the search exceeds
/// `bound` without finding a singleton.
fn shortest_magic_word(
    p: &SymbolicPresentation,
    bound: usize,
) -> Result<Option<(Vec<usize>, usize)>> {
    let n = p.state_count();
    if n == 0 {
        return Err(Error::Precondition { stage: "fischer", detail: "empty presentation".into() });
    }
    let masks = p.target_masks()?;
    let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    if full.count_ones() == 1 {
        // One state: by convention the shortest nonempty synchronizing
        // word, i.e. the least enabled symbol.
        let sym = (0..p.alphabet().len())
            .find(|&s| masks[s][0] != 0)
            .ok_or(Error::Precondition { stage: "fischer", detail: "state has no outgoing edge".into() })?;
        return Ok(Some((vec![sym], 0)));
    }
    let mut seen: BTreeMap<u64, (u64, usize)> = BTreeMap::new(); // mask -> (pred, sym)
    let mut queue = VecDeque::new();
    let mut depth: BTreeMap<u64, usize> = BTreeMap::new();
    seen.insert(full, (full, usize::MAX));
    depth.insert(full, 0);
    queue.push_back(full);
    while let Some(s) = queue.pop_front() {
        let d = depth[&s];
        if d >= bound {
            return Ok(None);
        }
        for sym in 0..p.alphabet().len() {
            let img = step_mask(&masks[sym], s);
            if img == 0 || seen.contains_key(&img) {
                continue;
            }
            seen.insert(img, (s, sym));
            depth.insert(img, d + 1);
            if img.count_ones() == 1 {
                let mut word = Vec::new();
                let mut cur = img;
                while cur != full {
                    let (prev, sy) = seen[&cur];
                    word.push(sy);
                    cur = prev;
                }
                word.reverse();
                return Ok(Some((word, img.trailing_zeros() as usize)));
            }
            queue.push_back(img);
        }
    }
    Ok(None)
}

/// A magic word per state: the base synchronizing word extended along
/// shortest paths from the synchronized state.
fn per_state_magic_words(p: &SymbolicPresentation, bound: usize) -> Result<Vec<Vec<String>>> {
    let (base, s0) = shortest_magic_word(p, bound)?.ok_or(Error::MagicBoundExceeded { bound })?;
    let n = p.state_count();
    // BFS over states, expanding symbols in sorted order for determinism.
    let mut word_to: Vec<Option<Vec<usize>>> = vec![None; n];
    word_to[s0] = Some(Vec::new());
    let mut queue = VecDeque::from([s0]);
    while let Some(s) = queue.pop_front() {
        let prefix = word_to[s].clone().unwrap();
        let mut outs: Vec<(usize, usize)> = p.out_edges(s).map(|e| (e.sym, e.dst)).collect();
        outs.sort_unstable();
        for (sym, dst) in outs {
            if word_to[dst].is_none() {
                let mut w = prefix.clone();
                w.push(sym);
                word_to[dst] = Some(w);
                queue.push_back(dst);
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for s in 0..n {
        let tail = word_to[s].clone().ok_or(Error::Internal {
            stage: "fischer",
            detail: format!("state {} unreachable from synchronized state", p.state_name(s)),
        })?;
        let mut w: Vec<String> = base.iter().map(|&x| p.symbol_name(x).to_string()).collect();
        w.extend(tail.iter().map(|&x| p.symbol_name(x).to_string()));
        out.push(w);
    }
    Ok(out)
}

fn number_by_signature<T: Ord>(sigs: &[T]) -> Vec<usize> {
    let mut seen: BTreeMap<&T, usize> = BTreeMap::new();
    let mut next = 0;
    let mut out = Vec::with_capacity(sigs.len());
    for s in sigs {
        let id = *seen.entry(s).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
        out.push(id);
    }
    out
}

/// A recurrent merging pair: two distinct states with same-labeled edges
/// into one target, where the pair has an infinite common-word past.
/// Exactly the failure of left-closing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergingPairWitness {
    pub left: String,
    pub right: String,
    pub symbol: String,
    pub target: String,
}

/// Decides left-closing of a right-resolving presentation by trimming the
/// pair graph to its bi-essential part and looking for an edge from an
/// off-diagonal pair into the diagonal.
pub fn left_closing_witness(p: &SymbolicPresentation) -> Option<MergingPairWitness> {
    let n = p.state_count();
    let id = |u: usize, v: usize| u * n + v;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for e in p.edges() {
        for f in p.edges().iter().filter(|f| f.sym == e.sym) {
            edges.push((id(e.src, f.src), id(e.dst, f.dst), e.sym));
        }
    }
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
    edges
        .iter()
        .find(|&&(s, d, _)| {
            alive[s] && alive[d] && (s / n != s % n) && (d / n == d % n)
        })
        .map(|&(s, _, sym)| {
            let (u, v) = (s / n, s % n);
            let target = p
                .edges_by_symbol(sym)
                .find(|e| e.src == u)
                .map(|e| e.dst)
                .expect("merge edge projects");
            MergingPairWitness {
                left: p.state_name(u).to_string(),
                right: p.state_name(v).to_string(),
                symbol: p.symbol_name(sym).to_string(),
                target: p.state_name(target).to_string(),
            }
        })
}

/// Labeled-graph isomorphism: a state bijection preserving every labeled
/// edge with multiplicity. Decided by canonical form with individualization
/// and refinement; intended for small graphs (desk scale, ≤ 32 states).
pub fn isomorphic(p: &SymbolicPresentation, q: &SymbolicPresentation) -> bool {
    if p.state_count() != q.state_count() || p.edge_count() != q.edge_count() {
        return false;
    }
    let pa: Vec<&str> = p.alphabet().iter().map(|s| s.name()).collect();
    let qa: Vec<&str> = q.alphabet().iter().map(|s| s.name()).collect();
    if pa != qa {
        return false;
    }
    canonical_form(p) == canonical_form(q)
}

/// Canonical edge list under a canonical state numbering.
pub fn canonical_form(p: &SymbolicPresentation) -> Vec<(usize, usize, usize)> {
    let n = p.state_count();
    if n == 0 {
        return Vec::new();
    }
    let mut best: Option<Vec<(usize, usize, usize)>> = None;
    let colors = refine_colors(p, &vec![0; n]);
    search_canonical(p, colors, &mut best);
    best.unwrap_or_default()
}

fn refine_colors(p: &SymbolicPresentation, colors: &[usize]) -> Vec<usize> {
    let mut colors = colors.to_vec();
    loop {
        let sigs: Vec<(usize, Vec<(usize, usize)>, Vec<(usize, usize)>)> = (0..p.state_count())
            .map(|s| {
                let mut outs: Vec<(usize, usize)> =
                    p.edges().iter().filter(|e| e.src == s).map(|e| (e.sym, colors[e.dst])).collect();
                outs.sort_unstable();
                let mut ins: Vec<(usize, usize)> =
                    p.edges().iter().filter(|e| e.dst == s).map(|e| (e.sym, colors[e.src])).collect();
                ins.sort_unstable();
                (colors[s], outs, ins)
            })
            .collect();
        // Renumber signatures by sorted order so refinement is canonical.
        let mut uniq: Vec<&(usize, Vec<(usize, usize)>, Vec<(usize, usize)>)> = sigs.iter().collect();
        uniq.sort();
        uniq.dedup();
        let index: BTreeMap<_, usize> = uniq.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
        let refined: Vec<usize> = sigs.iter().map(|s| index[s]).collect();
        if refined == colors {
            return colors;
        }
        colors = refined;
    }
}

fn search_canonical(
    p: &SymbolicPresentation,
    colors: Vec<usize>,
    best: &mut Option<Vec<(usize, usize, usize)>>,
) {
    let n = p.state_count();
    let max_color = colors.iter().max().copied().unwrap_or(0);
    if max_color + 1 == n {
        // Discrete coloring: colors give the numbering.
        let mut enc: Vec<(usize, usize, usize)> =
            p.edges().iter().map(|e| (colors[e.src], e.sym, colors[e.dst])).collect();
        enc.sort_unstable();
        match best {
            Some(b) if *b <= enc => {}
            _ => *best = Some(enc),
        }
        return;
    }
    // Individualize within the first non-singleton color class.
    let target = (0..=max_color)
        .find(|&c| colors.iter().filter(|&&x| x == c).count() > 1)
        .expect("non-discrete coloring has a splittable class");
    for s in 0..n {
        if colors[s] != target {
            continue;
        }
        let mut next = colors.clone();
        for x in next.iter_mut() {
            if *x > target || (*x == target) {
                *x += 1;
            }
        }
        next[s] = target;
        search_canonical(p, refine_colors(p, &next), best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse;

    const MATRIX_B: &str = "states: 1 2 3\nmatrix:\na+f | 0 | c\n0 | a | b\nd | b | a\n";
    const MATRIX_C: &str =
        "states: 1 2 3 4\nmatrix:\nd | e | 0 | 0\nf | a+d | b | c\n0 | c | a | b\n0 | b | c | a\n";
    const EVEN: &str = "states: A B\nmatrix:\no | z\nz | 0\n";

    fn bound(p: &SymbolicPresentation) -> usize {
        default_magic_bound(p.state_count())
    }

    #[test]
    fn verify_matrix_b() {
        let p = parse(MATRIX_B).unwrap();
        let out = verify_fischer(&p, bound(&p)).unwrap();
        assert!(out.is_fischer(), "{out:?}");
        let cert = out.certificate.unwrap();
        assert!(!cert.word.is_empty());
    }

    #[test]
    fn verify_single_state_full_shift() {
        let p = parse("states: 1\nmatrix:\na\n").unwrap();
        let out = verify_fischer(&p, bound(&p)).unwrap();
        assert!(out.is_fischer());
        assert_eq!(out.certificate.unwrap().word, vec!["a".to_string()]);
    }

    #[test]
    fn verify_rejects_indistinguishable_states() {
        let p = parse("states: 1 2\nmatrix:\n0 | a\na | 0\n").unwrap();
        let out = verify_fischer(&p, bound(&p)).unwrap();
        assert!(!out.report.is_follower_separated);
        assert!(!out.is_fischer());
    }

    #[test]
    fn cover_of_minimal_input_is_isomorphic_copy() {
        let p = parse(MATRIX_C).unwrap();
        let c = fischer_cover(&p, bound(&p)).unwrap();
        assert!(isomorphic(c.presentation(), &p));
        for prov in c.provenance() {
            assert_eq!(prov.len(), 1);
        }
        assert!(verify_fischer(c.presentation(), bound(&p)).unwrap().is_fischer());
    }

    #[test]
    fn cover_merges_redundant_even_presentation() {
        // A,B,B' present the even shift with B' duplicating B; the input is
        // not right-resolving (two z-edges at A), so it is determinized.
        let p = SymbolicPresentation::new(
            vec!["A".into(), "B".into(), "Bp".into()],
            vec![
                (0, 0, "o".into()),
                (0, 1, "z".into()),
                (0, 2, "z".into()),
                (1, 0, "z".into()),
                (2, 0, "z".into()),
            ],
        )
        .unwrap();
        let c = fischer_cover(&p, bound(&p)).unwrap();
        let even = parse(EVEN).unwrap();
        assert!(isomorphic(c.presentation(), &even));
        // Provenance: one singleton {A} and one merged {B, Bp}.
        let mut prov = c.provenance().to_vec();
        prov.sort();
        assert_eq!(prov, vec![vec!["A".to_string()], vec!["B".to_string(), "Bp".to_string()]]);
    }

    #[test]
    fn cover_of_injective_full_two_shift() {
        let p = parse("states: 1 2\nmatrix:\na | b\nc | d\n").unwrap();
        let c = fischer_cover(&p, bound(&p)).unwrap();
        assert!(isomorphic(c.presentation(), &p));
    }

    #[test]
    fn cover_is_idempotent_up_to_isomorphism() {
        for text in [MATRIX_B, MATRIX_C, EVEN] {
            let p = parse(text).unwrap();
            let c1 = fischer_cover(&p, bound(&p)).unwrap();
            let c2 = fischer_cover(c1.presentation(), bound(&p)).unwrap();
            assert!(isomorphic(c1.presentation(), c2.presentation()), "{text}");
        }
    }

    #[test]
    fn magic_words_reach_every_state() {
        let p = parse(MATRIX_B).unwrap();
        let c = fischer_cover(&p, bound(&p)).unwrap();
        let cover = c.presentation();
        let masks = cover.target_masks().unwrap();
        let full = (1u64 << cover.state_count()) - 1;
        for (s, word) in c.magic_words().iter().enumerate() {
            let mut cur = full;
            for sym in word {
                let sym = cover.symbol_index(sym).unwrap();
                let mut out = 0u64;
                let mut m = cur;
                while m != 0 {
                    let v = m.trailing_zeros() as usize;
                    m &= m - 1;
                    out |= masks[sym][v];
                }
                cur = out;
            }
            assert_eq!(cur, 1u64 << s, "word {word:?} must synchronize to state {s}");
        }
    }

    #[test]
    fn isomorphism_detects_relabeling() {
        let p = parse(EVEN).unwrap();
        let q = SymbolicPresentation::new(
            vec!["X".into(), "Y".into()],
            vec![(1, 1, "o".into()), (1, 0, "z".into()), (0, 1, "z".into())],
        )
        .unwrap();
        assert!(isomorphic(&p, &q));
        let r = parse("states: A B\nmatrix:\no | z\n0 | z\n").unwrap();
        assert!(!isomorphic(&p, &r));
    }
}
