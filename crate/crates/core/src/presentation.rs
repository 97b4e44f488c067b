//! Labeled-graph presentations of sofic shifts: parsing, validation, and
//! the elementary transformations (symbol expansion, time reversal).
//!
//! # Input format
//!
//! One presentation per file. Comment lines start with `#`; blank lines are
//! ignored. The `states:` line declares the states in order; the `matrix:`
//! header is followed by one row per state, entries separated by `|`:
//!
//! ```text
//! # the example from the README
//! states: 1 2 3
//! matrix:
//! a+f | 0 | c
//! 0   | a | b
//! d   | b | a
//! ```
//!
//! An entry is either `0` (no edge) or a `+`-separated list of symbols;
//! repetition is allowed (`a+a` means two parallel `a`-edges). The entry in
//! row `i`, column `j` lists the labels of the edges from state `i` to
//! state `j`. The alphabet is inferred from the entries. Symbol and state
//! names are nonempty tokens over `[a-zA-Z0-9_*]`; the prefix `*` is
//! reserved for expansion symbols, and the bare token `0` is reserved for
//! empty entries (it is rejected as a label inside a sum).
//!
//! [`SymbolicPresentation::render`] emits this same format with states and
//! symbols sorted, so `parse ∘ render` is the identity on canonicalized
//! presentations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::graphutil;
use crate::{Error, Result};

/// An alphabet symbol. Names are unique within a presentation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Symbol(pub String);

impl Symbol {
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A labeled directed edge, with endpoints and label given by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub sym: usize,
}

/// A finite directed multigraph with alphabet-labeled edges.
///
/// States keep their declaration order; internal indices follow it, and the
/// ordered-tuple construction in [`crate::tupleflow`] depends on that order
/// (only up to simultaneous conjugation of the skewing data, which no
/// emitted invariant distinguishes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicPresentation {
    states: Vec<String>,
    alphabet: Vec<Symbol>,
    edges: Vec<Edge>,
}

/// One flag per structural property, with a witness exactly when the flag
/// is false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub is_essential: bool,
    pub is_irreducible: bool,
    pub is_right_resolving: bool,
    pub is_follower_separated: bool,
    /// A state missing an incoming or outgoing edge.
    pub essential_witness: Option<String>,
    /// A pair `(u, v)` with no path from `u` to `v`.
    pub irreducible_witness: Option<(String, String)>,
    /// A state with two outgoing edges carrying the same label.
    pub right_resolving_witness: Option<(String, String)>,
    /// Two distinct states with identical follower sets.
    pub follower_witness: Option<(String, String)>,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.is_essential && self.is_irreducible && self.is_right_resolving && self.is_follower_separated
    }
}

impl SymbolicPresentation {
    /// Builds a presentation from named parts. Fails on duplicate state
    /// names, reserved symbol names, or edges with undeclared endpoints.
    pub fn new(states: Vec<String>, edges: Vec<(usize, usize, String)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &states {
            check_token(s, "state")?;
            if !seen.insert(s.clone()) {
                return Err(Error::Parse { line: 0, col: 0, msg: format!("duplicate state name `{s}`") });
            }
        }
        let mut alphabet: BTreeSet<String> = BTreeSet::new();
        for (_, _, name) in &edges {
            check_token(name, "symbol")?;
            if name == "0" {
                return Err(Error::Parse { line: 0, col: 0, msg: "symbol `0` used as a label".into() });
            }
            alphabet.insert(name.clone());
        }
        let alphabet: Vec<Symbol> = alphabet.into_iter().map(Symbol).collect();
        let index: BTreeMap<&str, usize> =
            alphabet.iter().enumerate().map(|(i, s)| (s.name(), i)).collect();
        let mut es = Vec::with_capacity(edges.len());
        for (src, dst, name) in edges {
            if src >= states.len() || dst >= states.len() {
                return Err(Error::Internal { stage: "presentation", detail: "edge endpoint out of range".into() });
            }
            es.push(Edge { src, dst, sym: index[name.as_str()] });
        }
        es.sort();
        Ok(Self { states, alphabet, edges: es })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn symbol_name(&self, sym: usize) -> &str {
        self.alphabet[sym].name()
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s.name() == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Adjacency matrix counting parallel edges, indexed in state order.
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let n = self.states.len();
        let mut a = vec![vec![0u64; n]; n];
        for e in &self.edges {
            a[e.src][e.dst] += 1;
        }
        a
    }

    /// For each symbol, the set of `(src, dst)` pairs carrying it.
    pub fn edges_by_symbol(&self, sym: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.sym == sym)
    }

    pub fn out_edges(&self, state: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.src == state)
    }

    /// `targets[sym][src]` = bitmask of states reachable from `src` by one
    /// `sym`-edge. Requires at most 64 states.
    pub fn target_masks(&self) -> Result<Vec<Vec<u64>>> {
        let n = self.states.len();
        if n > crate::MAX_STATES {
            return Err(Error::TooManyStates(crate::MAX_STATES));
        }
        let mut t = vec![vec![0u64; n]; self.alphabet.len()];
        for e in &self.edges {
            t[e.sym][e.src] |= 1u64 << e.dst;
        }
        Ok(t)
    }

    /// Checks the four structural properties. Failures are reported with
    /// witnesses, never thrown.
    pub fn validate(&self) -> ValidationReport {
        let n = self.states.len();
        let mut indeg = vec![0usize; n];
        let mut outdeg = vec![0usize; n];
        for e in &self.edges {
            outdeg[e.src] += 1;
            indeg[e.dst] += 1;
        }
        let essential_witness = (0..n)
            .find(|&i| indeg[i] == 0 || outdeg[i] == 0)
            .map(|i| self.states[i].clone());

        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut v: Vec<usize> =
                    self.edges.iter().filter(|e| e.src == i).map(|e| e.dst).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let irreducible_witness = if n == 0 {
            None
        } else {
            graphutil::strongly_connected_witness(&adj)
                .map(|(u, v)| (self.states[u].clone(), self.states[v].clone()))
        };

        let mut right_resolving_witness = None;
        'rr: for i in 0..n {
            let mut seen = BTreeSet::new();
            for e in self.out_edges(i) {
                if !seen.insert(e.sym) {
                    right_resolving_witness =
                        Some((self.states[i].clone(), self.alphabet[e.sym].name().to_string()));
                    break 'rr;
                }
            }
        }

        let follower_witness = if n == 0 {
            None
        } else if right_resolving_witness.is_none() {
            let classes = self.follower_partition_deterministic();
            first_merged_pair(&classes).map(|(u, v)| (self.states[u].clone(), self.states[v].clone()))
        } else {
            // Follower equivalence is still well defined without
            // determinism; decide it by subset-automaton language
            // comparison per pair of states.
            self.follower_witness_by_language()
        };

        ValidationReport {
            is_essential: essential_witness.is_none() && n > 0,
            is_irreducible: irreducible_witness.is_none() && n > 0,
            is_right_resolving: right_resolving_witness.is_none(),
            is_follower_separated: follower_witness.is_none() && n > 0,
            essential_witness: if n == 0 { Some(String::from("<empty>")) } else { essential_witness },
            irreducible_witness,
            right_resolving_witness,
            follower_witness,
        }
    }

    /// Partition refinement on the deterministic transition structure:
    /// class of each state, classes numbered from 0. Only meaningful when
    /// right-resolving.
    pub(crate) fn follower_partition_deterministic(&self) -> Vec<usize> {
        let n = self.states.len();
        let a = self.alphabet.len();
        // next[s][sym] = Some(target)
        let mut next = vec![vec![None; a]; n];
        for e in &self.edges {
            next[e.src][e.sym] = Some(e.dst);
        }
        // Initial split by enabled-symbol sets, then refine by target class.
        let mut class: Vec<usize> = {
            let sigs: Vec<Vec<bool>> =
                (0..n).map(|s| (0..a).map(|x| next[s][x].is_some()).collect()).collect();
            number_by_signature(&sigs)
        };
        loop {
            let sigs: Vec<(usize, Vec<Option<usize>>)> = (0..n)
                .map(|s| (class[s], (0..a).map(|x| next[s][x].map(|t| class[t])).collect()))
                .collect();
            let refined = number_by_signature(&sigs);
            if refined == class {
                return class;
            }
            class = refined;
        }
    }

    fn follower_witness_by_language(&self) -> Option<(String, String)> {
        let n = self.states.len();
        let masks = self.target_masks().ok()?;
        for u in 0..n {
            for v in u + 1..n {
                if subset_languages_equal(&masks, 1u64 << u, 1u64 << v) {
                    return Some((self.states[u].clone(), self.states[v].clone()));
                }
            }
        }
        None
    }

    /// Deletes states lacking an incoming or outgoing edge until stable.
    /// The result is essential or empty.
    pub fn trim(&self) -> SymbolicPresentation {
        let mut alive: Vec<bool> = vec![true; self.states.len()];
        loop {
            let mut indeg = vec![0usize; self.states.len()];
            let mut outdeg = vec![0usize; self.states.len()];
            for e in &self.edges {
                if alive[e.src] && alive[e.dst] {
                    outdeg[e.src] += 1;
                    indeg[e.dst] += 1;
                }
            }
            let mut changed = false;
            for i in 0..self.states.len() {
                if alive[i] && (indeg[i] == 0 || outdeg[i] == 0) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let keep: Vec<usize> = (0..self.states.len()).filter(|&i| alive[i]).collect();
        let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let states = keep.iter().map(|&i| self.states[i].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| alive[e.src] && alive[e.dst])
            .map(|e| (index[&e.src], index[&e.dst], self.alphabet[e.sym].name().to_string()))
            .collect();
        SymbolicPresentation::new(states, edges).expect("trim preserves well-formedness")
    }

    /// Symbol expansion at `a`: for each state `v` with an incoming
    /// `a`-edge a new state `v_a` is introduced, each `u --a--> v` is
    /// redirected to `u --a--> v_a`, and one `v_a --*a--> v` edge is added.
    ///
    /// One new state per `a`-successor state (not per edge) keeps the
    /// output follower-separated when the input is.
    pub fn symbol_expand(&self, a: &str) -> Result<SymbolicPresentation> {
        let sym = self
            .symbol_index(a)
            .ok_or_else(|| Error::UnknownSymbol(a.to_string()))?;
        let v = self.validate();
        if let Some((state, symbol)) = v.right_resolving_witness {
            return Err(Error::NotRightResolving { state, symbol });
        }
        let star = format!("*{a}");
        let mut states = self.states.clone();
        // Targets of a-edges, in state order.
        let mut targets: Vec<usize> =
            self.edges_by_symbol(sym).map(|e| e.dst).collect();
        targets.sort_unstable();
        targets.dedup();
        let mut new_index: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in &targets {
            let name = fresh_state_name(&states, &format!("{}_{a}", self.states[v]));
            new_index.insert(v, states.len());
            states.push(name);
        }
        let mut edges: Vec<(usize, usize, String)> = Vec::new();
        for e in &self.edges {
            if e.sym == sym {
                edges.push((e.src, new_index[&e.dst], a.to_string()));
            } else {
                edges.push((e.src, e.dst, self.alphabet[e.sym].name().to_string()));
            }
        }
        for &v in &targets {
            edges.push((new_index[&v], v, star.clone()));
        }
        SymbolicPresentation::new(states, edges)
    }

    /// Time reversal: every edge's source and target are swapped; labels
    /// are preserved. An involution.
    pub fn reverse(&self) -> SymbolicPresentation {
        let edges = self
            .edges
            .iter()
            .map(|e| (e.dst, e.src, self.alphabet[e.sym].name().to_string()))
            .collect();
        SymbolicPresentation::new(self.states.clone(), edges).expect("reverse preserves well-formedness")
    }

    /// Structure of the preimages of the periodic point `w^∞`: the number
    /// of biinfinite paths reading it and their orbit lengths (sorted).
    /// Exact for any word length; the fiber over the word is a functional
    /// graph because each state follows at most one same-labeled edge.
    pub fn periodic_fiber(&self, word: &[usize]) -> (usize, Vec<u64>) {
        let q = word.len();
        let n = self.state_count();
        if q == 0 || n == 0 {
            return (0, Vec::new());
        }
        let mut step: Vec<Vec<Option<usize>>> = vec![vec![None; q]; n];
        for (t, &sym) in word.iter().enumerate() {
            for e in self.edges_by_symbol(sym) {
                step[e.src][t] = Some(e.dst);
            }
        }
        let node = |s: usize, t: usize| s * q + t;
        let advance = |s: usize, t: usize| step[s][t].map(|d| (d, (t + 1) % q));
        let mut color = vec![0u8; n * q];
        let mut on_cycle = vec![false; n * q];
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
                        Some((ns, nt)) => {
                            s = ns;
                            t = nt;
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
        let mut lengths = Vec::new();
        for s0 in 0..n {
            let start = node(s0, 0);
            if !on_cycle[start] || seen[start] {
                continue;
            }
            let mut len = 0u64;
            let (mut s, mut t) = (s0, 0);
            loop {
                seen[node(s, t)] = true;
                len += 1;
                let (ns, nt) = advance(s, t).expect("cycle node advances");
                s = ns;
                t = nt;
                if node(s, t) == start {
                    break;
                }
            }
            lengths.push(len);
        }
        let count = lengths.iter().map(|&l| (l as usize) / q).sum();
        lengths.sort_unstable();
        (count, lengths)
    }

    /// Canonical text form: states and symbols sorted, entries rendered as
    /// `+`-joined sorted labels with repetition, `0` for empty entries.
    pub fn render(&self) -> String {
        let mut order: Vec<usize> = (0..self.states.len()).collect();
        order.sort_by(|&i, &j| self.states[i].cmp(&self.states[j]));
        let mut out = String::from("states:");
        for &i in &order {
            out.push(' ');
            out.push_str(&self.states[i]);
        }
        out.push('\n');
        out.push_str("matrix:\n");
        for &i in &order {
            let mut row: Vec<String> = Vec::with_capacity(order.len());
            for &j in &order {
                let mut labels: Vec<&str> = self
                    .edges
                    .iter()
                    .filter(|e| e.src == i && e.dst == j)
                    .map(|e| self.alphabet[e.sym].name())
                    .collect();
                labels.sort_unstable();
                row.push(if labels.is_empty() { "0".to_string() } else { labels.join("+") });
            }
            out.push_str(&row.join(" | "));
            out.push('\n');
        }
        out
    }
}

/// Reads a presentation from its text form. Entry order of states is
/// preserved.
pub fn parse(text: &str) -> Result<SymbolicPresentation> {
    let mut states: Option<(Vec<String>, usize)> = None;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    let mut in_matrix = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("states:") {
            if states.is_some() {
                return Err(Error::Parse { line: lineno, col: 1, msg: "duplicate `states:` line".into() });
            }
            let names: Vec<String> = rest.split_whitespace().map(|s| s.to_string()).collect();
            if names.is_empty() {
                return Err(Error::Parse { line: lineno, col: 1, msg: "empty states list".into() });
            }
            states = Some((names, lineno));
        } else if line == "matrix:" {
            if states.is_none() {
                return Err(Error::Parse { line: lineno, col: 1, msg: "`matrix:` before `states:`".into() });
            }
            in_matrix = true;
        } else if in_matrix {
            rows.push((lineno, line.split('|').map(|s| s.trim().to_string()).collect()));
        } else {
            return Err(Error::Parse { line: lineno, col: 1, msg: format!("unexpected line `{line}`") });
        }
    }
    let (names, states_line) = states.ok_or(Error::Parse { line: 1, col: 1, msg: "missing `states:` line".into() })?;
    {
        let mut seen = BTreeSet::new();
        for s in &names {
            check_token_at(s, "state", states_line)?;
            if !seen.insert(s.as_str()) {
                return Err(Error::Parse { line: states_line, col: 1, msg: format!("duplicate state name `{s}`") });
            }
        }
    }
    let n = names.len();
    if rows.len() != n {
        return Err(Error::Parse {
            line: rows.last().map(|r| r.0).unwrap_or(states_line),
            col: 1,
            msg: format!("expected {n} matrix rows, found {}", rows.len()),
        });
    }
    let mut edges: Vec<(usize, usize, String)> = Vec::new();
    for (i, (lineno, row)) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse { line: *lineno, col: 1, msg: format!("expected {n} entries, found {}", row.len()) });
        }
        for (j, entry) in row.iter().enumerate() {
            if entry == "0" {
                continue;
            }
            if entry.is_empty() {
                return Err(Error::Parse { line: *lineno, col: j + 1, msg: "empty matrix entry".into() });
            }
            for part in entry.split('+') {
                let part = part.trim();
                if part == "0" {
                    return Err(Error::Parse {
                        line: *lineno,
                        col: j + 1,
                        msg: "symbol `0` used as a label".into(),
                    });
                }
                check_token_at(part, "symbol", *lineno)?;
                edges.push((i, j, part.to_string()));
            }
        }
    }
    SymbolicPresentation::new(names, edges)
}

fn check_token(tok: &str, kind: &str) -> Result<()> {
    check_token_at(tok, kind, 0)
}

fn check_token_at(tok: &str, kind: &str, line: usize) -> Result<()> {
    if tok.is_empty() || !tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '*') {
        return Err(Error::Parse { line, col: 1, msg: format!("invalid {kind} token `{tok}`") });
    }
    Ok(())
}

fn fresh_state_name(existing: &[String], base: &str) -> String {
    if !existing.iter().any(|s| s == base) {
        return base.to_string();
    }
    let mut name = base.to_string();
    loop {
        name.push('_');
        if !existing.iter().any(|s| s == &name) {
            return name;
        }
    }
}

/// Numbers items by first occurrence of their signature.
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

fn first_merged_pair(classes: &[usize]) -> Option<(usize, usize)> {
    for u in 0..classes.len() {
        for v in u + 1..classes.len() {
            if classes[u] == classes[v] {
                return Some((u, v));
            }
        }
    }
    None
}

/// Language equality of two subset-automaton start sets, by BFS over pairs
/// of subsets. Used for follower comparison on nondeterministic inputs.
fn subset_languages_equal(masks: &[Vec<u64>], s0: u64, t0: u64) -> bool {
    let step = |mask: u64, sym: usize| -> u64 {
        let mut out = 0u64;
        let mut m = mask;
        while m != 0 {
            let s = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= masks[sym][s];
        }
        out
    };
    let mut seen = BTreeSet::new();
    let mut work = vec![(s0, t0)];
    seen.insert((s0, t0));
    while let Some((s, t)) = work.pop() {
        for sym in 0..masks.len() {
            let (ns, nt) = (step(s, sym), step(t, sym));
            if (ns == 0) != (nt == 0) {
                return false;
            }
            if ns != 0 && seen.insert((ns, nt)) {
                work.push((ns, nt));
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MATRIX_B: &str = "\
# AFT but not PET
states: 1 2 3
matrix:
a+f | 0 | c
0   | a | b
d   | b | a
";

    pub(crate) const MATRIX_C: &str = "\
states: 1 2 3 4
matrix:
d | e   | 0 | 0
f | a+d | b | c
0 | c   | a | b
0 | b   | c | a
";

    pub(crate) const EVEN: &str = "\
# even shift: z plays the paper's 0, o plays 1
states: A B
matrix:
o | z
z | 0
";

    #[test]
    fn parses_matrix_b() {
        let p = parse(MATRIX_B).unwrap();
        assert_eq!(p.state_count(), 3);
        // a+f in entry (1,1) contributes two parallel edges.
        assert_eq!(p.edge_count(), 8);
        let names: Vec<&str> = p.alphabet().iter().map(|s| s.name()).collect();
        assert_eq!(names, vec!["a", "b", "c", "d", "f"]);
    }

    #[test]
    fn parses_matrix_c() {
        let p = parse(MATRIX_C).unwrap();
        assert_eq!(p.state_count(), 4);
        // a+d in entry (2,2) contributes two parallel edges.
        assert_eq!(p.edge_count(), 13);
        let names: Vec<&str> = p.alphabet().iter().map(|s| s.name()).collect();
        assert_eq!(names, vec!["a", "b", "c", "d", "e", "f"]);
    }

    #[test]
    fn parses_one_by_one() {
        let p = parse("states: 1\nmatrix:\na\n").unwrap();
        assert_eq!(p.state_count(), 1);
        assert_eq!(p.edge_count(), 1);
        let e = p.edges()[0];
        assert_eq!((e.src, e.dst), (0, 0));
    }

    #[test]
    fn rejects_zero_in_sum() {
        let err = parse("states: 1\nmatrix:\na+0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn rejects_duplicate_state() {
        let err = parse("states: 1 1\nmatrix:\na | 0\n0 | a\n").unwrap_err();
        assert!(err.to_string().contains("duplicate state"), "{err}");
    }

    #[test]
    fn reports_position_on_bad_entry() {
        let err = parse("states: 1 2\nmatrix:\na | ?\n0 | a\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn render_parse_roundtrip() {
        for text in [MATRIX_B, MATRIX_C, EVEN] {
            let p = parse(text).unwrap();
            let canon = p.render();
            let q = parse(&canon).unwrap();
            assert_eq!(q.render(), canon);
        }
    }

    #[test]
    fn validate_matrix_b_all_flags() {
        let p = parse(MATRIX_B).unwrap();
        let v = p.validate();
        assert!(v.all_ok(), "{v:?}");
    }

    #[test]
    fn validate_two_components() {
        let p = parse("states: 1 2\nmatrix:\na | 0\n0 | a\n").unwrap();
        let v = p.validate();
        assert!(!v.is_irreducible);
        assert!(v.irreducible_witness.is_some());
        assert!(v.is_essential && v.is_right_resolving);
    }

    #[test]
    fn validate_label_collision() {
        let p = parse("states: 1\nmatrix:\na+a\n").unwrap();
        let v = p.validate();
        assert!(!v.is_right_resolving);
        assert_eq!(v.right_resolving_witness, Some(("1".into(), "a".into())));
    }

    #[test]
    fn validate_indistinguishable_states() {
        // Both states carry an a-edge to the other and nothing else.
        let p = parse("states: 1 2\nmatrix:\n0 | a\na | 0\n").unwrap();
        let v = p.validate();
        assert!(!v.is_follower_separated);
        assert_eq!(v.follower_witness, Some(("1".into(), "2".into())));
    }

    #[test]
    fn trim_is_identity_on_essential() {
        let p = parse(MATRIX_B).unwrap();
        assert_eq!(p.trim(), p);
    }

    #[test]
    fn trim_path_graph_to_empty() {
        let p = parse("states: 1 2 3\nmatrix:\n0 | a | 0\n0 | 0 | a\n0 | 0 | 0\n").unwrap();
        assert!(p.trim().is_empty());
    }

    #[test]
    fn trim_removes_pendant() {
        // 1 <-> 2 cycle plus pendant 3 -> 1
        let p = SymbolicPresentation::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![(0, 1, "a".into()), (1, 0, "a".into()), (2, 0, "b".into())],
        )
        .unwrap();
        let t = p.trim();
        assert_eq!(t.state_names(), &["1".to_string(), "2".to_string()]);
        assert_eq!(t.edge_count(), 2);
    }

    #[test]
    fn expand_single_state_two_loops() {
        let p = parse("states: 1\nmatrix:\na+b\n").unwrap();
        let q = p.symbol_expand("a").unwrap();
        assert_eq!(q.state_names(), &["1".to_string(), "1_a".to_string()]);
        let rendered = q.render();
        assert!(rendered.contains("*a"), "{rendered}");
        assert_eq!(q.edge_count(), 3);
        let v = q.validate();
        assert!(v.is_right_resolving && v.is_irreducible && v.is_essential);
    }

    #[test]
    fn expand_counts_states_and_edges() {
        let p = parse(MATRIX_B).unwrap();
        let q = p.symbol_expand("b").unwrap();
        // b-edges end at states 2 and 3, so two new states and two *b edges.
        assert_eq!(q.state_count(), p.state_count() + 2);
        assert_eq!(q.edge_count(), p.edge_count() + 2);
    }

    #[test]
    fn expand_unknown_symbol() {
        let p = parse(MATRIX_B).unwrap();
        assert!(matches!(p.symbol_expand("z"), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn expand_star_naming_nests() {
        let p = parse("states: 1\nmatrix:\na+b\n").unwrap();
        let q = p.symbol_expand("a").unwrap();
        let r = q.symbol_expand("*a").unwrap();
        assert!(r.symbol_index("**a").is_some());
    }

    #[test]
    fn reverse_is_involution() {
        for text in [MATRIX_B, MATRIX_C, EVEN] {
            let p = parse(text).unwrap();
            assert_eq!(p.reverse().reverse(), p);
        }
    }

    #[test]
    fn reverse_even_swaps_z_edges() {
        let p = parse(EVEN).unwrap();
        let r = p.reverse();
        // Same canonical form: z-edges A->B and B->A swap places, o-loop stays.
        assert_eq!(r.render(), p.render());
    }

    #[test]
    fn reverse_of_cycle_is_reversed_cycle() {
        let p = SymbolicPresentation::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![(0, 1, "a".into()), (1, 2, "b".into()), (2, 0, "c".into())],
        )
        .unwrap();
        let r = p.reverse();
        let e: Vec<(usize, usize, &str)> =
            r.edges().iter().map(|e| (e.src, e.dst, r.symbol_name(e.sym))).collect();
        assert!(e.contains(&(1, 0, "a")) && e.contains(&(2, 1, "b")) && e.contains(&(0, 2, "c")));
    }
}
