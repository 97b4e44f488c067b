//! Small graph helpers shared across modules.

/// Tarjan SCC on an adjacency-list digraph. Components are returned in
/// reverse topological order of the condensation; each component's vertex
/// list is sorted.
pub fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct St<'a> {
        adj: &'a [Vec<usize>],
        index: usize,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        comps: Vec<Vec<usize>>,
    }
    fn go(v: usize, st: &mut St) {
        st.idx[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for &w in &st.adj[v] {
            if st.idx[w].is_none() {
                go(w, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.idx[w].unwrap());
            }
        }
        if st.low[v] == st.idx[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().unwrap();
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            st.comps.push(comp);
        }
    }
    let n = adj.len();
    let mut st = St {
        adj,
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        stack: Vec::new(),
        on_stack: vec![false; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            go(v, &mut st);
        }
    }
    st.comps
}

/// `None` when the digraph is strongly connected, otherwise a witness pair
/// `(u, v)` with no path from `u` to `v`.
pub fn strongly_connected_witness(adj: &[Vec<usize>]) -> Option<(usize, usize)> {
    let comps = tarjan_scc(adj);
    if comps.len() <= 1 {
        return None;
    }
    // Components come out in reverse topological order, so the first one
    // is a sink in the condensation: nothing in it reaches the others.
    let sink = &comps[0];
    let other = comps[1..]
        .iter()
        .flat_map(|c| c.iter())
        .min()
        .copied()
        .expect("more than one component");
    Some((sink[0], other))
}

/// Weakly connected components (edges taken as undirected), each sorted.
/// Components are sorted by their least vertex.
pub fn weak_components(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != c {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for (u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru.max(rv)] = ru.min(rv);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_on_two_cycles() {
        // 0 <-> 1, 2 <-> 3, edge 1 -> 2
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2]];
        let mut comps = tarjan_scc(&adj);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
        assert!(strongly_connected_witness(&adj).is_some());
    }

    #[test]
    fn scc_single() {
        let adj = vec![vec![1], vec![2], vec![0]];
        assert_eq!(tarjan_scc(&adj).len(), 1);
        assert!(strongly_connected_witness(&adj).is_none());
    }

    #[test]
    fn weak_components_split() {
        let comps = weak_components(4, [(0usize, 1usize), (2, 3)].into_iter());
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
    }
}
