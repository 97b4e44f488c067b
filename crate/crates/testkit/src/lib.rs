//! Seeded generators of random presentations for the property and
//! acceptance suites. Everything is deterministic given the seed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sofic_core::fischer::{default_magic_bound, fischer_cover, FischerCover};
use sofic_core::presentation::SymbolicPresentation;

pub const SYMBOLS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform index below `n`, for consumers that do not depend on rand.
pub fn pick_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    assert!(n > 0);
    rng.gen_range(0..n)
}

/// A random right-resolving, essential, irreducible presentation with at
/// most `max_states` states and `max_symbols` symbols. Retries until the
/// structural requirements hold.
pub fn random_right_resolving(
    rng: &mut ChaCha8Rng,
    max_states: usize,
    max_symbols: usize,
) -> SymbolicPresentation {
    assert!(max_symbols <= SYMBOLS.len());
    loop {
        let n = rng.gen_range(1..=max_states);
        let k = rng.gen_range(1..=max_symbols);
        let density = rng.gen_range(0.3..0.9);
        let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let mut edges = Vec::new();
        for s in 0..n {
            for sym in SYMBOLS.iter().take(k) {
                if rng.gen_bool(density) {
                    let t = rng.gen_range(0..n);
                    edges.push((s, t, sym.to_string()));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let Ok(p) = SymbolicPresentation::new(states, edges) else { continue };
        let v = p.validate();
        if v.is_essential && v.is_irreducible && v.is_right_resolving {
            return p;
        }
    }
}

/// A random verified Fischer cover: the cover of a random right-resolving
/// presentation.
pub fn random_cover(rng: &mut ChaCha8Rng, max_states: usize, max_symbols: usize) -> FischerCover {
    loop {
        let p = random_right_resolving(rng, max_states, max_symbols);
        let bound = default_magic_bound(p.state_count());
        if let Ok(c) = fischer_cover(&p, bound) {
            if c.state_count() <= max_states {
                return c;
            }
        }
    }
}

/// The same labeled graph with states declared in a shuffled order.
/// Names are preserved, so the result is isomorphic (indeed equal as a
/// labeled graph) while every index-dependent choice changes.
pub fn shuffle_state_order(rng: &mut ChaCha8Rng, p: &SymbolicPresentation) -> SymbolicPresentation {
    let n = p.state_count();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let pos: Vec<usize> = {
        let mut v = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            v[old] = new;
        }
        v
    };
    let states: Vec<String> = order.iter().map(|&i| p.state_name(i).to_string()).collect();
    let edges = p
        .edges()
        .iter()
        .map(|e| (pos[e.src], pos[e.dst], p.symbol_name(e.sym).to_string()))
        .collect();
    SymbolicPresentation::new(states, edges).expect("shuffle preserves well-formedness")
}
