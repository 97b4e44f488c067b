//! Property suites over seeded random presentations: the structural
//! invariants each module promises, checked against one another and
//! against the brute-force oracles.

use std::collections::BTreeSet;

use proptest::prelude::*;

use sofic_core::analysis::{analyze, AnalysisOptions};
use sofic_core::fischer::{default_magic_bound, fischer_cover, isomorphic, verify_fischer};
use sofic_core::invariants::{bowen_franks, near_markov_fe};
use sofic_core::oracle::{language, languages_equal_exact, stabilized_follower_partition};
use sofic_core::presentation::{parse, SymbolicPresentation};
use sofic_core::skew::build_bk;
use sofic_core::tupleflow::{build_tuple_graph, classify, trim_tuple_graph};
use sofic_testkit::{pick_index, random_cover, random_right_resolving, rng, shuffle_state_order};

fn oracle_opts() -> AnalysisOptions {
    AnalysisOptions { with_oracle: true, assume_fischer: true, ..Default::default() }
}

#[test]
fn expansion_counts_and_flags_on_random_presentations() {
    let mut r = rng(101);
    for _ in 0..60 {
        let p = random_right_resolving(&mut r, 6, 4);
        let sym = p.symbol_name(pick_index(&mut r, p.alphabet().len())).to_string();
        let sid = p.symbol_index(&sym).unwrap();
        let targets: BTreeSet<usize> = p.edges_by_symbol(sid).map(|e| e.dst).collect();
        let q = p.symbol_expand(&sym).unwrap();
        assert_eq!(q.state_count(), p.state_count() + targets.len());
        assert_eq!(q.edge_count(), p.edge_count() + targets.len());
        let (vp, vq) = (p.validate(), q.validate());
        assert!(vq.is_right_resolving);
        if vp.is_irreducible {
            assert!(vq.is_irreducible, "{}", p.render());
        }
        if vp.is_follower_separated && vp.is_irreducible {
            assert!(vq.is_follower_separated, "{}", p.render());
        }
    }
}

#[test]
fn trim_is_idempotent_and_reverse_involutive() {
    let mut r = rng(102);
    for _ in 0..60 {
        let p = random_right_resolving(&mut r, 6, 4);
        let t = p.trim();
        assert_eq!(t.trim(), t);
        assert_eq!(p.reverse().reverse(), p);
    }
}

#[test]
fn fischer_cover_is_idempotent_and_language_preserving() {
    let mut r = rng(103);
    for _ in 0..40 {
        let p = random_right_resolving(&mut r, 6, 4);
        let bound = default_magic_bound(p.state_count());
        let c = fischer_cover(&p, bound).unwrap();
        assert!(verify_fischer(c.presentation(), bound).unwrap().is_fischer(), "{}", p.render());
        assert!(languages_equal_exact(&p, c.presentation()).unwrap(), "{}", p.render());
        assert_eq!(language(&p, 5), language(c.presentation(), 5));
        let c2 = fischer_cover(c.presentation(), bound).unwrap();
        assert!(isomorphic(c.presentation(), c2.presentation()));
    }
}

#[test]
fn fischer_cover_commutes_with_symbol_expansion() {
    let mut r = rng(104);
    for _ in 0..40 {
        let p = random_right_resolving(&mut r, 5, 3);
        let bound = default_magic_bound(p.state_count() * 2 + 2);
        let c = fischer_cover(&p, bound).unwrap();
        let sym = p.symbol_name(pick_index(&mut r, p.alphabet().len())).to_string();
        // Expand the sofic shift (any presentation of it works) and take
        // the cover; expand the cover directly. Both present the expanded
        // shift minimally, so they are isomorphic.
        let via_input = fischer_cover(&p.symbol_expand(&sym).unwrap(), bound).unwrap();
        let via_cover = c.presentation().symbol_expand(&sym).unwrap();
        assert!(
            isomorphic(via_input.presentation(), &via_cover),
            "expansion at {sym} of\n{}",
            p.render()
        );
    }
}

#[test]
fn tuple_graph_edges_never_grow_and_flags_chain() {
    let mut r = rng(105);
    for _ in 0..80 {
        let c = random_cover(&mut r, 6, 4);
        let raw = build_tuple_graph(&c).unwrap();
        let g = trim_tuple_graph(&raw);
        for e in g.edges() {
            assert!(g.vertices()[e.src].len() >= g.vertices()[e.dst].len());
        }
        let cl = classify(&c, &g).unwrap();
        assert!(!cl.is_near_markov || cl.is_pet);
        assert!(!cl.is_pet || cl.is_aft);
        assert_eq!(cl.is_aft, cl.aft_witness.is_none());
        assert_eq!(cl.is_pet, cl.pet_witness.is_none());
        assert_eq!(cl.is_near_markov, cl.near_markov_witness.is_none());
    }
}

#[test]
fn skew_augmentation_equals_level_adjacency() {
    let mut r = rng(106);
    for _ in 0..60 {
        let a = analyze(random_cover(&mut r, 6, 4).presentation(), &AnalysisOptions::default())
            .unwrap();
        for level in a.pruned.levels() {
            if level.k < 2 {
                continue;
            }
            let bk = build_bk(&a.cover, &a.pruned, level.k).unwrap();
            assert_eq!(bk.augmentation(), level.adjacency);
            let opp = bk.opp();
            assert_eq!(opp.augmentation(), level.adjacency);
            assert_eq!(opp.opp(), bk);
        }
    }
}

#[test]
fn skew_data_is_conjugation_covariant_under_state_reordering() {
    let mut r = rng(107);
    for _ in 0..40 {
        let c = random_cover(&mut r, 6, 4);
        let shuffled = shuffle_state_order(&mut r, c.presentation());
        let a1 = analyze(c.presentation(), &AnalysisOptions::default()).unwrap();
        let a2 = analyze(&shuffled, &AnalysisOptions::default()).unwrap();
        assert_eq!(a1.class.is_aft, a2.class.is_aft);
        assert_eq!(a1.class.is_pet, a2.class.is_pet);
        assert_eq!(a1.class.is_near_markov, a2.class.is_near_markov);
        assert_eq!(a1.class.multicard, a2.class.multicard);
        // Cycle-type multisets of the group-ring cells are invariant under
        // simultaneous conjugation and vertex reordering.
        for k in a1.class.multicard.iter().copied() {
            if !a1.class.is_pet {
                continue;
            }
            let b1 = build_bk(&a1.cover, &a1.pruned, k).unwrap();
            let b2 = build_bk(&a2.cover, &a2.pruned, k).unwrap();
            let types = |b: &sofic_core::skew::GroupRingMatrix| {
                let mut all: Vec<Vec<Vec<usize>>> = Vec::new();
                let mut diag: Vec<Vec<Vec<usize>>> = Vec::new();
                for i in 0..b.dim() {
                    for j in 0..b.dim() {
                        let cell: Vec<Vec<usize>> =
                            b.cell(i, j).iter().map(|p| p.cycle_type()).collect();
                        if i == j {
                            diag.push(cell.clone());
                        }
                        all.push(cell);
                    }
                }
                all.sort();
                diag.sort();
                (all, diag)
            };
            assert_eq!(types(&b1), types(&b2), "k={k} of\n{}", c.presentation().render());
        }
    }
}

#[test]
fn bowen_franks_invariant_under_expansion_of_sft_presentations() {
    // An SFT presented with all-distinct edge labels: expansion is a flow
    // move, so group and determinant sign are preserved.
    let mut r = rng(108);
    for _ in 0..40 {
        let base = random_right_resolving(&mut r, 5, 3);
        let t = base.trim();
        if t.is_empty() || !t.validate().is_irreducible {
            continue;
        }
        // Relabel every edge distinctly to present the edge shift itself.
        let distinct = SymbolicPresentation::new(
            t.state_names().to_vec(),
            t.edges()
                .iter()
                .enumerate()
                .map(|(i, e)| (e.src, e.dst, format!("e{i}")))
                .collect(),
        )
        .unwrap();
        let before = bowen_franks(&distinct.adjacency());
        let sym = format!("e{}", pick_index(&mut r, distinct.edge_count()));
        let after = bowen_franks(&distinct.symbol_expand(&sym).unwrap().adjacency());
        assert_eq!(before.group, after.group, "{}", distinct.render());
        assert_eq!(before.sign, after.sign);
        assert_eq!(before.det, after.det);
    }
}

#[test]
fn near_markov_triple_matches_time_reversal() {
    let mut r = rng(109);
    let mut seen = 0;
    while seen < 30 {
        let c = random_cover(&mut r, 6, 4);
        let a = analyze(c.presentation(), &AnalysisOptions::default()).unwrap();
        if !a.class.is_near_markov {
            continue;
        }
        seen += 1;
        let d = analyze(&c.presentation().reverse(), &AnalysisOptions::default()).unwrap();
        assert!(d.class.is_near_markov, "{}", c.presentation().render());
        let v = near_markov_fe(
            (&a.cover, a.triple.as_ref().unwrap()),
            (&d.cover, d.triple.as_ref().unwrap()),
        )
        .unwrap();
        assert!(v.equivalent, "{}", c.presentation().render());
    }
}

#[test]
fn oracle_agrees_on_random_covers() {
    let mut r = rng(110);
    for _ in 0..60 {
        let c = random_cover(&mut r, 6, 4);
        let a = analyze(c.presentation(), &oracle_opts()).unwrap();
        let o = a.report.oracle.as_ref().unwrap();
        assert!(o.all_ok, "{}\n{o:?}", c.presentation().render());
    }
}

#[test]
fn follower_word_partition_matches_refinement_on_covers() {
    let mut r = rng(111);
    for _ in 0..40 {
        let c = random_cover(&mut r, 6, 4);
        let p = c.presentation();
        let stabilized = stabilized_follower_partition(p);
        let classes: BTreeSet<usize> = stabilized.iter().copied().collect();
        assert_eq!(classes.len(), p.state_count(), "{}", p.render());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_render_roundtrip_on_random_presentations(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let p = random_right_resolving(&mut r, 6, 4);
        let canon = p.render();
        let q = parse(&canon).unwrap();
        prop_assert_eq!(q.render(), canon);
    }

    #[test]
    fn language_samples_are_factorial_closed(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let p = random_right_resolving(&mut r, 5, 3);
        prop_assert!(language(&p, 5).is_factorial_closed());
    }

    #[test]
    fn expansion_preserves_multicard(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let c = random_cover(&mut r, 5, 3);
        let a = analyze(c.presentation(), &AnalysisOptions::default()).unwrap();
        let sym_ix = pick_index(&mut r, c.presentation().alphabet().len());
        let sym = c.presentation().symbol_name(sym_ix).to_string();
        let expanded = c.presentation().symbol_expand(&sym).unwrap();
        let b = analyze(&expanded, &AnalysisOptions::default()).unwrap();
        prop_assert_eq!(a.class.multicard, b.class.multicard);
        prop_assert_eq!(a.class.is_pet, b.class.is_pet);
    }
}
