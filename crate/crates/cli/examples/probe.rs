// scratch probe, not part of the repo
use sofic_core::analysis::{analyze, AnalysisOptions};
use sofic_core::fischer::{default_magic_bound, fischer_cover, isomorphic};
use sofic_core::invariants::near_markov_fe;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse().unwrap()).unwrap_or(20260810);
    let count: usize = args.next().map(|s| s.parse().unwrap()).unwrap_or(2000);
    let mut r = sofic_testkit::rng(seed);
    let t0 = std::time::Instant::now();
    let opts = AnalysisOptions { with_oracle: true, assume_fischer: true, ..Default::default() };
    let plain = AnalysisOptions::default();
    let (mut oracle_bad, mut exp_bad, mut iso_bad, mut rev_bad, mut nm, mut pet) = (0, 0, 0, 0, 0, 0);
    for i in 0..count {
        let c = sofic_testkit::random_cover(&mut r, 6, 4);
        let a = analyze(c.presentation(), &opts).expect("cover analyzes");
        if !a.report.oracle.as_ref().unwrap().all_ok {
            oracle_bad += 1;
            println!("oracle bad {i}\n{}", c.presentation().render());
        }
        if a.class.is_pet { pet += 1; }
        let nsym = c.presentation().alphabet().len();
        let sym = c.presentation().symbol_name(sofic_testkit::pick_index(&mut r, nsym)).to_string();
        let expanded = c.presentation().symbol_expand(&sym).unwrap();
        if !isomorphic(
            fischer_cover(&expanded, default_magic_bound(expanded.state_count())).unwrap().presentation(),
            &expanded,
        ) {
            iso_bad += 1;
        }
        let b = analyze(&expanded, &plain).expect("expansion analyzes");
        if a.class.is_aft != b.class.is_aft
            || a.class.is_pet != b.class.is_pet
            || a.class.is_near_markov != b.class.is_near_markov
            || a.class.multicard != b.class.multicard
            || a.report.cover_bf.group != b.report.cover_bf.group
            || a.report.cover_bf.sign != b.report.cover_bf.sign
        {
            exp_bad += 1;
            println!("expansion mismatch {i} at {sym}\n{}", c.presentation().render());
        }
        if a.class.is_near_markov {
            nm += 1;
            let rev = c.presentation().reverse();
            let d = analyze(&rev, &plain).expect("reversal analyzes");
            if !d.class.is_near_markov {
                rev_bad += 1;
                println!("reversal lost near-markov {i}\n{}", c.presentation().render());
                continue;
            }
            let v = near_markov_fe(
                (&a.cover, a.triple.as_ref().unwrap()),
                (&d.cover, d.triple.as_ref().unwrap()),
            )
            .unwrap();
            if !v.equivalent {
                rev_bad += 1;
                println!("reversal triple mismatch {i}\n{}", c.presentation().render());
            }
        }
    }
    println!("done: oracle={oracle_bad} expansion={exp_bad} iso={iso_bad} reversal={rev_bad} nm={nm} pet={pet} elapsed={:?}", t0.elapsed());
}
