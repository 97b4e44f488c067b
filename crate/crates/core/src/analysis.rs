//! End-to-end analysis pipeline and its deterministic report.
//!
//! `analyze` runs validate → Fischer cover (construct or verify) → tuple
//! graph → classification → skew matrices → integer invariants, and
//! optionally the oracle cross-checks. The machine report serializes with
//! a versioned schema field and stable field order, so identical inputs
//! and flags produce byte-identical output.

use std::fmt::Write as _;

use serde::Serialize;

use crate::fischer::{
    default_magic_bound, fischer_cover, verify_fischer, FischerCover, MagicWordCertificate,
};
use crate::invariants::{bowen_franks, near_markov_invariant, BowenFranks, InvariantTriple};
use crate::oracle::{cross_check, OracleReport, DEFAULT_PERIOD_BOUND, DEFAULT_WORD_BOUND};
use crate::presentation::{SymbolicPresentation, ValidationReport};
use crate::skew::{skew_level_reports, SkewLevelReport};
use crate::tupleflow::{
    build_tuple_graph, classify, prune_spurious, trim_tuple_graph, ShiftClassReport, TupleGraph,
};
use crate::Error;

pub const SCHEMA: &str = "sofic-analysis/1";

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    /// Verify the input is already a Fischer cover instead of building one.
    pub assume_fischer: bool,
    pub word_bound: usize,
    pub period_bound: usize,
    /// `None` picks the subset-automaton diameter bound for the input size.
    pub magic_bound: Option<usize>,
    /// Run the oracle cross-checks and attach their report.
    pub with_oracle: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            assume_fischer: false,
            word_bound: DEFAULT_WORD_BOUND,
            period_bound: DEFAULT_PERIOD_BOUND,
            magic_bound: None,
            with_oracle: false,
        }
    }
}

/// Why an input was rejected rather than analyzed.
#[derive(Debug, Clone, thiserror::Error)]
pub enum AnalysisError {
    /// The input fails a pipeline precondition; carries the stage and the
    /// validation report. Maps to exit code 2.
    #[error("{stage}: input rejected: {detail}")]
    Rejected { stage: &'static str, detail: String, report: Box<ValidationReport> },
    /// An internal error (inconsistency or resource bound).
    #[error(transparent)]
    Failed(#[from] Error),
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverStateReport {
    pub name: String,
    /// The subset of input states this cover state denotes.
    pub provenance: Vec<String>,
    /// A magic word reaching this state from the full state set.
    pub magic_word: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverReport {
    /// Canonical text of the cover presentation.
    pub presentation: String,
    /// False when `--assume-fischer` verified the input instead.
    pub constructed: bool,
    pub states: Vec<CoverStateReport>,
    pub certificate: MagicWordCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct TupleGraphReport {
    pub raw_vertices: usize,
    pub raw_edges: usize,
    /// Trimmed vertices rendered `[i1 i2 ... ik]`.
    pub vertices: Vec<String>,
    /// Trimmed edges rendered `[..] -sym-> [..]`.
    pub edges: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicityGraphReport {
    /// One entry per image orbit: its length and the attached
    /// (preimage orbit length, weight) pairs.
    pub rights: Vec<MultiplicityRightReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicityRightReport {
    pub image_orbit_length: u64,
    pub pairs: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleReport {
    pub group: String,
    pub det: String,
    pub sign: i8,
    pub mugraph: MultiplicityGraphReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct BfReport {
    pub group: String,
    pub det: String,
    pub sign: i8,
}

/// The consolidated analysis of one presentation.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: String,
    /// Canonical text of the (trimmed) input presentation.
    pub input: String,
    pub validation: ValidationReport,
    pub cover: CoverReport,
    pub classification: ShiftClassReport,
    /// Set exactly when the cover is not AFT, naming the weaker reading.
    pub multicard_interpretation: String,
    pub tuple_graph: TupleGraphReport,
    pub levels: Vec<SkewLevelReport>,
    /// Bowen–Franks data of the cover SFT.
    pub cover_bf: BfReport,
    pub near_markov: Option<TripleReport>,
    pub oracle: Option<OracleReport>,
}

pub struct AnalysisArtifacts {
    pub report: AnalysisReport,
    pub cover: FischerCover,
    pub trimmed: TupleGraph,
    /// `trimmed` with sub-union cycles removed.
    pub pruned: TupleGraph,
    pub class: ShiftClassReport,
    pub triple: Option<InvariantTriple>,
}

/// Runs the full pipeline on a parsed presentation.
pub fn analyze(
    p: &SymbolicPresentation,
    opts: &AnalysisOptions,
) -> Result<AnalysisArtifacts, AnalysisError> {
    let trimmed_input = p.trim();
    if trimmed_input.is_empty() {
        return Err(AnalysisError::Rejected {
            stage: "trim",
            detail: "presentation trims to empty: nothing is recurrent".into(),
            report: Box::new(p.validate()),
        });
    }
    let validation = trimmed_input.validate();
    if !validation.is_irreducible {
        let (u, v) = validation.irreducible_witness.clone().unwrap_or_default();
        return Err(AnalysisError::Rejected {
            stage: "validate",
            detail: format!("presentation is reducible: no path from `{u}` to `{v}`"),
            report: Box::new(validation),
        });
    }
    let magic_bound = opts.magic_bound.unwrap_or_else(|| default_magic_bound(trimmed_input.state_count()));
    let cover = if opts.assume_fischer {
        let outcome = verify_fischer(&trimmed_input, magic_bound).map_err(AnalysisError::Failed)?;
        if !outcome.is_fischer() {
            return Err(AnalysisError::Rejected {
                stage: "verify-fischer",
                detail: "input is not its own right Fischer cover".into(),
                report: Box::new(outcome.report),
            });
        }
        FischerCover::assume_verified(trimmed_input.clone(), magic_bound)
            .map_err(AnalysisError::Failed)?
    } else {
        fischer_cover(&trimmed_input, magic_bound).map_err(AnalysisError::Failed)?
    };
    let raw = build_tuple_graph(&cover).map_err(AnalysisError::Failed)?;
    let trimmed = trim_tuple_graph(&raw);
    let class = classify(&cover, &trimmed).map_err(AnalysisError::Failed)?;
    // Sub-union cycles are kept in the graph of record but excluded from
    // the per-size matrices, the multiplicity graph, and the oracle's
    // tuple-side comparisons.
    let pruned = prune_spurious(&cover, &trimmed);
    let levels = skew_level_reports(&cover, &pruned).map_err(AnalysisError::Failed)?;
    let cover_bf = bowen_franks(&cover.presentation().adjacency());
    let triple = if class.is_near_markov {
        Some(near_markov_invariant(&cover, &pruned, &class).map_err(AnalysisError::Failed)?)
    } else {
        None
    };
    let oracle = if opts.with_oracle {
        Some(
            cross_check(&trimmed_input, &cover, &pruned, &class, opts.word_bound, opts.period_bound)
                .map_err(AnalysisError::Failed)?,
        )
    } else {
        None
    };
    let certificate = verify_fischer(cover.presentation(), magic_bound)
        .map_err(AnalysisError::Failed)?
        .certificate
        .ok_or(Error::MagicBoundExceeded { bound: magic_bound })
        .map_err(AnalysisError::Failed)?;
    let report = AnalysisReport {
        schema: SCHEMA.to_string(),
        input: trimmed_input.render(),
        validation,
        cover: CoverReport {
            presentation: cover.presentation().render(),
            constructed: !opts.assume_fischer,
            states: (0..cover.state_count())
                .map(|i| CoverStateReport {
                    name: cover.presentation().state_name(i).to_string(),
                    provenance: cover.provenance()[i].clone(),
                    magic_word: cover.magic_words()[i].clone(),
                })
                .collect(),
            certificate,
        },
        classification: class.clone(),
        multicard_interpretation: if class.multicard_exact {
            "exact".to_string()
        } else {
            "uniformly-separated spectrum (bound)".to_string()
        },
        tuple_graph: TupleGraphReport {
            raw_vertices: raw.vertices().len(),
            raw_edges: raw.edges().len(),
            vertices: trimmed.vertices().iter().map(|v| v.display()).collect(),
            edges: trimmed
                .edges()
                .iter()
                .map(|e| trimmed.render_edge(e, cover.presentation()))
                .collect(),
        },
        levels,
        cover_bf: BfReport { group: cover_bf.group.render(), det: cover_bf.det.clone(), sign: cover_bf.sign },
        near_markov: triple.as_ref().map(render_triple),
        oracle,
    };
    Ok(AnalysisArtifacts { report, cover, trimmed, pruned, class, triple })
}

pub fn render_triple(t: &InvariantTriple) -> TripleReport {
    TripleReport {
        group: t.bf.group.render(),
        det: t.bf.det.clone(),
        sign: t.bf.sign,
        mugraph: MultiplicityGraphReport {
            rights: t
                .mugraph
                .rights
                .iter()
                .map(|r| MultiplicityRightReport {
                    image_orbit_length: r.right_len,
                    pairs: r.edges.iter().map(|e| (e.left_len, e.weight)).collect(),
                })
                .collect(),
        },
    }
}

pub fn render_bf(bf: &BowenFranks) -> BfReport {
    BfReport { group: bf.group.render(), det: bf.det.clone(), sign: bf.sign }
}

impl AnalysisReport {
    /// Plain-text summary for human consumption.
    pub fn render_human(&self) -> String {
        let mut s = String::new();
        let c = &self.classification;
        let _ = writeln!(s, "cover: {} states, constructed={}", self.cover.states.len(), self.cover.constructed);
        let _ = writeln!(
            s,
            "magic word: {} (focuses to {})",
            self.cover.certificate.word.join(" "),
            self.cover.certificate.follower_class
        );
        let _ = writeln!(
            s,
            "flags: irreducible={} right-resolving={} fischer-minimal={} aft={} pet={} near-markov={}",
            self.validation.is_irreducible,
            self.validation.is_right_resolving,
            self.validation.is_follower_separated,
            c.is_aft,
            c.is_pet,
            c.is_near_markov
        );
        let mc: Vec<String> = c.multicard.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(s, "multicard: {{{}}} ({})", mc.join(", "), self.multicard_interpretation);
        if let Some(w) = &c.aft_witness {
            let _ = writeln!(s, "aft witness: {w}");
        }
        if let Some(w) = &c.pet_witness {
            let _ = writeln!(s, "pet witness: {w}");
        }
        let _ = writeln!(s, "tuple graph: {} vertices, {} edges after trim", self.tuple_graph.vertices.len(), self.tuple_graph.edges.len());
        for v in &self.tuple_graph.vertices {
            let _ = writeln!(s, "  vertex {v}");
        }
        for e in &self.tuple_graph.edges {
            let _ = writeln!(s, "  edge {e}");
        }
        for level in &self.levels {
            let _ = writeln!(s, "level k={}: vertices {}", level.k, level.vertices.join(", "));
            for (i, row) in level.b_k_cycles.iter().enumerate() {
                let _ = writeln!(s, "  B{}[{}] = [{}]", level.k, i, row.join(" | "));
            }
            for (i, row) in level.b_bar.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "  B̄{}[{}] = [{}]", level.k, i, cells.join(" "));
            }
        }
        let _ = writeln!(s, "cover BF group: {}  det(I-A) = {}", self.cover_bf.group, self.cover_bf.det);
        if let Some(t) = &self.near_markov {
            let _ = writeln!(s, "near-Markov triple: group {}, det {}, multiplicity graph:", t.group, t.det);
            for r in &t.mugraph.rights {
                let pairs: Vec<String> =
                    r.pairs.iter().map(|(l, w)| format!("len {l} w={w}")).collect();
                let _ = writeln!(s, "  image orbit len {} <- [{}]", r.image_orbit_length, pairs.join(", "));
            }
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(
                s,
                "oracle: language={} pet-agree={} census-agree={} follower-words={} all-ok={}",
                o.language_preserved, o.pet_agree, o.census_agrees, o.follower_words_agree, o.all_ok
            );
            for row in &o.census {
                let _ = writeln!(
                    s,
                    "  census: period {} word {:?} preimages {} orbit lengths {:?}",
                    row.period, row.base_word, row.preimage_count, row.orbit_lengths
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse;

    const EVEN: &str = "states: A B\nmatrix:\no | z\nz | 0\n";

    #[test]
    fn analyze_even_shift_end_to_end() {
        let p = parse(EVEN).unwrap();
        let opts = AnalysisOptions { with_oracle: true, ..Default::default() };
        let a = analyze(&p, &opts).unwrap();
        assert!(a.class.is_near_markov);
        let t = a.report.near_markov.as_ref().unwrap();
        assert_eq!(t.group, "0");
        assert_eq!(t.det, "-1");
        assert_eq!(t.mugraph.rights.len(), 1);
        assert_eq!(t.mugraph.rights[0].pairs, vec![(2, 2)]);
        assert!(a.report.oracle.as_ref().unwrap().all_ok);
    }

    #[test]
    fn analyze_rejects_reducible() {
        let p = parse("states: 1 2\nmatrix:\na | 0\n0 | a\n").unwrap();
        match analyze(&p, &AnalysisOptions::default()) {
            Err(AnalysisError::Rejected { stage, .. }) => assert_eq!(stage, "validate"),
            other => panic!("expected rejection, got {:?}", other.is_ok()),
        }
    }

    #[test]
    fn analyze_rejects_empty_trim() {
        let p = parse("states: 1 2\nmatrix:\n0 | a\n0 | 0\n").unwrap();
        match analyze(&p, &AnalysisOptions::default()) {
            Err(AnalysisError::Rejected { stage, .. }) => assert_eq!(stage, "trim"),
            other => panic!("expected rejection, got {:?}", other.is_ok()),
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let p = parse(EVEN).unwrap();
        let opts = AnalysisOptions { with_oracle: true, ..Default::default() };
        let a = serde_json::to_string(&analyze(&p, &opts).unwrap().report).unwrap();
        let b = serde_json::to_string(&analyze(&p, &opts).unwrap().report).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assume_fischer_rejects_non_minimal() {
        let p = parse("states: 1 2\nmatrix:\n0 | a\na | 0\n").unwrap();
        let opts = AnalysisOptions { assume_fischer: true, ..Default::default() };
        assert!(matches!(analyze(&p, &opts), Err(AnalysisError::Rejected { .. })));
    }
}
