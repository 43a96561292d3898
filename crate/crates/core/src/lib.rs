//! Best proximity points of proximal contractions between two subsets of a
//! metric space.

pub mod certify;
pub mod corpus;
pub mod error;
pub mod maps;
pub mod metric;
pub mod pair;
pub mod sets;
pub mod solver;

pub use error::{Error, Result};
pub use metric::{distance, validate_metric_axioms, MetricKind, MetricSpec, Point};
pub use sets::{contains, dist_to_set, enumerate_profiled, SetDescriptor, SetDistance, SymbolicSequence};
pub use pair::{gap, is_closed_in_profile, proximal_sets, AnalysisConfig, ClosureVerdict, ProximalData};
pub use maps::{MapKind, MapSpec};
pub use solver::{
    error_bound, proximal_step, solve_first_kind, solve_second_kind, ContractionKind, IterationTrace, Problem,
    SolveConfig, SolveOutcome,
};
pub use certify::{
    admissible_pairs_first_kind, check_approx_compact, check_implications, check_isometry,
    check_preserves_isometric_distance, check_wac, estimate_alpha_first_kind, estimate_alpha_second_kind, CertReport,
    ImplicationInputs, ImplicationReport, Verdict, Witness,
};
pub use corpus::{corpus, corpus_case, corpus_list, run_case, run_corpus, CaseFile, CaseReport, CaseRun};
