//! Anchor selection, distance metrics and statistics.

mod accuracy;
mod anchors;
mod cost;
mod exact_match;
mod histogram;
mod monitor;
mod results;
mod scoring;
mod stats;
mod token_probs;

pub use accuracy::{accuracy_stats, AccuracyStats, SettingAccuracy};
pub use anchors::{compute_ird, compute_pfd, select_primary_anchor, AnchorSet, PrimaryAnchor};
pub use cost::{probe_cost, ProbeCost};
pub use exact_match::exact_match;
pub use histogram::{anchor_histogram, AnchorHistogram};
pub use monitor::{compute_monitor, numerator_term, Alphas, TripletTerm};
pub use results::{
    parse_results_str, read_results, write_results, ProbeResult, RESULT_SCHEMA_VERSION,
};
pub use scoring::{
    read_accuracy_csv, read_scores_csv, score, write_score_outputs, RelationScore, ScoreConfig,
    ScoreOutput, ScoreRow, TripletScore,
};
pub use stats::{
    kendall_tau_b, pearson, rank_consistency, regularized_incomplete_beta, spearman_rho,
    student_t_two_tailed, PearsonResult, RankConsistency,
};
pub use token_probs::{token_distance, TokenProbs};
