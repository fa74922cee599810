//! Probe corpus construction.

mod bleu;
mod manifest;
mod negatives;
mod paraphrase;
mod templates;
mod triplet;

pub use bleu::{sentence_bleu, DEFAULT_MAX_NGRAM};
pub use manifest::{
    expand_probes, probe_id, read_manifest, read_probes_jsonl, summary_path, write_manifest,
    ExpandOptions, ManifestSummary, ProbeKind, ProbeManifest, ProbeRecord,
};
pub(crate) use negatives::admissible_objects;
pub use negatives::sample_negatives;
pub use paraphrase::{filter_paraphrases, filter_paraphrases_with, DiversityScope};
pub use templates::{
    builtin_registry, parse_registry, read_registry, RelationTemplates, TemplateRegistry,
};
pub use triplet::{parse_triplets, parse_triplets_str, read_triplets, FactTriplet, TripletFormat};
