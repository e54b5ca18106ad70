//! Measurement over session logs and the bundled tables.

pub mod anova;
pub mod cooccurrence;
pub mod corpus;
pub mod felicity;
pub mod fixtures;
pub mod kappa;
pub mod ranked_pairs;
pub mod relation;
pub mod report;

pub use anova::{one_way_anova, Anova};
pub use cooccurrence::{motivation_cooccurrence, ClassCounts};
pub use corpus::{corpus, salience_rate, utterance_metrics, CorpusEntry, SalienceSelector, UtteranceMetrics};
pub use felicity::{felicity_counts, proxy_felicity};
pub use fixtures::{bundled_fixtures_dir, Fixtures};
pub use kappa::cohens_kappa;
pub use ranked_pairs::ranked_pairs;
pub use relation::{classify_relation, empty_counts, relation_counts, Interval, RelationCounts, TemporalRelation, MAX_GAP};
pub use report::{reproduce_report, Report, ReportRow};
