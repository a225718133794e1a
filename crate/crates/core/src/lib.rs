//! Inter-firm risk relations from annual-report text.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! * [`corpus`]: strip markup, pull out Item 1A / 7A, split and tokenize paragraphs
//! * [`pairgen`]: mine chronological and lexical positive pairs
//! * [`encoder`]: the paragraph encoder, mean pooling and cosine similarity
//! * [`training`]: InfoNCE with in-batch negatives, Adam, early stopping
//! * [`scoring`]: mutual risk paragraphs and the risk relation score
//! * [`eval`]: return correlations, alignment, retrieval metrics, threshold sweeps
//!
//! [`synth`] generates the bundled synthetic filing corpus used as the
//! end-to-end fixture.

pub mod corpus;
pub mod encoder;
pub mod eval;
pub mod pairgen;
pub mod scoring;
pub mod synth;
pub mod training;
