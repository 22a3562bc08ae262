//! Model-file front end for the opacity checker: the document model, the
//! model-grammar parser and serializer, and report generation.

pub mod document;
pub mod parser;
pub mod render;
pub mod report;

pub use document::{CheckKind, CheckRequest, ModelDocument};
pub use parser::{parse_model, ParseError};
pub use render::render_document;
pub use report::{document_checksum, run_checks, Report, RunError, RunOptions};
