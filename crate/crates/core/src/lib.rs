//! Chern connection, torsion and curvature tensors, classification
//! invariants and Cartan-test arithmetic for four-dimensional three-webs
//! W(3,2,2) given by a closed-form map z = f(x, y).
//!
//! The pipeline: parse f ([`exprlang`]), lift it to truncated Taylor jets
//! at a base point ([`jets`]), build the adapted coframe and solve the
//! structure equations ([`webframe`]), prolong to the curvature tensor and
//! its derivatives ([`prolong`]), evaluate every classification condition
//! ([`invariants`]), and reproduce the existence theorems' involution
//! accounting over exact rationals ([`involution`]).

// indexed loops mirror the tensor index notation throughout
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod corpus;
pub mod exprlang;
pub mod fdiff;
pub mod invariants;
pub mod involution;
pub mod jets;
pub mod prolong;
pub mod webframe;

pub use config::AnalysisConfig;
pub use exprlang::{parse_point, parse_web, WebDefinition};
pub use invariants::{classify, Analysis, AnalysisError, ClassificationReport, FrameChange};
pub use involution::{character_table, CharacterTable, ScenarioId};
pub use prolong::{verify_identities, IdentityReport, WebTensors};
pub use webframe::BasePoint;
