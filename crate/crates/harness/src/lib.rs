//! Competition engine: track configuration, campaign execution over solver
//! adapters, checker-backed claim validation, scoring and ranking per the
//! competition rules, and report rendering.

pub mod campaign;
pub mod report;
pub mod runs;
pub mod score;
pub mod track;
