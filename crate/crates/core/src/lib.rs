//! Cognate and false-friend mining over linked Indic wordnets.

pub mod annotation;
pub mod classify;
pub mod exec;
pub mod extraction;
pub mod gold;
pub mod lang;
pub mod project;
pub mod report;
pub mod seed;
pub mod similarity;
pub mod wordnet;
