//! Exact symbolic engine for quantum algebra families: coefficient fields,
//! presentations with oriented rewrite rules, PBW normal forms, identity oracles,
//! central elements and PI deciders.

pub mod center;
pub mod exactnum;
pub mod identities;
pub mod linalg;
pub mod matrep;
pub mod pidecide;
pub mod presentation;
pub mod rewrite;
