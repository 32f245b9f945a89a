//! Construction and exact verification of spanning bipartite block designs.
//!
//! A spanning bipartite block design SBBD(v1, v2, N; Λ) is a collection of
//! N spanning subgraphs of the complete bipartite graph K_{v1,v2} whose
//! N x (v1 v2) design matrix X has a doubly completely symmetric
//! information matrix XᵗX described by Λ = (μ, λ12, λ21, λ22). This crate
//! builds such designs from three classical ingredients:
//!
//! * (r,λ)-designs pasted with difference matrices over finite abelian
//!   groups ([`sbbd::construct_single`]),
//! * block partitions of one (r,λ)-design with one difference matrix per
//!   cell ([`sbbd::construct_decomposed`]),
//! * group divisible designs read directly as bipartite designs
//!   ([`sbbd::gdd_to_sbbd`]).
//!
//! All defining conditions are checked in exact integer arithmetic;
//! numerical linear algebra appears only as a cross-check in
//! [`optimality`].

pub mod algebra;
pub mod error;
pub mod incidence;
pub mod optimality;
pub mod report;
pub mod sbbd;

pub use error::{Error, Result};
pub use report::Verdict;
