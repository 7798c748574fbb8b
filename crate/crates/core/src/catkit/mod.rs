//! Finite categories and the tools to compare their nerves.

mod category;
mod certificate;
mod functor;
mod homology;
mod nerve;
mod undercat;

pub use category::{FiniteCategory, LawFailure, LawReport, MorId, ObjId, Subcategory};
pub use certificate::{check_link, equivalence_from_zigzag, CheckRecord, EquivalenceCertificate, Link, LinkKind};
pub use functor::{check_functor, check_natural, Functor, NaturalTransformation};
pub use homology::{dense_invariant_factors, homology, is_acyclic, smith_summary, HomologyGroup, SmithSummary};
pub use nerve::{chain_counts, nerve, ChainComplex, SparseMatrix};
pub use undercat::{full_subcategory_non_isos, UnderSubcategory, Undercategory};
