//! An interaction engine for ludics: loci and designs, normalization of
//! nets, orthogonality, behaviours over finite pools, delocalization with
//! the copy-cat design, formula skeletons and two fallacy detectors.

pub mod behaviour;
pub mod cli;
pub mod delocalize;
pub mod design;
pub mod enumerate;
pub mod formulas;
pub mod interaction;
pub mod locus;
pub mod scenarios;
pub mod service;
pub mod syntax;
pub mod validate;

pub use design::{design_equal, Action, Design, Library, Node, Polarity};
pub use interaction::{make_net, normalize, orthogonal, Net, Orthogonality, Trace, Verdict};
pub use locus::{Bias, Fork, Locus, Ramification};
pub use syntax::{parse_locus, parse_source, serialize_design, SourceFile};
pub use validate::{validate_design, Report};
