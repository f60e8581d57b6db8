//! Computational tools for self-similar groups acting on rooted trees.
//!
//! A group here is given by a *wreath recursion*: finitely many generators,
//! each described by a permutation of the alphabet `Σ = {0..d−1}` (the action
//! on the top level of the `d`-regular rooted tree) and `d` restriction words
//! (the actions on the subtrees). Vertices are words over `Σ`; elements act
//! on the left, products compose as functions: `(gh)(v) = g(h(v))`, so the
//! rightmost letter of a word acts first. Conjugation is `g^h = hgh⁻¹` and
//! commutators are `[g,h] = ghg⁻¹h⁻¹` throughout.
//!
//! The crate covers:
//! - [`catalog`]: built-in groups (the first Grigorchuk group, its tilde
//!   variant, three GGS-type groups on the ternary tree, the binary
//!   odometer), a text format for user-supplied recursions, and morphism
//!   checking;
//! - [`element`]: element arithmetic, the word problem, orders with finite
//!   and infinite-order certificates, portraits, canonical keys, nuclei;
//! - [`perm`]: permutations and deterministic Schreier–Sims stabilizer
//!   chains with exact big-integer orders;
//! - [`quotient`]: level quotients `G_n`, a subgroup-expression language,
//!   indices, containments, central/derived series, Hausdorff dimension
//!   profiles, regular-branch and congruence checks;
//! - [`parabolic`]: parabolic subgroups (stabilizers of boundary rays),
//!   their orbit structure and product decompositions;
//! - [`hecke`]: orbitals of the action on `G_n/P_n`, Gelfand-pair checks,
//!   and the degrees of the decomposition of the quasi-regular
//!   representation;
//! - [`lpres`]: L-presentations (finite fixed part plus substitution-iterated
//!   relator families) and their verification against a group;
//! - [`growth`]: ball growth, weighted contraction certificates, and coset
//!   growth along a ray;
//! - [`verify`]: the bundled end-to-end verification suite used by the CLI.

pub mod catalog;
pub mod element;
pub mod growth;
pub mod hecke;
pub mod lpres;
pub mod parabolic;
pub mod perm;
pub mod quotient;
pub mod verify;

pub use catalog::{builtin, parse_groupdef, render_groupdef, GroupDef, Letter, NamedMorphism, Word};
pub use element::{Element, OrderResult, Portrait, Tri};
pub use lpres::{
    builtin_lpresentation, free_reduce, parity_check, substitute, verify_lpresentation,
    verify_substitution_endomorphism, EndomorphismReport, LPresentation, LpresError,
    PresentationReport, RelatorEntry, RelatorSource,
};
pub use growth::{
    ball_sizes, ball_sizes_by_level_perms, contraction_certificate, coset_growth,
    fit_loglog_slope, parse_ratio, weight_table, BallReport, ContractionReport, GrowthError,
    WeightFunction,
};
pub use hecke::{
    check_gelfand, decomposition_degrees, orbitals, predicted_degrees, DecompositionReport,
    DegreeError, OrbitalSet,
};
pub use parabolic::{
    double_coset_count, orbit_report, parabolic_subgroup, verify_parabolic_decomposition,
    DecompositionCheck, OrbitReport, RaySpec,
};
pub use perm::{Perm, PermGroup};
pub use quotient::{
    decode_vertex, encode_vertex, hausdorff_profile, index, level_permutation, level_quotient,
    quotient_order, series, verify_containment, verify_qcp, verify_regular_branch, HausdorffRow,
    QuotientContext, SeriesKind, SubgroupExpr,
};
pub use verify::{verify_paper, ItemReport, Status, VerifyOptions};
