//! Parabolic subgroups `P_n = Stab(e₁…e_n)` along a boundary ray, their
//! orbits on `Σ^n`, double-coset counts, and verification of the recursive
//! product decompositions `P_n = (pieces at level n−1) ⋊ ⟨extra generators⟩`.

use std::collections::HashMap;
use std::sync::Arc;

use num::bigint::BigUint;
use thiserror::Error;

use crate::catalog::GroupDef;
use crate::perm::{orbits, Perm, PermGroup};
use crate::quotient::{embed_at_vertex, encode_vertex, EvalError, QuotientContext, SubgroupExpr};

/// An eventually-periodic boundary ray given by its repeating word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaySpec {
    period: Vec<u8>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RayError {
    #[error("ray period must be nonempty")]
    EmptyPeriod,
    #[error("ray letter {letter} out of range for alphabet size {d}")]
    Letter { letter: u8, d: usize },
}

impl RaySpec {
    pub fn new(period: Vec<u8>, d: usize) -> Result<Self, RayError> {
        if period.is_empty() {
            return Err(RayError::EmptyPeriod);
        }
        for &c in &period {
            if c as usize >= d {
                return Err(RayError::Letter { letter: c, d });
            }
        }
        Ok(RaySpec { period })
    }

    /// The ray `(d−1)^∞` used throughout: `1^∞` on the binary tree,
    /// `2^∞` on the ternary tree.
    pub fn standard(d: usize) -> Self {
        RaySpec { period: vec![(d - 1) as u8] }
    }

    /// Digit-string syntax, e.g. `"2"` or `"01"`.
    pub fn parse(text: &str, d: usize) -> Result<Self, RayError> {
        let mut period = Vec::new();
        for c in text.trim().chars() {
            let v = c.to_digit(10).ok_or(RayError::EmptyPeriod)?;
            period.push(v as u8);
        }
        RaySpec::new(period, d)
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.period[i % self.period.len()]).collect()
    }
}

/// `P_n = Stab_{G_n}(e₁…e_n)`, of index `d^n`.
pub fn parabolic_subgroup(group: &Arc<GroupDef>, ray: &RaySpec, n: usize) -> PermGroup {
    let ctx = QuotientContext::new(group.clone(), n);
    parabolic_in_ctx(&ctx, ray)
}

pub(crate) fn parabolic_in_ctx(ctx: &QuotientContext, ray: &RaySpec) -> PermGroup {
    let prefix = ray.prefix(ctx.level());
    ctx.vertex_stab(&prefix, &[]).expect("ray prefix has valid letters and length")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub n: usize,
    pub count: usize,
    /// Orbits as sorted vertex encodings, ordered by smallest element.
    pub orbits: Vec<Vec<u32>>,
    /// `1 + n(d−1)`: the count the shell structure predicts.
    pub predicted_count: usize,
    /// Orbits are exactly the ray point and the shells
    /// `e₁…e_i c Σ^{n−1−i}` for `c ≠ e_{i+1}`.
    pub shapes_match: bool,
}

/// Orbit partition of `Σ^n` under `P_n`, with the shell-shape check.
pub fn orbit_report(group: &Arc<GroupDef>, ray: &RaySpec, n: usize) -> OrbitReport {
    let d = group.d;
    let p = parabolic_subgroup(group, ray, n);
    let parts = orbits(p.degree(), p.generators());
    let predicted = predicted_orbits(d, ray, n);
    let mut got: Vec<Vec<u32>> = parts.clone();
    let mut want = predicted.clone();
    got.sort();
    want.sort();
    OrbitReport {
        n,
        count: parts.len(),
        orbits: parts,
        predicted_count: 1 + n * (d - 1),
        shapes_match: got == want,
    }
}

/// The ray point plus, for each depth `i < n`, the off-ray shells
/// `e₁…e_i c Σ^{n−1−i}` (`c ≠ e_{i+1}`), each a contiguous encoding block.
fn predicted_orbits(d: usize, ray: &RaySpec, n: usize) -> Vec<Vec<u32>> {
    let prefix = ray.prefix(n);
    let mut out = vec![vec![encode_vertex(&prefix, d)]];
    for i in 0..n {
        let head = encode_vertex(&prefix[..i], d);
        let shell = d.pow((n - 1 - i) as u32) as u32;
        for c in 0..d as u8 {
            if c == prefix[i] {
                continue;
            }
            let base = (head * d as u32 + c as u32) * shell;
            out.push((base..base + shell).collect());
        }
    }
    out
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("the level quotient is not transitive on Σ^n")]
pub struct NotTransitive;

/// Number of `(P_n, P_n)` double cosets, which equals the `P_n`-orbit count
/// on `Σ^n ≅ G_n/P_n`.
pub fn double_coset_count(
    group: &Arc<GroupDef>,
    ray: &RaySpec,
    n: usize,
) -> Result<usize, NotTransitive> {
    let q = crate::quotient::level_quotient(group, n);
    if orbits(q.degree(), q.generators()).len() != 1 {
        return Err(NotTransitive);
    }
    Ok(orbit_report(group, ray, n).count)
}

/// One decomposition to verify: the target subgroup (`parent ∩ P` at the
/// current level, or `P` itself) should be generated by the listed pieces
/// placed at first-level vertices plus the extra generators.
struct Decomp {
    name: &'static str,
    /// Subgroup expression for the parent, or `""` for the whole group
    /// (target is then `P_n` itself).
    parent: &'static str,
    /// `(piece, vertex)`: piece is `@X` to reference the decomposition named
    /// `X` at level `n−1`, otherwise a subgroup expression.
    pieces: &'static [(&'static str, u8)],
    extra: &'static [&'static str],
}

fn recipes(group_name: &str) -> Option<&'static [Decomp]> {
    const G: &[Decomp] = &[
        Decomp {
            name: "P",
            parent: "",
            pieces: &[("ncl{b}", 0), ("@Q", 1)],
            extra: &["c", "(a c)^4"],
        },
        Decomp {
            name: "Q",
            parent: "ncl{b}",
            pieces: &[("ncl{(a b)^2}", 0), ("@R", 1)],
            extra: &["b", "(a c)^4"],
        },
        Decomp {
            name: "R",
            parent: "ncl{(a b)^2}",
            pieces: &[("ncl{(a b)^2}", 0), ("@R", 1)],
            extra: &["(a c)^4"],
        },
    ];
    const GT: &[Decomp] = &[
        Decomp {
            name: "P",
            parent: "",
            pieces: &[("ncl{b, d}", 0), ("@Q", 1)],
            extra: &["b", "(a b)^4"],
        },
        Decomp {
            name: "Q",
            parent: "ncl{b, d}",
            pieces: &[("ncl{b, (a d)^2}", 0), ("@R", 1)],
            extra: &["b", "(a b)^4"],
        },
        Decomp {
            name: "R",
            parent: "ncl{b, (a d)^2}",
            pieces: &[("ncl{(a b)^2, (a d)^2}", 0), ("@S", 1)],
            extra: &["b", "(a b)^4", "(a d)^2"],
        },
        Decomp {
            name: "S",
            parent: "ncl{(a b)^2, (a d)^2}",
            pieces: &[("ncl{(a b)^2, (a d)^2}", 0), ("@S", 1)],
            extra: &["(a b)^4", "(a d)^2"],
        },
    ];
    const GAMMA: &[Decomp] = &[
        Decomp {
            name: "P",
            parent: "",
            pieces: &[("ncl{a t a^-1 t^-1}", 0), ("ncl{a t a^-1 t^-1}", 1), ("@Q", 2)],
            extra: &["t", "a t a^-1"],
        },
        Decomp {
            name: "Q",
            parent: "ncl{a t a^-1 t^-1}",
            pieces: &[("ncl{a t a^-1 t^-1}", 0), ("ncl{a t a^-1 t^-1}", 1), ("@Q", 2)],
            extra: &["a t a^-1 t^-1"],
        },
    ];
    const GAMMA_BAR: &[Decomp] = &[
        Decomp {
            name: "P",
            parent: "",
            pieces: &[
                ("comm(ncl{t a^-1}, ncl{t a^-1})", 0),
                ("comm(ncl{t a^-1}, ncl{t a^-1})", 1),
                ("@Q", 2),
            ],
            extra: &["t", "a t a t^-1 a", "(a t)^3 a (a t)^-3 a^-1"],
        },
        // The top part of Q is a growing family of diagonal elements, one new
        // generator per level; [(a t)^3, a] is the first and suffices through
        // level 3, so the order check reports a shortfall from level 4 on.
        Decomp {
            name: "Q",
            parent: "comm(ncl{t a^-1}, ncl{t a^-1})",
            pieces: &[
                ("comm(ncl{t a^-1}, ncl{t a^-1})", 0),
                ("comm(ncl{t a^-1}, ncl{t a^-1})", 1),
                ("@Q", 2),
            ],
            extra: &["(a t)^3 a (a t)^-3 a^-1"],
        },
    ];
    const GAMMA_BAR_BAR: &[Decomp] = &[
        Decomp {
            name: "P",
            parent: "",
            pieces: &[("ncl{a t a^-1 t^-1}", 0), ("ncl{a t a^-1 t^-1}", 1), ("@Q", 2)],
            extra: &["t", "a t a t a"],
        },
        Decomp {
            name: "Q",
            parent: "ncl{a t a^-1 t^-1}",
            pieces: &[("ncl{a t a^-1 t^-1}", 0), ("ncl{a t a^-1 t^-1}", 1), ("@Q", 2)],
            extra: &["(t a)^3"],
        },
    ];
    match group_name {
        "grigorchuk" => Some(G),
        "grigorchuk-tilde" => Some(GT),
        "gamma" => Some(GAMMA),
        "gamma-bar" => Some(GAMMA_BAR),
        "gamma-bar-bar" => Some(GAMMA_BAR_BAR),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionCheck {
    /// Like `"P_4"`.
    pub name: String,
    /// `(piece@vertex, every generator of the embedded piece lies in the target)`.
    pub pieces_contained: Vec<(String, bool)>,
    pub extras_contained: Vec<(String, bool)>,
    pub generated_order: BigUint,
    pub target_order: BigUint,
    /// For `P` only: `|P_n| = |G_n| / d^n`.
    pub index_formula_ok: Option<bool>,
    pub ok: bool,
}

#[derive(Error, Debug)]
pub enum DecompError {
    #[error("no decomposition recipe for group {0:?}")]
    NoRecipe(String),
    #[error("decomposition checks need level n ≥ 2, got {0}")]
    LevelTooSmall(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The target subgroup: `parent_n ∩ P_n`, read off a stabilizer chain of the
/// parent whose first base point is the ray point.
fn intersect_with_parabolic(
    ctx: &QuotientContext,
    parent: &SubgroupExpr,
    ray: &RaySpec,
) -> Result<PermGroup, EvalError> {
    let point = encode_vertex(&ray.prefix(ctx.level()), ctx.group().d);
    let chain = ctx.eval_based(parent, &[point])?;
    let gens = chain.stabilizer_suffix(1);
    Ok(PermGroup::from_generators(ctx.degree(), &gens, &[]))
}

/// Verify every decomposition `X_n = (pieces at level n−1) ⋊ ⟨extras⟩` the
/// recipe table lists for this group, by containment of each embedded piece
/// plus order equality of the generated subgroup with the target.
pub fn verify_parabolic_decomposition(
    group: &Arc<GroupDef>,
    n: usize,
) -> Result<Vec<DecompositionCheck>, DecompError> {
    let recipe = recipes(&group.name).ok_or_else(|| DecompError::NoRecipe(group.name.clone()))?;
    if n < 2 {
        return Err(DecompError::LevelTooSmall(n));
    }
    let ray = RaySpec::standard(group.d);
    let ctx = QuotientContext::new(group.clone(), n);
    let ctx_prev = QuotientContext::new(group.clone(), n - 1);

    let parse =
        |text: &str| SubgroupExpr::parse(text, group).expect("recipe expressions are well-formed");

    // Level n−1 subgroups named by the recipe (parent ∩ P each).
    let mut named_prev: HashMap<&'static str, PermGroup> = HashMap::new();
    for dec in recipe {
        let target_prev = if dec.parent.is_empty() {
            parabolic_in_ctx(&ctx_prev, &ray)
        } else {
            intersect_with_parabolic(&ctx_prev, &parse(dec.parent), &ray)?
        };
        named_prev.insert(dec.name, target_prev);
    }

    let mut out = Vec::new();
    let d = group.d;
    for dec in recipe {
        let target = if dec.parent.is_empty() {
            parabolic_in_ctx(&ctx, &ray)
        } else {
            intersect_with_parabolic(&ctx, &parse(dec.parent), &ray)?
        };
        let mut gens: Vec<Perm> = Vec::new();
        let mut pieces_contained = Vec::new();
        for (piece, vertex) in dec.pieces {
            let prev_group;
            let piece_group = if let Some(name) = piece.strip_prefix('@') {
                &named_prev[name]
            } else {
                prev_group = ctx_prev.eval(&parse(piece))?;
                &prev_group
            };
            let mut all_in = true;
            for g in piece_group.generators() {
                let emb = embed_at_vertex(g, *vertex as u32, d, n, 1);
                if !target.contains(&emb) {
                    all_in = false;
                }
                gens.push(emb);
            }
            pieces_contained.push((format!("{piece}@{vertex}"), all_in));
        }
        let mut extras_contained = Vec::new();
        for text in dec.extra {
            let w = group.parse_word(text).expect("recipe words are well-formed");
            let p = ctx.word_perm(&w);
            extras_contained.push((text.to_string(), target.contains(&p)));
            gens.push(p);
        }
        let generated = PermGroup::from_generators(ctx.degree(), &gens, &[]);
        let generated_order = generated.order();
        let target_order = target.order();
        let index_formula_ok = if dec.parent.is_empty() {
            let dn = BigUint::from(d as u64).pow(n as u32);
            Some(&target_order * dn == ctx.ambient().order())
        } else {
            None
        };
        let ok = pieces_contained.iter().all(|(_, b)| *b)
            && extras_contained.iter().all(|(_, b)| *b)
            && generated_order == target_order
            && index_formula_ok.unwrap_or(true);
        out.push(DecompositionCheck {
            name: format!("{}_{n}", dec.name),
            pieces_contained,
            extras_contained,
            generated_order,
            target_order,
            index_formula_ok,
            ok,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::arc_builtin;
    use crate::quotient::{index, level_quotient};

    #[test]
    fn parabolic_indices() {
        let g = arc_builtin("grigorchuk");
        let ray = RaySpec::standard(2);
        for n in 0..=4usize {
            let p = parabolic_subgroup(&g, &ray, n);
            let q = level_quotient(&g, n);
            assert_eq!(
                index(&p, &q).unwrap(),
                BigUint::from(2u64).pow(n as u32),
                "index of P_{n}"
            );
        }
        let gamma = arc_builtin("gamma");
        let ray3 = RaySpec::standard(3);
        let p2 = parabolic_subgroup(&gamma, &ray3, 2);
        assert_eq!(index(&p2, &level_quotient(&gamma, 2)).unwrap(), BigUint::from(9u64));
    }

    #[test]
    fn orbit_shapes_binary() {
        let g = arc_builtin("grigorchuk");
        let ray = RaySpec::standard(2);
        let rep = orbit_report(&g, &ray, 3);
        assert_eq!(rep.count, 4);
        assert!(rep.shapes_match);
        let mut got = rep.orbits.clone();
        got.sort();
        assert_eq!(got, vec![vec![0, 1, 2, 3], vec![4, 5], vec![6], vec![7]]);

        let rep0 = orbit_report(&g, &ray, 0);
        assert_eq!(rep0.count, 1);
        assert!(rep0.shapes_match);
    }

    #[test]
    fn orbit_shapes_ternary() {
        let gb = arc_builtin("gamma-bar");
        let ray = RaySpec::standard(3);
        let rep = orbit_report(&gb, &ray, 2);
        assert_eq!(rep.count, 5);
        assert!(rep.shapes_match);
        let mut got = rep.orbits.clone();
        got.sort();
        assert_eq!(got, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6], vec![7], vec![8]]);
    }

    #[test]
    fn orbit_counts_grow_by_d_minus_one() {
        for (name, max_n) in [("grigorchuk", 5usize), ("grigorchuk-tilde", 5), ("gamma", 4)] {
            let g = arc_builtin(name);
            let ray = RaySpec::standard(g.d);
            let mut prev = orbit_report(&g, &ray, 0).count;
            for n in 1..=max_n {
                let rep = orbit_report(&g, &ray, n);
                assert_eq!(rep.count, prev + (g.d - 1), "{name} level {n}");
                assert!(rep.shapes_match, "{name} level {n} shapes");
                prev = rep.count;
            }
        }
    }

    #[test]
    fn double_cosets_match_orbits() {
        let g = arc_builtin("grigorchuk");
        let ray = RaySpec::standard(2);
        assert_eq!(double_coset_count(&g, &ray, 4), Ok(5));
        assert_eq!(double_coset_count(&g, &ray, 0), Ok(1));
        let gbb = arc_builtin("gamma-bar-bar");
        assert_eq!(double_coset_count(&gbb, &RaySpec::standard(3), 3), Ok(7));
    }

    #[test]
    fn parabolic_projects_into_previous_level() {
        let g = arc_builtin("gamma");
        let ray = RaySpec::standard(3);
        let d = g.d as u32;
        for n in 1..=3usize {
            let pn = parabolic_subgroup(&g, &ray, n + 1);
            let prev = parabolic_subgroup(&g, &ray, n);
            for gen in pn.generators() {
                let images: Vec<u32> = (0..d.pow(n as u32)).map(|v| gen.apply(v * d) / d).collect();
                let proj = Perm::from_images(images).unwrap();
                assert!(prev.contains(&proj));
            }
        }
    }

    #[test]
    fn decomposition_checks_small_levels() {
        for (name, levels) in [
            ("grigorchuk", &[3usize, 4][..]),
            ("grigorchuk-tilde", &[3, 4][..]),
            ("gamma", &[2, 3][..]),
            ("gamma-bar", &[2, 3][..]),
            ("gamma-bar-bar", &[2, 3][..]),
        ] {
            let g = arc_builtin(name);
            for &n in levels {
                let checks = verify_parabolic_decomposition(&g, n).unwrap();
                for c in &checks {
                    assert!(
                        c.ok,
                        "{name} {}: pieces {:?} extras {:?} orders {} vs {}",
                        c.name,
                        c.pieces_contained,
                        c.extras_contained,
                        c.generated_order,
                        c.target_order
                    );
                }
            }
        }
    }

    #[test]
    fn lattice_indices_between_parabolic_pieces() {
        // P_n over Q_n = B_n ∩ P_n has index 4; Q_n over R_n = K_n ∩ P_n has
        // index 2; H_n over P_n has index 2^{n−1}.
        let g = arc_builtin("grigorchuk");
        let ray = RaySpec::standard(2);
        for n in [3usize, 4] {
            let ctx = QuotientContext::new(g.clone(), n);
            let p = parabolic_in_ctx(&ctx, &ray);
            let b = SubgroupExpr::parse("ncl{b}", &g).unwrap();
            let k = SubgroupExpr::parse("ncl{(a b)^2}", &g).unwrap();
            let q = intersect_with_parabolic(&ctx, &b, &ray).unwrap();
            let r = intersect_with_parabolic(&ctx, &k, &ray).unwrap();
            assert_eq!(index(&q, &p).unwrap(), BigUint::from(4u64), "level {n}");
            assert_eq!(index(&r, &q).unwrap(), BigUint::from(2u64), "level {n}");
            let h = ctx.level_stab(1, &[]).unwrap();
            assert_eq!(
                index(&p, &h).unwrap(),
                BigUint::from(2u64).pow(n as u32 - 1),
                "level {n}"
            );
        }
    }

    #[test]
    fn ray_spec_basics() {
        let r = RaySpec::parse("01", 2).unwrap();
        assert_eq!(r.prefix(5), vec![0, 1, 0, 1, 0]);
        assert!(RaySpec::parse("", 2).is_err());
        assert!(RaySpec::new(vec![3], 3).is_err());
        assert_eq!(RaySpec::standard(3).prefix(2), vec![2, 2]);
    }
}
