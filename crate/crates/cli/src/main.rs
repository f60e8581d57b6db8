//! Command-line frontend. Every invocation prints one report to stdout,
//! JSON by default or flat TSV with `--format tsv`, and exits 0 when all
//! checks in the report passed, 1 when some check failed, 2 when a budget
//! ran out before a verdict, and 64 on usage errors.
//!
//! Reports are byte-identical across runs: all algorithms are deterministic
//! and seeded, and wall-clock timing is only included when `--timing` is
//! passed.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::bigint::BigUint;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use treegroups::catalog::{builtin, parse_groupdef, GenId, GroupDef, Letter, Word};
use treegroups::element::{
    self, is_trivial, order, wreath_decompose, Element, OrderResult, Tri,
};
use treegroups::growth::{
    self, ball_sizes, contraction_certificate, coset_growth, fit_loglog_slope, parse_ratio,
    weight_table,
};
use treegroups::hecke::{check_gelfand, decomposition_degrees, orbitals, DegreeError};
use treegroups::lpres::{builtin_lpresentation, parity_check, verify_lpresentation, RelatorSource};
use treegroups::parabolic::{orbit_report, verify_parabolic_decomposition, RaySpec};
use treegroups::quotient::{
    hausdorff_profile, index, quotient_order, verify_containment, verify_regular_branch,
    QuotientContext, SubgroupExpr,
};
use treegroups::verify::{verify_paper, Status, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "treegroups",
    version,
    about = "Self-similar groups on rooted trees: orders, quotients, parabolic \
             subgroups, orbital algebras, presentations, and growth",
    subcommand_required = true
)]
struct Cli {
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Append wall-clock milliseconds to the report. Off by default so
    /// repeated runs produce identical bytes.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Args)]
struct GroupPick {
    /// Built-in group: grigorchuk, grigorchuk-tilde, gamma, gamma-bar,
    /// gamma-bar-bar, or odometer.
    #[arg(long, required_unless_present = "group_file", conflicts_with = "group_file")]
    group: Option<String>,
    /// Read a wreath recursion from a text file instead: an `alphabet: d`
    /// line plus one `gen name: perm ; [sections]` line per generator, e.g.
    /// `gen t: (0 1) ; [e, t]`.
    #[arg(long, value_name = "PATH")]
    group_file: Option<PathBuf>,
}

impl GroupPick {
    fn resolve(&self) -> Result<Arc<GroupDef>, Usage> {
        if let Some(path) = &self.group_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
            return Ok(Arc::new(parse_groupdef(&text).map_err(|e| Usage(e.to_string()))?));
        }
        let name = self.group.as_deref().expect("clap requires a group source");
        Ok(Arc::new(builtin(name).map_err(|e| Usage(e.to_string()))?))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Words in a group: orders, one-level decompositions, triviality.
    Element {
        #[command(subcommand)]
        action: ElementAction,
    },
    /// The finite quotients G_n acting on level n.
    Quotient {
        #[command(subcommand)]
        action: QuotientAction,
    },
    /// Subgroups of a level quotient, written in the expression language.
    Subgroup {
        #[command(subcommand)]
        action: SubgroupAction,
    },
    /// Stabilizers of a boundary ray and their product structure.
    Parabolic {
        #[command(subcommand)]
        action: ParabolicAction,
    },
    /// Orbital algebra of the action on level-n cosets of the ray stabilizer.
    Hecke(HeckeArgs),
    /// Finitely presented approximations: fixed relators plus substitution
    /// iterates.
    Lpres {
        #[command(subcommand)]
        action: LpresAction,
    },
    /// Ball growth, weighted contraction certificates, coset growth.
    Growth(GrowthArgs),
    /// Run the bundled verification suite.
    VerifyPaper(VerifyArgs),
}

#[derive(Subcommand)]
enum ElementAction {
    /// Order of a word, with a finite or certified-infinite verdict.
    Order {
        #[command(flatten)]
        pick: GroupPick,
        /// Word in the generators, e.g. "a d" or "(a b)^2 c^-1".
        #[arg(long)]
        word: String,
        /// Node budget for the word problem.
        #[arg(long, default_value_t = element::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Root permutation and first-level sections of a word.
    Decompose {
        #[command(flatten)]
        pick: GroupPick,
        #[arg(long)]
        word: String,
    },
    /// Check that a word is the identity (exit 1 when it is not).
    Trivial {
        #[command(flatten)]
        pick: GroupPick,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = element::DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand)]
enum QuotientAction {
    /// Order of G_n.
    Order {
        #[command(flatten)]
        pick: GroupPick,
        #[arg(long)]
        level: usize,
    },
    /// Profile (d-1) log_d|G_n| / d^n for n up to the given level.
    Hausdorff {
        #[command(flatten)]
        pick: GroupPick,
        #[arg(long)]
        level: usize,
    },
}

#[derive(Subcommand)]
enum SubgroupAction {
    /// Order of an expression evaluated in G_n.
    Order {
        #[command(flatten)]
        pick: GroupPick,
        #[arg(long)]
        level: usize,
        /// Expression, e.g. "ncl{(a b)^2}", "comm(whole, whole)", "stab(2)",
        /// "prod(at(gen{b}, 0), rist(1))", "pow(ncl{d}, 2)".
        #[arg(long)]
        expr: String,
    },
    /// Index of --sub inside --in (exit 1 when not a subgroup).
    Index {
        #[command(flatten)]
        pick: GroupPick,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        sub: String,
        #[arg(long = "in", default_value = "whole")]
        sup: String,
    },
    /// Check --sub is contained in --in (exit 1 when it is not).
    Contains {
        #[command(flatten)]
        pick: GroupPick,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        sub: String,
        #[arg(long = "in", default_value = "whole")]
        sup: String,
    },
    /// Check the copies of the expression at level-1 vertices land inside
    /// the expression one level up (exit 1 when branching fails).
    Branch {
        #[command(flatten)]
        pick: GroupPick,
        /// Level n of the check; compares levels n-1 and n, so n >= 2.
        #[arg(long)]
        level: usize,
        #[arg(long)]
        expr: String,
    },
}

#[derive(Subcommand)]
enum ParabolicAction {
    /// Orbits of the ray stabilizer on level-n vertices.
    Orbits {
        #[command(flatten)]
        pick: GroupPick,
        #[arg(long)]
        level: usize,
        /// Periodic ray as a digit string, e.g. "1" or "01"; defaults to
        /// (d-1)^infinity.
        #[arg(long)]
        ray: Option<String>,
    },
    /// Verify the stored product decompositions of the ray stabilizer and
    /// its companion subgroups at this level.
    Decompose {
        #[command(flatten)]
        pick: GroupPick,
        #[arg(long)]
        level: usize,
    },
}

#[derive(Args)]
struct HeckeArgs {
    #[command(flatten)]
    pick: GroupPick,
    #[arg(long)]
    level: usize,
    /// Periodic ray as a digit string; defaults to (d-1)^infinity.
    #[arg(long)]
    ray: Option<String>,
    /// What to compute.
    #[arg(long, value_enum)]
    what: HeckeWhat,
    /// Seed for the random orbital combinations behind `degrees`.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeckeWhat {
    /// Number of orbital matrices (the double-coset count).
    Rank,
    /// Commutativity of the orbital algebra (exit 1 when it fails).
    Gelfand,
    /// Constituent degrees from eigenvalue multiplicities, trace-checked.
    Degrees,
}

#[derive(Subcommand)]
enum LpresAction {
    /// Certify the stored relators (fixed plus substitution iterates) are
    /// trivial in the group.
    Verify {
        #[command(flatten)]
        pick: GroupPick,
        /// Apply the substitution 0..=N times to each iterated relator.
        #[arg(long, default_value_t = 3)]
        iterates: usize,
        /// Node budget per relator for the word problem.
        #[arg(long, default_value_t = element::DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Args)]
struct GrowthArgs {
    #[command(flatten)]
    pick: GroupPick,
    /// What to compute.
    #[arg(long, value_enum)]
    what: GrowthWhat,
    /// Ball or coset-growth radius.
    #[arg(long, default_value_t = 10)]
    radius: usize,
    /// Weight parameter, a decimal or fraction in (root, 1); the table is
    /// exact rational arithmetic.
    #[arg(long, default_value = "0.811")]
    theta: String,
    /// Mixing bound in (0, 1) for the certificate's word filter.
    #[arg(long, default_value = "0.9")]
    eta: String,
    /// Longest sampled word length for the certificate (even syllable
    /// counts up to this length).
    #[arg(long, default_value_t = 12)]
    sample_len: usize,
    /// Tree depth used to separate cosets in coset growth.
    #[arg(long, default_value_t = 10)]
    level_cap: usize,
    /// Canonical-key budget for exact ball enumeration.
    #[arg(long, default_value_t = growth::DEFAULT_KEY_BUDGET)]
    key_budget: usize,
    /// Periodic ray for coset growth; defaults to (d-1)^infinity.
    #[arg(long)]
    ray: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GrowthWhat {
    /// Exact ball sizes |B(r)| for r up to the radius.
    Balls,
    /// Section-contraction certificate over even alternating words.
    Certificate,
    /// Orbit growth of the ray basepoint under balls of increasing radius.
    Coset,
    /// The weight of each admissible letter at the given theta.
    Weights,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run: all, G, Gtilde, gamma, gamma-bar, gamma-bar-bar.
    #[arg(long)]
    suite: String,
    /// Word-problem budget for orders and relator certification.
    #[arg(long, default_value_t = element::DEFAULT_BUDGET)]
    order_budget: u64,
    /// Random words per torsion check.
    #[arg(long, default_value_t = 200)]
    torsion_samples: usize,
}

#[derive(Serialize)]
struct Report {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    group: Option<String>,
    parameters: Value,
    result: Value,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    millis: Option<u128>,
}

struct Usage(String);

fn report(
    command: &str,
    group: Option<&str>,
    parameters: Value,
    result: Value,
    status: Status,
) -> Report {
    Report {
        command: command.to_string(),
        group: group.map(str::to_string),
        parameters,
        result,
        status,
        millis: None,
    }
}

/// Big integers as "base^e = decimal" when the value is a pure power of the
/// alphabet size, else the plain decimal string.
fn pow_string(x: &BigUint, base: usize) -> String {
    if x.is_one() || base < 2 {
        return x.to_string();
    }
    let b = BigUint::from(base);
    let mut e = 0u64;
    let mut rem = x.clone();
    while (&rem % &b).is_zero() {
        rem /= &b;
        e += 1;
    }
    if rem.is_one() {
        format!("{base}^{e} = {x}")
    } else {
        x.to_string()
    }
}

fn u128_value(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn ray_of(text: Option<&str>, d: usize) -> Result<RaySpec, Usage> {
    match text {
        Some(t) => RaySpec::parse(t, d).map_err(|e| Usage(e.to_string())),
        None => Ok(RaySpec::standard(d)),
    }
}

fn parse_expr(text: &str, g: &GroupDef) -> Result<SubgroupExpr, Usage> {
    SubgroupExpr::parse(text, g).map_err(|e| Usage(e.to_string()))
}

fn parse_theta(text: &str) -> Result<BigRational, Usage> {
    parse_ratio(text).map_err(|e| Usage(e.to_string()))
}

fn run(cmd: &Cmd, timing: bool) -> Result<Report, Usage> {
    match cmd {
        Cmd::Element { action } => run_element(action),
        Cmd::Quotient { action } => run_quotient(action),
        Cmd::Subgroup { action } => run_subgroup(action),
        Cmd::Parabolic { action } => run_parabolic(action),
        Cmd::Hecke(args) => run_hecke(args),
        Cmd::Lpres { action } => run_lpres(action),
        Cmd::Growth(args) => run_growth(args),
        Cmd::VerifyPaper(args) => run_verify(args, timing),
    }
}

fn run_element(action: &ElementAction) -> Result<Report, Usage> {
    match action {
        ElementAction::Order { pick, word, budget } => {
            let g = pick.resolve()?;
            let e = Element::parse(g.clone(), word).map_err(|e| Usage(e.to_string()))?;
            let (result, status) = match order(&e, *budget) {
                OrderResult::Finite(o) => (u128_value(o), Status::Pass),
                OrderResult::InfiniteCertified(w) => (
                    json!({
                        "order": "infinite",
                        "witness": {
                            "revisited_word": w.revisited_word,
                            "cycle_multiplier": u128_value(w.cycle_multiplier),
                            "steps": w.steps.iter().map(|s| json!({
                                "word": s.word,
                                "root_order": s.root_order,
                                "vertex": s.vertex,
                            })).collect::<Vec<_>>(),
                        },
                    }),
                    Status::Pass,
                ),
                OrderResult::Exhausted => (Value::Null, Status::Exhausted),
            };
            Ok(report(
                "element order",
                Some(&g.name),
                json!({"word": word, "budget": budget}),
                result,
                status,
            ))
        }
        ElementAction::Decompose { pick, word } => {
            let g = pick.resolve()?;
            let e = Element::parse(g.clone(), word).map_err(|e| Usage(e.to_string()))?;
            let dec = wreath_decompose(&e);
            let result = json!({
                "root": dec.root,
                "sections": dec.sections.iter()
                    .map(|s| g.display_word(s.word()))
                    .collect::<Vec<_>>(),
            });
            Ok(report(
                "element decompose",
                Some(&g.name),
                json!({"word": word}),
                result,
                Status::Pass,
            ))
        }
        ElementAction::Trivial { pick, word, budget } => {
            let g = pick.resolve()?;
            let e = Element::parse(g.clone(), word).map_err(|e| Usage(e.to_string()))?;
            let (result, status) = match is_trivial(&e, *budget) {
                Tri::True => (json!({"trivial": true}), Status::Pass),
                Tri::False => (json!({"trivial": false}), Status::Fail),
                Tri::Exhausted => (Value::Null, Status::Exhausted),
            };
            Ok(report(
                "element trivial",
                Some(&g.name),
                json!({"word": word, "budget": budget}),
                result,
                status,
            ))
        }
    }
}

fn run_quotient(action: &QuotientAction) -> Result<Report, Usage> {
    match action {
        QuotientAction::Order { pick, level } => {
            let g = pick.resolve()?;
            let o = quotient_order(&g, *level);
            Ok(report(
                "quotient order",
                Some(&g.name),
                json!({"level": level}),
                Value::String(pow_string(&o, g.d)),
                Status::Pass,
            ))
        }
        QuotientAction::Hausdorff { pick, level } => {
            let g = pick.resolve()?;
            let rows = hausdorff_profile(&g, *level);
            let result = json!({
                "rows": rows.iter().map(|r| json!({
                    "level": r.n,
                    "exponent": r.exponent,
                    "ratio": r.ratio.to_string(),
                    "value": rat_f64(&r.ratio),
                })).collect::<Vec<_>>(),
            });
            Ok(report(
                "quotient hausdorff",
                Some(&g.name),
                json!({"level": level}),
                result,
                Status::Pass,
            ))
        }
    }
}

fn run_subgroup(action: &SubgroupAction) -> Result<Report, Usage> {
    match action {
        SubgroupAction::Order { pick, level, expr } => {
            let g = pick.resolve()?;
            let parsed = parse_expr(expr, &g)?;
            let ctx = QuotientContext::new(g.clone(), *level);
            let grp = ctx.eval(&parsed).map_err(|e| Usage(e.to_string()))?;
            Ok(report(
                "subgroup order",
                Some(&g.name),
                json!({"level": level, "expr": expr}),
                json!({"order": pow_string(&grp.order(), g.d)}),
                Status::Pass,
            ))
        }
        SubgroupAction::Index { pick, level, sub, sup } => {
            let g = pick.resolve()?;
            let sub_expr = parse_expr(sub, &g)?;
            let sup_expr = parse_expr(sup, &g)?;
            let ctx = QuotientContext::new(g.clone(), *level);
            let a = ctx.eval(&sub_expr).map_err(|e| Usage(e.to_string()))?;
            let b = ctx.eval(&sup_expr).map_err(|e| Usage(e.to_string()))?;
            let (result, status) = match index(&a, &b) {
                Ok(ix) => (json!({"index": pow_string(&ix, g.d)}), Status::Pass),
                Err(e) => (json!({"error": e.to_string()}), Status::Fail),
            };
            Ok(report(
                "subgroup index",
                Some(&g.name),
                json!({"level": level, "sub": sub, "in": sup}),
                result,
                status,
            ))
        }
        SubgroupAction::Contains { pick, level, sub, sup } => {
            let g = pick.resolve()?;
            let sub_expr = parse_expr(sub, &g)?;
            let sup_expr = parse_expr(sup, &g)?;
            let held = verify_containment(&sub_expr, &sup_expr, &g, *level)
                .map_err(|e| Usage(e.to_string()))?;
            let status = if held { Status::Pass } else { Status::Fail };
            Ok(report(
                "subgroup contains",
                Some(&g.name),
                json!({"level": level, "sub": sub, "in": sup}),
                json!({"contains": held}),
                status,
            ))
        }
        SubgroupAction::Branch { pick, level, expr } => {
            let g = pick.resolve()?;
            if *level < 2 {
                return Err(Usage("--level must be at least 2 for branch".to_string()));
            }
            let parsed = parse_expr(expr, &g)?;
            let held =
                verify_regular_branch(&g, &parsed, *level).map_err(|e| Usage(e.to_string()))?;
            let status = if held { Status::Pass } else { Status::Fail };
            Ok(report(
                "subgroup branch",
                Some(&g.name),
                json!({"level": level, "expr": expr}),
                json!({"branching": held}),
                status,
            ))
        }
    }
}

fn run_parabolic(action: &ParabolicAction) -> Result<Report, Usage> {
    match action {
        ParabolicAction::Orbits { pick, level, ray } => {
            let g = pick.resolve()?;
            let spec = ray_of(ray.as_deref(), g.d)?;
            let rep = orbit_report(&g, &spec, *level);
            let ok = rep.count == rep.predicted_count && rep.shapes_match;
            let result = json!({
                "count": rep.count,
                "predicted": rep.predicted_count,
                "shapes_match": rep.shapes_match,
                "orbit_sizes": rep.orbits.iter().map(Vec::len).collect::<Vec<_>>(),
            });
            let status = if ok { Status::Pass } else { Status::Fail };
            Ok(report(
                "parabolic orbits",
                Some(&g.name),
                json!({"level": level, "ray": ray.as_deref().unwrap_or("standard")}),
                result,
                status,
            ))
        }
        ParabolicAction::Decompose { pick, level } => {
            let g = pick.resolve()?;
            let checks =
                verify_parabolic_decomposition(&g, *level).map_err(|e| Usage(e.to_string()))?;
            let all_ok = checks.iter().all(|c| c.ok);
            let result = json!({
                "checks": checks.iter().map(|c| json!({
                    "name": c.name,
                    "pieces": c.pieces_contained.iter().map(|(piece, contained)| json!({
                        "piece": piece, "contained": contained,
                    })).collect::<Vec<_>>(),
                    "extras": c.extras_contained.iter().map(|(extra, contained)| json!({
                        "extra": extra, "contained": contained,
                    })).collect::<Vec<_>>(),
                    "generated_order": pow_string(&c.generated_order, g.d),
                    "target_order": pow_string(&c.target_order, g.d),
                    "index_formula_ok": c.index_formula_ok,
                    "ok": c.ok,
                })).collect::<Vec<_>>(),
            });
            let status = if all_ok { Status::Pass } else { Status::Fail };
            Ok(report(
                "parabolic decompose",
                Some(&g.name),
                json!({"level": level}),
                result,
                status,
            ))
        }
    }
}

fn run_hecke(args: &HeckeArgs) -> Result<Report, Usage> {
    let g = args.pick.resolve()?;
    let spec = ray_of(args.ray.as_deref(), g.d)?;
    let params = json!({
        "level": args.level,
        "ray": args.ray.as_deref().unwrap_or("standard"),
        "seed": args.seed,
    });
    let o = match orbitals(&g, &spec, args.level) {
        Ok(o) => o,
        Err(e) => {
            return Ok(report(
                "hecke",
                Some(&g.name),
                params,
                json!({"error": e.to_string()}),
                Status::Fail,
            ));
        }
    };
    let (what, result, status) = match args.what {
        HeckeWhat::Rank => (
            "rank",
            json!({"rank": o.rank(), "row_sums": o.row_sums()}),
            Status::Pass,
        ),
        HeckeWhat::Gelfand => {
            let commutative = check_gelfand(&o);
            let status = if commutative { Status::Pass } else { Status::Fail };
            ("gelfand", json!({"commutative": commutative}), status)
        }
        HeckeWhat::Degrees => match decomposition_degrees(&o, args.seed) {
            Ok(rep) => {
                let status = if rep.commutative && rep.predicted_match {
                    Status::Pass
                } else {
                    Status::Fail
                };
                let mut payload = json!({
                    "rank": rep.rank,
                    "commutative": rep.commutative,
                    "degrees": rep.degrees,
                    "degree_sum": rep.degree_sum,
                    "predicted": rep.predicted,
                    "predicted_match": rep.predicted_match,
                });
                if let Some(note) = rep.prediction_note {
                    payload["note"] = json!(note);
                }
                ("degrees", payload, status)
            }
            Err(e @ DegreeError::NoConvergence { .. }) => {
                ("degrees", json!({"error": e.to_string()}), Status::Exhausted)
            }
            Err(e) => ("degrees", json!({"error": e.to_string()}), Status::Fail),
        },
    };
    Ok(report(
        &format!("hecke {what}"),
        Some(&g.name),
        params,
        result,
        status,
    ))
}

fn run_lpres(action: &LpresAction) -> Result<Report, Usage> {
    match action {
        LpresAction::Verify { pick, iterates, budget } => {
            let g = pick.resolve()?;
            let p = builtin_lpresentation(&g)
                .ok_or_else(|| Usage(format!("no stored presentation for {}", g.name)))?;
            let rep = verify_lpresentation(&g, &p, *iterates, *budget);
            let words: Vec<Word> = rep.entries.iter().map(|e| e.word.clone()).collect();
            let status = if !rep.failures.is_empty() {
                Status::Fail
            } else if !rep.exhausted.is_empty() {
                Status::Exhausted
            } else {
                Status::Pass
            };
            let result = json!({
                "relators": rep.entries.iter().map(|entry| json!({
                    "source": match entry.source {
                        RelatorSource::Fixed(i) => format!("fixed[{i}]"),
                        RelatorSource::Iterated(seed, step) =>
                            format!("iterated[{seed}] step {step}"),
                    },
                    "length": entry.word.len(),
                    "verdict": match entry.verdict {
                        Tri::True => "trivial",
                        Tri::False => "nontrivial",
                        Tri::Exhausted => "unknown",
                    },
                })).collect::<Vec<_>>(),
                "all_trivial": rep.all_trivial(),
                "even_length": parity_check(&words),
            });
            Ok(report(
                "lpres verify",
                Some(&g.name),
                json!({"iterates": iterates, "budget": budget}),
                result,
                status,
            ))
        }
    }
}

fn run_growth(args: &GrowthArgs) -> Result<Report, Usage> {
    let g = args.pick.resolve()?;
    match args.what {
        GrowthWhat::Balls => {
            let gens: Vec<Word> = (0..g.gen_count())
                .map(|i| vec![Letter::pos(i as GenId)])
                .collect();
            let rep = ball_sizes(&g, &gens, args.radius, args.key_budget);
            let status = if rep.complete { Status::Pass } else { Status::Exhausted };
            Ok(report(
                "growth balls",
                Some(&g.name),
                json!({"radius": args.radius, "key_budget": args.key_budget}),
                json!({"sizes": rep.sizes, "complete": rep.complete}),
                status,
            ))
        }
        GrowthWhat::Certificate => {
            let theta = parse_theta(&args.theta)?;
            let eta = parse_theta(&args.eta)?;
            let rep = contraction_certificate(&g, &theta, &eta, args.sample_len)
                .map_err(|e| Usage(e.to_string()))?;
            let status = if rep.pass { Status::Pass } else { Status::Fail };
            Ok(report(
                "growth certificate",
                Some(&g.name),
                json!({
                    "theta": args.theta,
                    "eta": args.eta,
                    "sample_len": args.sample_len,
                }),
                json!({
                    "sample_size": rep.sample_size,
                    "max_ratio": rep.max_ratio,
                    "argmax": rep.argmax,
                    "x_pure_ratio": rep.x_pure_ratio,
                    "zeta": rep.zeta,
                    "zeta_theta_on_word_side": rep.zeta_theta_on_word_side,
                    "pass": rep.pass,
                }),
                status,
            ))
        }
        GrowthWhat::Coset => {
            let spec = ray_of(args.ray.as_deref(), g.d)?;
            let sizes = coset_growth(&g, &spec, args.radius, args.level_cap);
            let slope = fit_loglog_slope(&sizes);
            Ok(report(
                "growth coset",
                Some(&g.name),
                json!({
                    "radius": args.radius,
                    "level_cap": args.level_cap,
                    "ray": args.ray.as_deref().unwrap_or("standard"),
                }),
                json!({"sizes": sizes, "loglog_slope": slope}),
                Status::Pass,
            ))
        }
        GrowthWhat::Weights => {
            let theta = parse_theta(&args.theta)?;
            let wf = weight_table(&theta).map_err(|e| Usage(e.to_string()))?;
            let violations = wf.subadditivity_violations();
            let status = if violations.is_empty() { Status::Pass } else { Status::Fail };
            Ok(report(
                "growth weights",
                Some(&g.name),
                json!({"theta": args.theta}),
                json!({
                    "theta": wf.theta().to_string(),
                    "weights": wf.entries().iter().map(|(letters, v)| json!({
                        "letters": letters,
                        "exact": v.to_string(),
                        "value": rat_f64(v),
                        "printed": format!("{:.2}", rat_f64(v)),
                    })).collect::<Vec<_>>(),
                    "min_weight": wf.min_weight().to_string(),
                    "subadditive": violations.is_empty(),
                }),
                status,
            ))
        }
    }
}

fn suite_groups(token: &str) -> Option<Vec<String>> {
    match token {
        "all" => Some(Vec::new()),
        "G" => Some(vec!["grigorchuk".to_string()]),
        "Gtilde" => Some(vec!["grigorchuk-tilde".to_string()]),
        "gamma" => Some(vec!["gamma".to_string()]),
        "gamma-bar" => Some(vec!["gamma-bar".to_string()]),
        "gamma-bar-bar" => Some(vec!["gamma-bar-bar".to_string()]),
        _ => None,
    }
}

fn run_verify(args: &VerifyArgs, timing: bool) -> Result<Report, Usage> {
    let groups = suite_groups(&args.suite).ok_or_else(|| {
        Usage(format!(
            "unknown suite {:?}; expected all, G, Gtilde, gamma, gamma-bar, or gamma-bar-bar",
            args.suite
        ))
    })?;
    let opts = VerifyOptions {
        groups,
        order_budget: args.order_budget,
        torsion_samples: args.torsion_samples,
    };
    let items = verify_paper(&opts);
    let status = if items.iter().any(|i| i.status == Status::Fail) {
        Status::Fail
    } else if items.iter().any(|i| i.status == Status::Exhausted) {
        Status::Exhausted
    } else {
        Status::Pass
    };
    let result = json!({
        "items": items.iter().map(|it| {
            let mut m = json!({
                "id": it.id,
                "name": it.name,
                "status": it.status,
                "detail": it.detail,
            });
            if timing {
                m["millis"] = json!(it.millis as u64);
            }
            m
        }).collect::<Vec<_>>(),
        "passed": items.iter().filter(|i| i.status == Status::Pass).count(),
        "failed": items.iter().filter(|i| i.status == Status::Fail).count(),
        "exhausted": items.iter().filter(|i| i.status == Status::Exhausted).count(),
    });
    Ok(report(
        "verify-paper",
        None,
        json!({
            "suite": args.suite,
            "order_budget": args.order_budget,
            "torsion_samples": args.torsion_samples,
        }),
        result,
        status,
    ))
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&format!("{prefix}.{k}"), x, rows);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, rows);
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn to_tsv(r: &Report) -> String {
    let mut rows: Vec<(String, String)> = vec![("command".to_string(), r.command.clone())];
    if let Some(g) = &r.group {
        rows.push(("group".to_string(), g.clone()));
    }
    flatten("parameters", &r.parameters, &mut rows);
    flatten("result", &r.result, &mut rows);
    let status = match r.status {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Exhausted => "exhausted",
    };
    rows.push(("status".to_string(), status.to_string()));
    if let Some(ms) = r.millis {
        rows.push(("millis".to_string(), ms.to_string()));
    }
    let mut out = String::from("field\tvalue\n");
    for (k, v) in rows {
        out.push_str(&k);
        out.push('\t');
        out.push_str(&v);
        out.push('\n');
    }
    out
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let start = Instant::now();
    match run(&cli.cmd, cli.timing) {
        Ok(mut rep) => {
            if cli.timing {
                rep.millis = Some(start.elapsed().as_millis());
            }
            let text = match cli.format {
                Format::Json => {
                    let mut s =
                        serde_json::to_string_pretty(&rep).expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Tsv => to_tsv(&rep),
            };
            {
                use std::io::Write;
                let _ = std::io::stdout().lock().write_all(text.as_bytes());
            }
            let code = match rep.status {
                Status::Pass => 0,
                Status::Fail => 1,
                Status::Exhausted => 2,
            };
            std::process::exit(code);
        }
        Err(Usage(msg)) => {
            eprintln!("usage error: {msg}");
            std::process::exit(64);
        }
    }
}
