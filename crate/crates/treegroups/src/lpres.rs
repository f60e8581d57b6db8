//! L-presentations: finitely many fixed relators plus the images of finitely
//! many seed relators under an iterated substitution endomorphism, verified
//! against the automaton groups through the word-problem solver.

use std::sync::Arc;

use thiserror::Error;

use crate::catalog::{inverse_word, CatalogError, GroupDef, Letter, Word};
use crate::element::{is_trivial, Element, Tri};

/// A presentation `⟨gens | fixed, σ^i(iterated) for i ≥ 0⟩` where `σ` is the
/// substitution sending each generator to a word over the same generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPresentation {
    gens: Vec<String>,
    fixed: Vec<Word>,
    iterated: Vec<Word>,
    /// Image of generator `i` under the substitution.
    substitution: Vec<Word>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LpresError {
    #[error("unknown section {0:?}; expected fixed:, iterated:, subst:")]
    Section(String),
    #[error("missing subst: section")]
    MissingSubstitution,
    #[error("substitution image missing for generator {0:?}")]
    MissingImage(String),
    #[error("substitution arrow must be written name -> word, got {0:?}")]
    Arrow(String),
    #[error("unknown generator {0:?} on the left of a substitution rule")]
    UnknownGenerator(String),
    #[error(transparent)]
    Word(#[from] CatalogError),
}

impl LPresentation {
    /// Parse the storage block: lines `fixed: w, w, ...`,
    /// `iterated: w, w, ...`, `subst: g -> w; g -> w; ...`.
    /// Words are parsed with the group's generator names.
    pub fn parse(text: &str, group: &Arc<GroupDef>) -> Result<Self, LpresError> {
        let gens: Vec<String> = group.generators.iter().map(|g| g.name.clone()).collect();
        let mut fixed = Vec::new();
        let mut iterated = Vec::new();
        let mut substitution: Vec<Option<Word>> = vec![None; gens.len()];
        let mut have_subst = false;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| LpresError::Section(line.to_string()))?;
            match head.trim() {
                "fixed" | "iterated" => {
                    let out = if head.trim() == "fixed" {
                        &mut fixed
                    } else {
                        &mut iterated
                    };
                    for part in rest.split(',') {
                        let part = part.trim();
                        if !part.is_empty() {
                            out.push(group.parse_word(part)?);
                        }
                    }
                }
                "subst" => {
                    have_subst = true;
                    for rule in rest.split(';') {
                        let rule = rule.trim();
                        if rule.is_empty() {
                            continue;
                        }
                        let (name, image) = rule
                            .split_once("->")
                            .ok_or_else(|| LpresError::Arrow(rule.to_string()))?;
                        let name = name.trim();
                        let idx = gens
                            .iter()
                            .position(|g| g == name)
                            .ok_or_else(|| LpresError::UnknownGenerator(name.to_string()))?;
                        substitution[idx] = Some(group.parse_word(image.trim())?);
                    }
                }
                other => return Err(LpresError::Section(other.to_string())),
            }
        }
        if !have_subst {
            return Err(LpresError::MissingSubstitution);
        }
        let substitution = substitution
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| LpresError::MissingImage(gens[i].clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LPresentation {
            gens,
            fixed,
            iterated,
            substitution,
        })
    }

    fn show(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "e".to_string();
        }
        w.iter()
            .map(|l| {
                let name = &self.gens[l.gen as usize];
                if l.inv {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// The storage block this presentation parses back from.
    pub fn render(&self) -> String {
        let words = |ws: &[Word]| {
            ws.iter()
                .map(|w| self.show(w))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let subst = self
            .gens
            .iter()
            .zip(&self.substitution)
            .map(|(g, w)| format!("{g} -> {}", self.show(w)))
            .collect::<Vec<_>>()
            .join("; ");
        format!(
            "fixed: {}\niterated: {}\nsubst: {}\n",
            words(&self.fixed),
            words(&self.iterated),
            subst
        )
    }

    pub fn generator_names(&self) -> &[String] {
        &self.gens
    }

    pub fn fixed_relators(&self) -> &[Word] {
        &self.fixed
    }

    pub fn iterated_relators(&self) -> &[Word] {
        &self.iterated
    }

    pub fn substitution_image(&self, gen: usize) -> &Word {
        &self.substitution[gen]
    }
}

/// Cancel adjacent inverse pairs until none remain. Letters are compared
/// formally; `x x` does not cancel even when `x` is an involution in the
/// group, so reduced length is a free-group invariant.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Apply the substitution `k` times, freely reducing after each pass.
pub fn substitute(p: &LPresentation, w: &[Letter], k: usize) -> Word {
    let mut cur: Word = free_reduce(w);
    for _ in 0..k {
        let mut next: Word = Vec::with_capacity(cur.len() * 3);
        for &l in &cur {
            let image = &p.substitution[l.gen as usize];
            if l.inv {
                next.extend(inverse_word(image));
            } else {
                next.extend(image.iter().copied());
            }
        }
        cur = free_reduce(&next);
    }
    cur
}

/// Where a checked relator came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelatorSource {
    Fixed(usize),
    /// Seed index and substitution step.
    Iterated(usize, usize),
}

#[derive(Clone, Debug)]
pub struct RelatorEntry {
    pub source: RelatorSource,
    pub word: Word,
    pub verdict: Tri,
}

#[derive(Clone, Debug)]
pub struct PresentationReport {
    pub entries: Vec<RelatorEntry>,
    /// Indices into `entries` with a definite nontrivial verdict.
    pub failures: Vec<usize>,
    /// Indices into `entries` where the solver ran out of budget.
    pub exhausted: Vec<usize>,
}

impl PresentationReport {
    /// Every relator was proved trivial.
    pub fn all_trivial(&self) -> bool {
        self.failures.is_empty() && self.exhausted.is_empty()
    }
}

/// Check every fixed relator and every `σ^i(seed)`, `i ≤ max_iter`, against
/// the group's word problem.
pub fn verify_lpresentation(
    group: &Arc<GroupDef>,
    p: &LPresentation,
    max_iter: usize,
    budget: u64,
) -> PresentationReport {
    let mut entries = Vec::new();
    for (i, r) in p.fixed.iter().enumerate() {
        entries.push((RelatorSource::Fixed(i), r.clone()));
    }
    for (s, seed) in p.iterated.iter().enumerate() {
        for i in 0..=max_iter {
            entries.push((RelatorSource::Iterated(s, i), substitute(p, seed, i)));
        }
    }
    let mut report = PresentationReport {
        entries: Vec::with_capacity(entries.len()),
        failures: Vec::new(),
        exhausted: Vec::new(),
    };
    for (source, word) in entries {
        let g = Element::from_word(group.clone(), &word);
        let verdict = is_trivial(&g, budget);
        let idx = report.entries.len();
        match verdict {
            Tri::True => {}
            Tri::False => report.failures.push(idx),
            Tri::Exhausted => report.exhausted.push(idx),
        }
        report.entries.push(RelatorEntry {
            source,
            word,
            verdict,
        });
    }
    report
}

#[derive(Clone, Debug, Default)]
pub struct EndomorphismReport {
    /// Relators whose substitution image is provably nontrivial.
    pub nontrivial_images: Vec<Word>,
    /// Relators whose image the solver could not settle.
    pub exhausted: Vec<Word>,
    /// Sample words whose reduced length shrank under one substitution.
    pub contractions: Vec<Word>,
}

impl EndomorphismReport {
    pub fn ok(&self) -> bool {
        self.nontrivial_images.is_empty()
            && self.exhausted.is_empty()
            && self.contractions.is_empty()
    }
}

/// The substitution must send relators to relators (checked on the full
/// family up to `max_iter`) and must not shorten the sample words.
pub fn verify_substitution_endomorphism(
    group: &Arc<GroupDef>,
    p: &LPresentation,
    sample: &[Word],
    max_iter: usize,
    budget: u64,
) -> EndomorphismReport {
    let mut report = EndomorphismReport::default();
    let mut family: Vec<Word> = p.fixed.clone();
    for seed in &p.iterated {
        for i in 0..=max_iter {
            family.push(substitute(p, seed, i));
        }
    }
    for r in &family {
        let image = substitute(p, r, 1);
        let g = Element::from_word(group.clone(), &image);
        match is_trivial(&g, budget) {
            Tri::True => {}
            Tri::False => report.nontrivial_images.push(r.clone()),
            Tri::Exhausted => report.exhausted.push(r.clone()),
        }
    }
    for w in sample {
        let before = free_reduce(w).len();
        if substitute(p, w, 1).len() < before {
            report.contractions.push(w.clone());
        }
    }
    report
}

/// All words have even reduced length.
pub fn parity_check(sample: &[Word]) -> bool {
    sample.iter().all(|w| free_reduce(w).len() % 2 == 0)
}

/// The stored presentation for a builtin group, when one is on file.
pub fn builtin_lpresentation(group: &Arc<GroupDef>) -> Option<LPresentation> {
    let text = match group.name.as_str() {
        "grigorchuk" => {
            "fixed: a^2, b^2, c^2, d^2, b c d\n\
             iterated: (a d)^4, (a d a c a c)^4\n\
             subst: a -> a c a; b -> d; c -> b; d -> c\n"
        }
        "grigorchuk-tilde" => {
            "fixed: a^2, b^2, c^2, d^2, b c b^-1 c^-1, b d b^-1 d^-1, c d c^-1 d^-1\n\
             iterated: (a c)^4, (a d)^4, (a c a d)^2, (a b)^8, (a b a b a c)^4, (a b a b a d)^4, (a b a b a c a b a b a d)^2\n\
             subst: a -> a b a; b -> d; c -> b; d -> c\n"
        }
        _ => return None,
    };
    Some(LPresentation::parse(text, group).expect("builtin presentation parses"))
}
