//! Group definitions: built-in self-similar groups, a line-oriented text
//! format for user-supplied wreath recursions, and named morphisms.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

/// Index of a generator within its [`GroupDef`].
pub type GenId = u16;

/// One letter of a group word: a generator or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Letter {
    pub gen: GenId,
    pub inv: bool,
}

impl Letter {
    pub fn pos(gen: GenId) -> Self {
        Letter { gen, inv: false }
    }

    pub fn neg(gen: GenId) -> Self {
        Letter { gen, inv: true }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }
}

/// A word over the generators of some group, rightmost letter acting first.
pub type Word = Vec<Letter>;

/// Formal inverse of a word: reverse the letters and flip each sign.
pub fn inverse_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// One generator of a wreath recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenDef {
    pub name: String,
    /// Root permutation as an image table: vertex `x` maps to `root[x]`.
    pub root: Vec<u8>,
    /// Restriction words `s|_0, …, s|_{d−1}`.
    pub restrictions: Vec<Word>,
}

/// A self-similar group: alphabet size plus generator recursions.
///
/// Equality is structural (alphabet, generator names, permutations and
/// restrictions); the `name` field is a display label and not compared.
#[derive(Clone, Debug)]
pub struct GroupDef {
    pub name: String,
    pub d: usize,
    pub generators: Vec<GenDef>,
    /// `involution[i]` is true only when generator i is certified to square
    /// to the identity; used by word reduction.
    involution: Vec<bool>,
}

impl PartialEq for GroupDef {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.generators == other.generators
    }
}

impl Eq for GroupDef {}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown builtin group `{0}`")]
    NameError(String),
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: undeclared generator `{name}`")]
    UndeclaredGenerator { line: usize, name: String },
    #[error("line {line}: permutation is not a bijection of 0..{d}")]
    NotBijection { line: usize, d: usize },
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid group definition: {0}")]
    Invalid(String),
    #[error("unknown generator name `{0}` in word")]
    UnknownGenerator(String),
}

/// Budget for the self-contained triviality check used to certify that a
/// generator is an involution at construction time. The builtins certify
/// within a handful of nodes; a user recursion that does not decide within
/// this budget is simply not flagged (sound: the flag is an optimization).
const INVOLUTION_CERT_BUDGET: u64 = 4096;

impl GroupDef {
    pub fn new(name: impl Into<String>, d: usize, generators: Vec<GenDef>) -> Result<Self, CatalogError> {
        if d < 2 {
            return Err(CatalogError::Invalid(format!("alphabet size {d} < 2")));
        }
        let mut seen = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if g.name.is_empty() {
                return Err(CatalogError::Invalid("empty generator name".into()));
            }
            if seen.insert(g.name.clone(), i).is_some() {
                return Err(CatalogError::DuplicateGenerator(g.name.clone()));
            }
            if !is_perm_of(&g.root, d) {
                return Err(CatalogError::Invalid(format!(
                    "root of `{}` is not a permutation of 0..{d}",
                    g.name
                )));
            }
            if g.restrictions.len() != d {
                return Err(CatalogError::Invalid(format!(
                    "`{}` has {} restrictions, expected {d}",
                    g.name,
                    g.restrictions.len()
                )));
            }
            for w in &g.restrictions {
                for l in w {
                    if l.gen as usize >= generators.len() {
                        return Err(CatalogError::Invalid(format!(
                            "restriction of `{}` references generator index {}",
                            g.name, l.gen
                        )));
                    }
                }
            }
        }
        let n = generators.len();
        let mut def = GroupDef { name: name.into(), d, generators, involution: vec![false; n] };
        let flags: Vec<bool> = (0..n)
            .map(|i| {
                let w = vec![Letter::pos(i as GenId), Letter::pos(i as GenId)];
                crate::element::word_is_trivial(&def, &w, INVOLUTION_CERT_BUDGET) == crate::element::Tri::True
            })
            .collect();
        def.involution = flags;
        Ok(def)
    }

    pub fn gen_count(&self) -> usize {
        self.generators.len()
    }

    pub fn gen_index(&self, name: &str) -> Option<GenId> {
        self.generators.iter().position(|g| g.name == name).map(|i| i as GenId)
    }

    pub fn gen_name(&self, id: GenId) -> &str {
        &self.generators[id as usize].name
    }

    pub fn is_involution(&self, id: GenId) -> bool {
        self.involution[id as usize]
    }

    /// Root permutation of a single letter (inverse letters get the inverse
    /// permutation).
    pub(crate) fn letter_root(&self, l: Letter) -> Vec<u8> {
        let root = &self.generators[l.gen as usize].root;
        if l.inv {
            invert_perm(root)
        } else {
            root.clone()
        }
    }

    /// Restriction of a single letter at vertex `x`, as a word:
    /// `s⁻¹|_x = (s|_{ρ⁻¹(x)})⁻¹` where `ρ` is the root of `s`.
    pub(crate) fn letter_restriction(&self, l: Letter, x: usize) -> Word {
        let g = &self.generators[l.gen as usize];
        if l.inv {
            let pre = invert_perm(&g.root)[x] as usize;
            inverse_word(&g.restrictions[pre])
        } else {
            g.restrictions[x].clone()
        }
    }

    /// Parse a word over this group's generators. Accepts whitespace-
    /// separated generator names with optional `^-1` (more generally `^k`),
    /// parenthesized subwords with integer powers like `(a b)^2`, and `e`
    /// for the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, CatalogError> {
        let tokens = tokenize_word(text)?;
        let mut pos = 0;
        let w = parse_word_seq(self, &tokens, &mut pos, 0)?;
        if pos != tokens.len() {
            return Err(CatalogError::Syntax {
                line: 1,
                col: tokens[pos].1,
                msg: format!("unexpected `{}`", tokens[pos].0.display()),
            });
        }
        Ok(w)
    }

    /// Inverse of `parse_word` for display: `e` for the empty word,
    /// otherwise space-separated letters with `^-1` on inverses.
    pub fn display_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "e".into();
        }
        let mut out = String::new();
        for (i, l) in w.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.gen_name(l.gen));
            if l.inv {
                out.push_str("^-1");
            }
        }
        out
    }
}

fn is_perm_of(p: &[u8], d: usize) -> bool {
    if p.len() != d {
        return false;
    }
    let mut seen = vec![false; d];
    for &x in p {
        if (x as usize) >= d || seen[x as usize] {
            return false;
        }
        seen[x as usize] = true;
    }
    true
}

pub(crate) fn invert_perm(p: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y as usize] = x as u8;
    }
    inv
}

fn identity_perm(d: usize) -> Vec<u8> {
    (0..d as u8).collect()
}

/// Parse a permutation in cycle notation over `0..d`, or `e` for the
/// identity: `(0 1)`, `(0 1 2)`, `(0 1)(2 3)`.
fn parse_perm(text: &str, d: usize, line: usize) -> Result<Vec<u8>, CatalogError> {
    let text = text.trim();
    if text == "e" {
        return Ok(identity_perm(d));
    }
    let mut img = identity_perm(d);
    let mut moved = vec![false; d];
    let mut rest = text;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let Some(stripped) = rest.strip_prefix('(') else {
            return Err(CatalogError::Syntax {
                line,
                col: text.len() - rest.len() + 1,
                msg: "expected `(` starting a cycle".into(),
            });
        };
        let Some(close) = stripped.find(')') else {
            return Err(CatalogError::Syntax { line, col: text.len() - rest.len() + 1, msg: "unclosed cycle".into() });
        };
        let body = &stripped[..close];
        rest = &stripped[close + 1..];
        let mut cycle = Vec::new();
        for tok in body.split_whitespace() {
            let v: usize = tok.parse().map_err(|_| CatalogError::Syntax {
                line,
                col: 1,
                msg: format!("bad cycle entry `{tok}`"),
            })?;
            if v >= d {
                return Err(CatalogError::NotBijection { line, d });
            }
            if moved[v] {
                return Err(CatalogError::NotBijection { line, d });
            }
            moved[v] = true;
            cycle.push(v);
        }
        if cycle.len() < 2 {
            return Err(CatalogError::Syntax { line, col: 1, msg: "cycle needs at least two points".into() });
        }
        for i in 0..cycle.len() {
            img[cycle[i]] = cycle[(i + 1) % cycle.len()] as u8;
        }
    }
    Ok(img)
}

fn render_perm(p: &[u8]) -> String {
    let mut out = String::new();
    let mut seen = vec![false; p.len()];
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        let mut first = true;
        while !seen[x] {
            seen[x] = true;
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{x}");
            first = false;
            x = p[x] as usize;
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum WordTok {
    Name(String),
    Open,
    Close,
    Caret,
    Int(i64),
}

impl WordTok {
    fn display(&self) -> String {
        match self {
            WordTok::Name(s) => s.clone(),
            WordTok::Open => "(".into(),
            WordTok::Close => ")".into(),
            WordTok::Caret => "^".into(),
            WordTok::Int(k) => k.to_string(),
        }
    }
}

fn tokenize_word(text: &str) -> Result<Vec<(WordTok, usize)>, CatalogError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((WordTok::Open, col));
                i += 1;
            }
            ')' => {
                toks.push((WordTok::Close, col));
                i += 1;
            }
            '^' => {
                toks.push((WordTok::Caret, col));
                i += 1;
            }
            '-' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: i64 = text[start..i].parse().map_err(|_| CatalogError::Syntax {
                    line: 1,
                    col,
                    msg: format!("bad integer `{}`", &text[start..i]),
                })?;
                toks.push((WordTok::Int(n), col));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len() && ((bytes[i] as char).is_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((WordTok::Name(text[start..i].into()), col));
            }
            other => {
                return Err(CatalogError::Syntax { line: 1, col, msg: format!("unexpected character `{other}`") })
            }
        }
    }
    Ok(toks)
}

fn repeat_word(w: &[Letter], k: i64) -> Word {
    if k == 0 || w.is_empty() {
        return Word::new();
    }
    let base: Word = if k < 0 { inverse_word(w) } else { w.to_vec() };
    let times = k.unsigned_abs() as usize;
    let mut out = Word::with_capacity(base.len() * times);
    for _ in 0..times {
        out.extend_from_slice(&base);
    }
    out
}

fn parse_word_seq(
    group: &GroupDef,
    toks: &[(WordTok, usize)],
    pos: &mut usize,
    depth: usize,
) -> Result<Word, CatalogError> {
    let mut out = Word::new();
    while *pos < toks.len() {
        match &toks[*pos].0 {
            WordTok::Close => {
                if depth == 0 {
                    return Err(CatalogError::Syntax { line: 1, col: toks[*pos].1, msg: "unmatched `)`".into() });
                }
                break;
            }
            WordTok::Open => {
                *pos += 1;
                let inner = parse_word_seq(group, toks, pos, depth + 1)?;
                if *pos >= toks.len() || toks[*pos].0 != WordTok::Close {
                    return Err(CatalogError::Syntax { line: 1, col: 0, msg: "unclosed `(`".into() });
                }
                *pos += 1;
                let k = parse_power(toks, pos)?.unwrap_or(1);
                out.extend(repeat_word(&inner, k));
            }
            WordTok::Name(name) => {
                let col = toks[*pos].1;
                *pos += 1;
                if name == "e" && group.gen_index("e").is_none() {
                    continue;
                }
                let Some(id) = group.gen_index(name) else {
                    let _ = col;
                    return Err(CatalogError::UnknownGenerator(name.clone()));
                };
                let k = parse_power(toks, pos)?.unwrap_or(1);
                out.extend(repeat_word(&[Letter::pos(id)], k));
            }
            other => {
                return Err(CatalogError::Syntax {
                    line: 1,
                    col: toks[*pos].1,
                    msg: format!("unexpected `{}`", other.display()),
                })
            }
        }
    }
    Ok(out)
}

fn parse_power(toks: &[(WordTok, usize)], pos: &mut usize) -> Result<Option<i64>, CatalogError> {
    if *pos < toks.len() && toks[*pos].0 == WordTok::Caret {
        *pos += 1;
        match toks.get(*pos) {
            Some((WordTok::Int(k), _)) => {
                *pos += 1;
                Ok(Some(*k))
            }
            _ => Err(CatalogError::Syntax { line: 1, col: 0, msg: "expected integer after `^`".into() }),
        }
    } else {
        Ok(None)
    }
}

/// The built-in groups by name.
///
/// - `grigorchuk`: binary tree; `a` swaps the top branches, `b=(a,c)`,
///   `c=(a,d)`, `d=(e,b)`.
/// - `grigorchuk-tilde`: binary tree; `b=(a,c)`, `c=(e,d)`, `d=(e,b)`.
/// - `gamma`: ternary tree; `a` is the 3-cycle `(0 1 2)`, `t=(a,e,t)`.
/// - `gamma-bar`: ternary tree; `t=(a,a,t)`.
/// - `gamma-bar-bar`: ternary tree; `t=(a,a²,t)`.
/// - `odometer`: binary adding machine `t = (0 1)·(e,t)`.
pub fn builtin(name: &str) -> Result<GroupDef, CatalogError> {
    let text = match name {
        "grigorchuk" => {
            "alphabet: 2\n\
             gen a: (0 1) ; [e, e]\n\
             gen b: e ; [a, c]\n\
             gen c: e ; [a, d]\n\
             gen d: e ; [e, b]\n"
        }
        "grigorchuk-tilde" => {
            "alphabet: 2\n\
             gen a: (0 1) ; [e, e]\n\
             gen b: e ; [a, c]\n\
             gen c: e ; [e, d]\n\
             gen d: e ; [e, b]\n"
        }
        "gamma" => {
            "alphabet: 3\n\
             gen a: (0 1 2) ; [e, e, e]\n\
             gen t: e ; [a, e, t]\n"
        }
        "gamma-bar" => {
            "alphabet: 3\n\
             gen a: (0 1 2) ; [e, e, e]\n\
             gen t: e ; [a, a, t]\n"
        }
        "gamma-bar-bar" => {
            "alphabet: 3\n\
             gen a: (0 1 2) ; [e, e, e]\n\
             gen t: e ; [a, a a, t]\n"
        }
        "odometer" => {
            "alphabet: 2\n\
             gen t: (0 1) ; [e, t]\n"
        }
        other => return Err(CatalogError::NameError(other.into())),
    };
    let mut def = parse_groupdef(text)?;
    def.name = name.into();
    Ok(def)
}

/// Parse a group definition file.
///
/// Format (UTF-8, line-oriented; `#` starts a comment):
///
/// ```text
/// alphabet: 2
/// gen a: (0 1) ; [e, e]
/// gen b: e ; [a, c]
/// ```
///
/// The first content line fixes the alphabet size; each `gen` line gives a
/// root permutation (`e` or disjoint cycles) and `d` comma-separated
/// restriction words (`e` or space-separated generator names, each
/// optionally suffixed `^-1`). The order of `gen` lines fixes generator
/// indices; restriction words may reference generators declared later.
pub fn parse_groupdef(text: &str) -> Result<GroupDef, CatalogError> {
    struct GenLine<'a> {
        line_no: usize,
        name: String,
        perm: &'a str,
        restr: &'a str,
    }

    let mut d: Option<usize> = None;
    let mut gen_lines: Vec<GenLine> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("alphabet:") {
            if d.is_some() {
                return Err(CatalogError::Syntax { line: line_no, col: 1, msg: "duplicate `alphabet:` line".into() });
            }
            let v: usize = rest.trim().parse().map_err(|_| CatalogError::Syntax {
                line: line_no,
                col: 1,
                msg: format!("bad alphabet size `{}`", rest.trim()),
            })?;
            d = Some(v);
        } else if let Some(rest) = line.strip_prefix("gen ") {
            if d.is_none() {
                return Err(CatalogError::Syntax {
                    line: line_no,
                    col: 1,
                    msg: "`alphabet:` must come before `gen` lines".into(),
                });
            }
            let Some(colon) = rest.find(':') else {
                return Err(CatalogError::Syntax { line: line_no, col: 1, msg: "missing `:` in gen line".into() });
            };
            let name = rest[..colon].trim().to_string();
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(CatalogError::Syntax {
                    line: line_no,
                    col: 1,
                    msg: format!("bad generator name `{name}`"),
                });
            }
            let body = &rest[colon + 1..];
            let Some(semi) = body.find(';') else {
                return Err(CatalogError::Syntax {
                    line: line_no,
                    col: 1,
                    msg: "missing `;` between permutation and restrictions".into(),
                });
            };
            gen_lines.push(GenLine { line_no, name, perm: body[..semi].trim(), restr: body[semi + 1..].trim() });
        } else {
            return Err(CatalogError::Syntax { line: line_no, col: 1, msg: format!("unrecognized line `{line}`") });
        }
    }

    let Some(d) = d else {
        return Err(CatalogError::Syntax { line: 1, col: 1, msg: "missing `alphabet:` line".into() });
    };
    if gen_lines.is_empty() {
        // A group with no generators is the trivial group; still valid.
    }

    let mut names = HashMap::new();
    for (i, g) in gen_lines.iter().enumerate() {
        if names.insert(g.name.clone(), i as GenId).is_some() {
            return Err(CatalogError::DuplicateGenerator(g.name.clone()));
        }
    }

    let mut gens = Vec::with_capacity(gen_lines.len());
    for g in &gen_lines {
        let root = parse_perm(g.perm, d, g.line_no)?;
        let restr_text = g.restr;
        if !restr_text.starts_with('[') || !restr_text.ends_with(']') {
            return Err(CatalogError::Syntax {
                line: g.line_no,
                col: 1,
                msg: "restrictions must be bracketed: [w0, w1, ...]".into(),
            });
        }
        let inner = &restr_text[1..restr_text.len() - 1];
        let parts: Vec<&str> = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').collect() };
        if parts.len() != d {
            return Err(CatalogError::Syntax {
                line: g.line_no,
                col: 1,
                msg: format!("expected {d} restriction words, found {}", parts.len()),
            });
        }
        let mut restrictions = Vec::with_capacity(d);
        for part in parts {
            restrictions.push(parse_restriction_word(part, &names, g.line_no)?);
        }
        gens.push(GenDef { name: g.name.clone(), root, restrictions });
    }

    GroupDef::new("user", d, gens)
}

fn parse_restriction_word(
    text: &str,
    names: &HashMap<String, GenId>,
    line: usize,
) -> Result<Word, CatalogError> {
    let mut out = Word::new();
    for tok in text.split_whitespace() {
        if tok == "e" && !names.contains_key("e") {
            continue;
        }
        let (base, inv) = match tok.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (tok, false),
        };
        let Some(&id) = names.get(base) else {
            return Err(CatalogError::UndeclaredGenerator { line, name: base.into() });
        };
        out.push(Letter { gen: id, inv });
    }
    Ok(out)
}

/// Render a [`GroupDef`] in the file format; `parse_groupdef` round-trips it.
pub fn render_groupdef(g: &GroupDef) -> String {
    let mut out = format!("alphabet: {}\n", g.d);
    for gen in &g.generators {
        let words: Vec<String> = gen.restrictions.iter().map(|w| g.display_word(w)).collect();
        let _ = writeln!(out, "gen {}: {} ; [{}]", gen.name, render_perm(&gen.root), words.join(", "));
    }
    out
}

/// A map between groups given on generators.
#[derive(Clone, Debug)]
pub struct NamedMorphism {
    pub source: Arc<GroupDef>,
    pub target: Arc<GroupDef>,
    /// Image word over the target, indexed by source generator.
    pub images: Vec<Word>,
}

impl NamedMorphism {
    /// Build from `(source generator name, target word)` pairs; every source
    /// generator must receive an image.
    pub fn new(
        source: Arc<GroupDef>,
        target: Arc<GroupDef>,
        images: &[(&str, &str)],
    ) -> Result<Self, CatalogError> {
        let mut table: Vec<Option<Word>> = vec![None; source.gen_count()];
        for (name, word) in images {
            let Some(id) = source.gen_index(name) else {
                return Err(CatalogError::UnknownGenerator((*name).into()));
            };
            table[id as usize] = Some(target.parse_word(word)?);
        }
        let mut out = Vec::with_capacity(table.len());
        for (i, slot) in table.into_iter().enumerate() {
            match slot {
                Some(w) => out.push(w),
                None => {
                    return Err(CatalogError::Invalid(format!(
                        "no image for generator `{}`",
                        source.gen_name(i as GenId)
                    )))
                }
            }
        }
        Ok(NamedMorphism { source, target, images: out })
    }

    /// Apply the morphism to a word over the source group.
    pub fn apply(&self, w: &[Letter]) -> Word {
        let mut out = Word::new();
        for l in w {
            let img = &self.images[l.gen as usize];
            if l.inv {
                out.extend(inverse_word(img));
            } else {
                out.extend_from_slice(img);
            }
        }
        out
    }
}

/// The embedding of the Grigorchuk group into its tilde variant:
/// a↦a, b↦bd, c↦cb, d↦dc (target letters read in the tilde group).
pub fn grigorchuk_embedding() -> NamedMorphism {
    let source = Arc::new(builtin("grigorchuk").unwrap());
    let target = Arc::new(builtin("grigorchuk-tilde").unwrap());
    NamedMorphism::new(source, target, &[("a", "a"), ("b", "b d"), ("c", "c b"), ("d", "d c")]).unwrap()
}

/// Per-relator outcome of `verify_morphism`.
#[derive(Clone, Debug)]
pub struct MorphismReport {
    pub rows: Vec<MorphismRow>,
}

#[derive(Clone, Debug)]
pub struct MorphismRow {
    pub relator: String,
    pub image: String,
    pub status: crate::element::Tri,
}

impl MorphismReport {
    pub fn all_verified(&self) -> bool {
        self.rows.iter().all(|r| r.status == crate::element::Tri::True)
    }
}

/// Check that each relator (trivial in the source) has trivial image in the
/// target, i.e. that the images satisfy the source relations. Budget
/// exhaustion is recorded per relator, not treated as failure.
pub fn verify_morphism(m: &NamedMorphism, relators: &[Word], budget: u64) -> MorphismReport {
    let mut rows = Vec::with_capacity(relators.len());
    for r in relators {
        let image = m.apply(r);
        let elem = crate::element::Element::from_word(m.target.clone(), &image);
        let status = crate::element::is_trivial(&elem, budget);
        rows.push(MorphismRow {
            relator: m.source.display_word(r),
            image: m.target.display_word(&image),
            status,
        });
    }
    MorphismReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_grigorchuk_matches_recursions() {
        let g = builtin("grigorchuk").unwrap();
        assert_eq!(g.d, 2);
        let names: Vec<&str> = g.generators.iter().map(|x| x.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c", "d"]);
        let b = &g.generators[1];
        assert_eq!(b.root, vec![0, 1]);
        assert_eq!(g.display_word(&b.restrictions[0]), "a");
        assert_eq!(g.display_word(&b.restrictions[1]), "c");
        let a = &g.generators[0];
        assert_eq!(a.root, vec![1, 0]);
        // All four generators are certified involutions.
        for i in 0..4 {
            assert!(g.is_involution(i), "generator {i} should be an involution");
        }
    }

    #[test]
    fn builtin_gamma_family() {
        let g = builtin("gamma").unwrap();
        assert_eq!(g.d, 3);
        let t = &g.generators[1];
        assert_eq!(t.root, vec![0, 1, 2]);
        assert_eq!(g.display_word(&t.restrictions[0]), "a");
        assert_eq!(g.display_word(&t.restrictions[1]), "e");
        assert_eq!(g.display_word(&t.restrictions[2]), "t");
        assert!(!g.is_involution(0));
        assert!(!g.is_involution(1));

        let gbb = builtin("gamma-bar-bar").unwrap();
        let t = &gbb.generators[1];
        assert_eq!(gbb.display_word(&t.restrictions[1]), "a a");
    }

    #[test]
    fn builtin_odometer() {
        let g = builtin("odometer").unwrap();
        assert_eq!(g.d, 2);
        let t = &g.generators[0];
        assert_eq!(t.root, vec![1, 0]);
        assert_eq!(g.display_word(&t.restrictions[0]), "e");
        assert_eq!(g.display_word(&t.restrictions[1]), "t");
        assert!(!g.is_involution(0));
    }

    #[test]
    fn unknown_builtin_is_name_error() {
        assert!(matches!(builtin("lamplighter"), Err(CatalogError::NameError(_))));
    }

    #[test]
    fn parse_single_generator() {
        let g = parse_groupdef("alphabet: 2\ngen a: (0 1) ; [e, e]\n").unwrap();
        assert_eq!(g.d, 2);
        assert_eq!(g.gen_count(), 1);
    }

    #[test]
    fn parse_full_grigorchuk_equals_builtin() {
        let text = "
            # the first Grigorchuk group
            alphabet: 2
            gen a: (0 1) ; [e, e]
            gen b: e ; [a, c]
            gen c: e ; [a, d]
            gen d: e ; [e, b]
        ";
        let parsed = parse_groupdef(text).unwrap();
        assert_eq!(parsed, builtin("grigorchuk").unwrap());
    }

    #[test]
    fn undeclared_generator_rejected() {
        let err = parse_groupdef("alphabet: 2\ngen b: e ; [a, q]\n").unwrap_err();
        assert!(matches!(err, CatalogError::UndeclaredGenerator { .. }), "{err:?}");
    }

    #[test]
    fn non_bijective_perm_rejected() {
        let err = parse_groupdef("alphabet: 2\ngen a: (0 0) ; [e, e]\n").unwrap_err();
        assert!(matches!(err, CatalogError::NotBijection { .. }), "{err:?}");
    }

    #[test]
    fn render_round_trips_all_builtins() {
        for name in ["grigorchuk", "grigorchuk-tilde", "gamma", "gamma-bar", "gamma-bar-bar", "odometer"] {
            let g = builtin(name).unwrap();
            let again = parse_groupdef(&render_groupdef(&g)).unwrap();
            assert_eq!(again, g, "round trip failed for {name}");
        }
    }

    #[test]
    fn word_parser_handles_powers_and_groups() {
        let g = builtin("grigorchuk").unwrap();
        let w = g.parse_word("(a b)^2").unwrap();
        assert_eq!(g.display_word(&w), "a b a b");
        let w = g.parse_word("a d^-1 a").unwrap();
        assert_eq!(g.display_word(&w), "a d^-1 a");
        let w = g.parse_word("(a b)^-1").unwrap();
        assert_eq!(g.display_word(&w), "b^-1 a^-1");
        let w = g.parse_word("e").unwrap();
        assert!(w.is_empty());
        assert!(g.parse_word("a q").is_err());
    }

    #[test]
    fn groupdef_equality_is_structural() {
        let mut g = builtin("grigorchuk").unwrap();
        g.name = "renamed".into();
        assert_eq!(g, builtin("grigorchuk").unwrap());
    }
}
