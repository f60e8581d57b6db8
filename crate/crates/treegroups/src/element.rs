//! Element arithmetic via wreath recursion: vertex actions, φ-decomposition,
//! the word problem, order certification, portraits, canonical keys, and the
//! nucleus iteration.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::catalog::{invert_perm, inverse_word, GenId, GroupDef, Letter, Word};

/// Default node budget for the word-problem and order solvers; also the CLI
/// default.
pub const DEFAULT_BUDGET: u64 = 100_000;

/// Three-valued answer of the word-problem solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    /// The node budget ran out before a decision; never treated as False.
    Exhausted,
}

/// Marker error for budgeted computations that did not finish.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exhausted;

pub(crate) struct Budget {
    remaining: u64,
}

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Budget { remaining: limit }
    }

    /// Consume `n` units; false when the budget is gone.
    pub(crate) fn charge(&mut self, n: u64) -> bool {
        if self.remaining >= n {
            self.remaining -= n;
            true
        } else {
            self.remaining = 0;
            false
        }
    }
}

/// A group element, stored as a reduced word over the generators.
///
/// Reduction is free reduction plus involution collapsing: for a generator
/// certified as an involution, `s⁻¹` is rewritten to `s` and `ss` cancels.
#[derive(Clone, Debug)]
pub struct Element {
    group: Arc<GroupDef>,
    word: Word,
}

impl PartialEq for Element {
    /// Word-level equality of the reduced forms (not equality in the group;
    /// use [`canonical_key`] or [`is_trivial`] for that).
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word && *self.group == *other.group
    }
}

impl Eq for Element {}

impl Element {
    pub fn identity(group: Arc<GroupDef>) -> Self {
        Element { group, word: Word::new() }
    }

    pub fn from_word(group: Arc<GroupDef>, w: &[Letter]) -> Self {
        let word = reduce_word(&group, w.iter().copied());
        Element { group, word }
    }

    pub fn parse(group: Arc<GroupDef>, text: &str) -> Result<Self, crate::catalog::CatalogError> {
        let w = group.parse_word(text)?;
        Ok(Self::from_word(group, &w))
    }

    pub fn generator(group: Arc<GroupDef>, id: GenId) -> Self {
        Element::from_word(group, &[Letter::pos(id)])
    }

    pub fn group(&self) -> &Arc<GroupDef> {
        &self.group
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn display(&self) -> String {
        self.group.display_word(&self.word)
    }

    pub fn mul(&self, other: &Element) -> Element {
        debug_assert!(*self.group == *other.group, "elements from different groups");
        let word = reduce_word(&self.group, self.word.iter().chain(other.word.iter()).copied());
        Element { group: self.group.clone(), word }
    }

    pub fn inverse(&self) -> Element {
        let word = reduce_word(&self.group, inverse_word(&self.word).into_iter());
        Element { group: self.group.clone(), word }
    }

    pub fn pow(&self, k: i64) -> Element {
        if k < 0 {
            return self.inverse().pow(-k);
        }
        self.pow_u128(k as u128)
    }

    pub(crate) fn pow_u128(&self, k: u128) -> Element {
        let mut word = Word::with_capacity(self.word.len() * (k.min(1 << 20) as usize));
        for _ in 0..k {
            for &l in &self.word {
                push_reduced(&self.group, &mut word, l);
            }
        }
        Element { group: self.group.clone(), word }
    }

    /// `g^h = hgh⁻¹`.
    pub fn conjugate(&self, h: &Element) -> Element {
        h.mul(self).mul(&h.inverse())
    }

    /// `[g,h] = ghg⁻¹h⁻¹`.
    pub fn commutator(&self, h: &Element) -> Element {
        self.mul(h).mul(&self.inverse()).mul(&h.inverse())
    }
}

pub(crate) fn push_reduced(group: &GroupDef, out: &mut Word, mut l: Letter) {
    if group.is_involution(l.gen) {
        l.inv = false;
    }
    if let Some(&top) = out.last() {
        if top.gen == l.gen && (top.inv != l.inv || group.is_involution(l.gen)) {
            out.pop();
            return;
        }
    }
    out.push(l);
}

pub(crate) fn reduce_word(group: &GroupDef, letters: impl Iterator<Item = Letter>) -> Word {
    let mut out = Word::new();
    for l in letters {
        push_reduced(group, &mut out, l);
    }
    out
}

/// Root permutation and the `d` section words of a word, all reduced.
///
/// Sections satisfy `g(xσ) = ρ(x)·(g|_x)(σ)`; for a product the recursion is
/// `(gh)|_x = g|_{ρ_h(x)}·h|_x`, applied letter by letter left to right.
pub(crate) fn decompose_word(group: &GroupDef, w: &[Letter]) -> (Vec<u8>, Vec<Word>) {
    let d = group.d;
    let mut root: Vec<u8> = (0..d as u8).collect();
    let mut secs: Vec<Word> = vec![Word::new(); d];
    for &l in w {
        let lroot = group.letter_root(l);
        let mut new_secs: Vec<Word> = Vec::with_capacity(d);
        let mut new_root = vec![0u8; d];
        for x in 0..d {
            let src = lroot[x] as usize;
            let mut sec = std::mem::take(&mut secs[src]);
            for r in group.letter_restriction(l, x) {
                push_reduced(group, &mut sec, r);
            }
            new_secs.push(sec);
            new_root[x] = root[src];
        }
        root = new_root;
        secs = new_secs;
    }
    (root, secs)
}

/// Root permutation plus section elements of `g`.
#[derive(Clone, Debug)]
pub struct WreathDecomposition {
    pub root: Vec<u8>,
    pub sections: Vec<Element>,
}

pub fn wreath_decompose(g: &Element) -> WreathDecomposition {
    let (root, secs) = decompose_word(&g.group, &g.word);
    let sections = secs
        .into_iter()
        .map(|word| Element { group: g.group.clone(), word })
        .collect();
    WreathDecomposition { root, sections }
}

/// Image of the vertex `v` (a word over `0..d`) under `g`.
pub fn act_vertex(g: &Element, v: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(v.len());
    let mut word = g.word.clone();
    for &x in v {
        debug_assert!((x as usize) < g.group.d, "vertex letter out of range");
        let (root, mut secs) = decompose_word(&g.group, &word);
        out.push(root[x as usize]);
        word = std::mem::take(&mut secs[x as usize]);
    }
    out
}

fn is_identity(root: &[u8]) -> bool {
    root.iter().enumerate().all(|(i, &x)| i == x as usize)
}

/// Budgeted word-problem solver on a raw word (used internally and by
/// `GroupDef` construction before involution flags exist).
pub(crate) fn word_is_trivial(group: &GroupDef, w: &[Letter], budget: u64) -> Tri {
    let mut bud = Budget::new(budget);
    word_is_trivial_b(group, w, &mut bud)
}

fn word_is_trivial_b(group: &GroupDef, w: &[Letter], bud: &mut Budget) -> Tri {
    let start = reduce_word(group, w.iter().copied());
    if start.is_empty() {
        return Tri::True;
    }
    let mut seen: HashSet<Word> = HashSet::new();
    let mut stack = vec![start];
    while let Some(word) = stack.pop() {
        if word.is_empty() || !seen.insert(word.clone()) {
            continue;
        }
        if !bud.charge(1) {
            return Tri::Exhausted;
        }
        let (root, secs) = decompose_word(group, &word);
        if !is_identity(&root) {
            return Tri::False;
        }
        for s in secs {
            if !s.is_empty() && !seen.contains(&s) {
                stack.push(s);
            }
        }
    }
    Tri::True
}

/// Does `g` act trivially on every level? Decided by recursive descent over
/// sections with memoization on reduced words; `False` as soon as any node
/// has a nontrivial root permutation.
pub fn is_trivial(g: &Element, budget: u64) -> Tri {
    word_is_trivial(&g.group, &g.word, budget)
}

/// Permutation images of `g` on all of `Σ^n`, encoded big-endian
/// (`v₁…v_n ↦ Σ v_i d^{n−i}`).
pub(crate) fn word_level_images(group: &GroupDef, w: &[Letter], n: usize) -> Vec<u32> {
    let mut memo: HashMap<(Word, usize), Arc<Vec<u32>>> = HashMap::new();
    let start = reduce_word(group, w.iter().copied());
    level_rec(group, &start, n, &mut memo).as_ref().clone()
}

fn level_rec(
    group: &GroupDef,
    w: &Word,
    n: usize,
    memo: &mut HashMap<(Word, usize), Arc<Vec<u32>>>,
) -> Arc<Vec<u32>> {
    if n == 0 {
        return Arc::new(vec![0]);
    }
    if let Some(hit) = memo.get(&(w.clone(), n)) {
        return hit.clone();
    }
    let d = group.d;
    let block = (d as u32).pow(n as u32 - 1);
    let mut out = vec![0u32; (d as usize) * block as usize];
    let (root, secs) = decompose_word(group, w);
    for x in 0..d {
        let sub = level_rec(group, &secs[x], n - 1, memo);
        let dst_base = root[x] as u32 * block;
        let src_base = x as u32 * block;
        for (i, &im) in sub.iter().enumerate() {
            out[src_base as usize + i] = dst_base + im;
        }
    }
    let out = Arc::new(out);
    memo.insert((w.clone(), n), out.clone());
    out
}

/// Order of a permutation given as an image table: lcm of cycle lengths,
/// `None` on u128 overflow.
pub(crate) fn perm_order_u128(images: &[u32]) -> Option<u128> {
    let mut seen = vec![false; images.len()];
    let mut order: u128 = 1;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut len: u128 = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = images[x] as usize;
            len += 1;
        }
        let g = gcd_u128(order, len);
        order = order.checked_mul(len / g)?;
    }
    Some(order)
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One step of an infinite-order certificate: from the current element,
/// raise to `root_order` and restrict to `vertex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessStep {
    pub word: String,
    pub root_order: u64,
    pub vertex: u8,
}

/// A self-recurrence of the power-section recursion: the chain revisits a
/// previously seen canonical key with the product of root orders along the
/// cycle ≥ 2, which forces `order(g) = order(g)/multiplier` and hence
/// rules out finite order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfiniteWitness {
    pub steps: Vec<WitnessStep>,
    pub revisited_word: String,
    pub cycle_multiplier: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderResult {
    Finite(u128),
    InfiniteCertified(InfiniteWitness),
    Exhausted,
}

/// Hard caps for the finite-certification phase of [`order`].
const ORDER_LEVEL_POINT_CAP: u64 = 1 << 13;
const ORDER_POWER_LETTER_CAP: u128 = 2_000_000;

/// Order of `g` with a certificate.
///
/// Finite case: the order `o_n` of the level-`n` permutation image divides
/// `order(g)`; once `o_n` stabilizes and `is_trivial(g^{o_n})` holds, the
/// order is exactly `o_n` (minimality is automatic from divisibility both
/// ways). Infinite case: a power-section chain revisiting a canonical key
/// with cycle multiplier ≥ 2.
pub fn order(g: &Element, budget: u64) -> OrderResult {
    let mut bud = Budget::new(budget);
    if word_is_trivial_b(&g.group, &g.word, &mut bud) == Tri::True {
        return OrderResult::Finite(1);
    }

    let d = g.group.d as u64;
    let mut prev: Option<u128> = None;
    let mut rejected: HashSet<u128> = HashSet::new();
    let mut points: u64 = 1;
    for n in 1..=32usize {
        points = points.saturating_mul(d);
        if points > ORDER_LEVEL_POINT_CAP || !bud.charge(points) {
            break;
        }
        let images = word_level_images(&g.group, &g.word, n);
        let Some(o) = perm_order_u128(&images) else { break };
        if prev == Some(o) && !rejected.contains(&o) {
            if o.saturating_mul(g.word.len() as u128) <= ORDER_POWER_LETTER_CAP {
                let p = g.pow_u128(o);
                match word_is_trivial_b(&g.group, &p.word, &mut bud) {
                    Tri::True => return OrderResult::Finite(o),
                    Tri::False => {
                        rejected.insert(o);
                    }
                    Tri::Exhausted => break,
                }
            }
        }
        prev = Some(o);
    }

    if let Some(w) = detect_infinite(g, &mut bud) {
        return OrderResult::InfiniteCertified(w);
    }
    OrderResult::Exhausted
}

const DETECT_MAX_DEPTH: usize = 48;

fn detect_infinite(g: &Element, bud: &mut Budget) -> Option<InfiniteWitness> {
    let mut path: Vec<(CanonicalKey, u128, WitnessStep)> = Vec::new();
    let mut keys: HashMap<Word, Option<CanonicalKey>> = HashMap::new();
    detect_rec(&g.group, &g.word, 1, &mut path, &mut keys, bud)
}

fn detect_rec(
    group: &GroupDef,
    w: &Word,
    cum: u128,
    path: &mut Vec<(CanonicalKey, u128, WitnessStep)>,
    keys: &mut HashMap<Word, Option<CanonicalKey>>,
    bud: &mut Budget,
) -> Option<InfiniteWitness> {
    if w.is_empty() || path.len() >= DETECT_MAX_DEPTH || !bud.charge(1) {
        return None;
    }
    let key = match keys.entry(w.clone()).or_insert_with(|| {
        let mut kb = Budget::new(2048);
        canonical_key_b(group, w, &mut kb)
    }) {
        Some(k) => k.clone(),
        None => return None,
    };

    if let Some(i) = path.iter().position(|(k, _, _)| *k == key) {
        let cycle = cum / path[i].1;
        debug_assert_eq!(path[i].1 * cycle, cum);
        if cycle >= 2 {
            return Some(InfiniteWitness {
                steps: path[i..].iter().map(|(_, _, s)| s.clone()).collect(),
                revisited_word: group.display_word(w),
                cycle_multiplier: cycle,
            });
        }
        return None;
    }

    let (root, _) = decompose_word(group, w);
    let r = perm_order_u128(&root.iter().map(|&x| x as u32).collect::<Vec<_>>()).unwrap_or(1);
    let powered = {
        let mut out = Word::new();
        for _ in 0..r {
            for &l in w {
                push_reduced(group, &mut out, l);
            }
        }
        out
    };
    let (_proot, secs) = decompose_word(group, &powered);
    debug_assert!(is_identity(&_proot));

    for (v, sec) in secs.iter().enumerate() {
        if sec.is_empty() {
            continue;
        }
        let step = WitnessStep {
            word: group.display_word(w),
            root_order: r.min(u64::MAX as u128) as u64,
            vertex: v as u8,
        };
        path.push((key.clone(), cum, step));
        let hit = detect_rec(group, sec, cum.saturating_mul(r), path, keys, bud);
        path.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// Portrait node: inner nodes carry the root permutation, leaves are
/// certified trivial, `Truncated` marks the depth cutoff (or an undecided
/// triviality check).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PortraitNode {
    Leaf,
    Inner { root: Vec<u8>, children: Vec<PortraitNode> },
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Portrait {
    pub root: PortraitNode,
    /// Depth of the deepest non-leaf node plus one (`∂(g)`); `None` when the
    /// portrait did not close within `max_depth`.
    pub height: Option<usize>,
}

/// Portrait of `g` to depth `max_depth`. Children follow the convention
/// `child_x = (gα⁻¹)|_x` where `α` is the root permutation, so the child at
/// `x` describes the action below vertex `x` after the top shuffle.
pub fn portrait(g: &Element, max_depth: usize) -> Portrait {
    let node = portrait_rec(&g.group, &g.word, max_depth);
    let height = node_height(&node);
    Portrait { root: node, height }
}

fn portrait_rec(group: &GroupDef, w: &[Letter], depth_left: usize) -> PortraitNode {
    match word_is_trivial(group, w, DEFAULT_BUDGET) {
        Tri::True => return PortraitNode::Leaf,
        Tri::Exhausted => return PortraitNode::Truncated,
        Tri::False => {}
    }
    if depth_left == 0 {
        return PortraitNode::Truncated;
    }
    let (root, secs) = decompose_word(group, w);
    let inv = invert_perm(&root);
    let children = (0..group.d)
        .map(|x| portrait_rec(group, &secs[inv[x] as usize], depth_left - 1))
        .collect();
    PortraitNode::Inner { root, children }
}

fn node_height(n: &PortraitNode) -> Option<usize> {
    match n {
        PortraitNode::Leaf => Some(0),
        PortraitNode::Truncated => None,
        PortraitNode::Inner { children, .. } => {
            let mut h = 0;
            for c in children {
                h = h.max(node_height(c)?);
            }
            Some(h + 1)
        }
    }
}

/// Canonical key of the tree automorphism defined by an element: the
/// bisimulation-minimized, BFS-canonized automaton of its section recursion,
/// serialized to bytes. Two elements receive equal keys iff they define the
/// same automorphism (whenever both computations close within budget).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Short hex fingerprint for display.
    pub fn fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for &b in &self.0 {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

pub fn canonical_key(g: &Element, budget: u64) -> Result<CanonicalKey, Exhausted> {
    let mut bud = Budget::new(budget);
    canonical_key_b(&g.group, &g.word, &mut bud).ok_or(Exhausted)
}

fn canonical_key_b(group: &GroupDef, w: &[Letter], bud: &mut Budget) -> Option<CanonicalKey> {
    let d = group.d;
    let start = reduce_word(group, w.iter().copied());

    // Reachable automaton of the section recursion.
    let mut index: HashMap<Word, usize> = HashMap::new();
    let mut roots: Vec<Vec<u8>> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(start.clone(), 0);
    queue.push_back(start);
    while let Some(wrd) = queue.pop_front() {
        if !bud.charge(1) {
            return None;
        }
        let (root, secs) = decompose_word(group, &wrd);
        let mut row = Vec::with_capacity(d);
        for s in secs {
            let next = index.len();
            let id = *index.entry(s.clone()).or_insert_with(|| {
                queue.push_back(s);
                next
            });
            row.push(id);
        }
        roots.push(root);
        succ.push(row);
    }

    // Partition refinement: start from root permutations, split by successor
    // classes until stable.
    let n = roots.len();
    let mut class = vec![0u32; n];
    {
        let mut ids: HashMap<&[u8], u32> = HashMap::new();
        for (i, r) in roots.iter().enumerate() {
            let next = ids.len() as u32;
            class[i] = *ids.entry(r.as_slice()).or_insert(next);
        }
    }
    loop {
        let mut sig_ids: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        let mut next_class = vec![0u32; n];
        for i in 0..n {
            let sig = (class[i], succ[i].iter().map(|&j| class[j]).collect::<Vec<_>>());
            let fresh = sig_ids.len() as u32;
            next_class[i] = *sig_ids.entry(sig).or_insert(fresh);
        }
        let stable = next_class == class;
        class = next_class;
        if stable {
            break;
        }
    }

    // Canonical BFS numbering of the quotient from the start state.
    let mut order_of: HashMap<u32, u32> = HashMap::new();
    let mut bfs: Vec<usize> = Vec::new();
    order_of.insert(class[0], 0);
    bfs.push(0);
    let mut head = 0;
    while head < bfs.len() {
        let i = bfs[head];
        head += 1;
        for &j in &succ[i] {
            if !order_of.contains_key(&class[j]) {
                order_of.insert(class[j], order_of.len() as u32);
                bfs.push(j);
            }
        }
    }

    // Serialize: state count, then per state in BFS order the root
    // permutation and successor numbers.
    let mut bytes = Vec::with_capacity(2 + bfs.len() * (d + 2 * d));
    bytes.push(d as u8);
    bytes.extend_from_slice(&(bfs.len() as u32).to_le_bytes());
    for &i in &bfs {
        bytes.extend_from_slice(&roots[i]);
        for &j in &succ[i] {
            bytes.extend_from_slice(&order_of[&class[j]].to_le_bytes());
        }
    }
    Some(CanonicalKey(bytes))
}

/// Nucleus iteration: the closure of `{1} ∪ gens ∪ gens⁻¹` under taking
/// level-1 sections of pairwise products. Returns canonical keys with a
/// representative word each, or [`Exhausted`] when the iteration does not
/// stabilize within budget.
pub fn nucleus(group: &Arc<GroupDef>, budget: u64) -> Result<BTreeMap<CanonicalKey, Word>, Exhausted> {
    let mut bud = Budget::new(budget);
    let mut reps: BTreeMap<CanonicalKey, Word> = BTreeMap::new();
    let insert = |w: &Word, reps: &mut BTreeMap<CanonicalKey, Word>, bud: &mut Budget| -> Option<bool> {
        let key = canonical_key_b(group, w, bud)?;
        match reps.get(&key) {
            Some(old) if old.len() <= w.len() => Some(false),
            Some(_) => {
                reps.insert(key, w.clone());
                Some(false)
            }
            None => {
                reps.insert(key, w.clone());
                Some(true)
            }
        }
    };

    let mut seeds: Vec<Word> = vec![Word::new()];
    for i in 0..group.gen_count() {
        seeds.push(reduce_word(group, [Letter::pos(i as GenId)].into_iter()));
        seeds.push(reduce_word(group, [Letter::neg(i as GenId)].into_iter()));
    }
    for s in &seeds {
        insert(s, &mut reps, &mut bud).ok_or(Exhausted)?;
    }

    loop {
        let words: Vec<Word> = reps.values().cloned().collect();
        let mut changed = false;
        for u in &words {
            for v in &words {
                if !bud.charge(1) {
                    return Err(Exhausted);
                }
                let prod = reduce_word(group, u.iter().chain(v.iter()).copied());
                let (_, secs) = decompose_word(group, &prod);
                for s in secs {
                    if insert(&s, &mut reps, &mut bud).ok_or(Exhausted)? {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Ok(reps);
        }
        if reps.len() as u64 > budget {
            return Err(Exhausted);
        }
    }
}

/// The automorphism acting as `g` on the subtree below `path` and trivially
/// elsewhere.
#[derive(Clone, Debug)]
pub struct VertexScoped {
    pub path: Vec<u8>,
    pub inner: Element,
}

pub fn at_vertex(g: &Element, path: &[u8]) -> VertexScoped {
    VertexScoped { path: path.to_vec(), inner: g.clone() }
}

impl VertexScoped {
    pub fn act_vertex(&self, v: &[u8]) -> Vec<u8> {
        if v.len() >= self.path.len() && v[..self.path.len()] == self.path[..] {
            let mut out = self.path.clone();
            out.extend(act_vertex(&self.inner, &v[self.path.len()..]));
            out
        } else {
            v.to_vec()
        }
    }
}

#[cfg(test)]
pub(crate) fn arc_builtin(name: &str) -> Arc<GroupDef> {
    Arc::new(crate::catalog::builtin(name).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(g: &Arc<GroupDef>, text: &str) -> Element {
        Element::parse(g.clone(), text).unwrap()
    }

    #[test]
    fn act_vertex_matches_recursions() {
        let g = arc_builtin("grigorchuk");
        assert_eq!(act_vertex(&el(&g, "a"), &[0, 1]), vec![1, 1]);
        assert_eq!(act_vertex(&el(&g, "e"), &[0, 1, 0]), vec![0, 1, 0]);

        let gamma = arc_builtin("gamma");
        assert_eq!(act_vertex(&el(&gamma, "t"), &[0, 0]), vec![0, 1]);
        assert_eq!(act_vertex(&el(&gamma, "t"), &[2, 0]), vec![2, 0]);
    }

    #[test]
    fn wreath_decompose_examples() {
        let g = arc_builtin("grigorchuk");
        let b = wreath_decompose(&el(&g, "b"));
        assert_eq!(b.root, vec![0, 1]);
        assert_eq!(b.sections[0].display(), "a");
        assert_eq!(b.sections[1].display(), "c");

        let e = wreath_decompose(&el(&g, "e"));
        assert_eq!(e.root, vec![0, 1]);
        assert!(e.sections.iter().all(|s| s.is_empty()));

        // x = abcd in the tilde group: φ(x²) = (x^a, x), both sections again
        // of odometer type, so x has infinite order.
        let gt = arc_builtin("grigorchuk-tilde");
        let x = el(&gt, "a b c d");
        let xa = x.conjugate(&el(&gt, "a"));
        let dec = wreath_decompose(&x.mul(&x));
        assert_eq!(dec.root, vec![0, 1]);
        assert_eq!(is_trivial(&dec.sections[0].mul(&xa.inverse()), 10_000), Tri::True);
        assert_eq!(is_trivial(&dec.sections[1].mul(&x.inverse()), 10_000), Tri::True);
    }

    #[test]
    fn is_trivial_examples() {
        let g = arc_builtin("grigorchuk");
        assert_eq!(is_trivial(&el(&g, "(a d)^4"), 10_000), Tri::True);
        assert_eq!(is_trivial(&el(&g, "b c d"), 10_000), Tri::True);
        assert_eq!(is_trivial(&el(&g, "a b"), 10_000), Tri::False);
    }

    #[test]
    fn klein_relations_hold() {
        let g = arc_builtin("grigorchuk");
        for w in ["a a", "b b", "c c", "d d", "b c d", "c d b", "b c a a d"] {
            // the last one: bc·(aa)·d = bcd
            assert_eq!(is_trivial(&el(&g, w), 10_000), Tri::True, "{w}");
        }
    }

    #[test]
    fn order_examples() {
        let g = arc_builtin("grigorchuk");
        assert_eq!(order(&el(&g, "a"), DEFAULT_BUDGET), OrderResult::Finite(2));
        assert_eq!(order(&el(&g, "a d"), DEFAULT_BUDGET), OrderResult::Finite(4));
        assert_eq!(order(&el(&g, "a b"), DEFAULT_BUDGET), OrderResult::Finite(16));
        assert_eq!(order(&el(&g, "e"), DEFAULT_BUDGET), OrderResult::Finite(1));
        assert_eq!(order(&el(&g, "a c"), DEFAULT_BUDGET), OrderResult::Finite(8));
    }

    #[test]
    fn infinite_orders_certified() {
        let gt = arc_builtin("grigorchuk-tilde");
        match order(&el(&gt, "a b c d"), DEFAULT_BUDGET) {
            OrderResult::InfiniteCertified(w) => assert!(w.cycle_multiplier >= 2),
            other => panic!("expected infinite certificate, got {other:?}"),
        }

        let odo = arc_builtin("odometer");
        match order(&el(&odo, "t"), DEFAULT_BUDGET) {
            OrderResult::InfiniteCertified(w) => assert!(w.cycle_multiplier >= 2),
            other => panic!("expected infinite certificate, got {other:?}"),
        }

        let gamma = arc_builtin("gamma");
        match order(&el(&gamma, "a t"), DEFAULT_BUDGET) {
            OrderResult::InfiniteCertified(w) => assert!(w.cycle_multiplier >= 2),
            other => panic!("expected infinite certificate, got {other:?}"),
        }
    }

    #[test]
    fn portrait_examples() {
        let g = arc_builtin("grigorchuk");
        let p = portrait(&el(&g, "e"), 5);
        assert_eq!(p.root, PortraitNode::Leaf);
        assert_eq!(p.height, Some(0));

        let p = portrait(&el(&g, "a"), 5);
        assert_eq!(p.height, Some(1));
        match &p.root {
            PortraitNode::Inner { root, children } => {
                assert_eq!(root, &vec![1, 0]);
                assert!(children.iter().all(|c| *c == PortraitNode::Leaf));
            }
            other => panic!("unexpected {other:?}"),
        }

        let p = portrait(&el(&g, "d"), 3);
        assert_eq!(p.height, None, "d is not finitary");
    }

    #[test]
    fn canonical_keys_separate_and_merge() {
        let g = arc_builtin("grigorchuk");
        let key = |t: &str| canonical_key(&el(&g, t), 10_000).unwrap();
        assert_eq!(key("b c d"), key("e"));
        assert_ne!(key("c"), key("d"));
        assert_eq!(key("b c"), key("d"));
        assert_eq!(key("a d a d"), key("d a d a"), "(ad)² = (da)² = (b,b)");
        assert_eq!(key("a d a d"), key("(a d a d)^-1"), "(ad)² is an involution");
    }

    #[test]
    fn canonical_key_padding_stable() {
        let g = arc_builtin("gamma");
        let k1 = canonical_key(&el(&g, "t a a^-1"), 10_000).unwrap();
        let k2 = canonical_key(&el(&g, "t"), 10_000).unwrap();
        assert_eq!(k1, k2);
    }

    #[test]
    fn nucleus_examples() {
        let odo = arc_builtin("odometer");
        let n = nucleus(&odo, 10_000).unwrap();
        assert_eq!(n.len(), 3, "odometer nucleus is {{ε, t, t⁻¹}}");

        let g = arc_builtin("grigorchuk");
        let n = nucleus(&g, 10_000).unwrap();
        assert_eq!(n.len(), 5, "grigorchuk nucleus is {{ε,a,b,c,d}}");

        let trivial = Arc::new(crate::catalog::parse_groupdef("alphabet: 2\n").unwrap());
        let n = nucleus(&trivial, 1_000).unwrap();
        assert_eq!(n.len(), 1);
    }

    #[test]
    fn at_vertex_behaviour() {
        let g = arc_builtin("grigorchuk");
        let a = el(&g, "a");
        let scoped = at_vertex(&a, &[1]);
        assert_eq!(scoped.act_vertex(&[1, 0]), vec![1, 1]);
        assert_eq!(scoped.act_vertex(&[0, 0]), vec![0, 0]);
        let whole = at_vertex(&a, &[]);
        assert_eq!(whole.act_vertex(&[0, 1]), vec![1, 1]);
    }

    #[test]
    fn differential_action_vs_level_images() {
        // act_vertex and word_level_images must agree on every vertex.
        let groups = ["grigorchuk", "grigorchuk-tilde", "gamma", "gamma-bar", "gamma-bar-bar"];
        let mut rng: u64 = 0x9e3779b97f4a7c15;
        for name in groups {
            let g = arc_builtin(name);
            let k = g.gen_count() as u64;
            for _ in 0..12 {
                let mut w = Word::new();
                let len = {
                    rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (rng >> 33) % 14 + 1
                };
                for _ in 0..len {
                    rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let gen = ((rng >> 33) % k) as GenId;
                    let inv = (rng >> 13) & 1 == 1;
                    w.push(Letter { gen, inv });
                }
                let elem = Element::from_word(g.clone(), &w);
                let n = 4usize;
                let images = word_level_images(&g, elem.word(), n);
                let d = g.d as u32;
                for (p, &q) in images.iter().enumerate() {
                    let mut v = Vec::new();
                    let mut rem = p as u32;
                    for i in (0..n).rev() {
                        v.push((rem / d.pow(i as u32)) as u8);
                        rem %= d.pow(i as u32);
                    }
                    let mut expect = Vec::new();
                    let mut rem = q;
                    for i in (0..n).rev() {
                        expect.push((rem / d.pow(i as u32)) as u8);
                        rem %= d.pow(i as u32);
                    }
                    assert_eq!(act_vertex(&elem, &v), expect, "group {name}, word {}", elem.display());
                }
            }
        }
    }

    #[test]
    fn grigorchuk_random_words_are_2_torsion() {
        let g = arc_builtin("grigorchuk");
        let mut rng: u64 = 42;
        for _ in 0..40 {
            let mut text = String::new();
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let len = (rng >> 33) % 12 + 1;
            for _ in 0..len {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                text.push(['a', 'b', 'c', 'd'][((rng >> 33) % 4) as usize]);
                text.push(' ');
            }
            match order(&el(&g, &text), DEFAULT_BUDGET) {
                OrderResult::Finite(k) => assert!(k.is_power_of_two(), "order {k} of {text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
