//! Finite permutations and stabilizer chains.
//!
//! `PermGroup` is a deterministic Schreier–Sims chain with Schreier-vector
//! transversals. Base points can be prescribed up front (singleton orbits are
//! harmless), which later makes pointwise stabilizers of chosen point sets
//! directly readable off the chain.

use std::collections::HashMap;
use std::sync::Arc;

use num::bigint::BigUint;
use num::One;

/// A permutation of `{0..degree−1}`, stored as its image table. Products
/// compose as functions: `(fg)(x) = f(g(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm { images: (0..degree as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, String> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x as usize >= n || seen[x as usize] {
                return Err(format!("not a permutation of 0..{n}"));
            }
            seen[x as usize] = true;
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv }
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.images.iter().enumerate().find(|&(i, &x)| i != x as usize).map(|(i, _)| i as u32)
    }

    pub fn order(&self) -> BigUint {
        let mut seen = vec![false; self.images.len()];
        let mut ord = BigUint::one();
        for s in 0..self.images.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
                len += 1;
            }
            ord = num::integer::lcm(ord, BigUint::from(len));
        }
        ord
    }
}

#[derive(Clone)]
struct Level {
    point: u32,
    gens: Vec<Arc<Perm>>,
    /// Pairs `(orbit index, gen index)` processed so far, tracked as a prefix
    /// per generator (orbit points are only appended).
    done: Vec<usize>,
    orbit: Vec<u32>,
    /// point → coset representative `u` with `u(point) = x`.
    transversal: HashMap<u32, Arc<Perm>>,
}

impl Level {
    fn new(point: u32, degree: usize) -> Self {
        let mut transversal = HashMap::new();
        transversal.insert(point, Arc::new(Perm::identity(degree)));
        Level { point, gens: Vec::new(), done: Vec::new(), orbit: vec![point], transversal }
    }

    fn rep(&self, x: u32) -> &Arc<Perm> {
        &self.transversal[&x]
    }
}

/// A finite permutation group with an exact stabilizer chain.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    input_gens: Vec<Perm>,
    levels: Vec<Level>,
}

impl PermGroup {
    /// Build a chain for `⟨gens⟩`, seeding the base with `base_hints` (in
    /// order, duplicates ignored) before any automatically chosen points.
    pub fn from_generators(degree: usize, gens: &[Perm], base_hints: &[u32]) -> PermGroup {
        let mut g = PermGroup { degree, input_gens: Vec::new(), levels: Vec::new() };
        let mut seen = vec![false; degree];
        for &h in base_hints {
            if !seen[h as usize] {
                seen[h as usize] = true;
                g.levels.push(Level::new(h, degree));
            }
        }
        for p in gens {
            g.add_generator(p.clone());
        }
        g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.input_gens
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Add one more generator and restore the chain invariant.
    pub fn add_generator(&mut self, p: Perm) {
        assert_eq!(p.degree(), self.degree);
        self.input_gens.push(p.clone());
        if p.is_identity() {
            return;
        }
        if self.levels.is_empty() {
            self.levels.push(Level::new(p.first_moved().unwrap(), self.degree));
        }
        self.levels[0].gens.push(Arc::new(p));
        self.levels[0].done.push(0);
        self.complete(0);
    }

    /// Membership residue: sift through levels `from..`, returning the
    /// residue and the level at which it stuck.
    fn strip(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for i in from..self.levels.len() {
            if g.is_identity() {
                return (g, i);
            }
            let lvl = &self.levels[i];
            let x = g.apply(lvl.point);
            match lvl.transversal.get(&x) {
                None => return (g, i),
                Some(u) if x != lvl.point => g = u.inverse().compose(&g),
                Some(_) => {}
            }
        }
        (g, self.levels.len())
    }

    fn add_strong(&mut self, res: Perm, enter: usize, upto: usize) {
        let res = Arc::new(res);
        let needed = upto + 1;
        if needed > self.levels.len() {
            debug_assert_eq!(needed, self.levels.len() + 1);
            self.levels.push(Level::new(res.first_moved().unwrap(), self.degree));
        }
        for k in enter..=upto {
            self.levels[k].gens.push(res.clone());
            self.levels[k].done.push(0);
        }
    }

    /// Process all outstanding (orbit point, generator) pairs at `level` and
    /// below until every Schreier generator sifts to the identity.
    fn complete(&mut self, level: usize) {
        let mut i = level;
        'outer: loop {
            // Find the next unprocessed pair at this level.
            let lvl = &self.levels[i];
            let mut next: Option<(usize, usize)> = None;
            for (gi, &d) in lvl.done.iter().enumerate() {
                if d < lvl.orbit.len() {
                    next = Some((gi, d));
                    break;
                }
            }
            let Some((gi, oi)) = next else {
                if i == level {
                    return;
                }
                i -= 1;
                continue;
            };

            let lvl = &mut self.levels[i];
            lvl.done[gi] = oi + 1;
            let p = lvl.orbit[oi];
            let s = lvl.gens[gi].clone();
            let q = s.apply(p);
            if !lvl.transversal.contains_key(&q) {
                let rep_q = Arc::new(s.compose(lvl.rep(p)));
                lvl.transversal.insert(q, rep_q);
                lvl.orbit.push(q);
                continue;
            }
            // Schreier generator rep(q)⁻¹ · s · rep(p).
            let up = lvl.rep(p).clone();
            let uq_inv = lvl.rep(q).inverse();
            let schreier = uq_inv.compose(&s).compose(&up);
            if schreier.is_identity() {
                continue;
            }
            let (res, j) = self.strip(schreier, i + 1);
            if !res.is_identity() {
                self.add_strong(res, i + 1, j);
                i = j.min(self.levels.len() - 1);
                continue 'outer;
            }
        }
    }

    pub fn order(&self) -> BigUint {
        let mut o = BigUint::one();
        for l in &self.levels {
            o *= BigUint::from(l.orbit.len() as u64);
        }
        o
    }

    pub fn contains(&self, p: &Perm) -> bool {
        if p.degree() != self.degree {
            return false;
        }
        let (res, _) = self.strip(p.clone(), 0);
        res.is_identity()
    }

    pub fn contains_group(&self, other: &PermGroup) -> bool {
        other.input_gens.iter().all(|g| self.contains(g))
    }

    pub fn equals_group(&self, other: &PermGroup) -> bool {
        self.contains_group(other) && self.order() == other.order()
    }

    /// `[self : sub]`, provided `sub ⊆ self` (checked).
    pub fn index_of(&self, sub: &PermGroup) -> Option<BigUint> {
        if !self.contains_group(sub) {
            return None;
        }
        Some(self.order() / sub.order())
    }

    /// Every strong generator in the chain, deduplicated.
    pub fn strong_generators(&self) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        for level in &self.levels {
            for g in &level.gens {
                if !out.contains(g) {
                    out.push((**g).clone());
                }
            }
        }
        out
    }

    /// Generators of the pointwise stabilizer of `base()[0..k]` (the chain
    /// tail): exact thanks to the strong generating property.
    pub fn stabilizer_suffix(&self, k: usize) -> Vec<Perm> {
        if k >= self.levels.len() {
            return Vec::new();
        }
        let mut out: Vec<Perm> = Vec::new();
        let mut seen: std::collections::HashSet<&Perm> = std::collections::HashSet::new();
        for g in &self.levels[k].gens {
            if seen.insert(g) {
                out.push((**g).clone());
            }
        }
        out
    }
}

/// Orbits of `{0..degree−1}` under a generator list, each sorted, ordered by
/// least element.
pub fn orbits(degree: usize, gens: &[Perm]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for start in 0..degree as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut orb = vec![start];
        seen[start as usize] = true;
        let mut head = 0;
        while head < orb.len() {
            let p = orb[head];
            head += 1;
            for g in gens {
                let q = g.apply(p);
                if !seen[q as usize] {
                    seen[q as usize] = true;
                    orb.push(q);
                }
            }
        }
        orb.sort_unstable();
        out.push(orb);
    }
    out.sort_by_key(|o| o[0]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(images: &[u32]) -> Perm {
        Perm::from_images(images.to_vec()).unwrap()
    }

    #[test]
    fn perm_basics() {
        let s = p(&[1, 0, 2]);
        let c = p(&[1, 2, 0]);
        assert_eq!(s.compose(&c).images(), &[0, 2, 1]);
        assert_eq!(c.compose(&s).images(), &[2, 1, 0]);
        assert_eq!(c.inverse().images(), &[2, 0, 1]);
        assert_eq!(c.order(), BigUint::from(3u32));
        assert!(Perm::identity(4).is_identity());
        assert!(Perm::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn symmetric_group_chain() {
        let gens = [p(&[1, 0, 2, 3]), p(&[1, 2, 3, 0])];
        let g = PermGroup::from_generators(4, &gens, &[]);
        assert_eq!(g.order(), BigUint::from(24u32));
        assert!(g.contains(&p(&[3, 2, 1, 0])));
        let a4 = PermGroup::from_generators(
            4,
            &[p(&[1, 2, 0, 3]), p(&[0, 2, 3, 1])],
            &[],
        );
        assert_eq!(a4.order(), BigUint::from(12u32));
        assert!(g.contains_group(&a4));
        assert!(!a4.contains_group(&g));
        assert_eq!(g.index_of(&a4), Some(BigUint::from(2u32)));
    }

    #[test]
    fn trivial_and_cyclic() {
        let t = PermGroup::from_generators(5, &[], &[]);
        assert_eq!(t.order(), BigUint::one());
        assert!(t.contains(&Perm::identity(5)));
        assert!(!t.contains(&p(&[1, 0, 2, 3, 4])));

        let c8 = PermGroup::from_generators(8, &[p(&[1, 2, 3, 4, 5, 6, 7, 0])], &[]);
        assert_eq!(c8.order(), BigUint::from(8u32));
    }

    #[test]
    fn prescribed_base_keeps_points_and_order() {
        let gens = [p(&[1, 0, 2, 3]), p(&[1, 2, 3, 0])];
        let g = PermGroup::from_generators(4, &gens, &[2, 0, 1, 3]);
        assert_eq!(g.order(), BigUint::from(24u32));
        assert_eq!(&g.base()[..4], &[2, 0, 1, 3]);
        // Suffix after the first base point generates its stabilizer: S₃.
        let stab = PermGroup::from_generators(4, &g.stabilizer_suffix(1), &[]);
        assert_eq!(stab.order(), BigUint::from(6u32));
        assert!(stab.generators().iter().all(|q| q.apply(2) == 2));
        // Two points fixed: S₂.
        let stab2 = PermGroup::from_generators(4, &g.stabilizer_suffix(2), &[]);
        assert_eq!(stab2.order(), BigUint::from(2u32));
    }

    #[test]
    fn grigorchuk_level_quotients_by_hand() {
        use crate::element::{arc_builtin, word_level_images};
        let g = arc_builtin("grigorchuk");
        for (n, expect) in [(1usize, 2u64), (2, 8), (3, 128), (4, 4096)] {
            let degree = 1usize << n;
            let gens: Vec<Perm> = (0..g.gen_count())
                .map(|i| {
                    let w = vec![crate::catalog::Letter::pos(i as u16)];
                    Perm::from_images(word_level_images(&g, &w, n)).unwrap()
                })
                .collect();
            let q = PermGroup::from_generators(degree, &gens, &[]);
            assert_eq!(q.order(), BigUint::from(expect), "level {n}");
        }
    }

    #[test]
    fn orbit_partition() {
        let g = p(&[1, 0, 3, 2, 4]);
        let o = orbits(5, &[g]);
        assert_eq!(o, vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert_eq!(orbits(3, &[]), vec![vec![0], vec![1], vec![2]]);
    }
}
