//! Growth data: exact word-growth balls via canonical forms, the weighted
//! contraction certificate for the eight-element grigorchuk-tilde generating
//! set, and orbit growth of a boundary ray under the group action.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};

use crate::catalog::{inverse_word, CatalogError, GenId, GroupDef, Letter, Word};
use crate::element::{canonical_key, CanonicalKey, Element, DEFAULT_BUDGET};
use crate::parabolic::RaySpec;
use crate::perm::Perm;
use crate::quotient::{encode_vertex, level_permutation};

/// Cap on the number of canonical keys a ball enumeration may store.
pub const DEFAULT_KEY_BUDGET: usize = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum GrowthError {
    #[error("theta must lie strictly between the real root of X^3 + X^2 + X - 2 and 1")]
    ThetaRange,
    #[error("eta must lie strictly between 0 and 1")]
    EtaRange,
    #[error("the weighted generating set is specific to grigorchuk-tilde")]
    UnsupportedGroup,
    #[error("no alternating-form words of length at most {0}")]
    EmptySample(usize),
    #[error("not a decimal or fraction literal: {0}")]
    BadNumber(String),
    #[error(transparent)]
    Word(#[from] CatalogError),
}

/// Parses "0.811", "811/1000", or "2" into an exact rational.
pub fn parse_ratio(text: &str) -> Result<BigRational, GrowthError> {
    let bad = || GrowthError::BadNumber(text.to_string());
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| bad())?;
        let den: BigInt = q.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let whole = &int_part * &scale + if negative { -frac_part } else { frac_part };
        return Ok(BigRational::new(whole, scale));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Cumulative ball sizes of the word metric: `sizes[r]` counts the distinct
/// elements expressible as products of at most `r` of the given generators or
/// their inverses. `complete` is false when the key budget ran out, in which
/// case only the fully counted radii are reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallReport {
    pub sizes: Vec<u64>,
    pub complete: bool,
}

pub fn ball_sizes(
    group: &Arc<GroupDef>,
    gens: &[Word],
    radius: usize,
    key_budget: usize,
) -> BallReport {
    let mut dirs: Vec<Element> = Vec::new();
    for w in gens {
        dirs.push(Element::from_word(group.clone(), w));
        dirs.push(Element::from_word(group.clone(), &inverse_word(w)));
    }
    let mut seen: HashSet<CanonicalKey> = HashSet::new();
    let id = Element::identity(group.clone());
    match canonical_key(&id, DEFAULT_BUDGET) {
        Ok(k) => seen.insert(k),
        Err(_) => return BallReport { sizes: Vec::new(), complete: false },
    };
    let mut frontier = vec![id];
    let mut sizes = vec![1u64];
    let mut complete = true;
    'layers: for _ in 1..=radius {
        let mut next = Vec::new();
        for e in &frontier {
            for g in &dirs {
                let ne = e.mul(g);
                let k = match canonical_key(&ne, DEFAULT_BUDGET) {
                    Ok(k) => k,
                    Err(_) => {
                        complete = false;
                        break 'layers;
                    }
                };
                if seen.contains(&k) {
                    continue;
                }
                if seen.len() >= key_budget {
                    complete = false;
                    break 'layers;
                }
                seen.insert(k);
                next.push(ne);
            }
        }
        sizes.push(seen.len() as u64);
        if next.is_empty() {
            for _ in sizes.len()..=radius {
                sizes.push(seen.len() as u64);
            }
            break;
        }
        frontier = next;
    }
    BallReport { sizes, complete }
}

/// Ball sizes with equality tested in the level-`level` permutation quotient
/// instead of by canonical key. Exact once the level separates the ball; used
/// to cross-check `ball_sizes` on small radii.
pub fn ball_sizes_by_level_perms(
    group: &GroupDef,
    gens: &[Word],
    radius: usize,
    level: usize,
) -> Vec<u64> {
    let mut dirs: Vec<Perm> = Vec::new();
    for w in gens {
        let p = level_permutation(group, w, level);
        dirs.push(p.inverse());
        dirs.push(p);
    }
    let degree = dirs.first().map_or(1, |p| p.images().len());
    let id = Perm::identity(degree);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(id.images().to_vec());
    let mut frontier = vec![id];
    let mut sizes = vec![1u64];
    for _ in 1..=radius {
        let mut next = Vec::new();
        for p in &frontier {
            for g in &dirs {
                let np = p.compose(g);
                if seen.insert(np.images().to_vec()) {
                    next.push(np);
                }
            }
        }
        sizes.push(seen.len() as u64);
        frontier = next;
    }
    sizes
}

/// Display names for the weighted generating set, indexed so that indices
/// 1..8 read the subset of {b, c, d} off the bits {1, 2, 4} and index 0 is a.
const WEIGHT_NAMES: [&str; 8] = ["a", "b", "c", "b c", "d", "b d", "c d", "b c d"];

/// Bit mask of the letter x = b c d.
const X_MASK: usize = 7;

/// Section index of a non-a letter: the defining recursion sends the subset
/// mask m to its bit rotation (b -> c -> d -> b) in the nontrivial
/// coordinate, and puts an a in the other coordinate exactly when b occurs.
fn rotl3(mask: usize) -> usize {
    ((mask << 1) | (mask >> 2)) & 7
}

fn has_a_section(mask: usize) -> bool {
    mask & 1 != 0
}

/// Weighted lengths on the generating set {a, b, c, d, bc, bd, cd, bcd} of
/// grigorchuk-tilde. nu(a) = 1, and the other seven weights are the unique
/// solution of the system requiring each syllable (a non-a letter together
/// with its routing a) to contract by exactly theta when passing to the two
/// sections; the letter bcd, whose sections are a and bcd again, is the one
/// non-contracting direction.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    theta: BigRational,
    nu: Vec<BigRational>,
}

impl WeightFunction {
    pub fn theta(&self) -> &BigRational {
        &self.theta
    }

    /// Weight of a generating-set member by display name.
    pub fn weight(&self, name: &str) -> Option<&BigRational> {
        WEIGHT_NAMES.iter().position(|n| *n == name).map(|i| &self.nu[i])
    }

    /// All eight (name, weight) pairs in display order.
    pub fn entries(&self) -> Vec<(&'static str, &BigRational)> {
        [0usize, 1, 2, 4, 3, 5, 6, 7]
            .iter()
            .map(|&i| (WEIGHT_NAMES[i], &self.nu[i]))
            .collect()
    }

    pub fn min_weight(&self) -> &BigRational {
        self.nu.iter().min().expect("table is nonempty")
    }

    /// Pairs (u, v) of distinct non-a letters violating
    /// nu(uv) <= nu(u) + nu(v); empty for every admissible theta.
    pub fn subadditivity_violations(&self) -> Vec<(&'static str, &'static str)> {
        let mut out = Vec::new();
        for u in 1..8usize {
            for v in (u + 1)..8usize {
                if u ^ v == 0 {
                    continue;
                }
                if self.nu[u ^ v] > &self.nu[u] + &self.nu[v] {
                    out.push((WEIGHT_NAMES[u], WEIGHT_NAMES[v]));
                }
            }
        }
        out
    }

    /// Weight of the two sections of a non-a letter: theta * (nu(s) + nu(a))
    /// for s != bcd, and nu(bcd) + nu(a) for bcd itself.
    fn section_weight(&self, mask: usize) -> BigRational {
        let mut w = self.nu[rotl3(mask)].clone();
        if has_a_section(mask) {
            w += &self.nu[0];
        }
        w
    }
}

pub fn weight_table(theta: &BigRational) -> Result<WeightFunction, GrowthError> {
    let one = BigRational::one();
    if *theta <= BigRational::zero() || *theta >= one {
        return Err(GrowthError::ThetaRange);
    }
    let t2 = theta * theta;
    let t3 = &t2 * theta;
    // Below the real root of X^3 + X^2 + X - 2 the subadditivity margin
    // nu(bc) + nu(cd) - nu(bd) turns negative and minimal words stop having
    // the alternating form the certificate relies on.
    if &t3 + &t2 + theta <= BigRational::from_integer(2.into()) {
        return Err(GrowthError::ThetaRange);
    }
    let den = &one - &t3;
    let nu = vec![
        one.clone(),
        (theta + &t3) / &den,
        ((theta + &t2) + (&t3 - &one)) / &den,
        ((theta + &t3) - &one) / &den,
        (&t2 + &t3) / &den,
        &t3 / &den,
        ((&t2 + &t3) - &one) / &den,
        (&one + &t3) / &den,
    ];
    Ok(WeightFunction { theta: theta.clone(), nu })
}

/// Outcome of sampling alternating-form words and comparing the weight of
/// their two sections against their own weight.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub theta: f64,
    pub eta: f64,
    pub sample_len: usize,
    /// Number of sampled words (both a-placements counted).
    pub sample_size: u64,
    /// Largest section-to-word weight ratio among sampled words using at
    /// least one letter other than bcd.
    pub max_ratio: f64,
    /// A word attaining max_ratio.
    pub argmax: String,
    /// Ratio of the pure-bcd words, exactly 1 whenever such words fit in the
    /// sample: nu(bcd|0) + nu(bcd|1) = nu(bcd) + nu(a), so those words keep
    /// their full weight and are reported separately from max_ratio.
    pub x_pure_ratio: Option<f64>,
    /// Mean-ratio bound with the theta contraction applied to the section
    /// side; below 1 for admissible parameters.
    pub zeta: f64,
    /// The same expression with theta moved to the word side, recorded for
    /// comparison; it is at least 1 and cannot bound the ratio.
    pub zeta_theta_on_word_side: f64,
    /// max_ratio < 1, compared exactly.
    pub pass: bool,
}

/// Ratio (weight of both sections) / (weight of the word) for an
/// alternating-form word with `counts[m - 1]` letters of mask m. The a
/// letters routing the word contribute nu(a) each to the word weight and
/// vanish into the sections.
fn alternating_word_ratio(wf: &WeightFunction, counts: &[u8; 7]) -> BigRational {
    let mut num = BigRational::zero();
    let mut den = BigRational::zero();
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mask = i + 1;
        let c = BigRational::from_integer(BigInt::from(c));
        num += &c * wf.section_weight(mask);
        den += &c * (&wf.nu[mask] + &wf.nu[0]);
    }
    num / den
}

/// Enumerates the alternating-form words a s1 a s2 ... a sk and
/// s1 a s2 a ... sk a (one non-a letter per slot, an even number k of a's,
/// an a at the start or the end but not both) up to `sample_len` letters,
/// keeping those whose proportion of bcd letters stays below eta, and
/// reports the largest section-to-word weight ratio.
pub fn contraction_certificate(
    group: &GroupDef,
    theta: &BigRational,
    eta: &BigRational,
    sample_len: usize,
) -> Result<ContractionReport, GrowthError> {
    if group.name != "grigorchuk-tilde" {
        return Err(GrowthError::UnsupportedGroup);
    }
    if *eta <= BigRational::zero() || *eta >= BigRational::one() {
        return Err(GrowthError::EtaRange);
    }
    let wf = weight_table(theta)?;

    let mut sample_size = 0u64;
    let mut max_ratio: Option<(BigRational, [u8; 7])> = None;
    let mut x_pure_ratio: Option<BigRational> = None;
    let mut ratio_memo: HashMap<[u8; 7], BigRational> = HashMap::new();

    let mut k = 2usize;
    while 2 * k <= sample_len {
        let mut slots = vec![0usize; k];
        loop {
            let mut counts = [0u8; 7];
            for &s in &slots {
                counts[s] += 1;
            }
            let x_count = counts[X_MASK - 1] as usize;
            let in_sample =
                BigRational::new(BigInt::from(x_count), BigInt::from(2 * k)) < *eta;
            if in_sample {
                sample_size += 2;
                let ratio = ratio_memo
                    .entry(counts)
                    .or_insert_with(|| alternating_word_ratio(&wf, &counts))
                    .clone();
                if x_count == k {
                    x_pure_ratio = Some(ratio);
                } else {
                    let better = match &max_ratio {
                        Some((best, _)) => ratio > *best,
                        None => true,
                    };
                    if better {
                        max_ratio = Some((ratio, counts));
                    }
                }
            }
            // odometer over the 7^k slot assignments
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                slots[i] += 1;
                if slots[i] < 7 {
                    break;
                }
                slots[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        k += 2;
    }

    let (best, best_counts) = max_ratio.ok_or(GrowthError::EmptySample(sample_len))?;

    let mut argmax = String::new();
    for (i, &c) in best_counts.iter().enumerate() {
        for _ in 0..c {
            argmax.push_str("a ");
            argmax.push_str(WEIGHT_NAMES[i + 1]);
            argmax.push(' ');
        }
    }
    let argmax = argmax.trim_end().to_string();

    let x = &wf.nu[X_MASK];
    let m = wf.min_weight();
    let one = BigRational::one();
    let x_mass = eta * x;
    let rest = (&one - eta) * m;
    let zeta = (&x_mass + theta * &rest) / (&x_mass + &rest);
    let zeta_flipped = (&x_mass + &rest) / (&x_mass + theta * &rest);
    let pass = best < one;

    Ok(ContractionReport {
        theta: theta.to_f64().unwrap_or(f64::NAN),
        eta: eta.to_f64().unwrap_or(f64::NAN),
        sample_len,
        sample_size,
        max_ratio: best.to_f64().unwrap_or(f64::NAN),
        argmax,
        x_pure_ratio: x_pure_ratio.map(|r| r.to_f64().unwrap_or(f64::NAN)),
        zeta: zeta.to_f64().unwrap_or(f64::NAN),
        zeta_theta_on_word_side: zeta_flipped.to_f64().unwrap_or(f64::NAN),
        pass,
    })
}

/// Number of distinct images of the ray basepoint (truncated at
/// `level_cap`) under products of at most r generators, for r = 0..=radius.
/// Cosets of the basepoint stabilizer correspond to orbit points, so this is
/// the coset growth function up to the truncation.
pub fn coset_growth(
    group: &GroupDef,
    ray: &RaySpec,
    radius: usize,
    level_cap: usize,
) -> Vec<u64> {
    let mut dirs: Vec<Perm> = Vec::new();
    for gen in 0..group.generators.len() {
        let w: Word = vec![Letter::pos(gen as GenId)];
        let p = level_permutation(group, &w, level_cap);
        dirs.push(p.inverse());
        dirs.push(p);
    }
    let start = encode_vertex(&ray.prefix(level_cap), group.d);
    let mut seen: HashSet<u32> = HashSet::new();
    seen.insert(start);
    let mut frontier = vec![start];
    let mut sizes = vec![1u64];
    for _ in 1..=radius {
        let mut next = Vec::new();
        for &v in &frontier {
            for p in &dirs {
                let nv = p.apply(v);
                if seen.insert(nv) {
                    next.push(nv);
                }
            }
        }
        sizes.push(seen.len() as u64);
        frontier = next;
    }
    sizes
}

/// Least-squares slope of log(sizes[r]) against log(r) over r >= 2, a crude
/// polynomial-degree estimate. None when fewer than two usable points exist.
pub fn fit_loglog_slope(sizes: &[u64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = sizes
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, &s)| s > 0)
        .map(|(r, &s)| ((r as f64).ln(), (s as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{arc_builtin, wreath_decompose};

    fn own_generators(g: &GroupDef) -> Vec<Word> {
        (0..g.generators.len())
            .map(|i| vec![Letter::pos(i as GenId)])
            .collect()
    }

    fn theta_811() -> BigRational {
        parse_ratio("0.811").unwrap()
    }

    #[test]
    fn parse_ratio_forms() {
        assert_eq!(parse_ratio("0.811").unwrap(), BigRational::new(811.into(), 1000.into()));
        assert_eq!(parse_ratio("811/1000").unwrap(), BigRational::new(811.into(), 1000.into()));
        assert_eq!(parse_ratio("2").unwrap(), BigRational::from_integer(2.into()));
        assert_eq!(parse_ratio("-0.5").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1.2.3").is_err());
    }

    #[test]
    fn grigorchuk_ball_fixtures() {
        let g = arc_builtin("grigorchuk");
        let report = ball_sizes(&g, &own_generators(&g), 4, DEFAULT_KEY_BUDGET);
        assert!(report.complete);
        assert_eq!(report.sizes[0], 1);
        assert_eq!(report.sizes[1], 5);
        assert_eq!(report.sizes[2], 11);
        // the subgroup generated by a alone is cyclic of order 2, so its
        // ball saturates immediately
        let small = ball_sizes(&g, &[vec![Letter::pos(0)]], 3, DEFAULT_KEY_BUDGET);
        assert!(small.complete);
        assert_eq!(small.sizes, vec![1, 2, 2, 2]);
    }

    #[test]
    fn balls_agree_with_level_permutation_brute_force() {
        let g = arc_builtin("grigorchuk");
        let gens = own_generators(&g);
        let canonical = ball_sizes(&g, &gens, 6, DEFAULT_KEY_BUDGET);
        assert!(canonical.complete);
        let brute = ball_sizes_by_level_perms(&g, &gens, 6, 8);
        assert_eq!(canonical.sizes, brute);
    }

    #[test]
    fn ball_budget_marks_partial_results() {
        let g = arc_builtin("grigorchuk");
        let report = ball_sizes(&g, &own_generators(&g), 4, 6);
        assert!(!report.complete);
        assert!(report.sizes.len() < 5);
    }

    #[test]
    fn ball_sizes_are_submultiplicative() {
        let g = arc_builtin("grigorchuk");
        let report = ball_sizes(&g, &own_generators(&g), 6, DEFAULT_KEY_BUDGET);
        assert!(report.complete);
        let s = &report.sizes;
        for r in 0..s.len() {
            for t in 0..s.len() - r {
                assert!(s[r + t] <= s[r] * s[t], "gamma({}) > gamma({})*gamma({})", r + t, r, t);
            }
        }
    }

    #[test]
    fn weight_table_matches_two_decimal_values() {
        let wf = weight_table(&theta_811()).unwrap();
        let printed = [
            ("a", 1.00),
            ("b", 2.87),
            ("c", 2.14),
            ("d", 2.54),
            ("b c", 0.73),
            ("b d", 1.13),
            ("c d", 0.41),
            ("b c d", 3.28),
        ];
        for (name, approx) in printed {
            let v = wf.weight(name).unwrap().to_f64().unwrap();
            assert!(
                (v - approx).abs() <= 0.015,
                "nu({name}) = {v}, expected about {approx}"
            );
        }
        // exact spot check: nu(bd) * (1 - theta^3) = theta^3
        let t = theta_811();
        let t3 = &t * &t * &t;
        let lhs = wf.weight("b d").unwrap() * (BigRational::one() - &t3);
        assert_eq!(lhs, t3);
        assert_eq!(wf.min_weight(), wf.weight("c d").unwrap());
    }

    #[test]
    fn theta_range_is_enforced() {
        assert!(weight_table(&parse_ratio("0.8105").unwrap()).is_err());
        assert!(weight_table(&parse_ratio("0.5").unwrap()).is_err());
        assert!(weight_table(&parse_ratio("1").unwrap()).is_err());
        assert!(weight_table(&parse_ratio("2").unwrap()).is_err());
        assert!(weight_table(&parse_ratio("0.811").unwrap()).is_ok());
        assert!(weight_table(&parse_ratio("0.99").unwrap()).is_ok());
    }

    #[test]
    fn weights_are_subadditive_not_superadditive() {
        let wf = weight_table(&theta_811()).unwrap();
        assert!(wf.subadditivity_violations().is_empty());
        // the reversed reading nu(u) + nu(v) < nu(uv) fails already for u = b,
        // v = c
        let b = wf.weight("b").unwrap();
        let c = wf.weight("c").unwrap();
        let bc = wf.weight("b c").unwrap();
        assert!(b + c > *bc);
        // the binding inequality: nu(bd) <= nu(bc) + nu(cd), with margin
        // (theta^3 + theta^2 + theta - 2) / (1 - theta^3)
        let bd = wf.weight("b d").unwrap();
        let cd = wf.weight("c d").unwrap();
        assert!(*bd <= wf.weight("b c").unwrap() + cd);
        // the root sits between 0.8105 and 0.8106
        assert!(weight_table(&parse_ratio("0.8105").unwrap()).is_err());
        assert!(weight_table(&parse_ratio("0.8106").unwrap()).is_ok());
    }

    #[test]
    fn syllable_sections_match_group_recursion() {
        let g = arc_builtin("grigorchuk-tilde");
        let a = Element::parse(g.clone(), "a").unwrap();
        for mask in 1..8usize {
            let e = Element::parse(g.clone(), WEIGHT_NAMES[mask]).unwrap();
            let dec = wreath_decompose(&e);
            assert_eq!(dec.root, vec![0, 1], "{} must fix the root", WEIGHT_NAMES[mask]);
            let expect0 = if has_a_section(mask) {
                a.clone()
            } else {
                Element::identity(g.clone())
            };
            let expect1 = Element::parse(g.clone(), WEIGHT_NAMES[rotl3(mask)]).unwrap();
            for (section, expect) in [(&dec.sections[0], &expect0), (&dec.sections[1], &expect1)] {
                let diff = section.mul(&expect.inverse());
                assert_eq!(
                    crate::element::is_trivial(&diff, DEFAULT_BUDGET),
                    crate::element::Tri::True,
                    "section of {} differs from the table",
                    WEIGHT_NAMES[mask]
                );
            }
            // conjugation by a swaps the two sections
            let conj = a.mul(&e).mul(&a);
            let cdec = wreath_decompose(&conj);
            for (section, expect) in [(&cdec.sections[0], &expect1), (&cdec.sections[1], &expect0)]
            {
                let diff = section.mul(&expect.inverse());
                assert_eq!(crate::element::is_trivial(&diff, DEFAULT_BUDGET), crate::element::Tri::True);
            }
        }
    }

    #[test]
    fn alternating_ratio_of_single_letter_words_is_theta() {
        // a word a s a s ... with one repeated contracting letter realizes the
        // per-syllable ratio exactly; (a b)^2 is the smallest example
        let wf = weight_table(&theta_811()).unwrap();
        for mask in 1..7usize {
            let mut counts = [0u8; 7];
            counts[mask - 1] = 2;
            assert_eq!(alternating_word_ratio(&wf, &counts), theta_811());
        }
        let mut counts = [0u8; 7];
        counts[X_MASK - 1] = 2;
        assert_eq!(alternating_word_ratio(&wf, &counts), BigRational::one());
    }

    #[test]
    fn certificate_fixture_at_length_twelve() {
        let g = arc_builtin("grigorchuk-tilde");
        let report =
            contraction_certificate(&g, &theta_811(), &parse_ratio("0.9").unwrap(), 12).unwrap();
        assert!(report.pass);
        assert!(report.max_ratio < 1.0);
        assert_eq!(report.x_pure_ratio, Some(1.0));
        assert!(report.zeta < 1.0);
        assert!(report.zeta_theta_on_word_side >= 1.0);
        // worst admitted mixture: five bcd letters and one cd, the cheapest
        // contracting letter, at the largest even syllable count
        let wf = weight_table(&theta_811()).unwrap();
        let x_cost = wf.weight("b c d").unwrap() + wf.weight("a").unwrap();
        let cd_cost = wf.weight("c d").unwrap() + wf.weight("a").unwrap();
        let five = BigRational::from_integer(5.into());
        let expected = (&five * &x_cost + theta_811() * &cd_cost) / (&five * &x_cost + &cd_cost);
        assert!((report.max_ratio - expected.to_f64().unwrap()).abs() < 1e-12);
        assert!(report.argmax.contains("c d"));
        // sample: two a-placements for each of 7^2 + 7^4 + 7^6 slot fillings
        assert_eq!(report.sample_size, 2 * (49 + 2401 + 117_649));
    }

    #[test]
    fn certificate_rejects_bad_parameters() {
        let g = arc_builtin("grigorchuk-tilde");
        let grig = arc_builtin("grigorchuk");
        let theta = theta_811();
        let eta = parse_ratio("0.9").unwrap();
        assert!(matches!(
            contraction_certificate(&grig, &theta, &eta, 12),
            Err(GrowthError::UnsupportedGroup)
        ));
        assert!(matches!(
            contraction_certificate(&g, &theta, &parse_ratio("1").unwrap(), 12),
            Err(GrowthError::EtaRange)
        ));
        assert!(matches!(
            contraction_certificate(&g, &theta, &eta, 3),
            Err(GrowthError::EmptySample(3))
        ));
        assert!(matches!(
            contraction_certificate(&g, &parse_ratio("0.5").unwrap(), &eta, 12),
            Err(GrowthError::ThetaRange)
        ));
    }

    #[test]
    fn odometer_coset_growth_is_linear() {
        let g = arc_builtin("odometer");
        let ray = RaySpec::standard(2);
        let sizes = coset_growth(&g, &ray, 8, 16);
        assert_eq!(sizes, vec![1, 3, 5, 7, 9, 11, 13, 15, 17]);
        let slope = fit_loglog_slope(&sizes).unwrap();
        assert!((slope - 1.0).abs() < 0.25, "slope {slope}");
    }

    #[test]
    fn grigorchuk_coset_growth_small_radii() {
        let g = arc_builtin("grigorchuk");
        let ray = RaySpec::standard(2);
        let sizes = coset_growth(&g, &ray, 4, 12);
        // hand check: only a moves the ray basepoint at radius 1; b and c
        // (whose first section is a) reach one new point at radius 2, and one
        // more point appears per radius after that
        assert_eq!(sizes, vec![1, 2, 3, 4, 5]);
        for w in sizes.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }
}
