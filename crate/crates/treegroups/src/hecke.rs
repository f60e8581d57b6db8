//! Orbital matrices of the level-`n` action relative to a parabolic base
//! point: the centralizer algebra of the permutation representation, its
//! commutativity (the Gelfand property), and the degrees of the irreducible
//! constituents extracted from eigenvalue multiplicities.

use std::sync::Arc;

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use thiserror::Error;

use crate::catalog::GroupDef;
use crate::parabolic::{NotTransitive, RaySpec};
use crate::quotient::{encode_vertex, QuotientContext};

/// Orbits of the level-`n` quotient on ordered pairs of points, one 0/1
/// matrix per orbit. Since the action is transitive, pair orbits biject
/// with orbits of the base-point stabilizer on points, so the number of
/// matrices equals the double-coset count.
pub struct OrbitalSet {
    level: usize,
    degree: usize,
    base: usize,
    /// Pair `(u, v)` lies in orbital `label[u * degree + v]`.
    label: Vec<u16>,
    rank: usize,
    /// `sizes[i]` is the constant row sum of matrix `i`.
    sizes: Vec<usize>,
    /// `transpose_partner[i] = j` with `Aᵢᵀ = Aⱼ`.
    transpose_partner: Vec<usize>,
}

/// Pair-orbit matrices of the level-`n` action, seeded from the base pairs
/// `(base, y)`; `base` is the level-`n` prefix of the ray.
pub fn orbitals(
    group: &Arc<GroupDef>,
    ray: &RaySpec,
    n: usize,
) -> Result<OrbitalSet, NotTransitive> {
    let ctx = QuotientContext::new(group.clone(), n);
    let degree = ctx.degree() as usize;
    let base = encode_vertex(&ray.prefix(n), group.d) as usize;
    let gens: Vec<Vec<usize>> = ctx
        .generator_perms()
        .iter()
        .map(|p| (0..degree).map(|x| p.apply(x as u32) as usize).collect())
        .collect();

    let mut point_orbit = vec![false; degree];
    point_orbit[0] = true;
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        for g in &gens {
            if !point_orbit[g[u]] {
                point_orbit[g[u]] = true;
                stack.push(g[u]);
            }
        }
    }
    if point_orbit.iter().any(|&b| !b) {
        return Err(NotTransitive);
    }

    let mut label = vec![u16::MAX; degree * degree];
    let mut rank = 0usize;
    // Visiting y = base first makes the diagonal pair orbit number 0.
    let ys = std::iter::once(base).chain((0..degree).filter(|&y| y != base));
    for y in ys {
        if label[base * degree + y] != u16::MAX {
            continue;
        }
        let id = rank as u16;
        rank += 1;
        label[base * degree + y] = id;
        let mut stack = vec![(base, y)];
        while let Some((u, v)) = stack.pop() {
            for g in &gens {
                let (u2, v2) = (g[u], g[v]);
                if label[u2 * degree + v2] == u16::MAX {
                    label[u2 * degree + v2] = id;
                    stack.push((u2, v2));
                }
            }
        }
    }
    debug_assert!(label.iter().all(|&l| l != u16::MAX));

    // Row-sum regularity: every row of each matrix has the same number of
    // ones, and the diagonal orbital is exactly the identity matrix.
    let mut sizes = vec![0usize; rank];
    for v in 0..degree {
        sizes[label[base * degree + v] as usize] += 1;
    }
    for u in 0..degree {
        assert_eq!(label[u * degree + u], 0, "diagonal pair left orbital 0");
        let mut row = vec![0usize; rank];
        for v in 0..degree {
            row[label[u * degree + v] as usize] += 1;
        }
        assert_eq!(row, sizes, "row sums are not orbit-constant");
    }
    assert_eq!(sizes[0], 1, "diagonal orbital is not the identity");

    let mut transpose_partner = vec![usize::MAX; rank];
    for u in 0..degree {
        for v in 0..degree {
            let i = label[u * degree + v] as usize;
            transpose_partner[i] = label[v * degree + u] as usize;
        }
    }

    Ok(OrbitalSet {
        level: n,
        degree,
        base,
        label,
        rank,
        sizes,
        transpose_partner,
    })
}

impl OrbitalSet {
    pub fn level(&self) -> usize {
        self.level
    }

    /// Number of points, `d^n`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base_point(&self) -> usize {
        self.base
    }

    /// Number of orbital matrices: the dimension of the centralizer algebra.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Constant row sum of each matrix; entry 0 is the identity orbital.
    pub fn row_sums(&self) -> &[usize] {
        &self.sizes
    }

    /// Index of the transposed matrix: `Aᵢᵀ = A_{partner(i)}`.
    pub fn transpose_partner(&self, i: usize) -> usize {
        self.transpose_partner[i]
    }

    pub fn orbital_of_pair(&self, u: usize, v: usize) -> usize {
        self.label[u * self.degree + v] as usize
    }

    /// The 0/1 matrix of orbital `i`.
    pub fn matrix(&self, i: usize) -> DMatrix<i64> {
        DMatrix::from_fn(self.degree, self.degree, |u, v| {
            (self.label[u * self.degree + v] as usize == i) as i64
        })
    }

    fn adjacency(&self, i: usize) -> Vec<Vec<u32>> {
        let mut rows = vec![Vec::with_capacity(self.sizes[i]); self.degree];
        for u in 0..self.degree {
            for v in 0..self.degree {
                if self.label[u * self.degree + v] as usize == i {
                    rows[u].push(v as u32);
                }
            }
        }
        rows
    }

    /// Exact integer product `AᵢAⱼ`, row-major.
    fn product(&self, adj_i: &[Vec<u32>], j: usize) -> Vec<i64> {
        let n = self.degree;
        let mut out = vec![0i64; n * n];
        for u in 0..n {
            for &v in &adj_i[u] {
                let v = v as usize;
                for w in 0..n {
                    if self.label[v * n + w] as usize == j {
                        out[u * n + w] += 1;
                    }
                }
            }
        }
        out
    }
}

/// True iff all orbital matrices pairwise commute (exact integer products),
/// i.e. the centralizer algebra is abelian and the pair is Gelfand.
pub fn check_gelfand(o: &OrbitalSet) -> bool {
    let adj: Vec<Vec<Vec<u32>>> = (0..o.rank).map(|i| o.adjacency(i)).collect();
    for i in 0..o.rank {
        for j in i + 1..o.rank {
            if o.product(&adj[i], j) != o.product(&adj[j], i) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub rank: usize,
    pub commutative: bool,
    /// Multiset of constituent degrees, ascending; empty when the algebra is
    /// not commutative.
    pub degrees: Vec<usize>,
    pub degree_sum: usize,
    /// Expected family for this alphabet size: `d` ones, then `d−1` copies
    /// of `d^i` for each `1 ≤ i ≤ n−1`.
    pub predicted: Vec<usize>,
    pub predicted_match: bool,
    /// Set for ternary alphabets, where only the `3^i` family is
    /// dimensionally consistent.
    pub prediction_note: Option<&'static str>,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DegreeError {
    #[error("eigenvalue gap {gap:.3e} is between the cluster tolerance and ten times it; retry with another seed")]
    ClusterAmbiguous { gap: f64 },
    #[error("eigenvalue clustering found {found} clusters for algebra rank {rank}; retry with another seed")]
    RankMismatch { found: usize, rank: usize },
    #[error("trace cross-check failed: {0}")]
    TraceMismatch(&'static str),
    #[error("no random combination separated the spectrum within {attempts} attempts")]
    NoConvergence { attempts: usize },
}

/// Expected degree multiset: `d` ones and `d−1` copies of each `d^i`,
/// `i = 1..n−1`; total sums to `d^n`.
pub fn predicted_degrees(d: usize, n: usize) -> Vec<usize> {
    if n == 0 {
        return vec![1];
    }
    let mut v = vec![1; d];
    for i in 1..n {
        v.extend(std::iter::repeat(d.pow(i as u32)).take(d - 1));
    }
    v
}

const CLUSTER_TOL: f64 = 1e-8;
/// QR sweeps allowed per eigensolve; some integer combinations cycle forever
/// under the unbounded solver, so every solve is capped and retried instead.
const EIGEN_ITER_CAP: usize = 10_000;
const EIGEN_ATTEMPTS: usize = 8;

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Sorted cluster sizes of points at mutual distance below `tol`, or the
/// offending gap when a pair of points sits between `tol` and `10·tol`.
fn cluster_sizes(points: &[(f64, f64)], tol: f64) -> Result<Vec<usize>, f64> {
    let m = points.len();
    let mut used = vec![false; m];
    let mut sizes = Vec::new();
    for i in 0..m {
        if used[i] {
            continue;
        }
        // Grow the cluster transitively so chains of near-points merge.
        let mut members = vec![i];
        used[i] = true;
        let mut cursor = 0;
        while cursor < members.len() {
            let a = points[members[cursor]];
            cursor += 1;
            for j in 0..m {
                if used[j] {
                    continue;
                }
                let d = ((points[j].0 - a.0).powi(2) + (points[j].1 - a.1).powi(2)).sqrt();
                if d < tol {
                    used[j] = true;
                    members.push(j);
                } else if d < 10.0 * tol {
                    return Err(d);
                }
            }
        }
        sizes.push(members.len());
    }
    sizes.sort_unstable();
    Ok(sizes)
}

/// Constituent degrees of the permutation representation when the algebra is
/// commutative. Eigenvalue multiplicities of a seeded random integer
/// combination give the clusters; a symmetrized combination `Σ cᵢ(Aᵢ+Aᵢᵀ)`
/// cannot separate a conjugate pair of constituents (both halves see the
/// same real eigenvalue), so a second, non-symmetrized combination is read
/// through its complex eigenvalues to split those pairs. Exact integer trace
/// identities over the orbital matrices validate the structure. Every
/// eigensolve is iteration-capped; a combination whose solve stalls or whose
/// spectrum clusters ambiguously is discarded and fresh coefficients are
/// drawn from the same seeded stream.
pub fn decomposition_degrees(
    o: &OrbitalSet,
    seed: u64,
) -> Result<DecompositionReport, DegreeError> {
    let commutative = check_gelfand(o);
    let rank = o.rank;

    // tr(Aᵢ) = degree exactly when i is the identity orbital, else 0; and
    // tr(AᵢAⱼ) counts pairs in orbital i whose reverse lies in orbital j,
    // which is degree·row_sum(i) exactly when j is the transpose partner.
    let adj: Vec<Vec<Vec<u32>>> = (0..rank).map(|i| o.adjacency(i)).collect();
    for i in 0..rank {
        let tr: i64 = (0..o.degree)
            .map(|u| (o.label[u * o.degree + u] as usize == i) as i64)
            .sum();
        let expect = if i == 0 { o.degree as i64 } else { 0 };
        if tr != expect {
            return Err(DegreeError::TraceMismatch("tr(A_i)"));
        }
        for j in 0..rank {
            let prod = o.product(&adj[i], j);
            let tr: i64 = (0..o.degree).map(|u| prod[u * o.degree + u]).sum();
            let expect = if j == o.transpose_partner[i] {
                (o.degree * o.sizes[i]) as i64
            } else {
                0
            };
            if tr != expect {
                return Err(DegreeError::TraceMismatch("tr(A_i A_j)"));
            }
        }
    }

    let d = guess_alphabet(o.degree, o.level);
    let predicted = predicted_degrees(d, o.level);
    let prediction_note = (d == 3).then_some(
        "ternary degree family read as 3^i per constituent pair; a 2^i family cannot sum to 3^n",
    );

    if !commutative {
        return Ok(DecompositionReport {
            rank,
            commutative,
            degrees: Vec::new(),
            degree_sum: 0,
            predicted,
            predicted_match: false,
            prediction_note,
        });
    }

    let mut state = seed ^ 0xD1B54A32D192ED03;
    let coeff = |state: &mut u64| (splitmix(state) % 1024 + 1) as f64;

    let n = o.degree;
    let mut last_err = DegreeError::NoConvergence {
        attempts: EIGEN_ATTEMPTS,
    };
    for _ in 0..EIGEN_ATTEMPTS {
        let c_sym: Vec<f64> = (0..rank).map(|_| coeff(&mut state)).collect();
        let c_gen: Vec<f64> = (0..rank).map(|_| coeff(&mut state)).collect();

        let mut m_sym = DMatrix::<f64>::zeros(n, n);
        let mut m_gen = DMatrix::<f64>::zeros(n, n);
        for u in 0..n {
            for v in 0..n {
                let i = o.label[u * n + v] as usize;
                m_sym[(u, v)] += c_sym[i];
                m_sym[(v, u)] += c_sym[i];
                m_gen[(u, v)] += c_gen[i];
            }
        }

        let Some(sym) = SymmetricEigen::try_new(m_sym, f64::EPSILON, EIGEN_ITER_CAP) else {
            continue;
        };
        let Some(schur) = Schur::try_new(m_gen, f64::EPSILON, EIGEN_ITER_CAP) else {
            continue;
        };

        let sym_vals: Vec<(f64, f64)> = sym.eigenvalues.iter().map(|&x| (x, 0.0)).collect();
        let scale_sym = sym_vals.iter().map(|p| p.0.abs()).fold(1.0f64, f64::max);
        let sym_clusters = match cluster_sizes(&sym_vals, CLUSTER_TOL * scale_sym) {
            Ok(c) => c,
            Err(gap) => {
                last_err = DegreeError::ClusterAmbiguous { gap };
                continue;
            }
        };

        let gen_vals: Vec<(f64, f64)> = schur
            .complex_eigenvalues()
            .iter()
            .map(|c| (c.re, c.im))
            .collect();
        let scale_gen = gen_vals
            .iter()
            .map(|p| (p.0 * p.0 + p.1 * p.1).sqrt())
            .fold(1.0f64, f64::max);
        let degrees = match cluster_sizes(&gen_vals, CLUSTER_TOL * scale_gen) {
            Ok(c) => c,
            Err(gap) => {
                last_err = DegreeError::ClusterAmbiguous { gap };
                continue;
            }
        };

        if degrees.len() != rank {
            last_err = DegreeError::RankMismatch {
                found: degrees.len(),
                rank,
            };
            continue;
        }
        if sym_clusters.len() > degrees.len() {
            last_err = DegreeError::RankMismatch {
                found: sym_clusters.len(),
                rank,
            };
            continue;
        }
        let degree_sum: usize = degrees.iter().sum();
        if degree_sum != o.degree {
            last_err = DegreeError::TraceMismatch("degree sum");
            continue;
        }

        let mut predicted_sorted = predicted.clone();
        predicted_sorted.sort_unstable();
        let predicted_match = predicted_sorted == degrees;

        return Ok(DecompositionReport {
            rank,
            commutative,
            degrees,
            degree_sum,
            predicted,
            predicted_match,
            prediction_note,
        });
    }
    Err(last_err)
}

/// Recover `d` from `degree = d^level`; for level 0 the alphabet size is
/// not recoverable, and 2 is returned (the prediction is `{1}` either way).
fn guess_alphabet(degree: usize, level: usize) -> usize {
    if level == 0 {
        return 2;
    }
    for d in 2..=degree {
        if d.pow(level as u32) == degree {
            return d;
        }
    }
    2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::arc_builtin;
    use crate::parabolic::double_coset_count;

    fn set(name: &str, n: usize) -> OrbitalSet {
        let g = arc_builtin(name);
        let ray = RaySpec::standard(g.d);
        orbitals(&g, &ray, n).unwrap()
    }

    #[test]
    fn orbitals_small_cases() {
        // Level 0: one point, one orbital, the 1×1 identity.
        let o = set("grigorchuk", 0);
        assert_eq!(o.rank(), 1);
        assert_eq!(o.row_sums(), &[1]);
        assert_eq!(o.matrix(0), DMatrix::from_element(1, 1, 1));

        // Level 2 on four points: the stabilizer of point 3 has orbits
        // {3}, {2}, {0,1}, giving three orbitals with row sums 1, 1, 2.
        let o = set("grigorchuk", 2);
        assert_eq!(o.rank(), 3);
        let mut sums = o.row_sums().to_vec();
        sums.sort_unstable();
        assert_eq!(sums, vec![1, 1, 2]);

        // A 3-cycle on three points: orbitals are the diagonal and the two
        // shift classes, each with row sum 1, swapped by transposition.
        let o = set("gamma", 1);
        assert_eq!(o.rank(), 3);
        assert_eq!(o.row_sums(), &[1, 1, 1]);
        assert_eq!(o.transpose_partner(0), 0);
        assert_eq!(o.transpose_partner(1), 2);
        assert_eq!(o.transpose_partner(2), 1);
    }

    #[test]
    fn orbital_matrices_sum_to_ones_and_match_coset_count() {
        for (name, levels) in [
            ("grigorchuk", &[1usize, 2, 3, 4][..]),
            ("grigorchuk-tilde", &[1, 2, 3][..]),
            ("gamma", &[1, 2, 3][..]),
            ("gamma-bar", &[1, 2][..]),
            ("gamma-bar-bar", &[1, 2][..]),
        ] {
            let g = arc_builtin(name);
            let ray = RaySpec::standard(g.d);
            for &n in levels {
                let o = orbitals(&g, &ray, n).unwrap();
                let total: DMatrix<i64> = (0..o.rank()).map(|i| o.matrix(i)).sum();
                assert_eq!(total, DMatrix::from_element(o.degree(), o.degree(), 1));
                assert_eq!(o.matrix(0), DMatrix::identity(o.degree(), o.degree()));
                assert_eq!(o.rank(), double_coset_count(&g, &ray, n).unwrap());
                let expected = if g.d == 2 { n + 1 } else { 2 * n + 1 };
                assert_eq!(o.rank(), expected);
            }
        }
    }

    #[test]
    fn gelfand_property_holds_on_builtins() {
        for name in [
            "grigorchuk",
            "grigorchuk-tilde",
            "gamma",
            "gamma-bar",
            "gamma-bar-bar",
        ] {
            for n in 0..=3 {
                assert!(check_gelfand(&set(name, n)), "{name} level {n}");
            }
        }
    }

    #[test]
    fn degrees_binary() {
        let r = decomposition_degrees(&set("grigorchuk", 2), 7).unwrap();
        assert!(r.commutative);
        assert_eq!(r.degrees, vec![1, 1, 2]);
        assert!(r.predicted_match);

        let r = decomposition_degrees(&set("grigorchuk", 3), 7).unwrap();
        assert_eq!(r.degrees, vec![1, 1, 2, 4]);
        assert!(r.predicted_match);

        let r = decomposition_degrees(&set("grigorchuk-tilde", 4), 7).unwrap();
        assert_eq!(r.degrees, vec![1, 1, 2, 4, 8]);
        assert_eq!(r.degree_sum, 16);
    }

    #[test]
    fn degrees_ternary() {
        // Deduced independently: the quotient is a 3-group, so nonlinear
        // constituent degrees are powers of 3; the number of linear
        // constituents is the index of (derived subgroup)·(parabolic),
        // which is 3 at level ≥ 1, plus rank and total-sum constraints.
        let r = decomposition_degrees(&set("gamma", 2), 7).unwrap();
        assert!(r.commutative);
        assert_eq!(r.degrees, vec![1, 1, 1, 3, 3]);
        assert!(r.predicted_match);
        assert!(r.prediction_note.is_some());

        let r = decomposition_degrees(&set("gamma-bar", 2), 7).unwrap();
        assert_eq!(r.degrees, vec![1, 1, 1, 3, 3]);

        let r = decomposition_degrees(&set("gamma-bar-bar", 3), 7).unwrap();
        assert_eq!(r.degrees, vec![1, 1, 1, 3, 3, 9, 9]);
        assert_eq!(r.degree_sum, 27);
    }

    #[test]
    fn degrees_trivial_level() {
        let r = decomposition_degrees(&set("gamma", 0), 7).unwrap();
        assert_eq!(r.degrees, vec![1]);
        assert_eq!(r.predicted, vec![1]);
    }

    #[test]
    fn degrees_nest_across_levels() {
        for name in ["grigorchuk", "gamma"] {
            let g = arc_builtin(name);
            let mut prev: Vec<usize> = vec![1];
            for n in 1..=3 {
                let r = decomposition_degrees(&set(name, n), 7).unwrap();
                let mut rest = r.degrees.clone();
                for x in &prev {
                    let pos = rest.iter().position(|y| y == x).expect("nested degrees");
                    rest.remove(pos);
                }
                assert_eq!(rest.len(), g.d - 1, "{name} level {n} adds d-1 degrees");
                prev = r.degrees;
            }
        }
    }

    #[test]
    fn predicted_family_shapes() {
        assert_eq!(predicted_degrees(2, 4), vec![1, 1, 2, 4, 8]);
        assert_eq!(predicted_degrees(3, 3), vec![1, 1, 1, 3, 3, 9, 9]);
        assert_eq!(predicted_degrees(2, 0), vec![1]);
    }
}
