//! Seeded random instances.
//!
//! Valid C-Hodge complexes come from complexes of split mixed Hodge
//! structures (identity pairs and lone terms) hidden by a random base change,
//! reindexed, and optionally pushed through a cone, a twist or a translation.
//! Invalid ones break exactly one axiom in a small summand. Finite-space
//! instances are random posets, stratifications merged from the point
//! stratification, constant-constructible sheaves built from monotone
//! families of subspaces, and blow-downs whose fibers have a least point.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtcx::{self, cone, reindex_from_mhs_complex, Chain, Complex, Filtration, Morphism, TriFilteredComplex};
use crate::finspace::{BlowDown, FinitePoset, PosetSheaf, Stratification};
use crate::hodge::{Axiom, CHodgeStructure};
use crate::json::HodgeComplexJson;
use crate::qlinalg::{Matrix, Quotient, Subspace, Q};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bounds for generated trifiltered complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeSize {
    pub max_dim: usize,
    pub max_amplitude: usize,
    /// Number of indices `p` with `Gr^p_W ≠ 0` somewhere.
    pub max_weight_jumps: usize,
}

impl Default for HodgeSize {
    fn default() -> Self {
        HodgeSize { max_dim: 40, max_amplitude: 5, max_weight_jumps: 5 }
    }
}

impl HodgeSize {
    pub fn check(&self) -> Result<()> {
        if self.max_dim == 0 || self.max_amplitude == 0 || self.max_weight_jumps == 0 {
            return Err(Error::Precondition("size bounds must be positive".into()));
        }
        Ok(())
    }

    /// Whether `a` respects the bounds.
    pub fn admits(&self, a: &TriFilteredComplex) -> bool {
        a.complex.total_dim() <= self.max_dim
            && a.complex.dims().len() <= self.max_amplitude
            && weight_indices(a).len() <= self.max_weight_jumps
    }
}

/// Indices `p` with `Gr^p_W A^n ≠ 0` for some `n`.
pub fn weight_indices(a: &TriFilteredComplex) -> Vec<i32> {
    let mut v: Vec<i32> = a.complex.degrees().flat_map(|n| a.w.chain(n).jumps()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Unimodular integer matrix with its inverse.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> (Matrix<Q>, Matrix<Q>) {
    let mut g = Matrix::identity(n);
    if n > 1 {
        for _ in 0..2 * n {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let c = Q::from(*[-2i64, -1, 1, 2].choose(rng).unwrap());
            for col in 0..n {
                let v = g.get(j, col) + &(&c * g.get(i, col));
                g.set(j, col, v);
            }
        }
    }
    let inv = g.inverse().expect("unimodular");
    (g, inv)
}

/// Pure structure of weight `w` on `k^dim` with random Hodge types, in a
/// random basis.
pub fn random_pure<R: Rng>(rng: &mut R, w: i32, dim: usize) -> CHodgeStructure<Q> {
    let lo = w.div_euclid(2) - 1;
    let mut counts: BTreeMap<i32, usize> = BTreeMap::new();
    for _ in 0..dim {
        *counts.entry(lo + rng.gen_range(0..3)).or_default() += 1;
    }
    let types: Vec<(i32, usize)> = counts.into_iter().collect();
    let (g, _) = random_invertible(rng, dim);
    CHodgeStructure::pure_from_basis(w, &g, &types).expect("basis of full rank")
}

/// Split mixed structure with the given `(weight, dim)` parts.
pub fn random_split_mhs<R: Rng>(rng: &mut R, parts: &[(i32, usize)]) -> CHodgeStructure<Q> {
    parts.iter().fold(CHodgeStructure::zero(), |acc, &(w, d)| CHodgeStructure::direct_sum(&acc, &random_pure(rng, w, d)))
}

/// A complex of mixed Hodge structures with strict differentials: identity
/// pairs `H -> H` and lone terms, conjugated degreewise by random base changes.
pub fn random_mhs_complex<R: Rng>(rng: &mut R, budget: usize, amplitude: usize, weight_jumps: usize) -> (i32, Vec<CHodgeStructure<Q>>, Vec<Matrix<Q>>) {
    let amplitude = amplitude.max(1);
    let min = rng.gen_range(-2..=1);
    let p0 = rng.gen_range(-2..=1);
    let k = rng.gen_range(1..=weight_jumps.max(1)) as i32;
    let target = rng.gen_range(1..=budget.max(1));
    // per degree: list of (piece, dim); pieces shared by two degrees are pairs
    let mut per_degree: Vec<Vec<(usize, usize)>> = vec![Vec::new(); amplitude];
    let mut pieces: Vec<CHodgeStructure<Q>> = Vec::new();
    let mut pairs: Vec<usize> = Vec::new();
    let mut used = 0;
    while used < target {
        let left = target - used;
        let id = pieces.len();
        let pair = amplitude >= 2 && k >= 2 && left >= 2 && rng.gen_bool(0.6);
        if pair {
            let n = rng.gen_range(0..amplitude - 1);
            let p = p0 + rng.gen_range(0..k - 1);
            let d = rng.gen_range(1..=(left / 2).min(3));
            pieces.push(random_pure(rng, min + n as i32 - p, d));
            per_degree[n].push((id, d));
            per_degree[n + 1].push((id, d));
            pairs.push(id);
            used += 2 * d;
        } else {
            let n = rng.gen_range(0..amplitude);
            let p = p0 + rng.gen_range(0..k);
            let d = rng.gen_range(1..=left.min(3));
            pieces.push(random_pure(rng, min + n as i32 - p, d));
            per_degree[n].push((id, d));
            used += d;
        }
    }
    let structures: Vec<CHodgeStructure<Q>> = per_degree
        .iter()
        .map(|parts| parts.iter().fold(CHodgeStructure::zero(), |acc, &(id, _)| CHodgeStructure::direct_sum(&acc, &pieces[id])))
        .collect();
    let offsets = |parts: &[(usize, usize)]| -> BTreeMap<usize, (usize, usize)> {
        let mut off = 0;
        parts.iter().map(|&(id, d)| {
            let r = (id, (off, d));
            off += d;
            r
        }).collect()
    };
    let mut diffs = Vec::new();
    for n in 0..amplitude - 1 {
        let (src, dst) = (offsets(&per_degree[n]), offsets(&per_degree[n + 1]));
        let mut d = Matrix::zeros(structures[n + 1].dim(), structures[n].dim());
        for (id, &(o, dim)) in &src {
            if pairs.contains(id) {
                if let Some(&(t, _)) = dst.get(id) {
                    d.set_block(t, o, &Matrix::identity(dim));
                }
            }
        }
        diffs.push(d);
    }
    let changes: Vec<(Matrix<Q>, Matrix<Q>)> = structures.iter().map(|h| random_invertible(rng, h.dim())).collect();
    let structures = structures.iter().zip(&changes).map(|(h, (g, _))| h.transform(g)).collect();
    let diffs = diffs.iter().enumerate().map(|(n, d)| changes[n + 1].0.mul(d).mul(&changes[n].1)).collect();
    (min, structures, diffs)
}

/// Reindexed complex of split mixed Hodge structures within `budget` dimensions.
pub fn random_reindexed<R: Rng>(rng: &mut R, budget: usize, amplitude: usize, weight_jumps: usize) -> TriFilteredComplex {
    let amp = rng.gen_range(1..=amplitude.max(1));
    let (min, hs, diffs) = random_mhs_complex(rng, budget, amp, weight_jumps);
    reindex_from_mhs_complex(min, &hs, &diffs).expect("differentials are morphisms of mixed Hodge structures")
}

fn inclusion(a: &TriFilteredComplex, sum: &TriFilteredComplex) -> BTreeMap<i32, Matrix<Q>> {
    sum.complex
        .degrees()
        .map(|n| {
            let mut m = Matrix::zeros(sum.complex.dim(n), a.complex.dim(n));
            m.set_block(0, 0, &Matrix::identity(a.complex.dim(n)));
            (n, m)
        })
        .collect()
}

/// How a generated valid instance was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Reindex,
    ConeOfInclusion,
    ConeOfProjection,
    Twist,
    Translate,
}

/// A valid C-Hodge complex within `size`.
pub fn random_hodge_complex<R: Rng>(rng: &mut R, size: &HodgeSize) -> (TriFilteredComplex, Construction) {
    for _ in 0..64 {
        let kind = *[
            Construction::Reindex,
            Construction::Reindex,
            Construction::ConeOfInclusion,
            Construction::ConeOfProjection,
            Construction::Twist,
            Construction::Translate,
        ]
        .choose(rng)
        .unwrap();
        let a = match kind {
            Construction::ConeOfInclusion | Construction::ConeOfProjection => {
                if size.max_amplitude < 2 || size.max_dim < 3 {
                    continue;
                }
                let amp = size.max_amplitude - 1;
                let x = random_reindexed(rng, size.max_dim / 3, amp, size.max_weight_jumps);
                let y = random_reindexed(rng, size.max_dim / 3, amp, size.max_weight_jumps);
                let s = filtcx::direct_sum(&x, &y);
                let incl = inclusion(&x, &s);
                let m = if kind == Construction::ConeOfInclusion {
                    Morphism::new(x, s, incl)
                } else {
                    let proj = incl.into_iter().map(|(n, m)| (n, m.transpose())).collect();
                    Morphism::new(s, x, proj)
                };
                cone(&m.expect("summand maps are filtered chain maps")).expect("valid morphism").cone
            }
            Construction::Reindex => random_reindexed(rng, size.max_dim, size.max_amplitude, size.max_weight_jumps),
            Construction::Twist => {
                let a = random_reindexed(rng, size.max_dim, size.max_amplitude, size.max_weight_jumps);
                filtcx::twist(&a, rng.gen_range(-2..=2), rng.gen_range(-2..=2))
            }
            Construction::Translate => {
                let a = random_reindexed(rng, size.max_dim, size.max_amplitude, size.max_weight_jumps);
                filtcx::translate(&a, rng.gen_range(-2..=2))
            }
        };
        if size.admits(&a) && a.complex.total_dim() > 0 {
            return (a, kind);
        }
    }
    (random_reindexed(rng, size.max_dim.min(4), 1, 1), Construction::Reindex)
}

/// The single axiom broken by an invalid instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Defect {
    /// `d` on one `Gr_W` piece is filtered but not strict for `F`.
    NotStrictF,
    NotStrictFbar,
    /// `F` and `F̄` share a line on a pure piece.
    NotOpposed,
    /// A pure structure sits at a weight index that forces another weight.
    WrongWeight,
    /// `d² ≠ 0`.
    NotAComplex,
}

pub const DEFECTS: [Defect; 5] = [Defect::NotStrictF, Defect::NotStrictFbar, Defect::NotOpposed, Defect::WrongWeight, Defect::NotAComplex];

/// Where the validator must report the failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedFailure {
    /// `None` for inputs that are not complexes at all.
    pub axiom: Option<String>,
    pub degree: i32,
    pub weight_index: Option<i32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvalidInstance {
    pub defect: Defect,
    pub data: HodgeComplexJson,
    pub expected: ExpectedFailure,
}

fn axiom_name(a: Axiom) -> String {
    format!("{a:?}")
}

fn random_line<R: Rng>(rng: &mut R, dim: usize) -> Subspace<Q> {
    loop {
        let v: Vec<Q> = (0..dim).map(|_| Q::from(rng.gen_range(-2..=2))).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return Subspace::span(dim, vec![v]);
        }
    }
}

fn single_degree(n: i32, dim: usize, f: Chain<Q>, fbar: Chain<Q>, w: Chain<Q>) -> TriFilteredComplex {
    let c = Complex::single(n, dim);
    TriFilteredComplex::new(c, Filtration::new(n, vec![f]), Filtration::new(n, vec![fbar]), Filtration::new(n, vec![w]))
        .expect("one degree, no differential")
}

/// An instance violating exactly `defect`, next to a random valid summand.
pub fn invalid_instance<R: Rng>(rng: &mut R, defect: Defect) -> InvalidInstance {
    let n0 = rng.gen_range(-2..=2);
    let p0 = rng.gen_range(-2..=2);
    let (bad, expected) = match defect {
        Defect::NotStrictF | Defect::NotStrictFbar => {
            let m = rng.gen_range(1..=2);
            let (d, _) = random_invertible(rng, m);
            let a = rng.gen_range(-1..=1);
            let b = rng.gen_range(-1..=1);
            let (sf, tf) = (Chain::trivial(m, a), Chain::trivial(m, a + 1));
            let (sb, tb) = (Chain::trivial(m, b), Chain::trivial(m, b));
            let ((f0, f1), (g0, g1)) = if defect == Defect::NotStrictF { ((sf, tf), (sb, tb)) } else { ((sb, tb), (sf, tf)) };
            let c = Complex::new(n0, vec![m, m], vec![d]).expect("two terms");
            let w = Filtration::trivial(&c, p0);
            let t = TriFilteredComplex::new(c, Filtration::new(n0, vec![f0, f1]), Filtration::new(n0, vec![g0, g1]), w)
                .expect("filtered by construction");
            (t, ExpectedFailure { axiom: Some(axiom_name(Axiom::HC2)), degree: n0 + 1, weight_index: Some(p0) })
        }
        Defect::NotOpposed => {
            let w = n0 - p0;
            let a = rng.gen_range(-1..=1);
            let l = random_line(rng, 2);
            let f = Chain::new(2, a + 1, vec![l.clone()]).expect("nested");
            let fbar = Chain::new(2, w - a, vec![l]).expect("nested");
            let t = single_degree(n0, 2, f, fbar, Chain::trivial(2, p0));
            (t, ExpectedFailure { axiom: Some(axiom_name(Axiom::HC3)), degree: n0, weight_index: Some(p0) })
        }
        Defect::WrongWeight => {
            let delta = *[-2, -1, 1, 2].choose(rng).unwrap();
            let dim = rng.gen_range(1..=3);
            let h = random_pure(rng, n0 - p0 + delta, dim);
            let t = single_degree(n0, dim, h.f, h.fbar, Chain::trivial(dim, p0));
            (t, ExpectedFailure { axiom: Some(axiom_name(Axiom::HC3)), degree: n0, weight_index: Some(p0) })
        }
        Defect::NotAComplex => {
            let m = rng.gen_range(1..=2);
            let (d0, _) = random_invertible(rng, m);
            let (d1, _) = random_invertible(rng, m);
            let triv = |j: i32| vec![Chain::trivial(m, j); 3];
            let data = HodgeComplexJson::from_parts(n0, &[m, m, m], &[d0, d1], &triv(0), &triv(0), &triv(p0));
            let expected = ExpectedFailure { axiom: None, degree: n0, weight_index: None };
            return InvalidInstance { defect, data, expected };
        }
    };
    let good = random_reindexed(rng, 12, 3, 3);
    let all = if rng.gen_bool(0.5) { filtcx::direct_sum(&good, &bad) } else { filtcx::direct_sum(&bad, &good) };
    InvalidInstance { defect, data: HodgeComplexJson::from_trifiltered(&all), expected }
}

/// `e` of type `(0, 0)` in `Gr^0` of degree 0, `f` of type `(0, 0)` in
/// `Gr^2` of degree 1, `d e = f`: HC3 fails in degree 1 and the weight
/// spectral sequence has `d_2 ≠ 0`.
pub fn nondegenerate_control() -> TriFilteredComplex {
    let c = Complex::new(0, vec![1, 1], vec![Matrix::identity(1)]).expect("two terms");
    let f = Filtration::trivial(&c, 0);
    let w = Filtration::new(0, vec![Chain::trivial(1, 0), Chain::trivial(1, 2)]);
    TriFilteredComplex::new(c, f.clone(), f, w).expect("d preserves W")
}

// ---------- finite spaces ----------

/// Random poset on `n` points generated by relations `i < j` (`i < j` as
/// integers) drawn with probability `density`.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> FinitePoset {
    let mut rel = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(density) {
                rel.push((i, j));
            }
        }
    }
    FinitePoset::new(n, &rel).expect("acyclic relations")
}

/// Connected poset with `n` points and at most `max_maximal` maximal points.
pub fn random_connected_poset<R: Rng>(rng: &mut R, n: usize, max_maximal: usize) -> FinitePoset {
    loop {
        let p = random_poset(rng, n, 0.5);
        if p.components().len() == 1 && p.maximal().len() <= max_maximal {
            return p;
        }
    }
}

/// Random stratification with at most `max_atoms` atoms, merged from the
/// point stratification.
pub fn random_stratification<R: Rng>(rng: &mut R, base: &FinitePoset, max_atoms: usize) -> Stratification {
    let target = rng.gen_range(1..=max_atoms.max(1));
    let mut atom_of: Vec<usize> = (0..base.len()).collect();
    let relabel = |v: &[usize]| -> Vec<usize> {
        let mut names: Vec<usize> = v.to_vec();
        names.sort_unstable();
        names.dedup();
        v.iter().map(|a| names.binary_search(a).unwrap()).collect()
    };
    for _ in 0..8 * base.len() {
        let k = atom_of.iter().max().map_or(0, |m| m + 1);
        if k <= target {
            break;
        }
        let a = rng.gen_range(0..k);
        let mut b = rng.gen_range(0..k - 1);
        if b >= a {
            b += 1;
        }
        let merged = relabel(&atom_of.iter().map(|&x| if x == b { a } else { x }).collect::<Vec<_>>());
        if Stratification::new(base.clone(), merged.clone()).is_ok() {
            atom_of = merged;
        }
    }
    let k = atom_of.iter().max().map_or(0, |m| m + 1);
    if k > max_atoms {
        return Stratification::trivial(base);
    }
    Stratification::new(base.clone(), atom_of).expect("accepted merge")
}

/// Stratified poset with at most `max_points` points and `max_atoms` atoms.
pub fn random_stratified_poset<R: Rng>(rng: &mut R, max_points: usize, max_atoms: usize) -> Stratification {
    for _ in 0..20 {
        let n = rng.gen_range(1..=max_points.max(1));
        let p = random_poset(rng, n, 0.4);
        let s = random_stratification(rng, &p, max_atoms);
        if s.len() > 1 || n == 1 || rng.gen_bool(0.2) {
            return s;
        }
    }
    Stratification::trivial(&random_poset(rng, max_points.clamp(1, 3), 0.5))
}

fn random_subspace<R: Rng>(rng: &mut R, r: usize) -> Subspace<Q> {
    let k = rng.gen_range(0..=r);
    let gens = (0..k).map(|_| (0..r).map(|_| Q::from(rng.gen_range(-1..=1))).collect()).collect();
    Subspace::span(r, gens)
}

/// Subspaces `U_a ⊆ k^r` per atom with `U_{a(x)} ⊆ U_{a(y)}` whenever `x ≤ y`.
fn monotone_family<R: Rng>(rng: &mut R, strat: &Stratification, r: usize) -> Vec<Subspace<Q>> {
    let base = strat.base();
    let mut u: Vec<Subspace<Q>> = (0..strat.len()).map(|_| random_subspace(rng, r)).collect();
    loop {
        let mut changed = false;
        for x in 0..base.len() {
            for y in base.up_set(x) {
                let (a, b) = (strat.atom_of(x), strat.atom_of(y));
                if a != b && !u[b].contains_subspace(&u[a]) {
                    u[b] = u[b].sum(&u[a]);
                    changed = true;
                }
            }
        }
        if !changed {
            return u;
        }
    }
}

fn coords_matrix(target: &Quotient<Q>, vectors: &[Vec<Q>]) -> Matrix<Q> {
    let cols: Vec<Vec<Q>> = vectors.iter().map(|v| target.project(v)).collect();
    Matrix::from_columns(target.dim(), &cols)
}

/// Random sheaf, constant on every atom of `strat`: the direct sum of a
/// family of subspaces of `k^{r1}` (maps are inclusions) and a family of
/// quotients of `k^{r2}` (maps are projections), conjugated pointwise by
/// random invertible matrices.
pub fn random_cc_sheaf<R: Rng>(rng: &mut R, strat: &Stratification, max_rank: usize) -> PosetSheaf {
    let base = strat.base().clone();
    let r1 = rng.gen_range(0..=max_rank);
    let r2 = rng.gen_range(0..=max_rank - r1);
    let subs = monotone_family(rng, strat, r1);
    let quos = monotone_family(rng, strat, r2);
    let sub_of = |x: usize| Quotient::of(subs[strat.atom_of(x)].clone());
    let quo_of = |x: usize| Quotient::new(Subspace::full(r2), quos[strat.atom_of(x)].clone()).expect("nested");
    let stalks: Vec<usize> = (0..base.len()).map(|x| sub_of(x).dim() + quo_of(x).dim()).collect();
    let changes: Vec<(Matrix<Q>, Matrix<Q>)> = stalks.iter().map(|&d| random_invertible(rng, d)).collect();
    let mut rho = BTreeMap::new();
    for x in 0..base.len() {
        for y in base.up_set(x) {
            if x == y {
                continue;
            }
            let (sx, sy) = (sub_of(x), sub_of(y));
            let (qx, qy) = (quo_of(x), quo_of(y));
            let a = coords_matrix(&sy, sx.reps());
            let b = coords_matrix(&qy, qx.reps());
            let m = Matrix::block_diag(&[&a, &b]);
            rho.insert((x, y), changes[y].0.mul(&m).mul(&changes[x].1));
        }
    }
    PosetSheaf::from_all(base, stalks, rho).expect("inclusions and projections compose")
}

/// Blow-down `X̃ -> X` with `|X̃| ≤ max_points`: over each `y ∈ S` a least
/// point `m_y` below everything over `↑y`, plus extra exceptional points.
pub fn random_blow_down<R: Rng>(rng: &mut R, max_points: usize) -> BlowDown {
    let nx = rng.gen_range(1..=(max_points.max(2) - 1).min(5));
    let x = random_poset(rng, nx, 0.5);
    let picks: Vec<usize> = (0..nx).filter(|_| rng.gen_bool(0.4)).collect();
    let picks = if picks.is_empty() { vec![rng.gen_range(0..nx)] } else { picks };
    let s = x.closure(&picks);
    let mut budget = max_points.saturating_sub(nx);
    // points of X̃: (image, kind) with kind 0 = off S or least point, 1 = extra
    let mut pts: Vec<(usize, bool)> = Vec::new();
    for y in 0..nx {
        pts.push((y, false));
        if s.contains(&y) {
            let extra = rng.gen_range(0..=budget.min(2));
            budget -= extra;
            for _ in 0..extra {
                pts.push((y, true));
            }
        }
    }
    let pi: Vec<usize> = pts.iter().map(|p| p.0).collect();
    let mut rel = Vec::new();
    for (a, &(ya, extra_a)) in pts.iter().enumerate() {
        for (b, &(yb, extra_b)) in pts.iter().enumerate() {
            if a == b {
                continue;
            }
            let least = s.contains(&ya) && !extra_a;
            let off = !s.contains(&ya);
            if (least || off) && x.leq(ya, yb) && !(off && s.contains(&yb)) {
                rel.push((a, b));
            } else if extra_a && ((x.lt(ya, yb)) || (ya == yb && extra_b && b > a)) && rng.gen_bool(0.5) {
                rel.push((a, b));
            }
        }
    }
    let xt = FinitePoset::new(pts.len(), &rel).expect("relations follow the order of X");
    BlowDown::new(x, xt, pi, s).expect("isomorphism over X − S by construction")
}

/// `X = {s < g}`, `X̃ = {e < e', e < g'}`, `S = {s}`.
pub fn blow_down_example() -> BlowDown {
    let x = FinitePoset::chain(2);
    let xt = FinitePoset::new(3, &[(0, 1), (0, 2)]).expect("poset");
    BlowDown::new(x, xt, vec![0, 0, 1], vec![0]).expect("blow-down")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finspace::mayer_vietoris_check;
    use crate::hodge::validate_hodge_complex;
    use crate::json::InputError;

    #[test]
    fn generated_complexes_validate() {
        let mut r = rng(0);
        let size = HodgeSize { max_dim: 16, ..HodgeSize::default() };
        for _ in 0..20 {
            let (a, how) = random_hodge_complex(&mut r, &size);
            assert!(size.admits(&a));
            assert!(validate_hodge_complex(&a).is_ok(), "{how:?}");
        }
    }

    #[test]
    fn seeds_determine_instances() {
        let size = HodgeSize::default();
        let a = HodgeComplexJson::from_trifiltered(&random_hodge_complex(&mut rng(7), &size).0);
        let b = HodgeComplexJson::from_trifiltered(&random_hodge_complex(&mut rng(7), &size).0);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn invalid_instances_fail_where_expected() {
        let mut r = rng(1);
        for k in 0..15 {
            let inst = invalid_instance(&mut r, DEFECTS[k % DEFECTS.len()]);
            match inst.data.to_trifiltered() {
                Err(InputError::Check(c)) => {
                    assert_eq!(inst.expected.axiom, None);
                    assert_eq!(c.degree, inst.expected.degree);
                }
                Err(e) => panic!("{e}"),
                Ok(t) => {
                    let fail = validate_hodge_complex(&t).expect_err("defect detected");
                    assert_eq!(Some(format!("{:?}", fail.axiom)), inst.expected.axiom, "{:?}", inst.defect);
                    assert_eq!(fail.degree, inst.expected.degree, "{:?}", inst.defect);
                    assert_eq!(Some(fail.weight_index), inst.expected.weight_index);
                    assert!(!fail.witness.is_empty());
                }
            }
        }
    }

    #[test]
    fn control_fails_hc3() {
        let fail = validate_hodge_complex(&nondegenerate_control()).unwrap_err();
        assert_eq!((fail.axiom, fail.degree, fail.weight_index), (Axiom::HC3, 1, 2));
    }

    #[test]
    fn sheaves_are_constant_constructible() {
        let mut r = rng(2);
        for _ in 0..20 {
            let s = random_stratified_poset(&mut r, 8, 4);
            assert!(s.len() <= 4);
            let f = random_cc_sheaf(&mut r, &s, 3);
            assert!(f.is_constant_constructible(&s));
        }
    }

    #[test]
    fn blow_downs_satisfy_mayer_vietoris() {
        let mut r = rng(3);
        for _ in 0..10 {
            let b = random_blow_down(&mut r, 8);
            assert!(b.xt.len() <= 8);
            let f = random_cc_sheaf(&mut r, &Stratification::by_points(&b.x), 2);
            assert!(mayer_vietoris_check(&b, &f).unwrap().holds());
        }
        let b = blow_down_example();
        assert!(mayer_vietoris_check(&b, &PosetSheaf::constant(&b.x, 1)).unwrap().holds());
    }
}
