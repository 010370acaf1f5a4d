//! Strict augmented simplicial posets, hypercovers, simplicial resolutions,
//! cohomological descent and the assembly of Hodge complexes from
//! cosimplicial rows.
//!
//! Face maps are `δ_i: X_n -> X_{n-1}` for `0 ≤ i ≤ n`, augmentations
//! `ε_n: X_n -> X`. Level `-1` is `X` itself, with `δ_0 = ε_0` on `X_0`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::filtcx::{cone, total_with_layout, Chain, Complex, Filtration, Morphism, TriFilteredComplex};
use crate::finspace::{preimage, BarComplex, Cochains, FinitePoset, PosetSheaf, SheafMap, Stratification};
use crate::hodge::{hs_morphism, theorem1, validate_hodge_complex, CHodgeComplex, CHodgeStructure, HsMorphism, Theorem1};
use crate::qlinalg::{Field, Matrix, Sparse, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedSimplicialSpace {
    base: FinitePoset,
    levels: Vec<FinitePoset>,
    /// `faces[n][i]` for `n ≥ 1`; `faces[0]` is empty.
    faces: Vec<Vec<Vec<usize>>>,
    aug: Vec<Vec<usize>>,
}

impl AugmentedSimplicialSpace {
    pub fn new(base: FinitePoset, levels: Vec<FinitePoset>, faces: Vec<Vec<Vec<usize>>>, aug: Vec<Vec<usize>>) -> Result<Self> {
        let s = AugmentedSimplicialSpace { base, levels, faces, aug };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let levels = self.levels.len();
        if levels == 0 {
            return Err(Error::Precondition("a simplicial space needs level 0".into()));
        }
        if self.faces.len() != levels || self.aug.len() != levels {
            return Err(Error::Dimension("faces and augmentations must be given for every level".into()));
        }
        for n in 0..levels {
            let x = &self.levels[n];
            x.check_monotone(&self.aug[n], &self.base)?;
            let expected = if n == 0 { 0 } else { n + 1 };
            if self.faces[n].len() != expected {
                return Err(Error::Dimension(format!("level {n} needs {expected} face maps")));
            }
            for (i, face) in self.faces[n].iter().enumerate() {
                x.check_monotone(face, &self.levels[n - 1])?;
                if (0..x.len()).any(|a| self.aug[n - 1][face[a]] != self.aug[n][a]) {
                    return Err(Error::Precondition(format!("ε_{} δ_{i} ≠ ε_{n}", n - 1)));
                }
            }
            if n >= 2 {
                for j in 1..=n {
                    for i in 0..j {
                        let ok = (0..x.len()).all(|a| {
                            self.faces[n - 1][i][self.faces[n][j][a]] == self.faces[n - 1][j - 1][self.faces[n][i][a]]
                        });
                        if !ok {
                            return Err(Error::Precondition(format!(
                                "simplicial identity δ_{i}δ_{j} = δ_{}δ_{i} fails on level {n}",
                                j - 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `X_n = X` for all `n ≤ top`, every map the identity.
    pub fn constant(x: &FinitePoset, top: usize) -> Self {
        let id: Vec<usize> = (0..x.len()).collect();
        let faces = (0..=top).map(|n| if n == 0 { Vec::new() } else { vec![id.clone(); n + 1] }).collect();
        AugmentedSimplicialSpace { base: x.clone(), levels: vec![x.clone(); top + 1], faces, aug: vec![id; top + 1] }
    }

    /// Čech object of `ε: X_0 -> X`: `X_n` is the `(n+1)`-fold fiber product.
    pub fn cech(base: &FinitePoset, x0: &FinitePoset, eps: &[usize], top: usize) -> Result<Self> {
        x0.check_monotone(eps, base)?;
        let mut levels = vec![x0.clone()];
        let mut tuples: Vec<Vec<Vec<usize>>> = vec![(0..x0.len()).map(|a| vec![a]).collect()];
        let mut faces = vec![Vec::new()];
        let mut aug = vec![eps.to_vec()];
        for n in 1..=top {
            let mut next = Vec::new();
            for t in &tuples[n - 1] {
                for a in 0..x0.len() {
                    if eps[a] == eps[t[0]] {
                        let mut t2 = t.clone();
                        t2.push(a);
                        next.push(t2);
                    }
                }
            }
            let poset = product_order(&next, &|_, a, b| x0.leq(a, b));
            let index: HashMap<&Vec<usize>, usize> = tuples[n - 1].iter().enumerate().map(|(i, t)| (t, i)).collect();
            let fs = (0..=n)
                .map(|i| {
                    next.iter()
                        .map(|t| {
                            let mut s = t.clone();
                            s.remove(i);
                            index[&s]
                        })
                        .collect()
                })
                .collect();
            aug.push(next.iter().map(|t| eps[t[0]]).collect());
            faces.push(fs);
            levels.push(poset);
            tuples.push(next);
        }
        Self::new(base.clone(), levels, faces, aug)
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }
    pub fn base(&self) -> &FinitePoset {
        &self.base
    }
    pub fn level(&self, n: usize) -> &FinitePoset {
        &self.levels[n]
    }
    pub fn face(&self, n: usize, i: usize) -> &[usize] {
        &self.faces[n][i]
    }
    pub fn augmentation(&self, n: usize) -> &[usize] {
        &self.aug[n]
    }
    /// `δ_i: X_n -> X_{n-1}` with `X_{-1} = X` and `δ_0 = ε_0` on level 0.
    fn coface_source(&self, n: usize, i: usize) -> &[usize] {
        if n == 0 {
            &self.aug[0]
        } else {
            &self.faces[n][i]
        }
    }

    /// The simplicial space truncated at `top`.
    pub fn truncate(&self, top: usize) -> Self {
        let k = top.min(self.top()) + 1;
        AugmentedSimplicialSpace {
            base: self.base.clone(),
            levels: self.levels[..k].to_vec(),
            faces: self.faces[..k].to_vec(),
            aug: self.aug[..k].to_vec(),
        }
    }
}

/// Poset on tuples with the componentwise order of each coordinate.
fn product_order(tuples: &[Vec<usize>], leq: &dyn Fn(usize, usize, usize) -> bool) -> FinitePoset {
    let n = tuples.len();
    let rel = (0..n)
        .map(|a| (0..n).map(|b| tuples[a].iter().zip(&tuples[b]).enumerate().all(|(k, (&x, &y))| leq(k, x, y))).collect())
        .collect();
    let labels = tuples
        .iter()
        .map(|t| format!("({})", t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    FinitePoset::from_leq_unchecked(rel, labels)
}

/// `Z_{n-1}` with its points as tuples `(x_0, …, x_n)` of points of `X_{n-1}`.
#[derive(Clone, Debug)]
pub struct CycleObject {
    pub poset: FinitePoset,
    pub tuples: Vec<Vec<usize>>,
    pub augmentation: Vec<usize>,
    index: HashMap<Vec<usize>, usize>,
}

impl CycleObject {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
    pub fn position(&self, t: &[usize]) -> Option<usize> {
        self.index.get(t).copied()
    }
    /// `pr_i: Z_{n-1} -> X_{n-1}`.
    pub fn projection(&self, i: usize) -> Vec<usize> {
        self.tuples.iter().map(|t| t[i]).collect()
    }
}

/// `Z_{n-1}(X_• -> X)` for `n ≥ 1`: tuples with `δ_j x_i = δ_i x_{j+1}` for
/// `i ≤ j` and a common image in `X`, ordered componentwise. Only levels
/// below `n` are used.
pub fn cycles(x: &AugmentedSimplicialSpace, n: usize) -> Result<CycleObject> {
    if n == 0 || n > x.levels.len() {
        return Err(Error::Precondition(format!("cycles need 1 ≤ n ≤ {}", x.levels.len())));
    }
    let prev = &x.levels[n - 1];
    let eps = &x.aug[n - 1];
    // candidates for x_k given x_0: same ε, and δ_0 x_k = δ_{k-1} x_0 when faces exist
    let mut by_key: HashMap<usize, Vec<usize>> = HashMap::new();
    for a in 0..prev.len() {
        let key = if n >= 2 { x.faces[n - 1][0][a] } else { eps[a] };
        by_key.entry(key).or_default().push(a);
    }
    let mut tuples = Vec::new();
    let mut cur = Vec::with_capacity(n + 1);
    for a in 0..prev.len() {
        cur.push(a);
        extend_cycle(x, n, &by_key, &mut cur, &mut tuples);
        cur.pop();
    }
    let poset = product_order(&tuples, &|_, a, b| prev.leq(a, b));
    let augmentation = tuples.iter().map(|t| eps[t[0]]).collect();
    let index = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(CycleObject { poset, tuples, augmentation, index })
}

fn extend_cycle(
    x: &AugmentedSimplicialSpace,
    n: usize,
    by_key: &HashMap<usize, Vec<usize>>,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let k = cur.len();
    if k == n + 1 {
        out.push(cur.clone());
        return;
    }
    let key = if n >= 2 { x.faces[n - 1][k - 1][cur[0]] } else { x.aug[n - 1][cur[0]] };
    let Some(cands) = by_key.get(&key) else { return };
    for &b in cands {
        // δ_{k-1} x_i = δ_i x_k for 0 < i < k
        if n >= 2 && (1..k).any(|i| x.faces[n - 1][k - 1][cur[i]] != x.faces[n - 1][i][b]) {
            continue;
        }
        cur.push(b);
        extend_cycle(x, n, by_key, cur, out);
        cur.pop();
    }
}

/// `(δ_0 a, …, δ_n a)` for `a ∈ X_n`.
fn boundary_tuple(x: &AugmentedSimplicialSpace, n: usize, a: usize) -> Vec<usize> {
    (0..=n).map(|i| x.faces[n][i][a]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypercoverReport {
    pub holds: bool,
    /// First level whose map to the cycle object (or to `X` for level 0) is not surjective.
    pub failing_level: Option<usize>,
    /// A point of the target that is not hit.
    pub missed: Option<Vec<usize>>,
}

/// Surjectivity of `X_0 -> X` and of `X_n -> Z_{n-1}` for `1 ≤ n ≤ N`;
/// properness is automatic for finite posets.
pub fn hypercover_check(x: &AugmentedSimplicialSpace) -> HypercoverReport {
    if let Some(p) = (0..x.base.len()).find(|p| !x.aug[0].contains(p)) {
        return HypercoverReport { holds: false, failing_level: Some(0), missed: Some(vec![p]) };
    }
    for n in 1..=x.top() {
        let z = cycles(x, n).expect("levels below n exist");
        let mut hit = vec![false; z.len()];
        for a in 0..x.levels[n].len() {
            if let Some(i) = z.position(&boundary_tuple(x, n, a)) {
                hit[i] = true;
            }
        }
        if let Some(i) = hit.iter().position(|h| !h) {
            return HypercoverReport { holds: false, failing_level: Some(n), missed: Some(z.tuples[i].clone()) };
        }
    }
    HypercoverReport { holds: true, failing_level: None, missed: None }
}

/// A resolver sends a finite poset `P` to a surjection `R(P) -> P`.
pub trait Resolver {
    fn name(&self) -> &'static str;
    fn resolve(&self, p: &FinitePoset) -> (FinitePoset, Vec<usize>);
}

/// `⊔_{m maximal} ↓m`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DownSets;

/// `⊔_{m maximal} ↓m ⊔ {p}` for a connected poset with first minimal point
/// `p`, and `⊔ ↓m` otherwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct DownSetsAndPoint;

fn cone_union(p: &FinitePoset, tops: &[usize]) -> (FinitePoset, Vec<usize>) {
    let mut pts = Vec::new();
    let mut comp = Vec::new();
    for (k, &m) in tops.iter().enumerate() {
        for y in p.down_set(m) {
            pts.push(y);
            comp.push(k);
        }
    }
    let n = pts.len();
    let leq = (0..n).map(|a| (0..n).map(|b| comp[a] == comp[b] && p.leq(pts[a], pts[b])).collect()).collect();
    let labels = (0..n).map(|a| format!("{}@{}", p.labels()[pts[a]], comp[a])).collect();
    (FinitePoset::from_leq_unchecked(leq, labels), pts)
}

impl Resolver for DownSets {
    fn name(&self) -> &'static str {
        "down-sets"
    }
    fn resolve(&self, p: &FinitePoset) -> (FinitePoset, Vec<usize>) {
        cone_union(p, &p.maximal())
    }
}

impl Resolver for DownSetsAndPoint {
    fn name(&self) -> &'static str {
        "down-sets-and-point"
    }
    fn resolve(&self, p: &FinitePoset) -> (FinitePoset, Vec<usize>) {
        let mut tops = p.maximal();
        if !p.is_empty() && p.components().len() == 1 {
            tops.push(p.minimal()[0]);
        }
        cone_union(p, &tops)
    }
}

fn resolve_checked(r: &dyn Resolver, p: &FinitePoset) -> Result<(FinitePoset, Vec<usize>)> {
    let (q, map) = r.resolve(p);
    q.check_monotone(&map, p)?;
    if (0..p.len()).any(|y| !map.contains(&y)) {
        return Err(Error::Precondition(format!("resolver {} is not surjective", r.name())));
    }
    Ok((q, map))
}

/// `X_0 = R(X)`, `X_n = R(Z_{n-1})`, faces from the cycle projections.
pub fn simplicial_resolution(x: &FinitePoset, r: &dyn Resolver, top: usize) -> Result<AugmentedSimplicialSpace> {
    let (x0, e0) = resolve_checked(r, x)?;
    let mut s = AugmentedSimplicialSpace { base: x.clone(), levels: vec![x0], faces: vec![Vec::new()], aug: vec![e0] };
    for n in 1..=top {
        let z = cycles(&s, n)?;
        let (xn, p) = resolve_checked(r, &z.poset)?;
        let faces = (0..=n).map(|i| p.iter().map(|&a| z.tuples[a][i]).collect()).collect();
        s.aug.push(p.iter().map(|&a| z.augmentation[a]).collect());
        s.faces.push(faces);
        s.levels.push(xn);
    }
    s.validate()?;
    Ok(s)
}

/// Levelwise maps `D_n -> Y_n` commuting with faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    pub levels: Vec<Vec<usize>>,
}

impl SimplicialMap {
    /// Commutes with faces, and with the augmentations through `base_map: X -> Y`.
    pub fn is_valid(&self, src: &AugmentedSimplicialSpace, dst: &AugmentedSimplicialSpace, base_map: &[usize]) -> bool {
        if self.levels.len() != src.levels.len() || dst.levels.len() < src.levels.len() {
            return false;
        }
        for n in 0..self.levels.len() {
            let m = &self.levels[n];
            if !src.levels[n].is_monotone(m, &dst.levels[n]) {
                return false;
            }
            if (0..m.len()).any(|a| dst.aug[n][m[a]] != base_map[src.aug[n][a]]) {
                return false;
            }
            for i in 0..src.faces[n].len() {
                if (0..m.len()).any(|a| dst.faces[n][i][m[a]] != self.levels[n - 1][src.faces[n][i][a]]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn compose(&self, after: &SimplicialMap) -> SimplicialMap {
        SimplicialMap { levels: self.levels.iter().zip(&after.levels).map(|(a, b)| a.iter().map(|&i| b[i]).collect()).collect() }
    }
}

/// Resolution of `X` over a hypercover `Y_• -> Y` along `g: X -> Y`:
/// `D_0 = R(X ×_Y Y_0)` and `D_n = R(Z_{n-1}(D) ×_{Z_{n-1}(Y)} Y_n)`.
pub fn simplicial_resolution_over(
    x: &FinitePoset,
    r: &dyn Resolver,
    top: usize,
    y: &AugmentedSimplicialSpace,
    g: &[usize],
) -> Result<(AugmentedSimplicialSpace, SimplicialMap)> {
    x.check_monotone(g, &y.base)?;
    if y.top() < top {
        return Err(Error::Precondition("the target hypercover is truncated below the requested level".into()));
    }
    // X ×_Y Y_0
    let pairs: Vec<Vec<usize>> = (0..x.len())
        .flat_map(|a| (0..y.levels[0].len()).filter(move |&b| y.aug[0][b] == g[a]).map(move |b| vec![a, b]))
        .collect();
    let fp = product_order(&pairs, &|k, a, b| if k == 0 { x.leq(a, b) } else { y.levels[0].leq(a, b) });
    let (d0, p0) = resolve_checked(r, &fp)?;
    let mut s = AugmentedSimplicialSpace {
        base: x.clone(),
        levels: vec![d0],
        faces: vec![Vec::new()],
        aug: vec![p0.iter().map(|&i| pairs[i][0]).collect()],
    };
    let mut to_y = vec![p0.iter().map(|&i| pairs[i][1]).collect::<Vec<usize>>()];
    for n in 1..=top {
        let z = cycles(&s, n)?;
        let mut over: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for b in 0..y.levels[n].len() {
            over.entry(boundary_tuple(y, n, b)).or_default().push(b);
        }
        let mut pts: Vec<Vec<usize>> = Vec::new();
        for (zi, t) in z.tuples.iter().enumerate() {
            let image: Vec<usize> = t.iter().map(|&a| to_y[n - 1][a]).collect();
            for &b in over.get(&image).map_or(&[][..], |v| v.as_slice()) {
                pts.push(vec![zi, b]);
            }
        }
        let fp = product_order(&pts, &|k, a, b| if k == 0 { z.poset.leq(a, b) } else { y.levels[n].leq(a, b) });
        let (dn, p) = resolve_checked(r, &fp)?;
        let faces = (0..=n).map(|i| p.iter().map(|&a| z.tuples[pts[a][0]][i]).collect()).collect();
        s.aug.push(p.iter().map(|&a| z.augmentation[pts[a][0]]).collect());
        s.faces.push(faces);
        s.levels.push(dn);
        to_y.push(p.iter().map(|&a| pts[a][1]).collect());
    }
    s.validate()?;
    let map = SimplicialMap { levels: to_y };
    debug_assert!(map.is_valid(&s, y, g));
    Ok((s, map))
}

/// Levelwise fiber product `A_n ×_X B_n` with its two projections.
pub fn fiber_product(a: &AugmentedSimplicialSpace, b: &AugmentedSimplicialSpace) -> Result<(AugmentedSimplicialSpace, SimplicialMap, SimplicialMap)> {
    if a.base != b.base {
        return Err(Error::Precondition("fiber product over different bases".into()));
    }
    let top = a.top().min(b.top());
    let mut levels = Vec::new();
    let mut faces = Vec::new();
    let mut aug = Vec::new();
    let mut pa = Vec::new();
    let mut pb = Vec::new();
    let mut indices: Vec<HashMap<(usize, usize), usize>> = Vec::new();
    for n in 0..=top {
        let pairs: Vec<Vec<usize>> = (0..a.levels[n].len())
            .flat_map(|i| (0..b.levels[n].len()).filter(move |&j| a.aug[n][i] == b.aug[n][j]).map(move |j| vec![i, j]))
            .collect();
        let poset = product_order(&pairs, &|k, u, v| if k == 0 { a.levels[n].leq(u, v) } else { b.levels[n].leq(u, v) });
        let fs: Vec<Vec<usize>> = if n == 0 {
            Vec::new()
        } else {
            (0..=n)
                .map(|i| pairs.iter().map(|p| indices[n - 1][&(a.faces[n][i][p[0]], b.faces[n][i][p[1]])]).collect())
                .collect()
        };
        aug.push(pairs.iter().map(|p| a.aug[n][p[0]]).collect());
        pa.push(pairs.iter().map(|p| p[0]).collect());
        pb.push(pairs.iter().map(|p| p[1]).collect());
        indices.push(pairs.iter().enumerate().map(|(k, p)| ((p[0], p[1]), k)).collect());
        faces.push(fs);
        levels.push(poset);
    }
    let s = AugmentedSimplicialSpace::new(a.base.clone(), levels, faces, aug)?;
    Ok((s, SimplicialMap { levels: pa }, SimplicialMap { levels: pb }))
}

/// A resolution dominating both inputs: the relative resolution over their
/// levelwise fiber product, with maps to each.
pub fn dominate(
    a: &AugmentedSimplicialSpace,
    b: &AugmentedSimplicialSpace,
    r: &dyn Resolver,
) -> Result<(AugmentedSimplicialSpace, SimplicialMap, SimplicialMap)> {
    let (y, pa, pb) = fiber_product(a, b)?;
    let id: Vec<usize> = (0..a.base.len()).collect();
    let (d, to_y) = simplicial_resolution_over(&a.base, r, y.top(), &y, &id)?;
    Ok((d, to_y.compose(&pa), to_y.compose(&pb)))
}

/// One level restricted over an open set of `X`.
struct LocalLevel {
    points: Vec<usize>,
    local: HashMap<usize, usize>,
    sheaf: PosetSheaf,
    cochains: Cochains,
}

fn local_level(poset: &FinitePoset, aug: &[usize], f: &PosetSheaf, base_points: &[usize], top_degree: usize) -> Result<LocalLevel> {
    let points = preimage(aug, base_points);
    let sub = poset.subposet(&points);
    let base_local: HashMap<usize, usize> = base_points.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let restricted = f.restrict(base_points)?;
    let map: Vec<usize> = points.iter().map(|&a| base_local[&aug[a]]).collect();
    let sheaf = restricted.pullback(&sub, &map)?;
    let cochains = Cochains::new(&sheaf, Some(top_degree));
    let local = points.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    Ok(LocalLevel { points, local, sheaf, cochains })
}

/// Dimensions of `H^m` of the augmented total complex
/// `C(X) -> C(X_0) -> C(X_1) -> …` over the open set `u`, for `m ≤ k + 1`.
/// These vanish exactly when `C(X, F) -> Tot` is a quasi-isomorphism in
/// degrees `≤ k`.
fn augmented_cone_cohomology(x: &AugmentedSimplicialSpace, f: &PosetSheaf, u: &[usize], k: usize) -> Result<Vec<usize>> {
    let max_m = k + 2;
    let cols = (max_m + 1).min(x.levels.len() + 1);
    let id: Vec<usize> = (0..x.base.len()).collect();
    let mut levels = Vec::with_capacity(cols);
    for c in 0..cols {
        let top = max_m - c;
        if c == 0 {
            levels.push(local_level(&x.base, &id, f, u, top)?);
        } else {
            levels.push(local_level(&x.levels[c - 1], &x.aug[c - 1], f, u, top)?);
        }
    }
    let mut offsets: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut dims = Vec::new();
    for m in 0..=max_m {
        let mut off = 0;
        for (c, lv) in levels.iter().enumerate().take(m.min(cols - 1) + 1) {
            offsets.insert((c, m - c), off);
            off += lv.cochains.dim(m - c);
        }
        dims.push(off);
    }
    let mut ranks = Vec::new();
    for m in 0..=k + 1 {
        let mut d = Sparse::new(dims[m + 1], dims[m]);
        for c in 0..cols.min(m + 1) {
            let q = m - c;
            let lv = &levels[c];
            let c0 = offsets[&(c, q)];
            for (r, col, v) in lv.cochains.differential(&lv.sheaf, q).entries() {
                d.push(offsets[&(c, q + 1)] + r, c0 + col, v.clone());
            }
            if c + 1 < cols {
                let next = &levels[c + 1];
                let n = c; // the map goes from level c - 1 to level c
                for i in 0..=n {
                    let face = x.coface_source(n, i);
                    let map: Vec<usize> = next.points.iter().map(|&a| lv.local[&face[a]]).collect();
                    let pull = Cochains::pullback(&lv.cochains, &next.cochains, &lv.sheaf, &map, q);
                    let sign = if (i + q) % 2 == 0 { Q::from_int(1) } else { Q::from_int(-1) };
                    for (r, col, v) in pull.entries() {
                        d.push(offsets[&(c + 1, q)] + r, c0 + col, v.times(&sign));
                    }
                }
            }
        }
        ranks.push(d.rank());
    }
    Ok((0..=k + 1).map(|m| dims[m] - ranks[m] - if m == 0 { 0 } else { ranks[m - 1] }).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentReport {
    pub holds: bool,
    pub degree_bound: usize,
    /// `(open set label, degree)` where `H^degree` of the cone is nonzero;
    /// the label is a point `x` for `↑x`, or `None` for all of `X`.
    pub failures: Vec<(Option<usize>, i32)>,
}

/// `F -> Tot(ε_{n*} C(X_n, ε_n^* F))` is a quasi-isomorphism in degrees
/// `≤ degree_bound`, checked on every basic open `↑x` and on `X`.
pub fn descent_check(x: &AugmentedSimplicialSpace, f: &PosetSheaf, degree_bound: usize) -> Result<DescentReport> {
    if f.base() != &x.base {
        return Err(Error::Sheaf("sheaf does not live on the base".into()));
    }
    if x.top() < degree_bound + 1 {
        return Err(Error::Precondition(format!(
            "descent through degree {degree_bound} needs levels up to {}, the object stops at {}",
            degree_bound + 1,
            x.top()
        )));
    }
    let mut opens: Vec<(Option<usize>, Vec<usize>)> = (0..x.base.len()).map(|p| (Some(p), x.base.up_set(p))).collect();
    opens.push((None, (0..x.base.len()).collect()));
    let mut failures = Vec::new();
    for (label, u) in opens {
        let h = augmented_cone_cohomology(x, f, &u, degree_bound)?;
        for (m, &d) in h.iter().enumerate() {
            if d != 0 {
                failures.push((label, m as i32 - 1));
            }
        }
    }
    Ok(DescentReport { holds: failures.is_empty(), degree_bound, failures })
}

/// `m ⊗ id_v` with the basis `e_c ⊗ v_a` ordered by `c` first.
pub fn tensor_identity(m: &Matrix<Q>, v: usize) -> Matrix<Q> {
    let mut out = Matrix::zeros(m.rows() * v, m.cols() * v);
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let x = m.get(r, c);
            if !x.is_zero() {
                for a in 0..v {
                    out.set(r * v + a, c * v + a, x.clone());
                }
            }
        }
    }
    out
}

fn sparse_tensor(m: &Sparse<Q>, v: usize) -> Matrix<Q> {
    let mut out: Matrix<Q> = Matrix::zeros(m.rows() * v, m.cols() * v);
    for (r, c, x) in m.entries() {
        for a in 0..v {
            let cur = out.get(r * v + a, c * v + a).plus(x);
            out.set(r * v + a, c * v + a, cur);
        }
    }
    out
}

/// Coefficients for the synthetic Hodge provider: a pure structure `V` of
/// weight `w`; `C^q(P, G) ⊗ V` gets `F`, `F̄` from `V` and the bête weight
/// filtration `W^p = all` iff `p ≤ q − w`.
#[derive(Clone, Debug)]
pub struct PureCoefficients {
    pub v: CHodgeStructure<Q>,
    pub weight: i32,
}

impl PureCoefficients {
    pub fn new(v: CHodgeStructure<Q>, weight: i32) -> Result<Self> {
        if !crate::hodge::is_pure(&v, weight) {
            return Err(Error::Precondition(format!("coefficients are not pure of weight {weight}")));
        }
        Ok(PureCoefficients { v, weight })
    }

    /// `H^{p, w-p}` of dimension `counts` in the standard basis.
    pub fn standard(weight: i32, hodge: &[(i32, usize)]) -> Result<Self> {
        let dim = hodge.iter().map(|h| h.1).sum();
        let v = CHodgeStructure::pure_from_basis(weight, &Matrix::identity(dim), hodge)?;
        Self::new(v, weight)
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    fn copies(&self, c: &Chain<Q>, n: usize) -> Chain<Q> {
        Chain::direct_sum_all(&vec![c.clone(); n])
    }

    /// The trifiltered complex `K ⊗ V` for a complex `K` starting in degree 0.
    pub fn tensor(&self, k: &Complex) -> Result<CHodgeComplex> {
        let v = self.dim();
        let dims: Vec<usize> = k.dims().iter().map(|d| d * v).collect();
        let diffs = (0..k.dims().len().saturating_sub(1)).map(|q| tensor_identity(&k.d(q as i32), v)).collect();
        let complex = Complex::new(0, dims, diffs)?;
        let f = Filtration::new(0, k.dims().iter().map(|&d| self.copies(&self.v.f, d)).collect());
        let fbar = Filtration::new(0, k.dims().iter().map(|&d| self.copies(&self.v.fbar, d)).collect());
        let w = Filtration::new(
            0,
            k.dims().iter().enumerate().map(|(q, &d)| Chain::trivial(d * v, q as i32 - self.weight)).collect(),
        );
        let t = TriFilteredComplex::new(complex, f, fbar, w)?;
        validate_hodge_complex(&t).map_err(|e| Error::Precondition(format!("coefficient complex: {}", e.detail)))
    }
}

/// Columns `A^{0,•} … A^{N,•}` with cofaces `δ_i: A^n -> A^{n+1}`.
#[derive(Clone, Debug)]
pub struct CosimplicialHodgeRow {
    columns: Vec<CHodgeComplex>,
    cofaces: Vec<Vec<Morphism>>,
}

impl CosimplicialHodgeRow {
    /// Checks `δ_j δ_i = δ_i δ_{j-1}` for `i < j` and `δ² = 0`.
    pub fn new(columns: Vec<CHodgeComplex>, cofaces: Vec<Vec<Morphism>>) -> Result<Self> {
        if columns.is_empty() || cofaces.len() + 1 != columns.len() {
            return Err(Error::Dimension("a row with N + 1 columns needs N levels of cofaces".into()));
        }
        for (n, fs) in cofaces.iter().enumerate() {
            if fs.len() != n + 2 {
                return Err(Error::Dimension(format!("level {n} needs {} cofaces", n + 2)));
            }
        }
        let row = CosimplicialHodgeRow { columns, cofaces };
        for n in 0..row.cofaces.len().saturating_sub(1) {
            for j in 1..=n + 2 {
                for i in 0..j {
                    for q in row.degrees(n) {
                        let lhs = row.cofaces[n + 1][j].map(q).mul(&row.cofaces[n][i].map(q));
                        let rhs = row.cofaces[n + 1][i].map(q).mul(&row.cofaces[n][j - 1].map(q));
                        if lhs != rhs {
                            return Err(Error::Precondition(format!("cosimplicial identity fails at level {n}, (i, j) = ({i}, {j})")));
                        }
                    }
                }
            }
        }
        let deltas = row.alternating();
        for n in 1..deltas.len() {
            for q in row.degrees(n) {
                if !deltas[n].map(q).mul(&deltas[n - 1].map(q)).is_zero() {
                    return Err(Error::NotAComplex(n as i32));
                }
            }
        }
        Ok(row)
    }

    fn degrees(&self, n: usize) -> std::ops::RangeInclusive<i32> {
        self.cofaces[n][0].degrees()
    }

    pub fn top(&self) -> usize {
        self.columns.len() - 1
    }
    pub fn columns(&self) -> &[CHodgeComplex] {
        &self.columns
    }
    pub fn coface(&self, n: usize, i: usize) -> &Morphism {
        &self.cofaces[n][i]
    }

    /// `δ = Σ (-1)^i δ_i` per level.
    pub fn alternating(&self) -> Vec<Morphism> {
        self.cofaces
            .iter()
            .map(|fs| {
                let src = fs[0].source.clone();
                let dst = fs[0].target.clone();
                let maps = fs[0]
                    .degrees()
                    .map(|q| {
                        let mut m = Matrix::zeros(dst.complex.dim(q), src.complex.dim(q));
                        for (i, f) in fs.iter().enumerate() {
                            let s = if i % 2 == 0 { Q::from_int(1) } else { Q::from_int(-1) };
                            m = m.add(&f.map(q).scale(&s));
                        }
                        (q, m)
                    })
                    .collect();
                Morphism::new(src, dst, maps).expect("alternating sum of filtered chain maps")
            })
            .collect()
    }
}

/// Levelwise morphisms between two rows commuting with every coface.
#[derive(Clone, Debug)]
pub struct RowMorphism {
    pub levels: Vec<Morphism>,
}

impl RowMorphism {
    pub fn check(&self, src: &CosimplicialHodgeRow, dst: &CosimplicialHodgeRow) -> Result<()> {
        if self.levels.len() != src.columns.len() || src.columns.len() != dst.columns.len() {
            return Err(Error::Dimension("row morphism needs one map per column".into()));
        }
        for n in 0..src.cofaces.len() {
            for i in 0..src.cofaces[n].len() {
                for q in src.degrees(n) {
                    let a = dst.cofaces[n][i].map(q).mul(&self.levels[n].map(q));
                    let b = self.levels[n + 1].map(q).mul(&src.cofaces[n][i].map(q));
                    if a != b {
                        return Err(Error::NotChainMap(q));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Output of the assembly: the total C-Hodge complex and Theorem 1 on it.
#[derive(Clone, Debug)]
pub struct DescentHodge {
    pub total: CHodgeComplex,
    pub theorem: Theorem1,
    layout: crate::filtcx::TotalLayout,
}

impl DescentHodge {
    pub fn structure(&self, degree: i32) -> CHodgeStructure<Q> {
        self.theorem.structure(degree).cloned().unwrap_or_else(CHodgeStructure::zero)
    }
}

pub fn assemble_descent_hodge(row: &CosimplicialHodgeRow) -> Result<DescentHodge> {
    let cols: Vec<TriFilteredComplex> = row.columns.iter().map(|c| c.data().clone()).collect();
    let deltas = row.alternating();
    let (t, layout) = total_with_layout(&cols, &deltas)?;
    let total = validate_hodge_complex(&t).map_err(|e| Error::Precondition(format!("total complex: {}", e.detail)))?;
    let theorem = theorem1(&total);
    Ok(DescentHodge { total, theorem, layout })
}

/// Map of totals induced by a row morphism.
pub fn total_map(m: &RowMorphism, src: &DescentHodge, dst: &DescentHodge) -> Result<Morphism> {
    let a = src.total.data();
    let b = dst.total.data();
    let lo = a.complex.min_degree().min(b.complex.min_degree());
    let hi = a.complex.max_degree().max(b.complex.max_degree());
    let mut maps = BTreeMap::new();
    for n in lo..=hi {
        let mut mat = Matrix::zeros(b.complex.dim(n), a.complex.dim(n));
        for (i, lv) in m.levels.iter().enumerate() {
            let (Some(so), Some(to)) = (src.layout.offset(n, i), dst.layout.offset(n, i)) else { continue };
            let block = lv.map(n - i as i32);
            if block.rows() > 0 && block.cols() > 0 {
                mat.set_block(to, so, &block);
            }
        }
        maps.insert(n, mat);
    }
    Morphism::new(a.clone(), b.clone(), maps)
}

/// Whether the map of totals induces isomorphisms of C-Hodge structures on
/// `H^k` for every `k < below`.
pub fn induces_isomorphisms(m: &Morphism, src: &DescentHodge, dst: &DescentHodge, below: i32) -> bool {
    (0..below).all(|k| {
        let h = m.on_cohomology(k);
        let (s, t) = (src.structure(k), dst.structure(k));
        h.rows() == h.cols()
            && h.rank() == h.rows()
            && hs_morphism(&h, &s, &t).map(|hm| hm.is_strict()).unwrap_or(false)
    })
}

/// The row `C^•(X_n, ε_n^* F) ⊗ V` with cofaces `δ_i^* ⊗ id`.
pub fn descent_row(x: &AugmentedSimplicialSpace, f: &PosetSheaf, v: &PureCoefficients) -> Result<CosimplicialHodgeRow> {
    let sheaves: Vec<PosetSheaf> = (0..=x.top()).map(|n| f.pullback(&x.levels[n], &x.aug[n])).collect::<Result<_>>()?;
    let top = sheaves.iter().map(|s| s.base().height()).max().unwrap_or(0);
    let cochains: Vec<Cochains> = sheaves.iter().map(|s| Cochains::new(s, Some(top))).collect();
    let columns: Vec<CHodgeComplex> =
        cochains.iter().zip(&sheaves).map(|(c, s)| v.tensor(&full_complex(c, s, top))).collect::<Result<_>>()?;
    let mut cofaces = Vec::new();
    for n in 0..x.top() {
        let mut level = Vec::new();
        for i in 0..=n + 1 {
            let face = &x.faces[n + 1][i];
            let maps = (0..=top)
                .map(|q| (q as i32, sparse_tensor(&Cochains::pullback(&cochains[n], &cochains[n + 1], &sheaves[n], face, q), v.dim())))
                .collect();
            level.push(Morphism::new(columns[n].data().clone(), columns[n + 1].data().clone(), maps)?);
        }
        cofaces.push(level);
    }
    CosimplicialHodgeRow::new(columns, cofaces)
}

fn full_complex(c: &Cochains, s: &PosetSheaf, top: usize) -> Complex {
    let dims: Vec<usize> = (0..=top).map(|q| c.dim(q)).collect();
    let diffs = (0..top).map(|q| c.differential(s, q).to_dense()).collect();
    Complex::new(0, dims, diffs).expect("cochain complex")
}

/// Row morphism `A(Y) -> A(D)` induced by pulling back along `φ: D_• -> Y_•`
/// (both over the same base).
pub fn pullback_row_morphism(
    y: &AugmentedSimplicialSpace,
    d: &AugmentedSimplicialSpace,
    phi: &SimplicialMap,
    f: &PosetSheaf,
    v: &PureCoefficients,
    ry: &CosimplicialHodgeRow,
    rd: &CosimplicialHodgeRow,
) -> Result<RowMorphism> {
    let id: Vec<usize> = (0..y.base.len()).collect();
    if !phi.is_valid(d, y, &id) {
        return Err(Error::Precondition("map of simplicial spaces does not commute with the structure".into()));
    }
    let mut levels = Vec::new();
    for n in 0..rd.columns.len() {
        let sy = f.pullback(&y.levels[n], &y.aug[n])?;
        let sd = f.pullback(&d.levels[n], &d.aug[n])?;
        let top_y = ry.columns[n].data().complex.max_degree().max(0) as usize;
        let top_d = rd.columns[n].data().complex.max_degree().max(0) as usize;
        let cy = Cochains::new(&sy, Some(top_y));
        let cd = Cochains::new(&sd, Some(top_d));
        let maps = (0..=top_y.max(top_d))
            .map(|q| (q as i32, sparse_tensor(&Cochains::pullback(&cy, &cd, &sy, &phi.levels[n], q), v.dim())))
            .collect();
        levels.push(Morphism::new(ry.columns[n].data().clone(), rd.columns[n].data().clone(), maps)?);
    }
    let m = RowMorphism { levels };
    m.check(ry, rd)?;
    Ok(m)
}

/// Outcome of comparing the outputs of several resolutions.
#[derive(Clone, Debug)]
pub struct IndependenceReport {
    pub holds: bool,
    /// Degrees compared (`k < N`).
    pub degrees: i32,
    pub dims: Vec<Vec<usize>>,
}

/// Assembles the rows of `a`, `b` and a dominating `d`, and checks that the
/// pullbacks `A(a) -> A(d) <- A(b)` induce isomorphisms of C-Hodge
/// structures in the degrees the truncation computes.
pub fn independence_check(
    a: &AugmentedSimplicialSpace,
    b: &AugmentedSimplicialSpace,
    f: &PosetSheaf,
    v: &PureCoefficients,
    r: &dyn Resolver,
) -> Result<IndependenceReport> {
    let top = a.top().min(b.top());
    let (a, b) = (a.truncate(top), b.truncate(top));
    let (d, to_a, to_b) = dominate(&a, &b, r)?;
    let rows = [descent_row(&a, f, v)?, descent_row(&b, f, v)?, descent_row(&d, f, v)?];
    let outs: Vec<DescentHodge> = rows.iter().map(assemble_descent_hodge).collect::<Result<_>>()?;
    let ma = pullback_row_morphism(&a, &d, &to_a, f, v, &rows[0], &rows[2])?;
    let mb = pullback_row_morphism(&b, &d, &to_b, f, v, &rows[1], &rows[2])?;
    let ta = total_map(&ma, &outs[0], &outs[2])?;
    let tb = total_map(&mb, &outs[1], &outs[2])?;
    let below = top as i32;
    let holds = outs.iter().all(|o| o.theorem.certified())
        && induces_isomorphisms(&ta, &outs[0], &outs[2], below)
        && induces_isomorphisms(&tb, &outs[1], &outs[2], below);
    let dims = outs.iter().map(|o| (0..below).map(|k| o.structure(k).dim()).collect()).collect();
    Ok(IndependenceReport { holds, degrees: below, dims })
}

/// The row `C^•(X, T^{n+1} F) ⊗ V` built from the bar construction, with
/// cofaces induced by `δ_i: T^{n+1} -> T^{n+2}`.
pub fn bar_row(strat: &Stratification, f: &PosetSheaf, v: &PureCoefficients, top: usize) -> Result<CosimplicialHodgeRow> {
    let bar = BarComplex::new(strat, f, top + 2)?;
    let sheaves: Vec<PosetSheaf> = (0..=top).map(|n| bar.level_sheaf(n + 1)).collect();
    let height = f.base().height();
    let cochains: Vec<Cochains> = sheaves.iter().map(|s| Cochains::new(s, Some(height))).collect();
    let columns: Vec<CHodgeComplex> =
        cochains.iter().zip(&sheaves).map(|(c, s)| v.tensor(&full_complex(c, s, height))).collect::<Result<_>>()?;
    let mut cofaces = Vec::new();
    for n in 0..top {
        let mut level = Vec::new();
        for i in 0..=n + 1 {
            let phi = bar.coface_map(n + 1, i);
            let maps = (0..=height)
                .map(|q| (q as i32, sparse_tensor(&cochains[n].map_sheaf(&cochains[n + 1], &phi, q), v.dim())))
                .collect();
            level.push(Morphism::new(columns[n].data().clone(), columns[n + 1].data().clone(), maps)?);
        }
        cofaces.push(level);
    }
    CosimplicialHodgeRow::new(columns, cofaces)
}

/// One-column row `C^•(X, F) ⊗ V`.
pub fn single_row(f: &PosetSheaf, v: &PureCoefficients) -> Result<CosimplicialHodgeRow> {
    let top = f.base().height();
    let c = Cochains::new(f, Some(top));
    CosimplicialHodgeRow::new(vec![v.tensor(&full_complex(&c, f, top))?], Vec::new())
}

/// Row morphism between one-column rows induced by a sheaf map.
pub fn single_row_morphism(phi: &SheafMap, src: &PosetSheaf, dst: &PosetSheaf, v: &PureCoefficients, rs: &CosimplicialHodgeRow, rd: &CosimplicialHodgeRow) -> Result<RowMorphism> {
    if !phi.is_natural(src, dst) {
        return Err(Error::Sheaf("map of sheaves is not natural".into()));
    }
    let top = src.base().height();
    let cs = Cochains::new(src, Some(top));
    let cd = Cochains::new(dst, Some(top));
    let maps = (0..=top).map(|q| (q as i32, sparse_tensor(&cs.map_sheaf(&cd, phi, q), v.dim()))).collect();
    let m = RowMorphism { levels: vec![Morphism::new(rs.columns[0].data().clone(), rd.columns[0].data().clone(), maps)?] };
    m.check(rs, rd)?;
    Ok(m)
}

/// The long exact sequence `… -> H^k(S_1) -> H^k(S_2) -> H^k(S_3) -> H^{k+1}(S_1) -> …`.
#[derive(Clone, Debug)]
pub struct LongExactSequence {
    /// `(row index 0..3, degree, structure)` in sequence order.
    pub terms: Vec<(usize, i32, CHodgeStructure<Q>)>,
    /// `maps[k]` goes from `terms[k]` to `terms[k + 1]`.
    pub maps: Vec<HsMorphism<Q>>,
    pub exact: bool,
    pub comparison_quasi_iso: bool,
}

impl LongExactSequence {
    pub fn holds(&self) -> bool {
        self.exact && self.comparison_quasi_iso && self.maps.iter().all(|m| m.is_strict())
    }
    pub fn connecting_ranks(&self) -> Vec<usize> {
        self.maps.iter().zip(&self.terms).filter(|(_, t)| t.0 == 2).map(|(m, _)| m.map.rank()).collect()
    }
}

/// Long exact sequence of a short exact sequence of rows `R_1 -> R_2 -> R_3`.
pub fn ses_to_les(
    rows: [&CosimplicialHodgeRow; 3],
    f: &RowMorphism,
    g: &RowMorphism,
) -> Result<LongExactSequence> {
    f.check(rows[0], rows[1])?;
    g.check(rows[1], rows[2])?;
    for n in 0..f.levels.len() {
        for q in f.levels[n].degrees() {
            let (fm, gm) = (f.levels[n].map(q), g.levels[n].map(q));
            if !gm.mul(&fm).is_zero() {
                return Err(Error::Precondition(format!("g ∘ f ≠ 0 at level {n}, degree {q}")));
            }
            let mid = rows[1].columns[n].data().complex.dim(q);
            if fm.rank() != fm.cols() || gm.rank() != gm.rows() || fm.rank() + gm.rank() != mid {
                return Err(Error::Precondition(format!("rows are not short exact at level {n}, degree {q}")));
            }
        }
    }
    let s: Vec<DescentHodge> = rows.iter().map(|r| assemble_descent_hodge(r)).collect::<Result<_>>()?;
    let sf = total_map(f, &s[0], &s[1])?;
    let sg = total_map(g, &s[1], &s[2])?;
    let c = cone(&sf)?;
    // (α, β) ↦ S(g) β
    let cone_data = &c.cone;
    let lo = cone_data.complex.min_degree().min(s[2].total.data().complex.min_degree());
    let hi = cone_data.complex.max_degree().max(s[2].total.data().complex.max_degree());
    let mut maps = BTreeMap::new();
    for n in lo..=hi {
        let a1 = s[0].total.data().complex.dim(n + 1);
        let b0 = s[1].total.data().complex.dim(n);
        let mut m = Matrix::zeros(s[2].total.data().complex.dim(n), cone_data.complex.dim(n));
        if b0 > 0 && m.rows() > 0 {
            m.set_block(0, a1, &sg.map(n));
        }
        maps.insert(n, m);
    }
    let comparison = Morphism::new(cone_data.clone(), s[2].total.data().clone(), maps)?;
    let comparison_quasi_iso = comparison.is_quasi_isomorphism();
    let lo = (0..3).map(|i| s[i].total.data().complex.min_degree()).min().unwrap();
    let hi = (0..3).map(|i| s[i].total.data().complex.max_degree()).max().unwrap();
    let mut terms = Vec::new();
    let mut raw: Vec<Matrix<Q>> = Vec::new();
    for k in lo..=hi {
        for i in 0..3 {
            terms.push((i, k, s[i].structure(k)));
        }
        raw.push(sf.on_cohomology(k));
        raw.push(sg.on_cohomology(k));
        if k < hi {
            let inv = comparison.on_cohomology(k).inverse().unwrap_or_else(|| Matrix::zeros(0, 0));
            let proj = c.to_shifted_source.on_cohomology(k);
            let conn = if comparison_quasi_iso { proj.mul(&inv) } else { Matrix::zeros(s[0].structure(k + 1).dim(), s[2].structure(k).dim()) };
            raw.push(conn);
        }
    }
    let mut maps = Vec::new();
    for (idx, m) in raw.iter().enumerate() {
        let (src, dst) = (&terms[idx].2, &terms[idx + 1].2);
        maps.push(hs_morphism(m, src, dst)?);
    }
    let mut exact = true;
    for k in 0..terms.len() {
        let into = if k == 0 { None } else { Some(&raw[k - 1]) };
        let out = raw.get(k);
        let dim = terms[k].2.dim();
        let r_in = into.map_or(0, |m| m.rank());
        let r_out = out.map_or(0, |m| m.rank());
        if let (Some(a), Some(b)) = (into, out) {
            if !b.mul(a).is_zero() {
                exact = false;
            }
        }
        // the two ends are only exact when the outer terms vanish
        if (k > 0 && k + 1 < terms.len() && r_in + r_out != dim) || (k == 0 && r_out != dim) || (k + 1 == terms.len() && r_in != dim) {
            exact = false;
        }
    }
    Ok(LongExactSequence { terms, maps, exact, comparison_quasi_iso })
}

/// The Mayer-Vietoris object `E ⇉ X̃ ⊔ S -> X` truncated at level 1.
pub fn mayer_vietoris_truncation(sq: &crate::finspace::BlowDown) -> Result<AugmentedSimplicialSpace> {
    let e = sq.exceptional();
    let s_poset = sq.x.subposet(&sq.s);
    let (x0, offsets) = FinitePoset::disjoint_union(&[sq.xt.clone(), s_poset]);
    let mut eps0 = sq.pi.clone();
    eps0.extend(sq.s.iter().copied());
    let e_poset = sq.xt.subposet(&e);
    let to_xt: Vec<usize> = e.clone();
    let to_s: Vec<usize> = e.iter().map(|&a| offsets[1] + sq.s.iter().position(|&z| z == sq.pi[a]).unwrap()).collect();
    let eps1 = e.iter().map(|&a| sq.pi[a]).collect();
    AugmentedSimplicialSpace::new(sq.x.clone(), vec![x0, e_poset], vec![Vec::new(), vec![to_xt, to_s]], vec![eps0, eps1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finspace::{sheaf_cohomology, BlowDown};
    use std::collections::BTreeMap as Map;

    fn v_weight1() -> PureCoefficients {
        PureCoefficients::standard(1, &[(1, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn identity_cycles_are_diagonal() {
        let x = FinitePoset::circle();
        let c = AugmentedSimplicialSpace::constant(&x, 2);
        let z = cycles(&c, 1).unwrap();
        assert_eq!(z.len(), 4);
        assert!(hypercover_check(&c).holds);
    }

    #[test]
    fn two_copies_give_four_components() {
        let x = FinitePoset::chain(2);
        let (x0, _) = FinitePoset::disjoint_union(&[x.clone(), x.clone()]);
        let c = AugmentedSimplicialSpace::cech(&x, &x0, &[0, 1, 0, 1], 2).unwrap();
        let z = cycles(&c, 1).unwrap();
        assert_eq!(z.len(), 8);
        assert_eq!(z.poset.components().len(), 4);
        assert!(hypercover_check(&c).holds);
    }

    #[test]
    fn resolution_of_two_maxima() {
        // a < x, a < y: two maximal points sharing a closed point
        let p = FinitePoset::new(3, &[(0, 1), (0, 2)]).unwrap();
        let s = simplicial_resolution(&p, &DownSets, 3).unwrap();
        assert_eq!(s.level(0).components().len(), 2);
        assert_eq!(cycles(&s, 1).unwrap().poset.components().len(), 4);
        assert!(hypercover_check(&s).holds);
        let f = PosetSheaf::constant(&p, 1);
        assert!(descent_check(&s, &f, 2).unwrap().holds);
    }

    #[test]
    fn circle_descent_recovers_cohomology() {
        let x = FinitePoset::circle();
        let s = simplicial_resolution(&x, &DownSets, 3).unwrap();
        let f = PosetSheaf::constant(&x, 1);
        assert!(descent_check(&s, &f, 2).unwrap().holds);
        assert_eq!(sheaf_cohomology(&f), vec![1, 1]);
        assert!(descent_check(&s, &f, 3).is_err());
    }

    #[test]
    fn mayer_vietoris_truncation_is_not_a_hypercover() {
        let x = FinitePoset::chain(2);
        let sq = BlowDown::new(x.clone(), x.clone(), vec![0, 1], vec![0]).unwrap();
        let mv = mayer_vietoris_truncation(&sq).unwrap();
        let rep = hypercover_check(&mv);
        assert_eq!(rep.failing_level, Some(1));
    }

    #[test]
    fn domination_maps_to_both() {
        let p = FinitePoset::new(3, &[(0, 1), (0, 2)]).unwrap();
        let a = simplicial_resolution(&p, &DownSets, 2).unwrap();
        let b = simplicial_resolution(&p, &DownSetsAndPoint, 2).unwrap();
        let (d, ta, tb) = dominate(&a, &b, &DownSets).unwrap();
        let id: Vec<usize> = (0..3).collect();
        assert!(ta.is_valid(&d, &a, &id));
        assert!(tb.is_valid(&d, &b, &id));
        assert!(hypercover_check(&d).holds);
    }

    #[test]
    fn one_level_row_is_theorem1() {
        let x = FinitePoset::circle();
        let f = PosetSheaf::constant(&x, 1);
        let row = single_row(&f, &v_weight1()).unwrap();
        let out = assemble_descent_hodge(&row).unwrap();
        assert!(out.theorem.certified());
        assert_eq!(out.structure(0).dim(), 2);
        assert_eq!(out.structure(1).dim(), 2);
        assert_eq!(out.structure(1).weights(), vec![1]);
    }

    #[test]
    fn independence_on_a_small_poset() {
        let p = FinitePoset::new(3, &[(0, 1), (0, 2)]).unwrap();
        let a = simplicial_resolution(&p, &DownSets, 2).unwrap();
        let b = simplicial_resolution(&p, &DownSetsAndPoint, 2).unwrap();
        let f = PosetSheaf::constant(&p, 1);
        let v = PureCoefficients::standard(0, &[(0, 1)]).unwrap();
        let rep = independence_check(&a, &b, &f, &v, &DownSets).unwrap();
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn connecting_map_of_closed_points() {
        let x = FinitePoset::circle();
        // 0 -> j_! k_U -> k -> i_* k_Z -> 0 with Z = {a, b}, U = {x, y}
        let mut ju = Map::new();
        let mut iz = Map::new();
        for (p, q) in x.covers() {
            ju.insert((p, q), Matrix::zeros(1, 0));
            iz.insert((p, q), Matrix::zeros(0, 1));
        }
        let f1 = PosetSheaf::new(x.clone(), vec![0, 0, 1, 1], ju).unwrap();
        let f2 = PosetSheaf::constant(&x, 1);
        let f3 = PosetSheaf::new(x.clone(), vec![1, 1, 0, 0], iz).unwrap();
        let inc = SheafMap { comps: (0..4).map(|p| if p < 2 { Matrix::zeros(1, 0) } else { Matrix::identity(1) }).collect() };
        let res = SheafMap { comps: (0..4).map(|p| if p < 2 { Matrix::identity(1) } else { Matrix::zeros(0, 1) }).collect() };
        let v = v_weight1();
        let rows = [single_row(&f1, &v).unwrap(), single_row(&f2, &v).unwrap(), single_row(&f3, &v).unwrap()];
        let mf = single_row_morphism(&inc, &f1, &f2, &v, &rows[0], &rows[1]).unwrap();
        let mg = single_row_morphism(&res, &f2, &f3, &v, &rows[1], &rows[2]).unwrap();
        let les = ses_to_les([&rows[0], &rows[1], &rows[2]], &mf, &mg).unwrap();
        assert!(les.holds(), "{:?}", les.exact);
        assert!(les.connecting_ranks().iter().any(|&r| r > 0));
    }
}
