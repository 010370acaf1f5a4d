//! C-Hodge structures, the C-Hodge complex axioms and the Hodge structures
//! they induce on cohomology.
//!
//! Weight filtrations are stored decreasing; the increasing reading is
//! `W_n = W^{-n}`. Opposedness uses Deligne's convention: on `Gr^W_n` the
//! pieces `Gr_F^p Gr_F̄^q` vanish unless `p + q = n`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtcx::{
    cohomology_with_final_filtrations, cone, graded_piece, graded_piece_with_coords, induced_on_cohomology, strict_map,
    strictness_check, Chain, Morphism, SubquotientComplex, TriFilteredComplex, Which,
};
use crate::qlinalg::{format_gauss, format_q, Field, Gauss, Matrix, Quotient, Subspace, Q};
use crate::specseq::{recursive_filtration, SpectralSequence};

/// A finite-dimensional space with `F`, `F̄` (decreasing) and `W`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CHodgeStructure<K> {
    dim: usize,
    pub f: Chain<K>,
    pub fbar: Chain<K>,
    /// Stored decreasing: `W_n = w.get(-n)`.
    pub w: Chain<K>,
}

impl<K: Field> CHodgeStructure<K> {
    /// Unvalidated triple.
    pub fn candidate(dim: usize, f: Chain<K>, fbar: Chain<K>, w: Chain<K>) -> Self {
        CHodgeStructure { dim, f, fbar, w }
    }

    /// Triple checked for opposedness.
    pub fn new(dim: usize, f: Chain<K>, fbar: Chain<K>, w: Chain<K>) -> Result<Self> {
        for c in [&f, &fbar, &w] {
            if c.dim() != dim {
                return Err(Error::Dimension("filtration on a space of the wrong dimension".into()));
            }
        }
        let h = CHodgeStructure { dim, f, fbar, w };
        let rep = is_opposed(&h);
        match rep.failure {
            None => Ok(h),
            Some(fl) => Err(Error::Filtration(format!(
                "filtrations are not opposed on Gr^W_{} at (p, q) = ({}, {})",
                fl.n, fl.p, fl.q
            ))),
        }
    }

    pub fn zero() -> Self {
        CHodgeStructure { dim: 0, f: Chain::trivial(0, 0), fbar: Chain::trivial(0, 0), w: Chain::trivial(0, 0) }
    }

    /// Pure structure of weight `n` with `H = ⊕ H^{p, n-p}` in the given
    /// basis: the columns of `basis`, grouped consecutively by `hodge[k] = (p, count)`.
    pub fn pure_from_basis(n: i32, basis: &Matrix<K>, hodge: &[(i32, usize)]) -> Result<Self> {
        let dim = basis.rows();
        let total: usize = hodge.iter().map(|&(_, c)| c).sum();
        if total != basis.cols() || basis.rank() != dim || total != dim {
            return Err(Error::Dimension("Hodge decomposition basis does not match the space".into()));
        }
        let mut typed: Vec<(i32, Vec<K>)> = Vec::new();
        let mut col = 0;
        for &(p, count) in hodge {
            for _ in 0..count {
                typed.push((p, basis.column(col)));
                col += 1;
            }
        }
        let chain = |key: &dyn Fn(i32) -> i32| -> Chain<K> {
            let ps: Vec<i32> = typed.iter().map(|(p, _)| key(*p)).collect();
            let lo = ps.iter().copied().min().unwrap_or(0);
            let hi = ps.iter().copied().max().unwrap_or(0);
            let steps = (lo..=hi + 1)
                .map(|i| Subspace::span(dim, typed.iter().filter(|(p, _)| key(*p) >= i).map(|(_, v)| v.clone()).collect()))
                .collect();
            Chain::new(dim, lo, steps).expect("nested by construction")
        };
        let f = chain(&|p| p);
        let fbar = chain(&|p| n - p);
        CHodgeStructure::new(dim, f, fbar, Chain::trivial(dim, -n))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weight_step(&self, n: i32) -> Subspace<K> {
        self.w.increasing(n)
    }

    /// Weights `n` with `Gr^W_n ≠ 0`.
    pub fn weights(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.w.jumps().into_iter().map(|p| -p).collect();
        v.sort();
        v
    }

    /// `Gr^W_n = W_n / W_{n-1}` with `F`, `F̄` induced.
    pub fn gr_w(&self, n: i32) -> (Quotient<K>, Chain<K>, Chain<K>) {
        let quo = Quotient::new(self.w.increasing(n), self.w.increasing(n - 1)).expect("weight filtration is nested");
        let f = self.f.induce(&quo);
        let fb = self.fbar.induce(&quo);
        (quo, f, fb)
    }

    /// Hodge numbers `h^{p,q}` of every `Gr^W_n` (keyed by `(n, p, q)`).
    pub fn hodge_numbers(&self) -> BTreeMap<(i32, i32, i32), usize> {
        let mut out = BTreeMap::new();
        for n in self.weights() {
            let (_, f, fb) = self.gr_w(n);
            for ((p, q), d) in bigraded(&f, &fb) {
                if d > 0 {
                    out.insert((n, p, q), d);
                }
            }
        }
        out
    }

    pub fn direct_sum(a: &Self, b: &Self) -> Self {
        CHodgeStructure {
            dim: a.dim + b.dim,
            f: Chain::direct_sum(&a.f, &b.f),
            fbar: Chain::direct_sum(&a.fbar, &b.fbar),
            w: Chain::direct_sum(&a.w, &b.w),
        }
    }

    /// `H(a, b)`: filtrations `F[a]`, `F̄[b]`, `W[-a-b]`; weights drop by `a + b`.
    pub fn twist(&self, a: i32, b: i32) -> Self {
        CHodgeStructure { dim: self.dim, f: self.f.shift(a), fbar: self.fbar.shift(b), w: self.w.shift(-a - b) }
    }

    /// Transport along an invertible matrix.
    pub fn transform(&self, g: &Matrix<K>) -> Self {
        CHodgeStructure { dim: self.dim, f: self.f.push(g), fbar: self.fbar.push(g), w: self.w.push(g) }
    }
}

/// Dimensions of `Gr_F^p Gr_G^q` for two filtrations of one space.
pub fn bigraded<K: Field>(f: &Chain<K>, g: &Chain<K>) -> BTreeMap<(i32, i32), usize> {
    let (flo, fhi) = f.bounds();
    let (glo, ghi) = g.bounds();
    let mut out = BTreeMap::new();
    for p in flo..fhi {
        for q in glo..ghi {
            let a = f.get(p).intersect(&g.get(q)).dim();
            let b = f.get(p + 1).intersect(&g.get(q)).dim();
            let c = f.get(p).intersect(&g.get(q + 1)).dim();
            let d = f.get(p + 1).intersect(&g.get(q + 1)).dim();
            let v = a + d - b - c;
            if v > 0 {
                out.insert((p, q), v);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct OpposedFailure<K> {
    pub n: i32,
    pub p: i32,
    pub q: i32,
    /// Vector of `H` (inside `W_n`) spanning the offending bigraded piece.
    pub witness: Vec<K>,
}

#[derive(Clone, Debug)]
pub struct OpposedReport<K> {
    pub opposed: bool,
    pub failure: Option<OpposedFailure<K>>,
}

/// Deligne opposedness on every `Gr^W_n`.
pub fn is_opposed<K: Field>(h: &CHodgeStructure<K>) -> OpposedReport<K> {
    for n in h.weights() {
        let (quo, f, fb) = h.gr_w(n);
        for ((p, q), _) in bigraded(&f, &fb) {
            if p + q != n {
                let top = f.get(p).intersect(&fb.get(q));
                let bottom = f.get(p + 1).intersect(&fb.get(q)).sum(&f.get(p).intersect(&fb.get(q + 1)));
                let v = top.basis().iter().find(|v| !bottom.contains(v)).cloned().expect("nonzero bigraded piece");
                let witness = quo.lift(&v);
                return OpposedReport { opposed: false, failure: Some(OpposedFailure { n, p, q, witness }) };
            }
        }
    }
    OpposedReport { opposed: true, failure: None }
}

/// `F^p ⊕ F̄^{n-p+1} = Gr^W_n` for every `n` and `p`.
pub fn opposed_direct_sum<K: Field>(h: &CHodgeStructure<K>) -> bool {
    for n in h.weights() {
        let (quo, f, fb) = h.gr_w(n);
        let (lo, hi) = f.bounds();
        let (glo, ghi) = fb.bounds();
        let plo = lo.min(n + 1 - ghi) - 1;
        let phi = hi.max(n + 1 - glo) + 1;
        for p in plo..=phi {
            let a = f.get(p);
            let b = fb.get(n - p + 1);
            if !a.intersect(&b).is_zero() || a.dim() + b.dim() != quo.dim() {
                return false;
            }
        }
    }
    true
}

pub fn is_pure<K: Field>(h: &CHodgeStructure<K>, n: i32) -> bool {
    h.w.increasing(n).is_full() && h.w.increasing(n - 1).is_zero()
}

/// A morphism of C-Hodge structures with its kernel, image and cokernel.
#[derive(Clone, Debug)]
pub struct HsMorphism<K> {
    pub map: Matrix<K>,
    pub kernel: CHodgeStructure<K>,
    pub image: CHodgeStructure<K>,
    pub cokernel: CHodgeStructure<K>,
    /// Strictness for `F`, `F̄`, `W`.
    pub strict: [bool; 3],
    /// Kernel, image and cokernel pass the opposedness test.
    pub parts_opposed: bool,
}

impl<K: Field> HsMorphism<K> {
    pub fn is_strict(&self) -> bool {
        self.strict.iter().all(|&s| s)
    }
}

pub fn hs_morphism<K: Field>(m: &Matrix<K>, src: &CHodgeStructure<K>, dst: &CHodgeStructure<K>) -> Result<HsMorphism<K>> {
    if m.cols() != src.dim || m.rows() != dst.dim {
        return Err(Error::Dimension("morphism shape does not match the structures".into()));
    }
    let pairs = [("F", &src.f, &dst.f), ("Fbar", &src.fbar, &dst.fbar), ("W", &src.w, &dst.w)];
    for (name, a, b) in pairs {
        if let Some(p) = a.preserved_by(m, b) {
            return Err(Error::NotFilteredMap { filtration: name.into(), degree: 0, index: p });
        }
    }
    let strict = pairs.map(|(_, a, b)| strict_map(m, a, b).is_none());
    let ker = m.kernel();
    let kb = ker.basis_matrix();
    let kernel = CHodgeStructure::candidate(ker.dim(), src.f.pull(&kb), src.fbar.pull(&kb), src.w.pull(&kb));
    let im = m.image();
    let ib = im.basis_matrix();
    let image = CHodgeStructure::candidate(
        im.dim(),
        src.f.push(m).pull(&ib),
        src.fbar.push(m).pull(&ib),
        src.w.push(m).pull(&ib),
    );
    let quo = Quotient::of(im);
    let cokernel = CHodgeStructure::candidate(quo.dim(), dst.f.induce(&quo), dst.fbar.induce(&quo), dst.w.induce(&quo));
    let parts_opposed = [&kernel, &image, &cokernel].iter().all(|h| is_opposed(h).opposed);
    Ok(HsMorphism { map: m.clone(), kernel, image, cokernel, strict, parts_opposed })
}

/// Axiom labels of a C-Hodge complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    HC1,
    HC2,
    HC3,
}

/// First violated axiom with its location and a witness vector of `A^degree`.
#[derive(Clone, Debug, Serialize)]
pub struct HodgeFailure {
    pub axiom: Axiom,
    /// Cohomological degree `i` (the target degree for strictness failures).
    pub degree: i32,
    /// Weight index `p` of `Gr^p_W`.
    pub weight_index: i32,
    /// `F` or `Fbar` for strictness failures.
    pub filtration: Option<String>,
    /// Filtration index (strictness) or Hodge type `(p, q)` (opposedness).
    pub location: Vec<i32>,
    pub witness: Vec<String>,
    pub detail: String,
}

/// A trifiltered complex that passed HC1 to HC3.
#[derive(Clone, Debug)]
pub struct CHodgeComplex {
    data: TriFilteredComplex,
}

impl CHodgeComplex {
    pub fn data(&self) -> &TriFilteredComplex {
        &self.data
    }
    pub fn into_data(self) -> TriFilteredComplex {
        self.data
    }
}

fn format_vec(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

pub fn validate_hodge_complex(a: &TriFilteredComplex) -> std::result::Result<CHodgeComplex, HodgeFailure> {
    // HC1 holds for any bounded complex of finite-dimensional spaces.
    let (lo, hi) = a.w.bounds();
    let pieces: Vec<(i32, TriFilteredComplex, SubquotientComplex)> = (lo..hi)
        .map(|p| {
            let (g, sq) = graded_piece_with_coords(a, Which::W, p);
            (p, g, sq)
        })
        .collect();
    for (p, g, sq) in &pieces {
        for (name, filt) in [("F", &g.f), ("Fbar", &g.fbar)] {
            let s = strictness_check(&g.complex, filt);
            if let Some((index, n, w)) = s.witness {
                let lifted = sq.quotients[&n].lift(&w);
                return Err(HodgeFailure {
                    axiom: Axiom::HC2,
                    degree: n,
                    weight_index: *p,
                    filtration: Some(name.into()),
                    location: vec![index],
                    witness: format_vec(&lifted),
                    detail: format!("d on Gr^{p}_W is not strict for {name} at index {index}"),
                });
            }
        }
    }
    for (p, g, sq) in &pieces {
        for h in cohomology_with_final_filtrations(g) {
            if h.space.dim() == 0 {
                continue;
            }
            let i = h.degree;
            let st = h.structure();
            let weight = i - p;
            if !is_pure(&st, weight) {
                let (top, low) = (st.w.increasing(weight), st.w.increasing(weight - 1));
                let v = match low.basis().first() {
                    Some(v) => v.clone(),
                    None => (0..st.dim()).map(|k| crate::qlinalg::unit(st.dim(), k)).find(|e| !top.contains(e)).expect("not full"),
                };
                let lifted = sq.quotients[&i].lift(&h.space.lift(&v));
                return Err(HodgeFailure {
                    axiom: Axiom::HC3,
                    degree: i,
                    weight_index: *p,
                    filtration: None,
                    location: vec![],
                    witness: format_vec(&lifted),
                    detail: format!("H^{i}(Gr^{p}_W) is not pure of weight {weight}"),
                });
            }
            let rep = is_opposed(&st);
            if let Some(fl) = rep.failure {
                let in_gr = h.space.lift(&fl.witness);
                let lifted = sq.quotients[&i].lift(&in_gr);
                return Err(HodgeFailure {
                    axiom: Axiom::HC3,
                    degree: i,
                    weight_index: *p,
                    filtration: None,
                    location: vec![fl.p, fl.q],
                    witness: format_vec(&lifted),
                    detail: format!(
                        "H^{i}(Gr^{p}_W) is not a Hodge structure of weight {weight}: type ({}, {}) occurs",
                        fl.p, fl.q
                    ),
                });
            }
        }
    }
    Ok(CHodgeComplex { data: a.clone() })
}

/// One degree of the Theorem 1 output.
#[derive(Clone, Debug)]
pub struct DegreeStructure {
    pub degree: i32,
    pub structure: CHodgeStructure<Q>,
    pub opposed: bool,
}

#[derive(Clone, Debug)]
pub struct Theorem1 {
    pub structures: Vec<DegreeStructure>,
    pub w_degeneration: usize,
    pub f_degeneration: usize,
    pub fbar_degeneration: usize,
    /// `E_1` and `E_2` entries of the weight spectral sequence, with the
    /// recursive filtrations, are pure of weight `q`.
    pub e1_pure: bool,
    pub e2_pure: bool,
    pub d2_zero: bool,
}

impl Theorem1 {
    pub fn certified(&self) -> bool {
        self.w_degeneration <= 2
            && self.f_degeneration == 1
            && self.fbar_degeneration == 1
            && self.structures.iter().all(|s| s.opposed)
            && self.e1_pure
            && self.e2_pure
            && self.d2_zero
    }

    pub fn structure(&self, degree: i32) -> Option<&CHodgeStructure<Q>> {
        self.structures.iter().find(|s| s.degree == degree).map(|s| &s.structure)
    }
}

fn page_pure(ss: &SpectralSequence, a: &TriFilteredComplex, r: usize) -> bool {
    let f = recursive_filtration(ss, &a.f, r);
    let fb = recursive_filtration(ss, &a.fbar, r);
    ss.page(r).entries().all(|e| {
        let h = CHodgeStructure::candidate(
            e.dim(),
            f.chains[&(e.p, e.q)].clone(),
            fb.chains[&(e.p, e.q)].clone(),
            Chain::trivial(e.dim(), -e.q),
        );
        is_opposed(&h).opposed
    })
}

pub fn theorem1(a: &CHodgeComplex) -> Theorem1 {
    let a = &a.data;
    let wss = SpectralSequence::new(&a.complex, &a.w);
    let fss = SpectralSequence::new(&a.complex, &a.f);
    let fbss = SpectralSequence::new(&a.complex, &a.fbar);
    let structures = cohomology_with_final_filtrations(a)
        .into_iter()
        .map(|h| {
            let structure = h.structure();
            let opposed = is_opposed(&structure).opposed;
            DegreeStructure { degree: h.degree, structure, opposed }
        })
        .collect();
    Theorem1 {
        structures,
        w_degeneration: wss.degeneration_page(),
        f_degeneration: fss.degeneration_page(),
        fbar_degeneration: fbss.degeneration_page(),
        e1_pure: page_pure(&wss, a, 1),
        e2_pure: page_pure(&wss, a, 2),
        d2_zero: wss.page(2).is_zero_differential(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrFCertificate {
    pub index: i32,
    pub page: usize,
    pub holds: bool,
}

/// The weight spectral sequence of `Gr_F^i A` degenerates at `E_2`.
pub fn prop_grf_degeneration(a: &CHodgeComplex, i: i32) -> GrFCertificate {
    let g = graded_piece(&a.data, Which::F, i);
    let page = SpectralSequence::new(&g.complex, &g.w).degeneration_page();
    GrFCertificate { index: i, page, holds: page <= 2 }
}

/// Map induced on a subquotient complex by degreewise maps that send the
/// source top/bottom into the target top/bottom.
fn induced_maps(
    src: &SubquotientComplex,
    dst: &SubquotientComplex,
    maps: &BTreeMap<i32, Matrix<Q>>,
) -> BTreeMap<i32, Matrix<Q>> {
    src.complex
        .degrees()
        .map(|n| {
            let sq = &src.quotients[&n];
            let tq = dst.quotients.get(&n);
            let rows = tq.map_or(0, |t| t.dim());
            let cols: Vec<Vec<Q>> = sq
                .reps()
                .iter()
                .map(|r| match (tq, maps.get(&n)) {
                    (Some(t), Some(m)) => t.project(&m.apply(r)),
                    _ => vec![Q::from_int(0); rows],
                })
                .collect();
            (n, Matrix::from_columns(rows, &cols))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct AcyclicReport {
    pub holds: bool,
    /// `(filtration, p, q, degree)` where `Gr_F^p Gr_W^q f` fails on `H^degree`.
    pub witness: Option<(String, i32, i32, i32)>,
}

/// `Gr_F Gr_W f` and `Gr_F̄ Gr_W f` are quasi-isomorphisms in every bidegree.
pub fn acyclic_resolution_check(f: &Morphism) -> AcyclicReport {
    let a = &f.source;
    let b = &f.target;
    let maps: BTreeMap<i32, Matrix<Q>> = f.degrees().map(|n| (n, f.map(n))).collect();
    let (wlo, whi) = bounds_union(a.w.bounds(), b.w.bounds());
    for q in wlo..whi {
        let (ga, sa) = graded_piece_with_coords(a, Which::W, q);
        let (gb, sb) = graded_piece_with_coords(b, Which::W, q);
        let m1 = induced_maps(&sa, &sb, &maps);
        for which in [Which::F, Which::Fbar] {
            let (lo, hi) = bounds_union(ga.filtration(which).bounds(), gb.filtration(which).bounds());
            for p in lo..hi {
                let (gga, ssa) = graded_piece_with_coords(&ga, which, p);
                let (ggb, ssb) = graded_piece_with_coords(&gb, which, p);
                let m2 = induced_maps(&ssa, &ssb, &m1);
                let lo_n = gga.complex.min_degree().min(ggb.complex.min_degree());
                let hi_n = gga.complex.max_degree().max(ggb.complex.max_degree());
                for n in lo_n..=hi_n {
                    let m = m2.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(ggb.complex.dim(n), gga.complex.dim(n)));
                    let h = induced_on_cohomology(&gga.complex, &ggb.complex, &m, n);
                    if h.rows() != h.cols() || h.rank() != h.rows() {
                        return AcyclicReport { holds: false, witness: Some((which.name().into(), p, q, n)) };
                    }
                }
            }
        }
    }
    AcyclicReport { holds: true, witness: None }
}

fn bounds_union(a: (i32, i32), b: (i32, i32)) -> (i32, i32) {
    (a.0.min(b.0), a.1.max(b.1))
}

/// A C-Hodge structure over the Gaussian rationals with a rational form.
///
/// The rational form is the rational span of the columns of `basis`; its
/// conjugation is `σ = B ∘ conj ∘ B^{-1}`.
#[derive(Clone, Debug)]
pub struct RationalStructure {
    pub ambient: CHodgeStructure<Gauss>,
    pub basis: Matrix<Gauss>,
    /// Integral lattice generators in coordinates of `basis`.
    pub lattice: Option<Matrix<Q>>,
}

impl RationalStructure {
    pub fn new(ambient: CHodgeStructure<Gauss>, basis: Matrix<Gauss>, lattice: Option<Matrix<Q>>) -> Result<Self> {
        let n = ambient.dim();
        if basis.rows() != n || basis.cols() != n {
            return Err(Error::Dimension("rational basis has the wrong shape".into()));
        }
        let inv = basis
            .inverse()
            .ok_or_else(|| Error::Rationality("rational basis is not a basis".into()))?;
        let (wlo, whi) = ambient.w.bounds();
        for p in (wlo + 1)..whi {
            let s = ambient.w.get(p).image_under(&inv);
            if let Some(v) = s.basis().iter().find(|v| !v.iter().all(|x| x.is_rational())) {
                return Err(Error::Rationality(format!(
                    "W_{} is not spanned by rational vectors; witness {:?}",
                    -p,
                    basis.apply(v).iter().map(format_gauss).collect::<Vec<_>>()
                )));
            }
        }
        let sigma = |s: &Subspace<Gauss>| s.image_under(&inv).conj().image_under(&basis);
        let (lo, hi) = bounds_union(ambient.f.bounds(), ambient.fbar.bounds());
        for p in lo..=hi {
            let expected = sigma(&ambient.f.get(p));
            let got = ambient.fbar.get(p);
            if expected != got {
                let w = expected
                    .basis()
                    .iter()
                    .find(|v| !got.contains(v))
                    .or_else(|| got.basis().iter().find(|v| !expected.contains(v)))
                    .cloned()
                    .unwrap_or_default();
                return Err(Error::Rationality(format!(
                    "Fbar^{p} is not the conjugate of F^{p}; witness {:?}",
                    w.iter().map(format_gauss).collect::<Vec<_>>()
                )));
            }
        }
        if let Some(l) = &lattice {
            if l.rows() != n || l.rank() != n {
                return Err(Error::Rationality("lattice generators do not span the rational form".into()));
            }
            for r in 0..l.rows() {
                for c in 0..l.cols() {
                    if !l.get(r, c).is_integer() {
                        return Err(Error::Rationality(format!("lattice generator {c} is not integral")));
                    }
                }
            }
        }
        Ok(RationalStructure { ambient, basis, lattice })
    }
}

fn embed_chain(c: &Chain<Q>) -> Chain<Gauss> {
    let (lo, hi) = c.bounds();
    let steps = ((lo + 1)..hi)
        .map(|p| Subspace::span(c.dim(), c.get(p).basis().iter().map(|v| v.iter().cloned().map(Gauss::from_q).collect()).collect()))
        .collect();
    Chain::new(c.dim(), lo + 1, steps).expect("nested")
}

pub fn embed_structure(h: &CHodgeStructure<Q>) -> CHodgeStructure<Gauss> {
    CHodgeStructure::candidate(h.dim(), embed_chain(&h.f), embed_chain(&h.fbar), embed_chain(&h.w))
}

/// Rational form of one cohomology group: basis (over the Gaussian
/// rationals) of `H^degree` coordinates and optional lattice generators.
#[derive(Clone, Debug)]
pub struct RationalData {
    pub basis: Matrix<Gauss>,
    pub lattice: Option<Matrix<Q>>,
}

/// Theorem 1 output bundled with rational structures. Degrees without data
/// use the standard basis.
pub fn mixed_hodge_structure(a: &CHodgeComplex, data: &BTreeMap<i32, RationalData>) -> Result<Vec<(i32, RationalStructure)>> {
    let t = theorem1(a);
    t.structures
        .iter()
        .map(|s| {
            let amb = embed_structure(&s.structure);
            let d = s.structure.dim();
            let (basis, lattice) = match data.get(&s.degree) {
                Some(rd) => (rd.basis.clone(), rd.lattice.clone()),
                None => (Matrix::identity(d), None),
            };
            Ok((s.degree, RationalStructure::new(amb, basis, lattice)?))
        })
        .collect()
}

/// `… -> H^i(A) -> H^i(B) -> H^i(Cone f) -> H^{i+1}(A) -> …` for a morphism
/// `f: A -> B`, each term with its final filtrations.
#[derive(Clone, Debug)]
pub struct ConeSequence {
    /// `(0 = A, 1 = B, 2 = Cone, degree, structure)` in sequence order.
    pub terms: Vec<(usize, i32, CHodgeStructure<Q>)>,
    /// `maps[k]` goes from `terms[k]` to `terms[k + 1]`.
    pub maps: Vec<HsMorphism<Q>>,
    pub exact: bool,
}

impl ConeSequence {
    pub fn holds(&self) -> bool {
        self.exact
            && self.maps.iter().all(|m| m.is_strict())
            && self.terms.iter().all(|t| is_opposed(&t.2).opposed)
    }

    /// Index of the first term where exactness fails.
    pub fn first_gap(&self) -> Option<usize> {
        (0..self.terms.len()).find(|&k| !exact_at(&self.maps, self.terms[k].2.dim(), k))
    }
}

fn exact_at(maps: &[HsMorphism<Q>], dim: usize, k: usize) -> bool {
    let into = if k == 0 { None } else { maps.get(k - 1) };
    let out = maps.get(k);
    if let (Some(a), Some(b)) = (into, out) {
        if !b.map.mul(&a.map).is_zero() {
            return false;
        }
    }
    let r_in = into.map_or(0, |m| m.map.rank());
    let r_out = out.map_or(0, |m| m.map.rank());
    r_in + r_out == dim
}

fn structure_in_degree(a: &TriFilteredComplex, k: i32) -> CHodgeStructure<Q> {
    let space = a.complex.cohomology(k);
    let f = a.f.chain(k).induce(&space);
    let fbar = a.fbar.chain(k).induce(&space);
    let w = a.w.chain(k).shift(k).induce(&space);
    CHodgeStructure::candidate(space.dim(), f, fbar, w)
}

/// Builds the cone of `f` and the long cohomology sequence of the triangle
/// `A -> B -> Cone f -> A[1]`, over every degree where a term can be nonzero.
pub fn cone_sequence(f: &Morphism) -> Result<ConeSequence> {
    let c = cone(f)?;
    let (a, b) = (&f.source, &f.target);
    let lo = a.complex.min_degree().min(b.complex.min_degree()) - 1;
    let hi = a.complex.max_degree().max(b.complex.max_degree());
    let mut terms = Vec::new();
    let mut raw = Vec::new();
    for k in lo..=hi {
        terms.push((0, k, structure_in_degree(a, k)));
        terms.push((1, k, structure_in_degree(b, k)));
        terms.push((2, k, structure_in_degree(&c.cone, k)));
        raw.push(f.on_cohomology(k));
        raw.push(c.from_target.on_cohomology(k));
        if k < hi {
            // H^k(A[1]) is H^{k+1}(A) in the same coordinates and filtrations
            raw.push(c.to_shifted_source.on_cohomology(k));
        }
    }
    let maps = raw
        .iter()
        .enumerate()
        .map(|(k, m)| hs_morphism(m, &terms[k].2, &terms[k + 1].2))
        .collect::<Result<Vec<_>>>()?;
    let exact = (0..terms.len()).all(|k| exact_at(&maps, terms[k].2.dim(), k));
    Ok(ConeSequence { terms, maps, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtcx::{Complex, Filtration};
    use crate::qlinalg::q;

    fn elliptic() -> CHodgeStructure<Q> {
        CHodgeStructure::pure_from_basis(1, &Matrix::identity(2), &[(1, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn elliptic_pattern_is_opposed_and_pure() {
        let h = elliptic();
        assert!(is_opposed(&h).opposed);
        assert!(opposed_direct_sum(&h));
        assert!(is_pure(&h, 1));
        assert!(!is_pure(&h, 0));
        assert_eq!(h.hodge_numbers().get(&(1, 1, 0)), Some(&1));
    }

    #[test]
    fn equal_filtrations_on_weight_zero_line_are_not_opposed() {
        let f = Chain::<Q>::trivial(1, 1);
        let h = CHodgeStructure::candidate(1, f.clone(), f, Chain::trivial(1, 0));
        let rep = is_opposed(&h);
        assert!(!rep.opposed);
        let fl = rep.failure.unwrap();
        assert_eq!((fl.n, fl.p, fl.q), (0, 1, 1));
        assert!(!opposed_direct_sum(&h));
    }

    #[test]
    fn zero_space_is_pure_of_every_weight() {
        let h: CHodgeStructure<Q> = CHodgeStructure::zero();
        assert!(is_opposed(&h).opposed);
        assert!(is_pure(&h, 3) && is_pure(&h, -2));
    }

    #[test]
    fn sum_of_weights_zero_and_two_is_not_pure() {
        let a = CHodgeStructure::<Q>::pure_from_basis(0, &Matrix::identity(1), &[(0, 1)]).unwrap();
        let b = CHodgeStructure::pure_from_basis(2, &Matrix::identity(1), &[(1, 1)]).unwrap();
        let s = CHodgeStructure::direct_sum(&a, &b);
        assert!(is_opposed(&s).opposed);
        assert!(!is_pure(&s, 0) && !is_pure(&s, 2));
        assert_eq!(s.weights(), vec![0, 2]);
    }

    #[test]
    fn morphisms_between_different_weights_vanish() {
        let a = CHodgeStructure::<Q>::pure_from_basis(0, &Matrix::identity(1), &[(0, 1)]).unwrap();
        let b = CHodgeStructure::pure_from_basis(2, &Matrix::identity(1), &[(1, 1)]).unwrap();
        assert!(hs_morphism(&Matrix::from_ints(1, 1, &[1]), &a, &b).is_err());
        assert!(hs_morphism(&Matrix::zeros(1, 1), &a, &b).is_ok());
    }

    #[test]
    fn projection_to_top_weight() {
        // weights 0 (span e1) and 2 (e2), project onto e2
        let a = CHodgeStructure::<Q>::pure_from_basis(0, &Matrix::identity(1), &[(0, 1)]).unwrap();
        let b = CHodgeStructure::pure_from_basis(2, &Matrix::identity(1), &[(1, 1)]).unwrap();
        let s = CHodgeStructure::direct_sum(&a, &b);
        let m = hs_morphism(&Matrix::from_ints(1, 2, &[0, 1]), &s, &b).unwrap();
        assert_eq!(m.cokernel.dim(), 0);
        assert!(is_pure(&m.kernel, 0));
        assert!(m.is_strict() && m.parts_opposed);
    }

    #[test]
    fn identity_morphism() {
        let h = elliptic();
        let m = hs_morphism(&Matrix::identity(2), &h, &h).unwrap();
        assert_eq!(m.kernel.dim(), 0);
        assert_eq!(m.image, h);
    }

    fn one_term(h: &CHodgeStructure<Q>, degree: i32) -> TriFilteredComplex {
        let c = Complex::single(degree, h.dim());
        TriFilteredComplex::new(
            c,
            Filtration::new(degree, vec![h.f.clone()]),
            Filtration::new(degree, vec![h.fbar.clone()]),
            Filtration::new(degree, vec![h.w.shift(-degree)]),
        )
        .unwrap()
    }

    #[test]
    fn one_term_complex_returns_its_structure() {
        let h = elliptic();
        let a = validate_hodge_complex(&one_term(&h, 2)).unwrap();
        let t = theorem1(&a);
        assert!(t.certified());
        assert_eq!(t.structure(2), Some(&h));
    }

    #[test]
    fn non_opposed_piece_is_reported_as_hc3() {
        let f = Chain::trivial(1, 1);
        let h = CHodgeStructure::candidate(1, f.clone(), f, Chain::trivial(1, 0));
        let err = validate_hodge_complex(&one_term(&h, 0)).unwrap_err();
        assert_eq!(err.axiom, Axiom::HC3);
        assert_eq!(err.location, vec![1, 1]);
        assert_eq!(err.witness, vec!["1/1".to_string()]);
    }

    #[test]
    fn elliptic_rational_structure() {
        let i = Gauss::i();
        let one = Gauss::one();
        let v = vec![one.clone(), i.clone()];
        let vbar = vec![one.clone(), i.negated()];
        let f = Chain::new(2, 1, vec![Subspace::span(2, vec![v.clone()])]).unwrap();
        let fb = Chain::new(2, 1, vec![Subspace::span(2, vec![vbar])]).unwrap();
        let w = Chain::trivial(2, -1);
        let h = CHodgeStructure::new(2, f.clone(), fb, w).unwrap();
        assert!(RationalStructure::new(h.clone(), Matrix::identity(2), Some(Matrix::from_ints(2, 2, &[1, 0, 0, 1]))).is_ok());
        // W with a conjugation-unstable line
        let bad_w = Chain::new(2, -2, vec![Subspace::full(2), Subspace::span(2, vec![v])]).unwrap();
        let bad = CHodgeStructure::candidate(2, f, h.fbar.clone(), bad_w);
        assert!(matches!(RationalStructure::new(bad, Matrix::identity(2), None), Err(Error::Rationality(_))));
        let _ = q(0);
    }

    #[test]
    fn cone_sequence_of_one_term_morphisms() {
        let a = one_term(&elliptic(), 0);
        let id = Morphism::identity(&a);
        let seq = cone_sequence(&id).unwrap();
        assert!(seq.holds());
        assert!(seq.terms.iter().filter(|t| t.0 == 2).all(|t| t.2.dim() == 0));
        let zero = Morphism::zero(&a, &a);
        let seq = cone_sequence(&zero).unwrap();
        assert!(seq.holds());
        let cone_dims: Vec<(i32, usize)> = seq.terms.iter().filter(|t| t.0 == 2 && t.2.dim() > 0).map(|t| (t.1, t.2.dim())).collect();
        assert_eq!(cone_dims, vec![(-1, 2), (0, 2)]);
        // H^{-1}(Cone) -> H^0(A) is the identity on the elliptic structure
        let k = seq.terms.iter().position(|t| t.0 == 2 && t.1 == -1).unwrap();
        assert_eq!(seq.maps[k].map, Matrix::identity(2));
        assert_eq!(seq.terms[k].2, seq.terms[k + 1].2);
    }
}
