//! Bounded cochain complexes with up to three biregular filtrations.
//!
//! Filtrations are stored decreasing (`F^p ⊇ F^{p+1}`); an increasing
//! filtration is read through `W_n = W^{-n}`. Each degree keeps only the
//! indices where the filtration is neither the whole space nor zero.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hodge::CHodgeStructure;
use crate::qlinalg::{is_zero_vec, Field, Matrix, Quotient, Subspace, Q};

/// Decreasing filtration of one finite-dimensional space.
///
/// `F^p` is the whole space for `p < start`, `steps[p - start]` inside the
/// stored window, and zero from `start + steps.len()` on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chain<K> {
    dim: usize,
    start: i32,
    steps: Vec<Subspace<K>>,
}

impl<K: Field> Chain<K> {
    pub fn new(dim: usize, start: i32, steps: Vec<Subspace<K>>) -> Result<Self> {
        for s in &steps {
            if s.ambient() != dim {
                return Err(Error::Filtration("step lives in the wrong ambient space".into()));
            }
        }
        for w in steps.windows(2) {
            if !w[0].contains_subspace(&w[1]) {
                return Err(Error::Filtration("filtration steps are not nested".into()));
            }
        }
        Ok(Chain { dim, start, steps }.normalized())
    }

    /// `F^p` is everything for `p <= jump` and zero above.
    pub fn trivial(dim: usize, jump: i32) -> Self {
        Chain { dim, start: jump + 1, steps: Vec::new() }.normalized()
    }

    /// Increasing filtration `W_lo ⊆ W_{lo+1} ⊆ ...`, with `W_n = 0` below
    /// `lo` and everything above the last given step.
    pub fn from_increasing(dim: usize, lo: i32, steps: Vec<Subspace<K>>) -> Result<Self> {
        // W^{-n} = W_n; W^p for p = -(lo+len-1) .. -lo
        let len = steps.len() as i32;
        let mut dec: Vec<Subspace<K>> = steps.into_iter().rev().collect();
        // after the window (p > -lo) everything is zero
        dec.push(Subspace::zero(dim));
        Chain::new(dim, -(lo + len - 1), dec)
    }

    fn normalized(mut self) -> Self {
        if self.dim == 0 {
            return Chain { dim: 0, start: 0, steps: Vec::new() };
        }
        while self.steps.last().is_some_and(|s| s.is_zero()) {
            self.steps.pop();
        }
        let lead = self.steps.iter().take_while(|s| s.is_full()).count();
        self.steps.drain(..lead);
        self.start += lead as i32;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, p: i32) -> Subspace<K> {
        if p < self.start {
            Subspace::full(self.dim)
        } else if ((p - self.start) as usize) < self.steps.len() {
            self.steps[(p - self.start) as usize].clone()
        } else {
            Subspace::zero(self.dim)
        }
    }

    pub fn dim_at(&self, p: i32) -> usize {
        if p < self.start {
            self.dim
        } else {
            self.steps.get((p - self.start) as usize).map_or(0, |s| s.dim())
        }
    }

    /// Increasing reading `W_n = W^{-n}`.
    pub fn increasing(&self, n: i32) -> Subspace<K> {
        self.get(-n)
    }

    /// `(lo, hi)` with `F^lo` everything and `F^hi` zero.
    pub fn bounds(&self) -> (i32, i32) {
        (self.start - 1, self.start + self.steps.len() as i32)
    }

    pub fn start(&self) -> i32 {
        self.start
    }

    pub fn steps(&self) -> &[Subspace<K>] {
        &self.steps
    }

    /// Indices `p` with `F^p ≠ F^{p+1}`.
    pub fn jumps(&self) -> Vec<i32> {
        let (lo, hi) = self.bounds();
        (lo..hi).filter(|&p| self.dim_at(p) != self.dim_at(p + 1)).collect()
    }

    /// `F[k]^p = F^{p+k}`.
    pub fn shift(&self, k: i32) -> Self {
        Chain { dim: self.dim, start: self.start - k, steps: self.steps.clone() }
    }

    pub fn graded_dim(&self, p: i32) -> usize {
        self.dim_at(p) - self.dim_at(p + 1)
    }

    /// Filtration induced on a subquotient of the underlying space.
    pub fn induce(&self, quo: &Quotient<K>) -> Chain<K> {
        let (lo, hi) = self.bounds();
        let steps = ((lo + 1)..hi).map(|p| quo.image_of(&self.get(p))).collect();
        Chain::new(quo.dim(), lo + 1, steps).expect("images of nested subspaces are nested")
    }

    /// Filtration induced on the image of a map, `F'^p = m(F^p)`.
    pub fn push(&self, m: &Matrix<K>) -> Chain<K> {
        let (lo, hi) = self.bounds();
        let steps = ((lo + 1)..hi).map(|p| self.get(p).image_under(m)).collect();
        Chain::new(m.rows(), lo + 1, steps).expect("images of nested subspaces are nested")
    }

    /// Filtration pulled back along a map, `F'^p = m^{-1}(F^p)`.
    pub fn pull(&self, m: &Matrix<K>) -> Chain<K> {
        let (lo, hi) = self.bounds();
        let steps = ((lo + 1)..hi).map(|p| self.get(p).preimage(m)).collect();
        Chain::new(m.cols(), lo + 1, steps).expect("preimages of nested subspaces are nested")
    }

    pub fn direct_sum(a: &Chain<K>, b: &Chain<K>) -> Chain<K> {
        let lo = a.bounds().0.min(b.bounds().0);
        let hi = a.bounds().1.max(b.bounds().1);
        let steps = ((lo + 1)..hi).map(|p| Subspace::direct_sum(&a.get(p), &b.get(p))).collect();
        Chain::new(a.dim + b.dim, lo + 1, steps).expect("sums of nested subspaces are nested")
    }

    pub fn direct_sum_all(parts: &[Chain<K>]) -> Chain<K> {
        parts.iter().fold(Chain::trivial(0, 0), |acc, c| Chain::direct_sum(&acc, c))
    }

    /// Intersection with a subspace `s`, expressed in the basis of `s`
    /// given by the columns of `basis`.
    pub fn restrict_to(&self, basis: &Matrix<K>) -> Chain<K> {
        self.pull(basis)
    }

    pub fn conj(&self) -> Chain<K> {
        Chain { dim: self.dim, start: self.start, steps: self.steps.iter().map(|s| s.conj()).collect() }
    }

    /// Whether `m` maps `self^p` into `target^p` for every `p`.
    pub fn preserved_by(&self, m: &Matrix<K>, target: &Chain<K>) -> Option<i32> {
        let lo = self.bounds().0.min(target.bounds().0);
        let hi = self.bounds().1.max(target.bounds().1);
        ((lo + 1)..hi).find(|&p| !target.get(p).contains_subspace(&self.get(p).image_under(m)))
    }
}

/// Orientation used when a filtration is written out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Decreasing,
    Increasing,
}

/// Bounded cochain complex of finite-dimensional rational spaces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Complex {
    min: i32,
    dims: Vec<usize>,
    /// `diffs[k]` is `d^{min+k}: C^{min+k} -> C^{min+k+1}`; one fewer than dims.
    diffs: Vec<Matrix<Q>>,
}

impl Complex {
    pub fn new(min: i32, dims: Vec<usize>, diffs: Vec<Matrix<Q>>) -> Result<Self> {
        if dims.is_empty() {
            if !diffs.is_empty() {
                return Err(Error::Dimension("differentials given for an empty complex".into()));
            }
            return Ok(Complex::zero());
        }
        if diffs.len() + 1 != dims.len() {
            return Err(Error::Dimension(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.cols() != dims[k] || d.rows() != dims[k + 1] {
                return Err(Error::Dimension(format!(
                    "differential at degree {} has shape {}x{}, expected {}x{}",
                    min + k as i32,
                    d.rows(),
                    d.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k].mul(&diffs[k - 1]).is_zero() {
                return Err(Error::NotAComplex(min + k as i32 - 1));
            }
        }
        Ok(Complex { min, dims, diffs })
    }

    pub fn zero() -> Self {
        Complex { min: 0, dims: Vec::new(), diffs: Vec::new() }
    }

    /// One space in one degree.
    pub fn single(degree: i32, dim: usize) -> Self {
        Complex { min: degree, dims: vec![dim], diffs: Vec::new() }
    }

    pub fn min_degree(&self) -> i32 {
        self.min
    }
    /// Last degree of the stored range (`min - 1` when empty).
    pub fn max_degree(&self) -> i32 {
        self.min + self.dims.len() as i32 - 1
    }
    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.min..=self.max_degree()
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn dim(&self, n: i32) -> usize {
        if n < self.min || n > self.max_degree() {
            0
        } else {
            self.dims[(n - self.min) as usize]
        }
    }

    /// `d^n` (zero outside the stored range).
    pub fn d(&self, n: i32) -> Matrix<Q> {
        if n >= self.min && n < self.max_degree() {
            self.diffs[(n - self.min) as usize].clone()
        } else {
            Matrix::zeros(self.dim(n + 1), self.dim(n))
        }
    }

    pub fn d_ref(&self, n: i32) -> Option<&Matrix<Q>> {
        if n >= self.min && n < self.max_degree() {
            Some(&self.diffs[(n - self.min) as usize])
        } else {
            None
        }
    }

    pub fn apply_d(&self, n: i32, v: &[Q]) -> Vec<Q> {
        match self.d_ref(n) {
            Some(d) => d.apply(v),
            None => vec![Q::zero(); self.dim(n + 1)],
        }
    }

    pub fn cycles(&self, n: i32) -> Subspace<Q> {
        self.d(n).kernel()
    }

    pub fn boundaries(&self, n: i32) -> Subspace<Q> {
        self.d(n - 1).image()
    }

    pub fn cohomology(&self, n: i32) -> Quotient<Q> {
        Quotient::new(self.cycles(n), self.boundaries(n)).expect("boundaries are cycles")
    }

    pub fn betti(&self, n: i32) -> usize {
        let d_out = self.d(n).rank();
        let d_in = self.d(n - 1).rank();
        self.dim(n) - d_out - d_in
    }

    pub fn is_acyclic(&self) -> bool {
        self.degrees().all(|n| self.betti(n) == 0)
    }

    /// Same complex with the differential scaled by `s`.
    pub fn scaled(&self, s: &Q) -> Complex {
        Complex { min: self.min, dims: self.dims.clone(), diffs: self.diffs.iter().map(|d| d.scale(s)).collect() }
    }

    /// Complex over an explicit degree window (extends with zeros).
    pub fn widened(&self, lo: i32, hi: i32) -> Complex {
        let lo = lo.min(self.min);
        let hi = hi.max(self.max_degree());
        if hi < lo {
            return Complex::zero();
        }
        let dims = (lo..=hi).map(|n| self.dim(n)).collect();
        let diffs = (lo..hi).map(|n| self.d(n)).collect();
        Complex { min: lo, dims, diffs }
    }
}


/// One filtration on every degree of a complex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Filtration {
    pub orientation: Orientation,
    min: i32,
    chains: Vec<Chain<Q>>,
}

impl Filtration {
    pub fn new(min: i32, chains: Vec<Chain<Q>>) -> Self {
        Filtration { orientation: Orientation::Decreasing, min, chains }
    }

    pub fn with_orientation(mut self, o: Orientation) -> Self {
        self.orientation = o;
        self
    }

    /// Single jump at `jump` in every degree.
    pub fn trivial(c: &Complex, jump: i32) -> Self {
        Filtration::new(c.min, c.dims.iter().map(|&d| Chain::trivial(d, jump)).collect())
    }

    pub fn chain(&self, n: i32) -> Chain<Q> {
        if n < self.min || n >= self.min + self.chains.len() as i32 {
            Chain::trivial(0, 0)
        } else {
            self.chains[(n - self.min) as usize].clone()
        }
    }

    pub fn chain_ref(&self, n: i32) -> Option<&Chain<Q>> {
        if n < self.min || n >= self.min + self.chains.len() as i32 {
            None
        } else {
            Some(&self.chains[(n - self.min) as usize])
        }
    }

    pub fn chains(&self) -> &[Chain<Q>] {
        &self.chains
    }

    pub fn min_degree(&self) -> i32 {
        self.min
    }

    pub fn get(&self, n: i32, p: i32) -> Subspace<Q> {
        match self.chain_ref(n) {
            Some(c) => c.get(p),
            None => Subspace::zero(0),
        }
    }

    /// Bounds `(lo, hi)` valid in every degree.
    pub fn bounds(&self) -> (i32, i32) {
        let mut lo = i32::MAX;
        let mut hi = i32::MIN;
        for c in &self.chains {
            if c.dim() == 0 {
                continue;
            }
            let (a, b) = c.bounds();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if lo > hi {
            (0, 0)
        } else {
            (lo, hi)
        }
    }

    /// `F[k]^p = F^{p+k}` in every degree.
    pub fn shift(&self, k: i32) -> Filtration {
        Filtration {
            orientation: self.orientation,
            min: self.min,
            chains: self.chains.iter().map(|c| c.shift(k)).collect(),
        }
    }

    /// Per-degree shift, `F'^p C^n = F^{p + k(n)} C^n`.
    pub fn shift_by_degree(&self, k: impl Fn(i32) -> i32) -> Filtration {
        Filtration {
            orientation: self.orientation,
            min: self.min,
            chains: self.chains.iter().enumerate().map(|(i, c)| c.shift(k(self.min + i as i32))).collect(),
        }
    }

    fn relabel(&self, new_min: i32) -> Filtration {
        Filtration { orientation: self.orientation, min: new_min, chains: self.chains.clone() }
    }

    fn aligned(&self, c: &Complex) -> Result<()> {
        for n in c.degrees() {
            let d = self.chain_ref(n).map_or(0, |ch| ch.dim());
            if d != c.dim(n) {
                return Err(Error::Filtration(format!(
                    "filtration in degree {n} lives on a space of dimension {d}, complex has {}",
                    c.dim(n)
                )));
            }
        }
        Ok(())
    }

    /// First `(n, p)` with `d(F^p C^n) ⊄ F^p C^{n+1}`.
    pub fn incompatibility(&self, c: &Complex) -> Option<(i32, i32)> {
        let (lo, hi) = self.bounds();
        for n in c.degrees() {
            let Some(d) = c.d_ref(n) else { continue };
            for p in (lo + 1)..hi {
                if !self.get(n + 1, p).contains_subspace(&self.get(n, p).image_under(d)) {
                    return Some((n, p));
                }
            }
        }
        None
    }
}

/// `(A, F, F̄, W)` with all filtrations decreasing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TriFilteredComplex {
    pub complex: Complex,
    pub f: Filtration,
    pub fbar: Filtration,
    pub w: Filtration,
}

/// Which of the three filtrations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    F,
    Fbar,
    W,
}

impl Which {
    pub fn name(self) -> &'static str {
        match self {
            Which::F => "F",
            Which::Fbar => "Fbar",
            Which::W => "W",
        }
    }
}

impl TriFilteredComplex {
    pub fn new(complex: Complex, f: Filtration, fbar: Filtration, w: Filtration) -> Result<Self> {
        for (name, filt) in [("F", &f), ("Fbar", &fbar), ("W", &w)] {
            filt.aligned(&complex)?;
            if let Some((n, p)) = filt.incompatibility(&complex) {
                return Err(Error::Filtration(format!(
                    "{name} is not compatible with d at degree {n}, index {p}"
                )));
            }
        }
        let f = f.relabel(complex.min);
        let fbar = fbar.relabel(complex.min);
        let w = w.relabel(complex.min);
        Ok(TriFilteredComplex { complex, f, fbar, w })
    }

    pub fn zero() -> Self {
        let c = Complex::zero();
        TriFilteredComplex {
            f: Filtration::trivial(&c, 0),
            fbar: Filtration::trivial(&c, 0),
            w: Filtration::trivial(&c, 0),
            complex: c,
        }
    }

    pub fn filtration(&self, which: Which) -> &Filtration {
        match which {
            Which::F => &self.f,
            Which::Fbar => &self.fbar,
            Which::W => &self.w,
        }
    }

    /// Structural equality up to widening the degree window with zero spaces.
    pub fn same_as(&self, o: &TriFilteredComplex) -> bool {
        let lo = self.complex.min_degree().min(o.complex.min_degree());
        let hi = self.complex.max_degree().max(o.complex.max_degree());
        (lo..=hi).all(|n| {
            self.complex.dim(n) == o.complex.dim(n)
                && (self.complex.dim(n) == 0
                    || (self.complex.d(n) == o.complex.d(n)
                        && self.f.chain(n) == o.f.chain(n)
                        && self.fbar.chain(n) == o.fbar.chain(n)
                        && self.w.chain(n) == o.w.chain(n)))
        })
    }
}

/// Degreewise linear maps between two trifiltered complexes.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub source: TriFilteredComplex,
    pub target: TriFilteredComplex,
    maps: BTreeMap<i32, Matrix<Q>>,
}

impl Morphism {
    /// Validates shapes, commutation with `d` and preservation of all three
    /// filtrations.
    pub fn new(source: TriFilteredComplex, target: TriFilteredComplex, maps: BTreeMap<i32, Matrix<Q>>) -> Result<Self> {
        let m = Morphism::unchecked(source, target, maps)?;
        m.check_chain_map()?;
        m.check_filtered()?;
        Ok(m)
    }

    /// Shape-checked only; used for maps known to be chain maps but not
    /// filtered (e.g. comparison maps that are plain quasi-isomorphisms).
    pub fn unchecked(source: TriFilteredComplex, target: TriFilteredComplex, maps: BTreeMap<i32, Matrix<Q>>) -> Result<Self> {
        for (&n, m) in &maps {
            if m.cols() != source.complex.dim(n) || m.rows() != target.complex.dim(n) {
                return Err(Error::Dimension(format!("morphism component at degree {n} has the wrong shape")));
            }
        }
        Ok(Morphism { source, target, maps })
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        let lo = self.source.complex.min_degree().min(self.target.complex.min_degree());
        let hi = self.source.complex.max_degree().max(self.target.complex.max_degree());
        lo..=hi
    }

    pub fn map(&self, n: i32) -> Matrix<Q> {
        self.maps
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.target.complex.dim(n), self.source.complex.dim(n)))
    }

    pub fn check_chain_map(&self) -> Result<()> {
        for n in self.degrees() {
            let lhs = self.target.complex.d(n).mul(&self.map(n));
            let rhs = self.map(n + 1).mul(&self.source.complex.d(n));
            if lhs != rhs {
                return Err(Error::NotChainMap(n));
            }
        }
        Ok(())
    }

    pub fn check_filtered(&self) -> Result<()> {
        for which in [Which::F, Which::Fbar, Which::W] {
            let s = self.source.filtration(which);
            let t = self.target.filtration(which);
            for n in self.degrees() {
                if self.source.complex.dim(n) == 0 {
                    continue;
                }
                if let Some(p) = s.chain(n).preserved_by(&self.map(n), &t.chain(n)) {
                    return Err(Error::NotFilteredMap { filtration: which.name().into(), degree: n, index: p });
                }
            }
        }
        Ok(())
    }

    pub fn identity(a: &TriFilteredComplex) -> Morphism {
        let maps = a.complex.degrees().map(|n| (n, Matrix::identity(a.complex.dim(n)))).collect();
        Morphism { source: a.clone(), target: a.clone(), maps }
    }

    pub fn zero(a: &TriFilteredComplex, b: &TriFilteredComplex) -> Morphism {
        Morphism { source: a.clone(), target: b.clone(), maps: BTreeMap::new() }
    }

    pub fn compose(&self, after: &Morphism) -> Morphism {
        let maps = self.degrees().map(|n| (n, after.map(n).mul(&self.map(n)))).collect();
        Morphism { source: self.source.clone(), target: after.target.clone(), maps }
    }

    /// Induced map on `H^n`, in the coordinates of `Complex::cohomology`.
    pub fn on_cohomology(&self, n: i32) -> Matrix<Q> {
        induced_on_cohomology(&self.source.complex, &self.target.complex, &self.map(n), n)
    }

    pub fn is_quasi_isomorphism(&self) -> bool {
        self.degrees().all(|n| {
            let m = self.on_cohomology(n);
            m.rows() == m.cols() && m.rank() == m.rows()
        })
    }
}

/// Matrix of the map `H^n(a) -> H^n(b)` induced by a chain map component.
pub fn induced_on_cohomology(a: &Complex, b: &Complex, m: &Matrix<Q>, n: i32) -> Matrix<Q> {
    let ha = a.cohomology(n);
    let hb = b.cohomology(n);
    let cols: Vec<Vec<Q>> = ha.reps().iter().map(|r| hb.project(&m.apply(r))).collect();
    Matrix::from_columns(hb.dim(), &cols)
}

/// A subquotient complex together with the per-degree coordinates.
#[derive(Clone, Debug)]
pub struct SubquotientComplex {
    pub complex: Complex,
    pub quotients: BTreeMap<i32, Quotient<Q>>,
}

impl SubquotientComplex {
    /// `top / bottom` degreewise; both must be subcomplexes.
    pub fn new(c: &Complex, top: &BTreeMap<i32, Subspace<Q>>, bottom: &BTreeMap<i32, Subspace<Q>>) -> Result<Self> {
        let mut quotients = BTreeMap::new();
        for n in c.degrees() {
            let t = top.get(&n).cloned().unwrap_or_else(|| Subspace::zero(c.dim(n)));
            let b = bottom.get(&n).cloned().unwrap_or_else(|| Subspace::zero(c.dim(n)));
            quotients.insert(n, Quotient::new(t, b)?);
        }
        let mut diffs = Vec::new();
        for n in c.degrees() {
            if n == c.max_degree() {
                break;
            }
            let src = &quotients[&n];
            let dst = &quotients[&(n + 1)];
            let cols: Vec<Vec<Q>> = src.reps().iter().map(|r| {
                let dr = c.apply_d(n, r);
                if !dst.top().contains(&dr) {
                    return Err(Error::Dimension(format!("top is not a subcomplex at degree {n}")));
                }
                Ok(dst.project(&dr))
            }).collect::<Result<_>>()?;
            for b in src.bottom().basis() {
                if !dst.bottom().contains(&c.apply_d(n, b)) {
                    return Err(Error::Dimension(format!("bottom is not a subcomplex at degree {n}")));
                }
            }
            diffs.push(Matrix::from_columns(dst.dim(), &cols));
        }
        let dims = c.degrees().map(|n| quotients[&n].dim()).collect();
        let complex = if c.dims.is_empty() { Complex::zero() } else { Complex::new(c.min, dims, diffs)? };
        Ok(SubquotientComplex { complex, quotients })
    }

    pub fn induce(&self, f: &Filtration) -> Filtration {
        let chains = self.complex.degrees().map(|n| f.chain(n).induce(&self.quotients[&n])).collect();
        Filtration::new(self.complex.min, chains)
    }

    /// Matrix of the map from the ambient degree-`n` space (restricted to `top`)
    /// to the subquotient coordinates.
    pub fn projection(&self, n: i32) -> Option<&Quotient<Q>> {
        self.quotients.get(&n)
    }
}

fn subspaces(c: &Complex, f: impl Fn(i32) -> Subspace<Q>) -> BTreeMap<i32, Subspace<Q>> {
    c.degrees().map(|n| (n, f(n))).collect()
}

/// `F^p A / F^{p+1} A` (or the same for `F̄`, `W`) with the other two
/// filtrations induced.
pub fn graded_piece(a: &TriFilteredComplex, which: Which, p: i32) -> TriFilteredComplex {
    graded_piece_with_coords(a, which, p).0
}

pub fn graded_piece_with_coords(a: &TriFilteredComplex, which: Which, p: i32) -> (TriFilteredComplex, SubquotientComplex) {
    let filt = a.filtration(which);
    let top = subspaces(&a.complex, |n| filt.get(n, p));
    let bottom = subspaces(&a.complex, |n| filt.get(n, p + 1));
    let sq = SubquotientComplex::new(&a.complex, &top, &bottom).expect("filtration steps are subcomplexes");
    let t = TriFilteredComplex {
        f: sq.induce(&a.f),
        fbar: sq.induce(&a.fbar),
        w: sq.induce(&a.w),
        complex: sq.complex.clone(),
    };
    (t, sq)
}

/// Sub-trifiltered complex `F^p A` (for `which`) with the induced filtrations.
pub fn filtered_piece(a: &TriFilteredComplex, which: Which, p: i32) -> (TriFilteredComplex, SubquotientComplex) {
    let filt = a.filtration(which);
    let top = subspaces(&a.complex, |n| filt.get(n, p));
    let bottom = subspaces(&a.complex, |n| Subspace::zero(a.complex.dim(n)));
    let sq = SubquotientComplex::new(&a.complex, &top, &bottom).expect("filtration steps are subcomplexes");
    let t = TriFilteredComplex {
        f: sq.induce(&a.f),
        fbar: sq.induce(&a.fbar),
        w: sq.induce(&a.w),
        complex: sq.complex.clone(),
    };
    (t, sq)
}

/// `A[i]^n = A^{n+i}`, differential `(-1)^i d`, `W[i]^k = W^{k+i}`.
pub fn translate(a: &TriFilteredComplex, i: i32) -> TriFilteredComplex {
    let sign = if i.rem_euclid(2) == 0 { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
    let c = &a.complex;
    let complex = Complex { min: c.min - i, dims: c.dims.clone(), diffs: c.diffs.iter().map(|d| d.scale(&sign)).collect() };
    let min = complex.min;
    TriFilteredComplex {
        f: a.f.relabel(min),
        fbar: a.fbar.relabel(min),
        w: a.w.shift(i).relabel(min),
        complex,
    }
}

/// Filtrations become `F[p]`, `F̄[q]`, `W[-p-q]`.
pub fn twist(a: &TriFilteredComplex, p: i32, q: i32) -> TriFilteredComplex {
    TriFilteredComplex {
        complex: a.complex.clone(),
        f: a.f.shift(p),
        fbar: a.fbar.shift(q),
        w: a.w.shift(-p - q),
    }
}

/// Degreewise direct sum, `a` first.
pub fn direct_sum(a: &TriFilteredComplex, b: &TriFilteredComplex) -> TriFilteredComplex {
    if a.complex.dims.is_empty() {
        return b.clone();
    }
    if b.complex.dims.is_empty() {
        return a.clone();
    }
    let lo = a.complex.min_degree().min(b.complex.min_degree());
    let hi = a.complex.max_degree().max(b.complex.max_degree());
    let complex = Complex {
        min: lo,
        dims: (lo..=hi).map(|n| a.complex.dim(n) + b.complex.dim(n)).collect(),
        diffs: (lo..hi).map(|n| Matrix::block_diag(&[&a.complex.d(n), &b.complex.d(n)])).collect(),
    };
    let sum = |x: &Filtration, y: &Filtration| {
        Filtration::new(lo, (lo..=hi).map(|n| Chain::direct_sum(&x.chain(n), &y.chain(n))).collect())
    };
    TriFilteredComplex { f: sum(&a.f, &b.f), fbar: sum(&a.fbar, &b.fbar), w: sum(&a.w, &b.w), complex }
}

/// Mapping cone with its two canonical morphisms `B -> Cone` and `Cone -> A[1]`.
pub struct Cone {
    pub cone: TriFilteredComplex,
    pub from_target: Morphism,
    pub to_shifted_source: Morphism,
}

/// `C^n = A^{n+1} ⊕ B^n`, `d(α, β) = (-dα, dβ - f α)`, `F^p C^n = F^p A^{n+1} ⊕ F^p B^n`,
/// `W_k C^n = W_{k-1} A^{n+1} ⊕ W_k B^n`.
pub fn cone(f: &Morphism) -> Result<Cone> {
    f.check_chain_map()?;
    f.check_filtered()?;
    let a = &f.source;
    let b = &f.target;
    let lo = (a.complex.min_degree() - 1).min(b.complex.min_degree());
    let hi = (a.complex.max_degree() - 1).max(b.complex.max_degree());
    let lo_hi_empty = a.complex.total_dim() == 0 && b.complex.total_dim() == 0;
    if lo_hi_empty || hi < lo {
        let z = TriFilteredComplex::zero();
        let a1 = translate(a, 1);
        return Ok(Cone {
            from_target: Morphism::zero(b, &z),
            to_shifted_source: Morphism::zero(&z, &a1),
            cone: z,
        });
    }
    let minus = Q::from_integer((-1).into());
    let dims: Vec<usize> = (lo..=hi).map(|n| a.complex.dim(n + 1) + b.complex.dim(n)).collect();
    let mut diffs = Vec::new();
    for n in lo..hi {
        let (a1, b0) = (a.complex.dim(n + 1), b.complex.dim(n));
        let (a2, b1) = (a.complex.dim(n + 2), b.complex.dim(n + 1));
        let mut m = Matrix::zeros(a2 + b1, a1 + b0);
        m.set_block(0, 0, &a.complex.d(n + 1).scale(&minus));
        m.set_block(a2, 0, &f.map(n + 1).scale(&minus));
        m.set_block(a2, a1, &b.complex.d(n));
        diffs.push(m);
    }
    let complex = Complex::new(lo, dims, diffs)?;
    let sum = |fa: &Filtration, fb: &Filtration, shift_a: i32| {
        let chains = (lo..=hi).map(|n| Chain::direct_sum(&fa.chain(n + 1).shift(shift_a), &fb.chain(n))).collect();
        Filtration::new(lo, chains)
    };
    // W_k C = W_{k-1} A ⊕ W_k B, i.e. W^m C = W^{m+1} A ⊕ W^m B
    let cone = TriFilteredComplex::new(complex, sum(&a.f, &b.f, 0), sum(&a.fbar, &b.fbar, 0), sum(&a.w, &b.w, 1))?;
    let mut inc = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for n in lo..=hi {
        let (a1, b0) = (a.complex.dim(n + 1), b.complex.dim(n));
        let mut i = Matrix::zeros(a1 + b0, b0);
        i.set_block(a1, 0, &Matrix::identity(b0));
        inc.insert(n, i);
        let mut p = Matrix::zeros(a1, a1 + b0);
        p.set_block(0, 0, &Matrix::identity(a1));
        proj.insert(n, p);
    }
    let from_target = Morphism::new(b.clone(), cone.clone(), inc)?;
    let to_shifted_source = Morphism::new(cone.clone(), translate(a, 1), proj)?;
    Ok(Cone { cone, from_target, to_shifted_source })
}

/// Total complex of a finite row `A^{0,•} -> A^{1,•} -> ...` of trifiltered
/// complexes: `T^n = ⊕_{i+j=n} A^{ij}`, differential `d + (-1)^j δ_i`,
/// `F^p T^n = ⊕ F^p A^{ij}`, `W_k T^n = ⊕ W_{k+i} A^{ij}`.
///
/// Summands of `T^n` are ordered by increasing column index `i`.
pub fn total(columns: &[TriFilteredComplex], deltas: &[Morphism]) -> Result<TriFilteredComplex> {
    Ok(total_with_layout(columns, deltas)?.0)
}

/// Offsets of each `A^{i, n-i}` inside `T^n`.
#[derive(Clone, Debug)]
pub struct TotalLayout {
    pub lo: i32,
    pub hi: i32,
    offsets: BTreeMap<(i32, usize), usize>,
}

impl TotalLayout {
    pub fn offset(&self, n: i32, column: usize) -> Option<usize> {
        self.offsets.get(&(n, column)).copied()
    }
}

pub fn total_with_layout(columns: &[TriFilteredComplex], deltas: &[Morphism]) -> Result<(TriFilteredComplex, TotalLayout)> {
    if columns.is_empty() {
        return Ok((TriFilteredComplex::zero(), TotalLayout { lo: 0, hi: -1, offsets: BTreeMap::new() }));
    }
    if deltas.len() + 1 != columns.len() {
        return Err(Error::Dimension(format!("{} columns need {} maps", columns.len(), columns.len() - 1)));
    }
    for (i, dl) in deltas.iter().enumerate() {
        dl.check_chain_map()?;
        dl.check_filtered()?;
        if dl.source.complex.dims() != columns[i].complex.dims() || dl.target.complex.dims() != columns[i + 1].complex.dims() {
            return Err(Error::Dimension(format!("map {i} does not connect columns {i} and {}", i + 1)));
        }
    }
    for i in 1..deltas.len() {
        for n in deltas[i].degrees() {
            if !deltas[i].map(n).mul(&deltas[i - 1].map(n)).is_zero() {
                return Err(Error::Precondition(format!("δ_{}δ_{} ≠ 0 at degree {n}", i, i - 1)));
            }
        }
    }
    let nonempty: Vec<usize> = (0..columns.len()).filter(|&i| columns[i].complex.total_dim() > 0).collect();
    if nonempty.is_empty() {
        return Ok((TriFilteredComplex::zero(), TotalLayout { lo: 0, hi: -1, offsets: BTreeMap::new() }));
    }
    let lo = nonempty.iter().map(|&i| i as i32 + columns[i].complex.min_degree()).min().unwrap();
    let hi = nonempty.iter().map(|&i| i as i32 + columns[i].complex.max_degree()).max().unwrap();
    let mut offsets = BTreeMap::new();
    let mut dims = Vec::new();
    for n in lo..=hi {
        let mut off = 0;
        for (i, col) in columns.iter().enumerate() {
            offsets.insert((n, i), off);
            off += col.complex.dim(n - i as i32);
        }
        dims.push(off);
    }
    let mut diffs = Vec::new();
    for n in lo..hi {
        let mut m = Matrix::zeros(dims[(n + 1 - lo) as usize], dims[(n - lo) as usize]);
        for (i, col) in columns.iter().enumerate() {
            let j = n - i as i32;
            if col.complex.dim(j) == 0 {
                continue;
            }
            let src = offsets[&(n, i)];
            m.set_block(offsets[&(n + 1, i)], src, &col.complex.d(j));
            if i + 1 < columns.len() {
                let sign = if j.rem_euclid(2) == 0 { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
                m.set_block(offsets[&(n + 1, i + 1)], src, &deltas[i].map(j).scale(&sign));
            }
        }
        diffs.push(m);
    }
    let complex = Complex::new(lo, dims, diffs)?;
    let sum = |which: Which| {
        let chains = (lo..=hi)
            .map(|n| {
                let parts: Vec<Chain<Q>> = columns
                    .iter()
                    .enumerate()
                    .map(|(i, col)| {
                        let ch = col.filtration(which).chain(n - i as i32);
                        // W^m T = ⊕ W^{m-i} A^{i,•}
                        if which == Which::W { ch.shift(-(i as i32)) } else { ch }
                    })
                    .collect();
                Chain::direct_sum_all(&parts)
            })
            .collect();
        Filtration::new(lo, chains)
    };
    let t = TriFilteredComplex::new(complex, sum(Which::F), sum(Which::Fbar), sum(Which::W))?;
    Ok((t, TotalLayout { lo, hi, offsets }))
}

/// Outcome of a strictness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strictness {
    pub strict: bool,
    /// `(p, n, v)` with `v ∈ (im d ∩ F^p) \ d(F^p)` in degree `n` (the target degree).
    pub witness: Option<(i32, i32, Vec<Q>)>,
}

/// Strictness of a filtered linear map: `m(F^p) = im(m) ∩ G^p` for all `p`.
/// Returns the failing index and a witness vector in the target.
pub fn strict_map<K: Field>(m: &Matrix<K>, src: &Chain<K>, dst: &Chain<K>) -> Option<(i32, Vec<K>)> {
    let lo = src.bounds().0.min(dst.bounds().0);
    let hi = src.bounds().1.max(dst.bounds().1);
    let im = m.image();
    for p in (lo + 1)..hi {
        let lhs = src.get(p).image_under(m);
        let rhs = im.intersect(&dst.get(p));
        if lhs != rhs {
            let w = rhs.basis().iter().find(|v| !lhs.contains(v)).cloned().unwrap_or_else(|| {
                lhs.basis().iter().find(|v| !rhs.contains(v)).cloned().expect("distinct subspaces differ on a basis vector")
            });
            return Some((p, w));
        }
    }
    None
}

/// Strictness of the differential of a filtered complex in every degree.
pub fn strictness_check(c: &Complex, f: &Filtration) -> Strictness {
    for n in c.degrees() {
        let Some(d) = c.d_ref(n) else { continue };
        if let Some((p, w)) = strict_map(d, &f.chain(n), &f.chain(n + 1)) {
            return Strictness { strict: false, witness: Some((p, n + 1, w)) };
        }
    }
    Strictness { strict: true, witness: None }
}

/// `H^i` with the three final filtrations.
#[derive(Clone, Debug)]
pub struct FilteredCohomology {
    pub degree: i32,
    pub space: Quotient<Q>,
    pub f: Chain<Q>,
    pub fbar: Chain<Q>,
    /// `W^k H^i = image[H^i(W^{k+i} A) -> H^i(A)]`.
    pub w: Chain<Q>,
}

impl FilteredCohomology {
    pub fn structure(&self) -> CHodgeStructure<Q> {
        CHodgeStructure::candidate(self.space.dim(), self.f.clone(), self.fbar.clone(), self.w.clone())
    }
}

/// Image of `H^i(F^p A)` in `H^i(A)`: classes of cycles lying in `F^p`.
fn final_chain(space: &Quotient<Q>, chain: &Chain<Q>) -> Chain<Q> {
    chain.induce(space)
}

pub fn cohomology_with_final_filtrations(a: &TriFilteredComplex) -> Vec<FilteredCohomology> {
    a.complex
        .degrees()
        .map(|i| {
            let space = a.complex.cohomology(i);
            let f = final_chain(&space, &a.f.chain(i));
            let fbar = final_chain(&space, &a.fbar.chain(i));
            let w = final_chain(&space, &a.w.chain(i).shift(i));
            FilteredCohomology { degree: i, space, f, fbar, w }
        })
        .collect()
}

/// Complex of C-Hodge structures turned into a trifiltered complex with
/// `W̃^i A^n = W^{i-n} A^n`; `F` and `F̄` are kept.
pub fn reindex_from_mhs_complex(min: i32, structures: &[CHodgeStructure<Q>], diffs: &[Matrix<Q>]) -> Result<TriFilteredComplex> {
    if structures.is_empty() {
        return Ok(TriFilteredComplex::zero());
    }
    for (k, h) in structures.iter().enumerate() {
        let n = min + k as i32;
        if let Some(fl) = crate::hodge::is_opposed(h).failure {
            return Err(Error::Filtration(format!(
                "structure in degree {n} is not opposed on Gr^W_{} at ({}, {})",
                fl.n, fl.p, fl.q
            )));
        }
    }
    let dims = structures.iter().map(|h| h.dim()).collect();
    let complex = Complex::new(min, dims, diffs.to_vec())?;
    for (k, d) in diffs.iter().enumerate() {
        let (s, t) = (&structures[k], &structures[k + 1]);
        for (name, a, b) in [("F", &s.f, &t.f), ("Fbar", &s.fbar, &t.fbar), ("W", &s.w, &t.w)] {
            if let Some(p) = a.preserved_by(d, b) {
                return Err(Error::NotFilteredMap { filtration: name.into(), degree: min + k as i32, index: p });
            }
        }
    }
    let per = |g: &dyn Fn(usize, &CHodgeStructure<Q>) -> Chain<Q>| {
        Filtration::new(min, structures.iter().enumerate().map(|(k, h)| g(k, h)).collect())
    };
    let f = per(&|_, h| h.f.clone());
    let fbar = per(&|_, h| h.fbar.clone());
    let w = per(&|k, h| h.w.shift(-(min + k as i32)));
    TriFilteredComplex::new(complex, f, fbar, w)
}

/// Whether `v` is zero; re-exported for tests that build witnesses.
pub fn is_zero(v: &[Q]) -> bool {
    is_zero_vec(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    fn span(n: usize, vs: &[&[i64]]) -> Subspace<Q> {
        Subspace::span(n, vs.iter().map(|v| v.iter().map(|&x| q(x)).collect()).collect())
    }

    fn one_term(dim: usize, w: Chain<Q>) -> TriFilteredComplex {
        let c = Complex::single(0, dim);
        TriFilteredComplex::new(
            c.clone(),
            Filtration::trivial(&c, 0),
            Filtration::trivial(&c, 0),
            Filtration::new(0, vec![w]),
        )
        .unwrap()
    }

    #[test]
    fn chain_normalizes_and_reads_increasing() {
        let c = Chain::new(2, -3, vec![Subspace::full(2), span(2, &[&[1, 0]]), Subspace::zero(2)]).unwrap();
        assert_eq!(c.start(), -2);
        assert_eq!(c.jumps(), vec![-3, -2]);
        let inc = Chain::from_increasing(2, 0, vec![span(2, &[&[1, 0]])]).unwrap();
        assert_eq!(inc.increasing(-1), Subspace::zero(2));
        assert_eq!(inc.increasing(0).dim(), 1);
        assert!(inc.increasing(1).is_full());
        assert!(Chain::new(2, 0, vec![span(2, &[&[1, 0]]), Subspace::full(2)]).is_err());
    }

    #[test]
    fn translate_by_one_moves_degree_and_weights() {
        let w = Chain::new(2, 1, vec![span(2, &[&[1, 0]]), span(2, &[&[1, 0]])]).unwrap();
        let a = one_term(2, w.clone());
        let t = translate(&a, 1);
        assert_eq!(t.complex.min_degree(), -1);
        assert_eq!(t.w.get(-1, 1), w.get(2));
        assert!(translate(&translate(&a, 1), -1).same_as(&a));
        assert!(translate(&a, 0).same_as(&a));
    }

    #[test]
    fn twist_inverts() {
        let a = one_term(2, Chain::trivial(2, 0));
        assert!(twist(&twist(&a, 1, 1), -1, -1).same_as(&a));
        assert!(twist(&a, 0, 0).same_as(&a));
    }

    #[test]
    fn cone_of_identity_is_acyclic_and_shifts_weight() {
        // W_0 = everything, W_{-1} = 0
        let w = Chain::from_increasing(1, 0, vec![Subspace::full(1)]).unwrap();
        let a = one_term(1, w);
        let c = cone(&Morphism::identity(&a)).unwrap();
        assert!(c.cone.complex.is_acyclic());
        // W_0 C^{-1} = W_{-1} A^0 = 0, W_1 C^{-1} = A^0
        assert!(c.cone.w.chain(-1).increasing(0).is_zero());
        assert!(c.cone.w.chain(-1).increasing(1).is_full());
    }

    #[test]
    fn total_two_columns_weight_layout() {
        let w = Chain::from_increasing(1, 0, vec![Subspace::full(1)]).unwrap();
        let a = one_term(1, w);
        let t = total(&[a.clone(), a.clone()], &[Morphism::zero(&a, &a)]).unwrap();
        // T^0 = A^{00}, T^1 = A^{10}; W_k T^n = ⊕ W_{k+i} A^{ij}
        assert!(t.w.chain(0).increasing(0).is_full());
        assert!(t.w.chain(1).increasing(-1).is_full());
        assert!(t.w.chain(1).increasing(-2).is_zero());
        assert!(t.w.chain(0).increasing(-1).is_zero());
    }

    #[test]
    fn strictness_examples() {
        let c = Complex::new(0, vec![1, 1], vec![Matrix::identity(1)]).unwrap();
        // F^1 source = 0, F^1 target = k
        let f = Filtration::new(0, vec![Chain::trivial(1, 0), Chain::trivial(1, 1)]);
        let s = strictness_check(&c, &f);
        assert!(!s.strict);
        let (p, n, v) = s.witness.unwrap();
        assert_eq!((p, n), (1, 1));
        assert!(!is_zero(&v));
        let z = Complex::new(0, vec![1, 1], vec![Matrix::zeros(1, 1)]).unwrap();
        assert!(strictness_check(&z, &f).strict);
        let same = Filtration::new(0, vec![Chain::trivial(1, 0), Chain::trivial(1, 0)]);
        assert!(strictness_check(&c, &same).strict);
    }

    #[test]
    fn final_filtrations_on_two_term_complex() {
        // 0 -> k^2 -> k -> 0, d(x,y) = x
        let c = Complex::new(0, vec![2, 1], vec![Matrix::from_ints(1, 2, &[1, 0])]).unwrap();
        let f = Filtration::new(0, vec![Chain::new(2, 1, vec![span(2, &[&[0, 1]])]).unwrap(), Chain::trivial(1, 0)]);
        let a = TriFilteredComplex::new(c.clone(), f.clone(), Filtration::trivial(&c, 0), Filtration::trivial(&c, 0)).unwrap();
        let h = cohomology_with_final_filtrations(&a);
        assert_eq!(h[0].space.dim(), 1);
        assert_eq!(h[1].space.dim(), 0);
        // the cycle (0,1) lies in F^1, so F^1 H^0 = H^0
        assert_eq!(h[0].f.dim_at(1), 1);
        assert_eq!(h[0].f.dim_at(2), 0);
    }

    #[test]
    fn graded_pieces_exhaust() {
        let w = Chain::new(3, 0, vec![span(3, &[&[1, 0, 0], &[0, 1, 1]]), span(3, &[&[0, 1, 1]])]).unwrap();
        let a = one_term(3, w);
        let total: usize = (-2..4).map(|p| graded_piece(&a, Which::W, p).complex.dim(0)).sum();
        assert_eq!(total, 3);
        let trivial = one_term(2, Chain::trivial(2, 5));
        assert_eq!(graded_piece(&trivial, Which::W, 5).complex.dim(0), 2);
        assert_eq!(graded_piece(&trivial, Which::W, 4).complex.dim(0), 0);
    }
}
