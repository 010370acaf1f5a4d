//! JSON interchange: instance bundles and the per-kind payload schemas.
//!
//! Matrices are `{rows, cols, entries}` with entries written as `"p/q"`
//! strings. A filtration is `{orientation, jumps}` where `jumps` maps a
//! degree to the list of `(index, basis)` pairs at which the filtration
//! changes; between jumps it is constant, past the last jump it is zero.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::descent::{AugmentedSimplicialSpace, PureCoefficients};
use crate::filtcx::{Chain, Complex, Filtration, Orientation, TriFilteredComplex};
use crate::finspace::{BlowDown, FinitePoset, PosetSheaf, Stratification};
use crate::qlinalg::{format_q, parse_q, unit, Matrix, Subspace, Q};

pub const SCHEMA_VERSION: u32 = 1;

/// Input that cannot be turned into the requested object.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("malformed input: {0}")]
    Malformed(String),
    /// Well-formed data failing a structural check (`d² ≠ 0`, a filtration
    /// not preserved by `d`); carries a witness vector.
    #[error("{0}")]
    Check(CheckFailure),
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckFailure {
    pub check: String,
    pub degree: i32,
    pub witness: Vec<String>,
    pub detail: String,
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at degree {}: {}", self.check, self.degree, self.detail)
    }
}

fn malformed(e: impl std::fmt::Display) -> InputError {
    InputError::Malformed(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Complex,
    HodgeComplex,
    Poset,
    Sheaf,
    BlowDown,
    Simplicial,
    Row,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceBundle {
    pub schema: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub payload: serde_json::Value,
}

impl InstanceBundle {
    pub fn new<T: Serialize>(kind: Kind, seed: Option<u64>, payload: &T) -> Self {
        let payload = serde_json::to_value(payload).expect("payload types serialize");
        InstanceBundle { schema: SCHEMA_VERSION, kind, seed, payload }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, InputError> {
        let b: InstanceBundle = serde_json::from_str(s).map_err(malformed)?;
        if b.schema != SCHEMA_VERSION {
            return Err(InputError::Malformed(format!("unsupported schema version {}", b.schema)));
        }
        Ok(b)
    }

    pub fn expect(&self, kind: Kind) -> Result<(), InputError> {
        if self.kind != kind {
            return Err(InputError::Malformed(format!("expected a {kind:?} bundle, got {:?}", self.kind)));
        }
        Ok(())
    }

    pub fn payload<T: DeserializeOwned>(&self) -> Result<T, InputError> {
        serde_json::from_value(self.payload.clone()).map_err(malformed)
    }
}

// ---------- matrices and vectors ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Matrix<Q>) -> Self {
        let entries = (0..m.rows()).map(|r| m.row(r).iter().map(format_q).collect()).collect();
        MatrixJson { rows: m.rows(), cols: m.cols(), entries }
    }

    pub fn to_matrix(&self) -> Result<Matrix<Q>, InputError> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(InputError::Malformed(format!("matrix entries do not form a {}x{} array", self.rows, self.cols)));
        }
        let rows = self.entries.iter().map(|r| parse_vec(r)).collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(self.rows, self.cols, rows).map_err(malformed)
    }
}

pub fn format_vec(v: &[Q]) -> Vec<String> {
    v.iter().map(format_q).collect()
}

pub fn parse_vec(v: &[String]) -> Result<Vec<Q>, InputError> {
    v.iter().map(|s| parse_q(s).map_err(malformed)).collect()
}

// ---------- complexes and filtrations ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    /// `[lo, hi]`; `[0, -1]` for the zero complex.
    pub range: [i32; 2],
    pub dims: Vec<usize>,
    pub differentials: Vec<MatrixJson>,
}

impl ComplexJson {
    pub fn from_complex(c: &Complex) -> Self {
        if c.dims().is_empty() {
            return ComplexJson { range: [0, -1], dims: vec![], differentials: vec![] };
        }
        let (lo, hi) = (c.min_degree(), c.max_degree());
        ComplexJson {
            range: [lo, hi],
            dims: c.dims().to_vec(),
            differentials: (lo..hi).map(|n| MatrixJson::from_matrix(&c.d(n))).collect(),
        }
    }

    fn parts(&self) -> Result<(i32, Vec<Matrix<Q>>), InputError> {
        let [lo, hi] = self.range;
        let len = (hi - lo + 1).max(0) as usize;
        if self.dims.len() != len {
            return Err(InputError::Malformed(format!("range [{lo}, {hi}] needs {len} dims, got {}", self.dims.len())));
        }
        if self.differentials.len() != len.saturating_sub(1) {
            return Err(InputError::Malformed(format!(
                "range [{lo}, {hi}] needs {} differentials, got {}",
                len.saturating_sub(1),
                self.differentials.len()
            )));
        }
        let diffs = self.differentials.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>, _>>()?;
        for (k, d) in diffs.iter().enumerate() {
            if d.cols() != self.dims[k] || d.rows() != self.dims[k + 1] {
                return Err(InputError::Malformed(format!("differential at degree {} has the wrong shape", lo + k as i32)));
            }
        }
        Ok((lo, diffs))
    }

    /// `d² ≠ 0` is a check failure with a witness, not a parse error.
    pub fn to_complex(&self) -> Result<Complex, InputError> {
        let (lo, diffs) = self.parts()?;
        for k in 1..diffs.len() {
            let dd = diffs[k].mul(&diffs[k - 1]);
            if let Some(j) = (0..dd.cols()).find(|&j| dd.column(j).iter().any(|x| !x.is_zero())) {
                let n = lo + k as i32 - 1;
                return Err(InputError::Check(CheckFailure {
                    check: "d-squared".into(),
                    degree: n,
                    witness: format_vec(&unit(dd.cols(), j)),
                    detail: format!("d∘d is nonzero on this vector of degree {n}"),
                }));
            }
        }
        Complex::new(lo, self.dims.clone(), diffs).map_err(malformed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationJson {
    Decreasing,
    Increasing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpJson {
    pub index: i32,
    pub basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationJson {
    pub orientation: OrientationJson,
    pub jumps: BTreeMap<i32, Vec<JumpJson>>,
}

fn basis_json(s: &Subspace<Q>) -> Vec<Vec<String>> {
    s.basis().iter().map(|v| format_vec(v)).collect()
}

impl FiltrationJson {
    pub fn from_chains(min: i32, chains: &[Chain<Q>], orientation: Orientation) -> Self {
        let mut jumps = BTreeMap::new();
        for (k, c) in chains.iter().enumerate() {
            let list: Vec<JumpJson> = match orientation {
                Orientation::Decreasing => {
                    c.jumps().into_iter().map(|p| JumpJson { index: p, basis: basis_json(&c.get(p)) }).collect()
                }
                Orientation::Increasing => c
                    .jumps()
                    .into_iter()
                    .rev()
                    .map(|p| JumpJson { index: -p, basis: basis_json(&c.get(p)) })
                    .collect(),
            };
            jumps.insert(min + k as i32, list);
        }
        let orientation = match orientation {
            Orientation::Decreasing => OrientationJson::Decreasing,
            Orientation::Increasing => OrientationJson::Increasing,
        };
        FiltrationJson { orientation, jumps }
    }

    pub fn from_filtration(f: &Filtration, c: &Complex) -> Self {
        let chains: Vec<Chain<Q>> = c.degrees().map(|n| f.chain(n)).collect();
        Self::from_chains(c.min_degree(), &chains, f.orientation)
    }

    /// Chain on a space of dimension `dim` from the jumps at degree `n`.
    pub fn chain(&self, n: i32, dim: usize) -> Result<Chain<Q>, InputError> {
        let empty = Vec::new();
        let list = self.jumps.get(&n).unwrap_or(&empty);
        if dim == 0 {
            return Ok(Chain::trivial(0, 0));
        }
        if list.is_empty() {
            return Err(InputError::Malformed(format!("no jumps given in degree {n} of dimension {dim}")));
        }
        // decreasing indices paired with their steps
        let mut steps: Vec<(i32, Subspace<Q>)> = Vec::new();
        for j in list {
            let vecs = j.basis.iter().map(|v| parse_vec(v)).collect::<Result<Vec<_>, _>>()?;
            if vecs.iter().any(|v| v.len() != dim) {
                return Err(InputError::Malformed(format!("basis vector of the wrong length in degree {n}")));
            }
            let p = match self.orientation {
                OrientationJson::Decreasing => j.index,
                OrientationJson::Increasing => -j.index,
            };
            steps.push((p, Subspace::span(dim, vecs)));
        }
        steps.sort_by_key(|s| s.0);
        if steps.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(InputError::Malformed(format!("repeated jump index in degree {n}")));
        }
        if !steps[0].1.is_full() {
            return Err(InputError::Malformed(format!("filtration is not exhaustive in degree {n}")));
        }
        let (lo, hi) = (steps[0].0, steps[steps.len() - 1].0);
        let mut k = 0;
        let mut full = Vec::new();
        for p in lo..=hi {
            while steps[k].0 < p {
                k += 1;
            }
            full.push(steps[k].1.clone());
        }
        let c = Chain::new(dim, lo, full).map_err(malformed)?;
        if c.jumps() != steps.iter().map(|s| s.0).collect::<Vec<_>>() {
            return Err(InputError::Malformed(format!("listed jumps in degree {n} are not the actual jumps")));
        }
        Ok(c)
    }

    pub fn to_filtration(&self, c: &Complex) -> Result<Filtration, InputError> {
        if let Some(&n) = self.jumps.keys().find(|&&n| c.dim(n) == 0 && !self.jumps[&n].is_empty()) {
            return Err(InputError::Malformed(format!("jumps given in degree {n}, where the complex is zero")));
        }
        if c.dims().is_empty() {
            return Ok(Filtration::trivial(c, 0));
        }
        let chains = c.degrees().map(|n| self.chain(n, c.dim(n))).collect::<Result<Vec<_>, _>>()?;
        let o = match self.orientation {
            OrientationJson::Decreasing => Orientation::Decreasing,
            OrientationJson::Increasing => Orientation::Increasing,
        };
        Ok(Filtration::new(c.min_degree(), chains).with_orientation(o))
    }
}

/// A trifiltered complex; `W` is indexed like the complex it came with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeComplexJson {
    pub complex: ComplexJson,
    #[serde(rename = "F")]
    pub f: FiltrationJson,
    #[serde(rename = "Fbar")]
    pub fbar: FiltrationJson,
    #[serde(rename = "W")]
    pub w: FiltrationJson,
}

impl HodgeComplexJson {
    pub fn from_trifiltered(a: &TriFilteredComplex) -> Self {
        HodgeComplexJson {
            complex: ComplexJson::from_complex(&a.complex),
            f: FiltrationJson::from_filtration(&a.f, &a.complex),
            fbar: FiltrationJson::from_filtration(&a.fbar, &a.complex),
            w: FiltrationJson::from_filtration(&a.w, &a.complex),
        }
    }

    /// Raw parts, not required to form a complex.
    pub fn from_parts(min: i32, dims: &[usize], diffs: &[Matrix<Q>], f: &[Chain<Q>], fbar: &[Chain<Q>], w: &[Chain<Q>]) -> Self {
        let hi = min + dims.len() as i32 - 1;
        HodgeComplexJson {
            complex: ComplexJson {
                range: [min, hi],
                dims: dims.to_vec(),
                differentials: diffs.iter().map(MatrixJson::from_matrix).collect(),
            },
            f: FiltrationJson::from_chains(min, f, Orientation::Decreasing),
            fbar: FiltrationJson::from_chains(min, fbar, Orientation::Decreasing),
            w: FiltrationJson::from_chains(min, w, Orientation::Decreasing),
        }
    }

    pub fn to_trifiltered(&self) -> Result<TriFilteredComplex, InputError> {
        let c = self.complex.to_complex()?;
        let f = self.f.to_filtration(&c)?;
        let fbar = self.fbar.to_filtration(&c)?;
        let w = self.w.to_filtration(&c)?;
        for (name, filt) in [("F", &f), ("Fbar", &fbar), ("W", &w)] {
            if let Some((n, p)) = filt.incompatibility(&c) {
                let d = c.d(n);
                let v = filt
                    .get(n, p)
                    .basis()
                    .iter()
                    .find(|v| !filt.get(n + 1, p).contains(&d.apply(v)))
                    .cloned()
                    .unwrap_or_default();
                return Err(InputError::Check(CheckFailure {
                    check: "filtered-differential".into(),
                    degree: n,
                    witness: format_vec(&v),
                    detail: format!("d does not map {name}^{p} in degree {n} into {name}^{p}"),
                }));
            }
        }
        TriFilteredComplex::new(c, f, fbar, w).map_err(malformed)
    }
}

// ---------- finite spaces ----------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub points: usize,
    /// Covering relations `a < b`.
    pub relations: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl PosetJson {
    pub fn from_poset(p: &FinitePoset) -> Self {
        let default: Vec<String> = (0..p.len()).map(|i| i.to_string()).collect();
        let labels = (p.labels() != default.as_slice()).then(|| p.labels().to_vec());
        PosetJson { points: p.len(), relations: p.covers(), labels }
    }

    pub fn to_poset(&self) -> Result<FinitePoset, InputError> {
        let p = FinitePoset::new(self.points, &self.relations).map_err(malformed)?;
        match &self.labels {
            Some(l) => p.with_labels(l.clone()).map_err(malformed),
            None => Ok(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverMapJson {
    pub from: usize,
    pub to: usize,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheafJson {
    pub poset: PosetJson,
    pub stalks: Vec<usize>,
    pub maps: Vec<CoverMapJson>,
    /// Atom label per point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratification: Option<Vec<usize>>,
}

impl SheafJson {
    pub fn from_sheaf(f: &PosetSheaf, strat: Option<&Stratification>) -> Self {
        let maps = f
            .cover_maps()
            .iter()
            .map(|(&(a, b), m)| CoverMapJson { from: a, to: b, matrix: MatrixJson::from_matrix(m) })
            .collect();
        SheafJson {
            poset: PosetJson::from_poset(f.base()),
            stalks: f.stalks().to_vec(),
            maps,
            stratification: strat.map(|s| s.assignment().to_vec()),
        }
    }

    pub fn to_sheaf(&self) -> Result<PosetSheaf, InputError> {
        let base = self.poset.to_poset()?;
        let mut covers = BTreeMap::new();
        for m in &self.maps {
            if covers.insert((m.from, m.to), m.matrix.to_matrix()?).is_some() {
                return Err(InputError::Malformed(format!("two maps given for {} < {}", m.from, m.to)));
            }
        }
        PosetSheaf::new(base, self.stalks.clone(), covers).map_err(malformed)
    }

    pub fn to_stratification(&self) -> Result<Option<Stratification>, InputError> {
        match &self.stratification {
            None => Ok(None),
            Some(a) => Stratification::new(self.poset.to_poset()?, a.clone()).map(Some).map_err(malformed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowDownJson {
    pub x: PosetJson,
    pub xt: PosetJson,
    pub pi: Vec<usize>,
    pub s: Vec<usize>,
    /// Sheaf on `X`; the constant sheaf `k` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sheaf: Option<SheafJson>,
}

impl BlowDownJson {
    pub fn from_blow_down(b: &BlowDown, sheaf: Option<&PosetSheaf>) -> Self {
        BlowDownJson {
            x: PosetJson::from_poset(&b.x),
            xt: PosetJson::from_poset(&b.xt),
            pi: b.pi.clone(),
            s: b.s.clone(),
            sheaf: sheaf.map(|f| SheafJson::from_sheaf(f, None)),
        }
    }

    pub fn to_blow_down(&self) -> Result<(BlowDown, PosetSheaf), InputError> {
        let x = self.x.to_poset()?;
        let b = BlowDown::new(x.clone(), self.xt.to_poset()?, self.pi.clone(), self.s.clone()).map_err(malformed)?;
        let f = match &self.sheaf {
            None => PosetSheaf::constant(&x, 1),
            Some(s) => s.to_sheaf()?,
        };
        if f.base() != &x {
            return Err(InputError::Malformed("sheaf does not live on X".into()));
        }
        Ok((b, f))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialJson {
    /// Top level.
    #[serde(rename = "N")]
    pub n: usize,
    pub base: PosetJson,
    pub objects: Vec<PosetJson>,
    /// `faces[n][i]` maps level `n` to level `n - 1`; `faces[0]` is empty.
    pub faces: Vec<Vec<Vec<usize>>>,
    pub augmentations: Vec<Vec<usize>>,
}

impl SimplicialJson {
    pub fn from_space(x: &AugmentedSimplicialSpace) -> Self {
        let top = x.top();
        SimplicialJson {
            n: top,
            base: PosetJson::from_poset(x.base()),
            objects: (0..=top).map(|n| PosetJson::from_poset(x.level(n))).collect(),
            faces: (0..=top).map(|n| if n == 0 { vec![] } else { (0..=n).map(|i| x.face(n, i).to_vec()).collect() }).collect(),
            augmentations: (0..=top).map(|n| x.augmentation(n).to_vec()).collect(),
        }
    }

    pub fn to_space(&self) -> Result<AugmentedSimplicialSpace, InputError> {
        if self.objects.len() != self.n + 1 {
            return Err(InputError::Malformed(format!("N = {} needs {} objects", self.n, self.n + 1)));
        }
        let levels = self.objects.iter().map(|p| p.to_poset()).collect::<Result<Vec<_>, _>>()?;
        AugmentedSimplicialSpace::new(self.base.to_poset()?, levels, self.faces.clone(), self.augmentations.clone())
            .map_err(malformed)
    }
}

/// Pure coefficients `V` of the synthetic Hodge provider.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientsJson {
    pub weight: i32,
    /// `(p, h^{p, weight - p})`.
    pub hodge: Vec<(i32, usize)>,
}

impl CoefficientsJson {
    pub fn to_coefficients(&self) -> Result<PureCoefficients, InputError> {
        PureCoefficients::standard(self.weight, &self.hodge).map_err(malformed)
    }
}

/// A cosimplicial row: the descent row of a sheaf on a simplicial space
/// with synthetic pure coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowJson {
    pub simplicial: SimplicialJson,
    pub sheaf: SheafJson,
    pub coefficients: CoefficientsJson,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    fn sample() -> TriFilteredComplex {
        let c = Complex::new(0, vec![2, 1], vec![Matrix::from_ints(1, 2, &[1, 1])]).unwrap();
        let f = Filtration::new(0, vec![Chain::new(2, 1, vec![Subspace::span(2, vec![vec![q(1), q(-1)]])]).unwrap(), Chain::trivial(1, 0)]);
        let w = Filtration::trivial(&c, 0);
        TriFilteredComplex::new(c, f.clone(), f, w).unwrap()
    }

    #[test]
    fn hodge_complex_round_trip() {
        let a = sample();
        let j = HodgeComplexJson::from_trifiltered(&a);
        let back = j.to_trifiltered().unwrap();
        assert!(back.same_as(&a));
        let b = InstanceBundle::new(Kind::HodgeComplex, Some(3), &j);
        let s = b.to_json();
        assert_eq!(InstanceBundle::from_json(&s).unwrap().to_json(), s);
    }

    #[test]
    fn increasing_orientation_reads_back() {
        let a = sample();
        let mut j = HodgeComplexJson::from_trifiltered(&a);
        let chains: Vec<Chain<Q>> = a.complex.degrees().map(|n| a.f.chain(n)).collect();
        j.f = FiltrationJson::from_chains(0, &chains, Orientation::Increasing);
        assert!(j.to_trifiltered().unwrap().same_as(&a));
    }

    #[test]
    fn d_squared_gives_witness() {
        let mut j = HodgeComplexJson::from_trifiltered(&sample());
        j.complex = ComplexJson {
            range: [0, 2],
            dims: vec![1, 1, 1],
            differentials: vec![MatrixJson::from_matrix(&Matrix::identity(1)), MatrixJson::from_matrix(&Matrix::identity(1))],
        };
        match j.complex.to_complex() {
            Err(InputError::Check(c)) => assert_eq!((c.degree, c.witness), (0, vec!["1/1".to_string()])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(InstanceBundle::from_json("{"), Err(InputError::Malformed(_))));
        let m = MatrixJson { rows: 1, cols: 2, entries: vec![vec!["1".into()]] };
        assert!(matches!(m.to_matrix(), Err(InputError::Malformed(_))));
        let mut j = HodgeComplexJson::from_trifiltered(&sample());
        j.w.jumps.insert(0, vec![JumpJson { index: 0, basis: vec![vec!["1".into(), "0".into()]] }]);
        assert!(matches!(j.to_trifiltered(), Err(InputError::Malformed(_))));
    }

    #[test]
    fn poset_and_sheaf_round_trip() {
        let c = FinitePoset::circle();
        let pj = PosetJson::from_poset(&c);
        assert_eq!(pj.to_poset().unwrap(), c);
        let f = PosetSheaf::constant(&c, 2);
        let sj = SheafJson::from_sheaf(&f, Some(&Stratification::trivial(&c)));
        assert_eq!(sj.to_sheaf().unwrap(), f);
        assert!(sj.to_stratification().unwrap().is_some());
    }
}
