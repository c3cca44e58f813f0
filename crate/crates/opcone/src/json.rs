//! JSON forms of the value types.
//!
//! Complex numbers are `[re, im]`; a bare number is read as a real value, and
//! vectors with zero imaginary parts are written in that short form.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{ChannelMap, HSElement};
use crate::function::{CompactKind, CompactSpace, L2Element, Measure};
use crate::hilbert::{HVector, StatePoint, UnitalSpace};
use crate::linalg::{CMat, CVec, C64};
use crate::matrix::{CertTerm, HMatrix, Kind, MaxCertificate, MembershipVerdict, Witness};
use crate::states::UnitalMeasure;
use crate::supports::{MapK, MapOnX, SepTerm, SeparableDecomposition, SupportOnX};

/// A type with a JSON form.
pub trait JsonForm: Sized {
    type Dto: Serialize + DeserializeOwned;
    fn to_dto(&self) -> Self::Dto;
    fn from_dto(dto: Self::Dto) -> Result<Self>;
}

pub fn to_value<T: JsonForm>(x: &T) -> serde_json::Value {
    serde_json::to_value(x.to_dto()).expect("dto serializes")
}

pub fn to_string<T: JsonForm>(x: &T, pretty: bool) -> String {
    let dto = x.to_dto();
    if pretty {
        serde_json::to_string_pretty(&dto)
    } else {
        serde_json::to_string(&dto)
    }
    .expect("dto serializes")
}

pub fn from_str<T: JsonForm>(s: &str) -> Result<T> {
    let dto: T::Dto = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    T::from_dto(dto)
}

pub fn from_value<T: JsonForm>(v: serde_json::Value) -> Result<T> {
    let dto: T::Dto = serde_json::from_value(v).map_err(|e| Error::Json(e.to_string()))?;
    T::from_dto(dto)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Num {
    Real(f64),
    Complex([f64; 2]),
}

impl Num {
    fn value(self) -> C64 {
        match self {
            Num::Real(x) => C64::new(x, 0.0),
            Num::Complex([a, b]) => C64::new(a, b),
        }
    }
}

fn nums(v: &[C64]) -> Vec<Num> {
    if v.iter().all(|z| z.im == 0.0) {
        v.iter().map(|z| Num::Real(z.re)).collect()
    } else {
        v.iter().map(|z| Num::Complex([z.re, z.im])).collect()
    }
}

fn complexes(v: &[Num]) -> Vec<C64> {
    v.iter().map(|x| x.value()).collect()
}

pub type MatrixDto = Vec<Vec<Num>>;

impl JsonForm for CMat {
    type Dto = MatrixDto;
    fn to_dto(&self) -> MatrixDto {
        (0..self.nrows()).map(|i| nums(&self.row(i).iter().copied().collect::<Vec<_>>())).collect()
    }
    fn from_dto(d: MatrixDto) -> Result<Self> {
        let r = d.len();
        let cols = d.first().map_or(0, |row| row.len());
        if d.iter().any(|row| row.len() != cols) {
            return Err(Error::Json("ragged matrix".into()));
        }
        Ok(CMat::from_fn(r, cols, |i, j| d[i][j].value()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceDto {
    pub dim: usize,
    #[serde(default)]
    pub unit: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl JsonForm for Arc<UnitalSpace> {
    type Dto = SpaceDto;
    fn to_dto(&self) -> SpaceDto {
        SpaceDto { dim: self.dim(), unit: self.unit_index(), labels: Some(self.labels().to_vec()) }
    }
    fn from_dto(d: SpaceDto) -> Result<Self> {
        match d.labels {
            Some(l) if l.len() != d.dim => Err(Error::Json(format!("{} labels for dim {}", l.len(), d.dim))),
            Some(l) => UnitalSpace::new(l, d.unit),
            None if d.dim == 0 => Err(Error::InvalidSpace("dimension must be at least 1".into())),
            None if d.unit == 0 => Ok(UnitalSpace::standard(d.dim)),
            None => UnitalSpace::new((0..d.dim).map(|i| format!("b{i}")).collect(), d.unit),
        }
    }
}

fn space_of(d: SpaceDto) -> Result<Arc<UnitalSpace>> {
    <Arc<UnitalSpace>>::from_dto(d)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorDto {
    pub space: SpaceDto,
    pub coords: Vec<Num>,
}

impl JsonForm for HVector {
    type Dto = VectorDto;
    fn to_dto(&self) -> VectorDto {
        VectorDto { space: self.space().to_dto(), coords: nums(self.coords()) }
    }
    fn from_dto(d: VectorDto) -> Result<Self> {
        HVector::new(&space_of(d.space)?, complexes(&d.coords))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HMatrixDto {
    pub space: SpaceDto,
    pub n: usize,
    /// `entries[i][j]` holds the coordinates of `ζ_ij`.
    pub entries: Vec<Vec<Vec<Num>>>,
}

impl JsonForm for HMatrix {
    type Dto = HMatrixDto;
    fn to_dto(&self) -> HMatrixDto {
        let entries = self
            .entries()
            .iter()
            .map(|row| row.iter().map(|v| nums(v.coords())).collect())
            .collect();
        HMatrixDto { space: self.space().to_dto(), n: self.n(), entries }
    }
    fn from_dto(d: HMatrixDto) -> Result<Self> {
        let space = space_of(d.space)?;
        if d.entries.len() != d.n || d.entries.iter().any(|r| r.len() != d.n) {
            return Err(Error::Json(format!("entries must be {0}×{0}", d.n)));
        }
        let entries = d
            .entries
            .iter()
            .map(|row| row.iter().map(|c| HVector::new(&space, complexes(c))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        HMatrix::from_entries(&space, &entries)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermDto {
    pub a: MatrixDto,
    pub s: Vec<Num>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceDto>,
    pub terms: Vec<TermDto>,
    pub residual: f64,
}

impl JsonForm for MaxCertificate {
    type Dto = CertificateDto;
    fn to_dto(&self) -> CertificateDto {
        CertificateDto {
            space: self.terms.first().map(|t| t.s.space().to_dto()),
            terms: self.terms.iter().map(|t| TermDto { a: t.a.to_dto(), s: nums(t.s.coords()) }).collect(),
            residual: self.residual_bound,
        }
    }
    fn from_dto(d: CertificateDto) -> Result<Self> {
        let space = d.space.map(space_of).transpose()?;
        let terms = d
            .terms
            .into_iter()
            .map(|t| {
                let sp = space.as_ref().ok_or_else(|| Error::Json("certificate terms need a space".into()))?;
                Ok(CertTerm { a: CMat::from_dto(t.a)?, s: HVector::new(sp, complexes(&t.s))? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MaxCertificate { terms, residual_bound: d.residual })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessDto {
    Direction(Vec<Num>),
    Compression(MatrixDto),
    Dual(HMatrixDto),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictDto {
    pub kind: String,
    pub margin: f64,
    #[serde(default)]
    pub evaluated: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDto>,
}

pub fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Member => "member",
        Kind::NonMember => "non_member",
        Kind::Undecided => "undecided",
    }
}

impl JsonForm for MembershipVerdict {
    type Dto = VerdictDto;
    fn to_dto(&self) -> VerdictDto {
        VerdictDto {
            kind: kind_name(self.kind).to_string(),
            margin: self.margin,
            evaluated: self.evaluated,
            certificate: self.certificate.as_ref().map(|c| c.to_dto()),
            witness: self.witness.as_ref().map(|w| match w {
                Witness::Direction(b) => WitnessDto::Direction(nums(b.as_slice())),
                Witness::Compression(a) => WitnessDto::Compression(a.to_dto()),
                Witness::Dual(z) => WitnessDto::Dual(z.to_dto()),
            }),
        }
    }
    fn from_dto(d: VerdictDto) -> Result<Self> {
        let kind = match d.kind.as_str() {
            "member" => Kind::Member,
            "non_member" => Kind::NonMember,
            "undecided" => Kind::Undecided,
            other => return Err(Error::Json(format!("unknown verdict kind {other:?}"))),
        };
        let witness = match d.witness {
            None => None,
            Some(WitnessDto::Direction(b)) => Some(Witness::Direction(CVec::from_vec(complexes(&b)))),
            Some(WitnessDto::Compression(a)) => Some(Witness::Compression(CMat::from_dto(a)?)),
            Some(WitnessDto::Dual(z)) => Some(Witness::Dual(HMatrix::from_dto(z)?)),
        };
        Ok(MembershipVerdict {
            kind,
            certificate: d.certificate.map(MaxCertificate::from_dto).transpose()?,
            witness,
            margin: d.margin,
            evaluated: d.evaluated,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CompactDto {
    Atoms {
        points: Vec<String>,
    },
    Interval {
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        breakpoints: Option<Vec<f64>>,
        /// Panel edges; when present they fix the grid exactly.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<Vec<f64>>,
    },
}

impl JsonForm for Arc<CompactSpace> {
    type Dto = CompactDto;
    fn to_dto(&self) -> CompactDto {
        match self.kind() {
            CompactKind::Atoms { labels } => CompactDto::Atoms { points: labels.clone() },
            CompactKind::Interval { a, b, edges } => CompactDto::Interval {
                a: *a,
                b: *b,
                nodes: Some(self.len()),
                breakpoints: None,
                edges: Some(edges.clone()),
            },
        }
    }
    fn from_dto(d: CompactDto) -> Result<Self> {
        match d {
            CompactDto::Atoms { points } => CompactSpace::labeled_atoms(points),
            CompactDto::Interval { a, b, nodes, breakpoints, edges } => match edges {
                Some(e) => {
                    if e.first() != Some(&a) || e.last() != Some(&b) {
                        return Err(Error::Json("edges must run from a to b".into()));
                    }
                    CompactSpace::interval_with_edges(e)
                }
                None => CompactSpace::interval_aligned(
                    a,
                    b,
                    nodes.unwrap_or(crate::function::DEFAULT_NODES),
                    &breakpoints.unwrap_or_default(),
                ),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<CompactDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<f64>>,
}

fn measure_dto(m: &Measure, with_space: bool) -> MeasureDto {
    let vals = Some(m.density_values().to_vec());
    let atomic = m.space().is_atomic();
    MeasureDto {
        space: with_space.then(|| m.space().to_dto()),
        weights: if atomic { vals.clone() } else { None },
        density: if atomic { None } else { vals },
    }
}

fn measure_on(d: MeasureDto, space: Option<&Arc<CompactSpace>>) -> Result<Measure> {
    let space = match (d.space, space) {
        (Some(s), _) => <Arc<CompactSpace>>::from_dto(s)?,
        (None, Some(s)) => s.clone(),
        (None, None) => {
            let n = d.weights.as_ref().ok_or_else(|| Error::Json("measure without space needs weights".into()))?.len();
            CompactSpace::atoms(n)
        }
    };
    match (d.weights, d.density) {
        (Some(w), None) => Measure::atomic(&space, w),
        (None, Some(v)) => Measure::density(&space, v),
        _ => Err(Error::Json("give exactly one of weights or density".into())),
    }
}

impl JsonForm for Measure {
    type Dto = MeasureDto;
    fn to_dto(&self) -> MeasureDto {
        measure_dto(self, true)
    }
    fn from_dto(d: MeasureDto) -> Result<Self> {
        measure_on(d, None)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct L2Dto {
    pub measure: MeasureDto,
    pub values: Vec<Num>,
}

impl JsonForm for L2Element {
    type Dto = L2Dto;
    fn to_dto(&self) -> L2Dto {
        L2Dto { measure: self.measure().to_dto(), values: nums(self.values()) }
    }
    fn from_dto(d: L2Dto) -> Result<Self> {
        L2Element::new(&Arc::new(Measure::from_dto(d.measure)?), complexes(&d.values))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupportDto {
    pub h: SpaceDto,
    pub mu: MeasureDto,
    /// `k_f` by label of `f`.
    pub k: BTreeMap<String, Vec<f64>>,
}

impl JsonForm for SupportOnX {
    type Dto = SupportDto;
    fn to_dto(&self) -> SupportDto {
        let k = self.h().labels().iter().cloned().zip(self.functions().iter().cloned()).collect();
        SupportDto { h: self.h().to_dto(), mu: self.measure().to_dto(), k }
    }
    fn from_dto(mut d: SupportDto) -> Result<Self> {
        let h = space_of(d.h)?;
        let mu = Arc::new(Measure::from_dto(d.mu)?);
        let mut k = Vec::with_capacity(h.dim());
        for (i, l) in h.labels().iter().enumerate() {
            match d.k.remove(l) {
                Some(v) => k.push(v),
                None if i == h.unit_index() => k.push(vec![1.0; mu.space().len()]),
                None => return Err(Error::Json(format!("missing k for {l:?}"))),
            }
        }
        if let Some(extra) = d.k.keys().next() {
            return Err(Error::Json(format!("unknown label {extra:?} in k")));
        }
        SupportOnX::new(&h, &mu, k)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SepTermDto {
    pub p: Vec<Num>,
    pub q: MeasureDto,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionDto {
    pub h: SpaceDto,
    pub x: CompactDto,
    pub terms: Vec<SepTermDto>,
    pub q0: MeasureDto,
}

fn dense(sparse: &[(usize, f64)], n: usize) -> MeasureDto {
    let mut w = vec![0.0; n];
    for &(t, m) in sparse {
        w[t] += m;
    }
    MeasureDto { space: None, weights: Some(w), density: None }
}

fn sparse(d: MeasureDto, n: usize) -> Result<Vec<(usize, f64)>> {
    let w = d.weights.ok_or_else(|| Error::Json("point masses need weights".into()))?;
    if w.len() != n {
        return Err(Error::Json(format!("{} weights for {n} points", w.len())));
    }
    Ok(w.into_iter().enumerate().filter(|(_, m)| *m != 0.0).collect())
}

impl JsonForm for SeparableDecomposition {
    type Dto = DecompositionDto;
    fn to_dto(&self) -> DecompositionDto {
        let n = self.x.len();
        DecompositionDto {
            h: self.h.to_dto(),
            x: self.x.to_dto(),
            terms: self.terms.iter().map(|t| SepTermDto { p: nums(t.p.coords()), q: dense(&t.q, n) }).collect(),
            q0: dense(&self.q0, n),
        }
    }
    fn from_dto(d: DecompositionDto) -> Result<Self> {
        let h = space_of(d.h)?;
        let x = <Arc<CompactSpace>>::from_dto(d.x)?;
        let n = x.len();
        let terms = d
            .terms
            .into_iter()
            .map(|t| Ok(SepTerm { p: HVector::new(&h, complexes(&t.p))?, q: sparse(t.q, n)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeparableDecomposition { h, x, terms, q0: sparse(d.q0, n)? })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapOnXDto {
    pub h: SpaceDto,
    pub x: CompactDto,
    /// `T(δ̂_t)` for each point.
    pub columns: Vec<Vec<Num>>,
}

impl JsonForm for MapOnX {
    type Dto = MapOnXDto;
    fn to_dto(&self) -> MapOnXDto {
        MapOnXDto {
            h: self.h().to_dto(),
            x: self.x().to_dto(),
            columns: self.columns().iter().map(|c| nums(c.coords())).collect(),
        }
    }
    fn from_dto(d: MapOnXDto) -> Result<Self> {
        let h = space_of(d.h)?;
        let x = <Arc<CompactSpace>>::from_dto(d.x)?;
        let cols = d.columns.iter().map(|c| HVector::new(&h, complexes(c))).collect::<Result<Vec<_>>>()?;
        MapOnX::new(&h, &x, cols)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapKDto {
    pub from: SpaceDto,
    pub to: SpaceDto,
    pub matrix: MatrixDto,
}

impl JsonForm for MapK {
    type Dto = MapKDto;
    fn to_dto(&self) -> MapKDto {
        MapKDto { from: self.from.to_dto(), to: self.to.to_dto(), matrix: self.matrix.to_dto() }
    }
    fn from_dto(d: MapKDto) -> Result<Self> {
        MapK::new(&space_of(d.from)?, &space_of(d.to)?, CMat::from_dto(d.matrix)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomDto {
    pub s0: Vec<f64>,
    pub c: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitalMeasureDto {
    pub space: SpaceDto,
    pub atoms: Vec<AtomDto>,
}

impl JsonForm for UnitalMeasure {
    type Dto = UnitalMeasureDto;
    fn to_dto(&self) -> UnitalMeasureDto {
        UnitalMeasureDto {
            space: self.space().to_dto(),
            atoms: self
                .atoms()
                .iter()
                .zip(self.weights())
                .map(|(s, &c)| AtomDto { s0: s.s0_coords().to_vec(), c })
                .collect(),
        }
    }
    fn from_dto(d: UnitalMeasureDto) -> Result<Self> {
        let space = space_of(d.space)?;
        let mut pts = Vec::with_capacity(d.atoms.len());
        let mut ws = Vec::with_capacity(d.atoms.len());
        for a in d.atoms {
            pts.push(StatePoint::from_real(&space, &a.s0, crate::hilbert::EPS)?);
            ws.push(a.c);
        }
        UnitalMeasure::new(&space, pts, ws, crate::hilbert::EPS)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HSDto {
    pub matrix: MatrixDto,
}

impl JsonForm for HSElement {
    type Dto = HSDto;
    fn to_dto(&self) -> HSDto {
        HSDto { matrix: self.matrix.to_dto() }
    }
    fn from_dto(d: HSDto) -> Result<Self> {
        HSElement::new(CMat::from_dto(d.matrix)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelDto {
    pub space: SpaceDto,
    /// `φ(f)` for each basis vector, in basis order.
    pub phi: Vec<MatrixDto>,
}

impl JsonForm for ChannelMap {
    type Dto = ChannelDto;
    fn to_dto(&self) -> ChannelDto {
        ChannelDto { space: self.space.to_dto(), phi: self.phi.iter().map(|m| m.to_dto()).collect() }
    }
    fn from_dto(d: ChannelDto) -> Result<Self> {
        let space = space_of(d.space)?;
        let phi = d.phi.into_iter().map(CMat::from_dto).collect::<Result<Vec<_>>>()?;
        if phi.len() != space.dim() {
            return Err(Error::Json(format!("{} images for dim {}", phi.len(), space.dim())));
        }
        Ok(ChannelMap { space, phi })
    }
}
