//! Builders for every module family: Verma and simple modules, the
//! indecomposable projectives, and the string/band families of Loewy length 2.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::{parse_scalar_literal, CycScalar, CycloError, ScalarRepr};
use crate::datum::{DatumError, GroupDatum, Weight};
use crate::homology::{self, HomologyError};
use crate::linalg::{Matrix, Vector};
use crate::repmod::{ModuleError, ModuleRep};

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("{family} needs {needs}, but the datum has m = {m}")]
    WrongM {
        family: &'static str,
        needs: &'static str,
        m: u64,
    },
    #[error("eta must be a nonzero scalar for {0}")]
    BadEta(&'static str),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Scalar(#[from] CycloError),
}

/// Band parameter: a scalar or the extra point `∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EtaParam {
    Finite(CycScalar),
    Infinity,
}

impl EtaParam {
    pub fn finite(c: CycScalar) -> Self {
        EtaParam::Finite(c)
    }

    pub fn from_int(v: i64) -> Self {
        EtaParam::Finite(CycScalar::from_int(v))
    }

    /// `-η`, with `-∞ = ∞`.
    pub fn negated(&self) -> Self {
        match self {
            EtaParam::Finite(c) => EtaParam::Finite(-c),
            EtaParam::Infinity => EtaParam::Infinity,
        }
    }

    /// `"inf"` or a rational literal.
    pub fn parse(s: &str) -> Result<Self, CycloError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            Ok(EtaParam::Infinity)
        } else {
            Ok(EtaParam::Finite(parse_scalar_literal(t)?))
        }
    }
}

impl fmt::Display for EtaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtaParam::Finite(c) => write!(f, "{c}"),
            EtaParam::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EtaWire {
    Text(String),
    Scalar(ScalarRepr),
}

impl Serialize for EtaParam {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            EtaParam::Finite(c) => ScalarRepr::from(c).serialize(serializer),
            EtaParam::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for EtaParam {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match EtaWire::deserialize(deserializer)? {
            EtaWire::Text(s) => EtaParam::parse(&s).map_err(serde::de::Error::custom),
            EtaWire::Scalar(r) => CycScalar::try_from(r)
                .map(EtaParam::Finite)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Natural,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Z,
    V,
    P,
    T1,
    T1bar,
    Tt,
    Ttbar,
    M1,
    Mt,
    W1,
    Wt,
    OmegaPower,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for Family {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        const ALL: [Family; 12] = [
            Family::Z,
            Family::V,
            Family::P,
            Family::T1,
            Family::T1bar,
            Family::Tt,
            Family::Ttbar,
            Family::M1,
            Family::Mt,
            Family::W1,
            Family::Wt,
            Family::OmegaPower,
        ];
        ALL.into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<String> = ALL.iter().map(ToString::to_string).collect();
                ConstructError::Parameter(format!("unknown family {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// A family member with its parameters; the input of [`build`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyTag {
    pub family: Family,
    #[serde(default)]
    pub l: u64,
    pub lambda: Weight,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<EtaParam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisKind>,
}

impl FamilyTag {
    pub fn new(family: Family, l: u64, lambda: Weight) -> Self {
        FamilyTag {
            family,
            l,
            lambda,
            t: None,
            s: None,
            eta: None,
            basis: None,
        }
    }

    pub fn with_t(mut self, t: u64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_s(mut self, s: i64) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_eta(mut self, eta: EtaParam) -> Self {
        self.eta = Some(eta);
        self
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.family != Family::Z {
            parts.push(self.l.to_string());
        }
        parts.push(self.lambda.to_string());
        if let Some(t) = self.t {
            parts.push(format!("t={t}"));
        }
        if let Some(s) = self.s {
            parts.push(format!("s={s}"));
        }
        if let Some(eta) = &self.eta {
            parts.push(format!("eta={eta}"));
        }
        write!(f, "{}({})", self.family, parts.join(", "))
    }
}

/// Builds the module named by a tag.
pub fn build(d: &Arc<GroupDatum>, tag: &FamilyTag) -> Result<ModuleRep, ConstructError> {
    let need_t = || tag.t.ok_or_else(|| ConstructError::Parameter(format!("{} needs t", tag.family)));
    let need_eta = || {
        tag.eta
            .clone()
            .ok_or_else(|| ConstructError::Parameter(format!("{} needs eta", tag.family)))
    };
    let (l, w) = (tag.l, &tag.lambda);
    match tag.family {
        Family::Z => verma(d, w),
        Family::V => simple(d, l, w, tag.basis.unwrap_or(BasisKind::Standard)),
        Family::P => projective(d, l, w),
        Family::T1 => t1(d, l, w),
        Family::T1bar => t1bar(d, l, w),
        Family::Tt => string_tt(d, l, w, need_t()?),
        Family::Ttbar => string_ttbar(d, l, w, need_t()?),
        Family::M1 => match need_eta()? {
            EtaParam::Finite(eta) => band_m1(d, l, w, &eta),
            EtaParam::Infinity => Err(ConstructError::BadEta("M1")),
        },
        Family::Mt => match need_eta()? {
            EtaParam::Finite(eta) => band_mt(d, l, w, &eta, need_t()?),
            EtaParam::Infinity => Err(ConstructError::BadEta("Mt")),
        },
        Family::W1 => w1(d, l, w, &need_eta()?),
        Family::Wt => w_t(d, l, w, &need_eta()?, need_t()?),
        Family::OmegaPower => {
            let s = tag
                .s
                .ok_or_else(|| ConstructError::Parameter("OmegaPower needs s".into()))?;
            omega_power(d, l, w, s)
        }
    }
}

/// Action table on a basis of weight vectors.
struct Table {
    labels: Vec<String>,
    weights: Vec<Weight>,
    x: Matrix,
    xi: Matrix,
}

impl Table {
    fn new(labels: Vec<String>, weights: Vec<Weight>) -> Self {
        let dim = labels.len();
        Table {
            labels,
            weights,
            x: Matrix::zeros(dim, dim),
            xi: Matrix::zeros(dim, dim),
        }
    }

    /// `x · e_from += c · e_to`.
    fn x(&mut self, from: usize, to: usize, c: CycScalar) {
        self.x.add_to(to, from, &c);
    }

    fn xi(&mut self, from: usize, to: usize, c: CycScalar) {
        self.xi.add_to(to, from, &c);
    }

    fn build(self, d: &Arc<GroupDatum>) -> Result<ModuleRep, ModuleError> {
        ModuleRep::from_weight_basis(d.clone(), self.labels, &self.weights, self.x, self.xi)
    }

    fn build_unchecked(self, d: &Arc<GroupDatum>) -> Result<ModuleRep, ModuleError> {
        ModuleRep::from_weight_basis_unchecked(d.clone(), self.labels, &self.weights, self.x, self.xi)
    }
}

fn check_proper(d: &GroupDatum, l: u64, w: &Weight) -> Result<(), ConstructError> {
    if l == 0 || l >= d.n() {
        return Err(ConstructError::Parameter(format!(
            "l = {l} outside 1..={}",
            d.n() - 1
        )));
    }
    d.require_class(w, l)?;
    Ok(())
}

fn one() -> CycScalar {
    CycScalar::one()
}

/// `Z(λ)` on the basis `v_i = x^i 1_λ`.
pub fn verma(d: &Arc<GroupDatum>, w: &Weight) -> Result<ModuleRep, ConstructError> {
    d.check_weight(w)?;
    let n = d.n() as usize;
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let weights = (0..n).map(|i| d.shift(w, i as i64)).collect();
    let mut t = Table::new(labels, weights);
    for i in 0..n - 1 {
        t.x(i, i + 1, one());
    }
    let wrap = d.alpha() * &(&d.at_a(w).pow(n as i64)? - &one());
    t.x(n - 1, 0, wrap);
    for i in 1..n {
        t.xi(i, i - 1, d.alpha_raw(i as i64, w));
    }
    Ok(t.build(d)?)
}

/// `V(l, λ)` in the natural basis `v_i` or the standard basis `m_i`.
pub fn simple(d: &Arc<GroupDatum>, l: u64, w: &Weight, basis: BasisKind) -> Result<ModuleRep, ConstructError> {
    if l == 0 || l > d.n() {
        return Err(ConstructError::Parameter(format!("l = {l} outside 1..={}", d.n())));
    }
    d.require_class(w, l)?;
    let natural = simple_table(d, l, w, BasisKind::Natural)?.build(d)?;
    if basis == BasisKind::Natural {
        return Ok(natural);
    }
    let standard = simple_table(d, l, w, BasisKind::Standard)?.build(d)?;
    debug_assert!({
        let change = Matrix::diagonal(&standard_scales(d, l, w));
        let moved = natural.change_basis(&change)?;
        moved.x() == standard.x() && moved.xi() == standard.xi()
    });
    Ok(standard)
}

/// `c_i = α_{i+1} ⋯ α_{l-1}`, so that `m_i = c_i v_i`.
fn standard_scales(d: &GroupDatum, l: u64, w: &Weight) -> Vec<CycScalar> {
    let l = l as usize;
    let mut out = vec![one(); l];
    for i in (0..l.saturating_sub(1)).rev() {
        out[i] = &out[i + 1] * &d.alpha_raw(i as i64 + 1, w);
    }
    out
}

fn simple_table(d: &GroupDatum, l: u64, w: &Weight, basis: BasisKind) -> Result<Table, ConstructError> {
    let l = l as usize;
    let n = d.n() as usize;
    let name = if basis == BasisKind::Natural { "v" } else { "m" };
    let labels = (0..l).map(|i| format!("{name}{i}")).collect();
    let weights = (0..l).map(|i| d.shift(w, i as i64)).collect();
    let mut t = Table::new(labels, weights);
    let wrap = d.alpha() * &(&d.at_a(w).pow(n as i64)? - &one());
    match basis {
        BasisKind::Natural => {
            for i in 0..l.saturating_sub(1) {
                t.x(i, i + 1, one());
            }
            for i in 1..l {
                t.xi(i, i - 1, d.alpha_raw(i as i64, w));
            }
            if l == n {
                t.x(n - 1, 0, wrap);
            }
        }
        BasisKind::Standard => {
            for i in 0..l.saturating_sub(1) {
                t.x(i, i + 1, d.alpha_raw(i as i64 + 1, w));
            }
            for i in 1..l {
                t.xi(i, i - 1, one());
            }
            if l == n {
                let beta = d.beta_coeff(l as u64, w)?;
                t.x(n - 1, 0, wrap.checked_div(&beta)?);
            }
        }
    }
    Ok(t)
}

/// How the corner entry `x v_{n-1}` of the non-nilpotent projective is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CornerReading {
    /// `y_{l,λ} v_0 + u_l` and `x u_{n-1} = z_{l,λ} u_0`.
    Pattern,
    /// `y_{n-1,λ} v_0 + u_{n-1}` and `x u_{n-1} = z_{n-1,λ} u_0`.
    Literal,
}

/// `P(l, λ)` on the standard basis `v_0..v_{n-1}, u_0..u_{n-1}`.
pub fn projective(d: &Arc<GroupDatum>, l: u64, w: &Weight) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    Ok(projective_table(d, l, w, CornerReading::Pattern)?.build(d)?)
}

/// The non-nilpotent projective table with the corner subscripts taken
/// literally. Does not satisfy the relations in general; kept as a negative
/// control for the relation checker.
pub fn projective_literal_corner(d: &Arc<GroupDatum>, l: u64, w: &Weight) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    if d.is_nilpotent() {
        return Err(DatumError::Unsupported {
            kind: d.kind(),
            op: "literal corner reading",
        }
        .into());
    }
    Ok(projective_table(d, l, w, CornerReading::Literal)?.build_unchecked(d)?)
}

fn projective_table(d: &GroupDatum, l: u64, w: &Weight, reading: CornerReading) -> Result<Table, ConstructError> {
    let n = d.n() as usize;
    let l = l as usize;
    let (ni, li) = (n as i64, l as i64);
    let v = |i: usize| i;
    let u = |i: usize| n + i;
    let labels = (0..n)
        .map(|i| format!("v{i}"))
        .chain((0..n).map(|i| format!("u{i}")))
        .collect();
    let sig = d.sigma(w);
    let sig_inv = d.sigma_inv(w);
    let a = |i: usize, mu: &Weight| d.alpha_raw(i as i64, mu);
    if d.is_nilpotent() {
        let weights = (0..ni)
            .map(|i| d.shift(w, i))
            .chain((0..ni).map(|i| d.shift(w, i - ni + li)))
            .collect();
        let mut t = Table::new(labels, weights);
        for i in 0..n - 1 {
            t.x(v(i), v(i + 1), one());
            t.x(u(i), u(i + 1), one());
        }
        t.xi(v(0), u(n - l - 1), one());
        for i in 1..l {
            t.xi(v(i), v(i - 1), a(i, w));
            t.xi(v(i), u(n - l + i - 1), one());
        }
        t.xi(v(l), u(n - 1), one());
        for i in l + 1..n {
            t.xi(v(i), v(i - 1), a(i - l, &sig));
        }
        for i in 1..n - l {
            t.xi(u(i), u(i - 1), a(i, &sig_inv));
        }
        for i in n - l + 1..n {
            t.xi(u(i), u(i - 1), a(i + l - n, w));
        }
        Ok(t)
    } else {
        let weights = (0..ni)
            .map(|i| d.shift(w, i - ni + li))
            .chain((0..ni).map(|i| d.shift(w, i)))
            .collect();
        let mut t = Table::new(labels, weights);
        let (corner_l, corner_u) = match reading {
            CornerReading::Pattern => (l, l),
            CornerReading::Literal => (n - 1, n - 1),
        };
        let (y, z) = d.yz_raw(corner_l as u64, w);
        for i in 0..(n - l).saturating_sub(1) {
            t.x(v(i), v(i + 1), a(i + 1, &sig_inv));
        }
        t.x(v(n - l - 1), u(0), one());
        for i in n - l..n - 1 {
            t.x(v(i), v(i + 1), a(i + 1 + l - n, w));
            t.x(v(i), u(i + 1 + l - n), one());
        }
        t.x(v(n - 1), v(0), y);
        t.x(v(n - 1), u(corner_u), one());
        for i in 0..l - 1 {
            t.x(u(i), u(i + 1), a(i + 1, w));
        }
        for i in l..n - 1 {
            t.x(u(i), u(i + 1), a(i + 1 - l, &sig));
        }
        t.x(u(n - 1), u(0), z);
        for i in 1..n {
            t.xi(v(i), v(i - 1), one());
            t.xi(u(i), u(i - 1), one());
        }
        Ok(t)
    }
}

/// Restriction of `P(l, λ)` to the span of the listed standard basis vectors.
fn projective_span(d: &Arc<GroupDatum>, l: u64, w: &Weight, idx: &[usize]) -> Result<ModuleRep, ConstructError> {
    let p = projective(d, l, w)?;
    let inc = Matrix::identity(p.dim()).select_cols(idx);
    Ok(p.restrict(&inc)?)
}

/// Segments of `P(l, λ)` used to glue string and band modules: the socle
/// `S`, the top segment `A` and the bottom segment `B`, each listed in the
/// order of the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Seg {
    Soc,
    Top,
    Bottom,
}

fn seg_len(d: &GroupDatum, l: usize, seg: Seg) -> usize {
    match seg {
        Seg::Soc => l,
        _ => d.n() as usize - l,
    }
}

/// Standard-basis index of the p-th vector of a segment.
fn seg_index(d: &GroupDatum, l: usize, seg: Seg, p: usize) -> usize {
    let n = d.n() as usize;
    match (d.is_nilpotent(), seg) {
        (true, Seg::Soc) => 2 * n - l + p,
        (true, Seg::Top) => l + p,
        (true, Seg::Bottom) => n + p,
        (false, Seg::Soc) => n + p,
        (false, Seg::Top) => n + l + p,
        (false, Seg::Bottom) => p,
    }
}

fn seg_indices(d: &GroupDatum, l: usize, seg: Seg) -> Vec<usize> {
    (0..seg_len(d, l, seg)).map(|p| seg_index(d, l, seg, p)).collect()
}

/// `T_1(l, λ)`: socle plus top segment of `P(l, λ)`.
pub fn t1(d: &Arc<GroupDatum>, l: u64, w: &Weight) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    let mut idx = seg_indices(d, l as usize, Seg::Top);
    idx.extend(seg_indices(d, l as usize, Seg::Soc));
    idx.sort_unstable();
    projective_span(d, l, w, &idx)
}

/// `T̄_1(l, λ)`: socle plus bottom segment of `P(l, λ)`.
pub fn t1bar(d: &Arc<GroupDatum>, l: u64, w: &Weight) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    let mut idx = seg_indices(d, l as usize, Seg::Bottom);
    idx.extend(seg_indices(d, l as usize, Seg::Soc));
    idx.sort_unstable();
    projective_span(d, l, w, &idx)
}

/// `W_1(l, λ, η)` inside `P(l, λ)`; needs `m = 1`.
pub fn w1(d: &Arc<GroupDatum>, l: u64, w: &Weight, eta: &EtaParam) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    require_m_one(d, "W1")?;
    let p = projective(d, l, w)?;
    let (n, lu) = (d.n() as usize, l as usize);
    let mut cols: Vec<Vector> = Vec::new();
    let unit = |i: usize| {
        let mut e = crate::linalg::zero_vector(2 * n);
        e[i] = one();
        e
    };
    match eta {
        EtaParam::Finite(c) => {
            for j in 0..n - lu {
                let mut e = unit(n + j);
                e[j + lu] = c.clone();
                cols.push(e);
            }
        }
        EtaParam::Infinity => cols.extend((lu..n).map(unit)),
    }
    cols.extend((2 * n - lu..2 * n).map(unit));
    Ok(p.restrict(&Matrix::from_columns(2 * n, &cols))?)
}

fn require_m_one(d: &GroupDatum, family: &'static str) -> Result<(), ConstructError> {
    if d.m() != 1 {
        return Err(ConstructError::WrongM {
            family,
            needs: "m = 1",
            m: d.m(),
        });
    }
    Ok(())
}

fn require_band(d: &GroupDatum, family: &'static str, eta: &CycScalar) -> Result<(), ConstructError> {
    if d.m() < 2 {
        return Err(ConstructError::WrongM {
            family,
            needs: "m > 1",
            m: d.m(),
        });
    }
    if eta.is_zero() {
        return Err(ConstructError::BadEta(family));
    }
    Ok(())
}

/// `M_1(l, λ, η)` on the basis `x_j^k`, `(k, j)`-lexicographic.
pub fn band_m1(d: &Arc<GroupDatum>, l: u64, w: &Weight, eta: &CycScalar) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    require_band(d, "M1", eta)?;
    let (n, m, lu) = (d.n() as usize, d.m() as usize, l as usize);
    let idx = |j: usize, k: usize| k * n + j;
    let mut labels = Vec::with_capacity(n * m);
    let mut weights = Vec::with_capacity(n * m);
    for k in 0..m {
        let wk = d.tau(w, k as i64);
        for j in 0..n {
            labels.push(format!("x{j}^{k}"));
            let e = if !d.is_nilpotent() {
                j as i64
            } else if j < n - lu {
                (j + lu) as i64
            } else {
                j as i64 - n as i64 + l as i64
            };
            weights.push(d.shift(&wk, e));
        }
    }
    let mut t = Table::new(labels, weights);
    let sig = d.sigma(w);
    let a = |i: usize, mu: &Weight| d.alpha_raw(i as i64, mu);
    let closing = |k: usize| if k + 1 < m { (k + 1, one()) } else { (0, eta.clone()) };
    for k in 0..m {
        if d.is_nilpotent() {
            for j in 0..n - 1 {
                if j == n - lu - 1 {
                    let (k2, c) = closing(k);
                    t.x(idx(j, k), idx(n - lu, k2), c);
                } else {
                    t.x(idx(j, k), idx(j + 1, k), one());
                }
            }
            t.xi(idx(0, k), idx(n - 1, k), one());
            for j in 1..n - lu {
                t.xi(idx(j, k), idx(j - 1, k), a(j, &sig));
            }
            for j in n - lu + 1..n {
                t.xi(idx(j, k), idx(j - 1, k), a(j - n + lu, w));
            }
        } else {
            let (_, z) = d.yz_coeff(l, w)?;
            for j in 0..lu - 1 {
                t.x(idx(j, k), idx(j + 1, k), a(j + 1, w));
            }
            for j in lu..n - 1 {
                t.x(idx(j, k), idx(j + 1, k), a(j + 1 - lu, &sig));
            }
            let (k2, c) = closing(k);
            t.x(idx(n - 1, k), idx(0, k), z);
            t.x(idx(n - 1, k), idx(0, k2), c);
            for j in 1..n {
                t.xi(idx(j, k), idx(j - 1, k), one());
            }
        }
    }
    Ok(t.build(d)?)
}

/// One family of glued vectors: for each position `p` of the lead segment,
/// the vector `Σ c · (segment p of copy)`.
struct Glue {
    lead: (usize, Seg),
    terms: Vec<(usize, Seg, CycScalar)>,
}

impl Glue {
    fn single(copy: usize, seg: Seg) -> Self {
        Glue {
            lead: (copy, seg),
            terms: vec![(copy, seg, one())],
        }
    }

    fn plus(mut self, copy: usize, seg: Seg, c: CycScalar) -> Self {
        if !c.is_zero() {
            self.terms.push((copy, seg, c));
        }
        self
    }
}

/// Submodule of `⊕_c P(l, λ_c)` spanned by every socle and the glued
/// segments. Basis sorted by (lead copy, lead index).
fn glued_module(
    d: &Arc<GroupDatum>,
    l: u64,
    copies: &[Weight],
    glue: Vec<Glue>,
) -> Result<ModuleRep, ConstructError> {
    let lu = l as usize;
    let n = d.n() as usize;
    let parts = copies
        .iter()
        .map(|w| projective(d, l, w))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&ModuleRep> = parts.iter().collect();
    let sum = ModuleRep::direct_sum(&refs)?;
    let total = sum.dim();
    let base = |c: usize| 2 * n * c;
    let plabel = |i: usize| if i < n { format!("v{i}") } else { format!("u{}", i - n) };
    let mut all = glue;
    all.extend((0..copies.len()).map(|c| Glue::single(c, Seg::Soc)));
    let mut cols: Vec<((usize, usize), Vector, String)> = Vec::new();
    for g in &all {
        for p in 0..seg_len(d, lu, g.lead.1) {
            let mut e = crate::linalg::zero_vector(total);
            let mut names = Vec::new();
            for (c, seg, coef) in &g.terms {
                let i = seg_index(d, lu, *seg, p);
                e[base(*c) + i] = &e[base(*c) + i] + coef;
                let term = format!("{}^{c}", plabel(i));
                names.push(if coef.is_one() { term } else { format!("({coef})*{term}") });
            }
            let key = (g.lead.0, seg_index(d, lu, g.lead.1, p));
            cols.push((key, e, names.join("+")));
        }
    }
    cols.sort_by_key(|a| a.0);
    let labels = cols.iter().map(|c| c.2.clone()).collect();
    let vectors: Vec<Vector> = cols.into_iter().map(|c| c.1).collect();
    let inc = Matrix::from_columns(total, &vectors);
    Ok(sum.restrict(&inc)?.with_labels(labels)?)
}

/// `T_t(l, λ)`: open string on `t` copies with weights `τ^{c-t+1} λ`;
/// the last copy carries the free top segment.
pub fn string_tt(d: &Arc<GroupDatum>, l: u64, w: &Weight, t: u64) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    check_t(t)?;
    let t = t as usize;
    let copies: Vec<Weight> = (0..t).map(|c| d.tau(w, c as i64 - t as i64 + 1)).collect();
    let mut glue: Vec<Glue> = (0..t - 1)
        .map(|c| Glue::single(c, Seg::Top).plus(c + 1, Seg::Bottom, one()))
        .collect();
    glue.push(Glue::single(t - 1, Seg::Top));
    glued_module(d, l, &copies, glue)
}

/// `T̄_t(l, λ)`: open string on `t` copies with weights `τ^c λ`; the first
/// copy carries the free bottom segment.
pub fn string_ttbar(d: &Arc<GroupDatum>, l: u64, w: &Weight, t: u64) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    check_t(t)?;
    let t = t as usize;
    let copies: Vec<Weight> = (0..t).map(|c| d.tau(w, c as i64)).collect();
    let mut glue = vec![Glue::single(0, Seg::Bottom)];
    glue.extend((0..t - 1).map(|c| Glue::single(c, Seg::Top).plus(c + 1, Seg::Bottom, one())));
    glued_module(d, l, &copies, glue)
}

/// `M_t(l, λ, η)`: `t` stacked bands of `m` copies each; band `s` closes
/// through `η` onto itself and through `1` onto band `s-1` (a Jordan block).
pub fn band_mt(d: &Arc<GroupDatum>, l: u64, w: &Weight, eta: &CycScalar, t: u64) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    require_band(d, "Mt", eta)?;
    check_t(t)?;
    let (m, t) = (d.m() as usize, t as usize);
    let copies: Vec<Weight> = (0..t * m).map(|c| d.tau(w, (c % m) as i64)).collect();
    let mut glue = Vec::new();
    for s in 0..t {
        for k in 0..m {
            let c = s * m + k;
            let g = Glue::single(c, Seg::Top);
            glue.push(if k + 1 < m {
                g.plus(c + 1, Seg::Bottom, one())
            } else if s == 0 {
                g.plus(s * m, Seg::Bottom, eta.clone())
            } else {
                g.plus(s * m, Seg::Bottom, eta.clone())
                    .plus((s - 1) * m, Seg::Bottom, one())
            });
        }
    }
    glued_module(d, l, &copies, glue)
}

/// `W_t(l, λ, η)` for `m = 1`: `t` copies of `P(l, λ)` glued by a Jordan
/// block with eigenvalue `η`; for `η = ∞` the roles of the two segments swap.
pub fn w_t(d: &Arc<GroupDatum>, l: u64, w: &Weight, eta: &EtaParam, t: u64) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    require_m_one(d, "Wt")?;
    check_t(t)?;
    let t = t as usize;
    let copies = vec![w.clone(); t];
    let glue = (0..t)
        .map(|s| {
            let g = match eta {
                EtaParam::Finite(c) => Glue::single(s, Seg::Bottom).plus(s, Seg::Top, c.clone()),
                EtaParam::Infinity => Glue::single(s, Seg::Top),
            };
            match (eta, s) {
                (_, 0) => g,
                (EtaParam::Finite(_), _) => g.plus(s - 1, Seg::Top, one()),
                (EtaParam::Infinity, _) => g.plus(s - 1, Seg::Bottom, one()),
            }
        })
        .collect();
    glued_module(d, l, &copies, glue)
}

fn check_t(t: u64) -> Result<(), ConstructError> {
    if t == 0 {
        return Err(ConstructError::Parameter("t must be at least 1".into()));
    }
    Ok(())
}

/// `Ω^s V(l, λ)`: iterated syzygies for `s > 0`, cosyzygies for `s < 0`.
pub fn omega_power(d: &Arc<GroupDatum>, l: u64, w: &Weight, s: i64) -> Result<ModuleRep, ConstructError> {
    check_proper(d, l, w)?;
    let mut cur = simple(d, l, w, BasisKind::Standard)?;
    for _ in 0..s.unsigned_abs() {
        cur = if s > 0 {
            homology::syzygy(&cur)?.module
        } else {
            homology::cosyzygy(&cur)?.module
        };
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::samples::*;

    fn arc(d: GroupDatum) -> Arc<GroupDatum> {
        Arc::new(d)
    }

    fn all_data() -> Vec<Arc<GroupDatum>> {
        vec![
            arc(z2_nilpotent()),
            arc(z4_nilpotent()),
            arc(z4_non_nilpotent()),
            arc(z6_non_nilpotent()),
            arc(z3_nilpotent()),
        ]
    }

    #[test]
    fn verma_and_simples_satisfy_relations() {
        for d in all_data() {
            for c in d.enumerate_weights() {
                let z = verma(&d, &c.weight).unwrap();
                assert_eq!(z.dim() as u64, d.n());
                for basis in [BasisKind::Natural, BasisKind::Standard] {
                    let v = simple(&d, c.l, &c.weight, basis).unwrap();
                    assert_eq!(v.dim() as u64, c.l);
                    assert_eq!(v.xi_kernel().cols(), 1);
                }
                if c.l == d.n() {
                    let v = simple(&d, c.l, &c.weight, BasisKind::Natural).unwrap();
                    assert_eq!(v, z);
                }
            }
        }
    }

    #[test]
    fn simple_standard_basis_example() {
        let d = arc(z4_non_nilpotent());
        // λ(a) = i, λ(χ) = 1: class I'_2
        let w = d.weight(&[1], &[0]).unwrap();
        assert_eq!(d.class_of(&w), 2);
        let v = simple(&d, 2, &w, BasisKind::Standard).unwrap();
        let beta = d.beta_coeff(2, &w).unwrap();
        let expected = CycScalar::from_int(-2).checked_div(&beta).unwrap();
        assert_eq!(*v.x().get(0, 1), expected);
        assert!(!expected.is_zero());
    }

    #[test]
    fn wrong_class_is_rejected() {
        let d = arc(z4_nilpotent());
        let w = d.weight(&[1], &[0]).unwrap();
        assert!(matches!(
            simple(&d, 1, &w, BasisKind::Natural),
            Err(ConstructError::Datum(DatumError::WrongClass { .. }))
        ));
        assert!(projective(&d, 2, &w).is_err());
    }

    #[test]
    fn projectives_satisfy_relations() {
        for d in all_data() {
            let n = d.n();
            for l in 1..n {
                for w in d.weights_in_class(l) {
                    let p = projective(&d, l, &w).unwrap();
                    assert_eq!(p.dim() as u64, 2 * n);
                    assert!(p.weight_spaces().is_ok());
                    assert_eq!(p.x_kernel().cols(), 2);
                    assert_eq!(p.xi_kernel().cols(), 2);
                }
            }
        }
    }

    #[test]
    fn projective_kernels_match_tables() {
        let d = arc(z4_nilpotent());
        let w = d.weights_in_class(1)[0].clone();
        let p = projective(&d, 1, &w).unwrap();
        let n = 2;
        // ξ v_l = u_{n-1}
        assert!(p.xi().get(n + n - 1, 1).is_one());
        let xi_ker = p.xi_kernel();
        let span = Matrix::identity(4).select_cols(&[n, n + n - 1]);
        assert_eq!(Matrix::intersect_column_spaces(&xi_ker, &span).cols(), 2);

        let d = arc(z6_non_nilpotent());
        for l in 1..3u64 {
            for w in d.weights_in_class(l) {
                let p = projective(&d, l, &w).unwrap();
                let (n, lu) = (3usize, l as usize);
                let (_, z) = d.yz_coeff(l, &w).unwrap();
                let mut e = crate::linalg::zero_vector(6);
                e[n + n - 1] = one();
                e[n - lu - 1] = -&z;
                assert!(crate::linalg::is_zero_vector(&p.x().mul_vec(&e)));
                assert!(p.x().column(n + lu - 1).iter().all(CycScalar::is_zero));
            }
        }
    }

    #[test]
    fn literal_corner_reading_fails_when_it_differs() {
        let d = arc(z6_non_nilpotent());
        for l in 1..d.n() {
            for w in d.weights_in_class(l) {
                let lit = projective_literal_corner(&d, l, &w).unwrap();
                if l == d.n() - 1 {
                    assert_eq!(lit, projective(&d, l, &w).unwrap());
                } else {
                    assert!(!lit.verify_relations().all_hold(), "{l} {w}");
                }
            }
        }
        // with n = 2 the two readings coincide
        let c = arc(z4_non_nilpotent());
        let w = c.weights_in_class(1)[0].clone();
        let same = projective_literal_corner(&c, 1, &w).unwrap();
        assert_eq!(same, projective(&c, 1, &w).unwrap());
    }

    #[test]
    fn chains_reduce_to_single_segments() {
        for d in all_data() {
            for l in 1..d.n() {
                for w in d.weights_in_class(l) {
                    assert_eq!(string_tt(&d, l, &w, 1).unwrap(), t1(&d, l, &w).unwrap());
                    assert_eq!(string_ttbar(&d, l, &w, 1).unwrap(), t1bar(&d, l, &w).unwrap());
                    if d.m() > 1 {
                        for eta in [1, -1, 2] {
                            let eta = CycScalar::from_int(eta);
                            let direct = band_m1(&d, l, &w, &eta).unwrap();
                            assert_eq!(band_mt(&d, l, &w, &eta, 1).unwrap(), direct);
                        }
                    } else {
                        for eta in [EtaParam::from_int(0), EtaParam::from_int(2), EtaParam::Infinity] {
                            assert_eq!(w_t(&d, l, &w, &eta, 1).unwrap(), w1(&d, l, &w, &eta).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn longer_chains_satisfy_relations() {
        for d in all_data() {
            let (n, m) = (d.n() as usize, d.m() as usize);
            for l in 1..d.n() {
                let w = d.weights_in_class(l)[0].clone();
                for t in 2..=3u64 {
                    for module in [string_tt(&d, l, &w, t).unwrap(), string_ttbar(&d, l, &w, t).unwrap()] {
                        assert_eq!(module.dim(), t as usize * n);
                        assert!(module.verify_relations().all_hold());
                    }
                    if m > 1 {
                        let mt = band_mt(&d, l, &w, &CycScalar::from_int(2), t).unwrap();
                        assert_eq!(mt.dim(), t as usize * m * n);
                        assert!(mt.verify_relations().all_hold());
                    } else {
                        let wt = w_t(&d, l, &w, &EtaParam::Infinity, t).unwrap();
                        assert_eq!(wt.dim(), t as usize * n);
                        assert!(wt.verify_relations().all_hold());
                    }
                }
            }
        }
    }

    #[test]
    fn w1_kernel_dimensions() {
        let d = arc(z2_nilpotent());
        let w = d.weights_in_class(1)[0].clone();
        assert_eq!(w1(&d, 1, &w, &EtaParam::from_int(3)).unwrap().x_kernel().cols(), 1);
        assert_eq!(w1(&d, 1, &w, &EtaParam::Infinity).unwrap().x_kernel().cols(), 2);
    }

    #[test]
    fn family_rules() {
        let a = arc(z2_nilpotent());
        let b = arc(z4_nilpotent());
        let wa = a.weights_in_class(1)[0].clone();
        let wb = b.weights_in_class(1)[0].clone();
        assert!(matches!(band_m1(&a, 1, &wa, &one()), Err(ConstructError::WrongM { .. })));
        assert!(matches!(w1(&b, 1, &wb, &EtaParam::Infinity), Err(ConstructError::WrongM { .. })));
        assert!(matches!(
            band_m1(&b, 1, &wb, &CycScalar::zero()),
            Err(ConstructError::BadEta(_))
        ));
    }

    #[test]
    fn family_tag_round_trip() {
        let b = arc(z4_nilpotent());
        let w = b.weights_in_class(1)[0].clone();
        let tag = FamilyTag::new(Family::Mt, 1, w).with_t(2).with_eta(EtaParam::from_int(-1));
        let text = serde_json::to_string(&tag).unwrap();
        let back: FamilyTag = serde_json::from_str(&text).unwrap();
        assert_eq!(back, tag);
        assert_eq!(build(&b, &back).unwrap().dim(), 8);
        let inf: FamilyTag =
            serde_json::from_str(r#"{"family":"W1","l":1,"lambda":{"gpart":[0],"h":[0]},"eta":"inf"}"#).unwrap();
        assert_eq!(inf.eta, Some(EtaParam::Infinity));
    }
}
