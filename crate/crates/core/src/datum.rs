//! Finite abelian groups, characters, group data and weight combinatorics.
//!
//! A weight is a character of `G × Γ` where `Γ` is the character group of
//! `G`. Characters of `Γ` are identified with elements of `G` by evaluation,
//! so a weight is a pair `(gpart, h)` with `λ(gγ) = gpart(g) γ(h)`.
//!
//! Every character value is a power of `ζ_N` with `N = exponent(G)`; values
//! are handled as exponents modulo `N` and only turned into scalars at the end.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::{q_factorial, q_number, CycScalar, CycloError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatumError {
    #[error("group needs at least one cyclic factor of order >= 1")]
    EmptyGroup,
    #[error("cyclic factor order must be >= 1, got {0}")]
    BadOrder(i64),
    #[error("{what} has {got} components, group has {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(
        "datum axiom violated: chi^n = {chi_n:?} is not trivial and alpha*(a^n - 1) != 0 with alpha = {alpha}, a^n = {a_n:?}"
    )]
    AxiomViolation {
        n: u64,
        chi_n: Vec<u64>,
        a_n: Vec<u64>,
        alpha: String,
    },
    #[error("weight {weight} lies in I_{actual}, not in I_{requested}")]
    WrongClass {
        weight: String,
        requested: u64,
        actual: u64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported for {kind} data: {op}")]
    Unsupported { kind: DatumKind, op: &'static str },
    #[error(transparent)]
    Scalar(#[from] CycloError),
}

/// Product of cyclic groups `Z_{d_1} × … × Z_{d_r}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    orders: Vec<u64>,
}

impl FinAbGroup {
    pub fn new(orders: Vec<u64>) -> Result<Self, DatumError> {
        if orders.is_empty() {
            return Err(DatumError::EmptyGroup);
        }
        if let Some(&o) = orders.iter().find(|&&o| o == 0) {
            return Err(DatumError::BadOrder(o as i64));
        }
        Ok(FinAbGroup { orders })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1, |acc, d| acc.lcm(d))
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    fn check_len(&self, what: &'static str, len: usize) -> Result<(), DatumError> {
        if len != self.rank() {
            return Err(DatumError::LengthMismatch {
                what,
                expected: self.rank(),
                got: len,
            });
        }
        Ok(())
    }

    pub fn element(&self, exps: &[i64]) -> Result<GroupElem, DatumError> {
        self.check_len("group element", exps.len())?;
        Ok(GroupElem(self.reduce(exps)))
    }

    pub fn character(&self, exps: &[i64]) -> Result<GroupChar, DatumError> {
        self.check_len("character", exps.len())?;
        Ok(GroupChar(self.reduce(exps)))
    }

    fn reduce(&self, exps: &[i64]) -> Vec<u64> {
        exps.iter()
            .zip(&self.orders)
            .map(|(&e, &d)| e.rem_euclid(d as i64) as u64)
            .collect()
    }

    /// All exponent vectors in lexicographic order.
    pub fn all_vectors(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &d in &self.orders {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |e| {
                        let mut p = prefix.clone();
                        p.push(e);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.orders)
            .map(|((x, y), d)| (x + y) % d)
            .collect()
    }

    fn scale(&self, a: &[u64], k: i64) -> Vec<u64> {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &d)| (x as i64 * k).rem_euclid(d as i64) as u64)
            .collect()
    }

    fn vec_order(&self, a: &[u64]) -> u64 {
        a.iter()
            .zip(&self.orders)
            .map(|(&x, &d)| d / d.gcd(&x))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// Exponent `e` such that `c(g) = ζ_N^e`.
    pub fn pairing(&self, c: &GroupChar, g: &GroupElem) -> u64 {
        let n = self.exponent();
        c.0.iter()
            .zip(&g.0)
            .zip(&self.orders)
            .map(|((ci, gi), d)| ci * gi % d * (n / d))
            .sum::<u64>()
            % n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElem(pub Vec<u64>);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupChar(pub Vec<u64>);

/// A character of `G × Γ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub gpart: GroupChar,
    pub h: GroupElem,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "[{};{}]", join(&self.gpart.0), join(&self.h.0))
    }
}

/// Parses the display form `[g_1,..,g_r;h_1,..,h_r]`; brackets are optional.
impl std::str::FromStr for Weight {
    type Err = DatumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DatumError::InvalidParameter(format!("cannot parse weight {s:?}, expected [g..;h..]"));
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (g, h) = body.split_once(';').ok_or_else(bad)?;
        let list = |part: &str| -> Result<Vec<u64>, DatumError> {
            part.split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|_| bad()))
                .collect()
        };
        Ok(Weight {
            gpart: GroupChar(list(g)?),
            h: GroupElem(list(h)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatumKind {
    Nilpotent,
    NonNilpotent,
}

impl fmt::Display for DatumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DatumKind::Nilpotent => "nilpotent",
            DatumKind::NonNilpotent => "non-nilpotent",
        })
    }
}

/// Which half of `I_n` a weight of the top class belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TopSubclass {
    /// `λ(aχ^{-1})` is not a power of `ρ`.
    Generic,
    /// `λ(aχ^{-1}) = ρ^{n-1}`.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightClass {
    pub weight: Weight,
    /// `-1` for the top class.
    pub d: i64,
    /// Dimension of the simple module with this highest weight.
    pub l: u64,
    pub top: Option<TopSubclass>,
}

/// Raw input form of a datum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatumSpec {
    pub orders: Vec<u64>,
    pub chi: Vec<i64>,
    pub a: Vec<i64>,
    pub alpha: CycScalar,
}

/// Validated `(G, χ, a, α)` with its derived invariants.
#[derive(Debug, Clone)]
pub struct GroupDatum {
    group: FinAbGroup,
    chi: GroupChar,
    a: GroupElem,
    alpha: CycScalar,
    rho_exp: u64,
    n: u64,
    kind: DatumKind,
    m: u64,
}

impl PartialEq for GroupDatum {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group
            && self.chi == other.chi
            && self.a == other.a
            && self.alpha == other.alpha
    }
}

impl Eq for GroupDatum {}

impl GroupDatum {
    pub fn new(
        orders: Vec<u64>,
        chi: &[i64],
        a: &[i64],
        alpha: CycScalar,
    ) -> Result<Self, DatumError> {
        let group = FinAbGroup::new(orders)?;
        let chi = group.character(chi)?;
        let a = group.element(a)?;
        let big_n = group.exponent();
        let rho_exp = group.pairing(&chi, &a);
        let n = big_n / big_n.gcd(&rho_exp);
        let a_n = group.scale(&a.0, n as i64);
        let chi_n = group.scale(&chi.0, n as i64);
        let a_n_trivial = a_n.iter().all(|&e| e == 0);
        let chi_n_trivial = chi_n.iter().all(|&e| e == 0);
        let kind = if alpha.is_zero() || a_n_trivial {
            DatumKind::Nilpotent
        } else if chi_n_trivial {
            DatumKind::NonNilpotent
        } else {
            return Err(DatumError::AxiomViolation {
                n,
                chi_n,
                a_n,
                alpha: alpha.to_string(),
            });
        };
        let alpha = match kind {
            DatumKind::NonNilpotent => CycScalar::one(),
            DatumKind::Nilpotent => alpha,
        };
        let ord_a = group.vec_order(&a.0);
        let ord_chi = group.vec_order(&chi.0);
        let m = match kind {
            DatumKind::NonNilpotent => ord_a / n,
            DatumKind::Nilpotent => ord_a.lcm(&ord_chi) / n,
        };
        let datum = GroupDatum {
            group,
            chi,
            a,
            alpha,
            rho_exp,
            n,
            kind,
            m,
        };
        debug_assert_eq!(datum.weight_order(&datum.phi()), datum.m * datum.n);
        debug_assert!(datum.kind == DatumKind::Nilpotent || datum.m > 1);
        Ok(datum)
    }

    pub fn from_spec(spec: &DatumSpec) -> Result<Self, DatumError> {
        Self::new(spec.orders.clone(), &spec.chi, &spec.a, spec.alpha.clone())
    }

    pub fn to_spec(&self) -> DatumSpec {
        let signed = |v: &[u64]| v.iter().map(|&e| e as i64).collect();
        DatumSpec {
            orders: self.group.orders.clone(),
            chi: signed(&self.chi.0),
            a: signed(&self.a.0),
            alpha: self.alpha.clone(),
        }
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn chi(&self) -> &GroupChar {
        &self.chi
    }

    pub fn a(&self) -> &GroupElem {
        &self.a
    }

    pub fn alpha(&self) -> &CycScalar {
        &self.alpha
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn kind(&self) -> DatumKind {
        self.kind
    }

    pub fn is_nilpotent(&self) -> bool {
        self.kind == DatumKind::Nilpotent
    }

    /// `N = exponent(G)`; all scalars live in `Q(ζ_N)`.
    pub fn field_order(&self) -> u64 {
        self.group.exponent()
    }

    /// `ζ_N^e`.
    pub fn root(&self, e: i64) -> CycScalar {
        CycScalar::root_of_unity(self.field_order(), e).expect("positive order")
    }

    pub fn rho_exp(&self) -> u64 {
        self.rho_exp
    }

    pub fn rho(&self) -> CycScalar {
        self.root(self.rho_exp as i64)
    }

    /// `ρ^k`.
    pub fn rho_pow(&self, k: i64) -> CycScalar {
        self.root(self.rho_exp as i64 * k)
    }

    /// `a^n` as an exponent vector.
    pub fn a_pow_n(&self) -> GroupElem {
        GroupElem(self.group.scale(&self.a.0, self.n as i64))
    }

    /// Exponent of the value `γ_i(a)` of the i-th dual generator at `a`.
    pub fn gamma_gen_at_a(&self, i: usize) -> u64 {
        self.group.exponent() / self.group.orders[i] * self.a.0[i] % self.group.exponent()
    }

    /// Exponent of `χ(g_i)` for the i-th cyclic generator.
    pub fn chi_at_gen(&self, i: usize) -> u64 {
        self.group.exponent() / self.group.orders[i] * self.chi.0[i] % self.group.exponent()
    }

    // ---- weights ----

    pub fn trivial_weight(&self) -> Weight {
        let z = vec![0; self.group.rank()];
        Weight {
            gpart: GroupChar(z.clone()),
            h: GroupElem(z),
        }
    }

    pub fn weight(&self, gpart: &[i64], h: &[i64]) -> Result<Weight, DatumError> {
        Ok(Weight {
            gpart: self.group.character(gpart)?,
            h: self.group.element(h)?,
        })
    }

    pub fn check_weight(&self, w: &Weight) -> Result<(), DatumError> {
        let ok = |v: &[u64]| v.len() == self.group.rank() && v.iter().zip(&self.group.orders).all(|(e, d)| e < d);
        if ok(&w.gpart.0) && ok(&w.h.0) {
            Ok(())
        } else {
            Err(DatumError::InvalidParameter(format!("weight {w} out of range")))
        }
    }

    /// `ϕ = χ^{-1} â`.
    pub fn phi(&self) -> Weight {
        Weight {
            gpart: GroupChar(self.group.scale(&self.chi.0, -1)),
            h: self.a.clone(),
        }
    }

    pub fn weight_mul(&self, u: &Weight, v: &Weight) -> Weight {
        Weight {
            gpart: GroupChar(self.group.add(&u.gpart.0, &v.gpart.0)),
            h: GroupElem(self.group.add(&u.h.0, &v.h.0)),
        }
    }

    pub fn weight_pow(&self, u: &Weight, k: i64) -> Weight {
        Weight {
            gpart: GroupChar(self.group.scale(&u.gpart.0, k)),
            h: GroupElem(self.group.scale(&u.h.0, k)),
        }
    }

    /// `λ ϕ^k`.
    pub fn shift(&self, w: &Weight, k: i64) -> Weight {
        self.weight_mul(w, &self.weight_pow(&self.phi(), k))
    }

    pub fn weight_order(&self, w: &Weight) -> u64 {
        self.group
            .vec_order(&w.gpart.0)
            .lcm(&self.group.vec_order(&w.h.0))
    }

    /// Exponent of `λ(a)`.
    pub fn at_a_exp(&self, w: &Weight) -> u64 {
        self.group.pairing(&w.gpart, &self.a)
    }

    /// Exponent of `λ(χ) = χ(h)`.
    pub fn at_chi_exp(&self, w: &Weight) -> u64 {
        self.group.pairing(&self.chi, &w.h)
    }

    pub fn at_a(&self, w: &Weight) -> CycScalar {
        self.root(self.at_a_exp(w) as i64)
    }

    pub fn at_chi(&self, w: &Weight) -> CycScalar {
        self.root(self.at_chi_exp(w) as i64)
    }

    /// Exponent of the eigenvalue of the i-th cyclic generator of G.
    pub fn eigen_group_exp(&self, w: &Weight, i: usize) -> u64 {
        let big_n = self.field_order();
        big_n / self.group.orders[i] * w.gpart.0[i] % big_n
    }

    /// Exponent of the eigenvalue of the i-th dual generator of Γ.
    pub fn eigen_gamma_exp(&self, w: &Weight, i: usize) -> u64 {
        let big_n = self.field_order();
        big_n / self.group.orders[i] * w.h.0[i] % big_n
    }

    pub fn classify_weight(&self, w: &Weight) -> WeightClass {
        let big_n = self.field_order() as i64;
        let v = (self.at_a_exp(w) as i64 - self.at_chi_exp(w) as i64).rem_euclid(big_n);
        let is_rho_pow = |s: i64| (s * self.rho_exp as i64).rem_euclid(big_n) == v;
        let n = self.n as i64;
        if let Some(s) = (0..=n - 2).find(|&s| is_rho_pow(s)) {
            return WeightClass {
                weight: w.clone(),
                d: s,
                l: s as u64 + 1,
                top: None,
            };
        }
        let top = if n >= 1 && is_rho_pow(n - 1) {
            TopSubclass::Boundary
        } else {
            TopSubclass::Generic
        };
        WeightClass {
            weight: w.clone(),
            d: -1,
            l: self.n,
            top: Some(top),
        }
    }

    /// `l` with `λ ∈ I_l`.
    pub fn class_of(&self, w: &Weight) -> u64 {
        self.classify_weight(w).l
    }

    pub fn require_class(&self, w: &Weight, l: u64) -> Result<(), DatumError> {
        self.check_weight(w)?;
        let actual = self.class_of(w);
        if actual != l {
            return Err(DatumError::WrongClass {
                weight: w.to_string(),
                requested: l,
                actual,
            });
        }
        Ok(())
    }

    /// `σ(λ) = λ ϕ^{d(λ)+1}`; the identity on the top class.
    pub fn sigma(&self, w: &Weight) -> Weight {
        let d = self.classify_weight(w).d;
        self.shift(w, d + 1)
    }

    /// Inverse of `σ`: `λ ϕ^{l-n}` for `λ ∈ I_l`, `l < n`.
    pub fn sigma_inv(&self, w: &Weight) -> Weight {
        let c = self.classify_weight(w);
        if c.d < 0 {
            return w.clone();
        }
        self.shift(w, c.l as i64 - self.n as i64)
    }

    /// `τ^k` with `τ = σ²`.
    pub fn tau(&self, w: &Weight, k: i64) -> Weight {
        let mut cur = w.clone();
        for _ in 0..k.unsigned_abs() {
            cur = if k > 0 {
                self.sigma(&self.sigma(&cur))
            } else {
                self.sigma_inv(&self.sigma_inv(&cur))
            };
        }
        cur
    }

    pub fn enumerate_weights(&self) -> Vec<WeightClass> {
        let vs = self.group.all_vectors();
        let mut out = Vec::with_capacity(vs.len() * vs.len());
        for g in &vs {
            for h in &vs {
                let w = Weight {
                    gpart: GroupChar(g.clone()),
                    h: GroupElem(h.clone()),
                };
                out.push(self.classify_weight(&w));
            }
        }
        out
    }

    /// Weights of `I_l`.
    pub fn weights_in_class(&self, l: u64) -> Vec<Weight> {
        self.enumerate_weights()
            .into_iter()
            .filter(|c| c.l == l)
            .map(|c| c.weight)
            .collect()
    }

    /// `K = {λ : λ(aχ^{-1}) = 1}`.
    pub fn kernel_k(&self) -> Vec<Weight> {
        self.enumerate_weights()
            .into_iter()
            .filter(|c| {
                (self.at_a_exp(&c.weight) + self.field_order() - self.at_chi_exp(&c.weight)).is_multiple_of(self.field_order())
            })
            .map(|c| c.weight)
            .collect()
    }

    /// Number of simple modules of each dimension.
    pub fn simple_counts(&self) -> BTreeMap<u64, u64> {
        let mut counts = BTreeMap::new();
        for c in self.enumerate_weights() {
            *counts.entry(c.l).or_insert(0) += 1;
        }
        counts
    }

    // ---- coefficients ----

    /// `α_i(·, λ) = (i)_ρ (λ(χ) - λ(a) ρ^{1-i})` with no class check.
    pub fn alpha_raw(&self, i: i64, w: &Weight) -> CycScalar {
        let rho = self.rho();
        let qi = q_number(i.max(0) as u32, &rho);
        let inner = &self.at_chi(w) - &(&self.at_a(w) * &self.rho_pow(1 - i));
        &qi * &inner
    }

    /// `α_i(l, λ)` for `λ ∈ I_l`.
    pub fn alpha_coeff(&self, i: i64, l: u64, w: &Weight) -> Result<CycScalar, DatumError> {
        if i < 1 {
            return Err(DatumError::InvalidParameter(format!("alpha index {i} < 1")));
        }
        self.require_class(w, l)?;
        let v = self.alpha_raw(i, w);
        debug_assert!(i >= l as i64 || !v.is_zero(), "alpha_i vanished below l");
        Ok(v)
    }

    /// `β(l, λ) = α_1 ⋯ α_{l-1}`, with `β(1, λ) = 1`.
    pub fn beta_coeff(&self, l: u64, w: &Weight) -> Result<CycScalar, DatumError> {
        self.require_class(w, l)?;
        Ok((1..l as i64).fold(CycScalar::one(), |acc, i| &acc * &self.alpha_raw(i, w)))
    }

    /// `(y_{l,λ}, z_{l,λ})` for the non-nilpotent projective tables.
    pub fn yz_coeff(&self, l: u64, w: &Weight) -> Result<(CycScalar, CycScalar), DatumError> {
        if self.is_nilpotent() {
            return Err(DatumError::Unsupported {
                kind: self.kind,
                op: "y/z coefficients",
            });
        }
        if l == 0 || l >= self.n {
            return Err(DatumError::InvalidParameter(format!(
                "l = {l} outside 1..n-1"
            )));
        }
        self.require_class(w, l)?;
        let (y, z) = self.yz_raw(l, w);
        debug_assert!((&y + &z).is_zero());
        Ok((y, z))
    }

    pub(crate) fn yz_raw(&self, l: u64, w: &Weight) -> (CycScalar, CycScalar) {
        let fact = q_factorial(self.n as u32 - 1, &self.rho());
        let l = l as i64;
        let y_num = &(&self.rho_pow(1 - l) * &self.at_a(w)) - &(&self.rho_pow(l) * &self.at_chi(w));
        let z_num = &(&self.rho() * &self.at_a(w)) - &self.at_chi(w);
        (
            y_num.checked_div(&fact).expect("(n-1)!_rho is nonzero"),
            z_num.checked_div(&fact).expect("(n-1)!_rho is nonzero"),
        )
    }

    /// Blocks of simple modules linked by non-split extensions.
    pub fn linkage_blocks(&self) -> Vec<Vec<(u64, Weight)>> {
        let mut seen = BTreeSet::new();
        let mut blocks = Vec::new();
        for c in self.enumerate_weights() {
            let key = (c.l, c.weight.clone());
            if seen.contains(&key) {
                continue;
            }
            let mut block = BTreeSet::new();
            if c.l == self.n {
                block.insert(key);
            } else {
                let sig = self.sigma(&c.weight);
                for k in 0..self.m as i64 {
                    block.insert((c.l, self.tau(&c.weight, k)));
                    block.insert((self.n - c.l, self.tau(&sig, k)));
                }
                debug_assert_eq!(block.len() as u64, 2 * self.m);
            }
            seen.extend(block.iter().cloned());
            blocks.push(block.into_iter().collect());
        }
        blocks
    }
}

impl Serialize for GroupDatum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_spec().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupDatum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let spec = DatumSpec::deserialize(deserializer)?;
        GroupDatum::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

/// Small fixed data used across tests and examples.
pub mod samples {
    use super::*;

    /// `Z_2`, `χ(a) = -1`, `α = 0`.
    pub fn z2_nilpotent() -> GroupDatum {
        GroupDatum::new(vec![2], &[1], &[1], CycScalar::zero()).unwrap()
    }

    /// `Z_4`, `χ(a) = -1`, `α = 0`.
    pub fn z4_nilpotent() -> GroupDatum {
        GroupDatum::new(vec![4], &[2], &[1], CycScalar::zero()).unwrap()
    }

    /// `Z_4`, `χ(a) = -1`, `α = 1`.
    pub fn z4_non_nilpotent() -> GroupDatum {
        GroupDatum::new(vec![4], &[2], &[1], CycScalar::one()).unwrap()
    }

    /// `Z_6`, `χ(a) = ζ_3`, `α = 1`: non-nilpotent with `n = 3`.
    pub fn z6_non_nilpotent() -> GroupDatum {
        GroupDatum::new(vec![6], &[2], &[1], CycScalar::one()).unwrap()
    }

    /// `Z_3`, `χ(a) = ζ_3`, `α = 0`.
    pub fn z3_nilpotent() -> GroupDatum {
        GroupDatum::new(vec![3], &[1], &[1], CycScalar::zero()).unwrap()
    }

    /// `Z_2 × Z_2`, `χ = (1, 1)`, `a = (1, 0)`, `α = 0`.
    pub fn klein_nilpotent() -> GroupDatum {
        GroupDatum::new(vec![2, 2], &[1, 1], &[1, 0], CycScalar::zero()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::samples::*;
    use super::*;

    #[test]
    fn weight_parse_round_trip() {
        let d = z4_nilpotent();
        for c in d.enumerate_weights() {
            let back: Weight = c.weight.to_string().parse().unwrap();
            assert_eq!(back, c.weight);
        }
        assert!("1,2".parse::<Weight>().is_err());
    }

    #[test]
    fn validation_examples() {
        let a = z2_nilpotent();
        assert_eq!((a.kind(), a.n(), a.m()), (DatumKind::Nilpotent, 2, 1));
        assert_eq!(a.rho(), CycScalar::from_int(-1));
        let b = z4_nilpotent();
        assert_eq!((b.kind(), b.n(), b.m()), (DatumKind::Nilpotent, 2, 2));
        let c = z4_non_nilpotent();
        assert_eq!((c.kind(), c.n(), c.m()), (DatumKind::NonNilpotent, 2, 2));
        let d = z6_non_nilpotent();
        assert_eq!((d.kind(), d.n(), d.m()), (DatumKind::NonNilpotent, 3, 2));
    }

    #[test]
    fn non_nilpotent_alpha_is_normalized() {
        let c = GroupDatum::new(vec![4], &[2], &[1], CycScalar::from_int(7)).unwrap();
        assert!(c.alpha().is_one());
    }

    #[test]
    fn axiom_violation_reports_both_witnesses() {
        let ok = GroupDatum::new(vec![8], &[4], &[1], CycScalar::one());
        assert!(ok.is_ok(), "chi^n = 1 here");
        // Z_4 x Z_4, χ = (1, 0), a = (2, 1): ρ = -1, χ^2 = (2, 0), a^2 = (0, 2)
        let err = GroupDatum::new(vec![4, 4], &[1, 0], &[2, 1], CycScalar::one()).unwrap_err();
        match err {
            DatumError::AxiomViolation { n, chi_n, a_n, .. } => {
                assert_eq!(n, 2);
                assert_eq!(chi_n, vec![2, 0]);
                assert_eq!(a_n, vec![0, 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn phi_order_is_mn() {
        for d in [
            z2_nilpotent(),
            z4_nilpotent(),
            z4_non_nilpotent(),
            z6_non_nilpotent(),
            z3_nilpotent(),
            klein_nilpotent(),
        ] {
            let phi = d.phi();
            let mut p = d.trivial_weight();
            let mut ord = 0;
            loop {
                p = d.weight_mul(&p, &phi);
                ord += 1;
                if p == d.trivial_weight() {
                    break;
                }
            }
            assert_eq!(ord, d.m() * d.n());
            assert_eq!(d.weight_pow(&phi, 0), d.trivial_weight());
        }
    }

    #[test]
    fn classification_examples_on_z4() {
        let b = z4_nilpotent();
        let c1 = b.classify_weight(&b.weight(&[0], &[0]).unwrap());
        assert_eq!((c1.d, c1.l, c1.top), (0, 1, None));
        let c2 = b.classify_weight(&b.weight(&[1], &[0]).unwrap());
        assert_eq!((c2.l, c2.top), (2, Some(TopSubclass::Generic)));
        let c3 = b.classify_weight(&b.weight(&[2], &[0]).unwrap());
        assert_eq!((c3.l, c3.top), (2, Some(TopSubclass::Boundary)));
    }

    #[test]
    fn counts_match_closed_forms() {
        let a = z2_nilpotent();
        assert_eq!(a.simple_counts(), BTreeMap::from([(1, 2), (2, 2)]));
        assert_eq!(a.kernel_k().len(), 2);
        let b = z4_nilpotent();
        assert_eq!(b.simple_counts(), BTreeMap::from([(1, 4), (2, 12)]));
        assert_eq!(b.kernel_k().len(), 4);
    }

    #[test]
    fn alpha_and_yz_examples() {
        let b = z4_nilpotent();
        let w = b.weight(&[0], &[0]).unwrap();
        assert!(b.alpha_coeff(1, 1, &w).unwrap().is_zero());
        assert!(b.beta_coeff(1, &w).unwrap().is_one());
        assert!(b.alpha_coeff(1, 2, &w).is_err());
        assert!(b.yz_coeff(1, &w).is_err());

        let c = z4_non_nilpotent();
        // λ(a) = i, λ(χ) = χ(h) = i: gpart = 1, h with 2h ≡ 1 mod 4 impossible;
        // χ(h) = ζ_4^{2h} is ±1, so take the weight with λ(a) = λ(χ) = -1.
        let w = c.weight(&[2], &[1]).unwrap();
        assert_eq!(c.class_of(&w), 1);
        let (y, z) = c.yz_coeff(1, &w).unwrap();
        // z = (ρλ(a) - λ(χ)) / 1 = (1) - (-1) = 2
        assert_eq!(z, CycScalar::from_int(2));
        assert!((&y + &z).is_zero());
    }
}
