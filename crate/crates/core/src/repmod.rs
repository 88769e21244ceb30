//! Modules as tuples of generator matrices, with relation checking, weight
//! decomposition and submodule/quotient mechanics.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo::{q_factorial, CycScalar};
use crate::datum::{DatumError, DatumSpec, GroupDatum, Weight};
use crate::linalg::{is_zero_vector, LinalgError, Matrix, SparseEliminator, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("matrix size mismatch: {0}")]
    SizeMismatch(String),
    #[error("relations fail: {}", .0.join(", "))]
    RelationsFail(Vec<String>),
    #[error("group action is not diagonalizable over the ground field")]
    NotDiagonalizable,
    #[error("weight grading violated by {0}")]
    GradingViolated(&'static str),
    #[error("subspace is not invariant under {0}")]
    NotInvariant(String),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One algebra generator acting on a module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    /// i-th cyclic generator of G.
    Group(usize),
    /// i-th dual generator of Γ.
    Gamma(usize),
    X,
    Xi,
}

/// Simultaneous eigenspace decomposition of the group-like action.
#[derive(Debug, Clone)]
pub struct WeightDecomposition {
    /// Weight of each block, sorted.
    pub weights: Vec<Weight>,
    /// Start offset of each block in adapted coordinates; one extra entry at the end.
    pub offsets: Vec<usize>,
    /// Columns: the concatenated block bases.
    pub basis: Matrix,
    pub basis_inv: Matrix,
    /// `x` and `ξ` in adapted coordinates.
    pub x: Matrix,
    pub xi: Matrix,
}

impl WeightDecomposition {
    pub fn block_of(&self, w: &Weight) -> Option<usize> {
        self.weights.binary_search(w).ok()
    }

    pub fn block_dim(&self, b: usize) -> usize {
        self.offsets[b + 1] - self.offsets[b]
    }

    pub fn space(&self, b: usize) -> Matrix {
        self.basis
            .select_cols(&(self.offsets[b]..self.offsets[b + 1]).collect::<Vec<_>>())
    }

    /// Weight multiset as (weight, multiplicity).
    pub fn multiset(&self) -> Vec<(Weight, usize)> {
        (0..self.weights.len())
            .map(|b| (self.weights[b].clone(), self.block_dim(b)))
            .collect()
    }

    /// Block index of each adapted coordinate.
    pub fn coordinate_blocks(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.basis.cols());
        for b in 0..self.weights.len() {
            out.extend(std::iter::repeat_n(b, self.block_dim(b)));
        }
        out
    }
}

/// A finite-dimensional module over the double.
pub struct ModuleRep {
    datum: Arc<GroupDatum>,
    labels: Vec<String>,
    group: Vec<Matrix>,
    gamma: Vec<Matrix>,
    x: Matrix,
    xi: Matrix,
    weights: OnceLock<Result<WeightDecomposition, ModuleError>>,
}

impl Clone for ModuleRep {
    fn clone(&self) -> Self {
        let weights = OnceLock::new();
        if let Some(w) = self.weights.get() {
            let _ = weights.set(w.clone());
        }
        ModuleRep {
            datum: self.datum.clone(),
            labels: self.labels.clone(),
            group: self.group.clone(),
            gamma: self.gamma.clone(),
            x: self.x.clone(),
            xi: self.xi.clone(),
            weights,
        }
    }
}

impl fmt::Debug for ModuleRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleRep")
            .field("dim", &self.dim())
            .field("labels", &self.labels)
            .field("x", &self.x)
            .field("xi", &self.xi)
            .finish()
    }
}

impl PartialEq for ModuleRep {
    fn eq(&self, other: &Self) -> bool {
        *self.datum == *other.datum
            && self.group == other.group
            && self.gamma == other.gamma
            && self.x == other.x
            && self.xi == other.xi
    }
}

impl ModuleRep {
    /// Builds a module and checks every defining relation.
    pub fn new(
        datum: Arc<GroupDatum>,
        labels: Vec<String>,
        group: Vec<Matrix>,
        gamma: Vec<Matrix>,
        x: Matrix,
        xi: Matrix,
    ) -> Result<Self, ModuleError> {
        let m = Self::new_unchecked(datum, labels, group, gamma, x, xi)?;
        let report = m.verify_relations();
        if !report.all_hold() {
            return Err(ModuleError::RelationsFail(report.failures()));
        }
        Ok(m)
    }

    /// Checks shapes only. Used for derived modules whose relations are
    /// inherited, and for loading possibly-invalid input.
    pub fn new_unchecked(
        datum: Arc<GroupDatum>,
        labels: Vec<String>,
        group: Vec<Matrix>,
        gamma: Vec<Matrix>,
        x: Matrix,
        xi: Matrix,
    ) -> Result<Self, ModuleError> {
        let dim = x.rows();
        let rank = datum.group().rank();
        if group.len() != rank || gamma.len() != rank {
            return Err(ModuleError::SizeMismatch(format!(
                "expected {rank} group and dual generators, got {} and {}",
                group.len(),
                gamma.len()
            )));
        }
        let square = |m: &Matrix| m.rows() == dim && m.cols() == dim;
        if !group.iter().chain(&gamma).chain([&x, &xi]).all(square) {
            return Err(ModuleError::SizeMismatch(format!("all matrices must be {dim}x{dim}")));
        }
        if labels.len() != dim {
            return Err(ModuleError::SizeMismatch(format!(
                "{} labels for dimension {dim}",
                labels.len()
            )));
        }
        Ok(ModuleRep {
            datum,
            labels,
            group,
            gamma,
            x,
            xi,
            weights: OnceLock::new(),
        })
    }

    /// Builds a module on a basis of weight vectors: group-likes act diagonally.
    pub fn from_weight_basis(
        datum: Arc<GroupDatum>,
        labels: Vec<String>,
        weights: &[Weight],
        x: Matrix,
        xi: Matrix,
    ) -> Result<Self, ModuleError> {
        let (group, gamma) = diagonal_action(&datum, weights);
        Self::new(datum, labels, group, gamma, x, xi)
    }

    pub(crate) fn from_weight_basis_unchecked(
        datum: Arc<GroupDatum>,
        labels: Vec<String>,
        weights: &[Weight],
        x: Matrix,
        xi: Matrix,
    ) -> Result<Self, ModuleError> {
        let (group, gamma) = diagonal_action(&datum, weights);
        Self::new_unchecked(datum, labels, group, gamma, x, xi)
    }

    pub fn zero(datum: Arc<GroupDatum>) -> Self {
        let rank = datum.group().rank();
        let z = Matrix::zeros(0, 0);
        Self::new_unchecked(datum, vec![], vec![z.clone(); rank], vec![z.clone(); rank], z.clone(), z)
            .expect("empty shapes agree")
    }

    /// Runs the relation check and returns the module if it passes.
    pub fn checked(self) -> Result<Self, ModuleError> {
        let report = self.verify_relations();
        if report.all_hold() {
            Ok(self)
        } else {
            Err(ModuleError::RelationsFail(report.failures()))
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, ModuleError> {
        if labels.len() != self.dim() {
            return Err(ModuleError::SizeMismatch(format!(
                "{} labels for dimension {}",
                labels.len(),
                self.dim()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn datum(&self) -> &GroupDatum {
        &self.datum
    }

    pub fn datum_arc(&self) -> &Arc<GroupDatum> {
        &self.datum
    }

    pub fn dim(&self) -> usize {
        self.x.rows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn group_mats(&self) -> &[Matrix] {
        &self.group
    }

    pub fn gamma_mats(&self) -> &[Matrix] {
        &self.gamma
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn xi(&self) -> &Matrix {
        &self.xi
    }

    pub fn generator(&self, g: Generator) -> &Matrix {
        match g {
            Generator::Group(i) => &self.group[i],
            Generator::Gamma(i) => &self.gamma[i],
            Generator::X => &self.x,
            Generator::Xi => &self.xi,
        }
    }

    /// All generator matrices in a fixed order.
    pub fn generators(&self) -> Vec<(Generator, &Matrix)> {
        let mut out = Vec::new();
        for (i, g) in self.group.iter().enumerate() {
            out.push((Generator::Group(i), g));
        }
        for (i, g) in self.gamma.iter().enumerate() {
            out.push((Generator::Gamma(i), g));
        }
        out.push((Generator::X, &self.x));
        out.push((Generator::Xi, &self.xi));
        out
    }

    fn group_word(&self, mats: &[Matrix], exps: &[u64]) -> Matrix {
        let mut acc = Matrix::identity(self.dim());
        for (m, &e) in mats.iter().zip(exps) {
            acc = &acc * &m.pow(e as u32);
        }
        acc
    }

    /// Matrix of the group element `a`.
    pub fn a_matrix(&self) -> Matrix {
        self.group_word(&self.group, &self.datum.a().0)
    }

    /// Matrix of `χ` viewed as an element of `Γ`.
    pub fn chi_matrix(&self) -> Matrix {
        self.group_word(&self.gamma, &self.datum.chi().0)
    }

    pub fn verify_relations(&self) -> RelationReport {
        let d = &*self.datum;
        let dim = self.dim();
        let id = Matrix::identity(dim);
        let orders = d.group().orders();
        let n = d.n() as u32;
        let a = self.a_matrix();
        let c = self.chi_matrix();
        let mut report = RelationReport::default();

        let mut check = |name: String, lhs: Matrix, rhs: Matrix| {
            report.push(name, &lhs, &rhs);
        };

        for (i, g) in self.group.iter().enumerate() {
            check(format!("group-order[{i}]"), g.pow(orders[i] as u32), id.clone());
        }
        for (i, g) in self.gamma.iter().enumerate() {
            check(format!("gamma-order[{i}]"), g.pow(orders[i] as u32), id.clone());
        }
        let xn = self.x.pow(n);
        let an_minus = &a.pow(n) - &id;
        check("x-power".into(), xn, an_minus.scale(d.alpha()));
        check("xi-power".into(), self.xi.pow(n), Matrix::zeros(dim, dim));
        for (i, g) in self.group.iter().enumerate() {
            let chi_g = d.root(d.chi_at_gen(i) as i64);
            check(
                format!("x-group[{i}]"),
                &self.x * g,
                (g * &self.x).scale(&chi_g),
            );
            let chi_inv_g = d.root(-(d.chi_at_gen(i) as i64));
            check(
                format!("xi-group[{i}]"),
                &self.xi * g,
                (g * &self.xi).scale(&chi_inv_g),
            );
        }
        for (i, gm) in self.gamma.iter().enumerate() {
            let at_a = d.root(d.gamma_gen_at_a(i) as i64);
            check(
                format!("xi-gamma[{i}]"),
                &self.xi * gm,
                (gm * &self.xi).scale(&at_a),
            );
        }
        let all: Vec<&Matrix> = self.group.iter().chain(&self.gamma).collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                check(
                    format!("group-like-commute[{i},{j}]"),
                    all[i] * all[j],
                    all[j] * all[i],
                );
            }
        }
        check(
            "commutator".into(),
            &(&self.x * &self.xi) - &(&self.xi * &self.x),
            &a - &c,
        );
        let fact = q_factorial(n.saturating_sub(1), &d.rho());
        for (i, gm) in self.gamma.iter().enumerate() {
            let at_a = d.root(d.gamma_gen_at_a(i) as i64);
            let lhs = (&self.x * gm).scale(&at_a);
            let mut rhs = gm * &self.x;
            if !d.is_nilpotent() {
                let coef = (&at_a.pow(n as i64).expect("root of unity") - &CycScalar::one())
                    .checked_div(&fact)
                    .expect("(n-1)!_rho is nonzero");
                let inner = &a.scale(&d.rho()) - &c;
                let tail = &(gm * &inner) * &self.xi.pow(n - 1);
                rhs = &rhs + &tail.scale(&coef);
            }
            check(format!("x-gamma[{i}]"), lhs, rhs);
        }
        report
    }

    /// Weight decomposition, computed once.
    pub fn weight_spaces(&self) -> Result<&WeightDecomposition, ModuleError> {
        self.weights
            .get_or_init(|| self.compute_weight_spaces())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn compute_weight_spaces(&self) -> Result<WeightDecomposition, ModuleError> {
        let d = &*self.datum;
        let dim = self.dim();
        let rank = d.group().rank();
        let orders = d.group().orders();
        // (gpart exps, h exps, basis)
        let mut parts: Vec<(Vec<u64>, Vec<u64>, Matrix)> = vec![(vec![], vec![], Matrix::identity(dim))];
        let gens: Vec<(bool, usize)> = (0..rank)
            .map(|i| (true, i))
            .chain((0..rank).map(|i| (false, i)))
            .collect();
        for (is_group, i) in gens {
            let mat = if is_group { &self.group[i] } else { &self.gamma[i] };
            let ord = orders[i];
            let mut next = Vec::new();
            for (gp, hp, basis) in parts {
                if basis.cols() == 0 {
                    continue;
                }
                let image = mat * &basis;
                let mut found = 0;
                for e in 0..ord {
                    let ev = CycScalar::root_of_unity(ord, e as i64).expect("positive order");
                    let shifted = &image - &basis.scale(&ev);
                    let ns = shifted.nullspace();
                    if ns.cols() == 0 {
                        continue;
                    }
                    found += ns.cols();
                    let sub = &basis * &ns;
                    let (mut gp2, mut hp2) = (gp.clone(), hp.clone());
                    if is_group {
                        gp2.push(e);
                    } else {
                        hp2.push(e);
                    }
                    next.push((gp2, hp2, sub));
                }
                if found != basis.cols() {
                    return Err(ModuleError::NotDiagonalizable);
                }
            }
            parts = next;
        }
        let mut blocks: Vec<(Weight, Matrix)> = parts
            .into_iter()
            .filter(|(_, _, b)| b.cols() > 0)
            .map(|(gp, hp, b)| {
                (
                    Weight {
                        gpart: crate::datum::GroupChar(gp),
                        h: crate::datum::GroupElem(hp),
                    },
                    b,
                )
            })
            .collect();
        blocks.sort_by(|a, b| a.0.cmp(&b.0));
        let mut offsets = vec![0];
        let mut cols: Vec<Vector> = Vec::with_capacity(dim);
        for (_, b) in &blocks {
            cols.extend(b.columns());
            offsets.push(cols.len());
        }
        if cols.len() != dim {
            return Err(ModuleError::NotDiagonalizable);
        }
        let basis = Matrix::from_columns(dim, &cols);
        let basis_inv = basis.inverse().map_err(|_| ModuleError::NotDiagonalizable)?;
        let x = &(&basis_inv * &self.x) * &basis;
        let xi = &(&basis_inv * &self.xi) * &basis;
        let decomposition = WeightDecomposition {
            weights: blocks.into_iter().map(|(w, _)| w).collect(),
            offsets,
            basis,
            basis_inv,
            x,
            xi,
        };
        let shift = if d.is_nilpotent() {
            Some(("x", &decomposition.x, 1))
        } else {
            None
        };
        let checks = shift
            .into_iter()
            .chain(std::iter::once(("xi", &decomposition.xi, -1)));
        for (name, mat, k) in checks {
            let coord_blocks = decomposition.coordinate_blocks();
            for j in 0..dim {
                let target = d.shift(&decomposition.weights[coord_blocks[j]], k);
                for (i, &bi) in coord_blocks.iter().enumerate() {
                    if !mat.get(i, j).is_zero() && decomposition.weights[bi] != target {
                        return Err(ModuleError::GradingViolated(name));
                    }
                }
            }
        }
        Ok(decomposition)
    }

    /// Applies the word left to right: the first letter acts first.
    pub fn apply_word(&self, word: &[(Generator, u32)], v: &[CycScalar]) -> Result<Vector, ModuleError> {
        if v.len() != self.dim() {
            return Err(ModuleError::SizeMismatch(format!(
                "vector of length {} for dimension {}",
                v.len(),
                self.dim()
            )));
        }
        let mut cur = v.to_vec();
        for &(g, e) in word {
            for _ in 0..e {
                cur = self.generator(g).mul_vec(&cur);
            }
        }
        Ok(cur)
    }

    /// Smallest submodule containing the given vectors, with its inclusion.
    pub fn spin_submodule(&self, vectors: &[Vector]) -> Result<(ModuleRep, Matrix), ModuleError> {
        let dim = self.dim();
        let mut span = SparseEliminator::new(dim);
        let mut basis: Vec<Vector> = Vec::new();
        let mut queue: Vec<Vector> = Vec::new();
        for v in vectors {
            if v.len() != dim {
                return Err(ModuleError::SizeMismatch("spin vector length".into()));
            }
            if !is_zero_vector(v) && span.insert_dense(v) {
                basis.push(v.clone());
                queue.push(v.clone());
            }
        }
        while let Some(v) = queue.pop() {
            for (_, g) in self.generators() {
                let w = g.mul_vec(&v);
                if !is_zero_vector(&w) && span.insert_dense(&w) {
                    basis.push(w.clone());
                    queue.push(w);
                }
            }
        }
        let inc = Matrix::from_columns(dim, &basis);
        let inc = canonical_basis(&inc);
        let sub = self.restrict(&inc)?;
        Ok((sub, inc))
    }

    /// Module structure on an invariant subspace with the given basis columns.
    pub fn restrict(&self, inc: &Matrix) -> Result<ModuleRep, ModuleError> {
        let k = inc.cols();
        let mut mats = Vec::new();
        for (g, m) in self.generators() {
            let image = m * inc;
            let coeffs = inc
                .solve(&image)?
                .ok_or_else(|| ModuleError::NotInvariant(format!("{g:?}")))?;
            mats.push(coeffs);
        }
        let labels = (0..k).map(|j| column_label(inc, j, &self.labels)).collect();
        self.assemble(labels, mats)
    }

    fn assemble(&self, labels: Vec<String>, mut mats: Vec<Matrix>) -> Result<ModuleRep, ModuleError> {
        let rank = self.datum.group().rank();
        let xi = mats.pop().expect("xi");
        let x = mats.pop().expect("x");
        let gamma = mats.split_off(rank);
        ModuleRep::new_unchecked(self.datum.clone(), labels, mats, gamma, x, xi)
    }

    /// Quotient by an invariant subspace; returns the projection onto the
    /// quotient coordinates. The complement is spanned by unit vectors
    /// chosen in index order.
    pub fn quotient_module(&self, inc: &Matrix) -> Result<(ModuleRep, Matrix), ModuleError> {
        let dim = self.dim();
        let sub = inc.column_space();
        for (g, m) in self.generators() {
            let image = m * &sub;
            if sub.solve(&image)?.is_none() {
                return Err(ModuleError::NotInvariant(format!("{g:?}")));
            }
        }
        let units = sub.complement_units();
        let comp = Matrix::identity(dim).select_cols(&units);
        let full = sub.hstack(&comp)?;
        let inv = full.inverse()?;
        let proj = inv.select_rows(&(sub.cols()..dim).collect::<Vec<_>>());
        let mats = self
            .generators()
            .into_iter()
            .map(|(_, m)| &(&proj * m) * &comp)
            .collect();
        let labels = units.iter().map(|&i| self.labels[i].clone()).collect();
        let q = self.assemble(labels, mats)?;
        Ok((q, proj))
    }

    pub fn direct_sum(parts: &[&ModuleRep]) -> Result<ModuleRep, ModuleError> {
        let first = parts
            .first()
            .ok_or_else(|| ModuleError::SizeMismatch("empty direct sum".into()))?;
        let datum = first.datum.clone();
        if parts.iter().any(|p| *p.datum != *datum) {
            return Err(ModuleError::SizeMismatch("direct sum over different data".into()));
        }
        let rank = datum.group().rank();
        let stack = |f: &dyn Fn(&ModuleRep) -> &Matrix| {
            Matrix::block_diag(&parts.iter().map(|p| f(p)).collect::<Vec<_>>())
        };
        let group = (0..rank).map(|i| stack(&|p| &p.group[i])).collect();
        let gamma = (0..rank).map(|i| stack(&|p| &p.gamma[i])).collect();
        let labels = parts
            .iter()
            .enumerate()
            .flat_map(|(k, p)| p.labels.iter().map(move |l| format!("{k}:{l}")))
            .collect();
        ModuleRep::new_unchecked(
            datum,
            labels,
            group,
            gamma,
            stack(&|p| &p.x),
            stack(&|p| &p.xi),
        )
    }

    /// Same module in the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &Matrix) -> Result<ModuleRep, ModuleError> {
        let inv = p.inverse()?;
        let mats = self
            .generators()
            .into_iter()
            .map(|(_, m)| &(&inv * m) * p)
            .collect();
        let labels = (0..p.cols()).map(|j| column_label(p, j, &self.labels)).collect();
        self.assemble(labels, mats)
    }

    /// Basis of `{v : x v = 0}`.
    pub fn x_kernel(&self) -> Matrix {
        self.x.nullspace()
    }

    /// Basis of `{v : ξ v = 0}`.
    pub fn xi_kernel(&self) -> Matrix {
        self.xi.nullspace()
    }

    pub fn to_file(&self) -> ModuleFile {
        ModuleFile {
            datum: self.datum.to_spec(),
            dim: self.dim(),
            labels: self.labels.clone(),
            matrices: ModuleMatrices {
                group: self.group.clone(),
                gamma: self.gamma.clone(),
                x: self.x.clone(),
                xi: self.xi.clone(),
            },
        }
    }

    /// Loads without checking relations; call `verify_relations` afterwards.
    pub fn from_file(file: ModuleFile) -> Result<ModuleRep, ModuleError> {
        let datum = Arc::new(GroupDatum::from_spec(&file.datum)?);
        let m = ModuleRep::new_unchecked(
            datum,
            file.labels,
            file.matrices.group,
            file.matrices.gamma,
            file.matrices.x,
            file.matrices.xi,
        )?;
        if m.dim() != file.dim {
            return Err(ModuleError::SizeMismatch(format!(
                "declared dim {} but matrices are {}",
                file.dim,
                m.dim()
            )));
        }
        Ok(m)
    }
}

fn diagonal_action(datum: &GroupDatum, weights: &[Weight]) -> (Vec<Matrix>, Vec<Matrix>) {
    let rank = datum.group().rank();
    let group = (0..rank)
        .map(|i| {
            Matrix::diagonal(
                &weights
                    .iter()
                    .map(|w| datum.root(datum.eigen_group_exp(w, i) as i64))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let gamma = (0..rank)
        .map(|i| {
            Matrix::diagonal(
                &weights
                    .iter()
                    .map(|w| datum.root(datum.eigen_gamma_exp(w, i) as i64))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    (group, gamma)
}

/// Reduced column echelon basis of the column span, so that spans given by
/// basis vectors keep those vectors.
fn canonical_basis(m: &Matrix) -> Matrix {
    let (r, pivots) = m.transpose().rref();
    r.select_rows(&(0..pivots.len()).collect::<Vec<_>>()).transpose()
}

fn column_label(m: &Matrix, j: usize, labels: &[String]) -> String {
    let nonzero: Vec<usize> = (0..m.rows()).filter(|&i| !m.get(i, j).is_zero()).collect();
    match nonzero.as_slice() {
        [i] if m.get(*i, j).is_one() => labels[*i].clone(),
        _ => {
            let terms: Vec<String> = nonzero
                .iter()
                .map(|&i| {
                    let c = m.get(i, j);
                    if c.is_one() {
                        labels[i].clone()
                    } else {
                        format!("({c})*{}", labels[i])
                    }
                })
                .collect();
            terms.join(" + ")
        }
    }
}

/// Outcome of one relation check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub holds: bool,
    /// On failure: a basis index `j` and the nonzero column `(lhs - rhs) e_j`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<RelationWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationWitness {
    pub basis_index: usize,
    pub residual: Vec<CycScalar>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RelationReport {
    pub checks: Vec<(String, RelationCheck)>,
}

impl RelationReport {
    fn push(&mut self, name: String, lhs: &Matrix, rhs: &Matrix) {
        let diff = lhs - rhs;
        let witness = (0..diff.cols())
            .find(|&j| (0..diff.rows()).any(|i| !diff.get(i, j).is_zero()))
            .map(|j| RelationWitness {
                basis_index: j,
                residual: diff.column(j),
            });
        self.checks.push((
            name,
            RelationCheck {
                holds: witness.is_none(),
                witness,
            },
        ));
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|(_, c)| c.holds)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|(_, c)| !c.holds)
            .map(|(n, _)| n.clone())
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&RelationCheck> {
        self.checks.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }
}

impl Serialize for RelationReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.checks.len()))?;
        for (name, check) in &self.checks {
            map.serialize_entry(name, check)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleMatrices {
    pub group: Vec<Matrix>,
    pub gamma: Vec<Matrix>,
    pub x: Matrix,
    pub xi: Matrix,
}

/// On-disk module format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleFile {
    pub datum: DatumSpec,
    pub dim: usize,
    pub labels: Vec<String>,
    pub matrices: ModuleMatrices,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::samples::*;

    fn one_dim(d: &Arc<GroupDatum>, w: &Weight) -> ModuleRep {
        ModuleRep::from_weight_basis(
            d.clone(),
            vec!["v0".into()],
            std::slice::from_ref(w),
            Matrix::zeros(1, 1),
            Matrix::zeros(1, 1),
        )
        .unwrap()
    }

    #[test]
    fn zero_module_satisfies_everything() {
        let d = Arc::new(z4_nilpotent());
        let z = ModuleRep::zero(d);
        assert!(z.verify_relations().all_hold());
        assert_eq!(z.weight_spaces().unwrap().weights.len(), 0);
    }

    #[test]
    fn chi_matrix_uses_the_dual_identification() {
        // On Z_2 the weight (gpart, h) acts by χ through χ(h) = (-1)^h.
        let d = Arc::new(z2_nilpotent());
        for h in 0..2 {
            let w = d.weight(&[0], &[h]).unwrap();
            let m = ModuleRep::from_weight_basis_unchecked(
                d.clone(),
                vec!["v".into()],
                &[w],
                Matrix::zeros(1, 1),
                Matrix::zeros(1, 1),
            )
            .unwrap();
            let expect = if h == 0 { 1 } else { -1 };
            assert_eq!(m.chi_matrix().get(0, 0), &CycScalar::from_int(expect));
        }
    }

    #[test]
    fn one_dimensional_commutator_forces_kernel() {
        let d = Arc::new(z2_nilpotent());
        for c in d.enumerate_weights() {
            let m = ModuleRep::from_weight_basis_unchecked(
                d.clone(),
                vec!["v".into()],
                std::slice::from_ref(&c.weight),
                Matrix::zeros(1, 1),
                Matrix::zeros(1, 1),
            )
            .unwrap();
            assert_eq!(m.verify_relations().all_hold(), c.l == 1, "{}", c.weight);
        }
    }

    #[test]
    fn corrupted_matrix_reports_a_witness() {
        let d = Arc::new(z2_nilpotent());
        let w = d.weight(&[0], &[0]).unwrap();
        let good = one_dim(&d, &w);
        let mut x = good.x().clone();
        x.set(0, 0, CycScalar::one());
        let bad = ModuleRep::new_unchecked(
            d.clone(),
            good.labels().to_vec(),
            good.group_mats().to_vec(),
            good.gamma_mats().to_vec(),
            x,
            good.xi().clone(),
        )
        .unwrap();
        let report = bad.verify_relations();
        assert!(!report.all_hold());
        let (_, failed) = report.checks.iter().find(|(_, c)| !c.holds).unwrap();
        assert!(failed.witness.is_some());
    }

    #[test]
    fn direct_sum_weights_add_and_quotient_by_everything_is_zero() {
        let d = Arc::new(z4_nilpotent());
        let w0 = d.weight(&[0], &[0]).unwrap();
        let w1 = d.weight(&[2], &[1]).unwrap();
        assert_eq!(d.class_of(&w1), 1);
        let s = ModuleRep::direct_sum(&[&one_dim(&d, &w0), &one_dim(&d, &w1), &one_dim(&d, &w0)]).unwrap();
        let ws = s.weight_spaces().unwrap();
        assert_eq!(ws.multiset(), vec![(w0.clone(), 2), (w1.clone(), 1)]);
        let (q, proj) = s.quotient_module(&Matrix::identity(3)).unwrap();
        assert_eq!(q.dim(), 0);
        assert_eq!(proj.rows(), 0);
        let (sub, inc) = s.spin_submodule(&[vec![CycScalar::zero(); 3]]).unwrap();
        assert_eq!((sub.dim(), inc.cols()), (0, 0));
    }

    #[test]
    fn file_round_trip() {
        let d = Arc::new(z4_nilpotent());
        let m = one_dim(&d, &d.weight(&[0], &[0]).unwrap());
        let json = serde_json::to_string(&m.to_file()).unwrap();
        let back = ModuleRep::from_file(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(back.verify_relations().all_hold());
    }
}
