//! kG-modules as matrix representations, and the functors between them.
//!
//! Basis conventions: direct sums put the left summand first; tensor products
//! use row-major pairs `(i, j) -> i·dim(N) + j`; induced modules are
//! coset-major, `(coset i, basis j) -> i·dim(M) + j`, with cosets ordered as in
//! [`left_cosets`].

use std::collections::VecDeque;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{left_cosets, CosetData, Group, GroupFile, SubgroupEmbedding};
use crate::linalg::{kron, Echelon, Matrix, Prime};
use crate::report::Report;

/// A finite-dimensional kG-module with an action matrix for every group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    group: Arc<Group>,
    prime: Prime,
    dim: usize,
    action: Vec<Matrix>,
}

impl Module {
    /// Checks shapes, primes and `action[identity] = I`. The group law and
    /// invertibility are checked by [`check_module`].
    pub fn new(group: Arc<Group>, prime: Prime, dim: usize, action: Vec<Matrix>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::InvalidModule(format!(
                "{} action matrices for a group of order {}",
                action.len(),
                group.order()
            )));
        }
        for (g, a) in action.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::InvalidModule(format!("action of element {g} is not {dim}x{dim}")));
            }
            if a.prime() != prime {
                return Err(Error::PrimeMismatch(prime.value(), a.prime().value()));
            }
        }
        if !action[group.identity()].is_identity() {
            return Err(Error::InvalidModule("identity does not act as I".into()));
        }
        Ok(Module { group, prime, dim, action })
    }

    /// Extends images of the group generators to every element, failing if the
    /// images do not satisfy the relations of the group.
    pub fn from_generators(group: Arc<Group>, prime: Prime, dim: usize, gen_images: &[Matrix]) -> Result<Self> {
        let gens = group.generators().to_vec();
        if gen_images.len() != gens.len() {
            return Err(Error::InvalidModule(format!(
                "{} generator images for {} generators",
                gen_images.len(),
                gens.len()
            )));
        }
        for m in gen_images {
            if m.rows() != dim || m.cols() != dim || m.prime() != prime {
                return Err(Error::InvalidModule("generator image has wrong shape or prime".into()));
            }
        }
        let mut action: Vec<Option<Matrix>> = vec![None; group.order()];
        action[group.identity()] = Some(Matrix::identity(prime, dim));
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(x) = queue.pop_front() {
            let ax = action[x].clone().expect("visited");
            for (&s, img) in gens.iter().zip(gen_images) {
                let y = group.mul(x, s);
                let ay = &ax * img;
                match &action[y] {
                    Some(existing) if *existing != ay => {
                        return Err(Error::InvalidModule(format!("generator images violate a relation at element {y}")))
                    }
                    Some(_) => {}
                    None => {
                        action[y] = Some(ay);
                        queue.push_back(y);
                    }
                }
            }
        }
        let action = action.into_iter().map(|a| a.expect("generators generate")).collect();
        Module::new(group, prime, dim, action)
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self, g: usize) -> &Matrix {
        &self.action[g]
    }

    pub fn actions(&self) -> &[Matrix] {
        &self.action
    }

    /// Action matrices of the group generators.
    pub fn generator_actions(&self) -> Vec<&Matrix> {
        self.group.generators().iter().map(|&g| &self.action[g]).collect()
    }

    /// Same module over a structurally equal group object.
    pub fn with_group(&self, group: Arc<Group>) -> Result<Module> {
        if group.as_ref() != self.group.as_ref() {
            return Err(Error::GroupMismatch("with_group: tables differ".into()));
        }
        Ok(Module { group, ..self.clone() })
    }

    /// The module in the basis given by the columns of `p`: `g ↦ p⁻¹·ρ(g)·p`.
    pub fn change_basis(&self, p: &Matrix) -> Result<Module> {
        let inv = p.inverse().ok_or_else(|| Error::InvalidArgument("change of basis matrix is singular".into()))?;
        let action = self.action.iter().map(|a| &(&inv * a) * p).collect();
        Module::new(self.group.clone(), self.prime, self.dim, action)
    }

    pub fn to_file(&self) -> ModuleFile {
        ModuleFile {
            p: self.prime.value() as u64,
            group: self.group.to_file(),
            dim: self.dim,
            action: self.action.iter().map(|a| a.entries().to_vec()).collect(),
        }
    }

    pub fn from_file(file: &ModuleFile) -> Result<Module> {
        let prime = Prime::new(file.p)?;
        let group = Arc::new(Group::from_file(&file.group)?);
        let action = file
            .action
            .iter()
            .map(|entries| Matrix::from_vec(prime, file.dim, file.dim, entries.clone()))
            .collect::<Result<Vec<_>>>()?;
        Module::new(group, prime, file.dim, action)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string(&self.to_file())?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Module> {
        let file: ModuleFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Module::from_file(&file)
    }
}

/// On-disk module format.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModuleFile {
    pub p: u64,
    pub group: GroupFile,
    pub dim: usize,
    /// Row-major entries of the action matrix of each group element, in element order.
    pub action: Vec<Vec<u32>>,
}

pub(crate) fn same_group(a: &Module, b: &Module) -> Result<()> {
    if a.prime != b.prime {
        return Err(Error::PrimeMismatch(a.prime.value(), b.prime.value()));
    }
    if !Arc::ptr_eq(&a.group, &b.group) && a.group.as_ref() != b.group.as_ref() {
        return Err(Error::GroupMismatch(format!("{} vs {}", a.group.name(), b.group.name())));
    }
    Ok(())
}

pub fn trivial_module(group: &Arc<Group>, prime: Prime) -> Module {
    let action = vec![Matrix::identity(prime, 1); group.order()];
    Module { group: group.clone(), prime, dim: 1, action }
}

/// The regular module kG; `g` acts by the permutation `x ↦ g·x` of the basis.
pub fn regular_module(group: &Arc<Group>, prime: Prime) -> Module {
    let n = group.order();
    let action = (0..n)
        .map(|g| {
            let mut m = Matrix::zeros(prime, n, n);
            for x in 0..n {
                m.set(group.mul(g, x), x, 1);
            }
            m
        })
        .collect();
    Module { group: group.clone(), prime, dim: n, action }
}

pub fn direct_sum(m: &Module, n: &Module) -> Result<Module> {
    same_group(m, n)?;
    let action = m.action.iter().zip(&n.action).map(|(a, b)| Matrix::block_diagonal(m.prime, &[a, b])).collect();
    Ok(Module { group: m.group.clone(), prime: m.prime, dim: m.dim + n.dim, action })
}

pub fn direct_sum_all(modules: &[&Module]) -> Result<Module> {
    let (first, rest) = modules.split_first().ok_or_else(|| Error::InvalidArgument("empty direct sum".into()))?;
    for m in rest {
        same_group(first, m)?;
    }
    let action = (0..first.group.order())
        .map(|g| {
            let blocks: Vec<&Matrix> = modules.iter().map(|m| &m.action[g]).collect();
            Matrix::block_diagonal(first.prime, &blocks)
        })
        .collect();
    let dim = modules.iter().map(|m| m.dim).sum();
    Ok(Module { group: first.group.clone(), prime: first.prime, dim, action })
}

/// Tensor product with the diagonal action `g ↦ ρ_M(g) ⊗ ρ_N(g)`.
pub fn tensor(m: &Module, n: &Module) -> Result<Module> {
    same_group(m, n)?;
    let action = m.action.iter().zip(&n.action).map(|(a, b)| kron(a, b)).collect::<Result<Vec<_>>>()?;
    Ok(Module { group: m.group.clone(), prime: m.prime, dim: m.dim * n.dim, action })
}

/// Contragredient module, `ρ*(g) = ρ(g⁻¹)ᵀ`.
pub fn dual(m: &Module) -> Module {
    let action = (0..m.group.order()).map(|g| m.action[m.group.inv(g)].transpose()).collect();
    Module { action, ..m.clone() }
}

pub fn restrict(emb: &SubgroupEmbedding, m: &Module) -> Result<Module> {
    if emb.big().as_ref() != m.group.as_ref() {
        return Err(Error::GroupMismatch("restrict: module is not over the ambient group".into()));
    }
    let action = emb.map().iter().map(|&g| m.action[g].clone()).collect();
    Ok(Module { group: emb.sub().clone(), prime: m.prime, dim: m.dim, action })
}

/// Induction along `emb`: `g·(rep_i ⊗ m) = rep_σ(i) ⊗ h·m` where `g·rep_i = rep_σ(i)·h`.
pub fn induce(emb: &SubgroupEmbedding, m: &Module) -> Result<Module> {
    induce_with_transversal(emb, &left_cosets(emb), m)
}

/// [`induce`] with the summands ordered by a given transversal.
pub fn induce_with_transversal(emb: &SubgroupEmbedding, cosets: &CosetData, m: &Module) -> Result<Module> {
    if emb.sub().as_ref() != m.group.as_ref() {
        return Err(Error::GroupMismatch("induce: module is not over the subgroup".into()));
    }
    let big = emb.big();
    let (k, d) = (cosets.len(), m.dim);
    let action = (0..big.order())
        .map(|g| {
            let mut a = Matrix::zeros(m.prime, k * d, k * d);
            for (i, &rep) in cosets.reps.iter().enumerate() {
                let (j, h) = cosets.decompose(big.mul(g, rep));
                a.set_block(j * d, i * d, &m.action[h]);
            }
            a
        })
        .collect();
    Ok(Module { group: big.clone(), prime: m.prime, dim: k * d, action })
}

/// Outer tensor product of an `H`-module and a `K`-module as a module over
/// `H × K`, where `product` indexes `(h, k)` as `h·|K| + k` (see [`crate::groups::direct_product`]).
pub fn outer_tensor(m: &Module, n: &Module, product: &Arc<Group>) -> Result<Module> {
    if m.prime != n.prime {
        return Err(Error::PrimeMismatch(m.prime.value(), n.prime.value()));
    }
    let (a, b) = (m.group.order(), n.group.order());
    if product.order() != a * b {
        return Err(Error::GroupMismatch("outer_tensor: product order".into()));
    }
    let mut action = Vec::with_capacity(a * b);
    for h in 0..a {
        for k in 0..b {
            action.push(kron(&m.action[h], &n.action[k])?);
        }
    }
    let module = Module::new(product.clone(), m.prime, m.dim * n.dim, action)?;
    // the product law is checked on generators only
    for &g in product.generators() {
        for x in 0..product.order() {
            if &module.action[x] * &module.action[g] != module.action[product.mul(x, g)] {
                return Err(Error::GroupMismatch("outer_tensor: group is not the direct product".into()));
            }
        }
    }
    Ok(module)
}

/// Verifies the module axioms exhaustively: identity acts as I, every action
/// matrix is invertible, and `ρ(g)ρ(h) = ρ(gh)` for every pair.
pub fn check_module(m: &Module) -> Report {
    let mut report = Report::new();
    let g = &m.group;
    if m.action[g.identity()].is_identity() {
        report.pass("identity acts trivially");
    } else {
        report.fail("identity acts trivially", "action of the identity is not I");
    }
    let singular: Vec<usize> = (0..g.order()).filter(|&x| m.action[x].rank() != m.dim).collect();
    if singular.is_empty() {
        report.pass("action matrices invertible");
    } else {
        report.fail("action matrices invertible", format!("singular action for element {}", singular[0]));
    }
    let mut bad = None;
    'outer: for a in 0..g.order() {
        for b in 0..g.order() {
            if &m.action[a] * &m.action[b] != m.action[g.mul(a, b)] {
                bad = Some((a, b));
                break 'outer;
            }
        }
    }
    match bad {
        None => report.pass("group law"),
        Some((a, b)) => report.fail("group law", format!("rho({a})rho({b}) != rho({a}*{b})")),
    }
    report
}

/// A submodule with its inclusion matrix (columns span the submodule).
#[derive(Clone, Debug)]
pub struct Submodule {
    pub module: Module,
    pub inclusion: Matrix,
}

/// The submodule generated by the given vectors, in the spinning basis.
pub fn submodule(m: &Module, vectors: &[Vec<u32>]) -> Result<Submodule> {
    let mut ech = Echelon::new(m.prime, m.dim);
    let mut basis: Vec<Vec<u32>> = Vec::new();
    let mut queue = VecDeque::new();
    for v in vectors {
        if v.len() != m.dim {
            return Err(Error::Dimension("submodule generator length".into()));
        }
        let v: Vec<u32> = v.iter().map(|x| x % m.prime.value()).collect();
        if ech.insert(&v).is_some() {
            basis.push(v.clone());
            queue.push_back(v);
        }
    }
    let gens = m.generator_actions();
    while let Some(v) = queue.pop_front() {
        for a in &gens {
            let w = a.apply(&v);
            if ech.insert(&w).is_some() {
                basis.push(w.clone());
                queue.push_back(w);
            }
        }
    }
    let d = basis.len();
    let mut inclusion = Matrix::zeros(m.prime, m.dim, d);
    for (j, v) in basis.iter().enumerate() {
        for (i, &x) in v.iter().enumerate() {
            inclusion.set(i, j, x);
        }
    }
    let action = if d == 0 {
        vec![Matrix::zeros(m.prime, 0, 0); m.group.order()]
    } else {
        // coordinates of ρ(g)·b_j in the basis b
        let left_inv = left_inverse(&inclusion)?;
        m.action.iter().map(|a| &(&left_inv * a) * &inclusion).collect()
    };
    let module = Module::new(m.group.clone(), m.prime, d, action)?;
    Ok(Submodule { module, inclusion })
}

/// A quotient module with its projection matrix.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub module: Module,
    pub projection: Matrix,
}

/// `M / S` for a submodule `S` given by its inclusion matrix.
pub fn quotient(m: &Module, inclusion: &Matrix) -> Result<Quotient> {
    let d = inclusion.cols();
    // extend the submodule basis to a basis of M with standard vectors
    let mut ech = Echelon::new(m.prime, m.dim);
    let mut cols: Vec<Vec<u32>> = Vec::new();
    for j in 0..d {
        let c = inclusion.column(j);
        if ech.insert(&c).is_none() {
            return Err(Error::InvalidArgument("inclusion columns are dependent".into()));
        }
        cols.push(c);
    }
    for i in 0..m.dim {
        let mut e = vec![0u32; m.dim];
        e[i] = 1;
        if ech.insert(&e).is_some() {
            cols.push(e);
        }
    }
    let mut b = Matrix::zeros(m.prime, m.dim, m.dim);
    for (j, c) in cols.iter().enumerate() {
        for (i, &x) in c.iter().enumerate() {
            b.set(i, j, x);
        }
    }
    let binv = b.inverse().expect("extended basis is invertible");
    let qd = m.dim - d;
    let mut action = Vec::with_capacity(m.group.order());
    for a in &m.action {
        let conj = &(&binv * a) * &b;
        if !conj.submatrix(d..m.dim, 0..d).is_zero() {
            return Err(Error::InvalidArgument("subspace is not a submodule".into()));
        }
        action.push(conj.submatrix(d..m.dim, d..m.dim));
    }
    let projection = binv.submatrix(d..m.dim, 0..m.dim);
    let module = Module::new(m.group.clone(), m.prime, qd, action)?;
    Ok(Quotient { module, projection })
}

/// A matrix `L` with `L·A = I` for `A` of full column rank.
pub(crate) fn left_inverse(a: &Matrix) -> Result<Matrix> {
    use crate::linalg::{solve_linear, Solution};
    let rows = a.rows();
    // invert a square block of independent rows
    let mut ech = Echelon::new(a.prime(), a.cols());
    let mut picked = Vec::new();
    for r in 0..rows {
        if ech.insert(a.row(r)).is_some() {
            picked.push(r);
        }
    }
    if picked.len() != a.cols() {
        return Err(Error::InvalidArgument("matrix does not have full column rank".into()));
    }
    let square = a.select(&picked, &(0..a.cols()).collect::<Vec<_>>());
    let Solution::Feasible { particular: inv, .. } = solve_linear(&square, &Matrix::identity(a.prime(), a.cols()))?
    else {
        return Err(Error::CheckFailed("left inverse".into()));
    };
    let mut l = Matrix::zeros(a.prime(), a.cols(), rows);
    for (j, &r) in picked.iter().enumerate() {
        for i in 0..a.cols() {
            l.set(i, r, inv.get(i, j));
        }
    }
    Ok(l)
}
