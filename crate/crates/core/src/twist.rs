//! Twisted induction of a short exact sequence of `kH`-modules to `G = H × C_q`.
//!
//! For `0 → X → Y → Z → 0` the module is the vector space
//! `X^{q-1} ⊕ Y ⊕ Z^{q-1}`, summands numbered `1..=2q-1` from left to right.
//! `H` acts diagonally and the generator `u` of `C_q` acts as `I + N`, where
//! `N` sends summand `s` to summand `s + 1` by the identity, `d1` (from the last
//! `X` to `Y`), `d2` (from `Y` to the first `Z`), or zero (from the last `Z`).

use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{cyclic, direct_product, transversal, Group, SubgroupEmbedding};
use crate::hom::{transfer_matrix, BlockHom, GenAction, Sandwich};
use crate::linalg::{solve_linear, Matrix, Prime, Solution};
use crate::morph::{check_ses, EquivariantMap, ShortExactSeq};
use crate::relproj::{is_rel_projective, ProjectivityVerdict};
use crate::report::Report;
use crate::reps::{induce_with_transversal, Module, ModuleFile};

/// Position of each summand inside the twisted module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub q: usize,
    pub x_dim: usize,
    pub y_dim: usize,
    pub z_dim: usize,
}

impl Layout {
    pub fn summands(&self) -> usize {
        2 * self.q - 1
    }

    pub fn dim(&self) -> usize {
        (self.q - 1) * (self.x_dim + self.z_dim) + self.y_dim
    }

    pub fn summand_dim(&self, s: usize) -> usize {
        self.range(s).len()
    }

    /// Coordinates of summand `s`, `1 ≤ s ≤ 2q - 1`.
    pub fn range(&self, s: usize) -> Range<usize> {
        assert!((1..=self.summands()).contains(&s), "summand {s} out of range");
        let q = self.q;
        if s < q {
            let a = (s - 1) * self.x_dim;
            a..a + self.x_dim
        } else if s == q {
            let a = (q - 1) * self.x_dim;
            a..a + self.y_dim
        } else {
            let a = (q - 1) * self.x_dim + self.y_dim + (s - q - 1) * self.z_dim;
            a..a + self.z_dim
        }
    }
}

#[derive(Clone, Debug)]
pub struct TwistModule {
    pub module: Arc<Module>,
    pub layout: Layout,
    pub source: ShortExactSeq,
    /// `H → H × C_q`
    pub h_embedding: SubgroupEmbedding,
    /// `C_q → H × C_q`
    pub c_embedding: SubgroupEmbedding,
}

/// On-disk form: the module plus its summand layout.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwistFile {
    pub module: ModuleFile,
    pub layout: Layout,
}

impl TwistModule {
    pub fn q(&self) -> usize {
        self.layout.q
    }

    pub fn group(&self) -> &Arc<Group> {
        self.module.group()
    }

    /// The element `u^j`.
    pub fn u_pow(&self, j: usize) -> usize {
        self.c_embedding.image(j % self.q())
    }

    /// The nilpotent part `N = ρ(u) - I`.
    pub fn shift(&self) -> Matrix {
        let p = self.module.prime();
        self.module.action(self.u_pow(1)) - &Matrix::identity(p, self.module.dim())
    }

    pub fn to_file(&self) -> TwistFile {
        TwistFile { module: self.module.to_file(), layout: self.layout }
    }
}

fn shift_matrix(layout: &Layout, s: &ShortExactSeq, p: Prime) -> Matrix {
    let mut n = Matrix::zeros(p, layout.dim(), layout.dim());
    let q = layout.q;
    for k in 1..layout.summands() {
        let block = if k == q - 1 {
            s.d1.matrix().clone()
        } else if k == q {
            s.d2.matrix().clone()
        } else {
            Matrix::identity(p, layout.summand_dim(k))
        };
        n.set_block(layout.range(k + 1).start, layout.range(k).start, &block);
    }
    n
}

/// Builds the twisted module over `H × C_q` from an exact sequence over `H`.
pub fn twisted_induction(s: &ShortExactSeq, q: usize, p: Prime) -> Result<TwistModule> {
    if s.x().prime() != p {
        return Err(Error::PrimeMismatch(s.x().prime().value(), p.value()));
    }
    if !p.is_power(q) {
        return Err(Error::NotPowerOfP { q, p: p.value() });
    }
    let report = check_ses(s);
    if !report.passed() {
        let names: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
        return Err(Error::NotExact(names.join(", ")));
    }
    let h = s.x().group().clone();
    let (g, h_emb, c_emb) = direct_product(&h, &cyclic(q)?)?;
    let layout = Layout { q, x_dim: s.x().dim(), y_dim: s.y().dim(), z_dim: s.z().dim() };
    let dim = layout.dim();
    let n = shift_matrix(&layout, s, p);
    let id = Matrix::identity(p, dim);
    if !n.pow(q as u64).is_zero() {
        return Err(Error::CheckFailed("N^q is not zero".into()));
    }
    let unipotent = &id + &n;
    let powers: Vec<Matrix> = (0..q).map(|j| unipotent.pow(j as u64)).collect();
    if !unipotent.pow(q as u64).is_identity() {
        return Err(Error::CheckFailed("(I + N)^q is not the identity".into()));
    }
    let h_blocks: Vec<Matrix> = (0..h.order())
        .map(|x| {
            let mut blocks: Vec<&Matrix> = Vec::with_capacity(layout.summands());
            for k in 1..=layout.summands() {
                blocks.push(if k < q {
                    s.x().action(x)
                } else if k == q {
                    s.y().action(x)
                } else {
                    s.z().action(x)
                });
            }
            Matrix::block_diagonal(p, &blocks)
        })
        .collect();
    for (x, b) in h_blocks.iter().enumerate() {
        if &n * b != b * &n {
            return Err(Error::CheckFailed(format!("N does not commute with H element {x}")));
        }
    }
    let mut action = vec![Matrix::zeros(p, 0, 0); g.order()];
    for (x, b) in h_blocks.iter().enumerate() {
        for (j, pw) in powers.iter().enumerate() {
            action[g.mul(h_emb.image(x), c_emb.image(j))] = b * pw;
        }
    }
    let module = Arc::new(Module::new(g, p, dim, action)?);
    Ok(TwistModule { module, layout, source: s.clone(), h_embedding: h_emb, c_embedding: c_emb })
}

/// Whether the twisted module is projective relative to the `H` factor.
pub fn twist_projectivity(t: &TwistModule) -> Result<ProjectivityVerdict> {
    is_rel_projective(&t.module, &t.h_embedding)
}

/// A map `θ: T → Ind_H^G(X)` split into blocks `θ_{r,s}: summand s → X`,
/// row `r` belonging to the coset `u^{r-1} H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaBlocks {
    pub layout: Layout,
    /// Dense `q·dim X × dim T` matrix.
    pub theta: Matrix,
}

impl ThetaBlocks {
    /// `θ_{r,s}` for `1 ≤ r ≤ q`, `1 ≤ s ≤ 2q - 1`; `r` is read mod `q`.
    pub fn block(&self, r: isize, s: usize) -> Matrix {
        let q = self.layout.q as isize;
        let r = ((r - 1).rem_euclid(q)) as usize;
        let dx = self.layout.x_dim;
        self.theta.submatrix(r * dx..(r + 1) * dx, self.layout.range(s))
    }

    pub fn add(&self, other: &ThetaBlocks) -> ThetaBlocks {
        ThetaBlocks { layout: self.layout, theta: &self.theta + &other.theta }
    }
}

/// A solution of the factorization problem and the homogeneous solutions.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub particular: ThetaBlocks,
    /// Equivariant `θ` with `π∘θ = 0`; adding any of them gives another solution.
    pub perturbations: Vec<ThetaBlocks>,
}

/// Coset representatives `u^0, …, u^{q-1}` for `H` in `H × C_q`.
fn u_transversal(t: &TwistModule) -> Result<crate::groups::CosetData> {
    transversal(&t.h_embedding, (0..t.q()).map(|j| t.u_pow(j)).collect())
}

/// `Ind_H^G(X)` with summands ordered by powers of `u`.
pub fn induced_target(t: &TwistModule) -> Result<Module> {
    induce_with_transversal(&t.h_embedding, &u_transversal(t)?, t.source.x())
}

/// Projection of `T` onto summand 1, an equivariant map to `X` with trivial `u`-action.
fn first_projection(t: &TwistModule) -> Matrix {
    let p = t.module.prime();
    let mut m = Matrix::zeros(p, t.layout.x_dim, t.layout.dim());
    m.set_block(0, 0, &Matrix::identity(p, t.layout.x_dim));
    m
}

fn assemble(t: &TwistModule, psi: &Matrix) -> ThetaBlocks {
    let q = t.q();
    let dx = t.layout.x_dim;
    let mut theta = Matrix::zeros(t.module.prime(), q * dx, t.layout.dim());
    for r in 0..q {
        let inv = t.group().inv(t.u_pow(r));
        theta.set_block(r * dx, 0, &(psi * t.module.action(inv)));
    }
    ThetaBlocks { layout: t.layout, theta }
}

/// Finds an equivariant `θ: T → Ind_H^G(X)` whose composite with the
/// multiplication map `Ind_H^G(X) → X` is the projection onto summand 1.
///
/// Equivariant maps into an induced module are parametrized by
/// `ψ ∈ Hom_H(T, X)` through `θ_{r,·} = ψ ∘ ρ(u^{-(r-1)})`, so the whole
/// problem is one linear system in the coordinates of `ψ`.
pub fn solve_factorization(t: &TwistModule) -> Result<Option<Factorization>> {
    let x = t.source.x();
    let ga_t = GenAction::restricted(&t.module, &t.h_embedding);
    let ga_x = GenAction::of_module(x);
    let homs = BlockHom::compute(&ga_t, &ga_x);
    let inverses: Vec<&Matrix> = (0..t.q()).map(|r| t.module.action(t.group().inv(t.u_pow(r)))).collect();
    let terms: Vec<Sandwich<'_>> = inverses.iter().map(|m| Sandwich { left: None, right: Some(m) }).collect();
    let a = transfer_matrix(&homs, &homs, &terms);
    let goal = first_projection(t);
    let b = Matrix::column_vector(goal.prime(), &homs.coords(&goal));
    let Solution::Feasible { particular, nullspace_basis } = solve_linear(&a, &b)? else {
        return Ok(None);
    };
    let particular = assemble(t, &homs.combine(&particular.column(0)));
    let perturbations: Vec<ThetaBlocks> =
        nullspace_basis.iter().map(|v| assemble(t, &homs.combine(&v.column(0)))).collect();
    let target = Arc::new(induced_target(t)?);
    let report = verify_factorization(t, &particular, &target, true);
    if !report.passed() {
        return Err(Error::CheckFailed(format!("factorization does not verify:\n{report}")));
    }
    Ok(Some(Factorization { particular, perturbations }))
}

fn multiplication_map(t: &TwistModule) -> Matrix {
    let p = t.module.prime();
    let dx = t.layout.x_dim;
    let mut pi = Matrix::zeros(p, dx, t.q() * dx);
    for r in 0..t.q() {
        pi.set_block(0, r * dx, &Matrix::identity(p, dx));
    }
    pi
}

/// Equivariance into the induced module and the value of `π∘θ`
/// (the projection onto summand 1 when `inhomogeneous`, zero otherwise).
pub fn verify_factorization(t: &TwistModule, blocks: &ThetaBlocks, target: &Module, inhomogeneous: bool) -> Report {
    let mut r = Report::new();
    let theta = &blocks.theta;
    let equivariant = (0..t.group().order()).all(|g| theta * t.module.action(g) == target.action(g) * theta);
    r.record("theta equivariant", equivariant, "");
    let composite = &multiplication_map(t) * theta;
    let ok = if inhomogeneous { composite == first_projection(t) } else { composite.is_zero() };
    r.record("pi theta", ok, "");
    r
}

fn binomials_mod(n: usize, p: Prime) -> Vec<u32> {
    let mut row = vec![1u32];
    for _ in 0..n {
        let mut next = vec![1u32; row.len() + 1];
        for i in 1..row.len() {
            next[i] = p.add(row[i - 1], row[i]);
        }
        row = next;
    }
    row
}

/// The identities that must hold for every solution block family.
pub fn check_relations(blocks: &ThetaBlocks, t: &TwistModule) -> Report {
    let mut rep = Report::new();
    let q = t.q();
    let qi = q as isize;
    let p = t.module.prime();
    let (d1, d2) = (t.source.d1.matrix(), t.source.d2.matrix());
    let x = t.source.x();
    let id_x = Matrix::identity(p, x.dim());
    // each block is H-equivariant from its summand to X
    let mut equivariant = true;
    for r in 1..=qi {
        for s in 1..=t.layout.summands() {
            let b = blocks.block(r, s);
            let src = if s < q {
                x
            } else if s == q {
                t.source.y()
            } else {
                t.source.z()
            };
            equivariant &= (0..x.group().order()).all(|h| &b * src.action(h) == x.action(h) * &b);
        }
    }
    rep.record("blocks are H-equivariant", equivariant, "");
    // θ_{r,s} = θ_{r+1,s} + θ_{r+1,s+1} for X columns s ≤ q - 2, rows mod q
    let mut one = true;
    for s in 1..q.saturating_sub(1) {
        for r in 1..=qi {
            one &= blocks.block(r, s) == &blocks.block(r + 1, s) + &blocks.block(r + 1, s + 1);
        }
    }
    rep.record("X column recursion", one, "");
    // θ_{q,q-1} = θ_{1,q-1} + θ_{1,q} d1
    let two = blocks.block(qi, q - 1) == &blocks.block(1, q - 1) + &(&blocks.block(1, q) * d1);
    rep.record("last X column meets d1", two, "");
    // shift relation in every column: θ_{r,·} = θ_{r+1,·} (I + N)
    let mut shift = true;
    for s in 1..=t.layout.summands() {
        for r in 1..=qi {
            let mut rhs = blocks.block(r + 1, s);
            if s < t.layout.summands() {
                let next = blocks.block(r + 1, s + 1);
                let link = if s == q - 1 {
                    &next * d1
                } else if s == q {
                    &next * d2
                } else {
                    next
                };
                rhs = &rhs + &link;
            }
            shift &= blocks.block(r, s) == rhs;
        }
    }
    rep.record("shift relation", shift, "");
    // θ_{r,s} = Σ_i (-1)^i C(k,i) θ_{r-k+i, s-k} for X columns
    let mut induction = true;
    for s in 1..q {
        for k in 0..s {
            let c = binomials_mod(k, p);
            for r in 1..=qi {
                let mut sum = Matrix::zeros(p, x.dim(), x.dim());
                for (i, &ci) in c.iter().enumerate() {
                    let coeff = if i % 2 == 0 { ci } else { p.neg(ci) };
                    sum.add_scaled(coeff, &blocks.block(r - k as isize + i as isize, s - k));
                }
                induction &= blocks.block(r, s) == sum;
            }
        }
    }
    rep.record("signed induction formula", induction, "");
    let mut col_sum = Matrix::zeros(p, x.dim(), x.dim());
    for r in 1..=qi {
        col_sum.add_scaled(1, &blocks.block(r, 1));
    }
    rep.record("column 1 sums to identity", col_sum == id_x, "");
    let mut rest_zero = true;
    for s in 2..=t.layout.summands() {
        let mut sum = Matrix::zeros(p, x.dim(), t.layout.summand_dim(s));
        for r in 1..=qi {
            sum.add_scaled(1, &blocks.block(r, s));
        }
        rest_zero &= sum.is_zero();
    }
    rep.record("other columns sum to zero", rest_zero, "");
    let every_row = (1..=qi).all(|r| &blocks.block(r, q) * d1 == id_x);
    rep.record("theta_{r,q} d1 = 1 for every r", every_row, "");
    rep
}

/// `s = θ_{1,q}: Y → X`, checked to satisfy `s ∘ d1 = id_X`.
pub fn extract_splitting(blocks: &ThetaBlocks, t: &TwistModule) -> Result<EquivariantMap> {
    if blocks.layout != t.layout {
        return Err(Error::InvalidArgument("theta blocks belong to a different layout".into()));
    }
    let s = blocks.block(1, t.q());
    let map = EquivariantMap::new(t.source.y().clone(), t.source.x().clone(), s)
        .map_err(|e| Error::CheckFailed(format!("theta_(1,q) is not a module map: {e}")))?;
    if !(map.matrix() * t.source.d1.matrix()).is_identity() {
        return Err(Error::CheckFailed("theta_(1,q) d1 is not the identity".into()));
    }
    Ok(map)
}

/// Residues of `(-1)^i C(q-1, i)` mod `p`; passes iff all are 1.
pub fn binomial_identity_check(q: usize, p: Prime) -> Report {
    let mut r = Report::new();
    if q == 0 {
        r.fail("q >= 1", "q = 0");
        return r;
    }
    for (i, &c) in binomials_mod(q - 1, p).iter().enumerate() {
        let residue = if i % 2 == 0 { c } else { p.neg(c) };
        r.record(format!("i = {i}"), residue == 1, format!("residue {residue}"));
    }
    r
}

/// `C(q, i) ≡ 0 (mod p)` for `0 < i < q`.
pub fn freshman_check(q: usize, p: Prime) -> Report {
    let mut r = Report::new();
    let c = binomials_mod(q, p);
    for (i, &ci) in c.iter().enumerate().take(q).skip(1) {
        r.record(format!("C({q}, {i})"), ci == 0, format!("residue {ci}"));
    }
    r
}
