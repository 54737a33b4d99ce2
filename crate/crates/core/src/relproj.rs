//! Relative projectivity: Higman's trace criterion, a lifting oracle,
//! projectivity relative to a module, and vertices.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{left_cosets, subgroups, SubgroupEmbedding};
use crate::hom::{transfer_matrix, BlockHom, GenAction, Sandwich};
use crate::linalg::{solve_linear, Matrix, Solution};
use crate::morph::{is_split_epi, solve_in_span, EquivariantMap};
use crate::reps::{dual, induce, restrict, same_group, tensor, Module};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Trace,
    LiftingOracle,
    EvalSplit,
}

/// Evidence attached to a positive verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `θ ∈ End_H(Res M)` with `Tr(θ) = id`.
    TracePreimage(Matrix),
    /// A section of `Ind Res M ↠ M`.
    Section(EquivariantMap),
    /// Sections `M → E_C` of the evaluation map, one per coordinate block `C`
    /// of `W ⊗ W*`, listed with the block's indices.
    EvalSection(Vec<(Vec<usize>, Matrix)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivityVerdict {
    pub projective: bool,
    pub witness: Option<Witness>,
    pub method: Method,
}

impl ProjectivityVerdict {
    fn negative(method: Method) -> Self {
        ProjectivityVerdict { projective: false, witness: None, method }
    }

    /// Re-checks a trace or section witness for projectivity relative to `emb`.
    pub fn verify_relative(&self, m: &Module, emb: &SubgroupEmbedding) -> bool {
        match (&self.witness, self.projective) {
            (None, projective) => !projective,
            (Some(Witness::TracePreimage(theta)), true) => {
                is_h_equivariant(theta, m, emb) && trace_matrix(theta, emb, m).is_identity()
            }
            (Some(Witness::Section(s)), true) => {
                s.is_equivariant() && s.src().as_ref() == m && {
                    let mu = counit(emb, m);
                    (&mu * s.matrix()).is_identity()
                }
            }
            _ => false,
        }
    }

    /// Re-checks an evaluation-split witness for `W`-projectivity.
    pub fn verify_w(&self, m: &Module, w: &Module) -> bool {
        match (&self.witness, self.projective) {
            (None, projective) => !projective,
            (Some(Witness::EvalSection(parts)), true) => verify_eval_section(parts, m, w).unwrap_or(false),
            _ => false,
        }
    }
}

fn is_h_equivariant(theta: &Matrix, m: &Module, emb: &SubgroupEmbedding) -> bool {
    emb.elements().iter().all(|&h| theta * m.action(h) == m.action(h) * theta)
}

fn trace_matrix(theta: &Matrix, emb: &SubgroupEmbedding, m: &Module) -> Matrix {
    let big = emb.big();
    let mut out = Matrix::zeros(m.prime(), m.dim(), m.dim());
    for &g in &left_cosets(emb).reps {
        let term = &(m.action(g) * theta) * m.action(big.inv(g));
        out.add_scaled(1, &term);
    }
    out
}

/// `Tr_H^G(θ) = Σ_g ρ(g) θ ρ(g)⁻¹` over left coset representatives.
pub fn relative_trace(theta: &Matrix, emb: &SubgroupEmbedding, m: &Arc<Module>) -> Result<EquivariantMap> {
    if emb.big().as_ref() != m.group().as_ref() {
        return Err(Error::GroupMismatch("relative_trace: module is not over the ambient group".into()));
    }
    if theta.rows() != m.dim() || theta.cols() != m.dim() {
        return Err(Error::Dimension("relative_trace: theta must be square of the module dimension".into()));
    }
    if !is_h_equivariant(theta, m, emb) {
        return Err(Error::NotEquivariant("theta does not commute with the subgroup".into()));
    }
    let tr = trace_matrix(theta, emb, m);
    EquivariantMap::new(m.clone(), m.clone(), tr)
}

/// Decides `H`-projectivity by asking whether `id_M` is a relative trace.
pub fn is_rel_projective(m: &Module, emb: &SubgroupEmbedding) -> Result<ProjectivityVerdict> {
    if emb.big().as_ref() != m.group().as_ref() {
        return Err(Error::GroupMismatch("is_rel_projective: module is not over the ambient group".into()));
    }
    let ga = GenAction::restricted(m, emb);
    let end_h = BlockHom::compute(&ga, &ga);
    let big = emb.big();
    let reps = left_cosets(emb).reps;
    let terms: Vec<Sandwich<'_>> =
        reps.iter().map(|&g| Sandwich { left: Some(m.action(g)), right: Some(m.action(big.inv(g))) }).collect();
    let id = Matrix::identity(m.prime(), m.dim());
    let Some(theta) = solve_in_span(&end_h, &end_h, &terms, &id)? else {
        return Ok(ProjectivityVerdict::negative(Method::Trace));
    };
    if !is_h_equivariant(&theta, m, emb) || !trace_matrix(&theta, emb, m).is_identity() {
        return Err(Error::CheckFailed("trace preimage does not verify".into()));
    }
    Ok(ProjectivityVerdict { projective: true, witness: Some(Witness::TracePreimage(theta)), method: Method::Trace })
}

/// The multiplication map `Ind_H^G Res_H M → M`, block `i` being `ρ(rep_i)`.
fn counit(emb: &SubgroupEmbedding, m: &Module) -> Matrix {
    let reps = left_cosets(emb).reps;
    let d = m.dim();
    let mut mu = Matrix::zeros(m.prime(), d, d * reps.len());
    for (i, &g) in reps.iter().enumerate() {
        mu.set_block(0, i * d, m.action(g));
    }
    mu
}

/// Independent check: `M` is `H`-projective iff `Ind_H^G Res_H M ↠ M` splits.
pub fn lifting_oracle(m: &Module, emb: &SubgroupEmbedding) -> Result<bool> {
    Ok(lifting_verdict(m, emb)?.projective)
}

pub fn lifting_verdict(m: &Module, emb: &SubgroupEmbedding) -> Result<ProjectivityVerdict> {
    let res = restrict(emb, m)?;
    let ind = Arc::new(induce(emb, &res)?);
    let target = Arc::new(m.clone());
    let mu = EquivariantMap::new(ind, target, counit(emb, m))?;
    Ok(match is_split_epi(&mu)? {
        crate::morph::Split::Witness(s) => {
            ProjectivityVerdict { projective: true, witness: Some(Witness::Section(s)), method: Method::LiftingOracle }
        }
        crate::morph::Split::NotSplit => ProjectivityVerdict::negative(Method::LiftingOracle),
    })
}

/// One coordinate block `C` of `W ⊗ W*`: the module `(W ⊗ W*)_C ⊗ M` and its evaluation map to `M`.
struct EvalPiece {
    block: Vec<usize>,
    module: Module,
    ev: Matrix,
}

fn eval_pieces(m: &Module, w: &Module) -> Result<Vec<EvalPiece>> {
    let v = tensor(w, &dual(w))?;
    let dw = w.dim();
    let blocks = GenAction::of_module(&v).blocks();
    let p = m.prime();
    let dm = m.dim();
    blocks
        .into_iter()
        .map(|block| {
            let action = v.actions().iter().map(|a| a.select(&block, &block)).collect();
            let vc = Module::new(v.group().clone(), p, block.len(), action)?;
            let module = tensor(&vc, m)?;
            let mut ev = Matrix::zeros(p, dm, block.len() * dm);
            let id = Matrix::identity(p, dm);
            for (c, &idx) in block.iter().enumerate() {
                // basis vector w_i ⊗ f_j sits at i·dim W + j and evaluates to δ_ij
                if idx / dw == idx % dw {
                    ev.set_block(0, c * dm, &id);
                }
            }
            Ok(EvalPiece { block, module, ev })
        })
        .collect()
}

fn verify_eval_section(parts: &[(Vec<usize>, Matrix)], m: &Module, w: &Module) -> Result<bool> {
    let pieces = eval_pieces(m, w)?;
    let mut total = Matrix::zeros(m.prime(), m.dim(), m.dim());
    for (block, s) in parts {
        let Some(piece) = pieces.iter().find(|pc| &pc.block == block) else {
            return Ok(false);
        };
        if s.rows() != piece.module.dim() || s.cols() != m.dim() {
            return Ok(false);
        }
        let equivariant = (0..m.group().order()).all(|g| s * m.action(g) == piece.module.action(g) * s);
        if !equivariant {
            return Ok(false);
        }
        total.add_scaled(1, &(&piece.ev * s));
    }
    Ok(total.is_identity())
}

/// Decides `M ∈ P(W)` by asking whether evaluation `W ⊗ W* ⊗ M → M` splits.
///
/// `W ⊗ W*` is split into coordinate blocks first, so the search runs over
/// `⊕_C Hom_G(M, (W ⊗ W*)_C ⊗ M)` without forming the full tensor product.
pub fn is_w_projective(m: &Module, w: &Module) -> Result<ProjectivityVerdict> {
    same_group(m, w)?;
    let pieces = eval_pieces(m, w)?;
    let gm = GenAction::of_module(m);
    let end = BlockHom::compute(&gm, &gm);
    let columns: Vec<Matrix> = pieces
        .par_iter()
        .map(|piece| {
            let homs = BlockHom::compute(&gm, &GenAction::of_module(&piece.module));
            transfer_matrix(&end, &homs, &[Sandwich { left: Some(&piece.ev), right: None }])
        })
        .collect();
    let total: usize = columns.iter().map(Matrix::cols).sum();
    let p = m.prime();
    let mut a = Matrix::zeros(p, end.dim(), total);
    let mut offset = 0;
    for c in &columns {
        a.set_block(0, offset, c);
        offset += c.cols();
    }
    let b = Matrix::column_vector(p, &end.coords(&Matrix::identity(p, m.dim())));
    let coeffs = match solve_linear(&a, &b)? {
        Solution::Infeasible => return Ok(ProjectivityVerdict::negative(Method::EvalSplit)),
        Solution::Feasible { particular, .. } => particular.column(0),
    };
    let mut parts = Vec::new();
    let mut offset = 0;
    for (piece, c) in pieces.iter().zip(&columns) {
        let local = &coeffs[offset..offset + c.cols()];
        offset += c.cols();
        if local.iter().all(|&x| x == 0) {
            continue;
        }
        // recomputed rather than kept, since these bases can be large
        let homs = BlockHom::compute(&gm, &GenAction::of_module(&piece.module));
        parts.push((piece.block.clone(), homs.combine(local)));
    }
    let verdict =
        ProjectivityVerdict { projective: true, witness: Some(Witness::EvalSection(parts)), method: Method::EvalSplit };
    if !verdict.verify_w(m, w) {
        return Err(Error::CheckFailed("evaluation section does not verify".into()));
    }
    Ok(verdict)
}

/// Minimal subgroups `H` (up to conjugacy) such that `M` is `H`-projective.
pub fn vertex(m: &Module) -> Result<Vec<SubgroupEmbedding>> {
    let g = m.group();
    let all = subgroups(g)?;
    let flags: Vec<bool> =
        all.par_iter().map(|h| is_rel_projective(m, h).map(|v| v.projective)).collect::<Result<_>>()?;
    let projective: Vec<&SubgroupEmbedding> = all.iter().zip(&flags).filter(|(_, &f)| f).map(|(h, _)| h).collect();
    let mut minimal: Vec<SubgroupEmbedding> = Vec::new();
    for h in &projective {
        let elems = h.elements();
        let has_smaller =
            projective.iter().any(|k| k.sub().order() < h.sub().order() && g.is_subconjugate(&k.elements(), &elems));
        if has_smaller || minimal.iter().any(|k| g.are_conjugate(&k.elements(), &elems)) {
            continue;
        }
        minimal.push((*h).clone());
    }
    Ok(minimal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{cyclic, klein_four, trivial_subgroup};
    use crate::linalg::Prime;
    use crate::reps::{regular_module, trivial_module};

    #[test]
    fn trace_examples() {
        let g = cyclic(2).unwrap();
        let p = Prime::new(2).unwrap();
        let k = Arc::new(trivial_module(&g, p));
        let t = trivial_subgroup(&g);
        let tr = relative_trace(&Matrix::identity(p, 1), &t, &k).unwrap();
        assert!(tr.matrix().is_zero());
        let whole = SubgroupEmbedding::identity(&g);
        let r = Arc::new(regular_module(&g, p));
        let theta = Matrix::from_rows(p, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(relative_trace(&theta, &whole, &r).unwrap().matrix(), &theta);
    }

    #[test]
    fn higman_examples() {
        let g = cyclic(2).unwrap();
        let p = Prime::new(2).unwrap();
        let k = trivial_module(&g, p);
        let t = trivial_subgroup(&g);
        assert!(!is_rel_projective(&k, &t).unwrap().projective);
        assert!(!lifting_oracle(&k, &t).unwrap());
        let whole = SubgroupEmbedding::identity(&g);
        let v = is_rel_projective(&k, &whole).unwrap();
        assert!(v.projective && v.verify_relative(&k, &whole));
        let r = regular_module(&g, p);
        let v = is_rel_projective(&r, &t).unwrap();
        assert!(v.projective && v.verify_relative(&r, &t));
        assert!(lifting_oracle(&r, &t).unwrap());
    }

    #[test]
    fn w_projectivity_examples() {
        let g = klein_four().unwrap();
        let p = Prime::new(2).unwrap();
        let k = trivial_module(&g, p);
        let r = regular_module(&g, p);
        let v = is_w_projective(&r, &k).unwrap();
        assert!(v.projective && v.verify_w(&r, &k));
        assert!(is_w_projective(&k, &k).unwrap().projective);
        assert!(!is_w_projective(&k, &r).unwrap().projective);
        assert!(is_w_projective(&r, &r).unwrap().projective);
    }

    #[test]
    fn vertex_examples() {
        let g = klein_four().unwrap();
        let p = Prime::new(2).unwrap();
        let vk = vertex(&trivial_module(&g, p)).unwrap();
        assert_eq!(vk.len(), 1);
        assert_eq!(vk[0].sub().order(), 4);
        let vr = vertex(&regular_module(&g, p)).unwrap();
        assert_eq!(vr.len(), 1);
        assert_eq!(vr[0].sub().order(), 1);
    }
}
