//! Equivariant maps, Hom spaces, split tests and short exact sequences.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hom::{transfer_matrix, BlockHom, GenAction, Sandwich};
use crate::linalg::{kron, rank, solve_linear, Matrix, Solution};
use crate::report::Report;
use crate::reps::{same_group, tensor, Module};

/// A module homomorphism, stored as a dim(dst) × dim(src) matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantMap {
    src: Arc<Module>,
    dst: Arc<Module>,
    matrix: Matrix,
}

fn first_failure(src: &Module, dst: &Module, matrix: &Matrix) -> Option<usize> {
    (0..src.group().order()).find(|&g| matrix * src.action(g) != dst.action(g) * matrix)
}

impl EquivariantMap {
    /// Checks shape and commutation with every group element.
    pub fn new(src: Arc<Module>, dst: Arc<Module>, matrix: Matrix) -> Result<Self> {
        same_group(&src, &dst)?;
        if matrix.rows() != dst.dim() || matrix.cols() != src.dim() {
            return Err(Error::Dimension(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                dst.dim(),
                src.dim()
            )));
        }
        if matrix.prime() != src.prime() {
            return Err(Error::PrimeMismatch(matrix.prime().value(), src.prime().value()));
        }
        if let Some(g) = first_failure(&src, &dst, &matrix) {
            return Err(Error::NotEquivariant(format!("fails at group element {g}")));
        }
        Ok(EquivariantMap { src, dst, matrix })
    }

    pub(crate) fn new_unchecked(src: Arc<Module>, dst: Arc<Module>, matrix: Matrix) -> Self {
        debug_assert!(first_failure(&src, &dst, &matrix).is_none());
        EquivariantMap { src, dst, matrix }
    }

    pub fn identity(m: Arc<Module>) -> Self {
        let matrix = Matrix::identity(m.prime(), m.dim());
        EquivariantMap { src: m.clone(), dst: m, matrix }
    }

    pub fn zero(src: Arc<Module>, dst: Arc<Module>) -> Self {
        let matrix = Matrix::zeros(src.prime(), dst.dim(), src.dim());
        EquivariantMap { src, dst, matrix }
    }

    pub fn src(&self) -> &Arc<Module> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<Module> {
        &self.dst
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn is_equivariant(&self) -> bool {
        first_failure(&self.src, &self.dst, &self.matrix).is_none()
    }

    pub fn rank(&self) -> usize {
        rank(&self.matrix)
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.src.dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.dst.dim()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &EquivariantMap) -> Result<EquivariantMap> {
        if inner.dst.as_ref() != self.src.as_ref() {
            return Err(Error::Dimension("compose: codomain of inner map is not the domain".into()));
        }
        Ok(EquivariantMap { src: inner.src.clone(), dst: self.dst.clone(), matrix: &self.matrix * &inner.matrix })
    }

    /// `id_W ⊗ self` on `W ⊗ src → W ⊗ dst`.
    pub fn tensor_left(&self, w: &Module) -> Result<EquivariantMap> {
        let src = Arc::new(tensor(w, &self.src)?);
        let dst = Arc::new(tensor(w, &self.dst)?);
        let matrix = kron(&Matrix::identity(w.prime(), w.dim()), &self.matrix)?;
        Ok(EquivariantMap { src, dst, matrix })
    }
}

/// Outcome of a split test; the witness has been verified exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Split {
    Witness(EquivariantMap),
    NotSplit,
}

impl Split {
    pub fn is_split(&self) -> bool {
        matches!(self, Split::Witness(_))
    }

    pub fn witness(&self) -> Option<&EquivariantMap> {
        match self {
            Split::Witness(s) => Some(s),
            Split::NotSplit => None,
        }
    }
}

/// A basis of `Hom_{kG}(M, N)`.
pub fn hom_basis(m: &Arc<Module>, n: &Arc<Module>) -> Result<Vec<EquivariantMap>> {
    same_group(m, n)?;
    let h = BlockHom::compute(&GenAction::of_module(m), &GenAction::of_module(n));
    Ok((0..h.dim()).map(|i| EquivariantMap::new_unchecked(m.clone(), n.clone(), h.element(i))).collect())
}

pub fn hom_dim(m: &Module, n: &Module) -> Result<usize> {
    same_group(m, n)?;
    Ok(BlockHom::compute(&GenAction::of_module(m), &GenAction::of_module(n)).dim())
}

/// Solves `Σ c_i · (term applied to basis_i) = target` over a block Hom space
/// and returns the combination, or `None` when infeasible.
pub(crate) fn solve_in_span(
    goal_space: &BlockHom,
    unknowns: &BlockHom,
    terms: &[Sandwich<'_>],
    goal: &Matrix,
) -> Result<Option<Matrix>> {
    let a = transfer_matrix(goal_space, unknowns, terms);
    let b = Matrix::column_vector(goal.prime(), &goal_space.coords(goal));
    match solve_linear(&a, &b)? {
        Solution::Infeasible => Ok(None),
        Solution::Feasible { particular, .. } => Ok(Some(unknowns.combine(&particular.column(0)))),
    }
}

/// Looks for an equivariant `s` with `s ∘ f = id`.
pub fn is_split_mono(f: &EquivariantMap) -> Result<Split> {
    if !f.is_injective() {
        return Err(Error::NotInjective);
    }
    let (x, y) = (GenAction::of_module(&f.src), GenAction::of_module(&f.dst));
    let unknowns = BlockHom::compute(&y, &x);
    let goal_space = BlockHom::compute(&x, &x);
    let id = Matrix::identity(f.src.prime(), f.src.dim());
    let terms = [Sandwich { left: None, right: Some(&f.matrix) }];
    let Some(s) = solve_in_span(&goal_space, &unknowns, &terms, &id)? else {
        return Ok(Split::NotSplit);
    };
    let s = EquivariantMap { src: f.dst.clone(), dst: f.src.clone(), matrix: s };
    if !s.is_equivariant() || !(&s.matrix * &f.matrix).is_identity() {
        return Err(Error::CheckFailed("split mono witness does not verify".into()));
    }
    Ok(Split::Witness(s))
}

/// Looks for an equivariant `s` with `f ∘ s = id`.
pub fn is_split_epi(f: &EquivariantMap) -> Result<Split> {
    if !f.is_surjective() {
        return Err(Error::NotSurjective);
    }
    let (y, z) = (GenAction::of_module(&f.src), GenAction::of_module(&f.dst));
    let unknowns = BlockHom::compute(&z, &y);
    let goal_space = BlockHom::compute(&z, &z);
    let id = Matrix::identity(f.dst.prime(), f.dst.dim());
    let terms = [Sandwich { left: Some(&f.matrix), right: None }];
    let Some(s) = solve_in_span(&goal_space, &unknowns, &terms, &id)? else {
        return Ok(Split::NotSplit);
    };
    let s = EquivariantMap { src: f.dst.clone(), dst: f.src.clone(), matrix: s };
    if !s.is_equivariant() || !(&f.matrix * &s.matrix).is_identity() {
        return Err(Error::CheckFailed("split epi witness does not verify".into()));
    }
    Ok(Split::Witness(s))
}

/// `0 → X → Y → Z → 0` given by `d1: X → Y` and `d2: Y → Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortExactSeq {
    pub d1: EquivariantMap,
    pub d2: EquivariantMap,
}

impl ShortExactSeq {
    /// Validates exactness; use [`check_ses`] for a full report without failing.
    pub fn new(d1: EquivariantMap, d2: EquivariantMap) -> Result<Self> {
        let s = ShortExactSeq { d1, d2 };
        let report = check_ses(&s);
        if !report.passed() {
            let names: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
            return Err(Error::NotExact(names.join(", ")));
        }
        Ok(s)
    }

    pub fn x(&self) -> &Arc<Module> {
        self.d1.src()
    }

    pub fn y(&self) -> &Arc<Module> {
        self.d1.dst()
    }

    pub fn z(&self) -> &Arc<Module> {
        self.d2.dst()
    }

    /// Canonical `0 → M → M ⊕ N → N → 0`.
    pub fn canonical(m: &Arc<Module>, n: &Arc<Module>) -> Result<Self> {
        let sum = Arc::new(crate::reps::direct_sum(m, n)?);
        let p = m.prime();
        let (a, b) = (m.dim(), n.dim());
        let mut inc = Matrix::zeros(p, a + b, a);
        inc.set_block(0, 0, &Matrix::identity(p, a));
        let mut proj = Matrix::zeros(p, b, a + b);
        proj.set_block(0, a, &Matrix::identity(p, b));
        ShortExactSeq::new(
            EquivariantMap::new(m.clone(), sum.clone(), inc)?,
            EquivariantMap::new(sum, n.clone(), proj)?,
        )
    }
}

/// Summand-wise direct sum of two sequences.
pub fn direct_sum_ses(a: &ShortExactSeq, b: &ShortExactSeq) -> Result<ShortExactSeq> {
    let sum = |m: &Module, n: &Module| crate::reps::direct_sum(m, n).map(Arc::new);
    let (x, y, z) = (sum(a.x(), b.x())?, sum(a.y(), b.y())?, sum(a.z(), b.z())?);
    let p = x.prime();
    let d1 = Matrix::block_diagonal(p, &[a.d1.matrix(), b.d1.matrix()]);
    let d2 = Matrix::block_diagonal(p, &[a.d2.matrix(), b.d2.matrix()]);
    ShortExactSeq::new(EquivariantMap::new(x, y.clone(), d1)?, EquivariantMap::new(y, z, d2)?)
}

/// Checks every exactness condition, naming the ones that fail.
pub fn check_ses(s: &ShortExactSeq) -> Report {
    let mut r = Report::new();
    let (d1, d2) = (&s.d1, &s.d2);
    let composable = d1.dst.as_ref() == d2.src.as_ref();
    r.record("composable", composable, if composable { "" } else { "codomain of d1 differs from domain of d2" });
    r.record("d1 equivariant", d1.is_equivariant(), "");
    r.record("d2 equivariant", d2.is_equivariant(), "");
    if !composable {
        return r;
    }
    let r1 = d1.rank();
    let r2 = d2.rank();
    r.record("d1 injective", r1 == d1.src.dim(), format!("rank {r1}, dim X {}", d1.src.dim()));
    r.record("d2 surjective", r2 == d2.dst.dim(), format!("rank {r2}, dim Z {}", d2.dst.dim()));
    let comp = &d2.matrix * &d1.matrix;
    r.record("d2 d1 = 0", comp.is_zero(), "");
    // image(d1) ⊆ kernel(d2) follows from d2 d1 = 0; equality is then a dimension count
    let dim_ker = d2.src.dim() - r2;
    r.record("image d1 = kernel d2", comp.is_zero() && r1 == dim_ker, format!("rank d1 {r1}, dim ker d2 {dim_ker}"));
    r
}

/// Applies `W ⊗ (−)` to both maps.
pub fn tensor_ses(s: &ShortExactSeq, w: &Module) -> Result<ShortExactSeq> {
    same_group(s.x(), w)?;
    let d1 = s.d1.tensor_left(w)?;
    let mut d2 = s.d2.tensor_left(w)?;
    // share the middle module so the sequence is composable by pointer too
    d2.src = d1.dst.clone();
    ShortExactSeq::new(d1, d2)
}

/// Whether `W ⊗ S` splits, with the verified splitting of `W ⊗ d1`.
pub fn is_w_split(s: &ShortExactSeq, w: &Module) -> Result<Split> {
    let t = tensor_ses(s, w)?;
    is_split_mono(&t.d1)
}

/// Outcome of [`is_isomorphic`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Isomorphism {
    Yes(EquivariantMap),
    /// Forced by dimensions of the modules or of their Hom spaces.
    No,
    ProbablyNo,
}

pub const DEFAULT_ISO_TRIALS: usize = 64;

/// Randomized isomorphism search: samples random elements of `Hom(M, N)`.
pub fn is_isomorphic(m: &Arc<Module>, n: &Arc<Module>, trials: usize, seed: u64) -> Result<Isomorphism> {
    same_group(m, n)?;
    if m.dim() != n.dim() {
        return Ok(Isomorphism::No);
    }
    let (gm, gn) = (GenAction::of_module(m), GenAction::of_module(n));
    let forward = BlockHom::compute(&gm, &gn);
    let backward = BlockHom::compute(&gn, &gm);
    if forward.dim() != backward.dim() || forward.dim() == 0 {
        return Ok(Isomorphism::No);
    }
    let p = m.prime();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let coeffs: Vec<u32> = (0..forward.dim()).map(|_| rng.gen_range(0..p.value())).collect();
        let phi = forward.combine(&coeffs);
        if rank(&phi) == m.dim() {
            let map = EquivariantMap { src: m.clone(), dst: n.clone(), matrix: phi };
            if !map.is_equivariant() {
                return Err(Error::CheckFailed("isomorphism witness is not equivariant".into()));
            }
            return Ok(Isomorphism::Yes(map));
        }
    }
    Ok(Isomorphism::ProbablyNo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::cyclic;
    use crate::linalg::Prime;
    use crate::reps::{regular_module, trivial_module};

    fn c2_setup() -> (Arc<Module>, Arc<Module>) {
        let g = cyclic(2).unwrap();
        let p = Prime::new(2).unwrap();
        (Arc::new(trivial_module(&g, p)), Arc::new(regular_module(&g, p)))
    }

    fn socle_ses() -> ShortExactSeq {
        let (k, r) = c2_setup();
        let p = k.prime();
        let inc = Matrix::from_rows(p, &[vec![1], vec![1]]).unwrap();
        let aug = Matrix::from_rows(p, &[vec![1, 1]]).unwrap();
        ShortExactSeq::new(
            EquivariantMap::new(k.clone(), r.clone(), inc).unwrap(),
            EquivariantMap::new(r, k, aug).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn hom_dimensions_over_c2() {
        let (k, r) = c2_setup();
        assert_eq!(hom_basis(&k, &r).unwrap().len(), 1);
        assert_eq!(hom_basis(&r, &r).unwrap().len(), 2);
        let id = Matrix::identity(r.prime(), 2);
        let basis = hom_basis(&r, &r).unwrap();
        let stacked: Vec<Vec<i64>> =
            basis.iter().map(|b| b.matrix().entries().iter().map(|&x| x as i64).collect()).collect();
        let mut with_id = stacked.clone();
        with_id.push(id.entries().iter().map(|&x| x as i64).collect());
        let p = r.prime();
        assert_eq!(rank(&Matrix::from_rows(p, &stacked).unwrap()), rank(&Matrix::from_rows(p, &with_id).unwrap()));
    }

    #[test]
    fn non_equivariant_rejected() {
        let (k, r) = c2_setup();
        let m = Matrix::from_rows(k.prime(), &[vec![1], vec![0]]).unwrap();
        assert!(matches!(EquivariantMap::new(k, r, m), Err(Error::NotEquivariant(_))));
    }

    #[test]
    fn split_tests_on_socle_sequence() {
        let s = socle_ses();
        assert_eq!(is_split_mono(&s.d1).unwrap(), Split::NotSplit);
        assert_eq!(is_split_epi(&s.d2).unwrap(), Split::NotSplit);
        let id = EquivariantMap::identity(s.y().clone());
        assert!(is_split_mono(&id).unwrap().is_split());
        assert!(is_split_epi(&id).unwrap().is_split());
        assert!(matches!(is_split_mono(&s.d2), Err(Error::NotInjective)));
        assert!(matches!(is_split_epi(&s.d1), Err(Error::NotSurjective)));
    }

    #[test]
    fn canonical_sequence_splits() {
        let (k, r) = c2_setup();
        let s = ShortExactSeq::canonical(&r, &k).unwrap();
        let w = is_split_mono(&s.d1).unwrap();
        let s1 = w.witness().unwrap();
        assert!((s1.matrix() * s.d1.matrix()).is_identity());
        assert!(is_split_epi(&s.d2).unwrap().is_split());
    }

    #[test]
    fn check_ses_flags_nonzero_composite() {
        let (k, r) = c2_setup();
        let p = k.prime();
        let inc =
            EquivariantMap::new(k.clone(), r.clone(), Matrix::from_rows(p, &[vec![1], vec![1]]).unwrap()).unwrap();
        let id = EquivariantMap::identity(r.clone());
        let report = check_ses(&ShortExactSeq { d1: inc, d2: id });
        assert!(!report.passed());
        assert!(report.failures().any(|c| c.name == "d2 d1 = 0"));
        assert!(check_ses(&socle_ses()).passed());
    }

    #[test]
    fn w_split_free_and_trivial() {
        let (k, r) = c2_setup();
        let s = socle_ses();
        assert!(is_w_split(&s, &r).unwrap().is_split());
        assert!(!is_w_split(&s, &k).unwrap().is_split());
    }

    #[test]
    fn isomorphism_search() {
        let (k, r) = c2_setup();
        assert!(matches!(is_isomorphic(&r, &r, 64, 1).unwrap(), Isomorphism::Yes(_)));
        assert_eq!(is_isomorphic(&k, &r, 64, 1).unwrap(), Isomorphism::No);
    }
}
