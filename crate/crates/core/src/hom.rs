//! Homomorphism spaces between modules given by generator matrices.
//!
//! Both modules are first split into coordinate blocks: maximal sets of basis
//! indices closed under the nonzero pattern of every generator. Each block is a
//! direct summand, so `Hom(M, N)` is the direct sum of the block-pair Hom spaces.
//! A block-pair Hom space is computed by spinning: a homomorphism is determined
//! by the images of the seed vectors of a spinning basis, and every relation
//! `g·v_k = Σ c_l v_l` among spinning vectors becomes a linear constraint on
//! those images. Either the source is spun directly, or the dual of the target
//! is spun and the result transposed, whichever gives the smaller system.
//!
//! Every part of a [`BlockHom`] stores its basis in reduced echelon form with
//! respect to the flattened block entries, so the coordinates of any element of
//! the span are its entries at the pivot positions.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::groups::SubgroupEmbedding;
use crate::linalg::{Echelon, Matrix, Prime};
use crate::reps::Module;

/// Images of a generating set and of its inverses.
#[derive(Clone, Debug)]
pub(crate) struct GenAction {
    pub prime: Prime,
    pub dim: usize,
    pub gens: Vec<Matrix>,
    pub inv_gens: Vec<Matrix>,
}

impl GenAction {
    pub fn of_module(m: &Module) -> Self {
        let g = m.group();
        GenAction {
            prime: m.prime(),
            dim: m.dim(),
            gens: g.generators().iter().map(|&x| m.action(x).clone()).collect(),
            inv_gens: g.generators().iter().map(|&x| m.action(g.inv(x)).clone()).collect(),
        }
    }

    /// Generators of the subgroup acting through the restriction of `m`.
    pub fn restricted(m: &Module, emb: &SubgroupEmbedding) -> Self {
        let (sub, big) = (emb.sub(), emb.big());
        GenAction {
            prime: m.prime(),
            dim: m.dim(),
            gens: sub.generators().iter().map(|&h| m.action(emb.image(h)).clone()).collect(),
            inv_gens: sub.generators().iter().map(|&h| m.action(big.inv(emb.image(h))).clone()).collect(),
        }
    }

    fn select(&self, block: &[usize]) -> Self {
        GenAction {
            prime: self.prime,
            dim: block.len(),
            gens: self.gens.iter().map(|a| a.select(block, block)).collect(),
            inv_gens: self.inv_gens.iter().map(|a| a.select(block, block)).collect(),
        }
    }

    fn dual(&self) -> Self {
        GenAction {
            prime: self.prime,
            dim: self.dim,
            gens: self.inv_gens.iter().map(Matrix::transpose).collect(),
            inv_gens: self.gens.iter().map(Matrix::transpose).collect(),
        }
    }

    /// Coordinate blocks, each sorted, ordered by smallest index.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        coordinate_blocks(&self.gens, self.dim)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub(crate) fn coordinate_blocks(gens: &[Matrix], dim: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..dim).collect();
    for a in gens {
        for r in 0..dim {
            for (c, &x) in a.row(r).iter().enumerate() {
                if x != 0 && r != c {
                    let (pr, pc) = (find(&mut parent, r), find(&mut parent, c));
                    if pr != pc {
                        parent[pr.max(pc)] = pr.min(pc);
                    }
                }
            }
        }
    }
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..dim {
        let root = find(&mut parent, i);
        by_root.entry(root).or_default().push(i);
    }
    let mut blocks: Vec<Vec<usize>> = by_root.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    blocks
}

/// A spinning basis: vectors generated from seeds by repeated generator action.
struct Spin {
    vectors: Vec<Vec<u32>>,
    seed_of: Vec<usize>,
    parent: Vec<Option<(usize, usize)>>,
    /// `(k, i) -> l` when `gen_i · v_k` was added as `v_l`
    children: HashMap<(usize, usize), usize>,
    seeds: usize,
}

fn spin(ga: &GenAction) -> Spin {
    let n = ga.dim;
    let mut ech = Echelon::new(ga.prime, n);
    let mut s = Spin { vectors: vec![], seed_of: vec![], parent: vec![], children: HashMap::new(), seeds: 0 };
    for j in 0..n {
        if s.vectors.len() == n {
            break;
        }
        let mut e = vec![0u32; n];
        e[j] = 1;
        if ech.insert(&e).is_none() {
            continue;
        }
        let seed = s.seeds;
        s.seeds += 1;
        let start = s.vectors.len();
        s.vectors.push(e);
        s.seed_of.push(seed);
        s.parent.push(None);
        let mut k = start;
        while k < s.vectors.len() {
            for (i, a) in ga.gens.iter().enumerate() {
                let w = a.apply(&s.vectors[k]);
                if ech.insert(&w).is_some() {
                    s.children.insert((k, i), s.vectors.len());
                    s.vectors.push(w);
                    s.seed_of.push(seed);
                    s.parent.push(Some((k, i)));
                }
            }
            k += 1;
        }
    }
    s
}

/// All `Φ` (fixed.dim × spun.dim) with `fixed_g · Φ = Φ · spun_g` for every generator.
fn hom_by_spinning(spun: &GenAction, sp: &Spin, fixed: &GenAction) -> Vec<Matrix> {
    let p = spun.prime;
    let (m, n, t) = (spun.dim, fixed.dim, sp.seeds);
    if m == 0 || n == 0 {
        return vec![];
    }
    let mut v = Matrix::zeros(p, m, m);
    for (k, vec) in sp.vectors.iter().enumerate() {
        for (i, &x) in vec.iter().enumerate() {
            v.set(i, k, x);
        }
    }
    let vinv = v.inverse().expect("spinning basis spans the module");
    // words[k] maps the image of seed σ(k) to the image of v_k
    let mut words: Vec<Matrix> = Vec::with_capacity(m);
    for k in 0..m {
        let w = match sp.parent[k] {
            None => Matrix::identity(p, n),
            Some((parent, i)) => &fixed.gens[i] * &words[parent],
        };
        words.push(w);
    }
    let ncols = t * n;
    let mut ech = Echelon::new(p, ncols);
    let mut row = vec![0u32; ncols];
    'outer: for (i, a) in spun.gens.iter().enumerate() {
        let coords = &(&vinv * a) * &v;
        for k in 0..m {
            if sp.children.contains_key(&(k, i)) {
                continue;
            }
            // fixed_i · P_k x_σ(k) - Σ_l c_l P_l x_σ(l) = 0
            let mut blocks: Vec<Option<Matrix>> = vec![None; t];
            let lead = &fixed.gens[i] * &words[k];
            blocks[sp.seed_of[k]] = Some(lead);
            for (l, word) in words.iter().enumerate().take(m) {
                let c = coords.get(l, k);
                if c == 0 {
                    continue;
                }
                let slot = blocks[sp.seed_of[l]].get_or_insert_with(|| Matrix::zeros(p, n, n));
                slot.add_scaled(p.neg(c), word);
            }
            for r in 0..n {
                row.iter_mut().for_each(|x| *x = 0);
                let mut nonzero = false;
                for (s, b) in blocks.iter().enumerate() {
                    if let Some(b) = b {
                        let src = b.row(r);
                        if src.iter().any(|&x| x != 0) {
                            row[s * n..(s + 1) * n].copy_from_slice(src);
                            nonzero = true;
                        }
                    }
                }
                if nonzero {
                    ech.insert(&row);
                    if ech.rank() == ncols {
                        break 'outer;
                    }
                }
            }
        }
    }
    ech.nullspace(p, ncols)
        .into_iter()
        .map(|x| {
            let mut phi_spin = Matrix::zeros(p, n, m);
            for (k, word) in words.iter().enumerate().take(m) {
                let s = sp.seed_of[k];
                let img = word.apply(&x[s * n..(s + 1) * n]);
                for (r, &val) in img.iter().enumerate() {
                    phi_spin.set(r, k, val);
                }
            }
            &phi_spin * &vinv
        })
        .collect()
}

fn spin_cost(spun_dim: usize, fixed_dim: usize, seeds: usize, ngens: usize) -> f64 {
    let (s, f, t, r) = (spun_dim as f64, fixed_dim as f64, seeds as f64, ngens.max(1) as f64);
    r * s * f * f * f + r * s * f * (t * f) * (t * f) / 32.0
}

/// Basis of `Hom(src, dst)` as dst.dim × src.dim matrices (not normalized).
pub(crate) fn hom_local(src: &GenAction, dst: &GenAction) -> Vec<Matrix> {
    if src.dim == 0 || dst.dim == 0 {
        return vec![];
    }
    let fwd = spin(src);
    let dst_dual = dst.dual();
    let bwd = spin(&dst_dual);
    let r = src.gens.len();
    let cost_fwd = spin_cost(src.dim, dst.dim, fwd.seeds, r);
    let cost_bwd = spin_cost(dst.dim, src.dim, bwd.seeds, r);
    if cost_fwd <= cost_bwd {
        hom_by_spinning(src, &fwd, dst)
    } else {
        hom_by_spinning(&dst_dual, &bwd, &src.dual()).into_iter().map(|psi| psi.transpose()).collect()
    }
}

/// One block pair of a [`BlockHom`]: maps from `src` block to `dst` block.
#[derive(Clone, Debug)]
pub(crate) struct HomPart {
    pub src: usize,
    pub dst: usize,
    /// Local matrices, |dst block| × |src block|, in reduced echelon form.
    pub basis: Vec<Matrix>,
    /// Local `(row, col)` pivot of each basis element.
    pub pivots: Vec<(usize, usize)>,
}

/// A Hom space stored block by block.
#[derive(Clone, Debug)]
pub(crate) struct BlockHom {
    pub prime: Prime,
    pub src_dim: usize,
    pub dst_dim: usize,
    pub src_blocks: Vec<Vec<usize>>,
    pub dst_blocks: Vec<Vec<usize>>,
    pub parts: Vec<HomPart>,
    offsets: Vec<usize>,
    part_of: HashMap<(usize, usize), usize>,
}

fn normalize(p: Prime, rows: usize, cols: usize, basis: Vec<Matrix>) -> (Vec<Matrix>, Vec<(usize, usize)>) {
    let mut ech = Echelon::new(p, rows * cols);
    for b in &basis {
        ech.insert(b.entries());
    }
    let (pivots, reduced) = ech.rref();
    let mats = reduced.into_iter().map(|e| Matrix::from_vec(p, rows, cols, e).expect("shape")).collect();
    let pivots = pivots.into_iter().map(|x| (x / cols, x % cols)).collect();
    (mats, pivots)
}

impl BlockHom {
    pub fn compute(src: &GenAction, dst: &GenAction) -> BlockHom {
        let src_blocks = src.blocks();
        let dst_blocks = dst.blocks();
        Self::compute_with_blocks(src, dst, src_blocks, dst_blocks)
    }

    pub fn compute_with_blocks(
        src: &GenAction,
        dst: &GenAction,
        src_blocks: Vec<Vec<usize>>,
        dst_blocks: Vec<Vec<usize>>,
    ) -> BlockHom {
        let p = src.prime;
        let src_local: Vec<GenAction> = src_blocks.iter().map(|b| src.select(b)).collect();
        let dst_local: Vec<GenAction> = dst_blocks.iter().map(|b| dst.select(b)).collect();
        let pairs: Vec<(usize, usize)> =
            (0..src_blocks.len()).flat_map(|a| (0..dst_blocks.len()).map(move |b| (a, b))).collect();
        let parts: Vec<HomPart> = pairs
            .par_iter()
            .filter_map(|&(a, b)| {
                let basis = hom_local(&src_local[a], &dst_local[b]);
                if basis.is_empty() {
                    return None;
                }
                let (basis, pivots) = normalize(p, dst_local[b].dim, src_local[a].dim, basis);
                Some(HomPart { src: a, dst: b, basis, pivots })
            })
            .collect();
        let mut offsets = Vec::with_capacity(parts.len());
        let mut acc = 0;
        let mut part_of = HashMap::new();
        for (i, part) in parts.iter().enumerate() {
            offsets.push(acc);
            acc += part.basis.len();
            part_of.insert((part.src, part.dst), i);
        }
        BlockHom { prime: p, src_dim: src.dim, dst_dim: dst.dim, src_blocks, dst_blocks, parts, offsets, part_of }
    }

    pub fn dim(&self) -> usize {
        self.parts.iter().map(|p| p.basis.len()).sum()
    }

    fn locate(&self, idx: usize) -> (usize, usize) {
        let part = self.offsets.partition_point(|&o| o <= idx) - 1;
        (part, idx - self.offsets[part])
    }

    /// Dense matrix of basis element `idx`.
    pub fn element(&self, idx: usize) -> Matrix {
        let (pi, j) = self.locate(idx);
        let mut out = Matrix::zeros(self.prime, self.dst_dim, self.src_dim);
        self.add_local(&mut out, pi, &self.parts[pi].basis[j], 1);
        out
    }

    fn add_local(&self, out: &mut Matrix, pi: usize, local: &Matrix, coeff: u32) {
        let part = &self.parts[pi];
        let (rows, cols) = (&self.dst_blocks[part.dst], &self.src_blocks[part.src]);
        let p = self.prime;
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                let x = local.get(i, j);
                if x != 0 {
                    out.set(r, c, p.add(out.get(r, c), p.mul(coeff, x)));
                }
            }
        }
    }

    /// `Σ coeffs[i] · element(i)` as a dense matrix.
    pub fn combine(&self, coeffs: &[u32]) -> Matrix {
        assert_eq!(coeffs.len(), self.dim());
        let mut out = Matrix::zeros(self.prime, self.dst_dim, self.src_dim);
        for (pi, part) in self.parts.iter().enumerate() {
            for (j, b) in part.basis.iter().enumerate() {
                let c = coeffs[self.offsets[pi] + j];
                if c != 0 {
                    self.add_local(&mut out, pi, b, c);
                }
            }
        }
        out
    }

    /// Coordinates of a dense matrix assumed to lie in the span.
    pub fn coords(&self, dense: &Matrix) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.dim());
        for part in &self.parts {
            let (rows, cols) = (&self.dst_blocks[part.dst], &self.src_blocks[part.src]);
            for &(r, c) in &part.pivots {
                out.push(dense.get(rows[r], cols[c]));
            }
        }
        out
    }
}

/// Nonzero sub-blocks of a matrix relative to row and column block systems:
/// `result[col_block] = [(row_block, submatrix)]`.
fn coupling(m: &Matrix, row_blocks: &[Vec<usize>], col_blocks: &[Vec<usize>]) -> Coupling {
    col_blocks
        .iter()
        .map(|cb| {
            row_blocks
                .iter()
                .enumerate()
                .filter_map(|(ri, rb)| {
                    let sub = m.select(rb, cb);
                    (!sub.is_zero()).then_some((ri, sub))
                })
                .collect()
        })
        .collect()
}

fn identity_coupling(p: Prime, blocks: &[Vec<usize>]) -> Vec<Vec<(usize, Matrix)>> {
    blocks.iter().enumerate().map(|(i, b)| vec![(i, Matrix::identity(p, b.len()))]).collect()
}

/// One term `left · θ · right` of a linear map between block Hom spaces; `None` is the identity.
pub(crate) struct Sandwich<'a> {
    pub left: Option<&'a Matrix>,
    pub right: Option<&'a Matrix>,
}

/// Nonzero blocks `(other block, matrix)` of a coupling matrix, per block.
type Coupling = Vec<Vec<(usize, Matrix)>>;

/// Matrix (target.dim × source.dim) of `θ ↦ Σ_terms left · θ · right`, in pivot
/// coordinates of `target`. The image of every basis element must lie in the
/// span of `target`; callers re-verify solutions densely.
pub(crate) fn transfer_matrix(target: &BlockHom, source: &BlockHom, terms: &[Sandwich<'_>]) -> Matrix {
    let p = target.prime;
    // left: source.dst -> target.dst, indexed by source dst block
    // right: target.src -> source.src, indexed by source src block (as the row side)
    let couplings: Vec<(Coupling, Coupling)> = terms
        .iter()
        .map(|t| {
            let left = match t.left {
                Some(l) => coupling(l, &target.dst_blocks, &source.dst_blocks),
                None => {
                    assert_eq!(target.dst_blocks, source.dst_blocks, "identity needs equal block systems");
                    identity_coupling(p, &source.dst_blocks)
                }
            };
            let right = match t.right {
                Some(r) => coupling(&r.transpose(), &target.src_blocks, &source.src_blocks)
                    .into_iter()
                    .map(|v| v.into_iter().map(|(i, m)| (i, m.transpose())).collect())
                    .collect(),
                None => {
                    assert_eq!(target.src_blocks, source.src_blocks, "identity needs equal block systems");
                    identity_coupling(p, &source.src_blocks)
                }
            };
            (left, right)
        })
        .collect();
    let columns: Vec<Vec<Vec<u32>>> = source
        .parts
        .par_iter()
        .map(|part| {
            let mut cols = vec![vec![0u32; target.dim()]; part.basis.len()];
            for (left, right) in &couplings {
                for (d, lsub) in &left[part.dst] {
                    for (c, rsub) in &right[part.src] {
                        let Some(&ti) = target.part_of.get(&(*c, *d)) else { continue };
                        let tpart = &target.parts[ti];
                        let off = target.offsets[ti];
                        for (j, theta) in part.basis.iter().enumerate() {
                            let x = &(lsub * theta) * rsub;
                            for (q, &(r, cc)) in tpart.pivots.iter().enumerate() {
                                let v = x.get(r, cc);
                                if v != 0 {
                                    cols[j][off + q] = p.add(cols[j][off + q], v);
                                }
                            }
                        }
                    }
                }
            }
            cols
        })
        .collect();
    let mut out = Matrix::zeros(p, target.dim(), source.dim());
    let mut j = 0;
    for part_cols in columns {
        for col in part_cols {
            for (i, &v) in col.iter().enumerate() {
                if v != 0 {
                    out.set(i, j, v);
                }
            }
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{cyclic, klein_four};
    use crate::reps::{direct_sum, regular_module, trivial_module};

    fn brute_force_hom_dim(src: &Module, dst: &Module) -> usize {
        // enumerate every dst.dim × src.dim matrix over GF(p)
        let p = src.prime().value() as u64;
        let cells = src.dim() * dst.dim();
        let total = p.pow(cells as u32);
        let mut count = 0u64;
        for code in 0..total {
            let mut c = code;
            let entries: Vec<u32> = (0..cells)
                .map(|_| {
                    let x = (c % p) as u32;
                    c /= p;
                    x
                })
                .collect();
            let phi = Matrix::from_vec(src.prime(), dst.dim(), src.dim(), entries).unwrap();
            if (0..src.group().order()).all(|g| &phi * src.action(g) == dst.action(g) * &phi) {
                count += 1;
            }
        }
        // |Hom| = p^dim
        let mut d = 0;
        let mut n = count;
        while n > 1 {
            n /= p;
            d += 1;
        }
        d
    }

    #[test]
    fn blocks_of_direct_sum() {
        let c2 = cyclic(2).unwrap();
        let p = Prime::new(2).unwrap();
        let m = direct_sum(&regular_module(&c2, p), &trivial_module(&c2, p)).unwrap();
        let blocks = GenAction::of_module(&m).blocks();
        assert_eq!(blocks, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn hom_dims_match_enumeration() {
        let p = Prime::new(2).unwrap();
        let c2 = cyclic(2).unwrap();
        let k = trivial_module(&c2, p);
        let r = regular_module(&c2, p);
        for (a, b) in [(&k, &r), (&r, &r), (&r, &k), (&k, &k)] {
            let h = BlockHom::compute(&GenAction::of_module(a), &GenAction::of_module(b));
            assert_eq!(h.dim(), brute_force_hom_dim(a, b));
        }
        let v4 = klein_four().unwrap();
        let rv = regular_module(&v4, p);
        let kv = trivial_module(&v4, p);
        let h = BlockHom::compute(&GenAction::of_module(&rv), &GenAction::of_module(&kv));
        assert_eq!(h.dim(), brute_force_hom_dim(&rv, &kv));
    }

    #[test]
    fn both_directions_agree() {
        let p = Prime::new(3).unwrap();
        let c3 = cyclic(3).unwrap();
        let r = regular_module(&c3, p);
        let k = trivial_module(&c3, p);
        let m = direct_sum(&r, &k).unwrap();
        let (a, b) = (GenAction::of_module(&m), GenAction::of_module(&r));
        let fwd = hom_by_spinning(&a, &spin(&a), &b);
        let bd = b.dual();
        let bwd: Vec<Matrix> = hom_by_spinning(&bd, &spin(&bd), &a.dual()).into_iter().map(|x| x.transpose()).collect();
        assert_eq!(fwd.len(), bwd.len());
        let span = |v: &[Matrix]| {
            let mut e = Echelon::new(p, 12);
            v.iter().for_each(|x| {
                e.insert(x.entries());
            });
            e.rref()
        };
        assert_eq!(span(&fwd), span(&bwd));
        for phi in fwd {
            for g in 0..3 {
                assert_eq!(&phi * m.action(g), r.action(g) * &phi);
            }
        }
    }
}
