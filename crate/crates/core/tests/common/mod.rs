#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use twistmod::groups::{cyclic, dihedral, direct_product, klein_four, subgroups, Group, SubgroupEmbedding};
use twistmod::linalg::{kron, Matrix, Prime};
use twistmod::reps::{direct_sum, induce, quotient, regular_module, submodule, trivial_module, Module};

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn product(a: &Arc<Group>, b: &Arc<Group>) -> Arc<Group> {
    direct_product(a, b).unwrap().0
}

/// Groups of order at most 16 with the characteristic used for them.
pub fn group_zoo() -> Vec<(&'static str, Arc<Group>, Prime)> {
    let c = |n| cyclic(n).unwrap();
    vec![
        ("C2", c(2), prime(2)),
        ("C3", c(3), prime(3)),
        ("C4", c(4), prime(2)),
        ("C8", c(8), prime(2)),
        ("C9", c(9), prime(3)),
        ("V4", klein_four().unwrap(), prime(2)),
        ("C2xC4", product(&c(2), &c(4)), prime(2)),
        ("C2^3", product(&klein_four().unwrap(), &c(2)), prime(2)),
        ("C4xC4", product(&c(4), &c(4)), prime(2)),
        ("C2^4", product(&klein_four().unwrap(), &klein_four().unwrap()), prime(2)),
        ("S3", dihedral(3).unwrap(), prime(2)),
        ("S3", dihedral(3).unwrap(), prime(3)),
        ("D8", dihedral(4).unwrap(), prime(2)),
        ("C3xC3", product(&c(3), &c(3)), prime(3)),
    ]
}

pub fn random_vector(rng: &mut ChaCha8Rng, p: Prime, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..p.value())).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, p: Prime, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(p, rows, cols, random_vector(rng, p, rows * cols)).unwrap()
}

pub fn random_subgroup(rng: &mut ChaCha8Rng, g: &Arc<Group>) -> SubgroupEmbedding {
    subgroups(g).unwrap().choose(rng).unwrap().clone()
}

fn permutation_module(rng: &mut ChaCha8Rng, g: &Arc<Group>, p: Prime) -> Module {
    let h = random_subgroup(rng, g);
    induce(&h, &trivial_module(h.sub(), p)).unwrap()
}

/// A random cyclic submodule or quotient of a permutation module, or a permutation module itself.
fn random_piece(rng: &mut ChaCha8Rng, g: &Arc<Group>, p: Prime, max_dim: usize) -> Module {
    loop {
        let base = match rng.gen_range(0..3) {
            0 => trivial_module(g, p),
            1 if g.order() <= max_dim => regular_module(g, p),
            _ => permutation_module(rng, g, p),
        };
        let m = match rng.gen_range(0..3) {
            0 => base,
            1 => {
                let v = random_vector(rng, p, base.dim());
                submodule(&base, &[v]).unwrap().module
            }
            _ => {
                let v = random_vector(rng, p, base.dim());
                let s = submodule(&base, &[v]).unwrap();
                quotient(&base, &s.inclusion).unwrap().module
            }
        };
        if m.dim() > 0 && m.dim() <= max_dim {
            return m;
        }
    }
}

/// A random module of dimension at most `max_dim`, possibly a direct sum of two pieces,
/// presented in a random basis.
pub fn random_module(rng: &mut ChaCha8Rng, g: &Arc<Group>, p: Prime, max_dim: usize) -> Module {
    let a = random_piece(rng, g, p, max_dim);
    let m = if a.dim() < max_dim && rng.gen_bool(0.4) {
        let b = random_piece(rng, g, p, max_dim - a.dim());
        direct_sum(&a, &b).unwrap()
    } else {
        a
    };
    loop {
        let c = random_matrix(rng, p, m.dim(), m.dim());
        if c.inverse().is_some() {
            return m.change_basis(&c).unwrap();
        }
    }
}

/// `dim Hom_G(M, N)` as the nullity of the stacked equivariance equations
/// `(I ⊗ ρ_N(g)) - (ρ_M(g)^T ⊗ I)` on `vec(θ)`, column-major.
pub fn hom_dim_by_kron(m: &Module, n: &Module) -> usize {
    let p = m.prime();
    let unknowns = m.dim() * n.dim();
    if unknowns == 0 {
        return 0;
    }
    let mut stacked: Option<Matrix> = None;
    for &g in m.group().generators() {
        let left = kron(&Matrix::identity(p, m.dim()), n.action(g)).unwrap();
        let right = kron(&m.action(g).transpose(), &Matrix::identity(p, n.dim())).unwrap();
        let block = left.try_sub(&right).unwrap();
        stacked = Some(match stacked {
            None => block,
            Some(s) => s.vstack(&block).unwrap(),
        });
    }
    match stacked {
        Some(s) => unknowns - s.rank(),
        None => unknowns,
    }
}

/// Projectivity over the trivial subgroup, decided by the dimension of the module alone:
/// for a p-group, `M` is projective iff it is free iff `dim M^G · |G| = dim M`.
pub fn is_free_p_group(m: &Module) -> bool {
    let k = trivial_module(m.group(), m.prime());
    let fixed = hom_dim_by_kron(&k, m);
    fixed * m.group().order() == m.dim()
}
