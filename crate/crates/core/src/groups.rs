//! Finite groups given by explicit multiplication tables.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the group order for subgroup enumeration.
pub const DEFAULT_MAX_GROUP_ORDER: usize = 64;
pub const MAX_ORDER_ENV: &str = "TWISTMOD_MAX_GROUP_ORDER";

/// A finite group as a multiplication table on `0..order`.
///
/// `mul(a, b)` is the product `a·b`. The table is validated at construction:
/// Latin square, two-sided identity, associativity (exhaustively up to order 64)
/// and generation by `generators`.
#[derive(Clone, Debug)]
pub struct Group {
    name: String,
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for Group {}

/// Serialized form: `{ "order", "table": [[..]], "generators", "name"? }`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub generators: Vec<usize>,
}

impl Group {
    pub fn from_table(name: impl Into<String>, rows: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::InvalidGroup("table is not square".into()));
        }
        let table: Vec<usize> = rows.into_iter().flatten().collect();
        Self::from_flat(name.into(), order, table, generators)
    }

    fn from_flat(name: String, order: usize, table: Vec<usize>, generators: Vec<usize>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidGroup(msg));
        if table.iter().any(|&x| x >= order) {
            return bad("table entry out of range".into());
        }
        let mut seen = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                let x = table[a * order + b];
                if seen[x] == a {
                    return bad(format!("row {a} is not a permutation"));
                }
                seen[x] = a;
            }
        }
        let mut seen = vec![usize::MAX; order];
        for b in 0..order {
            for a in 0..order {
                let x = table[a * order + b];
                if seen[x] == b {
                    return bad(format!("column {b} is not a permutation"));
                }
                seen[x] = b;
            }
        }
        let Some(identity) =
            (0..order).find(|&e| (0..order).all(|x| table[e * order + x] == x && table[x * order + e] == x))
        else {
            return bad("no identity element".into());
        };
        let mut inverse = vec![0; order];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..order).find(|&b| table[a * order + b] == identity).expect("latin square");
            if table[*inv * order + a] != identity {
                return bad(format!("left and right inverse of {a} differ"));
            }
        }
        let m = |a: usize, b: usize| table[a * order + b];
        if order <= DEFAULT_MAX_GROUP_ORDER {
            for a in 0..order {
                for b in 0..order {
                    let ab = m(a, b);
                    for c in 0..order {
                        if m(ab, c) != m(a, m(b, c)) {
                            return bad(format!("associativity fails at ({a}, {b}, {c})"));
                        }
                    }
                }
            }
        } else {
            // Deterministic sample of triples for large tables.
            let mut x = 0x9e37_79b9_u64;
            for _ in 0..(1 << 18) {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                let (a, b, c) = (
                    (x % order as u64) as usize,
                    ((x >> 20) % order as u64) as usize,
                    ((x >> 40) % order as u64) as usize,
                );
                if m(m(a, b), c) != m(a, m(b, c)) {
                    return bad(format!("associativity fails at ({a}, {b}, {c})"));
                }
            }
        }
        if generators.iter().any(|&g| g >= order) {
            return bad("generator out of range".into());
        }
        let group = Group { name, order, table, identity, inverse, generators };
        if group.closure(&group.generators).len() != order {
            return bad("generators do not generate the group".into());
        }
        Ok(group)
    }

    pub fn from_file(file: &GroupFile) -> Result<Self> {
        if file.table.len() != file.order {
            return Err(Error::InvalidGroup(format!("order {} but {} table rows", file.order, file.table.len())));
        }
        Self::from_table(
            file.name.clone().unwrap_or_else(|| format!("G{}", file.order)),
            file.table.clone(),
            file.generators.clone(),
        )
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            name: Some(self.name.clone()),
            order: self.order,
            table: self.table.chunks(self.order).map(<[usize]>::to_vec).collect(),
            generators: self.generators.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn pow(&self, g: usize, e: usize) -> usize {
        (0..e).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, g);
            n += 1;
        }
        n
    }

    /// `g·x·g⁻¹`
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Elements of the subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&x| seen[x]).collect()
    }

    /// True if some conjugate of the element set `a` is contained in `b`.
    pub fn is_subconjugate(&self, a: &[usize], b: &[usize]) -> bool {
        let bset: HashSet<usize> = b.iter().copied().collect();
        (0..self.order).any(|g| a.iter().all(|&x| bset.contains(&self.conjugate(g, x))))
    }

    pub fn are_conjugate(&self, a: &[usize], b: &[usize]) -> bool {
        a.len() == b.len() && self.is_subconjugate(a, b)
    }

    pub fn is_p_group(&self, p: u32) -> bool {
        let mut n = self.order;
        while n.is_multiple_of(p as usize) {
            n /= p as usize;
        }
        n == 1
    }
}

/// Cyclic group of order `q`; element `i` is `u^i` for the generator `u = 1`.
pub fn cyclic(q: usize) -> Result<Arc<Group>> {
    if q == 0 {
        return Err(Error::InvalidArgument("cyclic group of order 0".into()));
    }
    let table = (0..q).flat_map(|a| (0..q).map(move |b| (a + b) % q)).collect();
    let generators = if q == 1 { vec![] } else { vec![1] };
    Group::from_flat(format!("C{q}"), q, table, generators).map(Arc::new)
}

/// An injective homomorphism `sub → big`, given by images of the elements of `sub`.
#[derive(Clone, Debug)]
pub struct SubgroupEmbedding {
    sub: Arc<Group>,
    big: Arc<Group>,
    map: Vec<usize>,
}

impl SubgroupEmbedding {
    pub fn new(sub: Arc<Group>, big: Arc<Group>, map: Vec<usize>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidGroup(format!("embedding: {m}")));
        if map.len() != sub.order() || map.iter().any(|&x| x >= big.order()) {
            return bad("map has wrong length or range");
        }
        if map.iter().collect::<HashSet<_>>().len() != map.len() {
            return bad("map is not injective");
        }
        if map[sub.identity()] != big.identity() {
            return bad("identity not preserved");
        }
        for a in 0..sub.order() {
            for b in 0..sub.order() {
                if map[sub.mul(a, b)] != big.mul(map[a], map[b]) {
                    return bad(&format!("not multiplicative at ({a}, {b})"));
                }
            }
        }
        Ok(SubgroupEmbedding { sub, big, map })
    }

    pub fn identity(g: &Arc<Group>) -> Self {
        SubgroupEmbedding { sub: g.clone(), big: g.clone(), map: (0..g.order()).collect() }
    }

    pub fn sub(&self) -> &Arc<Group> {
        &self.sub
    }

    pub fn big(&self) -> &Arc<Group> {
        &self.big
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn image(&self, h: usize) -> usize {
        self.map[h]
    }

    /// Sorted element set of the image in `big`.
    pub fn elements(&self) -> Vec<usize> {
        let mut e = self.map.clone();
        e.sort_unstable();
        e
    }

    pub fn index(&self) -> usize {
        self.big.order() / self.sub.order()
    }

    /// Composite `self ∘ inner` for `inner: K → sub`.
    pub fn compose(&self, inner: &SubgroupEmbedding) -> Result<SubgroupEmbedding> {
        if inner.big.as_ref() != self.sub.as_ref() {
            return Err(Error::GroupMismatch("embeddings do not compose".into()));
        }
        let map = inner.map.iter().map(|&h| self.map[h]).collect();
        Ok(SubgroupEmbedding { sub: inner.sub.clone(), big: self.big.clone(), map })
    }
}

/// `G1 × G2` with element `(a, b)` at index `a·|G2| + b`, and both factor embeddings.
pub fn direct_product(g1: &Arc<Group>, g2: &Arc<Group>) -> Result<(Arc<Group>, SubgroupEmbedding, SubgroupEmbedding)> {
    let (n1, n2) = (g1.order(), g2.order());
    let n = n1 * n2;
    let mut table = vec![0; n * n];
    for a1 in 0..n1 {
        for b1 in 0..n2 {
            for a2 in 0..n1 {
                for b2 in 0..n2 {
                    table[(a1 * n2 + b1) * n + a2 * n2 + b2] = g1.mul(a1, a2) * n2 + g2.mul(b1, b2);
                }
            }
        }
    }
    let mut generators: Vec<usize> = g1.generators().iter().map(|&a| a * n2 + g2.identity()).collect();
    generators.extend(g2.generators().iter().map(|&b| g1.identity() * n2 + b));
    let g = Arc::new(Group::from_flat(format!("{}x{}", g1.name(), g2.name()), n, table, generators)?);
    let e1 = SubgroupEmbedding::new(g1.clone(), g.clone(), (0..n1).map(|a| a * n2 + g2.identity()).collect())?;
    let e2 = SubgroupEmbedding::new(g2.clone(), g.clone(), (0..n2).map(|b| g1.identity() * n2 + b).collect())?;
    Ok((g, e1, e2))
}

/// The group generated by permutations of `0..n`, elements in breadth-first order
/// from the identity; generator `i` becomes element index of `gens[i]`.
pub fn from_permutations(name: impl Into<String>, gens: &[Vec<usize>]) -> Result<Arc<Group>> {
    let n = gens.first().map_or(0, Vec::len);
    for p in gens {
        let mut seen = vec![false; n];
        if p.len() != n || p.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return Err(Error::InvalidGroup("generator is not a permutation of a common set".into()));
        }
    }
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { (0..n).map(|i| a[b[i]]).collect() };
    let identity: Vec<usize> = (0..n).collect();
    let mut elements = vec![identity.clone()];
    let mut index: std::collections::HashMap<Vec<usize>, usize> = [(identity, 0)].into_iter().collect();
    let mut k = 0;
    while k < elements.len() {
        for g in gens {
            let x = compose(g, &elements[k]);
            if !index.contains_key(&x) {
                if elements.len() >= 1 << 16 {
                    return Err(Error::InvalidGroup("permutation group too large".into()));
                }
                index.insert(x.clone(), elements.len());
                elements.push(x);
            }
        }
        k += 1;
    }
    let order = elements.len();
    let mut table = Vec::with_capacity(order * order);
    for a in &elements {
        for b in &elements {
            table.push(index[&compose(a, b)]);
        }
    }
    let generators: Vec<usize> = gens.iter().map(|g| index[g]).filter(|&i| i != 0).collect();
    Group::from_flat(name.into(), order, table, generators).map(Arc::new)
}

/// Dihedral group of order `2n`, acting on the `2n` oriented vertices `(i, ±)` of an `n`-gon
/// (faithful also for `n = 2`). Point `(i, s)` has index `i + s·n`.
pub fn dihedral(n: usize) -> Result<Arc<Group>> {
    if n < 2 {
        return Err(Error::InvalidArgument("dihedral group needs n >= 2".into()));
    }
    let rotation: Vec<usize> = (0..2 * n).map(|x| (x % n + 1) % n + x / n * n).collect();
    let reflection: Vec<usize> = (0..2 * n).map(|x| (n - x % n) % n + (1 - x / n) * n).collect();
    from_permutations(format!("D{}", 2 * n), &[rotation, reflection])
}

/// Klein four group `C2 × C2`.
pub fn klein_four() -> Result<Arc<Group>> {
    let c2 = cyclic(2)?;
    let (v4, _, _) = direct_product(&c2, &c2)?;
    Ok(v4)
}

/// A left transversal of `H` in `G` together with the decomposition `g = reps[i]·map(h)`.
#[derive(Clone, Debug)]
pub struct CosetData {
    pub reps: Vec<usize>,
    rep_of: Vec<usize>,
    sub_of: Vec<usize>,
}

impl CosetData {
    /// `(i, h)` with `g = reps[i]·map(h)`.
    pub fn decompose(&self, g: usize) -> (usize, usize) {
        (self.rep_of[g], self.sub_of[g])
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Left cosets `gH`, representatives chosen as the smallest uncovered element index.
pub fn left_cosets(emb: &SubgroupEmbedding) -> CosetData {
    let big = emb.big();
    let sub = emb.sub();
    let mut reps = Vec::new();
    let mut rep_of = vec![usize::MAX; big.order()];
    let mut sub_of = vec![usize::MAX; big.order()];
    for g in 0..big.order() {
        if rep_of[g] != usize::MAX {
            continue;
        }
        let i = reps.len();
        reps.push(g);
        for h in 0..sub.order() {
            let x = big.mul(g, emb.image(h));
            rep_of[x] = i;
            sub_of[x] = h;
        }
    }
    debug_assert!(rep_of.iter().all(|&i| i != usize::MAX));
    CosetData { reps, rep_of, sub_of }
}

/// Coset data for a caller-chosen transversal; fails unless `reps` meets every left coset exactly once.
pub fn transversal(emb: &SubgroupEmbedding, reps: Vec<usize>) -> Result<CosetData> {
    let big = emb.big();
    let sub = emb.sub();
    let mut rep_of = vec![usize::MAX; big.order()];
    let mut sub_of = vec![usize::MAX; big.order()];
    for (i, &g) in reps.iter().enumerate() {
        if g >= big.order() {
            return Err(Error::InvalidArgument(format!("transversal element {g} out of range")));
        }
        for h in 0..sub.order() {
            let x = big.mul(g, emb.image(h));
            if rep_of[x] != usize::MAX {
                return Err(Error::InvalidArgument("transversal meets a coset twice".into()));
            }
            rep_of[x] = i;
            sub_of[x] = h;
        }
    }
    if rep_of.contains(&usize::MAX) {
        return Err(Error::InvalidArgument("transversal misses a coset".into()));
    }
    Ok(CosetData { reps, rep_of, sub_of })
}

fn max_group_order() -> usize {
    std::env::var(MAX_ORDER_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_GROUP_ORDER)
}

/// Builds the subgroup on a sorted element set as a group in its own right.
pub fn subgroup_from_elements(g: &Arc<Group>, elements: &[usize], gens: &[usize]) -> Result<SubgroupEmbedding> {
    let pos = |x: usize| elements.binary_search(&x).map_err(|_| Error::InvalidGroup("element set not closed".into()));
    let n = elements.len();
    let mut table = Vec::with_capacity(n * n);
    for &a in elements {
        for &b in elements {
            table.push(pos(g.mul(a, b))?);
        }
    }
    let local_gens = gens.iter().map(|&x| pos(x)).collect::<Result<Vec<_>>>()?;
    let name = format!("{}<{}>", g.name(), elements.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
    let sub = Arc::new(Group::from_flat(name, n, table, local_gens)?);
    SubgroupEmbedding::new(sub, g.clone(), elements.to_vec())
}

/// The subgroup generated by the given elements.
pub fn subgroup_generated_by(g: &Arc<Group>, gens: &[usize]) -> Result<SubgroupEmbedding> {
    if gens.iter().any(|&x| x >= g.order()) {
        return Err(Error::InvalidArgument("generator index out of range".into()));
    }
    let elements = g.closure(gens);
    let gens: Vec<usize> = gens.iter().copied().filter(|&x| x != g.identity()).collect();
    subgroup_from_elements(g, &elements, &gens)
}

pub fn trivial_subgroup(g: &Arc<Group>) -> SubgroupEmbedding {
    subgroup_generated_by(g, &[]).expect("trivial subgroup")
}

/// All subgroups of `g`, sorted by order and then by element set.
///
/// Enumerated by breadth-first closure: each known subgroup is extended by one
/// element at a time and the result deduplicated by element set.
pub fn subgroups(g: &Arc<Group>) -> Result<Vec<SubgroupEmbedding>> {
    let bound = max_group_order();
    if g.order() > bound {
        return Err(Error::OrderBound { order: g.order(), bound });
    }
    let trivial = vec![g.identity()];
    let mut found: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    let mut gens_of: std::collections::HashMap<Vec<usize>, Vec<usize>> = Default::default();
    found.insert((1, trivial.clone()));
    gens_of.insert(trivial.clone(), vec![]);
    let mut queue = VecDeque::from([trivial]);
    while let Some(elems) = queue.pop_front() {
        let gens = gens_of[&elems].clone();
        let inside: HashSet<usize> = elems.iter().copied().collect();
        for x in 0..g.order() {
            if inside.contains(&x) {
                continue;
            }
            let mut new_gens = gens.clone();
            new_gens.push(x);
            let closed = g.closure(&new_gens);
            if found.insert((closed.len(), closed.clone())) {
                gens_of.insert(closed.clone(), new_gens);
                queue.push_back(closed);
            }
        }
    }
    found
        .into_iter()
        .map(|(_, elems)| {
            let gens = gens_of[&elems].clone();
            subgroup_from_elements(g, &elems, &gens)
        })
        .collect()
}
