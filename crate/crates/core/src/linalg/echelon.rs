//! Incremental semi-echelon forms over GF(p).
//!
//! Rows are inserted one at a time and reduced against the pivot rows already
//! present, in insertion order. The pivot of a row is its first nonzero column
//! after reduction, and every stored row is scaled so that its pivot entry is 1.
//! GF(2) rows are bit-packed into `u64` words; other primes use one `u32` per entry.

use super::Prime;

pub(crate) trait Field: Copy {
    type Row: Clone;

    fn pack(&self, vals: &[u32]) -> Self::Row;
    fn unpack(&self, row: &Self::Row, len: usize) -> Vec<u32>;
    fn get(&self, row: &Self::Row, i: usize) -> u32;
    /// `dst += c * src`
    fn axpy(&self, dst: &mut Self::Row, c: u32, src: &Self::Row);
    fn scale(&self, row: &mut Self::Row, c: u32);
    fn leading(&self, row: &Self::Row) -> Option<usize>;
    fn neg(&self, x: u32) -> u32;
    fn inv(&self, x: u32) -> u32;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Gf2;

impl Field for Gf2 {
    type Row = Vec<u64>;

    fn pack(&self, vals: &[u32]) -> Vec<u64> {
        let mut row = vec![0u64; vals.len().div_ceil(64)];
        for (i, &v) in vals.iter().enumerate() {
            if v & 1 == 1 {
                row[i >> 6] |= 1u64 << (i & 63);
            }
        }
        row
    }

    fn unpack(&self, row: &Vec<u64>, len: usize) -> Vec<u32> {
        (0..len).map(|i| ((row[i >> 6] >> (i & 63)) & 1) as u32).collect()
    }

    #[inline]
    fn get(&self, row: &Vec<u64>, i: usize) -> u32 {
        ((row[i >> 6] >> (i & 63)) & 1) as u32
    }

    #[inline]
    fn axpy(&self, dst: &mut Vec<u64>, c: u32, src: &Vec<u64>) {
        if c & 1 == 1 {
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= *s;
            }
        }
    }

    fn scale(&self, row: &mut Vec<u64>, c: u32) {
        if c & 1 == 0 {
            row.iter_mut().for_each(|w| *w = 0);
        }
    }

    fn leading(&self, row: &Vec<u64>) -> Option<usize> {
        row.iter().position(|&w| w != 0).map(|i| i * 64 + row[i].trailing_zeros() as usize)
    }

    fn neg(&self, x: u32) -> u32 {
        x
    }

    fn inv(&self, x: u32) -> u32 {
        debug_assert_eq!(x, 1);
        x
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Fp(pub Prime);

impl Field for Fp {
    type Row = Vec<u32>;

    fn pack(&self, vals: &[u32]) -> Vec<u32> {
        vals.to_vec()
    }

    fn unpack(&self, row: &Vec<u32>, _len: usize) -> Vec<u32> {
        row.clone()
    }

    #[inline]
    fn get(&self, row: &Vec<u32>, i: usize) -> u32 {
        row[i]
    }

    #[inline]
    fn axpy(&self, dst: &mut Vec<u32>, c: u32, src: &Vec<u32>) {
        if c == 0 {
            return;
        }
        let p = self.0.value() as u64;
        let c = c as u64;
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = ((*d as u64 + c * s as u64) % p) as u32;
            }
        }
    }

    fn scale(&self, row: &mut Vec<u32>, c: u32) {
        row.iter_mut().for_each(|x| *x = self.0.mul(*x, c));
    }

    fn leading(&self, row: &Vec<u32>) -> Option<usize> {
        row.iter().position(|&x| x != 0)
    }

    fn neg(&self, x: u32) -> u32 {
        self.0.neg(x)
    }

    fn inv(&self, x: u32) -> u32 {
        self.0.inv(x)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct EchelonCore<F: Field> {
    field: F,
    ncols: usize,
    rows: Vec<F::Row>,
    pivots: Vec<usize>,
}

impl<F: Field> EchelonCore<F> {
    fn new(field: F, ncols: usize) -> Self {
        Self { field, ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    fn reduce(&self, row: &mut F::Row) {
        for (r, &c) in self.rows.iter().zip(&self.pivots) {
            let v = self.field.get(row, c);
            if v != 0 {
                self.field.axpy(row, self.field.neg(v), r);
            }
        }
    }

    fn insert_packed(&mut self, mut row: F::Row) -> Option<usize> {
        self.reduce(&mut row);
        let lead = self.field.leading(&row)?;
        let lv = self.field.get(&row, lead);
        if lv != 1 {
            self.field.scale(&mut row, self.field.inv(lv));
        }
        self.rows.push(row);
        self.pivots.push(lead);
        Some(lead)
    }

    /// Reduced row echelon form: rows sorted by pivot, pivot columns cleared elsewhere.
    fn rref(&self) -> (Vec<usize>, Vec<Vec<u32>>) {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        let mut rows: Vec<F::Row> = order.iter().map(|&i| self.rows[i].clone()).collect();
        let pivots: Vec<usize> = order.iter().map(|&i| self.pivots[i]).collect();
        for j in (0..rows.len()).rev() {
            let (upper, lower) = rows.split_at_mut(j);
            let pivot_row = &lower[0];
            for r in upper.iter_mut() {
                let v = self.field.get(r, pivots[j]);
                if v != 0 {
                    self.field.axpy(r, self.field.neg(v), pivot_row);
                }
            }
        }
        let rows = rows.iter().map(|r| self.field.unpack(r, self.ncols)).collect();
        (pivots, rows)
    }
}

/// Semi-echelon form with a backend chosen by the prime.
#[derive(Clone, Debug)]
pub(crate) enum Echelon {
    Gf2(EchelonCore<Gf2>),
    Fp(EchelonCore<Fp>),
}

impl Echelon {
    pub(crate) fn new(prime: Prime, ncols: usize) -> Self {
        if prime.value() == 2 {
            Echelon::Gf2(EchelonCore::new(Gf2, ncols))
        } else {
            Echelon::Fp(EchelonCore::new(Fp(prime), ncols))
        }
    }

    pub(crate) fn ncols(&self) -> usize {
        match self {
            Echelon::Gf2(e) => e.ncols,
            Echelon::Fp(e) => e.ncols,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        match self {
            Echelon::Gf2(e) => e.rows.len(),
            Echelon::Fp(e) => e.rows.len(),
        }
    }

    /// Inserts a row (entries already reduced mod p). Returns the new pivot, or
    /// `None` if the row was dependent on the rows already present.
    pub(crate) fn insert(&mut self, row: &[u32]) -> Option<usize> {
        debug_assert_eq!(row.len(), self.ncols());
        match self {
            Echelon::Gf2(e) => {
                let packed = e.field.pack(row);
                e.insert_packed(packed)
            }
            Echelon::Fp(e) => {
                let packed = e.field.pack(row);
                e.insert_packed(packed)
            }
        }
    }

    pub(crate) fn rref(&self) -> (Vec<usize>, Vec<Vec<u32>>) {
        match self {
            Echelon::Gf2(e) => e.rref(),
            Echelon::Fp(e) => e.rref(),
        }
    }

    /// Basis of the solution space of `row · x = 0` over all stored rows, restricted
    /// to the first `ncols` columns. Free variables are taken in increasing column order.
    pub(crate) fn nullspace(&self, prime: Prime, ncols: usize) -> Vec<Vec<u32>> {
        let (pivots, rows) = self.rref();
        nullspace_from_rref(prime, ncols, &pivots, &rows)
    }
}

pub(crate) fn nullspace_from_rref(prime: Prime, ncols: usize, pivots: &[usize], rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut is_pivot = vec![false; ncols];
    for &c in pivots {
        if c < ncols {
            is_pivot[c] = true;
        }
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![0u32; ncols];
        x[free] = 1;
        for (row, &pc) in rows.iter().zip(pivots) {
            if pc < ncols {
                x[pc] = prime.neg(row[free]);
            }
        }
        basis.push(x);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_packing_roundtrip() {
        let vals: Vec<u32> = (0..130).map(|i| (i % 3 == 0) as u32).collect();
        let packed = Gf2.pack(&vals);
        assert_eq!(Gf2.unpack(&packed, 130), vals);
        assert_eq!(Gf2.leading(&packed), Some(0));
    }

    #[test]
    fn dependent_rows_are_rejected() {
        let p = Prime::new(3).unwrap();
        let mut e = Echelon::new(p, 3);
        assert_eq!(e.insert(&[0, 2, 1]), Some(1));
        assert_eq!(e.insert(&[0, 1, 2]), None);
        assert_eq!(e.insert(&[1, 0, 0]), Some(0));
        assert_eq!(e.rank(), 2);
        let ns = e.nullspace(p, 3);
        assert_eq!(ns.len(), 1);
        // row (0,1,2) after scaling: x1 + 2 x2 = 0 with x2 free -> x1 = -2 = 1
        assert_eq!(ns[0], vec![0, 1, 1]);
    }
}
