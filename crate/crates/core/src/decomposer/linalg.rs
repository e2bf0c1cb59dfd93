//! Exact sparse row reduction over ℚ, kept fraction-free: rows are stored
//! with integer entries and divided by their content after each update.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type SparseRow = BTreeMap<usize, BigInt>;

/// Incrementally maintained reduced row echelon form.
#[derive(Debug, Clone, Default)]
pub struct RowReducer {
    ncols: usize,
    /// pivot column → row; every pivot row vanishes on the other pivot columns
    pivots: BTreeMap<usize, SparseRow>,
}

fn normalize(row: &mut SparseRow) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let lead_negative = row.values().next().is_some_and(|v| v.is_negative());
    if g.is_zero() {
        return;
    }
    if lead_negative {
        g = -g;
    }
    if !g.is_one() {
        for v in row.values_mut() {
            *v = &*v / &g;
        }
    }
}

/// Clears denominators of a rational row.
pub fn integer_row(row: impl IntoIterator<Item = (usize, BigRational)>) -> SparseRow {
    let entries: Vec<(usize, BigRational)> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    let mut l = BigInt::one();
    for (_, v) in &entries {
        l = l.lcm(v.denom());
    }
    let mut out = SparseRow::new();
    for (c, v) in entries {
        let x = v.numer() * (&l / v.denom());
        *out.entry(c).or_insert_with(BigInt::zero) += x;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// row ← p_c·row − row_c·pivot, which clears column c.
fn eliminate(row: &mut SparseRow, c: usize, pivot: &SparseRow) {
    let rc = match row.get(&c) {
        Some(v) => v.clone(),
        None => return,
    };
    let pc = &pivot[&c];
    for v in row.values_mut() {
        *v = &*v * pc;
    }
    for (k, pv) in pivot {
        let e = row.entry(*k).or_insert_with(BigInt::zero);
        *e -= &rc * pv;
    }
    row.retain(|_, v| !v.is_zero());
    normalize(row);
}

impl RowReducer {
    pub fn new(ncols: usize) -> Self {
        RowReducer { ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ncols
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        let cols: Vec<usize> = row.keys().copied().filter(|c| self.pivots.contains_key(c)).collect();
        for c in cols {
            eliminate(&mut row, c, &self.pivots[&c]);
        }
        let Some((&lead, _)) = row.iter().next() else { return false };
        normalize(&mut row);
        for p in self.pivots.values_mut() {
            if p.contains_key(&lead) {
                eliminate(p, lead, &row);
            }
        }
        self.pivots.insert(lead, row);
        true
    }

    pub fn insert_rational(&mut self, row: impl IntoIterator<Item = (usize, BigRational)>) -> bool {
        self.insert(integer_row(row))
    }

    /// Reduced form of a row against the current pivots (zero iff it lies in the span).
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        row.retain(|_, v| !v.is_zero());
        let cols: Vec<usize> = row.keys().copied().filter(|c| self.pivots.contains_key(c)).collect();
        for c in cols {
            eliminate(&mut row, c, &self.pivots[&c]);
        }
        row
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseRow> {
        self.pivots.values()
    }

    /// A basis of the null space, one primitive integer vector per free column.
    pub fn kernel(&self) -> Vec<SparseRow> {
        let mut out = Vec::new();
        for f in (0..self.ncols).filter(|c| !self.pivots.contains_key(c)) {
            // x_f = L, x_c = −L p_f / p_c with L the lcm of the pivots involved
            let mut l = BigInt::one();
            for (_, p) in self.pivots.iter().filter(|(_, p)| p.contains_key(&f)) {
                l = l.lcm(&p.values().next().unwrap().abs());
            }
            let mut v = SparseRow::new();
            v.insert(f, l.clone());
            for (c, p) in &self.pivots {
                if let Some(pf) = p.get(&f) {
                    v.insert(*c, -(&l * pf) / &p[c]);
                }
            }
            normalize(&mut v);
            out.push(v);
        }
        out
    }
}
