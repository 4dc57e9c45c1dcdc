//! Dense linear algebra over F_b: row reduction, rank, null spaces and
//! enumeration of row spans.

use crate::error::Result;
use crate::field::{checked_count, PrimeBase};

/// Reduced row echelon form of `rows` (each of length `cols`).
/// Returns the nonzero reduced rows and their pivot columns.
pub fn rref(base: PrimeBase, rows: &[Vec<u32>], cols: usize) -> (Vec<Vec<u32>>, Vec<usize>) {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = base.inv(m[rank][col]).expect("nonzero pivot");
        for v in m[rank].iter_mut() {
            *v = base.mul(*v, inv);
        }
        for i in 0..m.len() {
            if i != rank && m[i][col] != 0 {
                let factor = m[i][col];
                for c in 0..cols {
                    let sub = base.mul(factor, m[rank][c]);
                    m[i][c] = base.sub(m[i][c], sub);
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    (m, pivots)
}

pub fn rank(base: PrimeBase, rows: &[Vec<u32>], cols: usize) -> usize {
    rref(base, rows, cols).1.len()
}

/// Basis of `{x : rows * x = 0}`.
pub fn null_space(base: PrimeBase, rows: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
    let (r, pivots) = rref(base, rows, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; cols];
        v[free] = 1;
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = base.neg(row[free]);
        }
        basis.push(v);
    }
    basis
}

/// Iterator over every element of the row span of `basis`, starting at 0.
/// Consecutive items differ by adding one basis row (odometer order).
#[derive(Clone, Debug)]
pub struct Span<'a> {
    base: PrimeBase,
    basis: &'a [Vec<u32>],
    coeffs: Vec<u32>,
    current: Vec<u32>,
    remaining: u64,
    started: bool,
}

impl<'a> Span<'a> {
    pub fn new(base: PrimeBase, basis: &'a [Vec<u32>], len: usize) -> Result<Self> {
        let remaining = checked_count(base, basis.len() as u32, "linear span")?;
        Ok(Span {
            base,
            basis,
            coeffs: vec![0; basis.len()],
            current: vec![0; len],
            remaining,
            started: false,
        })
    }

    /// Advance without allocating. Returns the next vector by reference.
    pub fn next_ref(&mut self) -> Option<&[u32]> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        if self.started {
            self.step();
        }
        self.started = true;
        Some(&self.current)
    }

    fn step(&mut self) {
        let b = self.base;
        for (k, c) in self.coeffs.iter_mut().enumerate() {
            for (x, &y) in self.current.iter_mut().zip(&self.basis[k]) {
                *x = b.add(*x, y);
            }
            *c += 1;
            if *c < b.get() {
                return;
            }
            // b * row = 0, so `current` is already correct after the wrap
            *c = 0;
        }
    }
}

impl Iterator for Span<'_> {
    type Item = Vec<u32>;
    fn next(&mut self) -> Option<Vec<u32>> {
        self.next_ref().map(|v| v.to_vec())
    }
}

pub fn dot(base: PrimeBase, x: &[u32], y: &[u32]) -> u32 {
    x.iter()
        .zip(y)
        .fold(0u32, |acc, (&a, &c)| base.add(acc, base.mul(a, c)))
}
