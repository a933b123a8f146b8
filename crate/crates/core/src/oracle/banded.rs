//! Banded matrices with an LU factorization using partial pivoting.

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals, stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, data: vec![0.0; n * (kl + ku + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.ku {
            return None;
        }
        Some(i * (self.kl + self.ku + 1) + (j + self.kl - i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Sets entry (i, j); panics when it lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside band kl={}, ku={}", self.kl, self.ku));
        self.data[s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("entry inside band");
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn factor(&self) -> Result<BandedLu> {
        BandedLu::new(self)
    }
}

/// LU factors of a banded matrix. Row interchanges widen U to kl + ku
/// super-diagonals.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    width: usize,
    /// row i holds columns i − kl ..= i + ku + kl
    rows: Vec<f64>,
    multipliers: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.width - 1 - self.kl);
        i * self.width + (j + self.kl - i)
    }

    fn new(a: &BandedMatrix) -> Result<Self> {
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            width,
            rows: vec![0.0; n * width],
            multipliers: vec![0.0; n * kl.max(1)],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let k = lu.idx(i, j);
                lu.rows[k] = a.get(i, j);
            }
        }
        let scale = a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.rows[lu.idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = lu.rows[lu.idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || best <= f64::EPSILON * 1e-3 * scale {
                return Err(Error::Singular(format!("zero pivot in column {k} of {n}")));
            }
            lu.pivots[k] = p;
            let last_col = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a_idx, b_idx) = (lu.idx(k, j), lu.idx(p, j));
                    lu.rows.swap(a_idx, b_idx);
                }
            }
            let pivot = lu.rows[lu.idx(k, k)];
            for r in k + 1..=last_row {
                let f = lu.rows[lu.idx(r, k)] / pivot;
                lu.multipliers[k * kl.max(1) + (r - k - 1)] = f;
                if f == 0.0 {
                    continue;
                }
                let ri = lu.idx(r, k);
                lu.rows[ri] = 0.0;
                for j in k + 1..=last_col {
                    let (src, dst) = (lu.idx(k, j), lu.idx(r, j));
                    lu.rows[dst] -= f * lu.rows[src];
                }
            }
        }
        Ok(lu)
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl) = (self.n, self.kl);
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] -= self.multipliers[k * kl.max(1) + (r - k - 1)] * bk;
            }
        }
        let reach = self.width - 1 - kl;
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + reach).min(n - 1) {
                s -= self.rows[self.idx(i, j)] * b[j];
            }
            b[i] = s / self.rows[self.idx(i, i)];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
