//! Exact integer/rational linear algebra and polyhedral primitives.
//!
//! Everything in this module (and the whole crate) computes with
//! arbitrary-precision integers and rationals; there is no floating point
//! anywhere. The polyhedral routines implement an exact double-description
//! method for extreme rays and a facet filter for wall lists.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Int = BigInt;
pub type Rat = BigRational;

/// Dense matrix of arbitrary-precision integers, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = Int::from(*v);
            }
        }
        m
    }

    pub fn from_big_rows(rows: &[Vec<Int>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn rows_vec(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Lossy helper for small-entry matrices; panics if an entry does not fit.
    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| i64::try_from(&self[(i, j)]).expect("entry exceeds i64"))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j { self[(i, j)].is_one() } else { self[(i, j)].is_zero() }
                })
            })
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.data.clone();
        let idx = |i: usize, j: usize| i * n + j;
        let mut sign = 1i32;
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[idx(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[idx(i, k)].is_zero()) {
                    Some(p) => {
                        for j in 0..n {
                            a.swap(idx(k, j), idx(p, j));
                        }
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &a[idx(i, j)] * &a[idx(k, k)] - &a[idx(i, k)] * &a[idx(k, j)];
                    a[idx(i, j)] = &t / &prev;
                }
                a[idx(i, k)] = Int::zero();
            }
            prev = a[idx(k, k)].clone();
        }
        let d = a[idx(n - 1, n - 1)].clone();
        if sign < 0 { -d } else { d }
    }

    /// Rank over Q by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.rows_vec();
        rank_of_rows(&mut a, self.cols)
    }

    /// Exact inverse; panics unless square and invertible over Q with integer inverse
    /// (i.e. unimodular). Use `solve` for general rational systems.
    pub fn unimodular_inverse(&self) -> Self {
        let inv = self.rational_inverse().expect("matrix not invertible");
        let mut out = Self::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                assert!(inv[i][j].is_integer(), "inverse is not integral");
                out[(i, j)] = inv[i][j].to_integer();
            }
        }
        out
    }

    /// Inverse over Q as rows of rationals; None if singular.
    pub fn rational_inverse(&self) -> Option<Vec<Vec<Rat>>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rat> =
                    (0..n).map(|j| Rat::from(self[(i, j)].clone())).collect();
                for k in 0..n {
                    row.push(if k == i { Rat::one() } else { Rat::zero() });
                }
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
            a.swap(col, piv);
            let p = a[col][col].clone();
            for x in a[col].iter_mut() {
                *x /= p.clone();
            }
            for i in 0..n {
                if i != col && !a[i][col].is_zero() {
                    let f = a[i][col].clone();
                    for j in 0..2 * n {
                        let t = &f * &a[col][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
    }
}

fn rank_of_rows(rows: &mut Vec<Vec<Int>>, cols: usize) -> usize {
    let mut rank = 0;
    let mut col = 0;
    while rank < rows.len() && col < cols {
        match (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            None => {
                col += 1;
            }
            Some(p) => {
                rows.swap(rank, p);
                for i in rank + 1..rows.len() {
                    if !rows[i][col].is_zero() {
                        let a = rows[rank][col].clone();
                        let b = rows[i][col].clone();
                        let g = a.gcd(&b);
                        let (fa, fb) = (&a / &g, &b / &g);
                        for j in col..cols {
                            rows[i][j] = &rows[i][j] * &fa - &rows[rank][j] * &fb;
                        }
                    }
                }
                rank += 1;
                col += 1;
            }
        }
    }
    rank
}

/// Result of a Smith normal form computation: `d = u * m * v`.
pub struct Snf {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

/// Smith normal form with transform tracking: returns (d, u, v) with
/// d = u·m·v diagonal, d₁ | d₂ | …, and u, v unimodular.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut b = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let swap_rows = |b: &mut IntMatrix, u: &mut IntMatrix, i: usize, j: usize| {
        if i == j {
            return;
        }
        for c in 0..b.cols {
            let t = b[(i, c)].clone();
            b[(i, c)] = b[(j, c)].clone();
            b[(j, c)] = t;
        }
        for c in 0..u.cols {
            let t = u[(i, c)].clone();
            u[(i, c)] = u[(j, c)].clone();
            u[(j, c)] = t;
        }
    };
    let swap_cols = |b: &mut IntMatrix, v: &mut IntMatrix, i: usize, j: usize| {
        if i == j {
            return;
        }
        for r in 0..b.rows {
            let t = b[(r, i)].clone();
            b[(r, i)] = b[(r, j)].clone();
            b[(r, j)] = t;
        }
        for r in 0..v.rows {
            let t = v[(r, i)].clone();
            v[(r, i)] = v[(r, j)].clone();
            v[(r, j)] = t;
        }
    };
    // row_i -= f * row_k  (and same on u)
    let add_row = |b: &mut IntMatrix, u: &mut IntMatrix, i: usize, k: usize, f: &Int| {
        for c in 0..b.cols {
            let t = f * &b[(k, c)];
            b[(i, c)] -= t;
        }
        for c in 0..u.cols {
            let t = f * &u[(k, c)];
            u[(i, c)] -= t;
        }
    };
    let add_col = |b: &mut IntMatrix, v: &mut IntMatrix, j: usize, k: usize, f: &Int| {
        for r in 0..b.rows {
            let t = f * &b[(r, k)];
            b[(r, j)] -= t;
        }
        for r in 0..v.rows {
            let t = f * &v[(r, k)];
            v[(r, j)] -= t;
        }
    };

    let n = rows.min(cols);
    for k in 0..n {
        'pivot: loop {
            // Find entry of smallest nonzero absolute value in the remaining block.
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if !b[(i, j)].is_zero()
                        && best
                            .map(|(bi, bj)| b[(i, j)].abs() < b[(bi, bj)].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'pivot; // block is zero, done
            };
            swap_rows(&mut b, &mut u, k, pi);
            swap_cols(&mut b, &mut v, k, pj);
            // Reduce column and row by the pivot.
            let mut dirty = false;
            for i in k + 1..rows {
                if !b[(i, k)].is_zero() {
                    let f = b[(i, k)].div_floor(&b[(k, k)]);
                    add_row(&mut b, &mut u, i, k, &f);
                    if !b[(i, k)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in k + 1..cols {
                if !b[(k, j)].is_zero() {
                    let f = b[(k, j)].div_floor(&b[(k, k)]);
                    add_col(&mut b, &mut v, j, k, &f);
                    if !b[(k, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }
            let col_clear = (k + 1..rows).all(|i| b[(i, k)].is_zero());
            let row_clear = (k + 1..cols).all(|j| b[(k, j)].is_zero());
            if col_clear && row_clear {
                // Enforce divisibility of the remaining block by the pivot.
                let p = b[(k, k)].clone();
                let bad = (k + 1..rows)
                    .flat_map(|i| (k + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&b[(i, j)] % &p).is_zero());
                if let Some((i, _)) = bad {
                    // Add the offending row into row k and restart the pivot.
                    let minus_one = -Int::one();
                    add_row(&mut b, &mut u, k, i, &minus_one);
                    continue 'pivot;
                }
                break 'pivot;
            }
        }
        if b[(k, k)].is_negative() {
            for r in 0..rows {
                let t = -b[(r, k)].clone();
                b[(r, k)] = t;
            }
            for r in 0..v.rows {
                let t = -v[(r, k)].clone();
                v[(r, k)] = t;
            }
        }
    }
    Snf { d: b, u, v }
}

/// Integer kernel basis of m (vectors x with m·x = 0), as columns collected
/// into rows of the returned matrix. Result rows form a basis of the
/// saturated kernel lattice.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<Int>> {
    let snf = smith_normal_form(m);
    let n = m.cols.min(m.rows);
    let mut rank = 0;
    for i in 0..n {
        if !snf.d[(i, i)].is_zero() {
            rank += 1;
        }
    }
    // m * v has zero columns from `rank` on; kernel basis = those columns of v.
    (rank..m.cols)
        .map(|j| (0..m.cols).map(|i| snf.v[(i, j)].clone()).collect())
        .collect()
}

/// Solve a·x = b over Q. Returns None if inconsistent. If the solution is not
/// unique an arbitrary particular solution is returned.
pub fn solve_rational(a: &IntMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(a.rows, b.len());
    let (rows, cols) = (a.rows, a.cols);
    let mut m: Vec<Vec<Rat>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rat> = (0..cols).map(|j| Rat::from(a[(i, j)].clone())).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x /= pv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    // Consistency: no row 0 = nonzero.
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); cols];
    for &(pr, pc) in &pivots {
        x[pc] = m[pr][cols].clone();
    }
    Some(x)
}

/// Solve a·x = b over Z (a: m×n, b length m). Returns None if no integer
/// solution exists; otherwise an arbitrary particular solution.
pub fn solve_integer(a: &IntMatrix, b: &[Int]) -> Option<Vec<Int>> {
    assert_eq!(a.rows, b.len());
    // a = u⁻¹·d·v⁻¹ with d = u·a·v; solve d·y = u·b, then x = v·y
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let n = a.cols;
    let r = a.rows.min(n);
    let mut y = vec![Int::zero(); n];
    for i in 0..a.rows {
        if i < r && !snf.d[(i, i)].is_zero() {
            let (q, rem) = ub[i].div_rem(&snf.d[(i, i)]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Row-style Hermite normal form of the row lattice of `m`: returns a matrix
/// whose rows are a basis of the lattice generated by the rows of `m`
/// (zero rows dropped), in row echelon form with positive pivots.
pub fn hermite_row_basis(m: &IntMatrix) -> IntMatrix {
    let mut rows: Vec<Vec<Int>> = m.rows_vec();
    let ncols = m.cols;
    let mut pivot_row = 0usize;
    for col in 0..ncols {
        // eliminate below using gcd steps
        loop {
            let mut nonzero: Vec<usize> =
                (pivot_row..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            // bring the row with smallest |entry| to pivot position
            nonzero.sort_by_key(|&i| rows[i][col].abs());
            rows.swap(pivot_row, nonzero[0]);
            if rows[pivot_row][col].is_negative() {
                for x in rows[pivot_row].iter_mut() {
                    *x = -x.clone();
                }
            }
            let mut done = true;
            let p = rows[pivot_row][col].clone();
            for i in pivot_row + 1..rows.len() {
                if !rows[i][col].is_zero() {
                    let q = rows[i][col].div_floor(&p);
                    for j in 0..ncols {
                        let t = &q * &rows[pivot_row][j];
                        rows[i][j] -= t;
                    }
                    if !rows[i][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < rows.len() && !rows[pivot_row][col].is_zero() {
            // reduce entries above the pivot
            let p = rows[pivot_row][col].clone();
            for i in 0..pivot_row {
                let q = rows[i][col].div_floor(&p);
                if !q.is_zero() {
                    for j in 0..ncols {
                        let t = &q * &rows[pivot_row][j];
                        rows[i][j] -= t;
                    }
                }
            }
            pivot_row += 1;
        }
    }
    rows.truncate(pivot_row);
    IntMatrix::from_big_rows(&rows)
}

/// Divide out the gcd and normalize the first nonzero coordinate positive?
/// No: normalize so the vector keeps its direction (gcd only). Returns the
/// zero vector unchanged.
pub fn primitive_part(v: &[Int]) -> Vec<Int> {
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Clear denominators of a rational vector to a primitive integer vector
/// with the same direction.
pub fn primitive_from_rational(v: &[Rat]) -> Vec<Int> {
    let mut den = Int::one();
    for x in v {
        den = den.lcm(x.denom());
    }
    let ints: Vec<Int> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    primitive_part(&ints)
}

fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Double-description state: extreme rays plus a lineality basis.
struct DdCone {
    dim: usize,
    lineality: Vec<Vec<Int>>,
    rays: Vec<Vec<Int>>,
    /// constraints processed so far (primitive integer functionals)
    added: Vec<Vec<Int>>,
}

impl DdCone {
    fn new(dim: usize) -> Self {
        let lineality = (0..dim)
            .map(|i| {
                let mut e = vec![Int::zero(); dim];
                e[i] = Int::one();
                e
            })
            .collect();
        DdCone { dim, lineality, rays: Vec::new(), added: Vec::new() }
    }

    fn add_halfspace(&mut self, a: &[Int]) {
        let lin_vals: Vec<Int> = self.lineality.iter().map(|l| dot(a, l)).collect();
        if let Some(i0) = lin_vals.iter().position(|v| !v.is_zero()) {
            // Split one lineality direction into a ray on the positive side.
            let mut l0 = self.lineality.remove(i0);
            let mut s0 = lin_vals[i0].clone();
            if s0.is_negative() {
                l0.iter_mut().for_each(|x| *x = -x.clone());
                s0 = -s0;
            }
            for l in self.lineality.iter_mut() {
                let s = dot(a, l);
                if !s.is_zero() {
                    // l := s0*l - s*l0  is orthogonal to a
                    let new: Vec<Int> = l
                        .iter()
                        .zip(&l0)
                        .map(|(x, y)| &s0 * x - &s * y)
                        .collect();
                    *l = primitive_part(&new);
                }
            }
            for r in self.rays.iter_mut() {
                let s = dot(a, r);
                if !s.is_zero() {
                    let new: Vec<Int> =
                        r.iter().zip(&l0).map(|(x, y)| &s0 * x - &s * y).collect();
                    *r = primitive_part(&new);
                }
            }
            self.rays.push(primitive_part(&l0));
        } else {
            let vals: Vec<Int> = self.rays.iter().map(|r| dot(a, r)).collect();
            let pos: Vec<usize> =
                (0..self.rays.len()).filter(|&i| vals[i].is_positive()).collect();
            let neg: Vec<usize> =
                (0..self.rays.len()).filter(|&i| vals[i].is_negative()).collect();
            if neg.is_empty() {
                self.added.push(a.to_vec());
                return;
            }
            let mut new_rays: Vec<Vec<Int>> = Vec::new();
            for (i, r) in self.rays.iter().enumerate() {
                if !vals[i].is_negative() {
                    new_rays.push(r.clone());
                }
            }
            for &p in &pos {
                for &n in &neg {
                    if self.adjacent(p, n) {
                        let (vp, vn) = (&vals[p], &vals[n]);
                        // combo = vp * ray_n - vn * ray_p  (positive combination)
                        let combo: Vec<Int> = self.rays[n]
                            .iter()
                            .zip(&self.rays[p])
                            .map(|(xn, xp)| vp * xn - vn * xp)
                            .collect();
                        let c = primitive_part(&combo);
                        if c.iter().any(|x| !x.is_zero()) {
                            new_rays.push(c);
                        }
                    }
                }
            }
            new_rays.sort();
            new_rays.dedup();
            self.rays = new_rays;
        }
        self.added.push(a.to_vec());
    }

    /// Algebraic adjacency: the common tight constraints of the two rays,
    /// together with the lineality directions, cut out a face of dimension
    /// lineality + 2.
    fn adjacent(&self, p: usize, n: usize) -> bool {
        let mut tight: Vec<Vec<Int>> = Vec::new();
        for a in &self.added {
            if dot(a, &self.rays[p]).is_zero() && dot(a, &self.rays[n]).is_zero() {
                tight.push(a.clone());
            }
        }
        // Lineality directions are orthogonal to every added constraint, so the
        // solution space of `tight` contains them. Required solution dimension:
        // lineality + 2, i.e. rank == dim - lineality - 2.
        let want = self.dim - self.lineality.len() - 2;
        if tight.len() < want {
            return false;
        }
        let mut m = tight;
        rank_of_rows(&mut m, self.dim) == want
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolyhedralError {
    #[error("cone has lineality")]
    Lineality,
    #[error("interior point violates an inequality")]
    BadInterior,
}

/// Extreme rays of the cone {x : ⟨x, aᵢ⟩ ≥ 0}, each scaled to a primitive
/// integer vector, in lexicographic order. Errors if the cone contains a line.
pub fn extreme_rays(
    ineqs: &[Vec<Int>],
    ambient_dim: usize,
) -> Result<Vec<Vec<Int>>, PolyhedralError> {
    let (rays, lineality) = extreme_rays_with_lineality(ineqs, ambient_dim);
    if !lineality.is_empty() {
        return Err(PolyhedralError::Lineality);
    }
    Ok(rays)
}

/// Double-description run that tolerates lineality (used internally by the
/// facet filter). Returns (extreme rays, lineality basis).
pub fn extreme_rays_with_lineality(
    ineqs: &[Vec<Int>],
    ambient_dim: usize,
) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    let mut cone = DdCone::new(ambient_dim);
    for a in ineqs {
        assert_eq!(a.len(), ambient_dim, "inequality has wrong dimension");
        cone.add_halfspace(&primitive_part(a));
    }
    let mut rays = cone.rays;
    rays.sort();
    rays.dedup();
    (rays, cone.lineality)
}

/// Keep exactly the facet-defining inequalities. The interior point must
/// strictly satisfy every inequality (sign convention: ⟨interior, v⟩ > 0).
/// Parallel duplicates are kept once (first occurrence).
pub fn nonredundant_walls(
    ineqs: &[Vec<Int>],
    interior: &[Int],
) -> Result<Vec<Vec<Int>>, PolyhedralError> {
    for a in ineqs {
        if !dot(a, interior).is_positive() {
            return Err(PolyhedralError::BadInterior);
        }
    }
    let dim = interior.len();
    let (rays, lineality) = extreme_rays_with_lineality(ineqs, dim);
    let mut out: Vec<Vec<Int>> = Vec::new();
    let mut seen: Vec<Vec<Int>> = Vec::new();
    for a in ineqs {
        let ap = primitive_part(a);
        if seen.contains(&ap) {
            continue;
        }
        let mut tight: Vec<Vec<Int>> =
            rays.iter().filter(|r| dot(&ap, r).is_zero()).cloned().collect();
        tight.extend(lineality.iter().cloned());
        let is_facet = if tight.is_empty() {
            dim == 1
        } else {
            rank_of_rows(&mut tight, dim) == dim - 1
        };
        if is_facet {
            seen.push(ap);
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// Exact LLL reduction on a Gram matrix (works purely with the inner
/// products; no coordinates needed). Returns the transform U with
/// U·gram·Uᵀ the reduced Gram matrix. The form must be positive definite.
pub fn lll_transform_gram(gram: &IntMatrix, delta: (i64, i64)) -> IntMatrix {
    let n = gram.rows;
    assert!(gram.is_symmetric());
    let mut u = IntMatrix::identity(n);
    let del = Rat::new(Int::from(delta.0), Int::from(delta.1));

    // current Gram of the transformed basis
    let cur = |u: &IntMatrix| -> Vec<Vec<Rat>> {
        let g = u.mul(gram).mul(&u.transpose());
        (0..n)
            .map(|i| (0..n).map(|j| Rat::from(g[(i, j)].clone())).collect())
            .collect()
    };

    loop {
        let g = cur(&u);
        // Gram-Schmidt coefficients mu and squared norms b* from the Gram matrix.
        let mut mu = vec![vec![Rat::zero(); n]; n];
        let mut bstar = vec![Rat::zero(); n];
        for i in 0..n {
            for j in 0..i {
                let mut s = g[i][j].clone();
                for k in 0..j {
                    let t = &mu[i][k] * &mu[j][k] * &bstar[k];
                    s -= t;
                }
                mu[i][j] = if bstar[j].is_zero() { Rat::zero() } else { &s / &bstar[j] };
            }
            let mut s = g[i][i].clone();
            for k in 0..i {
                let t = &mu[i][k] * &mu[i][k] * &bstar[k];
                s -= t;
            }
            bstar[i] = s;
        }
        // Size reduction step.
        let mut changed = false;
        'outer: for i in 1..n {
            for j in (0..i).rev() {
                let r = round_rat(&mu[i][j]);
                if !r.is_zero() {
                    for c in 0..n {
                        let t = &r * &u[(j, c)];
                        u[(i, c)] -= t;
                    }
                    changed = true;
                    break 'outer;
                }
            }
        }
        if changed {
            continue;
        }
        // Lovász condition.
        let mut swapped = false;
        for i in 1..n {
            let lhs = &bstar[i] + &mu[i][i - 1] * &mu[i][i - 1] * &bstar[i - 1];
            let rhs = &del * &bstar[i - 1];
            if lhs < rhs {
                for c in 0..n {
                    let t = u[(i, c)].clone();
                    u[(i, c)] = u[(i - 1, c)].clone();
                    u[(i - 1, c)] = t;
                }
                swapped = true;
                break;
            }
        }
        if !swapped {
            return u;
        }
    }
}

/// All x ∈ Zⁿ (both signs) with xᵀ·gram·x = norm, for a negative-definite
/// Gram matrix and norm < 0. Exact Fincke–Pohst with LLL preprocessing.
pub fn vectors_of_norm(gram: &IntMatrix, norm: i64) -> Vec<Vec<Int>> {
    assert!(norm < 0, "norm must be negative for a negative-definite form");
    let n = gram.rows;
    if n == 0 {
        return vec![];
    }
    let mut pos = gram.clone();
    for i in 0..n {
        for j in 0..n {
            pos[(i, j)] = -gram[(i, j)].clone();
        }
    }
    let u = lll_transform_gram(&pos, (99, 100));
    let g_red = u.mul(&pos).mul(&u.transpose());
    let g_rat: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| Rat::from(g_red[(i, j)].clone())).collect())
        .collect();
    let center = vec![Rat::zero(); n];
    let target = Rat::from(Int::from(-norm));
    let ys = fincke_pohst(&g_rat, &center, &target);
    let ut = u.transpose();
    let mut out: Vec<Vec<Int>> = ys.iter().map(|y| ut.mul_vec(y)).collect();
    out.sort();
    out
}

/// All v ∈ offset + Zⁿ with vᵀ·gram·v = norm (gram negative definite,
/// norm ≤ 0). Coordinates of the results are rational (offset may be
/// fractional). Used for coset searches in dual lattices.
pub fn coset_vectors_of_norm(gram: &IntMatrix, offset: &[Rat], norm: &Rat) -> Vec<Vec<Rat>> {
    let n = gram.rows;
    assert_eq!(offset.len(), n);
    assert!(norm <= &Rat::zero());
    if n == 0 {
        return if norm.is_zero() { vec![vec![]] } else { vec![] };
    }
    let mut pos = gram.clone();
    for i in 0..n {
        for j in 0..n {
            pos[(i, j)] = -gram[(i, j)].clone();
        }
    }
    let u = lll_transform_gram(&pos, (99, 100));
    let g_red = u.mul(&pos).mul(&u.transpose());
    let g_rat: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| Rat::from(g_red[(i, j)].clone())).collect())
        .collect();
    // offset in reduced coordinates: (U⁻¹)ᵀ · offset
    let u_inv = u.unimodular_inverse();
    let off_red: Vec<Rat> = (0..n)
        .map(|i| {
            (0..n)
                .map(|k| Rat::from(u_inv[(k, i)].clone()) * &offset[k])
                .sum()
        })
        .collect();
    let target = -norm.clone();
    let ys = fincke_pohst(&g_rat, &off_red, &target);
    let ut = u.transpose();
    let mut out: Vec<Vec<Rat>> = ys
        .iter()
        .map(|y| {
            let x = ut.mul_vec(y);
            (0..n).map(|i| Rat::from(x[i].clone()) + &offset[i]).collect()
        })
        .collect();
    out.sort();
    out
}

/// Largest integer x with (x + c)² ≤ r, if any.
fn floor_center_sqrt(c: &Rat, r: &Rat) -> Option<Int> {
    if r < &Rat::zero() {
        return None;
    }
    let minus_c_floor = (-c).floor().to_integer();
    let r_ceil = r.ceil().to_integer();
    let s = if r_ceil.is_negative() { Int::zero() } else { r_ceil.sqrt() } + Int::one();
    let mut x = &minus_c_floor + &s;
    let limit = &minus_c_floor - &s - Int::one();
    while x >= limit {
        let t = Rat::from(x.clone()) + c;
        if &t * &t <= *r {
            return Some(x);
        }
        x -= 1;
    }
    None
}

/// All integer y with q(y + center) == target, where q is the
/// positive-definite form given by `gram` (rational entries allowed).
fn fincke_pohst(gram: &[Vec<Rat>], center: &[Rat], target: &Rat) -> Vec<Vec<Int>> {
    let n = gram.len();
    // rational Cholesky: q(w) = Σᵢ dᵢ (wᵢ + Σ_{j>i} lᵢⱼ wⱼ)²
    let mut d = vec![Rat::zero(); n];
    let mut l = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        let mut di = gram[i][i].clone();
        for k in 0..i {
            di -= &d[k] * &l[k][i] * &l[k][i];
        }
        assert!(di > Rat::zero(), "form is not positive definite");
        for j in i + 1..n {
            let mut s = gram[i][j].clone();
            for k in 0..i {
                s -= &d[k] * &l[k][i] * &l[k][j];
            }
            l[i][j] = &s / &di;
        }
        d[i] = di;
    }
    let mut out: Vec<Vec<Int>> = Vec::new();
    let mut w = vec![Rat::zero(); n]; // chosen wⱼ = yⱼ + centerⱼ for j > level
    let mut y = vec![Int::zero(); n];
    fn rec(
        level: isize,
        remaining: Rat,
        d: &[Rat],
        l: &[Vec<Rat>],
        center: &[Rat],
        w: &mut Vec<Rat>,
        y: &mut Vec<Int>,
        out: &mut Vec<Vec<Int>>,
    ) {
        if level < 0 {
            if remaining.is_zero() {
                out.push(y.clone());
            }
            return;
        }
        let i = level as usize;
        let n = d.len();
        let mut c = center[i].clone();
        for j in i + 1..n {
            c += &l[i][j] * &w[j];
        }
        // dᵢ (yᵢ + c)² ≤ remaining
        let bound = &remaining / &d[i];
        let hi = match floor_center_sqrt(&c, &bound) {
            Some(h) => h,
            None => return,
        };
        let lo = match floor_center_sqrt(&(-c.clone()), &bound) {
            Some(h) => -h,
            None => return,
        };
        let mut yi = lo;
        while yi <= hi {
            let t = Rat::from(yi.clone()) + &c;
            let used = &d[i] * &t * &t;
            if used <= remaining {
                y[i] = yi.clone();
                w[i] = Rat::from(yi.clone()) + &center[i];
                rec(level - 1, &remaining - used, d, l, center, w, y, out);
            }
            yi += 1;
        }
    }
    rec(n as isize - 1, target.clone(), &d, &l, center, &mut w, &mut y, &mut out);
    out
}

fn round_rat(x: &Rat) -> Int {
    // nearest integer, ties toward zero-ish (exact choice does not matter)
    let two = Int::from(2);
    let n = x.numer() * &two + x.denom();
    n.div_floor(&(x.denom() * &two))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn integer_solve_and_hermite() {
        let a = m(&[vec![2, 0], vec![0, 3]]);
        let b = vec![Int::from(4), Int::from(6)];
        let x = solve_integer(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(solve_integer(&a, &[Int::from(3), Int::from(6)]).is_none());
        // underdetermined: 2x + 4y = 6 has integer solutions
        let a2 = m(&[vec![2, 4]]);
        let x2 = solve_integer(&a2, &[Int::from(6)]).unwrap();
        assert_eq!(a2.mul_vec(&x2), vec![Int::from(6)]);
        assert!(solve_integer(&a2, &[Int::from(3)]).is_none());

        let h = hermite_row_basis(&m(&[vec![4, 0], vec![2, 1], vec![6, 1]]));
        assert_eq!(h.to_i64_rows(), vec![vec![2, 1], vec![0, 2]]);
        // rank-deficient input drops zero rows
        let h2 = hermite_row_basis(&m(&[vec![1, 2], vec![2, 4]]));
        assert_eq!(h2.to_i64_rows(), vec![vec![1, 2]]);
    }

    #[test]
    fn short_vectors_a2_and_d4() {
        // A2 (negated Cartan): 6 roots of norm −2
        let a2 = m(&[vec![-2, 1], vec![1, -2]]);
        let roots = vectors_of_norm(&a2, -2);
        assert_eq!(roots.len(), 6);
        for r in &roots {
            let gr = a2.mul_vec(r);
            let n: Int = r.iter().zip(&gr).map(|(a, b)| a * b).sum();
            assert_eq!(n, Int::from(-2));
        }
        // D4: 24 roots, no vectors of norm −1 or −3
        let d4 = m(&[
            vec![-2, 1, 0, 0],
            vec![1, -2, 1, 1],
            vec![0, 1, -2, 0],
            vec![0, 1, 0, -2],
        ]);
        assert_eq!(vectors_of_norm(&d4, -2).len(), 24);
        assert_eq!(vectors_of_norm(&d4, -1).len(), 0);
        assert_eq!(vectors_of_norm(&d4, -3).len(), 0);
        assert_eq!(vectors_of_norm(&d4, -4).len(), 24);
    }

    #[test]
    fn coset_vectors_half_integers() {
        // A1 dual coset: v ∈ 1/2 + Z with −2v² = −1/2 → v = ±1/2
        let a1 = m(&[vec![-2]]);
        let off = vec![Rat::new(Int::from(1), Int::from(2))];
        let vs = coset_vectors_of_norm(&a1, &off, &Rat::new(Int::from(-1), Int::from(2)));
        assert_eq!(vs.len(), 2);
        // empty when nothing fits
        let vs2 = coset_vectors_of_norm(&a1, &off, &Rat::new(Int::from(-1), Int::from(8)));
        assert!(vs2.is_empty());
    }

    fn check_snf(a: &IntMatrix) -> IntMatrix {
        let snf = smith_normal_form(a);
        assert_eq!(snf.u.det().abs(), Int::one(), "u not unimodular");
        assert_eq!(snf.v.det().abs(), Int::one(), "v not unimodular");
        let prod = snf.u.mul(a).mul(&snf.v);
        assert_eq!(prod, snf.d, "d != u·m·v");
        // diagonal with divisibility chain
        let k = a.rows.min(a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                if i != j {
                    assert!(snf.d[(i, j)].is_zero(), "not diagonal");
                }
            }
        }
        for i in 1..k {
            let (p, c) = (&snf.d[(i - 1, i - 1)], &snf.d[(i, i)]);
            if !p.is_zero() {
                assert!((c % p).is_zero(), "divisibility chain broken");
            } else {
                assert!(c.is_zero());
            }
        }
        snf.d
    }

    #[test]
    fn snf_already_diagonal() {
        let d = check_snf(&m(&[vec![2, 0], vec![0, 4]]));
        assert_eq!(d, m(&[vec![2, 0], vec![0, 4]]));
    }

    #[test]
    fn snf_hand_example() {
        // [DERIVED] hand elimination: [[2,4],[0,6]] has det 12, gcd of entries 2
        // → invariant factors (2, 6·4/4 = 12/... ) = (2, 6) · correction = (2,6)?
        // Hand check: d1 = gcd(2,4,0,6) = 2; d1·d2 = |det| = 12 ⇒ d2 = 6... but
        // 2 | 6 holds, so SNF = diag(2, 6). Determinant check below pins it.
        let a = m(&[vec![2, 4], vec![0, 6]]);
        let d = check_snf(&a);
        assert_eq!(&d[(0, 0)] * &d[(1, 1)], a.det().abs());
        assert_eq!(d[(0, 0)], Int::from(2));
        assert_eq!(d[(1, 1)], Int::from(6));
    }

    #[test]
    fn snf_zero_matrix() {
        let d = check_snf(&m(&[vec![0, 0], vec![0, 0]]));
        assert_eq!(d, m(&[vec![0, 0], vec![0, 0]]));
    }

    #[test]
    fn snf_random_small() {
        // determinant preserved up to sign on a few fixed pseudo-random matrices
        let samples = [
            vec![vec![-6, 111, -36, 6], vec![5, -672, 210, 74], vec![0, -255, 81, 24], vec![-7, 255, -81, -10]],
            vec![vec![3, 1, 2], vec![0, 5, 7], vec![2, 2, 2]],
            vec![vec![1, 2], vec![3, 4]],
        ];
        for s in &samples {
            let a = m(s);
            let d = check_snf(&a);
            let mut prod = Int::one();
            for i in 0..a.rows {
                prod *= &d[(i, i)];
            }
            assert_eq!(prod.abs(), a.det().abs());
        }
    }

    #[test]
    fn kernel_and_solve() {
        let a = m(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            let prod = a.mul_vec(v);
            assert!(prod.iter().all(|x| x.is_zero()));
        }
        let b = vec![Rat::from(Int::from(6)), Rat::from(Int::from(12))];
        let x = solve_rational(&a, &b).unwrap();
        let ax: Vec<Rat> = (0..2)
            .map(|i| (0..3).map(|j| Rat::from(a[(i, j)].clone()) * &x[j]).sum())
            .collect();
        assert_eq!(ax, b);
        // inconsistent system
        let b2 = vec![Rat::from(Int::from(1)), Rat::from(Int::from(0))];
        assert!(solve_rational(&a, &b2).is_none());
    }

    #[test]
    fn extreme_rays_orthant() {
        let ineqs: Vec<Vec<Int>> = vec![
            vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(Int::from).collect())
        .collect();
        let rays = extreme_rays(&ineqs, 3).unwrap();
        let expect: Vec<Vec<Int>> = vec![
            vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(Int::from).collect())
        .collect();
        assert_eq!(rays, expect);
    }

    #[test]
    fn extreme_rays_lineality_error() {
        let ineqs: Vec<Vec<Int>> = vec![vec![Int::from(1), Int::from(0)]];
        assert_eq!(extreme_rays(&ineqs, 2), Err(PolyhedralError::Lineality));
    }

    #[test]
    fn extreme_rays_square_cone() {
        // cone over a square: x ≥ 0 region bounded by 4 planes in dim 3
        let ineqs: Vec<Vec<Int>> = vec![
            vec![1, 0, 1], vec![-1, 0, 1], vec![0, 1, 1], vec![0, -1, 1],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(Int::from).collect())
        .collect();
        let rays = extreme_rays(&ineqs, 3).unwrap();
        assert_eq!(rays.len(), 4);
        for r in &rays {
            assert_eq!(r[2], Int::one());
            assert_eq!(r[0].abs(), Int::one());
            assert_eq!(r[1].abs(), Int::one());
        }
    }

    #[test]
    fn nonredundant_drops_dominated() {
        // x ≥ 0 twice plus a dominated constraint 2x ≥ 0 in dim 1
        let ineqs: Vec<Vec<Int>> =
            vec![vec![Int::from(1)], vec![Int::from(2)], vec![Int::from(1)]];
        let interior = vec![Int::from(1)];
        let walls = nonredundant_walls(&ineqs, &interior).unwrap();
        assert_eq!(walls.len(), 1);
    }

    #[test]
    fn nonredundant_2d() {
        // cone x≥0, y≥0, x+y≥0 (last redundant)
        let ineqs: Vec<Vec<Int>> = vec![
            vec![Int::from(1), Int::from(0)],
            vec![Int::from(0), Int::from(1)],
            vec![Int::from(1), Int::from(1)],
        ];
        let interior = vec![Int::from(1), Int::from(1)];
        let walls = nonredundant_walls(&ineqs, &interior).unwrap();
        assert_eq!(walls.len(), 2);
        // bad interior
        let bad = vec![Int::from(-1), Int::from(1)];
        assert_eq!(
            nonredundant_walls(&ineqs, &bad),
            Err(PolyhedralError::BadInterior)
        );
    }

    #[test]
    fn dd_round_trip_simplicial() {
        // random-ish simplicial cones in dim ≤ 4: rays of the facet description
        // must regenerate the generators
        let gens = vec![
            vec![1i64, 0, 0], vec![1, 2, 0], vec![1, 1, 3],
        ];
        // facets: for a simplicial cone with generator matrix G, facet normals
        // are rows of (G^{-1})ᵀ scaled; compute via rational inverse
        let g = m(&gens);
        let inv = g.rational_inverse().unwrap();
        let facets: Vec<Vec<Int>> = (0..3)
            .map(|j| {
                let col: Vec<Rat> = (0..3).map(|i| inv[i][j].clone()).collect();
                primitive_from_rational(&col)
            })
            .collect();
        let rays = extreme_rays(&facets, 3).unwrap();
        let mut expect: Vec<Vec<Int>> = gens
            .iter()
            .map(|v| primitive_part(&v.iter().map(|&x| Int::from(x)).collect::<Vec<_>>()))
            .collect();
        expect.sort();
        assert_eq!(rays, expect);
    }

    #[test]
    fn lll_reduces_gram() {
        // A badly scaled basis of Z^2: gram of basis (1,0),(100,1)
        let gram = m(&[vec![1, 100], vec![100, 10001]]);
        let u = lll_transform_gram(&gram, (3, 4));
        let g2 = u.mul(&gram).mul(&u.transpose());
        assert_eq!(u.det().abs(), Int::one());
        assert_eq!(g2[(0, 0)], Int::one());
        assert_eq!(g2[(1, 1)], Int::one());
    }
}
