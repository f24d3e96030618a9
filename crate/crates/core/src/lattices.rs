//! Even lattices, dual lattices, discriminant groups, embeddings,
//! overlattices, and vector enumeration.
//!
//! Conventions: vectors are row coordinate vectors; an embedding stores the
//! sublattice basis as rows in ambient coordinates; an isometry g of a
//! lattice is a matrix whose row i is the image of the i-th basis vector,
//! so g·gram·gᵀ = gram and coordinates transform by x ↦ x·g.

use crate::ade::{self, ADEType};
use crate::discforms::{FiniteQuadraticForm, FqfElem, FqfMap};
use crate::exact_linalg::{
    coset_vectors_of_norm, kernel_basis, smith_normal_form, solve_integer, solve_rational,
    vectors_of_norm, IntMatrix,
};
use crate::{Int, Rat};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice is degenerate")]
    Degenerate,
    #[error("expected a definite lattice")]
    NotDefinite,
    #[error("expected a hyperbolic lattice")]
    NotHyperbolic,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not an ADE lattice: {0}")]
    NotAde(String),
}

/// Even nondegenerate lattice given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub gram: IntMatrix,
    /// (n₊, n₋), computed exactly at construction
    pub signature: (usize, usize),
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self, LatticeError> {
        assert!(gram.is_symmetric(), "Gram matrix must be symmetric");
        for i in 0..gram.rows {
            assert!(
                (&gram[(i, i)] % Int::from(2)).is_zero(),
                "lattice must be even"
            );
        }
        let signature = signature_of(&gram).ok_or(LatticeError::Degenerate)?;
        Ok(Lattice { gram, signature })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows
    }

    pub fn det(&self) -> Int {
        self.gram.det()
    }

    pub fn inner(&self, x: &[Int], y: &[Int]) -> Int {
        let gy = self.gram.mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, x: &[Int]) -> Int {
        self.inner(x, x)
    }

    pub fn inner_rat(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let n = self.rank();
        let mut s = Rat::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if !y[j].is_zero() {
                    s += &x[i] * &y[j] * Rat::from(self.gram[(i, j)].clone());
                }
            }
        }
        s
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature == (0, self.rank())
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.rank() >= 1 && self.signature == (1, self.rank() - 1)
    }

    /// L(m): same module, form scaled by m.
    pub fn rescale(&self, m: i64) -> Lattice {
        let mut g = self.gram.clone();
        for i in 0..g.rows {
            for j in 0..g.cols {
                g[(i, j)] = &self.gram[(i, j)] * Int::from(m);
            }
        }
        Lattice::new(g).expect("rescaling preserves nondegeneracy")
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let (n1, n2) = (self.rank(), other.rank());
        let mut g = IntMatrix::zero(n1 + n2, n1 + n2);
        for i in 0..n1 {
            for j in 0..n1 {
                g[(i, j)] = self.gram[(i, j)].clone();
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                g[(n1 + i, n1 + j)] = other.gram[(i, j)].clone();
            }
        }
        Lattice::new(g).expect("direct sum of nondegenerate lattices")
    }
}

/// Signature (n₊, n₋) by congruent diagonalization over Q; None if degenerate.
pub fn signature_of(gram: &IntMatrix) -> Option<(usize, usize)> {
    let n = gram.rows;
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| Rat::from(gram[(i, j)].clone())).collect())
        .collect();
    let mut pos = 0usize;
    let mut neg = 0usize;
    for k in 0..n {
        if a[k][k].is_zero() {
            // try to bring a nonzero entry to the diagonal
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                a.swap(k, i);
                for row in a.iter_mut() {
                    row.swap(k, i);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // all remaining diagonal zero: a[k][k] ← 2a[k][j] ≠ 0
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[k][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][k] += t;
                }
            } else {
                // zero row in the remaining block → degenerate
                if (k..n).any(|r| (k..n).any(|c| !a[r][c].is_zero())) {
                    continue;
                }
                return None;
            }
        }
        let pivot = a[k][k].clone();
        if pivot.is_zero() {
            return None;
        }
        if pivot.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
            for r in k..n {
                let t = &f * &a[r][k];
                a[r][i] -= t;
            }
        }
    }
    if pos + neg == n {
        Some((pos, neg))
    } else {
        None
    }
}

/// Sublattice of an ambient lattice, rows of `basis` = generators in
/// ambient coordinates.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub ambient: Lattice,
    pub basis: IntMatrix,
    pub induced_gram: IntMatrix,
}

impl Embedding {
    pub fn new(ambient: Lattice, basis: IntMatrix) -> Self {
        assert_eq!(basis.cols, ambient.rank());
        assert_eq!(basis.rank(), basis.rows, "embedding basis must be independent");
        let induced_gram = basis.mul(&ambient.gram).mul(&basis.transpose());
        Embedding { ambient, basis, induced_gram }
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    /// Sublattice as an abstract lattice (requires nondegenerate form).
    pub fn sublattice(&self) -> Result<Lattice, LatticeError> {
        Lattice::new(self.induced_gram.clone())
    }

    pub fn is_primitive(&self) -> bool {
        let snf = smith_normal_form(&self.basis);
        (0..self.basis.rows).all(|i| snf.d[(i, i)].is_one())
    }
}

/// Discriminant group L∨/L with its quadratic form and an explicit
/// presentation: generator i is the rational vector `gen_vecs[i]` in
/// lattice coordinates.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    pub form: FiniteQuadraticForm,
    pub gen_vecs: Vec<Vec<Rat>>,
    /// SNF data for projecting: with d = u·gram·v, an x ∈ L∨ with integer
    /// functional values y = gram·x projects to ((u·y)ⱼ mod dⱼ) on the kept
    /// generator indices.
    u: IntMatrix,
    keep: Vec<usize>,
}

impl DiscriminantForm {
    /// Class of v ∈ L∨ (rational coordinates in the L basis).
    pub fn project(&self, l: &Lattice, v: &[Rat]) -> FqfElem {
        let n = l.rank();
        // functional values y = gram·v must be integers
        let y: Vec<Int> = (0..n)
            .map(|i| {
                let s: Rat = (0..n)
                    .map(|j| Rat::from(l.gram[(i, j)].clone()) * &v[j])
                    .sum();
                assert!(s.is_integer(), "vector is not in the dual lattice");
                s.to_integer()
            })
            .collect();
        let w = self.u.mul_vec(&y);
        let elem: Vec<i64> = self
            .keep
            .iter()
            .zip(&self.form.orders)
            .map(|(&j, &d)| {
                let r = w[j].mod_floor(&Int::from(d));
                i64::try_from(&r).unwrap()
            })
            .collect();
        elem
    }

    /// Induced map on the discriminant form of an isometry g of L
    /// (row convention: x ↦ x·g).
    pub fn map_of_isometry(&self, l: &Lattice, g: &IntMatrix) -> FqfMap {
        let n = l.rank();
        let gen_images = self
            .gen_vecs
            .iter()
            .map(|v| {
                let img: Vec<Rat> = (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|i| &v[i] * Rat::from(g[(i, j)].clone()))
                            .sum()
                    })
                    .collect();
                self.project(l, &img)
            })
            .collect();
        FqfMap { gen_images }
    }
}

/// Discriminant form L∨/L.
pub fn discriminant_form(l: &Lattice) -> DiscriminantForm {
    let n = l.rank();
    let snf = smith_normal_form(&l.gram);
    let mut orders = Vec::new();
    let mut keep = Vec::new();
    for j in 0..n {
        let d = &snf.d[(j, j)];
        assert!(!d.is_zero(), "degenerate lattice");
        if !d.is_one() {
            orders.push(i64::try_from(d).expect("huge discriminant group"));
            keep.push(j);
        }
    }
    // generator j as vector in L⊗Q: column j of (u·gram)⁻¹
    let ug = snf.u.mul(&l.gram);
    let ug_inv = ug.rational_inverse().expect("nondegenerate");
    let gen_vecs: Vec<Vec<Rat>> = keep
        .iter()
        .map(|&j| (0..n).map(|i| ug_inv[i][j].clone()).collect())
        .collect();
    let q_gen: Vec<Rat> = gen_vecs.iter().map(|v| l.inner_rat(v, v)).collect();
    let b_gen: Vec<Vec<Rat>> = gen_vecs
        .iter()
        .map(|v| gen_vecs.iter().map(|w| l.inner_rat(v, w)).collect())
        .collect();
    let form = FiniteQuadraticForm::new(orders, q_gen, b_gen);
    DiscriminantForm { form, gen_vecs, u: snf.u, keep }
}

/// Orthogonal complement of a sublattice inside its ambient lattice
/// (always primitive).
pub fn orthogonal_complement(e: &Embedding) -> Embedding {
    let pairings = e.basis.mul(&e.ambient.gram); // rows = functionals
    let kb = kernel_basis(&pairings);
    Embedding::new(e.ambient.clone(), IntMatrix::from_big_rows(&kb))
}

/// Saturation of a sublattice: ambient ∩ (sublattice ⊗ Q).
pub fn primitive_closure(e: &Embedding) -> Embedding {
    let r = e.basis.rows;
    let snf = smith_normal_form(&e.basis);
    let v_inv = snf.v.unimodular_inverse();
    let rows: Vec<Vec<Int>> = (0..r).map(|i| v_inv.row(i)).collect();
    Embedding::new(e.ambient.clone(), IntMatrix::from_big_rows(&rows))
}

/// The hyperbolic plane U.
pub fn hyperbolic_plane() -> Lattice {
    Lattice::new(IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]])).unwrap()
}

/// L₁₀ = U ⊕ E₈(−1): basis e₀,e₁ spanning U, then the 8 E₈ simple roots.
pub fn l10() -> Lattice {
    let e8: ADEType = "E8".parse().unwrap();
    let e8_lat = Lattice::new(e8.standard_gram()).unwrap();
    hyperbolic_plane().direct_sum(&e8_lat)
}

/// M_R for an ADE sublattice R ⊂ L₁₀: the submodule of (L₁₀(2)⊕R(2))⊗Q
/// generated by L₁₀(2) and the vectors (ι(v), v)/2 for v ∈ R. Returns
/// (M_R, π: L₁₀(2) ↪ M_R).
pub fn build_mr(r_emb: &Embedding) -> Result<(Lattice, Embedding), LatticeError> {
    let r_lat = r_emb.sublattice()?;
    if !r_lat.is_negative_definite() {
        return Err(LatticeError::NotDefinite);
    }
    // must be root-generated (ADE)
    ade::classify(&r_emb.induced_gram).map_err(|e| LatticeError::NotAde(e.to_string()))?;
    let n10 = r_emb.ambient.rank();
    let r = r_emb.rank();
    let n = n10 + r;
    // Gram in the basis (eᵢ,0), (ι(fⱼ),fⱼ)/2:
    //   ⟨(eᵢ,0),(eₖ,0)⟩ = 2⟨eᵢ,eₖ⟩
    //   ⟨(eᵢ,0),(ι fⱼ, fⱼ)/2⟩ = ⟨eᵢ, ι fⱼ⟩
    //   ⟨(ι fⱼ, fⱼ)/2, (ι fₖ, fₖ)/2⟩ = ⟨fⱼ, fₖ⟩_R
    let mut g = IntMatrix::zero(n, n);
    for i in 0..n10 {
        for k in 0..n10 {
            g[(i, k)] = &r_emb.ambient.gram[(i, k)] * Int::from(2);
        }
    }
    for j in 0..r {
        let iota_fj = r_emb.basis.row(j);
        let pair = r_emb.ambient.gram.mul_vec(&iota_fj);
        for i in 0..n10 {
            g[(i, n10 + j)] = pair[i].clone();
            g[(n10 + j, i)] = pair[i].clone();
        }
        for k in 0..r {
            g[(n10 + j, n10 + k)] = r_emb.induced_gram[(j, k)].clone();
        }
    }
    let m = Lattice::new(g)?;
    if !m.is_hyperbolic() {
        return Err(LatticeError::NotHyperbolic);
    }
    let mut pi_basis = IntMatrix::zero(n10, n);
    for i in 0..n10 {
        pi_basis[(i, i)] = Int::one();
    }
    let pi = Embedding::new(m.clone(), pi_basis);
    Ok((m, pi))
}

/// All vectors of the given negative even norm in a negative-definite
/// lattice, canonical (sorted) order, closed under v ↦ −v.
pub fn short_vectors(l: &Lattice, norm: i64) -> Result<Vec<Vec<Int>>, LatticeError> {
    if !l.is_negative_definite() {
        return Err(LatticeError::NotDefinite);
    }
    Ok(vectors_of_norm(&l.gram, norm))
}

/// Roots r (norm −2) of a hyperbolic lattice with ⟨r,a₁⟩ > 0 > ⟨r,a₂⟩,
/// i.e. the reflection hyperplane of r separates a₁ from a₂. Requires
/// ⟨aᵢ,aᵢ⟩ > 0 and ⟨a₁,a₂⟩ > 0 (same positive cone).
pub fn separating_roots(
    l: &Lattice,
    a1: &[Int],
    a2: &[Int],
) -> Result<Vec<Vec<Int>>, LatticeError> {
    if !l.is_hyperbolic() {
        return Err(LatticeError::NotHyperbolic);
    }
    let n1 = l.norm(a1);
    let n2 = l.norm(a2);
    let s = l.inner(a1, a2);
    if !n1.is_positive() || !n2.is_positive() {
        return Err(LatticeError::Precondition(
            "a1, a2 must have positive norm".into(),
        ));
    }
    if !s.is_positive() {
        return Err(LatticeError::Precondition(
            "a1, a2 must lie in the same positive cone".into(),
        ));
    }
    // proportional vectors: nothing separates
    let detv = &n1 * &n2 - &s * &s;
    if detv.is_zero() {
        return Ok(vec![]);
    }
    assert!(detv.is_negative(), "span of a1,a2 must be hyperbolic");
    let n = l.rank();
    // orthogonal complement K of span(a1, a2)
    let mut pair_rows = IntMatrix::zero(2, n);
    let ga1 = l.gram.mul_vec(a1);
    let ga2 = l.gram.mul_vec(a2);
    for j in 0..n {
        pair_rows[(0, j)] = ga1[j].clone();
        pair_rows[(1, j)] = ga2[j].clone();
    }
    let kb = kernel_basis(&pair_rows);
    let bk = IntMatrix::from_big_rows(&kb);
    let k = bk.rows;
    let gram_k = bk.mul(&l.gram).mul(&bk.transpose());
    // pairing-value grid: (i, j) with i = ⟨r,a1⟩ ≥ 1, j = −⟨r,a2⟩ ≥ 1
    // bounded by n2·i² + 2s·i·j + n1·j² ≤ 2|detv|
    let bound = Int::from(2) * (-&detv);
    let mut out: Vec<Vec<Int>> = Vec::new();
    let mut i = Int::one();
    while &n2 * &i * &i <= bound {
        let mut j = Int::one();
        loop {
            let val = &n2 * &i * &i + Int::from(2) * &s * &i * &j + &n1 * &j * &j;
            if val > bound {
                break;
            }
            collect_roots_with_pairings(
                l, a1, a2, &n1, &n2, &s, &detv, &bk, &gram_k, k, &i, &j, &mut out,
            );
            j += 1;
        }
        i += 1;
    }
    out.sort();
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn collect_roots_with_pairings(
    l: &Lattice,
    a1: &[Int],
    a2: &[Int],
    n1: &Int,
    n2: &Int,
    s: &Int,
    detv: &Int,
    bk: &IntMatrix,
    gram_k: &IntMatrix,
    k: usize,
    i: &Int,
    j: &Int,
    out: &mut Vec<Vec<Int>>,
) {
    let n = l.rank();
    // integer particular solution of ⟨r,a1⟩ = i, ⟨r,a2⟩ = −j
    let mut a = IntMatrix::zero(2, n);
    let ga1 = l.gram.mul_vec(a1);
    let ga2 = l.gram.mul_vec(a2);
    for c in 0..n {
        a[(0, c)] = ga1[c].clone();
        a[(1, c)] = ga2[c].clone();
    }
    let Some(r0) = solve_integer(&a, &[i.clone(), -j.clone()]) else {
        return;
    };
    // V-component norm: (i,−j)·Gv⁻¹·(i,−j)ᵀ
    // Gv = [[n1,s],[s,n2]], Gv⁻¹ = [[n2,−s],[−s,n1]]/detv
    let qv_num = n2 * i * i + Int::from(2) * s * i * j + n1 * j * j;
    let qv = Rat::new(qv_num, detv.clone());
    let target = Rat::from(Int::from(-2)) - &qv;
    if target > Rat::zero() {
        return;
    }
    // r_V = α a1 + β a2 with (α, β) = Gv⁻¹ (i, −j)ᵀ
    let alpha = Rat::new(n2 * i + s * j, detv.clone());
    let beta = Rat::new(-(s * i) - n1 * j, detv.clone());
    let rv: Vec<Rat> = (0..n)
        .map(|c| &alpha * Rat::from(a1[c].clone()) + &beta * Rat::from(a2[c].clone()))
        .collect();
    if k == 0 {
        if target.is_zero() {
            out.push(r0);
        }
        return;
    }
    // offset of r0 − r_V in K coordinates
    let r0_perp: Vec<Rat> = (0..n).map(|c| Rat::from(r0[c].clone()) - &rv[c]).collect();
    let z0 = solve_rational(
        &bk.transpose(),
        &r0_perp,
    )
    .expect("perp component lies in K ⊗ Q");
    for z in coset_vectors_of_norm(gram_k, &z0, &target) {
        // r = r0 + (z − z0)·B_K
        let dz: Vec<Int> = z
            .iter()
            .zip(&z0)
            .map(|(a, b)| {
                let d = a - b;
                assert!(d.is_integer());
                d.to_integer()
            })
            .collect();
        let mut r = r0.clone();
        for (ci, row) in (0..k).map(|t| (t, bk.row(t))) {
            for c in 0..n {
                r[c] += &dz[ci] * &row[c];
            }
        }
        debug_assert_eq!(l.norm(&r), Int::from(-2));
        debug_assert_eq!(l.inner(&r, a1), *i);
        debug_assert_eq!(l.inner(&r, a2), -j.clone());
        out.push(r);
    }
}

/// All isometries l1 → l2 between negative-definite lattices, as matrices
/// (row i = image of basis vector i of l1 in l2 coordinates). Empty means
/// non-isometric. Intended for small groups; use `ade_isometry_group` for
/// large ADE orthogonal groups.
pub fn definite_isometries(l1: &Lattice, l2: &Lattice) -> Result<Vec<IntMatrix>, LatticeError> {
    if !l1.is_negative_definite() || !l2.is_negative_definite() {
        return Err(LatticeError::NotDefinite);
    }
    if l1.rank() != l2.rank() || l1.det() != l2.det() {
        return Ok(vec![]);
    }
    let n = l1.rank();
    // candidates per basis vector: all l2-vectors of the right norm
    let mut cand: Vec<Vec<Vec<Int>>> = Vec::with_capacity(n);
    let mut norm_cache: std::collections::HashMap<i64, Vec<Vec<Int>>> = Default::default();
    for i in 0..n {
        let norm = i64::try_from(&l1.gram[(i, i)]).expect("basis norm too large");
        let vs = norm_cache
            .entry(norm)
            .or_insert_with(|| vectors_of_norm(&l2.gram, norm))
            .clone();
        cand.push(vs);
    }
    let mut out = Vec::new();
    let mut chosen: Vec<Vec<Int>> = Vec::new();
    fn rec(
        l1: &Lattice,
        l2: &Lattice,
        cand: &[Vec<Vec<Int>>],
        chosen: &mut Vec<Vec<Int>>,
        out: &mut Vec<IntMatrix>,
    ) {
        let k = chosen.len();
        let n = l1.rank();
        if k == n {
            let u = IntMatrix::from_big_rows(chosen);
            if u.det().abs().is_one() {
                out.push(u);
            }
            return;
        }
        'cand: for c in &cand[k] {
            for (j, prev) in chosen.iter().enumerate() {
                if l2.inner(prev, c) != l1.gram[(j, k)] {
                    continue 'cand;
                }
            }
            chosen.push(c.clone());
            rec(l1, l2, cand, chosen, out);
            chosen.pop();
        }
    }
    rec(l1, l2, &cand, &mut chosen, &mut out);
    out.sort_by(|a, b| a.rows_vec().cmp(&b.rows_vec()));
    Ok(out)
}

/// Generators and order of O(L) for an ADE lattice given by any Gram matrix:
/// simple reflections plus diagram automorphisms, conjugated into the given
/// basis. O(L) = W ⋊ Aut(diagram) for root lattices.
pub fn ade_isometry_group(gram: &IntMatrix) -> Result<(Vec<IntMatrix>, BigUint), LatticeError> {
    let rb = ade::classify(gram).map_err(|e| LatticeError::NotAde(e.to_string()))?;
    let t = &rb.ade_type;
    let n = t.rank();
    let sg = t.standard_gram();
    // generators in the simple-root basis of the standard model
    let mut gens_std: Vec<IntMatrix> = Vec::new();
    for i in 0..n {
        // reflection in simple root eᵢ: b_j ↦ b_j + ⟨b_j, eᵢ⟩ eᵢ
        let mut m = IntMatrix::identity(n);
        for j in 0..n {
            m[(j, i)] = &m[(j, i)] + &sg[(j, i)];
        }
        gens_std.push(m);
    }
    for p in diagram_aut_generators(t) {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, p[i])] = Int::one();
        }
        gens_std.push(m);
    }
    // conjugate into the input basis: x ↦ x·S⁻¹·M·S with S = simple roots
    let s = IntMatrix::from_big_rows(&rb.simple_roots);
    let s_inv = s.unimodular_inverse();
    let gens: Vec<IntMatrix> = gens_std
        .iter()
        .map(|m| s_inv.mul(m).mul(&s))
        .collect();
    let order = t.weyl_order() * t.diagram_aut_order();
    Ok((gens, order))
}

/// Generating set (not all elements) of Aut(Dynkin diagram) as permutations
/// of the canonical node labels.
pub fn diagram_aut_generators(t: &ADEType) -> Vec<Vec<usize>> {
    use crate::ade::Family;
    let n = t.rank();
    let mut gens: Vec<Vec<usize>> = Vec::new();
    let mut push = |p: Vec<usize>| {
        if p.iter().enumerate().any(|(i, &x)| i != x) {
            gens.push(p);
        }
    };
    let mut off = 0usize;
    let mut offsets = Vec::new();
    for c in &t.components {
        offsets.push(off);
        let id: Vec<usize> = (0..n).collect();
        match (c.family, c.rank) {
            (Family::A, r) if r >= 2 => {
                let mut p = id.clone();
                for i in 0..r {
                    p[off + i] = off + r - 1 - i;
                }
                push(p);
            }
            (Family::D, 4) => {
                // S₃ on the outer nodes {0, 2, 3} (node 1 is the center)
                let mut swap = id.clone();
                swap[off + 2] = off + 3;
                swap[off + 3] = off + 2;
                push(swap);
                let mut cyc = id.clone();
                cyc[off] = off + 2;
                cyc[off + 2] = off + 3;
                cyc[off + 3] = off;
                push(cyc);
            }
            (Family::D, r) => {
                let mut p = id.clone();
                p[off + r - 2] = off + r - 1;
                p[off + r - 1] = off + r - 2;
                push(p);
            }
            (Family::E, 6) => {
                // swap the two long arms: 0↔4, 1↔3
                let mut p = id.clone();
                p[off] = off + 4;
                p[off + 4] = off;
                p[off + 1] = off + 3;
                p[off + 3] = off + 1;
                push(p);
            }
            _ => {}
        }
        off += c.rank;
    }
    // swaps of adjacent equal components
    for w in 0..t.components.len().saturating_sub(1) {
        if t.components[w] == t.components[w + 1] {
            let r = t.components[w].rank;
            let (o1, o2) = (offsets[w], offsets[w + 1]);
            let mut p: Vec<usize> = (0..n).collect();
            for i in 0..r {
                p[o1 + i] = o2 + i;
                p[o2 + i] = o1 + i;
            }
            gens.push(p);
        }
    }
    gens
}

/// Close a set of discriminant-form maps under composition (tiny groups).
pub fn subgroup_closure(a: &FiniteQuadraticForm, gens: &[FqfMap]) -> Vec<FqfMap> {
    let id = FqfMap::identity(a);
    let mut elems: Vec<FqfMap> = vec![id];
    let mut set: std::collections::HashSet<Vec<FqfElem>> =
        elems.iter().map(|m| m.gen_images.clone()).collect();
    let mut frontier = elems.clone();
    while let Some(m) = frontier.pop() {
        for g in gens {
            let prod = m.compose(a, g, a);
            if set.insert(prod.gen_images.clone()) {
                elems.push(prod.clone());
                frontier.push(prod);
            }
        }
    }
    elems.sort_by(|x, y| x.gen_images.cmp(&y.gen_images));
    elems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discforms;

    fn ade_lat(s: &str) -> Lattice {
        let t: ADEType = s.parse().unwrap();
        Lattice::new(t.standard_gram()).unwrap()
    }

    #[test]
    fn signatures() {
        assert_eq!(l10().signature, (1, 9));
        assert_eq!(ade_lat("E8").signature, (0, 8));
        assert_eq!(hyperbolic_plane().signature, (1, 1));
        assert_eq!(l10().rescale(2).signature, (1, 9));
        assert!(l10().is_hyperbolic());
        assert!(!l10().is_negative_definite());
    }

    #[test]
    fn discriminant_forms_basic() {
        // A₁ → Z/2 with q = −1/2 ≡ 3/2
        let d = discriminant_form(&ade_lat("A1"));
        assert_eq!(d.form.orders, vec![2]);
        assert_eq!(
            d.form.q_of(&vec![1]),
            Rat::new(Int::from(3), Int::from(2))
        );
        // E₈ → trivial
        let d8 = discriminant_form(&ade_lat("E8"));
        assert_eq!(d8.form.order(), 1);
        // A₇ → Z/8
        let d7 = discriminant_form(&ade_lat("A7"));
        assert_eq!(d7.form.orders, vec![8]);
        // |disc| = |det|
        for s in ["A2", "A3", "D4", "D5", "E6", "E7"] {
            let l = ade_lat(s);
            let d = discriminant_form(&l);
            assert_eq!(Int::from(d.form.order()), l.det().abs(), "disc order for {}", s);
        }
    }

    #[test]
    fn discriminant_projection_roundtrip() {
        for s in ["A1", "A3", "D4", "E6", "A7"] {
            let l = ade_lat(s);
            let d = discriminant_form(&l);
            for (j, v) in d.gen_vecs.iter().enumerate() {
                let mut want = d.form.zero_elem();
                want[j] = 1;
                assert_eq!(d.project(&l, v), want, "projection of generator {} of {}", j, s);
            }
            // lattice vectors project to zero
            let zero: Vec<Rat> = vec![Rat::zero(); l.rank()];
            assert_eq!(d.project(&l, &zero), d.form.zero_elem());
            let e0: Vec<Rat> = (0..l.rank())
                .map(|i| if i == 0 { Rat::one() } else { Rat::zero() })
                .collect();
            assert_eq!(d.project(&l, &e0), d.form.zero_elem());
        }
    }

    #[test]
    fn rescaled_disc_orders() {
        // |disc(R(2))| = 2^rank · |disc(R)| for ADE R
        for s in ["A1", "A2", "D4", "E6", "E8"] {
            let l = ade_lat(s);
            let l2 = l.rescale(2);
            let d = discriminant_form(&l2);
            let expect = l.det().abs() * (Int::from(1) << l.rank());
            assert_eq!(Int::from(d.form.order()), expect, "disc order of {}(2)", s);
        }
        // A₁(2): Z/4 with q = −1/4 ≡ 7/4
        let d = discriminant_form(&ade_lat("A1").rescale(2));
        assert_eq!(d.form.orders, vec![4]);
        assert_eq!(d.form.q_of(&vec![1]), Rat::new(Int::from(7), Int::from(4)));
    }

    #[test]
    fn complement_and_closure() {
        let l = l10();
        // root e₂ (first E₈ simple root) inside L₁₀
        let mut basis = IntMatrix::zero(1, 10);
        basis[(0, 2)] = Int::one();
        let e = Embedding::new(l.clone(), basis);
        assert_eq!(e.induced_gram[(0, 0)], Int::from(-2));
        let c = orthogonal_complement(&e);
        assert_eq!(c.rank(), 9);
        assert_eq!(c.induced_gram.det().abs(), Int::from(2));
        assert!(c.is_primitive());
        // complement of the complement recovers the closure (rank 1 again)
        let cc = orthogonal_complement(&c);
        assert_eq!(cc.rank(), 1);
        // doubled sublattice: closure returns the primitive row
        let mut basis2 = IntMatrix::zero(1, 10);
        basis2[(0, 2)] = Int::from(2);
        let e2 = Embedding::new(l.clone(), basis2);
        assert!(!e2.is_primitive());
        let p = primitive_closure(&e2);
        assert!(p.is_primitive());
        assert_eq!(p.induced_gram[(0, 0)], Int::from(-2));
    }

    /// Find an A₇ chain of roots inside E₇ by backtracking.
    fn a7_in_e7() -> Embedding {
        let e7 = ade_lat("E7");
        let roots = vectors_of_norm(&e7.gram, -2);
        fn extend(
            e7: &Lattice,
            roots: &[Vec<Int>],
            chain: &mut Vec<Vec<Int>>,
        ) -> bool {
            if chain.len() == 7 {
                return true;
            }
            for r in roots {
                let ok = chain.iter().enumerate().all(|(i, c)| {
                    let want = if i + 1 == chain.len() { 1 } else { 0 };
                    e7.inner(c, r) == Int::from(want)
                });
                if ok {
                    chain.push(r.clone());
                    if extend(e7, roots, chain) {
                        return true;
                    }
                    chain.pop();
                }
            }
            false
        }
        let mut chain = vec![roots[0].clone()];
        assert!(extend(&e7, &roots, &mut chain), "no A7 chain in E7");
        Embedding::new(e7, IntMatrix::from_big_rows(&chain))
    }

    #[test]
    fn a7_closure_in_e7_is_e7() {
        let e = a7_in_e7();
        assert_eq!(e.induced_gram, ade_lat("A7").gram);
        assert!(!e.is_primitive(), "A7 has index 2 in E7");
        let p = primitive_closure(&e);
        assert!(p.is_primitive());
        assert_eq!(p.induced_gram.det().abs(), Int::from(2));
        let rb = ade::classify(&p.induced_gram).unwrap();
        assert_eq!(rb.ade_type.to_string(), "E7");
    }

    #[test]
    fn build_mr_empty_and_a1() {
        let l = l10();
        // R = 0
        let e0 = Embedding::new(l.clone(), IntMatrix::zero(0, 10));
        // empty type is not ADE-classifiable as root-generated? rank 0 passes
        let (m0, pi0) = build_mr(&e0).unwrap();
        assert_eq!(m0.rank(), 10);
        assert_eq!(m0.gram, l.rescale(2).gram);
        assert!(pi0.is_primitive());
        // R = A₁ spanned by a root
        let mut basis = IntMatrix::zero(1, 10);
        basis[(0, 2)] = Int::one();
        let e1 = Embedding::new(l.clone(), basis);
        let (m1, pi1) = build_mr(&e1).unwrap();
        assert_eq!(m1.rank(), 11);
        assert!(m1.is_hyperbolic());
        assert!(pi1.is_primitive());
        let comp = orthogonal_complement(&pi1);
        assert_eq!(comp.rank(), 1);
        // complement ≅ A₁(2): Gram (−4)
        assert_eq!(comp.induced_gram[(0, 0)], Int::from(-4));
    }

    #[test]
    fn build_mr_e6() {
        let l = l10();
        // E6 sub-diagram of the E8 block: nodes 0,1,2,3,4,7 of E8 live at
        // L10 coordinates 2..10
        let rows: Vec<Vec<i64>> = [0usize, 1, 2, 3, 4, 7]
            .iter()
            .map(|&i| {
                let mut v = vec![0i64; 10];
                v[2 + i] = 1;
                v
            })
            .collect();
        let e = Embedding::new(l, IntMatrix::from_rows(&rows));
        let rb = ade::classify(&e.induced_gram).unwrap();
        assert_eq!(rb.ade_type.to_string(), "E6");
        let (m, pi) = build_mr(&e).unwrap();
        assert_eq!(m.rank(), 16);
        assert!(m.is_hyperbolic());
        let comp = orthogonal_complement(&pi);
        assert_eq!(comp.rank(), 6);
        // complement ≅ E6(2): halve the Gram matrix and classify
        let mut half = comp.induced_gram.clone();
        for i in 0..6 {
            for j in 0..6 {
                let v = comp.induced_gram[(i, j)].clone();
                assert!((&v % Int::from(2)).is_zero());
                half[(i, j)] = v / Int::from(2);
            }
        }
        let rb2 = ade::classify(&half).unwrap();
        assert_eq!(rb2.ade_type.to_string(), "E6");
    }

    #[test]
    fn isometry_groups_small() {
        let a1 = ade_lat("A1");
        let o = definite_isometries(&a1, &a1).unwrap();
        assert_eq!(o.len(), 2);
        let a2 = ade_lat("A2");
        assert_eq!(definite_isometries(&a2, &a2).unwrap().len(), 12);
        let two_a1 = ade_lat("2A1");
        assert_eq!(definite_isometries(&two_a1, &two_a1).unwrap().len(), 8);
        // non-isometric pair
        assert!(definite_isometries(&a1, &a1.rescale(2)).unwrap().is_empty());
        // group property: closed under inverse/product for A2
        let o2 = definite_isometries(&a2, &a2).unwrap();
        let set: std::collections::HashSet<Vec<Vec<Int>>> =
            o2.iter().map(|m| m.rows_vec()).collect();
        for g in &o2 {
            for h in &o2 {
                assert!(set.contains(&g.mul(h).rows_vec()));
            }
        }
    }

    #[test]
    fn ade_group_orders_match_backtracking() {
        for s in ["A1", "A2", "A3", "2A1", "D4", "A1+A2"] {
            let l = ade_lat(s);
            let listed = definite_isometries(&l, &l).unwrap();
            let (gens, order) = ade_isometry_group(&l.gram).unwrap();
            assert_eq!(BigUint::from(listed.len()), order, "order of O({})", s);
            // generators are isometries and lie in the listed group
            let set: std::collections::HashSet<Vec<Vec<Int>>> =
                listed.iter().map(|m| m.rows_vec()).collect();
            for g in &gens {
                assert_eq!(g.mul(&l.gram).mul(&g.transpose()), l.gram);
                assert!(set.contains(&g.rows_vec()));
            }
        }
    }

    #[test]
    fn separating_roots_oracle() {
        // U ⊕ A₁ with explicit small example
        let l = Lattice::new(IntMatrix::from_rows(&[
            vec![0, 1, 0],
            vec![1, 0, 0],
            vec![0, 0, -2],
        ]))
        .unwrap();
        let a1: Vec<Int> = vec![1.into(), 2.into(), 1.into()];
        let a2: Vec<Int> = vec![1.into(), 2.into(), (-1).into()];
        assert_eq!(l.norm(&a1), Int::from(2));
        let found = separating_roots(&l, &a1, &a2).unwrap();
        // oracle: brute-force box enumeration
        let mut oracle = Vec::new();
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                for z in -6i64..=6 {
                    let r: Vec<Int> = vec![x.into(), y.into(), z.into()];
                    if l.norm(&r) == Int::from(-2)
                        && l.inner(&r, &a1).is_positive()
                        && l.inner(&r, &a2).is_negative()
                    {
                        oracle.push(r);
                    }
                }
            }
        }
        oracle.sort();
        assert_eq!(found, oracle);
        assert!(!found.is_empty());
        // a1 = a2 → empty
        assert!(separating_roots(&l, &a1, &a1).unwrap().is_empty());
        // symmetric up to sign
        let back = separating_roots(&l, &a2, &a1).unwrap();
        let mut negged: Vec<Vec<Int>> = back.iter().map(|r| r.iter().map(|c| -c).collect()).collect();
        negged.sort();
        assert_eq!(found, negged);
    }

    #[test]
    fn disc_map_of_isometry() {
        // −1 on A₂ acts as −1 on Z/3
        let l = ade_lat("A2");
        let d = discriminant_form(&l);
        let mut neg = IntMatrix::identity(2);
        neg[(0, 0)] = Int::from(-1);
        neg[(1, 1)] = Int::from(-1);
        let m = d.map_of_isometry(&l, &neg);
        assert_eq!(m.gen_images, vec![vec![2]]);
        // reflections act trivially on the discriminant group
        let (gens, _) = ade_isometry_group(&l.gram).unwrap();
        // first generator is a simple reflection
        let refl_img = d.map_of_isometry(&l, &gens[0]);
        assert!(refl_img.is_isometry_signed(&d.form, &d.form, 1));
        assert_eq!(refl_img.gen_images, FqfMap::identity(&d.form).gen_images);
        let o = discforms::orthogonal_group(&d.form, 1 << 10).unwrap();
        assert_eq!(o.len(), 2);
    }
}
