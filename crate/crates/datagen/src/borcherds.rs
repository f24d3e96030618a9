//! Conway-chamber machinery over a glued L26: construct a Weyl vector,
//! walk it until the induced chamber contains the Vinberg interior point,
//! and enumerate the walls of the induced chamber.
//!
//! Correctness notes (all verified by runtime assertions):
//! * a vector w is a Weyl vector iff it is primitive isotropic and the
//!   root-free condition holds for the even unimodular rank-24 quotient
//!   lattice attached to w (checked explicitly after construction);
//! * the walk step reflects in a Leech root r (⟨r,w⟩ = 1) separating the
//!   target a from the chamber of w; a full sweep over the finitely many
//!   admissible values of c = ⟨r,a⟩ < 0 proves there is no separating
//!   root left, so the final chamber provably contains a;
//! * every wall of the induced chamber on S = L10(2) is cut out by a root
//!   v of L10, and any Leech root r whose hyperplane meets S⊗R in v⊥ has
//!   S-component ±ι(v)/2, hence r = (ι(v)+z)/2 with z ∈ K of norm −4.
//!   Enumerating over the finitely many z is therefore complete.

use crate::glue::GluedEmbedding;
use anyhow::{bail, ensure, Context, Result};
use chamber_forge_core::chambers::{vinberg_chamber, Chamber};
use chamber_forge_core::exact_linalg::{
    coset_vectors_of_norm, kernel_basis, lll_transform_gram, primitive_part,
    solve_integer, solve_rational, vectors_of_norm,
};
use chamber_forge_core::lattices::l10;
use chamber_forge_core::{Int, IntMatrix, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn to_rat(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from(x.clone())).collect()
}

fn add_scaled(a: &[Int], b: &[Int], c: &Int) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x + y * c).collect()
}

/// a0 (the Vinberg interior point) in L26 coordinates.
pub fn a0_in_l26(ge: &GluedEmbedding) -> Vec<Int> {
    let a0 = vinberg_chamber().interior;
    ge.s_basis.transpose().mul_vec(&a0)
}

/// Negate a Gram matrix.
fn neg(g: &IntMatrix) -> IntMatrix {
    let mut out = IntMatrix::zero(g.rows, g.cols);
    for i in 0..g.rows {
        for j in 0..g.cols {
            out[(i, j)] = -g[(i, j)].clone();
        }
    }
    out
}

/// Rank-24 orthogonal complement of a hyperbolic pair through `w`:
/// returns (basis rows, Gram), asserting the Gram is negative definite.
fn perp24(l26: &chamber_forge_core::lattices::Lattice, v1: &[Int], v2: &[Int])
    -> Result<(IntMatrix, IntMatrix)>
{
    let rows =
        vec![l26.gram.mul_vec(v1), l26.gram.mul_vec(v2)];
    let kb = kernel_basis(&IntMatrix::from_big_rows(&rows));
    ensure!(kb.len() == 24, "unexpected kernel rank");
    let b = IntMatrix::from_big_rows(&kb);
    let g = b.mul(&l26.gram).mul(&b.transpose());
    ensure!(
        chamber_forge_core::lattices::signature_of(&g) == Some((0, 24)),
        "complement is not negative definite"
    );
    Ok((b, g))
}

/// Construct a Weyl vector for some Conway chamber whose closure contains
/// the cusp ι(f), f the first standard basis vector of L10.
pub fn initial_weyl(ge: &GluedEmbedding) -> Result<Vec<Int>> {
    let l26 = &ge.l26;
    let a26 = a0_in_l26(ge);
    let mut u26 = ge.s_basis.row(0);
    ensure!(l26.norm(&u26).is_zero(), "cusp vector is not isotropic");
    if l26.inner(&u26, &a26).is_negative() {
        u26 = u26.iter().map(|x| -x).collect();
    }
    ensure!(l26.inner(&u26, &a26).is_positive());
    // hyperbolic partner
    let a = IntMatrix::from_big_rows(&[l26.gram.mul_vec(&u26)]);
    let y = solve_integer(&a, &[Int::one()])
        .context("cusp vector is not primitive")?;
    let half_norm = l26.norm(&y) / Int::from(2);
    let u2: Vec<Int> = y
        .iter()
        .zip(&u26)
        .map(|(yi, ui)| yi - &half_norm * ui)
        .collect();
    ensure!(l26.norm(&u2).is_zero());
    ensure!(l26.inner(&u26, &u2).is_one());
    let (bn, gn) = perp24(l26, &u26, &u2)?;
    ensure!(gn.det().abs() == Int::one(), "quotient lattice not unimodular");
    let roots24 = vectors_of_norm(&gn, -2);
    let w: Vec<Int> = if roots24.is_empty() {
        // Leech quotient: the cusp itself is a Weyl vector
        u26.clone()
    } else {
        ensure!(roots24.len() % 24 == 0, "root count is not 24h");
        let h = Int::from((roots24.len() / 24) as i64);
        // positivity of roots via the projection of a26 (ties by lex order)
        let alpha = l26.inner(&a26, &u2);
        let beta = l26.inner(&a26, &u26);
        let mut an = a26.clone();
        an = add_scaled(&an, &u26, &(-alpha));
        an = add_scaled(&an, &u2, &(-beta));
        ensure!(l26.inner(&an, &u26).is_zero());
        ensure!(l26.inner(&an, &u2).is_zero());
        let gan = l26.gram.mul_vec(&an);
        let tvec: Vec<Int> =
            (0..24).map(|i| {
                bn.row(i).iter().zip(&gan).map(|(x, y)| x * y).sum()
            }).collect();
        let mut rho2 = vec![Int::zero(); 24];
        for r in &roots24 {
            let t: Int = r.iter().zip(&tvec).map(|(x, y)| x * y).sum();
            let positive = if t.is_zero() {
                r.iter().find(|c| !c.is_zero()).unwrap().is_positive()
            } else {
                t.is_positive()
            };
            if positive {
                for (s, c) in rho2.iter_mut().zip(r) {
                    *s += c;
                }
            }
        }
        let two = Int::from(2);
        let rho: Vec<Int> = rho2
            .iter()
            .map(|c| {
                let (d, r) = c.div_mod_floor(&two);
                ensure!(r.is_zero(), "half-sum of positive roots not integral");
                Ok(d)
            })
            .collect::<Result<_>>()?;
        // ⟨ρ,ρ⟩ = −2h(h+1)
        let grho = gn.mul_vec(&rho);
        let rho_norm: Int = rho.iter().zip(&grho).map(|(x, y)| x * y).sum();
        ensure!(
            rho_norm == -Int::from(2) * &h * (&h + Int::one()),
            "Weyl vector norm identity failed"
        );
        let mut w = vec![Int::zero(); 26];
        w = add_scaled(&w, &u26, &h);
        w = add_scaled(&w, &u2, &(&h + Int::one()));
        let rho26 = bn.transpose().mul_vec(&rho);
        w = add_scaled(&w, &rho26, &Int::one());
        w
    };
    let mut w = w;
    ensure!(l26.norm(&w).is_zero(), "Weyl vector is not isotropic");
    ensure!(primitive_part(&w) == w, "Weyl vector is not primitive");
    if l26.inner(&w, &a26).is_negative() {
        w = w.iter().map(|x| -x).collect();
    }
    verify_weyl(ge, &w)?;
    Ok(w)
}

/// Oracle check that w is a Weyl vector: the rank-24 complement of a
/// hyperbolic pair through w is root-free even unimodular.
pub fn verify_weyl(ge: &GluedEmbedding, w: &[Int]) -> Result<()> {
    let l26 = &ge.l26;
    let a = IntMatrix::from_big_rows(&[l26.gram.mul_vec(w)]);
    let y = solve_integer(&a, &[Int::one()])
        .context("Weyl vector is not primitive")?;
    let half_norm = l26.norm(&y) / Int::from(2);
    let y0: Vec<Int> = y
        .iter()
        .zip(w)
        .map(|(yi, wi)| yi - &half_norm * wi)
        .collect();
    let (_, g) = perp24(l26, w, &y0)?;
    ensure!(g.det().abs() == Int::one());
    ensure!(
        vectors_of_norm(&g, -2).is_empty(),
        "candidate Weyl vector has Leech-quotient roots"
    );
    Ok(())
}

/// Find a Leech root of w separating a from the chamber of w
/// (⟨r,w⟩ = 1, ⟨r,a⟩ = c < 0), or prove none exists.  Sweeps c downward
/// over the finite admissible range.
fn separating_leech_root(
    ge: &GluedEmbedding,
    w: &[Int],
    a26: &[Int],
) -> Result<Option<Vec<Int>>> {
    let l26 = &ge.l26;
    let wa = l26.inner(w, a26);
    ensure!(wa.is_positive(), "Weyl vector left the positive cone");
    let a2 = l26.norm(a26);
    // rank-24 kernel of the pair (w, a), LLL-reduced once
    let rows = vec![l26.gram.mul_vec(w), l26.gram.mul_vec(a26)];
    let pair = IntMatrix::from_big_rows(&rows);
    let kb = kernel_basis(&pair);
    ensure!(kb.len() == 24);
    let b0 = IntMatrix::from_big_rows(&kb);
    let g0 = b0.mul(&l26.gram).mul(&b0.transpose());
    let u = lll_transform_gram(&neg(&g0), (99, 100));
    let bred = u.mul(&b0);
    let gred = bred.mul(&l26.gram).mul(&bred.transpose());
    let bred_t = bred.transpose();
    // admissible c: span-norm ≥ −2, i.e. c ≥ a²/(2wa) − wa
    let wa_r = Rat::from(wa.clone());
    let a2_r = Rat::from(a2.clone());
    let bound = &a2_r / (Rat::from(Int::from(2)) * &wa_r) - &wa_r;
    let c_min = bound.ceil().to_integer();
    let mut c = -Int::one();
    while c >= c_min {
        let target_c = c.clone();
        c -= Int::one();
        let rhs = [Int::one(), target_c.clone()];
        let xp = match solve_integer(&pair, &rhs) {
            Some(x) => x,
            None => continue,
        };
        let c_r = Rat::from(target_c.clone());
        // span part s·w + t·a with t = 1/wa, s = (c − a²/wa)/wa
        let t = Rat::from(Int::one()) / &wa_r;
        let s = (&c_r - &a2_r / &wa_r) / &wa_r;
        let norm_span = Rat::from(Int::from(2)) * &s * &t * &wa_r
            + &t * &t * &a2_r;
        let target = -Rat::from(Int::from(2)) - &norm_span;
        if target.is_positive() {
            continue;
        }
        // offset = perpendicular part of xp, in bred coordinates
        let mut perp: Vec<Rat> = to_rat(&xp);
        for (i, p) in perp.iter_mut().enumerate() {
            *p -= &s * Rat::from(w[i].clone()) + &t * Rat::from(a26[i].clone());
        }
        let off = solve_rational(&bred_t, &perp)
            .context("perpendicular part not in the kernel span")?;
        let sols = coset_vectors_of_norm(&gred, &off, &target);
        if let Some(y) = sols.first() {
            // r = xp + (y − off)·bred
            let mut r = to_rat(&xp);
            for (j, (yj, oj)) in y.iter().zip(&off).enumerate() {
                let d = yj - oj;
                if !d.is_zero() {
                    for (ri, b) in r.iter_mut().zip(&bred.row(j)) {
                        *ri += &d * Rat::from(b.clone());
                    }
                }
            }
            let r: Vec<Int> = r
                .into_iter()
                .map(|x| {
                    ensure!(x.is_integer(), "separating root not integral");
                    Ok(x.to_integer())
                })
                .collect::<Result<_>>()?;
            ensure!(l26.norm(&r) == Int::from(-2));
            ensure!(l26.inner(&r, w).is_one());
            ensure!(l26.inner(&r, a26) == target_c);
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Walk the Weyl vector until the closure of its Conway chamber contains
/// ι(a0).  Each step strictly decreases ⟨w, ι(a0)⟩ > 0, so this
/// terminates; the final sweep coming up empty is the proof of
/// containment.
pub fn walk_to_a0(ge: &GluedEmbedding, w0: Vec<Int>) -> Result<Vec<Int>> {
    let a26 = a0_in_l26(ge);
    let mut w = w0;
    let mut steps = 0usize;
    loop {
        match separating_leech_root(ge, &w, &a26)? {
            Some(r) => {
                // s_r(w) = w + ⟨w,r⟩·r = w + r
                w = add_scaled(&w, &r, &Int::one());
                steps += 1;
                if steps % 50 == 0 {
                    eprintln!(
                        "    walk: {} reflections, <w,a> = {}",
                        steps,
                        ge.l26.inner(&w, &a26)
                    );
                }
            }
            None => {
                eprintln!("    walk finished after {steps} reflections");
                return Ok(w);
            }
        }
    }
}

pub struct WallData {
    /// wall roots of the induced chamber, in L10 coordinates, pairing > 0
    /// with the Vinberg interior point (facet-defining only)
    pub walls: Vec<Vec<Int>>,
    /// number of pairs (r, z): r a wall, z ∈ K of norm −4, (ι(r)+z)/2 ∈ L26
    pub pairs: usize,
    /// number of norm −4 vectors of K
    pub n4k: usize,
    /// the final Weyl vector, L26 coordinates
}

pub enum Induced {
    Finite(Box<WallData>),
    /// the projection of w to S⊗Q is not positive: infinitely many walls
    Infinite,
}

/// Is (ι(v) + z26) divisible by 2 in L26 (membership of (ι(v)+z)/2)?
fn half_member(ge: &GluedEmbedding, v: &[Int], z26: &[Int]) -> bool {
    let iv = ge.s_basis.transpose().mul_vec(v);
    iv.iter()
        .zip(z26)
        .all(|(a, b)| (a + b).mod_floor(&Int::from(2)).is_zero())
}

/// Enumerate the walls of the induced chamber of the (certified) Weyl
/// vector w.
pub fn induced_chamber(ge: &GluedEmbedding, w: &[Int]) -> Result<Induced> {
    let l26 = &ge.l26;
    let l10 = l10();
    let a0 = vinberg_chamber().interior;
    // functional f on L10: f_i = ⟨ι(e_i), w⟩
    let gw = l26.gram.mul_vec(w);
    let f: Vec<Int> = (0..10)
        .map(|i| ge.s_basis.row(i).iter().zip(&gw).map(|(x, y)| x * y).sum())
        .collect();
    let g10inv = l10.gram.rational_inverse().context("L10 Gram invertible")?;
    let fdual: Vec<Rat> = (0..10)
        .map(|j| {
            (0..10)
                .map(|i| &g10inv[j][i] * Rat::from(f[i].clone()))
                .sum()
        })
        .collect();
    let q: Rat = fdual
        .iter()
        .zip(&f)
        .map(|(x, y)| x * Rat::from(y.clone()))
        .sum();
    if !q.is_positive() {
        return Ok(Induced::Infinite);
    }
    // rank-9 kernel of f, LLL-reduced once
    let frow = IntMatrix::from_big_rows(&[f.clone()]);
    let kb = kernel_basis(&frow);
    ensure!(kb.len() == 9);
    let b0 = IntMatrix::from_big_rows(&kb);
    let g0 = b0.mul(&l10.gram).mul(&b0.transpose());
    ensure!(
        chamber_forge_core::lattices::signature_of(&g0) == Some((0, 9)),
        "kernel of f must be negative definite when q > 0"
    );
    let u = lll_transform_gram(&neg(&g0), (99, 100));
    let bred = u.mul(&b0);
    let gred = bred.mul(&l10.gram).mul(&bred.transpose());
    let bred_t = bred.transpose();
    let n4list = vectors_of_norm(&ge.k_gram, -4);
    let n4k = n4list.len();
    let two = Rat::from(Int::from(2));
    let mut cands: std::collections::BTreeSet<Vec<Int>> =
        std::collections::BTreeSet::new();
    for z in &n4list {
        let z26 = ge.k_basis.transpose().mul_vec(z);
        let d = Int::from(2) - l26.inner(&z26, w);
        let xp = match solve_integer(&frow, &[d.clone()]) {
            Some(x) => x,
            None => continue,
        };
        let d_r = Rat::from(d.clone());
        let target = -&two - &d_r * &d_r / &q;
        // offset: xp − (d/q)·fdual in bred coordinates
        let scale = &d_r / &q;
        let perp: Vec<Rat> = xp
            .iter()
            .zip(&fdual)
            .map(|(x, fd)| Rat::from(x.clone()) - &scale * fd)
            .collect();
        let off = solve_rational(&bred_t, &perp)
            .context("perpendicular part outside kernel span")?;
        for y in coset_vectors_of_norm(&gred, &off, &target) {
            let mut v = to_rat(&xp);
            for (j, (yj, oj)) in y.iter().zip(&off).enumerate() {
                let diff = yj - oj;
                if !diff.is_zero() {
                    for (vi, b) in v.iter_mut().zip(&bred.row(j)) {
                        *vi += &diff * Rat::from(b.clone());
                    }
                }
            }
            let v: Vec<Int> = v
                .into_iter()
                .map(|x| {
                    ensure!(x.is_integer(), "candidate root not integral");
                    Ok(x.to_integer())
                })
                .collect::<Result<_>>()?;
            ensure!(l10.norm(&v) == Int::from(-2));
            if !half_member(ge, &v, &z26) {
                continue;
            }
            let pa = l10.inner(&v, &a0);
            ensure!(
                pa.is_positive(),
                "certified chamber has a candidate wall violating a0; \
                 the walk certificate is broken"
            );
            cands.insert(v);
        }
    }
    if cands.is_empty() {
        bail!("no candidate walls found for a finite-type chamber");
    }
    let d0 = Chamber::from_inequalities(
        l10.clone(),
        cands.iter().cloned().collect(),
        a0,
    );
    // pair count over the facet-defining walls
    let mut pairs = 0usize;
    for r in &d0.walls {
        for z in &n4list {
            let z26 = ge.k_basis.transpose().mul_vec(z);
            if half_member(ge, r, &z26) {
                pairs += 1;
            }
        }
    }
    Ok(Induced::Finite(Box::new(WallData {
        walls: d0.walls,
        pairs,
        n4k,
    })))
}
