//! Glue L10(2) to a genus-class complement K along an anti-isometry of
//! their discriminant forms (both isometric to u(2)^5), producing an even
//! unimodular lattice of signature (1,25) with explicit coordinates for
//! both summands.

use anyhow::{ensure, Context, Result};
use chamber_forge_core::discforms::{reduce_mod, FiniteQuadraticForm, FqfElem};
use chamber_forge_core::exact_linalg::{hermite_row_basis, solve_integer};
use chamber_forge_core::lattices::{discriminant_form, l10, DiscriminantForm, Lattice};
use chamber_forge_core::{Int, IntMatrix, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub struct GluedEmbedding {
    /// L26 with the Gram in the glued basis
    pub l26: Lattice,
    /// 10×26, rows = images of the standard L10 basis (the S = L10(2) part)
    pub s_basis: IntMatrix,
    /// 16×26, rows = a basis of the complement K
    pub k_basis: IntMatrix,
    /// Gram of K in the `k_basis` coordinates (negative definite)
    pub k_gram: IntMatrix,
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Hyperbolic pairs (x1, y1, ..., x5, y5) for a form isometric to u(2)^5:
/// q(x_i) = q(y_i) = 0, b(x_i, y_i) = 1/2, all other pairings integral.
fn u_basis(form: &FiniteQuadraticForm) -> Result<Vec<FqfElem>> {
    ensure!(form.order() == 1024, "discriminant group must have order 2^10");
    let els = form.elements(4096).context("listing discriminant group")?;
    let half = rat(1, 2);
    let mut chosen: Vec<FqfElem> = Vec::new();
    for _ in 0..5 {
        let avail: Vec<&FqfElem> = els
            .iter()
            .filter(|e| {
                chosen.iter().all(|c| reduce_mod(&form.b_of(e, c), 1).is_zero())
            })
            .collect();
        let mut found: Option<(FqfElem, FqfElem)> = None;
        'outer: for x in &avail {
            if **x == form.zero_elem() || !reduce_mod(&form.q_of(x), 2).is_zero()
            {
                continue;
            }
            for y in &avail {
                if reduce_mod(&form.b_of(x, y), 1) == half {
                    let mut yy = (*y).clone();
                    if !reduce_mod(&form.q_of(&yy), 2).is_zero() {
                        yy = form.add(&yy, x);
                    }
                    ensure!(reduce_mod(&form.q_of(&yy), 2).is_zero());
                    ensure!(reduce_mod(&form.b_of(x, &yy), 1) == half);
                    found = Some(((*x).clone(), yy));
                    break 'outer;
                }
            }
        }
        let (x, y) = found.context("no hyperbolic pair: form is not u(2)^5")?;
        chosen.push(x);
        chosen.push(y);
    }
    Ok(chosen)
}

/// Lift a discriminant-group element to a rational vector in lattice
/// coordinates.
fn lift(disc: &DiscriminantForm, e: &FqfElem) -> Vec<Rat> {
    let n = disc.gen_vecs.first().map_or(0, |v| v.len());
    let mut out = vec![Rat::zero(); n];
    for (c, gen) in e.iter().zip(&disc.gen_vecs) {
        if *c != 0 {
            let ci = Rat::from(Int::from(*c));
            for (o, g) in out.iter_mut().zip(gen) {
                *o += &ci * g;
            }
        }
    }
    out
}

/// Build L26 ⊇ S ⊕ K where S = L10(2), gluing the two u(2)^5 discriminant
/// forms along the identity matching of hyperbolic pairs (an
/// anti-isometry, as all q-values involved are 0).
pub fn glue_l26(k_gram: &IntMatrix) -> Result<GluedEmbedding> {
    let s_lat = l10().rescale(2);
    let k_lat = Lattice::new(k_gram.clone()).context("complement Gram")?;
    ensure!(k_lat.is_negative_definite(), "K must be negative definite");
    let ds = discriminant_form(&s_lat);
    let dk = discriminant_form(&k_lat);
    let us = u_basis(&ds.form).context("u-basis of disc(L10(2)))")?;
    let uk = u_basis(&dk.form).context("u-basis of disc(K))")?;
    // anti-isometry check on the matched generators: q sums to 0 mod 2Z,
    // pairings sum to 0 mod Z (q-values are all 0 and −1/2 ≡ 1/2 mod Z)
    for i in 0..10 {
        ensure!(
            reduce_mod(&(ds.form.q_of(&us[i]) + dk.form.q_of(&uk[i])), 2)
                .is_zero(),
            "matched generators are not anti-isometric"
        );
        for j in 0..10 {
            ensure!(
                reduce_mod(
                    &(ds.form.b_of(&us[i], &us[j])
                        + dk.form.b_of(&uk[i], &uk[j])),
                    1
                )
                .is_zero(),
                "matched pairings are not anti-isometric"
            );
        }
    }
    let amb = s_lat.direct_sum(&k_lat);
    // generators of 2·L26 in ambient coordinates
    let mut rows: Vec<Vec<Int>> = Vec::with_capacity(36);
    for i in 0..26 {
        let mut r = vec![Int::zero(); 26];
        r[i] = Int::from(2);
        rows.push(r);
    }
    for t in 0..10 {
        let ls = lift(&ds, &us[t]);
        let lk = lift(&dk, &uk[t]);
        let mut r = Vec::with_capacity(26);
        for v in ls.iter().chain(lk.iter()) {
            let d = v * rat(2, 1);
            ensure!(d.is_integer(), "glue vector has denominator > 2");
            r.push(d.to_integer());
        }
        rows.push(r);
    }
    let b2 = hermite_row_basis(&IntMatrix::from_big_rows(&rows));
    ensure!(b2.rows == 26, "glued lattice lost rank");
    let g4 = b2.mul(&amb.gram).mul(&b2.transpose());
    let four = Int::from(4);
    let mut g = IntMatrix::zero(26, 26);
    for i in 0..26 {
        for j in 0..26 {
            let (d, r) = g4[(i, j)].div_mod_floor(&four);
            ensure!(r.is_zero(), "glue group is not isotropic");
            g[(i, j)] = d;
        }
    }
    for i in 0..26 {
        ensure!(
            g[(i, i)].mod_floor(&Int::from(2)).is_zero(),
            "glued lattice is not even"
        );
    }
    let l26 = Lattice::new(g).context("glued Gram degenerate")?;
    ensure!(l26.det().abs() == Int::one(), "glued lattice is not unimodular");
    ensure!(l26.signature == (1, 25), "glued signature is not (1,25)");
    // coordinates of the S and K unit vectors in the L26 basis
    let bt = b2.transpose();
    let coords = |i: usize| -> Result<Vec<Int>> {
        let mut b = vec![Int::zero(); 26];
        b[i] = Int::from(2);
        solve_integer(&bt, &b).context("summand vector not in 2·L26 image")
    };
    let s_rows: Vec<Vec<Int>> =
        (0..10).map(coords).collect::<Result<_>>()?;
    let k_rows: Vec<Vec<Int>> =
        (10..26).map(coords).collect::<Result<_>>()?;
    let s_basis = IntMatrix::from_big_rows(&s_rows);
    let k_basis = IntMatrix::from_big_rows(&k_rows);
    ensure!(
        s_basis.mul(&l26.gram).mul(&s_basis.transpose()) == s_lat.gram,
        "S block does not induce 2·(L10 Gram)"
    );
    ensure!(
        k_basis.mul(&l26.gram).mul(&k_basis.transpose()) == *k_gram,
        "K block does not induce the complement Gram"
    );
    let cross = s_basis.mul(&l26.gram).mul(&k_basis.transpose());
    for i in 0..10 {
        for j in 0..16 {
            ensure!(cross[(i, j)].is_zero(), "summands are not orthogonal");
        }
    }
    Ok(GluedEmbedding { l26, s_basis, k_basis, k_gram: k_gram.clone() })
}
