//! Kneser neighbor walk through the genus of the orthogonal complement K
//! of L10(2) in L26: even negative-definite lattices of rank 16 with
//! discriminant form u(2)^5.  The walk starts at D8 ⊕ E8(2) and takes
//! 3-neighbors until 17 pairwise non-isometric classes are found; classes
//! are told apart by their theta-series head counts (N2, N4, N6, N8),
//! which is self-validating: the counts are isometry invariants, so 17
//! distinct tuples prove 17 distinct classes, and 17 is the known class
//! number of this genus.

use anyhow::{bail, ensure, Result};
use chamber_forge_core::exact_linalg::{
    hermite_row_basis, lll_transform_gram, vectors_of_norm,
};
use chamber_forge_core::{Int, IntMatrix};
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;

const RANK: usize = 16;
const MAX_THETA: usize = 4; // N2, N4, N6, N8

/// Seed class of the genus: D8 ⊕ E8(2), negative definite.
pub fn seed_gram() -> IntMatrix {
    let d8: chamber_forge_core::ade::ADEType = "D8".parse().unwrap();
    let e8: chamber_forge_core::ade::ADEType = "E8".parse().unwrap();
    let d8g = d8.standard_gram();
    let e8g = e8.standard_gram();
    let mut g = IntMatrix::zero(RANK, RANK);
    for i in 0..8 {
        for j in 0..8 {
            g[(i, j)] = d8g[(i, j)].clone();
            g[(8 + i, 8 + j)] = &e8g[(i, j)] * Int::from(2);
        }
    }
    g
}

pub fn negate(g: &IntMatrix) -> IntMatrix {
    let mut out = IntMatrix::zero(g.rows, g.cols);
    for i in 0..g.rows {
        for j in 0..g.cols {
            out[(i, j)] = -g[(i, j)].clone();
        }
    }
    out
}

fn quad(p: &IntMatrix, x: &[Int]) -> Int {
    let px = p.mul_vec(x);
    x.iter().zip(&px).map(|(a, b)| a * b).sum()
}

/// One random 3-neighbor of the positive-definite Gram `p`.
fn three_neighbor(p: &IntMatrix, rng: &mut ChaCha8Rng) -> Result<IntMatrix> {
    let three = Int::from(3);
    let nine = Int::from(9);
    // random x with Q(x) ≡ 0 mod 3, x ≢ 0 mod 3, (Px) ≢ 0 mod 3
    let (mut x, px) = loop {
        let x: Vec<Int> =
            (0..RANK).map(|_| Int::from(rng.gen_range(0..3i64))).collect();
        if x.iter().all(|c| c.is_zero()) {
            continue;
        }
        if quad(p, &x).mod_floor(&three).is_zero() {
            let px = p.mul_vec(&x);
            if px.iter().any(|c| !c.mod_floor(&three).is_zero()) {
                break (x, px);
            }
        }
    };
    // adjust x -> x + 3t·e_j so that Q ≡ 0 mod 9:
    // Q(x+3te_j) ≡ Q(x) + 6t(Px)_j mod 9, i.e. t ≡ m·(Px)_j⁻¹ mod 3
    // with m = Q(x)/3 (inverses mod 3 are the elements themselves).
    let j = px
        .iter()
        .position(|c| !c.mod_floor(&three).is_zero())
        .expect("pivot checked above");
    let m = (quad(p, &x) / &three).mod_floor(&three);
    let t = (&m * px[j].mod_floor(&three)).mod_floor(&three);
    x[j] += Int::from(3) * t;
    let q = quad(p, &x);
    ensure!(q.mod_floor(&nine).is_zero(), "neighbor adjustment failed");
    // L' = {y : <y,x> ≡ 0 mod 3} + Z·(x/3); assemble 3L' and divide by 3.
    let px = p.mul_vec(&x);
    let piv = px
        .iter()
        .position(|c| !c.mod_floor(&three).is_zero())
        .expect("x is still a pivot vector mod 3");
    let mut gens: Vec<Vec<Int>> = Vec::new();
    gens.push(x.clone()); // 3·(x/3)
    for i in 0..RANK {
        let mut row = vec![Int::zero(); RANK];
        if i == piv {
            row[i] = Int::from(9); // 3·(3e_piv)
        } else {
            // k with (Px)_i − k·(Px)_piv ≡ 0 mod 3
            let k = (px[i].mod_floor(&three) * px[piv].mod_floor(&three))
                .mod_floor(&three);
            row[i] = Int::from(3);
            row[piv] = -k * Int::from(3);
        }
        gens.push(row);
    }
    let b3 = hermite_row_basis(&IntMatrix::from_big_rows(&gens));
    ensure!(b3.rows == RANK, "neighbor lattice lost rank");
    let g9 = b3.mul(p).mul(&b3.transpose());
    let mut g = IntMatrix::zero(RANK, RANK);
    for a in 0..RANK {
        for b in 0..RANK {
            let (d, r) = g9[(a, b)].div_mod_floor(&nine);
            ensure!(r.is_zero(), "neighbor Gram not divisible by 9");
            g[(a, b)] = d;
        }
    }
    ensure!(g.det() == p.det(), "neighbor changed the determinant");
    for i in 0..RANK {
        ensure!(
            g[(i, i)].mod_floor(&Int::from(2)).is_zero(),
            "neighbor not even"
        );
    }
    // LLL-reduce for compact entries
    let u = lll_transform_gram(&g, (99, 100));
    Ok(u.mul(&g).mul(&u.transpose()))
}

/// A positive-definite Gram with lazily computed theta-head counts.
pub struct GenusClass {
    pub gram_pos: IntMatrix,
    counts: RefCell<Vec<usize>>, // counts[k] = #vectors of norm 2(k+1)
}

impl GenusClass {
    fn new(gram_pos: IntMatrix) -> Self {
        GenusClass { gram_pos, counts: RefCell::new(Vec::new()) }
    }

    pub fn count(&self, k: usize) -> usize {
        let mut c = self.counts.borrow_mut();
        while c.len() <= k {
            let norm = 2 * (c.len() as i64 + 1);
            c.push(vectors_of_norm(&negate(&self.gram_pos), -norm).len());
        }
        c[k]
    }

    /// (N2, N4) — cheap fingerprint used for reporting.
    pub fn short_key(&self) -> (usize, usize) {
        (self.count(0), self.count(1))
    }

    /// Negative-definite Gram (the convention of the rest of the pipeline).
    pub fn gram_neg(&self) -> IntMatrix {
        negate(&self.gram_pos)
    }
}

/// True if the two classes agree on all of N2..N8 (treated as "same
/// class"; validated globally by reaching the full class number).
fn same_theta(a: &GenusClass, b: &GenusClass) -> bool {
    (0..MAX_THETA).all(|k| a.count(k) == b.count(k))
}

/// Walk the genus until `want` classes with pairwise distinct theta heads
/// are found.
pub fn enumerate_genus(rng: &mut ChaCha8Rng, want: usize) -> Result<Vec<GenusClass>> {
    let seed = negate(&seed_gram()); // positive definite
    let expected_det = seed.det();
    let mut classes: Vec<GenusClass> = vec![GenusClass::new(seed)];
    let mut active = 0usize;
    let mut rounds_without_new = 0usize;
    while classes.len() < want {
        let base = classes[active].gram_pos.clone();
        let mut found_new = false;
        for _ in 0..8 {
            let n = three_neighbor(&base, rng)?;
            ensure!(n.det() == expected_det, "determinant drift");
            let cand = GenusClass::new(n);
            if classes.iter().all(|c| !same_theta(c, &cand)) {
                eprintln!(
                    "  genus walk: class {:2} with (N2, N4) = {:?}",
                    classes.len() + 1,
                    cand.short_key()
                );
                classes.push(cand);
                found_new = true;
                if classes.len() == want {
                    break;
                }
            }
        }
        active = (active + 1) % classes.len();
        if found_new {
            rounds_without_new = 0;
        } else {
            rounds_without_new += 1;
            if rounds_without_new > 500 {
                bail!(
                    "genus walk stalled at {} classes; theta heads may not \
                     separate this genus",
                    classes.len()
                );
            }
        }
    }
    Ok(classes)
}
