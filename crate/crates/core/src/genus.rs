//! Existence of primitive embeddings into even unimodular lattices, via
//! the discriminant-form genus criterion: a primitive embedding of an even
//! lattice M into the even unimodular lattice of signature (p, q) exists
//! iff an even lattice T with signature (p − m₊, q − m₋) and discriminant
//! form −q_M exists. Existence of T is decided by the p-adic conditions:
//!
//!  1. t₊, t₋ ≥ 0 and t₊ + t₋ ≥ l(A_p) for every prime p;
//!  2. signature mod 8 (Milgram): automatic here given p ≡ q mod 8,
//!     because q_M comes from the actual lattice M;
//!  3. if t₊ + t₋ = l(A_p) for an odd p: (−1)^{t₋}|A| must match the
//!     discriminant of the Jordan form of (−q_M)_p up to p-adic squares;
//!  4. if t₊ + t₋ = l(A_2): either (−q_M)_2 splits off an odd scale-1
//!     block, or (−1)^{t₋}|A| must match the 2-adic Jordan discriminant
//!     up to 2-adic squares.

use crate::discforms::{reduce_mod, FiniteQuadraticForm, FqfElem};
use crate::lattices::{discriminant_form, Lattice};
use crate::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// One Jordan block of the p-primary part of a finite quadratic form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JordanBlock {
    /// cyclic Z/p^k with q(x) = n/p^k (odd p: any unit n mod p;
    /// p = 2: odd n mod 2^{k+1}); realizing lattice ⟨n·p^k⟩
    Cyclic { k: u32, n: Int },
    /// even rank-2 block at scale 2^k: U(2^k) (det unit −1) or V(2^k)
    /// (det unit 3); p = 2 only
    Even2 { k: u32, is_u: bool },
}

/// Generators of the p-primary part A_p, with orders p^{kᵢ}.
fn primary_generators(a: &FiniteQuadraticForm, p: i64) -> Vec<(FqfElem, u32)> {
    let mut out = Vec::new();
    for (i, &d) in a.orders.iter().enumerate() {
        let mut v = 0u32;
        let mut m = d;
        while m % p == 0 {
            v += 1;
            m /= p;
        }
        if v > 0 {
            let mut e = a.zero_elem();
            e[i] = m; // (d / p^v)·gᵢ has order p^v
            out.push((e, v));
        }
    }
    out
}

fn val_p(x: &Int, p: i64) -> u32 {
    let mut v = 0;
    let mut m = x.abs();
    let pp = Int::from(p);
    while !m.is_zero() && (&m % &pp).is_zero() {
        v += 1;
        m /= &pp;
    }
    v
}

/// p-denominator exponent of a rational (valuation of the denominator).
fn den_exp(x: &Rat, p: i64) -> u32 {
    val_p(x.denom(), p)
}

/// Numerator of x written over denominator p^k (requires den | p^k).
fn numer_over(x: &Rat, p: i64, k: u32) -> Int {
    let pk = Int::from(p).pow(k);
    let scaled = x * Rat::from(pk);
    assert!(scaled.is_integer(), "denominator does not divide p^k");
    scaled.to_integer()
}

/// Jordan decomposition of the p-primary part of q (or −q when sign = −1).
/// Exact for odd p; for p = 2 even blocks are identified as U/V by form
/// isometry against reference models.
pub fn jordan_decomposition(
    a: &FiniteQuadraticForm,
    p: i64,
    sign: i64,
) -> Vec<JordanBlock> {
    let q_of = |x: &FqfElem| -> Rat { reduce_mod(&(Rat::from(Int::from(sign)) * a.q_of(x)), 2) };
    let b_of =
        |x: &FqfElem, y: &FqfElem| -> Rat { reduce_mod(&(Rat::from(Int::from(sign)) * a.b_of(x, y)), 1) };
    let mut gens = primary_generators(a, p);
    let mut blocks = Vec::new();
    // split a single generator x of order p^k off orthogonally
    let split_one = |gens: &mut Vec<(FqfElem, u32)>,
                     x: &FqfElem,
                     k: u32,
                     a: &FiniteQuadraticForm| {
        let bxx = b_of(x, x);
        let pk = Int::from(p).pow(k);
        let u = numer_over(&bxx, p, k);
        let u_inv = mod_inverse(&u, &pk);
        let mut next = Vec::new();
        for (y, _) in gens.iter() {
            let bxy = b_of(x, y);
            let t = numer_over(&bxy, p, k);
            let c = (&t * &u_inv).mod_floor(&pk);
            let c_i64 = i64::try_from(&c).expect("coefficient too large");
            let y2 = a.add(y, &a.smul(-c_i64, x));
            let ord = a.elem_order(&y2);
            let v = val_p(&Int::from(ord), p);
            if v > 0 {
                // keep only the p-part
                let m = ord / Int::from(p).pow(v).try_into().ok().map(|pv: i64| pv).unwrap_or(1);
                let y3 = a.smul(m, &y2);
                next.push((y3, v));
            }
        }
        *gens = next;
    };
    loop {
        gens.retain(|(_, v)| *v > 0);
        if gens.is_empty() {
            break;
        }
        let k = gens.iter().map(|(_, v)| *v).max().unwrap();
        let top: Vec<FqfElem> = gens
            .iter()
            .filter(|(_, v)| *v == k)
            .map(|(g, _)| g.clone())
            .collect();
        if p != 2 {
            // find x of order p^k with b(x,x) at full denominator
            let x = top
                .iter()
                .find(|g| den_exp(&b_of(g, g), p) == k)
                .cloned()
                .or_else(|| {
                    // some pair must connect at full denominator
                    for (i, g) in top.iter().enumerate() {
                        for h in top.iter().skip(i + 1) {
                            if den_exp(&b_of(g, h), p) == k {
                                return Some(a.add(g, h));
                            }
                        }
                    }
                    None
                })
                .expect("nondegenerate odd part must have a full-scale vector");
            let n = numer_over(&q_of(&x), p, k);
            blocks.push(JordanBlock::Cyclic { k, n });
            split_one(&mut gens, &x, k, a);
        } else {
            // odd block at scale 2^k: q at full denominator on some generator
            if let Some(x) = top.iter().find(|g| den_exp(&q_of(g), 2, ) == k) {
                let x = x.clone();
                let pk1 = Int::from(2).pow(k + 1);
                let n = (numer_over(&q_of(&x), 2, k)).mod_floor(&pk1);
                blocks.push(JordanBlock::Cyclic { k, n });
                split_one(&mut gens, &x, k, a);
            } else {
                // even rank-2 block: find x, y of order 2^k with b(x,y) at
                // full denominator
                let mut found = None;
                'outer: for (i, g) in top.iter().enumerate() {
                    for h in top.iter().skip(i + 1) {
                        if den_exp(&b_of(g, h), 2) == k {
                            found = Some((g.clone(), h.clone()));
                            break 'outer;
                        }
                    }
                }
                let (x, y) = found.expect("nondegenerate 2-part must pair at full scale");
                // identify the block as U(2^k) or V(2^k) by form isometry
                let sub = block_form(a, &x, &y, k, sign);
                let is_u = is_u_block(&sub, k);
                blocks.push(JordanBlock::Even2 { k, is_u });
                // split the pair off: z ← z − αx − βy with
                // [bxx bxy; bxy byy]·(α,β) ≡ (bxz, byz) mod 2^k
                let pk = Int::from(2).pow(k);
                let m11 = numer_over(&b_of(&x, &x), 2, k);
                let m12 = numer_over(&b_of(&x, &y), 2, k);
                let m22 = numer_over(&b_of(&y, &y), 2, k);
                let det = (&m11 * &m22 - &m12 * &m12).mod_floor(&pk);
                let det_inv = mod_inverse(&det, &pk);
                let mut next = Vec::new();
                for (z, _) in gens.iter() {
                    let r1 = numer_over(&b_of(&x, z), 2, k);
                    let r2 = numer_over(&b_of(&y, z), 2, k);
                    // adjugate solve
                    let alpha = ((&m22 * &r1 - &m12 * &r2) * &det_inv).mod_floor(&pk);
                    let beta = ((&m11 * &r2 - &m12 * &r1) * &det_inv).mod_floor(&pk);
                    let ai = i64::try_from(&alpha).unwrap();
                    let bi = i64::try_from(&beta).unwrap();
                    let z2 = a.add(z, &a.add(&a.smul(-ai, &x), &a.smul(-bi, &y)));
                    let ord = a.elem_order(&z2);
                    let v = val_p(&Int::from(ord), 2);
                    if v > 0 {
                        let m = ord / (1i64 << v);
                        next.push((a.smul(m, &z2), v));
                    }
                }
                gens = next;
            }
        }
    }
    blocks
}

/// The form restricted to ⟨x, y⟩ ≅ (Z/2^k)², presented on x, y.
fn block_form(
    a: &FiniteQuadraticForm,
    x: &FqfElem,
    y: &FqfElem,
    k: u32,
    sign: i64,
) -> FiniteQuadraticForm {
    let d = 1i64 << k;
    let s = Rat::from(Int::from(sign));
    let qx = reduce_mod(&(&s * a.q_of(x)), 2);
    let qy = reduce_mod(&(&s * a.q_of(y)), 2);
    let bxy = reduce_mod(&(&s * a.b_of(x, y)), 1);
    // sanity: x, y independent of full order
    let sub = crate::discforms::FqfSubgroup::generate(a, &[x.clone(), y.clone()]);
    assert_eq!(sub.order() as i64, d * d, "even block pair must be independent");
    FiniteQuadraticForm::new(
        vec![d, d],
        vec![qx.clone(), qy.clone()],
        vec![
            vec![reduce_mod(&qx, 1), bxy.clone()],
            vec![bxy, reduce_mod(&qy, 1)],
        ],
    )
}

/// The model u_k form: (Z/2^k)² with q(x) = q(y) = 0, b(x,y) = 1/2^k
/// (discriminant form of U(2^k), 2-adic determinant unit −1).
fn u_block_form(k: u32) -> FiniteQuadraticForm {
    let d = 1i64 << k;
    let half = Rat::new(Int::one(), Int::from(d));
    FiniteQuadraticForm::new(
        vec![d, d],
        vec![Rat::zero(), Rat::zero()],
        vec![vec![Rat::zero(), half.clone()], vec![half, Rat::zero()]],
    )
}

/// The model v_k form: (Z/2^k)² with q(x) = q(y) = 1/2^{k−1},
/// b(x,y) = 1/2^k (2-adic part of disc V(2^k), determinant unit 3).
fn v_block_form(k: u32) -> FiniteQuadraticForm {
    let d = 1i64 << k;
    let q = Rat::new(Int::one(), Int::from(d / 2).max(Int::one()));
    let off = Rat::new(Int::one(), Int::from(d));
    let diag = reduce_mod(&q, 1);
    FiniteQuadraticForm::new(
        vec![d, d],
        vec![q.clone(), q],
        vec![vec![diag.clone(), off.clone()], vec![off, diag]],
    )
}

/// Distinguish u_k from v_k blocks.
fn is_u_block(f: &FiniteQuadraticForm, k: u32) -> bool {
    let hit = crate::discforms::isometries_signed(f, &u_block_form(k), 1, true, 1 << 16)
        .expect("block groups are tiny");
    if !hit.is_empty() {
        return true;
    }
    let hit_v = crate::discforms::isometries_signed(f, &v_block_form(k), 1, true, 1 << 16)
        .expect("block groups are tiny");
    assert!(!hit_v.is_empty(), "even 2-adic block is neither u_k nor v_k");
    false
}

fn mod_inverse(x: &Int, m: &Int) -> Int {
    let e = x.extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

/// Legendre symbol (n | p) for odd prime p, n coprime to p.
fn legendre(n: &Int, p: i64) -> i64 {
    let pm = Int::from(p);
    let nn = n.mod_floor(&pm);
    assert!(!nn.is_zero());
    let e = (p - 1) / 2;
    let r = nn.modpow(&Int::from(e), &pm);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// Does a primitive embedding of `l` into the even unimodular lattice of
/// signature `target` exist?
pub fn embeds_in_even_unimodular(l: &Lattice, target: (usize, usize)) -> bool {
    let (p_t, q_t) = target;
    // even unimodular lattices of signature (p, q) exist iff p ≡ q mod 8
    if (p_t as i64 - q_t as i64).rem_euclid(8) != 0 {
        return false;
    }
    let (mp, mm) = l.signature;
    if p_t < mp || q_t < mm {
        return false;
    }
    let (tp, tm) = (p_t - mp, q_t - mm);
    let t = tp + tm;
    let disc = discriminant_form(l);
    let a = &disc.form;
    let det_a = Int::from(a.order());
    if t == 0 {
        return a.order() == 1;
    }
    // collect primes of |A|
    let mut primes = Vec::new();
    let mut m = det_a.clone();
    let mut p = Int::from(2);
    while &p * &p <= m {
        if (&m % &p).is_zero() {
            primes.push(i64::try_from(&p).unwrap());
            while (&m % &p).is_zero() {
                m /= &p;
            }
        }
        p += 1;
    }
    if m > Int::one() {
        primes.push(i64::try_from(&m).unwrap());
    }
    // d = (−1)^{t₋}·|A| is the required determinant of T
    let d = if tm % 2 == 1 { -det_a.clone() } else { det_a.clone() };
    for &pr in &primes {
        let gens = primary_generators(a, pr);
        let l_p = gens.len();
        if t < l_p {
            return false;
        }
        if t > l_p {
            continue;
        }
        // equality: Jordan discriminant of (−q)_p must match d up to squares
        let blocks = jordan_decomposition(a, pr, -1);
        if pr == 2 {
            // escape: odd block at scale 2 present?
            let has_scale1_odd = blocks
                .iter()
                .any(|b| matches!(b, JordanBlock::Cyclic { k: 1, .. }));
            if has_scale1_odd {
                continue;
            }
            let mut unit = Int::one();
            for b in &blocks {
                match b {
                    JordanBlock::Cyclic { n, .. } => unit *= n,
                    JordanBlock::Even2 { is_u, .. } => {
                        unit *= Int::from(if *is_u { -1i64 } else { 3 })
                    }
                }
            }
            let d_unit = {
                let v = val_p(&d, 2);
                &d / Int::from(2).pow(v)
            };
            // match mod (Z₂^*)² ⟺ d_unit·unit⁻¹ ≡ 1 mod 8
            let prod = (&d_unit * mod_inverse(&unit, &Int::from(8))).mod_floor(&Int::from(8));
            if !prod.is_one() {
                return false;
            }
        } else {
            let mut unit = Int::one();
            for b in &blocks {
                match b {
                    JordanBlock::Cyclic { n, .. } => unit *= n,
                    JordanBlock::Even2 { .. } => unreachable!("Even2 only at p = 2"),
                }
            }
            let d_unit = {
                let v = val_p(&d, pr);
                &d / Int::from(pr).pow(v)
            };
            if legendre(&d_unit, pr) != legendre(&unit, pr) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ade::ADEType;
    use crate::discforms;
    use crate::exact_linalg::IntMatrix;
    use crate::lattices::{hyperbolic_plane, l10};

    fn ade_lat(s: &str) -> Lattice {
        let t: ADEType = s.parse().unwrap();
        Lattice::new(t.standard_gram()).unwrap()
    }

    #[test]
    fn easy_cases() {
        // rank 0
        let zero = Lattice::new(IntMatrix::zero(0, 0)).unwrap();
        assert!(embeds_in_even_unimodular(&zero, (3, 19)));
        // A₁ and E₈ into the K3 lattice
        assert!(embeds_in_even_unimodular(&ade_lat("A1"), (3, 19)));
        assert!(embeds_in_even_unimodular(&ade_lat("E8"), (3, 19)));
        // E₈(2) into the K3 lattice (Enriques situation)
        assert!(embeds_in_even_unimodular(&ade_lat("E8").rescale(2), (3, 19)));
        // L₁₀(2) into L₂₆
        assert!(embeds_in_even_unimodular(&l10().rescale(2), (1, 25)));
        // bad signature targets
        assert!(!embeds_in_even_unimodular(&ade_lat("A1"), (1, 3)));
        assert!(!embeds_in_even_unimodular(&ade_lat("E8"), (0, 4)));
        // rank-deficient: (Z/2)^10 needs length ≤ t
        assert!(!embeds_in_even_unimodular(&l10().rescale(2), (1, 13)));
    }

    /// Greedy search for n pairwise-orthogonal roots among `roots`.
    fn orthogonal_roots(
        l: &Lattice,
        roots: &[Vec<Int>],
        chosen: &mut Vec<Vec<Int>>,
        n: usize,
    ) -> bool {
        if chosen.len() == n {
            return true;
        }
        for r in roots {
            if chosen.iter().all(|c| l.inner(c, r).is_zero()) {
                chosen.push(r.clone());
                if orthogonal_roots(l, roots, chosen, n) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    #[test]
    fn eight_a1_models_do_not_embed() {
        // For τ = 8A₁ no marking exists: the lattice M_R built from any
        // embedding of 8A₁ into L₁₀ has no primitive embedding into the
        // K3 lattice (its discriminant group needs more generators than
        // the rank-4 complement allows).
        let l = l10();
        // roots of the E₈ summand, padded to L₁₀ coordinates
        let e8_roots: Vec<Vec<Int>> = crate::lattices::short_vectors(&ade_lat("E8"), -2)
            .unwrap()
            .into_iter()
            .map(|v| {
                let mut w = vec![Int::zero(), Int::zero()];
                w.extend(v);
                w
            })
            .collect();
        assert_eq!(e8_roots.len(), 240);
        // model 1: all eight roots inside the E₈ summand
        let mut chosen = Vec::new();
        assert!(orthogonal_roots(&l, &e8_roots, &mut chosen, 8));
        let emb1 = crate::lattices::Embedding::new(l.clone(), IntMatrix::from_big_rows(&chosen));
        // model 2: one root from the U summand, seven from E₈
        let u_root: Vec<Int> = vec![1, -1, 0, 0, 0, 0, 0, 0, 0, 0]
            .into_iter()
            .map(Int::from)
            .collect();
        assert_eq!(l.norm(&u_root), Int::from(-2));
        let mut chosen2 = vec![u_root];
        assert!(orthogonal_roots(&l, &e8_roots, &mut chosen2, 8));
        let emb2 = crate::lattices::Embedding::new(l.clone(), IntMatrix::from_big_rows(&chosen2));
        for emb in [emb1, emb2] {
            let t: ADEType = "8A1".parse().unwrap();
            assert_eq!(
                crate::ade::classify(&emb.induced_gram).unwrap().ade_type,
                t
            );
            let (mr, _) = crate::lattices::build_mr(&emb).unwrap();
            assert_eq!(mr.rank(), 18);
            assert_eq!(mr.det().abs(), Int::from(1024));
            assert!(!embeds_in_even_unimodular(&mr, (3, 19)));
        }
    }

    #[test]
    fn mr_of_e6_embeds() {
        // the (E₆, E₆)-generic model: M_R for E₆ ⊂ L₁₀ embeds into the
        // K3 lattice
        let l = l10();
        // E₆ spanned by six of the E₈ simple roots (L₁₀ coords 2..10)
        let mut rows = Vec::new();
        for idx in [2usize, 3, 4, 5, 6, 9] {
            let mut r = vec![0i64; 10];
            r[idx] = 1;
            rows.push(r);
        }
        let emb = crate::lattices::Embedding::new(l, IntMatrix::from_rows(&rows));
        let t: ADEType = "E6".parse().unwrap();
        assert_eq!(crate::ade::classify(&emb.induced_gram).unwrap().ade_type, t);
        let (mr, _) = crate::lattices::build_mr(&emb).unwrap();
        assert!(embeds_in_even_unimodular(&mr, (3, 19)));
    }

    #[test]
    fn rank_one_into_u() {
        // ⟨−2n⟩ ⊂ U always exists (v = (1, −n)); the equality case is hit
        // at every prime dividing 2n, exercising the unit bookkeeping
        for n in 1i64..=30 {
            let l = Lattice::new(IntMatrix::from_rows(&[vec![-2 * n]])).unwrap();
            assert!(
                embeds_in_even_unimodular(&l, (1, 1)),
                "⟨−{}⟩ into U",
                2 * n
            );
        }
        // ⟨2n⟩ ⊂ U likewise (positive norm vectors exist in U)
        for n in 1i64..=30 {
            let l = Lattice::new(IntMatrix::from_rows(&[vec![2 * n]])).unwrap();
            assert!(embeds_in_even_unimodular(&l, (1, 1)), "⟨{}⟩ into U", 2 * n);
        }
    }

    #[test]
    fn u3_into_u2() {
        let u3 = hyperbolic_plane().rescale(3);
        assert!(embeds_in_even_unimodular(&u3, (2, 2)));
        let u2 = hyperbolic_plane().rescale(2);
        assert!(embeds_in_even_unimodular(&u2, (2, 2)));
    }

    /// Independent oracle for negative-definite rank-2 M into (2, 2):
    /// search positive-definite even rank-2 complements with the right
    /// determinant and an anti-isometric discriminant form.
    fn oracle_rank2_into_22(m: &Lattice) -> bool {
        let dm = discriminant_form(m);
        let det = i64::try_from(&m.det().abs()).unwrap();
        // reduced positive even forms [[2a,b],[b,2c]], 0 ≤ b ≤ a ≤ c,
        // 4ac − b² = det
        let mut a = 1i64;
        while 3 * a * a <= det + a * a {
            // b ≤ a ⇒ 4ac − b² = det with c ≥ a ⇒ 4a² − a² ≤ det
            for b in 0..=a {
                let num = det + b * b;
                if num % (4 * a) == 0 {
                    let c = num / (4 * a);
                    if c >= a {
                        let t = Lattice::new(IntMatrix::from_rows(&[
                            vec![2 * a, b],
                            vec![b, 2 * c],
                        ]))
                        .unwrap();
                        let dt = discriminant_form(&t);
                        let anti = discforms::isometries_signed(
                            &dt.form, &dm.form, -1, true, 1 << 12,
                        )
                        .unwrap();
                        if !anti.is_empty() {
                            return true;
                        }
                    }
                }
            }
            a += 1;
        }
        false
    }

    #[test]
    fn rank2_criterion_matches_gluing_oracle() {
        // sweep small negative-definite even rank-2 lattices
        for a in 1i64..=6 {
            for c in a..=6 {
                for b in 0..=a {
                    if b * b >= 4 * a * c {
                        continue;
                    }
                    let m = Lattice::new(IntMatrix::from_rows(&[
                        vec![-2 * a, -b],
                        vec![-b, -2 * c],
                    ]))
                    .unwrap();
                    let got = embeds_in_even_unimodular(&m, (2, 2));
                    let want = oracle_rank2_into_22(&m);
                    assert_eq!(
                        got, want,
                        "criterion vs oracle for [[-{},-{}],[-{},-{}]]",
                        2 * a, b, b, 2 * c
                    );
                }
            }
        }
    }

    #[test]
    fn jordan_blocks_of_ade() {
        // A₂: Z/3 with q = −2/3 → single cyclic block, n ≡ −2·(unit)
        let blocks = jordan_decomposition(&discriminant_form(&ade_lat("A2")).form, 3, 1);
        assert_eq!(blocks.len(), 1);
        // A₁: Z/2 scale-1 odd block
        let b2 = jordan_decomposition(&discriminant_form(&ade_lat("A1")).form, 2, 1);
        assert_eq!(b2, vec![JordanBlock::Cyclic { k: 1, n: Int::from(3) }]);
        // U(2): even block, type U
        let bu = jordan_decomposition(
            &discriminant_form(&hyperbolic_plane().rescale(2)).form,
            2,
            1,
        );
        assert_eq!(bu, vec![JordanBlock::Even2 { k: 1, is_u: true }]);
        // D₄: (Z/2)² even block of type V
        let bd = jordan_decomposition(&discriminant_form(&ade_lat("D4")).form, 2, 1);
        assert_eq!(bd, vec![JordanBlock::Even2 { k: 1, is_u: false }]);
        // A₇: Z/8 single odd block at scale 3
        let ba = jordan_decomposition(&discriminant_form(&ade_lat("A7")).form, 2, 1);
        assert!(matches!(ba[..], [JordanBlock::Cyclic { k: 3, .. }]));
    }
}
