//! Finite quadratic forms (discriminant forms), their orthogonal groups,
//! and the glue-kernel computation used to extend isometries across
//! overlattice gluings.
//!
//! An element is a coordinate vector with respect to the invariant-factor
//! generators; the quadratic form takes values in Q/2Z and the bilinear
//! form in Q/Z.

use crate::exact_linalg::{smith_normal_form, IntMatrix, Rat};
use num_bigint::BigInt;
use num_traits::Zero;

pub type FqfElem = Vec<i64>;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Reduce a rational into [0, m).
pub fn reduce_mod(x: &Rat, m: i64) -> Rat {
    let m_rat = Rat::from(BigInt::from(m));
    let q = (x / &m_rat).floor();
    x - q * m_rat
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FqfError {
    #[error("quadratic form is degenerate")]
    Degenerate,
    #[error("map is not an (anti-)isometry")]
    NotIsometry,
    #[error("resource budget exceeded: {0}")]
    Budget(String),
}

/// Finite abelian group with Q/2Z-valued quadratic form, generators in
/// invariant-factor normal form (orders d₁ | d₂ | …, each ≥ 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    pub orders: Vec<i64>,
    /// q(gᵢ) mod 2Z, in [0,2)
    q_gen: Vec<Rat>,
    /// b(gᵢ,gⱼ) mod Z, in [0,1)
    b_gen: Vec<Vec<Rat>>,
}

impl FiniteQuadraticForm {
    pub fn new(orders: Vec<i64>, q_gen: Vec<Rat>, b_gen: Vec<Vec<Rat>>) -> Self {
        let n = orders.len();
        assert!(orders.iter().all(|&d| d >= 2), "invariant factors must be ≥ 2");
        for i in 1..n {
            assert!(orders[i] % orders[i - 1] == 0, "orders must form a divisibility chain");
        }
        assert_eq!(q_gen.len(), n);
        assert_eq!(b_gen.len(), n);
        let q_gen: Vec<Rat> = q_gen.iter().map(|x| reduce_mod(x, 2)).collect();
        let b_gen: Vec<Vec<Rat>> = b_gen
            .iter()
            .map(|row| {
                assert_eq!(row.len(), n);
                row.iter().map(|x| reduce_mod(x, 1)).collect()
            })
            .collect();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(b_gen[i][j], b_gen[j][i], "b must be symmetric");
            }
            // q(g) mod 2Z restricted: d·g = 0 forces d²·q(g) ∈ 2Z and d·b(g,·) ∈ Z
            let d = orders[i];
            let t = reduce_mod(&(rat(d, 1) * rat(d, 1) * &q_gen[i]), 2);
            assert!(t.is_zero(), "q value incompatible with generator order");
            // 2·b(gᵢ,gᵢ) ≡ q(2gᵢ)−2q(gᵢ) ≡ 2q(gᵢ) ⇒ b(gᵢ,gᵢ) ≡ q(gᵢ) mod Z
            let diff = reduce_mod(&(&q_gen[i] - &b_gen[i][i]), 1);
            assert!(diff.is_zero(), "diagonal of b must equal q mod Z");
        }
        FiniteQuadraticForm { orders, q_gen, b_gen }
    }

    /// The trivial form (group of order 1).
    pub fn trivial() -> Self {
        FiniteQuadraticForm { orders: vec![], q_gen: vec![], b_gen: vec![] }
    }

    pub fn rank_gens(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> i64 {
        self.orders.iter().product()
    }

    pub fn zero_elem(&self) -> FqfElem {
        vec![0; self.orders.len()]
    }

    pub fn reduce(&self, x: &FqfElem) -> FqfElem {
        x.iter().zip(&self.orders).map(|(&c, &d)| c.rem_euclid(d)).collect()
    }

    pub fn add(&self, x: &FqfElem, y: &FqfElem) -> FqfElem {
        self.reduce(&x.iter().zip(y).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self, x: &FqfElem) -> FqfElem {
        self.reduce(&x.iter().map(|a| -a).collect())
    }

    pub fn smul(&self, c: i64, x: &FqfElem) -> FqfElem {
        self.reduce(&x.iter().map(|a| c * a).collect())
    }

    pub fn elem_order(&self, x: &FqfElem) -> i64 {
        let x = self.reduce(x);
        let mut o = 1i64;
        for (c, &d) in x.iter().zip(&self.orders) {
            if *c != 0 {
                let g = num_integer::gcd(*c, d);
                o = num_integer::lcm(o, d / g);
            }
        }
        o
    }

    pub fn q_of(&self, x: &FqfElem) -> Rat {
        let x = self.reduce(x);
        let mut s = Rat::zero();
        let n = self.orders.len();
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            s += rat(x[i] * x[i], 1) * &self.q_gen[i];
            for j in i + 1..n {
                if x[j] != 0 {
                    s += rat(2 * x[i] * x[j], 1) * &self.b_gen[i][j];
                }
            }
        }
        reduce_mod(&s, 2)
    }

    pub fn b_of(&self, x: &FqfElem, y: &FqfElem) -> Rat {
        let x = self.reduce(x);
        let y = self.reduce(y);
        let mut s = Rat::zero();
        let n = self.orders.len();
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..n {
                if y[j] != 0 {
                    s += rat(x[i] * y[j], 1) * &self.b_gen[i][j];
                }
            }
        }
        reduce_mod(&s, 1)
    }

    /// All elements (requires |A| ≤ budget).
    pub fn elements(&self, budget: usize) -> Result<Vec<FqfElem>, FqfError> {
        let order = self.order();
        if order > budget as i64 {
            return Err(FqfError::Budget(format!(
                "group order {} exceeds {}",
                order, budget
            )));
        }
        let mut out = vec![self.zero_elem()];
        for (i, &d) in self.orders.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for c in 0..d {
                    let mut e2 = e.clone();
                    e2[i] = c;
                    next.push(e2);
                }
            }
            out = next;
        }
        Ok(out)
    }

    pub fn is_nondegenerate(&self) -> bool {
        // radical = {x : b(x, gⱼ) = 0 ∀j}; test by brute force (forms are tiny)
        match self.elements(1 << 20) {
            Err(_) => panic!("nondegeneracy test over budget"),
            Ok(els) => els
                .iter()
                .filter(|x| {
                    (0..self.orders.len()).all(|j| {
                        let mut g = self.zero_elem();
                        g[j] = 1;
                        self.b_of(x, &g).is_zero()
                    })
                })
                .count()
                == 1,
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        // concatenate generators, then renormalize to invariant factors? No:
        // keep the concatenated presentation (orders need not form a chain);
        // callers that need normal form can renormalize via SNF. To preserve
        // the divisibility invariant we sort by order and merge via SNF.
        let n1 = self.orders.len();
        let n2 = other.orders.len();
        let n = n1 + n2;
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        let mut q = self.q_gen.clone();
        q.extend_from_slice(&other.q_gen);
        let mut b = vec![vec![Rat::zero(); n]; n];
        for i in 0..n1 {
            for j in 0..n1 {
                b[i][j] = self.b_gen[i][j].clone();
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                b[n1 + i][n1 + j] = other.b_gen[i][j].clone();
            }
        }
        // Presentation with independent generators of the given orders is
        // legal as long as the chain condition holds after sorting; enforce
        // it by sorting generator indices by order.
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by_key(|&i| orders[i]);
        let orders2: Vec<i64> = idx.iter().map(|&i| orders[i]).collect();
        let q2: Vec<Rat> = idx.iter().map(|&i| q[i].clone()).collect();
        let b2: Vec<Vec<Rat>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| b[i][j].clone()).collect())
            .collect();
        // Sorted orders of a direct sum need not form a divisibility chain
        // (e.g. 2,3) — but all our forms are built from p-groups where they
        // do after sorting only if same p. Fall back to a full SNF-based
        // renormalization when the chain breaks.
        let chain_ok = orders2.windows(2).all(|w| w[1] % w[0] == 0);
        if chain_ok {
            FiniteQuadraticForm::new(orders2, q2, b2)
        } else {
            renormalize(&orders2, &q2, &b2)
        }
    }

    /// Generators as elements.
    pub fn gens(&self) -> Vec<FqfElem> {
        (0..self.orders.len())
            .map(|i| {
                let mut e = self.zero_elem();
                e[i] = 1;
                e
            })
            .collect()
    }
}

/// Rebuild a form presented on independent generators of arbitrary orders
/// into invariant-factor normal form via SNF of the relation matrix.
pub fn renormalize(orders: &[i64], q: &[Rat], b: &[Vec<Rat>]) -> FiniteQuadraticForm {
    let n = orders.len();
    // relations: dᵢ·eᵢ = 0 → relation matrix diag(dᵢ); group = Z^n / diag(d)
    let mut rel = IntMatrix::zero(n, n);
    for i in 0..n {
        rel[(i, i)] = BigInt::from(orders[i]);
    }
    let snf = smith_normal_form(&rel);
    // new generator j = column j of U^{-1} expressed in old generators
    let u_inv = snf.u.unimodular_inverse();
    let mut new_orders = Vec::new();
    let mut keep = Vec::new();
    for j in 0..n {
        let d = i64::try_from(&snf.d[(j, j)]).expect("huge invariant factor");
        if d != 1 {
            new_orders.push(d);
            keep.push(j);
        }
    }
    let gen_vec = |j: usize| -> Vec<i64> {
        (0..n).map(|i| i64::try_from(&u_inv[(i, j)]).unwrap()).collect()
    };
    let q_of_vec = |x: &[i64]| -> Rat {
        let mut s = Rat::zero();
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            s += rat(x[i] * x[i], 1) * &q[i];
            for k in i + 1..n {
                if x[k] != 0 {
                    s += rat(2 * x[i] * x[k], 1) * &b[i][k];
                }
            }
        }
        reduce_mod(&s, 2)
    };
    let b_of_vec = |x: &[i64], y: &[i64]| -> Rat {
        let mut s = Rat::zero();
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            for k in 0..n {
                if y[k] != 0 {
                    s += rat(x[i] * y[k], 1) * &b[i][k];
                }
            }
        }
        reduce_mod(&s, 1)
    };
    let new_q: Vec<Rat> = keep.iter().map(|&j| q_of_vec(&gen_vec(j))).collect();
    let new_b: Vec<Vec<Rat>> = keep
        .iter()
        .map(|&j| keep.iter().map(|&k| b_of_vec(&gen_vec(j), &gen_vec(k))).collect())
        .collect();
    FiniteQuadraticForm::new(new_orders, new_q, new_b)
}

/// Subgroup of a finite quadratic form, with materialized element list.
#[derive(Clone, Debug)]
pub struct FqfSubgroup {
    pub gens: Vec<FqfElem>,
    /// all elements, sorted (canonical)
    pub elements: Vec<FqfElem>,
}

impl FqfSubgroup {
    pub fn generate(a: &FiniteQuadraticForm, gens: &[FqfElem]) -> Self {
        let mut elems: Vec<FqfElem> = vec![a.zero_elem()];
        let mut set: std::collections::HashSet<FqfElem> = elems.iter().cloned().collect();
        let mut frontier = elems.clone();
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = a.add(&x, g);
                if set.insert(y.clone()) {
                    elems.push(y.clone());
                    frontier.push(y);
                }
            }
        }
        elems.sort();
        FqfSubgroup { gens: gens.to_vec(), elements: elems }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: &FqfElem) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn trivial(a: &FiniteQuadraticForm) -> Self {
        FqfSubgroup { gens: vec![], elements: vec![a.zero_elem()] }
    }
}

/// {x ∈ A : b(x, d) = 0 for all d ∈ D}.
pub fn perp(a: &FiniteQuadraticForm, d: &FqfSubgroup) -> FqfSubgroup {
    let els = a.elements(1 << 20).expect("perp over budget");
    let mut out: Vec<FqfElem> = els
        .into_iter()
        .filter(|x| d.gens.iter().all(|g| a.b_of(x, g).is_zero()))
        .collect();
    out.sort();
    FqfSubgroup { gens: out.clone(), elements: out }
}

/// Isometry (or anti-isometry, or subgroup hom) given by generator images.
/// Interpreted against a fixed (domain, codomain) pair supplied per call.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqfMap {
    pub gen_images: Vec<FqfElem>,
}

impl FqfMap {
    pub fn identity(a: &FiniteQuadraticForm) -> Self {
        FqfMap { gen_images: a.gens() }
    }

    pub fn apply(&self, codomain: &FiniteQuadraticForm, x: &FqfElem) -> FqfElem {
        let mut out = codomain.zero_elem();
        for (c, img) in x.iter().zip(&self.gen_images) {
            if *c != 0 {
                out = codomain.add(&out, &codomain.smul(*c, img));
            }
        }
        out
    }

    pub fn compose(
        &self,
        mid: &FiniteQuadraticForm,
        second: &FqfMap,
        codomain: &FiniteQuadraticForm,
    ) -> FqfMap {
        let _ = mid;
        FqfMap {
            gen_images: self
                .gen_images
                .iter()
                .map(|img| second.apply(codomain, img))
                .collect(),
        }
    }

    /// Well-defined homomorphism domain → codomain?
    pub fn is_hom(&self, domain: &FiniteQuadraticForm, codomain: &FiniteQuadraticForm) -> bool {
        self.gen_images.len() == domain.orders.len()
            && self
                .gen_images
                .iter()
                .zip(&domain.orders)
                .all(|(img, &d)| codomain.smul(d, img) == codomain.zero_elem())
    }

    /// sign = +1 for isometry (q preserved), −1 for anti-isometry (q negated).
    pub fn is_isometry_signed(
        &self,
        domain: &FiniteQuadraticForm,
        codomain: &FiniteQuadraticForm,
        sign: i64,
    ) -> bool {
        if !self.is_hom(domain, codomain) {
            return false;
        }
        let n = domain.orders.len();
        let gens = domain.gens();
        for i in 0..n {
            let qi = domain.q_of(&gens[i]);
            let qimg = codomain.q_of(&self.gen_images[i]);
            let want = reduce_mod(&(rat(sign, 1) * qi), 2);
            if qimg != want {
                return false;
            }
            for j in i + 1..n {
                let bij = domain.b_of(&gens[i], &gens[j]);
                let bimg = codomain.b_of(&self.gen_images[i], &self.gen_images[j]);
                let want = reduce_mod(&(rat(sign, 1) * bij), 1);
                if bimg != want {
                    return false;
                }
            }
        }
        // bijectivity: image subgroup must be everything
        if domain.order() != codomain.order() {
            return false;
        }
        let img = FqfSubgroup::generate(codomain, &self.gen_images);
        img.order() as i64 == codomain.order()
    }

    pub fn inverse(&self, domain: &FiniteQuadraticForm, codomain: &FiniteQuadraticForm) -> FqfMap {
        // brute-force preimages of codomain generators (groups are tiny)
        let els = domain.elements(1 << 20).expect("inverse over budget");
        let gen_images = codomain
            .gens()
            .iter()
            .map(|g| {
                els.iter()
                    .find(|x| &self.apply(codomain, x) == g)
                    .expect("map not surjective")
                    .clone()
            })
            .collect();
        FqfMap { gen_images }
    }
}

/// Backtracking enumeration of all isometries domain → codomain with
/// q(image) = sign·q (sign = 1: isometries; −1: anti-isometries).
/// `stop_at_first` short-circuits after one hit.
pub fn isometries_signed(
    domain: &FiniteQuadraticForm,
    codomain: &FiniteQuadraticForm,
    sign: i64,
    stop_at_first: bool,
    budget: usize,
) -> Result<Vec<FqfMap>, FqfError> {
    if domain.order() != codomain.order() {
        return Ok(vec![]);
    }
    let els = codomain.elements(budget)?;
    let gens = domain.gens();
    let n = gens.len();
    // candidate images per generator: matching order and q-value
    let mut candidates: Vec<Vec<FqfElem>> = Vec::with_capacity(n);
    for i in 0..n {
        let want_q = reduce_mod(&(rat(sign, 1) * domain.q_of(&gens[i])), 2);
        let ord = domain.orders[i];
        let c: Vec<FqfElem> = els
            .iter()
            .filter(|x| {
                codomain.elem_order(x) == ord && codomain.q_of(x) == want_q
            })
            .cloned()
            .collect();
        candidates.push(c);
    }
    let mut out: Vec<FqfMap> = Vec::new();
    let mut chosen: Vec<FqfElem> = Vec::new();
    fn rec(
        domain: &FiniteQuadraticForm,
        codomain: &FiniteQuadraticForm,
        sign: i64,
        gens: &[FqfElem],
        candidates: &[Vec<FqfElem>],
        chosen: &mut Vec<FqfElem>,
        out: &mut Vec<FqfMap>,
        stop_at_first: bool,
    ) -> bool {
        let k = chosen.len();
        if k == gens.len() {
            let m = FqfMap { gen_images: chosen.clone() };
            if m.is_isometry_signed(domain, codomain, sign) {
                out.push(m);
                if stop_at_first {
                    return true;
                }
            }
            return false;
        }
        'cand: for c in &candidates[k] {
            for j in 0..k {
                let want =
                    reduce_mod(&(rat(sign, 1) * domain.b_of(&gens[j], &gens[k])), 1);
                if codomain.b_of(&chosen[j], c) != want {
                    continue 'cand;
                }
            }
            chosen.push(c.clone());
            let done = rec(domain, codomain, sign, gens, candidates, chosen, out, stop_at_first);
            chosen.pop();
            if done {
                return true;
            }
        }
        false
    }
    rec(domain, codomain, sign, &gens, &candidates, &mut chosen, &mut out, stop_at_first);
    Ok(out)
}

/// Full orthogonal group O(A) as an explicit list (budgeted).
pub fn orthogonal_group(
    a: &FiniteQuadraticForm,
    budget_elems: usize,
) -> Result<Vec<FqfMap>, FqfError> {
    if a.order() > budget_elems as i64 {
        return Err(FqfError::Budget(format!(
            "|A| = {} exceeds budget {}",
            a.order(),
            budget_elems
        )));
    }
    isometries_signed(a, a, 1, false, budget_elems)
}

/// The graph Γ = {(x, φx)} ⊂ A ⊕ B of an anti-isometry φ: D_A → D_B.
/// Returned as a subgroup of the direct-sum presentation (A-coords then
/// B-coords, unsorted concatenation).
pub struct GlueGraph {
    /// elements (x, φx) with x ∈ D_A, as pairs
    pub pairs: Vec<(FqfElem, FqfElem)>,
}

/// Build Γ from D_A (subgroup of A) and φ given on D_A's chosen generators.
/// `phi` maps i-th generator of `d_a.gens` to an element of B. Errors unless
/// φ is an anti-isometry on D_A.
pub fn anti_isometry_graph(
    a: &FiniteQuadraticForm,
    b: &FiniteQuadraticForm,
    d_a: &FqfSubgroup,
    phi_images: &[FqfElem],
) -> Result<GlueGraph, FqfError> {
    assert_eq!(phi_images.len(), d_a.gens.len());
    // extend φ additively over all of D_A, verifying well-definedness by
    // brute force over element decompositions
    let mut pairs: Vec<(FqfElem, FqfElem)> = Vec::new();
    // decompose each element of D_A over the generators by BFS
    let mut table: std::collections::HashMap<FqfElem, FqfElem> =
        std::collections::HashMap::new();
    table.insert(a.zero_elem(), b.zero_elem());
    let mut frontier = vec![a.zero_elem()];
    while let Some(x) = frontier.pop() {
        let fx = table[&x].clone();
        for (g, pg) in d_a.gens.iter().zip(phi_images) {
            let y = a.add(&x, g);
            let fy = b.add(&fx, pg);
            match table.get(&y) {
                Some(old) => {
                    if old != &fy {
                        return Err(FqfError::NotIsometry);
                    }
                }
                None => {
                    table.insert(y.clone(), fy);
                    frontier.push(y);
                }
            }
        }
    }
    for (x, fx) in &table {
        // anti-isometry: q_B(φx) = −q_A(x)
        let want = reduce_mod(&(-a.q_of(x)), 2);
        if b.q_of(fx) != want {
            return Err(FqfError::NotIsometry);
        }
        pairs.push((x.clone(), fx.clone()));
    }
    pairs.sort();
    Ok(GlueGraph { pairs })
}

/// Result of the Prop.-03 glue-kernel computation.
pub struct GlueKernel {
    /// pairs (g, h) ∈ O(A) × O(B) preserving Γ and acting trivially on Γ^⊥/Γ
    pub k_pairs: Vec<(FqfMap, FqfMap)>,
    /// image of the first projection, computed independently as
    /// Ker(O(A, D_A) → O(D_A^⊥))
    pub i_a_image: Vec<FqfMap>,
}

/// Elements of O(A) restricting to the identity on the subgroup D^⊥
/// (equivalently Ker(O(A, D) → O(D^⊥)); such maps automatically preserve D).
/// Parametrized as g = id + η with η: A → D a hom vanishing on D^⊥,
/// constrained by q-preservation; this avoids listing O(A).
pub fn kernel_to_perp(a: &FiniteQuadraticForm, d: &FqfSubgroup) -> Vec<FqfMap> {
    let dperp = perp(a, d);
    let gens = a.gens();
    let n = gens.len();
    // candidate η-images for each generator: v ∈ D with
    //   order(v) | order(gᵢ)  and  2b(gᵢ,v) + q(v) ≡ 0 mod 2Z
    let mut candidates: Vec<Vec<FqfElem>> = Vec::with_capacity(n);
    for i in 0..n {
        let c: Vec<FqfElem> = d
            .elements
            .iter()
            .filter(|v| {
                a.elem_order(v) % 1 == 0
                    && (a.elem_order(v) == 1 || a.orders[i] % a.elem_order(v) == 0)
                    && reduce_mod(&(rat(2, 1) * a.b_of(&gens[i], v) + a.q_of(v)), 2)
                        .is_zero()
            })
            .cloned()
            .collect();
        candidates.push(c);
    }
    let mut out = Vec::new();
    let mut chosen: Vec<FqfElem> = Vec::new();
    fn rec(
        a: &FiniteQuadraticForm,
        gens: &[FqfElem],
        candidates: &[Vec<FqfElem>],
        dperp: &FqfSubgroup,
        chosen: &mut Vec<FqfElem>,
        out: &mut Vec<FqfMap>,
    ) {
        let k = chosen.len();
        if k == gens.len() {
            // η must vanish on D^⊥: check on all elements of D^⊥ (they are
            // integer combinations of the generators; η is linear, so apply)
            let eta_apply = |x: &FqfElem| -> FqfElem {
                let mut s = a.zero_elem();
                for (c, v) in x.iter().zip(chosen.iter()) {
                    if *c != 0 {
                        s = a.add(&s, &a.smul(*c, v));
                    }
                }
                s
            };
            for p in &dperp.elements {
                if eta_apply(p) != a.zero_elem() {
                    return;
                }
            }
            let g = FqfMap {
                gen_images: gens
                    .iter()
                    .zip(chosen.iter())
                    .map(|(g0, v)| a.add(g0, v))
                    .collect(),
            };
            if g.is_isometry_signed(a, a, 1) {
                out.push(g);
            }
            return;
        }
        'cand: for v in &candidates[k] {
            // pairwise condition: 2b(gⱼ,vₖ) + 2b(gₖ,vⱼ) + 2b(vⱼ,vₖ) ≡ 0 mod 2Z
            for j in 0..k {
                let s = a.b_of(&gens[j], v)
                    + a.b_of(&gens[k], &chosen[j])
                    + a.b_of(&chosen[j], v);
                if !reduce_mod(&(rat(2, 1) * s), 2).is_zero() {
                    continue 'cand;
                }
            }
            chosen.push(v.clone());
            rec(a, gens, candidates, dperp, chosen, out);
            chosen.pop();
        }
    }
    rec(a, &gens, &candidates, &dperp, &mut chosen, &mut out);
    out.sort_by(|x, y| x.gen_images.cmp(&y.gen_images));
    out.dedup();
    out
}

/// Prop.-03 computation: K (pairs side, brute force over O(A)×O(B) with h
/// forced by g on D_B) and Im i_A = Ker(O(A,D_A) → O(D_A^⊥)) computed
/// independently; both asserted equal.
pub fn glue_kernel(
    a: &FiniteQuadraticForm,
    b: &FiniteQuadraticForm,
    d_a: &FqfSubgroup,
    d_b: &FqfSubgroup,
    phi_images: &[FqfElem],
    budget: usize,
) -> Result<GlueKernel, FqfError> {
    // φ must map D_A onto D_B
    let phi_span = FqfSubgroup::generate(b, phi_images);
    if phi_span.elements != d_b.elements {
        return Err(FqfError::NotIsometry);
    }
    let graph = anti_isometry_graph(a, b, d_a, phi_images)?;
    // Γ^⊥ inside A⊕B and the quotient Γ^⊥/Γ handled elementwise.
    let a_els = a.elements(budget)?;
    let b_els = b.elements(budget)?;
    let gamma: std::collections::HashSet<(FqfElem, FqfElem)> =
        graph.pairs.iter().cloned().collect();
    let mut gamma_perp: Vec<(FqfElem, FqfElem)> = Vec::new();
    for x in &a_els {
        for y in &b_els {
            if graph.pairs.iter().all(|(u, v)| {
                reduce_mod(&(a.b_of(x, u) + b.b_of(y, v)), 1).is_zero()
            }) {
                gamma_perp.push((x.clone(), y.clone()));
            }
        }
    }
    let o_a = orthogonal_group(a, budget)?;
    let o_b = orthogonal_group(b, budget)?;
    let mut k_pairs = Vec::new();
    for g in &o_a {
        // g must preserve D_A
        if !d_a.elements.iter().all(|x| d_a.contains(&g.apply(a, x))) {
            continue;
        }
        for h in &o_b {
            // (g,h) preserves Γ?
            if !graph
                .pairs
                .iter()
                .all(|(x, y)| gamma.contains(&(g.apply(a, x), h.apply(b, y))))
            {
                continue;
            }
            // trivial on Γ^⊥/Γ: for every (x,y) ∈ Γ^⊥, image − (x,y) ∈ Γ
            let trivial = gamma_perp.iter().all(|(x, y)| {
                let dx = a.add(&g.apply(a, x), &a.neg(x));
                let dy = b.add(&h.apply(b, y), &b.neg(y));
                gamma.contains(&(dx, dy))
            });
            if trivial {
                k_pairs.push((g.clone(), h.clone()));
            }
        }
    }
    let i_a_image = kernel_to_perp(a, d_a);
    // Prop. 03: the two computations must agree.
    let mut proj: Vec<FqfMap> = k_pairs.iter().map(|(g, _)| g.clone()).collect();
    proj.sort_by(|x, y| x.gen_images.cmp(&y.gen_images));
    proj.dedup();
    let mut img = i_a_image.clone();
    img.sort_by(|x, y| x.gen_images.cmp(&y.gen_images));
    assert_eq!(proj, img, "Prop. 03 image identity violated");
    // injectivity of i_A on K
    assert_eq!(proj.len(), k_pairs.len(), "i_A not injective on K");
    Ok(GlueKernel { k_pairs, i_a_image })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// disc(A₁): Z/2 with q(1) = −1/2 ≡ 3/2 mod 2Z
    fn disc_a1() -> FiniteQuadraticForm {
        FiniteQuadraticForm::new(vec![2], vec![rat(-1, 2)], vec![vec![rat(-1, 2)]])
    }

    /// disc(A₂): Z/3 with q(1) = −2/3 ≡ 4/3
    fn disc_a2() -> FiniteQuadraticForm {
        FiniteQuadraticForm::new(vec![3], vec![rat(-2, 3)], vec![vec![rat(-2, 3)]])
    }

    /// disc(2A₁) = (Z/2)², q = (−1/2, −1/2), b diagonal
    fn disc_2a1() -> FiniteQuadraticForm {
        FiniteQuadraticForm::new(
            vec![2, 2],
            vec![rat(-1, 2), rat(-1, 2)],
            vec![
                vec![rat(-1, 2), rat(0, 1)],
                vec![rat(0, 1), rat(-1, 2)],
            ],
        )
    }

    #[test]
    fn a1_form_basics() {
        let a = disc_a1();
        assert_eq!(a.order(), 2);
        assert_eq!(a.q_of(&vec![1]), rat(3, 2));
        assert!(a.is_nondegenerate());
        let o = orthogonal_group(&a, 1 << 10).unwrap();
        assert_eq!(o.len(), 1, "O(Z/2) is trivial");
    }

    #[test]
    fn a2_negation() {
        let a = disc_a2();
        let o = orthogonal_group(&a, 1 << 10).unwrap();
        assert_eq!(o.len(), 2, "O(disc A₂) = {{±1}}");
    }

    #[test]
    fn two_a1_swap() {
        let a = disc_2a1();
        let o = orthogonal_group(&a, 1 << 10).unwrap();
        assert_eq!(o.len(), 2, "only identity and the factor swap");
    }

    #[test]
    fn perp_splits_factors() {
        let a = disc_2a1();
        let d = FqfSubgroup::generate(&a, &[vec![1, 0]]);
        let p = perp(&a, &d);
        assert_eq!(p.order(), 2);
        assert!(p.contains(&vec![0, 1]));
        assert_eq!(d.order() * p.order(), a.order() as usize);
        // D = 0 → whole group; D = A → 0
        let zero = FqfSubgroup::trivial(&a);
        assert_eq!(perp(&a, &zero).order(), 4);
        let full = FqfSubgroup::generate(&a, &a.gens());
        assert_eq!(perp(&a, &full).order(), 1);
    }

    #[test]
    fn graph_isotropic() {
        // D_A = D_B = Z/2 with q = ∓1/2 matched oppositely
        let a = disc_a1();
        // B = Z/2 with q(1) = +1/2 (disc of A₁(−1))
        let b = FiniteQuadraticForm::new(vec![2], vec![rat(1, 2)], vec![vec![rat(1, 2)]]);
        let d_a = FqfSubgroup::generate(&a, &[vec![1]]);
        let g = anti_isometry_graph(&a, &b, &d_a, &[vec![1]]).unwrap();
        assert_eq!(g.pairs.len(), 2);
        // q_{A⊕B}(x, φx) = q_A(x) + q_B(φx) = 0 — checked inside the builder
        // mismatched φ errors
        let bad = anti_isometry_graph(&a, &a, &d_a, &[vec![1]]);
        assert!(bad.is_err());
    }

    #[test]
    fn glue_kernel_trivial_glue() {
        // D_A = 0, D_B = 0 → K = 1
        let a = disc_a1();
        let b = disc_a2();
        let d_a = FqfSubgroup::trivial(&a);
        let d_b = FqfSubgroup::trivial(&b);
        let gk = glue_kernel(&a, &b, &d_a, &d_b, &[], 1 << 10).unwrap();
        assert_eq!(gk.k_pairs.len(), 1);
        assert_eq!(gk.i_a_image.len(), 1);
    }

    #[test]
    fn glue_kernel_unimodular_glue() {
        // D_A = A, D_B = B anti-isometric → i_A is onto O(A)
        let a = disc_a1();
        let b = FiniteQuadraticForm::new(vec![2], vec![rat(1, 2)], vec![vec![rat(1, 2)]]);
        let d_a = FqfSubgroup::generate(&a, &a.gens());
        let d_b = FqfSubgroup::generate(&b, &b.gens());
        let gk = glue_kernel(&a, &b, &d_a, &d_b, &[vec![1]], 1 << 10).unwrap();
        assert_eq!(gk.i_a_image.len(), orthogonal_group(&a, 1 << 10).unwrap().len());
    }

    #[test]
    fn glue_kernel_2a1_factor() {
        // A = B = (Z/2)² from 2A₁ vs its negative; glue one factor
        let a = disc_2a1();
        let b = FiniteQuadraticForm::new(
            vec![2, 2],
            vec![rat(1, 2), rat(1, 2)],
            vec![vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 2)]],
        );
        let d_a = FqfSubgroup::generate(&a, &[vec![1, 0]]);
        let d_b = FqfSubgroup::generate(&b, &[vec![1, 0]]);
        let gk = glue_kernel(&a, &b, &d_a, &d_b, &[vec![1, 0]], 1 << 10).unwrap();
        // brute-force confirmed inside glue_kernel's assertion; spot check size
        assert_eq!(gk.k_pairs.len(), gk.i_a_image.len());
    }

    #[test]
    fn direct_sum_orders() {
        let a = disc_a1();
        let b = disc_a2();
        let s = a.direct_sum(&b);
        assert_eq!(s.order(), 6);
        let s2 = a.direct_sum(&a);
        assert_eq!(s2.orders, vec![2, 2]);
    }
}
