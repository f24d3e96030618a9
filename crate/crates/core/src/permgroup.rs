//! Deterministic Schreier–Sims machinery for permutation groups on small
//! finite point sets.
//!
//! Groups in the pipeline act on discriminant groups (≤ a few thousand
//! elements), so a plain stabilizer chain with explicit transversals is
//! enough. Elements optionally carry a "shadow" (e.g. the integer matrix on
//! the lattice that induces the permutation); shadows are multiplied along
//! with the permutations, which lets callers reconstruct a concrete matrix
//! preimage for any group element found by the chain, without word
//! bookkeeping.

use num_bigint::BigUint;
use num_traits::One;
use std::collections::HashMap;

/// Shadow element carried along with every permutation (a homomorphic image
/// or preimage). Use `()` when only the permutation action matters.
pub trait ShadowElem: Clone {
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
}

impl ShadowElem for () {
    fn mul(&self, _other: &Self) -> Self {}
    fn inv(&self) -> Self {}
}

impl ShadowElem for crate::IntMatrix {
    fn mul(&self, other: &Self) -> Self {
        crate::IntMatrix::mul(self, other)
    }
    fn inv(&self) -> Self {
        self.unimodular_inverse()
    }
}

/// Permutation of {0, …, n−1}; `img[x]` is the image of x.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm {
    pub img: Vec<u32>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { img: (0..n as u32).collect() }
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.img[x as usize]
    }

    /// Product "self then other": (self·other)(x) = other(self(x)).
    pub fn then(&self, other: &Perm) -> Perm {
        Perm { img: self.img.iter().map(|&y| other.img[y as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut img = vec![0u32; self.img.len()];
        for (x, &y) in self.img.iter().enumerate() {
            img[y as usize] = x as u32;
        }
        Perm { img }
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }
}

/// Permutation with shadow.
#[derive(Clone, Debug)]
pub struct El<S: ShadowElem> {
    pub p: Perm,
    pub s: S,
}

impl<S: ShadowElem> El<S> {
    pub fn then(&self, other: &El<S>) -> El<S> {
        El { p: self.p.then(&other.p), s: self.s.mul(&other.s) }
    }

    pub fn inverse(&self) -> El<S> {
        El { p: self.p.inverse(), s: self.s.inv() }
    }
}

struct Level<S: ShadowElem> {
    base: u32,
    gens: Vec<El<S>>,
    /// orbit point ↦ transversal element g with base^g = point
    transversal: HashMap<u32, El<S>>,
}

/// Permutation group with stabilizer chain.
pub struct PermGroup<S: ShadowElem> {
    n: usize,
    identity: El<S>,
    pub gens: Vec<El<S>>,
    levels: Vec<Level<S>>,
}

impl<S: ShadowElem> PermGroup<S> {
    /// Build the stabilizer chain. `base_hint` points are preferred (in
    /// order) when choosing base points, which makes pointwise-stabilizer
    /// and transporter queries for those points direct chain walks.
    pub fn new(n: usize, gens: Vec<El<S>>, id_shadow: S, base_hint: &[u32]) -> Self {
        let identity = El { p: Perm::identity(n), s: id_shadow };
        let mut g = PermGroup { n, identity, gens: Vec::new(), levels: Vec::new() };
        // Pre-seed one level per hint point so the chain base starts with
        // exactly these points in this order (transporter walks rely on it).
        for &b in base_hint {
            let mut transversal = HashMap::new();
            transversal.insert(b, g.identity.clone());
            g.levels.push(Level { base: b, gens: Vec::new(), transversal });
        }
        for gen in gens {
            g.gens.push(gen.clone());
            g.insert_gen(gen, base_hint);
        }
        g
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// Generators of the level-i stabilizer subgroup H_i: every strong
    /// generator stored at level i or deeper (they all fix the bases of
    /// levels 0..i−1).
    fn gens_from(&self, i: usize) -> Vec<El<S>> {
        self.levels[i..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect()
    }

    /// BFS closure of the level-i orbit under all of H_i's generators.
    fn close_orbit(&mut self, i: usize) {
        let gens = self.gens_from(i);
        let mut queue: Vec<u32> = self.levels[i].transversal.keys().copied().collect();
        queue.sort_unstable(); // determinism
        let mut qi = 0;
        while qi < queue.len() {
            let x = queue[qi];
            qi += 1;
            let tx = self.levels[i].transversal[&x].clone();
            for g in &gens {
                let y = g.p.apply(x);
                if !self.levels[i].transversal.contains_key(&y) {
                    self.levels[i].transversal.insert(y, tx.then(g));
                    queue.push(y);
                }
            }
        }
    }

    /// Store a strong generator at level j (creating the level if needed).
    fn place_gen(&mut self, j: usize, g: El<S>, base_hint: &[u32]) {
        if j == self.levels.len() {
            // new level: pick a base point moved by g, preferring the hint
            let base = base_hint
                .iter()
                .copied()
                .find(|&b| g.p.apply(b) != b)
                .unwrap_or_else(|| {
                    (0..self.n as u32).find(|&x| g.p.apply(x) != x).unwrap()
                });
            let mut transversal = HashMap::new();
            transversal.insert(base, self.identity.clone());
            self.levels.push(Level { base, gens: Vec::new(), transversal });
        }
        self.levels[j].gens.push(g);
    }

    fn insert_gen(&mut self, g: El<S>, base_hint: &[u32]) {
        if let Some((lvl, residual)) = self.sift_from(0, g) {
            self.place_gen(lvl, residual, base_hint);
            for k in (0..=lvl.min(self.levels.len() - 1)).rev() {
                self.complete_level(k, base_hint);
            }
        }
    }

    /// Re-establish the chain property at level i, assuming levels > i are
    /// already complete: close the orbit under H_i and sift every Schreier
    /// generator; residuals are placed deeper, the deeper levels are
    /// re-completed, and the scan restarts (the level-i orbit may grow).
    fn complete_level(&mut self, i: usize, base_hint: &[u32]) {
        'restart: loop {
            self.close_orbit(i);
            let gens = self.gens_from(i);
            let mut points: Vec<u32> =
                self.levels[i].transversal.keys().copied().collect();
            points.sort_unstable();
            for &x in &points {
                let tx = self.levels[i].transversal[&x].clone();
                for s in &gens {
                    let y = s.p.apply(x);
                    let ty = self.levels[i].transversal[&y].clone();
                    let schreier = tx.then(s).then(&ty.inverse());
                    if let Some((lvl, residual)) = self.sift_from(i + 1, schreier)
                    {
                        self.place_gen(lvl, residual, base_hint);
                        for k in ((i + 1)..=lvl.min(self.levels.len() - 1)).rev() {
                            self.complete_level(k, base_hint);
                        }
                        continue 'restart;
                    }
                }
            }
            return;
        }
    }

    /// Sift an element through the chain starting at `start`; returns the
    /// level and residual if it does not strip to the identity.
    fn sift_from(&self, start: usize, mut g: El<S>) -> Option<(usize, El<S>)> {
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            if g.p.is_identity() {
                return None;
            }
            let y = g.p.apply(level.base);
            match level.transversal.get(&y) {
                Some(t) => g = g.then(&t.inverse()),
                None => return Some((i, g)),
            }
        }
        if g.p.is_identity() {
            None
        } else {
            Some((self.levels.len(), g))
        }
    }


    pub fn order(&self) -> BigUint {
        let mut o = BigUint::one();
        for level in &self.levels {
            o *= BigUint::from(level.transversal.len());
        }
        o
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.member(p).is_some()
    }

    /// Membership test; on success returns the element with its shadow
    /// (the shadow is reconstructed from the chain, so a caller holding a
    /// bare permutation gets a concrete preimage).
    pub fn member(&self, p: &Perm) -> Option<El<S>> {
        let mut g = p.clone();
        let mut witness = self.identity.clone();
        for level in &self.levels {
            if g.is_identity() {
                break;
            }
            let y = g.apply(level.base);
            let t = level.transversal.get(&y)?;
            g = g.then(&t.p.inverse());
            // p = g·t ⇒ accumulated witness must be multiplied on the left
            witness = t.then(&witness);
        }
        if g.is_identity() {
            Some(witness)
        } else {
            None
        }
    }

    /// Find one g ∈ G with from[i]^g = to[i] for all i. Requires the chain
    /// to have been built with `from` as base hint prefix; this method
    /// rebuilds a chain with that base internally, so it works regardless.
    pub fn transporter(&self, from: &[u32], to: &[u32]) -> Option<El<S>> {
        assert_eq!(from.len(), to.len());
        let rebased = PermGroup::new(
            self.n,
            self.gens.clone(),
            self.identity.s.clone(),
            from,
        );
        rebased.transporter_rebased(from, to)
    }

    /// Transporter walk assuming this group's base starts with `from`
    /// (up to fixed points: points fixed by the whole remaining stabilizer
    /// never appear as base points and are checked directly).
    fn transporter_rebased(&self, from: &[u32], to: &[u32]) -> Option<El<S>> {
        let mut g = self.identity.clone();
        let mut level = 0;
        for (k, (&a, &b)) in from.iter().zip(to).enumerate() {
            let _ = k;
            // Point a adjusted by what we already fixed:
            let need_from = a;
            let need_to = {
                // we search h in the pointwise stabilizer of from[..k] with
                // from[k]^(h·g) = to[k]; i.e. from[k]^h = to[k]^{g^{-1}}
                g.p.inverse().apply(b)
            };
            if level < self.levels.len() && self.levels[level].base == need_from {
                let t = self.levels[level].transversal.get(&need_to)?;
                g = t.then(&g);
                level += 1;
            } else {
                // `need_from` is fixed by the current stabilizer subgroup
                if need_from != need_to {
                    return None;
                }
            }
        }
        Some(g)
    }

    /// Generators of the pointwise stabilizer of `points` (chain must have
    /// been built with these as base hint prefix; rebuilt internally).
    pub fn pointwise_stabilizer(&self, points: &[u32]) -> Vec<El<S>> {
        let rebased =
            PermGroup::new(self.n, self.gens.clone(), self.identity.s.clone(), points);
        let mut level = 0;
        for &p in points {
            if level < rebased.levels.len() && rebased.levels[level].base == p {
                level += 1;
            }
            // else: p is fixed by the whole remaining group; skip
        }
        if level >= rebased.levels.len() {
            return Vec::new();
        }
        rebased.levels[level..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect()
    }

    /// List all elements; panics if the order exceeds the budget.
    pub fn elements(&self, budget: usize) -> Vec<El<S>> {
        let order = self.order();
        assert!(
            order <= BigUint::from(budget),
            "group of order {} exceeds element-listing budget {}",
            order,
            budget
        );
        let mut elems: Vec<El<S>> = vec![self.identity.clone()];
        // cartesian product of transversals, deepest level first
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(elems.len() * level.transversal.len());
            let mut ts: Vec<(&u32, &El<S>)> = level.transversal.iter().collect();
            ts.sort_by_key(|(k, _)| **k);
            for e in &elems {
                for (_, t) in &ts {
                    next.push(e.then(t));
                }
            }
            elems = next;
        }
        elems
    }

    pub fn orbit_of(&self, x: u32) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        let mut queue = vec![x];
        seen[x as usize] = true;
        let mut qi = 0;
        while qi < queue.len() {
            let y = queue[qi];
            qi += 1;
            for g in &self.gens {
                let z = g.p.apply(y);
                if !seen[z as usize] {
                    seen[z as usize] = true;
                    queue.push(z);
                }
            }
        }
        queue.sort_unstable();
        queue
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(img: &[u32]) -> El<()> {
        El { p: Perm { img: img.to_vec() }, s: () }
    }

    #[test]
    fn symmetric_group_order() {
        // S4 generated by a transposition and a 4-cycle
        let g = PermGroup::new(
            4,
            vec![perm(&[1, 0, 2, 3]), perm(&[1, 2, 3, 0])],
            (),
            &[],
        );
        assert_eq!(g.order(), BigUint::from(24u32));
        assert_eq!(g.elements(100).len(), 24);
    }

    #[test]
    fn symmetric_group_orders_deep_chain() {
        // S_n from a transposition and an n-cycle forces a base chain of
        // length n-1; regression for a bug where a level's orbit was only
        // closed under that level's own generators instead of all strong
        // generators stored at deeper levels.
        for n in [5usize, 6, 7, 10] {
            let mut t: Vec<usize> = (0..n).collect();
            t.swap(0, 1);
            let c: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
            let g: PermGroup<()> = PermGroup::new(
                n,
                vec![
                    El { p: Perm { img: t.iter().map(|&x| x as u32).collect() }, s: () },
                    El { p: Perm { img: c.iter().map(|&x| x as u32).collect() }, s: () },
                ],
                (),
                &[],
            );
            let want: u64 = (1..=n as u64).product();
            assert_eq!(g.order(), BigUint::from(want), "S_{}", n);
        }
    }

    #[test]
    fn membership_and_witness() {
        let g = PermGroup::new(
            5,
            vec![perm(&[1, 0, 2, 3, 4]), perm(&[0, 2, 1, 3, 4])],
            (),
            &[],
        );
        // ⟨(01),(12)⟩ = S3 on {0,1,2}
        assert_eq!(g.order(), BigUint::from(6u32));
        let p = Perm { img: vec![2, 0, 1, 3, 4] };
        let w = g.member(&p).expect("3-cycle is in S3");
        assert_eq!(w.p, p);
        let q = Perm { img: vec![0, 1, 2, 4, 3] };
        assert!(!g.contains(&q));
    }

    #[test]
    fn transporter_search() {
        // cyclic C5
        let g = PermGroup::new(5, vec![perm(&[1, 2, 3, 4, 0])], (), &[]);
        let t = g.transporter(&[0], &[3]).expect("transitive");
        assert_eq!(t.p.apply(0), 3);
        // C5 is regular: no element maps (0,1) to (0,2)
        assert!(g.transporter(&[0, 1], &[0, 2]).is_none());
        // but (0,1) → (2,3) works
        let t2 = g.transporter(&[0, 1], &[2, 3]).unwrap();
        assert_eq!(t2.p.apply(0), 2);
        assert_eq!(t2.p.apply(1), 3);
    }

    #[test]
    fn pointwise_stabilizer_gens() {
        // S4: stabilizer of point 0 is S3 on {1,2,3}
        let g = PermGroup::new(
            4,
            vec![perm(&[1, 0, 2, 3]), perm(&[1, 2, 3, 0])],
            (),
            &[],
        );
        let st = g.pointwise_stabilizer(&[0]);
        let h = PermGroup::new(4, st, (), &[]);
        assert_eq!(h.order(), BigUint::from(6u32));
        for e in h.elements(10) {
            assert_eq!(e.p.apply(0), 0);
        }
    }

    #[test]
    fn shadows_track_products() {
        // shadow = i64 under addition tracks generator usage counts mod nothing
        #[derive(Clone, Debug)]
        struct Count(i64);
        impl ShadowElem for Count {
            fn mul(&self, o: &Self) -> Self {
                Count(self.0 + o.0)
            }
            fn inv(&self) -> Self {
                Count(-self.0)
            }
        }
        let g = PermGroup::new(
            3,
            vec![El { p: Perm { img: vec![1, 2, 0] }, s: Count(1) }],
            Count(0),
            &[],
        );
        // 3-cycle squared: shadow must be ±2 mod 3 (any representative word)
        let w = g.member(&Perm { img: vec![2, 0, 1] }).unwrap();
        assert_eq!(w.s.0.rem_euclid(3), 2);
    }
}
