//! Generic orbit enumeration over a G-graph.
//!
//! Given a graph whose vertex set carries a group action preserving
//! adjacency, a breadth-first walk from a seed vertex produces
//! * `v0_list`: one representative per orbit met in the seed's component,
//! * `h_set`: for every explored edge leaving the representatives, a group
//!   element carrying the far endpoint onto some representative,
//! * `stabilizers`: generators of the stabilizer of each representative.
//!
//! The stabilizer generators of the seed together with the `h_set`
//! elements generate the full action of the group on the component.  The
//! graph is accessed only through callbacks, so the engine is independent
//! of how vertices (chambers, faces, isotropic rays, ...) are represented.

use std::collections::VecDeque;
use std::hash::Hash;

/// Callback bundle describing a G-graph rooted at `seed`.
///
/// `neighbors` must be deterministic and finite; `transporter(v, w)` must
/// return a group element mapping `v` to `w` exactly when the two vertices
/// are in the same orbit; `stabilizer(v)` returns generators of the
/// stabilizer of `v`.  All callbacks must be pure.
pub struct GraphOracle<'a, V, G> {
    pub seed: V,
    pub neighbors: Box<dyn Fn(&V) -> Vec<V> + 'a>,
    pub transporter: Box<dyn Fn(&V, &V) -> Option<G> + 'a>,
    pub stabilizer: Box<dyn Fn(&V) -> Vec<G> + 'a>,
    /// Optional progress hook, called as (vertices expanded, |V₀| so far).
    pub progress: Option<Box<dyn Fn(usize, usize) + 'a>>,
}

/// Output of [`enumerate`].
#[derive(Debug, Clone)]
pub struct OrbitResult<V, G> {
    /// Orbit representatives in FIFO discovery order; pairwise
    /// inequivalent, and every neighbor of a representative is equivalent
    /// to some representative.
    pub v0_list: Vec<V>,
    /// (source vertex, element mapping it onto a representative), one per
    /// explored edge; kept as raw transporter elements.
    pub h_set: Vec<(V, G)>,
    /// Stabilizer generators per representative, indexed like `v0_list`.
    pub stabilizers: Vec<Vec<G>>,
    /// Slot for callers accumulating Σ 1/|stabilizer| style volumes; the
    /// engine itself leaves it empty.
    pub total_volume_accumulator: Option<crate::Rat>,
}

#[derive(Debug, thiserror::Error)]
pub enum OrbitError<V> {
    #[error("orbit budget exceeded: more than {budget} representatives")]
    Budget { budget: usize, partial: Vec<V> },
}

/// Breadth-first orbit enumeration from `o.seed`.
///
/// Representatives are processed strictly FIFO; each neighbor is compared
/// against `v0_list` in list order, and the first equivalent
/// representative wins, so the output is reproducible for a fixed oracle.
/// `budget` bounds |V₀|; exceeding it aborts with the partial list.
pub fn enumerate<V, G>(
    o: &GraphOracle<'_, V, G>,
    budget: usize,
) -> Result<OrbitResult<V, G>, OrbitError<V>>
where
    V: Clone + Eq + Hash,
    G: Clone,
{
    let mut v0_list: Vec<V> = vec![o.seed.clone()];
    let mut h_set: Vec<(V, G)> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.push_back(0);
    let mut expanded = 0usize;
    while let Some(i) = queue.pop_front() {
        let v = v0_list[i].clone();
        for w in (o.neighbors)(&v) {
            let mut matched = false;
            for rep in &v0_list {
                if let Some(g) = (o.transporter)(&w, rep) {
                    h_set.push((w.clone(), g));
                    matched = true;
                    break;
                }
            }
            if !matched {
                if v0_list.len() == budget {
                    return Err(OrbitError::Budget { budget, partial: v0_list });
                }
                v0_list.push(w);
                queue.push_back(v0_list.len() - 1);
            }
        }
        expanded += 1;
        if let Some(hook) = &o.progress {
            hook(expanded, v0_list.len());
        }
    }
    let stabilizers = v0_list.iter().map(|v| (o.stabilizer)(v)).collect();
    Ok(OrbitResult { v0_list, h_set, stabilizers, total_volume_accumulator: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// Z_n vertices acted on by the shift subgroup ⟨+d⟩; edges are
    /// ± each offset, which the shifts preserve.  Group elements are shift
    /// amounts mod n.
    fn shift_oracle(
        n: u32,
        d: u32,
        offsets: Vec<u32>,
        reverse_neighbors: bool,
    ) -> GraphOracle<'static, u32, u32> {
        let g = gcd(n, d.max(1));
        let step = if d == 0 { 0 } else { g };
        GraphOracle {
            seed: 0,
            neighbors: Box::new(move |&v| {
                let mut out: Vec<u32> = offsets
                    .iter()
                    .flat_map(|&o| [(v + o) % n, (v + n - o % n) % n])
                    .collect();
                out.dedup();
                if reverse_neighbors {
                    out.reverse();
                }
                out
            }),
            // shifts reachable from d are exactly the multiples of gcd(n,d)
            transporter: Box::new(move |&v, &w| {
                let diff = (w + n - v) % n;
                if step != 0 && diff % step == 0 {
                    Some(diff)
                } else if diff == 0 {
                    Some(0)
                } else {
                    None
                }
            }),
            // a shift fixing a vertex is the identity shift
            stabilizer: Box::new(|_| Vec::new()),
            progress: None,
        }
    }

    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 { a } else { gcd(b, a % b) }
    }

    #[test]
    fn isolated_seed_trivial_group() {
        let o: GraphOracle<'_, u32, ()> = GraphOracle {
            seed: 7,
            neighbors: Box::new(|_| Vec::new()),
            transporter: Box::new(|&v, &w| if v == w { Some(()) } else { None }),
            stabilizer: Box::new(|_| Vec::new()),
            progress: None,
        };
        let r = enumerate(&o, 100).unwrap();
        assert_eq!(r.v0_list, vec![7]);
        assert!(r.h_set.is_empty());
        assert_eq!(r.stabilizers, vec![Vec::<()>::new()]);
    }

    #[test]
    fn six_cycle_rotation_by_two() {
        // Hand enumeration: orbits under +2 are {0,2,4} and {1,3,5};
        // the 6-cycle alternates between them, so |V₀| = 2 and the edges
        // out of the representatives all carry transporters.
        let o = shift_oracle(6, 2, vec![1], false);
        let r = enumerate(&o, 100).unwrap();
        assert_eq!(r.v0_list.len(), 2);
        assert!(!r.h_set.is_empty());
        let orbit_of = |v: u32| v % 2;
        let mut seen: HashSet<u32> = HashSet::new();
        for rep in &r.v0_list {
            assert!(seen.insert(orbit_of(*rep)), "representatives equivalent");
        }
        assert_eq!(seen.len(), 2);
        // every H element maps its source onto a representative
        for (src, g) in &r.h_set {
            let image = (src + g) % 6;
            assert!(r.v0_list.contains(&image));
        }
    }

    #[test]
    fn budget_carries_partial() {
        let o = shift_oracle(12, 0, vec![1], false);
        match enumerate(&o, 3) {
            Err(OrbitError::Budget { budget: 3, partial }) => {
                assert_eq!(partial.len(), 3)
            }
            other => panic!("expected budget error, got {:?}", other.is_ok()),
        }
    }

    proptest! {
        /// Permuting the neighbor order preserves the orbit set: same
        /// |V₀| and a perfect matching of representatives by equivalence.
        #[test]
        fn neighbor_order_invariance(
            n in 4u32..14,
            d in 1u32..13,
            offs in proptest::collection::vec(1u32..13, 1..4),
        ) {
            let d = d % n + 1;
            let offs: Vec<u32> =
                offs.into_iter().map(|o| o % (n - 1) + 1).collect();
            let a = enumerate(&shift_oracle(n, d, offs.clone(), false), 1000)
                .unwrap();
            let b = enumerate(&shift_oracle(n, d, offs.clone(), true), 1000)
                .unwrap();
            prop_assert_eq!(a.v0_list.len(), b.v0_list.len());
            let orc = shift_oracle(n, d, offs, false);
            let mut used = vec![false; b.v0_list.len()];
            for va in &a.v0_list {
                let j = b
                    .v0_list
                    .iter()
                    .position(|vb| (orc.transporter)(va, vb).is_some())
                    .expect("unmatched representative");
                prop_assert!(!used[j], "two reps matched the same orbit");
                used[j] = true;
            }
            // h_set elements land on representatives
            for (src, g) in &a.h_set {
                let image = (src + g) % n;
                prop_assert!(a.v0_list.contains(&image));
            }
        }
    }
}
