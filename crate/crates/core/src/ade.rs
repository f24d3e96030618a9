//! ADE root-system machinery: type bookkeeping, standard models, root
//! classification, Weyl-group orders, diagram automorphisms, and the
//! kernel lemmas and c/d/e constants feeding the volume formula.
//!
//! All lattices here are negative definite; roots have norm −2.

use crate::exact_linalg::{vectors_of_norm, IntMatrix};
use crate::permgroup::Perm;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    D,
    E,
}

/// One irreducible factor, e.g. E8 or A3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ADEComponent {
    pub family: Family,
    pub rank: usize,
}

impl ADEComponent {
    pub fn new(family: Family, rank: usize) -> Self {
        match family {
            Family::A => assert!(rank >= 1, "Aₙ needs n ≥ 1"),
            Family::D => assert!(rank >= 4, "Dₙ needs n ≥ 4"),
            Family::E => assert!((6..=8).contains(&rank), "Eₙ needs n ∈ {{6,7,8}}"),
        }
        ADEComponent { family, rank }
    }

    pub fn num_roots(&self) -> usize {
        match self.family {
            Family::A => self.rank * (self.rank + 1),
            Family::D => 2 * self.rank * (self.rank - 1),
            Family::E => match self.rank {
                6 => 72,
                7 => 126,
                _ => 240,
            },
        }
    }

    pub fn weyl_order(&self) -> BigUint {
        fn factorial(n: usize) -> BigUint {
            (1..=n as u64).map(BigUint::from).fold(BigUint::one(), |a, b| a * b)
        }
        match self.family {
            Family::A => factorial(self.rank + 1),
            Family::D => factorial(self.rank) << (self.rank - 1),
            Family::E => BigUint::from(match self.rank {
                6 => 51840u64,
                7 => 2903040u64,
                _ => 696729600u64,
            }),
        }
    }

    pub fn determinant(&self) -> i64 {
        match self.family {
            Family::A => self.rank as i64 + 1,
            Family::D => 4,
            Family::E => (9 - self.rank) as i64,
        }
    }

    /// Order of the diagram automorphism group of one component.
    pub fn diagram_aut_order(&self) -> u64 {
        match (self.family, self.rank) {
            (Family::A, 1) => 1,
            (Family::A, _) => 2,
            (Family::D, 4) => 6,
            (Family::D, _) => 2,
            (Family::E, 6) => 2,
            _ => 1,
        }
    }

    /// −1 ∈ W(R) for irreducible R exactly for A₁, Dₙ with n even, E₇, E₈.
    pub fn minus_one_in_weyl(&self) -> bool {
        match (self.family, self.rank) {
            (Family::A, 1) => true,
            (Family::A, _) => false,
            (Family::D, n) => n % 2 == 0,
            (Family::E, 6) => false,
            (Family::E, _) => true,
        }
    }

    /// Maximal number of pairwise orthogonal roots.
    pub fn max_orthogonal_roots(&self) -> usize {
        match self.family {
            Family::A => (self.rank + 1) / 2,
            Family::D => 2 * (self.rank / 2),
            Family::E => match self.rank {
                6 => 4,
                7 => 7,
                _ => 8,
            },
        }
    }

    /// Dynkin edges under the canonical node labelling:
    /// Aₙ: path 0–1–…–(n−1).
    /// Dₙ: path 0–…–(n−3) with leaves n−2 and n−1 attached to n−3.
    /// Eₙ: path 0–…–(n−2) with node n−1 attached to node 2.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank;
        let mut e = Vec::new();
        match self.family {
            Family::A => {
                for i in 0..n.saturating_sub(1) {
                    e.push((i, i + 1));
                }
            }
            Family::D => {
                for i in 0..n - 3 {
                    e.push((i, i + 1));
                }
                e.push((n - 3, n - 2));
                e.push((n - 3, n - 1));
            }
            Family::E => {
                for i in 0..n - 2 {
                    e.push((i, i + 1));
                }
                e.push((2, n - 1));
            }
        }
        e
    }
}

impl fmt::Display for ADEComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.family {
            Family::A => 'A',
            Family::D => 'D',
            Family::E => 'E',
        };
        write!(f, "{}{}", c, self.rank)
    }
}

/// ADE type: a multiset of irreducible components, e.g. "E8+A1" or "4A1".
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ADEType {
    /// canonically sorted: rank descending, then E before D before A
    pub components: Vec<ADEComponent>,
}

fn family_sort_key(f: Family) -> u8 {
    match f {
        Family::E => 0,
        Family::D => 1,
        Family::A => 2,
    }
}

impl ADEType {
    pub fn new(mut components: Vec<ADEComponent>) -> Self {
        components.sort_by(|a, b| {
            b.rank
                .cmp(&a.rank)
                .then(family_sort_key(a.family).cmp(&family_sort_key(b.family)))
        });
        ADEType { components }
    }

    pub fn empty() -> Self {
        ADEType { components: vec![] }
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    pub fn num_roots(&self) -> usize {
        self.components.iter().map(|c| c.num_roots()).sum()
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }

    pub fn weyl_order(&self) -> BigUint {
        self.components
            .iter()
            .map(|c| c.weyl_order())
            .fold(BigUint::one(), |a, b| a * b)
    }

    pub fn max_orthogonal_roots(&self) -> usize {
        self.components.iter().map(|c| c.max_orthogonal_roots()).sum()
    }

    /// |Aut(diagram)| including permutations of equal components.
    pub fn diagram_aut_order(&self) -> BigUint {
        let mut total = BigUint::one();
        let mut i = 0;
        while i < self.components.len() {
            let c = self.components[i];
            let mut mult = 0u64;
            while i < self.components.len() && self.components[i] == c {
                mult += 1;
                i += 1;
            }
            total *= BigUint::from(c.diagram_aut_order()).pow(mult as u32);
            total *= (1..=mult).map(BigUint::from).fold(BigUint::one(), |a, b| a * b);
        }
        total
    }

    /// Index [O₀(R) : W(R)] = n! with n = number of E₈ components.
    pub fn kernel_o0_vs_w(&self) -> BigUint {
        let n = self
            .components
            .iter()
            .filter(|c| c.family == Family::E && c.rank == 8)
            .count();
        (1..=n as u64).map(BigUint::from).fold(BigUint::one(), |a, b| a * b)
    }

    /// Negative-definite Gram matrix of the standard model (block diagonal
    /// negated Cartan matrices in canonical component order).
    pub fn standard_gram(&self) -> IntMatrix {
        let n = self.rank();
        let mut g = IntMatrix::zero(n, n);
        let mut off = 0usize;
        for c in &self.components {
            for i in 0..c.rank {
                g[(off + i, off + i)] = (-2i64).into();
            }
            for (i, j) in c.edges() {
                g[(off + i, off + j)] = 1i64.into();
                g[(off + j, off + i)] = 1i64.into();
            }
            off += c.rank;
        }
        g
    }
}

impl fmt::Display for ADEType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.components.len() {
            let c = self.components[i];
            let mut mult = 0;
            while i < self.components.len() && self.components[i] == c {
                mult += 1;
                i += 1;
            }
            if mult == 1 {
                parts.push(format!("{}", c));
            } else {
                parts.push(format!("{}{}", mult, c));
            }
        }
        write!(f, "{}", parts.join("+"))
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AdeError {
    #[error("cannot parse ADE type: {0}")]
    Parse(String),
    #[error("not an ADE lattice: {0}")]
    NotAde(String),
}

impl FromStr for ADEType {
    type Err = AdeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(ADEType::empty());
        }
        let mut comps = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let fam_pos = part
                .find(|ch| ch == 'A' || ch == 'D' || ch == 'E')
                .ok_or_else(|| AdeError::Parse(part.to_string()))?;
            let mult: usize = if fam_pos == 0 {
                1
            } else {
                part[..fam_pos]
                    .parse()
                    .map_err(|_| AdeError::Parse(part.to_string()))?
            };
            let family = match &part[fam_pos..fam_pos + 1] {
                "A" => Family::A,
                "D" => Family::D,
                _ => Family::E,
            };
            let rank: usize = part[fam_pos + 1..]
                .parse()
                .map_err(|_| AdeError::Parse(part.to_string()))?;
            let ok = match family {
                Family::A => rank >= 1,
                Family::D => rank >= 4,
                Family::E => (6..=8).contains(&rank),
            };
            if !ok || mult == 0 {
                return Err(AdeError::Parse(part.to_string()));
            }
            for _ in 0..mult {
                comps.push(ADEComponent::new(family, rank));
            }
        }
        Ok(ADEType::new(comps))
    }
}

/// Simple-root basis extracted from a root lattice, with roots relabelled
/// to the canonical node order so that their mutual Gram matrix equals
/// `ade_type.standard_gram()`.
#[derive(Clone, Debug)]
pub struct RootBasis {
    pub ade_type: ADEType,
    /// simple roots in ambient-lattice coordinates, canonical order
    pub simple_roots: Vec<Vec<crate::Int>>,
    pub edges: Vec<(usize, usize)>,
}

/// Classify a negative-definite lattice generated by its roots.
pub fn classify(gram: &IntMatrix) -> Result<RootBasis, AdeError> {
    let n = gram.rows;
    if n == 0 {
        return Ok(RootBasis { ade_type: ADEType::empty(), simple_roots: vec![], edges: vec![] });
    }
    let roots = vectors_of_norm(gram, -2);
    // root-generated check: roots span with trivial cokernel
    let rm = IntMatrix::from_big_rows(&roots);
    if rm.rows == 0 || rm.rank() != n {
        return Err(AdeError::NotAde("roots do not span".into()));
    }
    let snf = crate::exact_linalg::smith_normal_form(&rm);
    for i in 0..n {
        if !snf.d[(i, i)].is_one() {
            return Err(AdeError::NotAde("roots generate a proper sublattice".into()));
        }
    }
    // positive system: lexicographically positive roots (group-compatible order)
    let positive: Vec<Vec<crate::Int>> = roots
        .iter()
        .filter(|r| {
            r.iter().find(|c| !c.is_zero()).map(|c| c.is_positive()).unwrap_or(false)
        })
        .cloned()
        .collect();
    let pos_set: std::collections::HashSet<Vec<crate::Int>> =
        positive.iter().cloned().collect();
    // simple roots: positive roots r such that r − p is never positive
    let sub = |a: &[crate::Int], b: &[crate::Int]| -> Vec<crate::Int> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    };
    let simple: Vec<Vec<crate::Int>> = positive
        .iter()
        .filter(|r| {
            !positive
                .iter()
                .any(|p| p != *r && pos_set.contains(&sub(r, p)))
        })
        .cloned()
        .collect();
    if simple.len() != n {
        return Err(AdeError::NotAde(format!(
            "found {} simple roots in rank {}",
            simple.len(),
            n
        )));
    }
    // pairings between distinct simple roots must be 0 or 1
    let pairing = |a: &[crate::Int], b: &[crate::Int]| -> i64 {
        let gb = gram.mul_vec(b);
        let s: crate::Int = a.iter().zip(&gb).map(|(x, y)| x * y).sum();
        i64::try_from(&s).expect("pairing overflow")
    };
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            match pairing(&simple[i], &simple[j]) {
                0 => {}
                1 => {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
                _ => return Err(AdeError::NotAde("non-Dynkin pairing".into())),
            }
        }
    }
    // connected components
    let mut comp_id = vec![usize::MAX; n];
    let mut ncomp = 0;
    for s in 0..n {
        if comp_id[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp_id[s] = ncomp;
        while let Some(v) = stack.pop() {
            for u in 0..n {
                if adj[v][u] && comp_id[u] == usize::MAX {
                    comp_id[u] = ncomp;
                    stack.push(u);
                }
            }
        }
        ncomp += 1;
    }
    // classify each component and relabel nodes canonically
    struct CompInfo {
        comp: ADEComponent,
        order: Vec<usize>, // canonical position → original simple-root index
    }
    let mut infos: Vec<CompInfo> = Vec::new();
    for c in 0..ncomp {
        let nodes: Vec<usize> = (0..n).filter(|&v| comp_id[v] == c).collect();
        let deg = |v: usize| -> usize { nodes.iter().filter(|&&u| adj[v][u]).count() };
        let branch: Vec<usize> = nodes.iter().cloned().filter(|&v| deg(v) >= 3).collect();
        let k = nodes.len();
        let order: Vec<usize>;
        let comp: ADEComponent;
        if branch.is_empty() {
            // Aₖ: path; start from the lexicographically smaller endpoint root
            comp = ADEComponent::new(Family::A, k);
            if k == 1 {
                order = nodes.clone();
            } else {
                let ends: Vec<usize> =
                    nodes.iter().cloned().filter(|&v| deg(v) == 1).collect();
                if ends.len() != 2 {
                    return Err(AdeError::NotAde("cycle in Dynkin graph".into()));
                }
                let start = if simple[ends[0]] <= simple[ends[1]] { ends[0] } else { ends[1] };
                order = walk_path(start, &adj, &nodes);
            }
        } else if branch.len() == 1 {
            let b = branch[0];
            if deg(b) != 3 {
                return Err(AdeError::NotAde("vertex of degree > 3".into()));
            }
            // arms from the branch node
            let mut arms: Vec<Vec<usize>> = Vec::new();
            for &u in &nodes {
                if adj[b][u] {
                    let mut arm = vec![u];
                    let mut prev = b;
                    let mut cur = u;
                    loop {
                        let next: Vec<usize> = nodes
                            .iter()
                            .cloned()
                            .filter(|&v| adj[cur][v] && v != prev)
                            .collect();
                        match next.len() {
                            0 => break,
                            1 => {
                                arm.push(next[0]);
                                prev = cur;
                                cur = next[0];
                            }
                            _ => return Err(AdeError::NotAde("second branch".into())),
                        }
                    }
                    arms.push(arm);
                }
            }
            arms.sort_by(|a, b2| {
                a.len()
                    .cmp(&b2.len())
                    .then_with(|| simple[*a.last().unwrap()].cmp(&simple[*b2.last().unwrap()]))
            });
            let (a1, a2, a3) = (arms[0].len(), arms[1].len(), arms[2].len());
            if a1 == 1 && a2 == 1 {
                // Dₖ: long arm far-end → branch at position k−3, then leaves
                comp = ADEComponent::new(Family::D, k);
                let mut ord: Vec<usize> = arms[2].iter().rev().cloned().collect();
                ord.push(b);
                // two leaves in lex order of their roots
                let (l1, l2) = (arms[0][0], arms[1][0]);
                if simple[l1] <= simple[l2] {
                    ord.push(l1);
                    ord.push(l2);
                } else {
                    ord.push(l2);
                    ord.push(l1);
                }
                order = ord;
            } else if a1 == 1 && a2 == 2 && (2..=4).contains(&a3) {
                // E₆/E₇/E₈: 2-arm far-end, 2-arm near node, branch, long arm,
                // then the 1-arm node
                comp = ADEComponent::new(Family::E, k);
                let mut ord: Vec<usize> = vec![arms[1][1], arms[1][0], b];
                ord.extend(arms[2].iter().cloned());
                ord.push(arms[0][0]);
                order = ord;
            } else {
                return Err(AdeError::NotAde("arm lengths outside ADE".into()));
            }
        } else {
            return Err(AdeError::NotAde("two branch vertices".into()));
        }
        infos.push(CompInfo { comp, order });
    }
    // sort components canonically and assemble
    infos.sort_by(|x, y| {
        y.comp
            .rank
            .cmp(&x.comp.rank)
            .then(family_sort_key(x.comp.family).cmp(&family_sort_key(y.comp.family)))
            .then_with(|| simple[x.order[0]].cmp(&simple[y.order[0]]))
    });
    let ade_type = ADEType::new(infos.iter().map(|i| i.comp).collect());
    let mut simple_roots = Vec::with_capacity(n);
    for info in &infos {
        for &idx in &info.order {
            simple_roots.push(simple[idx].clone());
        }
    }
    let edges = ade_type
        .components
        .iter()
        .scan(0usize, |off, c| {
            let es: Vec<(usize, usize)> =
                c.edges().iter().map(|&(i, j)| (*off + i, *off + j)).collect();
            *off += c.rank;
            Some(es)
        })
        .flatten()
        .collect();
    // sanity: Gram of the relabelled simple roots matches the standard model
    let sg = ade_type.standard_gram();
    for i in 0..n {
        for j in 0..n {
            let want = i64::try_from(&sg[(i, j)]).unwrap();
            if pairing(&simple_roots[i], &simple_roots[j]) != want {
                return Err(AdeError::NotAde("canonical relabelling failed".into()));
            }
        }
    }
    Ok(RootBasis { ade_type, simple_roots, edges })
}

fn walk_path(start: usize, adj: &[Vec<bool>], nodes: &[usize]) -> Vec<usize> {
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next: Vec<usize> = nodes
            .iter()
            .cloned()
            .filter(|&v| adj[cur][v] && v != prev)
            .collect();
        if next.is_empty() {
            break;
        }
        order.push(next[0]);
        prev = cur;
        cur = next[0];
    }
    order
}

/// All graph automorphisms of the Dynkin diagram of `t` as permutations of
/// the canonical node labels (includes permutations of equal components).
pub fn diagram_automorphisms(t: &ADEType) -> Vec<Perm> {
    let n = t.rank();
    let mut adj = vec![vec![false; n]; n];
    let mut off = 0usize;
    let mut comp_of = vec![0usize; n];
    for (ci, c) in t.components.iter().enumerate() {
        for (i, j) in c.edges() {
            adj[off + i][off + j] = true;
            adj[off + j][off + i] = true;
        }
        for i in 0..c.rank {
            comp_of[off + i] = ci;
        }
        off += c.rank;
    }
    let deg: Vec<usize> = (0..n).map(|v| (0..n).filter(|&u| adj[v][u]).count()).collect();
    // vertices may only map within isomorphic components; prune by degree
    let comp_key: Vec<ADEComponent> = comp_of.iter().map(|&ci| t.components[ci]).collect();
    let mut out = Vec::new();
    let mut img = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn rec(
        v: usize,
        n: usize,
        adj: &[Vec<bool>],
        deg: &[usize],
        comp_key: &[ADEComponent],
        img: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Perm>,
    ) {
        if v == n {
            out.push(Perm { img: img.iter().map(|&x| x as u32).collect() });
            return;
        }
        for w in 0..n {
            if used[w] || deg[w] != deg[v] || comp_key[w] != comp_key[v] {
                continue;
            }
            // adjacency consistency with already-assigned vertices
            if (0..v).any(|u| adj[v][u] != adj[w][img[u]]) {
                continue;
            }
            img[v] = w;
            used[w] = true;
            rec(v + 1, n, adj, deg, comp_key, img, used, out);
            used[w] = false;
            img[v] = usize::MAX;
        }
    }
    rec(0, n, &adj, &deg, &comp_key, &mut img, &mut used, &mut out);
    out
}

/// Lemma roots-mod2 check: Φ⁺ → R/2R is injective for the standard model.
pub fn roots_mod2_injective(t: &ADEType) -> bool {
    let gram = t.standard_gram();
    let roots = vectors_of_norm(&gram, -2);
    let mut seen = std::collections::HashSet::new();
    for r in &roots {
        // one representative per ±pair
        if r.iter().find(|c| !c.is_zero()).map(|c| c.is_negative()).unwrap_or(false) {
            continue;
        }
        let key: Vec<u8> = r.iter().map(|c| c.is_odd() as u8).collect();
        if !seen.insert(key) {
            return false;
        }
    }
    true
}

/// c/d/e constants of the volume formula. Input: for each irreducible
/// component R̃ⱼ of the overlattice R̃, its type and the ADE type of R̃ⱼ ∩ R.
/// Returns (c, d, e): d = 2 iff some (E₈, 2D₄) component pair occurs;
/// e = 2 iff some E₈ component's intersection contains 8 orthogonal roots;
/// c = e/d (so c ∈ {1/2 is impossible: d=2 forces e=2}).
pub fn cde_constants(components: &[(ADEComponent, ADEType)]) -> (u64, u64, u64) {
    let e8 = ADEComponent::new(Family::E, 8);
    let two_d4: ADEType = "2D4".parse().unwrap();
    let mut d = 1u64;
    let mut e = 1u64;
    for (rt, inter) in components {
        if *rt == e8 {
            if *inter == two_d4 {
                d = 2;
            }
            if inter.max_orthogonal_roots() >= 8 {
                e = 2;
            }
        }
    }
    assert!(e >= d, "d = 2 must force e = 2 (2D4 contains 8 orthogonal roots)");
    let c = e / d;
    (c, d, e)
}

/// Longest-element check: computes w₀ on the standard model and reports
/// whether w₀ = −1 (an independent verification of `minus_one_in_weyl`).
pub fn longest_element_is_minus_one(c: &ADEComponent) -> bool {
    let t = ADEType::new(vec![*c]);
    let gram = t.standard_gram();
    let n = c.rank;
    // reflection in simple root eᵢ: x ↦ x + ⟨x, eᵢ⟩ eᵢ (roots have norm −2)
    // track the matrix of w as we sort −ρ into the dominant cone, where ρ is
    // any vector with ⟨ρ, eᵢ⟩ < 0 for all i (interior of the negative cone).
    // Solve gram·ρ = (−1,…,−1): ρ ∈ Q^n; scale to integers.
    let ones: Vec<crate::Rat> = (0..n)
        .map(|_| crate::Rat::from(crate::Int::from(-1)))
        .collect();
    let rho_rat = crate::exact_linalg::solve_rational(&gram, &ones).expect("gram invertible");
    let rho = crate::exact_linalg::primitive_from_rational(&rho_rat);
    let mut v: Vec<crate::Int> = rho.iter().map(|x| -x.clone()).collect();
    let mut w = IntMatrix::identity(n);
    loop {
        // find simple root with ⟨v, eᵢ⟩ > 0 scaled suitably: we need v moved
        // into the chamber where all ⟨v, eᵢ⟩ ≤ 0 like ρ itself
        let gv = gram.mul_vec(&v);
        match (0..n).find(|&i| gv[i].is_positive()) {
            None => break,
            Some(i) => {
                // apply sᵢ to v and record it in w
                let coef = gv[i].clone();
                v[i] = &v[i] + &coef; // eᵢ has a single coordinate in this basis
                let mut refl = IntMatrix::identity(n);
                // sᵢ matrix: x ↦ x + ⟨x,eᵢ⟩eᵢ; column action on coordinates:
                // (sᵢ x)ⱼ = xⱼ + δᵢⱼ Σₖ gram[i][k] xₖ
                for k in 0..n {
                    refl[(i, k)] = &refl[(i, k)] + &gram[(i, k)];
                }
                w = refl.mul(&w);
            }
        }
    }
    // w(−ρ) should equal ρ
    let check = w.mul_vec(&rho.iter().map(|x| -x.clone()).collect::<Vec<_>>());
    assert_eq!(check, rho, "longest element did not sort −ρ to ρ");
    let mut minus_id = IntMatrix::identity(n);
    for i in 0..n {
        minus_id[(i, i)] = crate::Int::from(-1);
    }
    w == minus_id
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> ADEType {
        s.parse().unwrap()
    }

    #[test]
    fn parse_format_roundtrip() {
        for s in ["E8+A1", "4A1", "A3+2A1", "2D4", "E6", "D5", "A5+A1", "2A2+A1", "0"] {
            assert_eq!(t(s).to_string(), s);
        }
        assert_eq!(t("A1+E8").to_string(), "E8+A1");
        assert!("B2".parse::<ADEType>().is_err());
        assert!("D3".parse::<ADEType>().is_err());
        assert!("E9".parse::<ADEType>().is_err());
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(t("A1").weyl_order(), 2u32.into());
        assert_eq!(t("E6").weyl_order(), 51840u32.into());
        assert_eq!(t("D5").weyl_order(), 1920u32.into());
        assert_eq!(t("4A1").weyl_order(), 16u32.into());
        assert_eq!(t("E7").weyl_order(), 2903040u32.into());
        assert_eq!(t("E8").weyl_order(), 696729600u32.into());
        assert_eq!(t("A8").weyl_order(), 362880u32.into());
        assert_eq!(t("D8").weyl_order(), (128u64 * 40320).into());
    }

    #[test]
    fn standard_models_root_counts_and_dets() {
        for s in ["A1", "A2", "A3", "A7", "D4", "D5", "D8", "E6", "E7", "E8"] {
            let ty = t(s);
            let g = ty.standard_gram();
            let roots = vectors_of_norm(&g, -2);
            assert_eq!(roots.len(), ty.num_roots(), "root count for {}", s);
            let want_det: i64 = ty.components.iter().map(|c| c.determinant()).product();
            let sign = if ty.rank() % 2 == 0 { 1 } else { -1 };
            assert_eq!(g.det(), crate::Int::from(sign * want_det), "det for {}", s);
        }
    }

    #[test]
    fn classify_roundtrip() {
        for s in [
            "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "D4", "D5", "D6", "D7",
            "D8", "E6", "E7", "E8", "4A1", "E8+A1", "2D4", "A3+2A1", "A5+A1",
        ] {
            let ty = t(s);
            let rb = classify(&ty.standard_gram()).unwrap();
            assert_eq!(rb.ade_type, ty, "classify round trip for {}", s);
            assert_eq!(rb.simple_roots.len(), ty.rank());
        }
    }

    #[test]
    fn classify_d4_from_even_coordinate_model() {
        // {x ∈ Z⁴ : Σxᵢ even}, negated: basis e1−e2, e2−e3, e3−e4, e3+e4
        // Gram entries −(bᵢ·bⱼ)
        let basis: Vec<Vec<i64>> = vec![
            vec![1, -1, 0, 0],
            vec![0, 1, -1, 0],
            vec![0, 0, 1, -1],
            vec![0, 0, 1, 1],
        ];
        let mut g = IntMatrix::zero(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let dot: i64 = (0..4).map(|k| basis[i][k] * basis[j][k]).sum();
                g[(i, j)] = crate::Int::from(-dot);
            }
        }
        let rb = classify(&g).unwrap();
        assert_eq!(rb.ade_type, t("D4"));
    }

    #[test]
    fn classify_rejects_non_root_lattices() {
        // (−4): no roots at all
        let g = IntMatrix::from_rows(&[vec![-4]]);
        assert!(classify(&g).is_err());
        // A1(2): root sublattice proper
        let g2 = IntMatrix::from_rows(&[vec![-4, 0], vec![0, -2]]);
        assert!(classify(&g2).is_err());
    }

    #[test]
    fn diagram_automorphism_orders() {
        assert_eq!(diagram_automorphisms(&t("E8")).len(), 1);
        assert_eq!(diagram_automorphisms(&t("A2")).len(), 2);
        assert_eq!(diagram_automorphisms(&t("D4")).len(), 6);
        assert_eq!(diagram_automorphisms(&t("2D4")).len(), 72);
        assert_eq!(diagram_automorphisms(&t("4A1")).len(), 24);
        assert_eq!(diagram_automorphisms(&t("E8+A1")).len(), 1);
        assert_eq!(diagram_automorphisms(&t("A3+2A1")).len(), 4);
        // counts agree with the closed-form order
        for s in ["E8", "A2", "D4", "2D4", "4A1", "A3+2A1", "E6", "A5+A1"] {
            assert_eq!(
                BigUint::from(diagram_automorphisms(&t(s)).len() as u64),
                t(s).diagram_aut_order(),
                "order formula for {}",
                s
            );
        }
    }

    #[test]
    fn roots_mod2_lemma() {
        for s in ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "D4", "D5", "D6",
                  "D7", "D8", "E6", "E7", "E8"] {
            assert!(roots_mod2_injective(&t(s)), "roots mod 2 for {}", s);
        }
    }

    #[test]
    fn cde_examples() {
        let e6 = ADEComponent::new(Family::E, 6);
        let e8 = ADEComponent::new(Family::E, 8);
        let a1 = ADEComponent::new(Family::A, 1);
        // R = R̃ = E6
        assert_eq!(cde_constants(&[(e6, t("E6"))]), (1, 1, 1));
        // R = R̃ = E8 + A1
        assert_eq!(cde_constants(&[(e8, t("E8")), (a1, t("A1"))]), (2, 1, 2));
        // R of type 2D4 inside R̃ = E8
        assert_eq!(cde_constants(&[(e8, t("2D4"))]), (1, 2, 2));
    }

    #[test]
    fn kernel_o0_vs_w_counts() {
        assert_eq!(t("A2").kernel_o0_vs_w(), 1u32.into());
        assert_eq!(t("E8").kernel_o0_vs_w(), 1u32.into());
        assert_eq!(t("2E8").kernel_o0_vs_w(), 2u32.into());
        assert_eq!(t("2E8+A1").kernel_o0_vs_w(), 2u32.into());
    }

    #[test]
    fn minus_one_table_via_longest_element() {
        let mut comps = Vec::new();
        for n in 1..=8 {
            comps.push(ADEComponent::new(Family::A, n));
        }
        for n in 4..=8 {
            comps.push(ADEComponent::new(Family::D, n));
        }
        for n in 6..=8 {
            comps.push(ADEComponent::new(Family::E, n));
        }
        for c in comps {
            assert_eq!(
                longest_element_is_minus_one(&c),
                c.minus_one_in_weyl(),
                "−1 ∈ W for {}",
                c
            );
        }
    }
}
