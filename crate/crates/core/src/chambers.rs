//! Chambers in the positive half-cone of a hyperbolic lattice: the Vinberg
//! chamber of L₁₀, induced chambers with finite wall lists, adjacency,
//! codimension-2 faces, isotropic rays with their affine ADE types,
//! chamber stabilizers, and counting Vinberg chambers inside a region.
//! Also the mod-2 reduction image of O⁺(L₁₀) (Barth–Peters index) and the
//! isotropic-class count in L₁₀ ⊗ F₂.

use crate::ade::{ADEComponent, ADEType, Family};
use crate::exact_linalg::{extreme_rays, nonredundant_walls, primitive_part, IntMatrix};
use crate::lattices::Lattice;
use crate::permgroup::{El, Perm, PermGroup};
use crate::{Int, Rat};
use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::{HashMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChamberError {
    #[error("wall is not a wall of the chamber")]
    NotAWall,
    #[error("matrix is not an isometry of the ambient lattice")]
    NotIsometry,
    #[error("isometry does not preserve the positive half-cone")]
    NotPositive,
    #[error("chamber walls do not span the ambient lattice")]
    WallsNotSpanning,
    #[error("budget exceeded; partial count {partial}")]
    Budget { partial: u64 },
    #[error("no Vinberg chamber inside the region could be located")]
    EmptyRegion,
}

/// A chamber in the positive half-cone: finitely many wall roots,
/// sign-normalized to be ≥ 0 on the interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub ambient: Lattice,
    pub walls: Vec<Vec<Int>>,
    pub interior: Vec<Int>,
    /// optional volume in Vinberg-chamber units
    pub volume: Option<Int>,
}

impl Chamber {
    pub fn new(ambient: Lattice, walls: Vec<Vec<Int>>, interior: Vec<Int>) -> Self {
        assert!(
            ambient.norm(&interior).is_positive(),
            "interior must have positive norm"
        );
        for w in &walls {
            assert!(
                ambient.inner(&interior, w).is_positive(),
                "interior must be strictly positive on every wall"
            );
        }
        Chamber { ambient, walls, interior, volume: None }
    }

    /// Keep only facet-defining walls (used when a wall list may contain
    /// redundant inequalities).
    pub fn from_inequalities(
        ambient: Lattice,
        walls: Vec<Vec<Int>>,
        interior: Vec<Int>,
    ) -> Self {
        let ineqs: Vec<Vec<Int>> = walls.iter().map(|w| ambient.gram.mul_vec(w)).collect();
        let kept = nonredundant_walls(&ineqs, &interior).expect("interior not strict");
        let kept_set: HashSet<Vec<Int>> = kept.into_iter().collect();
        let walls = walls
            .into_iter()
            .filter(|w| kept_set.contains(&ambient.gram.mul_vec(w)))
            .collect();
        Chamber::new(ambient, walls, interior)
    }

    /// Chambers are identified by their sorted primitive wall lists.
    pub fn canonical_key(&self) -> Vec<Vec<Int>> {
        let mut k: Vec<Vec<Int>> = self.walls.iter().map(|w| primitive_part(w)).collect();
        k.sort();
        k
    }

    /// Exact facet check: every listed wall supports a codimension-1 face.
    pub fn validate_facets(&self) -> bool {
        let n = self.ambient.rank();
        let rays = match self.extreme_rays_cached() {
            Ok(r) => r,
            Err(_) => return false,
        };
        self.walls.iter().all(|w| {
            let on: Vec<&Vec<Int>> = rays
                .iter()
                .filter(|r| self.ambient.inner(r, w).is_zero())
                .collect();
            rank_of(&on, n) == n - 1
        })
    }

    fn extreme_rays_cached(&self) -> Result<Vec<Vec<Int>>, crate::exact_linalg::PolyhedralError> {
        let ineqs: Vec<Vec<Int>> =
            self.walls.iter().map(|w| self.ambient.gram.mul_vec(w)).collect();
        extreme_rays(&ineqs, self.ambient.rank())
    }
}

fn rank_of(vecs: &[&Vec<Int>], _cols: usize) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Int>> = vecs.iter().map(|v| (*v).clone()).collect();
    IntMatrix::from_big_rows(&rows).rank()
}

/// Reflection in a root r (⟨r,r⟩ = −2): x ↦ x + ⟨x,r⟩·r, as a row-matrix.
pub fn reflection_in_root(l: &Lattice, r: &[Int]) -> IntMatrix {
    assert_eq!(l.norm(r), Int::from(-2), "reflection needs a (−2)-root");
    let n = l.rank();
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        let basis_i: Vec<Int> = (0..n)
            .map(|j| if i == j { Int::one() } else { Int::zero() })
            .collect();
        let c = l.inner(&basis_i, r);
        for k in 0..n {
            let add = &c * &r[k];
            m[(i, k)] = &m[(i, k)] + add;
        }
    }
    m
}

/// The E₁₀ Gram matrix on the basis e₁…e₁₀ of Fig. 1: chain e₂–e₃–…–e₁₀
/// with e₁ attached to e₄.
pub fn e10_gram() -> IntMatrix {
    let mut g = IntMatrix::zero(10, 10);
    for i in 0..10 {
        g[(i, i)] = Int::from(-2);
    }
    let mut link = |a: usize, b: usize| {
        g[(a - 1, b - 1)] = Int::one();
        g[(b - 1, a - 1)] = Int::one();
    };
    for i in 2..10 {
        link(i, i + 1);
    }
    link(1, 4);
    g
}

/// The roots e₁…e₁₀ of L₁₀ (in the U ⊕ E₈ coordinates of `l10()`)
/// realizing the E₁₀ diagram of Fig. 1.
pub fn e10_basis() -> IntMatrix {
    let l = crate::lattices::l10();
    // E₈ simple roots occupy coordinates 2..=9; in the canonical E-family
    // labeling the long path is f₀–f₁–…–f₆ with f₇ attached to f₂, so the
    // branch arms at f₂ are {f₁,f₀} (length 2), {f₇} (length 1),
    // {f₃..f₆} (length 4).
    let unit = |i: usize| -> Vec<Int> {
        (0..10).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()
    };
    // highest root θ of the E₈ block: the unique (−2)-vector with
    // ⟨θ, f₆⟩ = −1 and ⟨θ, fᵢ⟩ = 0 otherwise (f₆ ends the long arm)
    let e8: ADEType = "E8".parse().unwrap();
    let ge8 = e8.standard_gram();
    let mut c = vec![Rat::zero(); 8];
    c[6] = Rat::from(Int::from(-1));
    let theta = crate::exact_linalg::solve_rational(&ge8, &c).expect("E8 gram invertible");
    let theta: Vec<Int> = theta
        .iter()
        .map(|x| {
            assert!(x.is_integer());
            x.to_integer()
        })
        .collect();
    // e₉ = u − θ, e₁₀ = v − u with U basis u, v at coordinates 0, 1
    let mut e9 = vec![Int::one(), Int::zero()];
    e9.extend(theta.iter().map(|x| -x));
    let mut e10v = vec![Int::from(-1), Int::one()];
    e10v.extend(std::iter::repeat(Int::zero()).take(8));
    let rows: Vec<Vec<Int>> = vec![
        unit(9),  // e₁ = f₇ (branch leaf at e₄)
        unit(2),  // e₂ = f₀
        unit(3),  // e₃ = f₁
        unit(4),  // e₄ = f₂ (branch node)
        unit(5),  // e₅ = f₃
        unit(6),  // e₆ = f₄
        unit(7),  // e₇ = f₅
        unit(8),  // e₈ = f₆
        e9,       // e₉ = u − θ
        e10v,     // e₁₀ = v − u
    ];
    let b = IntMatrix::from_big_rows(&rows);
    debug_assert_eq!(b.mul(&l.gram).mul(&b.transpose()), e10_gram());
    b
}

/// The Vinberg chamber of L₁₀: walls e₁…e₁₀, interior Σeᵢ∨.
pub fn vinberg_chamber() -> Chamber {
    let l = crate::lattices::l10();
    let b = e10_basis();
    let walls: Vec<Vec<Int>> = (0..10).map(|i| b.row(i)).collect();
    // interior = Σ eᵢ∨: solve basis·gram·x = (1,…,1) and map back
    let m = b.mul(&l.gram);
    let ones = vec![Rat::one(); 10];
    let x = crate::exact_linalg::solve_rational(&m, &ones).unwrap();
    // x are coordinates of the interior point in the ambient basis; the
    // E₁₀ Gram is unimodular, so they are integers
    let interior: Vec<Int> = x
        .iter()
        .map(|v| {
            assert!(v.is_integer());
            v.to_integer()
        })
        .collect();
    Chamber::new(l, walls, interior)
}

/// Map a chamber by an isometry g of the ambient lattice (row action).
pub fn map_chamber(d: &Chamber, g: &IntMatrix) -> Result<Chamber, ChamberError> {
    let gr = &d.ambient.gram;
    if g.mul(gr).mul(&g.transpose()) != *gr {
        return Err(ChamberError::NotIsometry);
    }
    let interior = g.transpose().mul_vec(&d.interior);
    // O⁺ check: image of a positive-norm vector stays in the same cone
    if !d.ambient.inner(&interior, &d.interior).is_positive() {
        return Err(ChamberError::NotPositive);
    }
    let walls = d.walls.iter().map(|w| g.transpose().mul_vec(w)).collect();
    let mut out = Chamber::new(d.ambient.clone(), walls, interior);
    out.volume = d.volume.clone();
    Ok(out)
}

/// The chamber across `wall` together with the reflection used.
pub fn adjacent_chamber(
    d: &Chamber,
    wall: &[Int],
) -> Result<(Chamber, IntMatrix), ChamberError> {
    if !d.walls.iter().any(|w| w[..] == wall[..]) {
        return Err(ChamberError::NotAWall);
    }
    let s = reflection_in_root(&d.ambient, wall);
    let mut d2 = map_chamber(d, &s)?;
    d2.volume = d.volume.clone();
    Ok((d2, s))
}

/// A codimension-2 face of a chamber.
#[derive(Debug, Clone)]
pub struct FaceRecord {
    pub wall_indices: (usize, usize),
    pub codimension: usize,
    pub ade_type: ADEType,
}

/// All codimension-2 faces, typed by the pairing of the two wall roots
/// (0 → 2A₁, 1 → A₂).
pub fn faces_codim2(d: &Chamber) -> Vec<FaceRecord> {
    let n = d.ambient.rank();
    let rays = d.extreme_rays_cached().expect("chamber cone must be pointed");
    let mut out = Vec::new();
    for i in 0..d.walls.len() {
        for j in (i + 1)..d.walls.len() {
            let on: Vec<&Vec<Int>> = rays
                .iter()
                .filter(|r| {
                    d.ambient.inner(r, &d.walls[i]).is_zero()
                        && d.ambient.inner(r, &d.walls[j]).is_zero()
                })
                .collect();
            if rank_of(&on, n) == n - 2 {
                let p = d.ambient.inner(&d.walls[i], &d.walls[j]);
                let t = if p.is_zero() {
                    "2A1".parse().unwrap()
                } else if p.is_one() {
                    "A2".parse().unwrap()
                } else {
                    panic!("wall roots of a common face must pair in {{0,1}}");
                };
                out.push(FaceRecord {
                    wall_indices: (i, j),
                    codimension: 2,
                    ade_type: t,
                });
            }
        }
    }
    out
}

/// A primitive isotropic ray in the closure of a chamber.
#[derive(Debug, Clone)]
pub struct IsotropicRayRecord {
    pub generator: Vec<Int>,
    /// affine ADE type of the incident wall roots, named by the
    /// underlying finite components (e.g. "8A1" = eight Ã₁'s)
    pub affine_type: ADEType,
}

/// All primitive isotropic extreme rays of the chamber, with affine type.
pub fn isotropic_rays(d: &Chamber) -> Vec<IsotropicRayRecord> {
    let rays = d.extreme_rays_cached().expect("chamber cone must be pointed");
    let mut out = Vec::new();
    for r in rays {
        if !d.ambient.norm(&r).is_zero() {
            continue;
        }
        let incident: Vec<&Vec<Int>> = d
            .walls
            .iter()
            .filter(|w| d.ambient.inner(&r, w).is_zero())
            .collect();
        let affine_type = affine_type_of(&d.ambient, &incident);
        out.push(IsotropicRayRecord { generator: primitive_part(&r), affine_type });
    }
    out.sort_by(|a, b| a.generator.cmp(&b.generator));
    out
}

/// Classify a set of roots (all orthogonal to a common isotropic ray) as a
/// multiset of affine ADE diagrams, returned under the finite type names.
fn affine_type_of(l: &Lattice, roots: &[&Vec<Int>]) -> ADEType {
    let m = roots.len();
    let pair =
        |i: usize, j: usize| -> Int { l.inner(roots[i], roots[j]) };
    // connected components of the pairing graph
    let mut comp = vec![usize::MAX; m];
    let mut ncomp = 0;
    for s in 0..m {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = ncomp;
        while let Some(x) = stack.pop() {
            for y in 0..m {
                if comp[y] == usize::MAX && !pair(x, y).is_zero() {
                    comp[y] = ncomp;
                    stack.push(y);
                }
            }
        }
        ncomp += 1;
    }
    let mut comps = Vec::new();
    for c in 0..ncomp {
        let verts: Vec<usize> = (0..m).filter(|&i| comp[i] == c).collect();
        comps.push(affine_component(l, roots, &verts));
    }
    ADEType::new(comps)
}

fn affine_component(l: &Lattice, roots: &[&Vec<Int>], verts: &[usize]) -> ADEComponent {
    let m = verts.len();
    let pair = |a: usize, b: usize| -> i64 {
        l.inner(roots[verts[a]], roots[verts[b]])
            .to_i64()
            .expect("pairing fits i64")
    };
    // Gram must be singular (affine diagrams are corank-1)
    let gram_rows: Vec<Vec<Int>> = (0..m)
        .map(|a| (0..m).map(|b| Int::from(pair(a, b))).collect())
        .collect();
    let gram = IntMatrix::from_big_rows(&gram_rows);
    assert!(gram.det().is_zero(), "incident roots must form affine diagrams");
    // Ã₁: two roots pairing with value 2
    if m == 2 {
        assert_eq!(pair(0, 1), 2, "rank-2 affine component must be Ã₁");
        return ADEComponent::new(Family::A, 1);
    }
    let deg: Vec<usize> = (0..m)
        .map(|a| (0..m).filter(|&b| b != a && pair(a, b) != 0).count())
        .collect();
    for a in 0..m {
        for b in (a + 1)..m {
            assert!(
                (0..=1).contains(&pair(a, b)),
                "affine diagram edges must have pairing 0 or 1 (beyond Ã₁)"
            );
        }
    }
    let n_deg3 = deg.iter().filter(|&&d| d >= 3).count();
    if n_deg3 == 0 {
        // every vertex degree 2 → cycle Ãₙ, n = m − 1
        assert!(deg.iter().all(|&d| d == 2), "degree-≤2 affine graph must be a cycle");
        return ADEComponent::new(Family::A, m - 1);
    }
    if deg.iter().any(|&d| d == 4) {
        // D̃₄: star with four leaves
        assert_eq!(m, 5);
        return ADEComponent::new(Family::D, 4);
    }
    if n_deg3 == 2 {
        // D̃ₙ (n ≥ 5): chain with forks at both ends, m = n + 1
        return ADEComponent::new(Family::D, m - 1);
    }
    // single degree-3 vertex: Ẽ₆ (arms 2,2,2), Ẽ₇ (1,3,3), Ẽ₈ (1,2,5)
    let center = (0..m).find(|&a| deg[a] == 3).unwrap();
    let mut arms: Vec<usize> = (0..m)
        .filter(|&a| a != center && pair(center, a) != 0)
        .map(|start| {
            // walk away from center
            let mut len = 1;
            let mut prev = center;
            let mut cur = start;
            loop {
                let next = (0..m).find(|&x| x != prev && x != cur && pair(cur, x) != 0);
                match next {
                    Some(x) => {
                        prev = cur;
                        cur = x;
                        len += 1;
                    }
                    None => break,
                }
            }
            len
        })
        .collect();
    arms.sort_unstable();
    match arms[..] {
        [2, 2, 2] => ADEComponent::new(Family::E, 6),
        [1, 3, 3] => ADEComponent::new(Family::E, 7),
        [1, 2, 5] => ADEComponent::new(Family::E, 8),
        _ => panic!("not an affine ADE diagram: arms {:?}", arms),
    }
}

/// The stabilizer O(L, D) of a chamber: isometries permuting the wall set.
pub struct ChamberSymmetries {
    /// generating isometries (ambient row-matrices)
    pub gens: Vec<IntMatrix>,
    /// the same generators as permutations of `walls`
    pub gen_perms: Vec<Perm>,
    pub group: PermGroup<()>,
    pub order: BigUint,
}

impl ChamberSymmetries {
    pub fn transitive_on_walls(&self) -> bool {
        self.group.orbit_of(0).len() == self.group.degree()
    }
}

/// Compute O(L, D) by Gram-respecting backtracking over the images of a
/// spanning subset of walls; remaining wall images are forced by pairings.
pub fn chamber_stabilizer(d: &Chamber) -> Result<ChamberSymmetries, ChamberError> {
    let n = d.ambient.rank();
    let nw = d.walls.len();
    let wall_mat = IntMatrix::from_big_rows(&d.walls);
    if wall_mat.rank() < n {
        return Err(ChamberError::WallsNotSpanning);
    }
    // choose the first independent spanning subset as the basis
    let mut basis_idx = Vec::new();
    let mut chosen: Vec<Vec<Int>> = Vec::new();
    for (i, w) in d.walls.iter().enumerate() {
        chosen.push(w.clone());
        if IntMatrix::from_big_rows(&chosen).rank() == chosen.len() {
            basis_idx.push(i);
            if basis_idx.len() == n {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    let b = IntMatrix::from_big_rows(&chosen);
    let b_inv = b.rational_inverse().expect("basis walls invertible");
    // pairing table in i64
    let p: Vec<Vec<i64>> = (0..nw)
        .map(|i| {
            (0..nw)
                .map(|j| {
                    d.ambient
                        .inner(&d.walls[i], &d.walls[j])
                        .to_i64()
                        .expect("pairing fits i64")
                })
                .collect()
        })
        .collect();
    let mut group: PermGroup<()> = PermGroup::new(nw, Vec::new(), (), &[]);
    let mut gens: Vec<IntMatrix> = Vec::new();
    let mut gen_perms: Vec<Perm> = Vec::new();
    let mut order: u64 = 0;
    // backtracking over images of basis walls
    let mut img = vec![0usize; n];
    let mut stack_depth = 0usize;
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); n];
    candidates[0] = (0..nw)
        .filter(|&j| p[j][j] == p[basis_idx[0]][basis_idx[0]])
        .collect();
    let mut cand_pos = vec![0usize; n];
    loop {
        if cand_pos[stack_depth] >= candidates[stack_depth].len() {
            if stack_depth == 0 {
                break;
            }
            stack_depth -= 1;
            cand_pos[stack_depth] += 1;
            continue;
        }
        let j = candidates[stack_depth][cand_pos[stack_depth]];
        img[stack_depth] = j;
        // pairing consistency with earlier assignments
        let bi = basis_idx[stack_depth];
        let ok = (0..stack_depth).all(|k| {
            p[img[k]][j] == p[basis_idx[k]][bi] && p[j][img[k]] == p[bi][basis_idx[k]]
        });
        if !ok {
            cand_pos[stack_depth] += 1;
            continue;
        }
        if stack_depth + 1 < n {
            stack_depth += 1;
            let bnext = basis_idx[stack_depth];
            candidates[stack_depth] = (0..nw)
                .filter(|&x| p[x][x] == p[bnext][bnext])
                .collect();
            cand_pos[stack_depth] = 0;
            continue;
        }
        // full assignment: derive the wall permutation from pairings
        if let Some(perm) = derive_wall_perm(&p, &basis_idx, &img) {
            order += 1;
            if !group.contains(&perm) {
                // reconstruct the matrix and verify it is an isometry
                if let Some(g) = matrix_from_images(d, &b_inv, &img) {
                    group =
                        rebuilt_with(&group, El { p: perm.clone(), s: () });
                    gens.push(g);
                    gen_perms.push(perm);
                } else {
                    // pairing-consistent but not induced by an isometry
                    order -= 1;
                }
            }
        }
        cand_pos[stack_depth] += 1;
    }
    let order_big = group.order();
    assert_eq!(
        order_big,
        BigUint::from(order),
        "solution count must equal the group order"
    );
    Ok(ChamberSymmetries { gens, gen_perms, group, order: order_big })
}

fn rebuilt_with(g: &PermGroup<()>, el: El<()>) -> PermGroup<()> {
    let mut gens = g.gens.clone();
    gens.push(el);
    PermGroup::new(g.degree(), gens, (), &[])
}

/// Given images of the basis walls, find the unique wall permutation with
/// matching pairings, if any.
fn derive_wall_perm(p: &[Vec<i64>], basis_idx: &[usize], img: &[usize]) -> Option<Perm> {
    let nw = p.len();
    // key of wall x against the image tuple
    let mut by_key: HashMap<Vec<i64>, usize> = HashMap::new();
    for x in 0..nw {
        let key: Vec<i64> = img.iter().map(|&j| p[x][j]).collect();
        if by_key.insert(key, x).is_some() {
            // two walls share a pairing profile against the images:
            // walls span, so profiles must be unique — inconsistent
            return None;
        }
    }
    let mut perm = vec![u32::MAX; nw];
    let mut seen = vec![false; nw];
    for a in 0..nw {
        let key: Vec<i64> = basis_idx.iter().map(|&bk| p[a][bk]).collect();
        let target = *by_key.get(&key)?;
        if seen[target] {
            return None;
        }
        seen[target] = true;
        perm[a] = target as u32;
    }
    Some(Perm { img: perm })
}

/// Reconstruct the ambient matrix sending basis walls to their images;
/// `None` if it is not an integral isometry preserving the wall set.
fn matrix_from_images(
    d: &Chamber,
    b_inv: &[Vec<Rat>],
    img: &[usize],
) -> Option<IntMatrix> {
    let n = d.ambient.rank();
    let bimg = IntMatrix::from_big_rows(
        &img.iter().map(|&j| d.walls[j].clone()).collect::<Vec<_>>(),
    );
    // g = B⁻¹·B_img (rows transform as w·g)
    let mut g = IntMatrix::zero(n, n);
    for i in 0..n {
        for k in 0..n {
            let mut acc = Rat::zero();
            for t in 0..n {
                acc += &b_inv[i][t] * Rat::from(bimg[(t, k)].clone());
            }
            if !acc.is_integer() {
                return None;
            }
            g[(i, k)] = acc.to_integer();
        }
    }
    let gr = &d.ambient.gram;
    if g.mul(gr).mul(&g.transpose()) != *gr {
        return None;
    }
    // wall-set closure
    let wall_set: HashSet<Vec<Int>> = d.walls.iter().cloned().collect();
    for w in &d.walls {
        if !wall_set.contains(&g.transpose().mul_vec(w)) {
            return None;
        }
    }
    Some(g)
}

/// Exact number of Vinberg chambers contained in `d` (a region in L₁₀),
/// by BFS over the Vinberg tessellation.
pub fn count_vinberg_chambers(d: &Chamber, budget: u64) -> Result<u64, ChamberError> {
    let v0 = vinberg_chamber();
    assert_eq!(d.ambient, v0.ambient, "region must live in L₁₀");
    let gram: Vec<Vec<i128>> = d
        .ambient
        .gram
        .to_i64_rows()
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let inner = |a: &[i128], b: &[i128]| -> i128 {
        let mut s: i128 = 0;
        for i in 0..a.len() {
            let mut t: i128 = 0;
            for j in 0..b.len() {
                t = t
                    .checked_add(gram[i][j].checked_mul(b[j]).expect("overflow"))
                    .expect("overflow");
            }
            s = s.checked_add(a[i].checked_mul(t).expect("overflow")).expect("overflow");
        }
        s
    };
    let to128 = |v: &[Int]| -> Vec<i128> {
        v.iter().map(|x| i128::try_from(x).expect("fits i128")).collect()
    };
    let d_walls: Vec<Vec<i128>> = d.walls.iter().map(|w| to128(w)).collect();
    let mut walls: Vec<Vec<i128>> = v0.walls.iter().map(|w| to128(w)).collect();
    let mut interior: Vec<i128> = to128(&v0.interior);
    let target = to128(&d.interior);
    // reflect across wall r: x ↦ x + ⟨x,r⟩·r
    let reflect = |x: &[i128], r: &[i128]| -> Vec<i128> {
        let c = inner(x, r);
        x.iter()
            .zip(r)
            .map(|(xi, ri)| {
                xi.checked_add(c.checked_mul(*ri).expect("overflow")).expect("overflow")
            })
            .collect()
    };
    // walk the Vinberg chamber toward the region's interior point
    let mut guard = 0u32;
    loop {
        let bad = walls.iter().position(|w| inner(&target, w) < 0);
        match bad {
            Some(i) => {
                let r = walls[i].clone();
                interior = reflect(&interior, &r);
                walls = walls.iter().map(|w| reflect(w, &r)).collect();
            }
            None => break,
        }
        guard += 1;
        assert!(guard < 100_000, "walk toward region did not terminate");
    }
    let inside =
        |p: &[i128]| -> bool { d_walls.iter().all(|w| inner(p, w) > 0) };
    if !inside(&interior) {
        return Err(ChamberError::EmptyRegion);
    }
    let mut visited: HashSet<Vec<i128>> = HashSet::new();
    visited.insert(interior.clone());
    let mut queue: VecDeque<(Vec<Vec<i128>>, Vec<i128>)> = VecDeque::new();
    queue.push_back((walls, interior));
    let mut count: u64 = 0;
    while let Some((w, a)) = queue.pop_front() {
        count += 1;
        if count > budget {
            return Err(ChamberError::Budget { partial: count - 1 });
        }
        for r in &w {
            let a2 = reflect(&a, r);
            if !inside(&a2) || visited.contains(&a2) {
                continue;
            }
            visited.insert(a2.clone());
            let w2: Vec<Vec<i128>> = w.iter().map(|x| reflect(x, r)).collect();
            queue.push_back((w2, a2));
        }
    }
    Ok(count)
}

/// Order of the image of O⁺(L₁₀) → O(L₁₀ ⊗ F₂): the group generated by
/// the ten simple reflections mod 2 (O⁺(L₁₀) = W(L₁₀)), acting on the
/// 1024 classes of F₂¹⁰.
pub fn bp_image_order() -> BigUint {
    let l = crate::lattices::l10();
    let gram = l.gram.to_i64_rows();
    let b = e10_basis().to_i64_rows();
    let n = 10usize;
    let decode = |m: usize| -> Vec<i64> { (0..n).map(|i| ((m >> i) & 1) as i64).collect() };
    let encode = |v: &[i64]| -> usize {
        (0..n).fold(0, |acc, i| acc | (((v[i].rem_euclid(2)) as usize) << i))
    };
    let inner = |a: &[i64], b2: &[i64]| -> i64 {
        let mut s = 0;
        for i in 0..n {
            for j in 0..n {
                s += a[i] * gram[i][j] * b2[j];
            }
        }
        s
    };
    let gens: Vec<El<()>> = b
        .iter()
        .map(|e| {
            let img: Vec<u32> = (0..1 << n)
                .map(|m| {
                    let x = decode(m);
                    let c = inner(&x, e);
                    let y: Vec<i64> =
                        (0..n).map(|i| x[i] + c * e[i]).collect();
                    encode(&y) as u32
                })
                .collect();
            El { p: Perm { img }, s: () }
        })
        .collect();
    let g: PermGroup<()> = PermGroup::new(1 << n, gens, (), &[]);
    g.order()
}

/// Number of nonzero isotropic classes of the quadratic form
/// q(x) = ⟨x,x⟩/2 mod 2 on L₁₀ ⊗ F₂.
pub fn isotropic_class_count() -> usize {
    let l = crate::lattices::l10();
    let gram = l.gram.to_i64_rows();
    let n = 10usize;
    let mut count = 0;
    for m in 1usize..(1 << n) {
        let x: Vec<i64> = (0..n).map(|i| ((m >> i) & 1) as i64).collect();
        let mut s = 0i64;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * gram[i][j] * x[j];
            }
        }
        if (s / 2).rem_euclid(2) == 0 {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::l10;

    #[test]
    fn vinberg_chamber_shape() {
        let d = vinberg_chamber();
        assert_eq!(d.walls.len(), 10);
        let b = IntMatrix::from_big_rows(&d.walls);
        assert_eq!(b.mul(&d.ambient.gram).mul(&b.transpose()), e10_gram());
        for w in &d.walls {
            assert!(d.ambient.inner(&d.interior, w).is_one());
        }
        assert!(d.validate_facets());
    }

    #[test]
    fn vinberg_stabilizer_trivial() {
        let d = vinberg_chamber();
        let s = chamber_stabilizer(&d).unwrap();
        assert_eq!(s.order, BigUint::one());
        assert!(s.gens.is_empty());
    }

    #[test]
    fn mapping_and_adjacency() {
        let d = vinberg_chamber();
        let id = IntMatrix::identity(10);
        let d_id = map_chamber(&d, &id).unwrap();
        assert_eq!(d_id.canonical_key(), d.canonical_key());
        // reflect across e₁
        let (d2, s) = adjacent_chamber(&d, &d.walls[0].clone()).unwrap();
        assert_ne!(d2.canonical_key(), d.canonical_key());
        // shared mirror: the reflected wall is −e₁, same mirror
        // double flip returns the original
        let image_wall = s.transpose().mul_vec(&d.walls[0]);
        let (d3, _) = adjacent_chamber(&d2, &image_wall).unwrap();
        assert_eq!(d3.canonical_key(), d.canonical_key());
        // composition property on a few Weyl words
        let s1 = reflection_in_root(&d.ambient, &d.walls[1]);
        let s2 = reflection_in_root(&d.ambient, &d.walls[5]);
        let lhs = map_chamber(&map_chamber(&d, &s1).unwrap(), &s2).unwrap();
        let rhs = map_chamber(&d, &s1.mul(&s2)).unwrap();
        assert_eq!(lhs.canonical_key(), rhs.canonical_key());
    }

    #[test]
    fn vinberg_faces_and_rays() {
        let d = vinberg_chamber();
        let faces = faces_codim2(&d);
        // simplicial cone: all 45 pairs are codim-2 faces; 9 edges of the
        // E₁₀ diagram give A₂, the rest 2A₁
        assert_eq!(faces.len(), 45);
        let a2: ADEType = "A2".parse().unwrap();
        let na2 = faces.iter().filter(|f| f.ade_type == a2).count();
        assert_eq!(na2, 9);
        // exactly one isotropic ray: dual to e₁₀, with affine type Ẽ₈
        let rays = isotropic_rays(&d);
        assert_eq!(rays.len(), 1);
        let e8: ADEType = "E8".parse().unwrap();
        assert_eq!(rays[0].affine_type, e8);
        assert!(d.ambient.norm(&rays[0].generator).is_zero());
    }

    #[test]
    fn vinberg_count_one_and_two() {
        let d = vinberg_chamber();
        assert_eq!(count_vinberg_chambers(&d, 10).unwrap(), 1);
        // the union of the Vinberg chamber and its reflection across e₁
        // is convex: drop the shared mirror, add the reflected walls
        let s = reflection_in_root(&d.ambient, &d.walls[0]);
        let mut walls: Vec<Vec<Int>> = d.walls[1..].to_vec();
        for w in &d.walls[1..] {
            let w2 = s.transpose().mul_vec(w);
            if !walls.contains(&w2) {
                walls.push(w2);
            }
        }
        let a2 = s.transpose().mul_vec(&d.interior);
        let sum: Vec<Int> = d
            .interior
            .iter()
            .zip(&a2)
            .map(|(x, y)| x + y)
            .collect();
        let union = Chamber::from_inequalities(l10(), walls, sum);
        assert_eq!(count_vinberg_chambers(&union, 10).unwrap(), 2);
        // budget trip
        match count_vinberg_chambers(&union, 1) {
            Err(ChamberError::Budget { partial: 1 }) => {}
            other => panic!("expected budget error, got {:?}", other.err()),
        }
    }


    #[test]
    fn isotropic_classes_527() {
        assert_eq!(isotropic_class_count(), 527);
    }

    #[test]
    fn bp_index() {
        let expected = BigUint::parse_bytes(b"46998591897600", 10).unwrap();
        assert_eq!(bp_image_order(), expected);
    }
}
