//! (τ,τ̄)-generic Enriques surface models.
//!
//! A model packages the K3-cover Néron–Severi lattice S_X built from a
//! primitive embedding L10(2) ↪ L26 together with a chosen set of
//! (wall root, (−4)-vector) pairs, the glue data between S_X₊ = π*(S_Y)
//! and S_X₋ ≅ R̃(2), and the finite groups acting on the two discriminant
//! sides.  On top of that sit the splitting test for roots, membership in
//! G_Y (isometries of S_Y that extend to S_X), membership in aut(Y), and
//! the breadth-first orbit computations over the chamber tessellation of
//! Nef_Y: automorphism generators and volume, rational-curve orbits,
//! elliptic-fibration orbits, and RDP-configuration orbits.

use crate::ade::{cde_constants, classify, ADEComponent, ADEType, Family};
use crate::chambers::{
    bp_image_order, chamber_stabilizer, e10_basis, faces_codim2, isotropic_rays,
    reflection_in_root, Chamber, ChamberSymmetries,
};
use crate::data_io::EmbeddingRecord;
use crate::discforms::{perp, reduce_mod, FqfElem, FqfSubgroup};
use crate::exact_linalg::{
    extreme_rays, kernel_basis, solve_integer, solve_rational, vectors_of_norm,
};
use crate::genus::embeds_in_even_unimodular;
use crate::lattices::{
    definite_isometries, discriminant_form, l10, orthogonal_complement, primitive_closure,
    separating_roots, DiscriminantForm, Embedding, Lattice,
};
use crate::orbit_engine::{enumerate, GraphOracle, OrbitError};
use crate::permgroup::{El, Perm, PermGroup};
use crate::{Int, IntMatrix, Rat};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

#[derive(Debug, thiserror::Error)]
pub enum EnriquesError {
    #[error("pair not realizable from this embedding: {0}")]
    NotRealizable(String),
    #[error("not a root of S_Y")]
    NotARoot,
    #[error("element is not in G_Y")]
    NotInGY,
    #[error("orbit budget exceeded ({0} representatives)")]
    Budget(usize),
    #[error("internal: {0}")]
    Internal(String),
}

fn int(x: i64) -> Int {
    Int::from(x)
}

/// Row-vector action: image of `v` under `g` (v ↦ v·g).
fn apply_row(g: &IntMatrix, v: &[Int]) -> Vec<Int> {
    g.transpose().mul_vec(v)
}

fn vec_add(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vec_sub(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn vec_neg(a: &[Int]) -> Vec<Int> {
    a.iter().map(|x| -x.clone()).collect()
}

fn half_vec(a: &[Int]) -> Option<Vec<Int>> {
    let two = int(2);
    let mut out = Vec::with_capacity(a.len());
    for x in a {
        let (d, r) = x.div_mod_floor(&two);
        if !r.is_zero() {
            return None;
        }
        out.push(d);
    }
    Some(out)
}

fn rat_vec(a: &[Int]) -> Vec<Rat> {
    a.iter().map(|x| Rat::from(x.clone())).collect()
}

/// Reflection x ↦ x + (⟨x,v⟩/2)·v in a (−4)-vector v of a lattice, as a
/// row-matrix (the analogue of `reflection_in_root` for norm −4).
fn reflection_in_four_vector(l: &Lattice, v: &[Int]) -> IntMatrix {
    assert_eq!(l.norm(v), int(-4), "needs a (−4)-vector");
    let n = l.rank();
    let gv = l.gram.mul_vec(v);
    let two = int(2);
    let mut m = IntMatrix::identity(n);
    for i in 0..n {
        let (c, r) = gv[i].div_mod_floor(&two);
        assert!(r.is_zero(), "pairings with a (−4)-vector of R̃(2) must be even");
        for k in 0..n {
            let add = &c * &v[k];
            m[(i, k)] = &m[(i, k)] + add;
        }
    }
    m
}

/// An automorphism of Y carried together with its minus-side companion:
/// `g` acts on S_Y, `h` on S_X₋ (in the model's S_X₋ basis), and the pair
/// glues to an isometry of S_X.
#[derive(Clone, Debug)]
pub struct AutElem {
    pub g: IntMatrix,
    pub h: IntMatrix,
}

/// A chamber D = D0^g of the L26/S_Y(2) tessellation, with its walls in
/// the order inherited from D0 and the splitting pattern of the walls.
/// Identity (Eq/Hash) is by the sorted wall list.
#[derive(Clone, Debug)]
pub struct ChamberVertex {
    pub g: IntMatrix,
    pub walls: Vec<Vec<Int>>,
    pub split_mask: u128,
    key: Vec<Vec<Int>>,
    /// extra marker used by the per-curve graphs: local wall index of the
    /// fixed root (unused elsewhere)
    pub tag: usize,
}

impl PartialEq for ChamberVertex {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for ChamberVertex {}
impl Hash for ChamberVertex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

/// Split of a curve class into the two covering roots on S_X.
#[derive(Clone, Debug)]
pub struct CurveClass {
    /// class [C] in S_Y
    pub root: Vec<Int>,
    /// (r̃, r̃^ε) in S_X coordinates, with π*(root) = r̃ + r̃^ε
    pub split_pair: (Vec<Int>, Vec<Int>),
    /// number of orbit representatives of the per-curve chamber graph
    pub vc0_size: usize,
    /// number of R_temp members proven equivalent to this representative
    pub class_size: usize,
}

/// Result of the rational-curve orbit computation.
#[derive(Clone, Debug)]
pub struct CurveOrbits {
    pub r_temp_size: usize,
    pub orbits: Vec<CurveClass>,
    /// number of connected components of τ (the generic expectation)
    pub expected: usize,
    pub matches_expected: bool,
    /// when aut(Y) is finite: sizes of the orbits on the full (finite)
    /// set of smooth rational curves, sorted ascending
    pub finite_orbit_sizes: Option<Vec<usize>>,
}

/// An elliptic fibration class with its reducible-fiber data.
#[derive(Clone, Debug)]
pub struct FibrationClass {
    /// primitive isotropic f_φ = [F]/2 in the closure of Nef_Y
    pub f: Vec<Int>,
    /// ADE types of the non-multiple reducible fibers
    pub non_multiple: Vec<ADEType>,
    /// ADE types of the multiple reducible fibers (at most 2)
    pub multiple: Vec<ADEType>,
}

#[derive(Clone, Debug)]
pub struct FibrationOrbits {
    pub e_temp_size: usize,
    pub orbits: Vec<FibrationClass>,
    /// table rows (non-multiple types, multiple types, count)
    pub table: Vec<(String, String, usize)>,
}

/// Orbit table of RDP configurations.
#[derive(Clone, Debug)]
pub struct RdpReport {
    /// number of distinct non-empty configurations Γ over all faces of
    /// the V0 chambers
    pub total_configs: usize,
    /// (ADE type string, #configurations, #orbits), sorted by type string
    pub per_type: Vec<(String, usize, usize)>,
    /// total orbit count over non-empty configurations
    pub total_orbits: usize,
}

/// Lifts of the aut(Y) generators to aut(X, ε), plus the kernel data.
#[derive(Clone, Debug)]
pub struct AutXLifts {
    /// one S_X matrix per generator of 𝒢
    pub lifts: Vec<IntMatrix>,
    /// the deck transformation ε on S_X
    pub eps: IntMatrix,
    /// |K| = |Ker(aut(X,ε) → aut(Y))| ∈ {2, 4}
    pub k_order: u64,
}

/// Output of the Nef-chamber orbit run.
#[derive(Clone, Debug)]
pub struct AutVolume {
    pub reps: Vec<ChamberVertex>,
    pub stab_orders: Vec<u64>,
    /// generating set 𝒢 of aut(Y) (transporters plus chamber stabilizers)
    pub gens: Vec<AutElem>,
    /// vol(Nef_Y / aut(Y)) as a multiple of 1_BP
    pub vol_nef_bp: Rat,
}

/// Glue data between the two discriminant sides of S_X₊ ⊕ S_X₋ ⊂ S_X.
///
/// A₊ = disc(S_Y(2)) ≅ F₂^10 is represented by 10-bit masks (bit i set
/// means coefficient 1 of eᵢ/2); A₋ = disc(S_X₋) by its element list.
struct GlueData {
    a_minus: DiscriminantForm,
    els_minus: Vec<FqfElem>,
    idx_minus: HashMap<FqfElem, usize>,
    d_minus: FqfSubgroup,
    /// graph of the glue anti-isometry γ: D₊ → D₋
    gamma_fwd: HashMap<u16, FqfElem>,
    gamma_bwd: HashMap<FqfElem, u16>,
    /// q₊ value per mask, encoded as (eᵀ·G10·e) mod 4 ∈ {0, 2}
    q_plus_mod4: Vec<u8>,
    /// rows of G10 mod 2 as bit masks (for b₊ parities)
    g10_rows_mod2: [u16; 10],
}

impl GlueData {
    /// parity of 2·b₊(x, y) for masks x, y (b₊ value is parity/2 mod 1)
    fn b_plus_parity(&self, x: u16, y: u16) -> u8 {
        let mut p = 0u32;
        for i in 0..10 {
            if x >> i & 1 == 1 {
                p ^= (self.g10_rows_mod2[i] & y).count_ones();
            }
        }
        (p & 1) as u8
    }
}

/// A (τ,τ̄)-generic Enriques surface model over one L10(2) ↪ L26
/// embedding record.
pub struct EnriquesModel {
    pub sy: Lattice,
    pub emb_type: String,
    pub l26: Lattice,
    /// 10×26: images of the standard S_Y basis in L26 (the S = L10(2) part)
    pub s_basis: IntMatrix,
    pub pair_label: (ADEType, ADEType),
    pub tau_tilde: ADEType,
    pub d0: Chamber,
    pub vol_d0: u64,
    /// a_{Y0}: sum of the primitive extreme rays of D0 (integral interior)
    pub ample0: Vec<Int>,
    /// number of candidate (wall root, (−4)-vector) pairs
    pub candidate_count: usize,
    /// the m construction curve classes (wall roots of D0 realizing τ)
    pub curve_roots: Vec<Vec<Int>>,
    pub geometric: bool,
    pub sx: Lattice,
    /// (10+m)×26: rows = S_X basis in L26 coordinates
    pub sx_basis: IntMatrix,
    /// 10×(10+m): π* in S_X coordinates (row i = π*(eᵢ))
    pub pi_star: IntMatrix,
    /// m×(10+m): basis of S_X₋ in S_X coordinates
    pub minus_basis: IntMatrix,
    /// S_X₋ ≅ R̃(2)
    pub sxm: Lattice,
    /// m×m: the construction (−4)-vectors vᵢ in S_X₋ coordinates
    pub r_simple: IntMatrix,
    /// per irreducible component R̃ⱼ of R̃: (component, τ(R ∩ R̃ⱼ))
    pub rt_components: Vec<(ADEComponent, ADEType)>,
    pub cde: (u64, u64, u64),
    pub gbar_minus_order: BigUint,

    glue: GlueData,
    /// image of G_{X−} on A₊ (masks 0..1024); shadows are the S_X₋ matrices
    gbar_plus: PermGroup<IntMatrix>,
    /// same group without shadows, for fast membership tests
    gbar_plus_fast: PermGroup<()>,
    /// generators of G_{X−} on S_X₋ (reflections s_{vᵢ}, plus the D4-swap
    /// involution in the d = 2 case)
    pub gxm_gens: Vec<IntMatrix>,
    /// parity pattern (S_X coordinates mod 2) → (−4)-vector of S_X₋
    four_patterns: HashMap<u32, Vec<Int>>,
    pub four_vector_count: usize,

    pub sym_order: BigUint,
    stab_perms: Vec<Perm>,
    wall_basis_idx: Vec<usize>,
    wb_adj: IntMatrix,
    wb_det: Int,

    split_cache: RefCell<HashMap<Vec<Int>, Option<(Vec<Int>, Vec<Int>)>>>,
    trans_cache: RefCell<Option<(Vec<Vec<Int>>, HashMap<u128, Vec<u32>>)>>,
    rays_cache: RefCell<Option<Vec<Vec<Int>>>>,
    faces2_cache: RefCell<Option<Vec<(usize, usize, bool)>>>,
    iso_cache: RefCell<Option<Vec<Vec<Int>>>>,
}

// ---------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------

/// Build the model for `pair` = (τ, τ̄) from an embedding record, choosing
/// the lexicographically least realizing subset of candidate pairs.
pub fn construct_model(
    rec: &EmbeddingRecord,
    tau: &ADEType,
    tau_bar: &ADEType,
) -> Result<EnriquesModel, EnriquesError> {
    let m = tau.rank();
    if m == 0 || m > 9 {
        return Err(EnriquesError::Internal(format!(
            "rank of tau must be 1..=9, got {m}"
        )));
    }
    let sy = l10();
    let l26 = rec.l26();
    let vin_images = IntMatrix::from_rows(&rec.basis_matrix);
    let s_basis = e10_basis().unimodular_inverse().mul(&vin_images);
    let twice_gram = {
        let mut g = sy.gram.clone();
        for i in 0..10 {
            for j in 0..10 {
                g[(i, j)] = &g[(i, j)] * int(2);
            }
        }
        g
    };
    if s_basis.mul(&l26.gram).mul(&s_basis.transpose()) != twice_gram {
        return Err(EnriquesError::Internal(
            "embedding record does not induce L10(2)".into(),
        ));
    }
    // orthogonal complement Q of S in L26
    let q_rows = kernel_basis(&s_basis.mul(&l26.gram));
    assert_eq!(q_rows.len(), 16, "complement of L10(2) in L26 has rank 16");
    let q_basis = IntMatrix::from_big_rows(&q_rows);
    let q_gram = q_basis.mul(&l26.gram).mul(&q_basis.transpose());
    let q_lat = Lattice::new(q_gram.clone())
        .map_err(|e| EnriquesError::Internal(format!("Q gram: {e}")))?;
    assert!(q_lat.is_negative_definite(), "complement must be negative definite");

    let d0 = rec.chamber_d0();
    let nw = d0.walls.len();
    assert!(nw <= 128, "wall masks use u128");

    // candidate pairs (wall index, v in L26 coordinates), canonical order
    let iota: Vec<Vec<Int>> = d0
        .walls
        .iter()
        .map(|w| s_basis.transpose().mul_vec(w))
        .collect();
    let four_q = vectors_of_norm(&q_gram, -4);
    let mut cands: Vec<(usize, Vec<Int>)> = Vec::new();
    for (i, ir) in iota.iter().enumerate() {
        for v in &four_q {
            let v26 = q_basis.transpose().mul_vec(v);
            if half_vec(&vec_add(ir, &v26)).is_some() {
                cands.push((i, v26));
            }
        }
    }
    let candidate_count = cands.len();

    // wall pairing table
    let wp: Vec<Vec<Int>> = (0..nw)
        .map(|i| (0..nw).map(|j| sy.inner(&d0.walls[i], &d0.walls[j])).collect())
        .collect();
    let vpair = |a: &[Int], b: &[Int]| -> Int {
        // pairing in L26 of two Q-part vectors
        let gb = l26.gram.mul_vec(b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    };

    // depth-first search for the lexicographically least realizing subset
    let mut chosen: Vec<usize> = Vec::new();
    let mut found: Option<ModelCore> = None;
    dfs_subsets(
        &cands, &wp, &vpair, m, 0, &mut chosen, &mut |sel: &[usize]| {
            // full-depth checks: the wall roots realize τ with closure τ̄
            let roots: Vec<Vec<Int>> =
                sel.iter().map(|&k| d0.walls[cands[k].0].clone()).collect();
            let gram = IntMatrix::from_big_rows(
                &roots
                    .iter()
                    .map(|a| roots.iter().map(|b| sy.inner(a, b)).collect())
                    .collect::<Vec<_>>(),
            );
            let Ok(rb) = classify(&gram) else { return None };
            if rb.ade_type != *tau {
                return None;
            }
            let emb = Embedding::new(sy.clone(), IntMatrix::from_big_rows(&roots));
            let pc = primitive_closure(&emb);
            let Ok(cb) = classify(&pc.induced_gram) else { return None };
            if cb.ade_type != *tau_bar {
                return None;
            }
            build_core(&sy, &l26, &s_basis, &iota, &cands, sel)
        },
        &mut found,
    );
    let core = found.ok_or_else(|| {
        EnriquesError::NotRealizable(format!(
            "({tau}, {tau_bar}) from embedding {}",
            rec.type_name
        ))
    })?;

    finish_model(rec, tau, tau_bar, sy, l26, s_basis, d0, cands, candidate_count, core)
}

/// Everything derived from one realizing subset that can still fail the
/// §5.3 conditions (failures reject the subset, the search continues).
struct ModelCore {
    chosen: Vec<usize>,
    sx: Lattice,
    sx_basis: IntMatrix,
    pi_star: IntMatrix,
    minus_basis: IntMatrix,
    sxm: Lattice,
    r_simple: IntMatrix,
    tau_tilde_basis: crate::ade::RootBasis,
    gram_half: IntMatrix,
}

fn dfs_subsets(
    cands: &[(usize, Vec<Int>)],
    wp: &[Vec<Int>],
    vpair: &dyn Fn(&[Int], &[Int]) -> Int,
    m: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    try_full: &mut dyn FnMut(&[usize]) -> Option<ModelCore>,
    found: &mut Option<ModelCore>,
) {
    if found.is_some() {
        return;
    }
    if chosen.len() == m {
        *found = try_full(chosen);
        return;
    }
    let remaining = m - chosen.len();
    for k in start..cands.len() {
        if cands.len() - k < remaining {
            break;
        }
        let (wi, vi) = &cands[k];
        let mut ok = true;
        for &c in chosen.iter() {
            let (wj, vj) = &cands[c];
            let p = &wp[*wi][*wj];
            if !(p.is_zero() || p.is_one()) {
                ok = false;
                break;
            }
            // ⟨r̃ᵢ, r̃ⱼ⟩ = (2⟨rᵢ,rⱼ⟩ + ⟨vᵢ,vⱼ⟩)/4 must be an integer
            let s = p * int(2) + vpair(vi, vj);
            if !s.mod_floor(&int(4)).is_zero() {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        chosen.push(k);
        dfs_subsets(cands, wp, vpair, m, k + 1, chosen, try_full, found);
        chosen.pop();
        if found.is_some() {
            return;
        }
    }
}

fn build_core(
    sy: &Lattice,
    l26: &Lattice,
    s_basis: &IntMatrix,
    iota: &[Vec<Int>],
    cands: &[(usize, Vec<Int>)],
    sel: &[usize],
) -> Option<ModelCore> {
    let m = sel.len();
    // S_X = ⟨ι(S_Y) , (ι(rᵢ)+vᵢ)/2⟩ ⊂ L26
    let mut rows = s_basis.rows_vec();
    for &k in sel {
        let (wi, v26) = &cands[k];
        rows.push(half_vec(&vec_add(&iota[*wi], v26)).expect("candidate evenness"));
    }
    let sx_basis = crate::exact_linalg::hermite_row_basis(&IntMatrix::from_big_rows(&rows));
    if sx_basis.rows != 10 + m {
        return None;
    }
    let sx_gram = sx_basis.mul(&l26.gram).mul(&sx_basis.transpose());
    // evenness check before Lattice::new (which requires it)
    for i in 0..10 + m {
        if !sx_gram[(i, i)].is_even() {
            return None;
        }
    }
    let sx = Lattice::new(sx_gram).ok()?;
    if sx.signature != (1, 9 + m) {
        return None;
    }
    // π*: coordinates of the S rows in the S_X basis
    let sxt = sx_basis.transpose();
    let mut pi_rows = Vec::with_capacity(10);
    for i in 0..10 {
        pi_rows.push(solve_integer(&sxt, &s_basis.row(i))?);
    }
    let pi_star = IntMatrix::from_big_rows(&pi_rows);
    let emb_plus = Embedding::new(sx.clone(), pi_star.clone());
    if !emb_plus.is_primitive() {
        return None;
    }
    let minus_emb = orthogonal_complement(&emb_plus);
    let minus_basis = minus_emb.basis.clone();
    assert_eq!(minus_basis.rows, m);
    let sxm = Lattice::new(minus_emb.induced_gram.clone()).ok()?;
    if !sxm.is_negative_definite() {
        return None;
    }
    // π étale: S_X₋ contains no roots of S_X
    if !vectors_of_norm(&sxm.gram, -2).is_empty() {
        return None;
    }
    // S_X₋ = R̃(2): the halved Gram must be an even ADE Gram
    let mut gram_half = IntMatrix::zero(m, m);
    for i in 0..m {
        for j in 0..m {
            let (d, r) = sxm.gram[(i, j)].div_mod_floor(&int(2));
            if !r.is_zero() {
                return None;
            }
            gram_half[(i, j)] = d;
        }
    }
    let tau_tilde_basis = classify(&gram_half).ok()?;
    // construction vectors vᵢ in S_X₋ coordinates
    let mbt = minus_basis.transpose();
    let mut r_rows = Vec::with_capacity(m);
    for &k in sel {
        let (_, v26) = &cands[k];
        let v_sx = solve_integer(&sxt, v26)?;
        let v_m = solve_integer(&mbt, &v_sx)?;
        assert_eq!(sxm.norm(&v_m), int(-4));
        r_rows.push(v_m);
    }
    let r_simple = IntMatrix::from_big_rows(&r_rows);
    let _ = sy;
    Some(ModelCore {
        chosen: sel.to_vec(),
        sx,
        sx_basis,
        pi_star,
        minus_basis,
        sxm,
        r_simple,
        tau_tilde_basis,
        gram_half,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish_model(
    rec: &EmbeddingRecord,
    tau: &ADEType,
    tau_bar: &ADEType,
    sy: Lattice,
    l26: Lattice,
    s_basis: IntMatrix,
    d0: Chamber,
    cands: Vec<(usize, Vec<Int>)>,
    candidate_count: usize,
    core: ModelCore,
) -> Result<EnriquesModel, EnriquesError> {
    let m = core.r_simple.rows;
    let tau_tilde = core.tau_tilde_basis.ade_type.clone();

    // component structure of R̃ and the intersection types τ(R ∩ R̃ⱼ)
    let rb = &core.tau_tilde_basis;
    assert_eq!(
        IntMatrix::from_big_rows(
            &rb.simple_roots
                .iter()
                .map(|a| {
                    rb.simple_roots
                        .iter()
                        .map(|b| {
                            let gb = core.gram_half.mul_vec(b);
                            a.iter().zip(&gb).map(|(x, y)| x * y).sum()
                        })
                        .collect::<Vec<Int>>()
                })
                .collect::<Vec<_>>()
        ),
        tau_tilde.standard_gram(),
        "classified simple roots must realize the standard Gram"
    );
    let mut rt_components: Vec<(ADEComponent, ADEType)> = Vec::new();
    let mut offset = 0usize;
    let half_inner = |a: &[Int], b: &[Int]| -> Int {
        let gb = core.gram_half.mul_vec(b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    };
    let v_rows = core.r_simple.rows_vec();
    let mut assigned = vec![usize::MAX; m];
    for (ci, comp) in tau_tilde.components.iter().enumerate() {
        let block: Vec<Vec<Int>> =
            rb.simple_roots[offset..offset + comp.rank].to_vec();
        let bt = IntMatrix::from_big_rows(&block).transpose();
        for (k, v) in v_rows.iter().enumerate() {
            if assigned[k] != usize::MAX {
                continue;
            }
            if solve_rational(&bt, &rat_vec(v)).is_some() {
                assigned[k] = ci;
            }
        }
        offset += comp.rank;
    }
    assert!(assigned.iter().all(|&c| c != usize::MAX), "every vᵢ lies in one component");
    for (ci, comp) in tau_tilde.components.iter().enumerate() {
        let vs: Vec<&Vec<Int>> =
            v_rows.iter().enumerate().filter(|(k, _)| assigned[*k] == ci).map(|(_, v)| v).collect();
        assert_eq!(vs.len(), comp.rank, "R ∩ R̃ⱼ has full rank in R̃ⱼ");
        let gram = IntMatrix::from_big_rows(
            &vs.iter()
                .map(|a| vs.iter().map(|b| half_inner(a, b) / int(2)).collect())
                .collect::<Vec<_>>(),
        );
        let itype = classify(&gram)
            .map_err(|e| EnriquesError::Internal(format!("intersection type: {e:?}")))?;
        rt_components.push((*comp, itype.ade_type));
    }
    let cde = cde_constants(&rt_components);
    let (c_cnt, d_cnt, e_cnt) = cde;
    let expected_gbar: BigUint = tau.weyl_order() * BigUint::from(d_cnt) / BigUint::from(e_cnt);

    // --- glue data -----------------------------------------------------
    let a_minus = discriminant_form(&core.sxm);
    let order_minus = a_minus.form.order() as usize;
    let els_minus = a_minus
        .form
        .elements(order_minus + 1)
        .map_err(|e| EnriquesError::Internal(format!("A₋ elements: {e}")))?;
    let idx_minus: HashMap<FqfElem, usize> =
        els_minus.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();

    let g10_i64: Vec<Vec<i64>> = sy.gram.to_i64_rows();
    let mut g10_rows_mod2 = [0u16; 10];
    for i in 0..10 {
        for j in 0..10 {
            if g10_i64[i][j].rem_euclid(2) == 1 {
                g10_rows_mod2[i] |= 1 << j;
            }
        }
    }
    let mut q_plus_mod4 = vec![0u8; 1024];
    for (mask, q) in q_plus_mod4.iter_mut().enumerate() {
        let mut s: i64 = 0;
        for i in 0..10 {
            if mask >> i & 1 == 1 {
                for j in 0..10 {
                    if mask >> j & 1 == 1 {
                        s += g10_i64[i][j];
                    }
                }
            }
        }
        *q = (s.rem_euclid(4)) as u8;
    }

    // Γ generators: classes of the S_X basis vectors on both sides
    let g10_inv = sy.gram.unimodular_inverse();
    let plus_pair = core.sx.gram.mul(&core.pi_star.transpose()); // (10+m)×10
    let cplus_num = plus_pair.mul(&g10_inv.transpose()); // coordinates ×2
    let minus_pair = core.sx.gram.mul(&core.minus_basis.transpose()); // (10+m)×m
    let mut gen_pairs: Vec<(u16, FqfElem)> = Vec::new();
    for t in 0..10 + m {
        let mut mask = 0u16;
        for i in 0..10 {
            if cplus_num[(t, i)].is_odd() {
                mask |= 1 << i;
            }
        }
        let qrow = rat_vec(&minus_pair.row(t));
        let cminus = solve_rational(&core.sxm.gram, &qrow)
            .expect("definite Gram is invertible");
        let elem = a_minus.form.reduce(&a_minus.project(&core.sxm, &cminus));
        gen_pairs.push((mask, elem));
    }
    // close the glue graph under addition and check it is a bijection
    let zero = a_minus.form.zero_elem();
    let mut gamma_fwd: HashMap<u16, FqfElem> = HashMap::new();
    gamma_fwd.insert(0, zero.clone());
    let mut stack = vec![(0u16, zero.clone())];
    while let Some((m0, e0)) = stack.pop() {
        for (mg, eg) in &gen_pairs {
            let m1 = m0 ^ mg;
            let e1 = a_minus.form.reduce(&a_minus.form.add(&e0, eg));
            match gamma_fwd.get(&m1) {
                Some(prev) => assert_eq!(prev, &e1, "glue graph is not a function"),
                None => {
                    gamma_fwd.insert(m1, e1.clone());
                    stack.push((m1, e1));
                }
            }
        }
    }
    let mut gamma_bwd: HashMap<FqfElem, u16> = HashMap::new();
    for (mk, el) in &gamma_fwd {
        assert!(
            gamma_bwd.insert(el.clone(), *mk).is_none(),
            "glue graph is not injective"
        );
    }
    let d_minus = FqfSubgroup::generate(
        &a_minus.form,
        &gamma_fwd.values().cloned().collect::<Vec<_>>(),
    );
    assert_eq!(d_minus.order(), gamma_fwd.len(), "D₋ = image of the glue graph");

    let glue = GlueData {
        a_minus,
        els_minus,
        idx_minus,
        d_minus,
        gamma_fwd,
        gamma_bwd,
        q_plus_mod4,
        g10_rows_mod2,
    };
    // anti-isometry check on generators: q₊(x₊) + q₋(x₋) ≡ 0 mod 2Z
    for (mk, el) in &glue.gamma_fwd {
        let qm = glue.q_plus_mod4[*mk as usize] as i64; // value qm/2 mod 2
        let q_sum = reduce_mod(
            &(Rat::new(int(qm), int(2)) + glue.a_minus.form.q_of(el)),
            2,
        );
        assert!(q_sum.is_zero(), "glue graph is not an anti-isometry (q)");
    }

    // Lemma dict: D₋ is generated by the classes vᵢ/2
    {
        let mut gens = Vec::new();
        for v in &v_rows {
            let vh: Vec<Rat> = v.iter().map(|x| Rat::new(x.clone(), int(2))).collect();
            gens.push(glue.a_minus.form.reduce(&glue.a_minus.project(&core.sxm, &vh)));
        }
        let sub = FqfSubgroup::generate(&glue.a_minus.form, &gens);
        assert_eq!(
            sub.elements, glue.d_minus.elements,
            "Lemma dict: D₋ = ½R/R̃"
        );
    }
    // Lemma dict: R∨/R̃ = D₋^⊥
    {
        let b = &core.r_simple;
        let mgram = IntMatrix::from_big_rows(
            &v_rows
                .iter()
                .map(|a| v_rows.iter().map(|bb| half_inner(a, bb)).collect())
                .collect::<Vec<_>>(),
        );
        let minv = mgram
            .rational_inverse()
            .expect("R Gram (half metric) is invertible");
        let mut gens = Vec::new();
        for j in 0..m {
            // w_j = Σ_k (M⁻¹)_{jk} v_k in S_X₋ coordinates
            let mut w = vec![Rat::zero(); m];
            for k in 0..m {
                for (wi, bi) in w.iter_mut().zip(&b.row(k)) {
                    *wi += &minv[j][k] * Rat::from(bi.clone());
                }
            }
            gens.push(glue.a_minus.form.reduce(&glue.a_minus.project(&core.sxm, &w)));
        }
        let sub = FqfSubgroup::generate(&glue.a_minus.form, &gens);
        let pp = perp(&glue.a_minus.form, &glue.d_minus);
        assert_eq!(sub.elements, pp.elements, "Lemma dict: R∨/R̃ = D₋^⊥");
    }

    // --- G_{X−} generators and both discriminant images -----------------
    let mut base_gens: Vec<IntMatrix> = v_rows
        .iter()
        .map(|v| reflection_in_four_vector(&core.sxm, v))
        .collect();
    for s in &base_gens {
        assert_eq!(s.mul(&core.sxm.gram).mul(&s.transpose()), core.sxm.gram);
    }
    let mut gxm_gens = base_gens.clone();
    if d_cnt == 2 {
        let h = find_d4_swap(&core, &tau_tilde, rb, &assigned, &v_rows, &half_inner)
            .ok_or_else(|| {
                EnriquesError::Internal("no integral D4-swap involution found".into())
            })?;
        gxm_gens.push(h);
    }
    drop(base_gens.drain(..));

    let minus_perm_of = |s: &IntMatrix| -> Perm {
        let fm = glue.a_minus.map_of_isometry(&core.sxm, s);
        let img: Vec<u32> = glue
            .els_minus
            .iter()
            .map(|e| {
                let ie = glue.a_minus.form.reduce(&fm.apply(&glue.a_minus.form, e));
                glue.idx_minus[&ie] as u32
            })
            .collect();
        Perm { img }
    };
    let gbar_minus = PermGroup::<()>::new(
        glue.els_minus.len(),
        gxm_gens
            .iter()
            .map(|s| El { p: minus_perm_of(s), s: () })
            .collect(),
        (),
        &[],
    );
    let gbar_minus_order = gbar_minus.order();
    if gbar_minus_order != expected_gbar {
        return Err(EnriquesError::Internal(format!(
            "|Ḡ_X₋| = {gbar_minus_order} but |W(τ)|·d/e = {expected_gbar}"
        )));
    }

    // transfer each generator to the A₊ side through the glue graph
    let mut plus_els: Vec<El<IntMatrix>> = Vec::new();
    let mut plus_els_fast: Vec<El<()>> = Vec::new();
    for s in &gxm_gens {
        let fm = glue.a_minus.map_of_isometry(&core.sxm, s);
        let mut rowmasks = [0u16; 10];
        for (k, rm) in rowmasks.iter_mut().enumerate() {
            let xk: u16 = 1 << k;
            // any x₋ with (x₊, x₋) ⊥ Γ
            let mut found = None;
            'search: for x in &glue.els_minus {
                for (mg, eg) in &glue.gamma_fwd {
                    let t = glue.b_plus_parity(xk, *mg);
                    let bv = reduce_mod(&glue.a_minus.form.b_of(x, eg), 1);
                    let want_half = t == 1;
                    let is_half = bv == Rat::new(int(1), int(2));
                    if want_half != is_half || (!is_half && !bv.is_zero()) {
                        continue 'search;
                    }
                }
                found = Some(x.clone());
                break;
            }
            let x = found.expect("Γ^⊥ projects onto A₊");
            let hx = glue.a_minus.form.reduce(&fm.apply(&glue.a_minus.form, &x));
            let delta = glue.a_minus.form.reduce(&glue.a_minus.form.add(&hx, &glue.a_minus.form.neg(&x)));
            let dmask = *glue
                .gamma_bwd
                .get(&delta)
                .expect("h̄x₋ − x₋ lies in D₋");
            *rm = xk ^ dmask;
        }
        let img: Vec<u32> = (0..1024u32)
            .map(|b| {
                let mut out = 0u16;
                for k in 0..10 {
                    if b >> k & 1 == 1 {
                        out ^= rowmasks[k];
                    }
                }
                out as u32
            })
            .collect();
        // the transferred map must preserve q₊ and the glue graph
        for b in 0..1024usize {
            assert_eq!(
                glue.q_plus_mod4[img[b] as usize], glue.q_plus_mod4[b],
                "transferred map is not an isometry of A₊"
            );
        }
        for (mk, el) in &glue.gamma_fwd {
            let iel = glue.a_minus.form.reduce(&fm.apply(&glue.a_minus.form, el));
            assert_eq!(
                glue.gamma_fwd[&(img[*mk as usize] as u16)],
                iel,
                "transferred map does not preserve the glue graph"
            );
        }
        let p = Perm { img };
        plus_els_fast.push(El { p: p.clone(), s: () });
        plus_els.push(El { p, s: s.clone() });
    }
    let gbar_plus = PermGroup::new(1024, plus_els, IntMatrix::identity(m), &[]);
    let gbar_plus_fast = PermGroup::<()>::new(1024, plus_els_fast, (), &[]);
    assert_eq!(
        gbar_plus.order(),
        gbar_minus_order,
        "glue transfer is an isomorphism of the two images"
    );

    // (−4)-vector parity patterns in S_X coordinates
    let four_minus = vectors_of_norm(&core.sxm.gram, -4);
    let four_vector_count = four_minus.len();
    let mut four_patterns: HashMap<u32, Vec<Int>> = HashMap::new();
    for v in &four_minus {
        let v_sx = core.minus_basis.transpose().mul_vec(v);
        let mut pat = 0u32;
        for (i, x) in v_sx.iter().enumerate() {
            if x.is_odd() {
                pat |= 1 << i;
            }
        }
        four_patterns.entry(pat).or_insert(v_sx);
    }

    // --- chamber symmetry machinery -------------------------------------
    let sym: ChamberSymmetries = chamber_stabilizer(&d0)
        .map_err(|e| EnriquesError::Internal(format!("chamber stabilizer: {e:?}")))?;
    let sym_order = sym.order.clone();
    let order_u = sym_order
        .to_u64()
        .ok_or_else(|| EnriquesError::Internal("stabilizer order overflow".into()))?;
    if order_u > 2_000_000 {
        return Err(EnriquesError::Internal(format!(
            "O(S_Y, D0) too large to materialize: {order_u}"
        )));
    }
    let stab_perms: Vec<Perm> = sym
        .group
        .elements(order_u as usize + 1)
        .into_iter()
        .map(|e| e.p)
        .collect();
    assert_eq!(stab_perms.len() as u64, order_u);
    // ten independent walls for matrix reconstruction
    let mut wall_basis_idx = Vec::new();
    let mut acc: Vec<Vec<Int>> = Vec::new();
    for (i, w) in d0.walls.iter().enumerate() {
        acc.push(w.clone());
        if IntMatrix::from_big_rows(&acc).rank() == acc.len() {
            wall_basis_idx.push(i);
            if acc.len() == 10 {
                break;
            }
        } else {
            acc.pop();
        }
    }
    assert_eq!(wall_basis_idx.len(), 10, "walls span S_Y⊗Q");
    let wb = IntMatrix::from_big_rows(&acc);
    let wb_det = wb.det();
    let wb_inv = wb.rational_inverse().expect("independent walls");
    let mut wb_adj = IntMatrix::zero(10, 10);
    for i in 0..10 {
        for j in 0..10 {
            let e = &wb_inv[i][j] * Rat::from(wb_det.clone());
            assert!(e.is_integer());
            wb_adj[(i, j)] = e.to_integer();
        }
    }

    // ample seed: sum of the primitive extreme rays of D0
    let ineqs: Vec<Vec<Int>> = d0.walls.iter().map(|w| d0.ambient.gram.mul_vec(w)).collect();
    let rays = extreme_rays(&ineqs, 10)
        .map_err(|e| EnriquesError::Internal(format!("extreme rays: {e:?}")))?;
    let mut ample0 = vec![Int::zero(); 10];
    for r in &rays {
        ample0 = vec_add(&ample0, r);
    }
    for w in &d0.walls {
        assert!(sy.inner(&ample0, w).is_positive(), "a_{{Y0}} is interior");
    }
    assert!(sy.norm(&ample0).is_positive());

    let curve_roots: Vec<Vec<Int>> =
        core.chosen.iter().map(|&k| d0.walls[cands[k].0].clone()).collect();
    let geometric = embeds_in_even_unimodular(&core.sx, (3, 19));

    let model = EnriquesModel {
        sy,
        emb_type: rec.type_name.clone(),
        l26,
        s_basis,
        pair_label: (tau.clone(), tau_bar.clone()),
        tau_tilde,
        d0,
        vol_d0: rec.vol_d0,
        ample0,
        candidate_count,
        curve_roots,
        geometric,
        sx: core.sx,
        sx_basis: core.sx_basis,
        pi_star: core.pi_star,
        minus_basis: core.minus_basis,
        sxm: core.sxm,
        r_simple: core.r_simple,
        rt_components,
        cde,
        gbar_minus_order,
        glue,
        gbar_plus,
        gbar_plus_fast,
        gxm_gens,
        four_patterns,
        four_vector_count,
        sym_order,
        stab_perms,
        wall_basis_idx,
        wb_adj,
        wb_det,
        split_cache: RefCell::new(HashMap::new()),
        trans_cache: RefCell::new(None),
        rays_cache: RefCell::new(Some(rays)),
        faces2_cache: RefCell::new(None),
        iso_cache: RefCell::new(None),
    };
    // every construction root splits by construction
    for r in &model.curve_roots {
        assert!(model.splits(r).expect("construction root is a root").is_some());
    }
    let _ = c_cnt;
    Ok(model)
}

/// In the d = 2 case (some R̃ⱼ ≅ E8 with τ(R ∩ R̃ⱼ) = 2D4) find the
/// integral involution of S_X₋ swapping the two D4 constituents.
fn find_d4_swap(
    core: &ModelCore,
    tau_tilde: &ADEType,
    _rb: &crate::ade::RootBasis,
    assigned: &[usize],
    v_rows: &[Vec<Int>],
    half_inner: &dyn Fn(&[Int], &[Int]) -> Int,
) -> Option<IntMatrix> {
    let m = v_rows.len();
    // locate the E8 component with intersection 2D4
    let mut target = None;
    for (ci, comp) in tau_tilde.components.iter().enumerate() {
        if comp.family == Family::E && comp.rank == 8 {
            let idx: Vec<usize> = (0..m).filter(|&k| assigned[k] == ci).collect();
            if idx.len() == 8 {
                target = Some(idx);
                break;
            }
        }
    }
    let idx = target?;
    // split the eight roots into two connected D4 quadruples
    let mut comp_of = vec![usize::MAX; 8];
    let mut next = 0usize;
    for s in 0..8 {
        if comp_of[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp_of[s] = next;
        while let Some(a) = stack.pop() {
            for b in 0..8 {
                if comp_of[b] == usize::MAX
                    && !half_inner(&v_rows[idx[a]], &v_rows[idx[b]]).is_zero()
                {
                    comp_of[b] = next;
                    stack.push(b);
                }
            }
        }
        next += 1;
    }
    if next != 2 {
        return None;
    }
    let quad = |c: usize| -> Vec<usize> {
        (0..8).filter(|&k| comp_of[k] == c).map(|k| idx[k]).collect()
    };
    let (q1, q2) = (quad(0), quad(1));
    let central = |q: &[usize]| -> usize {
        *q.iter()
            .find(|&&a| {
                q.iter().filter(|&&b| b != a).all(|&b| !half_inner(&v_rows[a], &v_rows[b]).is_zero())
            })
            .expect("D4 has a central vertex")
    };
    let (c1, c2) = (central(&q1), central(&q2));
    let o1: Vec<usize> = q1.iter().copied().filter(|&a| a != c1).collect();
    let o2: Vec<usize> = q2.iter().copied().filter(|&a| a != c2).collect();
    // full Q-basis of S_X₋: all construction vectors
    let basis = IntMatrix::from_big_rows(v_rows);
    let binv = basis.rational_inverse()?;
    let perms3 = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for p in &perms3 {
        // image of each basis vector under the candidate swap
        let mut image = vec![vec![Int::zero(); m]; m];
        let mut img_of = vec![usize::MAX; m];
        for k in 0..m {
            img_of[k] = k;
        }
        img_of[c1] = c2;
        img_of[c2] = c1;
        for t in 0..3 {
            img_of[o1[t]] = o2[p[t]];
            img_of[o2[p[t]]] = o1[t];
        }
        for k in 0..m {
            image[k] = v_rows[img_of[k]].clone();
        }
        // matrix in S_X₋ coordinates: basis · H = image → H = basis⁻¹ · image
        let img_m = IntMatrix::from_big_rows(&image);
        let mut h = IntMatrix::zero(m, m);
        let mut ok = true;
        'fill: for i in 0..m {
            for j in 0..m {
                let mut e = Rat::zero();
                for (k, bk) in binv[i].iter().enumerate() {
                    e += bk * Rat::from(img_m[(k, j)].clone());
                }
                if !e.is_integer() {
                    ok = false;
                    break 'fill;
                }
                h[(i, j)] = e.to_integer();
            }
        }
        if !ok {
            continue;
        }
        if h.mul(&core.sxm.gram).mul(&h.transpose()) != core.sxm.gram {
            continue;
        }
        if !h.mul(&h).is_identity() {
            continue;
        }
        return Some(h);
    }
    None
}

// ---------------------------------------------------------------------
// membership and lifting
// ---------------------------------------------------------------------

impl EnriquesModel {
    /// π*(r) in S_X coordinates.
    pub fn pi_star_of(&self, r: &[Int]) -> Vec<Int> {
        self.pi_star.transpose().mul_vec(r)
    }

    /// Splitting test: returns (r̃, r̃^ε) in S_X coordinates when the root
    /// splits, None otherwise.  Results are cached.
    pub fn splits(&self, r: &[Int]) -> Result<Option<(Vec<Int>, Vec<Int>)>, EnriquesError> {
        if self.sy.norm(r) != int(-2) {
            return Err(EnriquesError::NotARoot);
        }
        if let Some(hit) = self.split_cache.borrow().get(r) {
            return Ok(hit.clone());
        }
        let pr = self.pi_star_of(r);
        let mut pat = 0u32;
        for (i, x) in pr.iter().enumerate() {
            if x.is_odd() {
                pat |= 1 << i;
            }
        }
        let res = self.four_patterns.get(&pat).map(|v| {
            let rt = half_vec(&vec_add(&pr, v)).expect("parity pattern match");
            let rte = half_vec(&vec_sub(&pr, v)).expect("parity pattern match");
            assert_eq!(self.sx.norm(&rt), int(-2));
            assert_eq!(self.sx.norm(&rte), int(-2));
            // the induced product of reflections restricts to s_r on S_Y
            let s_tilde = reflection_in_root(&self.sx, &rt)
                .mul(&reflection_in_root(&self.sx, &rte));
            let s_r = reflection_in_root(&self.sy, r);
            assert_eq!(
                s_r.mul(&self.pi_star),
                self.pi_star.mul(&s_tilde),
                "s_r̃ · s_r̃ε does not restrict to s_r"
            );
            (rt, rte)
        });
        self.split_cache.borrow_mut().insert(r.to_vec(), res.clone());
        Ok(res)
    }

    fn splits_fast(&self, r: &[Int]) -> bool {
        self.splits(r).expect("wall roots are roots").is_some()
    }

    /// The permutation of A₊ induced by g mod 2.
    fn perm_plus_of(&self, g: &IntMatrix) -> Perm {
        let mut rowmasks = [0u16; 10];
        for i in 0..10 {
            for j in 0..10 {
                if g[(i, j)].is_odd() {
                    rowmasks[i] |= 1 << j;
                }
            }
        }
        let img: Vec<u32> = (0..1024u32)
            .map(|b| {
                let mut out = 0u16;
                for k in 0..10 {
                    if b >> k & 1 == 1 {
                        out ^= rowmasks[k];
                    }
                }
                out as u32
            })
            .collect();
        Perm { img }
    }

    /// Membership in G_Y; on success returns the companion isometry h of
    /// S_X₋ such that (g, h) glues to an isometry of S_X.
    pub fn in_gy_companion(&self, g: &IntMatrix) -> Option<IntMatrix> {
        let p = self.perm_plus_of(g);
        if !self.gbar_plus_fast.contains(&p) {
            return None;
        }
        Some(self.gbar_plus.member(&p).expect("consistent chains").s)
    }

    /// Membership in G_Y; on success returns a lift of g to O(S_X).
    pub fn in_gy(&self, g: &IntMatrix) -> Option<IntMatrix> {
        let h = self.in_gy_companion(g)?;
        Some(self.lift_to_sx(g, &h))
    }

    /// Glue (g, h) to the matrix on S_X (asserts integrality).
    pub fn lift_to_sx(&self, g: &IntMatrix, h: &IntMatrix) -> IntMatrix {
        let n = self.sx.rank();
        let m = self.sxm.rank();
        let g10_inv = self.sy.gram.unimodular_inverse();
        let plus_pair = self.sx.gram.mul(&self.pi_star.transpose());
        let cplus_num = plus_pair.mul(&g10_inv.transpose()); // ×2
        let minus_pair = self.sx.gram.mul(&self.minus_basis.transpose());
        let gm_inv = self.sxm.gram.rational_inverse().expect("definite Gram");
        let mut out = IntMatrix::zero(n, n);
        for t in 0..n {
            // plus part: (c₊ · g) · π*
            let cp: Vec<Rat> = (0..10)
                .map(|i| Rat::new(cplus_num[(t, i)].clone(), int(2)))
                .collect();
            let mut row = vec![Rat::zero(); n];
            for i in 0..10 {
                // (c₊ g)_i = Σ_k c₊_k g_{k,i}
                let mut ci = Rat::zero();
                for (k, cpk) in cp.iter().enumerate() {
                    ci += cpk * Rat::from(g[(k, i)].clone());
                }
                if ci.is_zero() {
                    continue;
                }
                for (rj, pj) in row.iter_mut().zip(&self.pi_star.row(i)) {
                    *rj += &ci * Rat::from(pj.clone());
                }
            }
            // minus part: (c₋ · h) · minus_basis
            let mut cm = vec![Rat::zero(); m];
            for (j, cmj) in cm.iter_mut().enumerate() {
                for k in 0..m {
                    *cmj += &gm_inv[j][k] * Rat::from(minus_pair[(t, k)].clone());
                }
            }
            for j in 0..m {
                let mut cj = Rat::zero();
                for (k, cmk) in cm.iter().enumerate() {
                    cj += cmk * Rat::from(h[(k, j)].clone());
                }
                if cj.is_zero() {
                    continue;
                }
                for (rj, bj) in row.iter_mut().zip(&self.minus_basis.row(j)) {
                    *rj += &cj * Rat::from(bj.clone());
                }
            }
            for (j, e) in row.into_iter().enumerate() {
                assert!(e.is_integer(), "glued lift is not integral");
                out[(t, j)] = e.to_integer();
            }
        }
        assert_eq!(
            out.mul(&self.sx.gram).mul(&out.transpose()),
            self.sx.gram,
            "glued lift is not an isometry"
        );
        out
    }

    /// True iff g ∈ G_Y also preserves Nef_Y (i.e. g ∈ aut(Y)).
    pub fn in_aut(&self, g: &IntMatrix) -> Result<bool, EnriquesError> {
        if self.in_gy_companion(g).is_none() {
            return Err(EnriquesError::NotInGY);
        }
        let a = &self.d0.interior;
        let a_img = apply_row(g, a);
        if a_img == *a {
            return Ok(true);
        }
        let seps = separating_roots(&self.sy, &a_img, a)
            .map_err(|e| EnriquesError::Internal(format!("separating roots: {e}")))?;
        for r in &seps {
            if self.splits(r)?.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---------------------------------------------------------------------
// chamber graph machinery
// ---------------------------------------------------------------------

impl EnriquesModel {
    /// The chamber D0^g as a graph vertex.
    pub fn vertex(&self, g: IntMatrix) -> ChamberVertex {
        let walls: Vec<Vec<Int>> =
            self.d0.walls.iter().map(|w| apply_row(&g, w)).collect();
        let mut split_mask = 0u128;
        for (i, w) in walls.iter().enumerate() {
            if self.splits_fast(w) {
                split_mask |= 1 << i;
            }
        }
        let mut key = walls.clone();
        key.sort();
        ChamberVertex { g, walls, split_mask, key, tag: usize::MAX }
    }

    /// Matrix of a stored O(S_Y, D0) wall permutation.
    fn matrix_of_stab_perm(&self, idx: u32) -> IntMatrix {
        let sigma = &self.stab_perms[idx as usize];
        let rows: Vec<Vec<Int>> = self
            .wall_basis_idx
            .iter()
            .map(|&b| self.d0.walls[sigma.apply(b as u32) as usize].clone())
            .collect();
        let num = self.wb_adj.mul(&IntMatrix::from_big_rows(&rows));
        let mut out = IntMatrix::zero(10, 10);
        for i in 0..10 {
            for j in 0..10 {
                let (d, r) = num[(i, j)].div_mod_floor(&self.wb_det);
                assert!(r.is_zero(), "stabilizer matrix reconstruction");
                out[(i, j)] = d;
            }
        }
        out
    }

    /// Indices of stabilizer permutations mapping the split set of `v`
    /// onto `target` (grouped map cached per source vertex).
    fn split_candidates(&self, v: &ChamberVertex, target: u128) -> Vec<u32> {
        let mut cache = self.trans_cache.borrow_mut();
        let rebuild = match cache.as_ref() {
            Some((k, _)) => *k != v.key,
            None => true,
        };
        if rebuild {
            let bits: Vec<u32> = (0..self.d0.walls.len() as u32)
                .filter(|i| v.split_mask >> i & 1 == 1)
                .collect();
            let mut map: HashMap<u128, Vec<u32>> = HashMap::new();
            for (idx, sigma) in self.stab_perms.iter().enumerate() {
                let mut img = 0u128;
                for &b in &bits {
                    img |= 1 << sigma.apply(b);
                }
                map.entry(img).or_default().push(idx as u32);
            }
            *cache = Some((v.key.clone(), map));
        }
        cache
            .as_ref()
            .unwrap()
            .1
            .get(&target)
            .cloned()
            .unwrap_or_default()
    }

    /// Search for g ∈ aut(Y) with D1^g = D2 (wall i of D1 ↦ wall σ(i) of
    /// D2), subject to an optional wall-index constraint and an extra
    /// matrix predicate.
    fn transporter_core(
        &self,
        v1: &ChamberVertex,
        v2: &ChamberVertex,
        tag_pair: Option<(u32, u32)>,
        check: &dyn Fn(&IntMatrix) -> bool,
    ) -> Option<AutElem> {
        let cands = self.split_candidates(v1, v2.split_mask);
        if cands.is_empty() {
            return None;
        }
        let g1_inv = v1.g.unimodular_inverse();
        for idx in cands {
            if let Some((a, b)) = tag_pair {
                if self.stab_perms[idx as usize].apply(a) != b {
                    continue;
                }
            }
            let u = self.matrix_of_stab_perm(idx);
            let g = g1_inv.mul(&u).mul(&v2.g);
            if !check(&g) {
                continue;
            }
            if let Some(h) = self.in_gy_companion(&g) {
                return Some(AutElem { g, h });
            }
        }
        None
    }

    /// All elements of aut(Y) fixing the chamber `v` (and the optional
    /// wall index), subject to an extra predicate.
    fn stabilizer_core(
        &self,
        v: &ChamberVertex,
        tag: Option<u32>,
        check: &dyn Fn(&IntMatrix) -> bool,
    ) -> Vec<AutElem> {
        let cands = self.split_candidates(v, v.split_mask);
        let g1_inv = v.g.unimodular_inverse();
        let mut out = Vec::new();
        for idx in cands {
            if let Some(a) = tag {
                if self.stab_perms[idx as usize].apply(a) != a {
                    continue;
                }
            }
            let u = self.matrix_of_stab_perm(idx);
            let g = g1_inv.mul(&u).mul(&v.g);
            if !check(&g) {
                continue;
            }
            if let Some(h) = self.in_gy_companion(&g) {
                out.push(AutElem { g, h });
            }
        }
        out
    }

    fn budget_err<V>(e: OrbitError<V>) -> EnriquesError {
        match e {
            OrbitError::Budget { budget, .. } => EnriquesError::Budget(budget),
        }
    }

    /// Breadth-first orbit run over the Nef-chamber tessellation:
    /// representatives, stabilizer orders, generators of aut(Y), and
    /// vol(Nef_Y/aut(Y)) as a multiple of 1_BP.
    pub fn aut_and_volume(&self, budget: usize) -> Result<AutVolume, EnriquesError> {
        let seed = self.vertex(IntMatrix::identity(10));
        let nw = self.d0.walls.len();
        let oracle = GraphOracle {
            seed,
            neighbors: Box::new(move |v: &ChamberVertex| {
                (0..nw)
                    .filter(|i| v.split_mask >> i & 1 == 0)
                    .map(|i| {
                        let s = reflection_in_root(&self.sy, &v.walls[i]);
                        self.vertex(v.g.mul(&s))
                    })
                    .collect()
            }),
            transporter: Box::new(|w: &ChamberVertex, rep: &ChamberVertex| {
                self.transporter_core(w, rep, None, &|_| true)
            }),
            stabilizer: Box::new(|v: &ChamberVertex| self.stabilizer_core(v, None, &|_| true)),
            progress: None,
        };
        let res = enumerate(&oracle, budget).map_err(Self::budget_err)?;
        let stab_orders: Vec<u64> =
            res.stabilizers.iter().map(|s| s.len() as u64).collect();
        let mut sum = Rat::zero();
        for &o in &stab_orders {
            assert!(o >= 1);
            sum += Rat::new(Int::one(), int(o as i64));
        }
        let bp = Int::from(bp_image_order().to_u64().expect("BP order fits u64"));
        let vol_nef_bp = Rat::from(int(self.vol_d0 as i64)) * sum / Rat::from(bp);
        // generating set: transporters plus all representative stabilizers
        let mut gens: Vec<AutElem> = Vec::new();
        let mut seen: HashSet<Vec<Vec<Int>>> = HashSet::new();
        let id = IntMatrix::identity(10);
        for (_, g) in &res.h_set {
            if g.g != id && seen.insert(g.g.rows_vec()) {
                gens.push(g.clone());
            }
        }
        for st in &res.stabilizers {
            for g in st {
                if g.g != id && seen.insert(g.g.rows_vec()) {
                    gens.push(g.clone());
                }
            }
        }
        Ok(AutVolume { reps: res.v0_list, stab_orders, gens, vol_nef_bp })
    }

    /// Volume by the closed formula: 1_BP / |Ḡ_{X−}|, with the c/d/e
    /// cross-checks, and (for small R̃) an independent brute-force
    /// enumeration of Ker(O(S_X₋, D₋) → O(D₋^⊥)).
    pub fn volume_by_formula(&self) -> Rat {
        let (c, d, e) = self.cde;
        let expected = self.pair_label.0.weyl_order() * BigUint::from(d) / BigUint::from(e);
        assert_eq!(self.gbar_minus_order, expected, "Thm cde order formula");
        // c = e/d is the number of numerically trivial automorphisms / d
        assert_eq!(c as u64 * d, e, "c·d = e");
        // independent enumeration for small groups
        let est = self.tau_tilde.weyl_order() * self.tau_tilde.diagram_aut_order();
        if est <= BigUint::from(20_000u64) {
            let all = definite_isometries(&self.sxm, &self.sxm)
                .expect("definite isometry enumeration");
            let mut perms: HashSet<Vec<u32>> = HashSet::new();
            let pp = perp(&self.glue.a_minus.form, &self.glue.d_minus);
            for g in &all {
                let fm = self.glue.a_minus.map_of_isometry(&self.sxm, g);
                let form = &self.glue.a_minus.form;
                // must fix D₋^⊥ pointwise and preserve D₋
                let ok = pp
                    .elements
                    .iter()
                    .all(|x| form.reduce(&fm.apply(form, x)) == *x)
                    && self
                        .glue
                        .d_minus
                        .gens
                        .iter()
                        .all(|x| self.glue.d_minus.contains(&form.reduce(&fm.apply(form, x))));
                if !ok {
                    continue;
                }
                let img: Vec<u32> = self
                    .glue
                    .els_minus
                    .iter()
                    .map(|x| self.glue.idx_minus[&form.reduce(&fm.apply(form, x))] as u32)
                    .collect();
                perms.insert(img);
            }
            assert_eq!(
                BigUint::from(perms.len()),
                self.gbar_minus_order,
                "brute-force kernel image disagrees with the generator image"
            );
        }
        let order = Int::from(
            self.gbar_minus_order.to_u64().expect("|Ḡ_X₋| fits u64") as i64
        );
        Rat::new(Int::one(), order)
    }
}

// ---------------------------------------------------------------------
// cached geometry of D0
// ---------------------------------------------------------------------

impl EnriquesModel {
    fn rays_d0(&self) -> Vec<Vec<Int>> {
        if self.rays_cache.borrow().is_none() {
            let ineqs: Vec<Vec<Int>> = self
                .d0
                .walls
                .iter()
                .map(|w| self.d0.ambient.gram.mul_vec(w))
                .collect();
            let rays = extreme_rays(&ineqs, 10).expect("chamber cone is pointed");
            *self.rays_cache.borrow_mut() = Some(rays);
        }
        self.rays_cache.borrow().clone().unwrap()
    }

    /// Codimension-2 faces of D0 as (wall i, wall j, pairing-is-1).
    fn faces2(&self) -> Vec<(usize, usize, bool)> {
        if self.faces2_cache.borrow().is_none() {
            let fs = faces_codim2(&self.d0)
                .into_iter()
                .map(|f| {
                    let a2 = f.ade_type == "A2".parse().unwrap();
                    (f.wall_indices.0, f.wall_indices.1, a2)
                })
                .collect();
            *self.faces2_cache.borrow_mut() = Some(fs);
        }
        self.faces2_cache.borrow().clone().unwrap()
    }

    /// Primitive isotropic rays in the closure of D0.
    fn iso_rays_d0(&self) -> Vec<Vec<Int>> {
        if self.iso_cache.borrow().is_none() {
            let rs = isotropic_rays(&self.d0)
                .into_iter()
                .map(|r| r.generator)
                .collect();
            *self.iso_cache.borrow_mut() = Some(rs);
        }
        self.iso_cache.borrow().clone().unwrap()
    }
}

// ---------------------------------------------------------------------
// random-word pruning
// ---------------------------------------------------------------------

/// Deterministic random words over the generator matrices; calls `merge`
/// for every (vector index, image vector) with the image present.
fn random_word_prune<F: FnMut(usize, &[Int])>(
    gens: &[IntMatrix],
    vectors: &[Vec<Int>],
    seed: u64,
    n_words: usize,
    mut merge: F,
) {
    if gens.is_empty() || vectors.is_empty() {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let invs: Vec<IntMatrix> = gens.iter().map(|g| g.unimodular_inverse()).collect();
    for _ in 0..n_words {
        let len = rng.gen_range(1..=20usize);
        let mut w = IntMatrix::identity(10);
        for _ in 0..len {
            let k = rng.gen_range(0..gens.len());
            let m = if rng.gen_bool(0.5) { &gens[k] } else { &invs[k] };
            w = w.mul(m);
        }
        for (i, v) in vectors.iter().enumerate() {
            let img = apply_row(&w, v);
            merge(i, &img);
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}
impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let lo = ra.min(rb);
            let hi = ra.max(rb);
            self.parent[hi] = lo;
        }
    }
}

/// Try to close the group generated by `gens` within `budget` elements;
/// `None` when the budget trips (group presumed infinite).
fn finite_closure(gens: &[IntMatrix], budget: usize) -> Option<Vec<IntMatrix>> {
    let id = IntMatrix::identity(10);
    let mut seen: HashSet<Vec<Vec<Int>>> = HashSet::new();
    seen.insert(id.rows_vec());
    let mut els = vec![id];
    let mut queue = 0usize;
    while queue < els.len() {
        let cur = els[queue].clone();
        queue += 1;
        for g in gens {
            let n = cur.mul(g);
            if seen.insert(n.rows_vec()) {
                if els.len() >= budget {
                    return None;
                }
                els.push(n);
            }
        }
    }
    Some(els)
}

// ---------------------------------------------------------------------
// rational curves
// ---------------------------------------------------------------------

impl EnriquesModel {
    /// Orbits of aut(Y) on the smooth rational curves.
    pub fn rational_curve_orbits(
        &self,
        av: &AutVolume,
        seed: u64,
        n_words: usize,
        budget: usize,
    ) -> Result<CurveOrbits, EnriquesError> {
        // R_temp: splitting wall roots over the V0 chambers
        let mut r_temp: BTreeMap<Vec<Int>, (usize, usize)> = BTreeMap::new();
        for (ri, rep) in av.reps.iter().enumerate() {
            for (i, w) in rep.walls.iter().enumerate() {
                if rep.split_mask >> i & 1 == 1 {
                    r_temp.entry(w.clone()).or_insert((ri, i));
                }
            }
        }
        let roots: Vec<Vec<Int>> = r_temp.keys().cloned().collect();
        let root_idx: HashMap<Vec<Int>, usize> =
            roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let mut uf = UnionFind::new(roots.len());
        let gen_mats: Vec<IntMatrix> = av.gens.iter().map(|g| g.g.clone()).collect();
        random_word_prune(&gen_mats, &roots, seed, n_words, |i, img| {
            if let Some(&j) = root_idx.get(img) {
                uf.union(i, j);
            }
        });
        let mut class_reps: Vec<usize> = Vec::new();
        let mut class_size: HashMap<usize, usize> = HashMap::new();
        for i in 0..roots.len() {
            let r = uf.find(i);
            *class_size.entry(r).or_insert(0) += 1;
            if r == i {
                class_reps.push(i);
            }
        }
        // exact per-curve chamber graphs
        let faces = self.faces2();
        let mut engines: Vec<(usize, Vec<ChamberVertex>)> = Vec::new();
        for &ci in &class_reps {
            let root = roots[ci].clone();
            let (ri, wi) = r_temp[&root];
            let mut seed_v = av.reps[ri].clone();
            seed_v.tag = wi;
            let res = self.curve_graph_orbits(&root, seed_v, &faces, budget)?;
            engines.push((ci, res));
        }
        // pairwise exact merging between remaining candidates
        let mut uf2 = UnionFind::new(roots.len());
        for i in 0..roots.len() {
            let r = uf.find(i);
            uf2.union(i, r);
        }
        for a in 0..engines.len() {
            'next_b: for b in a + 1..engines.len() {
                let (ca, va) = &engines[a];
                let (cb, vb) = &engines[b];
                if uf2.find(*ca) == uf2.find(*cb) {
                    continue;
                }
                for d1 in va.iter() {
                    for d2 in vb.iter() {
                        if self
                            .transporter_core(
                                d1,
                                d2,
                                Some((d1.tag as u32, d2.tag as u32)),
                                &|_| true,
                            )
                            .is_some()
                        {
                            uf2.union(*ca, *cb);
                            continue 'next_b;
                        }
                    }
                }
            }
        }
        let mut orbits: Vec<CurveClass> = Vec::new();
        let mut sizes: HashMap<usize, usize> = HashMap::new();
        for i in 0..roots.len() {
            let r = uf2.find(i);
            *sizes.entry(r).or_insert(0) += 1;
        }
        for (ci, v0) in &engines {
            if uf2.find(*ci) != *ci {
                continue;
            }
            let root = roots[*ci].clone();
            let sp = self.splits(&root)?.expect("R_temp roots split");
            orbits.push(CurveClass {
                root,
                split_pair: sp,
                vc0_size: v0.len(),
                class_size: sizes[ci],
            });
        }
        let expected = self.pair_label.0.components.len();
        let matches_expected = orbits.len() == expected;
        // finite aut(Y): enumerate the full curve set and its orbit sizes
        let finite_orbit_sizes = finite_closure(&gen_mats, 20_000).map(|els| {
            let mut curves: BTreeMap<Vec<Int>, usize> = BTreeMap::new();
            for (k, c) in self.curve_roots.iter().enumerate() {
                for g in &els {
                    curves.insert(apply_row(g, c), k);
                }
            }
            // orbit partition of the curve set under the closure
            let keys: Vec<Vec<Int>> = curves.keys().cloned().collect();
            let kidx: HashMap<Vec<Int>, usize> =
                keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
            let mut ufc = UnionFind::new(keys.len());
            for g in &els {
                for (i, k) in keys.iter().enumerate() {
                    let img = apply_row(g, k);
                    ufc.union(i, kidx[&img]);
                }
            }
            let mut sz: HashMap<usize, usize> = HashMap::new();
            for i in 0..keys.len() {
                let r = ufc.find(i);
                *sz.entry(r).or_insert(0) += 1;
            }
            let mut out: Vec<usize> = sz.values().copied().collect();
            out.sort_unstable();
            out
        });
        Ok(CurveOrbits {
            r_temp_size: roots.len(),
            orbits,
            expected,
            matches_expected,
            finite_orbit_sizes,
        })
    }

    /// The (V_C, E_C) orbit run for one curve class; returns V_{C,0}.
    fn curve_graph_orbits(
        &self,
        root: &[Int],
        seed_v: ChamberVertex,
        faces: &[(usize, usize, bool)],
        budget: usize,
    ) -> Result<Vec<ChamberVertex>, EnriquesError> {
        assert_eq!(&seed_v.walls[seed_v.tag], root);
        let root = root.to_vec();
        let oracle = GraphOracle {
            seed: seed_v,
            neighbors: Box::new(move |v: &ChamberVertex| {
                let ir = v.tag;
                let mut out = Vec::new();
                for &(a, b, is_a2) in faces {
                    if a != ir && b != ir {
                        continue;
                    }
                    let j = if a == ir { b } else { a };
                    if v.split_mask >> j & 1 == 1 {
                        continue;
                    }
                    let sp = reflection_in_root(&self.sy, &v.walls[j]);
                    let g2 = if is_a2 {
                        let s = reflection_in_root(&self.sy, &v.walls[ir]);
                        v.g.mul(&s.mul(&sp))
                    } else {
                        v.g.mul(&sp)
                    };
                    let mut nv = self.vertex(g2);
                    nv.tag = nv
                        .walls
                        .iter()
                        .position(|w| *w == root)
                        .expect("fixed root stays a wall in V_C");
                    out.push(nv);
                }
                out
            }),
            transporter: Box::new(|w: &ChamberVertex, rep: &ChamberVertex| {
                self.transporter_core(w, rep, Some((w.tag as u32, rep.tag as u32)), &|_| true)
            }),
            stabilizer: Box::new(|_v: &ChamberVertex| Vec::<AutElem>::new()),
            progress: None,
        };
        let res = enumerate(&oracle, budget).map_err(Self::budget_err)?;
        Ok(res.v0_list)
    }
}

// ---------------------------------------------------------------------
// elliptic fibrations
// ---------------------------------------------------------------------

impl EnriquesModel {
    /// Orbits of aut(Y) on the elliptic fibrations, with reducible-fiber
    /// tables.
    pub fn elliptic_fibration_orbits(
        &self,
        av: &AutVolume,
        seed: u64,
        n_words: usize,
        budget: usize,
    ) -> Result<FibrationOrbits, EnriquesError> {
        let iso = self.iso_rays_d0();
        let mut e_temp: BTreeMap<Vec<Int>, usize> = BTreeMap::new();
        for (ri, rep) in av.reps.iter().enumerate() {
            for gen in &iso {
                e_temp.entry(apply_row(&rep.g, gen)).or_insert(ri);
            }
        }
        let fs: Vec<Vec<Int>> = e_temp.keys().cloned().collect();
        let f_idx: HashMap<Vec<Int>, usize> =
            fs.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let mut uf = UnionFind::new(fs.len());
        let gen_mats: Vec<IntMatrix> = av.gens.iter().map(|g| g.g.clone()).collect();
        random_word_prune(&gen_mats, &fs, seed, n_words, |i, img| {
            if let Some(&j) = f_idx.get(img) {
                uf.union(i, j);
            }
        });
        let mut class_reps: Vec<usize> = Vec::new();
        for i in 0..fs.len() {
            if uf.find(i) == i {
                class_reps.push(i);
            }
        }
        // exact per-fibration chamber graphs
        let mut engines: Vec<(usize, Vec<ChamberVertex>)> = Vec::new();
        for &ci in &class_reps {
            let f = fs[ci].clone();
            let seed_v = av.reps[e_temp[&f]].clone();
            let res = self.fibration_graph_orbits(&f, seed_v, budget)?;
            engines.push((ci, res));
        }
        let mut uf2 = UnionFind::new(fs.len());
        for i in 0..fs.len() {
            let r = uf.find(i);
            uf2.union(i, r);
        }
        for a in 0..engines.len() {
            'next_b: for b in a + 1..engines.len() {
                let (ca, va) = &engines[a];
                let (cb, vb) = &engines[b];
                if uf2.find(*ca) == uf2.find(*cb) {
                    continue;
                }
                let (fa, fb) = (fs[*ca].clone(), fs[*cb].clone());
                for d1 in va.iter() {
                    for d2 in vb.iter() {
                        let fa2 = fa.clone();
                        let fb2 = fb.clone();
                        if self
                            .transporter_core(d1, d2, None, &move |g| {
                                apply_row(g, &fa2) == fb2
                            })
                            .is_some()
                        {
                            uf2.union(*ca, *cb);
                            continue 'next_b;
                        }
                    }
                }
            }
        }
        let mut orbits: Vec<FibrationClass> = Vec::new();
        for (ci, _) in &engines {
            if uf2.find(*ci) != *ci {
                continue;
            }
            orbits.push(self.fiber_data(&fs[*ci]));
        }
        let mut table_map: BTreeMap<(String, String), usize> = BTreeMap::new();
        for o in &orbits {
            let nm = type_list_string(&o.non_multiple);
            let mu = type_list_string(&o.multiple);
            *table_map.entry((nm, mu)).or_insert(0) += 1;
        }
        let table = table_map
            .into_iter()
            .map(|((a, b), c)| (a, b, c))
            .collect();
        Ok(FibrationOrbits { e_temp_size: fs.len(), orbits, table })
    }

    /// The (V_φ, E_φ) orbit run for one fibration class; returns V_{φ,0}.
    fn fibration_graph_orbits(
        &self,
        f: &[Int],
        seed_v: ChamberVertex,
        budget: usize,
    ) -> Result<Vec<ChamberVertex>, EnriquesError> {
        let f = f.to_vec();
        let f_n = f.clone();
        let f_t = f.clone();
        let f_s = f.clone();
        let nw = self.d0.walls.len();
        let oracle = GraphOracle {
            seed: seed_v,
            neighbors: Box::new(move |v: &ChamberVertex| {
                (0..nw)
                    .filter(|&i| {
                        v.split_mask >> i & 1 == 0
                            && self.sy.inner(&v.walls[i], &f_n).is_zero()
                    })
                    .map(|i| {
                        let s = reflection_in_root(&self.sy, &v.walls[i]);
                        self.vertex(v.g.mul(&s))
                    })
                    .collect()
            }),
            transporter: Box::new(move |w: &ChamberVertex, rep: &ChamberVertex| {
                let fx = f_t.clone();
                self.transporter_core(w, rep, None, &move |g| apply_row(g, &fx) == fx)
            }),
            stabilizer: Box::new(move |_v: &ChamberVertex| {
                let _ = &f_s;
                Vec::<AutElem>::new()
            }),
            progress: None,
        };
        let res = enumerate(&oracle, budget).map_err(Self::budget_err)?;
        Ok(res.v0_list)
    }

    /// Σ_φ for a fibration class: the classes of irreducible components
    /// of reducible fibers, then the affine decomposition.
    pub fn fiber_data(&self, f: &[Int]) -> FibrationClass {
        let a = &self.d0.interior;
        let fa = self.sy.inner(f, a);
        assert!(fa.is_positive(), "f lies in the closure of the positive cone");
        let bound = &fa * int(2);
        // pair matrix rows G·f, G·a and the rank-8 kernel
        let gf = self.sy.gram.mul_vec(f);
        let ga = self.sy.gram.mul_vec(a);
        let pair = IntMatrix::from_big_rows(&[gf.clone(), ga.clone()]);
        let k8_rows = kernel_basis(&pair);
        assert_eq!(k8_rows.len(), 8);
        let k8 = IntMatrix::from_big_rows(&k8_rows);
        let k8_gram = k8.mul(&self.sy.gram).mul(&k8.transpose());
        assert!(
            Lattice::new(k8_gram.clone()).map(|l| l.is_negative_definite()).unwrap_or(false),
            "⟨f, a⟩^⊥ is negative definite"
        );
        let k8_t = k8.transpose();
        let mut sigma_in: Vec<(Int, Vec<Int>)> = Vec::new();
        let mut c = Int::one();
        while c < bound {
            // r = (c/fa)·f + (kernel part); kernel part in k8 coordinates
            // solve for any rational solution with ⟨r,f⟩=0, ⟨r,a⟩=c
            let b = vec![Rat::zero(), Rat::from(c.clone())];
            if let Some(xp) = solve_rational(&pair, &b) {
                // offset of xp − (c/fa)f in k8 coordinates
                let cf = Rat::new(c.clone(), fa.clone());
                let perp_part: Vec<Rat> = xp
                    .iter()
                    .zip(f)
                    .map(|(x, fi)| x - &cf * Rat::from(fi.clone()))
                    .collect();
                if let Some(off) = solve_rational(&k8_t, &perp_part) {
                    let target = Rat::from(int(-2)) - self.rat_norm_span(&cf, f);
                    let ys = crate::exact_linalg::coset_vectors_of_norm(
                        &k8_gram, &off, &target,
                    );
                    for y in ys {
                        // r = (c/fa)f + y·k8
                        let mut r = vec![Rat::zero(); 10];
                        for (ri, fi) in r.iter_mut().zip(f) {
                            *ri = &cf * Rat::from(fi.clone());
                        }
                        for (j, yj) in y.iter().enumerate() {
                            for (ri, kj) in r.iter_mut().zip(&k8_rows[j]) {
                                *ri += yj * Rat::from(kj.clone());
                            }
                        }
                        if r.iter().all(|x| x.is_integer()) {
                            let ri: Vec<Int> =
                                r.iter().map(|x| x.to_integer()).collect();
                            assert_eq!(self.sy.norm(&ri), int(-2));
                            if self.splits_fast(&ri) {
                                sigma_in.push((c.clone(), ri));
                            }
                        }
                    }
                }
            }
            c += Int::one();
        }
        let sigma = self.greedy_simple(sigma_in);
        // decompose into connected affine components
        let comps = connected_components(&self.sy, &sigma);
        let mut non_multiple = Vec::new();
        let mut multiple = Vec::new();
        for comp in comps {
            assert!(comp.len() >= 2, "affine fiber diagrams have ≥ 2 vertices");
            let gram = IntMatrix::from_big_rows(
                &comp
                    .iter()
                    .map(|x| comp.iter().map(|y| self.sy.inner(x, y)).collect())
                    .collect::<Vec<_>>(),
            );
            let kb = kernel_basis(&gram);
            assert_eq!(kb.len(), 1, "affine component has a 1-dim radical");
            let mut w = kb[0].clone();
            if w.iter().any(|x| x.is_negative()) {
                w = vec_neg(&w);
            }
            assert!(w.iter().all(|x| x.is_positive()), "affine weights are positive");
            let mut fsum = vec![Int::zero(); 10];
            for (wi, root) in w.iter().zip(&comp) {
                for (fi, ri) in fsum.iter_mut().zip(root) {
                    *fi += wi * ri;
                }
            }
            let is_multiple = if fsum == *f {
                true
            } else if fsum == apply_scale(f, 2) {
                false
            } else {
                panic!("weighted root sum must be f or 2f");
            };
            // finite type: drop one weight-1 vertex
            let drop = w
                .iter()
                .position(|x| x.is_one())
                .expect("affine diagram has a weight-1 vertex");
            let rest: Vec<Vec<Int>> = comp
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, r)| r.clone())
                .collect();
            let rg = IntMatrix::from_big_rows(
                &rest
                    .iter()
                    .map(|x| rest.iter().map(|y| self.sy.inner(x, y)).collect())
                    .collect::<Vec<_>>(),
            );
            let t = classify(&rg).expect("finite part of an affine diagram").ade_type;
            if is_multiple {
                multiple.push(t);
            } else {
                non_multiple.push(t);
            }
        }
        assert!(multiple.len() <= 2, "at most two multiple fibers");
        non_multiple.sort_by_key(|t| format!("{t}"));
        multiple.sort_by_key(|t| format!("{t}"));
        FibrationClass { f: f.to_vec(), non_multiple, multiple }
    }

    fn rat_norm_span(&self, cf: &Rat, f: &[Int]) -> Rat {
        // norm of (c/fa)·f — zero since f is isotropic, kept for clarity
        let n = Rat::from(self.sy.norm(f));
        cf * cf * n
    }

    /// Greedy extraction of the irreducible (simple) classes from a list
    /// of splitting roots with their ⟨·, ample⟩ heights: accept r unless
    /// some already-accepted r′ of strictly smaller height has ⟨r,r′⟩ < 0.
    fn greedy_simple(&self, mut items: Vec<(Int, Vec<Int>)>) -> Vec<Vec<Int>> {
        items.sort();
        items.dedup();
        let mut kept: Vec<(Int, Vec<Int>)> = Vec::new();
        let mut i = 0usize;
        while i < items.len() {
            let h = items[i].0.clone();
            let mut j = i;
            let mut batch = Vec::new();
            while j < items.len() && items[j].0 == h {
                let r = &items[j].1;
                let blocked = kept.iter().any(|(kh, kr)| {
                    *kh < h && self.sy.inner(r, kr).is_negative()
                });
                if !blocked {
                    batch.push((h.clone(), r.clone()));
                }
                j += 1;
            }
            kept.extend(batch);
            i = j;
        }
        kept.into_iter().map(|(_, r)| r).collect()
    }
}

fn apply_scale(v: &[Int], s: i64) -> Vec<Int> {
    v.iter().map(|x| x * int(s)).collect()
}

fn connected_components(l: &Lattice, roots: &[Vec<Int>]) -> Vec<Vec<Vec<Int>>> {
    let n = roots.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0usize;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for b in 0..n {
                if comp[b] == usize::MAX && !l.inner(&roots[a], &roots[b]).is_zero() {
                    comp[b] = next;
                    stack.push(b);
                }
            }
        }
        next += 1;
    }
    (0..next)
        .map(|c| {
            roots
                .iter()
                .enumerate()
                .filter(|(i, _)| comp[*i] == c)
                .map(|(_, r)| r.clone())
                .collect()
        })
        .collect()
}

fn type_list_string(ts: &[ADEType]) -> String {
    if ts.is_empty() {
        return "-".into();
    }
    ts.iter().map(|t| format!("{t}")).collect::<Vec<_>>().join(", ")
}

// ---------------------------------------------------------------------
// RDP configurations
// ---------------------------------------------------------------------

impl EnriquesModel {
    /// Orbit table of RDP configurations: for every face of every V0
    /// chamber compute Γ(f) (splitting roots of contracted curves),
    /// dedup, then classify exact orbits through the (V_Γ, E_Γ) graphs.
    pub fn rdp_configurations(
        &self,
        av: &AutVolume,
        budget: usize,
    ) -> Result<RdpReport, EnriquesError> {
        let rays = self.rays_d0();
        let nw = self.d0.walls.len();
        // wall-activity bitset per ray
        let ray_masks: Vec<u128> = rays
            .iter()
            .map(|r| {
                let mut m = 0u128;
                for (i, w) in self.d0.walls.iter().enumerate() {
                    if self.sy.inner(r, w).is_zero() {
                        m |= 1 << i;
                    }
                }
                m
            })
            .collect();
        // enumerate all faces of D0 as closed ray subsets
        let all: Vec<u32> = (0..rays.len() as u32).collect();
        let mut seen_faces: HashSet<Vec<u32>> = HashSet::new();
        let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
        seen_faces.insert(all.clone());
        queue.push_back(all);
        let mut faces: Vec<Vec<u32>> = Vec::new();
        while let Some(face) = queue.pop_front() {
            faces.push(face.clone());
            for w in 0..nw {
                let sub: Vec<u32> = face
                    .iter()
                    .copied()
                    .filter(|&r| ray_masks[r as usize] >> w & 1 == 1)
                    .collect();
                if sub.is_empty() || sub.len() == face.len() {
                    continue;
                }
                if seen_faces.insert(sub.clone()) {
                    queue.push_back(sub);
                }
            }
        }
        // Γ(f) per face per V0 chamber
        let a0 = &self.d0.interior;
        let mut configs: BTreeMap<Vec<Vec<Int>>, usize> = BTreeMap::new();
        for face in &faces {
            let frows: Vec<Vec<Int>> =
                face.iter().map(|&r| self.sy.gram.mul_vec(&rays[r as usize])).collect();
            let kb = kernel_basis(&IntMatrix::from_big_rows(&frows));
            if kb.is_empty() {
                continue;
            }
            let bf = IntMatrix::from_big_rows(&kb);
            let gram_f = bf.mul(&self.sy.gram).mul(&bf.transpose());
            let ok = Lattice::new(gram_f.clone())
                .map(|l| l.is_negative_definite())
                .unwrap_or(false);
            if !ok {
                continue;
            }
            let roots0: Vec<Vec<Int>> = vectors_of_norm(&gram_f, -2)
                .iter()
                .map(|y| bf.transpose().mul_vec(y))
                .collect();
            if roots0.is_empty() {
                continue;
            }
            for (ri, rep) in av.reps.iter().enumerate() {
                let mut items: Vec<(Int, Vec<Int>)> = Vec::new();
                for r0 in &roots0 {
                    let mut r = apply_row(&rep.g, r0);
                    if !self.splits_fast(&r) {
                        continue;
                    }
                    let h = self.sy.inner(&r, a0);
                    assert!(!h.is_zero(), "splitting mirrors avoid the interior point");
                    if h.is_negative() {
                        r = vec_neg(&r);
                    }
                    items.push((self.sy.inner(&r, a0), r));
                }
                if items.is_empty() {
                    continue;
                }
                let mut gamma = self.greedy_simple(items);
                gamma.sort();
                gamma.dedup();
                if gamma.is_empty() {
                    continue;
                }
                configs.entry(gamma).or_insert(ri);
            }
        }
        let total_configs = configs.len();
        // classify each configuration and run the V_Γ graphs
        let mut by_type: BTreeMap<String, Vec<(Vec<Vec<Int>>, usize)>> = BTreeMap::new();
        for (gamma, ri) in configs {
            let gram = IntMatrix::from_big_rows(
                &gamma
                    .iter()
                    .map(|x| gamma.iter().map(|y| self.sy.inner(x, y)).collect())
                    .collect::<Vec<_>>(),
            );
            let t = classify(&gram)
                .map_err(|e| EnriquesError::Internal(format!("Γ type: {e:?}")))?
                .ade_type;
            by_type.entry(format!("{t}")).or_default().push((gamma, ri));
        }
        let mut per_type = Vec::new();
        let mut total_orbits = 0usize;
        for (tname, list) in &by_type {
            let n = list.len();
            let mut uf = UnionFind::new(n);
            let mut engines: Vec<Option<Vec<ChamberVertex>>> = vec![None; n];
            for i in 0..n {
                if uf.find(i) != i {
                    continue;
                }
                let (gamma_i, ri) = &list[i];
                let v0_i = self.gamma_graph_orbits(gamma_i, &av.reps[*ri], budget)?;
                engines[i] = Some(v0_i);
                // compare with earlier orbit representatives
                'prev: for j in 0..i {
                    if uf.find(j) != j || engines[j].is_none() {
                        continue;
                    }
                    let (gamma_j, _) = &list[j];
                    for d1 in engines[i].as_ref().unwrap() {
                        for d2 in engines[j].as_ref().unwrap() {
                            let gi = gamma_i.clone();
                            let gj = gamma_j.clone();
                            if self
                                .transporter_core(d1, d2, None, &move |g| {
                                    let mut img: Vec<Vec<Int>> =
                                        gi.iter().map(|r| apply_row(g, r)).collect();
                                    img.sort();
                                    img == gj
                                })
                                .is_some()
                            {
                                uf.union(i, j);
                                break 'prev;
                            }
                        }
                    }
                }
            }
            let orbits = (0..n).filter(|&i| uf.find(i) == i).count();
            total_orbits += orbits;
            per_type.push((tname.clone(), n, orbits));
        }
        Ok(RdpReport { total_configs, per_type, total_orbits })
    }

    /// The (V_Γ, E_Γ) orbit run for one configuration; returns V_{Γ,0}.
    fn gamma_graph_orbits(
        &self,
        gamma: &[Vec<Int>],
        witness: &ChamberVertex,
        budget: usize,
    ) -> Result<Vec<ChamberVertex>, EnriquesError> {
        let mu = gamma.len();
        let dim = 10 - mu;
        // P = ⟨Γ⟩^⊥ in S_Y⊗Q
        let grows: Vec<Vec<Int>> =
            gamma.iter().map(|r| self.sy.gram.mul_vec(r)).collect();
        let bp_rows = kernel_basis(&IntMatrix::from_big_rows(&grows));
        assert_eq!(bp_rows.len(), dim);
        let rays = self.rays_d0();
        let full_dim = |v: &ChamberVertex| -> bool {
            let mut on: Vec<Vec<Int>> = Vec::new();
            for ray in &rays {
                let img = apply_row(&v.g, ray);
                if gamma.iter().all(|r| self.sy.inner(&img, r).is_zero()) {
                    on.push(img);
                }
            }
            !on.is_empty() && IntMatrix::from_big_rows(&on).rank() == dim
        };
        let seed_v = self.find_vgamma_seed(gamma, &bp_rows, witness, &full_dim)?;
        let nw = self.d0.walls.len();
        let gamma_sorted: Vec<Vec<Int>> = {
            let mut g = gamma.to_vec();
            g.sort();
            g
        };
        let gs1 = gamma_sorted.clone();
        let gs2 = gamma_sorted.clone();
        let bp2 = bp_rows.clone();
        let oracle = GraphOracle {
            seed: seed_v,
            neighbors: Box::new(move |v: &ChamberVertex| {
                let mut out = Vec::new();
                for i in 0..nw {
                    if v.split_mask >> i & 1 == 1 {
                        continue;
                    }
                    // skip walls whose mirror contains P
                    if bp2
                        .iter()
                        .all(|p| self.sy.inner(p, &v.walls[i]).is_zero())
                    {
                        continue;
                    }
                    let s = reflection_in_root(&self.sy, &v.walls[i]);
                    let nv = self.vertex(v.g.mul(&s));
                    if full_dim(&nv) {
                        out.push(nv);
                    }
                }
                out
            }),
            transporter: Box::new(move |w: &ChamberVertex, rep: &ChamberVertex| {
                let gx = gs1.clone();
                self.transporter_core(w, rep, None, &move |g| {
                    let mut img: Vec<Vec<Int>> =
                        gx.iter().map(|r| apply_row(g, r)).collect();
                    img.sort();
                    img == gx
                })
            }),
            stabilizer: Box::new(move |_v: &ChamberVertex| {
                let _ = &gs2;
                Vec::<AutElem>::new()
            }),
            progress: None,
        };
        let res = enumerate(&oracle, budget).map_err(Self::budget_err)?;
        Ok(res.v0_list)
    }

    /// Find a chamber of V_Γ: walk from the witness chamber towards the
    /// projection of its interior point onto P, then search the chambers
    /// around that point.
    fn find_vgamma_seed(
        &self,
        gamma: &[Vec<Int>],
        _bp_rows: &[Vec<Int>],
        witness: &ChamberVertex,
        full_dim: &dyn Fn(&ChamberVertex) -> bool,
    ) -> Result<ChamberVertex, EnriquesError> {
        if full_dim(witness) {
            return Ok(witness.clone());
        }
        // x = projection of the witness interior point onto P
        let a_v = apply_row(&witness.g, &self.d0.interior);
        let ggram = IntMatrix::from_big_rows(
            &gamma
                .iter()
                .map(|x| gamma.iter().map(|y| self.sy.inner(x, y)).collect())
                .collect::<Vec<_>>(),
        );
        let pair: Vec<Rat> = gamma.iter().map(|r| Rat::from(self.sy.inner(&a_v, r))).collect();
        let coef = solve_rational(&ggram, &pair)
            .ok_or_else(|| EnriquesError::Internal("Γ Gram singular".into()))?;
        let mut x_rat: Vec<Rat> = a_v.iter().map(|v| Rat::from(v.clone())).collect();
        for (cj, r) in coef.iter().zip(gamma) {
            for (xi, ri) in x_rat.iter_mut().zip(r) {
                *xi -= cj * Rat::from(ri.clone());
            }
        }
        let x = crate::exact_linalg::primitive_from_rational(&x_rat);
        assert!(self.sy.norm(&x).is_positive(), "projected point is big");
        // walk towards x
        let mut cur = witness.clone();
        let mut guard = 0usize;
        loop {
            let neg = (0..cur.walls.len())
                .find(|&i| self.sy.inner(&x, &cur.walls[i]).is_negative());
            match neg {
                None => break,
                Some(i) => {
                    assert!(
                        cur.split_mask >> i & 1 == 0,
                        "walk towards a nef class stays inside Nef"
                    );
                    let s = reflection_in_root(&self.sy, &cur.walls[i]);
                    cur = self.vertex(cur.g.mul(&s));
                }
            }
            guard += 1;
            if guard > 100_000 {
                return Err(EnriquesError::Internal("V_Γ seed walk did not terminate".into()));
            }
        }
        // local search around x
        let mut seen: HashSet<Vec<Vec<Int>>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(cur.key.clone());
        queue.push_back(cur);
        let mut expanded = 0usize;
        while let Some(v) = queue.pop_front() {
            if full_dim(&v) {
                return Ok(v);
            }
            expanded += 1;
            if expanded > 10_000 {
                break;
            }
            for i in 0..v.walls.len() {
                if v.split_mask >> i & 1 == 1 {
                    continue;
                }
                if !self.sy.inner(&x, &v.walls[i]).is_zero() {
                    continue;
                }
                let s = reflection_in_root(&self.sy, &v.walls[i]);
                let nv = self.vertex(v.g.mul(&s));
                if seen.insert(nv.key.clone()) {
                    queue.push_back(nv);
                }
            }
        }
        Err(EnriquesError::Internal("no V_Γ chamber found around the projected point".into()))
    }
}

// ---------------------------------------------------------------------
// lifts to the K3 cover
// ---------------------------------------------------------------------

impl EnriquesModel {
    /// Lift the aut(Y) generators to aut(X, ε) and compute |K|.
    pub fn aut_x_lifts(&self, av: &AutVolume) -> AutXLifts {
        let lifts: Vec<IntMatrix> =
            av.gens.iter().map(|a| self.lift_to_sx(&a.g, &a.h)).collect();
        let m = self.sxm.rank();
        let mut neg = IntMatrix::identity(m);
        for i in 0..m {
            neg[(i, i)] = int(-1);
        }
        let eps = self.lift_to_sx(&IntMatrix::identity(10), &neg);
        let (_, _, e) = self.cde;
        let single_e8 = self.tau_tilde.components.len() == 1
            && self.tau_tilde.components[0].family == Family::E
            && self.tau_tilde.components[0].rank == 8;
        let k_order = if e == 1 {
            2
        } else if single_e8 {
            2
        } else {
            4
        };
        AutXLifts { lifts, eps, k_order }
    }
}
