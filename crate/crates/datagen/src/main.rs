//! Generator for the bundled data files: walks the genus of the rank-16
//! complement, glues each class to L10(2) inside L26, walks the Conway
//! chamber onto the Vinberg interior point, enumerates the induced
//! chamber, and (in later stages) names the needed embedding types and
//! assembles the pair table.

mod borcherds;
mod cache;
mod genus_walk;
mod glue;
mod pairs;

use anyhow::{Context, Result};
use cache::{ClassCache, GenusCache};
use chamber_forge_core::chambers::{chamber_stabilizer, vinberg_chamber, Chamber};
use chamber_forge_core::lattices::l10;
use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(about = "generate the bundled chamber/pair data files")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the 17 genus classes of the rank-16 complement.
    Genus {
        #[arg(long, default_value_t = 0x00c0_ffee)]
        seed: u64,
    },
    /// Glue, walk, and enumerate the induced chamber for each class.
    Chambers {
        /// restrict to one class index (0-based) for debugging
        #[arg(long)]
        only: Option<usize>,
    },
    /// Print the fingerprint table of all processed classes.
    Report,
    /// List all admissible (τ, τ̄) pairs rank by rank.
    PairsExplore,
    /// Print the computed invariants of one (τ, τ̄) pair.
    PairsRow { tau: String, taubar: String },
    /// Compute invariants for every row of the pair table.
    PairsScan,
    /// Report the possible S_X/M_R quotients of one (τ, τ̄) pair.
    PairsSx { tau: String, taubar: String },
    /// Write the cited pair records to `<out>/pairs/table184.json`.
    PairsEmit {
        #[arg(long, default_value = "data")]
        out: std::path::PathBuf,
    },
}

fn run_genus(seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = genus_walk::enumerate_genus(&mut rng, 17)?;
    let cache = GenusCache {
        grams: classes
            .iter()
            .map(|c| cache::mat_to_strings(&c.gram_neg()))
            .collect(),
        theta_heads: classes
            .iter()
            .map(|c| (0..4).map(|k| c.count(k)).collect())
            .collect(),
    };
    cache::save_json(&cache::work_dir().join("genus.json"), &cache)?;
    println!("found {} genus classes:", classes.len());
    for (i, _c) in classes.iter().enumerate() {
        println!("  class {i:2}: theta head {:?}", cache.theta_heads[i]);
    }
    Ok(())
}

fn process_class(i: usize, k_gram: &chamber_forge_core::IntMatrix) -> Result<ClassCache> {
    eprintln!("class {i}: gluing");
    let ge = glue::glue_l26(k_gram)?;
    eprintln!("class {i}: initial Weyl vector");
    let w0 = borcherds::initial_weyl(&ge)?;
    eprintln!("class {i}: walking towards the Vinberg interior point");
    let w = borcherds::walk_to_a0(&ge, w0)?;
    borcherds::verify_weyl(&ge, &w)?;
    eprintln!("class {i}: enumerating induced walls");
    let induced = borcherds::induced_chamber(&ge, &w)?;
    let (walls, pairs, n4k, stab) = match induced {
        borcherds::Induced::Infinite => {
            eprintln!("class {i}: induced chamber has infinitely many walls");
            let n4k = chamber_forge_core::exact_linalg::vectors_of_norm(
                &ge.k_gram, -4,
            )
            .len();
            (None, None, n4k, None)
        }
        borcherds::Induced::Finite(wd) => {
            eprintln!(
                "class {i}: {} walls, {} (root, z) pairs, N4(K) = {}",
                wd.walls.len(),
                wd.pairs,
                wd.n4k
            );
            let d0 = Chamber::new(
                l10(),
                wd.walls.clone(),
                vinberg_chamber().interior,
            );
            let sym = chamber_stabilizer(&d0)
                .map_err(|e| anyhow::anyhow!("stabilizer: {e:?}"))?;
            let order = sym.order.to_u64().context("stabilizer order overflow")?;
            eprintln!(
                "class {i}: |O(L10, D0)| = {order}, transitive on walls: {}",
                sym.transitive_on_walls()
            );
            (Some(wd.walls.clone()), Some(wd.pairs), wd.n4k, Some(order))
        }
    };
    Ok(ClassCache {
        index: i,
        gram_l26: cache::mat_to_strings(&ge.l26.gram),
        s_basis: cache::mat_to_strings(&ge.s_basis),
        k_basis: cache::mat_to_strings(&ge.k_basis),
        k_gram: cache::mat_to_strings(&ge.k_gram),
        weyl: cache::vec_to_strings(&w),
        walls: walls.map(|ws| ws.iter().map(|r| cache::vec_to_strings(r)).collect()),
        pairs,
        n4k,
        stabilizer_order: stab,
    })
}

fn run_chambers(only: Option<usize>) -> Result<()> {
    let gc: GenusCache = cache::load_json(&cache::work_dir().join("genus.json"))
        .context("run the `genus` stage first")?;
    for (i, g) in gc.grams.iter().enumerate() {
        if let Some(o) = only {
            if o != i {
                continue;
            }
        }
        let path = cache::work_dir().join(format!("class_{i:02}.json"));
        if path.exists() {
            eprintln!("class {i}: cached, skipping");
            continue;
        }
        let k_gram = cache::strings_to_mat(g)?;
        let cc = process_class(i, &k_gram)?;
        cache::save_json(&path, &cc)?;
    }
    Ok(())
}

fn run_report() -> Result<()> {
    let gc: GenusCache = cache::load_json(&cache::work_dir().join("genus.json"))?;
    println!("{:>5} {:>7} {:>8} {:>7} {:>12} {:>20}", "class", "walls", "pairs", "N4(K)", "stab", "theta head");
    for i in 0..gc.grams.len() {
        let path = cache::work_dir().join(format!("class_{i:02}.json"));
        if !path.exists() {
            println!("{i:>5} (not processed)");
            continue;
        }
        let cc: ClassCache = cache::load_json(&path)?;
        println!(
            "{:>5} {:>7} {:>8} {:>7} {:>12} {:>20}",
            i,
            cc.walls.as_ref().map_or("infty".into(), |w| w.len().to_string()),
            cc.pairs.map_or("-".into(), |p| p.to_string()),
            cc.n4k,
            cc.stabilizer_order.map_or("-".into(), |s| s.to_string()),
            format!("{:?}", gc.theta_heads[i]),
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Genus { seed } => run_genus(seed),
        Cmd::Chambers { only } => run_chambers(only),
        Cmd::Report => run_report(),
        Cmd::PairsExplore => pairs::run_explore(),
        Cmd::PairsRow { tau, taubar } => pairs::run_row(&tau, &taubar),
        Cmd::PairsScan => pairs::run_scan(),
        Cmd::PairsSx { tau, taubar } => pairs::run_sx(&tau, &taubar),
        Cmd::PairsEmit { out } => pairs::run_emit(&out),
    }
}
