//! Command-line driver: generate labeled pair datasets, train and optimize
//! classifiers, evaluate them, and run parameter grids from a TOML config.

use clap::{Args, Parser, Subcommand};
use conjugacy::config::{resolve_group, ExperimentConfig, Manifest};
use conjugacy::datagen::{build_collection, read_jsonl, write_jsonl, CollectionId, Dataset};
use conjugacy::error::{Error, Result};
use conjugacy::eval::EvalReport;
use conjugacy::features::{Extractor, PairRecipe};
use conjugacy::group::GroupHandle;
use conjugacy::learn::{featurize, forest, ntnn, tree, Model, ModelFile};
use num_traits::ToPrimitive;
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "conjugacy", version, about = "conjugacy decision experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the three splits of a pair collection
    Gen(GenArgs),
    /// Train a classifier on a generated dataset
    Train(TrainArgs),
    /// Greedy pattern-swap optimization of an n-tuple model
    Optimize(OptArgs),
    /// Evaluate a saved model on a dataset split
    Eval(EvalArgs),
    /// Run a parameter grid described by a TOML config
    Grid(GridArgs),
    /// Summarize a dataset directory or saved model
    Inspect(InspectArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    group: String,
    /// polycyclic presentation file for non-built-in groups
    #[arg(long)]
    presentation: Option<PathBuf>,
    #[arg(long, default_value = "d0")]
    collection: String,
    /// pairs per class per split
    #[arg(long, default_value_t = conjugacy::config::DEFAULT_PAIRS)]
    pairs: usize,
    #[arg(long, default_value_t = conjugacy::config::DEFAULT_LEN_MIN)]
    min_len: u64,
    #[arg(long, default_value_t = conjugacy::config::DEFAULT_LEN_MAX)]
    max_len: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// word pool size for pool-based collections (default 6x pairs)
    #[arg(long)]
    pool_size: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// directory produced by `gen`
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    recipe: String,
    /// tree, forest, or ntnn
    #[arg(long)]
    family: String,
    #[arg(long, default_value = "gini")]
    criterion: String,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, default_value_t = 10)]
    trees: usize,
    /// forest aggregation: vote or average
    #[arg(long, default_value = "vote")]
    vote: String,
    /// active patterns per class (ntnn)
    #[arg(long, default_value_t = 20)]
    m: usize,
    /// pattern size (ntnn)
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// ntnn scoring: voting or log_voting
    #[arg(long, default_value = "voting")]
    ntnn_criterion: String,
    #[arg(long, default_value_t = ntnn::DEFAULT_THETA_ALPHA)]
    theta_alpha: f64,
    #[arg(long, default_value_t = ntnn::DEFAULT_RESTARTS)]
    restarts: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OptArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = ntnn::DEFAULT_THETA_OMEGA)]
    theta_omega: f64,
    /// maximum candidate patterns to try (default: one pass per class)
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "sv")]
    split: String,
    #[arg(long)]
    model: PathBuf,
    /// also write the report as JSON
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e);
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Train(a) => cmd_train(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Inspect(a) => cmd_inspect(a),
    }
}

/// Loads the group a dataset directory was generated for, using the
/// presentation file copied into the directory when one was needed.
fn group_for_dir(dir: &Path) -> Result<GroupHandle> {
    let meta_path = dir.join("si.meta.json");
    let meta: conjugacy::datagen::DatasetMeta =
        serde_json::from_reader(std::fs::File::open(&meta_path)?)?;
    let pres = dir.join("group.pcp");
    let pres = pres.exists().then(|| pres.to_string_lossy().into_owned());
    resolve_group(&meta.group, pres.as_deref())
}

fn load_split(dir: &Path, g: &GroupHandle, split: &str) -> Result<Dataset> {
    read_jsonl(&dir.join(format!("{}.jsonl", split)), g)
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let g = resolve_group(&a.group, a.presentation.as_ref().and_then(|p| p.to_str()))?;
    let id = CollectionId::parse(&a.collection)?;
    std::fs::create_dir_all(&a.out)?;
    if let Some(p) = &a.presentation {
        std::fs::copy(p, a.out.join("group.pcp"))?;
    }
    let splits = build_collection(&g, id, a.pairs, (a.min_len, a.max_len), a.seed, a.pool_size)?;
    for ds in splits.iter() {
        let path = a.out.join(format!("{}.jsonl", ds.meta.split));
        write_jsonl(ds, &g, &path)?;
        println!("wrote {} ({} pairs)", path.display(), ds.pairs.len());
    }
    let digest = format!(
        "{}/{}/{}/{}..{}/{}",
        a.group, a.collection, a.pairs, a.min_len, a.max_len, a.seed
    );
    Manifest::new(&digest, "gen").write(&a.out)?;
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let g = group_for_dir(&a.data)?;
    let recipe = PairRecipe::parse(&a.recipe)?;
    let extractor = Extractor::new(&g, recipe)?;
    let si = load_split(&a.data, &g, "si")?;
    let (x, y) = featurize(&si, &g, &extractor)?;
    let model = match a.family.as_str() {
        "tree" => {
            let criterion = tree::Criterion::parse(&a.criterion)?;
            let params = tree::TreeParams {
                criterion,
                depth_limit: Some(a.depth.unwrap_or_else(|| tree::default_depth_limit(x.len()))),
                feature_subset: None,
            };
            Model::Tree { tree: tree::train_tree(&x, &y, &params, None)?, criterion }
        }
        "forest" => {
            let params = forest::ForestParams {
                trees: a.trees,
                criterion: tree::Criterion::parse(&a.criterion)?,
                depth_limit: Some(a.depth.unwrap_or_else(|| tree::default_depth_limit(x.len()))),
                feature_subset: None,
                vote_rule: match a.vote.as_str() {
                    "vote" => forest::VoteRule::Vote,
                    "average" => forest::VoteRule::Average,
                    other => return Err(Error::Config(format!("unknown vote rule '{}'", other))),
                },
                seed: a.seed,
            };
            Model::Forest(forest::train_forest(&x, &y, &params)?)
        }
        "ntnn" => {
            let so = load_split(&a.data, &g, "so")?;
            let (sox, soy) = featurize(&so, &g, &extractor)?;
            let criterion = ntnn::VoteCriterion::parse(&a.ntnn_criterion)?;
            Model::Ntnn(ntnn::ntnn_train_with_restarts(
                &x,
                &y,
                &sox,
                &soy,
                a.m,
                a.p,
                criterion,
                a.theta_alpha,
                a.restarts,
                a.seed,
            )?)
        }
        other => return Err(Error::Config(format!("unknown model family '{}'", other))),
    };
    let mf = ModelFile::new(&g.name, recipe.name(), model);
    mf.save(&a.out)?;
    println!("trained {} model -> {}", mf.model.family(), a.out.display());
    Ok(())
}

fn cmd_optimize(a: OptArgs) -> Result<()> {
    let g = group_for_dir(&a.data)?;
    let mut mf = ModelFile::load(&a.model)?;
    let recipe = PairRecipe::parse(&mf.recipe)?;
    mf.check_compatible(&g.name, recipe.name())?;
    let Model::Ntnn(model) = &mut mf.model else {
        return Err(Error::Config(
            "pattern-swap optimization only applies to ntnn models".into(),
        ));
    };
    let extractor = Extractor::new(&g, recipe)?;
    let si = load_split(&a.data, &g, "si")?;
    let so = load_split(&a.data, &g, "so")?;
    let (six, siy) = featurize(&si, &g, &extractor)?;
    let (sox, soy) = featurize(&so, &g, &extractor)?;
    let params = ntnn::OptimizeParams {
        theta_omega: a.theta_omega,
        budget: a.budget.map(u128::from),
    };
    let out = ntnn::ntnn_optimize(model, &six, &siy, &sox, &soy, &params)?;
    mf.save(&a.out)?;
    println!(
        "optimized: accuracy {:.4} after {} swaps ({} candidates tried){}",
        out.accuracy,
        out.swaps,
        out.candidates_tried,
        if out.reached_goal { ", goal reached" } else { "" }
    );
    Ok(())
}

fn eval_model(
    g: &GroupHandle,
    mf: &ModelFile,
    extractor: &Extractor,
    ds: &Dataset,
) -> Result<EvalReport> {
    let (x, y) = featurize(ds, g, extractor)?;
    let preds: Vec<_> = x.iter().map(|xi| mf.model.predict(xi)).collect();
    let lengths: Vec<u64> = ds
        .pairs
        .iter()
        .map(|p| {
            g.element_length(&p.u)
                .map(|l| l.to_u64().unwrap_or(u64::MAX))
        })
        .collect::<Result<_>>()?;
    EvalReport::build(&g.name, &mf.recipe, mf.model.family(), &lengths, &y, &preds)
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let g = group_for_dir(&a.data)?;
    let mf = ModelFile::load(&a.model)?;
    let recipe = PairRecipe::parse(&mf.recipe)?;
    mf.check_compatible(&g.name, recipe.name())?;
    let extractor = Extractor::new(&g, recipe)?;
    let ds = load_split(&a.data, &g, &a.split)?;
    let report = eval_model(&g, &mf, &extractor, &ds)?;
    print!("{}", report);
    if let Some(out) = a.out {
        std::fs::write(&out, serde_json::to_string_pretty(&report)?)?;
        println!("report written to {}", out.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct GridCell {
    family: String,
    params: String,
    outcome: std::result::Result<f64, String>,
}

fn cmd_grid(a: GridArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&a.config)?;
    let g = cfg.resolve_group()?;
    let id = CollectionId::parse(&cfg.collection)?;
    let recipe = PairRecipe::parse(&cfg.recipe)?;
    let extractor = Extractor::new(&g, recipe)?;
    std::fs::create_dir_all(&a.out)?;
    Manifest::new(&cfg.digest(), "grid").write(&a.out)?;
    println!(
        "grid: group {} collection {} recipe {} pairs {} lengths {}..{}",
        g.name, cfg.collection, cfg.recipe, cfg.pairs, cfg.len_min, cfg.len_max
    );
    let splits = build_collection(
        &g,
        id,
        cfg.pairs,
        (cfg.len_min, cfg.len_max),
        cfg.seed,
        cfg.pool_size,
    )?;
    for ds in splits.iter() {
        write_jsonl(ds, &g, &a.out.join(format!("{}.jsonl", ds.meta.split)))?;
    }
    let (six, siy) = featurize(&splits.si, &g, &extractor)?;
    let (sox, soy) = featurize(&splits.so, &g, &extractor)?;
    let (svx, svy) = featurize(&splits.sv, &g, &extractor)?;
    let sv_acc = |model: &Model| -> f64 {
        let correct = svx
            .iter()
            .zip(svy.iter())
            .filter(|(xi, yi)| model.predict(xi) == conjugacy::learn::Prediction::Class(**yi))
            .count();
        correct as f64 / svx.len() as f64
    };
    let mut cells: Vec<GridCell> = Vec::new();
    if let Some(grid) = &cfg.forest {
        for &trees in &grid.trees {
            for crit in &grid.criteria {
                let params = format!("trees={} criterion={}", trees, crit);
                let outcome = tree::Criterion::parse(crit)
                    .and_then(|criterion| {
                        forest::train_forest(
                            &six,
                            &siy,
                            &forest::ForestParams {
                                trees,
                                criterion,
                                depth_limit: Some(tree::default_depth_limit(six.len())),
                                feature_subset: None,
                                vote_rule: forest::VoteRule::Vote,
                                seed: cfg.seed,
                            },
                        )
                    })
                    .map(|f| sv_acc(&Model::Forest(f)))
                    .map_err(|e| e.to_string());
                cells.push(GridCell { family: "forest".into(), params, outcome });
            }
        }
    }
    if let Some(grid) = &cfg.ntnn {
        let criterion = ntnn::VoteCriterion::parse(&grid.criterion)?;
        for &m in &grid.m {
            for &p in &grid.p {
                let params = format!("m={} p={} criterion={}", m, p, grid.criterion);
                let outcome = ntnn::ntnn_train_with_restarts(
                    &six,
                    &siy,
                    &sox,
                    &soy,
                    m,
                    p,
                    criterion,
                    grid.theta_alpha.unwrap_or(ntnn::DEFAULT_THETA_ALPHA),
                    grid.restarts.unwrap_or(ntnn::DEFAULT_RESTARTS),
                    cfg.seed,
                )
                .and_then(|mut model| {
                    if grid.optimize {
                        ntnn::ntnn_optimize(
                            &mut model,
                            &six,
                            &siy,
                            &sox,
                            &soy,
                            &ntnn::OptimizeParams {
                                theta_omega: grid
                                    .theta_omega
                                    .unwrap_or(ntnn::DEFAULT_THETA_OMEGA),
                                budget: None,
                            },
                        )?;
                    }
                    Ok(model)
                })
                .map(|model| sv_acc(&Model::Ntnn(model)))
                .map_err(|e| e.to_string());
                cells.push(GridCell { family: "ntnn".into(), params, outcome });
            }
        }
    }
    for cell in &cells {
        match &cell.outcome {
            Ok(acc) => println!("  {:>6}  {:<40} accuracy {:.4}", cell.family, cell.params, acc),
            Err(e) => println!("  {:>6}  {:<40} failed: {}", cell.family, cell.params, e),
        }
    }
    std::fs::write(
        a.out.join("results.json"),
        serde_json::to_string_pretty(&cells)?,
    )?;
    println!("results written to {}", a.out.join("results.json").display());
    Ok(())
}

fn cmd_inspect(a: InspectArgs) -> Result<()> {
    if let Some(dir) = &a.data {
        let g = group_for_dir(dir)?;
        for split in conjugacy::datagen::SPLITS {
            let ds = load_split(dir, &g, split)?;
            let conj = ds.pairs.iter().filter(|p| p.label == 1).count();
            println!(
                "{}: group {} collection {} seed {} lengths {}..{}  {} pairs ({} conjugate)",
                split,
                ds.meta.group,
                ds.meta.collection,
                ds.meta.seed,
                ds.meta.len_min,
                ds.meta.len_max,
                ds.pairs.len(),
                conj
            );
        }
    }
    if let Some(path) = &a.model {
        let mf = ModelFile::load(path)?;
        println!(
            "model: family {} group {} recipe {} (format v{})",
            mf.model.family(),
            mf.group,
            mf.recipe,
            mf.version
        );
        match &mf.model {
            Model::Tree { tree, .. } => println!("  depth {}", tree.depth()),
            Model::Forest(f) => println!(
                "  {} trees, {} candidate features per split",
                f.trees.len(),
                f.feature_subset
            ),
            Model::Ntnn(n) => println!(
                "  m={} p={} dim={} train counts {:?}",
                n.m, n.p, n.dim, n.train_counts
            ),
        }
    }
    if a.data.is_none() && a.model.is_none() {
        return Err(Error::Config("pass --data and/or --model".into()));
    }
    Ok(())
}
