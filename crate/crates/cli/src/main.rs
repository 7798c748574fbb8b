//! `fusionkit`: classify subgroups, dump linking systems, verify the
//! pruning theorem and compute nerve homology from group or tower JSON.
//!
//! Exit codes: 0 success, 1 invalid certificate or failed hypothesis,
//! 2 bad input, 3 a size cap was hit.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::{json, Value};

use fusionkit::catkit::{homology, nerve};
use fusionkit::fusion::{fusion_from_group, FusionSystem};
use fusionkit::group::{group_from_json, FiniteGroup};
use fusionkit::linking::{linking_from_group, LinkingSystem};
use fusionkit::prune::{
    centric_radical_collection, class_table_text, classify_report, validate_collection, verify_theorem, CollectionSpec,
    TheoremOptions,
};
use fusionkit::report::{fusion_report, homology_report, linking_report, stamp, theorem_report};
use fusionkit::tower::{validate_bullet_oracle, IdentityBullet, TowerGroup};
use fusionkit::{Caps, Error};

#[derive(Parser)]
#[command(name = "fusionkit", version, about = "Fusion systems, linking systems and the pruning theorem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// F-conjugacy classes with centric, radical and P̃ data (fusion-v1).
    Classify(Input),
    /// Objects, hom-set sizes and axiom checks of the linking system (linking-v1).
    Linking(Input),
    /// Certificate that pruning to the collection preserves the nerve (theorem-v1).
    Verify(Verify),
    /// Nerve homology of L and of L^H.
    Homology(Verify),
}

#[derive(Args)]
struct Input {
    /// Group JSON: a multiplication table or permutation generators.
    #[arg(long, conflicts_with = "tower", required_unless_present = "tower")]
    group: Option<PathBuf>,
    /// Tower JSON; its deepest level is used.
    #[arg(long)]
    tower: Option<PathBuf>,
    /// The prime. Defaults to the tower's prime.
    #[arg(long)]
    p: Option<u64>,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Omit the timestamp so identical inputs give identical bytes.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct Verify {
    #[command(flatten)]
    input: Input,
    /// Highest homology degree compared.
    #[arg(long)]
    dmax: Option<usize>,
    /// Collection JSON; the centric-radical subgroups by default.
    #[arg(long)]
    collection: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_cap() {
            3
        } else if matches!(e, Error::InvalidInput(_) | Error::InvalidPermutation(_)) {
            2
        } else {
            1
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = std::result::Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) })
}

struct Loaded {
    group: Arc<FiniteGroup>,
    p: u64,
    tower: Option<(TowerGroup, usize)>,
}

fn load(input: &Input, caps: &Caps) -> Result<Loaded, Failure> {
    if let Some(path) = &input.tower {
        let tower = TowerGroup::from_json(&read(path)?, caps)?;
        if input.p.is_some_and(|p| p != tower.prime()) {
            return Err(Error::InvalidInput(format!("--p differs from the tower prime {}", tower.prime())).into());
        }
        let level = tower.depth();
        let group = tower.truncate(level)?;
        let p = tower.prime();
        return Ok(Loaded { group, p, tower: Some((tower, level)) });
    }
    let path = input.group.as_ref().expect("clap requires --group or --tower");
    let group = Arc::new(group_from_json(&read(path)?, caps)?);
    let p = input.p.ok_or_else(|| Failure { code: 2, message: "--p is required with --group".into() })?;
    Ok(Loaded { group, p, tower: None })
}

fn fusion(loaded: &Loaded, caps: &Caps) -> Result<Arc<FusionSystem>, Failure> {
    info!("group of order {}, p = {}", loaded.group.order(), loaded.p);
    Ok(Arc::new(fusion_from_group(loaded.group.clone(), loaded.p, caps)?))
}

fn linking(f: Arc<FusionSystem>) -> Result<Arc<LinkingSystem>, Failure> {
    let l = linking_from_group(f)?;
    info!("linking system: {} objects, {} morphisms", l.n_objects(), l.n_morphisms());
    Ok(Arc::new(l))
}

fn emit(input: &Input, mut report: Value) -> Result<(), Failure> {
    if !input.no_timestamp {
        stamp(&mut report);
    }
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    match &input.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn collection(args: &Verify, f: &FusionSystem) -> Result<Option<Vec<usize>>, Failure> {
    let Some(path) = &args.collection else { return Ok(None) };
    let spec: CollectionSpec = serde_json::from_str(&read(path)?)
        .map_err(|e| Error::InvalidInput(format!("collection JSON: {e}")))?;
    Ok(Some(spec.resolve(f)?))
}

fn dmax(args: &Verify, caps: &Caps) -> usize {
    args.dmax.unwrap_or(caps.dmax)
}

fn cmd_classify(input: &Input, caps: &Caps) -> Outcome {
    let loaded = load(input, caps)?;
    let f = fusion(&loaded, caps)?;
    let mut report = fusion_report(&f)?;
    if let Some((tower, level)) = &loaded.tower {
        let v = validate_bullet_oracle(tower, &IdentityBullet, *level, caps)?;
        report["tower"] = json!({ "rank": tower.rank(), "level": level, "identity_oracle": v });
    }
    if input.out.is_some() {
        print!("{}", class_table_text(&classify_report(&f)?));
    }
    emit(input, report)?;
    Ok(0)
}

fn cmd_linking(input: &Input, caps: &Caps) -> Outcome {
    let loaded = load(input, caps)?;
    let l = linking(fusion(&loaded, caps)?)?;
    let report = linking_report(&l)?;
    let ok = report["valid"] == true;
    emit(input, report)?;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_verify(args: &Verify, caps: &Caps) -> Outcome {
    let loaded = load(&args.input, caps)?;
    let f = fusion(&loaded, caps)?;
    let dmax = dmax(args, caps);
    let opts = TheoremOptions { collection: collection(args, &f)?, dmax, step_homology: Some(dmax) };
    let l = linking(f)?;
    let cert = verify_theorem(&l, &IdentityBullet, &opts)?;
    let valid = cert.is_valid();
    if let Some(failure) = cert.first_failure() {
        eprintln!("certificate invalid: {failure}");
    }
    emit(&args.input, theorem_report(&cert))?;
    Ok(if valid { 0 } else { 1 })
}

fn cmd_homology(args: &Verify, caps: &Caps) -> Outcome {
    let loaded = load(&args.input, caps)?;
    let f = fusion(&loaded, caps)?;
    let h = match collection(args, &f)? {
        Some(h) => validate_collection(&f, &h)?,
        None => centric_radical_collection(&f)?,
    };
    let l = linking(f)?;
    let objects: Vec<_> = h.iter().filter_map(|&id| l.object_of_id(id)).collect();
    let lh = l.full_subcategory(&objects, "L^H");
    let dmax = dmax(args, caps);
    let mut nerves = Vec::new();
    for (name, cat) in [("L", l.cat().as_ref()), ("L^H", lh.cat.as_ref())] {
        nerves.push((name.to_string(), homology(&nerve(cat, dmax, caps)?)?));
    }
    emit(&args.input, homology_report(loaded.p, dmax, &nerves))?;
    Ok(0)
}

fn run(cli: &Cli) -> Outcome {
    let caps = Caps::default();
    let threads = match &cli.command {
        Command::Classify(i) | Command::Linking(i) => i.threads,
        Command::Verify(v) | Command::Homology(v) => v.input.threads,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { code: 2, message: format!("--threads: {e}") })?;
    }
    match &cli.command {
        Command::Classify(i) => cmd_classify(i, &caps),
        Command::Linking(i) => cmd_linking(i, &caps),
        Command::Verify(v) => cmd_verify(v, &caps),
        Command::Homology(v) => cmd_homology(v, &caps),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("FUSIONKIT_LOG")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
