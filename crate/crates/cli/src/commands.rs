//! Command-line interface.

use std::fs;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fdms_core::dataio::{self, SynergyDocument};
use fdms_core::fdms::{build_fdms, build_grasp_synergy, build_task_specific, AssignmentSpec, FunctionAssignment};
use fdms_core::hand::HandModel;
use fdms_core::notation::{fdms_unit_catalog, kamakura_catalog, parse_movement_unit, FunctionUnit};
use fdms_core::simtasks::{
    bundled_script, standard_database, synthesize_grasp_dataset, synthesize_task_sequences, Scenario, TaskKind,
    TaskSpec, BUNDLED_SEED,
};
use fdms_core::switching::{run_script, RuntimeState, SynergyDatabase, SynergyKind, TaskScript, DB_INDEX_FILE};
use fdms_core::synergy::{reconstruction_mse, Centering, PostureSequence};
use serde::Serialize;

use crate::service::{self, AppState};

#[derive(Debug, Parser)]
#[command(name = "fdms", version, about = "Functionally divided manipulation synergies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a synergy from posture CSV files
    Fit(FitArgs),
    /// Approximate postures through a synergy
    Approx(ApproxArgs),
    /// Success rate against component count for a simulated task
    Eval(EvalArgs),
    /// Movement and function unit catalogs
    #[command(subcommand)]
    Units(UnitsCommand),
    /// Split a movement unit into single-group units
    Decompose { unit: String },
    /// Synergy database maintenance
    #[command(subcommand)]
    Db(DbCommand),
    /// Generate synthetic posture recordings
    Gen(GenArgs),
    /// Replay CSV streams through a task script
    Run(RunArgs),
    /// Live steering service
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CenteringArg {
    Centered,
    Uncentered,
}

impl From<CenteringArg> for Centering {
    fn from(c: CenteringArg) -> Self {
        match c {
            CenteringArg::Centered => Centering::Centered,
            CenteringArg::Uncentered => Centering::Uncentered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Scissors,
    Switch,
}

impl From<TaskArg> for TaskKind {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Scissors => TaskKind::Scissors,
            TaskArg::Switch => TaskKind::Switch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Grasp,
    Scissors,
    Switch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Grasp,
    TaskSpecific,
    Fdms,
}

impl From<KindArg> for SynergyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Grasp => SynergyKind::Grasp,
            KindArg::TaskSpecific => SynergyKind::TaskSpecific,
            KindArg::Fdms => SynergyKind::Fdms,
        }
    }
}

#[derive(Debug, Args)]
pub struct HandArg {
    /// Hand model JSON (defaults to the bundled 10-DoF hand)
    #[arg(long)]
    pub hand: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Posture CSV; several files fit a task-specific synergy
    #[arg(long, required = true)]
    pub data: Vec<PathBuf>,
    /// Function unit such as MMMFF, or a JSON assignment file
    #[arg(long)]
    pub assignment: Option<String>,
    #[arg(long, value_enum, default_value = "centered")]
    pub centering: CenteringArg,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub hand: HandArg,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long)]
    pub synergy: PathBuf,
    #[arg(long)]
    pub ns: usize,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    #[arg(long)]
    pub db: PathBuf,
    #[arg(long, default_value_t = BUNDLED_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Task spec JSON overriding the bundled one
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub hand: HandArg,
}

#[derive(Debug, Subcommand)]
pub enum UnitsCommand {
    List {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum DbCommand {
    /// Add a synergy file to a database directory
    Register {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        synergy: PathBuf,
    },
    List {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build the grasp synergy and the twelve FDMS from one grasp dataset
    Build {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = BUNDLED_SEED)]
        seed: u64,
        /// Grasp CSV to fit instead of the synthetic dataset
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "centered")]
        centering: CenteringArg,
        #[command(flatten)]
        hand: HandArg,
    },
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// One CSV per sequence, or a single directory
    #[arg(long, required = true, num_args = 1..)]
    pub out: Vec<PathBuf>,
    #[command(flatten)]
    pub hand: HandArg,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Bundled script name or script JSON file
    #[arg(long)]
    pub script: String,
    #[arg(long)]
    pub db: PathBuf,
    /// One posture CSV per phase
    #[arg(long, required = true)]
    pub data: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub hand: HandArg,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub db: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Static files served at the root
    #[arg(long)]
    pub assets: Option<PathBuf>,
    #[command(flatten)]
    pub hand: HandArg,
}

fn load_hand(arg: &HandArg) -> Result<HandModel> {
    match &arg.hand {
        None => Ok(HandModel::default_10dof()),
        Some(p) => {
            let bytes = fs::read(p).with_context(|| format!("{}", p.display()))?;
            Ok(HandModel::from_json_slice(&bytes)?)
        }
    }
}

/// Loads a CSV and keeps the model's joints, in model order.
fn load_postures(path: &Path, model: &HandModel) -> Result<PostureSequence> {
    dataio::load_posture_csv(path)
        .and_then(|seq| seq.select_columns(&model.joint_names()))
        .with_context(|| format!("{}", path.display()))
}

fn parse_assignment(text: &str, model: &HandModel) -> Result<FunctionAssignment> {
    let spec: AssignmentSpec = match text.parse::<FunctionUnit>() {
        Ok(unit) => unit.into(),
        Err(unit_err) => {
            let path = Path::new(text);
            if !path.exists() {
                return Err(unit_err.into());
            }
            let bytes = fs::read(path).with_context(|| text.to_string())?;
            serde_json::from_slice(&bytes).map_err(|e| fdms_core::Error::Schema(format!("{text}: {e}")))?
        }
    };
    Ok(FunctionAssignment::resolve(spec, model)?)
}

fn fit(args: &FitArgs, out: &mut dyn Write) -> Result<()> {
    let model = load_hand(&args.hand)?;
    let assignment = args
        .assignment
        .as_deref()
        .map(|a| parse_assignment(a, &model))
        .transpose()?;
    let seqs = args
        .data
        .iter()
        .map(|p| load_postures(p, &model))
        .collect::<Result<Vec<_>>>()?;
    let centering = args.centering.into();
    let doc: SynergyDocument = match assignment {
        Some(assignment) => {
            let data = PostureSequence::concat(&seqs, "fit")?;
            build_fdms(&data, &assignment, centering)?.into()
        }
        None if seqs.len() == 1 => build_grasp_synergy(&seqs[0], centering)?.into(),
        None => build_task_specific(&seqs, centering)?.into(),
    };
    dataio::save_synergy(&doc, &args.out)?;
    let m = doc.model();
    writeln!(
        out,
        "{}: f={} label={} cumulative@1={:.4}",
        args.out.display(),
        m.dim(),
        doc.label().unwrap_or("-"),
        m.cumulative_contribution(1)?
    )?;
    Ok(())
}

fn approx(args: &ApproxArgs, out: &mut dyn Write) -> Result<()> {
    let doc = dataio::load_synergy(&args.synergy)?;
    let model = doc.model();
    let matrix = model.synergy_matrix(args.ns)?;
    let seq = dataio::load_posture_csv(&args.data).with_context(|| format!("{}", args.data.display()))?;
    let sub = seq.select_columns(model.joint_names())?;
    let approx_sub = matrix.approximate_sequence(&sub)?;
    let mse = reconstruction_mse(&sub, &approx_sub)?;
    let cols: Vec<usize> = model
        .joint_names()
        .iter()
        .map(|n| seq.joint_names().iter().position(|c| c == n).expect("selected above"))
        .collect();
    let mut data = seq.data().clone();
    for (k, &c) in cols.iter().enumerate() {
        data.set_column(c, &approx_sub.data().column(k));
    }
    let result = PostureSequence::new(data, seq.joint_names().to_vec(), "approx")?;
    dataio::save_posture_csv(&result, &args.out)?;
    writeln!(out, "{} postures, n_s={}, mse={:e}", seq.nrows(), args.ns, mse)?;
    Ok(())
}

fn eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let model = Arc::new(load_hand(&args.hand)?);
    let task: TaskKind = args.task.into();
    let spec = match &args.spec {
        Some(p) => TaskSpec::load(p)?,
        None => TaskSpec::bundled(task),
    };
    if spec.task != task {
        bail!(fdms_core::Error::InvalidTaskSpec(format!(
            "spec is for the {} task, not {task}",
            spec.task
        )));
    }
    let db = SynergyDatabase::load(&args.db)?;
    let scenario = Scenario::prepare(model, spec, db, args.seed)?;
    let report = scenario.sweep_components()?;
    report.write_to(&args.out)?;
    out.write_all(report.to_csv().as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct UnitsListing {
    fdms_units: Vec<FdmsUnitInfo>,
    movement_units: Vec<MovementUnitInfo>,
    movement_total_percent: f64,
}

#[derive(Serialize)]
struct FdmsUnitInfo {
    subspace: usize,
    unit: String,
    manipulation_fingers: usize,
}

#[derive(Serialize)]
struct MovementUnitInfo {
    unit: String,
    frequency_percent: f64,
    decomposition: Vec<String>,
}

fn units_list(json: bool, out: &mut dyn Write) -> Result<()> {
    let listing = UnitsListing {
        fdms_units: fdms_unit_catalog()
            .iter()
            .enumerate()
            .map(|(i, u)| FdmsUnitInfo {
                subspace: i + 1,
                unit: u.to_string(),
                manipulation_fingers: u.manipulation_count(),
            })
            .collect(),
        movement_units: kamakura_catalog()
            .iter()
            .map(|e| MovementUnitInfo {
                unit: e.unit.to_string(),
                frequency_percent: e.frequency_percent,
                decomposition: e.unit.decompose().iter().map(ToString::to_string).collect(),
            })
            .collect(),
        movement_total_percent: kamakura_catalog().iter().map(|e| e.frequency_percent).sum(),
    };
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&listing)?)?;
        return Ok(());
    }
    writeln!(out, "FDMS units")?;
    for u in &listing.fdms_units {
        writeln!(out, "  J{:<3} {}", u.subspace, u.unit)?;
    }
    writeln!(out, "Movement units")?;
    for u in &listing.movement_units {
        writeln!(
            out,
            "  {}  {:>4.1}%  {}",
            u.unit,
            u.frequency_percent,
            u.decomposition.join(" ")
        )?;
    }
    writeln!(out, "  total {:.1}%", listing.movement_total_percent)?;
    Ok(())
}

fn decompose(unit: &str, out: &mut dyn Write) -> Result<()> {
    let parts: Vec<String> = parse_movement_unit(unit)?
        .decompose()
        .iter()
        .map(ToString::to_string)
        .collect();
    writeln!(out, "{}", parts.join(" "))?;
    Ok(())
}

fn open_or_new_db(dir: &Path) -> Result<SynergyDatabase> {
    if dir.join(DB_INDEX_FILE).exists() {
        Ok(SynergyDatabase::load(dir)?)
    } else {
        Ok(SynergyDatabase::new())
    }
}

#[derive(Serialize)]
struct DbRow<'a> {
    name: &'a str,
    kind: SynergyKind,
    label: Option<&'a str>,
    f: usize,
}

fn db(cmd: &DbCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        DbCommand::Register {
            db,
            name,
            kind,
            synergy,
        } => {
            let mut database = open_or_new_db(db)?;
            database.register(name, (*kind).into(), dataio::load_synergy(synergy)?)?;
            database.save(db)?;
            writeln!(out, "registered {name} ({} entries)", database.len())?;
        }
        DbCommand::List { db, json } => {
            let database = SynergyDatabase::load(db)?;
            let rows: Vec<DbRow> = database
                .entries()
                .map(|(name, e)| DbRow {
                    name,
                    kind: e.kind,
                    label: e.document.label(),
                    f: e.document.model().dim(),
                })
                .collect();
            if *json {
                writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
            } else {
                for r in rows {
                    writeln!(out, "{}\t{}\t{}\t{}", r.name, r.kind, r.label.unwrap_or("-"), r.f)?;
                }
            }
        }
        DbCommand::Build {
            out: dir,
            seed,
            data,
            centering,
            hand,
        } => {
            let model = load_hand(hand)?;
            let grasp = match data {
                Some(p) => load_postures(p, &model)?,
                None => synthesize_grasp_dataset(&model, *seed)?,
            };
            let database = standard_database(&model, &grasp, (*centering).into())?;
            database.save(dir)?;
            writeln!(out, "{}: {} entries", dir.display(), database.len())?;
        }
    }
    Ok(())
}

fn gen_paths(args: &GenArgs, prefix: &str) -> Result<Vec<PathBuf>> {
    if args.out.len() == args.count {
        return Ok(args.out.clone());
    }
    match args.out.as_slice() {
        [dir] if dir.extension().is_none() => Ok((0..args.count)
            .map(|k| dir.join(format!("{prefix}-{k:02}.csv")))
            .collect()),
        _ => Err(anyhow!(fdms_core::Error::Schema(format!(
            "--count {} needs {} --out files or one directory",
            args.count, args.count
        )))),
    }
}

fn gen(args: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let model = load_hand(&args.hand)?;
    let (prefix, seqs) = match args.kind {
        GenKind::Grasp => {
            if args.count != 1 {
                bail!(fdms_core::Error::Schema(
                    "the grasp dataset is a single file; use --count 1".into()
                ));
            }
            ("grasp", vec![synthesize_grasp_dataset(&model, args.seed)?])
        }
        GenKind::Scissors | GenKind::Switch => {
            let task = if args.kind == GenKind::Scissors {
                TaskKind::Scissors
            } else {
                TaskKind::Switch
            };
            let spec = TaskSpec::bundled(task);
            (
                task.as_str(),
                synthesize_task_sequences(&spec, &model, args.seed, args.count)?,
            )
        }
    };
    for (seq, path) in seqs.iter().zip(gen_paths(args, prefix)?) {
        dataio::save_posture_csv(seq, &path)?;
        writeln!(
            out,
            "{} {}x{} {}",
            path.display(),
            seq.nrows(),
            seq.ncols(),
            dataio::sequence_hash(seq)
        )?;
    }
    Ok(())
}

fn run(args: &RunArgs, out: &mut dyn Write) -> Result<()> {
    let model = Arc::new(load_hand(&args.hand)?);
    let path = Path::new(&args.script);
    let script = if path.exists() {
        TaskScript::load(path)?
    } else {
        bundled_script(&args.script)?
    };
    let db = SynergyDatabase::load(&args.db)?;
    let inputs = args
        .data
        .iter()
        .map(|p| load_postures(p, &model))
        .collect::<Result<Vec<_>>>()?;
    let mut state = RuntimeState::new(model.clone(), None)?;
    let traj = run_script(&mut state, &script, &db, &inputs)?;
    dataio::save_posture_csv(&traj.to_sequence(model.joint_names(), &script.name)?, &args.out)?;
    writeln!(out, "{} postures, phases start at {:?}", traj.len(), traj.phase_starts)?;
    Ok(())
}

fn serve(args: &ServeArgs) -> Result<()> {
    let model = load_hand(&args.hand)?;
    let db = SynergyDatabase::load(&args.db)?;
    let app = AppState::new(db, model);
    let addr = SocketAddr::new(args.host, args.port);
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(service::serve(addr, app, args.assets.clone()))
        .with_context(|| format!("serving on {addr}"))
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Fit(a) => fit(a, out),
        Command::Approx(a) => approx(a, out),
        Command::Eval(a) => eval(a, out),
        Command::Units(UnitsCommand::List { json }) => units_list(*json, out),
        Command::Decompose { unit } => decompose(unit, out),
        Command::Db(cmd) => db(cmd, out),
        Command::Gen(a) => gen(a, out),
        Command::Run(a) => run(a, out),
        Command::Serve(a) => serve(a),
    }
}

/// Machine-readable kind of a command failure.
pub fn error_kind(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<fdms_core::Error>() {
            return e.kind();
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return "Io";
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return "Schema";
        }
    }
    "Error"
}

/// One-line `error[Kind]: message` rendering.
pub fn error_line(err: &anyhow::Error) -> String {
    let msg = format!("{err:#}").replace('\n', " ");
    format!("error[{}]: {msg}", error_kind(err))
}
