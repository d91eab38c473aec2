use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use losekit::channel::{validate, Channel, CHANNEL_TOL};
use losekit::games::{chsh_game, lhv_bound, ppt_min_eigenvalue_of, score, Game};
use losekit::io::{named_metadata, ChannelFile, GameFile, Metadata};
use losekit::lose::{
    apply_lose, dephase_outputs_to_box, phhh_to_dfp, phhh_to_shsa, pr_to_phhh, q_output_to_classical,
    teleport_left_inverse,
};
use losekit::verify::{run_all, VerifyOptions};
use losekit::zoo::{self, ZooParams, DFP_ALPHA};
use losekit::{Error, Party};

/// Directory used for output files when `--out` is not given.
const OUT_DIR_ENV: &str = "LOSEKIT_OUT_DIR";

#[derive(Parser)]
#[command(name = "losekit", version, about = "Bipartite nonsignaling channels under local operations and shared entanglement")]
struct Cli {
    /// Validation tolerance (CPTP and nonsignaling deviations)
    #[arg(long, global = true, default_value_t = CHANNEL_TOL)]
    tol: f64,
    /// Seed for randomized searches and random instances
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Named example channels
    #[command(subcommand)]
    Zoo(ZooCommand),
    /// Run validators on a channel file
    Check(CheckArgs),
    /// Apply a named construction to a zoo channel or channel file
    Convert(ConvertArgs),
    /// Score a channel file in a game (`chsh` or a game file)
    Score { game: String, file: PathBuf },
    /// Brute-force the local deterministic bound of a game
    Lhv { game: String },
    /// Recompute the reference results and print a pass/fail matrix
    VerifyPaper {
        /// Unitary twisting the BGNP basis in the eigenstate check
        #[arg(long, default_value = "hadamard")]
        ub: String,
    },
}

#[derive(Subcommand)]
enum ZooCommand {
    /// List channel identifiers
    List,
    /// Materialize a channel as a canonical file
    Show {
        name: String,
        /// Parameters such as `ub=hadamard` or `alpha=1/6`
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long)]
    nonsignaling: bool,
    #[arg(long)]
    cptp: bool,
    #[arg(long)]
    classical: bool,
    #[arg(long)]
    ppt: bool,
}

#[derive(Args)]
struct ConvertArgs {
    /// Zoo identifier or channel file
    source: String,
    /// pr_to_phhh, phhh_to_shsa, phhh_to_dfp, dephase, q_out_to_classical, teleport_inverse
    construction: String,
    /// Party for q_out_to_classical and teleport_inverse
    #[arg(long, default_value = "alice")]
    party: Party,
    /// Parameters: `alpha=` for phhh_to_dfp, `ua=`/`ub=` measurement bases for dephase
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Validation(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unknown(_) | Error::OutOfRange(_) => Failure::Usage(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Zoo(ZooCommand::List) => zoo_list(),
        Command::Zoo(ZooCommand::Show { name, params, out }) => zoo_show(name, params, out.as_deref()),
        Command::Check(args) => check(args, cli.tol),
        Command::Convert(args) => convert(args),
        Command::Score { game, file } => score_cmd(game, file),
        Command::Lhv { game } => lhv(game),
        Command::VerifyPaper { ub } => verify_paper(ub, cli.seed),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {}", msg);
            ExitCode::from(2)
        }
    }
}

fn zoo_list() -> CmdResult {
    for name in zoo::ZOO_NAMES.iter().chain(&["uniform", "isotropic"]) {
        println!("{:<10} {}", name, zoo::describe(name).unwrap_or(""));
    }
    Ok(true)
}

fn emit(file: &ChannelFile, out: Option<&Path>, default_name: &str) -> Result<(), Failure> {
    let target = match out {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{}.json", default_name))),
    };
    match target {
        Some(p) => {
            file.write(&p)?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{}", file.to_canonical()?),
    }
    Ok(())
}

fn zoo_show(name: &str, params: &[String], out: Option<&Path>) -> CmdResult {
    let p = ZooParams::parse(params)?;
    if zoo::describe(name).is_none() {
        return Err(Failure::Usage(format!("unknown zoo channel '{}'", name)));
    }
    let (g, choi) = zoo::named_raw(name, &p)?;
    let mut meta = named_metadata(name);
    for kv in params {
        if let Some((k, v)) = kv.split_once('=') {
            meta.insert(k.trim().to_string(), serde_json::Value::String(v.trim().to_string()));
        }
    }
    let report = validate(&g, &choi)?;
    let file = ChannelFile::new(g, choi, meta)?;
    emit(&file, out, name)?;
    if let Some(e) = report.first_violation(CHANNEL_TOL, losekit::channel::CLASSICAL_TOL) {
        eprintln!("warning: '{}' fails validation: {}", name, e);
        return Ok(false);
    }
    Ok(true)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn check(args: &CheckArgs, tol: f64) -> CmdResult {
    let f = ChannelFile::read(&args.file)?;
    let none = !(args.nonsignaling || args.cptp || args.classical || args.ppt);
    let rep = f.validation()?;
    let mut ok = true;
    println!("type {}", f.gtype);
    if args.cptp || none {
        let c = rep.cptp;
        let pass = c.passes(tol);
        ok &= pass;
        println!(
            "cptp          min eigenvalue {:+.3e}  tp deviation {:.3e}  hermiticity {:.3e}  {}",
            c.min_eigenvalue,
            c.tp_deviation,
            c.hermiticity_deviation,
            verdict(pass)
        );
    }
    if args.nonsignaling || none {
        for (label, s) in [("A->B", rep.alice_to_bob), ("B->A", rep.bob_to_alice)] {
            let pass = s.passes(tol);
            ok &= pass;
            println!("nonsignaling  {}  deviation {:.3e}  {}", label, s.deviation, verdict(pass));
        }
    }
    if args.classical || none {
        for (wire, dev) in &rep.classical {
            let pass = *dev <= tol.max(losekit::channel::CLASSICAL_TOL);
            ok &= pass;
            println!("classical     {:?}  dephasing deviation {:.3e}  {}", wire, dev, verdict(pass));
        }
    }
    if args.ppt {
        let min = ppt_min_eigenvalue_of(&f.gtype, &f.choi)?;
        let pass = min >= -tol;
        ok &= pass;
        println!(
            "ppt           min eigenvalue {:+.6e}  {}{}",
            min,
            verdict(pass),
            if pass { "" } else { " (not entanglement-breaking)" }
        );
    }
    Ok(ok)
}

fn load_source(src: &str) -> Result<(Channel, String), Failure> {
    if zoo::describe(src).is_some() && !Path::new(src).exists() {
        return Ok((zoo::named(src, &ZooParams::default())?, src.to_string()));
    }
    let path = Path::new(src);
    if !path.exists() {
        return Err(Failure::Usage(format!("'{}' is neither a zoo channel nor a file", src)));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("channel").to_string();
    Ok((ChannelFile::read(path)?.to_channel()?, stem))
}

fn basis_param(params: &[String], key: &str, dim: usize) -> Result<losekit::CMatrix, Failure> {
    for kv in params {
        if let Some((k, v)) = kv.split_once('=') {
            if k.trim() == key {
                if dim != 2 {
                    return Err(Failure::Usage(format!("basis '{}' needs a qubit output", v)));
                }
                return Ok(zoo::parse_unitary(v)?);
            }
        }
    }
    Ok(losekit::CMatrix::identity(dim))
}

fn convert(args: &ConvertArgs) -> CmdResult {
    let (src, stem) = load_source(&args.source)?;
    let out = match args.construction.as_str() {
        "pr_to_phhh" => apply_lose(&pr_to_phhh(), &src)?,
        "phhh_to_shsa" => apply_lose(&phhh_to_shsa(), &src)?,
        "phhh_to_dfp" => {
            let p = ZooParams::parse(&args.params)?;
            apply_lose(&phhh_to_dfp(p.alpha.unwrap_or(DFP_ALPHA))?, &src)?
        }
        "dephase" => {
            let g = src.gtype();
            let ua = basis_param(&args.params, "ua", g.a.dim())?;
            let ub = basis_param(&args.params, "ub", g.b.dim())?;
            dephase_outputs_to_box(&src, &ua, &ub)?
        }
        "q_out_to_classical" => q_output_to_classical(&src, args.party)?,
        "teleport_inverse" => teleport_left_inverse(&src, args.party)?,
        other => return Err(Failure::Usage(format!("unknown construction '{}'", other))),
    };
    let mut meta: Metadata = named_metadata(&format!("{}.{}", stem, args.construction));
    meta.insert("source".into(), serde_json::Value::String(args.source.clone()));
    meta.insert("construction".into(), serde_json::Value::String(args.construction.clone()));
    eprintln!("result type {}", out.gtype());
    emit(&ChannelFile::from_channel(&out, meta), args.out.as_deref(), &format!("{}.{}", stem, args.construction))?;
    Ok(true)
}

fn load_game(name: &str) -> Result<Game, Failure> {
    if name == "chsh" {
        return Ok(chsh_game());
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(Failure::Usage(format!("'{}' is neither a built-in game nor a file", name)));
    }
    Ok(GameFile::read(path)?.game)
}

fn score_cmd(game: &str, file: &Path) -> CmdResult {
    let g = load_game(game)?;
    let ch = ChannelFile::read(file)?.to_channel()?;
    println!("{:.12}", score(&g, &ch)?);
    Ok(true)
}

fn lhv(game: &str) -> CmdResult {
    let g = load_game(game)?;
    println!("{}", lhv_bound(&g)?);
    Ok(true)
}

fn verify_paper(ub: &str, seed: u64) -> CmdResult {
    let opts = VerifyOptions {
        bgnp_ub: zoo::parse_unitary(ub)?,
        seed,
    };
    let results = run_all(&opts);
    let mut ok = true;
    for r in &results {
        ok &= r.passed;
        println!(
            "[{:>2}] {}  {:<70} {}  ({:.2}s)",
            r.id,
            verdict(r.passed),
            r.title,
            r.measured,
            r.elapsed.as_secs_f64()
        );
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{}/{} checks passed", passed, results.len());
    Ok(ok)
}
