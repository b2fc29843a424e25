//! Command-line front end. Every subcommand is a thin adapter over the library.
//!
//! Exit codes: 0 success or verdict true, 1 verdict false or violations,
//! 2 usage or input error, 3 search budget exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cb_lab::campaign::{
    replay_record, replay_violation, run_campaign, CampaignReport,
    CampaignSpec, Outcome, Target, TrialRecord, Violation,
};
use cb_lab::cb::is_cb;
use cb_lab::cover::{CoverSearch, DEFAULT_NODE_BUDGET};
use cb_lab::generators::{Family, GenSpec};
use cb_lab::matroid::{exists_flat_cover, is_mcb, Matroid, MatroidSpec, McbMode};
use cb_lab::{Error, FieldSpec, PointSet};

const BUDGET_ENV: &str = "CB_LAB_NODE_BUDGET";

#[derive(Parser)]
#[command(name = "cb-lab", version, about = "Cayley-Bacharach checks, plane-configuration covers and campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Print machine-readable JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a point set from a generator family.
    Generate {
        #[arg(long, required_unless_present = "spec", conflicts_with = "spec")]
        family: Option<String>,
        /// Comma-separated key=value pairs, e.g. `k=3,m=8`.
        #[arg(long, default_value = "")]
        params: String,
        /// A prime modulus or `Q`.
        #[arg(long, default_value = "101")]
        field: FieldSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// A GenSpec JSON file instead of --family/--params/--field/--seed.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Decide CB(r) for a point set.
    CheckCb {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        r: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Search for a plane-configuration cover.
    Cover {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, required_unless_present = "min")]
        dim: Option<usize>,
        /// Defaults to the dimension.
        #[arg(long)]
        max_length: Option<usize>,
        /// Find the cover of least dimension, then least length.
        #[arg(long, conflicts_with_all = ["dim", "max_length"])]
        min: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded campaign: CB(r) draws must admit a d-dimensional cover.
    VerifyConjecture {
        #[arg(long, required_unless_present = "replay")]
        d: Option<usize>,
        #[arg(long, required_unless_present = "replay")]
        r: Option<u32>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "101")]
        field: FieldSpec,
        /// Re-verify one trial record or violation JSON file.
        #[arg(long, conflicts_with_all = ["d", "r"])]
        replay: Option<PathBuf>,
        /// Also write the full report here.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Matroid checks on a point set or a flat list.
    Matroid {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, required_unless_present = "flat_cover", conflicts_with = "flat_cover")]
        mcb: Option<usize>,
        /// Comma-separated flat ranks minus one, e.g. `1,1`.
        #[arg(long, value_delimiter = ',')]
        flat_cover: Option<Vec<usize>>,
        /// Restrict the MCB check to hyperplanes (experimental).
        #[arg(long)]
        hyperplanes_only: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive enumeration over a small projective space.
    Search {
        #[arg(long, value_enum)]
        mode: SearchMode,
        /// Prime modulus.
        #[arg(long)]
        field: u64,
        #[arg(long)]
        ambient: usize,
        #[arg(long)]
        r: u32,
        #[arg(long, required_if_eq("mode", "counterexample"))]
        d: Option<usize>,
        #[arg(long, required_if_eq("mode", "counterexample"))]
        size_cap: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a campaign from a CampaignSpec JSON file.
    Campaign {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchMode {
    LowerBound,
    Counterexample,
}

/// Failure modes mapped onto exit codes.
enum Fail {
    Input(String),
    Budget(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) => Fail::Budget(e.to_string()),
            e => Fail::Input(e.to_string()),
        }
    }
}

type Run = Result<ExitCode, Fail>;

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn budget_override() -> Result<Option<u64>, Fail> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Fail::Input(format!("{BUDGET_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn node_budget() -> Result<u64, Fail> {
    Ok(budget_override()?.unwrap_or(DEFAULT_NODE_BUDGET))
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn read_points(path: &Path) -> Result<PointSet, Fail> {
    Ok(PointSet::from_json(&read(path)?)?)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("output serializes")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Fail::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Command) -> Run {
    match cmd {
        Command::Generate {
            family,
            params,
            field,
            seed,
            spec,
            output,
            common,
        } => {
            let spec = match (spec, family) {
                (Some(path), _) => GenSpec::from_json(&read(&path)?)?,
                (None, Some(name)) => GenSpec::new(Family::from_params(&name, &params)?, field, seed),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let g = spec.generate()?;
            match output {
                Some(path) => {
                    write(&path, &g.points.to_json())?;
                    if common.json {
                        #[derive(Serialize)]
                        struct Out<'a> {
                            spec: &'a GenSpec,
                            points: usize,
                            certificate: &'a str,
                        }
                        println!(
                            "{}",
                            to_json(&Out {
                                spec: &spec,
                                points: g.points.len(),
                                certificate: &g.certificate,
                            })
                        );
                    } else {
                        println!("wrote {} points to {}", g.points.len(), path.display());
                        println!("certificate: {}", g.certificate);
                    }
                }
                None => println!("{}", g.points.to_json()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckCb { input, r, common } => {
            let gamma = read_points(&input)?;
            let report = is_cb(&gamma, r);
            if common.json {
                println!("{}", report.to_json());
            } else {
                println!("CB({r}): {}", report.verdict);
                if let Some(w) = &report.witness {
                    println!("witness: point {} is omitted by {}", w.omitted, w.form);
                }
            }
            Ok(verdict(report.verdict))
        }
        Command::Cover {
            input,
            dim,
            max_length,
            min,
            common,
        } => {
            let gamma = read_points(&input)?;
            let mut search = CoverSearch::new(&gamma)?.with_budget(node_budget()?);
            let res = if min {
                search.minimal()?
            } else {
                let d = dim.expect("clap requires --dim without --min");
                search.exists(d, max_length.unwrap_or(d))?
            };
            if common.json {
                println!("{}", res.to_json());
            } else if let Some(cfg) = &res.config {
                println!("cover of dimension {} and length {}", res.dim, res.length);
                for (i, p) in cfg.planes().iter().enumerate() {
                    println!("  plane {i}: dim {} through points {:?}", p.dim(), p.incident(&gamma));
                }
            } else {
                println!("no cover ({} nodes, exhaustive: {})", res.nodes_explored, res.proof_of_minimality);
            }
            Ok(verdict(res.found))
        }
        Command::VerifyConjecture {
            d,
            r,
            trials,
            seed,
            field,
            replay,
            output,
            common,
        } => {
            if let Some(path) = replay {
                return replay_file(&path, common.json);
            }
            let mut spec = CampaignSpec::new(Target::Conjecture, vec![d.unwrap()], vec![r.unwrap()], field, trials, seed);
            spec.node_budget = node_budget()?;
            report_campaign(&run_campaign(&spec)?, output.as_deref(), common.json)
        }
        Command::Matroid {
            input,
            mcb,
            flat_cover,
            hyperplanes_only,
            common,
        } => {
            let text = read(&input)?;
            let m = match serde_json::from_str::<MatroidSpec>(&text) {
                Ok(spec) => Matroid::from_spec(&spec)?,
                Err(_) => Matroid::from_points(&PointSet::from_json(&text)?)?,
            };
            if let Some(r) = mcb {
                let mode = if hyperplanes_only {
                    McbMode::HyperplanesOnly
                } else {
                    McbMode::AllFlats
                };
                let report = is_mcb(&m, r, mode)?;
                if common.json {
                    println!("{}", to_json(&report));
                } else {
                    println!("MCB({r}): {}", report.verdict);
                    if let Some(x) = report.excluded {
                        println!("witness: flats {:?} cover everything but {x}", report.flats);
                    }
                }
                return Ok(verdict(report.verdict));
            }
            let dims = flat_cover.expect("clap requires --mcb or --flat-cover");
            let flats = exists_flat_cover(&m, &dims)?;
            if common.json {
                #[derive(Serialize)]
                struct Out<'a> {
                    dims: &'a [usize],
                    found: bool,
                    flats: Option<&'a Vec<Vec<usize>>>,
                }
                println!(
                    "{}",
                    to_json(&Out {
                        dims: &dims,
                        found: flats.is_some(),
                        flats: flats.as_ref(),
                    })
                );
            } else {
                match &flats {
                    Some(f) => println!("flat cover: {f:?}"),
                    None => println!("no flat cover with dims {dims:?}"),
                }
            }
            Ok(verdict(flats.is_some()))
        }
        Command::Search {
            mode,
            field,
            ambient,
            r,
            d,
            size_cap,
            output,
            common,
        } => {
            let field = FieldSpec::prime(field)?;
            let mut spec = match mode {
                SearchMode::LowerBound => CampaignSpec::new(Target::LowerBoundExhaustive, vec![], vec![r], field, 1, 0),
                SearchMode::Counterexample => {
                    let mut s = CampaignSpec::new(Target::CounterexampleSearch, vec![d.unwrap()], vec![r], field, 1, 0);
                    s.size_cap = size_cap;
                    s
                }
            };
            spec.ambient = Some(ambient);
            spec.node_budget = node_budget()?;
            report_campaign(&run_campaign(&spec)?, output.as_deref(), common.json)
        }
        Command::Campaign { spec, output, common } => {
            let mut spec: CampaignSpec =
                serde_json::from_str(&read(&spec)?).map_err(|e| Fail::Input(e.to_string()))?;
            if let Some(b) = budget_override()? {
                spec.node_budget = b;
            }
            report_campaign(&run_campaign(&spec)?, output.as_deref(), common.json)
        }
    }
}

fn report_campaign(report: &CampaignReport, output: Option<&Path>, json: bool) -> Run {
    if let Some(path) = output {
        write(path, &report.to_json())?;
    }
    let s = &report.summary;
    if json {
        println!("{}", report.to_json());
    } else {
        println!(
            "{} records: {} passed, {} violations, {} witnesses, {} over budget, {} skipped ({} draws discarded)",
            s.trials, s.passed, s.violations, s.witnesses, s.budget_exceeded, s.skipped, s.discarded_draws
        );
        if !s.family_mix.is_empty() {
            println!("family mix: {:?}", s.family_mix);
        }
        if let Some(c) = &report.caveat {
            println!("caveat: {c}");
        }
    }
    Ok(if s.violations > 0 {
        ExitCode::from(1)
    } else if s.budget_exceeded > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn replay_file(path: &Path, json: bool) -> Run {
    let text = read(path)?;
    let budget = node_budget()?;
    let res = if let Ok(rec) = serde_json::from_str::<TrialRecord>(&text) {
        replay_record(&rec, budget)?
    } else {
        let v: Violation = serde_json::from_str(&text)
            .map_err(|e| Fail::Input(format!("expected a trial record or a violation: {e}")))?;
        replay_violation(&v, budget)?
    };
    if json {
        println!("{}", to_json(&res));
    } else {
        println!("outcome: {:?}", res.outcome);
        println!("verdicts: {:?} (match: {})", res.verdicts, res.verdicts_match);
        if let Some(m) = res.points_match {
            println!("regenerated points match: {m}");
        }
    }
    let reproduced = res.verdicts_match && res.points_match != Some(false);
    Ok(match res.outcome {
        _ if !reproduced => ExitCode::from(1),
        Outcome::Violation => ExitCode::from(1),
        Outcome::BudgetExceeded => ExitCode::from(3),
        _ => ExitCode::SUCCESS,
    })
}
