//! `lobster-ctrl`: controllability analysis and leader selection from the shell.
//!
//! Exit codes: 0 success (controllable, found), 1 negative verdict
//! (uncontrollable, cant_find, no leader set up to `--kmax`), 2 usage or input error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lobster_core::control::{count_to_probability, min_leader_bruteforce, LeaderSet};
use lobster_core::csa::{run_csa, Certify, CsaMode, CsaOptions, Status};
use lobster_core::experiments::{self, Metric, SweepConfig};
use lobster_core::graph::{build_lobster, find_spine, random_lobster, read_graph_file, serialize_graph};
use lobster_core::mpcs::{
    detect_quads, detect_spine_patterns, detect_twins, enumerate_mpcs_bruteforce, MpcsCatalog, BRUTE_N_CAP,
};
use lobster_core::par::{self, Execution};
use lobster_core::{Analysis, Error, Graph};

#[derive(Parser)]
#[command(name = "lobster-ctrl", version, about = "Leader selection and controllability for Laplacian networks")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "LOBSTER_CTRL_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random lobster.
    Gen {
        #[arg(long)]
        spine: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        max_load: usize,
        /// Output stem; writes STEM.lobster.json and STEM.graph.json.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide controllability of a leader set.
    Analyze {
        graph: PathBuf,
        /// Comma-separated leader ids.
        #[arg(long, value_delimiter = ',', required = true)]
        leaders: Vec<usize>,
        /// Use the exact rank oracle instead of the eigenvector test.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        json: bool,
    },
    /// List minimum perfect critical sets.
    Mpcs {
        graph: PathBuf,
        /// Exhaustive enumeration (at most 16 vertices).
        #[arg(long, conflicts_with = "detect")]
        brute: bool,
        /// Structural detectors only.
        #[arg(long)]
        detect: bool,
        /// Emit JSON, to the given file or to stdout.
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        json: Option<PathBuf>,
    },
    /// Select leaders for a lobster.
    Csa {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::HittingSet)]
        mode: ModeArg,
        #[arg(long)]
        seed: Option<u64>,
        /// Add all fallback vertices before checking.
        #[arg(long)]
        strict_step6: bool,
        #[arg(long, value_enum, default_value_t = CertifyArg::Auto)]
        certify: CertifyArg,
    },
    /// Exhaustive minimum leader search with its probability under uniform sampling.
    Leaders {
        graph: PathBuf,
        #[arg(long)]
        kmax: usize,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo sweep over random lobsters.
    Experiment {
        #[arg(long, value_enum)]
        sweep: SweepArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Add the step6_off_rate column.
        #[arg(long)]
        ablate_step6: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Also write the full result as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    HittingSet,
    PerSet,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertifyArg {
    Auto,
    Always,
    Never,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Success,
    Scaling,
    Proportion,
}

type Outcome = Result<bool, Error>;

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serialisable")
}

fn gen(spine: usize, seed: u64, max_load: usize, output: Option<PathBuf>) -> Outcome {
    let spec = random_lobster(spine, seed, max_load)?;
    let g = build_lobster(&spec)?;
    let spec_json = serde_json::to_string(&spec)?;
    match output {
        None => println!("{spec_json}"),
        Some(path) => {
            let stem = path.to_string_lossy();
            let stem = stem
                .strip_suffix(".lobster.json")
                .or_else(|| stem.strip_suffix(".graph.json"))
                .or_else(|| stem.strip_suffix(".json"))
                .unwrap_or(&stem)
                .to_string();
            write_file(Path::new(&format!("{stem}.lobster.json")), &(spec_json + "\n"))?;
            write_file(Path::new(&format!("{stem}.graph.json")), &(serialize_graph(&g) + "\n"))?;
            eprintln!("wrote {stem}.lobster.json and {stem}.graph.json ({} vertices)", g.n());
        }
    }
    Ok(true)
}

fn analyze(path: &Path, leaders: &[usize], exact: bool, json: bool) -> Outcome {
    let g = read_graph_file(path)?;
    let set = LeaderSet::new(g.n(), leaders)?;
    let an = Analysis::new(g)?;
    let v = if exact { an.kalman_exact(&set)? } else { an.controllable(&set)? };
    if json {
        println!("{}", pretty(&v));
    } else {
        println!("{}", if v.controllable { "controllable" } else { "uncontrollable" });
        if let Some(rank) = v.rank {
            println!("rank {rank} of {}", an.n() - set.len());
        }
        if let Some(w) = &v.witness {
            let vec: Vec<String> = w.vector.iter().map(|x| format!("{x:.6}")).collect();
            println!("witness eigenvalue {:.9}: [{}]", w.lambda, vec.join(", "));
        }
        if v.marginal {
            println!("(margin was small; verdict confirmed by the exact oracle)");
        }
    }
    Ok(v.controllable)
}

fn detected(an: &Analysis) -> Result<MpcsCatalog, Error> {
    let mut cat = MpcsCatalog {
        records: detect_twins(an)?,
        complete: false,
    };
    cat.extend_unique(detect_quads(an)?);
    if let Ok(spine) = find_spine(an.graph()) {
        cat.extend_unique(detect_spine_patterns(an, &spine)?);
    }
    Ok(cat)
}

fn mpcs(path: &Path, brute: bool, detect: bool, json: Option<PathBuf>, exec: Execution) -> Outcome {
    let g = read_graph_file(path)?;
    let an = Analysis::new(g)?;
    let cat = if brute || (!detect && an.n() <= BRUTE_N_CAP) {
        enumerate_mpcs_bruteforce(&an, BRUTE_N_CAP, exec)?
    } else {
        detected(&an)?
    };
    match json.as_deref() {
        Some(p) if p == Path::new("-") => println!("{}", cat.to_json()),
        Some(p) => write_file(p, &(cat.to_json() + "\n"))?,
        None => {}
    }
    if json.as_deref() != Some(Path::new("-")) {
        let how = if cat.complete { "exhaustive" } else { "detected" };
        println!("{} MPCS ({how})", cat.records.len());
        for r in &cat.records {
            let ids: Vec<String> = r.vertices.iter().map(ToString::to_string).collect();
            println!("{{{}}}  lambda={:.9}  {:?}", ids.join(","), r.lambda, r.origin);
        }
    }
    Ok(true)
}

fn csa(path: &Path, mode: ModeArg, seed: Option<u64>, strict: bool, certify: CertifyArg) -> Outcome {
    let g: Graph = read_graph_file(path)?;
    let opts = CsaOptions {
        mode: match mode {
            ModeArg::HittingSet => CsaMode::HittingSet,
            ModeArg::PerSet => CsaMode::PerSet,
        },
        seed,
        strict_step6: strict,
        certify: match certify {
            CertifyArg::Auto => Certify::Auto,
            CertifyArg::Always => Certify::Always,
            CertifyArg::Never => Certify::Never,
        },
    };
    let report = run_csa(&g, opts)?;
    println!("{}", report.to_json());
    if report.status == Status::CantFind && report.mpcs.is_empty() {
        eprintln!(
            "note: no twin, quad or spine pattern found and no fallback vertex applies; \
             the algorithm only covers lobsters carrying such structures"
        );
    }
    Ok(report.status == Status::Found)
}

fn leaders(path: &Path, kmax: usize, json: bool, exec: Execution) -> Outcome {
    let g = read_graph_file(path)?;
    let res = min_leader_bruteforce(&g, kmax, exec)?;
    let prob = match res.k_min {
        Some(k) => Some(count_to_probability(res.count, g.n() as u64, k as u64)?),
        None => None,
    };
    if json {
        let v = serde_json::json!({ "result": res, "probability": prob });
        println!("{}", pretty(&v));
    } else {
        match (res.k_min, &prob) {
            (Some(k), Some(p)) => {
                println!("k_min {k}, {} minimum leader sets", res.count);
                println!("probability {}/{} = {}", p.numerator, p.denominator, p.display);
                if let Some(sets) = &res.sets {
                    for s in sets {
                        let ids: Vec<String> = s.iter().map(ToString::to_string).collect();
                        println!("{{{}}}", ids.join(","));
                    }
                }
            }
            _ => println!("no controllable leader set of size <= {kmax}"),
        }
    }
    Ok(res.k_min.is_some())
}

fn experiment(
    sweep: SweepArg,
    config: &Path,
    output: &Path,
    ablate: bool,
    svg: Option<PathBuf>,
    json: Option<PathBuf>,
    exec: Execution,
) -> Outcome {
    let text = std::fs::read_to_string(config).map_err(|e| Error::Io {
        path: config.to_path_buf(),
        source: e,
    })?;
    let cfg = SweepConfig::from_json(&text)?;
    let res = match sweep {
        SweepArg::Success => experiments::run_success_probability(&cfg, exec)?,
        SweepArg::Scaling => experiments::run_leader_scaling(&cfg, exec)?,
        SweepArg::Proportion => experiments::run_proportion(&cfg, exec)?,
    };
    experiments::write_csv(&res.rows, ablate, output)?;
    if let Some(p) = svg {
        let (metric, reference) = match sweep {
            SweepArg::Success => (Metric::SuccessRate, Some((0.0, 0.98))),
            SweepArg::Scaling => (Metric::MeanLeaders, Some((0.3, 2.0))),
            SweepArg::Proportion => (Metric::MeanProportion, Some((0.0, 0.2))),
        };
        experiments::write_svg(&res.rows, metric, reference, p)?;
    }
    if let Some(p) = json {
        write_file(&p, &(res.to_json() + "\n"))?;
    }
    if let Some(f) = res.fit_spine {
        println!("leaders ~ {:.4} * spine + {:.4}", f.slope, f.intercept);
    }
    println!("exact audit: {}/{} agree", res.audit.agreed, res.audit.audited);
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == Some(0) {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let exec = Execution::Parallel;
    let outcome = par::with_jobs(cli.jobs, move || match cli.cmd {
        Cmd::Gen {
            spine,
            seed,
            max_load,
            output,
        } => gen(spine, seed, max_load, output),
        Cmd::Analyze {
            graph,
            leaders,
            exact,
            json,
        } => analyze(&graph, &leaders, exact, json),
        Cmd::Mpcs {
            graph,
            brute,
            detect,
            json,
        } => mpcs(&graph, brute, detect, json, exec),
        Cmd::Csa {
            graph,
            mode,
            seed,
            strict_step6,
            certify,
        } => csa(&graph, mode, seed, strict_step6, certify),
        Cmd::Leaders { graph, kmax, json } => leaders(&graph, kmax, json, exec),
        Cmd::Experiment {
            sweep,
            config,
            output,
            ablate_step6,
            svg,
            json,
        } => experiment(sweep, &config, &output, ablate_step6, svg, json, exec),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
