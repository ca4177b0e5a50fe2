//! Command-line frontend.
//!
//! Exit codes: 0 on success, 1 on user errors (bad arguments, unreadable or
//! malformed files, refused parameter ranges), 2 on internal failures (an
//! accumulation fault in the merit engines, or a `verify` identity check
//! exceeding its tolerance).
//!
//! Every command echoes a `# resolved: ...` line to stderr with the
//! parameters it actually ran, so logs identify their runs.  JSON output
//! prints floats with 17 significant digits; non-finite values become null.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wafom_core::net::NetParams;
use wafom_core::oracle::{character_orthogonality_dev, dft_order_invariance_dev};
use wafom_core::{
    anneal, anneal_checkpointed, anneal_resume, comparison_csv, comparison_experiment,
    comparison_table, enumerate_points, ingest_net, kh_rmse_check, merit_error_correlation,
    poisson_check, psi, random_net_strict, read_net, read_weights, rmse_estimate, sample_shift,
    scatter_csv, scatter_experiment, shift, shifted_fourier_check, variance_exact,
    wafom_dual_bruteforce, wafom_highprec, wafom_inversion, walsh_coefficient_bound_check,
    write_net, AnnealConfig, Error, GroupFunction, Integrand, Result, WeightSpec, FN_IDS,
};

#[derive(Parser)]
#[command(name = "wafom-cli", version, about = "Digital net merits, shifted QMC, and net search")]
struct Cli {
    /// Worker threads for parallel commands (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Figure of merit of a net file.
    Wafom(WafomArgs),
    /// Randomized QMC integration under digital shifts.
    Integrate(IntegrateArgs),
    /// Merit-versus-error scatter over random nets.
    Scatter(ScatterArgs),
    /// External nets against annealed nets of the same sizes.
    Compare(CompareArgs),
    /// Simulated-annealing search for a low-merit net.
    Search(SearchArgs),
    /// Identity battery cross-checking the engines against exhaustive oracles.
    Verify(VerifyArgs),
    /// Enumerate the (optionally shifted) points of a net as CSV.
    GenPoints(GenPointsArgs),
    /// Convert an external net file to the native format.
    Ingest(IngestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// MacWilliams-type inversion over the net (double-double internals).
    Inversion,
    /// Direct sum over the dual net (small nets only).
    Dual,
    /// Inversion with emulated extra precision throughout.
    Highprec,
}

impl MethodArg {
    fn as_str(self) -> &'static str {
        match self {
            MethodArg::Inversion => "inversion",
            MethodArg::Dual => "dual",
            MethodArg::Highprec => "highprec",
        }
    }
}

#[derive(Args)]
struct WafomArgs {
    /// Net file in the native format.
    #[arg(long)]
    net: PathBuf,
    /// Weight: "mu", "h", "mu+h", or "file:PATH" for a custom matrix.
    #[arg(long, default_value = "mu+h")]
    weight: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Inversion)]
    method: MethodArg,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long)]
    net: PathBuf,
    /// Integrand id, f0..f7.
    #[arg(long = "fn")]
    function: String,
    /// Number of random digital shifts; accepts "2^k".
    #[arg(long, value_parser = parse_count, default_value = "2^6")]
    shifts: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also report the exact integral and the estimate's bias against it.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScatterArgs {
    /// Net shape as "b,s,n,m".
    #[arg(long, value_parser = parse_params)]
    params: NetParams,
    /// Number of random nets; accepts "2^k".
    #[arg(long, value_parser = parse_count, default_value = "2^7")]
    nets: u64,
    #[arg(long, value_parser = parse_count, default_value = "2^6")]
    shifts: u64,
    /// Comma-separated integrand ids (default: all of f0..f7).
    #[arg(long)]
    fns: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout when absent (correlations then go to stderr).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Shape of the searched nets as "b,s,n".
    #[arg(long, value_parser = parse_bsn)]
    params: (u32, usize, usize),
    /// Comma-separated list of size exponents m.
    #[arg(long = "m", value_parser = parse_list, value_delimiter = ',')]
    m_list: Vec<usize>,
    /// Directory holding external nets as nx_s{s}_m{m}.txt in the ingestion
    /// format; missing files skip their rows.
    #[arg(long)]
    external_dir: Option<PathBuf>,
    #[arg(long = "fn", default_value = "f1")]
    function: String,
    #[arg(long, value_parser = parse_count, default_value = "2^6")]
    shifts: u64,
    /// Annealing steps per restart; accepts "2^k".
    #[arg(long, value_parser = parse_count, default_value = "2^13")]
    steps: u64,
    #[arg(long, default_value_t = 4)]
    restarts: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Net shape as "b,s,n,m"; required unless resuming.
    #[arg(long, value_parser = parse_params)]
    params: Option<NetParams>,
    #[arg(long, value_parser = parse_count, default_value = "2^13")]
    steps: u64,
    #[arg(long, default_value_t = 1)]
    restarts: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Starting temperature (default: calibrated from random probes).
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long, default_value_t = 0.98)]
    cooling: f64,
    #[arg(long, default_value_t = 50)]
    moves_per_temp: u64,
    /// Write the best net here in the native format.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Checkpoint file; forces sequential restarts.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Evaluations between checkpoint writes.
    #[arg(long, default_value_t = 1000)]
    checkpoint_every: u64,
    /// Resume from a checkpoint (shape and schedule come from the file).
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random (function, net) pairs per identity.
    #[arg(long, default_value_t = 12)]
    pairs: u64,
}

#[derive(Args)]
struct GenPointsArgs {
    #[arg(long)]
    net: PathBuf,
    /// Apply the random digital shift drawn from this seed.
    #[arg(long)]
    shift_seed: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// External net file (ingestion format).
    #[arg(long)]
    input: PathBuf,
    /// Destination in the native format.
    #[arg(long)]
    out: PathBuf,
}

fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Some(k) = s.strip_prefix("2^") {
        let k: u32 = k.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        if k >= 63 {
            return Err(format!("2^{k} does not fit a count"));
        }
        Ok(1u64 << k)
    } else {
        s.parse().map_err(|_| format!("bad count {s:?} (use a number or 2^k)"))
    }
}

fn parse_params(s: &str) -> std::result::Result<NetParams, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected b,s,n,m, got {s:?}"));
    }
    let b = parts[0].parse().map_err(|_| format!("bad base {:?}", parts[0]))?;
    let sd = parts[1].parse().map_err(|_| format!("bad dimension {:?}", parts[1]))?;
    let n = parts[2].parse().map_err(|_| format!("bad precision {:?}", parts[2]))?;
    let m = parts[3].parse().map_err(|_| format!("bad exponent {:?}", parts[3]))?;
    NetParams::new(b, sd, n, m).map_err(|e| e.to_string())
}

fn parse_bsn(s: &str) -> std::result::Result<(u32, usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected b,s,n, got {s:?}"));
    }
    let b = parts[0].parse().map_err(|_| format!("bad base {:?}", parts[0]))?;
    let sd = parts[1].parse().map_err(|_| format!("bad dimension {:?}", parts[1]))?;
    let n = parts[2].parse().map_err(|_| format!("bad precision {:?}", parts[2]))?;
    NetParams::new(b, sd, n, 0).map_err(|e| e.to_string())?;
    Ok((b, sd, n))
}

fn parse_list(s: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|_| format!("bad m value {s:?}"))
}

/// JSON float: 17 significant digits, null when non-finite.
fn jf(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

fn write_or_print(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::AccumulationFailure { .. } => 2,
                _ => 1,
            })
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode> {
    match cmd {
        Cmd::Wafom(a) => cmd_wafom(a),
        Cmd::Integrate(a) => cmd_integrate(a),
        Cmd::Scatter(a) => cmd_scatter(a),
        Cmd::Compare(a) => cmd_compare(a),
        Cmd::Search(a) => cmd_search(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::GenPoints(a) => cmd_gen_points(a),
        Cmd::Ingest(a) => cmd_ingest(a),
    }
}

fn resolve_weight(spec: &str, s: usize, n: usize) -> Result<WeightSpec> {
    match spec {
        "mu" => Ok(WeightSpec::dick(s, n)),
        "h" => Ok(WeightSpec::hamming(s, n)),
        "mu+h" => Ok(WeightSpec::dick_plus_hamming(s, n)),
        other => match other.strip_prefix("file:") {
            Some(path) => read_weights(Path::new(path)),
            None => Err(Error::InvalidParams(format!(
                "weight must be mu, h, mu+h, or file:PATH, got {other:?}"
            ))),
        },
    }
}

fn cmd_wafom(a: WafomArgs) -> Result<ExitCode> {
    let net = read_net(&a.net)?;
    let p = net.params();
    let weight = resolve_weight(&a.weight, p.s, p.n)?;
    eprintln!(
        "# resolved: net={} b={} s={} n={} m={} weight={} method={}",
        a.net.display(),
        p.b,
        p.s,
        p.n,
        p.m,
        a.weight,
        a.method.as_str()
    );
    let value = match a.method {
        MethodArg::Inversion => wafom_inversion(&net, &weight)?,
        MethodArg::Dual => wafom_dual_bruteforce(&net, &weight)?,
        MethodArg::Highprec => wafom_highprec(&net, &weight)?,
    };
    if a.json {
        println!(
            "{{\"w\": {}, \"lg_w\": {}, \"method\": \"{}\", \"clamped\": {}}}",
            jf(value.w),
            jf(value.lg_w),
            a.method.as_str(),
            value.clamped
        );
    } else {
        println!("w = {:e}", value.w);
        println!("lg_w = {}", value.lg_w);
        println!("method = {}", a.method.as_str());
        println!("clamped = {}", value.clamped);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_integrate(a: IntegrateArgs) -> Result<ExitCode> {
    let net = read_net(&a.net)?;
    let p = net.params();
    let f = Integrand::by_id(&a.function, p.s)?;
    eprintln!(
        "# resolved: net={} fn={} shifts={} seed={}",
        a.net.display(),
        f.id(),
        a.shifts,
        a.seed
    );
    let rep = rmse_estimate(&net, &f, a.shifts as usize, a.seed)?;
    let exact = f.exact_integral();
    let bias = rep.mean_of_estimates - exact;
    if a.json {
        let mut obj = format!(
            "{{\"mean\": {}, \"rmse\": {}, \"lg_rmse\": {}, \"shifts\": {}, \"seed\": {}",
            jf(rep.mean_of_estimates),
            jf(rep.e_value),
            jf(rep.lg_e),
            rep.n_shifts,
            rep.seed
        );
        if a.exact {
            obj.push_str(&format!(
                ", \"exact\": {}, \"bias\": {}, \"lg_bias\": {}",
                jf(exact),
                jf(bias),
                jf(bias.abs().log2())
            ));
        }
        obj.push('}');
        println!("{obj}");
    } else {
        println!("mean = {}", rep.mean_of_estimates);
        println!("rmse = {:e}", rep.e_value);
        println!("lg_rmse = {}", rep.lg_e);
        println!("shifts = {}", rep.n_shifts);
        println!("seed = {}", rep.seed);
        if a.exact {
            println!("exact = {exact}");
            println!("bias = {bias:e}");
            println!("lg_bias = {}", bias.abs().log2());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_fns(spec: &Option<String>, s: usize) -> Result<Vec<Integrand>> {
    match spec {
        None => Integrand::all(s),
        Some(list) => list.split(',').map(|id| Integrand::by_id(id.trim(), s)).collect(),
    }
}

fn cmd_scatter(a: ScatterArgs) -> Result<ExitCode> {
    let fns = parse_fns(&a.fns, a.params.s)?;
    let refs: Vec<&Integrand> = fns.iter().collect();
    let ids: Vec<&str> = fns.iter().map(|f| f.id()).collect();
    eprintln!(
        "# resolved: b={} s={} n={} m={} nets={} shifts={} fns={} seed={}",
        a.params.b,
        a.params.s,
        a.params.n,
        a.params.m,
        a.nets,
        a.shifts,
        ids.join(","),
        a.seed
    );
    let records = scatter_experiment(a.params, a.nets, a.shifts as usize, &refs, a.seed)?;
    let csv = scatter_csv(&records);
    let summary_to_stderr = a.out.is_none();
    write_or_print(&a.out, &csv)?;
    for f in &fns {
        let slot = FN_IDS.iter().position(|id| *id == f.id()).unwrap();
        let line = match merit_error_correlation(&records, slot) {
            Ok(c) => format!("corr({}) = {c:.4}", f.id()),
            Err(e) => format!("corr({}) = n/a ({e})", f.id()),
        };
        if summary_to_stderr {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compare(a: CompareArgs) -> Result<ExitCode> {
    let (b, s, n) = a.params;
    if a.m_list.is_empty() {
        return Err(Error::InvalidParams("compare needs at least one m".into()));
    }
    let f = Integrand::by_id(&a.function, s)?;
    let mut externals = Vec::new();
    for &m in &a.m_list {
        let net = match &a.external_dir {
            None => None,
            Some(dir) => {
                let path = dir.join(format!("nx_s{s}_m{m}.txt"));
                if path.is_file() {
                    let net = ingest_net(&path)?;
                    let q = net.params();
                    if q.b != b || q.s != s || q.m != m {
                        return Err(Error::ShapeMismatch(format!(
                            "{} declares b={} s={} m={}, expected b={b} s={s} m={m}",
                            path.display(),
                            q.b,
                            q.s,
                            q.m
                        )));
                    }
                    Some(net)
                } else {
                    eprintln!("# external for m={m}: {} not found, skipping row", path.display());
                    None
                }
            }
        };
        externals.push((m, net));
    }
    eprintln!(
        "# resolved: b={b} s={s} n={n} m={:?} fn={} shifts={} steps={} restarts={} seed={}",
        a.m_list,
        f.id(),
        a.shifts,
        a.steps,
        a.restarts,
        a.seed
    );
    let template = AnnealConfig {
        steps: a.steps,
        restarts: a.restarts,
        ..AnnealConfig::new(a.seed)
    };
    let params = NetParams::new(b, s, n, 0)?;
    let rows =
        comparison_experiment(params, &externals, &template, &f, a.shifts as usize, a.seed)?;
    print!("{}", comparison_table(&rows));
    if let Some(path) = &a.csv {
        std::fs::write(path, comparison_csv(&rows))?;
    }
    if let Some(path) = &a.json {
        let mut out = String::from("[");
        for (i, r) in rows.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!(
                "{{\"label\": \"{}\", \"s\": {}, \"m\": {}, \"lg_w\": {}, \"lg_e\": {}}}",
                r.label.as_str(),
                r.s,
                r.m,
                jf(r.lg_w),
                jf(r.lg_e)
            ));
        }
        out.push_str("]\n");
        std::fs::write(path, out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(a: SearchArgs) -> Result<ExitCode> {
    let result = if let Some(ck) = &a.resume {
        eprintln!("# resolved: resume={} (shape and schedule from the file)", ck.display());
        anneal_resume(ck)?
    } else {
        let params = a.params.ok_or_else(|| {
            Error::InvalidParams("either --params or --resume is required".into())
        })?;
        let cfg = AnnealConfig {
            steps: a.steps,
            initial_temperature: a.t0,
            cooling_rate: a.cooling,
            moves_per_temperature: a.moves_per_temp,
            seed: a.seed,
            restarts: a.restarts,
        };
        eprintln!(
            "# resolved: b={} s={} n={} m={} steps={} restarts={} seed={} cooling={} \
             moves_per_temp={} t0={}",
            params.b,
            params.s,
            params.n,
            params.m,
            cfg.steps,
            cfg.restarts,
            cfg.seed,
            cfg.cooling_rate,
            cfg.moves_per_temperature,
            a.t0.map_or("auto".into(), |t| t.to_string())
        );
        match &a.checkpoint {
            Some(path) => anneal_checkpointed(params, &cfg, path, a.checkpoint_every)?,
            None => anneal(params, &cfg)?,
        }
    };
    if let Some(path) = &a.out {
        write_net(path, &result.best_net)?;
        eprintln!("# net written to {}", path.display());
    }
    if a.json {
        let mut obj = format!(
            "{{\"lg_w\": {}, \"evaluations\": {}, \"accepted\": {}, \
             \"accepted_worsening\": {}, \"wall_seconds\": {}, \"trace\": [",
            jf(result.best_lg_w),
            result.stats.evaluations,
            result.stats.accepted,
            result.stats.accepted_worsening,
            jf(result.wall_time.as_secs_f64())
        );
        for (i, (step, lg)) in result.trace.iter().enumerate() {
            if i > 0 {
                obj.push_str(", ");
            }
            obj.push_str(&format!("[{step}, {}]", jf(*lg)));
        }
        obj.push_str("]}");
        println!("{obj}");
    } else {
        println!("lg_w = {}", result.best_lg_w);
        println!("evaluations = {}", result.stats.evaluations);
        println!("accepted = {}", result.stats.accepted);
        println!("accepted_worsening = {}", result.stats.accepted_worsening);
        println!("wall_seconds = {:.3}", result.wall_time.as_secs_f64());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen_points(a: GenPointsArgs) -> Result<ExitCode> {
    let net = read_net(&a.net)?;
    let p = net.params();
    eprintln!(
        "# resolved: net={} points={} shift_seed={}",
        a.net.display(),
        (p.b as u64).pow(p.m as u32),
        a.shift_seed.map_or("none".into(), |s| s.to_string())
    );
    let sigma = a.shift_seed.map(|seed| sample_shift(p, seed, 0, 0));
    let points = enumerate_points(&net)?;
    let mut csv = String::new();
    for i in 0..p.s {
        if i > 0 {
            csv.push(',');
        }
        csv.push_str(&format!("x{i}"));
    }
    csv.push('\n');
    for pt in &points {
        let coords = match &sigma {
            Some(sg) => psi(p.b, &shift(pt, sg, p.b)?),
            None => psi(p.b, pt),
        };
        let row: Vec<String> = coords.iter().map(|x| x.to_string()).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_or_print(&a.out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_ingest(a: IngestArgs) -> Result<ExitCode> {
    let net = ingest_net(&a.input)?;
    let p = net.params();
    eprintln!(
        "# resolved: input={} b={} s={} n={} m={} out={}",
        a.input.display(),
        p.b,
        p.s,
        p.n,
        p.m,
        a.out.display()
    );
    write_net(&a.out, &net)?;
    Ok(ExitCode::SUCCESS)
}

// --- verify battery ---------------------------------------------------------

struct Check {
    name: &'static str,
    dev: f64,
    tol: f64,
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    eprintln!("# resolved: seed={} pairs={}", a.seed, a.pairs);
    let mut checks: Vec<Check> = Vec::new();

    // Character orthogonality over small groups in several bases.
    let mut dev: f64 = 0.0;
    for (b, s, n) in [(2, 2, 3), (3, 1, 3), (5, 1, 2)] {
        dev = dev.max(character_orthogonality_dev(NetParams::new(b, s, n, 0)?)?);
    }
    checks.push(Check { name: "character-orthogonality", dev, tol: 1e-12 });

    // Transform invariance under summation order.
    let f1 = Integrand::by_id("f1", 2)?;
    let table = GroupFunction::discretize(&f1, NetParams::new(2, 2, 3, 0)?, 4)?;
    checks.push(Check {
        name: "dft-order-invariance",
        dev: dft_order_invariance_dev(&table)?,
        tol: 1e-12,
    });

    // Randomized identities over (function, net) pairs.
    let shapes = [(2u32, 2usize, 3usize), (2, 3, 2), (3, 1, 3), (3, 2, 2), (5, 1, 2)];
    let mut var_dev: f64 = 0.0;
    let mut poisson_dev: f64 = 0.0;
    let mut shift_dev: f64 = 0.0;
    let mut unbiased_dev: f64 = 0.0;
    for k in 0..a.pairs {
        let (b, s, n) = shapes[(k % shapes.len() as u64) as usize];
        let m = 1 + (k as usize % (s * n - 1).max(1));
        let p = NetParams::new(b, s, n, m)?;
        let net = (0..).find_map(|t| random_net_strict(p, a.seed ^ (1000 * k + t)).ok()).unwrap();
        let fid = FN_IDS[(k % 8) as usize];
        let f = Integrand::by_id(fid, s)?;
        let table = GroupFunction::discretize(&f, p, 2)?;
        let (by_shifts, by_dual) = variance_exact(&table, &net)?;
        let scale = by_shifts.abs().max(by_dual.abs()).max(1.0);
        var_dev = var_dev.max((by_shifts - by_dual).abs() / scale);
        let pc = poisson_check(&table, &net)?;
        let pscale = pc.net_side.abs().max(pc.dual_side.abs()).max(1.0);
        poisson_dev = poisson_dev.max((pc.net_side - pc.dual_side).abs() / pscale);
        poisson_dev = poisson_dev.max(pc.dual_imag_abs);
        let sigma = sample_shift(p, a.seed.wrapping_add(k), 7, 0);
        shift_dev = shift_dev.max(shifted_fourier_check(&table, &sigma)?);
        let mean = table.mean();
        let estimates = table.all_shift_estimates(&net)?;
        let grand = estimates.iter().sum::<f64>() / estimates.len() as f64;
        unbiased_dev = unbiased_dev.max((grand - mean).abs() / mean.abs().max(1.0));
    }
    checks.push(Check { name: "variance-identity", dev: var_dev, tol: 1e-12 });
    checks.push(Check { name: "poisson-summation", dev: poisson_dev, tol: 1e-12 });
    checks.push(Check { name: "shift-character", dev: shift_dev, tol: 1e-12 });
    checks.push(Check { name: "shift-unbiasedness", dev: unbiased_dev, tol: 1e-12 });

    // Walsh coefficient decay bound (ratio stays at or under 1).
    let mut ratio: f64 = 0.0;
    for (id, s, n) in [("f1", 1, 3), ("f1", 2, 2), ("f3", 2, 2)] {
        let f = Integrand::by_id(id, s)?;
        ratio = ratio.max(walsh_coefficient_bound_check(&f, NetParams::new(2, s, n, 0)?)?);
    }
    checks.push(Check { name: "walsh-decay-bound", dev: ratio - 1.0, tol: 1e-3 });

    // RMS error bound: lhs <= rhs, reported as the worst lhs/rhs ratio.
    let f = Integrand::by_id("f1", 1)?;
    let p = NetParams::new(2, 1, 3, 2)?;
    let mut worst: f64 = 0.0;
    for k in 0..a.pairs.min(6) {
        let net = (0..).find_map(|t| random_net_strict(p, 31 * k + t + a.seed).ok()).unwrap();
        let (lhs, rhs) = kh_rmse_check(&f, &net)?;
        worst = worst.max(lhs / rhs);
    }
    checks.push(Check { name: "rmse-bound", dev: (worst - 1.0).max(0.0), tol: 1e-12 });

    // Merit inversion against the explicit dual sum.
    let mut mw_dev: f64 = 0.0;
    for k in 0..a.pairs {
        let (b, s, n) = if k % 2 == 0 { (2, 2, 3) } else { (3, 1, 3) };
        let m = 1 + (k as usize % (s * n - 1));
        let p = NetParams::new(b, s, n, m)?;
        let net = (0..).find_map(|t| random_net_strict(p, 77 * k + t + a.seed).ok()).unwrap();
        let w = WeightSpec::dick_plus_hamming(s, n);
        let a_val = wafom_inversion(&net, &w)?;
        let b_val = wafom_dual_bruteforce(&net, &w)?;
        let sq_a = a_val.w * a_val.w;
        let sq_b = b_val.w * b_val.w;
        mw_dev = mw_dev.max((sq_a - sq_b).abs() / sq_b.abs().max(1e-28));
    }
    checks.push(Check { name: "merit-inversion", dev: mw_dev, tol: 1e-12 });

    let mut failed = false;
    for c in &checks {
        let ok = c.dev <= c.tol;
        failed |= !ok;
        println!(
            "{} {:<24} max dev {:9.2e} (tol {:.0e})",
            if ok { "ok  " } else { "FAIL" },
            c.name,
            c.dev,
            c.tol
        );
    }
    Ok(if failed { ExitCode::from(2) } else { ExitCode::SUCCESS })
}
