//! Command-line entry points: parameter and rate calculators, the rate-sweep
//! CSV emitter, scheme building and serialization, verification reports,
//! in-process end-to-end runs, and the multi-server simulator.
//!
//! Exit codes: 0 ok, 1 verification failure or retrieval mismatch,
//! 2 parameter error, 3 I/O or network error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use num_traits::Signed;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;
use xstpir::protocol::{run_pipeline, Database, SeededNoise};
use xstpir::scheme::{compare_sweep, SchemeParams, SchemeSpec, SweepRow};
use xstpir::verify;
use xstpir_simnet::client::{install, retrieve, tcp_connector};
use xstpir_simnet::scheme_digest;
use xstpir_simnet::server::serve_tcp;

const EXIT_VERIFY: u8 = 1;
const EXIT_PARAMS: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "xstpir",
    about = "X-secure T-private information retrieval tools"
)]
struct Cli {
    /// Print extra detail (scheme dimensions, decoded symbols).
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveArg {
    Rational,
    Hermitian,
}

#[derive(Args)]
struct SchemeArgs {
    /// Curve family.
    #[arg(long, value_enum)]
    curve: CurveArg,
    /// Field size (rational) or curve parameter with field size q² (hermitian).
    #[arg(long)]
    q: u64,
    /// Security parameter X.
    #[arg(long)]
    x: usize,
    /// Privacy parameter T.
    #[arg(long)]
    t: usize,
    /// File length L (rational only; must be even).
    #[arg(long)]
    l: Option<usize>,
    /// Basis parameter m (hermitian only; must be even).
    #[arg(long)]
    m: Option<usize>,
}

impl SchemeArgs {
    fn params(&self) -> Result<SchemeParams, CliError> {
        match self.curve {
            CurveArg::Rational => {
                let l = self
                    .l
                    .ok_or_else(|| params_err("rational scheme needs --l"))?;
                if self.m.is_some() {
                    return Err(params_err("--m applies to the hermitian curve only"));
                }
                Ok(SchemeParams::rational(self.q, l, self.x, self.t))
            }
            CurveArg::Hermitian => {
                let m = self
                    .m
                    .ok_or_else(|| params_err("hermitian scheme needs --m"))?;
                if self.l.is_some() {
                    return Err(params_err("--l is derived for the hermitian curve"));
                }
                Ok(SchemeParams::hermitian(self.q, m, self.x, self.t))
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check feasibility and print N, L, and the exact rate.
    Params(SchemeArgs),
    /// Sweep X+T and emit the five maximum-rate columns as CSV.
    Maxrates {
        /// Field size for the rational/hyperelliptic columns; curve
        /// parameter (field size q²) for the Hermitian columns.
        #[arg(long)]
        q: u64,
        /// Sweep range A:B for X+T.
        #[arg(long)]
        xt: String,
        /// Output CSV path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a scheme and write its canonical serialization.
    Build {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the verification checks against a built scheme file.
    Verify {
        #[arg(long)]
        scheme: PathBuf,
        /// Report path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap on the number of column subsets enumerated per check.
        #[arg(long, default_value_t = 1_000_000)]
        subset_cap: u128,
    },
    /// In-process end-to-end retrieval; prints MATCH or MISMATCH.
    Run {
        #[arg(long)]
        scheme: PathBuf,
        /// Number of files K.
        #[arg(long)]
        files: usize,
        /// Requested file index, 1-based.
        #[arg(long)]
        theta: usize,
        /// Seed for database, storage noise, and query noise
        /// (default: XSTPIR_SEED or 0).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Serve one storage node over TCP.
    Serve {
        /// This server's index in [0, N).
        #[arg(long)]
        index: u32,
        /// Listen address, host:port.
        #[arg(long)]
        listen: String,
        /// Scheme file to take the digest from.
        #[arg(long)]
        scheme: Option<PathBuf>,
        /// Expected scheme digest as 64 hex digits (alternative to --scheme).
        #[arg(long)]
        digest: Option<String>,
    },
    /// Retrieve a file from running servers.
    Retrieve {
        /// File listing one host:port per line, in server order.
        #[arg(long)]
        servers: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        files: usize,
        /// Requested file index, 1-based.
        #[arg(long)]
        theta: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Generate the seeded database and install shares before retrieving;
        /// the result is then checked against the plaintext.
        #[arg(long)]
        install: bool,
        /// Per-server network timeout in milliseconds.
        #[arg(long, default_value_t = 5000)]
        timeout_ms: u64,
    },
}

enum CliError {
    Params(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Params(_) => ExitCode::from(EXIT_PARAMS),
            CliError::Io(_) => ExitCode::from(EXIT_IO),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Params(m) | CliError::Io(m) => m,
        }
    }
}

fn params_err(m: impl Into<String>) -> CliError {
    CliError::Params(m.into())
}

fn io_err(m: impl Into<String>) -> CliError {
    CliError::Io(m.into())
}

fn default_seed(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("XSTPIR_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

/// Exact decimal rendering to six places, rounding half away from zero.
fn decimal6(r: Ratio<i128>) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let (n, d) = (r.numer().abs(), *r.denom());
    let scaled = (n * 2_000_000 + d) / (2 * d);
    format!("{sign}{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

fn fraction(r: Option<Ratio<i128>>) -> String {
    match r {
        None => "0".to_string(),
        Some(v) if v.denom() == &1 => v.numer().to_string(),
        Some(v) => format!("{}/{}", v.numer(), v.denom()),
    }
}

fn rate_cell(r: Option<Ratio<i128>>) -> String {
    decimal6(SweepRow::or_zero(r))
}

fn sweep_csv(q: u64, lo: u64, hi: u64) -> String {
    let mut out = String::from(
        "xt,new_rational,old_rational,hyper_bound_g1,old_hermitian,new_hermitian,\
         new_rational_frac,old_rational_frac,hyper_bound_g1_frac,old_hermitian_frac,new_hermitian_frac\n",
    );
    for row in compare_sweep(q, lo, hi) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.xt,
            rate_cell(row.new_rational),
            rate_cell(row.old_rational),
            rate_cell(row.hyper_g1),
            rate_cell(row.old_hermitian),
            rate_cell(row.new_hermitian),
            fraction(row.new_rational),
            fraction(row.old_rational),
            fraction(row.hyper_g1),
            fraction(row.old_hermitian),
            fraction(row.new_hermitian),
        ));
    }
    out
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, content).map_err(|e| io_err(format!("writing {}: {e}", p.display())))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_scheme(path: &PathBuf) -> Result<SchemeSpec, CliError> {
    let bytes =
        std::fs::read(path).map_err(|e| io_err(format!("reading {}: {e}", path.display())))?;
    SchemeSpec::from_bytes(&bytes).map_err(|e| io_err(format!("parsing {}: {e}", path.display())))
}

fn cmd_params(args: &SchemeArgs) -> Result<ExitCode, CliError> {
    let params = args.params()?;
    println!("scheme: {}", params.label());
    let mut first_failure = None;
    for (condition, ok, detail) in params.conditions() {
        println!(
            "  [{}] {condition} ({detail})",
            if ok { "pass" } else { "FAIL" }
        );
        if !ok && first_failure.is_none() {
            first_failure = Some(condition);
        }
    }
    if let Some(cond) = first_failure {
        println!("infeasible: violated {cond}");
        return Ok(ExitCode::from(EXIT_PARAMS));
    }
    let n = params.expected_servers();
    let rate = Ratio::new(params.file_len as i128, n as i128);
    println!("L = {}", params.file_len);
    println!("N = {n}");
    println!("deg(D^full) = {}", params.expected_deg_dfull());
    println!("rate = {} = {}", fraction(Some(rate)), decimal6(rate));
    println!("feasible: yes");
    Ok(ExitCode::SUCCESS)
}

fn cmd_maxrates(q: u64, xt: &str, out: &Option<PathBuf>) -> Result<ExitCode, CliError> {
    let (lo, hi) = xt
        .split_once(':')
        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
        .ok_or_else(|| params_err(format!("bad --xt range {xt:?}, expected A:B")))?;
    if lo < 2 || hi < lo {
        return Err(params_err(format!(
            "bad --xt range {xt:?}: need 2 <= A <= B"
        )));
    }
    write_or_print(out, &sweep_csv(q, lo, hi))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_build(args: &SchemeArgs, out: &PathBuf, verbose: bool) -> Result<ExitCode, CliError> {
    let params = args.params()?;
    if let Err(e) = params.validate() {
        eprintln!("{e}");
        return Ok(ExitCode::from(EXIT_PARAMS));
    }
    let spec = SchemeSpec::build(&params).map_err(|e| io_err(e.to_string()))?;
    let bytes = spec.to_bytes();
    std::fs::write(out, &bytes).map_err(|e| io_err(format!("writing {}: {e}", out.display())))?;
    println!(
        "built {}: N={}, rate {}, digest {}",
        params.label(),
        spec.n_servers(),
        fraction(Some(spec.rate())),
        hex::encode(scheme_digest(&spec)),
    );
    if verbose {
        println!(
            "  L={} dim_sec={} dim_priv={} noise_rows={} deg(D^full)={} file={} bytes",
            spec.file_len(),
            spec.dim_sec(),
            spec.dim_priv(),
            spec.w().rows(),
            spec.deg_dfull(),
            bytes.len(),
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(path: &PathBuf, out: &Option<PathBuf>, cap: u128) -> Result<ExitCode, CliError> {
    let spec = load_scheme(path)?;
    let report = verify::run_all(&spec, cap);
    write_or_print(out, &report.to_csv())?;
    if report.passed() {
        println!("verification: all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verification: FAILURES present");
        Ok(ExitCode::from(EXIT_VERIFY))
    }
}

fn cmd_run(
    path: &PathBuf,
    files: usize,
    theta: usize,
    seed: Option<u64>,
    verbose: bool,
) -> Result<ExitCode, CliError> {
    let spec = load_scheme(path)?;
    if theta == 0 || theta > files {
        eprintln!("--theta must be in [1, {files}]");
        return Ok(ExitCode::from(EXIT_PARAMS));
    }
    let seed = default_seed(seed);
    let mut dbnoise = SeededNoise::new(seed);
    let db = Database::random(files, spec.file_len(), spec.field(), &mut dbnoise);
    let decoded = run_pipeline(
        &spec,
        &db,
        theta - 1,
        seed.wrapping_add(1),
        seed.wrapping_add(2),
    )
    .map_err(|e| io_err(e.to_string()))?;
    let expected = db.file(theta - 1);
    if verbose {
        println!(
            "decoded: {:?}",
            decoded.iter().map(|e| e.index()).collect::<Vec<_>>()
        );
    }
    println!(
        "scheme {}: K={files} theta={theta} seed={seed} N={} rate={}",
        spec.params().label(),
        spec.n_servers(),
        fraction(Some(spec.rate())),
    );
    if decoded == expected {
        println!("MATCH");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("MISMATCH");
        Ok(ExitCode::from(EXIT_VERIFY))
    }
}

fn cmd_serve(
    index: u32,
    listen: &str,
    scheme: &Option<PathBuf>,
    digest_hex: &Option<String>,
) -> Result<ExitCode, CliError> {
    let digest: [u8; 32] = match (scheme, digest_hex) {
        (Some(path), None) => scheme_digest(&load_scheme(path)?),
        (None, Some(h)) => {
            let bytes = hex::decode(h).map_err(|e| params_err(format!("bad --digest: {e}")))?;
            bytes
                .try_into()
                .map_err(|_| params_err("digest must be 32 bytes"))?
        }
        _ => return Err(params_err("pass exactly one of --scheme or --digest")),
    };
    let handle = serve_tcp(listen, index, digest).map_err(|e| io_err(e.to_string()))?;
    println!(
        "server {index} listening on {}",
        handle.endpoint.as_deref().unwrap_or(listen)
    );
    loop {
        std::thread::sleep(Duration::from_secs(3600));
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_retrieve(
    servers: &PathBuf,
    scheme: &PathBuf,
    files: usize,
    theta: usize,
    seed: Option<u64>,
    do_install: bool,
    timeout_ms: u64,
) -> Result<ExitCode, CliError> {
    let spec = load_scheme(scheme)?;
    if theta == 0 || theta > files {
        eprintln!("--theta must be in [1, {files}]");
        return Ok(ExitCode::from(EXIT_PARAMS));
    }
    let list = std::fs::read_to_string(servers)
        .map_err(|e| io_err(format!("reading {}: {e}", servers.display())))?;
    let endpoints: Vec<String> = list
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect();
    if endpoints.len() != spec.n_servers() {
        eprintln!(
            "server list has {} endpoints, scheme needs {}",
            endpoints.len(),
            spec.n_servers()
        );
        return Ok(ExitCode::from(EXIT_PARAMS));
    }
    let seed = default_seed(seed);
    let digest = scheme_digest(&spec);
    let connect = tcp_connector(endpoints, Duration::from_millis(timeout_ms));
    let db = do_install.then(|| {
        let mut dbnoise = SeededNoise::new(seed);
        Database::random(files, spec.file_len(), spec.field(), &mut dbnoise)
    });
    if let Some(db) = &db {
        install(&connect, &spec, db, seed.wrapping_add(1), digest)
            .map_err(|e| io_err(e.to_string()))?;
    }
    let symbols = retrieve(
        &connect,
        &spec,
        theta - 1,
        files,
        seed.wrapping_add(2),
        digest,
    )
    .map_err(|e| io_err(e.to_string()))?;
    println!(
        "retrieved file {theta}: {:?}",
        symbols.iter().map(|s| s.index()).collect::<Vec<_>>()
    );
    if let Some(db) = &db {
        if symbols == db.file(theta - 1) {
            println!("MATCH");
        } else {
            println!("MISMATCH");
            return Ok(ExitCode::from(EXIT_VERIFY));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Params(args) => cmd_params(args),
        Command::Maxrates { q, xt, out } => cmd_maxrates(*q, xt, out),
        Command::Build { scheme, out } => cmd_build(scheme, out, cli.verbose),
        Command::Verify {
            scheme,
            out,
            subset_cap,
        } => cmd_verify(scheme, out, *subset_cap),
        Command::Run {
            scheme,
            files,
            theta,
            seed,
        } => cmd_run(scheme, *files, *theta, *seed, cli.verbose),
        Command::Serve {
            index,
            listen,
            scheme,
            digest,
        } => cmd_serve(*index, listen, scheme, digest),
        Command::Retrieve {
            servers,
            scheme,
            files,
            theta,
            seed,
            install,
            timeout_ms,
        } => cmd_retrieve(
            servers,
            scheme,
            *files,
            *theta,
            *seed,
            *install,
            *timeout_ms,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}
