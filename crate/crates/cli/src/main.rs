use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kohncert_core::bounds::{bound_epsilon, BoundBreakdown};
use kohncert_core::pipeline::{multiplicities, run_pipeline, MultiplicityReport, EXIT_INPUT_ERROR};
use kohncert_core::problem::{parse_input_file, ProblemSpec};

#[derive(Parser)]
#[command(name = "kohncert", version, about = "Exact Kohn-algorithm certificates for special domains in C^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute s both ways, run the multiplier-ideal iteration and compare with the bound.
    Certify(CertifyArgs),
    /// Print the factor breakdown of the bound for a given multiplicity.
    Bound {
        #[arg(long = "s")]
        s: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Only the two multiplicity computations.
    Multiplicity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, required_unless_present = "input_dir", conflicts_with = "input_dir")]
    input: Option<PathBuf>,
    /// Certify every `*.toml` file in a directory, in name order.
    #[arg(long)]
    input_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<u32>,
    #[arg(long)]
    jet_cap: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include the full multiplier trace.
    #[arg(long)]
    verbose: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn load(path: &Path, seed: Option<u64>) -> Result<ProblemSpec, String> {
    let mut spec = parse_input_file(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    Ok(spec)
}

fn certify_one(path: &Path, args: &CertifyArgs) -> i32 {
    let mut spec = match load(path, args.seed) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    if let Some(m) = args.max_steps {
        spec.caps.max_steps = m;
    }
    if let Some(j) = args.jet_cap {
        spec.caps.jet_cap = j;
    }
    if let Err(e) = spec.validate_caps() {
        eprintln!("error: {e}");
        return EXIT_INPUT_ERROR;
    }
    let report = run_pipeline(&spec, args.verbose);
    match args.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    report.exit_code()
}

fn certify(args: &CertifyArgs) -> i32 {
    let Some(dir) = &args.input_dir else {
        return certify_one(args.input.as_deref().expect("clap enforces input"), args);
    };
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect(),
        Err(e) => {
            eprintln!("error: {}: {e}", dir.display());
            return EXIT_INPUT_ERROR;
        }
    };
    files.sort();
    let mut worst = 0;
    for f in &files {
        if args.format == Format::Text {
            println!("== {}", f.display());
        }
        worst = worst.max(certify_one(f, args));
    }
    worst
}

fn print_bound(b: &BoundBreakdown, format: Format) {
    if format == Format::Json {
        println!(
            "{}",
            serde_json::to_string_pretty(&b.to_serializable()).expect("bound serializes")
        );
        return;
    }
    let r = b.to_serializable();
    println!("s = {}", r.s);
    println!("epsilon = {}", r.epsilon);
    println!(
        "breakdown: 2^{} * {} * {} * {}",
        r.exponent, r.s_squared, r.quartic, r.binom_factor
    );
    println!("  2^((4s^2-1)s+3)  = 2^{} = {}", r.exponent, r.power_factor);
    println!("  s^2              = {}", r.s_squared);
    println!("  (4s^2-1)^4       = {}", r.quartic);
    println!("  C(8s+1, 8s-1)    = {}", r.binom_factor);
}

fn print_multiplicity(r: &MultiplicityReport, format: Format) {
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(r).expect("report serializes"));
        return;
    }
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
    println!("germs: {}", r.germs.join(", "));
    println!("s (jets): {} ({})", opt(r.s_jets), r.s_jets_status);
    println!("s (projection, {}): {}", r.projection_target, opt(r.s_projection));
    if let Some(p) = &r.generic_pair {
        println!("generic pair: f = {}, g = {} (colength {})", p.f, p.g, p.colength);
    }
    if let Some(sh) = &r.projection_shear {
        println!(
            "shear: [[{}, {}], [{}, {}]] after {} attempt(s)",
            sh.a, sh.b, sh.c, sh.d, sh.attempts
        );
    }
    if let Some(e) = &r.projection_error {
        println!("projection error: {e}");
    }
    println!("methods agree: {}", r.methods_agree);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Certify(args) => certify(&args),
        Command::Bound { s, format } => match bound_epsilon(s) {
            Ok(b) => {
                print_bound(&b, format);
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT_ERROR
            }
        },
        Command::Multiplicity { input, seed, format } => match load(&input, seed) {
            Ok(spec) => {
                let r = multiplicities(&spec);
                print_multiplicity(&r, format);
                r.exit_code()
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT_ERROR
            }
        },
    };
    ExitCode::from(code as u8)
}
