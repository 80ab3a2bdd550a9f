//! Command-line entry point for the chain/noise/estimation pipeline.
//!
//! Exit codes: 0 on success, 1 on validation or admissibility failures,
//! 2 on I/O and file-format problems (clap reports flag errors as 2 as
//! well). Every randomized subcommand requires an explicit `--seed`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vlmc::bounds::{min_sample_size, recovery_error_bound, theoretical_window_of, BoundParams};
use vlmc::experiment::{run_recovery, ExperimentConfig};
use vlmc::{
    estimate_tree, ChainLaw, ContextTree, Error, NoiseChannel, PerturbedLaw, SamplePath, Seq,
    Symbol,
};

#[derive(Parser)]
#[command(
    name = "vlmc",
    version,
    about = "Simulate binary variable-memory chains, flip them through a noise channel, \
             compute exact laws, and recover context trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a context tree file.
    Tree {
        #[command(subcommand)]
        action: TreeAction,
    },
    /// Draw a stationary sample path from a tree.
    Simulate {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Flip each symbol of a sample independently with probability eps.
    Perturb {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate a context tree from a sample by threshold pruning.
    Estimate {
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print exact observed-chain probabilities as TSV rows.
    Exact {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Single window, e.g. --w 0110
        #[arg(long, conflicts_with = "depth")]
        w: Option<String>,
        /// All windows up to this length
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Certify that observed conditionals stay within c·eps of the
    /// hidden-chain conditionals, exhaustively over short windows.
    Certify {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        jmax: usize,
    },
    /// Print the theoretical and exact threshold windows.
    Window {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        d: usize,
        /// Also print the bound and minimal n for this delta at level K
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 2, value_name = "K")]
        level: usize,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Run a seeded Monte Carlo recovery experiment from a config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum TreeAction {
    /// Parse a tree file and report its validity flags.
    Validate {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Print alpha, the continuity rate, beta, beta*, and c.
    Constants {
        #[arg(long)]
        tree: PathBuf,
    },
    /// Print the context set truncated to level K.
    Truncate {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_format_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn load_tree(path: &Path) -> Result<ContextTree, Error> {
    let text = fs::read_to_string(path)?;
    ContextTree::parse(&text)
}

fn load_sample(path: &Path) -> Result<SamplePath, Error> {
    let text = fs::read_to_string(path)?;
    SamplePath::read_from(&text)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Tree { action } => tree_command(action),
        Command::Simulate { tree, n, seed, out } => {
            let law = ChainLaw::new(load_tree(&tree)?)?;
            let path = law.sample(n, seed)?;
            let mut file = fs::File::create(&out)?;
            path.write_to(&mut file)?;
            println!("wrote {} symbols to {}", n, out.display());
            Ok(())
        }
        Command::Perturb {
            input,
            eps,
            seed,
            out,
        } => {
            let sample = load_sample(&input)?;
            let noisy = NoiseChannel::new(eps)?.perturb(&sample, seed);
            let mut file = fs::File::create(&out)?;
            noisy.write_to(&mut file)?;
            println!(
                "flipped {} symbols with eps={eps}, wrote {}",
                sample.len(),
                out.display()
            );
            Ok(())
        }
        Command::Estimate {
            input,
            delta,
            d,
            out,
        } => {
            let sample = load_sample(&input)?;
            let est = estimate_tree(&sample, delta, d)?;
            fs::write(&out, est.serialize())?;
            println!(
                "estimated {} context(s) from n={} (d={d}, delta={delta}, max_delta={})",
                est.contexts.len(),
                est.n,
                est.max_delta
            );
            Ok(())
        }
        Command::Exact {
            tree,
            eps,
            w,
            depth,
        } => {
            let law = perturbed(&tree, eps)?;
            println!("w\tq(w)\tq(0|w)\tq(1|w)");
            match (w, depth) {
                (Some(w), None) => {
                    let w = Seq::parse(&w)?;
                    print_exact_row(&law, w)?;
                }
                (None, Some(depth)) => {
                    for len in 1..=depth {
                        for w in Seq::all_of_len(len) {
                            print_exact_row(&law, w)?;
                        }
                    }
                }
                _ => {
                    return Err(Error::ConfigInvalid(
                        "pass exactly one of --w or --depth".into(),
                    ))
                }
            }
            Ok(())
        }
        Command::Certify { tree, eps, jmax } => {
            let law = perturbed(&tree, eps)?;
            let report = law.certify_gap(jmax)?;
            println!("j\tmax_gap");
            for (j, gap) in report.per_j.iter().enumerate() {
                println!("{j}\t{gap:.12}");
            }
            println!("max_gap={:.12}", report.max_gap);
            println!("bound={:.12}", report.bound);
            println!("holds={}", report.holds);
            let floors = law.check_floors(jmax.min(vlmc::noise::FLOORS_KMAX_CAP))?;
            println!(
                "conditional_floor: min={:.12} alpha={:.12} holds={}",
                floors.min_conditional, floors.alpha, floors.conditional_holds
            );
            println!(
                "flip_posterior: max={:.12} bound={:.12} holds={}",
                floors.max_flip_posterior, floors.posterior_bound, floors.posterior_holds
            );
            if !report.holds || !floors.conditional_holds || !floors.posterior_holds {
                return Err(Error::Inadmissible(
                    "an exhaustive certificate check failed".into(),
                ));
            }
            Ok(())
        }
        Command::Window {
            tree,
            eps,
            d,
            delta,
            level,
            n,
        } => {
            if d == 0 || level == 0 {
                return Err(Error::ConfigInvalid("--d and --level must be at least 1".into()));
            }
            let law = perturbed(&tree, eps)?;
            let theo = theoretical_window_of(law.base(), eps, d);
            let exact = law.exact_delta_window(d)?;
            println!(
                "theoretical\tlow={:.6}\thigh={:.6}\tempty={}",
                theo.low,
                theo.high,
                theo.is_empty()
            );
            println!(
                "exact\tlow={:.6}\thigh={:.6}\tempty={}",
                exact.low,
                exact.high,
                exact.is_empty()
            );
            if let Some(delta) = delta {
                let params =
                    BoundParams::derive(&law, d, level, n.unwrap_or(u64::MAX / 2), delta)?;
                match min_sample_size(&params) {
                    Ok(min_n) => println!("min_n={min_n}"),
                    Err(err) => println!("min_n=na ({err})"),
                }
                if let Some(n) = n {
                    let params = BoundParams { n, ..params };
                    match recovery_error_bound(&params) {
                        Ok(b) => println!("bound={} clamped={}", b.raw, b.clamped),
                        Err(err) => println!("bound=na ({err})"),
                    }
                    println!("admissible={}", params.is_admissible());
                }
            }
            Ok(())
        }
        Command::Experiment { config, out } => {
            let text = fs::read_to_string(&config)?;
            let parsed = ExperimentConfig::parse(&text)?;
            // tree paths in config files resolve relative to the config file
            let tree_path = {
                let p = PathBuf::from(&parsed.tree_path);
                if p.is_absolute() {
                    p
                } else {
                    config.parent().unwrap_or(Path::new(".")).join(p)
                }
            };
            let tree = load_tree(&tree_path)?;
            let report = run_recovery(&tree, &parsed)?;
            fs::write(&out, report.to_tsv())?;
            println!("wrote {} grid rows to {}", report.rows.len(), out.display());
            Ok(())
        }
    }
}

fn tree_command(action: TreeAction) -> Result<(), Error> {
    match action {
        TreeAction::Validate { tree } => {
            let t = load_tree(&tree)?;
            println!("valid=true");
            println!("contexts={}", t.num_contexts());
            println!("height={}", t.height());
            println!("complete={}", t.is_complete());
            println!("irreducible={}", t.is_irreducible());
            Ok(())
        }
        TreeAction::Constants { tree } => {
            let t = load_tree(&tree)?;
            let c = t.constants();
            let rates: Vec<String> = c.beta_seq.iter().map(|b| fmt12(*b)).collect();
            println!("alpha={}", fmt12(c.alpha));
            println!("beta_k=[{}]", rates.join(", "));
            println!("beta={}", fmt12(c.beta));
            println!("beta_star={}", fmt12(c.beta_star));
            println!("c={}", fmt12(c.c_const));
            Ok(())
        }
        TreeAction::Truncate { tree, k } => {
            let t = load_tree(&tree)?;
            for w in t.truncated(k) {
                println!("{w}");
            }
            Ok(())
        }
    }
}

fn perturbed(tree: &Path, eps: f64) -> Result<PerturbedLaw, Error> {
    let chain = ChainLaw::new(load_tree(tree)?)?;
    Ok(PerturbedLaw::new(chain, NoiseChannel::new(eps)?))
}

/// Rounds to 12 significant digits and prints the shortest form; keeps
/// summary lines free of trailing float noise.
fn fmt12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - magnitude);
    ((x * scale).round() / scale).to_string()
}

fn print_exact_row(law: &PerturbedLaw, w: Seq) -> Result<(), Error> {
    let q = law.marginal(w)?;
    let q0 = law.conditional(Symbol::ZERO, w)?;
    let q1 = law.conditional(Symbol::ONE, w)?;
    println!("{w}\t{q:.12}\t{q0:.12}\t{q1:.12}");
    Ok(())
}

