use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, Subcommand};
use mhc_cli::commands;

/// Workbench for the modalized Heyting calculus E and its neighbour systems.
#[derive(Parser)]
#[command(name = "mhc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a derivation certificate file.
    Check {
        #[arg(long)]
        file: PathBuf,
        /// Additional axioms appended to the calculus, repeatable.
        #[arg(long = "extra-axiom")]
        extra_axioms: Vec<String>,
    },
    /// Push substitution steps down to axioms and premises.
    Refine {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discharge a premise via the deduction theorem (ws mode only).
    Deduce {
        #[arg(long)]
        file: PathBuf,
        /// The premise to discharge.
        #[arg(long)]
        discharge: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search finite algebras of a class for a countermodel. Exits 1 when a
    /// refutation is found, 0 when none exists within the bound.
    Countermodel {
        #[arg(long)]
        formula: String,
        /// mHeyting, kuz, e, or k4grz.
        #[arg(long, default_value = "mHeyting")]
        class: String,
        /// Comma-separated axiom groups the algebra must validate, e.g. "i,m1".
        #[arg(long = "require-valid")]
        require_valid: Option<String>,
        /// Bound on the number of elements of the base algebra.
        #[arg(long, default_value_t = 4)]
        max: usize,
    },
    /// Search finite intuitionistic Kripke models for a countermodel.
    Kripke {
        #[arg(long)]
        formula: String,
        /// Bound on the number of worlds.
        #[arg(long, default_value_t = 4)]
        max: usize,
    },
    /// Apply the doubling construction to an algebra file.
    Double {
        #[arg(long)]
        file: PathBuf,
    },
    /// Translate a formula: t (modal to bimodal), s (bimodal to modal), or
    /// embed (their composite).
    Translate {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        map: String,
    },
    /// Run the assertoric-equipollence pipeline on an E-certificate, emitting
    /// the two intermediate certificates and the final Int certificate.
    Transform {
        #[arg(long)]
        file: PathBuf,
        #[arg(long = "out-dir", default_value = ".")]
        out_dir: PathBuf,
        /// Assertoric pattern the premises instantiate; inferred if omitted.
        #[arg(long)]
        pattern: Option<String>,
    },
    /// Run the full acceptance suite; optionally export the bundled
    /// certificates first.
    #[command(name = "certify-all")]
    CertifyAll {
        #[arg(long = "emit-dir")]
        emit_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Check { file, extra_axioms } => commands::cmd_check(&file, &extra_axioms),
        Command::Refine { file, out } => commands::cmd_refine(&file, out.as_deref()),
        Command::Deduce { file, discharge, out } => {
            commands::cmd_deduce(&file, &discharge, out.as_deref())
        }
        Command::Countermodel { formula, class, require_valid, max } => {
            commands::cmd_countermodel(&formula, &class, require_valid.as_deref(), max)
        }
        Command::Kripke { formula, max } => commands::cmd_kripke(&formula, max),
        Command::Double { file } => commands::cmd_double(&file),
        Command::Translate { formula, map } => commands::cmd_translate(&formula, &map),
        Command::Transform { file, out_dir, pattern } => {
            commands::cmd_transform(&file, &out_dir, pattern.as_deref())
        }
        Command::CertifyAll { emit_dir } => commands::cmd_certify_all(emit_dir.as_deref()),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            exit(commands::EXIT_USAGE);
        }
    }
}
