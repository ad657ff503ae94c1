use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use degenkit::{
    evaluate_all, generate_document, render, Command, GenerateKind, Options, EXIT_INPUT,
};
use degenkit_core::Int;

#[derive(Parser)]
#[command(
    name = "degenkit",
    version,
    about = "Toric additivity and component groups of semiabelian degenerations"
)]
struct Cli {
    /// Machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Files {
    /// Input documents; names not found are looked up in the fixture directory
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Toric additivity verdicts, purity cokernel and rank profile
    Analyze(Files),
    /// Monodromy pairing and component group along a trait
    Trait {
        #[command(flatten)]
        files: Files,
        /// Multiplicities a_1,...,a_n of the trait along each branch
        #[arg(long, value_delimiter = ',', required = true)]
        profile: Vec<u64>,
        /// Also report the l-primary part
        #[arg(long)]
        l: Option<Int>,
    },
    /// Cross-check the lattice verdicts against the Tate-module model
    Oracle {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        l: Int,
        /// Torsion level; defaults to the smallest r with l^r above the group order
        #[arg(long)]
        r: Option<u32>,
        /// Compare the component group along this trait as well
        #[arg(long, value_delimiter = ',')]
        profile: Option<Vec<u64>>,
    },
    /// Converse certificate for a principally polarized datum
    Converse(Files),
    /// The Psi group, and its Kummer fixed points with --kummer
    Psi {
        #[command(flatten)]
        files: Files,
        /// Ramification indices m_1,...,m_n of a tame Kummer cover
        #[arg(long, value_delimiter = ',')]
        kummer: Option<Vec<u64>>,
    },
    /// Degeneration datum and equivalence checks of a labelled dual graph
    Curve(Files),
    /// Print a seeded random input document
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Kind::Datum)]
        kind: Kind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Datum,
    ToricAdditive,
    Polarized,
    Graph,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, files, opts) = match cli.command {
        Cmd::Analyze(f) => (Command::Analyze, f.files, Options::default()),
        Cmd::Trait { files, profile, l } => (
            Command::Trait,
            files.files,
            Options {
                profile: Some(profile),
                l,
                ..Options::default()
            },
        ),
        Cmd::Oracle {
            files,
            l,
            r,
            profile,
        } => (
            Command::Oracle,
            files.files,
            Options {
                profile,
                l: Some(l),
                r,
                ..Options::default()
            },
        ),
        Cmd::Converse(f) => (Command::Converse, f.files, Options::default()),
        Cmd::Psi { files, kummer } => (
            Command::Psi,
            files.files,
            Options {
                kummer,
                ..Options::default()
            },
        ),
        Cmd::Curve(f) => (Command::Curve, f.files, Options::default()),
        Cmd::Generate { seed, kind } => {
            let kind = match kind {
                Kind::Datum => GenerateKind::Datum,
                Kind::ToricAdditive => GenerateKind::ToricAdditive,
                Kind::Polarized => GenerateKind::Polarized,
                Kind::Graph => GenerateKind::Graph,
            };
            let doc = generate_document(kind, seed);
            match serde_json::to_string_pretty(&doc) {
                Ok(s) => {
                    println!("{s}");
                    return ExitCode::SUCCESS;
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INPUT as u8);
                }
            }
        }
    };
    let outcomes = evaluate_all(command, &files, &opts);
    let (stdout, stderr, code) = render(&outcomes, cli.json);
    print!("{stdout}");
    eprint!("{stderr}");
    ExitCode::from(code as u8)
}
