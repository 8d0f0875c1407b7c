//! The `ncspec` command line: workspaces in TOML, reports in JSON, graphs
//! in Graphviz.
//!
//! Exit codes: 0 success, 1 a check failed, 2 undetermined, 3 bad input.

pub mod commands;
pub mod export;
pub mod workspace;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ncspec_core::exactlin::FieldSpec;
use ncspec_core::topos::CoverageMode;

use commands::{Options, Outcome};
use workspace::{Resolved, Workspace};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] ncspec_core::Error),
}

impl CliError {
    pub fn message(&self) -> String {
        self.to_string()
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ncspec_core::Error::Undetermined(_)) => 2,
            _ => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Export {
    Json,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "ncspec", version, about = "Localization lattices, spectra and descent for finite-dimensional algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// `q` or `fp:<p>`; overrides the workspace field.
    #[arg(long, global = true)]
    pub field: Option<FieldSpec>,
    #[arg(long, global = true)]
    pub max_deg: Option<usize>,
    #[arg(long, global = true)]
    pub degree_cap: Option<usize>,
    #[arg(long, global = true)]
    pub t_max: Option<usize>,
    /// `fine`, `trivial` or `declared`.
    #[arg(long, global = true)]
    pub topology: Option<CoverageMode>,
    #[arg(long, global = true, value_enum)]
    pub export: Option<Export>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Workspace arguments are file paths, or `@name` for a built-in one.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a morphism is a homotopical epimorphism.
    VerifyEpi { workspace: String, morphism: String },
    /// Build a localization lattice.
    Lattice { workspace: String, lattice: String },
    /// Points and opens of the frame of ideals.
    Spectrum { workspace: String, target: String },
    /// Sheaf and descent checks for a cover.
    Descend {
        workspace: String,
        target: String,
        /// A cover member; repeat for each one.
        #[arg(long, required = true)]
        cover: Vec<String>,
        /// The covered node, by default the top.
        #[arg(long)]
        open: Option<String>,
    },
    /// The map of spectra induced by a morphism.
    Map { workspace: String, morphism: String },
    /// List fixtures, or print a built-in workspace.
    Fixtures { name: Option<String> },
    /// Run the directives of a workspace, or of every built-in one.
    Selftest { workspace: Option<String> },
}

pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn load(arg: &str) -> Result<(String, String), CliError> {
    if let Some(name) = arg.strip_prefix('@') {
        let text = workspace::builtin(name).ok_or_else(|| CliError::Input(format!("no built-in workspace `{name}`")))?;
        return Ok((arg.to_string(), text.to_string()));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok((arg.to_string(), text))
}

fn resolve(arg: &str, field: Option<FieldSpec>) -> Result<Resolved, CliError> {
    let (label, text) = load(arg)?;
    let ws = Workspace::parse(&text).map_err(|e| CliError::Input(format!("{label}: {}", e.message())))?;
    Resolved::new(ws, field).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{label}: {m}")),
        e => e,
    })
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let opts = Options {
        field: cli.field,
        max_deg: cli.max_deg,
        degree_cap: cli.degree_cap,
        t_max: cli.t_max,
        topology: cli.topology,
    };
    match &cli.command {
        Command::VerifyEpi { workspace, morphism } => commands::verify_epi(&resolve(workspace, opts.field)?, morphism, &opts),
        Command::Lattice { workspace, lattice } => commands::lattice(&mut resolve(workspace, opts.field)?, lattice, &opts),
        Command::Spectrum { workspace, target } => commands::spectrum(&mut resolve(workspace, opts.field)?, target, &opts),
        Command::Descend {
            workspace,
            target,
            cover,
            open,
        } => commands::descend(&mut resolve(workspace, opts.field)?, target, cover, open.as_deref(), &opts),
        Command::Map { workspace, morphism } => commands::map(&mut resolve(workspace, opts.field)?, morphism, &opts),
        Command::Fixtures { name } => commands::fixtures(name.as_deref()),
        Command::Selftest { workspace } => {
            let list = match workspace {
                Some(w) => vec![load(w)?],
                None => workspace::BUILTIN.iter().map(|(n, t)| (format!("@{n}"), t.to_string())).collect(),
            };
            commands::selftest(&list, &opts)
        }
    }
}

fn render(cli: &Cli, o: &Outcome) -> Result<String, CliError> {
    match cli.export {
        None => Ok(o.text()),
        Some(Export::Json) => Ok(o.json()),
        Some(Export::Dot) => o
            .dot
            .clone()
            .ok_or_else(|| CliError::Input(format!("{} has no graph export", o.command))),
    }
}

pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Invocation { code, stdout: text, stderr: String::new() }
            } else {
                Invocation { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let fail = |e: CliError| Invocation {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("error: {}\n", e.message()),
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let text = match render(&cli, &outcome) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let code = outcome.status.exit_code();
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Invocation {
                code,
                stdout: format!("wrote {}\nstatus: {}\n", path.display(), outcome.status.name()),
                stderr: String::new(),
            },
            Err(e) => fail(CliError::Input(format!("{}: {e}", path.display()))),
        },
        None => Invocation {
            code,
            stdout: text,
            stderr: String::new(),
        },
    }
}
