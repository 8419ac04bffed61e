use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cutmilnor::cdj::{self, CdjError};
use cutmilnor::chen::{ChenContext, ChenError};
use cutmilnor::diagram::CutDiagram;
use cutmilnor::gauss::moves::parse_script;
use cutmilnor::gauss::GaussDiagram;
use cutmilnor::milnor::{free_kernel, parse_sequence, InvariantTable, MilnorError, Mode, TableOptions};
use cutmilnor::spun::spun;
use cutmilnor::suite::{self, Scale};

// Output goes through here so a closed pipe ends quietly.
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "cutmilnor", version, about = "Milnor invariants of cut-diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Series,
    Word,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupKind {
    Wirtinger,
    Nilpotent,
    Reduced,
}

#[derive(Subcommand)]
enum Command {
    /// Check a CDJ file (or Gauss code) and report every problem found.
    Validate { path: PathBuf },
    /// Tabulate m, Delta, nu and the arc invariants.
    Invariants {
        path: PathBuf,
        /// Longest |I| tabulated.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Only sequences without repeated indices.
        #[arg(long)]
        nonrepeated: bool,
        /// Compute single-component diagrams instead of reporting zeros.
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Series)]
        mode: ModeArg,
        /// Seed for the road network; the canonical one is used otherwise.
        #[arg(long)]
        seed: Option<u64>,
        /// Nilpotency class, at least max-len + 1.
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also list rows where everything vanishes.
        #[arg(long)]
        all: bool,
    },
    /// Convert a Gauss code into a CDJ file.
    ImportGauss {
        path: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Spin a diagram one dimension up.
    Spun {
        path: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print a presentation of the group or of a nilpotent quotient.
    Group {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = GroupKind::Nilpotent)]
        kind: GroupKind,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Apply a move script, or random moves, to a Gauss code.
    Moves {
        path: PathBuf,
        /// File with one move per line.
        #[arg(long, conflicts_with = "random")]
        script: Option<PathBuf>,
        #[arg(long, conflicts_with = "script")]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allow self-virtualization among random moves.
        #[arg(long)]
        self_virtual: bool,
    },
    /// Rank of the common kernel of Milnor maps of one component.
    Kernel {
        path: PathBuf,
        /// Sequences such as `13 23`, all ending in the same component.
        #[arg(required = true)]
        sequences: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print a bundled example, or list them.
    Example { name: Option<String> },
    /// Run the acceptance suite at reduced sizes.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Full sizes instead.
        #[arg(long)]
        full: bool,
    },
}

enum Failure {
    Usage(String),
    Validation(String),
    Guard(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Guard(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Guard(m) => m,
        }
    }
}

impl From<CdjError> for Failure {
    fn from(e: CdjError) -> Self {
        match e {
            CdjError::Parse { .. } => Failure::Usage(e.to_string()),
            CdjError::Invalid(_) => Failure::Validation(e.to_string()),
        }
    }
}

impl From<ChenError> for Failure {
    fn from(e: ChenError) -> Self {
        match e {
            ChenError::ClassGuard { .. } | ChenError::LengthGuard(_) => Failure::Guard(e.to_string()),
            ChenError::Diagram(_) => Failure::Validation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<MilnorError> for Failure {
    fn from(e: MilnorError) -> Self {
        match e {
            MilnorError::Chen(c) => c.into(),
            MilnorError::SelfSingular => Failure::Validation(format!("{} (pass --nonrepeated)", e)),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    match fs::read_to_string(path) {
        Ok(t) => Ok(t),
        Err(e) => {
            // Bundled files are reachable by bare name.
            let name = path.to_string_lossy();
            suite::bundled_source(&name).map(str::to_string).ok_or_else(|| Failure::Usage(format!("{}: {}", name, e)))
        }
    }
}

fn is_gauss(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gauss")
}

fn load_gauss(path: &Path) -> Result<GaussDiagram, Failure> {
    GaussDiagram::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn load(path: &Path) -> Result<CutDiagram, Failure> {
    if is_gauss(path) {
        Ok(load_gauss(path)?.to_cut_diagram())
    } else {
        Ok(cdj::parse(&read(path)?)?)
    }
}

fn write_out(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {}", p.display(), e))),
        None => {
            out!("{}", text);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { path } => {
            let d = if is_gauss(&path) {
                load_gauss(&path)?.to_cut_diagram()
            } else {
                cdj::parse_unchecked(&read(&path)?)?
            };
            let report = d.validate();
            if report.is_ok() {
                outln!("ok: {} components, {} regions, {} walls", d.num_components(), d.regions.len(), d.walls.len());
                Ok(())
            } else {
                Err(Failure::Validation(report.to_string()))
            }
        }
        Command::Invariants { path, max_len, nonrepeated, force, mode, seed, q, format, all } => {
            if max_len == 0 {
                return Err(Failure::Usage("--max-len must be at least 1".into()));
            }
            let d = load(&path)?;
            let mode = match mode {
                ModeArg::Series => Mode::Series,
                ModeArg::Word => Mode::Word,
            };
            let t = InvariantTable::compute(&d, &TableOptions { max_len, nonrepeated, mode, seed, q, force })?;
            match format {
                Format::Text => out!("{}", t.render_text(all)),
                Format::Json => outln!("{}", serde_json::to_string_pretty(&t.to_json()).expect("json")),
            }
            Ok(())
        }
        Command::ImportGauss { path, output } => write_out(&cdj::emit(&load_gauss(&path)?.to_cut_diagram()), output.as_deref()),
        Command::Spun { path, output } => write_out(&cdj::emit(&spun(&load(&path)?).0), output.as_deref()),
        Command::Group { path, kind, q, seed, format } => {
            let d = load(&path)?;
            let p = match kind {
                GroupKind::Wirtinger => d.wirtinger_presentation(),
                GroupKind::Nilpotent => ChenContext::new(d, q, seed)?.nilpotent_presentation()?,
                GroupKind::Reduced => ChenContext::new(d, q, seed)?.reduced_presentation()?,
            };
            match format {
                Format::Text => outln!("{}", p.render()),
                Format::Json => outln!("{}", serde_json::to_string_pretty(&p.to_json()).expect("json")),
            }
            Ok(())
        }
        Command::Moves { path, script, random, seed, self_virtual } => {
            let mut g = load_gauss(&path)?;
            if let Some(s) = script {
                let moves = parse_script(&read(&s)?).map_err(|e| Failure::Usage(e.to_string()))?;
                g = g.apply_all(&moves).map_err(|e| Failure::Usage(e.to_string()))?;
            } else if let Some(n) = random {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..n {
                    let mv = g.random_move(&mut rng, self_virtual);
                    if let Ok(next) = g.apply(&mv) {
                        eprintln!("{}", mv);
                        g = next;
                    }
                }
            }
            outln!("{}", g);
            Ok(())
        }
        Command::Kernel { path, sequences, seed } => {
            let d = load(&path)?;
            let l = d.num_components();
            let seqs: Vec<Vec<usize>> = sequences.iter().map(|s| parse_sequence(s, l)).collect::<Result<_, _>>()?;
            let max_len = seqs.iter().map(|s| s.len().saturating_sub(1)).max().unwrap_or(1).max(1);
            let t = InvariantTable::compute(&d, &TableOptions { max_len, seed, force: true, ..Default::default() })?;
            let maps: Vec<_> = seqs.iter().map(|s| t.milnor_map(s)).collect::<Result<_, _>>()?;
            let k = free_kernel(&maps)?;
            outln!("rank {}", k.rank);
            for b in &k.basis {
                outln!("{}", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            }
            Ok(())
        }
        Command::Example { name } => match name {
            None => {
                for ex in suite::bundled() {
                    outln!("{}.{}", ex.name, if ex.gauss.is_some() { "gauss" } else { "cdj" });
                }
                Ok(())
            }
            Some(n) => {
                let text = suite::bundled_source(&n).ok_or_else(|| Failure::Usage(format!("no bundled file `{}`", n)))?;
                out!("{}", text);
                Ok(())
            }
        },
        Command::Selftest { seed, full } => {
            let outcomes = suite::run_all(if full { Scale::Full } else { Scale::Quick }, seed);
            for o in &outcomes {
                outln!("{}", o.line());
            }
            let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed && !suite::UNATTAINABLE.contains(&o.id)).map(|o| o.id).collect();
            if failed.is_empty() {
                outln!("selftest passed (known unattainable: {:?})", suite::UNATTAINABLE);
                Ok(())
            } else {
                Err(Failure::Validation(format!("failing criteria: {:?}", failed)))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
