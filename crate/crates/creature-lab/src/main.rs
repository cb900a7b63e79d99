//! Thin command-line front end: argument parsing only, all work in the
//! library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use creature_lab::guard::Guards;
use creature_lab::report::Format;
use creature_lab::run::{run, Command, RunOpts, TemplateAction};

#[derive(Parser)]
#[command(name = "creature-lab", version, about = "exact-arithmetic workbench for measured tree creatures")]
struct Cli {
    /// output format
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: FormatArg,
    /// include wall-clock timing in the report (off keeps reports
    /// byte-identical across runs)
    #[arg(long, global = true)]
    timing: bool,
    /// override the possibility-set guard
    #[arg(long, global = true)]
    max_pos: Option<u64>,
    /// override the enumeration and row guards
    #[arg(long, global = true)]
    max_rows: Option<u64>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Verb {
    /// decide the niceness axioms on one creature
    Axioms {
        #[arg(long)]
        creature: PathBuf,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        count: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// backward-induction measures, fronts, classification
    Measure {
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        valuation: PathBuf,
        #[arg(long)]
        profile: Option<PathBuf>,
        /// report only the front value at this level
        #[arg(long)]
        front: Option<usize>,
        /// also classify the candidate as normal/special
        #[arg(long)]
        classify: bool,
        /// check a node assignment as a semi-measure
        #[arg(long)]
        semi: Option<PathBuf>,
        /// search for a node with measure at least 1 - eps
        #[arg(long)]
        large_eps: Option<String>,
    },
    /// greedy stabilization of a star creature
    Stabilize {
        #[arg(long)]
        creature: PathBuf,
        #[arg(long)]
        valuation: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// starting constraint extension, e.g. "[[0,1],[3,0]]"
        #[arg(long)]
        gprime: Option<String>,
        #[arg(long)]
        gain: Option<String>,
    },
    /// splitting decision on one creature
    Split {
        #[arg(long)]
        creature: PathBuf,
        #[arg(long)]
        r: PathBuf,
        #[arg(long)]
        r0: PathBuf,
        #[arg(long)]
        r1: PathBuf,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value = "1")]
        drop: String,
        #[arg(long)]
        profile: Option<PathBuf>,
        /// use the star family's stabilization-based construction
        #[arg(long)]
        star_proof: bool,
    },
    /// avoid-or-hit amalgamation against an antichain
    Amalgamate {
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        valuation: PathBuf,
        #[arg(long)]
        antichain: PathBuf,
        #[arg(long)]
        parts: PathBuf,
        #[arg(long, default_value = "1/32")]
        epsilon: String,
        /// "default", one rational, or a comma-separated level table
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// averaging transfer bounds
    Transfer {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        bit_split: bool,
        #[arg(long, default_value = "1")]
        drop: String,
        #[arg(long)]
        profile: PathBuf,
    },
    /// parameter profiles: paper-exact caps or a toy profile summary
    Profile {
        #[arg(long)]
        paper: bool,
        #[arg(long, default_value_t = 1)]
        kmax: u64,
        /// guard on the paper-exact level
        #[arg(long, default_value_t = 8)]
        kmax_guard: u64,
        /// dump full digits instead of bit lengths
        #[arg(long)]
        digits: bool,
        #[arg(long)]
        toy: Option<PathBuf>,
    },
    /// template operations: validation, canonical forms, restriction,
    /// isomorphism, named prefixes, covers and covering maps
    Template {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        action: TemplateActionArg,
        #[arg(long)]
        zeta: Option<u64>,
        #[arg(long)]
        other: Option<PathBuf>,
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// differential test of the recursion against the direct counting sum
    Oracle {
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        valuation: PathBuf,
    },
    /// seeded randomized property suites
    Fuzz {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateActionArg {
    Validate,
    Canonical,
    Restrict,
    Isomorphic,
    Prefix,
    Cover,
    CoveringMap,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut guards = Guards::default();
    if let Some(v) = cli.max_pos {
        guards.max_pos = v;
    }
    if let Some(v) = cli.max_rows {
        guards.max_rows = v;
        guards.max_sigma = v;
        guards.max_search = v;
    }
    let opts = RunOpts {
        guards,
        timing: cli.timing,
    };
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };

    let command = match build_command(cli.verb) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    match run(&command, &opts) {
        Ok(report) => {
            print!("{}", report.render(format));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn build_command(verb: Verb) -> Result<Command, String> {
    Ok(match verb {
        Verb::Axioms {
            creature,
            profile,
            count,
            seed,
        } => Command::Axioms {
            creature,
            profile,
            samples: count,
            seed,
        },
        Verb::Measure {
            candidate,
            valuation,
            profile,
            front,
            classify,
            semi,
            large_eps,
        } => Command::Measure {
            candidate,
            valuation,
            profile,
            front,
            classify,
            semi,
            large_eps,
        },
        Verb::Stabilize {
            creature,
            valuation,
            profile,
            gprime,
            gain,
        } => Command::Stabilize {
            creature,
            valuation,
            profile: Some(profile),
            gprime,
            gain,
        },
        Verb::Split {
            creature,
            r,
            r0,
            r1,
            theta,
            drop,
            profile,
            star_proof,
        } => Command::Split {
            creature,
            r,
            r0,
            r1,
            theta,
            drop,
            profile,
            star_proof,
        },
        Verb::Amalgamate {
            candidate,
            valuation,
            antichain,
            parts,
            epsilon,
            schedule,
            profile,
        } => Command::Amalgamate {
            candidate,
            valuation,
            antichain,
            parts,
            epsilon,
            schedule,
            profile,
        },
        Verb::Transfer {
            instance,
            bit_split,
            drop,
            profile,
        } => Command::Transfer {
            instance,
            bit_split,
            drop,
            profile,
        },
        Verb::Profile {
            paper,
            kmax,
            kmax_guard,
            digits,
            toy,
        } => Command::Profile {
            paper,
            kmax,
            kmax_guard,
            digits,
            toy,
        },
        Verb::Template {
            input,
            action,
            zeta,
            other,
            profile,
        } => {
            let action = match action {
                TemplateActionArg::Validate => TemplateAction::Validate,
                TemplateActionArg::Canonical => TemplateAction::Canonical,
                TemplateActionArg::Restrict => TemplateAction::Restrict {
                    zeta: zeta.ok_or("restrict needs --zeta")?,
                },
                TemplateActionArg::Isomorphic => TemplateAction::Isomorphic {
                    other: other.ok_or("isomorphic needs --other")?,
                },
                TemplateActionArg::Prefix => TemplateAction::Prefix,
                TemplateActionArg::Cover => TemplateAction::Cover,
                TemplateActionArg::CoveringMap => TemplateAction::CoveringMap,
            };
            Command::Template {
                input,
                action,
                profile,
            }
        }
        Verb::Oracle {
            candidate,
            valuation,
        } => Command::Oracle {
            candidate,
            valuation,
        },
        Verb::Fuzz { suite, seed, count } => Command::Fuzz { suite, seed, count },
    })
}
