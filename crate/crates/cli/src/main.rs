use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use digitwalk_core::classify::{
    classify_rational, in_class_k, is_simple, recurrence_scan, recurrence_stats, visit_census, Membership,
    Multiplicity, Simplicity, Verdict,
};
use digitwalk_core::digits::{expand, format_rational, parse_rational};
use digitwalk_core::equivalence::{
    apply, equivalent_witness, search_outside_k, tails_agree, Budget, SurgeryOp,
};
use digitwalk_core::report::{
    render_svg, survey, torsion_csv, walk_csv, winding_csv, ClassificationRecord, OutputFormat, SurveyConfig,
};
use digitwalk_core::topology::winding_profile;
use digitwalk_core::walk::walk_prefix;
use digitwalk_core::{GridSpec, LatticePoint, Path, TurnMap, TurnSign};

const EXIT_DRIFT: u8 = 10;
const EXIT_UNKNOWN: u8 = 20;

/// Turtle walks on lattices driven by the digits of a number.
///
/// Each digit turns the turtle at the current lattice point and then moves
/// it one unit step. Numbers are rationals written `p/q`.
#[derive(Parser)]
#[command(name = "digitwalk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct WalkOpts {
    /// Digit base: 2 (hex grid), 3 (square grid) or 5 (hex grid).
    #[arg(long, default_value_t = 2)]
    base: u32,
    /// Grid name; must match the base (hex or square).
    #[arg(long)]
    grid: Option<String>,
    /// +1: low digits turn left; -1: mirrored assignment.
    #[arg(long, default_value = "+1", allow_hyphen_values = true)]
    turn_sign: String,
}

impl WalkOpts {
    fn turnmap(&self) -> Result<TurnMap> {
        let grid = self.grid.as_deref().map(GridSpec::by_name).transpose()?;
        let sign: TurnSign = self.turn_sign.parse()?;
        Ok(TurnMap::configured(self.base, grid, sign)?)
    }
}

#[derive(Args, Clone)]
struct Source {
    /// The number `p/q` in [0, 1).
    number: Option<String>,
    /// Read digits from a file instead, one ASCII digit per byte.
    #[arg(long)]
    digits_file: Option<PathBuf>,
}

impl Source {
    fn walk(&self, steps: usize, tm: &TurnMap) -> Result<Path> {
        match (&self.number, &self.digits_file) {
            (Some(n), None) => {
                let d = expand(&parse_rational(n)?, tm.base())?;
                Ok(walk_prefix(d.digits(), steps, tm)?)
            }
            (None, Some(file)) => {
                let bytes = fs::read(file).with_context(|| format!("reading {}", file.display()))?;
                let digits = bytes
                    .iter()
                    .filter(|b| !b.is_ascii_whitespace())
                    .map(|&b| {
                        char::from(b)
                            .to_digit(tm.base())
                            .map(|d| d as u8)
                            .with_context(|| format!("byte {:?} is not a base-{} digit", char::from(b), tm.base()))
                    })
                    .collect::<Result<Vec<u8>>>()?;
                Ok(walk_prefix(digits, steps, tm)?)
            }
            (Some(_), Some(_)) => bail!("give either a number or --digits-file, not both"),
            (None, None) => bail!("a number or --digits-file is required"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the expansion as `preperiod|period`.
    Expand {
        number: String,
        #[arg(long, default_value_t = 2)]
        base: u32,
    },
    /// Classify the walk as closed or drifting (exit 0 closed, 10 drift).
    Classify {
        number: String,
        #[command(flatten)]
        opts: WalkOpts,
        /// csv or jsonl
        #[arg(long, default_value = "csv")]
        format: String,
        /// Print the CSV header line first.
        #[arg(long)]
        header: bool,
    },
    /// Walk states as CSV `step,a,b,dir,R`.
    Walk {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        opts: WalkOpts,
        #[arg(long, default_value_t = 60)]
        steps: usize,
    },
    /// Render the walk as SVG.
    Render {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        opts: WalkOpts,
        #[arg(long, default_value_t = 600)]
        steps: usize,
        /// Write to this file instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Winding profile around a lattice point as CSV `step,winding`.
    Winding {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        opts: WalkOpts,
        #[arg(long, default_value_t = 60)]
        steps: usize,
        /// Center `a,b` in axial coordinates.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        center: String,
    },
    /// Torsion numbers as CSV `step,R,torsion`.
    Torsion {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        opts: WalkOpts,
        #[arg(long, default_value_t = 60)]
        steps: usize,
    },
    /// Search for surgery ops turning one number into another (exit 20 if
    /// none found within the budget).
    Equiv {
        first: String,
        second: String,
        #[command(flatten)]
        opts: WalkOpts,
        /// Maximum number of ops.
        #[arg(long, default_value_t = 2)]
        budget: usize,
        /// Largest digit position an op may touch.
        #[arg(long, default_value_t = 16)]
        max_position: usize,
    },
    /// Apply one op (`insert@n:digit` or `remove@n`) and print the result.
    Surgery {
        number: String,
        op: String,
        #[command(flatten)]
        opts: WalkOpts,
    },
    /// First step pair after which two walks coincide.
    Sync {
        first: String,
        second: String,
        #[command(flatten)]
        opts: WalkOpts,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
    },
    /// Classify every reduced p/q with q up to --max-q.
    Survey {
        #[arg(long)]
        max_q: u64,
        #[arg(long, default_value_t = 1)]
        min_q: u64,
        #[command(flatten)]
        opts: WalkOpts,
        /// csv or jsonl
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Look for a step beyond distance --far followed by one within --near.
    Recurrence {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        opts: WalkOpts,
        #[arg(long)]
        far: String,
        #[arg(long)]
        near: String,
        #[arg(long, default_value_t = 10_000)]
        horizon: usize,
    },
    /// Decide whether the whole walk stays strictly within distance --radius.
    Kclass {
        number: String,
        #[command(flatten)]
        opts: WalkOpts,
        #[arg(long)]
        radius: String,
    },
    /// Search nearby surgery results for a walk leaving distance --radius.
    Ksearch {
        number: String,
        #[command(flatten)]
        opts: WalkOpts,
        #[arg(long)]
        radius: String,
        #[arg(long, default_value_t = 2)]
        budget: usize,
        #[arg(long, default_value_t = 16)]
        max_position: usize,
    },
    /// Decide whether the infinite walk ever revisits a lattice point.
    Simple {
        number: String,
        #[command(flatten)]
        opts: WalkOpts,
    },
    /// Visit counts per lattice point as CSV `a,b,count,eventual`.
    Census {
        number: String,
        #[command(flatten)]
        opts: WalkOpts,
        #[arg(long, default_value_t = 60)]
        window: usize,
    },
}

fn run(cli: Cli) -> Result<(String, u8)> {
    let mut out = String::new();
    let mut code = 0;
    match cli.command {
        Command::Expand { number, base } => {
            out = format!("{}\n", expand(&parse_rational(&number)?, base)?);
        }
        Command::Classify {
            number,
            opts,
            format,
            header,
        } => {
            let c = classify_rational(&parse_rational(&number)?, &opts.turnmap()?)?;
            let rec = ClassificationRecord::new(&c);
            match format.parse()? {
                OutputFormat::Jsonl => out = format!("{}\n", rec.to_json()),
                OutputFormat::Csv => {
                    if header {
                        out.push_str(digitwalk_core::report::RECORD_HEADER);
                        out.push('\n');
                    }
                    out.push_str(&rec.to_csv());
                    out.push('\n');
                }
                OutputFormat::Svg => bail!("classify writes csv or jsonl"),
            }
            if let Verdict::Drift { .. } = c.verdict() {
                code = EXIT_DRIFT;
            }
        }
        Command::Walk { source, opts, steps } => {
            out = walk_csv(&source.walk(steps, &opts.turnmap()?)?);
        }
        Command::Render {
            source,
            opts,
            steps,
            output,
        } => {
            if steps == 0 {
                bail!("--steps must be at least 1");
            }
            let svg = render_svg(&source.walk(steps, &opts.turnmap()?)?);
            match output {
                Some(file) => fs::write(&file, svg).with_context(|| format!("writing {}", file.display()))?,
                None => out = svg,
            }
        }
        Command::Winding {
            source,
            opts,
            steps,
            center,
        } => {
            let center = LatticePoint::parse(&center)?;
            out = winding_csv(&winding_profile(&source.walk(steps, &opts.turnmap()?)?, center));
        }
        Command::Torsion { source, opts, steps } => {
            out = torsion_csv(&source.walk(steps, &opts.turnmap()?)?);
        }
        Command::Equiv {
            first,
            second,
            opts,
            budget,
            max_position,
        } => {
            let budget = Budget {
                max_ops: budget,
                max_position,
            };
            let found = equivalent_witness(&parse_rational(&first)?, &parse_rational(&second)?, &opts.turnmap()?, budget)?;
            match found {
                Some(w) => out = format!("{w}\n"),
                None => {
                    out = "unknown\n".to_string();
                    code = EXIT_UNKNOWN;
                }
            }
        }
        Command::Surgery { number, op, opts } => {
            let tm = opts.turnmap()?;
            let d = expand(&parse_rational(&number)?, tm.base())?;
            let op: SurgeryOp = op.parse()?;
            let next = apply(&d, op, &tm)?;
            out = format!("{},{}\n", format_rational(&next.value()), next);
        }
        Command::Sync {
            first,
            second,
            opts,
            horizon,
        } => {
            match tails_agree(&parse_rational(&first)?, &parse_rational(&second)?, &opts.turnmap()?, horizon)? {
                Some((i1, i2)) => out = format!("{i1},{i2}\n"),
                None => {
                    out = "none\n".to_string();
                    code = EXIT_UNKNOWN;
                }
            }
        }
        Command::Survey {
            max_q,
            min_q,
            opts,
            format,
            jobs,
        } => {
            let format: OutputFormat = format.parse()?;
            if format == OutputFormat::Svg {
                bail!("survey writes csv or jsonl");
            }
            out = survey(&SurveyConfig {
                min_q,
                max_q,
                turnmap: opts.turnmap()?,
                format,
                jobs: jobs.max(1),
            })?;
        }
        Command::Recurrence {
            source,
            opts,
            far,
            near,
            horizon,
        } => {
            let tm = opts.turnmap()?;
            let (far, near) = (parse_rational(&far)?, parse_rational(&near)?);
            let report = match (&source.number, &source.digits_file) {
                (Some(n), None) => {
                    let c = classify_rational(&parse_rational(n)?, &tm)?;
                    recurrence_stats(&c, &far, &near, horizon)
                }
                _ => {
                    let path = source.walk(horizon, &tm)?;
                    recurrence_scan(path.positions(), tm.grid(), &far, &near)
                }
            };
            out = match report.witness {
                Some((i, j)) => format!("{i},{j}\n"),
                None => "none\n".to_string(),
            };
        }
        Command::Kclass { number, opts, radius } => {
            let c = classify_rational(&parse_rational(&number)?, &opts.turnmap()?)?;
            out = match in_class_k(&c, &parse_rational(&radius)?)? {
                Membership::Member => "member\n".to_string(),
                Membership::Outside { step, norm_sq } => format!("outside,{step},{norm_sq}\n"),
            };
        }
        Command::Ksearch {
            number,
            opts,
            radius,
            budget,
            max_position,
        } => {
            let budget = Budget {
                max_ops: budget,
                max_position,
            };
            let found = search_outside_k(&parse_rational(&number)?, &parse_rational(&radius)?, &opts.turnmap()?, budget)?;
            match found {
                Some((w, d, Membership::Outside { step, .. })) => {
                    out = format!("{w},{},{step}\n", format_rational(&d.value()));
                }
                _ => {
                    out = "unknown\n".to_string();
                    code = EXIT_UNKNOWN;
                }
            }
        }
        Command::Simple { number, opts } => {
            let c = classify_rational(&parse_rational(&number)?, &opts.turnmap()?)?;
            out = match is_simple(&c) {
                Simplicity::Simple { cycle_recurs: true } => "simple,cycle\n".to_string(),
                Simplicity::Simple { cycle_recurs: false } => "simple\n".to_string(),
                Simplicity::Repeated { first, second, point } => {
                    format!("repeated,{first},{second},{},{}\n", point.a, point.b)
                }
            };
        }
        Command::Census { number, opts, window } => {
            let c = classify_rational(&parse_rational(&number)?, &opts.turnmap()?)?;
            let census = visit_census(&c, window);
            out.push_str("a,b,count,eventual\n");
            for (p, v) in &census.points {
                let eventual = match v.eventual {
                    Multiplicity::Finite(n) => n.to_string(),
                    Multiplicity::Infinite => "inf".to_string(),
                };
                out.push_str(&format!("{},{},{},{eventual}\n", p.a, p.b, v.count));
            }
        }
    }
    Ok((out, code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
