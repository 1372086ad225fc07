use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use levelcross::coloring::{color, ColoringParams};
use levelcross::constants::{
    build_pair_witness, exhaustive_singleton_check, singleton_sufficient, DEFAULT_BUDGET,
};
use levelcross::continuous::{approximate_level_crossing, certify, refine_sequence, ContinuousFn};
use levelcross::discrete::{solve, verify_discrete, SolveOptions};
use levelcross::grid::{CellIndex, CellLabeling, GridShape};
use levelcross::io::{emit_witness, format_real, parse_labeling, WitnessRef};
use levelcross::lattice::LatticePoint;
use levelcross::render::{
    render_grid_svg, render_levelset_svg, render_ppm_layers, Overlay, SvgOptions,
};
use levelcross::steinhaus::{find_crossing, random_coloring, verify_chessboard};
use levelcross::{functions, suite, Error, Result};

#[derive(Parser)]
#[command(
    name = "levelcross",
    version,
    about = "Chessboard crossings, clustered colorings and approximate level sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a slice of the clustered coloring of Z^n
    Color {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: i64,
        /// Coordinate range LO..HI for the first two axes
        #[arg(long = "box", default_value = "-6..6", allow_hyphen_values = true)]
        range: String,
        /// Fixed values of the remaining coordinates, comma separated (default 0)
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Find a monochromatic crossing of an n-coloring
    Chessboard {
        #[arg(long, conflicts_with = "random")]
        input: Option<PathBuf>,
        /// Seed for a random coloring of [k]^n with n colors
        #[arg(long)]
        random: Option<u64>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Recover the crossing from distance fields of the color classes
        #[arg(long)]
        via_fields: bool,
        #[command(flatten)]
        out: Outputs,
    },
    /// Solve a lattice-valued labeling for a small connected value set
    SolveDiscrete {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long)]
        shrink: bool,
        #[command(flatten)]
        out: Outputs,
    },
    /// Approximate a level crossing of a built-in or piecewise polynomial map
    Levelset {
        /// projection, linear, quadratic, sine-curve, polynomial:<terms>, or a piecewise .json file
        #[arg(long = "fn", conflicts_with = "spec")]
        function: Option<String>,
        /// Piecewise polynomial JSON file
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Number of halvings of epsilon
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[command(flatten)]
        out: Outputs,
    },
    /// Exhaustive singleton checks and the 7^3 construction
    Constants {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        radius: i64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        /// Check the 7^3 labeling instead of enumerating
        #[arg(long)]
        pair_witness: bool,
    },
    /// Run the full verification suite
    Verify {
        /// Comma-separated criterion numbers (default all)
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Args)]
struct Outputs {
    /// Write the witness JSON here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// SVG figure (n = 2)
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Directory for per-layer PPM images (n = 3)
    #[arg(long)]
    ppm: Option<PathBuf>,
}

impl Outputs {
    fn emit(&self, doc: &str) -> Result<()> {
        match &self.output {
            Some(p) => fs::write(p, format!("{doc}\n"))?,
            None => say(doc)?,
        }
        Ok(())
    }

    fn figures(&self, labeling: &CellLabeling, cells: &[CellIndex], axis: usize) -> Result<()> {
        let overlay = Some(Overlay { cells, axis });
        if let Some(p) = &self.svg {
            fs::write(
                p,
                render_grid_svg(labeling, overlay, &SvgOptions::default())?,
            )?;
        }
        if let Some(dir) = &self.ppm {
            write_layers(dir, &render_ppm_layers(labeling, overlay, 12)?)?;
        }
        Ok(())
    }
}

/// Writes a line to stdout; a closed pipe ends the program quietly.
fn say(line: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{line}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        r => Ok(r?),
    }
}

fn write_layers(dir: &Path, layers: &[Vec<u8>]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (i, img) in layers.iter().enumerate() {
        fs::write(dir.join(format!("layer_{:02}.ppm", i + 1)), img)?;
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidInput(format!("expected LO..HI, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (lo, hi) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn color_slice(n: usize, m: i64, range: &str, at: Option<&str>) -> Result<()> {
    let params = ColoringParams::new(n, m)?;
    let (lo, hi) = parse_range(range)?;
    let rest: Vec<i64> = match at {
        Some(s) => s
            .split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad coordinate {v:?}")))
            })
            .collect::<Result<_>>()?,
        None => vec![0; n.saturating_sub(2)],
    };
    if rest.len() != n.saturating_sub(2) {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(2),
            got: rest.len(),
        });
    }
    let ys: Vec<i64> = if n >= 2 {
        (lo..=hi).rev().collect()
    } else {
        vec![0]
    };
    let mut rows = Vec::new();
    for &y in &ys {
        let mut row = Vec::new();
        for x in lo..=hi {
            let mut t = vec![x];
            if n >= 2 {
                t.push(y);
            }
            t.extend(&rest);
            row.push(color(&LatticePoint(t), params)?);
        }
        say(&row.iter().map(|c| c.to_string()).collect::<String>())?;
        rows.push(row);
    }
    let doc = json!({"n": n, "m": m, "box": [lo, hi], "at": rest, "rows_top_down": rows});
    say(&doc.to_string())?;
    Ok(())
}

fn chessboard(
    input: Option<&Path>,
    random: Option<u64>,
    n: usize,
    k: usize,
    via_fields: bool,
    out: &Outputs,
) -> Result<()> {
    let labeling = match (input, random) {
        (Some(p), _) => parse_labeling(&read(p)?)?,
        (None, Some(seed)) => random_coloring(
            GridShape::new(n, k)?,
            n,
            &mut ChaCha8Rng::seed_from_u64(seed),
        ),
        (None, None) => {
            return Err(Error::InvalidInput(
                "give --input FILE or --random SEED".into(),
            ))
        }
    };
    let w = if via_fields {
        levelcross::continuous::chessboard_via_distance_fields(&labeling)?
    } else {
        find_crossing(&labeling)?
    };
    verify_chessboard(&labeling, &w)?;
    out.emit(&emit_witness(WitnessRef::Chessboard(&w, labeling.shape())))?;
    out.figures(&labeling, &w.cells, w.axis)
}

fn solve_discrete(input: &Path, m: usize, shrink: bool, out: &Outputs) -> Result<()> {
    let labeling = parse_labeling(&read(input)?)?;
    let w = solve(
        &labeling,
        m,
        SolveOptions {
            shrink,
            prefer_axis: None,
        },
    )?;
    verify_discrete(&labeling, m, &w)?;
    out.emit(&emit_witness(WitnessRef::Discrete(&w, labeling.shape())))?;
    out.figures(&labeling, &w.cells, w.axis)
}

fn levelset(
    function: Option<&str>,
    spec: Option<&Path>,
    n: usize,
    epsilon: f64,
    steps: usize,
    out: &Outputs,
) -> Result<()> {
    let f: ContinuousFn = match (function, spec) {
        (_, Some(p)) => functions::parse_piecewise(&read(p)?)?,
        (Some(name), None) if name.ends_with(".json") && Path::new(name).is_file() => {
            functions::parse_piecewise(&read(Path::new(name))?)?
        }
        (Some(name), None) => functions::by_name(name, n)?,
        (None, None) => return Err(Error::InvalidInput("give --fn NAME or --spec FILE".into())),
    };
    let witnesses = if steps <= 1 {
        vec![approximate_level_crossing(&f, epsilon)?]
    } else {
        let r = refine_sequence(&f, epsilon, steps)?;
        for (j, s) in r.steps.iter().enumerate() {
            eprintln!(
                "step {j}: hausdorff {:.6}, drift {:.6} (limit {:.6}), unions intersect: {}",
                s.hausdorff, s.drift, s.drift_limit, s.unions_intersect
            );
        }
        r.witnesses
    };
    let mut docs = Vec::new();
    for w in &witnesses {
        let c = certify(&f, w)?;
        eprintln!(
            "epsilon {}: certified sup {} (sampled {} + slack {})",
            format_real(w.epsilon),
            format_real(c.bound()),
            format_real(c.sampled_max),
            format_real(c.slack)
        );
        if c.bound() >= w.epsilon {
            return Err(Error::TheoremViolation(format!(
                "certified bound {} is not below epsilon {}",
                c.bound(),
                w.epsilon
            )));
        }
        docs.push(emit_witness(WitnessRef::Continuous(w)));
    }
    out.emit(&docs.join("\n"))?;
    let last = witnesses.last().expect("at least one witness");
    if let Some(p) = &out.svg {
        fs::write(p, render_levelset_svg(&f, last, &SvgOptions::default())?)?;
    }
    if out.ppm.is_some() {
        return Err(Error::UnsupportedDimension(f.n()));
    }
    Ok(())
}

fn constants(k: usize, m: usize, radius: i64, budget: u128, pair_witness: bool) -> Result<()> {
    if pair_witness {
        let l = build_pair_witness();
        let single = singleton_sufficient(&l);
        let w = solve(&l, 0, SolveOptions::default())?;
        verify_discrete(&l, 0, &w)?;
        let doc = json!({
            "grid": [3, l.shape().k()],
            "singleton_crossing": single.is_some(),
            "value_set_size": w.p.len(),
            "verdict": if single.is_none() && w.p.len() == 2 {
                "consistent with a least value-set size of 2 for n = 3, m = 0"
            } else {
                "inconsistent"
            },
        });
        say(&doc.to_string())?;
        return Ok(());
    }
    let r = exhaustive_singleton_check(k, m, radius, budget)?;
    let mut doc = serde_json::to_value(&r).map_err(|e| Error::Io(e.to_string()))?;
    doc["verdict"] = json!(if r.all_verified() {
        "consistent with singleton sufficiency for n = 2"
    } else {
        "counterexample found"
    });
    say(&doc.to_string())?;
    if !r.all_verified() {
        return Err(Error::TheoremViolation(
            "a valid labeling has no singleton crossing".into(),
        ));
    }
    Ok(())
}

fn verify(only: Option<&str>) -> Result<()> {
    let wanted: Option<Vec<u32>> = only
        .map(|s| {
            s.split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad criterion {v:?}")))
                })
                .collect()
        })
        .transpose()?;
    let mut failed = 0;
    for check in suite::CRITERIA
        .iter()
        .filter(|c| wanted.as_ref().is_none_or(|w| w.contains(&c.0)))
    {
        let report = suite::run(check);
        say(&report.to_string())?;
        failed += usize::from(!report.passed);
    }
    if failed > 0 {
        return Err(Error::TheoremViolation(format!("{failed} criteria failed")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Color { n, m, range, at } => color_slice(n, m, &range, at.as_deref()),
        Command::Chessboard {
            input,
            random,
            n,
            k,
            via_fields,
            out,
        } => chessboard(input.as_deref(), random, n, k, via_fields, &out),
        Command::SolveDiscrete {
            input,
            m,
            shrink,
            out,
        } => solve_discrete(&input, m, shrink, &out),
        Command::Levelset {
            function,
            spec,
            n,
            epsilon,
            steps,
            out,
        } => levelset(
            function.as_deref(),
            spec.as_deref(),
            n,
            epsilon,
            steps,
            &out,
        ),
        Command::Constants {
            k,
            m,
            radius,
            budget,
            pair_witness,
        } => constants(k, m, radius, budget, pair_witness),
        Command::Verify { only } => verify(only.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
