mod args;
mod run;

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, Common};
use run::{CliError, Outcome, Samples};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Classify { common, .. }
        | Command::Witness { common, .. }
        | Command::SetCheck { common, .. }
        | Command::Tube { common, .. }
        | Command::Reinhardt { common, .. }
        | Command::GraphDemo { common, .. }
        | Command::Regularize { common, .. } => common,
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Classify {
            field,
            resolution,
            common,
        } => run::classify(field, *resolution, common),
        Command::Witness {
            field,
            q,
            budget,
            resolution,
            common,
        } => run::witness(field, *q, budget, *resolution, common),
        Command::SetCheck {
            set,
            q,
            budget,
            resolution,
            common,
        } => run::set_check(set, *q, budget, *resolution, common),
        Command::Tube {
            set,
            a,
            q,
            budget,
            resolution,
            common,
        } => run::tube(set, a, *q, budget, *resolution, common),
        Command::Reinhardt {
            expr,
            dim,
            domain,
            bounds,
            resolution,
            common,
        } => run::reinhardt(expr, *dim, domain.as_deref(), bounds.as_deref(), *resolution, common),
        Command::GraphDemo {
            f,
            dim,
            k,
            x1,
            x2,
            t0,
            t_steps,
            s_steps,
            common,
        } => run::graph_demo(
            f,
            *dim,
            *k,
            x1.as_deref(),
            x2.as_deref(),
            *t0,
            *t_steps,
            *s_steps,
            common,
        ),
        Command::Regularize {
            field,
            radius,
            profile,
            k,
            resolution,
            stride,
            common,
        } => run::regularize(field, *radius, *profile, *k, *resolution, *stride, common),
    }
}

fn write_csv(path: &Path, samples: &Samples) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(&samples.header)?;
    for (p, v) in &samples.rows {
        let mut row: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        row.push(v.map_or(String::new(), |x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = common(&cli.command).clone();
    if let Some(t) = opts.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot size the worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let start = Instant::now();
    let mut outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            return ExitCode::from(EXIT_NUMERIC);
        }
    };
    outcome.report.wall_time = start.elapsed().as_secs_f64();
    if let Some(path) = &opts.out {
        if let Err(e) = File::create(path).and_then(|mut f| writeln!(f, "{}", outcome.report.to_pretty())) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if let (Some(path), Some(samples)) = (&opts.csv, &outcome.samples) {
        if let Err(e) = write_csv(path, samples) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for line in &outcome.summary {
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out, "{}", outcome.answer);
    ExitCode::SUCCESS
}
