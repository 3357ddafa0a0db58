use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use eschlab::config::parse_config;
use eschlab::model::{
    correction_constant, solve_profile, surface_tension_constant, symmetric_log_wells,
    ModelParams,
};
use eschlab::presets::preset;
use eschlab::report::run_preset;

#[derive(Parser)]
#[command(name = "eschlab", about = "Phase-field and sharp-interface experiments on moving domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PotentialArg {
    Quartic,
    Log,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a key=value configuration file.
    Run { config_file: String },
    /// Run a built-in preset, optionally overriding the epsilon sweep.
    Preset {
        name: String,
        /// Comma-separated interface widths, e.g. 0.4,0.1,0.025.
        #[arg(long)]
        epsilon: Option<String>,
        /// Output directory (default: out/<name>).
        #[arg(long)]
        out: Option<String>,
        /// Additionally write gnuplot scripts next to the CSVs.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Print the calibration constants S and T of the profile problem.
    Constants {
        #[arg(long, value_enum, default_value_t = PotentialArg::Quartic)]
        potential: PotentialArg,
    },
}

fn execute(p: &eschlab::presets::ExperimentPreset, gnuplot: bool) -> u8 {
    match run_preset(p, gnuplot) {
        Ok(report) => {
            for m in &report.messages {
                println!("{m}");
            }
            println!(
                "wrote {} run(s) to {}",
                report.outcome.runs.len(),
                p.out_dir
            );
            report.exit_code as u8
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn constants(kind: PotentialArg) -> u8 {
    let params = match kind {
        PotentialArg::Quartic => ModelParams::quartic(-1.0, 1.0, 0.1, 1.0),
        PotentialArg::Log => {
            let (theta, theta_c, k1, k2, beta) = (0.6, 1.0, 1.0, 1.0, 1.0);
            match symmetric_log_wells(theta, theta_c, k1, k2, beta) {
                Ok((u_a, u_b)) => ModelParams::logarithmic(
                    u_a, u_b, 0.1, 1.0, theta, theta_c, k1, k2, -beta, beta,
                ),
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
        }
    };
    let profile = match solve_profile(&params, 40.0, 8001) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    println!("S = {:.12}", surface_tension_constant(&profile, &params));
    match correction_constant(&profile, &params) {
        Ok(t) => println!("T = {t:.12}"),
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    }
    0
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config_file } => match std::fs::read_to_string(&config_file) {
            Ok(text) => match parse_config(&text) {
                Ok(p) => execute(&p, false),
                Err(e) => {
                    eprintln!("config error: {e}");
                    1
                }
            },
            Err(e) => {
                eprintln!("cannot read {config_file}: {e}");
                1
            }
        },
        Command::Preset {
            name,
            epsilon,
            out,
            gnuplot,
        } => match preset(&name) {
            Some(mut p) => {
                if let Some(eps) = epsilon {
                    match eps
                        .split(',')
                        .map(|s| s.trim().parse::<f64>())
                        .collect::<Result<Vec<f64>, _>>()
                    {
                        Ok(list) => p.epsilon_list = list,
                        Err(e) => {
                            eprintln!("config error: bad --epsilon list: {e}");
                            return ExitCode::from(1);
                        }
                    }
                }
                if let Some(dir) = out {
                    p.out_dir = dir;
                }
                execute(&p, gnuplot)
            }
            None => {
                eprintln!("config error: unknown preset '{name}'");
                1
            }
        },
        Command::Constants { potential } => constants(potential),
    };
    ExitCode::from(code)
}
