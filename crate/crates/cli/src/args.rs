use std::path::PathBuf;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Parser, Subcommand};
use interferox::experiments::AfsharStage;

#[derive(Debug, Parser)]
#[command(
    name = "interferox",
    version,
    about = "Single-photon interferometry and causal-interpretation simulations",
    long_about = "Runs the beam-splitter, birefringence, two-pinhole imaging, Bohmian trajectory and \
                  pointer-measurement scenarios and writes CSV data plus a JSON manifest per run.\n\n\
                  Settings resolve as built-in defaults, then the --config file, then flags."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Config file: top-level keys (seed, shots, grid_points, out) and one
    /// [section] per scenario (gha, bggp, afshar, bohm, impulsive, weak).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory [default: runs/<scenario>].
    #[arg(long, global = true, env = "INTERFEROX_OUT", value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// RNG seed [default: 42].
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Monte Carlo shots [default: 100000].
    #[arg(long, global = true)]
    pub shots: Option<usize>,

    /// Samples across the 40 mm observation window, a power of two
    /// [default: 16384].
    #[arg(long, global = true, value_parser = parse_power_of_two)]
    pub grid_points: Option<usize>,

    /// Run the scenarios of `all` concurrently.
    #[arg(long, global = true)]
    pub parallel: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single photons on two prisms with a variable air gap (default 20 gaps
    /// from 0 to 1.9 wavelengths at 650 nm, n = 1.5, 45 degrees).
    Gha {
        /// Comma-separated gap widths in metres.
        #[arg(long, value_delimiter = ',')]
        gaps: Option<Vec<f64>>,
    },
    /// Polarized single photons through a birefringent crystal.
    Bggp {
        /// Polarization angle to the ordinary axis, radians in [0, pi)
        /// [default: pi/4].
        #[arg(long)]
        angle: Option<f64>,
        /// Run this many equally spaced angles in [0, pi) instead.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// Two pinholes (250 um, 2 mm apart, 650 nm), screen at 4 m, lens of
    /// 3 cm at 4.2 m imaging onto a plane 1.38 m behind it.
    Afshar {
        /// 1: fringes; 2: images; 3: wire grid at the dark fringes plus a
        /// one-pinhole control; 3a: stage 3 with photon counting.
        #[arg(
            long,
            default_value = "3",
            value_parser = PossibleValuesParser::new(["1", "2", "3", "3a"])
                .map(|s| s.parse::<AfsharStage>().expect("restricted to valid stages")),
        )]
        stage: AfsharStage,
        /// Wire width in metres [default: 100e-6].
        #[arg(long)]
        wire_width: Option<f64>,
    },
    /// Causal trajectories behind two Gaussian slits (electron, 10 um slits
    /// 100 um apart).
    Bohm {
        /// Ensemble size [default: 2000].
        #[arg(long)]
        particles: Option<usize>,
        /// Output time steps [default: 1000].
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Pointer-measurement model.
    Measure {
        #[command(subcommand)]
        mode: MeasureMode,
    },
    /// Duality report from the manifest of an afshar stage 3 or 3a run.
    Duality {
        #[arg(long, value_name = "MANIFEST")]
        from: PathBuf,
    },
    /// Every scenario, each in its own subdirectory of --out.
    All,
}

#[derive(Debug, Subcommand)]
pub enum MeasureMode {
    /// Impulsive coupling read out after branch separation (spin-1 default).
    Impulsive {
        /// Separation in pointer widths before readout [default: 5].
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Qubit weak value with diag(1, -1).
    Weak {
        /// Post-selection angle [default: pi/4 - 0.1].
        #[arg(long)]
        chi: Option<f64>,
        /// Pre-selection angle [default: pi/4].
        #[arg(long)]
        alpha: Option<f64>,
    },
}

fn parse_power_of_two(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n.is_power_of_two() && n >= 16 {
        Ok(n)
    } else {
        Err(format!("{n} is not a power of two >= 16"))
    }
}
