//! Command-line front end: scenario loading, experiment orchestration, and
//! CSV/JSON emission for regions, rate tables, and search results.
//!
//! Exit codes: 0 on success, 2 on configuration/validation errors, 3 when a
//! search is infeasible or exceeds its enumeration cap. All dB-to-linear
//! conversion happens here; the library works in linear units.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ngma::downlink::{
    cluster_zf_directions, dl_rate_report, zf_directions, BeamformerSet, Grouping,
    IntraClusterOrder, SicMode,
};
use ngma::error::NgmaError;
use ngma::io::{
    atomic_write, dl_rates_csv, load_scenario, region_csv, to_zero_based, ul_rates_csv,
    DirectionsSpec, DlConfigFile, SearchResultFile, UlConfigFile,
};
use ngma::model::{generate_scenario, ChannelSpec, ComplexVec, Scenario};
use ngma::regions::{
    bc_noma_boundary, bc_oma_boundary, mac_noma_boundary, mac_oma_boundary, OmaConvention,
    RegionSpec, DEFAULT_GRID_POINTS,
};
use ngma::search::{
    dl_exhaustive_search, ul_exhaustive_search, DirectionFamily, GroupingMode, Objective,
    OrderMode, SearchSpace, DEFAULT_SEARCH_CAP,
};
use ngma::uplink::{
    mmse_detectors, mrc_detectors, ul_ngma_rate, DetectorSet, LayerPartition, MmseMode,
};

#[derive(Parser)]
#[command(
    name = "ngma",
    version,
    about = "Rate-level NOMA/SDMA transmission analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file (see README for the schema)
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Generate an i.i.d. complex Gaussian scenario with this many users
    #[arg(long)]
    users: Option<usize>,
    /// Antenna count for a generated scenario
    #[arg(long)]
    antennas: Option<usize>,
    /// RNG seed for a generated scenario
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-user noise power for a generated scenario, Watts
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Power budget, Watts
    #[arg(long, default_value_t = 1.0)]
    power: f64,
}

impl ScenarioArgs {
    fn load(&self) -> ngma::Result<Scenario> {
        match (&self.scenario, self.users, self.antennas) {
            (Some(path), _, _) => load_scenario(path),
            (None, Some(k), Some(n)) => generate_scenario(
                &ChannelSpec::iid(self.seed),
                n,
                k,
                vec![self.noise; k],
                self.power,
            ),
            _ => Err(NgmaError::InvalidConfig(
                "provide --scenario PATH or both --users and --antennas".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Sum,
    Min,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Sum => Objective::SumRate,
            ObjectiveArg::Min => Objective::MinRate,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Mrc,
    Mmse,
    Zf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DlFamilyArg {
    Zf,
    ClusterZf,
    Matched,
}

#[derive(Clone, Copy, ValueEnum)]
enum SicModeArg {
    Strict,
    Relaxed,
}

#[derive(Subcommand)]
enum Command {
    /// Two-user SISO capacity/rate region boundaries (NOMA and OMA)
    Region {
        /// Broadcast-channel regions
        #[arg(long, conflicts_with = "mac")]
        bc: bool,
        /// Multiple-access-channel regions
        #[arg(long)]
        mac: bool,
        /// User 1 receive SNR in dB
        #[arg(long = "snr1-db")]
        snr1_db: f64,
        /// User 2 receive SNR in dB
        #[arg(long = "snr2-db")]
        snr2_db: f64,
        /// Power budget, Watts
        #[arg(long, default_value_t = 1.0)]
        power: f64,
        /// Grid points per sweep dimension
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid: usize,
        /// Keep OMA transmit power fixed instead of reallocating over the share
        #[arg(long)]
        oma_fixed_power: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Downlink per-user rates and SIC feasibility for one configuration
    RateDl {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Downlink configuration JSON (clusters, order, directions, powers)
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = SicModeArg::Strict)]
        sic_mode: SicModeArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Uplink per-user rates for one layer configuration
    RateUl {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Uplink configuration JSON (layers, detector, powers)
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive downlink search over groupings, orders, and power grids
    SearchDl {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = DlFamilyArg::Matched)]
        family: DlFamilyArg,
        #[arg(long, default_value_t = 5)]
        power_grid: usize,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Sum)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive uplink search over ordered layer partitions
    SearchUl {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = DetectorArg::Mrc)]
        detector: DetectorArg,
        #[arg(long, default_value_t = 5)]
        power_grid: usize,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Sum)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Best value per downlink scheme over a shared finite search space
    Compare {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 3)]
        power_grid: usize,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Sum)]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn dl_directions(
    s: &Scenario,
    g: &Grouping,
    spec: &DirectionsSpec,
) -> ngma::Result<Vec<ComplexVec>> {
    match spec {
        DirectionsSpec::Named(name) => match name.as_str() {
            "zf" => zf_directions(s),
            "matched" | "mrc" => mrc_detectors(s),
            "cluster_zf" => {
                let cluster_dirs = cluster_zf_directions(s, g)?;
                Ok((0..s.n_users())
                    .map(|k| cluster_dirs[g.cluster_of(k)].clone())
                    .collect())
            }
            other => Err(NgmaError::InvalidConfig(format!(
                "unknown direction family \"{}\"",
                other
            ))),
        },
        DirectionsSpec::Explicit(_) => {
            let vs = spec.explicit_vectors()?;
            if vs.len() == g.n_clusters() && g.n_clusters() != s.n_users() {
                // per-cluster shared directions
                Ok((0..s.n_users())
                    .map(|k| vs[g.cluster_of(k)].clone())
                    .collect())
            } else {
                Ok(vs)
            }
        }
    }
}

fn run(cli: Cli) -> ngma::Result<()> {
    match cli.command {
        Command::Region {
            bc,
            mac,
            snr1_db,
            snr2_db,
            power,
            grid,
            oma_fixed_power,
            out,
        } => {
            if bc == mac {
                return Err(NgmaError::InvalidConfig(
                    "pass exactly one of --bc / --mac".into(),
                ));
            }
            if !snr1_db.is_finite() || !snr2_db.is_finite() {
                return Err(NgmaError::InvalidConfig("dB values must be finite".into()));
            }
            let spec = RegionSpec::new(db_to_linear(snr1_db), db_to_linear(snr2_db), power, grid)?;
            let convention = if oma_fixed_power {
                OmaConvention::FixedPower
            } else {
                OmaConvention::PowerReallocation
            };
            let (noma, oma) = if bc {
                (bc_noma_boundary(&spec), bc_oma_boundary(&spec, convention))
            } else {
                (
                    mac_noma_boundary(&spec),
                    mac_oma_boundary(&spec, convention),
                )
            };
            let csv = region_csv(&[("noma", &noma), ("oma", &oma)]);
            atomic_write(&out, &csv)
        }
        Command::RateDl {
            scenario,
            config,
            sic_mode,
            out,
        } => {
            let s = scenario.load()?;
            let text = std::fs::read_to_string(&config)?;
            let cfg: DlConfigFile = serde_json::from_str(&text)?;
            let g = Grouping::new(to_zero_based(&cfg.clusters)?, s.n_users())?;
            let o = IntraClusterOrder::new(&g, to_zero_based(&cfg.order)?)?;
            let dirs = dl_directions(&s, &g, &cfg.directions)?;
            let b = BeamformerSet::new(dirs, cfg.powers, s.power_budget())?;
            let mode = match sic_mode {
                SicModeArg::Strict => SicMode::Strict,
                SicModeArg::Relaxed => SicMode::Relaxed,
            };
            let report = dl_rate_report(&s, &g, &o, &b, mode)?;
            let cluster_of: Vec<usize> = (0..s.n_users()).map(|k| g.cluster_of(k)).collect();
            atomic_write(&out, &dl_rates_csv(&report, &cluster_of))
        }
        Command::RateUl {
            scenario,
            config,
            out,
        } => {
            let s = scenario.load()?;
            let text = std::fs::read_to_string(&config)?;
            let cfg: UlConfigFile = serde_json::from_str(&text)?;
            let lp = LayerPartition::new(to_zero_based(&cfg.layers)?, s.n_users())?;
            let vectors = match &cfg.detector {
                DirectionsSpec::Named(name) => match name.as_str() {
                    "mrc" | "matched" => mrc_detectors(&s)?,
                    "mmse" => mmse_detectors(&s, &lp, &cfg.powers, MmseMode::LayerAware)?,
                    "zf" => zf_directions(&s)?,
                    other => {
                        return Err(NgmaError::InvalidConfig(format!(
                            "unknown detector \"{}\"",
                            other
                        )))
                    }
                },
                spec => spec.explicit_vectors()?,
            };
            let d = DetectorSet::new(vectors, cfg.powers, s.power_budget())?;
            let rates: Vec<f64> = (0..s.n_users())
                .map(|k| ul_ngma_rate(&s, &lp, &d, k))
                .collect::<ngma::Result<_>>()?;
            atomic_write(&out, &ul_rates_csv(&rates, &lp))
        }
        Command::SearchDl {
            scenario,
            family,
            power_grid,
            objective,
            cap,
            out,
        } => {
            let s = scenario.load()?;
            let family = match family {
                DlFamilyArg::Zf => DirectionFamily::Zf,
                DlFamilyArg::ClusterZf => DirectionFamily::ClusterZf,
                DlFamilyArg::Matched => DirectionFamily::Matched,
            };
            let mut space = SearchSpace::new(
                GroupingMode::AllPartitions,
                OrderMode::AllPermutations,
                family,
                power_grid,
                objective.into(),
            );
            space.cap = cap;
            let result = dl_exhaustive_search(&s, &space)?;
            let json = serde_json::to_string_pretty(&SearchResultFile::from_result(&result))?;
            atomic_write(&out, &json)
        }
        Command::SearchUl {
            scenario,
            detector,
            power_grid,
            objective,
            cap,
            out,
        } => {
            let s = scenario.load()?;
            let family = match detector {
                DetectorArg::Mrc => DirectionFamily::Matched,
                DetectorArg::Mmse => DirectionFamily::Mmse,
                DetectorArg::Zf => DirectionFamily::Zf,
            };
            let mut space = SearchSpace::new(
                GroupingMode::AllPartitions,
                OrderMode::AllPermutations,
                family,
                power_grid,
                objective.into(),
            );
            space.cap = cap;
            let result = ul_exhaustive_search(&s, &space)?;
            let json = serde_json::to_string_pretty(&SearchResultFile::from_result(&result))?;
            atomic_write(&out, &json)
        }
        Command::Compare {
            scenario,
            power_grid,
            objective,
            cap,
            out,
        } => {
            let s = scenario.load()?;
            // shared direction family: each user's normalized channel
            let candidates = mrc_detectors(&s)?;
            let mut csv = String::from("scheme,value,feasible,evaluations\n");
            let schemes: [(&str, GroupingMode, bool); 4] = [
                ("SDMA", GroupingMode::Singletons, false),
                ("BB-NOMA", GroupingMode::SingleCluster, false),
                ("CB-NOMA", GroupingMode::ProperClusters, true),
                ("NGMA", GroupingMode::AllPartitions, false),
            ];
            for (name, mode, shared) in schemes {
                let mut space = SearchSpace::new(
                    mode,
                    OrderMode::AllPermutations,
                    DirectionFamily::Explicit(candidates.clone()),
                    power_grid,
                    objective.into(),
                );
                space.shared_cluster_directions = shared;
                space.cap = cap;
                match dl_exhaustive_search(&s, &space) {
                    Ok(r) => csv.push_str(&format!(
                        "{},{},{},{}\n",
                        name, r.best_value, r.feasible, r.evaluations
                    )),
                    Err(NgmaError::Infeasible { best_value, .. }) => {
                        csv.push_str(&format!("{},{},false,0\n", name, best_value))
                    }
                    Err(NgmaError::InvalidConfig(_)) => {
                        csv.push_str(&format!("{},NA,false,0\n", name))
                    }
                    Err(e) => return Err(e),
                }
            }
            atomic_write(&out, &csv)
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("NGMA_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                NgmaError::Infeasible { .. } | NgmaError::SearchTooLarge(_, _) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
