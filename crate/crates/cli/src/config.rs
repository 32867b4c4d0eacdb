//! Resolved run configuration: a TOML file merged with command-line flags.

use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use toomqca::lattice::ScheduleParams;
use toomqca::noise::NoiseTargets;
use toomqca::schedule::ScheduleTable;

use crate::CliError;

/// A 64-bit seed, written as a hex string so that values above `i64::MAX`
/// survive TOML.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Seed(pub u64);

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:016x}", self.0)
    }
}

impl Serialize for Seed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Seed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Seed(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl std::str::FromStr for Seed {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let parsed = match s.strip_prefix("0x") {
            Some(h) => u64::from_str_radix(h, 16),
            None => s.parse(),
        };
        parsed.map(Seed).map_err(|e| format!("bad seed `{s}`: {e}"))
    }
}

/// Primary schedule constants; everything else is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub m: u32,
    pub t_ref: u32,
    pub t_code: u32,
    pub t_sim: u32,
    pub t_ec_s: u32,
    pub w: u32,
    pub t_ec_d: u32,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { m: 24, t_ref: 18, t_code: 6, t_sim: 1, t_ec_s: 6, w: 3, t_ec_d: 7 }
    }
}

impl ScheduleConfig {
    pub fn params(&self) -> ScheduleParams {
        let mut p = ScheduleParams::new(self.m, self.t_ref, self.t_code, self.t_sim).with_correction(self.t_ec_s, self.w);
        p.t_ec_d = self.t_ec_d;
        p
    }

    /// Parameters, rejected with the first violated inequality.
    pub fn resolve(&self) -> Result<ScheduleParams, CliError> {
        let p = self.params();
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }
}

/// Schedule overrides given on the command line; each one wins over the file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ScheduleFlags {
    #[arg(long = "M", global = true)]
    pub m: Option<u32>,
    #[arg(long = "T-ref", global = true)]
    pub t_ref: Option<u32>,
    #[arg(long = "T-code", global = true)]
    pub t_code: Option<u32>,
    #[arg(long = "T-sim", global = true)]
    pub t_sim: Option<u32>,
    #[arg(long = "t-ec-s", global = true)]
    pub t_ec_s: Option<u32>,
    #[arg(long = "w", global = true)]
    pub w: Option<u32>,
    #[arg(long = "t-ec-d", global = true)]
    pub t_ec_d: Option<u32>,
}

impl ScheduleFlags {
    pub fn apply(&self, s: &mut ScheduleConfig) {
        let pairs = [
            (self.m, &mut s.m),
            (self.t_ref, &mut s.t_ref),
            (self.t_code, &mut s.t_code),
            (self.t_sim, &mut s.t_sim),
            (self.t_ec_s, &mut s.t_ec_s),
            (self.w, &mut s.w),
            (self.t_ec_d, &mut s.t_ec_d),
        ];
        for (flag, slot) in pairs {
            if let Some(v) = flag {
                *slot = v;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseLayer {
    Structure,
    Data,
    Both,
}

impl NoiseLayer {
    pub fn targets(self) -> NoiseTargets {
        NoiseTargets { structure: self != NoiseLayer::Data, data: self != NoiseLayer::Structure }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    /// Data registers stay idle.
    None,
    Identity,
    Repetition,
    Exercise,
}

impl TableKind {
    pub fn table(self) -> Option<ScheduleTable> {
        match self {
            TableKind::None => None,
            TableKind::Identity => Some(ScheduleTable::identity()),
            TableKind::Repetition => Some(ScheduleTable::repetition()),
            TableKind::Exercise => Some(ScheduleTable::exercise()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    Sparsity,
    Placements,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CodeChoice {
    Rep3,
    Steane,
}

/// Declares a resolved experiment section and its flag overlay.
///
/// Each field lists its flag name and default; the section struct is what a
/// config file and a manifest carry, the flag struct holds only what was
/// typed on the command line.
macro_rules! section {
    (
        $(#[$meta:meta])*
        $name:ident / $flags:ident {
            $( $(#[$fmeta:meta])* $field:ident [$flag:literal] : $ty:ty = $default:expr ),* $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            $( pub $field: $ty, )*
        }

        impl Default for $name {
            fn default() -> Self {
                $name { $( $field: $default, )* }
            }
        }

        #[derive(Debug, Clone, Default, clap::Args)]
        pub struct $flags {
            $(
                $(#[$fmeta])*
                #[arg(long = $flag)]
                pub $field: Option<$ty>,
            )*
        }

        impl $flags {
            pub fn apply(&self, s: &mut $name) {
                $( if let Some(v) = &self.$field { s.$field = v.clone(); } )*
            }
        }
    };
}

section! {
    SyncSpec / SyncFlags {
        /// Lattice side; 0 means two blocks per side.
        n ["n"]: usize = 0,
        /// Steps to run; 0 means two cycles.
        steps ["steps"]: u64 = 0,
        p ["p"]: f64 = 0.0,
        layer ["layer"]: NoiseLayer = NoiseLayer::Both,
        table ["table"]: TableKind = TableKind::Repetition,
        gating ["gating"]: bool = true,
        /// Write a row every `stride` steps.
        stride ["stride"]: u64 = 1,
    }
}

section! {
    AsyncSpec / AsyncFlags {
        n ["n"]: usize = 0,
        events ["events"]: u64 = 100_000,
        p ["p"]: f64 = 0.0,
        layer ["layer"]: NoiseLayer = NoiseLayer::Both,
        table ["table"]: TableKind = TableKind::Repetition,
        gating ["gating"]: bool = true,
        /// Sample the local-minimum fraction every this many events; 0 means once per sweep.
        sample_every ["sample-every"]: u64 = 0,
        /// Compare every completed slice with a synchronous run.
        check_slices ["check-slices"]: bool = true,
    }
}

section! {
    CtSpec / CtFlags {
        n ["n"]: usize = 0,
        p ["p"]: f64 = 0.0,
        duration ["duration"]: f64 = 100.0,
        sample_rate ["sample-rate"]: f64 = 1.0,
        layer ["layer"]: NoiseLayer = NoiseLayer::Both,
        table ["table"]: TableKind = TableKind::Repetition,
        /// Density samples before this time are discarded; negative means a third of the run.
        burn_in ["burn-in"]: f64 = -1.0,
        batches ["batches"]: usize = 10,
        gap_cap ["gap-cap"]: usize = 100_000,
    }
}

section! {
    ScanSpec / ScanFlags {
        mode ["mode"]: ScanMode = ScanMode::Placements,
        /// Placement trials.
        trials ["trials"]: u64 = 10_000,
        /// Lattice side for placements; 0 means three blocks per side.
        n ["n"]: usize = 0,
        #[arg(value_delimiter = ',')]
        t_ec_s ["sparsity-t"]: Vec<u32> = vec![1, 2],
        #[arg(value_delimiter = ',')]
        p_grid ["p"]: Vec<f64> = vec![1e-3, 1.8e-3, 3.2e-3, 5.6e-3, 1e-2],
        min_events ["min-events"]: u64 = 50,
        max_exrecs ["max-exrecs"]: u64 = 20_000_000,
    }
}

section! {
    FlowSpec / FlowFlags {
        a ["A"]: f64 = 100.0,
        t_ec ["tec"]: u32 = 1,
        eta0 ["eta0"]: f64 = 0.005,
        k ["k"]: u32 = 3,
    }
}

section! {
    GadgetSpec / GadgetFlags {
        /// Built-in gadget name, or `rep3-cnot-exrec` for the extended-rectangle check.
        gadget ["gadget"]: String = "rep3-majority-ec".into(),
        code ["code"]: CodeChoice = CodeChoice::Rep3,
        /// Fault budget; 0 means the code's t_EC_D.
        max_faults ["max-faults"]: usize = 0,
        case_cap ["case-cap"]: u64 = toomqca::data::DEFAULT_CASE_CAP,
    }
}

section! {
    LifetimeSpec / LifetimeFlags {
        #[arg(value_delimiter = ',')]
        sizes ["L"]: Vec<usize> = vec![16, 32, 64],
        #[arg(value_delimiter = ',')]
        p ["p"]: Vec<f64> = vec![0.01],
        trials ["trials"]: u64 = 200,
        cap ["cap"]: u64 = 100_000,
        conf ["conf"]: f64 = 0.95,
    }
}

section! {
    SolveSpec / SolveFlags {
        d_d ["d-d"]: u64 = 12,
        c_sim ["c-sim"]: f64 = 1.0,
        c_prog ["c-prog"]: f64 = 1.0,
        c_dim ["c-dim"]: f64 = 1.0,
        t_ref_min ["t-ref-min"]: u32 = 18,
        m_cap ["m-cap"]: u32 = 10_000,
        /// Try the configured schedule first and keep it if it is feasible.
        use_schedule ["use-schedule"]: bool = false,
    }
}

section! {
    ErosionSpec / ErosionFlags {
        n ["n"]: usize = 32,
        trials ["trials"]: u64 = 1000,
        /// Largest value of each triangle offset.
        max_offset ["max-offset"]: i64 = 4,
    }
}

/// One experiment with all of its settings resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    RunSync(SyncSpec),
    RunAsync(AsyncSpec),
    RunCt(CtSpec),
    ExrecScan(ScanSpec),
    ThresholdFlow(FlowSpec),
    GadgetCheck(GadgetSpec),
    Lifetime(LifetimeSpec),
    SolveParams(SolveSpec),
    ErosionTest(ErosionSpec),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::RunSync(_) => "run-sync",
            Experiment::RunAsync(_) => "run-async",
            Experiment::RunCt(_) => "run-ct",
            Experiment::ExrecScan(_) => "exrec-scan",
            Experiment::ThresholdFlow(_) => "threshold-flow",
            Experiment::GadgetCheck(_) => "gadget-check",
            Experiment::Lifetime(_) => "lifetime",
            Experiment::SolveParams(_) => "solve-params",
            Experiment::ErosionTest(_) => "erosion-test",
        }
    }

    /// Whether the experiment reads the schedule constants.
    pub fn uses_schedule(&self) -> bool {
        matches!(
            self,
            Experiment::RunSync(_) | Experiment::RunAsync(_) | Experiment::RunCt(_) | Experiment::ExrecScan(_)
        )
    }
}

/// Contents of a config file. Every section is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub seed: Option<Seed>,
    pub schedule: ScheduleConfig,
    pub run_sync: SyncSpec,
    pub run_async: AsyncSpec,
    pub run_ct: CtSpec,
    pub exrec_scan: ScanSpec,
    pub threshold_flow: FlowSpec,
    pub gadget_check: GadgetSpec,
    pub lifetime: LifetimeSpec,
    pub solve_params: SolveSpec,
    pub erosion_test: ErosionSpec,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub const DEFAULT_SEED: u64 = 1;

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Seed,
    pub schedule: ScheduleConfig,
    pub experiment: Experiment,
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        RunConfig { seed: Seed(DEFAULT_SEED), schedule: ScheduleConfig::default(), experiment }
    }

    /// Checks the schedule for experiments that use it.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.experiment.uses_schedule() {
            self.schedule.resolve()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_valid_defaults() {
        let f = ConfigFile::parse("").unwrap();
        assert_eq!(f.schedule, ScheduleConfig::default());
        let p = f.schedule.resolve().unwrap();
        assert_eq!((p.m, p.t_ref, p.t_code, p.t_sim, p.t_ec_s, p.w, p.t0), (24, 18, 6, 1, 6, 3, 24));
    }

    #[test]
    fn short_refresh_is_rejected_by_name() {
        let f = ConfigFile::parse("[schedule]\nt_ref = 10\n").unwrap();
        let e = f.schedule.resolve().unwrap_err().to_string();
        assert!(e.contains("T_ref >= w*t_EC_S"), "{e}");
    }

    #[test]
    fn small_block_is_rejected_by_name() {
        let f = ConfigFile::parse("[schedule]\nm = 20\nt_ref = 18\nt_code = 6\n").unwrap();
        let e = f.schedule.resolve().unwrap_err().to_string();
        assert!(e.contains("M >= T0"), "{e}");
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(ConfigFile::parse("[schedule]\nmm = 3\n").is_err());
        assert!(ConfigFile::parse("bogus = 1\n").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let mut s = SyncSpec { p: 0.2, steps: 5, ..Default::default() };
        SyncFlags { p: Some(0.1), ..Default::default() }.apply(&mut s);
        assert_eq!((s.p, s.steps), (0.1, 5));
    }

    #[test]
    fn seeds_accept_both_spellings() {
        let f = ConfigFile::parse("seed = 42\n").unwrap();
        assert_eq!(f.seed, Some(Seed(42)));
        let g = ConfigFile::parse("seed = \"0xffffffffffffffff\"\n").unwrap();
        assert_eq!(g.seed, Some(Seed(u64::MAX)));
    }
}
