//! Experiment configuration. Every subcommand's flags deserialize from the
//! same JSON shape, so a report's embedded `config` can be replayed with
//! `stabnoise run --config`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use stabnoise::reductions::parse_rational;

/// Exact rate: accepts `0.3`, `"0.3"` or `"3/10"`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rate {
    text: String,
    value: BigRational,
}

impl Rate {
    pub fn exact(&self) -> &BigRational {
        &self.value
    }

    pub fn f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

impl FromStr for Rate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let value = parse_rational(s).map_err(|e| e.to_string())?;
        Ok(Rate { text: s.trim().to_string(), value })
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(serde_json::Number),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Num(n) => n.to_string(),
            Raw::Text(t) => t,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Parser, Debug)]
#[command(name = "stabnoise", version, about = "Stabilizer learning under depolarizing noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Sample a problem instance.
    Gen(GenArgs),
    /// Apply a reduction to an instance file.
    Reduce(ReduceArgs),
    /// Run an exact oracle on an instance file.
    Solve(SolveArgs),
    /// Paired structured/unstructured trials through a reduction.
    Verify(VerifyArgs),
    /// Total-variation curves of the local Clifford chain, as CSV.
    Mix(MixArgs),
    /// Exact counting identities.
    Count(CountArgs),
    /// Replay a JSON experiment config.
    #[serde(skip)]
    Run(RunArgs),
}

/// Defaults come from the flag definitions so that JSON configs and the
/// command line can never disagree.
macro_rules! flag_defaults {
    ($($t:ty => $name:literal),* $(,)?) => {$(
        impl Default for $t {
            fn default() -> Self {
                #[derive(Parser)]
                struct Wrap {
                    #[command(flatten)]
                    inner: $t,
                }
                Wrap::try_parse_from([$name]).expect("every flag has a default").inner
            }
        }
    )*};
}

flag_defaults!(
    GenArgs => "gen",
    ReduceArgs => "reduce",
    SolveArgs => "solve",
    VerifyArgs => "verify",
    MixArgs => "mix",
    CountArgs => "count",
);

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Lpn,
    Symplpn,
    Lsn,
    LsnQuantum,
    Qsdp,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "lsn")]
    pub problem: ProblemKind,
    /// Secret length (LPN) or logical qubits (LSN, QSDP).
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Rows (LPN) or qubits.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value = "0.1")]
    pub p: Rate,
    /// Samples (LSN).
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Error weight bound (QSDP).
    #[arg(long, default_value_t = 1)]
    pub w: usize,
    #[arg(long)]
    pub structured: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Drop the hidden block (secret, errors) from the output.
    #[arg(long)]
    pub public_only: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReduceChain {
    /// LPN to SympLPN.
    LpnSymplpn,
    /// SympLPN to m-sample LSN by the hybrid embedding.
    SymplpnLsn,
    /// Classical LSN to quantum LSN.
    LsnQuantum,
    /// Quantum LSN to classical LSN.
    LsnClassical,
    /// Add a uniform logical shift to an LSN secret.
    Rerandomize,
    /// Convolve extra noise up to `--target`.
    IncreaseNoise,
    /// First quantum LSN sample to a syndrome decoding instance.
    QncpQsdp,
    /// Syndrome decoding instance to a noisy code state.
    QsdpQncp,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReduceArgs {
    #[arg(long, value_enum, default_value = "lpn-symplpn")]
    pub chain: ReduceChain,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Extension slack for LPN to SympLPN.
    #[arg(long, default_value = "1/3")]
    pub eps: Rate,
    /// Override the LPN rate used in the parameter trace.
    #[arg(long)]
    pub p: Option<Rate>,
    /// Override the shared noise level `q` of LPN to SympLPN.
    #[arg(long)]
    pub q: Option<Rate>,
    /// Target rate for increase-noise.
    #[arg(long)]
    pub target: Option<Rate>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub w: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    /// Maximum-likelihood search.
    Ml,
    /// Likelihood-ratio decision.
    Lr,
    /// Minimum-weight syndrome decoding.
    MinWeight,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Defaults to ML search, or min-weight for QSDP.
    #[arg(long, value_enum)]
    pub oracle: Option<OracleKind>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyChain {
    /// LPN to SympLPN to m-sample LSN, against native LSN scaled by 1/m.
    LpnSymplpnLsn,
    /// SympLPN to m-sample LSN, against native LSN scaled by 1/m.
    SymplpnLsn,
    /// Classical to quantum to classical LSN, against native LSN.
    LsnRoundTrip,
    /// Decision from two ML search calls, against s*^2 - 1/2.
    DecisionToSearch,
    /// Secret-bit recovery from the LR distinguisher, against 1/2.
    SearchToDecision,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "lpn-symplpn-lsn")]
    pub chain: VerifyChain,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value = "0.3")]
    pub p: Rate,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value = "1/3")]
    pub eps: Rate,
    /// Trials per arm.
    #[arg(long, default_value_t = 2000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Sigma multiplier of the acceptance predicate.
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixMethod {
    Exact,
    Mc,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixArgs {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub t: usize,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MixMethod,
    #[arg(long, default_value_t = 20_000)]
    pub trajectories: u64,
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write mixing times and the scrambling gap at this level as JSON.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountArgs {
    /// Number of [[N, K]] stabilizer codes.
    #[arg(long, num_args = 2, value_names = ["N", "K"])]
    pub codes: Option<Vec<usize>>,
    /// Number of ordered isotropic M-tuples on N qubits.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    pub tableaus: Option<Vec<usize>>,
    /// Sparse-tableau counting comparison, as JSON.
    #[arg(long, num_args = 3, value_names = ["N", "K", "D"])]
    pub sparse: Option<Vec<usize>>,
}

#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_accept_decimals_fractions_and_numbers() {
        let r: Rate = "3/10".parse().unwrap();
        assert_eq!(r.exact(), &"0.3".parse::<Rate>().unwrap().value);
        let from_num: Rate = serde_json::from_str("0.3").unwrap();
        assert_eq!(from_num.exact(), r.exact());
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"3/10\"");
        assert!("abc".parse::<Rate>().is_err());
    }

    #[test]
    fn empty_config_matches_flag_defaults() {
        let cmd: Command = serde_json::from_str(r#"{"command": "verify"}"#).unwrap();
        let Command::Verify(v) = cmd else { panic!("wrong variant") };
        assert_eq!(v.trials, 2000);
        assert_eq!(v.p.f64(), 0.3);
        assert_eq!(v.chain, VerifyChain::LpnSymplpnLsn);
    }

    #[test]
    fn configs_round_trip() {
        let cmd = Command::Mix(MixArgs { n: 3, eps: Some(0.1), ..MixArgs::default() });
        let text = serde_json::to_string(&cmd).unwrap();
        let back: Command = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
