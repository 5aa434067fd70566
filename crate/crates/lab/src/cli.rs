// Copyright 2026 The brl developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end.
//!
//! Subcommands: `run`, `bound`, `coherence`, `cover`, `verify`.
//! Exit codes: 0 success, 1 usage or configuration error, 2 verification
//! failure. The environment variable `BRL_SEED` overrides the config
//! master seed for `run` and `bound`.

use std::collections::HashMap;

use brl_core::operators::{coherence_empirical, coherence_sparse};
use brl_core::priors::sample_prior;
use brl_core::rng::RandomStream;

use crate::config::{parse_config, BasisConfig, ExperimentConfig, PriorConfig};
use crate::experiments::run_sweep;
use crate::verify::{render_verdicts, run_suite, Suite};
use crate::HarnessError;

pub const USAGE: &str = "usage:
  brl run --config <path> [--out <path>] [--threads N]
  brl bound --config <path>
  brl coherence --basis {identity|hadamard|dct} --n N (--s S | --prior-config <path> --pairs K [--seed S])
  brl cover --prior-config <path> --eta X --delta D --samples N [--seed S]
  brl verify --suite {gauss-noise|gaussian-conc|orthog-conc|separation|tv-sep|main-bound} [--seed S]

BRL_SEED overrides the config master_seed.";

/// Parsed flags: everything after the subcommand as `--key value` pairs.
fn parse_flags(args: &[String]) -> Result<HashMap<String, String>, HarnessError> {
    let mut flags = HashMap::new();
    let mut i = 0;
    while i < args.len() {
        let key = args[i]
            .strip_prefix("--")
            .ok_or_else(|| HarnessError::Config(format!("unexpected argument {}", args[i])))?;
        let value = args
            .get(i + 1)
            .ok_or_else(|| HarnessError::Config(format!("--{key} needs a value")))?;
        if flags.insert(key.to_string(), value.clone()).is_some() {
            return Err(HarnessError::Config(format!("--{key} given twice")));
        }
        i += 2;
    }
    Ok(flags)
}

fn required<'a>(flags: &'a HashMap<String, String>, key: &str) -> Result<&'a str, HarnessError> {
    flags
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| HarnessError::Config(format!("missing required flag --{key}")))
}

fn parse_num<T: std::str::FromStr>(value: &str, what: &str) -> Result<T, HarnessError> {
    value
        .parse()
        .map_err(|_| HarnessError::Config(format!("could not parse {what} from {value:?}")))
}

fn load_config(path: &str) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let mut config = parse_config(&text)?;
    if let Ok(seed) = std::env::var("BRL_SEED") {
        let seed: u64 = parse_num(&seed, "BRL_SEED")?;
        config.master_seed = seed;
        config.raw.master_seed = seed;
    }
    Ok(config)
}

fn parse_basis(name: &str) -> Result<BasisConfig, HarnessError> {
    Ok(match name {
        "identity" => BasisConfig::Identity,
        "hadamard" => BasisConfig::Hadamard,
        "dct" => BasisConfig::Dct,
        other => return Err(HarnessError::Config(format!("unknown basis {other:?}"))),
    })
}

fn load_prior(path: &str) -> Result<brl_core::priors::PriorSpec, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let raw: PriorConfig = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("prior config does not match schema: {e}")))?;
    crate::config::build_prior_standalone(&raw)
}

/// Runs the CLI; returns the process exit code.
pub fn run(args: &[String]) -> u8 {
    match dispatch(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(args: &[String]) -> Result<u8, HarnessError> {
    let Some(sub) = args.first() else {
        eprintln!("{USAGE}");
        return Ok(1);
    };
    let flags = parse_flags(&args[1..])?;
    match sub.as_str() {
        "run" => cmd_run(&flags),
        "bound" => cmd_bound(&flags),
        "coherence" => cmd_coherence(&flags),
        "cover" => cmd_cover(&flags),
        "verify" => cmd_verify(&flags),
        other => {
            eprintln!("unknown subcommand {other:?}\n{USAGE}");
            Ok(1)
        }
    }
}

fn cmd_run(flags: &HashMap<String, String>) -> Result<u8, HarnessError> {
    let config = load_config(required(flags, "config")?)?;
    let report = if let Some(threads) = flags.get("threads") {
        let n: usize = parse_num(threads, "--threads")?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(format!("could not build thread pool: {e}")))?;
        pool.install(|| run_sweep(&config))?
    } else {
        run_sweep(&config)?
    };
    let json = report.to_json()?;
    match flags.get("out") {
        Some(path) => {
            std::fs::write(path, &json)?;
            std::fs::write(format!("{path}.csv"), report.to_csv())?;
        }
        None => println!("{json}"),
    }
    Ok(0)
}

fn cmd_bound(flags: &HashMap<String, String>) -> Result<u8, HarnessError> {
    let config = load_config(required(flags, "config")?)?;
    let rows = crate::verify::breakdown_rows(&config)?;
    println!("{}", serde_json::to_string_pretty(&rows)?);
    Ok(0)
}

fn cmd_coherence(flags: &HashMap<String, String>) -> Result<u8, HarnessError> {
    let basis = parse_basis(required(flags, "basis")?)?;
    let n: usize = parse_num(required(flags, "n")?, "--n")?;
    if let Some(s) = flags.get("s") {
        let s: usize = parse_num(s, "--s")?;
        let mu = coherence_sparse(basis.to_core(), n, s)?;
        println!("{}", serde_json::json!({ "mu": mu, "mode": "exact" }));
        return Ok(0);
    }
    let prior = load_prior(required(flags, "prior-config")?)?;
    let pairs: usize = parse_num(required(flags, "pairs")?, "--pairs")?;
    let seed: u64 = match flags.get("seed") {
        Some(s) => parse_num(s, "--seed")?,
        None => 0,
    };
    let mut stream = RandomStream::new(seed, 0);
    let mu = coherence_empirical(basis.to_core(), n, &prior, pairs, &mut stream)?;
    println!("{}", serde_json::json!({ "mu": mu, "mode": "empirical" }));
    Ok(0)
}

fn cmd_cover(flags: &HashMap<String, String>) -> Result<u8, HarnessError> {
    let prior = load_prior(required(flags, "prior-config")?)?;
    let eta: f64 = parse_num(required(flags, "eta")?, "--eta")?;
    let delta: f64 = parse_num(required(flags, "delta")?, "--delta")?;
    let samples: usize = parse_num(required(flags, "samples")?, "--samples")?;
    let seed: u64 = match flags.get("seed") {
        Some(s) => parse_num(s, "--seed")?,
        None => 0,
    };
    let mut stream = RandomStream::new(seed, 0);
    let set: Vec<Vec<f64>> = (0..samples)
        .map(|_| sample_prior(&prior, &mut stream))
        .collect();
    let cover = brl_core::covering::greedy_cover(&set, eta, delta)?;
    println!(
        "{}",
        serde_json::json!({
            "count": cover.count,
            "covered_fraction": cover.covered_fraction,
            "eta": cover.eta,
            "delta": cover.delta,
        })
    );
    Ok(0)
}

fn cmd_verify(flags: &HashMap<String, String>) -> Result<u8, HarnessError> {
    let name = required(flags, "suite")?;
    let Some(suite) = Suite::parse(name) else {
        return Err(HarnessError::Config(format!("unknown suite {name:?}")));
    };
    let seed: u64 = match flags.get("seed") {
        Some(s) => parse_num(s, "--seed")?,
        None => 0,
    };
    let results = run_suite(suite, seed, None)?;
    print!("{}", render_verdicts(&results)?);
    Ok(if results.iter().all(|r| r.pass) { 0 } else { 2 })
}
