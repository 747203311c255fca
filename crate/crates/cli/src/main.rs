//! Command-line harness that verifies the elliptic beta integral, inversion,
//! series and theta identities against configurable grids, seeds and
//! tolerances, and emits one machine-readable report per sample.
//!
//! Exit codes: 0 all verifications passed, 1 at least one failed,
//! 2 configuration or usage error. Reports go to standard output (one JSON
//! object per line, numerics as decimal strings); diagnostics go to standard
//! error. Identical command lines produce byte-identical report streams
//! (timing is zeroed unless `--timings` is given).

mod exec;
mod registry;

use std::collections::HashMap;
use std::process::ExitCode;

use exec::{run_sweep, run_verify, RunConfig};
use registry::{lookup, print_list};

const USAGE: &str = "\
usage: ellint [--schema | --list]
       ellint verify <identity> [options]
       ellint sweep  <identity> [--grids N1,N2,..] [options]

options:
  --identity <name>     identity to verify (alternative to the positional)
  --n <int>             dimension (where the identity is a family)
  --N <k1,k2,..>        summation box orders for the series identities
  --seed <int>          base seed; sample i uses seed + i            [1]
  --grid <int>          nodes per torus dimension (even, >= 8)
  --tol <float>         pass threshold on the relative error
  --m-cap <float>       cap on max(|p|, |q|)
  --modulus-cap <float> cap on free parameter moduli
  --samples <int>       number of seeded samples
  --jobs <int>          worker threads (reports stay ordered)        [1]
  --config <path>       flat key = value file (flags take precedence)
  --timings             include wall-clock elapsed_ms in the reports

environment:
  ELLINT_BUDGET         cap on integrand evaluations per quadrature call
";

fn fail_usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("{USAGE}");
    ExitCode::from(2)
}

#[derive(Default)]
struct RawOpts {
    map: HashMap<String, String>,
    timings: bool,
}

impl RawOpts {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }
}

fn parse_flags(args: &[String]) -> Result<(Vec<String>, RawOpts), String> {
    let mut positional = Vec::new();
    let mut opts = RawOpts::default();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if a == "--timings" {
            opts.timings = true;
            i += 1;
        } else if let Some(key) = a.strip_prefix("--") {
            let value = args
                .get(i + 1)
                .ok_or_else(|| format!("flag --{key} needs a value"))?;
            opts.map.insert(key.to_string(), value.clone());
            i += 2;
        } else {
            positional.push(a.clone());
            i += 1;
        }
    }
    Ok((positional, opts))
}

fn load_config(path: &str, opts: &mut RawOpts) -> Result<(), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("config {path}: {e}"))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config {path}:{}: expected key = value", lineno + 1))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key == "timings" {
            opts.timings = opts.timings || value == "true" || value == "1";
        } else {
            // flags take precedence over the file
            opts.map.entry(key).or_insert(value);
        }
    }
    Ok(())
}

fn parse<T: std::str::FromStr>(opts: &RawOpts, key: &str, default: T) -> Result<T, String> {
    match opts.get(key) {
        None => Ok(default),
        Some(s) => s
            .parse::<T>()
            .map_err(|_| format!("flag --{key}: cannot parse {s:?}")),
    }
}

fn parse_list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| format!("cannot parse list entry {x:?}"))
        })
        .collect()
}

fn parse_grid_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| format!("cannot parse grid entry {x:?}"))
        })
        .collect()
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        return fail_usage("no command given");
    }
    if args.iter().any(|a| a == "--schema") {
        println!(
            "{}",
            ellint_core::report::VerificationReport::schema_document()
        );
        return ExitCode::SUCCESS;
    }
    if args.iter().any(|a| a == "--list") {
        print_list();
        return ExitCode::SUCCESS;
    }

    let command = args[0].clone();
    if command != "verify" && command != "sweep" {
        return fail_usage(&format!("unknown command {command:?}"));
    }
    let (positional, mut opts) = match parse_flags(&args[1..]) {
        Ok(v) => v,
        Err(e) => return fail_usage(&e),
    };
    if let Some(path) = opts.get("config").map(str::to_string) {
        if let Err(e) = load_config(&path, &mut opts) {
            return fail_usage(&e);
        }
    }

    let identity_name = match positional
        .first()
        .cloned()
        .or_else(|| opts.get("identity").map(str::to_string))
    {
        Some(v) => v,
        None => return fail_usage("no identity given"),
    };
    let entry = match lookup(&identity_name) {
        Some(e) => e,
        None => return fail_usage(&format!("unknown identity {identity_name:?} (see --list)")),
    };

    let cfg = (|| -> Result<RunConfig, String> {
        let n = parse(&opts, "n", entry.default_n)?;
        if n == 0 || n > 3 {
            return Err("supported dimensions are 1 <= n <= 3".into());
        }
        // grid budgets scale down with dimension: N^n evaluations per sample
        let grid_default = if entry.quadrature && n == 3 {
            48
        } else {
            entry.default_grid
        };
        let grid_n = parse(&opts, "grid", grid_default)?;
        if entry.quadrature && (grid_n < 8 || grid_n % 2 != 0) {
            return Err(format!("grid must be even and >= 8, got {grid_n}"));
        }
        let orders = match opts.get("N") {
            Some(s) => {
                let list = parse_list(s)?;
                if list.len() != n {
                    return Err(format!("--N needs {n} entries, got {}", list.len()));
                }
                Some(list)
            }
            None => None,
        };
        let tol = parse(&opts, "tol", entry.default_tol)?;
        let m_cap = parse(&opts, "m-cap", entry.default_m_cap)?;
        let modulus_cap = parse(&opts, "modulus-cap", entry.default_modulus_cap)?;
        if !(0.0 < m_cap && m_cap < modulus_cap && modulus_cap < 1.0) {
            return Err(format!(
                "need 0 < m-cap < modulus-cap < 1, got {m_cap} and {modulus_cap}"
            ));
        }
        let samples = parse(&opts, "samples", entry.default_samples)?;
        let jobs = parse(&opts, "jobs", 1usize)?.max(1);
        let seed = parse(&opts, "seed", 1u64)?;
        Ok(RunConfig {
            entry,
            n,
            orders,
            seed,
            grid_n,
            tol,
            m_cap,
            modulus_cap,
            samples,
            jobs,
            timings: opts.timings,
        })
    })();
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => return fail_usage(&e),
    };

    let code = match command.as_str() {
        "verify" => run_verify(&cfg),
        "sweep" => {
            let grids = match opts.get("grids") {
                Some(s) => match parse_grid_list(s) {
                    Ok(g) => g,
                    Err(e) => return fail_usage(&e),
                },
                None => vec![64, 128, 256],
            };
            if grids.iter().any(|&g| g < 8 || g % 2 != 0) {
                return fail_usage("every sweep grid must be even and >= 8");
            }
            run_sweep(&cfg, &grids)
        }
        _ => unreachable!(),
    };
    ExitCode::from(code as u8)
}
