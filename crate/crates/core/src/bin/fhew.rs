//! Command-line front end: keys, encryption, gates, circuits and the
//! in-memory cost model.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fhew_pim::bootstrap::RefreshKey;
use fhew_pim::gates::{
    build_kogge_stone_adder, build_multiplier, eval_circuit, eval_gate, format_netlist, parse_netlist, GateKind,
};
use fhew_pim::io;
use fhew_pim::keys::{generate_keys, ServerKey};
use fhew_pim::lwe::{self, LweCiphertext, LweSecretKey};
use fhew_pim::params::{all_param_sets, load_param_set, BootstrapMode, ParamSet};
use fhew_pim::pimsim::{
    build_server_pipeline, cost_report, format_explain, format_table, scale_to_budget, Optimization, PimConfig,
};
use fhew_pim::sampler::Sampler;
use fhew_pim::{Error, Result};

const SECRET_FILE: &str = "secret.key";
const RING_FILE: &str = "ring.key";
const REFRESH_FILE: &str = "refresh.key";
const SWITCH_FILE: &str = "switch.key";

#[derive(Parser)]
#[command(name = "fhew", version, about = "Boolean-gate FHE with AP/GINX bootstrapping and a PIM cost model")]
struct Cli {
    /// Parameter set for commands that create new material.
    #[arg(long, global = true, env = "FHEW_PARAMS", default_value = "STD128")]
    params: String,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the named parameter sets.
    Params {
        #[command(subcommand)]
        cmd: ParamsCmd,
    },
    /// Generate secret, ring, refresh and key-switch keys into a directory.
    Keygen {
        #[arg(long, default_value = "ginx")]
        mode: BootstrapMode,
        /// Seed for deterministic output; random when absent.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "keys")]
        out_dir: PathBuf,
    },
    /// Encrypt a bit string, one ciphertext file per bit (c0.ct, c1.ct, ...).
    Encrypt {
        /// Directory holding secret.key.
        #[arg(long)]
        keys: PathBuf,
        /// Bits to encrypt, e.g. 1011. May be empty.
        #[arg(long, default_value = "")]
        bits: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt ciphertext files and print the bits in order.
    Decrypt {
        #[arg(long)]
        keys: PathBuf,
        cts: Vec<PathBuf>,
    },
    /// Evaluate one gate homomorphically.
    Gate {
        /// AND, NAND, OR, NOR, XOR, XNOR or NOT.
        gate: GateKind,
        /// Directory holding refresh.key and switch.key.
        #[arg(long)]
        keys: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Expected bootstrap mode; checked against the refresh key.
        #[arg(long)]
        mode: Option<BootstrapMode>,
        #[arg(num_args = 1..=2, required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Evaluate or generate netlists.
    Circuit {
        #[command(subcommand)]
        cmd: CircuitCmd,
    },
    /// Cost model report for one parameter set.
    Simulate(SimulateArgs),
    /// Wall-clock timing of this software implementation (not modeled PIM numbers).
    Bench {
        #[arg(long, default_value_t = 100)]
        gates: usize,
        #[arg(long, default_value = "NAND")]
        gate: GateKind,
        #[arg(long, default_value = "ginx")]
        mode: BootstrapMode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum ParamsCmd {
    /// List all sets.
    List {
        #[arg(long, value_enum, default_value_t = ListFormat::Table)]
        format: ListFormat,
    },
    /// Print one set as TOML.
    Show { name: String },
}

#[derive(Subcommand)]
enum CircuitCmd {
    /// Evaluate a netlist on ciphertext files.
    Eval {
        netlist: PathBuf,
        #[arg(long)]
        keys: PathBuf,
        /// Directory with one `<wire>.ct` file per circuit input.
        #[arg(long)]
        inputs: Option<PathBuf>,
        /// Explicit `wire=path` bindings; override files from --inputs.
        #[arg(long = "bind", value_name = "WIRE=PATH")]
        bind: Vec<String>,
        /// Output directory, one `<wire>.ct` per circuit output.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Evaluator threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        mode: Option<BootstrapMode>,
    },
    /// Print a generated netlist.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// Operand width in bits.
        #[arg(long, default_value_t = 8)]
        width: usize,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    /// Kogge-Stone adder: inputs a*, b*; outputs s*, cout.
    Add,
    /// Array multiplier: inputs a*, b*; outputs p*.
    Mul,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value = "ginx")]
    mode: BootstrapMode,
    #[arg(long, default_value = "throughput")]
    opt: Optimization,
    /// Memory budget; scales pipelines up or shares NTT cores.
    #[arg(long)]
    budget_gb: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Append the full stage table.
    #[arg(long)]
    explain: bool,
    /// TOML file overriding the hardware config and cost formulas.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum ListFormat {
    Table,
    Toml,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_errors = matches!(&cli.cmd, Command::Simulate(a) if a.format == Format::Json);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if json_errors {
                println!("{}", error_json(&e));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn error_json(e: &Error) -> String {
    let mut v = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::InsufficientMemory { budget_gb, floor_gb } = e {
        v["budget_gb"] = (*budget_gb).into();
        v["floor_gb"] = (*floor_gb).into();
    }
    serde_json::to_string_pretty(&v).expect("json value")
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Params { cmd } => cmd_params(cmd),
        Command::Keygen { mode, seed, out_dir } => cmd_keygen(&load_param_set(&cli.params)?, mode, seed, &out_dir),
        Command::Encrypt { keys, bits, out_dir, seed } => cmd_encrypt(&keys, &bits, &out_dir, seed),
        Command::Decrypt { keys, cts } => cmd_decrypt(&keys, &cts),
        Command::Gate { gate, keys, out, mode, inputs } => cmd_gate(gate, &keys, &out, mode, &inputs),
        Command::Circuit { cmd } => cmd_circuit(cmd),
        Command::Simulate(args) => cmd_simulate(&load_param_set(&cli.params)?, &args),
        Command::Bench { gates, gate, mode, seed, format } => {
            cmd_bench(&load_param_set(&cli.params)?, gates, gate, mode, seed, format)
        }
    }
}

fn cmd_params(cmd: ParamsCmd) -> Result<()> {
    match cmd {
        ParamsCmd::List { format } => {
            let sets = all_param_sets();
            match format {
                ListFormat::Table => {
                    println!(
                        "{:<8} {:>5} {:>5} {:>5} {:>6} {:>5} {:>5} {:>5} {:>3} {:>3} {:>3}",
                        "name", "n", "q", "N", "log2_Q", "B_s", "B_g", "B_r", "d_s", "d_g", "d_r"
                    );
                    for p in &sets {
                        println!(
                            "{:<8} {:>5} {:>5} {:>5} {:>6} {:>5} {:>5} {:>5} {:>3} {:>3} {:>3}",
                            p.name,
                            p.lwe_dim,
                            p.lwe_modulus,
                            p.ring_dim,
                            p.ring_modulus_bits,
                            p.ks_base,
                            p.gadget_base,
                            p.refresh_base,
                            p.ks_digits,
                            p.gadget_digits,
                            p.refresh_digits
                        );
                    }
                }
                ListFormat::Toml => {
                    for p in &sets {
                        println!("[{}]\n{}", p.name, p.to_toml());
                    }
                }
                ListFormat::Json => {
                    println!("{}", serde_json::to_string_pretty(&sets).map_err(|e| Error::Format(e.to_string()))?)
                }
            }
        }
        ParamsCmd::Show { name } => print!("{}", load_param_set(&name)?.to_toml()),
    }
    Ok(())
}

fn seed_or_random(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn cmd_keygen(params: &ParamSet, mode: BootstrapMode, seed: Option<u64>, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let t = Instant::now();
    let (client, server) = generate_keys(params, mode, seed_or_random(seed))?;
    let files = [SECRET_FILE, RING_FILE, REFRESH_FILE, SWITCH_FILE].map(|f| dir.join(f));
    io::save(&files[0], |w| io::write_secret_key(w, params, &client.lwe))?;
    io::save(&files[1], |w| io::write_ring_secret(w, params, &client.ring_secret))?;
    io::save(&files[2], |w| io::write_refresh_key(w, params, &server.refresh))?;
    io::save(&files[3], |w| io::write_keyswitch_key(w, params, &server.ksk))?;
    println!("{} {} keys in {:.2} s", params.name, mode, t.elapsed().as_secs_f64());
    for f in &files {
        let bytes = fs::metadata(f)?.len();
        println!("{:<40} {:>14} bytes {:>10.2} MB", f.display(), bytes, bytes as f64 / (1u64 << 20) as f64);
    }
    Ok(())
}

fn load_secret(dir: &Path) -> Result<(ParamSet, LweSecretKey)> {
    io::load(&dir.join(SECRET_FILE), io::read_secret_key)
}

fn load_server(dir: &Path, expect: Option<BootstrapMode>) -> Result<ServerKey> {
    let (params, refresh): (ParamSet, RefreshKey) = io::load(&dir.join(REFRESH_FILE), io::read_refresh_key)?;
    let (ks_params, ksk) = io::load(&dir.join(SWITCH_FILE), io::read_keyswitch_key)?;
    if ks_params.name != params.name {
        return Err(Error::Format(format!(
            "refresh key uses {} but key-switch key uses {}",
            params.name, ks_params.name
        )));
    }
    if let Some(m) = expect {
        if m != refresh.mode() {
            return Err(Error::Param(format!("--mode {m} but the refresh key is {}", refresh.mode())));
        }
    }
    ServerKey::from_parts(&params, refresh, ksk)
}

fn load_ct(path: &Path, params: &ParamSet) -> Result<LweCiphertext> {
    let (p, ct) = io::load(path, io::read_ciphertext)?;
    if p.name != params.name || ct.dim() != params.lwe_dim || ct.modulus != params.lwe_modulus {
        return Err(Error::Format(format!("{} was made for {}, keys are {}", path.display(), p.name, params.name)));
    }
    Ok(ct)
}

fn save_ct(path: &Path, params: &ParamSet, ct: &LweCiphertext) -> Result<()> {
    io::save(path, |w| io::write_ciphertext(w, params, ct))
}

fn cmd_encrypt(keys: &Path, bits: &str, out_dir: &Path, seed: Option<u64>) -> Result<()> {
    let bits: Vec<bool> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Param(format!("bit string may only contain 0 and 1 (got `{other}`)"))),
        })
        .collect::<Result<_>>()?;
    let (params, sk) = load_secret(keys)?;
    fs::create_dir_all(out_dir)?;
    let mut rng = Sampler::new(seed_or_random(seed));
    for (i, &bit) in bits.iter().enumerate() {
        let ct = lwe::encrypt_bit(&params, &sk, bit, &mut rng);
        let path = out_dir.join(format!("c{i}.ct"));
        save_ct(&path, &params, &ct)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_decrypt(keys: &Path, cts: &[PathBuf]) -> Result<()> {
    let (params, sk) = load_secret(keys)?;
    let mut out = String::with_capacity(cts.len());
    for path in cts {
        let ct = load_ct(path, &params)?;
        out.push(if lwe::decrypt_bit(&sk, &ct) { '1' } else { '0' });
    }
    println!("{out}");
    Ok(())
}

fn cmd_gate(gate: GateKind, keys: &Path, out: &Path, mode: Option<BootstrapMode>, inputs: &[PathBuf]) -> Result<()> {
    if inputs.len() != gate.arity() {
        return Err(Error::Param(format!("{gate} takes {} input(s), got {}", gate.arity(), inputs.len())));
    }
    let server = load_server(keys, mode)?;
    let params = server.params().clone();
    let x = load_ct(&inputs[0], &params)?;
    let y = match inputs.get(1) {
        Some(p) => load_ct(p, &params)?,
        None => x.clone(),
    };
    save_ct(out, &params, &eval_gate(gate, &x, &y, &server)?)
}

fn cmd_circuit(cmd: CircuitCmd) -> Result<()> {
    match cmd {
        CircuitCmd::Gen { kind, width, out } => {
            if width == 0 {
                return Err(Error::Param("width must be at least 1".into()));
            }
            let circ = match kind {
                GenKind::Add => build_kogge_stone_adder(width),
                GenKind::Mul => build_multiplier(width),
            };
            let text = format_netlist(&circ);
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        CircuitCmd::Eval { netlist, keys, inputs, bind, out_dir, jobs, mode } => {
            let circ = parse_netlist(&fs::read_to_string(&netlist)?)?;
            let server = load_server(&keys, mode)?;
            let params = server.params().clone();
            let mut paths: HashMap<String, PathBuf> = HashMap::new();
            if let Some(dir) = &inputs {
                for w in &circ.inputs {
                    let p = dir.join(format!("{w}.ct"));
                    if p.exists() {
                        paths.insert(w.clone(), p);
                    }
                }
            }
            for b in &bind {
                let (w, p) = b.split_once('=').ok_or_else(|| Error::Param(format!("--bind expects WIRE=PATH, got `{b}`")))?;
                paths.insert(w.trim().to_string(), PathBuf::from(p.trim()));
            }
            let mut cts = HashMap::new();
            for w in &circ.inputs {
                let p = paths.get(w).ok_or_else(|| Error::UnboundWire(w.clone()))?;
                cts.insert(w.clone(), load_ct(p, &params)?);
            }
            let t = Instant::now();
            let (outs, counts) = eval_circuit(&circ, &cts, &server, jobs)?;
            fs::create_dir_all(&out_dir)?;
            for w in &circ.outputs {
                let path = out_dir.join(format!("{w}.ct"));
                save_ct(&path, &params, &outs[w])?;
                println!("{}", path.display());
            }
            let stats = circ.stats();
            eprintln!(
                "{} bootstrapped gates, depth {}, {} external products, {:.2} s",
                stats.bootstrapped_gates,
                stats.depth,
                counts.external_products,
                t.elapsed().as_secs_f64()
            );
            Ok(())
        }
    }
}

fn cmd_simulate(params: &ParamSet, args: &SimulateArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            toml::from_str::<PimConfig>(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?
        }
        None => PimConfig::default(),
    };
    config.optimization = args.opt;
    config.validate()?;
    let report = match args.budget_gb {
        Some(gb) => scale_to_budget(params, args.mode, gb, &config)?,
        None => cost_report(params, args.mode, &config)?,
    };
    match args.format {
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Error::Format(e.to_string()))?)
        }
        Format::Table => print!("{}", format_table(&report)),
    }
    if args.explain {
        let model = build_server_pipeline(params, args.mode, &config)?;
        let text = format_explain(&model);
        if args.format == Format::Json {
            eprint!("{text}");
        } else {
            print!("\n{text}");
        }
    }
    Ok(())
}

fn cmd_bench(params: &ParamSet, n: usize, gate: GateKind, mode: BootstrapMode, seed: u64, format: Format) -> Result<()> {
    let t = Instant::now();
    let (client, server) = generate_keys(params, mode, seed)?;
    let keygen_s = t.elapsed().as_secs_f64();
    let mut rng = Sampler::new(seed ^ 0x5eed);
    let mut times = Vec::with_capacity(n);
    let mut wrong = 0usize;
    for _ in 0..n {
        let (x, y) = (rng.next_u64() & 1 == 1, rng.next_u64() & 1 == 1);
        let (cx, cy) = (client.encrypt(x, &mut rng), client.encrypt(y, &mut rng));
        let t = Instant::now();
        let out = eval_gate(gate, &cx, &cy, &server)?;
        times.push(t.elapsed().as_secs_f64() * 1e3);
        if client.decrypt(&out) != gate.apply(x, y) {
            wrong += 1;
        }
    }
    let mean = times.iter().sum::<f64>() / n.max(1) as f64;
    let var = if n > 1 { times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "kind": "software_wall_clock",
                "params": params.name,
                "mode": mode.to_string(),
                "gate": gate.name(),
                "gates": n,
                "keygen_s": keygen_s,
                "mean_ms": mean,
                "variance_ms2": var,
                "stddev_ms": var.sqrt(),
                "wrong": wrong,
            }))
            .map_err(|e| Error::Format(e.to_string()))?
        ),
        Format::Table => {
            println!("software wall-clock timing on this machine (not modeled PIM figures)");
            println!("{} {} {} x{}", params.name, mode, gate, n);
            println!("keygen     {keygen_s:.2} s");
            println!("per gate   mean {mean:.2} ms, variance {var:.3} ms^2, stddev {:.2} ms", var.sqrt());
            println!("wrong      {wrong}");
        }
    }
    Ok(())
}
