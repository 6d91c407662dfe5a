use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tpact_core::battery;
use tpact_core::caps::Caps;
use tpact_core::correspond::{lambda_from_theta, theta_from_lambda};
use tpact_core::error::Error;
use tpact_core::io;
use tpact_core::semigroup::{
    inverse_structure, is_e_unitary, is_f_inverse, max_group_image, sigma_congruence,
};

/// Workbench for finite inverse semigroups, twisted partial group
/// actions, twisted modules and their crossed products.
#[derive(Parser)]
#[command(name = "tpact", version, about)]
struct Cli {
    /// Seed for the generated verification suite
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Size cap for isomorphism search
    #[arg(long, global = true, default_value_t = 64)]
    max_iso: usize,
    /// Candidate cap for witness searches and transversal enumeration
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_witness: usize,
    /// Element cap for multiplier enumeration
    #[arg(long, global = true, default_value_t = 10)]
    max_mult: usize,
    /// Print failures and summaries only
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print structural invariants of a .sgp table
    Inspect { path: PathBuf },
    /// Build the crossed product of a .tpa or .tsm bundle and emit it
    /// as a .sgp table with the extension maps in comments
    Crossed {
        path: PathBuf,
        /// Output file (stdout when omitted)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Convert between the twisted-module and twisted-partial-action
    /// presentations
    Convert(ConvertArgs),
    /// Run the property battery over bundles, or over the generated
    /// suite
    Verify {
        /// Run the seeded generator suite instead of input files
        #[arg(long)]
        suite: bool,
        paths: Vec<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ConvertTarget {
    /// Convert a .tpa bundle to the module presentation
    #[arg(long, value_name = "PATH.tpa")]
    to_module: Option<PathBuf>,
    /// Convert a .tsm bundle to the action presentation
    #[arg(long, value_name = "PATH.tsm")]
    to_action: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    target: ConvertTarget,
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::MalformedInput(_) | Error::NotAssociative(..) => 2,
        _ => 1,
    }
}

fn read(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), ExitCode> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", p.display());
            ExitCode::from(2)
        }),
    }
}

fn cmd_inspect(path: &Path, quiet: bool) -> Result<(), ExitCode> {
    let text = read(path)?;
    let run = || -> tpact_core::Result<String> {
        let table = io::parse_sgp(&text)?;
        let inv = inverse_structure(&table)?;
        let sigma = sigma_congruence(&inv)?;
        let (g, _) = max_group_image(&inv)?;
        let eu = is_e_unitary(&inv)?;
        let fi = is_f_inverse(&inv)?.is_some();
        let clifford = tpact_core::clifford::certify_clifford(&inv).is_ok();
        let yesno = |b: bool| if b { "yes" } else { "no" };
        let mut out = format!(
            "n={} E={} sigma-classes={} max-group={} e-unitary={} f-inverse={} clifford={}\n",
            table.n(),
            inv.idempotents().len(),
            sigma.size(),
            g.n(),
            yesno(eu),
            yesno(fi),
            yesno(clifford),
        );
        if !quiet {
            let idems: Vec<String> =
                inv.idempotents().iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("idempotents: {}\n", idems.join(" ")));
            let mut hasse = Vec::new();
            for (s, t) in inv.strict_order_pairs() {
                let covered = inv.elements().any(|u| {
                    u != s && u != t && inv.natural_leq(s, u) && inv.natural_leq(u, t)
                });
                if !covered {
                    hasse.push(format!("{s}<{t}"));
                }
            }
            out.push_str(&format!("hasse: {}\n", hasse.join(" ")));
        }
        Ok(out)
    };
    match run() {
        Ok(report) => {
            print!("{report}");
            Ok(())
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(2))
        }
    }
}

fn cmd_crossed(path: &Path, out: &Option<PathBuf>) -> Result<(), ExitCode> {
    let text = read(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let run = || -> tpact_core::Result<String> {
        match ext {
            "tpa" => {
                let tpa = io::parse_tpa(&text)?;
                let cp = tpact_core::paction::crossed_product_action(&tpa)?;
                let mut s = String::new();
                s.push_str("# crossed product of a twisted partial action\n");
                for (p, &(x, a)) in cp.pairs.iter().enumerate() {
                    s.push_str(&format!("# element {p} = {a} delta_{x}\n"));
                }
                let itoks: Vec<String> = cp.ext.i.iter().map(|v| v.to_string()).collect();
                let jtoks: Vec<String> = cp.ext.j.iter().map(|v| v.to_string()).collect();
                s.push_str(&format!("# i: {}\n# j: {}\n", itoks.join(" "), jtoks.join(" ")));
                s.push_str(&io::write_sgp(cp.u.base()));
                Ok(s)
            }
            "tsm" => {
                let m = io::parse_tsm(&text)?;
                let cp = tpact_core::tmodule::crossed_product_module(&m)?;
                let mut s = String::new();
                s.push_str("# crossed product of a twisted module\n");
                for (p, &(sx, a)) in cp.pairs.iter().enumerate() {
                    s.push_str(&format!("# element {p} = {a} delta_{sx}\n"));
                }
                let itoks: Vec<String> = cp.ext.i.iter().map(|v| v.to_string()).collect();
                let jtoks: Vec<String> = cp.ext.j.iter().map(|v| v.to_string()).collect();
                s.push_str(&format!("# i: {}\n# j: {}\n", itoks.join(" "), jtoks.join(" ")));
                s.push_str(&io::write_sgp(cp.u.base()));
                Ok(s)
            }
            other => Err(Error::MalformedInput(format!(
                "expected a .tpa or .tsm bundle, got .{other}"
            ))),
        }
    };
    match run() {
        Ok(text) => emit(out, &text),
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(exit_code_for(&e)))
        }
    }
}

fn cmd_convert(args: &ConvertArgs) -> Result<(), ExitCode> {
    let run = || -> tpact_core::Result<String> {
        if let Some(path) = &args.target.to_module {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::MalformedInput(format!("cannot read input: {e}")))?;
            let tpa = io::parse_tpa(&text)?;
            let lft = lambda_from_theta(&tpa)?;
            let mut out = String::new();
            out.push_str("# module presentation over S = E(A) x_theta G\n");
            for (p, &(x, ei)) in lft.s_pairs.iter().enumerate() {
                out.push_str(&format!(
                    "# nu: S element {p} = {} delta_{x}\n",
                    lft.embed[ei]
                ));
            }
            out.push_str(&io::write_tsm(&lft.module));
            Ok(out)
        } else {
            let path = args.target.to_action.as_ref().expect("clap group");
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::MalformedInput(format!("cannot read input: {e}")))?;
            let m = io::parse_tsm(&text)?;
            let built = theta_from_lambda(&m)?;
            let mut out = String::new();
            out.push_str("# action presentation over the maximum group image\n");
            for sx in m.s.elements() {
                out.push_str(&format!(
                    "# nu: S element {sx} lies in class {}\n",
                    built.sigma_nat.apply(sx)
                ));
            }
            out.push_str(&io::write_tpa(&built.tpa));
            Ok(out)
        }
    };
    match run() {
        Ok(text) => emit(&args.out, &text),
        Err(e) => {
            eprintln!("error: {e}");
            Err(ExitCode::from(exit_code_for(&e)))
        }
    }
}

fn run_file_checks(path: &Path, caps: &Caps) -> Result<Vec<battery::Check>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedInput(format!("cannot read {}: {e}", path.display())))?;
    let tag = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("input")
        .to_string();
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let mut checks = Vec::new();
    match ext {
        "sgp" => {
            let table = io::parse_sgp(&text)?;
            checks.extend(battery::semigroup_checks(&tag, &table));
            checks.extend(battery::clifford_checks(&tag, &table, caps));
        }
        "tsm" => match io::parse_tsm(&text) {
            Ok(m) => {
                checks.push(check_named(&format!("{tag}/axioms"), None));
                checks.extend(battery::module_checks(&tag, &m));
            }
            Err(e @ Error::MalformedInput(_)) => return Err(e),
            Err(e) => checks.push(check_named(&format!("{tag}/axioms"), Some(e.to_string()))),
        },
        "tpa" => match io::parse_tpa(&text) {
            Ok(tpa) => {
                checks.push(check_named(&format!("{tag}/axioms"), None));
                checks.extend(battery::action_checks(&tag, &tpa, caps));
            }
            Err(e @ Error::MalformedInput(_)) => return Err(e),
            Err(e) => checks.push(check_named(&format!("{tag}/axioms"), Some(e.to_string()))),
        },
        "ext" => match io::parse_ext(&text)? {
            io::ExtBundle::ByS(ext) => checks.extend(battery::ext_s_checks(&tag, &ext, caps)),
            io::ExtBundle::ByG(ext) => checks.extend(battery::ext_g_checks(&tag, &ext, caps)),
        },
        other => {
            return Err(Error::MalformedInput(format!(
                "unrecognized bundle extension .{other}"
            )))
        }
    }
    Ok(checks)
}

fn check_named(name: &str, witness: Option<String>) -> battery::Check {
    battery::Check {
        name: name.to_string(),
        witness,
    }
}

fn cmd_verify(
    suite: bool,
    paths: &[PathBuf],
    seed: u64,
    caps: &Caps,
    quiet: bool,
) -> Result<(), ExitCode> {
    if !suite && paths.is_empty() {
        eprintln!("usage error: pass bundle paths or --suite");
        return Err(ExitCode::from(2));
    }
    let mut checks: Vec<battery::Check> = Vec::new();
    if suite {
        let instances = tpact_core::suite::generate_suite(seed, 200, caps).map_err(|e| {
            eprintln!("error: {e}");
            ExitCode::from(1)
        })?;
        for (k, tpa) in instances.iter().enumerate() {
            checks.extend(battery::action_checks(&format!("suite[{k}]"), tpa, caps));
        }
        checks.extend(battery::iend_iui_checks(caps));
        checks.extend(battery::equivalence_preservation_checks(caps));
        checks.extend(battery::classical_sanity_checks());
    }
    for path in paths {
        match run_file_checks(path, caps) {
            Ok(cs) => checks.extend(cs),
            Err(e) => {
                eprintln!("error: {e}");
                return Err(ExitCode::from(exit_code_for(&e)));
            }
        }
    }
    let mut failed = 0usize;
    for check in &checks {
        if !check.passed() {
            failed += 1;
        }
        if !quiet || !check.passed() {
            println!("{}", check.render());
        }
    }
    println!("{} checks, {} failed", checks.len(), failed);
    if failed > 0 {
        Err(ExitCode::from(1))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = Caps {
        max_iso: cli.max_iso,
        max_witness: cli.max_witness,
        max_mult: cli.max_mult,
        ..Caps::default()
    };
    let result = match &cli.command {
        Command::Inspect { path } => cmd_inspect(path, cli.quiet),
        Command::Crossed { path, out } => cmd_crossed(path, out),
        Command::Convert(args) => cmd_convert(args),
        Command::Verify { suite, paths } => {
            cmd_verify(*suite, paths, cli.seed, &caps, cli.quiet)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
