//! Command-line surface.
//!
//! Exit codes: 0 on success, 1 for usage, I/O and parse problems, 2 for
//! domain failures (non-decomposable input, failed residual gate,
//! singular generators). The environment variable `LA_TOL` overrides the
//! decomposition residual gate and the default exceptional-point
//! classification threshold.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{commutator, HermitianAxis, Norm, Operator2};
use crate::decompose::{decompose_full, fermionic_pair, reassemble, roundtrip_residual};
use crate::dynamics::{classify_ep, cubic_eigenvalues, ep_map, evolve, stationary_state};
use crate::gkls::{bloch_generator, liouvillian_matrix, GklsSystem};
use crate::io::{
    parse_system, to_json_string, write_cusps_csv, write_epmap_csv, write_trajectory_csv,
    DecomposeOutput, SpectrumOutput, SteadyOutput,
};
use crate::par::map_indexed;
use crate::sample;
use crate::thermo::gibbs_fit;
use crate::tol;

#[derive(Parser)]
#[command(
    name = "la",
    version,
    about = "Two-level GKLS systems in physical form: decomposition, dynamics, spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a system into exchange + dephasing form.
    Decompose {
        /// System JSON file.
        #[arg(long)]
        system: PathBuf,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagate the Bloch vector and emit a CSV trajectory.
    ///
    /// Components are taken in the fixed full-normalized Pauli basis
    /// (σx, σy, σz), i.e. r_i = Tr(ρ σ_i)/2.
    Evolve {
        #[arg(long)]
        system: PathBuf,
        /// Final time.
        #[arg(long)]
        t: f64,
        /// Number of uniform steps.
        #[arg(long)]
        steps: usize,
        /// Initial components "r1,r2,r3" (defaults to the mixed state).
        #[arg(long)]
        r0: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stationary state in the system's own decomposition frame
    /// (components along N, D and i[N, D], half-normalized).
    Steady {
        #[arg(long)]
        system: PathBuf,
        /// Also fit the generalized Gibbs exponent.
        #[arg(long)]
        gibbs_fit: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form spectrum at one (E/γ, ε/γ) point.
    Spectrum {
        #[arg(long)]
        e: f64,
        #[arg(long)]
        eps: f64,
        /// Exceptional-point classification threshold.
        #[arg(long)]
        tol_ep: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discriminant map over a parameter grid, with located cusps.
    Epmap {
        #[arg(long, default_value_t = -0.3)]
        e_min: f64,
        #[arg(long, default_value_t = 0.3)]
        e_max: f64,
        #[arg(long, default_value_t = -0.5)]
        eps_min: f64,
        #[arg(long, default_value_t = 0.5)]
        eps_max: f64,
        /// Grid size per axis.
        #[arg(long, default_value_t = 201)]
        n: usize,
        #[arg(long, default_value = "epmap.csv")]
        out: PathBuf,
        #[arg(long, default_value = "cusps.csv")]
        cusps_out: PathBuf,
    },
    /// Seeded batch self-check: round trips, fermionic algebra,
    /// transform invariance.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    let la_tol = match std::env::var("LA_TOL") {
        Ok(s) => match s.parse::<f64>() {
            Ok(v) if v > 0.0 => Some(v),
            _ => {
                eprintln!("LA_TOL must be a positive number, got {s:?}");
                return 1;
            }
        },
        Err(_) => None,
    };

    match cli.command {
        Command::Decompose { system, out } => cmd_decompose(&system, out.as_deref(), la_tol),
        Command::Evolve {
            system,
            t,
            steps,
            r0,
            out,
        } => cmd_evolve(&system, t, steps, r0.as_deref(), out.as_deref()),
        Command::Steady {
            system,
            gibbs_fit,
            out,
        } => cmd_steady(&system, gibbs_fit, out.as_deref()),
        Command::Spectrum {
            e,
            eps,
            tol_ep,
            out,
        } => cmd_spectrum(e, eps, tol_ep.or(la_tol), out.as_deref()),
        Command::Epmap {
            e_min,
            e_max,
            eps_min,
            eps_max,
            n,
            out,
            cusps_out,
        } => cmd_epmap((e_min, e_max), (eps_min, eps_max), n, &out, &cusps_out),
        Command::Verify { seed, count } => cmd_verify(seed, count),
    }
}

fn read_system(path: &Path) -> Result<GklsSystem, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("cannot read {}: {e}", path.display());
        1
    })?;
    parse_system(&text).map_err(|e| {
        eprintln!("cannot parse {}: {e}", path.display());
        1
    })
}

fn emit(out: Option<&Path>, content: &str) -> i32 {
    match out {
        None => {
            println!("{content}");
            0
        }
        Some(path) => match fs::write(path, format!("{content}\n")) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("cannot write {}: {e}", path.display());
                1
            }
        },
    }
}

fn cmd_decompose(system: &Path, out: Option<&Path>, la_tol: Option<f64>) -> i32 {
    let sys = match read_system(system) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let (pf, _) = match decompose_full(&sys) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    let residual = roundtrip_residual(&sys, &pf);
    let output = DecomposeOutput::new(&pf, residual);
    let json = to_json_string(&output).expect("serializable");
    let code = emit(out, &json);
    if code != 0 {
        return code;
    }
    let gate = la_tol.unwrap_or(tol::ROUNDTRIP);
    if residual < gate {
        0
    } else {
        eprintln!("round-trip residual {residual:.3e} exceeds {gate:.3e}");
        2
    }
}

fn parse_r0(text: &str) -> Result<Vector3<f64>, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!(
            "expected three comma-separated values, got {text:?}"
        ));
    }
    let mut v = Vector3::zeros();
    for (i, p) in parts.iter().enumerate() {
        v[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad component {p:?}: {e}"))?;
    }
    Ok(v)
}

fn cmd_evolve(system: &Path, t: f64, steps: usize, r0: Option<&str>, out: Option<&Path>) -> i32 {
    if t.is_nan() || t <= 0.0 || steps == 0 {
        eprintln!("need --t > 0 and --steps >= 1");
        return 1;
    }
    let r0 = match r0.map(parse_r0).transpose() {
        Ok(v) => v.unwrap_or_else(Vector3::zeros),
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    let sys = match read_system(system) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let basis = [
        HermitianAxis::new(Vector3::x(), Norm::Full).unwrap(),
        HermitianAxis::new(Vector3::y(), Norm::Full).unwrap(),
        HermitianAxis::new(Vector3::z(), Norm::Full).unwrap(),
    ];
    let gen = bloch_generator(&sys, &basis).expect("fixed Pauli basis is orthonormal");
    let traj = evolve(&gen, r0, t, steps);

    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &traj).expect("in-memory write");
    let content = String::from_utf8(buf).expect("CSV is UTF-8");
    emit(out, content.trim_end())
}

fn cmd_steady(system: &Path, with_fit: bool, out: Option<&Path>) -> i32 {
    let sys = match read_system(system) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let (pf, basis) = match decompose_full(&sys) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    // reporting frame (N, D, i[N, D]); i[N, D] has Pauli vector -2 n x d
    let n = pf.n;
    let d = basis.a1.with_norm(Norm::Half);
    let t_vec = -2.0 * n.vector().cross(&d.vector());
    let frame = [
        n,
        d,
        HermitianAxis::new(t_vec, Norm::Half).expect("orthogonal half axes"),
    ];
    let gen = bloch_generator(&sys, &frame).expect("decomposition frame is orthogonal");
    let r = match stationary_state(&gen) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };

    let mut output = SteadyOutput {
        r: [r.x, r.y, r.z],
        beta: None,
        mu: None,
        lambda: None,
        residual: None,
    };
    if with_fit {
        let rho = gen.state(&r);
        match gibbs_fit(&rho, &pf.h_eff, &pf.n.operator()) {
            Ok(fit) => {
                output.beta = Some(fit.beta);
                output.mu = Some(fit.mu);
                output.lambda = Some(fit.lam);
                output.residual = Some(fit.residual);
            }
            Err(e) => {
                eprintln!("{e}");
                return 2;
            }
        }
    }
    emit(out, &to_json_string(&output).expect("serializable"))
}

fn cmd_spectrum(e: f64, eps: f64, tol_ep: Option<f64>, out: Option<&Path>) -> i32 {
    if let Some(t) = tol_ep {
        if t.is_nan() || t <= 0.0 {
            eprintln!("--tol-ep must be positive");
            return 1;
        }
    }
    let s = cubic_eigenvalues(e, eps);
    let ep = classify_ep(&s, tol_ep.unwrap_or(tol::EP));
    emit(
        out,
        &to_json_string(&SpectrumOutput::new(&s, ep)).expect("serializable"),
    )
}

fn cmd_epmap(
    e_range: (f64, f64),
    eps_range: (f64, f64),
    n: usize,
    out: &Path,
    cusps_out: &Path,
) -> i32 {
    let ordered = |r: (f64, f64)| r.1 > r.0;
    if n < 2 || !ordered(e_range) || !ordered(eps_range) {
        eprintln!("need --n >= 2 and non-empty ranges");
        return 1;
    }
    let map = ep_map(e_range, eps_range, n, n);
    let write = |path: &Path, f: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> i32 {
        let mut buf = Vec::new();
        f(&mut buf).expect("in-memory write");
        match fs::File::create(path).and_then(|mut fh| fh.write_all(&buf)) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("cannot write {}: {e}", path.display());
                1
            }
        }
    };
    let code = write(out, &|buf| write_epmap_csv(buf, &map));
    if code != 0 {
        return code;
    }
    write(cusps_out, &|buf| write_cusps_csv(buf, &map.cusps))
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

struct VerifyCase {
    roundtrip: f64,
    fermionic: f64,
    invariance: f64,
}

fn verify_case(seed: u64, index: usize) -> VerifyCase {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(index as u64)));
    let base = sample::random_decomposable_system(&mut rng);
    let sys = sample::random_dressing(&mut rng, &base);

    let (pf, basis) = decompose_full(&sys).expect("sampled systems are decomposable");
    let roundtrip = reassemble(&pf).max_abs_diff(&liouvillian_matrix(&sys));

    let pair = fermionic_pair(&basis);
    let mut fermionic = (pair.sp * pair.sp).max_abs();
    fermionic =
        fermionic.max((pair.sp * pair.sm + pair.sm * pair.sp).max_abs_diff(&Operator2::IDENTITY));
    fermionic = fermionic.max(commutator(&pair.sp, &pair.sm).max_abs_diff(&basis.a3.operator()));

    let dressed = sample::random_dressing(&mut rng, &sys);
    let invariance = liouvillian_matrix(&dressed).max_abs_diff(&liouvillian_matrix(&sys));

    VerifyCase {
        roundtrip,
        fermionic,
        invariance,
    }
}

fn cmd_verify(seed: u64, count: usize) -> i32 {
    if count == 0 {
        eprintln!("--count must be >= 1");
        return 1;
    }
    let cases = map_indexed(count, |i| verify_case(seed, i));

    type Extract = fn(&VerifyCase) -> f64;
    let checks: [(&str, f64, Extract); 3] = [
        ("roundtrip", 1e-10, |c| c.roundtrip),
        ("fermionic algebra", 1e-12, |c| c.fermionic),
        ("transform invariance", 1e-12, |c| c.invariance),
    ];

    let mut passed = 0usize;
    let total = count * checks.len();
    for (name, bound, get) in &checks {
        let ok = cases.iter().filter(|c| get(c) < *bound).count();
        let worst = cases.iter().map(*get).fold(0.0f64, f64::max);
        println!("{name}: {ok}/{count} within {bound:.0e} (max {worst:.3e})");
        passed += ok;
    }
    println!("passed {passed}/{total}");
    if passed == total {
        0
    } else {
        2
    }
}
