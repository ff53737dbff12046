//! Command-line frontend: every experiment as a subcommand with
//! reproducible seeds and machine-readable output.
//!
//! Exit codes: 0 success, 1 input/parse error, 2 numerical failure.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use dalab_core::error::Error as CoreError;
use dalab_core::fock::{kernel_vector, FockVector};
use dalab_core::functional::{
    eval_functional, exposed_functional, extremal_subspace, functional_norm_bounds,
    henkin_decay, singular_witness, Functional, FunctionalJson,
};
use dalab_core::multop::{multiplier_norm, norm_gap_report, sup_norm};
use dalab_core::peak::{
    circle_peak, peak_polynomial, peak_verify, supnorm_on_k_powers, CombinationFamily,
    PeakSpec, PeakTarget, PeakVerifyConfig,
};
use dalab_core::poly::{parse_polynomial, PolyJson, Polynomial};
use dalab_core::scalar::C64;
use dalab_core::sphere::SampleConfig;
use serde::Serialize;
use std::io::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "dalab", version, about = "Drury-Arveson multiplier laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Ambient dimension d
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Polynomial in the shared text format
    #[arg(long)]
    poly: Option<String>,
    /// Path to a JSON input (polynomial or functional, per subcommand)
    #[arg(long)]
    json: Option<PathBuf>,
    /// Truncation degree
    #[arg(long, short = 'N')]
    n: Option<usize>,
    /// Largest index of a sweep or witness table
    #[arg(long)]
    n_max: Option<usize>,
    /// Iterative tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Sampling seed
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output format: json or csv
    #[arg(long, default_value = "json")]
    format: String,
    /// Output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplier-norm truncation sweep for a polynomial
    Norm {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Multiplier norm vs supremum norm
    Gap {
        #[command(flatten)]
        common: CommonOpts,
        /// Sphere sample count
        #[arg(long, default_value_t = 20000)]
        samples: usize,
    },
    /// Cesaro means of the balanced shift: norm sweep
    Cesaro {
        #[command(flatten)]
        common: CommonOpts,
        /// Averaging lengths, comma separated
        #[arg(long, default_value = "1,2,4,8,16,32,64")]
        n_list: String,
        /// Truncation factor (basis size = factor * n)
        #[arg(long, default_value_t = 5)]
        factor: usize,
    },
    /// Weight tables, monotonicity and the Stirling-type ratio
    Weights {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 8)]
        k_max: u32,
        #[arg(long, default_value_t = 50)]
        m_max: u32,
        #[arg(long, default_value_t = 20)]
        j_max: u32,
    },
    /// Peak polynomial at a sphere point, with verification
    Peak {
        #[command(flatten)]
        common: CommonOpts,
        /// Target point, comma-separated complex entries (a or a+bi)
        #[arg(long)]
        zeta: String,
        /// Series truncation
        #[arg(long, default_value_t = 30)]
        m: u32,
        /// Exclusion cap radius
        #[arg(long, default_value_t = 0.05)]
        cap: f64,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
    },
    /// Upper bounds || g h_n || descending toward ||g||_K
    Supk {
        #[command(flatten)]
        common: CommonOpts,
        /// The symbol g (text format); defaults to z2
        #[arg(long, default_value = "z2")]
        g: String,
        /// Use Cesaro means instead of raw powers
        #[arg(long)]
        cesaro: bool,
    },
    /// Singularity or Henkin-decay certificate for a functional
    Witness {
        #[command(flatten)]
        common: CommonOpts,
        /// Certificate kind: singular | henkin
        #[arg(long, default_value = "singular")]
        kind: String,
        /// Witness direction for henkin decay (defaults to the first axis)
        #[arg(long)]
        direction: Option<String>,
    },
    /// Extremal subspace and exposed functional for a symbol
    Expose {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Cauchy-kernel approximant battery
    Valskii {
        #[command(flatten)]
        common: CommonOpts,
        /// Dilation radii, comma separated
        #[arg(long, default_value = "0.9,0.99,0.999")]
        r_list: String,
        /// Monte-Carlo validation sample count (0 to skip)
        #[arg(long, default_value_t = 0)]
        mc_samples: usize,
    },
    /// Compression identity and reproducing-property suite
    FockCheck {
        #[command(flatten)]
        common: CommonOpts,
        /// Number of random rational reproducing checks
        #[arg(long, default_value_t = 20)]
        checks: usize,
    },
}

fn main() {
    if let Ok(threads) = std::env::var("DA_LAB_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::exit(0),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = classify(&e);
            std::process::exit(code);
        }
    }
}

/// 1 for input problems, 2 for numerical failures.
fn classify(e: &anyhow::Error) -> i32 {
    if let Some(core) = e.downcast_ref::<CoreError>() {
        return match core {
            CoreError::NonConvergence { .. }
            | CoreError::TailBoundExceeded { .. }
            | CoreError::EmptyGrid
            | CoreError::TruncationTooSmall { .. }
            | CoreError::TruncationOverflow { .. } => 2,
            _ => 1,
        };
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Norm { common } => {
            let p = load_poly(&common)?;
            let n_max = common.n.unwrap_or(p.degree() + 8);
            let est = multiplier_norm(&p, n_max, common.tol)?;
            emit(&common, &est, |w, est| {
                writeln!(w, "N,norm")?;
                for (n, v) in &est.sweep {
                    writeln!(w, "{n},{v}")?;
                }
                Ok(())
            })
        }
        Command::Gap { common, samples } => {
            let p = load_poly(&common)?;
            let n_max = common.n.unwrap_or(p.degree() + 8);
            let cfg = SampleConfig::new(common.d, samples, common.seed);
            let rep = norm_gap_report(&p, n_max, &cfg, common.tol)?;
            emit(&common, &rep, |w, rep| {
                writeln!(w, "mult_norm,sup_norm,ratio,n_samples,degree")?;
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    rep.mult_norm, rep.sup_norm, rep.ratio, rep.n_samples, rep.degree
                )?;
                Ok(())
            })
        }
        Command::Cesaro { common, n_list, factor } => {
            let ns = parse_usize_list(&n_list)?;
            let recs = dalab_core::shift::cesaro_sweep(&ns, factor)?;
            emit(&common, &recs, |w, recs| {
                writeln!(w, "n,truncation,norm")?;
                for r in recs {
                    writeln!(w, "{},{},{}", r.n, r.truncation, r.norm)?;
                }
                Ok(())
            })
        }
        Command::Weights { common, k_max, m_max, j_max } => {
            #[derive(Serialize)]
            struct WeightsReport {
                table: dalab_core::shift::WeightTable,
                monotonicity: dalab_core::shift::MonotonicityReport,
                stirling: dalab_core::shift::StirlingReport,
            }
            let rep = WeightsReport {
                table: dalab_core::shift::weight_table(k_max, m_max.min(12), j_max.min(8)),
                monotonicity: dalab_core::shift::weight_monotonicity_check(k_max, m_max, j_max),
                stirling: dalab_core::shift::stirling_grid(64, 1000),
            };
            emit(&common, &rep, |w, rep| {
                writeln!(w, "k,m,j,sq,value")?;
                for r in &rep.table.rows {
                    writeln!(w, "{},{},{},{},{}", r.k, r.m, r.j, r.sq, r.value)?;
                }
                Ok(())
            })
        }
        Command::Peak { common, zeta, m, cap, samples } => {
            let target = parse_point(&zeta)?;
            let spec = PeakSpec::point(target, m)?;
            let pf = peak_polynomial(&spec)?;
            let mut cfg = PeakVerifyConfig::new(spec.dim(), samples, common.seed);
            cfg.exclusion_radius = cap;
            cfg.tol = common.tol;
            let rep = peak_verify(&pf.poly, &spec, &cfg)?;
            #[derive(Serialize)]
            struct PeakOut {
                on_target_re: f64,
                on_target_im: f64,
                tail_bound: f64,
                report: dalab_core::peak::PeakReport,
                poly: PolyJson,
            }
            let out = PeakOut {
                on_target_re: pf.on_target.re,
                on_target_im: pf.on_target.im,
                tail_bound: spec.tail_bound(),
                report: rep,
                poly: pf.poly.to_json(),
            };
            emit(&common, &out, |w, out| {
                writeln!(w, "on_target_re,on_target_im,max_off_target,margin,mult_norm")?;
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    out.on_target_re,
                    out.on_target_im,
                    out.report.max_off_target,
                    out.report.margin,
                    out.report.mult_norm.value
                )?;
                Ok(())
            })
        }
        Command::Supk { common, g, cesaro } => {
            let d = common.d;
            let gp = parse_polynomial(&g, d)?;
            let f = parse_polynomial("0.5 + 0.5*z1", d)?;
            let n_max = common.n_max.unwrap_or(32);
            let family =
                if cesaro { CombinationFamily::CesaroMeans } else { CombinationFamily::Powers };
            let table = supnorm_on_k_powers(&gp, &f, n_max, family, 8, common.tol)?;
            emit(&common, &table, |w, table| {
                writeln!(w, "n,norm")?;
                for r in table {
                    writeln!(w, "{},{}", r.n, r.norm)?;
                }
                Ok(())
            })
        }
        Command::Witness { common, kind, direction } => {
            let phi = load_functional(&common)?;
            match kind.as_str() {
                "singular" => {
                    let n_max = common.n_max.unwrap_or(20);
                    let trunc = common.n.unwrap_or(10);
                    let rows = singular_witness(&phi, n_max, trunc, common.tol)?;
                    emit(&common, &rows, |w, rows| {
                        writeln!(w, "n,mult_norm,value")?;
                        for r in rows {
                            writeln!(w, "{},{},{}", r.n, r.mult_norm, r.value)?;
                        }
                        Ok(())
                    })
                }
                "henkin" => {
                    let n_max = common.n_max.unwrap_or(20);
                    let dir = match direction {
                        Some(s) => parse_point(&s)?,
                        None => {
                            let mut v = vec![C64::new(0.0, 0.0); phi.dim().max(1)];
                            v[0] = C64::new(1.0, 0.0);
                            v
                        }
                    };
                    let table = henkin_decay(&phi, &dir, n_max)?;
                    emit(&common, &table, |w, table| {
                        writeln!(w, "n,re,im")?;
                        for r in &table.rows {
                            writeln!(w, "{},{},{}", r.n, r.re, r.im)?;
                        }
                        Ok(())
                    })
                }
                other => Err(anyhow!("unknown witness kind {other:?} (singular|henkin)")),
            }
        }
        Command::Expose { common } => {
            let p = load_poly(&common)?;
            let n = common.n.unwrap_or(12);
            let res = extremal_subspace(&p, n, common.tol)?;
            let top = res
                .eigenvectors
                .first()
                .ok_or_else(|| anyhow!("no eigenvector at this truncation"))?;
            let phi = exposed_functional(&p, top)?;
            let value = eval_functional(&phi, &p)?;
            let bounds = functional_norm_bounds(&phi)?;
            #[derive(Serialize)]
            struct ExposeOut {
                truncation: usize,
                top_eigenvalue: f64,
                spectral_gap: f64,
                dim_estimate: usize,
                status: dalab_core::functional::ExtremalStatus,
                value_on_f_re: f64,
                value_on_f_im: f64,
                norm_lower: f64,
                norm_upper: f64,
                functional: FunctionalJson,
            }
            let out = ExposeOut {
                truncation: res.truncation,
                top_eigenvalue: res.top_eigenvalue,
                spectral_gap: res.spectral_gap,
                dim_estimate: res.dim_estimate,
                status: res.status,
                value_on_f_re: value.re,
                value_on_f_im: value.im,
                norm_lower: bounds.0,
                norm_upper: bounds.1,
                functional: phi.to_json(),
            };
            emit(&common, &out, |w, out| {
                writeln!(w, "top_eigenvalue,spectral_gap,dim,value_on_f")?;
                writeln!(
                    w,
                    "{},{},{},{}",
                    out.top_eigenvalue, out.spectral_gap, out.dim_estimate, out.value_on_f_re
                )?;
                Ok(())
            })
        }
        Command::Valskii { common, r_list, mc_samples } => {
            let rs = parse_f64_list(&r_list)?;
            let d = common.d;
            let phi = match (&common.json, &common.poly) {
                (Some(_), _) => load_functional(&common)?,
                _ => {
                    // default battery functional: [1, z1*]
                    let xi = FockVector::from_terms(
                        d,
                        40,
                        [(dalab_core::MultiIndex::zero(d), C64::new(1.0, 0.0))],
                    )?;
                    let eta = FockVector::from_terms(
                        d,
                        40,
                        [(dalab_core::MultiIndex::unit(d, 0), C64::new(1.0, 0.0))],
                    )?;
                    Functional::vector_pair(xi, eta)?
                }
            };
            let battery: Vec<Polynomial<C64>> = match &common.poly {
                Some(text) => vec![parse_polynomial(text, d)?],
                None => ["1", "z1", "z1*z2"]
                    .iter()
                    .map(|t| parse_polynomial(t, d))
                    .collect::<Result<_, _>>()?,
            };
            let n = common.n.unwrap_or(30);
            #[derive(Serialize)]
            struct ValskiiRow {
                f: String,
                r: f64,
                psi_re: f64,
                psi_im: f64,
                phi_re: f64,
                phi_im: f64,
                defect: f64,
                tail_bound: f64,
            }
            #[derive(Serialize)]
            struct ValskiiOut {
                rows: Vec<ValskiiRow>,
                mc: Option<dalab_core::cauchy::McReport>,
            }
            let mut rows = Vec::new();
            for f in &battery {
                let exact = eval_functional(&phi, f)?;
                for &r in &rs {
                    let res = dalab_core::cauchy::valskii_approximant(&phi, r, f, n, 1e-2)?;
                    let defect = (C64::new(res.value.0, res.value.1) - exact).norm();
                    rows.push(ValskiiRow {
                        f: f.to_string(),
                        r,
                        psi_re: res.value.0,
                        psi_im: res.value.1,
                        phi_re: exact.re,
                        phi_im: exact.im,
                        defect,
                        tail_bound: res.tail_bound,
                    });
                }
            }
            let mc = if mc_samples > 0 {
                Some(dalab_core::cauchy::mc_validate(d, 6, mc_samples, common.seed)?)
            } else {
                None
            };
            let out = ValskiiOut { rows, mc };
            emit(&common, &out, |w, out| {
                writeln!(w, "f,r,psi_re,psi_im,phi_re,phi_im,defect,tail_bound")?;
                for r in &out.rows {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{}",
                        r.f, r.r, r.psi_re, r.psi_im, r.phi_re, r.phi_im, r.defect, r.tail_bound
                    )?;
                }
                Ok(())
            })
        }
        Command::FockCheck { common, checks } => {
            let d = common.d;
            let n = common.n.unwrap_or(4);
            let mut compressions = Vec::new();
            for k in 1..=d {
                let rep = dalab_core::fullfock::compression_check(d, k, n)?;
                compressions.push((k, rep.max_deviation, rep.exact));
            }
            let reproducing = reproducing_suite(d, n, checks, common.seed)?;
            #[derive(Serialize)]
            struct FockOut {
                d: usize,
                n: usize,
                compressions: Vec<(usize, f64, bool)>,
                reproducing_checks: usize,
                reproducing_exact: bool,
            }
            let out = FockOut {
                d,
                n,
                compressions,
                reproducing_checks: reproducing,
                reproducing_exact: true,
            };
            emit(&common, &out, |w, out| {
                writeln!(w, "k,max_deviation,exact")?;
                for (k, dev, exact) in &out.compressions {
                    writeln!(w, "{k},{dev},{exact}")?;
                }
                Ok(())
            })
        }
    }
}

/// Random rational polynomials paired against rational kernel vectors;
/// returns the number of exact reproductions, failing on any mismatch.
fn reproducing_suite(d: usize, n: usize, checks: usize, seed: u64) -> anyhow::Result<usize> {
    use dalab_core::scalar::{cq, CQ};
    use dalab_core::{fock, multiindex};
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).max(1);
    let mut next = move || {
        // xorshift: deterministic small-rational generator
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut done = 0usize;
    for _ in 0..checks {
        let mut p: dalab_core::PolynomialQ = dalab_core::poly::Polynomial::zero(d);
        for deg in 0..=n.min(4) {
            let idx = multiindex::enum_multiindices(d, deg)?;
            let pick = (next() as usize) % idx.len();
            let num = (next() % 13) as i64 - 6;
            let den = (next() % 7) as i64 + 1;
            p.set(idx[pick].clone(), cq((num, den), ((next() % 5) as i64 - 2, 3)));
        }
        // rational point with |z|^2 < 1: entries c/(4 d)
        let z: Vec<CQ> = (0..d)
            .map(|_| cq(((next() % 4) as i64 - 2, 4 * d as i64 + 1), ((next() % 3) as i64 - 1, 4 * d as i64 + 2)))
            .collect();
        let k = fock::kernel_vector(&z, n.max(4))?;
        let pv = p.to_fock(n.max(4))?;
        let lhs = pv.inner_product(&k)?;
        let rhs = p.evaluate(&z)?;
        if lhs != rhs {
            return Err(anyhow!("reproducing identity failed"));
        }
        done += 1;
    }
    Ok(done)
}

fn load_poly(common: &CommonOpts) -> anyhow::Result<Polynomial<C64>> {
    if let Some(text) = &common.poly {
        return Ok(parse_polynomial(text, common.d)?);
    }
    if let Some(path) = &common.json {
        let data = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let j: PolyJson = serde_json::from_str(&data)?;
        return Ok(Polynomial::from_json(&j)?);
    }
    Err(anyhow!("provide --poly or --json"))
}

fn load_functional(common: &CommonOpts) -> anyhow::Result<Functional> {
    let path = common.json.as_ref().ok_or_else(|| anyhow!("provide --json with a functional"))?;
    let data =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let j: FunctionalJson = serde_json::from_str(&data)?;
    Ok(Functional::from_json(&j)?)
}

fn parse_point(text: &str) -> anyhow::Result<Vec<C64>> {
    text.split(',').map(|part| parse_complex(part.trim())).collect()
}

/// "a", "a+bi", "a-bi", "bi"
fn parse_complex(s: &str) -> anyhow::Result<C64> {
    if s.is_empty() {
        return Err(anyhow!("empty complex entry"));
    }
    if let Some(stripped) = s.strip_suffix('i') {
        // split the imaginary part off: find the last +/- not at position 0
        let bytes = stripped.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-')
                && bytes[i - 1] != b'e'
                && bytes[i - 1] != b'E'
            {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = stripped[..i].parse()?;
                let im_str = &stripped[i..];
                let im: f64 = if im_str == "+" || im_str == "-" {
                    format!("{im_str}1").parse()?
                } else {
                    im_str.parse()?
                };
                Ok(C64::new(re, im))
            }
            None => {
                let im: f64 =
                    if stripped.is_empty() || stripped == "-" || stripped == "+" {
                        format!("{stripped}1").parse()?
                    } else {
                        stripped.parse()?
                    };
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        Ok(C64::new(s.parse()?, 0.0))
    }
}

fn parse_usize_list(text: &str) -> anyhow::Result<Vec<usize>> {
    text.split(',').map(|s| s.trim().parse::<usize>().map_err(Into::into)).collect()
}

fn parse_f64_list(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',').map(|s| s.trim().parse::<f64>().map_err(Into::into)).collect()
}

/// Serialize a report as pretty JSON or via the per-command CSV writer.
fn emit<T: Serialize>(
    common: &CommonOpts,
    value: &T,
    csv: impl Fn(&mut dyn std::io::Write, &T) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    match common.format.as_str() {
        "json" => {
            serde_json::to_writer_pretty(&mut buf, value)?;
            buf.push(b'\n');
        }
        "csv" => csv(&mut buf, value)?,
        other => return Err(anyhow!("unknown format {other:?} (json|csv)")),
    }
    match &common.out {
        Some(path) => std::fs::write(path, &buf)
            .with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}
