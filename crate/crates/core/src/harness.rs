//! Command-line entry points. Each command builds a report in memory and
//! returns it with an exit code; the binary only prints or writes it.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cs::{cs_generating_matrices, dual_code, verify_dual_properties, CSParams, CodeSpace};
use crate::error::{Error, Result};
use crate::field::{set_enumeration_limit, PrimeBase};
use crate::haar::{besov_quasi_norm, default_cap, parseval_l2, BesovParams, Sum};
use crate::net::{char_sum, dual_set, generate_points, is_net, BAdic, GeneratingMatrices, NetCheck, NetFile, PointSet};
use crate::norms::{coeff_bound_audit, scaling_table, warnock_l2_squared, NetFamily};
use crate::walsh::{fine_price_coeff, fine_price_direct, residual_check, theta};

#[derive(Parser, Debug)]
#[command(name = "qmcnet", version, about = "Digital nets, Haar/Walsh spectra and discrepancy norms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel stages; defaults to all cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Netfile,
}

/// Where the point set comes from: a netfile, a matrix file, or CS parameters.
#[derive(Args, Debug, Clone, Default)]
pub struct NetSource {
    /// Netfile to read.
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub base: Option<u64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub w: Option<usize>,
    /// JSON generating matrices `{"b":..,"n":..,"d":..,"matrices":[..]}`.
    #[arg(long)]
    pub matrices: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct NormArgs {
    #[arg(long, default_value = "2")]
    pub p: String,
    #[arg(long, default_value = "2")]
    pub q: String,
    #[arg(long, default_value_t = 0.25)]
    pub r: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a netfile (or JSON point list) for CS parameters or matrices.
    Generate(NetSource),
    /// Net property, dual-code weights and character sums.
    Verify {
        #[command(flatten)]
        source: NetSource,
        /// Random frequencies for the character-sum spot check.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Besov quasi-norm report, optionally cross-checked against Warnock.
    Norm {
        #[command(flatten)]
        source: NetSource,
        #[command(flatten)]
        params: NormArgs,
        #[arg(long)]
        cap: Option<u32>,
        /// Compare the Parseval sum with the exact L2 discrepancy.
        #[arg(long)]
        warnock: bool,
    },
    /// QMC integration error for closed-form integrands.
    Integrate {
        #[command(flatten)]
        source: NetSource,
        /// `family:params`, e.g. `product_monomial:1,2`, `product_cosine:1.5`,
        /// `tensor_spline:0.25,3`. Omit for the default sweep.
        #[arg(long)]
        integrand: Vec<String>,
    },
    /// Empirical constants of the Haar coefficient bounds.
    Audit {
        #[command(flatten)]
        source: NetSource,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Norms over a family of nets of growing size.
    Scaling {
        #[arg(long, value_enum, default_value_t = FamilyKind::Binary)]
        family: FamilyKind,
        #[arg(long, default_value_t = 11)]
        base: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Comma list or inclusive range `lo..hi` of `n` values.
        #[arg(long, default_value = "4..14")]
        sizes: String,
        #[command(flatten)]
        params: NormArgs,
    },
    /// Fine–Price, Theta and residual checks.
    WalshCheck {
        #[command(flatten)]
        source: NetSource,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Binary,
    Cs,
}

/// Rendered report plus process exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, exit: 0 }
    }
}

const CS_COMMENT: &str = "cs_params ";
const MATRICES_COMMENT: &str = "matrices ";

/// A resolved point set and whatever generated it.
pub struct Resolved {
    pub points: PointSet,
    pub matrices: Option<GeneratingMatrices>,
    pub cs: Option<CSParams>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

impl NetSource {
    pub fn resolve(&self) -> Result<Resolved> {
        if let Some(path) = &self.input {
            let file = NetFile::parse(&read(path)?)?;
            let mut cs = None;
            let mut matrices = None;
            for c in &file.comments {
                if let Some(js) = c.strip_prefix(CS_COMMENT) {
                    let params = CSParams::from_json(js)?;
                    matrices = Some(cs_generating_matrices(&params)?);
                    cs = Some(params);
                } else if let Some(js) = c.strip_prefix(MATRICES_COMMENT) {
                    matrices = Some(GeneratingMatrices::from_json(js)?);
                }
            }
            if let Some(path) = &self.matrices {
                matrices = Some(GeneratingMatrices::from_json(&read(path)?)?);
            }
            return Ok(Resolved { points: file.points, matrices, cs });
        }
        if let Some(path) = &self.matrices {
            let g = GeneratingMatrices::from_json(&read(path)?)?;
            return Ok(Resolved { points: generate_points(&g)?, matrices: Some(g), cs: None });
        }
        let (Some(b), Some(d)) = (self.base, self.dim) else {
            return Err(Error::InvalidParams("give a netfile, --matrices, or --base and --dim".into()));
        };
        let params = CSParams::new(PrimeBase::new(b)?, d, self.w.unwrap_or(1))?;
        let g = cs_generating_matrices(&params)?;
        Ok(Resolved { points: generate_points(&g)?, matrices: Some(g), cs: Some(params) })
    }
}

fn parse_exponent(s: &str) -> Result<f64> {
    match s {
        "inf" | "infinity" | "Inf" => Ok(f64::INFINITY),
        _ => s.parse().map_err(|_| Error::InvalidParams(format!("bad exponent `{s}`"))),
    }
}

impl NormArgs {
    pub fn besov(&self) -> Result<BesovParams> {
        BesovParams::new(parse_exponent(&self.p)?, parse_exponent(&self.q)?, self.r)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Applies `QMCNET_LIMIT` and the worker count; call once per process.
pub fn configure(cli: &Cli) -> Result<()> {
    if let Ok(v) = std::env::var("QMCNET_LIMIT") {
        let limit = v
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::InvalidParams(format!("QMCNET_LIMIT `{v}` is not an integer")))?;
        set_enumeration_limit(limit);
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::InvalidParams("--workers must be positive".into()));
        }
        // a global pool may already exist when embedded; keep it then
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    Ok(())
}

/// Runs one command without touching stdout or the filesystem outputs.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::Generate(src) => cmd_generate(src, cli.format),
        Command::Verify { source, samples } => cmd_verify(&source.resolve()?, *samples, &mut rng),
        Command::Norm { source, params, cap, warnock } => {
            cmd_norm(&source.resolve()?, &params.besov()?, *cap, *warnock)
        }
        Command::Integrate { source, integrand } => {
            let specs = if integrand.is_empty() {
                default_sweep(source_dim(source)?, &mut rng)
            } else {
                integrand.iter().map(|s| IntegrandSpec::parse(s)).collect::<Result<_>>()?
            };
            cmd_integrate(&source.resolve()?.points, &specs, cli.format.unwrap_or(Format::Csv))
        }
        Command::Audit { source, cap } => {
            let r = source.resolve()?;
            let cap = cap.unwrap_or_else(|| default_cap(&r.points));
            let rep = coeff_bound_audit(&r.points, cap)?;
            Ok(Outcome { exit: if rep.pass { 0 } else { 1 }, text: to_json(&rep) })
        }
        Command::Scaling { family, base, dim, sizes, params } => {
            let fam = match family {
                FamilyKind::Binary => NetFamily::BinaryTwoDim,
                FamilyKind::Cs => NetFamily::ChenSkriganov { base: PrimeBase::new(*base)?, d: *dim },
            };
            let table = scaling_table(&fam, &parse_sizes(sizes)?, &params.besov()?);
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Json => to_json(&json!({ "schema": 1, "kind": "scaling", "table": table })),
                _ => table.to_csv(),
            };
            Ok(Outcome::ok(text))
        }
        Command::WalshCheck { source, samples } => cmd_walsh_check(&source.resolve()?, *samples, &mut rng),
    }
}

fn source_dim(src: &NetSource) -> Result<usize> {
    Ok(match (&src.input, &src.matrices, src.dim) {
        (None, None, Some(d)) => d,
        _ => src.resolve()?.points.d,
    })
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParams(format!("bad size list `{s}`"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn cmd_generate(src: &NetSource, format: Option<Format>) -> Result<Outcome> {
    let r = src.resolve()?;
    if src.input.is_some() {
        return Err(Error::InvalidParams("generate takes --base/--dim/--w or --matrices, not a netfile".into()));
    }
    match format.unwrap_or(Format::Netfile) {
        Format::Netfile => {
            let mut file = NetFile::new(r.points);
            if let Some(cs) = &r.cs {
                file.comments.push(format!("{CS_COMMENT}{}", cs.to_json()));
            } else if let Some(g) = &r.matrices {
                file.comments.push(format!("{MATRICES_COMMENT}{}", g.to_json()));
            }
            Ok(Outcome::ok(file.to_text()))
        }
        Format::Json => {
            let p = &r.points;
            let rows: Vec<&Vec<u64>> = p.points.iter().map(|q| &q.numerators).collect();
            Ok(Outcome::ok(to_json(&json!({
                "schema": 1, "kind": "points", "b": p.base.get(), "n": p.n, "d": p.d, "N": p.len(),
                "cs_params": r.cs, "points": rows,
            }))))
        }
        Format::Csv => Err(Error::InvalidParams("generate writes netfile or json".into())),
    }
}

fn random_frequency(rng: &mut ChaCha8Rng, p: &PointSet) -> Vec<u64> {
    let top = p.denominator();
    (0..p.d).map(|_| rng.gen_range(0..top)).collect()
}

fn cmd_verify(r: &Resolved, samples: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let p = &r.points;
    let mut notices = Vec::new();
    let mut pass = true;
    let net = is_net(p)?;
    let witness = match &net {
        NetCheck::Net => Value::Null,
        NetCheck::NotNet(w) => {
            pass = false;
            json!({ "shape": w.shape, "m": w.m, "count": w.count, "intervals": w.intervals(p.base) })
        }
    };
    let mut regenerated = Value::Null;
    if let Some(g) = &r.matrices {
        let same = generate_points(g).map(|q| q == *p).unwrap_or(false);
        regenerated = json!(same);
        pass &= same;
    }
    let dual_code_stage = match &r.cs {
        Some(params) => {
            let dual = dual_code(&CodeSpace::chen_skriganov(params)?);
            let props = verify_dual_properties(&dual, params.d, params.n())?;
            pass &= props.pass;
            json!({ "kappa_min": props.kappa_min, "delta_min": props.delta_min, "words": props.words,
                    "kappa_required": 2 * params.d + 1, "pass": props.pass })
        }
        None => {
            notices.push("not a Chen-Skriganov net: dual-code stage skipped".to_string());
            Value::Null
        }
    };
    let char_sums = match &r.matrices {
        Some(g) => {
            let dual = dual_set(g)?;
            let mut freqs: Vec<Vec<u64>> = vec![vec![0; p.d]];
            freqs.extend(dual.elements.iter().take(samples / 2).cloned());
            while freqs.len() < samples.max(1) {
                freqs.push(random_frequency(rng, p));
            }
            let mut mismatches = 0usize;
            for t in &freqs {
                let want = if t.iter().all(|&v| v == 0) || dual.contains(t) { p.len() as i64 } else { 0 };
                if char_sum(p, t).exact_integer() != Some(want) {
                    mismatches += 1;
                }
            }
            pass &= mismatches == 0;
            json!({ "checked": freqs.len(), "mismatches": mismatches, "dual_size": dual.len() })
        }
        None => {
            notices.push("no generating matrices: character-sum stage skipped".to_string());
            Value::Null
        }
    };
    let report = json!({
        "schema": 1, "kind": "verify", "pass": pass,
        "b": p.base.get(), "n": p.n, "d": p.d, "N": p.len(),
        "is_net": net.is_net(), "witness": witness, "matches_generator": regenerated,
        "dual_code": dual_code_stage, "char_sums": char_sums, "notices": notices,
    });
    Ok(Outcome { text: to_json(&report), exit: if pass { 0 } else { 1 } })
}

fn cmd_norm(r: &Resolved, bp: &BesovParams, cap: Option<u32>, warnock: bool) -> Result<Outcome> {
    let p = &r.points;
    let cap = cap.unwrap_or_else(|| default_cap(p));
    let besov = besov_quasi_norm(p, bp, cap)?;
    let mut report = json!({ "schema": 1, "kind": "norm", "besov": besov });
    let mut exit = 0;
    if warnock {
        let par = parseval_l2(p, cap)?;
        let w_sq = crate::norms::rational_to_f64(&warnock_l2_squared(p)?);
        let gap = (par.value - w_sq).abs();
        let consistent = gap <= par.tail_bound;
        if !consistent {
            exit = 1;
        }
        report["cross_check"] = json!({
            "parseval": par, "warnock_l2_squared": w_sq, "abs_gap": gap,
            "relative_gap": if w_sq > 0.0 { gap / w_sq } else { gap },
            "within_tail_bound": consistent,
        });
    }
    Ok(Outcome { text: to_json(&report), exit })
}

/// Integrand family with a closed-form integral over `[0,1)^d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum IntegrandSpec {
    /// `prod x_i^{a_i}`; a single exponent applies to every coordinate.
    ProductMonomial { exponents: Vec<u32> },
    /// `prod cos(c pi x_i / 2)`.
    ProductCosine { c: f64 },
    /// `prod (x_i - c)_+^k`.
    TensorSpline { c: f64, k: u32 },
}

impl IntegrandSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("bad integrand `{s}`"));
        let (family, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<&str> = args.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
        match family {
            "product_monomial" => {
                let exponents = nums.iter().map(|t| t.parse().map_err(|_| bad())).collect::<Result<Vec<u32>>>()?;
                Ok(IntegrandSpec::ProductMonomial { exponents: if exponents.is_empty() { vec![1] } else { exponents } })
            }
            "product_cosine" => {
                let c = nums.first().map_or(Ok(1.0), |t| t.parse().map_err(|_| bad()))?;
                Ok(IntegrandSpec::ProductCosine { c })
            }
            "tensor_spline" => {
                let c: f64 = nums.first().map_or(Ok(0.5), |t| t.parse().map_err(|_| bad()))?;
                let k: u32 = nums.get(1).map_or(Ok(1), |t| t.parse().map_err(|_| bad()))?;
                if !(0.0..1.0).contains(&c) {
                    return Err(bad());
                }
                Ok(IntegrandSpec::TensorSpline { c, k })
            }
            _ => Err(bad()),
        }
    }

    fn exponent(exponents: &[u32], i: usize) -> u32 {
        if exponents.len() == 1 {
            exponents[0]
        } else {
            exponents.get(i).copied().unwrap_or(0)
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            IntegrandSpec::ProductMonomial { exponents } => {
                x.iter().enumerate().map(|(i, &v)| v.powi(Self::exponent(exponents, i) as i32)).product()
            }
            IntegrandSpec::ProductCosine { c } => {
                x.iter().map(|&v| (c * std::f64::consts::PI * v / 2.0).cos()).product()
            }
            IntegrandSpec::TensorSpline { c, k } => x.iter().map(|&v| (v - c).max(0.0).powi(*k as i32)).product(),
        }
    }

    pub fn exact(&self, d: usize) -> f64 {
        match self {
            IntegrandSpec::ProductMonomial { exponents } => {
                (0..d).map(|i| 1.0 / (Self::exponent(exponents, i) as f64 + 1.0)).product()
            }
            IntegrandSpec::ProductCosine { c } => {
                let a = c * std::f64::consts::PI / 2.0;
                let one = if a == 0.0 { 1.0 } else { a.sin() / a };
                one.powi(d as i32)
            }
            IntegrandSpec::TensorSpline { c, k } => ((1.0 - c).powi(*k as i32 + 1) / (*k as f64 + 1.0)).powi(d as i32),
        }
    }

    pub fn label(&self) -> String {
        match self {
            IntegrandSpec::ProductMonomial { exponents } => {
                let e: Vec<String> = exponents.iter().map(u32::to_string).collect();
                format!("product_monomial:{}", e.join(","))
            }
            IntegrandSpec::ProductCosine { c } => format!("product_cosine:{c}"),
            IntegrandSpec::TensorSpline { c, k } => format!("tensor_spline:{c},{k}"),
        }
    }
}

/// Fixed monomial and cosine sweeps plus seeded random spline knots.
pub fn default_sweep(_d: usize, rng: &mut ChaCha8Rng) -> Vec<IntegrandSpec> {
    let mut out: Vec<IntegrandSpec> =
        (0..4).map(|a| IntegrandSpec::ProductMonomial { exponents: vec![a] }).collect();
    out.extend([0.5, 1.0, 1.5, 2.0, 3.0, 4.0].map(|c| IntegrandSpec::ProductCosine { c }));
    for k in 1..=3 {
        // knots on a 1/64 grid keep the labels short and reproducible
        let c = rng.gen_range(0..48) as f64 / 64.0;
        out.push(IntegrandSpec::TensorSpline { c, k });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrationRow {
    pub integrand: String,
    pub exact: f64,
    pub estimate: f64,
    pub abs_error: f64,
}

/// `|exact - (1/N) sum f(x)|` for each integrand.
pub fn integration_errors(p: &PointSet, specs: &[IntegrandSpec]) -> Vec<IntegrationRow> {
    let coords = p.to_f64();
    specs
        .iter()
        .map(|spec| {
            let mut s = Sum::default();
            for x in &coords {
                s.add(spec.eval(x));
            }
            let estimate = s.value() / p.len() as f64;
            let exact = spec.exact(p.d);
            IntegrationRow { integrand: spec.label(), exact, estimate, abs_error: (exact - estimate).abs() }
        })
        .collect()
}

fn cmd_integrate(p: &PointSet, specs: &[IntegrandSpec], format: Format) -> Result<Outcome> {
    let rows = integration_errors(p, specs);
    let text = match format {
        Format::Json => to_json(&json!({ "schema": 1, "kind": "integrate", "N": p.len(), "d": p.d, "rows": rows })),
        _ => {
            let mut out = String::from("integrand,exact,estimate,abs_error\n");
            for r in &rows {
                out.push_str(&format!("\"{}\",{:.17e},{:.17e},{:.6e}\n", r.integrand, r.exact, r.estimate, r.abs_error));
            }
            out
        }
    };
    Ok(Outcome::ok(text))
}

fn random_badic(rng: &mut ChaCha8Rng, base: PrimeBase, exp: u32) -> BAdic {
    BAdic { num: rng.gen_range(0..(base.get() as u64).pow(exp)), exp }
}

fn cmd_walsh_check(r: &Resolved, samples: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let p = &r.points;
    let base = p.base;
    let b = base.get() as u64;
    let mut pass = true;
    // Fine-Price closed form against direct cell summation
    let max_t = b.pow(3);
    let mut fp_err = 0.0f64;
    for _ in 0..samples {
        let y = random_badic(rng, base, 3);
        let t = rng.gen_range(0..max_t);
        fp_err = fp_err.max((fine_price_coeff(t, y, base) - fine_price_direct(t, y, base)?).norm());
    }
    pass &= fp_err <= 1e-12;
    let ys: Vec<Vec<BAdic>> = (0..samples).map(|_| (0..p.d).map(|_| random_badic(rng, base, p.n + 1)).collect()).collect();
    let theta_stage = match &r.matrices {
        Some(g) => {
            let dual = dual_set(g)?;
            let mut max_gap = 0.0f64;
            for y in &ys {
                let th = theta(p, &dual, y)?;
                let ds: num_complex::Complex64 = th.dual_sum.into();
                max_gap = max_gap.max((ds - th.definition).norm());
            }
            pass &= max_gap <= 1e-12;
            json!({ "points": ys.len(), "max_abs_gap": max_gap, "dual_size": dual.len() })
        }
        None => Value::Null,
    };
    let residual = residual_check(p, &ys);
    pass &= residual.max_scaled_residual.is_finite();
    let report = json!({
        "schema": 1, "kind": "walsh_check", "pass": pass, "seed_samples": samples,
        "fine_price_max_abs_error": fp_err, "theta": theta_stage, "residual": residual,
    });
    Ok(Outcome { text: to_json(&report), exit: if pass { 0 } else { 1 } })
}

/// Parses arguments, runs, and writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure(&cli).and_then(|_| run(&cli));
    match result {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &out.text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(out.text.as_bytes()).map_err(Error::from)
                }
            };
            match written {
                Ok(()) => out.exit,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
