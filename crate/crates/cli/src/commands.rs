use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use slicerank::exec::Exec;
use slicerank::fftensor::{group_tensor, PrimeField, Tensor3};
use slicerank::groups::GroupSpec;
use slicerank::rates::{
    constants, hoeffding_bound, parse_rational, rate_i, rate_j, tuple_fraction_exact, RateQuery, TupleFraction,
    DEFAULT_COUNT_GUARD,
};
use slicerank::slicerank::{
    search_instability_certificate, slice_rank_witness, triangle_decomposition_cyclic, triangle_decomposition_poly,
    triangle_to_slice_power_bound, verify_instability_certificate, verify_slice_decomposition,
    verify_triangle_decomposition, InstabilityCertificate, InstabilityReport, OracleLimits, SearchLimits,
    SliceDecomposition, TriangleDecomposition, TriangleSliceBound,
};
use slicerank::stpp::uniform::SpotCheck;
use slicerank::stpp::{
    border_from_stpp, omega_bound, omega_from_products, omega_report, packing_report, unborder, uniformize,
    verify_stpp, OmegaReport, STPPConstruction, SymbolicSTPP, DEFAULT_DISTRIBUTION_GUARD, DEFAULT_UNBORDER_GUARD,
};
use slicerank::sumfree::{
    max_sumfree_exhaustive, theorem_bound, verify_border, verify_sumfree, BorderSumFreeSet, ExhaustiveLimits,
    ExhaustiveResult, TricoloredSumFreeSet,
};

use crate::{Cli, Command};

pub enum Outcome {
    Ok,
    Failed,
}

/// Entry cap for dense tensors.
const DEFAULT_TENSOR_CAP: u128 = 1 << 24;

/// `SLICERANK_GUARD` replaces every size guard when set.
fn guard(default: u128) -> Result<u128> {
    match std::env::var("SLICERANK_GUARD") {
        Ok(v) => v.trim().parse().with_context(|| format!("SLICERANK_GUARD={v:?} is not a nonnegative integer")),
        Err(_) => Ok(default),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

struct Sink<'a> {
    out: Option<&'a Path>,
}

impl Sink<'_> {
    fn text(&self, s: &str) -> Result<()> {
        match self.out {
            Some(p) => fs::write(p, s).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(s.as_bytes())?;
                Ok(stdout.flush()?)
            }
        }
    }

    fn json<T: Serialize>(&self, v: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.text(&s)
    }
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Outcome::Ok
    } else {
        Outcome::Failed
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',').map(|x| x.trim().parse().map_err(|_| anyhow!("bad {what} value {x:?}"))).collect()
}

fn rational(s: &str) -> Result<BigRational> {
    parse_rational(s).ok_or_else(|| anyhow!("not a rational: {s:?}"))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let exec = match cli.threads {
        Some(0) => bail!("--threads must be positive"),
        Some(1) => Exec::Sequential,
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Exec::Sequential,
        None => Exec::default(),
    };
    let sink = Sink { out: cli.out.as_deref() };
    let seed = cli.seed;
    match &cli.command {
        Command::Bound(a) => sink.json(&theorem_bound(&GroupSpec::parse(&a.group)?))?,
        Command::Constants => sink.json(&constants())?,
        Command::Rates(a) => sink.text(&rates_csv(&parse_list(&a.m, "m")?, &a.alpha, a.n)?)?,
        Command::SumfreeVerify(a) => return sumfree_verify(&sink, &a.input, a.border),
        Command::SumfreeSearch(a) => {
            let g = GroupSpec::parse(&a.group)?;
            let limits = ExhaustiveLimits { max_order: guard(a.max_order as u128)? as u64, exec };
            sink.json(&max_sumfree_exhaustive(&g, &limits)?)?
        }
        Command::StppVerify(a) => {
            let report = verify_stpp(&read_json::<STPPConstruction>(&a.input)?)?;
            sink.json(&report)?;
            return Ok(verdict(report.valid));
        }
        Command::Packing(a) => {
            let c: STPPConstruction = read_json(&a.input)?;
            let report = packing_report(&c).ok_or_else(|| anyhow!("packing exponents are undefined when |H| = 1"))?;
            sink.json(&report)?
        }
        Command::Omega(a) => {
            let report = match (&a.input, &a.sizes, a.order) {
                (Some(p), _, _) => omega_report(&read_json(p)?)?,
                (None, Some(s), Some(order)) => omega_from_sizes(s, order)?,
                _ => bail!("pass either --input or both --sizes and --order"),
            };
            if a.table {
                sink.text(&omega_table(&report))?
            } else {
                sink.json(&report)?
            }
        }
        Command::Border(a) => sink.json(&border_from_stpp(&read_json(&a.input)?)?)?,
        Command::Unborder(a) => {
            let b: BorderSumFreeSet = read_json(&a.input)?;
            sink.json(&unborder(&b, a.power, guard(DEFAULT_UNBORDER_GUARD)?)?)?
        }
        Command::Uniformize(a) => {
            let c: STPPConstruction = read_json(&a.input)?;
            let symbolic = uniformize(&c, a.power, guard(DEFAULT_DISTRIBUTION_GUARD)?)?;
            let spot_check = symbolic.spot_check(a.spot_checks, &mut ChaCha8Rng::seed_from_u64(seed));
            let ok = spot_check.violations == 0;
            sink.json(&UniformizeOutput { symbolic, spot_check })?;
            return Ok(verdict(ok));
        }
        Command::Tensor(a) => {
            let t = match (&a.group, a.diagonal) {
                (Some(g), _) => group_tensor(&GroupSpec::parse(g)?, a.p, guard(DEFAULT_TENSOR_CAP)?)?,
                (None, Some(n)) => {
                    let cap = guard(DEFAULT_TENSOR_CAP)?;
                    if (n as u128).checked_pow(3).is_none_or(|e| e > cap) {
                        bail!("a {n}x{n}x{n} tensor exceeds the entry guard {cap}");
                    }
                    Tensor3::diagonal(PrimeField::new(a.p)?, n)
                }
                (None, None) => bail!("pass --group or --diagonal"),
            };
            sink.json(&t)?
        }
        Command::Slicerank(a) => {
            let t: Tensor3 = read_json(&a.input)?;
            let w = slice_rank_witness(&t, &OracleLimits { exec, ..Default::default() })?;
            let verified = verify_slice_decomposition(&t, &w.decomposition)?;
            sink.json(&SliceRankOutput { rank: w.rank, verified, vx: w.vx, vy: w.vy, decomposition: w.decomposition })?;
            return Ok(verdict(verified));
        }
        Command::Triangle(a) => {
            let (td, t) = match (a.q, &a.poly, a.p) {
                (Some(q), _, _) => {
                    let td = triangle_decomposition_cyclic(q)?;
                    let t = group_tensor(&GroupSpec::cyclic_power(q, 1)?, td.p, u128::MAX)?;
                    (td, t)
                }
                (None, Some(vals), Some(p)) => {
                    let vals: Vec<u64> = parse_list(vals, "polynomial")?;
                    let td = triangle_decomposition_poly(&vals, p)?;
                    let fld = PrimeField::new(p)?;
                    let n = p as usize;
                    let t = Tensor3::from_fn(fld, [n, n, n], |x, y, z| fld.reduce(vals[(x + y + z) % n]));
                    (td, t)
                }
                _ => bail!("pass --q, or --poly together with --p"),
            };
            let verified = verify_triangle_decomposition(&t, &td)?;
            sink.json(&TriangleOutput { rank_bound: td.k, verified, decomposition: td })?;
            return Ok(verdict(verified));
        }
        Command::Instability(a) => {
            let t: Tensor3 = read_json(&a.input)?;
            return match &a.certificate {
                Some(path) => {
                    let c: InstabilityCertificate = read_json(path)?;
                    let report = verify_instability_certificate(&t, &c)?;
                    let ok = report.is_valid();
                    sink.json(&report)?;
                    Ok(verdict(ok))
                }
                None => {
                    let limits = SearchLimits { max_weight: a.max_weight, exec, ..Default::default() };
                    let certificate = search_instability_certificate(&t, &limits)?;
                    let report = certificate.as_ref().map(|c| verify_instability_certificate(&t, c)).transpose()?;
                    sink.json(&SearchOutput { found: certificate.is_some(), certificate, report })?;
                    Ok(Outcome::Ok)
                }
            };
        }
        Command::Count(a) => sink.json(&count(a.m, &a.alpha, a.n)?)?,
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct UniformizeOutput {
    #[serde(flatten)]
    symbolic: SymbolicSTPP,
    spot_check: SpotCheck,
}

#[derive(Serialize)]
struct SliceRankOutput {
    rank: usize,
    verified: bool,
    vx: Vec<Vec<u64>>,
    vy: Vec<Vec<u64>>,
    decomposition: SliceDecomposition,
}

#[derive(Serialize)]
struct TriangleOutput {
    rank_bound: usize,
    verified: bool,
    decomposition: TriangleDecomposition,
}

#[derive(Serialize)]
struct SearchOutput {
    found: bool,
    certificate: Option<InstabilityCertificate>,
    report: Option<InstabilityReport>,
}

#[derive(Serialize)]
struct CountOutput {
    m: u64,
    alpha: String,
    n: u32,
    #[serde(flatten)]
    exact: TupleFraction,
    rate_bound: f64,
    hoeffding_bound: f64,
    /// Present for α = 1/3, where the count is the triangle-to-slice bound.
    slice_bound: Option<TriangleSliceBound>,
}

/// Accepts a plain set, a border set (with `--border`) or a search result.
#[derive(Deserialize)]
#[serde(untagged)]
enum SumFreeInput {
    Search(ExhaustiveResult),
    Plain(TricoloredSumFreeSet),
}

fn sumfree_verify(sink: &Sink, path: &Path, border: bool) -> Result<Outcome> {
    let report = if border {
        verify_border(&read_json::<BorderSumFreeSet>(path)?)?
    } else {
        match read_json::<SumFreeInput>(path)? {
            SumFreeInput::Search(r) => verify_sumfree(&r.witness)?,
            SumFreeInput::Plain(s) => verify_sumfree(&s)?,
        }
    };
    sink.json(&report)?;
    Ok(verdict(report.valid))
}

fn count(m: u64, alpha: &str, n: u32) -> Result<CountOutput> {
    let q = rational(alpha)?;
    let af = q.to_f64().ok_or_else(|| anyhow!("α out of range"))?;
    let exact = tuple_fraction_exact(m, &q, n, guard(DEFAULT_COUNT_GUARD)?)?;
    let rate = rate_i(RateQuery::new(m, af)?)?.value;
    let slice_bound = (q == rational("1/3")?).then(|| triangle_to_slice_power_bound(m + 1, n)).transpose()?;
    Ok(CountOutput {
        m,
        alpha: q.to_string(),
        n,
        exact,
        rate_bound: (-rate * n as f64).exp(),
        hoeffding_bound: hoeffding_bound(af, n),
        slice_bound,
    })
}

fn rates_csv(ms: &[u64], alphas: &str, n: u32) -> Result<String> {
    let alphas: Vec<BigRational> = alphas.split(',').map(rational).collect::<Result<_>>()?;
    let mut out = String::from("m,alpha,I,J,exact_count,fraction,hoeffding_bound\n");
    for &m in ms {
        let j = rate_j((m + 1) as f64)?.value;
        for q in &alphas {
            let af = q.to_f64().ok_or_else(|| anyhow!("α out of range"))?;
            let i = rate_i(RateQuery::new(m, af)?)?.value;
            let exact = tuple_fraction_exact(m, q, n, guard(DEFAULT_COUNT_GUARD)?)?;
            let frac = exact.fraction.to_f64().unwrap_or(f64::NAN);
            out.push_str(&format!(
                "{m},{q},{i:.15},{j:.15},{},{frac:.15},{:.15}\n",
                exact.count,
                hoeffding_bound(af, n)
            ));
        }
    }
    Ok(out)
}

/// Entries are products (`8`) or size triples (`2*2*2` or `2x2x2`).
fn omega_from_sizes(s: &str, order: u128) -> Result<OmegaReport> {
    let mut triples = Vec::new();
    let mut products = Vec::new();
    for item in s.split(',') {
        let parts: Vec<u64> = item
            .split(['*', 'x'])
            .map(|x| x.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| anyhow!("bad size entry {item:?}"))?;
        match parts.as_slice() {
            [p] => products.push(*p as u128),
            [a, b, c] => {
                triples.push([*a, *b, *c]);
                products.push(*a as u128 * *b as u128 * *c as u128);
            }
            _ => bail!("size entry {item:?} must be a product or a triple"),
        }
    }
    if triples.len() == products.len() {
        Ok(omega_bound(&triples, order)?)
    } else {
        Ok(omega_from_products(&products, order)?)
    }
}

fn omega_table(r: &OmegaReport) -> String {
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.12}"));
    let mut s = String::new();
    s.push_str(&format!("{:<14}{:.12}\n", "omega_bound", r.omega_bound));
    s.push_str(&format!("{:<14}{}\n", "raw_omega", opt(r.raw_omega)));
    s.push_str(&format!("{:<14}{}\n", "clamped", r.clamped));
    if let Some(p) = &r.packing {
        s.push_str(&format!("{:<14}{:.12}\n", "c_AB", p.c_ab));
        s.push_str(&format!("{:<14}{:.12}\n", "c_BC", p.c_bc));
        s.push_str(&format!("{:<14}{:.12}\n", "c_CA", p.c_ca));
    }
    s.push_str(&format!("{:<14}{}\n", "omega_floor", opt(r.omega_floor)));
    if let Some(w) = &r.warning {
        s.push_str(&format!("{:<14}{w}\n", "warning"));
    }
    s
}
