use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};

use cannonball::ap::{self, ApQuery, ASource, OnTheFly};
use cannonball::cache::{self, CachedTerm};
use cannonball::characters;
use cannonball::config::RunConfig;
use cannonball::equi;
use cannonball::exact::{self, ATable};
use cannonball::fit::fit_exponent;
use cannonball::output::{self, *};
use cannonball::verify;
use cannonball::zeta;
use cannonball::Error;

use crate::Command;

#[derive(Debug, Args)]
pub struct SeqArgs {
    /// Last index.
    #[arg(long)]
    x: u64,

    /// First index.
    #[arg(long, default_value_t = 0)]
    start: u64,

    /// Emit n, a_n, b_n instead of n, P_n, root, a_n.
    #[arg(long = "divisor-sums")]
    divisor_sums: bool,

    #[arg(long, default_value = "incremental")]
    generator: String,
}

#[derive(Debug, Args)]
pub struct AvgArgs {
    #[arg(long, required_unless_present = "decades")]
    x: Option<u64>,

    #[arg(long, default_value_t = 1)]
    q: u64,

    #[arg(long, default_value_t = 0)]
    b: u64,

    /// Cutoffs 10^LO, ..., 10^HI, written LO..HI.
    #[arg(long, value_parser = parse_decades)]
    decades: Option<Decades>,
}

#[derive(Debug, Args)]
pub struct TwistArgs {
    #[arg(long)]
    q: u64,

    /// Character index or id such as `8:1/2,0/2`; all characters when absent.
    #[arg(long)]
    chi: Option<String>,

    #[arg(long, required_unless_present = "decades")]
    x: Option<u64>,

    #[arg(long, value_parser = parse_decades)]
    decades: Option<Decades>,
}

#[derive(Debug, Args)]
pub struct EquiArgs {
    /// Sample size for the discrepancy report.
    #[arg(long = "N", required_unless_present = "m")]
    n: Option<u64>,

    #[arg(long, default_value_t = 1)]
    q: u64,

    #[arg(long, default_value_t = 0)]
    b: u64,

    #[arg(long, default_value_t = 1)]
    start: u64,

    /// Erdős–Turán truncations.
    #[arg(long = "K", value_delimiter = ',', default_value = "100")]
    k: Vec<u64>,

    /// Frequencies for the second-derivative bound; selects that report.
    #[arg(long, value_delimiter = ',', requires = "end")]
    m: Option<Vec<u64>>,

    /// Last index of the block for the second-derivative bound.
    #[arg(long)]
    end: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    /// Truncated series selected by --id.
    Partial,
    /// Real zeta values.
    Zeta,
    /// (s - 5/2) F(s) and (s - 5/2) H(s) near the pole.
    Residue,
    /// S = sum b_n (x - n) against its main term.
    Cesaro,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(value_enum)]
    kind: SeriesKind,

    /// F, G, H, zeta, zeta_shift or Fchi.
    #[arg(long, default_value = "F")]
    id: String,

    #[arg(long, value_delimiter = ',')]
    s: Vec<f64>,

    #[arg(long = "N", default_value_t = 1_000_000)]
    n: u64,

    /// Modulus of the character for Fchi.
    #[arg(long, default_value_t = 1)]
    q: u64,

    #[arg(long, default_value = "0")]
    chi: String,

    #[arg(long)]
    x: Option<u64>,

    #[arg(long, value_parser = parse_decades)]
    decades: Option<Decades>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Table to read; stdin when absent.
    input: Option<PathBuf>,

    #[arg(long, default_value = "x")]
    xcol: String,

    #[arg(long, default_value = "residual")]
    ycol: String,

    /// Fit |y| rather than y.
    #[arg(long)]
    abs: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only these criteria (ids or names).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
}

/// Cutoffs `10^LO, ..., 10^HI`.
#[derive(Debug, Clone)]
pub struct Decades(Vec<u64>);

fn parse_decades(s: &str) -> Result<Decades, String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI, e.g. 3..6")?;
    let lo: u32 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: u32 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi || hi > 12 {
        return Err("need LO <= HI <= 12".into());
    }
    Ok(Decades((lo..=hi).map(|k| 10u64.pow(k)).collect()))
}

fn cutoffs(x: Option<u64>, decades: &Option<Decades>) -> anyhow::Result<Vec<u64>> {
    match (x, decades) {
        (_, Some(d)) => Ok(d.0.clone()),
        (Some(x), None) => Ok(vec![x]),
        (None, None) => bail!(Error::Parameter("give --x or --decades".into())),
    }
}

/// Terms from the cache when it covers `0..=x`, otherwise computed on demand.
fn source(config: &RunConfig, x: u64) -> anyhow::Result<Box<dyn ASource>> {
    if let Some(path) = config.cache_path.as_deref().filter(|p| p.exists()) {
        let terms = cache::cache_read(path).with_context(|| format!("reading cache {}", path.display()))?;
        if let Some(table) = cache::table_from_terms(&terms, x, config.budget())? {
            return Ok(Box::new(table));
        }
    }
    Ok(Box::new(OnTheFly))
}

fn a_table(config: &RunConfig, x: u64) -> anyhow::Result<ATable> {
    Ok(cache::load_or_build(config.cache_path.as_deref(), x, config.budget())?)
}

fn emit<T: serde::Serialize>(config: &RunConfig, rows: &[T]) -> anyhow::Result<()> {
    let out = BufWriter::new(io::stdout().lock());
    output::write_rows(config.output_format, rows, out)?;
    Ok(())
}

fn plot(x_label: &str, y_label: &str, points: &[(f64, f64)]) -> anyhow::Result<()> {
    let mut out = BufWriter::new(io::stdout().lock());
    output::write_plot(&mut out, x_label, y_label, points)?;
    out.flush()?;
    Ok(())
}

/// Returns whether every check passed; only `verify` can return `false`.
pub fn run(command: &Command, config: &RunConfig, plot_mode: bool) -> anyhow::Result<bool> {
    let workers = config.workers()?;
    workers.install(|| match command {
        Command::Seq(a) => seq(a, config).map(|_| true),
        Command::Avg(a) => avg(a, config, plot_mode).map(|_| true),
        Command::Twist(a) => twist(a, config, plot_mode).map(|_| true),
        Command::Equi(a) => equi_cmd(a, config, plot_mode).map(|_| true),
        Command::Series(a) => series(a, config, plot_mode).map(|_| true),
        Command::Fit(a) => fit(a, config).map(|_| true),
        Command::Verify(a) => verify_cmd(a, config),
    })
}

fn seq(args: &SeqArgs, config: &RunConfig) -> anyhow::Result<()> {
    if args.start > args.x {
        bail!(Error::Parameter(format!("start {} exceeds x {}", args.start, args.x)));
    }
    if args.divisor_sums {
        if args.start == 0 {
            bail!(Error::Parameter("b_n starts at n = 1; pass --start 1 or more".into()));
        }
        config.budget().check("divisor-sum sieve", 16 * (args.x + 1))?;
        let table = a_table(config, args.x)?;
        let sums = exact::b_sieve_from(&table, args.x)?;
        let rows: Vec<DivisorSumRow> = (args.start..=args.x)
            .map(|n| DivisorSumRow { n, a: table.get(n), b: sums.get(n) })
            .collect();
        if let Some(path) = &config.cache_path {
            let terms: Vec<CachedTerm> = rows.iter().map(|r| CachedTerm { n: r.n, a: r.a }).collect();
            cache::cache_write(path, &terms).with_context(|| format!("writing cache {}", path.display()))?;
        }
        return emit(config, &rows);
    }
    let records: Vec<_> = exact::generator(&args.generator)?.generate(args.start, args.x).collect();
    if let Some(path) = &config.cache_path {
        cache::cache_write_records(path, &records).with_context(|| format!("writing cache {}", path.display()))?;
    }
    let rows: Vec<SequenceRow> = records.iter().map(SequenceRow::from).collect();
    emit(config, &rows)
}

fn avg(args: &AvgArgs, config: &RunConfig, plot_mode: bool) -> anyhow::Result<()> {
    let xs = cutoffs(args.x, &args.decades)?;
    let src = source(config, *xs.iter().max().expect("nonempty"))?;
    let reports = xs
        .iter()
        .map(|&x| Ok(ap::average_a_ap_with(src.as_ref(), &ApQuery::new(args.b, args.q, x)?)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if plot_mode {
        let pts: Vec<_> = reports.iter().map(|r| (r.x as f64, (r.residual * r.x as f64).abs())).collect();
        return plot("x", "|M(b,q,x)-main|", &pts);
    }
    emit(config, &reports.iter().map(AverageRow::from).collect::<Vec<_>>())
}

fn twist(args: &TwistArgs, config: &RunConfig, plot_mode: bool) -> anyhow::Result<()> {
    let xs = cutoffs(args.x, &args.decades)?;
    let chars = match &args.chi {
        Some(key) => vec![characters::find_character(args.q, key)?],
        None => characters::characters(args.q)?,
    };
    let src = source(config, *xs.iter().max().expect("nonempty"))?;
    let mut reports = Vec::new();
    for chi in &chars {
        for &x in &xs {
            reports.push(characters::twisted_sum_with(src.as_ref(), chi, x)?);
        }
    }
    if plot_mode {
        if chars.len() != 1 {
            bail!(Error::Parameter("--plot needs a single --chi".into()));
        }
        let pts: Vec<_> = reports.iter().map(|r| (r.x as f64, r.residual_abs)).collect();
        return plot("x", "|S_chi-main|", &pts);
    }
    emit(config, &reports.iter().map(TwistRow::from).collect::<Vec<_>>())
}

fn equi_cmd(args: &EquiArgs, config: &RunConfig, plot_mode: bool) -> anyhow::Result<()> {
    if let Some(ms) = &args.m {
        let end = args.end.expect("clap enforces --end");
        let rows = ms
            .iter()
            .map(|&m| Ok(KnRow::new(args.start, end, args.q, &equi::kn_bound(args.start, end, args.q, m)?)))
            .collect::<anyhow::Result<Vec<_>>>()?;
        if plot_mode {
            let pts: Vec<_> = rows.iter().map(|r| (r.m as f64, r.measured)).collect();
            return plot("m", "|exp_sum|", &pts);
        }
        return emit(config, &rows);
    }
    let n = args.n.expect("clap enforces --N");
    let sample = equi::frac_family_with_bits(args.start, args.q, args.b, n, config.precision_bits)?;
    if plot_mode {
        let mut pts: Vec<f64> = sample.points();
        pts.sort_by(f64::total_cmp);
        let len = pts.len() as f64;
        let ecdf: Vec<_> = pts.iter().enumerate().map(|(i, &p)| (p, (i + 1) as f64 / len)).collect();
        return plot("frac", "empirical_cdf", &ecdf);
    }
    let meta = sample.meta().expect("family samples carry metadata");
    let d_star = equi::star_discrepancy(&sample);
    let d = equi::extreme_discrepancy(&sample);
    let rows = args
        .k
        .iter()
        .map(|&k| {
            let c = equi::erdos_turan_bound(&sample, k)?;
            Ok(DiscrepancyRow {
                n: meta.count,
                q: meta.q,
                b: meta.b,
                start: meta.start,
                d_star,
                d,
                et_bound_k: c.bound,
                satisfied: c.satisfied,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    emit(config, &rows)
}

fn series(args: &SeriesArgs, config: &RunConfig, plot_mode: bool) -> anyhow::Result<()> {
    match args.kind {
        SeriesKind::Partial => {
            let series: Box<dyn zeta::DirichletSeries> = if args.id == "Fchi" {
                Box::new(zeta::FChiSeries::new(characters::find_character(args.q, &args.chi)?))
            } else {
                zeta::series(&args.id, config.budget())?
            };
            let rows = need_s(&args.s)?
                .iter()
                .map(|&s| Ok(SeriesRow::from(&series.partial(s, args.n)?)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            if plot_mode {
                return plot("s", "re", &rows.iter().map(|r| (r.s, r.re)).collect::<Vec<_>>());
            }
            emit(config, &rows)
        }
        SeriesKind::Zeta => {
            let rows = need_s(&args.s)?
                .iter()
                .map(|&s| {
                    Ok(SeriesRow {
                        series_id: "zeta_real".into(),
                        s,
                        n: None,
                        re: zeta::zeta_real(s, 1e-12)?,
                        im: 0.0,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            emit(config, &rows)
        }
        SeriesKind::Residue => {
            let s = if args.s.is_empty() {
                vec![3.0, 2.75, 2.6, 2.55, 2.52, 2.51]
            } else {
                args.s.clone()
            };
            let mut rows: Vec<ResidueRow> = zeta::residue_probe(&s, args.n)?.iter().map(ResidueRow::from).collect();
            rows.extend(zeta::residue_probe_h(&s, args.n)?.iter().map(ResidueRow::from));
            if plot_mode {
                let pts: Vec<_> = rows[..s.len()].iter().map(|r| (r.s - zeta::POLE, r.product)).collect();
                return plot("s-5/2", "(s-5/2)F(s)", &pts);
            }
            emit(config, &rows)
        }
        SeriesKind::Cesaro => {
            let xs = cutoffs(args.x, &args.decades)?;
            let top = *xs.iter().max().expect("nonempty");
            config.budget().check("divisor-sum sieve", 16 * (top + 1))?;
            let sums = exact::b_sieve_from(&a_table(config, top)?, top)?;
            let z = zeta::zeta_five_halves();
            let reports = xs
                .iter()
                .map(|&x| zeta::cesaro_b_from(&sums, x, z))
                .collect::<Result<Vec<_>, _>>()?;
            if plot_mode {
                let pts: Vec<_> = reports.iter().map(|r| (r.x as f64, r.residual.abs())).collect();
                return plot("x", "|S-main|", &pts);
            }
            emit(config, &reports.iter().map(CesaroRow::from).collect::<Vec<_>>())
        }
    }
}

fn need_s(s: &[f64]) -> anyhow::Result<&[f64]> {
    if s.is_empty() {
        bail!(Error::Parameter("give at least one --s".into()));
    }
    Ok(s)
}

fn fit(args: &FitArgs, config: &RunConfig) -> anyhow::Result<()> {
    let mut raw = Vec::new();
    match &args.input {
        Some(path) => File::open(path)
            .with_context(|| format!("opening {}", path.display()))?
            .read_to_end(&mut raw)?,
        None => io::stdin().lock().read_to_end(&mut raw)?,
    };
    let mut points = output::read_columns(config.output_format, &raw[..], &args.xcol, &args.ycol)?;
    if args.abs {
        points.iter_mut().for_each(|p| p.1 = p.1.abs());
    }
    let result = fit_exponent(&points)?;
    emit(config, &[FitRow::from(&result)])
}

fn verify_cmd(args: &VerifyArgs, config: &RunConfig) -> anyhow::Result<bool> {
    let selected = if args.only.is_empty() {
        verify::criteria()
    } else {
        args.only.iter().map(|k| verify::criterion(k)).collect::<Result<Vec<_>, _>>()?
    };
    let run = verify::run_selected(config, &selected)?;
    for (o, t) in run.outcomes.iter().zip(&run.elapsed) {
        eprintln!("{} [{:>2}] {} ({:.2?})", if o.passed { "PASS" } else { "FAIL" }, o.id, o.name, t);
    }
    io::stdout().lock().write_all(&run.render(config.output_format)?)?;
    Ok(run.all_passed())
}
