use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::Path;
use std::process::ExitCode;

use cardwave::bspline::eval_bspline;
use cardwave::coefficients::recurrence::DEFAULT_DEPTH;
use cardwave::numeric::{format17, F17};
use cardwave::transform::{read_signal_csv, round_trip_error, write_signal_csv};
use cardwave::wavelet_system::{build_constants, build_system_with, ClassKey};
use cardwave::{
    asymptotic_profile, derive_filters, dwt_analyze, dwt_synthesize, verify, BuildOptions, CoefficientKind,
    CoefficientMode, DwtResult, SplineOrder, WaveletSystem,
};
use serde::Serialize;

use crate::args::{
    BuildArgs, CoeffsArgs, Command, ConstantsArgs, Direction, DwtArgs, EvalArgs, Format, Kind, VerifyArgs, Which,
};
use crate::cache::{Cache, CacheKey};
use crate::failure::Failure;

pub fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Constants(a) => constants(a),
        Command::Coeffs(a) => coeffs(a),
        Command::Eval(a) => eval(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Dwt(a) => dwt(a),
    }
    .map(|passed| if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Settings shared by every command that needs the coefficient tables.
pub struct RunConfig {
    pub m: SplineOrder,
    pub options: BuildOptions,
}

impl RunConfig {
    fn from_args(b: &BuildArgs) -> Result<Self, Failure> {
        let m = SplineOrder::wavelet(b.m)?;
        let options = BuildOptions {
            eps: b.eps,
            nodes: b.nodes,
            depth: DEFAULT_DEPTH,
            mode: if b.series {
                CoefficientMode::Series
            } else {
                CoefficientMode::Quadrature
            },
        };
        Ok(RunConfig { m, options })
    }
}

fn load_system(b: &BuildArgs) -> Result<WaveletSystem, Failure> {
    let cfg = RunConfig::from_args(b)?;
    if b.no_cache {
        return Ok(build_system_with(cfg.m, &cfg.options)?);
    }
    let cache = Cache::locate(b.cache_dir.as_deref());
    let key = CacheKey::new(cfg.m.get(), &cfg.options);
    if !b.refresh_cache {
        if let Some(tables) = cache.load(&key)? {
            let (spectrum, limits) = build_constants(cfg.m, cfg.options.depth)?;
            return WaveletSystem::from_parts(cfg.options, spectrum, limits, tables).map_err(|e| {
                Failure::Io(format!(
                    "cache: {} does not fit this build: {e}",
                    cache.path(&key).display()
                ))
            });
        }
    }
    let sys = build_system_with(cfg.m, &cfg.options)?;
    if let Err(e) = cache.store(&key, &sys) {
        eprintln!("warning: tables not cached: {e}");
    }
    Ok(sys)
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<(), Failure>) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::Io(format!("cannot create {}: {e}", p.display())))?;
            let mut out = io::BufWriter::new(file);
            write(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn reject_format(cmd: &str, format: Format, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::usage(
            format!("{cmd} does not support --format {format:?}").to_lowercase(),
        ))
    }
}

#[derive(Serialize)]
struct ClassValue {
    class: String,
    value: F17,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct ConstantsDoc {
    schema_version: u32,
    m: u32,
    lambda: Vec<F17>,
    mu: Vec<F17>,
    alpha0: F17,
    A: F17,
    B: F17,
    C: F17,
    K_c: F17,
    K_b: F17,
    D: Vec<ClassValue>,
    E: Vec<ClassValue>,
}

fn constants(a: ConstantsArgs) -> Result<bool, Failure> {
    reject_format("constants", a.format, &[Format::Text, Format::Json])?;
    let sys = load_system(&a.build)?;
    let profile = asymptotic_profile(&sys)?;
    let f17 = |v: &[f64]| v.iter().map(|&x| F17(x)).collect::<Vec<_>>();
    let classes = |get: &dyn Fn(ClassKey) -> f64| {
        ClassKey::ALL
            .iter()
            .map(|&k| ClassValue {
                class: k.to_string(),
                value: F17(get(k)),
            })
            .collect::<Vec<_>>()
    };
    let l = &sys.limits;
    let doc = ConstantsDoc {
        schema_version: 1,
        m: sys.m.get(),
        lambda: f17(&sys.spectrum.roots),
        mu: f17(&sys.spectrum.mu),
        alpha0: F17(sys.alpha0()),
        A: F17(l.a),
        B: F17(l.b),
        C: F17(l.c),
        K_c: F17(l.k_c),
        K_b: F17(l.k_b),
        D: classes(&|k| profile.d_of(k).d),
        E: classes(&|k| profile.e_of(k).e),
    };
    emit(a.output.as_deref(), |w| {
        if a.format == Format::Json {
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)?;
            return Ok(());
        }
        let list = |v: &[F17]| v.iter().map(|x| format17(x.0)).collect::<Vec<_>>().join(" ");
        writeln!(w, "m       {}", doc.m)?;
        writeln!(w, "lambda  {}", list(&doc.lambda))?;
        writeln!(w, "mu      {}", list(&doc.mu))?;
        for (name, v) in [
            ("alpha0", doc.alpha0),
            ("A", doc.A),
            ("B", doc.B),
            ("C", doc.C),
            ("K_c", doc.K_c),
            ("K_b", doc.K_b),
        ] {
            writeln!(w, "{name:<7} {}", format17(v.0))?;
        }
        for (name, rows) in [("D", &doc.D), ("E", &doc.E)] {
            for r in rows.iter() {
                writeln!(w, "{name} {:<13} {}", r.class, format17(r.value.0))?;
            }
        }
        Ok(())
    })?;
    Ok(true)
}

fn coeffs(a: CoeffsArgs) -> Result<bool, Failure> {
    reject_format("coeffs", a.format, &[Format::Csv, Format::Json])?;
    let sys = load_system(&a.build)?;
    let kind: CoefficientKind = a.kind.into();
    let table = sys.table(kind);
    let jmax = a.jmax.unwrap_or(table.window);
    if jmax < 0 {
        return Err(Failure::usage(format!("--jmax must be non-negative, got {jmax}")));
    }
    if jmax > table.window {
        let hint = if a.kind == Kind::C && !a.build.series {
            "lower --eps, or add --series to go below 1e-12"
        } else {
            "lower --eps"
        };
        return Err(Failure::usage(format!(
            "--jmax {jmax} exceeds the {kind} window {} certified at eps {:e}; {hint}",
            table.window,
            sys.eps()
        )));
    }
    let table = table.restricted(jmax);
    emit(a.output.as_deref(), |w| {
        match a.format {
            Format::Json => {
                w.write_all(table.to_json_string()?.as_bytes())?;
                writeln!(w)?;
            }
            _ => table.write_csv(w)?,
        }
        Ok(())
    })?;
    if a.format == Format::Csv {
        eprintln!("{kind}: |{kind}_j| <= {:e} for |j| > {jmax}", table.tail_bound);
    }
    Ok(true)
}

#[derive(Serialize)]
struct GridDoc {
    schema_version: u32,
    which: &'static str,
    m: u32,
    x: Vec<F17>,
    value: Vec<F17>,
}

fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(step.is_finite() && step > 0.0) || !(from.is_finite() && to.is_finite()) || to < from {
        return Err(Failure::usage(format!(
            "grid needs finite --from <= --to and --step > 0, got {from}..{to} step {step}"
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(Failure::usage(format!("grid of {n} points is too large")));
    }
    Ok((0..=n).map(|i| from + i as f64 * step).collect())
}

fn eval(a: EvalArgs) -> Result<bool, Failure> {
    reject_format("eval", a.format, &[Format::Csv, Format::Json])?;
    let (xs, values, m) = match a.which {
        Which::Bspline => {
            let m = SplineOrder::new(a.build.m)?;
            let xs = grid(a.from.unwrap_or(0.0), a.to.unwrap_or(m.get() as f64), a.step)?;
            let v = xs.iter().map(|&x| eval_bspline(m, x)).collect();
            (xs, v, m)
        }
        Which::Phi | Which::Psi => {
            let sys = load_system(&a.build)?;
            let limit = if a.which == Which::Phi {
                sys.phi_limit()
            } else {
                sys.psi_limit()
            };
            let xs = grid(a.from.unwrap_or(-limit), a.to.unwrap_or(limit), a.step)?;
            let v = xs
                .iter()
                .map(|&x| {
                    if a.which == Which::Phi {
                        sys.phi_eval(x)
                    } else {
                        sys.psi_eval(x)
                    }
                })
                .collect::<Result<Vec<f64>, _>>()?;
            (xs, v, sys.m)
        }
    };
    emit(a.output.as_deref(), |w| {
        if a.format == Format::Json {
            let doc = GridDoc {
                schema_version: 1,
                which: match a.which {
                    Which::Phi => "phi",
                    Which::Psi => "psi",
                    Which::Bspline => "bspline",
                },
                m: m.get(),
                x: xs.iter().map(|&x| F17(x)).collect(),
                value: values.iter().map(|&v| F17(v)).collect(),
            };
            serde_json::to_writer_pretty(&mut *w, &doc)?;
            writeln!(w)?;
            return Ok(());
        }
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(["x", "value"])?;
        for (x, v) in xs.iter().zip(&values) {
            out.write_record([format17(*x), format17(*v)])?;
        }
        out.flush()?;
        Ok(())
    })?;
    Ok(true)
}

fn verify_cmd(a: VerifyArgs) -> Result<bool, Failure> {
    reject_format("verify", a.format, &[Format::Json, Format::Text])?;
    let sys = load_system(&a.build)?;
    let report = verify(&sys);
    emit(a.output.as_deref(), |w| {
        let text = match a.format {
            Format::Json => report.to_json_string()?,
            _ => report.to_text(),
        };
        w.write_all(text.as_bytes())?;
        if !text.ends_with('\n') {
            writeln!(w)?;
        }
        Ok(())
    })?;
    for c in report.failures() {
        eprintln!("verify: {} failed ({:e} vs {:e})", c.name, c.measured, c.target);
    }
    Ok(report.passed)
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Io(format!("cannot open {}: {e}", path.display())))
}

fn dwt(a: DwtArgs) -> Result<bool, Failure> {
    if a.direction == Direction::Analyze && a.levels.is_none() {
        return Err(Failure::usage("dwt analysis needs --levels"));
    }
    let sys = load_system(&a.build)?;
    let fp = derive_filters(&sys, a.filter_eps)?;
    match a.direction {
        Direction::Analyze => {
            let levels = a.levels.expect("checked above");
            let signal = read_signal_csv(open(&a.input)?)?;
            let result = dwt_analyze(&fp, &signal, levels).map_err(|e| {
                Failure::usage(format!(
                    "{e}; the signal length must be a multiple of 2^levels and at least {} samples",
                    fp.len()
                ))
            })?;
            if a.round_trip {
                eprintln!(
                    "round-trip relative error: {:e}",
                    round_trip_error(&fp, &signal, levels)?
                );
            }
            emit(a.output.as_deref(), |w| {
                w.write_all(result.to_json_string()?.as_bytes())?;
                writeln!(w)?;
                Ok(())
            })?;
        }
        Direction::Synthesize => {
            let result = DwtResult::from_json_reader(open(&a.input)?)?;
            if let Some(l) = a.levels {
                if l != result.levels {
                    return Err(Failure::usage(format!(
                        "--levels {l} disagrees with the {} levels stored in {}",
                        result.levels,
                        a.input.display()
                    )));
                }
            }
            let signal = dwt_synthesize(&fp, &result)?;
            if a.round_trip {
                let again = dwt_analyze(&fp, &signal, result.levels)?;
                let num: f64 = again
                    .approximation
                    .iter()
                    .zip(&result.approximation)
                    .chain(again.details.iter().flatten().zip(result.details.iter().flatten()))
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
                eprintln!("round-trip relative error: {:e}", (num / result.energy()).sqrt());
            }
            emit(a.output.as_deref(), |w| Ok(write_signal_csv(w, &signal)?))?;
        }
    }
    Ok(true)
}
