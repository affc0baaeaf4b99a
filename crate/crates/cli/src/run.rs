use std::io::{self, Read, Write};
use std::time::Instant;

use gmp_core::applications::{
    cubature_bound, cubature_instance, minimum_level, polynomial_min, rational_min, solve, stable_set_bound, Graph,
    SolveOptions,
};
use gmp_core::lp_hierarchy::equivalence_check;
use gmp_core::model::instance_from_json;
use gmp_core::oracle::{default_resolution, grid_extrema};
use gmp_core::poly::{b_of_f, has_nonnegative_coefficients, polya_exponent_bound, polya_shift, RawPolynomial};
use gmp_core::report::{num, worst_status};
use gmp_core::solvers::LpOptions;
use gmp_core::{Domain, Error, GmpInstance, LevelReport, QPolynomial, Rational, Scalar, Status};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, Format, Levels, RunArgs};
use crate::inputs;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

/// Largest total degree `polya-certificate` will expand.
const MAX_CERTIFICATE_DEGREE: u64 = 400;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_input(args: &RunArgs) -> CliResult<String> {
    let mut text = String::new();
    if args.input.as_os_str() == "-" {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Usage(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(&args.input)
            .map_err(|e| CliError::Usage(format!("reading {}: {e}", args.input.display())))?;
    }
    Ok(text)
}

fn solve_options(args: &RunArgs) -> SolveOptions {
    SolveOptions {
        hierarchy: args.hierarchy.into(),
        tol: args.tol,
        exact: false,
    }
}

/// Runs one subcommand; returns the process exit code.
pub fn run(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let args = command.args();
    if let Err(m) = args.validate() {
        let _ = writeln!(err, "error: {m}");
        return EXIT_USAGE;
    }
    let result = read_input(args).and_then(|text| dispatch(command, args, &text, out));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: &Command, args: &RunArgs, text: &str, out: &mut dyn Write) -> CliResult<i32> {
    let opts = solve_options(args);
    match command {
        Command::Solve(_) => {
            let inst = instance_from_json(text)?;
            let levels = levels_for(args, minimum_level(&inst))?;
            let oracle = if args.oracle { minimization_oracle(&inst) } else { None };
            sweep(args, &levels, out, |r| {
                let mut rep = solve(&inst, r, &opts)?;
                attach_oracle(&mut rep, args.oracle, &oracle);
                Ok(rep)
            })
        }
        Command::Minimize(_) => {
            let input = inputs::minimize(text)?;
            let inst = GmpInstance::normalized_minimization(input.domain, input.p.clone())?;
            let levels = levels_for(args, minimum_level(&inst))?;
            let oracle = if args.oracle { minimization_oracle(&inst) } else { None };
            sweep(args, &levels, out, |r| {
                let mut rep = polynomial_min(&input.p, input.domain, r, &opts)?;
                attach_oracle(&mut rep, args.oracle, &oracle);
                Ok(rep)
            })
        }
        Command::Rational(_) => {
            let input = inputs::rational(text)?;
            let inst = GmpInstance::new(
                input.domain,
                input.p.clone(),
                vec![gmp_core::MomentConstraint {
                    poly: input.q.clone(),
                    rhs: Rational::from_integer(1.into()),
                }],
            )?;
            let levels = levels_for(args, minimum_level(&inst))?;
            sweep(args, &levels, out, |r| {
                let mut rep = rational_min(&input.p, &input.q, input.domain, r, &opts)?;
                if args.oracle && !rep.extras.contains_key("oracle_value") {
                    rep.notes.push("oracle: grid reference only for n <= 3".into());
                }
                Ok(rep)
            })
        }
        Command::StableSet(_) => {
            let g = Graph::from_json(text)?;
            let levels = levels_for(args, 2)?;
            let alpha = (args.oracle && g.n() <= 24).then(|| g.stability_number());
            sweep(args, &levels, out, |r| {
                let mut rep = stable_set_bound(&g, r, &opts)?;
                if let Some(a) = alpha {
                    rep.set_extra("alpha_exhaustive", a.to_string());
                } else if args.oracle {
                    rep.notes.push("oracle: exhaustive search limited to 24 vertices".into());
                }
                Ok(rep)
            })
        }
        Command::Cubature(_) => {
            let input = inputs::cubature(text)?;
            let inst = cubature_instance(input.domain, input.d, &input.beta, input.reference.as_ref())?;
            let levels = levels_for(args, minimum_level(&inst))?;
            sweep(args, &levels, out, |r| {
                let mut rep = cubature_bound(input.domain, input.d, &input.beta, r, input.reference.as_ref(), &opts)?;
                if args.oracle {
                    rep.notes.push("oracle: no brute-force reference for cubature bounds".into());
                }
                Ok(rep)
            })
        }
        Command::PolyaCertificate(_) => polya_certificate(args, text, out),
        Command::EquivCheck(_) => equiv_check(args, text, out),
    }
}

fn levels_for(args: &RunArgs, minimum: u32) -> CliResult<Levels> {
    let levels = args.levels.clone().unwrap_or(Levels(minimum..=minimum));
    if levels.min() < minimum {
        return Err(CliError::Usage(format!(
            "level {} is below the minimum level {minimum} for this instance",
            levels.min()
        )));
    }
    Ok(levels)
}

/// Grid minimum of the objective when the instance only fixes the mass.
fn minimization_oracle(inst: &GmpInstance) -> Option<f64> {
    let domain = inst.domain();
    let [c] = inst.constraints() else { return None };
    let unit = domain.unit_form(c.poly.degree()).ok()?;
    if c.poly != unit || c.rhs != Rational::from_integer(1.into()) {
        return None;
    }
    grid_extrema(inst.objective(), domain, default_resolution(domain)).ok().map(|e| e.min)
}

fn attach_oracle(rep: &mut LevelReport, requested: bool, grid_min: &Option<f64>) {
    if !requested {
        return;
    }
    match (grid_min, rep.bound) {
        (Some(g), Some(b)) => {
            rep.set_extra("oracle_grid_min", num(*g));
            rep.set_extra("oracle_gap", num(g - b));
        }
        (Some(g), None) => rep.set_extra("oracle_grid_min", num(*g)),
        (None, _) => rep.notes.push("oracle: no grid reference for this instance".into()),
    }
}

/// Streams a JSON array one element per line.
struct JsonArray {
    first: bool,
}

impl JsonArray {
    fn new() -> Self {
        JsonArray { first: true }
    }

    fn push(&mut self, out: &mut dyn Write, line: &str) {
        let sep = if self.first { "[\n" } else { ",\n" };
        self.first = false;
        let _ = write!(out, "{sep}{line}");
        let _ = out.flush();
    }

    fn finish(self, out: &mut dyn Write) {
        let _ = writeln!(out, "{}", if self.first { "[]" } else { "\n]" });
        let _ = out.flush();
    }
}

fn exit_code(reports: &[LevelReport]) -> i32 {
    match worst_status(reports) {
        Status::Optimal => EXIT_OK,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::Unbounded | Status::NumericalFailure => EXIT_NUMERICAL,
    }
}

fn sweep<F>(args: &RunArgs, levels: &Levels, out: &mut dyn Write, f: F) -> CliResult<i32>
where
    F: Fn(u32) -> gmp_core::Result<LevelReport> + Sync,
{
    let timed = |r: u32| {
        let start = Instant::now();
        let rep = f(r);
        (rep, start.elapsed().as_secs_f64())
    };
    // Sequential sweeps stream each level as soon as it is solved.
    let results: Box<dyn Iterator<Item = (gmp_core::Result<LevelReport>, f64)>> = if args.parallel_levels {
        let levels: Vec<u32> = levels.iter().collect();
        Box::new(levels.par_iter().map(|&r| timed(r)).collect::<Vec<_>>().into_iter())
    } else {
        Box::new(levels.iter().map(timed))
    };
    let json = args.format == Format::Json;
    let mut reports = Vec::new();
    let mut failure = None;
    let mut array = json.then(JsonArray::new);
    for (res, secs) in results {
        match res {
            Ok(rep) => {
                match array.as_mut() {
                    Some(arr) => arr.push(out, &rep.to_json().to_line()),
                    None => {
                        let _ = write!(out, "{}", rep.to_text(Some(secs)));
                        let _ = out.flush();
                    }
                }
                reports.push(rep);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    if let Some(arr) = array {
        arr.finish(out);
    }
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(exit_code(&reports))
}

#[derive(Serialize)]
struct CertificateJson {
    degree: u32,
    eps: String,
    eps_source: String,
    b_of_f: String,
    exponent: u64,
    nonnegative: bool,
    shifted: RawPolynomial,
}

fn polya_certificate(args: &RunArgs, text: &str, out: &mut dyn Write) -> CliResult<i32> {
    let input = inputs::polya(text)?;
    let f = &input.f;
    let degree = f.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    let (eps, source) = match &input.eps {
        Some(e) => (e.clone(), "input".to_string()),
        None => {
            let domain = Domain::simplex(f.n());
            let grid = grid_extrema(f, domain, default_resolution(domain))?;
            if grid.min <= 0.0 {
                return Err(CliError::Usage(format!(
                    "f is not positive on the simplex (grid minimum {})",
                    num(grid.min)
                )));
            }
            let e = Rational::from_float(grid.min / 2.0).expect("finite");
            (e, "half the grid minimum (sampled, not certified)".to_string())
        }
    };
    let k = polya_exponent_bound(f, &eps)?;
    if k + u64::from(degree) > MAX_CERTIFICATE_DEGREE {
        return Err(CliError::Usage(format!(
            "exponent {k} gives total degree above {MAX_CERTIFICATE_DEGREE}; refusing to expand"
        )));
    }
    let shifted: QPolynomial = polya_shift(f, k as u32);
    let nonnegative = has_nonnegative_coefficients(&shifted);
    let b = b_of_f(f)?;
    match args.format {
        Format::Json => {
            let j = CertificateJson {
                degree,
                eps: eps.to_decimal_string(),
                eps_source: source,
                b_of_f: b.to_decimal_string(),
                exponent: k,
                nonnegative,
                shifted: RawPolynomial::from_polynomial(&shifted),
            };
            let _ = writeln!(out, "{}", serde_json::to_string(&j).expect("serializable"));
        }
        Format::Text => {
            let _ = writeln!(out, "degree d = {degree}, eps = {} ({source})", eps.to_decimal_string());
            let _ = writeln!(out, "B(f) = {}", b.to_decimal_string());
            let _ = writeln!(out, "exponent k = {k}");
            let _ = writeln!(out, "all coefficients of (x1 + ... + xn)^k f nonnegative: {nonnegative}");
            let _ = writeln!(out, "(x1 + ... + xn)^k f = {shifted}");
        }
    }
    Ok(if nonnegative { EXIT_OK } else { EXIT_NUMERICAL })
}

#[derive(Serialize)]
struct EquivJson {
    level: u32,
    lhs: String,
    rhs: String,
    difference: String,
    lift_violation: String,
}

fn equiv_check(args: &RunArgs, text: &str, out: &mut dyn Write) -> CliResult<i32> {
    let p = inputs::equiv(text)?;
    if p.homogeneous_degree().is_none() {
        return Err(Error::NotHomogeneous.into());
    }
    let levels = levels_for(args, 0)?;
    let lp_opts = LpOptions {
        tol: args.tol,
        max_iterations: None,
    };
    let check = |r: u32| equivalence_check::<f64>(&p, r, &lp_opts).map(|rep| (r, rep));
    let results: Vec<_> = if args.parallel_levels {
        levels.iter().collect::<Vec<_>>().par_iter().map(|&r| check(r)).collect()
    } else {
        levels.iter().map(check).collect()
    };
    let mut json = (args.format == Format::Json).then(JsonArray::new);
    let mut worst = 0f64;
    let mut failure = None;
    let mut text_lines = Vec::new();
    for res in results {
        match res {
            Ok((r, rep)) => {
                worst = worst.max(rep.difference);
                match json.as_mut() {
                    Some(arr) => {
                        let j = EquivJson {
                            level: r,
                            lhs: num(rep.lhs),
                            rhs: num(rep.rhs),
                            difference: num(rep.difference),
                            lift_violation: num(rep.lift_violation),
                        };
                        arr.push(out, &serde_json::to_string(&j).expect("serializable"));
                    }
                    None => text_lines.push(format!(
                        "r={r}: p^(r) = {}, relaxation at level r+d = {}, |difference| = {}, lift violation = {}",
                        num(rep.lhs),
                        num(rep.rhs),
                        num(rep.difference),
                        num(rep.lift_violation)
                    )),
                }
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    match json {
        Some(arr) => arr.finish(out),
        None => {
            for l in text_lines {
                let _ = writeln!(out, "{l}");
            }
        }
    }
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(if worst <= 1e-6 { EXIT_OK } else { EXIT_NUMERICAL })
}
