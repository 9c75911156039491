//! Subcommand implementations. Each returns the text to print and an exit code.

use std::collections::HashSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use entrocone::catalog::{elemental_shannon, full_catalog, pippenger_sets, xi_catalog, NamedInequality};
use entrocone::cone::{is_facet, PolyCone};
use entrocone::exact::{format_rational, LogLinear};
use entrocone::extremal::{classical_differential, classify_quantum, entropy_differential, DifferentialReport, Verdict};
use entrocone::functional::Functional;
use entrocone::linear_rank::{parse_family, rank_to_entropy, rank_vector, rank_witness};
use entrocone::stabilizer::{
    classical_model_vector, enumerate_isotropic, format_submodule, isotropy_violation, parse_generators,
    stabilizer_entropy_exact, PhaseSpace, Submodule,
};
use entrocone::subset::{self, Subset};
use entrocone::types::{self, Partition};
use entrocone::{entropy_vector_classical, entropy_vector_quantum, purify, EntropyVector};

use crate::cli::{CatalogFamily, Command, Format, Global, TypesOp};
use crate::error::{CliError, CliResult};
use crate::io::{
    big_json, coordinate_labels, digest, entropy_vector_json, int_rows_json, parse_cone, parse_entropy_vector,
    parse_state, pretty, rational_json, Input, StateInput,
};

/// Default enumeration budget.
pub const DEFAULT_BUDGET: usize = 10_000;

pub struct Output {
    pub stdout: String,
    /// 0 clean, 1 violations found.
    pub code: i32,
}

impl Output {
    fn clean(stdout: String) -> Self {
        Self { stdout, code: 0 }
    }
}

#[derive(Debug, Serialize)]
pub struct Violation {
    pub name: String,
    pub value: f64,
    pub witness: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub results: Value,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl RunReport {
    fn output(self) -> Output {
        let code = i32::from(!self.violations.is_empty());
        Output { stdout: pretty(&serde_json::to_value(&self).expect("serializable")), code }
    }
}

pub fn run(command: &Command, global: &Global, argv: &[String]) -> CliResult<Output> {
    let start = Instant::now();
    let mut out = match command {
        Command::Entropy { file, quantum, classical } => cmd_entropy(file, *quantum, *classical),
        Command::Check { file, catalog, family } => cmd_check(file, *catalog, *family, global, argv),
        Command::Stab { file, enumerate, emit_csv } => {
            let format = if *emit_csv { Format::Csv } else { global.format };
            match (file, enumerate) {
                (_, Some(nd)) => cmd_stab_enumerate(nd[0] as usize, nd[1], format, global, argv),
                (Some(f), None) => cmd_stab_file(f, global, argv),
                (None, None) => Err(CliError::Usage("stab needs a file or --enumerate N D".into())),
            }
        }
        Command::Cone { file, dualize, extremal, facet } => cmd_cone(file, *dualize, *extremal, facet.as_deref()),
        Command::Types { op } => cmd_types(op),
        Command::Rays { file } => cmd_rays(file, global),
        Command::Rank { file } => cmd_rank(file),
        Command::Catalog { n, family } => cmd_catalog(*n, *family),
    }?;
    if global.timing {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        if let Ok(Value::Object(mut m)) = serde_json::from_str::<Value>(&out.stdout) {
            m.insert("timing_ms".into(), json!(ms));
            out.stdout = pretty(&Value::Object(m));
        }
    }
    Ok(out)
}

fn catalog(n: usize, family: CatalogFamily) -> CliResult<Vec<NamedInequality>> {
    Ok(match family {
        CatalogFamily::Xi => xi_catalog(n)?,
        CatalogFamily::Shannon => elemental_shannon(n)?,
        CatalogFamily::Pippenger => {
            let (a, b) = pippenger_sets(n)?;
            a.into_iter().chain(b).collect()
        }
        CatalogFamily::All => full_catalog(n)?,
    })
}

fn family_name(f: CatalogFamily) -> &'static str {
    match f {
        CatalogFamily::Xi => "xi",
        CatalogFamily::Shannon => "shannon",
        CatalogFamily::Pippenger => "pippenger",
        CatalogFamily::All => "all",
    }
}

fn violations_of(ineqs: &[NamedInequality], v: &EntropyVector, tol: f64, witness: &str) -> CliResult<(Vec<Violation>, f64)> {
    let mut out = Vec::new();
    let mut min = f64::INFINITY;
    for ineq in ineqs {
        let value = ineq.functional.evaluate(v)?;
        min = min.min(value);
        if value < -tol {
            let witness = if witness.is_empty() { ineq.functional.to_string() } else { witness.to_string() };
            out.push(Violation { name: ineq.name.clone(), value, witness });
        }
    }
    Ok((out, min))
}

pub fn cmd_entropy(path: &str, quantum: bool, classical: bool) -> CliResult<Output> {
    let inp = Input::read(path)?;
    let state = parse_state(&inp)?;
    let v = match state {
        StateInput::Classical(p) => {
            if quantum {
                return inp.fail("--quantum given for a classical distribution");
            }
            entropy_vector_classical(&p)?
        }
        StateInput::Density(rho) => {
            if classical {
                return inp.fail("--classical given for a quantum state");
            }
            entropy_vector_quantum(&rho)?
        }
        StateInput::Pure(psi) => {
            if classical {
                return inp.fail("--classical given for a quantum state");
            }
            psi.entropy_vector()?
        }
    };
    Ok(Output::clean(pretty(&entropy_vector_json(&v))))
}

pub fn cmd_check(path: &str, n: Option<usize>, family: CatalogFamily, g: &Global, argv: &[String]) -> CliResult<Output> {
    let inp = Input::read(path)?;
    let v = parse_entropy_vector(&inp)?;
    let n = n.unwrap_or(v.n());
    if n != v.n() {
        return inp.fail(format!("vector has {} parties but --catalog {n} was requested", v.n()));
    }
    let ineqs = catalog(n, family)?;
    let (violations, min) = violations_of(&ineqs, &v, g.tol, "")?;
    let results = json!({
        "n": n,
        "family": family_name(family),
        "tol": g.tol,
        "checked": ineqs.len(),
        "min_value": min,
        "entropy_vector": entropy_vector_json(&v),
    });
    Ok(RunReport { command: argv.to_vec(), inputs_digest: digest(&[&inp]), results, violations, timing_ms: None }.output())
}

fn log_linear_string(x: &LogLinear) -> String {
    let terms: Vec<String> = x
        .coefficients()
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(p, c)| format!("{}*log2({p})", format_rational(c)))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn exact_json(entries: &[LogLinear]) -> Value {
    let mut m = Map::new();
    for (s, x) in entries.iter().enumerate().skip(1) {
        m.insert(subset::label(s), json!(log_linear_string(x)));
    }
    Value::Object(m)
}

pub fn cmd_stab_file(path: &str, g: &Global, argv: &[String]) -> CliResult<Output> {
    let inp = Input::read(path)?;
    let (space, rows) = parse_generators(&inp.text)?;
    if let Some((i, j)) = isotropy_violation(space, &rows) {
        return inp.fail(format!("generators {} and {} have nonzero symplectic form; the module is not isotropic", i + 1, j + 1));
    }
    let m = Submodule::from_signed(space, &rows)?;
    let exact = stabilizer_entropy_exact(&m)?;
    let v = exact.to_float();
    let (violations, _) = violations_of(&xi_catalog(space.n)?, &v, g.tol, "")?;
    let results = json!({
        "d": space.d,
        "n": space.n,
        "generators": format_submodule(&m).lines().skip(1).collect::<Vec<_>>(),
        "cardinality": m.cardinality().to_string(),
        "lagrangian": m.is_lagrangian(),
        "entropy_vector": entropy_vector_json(&v),
        "exact": exact_json(&exact.entries),
        "classical_model": entropy_vector_json(&classical_model_vector(&m)?),
    });
    Ok(RunReport { command: argv.to_vec(), inputs_digest: digest(&[&inp]), results, violations, timing_ms: None }.output())
}

pub fn cmd_stab_enumerate(n: usize, d: u64, format: Format, g: &Global, argv: &[String]) -> CliResult<Output> {
    let space = PhaseSpace::new(n, d)?;
    let budget = g.budget.unwrap_or(DEFAULT_BUDGET);
    let e = enumerate_isotropic(space, budget, g.seed);
    let vectors: Vec<_> = e.modules.par_iter().map(stabilizer_entropy_exact).collect::<Result<Vec<_>, _>>()?;
    let mut seen = HashSet::new();
    let mut points = Vec::new();
    for (m, v) in e.modules.iter().zip(&vectors) {
        if seen.insert(v.entries.clone()) {
            points.push((m, v.to_float()));
        }
    }
    let xi = xi_catalog(n)?;
    let mut violations = Vec::new();
    for (m, v) in &points {
        let witness = format_submodule(m).trim_end().replace('\n', "; ");
        violations.extend(violations_of(&xi, v, g.tol, &witness)?.0);
    }
    if format == Format::Csv {
        let mut csv = String::from("point,subset_mask,entropy_bits\n");
        for (k, (_, v)) in points.iter().enumerate() {
            for (s, x) in v.entries().iter().enumerate().skip(1) {
                csv.push_str(&format!("{k},{s},{}\n", x + 0.0));
            }
        }
        return Ok(Output { stdout: csv, code: i32::from(!violations.is_empty()) });
    }
    let results = json!({
        "n": n,
        "d": d,
        "budget": budget,
        "seed": g.seed,
        "exhaustive": e.exhaustive,
        "truncated": e.truncated,
        "modules": e.modules.len(),
        "points": points.iter().map(|(_, v)| entropy_vector_json(v)).collect::<Vec<_>>(),
    });
    Ok(RunReport { command: argv.to_vec(), inputs_digest: digest(&[]), results, violations, timing_ms: None }.output())
}

fn known_names(n: usize) -> Vec<NamedInequality> {
    let mut all = Vec::new();
    if let Ok((a, b)) = pippenger_sets(n) {
        all.extend(a);
        all.extend(b);
    }
    all.extend(full_catalog(n).unwrap_or_default());
    all
}

fn name_of(f: &Functional, known: &[NamedInequality]) -> Value {
    known
        .iter()
        .find(|k| k.functional.same_ray(f))
        .map_or(Value::Null, |k| json!(k.name))
}

fn with_lineality(gens: &[Vec<BigInt>], lin: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut out = gens.to_vec();
    for l in lin {
        out.push(l.clone());
        out.push(l.iter().map(|x| -x).collect());
    }
    out
}

fn functional_of(n: usize, row: &[BigInt]) -> CliResult<Functional> {
    Ok(Functional::from_nonempty_ints(n, row)?)
}

pub fn cmd_cone(path: &str, dualize: bool, extremal: bool, facet: Option<&str>) -> CliResult<Output> {
    let inp = Input::read(path)?;
    let c = parse_cone(&inp)?;
    let dim = (1 << c.n) - 1;
    let gens = c.generators.as_ref().map(|g| with_lineality(g, &c.lineality));
    let cone = match (&gens, &c.halfspaces) {
        (Some(g), Some(h)) => PolyCone::from_both(dim, g.clone(), h.clone())?,
        (Some(g), None) => PolyCone::from_generators(dim, g.clone())?,
        (None, Some(h)) => PolyCone::from_halfspaces(dim, h.clone())?,
        (None, None) => unreachable!("parse_cone requires a representation"),
    };
    let known = known_names(c.n);
    if let Some(facet_arg) = facet {
        return cone_facet(&inp, c.n, &cone, facet_arg, &known);
    }
    let (rays, h) = if dualize {
        let dual = cone.dual()?;
        (dual.extremal_rays()?, dual.h_rep()?)
    } else if extremal {
        (cone.extremal_rays()?, cone.h_rep()?)
    } else {
        return Err(CliError::Usage("cone needs one of --dualize, --extremal, --facet".into()));
    };
    let mut body = Map::new();
    body.insert("n".into(), json!(c.n));
    body.insert("coordinates".into(), coordinate_labels(c.n));
    body.insert("generators".into(), int_rows_json(&rays.rays));
    body.insert("lineality".into(), int_rows_json(&rays.lineality));
    if dualize {
        let fs = rays.rays.iter().map(|r| functional_of(c.n, r)).collect::<CliResult<Vec<_>>>()?;
        body.insert("generator_exprs".into(), Value::Array(fs.iter().map(|f| json!(f.to_string())).collect()));
        body.insert("generator_names".into(), Value::Array(fs.iter().map(|f| name_of(f, &known)).collect()));
    }
    body.insert("halfspaces".into(), int_rows_json(&h));
    Ok(Output::clean(pretty(&Value::Object(body))))
}

fn cone_facet(inp: &Input, n: usize, cone: &PolyCone, facet_arg: &str, known: &[NamedInequality]) -> CliResult<Output> {
    let f = match known.iter().find(|k| k.name == facet_arg) {
        Some(k) => k.functional.clone(),
        None => {
            let coeffs = facet_arg
                .split(',')
                .map(|t| entrocone::exact::parse_rational(t.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("--facet {facet_arg:?} is neither a catalog name nor a coefficient list")))?;
            Functional::from_nonempty(n, &coeffs)?
        }
    };
    let ext = cone.extremal_rays()?;
    let points: Vec<Vec<BigRational>> = ext
        .as_cone_generators()
        .iter()
        .map(|r| std::iter::once(BigRational::zero()).chain(r.iter().map(|x| BigRational::from_integer(x.clone()))).collect())
        .collect();
    let mut body = Map::new();
    body.insert("n".into(), json!(n));
    body.insert("functional".into(), json!(f.to_string()));
    body.insert("name".into(), name_of(&f, known));
    let bad = points.iter().position(|p| f.evaluate_exact(p).map(|v| v < BigRational::zero()).unwrap_or(true));
    if let Some(i) = bad {
        body.insert("valid".into(), json!(false));
        body.insert("violating_generator".into(), Value::Array(points[i][1..].iter().map(rational_json).collect()));
        let _ = inp;
        return Ok(Output { stdout: pretty(&Value::Object(body)), code: 1 });
    }
    let rep = is_facet(&f, &points)?;
    body.insert("valid".into(), json!(true));
    body.insert("is_facet".into(), json!(rep.is_facet));
    body.insert("face_dimension".into(), json!(rep.face_dimension));
    body.insert("cone_dimension".into(), json!(rep.cone_dimension));
    Ok(Output::clean(pretty(&Value::Object(body))))
}

pub fn cmd_catalog(n: usize, family: CatalogFamily) -> CliResult<Output> {
    subset::check_parties(n)?;
    let ineqs = catalog(n, family)?;
    let rows: Vec<Vec<BigInt>> = ineqs.iter().map(|i| i.functional.to_primitive()).collect();
    let body = json!({
        "n": n,
        "family": family_name(family),
        "coordinates": coordinate_labels(n),
        "halfspaces": int_rows_json(&rows),
        "halfspace_names": ineqs.iter().map(|i| i.name.clone()).collect::<Vec<_>>(),
    });
    Ok(Output::clean(pretty(&body)))
}

fn partition(text: &str) -> CliResult<Partition> {
    Ok(Partition::parse(text)?)
}

fn counts(text: &str) -> CliResult<Vec<u64>> {
    text.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("bad count list {text:?}"))))
        .collect()
}

fn u128_json(x: u128) -> Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn biguint_json(x: &num_bigint::BigUint) -> Value {
    big_json(&BigInt::from(x.clone()))
}

pub fn cmd_types(op: &TypesOp) -> CliResult<Output> {
    let body = match op {
        TypesOp::Size { counts: c } => {
            let f = counts(c)?;
            json!({
                "counts": f,
                "size": biguint_json(&types::type_class_size(&f)),
                "log2_size": types::log2_type_class_size(&f).to_f64(),
            })
        }
        TypesOp::Cy { file, k } => {
            let inp = Input::read(file)?;
            let StateInput::Classical(p) = parse_state(&inp)? else {
                return inp.fail("cy needs a classical distribution");
            };
            let freq = types::scaled_type(&p, *k)?;
            let qk = freq.size() as f64;
            let cy = types::chan_yeung_vector(&p, *k)?;
            let h = entropy_vector_classical(&p)?;
            let support = freq.counts.iter().filter(|&&c| c > 0).count() as f64;
            json!({
                "k": k,
                "q": (qk as u64) / k,
                "vector": entropy_vector_json(&cy),
                "entropy": entropy_vector_json(&h),
                "normalized_error": cy.scale(1.0 / qk).max_abs_diff(&h)?,
                "bound": support * (qk + 1.0).log2() / qk,
            })
        }
        TypesOp::Kostka { shape, content } => {
            let mu = partition(shape)?;
            let c: Vec<usize> = counts(content)?.into_iter().map(|x| x as usize).collect();
            json!({ "shape": mu.parts(), "content": c, "kostka": u128_json(types::kostka(&mu, &c)) })
        }
        TypesOp::Kron { lambda, mu, nu } => {
            let (l, m, n) = (partition(lambda)?, partition(mu)?, partition(nu)?);
            let h = types::classical_kronecker(&l, &m, &n);
            json!({ "lambda": l.parts(), "mu": m.parts(), "nu": n.parts(), "kronecker": u128_json(h), "compatible": h != 0 })
        }
        TypesOp::Restrict { mu, d } => {
            let m = partition(mu)?;
            let eta = types::restriction_multiplicities(&m, *d)?;
            let total: num_bigint::BigUint = eta.iter().map(|(nu, &c)| num_bigint::BigUint::from(c) * types::dim_specht(nu)).sum();
            let weyl = types::dim_weyl(&m, *d);
            json!({
                "mu": m.parts(),
                "d": d,
                "multiplicities": eta.iter().rev().map(|(nu, &c)| json!({ "nu": nu.parts(), "eta": u128_json(c) })).collect::<Vec<_>>(),
                "dim_weyl": biguint_json(&weyl),
                "dimension_check": total == weyl,
            })
        }
        TypesOp::Aep { p, n, eps } => {
            let probs = p
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad probability list {p:?}"))))
                .collect::<CliResult<Vec<_>>>()?;
            json!({ "p": probs, "n": n, "eps": eps, "mass": types::aep_mass(&probs, *n, *eps)? })
        }
        TypesOp::Dims { lambda, d } => {
            let l = partition(lambda)?;
            let mut m = Map::new();
            m.insert("lambda".into(), json!(l.parts()));
            m.insert("dim_specht".into(), biguint_json(&types::dim_specht(&l)));
            m.insert("dim_permutation_module".into(), biguint_json(&types::dim_permutation_module(&l)));
            if let Some(d) = d {
                m.insert("d".into(), json!(d));
                m.insert("dim_weyl".into(), biguint_json(&types::dim_weyl(&l, *d)));
            }
            Value::Object(m)
        }
        TypesOp::SchurWeyl { d, n } => json!({ "d": d, "n": n, "holds": types::schur_weyl_dimension_check(*d, *n) }),
    };
    Ok(Output::clean(pretty(&body)))
}

fn verdict_json(v: &Verdict) -> Value {
    let witness = match v {
        Verdict::Splits { subset } => json!({ "zero_entropy_subset": subset::label(*subset) }),
        Verdict::Exceptional { ratio } => json!({ "ratio": ratio }),
        Verdict::AllFlat => Value::Null,
        Verdict::NotCandidate { non_flat } => json!({ "non_flat_subset": subset::label(*non_flat) }),
    };
    json!({ "code": v.code(), "name": v.name(), "witness": witness })
}

fn report_json(kind: &str, n: usize, rep: &DifferentialReport, verdict: &Verdict) -> Value {
    let basis = if rep.pairs.is_empty() {
        Value::Array(
            rep.basis
                .iter()
                .map(|b| json!({ "re": b.iter().map(|z| z.re).collect::<Vec<_>>(), "im": b.iter().map(|z| z.im).collect::<Vec<_>>() }))
                .collect(),
        )
    } else {
        Value::Array(rep.pairs.iter().map(|(x, y)| json!({ "plus": x, "minus": y })).collect())
    };
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| {
            json!({
                "subset": subset::label(r.subset),
                "status": r.status.as_str(),
                "entropy": r.entropy,
                "spectrum": r.spectrum,
                "values": r.values,
            })
        })
        .collect();
    json!({
        "kind": kind,
        "n": n,
        "columns": rep.columns(),
        "basis": basis,
        "rows": rows,
        "rank": rep.rank,
        "verdict": verdict_json(verdict),
    })
}

pub fn cmd_rays(path: &str, g: &Global) -> CliResult<Output> {
    let inp = Input::read(path)?;
    let body = match parse_state(&inp)? {
        StateInput::Classical(p) => {
            let rep = classical_differential(&p, g.tol)?;
            report_json("classical", p.n_parties(), &rep, &rep.verdict)
        }
        StateInput::Pure(psi) => {
            let rep = entropy_differential(&psi, g.tol)?;
            report_json("pure", psi.n_parties(), &rep, &rep.verdict)
        }
        StateInput::Density(rho) => {
            let verdict = classify_quantum(&rho, g.tol)?;
            let rep = entropy_differential(&purify(&rho)?, g.tol)?;
            report_json("mixed-purified", rho.n_parties() + 1, &rep, &verdict)
        }
    };
    Ok(Output::clean(pretty(&body)))
}

pub fn cmd_rank(path: &str) -> CliResult<Output> {
    let inp = Input::read(path)?;
    let fam = parse_family(&inp.text)?;
    let r = rank_vector(&fam);
    let mut ranks = Map::new();
    for (s, x) in r.iter().enumerate() {
        ranks.insert(subset::label(s as Subset), json!(x));
    }
    let h = rank_to_entropy(&fam)?;
    let witness = match rank_witness(&fam)? {
        Some(w) => json!(entropy_vector_classical(&w)?.max_abs_diff(&h)? < 1e-9),
        None => Value::Null,
    };
    let body = json!({
        "p": fam.p(),
        "m": fam.m(),
        "n": fam.n(),
        "rank_vector": ranks,
        "entropy_vector": entropy_vector_json(&h),
        "witness_agrees": witness,
    });
    Ok(Output::clean(pretty(&body)))
}
