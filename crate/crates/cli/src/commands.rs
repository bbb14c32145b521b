use std::path::Path;

use serde_json::{json, Value};
use thermopress::classic::{classical_pressure, truncation_pressure, CountableSystem};
use thermopress::dynamics::{
    irregular_witness, mp_acip_estimate, mp_lyapunov_spectrum, mp_pressure_curve, mp_star_equilibrium,
    ns_nonwandering_pressure, ns_orbit_stats, ns_star_pressure, MpMap, NorthSouthMap, NsSet,
};
use thermopress::io::{caratheodory_csv, pressure_json, spectrum_csv, star_json};
use thermopress::measures::{LocallyConstantPotential, MarkovMeasure};
use thermopress::par::Execution;
use thermopress::pesin::{pp_critical, PpConfig};
use thermopress::star::{
    achievable_interval, bowen_root_classical, irregular_set_pressure, level_set_spectrum, property_suite,
    star_equilibrium, star_pressure, LevelSet, MeasureFamily,
};
use thermopress::symbolic::{beta_count, beta_entropy, PointSpec, Sft, Word};

use crate::args::{parse_list, Opts};
use crate::{Artifact, CliError};

type Outcome = (Vec<Artifact>, String, Result<(), String>);

fn json_artifact(v: &Value) -> Artifact {
    let mut body = serde_json::to_string_pretty(v).expect("json values serialize");
    body.push('\n');
    Artifact { ext: "json", body }
}

fn ok(artifacts: Vec<Artifact>, summary: String) -> Result<Outcome, CliError> {
    Ok((artifacts, summary, Ok(())))
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn system(opts: &Opts) -> Result<Sft, CliError> {
    let name = opts.system.as_deref().unwrap_or("full2");
    if name == "golden" {
        return Ok(Sft::golden_mean());
    }
    if let Some(n) = name.strip_prefix("full") {
        let n: usize = n.parse().map_err(|_| usage(format!("unknown system {name:?}")))?;
        if n == 0 {
            return Err(usage("alphabet must be positive"));
        }
        return Ok(Sft::full(n));
    }
    if Path::new(name).is_file() {
        let text = std::fs::read_to_string(name)?;
        return serde_json::from_str(&text).map_err(|e| usage(format!("{name}: {e}")));
    }
    Err(usage(format!("unknown system {name:?}; expected full<N>, golden or a JSON file")))
}

fn potential(sft: &Sft, spec: Option<&str>) -> Result<LocallyConstantPotential, CliError> {
    let Some(spec) = spec else {
        return Ok(LocallyConstantPotential::zero(sft));
    };
    if spec.ends_with(".json") {
        let text = std::fs::read_to_string(spec)?;
        let json = serde_json::from_str(&text).map_err(|e| usage(format!("{spec}: {e}")))?;
        return Ok(LocallyConstantPotential::from_json(sft, &json)?);
    }
    let values = parse_list(spec)?;
    let n = sft.alphabet();
    if values.len() == n {
        Ok(LocallyConstantPotential::symbol_values(sft, &values)?)
    } else if values.len() == n * n {
        let rows: Vec<Vec<f64>> = values.chunks(n).map(|r| r.to_vec()).collect();
        Ok(LocallyConstantPotential::pair_values(sft, &rows)?)
    } else {
        Err(usage(format!("{} potential values for an alphabet of {n}; need {n} or {}", values.len(), n * n)))
    }
}

fn single_alpha(opts: &Opts) -> Result<f64, CliError> {
    let a = parse_list(opts.alpha.as_deref().ok_or_else(|| usage("--alpha is required"))?)?;
    match a.as_slice() {
        [x] => Ok(*x),
        _ => Err(usage("exactly one --alpha value is expected here")),
    }
}

pub fn dispatch(name: &str, opts: &Opts) -> Result<Outcome, CliError> {
    match name {
        "pressure" => pressure(opts),
        "star" => star(opts),
        "spectrum" => spectrum(opts),
        "bowen-root" => bowen(opts),
        "pp" => pp(opts),
        "synthesize" => synthesize(opts),
        "ns" => north_south(opts),
        "betashift" => betashift(opts),
        "truncate" => truncate(opts),
        "verify" => verify(opts),
        _ => Err(usage(format!("unknown command {name}"))),
    }
}

fn pressure(opts: &Opts) -> Result<Outcome, CliError> {
    let sft = system(opts)?;
    let phi = potential(&sft, opts.phi.as_deref())?;
    let p = classical_pressure(&sft, &phi)?;
    let summary = format!("P(phi) = {:.12} (eigen residual {:.1e})", p.value, p.eigen_residual);
    ok(vec![json_artifact(&pressure_json(&p))], summary)
}

fn family(sft: &Sft, opts: &Opts) -> Result<MeasureFamily, CliError> {
    let spec = opts.family.as_deref().unwrap_or("all");
    Ok(match spec {
        "all" => MeasureFamily::AllInvariant,
        "empty" => MeasureFamily::Empty,
        "level" => {
            let phi = potential(sft, opts.phi.as_deref())?;
            MeasureFamily::LevelSet(LevelSet::new(sft, phi, single_alpha(opts)?)?)
        }
        _ => {
            if let Some(w) = spec.strip_prefix("periodic:") {
                let w: Word = w.parse()?;
                MeasureFamily::Single(MarkovMeasure::periodic_orbit(sft, &w.0)?)
            } else if let Some(p) = spec.strip_prefix("bernoulli:") {
                let probs = parse_list(p)?;
                let mu = MarkovMeasure::bernoulli(&probs)?;
                mu.check_compatible(sft)?;
                MeasureFamily::Single(mu)
            } else {
                return Err(usage(format!(
                    "unknown family {spec:?}; expected all, empty, level, irregular, periodic:<word> or bernoulli:<p,..>"
                )));
            }
        }
    })
}

fn star(opts: &Opts) -> Result<Outcome, CliError> {
    let sft = system(opts)?;
    let psi = potential(&sft, opts.psi.as_deref())?;
    let (result, label) = if opts.family.as_deref() == Some("irregular") {
        (irregular_set_pressure(&sft, &psi)?.star, "irregular set".to_string())
    } else {
        let fam = family(&sft, opts)?;
        let r = match fam {
            MeasureFamily::LevelSet(_) | MeasureFamily::Single(_) => star_equilibrium(&sft, &fam, &psi)
                .or_else(|_| star_pressure(&sft, &fam, &psi))?,
            _ => star_pressure(&sft, &fam, &psi)?,
        };
        (r, opts.family.clone().unwrap_or_else(|| "all".into()))
    };
    let summary = format!("P*(psi) over {label} = {:.12}", result.value);
    ok(vec![json_artifact(&star_json(&result))], summary)
}

fn spectrum(opts: &Opts) -> Result<Outcome, CliError> {
    if let Some(s) = opts.system.as_deref().and_then(|s| s.strip_prefix("mp:")) {
        return mp_spectrum(opts, s);
    }
    let sft = system(opts)?;
    let phi = potential(&sft, opts.phi.as_deref())?;
    let psi = potential(&sft, opts.psi.as_deref())?;
    let alphas = match &opts.alpha {
        Some(a) => parse_list(a)?,
        None => {
            let (lo, hi) = achievable_interval(&sft, &phi)?;
            (0..=20).map(|k| lo + (hi - lo) * k as f64 / 20.0).collect()
        }
    };
    let curve = level_set_spectrum(&sft, &phi, &psi, &alphas, Execution::default())?;
    let summary = format!("level-set spectrum at {} levels", curve.samples.len());
    ok(vec![Artifact { ext: "csv", body: spectrum_csv(&curve) }], summary)
}

fn mp_spectrum(opts: &Opts, s: &str) -> Result<Outcome, CliError> {
    let s: f64 = s.parse().map_err(|_| usage(format!("bad MP parameter {s:?}")))?;
    let map = MpMap::new(s)?;
    let depth = opts.depth.unwrap_or(20);
    let mut t: Vec<f64> = match &opts.q_grid {
        Some(q) => parse_list(q)?.into_iter().map(|q| -q).collect(),
        None => (0..=40).map(|k| -1.0 + 0.15 * k as f64).collect(),
    };
    t.sort_by(f64::total_cmp);
    let exec = Execution::default();
    let curve = mp_pressure_curve(&map, &t, depth, exec)?;
    let interval = curve.identity_interval();
    let alphas = match (&opts.alpha, interval) {
        (Some(a), _) => parse_list(a)?,
        (None, Some((lo, hi))) => (0..=20).map(|k| lo + (hi - lo) * k as f64 / 20.0).collect(),
        (None, None) => return Err(usage("no sign change on the tilt grid; pass --alpha")),
    };
    let spectrum = mp_lyapunov_spectrum(&curve, &alphas);
    let seeds: Vec<u64> = (0..10).map(|k| opts.seed.unwrap_or(0) + k).collect();
    let acip = mp_acip_estimate(&map, 1_000_000, &seeds, exec)?;
    let mid = 0.5 * acip.lambda;
    let eq = mp_star_equilibrium(mid, &acip)?;
    let meta = json!({
        "s": s,
        "depth": depth,
        "curve": curve,
        "root": curve.root(),
        "interval": interval,
        "acip": acip,
        "equilibrium_at_half_lambda": eq,
    });
    let summary = format!(
        "root {:?}, interval {:?}, acip exponent {:.4} (spread {:.4}..{:.4})",
        curve.root(),
        interval,
        acip.lambda,
        acip.spread.0,
        acip.spread.1
    );
    ok(
        vec![Artifact { ext: "csv", body: spectrum_csv(&spectrum) }, json_artifact(&meta)],
        summary,
    )
}

fn bowen(opts: &Opts) -> Result<Outcome, CliError> {
    let sft = system(opts)?;
    let phi = match opts.phi.as_deref() {
        Some(p) => potential(&sft, Some(p))?,
        None => LocallyConstantPotential::constant(&sft, -std::f64::consts::LN_2)?,
    };
    let root = bowen_root_classical(&sft, &phi)?;
    let summary = format!("root t* = {:.12}, unique: {}", root.t, root.strictly_decreasing);
    let verdict = if root.strictly_decreasing {
        Ok(())
    } else {
        Err("pressure curve is not strictly decreasing on the scan grid".into())
    };
    Ok((vec![json_artifact(&serde_json::to_value(&root).expect("serializable"))], summary, verdict))
}

fn pp(opts: &Opts) -> Result<Outcome, CliError> {
    let sft = system(opts)?;
    let phi = potential(&sft, opts.phi.as_deref())?;
    let points = opts
        .point
        .as_deref()
        .unwrap_or("0")
        .split(',')
        .map(|w| Ok(PointSpec::periodic(w.trim())?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut config = PpConfig::default();
    if let Some(d) = opts.depth {
        config.schedule = [d / 8, d / 4, d / 2, d].into_iter().filter(|&n| n > 0).collect();
        config.schedule.dedup();
    }
    let grid = (phi.inf() - 1.0, phi.sup() + 1.0);
    let est = pp_critical(&sft, &points, &phi, grid, &config)?;
    let meta = json!({
        "critical": est.critical,
        "bracket": [est.bracket.0, est.bracket.1],
        "width": est.width(),
        "notices": est.notices,
    });
    let summary = format!(
        "critical level {:.6} in [{:.6}, {:.6}]",
        est.critical, est.bracket.0, est.bracket.1
    );
    ok(
        vec![Artifact { ext: "csv", body: caratheodory_csv(&est) }, json_artifact(&meta)],
        summary,
    )
}

fn synthesize(opts: &Opts) -> Result<Outcome, CliError> {
    let sft = system(opts)?;
    let phi = match opts.phi.as_deref() {
        Some(p) => potential(&sft, Some(p))?,
        None => LocallyConstantPotential::symbol_values(&sft, &(0..sft.alphabet()).map(|s| s as f64).collect::<Vec<_>>())?,
    };
    let seed = opts.seed.unwrap_or(0);
    let w = irregular_witness(&sft, &phi, seed)?;
    let gap = w.certificate.gap().unwrap_or(0.0);
    let mut cert = serde_json::to_value(&w.certificate).expect("serializable");
    cert["levels"] = json!([w.levels.0, w.levels.1]);
    cert["gap"] = json!(gap);
    let summary = format!(
        "Birkhoff averages oscillate between {:.4} and {:.4} (gap {:.4}); target levels {:.4}, {:.4}",
        w.certificate.liminf.unwrap_or(f64::NAN),
        w.certificate.limsup.unwrap_or(f64::NAN),
        gap,
        w.levels.0,
        w.levels.1
    );
    ok(vec![json_artifact(&cert)], summary)
}

fn north_south(opts: &Opts) -> Result<Outcome, CliError> {
    let set: NsSet = opts.set.as_deref().unwrap_or("circle-minus-s").parse()?;
    let n = opts.depth.unwrap_or(10_000);
    let phi = |t: f64| NorthSouthMap::distance_to_north(t);
    let value = ns_star_pressure(set, &phi);
    let nw = ns_nonwandering_pressure(&phi);
    let x0 = NorthSouthMap::NORTH - 1e-3;
    let avg = ns_orbit_stats(x0, n, &[&phi])?[0];
    let out = json!({
        "set": opts.set.as_deref().unwrap_or("circle-minus-s"),
        "phi": "distance to N",
        "value": value,
        "nonwandering_value": nw,
        "phi_north": phi(NorthSouthMap::NORTH),
        "phi_south": phi(NorthSouthMap::SOUTH),
        "orbit_start": x0,
        "orbit_length": n,
        "orbit_average": avg,
    });
    let summary = format!("P* = {value}, non-wandering part {nw}, orbit average {avg:.6} over {n} steps");
    ok(vec![json_artifact(&out)], summary)
}

fn betashift(opts: &Opts) -> Result<Outcome, CliError> {
    let beta = opts.beta.unwrap_or((1.0 + 5f64.sqrt()) / 2.0);
    let n = opts.depth.unwrap_or(20);
    let count = beta_count(beta, n)?;
    let h = beta_entropy(beta, n)?;
    let out = json!({
        "beta": beta,
        "depth": n,
        "count": count.to_string(),
        "entropy_estimate": h,
        "log_beta": beta.ln(),
    });
    let summary = format!("{count} words of length {n}; entropy estimate {h:.6} vs log beta {:.6}", beta.ln());
    ok(vec![json_artifact(&out)], summary)
}

fn truncate(opts: &Opts) -> Result<Outcome, CliError> {
    let sys = match opts.system.as_deref().unwrap_or("full") {
        "full" => CountableSystem::full(),
        "renewal" => CountableSystem::renewal(),
        other => return Err(usage(format!("unknown countable system {other:?}; expected full or renewal"))),
    };
    let sizes: Vec<usize> = match &opts.sizes {
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| usage(format!("bad size {x:?}"))))
            .collect::<Result<_, _>>()?,
        None => vec![2, 4, 8],
    };
    let steps = truncation_pressure(&sys, &sizes)?;
    let summary = steps
        .iter()
        .map(|s| format!("{}: {}", s.size, s.value.map_or("none".into(), |v| format!("{v:.12}"))))
        .collect::<Vec<_>>()
        .join(", ");
    let out = json!({ "system": sys.name, "steps": steps });
    ok(vec![json_artifact(&out)], format!("truncation pressures {summary}"))
}

fn verify(opts: &Opts) -> Result<Outcome, CliError> {
    let systems = match &opts.system {
        Some(_) => vec![system(opts)?],
        None => vec![Sft::full(2), Sft::golden_mean()],
    };
    let seed = opts.seed.unwrap_or(1);
    let report = property_suite(&systems, seed)?;
    let failed: Vec<String> = report.failures().map(|c| format!("{} (system {})", c.name, c.system)).collect();
    let summary = format!(
        "{} checks, {} failed{}",
        report.checks.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(": {}", failed.join("; ")) }
    );
    let verdict = if failed.is_empty() { Ok(()) } else { Err(failed.join("; ")) };
    Ok((
        vec![json_artifact(&serde_json::to_value(&report).expect("serializable"))],
        summary,
        verdict,
    ))
}
