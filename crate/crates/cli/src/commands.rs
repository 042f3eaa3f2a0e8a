//! One function per subcommand, each turning a loaded input into a report.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde_json::{json, Value};
use steinhc::graded_algebra::GradedDims;
use steinhc::handle_dynamics::{self as handle, HandleSpec, OrbitWarning, DRIFT_TOL};
use steinhc::polarization::{self, PolarizationData, PolarizationWarning, RelationRow};
use steinhc::prequant::{self, PrequantSpec};
use steinhc::rational::{format_ratio, parse_degree, parse_rational};
use steinhc::stein_hc::{self, HCGenerator};
use steinhc::SteinDomainSpec;

use crate::input::{ManifoldFile, PolarizationInput};
use crate::output::{Report, Table};
use crate::{invalid, CliError, CutoffArgs, CzIndexArgs, FullHcArgs, PairingArgs, PrequantArgs, ReebArgs};

/// Relative tolerance on measured return times.
const RETURN_TIME_TOL: f64 = 1e-6;
/// Default integration step as a fraction of the orbit action.
const DEFAULT_STEP_FRACTION: f64 = 1e-4;

fn status(pass: bool) -> &'static str {
  if pass {
    "PASS"
  } else {
    "FAIL"
  }
}

fn wrong_kind(command: &str, expected: &str, file: &ManifoldFile) -> CliError {
  CliError::Invalid(format!("{command} needs a {expected} input, got {}", file.kind()))
}

fn stein<'a>(command: &str, file: &'a ManifoldFile) -> Result<&'a SteinDomainSpec, CliError> {
  match file {
    ManifoldFile::Stein(spec) => Ok(spec),
    other => Err(wrong_kind(command, "stein", other)),
  }
}

fn dims_table(dims: &GradedDims) -> Table {
  let mut table = Table::new(["degree", "rank"]);
  for (degree, rank) in dims.iter() {
    table.push([format_ratio(degree), rank.to_string()]);
  }
  table
}

pub fn cz_index(file: &ManifoldFile, args: &CzIndexArgs) -> Result<Report, CliError> {
  let spec = stein("cz-index", file)?;
  if args.m_max == 0 {
    return Err(CliError::Invalid("--m-max must be at least 1".into()));
  }
  if args.genus.is_some() || !args.mu_plus.is_empty() || !args.mu_minus.is_empty() {
    let genus = args.genus.unwrap_or(0);
    let dim = stein_hc::expected_dimension(genus, &args.mu_plus, &args.mu_minus, spec.n() as i64, args.marked);
    let mut table = Table::new(["genus", "positive", "negative", "marked", "dimension"]);
    let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    table.push([genus.to_string(), join(&args.mu_plus), join(&args.mu_minus), args.marked.to_string(), dim.to_string()]);
    let json = json!({
      "genus": genus, "mu_plus": args.mu_plus, "mu_minus": args.mu_minus,
      "marked": args.marked, "expected_dimension": dim,
    });
    return Ok(Report::new(table, json));
  }

  let mut gens = Vec::new();
  for point in spec.morse().points() {
    for m in 1..=args.m_max {
      gens.push(HCGenerator::new(spec, &point.id, m).map_err(invalid)?);
    }
  }
  gens.sort_by(|a, b| (a.degree, a.multiplicity, &a.crit_id).cmp(&(b.degree, b.multiplicity, &b.crit_id)));
  let mut table = Table::new(["point", "morse_index", "multiplicity", "cz", "degree"]);
  for g in &gens {
    let index = spec.morse().point(&g.crit_id).map_or(0, |p| p.index);
    table.push([g.crit_id.clone(), index.to_string(), g.multiplicity.to_string(), g.cz.to_string(), g.degree.to_string()]);
  }
  let wd = stein_hc::well_definedness_check(spec);
  let min = wd.min_plane_index.map_or_else(|| "none".to_string(), |v| v.to_string());
  let mut report = Report::new(table, json!({ "generators": gens, "well_definedness": wd }));
  report.summary.push(format!("minimum plane index {min} (needs > 0): {}", status(wd.pass)));
  report.passed = wd.pass;
  Ok(report)
}

pub fn cyl_hc(file: &ManifoldFile, args: &CutoffArgs) -> Result<Report, CliError> {
  let spec = stein("cyl-hc", file)?;
  let dims = stein_hc::cyl_hc(spec, args.cutoff);
  let yau = stein_hc::verify_yau_isomorphism(spec, args.cutoff);
  let mut report =
    Report::new(dims_table(&dims), json!({ "cutoff": args.cutoff, "dims": dims, "yau_isomorphism": yau }));
  report.summary.push(format!("isomorphism with shifted relative homology: {}", status(yau)));
  report.passed = yau;
  Ok(report)
}

pub fn full_hc(file: &ManifoldFile, args: &FullHcArgs) -> Result<Report, CliError> {
  let spec = stein("full-hc", file)?;
  let series = stein_hc::full_hc_series(spec, args.cutoff).map_err(invalid)?;
  let mut table = Table::new(["degree", "dimension"]);
  for (degree, dim) in series.coefficients().iter().enumerate() {
    table.push([degree.to_string(), dim.to_string()]);
  }
  Ok(Report::new(table, json!({ "cutoff": args.cutoff, "coefficients": series.coefficients() })))
}

fn parse_cochain(entries: &[String]) -> Result<BTreeMap<String, steinhc::Rational>, CliError> {
  let mut cochain = BTreeMap::new();
  for entry in entries {
    let (id, value) =
      entry.split_once('=').ok_or_else(|| CliError::Invalid(format!("--cochain entry {entry:?} is not id=value")))?;
    let value = parse_rational(value.trim()).map_err(invalid)?;
    if cochain.insert(id.trim().to_string(), value).is_some() {
      return Err(CliError::Invalid(format!("--cochain lists {id:?} twice")));
    }
  }
  Ok(cochain)
}

pub fn pairing(file: &ManifoldFile, args: &PairingArgs) -> Result<Report, CliError> {
  let spec = stein("pairing", file)?;
  if let Some(marked) = args.marked {
    let missing = |flag: &str| CliError::Invalid(format!("{flag} is required with --marked"));
    let cup = parse_rational(args.cup.as_deref().ok_or_else(|| missing("--cup"))?).map_err(invalid)?;
    let deg1 = args.deg1.ok_or_else(|| missing("--deg1"))?;
    let deg2 = args.deg2.ok_or_else(|| missing("--deg2"))?;
    let value =
      stein_hc::two_point_correlator(spec, &cup, args.simple_minimum, deg1, deg2, marked).map_err(invalid)?;
    let mut table = Table::new(["marked", "simple_minimum", "deg1", "deg2", "correlator"]);
    table.push([marked.to_string(), args.simple_minimum.to_string(), deg1.to_string(), deg2.to_string(), format_ratio(&value)]);
    let json = json!({
      "marked": marked, "simple_minimum": args.simple_minimum, "deg1": deg1, "deg2": deg2,
      "correlator": format_ratio(&value),
    });
    return Ok(Report::new(table, json));
  }

  if let Some(degree) = args.matrix_degree {
    let matrix = stein_hc::pairing_matrix(spec, degree).map_err(invalid)?;
    let labels: Vec<String> = matrix.generators.iter().map(|g| format!("{}^{}", g.crit_id, g.multiplicity)).collect();
    let mut table = Table::new(std::iter::once("generator".to_string()).chain(labels.iter().cloned()));
    let mut rows = Vec::new();
    for (label, row) in labels.iter().zip(&matrix.entries) {
      let cells: Vec<String> = row.iter().map(format_ratio).collect();
      table.push(std::iter::once(label.clone()).chain(cells.iter().cloned()));
      rows.push(cells);
    }
    let rank = matrix.rank();
    let mut report =
      Report::new(table, json!({ "degree": degree, "generators": matrix.generators, "entries": rows, "rank": rank }));
    report.summary.push(format!("rank {rank} of {}", labels.len()));
    return Ok(report);
  }

  let id = args.generator.as_deref().ok_or_else(|| {
    CliError::Invalid("pairing needs --generator and --multiplicity, --matrix-degree, or --marked".into())
  })?;
  let m = args.multiplicity.ok_or_else(|| CliError::Invalid("--multiplicity is required with --generator".into()))?;
  let generator = HCGenerator::new(spec, id, m).map_err(invalid)?;
  let cochain = parse_cochain(&args.cochain)?;
  let value = stein_hc::gw_pairing(spec, &generator, &cochain).map_err(invalid)?;
  let mut table = Table::new(["generator", "multiplicity", "degree", "pairing", "correlator"]);
  table.push([
    id.to_string(),
    m.to_string(),
    generator.degree.to_string(),
    format_ratio(&value.pairing),
    format_ratio(&value.correlator),
  ]);
  Ok(Report::new(table, json!({ "generator": generator, "value": value })))
}

fn handle_spec(file: &ManifoldFile) -> Result<&HandleSpec, CliError> {
  match file {
    ManifoldFile::Handle(spec) => Ok(spec),
    other => Err(wrong_kind("reeb-verify", "handle", other)),
  }
}

pub fn reeb_verify(file: &ManifoldFile, args: &ReebArgs) -> Result<Report, CliError> {
  let spec = handle_spec(file)?;
  let modes = [args.trajectory, args.first_return, args.max_cz.is_some()].iter().filter(|m| **m).count();
  if modes > 1 {
    return Err(CliError::Invalid("--trajectory, --first-return and --max-cz are mutually exclusive".into()));
  }
  if args.trajectory {
    return trajectory(spec, args);
  }
  if args.first_return {
    return first_returns(spec, args);
  }
  let m_max = args.m_max.ok_or_else(|| CliError::Invalid("--m-max is required".into()))?;
  if let Some(max_cz) = args.max_cz {
    return orbits(spec, m_max, max_cz);
  }

  let index = handle::verify_index_formula(spec, m_max).map_err(invalid)?;
  let mut table = Table::new(["multiplicity", "numeric_cz", "expected_cz", "status"]);
  for row in &index.rows {
    table.push([row.multiplicity.to_string(), row.numeric.to_string(), row.expected.to_string(), status(row.pass).into()]);
  }
  let passed = index.pass;
  let mut report = Report::new(table, serde_json::to_value(&index).expect("report serializes"));
  report.passed = passed;
  Ok(report)
}

fn orbits(spec: &HandleSpec, m_max: u32, max_cz: i64) -> Result<Report, CliError> {
  let found = handle::enumerate_orbits(spec, m_max, max_cz).map_err(invalid)?;
  let mut table = Table::new(["plane", "multiplicity", "period", "action", "cz", "good"]);
  for o in &found.orbits {
    table.push([
      o.plane.to_string(),
      o.multiplicity.to_string(),
      format!("{:.12e}", o.period),
      format!("{:.12e}", o.action),
      o.cz.to_string(),
      o.good.to_string(),
    ]);
  }
  let mut report = Report::new(table, serde_json::to_value(&found).expect("orbits serialize"));
  for warning in &found.warnings {
    let OrbitWarning::Resonant(r) = warning;
    report.summary.push(format!(
      "RESONANT: planes {} and {} have coefficient ratio {}/{}",
      r.plane_a, r.plane_b, r.p, r.q
    ));
  }
  Ok(report)
}

fn start_plane(spec: &HandleSpec, args: &ReebArgs) -> Result<(u32, f64), CliError> {
  let plane = args.plane.unwrap_or(spec.n());
  let a = spec.elliptic_coefficient(plane).ok_or_else(|| invalid(handle::HandleError::InvalidPlane { plane }))?;
  Ok((plane, a))
}

fn trajectory(spec: &HandleSpec, args: &ReebArgs) -> Result<Report, CliError> {
  let (plane, a) = start_plane(spec, args)?;
  let action = spec.c() * PI / a;
  let t_end = args.time.ok_or_else(|| CliError::Invalid("--time is required with --trajectory".into()))?;
  let dt = args.dt.unwrap_or(action * DEFAULT_STEP_FRACTION);
  let start = spec.orbit_point(plane).map_err(invalid)?;
  let traj = handle::integrate_reeb(spec, &start, t_end, dt).map_err(invalid)?;
  let mut headers = vec!["t".to_string(), "hamiltonian_time".to_string()];
  for i in 1..=spec.n() {
    headers.push(format!("x_{i}"));
    headers.push(format!("y_{i}"));
  }
  headers.push("phi".into());
  let mut table = Table::new(headers);
  for s in &traj.samples {
    let mut row = vec![format!("{:e}", s.t), format!("{:e}", s.hamiltonian_time)];
    row.extend(s.point.iter().map(|v| format!("{v:e}")));
    row.push(format!("{:e}", s.phi));
    table.push(row);
  }
  let drift_ok = traj.max_drift <= DRIFT_TOL;
  let mut report = Report::new(table, serde_json::to_value(&traj).expect("trajectory serializes"));
  report.csv = Some(traj.to_csv());
  report.summary.push(format!("max relative drift of phi {:e} (tolerance {DRIFT_TOL:e}): {}", traj.max_drift, status(drift_ok)));
  report.passed = drift_ok;
  Ok(report)
}

fn first_returns(spec: &HandleSpec, args: &ReebArgs) -> Result<Report, CliError> {
  let planes: Vec<u32> = match args.plane {
    Some(_) => vec![start_plane(spec, args)?.0],
    None => spec.elliptic_planes().collect(),
  };
  let mut table =
    Table::new(["plane", "reeb_time", "expected_reeb", "hamiltonian_time", "expected_hamiltonian", "distance", "status"]);
  let mut rows = Vec::new();
  let mut passed = true;
  for plane in planes {
    let a = spec.elliptic_coefficient(plane).expect("plane is elliptic");
    let expected_h = PI / a;
    let expected_reeb = spec.c() * expected_h;
    let dt = args.dt.unwrap_or(expected_reeb * DEFAULT_STEP_FRACTION);
    let start = spec.orbit_point(plane).map_err(invalid)?;
    let ret = handle::first_return(spec, &start, dt, 2.0 * expected_reeb).map_err(invalid)?;
    let rel = |x: f64, e: f64| (x - e).abs() / e;
    let pass = rel(ret.hamiltonian_time, expected_h) <= RETURN_TIME_TOL
      && rel(ret.reeb_time, expected_reeb) <= RETURN_TIME_TOL
      && ret.distance <= DRIFT_TOL;
    passed &= pass;
    table.push([
      plane.to_string(),
      format!("{:.12e}", ret.reeb_time),
      format!("{expected_reeb:.12e}"),
      format!("{:.12e}", ret.hamiltonian_time),
      format!("{expected_h:.12e}"),
      format!("{:e}", ret.distance),
      status(pass).into(),
    ]);
    rows.push(json!({
      "plane": plane, "return": ret, "expected_reeb_time": expected_reeb,
      "expected_hamiltonian_time": expected_h, "pass": pass,
    }));
  }
  let mut report = Report::new(table, json!({ "returns": rows, "pass": passed }));
  report.passed = passed;
  Ok(report)
}

pub fn prequant_hc(file: &ManifoldFile, args: &PrequantArgs) -> Result<Report, CliError> {
  let spec: &PrequantSpec = match file {
    ManifoldFile::Prequant(spec) => spec,
    other => return Err(wrong_kind("prequant-hc", "prequant", other)),
  };
  let cutoff = parse_degree(&args.cutoff).map_err(invalid)?;
  let dims = prequant::prequant_cyl_hc(spec, cutoff).map_err(invalid)?;
  Ok(Report::new(dims_table(&dims), json!({ "cutoff": format_ratio(&cutoff), "dims": dims })))
}

fn payload_error(e: impl std::fmt::Display) -> CliError { CliError::Invalid(format!("payload: {e}")) }

/// Fills in omitted `b` and `c` and validates.
fn polarization_data(command: &str, file: &ManifoldFile) -> Result<(PolarizationData, Vec<String>), CliError> {
  let input: &PolarizationInput = match file {
    ManifoldFile::Polarization(input) => input,
    other => return Err(wrong_kind(command, "polarization", other)),
  };
  let mut notes = Vec::new();
  let b = match &input.b {
    Some(b) => b.clone(),
    None => {
      let b = polarization::solve_betti(input.n, &input.a).map_err(payload_error)?;
      notes.push(format!("b solved from a: {b:?}"));
      b
    },
  };
  let c = match input.c {
    Some(c) => c,
    None => {
      let d = input.a.len().checked_sub(1).ok_or_else(|| CliError::Invalid("payload.a: must be non-empty".into()))?;
      let chern = polarization::derive_chern(input.n, d, input.k).map_err(payload_error)?;
      if chern.non_integer {
        return Err(CliError::Invalid(format!("payload.c: derived value {} is not an integer", format_ratio(&chern.value))));
      }
      notes.push(format!("c derived from a and k: {}", chern.value));
      *chern.value.numer()
    },
  };
  let data = PolarizationData::new(input.n, input.a.clone(), b, input.k, c).map_err(payload_error)?;
  Ok((data, notes))
}

pub fn polarization_check(file: &ManifoldFile) -> Result<Report, CliError> {
  let (data, notes) = polarization_data("polarization-check", file)?;
  let report = polarization::check_relations(&data);
  let mut table = Table::new(["group", "relation", "lhs", "rhs", "status"]);
  let groups: [(&str, &[RelationRow]); 3] =
    [("symmetry", &report.symmetry), ("accumulation", &report.accumulation), ("duality", &report.duality)];
  for (group, rows) in groups {
    for row in rows {
      table.push([group.to_string(), row.relation.clone(), row.lhs.to_string(), row.rhs.to_string(), status(row.pass).into()]);
    }
  }
  let passed = report.pass;
  let mut out = Report::new(table, serde_json::to_value(&report).expect("relations serialize"));
  out.summary = notes;
  for warning in &report.warnings {
    out.summary.push(match warning {
      PolarizationWarning::DegreeAboveOne { k } => format!("warning: degree k = {k} > 1"),
      PolarizationWarning::ChernMismatch { given, derived } => {
        format!("warning: c = {given} differs from the value {derived} forced by a and k")
      },
    });
  }
  out.summary.push(format!("overall: {}", status(passed)));
  out.passed = passed;
  Ok(out)
}

pub fn cross_check(file: &ManifoldFile, args: &CutoffArgs) -> Result<Report, CliError> {
  let (data, notes) = polarization_data("cross-check", file)?;
  let report = polarization::cross_check_polarization(&data, args.cutoff).map_err(invalid)?;
  let mut table = Table::new(["degree", "stein_rank", "prequant_rank", "status"]);
  let degrees: std::collections::BTreeSet<_> = report.stein.degrees().chain(report.prequant.degrees()).copied().collect();
  for degree in &degrees {
    let (s, p) = (report.stein.rank(degree), report.prequant.rank(degree));
    table.push([format_ratio(degree), s.to_string(), p.to_string(), status(s == p).into()]);
  }
  let agree = report.agree;
  let json: Value = serde_json::to_value(&report).expect("cross-check serializes");
  let mut out = Report::new(table, json);
  out.summary = notes;
  out.summary.push(format!("agreement up to degree {}: {}", args.cutoff, status(agree)));
  out.passed = agree;
  Ok(out)
}
