use burgers_crit::asymptotic::{ilin_u, scaling_constants};
use burgers_crit::inviscid::find_catastrophe;
use burgers_crit::model::{parse_model_text, ProblemSpec, GENERALIZED_BURGERS, STANDARD_BURGERS};
use burgers_crit::pearcey::{profile_u, ProfileQuery};
use burgers_crit::shockfront;
use burgers_crit::viscous::ViscousSolver;

const TOL: f64 = 1e-9;
const TAU: f64 = 1e-3;
/// The demo grid is narrower than the experiment grid; the initial data is
/// already below 0.03 at its ends.
const HALF_WIDTH: f64 = 6.0;

/// One of the two built-in models on the demo grid.
pub fn model(name: &str, nx: usize) -> Result<ProblemSpec, String> {
    let text = match name {
        "standard" => STANDARD_BURGERS,
        "generalized" => GENERALIZED_BURGERS,
        other => return Err(format!("unknown model '{other}'")),
    };
    let mut entries = parse_model_text(text).map_err(|e| e.to_string())?;
    entries.insert("x_min".into(), (-HALF_WIDTH).to_string());
    entries.insert("x_max".into(), HALF_WIDTH.to_string());
    entries.insert("nx".into(), nx.to_string());
    entries.insert("tau".into(), TAU.to_string());
    ProblemSpec::from_entries(&entries).map_err(|e| e.to_string())
}

pub fn catastrophe(name: &str) -> Result<Vec<f64>, String> {
    let spec = model(name, 64)?;
    let c = find_catastrophe(&spec).map_err(|e| e.to_string())?;
    let s = scaling_constants(&c, &spec.flux).map_err(|e| e.to_string())?;
    Ok(vec![c.x0, c.t0, c.v0, c.kappa, s.alpha, s.beta, s.gamma])
}

pub fn profile_curve(t: f64, x_lo: f64, x_hi: f64, n: usize) -> Result<Vec<f64>, String> {
    if n < 2 || x_hi.partial_cmp(&x_lo) != Some(std::cmp::Ordering::Greater) {
        return Err("need n >= 2 and x_hi > x_lo".into());
    }
    (0..n)
        .map(|i| {
            let x = x_lo + (x_hi - x_lo) * i as f64 / (n - 1) as f64;
            profile_u(ProfileQuery::new(x, t), TOL).map_err(|e| e.to_string())
        })
        .collect()
}

pub fn viscous_vs_profile(name: &str, eps: f64, t: f64, nx: usize) -> Result<Vec<f64>, String> {
    if !(0.0..=3.0).contains(&t) {
        return Err(format!("t = {t} is outside [0, 3]"));
    }
    let spec = model(name, nx)?;
    let cat = find_catastrophe(&spec).map_err(|e| e.to_string())?;
    let sc = scaling_constants(&cat, &spec.flux).map_err(|e| e.to_string())?;
    let mut solver = ViscousSolver::new(&spec).map_err(|e| e.to_string())?;
    let mut state = solver.init_state(eps).map_err(|e| e.to_string())?;
    solver.run_to(&mut state, t, TAU, &[]).map_err(|e| e.to_string())?;
    let xs = solver.grid().nodes();
    let mut out = Vec::with_capacity(3 * xs.len());
    out.extend(&xs);
    out.extend(&state.u);
    for &x in &xs {
        out.push(ilin_u(&cat, &sc, x, t, eps, TOL).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

pub fn shock_front(t_end: f64, steps: usize) -> Result<Vec<f64>, String> {
    let spec = model("standard", 64)?;
    let cat = find_catastrophe(&spec).map_err(|e| e.to_string())?;
    if t_end.partial_cmp(&cat.t0) != Some(std::cmp::Ordering::Greater) || steps == 0 {
        return Err(format!("t_end must exceed t0 = {:.6} and steps must be positive", cat.t0));
    }
    let dt = (t_end - cat.t0) / steps as f64;
    let trace = shockfront::trace(&spec, cat.x_foot, t_end, dt).map_err(|e| e.to_string())?;
    let mut out: Vec<f64> = trace.records.iter().map(|r| r.state.t).collect();
    out.extend(trace.records.iter().map(|r| r.state.x));
    Ok(out)
}
