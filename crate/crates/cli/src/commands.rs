//! Table builders behind each subcommand. Every row is computed through the
//! same library calls a caller would make directly, so rows reproduce
//! library values exactly.

use mml_core::factory::{SqueezeParam, DB_PER_NEPER};

use mml_core::protocols::{
    coherent_exact_t, coherent_scheme, entanglement_of, macro_components, remote_metrics, scheme_c,
    PsiBranches, RemoteParams, Transmission,
};
use mml_core::quadrature::{self, displaced_photon_discrimination, MacroMeasures, QuadGrid};
use mml_core::Error as CoreError;
use rayon::prelude::*;

use crate::args::{
    CommonArgs, CurveArgs, Fig2Args, Fig5Args, RemoteArgs, SummaryArgs, SweepArgs, TransmissionArg,
};
use crate::output::{format_sig, round_sig, Cell, Output, Table};
use crate::{CliError, Command, Result};

/// Largest subtraction order accepted on the command line.
pub const MAX_M: usize = 12;
pub const FIG2_HALF_WIDTH: f64 = 8.0;
/// Allowed deviation of each fig2 density column from unit integral.
pub const FIG2_MASS_TOL: f64 = 1e-7;
const FIG2_MAX_HALF_WIDTH: f64 = 64.0;
pub const FIG5_T_RANGE: (f64, f64) = (0.01, 0.99);

pub const STATUS_OK: &str = "ok";
/// `m = 0` at zero squeezing with balanced transmission: the measures are
/// the `r -> 0` limit, the herald itself yields a product state.
pub const STATUS_LIMIT: &str = "limit";
pub const STATUS_ZERO: &str = "zero-state";
pub const STATUS_IMPOSSIBLE: &str = "impossible-outcome";

pub fn execute(cmd: &Command) -> Result<(Vec<Output>, &CommonArgs)> {
    Ok(match cmd {
        Command::Summary(a) => (vec![Output::new("summary", summary(a)?)], &a.common),
        Command::Fig2(a) => (fig2(a)?, &a.common),
        Command::Fig3(a) => (vec![Output::new("fig3", fig3(a)?)], &a.common),
        Command::Fig4(a) => (vec![Output::new("fig4", fig4(a)?)], &a.common),
        Command::Fig5(a) => (fig5(a)?, &a.common),
        Command::Remote(a) => (vec![Output::new("remote", remote(a)?)], &a.common),
        Command::Sweep(a) => (vec![Output::new("sweep", sweep(a)?)], &a.common),
    })
}

/// Measures of `|Psi±>` and of the heralded micro-macro state at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMetrics {
    pub t: f64,
    pub t_bal: f64,
    pub measures: MacroMeasures,
    /// `None` when the herald yields no state (`T = 0` on the vacuum).
    pub entropy: Option<f64>,
    pub herald_weight: Option<f64>,
    pub status: &'static str,
}

pub fn evaluate_point(
    b: &PsiBranches,
    transmission: Transmission,
) -> mml_core::Result<PointMetrics> {
    let t = transmission.resolve(b.mean_n)?;
    let (plus, minus) = b.psi_pm(transmission)?;
    let measures = MacroMeasures::evaluate(&plus, &minus)?;
    let herald = match scheme_c(&b.lower, t) {
        Ok(out) => Some(out),
        Err(CoreError::ZeroState | CoreError::ImpossibleOutcome { .. }) => None,
        Err(e) => return Err(e),
    };
    let entropy = herald
        .as_ref()
        .map(|out| entanglement_of(&out.state))
        .transpose()?;
    let status = if herald.is_none() && transmission == Transmission::Balanced {
        STATUS_LIMIT
    } else {
        STATUS_OK
    };
    Ok(PointMetrics {
        t,
        t_bal: b.t_balanced(),
        measures,
        entropy,
        herald_weight: herald.map(|out| out.probability),
        status,
    })
}

/// Branches at `(m, db)`, or the row status when no state exists there.
pub fn branches_at(
    m: usize,
    db: f64,
) -> mml_core::Result<std::result::Result<PsiBranches, &'static str>> {
    let r = SqueezeParam::from_db(db)?.r();
    match PsiBranches::new(m, r) {
        Ok(b) => Ok(Ok(b)),
        Err(e) => row_status(e).map(Err),
    }
}

fn row_status(e: CoreError) -> mml_core::Result<&'static str> {
    match e {
        CoreError::ZeroState => Ok(STATUS_ZERO),
        CoreError::ImpossibleOutcome { .. } => Ok(STATUS_IMPOSSIBLE),
        other => Err(other),
    }
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(CliError::Config("--workers must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}"))),
    }
}

fn check_db(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(CliError::Config("no squeezing values given".into()));
    }
    for &db in values {
        SqueezeParam::from_db(db)?;
    }
    Ok(())
}

fn check_m(values: &[usize]) -> Result<()> {
    if values.is_empty() {
        return Err(CliError::Config("no subtraction orders given".into()));
    }
    match values.iter().find(|&&m| m > MAX_M) {
        Some(m) => Err(CliError::Config(format!("m = {m} exceeds {MAX_M}"))),
        None => Ok(()),
    }
}

fn policies(given: &[TransmissionArg]) -> Vec<TransmissionArg> {
    if given.is_empty() {
        vec![TransmissionArg::BALANCED, TransmissionArg::HALF]
    } else {
        given.to_vec()
    }
}

pub fn summary(a: &SummaryArgs) -> Result<Table> {
    match a.alpha {
        Some(alpha) => summary_cat(alpha, a.transmission),
        None => summary_squeezed(a),
    }
}

fn summary_squeezed(a: &SummaryArgs) -> Result<Table> {
    check_m(&[a.m])?;
    let r = SqueezeParam::from_db(a.db)?.r();
    let b = match PsiBranches::new(a.m, r) {
        Err(CoreError::ZeroState) => {
            return Err(CliError::Config(format!(
                "no photon can be subtracted {} times from the vacuum",
                a.m
            )))
        }
        other => other?,
    };
    let tr = a.transmission.0;
    let point = evaluate_point(&b, tr)?;
    if point.status == STATUS_LIMIT {
        return Err(CliError::Config(
            "balanced transmission is 0 at 0 dB for m = 0: the herald leaves a product state"
                .into(),
        ));
    }
    let (plus, minus) = b.psi_pm(tr)?;
    let disp = displaced_photon_discrimination(&plus, &minus)?;
    let mut t = Table::new(vec![
        "m",
        "r_db",
        "r",
        "transmission",
        "T",
        "T_bal",
        "D",
        "P",
        "snu",
        "entropy",
        "herald_weight",
        "n_plus",
        "n_minus",
        "beta",
    ]);
    t.push(vec![
        a.m.into(),
        a.db.into(),
        r.into(),
        Cell::Text(a.transmission.to_string()),
        point.t.into(),
        point.t_bal.into(),
        point.measures.d.into(),
        point.measures.p.into(),
        point.measures.snu.into(),
        point.entropy.into(),
        point.herald_weight.into(),
        disp.n_plus.into(),
        disp.n_minus.into(),
        disp.beta.into(),
    ]);
    Ok(t)
}

/// Even cat input. `bal` selects the transmission at which the macro
/// components are exactly `|±alpha>`.
fn summary_cat(alpha: f64, transmission: TransmissionArg) -> Result<Table> {
    let t_exact = coherent_exact_t(alpha)?;
    let t = match transmission.0 {
        Transmission::Balanced => t_exact,
        other => other.resolve(0.0)?,
    };
    let state = coherent_scheme(alpha, t)?;
    let comps = macro_components(&state)?;
    let measures = MacroMeasures::evaluate(&comps.plus, &comps.minus)?;
    let disp = displaced_photon_discrimination(&comps.plus, &comps.minus)?;
    let mut table = Table::new(vec![
        "alpha",
        "transmission",
        "T",
        "D",
        "P",
        "snu",
        "entropy",
        "herald_weight",
        "n_plus",
        "n_minus",
        "beta",
    ]);
    table.push(vec![
        alpha.into(),
        Cell::Text(transmission.to_string()),
        t.into(),
        measures.d.into(),
        measures.p.into(),
        measures.snu.into(),
        entanglement_of(&state)?.into(),
        state.herald_weight().into(),
        disp.n_plus.into(),
        disp.n_minus.into(),
        disp.beta.into(),
    ]);
    Ok(table)
}

/// Uniform grid on `[-L, L]` with `L >= 8`, widened until both densities
/// integrate to one within [`FIG2_MASS_TOL`].
pub fn fig2_densities(
    b: &PsiBranches,
    transmission: Transmission,
    points: usize,
) -> mml_core::Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (plus, minus) = b.psi_pm(transmission)?;
    let mut half = FIG2_HALF_WIDTH;
    loop {
        let grid = QuadGrid::uniform(-half, half, points)?;
        let p = quadrature::density(&plus, &grid)?;
        let q = quadrature::density(&minus, &grid)?;
        let residual = (grid.integrate(&p) - 1.0)
            .abs()
            .max((grid.integrate(&q) - 1.0).abs());
        if residual < FIG2_MASS_TOL {
            return Ok((grid.points, p, q));
        }
        if half >= FIG2_MAX_HALF_WIDTH {
            return Err(CoreError::Integration { residual });
        }
        half *= 1.25;
    }
}

fn label_db(db: f64) -> String {
    format_sig(db).replace('.', "p")
}

pub fn fig2_name(m: usize, db: f64, policy: TransmissionArg) -> String {
    format!(
        "fig2_m{m}_db{}_{}",
        label_db(db),
        policy.to_string().replace('.', "p")
    )
}

pub fn fig2(a: &Fig2Args) -> Result<Vec<Output>> {
    check_db(&a.db)?;
    check_m(&a.m)?;
    if a.grid < 2 {
        return Err(CliError::Config("--grid needs at least 2 points".into()));
    }
    let pols = policies(&a.transmission);
    let mut jobs = Vec::new();
    for &m in &a.m {
        for &db in &a.db {
            for &p in &pols {
                jobs.push((m, db, p));
            }
        }
    }
    let tables = in_pool(a.common.workers, || {
        jobs.par_iter()
            .map(|&(m, db, p)| -> Result<Output> {
                let b = match branches_at(m, db)? {
                    Ok(b) => b,
                    Err(_) => {
                        return Err(CliError::Config(format!("no state for m = {m} at {db} dB")))
                    }
                };
                let (x, pp, pm) = fig2_densities(&b, p.0, a.grid)?;
                let mut t = Table::new(vec!["x", "p_plus", "p_minus"]);
                for i in 0..x.len() {
                    t.push(vec![x[i].into(), pp[i].into(), pm[i].into()]);
                }
                Ok(Output::new(fig2_name(m, db, p), t))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    tables
}

/// Rows `(r_db, m, policy, value, status)` for a quantity of [`PointMetrics`],
/// ordered by `m`, policy, then squeezing.
fn curve(a: &CurveArgs, name: &'static str, value: fn(&PointMetrics) -> f64) -> Result<Table> {
    check_db(&a.db_range.0)?;
    check_m(&a.m)?;
    let pols = policies(&a.transmission);
    let jobs: Vec<(usize, f64)> =
        a.m.iter()
            .flat_map(|&m| a.db_range.0.iter().map(move |&db| (m, db)))
            .collect();
    let cells = in_pool(a.common.workers, || {
        jobs.par_iter()
            .map(|&(m, db)| -> Result<Vec<(Cell, &'static str)>> {
                let b = match branches_at(m, db)? {
                    Ok(b) => b,
                    Err(status) => return Ok(vec![(Cell::Empty, status); pols.len()]),
                };
                pols.iter()
                    .map(|p| {
                        let pt = evaluate_point(&b, p.0)?;
                        Ok((Cell::Num(value(&pt)), pt.status))
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut t = Table::new(vec!["r_db", "m", "policy", name, "status"]);
    let n_db = a.db_range.0.len();
    for (mi, &m) in a.m.iter().enumerate() {
        for (pi, p) in pols.iter().enumerate() {
            for (di, &db) in a.db_range.0.iter().enumerate() {
                let (v, status) = cells[mi * n_db + di][pi].clone();
                t.push(vec![
                    db.into(),
                    m.into(),
                    Cell::Text(p.to_string()),
                    v,
                    status.into(),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn fig3(a: &CurveArgs) -> Result<Table> {
    curve(a, "D", |pt| pt.measures.d)
}

pub fn fig4(a: &CurveArgs) -> Result<Table> {
    curve(a, "P", |pt| pt.measures.p)
}

/// `n` transmissions evenly spaced over [`FIG5_T_RANGE`].
pub fn fig5_transmissions(n: usize) -> Vec<f64> {
    let (lo, hi) = FIG5_T_RANGE;
    (0..n)
        .map(|i| round_sig(lo + (hi - lo) * i as f64 / (n - 1) as f64))
        .collect()
}

/// One `(r_db, T, P, status)` table per `m`, plus `fig5_tbal` with the
/// balanced transmission along each squeezing value.
pub fn fig5(a: &Fig5Args) -> Result<Vec<Output>> {
    check_db(&a.db_range.0)?;
    check_m(&a.m)?;
    if a.t_points < 2 {
        return Err(CliError::Config("--t-points needs at least 2".into()));
    }
    let ts = fig5_transmissions(a.t_points);
    let jobs: Vec<(usize, f64)> =
        a.m.iter()
            .flat_map(|&m| a.db_range.0.iter().map(move |&db| (m, db)))
            .collect();
    type Line = (Option<f64>, Vec<(Cell, &'static str)>);
    let lines: Vec<Line> = in_pool(a.common.workers, || {
        jobs.par_iter()
            .map(|&(m, db)| -> Result<Line> {
                let b = match branches_at(m, db)? {
                    Ok(b) => b,
                    Err(status) => return Ok((None, vec![(Cell::Empty, status); ts.len()])),
                };
                let row = ts
                    .iter()
                    .map(|&t| {
                        let pt = evaluate_point(&b, Transmission::Value(t))?;
                        Ok((Cell::Num(pt.measures.p), pt.status))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((Some(b.t_balanced()), row))
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let n_db = a.db_range.0.len();
    let mut outputs = Vec::with_capacity(a.m.len() + 1);
    let mut tbal = Table::new(vec!["m", "r_db", "T_bal", "status"]);
    for (mi, &m) in a.m.iter().enumerate() {
        let mut t = Table::new(vec!["r_db", "T", "P", "status"]);
        for (di, &db) in a.db_range.0.iter().enumerate() {
            let (t_bal, row) = &lines[mi * n_db + di];
            for (&tv, (p, status)) in ts.iter().zip(row) {
                t.push(vec![db.into(), tv.into(), p.clone(), (*status).into()]);
            }
            let status = if t_bal.is_some() { STATUS_OK } else { row[0].1 };
            tbal.push(vec![m.into(), db.into(), (*t_bal).into(), status.into()]);
        }
        outputs.push(Output::new(format!("fig5_m{m}"), t));
    }
    outputs.push(Output::new("fig5_tbal", tbal));
    Ok(outputs)
}

pub fn remote(a: &RemoteArgs) -> Result<Table> {
    if a.lambda.is_empty() || a.eta.is_empty() {
        return Err(CliError::Config(
            "need at least one lambda and one eta".into(),
        ));
    }
    let jobs: Vec<(f64, f64)> = a
        .lambda
        .iter()
        .flat_map(|&l| a.eta.iter().map(move |&e| (l, e)))
        .collect();
    let rows = in_pool(a.common.workers, || {
        jobs.par_iter()
            .map(|&(lambda, eta)| -> Result<Vec<Cell>> {
                let (vals, status) = match remote_metrics(&RemoteParams::symmetric(lambda, eta)) {
                    Ok(m) => (
                        [m.herald_prob, m.fidelity, m.log_negativity].map(Cell::Num),
                        STATUS_OK,
                    ),
                    Err(e) => ([Cell::Empty, Cell::Empty, Cell::Empty], row_status(e)?),
                };
                let [hp, f, ln] = vals;
                Ok(vec![lambda.into(), eta.into(), hp, f, ln, status.into()])
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut t = Table::new(vec![
        "lambda",
        "eta",
        "herald_prob",
        "fidelity",
        "log_negativity",
        "status",
    ]);
    for row in rows {
        t.push(row);
    }
    Ok(t)
}

pub fn sweep(a: &SweepArgs) -> Result<Table> {
    check_db(&a.db_range.0)?;
    check_m(&a.m)?;
    if a.transmission.is_empty() {
        return Err(CliError::Config("no transmission policy given".into()));
    }
    let mut jobs = Vec::new();
    for &m in &a.m {
        for p in &a.transmission {
            for &db in &a.db_range.0 {
                jobs.push((m, *p, db));
            }
        }
    }
    let rows = in_pool(a.common.workers, || {
        jobs.par_iter()
            .map(|&(m, p, db)| -> Result<Vec<Cell>> {
                let r = db / DB_PER_NEPER;
                let head = vec![db.into(), r.into(), m.into(), Cell::Text(p.to_string())];
                let tail = match branches_at(m, db)? {
                    Err(status) => {
                        let mut v = vec![Cell::Empty; 7];
                        v.push(status.into());
                        v
                    }
                    Ok(b) => {
                        let pt = evaluate_point(&b, p.0)?;
                        vec![
                            pt.t.into(),
                            pt.measures.d.into(),
                            pt.measures.p.into(),
                            pt.measures.snu.into(),
                            pt.entropy.into(),
                            pt.t_bal.into(),
                            pt.herald_weight.into(),
                            pt.status.into(),
                        ]
                    }
                };
                Ok([head, tail].concat())
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut t = Table::new(vec![
        "r_db",
        "r",
        "m",
        "policy",
        "T",
        "D",
        "P",
        "snu",
        "entropy",
        "T_bal",
        "herald_weight",
        "status",
    ]);
    for row in rows {
        t.push(row);
    }
    Ok(t)
}
