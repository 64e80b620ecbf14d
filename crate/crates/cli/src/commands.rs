use std::io::Write;
use std::path::Path;

use l1agg::dictionary::{validate_a2, DictionaryKind};
use l1agg::experiments::summary::read_records;
use l1agg::experiments::{plan, run, ExperimentConfig, Summary};
use l1agg::gram::{diagnostics, empirical_gram};
use l1agg::io::{parse_kv, read_points_csv, write_atomic, write_csv_atomic, write_matrix_csv, KvReport};
use l1agg::oracle::bounds::{
    lemma7_constant, lemma9_constant, lemma_bound, theorem_rhs, BoundConstants, Lemma, LemmaParams, TheoremKind,
};
use l1agg::oracle::{oracle_fourier_fit, oracle_general, oracle_report};
use l1agg::population::{Approximation, Population};
use l1agg::solver::{self, FitOptions, PenaltyConfig, RateKind};
use l1agg::{Error, Result};

use crate::specs;
use crate::{BoundsArgs, DiagnoseArgs, DictArgs, ExperimentArgs, FitArgs, OracleArgs, SummaryArgs};

fn one_based(support: &[usize]) -> String {
    support.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(";")
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, |w| Ok(w.write_all(text.as_bytes())?)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_dict(d: &DictArgs) -> Result<l1agg::dictionary::Dictionary> {
    specs::dictionary(&d.dict, specs::parse_interval(&d.domain)?)
}

pub fn fit(a: &FitArgs) -> Result<()> {
    let dict = load_dict(&a.dict)?;
    let data = read_points_csv(&a.data)?;
    let y = data
        .response
        .ok_or_else(|| Error::Config("fit needs a response column named y".into()))?;
    let design = dict.evaluate(&data.points)?;
    let kind: RateKind = a.rate.parse()?;
    let penalty = PenaltyConfig::new(a.a, kind, &design)?;
    let opts = FitOptions {
        tol: a.tol,
        max_sweeps: a.max_sweeps,
    };
    let (fit, failure) = match solver::fit(&design, &y, &penalty, &opts) {
        Ok(f) => (f, None),
        Err(Error::NonConvergence(partial)) => {
            let f = *partial;
            (f.clone(), Some(Error::NonConvergence(Box::new(f))))
        }
        Err(e) => return Err(e),
    };

    let mut report = KvReport::new();
    report
        .push("n", design.nrows())
        .push("M", design.ncols())
        .push("rate_kind", kind)
        .push("A", a.a)
        .push("rate", penalty.rate)
        .push("m_hat", fit.m_hat)
        .push("support", one_based(&fit.support))
        .push("objective", fit.objective)
        .push("kkt_residual", fit.kkt_residual)
        .push("sweeps", fit.sweeps)
        .push("converged", fit.converged)
        .push("frozen", one_based(&fit.frozen))
        .push("clamped_points", design.clamped_points());
    match &a.out {
        Some(path) => {
            let rows = fit
                .lambda
                .iter()
                .enumerate()
                .map(|(j, l)| vec![(j + 1).to_string(), l.to_string()]);
            write_csv_atomic(path, &["j", "lambda"], rows)?;
        }
        None => {
            for (j, l) in fit.lambda.iter().enumerate() {
                report.push(format!("lambda_{}", j + 1), l);
            }
        }
    }
    emit(None, &report.to_string())?;
    if design.clamped_points() > 0 {
        eprintln!(
            "warning: {} design points fall outside the dictionary domain and were clamped",
            design.clamped_points()
        );
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

pub fn diagnose(a: &DiagnoseArgs) -> Result<()> {
    let dict = load_dict(&a.dict)?;
    let measure = specs::measure(&a.measure, a.resolution)?;
    let population = Population::new(&dict, &measure)?;
    let psi = population.gram();
    let support = match &a.support {
        Some(s) => specs::support(s, dict.len())?,
        None => Vec::new(),
    };
    let empirical = match &a.data {
        Some(p) => {
            let data = read_points_csv(p)?;
            Some((data.points.len(), empirical_gram(&dict.evaluate(&data.points)?)))
        }
        None => None,
    };
    let diag = diagnostics(&psi, empirical.as_ref().map(|(_, g)| g), &support)?;
    let v = validate_a2(&dict, &measure)?;

    let mut r = KvReport::new();
    r.push("M", dict.len())
        .push("measure", &a.measure)
        .push("resolution", measure.resolution())
        .push("kappa", diag.kappa)
        .push("max_coherence", diag.max_coherence)
        .push("support", one_based(&support))
        .push("rho_lambda", diag.rho_lambda);
    if let Some((n, _)) = &empirical {
        r.push("n", n);
        if let Some(k) = diag.kappa_empirical {
            r.push("kappa_empirical", k);
        }
        if let Some(rho) = diag.rho_lambda_empirical {
            r.push("rho_lambda_empirical", rho);
        }
        if let Some(e) = diag.eta {
            r.push("eta", e);
        }
    }
    r.push("sup_norm", v.sup_norm)
        .push("min_norm", v.min_norm)
        .push("fourth_moment", v.fourth_moment)
        .push("a2_satisfied", v.satisfied());
    if let Some(p) = &a.gram_out {
        write_matrix_csv(p, &psi)?;
    }
    emit(a.out.as_deref(), &r.to_string())
}

pub fn oracle(a: &OracleArgs) -> Result<()> {
    let dict = load_dict(&a.dict)?;
    let measure = specs::measure(&a.measure, a.resolution)?;
    let truth = specs::truth(&a.truth, a.theta.as_deref(), dict.len())?;
    let approx = Approximation::new(&dict, &measure, &truth)?;
    let m = dict.len();
    let k_max = a.k_max.unwrap_or(m);
    if a.k_min > k_max || k_max > m {
        return Err(Error::Config(format!("k range {}..={k_max} must lie within 0..={m}", a.k_min)));
    }
    let closed = dict.kind() == DictionaryKind::Fourier && truth.theta().is_some() && dict.domain().is_unit_cube();
    let mut rows = Vec::new();
    for k in a.k_min..=k_max {
        let f = if closed {
            oracle_fourier_fit(&approx, &truth, k)?
        } else {
            oracle_general(&approx, k)?
        };
        rows.push(vec![k.to_string(), f.residual2.to_string(), one_based(&f.support), f.exact.to_string()]);
    }
    let header = ["k", "residual2", "support", "exact"];
    match &a.out {
        Some(p) => write_csv_atomic(p, &header, rows)?,
        None => {
            // fields never contain commas or quotes
            let mut text = header.join(",") + "\n";
            for r in rows {
                text.push_str(&r.join(","));
                text.push('\n');
            }
            emit(None, &text)?;
        }
    }
    match (a.a, a.n) {
        (Some(big_a), Some(n)) => {
            let kind: RateKind = a.rate.parse()?;
            let r = solver::rate(big_a, n, m, kind)?;
            let rep = oracle_report(&dict, &approx, &truth, r, a.c_f, a.c_f_prime)?;
            let mut kv = KvReport::new();
            kv.push("rate", r)
                .push("k_star", rep.k_star.map_or("undefined".to_string(), |k| k.to_string()))
                .push("support", one_based(&rep.support))
                .push("dist2", rep.dist2)
                .push("L_lambda", rep.l_lambda)
                .push("rho_lambda", rep.rho_lambda)
                .push("in_lambda", rep.memberships.lambda)
                .push("in_lambda_prime", rep.memberships.lambda_prime)
                .push("in_lambda1", rep.memberships.lambda1)
                .push("in_lambda2", rep.memberships.lambda2)
                .push("exact", rep.exact);
            if a.out.is_some() {
                emit(None, &kv.to_string())?;
            } else {
                eprint!("{kv}");
            }
        }
        (None, None) => {}
        _ => return Err(Error::Config("--A and --n must be given together".into())),
    }
    Ok(())
}

pub fn bounds(a: &BoundsArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.params)?;
    let mut p = LemmaParams::default();
    let mut consts = BoundConstants::default();
    let mut dist2 = None;
    for (k, v) in parse_kv(&text)? {
        let x: f64 = v
            .parse()
            .map_err(|_| Error::Parse(format!("{k}: cannot parse {v:?} as a number")))?;
        match k.as_str() {
            "n" => p.n = Some(x),
            "M" | "m" => p.m = Some(x),
            "r" => p.r = Some(x),
            "c0" => p.c0 = Some(x),
            "L" => p.l = Some(x),
            "L0" => p.l0 = Some(x),
            "b" => p.b = Some(x),
            "C_f" => p.c_f = Some(x),
            "kappa" => p.kappa = Some(x),
            "M_lambda" => p.m_lambda = Some(x),
            "L_lambda" => p.l_lambda = Some(x),
            "B1" => consts.b1 = x,
            "B2" => consts.b2 = x,
            "C" => consts.c = x,
            "C_prime" => consts.c_prime = x,
            "dist2" => dist2 = Some(x),
            other => return Err(Error::Config(format!("unknown parameter {other:?}"))),
        }
    }
    let explicit: Vec<Lemma> = a.lemma.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    let mut r = KvReport::new();
    let selected = if explicit.is_empty() { Lemma::ALL.to_vec() } else { explicit.clone() };
    for which in selected {
        match lemma_bound(which, &p) {
            Ok(v) => {
                r.push(which.to_string(), v);
            }
            Err(e) if explicit.is_empty() && matches!(e, Error::Config(_)) => {
                r.push(which.to_string(), "na");
            }
            Err(e) => return Err(e),
        }
    }
    if let (Some(c0), Some(cf), Some(k)) = (p.c0, p.c_f, p.kappa) {
        r.push("L7_constant", lemma7_constant(c0, cf, k));
    }
    if let Some(c0) = p.c0 {
        r.push("L9_constant", lemma9_constant(c0));
    }
    if let (Some(rate), Some(ml)) = (p.r, p.m_lambda) {
        let ml = ml as usize;
        let d = dist2.unwrap_or(0.0);
        if let Some(k) = p.kappa {
            r.push("rhs_t21_risk", theorem_rhs(TheoremKind::T21Risk, &consts, rate, ml, k, d)?);
            r.push("rhs_t21_l1", theorem_rhs(TheoremKind::T21L1, &consts, rate, ml, k, d)?);
        }
        r.push("rhs_t22_risk", theorem_rhs(TheoremKind::T22Risk, &consts, rate, ml, 1.0, d)?);
        r.push("rhs_t22_l1", theorem_rhs(TheoremKind::T22L1, &consts, rate, ml, 1.0, d)?);
        if dist2.is_some() {
            r.push("rhs_t23", theorem_rhs(TheoremKind::T23, &consts, rate, ml, 1.0, d)?);
        }
    }
    emit(a.out.as_deref(), &r.to_string())
}

pub fn experiment(a: &ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::parse(&std::fs::read_to_string(&a.config)?)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let out = a
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| Error::Config("no output path: pass --out or set out= in the config".into()))?;
    let res = run(&cfg)?;
    res.write_csv(&out)?;
    let summary = Summary::from_result(&res)?;
    if let Some(p) = &a.summary {
        summary.write_csv(p)?;
    }
    for (c, s) in res.cells.iter().zip(&summary.cells) {
        eprintln!(
            "n={} M={} k*={} median_risk={:.4e} median_l1={:.4e} nonconverged={} valid={} in_regime={}",
            c.n,
            c.m,
            c.oracle.k_star.map_or("undefined".into(), |k| k.to_string()),
            s.median_risk,
            s.median_l1_err,
            c.nonconverged,
            c.valid,
            c.in_regime
        );
    }
    if let Some(f) = summary.risk_slope {
        eprintln!("risk slope {:.4} (stderr {:.4}, {} cells)", f.slope, f.stderr, f.points);
    }
    Ok(())
}

pub fn summary(a: &SummaryArgs) -> Result<()> {
    let records = read_records(&a.input)?;
    let s = match &a.config {
        Some(p) => {
            let cfg = ExperimentConfig::parse(&std::fs::read_to_string(p)?)?;
            Summary::from_records_with_cells(&records, &plan(&cfg)?)?
        }
        None => Summary::from_records(&records)?,
    };
    match &a.out {
        Some(p) => s.write_csv(p),
        None => s.write_csv_to(&mut std::io::stdout().lock()),
    }
}
