//! One function per command. Each returns a [`Report`]; engine failures
//! that are honest outcomes (exhausted budgets, failed schedules) become
//! failures inside the report, input problems become errors.

use proxlab_core::ams::{
    construct_ams_set, find_simultaneous_proximal, proximalize, verify_main_corollary, AmsConfig,
    AmsSet, ProximalizeOutcome, RepElement, Representation, SemigroupSpec, Word,
};
use proxlab_core::boundary::{
    certify_r_eps_proximal_boundary, classify_isometry, displacement, length_gap_check,
    stable_length, translation_length,
};
use proxlab_core::gromov::sample::random_point;
use proxlab_core::gromov::{estimate_delta, SpaceIsometry, SpaceModel};
use proxlab_core::projective::{
    cartan_projection, certify_r_eps_proximal, gap_bound_check, jordan_projection, proximal_data,
};
use proxlab_core::sampling::stream_rng;
use proxlab_core::{Error, ProximalityCertificate, Verdict};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{jreal, real, Report};
use crate::scenario::*;
use crate::CliError;

pub const DEFAULT_RESOLUTION: usize = 64;
pub const DEFAULT_BUDGET: usize = 400;
const SPECTRAL_TOL: f64 = 1e-6;

// Stream purposes of the scenario seed.
const PURPOSE_WORDS: u64 = 101;
const PURPOSE_DELTA: u64 = 102;

/// State shared by the commands of one scenario.
pub struct Context {
    pub spec: Option<SemigroupSpec>,
    pub seed: u64,
    pub set: Option<AmsSet>,
}

impl Context {
    fn spec(&self, what: &str) -> Result<&SemigroupSpec, CliError> {
        self.spec
            .as_ref()
            .ok_or_else(|| CliError::Input(format!("{what} needs a semigroup (pass --scenario)")))
    }

    fn spec_with_seed(&self, what: &str, seed: Option<u64>) -> Result<SemigroupSpec, CliError> {
        let mut s = self.spec(what)?.clone();
        if let Some(seed) = seed {
            s.seed = seed;
        }
        Ok(s)
    }
}

/// Errors caused by the input; everything else is an outcome.
fn triage(e: Error) -> Result<String, CliError> {
    match e {
        Error::InvalidInput(_)
        | Error::ModelMismatch(_)
        | Error::SingularMatrix { .. }
        | Error::IndexOutOfRange { .. } => Err(CliError::Engine(e)),
        other => Ok(other.to_string()),
    }
}

fn params<T: serde::Serialize>(p: &T, o: Overrides) -> Value {
    let mut v = serde_json::to_value(p).expect("parameters serialize");
    if let Value::Object(m) = &mut v {
        for (k, x) in [
            ("resolution", o.resolution.map(|x| json!(x))),
            ("budget", o.budget.map(|x| json!(x))),
            ("seed", o.seed.map(|x| json!(x))),
        ] {
            if let Some(x) = x {
                m.insert(k.into(), x);
            }
        }
    }
    v
}

fn vector(v: &[f64]) -> String {
    v.iter().map(|x| real(*x)).collect::<Vec<_>>().join(" ")
}

fn verdict_label(c: &Result<ProximalityCertificate, Error>) -> String {
    match c {
        Ok(c) => c.verdict.to_string(),
        Err(Error::NotProximal { .. }) => "not-proximal".into(),
        Err(Error::NotHyperbolic(_)) => "not-hyperbolic".into(),
        Err(e) => format!("error: {e}"),
    }
}

/// Random semigroup words with lengths uniform in `1..=max_len`, one
/// stream per sample.
pub fn random_words(seed: u64, rank: usize, count: usize, max_len: usize) -> Vec<Word> {
    (0..count)
        .map(|k| {
            let mut rng = stream_rng(seed, PURPOSE_WORDS, k as u64);
            let len = rng.random_range(1..=max_len.max(1));
            Word::new((0..len).map(|_| rng.random_range(0..rank)).collect()).expect("nonempty")
        })
        .collect()
}

fn word_image(
    spec: &SemigroupSpec,
    rep: usize,
    word: &str,
    power: u64,
) -> Result<RepElement, CliError> {
    spec.representation(rep)?;
    let w = spec.parse_word(word)?;
    Ok(spec.evaluate(&w, rep)?.pow(power))
}

pub fn analyze_matrix(p: &AnalyzeMatrix, ctx: &Context) -> Result<Report, CliError> {
    let o = p.settings();
    let res = o.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let power = p.power.unwrap_or(1);
    let (g, source) = match (&p.matrix, &p.word) {
        (Some(m), None) => (m.build()?.pow(power), "matrix".to_string()),
        (None, Some(w)) => {
            let rep = p.rep.unwrap_or(0);
            match word_image(ctx.spec("analyze-matrix with a word")?, rep, w, power)? {
                RepElement::Linear(g) => (g, format!("rep {rep}: {w}")),
                RepElement::Boundary(_) => {
                    return Err(CliError::Input(format!(
                        "representation {rep} is not linear"
                    )));
                }
            }
        }
        _ => {
            return Err(CliError::Input(
                "analyze-matrix takes exactly one of `matrix` or `word`".into(),
            ))
        }
    };
    let mut rep = Report::new(
        "analyze-matrix",
        params(p, o),
        o.seed.unwrap_or(ctx.seed),
        &[
            "source",
            "power",
            "dim",
            "mu",
            "lambda",
            "proximal",
            "gap",
            "gap_bound_lhs",
            "gap_bound_holds",
            "r",
            "eps",
            "verdict",
            "image_radius",
            "lipschitz",
        ],
    );
    let mu = cartan_projection(&g)?;
    let la = jordan_projection(&g)?;
    let flag = proximal_data(&g, SPECTRAL_TOL);
    let (gap, lhs, holds) = match &flag {
        Ok(f) => {
            let b = gap_bound_check(&g)?;
            (real(f.gap), real(b.lhs), b.holds(1e-9).to_string())
        }
        Err(_) => ("".into(), "".into(), "".into()),
    };
    let mut row = vec![
        source,
        power.to_string(),
        g.dim().to_string(),
        vector(&mu.values),
        vector(&la.values),
        flag.is_ok().to_string(),
        gap,
        lhs,
        holds,
    ];
    match (p.r, p.eps) {
        (Some(r), eps) => {
            let eps = eps.unwrap_or(r);
            let c = certify_r_eps_proximal(&g, r, eps, res);
            if let Err(e) = &c {
                if !matches!(e, Error::NotProximal { .. }) {
                    triage(e.clone())?;
                }
            }
            if matches!(&c, Ok(c) if c.verdict == Verdict::Refuted) || c.is_err() {
                rep.refuted += 1;
            }
            row.extend([real(r), real(eps), verdict_label(&c)]);
            match &c {
                Ok(c) => row.extend([real(c.image_radius), real(c.lipschitz_estimate)]),
                Err(_) => row.extend(["".into(), "".into()]),
            }
        }
        (None, _) => row.extend(std::iter::repeat_n(String::new(), 5)),
    }
    rep.push(row);
    rep.stat("mu1", jreal(mu.values[0]));
    rep.stat("lambda1", jreal(la.values[0]));
    rep.stat("proximal", json!(flag.is_ok()));
    Ok(rep)
}

fn isometry_source(
    p: &AnalyzeIsometry,
    ctx: &Context,
) -> Result<(SpaceModel, SpaceIsometry, String), CliError> {
    match (&p.model, &p.isometry, &p.word) {
        (Some(m), Some(g), None) => {
            let model = m.build()?;
            let g = g.build(&model)?;
            Ok((model, g, "isometry".into()))
        }
        (None, None, Some(w)) => {
            let spec = ctx.spec("analyze-isometry with a word")?;
            let rep = p.rep.unwrap_or(0);
            let model = match spec.representation(rep)? {
                Representation::Boundary { model, .. } => model.clone(),
                Representation::Linear { .. } => {
                    return Err(CliError::Input(format!(
                        "representation {rep} is not a boundary action"
                    )));
                }
            };
            let g = word_image(spec, rep, w, 1)?;
            Ok((
                model,
                g.as_isometry().expect("boundary").clone(),
                format!("rep {rep}: {w}"),
            ))
        }
        _ => Err(CliError::Input(
            "analyze-isometry takes `model` with `isometry`, or `word`".into(),
        )),
    }
}

pub fn analyze_isometry(p: &AnalyzeIsometry, ctx: &Context) -> Result<Report, CliError> {
    let o = p.settings();
    let res = o.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let n_max = p.n_max.unwrap_or(64);
    let (model, g, source) = isometry_source(p, ctx)?;
    let mut rep = Report::new(
        "analyze-isometry",
        params(p, o),
        o.seed.unwrap_or(ctx.seed),
        &[
            "source",
            "isometry",
            "kind",
            "displacement",
            "translation_length",
            "stable_surrogate",
            "stable_tolerance",
            "fixed_plus",
            "fixed_minus",
            "length_gap_lhs",
            "length_gap_c",
            "length_gap_holds",
            "r",
            "eps",
            "verdict",
        ],
    );
    let class = classify_isometry(&model, &g, 16)?;
    let stable = stable_length(&model, &g, n_max)?;
    let (plus, minus) = match class.axis() {
        Some((p, m)) => (p.to_string(), m.to_string()),
        None => (
            class
                .fixed_points
                .first()
                .map(|x| x.to_string())
                .unwrap_or_default(),
            String::new(),
        ),
    };
    let (lhs, c, holds) = match length_gap_check(&model, &g) {
        Ok(l) => {
            let ok = l.holds(&model);
            if !ok {
                rep.failures += 1;
            }
            (real(l.lhs), real(l.length_gap_c), ok.to_string())
        }
        Err(Error::NotHyperbolic(_)) => (String::new(), String::new(), String::new()),
        Err(e) => return Err(CliError::Engine(e)),
    };
    let mut row = vec![
        source,
        g.to_string(),
        class.kind.to_string(),
        real(displacement(&model, &g)?),
        real(translation_length(&model, &g)?),
        real(stable.surrogate),
        real(stable.tolerance),
        plus,
        minus,
        lhs,
        c,
        holds,
    ];
    match p.r {
        Some(r) => {
            let eps = p.eps.unwrap_or(r);
            let cert = certify_r_eps_proximal_boundary(&model, &g, r, eps, res);
            if let Err(e) = &cert {
                if !matches!(e, Error::NotHyperbolic(_)) {
                    triage(e.clone())?;
                }
            }
            if matches!(&cert, Ok(c) if c.verdict == Verdict::Refuted) || cert.is_err() {
                rep.refuted += 1;
            }
            row.extend([real(r), real(eps), verdict_label(&cert)]);
        }
        None => row.extend(std::iter::repeat_n(String::new(), 3)),
    }
    rep.push(row);
    rep.stat("kind", json!(class.kind.to_string()));
    rep.stat("translation_length", jreal(translation_length(&model, &g)?));
    Ok(rep)
}

pub fn estimate_delta_cmd(p: &EstimateDelta, ctx: &Context) -> Result<Report, CliError> {
    let o = p.settings();
    let seed = o.seed.unwrap_or(ctx.seed);
    let model = p
        .model
        .as_ref()
        .ok_or_else(|| CliError::Input("estimate-delta needs `model`".into()))?
        .build()?;
    let total = p.samples.or(o.budget).unwrap_or(200);
    if total < 4 {
        return Err(CliError::Input(format!(
            "estimate-delta needs at least 4 samples, got {total}"
        )));
    }
    let points: Vec<_> = (0..total)
        .map(|k| random_point(&model, &mut stream_rng(seed, PURPOSE_DELTA, k as u64)))
        .collect();
    let mut sizes: Vec<usize> = std::iter::successors(Some(25usize.min(total)), |s| Some(s * 2))
        .take_while(|s| *s < total)
        .collect();
    sizes.push(total);
    sizes.dedup();
    let mut rep = Report::new(
        "estimate-delta",
        params(p, o),
        seed,
        &["points", "delta_estimate", "delta_model", "within_model"],
    );
    let mut last = 0.0;
    for n in sizes {
        let d = estimate_delta(&model, &points[..n])?;
        let ok = d <= model.delta + 1e-9;
        if !ok {
            rep.failures += 1;
        }
        rep.push(vec![
            n.to_string(),
            real(d),
            real(model.delta),
            ok.to_string(),
        ]);
        last = d;
    }
    rep.stat("delta_estimate", jreal(last));
    rep.stat("delta_model", jreal(model.delta));
    Ok(rep)
}

fn ams_config(o: &Overrides, n_scan_max: Option<usize>) -> AmsConfig {
    let mut cfg = AmsConfig::default();
    if let Some(r) = o.resolution {
        cfg.resolution = r;
    }
    if let Some(n) = n_scan_max {
        cfg.n_scan_max = n;
    }
    cfg
}

fn s_set_json(spec: &SemigroupSpec, set: &AmsSet, r0: f64) -> Value {
    let spell = |w: &Word| spec.spell(w);
    json!({
        "generators": spec.generators(),
        "seed": spec.seed,
        "gamma0": spell(&set.gamma0),
        "r": jreal(set.r),
        "eps": jreal(set.eps),
        "r0": jreal(r0),
        "r1": jreal(set.r1),
        "n0": set.n0(),
        "exponents": set.exponents,
        "family": set.family.iter().map(spell).collect::<Vec<_>>(),
        "prefixes": set.prefixes.iter().map(|p| spell(&p.word)).collect::<Vec<_>>(),
        "schedules": set.schedules.iter().map(|s| json!({
            "rep": s.rep, "d": jreal(s.d), "eps_prime": jreal(s.eps_prime), "n0": s.n0,
        })).collect::<Vec<_>>(),
        "lineal": set.lineal.iter().map(|l| json!({
            "rep": l.rep,
            "threshold": jreal(l.threshold),
            "intervals": l.intervals.iter().map(|(a, b)| json!([jreal(*a), jreal(*b)])).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "elements": set.elements.iter().map(|e| json!({
            "word": spell(&e.word),
            "prefix": e.prefix,
            "beta": e.beta,
            "n": e.n,
            "beta_prime": e.beta_prime,
        })).collect::<Vec<_>>(),
    })
}

/// Builds `S` into the context; failures are reported, not raised.
pub fn build_ams(p: &BuildAms, ctx: &mut Context) -> Result<Report, CliError> {
    let o = p.settings();
    let spec = ctx.spec_with_seed("build-ams", o.seed)?;
    let budget = o.budget.unwrap_or(DEFAULT_BUDGET);
    let cfg = ams_config(&o, p.n_scan_max);
    let mut rep = Report::new(
        "build-ams",
        params(p, o),
        spec.seed,
        &[
            "element",
            "word",
            "prefix",
            "beta",
            "n",
            "beta_prime",
            "length",
        ],
    );
    match construct_ams_set(&spec, &cfg, budget, p.r, p.eps) {
        Ok(c) => {
            let set = c.set;
            for (k, e) in set.elements.iter().enumerate() {
                rep.push(vec![
                    k.to_string(),
                    spec.spell(&e.word),
                    e.prefix
                        .map(|p| spec.spell(&set.prefixes[p].word))
                        .unwrap_or_default(),
                    spec.spell(&set.family[e.beta]),
                    e.n.to_string(),
                    spec.spell(&set.family[e.beta_prime]),
                    e.word.len().to_string(),
                ]);
            }
            rep.stat("gamma0", json!(spec.spell(&set.gamma0)));
            rep.stat("r", jreal(set.r));
            rep.stat("eps", jreal(set.eps));
            rep.stat("r0", jreal(c.radius.r0));
            rep.stat("n0", json!(set.n0()));
            rep.stat("exponents", json!(set.exponents));
            rep.stat("family_size", json!(set.family.len()));
            rep.stat("size", json!(set.elements.len()));
            rep.extra.push((
                "s-set.json".into(),
                crate::report::pretty(&s_set_json(&spec, &set, c.radius.r0)),
            ));
            ctx.set = Some(set);
        }
        Err(e) => {
            let msg = triage(e)?;
            rep.failures += 1;
            rep.stat("error", json!(msg));
            ctx.set = None;
        }
    }
    Ok(rep)
}

/// The context's set, or one built with default parameters.
fn ensure_set(ctx: &mut Context, o: &Overrides) -> Result<Result<(), String>, CliError> {
    if ctx.set.is_some() {
        return Ok(Ok(()));
    }
    let b = BuildAms {
        resolution: o.resolution,
        budget: o.budget,
        ..Default::default()
    };
    let r = build_ams(&b, ctx)?;
    Ok(if ctx.set.is_some() {
        Ok(())
    } else {
        Err(r
            .summary
            .iter()
            .find(|(k, _)| k == "error")
            .map(|(_, v)| v.to_string())
            .unwrap_or_default())
    })
}

fn rep_names(spec: &SemigroupSpec) -> Vec<String> {
    spec.representations()
        .iter()
        .map(|r| r.name().replace([',', ' '], "_"))
        .collect()
}

fn no_set_report(name: &str, params: Value, seed: u64, msg: String) -> Report {
    let mut rep = Report::new(name, params, seed, &["error"]);
    rep.failures += 1;
    rep.push(vec![msg.clone()]);
    rep.stat("error", json!(msg));
    rep
}

fn sample_words(
    spec: &SemigroupSpec,
    explicit: &Option<Vec<String>>,
    count: usize,
    max_len: usize,
    seed: u64,
) -> Result<Vec<Word>, CliError> {
    match explicit {
        Some(ws) => ws
            .iter()
            .map(|w| spec.parse_word(w).map_err(CliError::Engine))
            .collect(),
        None => Ok(random_words(seed, spec.rank(), count, max_len)),
    }
}

pub fn proximalize_cmd(p: &Proximalize, ctx: &mut Context) -> Result<Report, CliError> {
    let o = p.settings();
    let params = params(p, o);
    let seed = o.seed.unwrap_or(ctx.seed);
    if let Err(msg) = ensure_set(ctx, &Overrides { seed: None, ..o })? {
        return Ok(no_set_report("proximalize", params, seed, msg));
    }
    let spec = ctx.spec("proximalize")?;
    let set = ctx.set.as_ref().expect("ensured");
    let res = o.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let words = sample_words(
        spec,
        &p.words,
        p.samples.unwrap_or(100),
        p.max_len.unwrap_or(12),
        seed,
    )?;
    let names = rep_names(spec);
    let mut header: Vec<String> = ["sample_id", "word", "outcome", "chosen_s", "element"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(names.iter().map(|n| format!("verdict_{n}")));
    let mut rep = Report::new("proximalize", params, seed, &[]);
    rep.header = header;
    let outcomes: Vec<Result<ProximalizeOutcome, Error>> = words
        .par_iter()
        .map(|w| proximalize(spec, w, set, res))
        .collect();
    let mut successes = 0;
    let mut by_proof = 0;
    for (k, (w, out)) in words.iter().zip(outcomes).enumerate() {
        let out = match out {
            Ok(o) => o,
            Err(e) => {
                let msg = triage(e)?;
                rep.failures += 1;
                let mut row = vec![
                    k.to_string(),
                    spec.spell(w),
                    "error".into(),
                    msg,
                    String::new(),
                ];
                row.extend(names.iter().map(|_| String::new()));
                rep.push(row);
                continue;
            }
        };
        let mut row = vec![k.to_string(), spec.spell(w), out.label().to_string()];
        match &out {
            ProximalizeOutcome::Success(s) => {
                successes += 1;
                if out.label() == "proof" {
                    by_proof += 1;
                }
                row.push(spec.spell(&s.s));
                row.push(s.element.to_string());
                for c in &s.certificates {
                    if c.verdict == Verdict::Refuted {
                        rep.refuted += 1;
                    }
                    row.push(c.verdict.to_string());
                }
            }
            ProximalizeOutcome::Failure(f) => {
                rep.failures += 1;
                row.push(String::new());
                row.push(f.best_element.map(|e| e.to_string()).unwrap_or_default());
                for i in 0..names.len() {
                    let failed = f
                        .failed
                        .iter()
                        .find(|(r, _)| *r == i)
                        .map(|(_, c)| c.join("+"));
                    row.push(
                        failed
                            .map(|c| format!("failed:{c}"))
                            .unwrap_or_else(|| "certified".into()),
                    );
                }
            }
        }
        rep.push(row);
    }
    let n = words.len();
    rep.stat("samples", json!(n));
    rep.stat("successes", json!(successes));
    rep.stat("by_proof", json!(by_proof));
    rep.stat(
        "success_rate",
        jreal(if n == 0 {
            0.0
        } else {
            successes as f64 / n as f64
        }),
    );
    Ok(rep)
}

pub fn verify_bounds(p: &VerifyBounds, ctx: &mut Context) -> Result<Report, CliError> {
    let o = p.settings();
    let params = params(p, o);
    let seed = o.seed.unwrap_or(ctx.seed);
    if let Err(msg) = ensure_set(ctx, &Overrides { seed: None, ..o })? {
        return Ok(no_set_report("verify-bounds", params, seed, msg));
    }
    let spec = ctx.spec("verify-bounds")?;
    let set = ctx.set.as_ref().expect("ensured");
    let res = o.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let words = random_words(
        seed,
        spec.rank(),
        p.samples.unwrap_or(500),
        p.max_len.unwrap_or(12),
    );
    let report =
        verify_main_corollary(spec, set, &words, p.n_max.unwrap_or(64), res).map_err(|e| {
            match triage(e) {
                Ok(msg) => CliError::Input(format!("verify-bounds: {msg}")),
                Err(e) => e,
            }
        })?;
    let names = rep_names(spec);
    let mut header: Vec<String> = ["sample_id", "word", "outcome", "chosen_s", "recheck"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for n in &names {
        header.push(format!("verdict_{n}"));
        header.push(format!("delta_{n}"));
        header.push(format!("c_theory_{n}"));
    }
    let mut rep = Report::new("verify-bounds", params, seed, &[]);
    rep.header = header;
    for (k, row) in report.rows.iter().enumerate() {
        let mut out = vec![
            k.to_string(),
            spec.spell(&row.gamma),
            row.outcome.label().to_string(),
        ];
        match &row.outcome {
            ProximalizeOutcome::Success(s) => {
                out.push(spec.spell(&s.s));
                out.push(row.recheck.map(|b| b.to_string()).unwrap_or_default());
                for (i, c) in s.certificates.iter().enumerate() {
                    if c.verdict == Verdict::Refuted {
                        rep.refuted += 1;
                    }
                    out.push(c.verdict.to_string());
                    match row.deltas.iter().find(|d| d.rep == i) {
                        Some(d) => out.extend([real(d.delta), real(d.budget)]),
                        None => out.extend([String::new(), String::new()]),
                    }
                }
            }
            ProximalizeOutcome::Failure(_) => {
                out.extend([String::new(), String::new()]);
                for _ in &names {
                    out.extend(["failure".to_string(), String::new(), String::new()]);
                }
            }
        }
        rep.push(out);
    }
    let s = &report.summary;
    rep.failures += (s.samples - s.successes) + s.budget_violations + s.recheck_failures;
    rep.stat("samples", json!(s.samples));
    rep.stat("successes", json!(s.successes));
    rep.stat("by_proof", json!(s.by_proof));
    rep.stat("success_rate", jreal(s.success_rate));
    rep.stat("max_spectral", jreal(s.max_spectral));
    rep.stat("mean_spectral", jreal(s.mean_spectral));
    rep.stat("max_length", jreal(s.max_length));
    rep.stat("mean_length", jreal(s.mean_length));
    rep.stat("budget_violations", json!(s.budget_violations));
    rep.stat("recheck_failures", json!(s.recheck_failures));
    rep.stat("r", jreal(set.r));
    rep.stat("eps", jreal(set.eps));
    Ok(rep)
}

fn certify_rep(
    spec: &SemigroupSpec,
    rep: usize,
    g: &RepElement,
    r: f64,
    eps: f64,
    res: usize,
) -> Result<ProximalityCertificate, Error> {
    match (spec.representation(rep)?, g) {
        (Representation::Linear { .. }, RepElement::Linear(m)) => {
            certify_r_eps_proximal(m, r, eps, res)
        }
        (Representation::Boundary { model, .. }, RepElement::Boundary(h)) => {
            certify_r_eps_proximal_boundary(model, h, r, eps, res)
        }
        _ => Err(Error::ModelMismatch(
            "element and representation differ".into(),
        )),
    }
}

pub fn sweep(p: &Sweep, ctx: &mut Context) -> Result<Report, CliError> {
    let o = p.settings();
    let params = params(p, o);
    let seed = o.seed.unwrap_or(ctx.seed);
    let res = o.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let rep_index = p.rep.unwrap_or(0);
    let spec = ctx.spec_with_seed("sweep", o.seed)?;
    spec.representation(rep_index)?;
    let word = match (&p.word, &ctx.set) {
        (Some(w), _) => spec.parse_word(w)?,
        (None, Some(set)) => set.gamma0.clone(),
        (None, None) => match find_simultaneous_proximal(&spec, o.budget.unwrap_or(DEFAULT_BUDGET))
        {
            Ok(w) => w,
            Err(e) => return Ok(no_set_report("sweep", params, seed, triage(e)?)),
        },
    };
    let r = p.r.or(ctx.set.as_ref().map(|s| s.r)).unwrap_or(0.05);
    let eps = p.eps.or(ctx.set.as_ref().map(|s| s.eps)).unwrap_or(r);
    let (lo, hi) = (p.n_min.unwrap_or(1).max(1), p.n_max.unwrap_or(32));
    let mut rep = Report::new(
        "sweep",
        params,
        seed,
        &["n", "word", "verdict", "gap", "image_radius", "lipschitz"],
    );
    let base = spec.evaluate(&word, rep_index)?;
    let mut first: Option<usize> = None;
    let mut monotone = true;
    for n in lo..=hi {
        let g = base.pow(n as u64);
        let c = certify_rep(&spec, rep_index, &g, r, eps, res);
        if let Err(e) = &c {
            if !matches!(e, Error::NotProximal { .. } | Error::NotHyperbolic(_)) {
                triage(e.clone())?;
            }
        }
        let certified = matches!(&c, Ok(c) if c.is_certified());
        match (certified, first) {
            (true, None) => first = Some(n),
            (false, Some(_)) => monotone = false,
            _ => {}
        }
        let mut row = vec![
            n.to_string(),
            format!("({})^{n}", spec.spell(&word)),
            verdict_label(&c),
        ];
        match &c {
            Ok(c) => row.extend([
                real(c.gap),
                real(c.image_radius),
                real(c.lipschitz_estimate),
            ]),
            Err(_) => row.extend([String::new(), String::new(), String::new()]),
        }
        rep.push(row);
    }
    if !monotone {
        rep.failures += 1;
    }
    rep.stat("word", json!(spec.spell(&word)));
    rep.stat("r", jreal(r));
    rep.stat("eps", jreal(eps));
    rep.stat("first_certified", json!(first));
    rep.stat("monotone", json!(monotone));
    Ok(rep)
}

/// Runs one command against the context.
pub fn dispatch(cmd: &CommandDef, ctx: &mut Context) -> Result<Report, CliError> {
    match cmd {
        CommandDef::AnalyzeMatrix(p) => analyze_matrix(p, ctx),
        CommandDef::AnalyzeIsometry(p) => analyze_isometry(p, ctx),
        CommandDef::EstimateDelta(p) => estimate_delta_cmd(p, ctx),
        CommandDef::BuildAms(p) => build_ams(p, ctx),
        CommandDef::Proximalize(p) => proximalize_cmd(p, ctx),
        CommandDef::VerifyBounds(p) => verify_bounds(p, ctx),
        CommandDef::Sweep(p) => sweep(p, ctx),
    }
}
