use std::collections::{BTreeMap, BTreeSet};

use anyhow::{bail, ensure, Context, Result};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use sumrank::chains::{best_shift_chain, ChainInstance, Extractor, ShiftMode};
use sumrank::codes::{decoding_radius, max_list_size_profile, sample_general_code, sample_linear_code_dim};
use sumrank::codes::{correlation_estimate, limited_correlation_estimate, subset_span_event_estimate};
use sumrank::decomposable::{dimension_lemma_estimate, enumerate_decomposable, DecomposableSampler, DimensionEvent};
use sumrank::fqlinalg::sample_subspace;
use sumrank::qcomb::{
    ball_bounds, ball_volume, capacity, decomposable_count, gaussian_binomial, gb_bounds_check,
    grassmannian_dominates_decomposable, kappa, parse_rational, q_ary_entropy, sphere_bounds, sphere_volume,
    SpaceParams,
};
use sumrank::rng::trial_rng;
use sumrank::sumrank::{sample_d2_with_subspace, sample_uniform_rank_matrix, BallSampler};
use sumrank::{BlockTuple, FieldSpec, Fq};

use crate::record::Record;
use crate::{
    CapacityArgs, ChainArgs, CodeFamily, Command, CountDecomposableArgs, ExperimentArgs, ExperimentKind, Outcome,
    SampleArgs, SampleKind, ShiftSearch, Sweep, VerifyArgs, VolumeArgs,
};

/// Enumeration cap used by the decomposable-count sweep.
const SWEEP_ENUMERATION_LIMIT: u64 = 20_000;

pub(crate) fn dispatch(cli: &crate::Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Volume(a) => volume(a),
        Command::CountDecomposable(a) => count_decomposable(a),
        Command::Capacity(a) => capacity_curve(a),
        Command::Verify(a) => verify(a),
        Command::Sample(a) => sample(a, cli.seed),
        Command::Experiment(a) => experiment(a, cli.seed),
        Command::Chain(a) => chain(a, cli.seed),
    }
}

fn echo<T: Serialize>(args: &T) -> Result<Value> {
    serde_json::to_value(args).context("serializing the configuration")
}

fn with(cfg: &Value, extra: Value) -> Value {
    let mut cfg = cfg.clone();
    if let (Value::Object(m), Value::Object(e)) = (&mut cfg, extra) {
        m.extend(e);
    }
    cfg
}

fn rational(s: &str) -> Result<BigRational> {
    Ok(parse_rational(s)?)
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn ok(records: Vec<Record>) -> Result<Outcome> {
    Ok(Outcome { records, ok: true })
}

fn volume(a: &VolumeArgs) -> Result<Outcome> {
    const VERB: &str = "volume";
    let p = a.space.build()?;
    let cfg = echo(a)?;
    let q = p.q();
    let radii: Vec<usize> = match a.r {
        Some(r) => vec![r],
        None => (0..=p.max_weight()).collect(),
    };
    let mut recs = Vec::new();
    for r in radii {
        let sphere = sphere_volume(&p, r)?;
        let ball = ball_volume(&p, r)?;
        let sb = sphere_bounds(&p, r)?;
        let bb = ball_bounds(&p, r)?;
        let c = with(&cfg, json!({ "r": r }));
        let mut batch = vec![
            Record::count(VERB, "sphere", &sphere, &c),
            Record::count(VERB, "ball", &ball, &c),
            Record::float(VERB, "sphere_log_lower", sb.lower.to_f64(), &c),
            Record::float(VERB, "sphere_log_upper", sb.upper.to_f64(), &c),
            Record::float(VERB, "ball_log_lower", bb.lower.to_f64(), &c),
            Record::float(VERB, "ball_log_upper", bb.upper.to_f64(), &c),
            Record::new(VERB, "sphere_in_bounds", flag(sb.contains(&sphere, q)), &c),
            Record::new(VERB, "ball_in_bounds", flag(bb.contains(&ball, q)), &c),
        ];
        if a.r.is_none() {
            batch = batch.into_iter().map(|x| x.at(r as u64)).collect();
        }
        recs.extend(batch);
    }
    ok(recs)
}

fn count_decomposable(a: &CountDecomposableArgs) -> Result<Outcome> {
    const VERB: &str = "count-decomposable";
    let f = a.field.build()?;
    let q = f.order() as u64;
    let cfg = echo(a)?;
    let ws: Vec<usize> = match a.w {
        Some(w) => vec![w],
        None => (0..=a.eta * a.ell).collect(),
    };
    let mut recs = Vec::new();
    for w in ws {
        let d = decomposable_count(a.eta, a.ell, w, q)?;
        let c = with(&cfg, json!({ "w": w }));
        let mut batch = vec![
            Record::count(VERB, "count", &d.exact, &c),
            Record::float(VERB, "log_lower", d.bounds.lower.to_f64(), &c),
            Record::float(VERB, "log_upper", d.bounds.upper.to_f64(), &c),
            Record::new(VERB, "in_bounds", flag(d.within_bounds(q)), &c),
            Record::count(VERB, "grassmannian", &gaussian_binomial(a.eta * a.ell, w, q), &c),
            Record::new(VERB, "dominates", flag(grassmannian_dominates_decomposable(a.eta, a.ell, w, q)), &c),
        ];
        if a.w.is_none() {
            batch = batch.into_iter().map(|x| x.at(w as u64)).collect();
        }
        recs.extend(batch);
    }
    ok(recs)
}

fn capacity_curve(a: &CapacityArgs) -> Result<Outcome> {
    const VERB: &str = "capacity";
    let b = rational(&a.b)?;
    let cfg = echo(a)?;
    let rhos: Vec<BigRational> = match &a.rho {
        Some(s) => vec![rational(s)?],
        None => {
            ensure!(a.steps >= 2, "--steps must be at least 2");
            (1..a.steps)
                .map(|i| BigRational::new(i.into(), a.steps.into()))
                .collect()
        }
    };
    let mut recs = Vec::new();
    for (i, rho) in rhos.iter().enumerate() {
        let rf = sumrank::qcomb::rational_to_f64(rho);
        let c = with(&cfg, json!({ "rho_value": rho.to_string() }));
        let h = q_ary_entropy(rf, a.q)?;
        let mut batch = vec![
            Record::rational(VERB, "kappa", &kappa(rho, &b)?, &c),
            Record::rational(VERB, "capacity", &capacity(rho, &b)?, &c),
            Record::float(VERB, "entropy", h, &c),
            Record::float(VERB, "hamming_capacity", 1.0 - h, &c),
            Record::rational(VERB, "one_minus_rho", &(BigRational::one() - rho), &c),
        ];
        if a.rho.is_none() {
            batch = batch.into_iter().map(|x| x.at(i as u64)).collect();
        }
        recs.extend(batch);
    }
    ok(recs)
}

struct SweepTally {
    verb: &'static str,
    cfg: Value,
    checked: u64,
    records: Vec<Record>,
    violations: u64,
}

impl SweepTally {
    fn check(&mut self, passed: bool, point: Value) {
        self.checked += 1;
        if !passed {
            self.violations += 1;
            let c = with(&self.cfg, point);
            self.records.push(Record::new(self.verb, "violation", "true", &c).at(self.violations - 1));
        }
    }

    fn finish(mut self) -> Outcome {
        let c = &self.cfg;
        self.records.push(Record::new(self.verb, "checked", self.checked.to_string(), c));
        self.records.push(Record::new(self.verb, "violations", self.violations.to_string(), c));
        self.records.push(Record::new(self.verb, "passed", flag(self.violations == 0), c));
        Outcome {
            ok: self.violations == 0,
            records: self.records,
        }
    }
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let q = a.q;
    let f = FieldSpec::of_order(q)?;
    let mut t = SweepTally {
        verb: "verify",
        cfg: echo(a)?,
        checked: 0,
        records: Vec::new(),
        violations: 0,
    };
    match a.sweep {
        Sweep::GrassmannianDominance => {
            for eta in 1..=a.eta_max {
                for ell in 1..=a.ell_max {
                    for w in 0..=eta * ell {
                        t.check(
                            grassmannian_dominates_decomposable(eta, ell, w, q),
                            json!({"eta": eta, "ell": ell, "w": w}),
                        );
                    }
                }
            }
        }
        Sweep::VolumeBounds => {
            for m in 1..=a.eta_max {
                for ell in 1..=a.ell_max {
                    let p = SpaceParams::new(f.clone(), m, m, ell)?;
                    for r in 0..=p.max_weight() {
                        let point = json!({"m": m, "eta": m, "ell": ell, "r": r});
                        let s = sphere_volume(&p, r)?;
                        t.check(sphere_bounds(&p, r)?.contains(&s, q), with(&point, json!({"volume": "sphere"})));
                        let b = ball_volume(&p, r)?;
                        t.check(ball_bounds(&p, r)?.contains(&b, q), with(&point, json!({"volume": "ball"})));
                    }
                }
            }
        }
        Sweep::GaussianBounds => {
            for eta in 0..=a.eta_max {
                for k in 0..=eta {
                    t.check(gb_bounds_check(eta, k, q), json!({"eta": eta, "k": k}));
                }
            }
        }
        Sweep::DecomposableCount => {
            for eta in 1..=a.eta_max {
                for ell in 1..=a.ell_max {
                    for w in 0..=eta * ell {
                        let point = json!({"eta": eta, "ell": ell, "w": w});
                        let d = decomposable_count(eta, ell, w, q)?;
                        t.check(d.within_bounds(q), with(&point, json!({"check": "bounds"})));
                        if d.exact <= BigUint::from(SWEEP_ENUMERATION_LIMIT) {
                            let n = enumerate_decomposable(&f, eta, ell, w)?.len();
                            t.check(BigUint::from(n) == d.exact, with(&point, json!({"check": "enumeration"})));
                        }
                    }
                }
            }
        }
    }
    Ok(t.finish())
}

fn to_json<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("serializable")
}

fn sample(a: &SampleArgs, seed: u64) -> Result<Outcome> {
    const VERB: &str = "sample";
    let cfg = with(&echo(&a.what)?, json!({ "trials": a.trials, "seed": seed }));
    let mut recs = Vec::new();
    let push = |recs: &mut Vec<Record>, i: u64, stat: &str, value: String| {
        recs.push(Record::new(VERB, stat, value, &cfg).at(i).seeded(seed, a.trials));
    };
    match &a.what {
        SampleKind::Ball { space, r } => {
            let p = space.build()?;
            let s = BallSampler::new(&p, *r)?;
            for i in 0..a.trials {
                let x = s.sample(&mut trial_rng(seed, i));
                push(&mut recs, i, "weight", x.weight().to_string());
                push(&mut recs, i, "sample", to_json(&x));
            }
        }
        SampleKind::D2 { space, w } => {
            let p = space.build()?;
            for i in 0..a.trials {
                let (x, u) = sample_d2_with_subspace(&p, *w, &mut trial_rng(seed, i))?;
                push(&mut recs, i, "weight", x.weight().to_string());
                push(&mut recs, i, "sample", to_json(&x));
                push(&mut recs, i, "subspace", to_json(&u));
            }
        }
        SampleKind::RankMatrix { field, m, eta, r } => {
            let f = field.build()?;
            for i in 0..a.trials {
                let x = sample_uniform_rank_matrix(*m, *eta, *r, &f, &mut trial_rng(seed, i))?;
                push(&mut recs, i, "sample", to_json(&x));
            }
        }
        SampleKind::Subspace { field, eta, k } => {
            let f = field.build()?;
            for i in 0..a.trials {
                let u = sample_subspace(&f, *eta, *k, &mut trial_rng(seed, i))?;
                push(&mut recs, i, "sample", to_json(&u));
            }
        }
        SampleKind::Decomposable { field, eta, ell, w } => {
            let s = DecomposableSampler::new(&field.build()?, *eta, *ell, *w)?;
            for i in 0..a.trials {
                let u = s.sample(&mut trial_rng(seed, i));
                push(&mut recs, i, "composition", to_json(&u.composition()));
                push(&mut recs, i, "sample", to_json(&u));
            }
        }
        SampleKind::LinearCode { space, k, rate } => {
            let p = space.build()?;
            let k = match (k, rate) {
                (Some(k), None) => *k,
                (None, Some(r)) => sumrank::codes::linear_dimension(&p, &rational(r)?)?,
                _ => bail!("give exactly one of --k and --rate"),
            };
            for i in 0..a.trials {
                let c = sample_linear_code_dim(&p, k, &mut trial_rng(seed, i))?;
                push(&mut recs, i, "dimension", k.to_string());
                push(&mut recs, i, "basis", to_json(&c.basis().expect("linear")));
            }
        }
        SampleKind::GeneralCode { space, rate } => {
            let p = space.build()?;
            let r = rational(rate)?;
            for i in 0..a.trials {
                let c = sample_general_code(&p, &r, &mut trial_rng(seed, i))?;
                push(&mut recs, i, "size", c.size().to_string());
            }
        }
    }
    ok(recs)
}

/// Parses a vector given as a digit string (q <= 10) or dot-separated indices.
fn parse_vector(f: &FieldSpec, s: &str) -> Result<Vec<Fq>> {
    let parts: Vec<u64> = if s.contains('.') {
        s.split('.').map(|x| x.parse().context("vector entry")).collect::<Result<_>>()?
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(u64::from).context("vector entry"))
            .collect::<Result<_>>()?
    };
    parts.into_iter().map(|x| Ok(f.element(x)?)).collect()
}

fn fmt_vector(f: &FieldSpec, v: &[Fq]) -> String {
    if f.order() <= 10 {
        v.iter().map(|x| x.index().to_string()).collect()
    } else {
        v.iter().map(|x| x.index().to_string()).collect::<Vec<_>>().join(".")
    }
}

fn experiment(a: &ExperimentArgs, seed: u64) -> Result<Outcome> {
    const VERB: &str = "experiment";
    let cfg = with(&echo(&a.what)?, json!({ "trials": a.trials, "seed": seed }));
    let trials = a.trials;
    match &a.what {
        ExperimentKind::Correlation { space, rho } => {
            let p = space.build()?;
            let rho = rational(rho)?;
            let y = BlockTuple::zero(&p);
            let e = correlation_estimate(&p, &rho, &y, trials, seed)?;
            ok(vec![
                Record::new(VERB, "radius", decoding_radius(&p, &rho)?.to_string(), &cfg),
                Record::estimate(VERB, "probability", &e, &cfg),
            ])
        }
        ExperimentKind::Dimension {
            field,
            eta,
            ell,
            wx,
            wy,
            alpha,
            d,
        } => {
            let f = field.build()?;
            let event = match (alpha, d) {
                (Some(al), None) => DimensionEvent::AtLeast(rational(al)?),
                (None, Some(d)) => DimensionEvent::Equals(*d),
                _ => bail!("give exactly one of --alpha and --d"),
            };
            let e = dimension_lemma_estimate(&f, *eta, *ell, *wx, *wy, &event, trials, seed)?;
            ok(vec![
                Record::estimate(VERB, "probability", &e.probability, &cfg),
                Record::float(VERB, "mean_dim", e.mean_dim, &cfg).seeded(seed, trials),
            ])
        }
        ExperimentKind::SpanCorrelation {
            space,
            rho,
            gamma,
            k_factor,
        } => {
            let p = space.build()?;
            let rho = rational(rho)?;
            let e = limited_correlation_estimate(&p, &rho, *gamma, *k_factor, trials, seed)?;
            ok(vec![
                Record::new(VERB, "radius", decoding_radius(&p, &rho)?.to_string(), &cfg),
                Record::estimate(VERB, "probability", &e, &cfg),
            ])
        }
        ExperimentKind::SubsetEvent { space, rho, a } => {
            let p = space.build()?;
            let rho = rational(rho)?;
            let set = a.iter().map(|s| parse_vector(&p.field, s)).collect::<Result<Vec<_>>>()?;
            let e = subset_span_event_estimate(&p, &rho, &set, trials, seed)?;
            ok(vec![
                Record::new(VERB, "radius", decoding_radius(&p, &rho)?.to_string(), &cfg),
                Record::estimate(VERB, "probability", &e, &cfg),
            ])
        }
        ExperimentKind::ListSize {
            space,
            rho,
            epsilon,
            family,
        } => list_size(&space.build()?, &rational(rho)?, &rational(epsilon)?, *family, trials, seed, &cfg),
    }
}

/// Draws `trials` codes at rate `1 - kappa_b(rho) - epsilon` and records the
/// exhaustive maximum list size at every radius. Linear codes use
/// `k = floor(R mn)`.
fn list_size(
    p: &SpaceParams,
    rho: &BigRational,
    epsilon: &BigRational,
    family: CodeFamily,
    trials: u64,
    seed: u64,
    cfg: &Value,
) -> Result<Outcome> {
    const VERB: &str = "experiment";
    let b = BigRational::new(p.eta.into(), p.m.into());
    let b = if b > BigRational::one() { BigRational::one() } else { b };
    let rate = capacity(rho, &b)? - epsilon;
    ensure!(rate > BigRational::zero(), "rate 1 - kappa - epsilon = {rate} is not positive");
    let radius = decoding_radius(p, rho)?;
    let k = (&rate * BigRational::from_integer(p.dim().into()))
        .floor()
        .to_integer()
        .to_usize()
        .expect("k <= mn");
    let mut recs = vec![
        Record::rational(VERB, "rate", &rate, cfg),
        Record::new(VERB, "radius", radius.to_string(), cfg),
    ];
    if family == CodeFamily::Linear {
        recs.push(Record::new(VERB, "dimension", k.to_string(), cfg));
    }
    let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut all_monotone = true;
    for i in 0..trials {
        let mut rng = trial_rng(seed, i);
        let code = match family {
            CodeFamily::Linear => sample_linear_code_dim(p, k, &mut rng)?,
            CodeFamily::General => sample_general_code(p, &rate, &mut rng)?,
        };
        let profile = max_list_size_profile(&code)?;
        let monotone = profile.windows(2).all(|w| w[0] <= w[1]);
        all_monotone &= monotone;
        for (r, v) in profile.iter().enumerate() {
            recs.push(Record::new(VERB, format!("max_list_r{r:02}"), v.to_string(), cfg).at(i).seeded(seed, trials));
        }
        recs.push(Record::new(VERB, "monotone", flag(monotone), cfg).at(i).seeded(seed, trials));
        *hist.entry(profile[radius]).or_default() += 1;
    }
    for (l, n) in &hist {
        recs.push(Record::new(VERB, format!("list_size_hist_L{l:04}"), n.to_string(), cfg).seeded(seed, trials));
    }
    recs.push(Record::new(VERB, "monotone_all", flag(all_monotone), cfg).seeded(seed, trials));
    Ok(Outcome {
        records: recs,
        ok: all_monotone,
    })
}

fn random_set(f: &FieldSpec, gamma: usize, size: usize, seed: u64, i: u64) -> Result<Vec<Vec<Fq>>> {
    let cap = (f.order() as f64).powi(gamma as i32);
    ensure!((size as f64) <= cap, "cannot draw {size} distinct vectors of length {gamma}");
    let mut rng = trial_rng(seed, i);
    let mut set = BTreeSet::new();
    while set.len() < size {
        set.insert((0..gamma).map(|_| f.random(&mut rng)).collect::<Vec<Fq>>());
    }
    Ok(set.into_iter().collect())
}

fn chain(a: &ChainArgs, seed: u64) -> Result<Outcome> {
    const VERB: &str = "chain";
    let f = a.field.build()?;
    let cfg = with(&echo(a)?, json!({ "seed": seed }));
    let sets: Vec<Vec<Vec<Fq>>> = match (&a.vectors, a.size) {
        (Some(vs), None) => vec![vs.iter().map(|s| parse_vector(&f, s)).collect::<Result<_>>()?],
        (None, Some(size)) => (0..a.instances)
            .map(|i| random_set(&f, a.gamma, size, seed, i))
            .collect::<Result<_>>()?,
        _ => bail!("give exactly one of --vectors and --size"),
    };
    let mut recs = Vec::new();
    let (mut greedy_failures, mut failures) = (0u64, 0u64);
    for (i, set) in sets.into_iter().enumerate() {
        let i = i as u64;
        let inst = ChainInstance::new(f.clone(), a.gamma, set, a.c)?;
        let mode = match a.search {
            ShiftSearch::Exhaustive => ShiftMode::Exhaustive,
            ShiftSearch::Random => ShiftMode::Random {
                trials: a.shifts,
                // shift streams are disjoint from the instance streams
                seed: seed.wrapping_add(i + 1),
            },
        };
        let rep = best_shift_chain(&inst, mode, Extractor::Greedy)?;
        let chain_s: Vec<String> = rep.chain.iter().map(|v| fmt_vector(&f, v)).collect();
        recs.push(Record::new(VERB, "length", rep.length.to_string(), &cfg).at(i));
        recs.push(Record::float(VERB, "bound", rep.bound, &cfg).at(i));
        recs.push(Record::new(VERB, "w", fmt_vector(&f, &rep.w), &cfg).at(i));
        recs.push(Record::new(VERB, "chain", chain_s.join(" "), &cfg).at(i));
        recs.push(Record::new(VERB, "meets_bound", flag(rep.meets_bound()), &cfg).at(i));
        if !rep.meets_bound() {
            greedy_failures += 1;
            let exact = best_shift_chain(&inst, mode, Extractor::Exact)?;
            recs.push(Record::new(VERB, "exact_length", exact.length.to_string(), &cfg).at(i));
            recs.push(Record::new(VERB, "exact_meets_bound", flag(exact.meets_bound()), &cfg).at(i));
            if !exact.meets_bound() {
                failures += 1;
            }
        }
    }
    recs.push(Record::new(VERB, "greedy_failures", greedy_failures.to_string(), &cfg));
    recs.push(Record::new(VERB, "failures", failures.to_string(), &cfg));
    Ok(Outcome {
        records: recs,
        ok: failures == 0,
    })
}
