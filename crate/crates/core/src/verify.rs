//! Cross-checks between certified derivated words and brute-force codings.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::derset::{
    certificate_fixed_point, closed_form_count, count_bounds, default_max_iter, delta_orbit, der_set, DerClass,
    DerSetError,
};
use crate::error::Error;
use crate::morphism::{fixed_point_starts, fixed_point_with_budget, is_primitive};
use crate::name::{all_words, is_normalized, is_power, normalize, Letter, MorphismName};
use crate::stream::{bits_to_string, equal_up_to_exchange, StreamError, WordStream, DEFAULT_BUDGET};
use crate::words::{decompose, factor_complexity, right_special_prefixes, WordsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    pub max_prefix: usize,
    pub sample: usize,
    /// Longest prefix tried when looking for a prefix that realizes a
    /// certificate.
    pub horizon: usize,
    pub budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_prefix: 20, sample: 100, horizon: 1 << 14, budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub parameters: Value,
    pub passed: bool,
    pub witness: Option<Value>,
}

impl CheckResult {
    fn new(id: &str, parameters: Value, witness: Option<Value>) -> Self {
        CheckResult { id: id.to_string(), parameters, passed: witness.is_none(), witness }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<CheckResult>,
    pub budget: VerifyOptions,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }
}

fn budget_witness(e: &WordsError) -> Value {
    json!({ "error": e.to_string() })
}

/// Verifies `der_set(w, start)` against derivated words computed from
/// return words of the fixed point.
///
/// Forward: for each right special prefix length up to `max_prefix`, the
/// coding of length `sample` equals the fixed point of exactly one
/// certificate up to exchange. Converse: each certificate is realized by some
/// right special prefix, searched up to `horizon`.
pub fn verify_der_set(w: &MorphismName, start: Option<u8>, opts: &VerifyOptions) -> Result<VerificationReport, Error> {
    let report = der_set(w, start)?;
    let input = &report.input;
    let start = match report.start {
        Some(s) => s,
        None => *fixed_point_starts(input)?.first().ok_or_else(|| DerSetError::NoFixedPoint(input.to_string()))?,
    };
    let mut source = fixed_point_with_budget(input, start, opts.budget)?;
    let m = opts.sample;

    let mut cert_prefixes = Vec::new();
    for c in &report.certificates {
        let mut s = certificate_fixed_point(c, opts.budget)?;
        cert_prefixes.push(s.prefix(m)?.to_vec());
    }

    let mut checks = Vec::new();
    let mut forward_witness = None;
    let mut two_return_witness = None;
    let mut reconstruction_witness = None;
    let mut hits: BTreeMap<usize, usize> = BTreeMap::new();
    let mut examined = Vec::new();
    let mut limit = opts.max_prefix.max(1);
    let mut done_upto = 0;
    let mut stream_failure = None;

    'search: loop {
        let lengths = match right_special_prefixes(&mut source, limit) {
            Ok(l) => l,
            Err(e) => {
                stream_failure = Some(budget_witness(&e));
                break;
            }
        };
        for &len in lengths.iter().filter(|&&l| l > done_upto) {
            let dec = match decompose(&mut source, len, m) {
                Ok(d) => d,
                Err(e @ WordsError::Stream(StreamError::ThirdReturnWord { .. })) => {
                    two_return_witness.get_or_insert(json!({ "prefix_len": len, "error": e.to_string() }));
                    continue;
                }
                Err(e) => {
                    stream_failure = Some(json!({ "prefix_len": len, "error": e.to_string() }));
                    break 'search;
                }
            };
            examined.push(len);
            let end = dec.occurrences[dec.coding.len()];
            if dec.reconstruct() != source.prefix(end)? {
                reconstruction_witness.get_or_insert(json!({ "prefix_len": len }));
            }
            let coding = &dec.coding[..m];
            let matched: Vec<usize> =
                (0..cert_prefixes.len()).filter(|&i| equal_up_to_exchange(&cert_prefixes[i], coding)).collect();
            if matched.len() != 1 {
                forward_witness.get_or_insert(json!({
                    "prefix_len": len,
                    "coding": bits_to_string(coding),
                    "matching_certificates": matched.iter().map(|&i| report.certificates[i].to_string()).collect::<Vec<_>>(),
                }));
            }
            for i in matched {
                hits.entry(i).or_insert(len);
            }
        }
        done_upto = limit;
        if (hits.len() == cert_prefixes.len() && limit >= opts.max_prefix) || limit >= opts.horizon {
            break;
        }
        limit = (limit * 2).min(opts.horizon);
    }

    let params = json!({ "max_prefix": opts.max_prefix, "sample": m, "examined": examined });
    checks.push(CheckResult::new("forward", params.clone(), forward_witness));
    let missing: Vec<String> = (0..report.certificates.len())
        .filter(|i| !hits.contains_key(i))
        .map(|i| report.certificates[i].to_string())
        .collect();
    let realized: BTreeMap<String, usize> =
        hits.iter().map(|(&i, &len)| (report.certificates[i].to_string(), len)).collect();
    checks.push(CheckResult::new(
        "converse",
        json!({ "horizon": opts.horizon, "realized_by": realized }),
        (!missing.is_empty()).then(|| json!({ "unrealized": missing })),
    ));
    checks.push(CheckResult::new("two_return_words", params.clone(), two_return_witness));
    checks.push(CheckResult::new("reconstruction", params, reconstruction_witness));
    if let Some(w) = stream_failure {
        checks.push(CheckResult::new("budget", json!({ "budget": opts.budget }), Some(w)));
    }
    Ok(VerificationReport { subject: describe(input, report.start), checks, budget: *opts })
}

fn describe(w: &MorphismName, start: Option<u8>) -> String {
    match start {
        Some(s) => format!("{w} (start {s})"),
        None => w.to_string(),
    }
}

/// The general-class case of [`verify_der_set`].
pub fn verify_general_class(w: &MorphismName, max_prefix: usize, sample: usize) -> Result<VerificationReport, Error> {
    let opts = VerifyOptions { max_prefix, sample, ..VerifyOptions::default() };
    let name = normalize(w)?;
    if name.has_exchange() || name.within(&[Letter::A, Letter::Alpha]) || !is_primitive(&name)? {
        return Err(
            DerSetError::ClassMismatch { class: DerClass::General.as_str().into(), name: name.to_string() }.into()
        );
    }
    verify_der_set(&name, None, &opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepOptions {
    pub max_len: usize,
    /// Also run [`verify_der_set`] on every name.
    pub oracle: bool,
    pub complexity_len: usize,
    pub verify: VerifyOptions,
}

impl SweepOptions {
    pub fn new(max_len: usize) -> Self {
        SweepOptions { max_len, oracle: false, complexity_len: 25, verify: VerifyOptions::default() }
    }
}

/// Names visited by a sweep: normalized, primitive, with or without the
/// exchange suffix, in length then ASCII order.
pub fn sweep_names(max_len: usize) -> Vec<MorphismName> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for exchange in [false, true] {
            for letters in all_words(len) {
                if !is_normalized(&letters) {
                    continue;
                }
                let w = MorphismName::new(letters, exchange);
                if is_primitive(&w).unwrap_or(false) {
                    out.push(w);
                }
            }
        }
    }
    out
}

type Outcome = (&'static str, Option<Value>);

fn sweep_one(w: &MorphismName, opts: &SweepOptions) -> Vec<(MorphismName, Outcome)> {
    let mut out: Vec<(MorphismName, Outcome)> = Vec::new();
    let mut push = |id: &'static str, witness: Option<Value>| out.push((w.clone(), (id, witness)));
    let no_fixed_point = w.has_exchange() && w.within(&[Letter::A, Letter::Alpha]);
    if no_fixed_point {
        let ok = matches!(der_set(w, None), Err(DerSetError::NoFixedPoint(_)));
        push("no_fixed_point", (!ok).then(|| json!("der_set did not report a missing fixed point")));
        return out;
    }
    let two = !w.has_exchange() && w.within(&[Letter::A, Letter::Alpha]);
    let starts: Vec<Option<u8>> = if two { vec![Some(0), Some(1)] } else { vec![None] };
    let non_power = !is_power(w).is_power();

    if !w.has_exchange() && !two {
        match delta_orbit(w, default_max_iter(w)) {
            Ok(o) => {
                let len = w.len();
                let period_ok = if o.preperiod == 0 { o.period <= len } else { o.period < len };
                let recurs_ok = o.seed_recurs() || o.period < len;
                push(
                    "period_bound",
                    (!(period_ok && recurs_ok)).then(|| json!({ "preperiod": o.preperiod, "period": o.period })),
                );
                let both = w.count(Letter::B) > 0 && w.count(Letter::Beta) > 0;
                let cap = if both { len - 2 } else { 2 * len - 3 };
                push("preperiod_bound", (o.preperiod > cap).then(|| json!({ "preperiod": o.preperiod, "cap": cap })));
                let (lo, hi) = count_bounds(w).expect("general class");
                let c = o.distinct_mod_f.len();
                let within = lo <= c && c <= hi;
                push("count_bounds", (!within).then(|| json!({ "count": c, "bounds": [lo, hi] })));
            }
            Err(e) => push("orbit", Some(json!(e.to_string()))),
        }
    }

    if two && w.letters()[0] == Letter::A {
        let nb = normalize(&w.concat(&MorphismName::plain(vec![Letter::B]))).expect("plain name");
        let l = nb.letters();
        let v = &l[1..];
        let ok = l[0] == Letter::B
            && *l.last().unwrap() == Letter::A
            && v.iter().all(|&x| x == Letter::A || x == Letter::Beta)
            && v.iter().filter(|&&x| x == Letter::Beta).count() == w.count(Letter::Alpha);
        push("wb_structure", (!ok).then(|| json!({ "N(wb)": nb.to_string() })));
    }

    for start in starts {
        let report = match der_set(w, start) {
            Ok(r) => r,
            Err(e) => {
                push("der_set", Some(json!({ "start": start, "error": e.to_string() })));
                continue;
            }
        };
        if non_power {
            if let Some(expected) = closed_form_count(w, start) {
                push(
                    "closed_form_count",
                    (report.count != expected)
                        .then(|| json!({ "start": start, "count": report.count, "expected": expected })),
                );
            }
        }
        let fp_start = start.or_else(|| fixed_point_starts(w).ok().and_then(|s| s.first().copied()));
        if let Some(s) = fp_start {
            match fixed_point_with_budget(w, s, opts.verify.budget) {
                Ok(mut u) => push("complexity", complexity_witness(&mut u, opts.complexity_len)),
                Err(e) => push("complexity", Some(json!(e.to_string()))),
            }
        }
        if opts.oracle {
            match verify_der_set(w, start, &opts.verify) {
                Ok(r) => {
                    let failed: Vec<&CheckResult> = r.failures().collect();
                    push("oracle", (!failed.is_empty()).then(|| json!({ "start": start, "failed": failed })));
                }
                Err(e) => push("oracle", Some(json!({ "start": start, "error": e.to_string() }))),
            }
        }
    }
    out
}

/// `None` when the complexity is `n + 1` for every `n <= max_n`.
pub fn complexity_witness(u: &mut WordStream, max_n: usize) -> Option<Value> {
    match factor_complexity(u, max_n) {
        Ok(c) => {
            let bad = c.iter().enumerate().find(|&(n, &k)| k != n + 1);
            bad.map(|(n, &k)| json!({ "n": n, "complexity": k }))
        }
        Err(e) => Some(json!(e.to_string())),
    }
}

/// Runs the per-class invariant suite over every name of length at most
/// `max_len`, in parallel; results are merged in name order.
pub fn verify_sweep(opts: &SweepOptions) -> VerificationReport {
    let names = sweep_names(opts.max_len);
    let outcomes: Vec<Vec<(MorphismName, Outcome)>> = names.par_iter().map(|w| sweep_one(w, opts)).collect();

    let mut order: Vec<&'static str> = Vec::new();
    let mut tally: BTreeMap<&'static str, (usize, Vec<Value>)> = BTreeMap::new();
    for (name, (id, witness)) in outcomes.into_iter().flatten() {
        if !tally.contains_key(id) {
            order.push(id);
        }
        let entry = tally.entry(id).or_default();
        entry.0 += 1;
        if let Some(w) = witness {
            entry.1.push(json!({ "name": name.to_string(), "detail": w }));
        }
    }
    let checks = order
        .into_iter()
        .map(|id| {
            let (n, failures) = tally.remove(id).unwrap();
            let witness = (!failures.is_empty()).then_some(Value::Array(failures));
            CheckResult::new(id, json!({ "max_len": opts.max_len, "instances": n }), witness)
        })
        .collect();
    VerificationReport { subject: format!("sweep(max_len={})", opts.max_len), checks, budget: opts.verify }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> MorphismName {
        s.parse().unwrap()
    }

    #[test]
    fn example_names_verify() {
        for (w, certs) in [("BAaaA", 5), ("bB", 1), ("bbBa", 5)] {
            let r = verify_general_class(&n(w), 25, 100).unwrap();
            assert!(r.passed(), "{w}: {:?}", r.failures().collect::<Vec<_>>());
            let realized = &r.check("converse").unwrap().parameters["realized_by"];
            assert_eq!(realized.as_object().unwrap().len(), certs, "{w}");
        }
    }

    #[test]
    fn other_classes_verify() {
        for (w, start) in
            [("aA", Some(0)), ("aA", Some(1)), ("aaA", Some(1)), ("b.E", None), ("bBb.E", None), ("aB.E", None)]
        {
            let r = verify_der_set(&n(w), start, &VerifyOptions::default()).unwrap();
            assert!(r.passed(), "{w}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn general_check_rejects_other_classes() {
        assert!(verify_general_class(&n("aA"), 20, 100).is_err());
        assert!(verify_general_class(&n("b.E"), 20, 100).is_err());
    }

    #[test]
    fn wrong_certificate_set_is_caught() {
        // a certificate list missing an element fails the forward direction
        let w = n("BAaaA");
        let opts = VerifyOptions::default();
        let mut source = fixed_point_with_budget(&w, 1, opts.budget)
            .or_else(|_| fixed_point_with_budget(&w, 0, opts.budget))
            .unwrap();
        let rs = right_special_prefixes(&mut source, 20).unwrap();
        let report = der_set(&w, None).unwrap();
        let kept = &report.certificates[1..];
        let mut failed = false;
        for len in rs {
            let coding = decompose(&mut source, len, 100).unwrap().coding;
            let hit = kept.iter().any(|c| {
                let mut s = certificate_fixed_point(c, 1000).unwrap();
                equal_up_to_exchange(s.prefix(100).unwrap(), &coding[..100])
            });
            failed |= !hit;
        }
        assert!(failed);
    }

    #[test]
    fn small_sweep_passes() {
        let mut opts = SweepOptions::new(4);
        opts.oracle = true;
        let r = verify_sweep(&opts);
        assert!(r.passed(), "{}", serde_json::to_string_pretty(&r.failures().collect::<Vec<_>>()).unwrap());
        assert!(r.check("count_bounds").is_some());
        assert!(r.check("closed_form_count").is_some());
    }
}
