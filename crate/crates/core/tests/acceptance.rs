//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on failure.
//!
//! Everything is exact; the only tolerances are prefix lengths and the wall
//! clock limits pinned below.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use sturm_core::derset::{
    certificate_fixed_point, closed_form_count, count_bounds, default_max_iter, delta, delta_orbit, der_set,
};
use sturm_core::mechanical::{
    cf_der_set, characteristic_word, mechanical_word, slope_of_fixed_point, ContinuedFraction, QuadraticNumber,
};
use sturm_core::morphism::{fixed_point, fixed_point_starts, from_name, BinaryMorphism};
use sturm_core::name::{
    all_words, is_normalized, is_power, names_equal_as_morphisms, normalize, normalize_letters, Letter, MorphismName,
};
use sturm_core::stream::{equal_up_to_exchange, ImageGenerator, WordStream};
use sturm_core::verify::{sweep_names, verify_der_set, verify_general_class, VerifyOptions};
use sturm_core::words::{decompose, factor_complexity, right_special_prefixes};

const LIMIT_1: Duration = Duration::from_secs(1);
const LIMIT_4: Duration = Duration::from_secs(5);
const LIMIT_7: Duration = Duration::from_secs(300);
const FIB_PREFIX: usize = 200;
const MECH_PREFIX: usize = 500;
const COMPLEXITY_N: usize = 25;
const RS_CHECK_LEN: usize = 20;
const CODING_SAMPLE: usize = 100;

type Check = Result<String, String>;

fn n(s: &str) -> MorphismName {
    s.parse().unwrap()
}

fn word(parts: &[(Letter, usize)]) -> MorphismName {
    MorphismName::plain(parts.iter().flat_map(|&(l, k)| std::iter::repeat_n(l, k)).collect())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("took {spent:?}, limit {limit:?}"))
}

/// Fixed points touched by criteria 1-10, checked again in criterion 11.
#[derive(Default)]
struct Touched(BTreeSet<(MorphismName, u8)>);

impl Touched {
    fn add(&mut self, w: &MorphismName, start: Option<u8>) {
        let starts = fixed_point_starts(w).unwrap_or_default();
        match start {
            Some(s) => {
                self.0.insert((w.clone(), s));
            }
            None => {
                if let Some(&s) = starts.first() {
                    self.0.insert((w.clone(), s));
                }
            }
        }
    }
}

fn criterion_1(t: &mut Touched) -> Check {
    let start = Instant::now();
    let w = n("BAaaA");
    let o = delta_orbit(&w, default_max_iter(&w)).map_err(|e| e.to_string())?;
    let got: Vec<String> = o.elements.iter().map(|x| x.render(sturm_core::name::Style::Unicode)).collect();
    let expected = ["βbbαα", "bbβαα", "bβααb", "βααbb", "ααbbβ"];
    ensure(got == expected, || format!("orbit {got:?}"))?;
    ensure(o.nth(6) == o.nth(3) && o.nth(5) != o.nth(2), || "Δ⁶ = Δ³ is not the first repetition".into())?;
    let r = der_set(&w, None).map_err(|e| e.to_string())?;
    ensure(r.count == 5, || format!("count {}", r.count))?;
    within(LIMIT_1, start)?;
    t.add(&w, None);
    r.certificates.iter().for_each(|c| t.add(c, None));
    Ok(format!("orbit matches, Δ⁶ = Δ³, 5 derivated words in {:?}", start.elapsed()))
}

fn criterion_2() -> Check {
    let w = n("abAb");
    let nf = normalize(&w).map_err(|e| e.to_string())?;
    ensure(nf == n("bbBa"), || format!("N(abαb) = {nf}"))?;
    for v in ["baAb", "bbBa"] {
        ensure(names_equal_as_morphisms(&w, &n(v)).unwrap(), || format!("abαb differs from {v}"))?;
        ensure(from_name(&w) == from_name(&n(v)), || format!("images of abαb and {v} differ"))?;
    }
    Ok("N(abαb) = bbβa; abαb = baαb = bbβa as morphisms".into())
}

fn criterion_3(t: &mut Touched) -> Check {
    let fib = BinaryMorphism::new(vec![0, 1], vec![0]);
    let mut tau =
        WordStream::new(Box::new(ImageGenerator::new(fib.images(), fixed_point(&n("b.E"), 0).unwrap(), "tau")));
    let fib_prefix = tau.prefix(FIB_PREFIX).unwrap().to_vec();
    for w in ["bB", "b.E"] {
        let w = n(w);
        let r = der_set(&w, None).map_err(|e| e.to_string())?;
        ensure(r.count == 1, || format!("{w}: {} certificates", r.count))?;
        let mut u = certificate_fixed_point(&r.certificates[0], 1 << 12).unwrap();
        ensure(equal_up_to_exchange(u.prefix(FIB_PREFIX).unwrap(), &fib_prefix), || {
            format!("{w}: certificate {} does not fix the Fibonacci word", r.certificates[0])
        })?;
        let v = verify_der_set(&w, None, &VerifyOptions::default()).map_err(|e| e.to_string())?;
        ensure(v.passed(), || format!("{w}: oracle failed {:?}", v.failures().collect::<Vec<_>>()))?;
        t.add(&w, None);
        t.add(&r.certificates[0], None);
    }
    Ok("one derivated word, the Fibonacci word itself, for bβ and b.E".into())
}

fn criterion_4(t: &mut Touched) -> Check {
    use Letter::{Beta, A, B};
    let start = Instant::now();
    for len in 3..=8 {
        let w = word(&[(B, len - 2), (Beta, 1), (A, 1)]);
        let o = delta_orbit(&w, default_max_iter(&w)).map_err(|e| e.to_string())?;
        let pre: Vec<MorphismName> = (3..=len).map(|k| word(&[(B, len - k), (Beta, 1), (B, k - 2), (A, 1)])).collect();
        let per: Vec<MorphismName> = (2..=len).map(|k| word(&[(B, len - k), (A, 1), (Beta, 1), (B, k - 2)])).collect();
        ensure(o.preperiod == len - 2 && o.period == len - 1, || {
            format!("{w}: preperiod {} period {}", o.preperiod, o.period)
        })?;
        ensure(o.elements[..o.preperiod] == pre[..], || format!("{w}: preperiod names {:?}", o.elements))?;
        ensure(o.cycle() == per.as_slice(), || format!("{w}: period names {:?}", o.cycle()))?;
        ensure(o.distinct_mod_f.len() == 2 * len - 3, || format!("{w}: {} distinct", o.distinct_mod_f.len()))?;
        t.add(&w, None);
    }
    within(LIMIT_4, start)?;
    Ok(format!("n = 3..8: preperiod n-2, period n-1, 2n-3 words, in {:?}", start.elapsed()))
}

fn criterion_5(t: &mut Touched) -> Check {
    use Letter::{Alpha, Beta, A, B};
    for len in 3..=8 {
        let m = len - 2;
        let w = word(&[(Beta, m), (A, 1), (Alpha, 1)]);
        let o = delta_orbit(&w, default_max_iter(&w)).map_err(|e| e.to_string())?;
        let landmarks = [
            (len - 2, word(&[(A, 1), (Beta, m), (Alpha, 1)])),
            (len - 1, word(&[(Beta, m), (B, 1), (Alpha, 1)])),
            (2 * len - 3, word(&[(B, 1), (Beta, m), (Alpha, 1)])),
            (2 * len - 2, word(&[(Beta, m), (Alpha, 1), (B, 1)])),
            (3 * len - 4, word(&[(Alpha, 1), (B, 1), (Beta, m)])),
        ];
        for (k, expected) in &landmarks {
            ensure(o.nth(*k) == expected, || format!("{w}: Δ^{k} = {}, expected {expected}", o.nth(*k)))?;
        }
        ensure(o.nth(3 * len - 3) == o.nth(2 * len - 2), || format!("{w}: Δ^(3n-3) ≠ Δ^(2n-2)"))?;
        let r = der_set(&w, None).map_err(|e| e.to_string())?;
        let (_, hi) = count_bounds(&w).unwrap();
        ensure(r.count == 3 * len - 4 && r.count == hi, || format!("{w}: count {}", r.count))?;
        t.add(&w, None);
    }
    Ok("n = 3..8: landmarks match, Δ^(3n-3) = Δ^(2n-2), count 3n-4".into())
}

fn criterion_6(t: &mut Touched) -> Check {
    for len in 2..=8 {
        let w = word(&[(Letter::A, len - 1), (Letter::Beta, 1)]);
        ensure(delta(&w).unwrap() == w, || format!("Δ does not fix {w}"))?;
        let r = der_set(&w, None).map_err(|e| e.to_string())?;
        ensure(r.count == 1, || format!("{w}: count {}", r.count))?;
        t.add(&w, None);
    }
    Ok("a^(n-1)β, n = 2..8: count 1".into())
}

fn general_names(max_len: usize) -> Vec<MorphismName> {
    sweep_names(max_len).into_iter().filter(|w| !w.has_exchange() && !w.within(&[Letter::A, Letter::Alpha])).collect()
}

fn criterion_7(t: &mut Touched) -> Check {
    let start = Instant::now();
    let names = general_names(5);
    let mut certificates = 0;
    for w in &names {
        let r = verify_general_class(w, 20, 100).map_err(|e| format!("{w}: {e}"))?;
        ensure(r.passed(), || format!("{w}: {}", serde_json::to_string(&r.failures().collect::<Vec<_>>()).unwrap()))?;
        certificates += r.check("converse").unwrap().parameters["realized_by"].as_object().unwrap().len();
        t.add(w, None);
    }
    within(LIMIT_7, start)?;
    Ok(format!(
        "{} names, {certificates} certificates realized, both directions, in {:?}",
        names.len(),
        start.elapsed()
    ))
}

fn criterion_8() -> Check {
    let mut compared = 0;
    for w in sweep_names(6) {
        if is_power(&w).is_power() {
            continue;
        }
        let two = !w.has_exchange() && w.within(&[Letter::A, Letter::Alpha]);
        let starts = if two { vec![Some(0), Some(1)] } else { vec![None] };
        for start in starts {
            let Some(expected) = closed_form_count(&w, start) else { continue };
            let r = der_set(&w, start).map_err(|e| format!("{w}: {e}"))?;
            ensure(r.count == expected, || format!("{w} start {start:?}: {} vs {expected}", r.count))?;
            compared += 1;
        }
    }
    let mut structural = 0;
    for len in 1..=7 {
        for letters in all_words(len) {
            let w = MorphismName::plain(letters);
            if !w.within(&[Letter::A, Letter::Alpha]) || w.letters()[0] != Letter::A {
                continue;
            }
            let nb = normalize(&w.concat(&n("b"))).unwrap();
            let l = nb.letters();
            let v = &l[1..];
            let ok = l[0] == Letter::B
                && *l.last().unwrap() == Letter::A
                && v.iter().all(|&x| x == Letter::A || x == Letter::Beta)
                && v.iter().filter(|&&x| x == Letter::Beta).count() == w.count(Letter::Alpha);
            ensure(ok, || format!("{w}: N(wb) = {nb}"))?;
            structural += 1;
        }
    }
    ensure(compared > 0 && structural > 0, || "nothing compared".into())?;
    Ok(format!("{compared} closed-form counts agree; N(wb) structure holds for {structural} names"))
}

fn criterion_9() -> Check {
    let names = general_names(6);
    for w in &names {
        let len = w.len();
        let o = delta_orbit(w, default_max_iter(w)).map_err(|e| e.to_string())?;
        let period_cap = if o.preperiod == 0 { len } else { len - 1 };
        ensure(o.period <= period_cap, || format!("{w}: period {}", o.period))?;
        ensure(o.seed_recurs() || o.period < len, || format!("{w}: period {} without recurrence", o.period))?;
        let both = w.count(Letter::B) > 0 && w.count(Letter::Beta) > 0;
        let cap = if both { len - 2 } else { 2 * len - 3 };
        ensure(o.preperiod <= cap, || format!("{w}: preperiod {} > {cap}", o.preperiod))?;
        let (lo, hi) = count_bounds(w).unwrap();
        let c = o.distinct_mod_f.len();
        ensure(lo <= c && c <= hi, || format!("{w}: count {c} outside [{lo}, {hi}]"))?;
    }
    Ok(format!("period, preperiod and count bounds hold for {} names", names.len()))
}

fn criterion_10(t: &mut Touched) -> Check {
    let g: QuadraticNumber = "(3-sqrt(5))/2".parse().unwrap();
    let mut s = mechanical_word(&g, &g, false).map_err(|e| e.to_string())?;
    ensure(s.prefix(10).unwrap() == [0, 1, 0, 0, 1, 0, 1, 0, 0, 1], || "Fibonacci prefix".into())?;
    let fib_cf: ContinuedFraction = "[0; 2, (1)]".parse().unwrap();
    let mut c = characteristic_word(&fib_cf).unwrap();
    ensure(c.prefix(MECH_PREFIX).unwrap() == s.prefix(MECH_PREFIX).unwrap(), || "c([0;2,(1)]) ≠ s(γ,γ)".into())?;

    let one = QuadraticNumber::integer(1);
    let b = BinaryMorphism::generator(Letter::B);
    for text in ["[0; 2, (1)]", "[0; (2)]", "[0; 3, (1, 2)]", "[0; (1, 4)]", "[0; 5, (3)]"] {
        let x: ContinuedFraction = text.parse().unwrap();
        let v = x.value().unwrap();
        let mut image =
            WordStream::new(Box::new(ImageGenerator::new(b.images(), characteristic_word(&x).unwrap(), "b")));
        let shifted = ContinuedFraction::expand(&(v / (one + v))).unwrap();
        let mut target = characteristic_word(&shifted).unwrap();
        ensure(image.prefix(MECH_PREFIX).unwrap() == target.prefix(MECH_PREFIX).unwrap(), || {
            format!("φ_b(c({text})) ≠ c(γ/(1+γ))")
        })?;
    }

    let mut standard = 0;
    for len in 2..=4 {
        for letters in all_words(len) {
            let w = MorphismName::plain(letters);
            if !w.within(&[Letter::B, Letter::Beta]) || !w.has_latin() || !w.has_greek() || is_power(&w).is_power() {
                continue;
            }
            let gamma = slope_of_fixed_point(&w).map_err(|e| e.to_string())?;
            let x = ContinuedFraction::expand(&gamma).map_err(|e| e.to_string())?;
            let mut u = fixed_point(&w, *fixed_point_starts(&w).unwrap().first().unwrap()).unwrap();
            let mut cw = characteristic_word(&x).unwrap();
            ensure(u.prefix(MECH_PREFIX).unwrap() == cw.prefix(MECH_PREFIX).unwrap(), || {
                format!("{w}: fixed point ≠ c({x})")
            })?;
            let base = if x.term(1).unwrap() >= 2 { x } else { x.complement().unwrap() };
            let deltas = cf_der_set(&base).map_err(|e| e.to_string())?;
            let report = der_set(&w, None).map_err(|e| e.to_string())?;
            let from_cf: Vec<Vec<u8>> =
                deltas.iter().map(|d| characteristic_word(d).unwrap().prefix(MECH_PREFIX).unwrap().to_vec()).collect();
            let from_names: Vec<Vec<u8>> = report
                .certificates
                .iter()
                .map(|v| certificate_fixed_point(v, 1 << 12).unwrap().prefix(MECH_PREFIX).unwrap().to_vec())
                .collect();
            ensure(from_cf.len() == from_names.len(), || {
                format!("{w}: {} continued fractions vs {} certificates", from_cf.len(), from_names.len())
            })?;
            for p in &from_cf {
                ensure(from_names.iter().any(|q| equal_up_to_exchange(p, q)), || format!("{w}: unmatched slope"))?;
            }
            for q in &from_names {
                ensure(from_cf.iter().any(|p| equal_up_to_exchange(p, q)), || format!("{w}: unmatched certificate"))?;
            }
            standard += 1;
            t.add(&w, None);
        }
    }
    Ok(format!("Fibonacci prefix, 5 slope shifts, {standard} standard names agree with the slope description"))
}

fn criterion_11(t: &Touched) -> Check {
    let expected: Vec<usize> = (1..=COMPLEXITY_N + 1).collect();
    for (w, s) in &t.0 {
        let mut u = fixed_point(w, *s).map_err(|e| e.to_string())?;
        let c = factor_complexity(&mut u, COMPLEXITY_N).map_err(|e| format!("{w}: {e}"))?;
        ensure(c == expected, || format!("{w} start {s}: complexity {c:?}"))?;
        for len in right_special_prefixes(&mut u, RS_CHECK_LEN).map_err(|e| e.to_string())? {
            let d = decompose(&mut u, len, CODING_SAMPLE).map_err(|e| format!("{w} prefix {len}: {e}"))?;
            let end = d.occurrences[d.coding.len()];
            ensure(d.reconstruct() == u.prefix(end).unwrap(), || format!("{w} prefix {len}: reconstruction"))?;
        }
    }
    Ok(format!(
        "{} fixed points: complexity n+1 up to {COMPLEXITY_N}, two return words, exact reconstruction",
        t.0.len()
    ))
}

/// Rewrite class of `w` by breadth-first search over both rule directions.
fn rewrite_class(w: &[Letter]) -> Vec<Vec<Letter>> {
    use Letter::{Alpha, Beta, A, B};
    let rules = [(Alpha, A, Beta, Beta, B, Alpha), (A, Alpha, B, B, Beta, A)];
    let mut seen: HashSet<Vec<Letter>> = HashSet::new();
    let mut queue = VecDeque::from([w.to_vec()]);
    seen.insert(w.to_vec());
    while let Some(x) = queue.pop_front() {
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                for &(l, mid, r, l2, mid2, r2) in &rules {
                    for (from, to) in [((l, mid, r), (l2, mid2, r2)), ((l2, mid2, r2), (l, mid, r))] {
                        let inner = &x[i + 1..j];
                        if x[i] == from.0 && x[j] == from.2 && inner.iter().all(|&c| c == from.1) {
                            let mut y = x.clone();
                            y[i] = to.0;
                            y[j] = to.2;
                            y[i + 1..j].iter_mut().for_each(|c| *c = to.1);
                            if seen.insert(y.clone()) {
                                queue.push_back(y);
                            }
                        }
                    }
                }
            }
        }
    }
    seen.into_iter().collect()
}

fn criterion_12() -> Check {
    let rank = |l: &Letter| l.rank();
    let mut total = 0;
    for len in 1..=6 {
        let mut done: HashSet<Vec<Letter>> = HashSet::new();
        for w in all_words(len) {
            if done.contains(&w) {
                continue;
            }
            let class = rewrite_class(&w);
            let max = class.iter().max_by(|x, y| x.iter().map(rank).cmp(y.iter().map(rank))).unwrap().clone();
            let image = from_name(&MorphismName::plain(max.clone()));
            for v in &class {
                ensure(normalize_letters(v) == max, || format!("N({v:?}) ≠ class maximum"))?;
                ensure(from_name(&MorphismName::plain(v.clone())) == image, || format!("{v:?}: images differ"))?;
                done.insert(v.clone());
                total += 1;
            }
            ensure(is_normalized(&max), || "maximum not recognized as normalized".into())?;
        }
    }
    Ok(format!("{total} names: N(w) is the class maximum and φ_N(w) = φ_w"))
}

fn main() -> ExitCode {
    let mut touched = Touched::default();
    let results: Vec<(usize, &str, Check)> = vec![
        (1, "orbit of βαaaα", criterion_1(&mut touched)),
        (2, "normal form of abαb", criterion_2()),
        (3, "Fibonacci word", criterion_3(&mut touched)),
        (4, "family b^(n-2)βa", criterion_4(&mut touched)),
        (5, "family β^(n-2)aα", criterion_5(&mut touched)),
        (6, "lower bound a^(n-1)β", criterion_6(&mut touched)),
        (7, "oracle equivalence |w| <= 5", criterion_7(&mut touched)),
        (8, "closed-form counts", criterion_8()),
        (9, "orbit bounds |w| <= 6", criterion_9()),
        (10, "mechanical words", criterion_10(&mut touched)),
    ];
    let mut results = results;
    results.push((11, "word-level properties", criterion_11(&touched)));
    results.push((12, "normalization oracle |w| <= 6", criterion_12()));

    let mut failed = 0;
    for (id, title, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} ({title}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({title}): {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
