use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sturm_core::derset::{certificate_fixed_point, default_max_iter, delta, delta_orbit, DerClass, StrategyRegistry};
use sturm_core::mechanical::{cf_der_set, characteristic_word, ContinuedFraction, QuadraticNumber};
use sturm_core::morphism::{fixed_point_starts, fixed_point_with_budget, from_name, is_primitive};
use sturm_core::name::{is_power, names_equal_as_morphisms, normalize, MorphismName, Power, Style};
use sturm_core::stream::{bits_to_string, equal_up_to_exchange, DEFAULT_BUDGET};
use sturm_core::verify::{verify_der_set, verify_sweep, SweepOptions, VerificationReport, VerifyOptions};
use sturm_core::words::derivate;
use sturm_core::{Error, ErrorKind};

const SCHEMA: &str = "sturm/1";

/// Derivated words of fixed points of Sturmian morphisms.
///
/// Names are words over a, b, A (alpha), B (beta), optionally followed by
/// `.E` for composition with the letter exchange; `E` alone is the exchange.
#[derive(Parser)]
#[command(name = "sturm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Plain text output instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    text: bool,
    /// JSON output (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Render names with α and β.
    #[arg(long, global = true)]
    unicode: bool,
    /// Letter cap for generated streams; STURM_BUDGET overrides it.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Longest right special prefix checked by the oracle.
    #[arg(long, global = true, default_value_t = 20)]
    max_prefix: usize,
    /// Letters of each derivated word compared by the oracle.
    #[arg(long, global = true, default_value_t = 100)]
    sample: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Normal form of a name.
    Normalize { name: String },
    /// Whether two names denote the same morphism.
    Equal { left: String, right: String },
    /// Iterates of the Δ operator.
    Delta {
        name: String,
        #[arg(long, default_value_t = 1)]
        iterate: usize,
    },
    /// The Δ orbit with its preperiod and period.
    Orbit {
        name: String,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Derivated words of the fixed point, as morphism names.
    Derset {
        name: String,
        #[arg(long)]
        start: Option<u8>,
        /// Force a class: general, two_fixed_points, standard_exchange, squared_exchange.
        #[arg(long)]
        class: Option<String>,
    },
    /// Prefix of a fixed point.
    Fixpoint {
        name: String,
        #[arg(long)]
        start: Option<u8>,
        #[arg(long, default_value_t = 100)]
        length: usize,
    },
    /// Return words and derivated word for a prefix of a fixed point.
    Derivate {
        name: String,
        /// Length of the prefix.
        #[arg(long)]
        prefix: usize,
        #[arg(long)]
        start: Option<u8>,
        #[arg(long, default_value_t = 100)]
        length: usize,
    },
    /// Continued fraction, characteristic word and derivated slopes of a
    /// quadratic irrational such as `(3-sqrt(5))/2` or `[0; 2, (1)]`.
    Cf {
        value: String,
        #[arg(long, default_value_t = 100)]
        length: usize,
    },
    /// Check the derivated words of a name against the prefix oracle.
    Verify {
        name: String,
        #[arg(long)]
        start: Option<u8>,
    },
    /// Run the invariant suite over all names up to a length.
    Sweep {
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Also run the prefix oracle on every name.
        #[arg(long)]
        oracle: bool,
    },
    /// Whether a name denotes a proper power.
    Power { name: String },
}

struct Ctx {
    style: Style,
    text: bool,
    budget: usize,
    verify: VerifyOptions,
}

impl Ctx {
    fn name(&self, w: &MorphismName) -> String {
        w.render(self.style)
    }

    fn names(&self, ws: &[MorphismName]) -> Vec<String> {
        ws.iter().map(|w| self.name(w)).collect()
    }
}

/// Command output: a JSON body and its plain-text rendering.
struct Output {
    json: Value,
    text: String,
    ok: bool,
}

impl Output {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Output { json, text: text.into(), ok: true }
    }
}

fn parse_name(s: &str) -> Result<MorphismName, Error> {
    Ok(s.parse::<MorphismName>()?)
}

fn pick_start(w: &MorphismName, start: Option<u8>) -> Result<u8, Error> {
    match start {
        Some(s) => Ok(s),
        None => {
            let starts = fixed_point_starts(w)?;
            Ok(*starts.first().expect("fixed_point_starts is nonempty on success"))
        }
    }
}

fn run(cmd: Command, ctx: &Ctx) -> Result<Output, Error> {
    match cmd {
        Command::Normalize { name } => {
            let w = parse_name(&name)?;
            let nf = normalize(&w)?;
            Ok(Output::new(json!({ "input": ctx.name(&w), "normal_form": ctx.name(&nf) }), ctx.name(&nf)))
        }
        Command::Equal { left, right } => {
            let (w, v) = (parse_name(&left)?, parse_name(&right)?);
            let eq = names_equal_as_morphisms(&w, &v)?;
            let nf = [normalize(&w)?, normalize(&v)?];
            Ok(Output::new(json!({ "equal": eq, "normal_forms": ctx.names(&nf) }), eq.to_string()))
        }
        Command::Delta { name, iterate } => {
            let w = parse_name(&name)?;
            let mut seen = vec![w.clone()];
            let mut repeat = None;
            for k in 1..=iterate {
                let next = delta(&seen[k - 1])?;
                if repeat.is_none() && k > 1 {
                    repeat = seen[1..k].iter().position(|x| *x == next).map(|j| (k, j + 1));
                }
                seen.push(next);
            }
            let iterates = ctx.names(&seen[1..]);
            let text = iterates.iter().enumerate().map(|(i, s)| format!("{} {s}", i + 1)).collect::<Vec<_>>();
            let repeat = repeat.map(|(k, j)| json!({ "index": k, "equals": j }));
            Ok(Output::new(
                json!({ "input": ctx.name(&w), "iterates": iterates, "first_repeat": repeat }),
                text.join("\n"),
            ))
        }
        Command::Orbit { name, max_iter } => {
            let w = parse_name(&name)?;
            let o = delta_orbit(&w, max_iter.unwrap_or_else(|| default_max_iter(&w)))?;
            let text = format!(
                "{}\npreperiod {} period {}\ndistinct up to F: {}",
                ctx.names(&o.elements).join(" "),
                o.preperiod,
                o.period,
                ctx.names(&o.distinct_mod_f).join(" ")
            );
            Ok(Output::new(
                json!({
                    "input": ctx.name(&o.seed),
                    "elements": ctx.names(&o.elements),
                    "preperiod": o.preperiod,
                    "period": o.period,
                    "distinct_mod_f": ctx.names(&o.distinct_mod_f),
                }),
                text,
            ))
        }
        Command::Derset { name, start, class } => {
            let w = parse_name(&name)?;
            let class = class.map(|c| DerClass::parse(&c)).transpose()?;
            let r = StrategyRegistry::global().der_set_with(&w, start, class)?;
            let certs = ctx.names(&r.certificates);
            let text = format!("{} ({}, {} words)", certs.join(" "), r.class.as_str(), r.count);
            Ok(Output::new(
                json!({
                    "input": ctx.name(&r.input),
                    "class": r.class,
                    "start": r.start,
                    "certificates": certs,
                    "count": r.count,
                    "preperiod": r.preperiod,
                    "period": r.period,
                }),
                text,
            ))
        }
        Command::Fixpoint { name, start, length } => {
            let w = parse_name(&name)?;
            let s = pick_start(&w, start)?;
            let mut u = fixed_point_with_budget(&w, s, ctx.budget)?;
            let bits = bits_to_string(u.prefix(length)?);
            let m = from_name(&w);
            Ok(Output::new(
                json!({
                    "input": ctx.name(&w),
                    "start": s,
                    "images": [bits_to_string(m.image(0)), bits_to_string(m.image(1))],
                    "primitive": is_primitive(&w)?,
                    "prefix": bits,
                }),
                bits,
            ))
        }
        Command::Derivate { name, prefix, start, length } => {
            let w = parse_name(&name)?;
            let s = pick_start(&w, start)?;
            let mut u = fixed_point_with_budget(&w, s, ctx.budget)?;
            let mut rec = derivate(&mut u, prefix, length)?;
            let coded = rec.derivated.prefix(length)?.to_vec();
            let two = fixed_point_starts(&w)?.len() > 1;
            let report = StrategyRegistry::global().der_set(&w, two.then_some(s))?;
            let mut certificate = None;
            for c in &report.certificates {
                let mut v = certificate_fixed_point(c, ctx.budget)?;
                if equal_up_to_exchange(v.prefix(length)?, &coded) {
                    certificate = Some(ctx.name(c));
                    break;
                }
            }
            let d = &rec.decomposition;
            let text = format!(
                "return words {} {}\n{}\ncertificate {}",
                bits_to_string(&d.return_words[0]),
                bits_to_string(&d.return_words[1]),
                bits_to_string(&coded),
                certificate.as_deref().unwrap_or("none")
            );
            Ok(Output::new(
                json!({
                    "input": ctx.name(&w),
                    "start": s,
                    "prefix": bits_to_string(&d.prefix),
                    "return_words": [bits_to_string(&d.return_words[0]), bits_to_string(&d.return_words[1])],
                    "derivated": bits_to_string(&coded),
                    "certificate": certificate,
                }),
                text,
            ))
        }
        Command::Cf { value, length } => {
            let x = if value.trim_start().starts_with('[') {
                value.parse::<ContinuedFraction>()?
            } else {
                ContinuedFraction::expand(&value.parse::<QuadraticNumber>()?)?
            };
            let gamma = x.value()?;
            let mut c = characteristic_word(&x)?;
            let bits = bits_to_string(c.prefix(length)?);
            let complemented = x.term(1) == Some(1);
            let base = if complemented { x.complement()? } else { x.clone() };
            let slopes: Vec<String> = cf_der_set(&base)?.iter().map(|d| d.to_string()).collect();
            let text = format!("{x} = {gamma}\n{bits}\nderivated slopes: {}", slopes.join(" "));
            Ok(Output::new(
                json!({
                    "continued_fraction": x,
                    "value": gamma,
                    "characteristic_word": bits,
                    "derivated_slopes": slopes,
                    "letters_exchanged": complemented,
                }),
                text,
            ))
        }
        Command::Verify { name, start } => {
            let w = parse_name(&name)?;
            Ok(report_output(verify_der_set(&w, start, &ctx.verify)?))
        }
        Command::Sweep { max_len, oracle } => {
            let mut opts = SweepOptions::new(max_len);
            opts.oracle = oracle;
            opts.verify = ctx.verify;
            Ok(report_output(verify_sweep(&opts)))
        }
        Command::Power { name } => {
            let w = parse_name(&name)?;
            let (kind, root, exponent) = match is_power(&w) {
                Power::NotPower => ("none", None, None),
                Power::Pure { root, exponent } => ("pure", Some(ctx.name(&root)), Some(exponent)),
                Power::Exchange { root, exponent } => ("exchange", Some(ctx.name(&root)), Some(exponent)),
            };
            let text = match (&root, exponent) {
                (Some(r), Some(e)) if kind == "pure" => format!("({r})^{e}"),
                (Some(r), Some(e)) => format!("({r}.E)^{e}"),
                _ => "not a power".to_string(),
            };
            Ok(Output::new(json!({ "input": ctx.name(&w), "power": kind, "root": root, "exponent": exponent }), text))
        }
    }
}

fn report_output(r: VerificationReport) -> Output {
    let lines: Vec<String> = r
        .checks
        .iter()
        .map(|c| format!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.parameters))
        .collect();
    let ok = r.passed();
    let mut json = serde_json::to_value(&r).expect("report serializes");
    json["passed"] = json!(ok);
    Output { json, text: lines.join("\n"), ok }
}

fn emit(text_mode: bool, mut body: Value, text: &str) {
    if text_mode {
        println!("{text}");
    } else {
        let mut out = serde_json::Map::new();
        out.insert("schema".into(), json!(SCHEMA));
        if let Value::Object(m) = body.take() {
            out.extend(m);
        }
        println!("{}", serde_json::to_string_pretty(&Value::Object(out)).expect("json"));
    }
}

fn fail(text_mode: bool, kind: ErrorKind, message: String) -> ExitCode {
    if text_mode {
        eprintln!("error: {message}");
    } else {
        emit(false, json!({ "error": { "kind": kind, "message": message } }), "");
    }
    ExitCode::from(kind.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = std::env::args().any(|a| a == "--text");
            return fail(text, ErrorKind::Parse, e.render().to_string().trim().to_string());
        }
    };
    let g = cli.global;
    let budget = match std::env::var("STURM_BUDGET") {
        Ok(v) => match v.trim().parse() {
            Ok(b) => b,
            Err(_) => return fail(g.text, ErrorKind::Parse, format!("STURM_BUDGET is not a number: {v}")),
        },
        Err(_) => g.budget.unwrap_or(DEFAULT_BUDGET),
    };
    let ctx = Ctx {
        style: if g.unicode { Style::Unicode } else { Style::Ascii },
        text: g.text,
        budget,
        verify: VerifyOptions { max_prefix: g.max_prefix, sample: g.sample, budget, ..VerifyOptions::default() },
    };
    match run(cli.command, &ctx) {
        Ok(out) => {
            emit(ctx.text, out.json, &out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(ctx.text, e.kind(), e.to_string()),
    }
}
