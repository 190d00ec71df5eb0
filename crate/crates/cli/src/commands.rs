//! One function per subcommand.

use std::collections::BTreeMap;

use mdpsynth::evaluation::{
    borel_cantelli_sum, fr_futility, md_value, simulate as run_simulation, Event, FutilityOptions, SimConfig,
};
use mdpsynth::gallery::{self, GalleryEntry};
use mdpsynth::mdp::dot::to_dot;
use mdpsynth::mdp::json::{mdp_to_json, strategy_to_json, SCHEMA};
use mdpsynth::mdp::{truncate as truncate_mdp, Strategy};
use mdpsynth::rational::{self, Rational};
use mdpsynth::synthesis::{
    eps_optimal_cobuchi_md, eps_optimal_reach_md, optimal_parity_md, sigma_opt_av, ReachOptions, SynthesisResult,
};
use mdpsynth::values::{objective_value_opts, value_bounds_opts, Backend, ValueVector, Values};
use mdpsynth::{CountableMdp, FiniteMdp, Objective, StateId, StatePredicate};
use serde_json::{json, Value};

use crate::{
    input, AcceptArgs, CliError, Ctx, EvaluateArgs, ExportArgs, Format, FutilityArgs, ObjectiveKind, SimulateArgs,
    SynthesizeArgs, TruncateArgs, ValueArgs,
};

/// Radius used by `truncate` when neither a flag nor the config gives one.
pub const DEFAULT_RADIUS: usize = 16;

type Res = Result<(), CliError>;

fn io(e: std::io::Error) -> CliError {
    CliError::Input(format!("cannot write output: {e}"))
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(SCHEMA));
    }
    v
}

/// Writes `json` or `text` depending on the requested format.
fn emit(ctx: &mut Ctx, text: impl FnOnce() -> String, json: impl FnOnce() -> Value) -> Res {
    match ctx.format {
        Format::Json => {
            let body = serde_json::to_string_pretty(&with_schema(json())).expect("serializable");
            writeln!(ctx.out, "{body}").map_err(io)
        }
        Format::Text => {
            let body = text();
            write!(ctx.out, "{body}").map_err(io)?;
            if !body.ends_with('\n') {
                writeln!(ctx.out).map_err(io)?;
            }
            Ok(())
        }
        Format::Dot => Err(CliError::Usage("--format dot applies to export only".into())),
    }
}

/// Human-readable rational: exact when short, otherwise a decimal.
fn show(r: &Rational) -> String {
    let exact = rational::format(r);
    if exact.len() <= 24 {
        exact
    } else {
        format!("~{:.12e}", rational::to_f64(r))
    }
}

fn values_json(v: &ValueVector) -> Value {
    let map: BTreeMap<String, String> = (0..v.len()).map(|i| (v.ids[i].to_string(), v.text(i))).collect();
    json!(map)
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Exact => "exact",
        Backend::Float => "float",
        Backend::Auto => "auto",
    }
}

fn emit_values(ctx: &mut Ctx, obj: &Objective, v: &ValueVector) -> Res {
    emit(
        ctx,
        || {
            let mut s = format!("# {obj} ({}, {} iterations)\n", backend_name(v.backend()), v.iterations);
            for i in 0..v.len() {
                s += &format!("{}\t{}\n", v.ids[i], v.text(i));
            }
            s
        },
        || {
            json!({
                "objective": obj.to_string(),
                "backend": backend_name(v.backend()),
                "iterations": v.iterations,
                "values": values_json(v),
            })
        },
    )
}

pub fn gallery_list(ctx: &mut Ctx) -> Res {
    let entries: Vec<GalleryEntry> = gallery::NAMES.iter().map(|n| input::gallery(n)).collect::<Result<_, _>>()?;
    emit(
        ctx,
        || {
            entries
                .iter()
                .map(|e| {
                    let names: Vec<&str> = e.strategies.iter().map(|(n, _)| n.as_str()).collect();
                    let line = format!("{:<14} {:<18} {}", e.name, e.objective.to_string(), names.join(" "));
                    format!("{}\n", line.trim_end())
                })
                .collect()
        },
        || {
            let list: Vec<Value> = entries
                .iter()
                .map(|e| {
                    json!({
                        "name": e.name,
                        "objective": e.objective.to_string(),
                        "initial": e.mdp.initial(),
                        "strategies": e.strategies.iter().map(|(n, _)| n).collect::<Vec<_>>(),
                        "claims": e.claims,
                        "anchor": e.anchor.as_ref().map(|(a, _)| a),
                        "fatal": e.anchor.as_ref().map(|(_, f)| f),
                    })
                })
                .collect();
            json!({ "entries": list })
        },
    )
}

pub fn value(ctx: &mut Ctx, a: &ValueArgs) -> Res {
    let m = input::mdp(&a.mdp)?;
    let obj = input::objective(&a.objective, m.color_set())?;
    input::check_states(&m, &obj)?;
    let backend = if a.exact { Backend::Exact } else { ctx.config.backend };
    let v = objective_value_opts(&m, &obj, backend, ctx.config.float())?;
    emit_values(ctx, &obj, &v)
}

fn finite_only(kind: ObjectiveKind) -> Result<(), CliError> {
    match kind {
        ObjectiveKind::Reach | ObjectiveKind::Cobuchi => Ok(()),
        other => Err(CliError::Domain(mdpsynth::Error::Unsupported(format!(
            "{other:?} synthesis on countable input; use reach or cobuchi"
        )))),
    }
}

pub fn synthesize(ctx: &mut Ctx, a: &SynthesizeArgs) -> Res {
    let eps = rational::parse(&a.eps)?;
    let opts = ReachOptions {
        start_radius: ctx.config.radius.unwrap_or(ReachOptions::default().start_radius),
        max_radius: a.max_radius,
        branch_cap: ctx.config.branch_cap,
    };
    let loaded: Box<dyn CountableMdp>;
    let owner;
    let mdp: &dyn CountableMdp = match (&a.mdp, &a.gallery) {
        (Some(p), _) => {
            loaded = Box::new(input::mdp(p)?);
            loaded.as_ref()
        }
        (None, Some(name)) => {
            finite_only(a.objective.objective)?;
            owner = input::gallery(name)?;
            owner.mdp.as_ref()
        }
        (None, None) => return Err(CliError::Usage("give --mdp or --gallery".into())),
    };
    let obj = input::objective(&a.objective, &mdp.colors())?;
    if let Some(m) = mdp.as_finite() {
        input::check_states(m, &obj)?;
    }
    let mut extra = serde_json::Map::new();
    let result: SynthesisResult = match (&obj, a.objective.objective) {
        (Objective::Reach(t), _) => eps_optimal_reach_md(mdp, t, &eps, opts)?,
        (Objective::Safety(avoid), _) => {
            let m = mdp.as_finite().expect("checked finite");
            let sigma = sigma_opt_av(m, &avoid.mask(m))?;
            let v = md_value(m, &sigma, &obj)?;
            let exact = v.exact_or_err()?;
            let guarantee = (0..m.len()).map(|i| (m.id(i).clone(), exact[i].clone())).collect();
            let trace = (0..m.len())
                .filter(|&i| m.is_controller(i))
                .map(|i| (m.id(i).clone(), "successor of maximal safety value".to_string()))
                .collect();
            SynthesisResult { strategy: sigma, guarantee, trace, notes: vec!["optimal-avoiding strategy".into()] }
        }
        (_, ObjectiveKind::Cobuchi) => {
            let r = eps_optimal_cobuchi_md(mdp, &eps, opts)?;
            let c = &r.constants;
            let f = rational::format;
            extra.insert(
                "constants".into(),
                json!({"eps": f(&c.eps), "eps1": f(&c.eps1), "eps2": f(&c.eps2), "eps3": f(&c.eps3),
                       "k": f(&c.k), "tau1": f(&c.tau1), "tau2": f(&c.tau2)}),
            );
            extra.insert("certified".into(), json!(strings(&r.certified)));
            extra.insert("radius".into(), json!(r.radius));
            r.result
        }
        _ => {
            let m = mdp.as_finite().expect("checked finite");
            optimal_parity_md(m)?
        }
    };
    let file = strategy_to_json(&result.strategy, &result.guarantee);
    if let Some(p) = &a.out {
        input::write(p, &format!("{file}\n"))?;
    }
    let init = mdp.initial();
    let at_init = result.guarantee.get(&init).map(show);
    emit(
        ctx,
        || {
            let mut s = format!("# {obj}: {} choices", result.strategy.choice.len());
            if let Some(v) = &at_init {
                s += &format!(", guarantee {v} at {init}");
            }
            s += "\n";
            for n in &result.notes {
                s += &format!("# {n}\n");
            }
            match &a.out {
                Some(p) => s += &format!("wrote {}\n", p.display()),
                None => s += &format!("{file}\n"),
            }
            s
        },
        || {
            let mut v = json!({
                "objective": obj.to_string(),
                "choice": result.strategy,
                "guarantee": strings(&result.guarantee),
                "trace": result.trace,
                "notes": result.notes,
                "out": a.out.as_ref().map(|p| p.display().to_string()),
            });
            v.as_object_mut().expect("object").extend(extra);
            v
        },
    )
}

fn strings(m: &BTreeMap<StateId, Rational>) -> BTreeMap<String, String> {
    m.iter().map(|(k, v)| (k.to_string(), rational::format(v))).collect()
}

pub fn evaluate(ctx: &mut Ctx, a: &EvaluateArgs) -> Res {
    if let Some(name) = &a.gallery {
        let entry = input::gallery(name)?;
        let bc = borel_cantelli_sum(&entry, &a.strategy, a.cycles)?;
        return emit(
            ctx,
            || {
                let mut s = format!(
                    "# {} {}: {} cycles from index {}\n",
                    bc.entry,
                    bc.strategy,
                    bc.terms.len(),
                    bc.first_index
                );
                for (k, (t, e)) in bc.terms.iter().zip(&bc.event_probabilities).enumerate() {
                    s += &format!("E_{}\t{}\t{}\n", bc.first_index as usize + k, show(t), show(e));
                }
                s += &format!("partial sum\t{}\nlimit\t{}\n", show(&bc.partial_sum), show(&bc.limit));
                if let Some(b) = &bc.safety_lower_bound {
                    s += &format!("safety lower bound\t{}\n", show(b));
                }
                s
            },
            || serde_json::to_value(&bc).expect("serializable"),
        );
    }
    let path = a.mdp.as_ref().ok_or_else(|| CliError::Usage("give --mdp or --gallery".into()))?;
    let oa = a.objective_args().ok_or_else(|| CliError::Usage("--mdp needs --objective".into()))?;
    let m = input::mdp(path)?;
    let sigma = input::strategy(std::path::Path::new(&a.strategy))?;
    let obj = input::objective(&oa, m.color_set())?;
    input::check_states(&m, &obj)?;
    let v = md_value(&m, &sigma, &obj)?;
    emit_values(ctx, &obj, &v)
}

pub fn simulate(ctx: &mut Ctx, a: &SimulateArgs) -> Res {
    let mut events = Vec::new();
    let mut owner_entry = None;
    let mut owner_mdp = None;
    let strategy = match (&a.gallery, &a.mdp) {
        (Some(name), _) => {
            let entry = input::gallery(name)?;
            if let Some((anchor, fatal)) = &entry.anchor {
                events.push(Event::AnchorCycles {
                    anchor: anchor.clone(),
                    target: fatal.clone(),
                    max_cycles: a.cycles,
                });
                events.push(Event::Reach {
                    name: format!("reach {fatal}"),
                    target: StatePredicate::states([fatal.clone()]),
                });
            }
            let s = match (&a.strategy, &a.transducer) {
                (_, Some(p)) => Strategy::Transducer(input::transducer(p)?),
                (Some(n), None) => entry.strategy(n)?.clone(),
                (None, None) => return Err(CliError::Usage("give --strategy or --transducer".into())),
            };
            owner_entry = Some(entry);
            s
        }
        (None, Some(p)) => {
            let m = input::mdp(p)?;
            let s = match (&a.strategy, &a.transducer) {
                (_, Some(t)) => Strategy::Transducer(input::transducer(t)?),
                (Some(f), None) => Strategy::Md(input::strategy(std::path::Path::new(f))?),
                (None, None) => return Err(CliError::Usage("give --strategy or --transducer".into())),
            };
            owner_mdp = Some(m);
            s
        }
        (None, None) => return Err(CliError::Usage("give --mdp or --gallery".into())),
    };
    let mdp: &dyn CountableMdp = match (&owner_entry, &owner_mdp) {
        (Some(e), _) => e.mdp.as_ref(),
        (None, Some(m)) => m,
        (None, None) => unreachable!("one input was loaded"),
    };
    if !a.target.is_empty() {
        events.push(Event::Reach {
            name: "target".into(),
            target: StatePredicate::states(a.target.iter().map(String::as_str)),
        });
    }
    let config = SimConfig {
        horizon: a.horizon,
        episodes: a.episodes,
        seed: ctx.config.seed,
        events,
        track: a.track.iter().map(StateId::new).collect(),
    };
    let report = run_simulation(mdp, &strategy, &config)?;
    emit(
        ctx,
        || {
            let mut s = format!(
                "# {} episodes, horizon {}, seed {}, rng {}, aborted {}\n",
                report.episodes, report.horizon, report.seed, report.rng, report.aborted
            );
            for e in &report.events {
                s += &format!("{}\t{:.6}\t± {:.6}\t({} hits)\n", e.name, e.frequency, e.std_error, e.count);
            }
            for (st, n) in &report.visits {
                s += &format!("visits {st}\t{n}\n");
            }
            for d in &report.diagnostics {
                s += &format!("# {d}\n");
            }
            s
        },
        || serde_json::to_value(&report).expect("serializable"),
    )
}

pub fn futility(ctx: &mut Ctx, a: &FutilityArgs) -> Res {
    let entry = input::gallery(&a.gallery)?;
    let t = input::transducer(&a.transducer)?;
    let mut opts = FutilityOptions::default();
    if let Some(n) = a.node_cap {
        opts.node_cap = n;
    }
    let cert = fr_futility(&entry, &t, opts)?;
    emit(
        ctx,
        || {
            let mut s = format!("# {} {}: c = {}\n", cert.entry, cert.objective, show(&cert.c));
            for m in &cert.modes {
                s += &format!(
                    "mode {}\tc {}\tproduct states {}\tunexplored {}\n",
                    m.mode,
                    show(&m.c),
                    m.product_states,
                    show(&m.unexplored)
                );
            }
            s += &format!("{}\n", cert.conclusion);
            if let Some(c) = &cert.case_split {
                s += &format!("{c}\n");
            }
            s
        },
        || serde_json::to_value(&cert).expect("serializable"),
    )
}

pub fn truncate(ctx: &mut Ctx, a: &TruncateArgs) -> Res {
    let entry = input::gallery(&a.gallery)?;
    let radius = a.radius.or(ctx.config.radius).unwrap_or(DEFAULT_RADIUS);
    let b = value_bounds_opts(
        entry.mdp.as_ref(),
        &entry.objective,
        radius,
        ctx.config.branch_cap,
        ctx.config.backend,
        ctx.config.float(),
    )?;
    let text = |v: &Values, i: usize| match v {
        Values::Exact(x) => rational::format(&x[i]),
        Values::Float(x) => format!("{:.12}", x[i]),
    };
    let short = |v: &Values, i: usize| match v {
        Values::Exact(x) => show(&x[i]),
        Values::Float(x) => format!("{:.12}", x[i]),
    };
    emit(
        ctx,
        || {
            let mut s = format!("# {} {} radius {}: state lower upper gap\n", entry.name, entry.objective, radius);
            for i in 0..b.ids.len() {
                s += &format!("{}\t{}\t{}\t{:.3e}\n", b.ids[i], short(&b.lower, i), short(&b.upper, i), b.gap(i));
            }
            s
        },
        || {
            let states: BTreeMap<String, Value> = (0..b.ids.len())
                .map(|i| {
                    (
                        b.ids[i].to_string(),
                        json!({"lower": text(&b.lower, i), "upper": text(&b.upper, i), "gap": b.gap(i)}),
                    )
                })
                .collect();
            json!({"entry": entry.name, "objective": entry.objective.to_string(), "radius": radius, "max_gap": b.max_gap(), "bounds": states})
        },
    )
}

pub fn export(ctx: &mut Ctx, a: &ExportArgs) -> Res {
    let owned: FiniteMdp;
    let m: &FiniteMdp = match (&a.mdp, &a.gallery) {
        (Some(p), _) => {
            owned = input::mdp(p)?;
            &owned
        }
        (None, Some(name)) => {
            let entry = input::gallery(name)?;
            match entry.mdp.as_finite() {
                Some(f) => {
                    owned = f.clone();
                }
                None => {
                    let radius = a.radius.or(ctx.config.radius).ok_or_else(|| {
                        CliError::Usage(format!("{name} is infinite; give --radius to export a truncation"))
                    })?;
                    owned = truncate_mdp(
                        entry.mdp.as_ref(),
                        &entry.objective,
                        radius,
                        a.boundary.into(),
                        ctx.config.branch_cap,
                    )?
                    .mdp;
                }
            }
            &owned
        }
        (None, None) => return Err(CliError::Usage("give --mdp or --gallery".into())),
    };
    let body = match ctx.format {
        Format::Dot => to_dot(m),
        Format::Json | Format::Text => mdp_to_json(m),
    };
    match &a.out {
        Some(p) => {
            input::write(p, &format!("{}\n", body.trim_end()))?;
            writeln!(ctx.out, "wrote {} ({} states)", p.display(), m.len()).map_err(io)
        }
        None => writeln!(ctx.out, "{}", body.trim_end()).map_err(io),
    }
}

fn parse_suite(s: &str) -> Result<Vec<u32>, CliError> {
    let known: Vec<u32> = mdpsynth_acceptance::CRITERIA.iter().map(|c| c.0).collect();
    if s.trim() == "all" {
        return Ok(known);
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .ok()
                .filter(|id| known.contains(id))
                .ok_or_else(|| CliError::Usage(format!("unknown criterion `{t}`; use 1..=12 or all")))
        })
        .collect()
}

pub fn accept(ctx: &mut Ctx, a: &AcceptArgs) -> Res {
    let ids = parse_suite(&a.suite)?;
    let mut outcomes = Vec::new();
    for id in ids {
        let o = mdpsynth_acceptance::run(id).expect("known criterion");
        if ctx.format == Format::Text {
            writeln!(ctx.out, "{}", o.line()).map_err(io)?;
            ctx.out.flush().map_err(io)?;
        }
        outcomes.push(o);
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    if ctx.format != Format::Text {
        emit(ctx, String::new, || json!({"criteria": outcomes, "passed": failed.is_empty()}))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("criteria failed: {}", failed.join(", "))))
    }
}
