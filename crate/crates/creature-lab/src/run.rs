//! Verb dispatch behind the command-line front end.
//!
//! Every verb loads schema-checked JSON inputs, runs one library
//! operation, and renders a deterministic report. Exit codes: 0 for a
//! positive verdict, 1 for a negative verdict or diagnosis, 2 for input
//! errors, 3 for tripped size guards.

use std::path::PathBuf;

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::amalgam::{amalgamate, AmalgamCase, Schedule};
use crate::axioms::check_axioms;
use crate::candidate::validate_candidate;
use crate::creature::FamilyKind;
use crate::error::{Error, Result};
use crate::family::MeasuredFamily;
use crate::fuzz::fuzz_suite;
use crate::guard::Guards;
use crate::json::{
    self, antichain_from_doc, candidate_from_doc, creature_from_doc, named_prefix_from_docs,
    parts_from_doc, profile_from_doc, template_from_doc, transfer_from_doc, valuation_from_doc,
};
use crate::measure::{check_semi_measure, classify_candidate, find_large_node, front_value, mval};
use crate::random_family::{dyadic_oracle, RandomFamily};
use crate::rational::{fmt_rat, parse_rat};
use crate::report::Report;
use crate::split::beta_split;
use crate::star::transfer::TransferMode;
use crate::star::{paper_profile, StarFamily};
use crate::templates::{
    bits_to_string, canonical_form, covering_map, isomorphic, properly_extends,
    restrict_template, validate_named_prefix,
};

#[derive(Clone, Debug, Default)]
pub struct RunOpts {
    pub guards: Guards,
    pub timing: bool,
}

#[derive(Clone, Debug)]
pub enum TemplateAction {
    Validate,
    Canonical,
    Restrict { zeta: u64 },
    Isomorphic { other: PathBuf },
    Prefix,
    Cover,
    CoveringMap,
}

#[derive(Clone, Debug)]
pub enum Command {
    Axioms {
        creature: PathBuf,
        profile: Option<PathBuf>,
        samples: u64,
        seed: u64,
    },
    Measure {
        candidate: PathBuf,
        valuation: PathBuf,
        profile: Option<PathBuf>,
        front: Option<usize>,
        classify: bool,
        semi: Option<PathBuf>,
        large_eps: Option<String>,
    },
    Stabilize {
        creature: PathBuf,
        valuation: PathBuf,
        profile: Option<PathBuf>,
        gprime: Option<String>,
        gain: Option<String>,
    },
    Split {
        creature: PathBuf,
        r: PathBuf,
        r0: PathBuf,
        r1: PathBuf,
        theta: Option<String>,
        drop: String,
        profile: Option<PathBuf>,
        star_proof: bool,
    },
    Amalgamate {
        candidate: PathBuf,
        valuation: PathBuf,
        antichain: PathBuf,
        parts: PathBuf,
        epsilon: String,
        schedule: Option<String>,
        profile: Option<PathBuf>,
    },
    Transfer {
        instance: PathBuf,
        bit_split: bool,
        drop: String,
        profile: PathBuf,
    },
    Profile {
        paper: bool,
        kmax: u64,
        kmax_guard: u64,
        digits: bool,
        toy: Option<PathBuf>,
    },
    Template {
        input: PathBuf,
        action: TemplateAction,
        profile: Option<PathBuf>,
    },
    Oracle {
        candidate: PathBuf,
        valuation: PathBuf,
    },
    Fuzz {
        suite: String,
        seed: u64,
        count: u64,
    },
}

fn load_star_family(profile: &Option<PathBuf>, guards: &Guards) -> Result<Option<StarFamily>> {
    match profile {
        None => Ok(None),
        Some(path) => {
            let doc: json::ProfileDoc = json::read_json(path)?;
            Ok(Some(StarFamily::new(profile_from_doc(&doc)?, guards.clone())))
        }
    }
}

/// Picks the family handle a document's family tag calls for.
fn family_handle<'a>(
    kind: FamilyKind,
    star: &'a Option<StarFamily>,
    random: &'a RandomFamily,
) -> Result<&'a dyn MeasuredFamily> {
    match kind {
        FamilyKind::Random => Ok(random),
        FamilyKind::Star => star
            .as_ref()
            .map(|f| f as &dyn MeasuredFamily)
            .ok_or_else(|| Error::input("star inputs need --profile <toy profile file>")),
    }
}

fn parse_schedule(spec: &Option<String>) -> Result<Schedule> {
    match spec.as_deref() {
        None | Some("default") | Some("e") => Ok(Schedule::Default),
        Some(text) => {
            if text.contains(',') {
                let table = text
                    .split(',')
                    .map(parse_rat)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Schedule::Table(table))
            } else {
                Ok(Schedule::Constant(parse_rat(text)?))
            }
        }
    }
}

fn parse_gbits(spec: &str) -> Result<crate::node::PartialBits> {
    let pairs: Vec<(u8, u8)> = serde_json::from_str(spec)
        .map_err(|e| Error::input(format!("bad constraint extension {spec:?}: {e}")))?;
    crate::node::PartialBits::new(pairs.into_iter().map(|(c, b)| (c, b != 0)).collect())
}

pub fn run(cmd: &Command, opts: &RunOpts) -> Result<Report> {
    let start = std::time::Instant::now();
    let mut report = dispatch(cmd, opts)?;
    if opts.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

fn dispatch(cmd: &Command, opts: &RunOpts) -> Result<Report> {
    let random = RandomFamily;
    match cmd {
        Command::Axioms {
            creature,
            profile,
            samples,
            seed,
        } => {
            let doc: json::CreatureDoc = json::read_json(creature)?;
            let t = creature_from_doc(&doc)?;
            let star = load_star_family(profile, &opts.guards)?;
            let family = family_handle(t.family(), &star, &random)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let ax = check_axioms(family, &t, *samples, &mut rng, &opts.guards)?;
            let mut report = Report::new("axioms");
            report.value("rows", ax.rows);
            report.check_flag("monotone (structural)", ax.monotone_structural);
            report.check_flag("homogeneous (structural)", ax.homogeneous_structural);
            report.check_flag("continuous (structural)", ax.continuous_structural);
            report.check_flag("zero law", ax.zero_law);
            report.check_flag("monotone (samples)", ax.monotone_samples_ok);
            report.check_flag("homogeneous (samples)", ax.homogeneity_samples_ok);
            report.value(
                "split_feasible",
                format!("{}/{}", ax.split_feasible, ax.split_sampled),
            );
            report.set_verdict(ax.all_hold());
            Ok(report)
        }

        Command::Measure {
            candidate,
            valuation,
            profile,
            front,
            classify,
            semi,
            large_eps,
        } => {
            let cdoc: json::CandidateDoc = json::read_json(candidate)?;
            let s = candidate_from_doc(&cdoc)?;
            let vdoc: json::ValuationDoc = json::read_json(valuation)?;
            let f = valuation_from_doc(&vdoc)?;
            let star = load_star_family(profile, &opts.guards)?;
            let family = family_handle(
                s.family().unwrap_or(FamilyKind::Random),
                &star,
                &random,
            )?;
            let validation = validate_candidate(family, &s);
            let mut report = Report::new("measure");
            for v in &validation.violations {
                report.check_flag(&format!("candidate: {v}"), false);
            }
            if !validation.ok() {
                return Ok(report.negative());
            }
            for (level, norm) in &validation.min_norm_by_level {
                report.value(&format!("min_norm_level_{level}"), fmt_rat(norm));
            }
            let m = mval(family, &s, &f)?;
            report.rational("root", m.root_value());
            let levels: Vec<usize> = match front {
                Some(level) => vec![*level],
                None => (s.root().len()..=s.height()).collect(),
            };
            for level in levels {
                report.rational(
                    &format!("front_value_{level}"),
                    &front_value(family, &s, level)?,
                );
            }
            if *classify {
                let c = classify_candidate(family, &s, &f)?;
                report.value("normal", c.normal);
                report.value("special", c.special);
                if let Some((node, value)) = c.below_floor.first() {
                    report.value("first_below_floor", node);
                    report.rational("first_below_floor_value", value);
                }
            }
            if let Some(path) = semi {
                let mudoc: json::ValuationDoc = json::read_json(path)?;
                let mu = valuation_from_doc(&mudoc)?;
                let entries = mu.iter().map(|(n, v)| (n.clone(), v.clone())).collect();
                let verdict = check_semi_measure(family, &s, &entries)?;
                report.value("semi_measure", verdict.verdict);
            }
            if let Some(eps) = large_eps {
                let eps = parse_rat(eps)?;
                match find_large_node(family, &s, &f, &eps)? {
                    Some((node, value)) => {
                        report.value("large_node", node);
                        report.rational("large_node_value", &value);
                    }
                    None => {
                        report.value("large_node", "none");
                    }
                }
            }
            Ok(report)
        }

        Command::Stabilize {
            creature,
            valuation,
            profile,
            gprime,
            gain,
        } => {
            let doc: json::CreatureDoc = json::read_json(creature)?;
            let t = creature_from_doc(&doc)?;
            let star = load_star_family(profile, &opts.guards)?
                .ok_or_else(|| Error::input("stabilize needs --profile"))?;
            let vdoc: json::ValuationDoc = json::read_json(valuation)?;
            let r = valuation_from_doc(&vdoc)?;
            let gstart = match gprime {
                Some(spec) => parse_gbits(spec)?,
                None => t.star()?.g.clone(),
            };
            let gain = match gain {
                Some(g) => parse_rat(g)?,
                None => star.profile.thresholds.stabilize_gain.clone(),
            };
            let out = star.greedy_stabilize(&t, &gstart, &r, &gain)?;
            let c = &out.certificate;
            let mut report = Report::new("stabilize");
            report.rational("initial", &c.initial);
            report.value("rounds", c.rounds);
            report.rational("grown", &c.grown);
            report.rational("value", &c.value);
            report.value("constraint", &out.creature.star()?.g);
            report.value("retained", out.creature.pos_count());
            report.check_flag("hypothesis: initial above the floor", c.hypothesis_met);
            report.check_flag("step bound", c.step_bound_ok);
            report.check_ge("value floor", &c.value, &c.floor_claim);
            report.check_le("row ceiling", &c.row_max, &c.ceiling_claim);
            let ok = c.step_bound_ok && c.floor_ok && c.ceiling_ok && c.window_ok;
            report.set_verdict(ok);
            Ok(report)
        }

        Command::Split {
            creature,
            r,
            r0,
            r1,
            theta,
            drop,
            profile,
            star_proof,
        } => {
            let doc: json::CreatureDoc = json::read_json(creature)?;
            let t = creature_from_doc(&doc)?;
            let load = |p: &PathBuf| -> Result<crate::creature::Valuation> {
                let d: json::ValuationDoc = json::read_json(p)?;
                valuation_from_doc(&d)
            };
            let (rv, rv0, rv1) = (load(r)?, load(r0)?, load(r1)?);
            let star = load_star_family(profile, &opts.guards)?;
            let drop = parse_rat(drop)?;
            let mut report = Report::new("split");
            if *star_proof {
                let star = star.ok_or_else(|| Error::input("--star-proof needs --profile"))?;
                match star.split_star(&t, &rv, &rv0, &rv1)? {
                    crate::star::split::StarSplit::Witness {
                        witness,
                        value,
                        theta,
                        ..
                    } => {
                        report.rational("value", &value);
                        report.rational("theta", &theta);
                        report.rational("c0", &witness.c0);
                        report.rational("c1", &witness.c1);
                        report.rational("target", &witness.target);
                    }
                    crate::star::split::StarSplit::Diagnosis { reason, value, .. } => {
                        report.rational("value", &value);
                        report.value("diagnosis", reason);
                        report.set_verdict(false);
                    }
                }
                return Ok(report);
            }
            let family = family_handle(t.family(), &star, &random)?;
            let theta = match theta {
                Some(x) => parse_rat(x)?,
                None => crate::rational::beta_threshold(t.level),
            };
            let out = beta_split(family, &t, &rv, &rv0, &rv1, &theta, &drop, &opts.guards)?;
            report.rational("value", &out.value);
            report.rational("target", &out.target);
            report.check_flag("hypothesis: value reaches theta", out.hypothesis_met);
            report.value(
                "max0",
                out.max0.as_ref().map(fmt_rat).unwrap_or_else(|| "none".into()),
            );
            report.value(
                "max1",
                out.max1.as_ref().map(fmt_rat).unwrap_or_else(|| "none".into()),
            );
            match &out.witness {
                Some(w) => {
                    report.rational("c0", &w.c0);
                    report.rational("c1", &w.c1);
                }
                None => {
                    report.value("witness", "infeasible");
                }
            }
            report.set_verdict(out.feasible);
            Ok(report)
        }

        Command::Amalgamate {
            candidate,
            valuation,
            antichain,
            parts,
            epsilon,
            schedule,
            profile,
        } => {
            let cdoc: json::CandidateDoc = json::read_json(candidate)?;
            let p = candidate_from_doc(&cdoc)?;
            let vdoc: json::ValuationDoc = json::read_json(valuation)?;
            let f = valuation_from_doc(&vdoc)?;
            let bdoc: json::AntichainDoc = json::read_json(antichain)?;
            let b = antichain_from_doc(&bdoc)?;
            let qdoc: json::PartsDoc = json::read_json(parts)?;
            let q = parts_from_doc(&qdoc)?;
            let star = load_star_family(profile, &opts.guards)?;
            let family = family_handle(
                p.family().unwrap_or(FamilyKind::Random),
                &star,
                &random,
            )?;
            let eps = parse_rat(epsilon)?;
            let schedule = parse_schedule(schedule)?;
            let out = amalgamate(family, &p, &f, &b, &q, &eps, &schedule, &opts.guards)?;
            let mut report = Report::new("amalgamate");
            report.rational("r0_root", &out.r0_root);
            report.rational("r1_root", &out.r1_root);
            report.rational("case_two_bar", &out.case_two_bar);
            for h in &out.hypotheses {
                report.check_flag(&format!("hypothesis: {} ({})", h.label, h.detail), h.holds);
            }
            match &out.case {
                AmalgamCase::Avoiding {
                    claimed,
                    verified_root,
                    candidate,
                    ..
                } => {
                    report.value("case", "avoiding");
                    report.rational("claimed", claimed);
                    report.check_ge("verified root measure", verified_root, claimed);
                    report.value("nodes", candidate.nodes().len());
                }
                AmalgamCase::Hitting {
                    claimed,
                    verified_root,
                    candidate,
                    front,
                    ..
                } => {
                    report.value("case", "hitting");
                    report.rational("claimed", claimed);
                    report.check_ge("verified root measure", verified_root, claimed);
                    report.value("front_size", front.len());
                    report.value("nodes", candidate.nodes().len());
                }
            }
            Ok(report)
        }

        Command::Transfer {
            instance,
            bit_split,
            drop,
            profile,
        } => {
            let doc: json::TransferDoc = json::read_json(instance)?;
            let inst = transfer_from_doc(&doc)?;
            let star = load_star_family(&Some(profile.clone()), &opts.guards)?
                .expect("profile given");
            let mode = if *bit_split {
                TransferMode::BitSplit
            } else {
                TransferMode::Plain
            };
            let out = star.transfer_bound(&inst, mode, &parse_rat(drop)?)?;
            let mut report = Report::new("transfer");
            report.rational("value", &out.value);
            report.rational("lhs", &out.lhs);
            report.rational("rhs", &out.rhs);
            report.check_flag("size hypothesis", out.hypothesis_size);
            for (nu, ok) in &out.hypothesis_avg {
                report.check_flag(&format!("averaging hypothesis at {nu}"), *ok);
            }
            report.check_le("transfer bound", &out.lhs, &out.rhs);
            report.set_verdict(out.holds);
            Ok(report)
        }

        Command::Profile {
            paper,
            kmax,
            kmax_guard,
            digits,
            toy,
        } => {
            let mut report = Report::new("profile");
            if *paper {
                let p = paper_profile(*kmax, *kmax_guard)?;
                for (k, row) in p.cap.iter().enumerate() {
                    for (i, value) in row.iter().enumerate() {
                        let key = format!("cap_{k}_{i}");
                        if *digits || value.bits() <= 64 {
                            report.value(&key, value);
                        } else {
                            report.value(&format!("{key}_bits"), value.bits());
                        }
                    }
                    let width = &p.width[k];
                    if *digits || width.bits() <= 64 {
                        report.value(&format!("width_{k}"), width);
                    } else {
                        report.value(&format!("width_{k}_bits"), width.bits());
                    }
                    report.value(&format!("budget_{k}"), p.budget[k]);
                }
                for line in &p.increment_certificate {
                    report.check_flag(line, true);
                }
            } else {
                let path = toy
                    .as_ref()
                    .ok_or_else(|| Error::input("profile needs --paper or --toy <file>"))?;
                let doc: json::ProfileDoc = json::read_json(path)?;
                let p = profile_from_doc(&doc)?;
                for k in 0..p.levels() {
                    report.value(&format!("width_{k}"), &p.width[k]);
                    report.value(&format!("budget_{k}"), p.budget[k]);
                    report.value(
                        &format!("rows_{k}_empty_constraint"),
                        p.row_count(k, 0)?,
                    );
                    report.value(
                        &format!("letters_{k}"),
                        num_bigint::BigUint::from(1u8) << p.width[k].to_u64().unwrap_or(0),
                    );
                }
            }
            Ok(report)
        }

        Command::Template {
            input,
            action,
            profile,
        } => {
            let mut report = Report::new("template");
            match action {
                TemplateAction::Validate => {
                    let doc: json::TemplateDoc = json::read_json(input)?;
                    let t = template_from_doc(&doc)?;
                    report.value("coordinates", t.len());
                    report.value("final_tuples", t.y_star().len());
                }
                TemplateAction::Canonical => {
                    let doc: json::TemplateDoc = json::read_json(input)?;
                    let t = template_from_doc(&doc)?;
                    let c = canonical_form(&t);
                    report.certificate(
                        "canonical",
                        serde_json::to_value(json::template_to_doc(&c))
                            .map_err(|e| Error::input(e.to_string()))?,
                    );
                }
                TemplateAction::Restrict { zeta } => {
                    let doc: json::TemplateDoc = json::read_json(input)?;
                    let t = template_from_doc(&doc)?;
                    let r = restrict_template(&t, *zeta)?;
                    report.check_flag(
                        "restriction properly extended by the template",
                        properly_extends(&r, &t),
                    );
                    report.certificate(
                        "restricted",
                        serde_json::to_value(json::template_to_doc(&r))
                            .map_err(|e| Error::input(e.to_string()))?,
                    );
                }
                TemplateAction::Isomorphic { other } => {
                    let a = template_from_doc(&json::read_json(input)?)?;
                    let b = template_from_doc(&json::read_json(other)?)?;
                    let iso = isomorphic(&a, &b);
                    report.check_flag("isomorphic", iso);
                    report.set_verdict(iso);
                }
                TemplateAction::Prefix => {
                    let docs: Vec<json::TemplateDoc> = json::read_json(input)?;
                    let prefix = named_prefix_from_docs(&docs)?;
                    let violations = validate_named_prefix(&prefix);
                    for v in &violations {
                        report.check_flag(&format!("level {}: {}", v.index, v.clause), false);
                    }
                    report.value("violations", violations.len());
                    report.set_verdict(violations.is_empty());
                }
                TemplateAction::Cover => {
                    let doc: json::CandidateDoc = json::read_json(input)?;
                    let s = candidate_from_doc(&doc)?;
                    let star = load_star_family(profile, &opts.guards)?
                        .ok_or_else(|| Error::input("cover needs --profile"))?;
                    let cover = star.cover(&s)?;
                    report.value("nodes", cover.nodes().len());
                    report.certificate(
                        "cover",
                        serde_json::to_value(json::candidate_to_doc(&cover))
                            .map_err(|e| Error::input(e.to_string()))?,
                    );
                }
                TemplateAction::CoveringMap => {
                    let doc: json::CandidateDoc = json::read_json(input)?;
                    let s = candidate_from_doc(&doc)?;
                    let map = covering_map(&s)?;
                    for (node, bits) in &map {
                        if node.len() == s.height() {
                            report.value(&format!("code {node}"), bits_to_string(bits));
                        }
                    }
                }
            }
            Ok(report)
        }

        Command::Oracle {
            candidate,
            valuation,
        } => {
            let cdoc: json::CandidateDoc = json::read_json(candidate)?;
            let s = candidate_from_doc(&cdoc)?;
            let vdoc: json::ValuationDoc = json::read_json(valuation)?;
            let f = valuation_from_doc(&vdoc)?;
            let m = mval(&RandomFamily, &s, &f)?;
            let direct = dyadic_oracle(&s, &f)?;
            let mut report = Report::new("oracle");
            report.rational("recursion", m.root_value());
            report.rational("direct", &direct);
            let equal = report.check_eq("recursion equals the direct sum", m.root_value(), &direct);
            report.set_verdict(equal);
            Ok(report)
        }

        Command::Fuzz { suite, seed, count } => fuzz_suite(suite, *seed, *count, &opts.guards),
    }
}
