//! `privnet` — inspect weighted information sources, resources, and
//! protocols described by scenario files.
//!
//! Every subcommand reads a scenario (a bundled example by name, or a TOML
//! path), evaluates one question against it, and prints a deterministic
//! report. Exit codes: `0` when every verdict passes, `1` when a verdict
//! fails (a majorization that does not hold, an inconsistent set, a violated
//! privacy or noninterference check), and `2` for usage or scenario errors.

mod report;
mod scenario;

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use privnet_core::lattice::{
    consistency_classes, find_preference_cycle, fusion, impose_consistency, is_consistent,
};
use privnet_core::majorization::{
    is_majorized, partial_permutation_decomposition, substochastic_witness,
    verify_partial_decomposition, verify_witness,
};
use privnet_core::noninterference::{ni_bruteforce, ni_product, NiVerdict};
use privnet_core::protocol::{local_privacy, run, strong_privacy, PrivacyVerdict, Subject};
use privnet_core::ratio::format_ratio;
use privnet_core::weights::Label;

use report::{element_json, element_text, resource_json, resource_text, Format, Report};
use scenario::{load, CheckSection, ScenarioDocument};

#[derive(Parser)]
#[command(name = "privnet", version, about = "Weighted information-flow toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuse a set of sources after imposing consistency.
    Fuse {
        /// Bundled scenario name or path to a scenario file.
        scenario: Option<String>,
        /// Comma-separated source names; every source when omitted.
        #[arg(long, value_delimiter = ',')]
        set: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide whether the left source is majorized by the right one.
    Majorize {
        /// Name of the dominated candidate.
        left: String,
        /// Name of the dominating candidate.
        right: String,
        /// Bundled scenario name or path to a scenario file.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decompose a majorization into partial permutations of the right side.
    Decompose {
        /// Name of the dominated candidate.
        left: String,
        /// Name of the dominating candidate.
        right: String,
        /// Bundled scenario name or path to a scenario file.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide whether a set of sources admits a common ordering.
    Consistency {
        /// Bundled scenario name or path to a scenario file.
        scenario: Option<String>,
        /// Comma-separated source names; every source when omitted.
        #[arg(long, value_delimiter = ',')]
        set: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the scenario's protocol script and print the trace.
    Run {
        /// Bundled scenario name or path to a scenario file.
        scenario: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the scenario's privacy checks.
    CheckPrivacy {
        /// Bundled scenario name or path to a scenario file.
        scenario: Option<String>,
        /// Evaluate only the named check.
        #[arg(long)]
        check: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the scenario's noninterference checks.
    CheckNi {
        /// Bundled scenario name or path to a scenario file.
        scenario: Option<String>,
        /// Evaluate only the named check.
        #[arg(long)]
        check: Option<String>,
        /// Brute-force length bound, overriding the check and the default
        /// of states² − 1.
        #[arg(long)]
        max_len: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok((format, report)) => {
            // A consumer may close stdout early (`privnet … | head`); that
            // is not worth a panic, so the write error is ignored.
            let _ = writeln!(io::stdout(), "{}", report.render(format));
            if report.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<(Format, Report)> {
    match command {
        Command::Fuse {
            scenario,
            set,
            format,
        } => Ok((format, fuse_report(scenario.as_deref(), &set)?)),
        Command::Majorize {
            left,
            right,
            scenario,
            format,
        } => Ok((format, majorize_report(scenario.as_deref(), &left, &right)?)),
        Command::Decompose {
            left,
            right,
            scenario,
            format,
        } => Ok((
            format,
            decompose_report(scenario.as_deref(), &left, &right)?,
        )),
        Command::Consistency {
            scenario,
            set,
            format,
        } => Ok((format, consistency_report(scenario.as_deref(), &set)?)),
        Command::Run { scenario, format } => Ok((format, run_report(scenario.as_deref())?)),
        Command::CheckPrivacy {
            scenario,
            check,
            format,
        } => Ok((
            format,
            privacy_report(scenario.as_deref(), check.as_deref())?,
        )),
        Command::CheckNi {
            scenario,
            check,
            max_len,
            format,
        } => Ok((
            format,
            ni_report(scenario.as_deref(), check.as_deref(), max_len)?,
        )),
    }
}

fn fuse_report(scenario: Option<&str>, set: &[String]) -> Result<Report> {
    let (name, document) = load(scenario)?;
    let members = document.source_set(set)?;
    if members.is_empty() {
        bail!("the scenario declares no sources");
    }
    let elements: Vec<_> = members.iter().map(|(_, e)| e.clone()).collect();
    let hats = impose_consistency(&elements);
    let fused = fusion(&elements);
    let mut lines = Vec::new();
    let mut hat_entries = Vec::new();
    for ((member, _), hat) in members.iter().zip(&hats) {
        lines.push(format!("{member}^ = {}", element_text(hat)));
        hat_entries.push(json!({ "source": member, "hat": element_json(hat) }));
    }
    lines.push(format!("fusion = {}", element_text(&fused)));
    Ok(Report {
        failed: false,
        lines,
        data: json!({
            "command": "fuse",
            "scenario": name,
            "set": members.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
            "hats": hat_entries,
            "fusion": element_json(&fused),
        }),
    })
}

fn majorize_report(scenario: Option<&str>, left: &str, right: &str) -> Result<Report> {
    let (name, document) = load(scenario)?;
    let beta = document.source(left)?;
    let gamma = document.source(right)?;
    let mut data = json!({
        "command": "majorize",
        "scenario": name,
        "left": left,
        "right": right,
    });
    if !is_majorized(&beta, &gamma) {
        data["majorized"] = json!(false);
        return Ok(Report {
            failed: true,
            lines: vec!["false".to_string()],
            data,
        });
    }
    let witness = substochastic_witness(&beta, &gamma)?;
    let exact = verify_witness(&witness, &beta, &gamma);
    let mut lines = vec![
        "true".to_string(),
        format!("witness ({0}×{0}):", witness.dim()),
    ];
    let mut rows = Vec::new();
    for r in 0..witness.dim() {
        let row: Vec<String> = (0..witness.dim())
            .map(|c| format_ratio(&witness.entry(r, c)))
            .collect();
        lines.push(format!("  [{}]", row.join(", ")));
        rows.push(json!(row));
    }
    lines.push(format!(
        "reconstruction: {}",
        if exact { "exact" } else { "mismatch" }
    ));
    data["majorized"] = json!(true);
    data["witness"] = json!(rows);
    data["reconstruction"] = json!(if exact { "exact" } else { "mismatch" });
    Ok(Report {
        failed: !exact,
        lines,
        data,
    })
}

fn decompose_report(scenario: Option<&str>, left: &str, right: &str) -> Result<Report> {
    let (name, document) = load(scenario)?;
    let beta = document.source(left)?;
    let gamma = document.source(right)?;
    let mut data = json!({
        "command": "decompose",
        "scenario": name,
        "left": left,
        "right": right,
    });
    if !is_majorized(&beta, &gamma) {
        data["majorized"] = json!(false);
        return Ok(Report {
            failed: true,
            lines: vec!["not majorized".to_string()],
            data,
        });
    }
    let terms = partial_permutation_decomposition(&beta, &gamma)?;
    let exact = verify_partial_decomposition(&terms, &beta, &gamma);
    let total = terms
        .iter()
        .fold(privnet_core::ratio::ratio(0, 1), |a, (l, _)| a + l);
    let mut lines = vec![format!("terms: {}", terms.len())];
    let mut term_entries = Vec::new();
    for (lambda, perm) in &terms {
        lines.push(format!("λ = {}, P = {perm}", format_ratio(lambda)));
        let images: Vec<_> = (0..perm.len()).map(|i| json!(perm.image(i))).collect();
        term_entries.push(json!({
            "lambda": format_ratio(lambda),
            "images": images,
        }));
    }
    lines.push(format!("Σλ = {}", format_ratio(&total)));
    lines.push(format!(
        "reconstruction: {}",
        if exact { "exact" } else { "mismatch" }
    ));
    data["majorized"] = json!(true);
    data["terms"] = json!(term_entries);
    data["total"] = json!(format_ratio(&total));
    data["reconstruction"] = json!(if exact { "exact" } else { "mismatch" });
    Ok(Report {
        failed: !exact,
        lines,
        data,
    })
}

fn consistency_report(scenario: Option<&str>, set: &[String]) -> Result<Report> {
    let (name, document) = load(scenario)?;
    let members = document.source_set(set)?;
    if members.is_empty() {
        bail!("the scenario declares no sources");
    }
    let elements: Vec<_> = members.iter().map(|(_, e)| e.clone()).collect();
    let mut data = json!({
        "command": "consistency",
        "scenario": name,
        "set": members.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
    });
    if is_consistent(&elements) {
        let classes = consistency_classes(&elements);
        let order = classes
            .iter()
            .map(|class| {
                let labels: Vec<String> = class.iter().map(Label::to_string).collect();
                format!("{{{}}}", labels.join(","))
            })
            .collect::<Vec<_>>()
            .join("<");
        data["consistent"] = json!(true);
        data["order"] = json!(classes
            .iter()
            .map(|class| class.iter().map(Label::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>());
        Ok(Report {
            failed: false,
            lines: vec![format!("consistent; order {order}")],
            data,
        })
    } else {
        let cycle = find_preference_cycle(&elements)
            .ok_or_else(|| anyhow!("inconsistent set without a cycle"))?;
        let shown = cycle
            .iter()
            .map(Label::to_string)
            .collect::<Vec<_>>()
            .join("◁");
        data["consistent"] = json!(false);
        data["cycle"] = json!(cycle.iter().map(Label::to_string).collect::<Vec<_>>());
        Ok(Report {
            failed: true,
            lines: vec![format!("inconsistent; cycle {shown}")],
            data,
        })
    }
}

fn run_report(scenario: Option<&str>) -> Result<Report> {
    let (name, document) = load(scenario)?;
    let network = document.network()?;
    let script = document.script()?;
    let trace = run(&network, &script)?;
    let mut lines = Vec::new();
    let mut steps = Vec::new();
    for record in trace.steps() {
        lines.push(format!(
            "step {} [{}] {}",
            record.index, record.tag, record.action
        ));
        lines.push(format!("  granted: {}", resource_text(&record.granted)));
        lines.push(format!(
            "  {} accumulated: {}",
            record.recipient,
            resource_text(&record.accumulated)
        ));
        let mut diagnostics = Vec::new();
        for diagnostic in &record.diagnostics {
            let cycle = diagnostic
                .cycle
                .iter()
                .map(Label::to_string)
                .collect::<Vec<_>>()
                .join("◁");
            lines.push(format!(
                "  inconsistent holdings for {} at {}: cycle {cycle}",
                diagnostic.subject, diagnostic.input
            ));
            diagnostics.push(json!({
                "subject": diagnostic.subject.to_string(),
                "input": diagnostic.input.to_string(),
                "cycle": diagnostic
                    .cycle
                    .iter()
                    .map(Label::to_string)
                    .collect::<Vec<_>>(),
            }));
        }
        steps.push(json!({
            "index": record.index,
            "tag": record.tag,
            "action": record.action,
            "recipient": record.recipient.to_string(),
            "granted": resource_json(&record.granted),
            "accumulated": resource_json(&record.accumulated),
            "diagnostics": diagnostics,
        }));
    }
    Ok(Report {
        failed: false,
        lines,
        data: json!({
            "command": "run",
            "scenario": name,
            "steps": steps,
        }),
    })
}

fn privacy_report(scenario: Option<&str>, only: Option<&str>) -> Result<Report> {
    let (name, document) = load(scenario)?;
    let checks = document.checks_of("privacy", only)?;
    if checks.is_empty() {
        bail!("the scenario declares no privacy checks");
    }
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    let mut failed = false;
    for check in checks {
        let (mode, verdict) = privacy_verdict(&document, check)?;
        match verdict {
            PrivacyVerdict::Satisfied => {
                lines.push(format!("check {} ({mode}): satisfied", check.name));
                entries.push(json!({
                    "name": check.name,
                    "mode": mode,
                    "verdict": "satisfied",
                }));
            }
            PrivacyVerdict::Violated {
                input,
                attained,
                permitted,
            } => {
                failed = true;
                lines.push(format!(
                    "check {} ({mode}): violated at {input}",
                    check.name
                ));
                lines.push(format!("  attained: {}", element_text(&attained)));
                lines.push(format!("  permitted: {}", element_text(&permitted)));
                entries.push(json!({
                    "name": check.name,
                    "mode": mode,
                    "verdict": "violated",
                    "input": input.to_string(),
                    "attained": element_json(&attained),
                    "permitted": element_json(&permitted),
                }));
            }
        }
    }
    Ok(Report {
        failed,
        lines,
        data: json!({
            "command": "check-privacy",
            "scenario": name,
            "checks": entries,
        }),
    })
}

/// Resolves one privacy check's resources and evaluates it, returning the
/// effective mode alongside the verdict.
fn privacy_verdict(
    document: &ScenarioDocument,
    check: &CheckSection,
) -> Result<(&'static str, PrivacyVerdict)> {
    let resource = |field: Option<&String>, what: &str| -> Result<_> {
        let reference =
            field.ok_or_else(|| anyhow!("check {} needs a {what} resource", check.name))?;
        document.resource(reference)
    };
    let prior = resource(check.prior.as_ref(), "prior")?;
    let released = resource(check.released.as_ref(), "released")?;
    let mode = match check.mode.as_deref() {
        Some("strong") => "strong",
        Some("local") => "local",
        Some(other) => bail!("check {}: unknown privacy mode {other:?}", check.name),
        None if check.owner.is_some() => "local",
        None => "strong",
    };
    let verdict = match mode {
        "strong" => strong_privacy(&prior, &released),
        _ => {
            let owner = resource(check.owner.as_ref(), "owner")?;
            local_privacy(&prior, &released, &owner)
        }
    };
    Ok((mode, verdict))
}

fn ni_report(scenario: Option<&str>, only: Option<&str>, max_len: Option<usize>) -> Result<Report> {
    let (name, document) = load(scenario)?;
    let checks = document.checks_of("ni", only)?;
    if checks.is_empty() {
        bail!("the scenario declares no noninterference checks");
    }
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    let mut failed = false;
    for check in checks {
        fn field<'a>(name: &str, value: Option<&'a String>, what: &str) -> Result<&'a String> {
            value.ok_or_else(|| anyhow!("check {name} needs a {what}"))
        }
        let machine = document.machine(field(&check.name, check.machine.as_ref(), "machine")?)?;
        let observer =
            Subject::new(field(&check.name, check.observer.as_ref(), "observer")?.clone());
        let secret = Subject::new(field(&check.name, check.secret.as_ref(), "secret")?.clone());
        let bound = max_len
            .or(check.max_len)
            .unwrap_or_else(|| machine.state_count() * machine.state_count() - 1);
        let product = ni_product(&machine, &observer, &secret)?;
        let brute = ni_bruteforce(&machine, &observer, &secret, bound)?;
        if product.is_pass() != brute.is_pass() {
            bail!(
                "check {}: product and bruteforce deciders disagree at L = {bound}",
                check.name
            );
        }
        let verdict = if product.is_pass() { "pass" } else { "fail" };
        lines.push(format!(
            "check {}: {verdict} (product and bruteforce agree, L = {bound})",
            check.name
        ));
        let mut entry = json!({
            "name": check.name,
            "verdict": verdict,
            "bound": bound,
        });
        if let NiVerdict::Fail(witness) = &product {
            failed = true;
            let string = |actions: &[Label]| -> String {
                let joined = actions
                    .iter()
                    .map(Label::to_string)
                    .collect::<Vec<_>>()
                    .join(" ");
                format!("⟨{joined}⟩")
            };
            lines.push(format!(
                "  left: {} observes {}",
                string(&witness.left),
                witness.left_observation
            ));
            lines.push(format!(
                "  right: {} observes {}",
                string(&witness.right),
                witness.right_observation
            ));
            entry["witness"] = json!({
                "left": witness.left.iter().map(Label::to_string).collect::<Vec<_>>(),
                "right": witness.right.iter().map(Label::to_string).collect::<Vec<_>>(),
                "left_observation": witness.left_observation.to_string(),
                "right_observation": witness.right_observation.to_string(),
            });
        }
        entries.push(entry);
    }
    Ok(Report {
        failed,
        lines,
        data: json!({
            "command": "check-ni",
            "scenario": name,
            "checks": entries,
        }),
    })
}
