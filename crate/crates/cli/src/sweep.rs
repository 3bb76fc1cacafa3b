//! Batch runs of command lists over ideal families.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{CommandName, Format, Member, Options, SweepConfig};
use crate::engine::{header, with_engine, Outcome, Status};
use crate::output::{csv_table, json_document};

struct Job<'a> {
    family: usize,
    command: CommandName,
    member: &'a Member,
}

fn run_member(member: &Member, cmd: CommandName, opts: &Options, tol: &BigRational) -> Outcome {
    with_engine(&member.ring, opts, |engine| engine.run(cmd, &member.ideal, None, opts, tol))
        .unwrap_or_else(|msg| Outcome::failed(header(cmd), Status::Usage, msg))
}

/// Runs every (family, command, member) job and writes one file per
/// (family, command). Returns the worst job status.
pub fn run(
    cfg: &SweepConfig,
    config_path: &Path,
    opts: &Options,
    tol: &BigRational,
    format: Format,
) -> Result<Status, String> {
    let names: Vec<String> = cfg.families.iter().map(|f| f.name()).collect();
    if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
        return Err("family names must be distinct".into());
    }
    let members: Vec<Vec<Member>> = cfg.families.iter().map(|f| f.members()).collect();
    let jobs: Vec<Job> = members
        .iter()
        .enumerate()
        .flat_map(|(fi, ms)| {
            cfg.commands
                .iter()
                .flat_map(move |&command| ms.iter().map(move |member| Job { family: fi, command, member }))
        })
        .collect();

    let total = jobs.len();
    let done = AtomicUsize::new(0);
    let outcomes: Vec<Outcome> = jobs
        .par_iter()
        .map(|job| {
            let out = run_member(job.member, job.command, opts, tol);
            let n = done.fetch_add(1, Ordering::Relaxed) + 1;
            eprintln!(
                "[{n}/{total}] {} {} {} {}",
                names[job.family],
                job.command.as_str(),
                job.member.params,
                out.status.label()
            );
            out
        })
        .collect();

    let dir = {
        let p = PathBuf::from(&cfg.output_dir);
        if p.is_absolute() {
            p
        } else {
            config_path.parent().unwrap_or(Path::new(".")).join(p)
        }
    };
    std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;

    let mut worst = Status::Ok;
    let mut cursor = 0;
    for (fi, ms) in members.iter().enumerate() {
        for &cmd in &cfg.commands {
            let slice = &outcomes[cursor..cursor + ms.len()];
            cursor += ms.len();
            for o in slice {
                worst = worst.max(match o.status {
                    Status::Usage => Status::Failed,
                    s => s,
                });
            }
            let text = match format {
                Format::Csv => {
                    let mut head: Vec<&str> = vec!["family", "params", "ideal"];
                    head.extend_from_slice(header(cmd));
                    head.extend_from_slice(&["status", "error"]);
                    let mut rows = Vec::new();
                    for (m, o) in ms.iter().zip(slice) {
                        let prefix = [names[fi].clone(), m.params.clone(), m.ideal.render()];
                        let suffix = [o.status.label().to_string(), o.error.clone().unwrap_or_default()];
                        if o.rows.is_empty() {
                            let blanks = vec![String::new(); header(cmd).len()];
                            rows.push(prefix.iter().cloned().chain(blanks).chain(suffix.iter().cloned()).collect());
                        }
                        for r in &o.rows {
                            rows.push(
                                prefix.iter().cloned().chain(r.iter().cloned()).chain(suffix.iter().cloned()).collect(),
                            );
                        }
                    }
                    csv_table(&head, &rows)
                }
                Format::Json => {
                    let docs: Vec<_> = ms
                        .iter()
                        .zip(slice)
                        .map(|(m, o)| {
                            json!({
                                "family": names[fi],
                                "params": m.params,
                                "ideal": m.ideal,
                                "status": o.status.label(),
                                "error": o.error,
                                "report": o.json,
                            })
                        })
                        .collect();
                    json_document(&json!(docs))
                }
            };
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            let path = dir.join(format!("{}__{}.{ext}", names[fi], cmd.as_str()));
            std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        }
    }
    Ok(worst)
}
