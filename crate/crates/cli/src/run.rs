use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use scenery_core::caps::Caps;
use scenery_core::condition::{condition_report, null_witness, rank_deficiency_survey};
use scenery_core::error::{Error, Result};
use scenery_core::explore::explore_open_question;
use scenery_core::fourier::{fourier_spectrum, GFunction};
use scenery_core::group::{
    builtin_catalog, group_from_file, parse_group_spec, FiniteGroup,
};
use scenery_core::repr::{irreps_from_file, irreducible_representations, irreps_to_json, IrrepSet};
use scenery_core::rng::SplitMix64;
use scenery_core::scenery::{
    multispectrum, reconstruct_from_multispectrum, shift_equivalent, spatial_autocorrelation,
    tensor_from_json, tensor_to_json, Scenery,
};
use scenery_core::walk::{
    distinguishability_oracle, temporal_autocorrelation_direct, temporal_autocorrelation_spectral,
    temporal_multispectrum_direct, temporal_multispectrum_spectral, StepDistribution,
};

use crate::args::{Cli, Command, Format, GroupAction, GroupArgs};

const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema_version: u32,
    tool: &'static str,
    tool_version: &'static str,
    command: &'static str,
    params: serde_json::Value,
    result: T,
}

fn envelope<T: Serialize>(command: &'static str, params: serde_json::Value, result: T) -> Envelope<T> {
    Envelope {
        schema_version: SCHEMA_VERSION,
        tool: "scenery",
        tool_version: env!("CARGO_PKG_VERSION"),
        command,
        params,
        result,
    }
}

fn resolve_caps(cli: &Cli) -> Caps {
    if let Some(cells) = cli.max_cells {
        return Caps::with_max_cells(cells);
    }
    if let Ok(value) = std::env::var("SCENERY_MAX_CELLS") {
        if let Ok(cells) = value.parse::<u64>() {
            return Caps::with_max_cells(cells);
        }
    }
    Caps::default()
}

fn looks_like_path(spec: &str) -> bool {
    spec.contains('/') || spec.contains('\\') || spec.ends_with(".json") || Path::new(spec).is_file()
}

fn resolve_group(args: &GroupArgs) -> Result<Arc<FiniteGroup>> {
    if looks_like_path(&args.group) {
        group_from_file(&args.group)
    } else {
        parse_group_spec(&args.group)
    }
}

fn resolve_irreps(args: &GroupArgs, group: &Arc<FiniteGroup>) -> Result<IrrepSet> {
    match &args.reps {
        Some(path) => irreps_from_file(group, path),
        None => irreducible_representations(group),
    }
}

/// uniform | point:<idx> | random:<seed> | inline JSON array | file path.
fn parse_gamma(spec: &str, group: &Arc<FiniteGroup>) -> Result<(StepDistribution, String)> {
    let trimmed = spec.trim();
    if trimmed == "uniform" {
        return Ok((StepDistribution::uniform(Arc::clone(group)), "uniform".into()));
    }
    if let Some(rest) = trimmed.strip_prefix("point:") {
        let idx: usize = rest
            .parse()
            .map_err(|_| Error::InvalidDistribution(format!("bad point-mass index {rest:?}")))?;
        return Ok((
            StepDistribution::point_mass(Arc::clone(group), idx)?,
            trimmed.to_string(),
        ));
    }
    if let Some(rest) = trimmed.strip_prefix("random:") {
        let seed: u64 = rest
            .parse()
            .map_err(|_| Error::InvalidDistribution(format!("bad random seed {rest:?}")))?;
        let mut rng = SplitMix64::new(seed);
        return Ok((
            StepDistribution::random(Arc::clone(group), &mut rng),
            trimmed.to_string(),
        ));
    }
    let data = if trimmed.starts_with('[') {
        trimmed.to_string()
    } else {
        std::fs::read_to_string(trimmed)?
    };
    let probs: Vec<f64> = serde_json::from_str(&data)?;
    Ok((
        StepDistribution::new(Arc::clone(group), probs)?,
        trimmed.to_string(),
    ))
}

fn parse_scenery(bits: &str, group: &Arc<FiniteGroup>) -> Result<Scenery> {
    Scenery::from_bitstring(Arc::clone(group), bits)
}

/// A function literal: a scenery bitstring, an inline JSON array (numbers or
/// [re, im] pairs), or a path to such an array.
fn parse_values(spec: &str, group: &Arc<FiniteGroup>) -> Result<GFunction> {
    let trimmed = spec.trim();
    if !trimmed.is_empty() && trimmed.chars().all(|c| c == '0' || c == '1') {
        return Ok(parse_scenery(trimmed, group)?.to_gfunction());
    }
    let data = if trimmed.starts_with('[') {
        trimmed.to_string()
    } else {
        std::fs::read_to_string(trimmed)?
    };
    let raw: Vec<serde_json::Value> = serde_json::from_str(&data)?;
    let mut pairs = Vec::with_capacity(raw.len());
    for item in raw {
        let pair = match &item {
            serde_json::Value::Number(x) => [
                x.as_f64()
                    .ok_or_else(|| Error::Validation("non-numeric function value".into()))?,
                0.0,
            ],
            serde_json::Value::Array(p) if p.len() == 2 => {
                let re = p[0].as_f64();
                let im = p[1].as_f64();
                match (re, im) {
                    (Some(re), Some(im)) => [re, im],
                    _ => return Err(Error::Validation("non-numeric function value".into())),
                }
            }
            _ => {
                return Err(Error::Validation(
                    "function values must be numbers or [re, im] pairs".into(),
                ))
            }
        };
        pairs.push(pair);
    }
    GFunction::from_pairs(Arc::clone(group), &pairs)
}

fn write_output(cli: &Cli, text: String) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(cli: &Cli, payload: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(payload)?;
    text.push('\n');
    write_output(cli, text)
}

fn reject_csv(cli: &Cli, command: &str) -> Result<()> {
    if cli.format == Format::Csv {
        return Err(Error::Validation(format!(
            "--format csv is not available for {command}; tabular output exists for condition, theorem2, and explore"
        )));
    }
    Ok(())
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let caps = resolve_caps(&cli);
    match &cli.command {
        Command::Group { action } => run_group(&cli, action),
        Command::Irreps { group } => {
            reject_csv(&cli, "irreps")?;
            let g = resolve_group(group)?;
            let set = resolve_irreps(group, &g)?;
            emit_json(&cli, &irreps_to_json(&set))
        }
        Command::Ft { group, values } => {
            reject_csv(&cli, "ft")?;
            let g = resolve_group(group)?;
            let set = resolve_irreps(group, &g)?;
            let u = parse_values(values, &g)?;
            let spectrum = fourier_spectrum(&u, &set)?;
            #[derive(Serialize)]
            struct Coefficient {
                irrep_index: usize,
                degree: usize,
                matrix: Vec<Vec<[f64; 2]>>,
            }
            let coefficients: Vec<Coefficient> = spectrum
                .iter()
                .map(|c| Coefficient {
                    irrep_index: c.irrep_index,
                    degree: c.degree,
                    matrix: (0..c.matrix.rows())
                        .map(|i| {
                            (0..c.matrix.cols())
                                .map(|j| [c.matrix.get(i, j).re, c.matrix.get(i, j).im])
                                .collect()
                        })
                        .collect(),
                })
                .collect();
            let params = json!({"group": g.name(), "values": values});
            emit_json(&cli, &envelope("ft", params, json!({ "coefficients": coefficients })))
        }
        Command::Autocorr { group, scenery } => {
            reject_csv(&cli, "autocorr")?;
            let g = resolve_group(group)?;
            let f = parse_scenery(scenery, &g)?;
            let a = spatial_autocorrelation(&f);
            let values: Vec<i64> = a.values().iter().map(|v| v.re.round() as i64).collect();
            let params = json!({"group": g.name(), "scenery": scenery});
            emit_json(&cli, &envelope("autocorr", params, json!({ "values": values })))
        }
        Command::Multispectrum { group, scenery, n } => {
            reject_csv(&cli, "multispectrum")?;
            let g = resolve_group(group)?;
            let f = parse_scenery(scenery, &g)?;
            let tensor = multispectrum(&f, *n, &caps)?;
            emit_json(&cli, &tensor_to_json(&tensor))
        }
        Command::Bstats {
            group,
            scenery,
            gamma,
            lags,
        } => {
            reject_csv(&cli, "bstats")?;
            let g = resolve_group(group)?;
            let set = resolve_irreps(group, &g)?;
            let f = parse_scenery(scenery, &g)?;
            let (step, gamma_label) = parse_gamma(gamma, &g)?;
            let (direct, spectral) = if lags.len() == 1 {
                (
                    temporal_autocorrelation_direct(&f, &step, lags[0])?,
                    temporal_autocorrelation_spectral(&f, &step, lags[0], &set)?,
                )
            } else {
                (
                    temporal_multispectrum_direct(&f, &step, lags, &caps)?,
                    temporal_multispectrum_spectral(&f, &step, lags, &set, &caps)?,
                )
            };
            let params = json!({
                "group": g.name(), "scenery": scenery, "gamma": gamma_label, "lags": lags,
            });
            let result = json!({
                "lags": lags,
                "direct": direct,
                "spectral": spectral,
                "difference": (direct - spectral).abs(),
            });
            emit_json(&cli, &envelope("bstats", params, result))
        }
        Command::Condition {
            group,
            gamma,
            n,
            lmax,
            tol,
        } => {
            let g = resolve_group(group)?;
            let set = resolve_irreps(group, &g)?;
            let (step, gamma_label) = parse_gamma(gamma, &g)?;
            let report = condition_report(&set, &step, *n, *lmax, *tol, &caps)?;
            let params = json!({
                "group": g.name(), "gamma": gamma_label, "n": n,
                "lmax": report.lag_bound, "tol": tol,
            });
            match cli.format {
                Format::Json => emit_json(&cli, &envelope("condition", params, &report)),
                Format::Csv => {
                    let mut text = String::from(
                        "group,order,lag_bound,column_count,rank,nullity,theoretical_rank_bound,verdict,witness_residual\n",
                    );
                    let verdict = match report.verdict {
                        scenery_core::condition::ConditionVerdict::ConditionHolds => "condition_holds",
                        scenery_core::condition::ConditionVerdict::ConditionFails => "condition_fails",
                    };
                    text.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{}\n",
                        csv_escape(&report.group),
                        report.order,
                        report.lag_bound,
                        report.column_count,
                        report.rank,
                        report.nullity,
                        report.theoretical_rank_bound,
                        verdict,
                        report
                            .witness_residual
                            .map(|r| format!("{r:e}"))
                            .unwrap_or_default(),
                    ));
                    write_output(&cli, text)
                }
            }
        }
        Command::Witness { group, gamma, n, tol } => {
            reject_csv(&cli, "witness")?;
            let g = resolve_group(group)?;
            let set = resolve_irreps(group, &g)?;
            let (step, gamma_label) = parse_gamma(gamma, &g)?;
            let found = null_witness(&set, &step, *n, *tol, &caps)?;
            let params = json!({"group": g.name(), "gamma": gamma_label, "n": n, "tol": tol});
            let result = match found {
                Some((tensor, residual)) => json!({
                    "found": true,
                    "residual": residual,
                    "tensor": tensor_to_json(&tensor),
                }),
                None => json!({"found": false, "residual": null, "tensor": null}),
            };
            emit_json(&cli, &envelope("witness", params, result))
        }
        Command::Theorem2 {
            group,
            trials,
            seed,
            tol,
        } => {
            let g = resolve_group(group)?;
            let set = resolve_irreps(group, &g)?;
            let survey = rank_deficiency_survey(&set, *trials, *seed, *tol, &caps)?;
            let params = json!({"group": g.name(), "trials": trials, "seed": seed, "tol": tol});
            match cli.format {
                Format::Json => emit_json(&cli, &envelope("theorem2", params, &survey)),
                Format::Csv => {
                    let mut text =
                        String::from("group,gamma_label,rank,nullity,theoretical_rank_bound,witness_residual\n");
                    for trial in &survey.trials {
                        text.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            csv_escape(&survey.group),
                            csv_escape(&trial.gamma_label),
                            trial.rank,
                            trial.nullity,
                            survey.theoretical_rank_bound,
                            trial
                                .witness_residual
                                .map(|r| format!("{r:e}"))
                                .unwrap_or_default(),
                        ));
                    }
                    write_output(&cli, text)
                }
            }
        }
        Command::Distinguish {
            group,
            f1,
            f2,
            gamma,
            horizon,
            order_bound,
            lag_bound,
        } => {
            reject_csv(&cli, "distinguish")?;
            let g = resolve_group(group)?;
            let s1 = parse_scenery(f1, &g)?;
            let s2 = parse_scenery(f2, &g)?;
            let (step, gamma_label) = parse_gamma(gamma, &g)?;
            let report =
                distinguishability_oracle(&s1, &s2, &step, *horizon, *order_bound, *lag_bound, &caps)?;
            let shift = shift_equivalent(&s1, &s2)?;
            let params = json!({
                "group": g.name(), "f1": f1, "f2": f2, "gamma": gamma_label,
                "horizon": horizon, "order_bound": order_bound, "lag_bound": report.lag_bound,
            });
            let result = json!({
                "report": report,
                "shift_witness": shift.map(|w| w.index()),
            });
            emit_json(&cli, &envelope("distinguish", params, result))
        }
        Command::Reconstruct {
            group,
            from_scenery,
            from_tensor,
        } => {
            reject_csv(&cli, "reconstruct")?;
            let g = resolve_group(group)?;
            let (tensor, input) = match (from_scenery, from_tensor) {
                (Some(bits), None) => {
                    let f = parse_scenery(bits, &g)?;
                    (multispectrum(&f, g.order(), &caps)?, Some(f))
                }
                (None, Some(path)) => {
                    let data = std::fs::read_to_string(path)?;
                    (tensor_from_json(&g, &data)?, None)
                }
                _ => {
                    return Err(Error::Validation(
                        "provide exactly one of --from-scenery or --from-tensor".into(),
                    ))
                }
            };
            let rebuilt = reconstruct_from_multispectrum(&tensor, &caps)?;
            let witness = input
                .as_ref()
                .map(|f| shift_equivalent(&rebuilt, f))
                .transpose()?
                .flatten();
            let params = json!({
                "group": g.name(),
                "from_scenery": from_scenery,
                "from_tensor": from_tensor.as_ref().map(|p| p.display().to_string()),
            });
            let result = json!({
                "order": tensor.order(),
                "reconstructed": rebuilt.to_bitstring(),
                "input_scenery": input.map(|f| f.to_bitstring()),
                "shift_witness": witness.map(|w| w.index()),
            });
            emit_json(&cli, &envelope("reconstruct", params, result))
        }
        Command::Explore {
            group,
            gamma,
            order_bound,
            horizon,
            timings,
        } => {
            let g = resolve_group(group)?;
            let set = resolve_irreps(group, &g)?;
            let (step, gamma_label) = parse_gamma(gamma, &g)?;
            let started = Instant::now();
            let mut report =
                explore_open_question(&set, &step, &gamma_label, *order_bound, *horizon, &caps)?;
            let elapsed = started.elapsed().as_millis() as u64;
            eprintln!("explore finished in {elapsed} ms");
            if *timings {
                report.elapsed_ms = Some(elapsed);
            }
            let params = json!({
                "group": g.name(), "gamma": gamma_label,
                "order_bound": order_bound, "horizon": horizon,
            });
            match cli.format {
                Format::Json => emit_json(&cli, &envelope("explore", params, &report)),
                Format::Csv => {
                    let mut text = String::from(
                        "scenery_a,scenery_b,shift_equivalent,support_a,support_b,flagged_indistinguishable,flagged_null_delta,distinguished_horizon\n",
                    );
                    for c in &report.candidates {
                        text.push_str(&format!(
                            "{},{},{},{},{},{},{},{}\n",
                            c.scenery_a,
                            c.scenery_b,
                            c.shift_equivalent,
                            c.support_sizes.0,
                            c.support_sizes.1,
                            c.flagged_indistinguishable,
                            c.flagged_null_delta,
                            c.verdict
                                .distinguished_horizon()
                                .map(|t| t.to_string())
                                .unwrap_or_default(),
                        ));
                    }
                    write_output(&cli, text)
                }
            }
        }
    }
}

fn run_group(cli: &Cli, action: &GroupAction) -> Result<()> {
    match action {
        GroupAction::List => {
            reject_csv(cli, "group list")?;
            #[derive(Serialize)]
            struct Entry {
                name: String,
                order: usize,
                abelian: bool,
            }
            let entries: Vec<Entry> = builtin_catalog()
                .into_iter()
                .map(|g| Entry {
                    name: g.name().to_string(),
                    order: g.order(),
                    abelian: g.is_abelian(),
                })
                .collect();
            emit_json(cli, &envelope("group list", json!({}), json!({ "groups": entries })))
        }
        GroupAction::Verify { group } => {
            reject_csv(cli, "group verify")?;
            let g = resolve_group(group)?;
            let report = g.verify_axioms();
            let params = json!({"group": group.group});
            let result = json!({
                "name": g.name(),
                "order": g.order(),
                "abelian": g.is_abelian(),
                "valid": report.is_valid(),
                "violations": report.violations,
            });
            emit_json(cli, &envelope("group verify", params, result))
        }
    }
}
