// SPDX-License-Identifier: Apache-2.0

//! Text formats: CSV tables, JSON records and hex bitmaps.

use std::fmt::Write as _;

use cel_core::bounds::RatePoint;
use cel_core::sim::ErrorEstimate;
use serde_json::{json, Value};

use crate::runner::MatrixOutcome;

/// Fixed 9-decimal rendering used by every float column.
pub fn f9(x: f64) -> String {
    format!("{x:.9}")
}

/// `x` rounded to 9 decimals, for JSON numbers.
pub fn round9(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

pub fn bounds_csv(points: &[RatePoint]) -> String {
    let mut out = String::from("p,bound,rate\n");
    for pt in points {
        let _ = writeln!(out, "{},{},{}", f9(pt.p), pt.bound.name(), f9(pt.rate));
    }
    out
}

pub fn hash_hex(hash: u64) -> String {
    format!("{hash:016x}")
}

pub const REPORT_HEADER: &str = "config_hash,criterion,estimate,lo,hi,trials";

/// One CSV row per experiment; failed experiments carry `error` in the
/// estimate column and empty interval columns.
pub fn report_csv(rows: &[MatrixOutcome]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for row in rows {
        let hash = row.config_hash.map(hash_hex).unwrap_or_default();
        match &row.result {
            Ok(est) => {
                let _ = writeln!(
                    out,
                    "{hash},{},{},{},{},{}",
                    est.criterion.name(),
                    f9(est.point_estimate),
                    f9(est.wilson.0),
                    f9(est.wilson.1),
                    est.trials
                );
            }
            Err(_) => {
                let _ = writeln!(out, "{hash},{},error,,,{}", row.criterion, row.trials);
            }
        }
    }
    out
}

fn estimate_json(est: &ErrorEstimate) -> Value {
    let mut v = json!({
        "criterion": est.criterion.name(),
        "estimate": round9(est.point_estimate),
        "lo": round9(est.wilson.0),
        "hi": round9(est.wilson.1),
        "trials": est.trials,
        "errors": est.errors,
        "type_one_errors": est.type_one_errors,
        "type_two_errors": est.type_two_errors,
    });
    if let Some(stats) = &est.per_message {
        v["per_message"] = stats
            .iter()
            .map(|s| json!({"message": s.message, "trials": s.trials, "errors": s.errors}))
            .collect();
    }
    v
}

pub fn report_json(master_seed: u64, rows: &[MatrixOutcome]) -> Value {
    let results: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut v = match &row.result {
                Ok(est) => estimate_json(est),
                Err(msg) => json!({"criterion": row.criterion, "trials": row.trials, "error": msg}),
            };
            v["config_hash"] = row.config_hash.map(hash_hex).into();
            v["strategy"] = row.strategy.into();
            v["causal"] = row.causal.into();
            v
        })
        .collect();
    json!({
        "schema_version": crate::config::SCHEMA_VERSION,
        "master_seed": master_seed,
        "results": results,
    })
}

/// Bitmap over `0..universe`: byte `j` holds indices `8j..8j+7`, least
/// significant bit first.
pub fn bitmap_hex<I: IntoIterator<Item = u64>>(universe: u64, members: I) -> String {
    let mut bytes = vec![0u8; universe.div_ceil(8) as usize];
    for m in members {
        bytes[(m / 8) as usize] |= 1 << (m % 8);
    }
    hex::encode(bytes)
}

pub fn bitmap_members(text: &str) -> Result<Vec<u64>, hex::FromHexError> {
    let bytes = hex::decode(text)?;
    Ok(bytes
        .iter()
        .enumerate()
        .flat_map(|(j, &b)| (0..8).filter(move |i| b >> i & 1 == 1).map(move |i| (j * 8 + i) as u64))
        .collect())
}
