//! CSV writers for positions, bindings, pairs, allocations and traces.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::allocation::{AllocationMatrix, TracePoint};
use crate::association::Binding;
use crate::error::Result;
use crate::experiment::Realization;
use crate::geometry::Scenario;
use crate::pairing::PairSet;
use crate::phy::{sinr_table, SinrRecord};
use crate::power_split::PowerSplit;

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

/// `user_id,x,y,z`
pub fn write_positions<W: Write>(w: W, scenario: &Scenario) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["user_id", "x", "y", "z"])?;
    for (j, u) in scenario.users.iter().enumerate() {
        let p = u.position;
        out.write_record([
            j.to_string(),
            p.x.to_string(),
            p.y.to_string(),
            p.z.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `user_id,led_id`
pub fn write_binding<W: Write>(w: W, binding: &Binding) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["user_id", "led_id"])?;
    for (j, led) in binding.assignment().iter().enumerate() {
        out.write_record([j.to_string(), led.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `led_id,pair_idx,strong_user,weak_user` with `-1` for a lone user.
pub fn write_pairs<W: Write>(w: W, pairs: &PairSet) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["led_id", "pair_idx", "strong_user", "weak_user"])?;
    for id in pairs.ids() {
        let p = pairs.get(id)?;
        out.write_record([
            id.led.to_string(),
            id.index.to_string(),
            p.strong.to_string(),
            p.weak.map_or("-1".to_string(), |w| w.to_string()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `led,subcarrier,pair,a_s,a_w`; idle cells carry pair `-1` and zero powers.
pub fn write_allocation<W: Write>(
    w: W,
    x: &AllocationMatrix,
    splits: &[Vec<PowerSplit>],
) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["led", "subcarrier", "pair", "a_s", "a_w"])?;
    for (led, row) in splits.iter().enumerate().take(x.led_count()) {
        for k in 0..x.subcarrier_count() {
            let (pair, split) = match x.get(led, k) {
                Some(p) => (p as i64, row[p]),
                None => (-1, PowerSplit::IDLE),
            };
            out.write_record([
                led.to_string(),
                k.to_string(),
                pair.to_string(),
                split.a_strong.to_string(),
                split.a_weak.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `iteration,objective,best_objective`
pub fn write_trace<W: Write>(w: W, trace: &[TracePoint]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["iteration", "objective", "best_objective"])?;
    for t in trace {
        out.write_record([
            t.evaluation.to_string(),
            t.current.to_string(),
            t.best.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `led,subcarrier,pair,user,role,sinr`
pub fn write_sinr<W: Write>(w: W, records: &[SinrRecord]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["led", "subcarrier", "pair", "user", "role", "sinr"])?;
    for r in records {
        out.write_record([
            r.led.to_string(),
            r.subcarrier.to_string(),
            r.pair.to_string(),
            r.user.to_string(),
            r.role.to_string(),
            r.sinr.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Write every per-realization artifact into `dir`: `positions.csv`,
/// `binding.csv`, `pairs.csv`, `allocation.csv`, `trace.csv` and `sinr.csv`.
pub fn dump_realization(dir: &Path, r: &Realization) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let file = |name: &str| File::create(dir.join(name)).map(BufWriter::new);
    write_positions(file("positions.csv")?, &r.scenario)?;
    write_binding(file("binding.csv")?, &r.binding)?;
    write_pairs(file("pairs.csv")?, &r.pairs)?;
    write_allocation(file("allocation.csv")?, &r.allocation, &r.report.splits)?;
    write_trace(file("trace.csv")?, &r.trace)?;
    let sinr = sinr_table(
        &r.pairs,
        &r.report.splits,
        &r.allocation,
        &r.channel,
        &r.link,
    )?;
    write_sinr(file("sinr.csv")?, &sinr)?;
    Ok(())
}
