//! Gantt charts of schedules: qubits down, layers across.

use std::collections::HashMap;
use std::fmt::Write;

use crate::model::{Circuit, CircuitId, DeviceTopology, Schedule};

/// Pixels per layer.
pub const LAYER_PX: usize = 6;
/// Pixels per qubit.
pub const QUBIT_PX: usize = 14;
const MARGIN_LEFT: usize = 48;
const MARGIN_TOP: usize = 24;
const MARGIN_RIGHT: usize = 12;
const MARGIN_BOTTOM: usize = 28;

const GLYPHS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Stable colour for a circuit id.
fn colour(id: CircuitId) -> String {
    let mut h = u64::from(id.0).wrapping_add(0x9e37_79b9_7f4a_7c15);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^= h >> 31;
    format!("hsl({},65%,70%)", h % 360)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn gantt_svg(schedule: &Schedule, circuits: &[Circuit], topology: &DeviceTopology) -> String {
    let names: HashMap<CircuitId, &str> = circuits.iter().map(|c| (c.id(), c.name())).collect();
    let qubits = topology.total_qubits();
    let makespan = schedule.total_makespan();
    let plot_w = makespan * LAYER_PX;
    let plot_h = qubits * QUBIT_PX;
    let width = MARGIN_LEFT + plot_w + MARGIN_RIGHT;
    let height = MARGIN_TOP + plot_h + MARGIN_BOTTOM;
    let (x0, y0) = (MARGIN_LEFT, MARGIN_TOP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x0}" y="14" font-family="monospace" font-size="11">{} · {} layers · {} batches</text>"#,
        schedule.algorithm,
        makespan,
        schedule.batches.len()
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{}"/><line x1="{x0}" y1="{}" x2="{}" y2="{}"/></g>"#,
        y0 + plot_h,
        y0 + plot_h,
        x0 + plot_w,
        y0 + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="monospace" font-size="10" text-anchor="end">layer</text>"#,
        x0 + plot_w,
        y0 + plot_h + 20
    );
    svg.push_str("<g class=\"qubit-labels\" font-family=\"monospace\" font-size=\"9\" text-anchor=\"end\">\n");
    for q in 0..qubits {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">q{q}</text>"#,
            x0 - 4,
            y0 + q * QUBIT_PX + QUBIT_PX - 3
        );
    }
    svg.push_str("</g>\n");

    svg.push_str("<g class=\"placements\" font-family=\"monospace\" font-size=\"9\">\n");
    for (offset, batch) in schedule.batches_with_offsets() {
        for p in &batch.placements {
            let x = x0 + (offset + p.layer_start) * LAYER_PX;
            let y = y0 + p.physical_qubit_start(topology) * QUBIT_PX;
            let (w, h) = (p.depth * LAYER_PX, p.width * QUBIT_PX);
            let title = names.get(&p.circuit_id).copied().unwrap_or("");
            let _ = writeln!(
                svg,
                r#"<rect x="{x}" y="{y}" width="{w}" height="{h}" fill="{}" stroke="black" stroke-width="0.5"><title>{} {}</title></rect>"#,
                colour(p.circuit_id),
                p.circuit_id,
                escape(title)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}">{}</text>"#,
                x + 2,
                y + QUBIT_PX - 4,
                p.circuit_id
            );
        }
    }
    svg.push_str("</g>\n");

    svg.push_str("<g class=\"trap-boundaries\" stroke=\"#444\" stroke-dasharray=\"4 2\">\n");
    for trap in 1..topology.trap_count() {
        let y = y0 + topology.trap_offset(trap) * QUBIT_PX;
        let _ = writeln!(
            svg,
            r#"<line x1="{x0}" y1="{y}" x2="{}" y2="{y}"/>"#,
            x0 + plot_w
        );
    }
    svg.push_str("</g>\n");

    svg.push_str("<g class=\"batch-boundaries\" stroke=\"#c00\">\n");
    for (offset, _) in schedule.batches_with_offsets().skip(1) {
        let x = x0 + offset * LAYER_PX;
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{}"/>"#,
            y0 + plot_h
        );
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

/// Glyph drawn for a circuit in the text chart.
pub fn glyph(id: CircuitId) -> char {
    GLYPHS[id.0 as usize % GLYPHS.len()] as char
}

/// Text chart: one row per physical qubit, one column per layer, `.` for
/// idle cells. A rule separates traps.
pub fn gantt_text(schedule: &Schedule, _circuits: &[Circuit], topology: &DeviceTopology) -> String {
    let qubits = topology.total_qubits();
    let makespan = schedule.total_makespan();
    let mut grid = vec![vec!['.'; makespan]; qubits];
    for (offset, batch) in schedule.batches_with_offsets() {
        for p in &batch.placements {
            let g = glyph(p.circuit_id);
            for row in &mut grid[p.physical_qubits(topology)] {
                for cell in &mut row[offset + p.layer_start..offset + p.layer_end()] {
                    *cell = g;
                }
            }
        }
    }

    let mut out = String::new();
    let starts: Vec<String> = schedule
        .batches_with_offsets()
        .map(|(o, _)| o.to_string())
        .collect();
    let _ = writeln!(
        out,
        "# {} makespan={} batches={} batch_starts=[{}]",
        schedule.algorithm,
        makespan,
        schedule.batches.len(),
        starts.join(",")
    );
    for (q, row) in grid.iter().enumerate() {
        if q > 0 && topology.trap_of(q) != topology.trap_of(q - 1) {
            let _ = writeln!(out, "-----+{}", "-".repeat(makespan));
        }
        let _ = writeln!(out, "q{q:<3} |{}", row.iter().collect::<String>());
    }
    out
}
