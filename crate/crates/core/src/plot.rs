//! Static SVG scatter plots of paired relative errors.
//!
//! One panel per `(experiment, δ)` row and `n` column; x is the simulation
//! index, y the relative error. Outliers are left out. Output bytes depend
//! only on the input rows.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::experiments::{read_instances, InstanceRow};

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 220.0;
const MARGIN_L: f64 = 58.0;
const MARGIN_R: f64 = 14.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 36.0;
const LEGEND_H: f64 = 34.0;
const BASE_COLOR: &str = "#1f77b4";
const REFINED_COLOR: &str = "#d62728";

fn delta_key(d: f64) -> u64 {
    d.to_bits()
}

fn panel(svg: &mut String, x0: f64, y0: f64, title: &str, rows: &[&InstanceRow]) {
    let (pw, ph) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let (left, top) = (x0 + MARGIN_L, y0 + MARGIN_T);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{title}</text>"#,
        left + pw / 2.0,
        y0 + 18.0
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.1}" y="{top:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11">simulation index</text>"#,
        left + pw / 2.0,
        top + ph + 30.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11" transform="rotate(-90 {:.1} {:.1})">relative error</text>"#,
        x0 + 14.0,
        top + ph / 2.0,
        x0 + 14.0,
        top + ph / 2.0
    );
    if rows.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12" fill="gray">no data</text>"#,
            left + pw / 2.0,
            top + ph / 2.0
        );
        return;
    }
    let x_max = rows.iter().map(|r| r.sim_index).max().unwrap_or(0).max(1) as f64;
    let y_max = rows
        .iter()
        .flat_map(|r| [r.err_base, r.err_refined])
        .fold(0.0f64, f64::max);
    let y_max = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
    let sx = |i: usize| left + pw * i as f64 / x_max;
    let sy = |v: f64| top + ph * (1.0 - v / y_max);
    for (v, label) in [(0.0, 0.0), (0.5, y_max / 2.0), (1.0, y_max)] {
        let y = top + ph * (1.0 - v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{left:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="9">{label:.4}</text>"#,
            left - 4.0,
            left - 6.0,
            y + 3.0
        );
    }
    for i in [0, x_max as usize] {
        let x = sx(i);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="9">{i}</text>"#,
            top + ph,
            top + ph + 4.0,
            top + ph + 14.0
        );
    }
    for r in rows {
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="none" stroke="{BASE_COLOR}"/>"#,
            sx(r.sim_index),
            sy(r.err_base)
        );
        let (cx, cy) = (sx(r.sim_index), sy(r.err_refined));
        let _ = writeln!(
            svg,
            r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}" stroke="{REFINED_COLOR}"/>"#,
            cx - 2.5,
            cy - 2.5,
            cx + 2.5,
            cy + 2.5,
            cx - 2.5,
            cy + 2.5,
            cx + 2.5,
            cy - 2.5
        );
    }
}

/// Renders the panel grid for `rows` as an SVG document.
pub fn render_scatter(rows: &[InstanceRow]) -> String {
    let kept: Vec<&InstanceRow> = rows.iter().filter(|r| !r.outlier).collect();
    let groups: BTreeSet<(u8, u64)> = rows.iter().map(|r| (r.experiment, delta_key(r.delta))).collect();
    let dims: BTreeSet<usize> = rows.iter().map(|r| r.n).collect();
    let (n_rows, n_cols) = (groups.len().max(1), dims.len().max(1));
    let width = PANEL_W * n_cols as f64;
    let height = PANEL_H * n_rows as f64 + LEGEND_H;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<circle cx="20" cy="17" r="3.5" fill="none" stroke="{BASE_COLOR}"/><text x="30" y="21" font-size="12">base kernel</text>"#
    );
    let _ = writeln!(
        svg,
        r#"<path d="M136.5 13.5L143.5 20.5M136.5 20.5L143.5 13.5" stroke="{REFINED_COLOR}"/><text x="150" y="21" font-size="12">refined / coarsened kernel</text>"#
    );

    if groups.is_empty() {
        panel(&mut svg, 0.0, LEGEND_H, "no instances", &[]);
    }
    for (gi, &(experiment, dkey)) in groups.iter().enumerate() {
        let delta = f64::from_bits(dkey);
        for (ci, &n) in dims.iter().enumerate() {
            let cell: Vec<&InstanceRow> = kept
                .iter()
                .copied()
                .filter(|r| r.experiment == experiment && delta_key(r.delta) == dkey && r.n == n)
                .collect();
            let title = format!("experiment {experiment}: n = {n}, δ = {delta}");
            panel(
                &mut svg,
                PANEL_W * ci as f64,
                LEGEND_H + PANEL_H * gi as f64,
                &title,
                &cell,
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Reads an `instances.csv` and writes its scatter plot to `out_svg`.
pub fn plot_scatter(instances_csv: &Path, out_svg: &Path) -> Result<()> {
    let rows = read_instances(instances_csv)?;
    std::fs::write(out_svg, render_scatter(&rows))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, i: usize, outlier: bool) -> InstanceRow {
        InstanceRow {
            experiment: 1,
            n,
            delta: 0.1,
            sim_index: i,
            seed: i as u64,
            err_base: 0.02 + 0.001 * i as f64,
            err_refined: 0.01,
            outlier,
        }
    }

    #[test]
    fn empty_input_has_axes_and_annotation() {
        let svg = render_scatter(&[]);
        assert!(svg.contains("no data"));
        assert!(svg.contains("<rect x="));
        assert!(svg.contains("relative error"));
    }

    #[test]
    fn single_instance_draws_two_markers() {
        let svg = render_scatter(&[row(2, 0, false)]);
        assert_eq!(svg.matches("<circle cx=").count(), 2); // legend + marker
        assert_eq!(svg.matches("<path d=").count(), 2);
        assert!(svg.contains(&format!("cx=\"{:.2}\"", MARGIN_L)));
    }

    #[test]
    fn outliers_are_omitted_and_empty_panels_annotated() {
        let rows = vec![row(2, 0, false), row(2, 1, true), row(4, 0, true)];
        let svg = render_scatter(&rows);
        assert_eq!(svg.matches("<circle cx=").count(), 2);
        assert_eq!(svg.matches("no data").count(), 1);
        assert_eq!(render_scatter(&rows), svg);
    }
}
