//! CSV and SVG emission. The SVG renders exactly the CSV rows; nothing is
//! recomputed.

use std::io::Write;
use std::path::Path;

use bandit_net::{compare_empirical_to_bound, AggregateMetrics, BoundMode, BoundParams, Scenario};

pub const CSV_SCHEMA: &str = "# bandit-net csv v1";
pub const CSV_HEADER: &str = "t,agent,strategy,degree,mean_sampling_regret,se_sampling_regret,\
mean_observation_regret,se_observation_regret,mean_total_regret,bound_sampling,\
bound_observation,bound_total";

/// One CSV row: one agent at one logged timestep.
#[derive(Debug, Clone)]
pub struct Row {
    pub t: usize,
    /// 1-based agent id, as in all external I/O.
    pub agent: usize,
    pub strategy: String,
    pub degree: usize,
    pub mean_sampling: f64,
    pub se_sampling: f64,
    pub mean_observation: f64,
    pub se_observation: f64,
    pub mean_total: f64,
    pub bound_sampling: f64,
    pub bound_observation: f64,
    pub bound_total: f64,
}

/// Assemble the emitted table from aggregated metrics and bound evaluators.
pub fn build_rows(
    scenario: &Scenario<f64>,
    metrics: &AggregateMetrics<f64>,
    params: &[BoundParams<f64>],
    mode: BoundMode,
    ts: &[usize],
) -> Result<Vec<Row>, String> {
    let comparisons = compare_empirical_to_bound(metrics, params, scenario.strategies(), mode, ts)
        .map_err(|e| e.to_string())?;
    Ok(comparisons
        .iter()
        .map(|c| Row {
            t: c.t,
            agent: c.agent + 1,
            strategy: scenario.strategies()[c.agent].label(),
            degree: params[c.agent].degree(),
            mean_sampling: c.empirical_sampling,
            se_sampling: metrics.se_sampling[c.agent][c.t - 1],
            mean_observation: c.empirical_observation,
            se_observation: metrics.se_observation[c.agent][c.t - 1],
            mean_total: c.empirical_total,
            bound_sampling: c.bound_sampling,
            bound_observation: c.bound_observation,
            bound_total: c.bound_total,
        })
        .collect())
}

fn push_row(out: &mut String, row: &Row) {
    use std::fmt::Write as _;
    writeln!(
        out,
        "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        row.t,
        row.agent,
        row.strategy,
        row.degree,
        row.mean_sampling,
        row.se_sampling,
        row.mean_observation,
        row.se_observation,
        row.mean_total,
        row.bound_sampling,
        row.bound_observation,
        row.bound_total
    )
    .expect("string write cannot fail");
}

pub fn csv_text(rows: &[Row]) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA);
    out.push('\n');
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        push_row(&mut out, row);
    }
    out
}

pub fn write_csv(path: &Path, rows: &[Row]) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(csv_text(rows).as_bytes())?;
    file.flush()
}

// ---------------------------------------------------------------------------
// Minimal static SVG chart
// ---------------------------------------------------------------------------

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

struct Panel<'a> {
    title: &'a str,
    value_of: fn(&Row) -> f64,
}

/// Two stacked panels (sampling and observation regret), one polyline per
/// agent, straight from the CSV rows.
pub fn svg_text(rows: &[Row]) -> String {
    let width = 880.0;
    let panel_height = 300.0;
    let margin_left = 70.0;
    let margin_right = 150.0;
    let margin_top = 40.0;
    let gap = 60.0;
    let height = margin_top + 2.0 * panel_height + gap + 40.0;

    let mut agents: Vec<usize> = rows.iter().map(|r| r.agent).collect();
    agents.sort_unstable();
    agents.dedup();
    let t_max = rows.iter().map(|r| r.t).max().unwrap_or(1) as f64;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let panels = [
        Panel {
            title: "mean cumulative sampling regret",
            value_of: |r| r.mean_sampling,
        },
        Panel {
            title: "mean cumulative observation regret",
            value_of: |r| r.mean_observation,
        },
    ];

    for (index, panel) in panels.iter().enumerate() {
        let top = margin_top + index as f64 * (panel_height + gap);
        let bottom = top + panel_height;
        let plot_width = width - margin_left - margin_right;
        let y_max = rows
            .iter()
            .map(|r| (panel.value_of)(r))
            .fold(1e-9_f64, f64::max);

        svg.push_str(&format!(
            "<text x=\"{margin_left}\" y=\"{}\" font-size=\"14\">{}</text>\n",
            top - 12.0,
            panel.title
        ));
        // Axes.
        svg.push_str(&format!(
            "<line x1=\"{margin_left}\" y1=\"{top}\" x2=\"{margin_left}\" y2=\"{bottom}\" \
             stroke=\"black\"/>\n"
        ));
        svg.push_str(&format!(
            "<line x1=\"{margin_left}\" y1=\"{bottom}\" x2=\"{}\" y2=\"{bottom}\" \
             stroke=\"black\"/>\n",
            margin_left + plot_width
        ));
        // Tick labels.
        for frac in [0.0, 0.5, 1.0] {
            let x = margin_left + frac * plot_width;
            let t_label = (frac * t_max).round();
            svg.push_str(&format!(
                "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{t_label}</text>\n",
                bottom + 16.0
            ));
            let y = bottom - frac * panel_height;
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.1}</text>\n",
                margin_left - 6.0,
                y + 4.0,
                frac * y_max
            ));
        }
        // One polyline per agent.
        for (agent_index, &agent) in agents.iter().enumerate() {
            let color = PALETTE[agent_index % PALETTE.len()];
            let mut points = String::new();
            for row in rows.iter().filter(|r| r.agent == agent) {
                let x = margin_left + row.t as f64 / t_max * plot_width;
                let y = bottom - (panel.value_of)(row) / y_max * panel_height;
                points.push_str(&format!("{x:.2},{y:.2} "));
            }
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
                 points=\"{}\"/>\n",
                points.trim_end()
            ));
        }
        // Legend.
        for (agent_index, &agent) in agents.iter().enumerate() {
            let color = PALETTE[agent_index % PALETTE.len()];
            let degree = rows
                .iter()
                .find(|r| r.agent == agent)
                .map(|r| r.degree)
                .unwrap_or(0);
            let y = top + 14.0 * agent_index as f64 + 10.0;
            let x = margin_left + plot_width + 10.0;
            svg.push_str(&format!(
                "<line x1=\"{x}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{color}\" \
                 stroke-width=\"3\"/>\n",
                x + 18.0
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">agent {agent} (d={degree})</text>\n",
                x + 24.0,
                y + 4.0
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(path: &Path, rows: &[Row]) -> std::io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(svg_text(rows).as_bytes())?;
    file.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row(t: usize, agent: usize) -> Row {
        Row {
            t,
            agent,
            strategy: "always".into(),
            degree: 2,
            mean_sampling: 1.5 * t as f64,
            se_sampling: 0.1,
            mean_observation: 2.0 * t as f64,
            se_observation: 0.0,
            mean_total: 3.5 * t as f64,
            bound_sampling: 100.0,
            bound_observation: 2.0 * t as f64,
            bound_total: 120.0,
        }
    }

    #[test]
    fn csv_has_schema_header_and_fixed_columns() {
        let rows = vec![sample_row(10, 1), sample_row(10, 2)];
        let text = csv_text(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_SCHEMA));
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 12);
        assert!(first.starts_with("10,1,always,2,15.000000,"));
    }

    #[test]
    fn svg_contains_one_polyline_per_agent_per_panel() {
        let rows: Vec<Row> = (1..=5)
            .flat_map(|t| [sample_row(t * 10, 1), sample_row(t * 10, 2)])
            .collect();
        let svg = svg_text(&rows);
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.contains("agent 1 (d=2)"));
    }
}
