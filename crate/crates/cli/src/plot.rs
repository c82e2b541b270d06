//! Line charts of experiment reports as standalone SVG.

use std::fmt::Write as _;

use taskalloc::experiments::{ExperimentReport, ReportRow, Solver};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    /// Mean defender utility against the number of workers.
    Utility,
    /// Mean number of workers given tasks against the number of workers.
    Workers,
    /// Mean improvement ratio against the number of workers.
    RatioVsWorkers,
    /// Mean improvement ratio, averaged over worker counts, against the
    /// number of tasks.
    RatioVsTasks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Identifies a series. Components that are equal across every series are
/// dropped from the label.
#[derive(Debug, Clone, PartialEq)]
struct Key {
    proficiency: String,
    utility: String,
    tasks: Option<usize>,
    solver: Option<Solver>,
}

impl Key {
    fn of(row: &ReportRow, tasks: bool, solver: Option<Solver>) -> Self {
        Key {
            proficiency: row.proficiency_dist.clone(),
            utility: row.utility_dist.clone(),
            tasks: tasks.then_some(row.tasks),
            solver,
        }
    }
}

fn labels(keys: &[Key]) -> Vec<String> {
    let parts: [fn(&Key) -> String; 4] = [
        |k| k.proficiency.clone(),
        |k| k.utility.clone(),
        |k| k.tasks.map(|m| format!("m={m}")).unwrap_or_default(),
        |k| k.solver.map(|s| s.name().to_string()).unwrap_or_default(),
    ];
    let shown: Vec<fn(&Key) -> String> = parts
        .into_iter()
        .filter(|f| keys.iter().any(|k| f(k) != f(&keys[0])))
        .collect();
    keys.iter()
        .map(|k| {
            if shown.is_empty() {
                k.proficiency.clone()
            } else {
                shown.iter().map(|f| f(k)).collect::<Vec<_>>().join(", ")
            }
        })
        .collect()
}

/// Groups report rows into series for `kind`, in order of first
/// appearance, with points sorted by x.
pub fn series(
    report: &ExperimentReport,
    kind: PlotKind,
    solver: Option<Solver>,
) -> CliResult<Vec<Series>> {
    if report.is_empty() {
        return Err(CliError::Validation("report has no rows to plot".into()));
    }
    let mut keys: Vec<Key> = Vec::new();
    // per series: (x, sum of y, count)
    let mut data: Vec<Vec<(f64, f64, usize)>> = Vec::new();
    let mut add = |key: Key, x: f64, y: f64| {
        let s = match keys.iter().position(|k| *k == key) {
            Some(s) => s,
            None => {
                keys.push(key);
                data.push(Vec::new());
                keys.len() - 1
            }
        };
        match data[s].iter_mut().find(|p| p.0 == x) {
            Some(p) => {
                p.1 += y;
                p.2 += 1;
            }
            None => data[s].push((x, y, 1)),
        }
    };

    for row in &report.rows {
        let x_workers = row.workers as f64;
        match kind {
            PlotKind::Utility | PlotKind::Workers => {
                for s in Solver::ALL {
                    if solver.is_some_and(|want| want != s) {
                        continue;
                    }
                    if let Some(stats) = row.solver(s) {
                        let y = if kind == PlotKind::Utility {
                            stats.mean_utility
                        } else {
                            stats.mean_workers
                        };
                        add(Key::of(row, true, Some(s)), x_workers, y);
                    }
                }
            }
            PlotKind::RatioVsWorkers => {
                if let Some(r) = row.ratio {
                    add(Key::of(row, true, None), x_workers, r.mean);
                }
            }
            PlotKind::RatioVsTasks => {
                if let Some(r) = row.ratio {
                    add(Key::of(row, false, None), row.tasks as f64, r.mean);
                }
            }
        }
    }
    if keys.is_empty() {
        return Err(CliError::Validation(format!(
            "report has no data for a {} plot",
            kind_name(kind)
        )));
    }
    Ok(labels(&keys)
        .into_iter()
        .zip(data)
        .map(|(label, pts)| {
            let mut points: Vec<(f64, f64)> =
                pts.into_iter().map(|(x, y, c)| (x, y / c as f64)).collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series { label, points }
        })
        .collect())
}

fn kind_name(kind: PlotKind) -> &'static str {
    match kind {
        PlotKind::Utility => "utility",
        PlotKind::Workers => "workers",
        PlotKind::RatioVsWorkers => "ratio-vs-workers",
        PlotKind::RatioVsTasks => "ratio-vs-tasks",
    }
}

fn axis_titles(kind: PlotKind) -> (&'static str, &'static str) {
    match kind {
        PlotKind::Utility => ("workers (n)", "mean defender utility"),
        PlotKind::Workers => ("workers (n)", "mean workers assigned"),
        PlotKind::RatioVsWorkers => ("workers (n)", "mean improvement ratio"),
        PlotKind::RatioVsTasks => ("tasks (m)", "mean improvement ratio over n"),
    }
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Round step of roughly `span / 5`.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let step = tick_step(hi - lo);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

fn range(values: impl Iterator<Item = f64>, include_zero: bool) -> (f64, f64) {
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if include_zero {
        lo = lo.min(0.0);
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    } else if include_zero {
        hi += 0.05 * (hi - lo);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(series: &[Series], kind: PlotKind) -> String {
    let (x_title, y_title) = axis_titles(kind);
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x_lo, x_hi) = range(all().map(|p| p.0), false);
    let (y_lo, y_hi) = range(all().map(|p| p.1), true);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;
    let bottom = TOP + plot_h;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(
        s,
        "<title>{}</title>",
        escape(&format!("{y_title} vs {x_title}"))
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();

    writeln!(s, r#"<g class="axes" stroke="black">"#).unwrap();
    writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{bottom}" x2="{:.2}" y2="{bottom}"/>"#,
        LEFT + plot_w
    )
    .unwrap();
    writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bottom}"/>"#
    )
    .unwrap();
    writeln!(s, "</g>").unwrap();

    let (xt, xd) = ticks(x_lo, x_hi);
    let (yt, yd) = ticks(y_lo, y_hi);
    writeln!(s, r#"<g class="ticks">"#).unwrap();
    for x in xt {
        let px = sx(x);
        writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{x:.xd$}</text>"#,
            bottom + 20.0
        )
        .unwrap();
    }
    for y in yt {
        let py = sy(y);
        writeln!(
            s,
            r#"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="lightgray"/>"#,
            LEFT + plot_w
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.yd$}</text>"#,
            LEFT - 8.0,
            py + 4.0
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(
        s,
        r#"<text class="x-title" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(x_title)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text class="y-title" x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_title)
    )
    .unwrap();

    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let label = escape(&ser.label);
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(s, r#"<g class="series" data-label="{label}">"#).unwrap();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        )
        .unwrap();
        for &(x, y) in &ser.points {
            writeln!(
                s,
                r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(x),
                sy(y)
            )
            .unwrap();
        }
        writeln!(s, "</g>").unwrap();
    }

    writeln!(s, r#"<g class="legend">"#).unwrap();
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = WIDTH - RIGHT + 20.0;
        writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
            x + 24.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            x + 30.0,
            y + 4.0,
            escape(&ser.label)
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    s.push_str("</svg>\n");
    s
}
