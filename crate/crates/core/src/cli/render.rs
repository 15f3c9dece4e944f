//! Bar plots as text or SVG.
//!
//! Axes never adapt to the data: CI bars live on `[0, 1]`, influence bars
//! on `[rmin, rmax]`, attribution bars on `±` the output range width. A
//! set of all-zero attributions therefore renders as empty bars instead
//! of being stretched to fill the plot.

use std::fmt::Write as _;

use crate::cli::output::{Method, Record};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Svg,
}

/// Position of a CU value on the utility scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtilityBand {
    Unfavorable,
    Neutral,
    Favorable,
    Undefined,
}

impl UtilityBand {
    pub fn of(cu: Option<f64>) -> Self {
        match cu {
            None => UtilityBand::Undefined,
            Some(u) if u < 1.0 / 3.0 => UtilityBand::Unfavorable,
            Some(u) if u <= 2.0 / 3.0 => UtilityBand::Neutral,
            Some(_) => UtilityBand::Favorable,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            UtilityBand::Unfavorable => "unfavorable",
            UtilityBand::Neutral => "neutral",
            UtilityBand::Favorable => "favorable",
            UtilityBand::Undefined => "undefined",
        }
    }

    fn color(self) -> &'static str {
        match self {
            UtilityBand::Unfavorable => "#d7301f",
            UtilityBand::Neutral => "#fdae61",
            UtilityBand::Favorable => "#1a9850",
            UtilityBand::Undefined => "url(#hatch)",
        }
    }
}

/// One drawable bar.
#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub label: String,
    pub value: Option<f64>,
    pub band: Option<UtilityBand>,
    pub annotation: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarChart {
    pub title: String,
    /// Fixed axis limits.
    pub axis: (f64, f64),
    pub bars: Vec<Bar>,
    pub footnote: String,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |v| format!("{v:.3}"))
}

/// Builds the chart for records of one instance and one method.
pub fn chart(records: &[Record]) -> Result<BarChart> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    if records
        .iter()
        .any(|r| r.method != first.method || r.instance_index != first.instance_index)
    {
        return Err(Error::Config(
            "render expects records from a single instance and method".into(),
        ));
    }
    let instance: Vec<String> = first.instance.iter().map(ToString::to_string).collect();
    let title = format!(
        "{} for instance {} ({})",
        first.method.name(),
        first.instance_index,
        instance.join(", ")
    );
    let ciu = |r: &Record| {
        r.ciu
            .clone()
            .ok_or_else(|| Error::Config(format!("{} record without CIU values", r.method.name())))
    };
    match first.method {
        Method::Ciu => {
            let bars = records
                .iter()
                .map(|r| {
                    let c = ciu(r)?;
                    let band = UtilityBand::of(c.cu);
                    Ok(Bar {
                        label: r.labels.join("+"),
                        value: c.ci,
                        band: Some(band),
                        annotation: format!(
                            "CI={} CU={} {}",
                            fmt_opt(c.ci),
                            fmt_opt(c.cu),
                            band.label()
                        ),
                    })
                })
                .collect::<Result<_>>()?;
            Ok(BarChart {
                title,
                axis: (0.0, 1.0),
                bars,
                footnote: "bar length: CI on a fixed [0,1] axis; colour: CU band".into(),
            })
        }
        Method::Influence => {
            let (rmin, rmax) = first.influence_range.unwrap_or((-1.0, 1.0));
            let bars = records
                .iter()
                .map(|r| {
                    let c = ciu(r)?;
                    Ok(Bar {
                        label: r.labels.join("+"),
                        value: c.influence,
                        band: None,
                        annotation: format!("phi={}", fmt_opt(c.influence)),
                    })
                })
                .collect::<Result<_>>()?;
            Ok(BarChart {
                title,
                axis: (rmin, rmax),
                bars,
                footnote: format!("contextual influence on a fixed [{rmin},{rmax}] axis"),
            })
        }
        Method::Shapley | Method::Surrogate => {
            let span = first.output_span.unwrap_or(1.0);
            let mut bars = Vec::new();
            let mut phi0 = None;
            for r in records {
                let a = r.attribution.as_ref().ok_or_else(|| {
                    Error::Config(format!("{} record without attributions", r.method.name()))
                })?;
                phi0 = Some(a.phi0);
                for (label, phi) in r.labels.iter().zip(&a.phi) {
                    bars.push(Bar {
                        label: label.clone(),
                        value: Some(*phi),
                        band: None,
                        annotation: format!("phi={phi:.3}"),
                    });
                }
            }
            Ok(BarChart {
                title,
                axis: (-span, span),
                bars,
                footnote: format!(
                    "attributions on a fixed [-{s},{s}] axis (output range width), phi0={}",
                    fmt_opt(phi0),
                    s = fmt_tick(span)
                ),
            })
        }
    }
}

pub fn render_bars(records: &[Record], format: RenderFormat) -> Result<String> {
    let chart = chart(records)?;
    Ok(match format {
        RenderFormat::Text => render_text(&chart),
        RenderFormat::Svg => render_svg(&chart),
    })
}

const TEXT_WIDTH: usize = 40;

fn render_text(chart: &BarChart) -> String {
    let (lo, hi) = chart.axis;
    let label_width = chart
        .bars
        .iter()
        .map(|b| b.label.len())
        .max()
        .unwrap_or(0)
        .max(4);
    let cell = |v: f64| {
        (((v - lo) / (hi - lo)) * TEXT_WIDTH as f64)
            .round()
            .clamp(0.0, TEXT_WIDTH as f64) as usize
    };
    let zero = cell(0.0_f64.clamp(lo, hi));
    let mut out = format!("{}\n", chart.title);
    let (lo_tick, hi_tick) = (fmt_tick(lo), fmt_tick(hi));
    let gap = (TEXT_WIDTH + 1).saturating_sub(lo_tick.len());
    let _ = writeln!(out, "{:label_width$}  {lo_tick}{hi_tick:>gap$}", "");
    for bar in &chart.bars {
        let mut line = vec![' '; TEXT_WIDTH + 1];
        if zero > 0 && zero < TEXT_WIDTH {
            line[zero] = '|';
        }
        match bar.value {
            Some(v) => {
                let end = cell(v.clamp(lo, hi));
                let (a, b) = if end >= zero {
                    (zero, end)
                } else {
                    (end, zero)
                };
                let fill = match bar.band {
                    Some(UtilityBand::Unfavorable) => '-',
                    Some(UtilityBand::Neutral) => '=',
                    _ => '#',
                };
                for c in line.iter_mut().take(b).skip(a) {
                    *c = fill;
                }
            }
            None => {
                for (k, c) in line.iter_mut().enumerate() {
                    if k % 2 == 0 {
                        *c = '/';
                    }
                }
            }
        }
        let line: String = line.into_iter().collect();
        let _ = writeln!(
            out,
            "{:label_width$} [{}] {}",
            bar.label, line, bar.annotation
        );
    }
    let _ = writeln!(out, "{}", chart.footnote);
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn render_svg(chart: &BarChart) -> String {
    const LEFT: f64 = 130.0;
    const PLOT: f64 = 400.0;
    const ROW: f64 = 28.0;
    const TOP: f64 = 40.0;
    let (lo, hi) = chart.axis;
    let x_of = |v: f64| LEFT + (v.clamp(lo, hi) - lo) / (hi - lo) * PLOT;
    let height = TOP + ROW * chart.bars.len() as f64 + 50.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="720" height="{height:.0}" viewBox="0 0 720 {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    s.push_str(concat!(
        r#"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">"#,
        r##"<rect width="6" height="6" fill="#dddddd"/><line x1="0" y1="0" x2="0" y2="6" stroke="#888888" stroke-width="2"/></pattern></defs>"##,
        "\n"
    ));
    let _ = writeln!(
        s,
        r#"<text x="10" y="20" font-size="14">{}</text>"#,
        escape(&chart.title)
    );
    let axis_y = TOP + ROW * chart.bars.len() as f64 + 4.0;
    let zero_x = x_of(0.0_f64.clamp(lo, hi));
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT:.1}" y1="{axis_y:.1}" x2="{:.1}" y2="{axis_y:.1}" stroke="#000000"/>"##,
        LEFT + PLOT
    );
    let _ = writeln!(
        s,
        r##"<line x1="{zero_x:.1}" y1="{TOP:.1}" x2="{zero_x:.1}" y2="{axis_y:.1}" stroke="#000000"/>"##
    );
    for v in [lo, (lo + hi) / 2.0, hi] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x_of(v),
            axis_y + 16.0,
            fmt_tick(v)
        );
    }
    for (k, bar) in chart.bars.iter().enumerate() {
        let y = TOP + ROW * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 17.0,
            escape(&bar.label)
        );
        let (x0, x1, fill) = match bar.value {
            Some(v) => {
                let end = x_of(v);
                let fill = match bar.band {
                    Some(band) => band.color(),
                    None if v < 0.0 => "#d7301f",
                    None => "#1a9850",
                };
                (zero_x.min(end), zero_x.max(end), fill)
            }
            None => (LEFT, LEFT + PLOT, UtilityBand::Undefined.color()),
        };
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{fill}"/>"#,
            y + 4.0,
            x1 - x0,
            ROW - 8.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            LEFT + PLOT + 8.0,
            y + 17.0,
            escape(&bar.annotation)
        );
    }
    let _ = writeln!(
        s,
        r##"<text x="10" y="{:.1}" fill="#555555">{}</text>"##,
        axis_y + 36.0,
        escape(&chart.footnote)
    );
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
