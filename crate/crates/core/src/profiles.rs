//! Profile selection, column centering, presence curves and plot data.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LexdivError, Result};
use crate::matrix::ScoreMatrix;
use crate::numerics::{hypergeom_presence, CompensatedSum};

/// Number of extreme differences counted at each end for every column pair.
pub const EXTREMES_PER_PAIR: usize = 4;
pub const DEFAULT_PROFILE_COUNT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileTrace {
    pub text_id: String,
    pub largest: usize,
    pub smallest: usize,
    /// 1, 2 or 3 for the selection step that picked the text; 0 if unselected.
    pub step: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSelection {
    pub selected_ids: Vec<String>,
    /// One entry per matrix row, in row order.
    pub trace: Vec<ProfileTrace>,
    pub warnings: Vec<String>,
}

/// Extreme-difference counts per row. For every column pair (a, b), a < b,
/// the differences col_b − col_a are ranked across texts; ties are broken by
/// text id.
pub fn extreme_counts(m: &ScoreMatrix) -> Vec<(usize, usize)> {
    let n = m.n_rows();
    let ids = m.row_ids();
    let mut counts = vec![(0usize, 0usize); n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut diffs = vec![0.0; n];
    let take = EXTREMES_PER_PAIR.min(n);
    for a in 0..m.n_cols() {
        for b in a + 1..m.n_cols() {
            for (i, d) in diffs.iter_mut().enumerate() {
                *d = m.get(i, b) - m.get(i, a);
            }
            order.sort_by(|&x, &y| {
                diffs[y]
                    .partial_cmp(&diffs[x])
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| ids[x].cmp(&ids[y]))
            });
            for &i in &order[..take] {
                counts[i].0 += 1;
            }
            order.sort_by(|&x, &y| {
                diffs[x]
                    .partial_cmp(&diffs[y])
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| ids[x].cmp(&ids[y]))
            });
            for &i in &order[..take] {
                counts[i].1 += 1;
            }
        }
    }
    counts
}

/// Sizes of the three selection groups: four each for the usual twelve.
pub fn group_sizes(count: usize) -> [usize; 3] {
    let g1 = count.div_ceil(3);
    let g2 = (count - g1).div_ceil(2);
    [g1, g2, count - g1 - g2]
}

/// Selects the texts whose profiles have the most extreme pairwise changes:
/// first by "largest" counts, then "smallest" counts, then both combined,
/// each step drawing from texts not yet selected.
pub fn select_profiles(m: &ScoreMatrix, count: usize) -> Result<ProfileSelection> {
    if m.n_cols() < 2 {
        return Err(LexdivError::invalid("profile selection needs at least 2 conditions"));
    }
    let n = m.n_rows();
    let ids = m.row_ids();
    let counts = extreme_counts(m);
    let mut trace: Vec<ProfileTrace> = ids
        .iter()
        .zip(&counts)
        .map(|(id, &(largest, smallest))| ProfileTrace {
            text_id: id.clone(),
            largest,
            smallest,
            step: 0,
        })
        .collect();
    let mut warnings = Vec::new();
    if n < count {
        let w = format!("only {n} texts available, fewer than the {count} requested");
        log::warn!("{w}");
        warnings.push(w);
    }
    let count = count.min(n);
    let mut selected = Vec::with_capacity(count);
    let keys: [fn(&ProfileTrace) -> usize; 3] = [
        |t| t.largest,
        |t| t.smallest,
        |t| t.largest + t.smallest,
    ];
    for (step, (size, key)) in group_sizes(count).into_iter().zip(keys).enumerate() {
        let mut pool: Vec<usize> = (0..n).filter(|&i| trace[i].step == 0).collect();
        pool.sort_by(|&x, &y| key(&trace[y]).cmp(&key(&trace[x])).then_with(|| ids[x].cmp(&ids[y])));
        for &i in pool.iter().take(size) {
            trace[i].step = step as u8 + 1;
            selected.push(ids[i].clone());
        }
    }
    Ok(ProfileSelection {
        selected_ids: selected,
        trace,
        warnings,
    })
}

/// Subtracts each column mean.
pub fn center_columns(m: &ScoreMatrix) -> ScoreMatrix {
    let means: Vec<f64> = (0..m.n_cols())
        .map(|j| m.column(j).into_iter().collect::<CompensatedSum>().total() / m.n_rows().max(1) as f64)
        .collect();
    m.map_values(|_, j, v| v - means[j])
}

/// One named line of (x, y) points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Presence probability of a type of frequency f in a sample of n tokens,
/// one series per f.
pub fn hdd_presence_curves(n_tokens: u64, f_values: &[u64], n_values: &[u64]) -> Result<PlotData> {
    let series = f_values
        .iter()
        .map(|&f| {
            let points = n_values
                .iter()
                .map(|&n| Ok((n as f64, hypergeom_presence(n_tokens, f, n)?)))
                .collect::<Result<_>>()?;
            Ok(Series {
                name: format!("f={f}"),
                points,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PlotData {
        x_label: "sample size".into(),
        y_label: "probability of presence".into(),
        series,
    })
}

impl PlotData {
    /// One series per matrix row; x is the numeric column label, or the
    /// 1-based column position when labels are not numeric.
    pub fn from_matrix(m: &ScoreMatrix) -> PlotData {
        let xs: Vec<f64> = m
            .col_labels()
            .iter()
            .enumerate()
            .map(|(j, l)| l.parse().unwrap_or((j + 1) as f64))
            .collect();
        let series = (0..m.n_rows())
            .map(|i| Series {
                name: m.row_ids()[i].clone(),
                points: xs.iter().copied().zip(m.row(i).iter().copied()).collect(),
            })
            .collect();
        PlotData {
            x_label: "condition".into(),
            y_label: "score".into(),
            series,
        }
    }

    /// Rows of the selection only, in selection order.
    pub fn from_selection(m: &ScoreMatrix, sel: &ProfileSelection) -> Result<PlotData> {
        Ok(PlotData::from_matrix(&m.select_rows(&sel.selected_ids)?))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| LexdivError::invalid(format!("csv write failed: {e}"));
        w.write_record(["series", "x", "y"]).map_err(err)?;
        for s in &self.series {
            for (x, y) in &s.points {
                w.write_record([s.name.as_str(), &x.to_string(), &y.to_string()])
                    .map_err(err)?;
            }
        }
        w.flush()
            .map_err(|e| LexdivError::invalid(format!("csv write failed: {e}")))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<PlotData> {
        let mut r = csv::Reader::from_reader(reader);
        let mut out = PlotData::default();
        for rec in r.records() {
            let rec = rec.map_err(|e| LexdivError::invalid(format!("plot csv: {e}")))?;
            let num = |s: &str| {
                f64::from_str(s).map_err(|_| LexdivError::invalid(format!("plot csv: bad number `{s}`")))
            };
            let point = (num(&rec[1])?, num(&rec[2])?);
            match out.series.last_mut() {
                Some(s) if s.name == rec[0] => s.points.push(point),
                _ => out.series.push(Series {
                    name: rec[0].to_string(),
                    points: vec![point],
                }),
            }
        }
        Ok(out)
    }

    /// Plain multi-line chart with linear axes and labeled ticks.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 400.0;
        const PAD: f64 = 50.0;
        let pts = self.series.iter().flat_map(|s| s.points.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="10">"#
        );
        let _ = writeln!(
            svg,
            r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
            H - PAD,
            W - PAD
        );
        for t in 0..=4 {
            let fx = x0 + (x1 - x0) * t as f64 / 4.0;
            let fy = y0 + (y1 - y0) * t as f64 / 4.0;
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
                sx(fx),
                H - PAD + 15.0,
                tick(fx)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
                PAD - 5.0,
                sy(fy) + 3.0,
                tick(fy)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            W / 2.0,
            H - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="12" y="{}" text-anchor="middle" transform="rotate(-90 12 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(&self.y_label)
        );
        for (i, s) in self.series.iter().enumerate() {
            let hue = (i * 137) % 360;
            let coords: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="hsl({hue},60%,40%)" points="{}"><title>{}</title></polyline>"#,
                coords.join(" "),
                escape(&s.name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotFormat {
    Csv,
    Svg,
}

impl FromStr for PlotFormat {
    type Err = LexdivError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(PlotFormat::Csv),
            "svg" => Ok(PlotFormat::Svg),
            other => Err(LexdivError::invalid(format!("unknown plot format `{other}`"))),
        }
    }
}

/// Writes plot data to `path` atomically.
pub fn emit_plot_data(data: &PlotData, path: &std::path::Path, format: PlotFormat) -> Result<()> {
    let bytes = match format {
        PlotFormat::Csv => {
            let mut buf = Vec::new();
            data.write_csv(&mut buf)?;
            buf
        }
        PlotFormat::Svg => data.to_svg().into_bytes(),
    };
    crate::output::write_atomic(path, &bytes)
}
