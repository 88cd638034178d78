//! Minimal hand-rolled SVG plots; no drawing dependency, byte-stable
//! output.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{fmt_f64, write_atomic, ReportError};
use crate::spectral::{normal_cdf, normal_pdf};
use crate::stein::scaling_fit;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 55.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Fixed-range binning on [-5, 5]; outliers fall into the end bins so the
/// counts always total the sample size.
pub fn histogram_bins(samples: &[f64], k: usize) -> Vec<Bin> {
    assert!(k >= 1);
    let (lo, hi) = (-5.0f64, 5.0f64);
    let width = (hi - lo) / k as f64;
    let mut bins: Vec<Bin> = (0..k)
        .map(|i| Bin { lo: lo + i as f64 * width, hi: lo + (i + 1) as f64 * width, count: 0 })
        .collect();
    for &x in samples {
        let idx = (((x - lo) / width).floor() as i64).clamp(0, k as i64 - 1) as usize;
        bins[idx].count += 1;
    }
    bins
}

pub enum PlotKind<'a> {
    /// log-log scatter with its least-squares line; slope recorded in a
    /// metadata comment
    LogLogScatterWithFit { points: &'a [(f64, f64)] },
    /// bin rectangles with the standard normal density overlaid (bin
    /// masses from normal_cdf differences)
    HistogramVsNormal { samples: &'a [f64], bins: usize },
    /// linear scatter of err against the coupling s
    ErrorVsS { points: &'a [(f64, f64)] },
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn frame(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Frame {
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in xs {
        x0 = x0.min(x);
        x1 = x1.max(x);
    }
    for y in ys {
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    Frame { x0, x1, y0, y1 }
}

fn header(comment: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n<!-- {comment} -->\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        t = MARGIN,
        r = W - MARGIN,
        b = H - MARGIN,
    )
}

pub fn emit_plot(kind: PlotKind<'_>, path: &Path) -> Result<(), ReportError> {
    let body = match kind {
        PlotKind::LogLogScatterWithFit { points } => {
            if points.is_empty() {
                return Err(ReportError::BadColumns {
                    kind: "loglog-scatter-with-fit",
                    reason: "empty table".into(),
                });
            }
            if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
                return Err(ReportError::BadColumns {
                    kind: "loglog-scatter-with-fit",
                    reason: "nonpositive coordinate on log axes".into(),
                });
            }
            let fit = scaling_fit(points).map_err(|e| ReportError::BadColumns {
                kind: "loglog-scatter-with-fit",
                reason: e.to_string(),
            })?;
            let logs: Vec<(f64, f64)> =
                points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
            let f = frame(logs.iter().map(|p| p.0), logs.iter().map(|p| p.1));
            let mut s = header(&format!(
                "kind=loglog-scatter-with-fit slope={} intercept={} stderr={}",
                fmt_f64(fit.slope),
                fmt_f64(fit.intercept),
                fmt_f64(fit.stderr)
            ));
            for (lx, ly) in &logs {
                s.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"steelblue\"/>\n",
                    fmt_f64(f.px(*lx)),
                    fmt_f64(f.py(*ly))
                ));
            }
            let (ya, yb) =
                (fit.intercept + fit.slope * f.x0, fit.intercept + fit.slope * f.x1);
            s.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"crimson\" stroke-width=\"1.5\"/>\n",
                fmt_f64(f.px(f.x0)),
                fmt_f64(f.py(ya)),
                fmt_f64(f.px(f.x1)),
                fmt_f64(f.py(yb))
            ));
            s
        }
        PlotKind::HistogramVsNormal { samples, bins } => {
            if samples.is_empty() || bins == 0 {
                return Err(ReportError::BadColumns {
                    kind: "histogram-vs-normal",
                    reason: "empty table".into(),
                });
            }
            let table = histogram_bins(samples, bins);
            let m = samples.len() as f64;
            // densities so the histogram and the N(0,1) curve share a scale
            let dens: Vec<f64> =
                table.iter().map(|b| b.count as f64 / (m * (b.hi - b.lo))).collect();
            let peak = dens
                .iter()
                .cloned()
                .fold(normal_pdf(0.0), f64::max);
            let f = Frame { x0: table[0].lo, x1: table[table.len() - 1].hi, y0: 0.0, y1: peak };
            let mut s = header(&format!(
                "kind=histogram-vs-normal samples={} bins={}",
                samples.len(),
                bins
            ));
            for (b, d) in table.iter().zip(&dens) {
                let x = f.px(b.lo);
                let y = f.py(*d);
                s.push_str(&format!(
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"steelblue\" fill-opacity=\"0.6\"/>\n",
                    fmt_f64(x),
                    fmt_f64(y),
                    fmt_f64(f.px(b.hi) - x),
                    fmt_f64(f.py(0.0) - y)
                ));
            }
            // overlay: per-bin normal mass from CDF differences, drawn as
            // a step curve at matching density scale
            let mut pts = Vec::new();
            for b in &table {
                let d = (normal_cdf(b.hi) - normal_cdf(b.lo)) / (b.hi - b.lo);
                pts.push(format!("{},{}", fmt_f64(f.px(b.lo)), fmt_f64(f.py(d))));
                pts.push(format!("{},{}", fmt_f64(f.px(b.hi)), fmt_f64(f.py(d))));
            }
            s.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\"/>\n",
                pts.join(" ")
            ));
            s
        }
        PlotKind::ErrorVsS { points } => {
            if points.is_empty() {
                return Err(ReportError::BadColumns {
                    kind: "error-vs-s",
                    reason: "empty table".into(),
                });
            }
            let f = frame(
                points.iter().map(|p| p.0),
                points.iter().map(|p| p.1).chain(std::iter::once(0.0)),
            );
            let mut s = header(&format!("kind=error-vs-s points={}", points.len()));
            let mut pts = Vec::new();
            for (x, y) in points {
                pts.push(format!("{},{}", fmt_f64(f.px(*x)), fmt_f64(f.py(*y))));
            }
            s.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
                pts.join(" ")
            ));
            for (x, y) in points {
                s.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"steelblue\"/>\n",
                    fmt_f64(f.px(*x)),
                    fmt_f64(f.py(*y))
                ));
            }
            s
        }
    };
    let doc = format!("{body}</svg>\n");
    write_atomic(path, doc.as_bytes())
}
