//! Per-channel PSNR evaluation over intrinsic channel stacks, with report
//! aggregation in the six-column layout (Image, Depth, Normals, Albedo,
//! Shading, Residual).

mod benchmark;

pub use benchmark::{run_benchmark, BenchmarkOptions, MethodSpec};

use crate::num::Real;
use crate::raster::ColorImage;
use crate::render::ChannelStack;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("shape mismatch: {a} values vs {b}")]
    ShapeMismatch { a: usize, b: usize },
    #[error("peak must be positive, got {0}")]
    BadPeak(f64),
    #[error("no samples to aggregate")]
    Empty,
    #[error("prediction is {got_w}x{got_h} but ground truth is {want_w}x{want_h}")]
    DimensionMismatch {
        want_w: usize,
        want_h: usize,
        got_w: usize,
        got_h: usize,
    },
    #[error("unknown method `{0}`; valid methods: oracle, identity, blend_if, color_blend, toy")]
    UnknownMethod(String),
    #[error("method `toy` needs a checkpoint path")]
    MissingCheckpoint,
}

/// PSNR scores are capped here so exact matches do not produce infinities.
pub const PSNR_CAP_DB: f64 = 99.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Channel {
    Image,
    Depth,
    Normals,
    Albedo,
    Shading,
    Residual,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::Image,
        Channel::Depth,
        Channel::Normals,
        Channel::Albedo,
        Channel::Shading,
        Channel::Residual,
    ];
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Channel::Image => "image",
            Channel::Depth => "depth",
            Channel::Normals => "normals",
            Channel::Albedo => "albedo",
            Channel::Shading => "shading",
            Channel::Residual => "residual",
        };
        f.write_str(name)
    }
}

/// Per-channel PSNR for one evaluated sample; missing channels mean the
/// method only produces RGB.
pub type SampleScores = BTreeMap<Channel, f64>;

#[derive(Clone, Debug)]
pub struct MethodResult {
    pub method: String,
    pub samples: Vec<SampleScores>,
}

/// `10 log10(peak^2 / MSE)` clamped to `cap`; equal inputs score the cap.
pub fn psnr(a: &[f64], b: &[f64], peak: f64, cap: f64) -> Result<f64, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::ShapeMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if !(peak > 0.0) {
        return Err(EvalError::BadPeak(peak));
    }
    let mse = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.len() as f64;
    if mse == 0.0 {
        return Ok(cap);
    }
    Ok((10.0 * (peak * peak / mse).log10()).min(cap))
}

fn as_f64<T: Real>(data: &[T]) -> Vec<f64> {
    data.iter().map(|v| v.as_f64()).collect()
}

fn psnr_rgb<T: Real>(a: &ColorImage<T>, b: &ColorImage<T>) -> Result<f64, EvalError> {
    psnr(&as_f64(a.data()), &as_f64(b.data()), 1.0, PSNR_CAP_DB)
}

/// Depth comparison: background pixels (ground-truth `+inf`) are excluded,
/// then both sides are normalized by the ground truth's finite maximum.
fn psnr_depth<T: Real>(pred: &[T], gt: &[T]) -> Result<f64, EvalError> {
    if pred.len() != gt.len() {
        return Err(EvalError::ShapeMismatch {
            a: pred.len(),
            b: gt.len(),
        });
    }
    let mut max_finite = 0.0f64;
    for v in gt {
        let v = v.as_f64();
        if v.is_finite() && v > max_finite {
            max_finite = v;
        }
    }
    if max_finite == 0.0 {
        max_finite = 1.0;
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (p, g) in pred.iter().zip(gt) {
        let g = g.as_f64();
        if g.is_finite() {
            a.push(p.as_f64() / max_finite);
            b.push(g / max_finite);
        }
    }
    if a.is_empty() {
        return Ok(PSNR_CAP_DB);
    }
    psnr(&a, &b, 1.0, PSNR_CAP_DB)
}

/// A method's output for one sample: either a full intrinsic stack (the
/// renderer oracle) or a plain RGB image (baselines, the toy model).
pub enum Prediction<T> {
    Rgb(ColorImage<T>),
    Stack(ChannelStack<T>),
}

impl<T: Real> Prediction<T> {
    fn dims(&self) -> (usize, usize) {
        match self {
            Prediction::Rgb(img) => (img.width(), img.height()),
            Prediction::Stack(stack) => (stack.width(), stack.height()),
        }
    }
}

/// Score one prediction against ground truth. Full stacks score all six
/// channels; RGB-only predictions score `Image` alone.
pub fn evaluate_sample<T: Real>(
    prediction: &Prediction<T>,
    ground_truth: &ChannelStack<T>,
) -> Result<SampleScores, EvalError> {
    let (got_w, got_h) = prediction.dims();
    if got_w != ground_truth.width() || got_h != ground_truth.height() {
        return Err(EvalError::DimensionMismatch {
            want_w: ground_truth.width(),
            want_h: ground_truth.height(),
            got_w,
            got_h,
        });
    }
    let mut scores = SampleScores::new();
    match prediction {
        Prediction::Rgb(img) => {
            scores.insert(Channel::Image, psnr_rgb(img, &ground_truth.image)?);
        }
        Prediction::Stack(stack) => {
            scores.insert(Channel::Image, psnr_rgb(&stack.image, &ground_truth.image)?);
            scores.insert(
                Channel::Depth,
                psnr_depth(stack.depth.data(), ground_truth.depth.data())?,
            );
            // Normals compared as raw 3-vectors with peak 2 (range [-1, 1]).
            scores.insert(
                Channel::Normals,
                psnr(
                    &as_f64(stack.normals.data()),
                    &as_f64(ground_truth.normals.data()),
                    2.0,
                    PSNR_CAP_DB,
                )?,
            );
            scores.insert(
                Channel::Albedo,
                psnr_rgb(&stack.albedo, &ground_truth.albedo)?,
            );
            scores.insert(
                Channel::Shading,
                psnr_rgb(&stack.shading, &ground_truth.shading)?,
            );
            scores.insert(
                Channel::Residual,
                psnr_rgb(&stack.residual, &ground_truth.residual)?,
            );
        }
    }
    Ok(scores)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub means: BTreeMap<Channel, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// Rows in ascending mean Image PSNR: best method last.
    pub rows: Vec<ReportRow>,
}

/// Mean each method's present channels over its samples and order rows by
/// ascending Image score.
pub fn aggregate_report(results: &[MethodResult]) -> Result<Report, EvalError> {
    if results.is_empty() || results.iter().any(|r| r.samples.is_empty()) {
        return Err(EvalError::Empty);
    }
    let mut rows = Vec::with_capacity(results.len());
    for result in results {
        let mut sums: BTreeMap<Channel, (f64, usize)> = BTreeMap::new();
        for sample in &result.samples {
            for (channel, score) in sample {
                let entry = sums.entry(*channel).or_insert((0.0, 0));
                entry.0 += score;
                entry.1 += 1;
            }
        }
        let means = sums
            .into_iter()
            .map(|(c, (sum, n))| (c, sum / n as f64))
            .collect();
        rows.push(ReportRow {
            method: result.method.clone(),
            means,
        });
    }
    rows.sort_by(|a, b| {
        let ia = a.means.get(&Channel::Image).copied().unwrap_or(f64::NAN);
        let ib = b.means.get(&Channel::Image).copied().unwrap_or(f64::NAN);
        ia.total_cmp(&ib)
    });
    Ok(Report { rows })
}

impl Report {
    /// `method,image,depth,normals,albedo,shading,residual` with two
    /// decimals; absent channels are empty fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,image,depth,normals,albedo,shading,residual\n");
        for row in &self.rows {
            out.push_str(&row.method);
            for channel in Channel::ALL {
                out.push(',');
                if let Some(score) = row.means.get(&channel) {
                    out.push_str(&format!("{score:.2}"));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Fixed-width text table; absent channels print `-`.
    pub fn to_text(&self) -> String {
        let name_width = self
            .rows
            .iter()
            .map(|r| r.method.len())
            .chain(["Method".len()])
            .max()
            .unwrap_or(6);
        let mut out = format!(
            "{:<name_width$}  {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
            "Method", "Image", "Depth", "Normals", "Albedo", "Shading", "Residual"
        );
        for row in &self.rows {
            out.push_str(&format!("{:<name_width$} ", row.method));
            for channel in Channel::ALL {
                match row.means.get(&channel) {
                    Some(score) => out.push_str(&format!(" {score:>8.2}")),
                    None => out.push_str(&format!(" {:>8}", "-")),
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::tests_support::test_stack;

    #[test]
    fn psnr_trivial_values() {
        let a = vec![0.5; 64];
        assert_eq!(psnr(&a, &a, 1.0, PSNR_CAP_DB).unwrap(), PSNR_CAP_DB);
        let b: Vec<f64> = a.iter().map(|v| v + 0.1).collect();
        let twenty = psnr(&a, &b, 1.0, PSNR_CAP_DB).unwrap();
        assert!((twenty - 20.0).abs() < 1e-9, "{twenty}");
        let zeros = vec![0.0; 16];
        let ones = vec![1.0; 16];
        assert_eq!(psnr(&zeros, &ones, 1.0, PSNR_CAP_DB).unwrap(), 0.0);
    }

    #[test]
    fn psnr_is_symmetric_and_validates() {
        let a: Vec<f64> = (0..32).map(|i| i as f64 / 31.0).collect();
        let b: Vec<f64> = (0..32).map(|i| (i as f64 / 31.0).powi(2)).collect();
        assert_eq!(
            psnr(&a, &b, 1.0, PSNR_CAP_DB).unwrap(),
            psnr(&b, &a, 1.0, PSNR_CAP_DB).unwrap()
        );
        assert!(psnr(&a, &b[..16], 1.0, PSNR_CAP_DB).is_err());
        assert!(psnr(&a, &b, 0.0, PSNR_CAP_DB).is_err());
    }

    #[test]
    fn identical_stack_scores_cap_on_all_six_channels() {
        let stack = test_stack(24);
        let scores = evaluate_sample(&Prediction::Stack(stack.clone()), &stack).unwrap();
        assert_eq!(scores.len(), 6);
        for channel in Channel::ALL {
            assert_eq!(scores[&channel], PSNR_CAP_DB);
        }
    }

    #[test]
    fn rgb_prediction_scores_image_only() {
        let stack = test_stack(24);
        let scores = evaluate_sample(&Prediction::Rgb(stack.image.clone()), &stack).unwrap();
        assert_eq!(scores.len(), 1);
        assert!(scores.contains_key(&Channel::Image));
    }

    #[test]
    fn report_orders_rows_best_last_and_formats_csv() {
        let mk = |name: &str, image: f64| MethodResult {
            method: name.into(),
            samples: vec![SampleScores::from([
                (Channel::Image, image),
                (Channel::Depth, 37.53),
                (Channel::Normals, 31.24),
                (Channel::Albedo, 25.18),
                (Channel::Shading, 28.78),
                (Channel::Residual, 27.17),
            ])],
        };
        let report = aggregate_report(&[mk("Ours", 26.06), mk("Worse", 21.0)]).unwrap();
        assert_eq!(report.rows[0].method, "Worse");
        assert_eq!(report.rows[1].method, "Ours");
        let csv = report.to_csv();
        assert!(csv.ends_with("Ours,26.06,37.53,31.24,25.18,28.78,27.17\n"), "{csv}");
        let text = report.to_text();
        assert!(text.contains("26.06"));
        assert!(text.contains("37.53"));
    }

    #[test]
    fn absent_channels_leave_empty_csv_fields() {
        let rgb_only = MethodResult {
            method: "baseline".into(),
            samples: vec![SampleScores::from([(Channel::Image, 18.5)])],
        };
        let report = aggregate_report(&[rgb_only]).unwrap();
        assert!(report.to_csv().contains("baseline,18.50,,,,,\n"));
        assert!(aggregate_report(&[]).is_err());
    }
}
