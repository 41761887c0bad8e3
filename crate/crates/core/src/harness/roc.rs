use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RocPoint {
    pub false_positive_rate: f64,
    pub true_positive_rate: f64,
    /// Scores `>= threshold` are called positive; infinite at the `(0, 0)` end.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

impl RocCurve {
    /// Sweeps the threshold down through every distinct score. Tied
    /// positive/negative pairs land on one diagonal segment, so the
    /// trapezoid area gives them half credit.
    pub fn from_scores(scores: &[f64], labels: &[bool]) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::shape("scores and labels differ in length"));
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::param("scores contain NaN"));
        }
        let pos = labels.iter().filter(|&&l| l).count();
        let neg = labels.len() - pos;
        if pos == 0 || neg == 0 {
            return Err(Error::param("ROC needs both positive and negative labels"));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

        let mut points = vec![RocPoint {
            false_positive_rate: 0.0,
            true_positive_rate: 0.0,
            threshold: f64::INFINITY,
        }];
        let (mut tp, mut fp) = (0usize, 0usize);
        let mut i = 0;
        while i < order.len() {
            let threshold = scores[order[i]];
            while i < order.len() && scores[order[i]] == threshold {
                if labels[order[i]] {
                    tp += 1;
                } else {
                    fp += 1;
                }
                i += 1;
            }
            points.push(RocPoint {
                false_positive_rate: fp as f64 / neg as f64,
                true_positive_rate: tp as f64 / pos as f64,
                threshold,
            });
        }
        let auc = points
            .windows(2)
            .map(|w| {
                (w[1].false_positive_rate - w[0].false_positive_rate)
                    * (w[1].true_positive_rate + w[0].true_positive_rate)
                    / 2.0
            })
            .sum();
        Ok(Self { points, auc })
    }
}

pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    Ok(RocCurve::from_scores(scores, labels)?.auc)
}
