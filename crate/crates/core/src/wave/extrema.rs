use serde::{Deserialize, Serialize};

use super::WaveError;

/// A local extremum located to sub-grid precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    /// Vertex of the parabola through the three samples around the extremum.
    pub position: f64,
    /// Profile value at the extremal grid sample.
    pub value: f64,
}

/// Interior minima and maxima of a sampled profile, in ascending position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub minima: Vec<Extremum>,
    pub maxima: Vec<Extremum>,
}

/// Extrema restricted to a central fringe region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeSummary {
    pub minima: Vec<Extremum>,
    pub maxima: Vec<Extremum>,
    /// Largest maximum in the region.
    pub i_max: Option<f64>,
    /// Smallest minimum in the region.
    pub i_min: Option<f64>,
}

impl Extrema {
    /// Extrema with `|position - center| <= half_width`.
    pub fn within(&self, center: f64, half_width: f64) -> FringeSummary {
        let pick = |v: &[Extremum]| -> Vec<Extremum> {
            v.iter()
                .copied()
                .filter(|e| (e.position - center).abs() <= half_width)
                .collect()
        };
        let minima = pick(&self.minima);
        let maxima = pick(&self.maxima);
        FringeSummary {
            i_max: maxima.iter().map(|e| e.value).reduce(f64::max),
            i_min: minima.iter().map(|e| e.value).reduce(f64::min),
            minima,
            maxima,
        }
    }

    /// The `count` minima closest to `center`, returned in ascending position.
    pub fn nearest_minima(&self, center: f64, count: usize) -> Vec<Extremum> {
        let mut v = self.minima.clone();
        v.sort_by(|a, b| (a.position - center).abs().total_cmp(&(b.position - center).abs()));
        v.truncate(count);
        v.sort_by(|a, b| a.position.total_cmp(&b.position));
        v
    }
}

fn refine(y0: f64, y1: f64, y2: f64) -> f64 {
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature == 0.0 {
        0.0
    } else {
        (0.5 * (y0 - y2) / curvature).clamp(-0.5, 0.5)
    }
}

/// Locates interior extrema by sample comparison and refines each position
/// with a 3-point parabola.
pub fn find_extrema(profile: &[f64], dx: f64, origin: f64) -> Result<Extrema, WaveError> {
    if profile.len() < 3 {
        return Err(WaveError::ProfileTooShort);
    }
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for (i, w) in profile.windows(3).enumerate() {
        let (y0, y1, y2) = (w[0], w[1], w[2]);
        // Strict on the left, non-strict on the right so a flat-bottomed
        // extremum is reported once.
        let x = |offset: f64| origin + (i as f64 + 1.0 + offset) * dx;
        if y1 < y0 && y1 <= y2 {
            minima.push(Extremum {
                position: x(refine(y0, y1, y2)),
                value: y1,
            });
        } else if y1 > y0 && y1 >= y2 {
            maxima.push(Extremum {
                position: x(refine(y0, y1, y2)),
                value: y1,
            });
        }
    }
    if minima.is_empty() && maxima.is_empty() {
        return Err(WaveError::NoExtrema);
    }
    Ok(Extrema { minima, maxima })
}
