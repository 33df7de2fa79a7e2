//! Automated scale selection from cross-scale and ensemble NVI.
//!
//! 1. Average-pool the cross-scale NVI matrix with a `kernel_size` window,
//!    truncated at the borders, and keep the diagonal.
//! 2. Smooth that curve with a triangular moving mean of half-width
//!    `window_size`, also truncated. The result is the Block NVI curve.
//! 3. Locate its local minima; a plateau counts once, at its leftmost index.
//! 4. Around each minimum take the basin of indices within `basin_radius`
//!    and pick the scale with the lowest ensemble NVI in it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values closer than this are treated as equal when locating minima.
const PLATEAU_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    /// 2-D square window over the cross-scale matrix.
    #[default]
    Block,
    /// 1-D window along each row: the mean of `NVI(t_i, t_j)` for `j` near `i`.
    Row,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub kernel_size: usize,
    pub window_size: usize,
    pub basin_radius: usize,
    #[serde(default)]
    pub pooling: Pooling,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScaleSelection {
    /// Selected scale indices, ascending.
    pub selected: Vec<usize>,
    /// Local minima of the Block NVI curve.
    pub minima: Vec<usize>,
    /// Inclusive index range of each basin, one per minimum.
    pub basins: Vec<(usize, usize)>,
    /// True when no minimum existed and the global ensemble-NVI minimum was
    /// reported instead.
    pub fallback: bool,
}

/// Window `[lo, hi]` of width `k` around `i`, clipped to `0..n`. Even
/// widths extend one further to the right.
fn window(i: usize, k: usize, n: usize) -> (usize, usize) {
    let below = (k - 1) / 2;
    let above = k - 1 - below;
    (i.saturating_sub(below), (i + above).min(n - 1))
}

/// Block NVI: pooled, then triangularly smoothed, diagonal of `cross_nvi`.
pub fn block_nvi(cross_nvi: &[Vec<f64>], params: &SelectionParams) -> Result<Vec<f64>> {
    validate(cross_nvi, None, params)?;
    let n = cross_nvi.len();
    let pooled: Vec<f64> = (0..n)
        .map(|i| {
            let (lo, hi) = window(i, params.kernel_size, n);
            let (sum, count) = match params.pooling {
                Pooling::Block => (lo..=hi)
                    .flat_map(|a| (lo..=hi).map(move |b| cross_nvi[a][b]))
                    .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1)),
                Pooling::Row => (lo..=hi)
                    .map(|b| cross_nvi[i][b])
                    .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1)),
            };
            sum / count as f64
        })
        .collect();

    let half = params.window_size;
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let (sum, weight) = (lo..=hi).fold((0.0, 0.0), |(s, w), j| {
                let wj = (half + 1 - i.abs_diff(j)) as f64;
                (s + wj * pooled[j], w + wj)
            });
            sum / weight
        })
        .collect())
}

/// Leftmost index of every local minimum, treating runs of equal values as
/// plateaus. A plateau must have at least one neighbour and be strictly
/// lower than every neighbour it has; a flat curve has no minima.
pub fn local_minima(curve: &[f64]) -> Vec<usize> {
    let n = curve.len();
    let mut minima = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && (curve[end + 1] - curve[end]).abs() <= PLATEAU_TOLERANCE {
            end += 1;
        }
        let left = start.checked_sub(1).map(|j| curve[j]);
        let right = (end + 1 < n).then(|| curve[end + 1]);
        let lower_than = |neighbour: Option<f64>, own: f64| {
            neighbour.is_none_or(|v| v > own + PLATEAU_TOLERANCE)
        };
        if (left.is_some() || right.is_some())
            && lower_than(left, curve[start])
            && lower_than(right, curve[end])
        {
            minima.push(start);
        }
        start = end + 1;
    }
    minima
}

/// Runs the full selection. Returns the selection and the Block NVI curve.
///
/// Fewer than three scales yields an empty selection.
pub fn select_scales(
    cross_nvi: &[Vec<f64>],
    nvi_t: &[f64],
    params: &SelectionParams,
) -> Result<(ScaleSelection, Vec<f64>)> {
    validate(cross_nvi, Some(nvi_t), params)?;
    let n = cross_nvi.len();
    if n < 3 {
        log::warn!("scale selection needs at least 3 scales, got {n}");
        return Ok((ScaleSelection::default(), vec![0.0; n]));
    }
    let curve = block_nvi(cross_nvi, params)?;
    let minima = local_minima(&curve);

    let argmin = |lo: usize, hi: usize| -> usize {
        (lo..=hi).fold(lo, |best, i| if nvi_t[i] < nvi_t[best] { i } else { best })
    };
    let basins: Vec<(usize, usize)> = minima
        .iter()
        .map(|&m| {
            (
                m.saturating_sub(params.basin_radius),
                (m + params.basin_radius).min(n - 1),
            )
        })
        .collect();
    let mut selected: Vec<usize> = basins.iter().map(|&(lo, hi)| argmin(lo, hi)).collect();
    selected.sort_unstable();
    selected.dedup();

    let fallback = selected.is_empty();
    if fallback {
        selected.push(argmin(0, n - 1));
    }
    Ok((
        ScaleSelection {
            selected,
            minima,
            basins,
            fallback,
        },
        curve,
    ))
}

fn validate(cross_nvi: &[Vec<f64>], nvi_t: Option<&[f64]>, params: &SelectionParams) -> Result<()> {
    let n = cross_nvi.len();
    if let Some(row) = cross_nvi.iter().find(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    if let Some(nvi_t) = nvi_t {
        if nvi_t.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: nvi_t.len(),
            });
        }
    }
    if params.kernel_size == 0 || params.window_size == 0 || params.basin_radius == 0 {
        return Err(Error::InvalidConfig(
            "kernel_size, window_size and basin_radius must be at least 1".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("no scales to select from".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: usize, w: usize, r: usize) -> SelectionParams {
        SelectionParams {
            kernel_size: k,
            window_size: w,
            basin_radius: r,
            pooling: Pooling::Block,
        }
    }

    #[test]
    fn windows() {
        assert_eq!(window(0, 2, 5), (0, 1));
        assert_eq!(window(4, 2, 5), (4, 4));
        assert_eq!(window(2, 3, 5), (1, 3));
        assert_eq!(window(0, 3, 5), (0, 1));
        assert_eq!(window(3, 1, 5), (3, 3));
    }

    #[test]
    fn minima_with_plateaus_and_borders() {
        assert_eq!(local_minima(&[3.0, 1.0, 2.0]), vec![1]);
        assert_eq!(local_minima(&[3.0, 1.0, 1.0, 2.0]), vec![1]);
        assert_eq!(local_minima(&[1.0, 2.0, 3.0]), vec![0]);
        assert_eq!(local_minima(&[3.0, 2.0, 1.0, 1.0]), vec![2]);
        assert_eq!(local_minima(&[1.0, 1.0, 1.0]), Vec::<usize>::new());
        assert_eq!(local_minima(&[2.0, 1.0, 3.0, 0.5, 4.0]), vec![1, 3]);
        // shoulder is not a minimum
        assert_eq!(local_minima(&[3.0, 2.0, 2.0, 1.0, 5.0]), vec![3]);
    }

    #[test]
    fn triangular_smoothing_by_hand() {
        // kernel 1 leaves the diagonal of zeros; use row pooling to get a curve
        let cross = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ];
        let p = SelectionParams {
            pooling: Pooling::Row,
            ..params(2, 1, 1)
        };
        // pooled: [0.5, 0.5, 0.0]
        let curve = block_nvi(&cross, &p).unwrap();
        let expected = [
            (2.0 * 0.5 + 1.0 * 0.5) / 3.0,
            (1.0 * 0.5 + 2.0 * 0.5 + 0.0) / 4.0,
            (1.0 * 0.5 + 2.0 * 0.0) / 3.0,
        ];
        for (a, b) in curve.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn flat_cross_nvi_falls_back() {
        let cross = vec![vec![0.0; 6]; 6];
        let nvi_t = [0.3, 0.2, 0.1, 0.1, 0.4, 0.5];
        let (sel, curve) = select_scales(&cross, &nvi_t, &params(2, 2, 1)).unwrap();
        assert!(curve.iter().all(|&v| v == 0.0));
        assert!(sel.minima.is_empty());
        assert!(sel.fallback);
        assert_eq!(sel.selected, vec![2]);
    }

    #[test]
    fn too_few_scales() {
        let cross = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let (sel, _) = select_scales(&cross, &[0.0, 0.0], &params(1, 1, 1)).unwrap();
        assert!(sel.selected.is_empty());
        assert!(!sel.fallback);
    }

    #[test]
    fn invalid_inputs() {
        let cross = vec![vec![0.0; 3]; 3];
        assert!(select_scales(&cross, &[0.0; 3], &params(0, 1, 1)).is_err());
        assert!(select_scales(&cross, &[0.0; 2], &params(1, 1, 1)).is_err());
        assert!(select_scales(&[vec![0.0; 3], vec![0.0; 2]], &[0.0; 2], &params(1, 1, 1)).is_err());
    }

    #[test]
    fn dip_with_high_borders() {
        // single low block at 2..=4; truncated pooling also dips at both ends
        let n = 7;
        let mut cross = vec![vec![1.0; n]; n];
        for i in 0..n {
            cross[i][i] = 0.0;
        }
        for a in 2..=4 {
            for b in 2..=4 {
                cross[a][b] = 0.0;
            }
        }
        let nvi_t = [0.0, 0.5, 0.5, 0.4, 0.1, 0.5, 0.0];
        let (sel, curve) = select_scales(&cross, &nvi_t, &params(3, 1, 1)).unwrap();
        assert_eq!(sel.minima, vec![0, 3, 6], "curve {curve:?}");
        assert_eq!(sel.basins, vec![(0, 1), (2, 4), (5, 6)]);
        assert_eq!(sel.selected, vec![0, 4, 6]);
        assert!(!sel.fallback);
    }

    #[test]
    fn three_blocks_hand_trace() {
        let n = 12;
        let cross: Vec<Vec<f64>> = (0..n)
            .map(|a| (0..n).map(|b| if a / 4 == b / 4 { 0.0 } else { 1.0 }).collect())
            .collect();
        // pooled diagonal (k = 3): 0 inside blocks, 4/9 at the block edges 3,4,7,8
        // smoothed (w = 1): [0, 0, 1/9, 1/3, 1/3, 1/9, 1/9, 1/3, 1/3, 1/9, 0, 0]
        let curve = block_nvi(&cross, &params(3, 1, 1)).unwrap();
        let third = 1.0 / 3.0;
        let ninth = 1.0 / 9.0;
        let expected = [0.0, 0.0, ninth, third, third, ninth, ninth, third, third, ninth, 0.0, 0.0];
        for (a, b) in curve.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{curve:?}");
        }
        let mut nvi_t = [0.5; 12];
        nvi_t[1] = 0.1;
        nvi_t[6] = 0.05;
        nvi_t[9] = 0.2;
        let (sel, _) = select_scales(&cross, &nvi_t, &params(3, 1, 1)).unwrap();
        assert_eq!(sel.minima, vec![0, 5, 10]);
        assert_eq!(sel.selected, vec![1, 6, 9]);
    }
}
