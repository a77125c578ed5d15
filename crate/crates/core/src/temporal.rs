//! Windowed activity series from timestamped events and robust spike
//! detection.

use std::collections::{BTreeSet, HashSet};
use std::io::BufRead;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

/// Scale that makes the MAD a consistent estimator of a normal sigma.
pub const MAD_SCALE: f64 = 1.4826;
pub const DEFAULT_Z_THRESHOLD: f64 = 3.0;
pub const MIN_WINDOWS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Event {
    pub time: i64,
    pub node: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventSeries {
    pub window_seconds: u64,
    pub t0: i64,
    /// Events per window, counting only filtered nodes when a filter is set.
    pub totals: Vec<u64>,
    /// Distinct filtered nodes active per window.
    pub actives: Vec<u64>,
}

impl EventSeries {
    pub fn num_windows(&self) -> usize {
        self.totals.len()
    }
}

/// Bins events into consecutive windows of `window_seconds` starting at the
/// earliest timestamp. The window span always covers every event, even the
/// ones the filter excludes.
pub fn bin_events(
    events: &[Event],
    window_seconds: u64,
    node_filter: Option<&BTreeSet<usize>>,
) -> Result<EventSeries> {
    if window_seconds == 0 {
        return Err(Error::InvalidParameter(
            "window must be at least 1 second".into(),
        ));
    }
    let (t0, t1) = match (
        events.iter().map(|e| e.time).min(),
        events.iter().map(|e| e.time).max(),
    ) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::EmptyInput),
    };
    let w = window_seconds as i64;
    let windows = ((t1 - t0) / w + 1) as usize;
    let mut totals = vec![0u64; windows];
    let mut seen: Vec<HashSet<usize>> = vec![HashSet::new(); windows];
    for e in events {
        if node_filter.is_some_and(|f| !f.contains(&e.node)) {
            continue;
        }
        let idx = ((e.time - t0) / w) as usize;
        totals[idx] += 1;
        seen[idx].insert(e.node);
    }
    Ok(EventSeries {
        window_seconds,
        t0,
        totals,
        actives: seen.iter().map(|s| s.len() as u64).collect(),
    })
}

/// Activity of a random node set the same size as `boundary`, drawn
/// without replacement from `all_nodes` minus `boundary`.
pub fn control_series(
    events: &[Event],
    boundary: &BTreeSet<usize>,
    all_nodes: &BTreeSet<usize>,
    window_seconds: u64,
    seed: u64,
) -> Result<(EventSeries, BTreeSet<usize>)> {
    let pool: Vec<usize> = all_nodes.difference(boundary).copied().collect();
    if boundary.len() > pool.len() || pool.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {} control nodes from {} non-boundary nodes",
            boundary.len(),
            pool.len()
        )));
    }
    let mut rng = rng::seeded(seed);
    let control: BTreeSet<usize> = pool
        .choose_multiple(&mut rng, boundary.len())
        .copied()
        .collect();
    let series = bin_events(events, window_seconds, Some(&control))?;
    Ok((series, control))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpikeReport {
    pub median: f64,
    pub mad: f64,
    pub spike_windows: Vec<usize>,
    /// Robust z per window; ±infinity where the MAD is zero and the window
    /// deviates from the median.
    pub zscores: Vec<f64>,
}

/// Upward spikes by robust z-score: z = (x − median) / (1.4826 · MAD).
/// When the MAD is zero every window above the median counts as a spike.
pub fn detect_spikes(series: &[f64], z_threshold: f64) -> Result<SpikeReport> {
    if series.len() < MIN_WINDOWS {
        return Err(Error::InvalidParameter(format!(
            "spike detection needs at least {MIN_WINDOWS} windows, got {}",
            series.len()
        )));
    }
    let med = median(series.to_vec());
    let mad = median(series.iter().map(|x| (x - med).abs()).collect());
    let scale = MAD_SCALE * mad;
    let zscores: Vec<f64> = series
        .iter()
        .map(|&x| {
            let d = x - med;
            if scale > 0.0 {
                d / scale
            } else if d > 0.0 {
                f64::INFINITY
            } else if d < 0.0 {
                f64::NEG_INFINITY
            } else {
                0.0
            }
        })
        .collect();
    let spike_windows = zscores
        .iter()
        .enumerate()
        .filter(|(_, &z)| z >= z_threshold)
        .map(|(i, _)| i)
        .collect();
    Ok(SpikeReport {
        median: med,
        mad,
        spike_windows,
        zscores,
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Reads `epoch_seconds,node_id` lines. A non-numeric first line is taken
/// as a header. Node labels are resolved through `resolve`.
pub fn load_events<R, F>(reader: R, mut resolve: F) -> Result<Vec<Event>>
where
    R: BufRead,
    F: FnMut(&str) -> usize,
{
    let mut events = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                found: fields.len(),
            });
        }
        let time = match fields[0].parse::<i64>() {
            Ok(t) => t,
            Err(_) if events.is_empty() && idx == 0 => continue,
            Err(_) => {
                return Err(Error::InvalidParameter(format!(
                    "line {}: bad timestamp {:?}",
                    idx + 1,
                    fields[0]
                )))
            }
        };
        events.push(Event {
            time,
            node: resolve(fields[1]),
        });
    }
    if events.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(time: i64, node: usize) -> Event {
        Event { time, node }
    }

    #[test]
    fn distinct_actives() {
        let events = [ev(0, 7), ev(10, 7), ev(20, 7)];
        let s = bin_events(&events, 60, Some(&BTreeSet::from([7]))).unwrap();
        assert_eq!((s.totals, s.actives), (vec![3], vec![1]));
    }

    #[test]
    fn empty_filter_spans_time() {
        let events = [ev(0, 1), ev(130, 2)];
        let s = bin_events(&events, 60, Some(&BTreeSet::new())).unwrap();
        assert_eq!(s.totals, vec![0, 0, 0]);
        assert_eq!(s.actives, vec![0, 0, 0]);
    }

    #[test]
    fn steady_stream() {
        let events: Vec<Event> = (0..600).map(|t| ev(t, (t % 13) as usize)).collect();
        let s = bin_events(&events, 60, None).unwrap();
        assert_eq!(s.totals, vec![60; 10]);
        assert_eq!(s.totals.iter().sum::<u64>(), 600);
    }

    #[test]
    fn unsorted_input_and_errors() {
        let s = bin_events(&[ev(100, 0), ev(0, 1)], 50, None).unwrap();
        assert_eq!(s.totals, vec![1, 0, 1]);
        assert!(matches!(bin_events(&[], 10, None), Err(Error::EmptyInput)));
        assert!(bin_events(&[ev(0, 0)], 0, None).is_err());
    }

    #[test]
    fn control_sampling() {
        let all: BTreeSet<usize> = (0..100).collect();
        let boundary: BTreeSet<usize> = (0..5).collect();
        let events: Vec<Event> = (0..100).map(|v| ev(v as i64, v)).collect();
        let (s, control) = control_series(&events, &boundary, &all, 10, 3).unwrap();
        assert_eq!(control.len(), 5);
        assert!(control.is_disjoint(&boundary));
        assert_eq!(s.totals.iter().sum::<u64>(), 5);
        let (_, again) = control_series(&events, &boundary, &all, 10, 3).unwrap();
        assert_eq!(control, again);

        assert!(control_series(&events, &all, &all, 10, 3).is_err());
    }

    #[test]
    fn constant_series_has_no_spikes() {
        let r = detect_spikes(&[5.0; 8], 3.0).unwrap();
        assert!(r.spike_windows.is_empty());
    }

    #[test]
    fn zero_mad_rule() {
        let r = detect_spikes(&[10.0, 10.0, 10.0, 100.0, 10.0, 10.0], 3.0).unwrap();
        assert_eq!(r.spike_windows, vec![3]);
    }

    #[test]
    fn robust_z() {
        let r = detect_spikes(&[8.0, 12.0, 9.0, 11.0, 10.0, 40.0, 9.0], 3.0).unwrap();
        assert_eq!((r.median, r.mad), (10.0, 1.0));
        assert_eq!(r.spike_windows, vec![5]);
        assert!((r.zscores[5] - 30.0 / 1.4826).abs() < 1e-12);
        assert!(detect_spikes(&[1.0; 4], 3.0).is_err());
    }

    #[test]
    fn event_file_parsing() {
        let text = "epoch_seconds,node_id\n10,a\n20, b\n";
        let mut names: Vec<String> = Vec::new();
        let events = load_events(text.as_bytes(), |s| {
            names.iter().position(|n| n == s).unwrap_or_else(|| {
                names.push(s.to_string());
                names.len() - 1
            })
        })
        .unwrap();
        assert_eq!(events, vec![ev(10, 0), ev(20, 1)]);
        assert!(load_events("x,y\n".as_bytes(), |_| 0).is_err());
        assert!(load_events("1,2,3\n".as_bytes(), |_| 0).is_err());
    }
}
