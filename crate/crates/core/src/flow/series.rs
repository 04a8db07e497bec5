use std::fmt::Write as _;

use crate::scalar::Real;

pub const SERIES_HEADER: &str = "t,sup_K,l2_u,dirichlet,ndg_margin,del_margin";
pub const TRACE_HEADER: &str = "t,vid,u,K";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<T> {
    pub t: f64,
    pub vertex: usize,
    pub u: T,
    pub k: T,
}

/// Sampled observables of one run. Sample times are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    pub times: Vec<f64>,
    /// `sup |K|` over free vertices.
    pub sup_k: Vec<T>,
    /// `‖u‖_{l²}` over all vertices.
    pub l2_u: Vec<T>,
    pub dirichlet: Vec<T>,
    pub ndg_margin: Vec<T>,
    pub del_margin: Vec<T>,
    /// Full `u` per sample, when requested by the schedule.
    pub fields: Option<Vec<Vec<T>>>,
    pub traces: Vec<TraceRow<T>>,
}

impl<T> Default for TimeSeries<T> {
    fn default() -> Self {
        TimeSeries {
            times: Vec::new(),
            sup_k: Vec::new(),
            l2_u: Vec::new(),
            dirichlet: Vec::new(),
            ndg_margin: Vec::new(),
            del_margin: Vec::new(),
            fields: None,
            traces: Vec::new(),
        }
    }
}

impl<T: Real> TimeSeries<T> {
    pub(crate) fn push(&mut self, t: f64, sup_k: T, l2: T, dirichlet: T, ndg: T, del: T) {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.times.push(t);
        self.sup_k.push(sup_k);
        self.l2_u.push(l2);
        self.dirichlet.push(dirichlet);
        self.ndg_margin.push(ndg);
        self.del_margin.push(del);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with header [`SERIES_HEADER`]; values use shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SERIES_HEADER}\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.times[i],
                self.sup_k[i],
                self.l2_u[i],
                self.dirichlet[i],
                self.ndg_margin[i],
                self.del_margin[i]
            );
        }
        out
    }

    /// Per-vertex trace CSV with header [`TRACE_HEADER`].
    pub fn traces_csv(&self) -> String {
        let mut out = format!("{TRACE_HEADER}\n");
        for r in &self.traces {
            let _ = writeln!(out, "{},{},{},{}", r.t, r.vertex, r.u, r.k);
        }
        out
    }
}
