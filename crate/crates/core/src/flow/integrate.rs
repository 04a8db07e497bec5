use super::rhs::rhs;
use super::series::{TimeSeries, TraceRow};
use super::{FlowError, FlowProblem, FlowState};
use crate::conformal::dirichlet_energy;
use crate::mesh::FaceId;
use crate::scalar::Real;

/// One classical Runge–Kutta step of `du/dt = f(t, u)`.
///
/// Stages are evaluated at `t`, `t + h/2`, `t + h/2`, `t + h`; any stage
/// error aborts the step.
pub fn rk4_step<T, E, F>(t: f64, u: &[T], h: f64, mut f: F) -> Result<Vec<T>, E>
where
    T: Real,
    F: FnMut(f64, &[T]) -> Result<Vec<T>, E>,
{
    let ht = T::lit(h);
    let half = T::lit(0.5);
    let axpy = |k: &[T], s: T| -> Vec<T> { u.iter().zip(k).map(|(&x, &d)| x + s * d).collect() };
    let k1 = f(t, u)?;
    let k2 = f(t + 0.5 * h, &axpy(&k1, half * ht))?;
    let k3 = f(t + 0.5 * h, &axpy(&k2, half * ht))?;
    let k4 = f(t + h, &axpy(&k3, ht))?;
    let two = T::lit(2.0);
    let sixth = ht / T::lit(6.0);
    Ok((0..u.len())
        .map(|i| u[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
        .collect())
}

/// Advances `s` by `h`. Pinned vertices keep their values bit-for-bit.
pub fn step<T: Real>(
    p: &FlowProblem<T>,
    s: &FlowState<T>,
    h: f64,
) -> Result<FlowState<T>, FlowError> {
    if !(h > 0.0 && h.is_finite()) || s.t + h == s.t {
        return Err(FlowError::StepUnderflow { h, t: s.t });
    }
    let mut next = rk4_step(s.t, &s.u, h, |t, u| rhs(p, u, t))?;
    for v in 0..next.len() {
        if p.is_pinned(v) {
            next[v] = s.u[v];
        }
    }
    FlowState::new(p, s.t + h, next)
}

/// Integration controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// Fixed step size.
    pub h: f64,
    pub t_max: f64,
    /// Record every `sample_stride`-th step (the first and last states are always recorded).
    pub sample_stride: usize,
    /// Stop once `sup |K|` over free vertices drops below this; `0` disables.
    pub stop_tol: f64,
    /// Keep a copy of `u` at every sample.
    pub record_fields: bool,
    /// Vertices whose `u` and `K` are written to the per-vertex trace.
    pub trace: Vec<usize>,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            h: 1e-2,
            t_max: 10.0,
            sample_stride: 1,
            stop_tol: 1e-6,
            record_fields: false,
            trace: Vec::new(),
        }
    }
}

impl Schedule {
    pub fn new(h: f64, t_max: f64) -> Self {
        Schedule {
            h,
            t_max,
            ..Default::default()
        }
    }

    pub fn stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn stop_tol(mut self, tol: f64) -> Self {
        self.stop_tol = tol;
        self
    }

    pub fn with_fields(mut self) -> Self {
        self.record_fields = true;
        self
    }

    pub fn trace(mut self, vertices: Vec<usize>) -> Self {
        self.trace = vertices;
        self
    }

    fn validate(&self, n: usize) -> Result<(), FlowError> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(FlowError::InvalidSchedule(format!(
                "step size must be positive, got {}",
                self.h
            )));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(FlowError::InvalidSchedule(format!(
                "t_max must be finite and nonnegative, got {}",
                self.t_max
            )));
        }
        if self.sample_stride == 0 {
            return Err(FlowError::InvalidSchedule(
                "sample stride must be positive".into(),
            ));
        }
        if !(self.stop_tol >= 0.0) {
            return Err(FlowError::InvalidSchedule(
                "stop tolerance must be nonnegative".into(),
            ));
        }
        if let Some(&v) = self.trace.iter().find(|&&v| v >= n) {
            return Err(FlowError::InvalidSchedule(format!(
                "trace vertex {v} not in mesh"
            )));
        }
        Ok(())
    }

    /// Number of steps and the time after step `k`; the last step is
    /// shortened to land exactly on `t_max`.
    fn grid(&self) -> (usize, impl Fn(usize) -> f64 + '_) {
        let n = (self.t_max / self.h - 1e-9).ceil().max(0.0) as usize;
        (n, move |k: usize| {
            if k >= n {
                self.t_max
            } else {
                k as f64 * self.h
            }
        })
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// `sup |K|` over free vertices fell below the stop tolerance.
    Converged {
        t: f64,
    },
    ReachedEnd,
    /// Standard variant only: a face degenerated during the step from
    /// `t_lo` to `t_hi`.
    Degenerated {
        face: FaceId,
        t_lo: f64,
        t_hi: f64,
    },
}

#[derive(Debug, Clone)]
pub struct FlowRun<T> {
    pub series: TimeSeries<T>,
    pub final_state: FlowState<T>,
    pub termination: Termination,
    pub steps: usize,
}

fn record<T: Real>(
    p: &FlowProblem<T>,
    s: &FlowState<T>,
    sched: &Schedule,
    series: &mut TimeSeries<T>,
) {
    let mesh = p.mesh();
    let (ndg, del) = s.margins(mesh);
    let l2 = s.u.iter().map(|&x| x * x).sum::<T>().sqrt();
    series.push(
        s.t,
        s.sup_free_curvature(p),
        l2,
        dirichlet_energy(mesh, &s.u),
        ndg,
        del,
    );
    if sched.record_fields {
        series.fields.get_or_insert_with(Vec::new).push(s.u.clone());
    }
    for &v in &sched.trace {
        series.traces.push(TraceRow {
            t: s.t,
            vertex: v,
            u: s.u[v],
            k: s.curvature.values[v],
        });
    }
}

/// Integrates `p` on a fixed grid and samples the time series.
///
/// A degeneration in the standard variant is not an `Err`: the run halts and
/// reports the bracketing times in [`Termination::Degenerated`], keeping the
/// series recorded so far.
pub fn integrate<T: Real>(p: &FlowProblem<T>, sched: &Schedule) -> Result<FlowRun<T>, FlowError> {
    sched.validate(p.mesh().num_vertices())?;
    let mut state = p.initial_state()?;
    let mut series = TimeSeries::default();
    record(p, &state, sched, &mut series);
    let converged = |s: &FlowState<T>| {
        sched.stop_tol > 0.0 && s.sup_free_curvature(p).to_f64_lossy() < sched.stop_tol
    };
    if converged(&state) {
        return Ok(FlowRun {
            series,
            final_state: state,
            termination: Termination::Converged { t: 0.0 },
            steps: 0,
        });
    }

    let (n, time_at) = sched.grid();
    let mut termination = Termination::ReachedEnd;
    let mut recorded_last = true;
    let mut steps = 0;
    for k in 0..n {
        let (t0, t1) = (time_at(k), time_at(k + 1));
        let next = match step(p, &state, t1 - t0) {
            Ok(mut s) => {
                s.t = t1;
                s
            }
            Err(FlowError::Degenerated { face, .. }) => {
                termination = Termination::Degenerated {
                    face,
                    t_lo: t0,
                    t_hi: t1,
                };
                break;
            }
            Err(e) => return Err(e),
        };
        state = next;
        steps += 1;
        recorded_last = false;
        if steps % sched.sample_stride == 0 {
            record(p, &state, sched, &mut series);
            recorded_last = true;
        }
        if converged(&state) {
            termination = Termination::Converged { t: state.t };
            break;
        }
    }
    if !recorded_last {
        record(p, &state, sched, &mut series);
    }
    Ok(FlowRun {
        series,
        final_state: state,
        termination,
        steps,
    })
}
