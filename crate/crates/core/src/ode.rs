//! Segmented Dormand-Prince 5(4) integration with continuous output.
//!
//! The integration interval is split at caller-supplied stops so that the
//! solution is hit exactly at those abscissae; between stops the solver's
//! continuous extension is used.

use std::cell::RefCell;

use ode_solvers::continuous_output_model::ContinuousOutputModel;
use ode_solvers::dop_shared::IntegrationError;
use ode_solvers::{Dopri5, SVector, System};

use crate::error::{Error, Result};

pub(crate) type State<const N: usize> = SVector<f64, N>;

struct Rhs<'a, const N: usize, F> {
    f: &'a F,
    failure: &'a RefCell<Option<Error>>,
}

impl<const N: usize, F> System<f64, State<N>> for Rhs<'_, N, F>
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    fn system(&self, x: f64, y: &State<N>, dy: &mut State<N>) {
        match (self.f)(x, y) {
            Ok(v) => *dy = v,
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                // poisons the error estimate so the step is rejected
                *dy = State::<N>::from_element(f64::NAN);
            }
        }
    }

    fn solout(&mut self, _x: f64, _y: &State<N>, _dy: &State<N>) -> bool {
        self.failure.borrow().is_some()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

pub(crate) struct Segmented<const N: usize> {
    /// `(start, end, model)` in increasing order.
    segments: Vec<(f64, f64, ContinuousOutputModel<f64, State<N>>)>,
    y0: State<N>,
    pub stats: StepStats,
}

impl<const N: usize> Segmented<N> {
    pub fn start(&self) -> f64 {
        self.segments.first().map_or(0.0, |s| s.0)
    }

    pub fn eval(&self, x: f64) -> Option<State<N>> {
        if x == self.start() {
            return Some(self.y0);
        }
        let i = self.segments.partition_point(|s| s.1 < x);
        let (a, b, model) = self.segments.get(i)?;
        if x < *a || x > *b {
            return None;
        }
        model.evaluate(x)
    }
}

/// Integrates `y' = f(x, y)` from `x0` through every stop (strictly
/// increasing, all greater than `x0`).
pub(crate) fn integrate<const N: usize, F>(
    f: &F,
    x0: f64,
    y0: State<N>,
    stops: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<Segmented<N>>
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    let mut out = Segmented {
        segments: Vec::with_capacity(stops.len()),
        y0,
        stats: StepStats::default(),
    };
    let (mut x, mut y) = (x0, y0);
    for &stop in stops {
        debug_assert!(stop > x);
        let failure = RefCell::new(None);
        let rhs = Rhs { f, failure: &failure };
        let mut solver = Dopri5::new(rhs, x, stop, stop - x, y, rtol, atol);
        let mut model = ContinuousOutputModel::new();
        let result = solver.integrate_with_continuous_output_model(&mut model);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let stats = match result {
            Ok(s) => s,
            Err(IntegrationError::StepSizeUnderflow { x })
            | Err(IntegrationError::MaxNumStepReached { x, .. })
            | Err(IntegrationError::StiffnessDetected { x }) => return Err(Error::StepSizeUnderflow { x }),
        };
        out.stats.accepted += stats.accepted_steps as u64;
        out.stats.rejected += stats.rejected_steps as u64;
        out.stats.evaluations += stats.num_eval as u64;
        let reached = *solver.x_out().last().unwrap_or(&x);
        if (reached - stop).abs() > 1e-12 * stop.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { x: reached });
        }
        y = *solver.y_out().last().expect("at least one accepted step");
        out.segments.push((x, stop, model));
        x = stop;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_through_stops() {
        let f = |_x: f64, y: &State<2>| Ok(State::<2>::new(y[1], -y[0]));
        let stops = [0.5, 1.0, 2.0, 3.0];
        let sol = integrate(&f, 0.0, State::<2>::new(0.0, 1.0), &stops, 1e-12, 1e-14).unwrap();
        for x in [0.0, 0.1, 0.5, 0.77, 1.0, 1.5, 2.0, 2.9, 3.0] {
            let s = sol.eval(x).unwrap();
            assert!((s[0] - x.sin()).abs() < 1e-10, "{x}");
            assert!((s[1] - x.cos()).abs() < 1e-10, "{x}");
        }
        assert!(sol.eval(3.1).is_none());
        assert!(sol.stats.accepted > 0);
    }

    #[test]
    fn rhs_failure_is_reported() {
        let f = |x: f64, y: &State<1>| {
            if x > 0.5 {
                Err(Error::NonnegativityViolated { x, value: -1.0 })
            } else {
                Ok(*y)
            }
        };
        let r = integrate(&f, 0.0, State::<1>::new(1.0), &[1.0], 1e-10, 1e-12);
        assert!(matches!(r, Err(Error::NonnegativityViolated { .. })));
    }

    #[test]
    fn blow_up_underflows() {
        // y' = y^2, y(0) = 1 blows up at x = 1
        let f = |_x: f64, y: &State<1>| Ok(State::<1>::new(y[0] * y[0]));
        let r = integrate(&f, 0.0, State::<1>::new(1.0), &[2.0], 1e-10, 1e-12);
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. })));
    }
}
