//! Dormand–Prince 5(4) with PI step control and 4th-order dense output.

use serde::Serialize;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller constants
const BETA: f64 = 0.04;
const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Clone, Debug, Serialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
    pub h_max: f64,
    pub max_steps: u64,
    /// `‖x‖∞` beyond which the solution is declared divergent.
    pub divergence_norm: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-9,
            atol: 1e-12,
            h0: None,
            h_max: f64::INFINITY,
            max_steps: 200_000_000,
            divergence_norm: 1e12,
        }
    }
}

impl IntegratorOptions {
    /// Defaults with `rtol` tightened for states far from the origin:
    /// `min(1e-9, 1e-3 / max(1, ‖x0‖∞))`, so the absolute local error stays
    /// well below the attractor's own size when coordinates are translated
    /// by large offsets.
    pub fn scaled_for(x0: &[f64]) -> Self {
        let norm = x0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        IntegratorOptions { rtol: (1e-3 / norm).min(1e-9), ..Default::default() }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum StopReason {
    /// `‖x‖∞` exceeded the divergence threshold or became non-finite.
    Blowup,
    StepUnderflow,
    MaxSteps,
}

#[derive(Clone, Debug, Serialize)]
pub struct Divergence {
    pub t: f64,
    pub reason: StopReason,
    pub last_state: Vec<f64>,
}

/// Autonomous right-hand side `dy = f(y)`.
pub trait Rhs {
    fn dim(&self) -> usize;
    fn eval(&mut self, y: &[f64], dy: &mut [f64]);
}

impl<F: FnMut(&[f64], &mut [f64])> Rhs for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }

    fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
        (self.1)(y, dy)
    }
}

/// Stateful stepper: keeps its step size between calls to `advance`.
pub struct Dopri5<R: Rhs> {
    rhs: R,
    pub opts: IntegratorOptions,
    t: f64,
    y: Vec<f64>,
    h: f64,
    fac_old: f64,
    k: [Vec<f64>; 7],
    y1: Vec<f64>,
    ytmp: Vec<f64>,
    cont: [Vec<f64>; 5],
    pub stats: StepStats,
    pub min_component: f64,
    // components from `split` on use `tail_tol` (rtol, atol) instead of `opts`
    split: usize,
    tail_tol: (f64, f64),
}

impl<R: Rhs> Dopri5<R> {
    pub fn new(mut rhs: R, y0: &[f64], opts: IntegratorOptions) -> Self {
        let n = rhs.dim();
        assert_eq!(y0.len(), n, "initial state has the wrong dimension");
        let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
        rhs.eval(y0, &mut k[0]);
        let mut s = Dopri5 {
            rhs,
            opts,
            t: 0.0,
            y: y0.to_vec(),
            h: 0.0,
            fac_old: 1e-4,
            k,
            y1: vec![0.0; n],
            ytmp: vec![0.0; n],
            cont: std::array::from_fn(|_| vec![0.0; n]),
            stats: StepStats { evaluations: 1, ..Default::default() },
            min_component: y0.iter().copied().fold(f64::INFINITY, f64::min),
            split: n,
            tail_tol: (0.0, 0.0),
        };
        s.h = match s.opts.h0 {
            Some(h) => h,
            None => s.initial_step(),
        };
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Overwrite the state (keeps the step size); used between windows.
    pub fn reset_state(&mut self, y: &[f64]) {
        self.y.copy_from_slice(y);
        let (rhs, k) = (&mut self.rhs, &mut self.k);
        rhs.eval(&self.y, &mut k[0]);
        self.stats.evaluations += 1;
    }

    fn sc(&self, a: f64, b: f64) -> f64 {
        self.opts.atol + self.opts.rtol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self) -> f64 {
        let n = self.y.len();
        let (mut d0, mut d1) = (0.0f64, 0.0f64);
        for i in 0..n {
            let sc = self.sc(self.y[i], self.y[i]);
            d0 += (self.y[i] / sc).powi(2);
            d1 += (self.k[0][i] / sc).powi(2);
        }
        let (d0, d1) = ((d0 / n as f64).sqrt(), (d1 / n as f64).sqrt());
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(self.opts.h_max);
        for i in 0..n {
            self.ytmp[i] = self.y[i] + h0 * self.k[0][i];
        }
        let (rhs, ytmp, k1) = (&mut self.rhs, &self.ytmp, &mut self.k[1]);
        rhs.eval(ytmp, k1);
        self.stats.evaluations += 1;
        let mut d2 = 0.0f64;
        for i in 0..n {
            let sc = self.sc(self.y[i], self.y[i]);
            d2 += ((self.k[1][i] - self.k[0][i]) / sc).powi(2);
        }
        let d2 = (d2 / n as f64).sqrt() / h0;
        let m = d1.max(d2);
        let h1 = if m <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / m).powf(0.2) };
        (100.0 * h0).min(h1).min(self.opts.h_max)
    }

    /// One attempted step of size `h`; returns the scaled error.
    fn try_step(&mut self, h: f64) -> f64 {
        let n = self.y.len();
        let y = &self.y;
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let ytmp = &mut self.ytmp;
        let rhs = &mut self.rhs;
        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        rhs.eval(ytmp, k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs.eval(ytmp, k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs.eval(ytmp, k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs.eval(ytmp, k5);
        for i in 0..n {
            ytmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs.eval(ytmp, k6);
        let y1 = &mut self.y1;
        for i in 0..n {
            y1[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        rhs.eval(y1, k7);
        self.stats.evaluations += 6;
        let mut err = 0.0f64;
        for i in 0..n {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let (rtol, atol) =
                if i < self.split { (self.opts.rtol, self.opts.atol) } else { self.tail_tol };
            let sc = atol + rtol * y[i].abs().max(y1[i].abs());
            err = err.max((e / sc).abs());
        }
        if err.is_nan() {
            f64::INFINITY
        } else {
            err
        }
    }

    fn prepare_dense(&mut self, h: f64) {
        let n = self.y.len();
        let [k1, _, k3, k4, k5, k6, k7] = &self.k;
        for i in 0..n {
            let ydiff = self.y1[i] - self.y[i];
            let bspl = h * k1[i] - ydiff;
            self.cont[0][i] = self.y[i];
            self.cont[1][i] = ydiff;
            self.cont[2][i] = bspl;
            self.cont[3][i] = ydiff - h * k7[i] - bspl;
            self.cont[4][i] =
                h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
    }

    fn dense(&self, theta: f64, out: &mut [f64]) {
        let t1 = 1.0 - theta;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.cont[0][i]
                + theta
                    * (self.cont[1][i]
                        + t1 * (self.cont[2][i] + theta * (self.cont[3][i] + t1 * self.cont[4][i])));
        }
    }

    /// Integrate up to exactly `t_end`, reporting interpolated states at the
    /// requested (increasing) `samples` that fall in `(t, t_end]`.
    pub fn advance<S: FnMut(f64, &[f64])>(
        &mut self,
        t_end: f64,
        samples: &[f64],
        mut on_sample: S,
    ) -> Result<(), Divergence> {
        let mut next = samples.iter().position(|&s| s > self.t).unwrap_or(samples.len());
        let mut last_rejected = false;
        let mut buf = vec![0.0; self.y.len()];
        while self.t < t_end {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(self.diverged(StopReason::MaxSteps));
            }
            let remaining = t_end - self.t;
            let mut h = self.h.min(self.opts.h_max);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            if h.abs() <= 10.0 * f64::EPSILON * self.t.abs().max(1.0) {
                return Err(self.diverged(StopReason::StepUnderflow));
            }
            let err = self.try_step(h);
            let fac11 = err.powf(0.2 - BETA * 0.75);
            if err <= 1.0 {
                let mut fac = fac11 / self.fac_old.powf(BETA);
                fac = (fac / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                self.fac_old = err.max(1e-4);
                if last_rejected {
                    h_new = h_new.min(h);
                }
                last_rejected = false;
                self.stats.accepted += 1;
                let t_new = if last { t_end } else { self.t + h };
                if next < samples.len() && samples[next] <= t_new {
                    self.prepare_dense(h);
                    while next < samples.len() && samples[next] <= t_new {
                        let theta = ((samples[next] - self.t) / h).clamp(0.0, 1.0);
                        self.dense(theta, &mut buf);
                        on_sample(samples[next], &buf);
                        next += 1;
                    }
                }
                std::mem::swap(&mut self.y, &mut self.y1);
                let (k0, rest) = self.k.split_at_mut(1);
                std::mem::swap(&mut k0[0], &mut rest[5]);
                self.t = t_new;
                // keep the controller's proposal even when the last step was clipped
                if !last || h_new < self.h {
                    self.h = h_new;
                }
                let mut norm = 0.0f64;
                let mut finite = true;
                for v in &self.y {
                    finite &= v.is_finite();
                    norm = norm.max(v.abs());
                    self.min_component = self.min_component.min(*v);
                }
                if !finite || norm > self.opts.divergence_norm {
                    return Err(self.diverged(StopReason::Blowup));
                }
            } else {
                last_rejected = true;
                self.stats.rejected += 1;
                self.h = h / (fac11 / SAFE).min(1.0 / FAC_MIN);
                if !self.h.is_finite() || self.h <= 0.0 {
                    return Err(self.diverged(StopReason::StepUnderflow));
                }
            }
        }
        Ok(())
    }

    /// Use `(rtol, atol)` for components `from..`; the step size is still
    /// controlled by one norm over all components.
    pub fn set_tail_tolerances(&mut self, from: usize, rtol: f64, atol: f64) {
        self.split = from.min(self.y.len());
        self.tail_tol = (rtol, atol);
    }

    fn diverged(&self, reason: StopReason) -> Divergence {
        Divergence { t: self.t, reason, last_state: self.y.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> (usize, impl FnMut(&[f64], &mut [f64])) {
        (1usize, |y: &[f64], dy: &mut [f64]| dy[0] = -y[0])
    }

    #[test]
    fn scaled_tolerance() {
        assert_eq!(IntegratorOptions::scaled_for(&[5.0, -5.0]).rtol, 1e-9);
        assert_eq!(IntegratorOptions::scaled_for(&[0.0, -4e9]).rtol, 1e-3 / 4e9);
    }

    #[test]
    fn exponential_decay() {
        let mut s = Dopri5::new(decay(), &[1.0], IntegratorOptions::default());
        s.advance(1.0, &[], |_, _| {}).unwrap();
        assert_eq!(s.t(), 1.0);
        assert!((s.y()[0] - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn dense_output_is_accurate() {
        let opts = IntegratorOptions { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        let mut s = Dopri5::new(decay(), &[1.0], opts);
        let times: Vec<f64> = (1..=50).map(|k| k as f64 * 0.1).collect();
        let mut worst = 0.0f64;
        s.advance(5.0, &times, |t, y| worst = worst.max((y[0] - (-t).exp()).abs())).unwrap();
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let rhs = (2usize, |y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        });
        let mut s = Dopri5::new(rhs, &[1.0, 0.0], IntegratorOptions::default());
        s.advance(100.0, &[], |_, _| {}).unwrap();
        assert!((s.y()[0] - 100f64.cos()).abs() < 1e-6);
    }

    #[test]
    fn blowup_is_reported() {
        let rhs = (1usize, |y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0]);
        let mut s = Dopri5::new(rhs, &[1.0], IntegratorOptions::default());
        let e = s.advance(2.0, &[], |_, _| {}).unwrap_err();
        assert!(e.t < 1.0 + 1e-6);
        assert!(matches!(e.reason, StopReason::Blowup | StopReason::StepUnderflow));
    }

    #[test]
    fn windows_chain() {
        let mut s = Dopri5::new(decay(), &[1.0], IntegratorOptions::default());
        for w in 1..=10 {
            s.advance(w as f64 * 0.3, &[], |_, _| {}).unwrap();
        }
        assert!((s.y()[0] - (-3.0f64).exp()).abs() < 1e-10);
    }
}
