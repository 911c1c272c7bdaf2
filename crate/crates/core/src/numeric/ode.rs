//! Adaptive explicit Runge–Kutta integrators: Dormand–Prince 5(4) and
//! the Dormand–Prince 8(5) pair. The local error is measured in the max
//! norm, component by component, against `tol (1 + |y|)`.
//!
//! Output times are hit exactly (the step is clipped at each requested time)
//! so sampled trajectories never go through an interpolant.

use crate::error::{Error, Result};

mod dopri5 {
    pub const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    pub const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    // 5th minus embedded 4th order weights, the last entry acting on f(t+h, y_new)
    pub const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
}

mod dop853 {
    pub const C: [f64; 12] = [
        0.0,
        0.526001519587677318785587544488e-1,
        0.789002279381515978178381316732e-1,
        0.118350341907227396726757197510,
        0.281649658092772603273242802490,
        0.333333333333333333333333333333,
        0.25,
        0.307692307692307692307692307692,
        0.651282051282051282051282051282,
        0.6,
        0.857142857142857142857142857142,
        1.0,
    ];
    pub const A: [[f64; 12]; 13] = [
        [0.0; 12],
        [5.26001519587677318785587544488e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [2.95875854768068491816892993775e-2, 0.0, 8.87627564304205475450678981324e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [
            2.41365134159266685502369798665e-1,
            0.0,
            -8.84549479328286085344864962717e-1,
            9.24834003261792003115737966543e-1,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ],
        [
            3.7037037037037037037037037037e-2,
            0.0,
            0.0,
            1.70828608729473871279604482173e-1,
            1.25467687566822425016691814123e-1,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ],
        [
            3.7109375e-2,
            0.0,
            0.0,
            1.70252211019544039314978060272e-1,
            6.02165389804559606850219397283e-2,
            -1.7578125e-2,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ],
        [
            3.70920001185047927108779319836e-2,
            0.0,
            0.0,
            1.70383925712239993810214054705e-1,
            1.07262030446373284651809199168e-1,
            -1.53194377486244017527936158236e-2,
            8.27378916381402288758473766002e-3,
            0.0, 0.0, 0.0, 0.0, 0.0,
        ],
        [
            6.24110958716075717114429577812e-1,
            0.0,
            0.0,
            -3.36089262944694129406857109825,
            -8.68219346841726006818189891453e-1,
            2.75920996994467083049415600797e1,
            2.01540675504778934086186788979e1,
            -4.34898841810699588477366255144e1,
            0.0, 0.0, 0.0, 0.0,
        ],
        [
            4.77662536438264365890433908527e-1,
            0.0,
            0.0,
            -2.48811461997166764192642586468,
            -5.90290826836842996371446475743e-1,
            2.12300514481811942347288949897e1,
            1.52792336328824235832596922938e1,
            -3.32882109689848629194453265587e1,
            -2.03312017085086261358222928593e-2,
            0.0, 0.0, 0.0,
        ],
        [
            -9.3714243008598732571704021658e-1,
            0.0,
            0.0,
            5.18637242884406370830023853209,
            1.09143734899672957818500254654,
            -8.14978701074692612513997267357,
            -1.85200656599969598641566180701e1,
            2.27394870993505042818970056734e1,
            2.49360555267965238987089396762,
            -3.0467644718982195003823669022,
            0.0, 0.0,
        ],
        [
            2.27331014751653820792359768449,
            0.0,
            0.0,
            -1.05344954667372501984066689879e1,
            -2.00087205822486249909675718444,
            -1.79589318631187989172765950534e1,
            2.79488845294199600508499808837e1,
            -2.85899827713502369474065508674,
            -8.87285693353062954433549289258,
            1.23605671757943030647266201528e1,
            6.43392746015763530355970484046e-1,
            0.0,
        ],
        // 8th-order weights
        [
            5.42937341165687622380535766363e-2,
            0.0,
            0.0,
            0.0,
            0.0,
            4.45031289275240888144113950566,
            1.89151789931450038304281599044,
            -5.8012039600105847814672114227,
            3.1116436695781989440891606237e-1,
            -1.52160949662516078556178806805e-1,
            2.01365400804030348374776537501e-1,
            4.47106157277725905176885569043e-2,
        ],
    ];
    // 8th minus embedded 5th order weights
    pub const E5: [f64; 12] = [
        0.1312004499419488073250102996e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        -0.1225156446376204440720569753e1,
        -0.4957589496572501915214079952,
        0.1664377182454986536961530415e1,
        -0.3503288487499736816886487290,
        0.3341791187130174790297318841,
        0.8192320648511571246570742613e-1,
        -0.2235530786388629525884427845e-1,
    ];
}

/// Embedded Runge–Kutta pair used by [`Integrator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Dormand–Prince 5(4).
    Dopri5,
    /// Dormand–Prince 8(5).
    Dop853,
}

impl Method {
    fn error_exponent(self) -> f64 {
        match self {
            Method::Dopri5 => -1.0 / 5.0,
            Method::Dop853 => -1.0 / 8.0,
        }
    }
}

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Right-hand side `dy/dt = f(t, y)`; may fail when the state leaves the
/// domain of the vector field.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]>;
}

impl<const N: usize, F> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]> {
        self(t, y)
    }
}

/// Sampled solution. `stopped` is set when the caller's stop predicate fired
/// before the last requested output time.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub ts: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    pub stopped: bool,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub method: Method,
    /// Absolute and relative per-step tolerance.
    pub tol: f64,
    pub max_steps: usize,
}

impl Integrator {
    pub fn new(method: Method, tol: f64) -> Self {
        Self {
            method,
            tol,
            max_steps: 2_000_000,
        }
    }

    pub fn dopri5(tol: f64) -> Self {
        Self::new(Method::Dopri5, tol)
    }

    pub fn dop853(tol: f64) -> Self {
        Self::new(Method::Dop853, tol)
    }

    /// Integrates from `(t0, y0)` and records the state at every time of
    /// `t_out`, which must be monotone in one direction away from `t0`.
    /// `stop` is evaluated at every accepted step; returning `true` ends the
    /// run and the trajectory holds the outputs reached so far.
    pub fn solve<S, const N: usize>(
        &self,
        system: &S,
        t0: f64,
        y0: [f64; N],
        t_out: &[f64],
        mut stop: impl FnMut(f64, &[f64; N]) -> bool,
    ) -> Result<Trajectory<N>>
    where
        S: OdeSystem<N>,
    {
        let mut traj = Trajectory {
            ts: Vec::with_capacity(t_out.len()),
            ys: Vec::with_capacity(t_out.len()),
            stopped: false,
            steps: 0,
        };
        let mut t = t0;
        let mut y = y0;
        let mut h = None;
        for &target in t_out {
            if target == t {
                traj.ts.push(t);
                traj.ys.push(y);
                continue;
            }
            let mut stopped = false;
            let run = self.advance(system, t, y, target, h, |_, _, tn, yn| {
                stopped = stop(tn, yn);
                stopped
            })?;
            traj.steps += run.steps;
            t = run.t;
            y = run.y;
            h = Some(run.h);
            if stopped {
                traj.stopped = true;
                break;
            }
            traj.ts.push(t);
            traj.ys.push(y);
        }
        Ok(traj)
    }

    /// Integrates from `(t0, y0)` to `t_end`. `on_step(t_prev, y_prev, t, y)`
    /// sees every accepted step and can end the run early by returning `true`.
    pub fn advance<S, const N: usize>(
        &self,
        system: &S,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        h_init: Option<f64>,
        mut on_step: impl FnMut(f64, &[f64; N], f64, &[f64; N]) -> bool,
    ) -> Result<Advance<N>>
    where
        S: OdeSystem<N>,
    {
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let span = (t_end - t0).abs();
        let mut t = t0;
        let mut y = y0;
        if span == 0.0 {
            return Ok(Advance {
                t,
                y,
                h: h_init.unwrap_or(0.0),
                steps: 0,
            });
        }
        let mut k1 = system.rhs(t, &y)?;
        let mut h = match h_init {
            Some(h) if h > 0.0 => h.min(span),
            _ => self.initial_step(&y, &k1, span),
        };
        let mut steps = 0usize;
        let mut last_rejected = false;

        loop {
            let remaining = (t_end - t) * dir;
            if remaining <= 0.0 {
                break;
            }
            if steps >= self.max_steps {
                return Err(Error::StepLimit {
                    t,
                    max_steps: self.max_steps,
                });
            }
            // land exactly on t_end instead of leaving a sliver behind
            let clipped = h >= remaining * (1.0 - 1e-10);
            let step = if clipped { remaining } else { h };
            if step <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t, step });
            }
            let hs = dir * step;

            let (y_new, k7, err) = self.stage(system, t, &y, &k1, hs)?;
            steps += 1;
            if err <= 1.0 {
                let t_new = if clipped { t_end } else { t + hs };
                let y_prev = y;
                let t_prev = t;
                t = t_new;
                y = y_new;
                k1 = k7;
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(self.method.error_exponent())).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                let factor = if last_rejected { factor.min(1.0) } else { factor };
                last_rejected = false;
                if !clipped || factor < 1.0 {
                    h = step * factor;
                }
                if on_step(t_prev, &y_prev, t, &y) {
                    break;
                }
            } else {
                last_rejected = true;
                h = step * (SAFETY * err.powf(self.method.error_exponent())).clamp(MIN_FACTOR, 1.0);
            }
        }
        Ok(Advance { t, y, h, steps })
    }

    fn initial_step<const N: usize>(&self, y: &[f64; N], f: &[f64; N], span: f64) -> f64 {
        let scale = |v: f64, r: f64| v / (self.tol + self.tol * r.abs());
        let d0 = rms(y.iter().zip(y).map(|(&v, &r)| scale(v, r)));
        let d1 = rms(f.iter().zip(y).map(|(&v, &r)| scale(v, r)));
        let h = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h.min(span)
    }

    /// One trial step; returns the new state, `f(t+h, y_new)` and the
    /// scaled error norm.
    #[allow(clippy::type_complexity)]
    fn stage<S, const N: usize>(
        &self,
        system: &S,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> Result<([f64; N], [f64; N], f64)>
    where
        S: OdeSystem<N>,
    {
        let (y_new, k_last, err) = match self.method {
            Method::Dopri5 => {
                let (ks, y_new) = explicit_stages::<S, N, 7, 6>(system, t, y, k1, h, &dopri5::C, &dopri5::A)?;
                let k_last = system.rhs(t + h, &y_new)?;
                let mut worst = 0.0f64;
                for i in 0..N {
                    let mut e = dopri5::E[6] * k_last[i];
                    for (s, k) in ks.iter().enumerate().take(6) {
                        e += dopri5::E[s] * k[i];
                    }
                    let sc = self.tol + self.tol * y[i].abs().max(y_new[i].abs());
                    // max norm: every component meets the tolerance on every step
                    worst = worst.max((h * e / sc).abs());
                }
                (y_new, k_last, worst)
            }
            Method::Dop853 => {
                let (ks, y_new) = explicit_stages::<S, N, 13, 12>(system, t, y, k1, h, &dop853::C, &dop853::A)?;
                let k_last = system.rhs(t + h, &y_new)?;
                // max norm of the 5th-order embedded error estimate
                let mut worst = 0.0f64;
                for i in 0..N {
                    let mut e5 = 0.0;
                    for s in 0..12 {
                        e5 += dop853::E5[s] * ks[s][i];
                    }
                    let sc = self.tol + self.tol * y[i].abs().max(y_new[i].abs());
                    worst = worst.max((h * e5 / sc).abs());
                }
                let err = worst;
                (y_new, k_last, err)
            }
        };
        if !err.is_finite() {
            // treat overflow as a rejected step
            return Ok((y_new, k_last, f64::INFINITY));
        }
        Ok((y_new, k_last, err))
    }
}

/// Evaluates the `S - 1` stages of an explicit tableau whose last row holds
/// the propagating weights; returns the stage derivatives and the new state.
#[allow(clippy::type_complexity)]
fn explicit_stages<S, const N: usize, const R: usize, const S1: usize>(
    system: &S,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    c: &[f64],
    a: &[[f64; S1]; R],
) -> Result<(Vec<[f64; N]>, [f64; N])>
where
    S: OdeSystem<N>,
{
    let combine = |row: &[f64; S1], ks: &[[f64; N]]| {
        let mut out = *y;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (w, k) in row.iter().zip(ks) {
                acc += w * k[i];
            }
            *o += h * acc;
        }
        out
    };
    let mut ks: Vec<[f64; N]> = Vec::with_capacity(S1);
    ks.push(*k1);
    for s in 1..S1 {
        let ys = combine(&a[s], &ks);
        ks.push(system.rhs(t + c[s] * h, &ys)?);
    }
    let y_new = combine(&a[R - 1], &ks);
    Ok((ks, y_new))
}

/// Final state of [`Integrator::advance`] and the step size to continue with.
#[derive(Debug, Clone, Copy)]
pub struct Advance<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub h: f64,
    pub steps: usize,
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let mut n = 0usize;
    let mut s = 0.0;
    for v in values {
        s += v * v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        (s / n as f64).sqrt()
    }
}
