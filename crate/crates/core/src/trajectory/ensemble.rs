use std::f64::consts::PI;
use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use super::{simulate, AtomState, SimConfig};
use crate::error::{Error, Result};
use crate::state::{BlochVector, UNIT_TOLERANCE};

/// Trajectories per work unit. Fixed so that partial sums, and therefore
/// the final statistics, do not depend on how many workers run.
const BLOCK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub step: usize,
    pub gamma_t: f64,
    pub mean: BlochVector,
    pub variance: BlochVector,
    pub std_err: BlochVector,
    /// Variance of the polar angle in the `s_x, s_z` plane, measured from the
    /// target angle. `None` once any trajectory leaves `s_y = 0`.
    pub angle_var: Option<f64>,
    /// Mean of `|⟨target|ψ⟩|²`.
    pub fidelity: f64,
    /// `(1 + |⟨s⟩|²)/2`.
    pub purity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub trajectories: usize,
    pub target: BlochVector,
    pub rows: Vec<StatsRow>,
}

impl EnsembleStats {
    pub fn row(&self, step: usize) -> Option<&StatsRow> {
        self.rows
            .binary_search_by_key(&step, |r| r.step)
            .ok()
            .map(|i| &self.rows[i])
    }
}

pub fn angle_variance(stats: &EnsembleStats, step: usize) -> Result<f64> {
    let row = stats
        .row(step)
        .ok_or_else(|| Error::InvalidArgument(format!("step {step} was not recorded")))?;
    row.angle_var
        .ok_or_else(|| Error::Domain(format!("ensemble left the s_y = 0 plane by step {step}")))
}

/// Running mean and sum of squared deviations. Merging is order sensitive
/// only through rounding, and identical samples give exactly zero spread.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, other.n as f64, n as f64);
        self.mean += d * (nb / nf);
        self.m2 += other.m2 + d * d * (na * nb / nf);
        self.n = n;
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct RowAcc {
    x: Moments,
    y: Moments,
    z: Moments,
    angle: Moments,
    fidelity: Moments,
    max_abs_y: f64,
}

impl RowAcc {
    fn push(&mut self, s: &BlochVector, target: &BlochVector, theta_bar: f64) {
        self.x.push(s.x);
        self.y.push(s.y);
        self.z.push(s.z);
        self.angle.push(wrap(s.x.atan2(s.z) - theta_bar));
        self.fidelity.push(fidelity(s, target));
        self.max_abs_y = self.max_abs_y.max(s.y.abs());
    }

    fn merge(&mut self, other: &RowAcc) {
        self.x.merge(&other.x);
        self.y.merge(&other.y);
        self.z.merge(&other.z);
        self.angle.merge(&other.angle);
        self.fidelity.merge(&other.fidelity);
        self.max_abs_y = self.max_abs_y.max(other.max_abs_y);
    }
}

fn wrap(angle: f64) -> f64 {
    if angle > PI {
        angle - 2.0 * PI
    } else if angle <= -PI {
        angle + 2.0 * PI
    } else {
        angle
    }
}

/// Pure-state fidelity `(1 + s·t)/2`, evaluated as `1 - |s - t|²/4` so that
/// coinciding vectors give exactly 1.
pub(crate) fn fidelity(s: &BlochVector, target: &BlochVector) -> f64 {
    1.0 - (*s - *target).norm_sqr() / 4.0
}

fn run_block(cfg: &SimConfig, indices: Range<usize>, n_rows: usize) -> Result<Vec<RowAcc>> {
    let target = cfg.law.target();
    let theta_bar = cfg.law.theta_bar().theta();
    let mut acc = vec![RowAcc::default(); n_rows];
    for index in indices {
        let mut row = 0;
        simulate(cfg, index as u64, |_, atom: &AtomState, _| {
            acc[row].push(&atom.bloch(), &target, theta_bar);
            row += 1;
        })?;
    }
    Ok(acc)
}

pub fn run_ensemble(cfg: &SimConfig) -> Result<EnsembleStats> {
    run_ensemble_with(cfg, Execution::default())
}

/// Runs `cfg.trajectories` trajectories and aggregates them. The result is
/// bitwise identical for every [`Execution`] and any worker count.
pub fn run_ensemble_with(cfg: &SimConfig, execution: Execution) -> Result<EnsembleStats> {
    cfg.validate()?;
    if cfg.trajectories < 2 {
        return Err(Error::InvalidArgument(
            "an ensemble needs at least 2 trajectories".into(),
        ));
    }
    let steps = cfg.recorded_steps();
    let blocks: Vec<Range<usize>> = (0..cfg.trajectories)
        .step_by(BLOCK)
        .map(|start| start..(start + BLOCK).min(cfg.trajectories))
        .collect();

    let partials: Vec<Result<Vec<RowAcc>>> = match execution {
        Execution::Sequential => blocks
            .iter()
            .map(|b| run_block(cfg, b.clone(), steps.len()))
            .collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => blocks
            .par_iter()
            .map(|b| run_block(cfg, b.clone(), steps.len()))
            .collect(),
    };

    let mut total = vec![RowAcc::default(); steps.len()];
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial?.iter()) {
            t.merge(p);
        }
    }

    let n = cfg.trajectories as f64;
    let gamma_tau = cfg.homodyne.gamma_tau();
    let rows = steps
        .iter()
        .zip(total.iter())
        .map(|(&step, acc)| {
            let mean = BlochVector::new(acc.x.mean, acc.y.mean, acc.z.mean);
            let variance = BlochVector::new(acc.x.variance(), acc.y.variance(), acc.z.variance());
            let std_err = BlochVector::new(
                (variance.x / n).sqrt(),
                (variance.y / n).sqrt(),
                (variance.z / n).sqrt(),
            );
            StatsRow {
                step,
                gamma_t: step as f64 * gamma_tau,
                mean,
                variance,
                std_err,
                angle_var: (acc.max_abs_y <= UNIT_TOLERANCE).then(|| acc.angle.variance()),
                fidelity: acc.fidelity.mean,
                purity: ((1.0 + mean.norm_sqr()) / 2.0).min(1.0),
            }
        })
        .collect();

    Ok(EnsembleStats {
        trajectories: cfg.trajectories,
        target: cfg.law.target(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::FeedbackLaw;
    use crate::homodyne::{HomodyneConfig, Mode};

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100)
            .map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.0)
            .collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..40].iter().for_each(|&x| a.push(x));
        xs[40..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean - whole.mean).abs() < 1e-14);
        assert!((a.variance() - whole.variance()).abs() < 1e-13);
    }

    #[test]
    fn identical_samples_have_zero_spread() {
        let mut a = Moments::default();
        for _ in 0..7 {
            a.push(0.123_456_789_012_345_67);
        }
        let mut b = a;
        b.merge(&a);
        assert_eq!(b.variance(), 0.0);
        assert_eq!(b.mean, 0.123_456_789_012_345_67);
    }

    #[test]
    fn ground_ensemble_is_frozen() {
        let cfg = SimConfig {
            steps: 200,
            trajectories: 40,
            ..SimConfig::new(
                HomodyneConfig::default().with_mode(Mode::FirstOrder),
                FeedbackLaw::disabled(PI).unwrap(),
                BlochVector::GROUND,
            )
        };
        let stats = run_ensemble(&cfg).unwrap();
        for row in &stats.rows {
            assert_eq!(row.mean, BlochVector::GROUND);
            assert_eq!(row.variance, BlochVector::ZERO);
            assert_eq!(row.fidelity, 1.0);
            assert_eq!(row.purity, 1.0);
        }
    }

    #[test]
    fn single_trajectory_rejected() {
        let cfg = SimConfig {
            trajectories: 1,
            ..SimConfig::new(
                HomodyneConfig::default(),
                FeedbackLaw::disabled(PI).unwrap(),
                BlochVector::GROUND,
            )
        };
        assert!(run_ensemble(&cfg).is_err());
    }

    #[test]
    fn angle_variance_domain() {
        let cfg = SimConfig {
            steps: 20,
            trajectories: 8,
            record_stride: 10,
            ..SimConfig::new(
                HomodyneConfig::default(),
                FeedbackLaw::disabled(PI).unwrap(),
                BlochVector::new(0.0, 1.0, 0.0),
            )
        };
        let stats = run_ensemble(&cfg).unwrap();
        assert!(matches!(angle_variance(&stats, 10), Err(Error::Domain(_))));
        assert!(matches!(
            angle_variance(&stats, 11),
            Err(Error::InvalidArgument(_))
        ));
    }
}
