//! Entanglement, drift monitoring, exact-vs-effective comparison and period
//! estimation.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dynamics::{evolve_states, HamiltonianKind, ObservableRecord, Observer, TimeGrid};
use crate::error::Error;
use crate::linalg::{
    hermitian_eigensystem, partial_trace, partial_transpose, trace_norm_hermitian, Complex64,
    ComplexMatrix, StateVector, Subsystem,
};
use crate::model::{EffectiveVariant, ModelSpec};

/// Tolerance for accepting a matrix as a density operator.
pub const DENSITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("not a two-qubit density matrix: {0}")]
    NotDensityMatrix(&'static str),
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("series too short or not oscillating above the noise floor")]
    NoOscillation,
    #[error("need at least two maxima to estimate a period, found {0}")]
    TooFewPeaks(usize),
}

/// `log₂ ‖ρ^{T_A}‖₁` for a 4×4 two-qubit density matrix, clamped at zero.
pub fn log_negativity(rho12: &ComplexMatrix) -> Result<f64, Error> {
    if rho12.rows() != 4 || rho12.cols() != 4 {
        return Err(AnalysisError::NotDensityMatrix("expected a 4x4 matrix").into());
    }
    if rho12.hermitian_asymmetry() > DENSITY_TOL {
        return Err(AnalysisError::NotDensityMatrix("not Hermitian").into());
    }
    if (rho12.trace() - Complex64::new(1.0, 0.0)).norm() > DENSITY_TOL {
        return Err(AnalysisError::NotDensityMatrix("trace differs from one").into());
    }
    let rho = (rho12 + &rho12.adjoint()).scale_real(0.5);
    if hermitian_eigensystem(&rho)?.values[0] < -DENSITY_TOL {
        return Err(AnalysisError::NotDensityMatrix("negative eigenvalue").into());
    }
    let pt = partial_transpose(&rho, (2, 2), Subsystem::A)?;
    Ok(libm::log2(trace_norm_hermitian(&pt)?).max(0.0))
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn state_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64, Error> {
    let sqrt_psd =
        |m: &ComplexMatrix| -> Result<ComplexMatrix, Error> {
            let h = (m + &m.adjoint()).scale_real(0.5);
            Ok(hermitian_eigensystem(&h)?
                .spectral_map(|l| Complex64::new(libm::sqrt(l.max(0.0)), 0.0)))
        };
    let root = sqrt_psd(rho)?;
    let inner = &(&root * sigma) * &root;
    let h = (&inner + &inner.adjoint()).scale_real(0.5);
    let tr: f64 = hermitian_eigensystem(&h)?
        .values
        .iter()
        .map(|&l| libm::sqrt(l.max(0.0)))
        .sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// Largest absolute drift of each conserved quantity from its `t = 0` value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub norm_drift: f64,
    /// `None` when the records carry no energies.
    pub energy_drift: Option<f64>,
    pub sz_drift: f64,
    pub s12_sq_drift: f64,
}

pub fn conservation_monitor(
    records: &[ObservableRecord],
) -> Result<ConservationReport, AnalysisError> {
    let first = records.first().ok_or(AnalysisError::EmptyTrajectory)?;
    let drift = |f: &dyn Fn(&ObservableRecord) -> f64| {
        let x0 = f(first);
        records
            .iter()
            .map(|r| (f(r) - x0).abs())
            .fold(0.0, f64::max)
    };
    let energy_drift = first.energy.map(|e0| {
        records
            .iter()
            .map(|r| r.energy.map_or(f64::INFINITY, |e| (e - e0).abs()))
            .fold(0.0, f64::max)
    });
    Ok(ConservationReport {
        norm_drift: drift(&|r| r.norm),
        energy_drift,
        sz_drift: drift(&|r| r.sz_total),
        s12_sq_drift: drift(&|r| r.s12_sq),
    })
}

/// Per-observable `max_t |exact − effective|`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableGaps {
    /// One entry per layout site.
    pub site_populations: Vec<f64>,
    pub p_up: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    pub log_negativity: f64,
    pub f2: f64,
}

impl ObservableGaps {
    fn absorb(&mut self, a: &ObservableRecord, b: &ObservableRecord) {
        if self.site_populations.is_empty() {
            self.site_populations = vec![0.0; a.site_populations.len()];
        }
        for (gap, (x, y)) in self
            .site_populations
            .iter_mut()
            .zip(a.site_populations.iter().zip(&b.site_populations))
        {
            *gap = gap.max((x - y).abs());
        }
        self.p_up = self.p_up.max((a.p_up - b.p_up).abs());
        self.f_plus = self.f_plus.max((a.f_plus - b.f_plus).abs());
        self.f_minus = self.f_minus.max((a.f_minus - b.f_minus).abs());
        self.log_negativity = self
            .log_negativity
            .max((a.log_negativity - b.log_negativity).abs());
        self.f2 = self.f2.max((a.f2 - b.f2).abs());
    }
}

/// How far the exact dynamics strays from an effective Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub eta_over_j: f64,
    pub variant: EffectiveVariant,
    /// `max_t (1 − F)`: pure-state overlap on the full space, or the Uhlmann
    /// fidelity of the three-spin reduced states for three-site spin-only
    /// variants.
    pub max_state_infidelity: f64,
    pub gaps: ObservableGaps,
    pub grid: TimeGrid,
}

pub fn compare_exact_effective(
    spec: &ModelSpec,
    variant: EffectiveVariant,
    initial: &StateVector,
    grid: &TimeGrid,
) -> Result<DeviationReport, Error> {
    let exact = evolve_states(spec, HamiltonianKind::Exact, initial, grid)?;
    let effective = evolve_states(spec, HamiltonianKind::Effective(variant), initial, grid)?;
    let layout = spec.layout()?;
    let observer = Observer::new(layout);
    let spin_reduced = spec.n_sites == 3 && variant.is_spin_only();
    let dims = layout.factor_dims();

    let mut infidelity: f64 = 0.0;
    let mut gaps = ObservableGaps::default();
    for (t, (a, b)) in grid.times().zip(exact.iter().zip(&effective)) {
        let fidelity = if spin_reduced {
            let ra = partial_trace(&a.density(), &dims, &[1, 2, 3])?;
            let rb = partial_trace(&b.density(), &dims, &[1, 2, 3])?;
            state_fidelity(&ra, &rb)?
        } else {
            a.inner(b).norm_sqr()
        };
        infidelity = infidelity.max((1.0 - fidelity).clamp(0.0, 1.0));
        gaps.absorb(&observer.observe(t, a)?, &observer.observe(t, b)?);
    }
    Ok(DeviationReport {
        eta_over_j: spec.eta_over_j(),
        variant,
        max_state_infidelity: infidelity,
        gaps,
        grid: *grid,
    })
}

/// Vertex of the parabola through three points.
fn parabola_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> f64 {
    let num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        x1
    } else {
        x1 - 0.5 * num / den
    }
}

/// Times of the main maxima of a sampled oscillation.
///
/// A maximum is the highest sample of an excursion above 60% of the
/// peak-to-peak range that later drops below 40%; small ripples riding on the
/// main oscillation are ignored. Excursions cut off by either end of the
/// series are skipped. Peak positions are refined by quadratic interpolation.
pub fn peak_times(series: &[(f64, f64)]) -> Result<Vec<f64>, AnalysisError> {
    if series.len() < 3 {
        return Err(AnalysisError::NoOscillation);
    }
    let (lo, hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| {
            (lo.min(y), hi.max(y))
        });
    let range = hi - lo;
    if range.is_nan() || range <= 1e-6 {
        return Err(AnalysisError::NoOscillation);
    }
    let upper = lo + 0.6 * range;
    let lower = lo + 0.4 * range;

    let mut peaks = Vec::new();
    // Index of the running maximum while inside an excursion.
    let mut current: Option<usize> = None;
    let mut truncated = series[0].1 > upper;
    for (i, &(_, y)) in series.iter().enumerate() {
        match current {
            None if y > upper => current = Some(i),
            Some(best) if y > series[best].1 => current = Some(i),
            Some(best) if y < lower => {
                if !truncated && best > 0 {
                    let at = |k: usize| series[k];
                    peaks.push(parabola_vertex(at(best - 1), at(best), at(best + 1)));
                }
                truncated = false;
                current = None;
            }
            _ => {}
        }
    }
    Ok(peaks)
}

/// Period of the two-level amplitude behind a population series.
///
/// A population `|α(t)|²` with `α ∝ sin(ωt)` peaks twice per amplitude cycle,
/// so the period returned is twice the mean spacing of successive maxima.
pub fn estimate_period(series: &[(f64, f64)]) -> Result<f64, AnalysisError> {
    let peaks = peak_times(series)?;
    if peaks.len() < 2 {
        return Err(AnalysisError::TooFewPeaks(peaks.len()));
    }
    let spacing = (peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64;
    Ok(2.0 * spacing)
}
