//! Time evolution, observables and closed-form two-level reference solutions.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::analysis::log_negativity;
use crate::error::Error;
use crate::linalg::{
    hermitian_eigensystem, partial_trace, phase, Complex64, ComplexMatrix, StateVector,
};
use crate::model::{
    build_effective_hamiltonian, build_hamiltonian, encode_state, mode_projector, BasisLayout,
    EffectiveVariant, HoppingMode, ModelError, ModelSpec, Spin, SpinOperatorSet, StaticPreset,
};

pub const DEFAULT_T_MAX: f64 = 30.0;
pub const DEFAULT_POINTS: usize = 2001;

/// Uniform sampling `t_k = t_max · k / (n_points − 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    n_points: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_points: usize) -> Result<Self, Error> {
        if n_points < 2 {
            return Err(Error::Grid("n_points must be at least 2"));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::Grid("t_max must be finite and positive"));
        }
        Ok(Self { t_max, n_points })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        self.t_max / (self.n_points - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_max * k as f64 / (self.n_points - 1) as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|k| self.time(k))
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_max: DEFAULT_T_MAX,
            n_points: DEFAULT_POINTS,
        }
    }
}

/// Which Hamiltonian drives a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianKind {
    Exact,
    Effective(EffectiveVariant),
}

impl HamiltonianKind {
    pub fn build(self, spec: &ModelSpec) -> Result<ComplexMatrix, ModelError> {
        match self {
            HamiltonianKind::Exact => build_hamiltonian(spec),
            HamiltonianKind::Effective(v) => build_effective_hamiltonian(spec, v),
        }
    }
}

/// Everything measured at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableRecord {
    pub t: f64,
    /// Probability of finding the mobile particle on each layout site.
    pub site_populations: Vec<f64>,
    pub p_up: f64,
    /// `⟨Ψ⁺|ρ₁₂|Ψ⁺⟩`
    pub f_plus: f64,
    /// `⟨Ψ⁻|ρ₁₂|Ψ⁻⟩`
    pub f_minus: f64,
    /// Log-negativity of `ρ₁₂` in ebits.
    pub log_negativity: f64,
    /// `⟨↓↑|ρ₁₂|↓↑⟩`
    pub f2: f64,
    pub sz_total: f64,
    pub s12_sq: f64,
    pub norm: f64,
    /// `⟨H⟩` for the Hamiltonian that generated the trajectory, if known.
    pub energy: Option<f64>,
}

/// Precomputed operators for turning states into [`ObservableRecord`]s.
#[derive(Debug, Clone)]
pub struct Observer {
    layout: BasisLayout,
    sz_total: ComplexMatrix,
    s12_sq: ComplexMatrix,
    hamiltonian: Option<ComplexMatrix>,
}

impl Observer {
    pub fn new(layout: BasisLayout) -> Self {
        let ops = SpinOperatorSet::new(&layout);
        Self {
            layout,
            sz_total: ops.total_sz(),
            s12_sq: ops.s12_squared(),
            hamiltonian: None,
        }
    }

    pub fn with_hamiltonian(mut self, h: ComplexMatrix) -> Self {
        self.hamiltonian = Some(h);
        self
    }

    pub fn layout(&self) -> &BasisLayout {
        &self.layout
    }

    pub fn observe(&self, t: f64, state: &StateVector) -> Result<ObservableRecord, Error> {
        let rho = state.density();
        let dims = self.layout.factor_dims();
        let sites = partial_trace(&rho, &dims, &[0])?;
        let mobile = partial_trace(&rho, &dims, &[1])?;
        let rho12 = partial_trace(&rho, &dims, &[2, 3])?;
        let bell = |preset: StaticPreset| {
            let v = preset.state();
            v.inner(&rho12.mul_vec(&v).expect("4x4")).re
        };
        let energy = match &self.hamiltonian {
            Some(h) => Some(state.expectation(h)?.re),
            None => None,
        };
        Ok(ObservableRecord {
            t,
            site_populations: (0..self.layout.n_sites())
                .map(|x| sites[(x, x)].re)
                .collect(),
            p_up: mobile[(0, 0)].re,
            f_plus: bell(StaticPreset::PsiPlus),
            f_minus: bell(StaticPreset::PsiMinus),
            log_negativity: log_negativity(&rho12)?,
            f2: rho12[(2, 2)].re,
            sz_total: state.expectation(&self.sz_total)?.re,
            s12_sq: state.expectation(&self.s12_sq)?.re,
            norm: state.norm(),
            energy,
        })
    }
}

/// Observables of a single state, recorded at `t = 0`.
pub fn observables(state: &StateVector, layout: &BasisLayout) -> Result<ObservableRecord, Error> {
    Observer::new(*layout).observe(0.0, state)
}

/// States `e^{−iHt}|initial⟩` on every grid point.
pub fn evolve_states(
    spec: &ModelSpec,
    kind: HamiltonianKind,
    initial: &StateVector,
    grid: &TimeGrid,
) -> Result<Vec<StateVector>, Error> {
    let h = kind.build(spec)?;
    let eig = hermitian_eigensystem(&h)?;
    grid.times()
        .map(|t| eig.propagate(initial, t).map_err(Error::from))
        .collect()
}

pub fn run_trajectory(
    spec: &ModelSpec,
    kind: HamiltonianKind,
    initial: &StateVector,
    grid: &TimeGrid,
) -> Result<Vec<ObservableRecord>, Error> {
    let h = kind.build(spec)?;
    let eig = hermitian_eigensystem(&h)?;
    let observer = Observer::new(spec.layout()?).with_hamiltonian(h);
    grid.times()
        .map(|t| observer.observe(t, &eig.propagate(initial, t)?))
        .collect()
}

/// `|x=1⟩|↓⟩_e|↑↓⟩₁₂`: one excitation on static spin 1.
pub fn qst_initial_state(layout: &BasisLayout) -> Result<StateVector, ModelError> {
    encode_state(
        layout,
        layout.site_from_label(1)?,
        Spin::Down,
        StaticPreset::UpDown,
    )
}

/// Trajectory from [`qst_initial_state`]; `f2` measures arrival on spin 2.
pub fn qst_trajectory(
    spec: &ModelSpec,
    kind: HamiltonianKind,
    grid: &TimeGrid,
) -> Result<Vec<ObservableRecord>, Error> {
    let initial = qst_initial_state(&spec.layout()?)?;
    run_trajectory(spec, kind, &initial, grid)
}

/// `1 − Σ_x Σ_v |⟨x, v|ψ⟩|²` for an orthonormal set of three-spin vectors `v`.
pub fn spin_subspace_leakage(
    state: &StateVector,
    layout: &BasisLayout,
    allowed: &[StateVector],
) -> f64 {
    let mut kept = 0.0;
    for x in 0..layout.n_sites() {
        for v in allowed {
            let overlap: Complex64 = (0..8).map(|k| v[k].conj() * state[x * 8 + k]).sum();
            kept += overlap.norm_sqr();
        }
    }
    1.0 - kept
}

/// Population of one hopping normal mode.
pub fn mode_population(
    state: &StateVector,
    layout: &BasisLayout,
    mode: &HoppingMode,
) -> Result<f64, Error> {
    Ok(state.expectation(&mode_projector(layout, mode))?.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingModel {
    Xy,
    Heisenberg,
}

/// Lattice geometry for which the spin dynamics reduces to a three-spin chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnalyticLattice {
    /// Chain couplings `J_XY/2`, `J_z/2`.
    TwoSite,
    /// Chain couplings `J_XY/4`, `J_z/4`.
    ThreeSiteMiddleStart,
}

impl AnalyticLattice {
    /// Chain coupling relative to the two-site chain.
    fn rate(self) -> f64 {
        match self {
            AnalyticLattice::TwoSite => 1.0,
            AnalyticLattice::ThreeSiteMiddleStart => 0.5,
        }
    }
}

/// `|α↑|²` and `|α↓|²` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSample {
    pub t: f64,
    /// Weight of `|↑⟩_e|↓↓⟩₁₂`.
    pub up: f64,
    /// Weight of `|↓⟩_e|Ψ⁺⟩₁₂`.
    pub down: f64,
}

/// Closed-form evolution of `|↑⟩_e|↓↓⟩₁₂` inside the doublet
/// `{|↑⟩|↓↓⟩, |↓⟩|Ψ⁺⟩}` of the effective chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSolution {
    pub model: CouplingModel,
    pub lattice: AnalyticLattice,
    /// `J_XY` for the XY model, `J_z = 2 J_XY` for Heisenberg.
    pub j: f64,
}

impl AnalyticSolution {
    pub fn new(model: CouplingModel, lattice: AnalyticLattice, j: f64) -> Self {
        Self { model, lattice, j }
    }

    /// `(α↑(t), α↓(t))`.
    ///
    /// XY: `α↑ = cos(Jt/√2)`, `α↓ = i sin(Jt/√2)`. Heisenberg (doublet
    /// eigenvalues `J/4` and `−J/2`):
    /// `α↑ = e^{iJt/8}[cos(3Jt/8) + (i/3) sin(3Jt/8)]`,
    /// `α↓ = −(2√2/3) i e^{iJt/8} sin(3Jt/8)`.
    pub fn amplitudes(&self, t: f64) -> (Complex64, Complex64) {
        let jt = self.j * t * self.lattice.rate();
        match self.model {
            CouplingModel::Xy => {
                let w = jt * FRAC_1_SQRT_2;
                (
                    Complex64::new(libm::cos(w), 0.0),
                    Complex64::new(0.0, libm::sin(w)),
                )
            }
            CouplingModel::Heisenberg => {
                let w = 3.0 * jt / 8.0;
                let global = phase(jt / 8.0);
                let up = Complex64::new(libm::cos(w), libm::sin(w) / 3.0) * global;
                let down = Complex64::new(0.0, -2.0 * SQRT_2 / 3.0 * libm::sin(w)) * global;
                (up, down)
            }
        }
    }

    pub fn populations(&self, t: f64) -> AnalyticSample {
        let (up, down) = self.amplitudes(t);
        AnalyticSample {
            t,
            up: up.norm_sqr(),
            down: down.norm_sqr(),
        }
    }

    /// Period of the amplitudes (the populations repeat twice as often).
    pub fn period(&self) -> f64 {
        let base = match self.model {
            CouplingModel::Xy => 2.0 * SQRT_2 * PI,
            CouplingModel::Heisenberg => 16.0 * PI / 3.0,
        };
        base / (self.j * self.lattice.rate())
    }

    /// Largest `|α↓|²` reached.
    pub fn max_transfer(&self) -> f64 {
        match self.model {
            CouplingModel::Xy => 1.0,
            CouplingModel::Heisenberg => 8.0 / 9.0,
        }
    }
}

pub fn analytic_two_site(model: CouplingModel, j: f64, t: f64) -> AnalyticSample {
    AnalyticSolution::new(model, AnalyticLattice::TwoSite, j).populations(t)
}

pub fn analytic_period(model: CouplingModel, lattice: AnalyticLattice, j: f64) -> f64 {
    AnalyticSolution::new(model, lattice, j).period()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{hopping_modes, spin_state};

    fn initial(layout: &BasisLayout, label: usize) -> StateVector {
        encode_state(
            layout,
            layout.site_from_label(label).unwrap(),
            Spin::Up,
            StaticPreset::DownDown,
        )
        .unwrap()
    }

    fn short_grid() -> TimeGrid {
        TimeGrid::new(30.0, 601).unwrap()
    }

    fn check_record(r: &ObservableRecord) {
        for p in r
            .site_populations
            .iter()
            .chain([r.p_up, r.f_plus, r.f_minus, r.f2].iter())
        {
            assert!((-1e-9..=1.0 + 1e-9).contains(p), "{p}");
        }
        assert!((r.site_populations.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(r.log_negativity >= 0.0);
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(1.0, 1).is_err());
        assert!(TimeGrid::new(0.0, 5).is_err());
        assert!(TimeGrid::new(f64::NAN, 5).is_err());
        let g = TimeGrid::new(2.0, 5).unwrap();
        assert_eq!(g.times().collect::<Vec<_>>(), [0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(TimeGrid::default().n_points(), 2001);
        assert_eq!(TimeGrid::default().t_max(), 30.0);
    }

    #[test]
    fn product_state_observables() {
        let layout = BasisLayout::new(2).unwrap();
        let r = observables(&initial(&layout, 1), &layout).unwrap();
        assert_eq!(r.site_populations, [1.0, 0.0]);
        assert_eq!((r.p_up, r.f_plus, r.f_minus, r.f2), (1.0, 0.0, 0.0, 0.0));
        assert_eq!(r.log_negativity, 0.0);
        assert!((r.sz_total + 0.5).abs() < 1e-15);
        assert!((r.s12_sq - 2.0).abs() < 1e-15);
        assert_eq!(r.energy, None);
    }

    #[test]
    fn bell_state_observables() {
        let layout = BasisLayout::new(2).unwrap();
        let psi = encode_state(&layout, 1, Spin::Down, StaticPreset::PsiPlus).unwrap();
        let r = observables(&psi, &layout).unwrap();
        assert!(r.site_populations[0].abs() < 1e-15 && (r.site_populations[1] - 1.0).abs() < 1e-15);
        assert!((r.f_plus - 1.0).abs() < 1e-15 && r.f_minus.abs() < 1e-15);
        assert!((r.log_negativity - 1.0).abs() < 1e-12);
        assert_eq!(r.p_up, 0.0);
    }

    #[test]
    fn f2_reads_down_up() {
        let layout = BasisLayout::new(3).unwrap();
        let psi = encode_state(&layout, 0, Spin::Down, StaticPreset::DownUp).unwrap();
        let r = observables(&psi, &layout).unwrap();
        assert_eq!(r.f2, 1.0);
        assert!(observables(&StateVector::basis(16, 0), &layout).is_err());
    }

    #[test]
    fn first_record_matches_initial_state() {
        let spec = ModelSpec::heisenberg(2, 4.0, 1.0);
        let layout = spec.layout().unwrap();
        let psi = initial(&layout, 1);
        let records = run_trajectory(&spec, HamiltonianKind::Exact, &psi, &short_grid()).unwrap();
        assert_eq!(records.len(), 601);
        let (a, b) = (&records[0], observables(&psi, &layout).unwrap());
        let flat = |r: &ObservableRecord| {
            let mut v = r.site_populations.clone();
            v.extend([
                r.p_up,
                r.f_plus,
                r.f_minus,
                r.log_negativity,
                r.f2,
                r.sz_total,
                r.s12_sq,
                r.norm,
            ]);
            v
        };
        for (x, y) in flat(a).iter().zip(flat(&b)) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn trajectories_conserve_norm_energy_and_sz() {
        let cases = [
            (ModelSpec::xy(2, 1.0, 1.0), HamiltonianKind::Exact),
            (ModelSpec::heisenberg(2, 10.0, 1.0), HamiltonianKind::Exact),
            (
                ModelSpec::xy(2, 2.0, 1.0),
                HamiltonianKind::Effective(EffectiveVariant::TwoSite),
            ),
            (ModelSpec::xy(3, 3.0, 1.0), HamiltonianKind::Exact),
            (
                ModelSpec::heisenberg(3, 3.0, 1.0),
                HamiltonianKind::Effective(EffectiveVariant::ThreeSiteProjector),
            ),
            (
                ModelSpec::xy(3, 3.0, 1.0),
                HamiltonianKind::Effective(EffectiveVariant::ThreeSiteMiddleStart),
            ),
        ];
        for (spec, kind) in cases {
            let layout = spec.layout().unwrap();
            let records = run_trajectory(&spec, kind, &initial(&layout, 1), &short_grid()).unwrap();
            let (e0, s0) = (records[0].energy.unwrap(), records[0].sz_total);
            for r in &records {
                check_record(r);
                assert!((r.norm - 1.0).abs() < 1e-9);
                assert!((r.energy.unwrap() - e0).abs() <= 1e-9 * e0.abs().max(1.0));
                assert!((r.sz_total - s0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn effective_two_site_stays_in_the_doublet() {
        for spec in [
            ModelSpec::xy(2, 5.0, 1.0),
            ModelSpec::heisenberg(2, 5.0, 1.0),
        ] {
            let layout = spec.layout().unwrap();
            let states = evolve_states(
                &spec,
                HamiltonianKind::Effective(EffectiveVariant::TwoSite),
                &initial(&layout, 1),
                &short_grid(),
            )
            .unwrap();
            let doublet = [
                spin_state(Spin::Up, StaticPreset::DownDown),
                spin_state(Spin::Down, StaticPreset::PsiPlus),
            ];
            for psi in &states {
                assert!(spin_subspace_leakage(psi, &layout, &doublet).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn effective_dynamics_reproduce_closed_form() {
        for (spec, model) in [
            (ModelSpec::xy(2, 10.0, 1.0), CouplingModel::Xy),
            (
                ModelSpec::heisenberg(2, 10.0, 1.0),
                CouplingModel::Heisenberg,
            ),
        ] {
            let layout = spec.layout().unwrap();
            let records = run_trajectory(
                &spec,
                HamiltonianKind::Effective(EffectiveVariant::TwoSite),
                &initial(&layout, 1),
                &short_grid(),
            )
            .unwrap();
            for r in &records {
                let a = analytic_two_site(model, 1.0, r.t);
                assert!((r.p_up - a.up).abs() < 1e-9, "t={}", r.t);
                assert!((r.f_plus - a.down).abs() < 1e-9, "t={}", r.t);
            }
        }
    }

    #[test]
    fn middle_start_never_enters_the_zero_mode() {
        let spec = ModelSpec::heisenberg(3, 2.0, 1.0);
        let layout = spec.layout().unwrap();
        let zero = hopping_modes(3).unwrap().remove(2);
        let states = evolve_states(
            &spec,
            HamiltonianKind::Effective(EffectiveVariant::ThreeSiteProjector),
            &initial(&layout, 0),
            &short_grid(),
        )
        .unwrap();
        for psi in &states {
            assert!(mode_population(psi, &layout, &zero).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn free_hopping_from_one_site() {
        let spec = ModelSpec::xy(2, 1.5, 0.0);
        let layout = spec.layout().unwrap();
        let records = run_trajectory(
            &spec,
            HamiltonianKind::Exact,
            &initial(&layout, 1),
            &short_grid(),
        )
        .unwrap();
        for r in &records {
            assert!((r.site_populations[0] - libm::cos(1.5 * r.t).powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn qst_starts_with_nothing_on_spin_two() {
        for spec in [
            ModelSpec::xy(2, 20.0, 1.0),
            ModelSpec::heisenberg(3, 20.0, 1.0),
        ] {
            let records = qst_trajectory(
                &spec,
                HamiltonianKind::Exact,
                &TimeGrid::new(1.0, 3).unwrap(),
            )
            .unwrap();
            assert!(records[0].f2.abs() < 1e-15);
        }
    }

    #[test]
    fn effective_qst_xy_peaks_at_sqrt2_pi() {
        // Ψ⁻ part frozen, Ψ⁺ part cycles through the doublet: F₂ = (1 − cos(Jt/√2))²/4.
        let spec = ModelSpec::xy(2, 20.0, 1.0);
        let records = qst_trajectory(
            &spec,
            HamiltonianKind::Effective(EffectiveVariant::TwoSite),
            &short_grid(),
        )
        .unwrap();
        for r in &records {
            let c = libm::cos(r.t * FRAC_1_SQRT_2);
            assert!((r.f2 - (1.0 - c) * (1.0 - c) / 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_values() {
        let xy = analytic_two_site(CouplingModel::Xy, 1.0, PI * FRAC_1_SQRT_2);
        assert!((xy.down - 1.0).abs() < 1e-15 && xy.up.abs() < 1e-15);
        let h = analytic_two_site(CouplingModel::Heisenberg, 1.0, 4.0 * PI / 3.0);
        assert!((h.down - 8.0 / 9.0).abs() < 1e-15);
        for model in [CouplingModel::Xy, CouplingModel::Heisenberg] {
            let s = analytic_two_site(model, 1.0, 0.0);
            assert_eq!((s.up, s.down), (1.0, 0.0));
            for k in 0..200 {
                let s = analytic_two_site(model, 1.0, 0.173 * k as f64);
                assert!((s.up + s.down - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn heisenberg_amplitudes_match_doublet_eigen_expansion() {
        // Direct expansion in the doublet eigenbasis (eigenvalues J/4, −J/2).
        let sol = AnalyticSolution::new(CouplingModel::Heisenberg, AnalyticLattice::TwoSite, 1.0);
        for k in 0..50 {
            let t = 0.37 * k as f64;
            let up = phase(-t / 4.0) / 3.0 + phase(t / 2.0) * (2.0 / 3.0);
            let down = (phase(-t / 4.0) - phase(t / 2.0)) * (SQRT_2 / 3.0);
            let (a, b) = sol.amplitudes(t);
            assert!((a - up).norm() < 1e-14 && (b - down).norm() < 1e-14);
        }
    }

    #[test]
    fn analytic_periods() {
        let p = |m, l| analytic_period(m, l, 1.0);
        assert!((p(CouplingModel::Xy, AnalyticLattice::TwoSite) - 8.885765876316732).abs() < 1e-12);
        assert!(
            (p(CouplingModel::Heisenberg, AnalyticLattice::TwoSite) - 16.755160819145562).abs()
                < 1e-12
        );
        assert!(
            (p(CouplingModel::Xy, AnalyticLattice::ThreeSiteMiddleStart) - 4.0 * SQRT_2 * PI).abs()
                < 1e-12
        );
        // Amplitudes really repeat after one period.
        for model in [CouplingModel::Xy, CouplingModel::Heisenberg] {
            for lattice in [
                AnalyticLattice::TwoSite,
                AnalyticLattice::ThreeSiteMiddleStart,
            ] {
                let sol = AnalyticSolution::new(model, lattice, 1.0);
                let (a0, b0) = sol.amplitudes(0.3);
                let (a1, b1) = sol.amplitudes(0.3 + sol.period());
                let g = a1 / a0;
                assert!((g.norm() - 1.0).abs() < 1e-12);
                assert!((b1 - b0 * g).norm() < 1e-12);
            }
        }
    }
}
