//! Lattice configuration, basis layout and Hamiltonian builders.
//!
//! The composite space is `site ⊗ mobile spin ⊗ static spin 1 ⊗ static spin 2`
//! with composite index `site·8 + σ_e·4 + s₁·2 + s₂` and `↑ → 0`, `↓ → 1`.
//! Spin operators are spin-½ operators (`σ_z` has eigenvalues ±½ and
//! `σ₊ = |↑⟩⟨↓|`), so `J_z = 2 J_XY` is the isotropic Heisenberg coupling.
//!
//! Sites are stored left to right. The two-site chain is `1 – 2` and the
//! three-site chain is `1 – 0 – 2`, so the conventional labels map to layout
//! indices as `1 → 0, 2 → 1` and `1 → 0, 0 → 1, 2 → 2` respectively.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use thiserror::Error;

use crate::linalg::{kron_all, Complex64, ComplexMatrix, StateVector, ONE, ZERO};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("n_sites must be 2 or 3, got {0}")]
    UnsupportedSites(usize),
    #[error("hopping amplitude must be finite and non-negative, got {0}")]
    InvalidHopping(f64),
    #[error("coupling {name} must be finite, got {value}")]
    InvalidCoupling { name: &'static str, value: f64 },
    #[error("static spins must sit on two distinct sites of the lattice, got {0:?}")]
    InvalidAttachments([usize; 2]),
    #[error("site index {site} is out of range for a {n_sites}-site lattice")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("site label {label} does not exist on a {n_sites}-site lattice")]
    UnknownSiteLabel { label: usize, n_sites: usize },
    #[error("effective variant {variant} needs a {needed}-site lattice, model has {n_sites}")]
    VariantMismatch {
        variant: EffectiveVariant,
        needed: usize,
        n_sites: usize,
    },
    #[error("unknown {kind} label `{label}`")]
    UnknownLabel { kind: &'static str, label: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// Position in the local two-dimensional factor.
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    pub fn from_label(label: &str) -> Result<Self, ModelError> {
        match label {
            "up" | "u" | "↑" => Ok(Spin::Up),
            "down" | "d" | "↓" => Ok(Spin::Down),
            _ => Err(ModelError::UnknownLabel {
                kind: "spin",
                label: label.into(),
            }),
        }
    }
}

/// Initial two-qubit state of the static spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StaticPreset {
    UpUp,
    UpDown,
    DownUp,
    DownDown,
    /// `(|↑↓⟩ + |↓↑⟩)/√2`
    PsiPlus,
    /// `(|↑↓⟩ − |↓↑⟩)/√2`
    PsiMinus,
}

impl StaticPreset {
    pub const ALL: [StaticPreset; 6] = [
        StaticPreset::UpUp,
        StaticPreset::UpDown,
        StaticPreset::DownUp,
        StaticPreset::DownDown,
        StaticPreset::PsiPlus,
        StaticPreset::PsiMinus,
    ];

    /// Amplitudes over `|s₁ s₂⟩` in the order `↑↑, ↑↓, ↓↑, ↓↓`.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        match self {
            StaticPreset::UpUp => [1.0, 0.0, 0.0, 0.0],
            StaticPreset::UpDown => [0.0, 1.0, 0.0, 0.0],
            StaticPreset::DownUp => [0.0, 0.0, 1.0, 0.0],
            StaticPreset::DownDown => [0.0, 0.0, 0.0, 1.0],
            StaticPreset::PsiPlus => [0.0, h, h, 0.0],
            StaticPreset::PsiMinus => [0.0, h, -h, 0.0],
        }
    }

    pub fn state(self) -> StateVector {
        StateVector::from_real(&self.amplitudes())
    }

    pub fn label(self) -> &'static str {
        match self {
            StaticPreset::UpUp => "up-up",
            StaticPreset::UpDown => "up-down",
            StaticPreset::DownUp => "down-up",
            StaticPreset::DownDown => "down-down",
            StaticPreset::PsiPlus => "psi+",
            StaticPreset::PsiMinus => "psi-",
        }
    }

    pub fn from_label(label: &str) -> Result<Self, ModelError> {
        Self::ALL
            .into_iter()
            .find(|p| p.label() == label)
            .ok_or_else(|| ModelError::UnknownLabel {
                kind: "static-spin preset",
                label: label.into(),
            })
    }
}

/// Physical configuration. Energies share one (arbitrary) unit, conventionally
/// the spin-spin coupling `J`; times are then in units of `1/J`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub n_sites: usize,
    /// Hopping amplitude per bond.
    pub eta: f64,
    pub j_xy: f64,
    pub j_z: f64,
    /// Layout site index carrying static spin 1 and static spin 2.
    pub attachments: [usize; 2],
}

impl ModelSpec {
    pub fn custom(n_sites: usize, eta: f64, j_xy: f64, j_z: f64) -> Self {
        Self {
            n_sites,
            eta,
            j_xy,
            j_z,
            attachments: default_attachments(n_sites),
        }
    }

    /// XY-isotropic coupling: `J_XY = j`, `J_z = 0`.
    pub fn xy(n_sites: usize, eta: f64, j: f64) -> Self {
        Self::custom(n_sites, eta, j, 0.0)
    }

    /// Heisenberg coupling: `J_z = j`, `J_XY = j/2`.
    pub fn heisenberg(n_sites: usize, eta: f64, j: f64) -> Self {
        Self::custom(n_sites, eta, 0.5 * j, j)
    }

    pub fn with_attachments(mut self, attachments: [usize; 2]) -> Self {
        self.attachments = attachments;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(2..=3).contains(&self.n_sites) {
            return Err(ModelError::UnsupportedSites(self.n_sites));
        }
        if !self.eta.is_finite() || self.eta < 0.0 {
            return Err(ModelError::InvalidHopping(self.eta));
        }
        for (name, value) in [("j_xy", self.j_xy), ("j_z", self.j_z)] {
            if !value.is_finite() {
                return Err(ModelError::InvalidCoupling { name, value });
            }
        }
        let [a, b] = self.attachments;
        if a == b || a >= self.n_sites || b >= self.n_sites {
            return Err(ModelError::InvalidAttachments(self.attachments));
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<BasisLayout, ModelError> {
        BasisLayout::new(self.n_sites)
    }

    /// The energy unit `J`: `J_z` when an Ising part is present (Heisenberg
    /// convention), otherwise `J_XY`.
    pub fn coupling_unit(&self) -> f64 {
        if self.j_z != 0.0 {
            self.j_z.abs()
        } else {
            self.j_xy.abs()
        }
    }

    /// `η / J`, infinite for an uncoupled model.
    pub fn eta_over_j(&self) -> f64 {
        self.eta / self.coupling_unit()
    }
}

/// Static spin 1 on the leftmost site, spin 2 on the rightmost.
pub fn default_attachments(n_sites: usize) -> [usize; 2] {
    [0, n_sites.saturating_sub(1)]
}

/// Fixed tensor ordering `site ⊗ σ_e ⊗ s₁ ⊗ s₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLayout {
    n_sites: usize,
}

/// One composite basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLabel {
    pub site: usize,
    pub mobile: Spin,
    pub static1: Spin,
    pub static2: Spin,
}

impl BasisLayout {
    pub const SPIN_DIM: usize = 8;

    pub fn new(n_sites: usize) -> Result<Self, ModelError> {
        if !(2..=3).contains(&n_sites) {
            return Err(ModelError::UnsupportedSites(n_sites));
        }
        Ok(Self { n_sites })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        Self::SPIN_DIM * self.n_sites
    }

    /// Factor dimensions in tensor order.
    pub fn factor_dims(&self) -> [usize; 4] {
        [self.n_sites, 2, 2, 2]
    }

    pub fn index(&self, label: BasisLabel) -> usize {
        label.site * 8
            + label.mobile.index() * 4
            + label.static1.index() * 2
            + label.static2.index()
    }

    pub fn decode(&self, index: usize) -> BasisLabel {
        BasisLabel {
            site: index / 8,
            mobile: Spin::from_index((index >> 2) & 1),
            static1: Spin::from_index((index >> 1) & 1),
            static2: Spin::from_index(index & 1),
        }
    }

    /// Layout index of a conventional site label (`1, 2` or `1, 0, 2`).
    pub fn site_from_label(&self, label: usize) -> Result<usize, ModelError> {
        match (self.n_sites, label) {
            (2, 1) | (3, 1) => Ok(0),
            (2, 2) => Ok(1),
            (3, 0) => Ok(1),
            (3, 2) => Ok(2),
            _ => Err(ModelError::UnknownSiteLabel {
                label,
                n_sites: self.n_sites,
            }),
        }
    }

    /// Conventional label of a layout site index.
    pub fn site_label(&self, site: usize) -> usize {
        match (self.n_sites, site) {
            (_, 0) => 1,
            (2, 1) => 2,
            (3, 1) => 0,
            _ => 2,
        }
    }

    fn check_site(&self, site: usize) -> Result<(), ModelError> {
        if site >= self.n_sites {
            return Err(ModelError::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            });
        }
        Ok(())
    }

    /// `|x⟩⟨x| ⊗ 1_spin`.
    pub fn site_projector(&self, site: usize) -> Result<ComplexMatrix, ModelError> {
        self.check_site(site)?;
        let mut p = ComplexMatrix::zeros(self.n_sites, self.n_sites);
        p[(site, site)] = ONE;
        Ok(self.embed_motional(&p))
    }

    /// `m ⊗ 1_spin` for an operator `m` on the site factor.
    pub fn embed_motional(&self, m: &ComplexMatrix) -> ComplexMatrix {
        kron_all(&[m, &ComplexMatrix::identity(Self::SPIN_DIM)])
    }

    /// `1_site ⊗ m` for an operator `m` on the three spins.
    pub fn embed_spin(&self, m: &ComplexMatrix) -> ComplexMatrix {
        kron_all(&[&ComplexMatrix::identity(self.n_sites), m])
    }
}

/// Spin-½ operators on a single spin.
mod single {
    use super::*;

    pub fn raising() -> ComplexMatrix {
        ComplexMatrix::new(2, 2, vec![ZERO, ONE, ZERO, ZERO]).unwrap()
    }

    pub fn lowering() -> ComplexMatrix {
        raising().adjoint()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[0.5, -0.5])
    }
}

/// Mobile and static spin operators embedded in the full space.
#[derive(Debug, Clone)]
pub struct SpinOperatorSet {
    pub sigma_plus: ComplexMatrix,
    pub sigma_minus: ComplexMatrix,
    pub sigma_z: ComplexMatrix,
    pub s_plus: [ComplexMatrix; 2],
    pub s_minus: [ComplexMatrix; 2],
    pub s_z: [ComplexMatrix; 2],
}

impl SpinOperatorSet {
    pub fn new(layout: &BasisLayout) -> Self {
        let id = ComplexMatrix::identity(2);
        let on = |slot: usize, op: &ComplexMatrix| {
            let mut f = [&id, &id, &id];
            f[slot] = op;
            layout.embed_spin(&kron_all(&f))
        };
        let (up, down, z) = (single::raising(), single::lowering(), single::z());
        Self {
            sigma_plus: on(0, &up),
            sigma_minus: on(0, &down),
            sigma_z: on(0, &z),
            s_plus: [on(1, &up), on(2, &up)],
            s_minus: [on(1, &down), on(2, &down)],
            s_z: [on(1, &z), on(2, &z)],
        }
    }

    /// `σ_z + S_1z + S_2z`.
    pub fn total_sz(&self) -> ComplexMatrix {
        &(&self.sigma_z + &self.s_z[0]) + &self.s_z[1]
    }

    /// `Ŝ₁₂² = (Ŝ₁ + Ŝ₂)²`, eigenvalue 2 on the triplet and 0 on the singlet.
    pub fn s12_squared(&self) -> ComplexMatrix {
        let plus = &self.s_plus[0] + &self.s_plus[1];
        let minus = &self.s_minus[0] + &self.s_minus[1];
        let z = &self.s_z[0] + &self.s_z[1];
        let flips = &(&plus * &minus) + &(&minus * &plus);
        &(&z * &z) + &flips.scale_real(0.5)
    }

    /// `J_XY (σ₊S₋ + σ₋S₊) + J_z σ_z S_z` between the mobile spin and static
    /// spin `k` (0 or 1).
    pub fn coupling(&self, k: usize, j_xy: f64, j_z: f64) -> ComplexMatrix {
        let flip = &(&self.sigma_plus * &self.s_minus[k]) + &(&self.sigma_minus * &self.s_plus[k]);
        &flip.scale_real(j_xy) + &(&self.sigma_z * &self.s_z[k]).scale_real(j_z)
    }
}

/// Hopping matrix on the site factor alone.
pub fn motional_hopping(n_sites: usize, eta: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(n_sites, n_sites);
    for x in 0..n_sites.saturating_sub(1) {
        h[(x, x + 1)] = Complex64::new(eta, 0.0);
        h[(x + 1, x)] = Complex64::new(eta, 0.0);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeLabel {
    Plus,
    Minus,
    Zero,
}

/// Normal mode of the free hopping: `H_hop |φ⟩ = energy_factor · η |φ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingMode {
    pub label: ModeLabel,
    pub energy_factor: f64,
    /// Amplitudes over layout sites.
    pub amplitudes: Vec<f64>,
}

/// Closed-form hopping modes. Two sites: `φ± = (|1⟩ ± |2⟩)/√2` at `±η`.
/// Three sites: `φ± = ½|1⟩ ± |0⟩/√2 + ½|2⟩` at `±√2 η` and
/// `φ₀ = (|1⟩ − |2⟩)/√2` at zero.
pub fn hopping_modes(n_sites: usize) -> Result<Vec<HoppingMode>, ModelError> {
    let h = FRAC_1_SQRT_2;
    let mode = |label, energy_factor, amplitudes: &[f64]| HoppingMode {
        label,
        energy_factor,
        amplitudes: amplitudes.to_vec(),
    };
    match n_sites {
        2 => Ok(vec![
            mode(ModeLabel::Plus, 1.0, &[h, h]),
            mode(ModeLabel::Minus, -1.0, &[h, -h]),
        ]),
        3 => Ok(vec![
            mode(ModeLabel::Plus, core::f64::consts::SQRT_2, &[0.5, h, 0.5]),
            mode(
                ModeLabel::Minus,
                -core::f64::consts::SQRT_2,
                &[0.5, -h, 0.5],
            ),
            mode(ModeLabel::Zero, 0.0, &[h, 0.0, -h]),
        ]),
        n => Err(ModelError::UnsupportedSites(n)),
    }
}

/// `|φ⟩⟨φ| ⊗ 1_spin` for one hopping mode.
pub fn mode_projector(layout: &BasisLayout, mode: &HoppingMode) -> ComplexMatrix {
    let v = StateVector::from_real(&mode.amplitudes);
    layout.embed_motional(&v.density())
}

pub fn build_hopping(spec: &ModelSpec) -> Result<ComplexMatrix, ModelError> {
    spec.validate()?;
    let layout = spec.layout()?;
    Ok(layout.embed_motional(&motional_hopping(spec.n_sites, spec.eta)))
}

pub fn build_interaction(spec: &ModelSpec) -> Result<ComplexMatrix, ModelError> {
    spec.validate()?;
    let layout = spec.layout()?;
    let ops = SpinOperatorSet::new(&layout);
    let mut v = ComplexMatrix::zeros(layout.dim(), layout.dim());
    for (k, &site) in spec.attachments.iter().enumerate() {
        let local = &layout.site_projector(site)? * &ops.coupling(k, spec.j_xy, spec.j_z);
        v = &v + &local;
    }
    Ok(v)
}

pub fn build_hamiltonian(spec: &ModelSpec) -> Result<ComplexMatrix, ModelError> {
    Ok(&build_hopping(spec)? + &build_interaction(spec)?)
}

/// Which rotating-wave effective Hamiltonian to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EffectiveVariant {
    /// Two sites: spin-only chain with couplings halved.
    TwoSite,
    /// Three sites: each site projector replaced by its mode-diagonal part,
    /// `¼(P₊ + P₋) + ½P₀` for an end site.
    ThreeSiteProjector,
    /// Three sites, particle confined to `span{φ₊, φ₋}` (start on the middle
    /// site): spin-only chain with couplings quartered.
    ThreeSiteMiddleStart,
}

impl EffectiveVariant {
    pub const ALL: [EffectiveVariant; 3] = [
        EffectiveVariant::TwoSite,
        EffectiveVariant::ThreeSiteProjector,
        EffectiveVariant::ThreeSiteMiddleStart,
    ];

    pub fn from_label(label: &str) -> Result<Self, ModelError> {
        Self::ALL
            .into_iter()
            .find(|v| v.label() == label)
            .ok_or_else(|| ModelError::UnknownLabel {
                kind: "effective variant",
                label: label.into(),
            })
    }

    pub fn n_sites(self) -> usize {
        match self {
            EffectiveVariant::TwoSite => 2,
            _ => 3,
        }
    }

    /// Spin-only variants leave the motion free.
    pub fn is_spin_only(self) -> bool {
        !matches!(self, EffectiveVariant::ThreeSiteProjector)
    }

    pub fn label(self) -> &'static str {
        match self {
            EffectiveVariant::TwoSite => "two-site",
            EffectiveVariant::ThreeSiteProjector => "three-site-projector",
            EffectiveVariant::ThreeSiteMiddleStart => "three-site-middle-start",
        }
    }
}

impl fmt::Display for EffectiveVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Mode-diagonal part of `|x⟩⟨x|` on the site factor:
/// `Σ_m |⟨φ_m|x⟩|² |φ_m⟩⟨φ_m|`. Dropping the off-diagonal mode coherences is
/// exactly the rotating-wave approximation for non-degenerate modes.
pub fn effective_site_weight(n_sites: usize, site: usize) -> Result<ComplexMatrix, ModelError> {
    let mut w = ComplexMatrix::zeros(n_sites, n_sites);
    for mode in hopping_modes(n_sites)? {
        let overlap = mode.amplitudes[site];
        let phi = StateVector::from_real(&mode.amplitudes);
        w = &w + &phi.density().scale_real(overlap * overlap);
    }
    Ok(w)
}

pub fn build_effective_hamiltonian(
    spec: &ModelSpec,
    variant: EffectiveVariant,
) -> Result<ComplexMatrix, ModelError> {
    spec.validate()?;
    if spec.n_sites != variant.n_sites() {
        return Err(ModelError::VariantMismatch {
            variant,
            needed: variant.n_sites(),
            n_sites: spec.n_sites,
        });
    }
    let layout = spec.layout()?;
    let ops = SpinOperatorSet::new(&layout);
    let mut h = build_hopping(spec)?;
    for (k, &site) in spec.attachments.iter().enumerate() {
        let coupling = ops.coupling(k, spec.j_xy, spec.j_z);
        let weight = match variant {
            EffectiveVariant::TwoSite | EffectiveVariant::ThreeSiteProjector => {
                layout.embed_motional(&effective_site_weight(spec.n_sites, site)?)
            }
            EffectiveVariant::ThreeSiteMiddleStart => {
                // |⟨φ₊|x⟩|² = |⟨φ₋|x⟩|², and φ₊ + φ₋ span the whole reachable space.
                let modes = hopping_modes(spec.n_sites)?;
                let a = modes[0].amplitudes[site];
                ComplexMatrix::identity(layout.dim()).scale_real(a * a)
            }
        };
        h = &h + &(&weight * &coupling);
    }
    Ok(h)
}

/// Product state `|x⟩ ⊗ |σ_e⟩ ⊗ |static⟩` for a layout site index.
pub fn encode_state(
    layout: &BasisLayout,
    site: usize,
    mobile: Spin,
    statics: StaticPreset,
) -> Result<StateVector, ModelError> {
    layout.check_site(site)?;
    let mut psi = StateVector::zeros(layout.dim());
    let base = site * 8 + mobile.index() * 4;
    for (k, a) in statics.amplitudes().into_iter().enumerate() {
        psi[base + k] = Complex64::new(a, 0.0);
    }
    Ok(psi)
}

/// Three-spin state `|σ_e⟩ ⊗ |static⟩` as an 8-vector.
pub fn spin_state(mobile: Spin, statics: StaticPreset) -> StateVector {
    let mut v = StateVector::zeros(8);
    for (k, a) in statics.amplitudes().into_iter().enumerate() {
        v[mobile.index() * 4 + k] = Complex64::new(a, 0.0);
    }
    v
}
