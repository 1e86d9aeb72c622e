//! Closed-form energetics of a pair of spring-suspended boxes.
//!
//! Box 1 starts holding liquid of total mass `M` on a spring of stiffness
//! `k` in gravity `g`; box 2 starts empty. At equilibrium the loaded
//! spring is stretched by `X = M g / k` and stores `k X² / 2 = M² g² / (2k)`.
//! After half the mass has moved over, each box holds `M/2` and stores a
//! quarter of the initial energy, so the pair retains exactly half of it.
//!
//! The transfer is discretized into `N` equal drops of mass `m = M / N`;
//! each drop shifts the equilibrium of a box by `q = m g / k`. This module
//! holds the closed forms for those quantities, including the finite-`N`
//! first-order series totals whose relative error against the exact change
//! is `1/(2N)`; the step-by-step ledger lives in [`crate::transfer`].

use serde::Serialize;

use crate::error::{Error, Result};

/// Exact SI speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Largest supported drop count.
pub const MAX_DROP_COUNT: u64 = 1 << 32;

/// Relative tolerance to which derived quantities (drop mass, hop size)
/// must agree with their defining expressions.
pub const CONSISTENCY_REL_TOL: f64 = 1e-12;

fn ensure_positive_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "{name} must be a positive finite number, got {value}"
        )))
    }
}

#[inline]
fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Physical description of one box-spring system: total liquid mass `M`
/// (kg), spring stiffness `k` (N/m) and gravitational acceleration `g`
/// (m/s²). All three are strictly positive finite reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpringBoxParams {
    total_mass: f64,
    stiffness: f64,
    gravity: f64,
}

impl SpringBoxParams {
    pub fn new(total_mass: f64, stiffness: f64, gravity: f64) -> Result<Self> {
        ensure_positive_finite("total_mass", total_mass)?;
        ensure_positive_finite("stiffness", stiffness)?;
        ensure_positive_finite("gravity", gravity)?;
        Ok(Self {
            total_mass,
            stiffness,
            gravity,
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }

    /// Weight of the full liquid load, `M g` (N).
    pub fn weight(&self) -> f64 {
        self.total_mass * self.gravity
    }

    /// Spring extension with the full load aboard, `X = M g / k` (m).
    pub fn full_extension(&self) -> f64 {
        self.weight() / self.stiffness
    }
}

/// What travels between the boxes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MassSource {
    /// Ordinary liquid drops of mass `M / N`.
    Liquid,
    /// Photons; each removal changes the box mass by `photon_energy / c²`.
    Photon { photon_energy: f64 },
}

/// Discretization of the transfer: `N` drops (even, so the exchange can
/// stop at exactly `N/2`), each of mass `m = M / N`, each hop displacing a
/// box by `q = m g / k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferPlan {
    drop_count: u64,
    drop_mass: f64,
    step: f64,
    mass_source: MassSource,
}

fn check_drop_count(drop_count: u64) -> Result<()> {
    if drop_count > MAX_DROP_COUNT {
        return Err(Error::DropCountOverflow(drop_count));
    }
    if drop_count < 2 {
        return Err(Error::InvalidParam(format!(
            "drop count must be at least 2, got {drop_count}"
        )));
    }
    if !drop_count.is_multiple_of(2) {
        return Err(Error::InvalidParam(format!(
            "drop count must be even so the transfer can stop at N/2 drops, got {drop_count}"
        )));
    }
    Ok(())
}

impl TransferPlan {
    /// Plan a liquid transfer of `drop_count` drops out of `params`.
    pub fn liquid(params: &SpringBoxParams, drop_count: u64) -> Result<Self> {
        check_drop_count(drop_count)?;
        let drop_mass = params.total_mass() / drop_count as f64;
        let step = drop_mass * params.gravity() / params.stiffness();
        Ok(Self {
            drop_count,
            drop_mass,
            step,
            mass_source: MassSource::Liquid,
        })
    }

    /// Plan a photon-exchange variant: each of the `drop_count` quanta
    /// carries `photon_energy / c²` of mass equivalent, which must add up
    /// to the box's total mass.
    pub fn photon(params: &SpringBoxParams, drop_count: u64, photon_energy: f64) -> Result<Self> {
        check_drop_count(drop_count)?;
        let drop_mass = photon_drop_mass(photon_energy)?;
        let implied_total = drop_mass * drop_count as f64;
        if !rel_close(implied_total, params.total_mass(), CONSISTENCY_REL_TOL) {
            return Err(Error::InvalidParam(format!(
                "photon plan implies total mass {implied_total} kg but params carry {} kg",
                params.total_mass()
            )));
        }
        let step = drop_mass * params.gravity() / params.stiffness();
        Ok(Self {
            drop_count,
            drop_mass,
            step,
            mass_source: MassSource::Photon { photon_energy },
        })
    }

    pub fn drop_count(&self) -> u64 {
        self.drop_count
    }

    pub fn drop_mass(&self) -> f64 {
        self.drop_mass
    }

    /// Equilibrium hop per drop, `q = m g / k` (m).
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn mass_source(&self) -> MassSource {
        self.mass_source
    }

    /// Check that this plan describes `params`: `m · N = M` and
    /// `q = m g / k` to [`CONSISTENCY_REL_TOL`], plus the photon-mass
    /// relation when applicable.
    pub fn validate_against(&self, params: &SpringBoxParams) -> Result<()> {
        check_drop_count(self.drop_count)?;
        let implied_total = self.drop_mass * self.drop_count as f64;
        if !rel_close(implied_total, params.total_mass(), CONSISTENCY_REL_TOL) {
            return Err(Error::InvalidParam(format!(
                "plan is inconsistent with params: drop_mass * drop_count = {implied_total} kg, \
                 expected total_mass = {} kg",
                params.total_mass()
            )));
        }
        let expected_step = self.drop_mass * params.gravity() / params.stiffness();
        if !rel_close(self.step, expected_step, CONSISTENCY_REL_TOL) {
            return Err(Error::InvalidParam(format!(
                "plan is inconsistent with params: step = {} m, expected m*g/k = {expected_step} m",
                self.step
            )));
        }
        if let MassSource::Photon { photon_energy } = self.mass_source {
            let expected_mass = photon_drop_mass(photon_energy)?;
            if !rel_close(self.drop_mass, expected_mass, CONSISTENCY_REL_TOL) {
                return Err(Error::InvalidParam(format!(
                    "photon plan drop_mass = {} kg does not match E/c² = {expected_mass} kg",
                    self.drop_mass
                )));
            }
        }
        Ok(())
    }
}

/// Which side of the mechanical/electrical analogy a breakdown describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyDomain {
    Mechanical,
    Electrical,
}

/// Initial and final stored energies of the pair, and their difference.
///
/// Mechanically these are elastic energies `k x² / 2`; electrically they
/// are the electrostatic `Q² / (2C)` of the matching capacitor pair. The
/// shape is shared so both sides serialize identically apart from `domain`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub domain: EnergyDomain,
    /// Total stored energy before the transfer (all of it in box 1).
    pub initial_total: f64,
    /// Energy stored by box 1 before the transfer; equals `initial_total`.
    pub initial_box1: f64,
    /// Energy stored by each box after the transfer, a quarter of the start.
    pub final_per_box: f64,
    /// Total stored energy after the transfer, half of the start.
    pub final_total: f64,
    /// `final_total - initial_total`, always `-initial_total / 2`.
    pub delta_total: f64,
}

impl EnergyBreakdown {
    pub(crate) fn from_initial(domain: EnergyDomain, initial_box1: f64) -> Self {
        // The halvings below are exact in binary floating point, so the
        // 1/2 and 1/4 ratios hold bit-for-bit.
        let final_per_box = 0.25 * initial_box1;
        let final_total = 0.5 * initial_box1;
        Self {
            domain,
            initial_total: initial_box1,
            initial_box1,
            final_per_box,
            final_total,
            delta_total: -0.5 * initial_box1,
        }
    }
}

/// Equilibrium displacement (magnitude, m) of a box holding the given
/// fraction of the total mass: `(fraction · M) g / k`.
pub fn equilibrium_position(params: &SpringBoxParams, mass_fraction: f64) -> Result<f64> {
    if !mass_fraction.is_finite() || !(0.0..=1.0).contains(&mass_fraction) {
        return Err(Error::InvalidParam(format!(
            "mass_fraction must lie in [0, 1], got {mass_fraction}"
        )));
    }
    Ok(mass_fraction * params.total_mass() * params.gravity() / params.stiffness())
}

/// Elastic energy `k x² / 2` (J) of a spring stretched by `x ≥ 0`.
pub fn elastic_energy(stiffness: f64, displacement: f64) -> Result<f64> {
    ensure_positive_finite("stiffness", stiffness)?;
    if !displacement.is_finite() || displacement < 0.0 {
        return Err(Error::InvalidParam(format!(
            "displacement must be a non-negative finite number, got {displacement}"
        )));
    }
    Ok(0.5 * stiffness * displacement * displacement)
}

/// Endpoint energies of the transfer: `M² g² / (2k)` initially, a quarter
/// of that per box at the end. These depend only on the endpoints, not on
/// the drop count.
pub fn energy_breakdown(params: &SpringBoxParams) -> EnergyBreakdown {
    let weight = params.weight();
    let initial_box1 = weight * weight / (2.0 * params.stiffness());
    EnergyBreakdown::from_initial(EnergyDomain::Mechanical, initial_box1)
}

/// First-order series total for box 2's energy gain,
/// `(1 + 2 + … + N/2) k q² = ½ (N/2)(1 + N/2) k q²`.
///
/// Each per-hop term `n k q²` is the gravity work of hop `n`, i.e. the
/// exact gain `(n − ½) k q²` with the constant settling loss dropped.
/// Relative to the exact total `E_in/4` the error is `+1/(2N)` of `E_in`.
pub fn delta2_paper_sum(params: &SpringBoxParams, plan: &TransferPlan) -> Result<f64> {
    plan.validate_against(params)?;
    let half = (plan.drop_count() / 2) as f64;
    let kq2 = params.stiffness() * plan.step() * plan.step();
    Ok(0.5 * half * (1.0 + half) * kq2)
}

/// First-order series total for box 1's energy loss,
/// `-(N + (N−1) + … + (N/2+1)) k q² = -½ (N/2)(1 + 3N/2) k q²`.
///
/// Relative to the exact total `-3 E_in/4` the error is `-1/(2N)` of
/// `E_in`; it cancels the box 2 error exactly, so the two first-order
/// totals reproduce `-E_in/2` for every even `N`.
pub fn delta1_paper_sum(params: &SpringBoxParams, plan: &TransferPlan) -> Result<f64> {
    plan.validate_against(params)?;
    let half = (plan.drop_count() / 2) as f64;
    let kq2 = params.stiffness() * plan.step() * plan.step();
    Ok(-0.5 * half * (1.0 + 3.0 * half) * kq2)
}

/// Mass equivalent `E / c²` (kg) of a photon of energy `E` (J).
pub fn photon_drop_mass(photon_energy: f64) -> Result<f64> {
    ensure_positive_finite("photon_energy", photon_energy)?;
    Ok(photon_energy / (SPEED_OF_LIGHT * SPEED_OF_LIGHT))
}
