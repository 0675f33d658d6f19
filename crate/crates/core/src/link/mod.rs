//! Downstream 100G PAM-4 link: transmitter, fiber, receiver,
//! synchronization.
//!
//! The chain is `generate_rns_pam4 → shape_and_modulate →
//! apply_timing_jitter → fiber_propagate → detect →
//! synchronize_downsample`, each stage a pure function drawing from its
//! own named noise substream. [`simulate_capture`] wires them together
//! for one seeded capture.

mod bessel;
pub mod fiber;
mod field;
mod jitter;
pub mod pam4;
mod rx;
mod sync;
mod tx;

pub use bessel::{filter_real, noise_bandwidth, response as bessel_response};
pub use fiber::fiber_propagate;
pub use field::OpticalField;
pub use jitter::{apply_timing_jitter, JitterStats};
pub use pam4::{amplitude, bit_errors, generate_rns_pam4, slice_symbol, GRAY_BITS, LEVELS, LEVEL_STD};
pub use rx::{detect, excess_noise_factor};
pub use sync::{synchronize_downsample, SymbolFrame};
pub use tx::{eam_transmittance, predistorted_drive_levels, shape_and_modulate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Which impairments the link applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    /// Case 1: chromatic dispersion only. Chirp, jitter and Kerr are
    /// forced off; transceiver noise sources stay on.
    Cd,
    /// Case 2: all impairments (CD, Kerr, chirp, jitter).
    Realistic,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::Cd => write!(f, "CD"),
            Scenario::Realistic => write!(f, "Realistic"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Symbol rate in baud (100 Gb/s PAM-4 → 50 GBd).
    pub symbol_rate_hz: f64,
    /// Samples per symbol for waveform simulation.
    pub sim_sps: usize,
    pub wavelength_nm: f64,
    /// Launch optical power, dBm.
    pub lop_dbm: f64,
    /// Total optical path loss budget, dB. The excess over fiber loss is
    /// a flat attenuator before the APD.
    pub opl_db: f64,
    pub distance_km: f64,
    pub scenario: Scenario,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            symbol_rate_hz: 50e9,
            sim_sps: 16,
            wavelength_nm: 1550.0,
            lop_dbm: 10.0,
            opl_db: 28.7,
            distance_km: 0.0,
            scenario: Scenario::Cd,
        }
    }
}

impl LinkConfig {
    pub fn sample_rate_hz(&self) -> f64 {
        self.symbol_rate_hz * self.sim_sps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.sim_sps < 4 || self.sim_sps % 2 != 0 {
            return Err(Error::InvalidParam(format!(
                "sim_sps must be even and >= 4, got {}",
                self.sim_sps
            )));
        }
        if self.distance_km < 0.0 {
            return Err(Error::InvalidParam("distance_km must be >= 0".into()));
        }
        Ok(())
    }

    /// Flat attenuation making the total path loss equal the OPL budget.
    pub fn flat_pad_db(&self, fiber: &FiberParams) -> Result<f64> {
        let fiber_loss = fiber.loss_db_per_km * self.distance_km;
        if fiber_loss > self.opl_db {
            return Err(Error::InvalidParam(format!(
                "fiber loss {fiber_loss:.2} dB exceeds OPL budget {:.2} dB",
                self.opl_db
            )));
        }
        Ok(self.opl_db - fiber_loss)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberParams {
    pub loss_db_per_km: f64,
    /// Dispersion coefficient D, ps/nm/km.
    pub cd_ps_nm_km: f64,
    /// Dispersion slope S, ps/nm²/km (the printed figure 8 is selectable;
    /// 0.08 is the physically customary magnitude).
    pub cd_slope_ps_nm2_km: f64,
    /// Kerr index n2, m²/W.
    pub n2_m2_per_w: f64,
    /// Effective area, µm² (converts n2 to the nonlinear coefficient γ).
    pub effective_area_um2: f64,
    /// Split-step size, km.
    pub step_km: f64,
}

impl Default for FiberParams {
    fn default() -> Self {
        FiberParams {
            loss_db_per_km: 0.2,
            cd_ps_nm_km: 16.0,
            cd_slope_ps_nm2_km: 8.0,
            n2_m2_per_w: 2.6e-20,
            effective_area_um2: 80.0,
            step_km: 0.25,
        }
    }
}

impl FiberParams {
    /// β₂ in s²/m from D at the given wavelength.
    pub fn beta2(&self, wavelength_nm: f64) -> f64 {
        let lambda = wavelength_nm * 1e-9;
        let d_si = self.cd_ps_nm_km * 1e-6; // s/m²
        -d_si * lambda * lambda / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT)
    }

    /// β₃ in s³/m from D and S.
    pub fn beta3(&self, wavelength_nm: f64) -> f64 {
        let lambda = wavelength_nm * 1e-9;
        let d_si = self.cd_ps_nm_km * 1e-6; // s/m²
        let s_si = self.cd_slope_ps_nm2_km * 1e3; // s/m³
        let k = lambda * lambda / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT);
        k * k * (s_si + 2.0 * d_si / lambda)
    }

    /// Nonlinear coefficient γ = 2π·n2/(λ·A_eff), 1/(W·m).
    pub fn gamma(&self, wavelength_nm: f64) -> f64 {
        let lambda = wavelength_nm * 1e-9;
        let a_eff = self.effective_area_um2 * 1e-12;
        2.0 * std::f64::consts::PI * self.n2_m2_per_w / (lambda * a_eff)
    }

    /// Amplitude attenuation coefficient α/2 in nepers per meter.
    pub fn alpha_np_per_m(&self) -> f64 {
        self.loss_db_per_km * std::f64::consts::LN_10 / 10.0 / 1000.0
    }
}

/// Spectral model of the laser's relative intensity noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RinModel {
    /// Flat density up to Nyquist of the simulation grid.
    White,
    /// Relaxation-oscillation-shaped spectrum
    /// |H(f)|² ∝ f_r⁴/((f²−f_r²)² + (γf)²), normalized so the peak
    /// density equals `rin_db_per_hz`.
    Shaped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransmitterParams {
    pub laser_linewidth_hz: f64,
    /// Peak RIN density, dB/Hz.
    pub rin_db_per_hz: f64,
    pub rin_model: RinModel,
    /// Relaxation oscillation frequency of the shaped RIN spectrum, Hz.
    pub rin_relaxation_hz: f64,
    /// Damping rate γ of the shaped RIN spectrum, Hz.
    pub rin_damping_hz: f64,
    pub eam_bandwidth_ghz: f64,
    /// Linewidth-enhancement (chirp) factor of the EAM.
    pub eam_alpha_chirp: f64,
    pub eam_extinction_db: f64,
    /// Driver current noise density, A/√Hz.
    pub drive_noise_a_per_rthz: f64,
    /// Full drive swing in amps, used to scale the driver noise onto the
    /// normalized drive waveform.
    pub drive_swing_a: f64,
    /// 4th-order Bessel electrical filter cutoff, Hz.
    pub filter_cutoff_hz: f64,
}

impl Default for TransmitterParams {
    fn default() -> Self {
        TransmitterParams {
            laser_linewidth_hz: 1e6,
            rin_db_per_hz: -130.0,
            rin_model: RinModel::Shaped,
            rin_relaxation_hz: 8e9,
            rin_damping_hz: 3e9,
            eam_bandwidth_ghz: 55.0,
            eam_alpha_chirp: 0.7,
            eam_extinction_db: 10.0,
            drive_noise_a_per_rthz: 2e-12,
            drive_swing_a: 0.04,
            filter_cutoff_hz: 37.5e9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReceiverParams {
    pub apd_responsivity_a_per_w: f64,
    /// APD multiplication factor M.
    pub apd_gain: f64,
    /// Ionization coefficient k of the excess-noise factor.
    pub ionization_k: f64,
    /// Thermal current noise density, A/√Hz.
    pub thermal_noise_a_per_rthz: f64,
    pub tia_ohms: f64,
    pub postamp_gain_db: f64,
    /// Post-amplifier input-referred current noise density, A/√Hz.
    pub postamp_noise_a_per_rthz: f64,
    pub bandwidth_ghz: f64,
    /// 4th-order Bessel electrical filter cutoff, Hz.
    pub filter_cutoff_hz: f64,
}

impl Default for ReceiverParams {
    fn default() -> Self {
        ReceiverParams {
            apd_responsivity_a_per_w: 0.9,
            apd_gain: 8.0,
            ionization_k: 0.4,
            thermal_noise_a_per_rthz: 1e-12,
            tia_ohms: 100.0,
            postamp_gain_db: 10.0,
            postamp_noise_a_per_rthz: 2e-12,
            bandwidth_ghz: 55.0,
            filter_cutoff_hz: 37.5e9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JitterParams {
    pub enabled: bool,
    /// Standard deviation of the per-transition time shift, in unit
    /// intervals.
    pub rms_ui: f64,
    /// Width (in symbols) of the Gaussian kernel that correlates
    /// neighbouring transition shifts; the smoothed process is rescaled
    /// back to `rms_ui`.
    pub shape_std: f64,
    pub skip_boundary_transitions: bool,
}

impl Default for JitterParams {
    fn default() -> Self {
        JitterParams {
            enabled: true,
            rms_ui: 0.1,
            shape_std: 0.5,
            skip_boundary_transitions: true,
        }
    }
}

/// Master switch for every stochastic stage; used by closed-loop
/// sanity checks and the noiseless acceptance paths.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseSwitches {
    pub driver_noise: bool,
    pub laser_phase_noise: bool,
    pub rin: bool,
    pub shot_noise: bool,
    pub thermal_noise: bool,
    pub postamp_noise: bool,
}

impl NoiseSwitches {
    pub fn all_on() -> Self {
        NoiseSwitches {
            driver_noise: true,
            laser_phase_noise: true,
            rin: true,
            shot_noise: true,
            thermal_noise: true,
            postamp_noise: true,
        }
    }

    pub fn all_off() -> Self {
        NoiseSwitches {
            driver_noise: false,
            laser_phase_noise: false,
            rin: false,
            shot_noise: false,
            thermal_noise: false,
            postamp_noise: false,
        }
    }
}

impl Default for NoiseSwitches {
    fn default() -> Self {
        NoiseSwitches::all_on()
    }
}

/// Everything a capture needs, bundled.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct LinkParams {
    pub link: LinkConfig,
    pub fiber: FiberParams,
    pub tx: TransmitterParams,
    pub rx: ReceiverParams,
    pub jitter: JitterParams,
    pub noise: NoiseSwitches,
}

/// One synchronized capture: symbols → waveform → fiber → receiver →
/// symbol-rate soft samples.
///
/// In the CD scenario, chirp and jitter are forced off and the Kerr
/// term is zeroed; the Realistic scenario applies everything.
pub fn simulate_capture(
    params: &LinkParams,
    n_symbols: usize,
    master_seed: u64,
    capture: u64,
) -> Result<SymbolFrame> {
    params.link.validate()?;
    let mut tx_params = params.tx.clone();
    let mut jit = params.jitter.clone();
    if params.link.scenario == Scenario::Cd {
        tx_params.eam_alpha_chirp = 0.0;
        jit.enabled = false;
    }
    let symbols = generate_rns_pam4(n_symbols, master_seed, capture);
    let mut field = shape_and_modulate(
        &symbols,
        &tx_params,
        &params.link,
        &params.noise,
        master_seed,
        capture,
    )?;
    if jit.enabled && params.link.scenario == Scenario::Realistic {
        let (jittered, _stats) = apply_timing_jitter(&field, &jit, master_seed, capture);
        field = jittered;
    }
    let field = fiber_propagate(&field, &params.fiber, &params.link);
    let pad_db = params.link.flat_pad_db(&params.fiber)?;
    let voltage = detect(
        &field,
        &params.rx,
        pad_db,
        &params.noise,
        master_seed,
        capture,
    )?;
    synchronize_downsample(&voltage, &symbols, params.link.sim_sps)
}
