"""Shot-noise-limited field-calibration error of an NV ensemble magnetometer.

    dB = (1 / gamma) / sqrt(N_S * t_m * T2*)

with N_S the number of contributing spins, t_m the measurement time and T2*
the dephasing time. When only a spectral linewidth is known, T2* (and t_m)
are derived from it through the Gaussian free-induction relation: a decay
envelope exp(-t^2 / (2 T2*^2)) transforms to a line of full width at half
maximum 2 sqrt(2 ln 2) / (2 pi T2*).
"""

import numpy as np

GAUSSIAN_FWHM_TIME_FACTOR = 2.0 * np.sqrt(2.0 * np.log(2.0)) / (2.0 * np.pi)


def dephasing_time_from_linewidth(fwhm_mhz: float) -> float:
    """T2* in seconds from a Gaussian FWHM linewidth in MHz."""
    if fwhm_mhz <= 0:
        raise ValueError("linewidth must be positive")
    return GAUSSIAN_FWHM_TIME_FACTOR / (fwhm_mhz * 1e6)


def field_error(
    n_spins: float,
    t_meas_s: float,
    t2_star_s: float,
    gamma_mhz_per_g: float = 2.8,
) -> float:
    """Field uncertainty dB in Gauss."""
    for name, value in (
        ("n_spins", n_spins),
        ("t_meas_s", t_meas_s),
        ("t2_star_s", t2_star_s),
        ("gamma_mhz_per_g", gamma_mhz_per_g),
    ):
        if value <= 0:
            raise ValueError(f"{name} must be positive, got {value}")
    gamma_hz_per_g = gamma_mhz_per_g * 1e6
    return 1.0 / (gamma_hz_per_g * np.sqrt(n_spins * t_meas_s * t2_star_s))


def field_error_from_linewidth(
    n_spins: float, fwhm_mhz: float, gamma_mhz_per_g: float = 2.8
) -> float:
    """Field uncertainty with t_m = T2* both taken from the linewidth."""
    tau = dephasing_time_from_linewidth(fwhm_mhz)
    return field_error(n_spins, tau, tau, gamma_mhz_per_g)
