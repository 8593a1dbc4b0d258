"""Synthetic voltage traces for energy-harvesting elements.

Seven element channels are modeled: five solar cells with distinct spectral
response curves, one piezo element driven by motion, and one peltier element
driven by the skin/ambient temperature difference.  A scenario walks through
a sequence of places; each place's light, temperature and motion profile
drives the per-element generated electricity in millivolts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import ValidationError

MAX_OUTPUT_MV = 3600.0  # acquisition chain accepts at most 3.6 V

Spectrum = tuple[tuple[float, float], ...]  # (wavelength nm, relative power)


class ElementKind(Enum):
    """The seven harvester channels; declaration order is the canonical channel order."""

    SC1 = "SC1"
    SC2 = "SC2"
    SC3 = "SC3"
    SC4 = "SC4"
    SC5 = "SC5"
    PIEZO = "PIEZO"
    PELTIER = "PELTIER"


SOLAR_KINDS = (ElementKind.SC1, ElementKind.SC2, ElementKind.SC3,
               ElementKind.SC4, ElementKind.SC5)


def element_from_name(name: str) -> ElementKind:
    try:
        return ElementKind[name.strip()]
    except KeyError:
        valid = ",".join(k.name for k in ElementKind)
        raise ValidationError(f"unknown element {name!r}; valid: {valid}") from None


def _validate_spectrum(spectrum: Spectrum) -> None:
    if len(spectrum) == 0:
        raise ValidationError("spectrum must have at least one (wavelength, weight) entry")
    total = 0.0
    for pair in spectrum:
        if len(pair) != 2:
            raise ValidationError(f"malformed spectrum entry {pair!r}")
        wl, w = pair
        if not (np.isfinite(wl) and np.isfinite(w)):
            raise ValidationError(f"non-finite spectrum entry {pair!r}")
        if w < 0:
            raise ValidationError(f"negative spectrum weight {w} at {wl} nm")
        total += w
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"spectrum weights sum to {total}, expected 1 within 1e-9")


@dataclass(frozen=True)
class SolarResponse:
    """Photovoltaic response: linear in intensity, shaped by a normalized efficiency curve.

    `qe_curve` holds (wavelength nm, efficiency) knots with strictly increasing
    wavelengths; efficiency between knots is piecewise-linear and clamps to the
    nearest knot outside the covered range.  Efficiencies are normalized so the
    maximum is exactly 1.
    """

    intensity_gain: float  # mV per lux at efficiency 1
    qe_curve: tuple[tuple[float, float], ...]
    saturation_mv: float = MAX_OUTPUT_MV

    def __post_init__(self):
        if not self.intensity_gain > 0:
            raise ValidationError(f"intensity_gain must be > 0, got {self.intensity_gain}")
        if not self.saturation_mv > 0:
            raise ValidationError(f"saturation_mv must be > 0, got {self.saturation_mv}")
        if len(self.qe_curve) < 2:
            raise ValidationError("qe_curve needs at least two knots")
        wls = [wl for wl, _ in self.qe_curve]
        effs = [e for _, e in self.qe_curve]
        if any(b <= a for a, b in zip(wls, wls[1:])):
            raise ValidationError("qe_curve wavelengths must be strictly increasing")
        if any(e < 0 or e > 1 for e in effs):
            raise ValidationError("qe_curve efficiencies must lie in [0, 1]")
        if max(effs) != 1.0:
            raise ValidationError("qe_curve must be normalized with maximum exactly 1")

    def efficiency(self, wavelength_nm: float) -> float:
        wls = np.array([wl for wl, _ in self.qe_curve])
        effs = np.array([e for _, e in self.qe_curve])
        return float(np.interp(wavelength_nm, wls, effs))


@dataclass(frozen=True)
class PiezoResponse:
    """Kinetic response: output scales with |acceleration| times the motion level."""

    gain_mv: float  # mV per unit of motion_level * |accel|

    def __post_init__(self):
        if self.gain_mv < 0:
            raise ValidationError(f"piezo gain must be >= 0, got {self.gain_mv}")


@dataclass(frozen=True)
class PeltierResponse:
    """Thermoelectric response: output scales with the skin-minus-ambient difference."""

    seebeck_gain_mv_per_c: float

    def __post_init__(self):
        if self.seebeck_gain_mv_per_c < 0:
            raise ValidationError(
                f"peltier gain must be >= 0, got {self.seebeck_gain_mv_per_c}")


ElementResponse = Union[SolarResponse, PiezoResponse, PeltierResponse]
ResponseMap = Mapping[ElementKind, ElementResponse]


@dataclass(frozen=True)
class PlaceProfile:
    """Environmental description of one place, driving all seven channels."""

    name: str
    intensity_lux: float
    spectrum: Spectrum
    ambient_temp_c: float
    motion_level: float
    noise_sigma_mv: float = 0.0

    def __post_init__(self):
        if not self.name:
            raise ValidationError("place name must be non-empty")
        if self.intensity_lux < 0:
            raise ValidationError(f"intensity_lux must be >= 0, got {self.intensity_lux}")
        if self.motion_level < 0:
            raise ValidationError(f"motion_level must be >= 0, got {self.motion_level}")
        if self.noise_sigma_mv < 0:
            raise ValidationError(f"noise_sigma_mv must be >= 0, got {self.noise_sigma_mv}")
        _validate_spectrum(self.spectrum)


@dataclass(frozen=True)
class Scenario:
    """An ordered walk through places, with one constant skin temperature."""

    case_id: str
    segments: tuple[tuple[str, float], ...]  # (place name, duration seconds)
    skin_temp_c: float = 33.0
    seed: int = 0

    def __post_init__(self):
        if not self.case_id:
            raise ValidationError("case_id must be non-empty")
        if len(self.segments) == 0:
            raise ValidationError("scenario needs at least one segment")
        for i, (name, dur) in enumerate(self.segments):
            if not dur > 0:
                raise ValidationError(f"segment {i} ({name!r}) duration must be > 0, got {dur}")


@dataclass
class VoltageTrace:
    """Per-element millivolt samples plus a per-sample place label."""

    sample_rate_hz: float
    channels: dict[ElementKind, np.ndarray]
    labels: list[str]
    case_id: str

    def __post_init__(self):
        n = len(self.labels)
        for kind, samples in self.channels.items():
            if len(samples) != n:
                raise ValidationError(
                    f"channel {kind.name} has {len(samples)} samples but {n} labels")
            if samples.size and not np.all(np.isfinite(samples)):
                raise ValidationError(f"channel {kind.name} contains non-finite samples")
            if samples.size and (samples.min() < 0 or samples.max() > MAX_OUTPUT_MV):
                raise ValidationError(
                    f"channel {kind.name} has samples outside [0, {MAX_OUTPUT_MV}] mV")

    @property
    def n_samples(self) -> int:
        return len(self.labels)


def solar_output_mv(resp: SolarResponse, intensity_lux: float, spectrum: Spectrum) -> float:
    """Mean solar-cell output for a light field of given intensity and spectrum.

    Output is intensity_gain * lux * sum_w weight(w) * qe(w), capped at the
    cell's saturation voltage.  Zero intensity gives exactly zero.
    """
    if intensity_lux < 0:
        raise ValidationError(f"intensity_lux must be >= 0, got {intensity_lux}")
    _validate_spectrum(spectrum)
    wls = np.array([wl for wl, _ in resp.qe_curve])
    effs = np.array([e for _, e in resp.qe_curve])
    eff = 0.0
    for wl, w in spectrum:
        eff += w * float(np.interp(wl, wls, effs))
    return min(resp.saturation_mv, resp.intensity_gain * intensity_lux * eff)


def piezo_output_mv(motion_level: float, instantaneous_accel: float, gain: float) -> float:
    """Piezo output for one acceleration sample; zero whenever motion_level is zero."""
    if gain < 0:
        raise ValidationError(f"gain must be >= 0, got {gain}")
    out = gain * abs(instantaneous_accel) * motion_level
    return min(max(out, 0.0), MAX_OUTPUT_MV)


def peltier_output_mv(skin_temp_c: float, ambient_temp_c: float, seebeck_gain: float) -> float:
    """Peltier output; one-sided, zero when ambient meets or exceeds skin temperature."""
    if seebeck_gain < 0:
        raise ValidationError(f"seebeck_gain must be >= 0, got {seebeck_gain}")
    out = seebeck_gain * max(0.0, skin_temp_c - ambient_temp_c)
    return min(out, MAX_OUTPUT_MV)


def simulate(scenario: Scenario,
             profiles: Mapping[str, PlaceProfile],
             responses: ResponseMap,
             sample_rate_hz: float = 16.0) -> VoltageTrace:
    """Render a scenario into one voltage trace.

    Per segment, every channel emits round(duration * rate) samples: the
    place's mean output per element, plus i.i.d. Gaussian noise with the
    place's noise sigma, clamped to [0, 3600] mV.  The piezo channel is driven
    by a per-tick synthetic |N(0,1)| acceleration from the seeded stream.
    Output is a pure function of (scenario, profiles, responses, rate).
    """
    if not sample_rate_hz > 0:
        raise ValidationError(f"sample_rate_hz must be > 0, got {sample_rate_hz}")
    kinds = [k for k in ElementKind if k in responses]
    if not kinds:
        raise ValidationError("responses must cover at least one element")
    for kind in kinds:
        if kind in SOLAR_KINDS:
            expected = SolarResponse
        elif kind is ElementKind.PIEZO:
            expected = PiezoResponse
        else:
            expected = PeltierResponse
        if not isinstance(responses[kind], expected):
            raise ValidationError(
                f"element {kind.name} needs a {expected.__name__}, "
                f"got {type(responses[kind]).__name__}")

    rng = np.random.default_rng(scenario.seed)
    parts: dict[ElementKind, list[np.ndarray]] = {k: [] for k in kinds}
    labels: list[str] = []

    for i, (place_name, duration_s) in enumerate(scenario.segments):
        if place_name not in profiles:
            raise ValidationError(f"segment {i}: unknown place {place_name!r}")
        prof = profiles[place_name]
        n = int(round(duration_s * sample_rate_hz))
        if n == 0:
            continue
        # Draw order is fixed: piezo acceleration first, then per-channel noise
        # in canonical element order, so traces are reproducible by seed.
        accel = np.abs(rng.standard_normal(n))
        for kind in kinds:
            resp = responses[kind]
            if isinstance(resp, SolarResponse):
                base = np.full(n, solar_output_mv(resp, prof.intensity_lux, prof.spectrum))
            elif isinstance(resp, PiezoResponse):
                base = np.minimum(resp.gain_mv * accel * prof.motion_level, MAX_OUTPUT_MV)
            else:
                base = np.full(n, peltier_output_mv(
                    scenario.skin_temp_c, prof.ambient_temp_c, resp.seebeck_gain_mv_per_c))
            if prof.noise_sigma_mv > 0:
                base = base + rng.standard_normal(n) * prof.noise_sigma_mv
            np.clip(base, 0.0, MAX_OUTPUT_MV, out=base)
            parts[kind].append(base)
        labels.extend([place_name] * n)

    channels = {k: (np.concatenate(parts[k]) if parts[k] else np.empty(0)) for k in kinds}
    return VoltageTrace(sample_rate_hz=sample_rate_hz, channels=channels,
                        labels=labels, case_id=scenario.case_id)
