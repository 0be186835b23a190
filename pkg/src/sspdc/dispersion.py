"""Temperature-dependent Sellmeier models for periodically poled crystals.

Coefficients live in small ``key = value`` text files (see ``data/``).  A
file declares which functional form it uses, so new crystals only need a
new file.

Units: wavelength in um, temperature in degC.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels

DATA_DIR = Path(__file__).parent / "data"
CRYSTAL_DIR_ENV = "QPM_CRYSTAL_DIR"
FILE_SUFFIX = ".sellmeier"

# Both forms share the thermal parameter f = (T - T0)(T + T0 + 2*273.16).
# The fixed-ir form has no thermal shift of the infrared pole (b5 = 0).
FORMS = {
    "thermal-2pole": 11,
    "thermal-2pole-fixed-ir": 10,
}
_KELVIN = 273.16
_REQUIRED_KEYS = ("crystal", "form", "lambda_range_um", "temp_range_c",
                  "ne_coeffs", "no_coeffs", "temp_ref_c")
_RANGE_SLACK = 1e-12


class DispersionFileError(ValueError):
    """Coefficient file is malformed or inconsistent with its declared form."""


class DomainError(ValueError):
    """Wavelength or temperature outside the model's validity range."""


class Axis(str, enum.Enum):
    ORDINARY = "o"
    EXTRAORDINARY = "e"


@dataclass(frozen=True)
class DispersionModel:
    """Immutable Sellmeier description of one uniaxial crystal."""

    crystal_name: str
    form: str
    ne_coeffs: tuple[float, ...]
    no_coeffs: tuple[float, ...]
    temperature_reference: float
    wavelength_range: tuple[float, float]
    temperature_range: tuple[float, float]
    source: str = ""
    _vectors: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vecs = {
            Axis.EXTRAORDINARY: _full_vector(self.ne_coeffs),
            Axis.ORDINARY: _full_vector(self.no_coeffs),
        }
        for v in vecs.values():
            v.setflags(write=False)
        object.__setattr__(self, "_vectors", vecs)

    def coefficients(self, axis: Axis) -> np.ndarray:
        """Normalized 11-entry coefficient vector used by the kernels."""
        return self._vectors[Axis(axis)]

    def thermal_parameter(self, T: float) -> float:
        t0 = self.temperature_reference
        return (T - t0) * (T + t0 + 2.0 * _KELVIN)

    def check_wavelength(self, lam) -> None:
        lo, hi = self.wavelength_range
        arr = np.asarray(lam, dtype=float)
        if arr.size == 0:
            return
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"non-finite wavelength for {self.crystal_name}")
        if arr.min() < lo - _RANGE_SLACK or arr.max() > hi + _RANGE_SLACK:
            raise DomainError(
                f"wavelength {arr.min():.6g}..{arr.max():.6g} um outside "
                f"{self.crystal_name} validity range [{lo}, {hi}] um"
            )

    def check_temperature(self, T: float) -> None:
        lo, hi = self.temperature_range
        if not (lo - _RANGE_SLACK <= T <= hi + _RANGE_SLACK):
            raise DomainError(
                f"temperature {T} degC outside {self.crystal_name} validity "
                f"range [{lo}, {hi}] degC"
            )

    def in_wavelength_range(self, lam) -> np.ndarray:
        lo, hi = self.wavelength_range
        lam = np.asarray(lam, dtype=float)
        return (lam >= lo - _RANGE_SLACK) & (lam <= hi + _RANGE_SLACK)


def _full_vector(coeffs) -> np.ndarray:
    v = np.zeros(11)
    v[: len(coeffs)] = coeffs
    return v


def _parse_floats(key: str, text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(p == "" for p in parts):
        raise DispersionFileError(f"empty entry in '{key}'")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise DispersionFileError(f"bad number in '{key}': {text!r}") from exc


def parse_model(text: str, source: str = "") -> DispersionModel:
    """Build a model from coefficient-file text."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DispersionFileError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in entries:
            raise DispersionFileError(f"{source}:{lineno}: duplicate key '{key}'")
        entries[key] = value

    missing = [k for k in _REQUIRED_KEYS if k not in entries]
    if missing:
        raise DispersionFileError(f"{source}: missing keys {', '.join(missing)}")

    form = entries["form"]
    if form not in FORMS:
        raise DispersionFileError(f"{source}: unknown form '{form}'")
    n_coeffs = FORMS[form]
    ne = _parse_floats("ne_coeffs", entries["ne_coeffs"])
    no = _parse_floats("no_coeffs", entries["no_coeffs"])
    for key, vals in (("ne_coeffs", ne), ("no_coeffs", no)):
        if len(vals) != n_coeffs:
            raise DispersionFileError(
                f"{source}: '{key}' has {len(vals)} coefficients, "
                f"form '{form}' needs {n_coeffs}"
            )

    lam_range = _parse_floats("lambda_range_um", entries["lambda_range_um"])
    t_range = _parse_floats("temp_range_c", entries["temp_range_c"])
    for key, rng in (("lambda_range_um", lam_range), ("temp_range_c", t_range)):
        if len(rng) != 2 or not rng[0] < rng[1]:
            raise DispersionFileError(f"{source}: '{key}' must be 'min, max'")
    if lam_range[0] <= 0:
        raise DispersionFileError(f"{source}: wavelengths must be positive")
    (t_ref,) = _parse_floats("temp_ref_c", entries["temp_ref_c"])

    model = DispersionModel(
        crystal_name=entries["crystal"],
        form=form,
        ne_coeffs=ne,
        no_coeffs=no,
        temperature_reference=t_ref,
        wavelength_range=(lam_range[0], lam_range[1]),
        temperature_range=(t_range[0], t_range[1]),
        source=source,
    )
    _validate(model)
    return model


def _validate(model: DispersionModel) -> None:
    # indices must be real and > 1 over the declared domain
    lam = np.linspace(*model.wavelength_range, 201)
    for T in np.linspace(*model.temperature_range, 5):
        f = model.thermal_parameter(T)
        for axis in Axis:
            with np.errstate(invalid="ignore", divide="ignore"):
                n = _kernels.sellmeier_index(model.coefficients(axis), f, lam)
            if not np.all(np.isfinite(n)) or np.any(n <= 1.0):
                raise DispersionFileError(
                    f"{model.source}: {axis.name.lower()} index not physical "
                    f"at T = {T:g} degC"
                )


def load_model(path) -> DispersionModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DispersionFileError(f"cannot read {path}: {exc}") from exc
    return parse_model(text, source=str(path))


def crystal_search_path() -> list[Path]:
    env = os.environ.get(CRYSTAL_DIR_ENV)
    dirs = [Path(p) for p in env.split(os.pathsep) if p] if env else []
    dirs.append(DATA_DIR)
    return dirs


def resolve_crystal(name_or_path: str) -> Path:
    """Find a coefficient file by path or by bare name (``ppslt``, ``ppln``)."""
    candidate = Path(name_or_path)
    if candidate.is_file():
        return candidate
    names = [name_or_path]
    if not name_or_path.endswith(FILE_SUFFIX):
        names.append(name_or_path.lower() + FILE_SUFFIX)
    for d in crystal_search_path():
        for n in names:
            p = d / n
            if p.is_file():
                return p
    raise DispersionFileError(f"no coefficient file found for '{name_or_path}'")


def load_crystal(name_or_path: str = "ppslt") -> DispersionModel:
    return load_model(resolve_crystal(name_or_path))


def refractive_index(model: DispersionModel, axis, lam, T: float):
    """n_o or n_e at wavelength(s) ``lam`` (um) and temperature ``T`` (degC)."""
    model.check_wavelength(lam)
    model.check_temperature(T)
    n = _kernels.sellmeier_index(
        model.coefficients(Axis(axis)), model.thermal_parameter(T), lam
    )
    return float(n) if np.ndim(lam) == 0 else n


def birefringence(model: DispersionModel, lam, T: float):
    """Signed n_e - n_o."""
    ne = refractive_index(model, Axis.EXTRAORDINARY, lam, T)
    no = refractive_index(model, Axis.ORDINARY, lam, T)
    return ne - no
