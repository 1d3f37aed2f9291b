"""Single-point evaluation and parameter sweeps over a :class:`Scenario`."""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from hapqkd import atmosphere, budget, geometry, optics, qkd
from hapqkd.atmosphere import SKY_PRESETS, WEATHER_GRADES, SkyRadiance, WeatherCondition
from hapqkd.budget import LossBreakdown
from hapqkd.errors import MissingEntryError, ScenarioError
from hapqkd.qkd import FeasibilityResult
from hapqkd.scenario import Scenario, with_value

FIGURES = tuple(f"fig{i}" for i in range(2, 12))
_MODEL_ERRORS = (ValueError, MissingEntryError)


def _attributed(module: str, fn, *args):
    try:
        return fn(*args)
    except _MODEL_ERRORS as exc:
        msg = exc.args[0] if exc.args else str(exc)
        raise type(exc)(f"{module}: {msg}") from exc


@dataclass(frozen=True)
class PointResult:
    los: float
    footprint_diameter: float
    beam_wander_variance: float
    method1: LossBreakdown
    nanobob: LossBreakdown
    dv: FeasibilityResult
    cv: FeasibilityResult

    def as_dict(self) -> dict:
        return {
            "los_m": self.los,
            "footprint_diameter_m": self.footprint_diameter,
            "beam_wander_variance_m2": self.beam_wander_variance,
            "method1": self.method1.as_dict(),
            "nanobob": self.nanobob.as_dict(),
            "dv": self.dv.as_dict(),
            "cv": self.cv.as_dict(),
        }

    def selected(self, method: str) -> LossBreakdown:
        return self.method1 if method == "method1" else self.nanobob


def run_point(scenario: Scenario) -> PointResult:
    """Both loss budgets plus DV and CV verdicts for the scenario's selected method."""
    los = _attributed("geometry", geometry.los_distance, scenario.geometry)
    tx = scenario.transmitter
    footprint = geometry.ground_footprint_diameter(
        tx.aperture_diameter, los, optics.diffraction_divergence(tx)
    )
    wander = _attributed(
        "optics", optics.beam_wander_variance, los, tx, scenario.turbulence.fried_parameter
    )
    m1 = _attributed("budget", budget.method1_total, scenario)
    nb = _attributed("budget", budget.nanobob_total, scenario)
    channel = (m1 if scenario.method == "method1" else nb).channel_total
    dv = _attributed("qkd", qkd.dv_feasibility, scenario, channel)
    cv = _attributed("qkd", qkd.cv_feasibility, scenario, channel)
    return PointResult(los, footprint, wander, m1, nb, dv, cv)


# --------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class Variable:
    column: str
    values: tuple[float, ...]
    apply: Callable[[Scenario, float], Scenario]


@dataclass(frozen=True)
class Series:
    column: str
    evaluate: Callable[[Scenario, float], float]


@dataclass(frozen=True)
class SweepSpec:
    """Either a figure preset or a custom single-variable sweep.

    Custom sweeps set ``variable`` to a dotted scenario path such as
    ``geometry.elevation_deg`` or ``transmitter.divergence_override``.
    ``geometry.los`` (meters) is accepted as a derived variable.
    """

    preset: Optional[str] = None
    variable: Optional[str] = None
    min: Optional[float] = None
    max: Optional[float] = None
    points: Optional[int] = None
    scale: str = "linear"
    methods: tuple[str, ...] = budget.METHODS
    weather_grades: Optional[tuple[str, ...]] = None
    sky_presets: Optional[tuple[str, ...]] = None
    divergences_mrad: tuple[float, ...] = (0.1, 1.0, 3.0, 5.0, 10.0)
    rx_apertures: tuple[float, ...] = (0.2, 0.4, 0.6)

    def __post_init__(self) -> None:
        if self.preset is None and self.variable is None:
            raise ScenarioError("sweep needs a preset or a variable")
        if self.preset is not None and self.preset not in FIGURES:
            raise ScenarioError(f"unknown preset {self.preset!r}; choose from {FIGURES}")
        if self.scale not in ("linear", "log"):
            raise ScenarioError("scale must be 'linear' or 'log'")
        for m in self.methods:
            if m not in budget.METHODS:
                raise ScenarioError(f"unknown method {m!r}")
        if self.sky_presets is not None:
            for p in self.sky_presets:
                if p not in SKY_PRESETS:
                    raise ScenarioError(f"unknown sky preset {p!r}")
        if self.preset is None:
            if self.min is None or self.max is None or self.points is None:
                raise ScenarioError("custom sweep needs min, max and points")
            _check_grid(self.min, self.max, self.points, self.scale)


def _check_grid(lo: float, hi: float, points: int, scale: str) -> None:
    if points < 2:
        raise ScenarioError(f"points must be >= 2, got {points}")
    if not lo < hi:
        raise ScenarioError(f"min must be < max, got {lo} and {hi}")
    if scale == "log" and lo <= 0:
        raise ScenarioError("log sweeps need min > 0")


def grid(lo: float, hi: float, points: int, scale: str = "linear") -> tuple[float, ...]:
    _check_grid(lo, hi, points, scale)
    if scale == "log":
        exps = np.linspace(math.log10(lo), math.log10(hi), points)
        return tuple(float(v) for v in 10.0**exps)
    return tuple(float(v) for v in np.linspace(lo, hi, points))


@dataclass
class SeriesTable:
    columns: list[str]
    rows: list[list[float]] = field(default_factory=list)
    errors: list[Optional[str]] = field(default_factory=list)

    @property
    def has_errors(self) -> bool:
        return any(e is not None for e in self.errors)

    def column(self, name: str) -> list[float]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _set_los_km(s: Scenario, x: float) -> Scenario:
    return with_value(s, "geometry.los", x * 1000.0)


def _with_weather(s: Scenario, kind: str, visibility: float) -> Scenario:
    return dataclasses.replace(s, weather=WeatherCondition(kind, visibility))


def _with_divergence(s: Scenario, divergence: float) -> Scenario:
    return with_value(s, "transmitter.divergence_override", divergence)


def _channel(method: str, prepare=None):
    def evaluate(s: Scenario, x: float) -> float:
        if prepare is not None:
            s = prepare(s)
        return budget.total_loss(s, method).channel_total

    return evaluate


def _dv_qber(method: str, prepare=None):
    def evaluate(s: Scenario, x: float) -> float:
        if prepare is not None:
            s = prepare(s)
        loss = budget.total_loss(s, method).channel_total
        return qkd.dv_feasibility(s, loss).qber

    return evaluate


def _cv_snr(method: str, prepare=None):
    def evaluate(s: Scenario, x: float) -> float:
        if prepare is not None:
            s = prepare(s)
        return qkd.cv_snr(s.cv, budget.total_loss(s, method).channel_total)

    return evaluate


def _mrad_label(d: float) -> str:
    return f"{d:g}mrad"


def _weather_figure(spec: SweepSpec, kind: str) -> tuple[Variable, list[Series]]:
    grades = spec.weather_grades or tuple(WEATHER_GRADES[kind])
    x = Variable("los_km", grid(20.0, 230.0, 43), _set_los_km)
    series = []
    for m in spec.methods:
        for g in grades:
            if g not in WEATHER_GRADES[kind]:
                raise ScenarioError(f"unknown {kind} grade {g!r}")
            vis = WEATHER_GRADES[kind][g]
            prep = lambda s, vis=vis: _with_weather(s, kind, vis)
            series.append(Series(f"{m}_{kind}_{g}_db", _channel(m, prep)))
    return x, series


def _divergence_figure(spec: SweepSpec, metric) -> tuple[Variable, list[Series]]:
    def held(s: Scenario, x: float) -> Scenario:
        s = _set_los_km(s, x)
        s = with_value(s, "transmitter.aperture_diameter", 0.1)
        s = with_value(s, "receiver.aperture_diameter", 0.4)
        return dataclasses.replace(s, sky=SkyRadiance("moonless"))

    x = Variable("los_km", grid(20.0, 230.0, 43), held)
    series = []
    for m in spec.methods:
        for d in spec.divergences_mrad:
            prep = lambda s, d=d: _with_divergence(s, d * 1e-3)
            series.append(Series(f"{m}_{_mrad_label(d)}", metric(m, prep)))
    return x, series


def preset_definition(spec: SweepSpec, scenario: Scenario) -> tuple[Variable, list[Series]]:
    """Swept variable and series for one of the figure presets."""
    name = spec.preset
    wl_nm = atmosphere.wavelength_nm(scenario.transmitter.wavelength)
    if name == "fig2":
        kinds = ("fog", "rain", "snow")
        x = Variable("visibility_km", grid(0.1, 100.0, 31, "log"), lambda s, v: s)
        series = [
            Series(
                f"{k}_db_per_km",
                lambda s, v, k=k: atmosphere.weather_rate(WeatherCondition(k, v), wl_nm),
            )
            for k in kinds
        ]
        return x, series
    if name == "fig3":
        x = Variable("los_km", grid(20.0, 230.0, 43), _set_los_km)
        clear = lambda s: dataclasses.replace(s, weather=WeatherCondition())
        return x, [Series(f"{m}_channel_db", _channel(m, clear)) for m in spec.methods]
    if name == "fig4":
        return _weather_figure(spec, "fog")
    if name == "fig5":
        return _weather_figure(spec, "rain")
    if name == "fig6":
        presets = spec.sky_presets or tuple(SKY_PRESETS)
        x = Variable("channel_loss_db", grid(0.0, 60.0, 61), lambda s, v: s)
        series = []
        for p in presets:
            def q(s: Scenario, loss: float, p=p) -> float:
                return qkd.qber_at_loss(
                    loss, SkyRadiance(p), s.receiver, s.detector, s.dv, s.transmitter.wavelength
                )

            series.append(Series(f"qber_{p}", q))
        return x, series
    if name == "fig7":
        def at_aperture(s: Scenario, d: float) -> Scenario:
            s = with_value(s, "geometry.elevation_deg", 20.0)
            return with_value(s, "transmitter.aperture_diameter", d)

        x = Variable("tx_aperture_m", grid(0.05, 0.30, 26), at_aperture)
        series = []
        for m in spec.methods:
            for rx in spec.rx_apertures:
                prep = lambda s, rx=rx: with_value(s, "receiver.aperture_diameter", rx)
                series.append(Series(f"{m}_rx{rx:g}m_db", _channel(m, prep)))
        return x, series
    if name == "fig8":
        x, series = _divergence_figure(spec, _channel)
        return x, [dataclasses.replace(s, column=s.column + "_db") for s in series]
    if name == "fig9":
        x, series = _divergence_figure(spec, _dv_qber)
        return x, [dataclasses.replace(s, column=s.column + "_qber") for s in series]
    if name == "fig10":
        x, series = _divergence_figure(spec, _cv_snr)
        return x, [dataclasses.replace(s, column=s.column + "_snr") for s in series]
    if name == "fig11":
        vertical = lambda s, d: with_value(s, "geometry.elevation_deg", 90.0)

        def footprint(s: Scenario, d_mrad: float) -> float:
            return geometry.ground_footprint_diameter(
                s.transmitter.aperture_diameter, geometry.los_distance(s.geometry), d_mrad * 1e-3
            )

        x = Variable("divergence_mrad", grid(0.0, 10.0, 101), vertical)
        return x, [
            Series("footprint_diameter_m", footprint),
            Series("footprint_radius_m", lambda s, d: footprint(s, d) / 2.0),
        ]
    raise ScenarioError(f"unknown preset {name!r}")


def _custom_definition(spec: SweepSpec) -> tuple[Variable, list[Series]]:
    path = spec.variable
    x = Variable(
        path,
        grid(spec.min, spec.max, spec.points, spec.scale),
        lambda s, v: with_value(s, path, v),
    )

    def selected_loss(s: Scenario) -> float:
        return budget.total_loss(s).channel_total

    series = [Series(f"{m}_channel_db", _channel(m)) for m in spec.methods]
    series += [
        Series("dv_qber", lambda s, v: qkd.dv_feasibility(s, selected_loss(s)).qber),
        Series("dv_margin_db", lambda s, v: qkd.dv_feasibility(s, selected_loss(s)).margin_db),
        Series("cv_snr", lambda s, v: qkd.cv_snr(s.cv, selected_loss(s))),
    ]
    return x, series


def _evaluate_row(scenario: Scenario, variable: Variable, series: Sequence[Series], x: float):
    values = []
    error = None
    try:
        s = variable.apply(scenario, x)
    except Exception as exc:  # noqa: BLE001 - a bad point must not abort the sweep
        return [x] + [math.nan] * len(series), f"{type(exc).__name__}: {exc}"
    for ser in series:
        try:
            values.append(float(ser.evaluate(s, x)))
        except Exception as exc:  # noqa: BLE001
            values.append(math.nan)
            if error is None:
                error = f"{ser.column}: {type(exc).__name__}: {exc}"
    return [x] + values, error


def run_sweep(spec: SweepSpec, scenario: Scenario | None = None, workers: int = 1) -> SeriesTable:
    """Evaluate every series at every grid point.

    Rows come back in ascending order of the swept variable whatever the
    evaluation order; a failing point keeps its row, with NaN cells and a
    message in ``errors``.
    """
    scenario = scenario if scenario is not None else Scenario()
    if spec.preset is not None:
        variable, series = preset_definition(spec, scenario)
    else:
        variable, series = _custom_definition(spec)
    xs = sorted(variable.values)

    def job(x: float):
        return _evaluate_row(scenario, variable, series, x)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, xs))
    else:
        results = [job(x) for x in xs]
    table = SeriesTable([variable.column] + [s.column for s in series])
    for row, err in results:
        table.rows.append(row)
        table.errors.append(err)
    return table
