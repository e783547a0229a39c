"""Flat ``key = value`` run configuration.

Example::

    n = 2
    N = 16
    k = 2
    l = 1
    a = 2
    toy = true
    psi = manufactured
    ustar 1 -1 0 0 0.025
    ustar 1 1 0 0 -0.025

Mode rows ``<table> f_x1 f_y1 ... f_xn f_yn amplitude [phase]`` add the term
amplitude * cos(2 pi f.x + phase) to the named trigonometric polynomial.
Tables: rho (chi = a omega + ddbar rho), ustar (manufactured solution),
psi (used by ``psi = fourier <base>``), ubar (subsolution).

``psi`` accepts ``constant <v>``, ``invariant`` (psi = c), ``manufactured``
(psi from ustar, b = 0) or ``fourier <base>`` (psi = base * exp(psi table)).
``psi_shift = d`` multiplies any of these by e^d.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, inf
from pathlib import Path

import numpy as np

from . import functionals, hermitian, symfun
from .field import TorusGeometry, TrigPolynomial
from .flow import FlowConfig

TABLES = ("rho", "ustar", "psi", "ubar")
ORACLE_MAX_N = 6


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


def _bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_or_inf(text):
    return inf if text.lower() in ("inf", "none") else float(text)


KEYS = {
    "n": int,
    "N": int,
    "k": int,
    "l": int,
    "a": float,
    "toy": _bool,
    "psi": str,
    "psi_shift": float,
    "ubar": str,
    "cfl": float,
    "stop_osc": float,
    "t_max": _float_or_inf,
    "max_steps": int,
    "snapshot_every": int,
    "theta_every": int,
    "seed": int,
    "selftest_n": int,
    "selftest_samples": int,
    "selftest_fault": _bool,
    "out": str,
}


@dataclass
class RunConfig:
    n: int = 2
    N: int = 16
    k: int = 2
    l: int = 1
    a: float = 1.0
    toy: bool = False
    psi: str = "invariant"
    psi_shift: float = 0.0
    ubar: str | None = None
    cfl: float = 0.2
    stop_osc: float = 1e-8
    t_max: float = 100.0
    max_steps: int = 1_000_000
    snapshot_every: int = 1
    theta_every: int = 0
    seed: int = 0
    selftest_n: int = 6
    selftest_samples: int = 2000
    selftest_fault: bool = False
    out: str | None = None
    tables: dict = field(default_factory=lambda: {t: [] for t in TABLES})
    modes: dict = field(default_factory=lambda: {t: [] for t in TABLES})
    lines: dict = field(default_factory=dict)

    def trig(self, table):
        return TrigPolynomial.from_rows(self.modes[table])

    def geometry(self) -> TorusGeometry:
        return TorusGeometry(self.n, self.N, self.a, self.trig("rho"), self.toy)

    def psi_field(self, geom: TorusGeometry):
        kind, *rest = self.psi.split()
        if kind == "constant":
            psi = np.full(geom.shape, float(rest[0]))
        elif kind == "invariant":
            psi = np.full(geom.shape, functionals.constant_c(geom, self.k, self.l))
        elif kind == "manufactured":
            X = geom.chi + geom.sample_hessian(self.trig("ustar"))
            S = symfun.sym_polys(hermitian.eigen_wrt_metric(X), self.k)
            psi = (S[..., self.k] / comb(self.n, self.k)) / (S[..., self.l] / comb(self.n, self.l))
        else:
            psi = float(rest[0]) * np.exp(geom.sample(self.trig("psi")))
        return psi * np.exp(self.psi_shift)

    def u_bar_field(self, geom: TorusGeometry):
        if self.ubar is None:
            return None
        if self.ubar == "zero":
            return geom.zeros()
        return geom.sample(self.trig("ubar"))

    def flow_config(self, geom: TorusGeometry) -> FlowConfig:
        return FlowConfig(
            k=self.k,
            l=self.l,
            psi=self.psi_field(geom),
            cfl=self.cfl,
            stop_osc=self.stop_osc,
            t_max=self.t_max,
            max_steps=self.max_steps,
            snapshot_every=self.snapshot_every,
            u_bar=self.u_bar_field(geom),
            theta_every=self.theta_every,
        )

    def build(self):
        """Geometry (cone-checked for k), FlowConfig and u_bar (or None)."""
        geom = self.geometry()
        try:
            geom.validate_cone(self.k)
        except ValueError as exc:
            raise ConfigError(f"rho: {exc}", self.lines.get("a")) from None
        return geom, self.flow_config(geom), self.u_bar_field(geom)

    def validate(self):
        def fail(key, message):
            raise ConfigError(f"{key}: {message}", self.lines.get(key))

        if self.n not in (2, 3):
            fail("n", "grid dimension must be 2 or 3")
        if self.N < 8 or self.N % 2:
            fail("N", "must be even and >= 8")
        if not 1 <= self.k <= self.n:
            fail("k", f"must satisfy 1 <= k <= n = {self.n}")
        if not 0 <= self.l < self.k:
            fail("l", f"must satisfy 0 <= l < k = {self.k}")
        if self.a <= 0:
            fail("a", "must be positive")
        if not 0 < self.cfl <= 1:
            fail("cfl", "must lie in (0, 1]")
        if self.stop_osc <= 0:
            fail("stop_osc", "must be positive")
        if self.max_steps < 0:
            fail("max_steps", "must be non-negative")
        if self.snapshot_every < 1:
            fail("snapshot_every", "must be >= 1")
        if self.theta_every < 0:
            fail("theta_every", "must be non-negative")
        if not 2 <= self.selftest_n <= ORACLE_MAX_N:
            fail("selftest_n", f"oracle battery supports 2 <= n <= {ORACLE_MAX_N}")
        if self.selftest_samples < 1:
            fail("selftest_samples", "must be positive")

        kind, *rest = self.psi.split() or [""]
        arity = {"constant": 1, "invariant": 0, "manufactured": 0, "fourier": 1}
        if kind not in arity or len(rest) != arity[kind]:
            fail("psi", "expected 'constant <v>', 'invariant', 'manufactured' or 'fourier <base>'")
        if rest:
            try:
                value = float(rest[0])
            except ValueError:
                fail("psi", f"not a number: {rest[0]!r}")
            if not value > 0:
                fail("psi", "must be positive")
        if self.tables["psi"] and kind != "fourier":
            raise ConfigError("psi mode rows need 'psi = fourier <base>'", self.tables["psi"][0][1])
        if self.ubar not in (None, "zero", "modes"):
            fail("ubar", "expected 'zero' or 'modes'")
        if self.ubar == "zero" and self.tables["ubar"]:
            raise ConfigError("ubar rows given with 'ubar = zero'", self.tables["ubar"][0][1])

        for table, rows in self.tables.items():
            resolved = []
            for nums, line in rows:
                # 2n integer frequencies, then the amplitude and an optional phase
                if len(nums) not in (2 * self.n + 1, 2 * self.n + 2):
                    raise ConfigError(
                        f"{table} row needs {2 * self.n} frequencies, an amplitude and an optional phase",
                        line,
                    )
                freq = nums[: 2 * self.n]
                if any(f != int(f) for f in freq):
                    raise ConfigError(f"{table} row: frequencies must be integers", line)
                if self.toy and any(freq[2:]):
                    raise ConfigError(f"{table} row: toy mode allows (x1, y1) frequencies only", line)
                phase = nums[2 * self.n + 1] if len(nums) > 2 * self.n + 1 else 0.0
                resolved.append((tuple(int(f) for f in freq), nums[2 * self.n], phase))
            self.modes[table] = resolved
        return self


def parse_config_text(text) -> RunConfig:
    cfg = RunConfig()
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = (p.strip() for p in line.partition("="))
            if key not in KEYS:
                raise ConfigError(f"unknown key {key!r}", lineno)
            if key in seen:
                raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", lineno)
            if not value:
                raise ConfigError(f"missing value for {key!r}", lineno)
            try:
                setattr(cfg, key, KEYS[key](value))
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}", lineno) from None
            seen[key] = lineno
            continue
        table, *fields = line.split()
        if table not in TABLES:
            raise ConfigError(f"unknown key or table {table!r}", lineno)
        try:
            nums = [float(f) for f in fields]
        except ValueError:
            raise ConfigError(f"{table} row must be numeric", lineno) from None
        cfg.tables[table].append((nums, lineno))
        if table == "ubar" and cfg.ubar is None:
            cfg.ubar = "modes"
    cfg.lines = seen
    return cfg.validate()


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config_text(text)
